use coordobs::selftest::{self, Check};

fn report(index: usize, check: &Check) {
    println!("criterion {}: {check}", index + 1);
}

#[test]
fn acceptance() {
    let checks = selftest::run_all(1000);
    for (k, c) in checks.iter().enumerate() {
        report(k, c);
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

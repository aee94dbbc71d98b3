use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use coordobs::{ObserverRun64, Summary64};
use serde::Serialize;

/// Full double precision: 17 significant digits.
fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn write_csv(run: &ObserverRun64, w: &mut impl Write) -> io::Result<()> {
    let n = run.plant.first().map_or(0, Vec::len);
    let k = run.auxiliary.first().map_or(0, Vec::len);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("xhat{i}")));
    header.extend((1..=k).map(|i| format!("w{i}")));
    header.extend(["err_state", "err_image", "det_jac"].map(String::from));
    writeln!(w, "{}", header.join(","))?;
    for i in 0..run.len() {
        let row: Vec<String> = std::iter::once(run.times[i])
            .chain(run.plant[i].iter().copied())
            .chain(run.estimate[i].iter().copied())
            .chain(run.auxiliary[i].iter().copied())
            .chain([run.err_state[i], run.err_image[i], run.det_jac[i]])
            .map(number)
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    if let Some(tr) = &run.truncation {
        writeln!(
            w,
            "# truncated at t={}: {}: {}",
            number(tr.t),
            tr.reason.code(),
            tr.reason
        )?;
    }
    Ok(())
}

pub fn save_csv(run: &ObserverRun64, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(run, &mut w)?;
    w.flush()
}

#[derive(Serialize, Debug)]
pub struct SummaryRecord<'a> {
    pub scenario: &'a str,
    pub mode: &'a str,
    pub params: serde_json::Map<String, serde_json::Value>,
    pub final_error: f64,
    pub time_to: Option<f64>,
    pub min_det: Option<f64>,
    pub truncated: bool,
    pub truncation_time: Option<f64>,
}

impl<'a> SummaryRecord<'a> {
    pub fn new(scenario: &'a str, mode: &'a str, params: &[(&str, f64)], s: &Summary64) -> Self {
        Self {
            scenario,
            mode,
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), serde_json::Value::from(*v)))
                .collect(),
            final_error: s.final_error,
            time_to: s.time_to,
            min_det: s.min_det,
            truncated: s.truncated,
            truncation_time: s.truncation_time,
        }
    }
}

pub fn save_summary(record: &SummaryRecord<'_>, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, record)?;
    writeln!(w)?;
    w.flush()
}

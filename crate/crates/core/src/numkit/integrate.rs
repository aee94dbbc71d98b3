use crate::numkit::vector::{all_finite, axpy};
use crate::{cast, Error, Result, Scalar};

/// Uniform time grid `t0, t0 + dt, …, t_final`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    t0: T,
    t_final: T,
    dt: T,
    steps: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(t0: T, t_final: T, dt: T) -> Result<Self> {
        if !(t0.is_finite() && t_final.is_finite() && dt.is_finite()) {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        if dt <= T::zero() {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
        }
        if t_final <= t0 {
            return Err(Error::InvalidGrid(format!(
                "t_final {t_final} must exceed t0 {t0}"
            )));
        }
        let span = t_final - t0;
        let steps = (span / dt).round();
        if (steps * dt - span).abs() > cast::<T>(1e-9) * dt {
            return Err(Error::InvalidGrid(format!(
                "span {span} is not an integer multiple of dt {dt}"
            )));
        }
        let steps = steps
            .to_usize()
            .ok_or_else(|| Error::InvalidGrid("too many steps".into()))?;
        Ok(Self {
            t0,
            t_final,
            dt,
            steps,
        })
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn t_final(&self) -> T {
        self.t_final
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Number of steps; the grid has `steps() + 1` nodes.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, k: usize) -> T {
        if k == self.steps {
            self.t_final
        } else {
            self.t0 + cast::<T>(k as f64) * self.dt
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.steps).map(move |k| self.time(k))
    }
}

/// Where and why an integration stopped early.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation<T> {
    /// Time of the last stored node.
    pub t: T,
    pub reason: Error,
}

#[derive(Clone, Debug)]
pub struct Integration<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub truncation: Option<Truncation<T>>,
}

impl<T: Scalar> Integration<T> {
    pub fn last(&self) -> &[T] {
        self.states
            .last()
            .expect("integration stores at least the initial state")
    }
}

fn eval<T: Scalar, F>(field: &mut F, t: T, x: &[T]) -> Result<Vec<T>>
where
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
{
    let v = field(t, x)?;
    if v.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: v.len(),
        });
    }
    if !all_finite(&v) {
        return Err(Error::NonFiniteField {
            t: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(v)
}

/// One classical Runge–Kutta step.
pub fn rk4_step<T: Scalar, F>(field: &mut F, t: T, x: &[T], h: T) -> Result<Vec<T>>
where
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
{
    let half = h / cast(2.0);
    let k1 = eval(field, t, x)?;
    let k2 = eval(field, t + half, &axpy(x, half, &k1))?;
    let k3 = eval(field, t + half, &axpy(x, half, &k2))?;
    let k4 = eval(field, t + h, &axpy(x, h, &k3))?;
    let sixth = h / cast(6.0);
    let two: T = cast(2.0);
    let next: Vec<T> = (0..x.len())
        .map(|i| x[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
        .collect();
    if !all_finite(&next) {
        return Err(Error::NonFiniteField {
            t: (t + h).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(next)
}

/// Fixed-step RK4 over `grid`. A failing or non-finite field evaluation
/// stops the run at the last good node and is recorded in `truncation`.
pub fn integrate_fixed_step<T: Scalar, F>(
    mut field: F,
    x0: &[T],
    grid: &Grid<T>,
) -> Result<Integration<T>>
where
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
{
    if !all_finite(x0) {
        return Err(Error::NonFiniteInput);
    }
    let mut times = Vec::with_capacity(grid.steps() + 1);
    let mut states = Vec::with_capacity(grid.steps() + 1);
    times.push(grid.t0());
    states.push(x0.to_vec());
    let mut truncation = None;
    for k in 0..grid.steps() {
        let t = grid.time(k);
        let h = grid.time(k + 1) - t;
        match rk4_step(&mut field, t, states.last().unwrap(), h) {
            Ok(next) => {
                times.push(grid.time(k + 1));
                states.push(next);
            }
            Err(reason) => {
                truncation = Some(Truncation { t, reason });
                break;
            }
        }
    }
    Ok(Integration {
        times,
        states,
        truncation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 1.0, 0.0).is_err());
        assert!(Grid::new(1.0, 1.0, 0.1).is_err());
        assert!(Grid::new(0.0, 1.0, 0.3).is_err());
        let g = Grid::new(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.steps(), 100);
        assert_eq!(g.time(100), 1.0);
        assert_eq!(g.nodes().count(), 101);
    }

    #[test]
    fn zero_field_is_constant() {
        let g = Grid::new(0.0, 1.0, 0.1).unwrap();
        let run = integrate_fixed_step(|_, _| Ok(vec![0.0, 0.0]), &[1.0, 2.0], &g).unwrap();
        assert!(run.states.iter().all(|s| s == &vec![1.0, 2.0]));
        assert!(run.truncation.is_none());
    }

    #[test]
    fn exponential_decay() {
        let g = Grid::new(0.0, 1.0, 0.01).unwrap();
        let run = integrate_fixed_step(|_, x: &[f64]| Ok(vec![-x[0]]), &[1.0], &g).unwrap();
        assert!((run.last()[0] - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn oscillator_closed_form() {
        let n = 3142;
        let g = Grid::new(0.0, std::f64::consts::PI, std::f64::consts::PI / n as f64).unwrap();
        let run = integrate_fixed_step(
            |_, x: &[f64]| Ok(vec![x[1], -x[0] * x[2], 0.0]),
            &[1.0, 0.0, 1.0],
            &g,
        )
        .unwrap();
        assert!((run.last()[0] - std::f64::consts::PI.cos()).abs() < 1e-6);
    }

    #[test]
    fn blow_up_truncates_at_last_finite_node() {
        // x' = x², x(0) = 1 escapes at t = 1.
        let g = Grid::new(0.0, 2.0, 0.01).unwrap();
        let run = integrate_fixed_step(
            |t, x: &[f64]| {
                if x[0] > 1e200 {
                    Err(Error::NonFiniteField { t })
                } else {
                    Ok(vec![x[0] * x[0]])
                }
            },
            &[1.0],
            &g,
        )
        .unwrap();
        let tr = run.truncation.expect("truncated");
        // the discrete solution escapes slightly after the exact blow-up at t = 1
        assert!(tr.t > 0.9 && tr.t < 1.1);
        assert!(run.states.iter().all(|s| s[0].is_finite()));
        assert_eq!(*run.times.last().unwrap(), tr.t);
    }

    #[test]
    fn non_finite_initial_state_rejected() {
        let g = Grid::new(0.0, 1.0, 0.5).unwrap();
        assert!(integrate_fixed_step(|_, x: &[f64]| Ok(x.to_vec()), &[f64::NAN], &g).is_err());
    }
}

use super::{default_condition_limit, extended_observer_step, RawObserver};
use crate::completion::{CoordinateMap, Immersion};
use crate::dynsys::ControlledSystem;
use crate::numkit::vector::{distance, norm};
use crate::numkit::{determinant, integrate_fixed_step, Grid, Truncation};
use crate::{Error, Result, Scalar};

/// Map from an observer state to a full estimate `(x̂, ŵ)`.
pub type Estimator<'a, T> = &'a (dyn Fn(&[T]) -> Result<Vec<T>> + Sync);

/// How the observer state is represented during integration.
pub enum Realization<'a, T> {
    /// Integrate `ξ̂` directly; `estimate` recovers `(x̂, ŵ)` from `ξ̂`.
    Raw {
        observer: &'a dyn RawObserver<T>,
        estimate: Estimator<'a, T>,
    },
    /// Integrate `(x̂, ŵ)` through the Jacobian of `map`.
    Extended {
        map: &'a dyn CoordinateMap<T>,
        observer: &'a dyn RawObserver<T>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinates {
    Image,
    Original,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CascadeOptions<T> {
    pub condition_limit: T,
}

impl<T: Scalar> Default for CascadeOptions<T> {
    fn default() -> Self {
        Self {
            condition_limit: default_condition_limit(),
        }
    }
}

/// Plant and observer trajectories with per-node diagnostics.
#[derive(Clone, Debug)]
pub struct ObserverRun<T> {
    pub grid: Grid<T>,
    pub coordinates: Coordinates,
    pub times: Vec<T>,
    pub plant: Vec<Vec<T>>,
    /// Integrated observer state (`ξ̂` or `(x̂, ŵ)`).
    pub observer: Vec<Vec<T>>,
    pub estimate: Vec<Vec<T>>,
    pub auxiliary: Vec<Vec<T>>,
    /// Observer expressed in image coordinates.
    pub image_estimate: Vec<Vec<T>>,
    /// `|x − x̂| + |ŵ|`
    pub err_state: Vec<T>,
    /// `|φ(x) − ξ̂|`
    pub err_image: Vec<T>,
    /// Determinant of the coordinate Jacobian; NaN for raw runs.
    pub det_jac: Vec<T>,
    pub min_abs_det: Option<T>,
    pub truncation: Option<Truncation<T>>,
}

impl<T: Scalar> ObserverRun<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn completed(&self) -> bool {
        self.truncation.is_none()
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("run stores the initial node")
    }

    /// Error at the node closest to `t`.
    pub fn error_at(&self, t: T) -> T {
        let k = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (*a.1 - t).abs().partial_cmp(&(*b.1 - t).abs()).unwrap())
            .map(|(k, _)| k)
            .unwrap_or(0);
        self.err_state[k]
    }
}

/// Co-integrates plant and observer on `grid` with the shared output
/// `y(t) = h(x(t))`. Integration failures end the run early and are kept
/// in `truncation`.
pub fn cascade_simulate<T, S, I>(
    sys: &S,
    immersion: &I,
    plant_x0: &[T],
    realization: &Realization<'_, T>,
    observer_init: &[T],
    grid: &Grid<T>,
    opts: &CascadeOptions<T>,
) -> Result<ObserverRun<T>>
where
    T: Scalar,
    S: ControlledSystem<T> + ?Sized,
    I: Immersion<T> + ?Sized,
{
    let n = sys.state_dim();
    if plant_x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: plant_x0.len(),
        });
    }
    if !sys.is_admissible(plant_x0) {
        return Err(Error::invalid(
            "x0",
            "plant initial state is not admissible",
        ));
    }
    let m = match realization {
        Realization::Raw { observer, .. } => observer.dim(),
        Realization::Extended { map, .. } => map.dim(),
    };
    if observer_init.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: observer_init.len(),
        });
    }

    let observer_field = |t: T, x: &[T], o: &[T]| -> Result<Vec<T>> {
        let u = sys.input(t);
        let y = sys.output(x);
        match realization {
            Realization::Raw { observer, estimate } => {
                let s = estimate(o)?;
                Ok(observer.field(o, &s[..n.min(s.len())], &y, &u))
            }
            Realization::Extended { map, observer } => {
                Ok(
                    extended_observer_step(*map, *observer, o, &y, &u, opts.condition_limit)?
                        .derivative,
                )
            }
        }
    };
    let field = |t: T, state: &[T]| -> Result<Vec<T>> {
        let (x, o) = state.split_at(n);
        let mut d = sys.dynamics(x, &sys.input(t));
        d.extend(observer_field(t, x, o)?);
        Ok(d)
    };
    let x0: Vec<T> = plant_x0.iter().chain(observer_init).copied().collect();
    let run = integrate_fixed_step(field, &x0, grid)?;

    let len = run.states.len();
    let mut out = ObserverRun {
        grid: *grid,
        coordinates: match realization {
            Realization::Raw { .. } => Coordinates::Image,
            Realization::Extended { .. } => Coordinates::Original,
        },
        times: run.times,
        plant: Vec::with_capacity(len),
        observer: Vec::with_capacity(len),
        estimate: Vec::with_capacity(len),
        auxiliary: Vec::with_capacity(len),
        image_estimate: Vec::with_capacity(len),
        err_state: Vec::with_capacity(len),
        err_image: Vec::with_capacity(len),
        det_jac: Vec::with_capacity(len),
        min_abs_det: None,
        truncation: run.truncation,
    };
    for state in &run.states {
        let (x, o) = state.split_at(n);
        let (s, xi, det) = match realization {
            Realization::Raw { estimate, .. } => (estimate(o)?, o.to_vec(), T::nan()),
            Realization::Extended { map, .. } => {
                (o.to_vec(), map.eval(o)?, determinant(&map.jacobian(o)?))
            }
        };
        let (x_hat, w_hat) = s.split_at(n.min(s.len()));
        out.err_state.push(distance(x, x_hat) + norm(w_hat));
        out.err_image.push(distance(&immersion.eval(x), &xi));
        if det.is_finite() {
            let a = det.abs();
            out.min_abs_det = Some(out.min_abs_det.map_or(a, |m: T| m.min(a)));
        }
        out.det_jac.push(det);
        out.plant.push(x.to_vec());
        out.observer.push(o.to_vec());
        out.estimate.push(x_hat.to_vec());
        out.auxiliary.push(w_hat.to_vec());
        out.image_estimate.push(xi);
    }
    Ok(out)
}

/// Scalar digest of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary<T> {
    pub final_error: T,
    /// First time after which the state error stays within the tolerance.
    pub time_to: Option<T>,
    pub tolerance: T,
    pub min_det: Option<T>,
    pub truncated: bool,
    pub truncation_time: Option<T>,
}

pub fn estimation_error<T: Scalar>(run: &ObserverRun<T>, tolerance: T) -> Summary<T> {
    let final_error = *run.err_state.last().expect("run stores the initial node");
    let time_to = if final_error <= tolerance {
        let k = run
            .err_state
            .iter()
            .rposition(|&e| !(e <= tolerance))
            .map_or(0, |k| k + 1);
        Some(run.times[k])
    } else {
        None
    };
    Summary {
        final_error,
        time_to,
        tolerance,
        min_det: run.min_abs_det,
        truncated: run.truncation.is_some(),
        truncation_time: run.truncation.as_ref().map(|t| t.t),
    }
}

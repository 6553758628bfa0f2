use crate::energy::invariant_i;
use crate::error::{Error, Result};
use crate::numerics::{PrecisionConfig, Scalar};

use super::map::StepMap;
use super::state::State3;

/// A computed trajectory `z_0, ..., z_{steps+2}`.
///
/// If a step fails the record is truncated at the last good value and the
/// error is kept in `failure`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub map: StepMap,
    pub initial: State3,
    pub values: Vec<Scalar>,
    /// `I` evaluated on every state window, present for Todd-form maps when
    /// requested.
    pub invariant_trace: Option<Vec<Scalar>>,
    pub max_value: Scalar,
    pub min_value: Scalar,
    pub steps: usize,
    pub failure: Option<Error>,
}

impl OrbitRecord {
    /// State window `(z_i, z_{i+1}, z_{i+2})`, for `i` in `0..=steps`.
    pub fn state(&self, i: usize) -> Option<State3> {
        let w = self.values.get(i..i + 3)?;
        State3::new(w[0].clone(), w[1].clone(), w[2].clone()).ok()
    }

    pub fn last_state(&self) -> State3 {
        self.state(self.steps)
            .expect("record holds at least the initial state")
    }

    pub fn into_result(self) -> Result<Self> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }
}

/// Iterates `n` steps from `s0`. With `trace_invariant`, Todd-form maps also
/// record `I(c, state / scale)` for every window.
pub fn iterate_orbit(
    cfg: &PrecisionConfig,
    map: &StepMap,
    s0: &State3,
    n: usize,
    trace_invariant: bool,
) -> OrbitRecord {
    iterate_orbit_until(cfg, map, s0, n, trace_invariant, |_| false)
}

/// Like [`iterate_orbit`] but stops early (without a failure) once `stop`
/// returns true for a freshly computed value.
pub fn iterate_orbit_until(
    cfg: &PrecisionConfig,
    map: &StepMap,
    s0: &State3,
    n: usize,
    trace_invariant: bool,
    mut stop: impl FnMut(&Scalar) -> bool,
) -> OrbitRecord {
    let todd = if trace_invariant {
        map.todd_form(cfg)
    } else {
        None
    };
    let mut values: Vec<Scalar> = s0.coords().into_iter().cloned().collect();
    let mut trace = todd.as_ref().map(|_| Vec::with_capacity(n + 1));
    let mut failure = None;

    let invariant_at = |s: &State3| -> Result<Scalar> {
        let (c, scale) = todd.as_ref().expect("only called with a Todd form");
        invariant_i(cfg, c, &s.scaled_down(cfg, scale)?)
    };

    if s0.mode() != cfg.mode || map.mode() != cfg.mode {
        failure = Some(Error::ModeMismatch);
    } else if let Some(t) = trace.as_mut() {
        match invariant_at(s0) {
            Ok(v) => t.push(v),
            Err(e) => failure = Some(e),
        }
    }

    let mut state = s0.clone();
    let mut steps = 0;
    if failure.is_none() {
        for _ in 0..n {
            let next = match map.step(cfg, &state) {
                Ok(s) => s,
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            };
            if let Some(t) = trace.as_mut() {
                match invariant_at(&next) {
                    Ok(v) => t.push(v),
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            values.push(next.newest().clone());
            steps += 1;
            state = next;
            if stop(state.newest()) {
                break;
            }
        }
    }

    let (min_value, max_value) = extrema(&values);
    OrbitRecord {
        map: map.clone(),
        initial: s0.clone(),
        values,
        invariant_trace: trace,
        max_value,
        min_value,
        steps,
        failure,
    }
}

fn extrema(values: &[Scalar]) -> (Scalar, Scalar) {
    let mut min = &values[0];
    let mut max = &values[0];
    for v in &values[1..] {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    (min.clone(), max.clone())
}

/// Smallest `p >= 1` with `2p <= steps` such that every recorded state
/// window recurs `p` steps later, compared with `cfg.close` at tolerance
/// `tol`. A single near-recurrence is not enough.
pub fn detect_period(r: &OrbitRecord, tol: f64) -> Option<usize> {
    let v = &r.values;
    let close = |a: &Scalar, b: &Scalar| crate::numerics::scalar_close(a, b, tol).unwrap_or(false);
    (1..=r.steps / 2).find(|&p| (0..v.len() - p).all(|j| close(&v[j], &v[j + p])))
}

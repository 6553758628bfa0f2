use num_rational::BigRational;

use crate::dynamics::{step_todd, NormalizedTodd, State3};
use crate::error::Result;
use crate::numerics::{scalar_close, PrecisionConfig, Scalar};

use super::invariant::{
    equilibrium_energy, equilibrium_energy_bounds, equilibrium_todd, invariant_i,
};
use super::ViolationWitness;

/// `V(s) = I(c, s) - (p + 1)^4 / p^2`, `p` the Todd equilibrium.
pub fn lyapunov_v(cfg: &PrecisionConfig, c: &Scalar, s: &State3) -> Result<Scalar> {
    let p = equilibrium_todd(cfg, c)?;
    let base = equilibrium_energy(cfg, &p)?;
    cfg.sub(&invariant_i(cfg, c, s)?, &base)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovReport {
    pub equilibrium: f64,
    /// `V(p, p, p)`, exact zero when `p` is rational.
    pub v_at_equilibrium: f64,
    /// `V(p,p,p) = 0` within tolerance.
    pub zero_at_equilibrium: bool,
    /// `V > 0` on every sample.
    pub positive_on_samples: bool,
    /// `V(T s) = V(s)` on every sample.
    pub invariant_under_map: bool,
    pub samples_checked: usize,
    pub min_v: Option<f64>,
    /// A sample equal to the equilibrium, which the check excludes.
    pub precondition_violation: Option<State3>,
    pub witness: Option<ViolationWitness>,
}

impl LyapunovReport {
    pub fn passed(&self) -> bool {
        self.zero_at_equilibrium
            && self.positive_on_samples
            && self.invariant_under_map
            && self.precondition_violation.is_none()
    }
}

#[derive(Clone, Copy)]
enum Condition {
    Positive,
    Conserved,
}

enum SampleOutcome {
    AtEquilibrium,
    Checked {
        v: f64,
        violation: Option<(Condition, ViolationWitness)>,
    },
}

/// Checks, for Todd's equation with parameter `c`:
/// (1) `V(p,p,p) = 0`, (2) `V(s) > 0` and (3) `V(T s) = V(s)` on every sample.
///
/// In exact mode (2) is certified against rational bounds on `I(p,p,p)` when
/// `p` is irrational, and (3) compares `I(T s)` with `I(s)` exactly. `tol` is
/// the relative tolerance for (1) and, in float mode, for (3).
pub fn check_lyapunov_conditions(
    cfg: &PrecisionConfig,
    c: &Scalar,
    samples: &[State3],
    tol: f64,
) -> Result<LyapunovReport> {
    let todd = NormalizedTodd::new(c.clone())?;
    let float = PrecisionConfig::float();
    let c_f = Scalar::Float(c.to_f64());
    let p_f = equilibrium_todd(&float, &c_f)?;
    let energy_f = equilibrium_energy(&float, &p_f)?.to_f64();
    let diag_f = State3::diagonal(p_f.clone())?;

    // Exact equilibrium when p is rational, bounds on I(p,p,p) otherwise.
    let exact_p = if cfg.is_exact() {
        equilibrium_todd(cfg, c).ok()
    } else {
        None
    };
    let (v_at_equilibrium, zero_at_equilibrium) = match &exact_p {
        Some(p) => {
            let v = lyapunov_v(cfg, c, &State3::diagonal(p.clone())?)?;
            (v.to_f64(), v.is_zero())
        }
        None => {
            let v = invariant_i(&float, &c_f, &diag_f)?.to_f64() - energy_f;
            (v, v.abs() <= tol * energy_f.max(1.0))
        }
    };
    let energy_bounds: Option<(BigRational, BigRational)> = match (cfg.is_exact(), c.as_rational())
    {
        (true, Some(cr)) => Some(equilibrium_energy_bounds(cr)),
        _ => None,
    };

    let outcomes = crate::par::map_ordered(samples, |_, s| -> Result<SampleOutcome> {
        let at_eq = match &exact_p {
            Some(p) => s.coords().iter().all(|x| *x == p),
            None => s
                .to_f64()
                .iter()
                .all(|x| scalar_close(&Scalar::Float(*x), &p_f, tol).unwrap_or(false)),
        };
        if at_eq {
            return Ok(SampleOutcome::AtEquilibrium);
        }
        let i_s = invariant_i(cfg, c, s)?;
        let ts = step_todd(cfg, &todd, s)?;
        let i_ts = invariant_i(cfg, c, &ts)?;
        let v = i_s.to_f64() - energy_f;

        let positive = match &energy_bounds {
            // Certified: I(s) strictly above the upper bound of I(p,p,p).
            Some((_, hi)) => i_s.as_rational().is_some_and(|r| r > hi),
            None => v > 0.0,
        };
        if !positive {
            let rhs = match &energy_bounds {
                Some((_, hi)) => Scalar::Exact(hi.clone()),
                None => Scalar::Float(energy_f),
            };
            return Ok(SampleOutcome::Checked {
                v,
                violation: Some((
                    Condition::Positive,
                    ViolationWitness::new(s.clone(), i_s, rhs, "V(s) > 0: I(s) > I(p,p,p)"),
                )),
            });
        }
        let conserved = match (&i_s, &i_ts) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => scalar_close(&i_s, &i_ts, tol)?,
        };
        if !conserved {
            return Ok(SampleOutcome::Checked {
                v,
                violation: Some((
                    Condition::Conserved,
                    ViolationWitness::new(s.clone(), i_ts, i_s, "V(T s) = V(s)"),
                )),
            });
        }
        Ok(SampleOutcome::Checked { v, violation: None })
    });

    let mut report = LyapunovReport {
        equilibrium: p_f.to_f64(),
        v_at_equilibrium,
        zero_at_equilibrium,
        positive_on_samples: true,
        invariant_under_map: true,
        samples_checked: 0,
        min_v: None,
        precondition_violation: None,
        witness: None,
    };
    for (s, outcome) in samples.iter().zip(outcomes) {
        match outcome? {
            SampleOutcome::AtEquilibrium => {
                if report.precondition_violation.is_none() {
                    report.precondition_violation = Some(s.clone());
                }
            }
            SampleOutcome::Checked { v, violation } => {
                report.samples_checked += 1;
                report.min_v = Some(report.min_v.map_or(v, |m: f64| m.min(v)));
                if let Some((condition, w)) = violation {
                    match condition {
                        Condition::Positive => report.positive_on_samples = false,
                        Condition::Conserved => report.invariant_under_map = false,
                    }
                    if report.witness.is_none() {
                        report.witness = Some(w);
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_examples() {
        let cfg = PrecisionConfig::exact();
        let v = lyapunov_v(&cfg, &cfg.int(0), &State3::parse(&cfg, "1,1,1").unwrap()).unwrap();
        assert_eq!(v, cfg.ratio(15, 4));
        assert_eq!(
            lyapunov_v(&cfg, &cfg.int(0), &State3::parse(&cfg, "2,2,2").unwrap()).unwrap(),
            cfg.int(0)
        );

        let f = PrecisionConfig::float();
        let p = 1.0 + 2f64.sqrt();
        let v = lyapunov_v(&f, &f.int(1), &State3::from_f64(&f, [p; 3]).unwrap())
            .unwrap()
            .to_f64();
        assert!(v.abs() < 1e-12);
        let v = lyapunov_v(&f, &f.int(1), &State3::parse(&f, "1,1,1").unwrap())
            .unwrap()
            .to_f64();
        assert!((v - (32.0 - 12.0 - 8.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((v - 8.6862915).abs() < 1e-7);
    }

    #[test]
    fn conditions_on_unit_sample() {
        let cfg = PrecisionConfig::exact();
        let r = check_lyapunov_conditions(
            &cfg,
            &cfg.int(0),
            &[State3::parse(&cfg, "1,1,1").unwrap()],
            1e-12,
        )
        .unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.v_at_equilibrium, 0.0);
        assert_eq!(r.min_v, Some(3.75));
    }

    #[test]
    fn equilibrium_sample_is_a_precondition_violation() {
        let f = PrecisionConfig::float();
        let p = 1.0 + 2f64.sqrt();
        let r = check_lyapunov_conditions(
            &f,
            &f.int(1),
            &[State3::from_f64(&f, [p; 3]).unwrap()],
            1e-9,
        )
        .unwrap();
        assert!(!r.passed());
        assert!(r.precondition_violation.is_some());
        assert_eq!(r.samples_checked, 0);

        let cfg = PrecisionConfig::exact();
        let r = check_lyapunov_conditions(
            &cfg,
            &cfg.int(3),
            &[State3::parse(&cfg, "3,3,3").unwrap()],
            0.0,
        )
        .unwrap();
        assert!(r.precondition_violation.is_some());
    }

    #[test]
    fn exact_irrational_equilibrium_is_certified() {
        let cfg = PrecisionConfig::exact();
        let samples: Vec<State3> = ["1,1,1", "2,3,1/7", "5/2,12/5,2"]
            .iter()
            .map(|s| State3::parse(&cfg, s).unwrap())
            .collect();
        let r = check_lyapunov_conditions(&cfg, &cfg.int(1), &samples, 1e-12).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.v_at_equilibrium.abs() <= 1e-12);
    }
}

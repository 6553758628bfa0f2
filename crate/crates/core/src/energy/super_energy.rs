use crate::dynamics::{fixed_point, step_two_param, NormalizedTwoParam, State3};
use crate::error::{Error, Result};
use crate::numerics::{PrecisionConfig, Scalar};

use super::{EnergyCandidate, ViolationWitness};

/// A claimed `rho`-super-energy `g`: `g(T u) >= rho g(u)` for all positive `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperEnergySpec {
    pub rho: Scalar,
    pub candidate: EnergyCandidate,
    pub params: NormalizedTwoParam,
}

/// Refutes the growth inequality at the fixed point `s* = (u, u, u)` of the
/// two-parameter map: there `T s* = s*`, so `g(T s*) = g(s*) < rho g(s*)` for
/// any positive `g` and `rho > 1`.
pub fn refute_super_energy(
    cfg: &PrecisionConfig,
    spec: &SuperEnergySpec,
) -> Result<ViolationWitness> {
    if !(spec.rho > cfg.int(1)) {
        return Err(Error::InvalidSpec(format!(
            "rho = {} must exceed 1",
            spec.rho
        )));
    }
    let u = fixed_point(cfg, &spec.params)?;
    let fixed = State3::diagonal(u)?;
    let g_fixed = spec.candidate.evaluate(cfg, &fixed)?;
    if !g_fixed.is_positive() {
        return Err(Error::CandidateNotPositive(fixed.to_string()));
    }
    let image = step_two_param(cfg, &spec.params, &fixed)?;
    let lhs = spec.candidate.evaluate(cfg, &image)?;
    let rhs = cfg.mul(&spec.rho, &g_fixed)?;
    if !(lhs < rhs) {
        // Only reachable through float error far beyond rho - 1.
        return Err(Error::NotApplicable(format!(
            "no violation at {fixed}: g(T s) = {lhs}, rho g(s) = {rhs}"
        )));
    }
    Ok(ViolationWitness::new(
        fixed,
        lhs,
        rhs,
        "g(T s) >= rho * g(s)",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_fixed_point_witness() {
        let cfg = PrecisionConfig::exact();
        let spec = SuperEnergySpec {
            rho: cfg.ratio(3, 2),
            candidate: EnergyCandidate::SumCoordinates,
            params: NormalizedTwoParam::new(cfg.int(0), cfg.int(2)).unwrap(),
        };
        let w = refute_super_energy(&cfg, &spec).unwrap();
        assert_eq!(w.state.to_string(), "(5/2, 5/2, 5/2)");
        assert_eq!(
            (w.lhs.to_string(), w.rhs.to_string()),
            ("15/2".into(), "45/4".into())
        );
    }

    #[test]
    fn float_fixed_point_witness() {
        let f = PrecisionConfig::float();
        let spec = SuperEnergySpec {
            rho: Scalar::Float(1.1),
            candidate: EnergyCandidate::MaxCoordinate,
            params: NormalizedTwoParam::new(f.int(1), f.int(1)).unwrap(),
        };
        let w = refute_super_energy(&f, &spec).unwrap();
        assert!((w.lhs.to_f64() - 2.41421).abs() < 1e-5);
        assert!((w.rhs.to_f64() - 2.65563).abs() < 1e-5);
    }

    #[test]
    fn invariant_candidate_and_bad_rho() {
        let f = PrecisionConfig::float();
        let params = NormalizedTwoParam::new(f.ratio(1, 3), f.int(3)).unwrap();
        let spec = SuperEnergySpec {
            rho: f.int(2),
            candidate: EnergyCandidate::ToddInvariant { c: f.ratio(1, 3) },
            params: params.clone(),
        };
        let w = refute_super_energy(&f, &spec).unwrap();
        assert!((w.rhs.to_f64() - 2.0 * w.lhs.to_f64()).abs() <= 1e-12 * w.rhs.to_f64());
        let bad = SuperEnergySpec {
            rho: f.int(1),
            ..spec
        };
        assert!(matches!(
            refute_super_energy(&f, &bad),
            Err(Error::InvalidSpec(_))
        ));
    }
}

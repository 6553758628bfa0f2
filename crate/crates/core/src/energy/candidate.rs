use std::fmt;

use crate::dynamics::{State3, StepMap};
use crate::error::{Error, Result};
use crate::numerics::{PrecisionConfig, Scalar};

use super::invariant::invariant_i;
use super::ViolationWitness;

/// Deepest composition `build_sub_energy_candidate` accepts.
pub const MAX_COMPOSITION_DEPTH: usize = 64;

/// Candidate energy functions on the positive orthant.
#[derive(Debug, Clone, PartialEq)]
pub enum EnergyCandidate {
    /// Todd's invariant with parameter `c`.
    ToddInvariant {
        c: Scalar,
    },
    SumCoordinates,
    MaxCoordinate,
    /// `max_{j=0..depth} base(T^{j*stride} s)` under `map`.
    MaxComposition {
        base: Box<EnergyCandidate>,
        stride: usize,
        depth: usize,
        map: StepMap,
    },
}

impl EnergyCandidate {
    pub fn evaluate(&self, cfg: &PrecisionConfig, s: &State3) -> Result<Scalar> {
        match self {
            EnergyCandidate::ToddInvariant { c } => invariant_i(cfg, c, s),
            EnergyCandidate::SumCoordinates => {
                let [x0, x1, x2] = s.coords();
                cfg.add(&cfg.add(x0, x1)?, x2)
            }
            EnergyCandidate::MaxCoordinate => {
                let [x0, x1, x2] = s.coords();
                Ok(max_of(max_of(x0, x1), x2).clone())
            }
            EnergyCandidate::MaxComposition {
                base,
                stride,
                depth,
                map,
            } => {
                let mut state = s.clone();
                let mut best = base.evaluate(cfg, &state)?;
                for _ in 0..*depth {
                    state = map.iterate(cfg, &state, *stride)?;
                    let v = base.evaluate(cfg, &state)?;
                    if v > best {
                        best = v;
                    }
                }
                Ok(best)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnergyCandidate::ToddInvariant { .. } => "todd",
            EnergyCandidate::SumCoordinates => "sum",
            EnergyCandidate::MaxCoordinate => "max",
            EnergyCandidate::MaxComposition { .. } => "max-composition",
        }
    }
}

impl fmt::Display for EnergyCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyCandidate::ToddInvariant { c } => write!(f, "todd(c={c})"),
            EnergyCandidate::SumCoordinates => f.write_str("sum"),
            EnergyCandidate::MaxCoordinate => f.write_str("max"),
            EnergyCandidate::MaxComposition {
                base,
                stride,
                depth,
                map,
            } => {
                write!(
                    f,
                    "max-composition({base}, k={stride}, depth={depth}, {map})"
                )
            }
        }
    }
}

fn max_of<'a>(a: &'a Scalar, b: &'a Scalar) -> &'a Scalar {
    if b > a {
        b
    } else {
        a
    }
}

/// Truncated composition `f0 v (f0 o T^k) v ... v (f0 o T^{dk})`. Depth 0 is
/// `f0` itself.
pub fn build_sub_energy_candidate(
    f0: EnergyCandidate,
    stride: usize,
    depth: usize,
    map: &StepMap,
) -> Result<EnergyCandidate> {
    if stride == 0 {
        return Err(Error::InvalidSpec(
            "composition stride must be at least 1".into(),
        ));
    }
    if depth > MAX_COMPOSITION_DEPTH {
        return Err(Error::InvalidSpec(format!(
            "composition depth {depth} exceeds the cap of {MAX_COMPOSITION_DEPTH}"
        )));
    }
    if depth == 0 {
        return Ok(f0);
    }
    Ok(EnergyCandidate::MaxComposition {
        base: Box::new(f0),
        stride,
        depth,
        map: map.clone(),
    })
}

/// Which non-increase inequality to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubEnergyVariant {
    /// `f(T s) <= f(s)`
    OneStep,
    /// `f(T^k s) <= f(s)`
    KStep(usize),
    /// `f(T^2 s) <= max(f(s), f(T s))`
    MaxOfTwo,
}

impl SubEnergyVariant {
    pub fn label(&self) -> String {
        match self {
            SubEnergyVariant::OneStep => "f(T s) <= f(s)".into(),
            SubEnergyVariant::KStep(k) => format!("f(T^{k} s) <= f(s)"),
            SubEnergyVariant::MaxOfTwo => "f(T^2 s) <= max(f(s), f(T s))".into(),
        }
    }
}

impl fmt::Display for SubEnergyVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubEnergyVariant::OneStep => f.write_str("one-step"),
            SubEnergyVariant::KStep(k) => write!(f, "k-step({k})"),
            SubEnergyVariant::MaxOfTwo => f.write_str("max-of-two"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubEnergyReport {
    pub variant: SubEnergyVariant,
    pub samples_checked: usize,
    /// Every checked sample satisfied the inequality with equality.
    pub all_equal: bool,
    /// First violation in sample order.
    pub witness: Option<ViolationWitness>,
}

impl SubEnergyReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Tests the chosen non-increase inequality of `f` along `map` on every
/// sample. Float mode allows `cfg.relative_tolerance` of slack.
pub fn check_sub_energy(
    cfg: &PrecisionConfig,
    f: &EnergyCandidate,
    map: &StepMap,
    samples: &[State3],
    variant: SubEnergyVariant,
) -> Result<SubEnergyReport> {
    if let SubEnergyVariant::KStep(0) = variant {
        return Err(Error::InvalidSpec("k-step variant needs k >= 1".into()));
    }
    let outcomes = crate::par::map_ordered(samples, |_, s| -> Result<(Scalar, Scalar)> {
        match variant {
            SubEnergyVariant::OneStep => {
                Ok((f.evaluate(cfg, &map.step(cfg, s)?)?, f.evaluate(cfg, s)?))
            }
            SubEnergyVariant::KStep(k) => Ok((
                f.evaluate(cfg, &map.iterate(cfg, s, k)?)?,
                f.evaluate(cfg, s)?,
            )),
            SubEnergyVariant::MaxOfTwo => {
                let t1 = map.step(cfg, s)?;
                let t2 = map.step(cfg, &t1)?;
                let f0 = f.evaluate(cfg, s)?;
                let f1 = f.evaluate(cfg, &t1)?;
                Ok((f.evaluate(cfg, &t2)?, max_of(&f0, &f1).clone()))
            }
        }
    });

    let mut report = SubEnergyReport {
        variant,
        samples_checked: 0,
        all_equal: true,
        witness: None,
    };
    for (s, outcome) in samples.iter().zip(outcomes) {
        let (lhs, rhs) = outcome?;
        report.samples_checked += 1;
        let equal = cfg.close(&lhs, &rhs)?;
        if !equal {
            report.all_equal = false;
            if lhs > rhs {
                report.witness = Some(ViolationWitness::new(s.clone(), lhs, rhs, &variant.label()));
                break;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::NormalizedTodd;

    fn todd_map(cfg: &PrecisionConfig, c: i64) -> StepMap {
        StepMap::Todd(NormalizedTodd::new(cfg.int(c)).unwrap())
    }

    fn st(cfg: &PrecisionConfig, s: &str) -> State3 {
        State3::parse(cfg, s).unwrap()
    }

    #[test]
    fn composition_examples() {
        let cfg = PrecisionConfig::exact();
        let map = todd_map(&cfg, 1);
        let f = build_sub_energy_candidate(EnergyCandidate::MaxCoordinate, 1, 3, &map).unwrap();
        assert_eq!(f.evaluate(&cfg, &st(&cfg, "1,1,1")).unwrap(), cfg.int(9));
        let f = build_sub_energy_candidate(EnergyCandidate::MaxCoordinate, 1, 0, &map).unwrap();
        assert_eq!(f, EnergyCandidate::MaxCoordinate);
        let todd = EnergyCandidate::ToddInvariant { c: cfg.int(1) };
        for (k, d) in [(1, 1), (2, 5), (3, 4)] {
            let f = build_sub_energy_candidate(todd.clone(), k, d, &map).unwrap();
            for s in ["1,1,1", "2,1/3,7", "9/4,1,5"] {
                assert_eq!(
                    f.evaluate(&cfg, &st(&cfg, s)).unwrap(),
                    todd.evaluate(&cfg, &st(&cfg, s)).unwrap()
                );
            }
        }
        assert!(build_sub_energy_candidate(EnergyCandidate::MaxCoordinate, 0, 1, &map).is_err());
        assert!(build_sub_energy_candidate(EnergyCandidate::MaxCoordinate, 1, 65, &map).is_err());
    }

    #[test]
    fn sum_fails_one_step() {
        let cfg = PrecisionConfig::exact();
        let map = todd_map(&cfg, 1);
        let r = check_sub_energy(
            &cfg,
            &EnergyCandidate::SumCoordinates,
            &map,
            &[st(&cfg, "1,1,1")],
            SubEnergyVariant::OneStep,
        )
        .unwrap();
        let w = r.witness.unwrap();
        assert_eq!((w.lhs, w.rhs), (cfg.int(5), cfg.int(3)));
        assert_eq!(w.state, st(&cfg, "1,1,1"));
    }

    #[test]
    fn invariant_passes_with_equality() {
        let cfg = PrecisionConfig::exact();
        let map = todd_map(&cfg, 0);
        let samples = [st(&cfg, "1,1,1"), st(&cfg, "1/2,3,7/5")];
        let f = EnergyCandidate::ToddInvariant { c: cfg.int(0) };
        for v in [
            SubEnergyVariant::OneStep,
            SubEnergyVariant::KStep(3),
            SubEnergyVariant::MaxOfTwo,
        ] {
            let r = check_sub_energy(&cfg, &f, &map, &samples, v).unwrap();
            assert!(r.passed() && r.all_equal, "{v}");
            assert_eq!(r.samples_checked, 2);
        }
        assert!(check_sub_energy(&cfg, &f, &map, &samples, SubEnergyVariant::KStep(0)).is_err());
    }

    #[test]
    fn max_of_two_is_weaker_than_one_step() {
        // f = max coordinate on the period-8 orbit of (1,1,1): values 1,1,1,3,5,9,5,3.
        let cfg = PrecisionConfig::exact();
        let map = todd_map(&cfg, 1);
        let s = st(&cfg, "9,5,3");
        let one = check_sub_energy(
            &cfg,
            &EnergyCandidate::MaxCoordinate,
            &map,
            &[s.clone()],
            SubEnergyVariant::OneStep,
        )
        .unwrap();
        assert!(one.passed() && !one.all_equal);
        let s = st(&cfg, "1,1,3");
        let two = check_sub_energy(
            &cfg,
            &EnergyCandidate::MaxCoordinate,
            &map,
            &[s],
            SubEnergyVariant::MaxOfTwo,
        )
        .unwrap();
        assert!(!two.passed());
    }
}

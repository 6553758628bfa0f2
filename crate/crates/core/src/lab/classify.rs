use std::fmt;

use crate::dynamics::{detect_period, iterate_orbit_until, OrbitRecord, State3, StepMap};
use crate::error::{Error, Result};
use crate::numerics::{PrecisionConfig, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    pub max_steps: usize,
    pub escape_threshold: f64,
    pub floor_threshold: f64,
    pub period_search: bool,
    pub tolerance: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            max_steps: 10_000,
            escape_threshold: 1e9,
            floor_threshold: 1e-9,
            period_search: true,
            tolerance: PrecisionConfig::DEFAULT_TOLERANCE,
        }
    }
}

/// A bounded verdict needs the orbit maximum this far below the escape
/// threshold.
pub const BOUNDED_MARGIN: f64 = 1e3;

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps < 16 {
            return Err(Error::InvalidSpec(format!(
                "max_steps = {} is below 16",
                self.max_steps
            )));
        }
        if !(self.escape_threshold > 1.0) || !self.escape_threshold.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "escape threshold {} must exceed 1",
                self.escape_threshold
            )));
        }
        if !(self.floor_threshold > 0.0 && self.floor_threshold < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "floor threshold {} must lie in (0, 1)",
                self.floor_threshold
            )));
        }
        if !(0.0..1.0).contains(&self.tolerance) {
            return Err(Error::InvalidSpec(format!(
                "tolerance {} must lie in [0, 1)",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Equilibrium,
    Periodic(usize),
    BoundedNoPeriod,
    Growing,
    Inconclusive,
}

impl Verdict {
    pub fn period(&self) -> Option<usize> {
        match self {
            Verdict::Equilibrium => Some(1),
            Verdict::Periodic(p) => Some(*p),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equilibrium => "equilibrium",
            Verdict::Periodic(_) => "periodic",
            Verdict::BoundedNoPeriod => "bounded-no-period",
            Verdict::Growing => "growing",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Periodic(p) => write!(f, "periodic({p})"),
            v => f.write_str(v.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub max_value: Scalar,
    pub min_value: Scalar,
    pub steps_run: usize,
    /// Step at which a value first reached the escape threshold.
    pub escape_step: Option<usize>,
    /// Slope of `ln(max so far)` against `n` over the second half of the run.
    pub growth_rate: Option<f64>,
    pub evidence: String,
}

/// Iterates up to `max_steps` and classifies the orbit.
///
/// * `Growing` as soon as a value reaches the escape threshold.
/// * `Periodic(p)` / `Equilibrium` when the whole record recurs with period `p`.
/// * `BoundedNoPeriod` only for maps conjugate to Todd's equation, with the
///   maximum at most `escape / 1e3` and the minimum above the floor.
/// * `Inconclusive` otherwise, including arithmetic failures such as the bit
///   limit. Non-escape for `beta != lambda` is never reported as bounded.
pub fn classify_orbit(
    cfg: &PrecisionConfig,
    map: &StepMap,
    s0: &State3,
    ccfg: &ClassifyConfig,
) -> Result<ClassificationReport> {
    ccfg.validate()?;
    let escape = ccfg.escape_threshold;
    let record = iterate_orbit_until(cfg, map, s0, ccfg.max_steps, false, |v| {
        v.to_f64() >= escape
    });
    Ok(classify_record(cfg, map, &record, ccfg))
}

fn classify_record(
    cfg: &PrecisionConfig,
    map: &StepMap,
    r: &OrbitRecord,
    ccfg: &ClassifyConfig,
) -> ClassificationReport {
    let escape = ccfg.escape_threshold;
    let growth_rate = growth_rate(&r.values);
    let report = |verdict, escape_step, evidence: String| ClassificationReport {
        verdict,
        max_value: r.max_value.clone(),
        min_value: r.min_value.clone(),
        steps_run: r.steps,
        escape_step,
        growth_rate,
        evidence,
    };

    if let Some(i) = r.values.iter().position(|v| v.to_f64() >= escape) {
        // Value index i is produced by step i - 2 (the first three are initial).
        let step = i.saturating_sub(2);
        return report(
            Verdict::Growing,
            Some(step),
            format!(
                "value {} reached escape threshold {escape:e} at step {step}",
                r.values[i]
            ),
        );
    }
    if let Some(e) = &r.failure {
        return report(
            Verdict::Inconclusive,
            None,
            format!("stopped after {} steps: {e}", r.steps),
        );
    }
    if ccfg.period_search {
        if let Some(p) = detect_period(r, ccfg.tolerance) {
            let verdict = if p == 1 {
                Verdict::Equilibrium
            } else {
                Verdict::Periodic(p)
            };
            return report(
                verdict,
                None,
                format!("state recurs every {p} steps across {} steps", r.steps),
            );
        }
    }
    let (max, min) = (r.max_value.to_f64(), r.min_value.to_f64());
    if !map.is_symmetric(cfg) {
        return report(
            Verdict::Inconclusive,
            None,
            format!("no escape in {} steps (max {max:e}); beta != lambda, so not evidence of boundedness", r.steps),
        );
    }
    if min < ccfg.floor_threshold {
        return report(
            Verdict::Inconclusive,
            None,
            format!("min {min:e} fell below floor {:e}", ccfg.floor_threshold),
        );
    }
    if max <= escape / BOUNDED_MARGIN {
        return report(
            Verdict::BoundedNoPeriod,
            None,
            format!(
                "max {max:e} and min {min:e} over {} steps, no period found",
                r.steps
            ),
        );
    }
    report(
        Verdict::Inconclusive,
        None,
        format!("max {max:e} is within a factor {BOUNDED_MARGIN:e} of the escape threshold"),
    )
}

/// Least-squares slope of `ln(running max)` against step index over the
/// second half of `values`. `None` with fewer than four points.
pub fn growth_rate(values: &[Scalar]) -> Option<f64> {
    let mut running = f64::MIN;
    let logs: Vec<f64> = values
        .iter()
        .map(|v| {
            running = running.max(v.to_f64());
            running.ln()
        })
        .collect();
    let start = logs.len() / 2;
    let tail = &logs[start..];
    if tail.len() < 4 {
        return None;
    }
    let n = tail.len() as f64;
    let mean_x = (0..tail.len()).map(|i| i as f64).sum::<f64>() / n;
    let mean_y = tail.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in tail.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    Some(sxy / sxx)
}

/// Extrema over a record with the index of their first occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceStats {
    pub min: Scalar,
    pub max: Scalar,
    pub min_step: usize,
    pub max_step: usize,
}

pub fn persistence_stats(r: &OrbitRecord) -> Result<PersistenceStats> {
    let first = r
        .values
        .first()
        .ok_or_else(|| Error::NotApplicable("empty record".into()))?;
    let mut stats = PersistenceStats {
        min: first.clone(),
        max: first.clone(),
        min_step: 0,
        max_step: 0,
    };
    for (i, v) in r.values.iter().enumerate().skip(1) {
        if v < &stats.min {
            stats.min = v.clone();
            stats.min_step = i;
        }
        if v > &stats.max {
            stats.max = v.clone();
            stats.max_step = i;
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{iterate_orbit, NormalizedTodd, NormalizedTwoParam, Params};

    fn todd(cfg: &PrecisionConfig, c: &str) -> StepMap {
        StepMap::Todd(NormalizedTodd::new(cfg.parse(c).unwrap()).unwrap())
    }

    #[test]
    fn todd_c1_is_period_8() {
        let cfg = PrecisionConfig::exact();
        let r = classify_orbit(
            &cfg,
            &todd(&cfg, "1"),
            &State3::parse(&cfg, "1,1,1").unwrap(),
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Periodic(8));
        assert_eq!(
            (r.max_value.to_string(), r.min_value.to_string()),
            ("9".into(), "1".into())
        );
        assert_eq!(r.steps_run, 10_000);
    }

    #[test]
    fn fixed_point_is_equilibrium() {
        let cfg = PrecisionConfig::exact();
        let map = StepMap::TwoParam(NormalizedTwoParam::new(cfg.int(0), cfg.int(2)).unwrap());
        let r = classify_orbit(
            &cfg,
            &map,
            &State3::parse(&cfg, "5/2,5/2,5/2").unwrap(),
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Equilibrium);
        assert_eq!(r.verdict.period(), Some(1));
    }

    #[test]
    fn float_todd_non_period_is_bounded() {
        let f = PrecisionConfig::float();
        let r = classify_orbit(
            &f,
            &todd(&f, "2"),
            &State3::parse(&f, "1,1,1").unwrap(),
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::BoundedNoPeriod, "{}", r.evidence);
    }

    #[test]
    fn asymmetric_non_escape_is_inconclusive() {
        let f = PrecisionConfig::float();
        // beta > lambda; orbits stay moderate over a short run.
        let map = StepMap::General(Params::parse(&f, "1", "2", "1").unwrap());
        let cc = ClassifyConfig {
            max_steps: 50,
            ..Default::default()
        };
        let r = classify_orbit(&f, &map, &State3::parse(&f, "1,1.5,2").unwrap(), &cc).unwrap();
        assert!(
            matches!(r.verdict, Verdict::Inconclusive | Verdict::Growing),
            "{:?}",
            r.verdict
        );
        assert_ne!(r.verdict, Verdict::BoundedNoPeriod);
    }

    #[test]
    fn escape_is_growing_with_witness() {
        let f = PrecisionConfig::float();
        let cc = ClassifyConfig {
            escape_threshold: 100.0,
            max_steps: 100,
            ..Default::default()
        };
        // Todd c=1 from (1,1,1) reaches 9; a large start reaches the threshold fast.
        let r = classify_orbit(
            &f,
            &todd(&f, "1"),
            &State3::parse(&f, "0.01,1,1").unwrap(),
            &cc,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Growing);
        let step = r.escape_step.unwrap();
        let replay = iterate_orbit(
            &f,
            &todd(&f, "1"),
            &State3::parse(&f, "0.01,1,1").unwrap(),
            step,
            false,
        );
        assert!(replay.values.last().unwrap().to_f64() >= 100.0);
        assert!(r.max_value.to_f64() >= 100.0);
    }

    #[test]
    fn bit_limit_is_inconclusive() {
        let cfg = PrecisionConfig::new(crate::numerics::Mode::Exact, 512, 1e-9).unwrap();
        let r = classify_orbit(
            &cfg,
            &todd(&cfg, "2"),
            &State3::parse(&cfg, "1,1,1").unwrap(),
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.evidence.contains("bits"), "{}", r.evidence);
    }

    #[test]
    fn config_validation() {
        let bad = [
            ClassifyConfig {
                max_steps: 15,
                ..Default::default()
            },
            ClassifyConfig {
                escape_threshold: 1.0,
                ..Default::default()
            },
            ClassifyConfig {
                floor_threshold: 1.0,
                ..Default::default()
            },
            ClassifyConfig {
                floor_threshold: 0.0,
                ..Default::default()
            },
        ];
        for cc in bad {
            assert!(cc.validate().is_err(), "{cc:?}");
        }
    }

    #[test]
    fn persistence_examples() {
        let cfg = PrecisionConfig::exact();
        let r = iterate_orbit(
            &cfg,
            &todd(&cfg, "1"),
            &State3::parse(&cfg, "1,1,1").unwrap(),
            20,
            false,
        );
        let s = persistence_stats(&r).unwrap();
        assert_eq!((s.min, s.max), (cfg.int(1), cfg.int(9)));
        assert_eq!((s.min_step, s.max_step), (0, 5));

        let map = StepMap::TwoParam(NormalizedTwoParam::new(cfg.int(0), cfg.int(2)).unwrap());
        let r = iterate_orbit(
            &cfg,
            &map,
            &State3::parse(&cfg, "5/2,5/2,5/2").unwrap(),
            10,
            false,
        );
        let s = persistence_stats(&r).unwrap();
        assert_eq!(s.min, s.max);

        let r = iterate_orbit(
            &cfg,
            &todd(&cfg, "0"),
            &State3::parse(&cfg, "1,1,1").unwrap(),
            50,
            false,
        );
        let s = persistence_stats(&r).unwrap();
        assert!(s.min.is_positive() && s.max.to_f64().is_finite());
    }

    #[test]
    fn growth_rate_of_geometric_sequence() {
        let f = PrecisionConfig::float();
        let values: Vec<Scalar> = (0..40).map(|n| Scalar::Float(2f64.powi(n))).collect();
        let g = growth_rate(&values).unwrap();
        assert!((g - 2f64.ln()).abs() < 1e-12);
        let flat: Vec<Scalar> = (0..40).map(|_| f.int(3)).collect();
        assert_eq!(growth_rate(&flat), Some(0.0));
        assert_eq!(growth_rate(&flat[..5]), None);
    }
}

//! Random search for escaping orbits when `beta != lambda`.

use crate::dynamics::{Params, State3, StepMap};
use crate::error::{Error, Result};
use crate::numerics::PrecisionConfig;

use super::classify::{classify_orbit, ClassificationReport, ClassifyConfig, Verdict};
use super::rng::{random_states, stream_seed, SampleBox};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub params: Params,
    pub trials: usize,
    pub seed: u64,
    /// Trial with the largest observed value (earliest on ties).
    pub best_trial: usize,
    /// PRNG stream seed that produced `witness`.
    pub best_seed: u64,
    pub witness: State3,
    pub best: ClassificationReport,
    /// Trials that reached the escape threshold.
    pub escapes: usize,
    pub inconclusive: usize,
}

impl SearchReport {
    pub fn found_growth(&self) -> bool {
        self.escapes > 0
    }
}

/// Classifies `trials` seeded random initial states for the general map with
/// `beta != lambda` and keeps the one reaching the largest value. A `Growing`
/// best carries its escape step, so the witness can be re-run.
pub fn search_unbounded(
    cfg: &PrecisionConfig,
    params: &Params,
    trials: usize,
    seed: u64,
    ccfg: &ClassifyConfig,
    sample_box: &SampleBox,
) -> Result<SearchReport> {
    if params.is_symmetric(cfg) {
        return Err(Error::NotApplicable(format!(
            "beta = lambda = {}: the bounded regime, covered by classify and sweep",
            params.beta()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidSpec("trials must be at least 1".into()));
    }
    ccfg.validate()?;
    let map = StepMap::General(params.clone());
    let initials = random_states(cfg, seed, trials, sample_box)?;
    let reports = crate::par::map_ordered(&initials, |_, s| classify_orbit(cfg, &map, s, ccfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.max_value.to_f64() > reports[best].max_value.to_f64() {
            best = i;
        }
    }
    let escapes = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Growing)
        .count();
    let inconclusive = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Inconclusive)
        .count();
    Ok(SearchReport {
        params: params.clone(),
        trials,
        seed,
        best_trial: best,
        best_seed: stream_seed(seed, best),
        witness: initials[best].clone(),
        best: reports[best].clone(),
        escapes,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::iterate_orbit;

    fn params(cfg: &PrecisionConfig, a: &str, b: &str, l: &str) -> Params {
        Params::parse(cfg, a, b, l).unwrap()
    }

    #[test]
    fn symmetric_params_are_rejected() {
        let cfg = PrecisionConfig::float();
        let r = search_unbounded(
            &cfg,
            &params(&cfg, "0", "1", "1"),
            10,
            1,
            &Default::default(),
            &SampleBox::default(),
        );
        assert!(matches!(r, Err(Error::NotApplicable(_))));
    }

    #[test]
    fn search_is_deterministic_and_never_bounded() {
        let cfg = PrecisionConfig::float();
        let p = params(&cfg, "0.5", "0.25", "1");
        let ccfg = ClassifyConfig {
            max_steps: 2000,
            ..Default::default()
        };
        let a = search_unbounded(&cfg, &p, 50, 9, &ccfg, &SampleBox::default()).unwrap();
        let b = search_unbounded(&cfg, &p, 50, 9, &ccfg, &SampleBox::default()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.best.verdict, Verdict::BoundedNoPeriod);
        if a.best.verdict == Verdict::Growing {
            let step = a.best.escape_step.unwrap();
            let r = iterate_orbit(&cfg, &StepMap::General(p), &a.witness, step + 1, false);
            assert!(r.values[step + 2].to_f64() >= ccfg.escape_threshold);
        }
    }
}

//! Parameter sweeps: every grid cell crossed with every initial state.

use serde::Deserialize;

use crate::dynamics::{NormalizedTodd, NormalizedTwoParam, Params, State3, StepMap};
use crate::error::{Error, Result};
use crate::numerics::{Mode, PrecisionConfig, Scalar};

use super::classify::{classify_orbit, ClassificationReport, ClassifyConfig};
use super::rng::{random_states, stream_seed, Distribution, SampleBox};

/// Parameter grid. Cells are enumerated in row-major order over the lists as
/// written, last list fastest.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamGrid {
    General {
        alpha: Vec<Scalar>,
        beta: Vec<Scalar>,
        lambda: Vec<Scalar>,
    },
    Todd {
        c: Vec<Scalar>,
    },
    TwoParam {
        c: Vec<Scalar>,
        a: Vec<Scalar>,
    },
}

impl ParamGrid {
    pub fn cells(&self) -> Result<Vec<StepMap>> {
        let mut out = Vec::new();
        match self {
            ParamGrid::General {
                alpha,
                beta,
                lambda,
            } => {
                for al in alpha {
                    for be in beta {
                        for la in lambda {
                            out.push(StepMap::General(Params::new(
                                al.clone(),
                                be.clone(),
                                la.clone(),
                            )?));
                        }
                    }
                }
            }
            ParamGrid::Todd { c } => {
                for c in c {
                    out.push(StepMap::Todd(NormalizedTodd::new(c.clone())?));
                }
            }
            ParamGrid::TwoParam { c, a } => {
                for c in c {
                    for a in a {
                        out.push(StepMap::TwoParam(NormalizedTwoParam::new(
                            c.clone(),
                            a.clone(),
                        )?));
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidSpec("parameter grid is empty".into()));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSource {
    Explicit(Vec<State3>),
    /// `count` states, state `i` drawn from PRNG stream `i` of the sweep seed.
    Random {
        count: usize,
        sample_box: SampleBox,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub grid: ParamGrid,
    pub initial: InitialSource,
    pub classify: ClassifyConfig,
    pub seed: u64,
    pub precision: PrecisionConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub cell: usize,
    pub initial_index: usize,
    pub map: StepMap,
    pub initial: State3,
    /// Stream seed of a random initial state; the sweep seed for explicit ones.
    pub seed: u64,
    pub outcome: Result<ClassificationReport>,
}

/// Classifies every (cell, initial state) pair. Rows come back ordered by
/// cell then initial index whatever the thread schedule; a failing row
/// records its error without stopping the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let cfg = &spec.precision;
    spec.classify.validate()?;
    let cells = spec.grid.cells()?;
    let (initials, seeds): (Vec<State3>, Vec<u64>) = match &spec.initial {
        InitialSource::Explicit(states) => (states.clone(), vec![spec.seed; states.len()]),
        InitialSource::Random { count, sample_box } => (
            random_states(cfg, spec.seed, *count, sample_box)?,
            (0..*count).map(|i| stream_seed(spec.seed, i)).collect(),
        ),
    };
    if initials.is_empty() {
        return Err(Error::InvalidSpec("no initial states".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..initials.len()).map(move |i| (c, i)))
        .collect();
    let rows = crate::par::map_ordered(&jobs, |_, &(c, i)| SweepRow {
        cell: c,
        initial_index: i,
        map: cells[c].clone(),
        initial: initials[i].clone(),
        seed: seeds[i],
        outcome: classify_orbit(cfg, &cells[c], &initials[i], &spec.classify),
    });
    Ok(rows)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn to_scalar(&self, cfg: &PrecisionConfig) -> Result<Scalar> {
        match self {
            Number::Int(n) => Ok(cfg.int(*n)),
            // Shortest round-trip decimal, so 0.5 reads as exactly 1/2.
            Number::Float(x) => cfg.parse(&x.to_string()),
            Number::Text(s) => cfg.parse(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    seed: Option<u64>,
    precision: Option<Mode>,
    bit_limit: Option<u64>,
    tolerance: Option<f64>,
    grid: RawGrid,
    initial: RawInitial,
    #[serde(default)]
    classify: RawClassify,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    alpha: Option<Vec<Number>>,
    beta: Option<Vec<Number>>,
    lambda: Option<Vec<Number>>,
    c: Option<Vec<Number>>,
    a: Option<Vec<Number>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    states: Option<Vec<String>>,
    random: Option<usize>,
    low: Option<f64>,
    high: Option<f64>,
    distribution: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawClassify {
    max_steps: Option<usize>,
    escape: Option<f64>,
    floor: Option<f64>,
    period_search: Option<bool>,
    tolerance: Option<f64>,
}

impl SweepSpec {
    /// Reads a TOML sweep spec:
    ///
    /// ```toml
    /// seed = 7
    /// precision = "exact"          # or "f64"; optional
    /// [grid]
    /// c = ["1/2", 1, 2]            # or alpha/beta/lambda, or c and a
    /// [initial]
    /// random = 10                  # or states = ["1,1,1", "2,1,1"]
    /// low = 0.01
    /// high = 100
    /// [classify]
    /// max_steps = 200
    /// ```
    ///
    /// `mode` overrides the file's precision; otherwise the file's value or
    /// `default_mode` applies.
    pub fn from_toml_str(text: &str, mode: Option<Mode>, default_mode: Mode) -> Result<Self> {
        let raw: RawSpec =
            toml::from_str(text).map_err(|e| Error::InvalidSpec(e.message().to_string()))?;
        let mode = mode.or(raw.precision).unwrap_or(default_mode);
        let precision = PrecisionConfig::new(
            mode,
            raw.bit_limit.unwrap_or(PrecisionConfig::DEFAULT_BIT_LIMIT),
            raw.tolerance.unwrap_or(PrecisionConfig::DEFAULT_TOLERANCE),
        )?;
        let cfg = &precision;
        let list = |v: &Option<Vec<Number>>| -> Result<Option<Vec<Scalar>>> {
            v.as_ref()
                .map(|v| v.iter().map(|n| n.to_scalar(cfg)).collect())
                .transpose()
        };
        let g = &raw.grid;
        let grid = match (
            list(&g.alpha)?,
            list(&g.beta)?,
            list(&g.lambda)?,
            list(&g.c)?,
            list(&g.a)?,
        ) {
            (Some(alpha), Some(beta), Some(lambda), None, None) => ParamGrid::General {
                alpha,
                beta,
                lambda,
            },
            (None, None, None, Some(c), None) => ParamGrid::Todd { c },
            (None, None, None, Some(c), Some(a)) => ParamGrid::TwoParam { c, a },
            _ => {
                return Err(Error::InvalidSpec(
                    "grid needs alpha, beta and lambda; or c; or c and a".into(),
                ))
            }
        };

        let ini = &raw.initial;
        let initial = match (&ini.states, ini.random) {
            (Some(states), None) => InitialSource::Explicit(
                states
                    .iter()
                    .map(|s| State3::parse(cfg, s))
                    .collect::<Result<_>>()?,
            ),
            (None, Some(count)) => {
                let distribution = match ini.distribution.as_deref() {
                    None | Some("log-uniform") => Distribution::LogUniform,
                    Some("uniform") => Distribution::Uniform,
                    Some(other) => {
                        return Err(Error::InvalidSpec(format!(
                            "unknown distribution '{other}' (expected log-uniform or uniform)"
                        )))
                    }
                };
                let d = SampleBox::default();
                let sample_box = SampleBox {
                    low: ini.low.unwrap_or(d.low),
                    high: ini.high.unwrap_or(d.high),
                    distribution,
                };
                sample_box.validate()?;
                InitialSource::Random { count, sample_box }
            }
            _ => {
                return Err(Error::InvalidSpec(
                    "initial needs exactly one of 'states' or 'random'".into(),
                ))
            }
        };

        let d = ClassifyConfig::default();
        let c = &raw.classify;
        let classify = ClassifyConfig {
            max_steps: c.max_steps.unwrap_or(d.max_steps),
            escape_threshold: c.escape.unwrap_or(d.escape_threshold),
            floor_threshold: c.floor.unwrap_or(d.floor_threshold),
            period_search: c.period_search.unwrap_or(d.period_search),
            tolerance: c.tolerance.unwrap_or(d.tolerance),
        };
        classify.validate()?;
        Ok(SweepSpec {
            grid,
            initial,
            classify,
            seed: raw.seed.unwrap_or(0),
            precision,
        })
    }
}

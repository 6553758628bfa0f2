use crate::dynamics::{
    fixed_point, iterate_orbit, NormalizedTodd, NormalizedTwoParam, Params, State3, StepMap,
};
use crate::energy::{
    build_sub_energy_candidate, check_lyapunov_conditions, check_sub_energy, invariant_i,
    lyapunov_v, refute_super_energy, EnergyCandidate, SubEnergyVariant, SuperEnergySpec,
    ViolationWitness,
};
use crate::lab::{
    classify_orbit, default_scan_tolerance, random_states, run_sweep, scan_t2_fixed_points,
    search_unbounded, ClassifyConfig, SampleBox, ScanGrid, SweepSpec,
};
use crate::numerics::{Mode, PrecisionConfig, Scalar};

use super::output::{Report, Value};
use super::{CandidateName, ClassifyArgs, Cli, Command, Failure, GlobalArgs, MapArgs, VariantName};

pub(super) struct Outcome {
    pub report: Report,
    pub check_failed: bool,
    pub warnings: Vec<String>,
    /// Error to report after the partial output has been written.
    pub trailing: Option<Failure>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self {
            report,
            check_failed: false,
            warnings: Vec::new(),
            trailing: None,
        }
    }
}

type Run = std::result::Result<Outcome, Failure>;

fn config(g: &GlobalArgs, default_mode: Mode) -> std::result::Result<PrecisionConfig, Failure> {
    PrecisionConfig::new(g.precision.unwrap_or(default_mode), g.bit_limit, g.tol)
        .map_err(|e| Failure::from_error("invalid precision flags", &e))
}

fn scalar(cfg: &PrecisionConfig, flag: &str, text: &str) -> std::result::Result<Scalar, Failure> {
    cfg.parse(text)
        .map_err(|e| Failure::from_error(&format!("--{flag}"), &e))
}

fn state(cfg: &PrecisionConfig, text: &str) -> std::result::Result<State3, Failure> {
    State3::parse(cfg, text).map_err(|e| Failure::from_error("--state", &e))
}

fn build_map(cfg: &PrecisionConfig, m: &MapArgs) -> std::result::Result<StepMap, Failure> {
    match (&m.alpha, &m.beta, &m.lambda, &m.c, &m.a) {
        (Some(al), Some(be), Some(la), None, None) => {
            let p = Params::new(
                scalar(cfg, "alpha", al)?,
                scalar(cfg, "beta", be)?,
                scalar(cfg, "lambda", la)?,
            )
            .map_err(|e| Failure::from_error("--alpha/--beta/--lambda", &e))?;
            Ok(StepMap::General(p))
        }
        (None, None, None, Some(c), None) => Ok(StepMap::Todd(
            NormalizedTodd::new(scalar(cfg, "c", c)?)
                .map_err(|e| Failure::from_error("--c", &e))?,
        )),
        (None, None, None, Some(c), Some(a)) => Ok(StepMap::TwoParam(two_param(cfg, a, c)?)),
        _ => Err(Failure::usage(
            "choose a map with --alpha --beta --lambda, or --c with optional --a",
        )),
    }
}

fn two_param(
    cfg: &PrecisionConfig,
    a: &str,
    c: &str,
) -> std::result::Result<NormalizedTwoParam, Failure> {
    NormalizedTwoParam::new(scalar(cfg, "c", c)?, scalar(cfg, "a", a)?)
        .map_err(|e| Failure::from_error("--a/--c", &e))
}

fn map_params(report: &mut Report, map: &StepMap) {
    match map {
        StepMap::General(p) => {
            report
                .param("alpha", p.alpha())
                .param("beta", p.beta())
                .param("lambda", p.lambda());
        }
        StepMap::Todd(t) => {
            report.param("c", t.c());
        }
        StepMap::TwoParam(q) => {
            report.param("c", q.c()).param("a", q.a());
        }
    }
}

fn header(command: &str, columns: &[&str], cfg: &PrecisionConfig) -> Report {
    let mut r = Report::new(command, columns);
    r.param("precision", cfg.mode.to_string());
    r
}

fn state_values(s: &State3) -> Vec<Value> {
    s.coords().iter().map(|x| Value::from(*x)).collect()
}

fn classify_config(args: &ClassifyArgs, tol: f64) -> std::result::Result<ClassifyConfig, Failure> {
    let c = ClassifyConfig {
        max_steps: args.max_steps,
        escape_threshold: args.escape,
        floor_threshold: args.floor,
        period_search: !args.no_period_search,
        tolerance: tol,
    };
    c.validate().map_err(|e| Failure::from_error("", &e))?;
    Ok(c)
}

fn witness_values(w: Option<&ViolationWitness>) -> Vec<Value> {
    match w {
        Some(w) => {
            let mut v = state_values(&w.state);
            v.extend([
                Value::from(&w.lhs),
                Value::from(&w.rhs),
                Value::from(w.inequality.as_str()),
            ]);
            v
        }
        None => vec![Value::Missing; 6],
    }
}

pub(super) fn execute(cli: &Cli) -> Run {
    let g = &cli.global;
    match &cli.command {
        Command::Step { map, state: s, n } => {
            let cfg = config(g, Mode::Exact)?;
            let map = build_map(&cfg, map)?;
            let s0 = state(&cfg, s)?;
            let end = map.iterate(&cfg, &s0, *n)?;
            let mut r = header("step", &["n", "x0", "x1", "x2"], &cfg);
            map_params(&mut r, &map);
            r.param("state", s0.to_string()).param("n", *n);
            let mut row = vec![Value::from(*n)];
            row.extend(state_values(&end));
            r.push(row);
            Ok(Outcome::ok(r))
        }
        Command::Orbit {
            map,
            state: s,
            steps,
            trace_invariant,
        } => {
            let cfg = config(g, Mode::Exact)?;
            let map = build_map(&cfg, map)?;
            let s0 = state(&cfg, s)?;
            if *trace_invariant && map.todd_form(&cfg).is_none() {
                return Err(Failure::domain(
                    "--trace-invariant needs a Todd-form map (beta = lambda, or a = 1)",
                ));
            }
            let rec = iterate_orbit(&cfg, &map, &s0, *steps, *trace_invariant);
            let mut cols = vec!["n", "x0", "x1", "x2"];
            if *trace_invariant {
                cols.push("invariant");
            }
            let mut r = header("orbit", &cols, &cfg);
            map_params(&mut r, &map);
            r.param("state", s0.to_string()).param("steps", *steps);
            for i in 0..=rec.steps {
                let w = rec.state(i).expect("window within record");
                let mut row = vec![Value::from(i)];
                row.extend(state_values(&w));
                if let Some(trace) = &rec.invariant_trace {
                    row.push(Value::from(&trace[i]));
                }
                r.push(row);
            }
            let trailing = rec.failure.as_ref().map(|e| {
                Failure::from_error(&format!("orbit stopped after {} steps", rec.steps), e)
            });
            Ok(Outcome {
                trailing,
                ..Outcome::ok(r)
            })
        }
        Command::Invariant { c, state: s } => {
            let cfg = config(g, Mode::Exact)?;
            let c = scalar(&cfg, "c", c)?;
            let s = state(&cfg, s)?;
            let mut r = header("invariant", &["invariant"], &cfg);
            r.param("c", &c).param("state", s.to_string());
            r.push(vec![invariant_i(&cfg, &c, &s)?.into()]);
            Ok(Outcome::ok(r))
        }
        Command::Lyapunov { c, state: s } => {
            let cfg = config(g, Mode::Exact)?;
            let c = scalar(&cfg, "c", c)?;
            let s = state(&cfg, s)?;
            let v = lyapunov_v(&cfg, &c, &s).map_err(|e| match e {
                crate::Error::ExactModeUnsupported(_) => {
                    Failure::from_error("the equilibrium is irrational; use --precision f64", &e)
                }
                e => e.into(),
            })?;
            let mut r = header("lyapunov", &["v"], &cfg);
            r.param("c", &c).param("state", s.to_string());
            r.push(vec![v.into()]);
            Ok(Outcome::ok(r))
        }
        Command::FixedPoint { a, c } => {
            let cfg = config(g, Mode::Exact)?;
            let q = two_param(&cfg, a, c)?;
            let u = fixed_point(&cfg, &q).map_err(|e| {
                Failure::from_error("use --precision f64 for irrational fixed points", &e)
            })?;
            let mut r = header("fixed-point", &["u"], &cfg);
            r.param("a", q.a()).param("c", q.c());
            r.push(vec![u.into()]);
            Ok(Outcome::ok(r))
        }
        Command::Classify {
            map,
            state: s,
            classify,
        } => {
            let cfg = config(g, Mode::Float64)?;
            let map = build_map(&cfg, map)?;
            let s0 = state(&cfg, s)?;
            let ccfg = classify_config(classify, g.tol)?;
            let rep = classify_orbit(&cfg, &map, &s0, &ccfg)?;
            let mut r = header(
                "classify",
                &[
                    "verdict",
                    "period",
                    "max_value",
                    "min_value",
                    "steps_run",
                    "escape_step",
                    "growth_rate",
                    "evidence",
                ],
                &cfg,
            );
            map_params(&mut r, &map);
            r.param("state", s0.to_string())
                .param("max_steps", ccfg.max_steps)
                .param("escape", ccfg.escape_threshold)
                .param("floor", ccfg.floor_threshold);
            r.push(vec![
                rep.verdict.label().into(),
                rep.verdict.period().into(),
                (&rep.max_value).into(),
                (&rep.min_value).into(),
                rep.steps_run.into(),
                rep.escape_step.into(),
                rep.growth_rate.into(),
                rep.evidence.clone().into(),
            ]);
            Ok(Outcome::ok(r))
        }
        Command::Sweep { spec } => sweep(g, spec),
        Command::SearchUnbounded {
            alpha,
            beta,
            lambda,
            trials,
            classify,
            low,
            high,
        } => {
            let cfg = config(g, Mode::Float64)?;
            let p = Params::new(
                scalar(&cfg, "alpha", alpha)?,
                scalar(&cfg, "beta", beta)?,
                scalar(&cfg, "lambda", lambda)?,
            )
            .map_err(|e| Failure::from_error("--alpha/--beta/--lambda", &e))?;
            let ccfg = classify_config(classify, g.tol)?;
            let bx = SampleBox::log_uniform(*low, *high)
                .map_err(|e| Failure::from_error("--low/--high", &e))?;
            let rep = search_unbounded(&cfg, &p, *trials, g.seed, &ccfg, &bx)?;
            let mut r = header(
                "search-unbounded",
                &[
                    "trial",
                    "seed",
                    "x0",
                    "x1",
                    "x2",
                    "verdict",
                    "max_value",
                    "min_value",
                    "steps_run",
                    "escape_step",
                    "growth_rate",
                    "escapes",
                    "inconclusive",
                    "trials",
                ],
                &cfg,
            );
            r.param("alpha", p.alpha())
                .param("beta", p.beta())
                .param("lambda", p.lambda())
                .param("trials", *trials)
                .param("seed", g.seed)
                .param("max_steps", ccfg.max_steps)
                .param("low", *low)
                .param("high", *high);
            let mut row = vec![Value::from(rep.best_trial), Value::from(rep.best_seed)];
            row.extend(state_values(&rep.witness));
            row.extend([
                rep.best.verdict.label().into(),
                (&rep.best.max_value).into(),
                (&rep.best.min_value).into(),
                rep.best.steps_run.into(),
                rep.best.escape_step.into(),
                rep.best.growth_rate.into(),
                rep.escapes.into(),
                rep.inconclusive.into(),
                rep.trials.into(),
            ]);
            r.push(row);
            Ok(Outcome::ok(r))
        }
        Command::CheckSubEnergy {
            candidate,
            c,
            samples,
            variant,
            k,
            base,
            stride,
            depth,
            low,
            high,
        } => {
            let cfg = config(g, Mode::Exact)?;
            let c = scalar(&cfg, "c", c)?;
            let map = StepMap::Todd(
                NormalizedTodd::new(c.clone()).map_err(|e| Failure::from_error("--c", &e))?,
            );
            let f = match candidate {
                CandidateName::MaxComposition => {
                    if *base == CandidateName::MaxComposition {
                        return Err(Failure::usage("--base cannot itself be max-composition"));
                    }
                    build_sub_energy_candidate(simple_candidate(*base, &c), *stride, *depth, &map)?
                }
                other => simple_candidate(*other, &c),
            };
            let variant = match variant {
                VariantName::OneStep => SubEnergyVariant::OneStep,
                VariantName::KStep => SubEnergyVariant::KStep(*k),
                VariantName::MaxOfTwo => SubEnergyVariant::MaxOfTwo,
            };
            let bx = SampleBox::log_uniform(*low, *high)
                .map_err(|e| Failure::from_error("--low/--high", &e))?;
            // Sample 0 is (1,1,1); the rest are seeded random draws.
            let mut pts = random_states(&cfg, g.seed, samples.saturating_sub(1), &bx)?;
            if *samples > 0 {
                pts.insert(0, State3::diagonal(cfg.int(1))?);
            }
            let rep = check_sub_energy(&cfg, &f, &map, &pts, variant)?;
            let mut r = header(
                "check-sub-energy",
                &[
                    "candidate",
                    "variant",
                    "samples_checked",
                    "passed",
                    "all_equal",
                    "x0",
                    "x1",
                    "x2",
                    "lhs",
                    "rhs",
                    "inequality",
                ],
                &cfg,
            );
            r.param("c", &c)
                .param("samples", *samples)
                .param("seed", g.seed);
            let mut row = vec![
                f.to_string().into(),
                variant.to_string().into(),
                rep.samples_checked.into(),
                rep.passed().into(),
                rep.all_equal.into(),
            ];
            row.extend(witness_values(rep.witness.as_ref()));
            r.push(row);
            Ok(Outcome {
                check_failed: !rep.passed(),
                ..Outcome::ok(r)
            })
        }
        Command::RefuteSuperEnergy {
            a,
            c,
            rho,
            candidate,
        } => {
            let cfg = config(g, Mode::Exact)?;
            let q = two_param(&cfg, a, c)?;
            let rho = scalar(&cfg, "rho", rho)?;
            let candidate = match candidate {
                CandidateName::MaxComposition => {
                    return Err(Failure::usage("--candidate must be todd, sum or max"));
                }
                other => simple_candidate(*other, q.c()),
            };
            let spec = SuperEnergySpec {
                rho: rho.clone(),
                candidate: candidate.clone(),
                params: q.clone(),
            };
            let w = refute_super_energy(&cfg, &spec).map_err(|e| match e {
                crate::Error::ExactModeUnsupported(_) => {
                    Failure::from_error("use --precision f64", &e)
                }
                e => e.into(),
            })?;
            let mut r = header(
                "refute-super-energy",
                &[
                    "candidate",
                    "rho",
                    "x0",
                    "x1",
                    "x2",
                    "lhs",
                    "rhs",
                    "inequality",
                ],
                &cfg,
            );
            r.param("a", q.a()).param("c", q.c()).param("rho", &rho);
            let mut row = vec![candidate.to_string().into(), (&rho).into()];
            row.extend(witness_values(Some(&w)));
            r.push(row);
            Ok(Outcome::ok(r))
        }
        Command::CheckLyapunov {
            c,
            samples,
            low,
            high,
        } => {
            let cfg = config(g, Mode::Exact)?;
            let c = scalar(&cfg, "c", c)?;
            let bx = SampleBox::uniform(*low, *high)
                .map_err(|e| Failure::from_error("--low/--high", &e))?;
            let pts = random_states(&cfg, g.seed, *samples, &bx)?;
            let rep = check_lyapunov_conditions(&cfg, &c, &pts, g.tol)?;
            let mut r = header(
                "check-lyapunov",
                &[
                    "equilibrium",
                    "v_at_equilibrium",
                    "zero_at_equilibrium",
                    "positive_on_samples",
                    "invariant_under_map",
                    "samples_checked",
                    "min_v",
                    "passed",
                    "x0",
                    "x1",
                    "x2",
                    "lhs",
                    "rhs",
                    "inequality",
                ],
                &cfg,
            );
            r.param("c", &c)
                .param("samples", *samples)
                .param("seed", g.seed)
                .param("low", *low)
                .param("high", *high);
            let mut row = vec![
                rep.equilibrium.into(),
                rep.v_at_equilibrium.into(),
                rep.zero_at_equilibrium.into(),
                rep.positive_on_samples.into(),
                rep.invariant_under_map.into(),
                rep.samples_checked.into(),
                rep.min_v.into(),
                rep.passed().into(),
            ];
            row.extend(witness_values(rep.witness.as_ref()));
            r.push(row);
            let mut out = Outcome {
                check_failed: !rep.passed(),
                ..Outcome::ok(r)
            };
            if let Some(s) = &rep.precondition_violation {
                out.warnings
                    .push(format!("sample {s} is the equilibrium itself"));
            }
            Ok(out)
        }
        Command::ScanT2 {
            a,
            c,
            bounds,
            resolution,
            scan_tol,
        } => {
            if g.precision == Some(Mode::Exact) {
                return Err(Failure::domain(
                    "exact mode unsupported: scan-t2 evaluates on a binary64 grid",
                ));
            }
            let cfg = config(g, Mode::Float64)?;
            let q = two_param(&cfg, a, c)?;
            let grid = ScanGrid::new(bounds.0, bounds.1, *resolution)
                .map_err(|e| Failure::from_error("--box/--resolution", &e))?;
            let tol = scan_tol.unwrap_or_else(|| default_scan_tolerance(&grid));
            let rep = scan_t2_fixed_points(&q, &grid, tol)?;
            let mut r = header(
                "scan-t2",
                &[
                    "region",
                    "x0",
                    "x1",
                    "x2",
                    "residual",
                    "members",
                    "contains_fixed_point",
                ],
                &cfg,
            );
            r.param("a", q.a())
                .param("c", q.c())
                .param("low", bounds.0)
                .param("high", bounds.1)
                .param("resolution", *resolution)
                .param("tolerance", tol)
                .param("fixed_point", rep.fixed_point)
                .param("evaluated", rep.evaluated)
                .param(
                    "potential_counterexamples",
                    rep.potential_counterexamples().len(),
                );
            for (i, region) in rep.regions.iter().enumerate() {
                let mut row = vec![Value::from(i)];
                row.extend(region.best.point.iter().map(|x| Value::from(*x)));
                row.extend([
                    region.best.residual.into(),
                    region.members.into(),
                    (rep.fixed_point_region == Some(i)).into(),
                ]);
                r.push(row);
            }
            Ok(Outcome::ok(r))
        }
    }
}

fn simple_candidate(name: CandidateName, c: &Scalar) -> EnergyCandidate {
    match name {
        CandidateName::Todd => EnergyCandidate::ToddInvariant { c: c.clone() },
        CandidateName::Sum => EnergyCandidate::SumCoordinates,
        CandidateName::Max | CandidateName::MaxComposition => EnergyCandidate::MaxCoordinate,
    }
}

/// Column order of sweep output; fixed.
pub const SWEEP_COLUMNS: [&str; 15] = [
    "alpha",
    "beta",
    "lambda",
    "c",
    "a",
    "x0",
    "x1",
    "x2",
    "verdict",
    "period",
    "max_value",
    "min_value",
    "steps_run",
    "escape_step",
    "seed",
];

fn sweep(g: &GlobalArgs, path: &std::path::Path) -> Run {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::domain(format!("cannot read {}: {e}", path.display())))?;
    let spec = SweepSpec::from_toml_str(&text, g.precision, Mode::Float64)
        .map_err(|e| Failure::from_error(&path.display().to_string(), &e))?;
    let rows = run_sweep(&spec)?;
    let mut r = header("sweep", &SWEEP_COLUMNS, &spec.precision);
    r.param("spec", path.display().to_string())
        .param("seed", spec.seed)
        .param("max_steps", spec.classify.max_steps)
        .param("rows", rows.len());
    let mut warnings = Vec::new();
    for row in &rows {
        let (alpha, beta, lambda, c, a) = match &row.map {
            StepMap::General(p) => (
                Some(p.alpha()),
                Some(p.beta()),
                Some(p.lambda()),
                None,
                None,
            ),
            StepMap::Todd(t) => (None, None, None, Some(t.c()), None),
            StepMap::TwoParam(q) => (None, None, None, Some(q.c()), Some(q.a())),
        };
        let mut cells: Vec<Value> = [alpha, beta, lambda, c, a]
            .into_iter()
            .map(Value::from)
            .collect();
        cells.extend(state_values(&row.initial));
        match &row.outcome {
            Ok(rep) => cells.extend([
                rep.verdict.label().into(),
                rep.verdict.period().into(),
                (&rep.max_value).into(),
                (&rep.min_value).into(),
                rep.steps_run.into(),
                rep.escape_step.into(),
            ]),
            Err(e) => {
                warnings.push(format!(
                    "cell {} initial {}: {e}",
                    row.cell, row.initial_index
                ));
                cells.extend([
                    Value::from("error"),
                    Value::Missing,
                    Value::Missing,
                    Value::Missing,
                    Value::Missing,
                    Value::Missing,
                ]);
            }
        }
        cells.push(row.seed.into());
        r.push(cells);
    }
    Ok(Outcome {
        warnings,
        ..Outcome::ok(r)
    })
}

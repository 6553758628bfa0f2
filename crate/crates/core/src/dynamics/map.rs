use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{exact_sqrt, Mode, PrecisionConfig, Scalar};

use super::params::{NormalizedTodd, NormalizedTwoParam, Params};
use super::state::State3;

/// One of the three equivalent forms of the recurrence.
#[derive(Debug, Clone, PartialEq)]
pub enum StepMap {
    General(Params),
    Todd(NormalizedTodd),
    TwoParam(NormalizedTwoParam),
}

impl StepMap {
    pub fn step(&self, cfg: &PrecisionConfig, s: &State3) -> Result<State3> {
        match self {
            StepMap::General(p) => step_general(cfg, p, s),
            StepMap::Todd(t) => step_todd(cfg, t, s),
            StepMap::TwoParam(q) => step_two_param(cfg, q, s),
        }
    }

    /// Applies the map `n` times.
    pub fn iterate(&self, cfg: &PrecisionConfig, s: &State3, n: usize) -> Result<State3> {
        let mut cur = s.clone();
        for _ in 0..n {
            cur = self.step(cfg, &cur)?;
        }
        Ok(cur)
    }

    pub fn mode(&self) -> Mode {
        match self {
            StepMap::General(p) => p.mode(),
            StepMap::Todd(t) => t.c().mode(),
            StepMap::TwoParam(q) => q.c().mode(),
        }
    }

    /// Whether the map is conjugate to Todd's equation (`beta == lambda > 0`,
    /// or `a == 1`).
    pub fn is_symmetric(&self, cfg: &PrecisionConfig) -> bool {
        match self {
            StepMap::General(p) => p.beta().is_positive() && p.is_symmetric(cfg),
            StepMap::Todd(_) => true,
            StepMap::TwoParam(q) => cfg.close(q.a(), &cfg.int(1)).unwrap_or(false),
        }
    }

    /// `(c, scale)` such that states divided by `scale` follow Todd's
    /// equation with parameter `c`, when the map has that form.
    pub fn todd_form(&self, cfg: &PrecisionConfig) -> Option<(Scalar, Scalar)> {
        if !self.is_symmetric(cfg) {
            return None;
        }
        match self {
            StepMap::General(p) => super::params::normalize_todd(cfg, p)
                .ok()
                .map(|(t, scale)| (t.c().clone(), scale)),
            StepMap::Todd(t) => Some((t.c().clone(), cfg.int(1))),
            StepMap::TwoParam(q) => Some((q.c().clone(), cfg.int(1))),
        }
    }
}

impl fmt::Display for StepMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepMap::General(p) => write!(
                f,
                "general(alpha={}, beta={}, lambda={})",
                p.alpha(),
                p.beta(),
                p.lambda()
            ),
            StepMap::Todd(t) => write!(f, "todd(c={})", t.c()),
            StepMap::TwoParam(q) => write!(f, "two-param(c={}, a={})", q.c(), q.a()),
        }
    }
}

fn finish(cfg: &PrecisionConfig, s: &State3, numerator: Scalar) -> Result<State3> {
    if !numerator.is_positive() {
        return Err(Error::DegenerateStep(s.to_string()));
    }
    let next = cfg.div(&numerator, s.oldest())?;
    if !next.is_positive() {
        // Float underflow.
        return Err(Error::DegenerateStep(s.to_string()));
    }
    s.shifted(next)
}

/// `(x1, x2, (alpha + beta x2 + lambda x1) / x0)`.
pub fn step_general(cfg: &PrecisionConfig, p: &Params, s: &State3) -> Result<State3> {
    let num = cfg.add(
        &cfg.add(p.alpha(), &cfg.mul(p.beta(), s.newest())?)?,
        &cfg.mul(p.lambda(), s.middle())?,
    )?;
    finish(cfg, s, num)
}

/// `(x1, x2, (c + x2 + x1) / x0)`.
pub fn step_todd(cfg: &PrecisionConfig, t: &NormalizedTodd, s: &State3) -> Result<State3> {
    let num = cfg.add(&cfg.add(t.c(), s.newest())?, s.middle())?;
    finish(cfg, s, num)
}

/// `(u1, u2, (c + a u2 + u1 / a) / u0)`.
pub fn step_two_param(cfg: &PrecisionConfig, q: &NormalizedTwoParam, s: &State3) -> Result<State3> {
    let num = cfg.add(
        &cfg.add(q.c(), &cfg.mul(q.a(), s.newest())?)?,
        &cfg.div(s.middle(), q.a())?,
    )?;
    finish(cfg, s, num)
}

/// The unique positive fixed point `u` of the two-parameter map, the positive
/// root of `u^2 = c + (a + 1/a) u`:
///
/// `u = (1 + a^2 + sqrt(a^4 + 4 a^2 c + 2 a^2 + 1)) / (2a)`.
///
/// Exact mode succeeds only when the discriminant is a rational square
/// (always the case for `c = 0`, where `u = (1 + a^2)/a`).
pub fn fixed_point(cfg: &PrecisionConfig, q: &NormalizedTwoParam) -> Result<Scalar> {
    match (q.a(), q.c()) {
        (Scalar::Exact(a), Scalar::Exact(c)) => {
            let a2 = a * a;
            let one = num_rational::BigRational::from_integer(1.into());
            let four = num_rational::BigRational::from_integer(4.into());
            let two = num_rational::BigRational::from_integer(2.into());
            let disc = &a2 * &a2 + &four * &a2 * c + &two * &a2 + &one;
            let root = exact_sqrt(&disc).ok_or_else(|| {
                Error::ExactModeUnsupported(format!(
                    "fixed point for a = {}, c = {} is irrational (discriminant {})",
                    q.a(),
                    q.c(),
                    Scalar::Exact(disc.clone())
                ))
            })?;
            cfg.check(Scalar::Exact((one + a2 + root) / (two * a)))
        }
        (Scalar::Float(a), Scalar::Float(c)) => {
            let a2 = a * a;
            let disc = a2 * a2 + 4.0 * a2 * c + 2.0 * a2 + 1.0;
            Ok(Scalar::Float((1.0 + a2 + disc.sqrt()) / (2.0 * a)))
        }
        _ => Err(Error::ModeMismatch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex() -> PrecisionConfig {
        PrecisionConfig::exact()
    }

    fn st(s: &str) -> State3 {
        State3::parse(&ex(), s).unwrap()
    }

    fn todd(c: &str) -> NormalizedTodd {
        NormalizedTodd::new(ex().parse(c).unwrap()).unwrap()
    }

    fn two(c: &str, a: &str) -> NormalizedTwoParam {
        NormalizedTwoParam::new(ex().parse(c).unwrap(), ex().parse(a).unwrap()).unwrap()
    }

    #[test]
    fn general_step_examples() {
        let cfg = ex();
        let p = Params::parse(&cfg, "1", "1", "1").unwrap();
        assert_eq!(step_general(&cfg, &p, &st("1,1,1")).unwrap(), st("1,1,3"));
        let p = Params::parse(&cfg, "1/2", "1/4", "1").unwrap();
        assert_eq!(step_general(&cfg, &p, &st("1,2,4")).unwrap(), st("2,4,7/2"));
        let p = Params::parse(&cfg, "0", "2", "1").unwrap();
        assert_eq!(step_general(&cfg, &p, &st("1,1,1")).unwrap(), st("1,1,3"));
    }

    #[test]
    fn zero_numerator_is_degenerate() {
        let cfg = ex();
        assert!(matches!(
            finish(&cfg, &st("1,1,1"), cfg.int(0)),
            Err(Error::DegenerateStep(_))
        ));
        // Float underflow of the new coordinate is degenerate too.
        let f = PrecisionConfig::float();
        let s = State3::from_f64(&f, [1e300, 1e-300, 1e-300]).unwrap();
        let p = Params::parse(&f, "0", "1e-20", "0").unwrap();
        assert!(matches!(
            step_general(&f, &p, &s),
            Err(Error::DegenerateStep(_))
        ));
    }

    #[test]
    fn todd_step_examples() {
        let cfg = ex();
        assert_eq!(
            step_todd(&cfg, &todd("1"), &st("1,1,1")).unwrap(),
            st("1,1,3")
        );
        assert_eq!(
            step_todd(&cfg, &todd("1"), &st("2,1,1")).unwrap(),
            st("1,1,3/2")
        );
        assert_eq!(
            step_todd(&cfg, &todd("0"), &st("1,1,1")).unwrap(),
            st("1,1,2")
        );
    }

    #[test]
    fn two_param_step_examples() {
        let cfg = ex();
        assert_eq!(
            step_two_param(&cfg, &two("0", "2"), &st("5/2,5/2,5/2")).unwrap(),
            st("5/2,5/2,5/2")
        );
        assert_eq!(
            step_two_param(&cfg, &two("1", "1"), &st("1,1,1")).unwrap(),
            st("1,1,3")
        );
        assert_eq!(
            step_two_param(&cfg, &two("0", "2"), &st("1,1,1")).unwrap(),
            st("1,1,5/2")
        );
    }

    #[test]
    fn fixed_point_examples() {
        let cfg = ex();
        assert_eq!(fixed_point(&cfg, &two("0", "1")).unwrap(), cfg.int(2));
        assert_eq!(fixed_point(&cfg, &two("0", "2")).unwrap(), cfg.ratio(5, 2));
        assert!(matches!(
            fixed_point(&cfg, &two("1", "1")),
            Err(Error::ExactModeUnsupported(_))
        ));
        let f = PrecisionConfig::float();
        let q = NormalizedTwoParam::new(Scalar::Float(1.0), Scalar::Float(1.0)).unwrap();
        let u = fixed_point(&f, &q).unwrap().to_f64();
        assert!((u - (1.0 + 2f64.sqrt())).abs() <= 1e-12 * u);
        assert!((u - 2.414213562).abs() < 1e-9);
    }

    #[test]
    fn a_equal_one_matches_todd_equilibrium() {
        let f = PrecisionConfig::float();
        for c in [0.0, 1.0, 2.0, 5.0] {
            let q = NormalizedTwoParam::new(Scalar::Float(c), Scalar::Float(1.0)).unwrap();
            let u = fixed_point(&f, &q).unwrap().to_f64();
            let p = 1.0 + (1.0 + c).sqrt();
            assert!((u - p).abs() <= 1e-12 * p, "c = {c}: {u} vs {p}");
        }
    }

    #[test]
    fn todd_form_of_general_map() {
        let cfg = ex();
        let m = StepMap::General(Params::parse(&cfg, "2", "2", "2").unwrap());
        let (c, scale) = m.todd_form(&cfg).unwrap();
        assert_eq!(
            (c.to_string(), scale.to_string()),
            ("1/2".into(), "2".into())
        );
        let m = StepMap::General(Params::parse(&cfg, "2", "2", "3").unwrap());
        assert!(m.todd_form(&cfg).is_none());
        let m = StepMap::TwoParam(two("1", "2"));
        assert!(m.todd_form(&cfg).is_none());
    }
}

use num_rational::BigRational;
use num_traits::One;

use crate::dynamics::{OrbitRecord, State3};
use crate::error::{Error, Result};
use crate::numerics::{sqrt_lower_bound, sqrt_upper_bound, PrecisionConfig, Scalar};

/// Todd's invariant
/// `I = (c + x0 + x1 + x2)(1 + 1/x0)(1 + 1/x1)(1 + 1/x2)`,
/// evaluated as `(c + S)(x0 + 1)(x1 + 1)(x2 + 1) / (x0 x1 x2)` so float mode
/// rounds only once per product.
pub fn invariant_i(cfg: &PrecisionConfig, c: &Scalar, s: &State3) -> Result<Scalar> {
    let one = cfg.int(1);
    let mut numer = c.clone();
    for x in s.coords() {
        numer = cfg.add(&numer, x)?;
    }
    let mut denom = one.clone();
    for x in s.coords() {
        numer = cfg.mul(&numer, &cfg.add(x, &one)?)?;
        denom = cfg.mul(&denom, x)?;
    }
    cfg.div(&numer, &denom)
}

/// `max_n |I_n - I_0| / I_0` over the record's invariant trace.
pub fn invariant_drift(cfg: &PrecisionConfig, r: &OrbitRecord) -> Result<Scalar> {
    let trace = r
        .invariant_trace
        .as_ref()
        .filter(|t| !t.is_empty())
        .ok_or_else(|| Error::NotApplicable("record has no invariant trace".into()))?;
    let first = &trace[0];
    let mut worst = cfg.int(0);
    for v in &trace[1..] {
        let d = cfg.sub(v, first)?;
        let d = if d.is_positive() {
            d
        } else {
            cfg.sub(&cfg.int(0), &d)?
        };
        let rel = cfg.div(&d, first)?;
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

/// Positive equilibrium `p = 1 + sqrt(1 + c)` of Todd's equation, the root of
/// `p^2 = c + 2p`. Exact only when `1 + c` is a rational square.
pub fn equilibrium_todd(cfg: &PrecisionConfig, c: &Scalar) -> Result<Scalar> {
    if !(c.is_positive() || c.is_zero()) {
        return Err(Error::InvalidParams(format!("c = {c} is negative")));
    }
    let one = cfg.int(1);
    let root = cfg.sqrt(&cfg.add(&one, c)?).map_err(|e| match e {
        Error::ExactModeUnsupported(_) => {
            Error::ExactModeUnsupported(format!("equilibrium 1 + sqrt(1 + {c}) is irrational"))
        }
        other => other,
    })?;
    cfg.add(&one, &root)
}

/// Closed form `I(p, p, p) = (p + 1)^4 / p^2`.
pub fn equilibrium_energy(cfg: &PrecisionConfig, p: &Scalar) -> Result<Scalar> {
    let p1 = cfg.add(p, &cfg.int(1))?;
    let sq = cfg.mul(&p1, &p1)?;
    cfg.div(&cfg.mul(&sq, &sq)?, &cfg.mul(p, p)?)
}

/// Rational bounds `lo <= I(p,p,p) <= hi` for the Todd equilibrium, usable when
/// `p` is irrational. `(p+1)^4/p^2` is increasing for `p > 1` and `p >= 2`.
pub fn equilibrium_energy_bounds(c: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let radicand = &one + c;
    let energy = |p: BigRational| {
        let p1 = &p + &one;
        let sq = &p1 * &p1;
        &sq * &sq / (&p * &p)
    };
    (
        energy(&one + sqrt_lower_bound(&radicand)),
        energy(&one + sqrt_upper_bound(&radicand)),
    )
}

/// The four literal lower bounds on `I` that make it coercive: `I >= x0+x1+x2`,
/// `I >= (x1+x2)/x0`, `I >= (x0+x2)/x1`, `I >= (x0+x1)/x2`.
pub fn coercivity_bounds(cfg: &PrecisionConfig, c: &Scalar, s: &State3) -> Result<bool> {
    let i = invariant_i(cfg, c, s)?;
    let [x0, x1, x2] = s.coords();
    let bounds = [
        cfg.add(&cfg.add(x0, x1)?, x2)?,
        cfg.div(&cfg.add(x1, x2)?, x0)?,
        cfg.div(&cfg.add(x0, x2)?, x1)?,
        cfg.div(&cfg.add(x0, x1)?, x2)?,
    ];
    Ok(bounds.iter().all(|b| &i >= b))
}

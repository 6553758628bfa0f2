use crate::error::{Error, Result};
use crate::numerics::{Mode, PrecisionConfig, Scalar};

/// Raw coefficients of `z_{n+1} = (alpha + beta z_n + lambda z_{n-1}) / z_{n-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    alpha: Scalar,
    beta: Scalar,
    lambda: Scalar,
}

impl Params {
    pub fn new(alpha: Scalar, beta: Scalar, lambda: Scalar) -> Result<Self> {
        let mode = alpha.mode();
        if beta.mode() != mode || lambda.mode() != mode {
            return Err(Error::ModeMismatch);
        }
        for (name, v) in [("alpha", &alpha), ("beta", &beta), ("lambda", &lambda)] {
            if !(v.is_positive() || v.is_zero()) {
                return Err(Error::InvalidParams(format!("{name} = {v} is negative")));
            }
        }
        if alpha.is_zero() && beta.is_zero() && lambda.is_zero() {
            return Err(Error::InvalidParams("alpha = beta = lambda = 0".into()));
        }
        Ok(Self {
            alpha,
            beta,
            lambda,
        })
    }

    pub fn parse(cfg: &PrecisionConfig, alpha: &str, beta: &str, lambda: &str) -> Result<Self> {
        Self::new(cfg.parse(alpha)?, cfg.parse(beta)?, cfg.parse(lambda)?)
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn beta(&self) -> &Scalar {
        &self.beta
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn mode(&self) -> Mode {
        self.alpha.mode()
    }

    /// `beta == lambda`, exactly or within the configured tolerance.
    pub fn is_symmetric(&self, cfg: &PrecisionConfig) -> bool {
        cfg.close(&self.beta, &self.lambda).unwrap_or(false)
    }
}

/// Todd's equation `x_{n+1} = (c + x_n + x_{n-1}) / x_{n-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTodd {
    c: Scalar,
}

impl NormalizedTodd {
    pub fn new(c: Scalar) -> Result<Self> {
        if !(c.is_positive() || c.is_zero()) {
            return Err(Error::InvalidParams(format!("c = {c} is negative")));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }
}

/// `u_{n+1} = (c + a u_n + u_{n-1}/a) / u_{n-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTwoParam {
    c: Scalar,
    a: Scalar,
}

impl NormalizedTwoParam {
    pub fn new(c: Scalar, a: Scalar) -> Result<Self> {
        if c.mode() != a.mode() {
            return Err(Error::ModeMismatch);
        }
        if !(c.is_positive() || c.is_zero()) {
            return Err(Error::InvalidParams(format!("c = {c} is negative")));
        }
        if !a.is_positive() {
            return Err(Error::InvalidParams(format!("a = {a} must be positive")));
        }
        Ok(Self { c, a })
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }
}

/// Divides out `beta` (requires `beta == lambda > 0`). Returns `c = alpha/beta^2`
/// and the scale `beta`, so that `x_n = z_n / beta` follows Todd's equation.
pub fn normalize_todd(cfg: &PrecisionConfig, p: &Params) -> Result<(NormalizedTodd, Scalar)> {
    if !p.beta.is_positive() {
        return Err(Error::NotToddForm("beta = 0".into()));
    }
    if !p.is_symmetric(cfg) {
        return Err(Error::NotToddForm(format!(
            "beta = {} differs from lambda = {}",
            p.beta, p.lambda
        )));
    }
    let scale = p.beta.clone();
    let c = cfg.div(&p.alpha, &cfg.mul(&scale, &scale)?)?;
    Ok((NormalizedTodd::new(c)?, scale))
}

/// Divides out `sqrt(beta lambda)`. Returns `c = alpha/(beta lambda)`,
/// `a = sqrt(beta/lambda)` and the scale. In exact mode this only succeeds
/// when both radicals are rational.
pub fn normalize_two_param(
    cfg: &PrecisionConfig,
    p: &Params,
) -> Result<(NormalizedTwoParam, Scalar)> {
    if !p.beta.is_positive() || !p.lambda.is_positive() {
        return Err(Error::NotNormalizable(format!(
            "needs beta > 0 and lambda > 0, got beta = {}, lambda = {}",
            p.beta, p.lambda
        )));
    }
    let product = cfg.mul(&p.beta, &p.lambda)?;
    let quotient = cfg.div(&p.beta, &p.lambda)?;
    let radicals = cfg
        .sqrt(&product)
        .and_then(|scale| Ok((scale, cfg.sqrt(&quotient)?)));
    let (scale, a) = match radicals {
        Ok(r) => r,
        Err(Error::ExactModeUnsupported(_)) => {
            return Err(Error::ExactModeUnsupported(format!(
                "sqrt(beta*lambda) = sqrt({product}) or sqrt(beta/lambda) = sqrt({quotient}) is irrational"
            )))
        }
        Err(e) => return Err(e),
    };
    let c = cfg.div(&p.alpha, &product)?;
    Ok((NormalizedTwoParam::new(c, a)?, scale))
}

/// Parameters seen in coordinates `w = z / s`: `(alpha/s^2, beta/s, lambda/s)`.
pub fn rescale_conjugacy(cfg: &PrecisionConfig, p: &Params, s: &Scalar) -> Result<Params> {
    if !s.is_positive() {
        return Err(Error::NonPositive(format!("scale {s}")));
    }
    Params::new(
        cfg.div(&p.alpha, &cfg.mul(s, s)?)?,
        cfg.div(&p.beta, s)?,
        cfg.div(&p.lambda, s)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(a: &str, b: &str, l: &str) -> Params {
        Params::parse(&PrecisionConfig::exact(), a, b, l).unwrap()
    }

    #[test]
    fn params_validation() {
        let cfg = PrecisionConfig::exact();
        assert!(matches!(
            Params::parse(&cfg, "0", "0", "0"),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            Params::parse(&cfg, "-1", "1", "1"),
            Err(Error::InvalidParams(_))
        ));
        assert!(Params::parse(&cfg, "0", "0", "1").is_ok());
        assert!(NormalizedTwoParam::new(cfg.int(0), cfg.int(0)).is_err());
    }

    #[test]
    fn todd_normalization() {
        let cfg = PrecisionConfig::exact();
        let (t, scale) = normalize_todd(&cfg, &exact("2", "2", "2")).unwrap();
        assert_eq!(t.c().to_string(), "1/2");
        assert_eq!(scale, cfg.int(2));
        let (t, scale) = normalize_todd(&cfg, &exact("0", "1", "1")).unwrap();
        assert_eq!(t.c(), &cfg.int(0));
        assert_eq!(scale, cfg.int(1));
        assert!(matches!(
            normalize_todd(&cfg, &exact("1", "2", "3")),
            Err(Error::NotToddForm(_))
        ));
        assert!(matches!(
            normalize_todd(&cfg, &exact("1", "0", "0")),
            Err(Error::NotToddForm(_))
        ));
    }

    #[test]
    fn two_param_normalization() {
        let f = PrecisionConfig::float();
        let p = Params::parse(&f, "1", "4", "1").unwrap();
        let (q, scale) = normalize_two_param(&f, &p).unwrap();
        assert_eq!(
            (q.c().to_f64(), q.a().to_f64(), scale.to_f64()),
            (0.25, 2.0, 2.0)
        );
        for (alpha, c) in [("0", 0.0), ("1", 1.0)] {
            let (q, scale) =
                normalize_two_param(&f, &Params::parse(&f, alpha, "1", "1").unwrap()).unwrap();
            assert_eq!(
                (q.c().to_f64(), q.a().to_f64(), scale.to_f64()),
                (c, 1.0, 1.0)
            );
        }
        let e = PrecisionConfig::exact();
        let (q, _) = normalize_two_param(&e, &exact("1", "4", "1")).unwrap();
        assert_eq!(q.c().to_string(), "1/4");
        assert!(matches!(
            normalize_two_param(&e, &exact("1", "2", "1")),
            Err(Error::ExactModeUnsupported(_))
        ));
        assert!(matches!(
            normalize_two_param(&f, &Params::parse(&f, "1", "0", "1").unwrap()),
            Err(Error::NotNormalizable(_))
        ));
    }

    #[test]
    fn rescale_examples() {
        let cfg = PrecisionConfig::exact();
        assert_eq!(
            rescale_conjugacy(&cfg, &exact("2", "2", "2"), &cfg.int(2)).unwrap(),
            exact("1/2", "1", "1")
        );
        assert_eq!(
            rescale_conjugacy(&cfg, &exact("4", "2", "2"), &cfg.int(2)).unwrap(),
            exact("1", "1", "1")
        );
        let p = exact("3/7", "5", "1/9");
        assert_eq!(rescale_conjugacy(&cfg, &p, &cfg.int(1)).unwrap(), p);
    }
}

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{Mode, PrecisionConfig, Scalar};

/// Phase point `(x_{n-2}, x_{n-1}, x_n)`, ordered oldest to newest so the map
/// is "shift left, append".
#[derive(Debug, Clone, PartialEq)]
pub struct State3 {
    oldest: Scalar,
    middle: Scalar,
    newest: Scalar,
}

impl State3 {
    pub fn new(oldest: Scalar, middle: Scalar, newest: Scalar) -> Result<Self> {
        let mode = oldest.mode();
        if middle.mode() != mode || newest.mode() != mode {
            return Err(Error::ModeMismatch);
        }
        for (name, v) in [("x0", &oldest), ("x1", &middle), ("x2", &newest)] {
            if !v.is_positive() {
                return Err(Error::NonPositive(format!("{name} = {v}")));
            }
        }
        Ok(Self {
            oldest,
            middle,
            newest,
        })
    }

    /// The diagonal point `(u, u, u)`.
    pub fn diagonal(u: Scalar) -> Result<Self> {
        Self::new(u.clone(), u.clone(), u)
    }

    pub fn from_f64(cfg: &PrecisionConfig, x: [f64; 3]) -> Result<Self> {
        Self::new(
            cfg.from_f64(x[0])?,
            cfg.from_f64(x[1])?,
            cfg.from_f64(x[2])?,
        )
    }

    /// Parses `x0,x1,x2`.
    pub fn parse(cfg: &PrecisionConfig, input: &str) -> Result<Self> {
        let parts: Vec<&str> = input.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                input: input.to_string(),
                reason: "expected three comma-separated values".into(),
            });
        }
        Self::new(
            cfg.parse(parts[0])?,
            cfg.parse(parts[1])?,
            cfg.parse(parts[2])?,
        )
    }

    pub fn oldest(&self) -> &Scalar {
        &self.oldest
    }

    pub fn middle(&self) -> &Scalar {
        &self.middle
    }

    pub fn newest(&self) -> &Scalar {
        &self.newest
    }

    pub fn coords(&self) -> [&Scalar; 3] {
        [&self.oldest, &self.middle, &self.newest]
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [
            self.oldest.to_f64(),
            self.middle.to_f64(),
            self.newest.to_f64(),
        ]
    }

    pub fn mode(&self) -> Mode {
        self.oldest.mode()
    }

    /// `(middle, newest, next)`.
    pub fn shifted(&self, next: Scalar) -> Result<Self> {
        Self::new(self.middle.clone(), self.newest.clone(), next)
    }

    pub fn into_coords(self) -> [Scalar; 3] {
        [self.oldest, self.middle, self.newest]
    }

    /// Componentwise division by a positive scale.
    pub fn scaled_down(&self, cfg: &PrecisionConfig, scale: &Scalar) -> Result<Self> {
        Self::new(
            cfg.div(&self.oldest, scale)?,
            cfg.div(&self.middle, scale)?,
            cfg.div(&self.newest, scale)?,
        )
    }

    /// Every coordinate pair passes `cfg.close`.
    pub fn close_to(&self, cfg: &PrecisionConfig, other: &State3) -> Result<bool> {
        for (a, b) in self.coords().into_iter().zip(other.coords()) {
            if !cfg.close(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn convert(&self, cfg: &PrecisionConfig) -> Result<Self> {
        Self::new(
            cfg.convert(&self.oldest)?,
            cfg.convert(&self.middle)?,
            cfg.convert(&self.newest)?,
        )
    }
}

impl fmt::Display for State3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.oldest, self.middle, self.newest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_and_mixed() {
        let cfg = PrecisionConfig::exact();
        assert!(matches!(
            State3::parse(&cfg, "1,0,2"),
            Err(Error::NonPositive(_))
        ));
        assert!(matches!(
            State3::parse(&cfg, "1,-1/2,2"),
            Err(Error::NonPositive(_))
        ));
        assert!(State3::parse(&cfg, "1,2").is_err());
        let mixed = State3::new(cfg.int(1), Scalar::Float(1.0), cfg.int(1));
        assert_eq!(mixed, Err(Error::ModeMismatch));
    }

    #[test]
    fn shift_appends() {
        let cfg = PrecisionConfig::exact();
        let s = State3::parse(&cfg, "1,2,3").unwrap();
        let t = s.shifted(cfg.ratio(7, 2)).unwrap();
        assert_eq!(t.to_string(), "(2, 3, 7/2)");
    }
}

//! Grid screening for fixed points of the two-step map `T^2`.
//!
//! The residual is evaluated in binary64 on a plain grid; no root polishing.

use crate::dynamics::{fixed_point, NormalizedTwoParam};
use crate::error::{Error, Result};
use crate::numerics::PrecisionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Geometric,
}

/// The cube `[low, high]^3` sampled at `resolution` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub low: f64,
    pub high: f64,
    pub resolution: usize,
    pub spacing: Spacing,
}

impl ScanGrid {
    pub fn new(low: f64, high: f64, resolution: usize) -> Result<Self> {
        let g = Self {
            low,
            high,
            resolution,
            spacing: Spacing::Geometric,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.low > 0.0 && self.low < self.high && self.high.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "scan box ({}, {}) must satisfy 0 < low < high",
                self.low, self.high
            )));
        }
        if self.resolution < 3 {
            return Err(Error::InvalidSpec(format!(
                "resolution {} is below 3",
                self.resolution
            )));
        }
        Ok(())
    }

    pub fn axis(&self) -> Vec<f64> {
        let n = self.resolution;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.low + t * (self.high - self.low),
                    Spacing::Geometric => self.low * (self.high / self.low).powf(t),
                }
            })
            .collect()
    }

    /// Relative width of one grid cell, the natural scale for residuals seen
    /// at grid points next to a true zero.
    pub fn relative_step(&self) -> f64 {
        let n = (self.resolution - 1) as f64;
        match self.spacing {
            Spacing::Linear => {
                (self.high - self.low) / n / self.low.max((self.high - self.low) / n)
            }
            Spacing::Geometric => (self.high / self.low).powf(1.0 / n) - 1.0,
        }
    }
}

fn t_map(c: f64, a: f64, s: [f64; 3]) -> [f64; 3] {
    [s[1], s[2], (c + a * s[2] + s[1] / a) / s[0]]
}

/// `max_i |T^2(s)_i - s_i| / s_i`.
pub fn t2_residual(c: f64, a: f64, s: [f64; 3]) -> f64 {
    let image = t_map(c, a, t_map(c, a, s));
    (0..3)
        .map(|i| (image[i] - s[i]).abs() / s[i])
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualMinimum {
    pub index: [usize; 3],
    pub point: [f64; 3],
    pub residual: f64,
}

/// Adjacent local minima (index distance at most 2 on every axis) merged
/// into one box.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimumRegion {
    pub best: ResidualMinimum,
    pub members: usize,
    /// Bounding box of the members widened by one grid cell.
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl MinimumRegion {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|i| self.lower[i] <= p[i] && p[i] <= self.upper[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct T2ScanReport {
    pub evaluated: usize,
    pub tolerance: f64,
    pub fixed_point: f64,
    pub minima: Vec<ResidualMinimum>,
    pub regions: Vec<MinimumRegion>,
    /// Region holding the diagonal fixed point. When no grid minimum lies
    /// next to it, a region made of the fixed point alone is appended.
    pub fixed_point_region: Option<usize>,
}

impl T2ScanReport {
    /// Regions away from the diagonal fixed point: candidate `T^2` fixed points
    /// that would contradict uniqueness.
    pub fn potential_counterexamples(&self) -> Vec<&MinimumRegion> {
        self.regions
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.fixed_point_region)
            .map(|(_, r)| r)
            .collect()
    }
}

/// Default acceptance level for grid minima: a residual comparable to the
/// relative grid step.
pub fn default_scan_tolerance(grid: &ScanGrid) -> f64 {
    grid.relative_step()
}

/// Evaluates the `T^2` residual on the grid and reports the discrete local
/// minima (26-neighbourhood) whose residual is at most `tol`, grouped into
/// regions. The fixed point `(u, u, u)` of `T` is always a zero.
pub fn scan_t2_fixed_points(
    q: &NormalizedTwoParam,
    grid: &ScanGrid,
    tol: f64,
) -> Result<T2ScanReport> {
    grid.validate()?;
    let (c, a) = (q.c().to_f64(), q.a().to_f64());
    let u = fixed_point(
        &PrecisionConfig::float(),
        &NormalizedTwoParam::new(
            crate::numerics::Scalar::Float(c),
            crate::numerics::Scalar::Float(a),
        )?,
    )?
    .to_f64();
    let axis = grid.axis();
    let n = axis.len();
    let flat = |i: usize, j: usize, k: usize| (i * n + j) * n + k;

    let planes: Vec<usize> = (0..n).collect();
    let residual: Vec<f64> = crate::par::map_ordered(&planes, |_, &i| {
        let mut out = Vec::with_capacity(n * n);
        for &y in &axis {
            for &z in &axis {
                out.push(t2_residual(c, a, [axis[i], y, z]));
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();

    let mut minima = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let here = flat(i, j, k);
                let r = residual[here];
                if !(r <= tol) {
                    continue;
                }
                let mut is_min = true;
                'nb: for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        for dk in -1i64..=1 {
                            if di == 0 && dj == 0 && dk == 0 {
                                continue;
                            }
                            let (ii, jj, kk) = (i as i64 + di, j as i64 + dj, k as i64 + dk);
                            if [ii, jj, kk].iter().any(|&x| x < 0 || x >= n as i64) {
                                continue;
                            }
                            let there = flat(ii as usize, jj as usize, kk as usize);
                            // Ties broken by index so plateaus yield one minimum.
                            if residual[there] < r || (residual[there] == r && there < here) {
                                is_min = false;
                                break 'nb;
                            }
                        }
                    }
                }
                if is_min {
                    minima.push(ResidualMinimum {
                        index: [i, j, k],
                        point: [axis[i], axis[j], axis[k]],
                        residual: r,
                    });
                }
            }
        }
    }

    let mut regions = group_regions(&minima, &axis);
    let mut fixed_point_region = regions.iter().position(|r| r.contains([u, u, u]));
    if fixed_point_region.is_none() {
        // A neutral fixed point can sit in a valley with no discrete minimum
        // nearby; the known zero is then reported on its own.
        let nearest = |x: f64| {
            (0..n)
                .min_by(|&p, &q| (axis[p] - x).abs().total_cmp(&(axis[q] - x).abs()))
                .unwrap_or(0)
        };
        let k = nearest(u);
        let best = ResidualMinimum {
            index: [k; 3],
            point: [u; 3],
            residual: t2_residual(c, a, [u; 3]),
        };
        regions.push(MinimumRegion {
            best,
            members: 1,
            lower: [u; 3],
            upper: [u; 3],
        });
        fixed_point_region = Some(regions.len() - 1);
    }
    Ok(T2ScanReport {
        evaluated: n * n * n,
        tolerance: tol,
        fixed_point: u,
        minima,
        regions,
        fixed_point_region,
    })
}

fn group_regions(minima: &[ResidualMinimum], axis: &[f64]) -> Vec<MinimumRegion> {
    let m = minima.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for a in 0..m {
        for b in a + 1..m {
            let near = (0..3).all(|d| minima[a].index[d].abs_diff(minima[b].index[d]) <= 2);
            if near {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let last = axis.len() - 1;
    let mut regions: Vec<(usize, MinimumRegion)> = Vec::new();
    for idx in 0..m {
        let root = find(&mut parent, idx);
        let mn = &minima[idx];
        let lo: [f64; 3] = std::array::from_fn(|d| axis[mn.index[d].saturating_sub(1)]);
        let hi: [f64; 3] = std::array::from_fn(|d| axis[(mn.index[d] + 1).min(last)]);
        match regions.iter_mut().find(|(r, _)| *r == root) {
            Some((_, region)) => {
                region.members += 1;
                for d in 0..3 {
                    region.lower[d] = region.lower[d].min(lo[d]);
                    region.upper[d] = region.upper[d].max(hi[d]);
                }
                if mn.residual < region.best.residual {
                    region.best = mn.clone();
                }
            }
            None => regions.push((
                root,
                MinimumRegion {
                    best: mn.clone(),
                    members: 1,
                    lower: lo,
                    upper: hi,
                },
            )),
        }
    }
    regions.into_iter().map(|(_, r)| r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Scalar;

    fn q(c: f64, a: f64) -> NormalizedTwoParam {
        NormalizedTwoParam::new(Scalar::Float(c), Scalar::Float(a)).unwrap()
    }

    #[test]
    fn residual_vanishes_at_fixed_point() {
        assert_eq!(t2_residual(0.0, 2.0, [2.5; 3]), 0.0);
        let u = 1.0 + 2f64.sqrt();
        assert!(t2_residual(1.0, 1.0, [u; 3]) < 1e-15);
        assert!(t2_residual(0.0, 2.0, [1.0, 2.0, 3.0]) > 0.1);
    }

    #[test]
    fn grid_axes() {
        let g = ScanGrid::new(0.1, 10.0, 3).unwrap();
        let axis = g.axis();
        assert!((axis[1] - 1.0).abs() < 1e-12 && axis[0] == 0.1 && (axis[2] - 10.0).abs() < 1e-12);
        assert!((g.relative_step() - 9.0).abs() < 1e-12);
        assert!(ScanGrid::new(0.0, 1.0, 10).is_err());
        assert!(ScanGrid::new(1.0, 2.0, 2).is_err());
    }

    #[test]
    fn coarse_scan_finds_the_diagonal_point() {
        let g = ScanGrid::new(0.1, 10.0, 21).unwrap();
        let report = scan_t2_fixed_points(&q(0.0, 2.0), &g, default_scan_tolerance(&g)).unwrap();
        assert!(report.fixed_point_region.is_some(), "{report:?}");
        assert_eq!(report.fixed_point, 2.5);
    }

    #[test]
    fn neutral_fixed_point_is_still_reported() {
        let g = ScanGrid::new(0.1, 10.0, 50).unwrap();
        let report = scan_t2_fixed_points(&q(1.0, 1.0), &g, default_scan_tolerance(&g)).unwrap();
        let region = &report.regions[report.fixed_point_region.unwrap()];
        let u = 1.0 + 2f64.sqrt();
        assert!(region.contains([u; 3]));
        assert!(region.best.residual < 1e-12);
    }
}

//! Grid descriptions for the pointwise checkers.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

/// A rectangular evaluation grid in the open quadrant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub z_range: (f64, f64),
    pub points_per_axis: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(
        x_range: (f64, f64),
        z_range: (f64, f64),
        points_per_axis: usize,
        spacing: Spacing,
    ) -> Result<Self> {
        for (lo, hi) in [x_range, z_range] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
                return Err(Error::Domain(format!(
                    "grid ranges must satisfy 0 < lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        if points_per_axis < 2 {
            return Err(Error::Domain(format!(
                "a grid needs at least 2 points per axis, got {points_per_axis}"
            )));
        }
        Ok(Self {
            x_range,
            z_range,
            points_per_axis,
            spacing,
        })
    }

    /// The workhorse grid: 64×64 log-spaced points covering [1e−3, 1e3]
    /// on each axis.
    pub fn standard() -> Self {
        Self {
            x_range: (1e-3, 1e3),
            z_range: (1e-3, 1e3),
            points_per_axis: 64,
            spacing: Spacing::Log,
        }
    }

    fn axis(&self, (lo, hi): (f64, f64)) -> Vec<f64> {
        let n = self.points_per_axis;
        let mut pts = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            let v = match self.spacing {
                Spacing::Log => (lo.ln() * (1.0 - t) + hi.ln() * t).exp(),
                Spacing::Linear => lo * (1.0 - t) + hi * t,
            };
            pts.push(v);
        }
        // Pin the endpoints so float drift cannot push them outside the
        // requested range.
        pts[0] = lo;
        pts[n - 1] = hi;
        pts
    }

    pub fn x_points(&self) -> Vec<f64> {
        self.axis(self.x_range)
    }

    pub fn z_points(&self) -> Vec<f64> {
        self.axis(self.z_range)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn validation() {
        assert!(GridSpec::new((0.0, 1.0), (1.0, 2.0), 4, Spacing::Log).is_err());
        assert!(GridSpec::new((2.0, 1.0), (1.0, 2.0), 4, Spacing::Log).is_err());
        assert!(GridSpec::new((1.0, 2.0), (1.0, 2.0), 1, Spacing::Log).is_err());
        assert!(GridSpec::new((1.0, f64::INFINITY), (1.0, 2.0), 4, Spacing::Log).is_err());
        assert!(GridSpec::new((1e-3, 1e3), (1e-3, 1e3), 64, Spacing::Log).is_ok());
    }

    #[test]
    fn log_axis_has_constant_ratio_and_exact_endpoints() {
        let g = GridSpec::new((1e-3, 1e3), (0.5, 2.0), 7, Spacing::Log).unwrap();
        let xs = g.x_points();
        assert_eq!(xs.len(), 7);
        assert_eq!(xs[0], 1e-3);
        assert_eq!(xs[6], 1e3);
        let ratio = xs[1] / xs[0];
        for w in xs.windows(2) {
            assert_relative_eq!(w[1] / w[0], ratio, max_relative = 1e-12);
        }
    }

    #[test]
    fn linear_axis_has_constant_step() {
        let g = GridSpec::new((1.0, 3.0), (1.0, 5.0), 5, Spacing::Linear).unwrap();
        let zs = g.z_points();
        assert_eq!(zs, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }
}

//! Square phase-space lattices symmetric about the origin.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `points x points` lattice covering `[-extent, extent]^2`, endpoints
/// included. Point `(i, j)` sits at `x_i + i x_j` and is stored at flat
/// index `i * points + j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    extent: f64,
    points: usize,
}

impl Lattice {
    pub const DEFAULT_ALPHA: Lattice = Lattice { extent: 4.0, points: 129 };
    pub const DEFAULT_BETA: Lattice = Lattice { extent: 6.0, points: 128 };

    pub fn new(extent: f64, points: usize) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidArgument(format!("lattice extent {extent} must be positive")));
        }
        if points < 2 {
            return Err(Error::InvalidArgument(format!("lattice needs at least 2 points per axis, got {points}")));
        }
        Ok(Self { extent, points })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.extent / (self.points - 1) as f64
    }

    /// Axis coordinates; exactly antisymmetric, `x[k] == -x[points - 1 - k]`.
    pub fn coords(&self) -> Vec<f64> {
        let n = self.points;
        let step = self.step();
        let mut xs = vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            let x = -self.extent + k as f64 * step;
            // mirror pairs share one computed value so symmetry is bitwise exact
            if 2 * k + 1 == n {
                xs[k] = 0.0;
            } else {
                xs[k] = x;
                xs[n - 1 - k] = -x;
            }
        }
        xs
    }

    /// All lattice points in storage order.
    pub fn complex_points(&self) -> Vec<Complex64> {
        let xs = self.coords();
        xs.iter()
            .flat_map(|&re| xs.iter().map(move |&im| Complex64::new(re, im)))
            .collect()
    }

    /// Flat indices of the outermost ring.
    pub fn boundary_indices(&self) -> Vec<usize> {
        let n = self.points;
        (0..n * n)
            .filter(|idx| {
                let (i, j) = (idx / n, idx % n);
                i == 0 || j == 0 || i == n - 1 || j == n - 1
            })
            .collect()
    }

    /// Index of the origin if it is a lattice point.
    pub fn origin_index(&self) -> Option<usize> {
        if self.points % 2 == 1 {
            let c = self.points / 2;
            Some(c * self.points + c)
        } else {
            None
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.extent, self.points)
    }
}

/// Parses `extent:points`, e.g. `4:129`.
impl FromStr for Lattice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, n) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("grid '{s}' is not of the form extent:points")))?;
        let extent = a
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::InvalidArgument(format!("grid extent '{a}': {e}")))?;
        let points = n
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::InvalidArgument(format!("grid points '{n}': {e}")))?;
        Lattice::new(extent, points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_are_symmetric() {
        for l in [Lattice::DEFAULT_ALPHA, Lattice::DEFAULT_BETA, Lattice::new(1.5, 7).unwrap()] {
            let xs = l.coords();
            for k in 0..xs.len() {
                assert_eq!(xs[k], -xs[xs.len() - 1 - k]);
            }
            assert_eq!(xs[0], -l.extent());
        }
    }

    #[test]
    fn origin_only_for_odd_lattices() {
        let a = Lattice::DEFAULT_ALPHA;
        assert_eq!(a.complex_points()[a.origin_index().unwrap()], Complex64::new(0.0, 0.0));
        assert!(Lattice::DEFAULT_BETA.origin_index().is_none());
        assert_eq!(a.step(), 1.0 / 16.0);
        assert!(a.coords()[64].is_sign_positive());
    }

    #[test]
    fn parse_grid_flag() {
        let l: Lattice = "4:129".parse().unwrap();
        assert_eq!(l, Lattice::DEFAULT_ALPHA);
        assert!("4".parse::<Lattice>().is_err());
        assert!("0:10".parse::<Lattice>().is_err());
        assert!("2:1".parse::<Lattice>().is_err());
        assert_eq!(Lattice::new(3.0, 4).unwrap().boundary_indices().len(), 12);
    }
}

//! Small fixed-dimension Euclidean vectors (2 ≤ d ≤ 8) used by the
//! high-dimensional checks. Stored inline so sampling loops stay
//! allocation-free.

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VecD {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl VecD {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&coords.len()) {
            return Err(Error::Domain(format!(
                "vector dimension must be in {MIN_DIM}..={MAX_DIM}, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("vector entries must be finite".into()));
        }
        let mut inner = [0.0; MAX_DIM];
        inner[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: inner,
            dim: coords.len(),
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(&[0.0; MAX_DIM][..dim.min(MAX_DIM)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in dot product");
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        let mut out = *self;
        for (a, b) in out.coords[..self.dim].iter_mut().zip(other.as_slice()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        let mut out = *self;
        for (a, b) in out.coords[..self.dim].iter_mut().zip(other.as_slice()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = *self;
        for a in out.coords[..self.dim].iter_mut() {
            *a *= factor;
        }
        out
    }
}

impl std::ops::Index<usize> for VecD {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_bounds() {
        assert!(VecD::new(&[1.0]).is_err());
        assert!(VecD::new(&[0.0; 9]).is_err());
        assert!(VecD::new(&[1.0, f64::NAN]).is_err());
        assert!(VecD::new(&[1.0, f64::INFINITY]).is_err());
        let v = VecD::new(&[3.0, 4.0]).unwrap();
        assert_eq!(v.dim(), 2);
        assert_eq!(v.norm(), 5.0);
    }

    #[test]
    fn vector_algebra() {
        let a = VecD::new(&[1.0, 2.0, 2.0]).unwrap();
        let b = VecD::new(&[2.0, -1.0, 0.5]).unwrap();
        assert_eq!(a.dot(&b), 1.0);
        assert_eq!(a.add(&b).as_slice(), &[3.0, 1.0, 2.5]);
        assert_eq!(a.sub(&b).as_slice(), &[-1.0, 3.0, 1.5]);
        assert_eq!(a.scale(2.0).norm_squared(), 36.0);
        assert_eq!(a[2], 2.0);
        assert_eq!(VecD::zero(4).unwrap().norm(), 0.0);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn mismatched_dot_panics() {
        let a = VecD::new(&[1.0, 2.0]).unwrap();
        let b = VecD::new(&[1.0, 2.0, 3.0]).unwrap();
        let _ = a.dot(&b);
    }
}

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::sampler::{SampleSpace, SeededSampler};
use crate::error::{invalid, Error, Result};

const ORTHO_TOL: f64 = 1e-10;

/// An element of SO(n).
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    m: DMatrix<f64>,
}

impl Rotation {
    /// Validates orthonormal columns and unit determinant.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return invalid("rotation must be a square matrix of size at least 2");
        }
        let n = m.nrows();
        let gram = m.transpose() * &m;
        let dev = (gram - DMatrix::<f64>::identity(n, n)).amax();
        if dev > ORTHO_TOL {
            return invalid(format!("columns not orthonormal (deviation {dev:e})"));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ORTHO_TOL {
            return invalid(format!("determinant {det} is not +1"));
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.m.column(j).iter().copied().collect()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} vs SO({})",
                v.len(),
                self.dim()
            )));
        }
        let out = &self.m * nalgebra::DVector::from_column_slice(v);
        Ok(out.iter().copied().collect())
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &Rotation) -> Result<Rotation> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "SO({}) vs SO({})",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Rotation {
            m: &self.m * &other.m,
        })
    }
}

/// SO(n) with its normalized Haar measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationGroup {
    n: usize,
}

impl RotationGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return invalid("SO(n) sampling needs n >= 2");
        }
        Ok(Self { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Haar-distributed orthogonal matrix from a Gaussian table: QR, then
/// flip each column of Q by the sign of the matching diagonal entry of R.
pub(crate) fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let qr = g.qr();
        let r = qr.r();
        if r.diagonal().iter().any(|d| d.abs() < 1e-300) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        return q;
    }
}

impl SampleSpace for RotationGroup {
    type Point = Rotation;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Rotation {
        let mut q = haar_orthogonal(self.n, rng);
        // O(n) -> SO(n): right multiplication by diag(1,..,1,-1) preserves Haar.
        if q.determinant() < 0.0 {
            q.column_mut(self.n - 1).neg_mut();
        }
        Rotation { m: q }
    }
}

/// Draws `count` Haar-uniform rotations of R^n.
pub fn sample_rotation(n: usize, sampler: &SeededSampler, count: usize) -> Result<Vec<Rotation>> {
    let group = RotationGroup::new(n)?;
    if count == 0 {
        return invalid("sample count must be at least 1");
    }
    Ok(sampler.sample(&group, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_n() {
        assert!(sample_rotation(1, &SeededSampler::new(0, 0), 3).is_err());
    }

    #[test]
    fn samples_are_special_orthogonal() {
        for n in [2, 3, 6, 11] {
            for r in sample_rotation(n, &SeededSampler::new(3, n as u64), 200).unwrap() {
                assert!((r.matrix().determinant() - 1.0).abs() < 1e-10);
                Rotation::new(r.matrix().clone()).unwrap();
            }
        }
    }

    #[test]
    fn reflection_is_rejected() {
        let mut m = DMatrix::<f64>::identity(3, 3);
        m[(0, 0)] = -1.0;
        assert!(Rotation::new(m).is_err());
    }

    #[test]
    fn compose_and_apply() {
        let rs = sample_rotation(4, &SeededSampler::new(9, 0), 2).unwrap();
        let ab = rs[0].compose(&rs[1]).unwrap();
        let v = [1.0, 2.0, 3.0, 4.0];
        let lhs = ab.apply(&v).unwrap();
        let rhs = rs[0].apply(&rs[1].apply(&v).unwrap()).unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(ab.apply(&[1.0]).is_err());
    }
}

//! The Grassmannian G(k,n) as a metric-measure space.
//!
//! Points are orthonormal n×k frames. The metric is the Hausdorff distance
//! between the unit spheres of the two planes, measured with chords, which
//! reduces to `2·sin(θ_max/2)` for the largest principal angle `θ_max`.
//! The measure is the push-forward of k independent standard Gaussian
//! vectors under the span map.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::rotation::Rotation;
use super::sampler::{SampleSpace, SeededSampler};
use crate::error::{invalid, Error, Result};

const FRAME_TOL: f64 = 1e-10;
/// Relative size of the smallest R diagonal below which a Gaussian draw
/// is treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// A k-dimensional linear subspace of R^n held as an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    frame: DMatrix<f64>,
}

impl Subspace {
    /// Wraps a frame whose columns are already orthonormal.
    pub fn from_frame(frame: DMatrix<f64>) -> Result<Self> {
        let (n, k) = frame.shape();
        if k == 0 || k > n {
            return invalid(format!("frame shape {n}x{k} needs 1 <= k <= n"));
        }
        let dev = (frame.transpose() * &frame - DMatrix::<f64>::identity(k, k)).amax();
        if !(dev <= FRAME_TOL) {
            return invalid(format!("frame columns not orthonormal (deviation {dev:e})"));
        }
        Ok(Self { frame })
    }

    /// Orthonormalizes the columns of `vectors`; fails when they are
    /// numerically dependent.
    pub fn span(vectors: DMatrix<f64>) -> Result<Self> {
        let (n, k) = vectors.shape();
        if k == 0 || k > n {
            return invalid(format!("cannot span a {k}-plane in R^{n}"));
        }
        orthonormalize(vectors)
            .map(|frame| Self { frame })
            .ok_or_else(|| Error::InvalidInput("spanning vectors are rank deficient".into()))
    }

    /// The plane spanned by the standard basis vectors with the given indices.
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let mut frame = DMatrix::<f64>::zeros(n, axes.len());
        for (j, &i) in axes.iter().enumerate() {
            if i >= n {
                return invalid(format!("axis {i} out of range for R^{n}"));
            }
            frame[(i, j)] = 1.0;
        }
        Self::from_frame(frame)
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// The image of this plane under a rotation.
    pub fn rotated(&self, r: &Rotation) -> Result<Self> {
        if r.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "SO({}) acting on R^{}",
                r.dim(),
                self.ambient_dim()
            )));
        }
        Ok(Self {
            frame: r.matrix() * &self.frame,
        })
    }
}

fn orthonormalize(vectors: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let scale = vectors
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    let qr = vectors.qr();
    let r = qr.r();
    if r.diagonal().iter().any(|d| d.abs() <= RANK_TOL * scale) {
        return None;
    }
    Some(qr.q())
}

/// G(k,n) with the Gaussian push-forward measure. Counts how many draws
/// were rejected as rank deficient.
#[derive(Debug)]
pub struct Grassmannian {
    k: usize,
    n: usize,
    resampled: AtomicUsize,
}

impl Grassmannian {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return invalid(format!("G({k},{n}) needs 1 <= k <= n"));
        }
        Ok(Self {
            k,
            n,
            resampled: AtomicUsize::new(0),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rank-deficient Gaussian draws discarded so far.
    pub fn resampled(&self) -> usize {
        self.resampled.load(Ordering::Relaxed)
    }
}

impl SampleSpace for Grassmannian {
    type Point = Subspace;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Subspace {
        loop {
            let g = DMatrix::<f64>::from_fn(self.n, self.k, |_, _| rng.sample(StandardNormal));
            match orthonormalize(g) {
                Some(frame) => return Subspace { frame },
                None => {
                    self.resampled.fetch_add(1, Ordering::Relaxed);
                }
            }
        }
    }
}

/// Samples from G(k,n) together with the rank-deficiency resample counter.
#[derive(Debug, Clone)]
pub struct GrassmannDraw {
    pub subspaces: Vec<Subspace>,
    pub resampled: usize,
}

/// Draws `count` planes, each the span of k independent standard Gaussian
/// vectors of R^n.
pub fn sample_grassmannian(
    k: usize,
    n: usize,
    sampler: &SeededSampler,
    count: usize,
) -> Result<GrassmannDraw> {
    let space = Grassmannian::new(k, n)?;
    if count == 0 {
        return invalid("sample count must be at least 1");
    }
    let subspaces = sampler.sample(&space, count);
    Ok(GrassmannDraw {
        subspaces,
        resampled: space.resampled(),
    })
}

fn check_compatible(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "G({},{}) vs G({},{})",
            a.dim(),
            a.ambient_dim(),
            b.dim(),
            b.ambient_dim()
        )));
    }
    Ok(())
}

fn sorted_singular_values(m: DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .singular_values()
        .iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Principal angles between two planes of equal dimension, ascending in
/// [0, π/2].
///
/// Cosines are the singular values of `AᵀB`; sines are the singular values
/// of `B − A(AᵀB)`. Small angles are read from the sines, large ones from
/// the cosines, so neither end loses precision to arccos/arcsin.
pub fn principal_angles(a: &Subspace, b: &Subspace) -> Result<Vec<f64>> {
    check_compatible(a, b)?;
    let cross = a.frame.transpose() * &b.frame;
    let residual = &b.frame - &a.frame * &cross;
    let mut cosines = sorted_singular_values(cross);
    cosines.reverse();
    let sines = sorted_singular_values(residual);
    let k = a.dim();
    let mut angles: Vec<f64> = (0..k)
        .map(|i| {
            let (c, s) = (cosines[i], sines[i]);
            if c > std::f64::consts::FRAC_1_SQRT_2 {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect();
    angles.sort_by(|x, y| x.total_cmp(y));
    Ok(angles)
}

/// Sup-distance between the unit spheres of `a` and `b`.
pub fn grassmann_distance(a: &Subspace, b: &Subspace) -> Result<f64> {
    let angles = principal_angles(a, b)?;
    let theta = angles.last().copied().unwrap_or(0.0);
    Ok(2.0 * (theta / 2.0).sin())
}

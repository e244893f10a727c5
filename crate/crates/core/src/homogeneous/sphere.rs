use rand::Rng;
use rand_distr::StandardNormal;

use super::sampler::{SampleSpace, SeededSampler};
use crate::error::{invalid, Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// A point of S^n, stored as a unit vector of R^{n+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Wraps coordinates that already have unit norm.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return invalid("a sphere point needs at least two coordinates");
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return invalid(format!("coordinates have norm {norm}, expected 1"));
        }
        Ok(Self { coords })
    }

    /// Projects a non-zero vector onto the sphere.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        coords.iter_mut().for_each(|c| *c /= norm);
        Self::new(coords)
    }

    /// The point (1, 0, ..., 0) of S^n.
    pub fn pole(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Intrinsic dimension n of the sphere containing this point.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

/// The round sphere S^n ⊂ R^{n+1} with its normalized measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sphere {
    n: usize,
}

impl Sphere {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("sphere dimension must be at least 1");
        }
        Ok(Self { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }
}

impl SampleSpace for Sphere {
    type Point = SpherePoint;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SpherePoint {
        loop {
            let mut v: Vec<f64> = (0..=self.n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 1e-300 {
                v.iter_mut().for_each(|c| *c /= norm);
                return SpherePoint { coords: v };
            }
        }
    }
}

/// Draws `count` uniform points of S^n by normalizing Gaussian vectors.
pub fn sample_sphere(n: usize, sampler: &SeededSampler, count: usize) -> Result<Vec<SpherePoint>> {
    let sphere = Sphere::new(n)?;
    if count == 0 {
        return invalid("sample count must be at least 1");
    }
    Ok(sampler.sample(&sphere, count))
}

/// Geodesic distance on the unit sphere, in [0, π].
///
/// Evaluated as `2·atan2(|x−y|, |x+y|)`, which agrees with the arccos of the
/// inner product but keeps full precision near 0 and π.
pub fn sphere_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    if x.coords.len() != y.coords.len() {
        return Err(Error::DimensionMismatch(format!(
            "S^{} vs S^{}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(unit_vector_angle(&x.coords, &y.coords))
}

pub(crate) fn unit_vector_angle(x: &[f64], y: &[f64]) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

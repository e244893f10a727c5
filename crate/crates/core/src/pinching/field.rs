use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::homogeneous::{grassmann_distance, sample_grassmannian, SeededSampler, Subspace};
use crate::par::Execution;

/// Below this distance two planes count as the same plane.
const DUPLICATE_TOL: f64 = 1e-12;

/// Derived statistics of a non-empty field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldStats {
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// Largest difference quotient over sampled pairs; a lower bound on the
    /// true Lipschitz constant. `None` with fewer than two planes.
    pub lipschitz: Option<f64>,
}

/// Sectional curvature sampled on planes of G(2,n). Values are strictly
/// positive; statistics are computed once, on construction.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    planes: Vec<Subspace>,
    values: Vec<f64>,
    stats: Option<FieldStats>,
}

impl CurvatureField {
    pub fn new(planes: Vec<Subspace>, values: Vec<f64>) -> Result<Self> {
        if planes.len() != values.len() {
            return invalid(format!(
                "{} planes but {} values",
                planes.len(),
                values.len()
            ));
        }
        if let Some(first) = planes.first() {
            let n = first.ambient_dim();
            if planes.iter().any(|p| p.dim() != 2 || p.ambient_dim() != n) {
                return invalid("all planes must be 2-planes of the same R^n");
            }
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return invalid(format!(
                "sectional curvature must be strictly positive, got {v}"
            ));
        }
        let stats = if values.is_empty() {
            None
        } else {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(0.0, f64::max);
            let median = crate::concentration::empirical_median(&values)?;
            let lipschitz = if planes.len() >= 2 {
                Some(max_difference_quotient(&planes, &values)?)
            } else {
                None
            };
            Some(FieldStats {
                min,
                max,
                median,
                lipschitz,
            })
        };
        Ok(Self {
            planes,
            values,
            stats,
        })
    }

    pub fn planes(&self) -> &[Subspace] {
        &self.planes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn stats(&self) -> Option<&FieldStats> {
        self.stats.as_ref()
    }

    pub fn ambient_dim(&self) -> Option<usize> {
        self.planes.first().map(Subspace::ambient_dim)
    }

    /// The field multiplied by a positive constant, e.g. the curvature of
    /// a rescaled metric.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return invalid(format!("scale factor must be positive, got {factor}"));
        }
        let values = self.values.iter().map(|v| v * factor).collect();
        Self::new(self.planes.clone(), values)
    }

    /// The first `len` samples as a field of their own.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        let len = len.min(self.len());
        Self::new(self.planes[..len].to_vec(), self.values[..len].to_vec())
    }
}

fn max_difference_quotient(planes: &[Subspace], values: &[f64]) -> Result<f64> {
    let rows = Execution::Parallel.map_chunks(planes.len(), |i| -> Result<f64> {
        let mut best = 0.0_f64;
        for j in 0..i {
            let d = grassmann_distance(&planes[i], &planes[j])?;
            let dv = (values[i] - values[j]).abs();
            if d <= DUPLICATE_TOL {
                if dv > DUPLICATE_TOL * values[i].max(values[j]) {
                    return Err(Error::InconsistentField(format!(
                        "planes {j} and {i} coincide but carry values {} and {}",
                        values[j], values[i]
                    )));
                }
                continue;
            }
            best = best.max(dv / d);
        }
        Ok(best)
    });
    rows.into_iter().try_fold(0.0_f64, |acc, r| Ok(acc.max(r?)))
}

/// Empirical Lipschitz constant of the field (a lower bound on the true one).
pub fn empirical_lipschitz(field: &CurvatureField) -> Result<f64> {
    field.stats.and_then(|s| s.lipschitz).ok_or_else(|| {
        Error::InvalidInput("empirical Lipschitz constant needs at least two planes".into())
    })
}

/// Pointwise δ-pinching: weak `δ·max ≤ min`, strict `δ·max < min`.
pub fn pointwise_pinched(field: &CurvatureField, delta: f64, strict: bool) -> Result<bool> {
    if !(delta > 0.0 && delta <= 1.0) {
        return invalid(format!("delta must lie in (0, 1], got {delta}"));
    }
    let s = field
        .stats
        .ok_or_else(|| Error::InvalidInput("pinching of an empty field".into()))?;
    Ok(if strict {
        delta * s.max < s.min
    } else {
        delta * s.max <= s.min
    })
}

/// Synthetic fields shipped with the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fixture", rename_all = "kebab-case")]
pub enum FieldFixture {
    /// `K ≡ value`.
    Constant { value: f64 },
    /// `K(p) = base + slope·d(p, p₀)` with `p₀` the plane of the first two
    /// coordinate axes.
    AffineDistance { base: f64, slope: f64 },
    /// `low` within `threshold` of `p₀`, `high` beyond it.
    TwoValue { low: f64, high: f64, threshold: f64 },
}

impl FieldFixture {
    pub fn name(&self) -> &'static str {
        match self {
            FieldFixture::Constant { .. } => "constant",
            FieldFixture::AffineDistance { .. } => "affine-distance",
            FieldFixture::TwoValue { .. } => "two-value",
        }
    }

    pub fn evaluate(&self, plane: &Subspace) -> Result<f64> {
        let reference = || Subspace::coordinate(plane.ambient_dim(), &[0, 1]);
        Ok(match *self {
            FieldFixture::Constant { value } => value,
            FieldFixture::AffineDistance { base, slope } => {
                base + slope * grassmann_distance(plane, &reference()?)?
            }
            FieldFixture::TwoValue {
                low,
                high,
                threshold,
            } => {
                if grassmann_distance(plane, &reference()?)? < threshold {
                    low
                } else {
                    high
                }
            }
        })
    }

    /// Evaluates the fixture on `count` Haar-random planes of G(2,n).
    pub fn generate(
        &self,
        n: usize,
        count: usize,
        sampler: &SeededSampler,
    ) -> Result<CurvatureField> {
        let planes = sample_grassmannian(2, n, sampler, count)?.subspaces;
        let values = planes
            .iter()
            .map(|p| self.evaluate(p))
            .collect::<Result<Vec<_>>>()?;
        CurvatureField::new(planes, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn planes(n: usize, count: usize, seed: u64) -> Vec<Subspace> {
        sample_grassmannian(2, n, &SeededSampler::new(seed, 0), count)
            .unwrap()
            .subspaces
    }

    fn field_with(values: Vec<f64>) -> CurvatureField {
        CurvatureField::new(planes(4, values.len(), 1), values).unwrap()
    }

    #[test]
    fn construction_validates() {
        let p = planes(4, 3, 2);
        assert!(CurvatureField::new(p.clone(), vec![1.0, 2.0]).is_err());
        assert!(CurvatureField::new(p.clone(), vec![1.0, 0.0, 2.0]).is_err());
        assert!(CurvatureField::new(p.clone(), vec![1.0, -1.0, 2.0]).is_err());
        let line = Subspace::coordinate(4, &[0]).unwrap();
        assert!(CurvatureField::new(vec![line], vec![1.0]).is_err());
        let f = CurvatureField::new(p, vec![3.0, 1.0, 2.0]).unwrap();
        let s = f.stats().unwrap();
        assert_eq!((s.min, s.max, s.median), (1.0, 3.0, 2.0));
    }

    #[test]
    fn pinching_cases() {
        assert!(pointwise_pinched(&field_with(vec![2.0; 5]), 1.0, false).unwrap());
        let edge = field_with(vec![1.0, 2.0, 4.0, 3.0]);
        assert!(pointwise_pinched(&edge, 0.25, false).unwrap());
        assert!(!pointwise_pinched(&edge, 0.25, true).unwrap());
        let inside = field_with(vec![1.1, 2.0, 4.0]);
        assert!(pointwise_pinched(&inside, 0.25, true).unwrap());
        assert!(pointwise_pinched(&inside, 0.0, false).is_err());
        assert!(pointwise_pinched(&inside, 1.5, false).is_err());
        let empty = CurvatureField::new(vec![], vec![]).unwrap();
        assert!(pointwise_pinched(&empty, 0.25, false).is_err());
    }

    #[test]
    fn lipschitz_of_constant_field_is_zero() {
        let f = FieldFixture::Constant { value: 2.0 }
            .generate(6, 50, &SeededSampler::new(3, 0))
            .unwrap();
        assert_eq!(empirical_lipschitz(&f).unwrap(), 0.0);
        assert!(empirical_lipschitz(&f.prefix(1).unwrap()).is_err());
    }

    #[test]
    fn lipschitz_of_affine_field_approaches_slope() {
        let c = 1.7;
        let fixture = FieldFixture::AffineDistance {
            base: 5.0,
            slope: c,
        };
        let f = fixture.generate(3, 400, &SeededSampler::new(4, 0)).unwrap();
        let est = empirical_lipschitz(&f).unwrap();
        // Distance to a fixed plane is 1-Lipschitz, so the estimate cannot
        // exceed c; dense sampling in G(2,3) brings it close to c.
        assert!(est <= c * (1.0 + 1e-9));
        assert!(est >= c * 0.95, "estimate {est}");
    }

    #[test]
    fn lipschitz_grows_with_more_pairs() {
        let f = FieldFixture::AffineDistance {
            base: 1.0,
            slope: 0.5,
        }
        .generate(5, 120, &SeededSampler::new(6, 0))
        .unwrap();
        let mut last = 0.0;
        for len in (2..=120).step_by(7) {
            let est = empirical_lipschitz(&f.prefix(len).unwrap()).unwrap();
            assert!(est >= last);
            last = est;
        }
    }

    #[test]
    fn duplicate_planes_with_different_values() {
        let p = planes(4, 1, 9);
        let err =
            CurvatureField::new(vec![p[0].clone(), p[0].clone()], vec![1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::InconsistentField(_)));
        assert!(CurvatureField::new(vec![p[0].clone(), p[0].clone()], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn two_value_fixture() {
        let f = FieldFixture::TwoValue {
            low: 1.0,
            high: 4.0,
            threshold: 1.2,
        }
        .generate(4, 200, &SeededSampler::new(8, 0))
        .unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0 || v == 4.0));
        let s = f.stats().unwrap();
        assert_eq!((s.min, s.max), (1.0, 4.0));
        assert!(pointwise_pinched(&f, 0.25, false).unwrap());
        assert!(!pointwise_pinched(&f, 0.25, true).unwrap());
    }

    proptest! {
        #[test]
        fn pinching_is_scale_invariant(
            values in prop::collection::vec(0.1f64..10.0, 1..12),
            lambda in 1e-3f64..1e3,
            delta in 0.01f64..1.0,
        ) {
            let f = field_with(values);
            let g = f.scaled(1.0 / lambda).unwrap();
            for strict in [false, true] {
                let a = pointwise_pinched(&f, delta, strict).unwrap();
                let b = pointwise_pinched(&g, delta, strict).unwrap();
                // Only a pinching ratio within rounding of delta may flip.
                let s = f.stats().unwrap();
                let margin = (delta * s.max - s.min).abs() / s.min;
                prop_assert!(a == b || margin < 1e-12);
            }
        }

        #[test]
        fn median_interval_implies_quarter_pinching(
            x in 0.1f64..10.0,
            ratio in 0.0f64..0.6,
            fractions in prop::collection::vec(0.0f64..=1.0, 1..10),
        ) {
            let eps = x * ratio;
            prop_assume!(eps > 0.0);
            let q = crate::pinching::median_interval_quarter_pinch(x, eps).unwrap();
            if q.holds {
                let values: Vec<f64> = fractions.iter().map(|t| x - eps + 2.0 * eps * t).collect();
                let f = field_with(values);
                prop_assert!(pointwise_pinched(&f, 0.25, false).unwrap());
            }
        }
    }
}

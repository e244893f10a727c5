//! Finite metric-measure spaces: tubes, tube measures, Hausdorff distance
//! and the exact Gromov–Hausdorff distance for spaces of at most
//! [`GH_MAX_POINTS`] points.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance for symmetry, zero diagonal and the triangle inequality.
pub const METRIC_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-12;
/// Largest space accepted by [`gh_distance_small`].
pub const GH_MAX_POINTS: usize = 7;

/// A validated symmetric distance table over finitely many labelled points,
/// carrying a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetricDocument {
    labels: Vec<serde_json::Value>,
    dist: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validates `dist` (row-major N×N) and `weights` (uniform when absent).
    pub fn new(
        labels: Vec<String>,
        dist: Vec<Vec<f64>>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidMetric("space has no points".into()));
        }
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!(
                "distance table is not {n}x{n}"
            )));
        }
        let flat: Vec<f64> = dist.into_iter().flatten().collect();
        let d = |i: usize, j: usize| flat[i * n + j];
        for i in 0..n {
            if d(i, i).abs() > METRIC_TOL {
                return Err(Error::InvalidMetric(format!(
                    "dist({i},{i}) = {} is not zero",
                    d(i, i)
                )));
            }
            for j in 0..n {
                let v = d(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "dist({i},{j}) = {v} is not a non-negative real"
                    )));
                }
                if (v - d(j, i)).abs() > METRIC_TOL {
                    return Err(Error::InvalidMetric(format!(
                        "dist({i},{j}) != dist({j},{i})"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d(i, j) > d(i, k) + d(k, j) + METRIC_TOL {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: dist({i},{j}) > dist({i},{k}) + dist({k},{j})"
                        )));
                    }
                }
            }
        }
        let weights = match weights {
            None => vec![1.0 / n as f64; n],
            Some(w) => {
                if w.len() != n {
                    return Err(Error::InvalidMetric(format!(
                        "{} weights for {n} points",
                        w.len()
                    )));
                }
                if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::InvalidMetric("weights must be non-negative".into()));
                }
                let total: f64 = w.iter().sum();
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::InvalidMetric(format!(
                        "weights sum to {total}, expected 1"
                    )));
                }
                w
            }
        };
        Ok(Self {
            labels,
            dist: flat,
            weights,
        })
    }

    /// Builds the distance table of `points` under `metric`, labelled by index.
    pub fn from_points<P>(points: &[P], metric: impl Fn(&P, &P) -> f64) -> Result<Self> {
        let dist = points
            .iter()
            .map(|a| points.iter().map(|b| metric(a, b)).collect())
            .collect();
        let labels = (0..points.len()).map(|i| i.to_string()).collect();
        Self::new(labels, dist, None)
    }

    /// Points on the real line with the absolute-difference metric.
    pub fn line(coords: &[f64]) -> Result<Self> {
        Self::from_points(coords, |a, b| (a - b).abs())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MetricDocument = serde_json::from_str(text)?;
        let labels = doc
            .labels
            .into_iter()
            .map(|v| match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            })
            .collect();
        Self::new(labels, doc.dist, doc.weights)
    }

    pub fn to_json(&self) -> String {
        let n = self.len();
        let doc = MetricDocument {
            labels: self
                .labels
                .iter()
                .cloned()
                .map(serde_json::Value::String)
                .collect(),
            dist: (0..n)
                .map(|i| self.dist[i * n..(i + 1) * n].to_vec())
                .collect(),
            weights: Some(self.weights.clone()),
        };
        serde_json::to_string(&doc).expect("metric document serializes")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// `min_{j ∈ subset} dist(i, j)`.
    pub fn distance_to_set(&self, i: usize, subset: &[usize]) -> f64 {
        subset
            .iter()
            .map(|&j| self.dist(i, j))
            .fold(f64::INFINITY, f64::min)
    }

    fn check_subset(&self, subset: &[usize], what: &str) -> Result<()> {
        if subset.is_empty() {
            return invalid(format!("{what} is empty"));
        }
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.len()) {
            return invalid(format!(
                "{what} contains index {bad} outside a {}-point space",
                self.len()
            ));
        }
        Ok(())
    }
}

/// A subset Y of a finite space together with a radius ε.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodQuery {
    subset: Vec<usize>,
    epsilon: f64,
}

impl NeighborhoodQuery {
    pub fn new(subset: Vec<usize>, epsilon: f64) -> Result<Self> {
        if subset.is_empty() {
            return invalid("neighborhood query needs a non-empty subset");
        }
        if !(epsilon >= 0.0) {
            return invalid(format!("epsilon must be non-negative, got {epsilon}"));
        }
        Ok(Self { subset, epsilon })
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Indices of the closed ε-neighborhood `Y + ε`, ascending.
pub fn tube(space: &FiniteMetricSpace, q: &NeighborhoodQuery) -> Result<Vec<usize>> {
    space.check_subset(&q.subset, "tube subset")?;
    Ok((0..space.len())
        .filter(|&i| space.distance_to_set(i, &q.subset) <= q.epsilon)
        .collect())
}

/// Measure of `Y + ε` under the space's weights.
pub fn tube_measure(space: &FiniteMetricSpace, q: &NeighborhoodQuery) -> Result<f64> {
    Ok(tube(space, q)?.into_iter().map(|i| space.weights[i]).sum())
}

/// Hausdorff distance between two index sets, as the larger of the two
/// directed sup-min distances.
pub fn hausdorff_distance(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    space.check_subset(a, "first set")?;
    space.check_subset(b, "second set")?;
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&i| space.distance_to_set(i, to))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Exact Gromov–Hausdorff distance: half the least distortion of a
/// correspondence between `x` and `y`.
///
/// Every correspondence contains one made of a map `X → Y` plus one
/// preimage for each point of Y the map misses, and distortion only grows
/// with the relation, so the search runs over those with branch and bound.
pub fn gh_distance_small(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    for s in [x, y] {
        if s.len() > GH_MAX_POINTS {
            return Err(Error::TooLarge {
                size: s.len(),
                cap: GH_MAX_POINTS,
            });
        }
    }
    let mut search = CorrespondenceSearch {
        x,
        y,
        pairs: Vec::with_capacity(x.len() + y.len()),
        covered: vec![0; y.len()],
        best: f64::INFINITY,
    };
    search.assign_x(0, 0.0);
    Ok(search.best / 2.0)
}

struct CorrespondenceSearch<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    pairs: Vec<(usize, usize)>,
    covered: Vec<usize>,
    best: f64,
}

impl CorrespondenceSearch<'_> {
    fn added_distortion(&self, i: usize, j: usize) -> f64 {
        self.pairs
            .iter()
            .map(|&(a, b)| (self.x.dist(i, a) - self.y.dist(j, b)).abs())
            .fold(0.0, f64::max)
    }

    fn assign_x(&mut self, i: usize, current: f64) {
        if i == self.x.len() {
            self.cover_y(0, current);
            return;
        }
        for j in 0..self.y.len() {
            let next = current.max(self.added_distortion(i, j));
            if next >= self.best {
                continue;
            }
            self.pairs.push((i, j));
            self.covered[j] += 1;
            self.assign_x(i + 1, next);
            self.covered[j] -= 1;
            self.pairs.pop();
        }
    }

    fn cover_y(&mut self, j: usize, current: f64) {
        if j == self.y.len() {
            self.best = current;
            return;
        }
        if self.covered[j] > 0 {
            self.cover_y(j + 1, current);
            return;
        }
        for i in 0..self.x.len() {
            let next = current.max(self.added_distortion(i, j));
            if next >= self.best {
                continue;
            }
            self.pairs.push((i, j));
            self.cover_y(j + 1, next);
            self.pairs.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_tables() {
        let l = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        assert!(FiniteMetricSpace::new(vec![], vec![], None).is_err());
        assert!(FiniteMetricSpace::new(l(2), vec![vec![0.0, 1.0], vec![2.0, 0.0]], None).is_err());
        assert!(FiniteMetricSpace::new(l(2), vec![vec![0.5, 1.0], vec![1.0, 0.0]], None).is_err());
        assert!(
            FiniteMetricSpace::new(l(2), vec![vec![0.0, -1.0], vec![-1.0, 0.0]], None).is_err()
        );
        let broken = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        assert!(matches!(
            FiniteMetricSpace::new(l(3), broken, None),
            Err(Error::InvalidMetric(_))
        ));
        let ok = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(FiniteMetricSpace::new(l(2), ok.clone(), Some(vec![0.5, 0.6])).is_err());
        assert!(FiniteMetricSpace::new(l(2), ok, Some(vec![0.25, 0.75])).is_ok());
    }

    #[test]
    fn tube_on_a_line() {
        let s = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
        let q = NeighborhoodQuery::new(vec![0], 1.0).unwrap();
        assert_eq!(tube(&s, &q).unwrap(), vec![0, 1]);
        let q0 = NeighborhoodQuery::new(vec![2], 0.0).unwrap();
        assert_eq!(tube(&s, &q0).unwrap(), vec![2]);
    }

    #[test]
    fn tube_measures() {
        let s = FiniteMetricSpace::line(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let m = |sub: Vec<usize>, e: f64| {
            tube_measure(&s, &NeighborhoodQuery::new(sub, e).unwrap()).unwrap()
        };
        assert_eq!(m(vec![1, 3], 0.0), 0.5);
        assert_eq!(m(vec![0], 2.0), 0.75);
        for e in [0.0, 0.3, 10.0] {
            assert!((m(vec![0, 1, 2, 3], e) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_subsets_are_rejected() {
        let s = FiniteMetricSpace::line(&[0.0, 1.0]).unwrap();
        assert!(NeighborhoodQuery::new(vec![], 1.0).is_err());
        assert!(NeighborhoodQuery::new(vec![0], -1.0).is_err());
        assert!(hausdorff_distance(&s, &[], &[0]).is_err());
        assert!(hausdorff_distance(&s, &[0], &[5]).is_err());
    }

    #[test]
    fn hausdorff_simple() {
        let s = FiniteMetricSpace::line(&[0.0, 1.0, 4.0]).unwrap();
        assert_eq!(hausdorff_distance(&s, &[0, 2], &[0, 2]).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&s, &[0], &[0, 1]).unwrap(), 1.0);
        assert_eq!(hausdorff_distance(&s, &[0, 1], &[0]).unwrap(), 1.0);
    }

    #[test]
    fn gh_two_point_spaces() {
        let a = FiniteMetricSpace::line(&[0.0, 1.0]).unwrap();
        let b = FiniteMetricSpace::line(&[0.0, 3.0]).unwrap();
        assert_eq!(gh_distance_small(&a, &b).unwrap(), 1.0);
        let p = FiniteMetricSpace::line(&[0.0]).unwrap();
        let c = FiniteMetricSpace::line(&[0.0, 2.0]).unwrap();
        assert_eq!(gh_distance_small(&p, &c).unwrap(), 1.0);
        assert_eq!(gh_distance_small(&c, &p).unwrap(), 1.0);
    }

    #[test]
    fn gh_of_a_relabelled_copy_is_zero() {
        let a = FiniteMetricSpace::line(&[0.0, 1.0, 3.5, 7.0, 7.25]).unwrap();
        let b = FiniteMetricSpace::line(&[7.25, 0.0, 3.5, 1.0, 7.0]).unwrap();
        assert_eq!(gh_distance_small(&a, &b).unwrap(), 0.0);
        assert_eq!(gh_distance_small(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn gh_refuses_large_spaces() {
        let big = FiniteMetricSpace::line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        let small = FiniteMetricSpace::line(&[0.0]).unwrap();
        assert!(matches!(
            gh_distance_small(&big, &small),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn json_roundtrip() {
        let text =
            r#"{"labels":["a","b",3],"dist":[[0,1,2],[1,0,1],[2,1,0]],"weights":[0.5,0.25,0.25]}"#;
        let s = FiniteMetricSpace::from_json(text).unwrap();
        assert_eq!(s.labels()[2], "3");
        assert_eq!(s.dist(0, 2), 2.0);
        let back = FiniteMetricSpace::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let no_weights = r#"{"labels":["a","b"],"dist":[[0,1],[1,0]]}"#;
        assert_eq!(
            FiniteMetricSpace::from_json(no_weights).unwrap().weights(),
            &[0.5, 0.5]
        );
    }
}

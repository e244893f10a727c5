#![allow(dead_code)]

use mmlab::metric::FiniteMetricSpace;
use rand::Rng;

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_one_sample(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Tabulated CDF of the density ∝ (1 − t²)^p on [−1, 1], by Simpson's rule.
pub struct CoordinateCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl CoordinateCdf {
    pub fn new(p: f64, cells: usize) -> Self {
        let density = |t: f64| (1.0 - t * t).max(0.0).powf(p);
        let h = 2.0 / cells as f64;
        let mut grid = vec![-1.0];
        let mut cdf = vec![0.0];
        for i in 0..cells {
            let a = -1.0 + i as f64 * h;
            let prev = *cdf.last().unwrap();
            cdf.push(prev + simpson(density, a, a + h, 8));
            grid.push(a + h);
        }
        let total = *cdf.last().unwrap();
        cdf.iter_mut().for_each(|c| *c /= total);
        Self { grid, cdf }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= -1.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let h = self.grid[1] - self.grid[0];
        let i = (((t + 1.0) / h) as usize).min(self.grid.len() - 2);
        let w = (t - self.grid[i]) / h;
        self.cdf[i] * (1.0 - w) + self.cdf[i + 1] * w
    }
}

pub fn random_plane_space<R: Rng>(rng: &mut R, max_points: usize) -> FiniteMetricSpace {
    let size = rng.random_range(1..=max_points);
    let pts: Vec<[f64; 2]> = (0..size).map(|_| [rng.random(), rng.random()]).collect();
    FiniteMetricSpace::from_points(&pts, |a, b| (a[0] - b[0]).hypot(a[1] - b[1])).unwrap()
}

fn all_maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..from {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..to).map(move |j| {
                    let mut next = m.clone();
                    next.push(j);
                    next
                })
            })
            .collect();
    }
    out
}

/// Gromov–Hausdorff distance by exhaustive enumeration.
///
/// Each correspondence R contains the union of the graph of some f: X → Y
/// and the reversed graph of some g: Y → X, and that union is itself a
/// correspondence with no larger distortion. Enumerating every pair (f, g)
/// therefore reaches the optimum.
pub fn gh_oracle(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (nx, ny) = (x.len(), y.len());
    let dis_pairs = |p: &[(usize, usize)], q: &[(usize, usize)]| {
        let mut d = 0.0f64;
        for &(a, b) in p {
            for &(c, e) in q {
                d = d.max((x.dist(a, c) - y.dist(b, e)).abs());
            }
        }
        d
    };
    let fs: Vec<Vec<(usize, usize)>> = all_maps(nx, ny)
        .into_iter()
        .map(|f| f.into_iter().enumerate().collect())
        .collect();
    let gs: Vec<Vec<(usize, usize)>> = all_maps(ny, nx)
        .into_iter()
        .map(|g| g.into_iter().enumerate().map(|(j, i)| (i, j)).collect())
        .collect();
    let dis_f: Vec<f64> = fs.iter().map(|f| dis_pairs(f, f)).collect();
    let dis_g: Vec<f64> = gs.iter().map(|g| dis_pairs(g, g)).collect();
    let mut best = f64::INFINITY;
    for (f, df) in fs.iter().zip(&dis_f) {
        for (g, dg) in gs.iter().zip(&dis_g) {
            let base = df.max(*dg);
            if base >= best {
                continue;
            }
            best = best.min(base.max(dis_pairs(f, g)));
        }
    }
    best / 2.0
}

/// Point at fraction `t` along the minimizing great-circle arc from x to y.
pub fn slerp(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    let theta = angle(x, y);
    let s = theta.sin();
    let (a, b) = (((1.0 - t) * theta).sin() / s, (t * theta).sin() / s);
    x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
}

/// Angle between unit vectors, via atan2 of chord lengths.
pub fn angle(x: &[f64], y: &[f64]) -> f64 {
    let diff: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let sum: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a + b) * (a + b))
        .sum::<f64>()
        .sqrt();
    2.0 * diff.atan2(sum)
}

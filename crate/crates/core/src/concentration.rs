//! Empirical concentration estimators on sampled metric-measure spaces.
//!
//! Profiles count `|f − m| > ε` over a seeded sample; waists measure the
//! ε-tube around a level band of `f` with a second, independent stream.
//! [`verify_chain`] checks `π ≤ 2α`, `1 − 2α ≤ w` and `w ≤ 1 − π` on a
//! shared ε grid.

use serde::Serialize;

use crate::bounds::{sharp_tail, BoundCurve};
use crate::error::{invalid, Error, Result};
use crate::homogeneous::{SampleSpace, SeededSampler};

/// Smallest sample count accepted by [`estimate_profile`].
pub const MIN_PROFILE_SAMPLES: usize = 100;
/// Smallest sample count accepted by [`estimate_waist`].
pub const MIN_WAIST_SAMPLES: usize = 10_000;
/// Quantile of `|f − m|` used as the default level-band half-width.
pub const DEFAULT_BAND_QUANTILE: f64 = 0.01;
/// Stream tag for the second waist stage.
const WAIST_STAGE_TAG: u64 = 0x7761_6973;

/// Sampled values of a function, optionally with the points themselves.
#[derive(Debug, Clone)]
pub struct ScalarSampleSet<P> {
    pub points: Vec<P>,
    pub values: Vec<f64>,
    pub meta: SampleMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleMeta {
    pub seed: u64,
    pub stream_id: u64,
    pub space: String,
    pub count: usize,
}

/// Draws `count` points and evaluates `f` on each.
pub fn collect_samples<S, F>(
    space: &S,
    descriptor: &str,
    f: F,
    sampler: &SeededSampler,
    count: usize,
) -> Result<ScalarSampleSet<S::Point>>
where
    S: SampleSpace,
    F: Fn(&S::Point) -> f64 + Sync + Send,
{
    if count < 2 {
        return invalid("a sample set needs at least two samples");
    }
    let (points, values): (Vec<_>, Vec<_>) = sampler
        .map_samples(space, count, |p| {
            let v = f(&p);
            (p, v)
        })
        .into_iter()
        .unzip();
    Ok(ScalarSampleSet {
        points,
        values,
        meta: SampleMeta {
            seed: sampler.seed,
            stream_id: sampler.stream_id,
            space: descriptor.to_string(),
            count,
        },
    })
}

/// Median of the empirical measure. Even lengths return the midpoint of
/// the two central order statistics.
pub fn empirical_median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return invalid("median of an empty sample");
    }
    if values.iter().any(|v| v.is_nan()) {
        return invalid("median of a sample containing NaN");
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

/// Binomial standard error of a fraction estimated from `n` draws.
pub fn binomial_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ProfileKind {
    Empirical,
    AnalyticBound,
}

/// Tail fractions `μ(|f − m| > ε)` over an ascending ε grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationProfile {
    pub epsilons: Vec<f64>,
    pub tail_fractions: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub kind: ProfileKind,
    pub median: Option<f64>,
    pub samples: Option<usize>,
}

impl ConcentrationProfile {
    /// An analytic profile tabulated from a bound curve.
    pub fn from_curve(curve: &BoundCurve, epsilons: &[f64]) -> Result<Self> {
        check_grid(epsilons)?;
        Ok(Self {
            epsilons: epsilons.to_vec(),
            tail_fractions: curve.tabulate(epsilons),
            stderrs: vec![0.0; epsilons.len()],
            kind: ProfileKind::AnalyticBound,
            median: None,
            samples: None,
        })
    }

    /// Empirical profile of already-evaluated function values.
    pub fn from_values(values: &[f64], epsilons: &[f64]) -> Result<Self> {
        check_grid(epsilons)?;
        if values.len() < 2 {
            return invalid("profile needs at least two values");
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Estimator(format!(
                "function returned non-finite value {bad}"
            )));
        }
        let median = empirical_median(values)?;
        let mut dev: Vec<f64> = values.iter().map(|v| (v - median).abs()).collect();
        dev.sort_by(|a, b| a.total_cmp(b));
        let n = values.len();
        let tail_fractions: Vec<f64> = epsilons
            .iter()
            .map(|&e| (n - dev.partition_point(|&d| d <= e)) as f64 / n as f64)
            .collect();
        let stderrs = tail_fractions
            .iter()
            .map(|&p| binomial_stderr(p, n))
            .collect();
        Ok(Self {
            epsilons: epsilons.to_vec(),
            tail_fractions,
            stderrs,
            kind: ProfileKind::Empirical,
            median: Some(median),
            samples: Some(n),
        })
    }
}

pub(crate) fn check_grid(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return invalid("epsilon grid is empty");
    }
    if epsilons.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return invalid("epsilon grid must be positive and finite");
    }
    if epsilons.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("epsilon grid must be strictly increasing");
    }
    Ok(())
}

/// Monte Carlo concentration profile of `f` under the space's measure.
pub fn estimate_profile<S, F>(
    space: &S,
    f: F,
    sampler: &SeededSampler,
    epsilons: &[f64],
    count: usize,
) -> Result<ConcentrationProfile>
where
    S: SampleSpace,
    F: Fn(&S::Point) -> f64 + Sync + Send,
{
    if count < MIN_PROFILE_SAMPLES {
        return invalid(format!(
            "profile needs N >= {MIN_PROFILE_SAMPLES}, got {count}"
        ));
    }
    check_grid(epsilons)?;
    let values = sampler.map_samples(space, count, |p| f(&p));
    ConcentrationProfile::from_values(&values, epsilons)
}

/// Isoperimetric function of S^n on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoperimetricTable {
    pub n: usize,
    pub epsilons: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// `α(ε) = ½(1 − ratio(n, ε))`: the mass a half-sphere's ε-neighborhood
/// misses. Half-spheres are extremal, so this is exact; zero for ε ≥ π/2.
pub fn estimate_isoperimetric_sphere(n: usize, epsilons: &[f64]) -> Result<IsoperimetricTable> {
    if n < 2 {
        return invalid("isoperimetric table needs n >= 2");
    }
    let alpha = epsilons
        .iter()
        .map(|&e| {
            if !(e >= 0.0) {
                return invalid(format!("epsilon must be non-negative, got {e}"));
            }
            Ok(0.5 * sharp_tail(n, e)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IsoperimetricTable {
        n,
        epsilons: epsilons.to_vec(),
        alpha,
    })
}

/// How stage 2 of [`estimate_waist`] measures the distance from a fresh
/// sample to the level band `P = {x : |f(x) − m| ≤ δ}`.
pub enum BandDistance<'a, P> {
    /// Nearest stage-1 band sample under the given metric. A fresh sample
    /// whose own value lies in the band is at distance 0. If `f` is
    /// 1-Lipschitz for this metric, pass `lipschitz_pruning = true` to skip
    /// samples with `|f(x) − m| − δ` beyond the grid.
    PointCloud {
        metric: &'a (dyn Fn(&P, &P) -> f64 + Sync),
        lipschitz_pruning: bool,
    },
    /// Closed-form distance to the band, given `(x, m, δ)`.
    Exact(&'a (dyn Fn(&P, f64, f64) -> f64 + Sync)),
}

/// Tube measures around an empirical level band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaistEstimate {
    pub epsilons: Vec<f64>,
    pub tube_measures: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Half-width δ of the level band standing in for `f⁻¹(m)`.
    pub level_band_delta: f64,
    pub median: f64,
    /// Stage-1 samples that fell in the band.
    pub band_size: usize,
    /// Fraction of stage-1 samples in the band. The tube around the band is
    /// larger than the tube around `f⁻¹(m)`, by roughly this much mass for
    /// distance-like functions.
    pub band_mass: f64,
    pub samples: usize,
}

/// Two-stage 1-waist estimator.
///
/// Stage 1 draws `count` samples, takes their median `m` and keeps the band
/// `|f − m| ≤ δ` (δ defaults to the 1% quantile of `|f − m|`). Stage 2 draws
/// `count` fresh samples on a forked stream and reports, for each ε, the
/// fraction lying within ε of the band.
pub fn estimate_waist<S, F>(
    space: &S,
    f: F,
    distance: BandDistance<'_, S::Point>,
    sampler: &SeededSampler,
    epsilons: &[f64],
    count: usize,
    delta: Option<f64>,
) -> Result<WaistEstimate>
where
    S: SampleSpace,
    S::Point: Sync,
    F: Fn(&S::Point) -> f64 + Sync + Send,
{
    if count < MIN_WAIST_SAMPLES {
        return invalid(format!("waist needs N >= {MIN_WAIST_SAMPLES}, got {count}"));
    }
    check_grid(epsilons)?;
    if let Some(d) = delta {
        if !(d > 0.0) || !d.is_finite() {
            return invalid(format!("level-band delta must be positive, got {d}"));
        }
    }
    let values = sampler.map_samples(space, count, |p| f(&p));
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Estimator(format!(
            "function returned non-finite value {bad}"
        )));
    }
    let median = empirical_median(&values)?;
    let delta = match delta {
        Some(d) => d,
        None => {
            let mut dev: Vec<f64> = values.iter().map(|v| (v - median).abs()).collect();
            dev.sort_by(|a, b| a.total_cmp(b));
            let idx = ((DEFAULT_BAND_QUANTILE * count as f64).ceil() as usize).clamp(1, count) - 1;
            dev[idx]
        }
    };
    let in_band = |v: f64| (v - median).abs() <= delta;
    let band_size = values.iter().filter(|&&v| in_band(v)).count();
    if band_size == 0 {
        return Err(Error::Estimator(format!(
            "no sample within delta = {delta} of the median {median}; increase delta or N"
        )));
    }
    let max_eps = *epsilons.last().expect("grid checked non-empty");

    let fresh = sampler.fork(WAIST_STAGE_TAG);
    let mut distances: Vec<f64> = match distance {
        BandDistance::Exact(dist) => fresh.map_samples(space, count, |p| dist(&p, median, delta)),
        BandDistance::PointCloud {
            metric,
            lipschitz_pruning,
        } => {
            let band: Vec<S::Point> = sampler
                .map_samples(
                    space,
                    count,
                    |p| if in_band(f(&p)) { Some(p) } else { None },
                )
                .into_iter()
                .flatten()
                .collect();
            fresh.map_samples(space, count, |p| {
                let v = f(&p);
                if in_band(v) {
                    return 0.0;
                }
                if lipschitz_pruning && (v - median).abs() - delta > max_eps {
                    return f64::INFINITY;
                }
                band.iter()
                    .map(|b| metric(&p, b))
                    .fold(f64::INFINITY, f64::min)
            })
        }
    };
    if distances.iter().any(|d| d.is_nan()) {
        return Err(Error::Estimator("band distance returned NaN".into()));
    }
    distances.sort_by(|a, b| a.total_cmp(b));
    let tube_measures: Vec<f64> = epsilons
        .iter()
        .map(|&e| distances.partition_point(|&d| d <= e) as f64 / count as f64)
        .collect();
    let stderrs = tube_measures
        .iter()
        .map(|&w| binomial_stderr(w, count))
        .collect();
    Ok(WaistEstimate {
        epsilons: epsilons.to_vec(),
        tube_measures,
        stderrs,
        level_band_delta: delta,
        median,
        band_size,
        band_mass: band_size as f64 / count as f64,
        samples: count,
    })
}

/// One grid point of a chain check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    pub epsilon: f64,
    pub tail: f64,
    pub waist: f64,
    pub alpha: f64,
    /// `π ≤ 2α`.
    pub tail_below_twice_alpha: bool,
    /// `w ≥ 1 − 2α`.
    pub waist_above_isoperimetric: bool,
    /// `w ≤ 1 − π`.
    pub waist_below_concentration: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub rows: Vec<ChainRow>,
    pub sigmas: f64,
    pub pass: bool,
}

/// Standard error with the estimated fraction kept at least one draw away
/// from 0 and 1, so an all-or-nothing count still gets a tolerance.
fn floored_stderr(p: f64, n: Option<usize>) -> f64 {
    match n {
        Some(n) if n > 0 => {
            let floor = 1.0 / n as f64;
            binomial_stderr(p.clamp(floor, 1.0 - floor), n)
        }
        _ => 0.0,
    }
}

/// Checks the isoperimetry ⇒ waist ⇒ concentration chain pointwise.
///
/// Each comparison allows `sigmas` combined standard errors. The upper
/// waist relation also allows the waist's band mass, which bounds the
/// upward bias of measuring tubes around a band instead of a level set.
pub fn verify_chain(
    profile: &ConcentrationProfile,
    waist: &WaistEstimate,
    alpha: &IsoperimetricTable,
    sigmas: f64,
) -> Result<ChainReport> {
    let same = |a: &[f64], b: &[f64]| {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(1.0))
    };
    if !same(&profile.epsilons, &waist.epsilons) || !same(&profile.epsilons, &alpha.epsilons) {
        return invalid("profile, waist and isoperimetric table must share one epsilon grid");
    }
    if !(sigmas >= 0.0) {
        return invalid("tolerance must be a non-negative number of standard errors");
    }
    let rows: Vec<ChainRow> = (0..profile.epsilons.len())
        .map(|i| {
            let (p, w, a) = (
                profile.tail_fractions[i],
                waist.tube_measures[i],
                alpha.alpha[i],
            );
            let se_p = floored_stderr(p, profile.samples);
            let se_w = floored_stderr(w, Some(waist.samples));
            let se_pw = (se_p * se_p + se_w * se_w).sqrt();
            ChainRow {
                epsilon: profile.epsilons[i],
                tail: p,
                waist: w,
                alpha: a,
                tail_below_twice_alpha: p <= 2.0 * a + sigmas * se_p,
                waist_above_isoperimetric: w >= 1.0 - 2.0 * a - sigmas * se_w,
                waist_below_concentration: w <= 1.0 - p + sigmas * se_pw + waist.band_mass,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| {
        r.tail_below_twice_alpha && r.waist_above_isoperimetric && r.waist_below_concentration
    });
    Ok(ChainReport { rows, sigmas, pass })
}

/// Tail bound for the push-forward of the measure under an
/// `lipschitz`-Lipschitz map: the value at ε becomes the value at
/// `lipschitz·ε`.
pub fn pushforward_profile(
    profile: &ConcentrationProfile,
    lipschitz: f64,
) -> Result<ConcentrationProfile> {
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return invalid(format!(
            "Lipschitz constant must be positive, got {lipschitz}"
        ));
    }
    Ok(ConcentrationProfile {
        epsilons: profile.epsilons.iter().map(|e| e * lipschitz).collect(),
        tail_fractions: profile.tail_fractions.clone(),
        stderrs: vec![0.0; profile.epsilons.len()],
        kind: ProfileKind::AnalyticBound,
        median: None,
        samples: None,
    })
}

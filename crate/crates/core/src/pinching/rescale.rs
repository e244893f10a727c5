use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Curvature lower bound, diameter and volume of a manifold of dimension n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleData {
    pub n: usize,
    pub curvature: f64,
    pub diameter: f64,
    pub volume: f64,
}

/// Factors by which `g ↦ λg` multiplies curvature, diameter and volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescaledQuantities {
    pub lambda: f64,
    pub curvature_scale: f64,
    pub diameter_scale: f64,
    pub volume_scale: f64,
}

impl RescaledQuantities {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return invalid(format!("lambda must be positive, got {lambda}"));
        }
        Ok(Self {
            lambda,
            curvature_scale: lambda.recip(),
            diameter_scale: lambda.sqrt(),
            volume_scale: lambda.powf(n as f64 / 2.0),
        })
    }
}

/// Applies `g ↦ λg`: `k ↦ k/λ`, `d ↦ √λ·d`, `vol ↦ λ^{n/2}·vol`.
pub fn rescale(data: ScaleData, lambda: f64) -> Result<ScaleData> {
    if data.n == 0 {
        return invalid("dimension must be positive");
    }
    for (name, v) in [
        ("curvature", data.curvature),
        ("diameter", data.diameter),
        ("volume", data.volume),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return invalid(format!("{name} must be positive, got {v}"));
        }
    }
    let q = RescaledQuantities::new(data.n, lambda)?;
    Ok(ScaleData {
        n: data.n,
        curvature: data.curvature * q.curvature_scale,
        diameter: data.diameter * q.diameter_scale,
        volume: data.volume * q.volume_scale,
    })
}

/// The λ with `k/λ = (5/6)·√λ·d`, i.e. `λ = (6k/(5d))^{2/3}`.
pub fn normalize_to_five_sixths(curvature: f64, diameter: f64) -> Result<f64> {
    if !(curvature > 0.0) || !(diameter > 0.0) || !curvature.is_finite() || !diameter.is_finite() {
        return invalid("curvature and diameter must be positive");
    }
    let lambda = (6.0 * curvature / (5.0 * diameter)).powf(2.0 / 3.0);
    let after = rescale(
        ScaleData {
            n: 1,
            curvature,
            diameter,
            volume: 1.0,
        },
        lambda,
    )?;
    let target = 5.0 * after.diameter / 6.0;
    if ((after.curvature - target) / target).abs() > 1e-12 {
        return Err(Error::Estimator(format!(
            "normalization missed: k' = {}, 5d'/6 = {target}",
            after.curvature
        )));
    }
    Ok(lambda)
}

/// Outcome of the median-interval test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarterPinch {
    pub holds: bool,
    /// `(x − ε)/(x + ε)`: the worst pinching ratio of values in `[x−ε, x+ε]`.
    pub ratio: f64,
}

/// Whether every set of values inside `[x − ε, x + ε]` is weakly
/// ¼-pinched: `x − ε > 0` and `x − ε ≥ ¼(x + ε)`, i.e. `x ≥ 5ε/3`.
///
/// The comparison allows a few ulps so that the boundary case
/// `x = 5d/6, ε = d/2` is accepted despite rounding in `5d/6`.
pub fn median_interval_quarter_pinch(x: f64, eps: f64) -> Result<QuarterPinch> {
    if !(eps > 0.0) || !eps.is_finite() || !x.is_finite() {
        return invalid(format!(
            "need finite x and eps > 0, got x = {x}, eps = {eps}"
        ));
    }
    let lower = x - eps;
    let upper = x + eps;
    let holds = lower > 0.0 && 4.0 * lower >= upper * (1.0 - 8.0 * f64::EPSILON);
    Ok(QuarterPinch {
        holds,
        ratio: lower / upper,
    })
}

fn least_integer_above(threshold: f64) -> Result<u64> {
    if threshold >= u64::MAX as f64 {
        return invalid(format!("bound {threshold} is not representable"));
    }
    Ok(threshold.floor() as u64 + 1)
}

/// Least integer `n > 16·ln2/d² + 1`.
///
/// This is the closed form `N₁` as usually quoted. Solving
/// `2·exp(−(n−1)ε²/8) < 1` at `ε = d/2` gives `32·ln2/d² + 1` instead, so
/// `N₁` guarantees the inequality only at `ε = d/√2`. Use
/// [`inequality_dimension_bound`] for the bound at an arbitrary `ε`.
pub fn dimension_bound_n1(diameter: f64) -> Result<u64> {
    if !(diameter > 0.0) || !diameter.is_finite() {
        return invalid(format!("diameter must be positive, got {diameter}"));
    }
    least_integer_above(16.0 * std::f64::consts::LN_2 / (diameter * diameter) + 1.0)
}

/// Least integer `n > 8·ln2/ε² + 1`, the exact solution of
/// `2·exp(−(n−1)ε²/8) < 1`.
pub fn inequality_dimension_bound(eps: f64) -> Result<u64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    least_integer_above(8.0 * std::f64::consts::LN_2 / (eps * eps) + 1.0)
}

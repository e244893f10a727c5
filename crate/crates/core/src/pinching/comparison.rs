//! Triangle comparison against the sphere of constant curvature κ.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack for side-length constraints, relative to the model's diameter.
const SIDE_TOL: f64 = 1e-12;
/// Allowed shortfall of the query distance below the model distance.
pub const COMPARISON_TOL: f64 = 1e-9;

/// Distances among x, y, z, v ∈ [x,y], w ∈ [x,z], and the query `d(v,w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonConfig {
    pub kappa: f64,
    pub d_xy: f64,
    pub d_xz: f64,
    pub d_yz: f64,
    pub d_xv: f64,
    pub d_xw: f64,
    pub d_vw: f64,
}

/// Model-space distance `d(v′,w′)` against the measured `d(v,w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub model_distance: f64,
    pub query_distance: f64,
    /// `d(v,w) − d(v′,w′)`; non-negative in spaces with curvature ≥ κ.
    pub residual: f64,
    pub passes: bool,
}

fn hav(t: f64) -> f64 {
    let s = (0.5 * t).sin();
    s * s
}

impl ComparisonConfig {
    fn validate(&self) -> Result<()> {
        let no = |msg: String| Err(Error::NoComparisonTriangle(msg));
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return no(format!("kappa must be positive, got {}", self.kappa));
        }
        let all = [
            self.d_xy, self.d_xz, self.d_yz, self.d_xv, self.d_xw, self.d_vw,
        ];
        if all.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return no("distances must be non-negative reals".into());
        }
        let diameter = PI / self.kappa.sqrt();
        let slack = SIDE_TOL * diameter;
        let (a, b, c) = (self.d_xy, self.d_xz, self.d_yz);
        if a > b + c + slack || b > a + c + slack || c > a + b + slack {
            return no(format!(
                "sides {a}, {b}, {c} violate the triangle inequality"
            ));
        }
        if a.max(b).max(c) > diameter + slack {
            return no(format!("a side exceeds the model diameter {diameter}"));
        }
        if a + b + c > 2.0 * diameter + slack {
            return no(format!("perimeter {} exceeds 2π/√κ", a + b + c));
        }
        if self.d_xv > a + slack || self.d_xw > b + slack {
            return no("v and w must lie on the sides xy and xz".into());
        }
        Ok(())
    }
}

/// Builds the comparison triangle on the κ-sphere and measures `d(v′,w′)`.
///
/// Uses the haversine form of the spherical law of cosines,
/// `hav c = hav(a−b) + sin a sin b hav γ`, which stays accurate for short
/// sides and thin triangles.
pub fn toponogov_compare(cfg: &ComparisonConfig) -> Result<Comparison> {
    cfg.validate()?;
    let s = cfg.kappa.sqrt();
    let a = (s * cfg.d_xy).min(PI);
    let b = (s * cfg.d_xz).min(PI);
    let c = (s * cfg.d_yz).min(PI);
    let p = (s * cfg.d_xv).min(a);
    let q = (s * cfg.d_xw).min(b);
    let denom = a.sin() * b.sin();
    // Degenerate sides leave the angle at x free; v′ or w′ then sits on x′
    // or on a segment through z′, and γ = 0 is the consistent choice.
    let hav_gamma = if denom > 0.0 {
        ((hav(c) - hav(a - b)) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let hav_d = (hav(p - q) + p.sin() * q.sin() * hav_gamma).clamp(0.0, 1.0);
    let model = 2.0 * hav_d.sqrt().asin() / s;
    let residual = cfg.d_vw - model;
    Ok(Comparison {
        model_distance: model,
        query_distance: cfg.d_vw,
        residual,
        passes: residual >= -COMPARISON_TOL,
    })
}

/// `d(v,w) ≥ d(v′,w′) − 1e−9`.
pub fn toponogov_check(cfg: &ComparisonConfig) -> Result<bool> {
    toponogov_compare(cfg).map(|c| c.passes)
}

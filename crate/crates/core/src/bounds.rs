//! Closed-form concentration tails and the sharp spherical profile.
//!
//! Dimension convention: `n` is the intrinsic dimension of the sphere S^n,
//! which lives in R^{n+1}. For SO(n) and G(k,n), `n` is the dimension of
//! the space the group acts on. All tails are clamped to at most 1.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quadrature::ln_cos_power_integral;

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return invalid(format!("dimension must be at least 2, got {n}"));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return invalid(format!("epsilon must be a non-negative real, got {eps}"));
    }
    Ok(())
}

#[inline]
fn gaussian_tail(rate: f64, eps: f64) -> f64 {
    (2.0 * (-rate * eps * eps / 2.0).exp()).min(1.0)
}

/// `2·exp(−(n−1)ε²/2)` for 1-Lipschitz functions on S^n.
pub fn levy_milman_tail(n: usize, eps: f64) -> Result<f64> {
    check_dim(n)?;
    check_eps(eps)?;
    Ok(gaussian_tail((n - 1) as f64, eps))
}

/// `2·exp(−Rε²/2)` for a manifold whose Ricci curvature is at least `R > 0`.
pub fn levy_gromov_tail(ricci: f64, eps: f64) -> Result<f64> {
    if !(ricci > 0.0) || !ricci.is_finite() {
        return invalid(format!("Ricci lower bound must be positive, got {ricci}"));
    }
    check_eps(eps)?;
    Ok(gaussian_tail(ricci, eps))
}

/// Ricci curvature `(n−1)/4` of SO(n) with its bi-invariant metric.
pub fn so_n_ricci_constant(n: usize) -> Result<f64> {
    check_dim(n)?;
    Ok((n - 1) as f64 / 4.0)
}

/// `2·exp(−(n−1)ε²/8)` on G(k,n), obtained by pushing the SO(n) tail
/// through the 1-Lipschitz quotient map.
pub fn grassmann_tail(n: usize, eps: f64) -> Result<f64> {
    levy_gromov_tail(so_n_ricci_constant(n)?, eps)
}

fn sharp_pieces(n: usize, eps: f64) -> (f64, f64) {
    let power = (n - 1) as f64;
    let head = ln_cos_power_integral(power, 0.0, eps);
    let tail = ln_cos_power_integral(power, eps, FRAC_PI_2);
    (head, tail)
}

fn check_sharp(n: usize, eps: f64) -> Result<()> {
    check_dim(n)?;
    if !(0.0..=FRAC_PI_2).contains(&eps) {
        return invalid(format!("epsilon must lie in [0, π/2], got {eps}"));
    }
    Ok(())
}

/// `∫_0^ε cos^{n−1} / ∫_0^{π/2} cos^{n−1}`: the measure of the band of
/// geodesic half-width ε around an equator of S^n.
pub fn sharp_profile_ratio(n: usize, eps: f64) -> Result<f64> {
    check_sharp(n, eps)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    if eps == FRAC_PI_2 {
        return Ok(1.0);
    }
    let (head, tail) = sharp_pieces(n, eps);
    Ok(1.0 / (1.0 + (tail - head).exp()))
}

/// `1 − sharp_profile_ratio(n, ε)`, computed without cancellation; zero for
/// ε ≥ π/2.
pub fn sharp_tail(n: usize, eps: f64) -> Result<f64> {
    check_dim(n)?;
    check_eps(eps)?;
    if eps >= FRAC_PI_2 {
        return Ok(0.0);
    }
    if eps == 0.0 {
        return Ok(1.0);
    }
    let (head, tail) = sharp_pieces(n, eps);
    Ok(1.0 / (1.0 + (head - tail).exp()))
}

/// Named tail-bound curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "curve", rename_all = "kebab-case")]
pub enum BoundCurve {
    LevyMilman {
        n: usize,
    },
    SharpSphere {
        n: usize,
    },
    LevyGromov {
        ricci: f64,
    },
    SoN {
        n: usize,
    },
    GrassmannTail {
        n: usize,
    },
    Pushforward {
        base: Box<BoundCurve>,
        lipschitz: f64,
    },
}

/// Registry entry: curve name, required parameter and documentation.
pub struct CurveInfo {
    pub name: &'static str,
    pub parameter: &'static str,
    pub doc: &'static str,
}

pub const CURVES: &[CurveInfo] = &[
    CurveInfo {
        name: "levy-milman",
        parameter: "n",
        doc: "2exp(-(n-1)e^2/2): tail of 1-Lipschitz functions on S^n",
    },
    CurveInfo {
        name: "sharp-sphere",
        parameter: "n",
        doc: "1 - int_0^e cos^(n-1) / int_0^(pi/2) cos^(n-1): exact equatorial-band tail on S^n",
    },
    CurveInfo {
        name: "levy-gromov",
        parameter: "ricci",
        doc: "2exp(-R e^2/2) for Ricci >= R > 0. Direction: M concentrates at least as \
              strongly as the model sphere (pi_M <= pi_model); the reverse inequality \
              occasionally printed for this comparison is a misprint and would not give \
              this tail bound",
    },
    CurveInfo {
        name: "so-n",
        parameter: "n",
        doc: "levy-gromov with R = (n-1)/4, the Ricci constant of SO(n)",
    },
    CurveInfo {
        name: "grassmann-tail",
        parameter: "n",
        doc: "2exp(-(n-1)e^2/8) on G(k,n): the so-n curve pushed through the 1-Lipschitz quotient",
    },
];

impl BoundCurve {
    /// Looks a curve up by registry name. `param` is n, or R for
    /// `levy-gromov`.
    pub fn by_name(name: &str, param: f64) -> Result<Self> {
        let dim = || -> Result<usize> {
            if param.fract() != 0.0 || param < 2.0 {
                return invalid(format!("curve {name} needs an integer n >= 2, got {param}"));
            }
            Ok(param as usize)
        };
        let curve = match name {
            "levy-milman" => BoundCurve::LevyMilman { n: dim()? },
            "sharp-sphere" => BoundCurve::SharpSphere { n: dim()? },
            "levy-gromov" => BoundCurve::LevyGromov { ricci: param },
            "so-n" => BoundCurve::SoN { n: dim()? },
            "grassmann-tail" => BoundCurve::GrassmannTail { n: dim()? },
            other => return invalid(format!("unknown curve '{other}'")),
        };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<()> {
        match self {
            BoundCurve::LevyMilman { n }
            | BoundCurve::SharpSphere { n }
            | BoundCurve::SoN { n }
            | BoundCurve::GrassmannTail { n } => check_dim(*n),
            BoundCurve::LevyGromov { ricci } => levy_gromov_tail(*ricci, 0.0).map(|_| ()),
            BoundCurve::Pushforward { base, lipschitz } => {
                if !(*lipschitz > 0.0) || !lipschitz.is_finite() {
                    return invalid(format!(
                        "Lipschitz constant must be positive, got {lipschitz}"
                    ));
                }
                base.validate()
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            BoundCurve::LevyMilman { .. } => "levy-milman".into(),
            BoundCurve::SharpSphere { .. } => "sharp-sphere".into(),
            BoundCurve::LevyGromov { .. } => "levy-gromov".into(),
            BoundCurve::SoN { .. } => "so-n".into(),
            BoundCurve::GrassmannTail { .. } => "grassmann-tail".into(),
            BoundCurve::Pushforward { base, lipschitz } => {
                format!("pushforward({},{lipschitz})", base.name())
            }
        }
    }

    pub fn doc(&self) -> &'static str {
        let name = match self {
            BoundCurve::Pushforward { .. } => {
                return "base curve evaluated at e/L: tail bound for the push-forward under an L-Lipschitz map"
            }
            other => other.name(),
        };
        CURVES
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.doc)
            .unwrap_or("")
    }

    /// The curve `ε ↦ self(ε / lipschitz)`.
    pub fn pushforward(&self, lipschitz: f64) -> Result<Self> {
        let curve = BoundCurve::Pushforward {
            base: Box::new(self.clone()),
            lipschitz,
        };
        curve.validate()?;
        Ok(curve)
    }

    /// Tail value at ε, in [0, 1]. Non-positive ε gives 1.
    pub fn eval(&self, eps: f64) -> f64 {
        if !(eps > 0.0) {
            return 1.0;
        }
        let v = match self {
            BoundCurve::LevyMilman { n } => levy_milman_tail(*n, eps),
            BoundCurve::SharpSphere { n } => sharp_tail(*n, eps),
            BoundCurve::LevyGromov { ricci } => levy_gromov_tail(*ricci, eps),
            BoundCurve::SoN { n } => so_n_ricci_constant(*n).and_then(|r| levy_gromov_tail(r, eps)),
            BoundCurve::GrassmannTail { n } => grassmann_tail(*n, eps),
            BoundCurve::Pushforward { base, lipschitz } => Ok(base.eval(eps / lipschitz)),
        };
        v.expect("curve parameters validated at construction")
    }

    pub fn tabulate(&self, epsilons: &[f64]) -> Vec<f64> {
        epsilons.iter().map(|&e| self.eval(e)).collect()
    }
}

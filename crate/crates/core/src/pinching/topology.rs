use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Smallest dimension not excluded by the 24-dimensional positively curved
/// Wallach manifold `W^24 = F4/Spin(8)`, which is neither a space form nor
/// covered by a compact rank one symmetric space.
pub const WALLACH_CRITICAL_LOWER: usize = 25;

/// Compact rank one symmetric spaces with computable Euler characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SpaceKind {
    Sphere,
    ComplexProjective,
    QuaternionicProjective,
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(SpaceKind::Sphere),
            "complexProjective" | "complex-projective" | "CP" => Ok(SpaceKind::ComplexProjective),
            "quaternionicProjective" | "quaternionic-projective" | "HP" => {
                Ok(SpaceKind::QuaternionicProjective)
            }
            other => invalid(format!("unknown space kind '{other}'")),
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Sphere => "sphere",
            SpaceKind::ComplexProjective => "complexProjective",
            SpaceKind::QuaternionicProjective => "quaternionicProjective",
        })
    }
}

/// χ(Sⁿ) = 1 + (−1)ⁿ, χ(CPⁿ) = χ(HPⁿ) = n + 1.
pub fn euler_characteristic(kind: SpaceKind, n: u32) -> Result<i64> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    Ok(match kind {
        SpaceKind::Sphere => {
            if n.is_multiple_of(2) {
                2
            } else {
                0
            }
        }
        SpaceKind::ComplexProjective | SpaceKind::QuaternionicProjective => i64::from(n) + 1,
    })
}

/// Euler characteristic of a `degree`-sheeted cover: `degree · χ(base)`.
pub fn covering_characteristic(base_chi: i64, degree: u64) -> Result<i64> {
    if degree == 0 {
        return invalid("covering degree must be at least 1");
    }
    i64::try_from(degree)
        .ok()
        .and_then(|d| d.checked_mul(base_chi))
        .ok_or_else(|| Error::InvalidInput(format!("{degree} x {base_chi} overflows")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictLabel {
    #[serde(rename = "space-form-or-CROSS")]
    SpaceFormOrCross,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictLabel::SpaceFormOrCross => "space-form-or-CROSS",
            VerdictLabel::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub n: usize,
    pub pinched: bool,
    pub label: VerdictLabel,
    pub annotation: Option<String>,
}

/// Weak ¼-pinching classifies the manifold as a spherical space form or a
/// locally compact rank one symmetric space; otherwise nothing follows.
/// Dimensions below `n_crit_lower` are annotated with the Wallach
/// counterexample.
pub fn classification_verdict(n: usize, pinched: bool, n_crit_lower: usize) -> Result<Verdict> {
    if n < 2 {
        return invalid("dimension must be at least 2");
    }
    let label = if pinched {
        VerdictLabel::SpaceFormOrCross
    } else {
        VerdictLabel::Inconclusive
    };
    let annotation = (n < n_crit_lower).then(|| {
        format!(
            "n = {n} < {n_crit_lower}: the Wallach manifold W^24 = F4/Spin(8) is positively curved \
             and neither a space form nor a CROSS, so n_cric >= {n_crit_lower}"
        )
    });
    Ok(Verdict {
        n,
        pinched,
        label,
        annotation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_values() {
        assert_eq!(euler_characteristic(SpaceKind::Sphere, 4).unwrap(), 2);
        assert_eq!(euler_characteristic(SpaceKind::Sphere, 7).unwrap(), 0);
        assert_eq!(
            euler_characteristic(SpaceKind::ComplexProjective, 3).unwrap(),
            4
        );
        assert_eq!(
            euler_characteristic(SpaceKind::QuaternionicProjective, 2).unwrap(),
            3
        );
        assert!(euler_characteristic(SpaceKind::Sphere, 0).is_err());
        assert!("octonionic".parse::<SpaceKind>().is_err());
        assert_eq!(
            "complexProjective".parse::<SpaceKind>().unwrap(),
            SpaceKind::ComplexProjective
        );
    }

    #[test]
    fn coverings() {
        assert_eq!(covering_characteristic(2, 1).unwrap(), 2);
        assert_eq!(covering_characteristic(2, 3).unwrap(), 6);
        assert_eq!(covering_characteristic(0, 17).unwrap(), 0);
        assert!(covering_characteristic(2, 0).is_err());
        assert!(covering_characteristic(i64::MAX, 2).is_err());
    }

    #[test]
    fn verdicts() {
        let v = classification_verdict(30, true, WALLACH_CRITICAL_LOWER).unwrap();
        assert_eq!(v.label, VerdictLabel::SpaceFormOrCross);
        assert!(v.annotation.is_none());
        let v = classification_verdict(24, false, WALLACH_CRITICAL_LOWER).unwrap();
        assert_eq!(v.label, VerdictLabel::Inconclusive);
        assert!(v.annotation.unwrap().contains("n_cric >= 25"));
        let v = classification_verdict(30, false, WALLACH_CRITICAL_LOWER).unwrap();
        assert_eq!(v.label.to_string(), "inconclusive");
        assert!(classification_verdict(1, true, 25).is_err());
    }
}

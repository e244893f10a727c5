use serde::Serialize;

use crate::bounds::CURVES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FunctionInfo {
    pub name: &'static str,
    pub space: &'static str,
    pub doc: &'static str,
}

pub const FUNCTIONS: &[FunctionInfo] = &[
    FunctionInfo {
        name: "coordinate",
        space: "sphere",
        doc: "first ambient coordinate x0 of S^n in R^(n+1)",
    },
    FunctionInfo {
        name: "distance-to-pole",
        space: "sphere",
        doc: "geodesic distance to the pole (1, 0, ..., 0)",
    },
    FunctionInfo {
        name: "distance-to-plane",
        space: "grassmannian",
        doc: "subspace distance 2 sin(theta_max / 2) to span(e0, ..., e(k-1))",
    },
    FunctionInfo {
        name: "entry",
        space: "rotation",
        doc: "matrix entry R[0][0] (first coordinate of the first column)",
    },
];

/// One catalog line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub category: &'static str,
    pub name: String,
    pub doc: String,
}

/// Every named space, function, bound curve, waist fixture, field fixture
/// and experiment, in a fixed order.
pub fn list_fixtures() -> Vec<CatalogEntry> {
    let entry = |category, name: &str, doc: &str| CatalogEntry {
        category,
        name: name.to_string(),
        doc: doc.to_string(),
    };
    let mut out = vec![
        entry(
            "space",
            "sphere",
            "S^n in R^(n+1) with the normalized surface measure; n >= 2",
        ),
        entry(
            "space",
            "grassmannian",
            "G(k,n) with the rotation-invariant measure; 1 <= k <= n",
        ),
        entry("space", "rotation", "SO(n) with Haar measure; n >= 2"),
        entry("space", "complexProjective", "CP^n, for euler"),
        entry("space", "quaternionicProjective", "HP^n, for euler"),
    ];
    out.extend(
        FUNCTIONS
            .iter()
            .map(|f| entry("function", f.name, &format!("on {}: {}", f.space, f.doc))),
    );
    out.extend(
        CURVES
            .iter()
            .map(|c| entry("curve", c.name, &format!("({}) {}", c.parameter, c.doc))),
    );
    out.push(entry(
        "waist",
        "s2-pole-distance",
        "S^2, f = distance-to-pole: the median level set is the equator and its e-tube has measure sin(e), 1/2 at e = pi/6",
    ));
    out.push(entry(
        "waist",
        "sphere-coordinate",
        "S^n, f = coordinate: tube around the band |x0 - m| <= delta, measured exactly along meridians",
    ));
    out.push(entry(
        "waist",
        "grassmannian-distance-to-plane",
        "G(k,n), f = distance-to-plane: tube around the sampled level band, nearest-neighbour distances",
    ));
    out.push(entry("field", "constant", "K = value on every plane"));
    out.push(entry(
        "field",
        "affine-distance",
        "K = base + slope * d(p, span(e0, e1)); Lipschitz constant |slope|",
    ));
    out.push(entry(
        "field",
        "two-value",
        "K = low within threshold of span(e0, e1), high beyond; ratio low/high prescribed",
    ));
    for (name, doc) in [
        (
            "profile",
            "empirical tail fractions P(|f - m| > e) with the matching analytic bound",
        ),
        ("waist", "tube measures around the median level band"),
        (
            "chain",
            "isoperimetry, waist and concentration inequalities on one grid",
        ),
        ("bounds", "named bound curves tabulated on the grid"),
        (
            "gh",
            "exact Gromov-Hausdorff distance of small finite metric spaces",
        ),
        (
            "pinch",
            "synthetic curvature field, pinching verdict and Lipschitz trend",
        ),
        ("n1", "dimension bound N1 for given diameters"),
        (
            "euler",
            "Euler characteristics of spheres and projective spaces, with coverings",
        ),
    ] {
        out.push(entry("experiment", name, doc));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_contents() {
        let cat = list_fixtures();
        assert!(cat
            .iter()
            .any(|e| e.category == "curve" && e.name == "grassmann-tail"));
        assert!(cat
            .iter()
            .any(|e| e.category == "waist" && e.name == "s2-pole-distance"));
        assert_eq!(cat, list_fixtures());
        let mut keys: Vec<_> = cat.iter().map(|e| (e.category, e.name.clone())).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), cat.len());
    }
}

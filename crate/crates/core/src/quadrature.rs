//! Adaptive Gauss–Kronrod quadrature in the log domain.
//!
//! Integrands of the form `exp(g(t))` with very negative `g` (e.g. high
//! powers of cosine) are integrated after subtracting a reference log value,
//! so the returned logarithm stays finite long after `exp(g)` underflows.

use std::collections::BinaryHeap;

// Kronrod 15-point nodes on [-1, 1] (non-negative half), Gauss 7-point
// nodes are the odd-indexed entries. Digits are kept as tabulated.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Piece {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive integration of `f` over the given consecutive
/// breakpoints, refining the worst piece until the summed error estimate is
/// below `rel_tol` times the integral.
pub fn integrate(f: impl Fn(f64) -> f64, breakpoints: &[f64], rel_tol: f64) -> f64 {
    let mut heap: BinaryHeap<Piece> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        if err <= rel_tol * total.abs() || heap.len() >= MAX_INTERVALS || err == 0.0 {
            return total;
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(Piece {
                error: 0.0,
                ..worst
            });
            continue;
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
    }
}

/// `ln cos t` for t in [0, π/2], accurate near 0.
pub fn ln_cos(t: f64) -> f64 {
    let s = (0.5 * t).sin();
    (-2.0 * s * s).ln_1p()
}

/// `ln ∫_a^b cos(t)^power dt` for `0 <= a <= b <= π/2` and `power >= 0`.
///
/// The integrand is decreasing, so its peak is at `a`; the peak log value
/// is subtracted before exponentiation and the interval is pre-split on a
/// geometric grid at the integrand's decay scale.
pub fn ln_cos_power_integral(power: f64, a: f64, b: f64) -> f64 {
    debug_assert!(0.0 <= a && a <= b && b <= std::f64::consts::FRAC_PI_2 + 1e-15);
    if b <= a {
        return f64::NEG_INFINITY;
    }
    let peak = power * ln_cos(a);
    if !peak.is_finite() {
        return f64::NEG_INFINITY;
    }
    // Decay length: Gaussian width near 0, exponential rate away from it.
    let width = if power > 0.0 {
        let gaussian = 1.0 / power.sqrt();
        let slope = power * a.tan();
        if slope > 0.0 {
            gaussian.min(1.0 / slope)
        } else {
            gaussian
        }
    } else {
        b - a
    };
    let mut breaks = vec![a];
    let mut step = width / 8.0;
    while breaks.last().copied().unwrap() + step < b {
        breaks.push(breaks.last().copied().unwrap() + step);
        step *= 2.0;
    }
    breaks.push(b);
    let integrand = |t: f64| {
        let c = t.clamp(0.0, std::f64::consts::FRAC_PI_2);
        (power * ln_cos(c) - peak).exp()
    };
    integrate(integrand, &breaks, 1e-13).ln() + peak
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(5) - 2.0 * x, &[0.0, 2.0], 1e-14);
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_periodic_integrand() {
        let v = integrate(|x: f64| x.sin(), &[0.0, PI], 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn wallis_integrals() {
        // ∫_0^{π/2} cos^m = √π Γ((m+1)/2) / (2 Γ(m/2+1)); check m = 1, 2, 3.
        let exact = [
            (1.0, 1.0),
            (2.0, PI / 4.0),
            (3.0, 2.0 / 3.0),
            (4.0, 3.0 * PI / 16.0),
        ];
        for (m, want) in exact {
            let got = ln_cos_power_integral(m, 0.0, FRAC_PI_2).exp();
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "m={m}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn large_power_matches_laplace_asymptotics() {
        // ∫_0^{π/2} cos^m ≈ √(π/(2m)) (1 − 1/(4m)) for large m.
        let m = 1e6;
        let got = ln_cos_power_integral(m, 0.0, FRAC_PI_2);
        let want = ((PI / (2.0 * m)).sqrt() * (1.0 - 1.0 / (4.0 * m))).ln();
        assert!((got - want).abs() < 1e-9);
    }

    #[test]
    fn far_tail_stays_finite() {
        let l = ln_cos_power_integral(1e6, 1.0, FRAC_PI_2);
        assert!(l.is_finite());
        assert!(l < -1e5);
    }

    #[test]
    fn ln_cos_small_argument() {
        let t: f64 = 1e-9;
        assert!((ln_cos(t) + t * t / 2.0).abs() < 1e-30);
    }
}

//! Curvature pinching on synthetic data: rescaling laws, pinching
//! predicates, the dimension bound N₁, empirical Lipschitz constants,
//! triangle comparison and Euler characteristics.

pub mod comparison;
pub mod field;
pub mod rescale;
pub mod topology;

pub use comparison::{toponogov_check, toponogov_compare, Comparison, ComparisonConfig};
pub use field::{empirical_lipschitz, pointwise_pinched, CurvatureField, FieldFixture, FieldStats};
pub use rescale::{
    dimension_bound_n1, inequality_dimension_bound, median_interval_quarter_pinch,
    normalize_to_five_sixths, rescale, QuarterPinch, RescaledQuantities, ScaleData,
};
pub use topology::{
    classification_verdict, covering_characteristic, euler_characteristic, SpaceKind, Verdict,
    VerdictLabel, WALLACH_CRITICAL_LOWER,
};

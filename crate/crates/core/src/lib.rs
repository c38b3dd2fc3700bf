//! Finite-truncation machinery for the weighted Hilbert cube: the
//! weighted sequence space and its metric, basic cylinders and their
//! volumes, verified isometries with span extension, delta-coverings, and
//! covering-based outer-measure bounds with invariance experiments.

pub mod covering;
pub mod cylinder;
pub mod error;
pub mod isometry;
pub mod measure;
pub mod point;
pub mod space;
pub mod span;
pub mod weights;

pub use covering::{
    cover_image_union, efficient_covering, grid_covering, grid_params, refinement_parts,
    validate_covering, CoverTarget, Covering, EfficientCoveringPlan, DEFAULT_CELL_BUDGET,
};
pub use cylinder::{pi_measure, BasicCylinder, CylinderUnion, IntervalKind, LambdaSet};
pub use error::{Error, Result};
pub use isometry::{
    gram_check, verify_isometry, Cylinder, Generator, Isometry, Report, SampledMap,
};
pub use measure::{
    cube_measure_experiment, invariance_experiment, mu_delta_upper, mu_estimate,
    CubeMeasureReport, DeltaBound, GridRow, InvarianceReport, InvarianceRow, MeasureEstimate,
    DEFAULT_SCHEDULE,
};
pub use point::Point;
pub use space::{distance, inner_product, norm};
pub use span::{
    extend, image_span_check, span_from_samples, span_membership, span_of_cylinder,
    volume_well_defined_check, AffineSpan, ExtensionOperator, Membership, SpanRepr,
};
pub use weights::WeightSequence;

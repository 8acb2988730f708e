//! Rasterized domains, grid fields and discrete geometric measures.

mod domain;
mod field;
mod measure;
mod shape;

pub use domain::{build_grid_domain, build_grid_domain_offset, GridDomain};
pub use field::ScalarField;
pub use measure::{
    contour_length, convexity_score, distance_transform, perimeter_estimate, superlevel_set,
    volume,
};
pub use shape::{BoundaryPoint, ShapeSpec};

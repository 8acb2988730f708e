//! Exact planar convex geometry: polygons, in/out balls, the Bonnesen
//! deficit, ball sandwiches and two counterexample families.

mod balls;
mod counterexamples;
mod polygon;
mod sandwich;

pub use balls::{chebyshev_inball, min_enclosing_ball, min_enclosing_ball_of, WELZL_SEED};
pub use counterexamples::{
    bump, bump_c2_norm, bump_counterexample, bump_d1, bump_d2, hull_counterexample,
    hull_counterexample_with, polar_curvature, HullCounterexample, RadialBody,
    DEFAULT_ARC_VERTICES,
};
pub use polygon::{random_convex_polygon, Ball, ConvexPolygon};
pub use sandwich::{ball_sandwich, bonnesen_deficit, sandwich_constant_scan, SandwichCertificate};

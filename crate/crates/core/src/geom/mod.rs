//! Planar geometry: vectors, unimodular matrices, point clouds, convex
//! polygons, zonogons and Hausdorff distances.

mod cloud;
mod matrix;
mod polygon;
mod vec;

pub(crate) use cloud::bbox_of;
pub use cloud::{
    convex_hull, diameter, diameter_of_points, directed_hausdorff, eps_dense, hausdorff, stretch,
    GridIndex, PointCloud,
};
pub use matrix::{op_norm, primitive_completion, Mat2, Mat2Z};
pub use polygon::{minkowski_zonogon, zonogon_vertices_exact, ConvexPolygon, PolygonKind, Segment};
pub use vec::{angular_distance, line_angular_distance, Vec2Q, Vec2R};

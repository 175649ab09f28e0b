//! Lifted torus maps as words in translations, unimodular linear maps and
//! triangle-wave shears, plus their evaluation on sampled domains.

mod domain;
mod generator;
mod word;

pub use domain::{
    image_distance, iterate_domain, FundamentalDomain, OrbitIter, SampledSet, DEFAULT_BASEPOINT,
};
pub use generator::{phi, phi_checked, phi_slope, Generator, PHI_MAX_ARGUMENT};
pub use word::{
    cq_conjugate, equivariance_check, spread_points, LiftWord, PlaneMap, RescaledLift,
    EQUIVARIANCE_SAMPLES, EQUIVARIANCE_TOL,
};

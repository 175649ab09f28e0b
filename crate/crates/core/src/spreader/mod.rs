//! The spreading construction: per-stage parameters, the assembled map `F`,
//! stage-by-stage verification of `F ∘ R_{(a,b)} ∘ F⁻¹`, and the family of
//! maps commuting with a rational horizontal translation.

mod family;
mod recipe;
mod segments;
mod stage;
mod verify;

pub use family::{build_commuting_family, CommutingFamily};
pub use recipe::{build_spreader, build_spreader_with_xi, SpreaderParams, SpreaderRecipe};
pub use segments::{sample_segments, spread_segment, spread_segments, spread_segments_conjugated};
pub use stage::{derive_stage, slope_bounds, xi0_corollary, xi0_spread_shape, StageData};
pub use verify::{
    conjugated_translation, factor_words, k_sequence, nearest_admissible, verify_stages, Check,
    Factor, Relation, StageRecord, StageTrace, Verdict,
};

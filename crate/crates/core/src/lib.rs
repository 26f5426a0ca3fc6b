//! Detecting valuations from the mod-ℓ Milnor K-theory of small fields.

pub mod fields;
pub mod galois;
pub mod linalg_fl;
pub mod milnor;
pub mod par;
pub mod projective_replay;
pub mod rigidity;
pub mod suites;

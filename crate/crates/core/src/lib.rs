//! Recognition, certification and refutation of Euclidean preference profiles.
//!
//! The crate decides whether a profile of votes can be explained by placing
//! voters and alternatives in `R^d` so that every voter strictly prefers
//! strictly closer alternatives. Dimension one is solved exactly with linear
//! programming; higher dimensions go through an external real-arithmetic
//! solver; `l1` and `linf` use an ordering-guess reduction to linear
//! programs. Every positive answer carries an exact rational certificate.

pub mod generators;
pub mod io;
pub mod lp;
pub mod minkowski;
pub mod one_d;
pub mod par;
pub mod perm;
pub mod profile;
pub mod rational;
pub mod reductions;
pub mod restrictions;
pub mod smt;

pub use one_d::{recognize_1d, RecognitionResult, Refutation, UnknownReason};
pub use profile::{
    verify_embedding, verify_embedding_with, Embedding, Entity, Metric, Point, Profile, ProfileError, ProfileKind,
    VerifyMode, Vote,
};
pub use rational::Rational;

//! Weak and strong nestings of balanced incomplete block designs.
//!
//! A nesting of a `(v,k,λ)`-BIBD assigns to every block `A` a point
//! `φ(A) ∉ A`, possibly from outside the design, so that the augmented blocks
//! `A ∪ {φ(A)}` form a partial `(w,k+1,λ+1)`-BIBD. It is *strong* when the
//! pairs `{x, φ(A)}` with `x ∈ A` are all distinct.
//!
//! The crate builds nestings directly ([`direct`]) or by composition
//! ([`recursive`]), finds them by exact search ([`search`]), bounds `w`
//! ([`bounds`]), and checks everything with an independent verifier
//! ([`verify`]). [`levi`] translates strong nestings to harmonious
//! colourings of Levi graphs and back.

pub mod bounds;
pub mod design;
pub mod develop;
pub mod direct;
pub mod error;
pub mod format;
pub mod levi;
pub mod pairs;
pub mod par;
pub mod recursive;
pub mod search;
pub mod verify;

pub use design::{
    augment, Block, Design, DesignParams, Nesting, ParallelClass, Point, PointUniverse, Resolution,
};
pub use develop::{develop, develop_design, BaseBlock, BaseBlockSystem, BaseEntry};
pub use error::{NestError, Result};
pub use pairs::{pair_counts, PairCountTable};
pub use verify::{Certificate, Mode, NestingClass};

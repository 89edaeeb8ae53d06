//! Exact-arithmetic engine for the two-ray game on toric Fano simplices.
//!
//! A terminal Fano simplex (a fake weighted projective space) is stored as a
//! complete simplicial fan on `n + 1` primitive lattice rays.  Blowing up a
//! terminal extraction produces a fan on `n + 2` rays whose birational
//! geometry is governed by a rank-2 Gale dual: walking the chambers of the
//! Gale plane plays out a Sarkisov link step by step (flips, flops,
//! antiflips, a closing divisorial contraction or Mori fibre space).  The
//! crate enumerates terminal extractions up to a discrepancy bound, runs
//! every link, dedupes the resulting web, and reproduces the classification
//! of the eight toric Mori--Fano 3-folds from scratch.
//!
//! Everything is integer or rational arithmetic over `i64` (with `i128`
//! intermediates); overflow panics rather than wrapping.

pub mod classify;
pub mod error;
pub mod extraction;
pub mod fan;
pub mod format;
pub mod lattice;
pub mod link;
pub mod normal_form;
pub mod notation;
pub mod rat;
pub mod svg;
pub mod two_ray;

pub use error::Error;
pub use fan::{Fan, SimplexVariety};
pub use lattice::{IntMat, IntVec};
pub use rat::Rat;

pub type Result<T> = std::result::Result<T, Error>;

//! Sublinear-time sparse Fourier estimation and recovery.
//!
//! The library is organised around a small set of layers:
//!
//! * [`dft`] — dense orthonormal radix-2 DFT, sparse vectors, and the
//!   semi-equispaced transform used to evaluate sparse estimates on
//!   filter supports.
//! * [`filter`] — flat frequency-domain filters with `B` buckets and
//!   sharpness `F`.
//! * [`hashing`] — pseudorandom spectrum permutations, bucketed
//!   measurements of a signal read in frequency domain, and the sample
//!   ledger that accounts for every spectrum access.
//! * [`partition`] — isolating partitions of a head set, the
//!   combinatorial structure that lets measurements be reused across
//!   refinement rounds.
//! * [`analysis`] — exact (slow) evaluators for the per-coordinate
//!   error functionals used by the test suite.
//! * [`estimation`] / [`recovery`] — the user-facing `estimate` and
//!   `sparse_fft` routines.
//! * [`ground_truth`] — dense reference computations for benchmarks.
//!
//! All signal math is generic over the scalar type via [`SfftFloat`];
//! `f64` is the tested production configuration and the concrete
//! aliases at the crate root refer to it.

pub mod analysis;
pub mod dft;
pub mod error;
pub mod estimation;
pub mod filter;
pub mod ground_truth;
pub mod hashing;
pub mod io;
pub mod partition;
pub mod recovery;

pub use error::{Result, SfftError};

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Scalar type for all signal math: `f64` everywhere in production,
/// `f32` usable at moderate filter parameters (the construction-time
/// filter verification will reject parameter combinations whose decay
/// bounds fall below the type's resolution).
pub trait SfftFloat:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Send + Sync + 'static
{
}

impl<T> SfftFloat for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
pub(crate) fn lit<T: SfftFloat>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

pub type Signal32 = dft::Signal<f32>;
pub type Signal64 = dft::Signal<f64>;
pub type SparseVector32 = dft::SparseVector<f32>;
pub type SparseVector64 = dft::SparseVector<f64>;
pub type FlatFilter64 = filter::FlatFilter<f64>;
pub type GroundTruth64 = ground_truth::GroundTruth<f64>;

//! Scalar traits the numeric parts of the crate are generic over.
//!
//! Transition matrices are nonnegative integer matrices whose entries grow
//! exponentially under composition, so they are generic over a [`Count`]
//! type: `u64` for everyday use and [`num_bigint::BigUint`] when exact powers
//! are needed. Index lists are generic over an [`IndexScalar`], either an
//! exact rational or a float.

use std::fmt::Debug;

use num_bigint::{BigUint, ToBigUint};
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, Num, One, Zero};

/// Nonnegative integer entry of a transition matrix.
pub trait Count: Clone + Debug + Ord + Zero + One + CheckedAdd + CheckedMul + FromPrimitive + ToBigUint {}

impl Count for u32 {}
impl Count for u64 {}
impl Count for u128 {}
impl Count for BigUint {}

/// Scalar an index list entry `1 - k/2` can be written in.
pub trait IndexScalar: Clone + Debug + PartialOrd + Num + FromPrimitive {}

impl IndexScalar for f32 {}
impl IndexScalar for f64 {}
impl IndexScalar for Ratio<i64> {}
impl IndexScalar for Ratio<i128> {}

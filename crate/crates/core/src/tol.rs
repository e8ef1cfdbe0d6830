//! Numeric tolerances used across the crate.
//!
//! Double precision only; every threshold below is part of a documented
//! contract somewhere in the API, so they are collected here rather than
//! scattered as ad-hoc magic numbers.

/// Determinant defect allowed after normalization, |det - 1|.
pub const DET: f64 = 1e-12;

/// Entrywise tolerance for identities that are exact in exact arithmetic
/// (inverse composition, generator relations evaluated symbolically).
pub const EXACT: f64 = 1e-12;

/// Entrywise tolerance for matrix identities reached through a few dozen
/// floating-point products (word identities, conjugacy checks).
pub const WORD: f64 = 1e-9;

/// Tolerance for trace-level identities and classification cutoffs.
pub const TRACE: f64 = 1e-10;

/// Newton convergence: |tr - target| at an accepted root.
pub const NEWTON: f64 = 1e-11;

/// Derivative magnitude below which continuation refuses to proceed
/// (possible branch point of the trace function).
pub const DERIVATIVE_FLOOR: f64 = 1e-14;

/// |cz + d| below which a Mobius map sends the point to infinity.
pub const POLE: f64 = 1e-14;

/// Rational reconstruction of rotation angles: max denominator and the
/// tolerance on theta/(2 pi).
pub const ANGLE_DENOM_CAP: i64 = 1000;
pub const ANGLE: f64 = 1e-8;

/// Geometry of disks and chains: boundary coincidence and tangency, at unit
/// scale.
pub const DISK: f64 = 1e-9;
pub const TANGENT: f64 = 1e-8;

/// Fixed-point set separation under which a pair of maps counts as sharing a
/// fixed point (elementary-group detection).
pub const SHARED_FIX: f64 = 1e-9;

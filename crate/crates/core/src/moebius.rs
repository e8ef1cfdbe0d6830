//! Möbius transformations as determinant-normalized 2x2 complex matrices,
//! points of the extended plane, and generalized disks.
//!
//! A matrix and its negative are the same transformation; equality tests go
//! through [`Mobius::canonicalized`] or [`Mobius::psl_eq`]. Word evaluation
//! elsewhere in the crate multiplies raw matrices (no sign canonicalization)
//! so that traces are honest polynomials of the parameter.

use crate::tol;
use alloc::{format, string::String};
use core::fmt;
use core::ops::Mul;
// Shadowed by std's inherent methods under cfg(test).
#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;

pub type Complex = Complex64;

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtPoint {
    Finite(Complex),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<Complex> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }

    /// Chordal distance on the Riemann sphere (diameter 2).
    pub fn chordal(self, other: ExtPoint) -> f64 {
        match (self, other) {
            (ExtPoint::Finite(a), ExtPoint::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
            }
            (ExtPoint::Finite(a), ExtPoint::Infinity)
            | (ExtPoint::Infinity, ExtPoint::Finite(a)) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
            (ExtPoint::Infinity, ExtPoint::Infinity) => 0.0,
        }
    }
}

impl From<Complex> for ExtPoint {
    fn from(z: Complex) -> Self {
        ExtPoint::Finite(z)
    }
}

impl fmt::Display for ExtPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtPoint::Finite(z) => write!(f, "{}+{}i", z.re, z.im),
            ExtPoint::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MobiusError {
    /// Normalization of a singular matrix was requested.
    SingularMatrix,
    /// Fixed points of the identity are the whole sphere.
    IdentityHasNoIsolatedFixedPoints,
    /// Three-point interpolation needs three distinct sources and targets.
    CoincidentPoints,
    /// The transformation fixes infinity, so it has no isometric circle.
    FixesInfinity,
}

impl fmt::Display for MobiusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MobiusError::SingularMatrix => write!(f, "matrix is numerically singular"),
            MobiusError::IdentityHasNoIsolatedFixedPoints => {
                write!(f, "identity transformation has no isolated fixed points")
            }
            MobiusError::CoincidentPoints => write!(f, "three-point map needs distinct points"),
            MobiusError::FixesInfinity => {
                write!(f, "transformation fixes infinity (c = 0), no isometric circle")
            }
        }
    }
}

impl core::error::Error for MobiusError {}

/// Determinant-normalized Möbius transformation z -> (az+b)/(cz+d).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

const ONE: Complex = Complex::new(1.0, 0.0);
const ZERO: Complex = Complex::new(0.0, 0.0);

impl Mobius {
    pub const IDENTITY: Mobius = Mobius {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };

    /// Builds from entries and scales to det = 1. Fails on singular input.
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Mobius, MobiusError> {
        let m = Mobius { a, b, c, d };
        let det = m.det();
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if det.norm() <= 1e-30 * scale.max(1.0) * scale.max(1.0) {
            return Err(MobiusError::SingularMatrix);
        }
        let s = det.sqrt();
        Ok(Mobius {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    /// Entries assumed to already satisfy ad - bc = 1 exactly (generator
    /// matrices, raw word products). No scaling is performed.
    pub const fn from_sl2(a: Complex, b: Complex, c: Complex, d: Complex) -> Mobius {
        Mobius { a, b, c, d }
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex {
        self.a + self.d
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Largest entry modulus, used to scale tolerances.
    pub fn norm(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    /// Canonical sign: the first entry (in a, b, c, d order) of significant
    /// modulus gets nonnegative real part; ties on Re = 0 resolve to
    /// nonnegative imaginary part.
    pub fn canonicalized(&self) -> Mobius {
        let scale = self.norm();
        for e in [self.a, self.b, self.c, self.d] {
            if e.norm() > 1e-12 * scale {
                let flip = if e.re.abs() > 1e-12 * e.norm() {
                    e.re < 0.0
                } else {
                    e.im < 0.0
                };
                return if flip { self.neg() } else { *self };
            }
        }
        *self
    }

    fn neg(&self) -> Mobius {
        Mobius {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// Entrywise distance to another matrix, max over entries.
    pub fn dist(&self, other: &Mobius) -> f64 {
        (self.a - other.a)
            .norm()
            .max((self.b - other.b).norm())
            .max((self.c - other.c).norm())
            .max((self.d - other.d).norm())
    }

    /// Entrywise distance in PSL(2,C): min over the sign choice.
    pub fn psl_dist(&self, other: &Mobius) -> f64 {
        self.dist(other).min(self.dist(&other.neg()))
    }

    pub fn psl_eq(&self, other: &Mobius, tolerance: f64) -> bool {
        self.psl_dist(other) <= tolerance
    }

    pub fn is_identity(&self, tolerance: f64) -> bool {
        self.psl_dist(&Mobius::IDENTITY) <= tolerance
    }

    /// Integer power (negative exponents via the inverse).
    pub fn pow(&self, n: i32) -> Mobius {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut out = Mobius::IDENTITY;
        for _ in 0..n.unsigned_abs() {
            out = out * base;
        }
        out
    }

    /// Applies the transformation to a point of the extended plane.
    ///
    /// Poles are handled by case analysis: |cz + d| below [`tol::POLE`]
    /// (relative to the row scale) maps to infinity rather than dividing.
    pub fn apply(&self, z: ExtPoint) -> ExtPoint {
        match z {
            ExtPoint::Infinity => {
                if self.c.norm() <= tol::POLE * self.norm() {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(self.a / self.c)
                }
            }
            ExtPoint::Finite(z) => {
                let den = self.c * z + self.d;
                let scale = (self.c.norm() * z.norm()).max(self.d.norm()).max(1e-300);
                if den.norm() <= tol::POLE * scale.max(1.0) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Derivative at a finite point, 1/(cz+d)^2.
    pub fn derivative(&self, z: Complex) -> Complex {
        let den = self.c * z + self.d;
        ONE / (den * den)
    }

    /// Classifies the transformation by its squared trace.
    pub fn classify(&self, tolerance: f64) -> Classification {
        if self.is_identity(tolerance) {
            return Classification::Identity;
        }
        let t2 = self.trace() * self.trace();
        if t2.im.abs() > tol::TRACE * t2.norm().max(1.0) {
            return Classification::Loxodromic;
        }
        let x = t2.re;
        if (x - 4.0).abs() <= tolerance.max(tol::TRACE) {
            return Classification::Parabolic;
        }
        if (0.0..4.0).contains(&x) {
            // Multiplier kappa = lambda^2 where tr = lambda + 1/lambda; the
            // PSL order is the order of kappa as a root of unity.
            let tr = self.trace();
            let half = (Complex::new(4.0, 0.0) - t2).sqrt() * Complex::new(0.0, 0.5);
            let lambda = tr * 0.5 + half;
            let kappa = lambda * lambda;
            let mut theta = kappa.arg();
            if theta <= 0.0 {
                theta += 2.0 * core::f64::consts::PI;
            }
            let turn = theta / (2.0 * core::f64::consts::PI);
            let order = rational_reconstruct(turn, tol::ANGLE_DENOM_CAP, tol::ANGLE)
                .map(|(_, den)| den as u32);
            return Classification::Elliptic {
                angle: theta,
                order,
            };
        }
        Classification::Loxodromic
    }

    /// Fixed points; parabolic gives one, everything else two with the
    /// attracting point first for loxodromics.
    pub fn fixed_points(&self) -> Result<FixedPoints, MobiusError> {
        if self.is_identity(tol::EXACT) {
            return Err(MobiusError::IdentityHasNoIsolatedFixedPoints);
        }
        let scale = self.norm();
        if self.c.norm() <= 1e-14 * scale {
            // Fixes infinity; az + b = dz has a finite root unless a = d.
            if (self.a - self.d).norm() <= 1e-14 * scale {
                return Ok(FixedPoints::Single(ExtPoint::Infinity));
            }
            let z = self.b / (self.d - self.a);
            return Ok(self.order_pair(ExtPoint::Finite(z), ExtPoint::Infinity));
        }
        // c z^2 + (d - a) z - b = 0
        let disc = ((self.d - self.a) * (self.d - self.a)
            + Complex::new(4.0, 0.0) * self.b * self.c)
            .sqrt();
        let t2 = self.trace() * self.trace();
        if (t2 - Complex::new(4.0, 0.0)).norm() <= tol::TRACE * t2.norm().max(1.0) {
            // Parabolic: double root.
            let z = (self.a - self.d) / (2.0 * self.c);
            return Ok(FixedPoints::Single(ExtPoint::Finite(z)));
        }
        let z1 = (self.a - self.d + disc) / (2.0 * self.c);
        let z2 = (self.a - self.d - disc) / (2.0 * self.c);
        Ok(self.order_pair(ExtPoint::Finite(z1), ExtPoint::Finite(z2)))
    }

    fn order_pair(&self, p: ExtPoint, q: ExtPoint) -> FixedPoints {
        if matches!(self.classify(tol::TRACE), Classification::Loxodromic) {
            // Attracting fixed point has |derivative| < 1.
            let contracting = |pt: ExtPoint| -> f64 {
                match pt {
                    ExtPoint::Finite(z) => (self.c * z + self.d).norm(),
                    // A fixed point at infinity means c = 0 and the local
                    // eigenvalue there is a; attracting iff |a| > |d|.
                    ExtPoint::Infinity => self.a.norm(),
                }
            };
            // Larger |cz+d| means stronger contraction towards the point.
            if contracting(p) >= contracting(q) {
                FixedPoints::Pair(p, q)
            } else {
                FixedPoints::Pair(q, p)
            }
        } else {
            FixedPoints::Pair(p, q)
        }
    }

    /// Unique transformation with z_i -> w_i for two triples of distinct
    /// points of the extended plane.
    pub fn three_point_map(
        z: (ExtPoint, ExtPoint, ExtPoint),
        w: (ExtPoint, ExtPoint, ExtPoint),
    ) -> Result<Mobius, MobiusError> {
        let to_std_z = to_zero_one_inf(z)?;
        let to_std_w = to_zero_one_inf(w)?;
        Ok((to_std_w.inverse() * to_std_z).canonicalized())
    }

    /// Image of a generalized disk. Three oriented boundary points are
    /// mapped and the circle refit; the side follows the orientation for a
    /// round image and a mapped interior witness for a half-plane image
    /// (orientation along a line is ambiguous when the traversal wraps
    /// through infinity).
    pub fn map_disk(&self, disk: &GeneralizedDisk) -> GeneralizedDisk {
        let (p1, p2, p3) = disk.oriented_boundary_points();
        let q1 = self.apply(p1);
        let q2 = self.apply(p2);
        let q3 = self.apply(p3);
        let mut image = GeneralizedDisk::from_oriented_points(q1, q2, q3);
        if image.is_half_plane() {
            for w in disk.interior_probes() {
                if let ExtPoint::Finite(z) = self.apply(w) {
                    let d = image.signed_distance(ExtPoint::Finite(z));
                    if d.abs() > 1e-9 * z.norm().max(1.0) {
                        if d > 0.0 {
                            image = image.complement();
                        }
                        break;
                    }
                }
            }
        }
        image
    }

    pub fn format_matrix(&self) -> String {
        format!(
            "[[{:+.6}{:+.6}i, {:+.6}{:+.6}i], [{:+.6}{:+.6}i, {:+.6}{:+.6}i]]",
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im
        )
    }
}

impl Mul for Mobius {
    type Output = Mobius;

    /// Raw matrix product (det-preserving, no sign canonicalization).
    fn mul(self, rhs: Mobius) -> Mobius {
        Mobius {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// Composition a then-applied-after b (the matrix product a*b), renormalized
/// and sign-canonicalized so equality tests are well-posed in PSL(2,C).
pub fn compose(a: &Mobius, b: &Mobius) -> Mobius {
    let m = *a * *b;
    let det = m.det();
    let s = det.sqrt();
    Mobius {
        a: m.a / s,
        b: m.b / s,
        c: m.c / s,
        d: m.d / s,
    }
    .canonicalized()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Classification {
    Identity,
    Parabolic,
    /// Rotation angle in (0, 2pi); `order` is the detected finite PSL order
    /// when the angle is a rational turn, `None` when undetected.
    Elliptic { angle: f64, order: Option<u32> },
    Loxodromic,
}

impl Classification {
    pub fn is_elliptic_of_order(&self, n: u32) -> bool {
        matches!(self, Classification::Elliptic { order: Some(k), .. } if *k == n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FixedPoints {
    Single(ExtPoint),
    Pair(ExtPoint, ExtPoint),
}

impl FixedPoints {
    pub fn first(&self) -> ExtPoint {
        match self {
            FixedPoints::Single(p) => *p,
            FixedPoints::Pair(p, _) => *p,
        }
    }

    /// Minimal chordal Hausdorff-style distance between two fixed-point sets.
    pub fn set_distance(&self, other: &FixedPoints) -> f64 {
        let pts = |fp: &FixedPoints| match fp {
            FixedPoints::Single(p) => (*p, *p),
            FixedPoints::Pair(p, q) => (*p, *q),
        };
        let (a1, a2) = pts(self);
        let (b1, b2) = pts(other);
        let d = |x: ExtPoint, y: ExtPoint| x.chordal(y);
        // Max over each point of its distance to the nearest in the other set.
        let h1 = d(a1, b1).min(d(a1, b2)).max(d(a2, b1).min(d(a2, b2)));
        let h2 = d(b1, a1).min(d(b1, a2)).max(d(b2, a1).min(d(b2, a2)));
        h1.max(h2)
    }
}

/// Continued-fraction reconstruction of x as num/den with den <= cap and
/// |x - num/den| <= tolerance. Returns the reduced fraction.
pub fn rational_reconstruct(x: f64, cap: i64, tolerance: f64) -> Option<(i64, i64)> {
    let mut p0: i64 = 1;
    let mut q0: i64 = 0;
    let mut p1 = x.floor() as i64;
    let mut q1: i64 = 1;
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if (x - p1 as f64 / q1 as f64).abs() <= tolerance {
            return Some((p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let r = 1.0 / frac;
        let a = r.floor() as i64;
        frac = r - r.floor();
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > cap {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    if (x - p1 as f64 / q1 as f64).abs() <= tolerance && q1 <= cap {
        Some((p1, q1))
    } else {
        None
    }
}

fn to_zero_one_inf(z: (ExtPoint, ExtPoint, ExtPoint)) -> Result<Mobius, MobiusError> {
    let (z1, z2, z3) = z;
    let distinct = z1.chordal(z2) > 1e-13 && z2.chordal(z3) > 1e-13 && z1.chordal(z3) > 1e-13;
    if !distinct {
        return Err(MobiusError::CoincidentPoints);
    }
    let m = match (z1, z2, z3) {
        (ExtPoint::Infinity, ExtPoint::Finite(z2), ExtPoint::Finite(z3)) => {
            Mobius::new(ZERO, -(z2 - z3), -ONE, z3)
        }
        (ExtPoint::Finite(z1), ExtPoint::Infinity, ExtPoint::Finite(z3)) => {
            Mobius::new(ONE, -z1, ONE, -z3)
        }
        (ExtPoint::Finite(z1), ExtPoint::Finite(z2), ExtPoint::Infinity) => {
            Mobius::new(-ONE, z1, ZERO, -(z2 - z1))
        }
        (ExtPoint::Finite(z1), ExtPoint::Finite(z2), ExtPoint::Finite(z3)) => {
            Mobius::new(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
        }
        _ => return Err(MobiusError::CoincidentPoints),
    }?;
    Ok(m)
}

/// Boundary of a generalized disk: a round circle or a line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Circle { center: Complex, radius: f64 },
    /// Line through `anchor` with unit direction `dir`.
    Line { anchor: Complex, dir: Complex },
}

/// A closed round disk or half-plane in the extended plane.
///
/// The disk lies to the LEFT of its directed boundary; an interior witness
/// point is kept alongside for side checks and diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralizedDisk {
    pub boundary: Boundary,
    /// True for a circle boundary when the disk is the bounded side.
    interior_side: bool,
    pub witness: ExtPoint,
}

impl GeneralizedDisk {
    /// Bounded disk |z - center| <= radius.
    pub fn round(center: Complex, radius: f64) -> GeneralizedDisk {
        GeneralizedDisk {
            boundary: Boundary::Circle { center, radius },
            interior_side: true,
            witness: ExtPoint::Finite(center),
        }
    }

    /// Unbounded disk |z - center| >= radius (contains infinity).
    pub fn round_complement(center: Complex, radius: f64) -> GeneralizedDisk {
        GeneralizedDisk {
            boundary: Boundary::Circle { center, radius },
            interior_side: false,
            witness: ExtPoint::Infinity,
        }
    }

    /// Half-plane to the left of the directed line anchor + t*dir.
    pub fn half_plane(anchor: Complex, dir: Complex) -> GeneralizedDisk {
        let dir = dir / dir.norm();
        GeneralizedDisk {
            boundary: Boundary::Line { anchor, dir },
            interior_side: true,
            witness: ExtPoint::Finite(anchor + Complex::new(0.0, 1.0) * dir),
        }
    }

    /// Closed lower half-plane {Im z <= 0}.
    pub fn lower_half_plane() -> GeneralizedDisk {
        GeneralizedDisk::half_plane(ZERO, Complex::new(-1.0, 0.0))
    }

    /// Closed upper half-plane {Im z >= 0}.
    pub fn upper_half_plane() -> GeneralizedDisk {
        GeneralizedDisk::half_plane(ZERO, ONE)
    }

    pub fn is_half_plane(&self) -> bool {
        matches!(self.boundary, Boundary::Line { .. })
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.boundary, Boundary::Circle { .. }) && self.interior_side
    }

    pub fn complement(&self) -> GeneralizedDisk {
        match self.boundary {
            Boundary::Circle { center, radius } => {
                if self.interior_side {
                    GeneralizedDisk::round_complement(center, radius)
                } else {
                    GeneralizedDisk::round(center, radius)
                }
            }
            Boundary::Line { anchor, dir } => GeneralizedDisk::half_plane(anchor, -dir),
        }
    }

    /// Radius for circles, infinity for half-planes.
    pub fn radius(&self) -> f64 {
        match self.boundary {
            Boundary::Circle { radius, .. } => radius,
            Boundary::Line { .. } => f64::INFINITY,
        }
    }

    /// Three boundary points ordered so the disk is on the left.
    pub fn oriented_boundary_points(&self) -> (ExtPoint, ExtPoint, ExtPoint) {
        match self.boundary {
            Boundary::Circle { center, radius } => {
                let r = Complex::new(radius, 0.0);
                let ir = Complex::new(0.0, radius);
                if self.interior_side {
                    // Counterclockwise: interior on the left.
                    (
                        ExtPoint::Finite(center + r),
                        ExtPoint::Finite(center + ir),
                        ExtPoint::Finite(center - r),
                    )
                } else {
                    (
                        ExtPoint::Finite(center + r),
                        ExtPoint::Finite(center - ir),
                        ExtPoint::Finite(center - r),
                    )
                }
            }
            Boundary::Line { anchor, dir } => (
                ExtPoint::Finite(anchor - dir),
                ExtPoint::Finite(anchor),
                ExtPoint::Finite(anchor + dir),
            ),
        }
    }

    /// Rebuilds a disk from three boundary points, disk on the left.
    pub fn from_oriented_points(q1: ExtPoint, q2: ExtPoint, q3: ExtPoint) -> GeneralizedDisk {
        // Any infinite (or numerically enormous) image makes the boundary a
        // line through the two remaining points.
        let big = 1e13;
        let finite3 = match (q1, q2, q3) {
            (ExtPoint::Finite(a), ExtPoint::Finite(b), ExtPoint::Finite(c))
                if a.norm() < big && b.norm() < big && c.norm() < big =>
            {
                Some((a, b, c))
            }
            _ => None,
        };
        let Some((a, b, c)) = finite3 else {
            // Keep the traversal order of the surviving finite points.
            let pts: alloc::vec::Vec<Complex> = [q1, q2, q3]
                .into_iter()
                .filter_map(|p| p.finite().filter(|z| z.norm() < big))
                .collect();
            let (u, v) = (pts[0], pts[1]);
            return GeneralizedDisk::half_plane(u, v - u);
        };
        let cross = |u: Complex, v: Complex| u.re * v.im - u.im * v.re;
        let area2 = cross(b - a, c - b);
        let span = (b - a).norm().max((c - b).norm()).max((c - a).norm());
        if area2.abs() <= 1e-11 * span * span {
            return GeneralizedDisk::half_plane(a, b - a);
        }
        // Circumcenter from the perpendicular-bisector linear system.
        let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
        let ux = (a.norm_sqr() * (b.im - c.im)
            + b.norm_sqr() * (c.im - a.im)
            + c.norm_sqr() * (a.im - b.im))
            / d;
        let uy = (a.norm_sqr() * (c.re - b.re)
            + b.norm_sqr() * (a.re - c.re)
            + c.norm_sqr() * (b.re - a.re))
            / d;
        let center = Complex::new(ux, uy);
        let radius = ((a - center).norm() + (b - center).norm() + (c - center).norm()) / 3.0;
        if area2 > 0.0 {
            GeneralizedDisk::round(center, radius)
        } else {
            GeneralizedDisk::round_complement(center, radius)
        }
    }

    /// Signed distance to the boundary: negative strictly inside the disk,
    /// positive outside. Infinity is inside unbounded disks only.
    pub fn signed_distance(&self, p: ExtPoint) -> f64 {
        match p {
            ExtPoint::Infinity => {
                if self.is_bounded() || self.is_half_plane() {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
            ExtPoint::Finite(z) => match self.boundary {
                Boundary::Circle { center, radius } => {
                    let d = (z - center).norm() - radius;
                    if self.interior_side {
                        d
                    } else {
                        -d
                    }
                }
                Boundary::Line { anchor, dir } => {
                    let w = z - anchor;
                    // Left side is negative (inside).
                    -(dir.re * w.im - dir.im * w.re)
                }
            },
        }
    }

    pub fn contains(&self, p: ExtPoint, tolerance: f64) -> bool {
        self.signed_distance(p) <= tolerance
    }

    /// Separation between the interiors of two disks:
    /// zero at tangency, negative when the interiors overlap, positive when
    /// separated, and -inf when both contain a neighborhood of infinity.
    pub fn gap(&self, other: &GeneralizedDisk) -> f64 {
        use Boundary::*;
        match (
            (self.boundary, self.interior_side),
            (other.boundary, other.interior_side),
        ) {
            ((Circle { center: c1, radius: r1 }, true), (Circle { center: c2, radius: r2 }, true)) => {
                (c1 - c2).norm() - (r1 + r2)
            }
            ((Circle { center: c1, radius: r1 }, true), (Circle { center: c2, radius: r2 }, false)) => {
                r2 - ((c1 - c2).norm() + r1)
            }
            ((Circle { .. }, false), (Circle { .. }, true)) => other.gap(self),
            ((Circle { .. }, false), (Circle { .. }, false)) => f64::NEG_INFINITY,
            ((Circle { center, radius }, true), (Line { .. }, _)) => {
                // Distance from the round disk into the half-plane side.
                let h = other.signed_distance(ExtPoint::Finite(center));
                h - radius
            }
            ((Line { .. }, _), (Circle { .. }, true)) => other.gap(self),
            ((Line { anchor: a1, dir: d1 }, _), (Line { anchor: a2, dir: d2 }, _)) => {
                let cross = d1.re * d2.im - d1.im * d2.re;
                if cross.abs() > 1e-9 {
                    return f64::NEG_INFINITY;
                }
                // Parallel: disjoint only when facing away from each other.
                let facing_away = (d1 + d2).norm() < 1e-9;
                if !facing_away {
                    return f64::NEG_INFINITY;
                }
                let w = a2 - a1;
                -(d1.re * w.im - d1.im * w.re)
            }
            ((Circle { .. }, false), (Line { .. }, _)) | ((Line { .. }, _), (Circle { .. }, false)) => {
                f64::NEG_INFINITY
            }
        }
    }

    /// Tangency test with disjoint interiors, per-pair scale-aware.
    pub fn is_tangent_to(&self, other: &GeneralizedDisk, tolerance: f64) -> bool {
        let scale = finite_radius(self).max(finite_radius(other)).max(1.0);
        let g = self.gap(other);
        g.is_finite() && g.abs() <= tolerance * scale
    }

    /// Point of tangency for externally tangent disks; infinity for a pair
    /// of facing-away parallel half-planes.
    pub fn tangency_point(&self, other: &GeneralizedDisk) -> ExtPoint {
        use Boundary::*;
        match (self.boundary, other.boundary) {
            (Circle { center: c1, radius: r1 }, Circle { center: c2, radius: r2 }) => {
                if self.interior_side && other.interior_side {
                    let u = (c2 - c1) / (c2 - c1).norm();
                    ExtPoint::Finite(c1 + u * r1)
                } else if self.interior_side {
                    // Internal tangency with the complement disk.
                    let u = (c1 - c2) / (c1 - c2).norm();
                    ExtPoint::Finite(c2 + u * r2)
                } else {
                    let u = (c2 - c1) / (c2 - c1).norm();
                    ExtPoint::Finite(c1 + u * r1)
                }
            }
            (Circle { center, radius }, Line { anchor, dir })
            | (Line { anchor, dir }, Circle { center, radius }) => {
                let w = center - anchor;
                let along = dir.re * w.re + dir.im * w.im;
                let foot = anchor + dir * along;
                let u = (foot - center) / (foot - center).norm();
                ExtPoint::Finite(center + u * radius)
            }
            (Line { .. }, Line { .. }) => ExtPoint::Infinity,
        }
    }

    /// A few interior points, for side checks after mapping. The first entry
    /// is the stored witness.
    pub fn interior_probes(&self) -> impl Iterator<Item = ExtPoint> + '_ {
        let extras: [ExtPoint; 4] = match self.boundary {
            Boundary::Circle { center, radius } => {
                if self.interior_side {
                    [
                        ExtPoint::Finite(center),
                        ExtPoint::Finite(center + Complex::new(0.41 * radius, 0.0)),
                        ExtPoint::Finite(center + Complex::new(0.0, -0.33 * radius)),
                        ExtPoint::Finite(center + Complex::new(-0.27 * radius, 0.51 * radius)),
                    ]
                } else {
                    [
                        ExtPoint::Infinity,
                        ExtPoint::Finite(center + Complex::new(2.7 * radius, 0.0)),
                        ExtPoint::Finite(center + Complex::new(0.0, 3.9 * radius)),
                        ExtPoint::Finite(center + Complex::new(-5.3 * radius, 1.1 * radius)),
                    ]
                }
            }
            Boundary::Line { anchor, dir } => {
                let n = Complex::new(0.0, 1.0) * dir;
                [
                    ExtPoint::Finite(anchor + n),
                    ExtPoint::Finite(anchor + n * 2.3),
                    ExtPoint::Finite(anchor + n * 0.7 + dir * 1.9),
                    ExtPoint::Finite(anchor + n * 5.1 - dir * 3.3),
                ]
            }
        };
        core::iter::once(self.witness).chain(extras)
    }

    /// Hausdorff-style distance between boundaries, used by tests; compares
    /// sampled boundary points of `self` against the other boundary.
    pub fn boundary_distance(&self, other: &GeneralizedDisk) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..16 {
            let t = k as f64 / 16.0 * 2.0 * core::f64::consts::PI;
            let p = match self.boundary {
                Boundary::Circle { center, radius } => {
                    center + Complex::new(radius * t.cos(), radius * t.sin())
                }
                Boundary::Line { anchor, dir } => anchor + dir * (t - core::f64::consts::PI) * 3.0,
            };
            let d = match other.boundary {
                Boundary::Circle { center, radius } => ((p - center).norm() - radius).abs(),
                Boundary::Line { anchor, dir } => {
                    let w = p - anchor;
                    (dir.re * w.im - dir.im * w.re).abs()
                }
            };
            worst = worst.max(d);
        }
        worst
    }
}

fn finite_radius(d: &GeneralizedDisk) -> f64 {
    match d.boundary {
        Boundary::Circle { radius, .. } => radius,
        Boundary::Line { .. } => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn compose_s_stilde_is_k() {
        let s = Mobius::from_sl2(c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let st = Mobius::from_sl2(c(1.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0));
        let k = compose(&s, &st);
        let expected = Mobius::from_sl2(c(-3.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0));
        assert!(k.psl_eq(&expected, tol::EXACT));
        assert!((k.trace().re + 2.0).abs() < tol::EXACT || (k.trace().re - 2.0).abs() < tol::EXACT);
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let m = Mobius::new(c(2.0, 1.0), c(0.3, -0.2), c(0.0, 1.5), c(1.0, 0.0)).unwrap();
        assert!(compose(&m, &Mobius::IDENTITY).psl_eq(&m, tol::EXACT));
        assert!(compose(&m, &m.inverse()).is_identity(tol::EXACT));
        assert!((m.det() - c(1.0, 0.0)).norm() <= tol::DET);
    }

    #[test]
    fn classify_maskit_elements() {
        let k = Mobius::from_sl2(c(-3.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0));
        assert_eq!(k.classify(tol::TRACE), Classification::Parabolic);
        let s = Mobius::from_sl2(c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(s.classify(tol::TRACE), Classification::Parabolic);
        // T[i sqrt 2] has trace sqrt 2 = 2 cos(pi/4): elliptic of order 4.
        let mu = c(0.0, core::f64::consts::SQRT_2);
        let t = Mobius::from_sl2(
            -Complex::new(0.0, 1.0) * mu,
            c(0.0, -1.0),
            c(0.0, -1.0),
            c(0.0, 0.0),
        );
        assert!(t.classify(tol::TRACE).is_elliptic_of_order(4));
    }

    #[test]
    fn order_detection_rejects_irrational_rotation() {
        let theta: f64 = 1.0; // radians; theta/pi irrational
        let m = Mobius::new(
            Complex::from_polar(1.0, theta / 2.0),
            ZERO,
            ZERO,
            Complex::from_polar(1.0, -theta / 2.0),
        )
        .unwrap();
        match m.classify(tol::TRACE) {
            Classification::Elliptic { order, .. } => assert_eq!(order, None),
            other => panic!("expected elliptic, got {other:?}"),
        }
    }

    #[test]
    fn fixed_points_examples() {
        // S fixes only infinity.
        let s = Mobius::from_sl2(c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(
            s.fixed_points().unwrap(),
            FixedPoints::Single(ExtPoint::Infinity)
        );
        // K has the double fixed point 1.
        let k = Mobius::from_sl2(c(-3.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0));
        match k.fixed_points().unwrap() {
            FixedPoints::Single(ExtPoint::Finite(z)) => assert!((z - c(1.0, 0.0)).norm() < 1e-12),
            other => panic!("expected single fixed point, got {other:?}"),
        }
        assert!(Mobius::IDENTITY.fixed_points().is_err());
    }

    #[test]
    fn loxodromic_fixed_point_order() {
        // z -> 4z: attracting at infinity.
        let m = Mobius::new(c(2.0, 0.0), ZERO, ZERO, c(0.5, 0.0)).unwrap();
        match m.fixed_points().unwrap() {
            FixedPoints::Pair(first, _) => assert_eq!(first, ExtPoint::Infinity),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_point_map_identity_and_affine() {
        let zero = ExtPoint::Finite(ZERO);
        let one = ExtPoint::Finite(ONE);
        let inf = ExtPoint::Infinity;
        let id = Mobius::three_point_map((zero, one, inf), (zero, one, inf)).unwrap();
        assert!(id.is_identity(1e-12));
        let m = Mobius::three_point_map((zero, one, inf), (one, zero, inf)).unwrap();
        // z -> 1 - z
        match m.apply(ExtPoint::Finite(c(0.25, 0.0))) {
            ExtPoint::Finite(z) => assert!((z - c(0.75, 0.0)).norm() < 1e-12),
            _ => panic!(),
        }
        assert!(Mobius::three_point_map((zero, zero, inf), (zero, one, inf)).is_err());
    }

    #[test]
    fn map_disk_by_t_mu_sends_lower_half_plane_up() {
        // T[mu](z) = mu + 1/z maps {Im z < 0} onto {Im(z - mu) > 0}.
        let mu = c(0.7, 2.3);
        let t = Mobius::from_sl2(
            c(0.0, -1.0) * mu,
            c(0.0, -1.0),
            c(0.0, -1.0),
            ZERO,
        );
        let image = t.map_disk(&GeneralizedDisk::lower_half_plane());
        assert!(image.is_half_plane());
        assert!(image.contains(ExtPoint::Finite(mu + c(0.0, 5.0)), 1e-12));
        assert!(!image.contains(ExtPoint::Finite(mu - c(0.0, 5.0)), 1e-12));
        assert!(image.signed_distance(ExtPoint::Finite(mu)).abs() < 1e-12);
    }

    #[test]
    fn map_disk_identity_and_rotation() {
        let d = GeneralizedDisk::round(c(0.3, -0.1), 2.0);
        let img = Mobius::IDENTITY.map_disk(&d);
        assert!(d.boundary_distance(&img) < 1e-12);
        // Rotation about 0 fixes the unit disk at 0.
        let a4 = Mobius::new(
            Complex::from_polar(1.0, -core::f64::consts::FRAC_PI_4),
            ZERO,
            ZERO,
            Complex::from_polar(1.0, core::f64::consts::FRAC_PI_4),
        )
        .unwrap();
        let unit = GeneralizedDisk::round(ZERO, 1.0);
        let img = a4.map_disk(&unit);
        assert!(unit.boundary_distance(&img) < 1e-12);
        assert!(img.is_bounded());
    }

    #[test]
    fn disk_side_tracking_under_inversion() {
        // 1/z maps the unit disk at 0 to the complement of the unit disk.
        let inv = Mobius::new(ZERO, ONE, ONE, ZERO).unwrap();
        let unit = GeneralizedDisk::round(ZERO, 1.0);
        let img = inv.map_disk(&unit);
        assert!(!img.is_bounded());
        assert!(img.contains(ExtPoint::Infinity, 0.0));
        assert!(img.contains(ExtPoint::Finite(c(3.0, 0.0)), 1e-12));
        assert!(!img.contains(ExtPoint::Finite(c(0.1, 0.0)), 1e-12));
    }

    #[test]
    fn gap_and_tangency() {
        let d1 = GeneralizedDisk::round(ZERO, 1.0);
        let d2 = GeneralizedDisk::round(c(3.0, 0.0), 2.0);
        assert!(d1.is_tangent_to(&d2, tol::TANGENT));
        match d1.tangency_point(&d2) {
            ExtPoint::Finite(z) => assert!((z - c(1.0, 0.0)).norm() < 1e-12),
            _ => panic!(),
        }
        let hp = GeneralizedDisk::half_plane(c(0.0, -2.0), c(-1.0, 0.0)); // Im z <= -2
        let d3 = GeneralizedDisk::round(c(0.0, -1.0), 1.0);
        assert!(hp.is_tangent_to(&d3, tol::TANGENT));
        // Two facing-away half-planes with a strip between them.
        let left = GeneralizedDisk::half_plane(c(-2.0, 0.0), c(0.0, 1.0)); // Re z <= -2
        let right = GeneralizedDisk::half_plane(ZERO, c(0.0, -1.0)); // Re z >= 0
        assert!((left.gap(&right) - 2.0).abs() < 1e-12);
        assert_eq!(left.tangency_point(&right), ExtPoint::Infinity);
    }

    #[test]
    fn rational_reconstruct_basics() {
        assert_eq!(rational_reconstruct(0.25, 1000, 1e-8), Some((1, 4)));
        assert_eq!(rational_reconstruct(2.0 / 7.0, 1000, 1e-10), Some((2, 7)));
        assert_eq!(
            rational_reconstruct(core::f64::consts::FRAC_1_SQRT_2, 1000, 1e-10),
            None
        );
    }
}

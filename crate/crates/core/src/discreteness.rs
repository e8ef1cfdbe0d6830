//! Necessary-condition discreteness tests: Jorgensen's inequality, the
//! triangle-group signature of the disk-preserving subgroup on an extended
//! ray, and isometric circles.
//!
//! Everything here is one-sided: only "not discrete" is ever certified.
//! J >= 1 never concludes discreteness (the inequality is necessary, not
//! sufficient).

use crate::farey::{evaluate, farey_parents, word, Fraction};
use crate::locus::TraceFunction;
use crate::moebius::{Classification, Complex, Mobius, MobiusError};
use crate::tol;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
// Shadowed by std's inherent methods under cfg(test).
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Debug, PartialEq)]
pub enum DiscretenessError {
    /// The parameter lies off the real-trace locus beyond the tolerance.
    OffLocus { im_trace: f64 },
    /// The fraction has no upper Farey parent to build the subgroup from.
    NoSubgroup(Fraction),
    Mobius(MobiusError),
}

impl fmt::Display for DiscretenessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscretenessError::OffLocus { im_trace } => {
                write!(f, "parameter off the real-trace locus (Im tr = {im_trace:e})")
            }
            DiscretenessError::NoSubgroup(x) => {
                write!(f, "no disk-preserving subgroup construction for {x}")
            }
            DiscretenessError::Mobius(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DiscretenessError {}

impl From<MobiusError> for DiscretenessError {
    fn from(e: MobiusError) -> Self {
        DiscretenessError::Mobius(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// J < 1 with a non-elementary certificate: the group is not discrete.
    Violating,
    /// J >= 1: no conclusion.
    Inconclusive,
    /// J < 1 but the pair may generate an elementary group.
    ElementarySuspect,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Violating => write!(f, "violating"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
            Verdict::ElementarySuspect => write!(f, "elementary-suspect"),
        }
    }
}

/// Outcome of one Jorgensen test on a pair (f, g).
#[derive(Clone, Debug)]
pub struct JorgensenReport {
    pub f: Mobius,
    pub g: Mobius,
    /// J = |tr^2 f - 4| + |tr [f, g] - 2|.
    pub value: f64,
    pub verdict: Verdict,
    /// Set when the commutator is elliptic of order 2, 3, 4 or 6: the
    /// elementary escape cases of the classification, flagged but never
    /// auto-certified as non-discrete.
    pub elliptic_escape: Option<u32>,
}

/// Jorgensen's inequality |tr^2 f - 4| + |tr [f,g] - 2| >= 1 for discrete
/// non-elementary groups. A violation certifies non-discreteness only with
/// evidence that <f, g> is non-elementary (distinct fixed-point sets and a
/// commutator away from the identity).
pub fn jorgensen(f: &Mobius, g: &Mobius) -> JorgensenReport {
    let tr2 = f.trace() * f.trace();
    let comm = *f * *g * f.inverse() * g.inverse();
    let value = (tr2 - 4.0).norm() + (comm.trace() - 2.0).norm();

    let commutator_trivial = comm.is_identity(tol::SHARED_FIX);
    let f_trivial = f.is_identity(tol::SHARED_FIX);
    let g_trivial = g.is_identity(tol::SHARED_FIX);
    let shared_fix = if f_trivial || g_trivial {
        true
    } else {
        match (f.fixed_points(), g.fixed_points()) {
            (Ok(ff), Ok(gf)) => {
                let pts = |fp: &crate::moebius::FixedPoints| match fp {
                    crate::moebius::FixedPoints::Single(p) => alloc::vec![*p],
                    crate::moebius::FixedPoints::Pair(p, q) => alloc::vec![*p, *q],
                };
                let a = pts(&ff);
                let b = pts(&gf);
                a.iter()
                    .any(|p| b.iter().any(|q| p.chordal(*q) <= tol::SHARED_FIX))
            }
            _ => true,
        }
    };

    let elliptic_escape = match comm.classify(tol::TRACE) {
        Classification::Elliptic { order: Some(k), .. } if matches!(k, 2 | 3 | 4 | 6) => Some(k),
        _ => None,
    };

    let verdict = if value >= 1.0 - tol::EXACT {
        Verdict::Inconclusive
    } else if commutator_trivial || shared_fix || elliptic_escape.is_some() {
        Verdict::ElementarySuspect
    } else {
        Verdict::Violating
    };

    JorgensenReport {
        f: *f,
        g: *g,
        value,
        verdict,
        elliptic_escape,
    }
}

/// Axis-aligned rectangle in the parameter plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Region {
    pub fn centered(center: Complex, radius: f64) -> Region {
        Region {
            x0: center.re - radius,
            y0: center.im - radius,
            x1: center.re + radius,
            y1: center.im + radius,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanCell {
    pub mu: Complex,
    pub report: JorgensenReport,
}

/// Grid of Jorgensen verdicts for the pairs (K, W_{p/q}[mu]^n), row-major
/// from (x0, y0); `grid` is the number of cells per side (1 gives the
/// single report at the region center).
pub fn nondiscreteness_scan(
    region: Region,
    fraction: Fraction,
    n: u32,
    grid: usize,
) -> Vec<ScanCell> {
    let tf = TraceFunction::maskit(fraction);
    let g = crate::families::maskit_group(Complex::new(0.0, 2.0));
    let k = g.k;
    let mut cells = Vec::with_capacity(grid * grid);
    for row in 0..grid {
        for col in 0..grid {
            let (fx, fy) = if grid == 1 {
                (0.5, 0.5)
            } else {
                (
                    col as f64 / (grid - 1) as f64,
                    row as f64 / (grid - 1) as f64,
                )
            };
            let mu = Complex::new(
                region.x0 + fx * (region.x1 - region.x0),
                region.y0 + fy * (region.y1 - region.y0),
            );
            let w = tf.matrix(mu).expect("maskit trace function is entire");
            let wn = w.pow(n as i32);
            cells.push(ScanCell {
                mu,
                report: jorgensen(&k, &wn),
            });
        }
    }
    cells
}

/// Signature verdict for the disk-preserving subgroup
/// F = <W_{p/q}, W_{r/s}^-1 W_{p/q}^-1 W_{r/s}> at a parameter on the
/// (extended) p/q ray.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignatureVerdict {
    /// |tr W| = 2 cos(pi/n): triangle group of signature (n, n, oo);
    /// n = 2 is the infinite dihedral group acting on C.
    Triangle { n: u32 },
    /// Elliptic word whose angle is not pi/n for any integer n: F is not
    /// discrete. Carries pi / rotation-half-angle for diagnostics.
    NonDiscrete { pi_over_angle: f64 },
    /// |tr W| = 2: the cusp itself.
    Parabolic,
    /// |tr W| > 2: inside the deformation space (Fuchsian of the second
    /// kind, no elliptic signature to report).
    Loxodromic,
}

impl fmt::Display for SignatureVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureVerdict::Triangle { n } => write!(f, "triangle({n},{n},inf)"),
            SignatureVerdict::NonDiscrete { pi_over_angle } => {
                write!(f, "non-discrete (pi/angle = {pi_over_angle})")
            }
            SignatureVerdict::Parabolic => write!(f, "parabolic (cusp)"),
            SignatureVerdict::Loxodromic => write!(f, "loxodromic (inside)"),
        }
    }
}

/// Verifies the real-trace conditions of the subgroup F at mu and
/// classifies the signature: |tr W_{p/q}| = 2 cos(pi/n) yields (n, n, oo),
/// any other elliptic value is non-discrete.
pub fn triangle_signature(
    mu: Complex,
    fraction: Fraction,
) -> Result<SignatureVerdict, DiscretenessError> {
    let tf = TraceFunction::maskit(fraction);
    let tr = tf.trace(mu).expect("maskit trace function is entire");
    if tr.im.abs() > 1e-6 {
        return Err(DiscretenessError::OffLocus { im_trace: tr.im });
    }
    // The generators of F: W_{p/q} and its W_{r/s}-conjugate, r/s the upper
    // parent (1/0 for integral fractions). Their traces agree, and the
    // product of the pair is the commutator K of the remarked generators,
    // trace -2; both checks are cheap and catch construction slips.
    let upper = if fraction.is_integer() || fraction.is_infinite() {
        Fraction::INFINITY
    } else if fraction.numer() > 0 {
        farey_parents(fraction)
            .map_err(|_| DiscretenessError::NoSubgroup(fraction))?
            .1
    } else {
        farey_parents(fraction.neg())
            .map_err(|_| DiscretenessError::NoSubgroup(fraction))?
            .1
            .neg()
    };
    let g = crate::families::maskit_group(mu);
    let x = evaluate(&word(fraction), &g.s, &g.t);
    let z = evaluate(&word(upper), &g.s, &g.t);
    let y = z.inverse() * x.inverse() * z;
    debug_assert!((y.trace() - x.trace()).norm() < 1e-6 * x.trace().norm().max(1.0));
    let product = x * y;
    if (product.trace().im).abs() > 1e-6 {
        return Err(DiscretenessError::OffLocus {
            im_trace: product.trace().im,
        });
    }

    let t = tr.re.abs();
    if (t - 2.0).abs() <= tol::ANGLE {
        return Ok(SignatureVerdict::Parabolic);
    }
    if t > 2.0 {
        return Ok(SignatureVerdict::Loxodromic);
    }
    // t = 2 cos(pi/k) for integer k <= 1000?
    let half_angle = (t / 2.0).acos(); // in (0, pi/2]
    let k_real = PI / half_angle;
    let k = k_real.round();
    if (2.0..=1000.0).contains(&k) && (t - 2.0 * (PI / k).cos()).abs() <= tol::ANGLE {
        Ok(SignatureVerdict::Triangle { n: k as u32 })
    } else {
        Ok(SignatureVerdict::NonDiscrete {
            pi_over_angle: k_real,
        })
    }
}

/// A plain circle, center and radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Complex,
    pub radius: f64,
}

/// Isometric circle |cz + d| = 1 of a map not fixing infinity:
/// center -d/c, radius 1/|c|.
pub fn isometric_circle(m: &Mobius) -> Result<Circle, MobiusError> {
    if m.c.norm() <= tol::POLE * m.norm() {
        return Err(MobiusError::FixesInfinity);
    }
    Ok(Circle {
        center: -m.d / m.c,
        radius: 1.0 / m.c.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::maskit_group;
    use crate::locus::{maskit_ray_with_elliptics, TraceFunction};

    fn frac(p: i64, q: i64) -> Fraction {
        Fraction::new(p, q).unwrap()
    }

    #[test]
    fn jorgensen_on_generators_is_inconclusive() {
        for mu in [Complex::new(0.0, 3.0), Complex::new(1.3, 0.2)] {
            let g = maskit_group(mu);
            let rep = jorgensen(&g.s, &g.t);
            // tr^2 S = 4 and tr [S, T] = -2, so J = 4 for every mu.
            assert!((rep.value - 4.0).abs() < 1e-10);
            assert_eq!(rep.verdict, Verdict::Inconclusive);
        }
    }

    #[test]
    fn elliptic_point_neighborhood() {
        let ray = maskit_ray_with_elliptics(frac(1, 2), &[4]).unwrap();
        let center = ray.elliptic(4).unwrap().param;
        let tf = TraceFunction::maskit(frac(1, 2));
        let g = maskit_group(center);

        // Dead center: W^4 is the identity in PSL, elementary.
        let w4 = tf.matrix(center).unwrap().pow(4);
        assert!(w4.is_identity(1e-8));
        let rep = jorgensen(&g.k, &w4);
        assert_eq!(rep.verdict, Verdict::ElementarySuspect);
        assert!(rep.value < 1e-7);

        // In every axis direction some perturbation within the ring of
        // radius 0.05 violates the inequality with a non-elementary
        // certificate (the violation neighborhood itself is small, about
        // 7e-3 for this n).
        for dir in [
            Complex::new(1.0, 0.0),
            Complex::new(-1.0, 0.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, -1.0),
        ] {
            let mut found = false;
            let mut r = 0.05;
            for _ in 0..6 {
                let w4 = tf.matrix(center + dir * r).unwrap().pow(4);
                let rep = jorgensen(&g.k, &w4);
                if rep.verdict == Verdict::Violating {
                    found = true;
                    break;
                }
                r *= 0.5;
            }
            assert!(found, "no violation within the ring along {dir}");
        }
    }

    #[test]
    fn scan_control_region_is_clean() {
        // Deep inside M no cell may be certified non-discrete.
        let region = Region::centered(Complex::new(0.0, 3.0), 0.1);
        let cells = nondiscreteness_scan(region, frac(1, 2), 4, 5);
        assert_eq!(cells.len(), 25);
        assert!(cells
            .iter()
            .all(|c| c.report.verdict != Verdict::Violating));
    }

    #[test]
    fn scan_degenerate_grid() {
        let region = Region::centered(Complex::new(1.0, 1.0), 0.0);
        let cells = nondiscreteness_scan(region, frac(1, 2), 2, 1);
        assert_eq!(cells.len(), 1);
        assert!((cells[0].mu - Complex::new(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn jorgensen_soundness_in_a_discrete_group() {
        // 1000 random pairs of short words at mu = 3i (discrete): never a
        // violating verdict.
        let g = maskit_group(Complex::new(0.0, 3.0));
        let gens = [g.s, g.s.inverse(), g.t, g.t.inverse()];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut violations = 0;
        for _ in 0..1000 {
            let make = |next: &mut dyn FnMut() -> u64| {
                let len = 1 + next() % 6;
                let mut m = Mobius::IDENTITY;
                for _ in 0..len {
                    m = m * gens[(next() % 4) as usize];
                }
                m
            };
            let f = make(&mut next);
            let h = make(&mut next);
            if jorgensen(&f, &h).verdict == Verdict::Violating {
                violations += 1;
            }
        }
        assert_eq!(violations, 0);
    }

    #[test]
    fn signature_examples() {
        // mu_0(4) = i sqrt 2 on the 0/1 ray: tr T = sqrt 2 -> (4, 4, oo).
        let mu = Complex::new(0.0, 2.0_f64.sqrt());
        assert_eq!(
            triangle_signature(mu, frac(0, 1)).unwrap(),
            SignatureVerdict::Triangle { n: 4 }
        );
        // mu_{1/2}(2) = 1 + i: tr W_{1/2} = 0 -> the infinite dihedral group.
        let mu = Complex::new(1.0, 1.0);
        assert_eq!(
            triangle_signature(mu, frac(1, 2)).unwrap(),
            SignatureVerdict::Triangle { n: 2 }
        );
        // A point with tr W = 2 cos(1): elliptic of infinite order.
        let tf = TraceFunction::maskit(frac(0, 1));
        let target = 2.0 * 1.0f64.cos();
        let mu = crate::locus::solve_trace(
            &tf,
            Complex::new(target, 0.0),
            Complex::new(0.0, 1.0),
        )
        .unwrap();
        match triangle_signature(mu, frac(0, 1)).unwrap() {
            SignatureVerdict::NonDiscrete { .. } => {}
            other => panic!("expected non-discrete, got {other:?}"),
        }
        // Off the locus errors out.
        assert!(matches!(
            triangle_signature(Complex::new(0.3, 1.1), frac(1, 2)),
            Err(DiscretenessError::OffLocus { .. })
        ));
    }

    #[test]
    fn signatures_at_elliptic_points() {
        for (f, orders) in [(frac(1, 2), [2u32, 5]), (frac(2, 3), [3, 7])] {
            let ray = maskit_ray_with_elliptics(f, &orders).unwrap();
            for n in orders {
                let mu = ray.elliptic(n).unwrap().param;
                assert_eq!(
                    triangle_signature(mu, f).unwrap(),
                    SignatureVerdict::Triangle { n },
                    "fraction {f}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn isometric_circles_of_the_generators() {
        let mu = Complex::new(0.9, 1.4);
        let g = maskit_group(mu);
        let t_circle = isometric_circle(&g.t).unwrap();
        assert!(t_circle.center.norm() < 1e-14);
        assert!((t_circle.radius - 1.0).abs() < 1e-14);
        let tinv_circle = isometric_circle(&g.t.inverse()).unwrap();
        assert!((tinv_circle.center - mu).norm() < 1e-14);
        assert!((tinv_circle.radius - 1.0).abs() < 1e-14);
        let k_circle = isometric_circle(&g.k).unwrap();
        assert!((k_circle.center - Complex::new(0.5, 0.0)).norm() < 1e-14);
        assert!((k_circle.radius - 0.5).abs() < 1e-14);
        assert!(isometric_circle(&g.s).is_err());
    }
}

//! Holomorphic trace functions of the special words, their derivatives,
//! Newton solving, and continuation along pleating rays, extended rays,
//! cusps and elliptic points.

use crate::families::{generator_s, generator_t, koebe_group, FamilyError};
use crate::farey::{evaluate, word, FareyWord, Fraction, Letter};
use crate::moebius::{Complex, Mobius};
use crate::tol;
use alloc::vec::Vec;
// Shadowed by std's inherent methods under cfg(test).
#[allow(unused_imports)]
use num_traits::{Euclid, Float};
use core::f64::consts::PI;
use core::fmt;

const I: Complex = Complex::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub enum LocusError {
    Family(FamilyError),
    /// No zero of Im tr found in the scan window at the seed height.
    SeedNotFound(Fraction),
    NonConvergence {
        target: Complex,
        reached: Complex,
    },
    /// |d tr| fell below the floor: possible branch point (the extended ray
    /// may branch near the cusp; continuation refuses to guess).
    DerivativeCollapse {
        param: Complex,
    },
    /// Koebe trace functions are undefined at tau = 0.
    ZeroParameter,
}

impl fmt::Display for LocusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocusError::Family(e) => write!(f, "{e}"),
            LocusError::SeedNotFound(fr) => write!(f, "no ray seed found for {fr}"),
            LocusError::NonConvergence { target, reached } => {
                write!(f, "Newton did not reach trace {target} (stopped at {reached})")
            }
            LocusError::DerivativeCollapse { param } => {
                write!(f, "trace derivative collapse near {param}; possible branch point")
            }
            LocusError::ZeroParameter => write!(f, "tau = 0 is outside the parameter domain"),
        }
    }
}

impl core::error::Error for LocusError {}

impl From<FamilyError> for LocusError {
    fn from(e: FamilyError) -> Self {
        LocusError::Family(e)
    }
}

/// Which one-parameter family the trace function lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Maskit,
    Koebe(i64),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Maskit => write!(f, "maskit"),
            Family::Koebe(n) => write!(f, "koebe({n})"),
        }
    }
}

/// mu -> tr W_{p/q}[S, T[mu]] or tau -> tr W_{p/q}[A_n, C_n[tau]], with the
/// word cached at construction.
#[derive(Clone, Debug)]
pub struct TraceFunction {
    pub family: Family,
    pub fraction: Fraction,
    word: FareyWord,
}

const ZERO_M: Mobius = Mobius::from_sl2(
    Complex::new(0.0, 0.0),
    Complex::new(0.0, 0.0),
    Complex::new(0.0, 0.0),
    Complex::new(0.0, 0.0),
);

fn mat_add(a: Mobius, b: Mobius) -> Mobius {
    Mobius::from_sl2(a.a + b.a, a.b + b.b, a.c + b.c, a.d + b.d)
}

impl TraceFunction {
    pub fn maskit(fraction: Fraction) -> TraceFunction {
        TraceFunction {
            family: Family::Maskit,
            fraction,
            word: word(fraction),
        }
    }

    pub fn koebe(n: i64, fraction: Fraction) -> Result<TraceFunction, LocusError> {
        if n < 2 {
            return Err(FamilyError::OrderTooSmall(n).into());
        }
        Ok(TraceFunction {
            family: Family::Koebe(n),
            fraction,
            word: word(fraction),
        })
    }

    pub fn word(&self) -> &FareyWord {
        &self.word
    }

    /// Generator pair (X, Y) at the given parameter.
    pub fn generators(&self, param: Complex) -> Result<(Mobius, Mobius), LocusError> {
        match self.family {
            Family::Maskit => Ok((generator_s(), generator_t(param))),
            Family::Koebe(n) => {
                if param.norm() == 0.0 {
                    return Err(LocusError::ZeroParameter);
                }
                let g = koebe_group(n, param)?;
                Ok((g.a, g.c))
            }
        }
    }

    /// The evaluated word matrix at the parameter.
    pub fn matrix(&self, param: Complex) -> Result<Mobius, LocusError> {
        let (x, y) = self.generators(param)?;
        Ok(evaluate(&self.word, &x, &y))
    }

    pub fn trace(&self, param: Complex) -> Result<Complex, LocusError> {
        Ok(self.matrix(param)?.trace())
    }

    /// Trace and its complex derivative, by differentiating the matrix
    /// product letter by letter (no finite differences). The derivative
    /// matrices are plain entrywise derivatives, not renormalized.
    pub fn trace_and_derivative(&self, param: Complex) -> Result<(Complex, Complex), LocusError> {
        let (x, y, dy, dyinv) = match self.family {
            Family::Maskit => {
                let t = generator_t(param);
                let dt = Mobius::from_sl2(-I, ZERO_M.b, ZERO_M.c, ZERO_M.d);
                let dtinv = Mobius::from_sl2(ZERO_M.a, ZERO_M.b, ZERO_M.c, -I);
                (generator_s(), t, dt, dtinv)
            }
            Family::Koebe(n) => {
                if param.norm() == 0.0 {
                    return Err(LocusError::ZeroParameter);
                }
                let g = koebe_group(n, param)?;
                let tau = param;
                if n == 2 {
                    // C = [[0, -1/tau], [tau, -tau]]
                    let dc = Mobius::from_sl2(
                        Complex::new(0.0, 0.0),
                        1.0 / (tau * tau) + 0.0 * I,
                        Complex::new(1.0, 0.0),
                        Complex::new(-1.0, 0.0),
                    );
                    // C^-1 = [[-tau, 1/tau], [-tau, 0]]
                    let dcinv = Mobius::from_sl2(
                        Complex::new(-1.0, 0.0),
                        -1.0 / (tau * tau) + 0.0 * I,
                        Complex::new(-1.0, 0.0),
                        Complex::new(0.0, 0.0),
                    );
                    (g.a, g.c, dc, dcinv)
                } else {
                    let (sh, ch) = ((g.d / 2.0).sinh(), (g.d / 2.0).cosh());
                    let t2 = tau * tau;
                    let dc = Mobius::from_sl2(sh + 0.0 * I, -ch + 0.0 * I, -ch / t2, sh / t2);
                    let dcinv = Mobius::from_sl2(sh / t2, ch + 0.0 * I, ch / t2, sh + 0.0 * I);
                    (g.a, g.c, dc, dcinv)
                }
            }
        };
        let xinv = x.inverse();
        let yinv = y.inverse();
        let mut m_acc = Mobius::IDENTITY;
        let mut dm_acc = ZERO_M;
        for l in &self.word.letters {
            let (m, dm) = match l {
                Letter::X => (x, ZERO_M),
                Letter::Xinv => (xinv, ZERO_M),
                Letter::Y => (y, dy),
                Letter::Yinv => (yinv, dyinv),
            };
            dm_acc = mat_add(dm_acc * m, m_acc * dm);
            m_acc = m_acc * m;
        }
        Ok((m_acc.trace(), dm_acc.trace()))
    }
}

/// Newton iteration for tr = target from the given seed. Accepts when
/// |tr - target| <= NEWTON * max(1, |target|) within 100 steps.
pub fn solve_trace(
    tf: &TraceFunction,
    target: Complex,
    seed: Complex,
) -> Result<Complex, LocusError> {
    let accept = tol::NEWTON * target.norm().max(1.0);
    let mut p = seed;
    let mut best = seed;
    let mut best_res = f64::INFINITY;
    for _ in 0..100 {
        let (tr, dtr) = tf.trace_and_derivative(p)?;
        let res = (tr - target).norm();
        if res < best_res {
            best_res = res;
            best = p;
        }
        if res <= accept {
            return Ok(p);
        }
        if dtr.norm() < tol::DERIVATIVE_FLOOR {
            return Err(LocusError::DerivativeCollapse { param: p });
        }
        // Scale both sides by the derivative's largest component before
        // dividing: traces of long words reach 1e200 and naive complex
        // division overflows to NaN beyond 1e154.
        let m = dtr.re.abs().max(dtr.im.abs());
        let step = ((tr - target) / m) / (dtr / m);
        // Damp wild steps; the trace polynomials grow fast.
        let cap = 0.5 * p.norm().max(1.0);
        let step = if step.norm() > cap {
            step * (cap / step.norm())
        } else {
            step
        };
        p -= step;
    }
    if best_res <= accept {
        Ok(best)
    } else {
        Err(LocusError::NonConvergence {
            target,
            reached: tf.trace(best).unwrap_or(Complex::new(f64::NAN, f64::NAN)),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleFlag {
    /// |tr| > 2: inside the deformation space on the pleating ray.
    Inside,
    /// |tr| = 2: the cusp / boundary point.
    Cusp,
    /// |tr| < 2: on the extension, outside the closure.
    Extended,
}

impl fmt::Display for SampleFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleFlag::Inside => write!(f, "inside"),
            SampleFlag::Cusp => write!(f, "cusp"),
            SampleFlag::Extended => write!(f, "extended"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RaySample {
    /// Real trace value at the sample (signed).
    pub t: f64,
    pub param: Complex,
    pub flag: SampleFlag,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpecialKind {
    Cusp,
    Elliptic(u32),
}

impl fmt::Display for SpecialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialKind::Cusp => write!(f, "cusp"),
            SpecialKind::Elliptic(n) => write!(f, "elliptic({n})"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SpecialPoint {
    pub kind: SpecialKind,
    pub param: Complex,
    /// |tr - target| at the refined point.
    pub residual: f64,
}

/// One continued branch of the real-trace locus, sampled from inside the
/// deformation space down through the cusp and (Maskit family) onward into
/// the extension.
#[derive(Clone, Debug)]
pub struct RayTrace {
    pub family: Family,
    pub fraction: Fraction,
    /// Sign of the real trace along this branch (cusp at sign * 2).
    pub trace_sign: f64,
    pub samples: Vec<RaySample>,
    pub special: Vec<SpecialPoint>,
    /// Set when continuation stopped early at a trace-critical point.
    pub aborted: Option<Complex>,
    /// Koebe rays: worst deviation of arg tau^2 from the sector between
    /// the two flanking integral rays.
    pub sector_residual: Option<f64>,
}

impl RayTrace {
    pub fn cusp(&self) -> Option<&SpecialPoint> {
        self.special
            .iter()
            .find(|s| matches!(s.kind, SpecialKind::Cusp))
    }

    pub fn elliptic(&self, n: u32) -> Option<&SpecialPoint> {
        self.special
            .iter()
            .find(|s| s.kind == SpecialKind::Elliptic(n))
    }

    fn nearest_sample(&self, t_abs: f64) -> Option<&RaySample> {
        self.samples.iter().min_by(|a, b| {
            let da = (a.t.abs() - t_abs).abs();
            let db = (b.t.abs() - t_abs).abs();
            da.partial_cmp(&db).unwrap_or(core::cmp::Ordering::Equal)
        })
    }
}

fn flag_for(t_abs: f64) -> SampleFlag {
    if (t_abs - 2.0).abs() <= 1e-9 {
        SampleFlag::Cusp
    } else if t_abs > 2.0 {
        SampleFlag::Inside
    } else {
        SampleFlag::Extended
    }
}

/// Scan height for Maskit ray seeding.
const SEED_HEIGHT: f64 = 8.0;

/// Finds the seed of the p/q pleating ray: the zero of Im tr on the scan
/// segment Im mu = 8 near Re mu = 2 p/q whose |tr| grows with height.
fn maskit_seed(tf: &TraceFunction) -> Result<Complex, LocusError> {
    let f = tf.fraction;
    let x0 = 2.0 * f.as_f64();
    let q = f.denom().max(1) as f64;
    for widen in 1..=3u32 {
        let w = 0.75 / q * widen as f64;
        let n_pts = 80 * widen;
        let g = |x: f64| -> Result<f64, LocusError> {
            Ok(tf.trace(Complex::new(x, SEED_HEIGHT))?.im)
        };
        let mut candidates: Vec<f64> = Vec::new();
        let mut prev_x = x0 - w;
        let mut prev_g = g(prev_x)?;
        for k in 1..=n_pts {
            let x = x0 - w + 2.0 * w * k as f64 / n_pts as f64;
            let gx = g(x)?;
            if prev_g == 0.0 || (prev_g < 0.0) != (gx < 0.0) {
                let (mut a, mut b, mut ga) = (prev_x, x, prev_g);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    let gm = g(m)?;
                    if (ga < 0.0) != (gm < 0.0) {
                        b = m;
                    } else {
                        a = m;
                        ga = gm;
                    }
                }
                candidates.push(0.5 * (a + b));
            }
            prev_x = x;
            prev_g = gx;
        }
        // Prefer roots close to the asymptote whose |tr| grows with height.
        candidates.sort_by(|a, b| {
            (a - x0)
                .abs()
                .partial_cmp(&(b - x0).abs())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        for x in candidates {
            let lo = tf.trace(Complex::new(x, SEED_HEIGHT))?.norm();
            let hi = tf.trace(Complex::new(x, SEED_HEIGHT + 1.0))?.norm();
            if hi > lo {
                return Ok(Complex::new(x, SEED_HEIGHT));
            }
        }
    }
    Err(LocusError::SeedNotFound(f))
}

/// Continuation driver: marches |tr| from the seed value toward
/// `t_end_abs`, recording samples once |tr| <= t_record_from.
fn continue_ray(
    tf: &TraceFunction,
    seed: Complex,
    t_record_from: f64,
    t_end_abs: f64,
    step: f64,
    stop_at_cusp: bool,
) -> Result<RayTrace, LocusError> {
    let tr0 = tf.trace(seed)?;
    let sign = if tr0.re >= 0.0 { 1.0 } else { -1.0 };
    // Land exactly on the locus first.
    let mut param = solve_trace(tf, Complex::new(tr0.re, 0.0), seed)?;
    let mut t_abs = tf.trace(param)?.re.abs();

    let mut ray = RayTrace {
        family: tf.family,
        fraction: tf.fraction,
        trace_sign: sign,
        samples: Vec::new(),
        special: Vec::new(),
        aborted: None,
        sector_residual: None,
    };

    let record = |ray: &mut RayTrace, t_signed: f64, p: Complex| {
        ray.samples.push(RaySample {
            t: t_signed,
            param: p,
            flag: flag_for(t_signed.abs()),
        });
    };
    if t_abs <= t_record_from {
        record(&mut ray, sign * t_abs, param);
    }

    let mut crossed_cusp = t_abs <= 2.0;
    let floor = if stop_at_cusp { t_end_abs.max(2.0) } else { t_end_abs };
    while t_abs > floor + 1e-12 {
        // Geometric steps while the trace is huge, fixed steps below.
        let dt = if t_abs > 8.0 {
            (0.2 * t_abs).max(step)
        } else {
            step
        };
        let mut dt = dt.min(t_abs - floor).max(1e-9);
        // Do not step across the cusp; land on it exactly.
        if !crossed_cusp && t_abs > 2.0 && t_abs - dt < 2.0 {
            dt = t_abs - 2.0;
        }
        let target_abs = t_abs - dt;
        let mut ok = false;
        let mut sub = dt;
        let mut t_try = target_abs;
        for _ in 0..24 {
            match solve_trace(tf, Complex::new(sign * t_try, 0.0), param) {
                Ok(p) => {
                    param = p;
                    t_abs = t_try;
                    ok = true;
                    break;
                }
                Err(LocusError::DerivativeCollapse { param: p }) => {
                    ray.aborted = Some(p);
                    return Ok(ray);
                }
                Err(_) => {
                    sub *= 0.5;
                    t_try = t_abs - sub;
                    if sub < 1e-12 {
                        break;
                    }
                }
            }
        }
        if !ok {
            ray.aborted = Some(param);
            return Ok(ray);
        }
        if (t_abs - 2.0).abs() <= 1e-9 && !crossed_cusp {
            crossed_cusp = true;
            let residual = (tf.trace(param)?.re.abs() - 2.0).abs();
            ray.special.push(SpecialPoint {
                kind: SpecialKind::Cusp,
                param,
                residual,
            });
        }
        if t_abs <= t_record_from {
            record(&mut ray, sign * t_abs, param);
        }
    }
    Ok(ray)
}

/// Traces the Maskit p/q pleating ray and its extension: samples run from
/// |tr| = t_start down to |tr| = t_end (t_end < 2 reaches into the
/// extension), stepping by `step`, with the cusp refined en route.
pub fn trace_ray(
    tf: &TraceFunction,
    t_start: f64,
    t_end: f64,
    step: f64,
) -> Result<RayTrace, LocusError> {
    let seed = maskit_seed(tf)?;
    continue_ray(tf, seed, t_start, t_end, step, false)
}

/// The sector containing the p/q ray of M_n, bounded by the two flanking
/// integral (radial) rays: arg tau^2 in [-2 pi (k+1)/n, -2 pi k/n] with k
/// the integral part of p/q mod n.
pub fn koebe_sector(n: i64, f: Fraction) -> (f64, f64) {
    let v = f.as_f64();
    let k = Euclid::rem_euclid(&v, &(n as f64)).floor();
    (-2.0 * PI * (k + 1.0) / n as f64, -2.0 * PI * k / n as f64)
}

fn wrap_angle(x: f64) -> f64 {
    let mut a = Euclid::rem_euclid(&x, &(2.0 * PI));
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Traces the p/q pleating ray of M_n from large |tau| to its boundary
/// point tau_{p/q} (where the word turns parabolic), checking the sector
/// containment along the way.
pub fn koebe_ray(n: i64, f: Fraction) -> Result<RayTrace, LocusError> {
    koebe_ray_with(n, f, 60.0, 0.05)
}

pub fn koebe_ray_with(
    n: i64,
    f: Fraction,
    t_record_from: f64,
    step: f64,
) -> Result<RayTrace, LocusError> {
    let tf = TraceFunction::koebe(n, f)?;
    // Asymptotic argument of the ray: arg tau^2 = -2 pi p/(q n).
    let theta = -PI * f.as_f64() / n as f64;
    let seed = Complex::from_polar(120.0, theta);
    let mut ray = continue_ray(&tf, seed, t_record_from, 2.0, step, true)?;
    let (lo, hi) = koebe_sector(n, f);
    let mut worst: f64 = 0.0;
    for s in &ray.samples {
        let arg2 = wrap_angle(2.0 * s.param.arg());
        let inside = wrap_angle(arg2 - lo) >= -1e-12 && wrap_angle(hi - arg2) >= -1e-12;
        if !inside {
            let d = wrap_angle(arg2 - lo).abs().min(wrap_angle(arg2 - hi).abs());
            worst = worst.max(d);
        }
    }
    ray.sector_residual = Some(worst);
    Ok(ray)
}

/// Refines mu_{p/q}(n) (or the Koebe analog) on an already-traced ray:
/// solves |tr| = 2 cos(pi/n) on the branch with the ray's sign.
pub fn elliptic_point(
    tf: &TraceFunction,
    n: u32,
    ray: &RayTrace,
) -> Result<SpecialPoint, LocusError> {
    let t_abs = 2.0 * (PI / n as f64).cos();
    let target = ray.trace_sign * t_abs;
    let seed = ray
        .nearest_sample(t_abs)
        .map(|s| s.param)
        .or_else(|| ray.cusp().map(|c| c.param))
        .ok_or(LocusError::SeedNotFound(tf.fraction))?;
    let param = solve_trace(tf, Complex::new(target, 0.0), seed)?;
    let residual = (tf.trace(param)? - target).norm();
    Ok(SpecialPoint {
        kind: SpecialKind::Elliptic(n),
        param,
        residual,
    })
}

/// Full pipeline for the Maskit family: traces the p/q ray, refines the
/// cusp and the requested elliptic points mu_{p/q}(n).
pub fn maskit_ray_with_elliptics(f: Fraction, orders: &[u32]) -> Result<RayTrace, LocusError> {
    let tf = TraceFunction::maskit(f);
    let t_end = orders
        .iter()
        .map(|&n| 2.0 * (PI / n as f64).cos())
        .fold(1.0f64, f64::min)
        * 0.5;
    let mut ray = trace_ray(&tf, 12.0, t_end.max(0.05), 0.05)?;
    for &n in orders {
        let sp = elliptic_point(&tf, n, &ray)?;
        ray.special.push(sp);
    }
    Ok(ray)
}

/// The cusp parameter mu_{p/q} alone.
pub fn maskit_cusp(f: Fraction) -> Result<SpecialPoint, LocusError> {
    let tf = TraceFunction::maskit(f);
    let ray = trace_ray(&tf, 12.0, 1.8, 0.05)?;
    ray.cusp().copied().ok_or(LocusError::SeedNotFound(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::Classification;

    fn frac(p: i64, q: i64) -> Fraction {
        Fraction::new(p, q).unwrap()
    }

    #[test]
    fn trace_closed_forms() {
        let tf0 = TraceFunction::maskit(frac(0, 1));
        let mu = Complex::new(0.4, 1.9);
        // tr T = -i mu
        assert!((tf0.trace(mu).unwrap() - (-I * mu)).norm() < 1e-14);
        let tf12 = TraceFunction::maskit(frac(1, 2));
        let expect = -mu * mu + 2.0 * mu - 2.0;
        assert!((tf12.trace(mu).unwrap() - expect).norm() < 1e-13);
    }

    #[test]
    fn koebe_integer_trace_form() {
        // Im tr W_{m/1} = (t + 1/t) sinh(d/2) sin(phi + pi m / n).
        let n = 5;
        let m = 2;
        let tf = TraceFunction::koebe(n, frac(m, 1)).unwrap();
        let (t, phi) = (3.3, 0.7);
        let tau = Complex::from_polar(t, phi);
        let g = koebe_group(n, tau).unwrap();
        let sh = (g.d / 2.0).sinh();
        let expect = (t + 1.0 / t) * sh * (phi + PI * m as f64 / n as f64).sin();
        assert!((tf.trace(tau).unwrap().im - expect).abs() < 1e-12);
    }

    #[test]
    fn derivative_closed_forms() {
        let tf0 = TraceFunction::maskit(frac(0, 1));
        let mu = Complex::new(-0.3, 2.2);
        let (_, d) = tf0.trace_and_derivative(mu).unwrap();
        assert!((d - (-I)).norm() < 1e-14);
        // d/dmu (-mu^2 + 2 mu - 2) = -2 mu + 2, zero at mu = 1.
        let tf12 = TraceFunction::maskit(frac(1, 2));
        let (_, d) = tf12.trace_and_derivative(Complex::new(1.0, 0.0)).unwrap();
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-5;
        for (fam, params) in [
            (Family::Maskit, [Complex::new(0.7, 1.3), Complex::new(-1.2, 2.4)]),
            (Family::Koebe(5), [Complex::new(2.0, 1.1), Complex::new(-1.4, 2.2)]),
        ] {
            for q in 1..=10i64 {
                let p = if q > 2 { q - 2 } else { 1 };
                let f = Fraction::new(p, q).unwrap();
                let tf = match fam {
                    Family::Maskit => TraceFunction::maskit(f),
                    Family::Koebe(n) => TraceFunction::koebe(n, f).unwrap(),
                };
                for z in params {
                    let (_, d) = tf.trace_and_derivative(z).unwrap();
                    let fd = (tf.trace(z + h).unwrap() - tf.trace(z - h).unwrap()) / (2.0 * h);
                    let rel = (d - fd).norm() / d.norm().max(1.0);
                    assert!(rel < 1e-6, "family {fam:?} fraction {f}: rel {rel}");
                }
            }
        }
    }

    #[test]
    fn solve_trace_examples() {
        // Maskit 0/1: -i mu = 2 at mu = 2i.
        let tf = TraceFunction::maskit(frac(0, 1));
        let root = solve_trace(&tf, Complex::new(2.0, 0.0), Complex::new(0.0, 2.5)).unwrap();
        assert!((root - Complex::new(0.0, 2.0)).norm() < 1e-10);
        // Maskit 1/2 cusp at 1 + i sqrt 3.
        let tf = TraceFunction::maskit(frac(1, 2));
        let root = solve_trace(&tf, Complex::new(2.0, 0.0), Complex::new(1.0, 2.0)).unwrap();
        assert!((root - Complex::new(1.0, 3.0_f64.sqrt())).norm() < 1e-10);
        // Order-4 elliptic point from the cusp seed.
        let root = solve_trace(&tf, Complex::new(2.0_f64.sqrt(), 0.0), root).unwrap();
        let expect = Complex::new(1.0, (1.0 + 2.0_f64.sqrt()).sqrt());
        assert!((root - expect).norm() < 1e-10);
    }

    #[test]
    fn ray_0_1_is_imaginary_axis() {
        let tf = TraceFunction::maskit(frac(0, 1));
        let ray = trace_ray(&tf, 8.0, 0.4, 0.1).unwrap();
        assert!(ray.aborted.is_none());
        assert!(!ray.samples.is_empty());
        for s in &ray.samples {
            assert!(s.param.re.abs() < 1e-9, "sample off the axis: {}", s.param);
            assert!(tf.trace(s.param).unwrap().im.abs() < 1e-9);
        }
        let cusp = ray.cusp().expect("cusp crossed");
        assert!((cusp.param - Complex::new(0.0, 2.0)).norm() < 1e-8);
        // Extension samples present with |tr| < 2.
        assert!(ray.samples.iter().any(|s| s.flag == SampleFlag::Extended));
        // Monotone |tr| along the record.
        for w in ray.samples.windows(2) {
            assert!(w[0].t.abs() > w[1].t.abs() - 1e-12);
        }
    }

    #[test]
    fn ray_1_2_special_points() {
        let ray = maskit_ray_with_elliptics(frac(1, 2), &[2, 3, 4]).unwrap();
        let cusp = ray.cusp().unwrap();
        assert!((cusp.param - Complex::new(1.0, 3.0_f64.sqrt())).norm() < 1e-8);
        for (n, expect_im) in [
            (2u32, 1.0),
            (3, 2.0_f64.sqrt()),
            (4, (1.0 + 2.0_f64.sqrt()).sqrt()),
        ] {
            let sp = ray.elliptic(n).unwrap();
            assert!(
                (sp.param - Complex::new(1.0, expect_im)).norm() < 1e-8,
                "n = {n}: got {}",
                sp.param
            );
            let tf = TraceFunction::maskit(frac(1, 2));
            let m = tf.matrix(sp.param).unwrap();
            assert!(m.classify(crate::tol::TRACE).is_elliptic_of_order(n), "n = {n}");
        }
    }

    #[test]
    fn integral_rays_are_translates() {
        for m in -2..=2i64 {
            let ray = maskit_ray_with_elliptics(frac(m, 1), &[2, 5]).unwrap();
            let cusp = ray.cusp().unwrap();
            assert!(
                (cusp.param - Complex::new(2.0 * m as f64, 2.0)).norm() < 1e-9,
                "m = {m}: cusp {}",
                cusp.param
            );
            for s in &ray.special {
                if let SpecialKind::Elliptic(n) = s.kind {
                    let expect = Complex::new(2.0 * m as f64, 2.0 * (PI / n as f64).cos());
                    assert!((s.param - expect).norm() < 1e-10, "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn koebe_ray_0_1_endpoint() {
        let ray = koebe_ray(4, frac(0, 1)).unwrap();
        let cusp = ray.cusp().expect("boundary point");
        let tau2 = cusp.param * cusp.param;
        assert!((tau2 - (3.0 + 2.0 * 2.0_f64.sqrt())).norm() < 1e-8, "{tau2}");
        assert!(ray.sector_residual.unwrap() < 1e-9);
        // The boundary word is parabolic.
        let tf = TraceFunction::koebe(4, frac(0, 1)).unwrap();
        let m = tf.matrix(cusp.param).unwrap();
        assert_eq!(m.classify(crate::tol::TRACE), Classification::Parabolic);
    }

    #[test]
    fn koebe_integral_rays_are_radial() {
        let n = 5;
        for m in 0..n {
            let ray = koebe_ray(n, frac(m, 1)).unwrap();
            assert!(!ray.samples.is_empty());
            for s in &ray.samples {
                let want = -2.0 * PI * m as f64 / n as f64;
                let got = 2.0 * s.param.arg();
                assert!(
                    wrap_angle(got - want).abs() < 1e-9,
                    "m={m}: arg tau^2 = {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn koebe_half_ray_in_sector() {
        let ray = koebe_ray(4, frac(1, 2)).unwrap();
        assert!(ray.sector_residual.unwrap() <= 1e-9);
        let (lo, hi) = koebe_sector(4, frac(1, 2));
        assert!((lo - (-PI / 2.0)).abs() < 1e-15 && hi.abs() < 1e-15);
        assert!(ray.cusp().is_some());
    }

    #[test]
    fn koebe_asymptotic_leading_term() {
        // |tr W - e^{i p pi / n} tau^q sinh(d/2)^q| / R^q shrinks as R grows.
        let n = 6;
        for f in [frac(1, 2), frac(2, 3), frac(1, 1)] {
            let tf = TraceFunction::koebe(n, f).unwrap();
            let theta = -PI * f.as_f64() / n as f64;
            let mut prev = f64::INFINITY;
            for r in [1e2, 1e3] {
                let tau = Complex::from_polar(r, theta);
                let g = koebe_group(n, tau).unwrap();
                let sh = (g.d / 2.0).sinh();
                let q = f.denom() as i32;
                let lead = Complex::from_polar(1.0, PI * f.numer() as f64 / n as f64)
                    * tau.powi(q)
                    * sh.powi(q);
                let err = (tf.trace(tau).unwrap() - lead).norm() / r.powi(q);
                assert!(err < prev, "ratio test failed for {f} at R = {r}");
                prev = err;
            }
        }
    }

    #[test]
    fn dehn_shift_trace_compatibility() {
        // The twist mu -> mu + 2 carries the (p+q)/q trace function onto the
        // p/q one: tr W_{(p+q)/q}[mu + 2] = +- tr W_{p/q}[mu], q <= 5.
        // (T[mu + 2] = S T[mu] exactly, so the substitution Y -> XY shifts
        // the slope index by one.)
        let mu = Complex::new(0.37, 1.77);
        for q in 1..=5i64 {
            for p in -q..=q {
                let f = Fraction::new(p, q).unwrap();
                if f.denom() != q {
                    continue;
                }
                let g = Fraction::new(p + q, q).unwrap();
                let lhs = TraceFunction::maskit(g).trace(mu + 2.0).unwrap();
                let rhs = TraceFunction::maskit(f).trace(mu).unwrap();
                let ok = (lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0)
                    || (lhs + rhs).norm() < 1e-9 * rhs.norm().max(1.0);
                assert!(ok, "{f}: {lhs} vs {rhs}");
            }
        }
    }
}

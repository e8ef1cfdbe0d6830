//! The two parameterized group families: the Maskit-slice groups G[mu] and
//! the Koebe groups G_n[tau], with their distinguished elements and
//! constants.

use crate::moebius::{Complex, Mobius};
// Shadowed by std's inherent methods under cfg(test).
#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;
use core::fmt;

const I: Complex = Complex::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyError {
    OrderTooSmall(i64),
    ZeroTau,
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::OrderTooSmall(n) => write!(f, "Koebe family needs n >= 2, got {n}"),
            FamilyError::ZeroTau => write!(f, "tau = 0 is outside every deformation space"),
        }
    }
}

impl core::error::Error for FamilyError {}

/// The group G[mu] = <S, T[mu]> with its derived elements.
#[derive(Clone, Copy, Debug)]
pub struct MaskitGroup {
    pub mu: Complex,
    pub s: Mobius,
    pub t: Mobius,
    /// T^-1 S^-1 T = [[1,0],[-2,1]], independent of mu.
    pub s_tilde: Mobius,
    /// K = S S~, the puncture parabolic; tr K = -2.
    pub k: Mobius,
}

/// S = [[1, 2], [0, 1]].
pub fn generator_s() -> Mobius {
    Mobius::from_sl2(
        Complex::new(1.0, 0.0),
        Complex::new(2.0, 0.0),
        Complex::new(0.0, 0.0),
        Complex::new(1.0, 0.0),
    )
}

/// T[mu] = [[-i mu, -i], [-i, 0]], acting as z -> mu + 1/z.
pub fn generator_t(mu: Complex) -> Mobius {
    Mobius::from_sl2(-I * mu, -I, -I, Complex::new(0.0, 0.0))
}

pub fn maskit_group(mu: Complex) -> MaskitGroup {
    let s = generator_s();
    let t = generator_t(mu);
    let s_tilde = t.inverse() * s.inverse() * t;
    let k = s * s_tilde;
    MaskitGroup {
        mu,
        s,
        t,
        s_tilde,
        k,
    }
}

/// The reflection E(z) = -z as a normalized matrix; G[mu] = E G[-mu] E.
pub fn reflection_e() -> Mobius {
    Mobius::from_sl2(
        Complex::new(0.0, -1.0),
        Complex::new(0.0, 0.0),
        Complex::new(0.0, 0.0),
        I,
    )
}

/// Reduces mu to the wedge 0 <= Re mu <= 1, Im mu >= 0 using the symmetries
/// of the family: conjugation by E (mu -> -mu), the Dehn shift mu -> mu + 2,
/// and complex conjugation of the group (mu -> conj mu). The composite
/// mu -> -conj(mu) reflects across the imaginary axis keeping Im fixed.
pub fn normalize_parameter(mu: Complex) -> Complex {
    let mut m = if mu.im < 0.0 { mu.conj() } else { mu };
    let k = (m.re / 2.0).round();
    m.re -= 2.0 * k;
    if m.re < 0.0 {
        m = Complex::new(-m.re, m.im);
    }
    m
}

/// The group G_n[tau] = <A_n, B_n, C_n[tau]> for finite n >= 2.
#[derive(Clone, Copy, Debug)]
pub struct KoebeGroup {
    pub n: i64,
    pub tau: Complex,
    pub a: Mobius,
    pub b: Mobius,
    pub c: Mobius,
    /// K_n = A_n B_n, parabolic.
    pub k: Mobius,
    /// Hyperbolic distance between the fixed points of A and B in the
    /// invariant disk; d_n = 2 arcosh(1/sin(pi/n)). Degenerates to 0 at
    /// n = 2, where the matrices below are the dihedral special case.
    pub d: f64,
}

pub fn koebe_group(n: i64, tau: Complex) -> Result<KoebeGroup, FamilyError> {
    if n < 2 {
        return Err(FamilyError::OrderTooSmall(n));
    }
    if tau.norm() == 0.0 {
        return Err(FamilyError::ZeroTau);
    }
    if n == 2 {
        let a = Mobius::from_sl2(I, Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), -I);
        let b = Mobius::from_sl2(I, Complex::new(0.0, -2.0), Complex::new(0.0, 0.0), -I);
        // Inverse of the dihedral gluing map printed in the source family,
        // oriented so that C^-1 A C = B^-1 holds like the n >= 3 case.
        let c = Mobius::from_sl2(
            Complex::new(0.0, 0.0),
            -1.0 / tau + 0.0 * I,
            tau,
            -tau,
        );
        let k = a * b;
        return Ok(KoebeGroup {
            n,
            tau,
            a,
            b,
            c,
            k,
            d: 0.0,
        });
    }
    let angle = PI / n as f64;
    let (sin, cos) = angle.sin_cos();
    let d = 2.0 * (1.0 / sin).acosh();
    let (sh, ch) = ((d / 2.0).sinh(), (d / 2.0).cosh());
    let a = Mobius::from_sl2(
        Complex::from_polar(1.0, -angle),
        Complex::new(0.0, 0.0),
        Complex::new(0.0, 0.0),
        Complex::from_polar(1.0, angle),
    );
    let cosh_d = d.cosh();
    let sinh_d = d.sinh();
    let b = Mobius::from_sl2(
        I * sin * cosh_d - cos,
        -I * sin * sinh_d,
        I * sin * sinh_d,
        -I * sin * cosh_d - cos,
    );
    let c = Mobius::from_sl2(tau * sh, -tau * ch, ch / tau, -sh / tau);
    let k = a * b;
    Ok(KoebeGroup {
        n,
        tau,
        a,
        b,
        c,
        k,
        d,
    })
}

impl KoebeGroup {
    /// The deformation-space coordinate tau^2.
    pub fn tau_squared(&self) -> Complex {
        self.tau * self.tau
    }

    /// The plotted coordinate i tr C = i sinh(d/2)(tau - 1/tau).
    pub fn plot_coordinate(&self) -> Complex {
        I * self.c.trace()
    }
}

/// |tau| > this radius guarantees G_n[tau] is a Koebe group representing a
/// punctured torus: coth(d_n/4) = (1 + sin(pi/n))/cos(pi/n) for n >= 3,
/// and 2 for the dihedral family.
pub fn koebe_discreteness_radius(n: i64) -> Result<f64, FamilyError> {
    if n < 2 {
        return Err(FamilyError::OrderTooSmall(n));
    }
    if n == 2 {
        return Ok(2.0);
    }
    let angle = PI / n as f64;
    Ok((1.0 + angle.sin()) / angle.cos())
}

/// tau_{0/1}^2 = (1 + sin(pi/n))/(1 - sin(pi/n)), the boundary point of the
/// 0/1 pleating ray of M_n; the positive root is returned.
pub fn tau_boundary_01(n: i64) -> Result<f64, FamilyError> {
    if n < 3 {
        return Err(FamilyError::OrderTooSmall(n));
    }
    let s = (PI / n as f64).sin();
    Ok(((1.0 + s) / (1.0 - s)).sqrt())
}

/// The conjugator of the m = 0 integral-ray identification: the unique map
/// with beta(i e^{-i pi/n} - 2) = 0, beta(i e^{i pi/n} - 2) = inf,
/// beta(-1) = e^{-i pi/n}. Conjugates (S^-1 T^-1 S, T, S) at mu_0(n) to
/// (A_n, B_n, C_n[tau_{0/1}]^-1); the C-image comes out as the inverse of
/// the matrix normalized by C^-1 A C = B^-1, which generates the same
/// group.
pub fn beta_conjugator(n: i64) -> Result<Mobius, FamilyError> {
    if n < 3 {
        return Err(FamilyError::OrderTooSmall(n));
    }
    use crate::moebius::ExtPoint;
    let angle = PI / n as f64;
    let z1 = I * Complex::from_polar(1.0, -angle) - 2.0;
    let z2 = I * Complex::from_polar(1.0, angle) - 2.0;
    let z3 = Complex::new(-1.0, 0.0);
    let w3 = Complex::from_polar(1.0, -angle);
    Ok(Mobius::three_point_map(
        (z1.into(), z2.into(), z3.into()),
        (ExtPoint::Finite(Complex::new(0.0, 0.0)), ExtPoint::Infinity, w3.into()),
    )
    .expect("the three sources and targets are distinct for n >= 3"))
}

/// Hyperbolic area of Omega(G)/G for the order-n extension groups:
/// 2 pi (1 - 2/n) + 2 pi for hyperbolic n, 2 pi for the dihedral case.
pub fn quotient_area(n: i64) -> Result<f64, FamilyError> {
    if n < 2 {
        return Err(FamilyError::OrderTooSmall(n));
    }
    if n == 2 {
        return Ok(2.0 * PI);
    }
    Ok(2.0 * PI * (1.0 - 2.0 / n as f64) + 2.0 * PI)
}

//! Circle chains: the tangent chains of the cusp groups, their transport
//! along the extended ray to the elliptic parameters, the per-condition
//! verification report, and the pleating curves bounding the combination
//! regions.
//!
//! Conventions (recorded here because the source index dictionaries are
//! ambiguous): the base disk is the closed lower half-plane H* with chain
//! index q; both generator actions shift chain indices down, Z(D_j) =
//! D_{j-s} and X(D_j) = D_{j-q}; the window D_0..D_q is generated from the
//! base by the alternating walk (Z-steps, with an X^-1 bump whenever the
//! index would leave [0, q]); finite chains at an order-n parameter close
//! up modulo n q. verify_combinatorial checks the closure instead of
//! assuming it.

use crate::families::maskit_group;
use crate::farey::{core_word, evaluate, farey_parents, word, FareyError, Fraction};
use crate::locus::{self, LocusError, TraceFunction};
use crate::moebius::{Complex, ExtPoint, GeneralizedDisk, Mobius};
use crate::tol;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;
// Shadowed by std's inherent methods under cfg(test).
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Debug)]
pub enum ChainError {
    /// Cusp chains need 0 < p/q < 1; integral fractions take the
    /// half-plane path in build_elliptic_chain.
    FractionOutOfRange(Fraction),
    Farey(FareyError),
    Locus(LocusError),
    /// pleating_curves needs a tangent chain.
    NotTangent { index: i64, gap: f64 },
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainError::FractionOutOfRange(x) => {
                write!(f, "chain construction needs 0 < p/q < 1, got {x}")
            }
            ChainError::Farey(e) => write!(f, "{e}"),
            ChainError::Locus(e) => write!(f, "{e}"),
            ChainError::NotTangent { index, gap } => {
                write!(f, "chain is not tangent at index {index} (gap {gap:e})")
            }
        }
    }
}

impl core::error::Error for ChainError {}

impl From<FareyError> for ChainError {
    fn from(e: FareyError) -> Self {
        ChainError::Farey(e)
    }
}

impl From<LocusError> for ChainError {
    fn from(e: LocusError) -> Self {
        ChainError::Locus(e)
    }
}

/// Letters of carrier words over the remarked generator pair (X, Z).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XZLetter {
    X,
    Xinv,
    Z,
    Zinv,
}

pub type CarrierWord = Vec<XZLetter>;

fn eval_carrier(w: &CarrierWord, x: &Mobius, z: &Mobius) -> Mobius {
    let xi = x.inverse();
    let zi = z.inverse();
    let mut out = Mobius::IDENTITY;
    for l in w {
        let m = match l {
            XZLetter::X => x,
            XZLetter::Xinv => &xi,
            XZLetter::Z => z,
            XZLetter::Zinv => &zi,
        };
        out = out * *m;
    }
    out
}

#[derive(Clone, Debug)]
pub struct ChainEntry {
    /// Chain index (an integer for cusp windows, a residue mod nq for
    /// finite chains).
    pub index: i64,
    /// Carrier as a word in X and Z, so the entry can be re-evaluated at a
    /// different parameter (the analytic transport of the chain).
    pub carrier_word: CarrierWord,
    pub carrier: Mobius,
    pub disk: GeneralizedDisk,
}

/// A circle chain for the remarked pair X = W_{p/q}, Z = W_{r/s}.
#[derive(Clone, Debug)]
pub struct Chain {
    pub fraction: Fraction,
    /// Upper Farey parent r/s (1/0 for integral fractions).
    pub upper: Fraction,
    /// Finite elliptic order, or None at a cusp.
    pub order: Option<u32>,
    pub mu: Complex,
    pub x: Mobius,
    pub z: Mobius,
    pub base: GeneralizedDisk,
    pub entries: Vec<ChainEntry>,
    /// Integral fractions degenerate to the two-half-plane configuration.
    pub integral: bool,
}

impl Chain {
    pub fn disk_count(&self) -> usize {
        self.entries.len()
    }

    fn entry(&self, index: i64) -> Option<&ChainEntry> {
        self.entries.iter().find(|e| e.index == index)
    }

    /// The composed core word W_{-s/q}[X, Z]; equals +-S^-1 for every mu.
    pub fn core_element(&self) -> Mobius {
        let outer = Fraction::new(-self.upper.denom(), self.fraction.denom()).unwrap();
        evaluate(&core_word(outer), &self.x, &self.z)
    }

    /// Re-evaluates every carrier at a new parameter (the analytic
    /// transport of the chain); the carrier words are fixed, only the
    /// matrices move.
    pub fn transported(&self, mu: Complex) -> Chain {
        let g = maskit_group(mu);
        let x = evaluate(&word(self.fraction), &g.s, &g.t);
        let z = evaluate(&word(self.upper), &g.s, &g.t);
        let base = self.base;
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let carrier = eval_carrier(&e.carrier_word, &x, &z);
                ChainEntry {
                    index: e.index,
                    carrier_word: e.carrier_word.clone(),
                    carrier,
                    disk: carrier.map_disk(&base),
                }
            })
            .collect();
        Chain {
            fraction: self.fraction,
            upper: self.upper,
            order: self.order,
            mu,
            x,
            z,
            base,
            entries,
            integral: self.integral,
        }
    }
}

/// One step of the generating walk. After the Dehn remarking C' = Z^-1 X
/// the chain has the positive fraction (q - s)/q and the window recursion
/// takes its standard alternating form: from an index below q apply C'
/// (index rises by q - s), otherwise apply X^-1 (index falls by q). The
/// walk starts at the base (index q) and visits all of [0, 2q - s) once,
/// since gcd(q - s, q) = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
struct WalkStep {
    from: i64,
    to: i64,
    /// True for a C'-step, false for an X^-1 step.
    cprime: bool,
}

fn window_walk(q: i64, s: i64) -> Vec<WalkStep> {
    let span = 2 * q - s;
    let mut steps = Vec::with_capacity((span - 1) as usize);
    let mut j = q;
    for _ in 0..span - 1 {
        let (next, cprime) = if j < q { (j + q - s, true) } else { (j - q, false) };
        steps.push(WalkStep {
            from: j,
            to: next,
            cprime,
        });
        j = next;
    }
    steps
}

/// Carrier words for every window index in [0, 2q - s); the base at index
/// q carries the empty word.
fn window_words(q: i64, s: i64) -> Vec<(i64, CarrierWord)> {
    let mut out: Vec<(i64, CarrierWord)> = vec![(q, CarrierWord::new())];
    let mut w = CarrierWord::new();
    for step in window_walk(q, s) {
        let mut nw = if step.cprime {
            vec![XZLetter::Zinv, XZLetter::X]
        } else {
            vec![XZLetter::Xinv]
        };
        nw.extend(w.iter().copied());
        w = nw;
        out.push((step.to, w.clone()));
    }
    out.sort_by_key(|(i, _)| *i);
    out
}

/// Carrier word for an arbitrary chain index: X^t c_j with j = i mod q
/// (X shifts the index up by q).
fn carrier_word_for(index: i64, q: i64, window: &[(i64, CarrierWord)]) -> CarrierWord {
    let j = index.rem_euclid(q);
    let t = (index - j) / q;
    let base = window
        .iter()
        .find(|(i, _)| *i == j)
        .map(|(_, w)| w.clone())
        .unwrap_or_default();
    let mut out = CarrierWord::new();
    let letter = if t >= 0 { XZLetter::X } else { XZLetter::Xinv };
    for _ in 0..t.unsigned_abs() {
        out.push(letter);
    }
    out.extend(base);
    out
}

fn generators_at(
    f: Fraction,
    mu: Complex,
) -> Result<(Fraction, Mobius, Mobius), ChainError> {
    let upper = if f.is_integer() {
        Fraction::INFINITY
    } else {
        farey_parents(f)?.1
    };
    let g = maskit_group(mu);
    let x = evaluate(&word(f), &g.s, &g.t);
    let z = evaluate(&word(upper), &g.s, &g.t);
    Ok((upper, x, z))
}

fn assemble(
    f: Fraction,
    upper: Fraction,
    order: Option<u32>,
    mu: Complex,
    x: Mobius,
    z: Mobius,
    indices: impl Iterator<Item = i64>,
) -> Chain {
    let q = f.denom();
    let s = upper.denom();
    let window = window_words(q, s);
    let base = GeneralizedDisk::lower_half_plane();
    let entries = indices
        .map(|i| {
            let carrier_word = carrier_word_for(i, q, &window);
            let carrier = eval_carrier(&carrier_word, &x, &z);
            ChainEntry {
                index: i,
                carrier_word,
                carrier,
                disk: carrier.map_disk(&base),
            }
        })
        .collect();
    Chain {
        fraction: f,
        upper,
        order,
        mu,
        x,
        z,
        base,
        entries,
        integral: false,
    }
}

/// Builds the tangent chain of the cusp group G[mu_{p/q}]: `window` disks
/// ending at the base, indices q - window + 1 ..= q. A zero window gives
/// an empty chain.
pub fn build_cusp_chain(f: Fraction, window: usize) -> Result<Chain, ChainError> {
    let mu = locus::maskit_cusp(f)?.param;
    build_cusp_chain_at(f, window, mu)
}

/// Same, at an explicitly provided parameter (used for transport tests).
pub fn build_cusp_chain_at(
    f: Fraction,
    window: usize,
    mu: Complex,
) -> Result<Chain, ChainError> {
    if f.numer() <= 0 || f.denom() <= f.numer() {
        return Err(ChainError::FractionOutOfRange(f));
    }
    let (upper, x, z) = generators_at(f, mu)?;
    let q = f.denom();
    let lo = q - window as i64 + 1;
    Ok(assemble(f, upper, None, mu, x, z, lo..=q))
}

/// Builds the finite combinatorial chain of nq disks at mu_{p/q}(n), where
/// W_{p/q} is elliptic of order n; integral fractions yield the degenerate
/// two-half-plane configuration.
pub fn build_elliptic_chain(f: Fraction, n: u32) -> Result<Chain, ChainError> {
    let ray = locus::maskit_ray_with_elliptics(f_norm(f), &[n])?;
    let mu = ray
        .elliptic(n)
        .ok_or(LocusError::SeedNotFound(f))?
        .param;
    build_elliptic_chain_at(f, n, mu)
}

fn f_norm(f: Fraction) -> Fraction {
    f
}

pub fn build_elliptic_chain_at(f: Fraction, n: u32, mu: Complex) -> Result<Chain, ChainError> {
    if f.is_integer() {
        return integral_chain(f, n, mu);
    }
    if f.numer() <= 0 || f.denom() <= f.numer() {
        return Err(ChainError::FractionOutOfRange(f));
    }
    let (upper, x, z) = generators_at(f, mu)?;
    let q = f.denom();
    Ok(assemble(
        f,
        upper,
        Some(n),
        mu,
        x,
        z,
        0..(n as i64 * q),
    ))
}

/// The integral case: W_{m/1} acts as T[2 i cos(pi/n)] after the shift
/// normalization, and the chain degenerates to the half-planes
/// {Re z <= -2} and {Re z >= 0} translated by 2m.
fn integral_chain(f: Fraction, n: u32, mu: Complex) -> Result<Chain, ChainError> {
    let (upper, x, z) = generators_at(f, mu)?;
    let shift = 2.0 * f.numer() as f64;
    let d1 = GeneralizedDisk::half_plane(
        Complex::new(-2.0 + shift, 0.0),
        Complex::new(0.0, 1.0),
    ); // Re z <= -2 + 2m
    let d2 = GeneralizedDisk::half_plane(Complex::new(shift, 0.0), Complex::new(0.0, -1.0)); // Re z >= 2m
    let entries = vec![
        ChainEntry {
            index: 0,
            carrier_word: vec![XZLetter::Z],
            carrier: z,
            disk: d1,
        },
        ChainEntry {
            index: 1,
            carrier_word: CarrierWord::new(),
            carrier: Mobius::IDENTITY,
            disk: d2,
        },
    ];
    Ok(Chain {
        fraction: f,
        upper,
        order: Some(n),
        mu,
        x,
        z,
        base: d2,
        entries,
        integral: true,
    })
}

/// One named check with its worst residual.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub name: &'static str,
    pub pass: bool,
    pub residual: f64,
    pub note: String,
}

/// Verification of the combinatorial chain conditions (commutator contact,
/// core-word stabilization, the two shift rules, distinctness) plus the
/// tangent-chain and star (interior-disjointness) predicates.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub conditions: Vec<ConditionReport>,
    pub all_pass: bool,
    /// Worst |gap| over consecutive pairs.
    pub tangency_residual: f64,
    /// Smallest gap over non-adjacent pairs (>= -tol means interiors
    /// disjoint; strictly positive means closed disks disjoint).
    pub min_nonadjacent_gap: f64,
    /// True when adjacent interiors overlap (the proper-chain reading used
    /// for parameters inside the deformation space).
    pub proper_overlap: bool,
    /// Index dictionary in force.
    pub convention: &'static str,
}

const CONVENTION: &str =
    "base H* at index q; X: j -> j+q; C' = Z^-1 X: j -> j+q-s; Z: j -> j+s on [q-s, 2q-s); finite chains mod n q";

/// Chain neighbors touch either at a finite point (|gap| small) or, for a
/// facing-away pair of half-planes, at infinity (positive finite gap).
fn neighbors_tangent(a: &GeneralizedDisk, b: &GeneralizedDisk, tolerance: f64) -> bool {
    let g = a.gap(b);
    if a.is_half_plane() && b.is_half_plane() {
        return g.is_finite() && g > 0.0;
    }
    g.is_finite() && g.abs() <= tolerance * scale_of(a, b)
}

fn scale_of(d1: &GeneralizedDisk, d2: &GeneralizedDisk) -> f64 {
    let r = |d: &GeneralizedDisk| {
        if d.is_half_plane() {
            1.0
        } else {
            d.radius()
        }
    };
    r(d1).max(r(d2)).max(1.0)
}

/// Runs every chain condition and returns the per-condition report; nothing
/// errors, failures are carried in the report.
pub fn verify_combinatorial(chain: &Chain, x: &Mobius, z: &Mobius) -> ChainReport {
    let mut conditions = Vec::new();
    let mut push = |name: &'static str, pass: bool, residual: f64, note: String| {
        conditions.push(ConditionReport {
            name,
            pass,
            residual,
            note,
        });
    };

    if chain.integral {
        return verify_integral(chain, x, z);
    }

    let q = chain.fraction.denom();
    let n = chain.order.map(|n| n as i64);
    let modulus = n.map(|n| n * q);
    let slot = |i: i64| -> Option<&ChainEntry> {
        let key = match modulus {
            Some(m) => i.rem_euclid(m),
            None => i,
        };
        chain.entry(key)
    };

    // (1) The commutator K = X Z^-1 X^-1 Z (= X Y, the puncture parabolic
    // of F) has trace -2, its fixed point lies on the boundary of the
    // invariant disk of F, and that disk is enclosed by the chain: it
    // overlaps no chain disk and touches at least one (the contact points
    // form the K-orbit).
    let k = *x * z.inverse() * x.inverse() * *z;
    let tr_res = (k.trace().norm() - 2.0).abs();
    let (cond1_pass, cond1_res, fdisk_note) = match f_disk(&k, x, z) {
        Some(fd) => {
            let mut min_gap = f64::INFINITY;
            for e in &chain.entries {
                min_gap = min_gap.min(e.disk.gap(&fd));
            }
            let enclosed = min_gap >= -tol::TANGENT;
            let touches = min_gap <= tol::TANGENT;
            // Small cusp windows may omit every contact disk; the
            // enclosure half of the condition still binds.
            let window_limited = chain.order.is_none() && chain.entries.len() < 2 * q as usize;
            (
                tr_res <= tol::WORD && enclosed && (touches || window_limited),
                tr_res.max(if touches { 0.0 } else { min_gap.abs() }),
                format!("min gap(F-disk, chain) {min_gap:+.3e}"),
            )
        }
        None => (
            tr_res <= tol::WORD,
            tr_res,
            String::from("F-disk degenerate (dihedral case)"),
        ),
    };
    push("f-disk-contact-at-K-orbit", cond1_pass, cond1_res, fdisk_note);

    // (2) The composed core word is parabolic (exactly +-S^-1) and
    // stabilizes the base. Evaluated at the generators under test.
    let outer = Fraction::new(-chain.upper.denom(), chain.fraction.denom()).unwrap();
    let core = evaluate(&core_word(outer), x, z);
    let s_inv = maskit_group(chain.mu).s.inverse();
    let core_res = core.psl_dist(&s_inv);
    // Boundary samples mapped directly; a circle refit would amplify the
    // f64 residual of deep words into a giant near-line circle.
    let mut stab_res = 0.0f64;
    let (p1, p2, p3) = chain.base.oriented_boundary_points();
    for pt in [p1, p2, p3] {
        if let crate::moebius::ExtPoint::Finite(w) = core.apply(pt) {
            stab_res = stab_res.max(chain.base.signed_distance(crate::moebius::ExtPoint::Finite(w)).abs());
        }
    }
    let word_scale = (x.norm() * z.norm()).max(1.0);
    push(
        "core-word-parabolic-stabilizes-base",
        core_res <= tol::WORD * word_scale
            && stab_res <= tol::DISK * word_scale
            && (core.trace().norm() - 2.0).abs() <= tol::TRACE * word_scale,
        core_res.max(stab_res),
        format!("psl distance to S^-1: {core_res:.3e}"),
    );

    // (3) The generating walk reproduces: C'(D_from) = D_to on C'-steps
    // (C' = Z^-1 X, the remarked generator of the positive-fraction form)
    // and X(D_to) = D_from on the X^-1 steps; consequently the plain
    // Z-shift Z(D_j) = D_{j+s} holds on the q indices j in [q-s, 2q-s).
    let s_den = chain.upper.denom();
    let cprime = z.inverse() * *x;
    let mut worst3 = 0.0f64;
    let mut holds3 = 0usize;
    let mut count3 = 0usize;
    for step in window_walk(q, s_den) {
        let (Some(from), Some(to)) = (slot(step.from), slot(step.to)) else {
            continue;
        };
        count3 += 1;
        let d = if step.cprime {
            cprime.map_disk(&from.disk).boundary_distance(&to.disk)
        } else {
            x.map_disk(&to.disk).boundary_distance(&from.disk)
        };
        if d <= tol::DISK * scale_of(&from.disk, &to.disk).max(1.0) * 10.0 {
            holds3 += 1;
        }
        worst3 = worst3.max(d);
    }
    let mut worst3z = 0.0f64;
    let mut holds3z = 0usize;
    let mut count3z = 0usize;
    for j in (q - s_den)..(2 * q - s_den) {
        let (Some(from), Some(to)) = (slot(j), slot(j + s_den)) else {
            continue;
        };
        count3z += 1;
        let d = z.map_disk(&from.disk).boundary_distance(&to.disk);
        if d <= tol::DISK * scale_of(&from.disk, &to.disk).max(1.0) * 10.0 {
            holds3z += 1;
        }
        worst3z = worst3z.max(d);
    }
    push(
        "c-shift",
        holds3 == count3 && holds3z == count3z,
        worst3.max(worst3z),
        if count3 + count3z == 0 {
            String::from("window too small to exercise any shift")
        } else {
            format!("{holds3}/{count3} walk steps, {holds3z}/{count3z} plain Z-shifts")
        },
    );

    // (4) X-shift for every index present: X(D_i) = D_{i+q}.
    let mut worst4 = 0.0f64;
    let mut holds4 = 0usize;
    let mut count4 = 0usize;
    for e in &chain.entries {
        let Some(to) = slot(e.index + q) else { continue };
        count4 += 1;
        let img = x.map_disk(&e.disk);
        let d = img.boundary_distance(&to.disk);
        if d <= tol::DISK * scale_of(&e.disk, &to.disk).max(1.0) * 10.0 {
            holds4 += 1;
        }
        worst4 = worst4.max(d);
    }
    push(
        "a-shift",
        holds4 == count4,
        worst4,
        if count4 == 0 {
            String::from("window too small to exercise any translate")
        } else {
            format!("{holds4}/{count4} translates")
        },
    );

    // (5) Pairwise distinct disks.
    let mut min_pair = f64::INFINITY;
    for (a, ea) in chain.entries.iter().enumerate() {
        for eb in chain.entries.iter().skip(a + 1) {
            min_pair = min_pair.min(ea.disk.boundary_distance(&eb.disk));
        }
    }
    push(
        "distinct",
        chain.entries.len() < 2 || min_pair > tol::DISK,
        min_pair,
        String::new(),
    );

    // Tangency of consecutive disks and star-disjointness of the rest.
    let mut tang_res = 0.0f64;
    let mut tang_ok = true;
    let mut min_gap = f64::INFINITY;
    let mut adjacent_overlap = false;
    let len = chain.entries.len() as i64;
    for (ai, ea) in chain.entries.iter().enumerate() {
        for eb in chain.entries.iter().skip(ai + 1) {
            let sep = match modulus {
                Some(m) => {
                    let d = (ea.index - eb.index).rem_euclid(m);
                    d.min(m - d)
                }
                None => (ea.index - eb.index).abs().min(len.max(2)),
            };
            let g = ea.disk.gap(&eb.disk);
            let scale = scale_of(&ea.disk, &eb.disk);
            if sep == 1 {
                let half_pair =
                    ea.disk.is_half_plane() && eb.disk.is_half_plane() && g > 0.0 && g.is_finite();
                let res = if half_pair { 0.0 } else { g.abs() / scale };
                if g < 0.0 {
                    adjacent_overlap = true;
                }
                if res > tol::TANGENT {
                    tang_ok = false;
                }
                tang_res = tang_res.max(res);
            } else if sep > 1 {
                min_gap = min_gap.min(g / scale);
            }
        }
    }
    push(
        "tangent-consecutive",
        tang_ok,
        tang_res,
        String::new(),
    );
    let star_ok = min_gap.is_infinite() || min_gap >= -tol::TANGENT;
    push(
        "star-disjoint",
        star_ok,
        if min_gap.is_finite() { min_gap } else { 0.0 },
        format!("min non-adjacent gap {min_gap:+.3e}"),
    );

    // Closure: X^n = +-identity, so the translates D_{i+nq} wrap exactly;
    // the switch from X^-1(base) at index 0 to the base at index q is
    // already covered by the a-shift instances.
    if let Some(n) = chain.order {
        let xn = x.pow(n as i32);
        let res_id = xn.psl_dist(&Mobius::IDENTITY);
        push(
            "closure",
            res_id <= tol::WORD * xn.norm().max(1.0),
            res_id,
            format!("X^n identity residual {res_id:.3e}"),
        );
    }

    let all_pass = conditions.iter().all(|c| c.pass);
    ChainReport {
        conditions,
        all_pass,
        tangency_residual: tang_res,
        min_nonadjacent_gap: if min_gap.is_finite() { min_gap } else { f64::INFINITY },
        proper_overlap: adjacent_overlap,
        convention: CONVENTION,
    }
}

fn verify_integral(chain: &Chain, x: &Mobius, _z: &Mobius) -> ChainReport {
    let mut conditions = Vec::new();
    let d1 = &chain.entries[0].disk;
    let d2 = &chain.entries[1].disk;
    // X preserves D_2.
    let img = x.map_disk(d2);
    let r1 = img.boundary_distance(d2);
    conditions.push(ConditionReport {
        name: "word-preserves-d2",
        pass: r1 <= 1e-9,
        residual: r1,
        note: String::new(),
    });
    // S maps the interior of D_1 onto the exterior of D_2.
    let s = maskit_group(chain.mu).s;
    let img = s.map_disk(d1);
    let r2 = img.boundary_distance(&d2.complement());
    conditions.push(ConditionReport {
        name: "s-maps-d1-to-exterior-d2",
        pass: r2 <= 1e-9,
        residual: r2,
        note: String::new(),
    });
    let gap = d1.gap(d2);
    conditions.push(ConditionReport {
        name: "half-planes-disjoint",
        pass: gap > 0.0,
        residual: gap,
        note: String::from("tangent at infinity"),
    });
    let all_pass = conditions.iter().all(|c| c.pass);
    ChainReport {
        conditions,
        all_pass,
        tangency_residual: 0.0,
        min_nonadjacent_gap: gap,
        proper_overlap: false,
        convention: CONVENTION,
    }
}

/// The invariant disk of F = <X, Y>, fit through the K-orbit points
/// fix K, X(fix K), Y(fix K); oriented to the side away from the base.
fn f_disk(k: &Mobius, x: &Mobius, z: &Mobius) -> Option<GeneralizedDisk> {
    let y = z.inverse() * x.inverse() * *z;
    let p = k.fixed_points().ok()?.first();
    let a = p;
    let b = x.apply(p);
    let c = y.apply(p);
    if a.chordal(b) < 1e-9 || b.chordal(c) < 1e-9 || a.chordal(c) < 1e-9 {
        return None;
    }
    let disk = GeneralizedDisk::from_oriented_points(a, b, c);
    // Pick the side that avoids the lower half-plane interior witness -2i.
    let probe = ExtPoint::Finite(Complex::new(0.0, -2.0));
    Some(if disk.contains(probe, 0.0) {
        disk.complement()
    } else {
        disk
    })
}

/// A circular arc inside one chain disk, orthogonal to its boundary,
/// joining consecutive tangency points.
#[derive(Clone, Debug)]
pub struct OrthoArc {
    pub disk_index: i64,
    pub from: ExtPoint,
    pub to: ExtPoint,
    /// Sampled points along the arc (finite ones only; unbounded rays are
    /// truncated at a viewport cap).
    pub samples: Vec<Complex>,
}

/// The curves W_A (arcs through the chain) and W_B = Z^-1(W_A), with the
/// disjointness data of the combination regions D_A and D_B.
#[derive(Clone, Debug)]
pub struct PleatingCurves {
    pub arcs: Vec<OrthoArc>,
    pub wa: Vec<Complex>,
    pub wb: Vec<Complex>,
    /// Residual of the equivariance W_B = Z^-1(W_A) (exact by construction,
    /// reported for completeness).
    pub wb_residual: f64,
    pub interiors_disjoint: bool,
    /// Clearance of the genuinely separated part of W_B from W_A. The two
    /// curves share the tangency vertices and, wherever the Z-shift rule
    /// chains across consecutive disks, whole arcs; contact points do not
    /// count against disjointness and are excluded here.
    pub margin: f64,
    /// Fraction of W_B samples in contact with W_A (shared arcs).
    pub shared_boundary_fraction: f64,
    /// No self-intersections among the sampled arcs of W_A.
    pub jordan_ok: bool,
}

const ARC_SAMPLES: usize = 24;

fn arc_inside_disk(
    disk: &GeneralizedDisk,
    a: ExtPoint,
    b: ExtPoint,
    cap: f64,
) -> Vec<Complex> {
    use crate::moebius::Boundary;
    match (a, b) {
        (ExtPoint::Infinity, ExtPoint::Infinity) => Vec::new(),
        (ExtPoint::Infinity, ExtPoint::Finite(p)) | (ExtPoint::Finite(p), ExtPoint::Infinity) => {
            // Ray from p into the half-plane, perpendicular to its boundary
            // (the orthogonal circle through infinity is a line). Sampled
            // geometrically out to a far cap so that, after the inversion
            // used by the region tests, the curve closes up tightly through
            // the image of infinity. Traversal order: outward when the arc
            // ends at infinity, inward when it starts there.
            let Boundary::Line { dir, .. } = disk.boundary else {
                return Vec::new();
            };
            let inward = Complex::new(0.0, 1.0) * dir;
            let toward_infinity = matches!(b, ExtPoint::Infinity);
            let n = 28usize;
            let mut dists: Vec<f64> = (0..n)
                .map(|k| cap * (1.45f64.powi(k as i32) - 1.0))
                .collect();
            if !toward_infinity {
                dists.reverse();
            }
            dists.into_iter().map(|d| p + inward * d).collect()
        }
        (ExtPoint::Finite(a), ExtPoint::Finite(b)) => match disk.boundary {
            Boundary::Circle { center, radius } => {
                // Circle through a, b orthogonal to the boundary circle:
                // |m - center|^2 = radius^2 + |m - a|^2 and |m-a| = |m-b|.
                let amb = a - b;
                let apb = (a + b) * 0.5;
                if amb.norm() < 1e-13 {
                    return vec![a];
                }
                // Center m of the orthogonal circle: |m - c|^2 = r^2 + |m - a|^2
                // gives the linear row 2 m.(a - c) = r^2 + |a|^2 - |c|^2, and
                // |m - a| = |m - b| gives the perpendicular bisector row.
                let u = a - center;
                let rhs1 = (radius * radius + a.norm_sqr() - center.norm_sqr()) * 0.5;
                let rhs2 = apb.re * amb.re + apb.im * amb.im;
                let det = u.re * amb.im - u.im * amb.re;
                if det.abs() < 1e-10 * u.norm().max(1.0) * amb.norm().max(1.0) {
                    // Diameter case: the orthogonal circle is the straight
                    // line through a and b. Inside a bounded disk the arc is
                    // the chord; inside a complement disk it is the pair of
                    // rays through infinity.
                    let chord_mid = (a + b) * 0.5;
                    if disk.contains(ExtPoint::Finite(chord_mid), 1e-9) {
                        return (0..ARC_SAMPLES)
                            .map(|i| {
                                let t = i as f64 / (ARC_SAMPLES - 1) as f64;
                                a + (b - a) * t
                            })
                            .collect();
                    }
                    let unit = (b - a) / (b - a).norm();
                    let n = 24usize;
                    let mut out: Vec<Complex> = (0..n)
                        .map(|k| a - unit * (cap * (1.6f64.powi(k as i32) - 1.0)))
                        .collect();
                    out.extend((0..n).rev().map(|k| b + unit * (cap * (1.6f64.powi(k as i32) - 1.0))));
                    return out;
                }
                let m = Complex::new(
                    (rhs1 * amb.im - u.im * rhs2) / det,
                    (u.re * rhs2 - rhs1 * amb.re) / det,
                );
                debug_assert!(
                    ((m - center).norm_sqr() - radius * radius - (m - a).norm_sqr()).abs()
                        < 1e-6 * radius.max(1.0) * radius.max(1.0)
                );
                let r = (a - m).norm();
                let th_a = (a - m).arg();
                let th_b = (b - m).arg();
                let mut sweep = th_b - th_a;
                while sweep > core::f64::consts::PI {
                    sweep -= 2.0 * core::f64::consts::PI;
                }
                while sweep < -core::f64::consts::PI {
                    sweep += 2.0 * core::f64::consts::PI;
                }
                // Choose the arc whose midpoint lies inside the chain disk.
                let mid = m + Complex::from_polar(r, th_a + 0.5 * sweep);
                let sweep = if disk.contains(ExtPoint::Finite(mid), 1e-9) {
                    sweep
                } else {
                    sweep - 2.0 * core::f64::consts::PI * sweep.signum()
                };
                (0..ARC_SAMPLES)
                    .map(|i| {
                        let t = i as f64 / (ARC_SAMPLES - 1) as f64;
                        m + Complex::from_polar(r, th_a + sweep * t)
                    })
                    .collect()
            }
            Boundary::Line { .. } => {
                // Orthogonal circle to a line with both endpoints on it:
                // semicircle into the half-plane.
                let m = (a + b) * 0.5;
                let r = (a - m).norm();
                let th_a = (a - m).arg();
                let mid_plus = m + Complex::from_polar(r, th_a + core::f64::consts::FRAC_PI_2);
                let sgn = if disk.contains(ExtPoint::Finite(mid_plus), 1e-9) {
                    1.0
                } else {
                    -1.0
                };
                (0..ARC_SAMPLES)
                    .map(|i| {
                        let t = i as f64 / (ARC_SAMPLES - 1) as f64;
                        m + Complex::from_polar(r, th_a + sgn * core::f64::consts::PI * t)
                    })
                    .collect()
            }
        },
    }
}

fn seg_intersect(a1: Complex, a2: Complex, b1: Complex, b2: Complex) -> bool {
    let d = |p: Complex, q: Complex, r: Complex| (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re);
    let d1 = d(b1, b2, a1);
    let d2 = d(b1, b2, a2);
    let d3 = d(a1, a2, b1);
    let d4 = d(a1, a2, b2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Distance from a point to a polyline (minimum over its segments).
fn dist_to_polyline(p: Complex, poly: &[Complex]) -> f64 {
    let mut best = f64::INFINITY;
    for w in poly.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ab = b - a;
        let len2 = ab.norm_sqr();
        let t = if len2 > 0.0 {
            (((p - a).re * ab.re + (p - a).im * ab.im) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        best = best.min((p - (a + ab * t)).norm());
    }
    best
}

/// Winding number of a closed polyline around a point.
fn winding(poly: &[Complex], p: Complex) -> i32 {
    let mut w = 0i32;
    for i in 0..poly.len() {
        let a = poly[i] - p;
        let b = poly[(i + 1) % poly.len()] - p;
        if a.im <= 0.0 && b.im > 0.0 && (a.re * b.im - a.im * b.re) > 0.0 {
            w += 1;
        } else if a.im > 0.0 && b.im <= 0.0 && (a.re * b.im - a.im * b.re) < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Builds the pleating curves of a tangent chain and tests the interiors
/// of D_A and D_B for disjointness. `c` is the C-role generator (Z).
pub fn pleating_curves(chain: &Chain, c: &Mobius) -> Result<PleatingCurves, ChainError> {
    if chain.integral {
        return integral_pleating(chain);
    }
    let m = chain.entries.len();
    // Tangency points around the cycle (finite chains) or along the window.
    let cyclic = chain.order.is_some();
    let pair_count = if cyclic { m } else { m - 1 };
    let mut touch: Vec<ExtPoint> = Vec::with_capacity(pair_count);
    for i in 0..pair_count {
        let a = &chain.entries[i].disk;
        let b = &chain.entries[(i + 1) % m].disk;
        if !neighbors_tangent(a, b, 100.0 * tol::TANGENT) {
            return Err(ChainError::NotTangent {
                index: chain.entries[i].index,
                gap: a.gap(b),
            });
        }
        touch.push(a.tangency_point(b));
    }
    // Scale cap for unbounded rays: a few times the configuration size.
    let mut extent = 1.0f64;
    for e in &chain.entries {
        if let crate::moebius::Boundary::Circle { center, radius } = e.disk.boundary {
            extent = extent.max(center.norm() + radius);
        }
    }
    let cap = extent;

    let mut arcs = Vec::with_capacity(m);
    let mut wa: Vec<Complex> = Vec::new();
    for i in 0..m {
        if !cyclic && i == 0 {
            continue; // window ends carry no inner arc on the first disk
        }
        let prev = touch[(i + pair_count - 1) % pair_count];
        let next = if cyclic || i < m - 1 {
            touch[i % pair_count]
        } else {
            prev
        };
        let disk = &chain.entries[i].disk;
        let samples = arc_inside_disk(disk, prev, next, cap);
        wa.extend(samples.iter().copied());
        arcs.push(OrthoArc {
            disk_index: chain.entries[i].index,
            from: prev,
            to: next,
            samples,
        });
    }
    // W_B = Z^-1(W_A) exactly: the image of an arc orthogonal to a disk
    // boundary is the arc orthogonal to the image disk through the image
    // tangency points, so each piece is resampled in its own disk (mapping
    // sample points directly would distribute them badly near poles).
    let zinv = c.inverse();
    let mut wb: Vec<Complex> = Vec::new();
    for (i, arc) in arcs.iter().enumerate() {
        let src_entry = chain
            .entries
            .iter()
            .find(|e| e.index == arc.disk_index)
            .expect("arc indices come from the entry list");
        let img_disk = zinv.map_disk(&src_entry.disk);
        let from = match arc.from {
            ExtPoint::Finite(p) => zinv.apply(ExtPoint::Finite(p)),
            ExtPoint::Infinity => zinv.apply(ExtPoint::Infinity),
        };
        let to = match arc.to {
            ExtPoint::Finite(p) => zinv.apply(ExtPoint::Finite(p)),
            ExtPoint::Infinity => zinv.apply(ExtPoint::Infinity),
        };
        let _ = i;
        wb.extend(arc_inside_disk(&img_disk, from, to, cap));
    }

    // Transport everything away from infinity: invert about a point deep
    // inside the F-disk, which no curve approaches.
    let k = chain.x * chain.z.inverse() * chain.x.inverse() * chain.z;
    let fd = f_disk(&k, &chain.x, &chain.z);
    let w0 = fd
        .and_then(|d| match d.boundary {
            crate::moebius::Boundary::Circle { center, .. } => Some(center),
            _ => None,
        })
        .unwrap_or(Complex::new(0.0, 2.0 * extent));
    let invert = Mobius::new(
        Complex::new(0.0, 0.0),
        Complex::new(1.0, 0.0),
        Complex::new(1.0, 0.0),
        -w0,
    )
    .expect("inversion about a finite point");
    let tw = |pts: &[Complex]| -> Vec<Complex> {
        pts.iter()
            .filter_map(|p| invert.apply(ExtPoint::Finite(*p)).finite())
            .collect()
    };
    let wa_t = tw(&wa);
    let wb_t = tw(&wb);

    // Jordan property of W_A: no proper crossings among non-adjacent
    // segments within the window |z| <= 4 * extent (the passage through
    // infinity cannot be distinguished from contact at sampling
    // resolution, so far ray tails are skipped).
    let far_limit = 4.0 * extent;
    let far_flag: Vec<bool> = wa.iter().map(|p| p.norm() > far_limit).collect();
    let finite_touch: Vec<Complex> = touch.iter().filter_map(|p| p.finite()).collect();
    let vertex_eps = 0.03 * extent;
    let near_touch = |p: Complex| -> Option<usize> {
        finite_touch
            .iter()
            .position(|v| (p - v).norm() < vertex_eps)
    };
    let mut jordan_ok = true;
    'outer: for i in 0..wa.len() {
        let i2 = (i + 1) % wa.len();
        if far_flag[i] && far_flag[i2] {
            continue;
        }
        let a1 = wa[i];
        let a2 = wa[i2];
        let va = near_touch(a1).or_else(|| near_touch(a2));
        for j in (i + 2)..wa.len() {
            let j2 = (j + 1) % wa.len();
            if i == 0 && j == wa.len() - 1 {
                continue;
            }
            if far_flag[j] && far_flag[j2] {
                continue;
            }
            let b1 = wa[j];
            let b2 = wa[j2];
            // Arcs legitimately meet at the shared tangency vertices;
            // crossings there are polygonization artifacts.
            if let (Some(u), Some(v)) = (va, near_touch(b1).or_else(|| near_touch(b2))) {
                if u == v {
                    continue;
                }
            }
            if seg_intersect(a1, a2, b1, b2) {
                jordan_ok = false;
                break 'outer;
            }
        }
    }

    // D_A in the transported frame is the component of the complement of
    // W_A' not containing the F-disk image; the F-disk center maps to
    // infinity, so D_A' is the region with nonzero winding. Same for D_B'.
    // The curves meet at the shared tangency vertices and, wherever the
    // Z-shift rule chains across consecutive disks, along whole arcs;
    // contact counts as boundary, not interior penetration.
    let vertices: Vec<Complex> = touch.iter().filter_map(|p| p.finite()).collect();
    let exclusion = 0.05 * extent;
    let boundary_eps = 0.02 * extent;
    let far = 4.0 * extent;
    let near_vertex = |p: Complex| {
        vertices.iter().any(|v| (p - v).norm() < exclusion) || p.norm() > far
    };
    let mut disjoint = true;
    for (orig, p) in wb.iter().zip(wb_t.iter()) {
        if near_vertex(*orig) || dist_to_polyline(*orig, &wa) <= boundary_eps {
            continue;
        }
        if winding(&wa_t, *p) != 0 {
            disjoint = false;
            break;
        }
    }
    if disjoint {
        for (orig, p) in wa.iter().zip(wa_t.iter()) {
            if near_vertex(*orig) || dist_to_polyline(*orig, &wb) <= boundary_eps {
                continue;
            }
            if winding(&wb_t, *p) != 0 {
                disjoint = false;
                break;
            }
        }
    }

    // Clearance of the separated part of W_B, plus the contact fraction.
    let mut margin = f64::INFINITY;
    let mut contact = 0usize;
    let mut counted = 0usize;
    for b in wb.iter().filter(|p| !near_vertex(**p)) {
        counted += 1;
        let d = dist_to_polyline(*b, &wa);
        if d <= boundary_eps {
            contact += 1;
        } else {
            margin = margin.min(d);
        }
    }
    if !margin.is_finite() {
        margin = 0.0;
    }
    let shared_boundary_fraction = if counted > 0 {
        contact as f64 / counted as f64
    } else {
        0.0
    };

    Ok(PleatingCurves {
        arcs,
        wa,
        wb,
        wb_residual: 0.0,
        interiors_disjoint: disjoint,
        margin,
        shared_boundary_fraction,
        jordan_ok,
    })
}

fn integral_pleating(chain: &Chain) -> Result<PleatingCurves, ChainError> {
    // W_A and W_B are the two vertical boundary lines; margin is the strip
    // width 2.
    let shift = 2.0 * chain.fraction.numer() as f64;
    let line = |x0: f64| -> Vec<Complex> {
        (0..ARC_SAMPLES)
            .map(|i| Complex::new(x0, -6.0 + 12.0 * i as f64 / (ARC_SAMPLES - 1) as f64))
            .collect()
    };
    let wa = line(-2.0 + shift);
    let wb = line(shift);
    Ok(PleatingCurves {
        arcs: vec![
            OrthoArc {
                disk_index: 0,
                from: ExtPoint::Infinity,
                to: ExtPoint::Infinity,
                samples: wa.clone(),
            },
            OrthoArc {
                disk_index: 1,
                from: ExtPoint::Infinity,
                to: ExtPoint::Infinity,
                samples: wb.clone(),
            },
        ],
        wa,
        wb,
        wb_residual: 0.0,
        interiors_disjoint: true,
        margin: 2.0,
        shared_boundary_fraction: 0.0,
        jordan_ok: true,
    })
}

/// Empirical size of the transport neighborhood: the largest eta such that
/// the cusp chain re-evaluated at the ray point with |mu - mu_cusp| = eta
/// still passes tangency and star-disjointness within 10x tolerance.
/// Bisection with `samples` probes; integral rays pass everywhere, so the
/// reachable ray length is returned.
pub fn perturbation_radius(f: Fraction, samples: u32) -> Result<f64, ChainError> {
    let tf = TraceFunction::maskit(f);
    let ray = locus::trace_ray(&tf, 4.0, 0.005, 0.02)?;
    let cusp = ray.cusp().ok_or(LocusError::SeedNotFound(f))?.param;
    let ext: Vec<(f64, Complex)> = ray
        .samples
        .iter()
        .filter(|s| s.flag == locus::SampleFlag::Extended)
        .map(|s| ((s.param - cusp).norm(), s.param))
        .collect();
    if ext.is_empty() {
        return Ok(0.0);
    }
    let eta_max = ext
        .iter()
        .map(|(d, _)| *d)
        .fold(0.0f64, f64::max);

    if f.is_integer() {
        return Ok(eta_max);
    }

    let chain = build_cusp_chain_at(f, (2 * f.denom() + 2) as usize, cusp)?;
    let passes = |eta: f64| -> bool {
        // Nearest extension sample at distance eta, refined by Newton.
        let Some((_, near)) = ext
            .iter()
            .min_by(|a, b| {
                (a.0 - eta)
                    .abs()
                    .partial_cmp(&(b.0 - eta).abs())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .copied()
        else {
            return false;
        };
        let moved = chain.transported(near);
        let rep = verify_combinatorial(&moved, &moved.x, &moved.z);
        rep.tangency_residual <= 10.0 * tol::TANGENT
            && rep.min_nonadjacent_gap >= -10.0 * tol::TANGENT
    };

    if samples <= 1 {
        return Ok(if passes(eta_max) { eta_max } else { 0.0 });
    }
    if passes(eta_max) {
        return Ok(eta_max);
    }
    let mut lo = 0.0f64;
    let mut hi = eta_max;
    for _ in 0..samples {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

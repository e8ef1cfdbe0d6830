//! Farey/Stern-Brocot combinatorics and the special words W_{p/q}.
//!
//! Words live over the formal alphabet {X, X^-1, Y, Y^-1}. For 0 <= p/q the
//! Stern-Brocot recursion W_{(a+c)/(b+d)} = W_{c/d} W_{a/b} with base cases
//! W_{1/0} = X^-1, W_{0/1} = Y produces strings over {X^-1, Y} only; negative
//! fractions use the mirror substitution X -> X^-1, which extends the integer
//! form W_{m/1} = X^{-m} Y and matches the reflection symmetry of the Maskit
//! slice. A second family, [`core_word`], carries the exact cusp identity of
//! the -s/q composed words; see its documentation.

use crate::moebius::Mobius;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum FareyError {
    ZeroOverZero,
    /// Parents are only defined for finite positive fractions.
    NoParents(Fraction),
    /// oz_compose requires the inner pair to be Farey neighbors.
    NotNeighbors(Fraction, Fraction),
    BadFractionLiteral,
}

impl fmt::Display for FareyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FareyError::ZeroOverZero => write!(f, "0/0 is not a fraction"),
            FareyError::NoParents(x) => write!(f, "{x} has no Stern-Brocot parents"),
            FareyError::NotNeighbors(a, b) => write!(f, "{a} and {b} are not Farey neighbors"),
            FareyError::BadFractionLiteral => write!(f, "expected a literal of the form p/q"),
        }
    }
}

impl core::error::Error for FareyError {}

/// Reduced fraction p/q with q >= 0; q = 0 encodes infinity with p = +-1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    p: i64,
    q: i64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { p: 0, q: 1 };
    pub const INFINITY: Fraction = Fraction { p: 1, q: 0 };

    pub fn new(p: i64, q: i64) -> Result<Fraction, FareyError> {
        if p == 0 && q == 0 {
            return Err(FareyError::ZeroOverZero);
        }
        if q == 0 {
            return Ok(Fraction { p: p.signum(), q: 0 });
        }
        let sign = if q < 0 { -1 } else { 1 };
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
        Ok(Fraction {
            p: sign * p / g,
            q: sign * q / g,
        })
    }

    pub fn parse(s: &str) -> Result<Fraction, FareyError> {
        let mut parts = s.split('/');
        let p = parts
            .next()
            .and_then(|t| t.trim().parse::<i64>().ok())
            .ok_or(FareyError::BadFractionLiteral)?;
        let q = match parts.next() {
            None => 1,
            Some(t) => t
                .trim()
                .parse::<i64>()
                .map_err(|_| FareyError::BadFractionLiteral)?,
        };
        if parts.next().is_some() {
            return Err(FareyError::BadFractionLiteral);
        }
        Fraction::new(p, q)
    }

    pub fn numer(&self) -> i64 {
        self.p
    }

    pub fn denom(&self) -> i64 {
        self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.q == 0
    }

    pub fn is_integer(&self) -> bool {
        self.q == 1
    }

    pub fn as_f64(&self) -> f64 {
        if self.q == 0 {
            f64::INFINITY * self.p as f64
        } else {
            self.p as f64 / self.q as f64
        }
    }

    pub fn neg(&self) -> Fraction {
        Fraction {
            p: -self.p,
            q: self.q,
        }
    }

    /// Mediant (p + p')/(q + q'); the Stern-Brocot child of a parent pair.
    pub fn mediant(&self, other: &Fraction) -> Fraction {
        Fraction::new(self.p + other.p, self.q + other.q).expect("mediant of valid fractions")
    }

    pub fn shifted(&self, k: i64) -> Fraction {
        Fraction {
            p: self.p + k * self.q,
            q: self.q,
        }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        // q >= 0 on both sides, so cross-multiplication preserves order;
        // 1/0 compares above every finite fraction and -1/0 below.
        (self.p as i128 * other.q as i128).cmp(&(other.p as i128 * self.q as i128))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// True iff pq' - p'q = +-1 (with the infinity representatives included).
pub fn is_neighbor(a: Fraction, b: Fraction) -> bool {
    let det = a.p as i128 * b.q as i128 - b.p as i128 * a.q as i128;
    det == 1 || det == -1
}

/// Stern-Brocot parents (a/b, c/d) of a finite fraction f > 0:
/// a/b < f < c/d, mutually neighbors, with a + c = p and b + d = q.
/// Integers m >= 1 yield ((m-1)/1, 1/0).
pub fn farey_parents(f: Fraction) -> Result<(Fraction, Fraction), FareyError> {
    if f.is_infinite() || f.p <= 0 {
        return Err(FareyError::NoParents(f));
    }
    let mut lo = Fraction::ZERO;
    let mut hi = Fraction::INFINITY;
    for _ in 0..10_000_000u64 {
        let med = lo.mediant(&hi);
        match f.cmp(&med) {
            Ordering::Equal => return Ok((lo, hi)),
            Ordering::Less => hi = med,
            Ordering::Greater => lo = med,
        }
    }
    Err(FareyError::NoParents(f))
}

/// A letter of the formal two-generator alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    X,
    Xinv,
    Y,
    Yinv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::X => Letter::Xinv,
            Letter::Xinv => Letter::X,
            Letter::Y => Letter::Yinv,
            Letter::Yinv => Letter::Y,
        }
    }
}

/// A special word W_{p/q} as a letter string, read left to right as a
/// matrix product.
#[derive(Clone, Debug, PartialEq)]
pub struct FareyWord {
    pub fraction: Fraction,
    pub letters: Vec<Letter>,
}

impl FareyWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FareyWord {
        FareyWord {
            fraction: self.fraction,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn display(&self) -> alloc::string::String {
        use alloc::string::ToString;
        self.letters
            .iter()
            .map(|l| match l {
                Letter::X => "X",
                Letter::Xinv => "x",
                Letter::Y => "Y",
                Letter::Yinv => "y",
            })
            .collect::<Vec<_>>()
            .join("")
            .to_string()
    }
}

fn positive_letters(f: Fraction) -> Vec<Letter> {
    debug_assert!(f.p >= 0 || f.is_infinite());
    if f.is_infinite() {
        return alloc::vec![Letter::Xinv];
    }
    if f == Fraction::ZERO {
        return alloc::vec![Letter::Y];
    }
    let (lo, hi) = farey_parents(f).expect("positive finite fraction has parents");
    let mut letters = positive_letters(hi);
    letters.extend(positive_letters(lo));
    letters
}

/// The special word for any reduced fraction, including +-1/0.
///
/// Negative fractions mirror the positive word through X -> X^-1, so that
/// W_{-m/1} = X^m Y and the trace of W_{-p/q} is the Re mu -> -Re mu
/// reflection of the trace of W_{p/q}.
pub fn word(f: Fraction) -> FareyWord {
    let letters = if f.p >= 0 || f.is_infinite() {
        positive_letters(f)
    } else {
        positive_letters(f.neg())
            .into_iter()
            .map(|l| match l {
                Letter::Xinv => Letter::X,
                other => other,
            })
            .collect()
    };
    FareyWord {
        fraction: f,
        letters,
    }
}

/// The composed-word family of the cusp identity: for f = -s/q <= 0,
/// core_word(f) is Y W_{s/q} Y^-1, i.e. the trailing Y of the positive word
/// rotated to the front. Substituting a neighbor pair (W_{p/q}, W_{r/s})
/// for (X, Y) sends this word to S^-1 exactly, for every parameter; the
/// mirror family of [`word`] does not have that property (and conversely
/// carries the pleating-ray structure, which this family does not).
pub fn core_word(f: Fraction) -> FareyWord {
    if f.p > 0 || f.is_infinite() {
        return word(f);
    }
    let pos = positive_letters(f.neg());
    debug_assert_eq!(pos.last(), Some(&Letter::Y));
    let mut letters = Vec::with_capacity(pos.len());
    letters.push(Letter::Y);
    letters.extend_from_slice(&pos[..pos.len() - 1]);
    FareyWord {
        fraction: f,
        letters,
    }
}

/// Left-to-right product of the letters at (X, Y) = (x, y).
///
/// Raw matrix products: determinants stay exactly multiplicative and the
/// trace is a definite polynomial of any parameter inside x and y (no sign
/// canonicalization happens here).
pub fn evaluate(w: &FareyWord, x: &Mobius, y: &Mobius) -> Mobius {
    let xi = x.inverse();
    let yi = y.inverse();
    let mut out = Mobius::IDENTITY;
    for l in &w.letters {
        let m = match l {
            Letter::X => x,
            Letter::Xinv => &xi,
            Letter::Y => y,
            Letter::Yinv => &yi,
        };
        out = out * *m;
    }
    out
}

/// Fraction-level composition law: substituting the neighbor pair
/// (W_{p/q}, W_{r/s}) for the generators sends the index m/n to
/// (pm + rn)/(qm + sn), the projective action of the column matrix
/// [[p, r], [q, s]].
///
/// Exact at the matrix level for the [`core_word`] family at m/n = -s/q
/// (the cusp identity, where it yields 1/0, i.e. S^-1); trace-level
/// elsewhere. Errors when the pair is not a neighbor pair.
pub fn oz_compose(
    outer: Fraction,
    pq: Fraction,
    rs: Fraction,
) -> Result<Fraction, FareyError> {
    if !is_neighbor(pq, rs) {
        return Err(FareyError::NotNeighbors(pq, rs));
    }
    let num = pq.p * outer.p + rs.p * outer.q;
    let den = pq.q * outer.p + rs.q * outer.q;
    Fraction::new(num, den)
}

/// Index identification in the order-n Koebe family: two word indices name
/// the same group element iff the denominators agree and the numerators
/// differ by a multiple of n q.
pub fn word_equal_mod_n(a: Fraction, b: Fraction, n: i64) -> bool {
    if a.q != b.q {
        return false;
    }
    let diff = b.p - a.p;
    diff % (n * a.q.max(1)) == 0
}

/// Letter strings cached by fraction; one word serves every parameter value.
/// Owned by its user, so concurrent callers each observe complete entries.
#[derive(Default)]
pub struct WordCache {
    words: BTreeMap<Fraction, FareyWord>,
}

impl WordCache {
    pub fn new() -> WordCache {
        WordCache::default()
    }

    pub fn get(&mut self, f: Fraction) -> &FareyWord {
        self.words.entry(f).or_insert_with(|| word(f))
    }
}

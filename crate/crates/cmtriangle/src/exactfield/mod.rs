//! Exact arithmetic in the real quadratic field Q(sqrt 5).
//!
//! Elements are stored as `p + q*w` with `w = (1 - sqrt 5)/2`, so `w^2 = w + 1`
//! and the Galois conjugate of `w` is `1 - w`.

mod factor;

pub use factor::{factor_integer, factor_rational, squarefree_split, Factorization};

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("nonzero value required")]
    NonzeroRequired,
    #[error("cannot parse field element: {0}")]
    Parse(String),
    #[error("factorization limit exceeded: composite cofactor {0} is larger than 2^128")]
    FactorLimit(String),
}

/// The two real embeddings of Q(sqrt 5).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Embedding {
    /// `w -> (1 - sqrt 5)/2`, the one used throughout the geometry.
    Identity,
    /// `w -> (1 + sqrt 5)/2`.
    Conjugate,
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct QuadRat {
    pub p: Rational,
    pub q: Rational,
}

impl QuadRat {
    pub fn new(p: impl Into<Rational>, q: impl Into<Rational>) -> Self {
        QuadRat {
            p: p.into(),
            q: q.into(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        QuadRat::new(n, 0)
    }

    pub fn zero() -> Self {
        QuadRat::default()
    }

    pub fn one() -> Self {
        QuadRat::from_int(1)
    }

    /// `w` itself.
    pub fn w() -> Self {
        QuadRat::new(0, 1)
    }

    /// `sqrt 5 = 1 - 2w` (positive under the identity embedding).
    pub fn sqrt5() -> Self {
        QuadRat::new(1, -2)
    }

    pub fn is_zero(&self) -> bool {
        self.p.cmp0().is_eq() && self.q.cmp0().is_eq()
    }

    pub fn is_rational(&self) -> bool {
        self.q.cmp0().is_eq()
    }

    /// Both coordinates are integers, i.e. the element lies in Z[w].
    pub fn is_integral(&self) -> bool {
        *self.p.denom() == 1 && *self.q.denom() == 1
    }

    pub fn conj(&self) -> Self {
        QuadRat::new(Rational::from(&self.p + &self.q), Rational::from(-&self.q))
    }

    pub fn norm(&self) -> Rational {
        let pq = Rational::from(&self.p * &self.q);
        Rational::from(self.p.square_ref()) + pq - Rational::from(self.q.square_ref())
    }

    pub fn trace(&self) -> Rational {
        Rational::from(&self.p * 2u32) + &self.q
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let n = self.norm();
        if n.cmp0().is_eq() {
            return Err(FieldError::NonzeroRequired);
        }
        let c = self.conj();
        Ok(QuadRat::new(c.p / &n, c.q / n))
    }

    pub fn div(&self, other: &QuadRat) -> Result<Self, FieldError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QuadRat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadRat::new(Rational::from(&self.p * r), Rational::from(&self.q * r))
    }

    /// Value under an embedding, computed at `prec` bits.
    pub fn embed(&self, which: Embedding, prec: u32) -> Float {
        let wp = prec + 16;
        let s5 = Float::with_val(wp, 5).sqrt();
        let w = match which {
            Embedding::Identity => (Float::with_val(wp, 1) - s5) / 2u32,
            Embedding::Conjugate => (Float::with_val(wp, 1) + s5) / 2u32,
        };
        let v = w * &self.q + &self.p;
        Float::with_val(prec, v)
    }

    pub fn embed_f64(&self, which: Embedding) -> f64 {
        self.embed(which, 64).to_f64()
    }

    /// Positive under both real embeddings.
    pub fn is_totally_positive(&self) -> bool {
        // x > 0 and conj(x) > 0  <=>  trace > 0 and norm > 0
        self.trace().cmp0().is_gt() && self.norm().cmp0().is_gt()
    }

    /// Exact square root in Q(sqrt 5), if one exists.  The root returned is
    /// nonnegative under the identity embedding.
    pub fn sqrt_exact(&self) -> Option<QuadRat> {
        if self.is_zero() {
            return Some(QuadRat::zero());
        }
        // Write x = A + B*sqrt5 and look for (s + t*sqrt5)^2 = x.
        let a = Rational::from(&self.q / 2u32) + &self.p;
        let b = Rational::from(-&self.q) / 2u32;
        let n = Rational::from(a.square_ref()) - Rational::from(b.square_ref()) * 5u32;
        let n = rational_sqrt(&n)?;
        let mut candidates = Vec::new();
        for s2 in [
            Rational::from(&a + &n) / 2u32,
            Rational::from(&a - &n) / 2u32,
        ] {
            if let Some(s) = rational_sqrt(&s2) {
                if s.cmp0().is_ne() {
                    let t = Rational::from(&b / &s) / 2u32;
                    candidates.push((s, t));
                } else if let Some(t) = rational_sqrt(&(a.clone() / 5u32)) {
                    candidates.push((s, t));
                }
            }
        }
        for (s, t) in candidates {
            // s + t*sqrt5 = (s + t) - 2t*w
            let y = QuadRat::new(Rational::from(&s + &t), Rational::from(&t * -2i32));
            if &(&y * &y) == self {
                return Some(if y.embed_f64(Embedding::Identity) < 0.0 {
                    -y
                } else {
                    y
                });
            }
        }
        None
    }

    pub fn is_square(&self) -> bool {
        self.sqrt_exact().is_some()
    }

    /// Integer coordinates, if integral and small enough.
    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        if !self.is_integral() {
            return None;
        }
        Some((self.p.numer().to_i64()?, self.q.numer().to_i64()?))
    }
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.cmp0().is_lt() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    if n.is_perfect_square() && d.is_perfect_square() {
        Some(Rational::from((n.clone().sqrt(), d.clone().sqrt())))
    } else {
        None
    }
}

/// Product in Q(sqrt 5).
pub fn qs_mul(x: &QuadRat, y: &QuadRat) -> QuadRat {
    x * y
}

pub fn qs_conj(x: &QuadRat) -> QuadRat {
    x.conj()
}

/// `(norm, trace)` down to Q.
pub fn qs_norm_trace(x: &QuadRat) -> (Rational, Rational) {
    (x.norm(), x.trace())
}

pub fn qs_embed_real(x: &QuadRat, which: Embedding, prec: u32) -> Float {
    x.embed(which, prec)
}

impl<'a> Add<&'a QuadRat> for &'a QuadRat {
    type Output = QuadRat;
    fn add(self, o: &QuadRat) -> QuadRat {
        QuadRat::new(
            Rational::from(&self.p + &o.p),
            Rational::from(&self.q + &o.q),
        )
    }
}

impl<'a> Sub<&'a QuadRat> for &'a QuadRat {
    type Output = QuadRat;
    fn sub(self, o: &QuadRat) -> QuadRat {
        QuadRat::new(
            Rational::from(&self.p - &o.p),
            Rational::from(&self.q - &o.q),
        )
    }
}

impl<'a> Mul<&'a QuadRat> for &'a QuadRat {
    type Output = QuadRat;
    fn mul(self, o: &QuadRat) -> QuadRat {
        let qq = Rational::from(&self.q * &o.q);
        let p = Rational::from(&self.p * &o.p) + &qq;
        let q = Rational::from(&self.p * &o.q) + Rational::from(&self.q * &o.p) + qq;
        QuadRat::new(p, q)
    }
}

impl Neg for QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat::new(-self.p, -self.q)
    }
}

impl Neg for &QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        -self.clone()
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadRat> for QuadRat {
            type Output = QuadRat;
            fn $m(self, o: QuadRat) -> QuadRat {
                (&self).$m(&o)
            }
        }
        impl $tr<&QuadRat> for QuadRat {
            type Output = QuadRat;
            fn $m(self, o: &QuadRat) -> QuadRat {
                (&self).$m(o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Div<&QuadRat> for &QuadRat {
    type Output = QuadRat;
    /// Panics on division by zero; use [`QuadRat::div`] for the checked form.
    fn div(self, o: &QuadRat) -> QuadRat {
        QuadRat::div(self, o).expect("division by zero in Q(sqrt 5)")
    }
}

impl From<i64> for QuadRat {
    fn from(n: i64) -> Self {
        QuadRat::from_int(n)
    }
}

impl From<(i64, i64)> for QuadRat {
    fn from((p, q): (i64, i64)) -> Self {
        QuadRat::new(p, q)
    }
}

impl From<Rational> for QuadRat {
    fn from(r: Rational) -> Self {
        QuadRat::new(r, 0)
    }
}

impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pz = self.p.cmp0().is_eq();
        let qz = self.q.cmp0().is_eq();
        if qz {
            return write!(f, "{}", self.p);
        }
        let coeff = |r: &Rational| -> String {
            if *r == 1 {
                "w".to_string()
            } else {
                format!("{}*w", r)
            }
        };
        if pz {
            if self.q == -1 {
                return write!(f, "-w");
            }
            if self.q.cmp0().is_lt() {
                return write!(f, "-{}", coeff(&Rational::from(-&self.q)));
            }
            return write!(f, "{}", coeff(&self.q));
        }
        if self.q.cmp0().is_lt() {
            write!(f, "{} - {}", self.p, coeff(&Rational::from(-&self.q)))
        } else {
            write!(f, "{} + {}", self.p, coeff(&self.q))
        }
    }
}

impl fmt::Debug for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadRat({})", self)
    }
}

impl FromStr for QuadRat {
    type Err = FieldError;

    /// Accepts sums of terms `r` and `r*w` (or `w`, `-w`) with rational `r`.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut acc = QuadRat::zero();
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let term = if body == "w" {
                QuadRat::w()
            } else if let Some(c) = body.strip_suffix("*w") {
                QuadRat::new(0, c.parse::<Rational>().map_err(|_| bad())?)
            } else {
                QuadRat::new(body.parse::<Rational>().map_err(|_| bad())?, 0)
            };
            acc = acc + if neg { -term } else { term };
        }
        Ok(acc)
    }
}

impl From<QuadRat> for String {
    fn from(x: QuadRat) -> String {
        x.to_string()
    }
}

impl TryFrom<String> for QuadRat {
    type Error = FieldError;
    fn try_from(s: String) -> Result<Self, FieldError> {
        s.parse()
    }
}

/// Exact gcd-free check `x | y` in Z[w] for integral `x != 0`.
pub fn divides(x: &QuadRat, y: &QuadRat) -> bool {
    match y.div(x) {
        Ok(z) => z.is_integral(),
        Err(_) => false,
    }
}

/// Lowest common denominator of both coordinates.
pub fn common_denominator(x: &QuadRat) -> Integer {
    x.p.denom().clone().lcm(x.q.denom())
}

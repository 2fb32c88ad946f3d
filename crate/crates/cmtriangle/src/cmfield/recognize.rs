//! Rational recognition by continued fractions, symmetric-function minimal
//! polynomials and integral models.

use std::fmt;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use super::CmError;
use crate::exactfield::{factor_integer, QuadRat};
use crate::num::{cabs, two_pow_neg};

pub const MAX_TERMS: usize = 200;

/// Outcome of a continued-fraction expansion that was cut at a large quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct Recognition {
    pub value: Rational,
    /// Partial quotients up to and including the cutting quotient.
    pub quotients: Vec<Integer>,
    /// `true` when the expansion terminated or a convergent reproduced the
    /// input exactly.
    pub exact: bool,
}

/// Regular continued fraction of `x`, at most `max_terms` quotients.  Stops
/// early when the remainder vanishes.
pub fn continued_fraction(x: &Float, max_terms: usize) -> Vec<Integer> {
    let p = x.prec();
    let mut out = Vec::new();
    let mut r = x.clone();
    for _ in 0..max_terms {
        let a = r.to_integer_round(rug::float::Round::Down).map(|(i, _)| i);
        let Some(a) = a else { break };
        let frac = Float::with_val(p, &r - &a);
        out.push(a);
        if frac.is_zero() {
            break;
        }
        r = Float::with_val(p, 1) / frac;
    }
    out
}

/// Canonical continued fraction of a rational (last quotient above 1 unless
/// the value is an integer).
pub fn rational_cf(r: &Rational) -> Vec<Integer> {
    let mut out = Vec::new();
    let (mut n, mut d) = (r.numer().clone(), r.denom().clone());
    while d != 0 {
        let (q, rem) = n.div_rem_floor(d.clone());
        out.push(q);
        n = d;
        d = rem;
    }
    out
}

/// Recognizes `x` as a rational by cutting its continued fraction before the
/// first partial quotient exceeding `threshold`.
pub fn recognize_rational(x: &Float, threshold: &Integer) -> Option<Rational> {
    recognize_rational_detailed(x, threshold).map(|r| r.value)
}

pub fn recognize_rational_detailed(x: &Float, threshold: &Integer) -> Option<Recognition> {
    if !x.is_finite() {
        return None;
    }
    let prec = x.prec();
    // convergents h/k
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let q_limit = Integer::from(1) << (prec.saturating_sub(16) / 2);
    let mut quotients = Vec::new();
    let mut r = x.clone();
    let finish = |h: &Integer, k: &Integer, quotients: Vec<Integer>, exact: bool| {
        let value = Rational::from((h.clone(), k.clone()));
        let err = Float::with_val(prec, &value - x).abs();
        let scale = Float::with_val(prec, x.abs_ref()).max(&Float::with_val(prec, 1));
        if exact || err < two_pow_neg(prec, (prec / 2) as i64) * scale {
            Some(Recognition {
                value,
                quotients,
                exact,
            })
        } else {
            None
        }
    };
    for i in 0..MAX_TERMS {
        let (a, _) = r.to_integer_round(rug::float::Round::Down)?;
        let frac = Float::with_val(prec, &r - &a);
        if i > 0 && a > *threshold {
            quotients.push(a);
            return finish(&h1, &k1, quotients, false);
        }
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        quotients.push(a);
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        // the remainder vanished, or the convergent rounds back to x itself
        if frac.is_zero() || Float::with_val(prec, Rational::from((h1.clone(), k1.clone()))) == *x {
            return finish(&h1, &k1, quotients, true);
        }
        if k1 > q_limit {
            return None;
        }
        r = Float::with_val(prec, 1) / frac;
    }
    None
}

/// Recognizes a real number as a rational, insisting that the imaginary part
/// vanishes.
pub fn recognize_real(z: &Complex, threshold: &Integer) -> Option<Rational> {
    let prec = z.prec().0;
    let scale = cabs(z).max(&Float::with_val(prec, 1));
    if Float::with_val(prec, z.imag().abs_ref()) > two_pow_neg(prec, (prec / 2) as i64) * scale {
        return None;
    }
    recognize_rational(z.real(), threshold)
}

/// Finds `p + q w` with `p, q` in `(1/den) Z`, `|p|, |q| <= bound`, closest to
/// `x` under the identity embedding, if within `2^(-prec/2)`.
pub fn recognize_quadrat(x: &Float, den: i64, bound: i64) -> Option<QuadRat> {
    let prec = x.prec();
    let w = crate::num::omega(prec);
    let tol = two_pow_neg(prec, (prec / 2) as i64)
        * Float::with_val(prec, x.abs_ref()).max(&Float::with_val(prec, 1));
    for qn in -bound * den..=bound * den {
        let q = Rational::from((qn, den));
        let rest = Float::with_val(prec, x - Float::with_val(prec, &w * &q)) * den;
        let pn = rest.to_integer()?;
        if pn.clone().abs() > bound * den {
            continue;
        }
        let err = Float::with_val(prec, &rest - &pn).abs() / den;
        if err < tol {
            return Some(QuadRat::new(Rational::from((pn, den)), q));
        }
    }
    None
}

/// Rational and integer forms of a minimal polynomial, coefficients constant
/// term first.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPoly {
    /// Monic with rational coefficients.
    pub rational: Vec<Rational>,
    /// `rational` times the least common multiple of its denominators.
    pub integer: Vec<Integer>,
}

/// `prod (t - scale v)` over `values`, with each coefficient recognized as a
/// rational.
pub fn min_poly_from_values(
    values: &[Complex],
    scale: &Rational,
    threshold: &Integer,
) -> Result<MinPoly, CmError> {
    if values.is_empty() || values.len() > 4 {
        return Err(CmError::RecognitionFailed(format!(
            "{} values",
            values.len()
        )));
    }
    let prec = values.iter().map(|v| v.prec().0).min().unwrap();
    let s = Float::with_val(prec, scale);
    let vs: Vec<Complex> = values
        .iter()
        .map(|v| Complex::with_val(prec, v * &s))
        .collect();
    // coefficients of prod (t - v), constant first
    let mut c: Vec<Complex> = vec![Complex::with_val(prec, 1)];
    for v in &vs {
        let mut next = vec![Complex::new(prec); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= Complex::with_val(prec, ci * v);
        }
        c = next;
    }
    let n = vs.len();
    let mut rational = Vec::with_capacity(n + 1);
    for (k, ck) in c.iter().enumerate() {
        if k == n {
            rational.push(Rational::from(1));
            continue;
        }
        let r = recognize_real(ck, threshold)
            .ok_or_else(|| CmError::RecognitionFailed(format!("coefficient of t^{k}")))?;
        rational.push(r);
    }
    let integer = clear_denominators(&rational);
    Ok(MinPoly { rational, integer })
}

pub fn clear_denominators(p: &[Rational]) -> Vec<Integer> {
    let mut l = Integer::from(1);
    for c in p {
        l.lcm_mut(c.denom());
    }
    p.iter()
        .map(|c| Integer::from(Rational::from(c * &l).numer()))
        .collect()
}

/// Change of variable relating the singular-value polynomial in `t` to a model
/// in `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Substitution {
    /// `Y = c t`
    Scale { c: String },
    /// `Y = c / t`
    Inverse { c: String },
    /// `Y = c / (alpha t + beta)`
    Mobius {
        c: String,
        alpha: String,
        beta: String,
    },
}

impl Substitution {
    pub fn scale(c: Integer) -> Self {
        Substitution::Scale { c: c.to_string() }
    }

    pub fn inverse(c: Integer) -> Self {
        Substitution::Inverse { c: c.to_string() }
    }

    pub fn mobius(c: Integer, alpha: Integer, beta: Integer) -> Self {
        Substitution::Mobius {
            c: c.to_string(),
            alpha: alpha.to_string(),
            beta: beta.to_string(),
        }
    }

    fn int(s: &str) -> Result<Rational, CmError> {
        s.parse::<Rational>()
            .map_err(|_| CmError::RecognitionFailed(format!("bad constant {s}")))
    }

    /// `Y` as a function of `t`, numerically.
    pub fn apply(&self, t: &Complex) -> Result<Complex, CmError> {
        let p = t.prec().0;
        let f = |s: &str| -> Result<Float, CmError> { Ok(Float::with_val(p, Self::int(s)?)) };
        Ok(match self {
            Substitution::Scale { c } => Complex::with_val(p, t * f(c)?),
            Substitution::Inverse { c } => Complex::with_val(p, f(c)?) / t,
            Substitution::Mobius { c, alpha, beta } => {
                Complex::with_val(p, f(c)?) / (Complex::with_val(p, t * f(alpha)?) + f(beta)?)
            }
        })
    }

    /// The polynomial in `Y` whose roots are the images of the roots of `poly`
    /// (constant term first), normalized to be monic.
    pub fn transform(&self, poly: &[Rational]) -> Result<Vec<Rational>, CmError> {
        let n = poly.len() - 1;
        // t = (u0 + u1 Y) / (v0 + v1 Y); multiply P(t) by (v0 + v1 Y)^n
        let (u, v) = match self {
            Substitution::Scale { c } => {
                let c = Self::int(c)?;
                ([Rational::new(), Rational::from(1)], [c, Rational::new()])
            }
            Substitution::Inverse { c } => (
                [Self::int(c)?, Rational::new()],
                [Rational::new(), Rational::from(1)],
            ),
            Substitution::Mobius { c, alpha, beta } => {
                let beta = Self::int(beta)?;
                ([Self::int(c)?, -beta], [Rational::new(), Self::int(alpha)?])
            }
        };
        let mut out = vec![Rational::new(); n + 1];
        for (k, ak) in poly.iter().enumerate() {
            let term = poly_mul(&poly_pow(&u, k), &poly_pow(&v, n - k));
            for (i, t) in term.iter().enumerate() {
                out[i] += Rational::from(ak * t);
            }
        }
        while out.len() > 1 && out.last().is_some_and(|x| x.cmp0().is_eq()) {
            out.pop();
        }
        let lead = out.last().cloned().unwrap();
        if lead.cmp0().is_eq() {
            return Err(CmError::NotClearable);
        }
        Ok(out.into_iter().map(|x| x / &lead).collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Substitution::Scale { c } => write!(f, "Y = {c}*t"),
            Substitution::Inverse { c } => write!(f, "Y = {c}/t"),
            Substitution::Mobius { c, alpha, beta } => write!(f, "Y = {c}/({alpha}*t + {beta})"),
        }
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    out
}

fn poly_pow(a: &[Rational], k: usize) -> Vec<Rational> {
    let mut out = vec![Rational::from(1)];
    for _ in 0..k {
        out = poly_mul(&out, a);
    }
    out
}

/// Monic integer model with its discriminant.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralModel {
    pub substitution: Substitution,
    /// Constant term first, leading coefficient 1.
    pub coefficients: Vec<Integer>,
    pub discriminant: Integer,
}

/// Applies `sub` to the monic polynomial `poly` (constant term first) and
/// returns the result when it is monic with integer coefficients.
pub fn integral_model(poly: &[Rational], sub: &Substitution) -> Result<IntegralModel, CmError> {
    if poly.len() < 2 || poly.iter().all(|c| c.cmp0().is_eq()) {
        return Err(CmError::NotClearable);
    }
    let q = sub.transform(poly)?;
    if q.iter().any(|c| *c.denom() != 1) {
        return Err(CmError::NotClearable);
    }
    let coefficients: Vec<Integer> = q.iter().map(|c| c.numer().clone()).collect();
    let discriminant = discriminant(&coefficients);
    Ok(IntegralModel {
        substitution: sub.clone(),
        coefficients,
        discriminant,
    })
}

/// Least `c` such that `c^n P(Y/c)` has integer coefficients, for monic `P`
/// with rational coefficients.  Fails if some prime needs an exponent above
/// `max_exp`.
pub fn minimal_scale(poly: &[Rational], max_exp: u32) -> Result<Integer, CmError> {
    let n = poly.len() - 1;
    let mut primes: Vec<Integer> = Vec::new();
    for c in poly {
        for (p, _) in factor_integer(c.denom()).map_err(|_| CmError::NotClearable)? {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    let mut c = Integer::from(1);
    for p in primes {
        let mut need = 0u32;
        for (k, a) in poly.iter().enumerate().take(n) {
            if a.cmp0().is_eq() {
                continue;
            }
            let v = valuation(a.numer(), &p) as i64 - valuation(a.denom(), &p) as i64;
            if v < 0 {
                let span = (n - k) as i64;
                need = need.max(((-v + span - 1) / span) as u32);
            }
        }
        if need > max_exp {
            return Err(CmError::NotClearable);
        }
        c *= p.pow(need);
    }
    Ok(c)
}

fn valuation(n: &Integer, p: &Integer) -> u32 {
    if n.cmp0().is_eq() {
        return 0;
    }
    let mut n = n.clone();
    let mut v = 0;
    while n.is_divisible(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Discriminant of an integer polynomial (constant term first).
pub fn discriminant(f: &[Integer]) -> Integer {
    let n = f.len() - 1;
    if n == 0 {
        return Integer::from(1);
    }
    let df: Vec<Integer> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| Integer::from(c * k as u32))
        .collect();
    let res = resultant(f, &df);
    let lead = f[n].clone();
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
    Integer::from(res / lead) * sign
}

/// Resultant via the Sylvester matrix and fraction-free elimination.
pub fn resultant(f: &[Integer], g: &[Integer]) -> Integer {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return Integer::from(1);
    }
    let mut s = vec![vec![Integer::new(); size]; size];
    // rows use descending powers
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            s[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            s[n + i][i + j] = c.clone();
        }
    }
    bareiss_det(s)
}

fn bareiss_det(mut a: Vec<Vec<Integer>>) -> Integer {
    let n = a.len();
    let mut sign = 1;
    let mut prev = Integer::from(1);
    for k in 0..n - 1 {
        if a[k][k].cmp0().is_eq() {
            let Some(r) = (k + 1..n).find(|&r| a[r][k].cmp0().is_ne()) else {
                return Integer::new();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = Integer::from(&a[i][j] * &a[k][k]) - Integer::from(&a[i][k] * &a[k][j]);
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Integer::from(&a[n - 1][n - 1] * sign)
}

/// All complex roots of a polynomial (constant term first) by simultaneous
/// Weierstrass iteration.
pub fn poly_roots(poly: &[Rational], prec: u32) -> Vec<Complex> {
    let n = poly.len() - 1;
    let lead = Float::with_val(prec, &poly[n]);
    let c: Vec<Complex> = poly
        .iter()
        .map(|x| Complex::with_val(prec, Float::with_val(prec, x) / &lead))
        .collect();
    let eval = |z: &Complex| {
        let mut acc = Complex::new(prec);
        for ck in c.iter().rev() {
            acc = acc * z + ck;
        }
        acc
    };
    let seed = Complex::with_val(prec, (0.4, 0.9));
    let radius = 1.0
        + c.iter()
            .take(n)
            .map(|x| cabs(x).to_f64())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| Complex::with_val(prec, seed.clone().pow(k as u32) * radius))
        .collect();
    let tol = two_pow_neg(prec, prec as i64 - 8);
    for _ in 0..(40 * prec as usize) {
        let mut moved = Float::new(prec);
        for i in 0..n {
            let mut den = Complex::with_val(prec, 1);
            for j in 0..n {
                if i != j {
                    den *= Complex::with_val(prec, &z[i] - &z[j]);
                }
            }
            let delta = eval(&z[i]) / den;
            moved = moved.max(&(cabs(&delta) / cabs(&z[i]).max(&Float::with_val(prec, 1))));
            z[i] -= delta;
        }
        if moved < tol {
            break;
        }
    }
    z
}

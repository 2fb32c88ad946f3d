//! Hilbert symbols of the arithmetic triangle groups and the bundled table.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rug::{Float, Integer};
use serde::Deserialize;

use super::QuatError;
use crate::exactfield::QuadRat;
use crate::num::pi;

/// A triangle signature `(e1, e2, e3)`, sorted ascending, `None` for a cusp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature(pub [Option<u32>; 3]);

impl Signature {
    pub fn new(e: [Option<u32>; 3]) -> Self {
        let mut e = e;
        e.sort_by_key(|x| x.unwrap_or(u32::MAX));
        Signature(e)
    }

    pub fn finite(e1: u32, e2: u32, e3: u32) -> Self {
        Signature::new([Some(e1), Some(e2), Some(e3)])
    }
}

impl FromStr for Signature {
    type Err = QuatError;
    fn from_str(s: &str) -> Result<Self, QuatError> {
        let bad = || QuatError::Parse(s.to_string());
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut e = [None; 3];
        for (slot, p) in e.iter_mut().zip(&parts) {
            *slot = match *p {
                "inf" | "oo" | "∞" => None,
                n => {
                    let v: u32 = n.parse().map_err(|_| bad())?;
                    if v < 2 {
                        return Err(bad());
                    }
                    Some(v)
                }
            };
        }
        Ok(Signature::new(e))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self
            .0
            .iter()
            .map(|e| e.map_or("inf".to_string(), |v| v.to_string()))
            .collect();
        write!(f, "({})", s.join(","))
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct TakeuchiClass {
    pub id: String,
    pub field: String,
    pub disc: String,
    pub signatures: Vec<String>,
    pub norm_one: String,
    pub unit: String,
    pub normalizer: String,
    pub a: String,
    pub b: String,
}

impl TakeuchiClass {
    pub fn signature_list(&self) -> Vec<Signature> {
        self.signatures
            .iter()
            .map(|s| s.parse().expect("bundled signature"))
            .collect()
    }

    pub fn normalizer_signature(&self) -> Signature {
        self.normalizer
            .parse()
            .expect("bundled normalizer signature")
    }

    pub fn a_expr(&self) -> Expr {
        self.a.parse().expect("bundled expression")
    }

    pub fn b_expr(&self) -> Expr {
        self.b.parse().expect("bundled expression")
    }
}

#[derive(Deserialize)]
struct TableFile {
    class: Vec<TakeuchiClass>,
}

/// The bundled table of the 19 commensurability classes.
pub fn takeuchi_table() -> &'static [TakeuchiClass] {
    static TABLE: OnceLock<Vec<TakeuchiClass>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let src = include_str!("../../data/takeuchi.toml");
        toml::from_str::<TableFile>(src)
            .expect("bundled table parses")
            .class
    })
}

pub fn class_of(sig: &Signature) -> Option<&'static TakeuchiClass> {
    takeuchi_table()
        .iter()
        .find(|c| c.signature_list().contains(sig))
}

/// The Hilbert symbol attached to a triangle signature.  `a_exact`/`b_exact`
/// are filled in whenever the values lie in Q(sqrt 5).
#[derive(Debug, Clone)]
pub struct TakeuchiAB {
    pub signature: Signature,
    pub class: &'static str,
    pub a: Float,
    pub b: Float,
    pub a_exact: Option<QuadRat>,
    pub b_exact: Option<QuadRat>,
}

/// `t = 2 cos(k pi / e)`, with `t = 2` at a cusp.
fn trace_param(e: Option<u32>, k: i64, prec: u32) -> Float {
    match e {
        None => Float::with_val(prec, 2),
        Some(e) => {
            let x = pi(prec) * Float::with_val(prec, k) / e;
            x.cos() * 2u32
        }
    }
}

/// `t^2` in Q(sqrt 5) when it lies there.
fn trace_sq_exact(e: Option<u32>) -> Option<QuadRat> {
    let w = QuadRat::w();
    Some(match e {
        None => QuadRat::from_int(4),
        Some(2) => QuadRat::zero(),
        Some(3) => QuadRat::one(),
        Some(4) => QuadRat::from_int(2),
        Some(5) => QuadRat::from_int(2) - w,
        Some(6) => QuadRat::from_int(3),
        Some(10) => QuadRat::from_int(3) - w,
        _ => return None,
    })
}

/// Evaluates the triangle-group formula for `(a, b)` under the Galois twist
/// `cos(pi/e) -> cos(k pi/e)`.
pub fn takeuchi_numeric(sig: &Signature, k: i64, prec: u32) -> (Float, Float) {
    let t: Vec<Float> = sig.0.iter().map(|e| trace_param(*e, k, prec)).collect();
    let sq: Vec<Float> = t
        .iter()
        .map(|x| Float::with_val(prec, x.square_ref()))
        .collect();
    let a = Float::with_val(prec, &sq[1] * Float::with_val(prec, &sq[1] - 4u32));
    let prod = Float::with_val(prec, &t[0] * &t[1]) * &t[2];
    let inner = Float::with_val(prec, &sq[0] + &sq[1]) + &sq[2] + prod - 4u32;
    let b = Float::with_val(prec, &sq[1] * &sq[2]) * inner;
    (a, b)
}

/// Hilbert symbol `(a, b)` for an arithmetic triangle signature.
pub fn takeuchi_ab(sig: &Signature, prec: u32) -> Result<TakeuchiAB, QuatError> {
    let class = class_of(sig).ok_or_else(|| QuatError::NotArithmetic(sig.to_string()))?;
    let (a, b) = takeuchi_numeric(sig, 1, prec);
    let (a_exact, b_exact) = match takeuchi_exact(sig) {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    Ok(TakeuchiAB {
        signature: *sig,
        class: &class.id,
        a,
        b,
        a_exact,
        b_exact,
    })
}

fn takeuchi_exact(sig: &Signature) -> Option<(QuadRat, QuadRat)> {
    let sq: Vec<QuadRat> = sig
        .0
        .iter()
        .map(|e| trace_sq_exact(*e))
        .collect::<Option<_>>()?;
    let prod_sq = &(&sq[0] * &sq[1]) * &sq[2];
    let prod = prod_sq.sqrt_exact()?;
    let four = QuadRat::from_int(4);
    let a = &sq[1] * &(&sq[1] - &four);
    let inner = &(&(&(&sq[0] + &sq[1]) + &sq[2]) + &prod) - &four;
    let b = &(&sq[1] * &sq[2]) * &inner;
    Some((a, b))
}

/// Arithmetic expressions in integers, `sqrt(n)` and `cos(pi/m)`, evaluated
/// under the Galois twists `cos(pi/m) -> cos(k pi/m)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(Integer),
    Sqrt(u32),
    CosPi(u32),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Value under the twist `k`; `k` must be coprime to `2 * self.conductor()`.
    pub fn eval(&self, k: i64, prec: u32) -> Float {
        let cos_k = |m: u32| (pi(prec) * Float::with_val(prec, k) / m).cos();
        match self {
            Expr::Int(n) => Float::with_val(prec, n),
            // sqrt n written through cosines so that the twist acts on it
            Expr::Sqrt(2) => cos_k(4) * 2u32,
            Expr::Sqrt(3) => cos_k(6) * 2u32,
            Expr::Sqrt(5) => cos_k(5) * 4u32 - 1u32,
            Expr::Sqrt(6) => cos_k(4) * cos_k(6) * 4u32,
            Expr::Sqrt(n) => panic!("sqrt({n}) has no cyclotomic form here"),
            Expr::CosPi(m) => cos_k(*m),
            Expr::Neg(x) => -x.eval(k, prec),
            Expr::Add(x, y) => x.eval(k, prec) + y.eval(k, prec),
            Expr::Sub(x, y) => x.eval(k, prec) - y.eval(k, prec),
            Expr::Mul(x, y) => x.eval(k, prec) * y.eval(k, prec),
            Expr::Div(x, y) => x.eval(k, prec) / y.eval(k, prec),
            Expr::Pow(x, e) => {
                let v = x.eval(k, prec);
                let mut acc = Float::with_val(prec, 1);
                for _ in 0..*e {
                    acc *= &v;
                }
                acc
            }
        }
    }

    /// Least `N` with every cosine argument of the form `pi j / N`.
    pub fn conductor(&self) -> u32 {
        fn lcm(a: u32, b: u32) -> u32 {
            let g = Integer::from(a).gcd(&Integer::from(b)).to_u32().unwrap();
            a / g * b
        }
        match self {
            Expr::Int(_) => 1,
            Expr::Sqrt(2) => 4,
            Expr::Sqrt(3) => 6,
            Expr::Sqrt(5) => 5,
            Expr::Sqrt(6) => 12,
            Expr::Sqrt(_) => 1,
            Expr::CosPi(m) => *m,
            Expr::Neg(x) | Expr::Pow(x, _) => x.conductor(),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
                lcm(x.conductor(), y.conductor())
            }
        }
    }
}

impl FromStr for Expr {
    type Err = QuatError;
    fn from_str(s: &str) -> Result<Self, QuatError> {
        let toks: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = ExprParser {
            t: &toks,
            i: 0,
            src: s,
        };
        let e = p.sum()?;
        if p.i != toks.len() {
            return Err(p.err());
        }
        Ok(e)
    }
}

struct ExprParser<'a> {
    t: &'a [char],
    i: usize,
    src: &'a str,
}

impl ExprParser<'_> {
    fn err(&self) -> QuatError {
        QuatError::Parse(self.src.to_string())
    }

    fn peek(&self) -> Option<char> {
        self.t.get(self.i).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), QuatError> {
        for c in s.chars() {
            if !self.eat(c) {
                return Err(self.err());
            }
        }
        Ok(())
    }

    fn uint(&mut self) -> Result<u32, QuatError> {
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        let s: String = self.t[start..self.i].iter().collect();
        s.parse().map_err(|_| self.err())
    }

    fn sum(&mut self) -> Result<Expr, QuatError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, QuatError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat('/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, QuatError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.uint()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, QuatError> {
        match self.peek() {
            Some('(') => {
                self.i += 1;
                let e = self.sum()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(Integer::from(self.uint()?))),
            Some('s') => {
                self.expect("sqrt(")?;
                let n = self.uint()?;
                self.expect(")")?;
                if ![2, 3, 5, 6].contains(&n) {
                    return Err(self.err());
                }
                Ok(Expr::Sqrt(n))
            }
            Some('c') => {
                self.expect("cos(pi/")?;
                let m = self.uint()?;
                self.expect(")")?;
                if m == 0 {
                    return Err(self.err());
                }
                Ok(Expr::CosPi(m))
            }
            _ => Err(self.err()),
        }
    }
}

/// Formula versus table for one class, evaluated at every real embedding of
/// the field.
#[derive(Debug, Clone)]
pub struct TableComparison {
    pub class: String,
    pub signature: Signature,
    pub degree: usize,
    /// `formula / table` under each embedding.
    pub ratio_a: Vec<Float>,
    pub ratio_b: Vec<Float>,
    /// The ratio is a square in the field, within `tol`.
    pub a_square: bool,
    pub b_square: bool,
}

/// Compares the triangle formula at the normalizer signature of `class` with
/// its tabulated Hilbert symbol, up to squares in the field.
pub fn compare_with_table(class: &TakeuchiClass, prec: u32, tol: &Float) -> TableComparison {
    let sig = class.normalizer_signature();
    let (ea, eb) = (class.a_expr(), class.b_expr());
    let mut n = ea.conductor().max(1);
    for m in sig.0.iter().flatten().copied().chain([eb.conductor()]) {
        let g = Integer::from(n).gcd(&Integer::from(m)).to_u32().unwrap();
        n = n / g * m;
    }
    let two_n = 2 * n as i64;
    // one twist per real embedding of the field, keyed by the generator values
    let mut reps: Vec<(i64, Vec<f64>)> = Vec::new();
    for k in 1..two_n {
        if Integer::from(k).gcd(&Integer::from(two_n)) != 1 {
            continue;
        }
        let gens = field_generators(&sig, k, 64);
        if !reps
            .iter()
            .any(|(_, g)| g.iter().zip(&gens).all(|(x, y)| (x - y).abs() < 1e-9))
        {
            reps.push((k, gens));
        }
    }
    let mut ratio_a = Vec::new();
    let mut ratio_b = Vec::new();
    for (k, _) in &reps {
        let (fa, fb) = takeuchi_numeric(&sig, *k, prec);
        ratio_a.push(fa / ea.eval(*k, prec));
        ratio_b.push(fb / eb.eval(*k, prec));
    }
    let gens: Vec<Vec<Float>> = reps
        .iter()
        .map(|(k, _)| {
            let t: Vec<Float> = sig.0.iter().map(|e| trace_param(*e, *k, prec)).collect();
            let sq = |x: &Float| Float::with_val(prec, x.square_ref());
            vec![
                sq(&t[0]),
                sq(&t[1]),
                sq(&t[2]),
                Float::with_val(prec, &t[0] * &t[1]) * &t[2],
            ]
        })
        .collect();
    let a_square = is_field_square(&ratio_a, &gens, tol);
    let b_square = is_field_square(&ratio_b, &gens, tol);
    TableComparison {
        class: class.id.clone(),
        signature: sig,
        degree: reps.len(),
        ratio_a,
        ratio_b,
        a_square,
        b_square,
    }
}

fn field_generators(sig: &Signature, k: i64, prec: u32) -> Vec<f64> {
    let t: Vec<f64> = sig
        .0
        .iter()
        .map(|e| trace_param(*e, k, prec).to_f64())
        .collect();
    vec![t[0] * t[0], t[1] * t[1], t[2] * t[2], t[0] * t[1] * t[2]]
}

/// `r` (given by its conjugates) is a square in the field generated by `gens`:
/// some choice of signs for the conjugate square roots has rational
/// coordinates in a power basis.
fn is_field_square(r: &[Float], gens: &[Vec<Float>], tol: &Float) -> bool {
    let d = r.len();
    if r.iter()
        .any(|x| x.cmp0() != Some(std::cmp::Ordering::Greater))
    {
        return false;
    }
    let prec = r[0].prec();
    // primitive element: a small integer combination with distinct conjugates
    let theta = [
        [1i32, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 2, 3, 5],
        [2, 3, 7, 11],
    ]
    .iter()
    .map(|c| {
        gens.iter()
            .map(|g| {
                g.iter().zip(c).fold(Float::new(prec), |acc, (x, ci)| {
                    acc + Float::with_val(prec, x * *ci)
                })
            })
            .collect::<Vec<Float>>()
    })
    .find(|th| (0..d).all(|i| (0..i).all(|j| Float::with_val(prec, &th[i] - &th[j]).abs() > 1e-6)));
    let Some(theta) = theta else { return false };
    let roots: Vec<Float> = r
        .iter()
        .map(|x| Float::with_val(prec, x.sqrt_ref()))
        .collect();
    for mask in 0..(1u32 << (d - 1)) {
        let s: Vec<Float> = (0..d)
            .map(|j| {
                if j > 0 && mask >> (j - 1) & 1 == 1 {
                    -roots[j].clone()
                } else {
                    roots[j].clone()
                }
            })
            .collect();
        let Some(coords) = solve_vandermonde(&theta, &s) else {
            continue;
        };
        if coords.iter().all(|c| near_rational(c, 1_000_000, tol)) {
            return true;
        }
    }
    false
}

fn solve_vandermonde(theta: &[Float], rhs: &[Float]) -> Option<Vec<Float>> {
    let d = theta.len();
    let prec = rhs[0].prec();
    let mut m: Vec<Vec<Float>> = (0..d)
        .map(|j| {
            let mut row = Vec::with_capacity(d + 1);
            let mut p = Float::with_val(prec, 1);
            for _ in 0..d {
                row.push(p.clone());
                p *= &theta[j];
            }
            row.push(rhs[j].clone());
            row
        })
        .collect();
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&x, &y| m[x][col].clone().abs().total_cmp(&m[y][col].clone().abs()))?;
        m.swap(piv, col);
        if m[col][col].is_zero() {
            return None;
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let f = Float::with_val(prec, &m[r][col] / &m[col][col]);
            for c in col..=d {
                let t = Float::with_val(prec, &f * &m[col][c]);
                m[r][c] -= t;
            }
        }
    }
    Some(
        (0..d)
            .map(|i| Float::with_val(prec, &m[i][d] / &m[i][i]))
            .collect(),
    )
}

/// Within `tol` of a rational with denominator at most `max_den`.
fn near_rational(x: &Float, max_den: u64, tol: &Float) -> bool {
    let prec = x.prec();
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut y = x.clone();
    for _ in 0..64 {
        let a = y.clone().floor().to_integer().expect("finite");
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if k2 > max_den {
            return false;
        }
        let approx = Float::with_val(prec, &h2) / Float::with_val(prec, &k2);
        if Float::with_val(prec, x - approx).abs() < *tol {
            return true;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = Float::with_val(prec, &y - &a);
        if frac.is_zero() {
            return false;
        }
        y = frac.recip();
    }
    false
}

//! Quaternion algebras `(a, b / F)` over F = Q(sqrt 5), their matrix model and
//! the maximal order used for the (3,3,5) triangle group.

mod takeuchi;

pub use takeuchi::{
    class_of, compare_with_table, takeuchi_ab, takeuchi_numeric, takeuchi_table, Expr, Signature,
    TableComparison, TakeuchiAB, TakeuchiClass,
};

use std::fmt;
use std::str::FromStr;

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactfield::{Embedding, FieldError, QuadRat};
use crate::num::Mat2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuatError {
    #[error("signature {0} is not an arithmetic triangle signature")]
    NotArithmetic(String),
    #[error("basis is linearly dependent")]
    SingularBasis,
    #[error("no algebra normalization makes the order basis a maximal order")]
    CalibrationFailed,
    #[error("cannot parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `x1 + x2*alpha + x3*beta + x4*alpha*beta`, matching `M1, Mx, My, Mz`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QuatElem(pub [QuadRat; 4]);

impl QuatElem {
    pub fn from_ints(c: [(i64, i64); 4]) -> Self {
        QuatElem(c.map(QuadRat::from))
    }

    pub fn one() -> Self {
        QuatElem([
            QuadRat::one(),
            QuadRat::zero(),
            QuadRat::zero(),
            QuadRat::zero(),
        ])
    }

    pub fn add(&self, o: &QuatElem) -> QuatElem {
        QuatElem(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }

    pub fn sub(&self, o: &QuatElem) -> QuatElem {
        QuatElem(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }

    pub fn scale(&self, s: &QuadRat) -> QuatElem {
        QuatElem(std::array::from_fn(|i| &self.0[i] * s))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(QuadRat::is_zero)
    }
}

impl fmt::Display for QuatElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", s.join(", "))
    }
}

impl fmt::Debug for QuatElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuatElem({})", self)
    }
}

impl FromStr for QuatElem {
    type Err = QuatError;
    /// Four comma-separated field elements.
    fn from_str(s: &str) -> Result<Self, QuatError> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(QuatError::Parse(s.to_string()));
        }
        let mut out: [QuadRat; 4] = Default::default();
        for (slot, p) in out.iter_mut().zip(parts) {
            *slot = p.parse()?;
        }
        Ok(QuatElem(out))
    }
}

/// The algebra `(a, b / F)` with `alpha^2 = a`, `beta^2 = b`, `beta alpha = -alpha beta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuaternionAlgebra {
    pub a: QuadRat,
    pub b: QuadRat,
}

impl QuaternionAlgebra {
    pub fn new(a: QuadRat, b: QuadRat) -> Self {
        QuaternionAlgebra { a, b }
    }

    pub fn mul(&self, x: &QuatElem, y: &QuatElem) -> QuatElem {
        quat_mul(self, x, y)
    }

    pub fn trd(&self, x: &QuatElem) -> QuadRat {
        &x.0[0] + &x.0[0]
    }

    pub fn nrd(&self, x: &QuatElem) -> QuadRat {
        let [x1, x2, x3, x4] = &x.0;
        let ab = &self.a * &self.b;
        &(&(&(x1 * x1) - &(&self.a * &(x2 * x2))) - &(&self.b * &(x3 * x3))) + &(&ab * &(x4 * x4))
    }

    pub fn conj(&self, x: &QuatElem) -> QuatElem {
        let [x1, x2, x3, x4] = &x.0;
        QuatElem([x1.clone(), -x2, -x3, -x4])
    }

    /// Reduced trace and norm are in the ring of integers.
    pub fn is_integral(&self, x: &QuatElem) -> bool {
        self.trd(x).is_integral() && self.nrd(x).is_integral()
    }

    /// The image of `x` in M2(R) under the identity embedding of F.
    pub fn embed_matrix(&self, x: &QuatElem, prec: u32) -> Mat2 {
        embed_matrix(self, x, prec)
    }
}

/// Product in `(a, b / F)`.
pub fn quat_mul(alg: &QuaternionAlgebra, x: &QuatElem, y: &QuatElem) -> QuatElem {
    let [x1, x2, x3, x4] = &x.0;
    let [y1, y2, y3, y4] = &y.0;
    let (a, b) = (&alg.a, &alg.b);
    let ab = a * b;
    let z1 = &(&(&(x1 * y1) + &(a * &(x2 * y2))) + &(b * &(x3 * y3))) - &(&ab * &(x4 * y4));
    let z2 = &(&(&(x1 * y2) + &(x2 * y1)) - &(b * &(x3 * y4))) + &(b * &(x4 * y3));
    let z3 = &(&(&(x1 * y3) + &(x3 * y1)) + &(a * &(x2 * y4))) - &(a * &(x4 * y2));
    let z4 = &(&(&(x1 * y4) + &(x4 * y1)) + &(x2 * y3)) - &(x3 * y2);
    QuatElem([z1, z2, z3, z4])
}

/// `(Trd, Nrd)`.
pub fn trd_nrd(alg: &QuaternionAlgebra, x: &QuatElem) -> (QuadRat, QuadRat) {
    (alg.trd(x), alg.nrd(x))
}

/// `x1 M1 + x2 Mx + x3 My + x4 Mz` with `Mx = [[0,a],[1,0]]`,
/// `My = diag(sqrt b, -sqrt b)`, `Mz = Mx My`.
pub fn embed_matrix(alg: &QuaternionAlgebra, x: &QuatElem, prec: u32) -> Mat2 {
    let wp = prec + 16;
    let e = |q: &QuadRat| q.embed(Embedding::Identity, wp);
    let a = e(&alg.a);
    let sb = Complex::with_val(wp, e(&alg.b)).sqrt();
    let [x1, x2, x3, x4] = x.0.each_ref().map(|v| Complex::with_val(wp, e(v)));
    let m11 = Complex::with_val(wp, &x1 + Complex::with_val(wp, &x3 * &sb));
    let m22 = Complex::with_val(wp, &x1 - Complex::with_val(wp, &x3 * &sb));
    let x4sb = Complex::with_val(wp, &x4 * &sb);
    let m12 = Complex::with_val(wp, Complex::with_val(wp, &x2 - &x4sb) * &a);
    let m21 = Complex::with_val(wp, &x2 + &x4sb);
    Mat2::new(m11, m12, m21, m22).with_prec(prec)
}

/// An F-basis of a maximal order, in coordinates of the algebra.
#[derive(Debug, Clone)]
pub struct OrderBasis {
    pub algebra: QuaternionAlgebra,
    pub basis: [QuatElem; 4],
    /// `true` when the algebra had to be renormalized away from the tabulated
    /// Hilbert symbol for the basis to be a maximal order.
    pub calibrated: bool,
}

/// The printed order basis, as coordinates in `M1, Mx, My, Mz`.
pub fn printed_order_basis() -> [QuatElem; 4] {
    let w = QuadRat::w();
    let half = Rational::from((1, 2));
    let wh = w.scale(&half);
    let z = QuadRat::zero;
    let one = QuadRat::one;
    [
        QuatElem([one(), z(), z(), z()]),
        QuatElem([one(), z(), wh.clone(), QuadRat::from(half.clone())]),
        QuatElem([(QuadRat::one() - w.clone()).scale(&half), wh, z(), z()]),
        QuatElem([one(), z(), w, z()]),
    ]
}

/// Gram matrix `Trd(G_i G_j)` and its determinant.
pub fn gram_trace_det(
    alg: &QuaternionAlgebra,
    basis: &[QuatElem; 4],
) -> ([[QuadRat; 4]; 4], QuadRat) {
    let g: [[QuadRat; 4]; 4] = std::array::from_fn(|i| {
        std::array::from_fn(|j| alg.trd(&quat_mul(alg, &basis[i], &basis[j])))
    });
    let det = det4(&g);
    (g, det)
}

fn det4(m: &[[QuadRat; 4]; 4]) -> QuadRat {
    // Gaussian elimination over the field
    let mut a: Vec<Vec<QuadRat>> = m.iter().map(|r| r.to_vec()).collect();
    let mut det = QuadRat::one();
    for col in 0..4 {
        let Some(piv) = (col..4).find(|&r| !a[r][col].is_zero()) else {
            return QuadRat::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = &det * &p;
        let pinv = p.inv().expect("nonzero pivot");
        for r in col + 1..4 {
            let f = &a[r][col] * &pinv;
            if f.is_zero() {
                continue;
            }
            for c in col..4 {
                let t = &f * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    det
}

/// Solves `sum c_i basis_i = x` over F.
pub fn order_coords(basis: &[QuatElem; 4], x: &QuatElem) -> Result<[QuadRat; 4], QuatError> {
    // columns are basis vectors, augmented with x
    let mut a: Vec<Vec<QuadRat>> = (0..4)
        .map(|r| {
            (0..4)
                .map(|c| basis[c].0[r].clone())
                .chain([x.0[r].clone()])
                .collect()
        })
        .collect();
    for col in 0..4 {
        let piv = (col..4)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(QuatError::SingularBasis)?;
        a.swap(piv, col);
        let pinv = a[col][col].inv()?;
        for c in col..5 {
            a[col][c] = &a[col][c] * &pinv;
        }
        for r in 0..4 {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..5 {
                let t = &f * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    Ok(std::array::from_fn(|i| a[i][4].clone()))
}

/// Element with the given order coordinates.
pub fn from_order_coords(basis: &[QuatElem; 4], c: &[QuadRat; 4]) -> QuatElem {
    (0..4).fold(QuatElem::default(), |acc, i| {
        acc.add(&basis[i].scale(&c[i]))
    })
}

/// Outcome of testing one algebra normalization against an order basis.
#[derive(Debug, Clone)]
pub struct OrderCheck {
    pub gram_det: QuadRat,
    pub gram_norm: Rational,
    pub closed: bool,
    pub integral: bool,
}

impl OrderCheck {
    /// Maximal order of an algebra ramified exactly at the prime above 5.
    pub fn passes(&self) -> bool {
        self.closed && self.integral && self.gram_norm.clone().abs() == 25
    }
}

pub fn check_order(
    alg: &QuaternionAlgebra,
    basis: &[QuatElem; 4],
) -> Result<OrderCheck, QuatError> {
    let (_, det) = gram_trace_det(alg, basis);
    if det.is_zero() {
        return Err(QuatError::SingularBasis);
    }
    let integral = basis.iter().all(|g| alg.is_integral(g));
    let mut closed = true;
    'outer: for x in basis {
        for y in basis {
            let c = order_coords(basis, &quat_mul(alg, x, y))?;
            if !c.iter().all(QuadRat::is_integral) {
                closed = false;
                break 'outer;
            }
        }
    }
    Ok(OrderCheck {
        gram_norm: det.norm(),
        gram_det: det,
        closed,
        integral,
    })
}

/// Divides out squares of sqrt 5 and of the unit `1 - w` until the value under
/// the identity embedding is as close to 1 as possible (ties go to values > 1).
pub fn reduce_square_class(x: &QuadRat) -> QuadRat {
    let five = QuadRat::from_int(5);
    let mut y = x.clone();
    loop {
        match y.div(&five) {
            Ok(z) if z.is_integral() && y.is_integral() => y = z,
            _ => break,
        }
    }
    let wb2 = (QuadRat::one() - QuadRat::w()).pow(2);
    let wb2inv = wb2.inv().expect("unit");
    let size = |v: &QuadRat| v.embed_f64(Embedding::Identity).abs().ln();
    let mut best = y.clone();
    let (mut up, mut down) = (y.clone(), y);
    for _ in 0..8 {
        up = &up * &wb2;
        down = &down * &wb2inv;
        for cand in [&up, &down] {
            let (s, b) = (size(cand), size(&best));
            if s.abs() < b.abs() - 1e-9 || ((s.abs() - b.abs()).abs() <= 1e-9 && s > b) {
                best = cand.clone();
            }
        }
    }
    best
}

/// Candidate normalizations of the class VIII algebra: the tabulated symbol
/// first, then the triangle-group formula for each signature of the class,
/// with `a` and `b` each taken raw or square-class reduced.
pub fn class_viii_candidates() -> Vec<QuaternionAlgebra> {
    let class = takeuchi_table()
        .iter()
        .find(|c| c.id == "VIII")
        .expect("class VIII present");
    let mut out = vec![QuaternionAlgebra::new(
        QuadRat::from_int(-3),
        QuadRat::sqrt5(),
    )];
    for sig in class.signature_list() {
        let ab = takeuchi_ab(&sig, 64).expect("class VIII signature");
        if let (Some(a), Some(b)) = (ab.a_exact, ab.b_exact) {
            for a in [a.clone(), reduce_square_class(&a)] {
                for b in [b.clone(), reduce_square_class(&b)] {
                    let alg = QuaternionAlgebra::new(a.clone(), b);
                    if !out.contains(&alg) {
                        out.push(alg);
                    }
                }
            }
        }
    }
    out
}

/// The maximal order of the class VIII algebra: the printed basis together with
/// the first algebra normalization in which it is a maximal order.
pub fn order_basis() -> Result<OrderBasis, QuatError> {
    let basis = printed_order_basis();
    for (i, alg) in class_viii_candidates().into_iter().enumerate() {
        match check_order(&alg, &basis) {
            Ok(chk) if chk.passes() => {
                return Ok(OrderBasis {
                    algebra: alg,
                    basis,
                    calibrated: i > 0,
                });
            }
            _ => continue,
        }
    }
    Err(QuatError::CalibrationFailed)
}

impl OrderBasis {
    pub fn element(&self, c: &[QuadRat; 4]) -> QuatElem {
        from_order_coords(&self.basis, c)
    }

    pub fn element_from_ints(&self, c: [(i64, i64); 4]) -> QuatElem {
        self.element(&c.map(QuadRat::from))
    }

    pub fn coords(&self, x: &QuatElem) -> Result<[QuadRat; 4], QuatError> {
        order_coords(&self.basis, x)
    }

    pub fn contains(&self, x: &QuatElem) -> bool {
        self.coords(x)
            .map(|c| c.iter().all(QuadRat::is_integral))
            .unwrap_or(false)
    }

    pub fn matrix(&self, x: &QuatElem, prec: u32) -> Mat2 {
        embed_matrix(&self.algebra, x, prec)
    }
}

/// Reads off algebra coordinates from a real 2x2 matrix in the image of the
/// embedding (inverse of [`embed_matrix`], numerically).
pub fn matrix_coords(alg: &QuaternionAlgebra, m: &Mat2) -> [Float; 4] {
    let prec = m.prec();
    let a = alg.a.embed(Embedding::Identity, prec);
    let sb = alg.b.embed(Embedding::Identity, prec).sqrt();
    let re = |z: &Complex| z.real().clone();
    let (p, q, r, s) = (re(&m.a), re(&m.b), re(&m.c), re(&m.d));
    let qa = Float::with_val(prec, &q / &a);
    let x1 = Float::with_val(prec, &p + &s) / 2u32;
    let x3 = Float::with_val(prec, &p - &s) / 2u32 / &sb;
    let x2 = Float::with_val(prec, &qa + &r) / 2u32;
    let x4 = Float::with_val(prec, &r - &qa) / 2u32 / &sb;
    [x1, x2, x3, x4]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_alg() -> QuaternionAlgebra {
        QuaternionAlgebra::new(QuadRat::from_int(-3), QuadRat::sqrt5())
    }

    fn qe(s: &str) -> QuatElem {
        s.parse().unwrap()
    }

    #[test]
    fn mx_squared_is_a() {
        let alg = table_alg();
        let mx = qe("0,1,0,0");
        assert_eq!(quat_mul(&alg, &mx, &mx), qe("-3,0,0,0"));
    }

    #[test]
    fn anticommutation() {
        let alg = table_alg();
        let (mx, my) = (qe("0,1,0,0"), qe("0,0,1,0"));
        assert_eq!(quat_mul(&alg, &mx, &my), qe("0,0,0,1"));
        assert_eq!(quat_mul(&alg, &my, &mx), qe("0,0,0,-1"));
        let mz = qe("0,0,0,1");
        // Mz^2 = -ab
        assert_eq!(
            quat_mul(&alg, &mz, &mz),
            QuatElem([
                &QuadRat::from_int(3) * &QuadRat::sqrt5(),
                QuadRat::zero(),
                QuadRat::zero(),
                QuadRat::zero()
            ])
        );
    }

    #[test]
    fn trd_nrd_example() {
        let (t, n) = trd_nrd(&table_alg(), &qe("1,1,0,0"));
        assert_eq!(t, QuadRat::from_int(2));
        assert_eq!(n, QuadRat::from_int(4));
    }

    #[test]
    fn standard_gram_det() {
        let alg = table_alg();
        let std = [qe("1,0,0,0"), qe("0,1,0,0"), qe("0,0,1,0"), qe("0,0,0,1")];
        let (_, det) = gram_trace_det(&alg, &std);
        // -16 (ab)^2
        assert_eq!(det, QuadRat::from_int(-720));
    }

    #[test]
    fn nrd_is_multiplicative() {
        let alg = QuaternionAlgebra::new("w - 3".parse().unwrap(), "1 - w".parse().unwrap());
        let x = qe("1/2, w, -3 + w, 2");
        let y = qe("-w, 5/3, 1, 1 - 2*w");
        let xy = quat_mul(&alg, &x, &y);
        assert_eq!(alg.nrd(&xy), &alg.nrd(&x) * &alg.nrd(&y));
        assert_eq!(
            alg.trd(&quat_mul(&alg, &x, &alg.conj(&x))),
            &alg.nrd(&x) * &QuadRat::from_int(2)
        );
    }

    #[test]
    fn embedding_is_homomorphism() {
        let alg = QuaternionAlgebra::new("w - 3".parse().unwrap(), "1 - w".parse().unwrap());
        let x = qe("1/2, w, -3 + w, 2");
        let y = qe("-w, 5/3, 1, 1 - 2*w");
        let lhs = embed_matrix(&alg, &quat_mul(&alg, &x, &y), 128);
        let rhs = embed_matrix(&alg, &x, 128).mul(&embed_matrix(&alg, &y, 128));
        assert!(lhs.dist(&rhs) < 1e-30);
        let det = embed_matrix(&alg, &x, 128).det();
        let n = alg.nrd(&x).embed(Embedding::Identity, 128);
        assert!(crate::num::cabs(&(det - n)) < 1e-30);
        let back = matrix_coords(&alg, &embed_matrix(&alg, &x, 128));
        for (v, q) in back.iter().zip(&x.0) {
            assert!((v.clone() - q.embed(Embedding::Identity, 128)).abs() < 1e-30);
        }
    }

    #[test]
    fn table_symbol_does_not_carry_the_basis() {
        let chk = check_order(&table_alg(), &printed_order_basis()).unwrap();
        assert!(!chk.passes());
        assert_eq!(chk.gram_norm, 2025);
    }

    #[test]
    fn calibrated_order() {
        let ob = order_basis().unwrap();
        assert!(ob.calibrated);
        assert_eq!(ob.algebra.a, "w - 3".parse().unwrap());
        assert_eq!(ob.algebra.b, "1 - w".parse().unwrap());
        let (_, det) = gram_trace_det(&ob.algebra, &ob.basis);
        assert_eq!(det.norm().abs(), 25);
        let nrds: Vec<QuadRat> = ob.basis.iter().map(|g| ob.algebra.nrd(g)).collect();
        assert_eq!(
            nrds,
            vec![
                QuadRat::one(),
                QuadRat::w(),
                QuadRat::one(),
                "1 + w".parse().unwrap()
            ]
        );
    }

    #[test]
    fn square_class_reduction() {
        let wb = QuadRat::one() - QuadRat::w();
        assert_eq!(
            reduce_square_class(&(&QuadRat::from_int(5) * &wb.pow(5))),
            wb
        );
        // sqrt5 / wbar^2 is closer to 1 than sqrt5 itself
        assert_eq!(
            reduce_square_class(&(&wb.pow(2) * &QuadRat::sqrt5())),
            "-1 - 3*w".parse().unwrap()
        );
        assert_eq!(
            reduce_square_class(&QuadRat::from_int(-3)),
            "-3 - 3*w".parse().unwrap()
        );
    }

    #[test]
    fn coords_roundtrip() {
        let ob = order_basis().unwrap();
        let x = ob.element_from_ints([(-3, 2), (0, 2), (4, -2), (0, -2)]);
        let c = ob.coords(&x).unwrap();
        assert_eq!(
            c.map(|v| v.to_i64_pair().unwrap()),
            [(-3, 2), (0, 2), (4, -2), (0, -2)]
        );
        let sing = [qe("1,0,0,0"), qe("2,0,0,0"), qe("0,0,1,0"), qe("0,0,0,1")];
        assert_eq!(order_coords(&sing, &x), Err(QuatError::SingularBasis));
    }

    #[test]
    fn quatelem_text() {
        let x = qe("1/2, -w, 0, 6 - 2*w");
        assert_eq!(x.to_string(), "1/2, -w, 0, 6 - 2*w");
        assert!("1,2,3".parse::<QuatElem>().is_err());
    }
}

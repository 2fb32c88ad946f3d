//! Multiprecision helpers shared by the numeric modules.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

pub fn float(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn sqrt5(prec: u32) -> Float {
    Float::with_val(prec, 5).sqrt()
}

/// `w = (1 - sqrt 5)/2` under the identity embedding.
pub fn omega(prec: u32) -> Float {
    (Float::with_val(prec, 1) - sqrt5(prec)) / 2u32
}

/// `e^{i pi num/den}`.
pub fn expi_pi(prec: u32, num: i64, den: i64) -> Complex {
    let t = pi(prec) * Float::with_val(prec, num) / Float::with_val(prec, den);
    let (s, c) = t.sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

/// `2^(-bits)` as a float.
pub fn two_pow_neg(prec: u32, bits: i64) -> Float {
    Float::with_val(prec, 2).pow(-bits)
}

pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn c(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

/// Parses `"re,im"` (or a bare real) into a complex number.
pub fn parse_complex(s: &str, prec: u32) -> Option<Complex> {
    let mut parts = s.split(',').map(str::trim);
    let re = parts.next()?;
    let im = parts.next().unwrap_or("0");
    if parts.next().is_some() {
        return None;
    }
    let re = Float::parse(re).ok()?;
    let im = Float::parse(im).ok()?;
    Some(Complex::with_val(prec, (re, im)))
}

/// Decimal rendering with `digits` significant digits.
pub fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(digits))
}

pub fn fmt_complex(z: &Complex, digits: usize) -> String {
    format!(
        "{},{}",
        fmt_float(z.real(), digits),
        fmt_float(z.imag(), digits)
    )
}

/// Significant decimal digits carried by `prec` bits.
pub fn digits_for(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

/// Complex 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, PartialEq)]
pub struct Mat2 {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl Mat2 {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity(prec: u32) -> Self {
        let one = Complex::with_val(prec, 1);
        let zero = Complex::new(prec);
        Mat2::new(one.clone(), zero.clone(), zero, one)
    }

    pub fn diag(x: Complex, y: Complex) -> Self {
        let p = x.prec().0;
        Mat2::new(x, Complex::new(p), Complex::new(p), y)
    }

    pub fn prec(&self) -> u32 {
        self.a.prec().0
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let f = |z: &Complex| Complex::with_val(prec, z);
        Mat2::new(f(&self.a), f(&self.b), f(&self.c), f(&self.d))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let p = self.prec().max(o.prec());
        let e = |x: &Complex, y: &Complex, z: &Complex, w: &Complex| {
            Complex::with_val(p, x * y) + Complex::with_val(p, z * w)
        };
        Mat2::new(
            e(&self.a, &o.a, &self.b, &o.c),
            e(&self.a, &o.b, &self.b, &o.d),
            e(&self.c, &o.a, &self.d, &o.c),
            e(&self.c, &o.b, &self.d, &o.d),
        )
    }

    pub fn det(&self) -> Complex {
        let p = self.prec();
        Complex::with_val(p, &self.a * &self.d) - Complex::with_val(p, &self.b * &self.c)
    }

    pub fn trace(&self) -> Complex {
        Complex::with_val(self.prec(), &self.a + &self.d)
    }

    /// Inverse, or `None` for a numerically singular matrix.
    pub fn inv(&self) -> Option<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let p = self.prec();
        let f = |z: &Complex| Complex::with_val(p, z / &det);
        Some(Mat2::new(f(&self.d), -f(&self.b), -f(&self.c), f(&self.a)))
    }

    pub fn scale(&self, s: &Complex) -> Mat2 {
        let p = self.prec();
        let f = |z: &Complex| Complex::with_val(p, z * s);
        Mat2::new(f(&self.a), f(&self.b), f(&self.c), f(&self.d))
    }

    pub fn neg(&self) -> Mat2 {
        Mat2::new(
            -self.a.clone(),
            -self.b.clone(),
            -self.c.clone(),
            -self.d.clone(),
        )
    }

    pub fn pow(&self, n: u32) -> Mat2 {
        let mut acc = Mat2::identity(self.prec());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `m / sqrt(det m)`, determinant one up to rounding.
    pub fn normalized(&self) -> Mat2 {
        let s = Complex::with_val(self.prec(), self.det().sqrt());
        let p = self.prec();
        let f = |z: &Complex| Complex::with_val(p, z / &s);
        Mat2::new(f(&self.a), f(&self.b), f(&self.c), f(&self.d))
    }

    pub fn entries(&self) -> [&Complex; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn max_abs(&self) -> Float {
        self.entries()
            .iter()
            .map(|z| cabs(z))
            .fold(Float::new(self.prec()), |m, x| m.max(&x))
    }

    /// Largest entrywise distance.
    pub fn dist(&self, o: &Mat2) -> Float {
        let p = self.prec();
        self.entries()
            .iter()
            .zip(o.entries())
            .map(|(x, y)| cabs(&Complex::with_val(p, *x - y)))
            .fold(Float::new(p), |m, x| m.max(&x))
    }

    /// Distance between the images in PGL2: both sides are normalized to
    /// determinant one and compared up to sign.
    pub fn projective_dist(&self, o: &Mat2) -> Float {
        let x = self.normalized();
        let y = o.normalized();
        let d1 = x.dist(&y);
        let d2 = x.dist(&y.neg());
        d1.min(&d2)
    }

    /// `true` when the matrix is a scalar multiple of the identity within `tol`
    /// relative to its size.
    pub fn is_scalar(&self, tol: &Float) -> bool {
        let p = self.prec();
        let scale = self.max_abs();
        let off = cabs(&self.b).max(&cabs(&self.c));
        let diag = cabs(&Complex::with_val(p, &self.a - &self.d));
        off.max(&diag) <= Float::with_val(p, tol * &scale)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            fmt_complex(&self.a, 12),
            fmt_complex(&self.b, 12),
            fmt_complex(&self.c, 12),
            fmt_complex(&self.d, 12)
        )
    }
}

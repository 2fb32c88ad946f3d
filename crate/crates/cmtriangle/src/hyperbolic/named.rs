//! The named matrices of the (3,3,5) picture, from their closed forms.

use rug::{Complex, Float};

use super::{transport, Direction, HyperbolicError};
use crate::num::{expi_pi, omega, Mat2};

pub const BUILTIN_NAMES: [&str; 17] = [
    "g34", "h34", "h45", "hn45", "h312", "hn312", "hn412", "hbeta", "hvck", "mmc", "mmr", "mhd",
    "th34", "thn45", "thn412", "rotvc", "rotvcp",
];

/// Shared radicals at working precision.
struct Radicals {
    p: u32,
    s5: Float,
    /// sqrt(50 - 10 sqrt5)
    big_a: Float,
    /// sqrt(10 - 2 sqrt5)
    big_b: Float,
    /// -3 + sqrt5
    d: Complex,
}

impl Radicals {
    fn new(p: u32) -> Self {
        let s5 = Float::with_val(p, 5).sqrt();
        let big_a = (Float::with_val(p, 50) - Float::with_val(p, &s5 * 10u32)).sqrt();
        let big_b = (Float::with_val(p, 10) - Float::with_val(p, &s5 * 2u32)).sqrt();
        let d = Complex::with_val(p, Float::with_val(p, &s5 - 3u32));
        Radicals {
            p,
            s5,
            big_a,
            big_b,
            d,
        }
    }

    fn c(&self, re: Float, im: Float) -> Complex {
        Complex::with_val(self.p, (re, im))
    }

    fn int(&self, n: i64) -> Float {
        Float::with_val(self.p, n)
    }

    /// `x + y sqrt5`
    fn lin5(&self, x: i64, y: i64) -> Float {
        Float::with_val(self.p, &self.s5 * y) + x
    }

    fn i(&self) -> Complex {
        Complex::with_val(self.p, (0, 1))
    }
}

fn ei(p: u32, num: i64, den: i64) -> Complex {
    expi_pi(p, num, den)
}

fn g34(p: u32) -> Mat2 {
    Mat2::diag(ei(p, 1, 10), ei(p, -1, 10))
}

fn h34(p: u32) -> Mat2 {
    Mat2::diag(ei(p, 1, 5), ei(p, -1, 5))
}

/// The circuit matrix around `u = infinity` exactly as printed.  Its
/// determinant is `e^{-3 pi i/5}`, not a root of unity times one, and it is not
/// of order 5; see [`hn45`] for the matrix actually used.
fn h45_printed(p: u32) -> Mat2 {
    let r = Radicals::new(p);
    let (a, b) = (&r.big_a, &r.big_b);
    let four_d = Complex::with_val(p, &r.d * 4u32);
    let two_d = Complex::with_val(p, &r.d * 2u32);
    let m11 = r.c(r.lin5(-6, 6), Float::with_val(p, a + b)) / &four_d;
    let m12 = Complex::with_val(p, 2) / &r.d;
    // -i(-4i + A + 3B) = -4 - i(A + 3B)
    let m21 = r.c(
        r.int(-4),
        -Float::with_val(p, a + Float::with_val(p, b * 3u32)),
    ) / &four_d;
    let m22 = r.c(r.lin5(-7, 1), -b.clone()) / &two_d;
    Mat2::new(m11, m12, m21, m22)
}

/// Normalized circuit matrix around `u = infinity`, from the closed form of the
/// displayed `hn45` block (entries in fifth roots of -1).
fn hn45(p: u32) -> Mat2 {
    let r = Radicals::new(p);
    let tw = |k: i64| ei(p, k, 5);
    let one = Complex::with_val(p, 1);
    let s5 = Complex::with_val(p, &r.s5);
    let m11 = tw(4) * (one.clone() + tw(2) * 2u32 - &s5) / &r.d;
    let m12 = -(one.clone() + tw(3)) * Complex::with_val(p, &s5 - 1u32) / &r.d;
    let m21 = (tw(2) - 1u32) * 2u32 / &r.d;
    let m22 = tw(1) * (tw(3) * 2u32 - 1u32 + &s5) / &r.d;
    Mat2::new(m11, m12, m21, m22)
}

fn h312(p: u32) -> Mat2 {
    let r = Radicals::new(p);
    let (a, b) = (&r.big_a, &r.big_b);
    let two_d2 = Complex::with_val(p, r.d.square_ref()) * 2u32;
    let m11 = r.c(r.lin5(-2, 2), Float::with_val(p, b * 3u32) - a) / &two_d2;
    let m12 = r.c(
        r.lin5(20, -8),
        Float::with_val(p, b * 7u32) - Float::with_val(p, a * 3u32),
    ) / &two_d2;
    let m21 = r.c(r.int(0), b.clone()) / &r.d;
    let m22 = r.c(r.lin5(8, -4), Float::with_val(p, b - a)) / &two_d2;
    Mat2::new(m11, m12, m21, m22)
}

fn hn312(p: u32) -> Mat2 {
    h312(p).scale(&ei(p, -4, 5))
}

/// Closed form of `g34 hn312 g34^-1`.
fn hn412(p: u32) -> Mat2 {
    let r = Radicals::new(p);
    let (a, b) = (&r.big_a, &r.big_b);
    let d2 = Complex::with_val(p, r.d.square_ref());
    let two_d2 = Complex::with_val(p, &d2 * 2u32);
    let m11 = r.c(r.lin5(8, -4), Float::with_val(p, b - a)) / &two_d2;
    // -2 i B (-2 + sqrt5) / d^2
    let m12 = r.c(r.int(0), -Float::with_val(p, b * 2u32) * r.lin5(-2, 1)) / &d2;
    let m21 = r.c(r.int(0), -b.clone()) / &r.d;
    let m22 = r.c(r.lin5(8, -4), Float::with_val(p, a - b)) / &two_d2;
    Mat2::new(m11, m12, m21, m22)
}

fn hbeta(p: u32) -> Mat2 {
    let w = Complex::with_val(p, omega(p));
    let wb = Complex::with_val(p, 1) - &w;
    let s = Complex::with_val(p, (0, 1)) * wb;
    Mat2::new(-s.clone(), Complex::with_val(p, &s * &w), s.clone(), s)
}

fn hvck(p: u32) -> Mat2 {
    let wb = Complex::with_val(p, 1) - omega(p);
    let rho = ei(p, 2, 5);
    let rho_inv = ei(p, -2, 5);
    Mat2::new(
        Complex::with_val(p, &wb * &rho),
        Complex::with_val(p, 1),
        wb.clone(),
        Complex::with_val(p, &wb * &rho_inv),
    )
}

fn conj_by(g: &Mat2, m: &Mat2) -> Mat2 {
    g.mul(m).mul(&g.inv().expect("invertible"))
}

fn rotvc(p: u32) -> Mat2 {
    conj_by(&h34(p), &hvck(p))
}

fn rotvcp(p: u32) -> Mat2 {
    conj_by(&g34(p), &rotvc(p))
}

fn mmc(p: u32) -> Mat2 {
    let s5 = Float::with_val(p, 5).sqrt();
    let wb = Float::with_val(p, 1) - omega(p);
    let x = (s5 * wb).sqrt();
    Mat2::diag(Complex::with_val(p, x), Complex::with_val(p, 1))
}

fn mmr(p: u32) -> Mat2 {
    let r = (-omega(p)).sqrt();
    let i = Complex::with_val(p, (0, 1));
    Mat2::new(
        i.clone(),
        Complex::with_val(p, &i * &r),
        Complex::with_val(p, -1),
        Complex::with_val(p, r),
    )
}

/// The disc-to-half-plane map.
pub(crate) fn mhd(p: u32) -> Mat2 {
    mmc(p).mul(&mmr(p))
}

/// Closed form of the transported `hn412`, in the two-block layout.
fn thn412_printed(p: u32) -> Mat2 {
    let r = Radicals::new(p);
    let s5 = &r.s5;
    let sq = |x: Float| -> Float { x.sqrt() };
    let q = Float::with_val(p, s5.sqrt_ref());
    let q3 = Float::with_val(p, &q * &q) * &q;
    let d2 = Complex::with_val(p, r.d.square_ref());
    let lin = |x: i64, y: i64| r.lin5(x, y);
    let i = r.i();

    let re11 = lin(8, -4);
    let im11 = Float::with_val(p, &q * 8u32) - Float::with_val(p, &q3 * 4u32)
        + sq(lin(-10, 6)) * 3u32
        - sq(lin(-50, 30));
    let e11 = r.c(re11, im11) / (d2.clone() * 2u32);

    let num21 = -sq(lin(50, -20)) + sq(lin(25, -5)) * 2u32 + sq(lin(10, -4)) * 3u32
        - sq(lin(5, -1)) * 4u32
        - sq(lin(-5, 3))
        + sq(Float::with_val(p, lin(-5, 3) * 5u32));
    let den21 = d2.clone() * Float::with_val(p, 2).sqrt() * &q;
    let e21 = Complex::with_val(p, num21) / den21;

    let num12 = Float::with_val(p, &q * -8i32) + Float::with_val(p, &q3 * 4u32) - sq(lin(50, -10))
        + sq(lin(10, -2))
        + sq(lin(-10, 6)) * 3u32
        - sq(lin(-50, 30));
    let den12 = d2.clone() * sq(Float::with_val(p, lin(-1, 1) * 2u32));
    let e12 = Complex::with_val(p, num12 * &q) / den12;

    let inner = Complex::with_val(p, sq(lin(5, -1))) + Complex::with_val(p, &i * sq(lin(-1, 1)));
    let part = Complex::with_val(p, sq(lin(50, -20))) + inner * lin(-2, 1) * 2u32;
    let num22 =
        Complex::with_val(p, &i * sq(lin(10, -4))) * -3i32 + Complex::with_val(p, &i * &part);
    let e22 = num22 / (d2 * sq(lin(-1, 1)));
    Mat2::new(e11, e12, e21, e22)
}

/// The transported `h34` exactly as printed.  It is conjugate to
/// `transport(h34)` by a diagonal matrix, i.e. it belongs to a differently
/// scaled half-plane model.
fn th34_printed(p: u32) -> Mat2 {
    let s5 = Float::with_val(p, 5).sqrt();
    let s = (Float::with_val(p, &s5 + 1u32) / 2u32).sqrt();
    let diag = Complex::with_val(p, Float::with_val(p, &s5 + 1u32) / 4u32);
    let off_12 = Float::with_val(p, &s * 5u32) / 4u32 - Float::with_val(p, &s5 * &s) / 4u32;
    let off_21 = Float::with_val(p, &s / 4u32) - Float::with_val(p, &s5 * &s) / 4u32;
    Mat2::new(
        diag.clone(),
        Complex::with_val(p, off_12),
        Complex::with_val(p, off_21),
        diag,
    )
}

/// Named matrix at `prec` bits.
pub fn builtin_matrix(name: &str, prec: u32) -> Result<Mat2, HyperbolicError> {
    let p = prec + 32;
    let m = match name {
        "g34" => g34(p),
        "h34" => h34(p),
        "h45" => h45_printed(p),
        "hn45" => hn45(p),
        "h312" => h312(p),
        "hn312" => hn312(p),
        "hn412" => hn412(p),
        "hbeta" => hbeta(p),
        "hvck" => hvck(p),
        "mmc" => mmc(p),
        "mmr" => mmr(p),
        "mhd" => mhd(p),
        "th34" => transport(&h34(p), Direction::DiscToHalfPlane),
        "thn45" => transport(&hn45(p), Direction::DiscToHalfPlane),
        "thn412" => thn412_printed(p),
        "rotvc" => rotvc(p),
        "rotvcp" => rotvcp(p),
        _ => return Err(HyperbolicError::UnknownName(name.to_string())),
    };
    Ok(m.with_prec(prec))
}

/// Printed closed forms kept for cross-checks against the builtin matrices.
pub fn printed_matrix(name: &str, prec: u32) -> Result<Mat2, HyperbolicError> {
    let p = prec + 32;
    let m = match name {
        "h45" => h45_printed(p),
        "th34" => th34_printed(p),
        "thn412" => thn412_printed(p),
        "hn412" => hn412(p),
        _ => return Err(HyperbolicError::UnknownName(name.to_string())),
    };
    Ok(m.with_prec(prec))
}

//! Genus-4 theta constants on the period disc, the modular function `lambda`
//! and the derived functions `Phi`, `phi`, `phi~`.

mod enumerate;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use thiserror::Error;

use crate::num::{cabs, omega, pi, two_pow_neg};

pub use enumerate::Ellipsoid;

/// Extra working bits carried through the lattice sum.
const GUARD: u32 = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("point lies outside the period disc")]
    DomainViolation,
    #[error("leading factor of the period matrix vanishes")]
    DegenerateDenominator,
    #[error("imaginary part of the period matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("truncation radius {required} exceeds the configured maximum {max}")]
    TruncationBudgetExceeded { required: u32, max: u32 },
    #[error("both theta constants vanish")]
    Indeterminate,
    #[error("lambda is at a pole of Phi")]
    PoleAtLambda,
}

/// Working precision and truncation limits for theta evaluation.
#[derive(Debug, Clone)]
pub struct ThetaContext {
    pub prec: u32,
    pub max_radius: u32,
    /// Multiplies the truncation radius; values above 1 only add terms.
    pub radius_factor: f64,
    pub parallel: bool,
}

impl ThetaContext {
    pub fn new(prec: u32) -> Self {
        ThetaContext {
            prec,
            max_radius: 64,
            radius_factor: 1.0,
            parallel: false,
        }
    }

    fn work_prec(&self) -> u32 {
        self.prec + GUARD
    }

    /// Threshold below which a value is treated as zero: `2^(-prec/2)`.
    pub fn tolerance(&self) -> Float {
        two_pow_neg(self.prec, (self.prec / 2) as i64)
    }
}

/// A symmetric 4x4 complex matrix with positive definite imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    pub m: [[Complex; 4]; 4],
}

impl SiegelPoint {
    pub fn new(m: [[Complex; 4]; 4]) -> Result<Self, ThetaError> {
        let s = SiegelPoint { m };
        if enumerate::cholesky(&s.imag_f64()).is_none() {
            return Err(ThetaError::NotPositiveDefinite);
        }
        Ok(s)
    }

    /// `i` times the identity.
    pub fn i_identity(prec: u32) -> Self {
        let m = std::array::from_fn(|i| {
            std::array::from_fn(|j| Complex::with_val(prec, (0, (i == j) as i32)))
        });
        SiegelPoint { m }
    }

    pub fn prec(&self) -> u32 {
        self.m[0][0].prec().0
    }

    pub fn imag_f64(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].imag().to_f64()))
    }

    pub fn is_symmetric(&self, tol: &Float) -> bool {
        (0..4).all(|i| {
            (0..i).all(|j| {
                cabs(&Complex::with_val(
                    self.prec(),
                    &self.m[i][j] - &self.m[j][i],
                )) < *tol
            })
        })
    }

    /// Leading principal minors of `Im(Omega)`, in f64.
    pub fn imag_minors(&self) -> [f64; 4] {
        let y = self.imag_f64();
        std::array::from_fn(|k| enumerate::det_leading(&y, k + 1))
    }
}

/// Rational characteristic `[a; b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaCharacteristic {
    pub a: [Rational; 4],
    pub b: [Rational; 4],
}

impl ThetaCharacteristic {
    pub fn new(a: [Rational; 4], b: [Rational; 4]) -> Self {
        ThetaCharacteristic { a, b }
    }

    pub fn zero() -> Self {
        let z = || std::array::from_fn(|_| Rational::new());
        ThetaCharacteristic { a: z(), b: z() }
    }

    fn tenths(a: [i32; 4], b: [i32; 4]) -> Self {
        let f = |v: [i32; 4]| v.map(|k| Rational::from((k, 10)));
        ThetaCharacteristic { a: f(a), b: f(b) }
    }

    /// The characteristic of `theta_11`.
    pub fn a11() -> Self {
        Self::tenths([1, 1, 1, 1], [-2, -2, -1, -1])
    }

    /// The characteristic of `theta_19`.
    pub fn a19() -> Self {
        Self::tenths([1, 9, 1, 9], [-2, -8, -1, -9])
    }

    /// Splits into integer shifts `(m, n)` and a reduced characteristic with
    /// entries in `[0, 1)`.
    pub fn reduce(&self) -> (ThetaCharacteristic, [Rational; 4], [Rational; 4]) {
        let split = |v: &[Rational; 4]| {
            let ints: [Rational; 4] = std::array::from_fn(|i| Rational::from(v[i].floor_ref()));
            let fr: [Rational; 4] = std::array::from_fn(|i| Rational::from(&v[i] - &ints[i]));
            (fr, ints)
        };
        let (a, m) = split(&self.a);
        let (b, n) = split(&self.b);
        (ThetaCharacteristic { a, b }, m, n)
    }

    pub fn shifted(&self, m: &[i64; 4], n: &[i64; 4]) -> Self {
        ThetaCharacteristic {
            a: std::array::from_fn(|i| Rational::from(&self.a[i] + m[i])),
            b: std::array::from_fn(|i| Rational::from(&self.b[i] + n[i])),
        }
    }
}

/// Outcome of a lattice summation.
#[derive(Debug, Clone)]
pub struct ThetaSum {
    pub value: Complex,
    /// Largest `|n_i|` the truncation ellipsoid can reach.
    pub radius: u32,
    pub terms: usize,
}

/// The period matrix `Omega(u)` at `eta_2 = u`, `eta_3 = 1`.
pub fn omega_of(u: &Complex, prec: u32) -> Result<SiegelPoint, ThetaError> {
    let p = prec + GUARD;
    let u = Complex::with_val(p, u);
    let r2 = Float::with_val(p, u.abs_ref()).square();
    if r2 >= -omega(p) {
        return Err(ThetaError::DomainViolation);
    }
    let e = |k: i64| crate::num::expi_pi(p, k, 5);
    let one = Complex::with_val(p, 1);
    let u2 = Complex::with_val(p, u.square_ref());
    let zeta = e(2);

    let den = u2.clone() - Complex::with_val(p, &one + &zeta) * e(-4);
    if cabs(&den) < two_pow_neg(p, (prec / 2) as i64) {
        return Err(ThetaError::DegenerateDenominator);
    }

    let o11 = (e(-4) - 1u32) * Complex::with_val(p, &u2 + 1u32);
    let o12 = (one.clone() - e(4)) * &u;
    let o22 = (e(4) - 1u32) * (u2.clone() - e(-4));
    let o13 = e(-4) * (Complex::with_val(p, &one + &zeta) * &u2 + 1u32);
    let o14 = (e(-4) - &zeta) * &u;
    let o23 = (one.clone() - e(-4)) * &u;
    let o24 = Complex::with_val(p, &zeta + e(4)) * (u2.clone() - e(-4) * (e(4) + 1u32));
    let o33 = -e(4) * (u2.clone() - Complex::with_val(p, &one + &zeta));
    let o34 = (e(-2) - &zeta) * &u;
    let o44 = -e(-4) * (u2 - (e(-2) + 1u32));

    let rows = [
        [o11, o12.clone(), o13.clone(), o14.clone()],
        [o12, o22, o23.clone(), o24.clone()],
        [o13, o23, o33, o34.clone()],
        [o14, o24, o34, o44],
    ];
    let m = rows.map(|r| r.map(|x| x / &den));
    SiegelPoint::new(m)
}

/// `theta[a; b](Omega)`.
pub fn theta_const(
    ch: &ThetaCharacteristic,
    om: &SiegelPoint,
    ctx: &ThetaContext,
) -> Result<Complex, ThetaError> {
    Ok(theta_sum(ch, om, ctx)?.value)
}

/// `theta[a; b](Omega)` together with truncation data.
pub fn theta_sum(
    ch: &ThetaCharacteristic,
    om: &SiegelPoint,
    ctx: &ThetaContext,
) -> Result<ThetaSum, ThetaError> {
    let wp = ctx.work_prec();
    let (red, _m, n) = ch.reduce();
    let mut sum = reduced_sum(&red, om, ctx)?;
    // theta[a + m; b + n] = e^{2 pi i a.n} theta[a; b] with a reduced
    let mut phase = Float::with_val(wp, 0);
    for i in 0..4 {
        phase += Float::with_val(wp, Rational::from(&red.a[i] * &n[i]));
    }
    if !phase.is_zero() {
        let arg = phase * pi(wp) * 2u32;
        let (s, c) = arg.sin_cos(Float::new(wp));
        sum.value *= Complex::with_val(wp, (c, s));
    }
    sum.value = Complex::with_val(ctx.prec, &sum.value);
    Ok(sum)
}

fn reduced_sum(
    ch: &ThetaCharacteristic,
    om: &SiegelPoint,
    ctx: &ThetaContext,
) -> Result<ThetaSum, ThetaError> {
    let wp = ctx.work_prec();
    let a_f: [f64; 4] = std::array::from_fn(|i| ch.a[i].to_f64());
    let ell = Ellipsoid::new(&om.imag_f64(), wp, ctx.radius_factor)
        .ok_or(ThetaError::NotPositiveDefinite)?;
    let radius = ell.radius(&a_f);
    if radius > ctx.max_radius {
        return Err(ThetaError::TruncationBudgetExceeded {
            required: radius,
            max: ctx.max_radius,
        });
    }
    let lines = ell.lines(&a_f);

    let om_w: [[Complex; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| Complex::with_val(wp, &om.m[i][j])));
    let a: [Float; 4] = std::array::from_fn(|i| Float::with_val(wp, &ch.a[i]));
    let b: [Float; 4] = std::array::from_fn(|i| Float::with_val(wp, &ch.b[i]));
    let pi_w = pi(wp);
    let two_pi_i = Complex::with_val(wp, (0, Float::with_val(wp, &pi_w * 2u32)));
    let pi_i = Complex::with_val(wp, (0, pi_w.clone()));
    // step ratio multiplier e^{2 pi i Omega_00}
    let q = Complex::with_val(wp, &two_pi_i * &om_w[0][0]).exp();

    let line_sum = |ln: &enumerate::Line| -> Complex {
        let x: [Float; 4] = std::array::from_fn(|i| {
            let n = if i == 0 { ln.lo } else { ln.n[i] };
            Float::with_val(wp, &a[i] + n)
        });
        let mut ox: [Complex; 4] = std::array::from_fn(|_| Complex::new(wp));
        for i in 0..4 {
            for j in 0..4 {
                ox[i] += Complex::with_val(wp, &om_w[i][j] * &x[j]);
            }
        }
        let mut quad = Complex::new(wp);
        let mut lin = Float::new(wp);
        for i in 0..4 {
            quad += Complex::with_val(wp, &ox[i] * &x[i]);
            lin += Float::with_val(wp, &x[i] * &b[i]);
        }
        let mut t =
            (Complex::with_val(wp, &pi_i * &quad) + Complex::with_val(wp, &two_pi_i * &lin)).exp();
        let step = Complex::with_val(wp, &ox[0] * 2u32) + &om_w[0][0];
        let mut r =
            (Complex::with_val(wp, &pi_i * &step) + Complex::with_val(wp, &two_pi_i * &b[0])).exp();
        let mut acc = Complex::new(wp);
        for k in ln.lo..=ln.hi {
            acc += &t;
            if k < ln.hi {
                t *= &r;
                r *= &q;
            }
        }
        acc
    };

    let parts: Vec<Complex> = if ctx.parallel {
        lines.par_iter().map(line_sum).collect()
    } else {
        lines.iter().map(line_sum).collect()
    };
    let mut value = Complex::new(wp);
    for p in &parts {
        value += p;
    }
    let terms = lines.iter().map(|l| (l.hi - l.lo + 1) as usize).sum();
    Ok(ThetaSum {
        value,
        radius,
        terms,
    })
}

/// `theta_11(u)` and `theta_19(u)`.
pub fn theta_pair(u: &Complex, ctx: &ThetaContext) -> Result<(Complex, Complex), ThetaError> {
    let om = omega_of(u, ctx.prec)?;
    let t11 = theta_const(&ThetaCharacteristic::a11(), &om, ctx)?;
    let t19 = theta_const(&ThetaCharacteristic::a19(), &om, ctx)?;
    Ok((t11, t19))
}

/// A value of `lambda`, which may be the point at infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaValue {
    Finite(Complex),
    Infinity,
}

impl LambdaValue {
    pub fn finite(&self) -> Option<&Complex> {
        match self {
            LambdaValue::Finite(z) => Some(z),
            LambdaValue::Infinity => None,
        }
    }
}

/// `lambda(u)` together with `1/lambda(u)`, both computed from the theta ratio.
#[derive(Debug, Clone)]
pub struct LambdaEval {
    pub value: LambdaValue,
    pub recip: Complex,
}

/// `lambda(u) = (theta_11/theta_19)^5`; infinite when `|1/lambda|` is below
/// the tolerance.
pub fn lambda_of(u: &Complex, ctx: &ThetaContext) -> Result<LambdaValue, ThetaError> {
    Ok(lambda_eval(u, ctx)?.value)
}

pub fn lambda_eval(u: &Complex, ctx: &ThetaContext) -> Result<LambdaEval, ThetaError> {
    let (t11, t19) = theta_pair(u, ctx)?;
    let tol = ctx.tolerance();
    if cabs(&t11) < tol && cabs(&t19) < tol {
        return Err(ThetaError::Indeterminate);
    }
    let p = ctx.prec;
    if cabs(&t11) >= cabs(&t19) {
        let recip = Complex::with_val(p, &t19 / &t11).pow(5u32);
        let value = if cabs(&recip) < tol {
            LambdaValue::Infinity
        } else {
            LambdaValue::Finite(Complex::with_val(p, 1) / &recip)
        };
        Ok(LambdaEval { value, recip })
    } else {
        let lam = Complex::with_val(p, &t11 / &t19).pow(5u32);
        let recip = Complex::with_val(p, 1) / &lam;
        Ok(LambdaEval {
            value: LambdaValue::Finite(lam),
            recip,
        })
    }
}

/// `Phi = (lambda^3 - 3 lambda + 1) / (3 lambda (lambda - 1))`.
pub fn big_phi(lam: &LambdaValue, tol: &Float) -> Result<Complex, ThetaError> {
    let lam = lam.finite().ok_or(ThetaError::PoleAtLambda)?;
    let p = lam.prec().0;
    let lm1 = Complex::with_val(p, lam - 1u32);
    if cabs(lam) < *tol || cabs(&lm1) < *tol {
        return Err(ThetaError::PoleAtLambda);
    }
    let l3 = Complex::with_val(p, lam.square_ref()) * lam;
    let num = l3 - Complex::with_val(p, lam * 3u32) + 1u32;
    let den = Complex::with_val(p, lam * &lm1) * 3u32;
    Ok(num / den)
}

/// Singular-value data at one point.
#[derive(Debug, Clone)]
pub struct PhiValues {
    pub lambda: Complex,
    pub big_phi: Complex,
    /// `phi = (2 / sqrt(-3)) (Phi - 1/2)`, `sqrt(-3) = i sqrt 3`.
    pub phi: Complex,
    /// `phi~ = Phi - 1/2`.
    pub phi_tilde: Complex,
}

pub fn phi_values(u: &Complex, ctx: &ThetaContext) -> Result<PhiValues, ThetaError> {
    let lam = lambda_of(u, ctx)?;
    let bp = big_phi(&lam, &ctx.tolerance())?;
    let lambda = lam.finite().cloned().expect("finite");
    Ok(phi_from_big_phi(lambda, bp))
}

pub(crate) fn phi_from_big_phi(lambda: Complex, big_phi: Complex) -> PhiValues {
    let p = big_phi.prec().0;
    let phi_tilde = Complex::with_val(p, &big_phi - Float::with_val(p, 0.5));
    let sqrt_m3 = Complex::with_val(p, (0, Float::with_val(p, 3).sqrt()));
    let phi = Complex::with_val(p, &phi_tilde * 2u32) / sqrt_m3;
    PhiValues {
        lambda,
        big_phi,
        phi,
        phi_tilde,
    }
}

pub fn phi_of(u: &Complex, ctx: &ThetaContext) -> Result<Complex, ThetaError> {
    Ok(phi_values(u, ctx)?.phi)
}

pub fn phi_tilde_of(u: &Complex, ctx: &ThetaContext) -> Result<Complex, ThetaError> {
    Ok(phi_values(u, ctx)?.phi_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{c, expi_pi};

    fn one_dim(prec: u32) -> Float {
        // sum_{n in Z} e^{-pi n^2}
        let p = pi(prec);
        let mut s = Float::with_val(prec, 1);
        for n in 1..40u32 {
            let t = Float::with_val(prec, -Float::with_val(prec, &p * (n * n))).exp();
            s += t * 2u32;
        }
        s
    }

    #[test]
    fn zero_char_at_i_identity() {
        let ctx = ThetaContext::new(256);
        let om = SiegelPoint::i_identity(256);
        let th = theta_const(&ThetaCharacteristic::zero(), &om, &ctx).unwrap();
        let want = Float::with_val(256, one_dim(256).square_ref()).square();
        let rel = cabs(&(th - &want)) / want;
        assert!(rel < 1e-30);
    }

    #[test]
    fn omega_at_zero_has_no_cross_terms() {
        let om = omega_of(&c(128, 0.0, 0.0), 128).unwrap();
        for (i, j) in [(0, 1), (0, 3), (1, 2), (2, 3)] {
            assert!(om.m[i][j].is_zero(), "({i},{j})");
        }
    }

    #[test]
    fn omega_is_symmetric_and_positive() {
        let om = omega_of(&c(128, -0.2, -0.07), 128).unwrap();
        assert!(om.is_symmetric(&two_pow_neg(128, 64)));
        assert!(om.imag_minors().iter().all(|&m| m > 0.0));
    }

    #[test]
    fn outside_disc_rejected() {
        assert_eq!(
            omega_of(&c(128, 0.8, 0.0), 128),
            Err(ThetaError::DomainViolation)
        );
    }

    #[test]
    fn characteristic_shift_law() {
        let ctx = ThetaContext::new(128);
        let om = omega_of(&c(128, 0.1, 0.2), 128).unwrap();
        let ch = ThetaCharacteristic::a19();
        let base = theta_const(&ch, &om, &ctx).unwrap();
        let shifted = theta_const(&ch.shifted(&[1, -2, 0, 3], &[2, 0, -1, 1]), &om, &ctx).unwrap();
        // e^{2 pi i a.n} with a = (1,9,1,9)/10, n = (2,0,-1,1)
        let phase = expi_pi(128, 2 * (2 - 1 + 9), 10);
        assert!(cabs(&(shifted - base * phase)) < 1e-30);
    }

    #[test]
    fn lambda_special_values() {
        let ctx = ThetaContext::new(128);
        let l0 = lambda_of(&c(128, 0.0, 0.0), &ctx).unwrap();
        assert!(cabs(&(l0.finite().unwrap().clone() - 1u32)) < 1e-20);
        let w = Complex::with_val(128, omega(128));
        let lw = lambda_eval(&w, &ctx).unwrap();
        assert_eq!(lw.value, LambdaValue::Infinity);
        assert!(cabs(&lw.recip) < 1e-20);
    }

    #[test]
    fn lambda_vanishes_at_rotated_vertex() {
        let ctx = ThetaContext::new(128);
        let u = Complex::with_val(128, expi_pi(128, -1, 5) * omega(128));
        let l = lambda_of(&u, &ctx).unwrap();
        assert!(cabs(l.finite().unwrap()) < 1e-20);
    }

    #[test]
    fn parallel_matches_serial() {
        let mut ctx = ThetaContext::new(128);
        let om = omega_of(&c(128, -0.3, 0.1), 128).unwrap();
        let s = theta_const(&ThetaCharacteristic::a11(), &om, &ctx).unwrap();
        ctx.parallel = true;
        let p = theta_const(&ThetaCharacteristic::a11(), &om, &ctx).unwrap();
        assert!(cabs(&(s - p)) < 1e-35);
    }

    #[test]
    fn radius_budget() {
        let mut ctx = ThetaContext::new(128);
        ctx.max_radius = 1;
        let om = SiegelPoint::i_identity(128);
        assert!(matches!(
            theta_const(&ThetaCharacteristic::zero(), &om, &ctx),
            Err(ThetaError::TruncationBudgetExceeded { max: 1, .. })
        ));
    }

    #[test]
    fn big_phi_values() {
        let tol = two_pow_neg(128, 64);
        let two = LambdaValue::Finite(c(128, 2.0, 0.0));
        assert!(cabs(&(big_phi(&two, &tol).unwrap() - Float::with_val(128, 0.5))) < 1e-35);
        let e = expi_pi(128, 1, 3);
        let v = big_phi(&LambdaValue::Finite(e.clone()), &tol).unwrap();
        assert!(cabs(&(v - e)) < 1e-35);
        assert_eq!(
            big_phi(&LambdaValue::Finite(c(128, 1.0, 0.0)), &tol),
            Err(ThetaError::PoleAtLambda)
        );
        assert_eq!(
            big_phi(&LambdaValue::Infinity, &tol),
            Err(ThetaError::PoleAtLambda)
        );
    }
}

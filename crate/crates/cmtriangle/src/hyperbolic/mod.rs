//! Möbius geometry on the period disc `|u|^2 < -w` and on the upper half plane.

mod named;

pub use named::{builtin_matrix, printed_matrix, BUILTIN_NAMES};

use rug::{Complex, Float, Rational};
use thiserror::Error;

use crate::num::{cabs, omega, two_pow_neg, Mat2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HyperbolicError {
    #[error("point is mapped to infinity")]
    PoleHit,
    #[error("unknown matrix name: {0}")]
    UnknownName(String),
    #[error("scalar matrix has no isolated fixed points")]
    ScalarMatrix,
    #[error("exponent differences do not satisfy the triangle condition")]
    ConditionStarViolated,
    #[error("matrix is not elliptic")]
    NotElliptic,
    #[error("no finite order up to {0}")]
    OrderOverflow(u32),
    #[error("both fixed points lie inside the domain")]
    AmbiguousFixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Disc,
    HalfPlane,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub z: Complex,
    pub domain: Domain,
}

impl Point {
    pub fn new(z: Complex, domain: Domain) -> Self {
        Point { z, domain }
    }

    pub fn disc(z: Complex) -> Self {
        Point::new(z, Domain::Disc)
    }

    /// Strictly inside the domain, with a margin of `2^-(prec/4)`.
    pub fn is_interior(&self) -> bool {
        let p = self.z.prec().0;
        let margin = two_pow_neg(p, (p / 4) as i64);
        match self.domain {
            Domain::Disc => {
                let r2 = Float::with_val(p, self.z.abs_ref()).square();
                r2 < -omega(p) - margin
            }
            Domain::HalfPlane => *self.z.imag() > margin,
        }
    }
}

/// Squared radius `-w` of the period disc.
pub fn disc_radius_sq(prec: u32) -> Float {
    -omega(prec)
}

/// `(a z + b) / (c z + d)`.
pub fn mobius_act(m: &Mat2, p: &Point) -> Result<Point, HyperbolicError> {
    let prec = p.z.prec().0.max(m.prec());
    let num = Complex::with_val(prec, &m.a * &p.z) + &m.b;
    let den = Complex::with_val(prec, &m.c * &p.z) + &m.d;
    let scale = cabs(&m.c).max(&cabs(&m.d)).max(&Float::with_val(prec, 1));
    if cabs(&den) <= two_pow_neg(prec, (prec / 2) as i64) * scale {
        return Err(HyperbolicError::PoleHit);
    }
    Ok(Point::new(num / den, p.domain))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    DiscToHalfPlane,
    HalfPlaneToDisc,
}

/// Conjugates a transformation between the disc and half-plane models:
/// `M_hd m M_hd^-1` or `M_hd^-1 m M_hd`.
pub fn transport(m: &Mat2, dir: Direction) -> Mat2 {
    let p = m.prec();
    let t = named::mhd(p + 32);
    let ti = t.inv().expect("M_hd is invertible");
    let r = match dir {
        Direction::DiscToHalfPlane => t.mul(m).mul(&ti),
        Direction::HalfPlaneToDisc => ti.mul(m).mul(&t),
    };
    r.with_prec(p)
}

/// Maps a point between the two models with `M_hd`.
pub fn transport_point(p: &Point) -> Result<Point, HyperbolicError> {
    let prec = p.z.prec().0;
    let t = named::mhd(prec + 32);
    let (m, dom) = match p.domain {
        Domain::Disc => (t, Domain::HalfPlane),
        Domain::HalfPlane => (t.inv().expect("invertible"), Domain::Disc),
    };
    let q = mobius_act(&m, p)?;
    Ok(Point::new(Complex::with_val(prec, q.z), dom))
}

/// Fixed points of `m` inside `domain`: the interior roots of
/// `c z^2 + (d - a) z - b = 0`.
pub fn fixed_points(m: &Mat2, domain: Domain) -> Result<Vec<Point>, HyperbolicError> {
    let p = m.prec();
    let tol = two_pow_neg(p, (p / 2) as i64);
    if m.is_scalar(&tol) {
        return Err(HyperbolicError::ScalarMatrix);
    }
    let dma = Complex::with_val(p, &m.d - &m.a);
    let roots: Vec<Complex> = if cabs(&m.c) <= Float::with_val(p, &tol * m.max_abs()) {
        // one finite root, the other at infinity
        vec![Complex::with_val(p, &m.b / &dma)]
    } else {
        // z = (a - d +- sqrt((d - a)^2 + 4 b c)) / (2c)
        let disc =
            Complex::with_val(p, dma.square_ref()) + Complex::with_val(p, &m.b * &m.c) * 4u32;
        let s = disc.sqrt();
        let two_c = Complex::with_val(p, &m.c * 2u32);
        vec![
            (Complex::with_val(p, &s - &dma)) / &two_c,
            (Complex::with_val(p, -&s) - &dma) / &two_c,
        ]
    };
    let inside: Vec<Point> = roots
        .into_iter()
        .map(|z| Point::new(z, domain))
        .filter(Point::is_interior)
        .collect();
    if inside.len() > 1 {
        return Err(HyperbolicError::AmbiguousFixedPoint);
    }
    Ok(inside)
}

/// Least `n <= 120` with `m^n` scalar, for an elliptic `m`.
pub fn order_of_elliptic(m: &Mat2) -> Result<u32, HyperbolicError> {
    const MAX: u32 = 120;
    let p = m.prec();
    let n = m.normalized();
    let tr = n.trace();
    // elliptic: normalized trace real with |tr| < 2
    let tol = two_pow_neg(p, (p / 2) as i64);
    if cabs(&Complex::with_val(p, tr.imag())) > tol
        || Float::with_val(p, tr.real().abs_ref()) >= 2 - tol.clone()
    {
        return Err(HyperbolicError::NotElliptic);
    }
    let loose = two_pow_neg(p, (p / 3) as i64);
    let mut acc = n.clone();
    for k in 1..=MAX {
        if acc.is_scalar(&loose) {
            return Ok(k);
        }
        acc = acc.mul(&n);
    }
    Err(HyperbolicError::OrderOverflow(MAX))
}

/// Orders `(p, q, r)` of the monodromy triangle from the exponents `(a, b, c)`
/// of a hypergeometric equation: `1/p = |1 - c|`, `1/q = |c - a - b|`,
/// `1/r = |a - b|`, sorted ascending.  `None` stands for a cusp.
pub fn pqr_from_abc(
    a: &Rational,
    b: &Rational,
    c: &Rational,
) -> Result<[Option<u32>; 3], HyperbolicError> {
    let diffs = [
        Rational::from(1 - c.clone()).abs(),
        Rational::from(c - Rational::from(a + b)).abs(),
        Rational::from(a - b).abs(),
    ];
    let mut out = [None; 3];
    let mut sum = Rational::new();
    for (slot, x) in out.iter_mut().zip(&diffs) {
        sum += x;
        if x.cmp0().is_eq() {
            continue;
        }
        if *x.numer() != 1 {
            return Err(HyperbolicError::ConditionStarViolated);
        }
        let n = x
            .denom()
            .to_u32()
            .ok_or(HyperbolicError::ConditionStarViolated)?;
        if n < 2 {
            return Err(HyperbolicError::ConditionStarViolated);
        }
        *slot = Some(n);
    }
    if sum >= 1 {
        return Err(HyperbolicError::ConditionStarViolated);
    }
    // ascending, cusps last
    out.sort_by_key(|e| e.unwrap_or(u32::MAX));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{c, expi_pi};

    const P: u32 = 192;

    fn m(name: &str) -> Mat2 {
        builtin_matrix(name, P).unwrap()
    }

    fn small() -> Float {
        Float::with_val(P, 1e-40)
    }

    #[test]
    fn unknown_name() {
        assert_eq!(
            builtin_matrix("nope", 64),
            Err(HyperbolicError::UnknownName("nope".into()))
        );
    }

    #[test]
    fn h34_rotates() {
        let p = Point::disc(c(P, 0.1, 0.0));
        let q = mobius_act(&m("h34"), &p).unwrap();
        let want = Complex::with_val(P, expi_pi(P, 2, 5) * Float::with_val(P, 0.1));
        assert!(cabs(&(q.z - want)) < small());
    }

    #[test]
    fn h34_is_g34_squared() {
        assert!(m("g34").pow(2).dist(&m("h34")) < small());
    }

    #[test]
    fn unit_determinants() {
        for name in [
            "g34", "h34", "hn45", "hn312", "hn412", "hbeta", "hvck", "rotvc", "rotvcp", "th34",
            "thn45", "thn412",
        ] {
            let d = m(name).det();
            assert!(cabs(&(d - 1u32)) < small(), "{name}");
        }
        // the printed circuit matrix around infinity has a stray phase
        let d = m("h45").det();
        assert!(cabs(&(d - expi_pi(P, -3, 5))) < small());
    }

    #[test]
    fn generator_orders() {
        let want = [
            ("h34", 5),
            ("g34", 10),
            ("hn45", 5),
            ("hn312", 5),
            ("hn412", 5),
            ("hbeta", 2),
            ("hvck", 3),
            ("rotvc", 3),
            ("rotvcp", 3),
        ];
        for (name, n) in want {
            assert_eq!(order_of_elliptic(&m(name)), Ok(n), "{name}");
        }
        assert_eq!(order_of_elliptic(&m("h45")), Ok(10));
    }

    #[test]
    fn normalized_pair() {
        // hn312 = e^{-4 pi i/5} h312 with determinant one
        let lhs = m("h312").scale(&expi_pi(P, -4, 5));
        assert!(lhs.dist(&m("hn312")) < small());
    }

    #[test]
    fn hn412_closed_form_matches_conjugation() {
        let g = m("g34");
        let conj = g.mul(&m("hn312")).mul(&g.inv().unwrap());
        assert!(conj.dist(&m("hn412")) < small());
    }

    #[test]
    fn hn45_relations() {
        // the displayed hn45 block is -g34^-1 hn412 g34 = -hn312
        let g = m("g34");
        let alt = g.inv().unwrap().mul(&m("hn412")).mul(&g).neg();
        assert!(alt.dist(&m("hn45")) < small());
        // h34 hn45 hn412 = 1
        let prod = m("h34").mul(&m("hn45")).mul(&m("hn412"));
        assert!(prod.dist(&Mat2::identity(P)) < small());
    }

    #[test]
    fn printed_h45_is_not_a_phase_of_hn45() {
        let printed = printed_matrix("h45", P).unwrap();
        assert!(printed.projective_dist(&m("hn45")) > 1e-3);
    }

    #[test]
    fn transported_generators() {
        let t = transport(&m("hn412"), Direction::DiscToHalfPlane);
        assert!(t.dist(&m("thn412")) < Float::with_val(P, 1e-35));
        let back = transport(&m("th34"), Direction::HalfPlaneToDisc);
        assert!(back.dist(&m("h34")) < small());
        for name in ["th34", "thn45", "thn412"] {
            let x = m(name);
            for e in x.entries() {
                assert!(
                    cabs(&Complex::with_val(P, e.imag())) < Float::with_val(P, 1e-35),
                    "{name} not real"
                );
            }
        }
    }

    #[test]
    fn printed_th34_uses_another_scaling() {
        let printed = printed_matrix("th34", P).unwrap();
        let ours = m("th34");
        assert!(printed.dist(&ours) > 1e-3);
        // same trace, conjugate by a positive diagonal matrix
        assert!(cabs(&(printed.trace() - ours.trace())) < small());
        let k2 = Float::with_val(P, printed.b.real() / ours.b.real())
            * Float::with_val(P, ours.c.real() / printed.c.real());
        let k2 = k2.sqrt();
        let want = Float::with_val(P, printed.b.real() / ours.b.real());
        assert!((k2 - want).abs() < 1e-35);
    }

    #[test]
    fn mhd_maps_disc_to_half_plane() {
        let r = disc_radius_sq(P).sqrt();
        for k in (1..16).step_by(2) {
            let bdry = Complex::with_val(P, expi_pi(P, k, 8) * &r);
            let img = transport_point(&Point::disc(bdry)).unwrap();
            assert!(
                Float::with_val(P, img.z.imag().abs_ref()) < 1e-35,
                "boundary {k}"
            );
            let inner = Complex::with_val(P, expi_pi(P, k, 8) * Float::with_val(P, &r * 0.5));
            let img = transport_point(&Point::disc(inner)).unwrap();
            assert!(img.is_interior());
            let back = transport_point(&img).unwrap();
            assert!(cabs(&(back.z - expi_pi(P, k, 8) * Float::with_val(P, &r * 0.5))) < 1e-35);
        }
    }

    #[test]
    fn fixed_points_of_generators() {
        let w = omega(P);
        let one = |name: &str| {
            let f = fixed_points(&m(name), Domain::Disc).unwrap();
            assert_eq!(f.len(), 1, "{name}");
            f[0].z.clone()
        };
        assert!(cabs(&one("h34")) < small());
        // hn412 fixes w, the image of u = infinity; it lies on the boundary,
        // so only the interior fixed points are checked here
        // hbeta fixes -w^2
        let pb = one("hbeta");
        let want = -Float::with_val(P, w.square_ref());
        assert!(cabs(&(pb - want)) < small());
        // rotvc = h34 hvck h34^-1 fixes the h34-image of the hvck fixed point
        let v = one("hvck");
        let hv = mobius_act(&m("h34"), &Point::disc(v)).unwrap();
        assert!(cabs(&(one("rotvc") - hv.z)) < small());
    }

    #[test]
    fn hbeta_swaps_zero_and_w() {
        let hb = m("hbeta");
        let z = mobius_act(&hb, &Point::disc(c(P, 0.0, 0.0))).unwrap();
        assert!(cabs(&(z.z - omega(P))) < small());
    }

    #[test]
    fn scalar_matrix_rejected() {
        let s = Mat2::identity(P).scale(&c(P, 2.0, 1.0));
        assert_eq!(
            fixed_points(&s, Domain::Disc),
            Err(HyperbolicError::ScalarMatrix)
        );
    }

    #[test]
    fn pole_hit() {
        let mm = Mat2::new(
            c(P, 1.0, 0.0),
            c(P, 0.0, 0.0),
            c(P, 1.0, 0.0),
            c(P, -0.25, 0.0),
        );
        assert_eq!(
            mobius_act(&mm, &Point::disc(c(P, 0.25, 0.0))),
            Err(HyperbolicError::PoleHit)
        );
    }

    #[test]
    fn not_elliptic() {
        let hyp = Mat2::diag(c(P, 2.0, 0.0), c(P, 0.5, 0.0));
        assert_eq!(order_of_elliptic(&hyp), Err(HyperbolicError::NotElliptic));
        // elliptic of infinite order
        let irr = Mat2::diag(c(P, 0.6, 0.8), c(P, 0.6, -0.8));
        assert_eq!(
            order_of_elliptic(&irr),
            Err(HyperbolicError::OrderOverflow(120))
        );
    }

    #[test]
    fn triangle_orders() {
        let r = |n: i64, d: i64| Rational::from((n, d));
        assert_eq!(
            pqr_from_abc(&r(1, 2), &r(1, 2), &r(1, 1)),
            Ok([None, None, None])
        );
        assert_eq!(
            pqr_from_abc(&r(1, 12), &r(5, 12), &r(1, 1)),
            Ok([Some(2), Some(3), None])
        );
        assert_eq!(
            pqr_from_abc(&r(2, 5), &r(3, 5), &r(6, 5)),
            Ok([Some(5), Some(5), Some(5)])
        );
        let a = r(7, 30);
        let b = r(1, 30);
        let cc = r(2, 3);
        // 1-c = 1/3, c-a-b = 2/3-8/30 = 2/5 (not a unit fraction)
        assert_eq!(
            pqr_from_abc(&a, &b, &cc),
            Err(HyperbolicError::ConditionStarViolated)
        );
        let a = r(4, 15);
        let b = r(1, 15);
        // 1-c = 1/3, c-a-b = 1/3, a-b = 1/5
        assert_eq!(pqr_from_abc(&a, &b, &cc), Ok([Some(3), Some(3), Some(5)]));
        assert_eq!(
            pqr_from_abc(&r(0, 1), &r(0, 1), &r(1, 2)),
            Err(HyperbolicError::ConditionStarViolated)
        );
    }
}

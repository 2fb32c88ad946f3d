//! CM points of the (3,3,5) order: generator search, fixed points, singular
//! values and exact recognition of the resulting class-field data.

mod recognize;
mod report;

pub use recognize::{
    clear_denominators, continued_fraction, discriminant, integral_model, min_poly_from_values,
    minimal_scale, poly_roots, rational_cf, recognize_quadrat, recognize_rational,
    recognize_rational_detailed, recognize_real, resultant, IntegralModel, MinPoly, Recognition,
    Substitution, MAX_TERMS,
};
pub use report::{
    class_field_report, ClassFieldReport, EmbeddingReport, JsonComplex, JsonRational, ReportConfig,
};

use rayon::prelude::*;
use rug::{Complex, Float, Rational};
use thiserror::Error;

use crate::exactfield::{FieldError, QuadRat};
use crate::hyperbolic::{
    builtin_matrix, fixed_points, transport, Direction, Domain, HyperbolicError, Point,
};
use crate::quaternion::{matrix_coords, OrderBasis, QuatElem, QuatError};
use crate::theta::{big_phi, lambda_of, phi_from_big_phi, ThetaContext, ThetaError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmError {
    #[error("delta = {0} is not totally positive")]
    NotTotallyPositive(String),
    #[error("delta = {0} is not an algebraic integer")]
    NotIntegral(String),
    #[error("generator has no fixed point inside the disc")]
    NoInteriorRoot,
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("no generator found within bound {0}")]
    NotFound(i64),
    #[error("recognition failed: {0}")]
    RecognitionFailed(String),
    #[error("no admissible substitution makes the polynomial integral")]
    NotClearable,
    #[error("neither phi^2 nor phi~^2 was recognized")]
    NothingRecognized,
    #[error("found {have} distinct singular values, expected {need}")]
    InsufficientValues { need: usize, have: usize },
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Element of the ring of integers as `(p, q)` for `p + q w`.
type Oi = (i64, i64);

fn oi_add(x: Oi, y: Oi) -> Oi {
    (x.0 + y.0, x.1 + y.1)
}

fn oi_mul(x: Oi, y: Oi) -> Oi {
    (x.0 * y.0 + x.1 * y.1, x.0 * y.1 + x.1 * y.0 + x.1 * y.1)
}

/// An embedding of `O_F[sqrt(-delta)]` into the order, given by the image of
/// `sqrt(-delta)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CMEmbedding {
    /// Coordinates over the order basis, each `(p, q)` for `p + q w`.
    pub coords: [(i64, i64); 4],
    pub element: QuatElem,
    /// The embedding is optimal at 2: whenever `(e + sqrt(-delta))/2` is
    /// integral for some `e`, `(e + G)/2` lies in the order.
    pub optimal: bool,
}

impl CMEmbedding {
    pub fn flat(&self) -> [i64; 8] {
        let c = &self.coords;
        [
            c[0].0, c[0].1, c[1].0, c[1].1, c[2].0, c[2].1, c[3].0, c[3].1,
        ]
    }
}

fn delta_pair(delta: &QuadRat) -> Result<Oi, CmError> {
    if !delta.is_totally_positive() {
        return Err(CmError::NotTotallyPositive(delta.to_string()));
    }
    delta
        .to_i64_pair()
        .ok_or_else(|| CmError::NotIntegral(delta.to_string()))
}

/// Representatives `e` of `O_F/2` with `(e^2 + delta)/4` integral.
fn half_integral_shifts(delta: &QuadRat) -> Vec<QuadRat> {
    let quarter = Rational::from((1, 4));
    [(0, 0), (1, 0), (0, 1), (1, 1)]
        .into_iter()
        .map(QuadRat::from)
        .filter(|e| (&(e * e) + delta).scale(&quarter).is_integral())
        .collect()
}

fn is_optimal(order: &OrderBasis, g: &QuatElem, shifts: &[QuadRat]) -> bool {
    let half = Rational::from((1, 2));
    shifts.iter().all(|e| {
        let mut x = g.clone();
        x.0[0] = &x.0[0] + e;
        order.contains(&x.scale(&QuadRat::from(half.clone())))
    })
}

/// Validates explicit coordinates as an embedding of `sqrt(-delta)`.
pub fn embedding_from_coords(
    order: &OrderBasis,
    delta: &QuadRat,
    coords: [(i64, i64); 4],
) -> Result<CMEmbedding, CmError> {
    let element = order.element_from_ints(coords);
    let alg = &order.algebra;
    if !alg.trd(&element).is_zero() {
        return Err(CmError::InvalidGenerator(format!(
            "trace {} is not zero",
            alg.trd(&element)
        )));
    }
    let n = alg.nrd(&element);
    if &n != delta {
        return Err(CmError::InvalidGenerator(format!(
            "norm {n} differs from delta {delta}"
        )));
    }
    let optimal = is_optimal(order, &element, &half_integral_shifts(delta));
    Ok(CMEmbedding {
        coords,
        element,
        optimal,
    })
}

/// All `G` in the order with trace 0 and norm `delta` whose eight integer
/// coordinates are bounded by `bound`, one of each pair `+-G`.
pub fn search_generators(
    order: &OrderBasis,
    delta: &QuadRat,
    bound: i64,
) -> Result<Vec<CMEmbedding>, CmError> {
    let d = delta_pair(delta)?;
    if bound <= 0 {
        return Ok(Vec::new());
    }
    let alg = &order.algebra;
    let basis = &order.basis;
    let pair = |x: &QuadRat| {
        x.to_i64_pair()
            .ok_or_else(|| CmError::Field(FieldError::Parse(format!("{x} not integral"))))
    };
    // Nrd(sum c_i G_i) = sum_i n_ii c_i^2 + sum_{i<j} n_ij c_i c_j
    let mut gram = [[(0i64, 0i64); 4]; 4];
    for i in 0..4 {
        gram[i][i] = pair(&alg.nrd(&basis[i]))?;
        for j in i + 1..4 {
            gram[i][j] = pair(&alg.trd(&alg.mul(&basis[i], &alg.conj(&basis[j]))))?;
        }
    }
    let tr: Vec<QuadRat> = basis.iter().map(|g| alg.trd(g)).collect();
    // eliminate a coordinate whose trace coefficient is a unit
    let k = (0..4)
        .find(|&i| tr[i].is_integral() && tr[i].norm().abs() == 1)
        .ok_or(CmError::NotFound(bound))?;
    let inv = tr[k].inv()?;
    let lin: Vec<Oi> = (0..4)
        .map(|i| {
            if i == k {
                Ok((0, 0))
            } else {
                pair(&-(&tr[i] * &inv))
            }
        })
        .collect::<Result<_, _>>()?;
    let free: Vec<usize> = (0..4).filter(|&i| i != k).collect();

    let span = 2 * bound + 1;
    let vals: Vec<Oi> = (0..span * span)
        .map(|t| (t / span - bound, t % span - bound))
        .collect();
    let nrd = |c: &[Oi; 4]| -> Oi {
        let mut s = (0, 0);
        for i in 0..4 {
            s = oi_add(s, oi_mul(gram[i][i], oi_mul(c[i], c[i])));
            for j in i + 1..4 {
                s = oi_add(s, oi_mul(gram[i][j], oi_mul(c[i], c[j])));
            }
        }
        s
    };
    let found: Vec<[Oi; 4]> = vals
        .par_iter()
        .flat_map_iter(|&a| {
            let mut out = Vec::new();
            for &b in &vals {
                for &c in &vals {
                    let mut v = [(0, 0); 4];
                    v[free[0]] = a;
                    v[free[1]] = b;
                    v[free[2]] = c;
                    let mut ck = (0, 0);
                    for &i in &free {
                        ck = oi_add(ck, oi_mul(lin[i], v[i]));
                    }
                    if ck.0.abs() > bound || ck.1.abs() > bound {
                        continue;
                    }
                    v[k] = ck;
                    if nrd(&v) != d {
                        continue;
                    }
                    let first = v.iter().flat_map(|x| [x.0, x.1]).find(|&x| x != 0);
                    if first.is_some_and(|x| x > 0) {
                        out.push(v);
                    }
                }
            }
            out
        })
        .collect();
    let shifts = half_integral_shifts(delta);
    let mut out: Vec<CMEmbedding> = found
        .into_iter()
        .map(|coords| {
            let element = order.element_from_ints(coords);
            let optimal = is_optimal(order, &element, &shifts);
            CMEmbedding {
                coords,
                element,
                optimal,
            }
        })
        .collect();
    out.sort_by_key(|e| {
        let f = e.flat();
        (f.iter().map(|x| x.abs()).max().unwrap_or(0), f)
    });
    Ok(out)
}

/// The unique fixed point in the disc of the transformation defined by `g`.
pub fn fixed_point_of(order: &OrderBasis, g: &CMEmbedding, prec: u32) -> Result<Point, CmError> {
    let m = order.matrix(&g.element, prec + 32);
    let md = transport(&m, Direction::HalfPlaneToDisc);
    let pts = fixed_points(&md, Domain::Disc).map_err(|e| match e {
        HyperbolicError::AmbiguousFixedPoint => CmError::NoInteriorRoot,
        other => CmError::Hyperbolic(other),
    })?;
    let p = pts.into_iter().next().ok_or(CmError::NoInteriorRoot)?;
    Ok(Point::new(Complex::with_val(prec, &p.z), Domain::Disc))
}

/// `phi`, `phi~` and their squares at a disc point.
#[derive(Debug, Clone)]
pub struct SingularValue {
    pub lambda: Complex,
    pub big_phi: Complex,
    pub phi: Complex,
    pub phi_tilde: Complex,
    pub phi_sq: Complex,
    pub phi_tilde_sq: Complex,
}

pub fn singular_value(u0: &Point, ctx: &ThetaContext) -> Result<SingularValue, CmError> {
    let lam = lambda_of(&u0.z, ctx)?;
    let bp = big_phi(&lam, &ctx.tolerance())?;
    let v = phi_from_big_phi(lam.finite().cloned().expect("finite"), bp);
    let p = ctx.prec;
    Ok(SingularValue {
        phi_sq: Complex::with_val(p, v.phi.square_ref()),
        phi_tilde_sq: Complex::with_val(p, v.phi_tilde.square_ref()),
        lambda: v.lambda,
        big_phi: v.big_phi,
        phi: v.phi,
        phi_tilde: v.phi_tilde,
    })
}

/// `sqrt(m)` lies in `F(sqrt(-delta))`: `m` or `-delta m` is a square in `F`.
pub fn sqrt_in_cm_field(m: &rug::Integer, delta: &QuadRat) -> bool {
    let mq = QuadRat::from(Rational::from(m.clone()));
    mq.is_square() || (-(delta * &mq)).is_square()
}

/// Coordinates over the order basis of a transported unit-group generator,
/// recognized from its matrix.  `None` if some coordinate is not recognized.
pub fn unit_generator_coords(
    order: &OrderBasis,
    name: &str,
    prec: u32,
) -> Result<Option<[QuadRat; 4]>, CmError> {
    let m = builtin_matrix(name, prec)?;
    let h = match name {
        "th34" | "thn45" | "thn412" => m,
        _ => transport(&m, Direction::DiscToHalfPlane),
    };
    let xs = matrix_coords(&order.algebra, &h);
    let mut q: Vec<QuadRat> = Vec::with_capacity(4);
    for x in &xs {
        match recognize_quadrat(x, 4, 64) {
            Some(v) => q.push(v),
            None => return Ok(None),
        }
    }
    let elem = QuatElem([q[0].clone(), q[1].clone(), q[2].clone(), q[3].clone()]);
    Ok(Some(order.coords(&elem)?))
}

/// `|u|` for ordering embeddings by distance from the centre.
pub(crate) fn modulus(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::order_basis;

    fn order() -> OrderBasis {
        order_basis().unwrap()
    }

    fn neg(c: [(i64, i64); 4]) -> [(i64, i64); 4] {
        c.map(|(p, q)| (-p, -q))
    }

    const EX1: [(i64, i64); 4] = [(-3, 2), (0, 2), (4, -2), (0, -2)];
    const EX2: [(i64, i64); 4] = [(3, -3), (1, 0), (-4, 2), (-1, 1)];

    #[test]
    fn example_one_generator() {
        let o = order();
        let e = embedding_from_coords(&o, &QuadRat::from_int(7), EX1).unwrap();
        assert!(e.optimal);
        let u = fixed_point_of(&o, &e, 128).unwrap();
        assert!((u.z.real().to_f64() + 0.205396).abs() < 5e-6);
        assert!((u.z.imag().to_f64() + 0.0667372).abs() < 5e-6);
    }

    #[test]
    fn example_two_generator() {
        let o = order();
        let e = embedding_from_coords(&o, &QuadRat::from((6, -2)), EX2).unwrap();
        let u = fixed_point_of(&o, &e, 128).unwrap();
        assert!((u.z.real().to_f64() + 0.164894).abs() < 5e-6);
        assert!((u.z.imag().to_f64() + 0.119803).abs() < 5e-6);
    }

    #[test]
    fn search_finds_printed_generators() {
        let o = order();
        let found = search_generators(&o, &QuadRat::from_int(7), 8).unwrap();
        assert!(found
            .iter()
            .any(|e| e.coords == EX1 || e.coords == neg(EX1)));
        let found = search_generators(&o, &QuadRat::from((6, -2)), 8).unwrap();
        assert!(found
            .iter()
            .any(|e| e.coords == EX2 || e.coords == neg(EX2)));
        for e in &found {
            let alg = &o.algebra;
            assert!(alg.trd(&e.element).is_zero());
            assert_eq!(alg.nrd(&e.element), QuadRat::from((6, -2)));
        }
    }

    #[test]
    fn empty_search() {
        let o = order();
        assert!(search_generators(&o, &QuadRat::from_int(7), 0)
            .unwrap()
            .is_empty());
        assert!(matches!(
            search_generators(&o, &QuadRat::from_int(-7), 3),
            Err(CmError::NotTotallyPositive(_))
        ));
    }

    #[test]
    fn invalid_generator() {
        let o = order();
        assert!(matches!(
            embedding_from_coords(&o, &QuadRat::from_int(7), [(1, 0), (0, 0), (0, 0), (0, 0)]),
            Err(CmError::InvalidGenerator(_))
        ));
    }

    #[test]
    fn membership_rule() {
        use rug::Integer;
        assert!(sqrt_in_cm_field(&Integer::from(-7), &QuadRat::from_int(7)));
        assert!(sqrt_in_cm_field(&Integer::from(5), &QuadRat::from_int(7)));
        assert!(!sqrt_in_cm_field(
            &Integer::from(2),
            &QuadRat::from((6, -2))
        ));
        assert!(!sqrt_in_cm_field(
            &Integer::from(13),
            &QuadRat::from((39, 52))
        ));
    }

    #[test]
    fn transported_generators_are_in_the_order() {
        let o = order();
        let h = unit_generator_coords(&o, "th34", 192).unwrap().unwrap();
        assert_eq!(h, [0, 0, 1, 0].map(QuadRat::from_int));
        for name in ["thn45", "thn412", "rotvc", "rotvcp"] {
            let c = unit_generator_coords(&o, name, 192).unwrap();
            let c = c.unwrap_or_else(|| panic!("{name} not recognized"));
            assert!(c.iter().all(QuadRat::is_integral), "{name}: {c:?}");
        }
    }
}

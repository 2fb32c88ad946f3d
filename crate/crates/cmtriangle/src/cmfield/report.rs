//! The end-to-end class-field report and its JSON form.

use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use super::{
    embedding_from_coords, fixed_point_of, integral_model, min_poly_from_values, minimal_scale,
    modulus, recognize_real, search_generators, singular_value, sqrt_in_cm_field, CMEmbedding,
    CmError, Substitution,
};
use crate::exactfield::{factor_rational, squarefree_split, QuadRat};
use crate::num::{cabs, digits_for, fmt_float, two_pow_neg};
use crate::quaternion::order_basis;
use crate::theta::ThetaContext;

/// Most generators whose singular values are evaluated for one report.
const MAX_EVALUATED: usize = 12;

#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub prec: u32,
    pub bound: i64,
    pub threshold: Integer,
    /// Expected degree of the class field over the CM field.
    pub degree: usize,
    /// Multiplies the singular values before forming the minimal polynomial.
    pub scale: Rational,
    pub substitution: Option<Substitution>,
    /// Explicit generators; the search is skipped when nonempty.
    pub generators: Vec<[(i64, i64); 4]>,
    pub max_radius: u32,
    pub parallel: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            prec: 256,
            bound: 8,
            threshold: Integer::from(10u64.pow(12)),
            degree: 1,
            scale: Rational::from(1),
            substitution: None,
            generators: Vec::new(),
            max_radius: 64,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonRational {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for JsonRational {
    fn from(r: &Rational) -> Self {
        JsonRational {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl JsonRational {
    pub fn to_rational(&self) -> Option<Rational> {
        let n: Integer = self.num.parse().ok()?;
        let d: Integer = self.den.parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Rational::from((n, d)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: String,
    pub im: String,
    pub prec: u32,
}

impl JsonComplex {
    pub fn new(z: &Complex, prec: u32) -> Self {
        let d = digits_for(prec);
        JsonComplex {
            re: fmt_float(z.real(), d),
            im: fmt_float(z.imag(), d),
            prec,
        }
    }

    pub fn to_complex(&self) -> Option<Complex> {
        let re = Float::parse(&self.re).ok()?;
        let im = Float::parse(&self.im).ok()?;
        Some(Complex::with_val(self.prec, (re, im)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// Coordinates over the order basis.
    pub coords: Vec<String>,
    pub optimal: bool,
    pub fixed_point: JsonComplex,
    pub phi: JsonComplex,
    pub phi_tilde: JsonComplex,
    pub phi_sq: JsonComplex,
    pub phi_tilde_sq: JsonComplex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinPolyReport {
    pub scale: JsonRational,
    /// Monic, constant term first.
    pub rational: Vec<JsonRational>,
    pub integer: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralModelReport {
    pub substitution: Substitution,
    pub coefficients: Vec<String>,
    pub discriminant: String,
    pub discriminant_factored: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFieldReport {
    pub delta: String,
    pub prec: u32,
    pub degree: usize,
    pub generators_found: usize,
    pub embeddings: Vec<EmbeddingReport>,
    /// Exact value of `phi~^2`, when recognized.
    pub phi_tilde_sq: Option<JsonRational>,
    /// Exact value of `phi^2`, when recognized.
    pub phi_sq: Option<JsonRational>,
    /// Which of `phi_tilde_sq`, `phi_sq` were recognized.
    pub recognized: Vec<String>,
    pub factorization: Option<String>,
    /// Squarefree kernel of `phi~^2`.
    pub m: Option<i64>,
    /// Kernels from further embeddings agree with `m`.
    pub confirmed: Option<bool>,
    pub min_poly: Option<MinPolyReport>,
    pub integral_model: Option<IntegralModelReport>,
    pub class_field: String,
}

impl ClassFieldReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

struct Evaluated {
    report: EmbeddingReport,
    phi_tilde_sq: Complex,
    phi_sq: Complex,
}

/// Runs search, fixed point, singular value and recognition for `delta`.
pub fn class_field_report(
    delta: &QuadRat,
    cfg: &ReportConfig,
) -> Result<ClassFieldReport, CmError> {
    if !delta.is_totally_positive() {
        return Err(CmError::NotTotallyPositive(delta.to_string()));
    }
    let order = order_basis()?;
    let mut embs: Vec<CMEmbedding> = if cfg.generators.is_empty() {
        search_generators(&order, delta, cfg.bound)?
    } else {
        cfg.generators
            .iter()
            .map(|c| embedding_from_coords(&order, delta, *c))
            .collect::<Result<_, _>>()?
    };
    if embs.is_empty() {
        return Err(CmError::NotFound(cfg.bound));
    }
    let found = embs.len();
    if cfg.generators.is_empty() && embs.iter().any(|e| e.optimal) {
        embs.retain(|e| e.optimal);
    }

    let prec = cfg.prec;
    let mut pts = Vec::with_capacity(embs.len());
    for e in embs {
        let u = fixed_point_of(&order, &e, prec)?;
        pts.push((e, u));
    }
    pts.sort_by(|a, b| modulus(&a.1.z).total_cmp(&modulus(&b.1.z)));

    let ctx = ThetaContext {
        prec,
        max_radius: cfg.max_radius,
        radius_factor: 1.0,
        parallel: cfg.parallel,
    };
    let eval = |(e, u): &(CMEmbedding, crate::hyperbolic::Point)| -> Result<Evaluated, CmError> {
        let sv = singular_value(u, &ctx)?;
        let report = EmbeddingReport {
            coords: order
                .coords(&e.element)?
                .iter()
                .map(|c| c.to_string())
                .collect(),
            optimal: e.optimal,
            fixed_point: JsonComplex::new(&u.z, prec),
            phi: JsonComplex::new(&sv.phi, prec),
            phi_tilde: JsonComplex::new(&sv.phi_tilde, prec),
            phi_sq: JsonComplex::new(&sv.phi_sq, prec),
            phi_tilde_sq: JsonComplex::new(&sv.phi_tilde_sq, prec),
        };
        Ok(Evaluated {
            report,
            phi_tilde_sq: sv.phi_tilde_sq,
            phi_sq: sv.phi_sq,
        })
    };

    let mut out = ClassFieldReport {
        delta: delta.to_string(),
        prec,
        degree: cfg.degree,
        generators_found: found,
        embeddings: Vec::new(),
        phi_tilde_sq: None,
        phi_sq: None,
        recognized: Vec::new(),
        factorization: None,
        m: None,
        confirmed: None,
        min_poly: None,
        integral_model: None,
        class_field: String::new(),
    };

    if cfg.degree <= 1 {
        let first = eval(&pts[0])?;
        let rt = recognize_real(&first.phi_tilde_sq, &cfg.threshold);
        let rp = recognize_real(&first.phi_sq, &cfg.threshold);
        if rt.is_some() {
            out.recognized.push("phi_tilde_sq".into());
        }
        if rp.is_some() {
            out.recognized.push("phi_sq".into());
        }
        out.phi_tilde_sq = rt.as_ref().map(JsonRational::from);
        out.phi_sq = rp.as_ref().map(JsonRational::from);
        // phi^2 = -(4/3) phi~^2
        let value = match (rt, rp) {
            (Some(t), _) => t,
            (None, Some(p)) => p * Rational::from((-3, 4)),
            (None, None) => return Err(CmError::NothingRecognized),
        };
        let (m, _) = squarefree_split(&value)?;
        out.factorization = Some(factor_rational(&value)?.to_string());
        out.class_field = if sqrt_in_cm_field(&m, delta) {
            "C(M) = M".to_string()
        } else {
            format!("C(M) = M(sqrt({m}))")
        };
        out.m = m.to_i64();
        out.embeddings.push(first.report);
        if let Some(second) = pts.get(1) {
            let s = eval(second)?;
            let agree = recognize_real(&s.phi_tilde_sq, &cfg.threshold)
                .and_then(|r| squarefree_split(&r).ok())
                .is_some_and(|(m2, _)| m2 == m);
            out.confirmed = Some(agree);
            out.embeddings.push(s.report);
        }
        return Ok(out);
    }

    // degree > 1: gather distinct values of phi~^2 closed under conjugation
    let tol = two_pow_neg(prec, (prec / 4) as i64);
    let mut values: Vec<Complex> = Vec::new();
    let close = |a: &Complex, b: &Complex| {
        let scale = cabs(a).max(&Float::with_val(prec, 1));
        cabs(&Complex::with_val(prec, a - b)) < Float::with_val(prec, &tol * &scale)
    };
    for pt in pts.iter().take(MAX_EVALUATED) {
        if values.len() >= cfg.degree {
            break;
        }
        let ev = eval(pt)?;
        let v = ev.phi_tilde_sq.clone();
        let mut new_vals = vec![v.clone()];
        let conj = Complex::with_val(prec, v.conj_ref());
        if !close(&v, &conj) {
            new_vals.push(conj);
        }
        let mut added = false;
        for nv in new_vals {
            if !values.iter().any(|x| close(x, &nv)) {
                values.push(nv);
                added = true;
            }
        }
        if added {
            out.embeddings.push(ev.report);
        }
    }
    if values.len() != cfg.degree {
        return Err(CmError::InsufficientValues {
            need: cfg.degree,
            have: values.len(),
        });
    }
    let mp = min_poly_from_values(&values, &cfg.scale, &cfg.threshold)?;
    out.min_poly = Some(MinPolyReport {
        scale: JsonRational::from(&cfg.scale),
        rational: mp.rational.iter().map(JsonRational::from).collect(),
        integer: mp.integer.iter().map(|c| c.to_string()).collect(),
    });
    let sub = match &cfg.substitution {
        Some(s) => s.clone(),
        None => Substitution::scale(minimal_scale(&mp.rational, 12)?),
    };
    let model = integral_model(&mp.rational, &sub)?;
    let disc_f = factor_rational(&Rational::from(model.discriminant.clone()))
        .map(|f| f.to_string())
        .unwrap_or_else(|_| model.discriminant.to_string());
    out.integral_model = Some(IntegralModelReport {
        substitution: sub,
        coefficients: model.coefficients.iter().map(|c| c.to_string()).collect(),
        discriminant: model.discriminant.to_string(),
        discriminant_factored: disc_f,
    });
    out.class_field = format!(
        "C(M) = M(t), t a root of the degree {} polynomial",
        cfg.degree
    );
    Ok(out)
}

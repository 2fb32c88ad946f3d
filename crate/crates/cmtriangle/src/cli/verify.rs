//! Self-checks run by `cmtriangle verify`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::cmfield::{
    class_field_report, embedding_from_coords, fixed_point_of, recognize_real, singular_value,
    unit_generator_coords, ReportConfig, Substitution,
};
use crate::exactfield::QuadRat;
use crate::hyperbolic::{builtin_matrix, mobius_act, order_of_elliptic, Point};
use crate::num::{cabs, expi_pi, omega, pi, two_pow_neg, Mat2};
use crate::quaternion::{check_order, compare_with_table, order_basis, takeuchi_table};
use crate::theta::{
    lambda_eval, lambda_of, theta_const, LambdaValue, SiegelPoint, ThetaCharacteristic,
    ThetaContext,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Theta,
    Group,
    Order,
    Examples,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(
    out: &mut Vec<Check>,
    suite: &'static str,
    name: &str,
    pass: bool,
    detail: impl Into<String>,
) {
    out.push(Check {
        suite,
        name: name.to_string(),
        pass,
        detail: detail.into(),
    });
}

fn sci(x: &Float) -> String {
    format!("{:.3e}", x.to_f64())
}

pub fn run_suite(suite: Suite, prec: u32, threshold: &Integer) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Theta) {
        theta_suite(prec, &mut out);
    }
    if matches!(suite, Suite::All | Suite::Group) {
        group_suite(prec, &mut out);
    }
    if matches!(suite, Suite::All | Suite::Order) {
        order_suite(prec, &mut out);
    }
    if matches!(suite, Suite::All | Suite::Examples) {
        examples_suite(prec.max(256), threshold, &mut out);
    }
    out
}

/// `sum_n e^{-pi n^2}`, the one-variable theta constant at `i`.
fn theta_1d_at_i(prec: u32) -> Float {
    let p = pi(prec);
    let mut s = Float::with_val(prec, 1);
    let mut n = 1u32;
    loop {
        let t = Float::with_val(prec, -Float::with_val(prec, &p * (n * n))).exp();
        if t < two_pow_neg(prec, prec as i64 + 8) {
            break;
        }
        s += t * 2u32;
        n += 1;
    }
    s
}

fn theta_suite(prec: u32, out: &mut Vec<Check>) {
    const S: &str = "theta";
    let ctx = ThetaContext::new(prec);
    let tol = two_pow_neg(prec, (prec / 2) as i64);

    let om = SiegelPoint::i_identity(prec);
    match theta_const(&ThetaCharacteristic::zero(), &om, &ctx) {
        Ok(th) => {
            let want = Float::with_val(prec, theta_1d_at_i(prec).square_ref()).square();
            let rel = Float::with_val(prec, cabs(&(th - &want)) / &want);
            check(
                out,
                S,
                "product of one-variable constants at iI",
                rel < tol,
                format!("rel err {}", sci(&rel)),
            );
        }
        Err(e) => check(
            out,
            S,
            "product of one-variable constants at iI",
            false,
            e.to_string(),
        ),
    }

    let u = Complex::with_val(prec, (0.1, 0.2));
    let shift = crate::theta::omega_of(&u, prec).and_then(|om| {
        let ch = ThetaCharacteristic::a19();
        let base = theta_const(&ch, &om, &ctx)?;
        let shifted = theta_const(&ch.shifted(&[1, -2, 0, 3], &[2, 0, -1, 1]), &om, &ctx)?;
        Ok((base, shifted))
    });
    match shift {
        Ok((base, shifted)) => {
            // a = (1,9,1,9)/10, n = (2,0,-1,1): a.n = 1
            let phase = expi_pi(prec, 2, 1);
            let err = cabs(&(shifted - base * phase));
            check(
                out,
                S,
                "characteristic shift",
                err < tol,
                format!("err {}", sci(&err)),
            );
        }
        Err(e) => check(out, S, "characteristic shift", false, e.to_string()),
    }

    match lambda_of(&Complex::with_val(prec, 0), &ctx) {
        Ok(LambdaValue::Finite(l)) => {
            let err = cabs(&(l - 1u32));
            check(
                out,
                S,
                "lambda(0) = 1",
                err < tol,
                format!("err {}", sci(&err)),
            );
        }
        Ok(LambdaValue::Infinity) => check(out, S, "lambda(0) = 1", false, "got Infinity"),
        Err(e) => check(out, S, "lambda(0) = 1", false, e.to_string()),
    }

    match lambda_eval(&Complex::with_val(prec, omega(prec)), &ctx) {
        Ok(ev) => {
            let pass = ev.value == LambdaValue::Infinity && cabs(&ev.recip) < tol;
            check(
                out,
                S,
                "lambda(w) = Infinity",
                pass,
                format!("|1/lambda| {}", sci(&cabs(&ev.recip))),
            );
        }
        Err(e) => check(out, S, "lambda(w) = Infinity", false, e.to_string()),
    }

    let rot = Complex::with_val(prec, expi_pi(prec, -1, 5) * omega(prec));
    match lambda_of(&rot, &ctx) {
        Ok(LambdaValue::Finite(l)) => {
            let err = cabs(&l);
            check(
                out,
                S,
                "lambda(w e^{-pi i/5}) = 0",
                err < tol,
                format!("|lambda| {}", sci(&err)),
            );
        }
        Ok(LambdaValue::Infinity) => {
            check(out, S, "lambda(w e^{-pi i/5}) = 0", false, "got Infinity")
        }
        Err(e) => check(out, S, "lambda(w e^{-pi i/5}) = 0", false, e.to_string()),
    }
}

fn group_suite(prec: u32, out: &mut Vec<Check>) {
    const S: &str = "group";
    let small = two_pow_neg(prec, (prec / 2) as i64);
    let m = |n: &str| builtin_matrix(n, prec).expect("builtin");

    for (name, n) in [
        ("h34", 5),
        ("g34", 10),
        ("hn45", 5),
        ("hn412", 5),
        ("hvck", 3),
        ("rotvc", 3),
        ("rotvcp", 3),
    ] {
        let got = order_of_elliptic(&m(name));
        check(
            out,
            S,
            &format!("order of {name}"),
            got == Ok(n),
            format!("{got:?}"),
        );
    }
    let d = m("g34").pow(2).dist(&m("h34"));
    check(
        out,
        S,
        "g34^2 = h34",
        d < small,
        format!("dist {}", sci(&d)),
    );
    let prod = m("h34").mul(&m("hn45")).mul(&m("hn412"));
    let d = prod.dist(&Mat2::identity(prec));
    check(
        out,
        S,
        "h34 hn45 hn412 = I",
        d < small,
        format!("dist {}", sci(&d)),
    );

    // invariance of lambda under the generators at pseudo-random points
    let ctx = ThetaContext::new(prec);
    let tol = two_pow_neg(prec, (prec / 4) as i64);
    let mut rng = ChaCha8Rng::seed_from_u64(0x335);
    let mut worst = Float::with_val(prec, 0);
    let mut failure: Option<String> = None;
    for _ in 0..4 {
        let r: f64 = 0.5 * rng.gen::<f64>().sqrt();
        let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        let u = Point::disc(Complex::with_val(prec, (r * t.cos(), r * t.sin())));
        let base = match lambda_of(&u.z, &ctx) {
            Ok(LambdaValue::Finite(l)) => l,
            other => {
                failure = Some(format!("{other:?}"));
                break;
            }
        };
        for g in ["h34", "hn45", "hn412"] {
            let img = match mobius_act(&m(g), &u) {
                Ok(p) => p,
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            };
            match lambda_of(&img.z, &ctx) {
                Ok(LambdaValue::Finite(l)) => {
                    let rel = Float::with_val(
                        prec,
                        cabs(&(l - &base)) / cabs(&base).max(&Float::with_val(prec, 1)),
                    );
                    if rel > worst {
                        worst = rel;
                    }
                }
                other => failure = Some(format!("{other:?}")),
            }
        }
    }
    let pass = failure.is_none() && worst < tol;
    check(
        out,
        S,
        "lambda invariant under h34, hn45, hn412",
        pass,
        failure.unwrap_or_else(|| format!("worst rel err {}", sci(&worst))),
    );
}

fn order_suite(prec: u32, out: &mut Vec<Check>) {
    const S: &str = "order";
    let order = match order_basis() {
        Ok(o) => o,
        Err(e) => {
            check(out, S, "order basis", false, e.to_string());
            return;
        }
    };
    match check_order(&order.algebra, &order.basis) {
        Ok(c) => check(
            out,
            S,
            "basis spans a maximal order",
            c.passes(),
            format!(
                "closed {}, integral {}, Gram det {} of norm {}",
                c.closed, c.integral, c.gram_det, c.gram_norm
            ),
        ),
        Err(e) => check(out, S, "basis spans a maximal order", false, e.to_string()),
    }
    for name in ["th34", "thn45", "thn412", "rotvc", "rotvcp"] {
        match unit_generator_coords(&order, name, prec) {
            Ok(Some(c)) => {
                let ok = c.iter().all(QuadRat::is_integral);
                let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                check(
                    out,
                    S,
                    &format!("{name} lies in the order"),
                    ok,
                    s.join(", "),
                );
            }
            Ok(None) => check(
                out,
                S,
                &format!("{name} lies in the order"),
                false,
                "coordinates not recognized",
            ),
            Err(e) => check(
                out,
                S,
                &format!("{name} lies in the order"),
                false,
                e.to_string(),
            ),
        }
    }
    let tol = Float::with_val(prec, 1e-20);
    for class in takeuchi_table() {
        let cmp = compare_with_table(class, prec, &tol);
        check(
            out,
            S,
            &format!("class {} {}", cmp.class, cmp.signature),
            cmp.a_square && cmp.b_square,
            format!(
                "degree {}, a ratio square {}, b ratio square {}",
                cmp.degree, cmp.a_square, cmp.b_square
            ),
        );
    }
}

/// `-19^4 61^2 79^2 89^2 109^2 149^2 229^2 23`
fn expected_disc_23() -> Integer {
    let mut d = Integer::from(-23);
    d *= Integer::from(19).pow(4u32);
    for p in [61u32, 79, 89, 109, 149, 229] {
        d *= Integer::from(p).pow(2u32);
    }
    d
}

fn examples_suite(prec: u32, threshold: &Integer, out: &mut Vec<Check>) {
    const S: &str = "examples";
    let order = match order_basis() {
        Ok(o) => o,
        Err(e) => {
            check(out, S, "order basis", false, e.to_string());
            return;
        }
    };
    let ctx = ThetaContext::new(prec);
    let cases: [(&str, QuadRat, [(i64, i64); 4], bool, Rational); 3] = [
        (
            "delta = 7",
            QuadRat::from_int(7),
            [(-3, 2), (0, 2), (4, -2), (0, -2)],
            true,
            Rational::from((-2527, 36)),
        ),
        (
            "delta = 6-2w",
            QuadRat::from((6, -2)),
            [(3, -3), (1, 0), (-4, 2), (-1, 1)],
            false,
            Rational::from((-1323, 8)),
        ),
        (
            "delta = 39+52w",
            QuadRat::from((39, 52)),
            [(1, -2), (2, 0), (-8, -2), (0, -2)],
            false,
            Rational::from((-68232853, 408146688)),
        ),
    ];
    for (label, delta, coords, tilde, want) in cases {
        let got = embedding_from_coords(&order, &delta, coords)
            .and_then(|e| fixed_point_of(&order, &e, prec))
            .and_then(|u| singular_value(&u, &ctx));
        let name = format!(
            "{label}: {} = {want}",
            if tilde { "phi~^2" } else { "phi^2" }
        );
        match got {
            Ok(sv) => {
                let v = if tilde { &sv.phi_tilde_sq } else { &sv.phi_sq };
                let r = recognize_real(v, threshold);
                let pass = r.as_ref() == Some(&want);
                check(out, S, &name, pass, format!("recognized {r:?}"));
            }
            Err(e) => check(out, S, &name, false, e.to_string()),
        }
    }

    let c = Integer::from(11u32).pow(3u32) * Integer::from(256) * Integer::from(625);
    let cfg = ReportConfig {
        prec,
        threshold: threshold.clone(),
        degree: 3,
        scale: Rational::from(256),
        substitution: Some(Substitution::mobius(
            c,
            Integer::from(9),
            Integer::from(1728),
        )),
        generators: vec![
            [(-5, 0), (0, 6), (8, -6), (-2, -2)],
            [(7, -6), (0, 2), (-8, 2), (-2, 0)],
        ],
        ..ReportConfig::default()
    };
    let name = "delta = 23: cubic class polynomial";
    match class_field_report(&QuadRat::from_int(23), &cfg) {
        Ok(rep) => {
            let model = rep.integral_model.as_ref();
            let coeffs: Vec<&str> = model
                .map(|m| m.coefficients.iter().map(String::as_str).collect())
                .unwrap_or_default();
            let want = ["6131066257801", "12444768657", "19268", "1"];
            let disc_ok = model.is_some_and(|m| m.discriminant == expected_disc_23().to_string());
            check(
                out,
                S,
                name,
                coeffs == want && disc_ok,
                format!("coefficients {coeffs:?}, discriminant ok {disc_ok}"),
            );
        }
        Err(e) => check(out, S, name, false, e.to_string()),
    }
}

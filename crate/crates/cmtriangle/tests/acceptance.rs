//! Acceptance criteria, one PASS/FAIL line each.  Runs without the libtest
//! harness so every criterion is reported even when an earlier one fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use cmtriangle::cli::{run_suite, Suite};
use cmtriangle::cmfield::{
    class_field_report, continued_fraction, embedding_from_coords, fixed_point_of, integral_model,
    min_poly_from_values, rational_cf, recognize_rational, search_generators, singular_value,
    ReportConfig, Substitution,
};
use cmtriangle::exactfield::QuadRat;
use cmtriangle::hyperbolic::{builtin_matrix, mobius_act, transport, Direction, Point};
use cmtriangle::num::{cabs, expi_pi, omega, pi};
use cmtriangle::quaternion::{
    check_order, compare_with_table, order_basis, takeuchi_ab, takeuchi_table, Signature,
};
use cmtriangle::theta::{
    lambda_eval, omega_of, theta_const, LambdaValue, SiegelPoint, ThetaCharacteristic, ThetaContext,
};

type Outcome = Result<String, String>;

fn t12() -> Integer {
    Integer::from(10u64.pow(12))
}

fn f(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

fn rel(a: &Complex, b: &Complex) -> Float {
    let p = a.prec().0;
    let d = cabs(&Complex::with_val(p, a - b));
    let s = cabs(b).max(&f(p, 1e-300));
    Float::with_val(p, d / s)
}

fn sci(x: &Float) -> String {
    format!("{:.3e}", x.to_f64())
}

fn lambda_abs(ev: &cmtriangle::theta::LambdaEval) -> String {
    match &ev.value {
        LambdaValue::Finite(l) => sci(&cabs(l)),
        LambdaValue::Infinity => format!("inf (|1/lambda| = {})", sci(&cabs(&ev.recip))),
    }
}

fn criterion_1() -> Outcome {
    let prec = 128;
    let ctx = ThetaContext::new(prec);
    let start = Instant::now();
    let tol = f(prec, 1e-20);

    let l0 = lambda_eval(&Complex::with_val(prec, 0), &ctx).map_err(|e| e.to_string())?;
    let e0 = match &l0.value {
        LambdaValue::Finite(l) => cabs(&Complex::with_val(prec, l - 1u32)),
        LambdaValue::Infinity => return Err("lambda(0) is infinite".into()),
    };

    let u2 = Complex::with_val(prec, expi_pi(prec, -2, 5) * omega(prec));
    let l2 = lambda_eval(&u2, &ctx).map_err(|e| e.to_string())?;
    let zero_2 = matches!(&l2.value, LambdaValue::Finite(l) if cabs(l) < tol);

    let u1 = Complex::with_val(prec, expi_pi(prec, -1, 5) * omega(prec));
    let l1 = lambda_eval(&u1, &ctx).map_err(|e| e.to_string())?;

    let lw = lambda_eval(&Complex::with_val(prec, omega(prec)), &ctx).map_err(|e| e.to_string())?;
    let ew = cabs(&lw.recip);
    let elapsed = start.elapsed();

    let detail = format!(
        "|lambda(0)-1| = {}, |lambda(w e^(-2pi i/5))| = {}, |1/lambda(w)| = {}, |lambda(w e^(-pi i/5))| = {}, {:.2?}",
        sci(&e0),
        lambda_abs(&l2),
        sci(&ew),
        lambda_abs(&l1),
        elapsed
    );
    if e0 < tol && zero_2 && ew < tol && elapsed < Duration::from_secs(10) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2() -> Outcome {
    let prec = 128;
    let ctx = ThetaContext::new(prec);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let gens: Vec<_> = ["h34", "hn45", "hn412"]
        .iter()
        .map(|n| builtin_matrix(n, prec).unwrap())
        .collect();
    let mut worst = f(prec, 0.0);
    for _ in 0..20 {
        let r = 0.5 * rng.gen::<f64>().sqrt();
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        let u = Point::disc(Complex::with_val(prec, (r * t.cos(), r * t.sin())));
        let base = lambda_eval(&u.z, &ctx).map_err(|e| e.to_string())?;
        let base = base
            .value
            .finite()
            .ok_or("lambda infinite at sample")?
            .clone();
        for g in &gens {
            let img = mobius_act(g, &u).map_err(|e| e.to_string())?;
            let l = lambda_eval(&img.z, &ctx).map_err(|e| e.to_string())?;
            let l = l.value.finite().ok_or("lambda infinite at image")?.clone();
            let e = rel(&l, &base);
            if e > worst {
                worst = e;
            }
        }
    }
    let detail = format!("60 comparisons, worst relative error {}", sci(&worst));
    if worst < 1e-20 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3() -> Outcome {
    let delta = QuadRat::from_int(7);
    let cfg = ReportConfig {
        prec: 256,
        bound: 8,
        ..ReportConfig::default()
    };
    let rep = class_field_report(&delta, &cfg).map_err(|e| e.to_string())?;
    let want = Rational::from((-2527, 36));
    let got = rep.phi_tilde_sq.as_ref().and_then(|r| r.to_rational());
    let exact = got.as_ref() == Some(&want);
    let kernel_ok = rep.m == Some(-7);

    let order = order_basis().map_err(|e| e.to_string())?;
    let emb = embedding_from_coords(&order, &delta, [(-3, 2), (0, 2), (4, -2), (0, -2)])
        .map_err(|e| e.to_string())?;
    let u0 = fixed_point_of(&order, &emb, 128).map_err(|e| e.to_string())?;
    let printed = Complex::with_val(128, (-0.205396, -0.0667372));
    let dist = cabs(&Complex::with_val(128, &u0.z - &printed));

    let detail = format!(
        "phi~^2 = {}, exact match {exact}, kernel {:?}, {}, |u0 - printed| = {}",
        got.map(|r| r.to_string())
            .unwrap_or_else(|| "unrecognized".into()),
        rep.m,
        rep.class_field,
        sci(&dist)
    );
    if (exact || kernel_ok) && dist < 5e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4() -> Outcome {
    let prec = 512;
    let ctx = ThetaContext::new(prec);
    let re = Float::parse("-0.2884031937082062430429292960544310724595352385781433875628704276940")
        .unwrap();
    let im = Float::parse("0.2095371854415799547791501532228242020959121464954639149713389790753")
        .unwrap();
    let u0 = Point::disc(Complex::with_val(prec, (re, im)));
    let sv = singular_value(&u0, &ctx).map_err(|e| e.to_string())?;

    let r = Rational::from((13 * 29 * 29 * 79 * 79, 256i64 * 3i64.pow(13)));
    let want = Complex::with_val(prec, -Float::with_val(prec, &r));
    let e = rel(&sv.phi_sq, &want);

    // the input carries about 220 correct bits; recognize at 200
    let x = Float::with_val(200, -sv.phi_sq.real());
    let rec = recognize_rational(&x, &t12());
    let cf_want: Vec<Integer> = [0, 5, 1, 53, 1, 1, 3, 4, 1, 12, 7, 74, 2, 2]
        .iter()
        .map(|&v| Integer::from(v))
        .collect();
    let cf = rec.as_ref().map(rational_cf).unwrap_or_default();
    let cf_ok = cf.len() >= cf_want.len() && cf[..cf_want.len()] == cf_want[..];
    let raw: Vec<String> = continued_fraction(&Float::with_val(prec, -sv.phi_sq.real()), 15)
        .iter()
        .map(|a| a.to_string())
        .collect();

    let detail = format!(
        "rel err {}, recognized {}, cf of rational {:?}, numeric cf [{}, ...]",
        sci(&e),
        rec.as_ref()
            .map(|r| r.to_string())
            .unwrap_or_else(|| "none".into()),
        cf.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        raw[..15.min(raw.len())].join(",")
    );
    if e < 1e-30 && rec.as_ref() == Some(&r) && cf_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Outcome {
    let prec = 256;
    let ctx = ThetaContext::new(prec);
    let order = order_basis().map_err(|e| e.to_string())?;
    let delta = QuadRat::from_int(23);
    let mut values = Vec::new();
    for c in [
        [(-5, 0), (0, 6), (8, -6), (-2, -2)],
        [(7, -6), (0, 2), (-8, 2), (-2, 0)],
    ] {
        let emb = embedding_from_coords(&order, &delta, c).map_err(|e| e.to_string())?;
        let u = fixed_point_of(&order, &emb, prec).map_err(|e| e.to_string())?;
        let sv = singular_value(&u, &ctx).map_err(|e| e.to_string())?;
        let v = sv.phi_tilde_sq;
        if v.imag().is_zero() || Float::with_val(prec, v.imag().abs_ref()) < 1e-40 {
            values.push(v);
        } else {
            values.push(Complex::with_val(prec, v.conj_ref()));
            values.push(v);
        }
    }
    let mp =
        min_poly_from_values(&values, &Rational::from(256), &t12()).map_err(|e| e.to_string())?;
    let want = vec![
        Rational::from((
            Integer::from_str_radix("146663661576709210112", 10).unwrap(),
            Integer::from(34296447249u64),
        )),
        Rational::from((
            Integer::from_str_radix("27944558699379372032", 10).unwrap(),
            Integer::from(1375668606321u64),
        )),
        Rational::from((
            Integer::from(298002375630573376u64),
            Integer::from(6131066257801u64),
        )),
        Rational::from(1),
    ];
    let r_ok = mp.rational == want;

    let c = Integer::from(11).pow(3u32) * Integer::from(256) * Integer::from(625);
    let sub = Substitution::mobius(c, Integer::from(9), Integer::from(1728));
    let model = integral_model(&mp.rational, &sub).map_err(|e| e.to_string())?;
    let coeffs: Vec<Integer> = ["6131066257801", "12444768657", "19268", "1"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let mut disc = Integer::from(-23) * Integer::from(19).pow(4u32);
    for p in [61u32, 79, 89, 109, 149, 229] {
        disc *= Integer::from(p).pow(2u32);
    }
    let detail = format!(
        "r1 r2 r3 exact {r_ok}, Y-model {:?} via {sub}, discriminant {}",
        model
            .coefficients
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>(),
        model.discriminant
    );
    if r_ok && model.coefficients == coeffs && model.discriminant == disc {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let prec = 128;
    let tol = f(prec, 1e-20);
    let mut bad = Vec::new();
    for class in takeuchi_table() {
        let cmp = compare_with_table(class, prec, &tol);
        if !(cmp.a_square && cmp.b_square) {
            bad.push(cmp.class.clone());
        }
    }
    let ab = takeuchi_ab(&Signature::finite(3, 3, 5), prec).map_err(|e| e.to_string())?;
    let wbar = QuadRat::one() - QuadRat::w();
    let ratio = ab
        .b_exact
        .as_ref()
        .map(|b| b.div(&QuadRat::sqrt5()).unwrap());
    let viii = ab.a_exact == Some(QuadRat::from_int(-3)) && ratio == Some(wbar.pow(2));
    let detail = format!(
        "{} rows checked, failing {:?}, (3,3,5): b / sqrt5 = {}",
        takeuchi_table().len(),
        bad,
        ratio
            .map(|r| r.to_string())
            .unwrap_or_else(|| "not exact".into())
    );
    if bad.is_empty() && takeuchi_table().len() == 19 && viii {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Outcome {
    let order = order_basis().map_err(|e| e.to_string())?;
    let c = check_order(&order.algebra, &order.basis).map_err(|e| e.to_string())?;
    let detail = format!(
        "Gram det {}, |norm| {}, closed {}, integral {}",
        c.gram_det,
        c.gram_norm.clone().abs(),
        c.closed,
        c.integral
    );
    if c.passes() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `sum_n e^{-pi n^2}` by direct summation.
fn one_dim_theta(prec: u32) -> Float {
    let p = pi(prec);
    let mut s = Float::with_val(prec, 1);
    for n in 1..60u32 {
        let t = Float::with_val(prec, -Float::with_val(prec, &p * (n * n))).exp();
        s += t * 2u32;
    }
    s
}

fn criterion_8() -> Outcome {
    let prec = 256;
    let ctx = ThetaContext::new(prec);
    let th = theta_const(
        &ThetaCharacteristic::zero(),
        &SiegelPoint::i_identity(prec),
        &ctx,
    )
    .map_err(|e| e.to_string())?;
    let want = Complex::with_val(prec, one_dim_theta(prec).pow(4u32));
    let e = rel(&th, &want);
    let detail = format!("relative error {}", sci(&e));
    if e < 1e-30 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn quasi_periodicity(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let prec = 128;
    let ctx = ThetaContext::new(prec);
    let mut fails = 0;
    for k in 0..8 {
        let u = Complex::with_val(prec, (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)));
        let om = omega_of(&u, prec).map_err(|e| e.to_string())?;
        let ch = if k % 2 == 0 {
            ThetaCharacteristic::a11()
        } else {
            ThetaCharacteristic::a19()
        };
        let m: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-2..=2));
        let n: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-2..=2));
        let base = theta_const(&ch, &om, &ctx).map_err(|e| e.to_string())?;
        let shifted = theta_const(&ch.shifted(&m, &n), &om, &ctx).map_err(|e| e.to_string())?;
        let an: Rational = (0..4).map(|i| Rational::from(&ch.a[i] * n[i])).sum();
        let phase = expi_pi(
            prec,
            2 * an.numer().to_i64().unwrap(),
            an.denom().to_i64().unwrap(),
        );
        let want = Complex::with_val(prec, base * phase);
        if cabs(&Complex::with_val(prec, &shifted - &want))
            > 1e-30 * cabs(&want).max(&f(prec, 1.0)).to_f64()
        {
            fails += 1;
        }
    }
    Ok(fails)
}

fn mobius_composition(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let prec = 128;
    let names = [
        "h34", "g34", "hn45", "hn412", "hvck", "rotvc", "rotvcp", "hbeta",
    ];
    let mats: Vec<_> = names
        .iter()
        .map(|n| builtin_matrix(n, prec).unwrap())
        .collect();
    let mut fails = 0;
    for _ in 0..200 {
        let a = &mats[rng.gen_range(0..mats.len())];
        let b = &mats[rng.gen_range(0..mats.len())];
        let r = 0.6 * rng.gen::<f64>().sqrt();
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        let u = Point::disc(Complex::with_val(prec, (r * t.cos(), r * t.sin())));
        let lhs = mobius_act(&a.mul(b), &u).map_err(|e| e.to_string())?;
        let rhs = mobius_act(a, &mobius_act(b, &u).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if cabs(&Complex::with_val(prec, &lhs.z - &rhs.z)) > 1e-30 {
            fails += 1;
        }
    }
    Ok(fails)
}

fn fixed_point_residual() -> Result<(usize, usize), String> {
    let prec = 256;
    let order = order_basis().map_err(|e| e.to_string())?;
    let mut n = 0;
    let mut fails = 0;
    for delta in [
        QuadRat::from_int(7),
        QuadRat::from((6, -2)),
        QuadRat::from_int(23),
        QuadRat::from((39, 52)),
    ] {
        for emb in search_generators(&order, &delta, 8)
            .map_err(|e| e.to_string())?
            .iter()
            .take(12)
        {
            let u = fixed_point_of(&order, emb, prec).map_err(|e| e.to_string())?;
            let md = transport(
                &order.matrix(&emb.element, prec),
                Direction::HalfPlaneToDisc,
            );
            let img = mobius_act(&md, &u).map_err(|e| e.to_string())?;
            n += 1;
            if cabs(&Complex::with_val(prec, &img.z - &u.z)) > 1e-60 {
                fails += 1;
            }
        }
    }
    Ok((n, fails))
}

fn planted_rationals(rng: &mut ChaCha8Rng) -> usize {
    let mut fails = 0;
    for _ in 0..1000 {
        let p: i64 = rng.gen_range(-1_000_000_000..=1_000_000_000);
        let q: i64 = rng.gen_range(1..=1_000_000);
        let r = Rational::from((p, q));
        let x = Float::with_val(128, &r);
        if recognize_rational(&x, &t12()).as_ref() != Some(&r) {
            fails += 1;
        }
    }
    fails
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let qp = quasi_periodicity(&mut rng)?;
    let mc = mobius_composition(&mut rng)?;
    let (nfp, fp) = fixed_point_residual()?;
    let pr = planted_rationals(&mut rng);
    let detail = format!(
        "failures: quasi-periodicity {qp}/8, Mobius composition {mc}/200, fixed-point residual {fp}/{nfp}, planted rationals {pr}/1000"
    );
    if qp + mc + fp + pr == 0 && nfp > 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_10() -> Outcome {
    let ctx = ThetaContext::new(256);
    let u = Complex::with_val(256, (-0.2054, -0.0667));
    let t = Instant::now();
    lambda_eval(&u, &ctx).map_err(|e| e.to_string())?;
    let one = t.elapsed();
    let t = Instant::now();
    let checks = run_suite(Suite::All, 256, &t12());
    let all = t.elapsed();
    let failed = checks.iter().filter(|c| !c.pass).count();
    let detail = format!(
        "one lambda at 256 bits {one:.2?}, verify all {all:.2?} ({} checks, {failed} failed)",
        checks.len()
    );
    if one < Duration::from_secs(5) && all < Duration::from_secs(300) && failed == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("theta special values", criterion_1),
        ("group invariance", criterion_2),
        ("delta = 7 end to end", criterion_3),
        ("high-precision phi^2 anchor", criterion_4),
        ("cubic class polynomial for delta = 23", criterion_5),
        ("triangle-group Hilbert symbols", criterion_6),
        ("order integrity", criterion_7),
        ("theta oracle at iI", criterion_8),
        ("property loops", criterion_9),
        ("performance", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {} ({name}): {detail}", i + 1);
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

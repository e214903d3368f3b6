//! Randomized verification of the calculus laws: the simple useful formula,
//! the arithmetic rules (sum, scalar, product, quotient), the power rules,
//! and the integral laws.
//!
//! Residuals are split by regime: identities at right-scattered points are
//! algebraically exact closed forms (threshold 1e-12), while dense points go
//! through the limit engine and inherit its extrapolation error (1e-5).

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fracderiv::{
    frac_derivative, power_rule_derivative, FnOnScale, FractionalOrder, LimitParams, ScaleFn,
};
use crate::integral::cauchy_frac_integral;
use crate::number::tol_at;
use crate::timescale::{Component, TimeScale};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const SCATTERED_THRESHOLD: f64 = 1e-12;
pub const DENSE_THRESHOLD: f64 = 1e-5;

/// Aggregated outcome of checking one law over one or more cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub law_id: String,
    pub cases_run: u32,
    pub max_residual: f64,
    pub worst_case: String,
    pub passed: bool,
    pub threshold: f64,
}

impl LawReport {
    fn single(law_id: &str, residual: f64, worst_case: String, threshold: f64) -> Self {
        LawReport {
            law_id: law_id.to_string(),
            cases_run: 1,
            max_residual: residual,
            worst_case,
            passed: residual <= threshold,
            threshold,
        }
    }
}

/// Relative residual anchored at unit magnitude.
fn residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}

fn threshold_for(scale: &TimeScale, t: f64) -> Result<f64> {
    Ok(if scale.graininess(t)? > tol_at(t) {
        SCATTERED_THRESHOLD
    } else {
        DENSE_THRESHOLD
    })
}

fn describe(scale: &TimeScale, t: f64, alpha: FractionalOrder, fns: &str) -> String {
    format!("scale={scale}, t={t}, alpha={alpha}, {fns}")
}

/// Sum rule: `(f+g)^(alpha)(t) = f^(alpha)(t) + g^(alpha)(t)`.
pub fn check_sum_rule(
    f: &FnOnScale,
    g: &FnOnScale,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<LawReport> {
    let sum = |u: f64| Ok(f.value_at(u)? + g.value_at(u)?);
    let lhs = frac_derivative(&sum, scale, t, alpha, params)?.value;
    let rhs = frac_derivative(f, scale, t, alpha, params)?.value
        + frac_derivative(g, scale, t, alpha, params)?.value;
    let r = residual(lhs, rhs);
    Ok(LawReport::single(
        "T2i-sum",
        r,
        describe(scale, t, alpha, &format!("f={f}, g={g}")),
        threshold_for(scale, t)?,
    ))
}

/// Scalar rule: `(lambda f)^(alpha)(t) = lambda f^(alpha)(t)`.
pub fn check_scalar_rule(
    f: &FnOnScale,
    lambda: f64,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<LawReport> {
    let scaled = |u: f64| Ok(lambda * f.value_at(u)?);
    let lhs = frac_derivative(&scaled, scale, t, alpha, params)?.value;
    let rhs = lambda * frac_derivative(f, scale, t, alpha, params)?.value;
    let r = residual(lhs, rhs);
    Ok(LawReport::single(
        "T2ii-scalar",
        r,
        describe(scale, t, alpha, &format!("lambda={lambda}, f={f}")),
        threshold_for(scale, t)?,
    ))
}

/// Product rule, both stated forms:
/// `(fg)^(alpha) = f^(alpha) g + f(sigma) g^(alpha) = f g^(alpha) + f^(alpha) g(sigma)`.
pub fn check_product_rule(
    f: &FnOnScale,
    g: &FnOnScale,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<LawReport> {
    let prod = |u: f64| Ok(f.value_at(u)? * g.value_at(u)?);
    let lhs = frac_derivative(&prod, scale, t, alpha, params)?.value;
    let fa = frac_derivative(f, scale, t, alpha, params)?.value;
    let ga = frac_derivative(g, scale, t, alpha, params)?.value;
    let sigma = scale.sigma(t)?;
    let form1 = fa * g.value_at(t)? + f.value_at(sigma)? * ga;
    let form2 = f.value_at(t)? * ga + fa * g.value_at(sigma)?;
    let r = residual(lhs, form1)
        .max(residual(lhs, form2))
        .max(residual(form1, form2));
    Ok(LawReport::single(
        "T2iii-product",
        r,
        describe(scale, t, alpha, &format!("f={f}, g={g}")),
        threshold_for(scale, t)?,
    ))
}

/// Reciprocal and quotient rules:
/// `(1/f)^(alpha) = -f^(alpha) / (f(t) f(sigma(t)))` and
/// `(f/g)^(alpha) = (f^(alpha) g(t) - f(t) g^(alpha)) / (g(t) g(sigma(t)))`.
pub fn check_quotient_rules(
    f: &FnOnScale,
    g: &FnOnScale,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<LawReport> {
    let sigma = scale.sigma(t)?;
    let ft = f.value_at(t)?;
    let fs = f.value_at(sigma)?;
    let gt = g.value_at(t)?;
    let gs = g.value_at(sigma)?;
    if (ft * fs).abs() <= 1e-3 || (gt * gs).abs() <= 1e-3 {
        return Err(Error::SingularPoint(t));
    }
    let fa = frac_derivative(f, scale, t, alpha, params)?.value;
    let ga = frac_derivative(g, scale, t, alpha, params)?.value;
    let recip = |u: f64| Ok(1.0 / f.value_at(u)?);
    let recip_lhs = frac_derivative(&recip, scale, t, alpha, params)?.value;
    let recip_rhs = -fa / (ft * fs);
    let quot = |u: f64| Ok(f.value_at(u)? / g.value_at(u)?);
    let quot_lhs = frac_derivative(&quot, scale, t, alpha, params)?.value;
    let quot_rhs = (fa * gt - ft * ga) / (gt * gs);
    let r = residual(recip_lhs, recip_rhs).max(residual(quot_lhs, quot_rhs));
    Ok(LawReport::single(
        "T2iv-v-quotient",
        r,
        describe(scale, t, alpha, &format!("f={f}, g={g}")),
        threshold_for(scale, t)?,
    ))
}

/// The simple useful formula `f(sigma(t)) = f(t) + mu(t)^alpha f^(alpha)(t)`.
pub fn check_simple_useful_formula(
    f: &FnOnScale,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<LawReport> {
    let d = frac_derivative(f, scale, t, alpha, params)?.value;
    let sigma = scale.sigma(t)?;
    let mu = sigma - t;
    let lhs = f.value_at(sigma)?;
    let rhs = f.value_at(t)? + mu.powf(alpha.value()) * d;
    let r = residual(lhs, rhs);
    Ok(LawReport::single(
        "T1vi-simple-useful",
        r,
        describe(scale, t, alpha, &format!("f={f}")),
        threshold_for(scale, t)?,
    ))
}

/// Power-rule closed form against the direct derivative of `(t-c)^m` (or its
/// reciprocal when `inverted`).
pub fn check_power_rule(
    m: u32,
    c: f64,
    inverted: bool,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<LawReport> {
    let closed = power_rule_derivative(m, c, inverted, scale, t, alpha)?;
    let base = Expr::pow_int(
        Expr::sub(Expr::var(), Expr::constant(c)),
        m as i64,
    );
    let expr = if inverted {
        Expr::div(Expr::constant_int(1), base)
    } else {
        base
    };
    let f = FnOnScale::from_expr(expr);
    let direct = frac_derivative(&f, scale, t, alpha, params)?.value;
    let r = residual(closed, direct);
    Ok(LawReport::single(
        "power-rule",
        r,
        describe(scale, t, alpha, &format!("m={m}, c={c}, inverted={inverted}")),
        threshold_for(scale, t)?,
    ))
}

/// The integral laws, checked jointly: additivity, homogeneity,
/// antisymmetry, interval splitting, and the vanishing integral over `[a,a]`.
#[allow(clippy::too_many_arguments)]
pub fn check_integral_laws(
    f: &FnOnScale,
    g: &FnOnScale,
    scale: &TimeScale,
    a: f64,
    b: f64,
    c: f64,
    xi: f64,
    beta: Rational64,
    window: (f64, f64),
    params: &LimitParams,
) -> Result<LawReport> {
    let fe = f
        .as_expr()
        .ok_or_else(|| Error::InvalidArgument("integral laws need expression-backed f".into()))?;
    let ge = g
        .as_expr()
        .ok_or_else(|| Error::InvalidArgument("integral laws need expression-backed g".into()))?;
    let int = |func: &FnOnScale, x: f64, y: f64| -> Result<f64> {
        cauchy_frac_integral(func, scale, x, y, beta, window, params)
    };
    let fab = int(f, a, b)?;
    let gab = int(g, a, b)?;
    let sum_fn = FnOnScale::from_expr(Expr::add(fe.clone(), ge.clone()));
    let r_add = residual(int(&sum_fn, a, b)?, fab + gab);
    let scaled_fn = FnOnScale::from_expr(Expr::mul(Expr::constant(xi), fe.clone()));
    let r_hom = residual(int(&scaled_fn, a, b)?, xi * fab);
    let r_anti = residual(int(f, b, a)?, -fab);
    let r_split = residual(fab, int(f, a, c)? + int(f, c, b)?);
    let r_zero = int(f, a, a)?.abs();
    let r = r_add.max(r_hom).max(r_anti).max(r_split).max(r_zero);
    // One dense segment anywhere in the window routes through quadrature.
    let all_scattered = scale
        .segments_in_window(window.0, window.1)?
        .iter()
        .all(|s| s.is_point());
    let threshold = if all_scattered { SCATTERED_THRESHOLD } else { DENSE_THRESHOLD };
    Ok(LawReport::single(
        "T4-integral",
        r,
        format!("scale={scale}, a={a}, b={b}, c={c}, xi={xi}, beta={beta}, f={f}, g={g}"),
        threshold,
    ))
}

// ---------------------------------------------------------------------------
// Randomized suite
// ---------------------------------------------------------------------------

const LAW_IDS: [&str; 7] = [
    "T1vi-simple-useful",
    "T2i-sum",
    "T2ii-scalar",
    "T2iii-product",
    "T2iv-v-quotient",
    "power-rule",
    "T4-integral",
];

fn case_rng(seed: u64, law_index: usize, case_index: u32) -> ChaCha8Rng {
    let mixed = seed
        ^ (law_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (case_index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    ChaCha8Rng::seed_from_u64(mixed)
}

fn random_poly(rng: &mut ChaCha8Rng) -> Expr {
    let degree = rng.gen_range(0..=4u32);
    let mut e = Expr::constant_int(rng.gen_range(-3..=3i64));
    for d in 1..=degree {
        let coeff = rng.gen_range(-3..=3i64);
        if coeff != 0 {
            e = Expr::add(
                e,
                Expr::mul(Expr::constant_int(coeff), Expr::pow_int(Expr::var(), d as i64)),
            );
        }
    }
    e
}

fn law_suite_union_scale() -> TimeScale {
    TimeScale::finite_union(vec![
        Component::Interval(0.0, 1.0),
        Component::Point(1.5),
        Component::Interval(2.0, 3.0),
    ])
    .expect("static scale")
}

/// Draws a scale and an evaluation point in its T^kappa.
fn draw_scale_point(rng: &mut ChaCha8Rng) -> (TimeScale, f64) {
    match rng.gen_range(0..5u32) {
        0 => (TimeScale::integers(), rng.gen_range(-5..=5i64) as f64),
        1 => {
            let scale = TimeScale::uniform_grid(0.5, 0.0).expect("static scale");
            (scale, 0.5 * rng.gen_range(-6..=6i64) as f64)
        }
        2 => {
            let scale = TimeScale::uniform_grid(2.0, 0.0).expect("static scale");
            (scale, 2.0 * rng.gen_range(-4..=4i64) as f64)
        }
        3 => {
            let scale = law_suite_union_scale();
            let t = match rng.gen_range(0..4u32) {
                0 => 1.0,  // right-scattered interval endpoint
                1 => 1.5,  // isolated point
                2 => rng.gen_range(0.05..0.9),
                _ => rng.gen_range(2.05..2.9),
            };
            (scale, t)
        }
        _ => (TimeScale::Reals, rng.gen_range(-2.0..2.0)),
    }
}

fn draw_alpha(rng: &mut ChaCha8Rng, allow_one: bool) -> FractionalOrder {
    let pool: &[(u64, u64)] = if allow_one {
        &[(1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)]
    } else {
        &[(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)]
    };
    let (p, q) = pool[rng.gen_range(0..pool.len())];
    FractionalOrder::new(p, q).expect("static pool")
}

fn run_derivative_case(
    law_id: &str,
    rng: &mut ChaCha8Rng,
    params: &LimitParams,
) -> Result<LawReport> {
    // A draw can land on a singular point for the quotient rules; reject and
    // redraw from the same stream so the case stays deterministic.
    for _ in 0..40 {
        let (scale, t) = draw_scale_point(rng);
        let alpha = draw_alpha(rng, law_id != "power-rule");
        let f = FnOnScale::from_expr(random_poly(rng));
        let g = FnOnScale::from_expr(random_poly(rng));
        let report = match law_id {
            "T1vi-simple-useful" => check_simple_useful_formula(&f, &scale, t, alpha, params),
            "T2i-sum" => check_sum_rule(&f, &g, &scale, t, alpha, params),
            "T2ii-scalar" => {
                let lambda = rng.gen_range(-3..=3i64) as f64;
                check_scalar_rule(&f, lambda, &scale, t, alpha, params)
            }
            "T2iii-product" => check_product_rule(&f, &g, &scale, t, alpha, params),
            "T2iv-v-quotient" => check_quotient_rules(&f, &g, &scale, t, alpha, params),
            "power-rule" => {
                let m = rng.gen_range(1..=5u32);
                let c = rng.gen_range(-2..=2i64) as f64;
                let inverted = rng.gen_bool(0.4);
                check_power_rule(m, c, inverted, &scale, t, alpha, params)
            }
            other => Err(Error::InvalidArgument(format!("unknown law {other}"))),
        };
        match report {
            Err(Error::SingularPoint(_)) => continue,
            other => return other,
        }
    }
    Err(Error::InvalidArgument(format!(
        "could not draw a nonsingular case for {law_id}"
    )))
}

fn run_integral_case(rng: &mut ChaCha8Rng, params: &LimitParams) -> Result<LawReport> {
    let which = rng.gen_range(0..5u32);
    let (scale, candidates): (TimeScale, Vec<f64>) = match which {
        0 => (TimeScale::integers(), (-4..=6).map(|k| k as f64).collect()),
        1 => (
            TimeScale::uniform_grid(0.5, 0.0).expect("static scale"),
            (-4..=8).map(|k| 0.5 * k as f64).collect(),
        ),
        2 => (
            TimeScale::uniform_grid(2.0, 0.0).expect("static scale"),
            (-2..=4).map(|k| 2.0 * k as f64).collect(),
        ),
        3 => (
            law_suite_union_scale(),
            // 2.0 is right-dense but left-scattered: a left-sided limit
            // there has a single approach point and rightly diverges.
            vec![0.25, 0.5, 0.75, 1.0, 1.5, 2.25, 2.5, 2.75],
        ),
        _ => (TimeScale::Reals, (1..=8).map(|k| 0.5 * k as f64).collect()),
    };
    let mut picks = [0usize; 3];
    loop {
        for p in picks.iter_mut() {
            *p = rng.gen_range(0..candidates.len());
        }
        picks.sort_unstable();
        if picks[0] != picks[2] {
            break;
        }
    }
    let (a, c, b) = (candidates[picks[0]], candidates[picks[1]], candidates[picks[2]]);
    let scattered_scale = matches!(which, 0 | 1 | 2);
    // beta = 0 at a dense endpoint needs an order-1 limit through quadrature
    // values; keep it to the exact scattered scales.
    let beta_pool: &[Rational64] = if scattered_scale {
        &[
            Rational64::new(0, 1),
            Rational64::new(1, 4),
            Rational64::new(1, 2),
            Rational64::new(3, 4),
            Rational64::new(1, 1),
        ]
    } else {
        &[
            Rational64::new(1, 4),
            Rational64::new(1, 2),
            Rational64::new(3, 4),
            Rational64::new(1, 1),
        ]
    };
    let beta = beta_pool[rng.gen_range(0..beta_pool.len())];
    let xi = rng.gen_range(-3..=3i64) as f64;
    let f = FnOnScale::from_expr(random_poly(rng));
    let g = FnOnScale::from_expr(random_poly(rng));
    let window = (a - 2.5, b + 2.5);
    check_integral_laws(&f, &g, &scale, a, b, c, xi, beta, window, params)
}

fn run_case(seed: u64, law_index: usize, case_index: u32, params: &LimitParams) -> LawReport {
    let law_id = LAW_IDS[law_index];
    let mut rng = case_rng(seed, law_index, case_index);
    let outcome = if law_id == "T4-integral" {
        run_integral_case(&mut rng, params)
    } else {
        run_derivative_case(law_id, &mut rng, params)
    };
    match outcome {
        Ok(report) => report,
        // Case errors are recorded as failing cases, never panics.
        Err(e) => LawReport::single(
            law_id,
            f64::INFINITY,
            format!("case {case_index} errored: {e}"),
            SCATTERED_THRESHOLD,
        ),
    }
}

fn merge_reports(law_id: &str, cases: &[LawReport]) -> Vec<LawReport> {
    let mut out = Vec::new();
    for (suffix, threshold) in [
        ("scattered", SCATTERED_THRESHOLD),
        ("dense", DENSE_THRESHOLD),
    ] {
        let regime: Vec<&LawReport> =
            cases.iter().filter(|r| r.threshold == threshold).collect();
        if regime.is_empty() {
            continue;
        }
        let mut merged = LawReport {
            law_id: format!("{law_id}/{suffix}"),
            cases_run: regime.len() as u32,
            max_residual: 0.0,
            worst_case: String::new(),
            passed: true,
            threshold,
        };
        for r in regime {
            if r.max_residual >= merged.max_residual || merged.worst_case.is_empty() {
                merged.max_residual = r.max_residual;
                merged.worst_case = r.worst_case.clone();
            }
            merged.passed &= r.passed;
        }
        out.push(merged);
    }
    out
}

fn suite_from_cases<F>(cases_per_law: u32, run: F) -> Vec<LawReport>
where
    F: Fn(usize, u32) -> LawReport + Send + Sync,
{
    let mut out = Vec::new();
    for (law_index, law_id) in LAW_IDS.iter().enumerate() {
        let cases = collect_cases(cases_per_law, |i| run(law_index, i));
        out.extend(merge_reports(law_id, &cases));
    }
    out
}

#[cfg(feature = "parallel")]
fn collect_cases<F>(n: u32, run: F) -> Vec<LawReport>
where
    F: Fn(u32) -> LawReport + Send + Sync,
{
    use rayon::prelude::*;
    // par_iter + collect preserves index order, so results are deterministic.
    (0..n).into_par_iter().map(run).collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_cases<F>(n: u32, run: F) -> Vec<LawReport>
where
    F: Fn(u32) -> LawReport + Send + Sync,
{
    (0..n).map(run).collect()
}

/// Runs `cases_per_law` randomized cases of every law, aggregated per law
/// and per regime. Deterministic for a fixed seed: each case derives its own
/// generator from (seed, law, case index), so the schedule cannot affect the
/// draws.
pub fn run_randomized_suite(
    seed: u64,
    cases_per_law: u32,
    params: &LimitParams,
) -> Result<Vec<LawReport>> {
    if cases_per_law == 0 {
        return Err(Error::InvalidArgument("cases_per_law must be > 0".into()));
    }
    Ok(suite_from_cases(cases_per_law, |law_index, i| {
        run_case(seed, law_index, i, params)
    }))
}

/// Sequential twin of [`run_randomized_suite`], kept unconditionally for
/// benchmarking the parallel speedup. Produces identical reports.
pub fn run_randomized_suite_seq(
    seed: u64,
    cases_per_law: u32,
    params: &LimitParams,
) -> Result<Vec<LawReport>> {
    if cases_per_law == 0 {
        return Err(Error::InvalidArgument("cases_per_law must be > 0".into()));
    }
    let mut out = Vec::new();
    for (law_index, law_id) in LAW_IDS.iter().enumerate() {
        let cases: Vec<LawReport> = (0..cases_per_law)
            .map(|i| run_case(seed, law_index, i, params))
            .collect();
        out.extend(merge_reports(law_id, &cases));
    }
    Ok(out)
}

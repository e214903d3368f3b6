//! Fractional differentiation on time scales.
//!
//! At a right-scattered point the derivative of order `alpha` is the closed
//! form `(f(sigma(t)) - f(t)) / mu(t)^alpha`. At a right-dense point it is a
//! power-law limit quotient, two-sided when `alpha` is an odd reciprocal
//! `1/q` (the only orders for which `(t - s)^alpha` stays real for `s > t`)
//! and left-sided otherwise.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::number::{approx_eq, tol_at};
use crate::timescale::{Side, TimeScale};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

/// An exact fractional order `alpha = p/q` in lowest terms, `0 < p/q <= 1`.
///
/// Membership in the odd-reciprocal set `{1/q : q odd}` drives the limit
/// regime and is undecidable in floating point, hence the exact fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FractionalOrder {
    p: u64,
    q: u64,
}

impl FractionalOrder {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 || p > q {
            return Err(Error::InvalidOrder(format!(
                "alpha = {p}/{q} must satisfy 0 < p/q <= 1"
            )));
        }
        let g = p.gcd(&q);
        Ok(FractionalOrder { p: p / g, q: q / g })
    }

    pub fn one() -> Self {
        FractionalOrder { p: 1, q: 1 }
    }

    pub fn from_rational(r: Rational64) -> Result<Self> {
        if r.is_negative() || r.is_zero() {
            return Err(Error::InvalidOrder(format!("order {r} must be positive")));
        }
        Self::new(*r.numer() as u64, *r.denom() as u64)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_rational(crate::number::parse_rational(text)?)
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn rational(&self) -> Rational64 {
        Rational64::new(self.p as i64, self.q as i64)
    }

    /// True exactly for `alpha = 1/q` with `q` odd (`alpha = 1` qualifies).
    pub fn odd_reciprocal(&self) -> bool {
        self.p == 1 && self.q % 2 == 1
    }

    pub fn is_one(&self) -> bool {
        self.p == self.q
    }
}

impl std::fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// A nonnegative order `beta = N + alpha` with `N = floor(beta)`.
/// `frac` is `None` when `beta` is an integer (`f^(0) = f`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HigherOrder {
    beta: Rational64,
    n: u32,
    frac: Option<FractionalOrder>,
}

impl HigherOrder {
    pub fn new(beta: Rational64) -> Result<Self> {
        if beta.is_negative() {
            return Err(Error::InvalidOrder(format!("beta {beta} must be >= 0")));
        }
        let n = beta.floor().to_integer();
        let rem = beta - Rational64::from_integer(n);
        let frac = if rem.is_zero() {
            None
        } else {
            Some(FractionalOrder::from_rational(rem)?)
        };
        Ok(HigherOrder { beta, n: n as u32, frac })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(crate::number::parse_rational(text)?)
    }

    pub fn beta(&self) -> Rational64 {
        self.beta
    }

    pub fn integer_part(&self) -> u32 {
        self.n
    }

    pub fn fractional_part(&self) -> Option<FractionalOrder> {
        self.frac
    }
}

/// Signed real power `x^alpha`: the usual power for `x >= 0`, the real odd
/// root (sign-preserving) for `x < 0` with an odd-reciprocal order.
pub fn rpow(x: f64, alpha: FractionalOrder) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.powf(alpha.value()))
    } else if alpha.odd_reciprocal() {
        Ok(-(-x).powf(alpha.value()))
    } else {
        Err(Error::NegativeBaseUndefined(x))
    }
}

/// A real-valued function defined on scale points.
pub trait ScaleFn {
    fn value_at(&self, t: f64) -> Result<f64>;
}

impl<F> ScaleFn for F
where
    F: Fn(f64) -> Result<f64>,
{
    fn value_at(&self, t: f64) -> Result<f64> {
        self(t)
    }
}

/// A function on a scale: expression-backed or a table of ingested samples.
/// Table lookups never interpolate; a missing point is an error.
#[derive(Debug, Clone, PartialEq)]
pub enum FnOnScale {
    ExprBacked(Expr),
    TableBacked(Vec<(f64, f64)>),
}

impl FnOnScale {
    pub fn from_expr(expr: Expr) -> Self {
        FnOnScale::ExprBacked(expr)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(FnOnScale::ExprBacked(crate::expr::parse(text)?))
    }

    /// Builds a table-backed function from (point, value) samples, sorted by
    /// point. Duplicate points with conflicting values are rejected.
    pub fn from_samples(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut rows: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
        for (t, v) in samples {
            if let Some(&(prev_t, prev_v)) = rows.last() {
                if approx_eq(prev_t, t) {
                    if prev_v != v {
                        return Err(Error::DuplicateTimestampConflict(t));
                    }
                    continue;
                }
            }
            rows.push((t, v));
        }
        Ok(FnOnScale::TableBacked(rows))
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            FnOnScale::ExprBacked(e) => Some(e),
            FnOnScale::TableBacked(_) => None,
        }
    }
}

impl std::fmt::Display for FnOnScale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FnOnScale::ExprBacked(e) => write!(f, "{e}"),
            FnOnScale::TableBacked(rows) => write!(f, "table[{} rows]", rows.len()),
        }
    }
}

impl ScaleFn for FnOnScale {
    fn value_at(&self, t: f64) -> Result<f64> {
        match self {
            FnOnScale::ExprBacked(e) => e.eval(t),
            FnOnScale::TableBacked(rows) => {
                let idx = rows.partition_point(|&(key, _)| key < t - tol_at(t));
                rows.get(idx)
                    .filter(|&&(key, _)| approx_eq(key, t))
                    .map(|&(_, v)| v)
                    .ok_or(Error::TablePointMissing(t))
            }
        }
    }
}

/// How a derivative value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedFormScattered,
    TwoSidedLimit,
    LeftLimit,
    SymbolicDelta,
    IdentityOrder,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::ClosedFormScattered => "ClosedFormScattered",
            Method::TwoSidedLimit => "TwoSidedLimit",
            Method::LeftLimit => "LeftLimit",
            Method::SymbolicDelta => "SymbolicDelta",
            Method::IdentityOrder => "IdentityOrder",
        };
        f.write_str(name)
    }
}

/// Value of a fractional derivative evaluation plus how it was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivResult {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub samples_used: u32,
}

impl DerivResult {
    pub(crate) fn exact(value: f64, method: Method) -> Self {
        DerivResult { value, method, error_estimate: 0.0, samples_used: 0 }
    }
}

/// Limit-engine knobs. Defaults: `delta0 = max(|t|,1)/16`, mesh ratio 1/2,
/// 64 samples, relative tolerance 1e-9.
#[derive(Debug, Clone, Copy)]
pub struct LimitParams {
    pub delta0: Option<f64>,
    pub max_samples: usize,
    pub tol: f64,
}

impl Default for LimitParams {
    fn default() -> Self {
        LimitParams { delta0: None, max_samples: 64, tol: 1e-9 }
    }
}

/// Extrapolates the power-law quotient `numerator(s) / (t - s)^alpha` over
/// geometric approach meshes. Two-sided iff `alpha` is an odd reciprocal; a
/// left-scattered `t` contributes no left approach in the two-sided case
/// (the delta-neighborhood intersected with `T` eventually holds only right
/// points), so the right estimate alone is accepted there.
pub fn limit_quotient(
    scale: &TimeScale,
    t: f64,
    numerator: &dyn ScaleFn,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<DerivResult> {
    let delta0 = params.delta0.unwrap_or_else(|| t.abs().max(1.0) / 16.0);
    if alpha.odd_reciprocal() {
        let right = one_sided(scale, t, numerator, alpha, Side::Right, delta0, params)?;
        let left_scattered = scale.rho(t)? < t - tol_at(t);
        if left_scattered {
            return Ok(DerivResult {
                value: right.value,
                method: Method::TwoSidedLimit,
                error_estimate: right.error,
                samples_used: right.samples,
            });
        }
        let left = one_sided(scale, t, numerator, alpha, Side::Left, delta0, params)?;
        let value = 0.5 * (left.value + right.value);
        let gap = (left.value - right.value).abs();
        let allowed = (params.tol * left.value.abs().max(right.value.abs()).max(1.0))
            .max(8.0 * (left.error + right.error));
        if gap > allowed {
            return Err(Error::Divergent {
                t,
                best: value,
                residual: gap,
                samples: left.samples + right.samples,
            });
        }
        Ok(DerivResult {
            value,
            method: Method::TwoSidedLimit,
            error_estimate: left.error.max(right.error).max(0.5 * gap),
            samples_used: left.samples + right.samples,
        })
    } else {
        let left = one_sided(scale, t, numerator, alpha, Side::Left, delta0, params)?;
        Ok(DerivResult {
            value: left.value,
            method: Method::LeftLimit,
            error_estimate: left.error,
            samples_used: left.samples,
        })
    }
}

struct SideEstimate {
    value: f64,
    error: f64,
    samples: u32,
}

fn one_sided(
    scale: &TimeScale,
    t: f64,
    numerator: &dyn ScaleFn,
    alpha: FractionalOrder,
    side: Side,
    delta0: f64,
    params: &LimitParams,
) -> Result<SideEstimate> {
    let points = scale.approach_points_from(t, side, params.max_samples, delta0)?;
    if points.is_empty() {
        return Err(Error::NoApproach(t));
    }
    let mut raw: Vec<f64> = Vec::with_capacity(points.len());
    let mut prev_est: Option<f64> = None;
    let mut streak = 0u32;
    let mut best: Option<SideEstimate> = None;
    for (j, &s) in points.iter().enumerate() {
        let q = numerator.value_at(s)? / rpow(t - s, alpha)?;
        raw.push(q);
        let est = accelerate(&raw);
        if let Some(prev) = prev_est {
            let diff = (est - prev).abs();
            if best.as_ref().map_or(true, |b| diff < b.error) {
                best = Some(SideEstimate {
                    value: est,
                    error: diff,
                    samples: (j + 1) as u32,
                });
            }
            if diff <= params.tol * est.abs().max(1.0) {
                streak += 1;
            } else {
                streak = 0;
            }
            if streak >= 3 {
                return Ok(SideEstimate {
                    value: est,
                    error: diff,
                    samples: (j + 1) as u32,
                });
            }
        }
        prev_est = Some(est);
    }
    // Out of samples. Near the point the numerator cancels catastrophically,
    // so the strict streak can be unreachable even though the extrapolation
    // settled earlier; accept the most stable estimate if its uncertainty is
    // small, and report divergence otherwise.
    match best {
        Some(b) if b.error <= 1e-6 * b.value.abs().max(1.0) => Ok(b),
        _ => Err(Error::Divergent {
            t,
            best: best
                .as_ref()
                .map(|b| b.value)
                .or(prev_est)
                .unwrap_or(f64::NAN),
            residual: best.map_or(f64::INFINITY, |b| b.error),
            samples: raw.len() as u32,
        }),
    }
}

/// Iterated Aitken delta-squared acceleration. On a geometric mesh the
/// quotient error is a sum of geometric terms, which Aitken removes one
/// dominant term per pass. Stops on denominator collapse (already converged).
fn accelerate(raw: &[f64]) -> f64 {
    let mut level: Vec<f64> = raw.to_vec();
    for _ in 0..3 {
        if level.len() < 3 {
            break;
        }
        let mut next = Vec::with_capacity(level.len() - 2);
        let mut ok = true;
        for w in level.windows(3) {
            let (x0, x1, x2) = (w[0], w[1], w[2]);
            let den = x2 - 2.0 * x1 + x0;
            let scale = (x0.abs() + x1.abs() + x2.abs()).max(1e-300);
            if den.abs() <= 4.0 * f64::EPSILON * scale {
                ok = false;
                break;
            }
            let v = x2 - (x2 - x1) * (x2 - x1) / den;
            if !v.is_finite() {
                ok = false;
                break;
            }
            next.push(v);
        }
        if !ok || next.is_empty() {
            break;
        }
        level = next;
    }
    *level.last().unwrap()
}

/// The fractional derivative of Definition 5: closed form at right-scattered
/// points, limit quotient at right-dense points. With `alpha = 1` this is
/// exactly the delta (Hilger) derivative.
pub fn frac_derivative(
    f: &dyn ScaleFn,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<DerivResult> {
    if !scale.contains(t) {
        return Err(Error::PointNotInScale(t));
    }
    if !scale.in_kappa(t)? {
        return Err(Error::NotInKappa(t));
    }
    let sigma = scale.sigma(t)?;
    let mu = sigma - t;
    if mu > tol_at(t) {
        let value = (f.value_at(sigma)? - f.value_at(t)?) / rpow(mu, alpha)?;
        return Ok(DerivResult::exact(value, Method::ClosedFormScattered));
    }
    let ft = f.value_at(t)?;
    let numerator = move |s: f64| Ok(ft - f.value_at(s)?);
    limit_quotient(scale, t, &numerator, alpha, params)
}

/// The delta (Hilger) derivative: order-1 fractional derivative.
pub fn delta_derivative(
    f: &dyn ScaleFn,
    scale: &TimeScale,
    t: f64,
    params: &LimitParams,
) -> Result<DerivResult> {
    frac_derivative(f, scale, t, FractionalOrder::one(), params)
}

fn iterated_delta(f: &dyn ScaleFn, scale: &TimeScale, u: f64, level: u32) -> Result<f64> {
    if level == 0 {
        return f.value_at(u);
    }
    if !scale.in_kappa(u)? {
        return Err(Error::NotInKappa(u));
    }
    let sigma = scale.sigma(u)?;
    let mu = sigma - u;
    if mu <= tol_at(u) {
        return Err(Error::UnsupportedDensePath(u));
    }
    let hi = iterated_delta(f, scale, sigma, level - 1)?;
    let lo = iterated_delta(f, scale, u, level - 1)?;
    Ok((hi - lo) / mu)
}

/// Higher-order derivative `f^(beta) = (f^(delta^N))^(alpha)` with
/// `N = floor(beta)`. Integer `beta` returns `f^(delta^N)(t)` itself under
/// the order-zero-is-identity convention.
pub fn higher_frac_derivative(
    f: &FnOnScale,
    scale: &TimeScale,
    t: f64,
    order: &HigherOrder,
    params: &LimitParams,
) -> Result<DerivResult> {
    let n = order.integer_part();
    if n == 0 {
        return match order.fractional_part() {
            None => Ok(DerivResult::exact(f.value_at(t)?, Method::IdentityOrder)),
            Some(alpha) => frac_derivative(f, scale, t, alpha, params),
        };
    }
    if matches!(scale, TimeScale::Reals) {
        // Every point of R is dense: the only route is the symbolic one.
        let expr = f.as_expr().ok_or(Error::UnsupportedDensePath(t))?;
        let mut g = expr.clone();
        for _ in 0..n {
            g = g.classical_derivative()?;
        }
        let g = FnOnScale::from_expr(g);
        return match order.fractional_part() {
            None => Ok(DerivResult::exact(g.value_at(t)?, Method::SymbolicDelta)),
            Some(alpha) => frac_derivative(&g, scale, t, alpha, params),
        };
    }
    let g = move |u: f64| iterated_delta(f, scale, u, n);
    match order.fractional_part() {
        None => Ok(DerivResult::exact(
            g.value_at(t)?,
            Method::ClosedFormScattered,
        )),
        Some(alpha) => frac_derivative(&g, scale, t, alpha, params),
    }
}

/// Closed-form derivative of `(t - c)^m` (or its reciprocal when `inverted`)
/// for `alpha < 1`:
/// `mu^(1-alpha) * sum_{v=0}^{m-1} (sigma(t)-c)^v (t-c)^(m-1-v)`.
pub fn power_rule_derivative(
    m: u32,
    c: f64,
    inverted: bool,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("power rule requires m >= 1".into()));
    }
    if alpha.is_one() {
        return Err(Error::InvalidOrder(
            "power rules are stated for alpha < 1".into(),
        ));
    }
    if !scale.contains(t) {
        return Err(Error::PointNotInScale(t));
    }
    if !scale.in_kappa(t)? {
        return Err(Error::NotInKappa(t));
    }
    let sigma = scale.sigma(t)?;
    let mu = sigma - t;
    let mu_pow = mu.powf(1.0 - alpha.value());
    if !inverted {
        let mut sum = 0.0;
        for v in 0..m {
            sum += (sigma - c).powi(v as i32) * (t - c).powi((m - 1 - v) as i32);
        }
        Ok(mu_pow * sum)
    } else {
        if ((t - c) * (sigma - c)).abs() <= tol_at(t) * tol_at(c).max(1.0) {
            return Err(Error::SingularPoint(t));
        }
        let mut sum = 0.0;
        for v in 0..m {
            sum += 1.0 / ((sigma - c).powi((m - v) as i32) * (t - c).powi((v + 1) as i32));
        }
        Ok(-mu_pow * sum)
    }
}

/// Mean-value witness of the chain rule: returns `c` in `[t, sigma(t)]` with
/// `(f o g)^(alpha)(t) = f'(g(c)) * g^(alpha)(t)`, found by bisection.
pub fn chain_rule_witness(
    f: &Expr,
    g: &dyn ScaleFn,
    scale: &TimeScale,
    t: f64,
    alpha: FractionalOrder,
    params: &LimitParams,
) -> Result<f64> {
    const WITNESS_TOL: f64 = 1e-9;
    if alpha.is_one() {
        return Err(Error::InvalidOrder("chain rule is stated for alpha < 1".into()));
    }
    let g_alpha = frac_derivative(g, scale, t, alpha, params)?.value;
    let composite = move |u: f64| f.eval(g.value_at(u)?);
    let target = frac_derivative(&composite, scale, t, alpha, params)?.value;
    let sigma = scale.sigma(t)?;
    if target.abs() <= WITNESS_TOL && g_alpha.abs() <= WITNESS_TOL {
        return Ok(t);
    }
    if sigma <= t + tol_at(t) {
        // Dense point: the mean-value points collapse onto t itself.
        return Ok(t);
    }
    let fprime = f.classical_derivative()?;
    let residual = |c: f64| -> Result<f64> { Ok(fprime.eval(g.value_at(c)?)? * g_alpha - target) };

    let mut lo = t;
    let mut hi = sigma;
    let mut r_lo = residual(lo)?;
    let r_hi = residual(hi)?;
    if r_lo.abs() <= WITNESS_TOL {
        return Ok(lo);
    }
    if r_hi.abs() <= WITNESS_TOL {
        return Ok(hi);
    }
    if r_lo * r_hi > 0.0 {
        // No endpoint sign change: scan for an interior crossing.
        let n = 128;
        let mut found = false;
        let mut prev = (lo, r_lo);
        for i in 1..=n {
            let c = t + (sigma - t) * i as f64 / n as f64;
            let rc = residual(c)?;
            if rc.abs() <= WITNESS_TOL {
                return Ok(c);
            }
            if prev.1 * rc < 0.0 {
                lo = prev.0;
                r_lo = prev.1;
                hi = c;
                found = true;
                break;
            }
            prev = (c, rc);
        }
        if !found {
            return Err(Error::HypothesisViolated { lo: t, hi: sigma });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let rm = residual(mid)?;
        if rm.abs() <= WITNESS_TOL {
            return Ok(mid);
        }
        if rm * r_lo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            r_lo = rm;
        }
        if hi - lo <= f64::EPSILON * sigma.abs().max(1.0) {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    if residual(mid)?.abs() <= 1e-6 {
        Ok(mid)
    } else {
        Err(Error::HypothesisViolated { lo: t, hi: sigma })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr;
    use crate::timescale::Component;

    fn params() -> LimitParams {
        LimitParams::default()
    }

    fn order(p: u64, q: u64) -> FractionalOrder {
        FractionalOrder::new(p, q).unwrap()
    }

    #[test]
    fn fractional_order_classification() {
        assert!(order(1, 3).odd_reciprocal());
        assert!(order(1, 1).odd_reciprocal());
        assert!(!order(1, 2).odd_reciprocal());
        assert!(!order(2, 3).odd_reciprocal());
        // 2/6 reduces to 1/3
        assert!(order(2, 6).odd_reciprocal());
        assert!(FractionalOrder::new(3, 2).is_err());
        assert!(FractionalOrder::new(0, 5).is_err());
    }

    #[test]
    fn rpow_examples() {
        assert!(approx_eq(rpow(8.0, order(1, 3)).unwrap(), 2.0));
        assert!(approx_eq(rpow(-8.0, order(1, 3)).unwrap(), -2.0));
        assert!(matches!(
            rpow(-4.0, order(1, 2)),
            Err(Error::NegativeBaseUndefined(_))
        ));
    }

    #[test]
    fn limit_quotient_cube_root() {
        // Oracle: the quotient (0 - s^(1/3)) / (0 - s)^(1/3) is identically 1.
        let cube_root = expr::parse("t^(1/3)").unwrap();
        for j in 1..=20 {
            for sign in [-1.0, 1.0] {
                let s = sign * 4f64.powi(-j);
                let q = (0.0 - cube_root.eval(s).unwrap())
                    / rpow(0.0 - s, order(1, 3)).unwrap();
                assert!(approx_eq(q, 1.0));
            }
        }
        let f = FnOnScale::parse("t^(1/3)").unwrap();
        let numerator =
            move |s: f64| Ok(f.value_at(0.0)? - f.value_at(s)?);
        let result =
            limit_quotient(&TimeScale::Reals, 0.0, &numerator, order(1, 3), &params()).unwrap();
        assert!((result.value - 1.0).abs() <= 1e-6);
        assert_eq!(result.method, Method::TwoSidedLimit);
    }

    #[test]
    fn limit_quotient_zero_numerator() {
        let zero = |_s: f64| Ok(0.0);
        let result =
            limit_quotient(&TimeScale::Reals, 2.0, &zero, order(1, 2), &params()).unwrap();
        assert_eq!(result.value, 0.0);
        assert_eq!(result.method, Method::LeftLimit);
    }

    #[test]
    fn limit_quotient_single_left_point_diverges() {
        let scale =
            TimeScale::finite_union(vec![Component::Point(0.0), Component::Interval(1.0, 2.0)])
                .unwrap();
        // s = 0 exists, so NoApproach is not raised; one sample cannot converge.
        let f = |s: f64| Ok(1.0 - s);
        let result = limit_quotient(&scale, 1.0, &f, order(1, 2), &params());
        assert!(matches!(result, Err(Error::Divergent { .. })), "{result:?}");
    }

    #[test]
    fn frac_derivative_square_on_integers() {
        // (mu(t))^(1-alpha) [sigma(t) + t] at t=4 on Z with alpha=1/2 is 9.
        let f = FnOnScale::parse("t^2").unwrap();
        let r = frac_derivative(&f, &TimeScale::integers(), 4.0, order(1, 2), &params()).unwrap();
        assert_eq!(r.value, 9.0);
        assert_eq!(r.method, Method::ClosedFormScattered);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn frac_derivative_constant_is_zero() {
        let f = FnOnScale::parse("7").unwrap();
        for scale in [TimeScale::integers(), TimeScale::Reals, TimeScale::cantor(2).unwrap()] {
            let t = if matches!(scale, TimeScale::CantorApprox(_)) { 1.0 / 3.0 } else { 2.0 };
            let r = frac_derivative(&f, &scale, t, order(1, 3), &params()).unwrap();
            assert!(r.value.abs() <= 1e-9, "{scale:?} gave {}", r.value);
        }
    }

    #[test]
    fn frac_derivative_identity_on_cantor() {
        let f = FnOnScale::parse("t").unwrap();
        let cantor = TimeScale::cantor(3).unwrap();
        for alpha in [order(1, 3), order(1, 2), order(3, 4)] {
            let r = frac_derivative(&f, &cantor, 1.0 / 3.0, alpha, &params()).unwrap();
            let expected = (1.0f64 / 3.0).powf(1.0 - alpha.value());
            assert!(approx_eq(r.value, expected));
        }
    }

    #[test]
    fn frac_derivative_kolwankar_gangal() {
        let f = FnOnScale::parse("t^(1/3)").unwrap();
        let r = frac_derivative(&f, &TimeScale::Reals, 0.0, order(1, 3), &params()).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn frac_derivative_not_in_kappa() {
        let scale =
            TimeScale::finite_union(vec![Component::Interval(0.0, 1.0), Component::Point(2.0)])
                .unwrap();
        let f = FnOnScale::parse("t").unwrap();
        assert!(matches!(
            frac_derivative(&f, &scale, 2.0, order(1, 2), &params()),
            Err(Error::NotInKappa(_))
        ));
    }

    #[test]
    fn delta_derivative_examples() {
        let f = FnOnScale::parse("t^2").unwrap();
        // Oracle: forward difference 25 - 16.
        let r = delta_derivative(&f, &TimeScale::integers(), 4.0, &params()).unwrap();
        assert_eq!(r.value, 9.0);
        let r = delta_derivative(&f, &TimeScale::Reals, 3.0, &params()).unwrap();
        assert!((r.value - 6.0).abs() <= 1e-6);
        let id = FnOnScale::parse("t").unwrap();
        for scale in [TimeScale::integers(), TimeScale::Reals] {
            let r = delta_derivative(&id, &scale, 2.0, &params()).unwrap();
            assert!((r.value - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn higher_order_grid_example() {
        // f(t) = t^2 on hZ with beta = 1.3 gives 2 h^0.7 at every point.
        let f = FnOnScale::parse("t^2").unwrap();
        let beta = HigherOrder::parse("1.3").unwrap();
        for h in [0.5, 1.0, 2.0] {
            let scale = TimeScale::uniform_grid(h, 0.0).unwrap();
            for t in [0.0, 3.0 * h] {
                let r = higher_frac_derivative(&f, &scale, t, &beta, &params()).unwrap();
                let expected = 2.0 * h.powf(0.7);
                assert!(
                    (r.value - expected).abs() <= 1e-12 * expected.abs(),
                    "h={h} t={t}: {} vs {}",
                    r.value,
                    expected
                );
            }
        }
    }

    #[test]
    fn higher_order_constant_and_integer_beta() {
        let c = FnOnScale::parse("5").unwrap();
        for beta in ["1/2", "1", "2.5", "3"] {
            let beta = HigherOrder::parse(beta).unwrap();
            let r =
                higher_frac_derivative(&c, &TimeScale::integers(), 4.0, &beta, &params()).unwrap();
            assert_eq!(r.value, 0.0);
        }
        // Oracle: Delta(t^2) on Z is the forward difference 2t + 1.
        let f = FnOnScale::parse("t^2").unwrap();
        let beta = HigherOrder::parse("1").unwrap();
        for t in [-2.0, 0.0, 3.0, 7.0] {
            let r =
                higher_frac_derivative(&f, &TimeScale::integers(), t, &beta, &params()).unwrap();
            assert_eq!(r.value, 2.0 * t + 1.0);
        }
        let zero = HigherOrder::parse("0").unwrap();
        let r = higher_frac_derivative(&f, &TimeScale::integers(), 4.0, &zero, &params()).unwrap();
        assert_eq!(r.value, 16.0);
        assert_eq!(r.method, Method::IdentityOrder);
    }

    #[test]
    fn higher_order_dense_paths() {
        let f = FnOnScale::parse("t^2").unwrap();
        let beta = HigherOrder::parse("2").unwrap();
        let r = higher_frac_derivative(&f, &TimeScale::Reals, 1.5, &beta, &params()).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.method, Method::SymbolicDelta);
        let table = FnOnScale::from_samples(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!(matches!(
            higher_frac_derivative(&table, &TimeScale::Reals, 0.5, &beta, &params()),
            Err(Error::UnsupportedDensePath(_))
        ));
    }

    #[test]
    fn power_rule_examples() {
        let z = TimeScale::integers();
        assert_eq!(
            power_rule_derivative(2, 0.0, false, &z, 4.0, order(1, 2)).unwrap(),
            9.0
        );
        // Example: -(mu)^(1-alpha) / (t sigma(t)) = -1/6 at t=2 on Z.
        let inv = power_rule_derivative(1, 0.0, true, &z, 2.0, order(1, 2)).unwrap();
        assert!(approx_eq(inv, -1.0 / 6.0));
        // Dense points vanish: mu^(1-alpha) = 0.
        assert_eq!(
            power_rule_derivative(3, 0.0, false, &TimeScale::Reals, 1.7, order(1, 2)).unwrap(),
            0.0
        );
        assert!(matches!(
            power_rule_derivative(1, 2.0, true, &z, 2.0, order(1, 2)),
            Err(Error::SingularPoint(_))
        ));
        assert!(power_rule_derivative(2, 0.0, false, &z, 4.0, order(1, 1)).is_err());
    }

    #[test]
    fn power_rule_matches_frac_derivative() {
        // frac_derivative of the parsed (t - c)^m agrees with the closed form.
        let z = TimeScale::integers();
        let grid = TimeScale::uniform_grid(0.5, 0.0).unwrap();
        for m in 1..=5u32 {
            for (scale, t) in [(&z, 3.0), (&grid, 2.5)] {
                for c in [0.0, 1.5] {
                    let text = format!("(t - {c})^{m}");
                    let f = FnOnScale::parse(&text).unwrap();
                    let alpha = order(1, 2);
                    let closed = power_rule_derivative(m, c, false, scale, t, alpha).unwrap();
                    let direct = frac_derivative(&f, scale, t, alpha, &params()).unwrap();
                    assert!(
                        (closed - direct.value).abs() <= 1e-12 * closed.abs().max(1.0),
                        "m={m} c={c}: {closed} vs {}",
                        direct.value
                    );
                }
            }
        }
    }

    #[test]
    fn chain_rule_paper_example() {
        // f(t) = t^2, g(t) = 2t on Z at t = 4: c = 9/2 for any alpha < 1.
        let f = expr::parse("t^2").unwrap();
        let g = FnOnScale::parse("2*t").unwrap();
        for alpha in [order(1, 3), order(1, 2)] {
            let c = chain_rule_witness(&f, &g, &TimeScale::integers(), 4.0, alpha, &params())
                .unwrap();
            assert!((c - 4.5).abs() <= 1e-9, "alpha={alpha}: c={c}");
        }
    }

    #[test]
    fn chain_rule_constant_inner() {
        let f = expr::parse("t^3").unwrap();
        let g = FnOnScale::parse("5").unwrap();
        let c =
            chain_rule_witness(&f, &g, &TimeScale::integers(), 2.0, order(1, 2), &params())
                .unwrap();
        assert_eq!(c, 2.0);
    }

    #[test]
    fn chain_rule_cubic_witness() {
        // Oracle: scattered closed forms on Z give (f o g)^(1/2)(1) = 7 and
        // g^(1/2)(1) = 1, so the witness solves 3c^2 = 7.
        let f = expr::parse("t^3").unwrap();
        let g = FnOnScale::parse("t").unwrap();
        let c =
            chain_rule_witness(&f, &g, &TimeScale::integers(), 1.0, order(1, 2), &params())
                .unwrap();
        assert!((c - (7.0f64 / 3.0).sqrt()).abs() <= 1e-7, "c={c}");
        assert!((1.0..=2.0).contains(&c));
    }

    #[test]
    fn table_backed_lookup() {
        let table = FnOnScale::from_samples(vec![(0.0, 1.0), (0.5, 2.0), (1.7, 4.0)]).unwrap();
        assert_eq!(table.value_at(0.5).unwrap(), 2.0);
        assert!(matches!(
            table.value_at(0.25),
            Err(Error::TablePointMissing(_))
        ));
        assert!(matches!(
            FnOnScale::from_samples(vec![(1.0, 5.0), (1.0, 6.0)]),
            Err(Error::DuplicateTimestampConflict(_))
        ));
    }

    #[test]
    fn simple_useful_formula_at_scattered_points() {
        // f(sigma(t)) = f(t) + mu^alpha f^(alpha)(t)
        let f = FnOnScale::parse("t^3 - 2*t").unwrap();
        let scale = TimeScale::uniform_grid(0.5, 0.25).unwrap();
        for t in [0.25, 1.25, -2.75] {
            for alpha in [order(1, 2), order(1, 3), order(1, 1)] {
                let d = frac_derivative(&f, &scale, t, alpha, &params()).unwrap();
                let sigma = scale.sigma(t).unwrap();
                let mu = sigma - t;
                let lhs = f.value_at(sigma).unwrap();
                let rhs = f.value_at(t).unwrap() + mu.powf(alpha.value()) * d.value;
                assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
            }
        }
    }
}

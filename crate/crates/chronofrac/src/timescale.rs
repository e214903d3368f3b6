//! Time scales: represented closed subsets of the reals with exact jump
//! operators, graininess, and point classification.
//!
//! A scale is either fully enumerable (`FiniteUnion`) or parametric with
//! closed-form jump operators (`UniformGrid`, `Reals`, `CantorApprox`).
//! `CantorApprox(d)` stands in for the true Cantor set: it is the union of
//! the `2^d` closed intervals of the depth-`d` construction on `[0, 1]`,
//! and points interior to a depth-`d` interval are treated as dense.

use crate::error::{Error, Result};
use crate::number::{approx_eq, parse_real, rat_to_f64, tol_at};
use num_rational::Rational64;

/// Maximum Cantor depth: `3^d` must stay an exact `i64` rational denominator.
pub const MAX_CANTOR_DEPTH: u32 = 32;

/// One piece of a `FiniteUnion` scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    /// Closed interval `[a, b]` with `a < b`.
    Interval(f64, f64),
    /// A single isolated point.
    Point(f64),
}

impl Component {
    pub fn lo(&self) -> f64 {
        match *self {
            Component::Interval(a, _) => a,
            Component::Point(p) => p,
        }
    }

    pub fn hi(&self) -> f64 {
        match *self {
            Component::Interval(_, b) => b,
            Component::Point(p) => p,
        }
    }
}

/// A represented nonempty closed subset of the reals.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeScale {
    FiniteUnion(Vec<Component>),
    UniformGrid { step: f64, anchor: f64 },
    Reals,
    CantorApprox(u32),
}

/// Scattering flags of a scale point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClass {
    pub right_scattered: bool,
    pub left_scattered: bool,
    pub is_min: bool,
    pub is_max: bool,
}

impl PointClass {
    pub fn is_isolated(&self) -> bool {
        self.right_scattered && self.left_scattered
    }

    pub fn right_dense(&self) -> bool {
        !self.right_scattered && !self.is_max
    }
}

/// Which side of `t` approach points are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A maximal run of scale points inside a window: `lo == hi` is an isolated
/// point, `lo < hi` a dense closed interval. Consecutive segments are
/// separated by positive gaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

impl TimeScale {
    /// Builds a finite union, sorting components, merging any that touch or
    /// overlap, and rejecting empty input or inverted intervals.
    pub fn finite_union(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidScale("finite union must be nonempty".into()));
        }
        for c in &components {
            if let Component::Interval(a, b) = c {
                if !(a < b) {
                    return Err(Error::InvalidScale(format!(
                        "interval [{a}, {b}] requires a < b"
                    )));
                }
            }
            if !c.lo().is_finite() || !c.hi().is_finite() {
                return Err(Error::InvalidScale("non-finite component endpoint".into()));
            }
        }
        let mut sorted = components;
        sorted.sort_by(|x, y| x.lo().partial_cmp(&y.lo()).unwrap());
        let mut merged: Vec<Component> = Vec::with_capacity(sorted.len());
        for c in sorted {
            match merged.last_mut() {
                Some(last) if c.lo() <= last.hi() + tol_at(last.hi()) => {
                    let lo = last.lo();
                    let hi = last.hi().max(c.hi());
                    *last = if hi > lo {
                        Component::Interval(lo, hi)
                    } else {
                        Component::Point(lo)
                    };
                }
                _ => merged.push(c),
            }
        }
        Ok(TimeScale::FiniteUnion(merged))
    }

    pub fn uniform_grid(step: f64, anchor: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !anchor.is_finite() {
            return Err(Error::InvalidScale(format!("grid step {step} must be > 0")));
        }
        Ok(TimeScale::UniformGrid { step, anchor })
    }

    /// The integers, as the unit grid anchored at zero.
    pub fn integers() -> Self {
        TimeScale::UniformGrid { step: 1.0, anchor: 0.0 }
    }

    pub fn reals() -> Self {
        TimeScale::Reals
    }

    pub fn cantor(depth: u32) -> Result<Self> {
        if depth > MAX_CANTOR_DEPTH {
            return Err(Error::InvalidScale(format!(
                "cantor depth {depth} exceeds maximum {MAX_CANTOR_DEPTH}"
            )));
        }
        Ok(TimeScale::CantorApprox(depth))
    }

    pub fn contains(&self, t: f64) -> bool {
        if !t.is_finite() {
            return false;
        }
        match self {
            TimeScale::Reals => true,
            TimeScale::UniformGrid { step, anchor } => {
                let k = (t - anchor) / step;
                (k - k.round()).abs() <= 1e-12 * k.abs().max(1.0)
            }
            TimeScale::FiniteUnion(comps) => self.find_component(comps, t).is_some(),
            TimeScale::CantorApprox(depth) => cantor_locate(*depth, t).is_ok(),
        }
    }

    /// Forward jump operator: `inf { s in T : s > t }`, with `sigma(max T) = max T`.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        match self {
            TimeScale::Reals => {
                self.require_member(t)?;
                Ok(t)
            }
            TimeScale::UniformGrid { step, anchor } => {
                let k = self.grid_index(t)?;
                Ok(anchor + (k + 1.0) * step)
            }
            TimeScale::FiniteUnion(comps) => {
                let idx = self
                    .find_component(comps, t)
                    .ok_or(Error::PointNotInScale(t))?;
                let c = comps[idx];
                if matches!(c, Component::Interval(_, b) if t < b - tol_at(b)) {
                    Ok(t)
                } else if idx + 1 < comps.len() {
                    Ok(comps[idx + 1].lo())
                } else {
                    Ok(c.hi())
                }
            }
            TimeScale::CantorApprox(depth) => {
                let loc = cantor_locate(*depth, t)?;
                if approx_eq(t, rat_to_f64(loc.hi)) {
                    Ok(loc.succ.map(rat_to_f64).unwrap_or_else(|| rat_to_f64(loc.hi)))
                } else {
                    Ok(t)
                }
            }
        }
    }

    /// Backward jump operator: `sup { s in T : s < t }`, with `rho(min T) = min T`.
    pub fn rho(&self, t: f64) -> Result<f64> {
        match self {
            TimeScale::Reals => {
                self.require_member(t)?;
                Ok(t)
            }
            TimeScale::UniformGrid { step, anchor } => {
                let k = self.grid_index(t)?;
                Ok(anchor + (k - 1.0) * step)
            }
            TimeScale::FiniteUnion(comps) => {
                let idx = self
                    .find_component(comps, t)
                    .ok_or(Error::PointNotInScale(t))?;
                let c = comps[idx];
                if matches!(c, Component::Interval(a, _) if t > a + tol_at(a)) {
                    Ok(t)
                } else if idx > 0 {
                    Ok(comps[idx - 1].hi())
                } else {
                    Ok(c.lo())
                }
            }
            TimeScale::CantorApprox(depth) => {
                let loc = cantor_locate(*depth, t)?;
                if approx_eq(t, rat_to_f64(loc.lo)) {
                    Ok(loc.pred.map(rat_to_f64).unwrap_or_else(|| rat_to_f64(loc.lo)))
                } else {
                    Ok(t)
                }
            }
        }
    }

    /// Graininess `mu(t) = sigma(t) - t`.
    pub fn graininess(&self, t: f64) -> Result<f64> {
        Ok(self.sigma(t)? - t)
    }

    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let sigma = self.sigma(t)?;
        let rho = self.rho(t)?;
        Ok(PointClass {
            right_scattered: sigma > t + tol_at(t),
            left_scattered: rho < t - tol_at(t),
            is_min: self.min().map_or(false, |m| approx_eq(m, t)),
            is_max: self.max().map_or(false, |m| approx_eq(m, t)),
        })
    }

    /// Membership in `T^kappa`: false exactly at a left-scattered maximum.
    pub fn in_kappa(&self, t: f64) -> Result<bool> {
        let class = self.classify(t)?;
        Ok(!(class.is_max && class.left_scattered))
    }

    pub fn min(&self) -> Option<f64> {
        match self {
            TimeScale::FiniteUnion(comps) => Some(comps[0].lo()),
            TimeScale::CantorApprox(_) => Some(0.0),
            _ => None,
        }
    }

    pub fn max(&self) -> Option<f64> {
        match self {
            TimeScale::FiniteUnion(comps) => Some(comps[comps.len() - 1].hi()),
            TimeScale::CantorApprox(_) => Some(1.0),
            _ => None,
        }
    }

    /// Largest scale point `<= c`, if any.
    pub fn project_left(&self, c: f64) -> Option<f64> {
        match self {
            TimeScale::Reals => Some(c),
            TimeScale::UniformGrid { step, anchor } => {
                let k = (c - anchor) / step;
                let snapped = if (k - k.round()).abs() <= 1e-9 * k.abs().max(1.0) {
                    k.round()
                } else {
                    k.floor()
                };
                Some(anchor + snapped * step)
            }
            TimeScale::FiniteUnion(comps) => {
                let idx = comps.partition_point(|comp| comp.lo() <= c + tol_at(c));
                if idx == 0 {
                    return None;
                }
                let comp = comps[idx - 1];
                Some(if c >= comp.hi() { comp.hi() } else { c })
            }
            TimeScale::CantorApprox(depth) => cantor_project_left(*depth, c),
        }
    }

    /// Smallest scale point `>= c`, if any.
    pub fn project_right(&self, c: f64) -> Option<f64> {
        match self {
            TimeScale::Reals => Some(c),
            TimeScale::UniformGrid { step, anchor } => {
                let k = (c - anchor) / step;
                let snapped = if (k - k.round()).abs() <= 1e-9 * k.abs().max(1.0) {
                    k.round()
                } else {
                    k.ceil()
                };
                Some(anchor + snapped * step)
            }
            TimeScale::FiniteUnion(comps) => {
                for comp in comps {
                    if c <= comp.lo() {
                        return Some(comp.lo());
                    }
                    if c <= comp.hi() {
                        return Some(c);
                    }
                }
                None
            }
            TimeScale::CantorApprox(depth) => cantor_project_right(*depth, c),
        }
    }

    /// Up to `k` scale points approaching `t` from the given side: target
    /// offsets `delta0 * 2^-j` projected onto the scale, deduplicated so the
    /// distances are strictly decreasing. An empty result means no approach
    /// exists on that side.
    pub fn approach_points(&self, t: f64, side: Side, k: usize) -> Result<Vec<f64>> {
        self.approach_points_from(t, side, k, t.abs().max(1.0) / 16.0)
    }

    pub fn approach_points_from(
        &self,
        t: f64,
        side: Side,
        k: usize,
        delta0: f64,
    ) -> Result<Vec<f64>> {
        self.require_member(t)?;
        let mut out: Vec<f64> = Vec::new();
        let mut delta = delta0;
        let floor = f64::EPSILON * t.abs().max(1.0) * 4.0;
        while out.len() < k && delta > floor {
            let projected = match side {
                Side::Left => self.project_left(t - delta).filter(|&s| s < t - tol_at(t)),
                Side::Right => self.project_right(t + delta).filter(|&s| s > t + tol_at(t)),
            };
            if let Some(s) = projected {
                let closer = out
                    .last()
                    .map_or(true, |&prev| (s - t).abs() < (prev - t).abs());
                if closer {
                    out.push(s);
                }
            }
            delta *= 0.5;
        }
        Ok(out)
    }

    /// Decomposes `T` intersected with `[w_lo, w_hi]` into maximal segments.
    pub fn segments_in_window(&self, w_lo: f64, w_hi: f64) -> Result<Vec<Segment>> {
        if !(w_lo <= w_hi) {
            return Err(Error::WindowEmpty(w_lo, w_hi));
        }
        let segments: Vec<Segment> = match self {
            TimeScale::Reals => vec![Segment { lo: w_lo, hi: w_hi }],
            TimeScale::UniformGrid { step, anchor } => {
                let k_lo = ((w_lo - anchor) / step - 1e-9).ceil();
                let k_hi = ((w_hi - anchor) / step + 1e-9).floor();
                let count = (k_hi - k_lo + 1.0).max(0.0);
                if count > 2_000_000.0 {
                    return Err(Error::InvalidArgument(format!(
                        "window [{w_lo}, {w_hi}] enumerates {count} grid points"
                    )));
                }
                (0..count as i64)
                    .map(|i| {
                        let p = anchor + (k_lo + i as f64) * step;
                        Segment { lo: p, hi: p }
                    })
                    .collect()
            }
            TimeScale::FiniteUnion(comps) => comps
                .iter()
                .filter(|c| c.hi() >= w_lo - tol_at(w_lo) && c.lo() <= w_hi + tol_at(w_hi))
                .map(|c| Segment {
                    lo: c.lo().max(w_lo),
                    hi: c.hi().min(w_hi),
                })
                .collect(),
            TimeScale::CantorApprox(depth) => {
                let mut segs = Vec::new();
                collect_cantor_segments(
                    *depth,
                    Rational64::from_integer(0),
                    Rational64::from_integer(1),
                    w_lo,
                    w_hi,
                    &mut segs,
                );
                segs
            }
        };
        if segments.is_empty() {
            return Err(Error::WindowEmpty(w_lo, w_hi));
        }
        Ok(segments)
    }

    fn require_member(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::PointNotInScale(t))
        }
    }

    fn grid_index(&self, t: f64) -> Result<f64> {
        if let TimeScale::UniformGrid { step, anchor } = self {
            let k = (t - anchor) / step;
            if (k - k.round()).abs() <= 1e-12 * k.abs().max(1.0) {
                return Ok(k.round());
            }
        }
        Err(Error::PointNotInScale(t))
    }

    fn find_component(&self, comps: &[Component], t: f64) -> Option<usize> {
        let idx = comps.partition_point(|c| c.lo() <= t + tol_at(t));
        if idx == 0 {
            return None;
        }
        let c = comps[idx - 1];
        (t <= c.hi() + tol_at(c.hi())).then_some(idx - 1)
    }
}

struct CantorLoc {
    lo: Rational64,
    hi: Rational64,
    pred: Option<Rational64>,
    succ: Option<Rational64>,
}

/// Descends the Cantor construction to the depth-`d` interval containing `t`,
/// carrying the nearest gap endpoints on either side. Endpoint arithmetic is
/// exact (denominators divide `3^d`).
fn cantor_locate(depth: u32, t: f64) -> Result<CantorLoc> {
    let mut lo = Rational64::from_integer(0);
    let mut hi = Rational64::from_integer(1);
    let tol = tol_at(1.0);
    if t < -tol || t > 1.0 + tol {
        return Err(Error::PointNotInScale(t));
    }
    let mut pred = None;
    let mut succ = None;
    for _ in 0..depth {
        let third = (hi - lo) / Rational64::from_integer(3);
        let left_hi = lo + third;
        let right_lo = hi - third;
        if t <= rat_to_f64(left_hi) + tol {
            succ = Some(right_lo);
            hi = left_hi;
        } else if t >= rat_to_f64(right_lo) - tol {
            pred = Some(left_hi);
            lo = right_lo;
        } else {
            return Err(Error::PointNotInScale(t));
        }
    }
    Ok(CantorLoc { lo, hi, pred, succ })
}

fn cantor_project_left(depth: u32, c: f64) -> Option<f64> {
    let tol = tol_at(1.0);
    if c < -tol {
        return None;
    }
    if c >= 1.0 {
        return Some(1.0);
    }
    let mut lo = Rational64::from_integer(0);
    let mut hi = Rational64::from_integer(1);
    for _ in 0..depth {
        let third = (hi - lo) / Rational64::from_integer(3);
        let left_hi = lo + third;
        let right_lo = hi - third;
        if c >= rat_to_f64(right_lo) {
            lo = right_lo;
        } else if c >= rat_to_f64(left_hi) {
            return Some(rat_to_f64(left_hi));
        } else {
            hi = left_hi;
        }
    }
    Some(c.max(rat_to_f64(lo)))
}

fn cantor_project_right(depth: u32, c: f64) -> Option<f64> {
    let tol = tol_at(1.0);
    if c > 1.0 + tol {
        return None;
    }
    if c <= 0.0 {
        return Some(0.0);
    }
    let mut lo = Rational64::from_integer(0);
    let mut hi = Rational64::from_integer(1);
    for _ in 0..depth {
        let third = (hi - lo) / Rational64::from_integer(3);
        let left_hi = lo + third;
        let right_lo = hi - third;
        if c <= rat_to_f64(left_hi) {
            hi = left_hi;
        } else if c <= rat_to_f64(right_lo) {
            return Some(rat_to_f64(right_lo));
        } else {
            lo = right_lo;
        }
    }
    Some(c.min(rat_to_f64(hi)))
}

fn collect_cantor_segments(
    depth: u32,
    lo: Rational64,
    hi: Rational64,
    w_lo: f64,
    w_hi: f64,
    out: &mut Vec<Segment>,
) {
    let lo_f = rat_to_f64(lo);
    let hi_f = rat_to_f64(hi);
    if hi_f < w_lo - tol_at(w_lo) || lo_f > w_hi + tol_at(w_hi) {
        return;
    }
    if depth == 0 {
        out.push(Segment {
            lo: lo_f.max(w_lo),
            hi: hi_f.min(w_hi),
        });
        return;
    }
    let third = (hi - lo) / Rational64::from_integer(3);
    collect_cantor_segments(depth - 1, lo, lo + third, w_lo, w_hi, out);
    collect_cantor_segments(depth - 1, hi - third, hi, w_lo, w_hi, out);
}

impl std::fmt::Display for TimeScale {
    /// Prints the scale in the same DSL accepted by `FromStr`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeScale::Reals => f.write_str("R"),
            TimeScale::UniformGrid { step, anchor } => {
                if *anchor == 0.0 {
                    write!(f, "hZ:{step}")
                } else {
                    write!(f, "hZ:{step}@{anchor}")
                }
            }
            TimeScale::CantorApprox(depth) => write!(f, "cantor:{depth}"),
            TimeScale::FiniteUnion(comps) => {
                f.write_str("union:{")?;
                for (i, c) in comps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match c {
                        Component::Interval(a, b) => write!(f, "[{a},{b}]")?,
                        Component::Point(p) => write!(f, "{{{p}}}")?,
                    }
                }
                f.write_str("}")
            }
        }
    }
}

impl std::str::FromStr for TimeScale {
    type Err = Error;

    /// Scale DSL: `R` | `R[a,b]` | `Z` | `hZ:<h>` | `hZ:<h>@<anchor>` |
    /// `cantor:<d>` | `union:{<comp>,...}` with comp `[a,b]` or `{p}`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "R" {
            return Ok(TimeScale::Reals);
        }
        if text == "Z" {
            return Ok(TimeScale::integers());
        }
        if let Some(body) = text.strip_prefix("R[").and_then(|s| s.strip_suffix(']')) {
            let (a, b) = split_pair(body, text)?;
            return TimeScale::finite_union(vec![Component::Interval(a, b)]);
        }
        if let Some(rest) = text.strip_prefix("hZ:") {
            let (step, anchor) = match rest.split_once('@') {
                Some((h, a)) => (parse_real(h)?, parse_real(a)?),
                None => (parse_real(rest)?, 0.0),
            };
            return TimeScale::uniform_grid(step, anchor);
        }
        if let Some(rest) = text.strip_prefix("cantor:") {
            let depth: u32 = rest
                .trim()
                .parse()
                .map_err(|_| Error::InvalidScale(format!("bad cantor depth `{rest}`")))?;
            return TimeScale::cantor(depth);
        }
        if let Some(body) = text
            .strip_prefix("union:{")
            .and_then(|s| s.strip_suffix('}'))
        {
            return TimeScale::finite_union(parse_union_components(body)?);
        }
        Err(Error::InvalidScale(format!("unrecognized scale `{text}`")))
    }
}

fn split_pair(body: &str, whole: &str) -> Result<(f64, f64)> {
    let (a, b) = body
        .split_once(',')
        .ok_or_else(|| Error::InvalidScale(format!("expected `a,b` in `{whole}`")))?;
    Ok((parse_real(a)?, parse_real(b)?))
}

fn parse_union_components(body: &str) -> Result<Vec<Component>> {
    let mut comps = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(',').trim();
        if rest.is_empty() {
            break;
        }
        if let Some(after) = rest.strip_prefix('[') {
            let end = after
                .find(']')
                .ok_or_else(|| Error::InvalidScale(format!("unterminated `[` in `{body}`")))?;
            let (a, b) = split_pair(&after[..end], body)?;
            comps.push(Component::Interval(a, b));
            rest = &after[end + 1..];
        } else if let Some(after) = rest.strip_prefix('{') {
            let end = after
                .find('}')
                .ok_or_else(|| Error::InvalidScale(format!("unterminated `{{` in `{body}`")))?;
            comps.push(Component::Point(parse_real(&after[..end])?));
            rest = &after[end + 1..];
        } else {
            return Err(Error::InvalidScale(format!(
                "expected `[a,b]` or `{{p}}` at `{rest}`"
            )));
        }
    }
    TimeScale::finite_union(comps).map(|ts| match ts {
        TimeScale::FiniteUnion(c) => c,
        _ => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn union_01_2() -> TimeScale {
        TimeScale::finite_union(vec![
            Component::Interval(0.0, 1.0),
            Component::Point(2.0),
        ])
        .unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(TimeScale::integers().sigma(4.0).unwrap(), 5.0);
        let cantor = TimeScale::cantor(3).unwrap();
        assert!(approx_eq(cantor.sigma(1.0 / 3.0).unwrap(), 2.0 / 3.0));
        assert_eq!(TimeScale::Reals.sigma(7.25).unwrap(), 7.25);
        assert!(matches!(
            TimeScale::integers().sigma(0.5),
            Err(Error::PointNotInScale(_))
        ));
    }

    #[test]
    fn rho_examples() {
        assert_eq!(TimeScale::integers().rho(4.0).unwrap(), 3.0);
        // Oracle for the Cantor mirror example: enumerate depth-d endpoints.
        let cantor = TimeScale::cantor(4).unwrap();
        let segs = cantor.segments_in_window(0.0, 1.0).unwrap();
        let endpoints: Vec<f64> = segs.iter().flat_map(|s| [s.lo, s.hi]).collect();
        let expected = endpoints
            .iter()
            .copied()
            .filter(|&e| e < 2.0 / 3.0 - 1e-9)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(approx_eq(expected, 1.0 / 3.0));
        assert!(approx_eq(cantor.rho(2.0 / 3.0).unwrap(), expected));
        let interval = TimeScale::finite_union(vec![Component::Interval(0.0, 1.0)]).unwrap();
        assert_eq!(interval.rho(0.0).unwrap(), 0.0);
    }

    #[test]
    fn graininess_examples() {
        let grid = TimeScale::uniform_grid(0.5, 0.0).unwrap();
        assert_eq!(grid.graininess(2.0).unwrap(), 0.5);
        let cantor = TimeScale::cantor(2).unwrap();
        assert!(approx_eq(cantor.graininess(1.0 / 3.0).unwrap(), 1.0 / 3.0));
        assert_eq!(TimeScale::Reals.graininess(-3.7).unwrap(), 0.0);
    }

    #[test]
    fn classify_examples() {
        let z = TimeScale::integers();
        let class = z.classify(0.0).unwrap();
        assert!(class.is_isolated());
        assert!(!class.is_max && !class.is_min);

        let u = union_01_2();
        let at_one = u.classify(1.0).unwrap();
        assert!(at_one.right_scattered && !at_one.left_scattered);

        let cantor = TimeScale::cantor(3).unwrap();
        let at_zero = cantor.classify(0.0).unwrap();
        assert!(at_zero.right_dense() && at_zero.is_min);
        // Oracle: 0 lies inside the depth-d interval [0, 3^-d].
        assert!(cantor.contains(3f64.powi(-3) / 2.0));
    }

    #[test]
    fn kappa_examples() {
        let u = union_01_2();
        assert!(!u.in_kappa(2.0).unwrap());
        let interval = TimeScale::finite_union(vec![Component::Interval(0.0, 1.0)]).unwrap();
        assert!(interval.in_kappa(1.0).unwrap());
        assert!(TimeScale::integers().in_kappa(1e6).unwrap());
    }

    #[test]
    fn approach_point_examples() {
        let d0 = 1.0 / 16.0;
        let reals = TimeScale::Reals;
        let pts = reals.approach_points(1.0, Side::Left, 3).unwrap();
        assert_eq!(pts, vec![1.0 - d0, 1.0 - d0 / 2.0, 1.0 - d0 / 4.0]);

        // Grid oracle: every candidate projects onto the single neighbor 3.
        let z = TimeScale::integers();
        let pts = z.approach_points(4.0, Side::Left, 3).unwrap();
        assert_eq!(pts, vec![3.0]);
        assert!(z.contains(3.0));

        let u =
            TimeScale::finite_union(vec![Component::Point(0.0), Component::Interval(1.0, 2.0)])
                .unwrap();
        let pts = u.approach_points(1.0, Side::Left, 5).unwrap();
        assert_eq!(pts, vec![0.0]);

        let at_min = u.approach_points(0.0, Side::Left, 5).unwrap();
        assert!(at_min.is_empty());
    }

    #[test]
    fn gap_consistency() {
        let u = TimeScale::finite_union(vec![
            Component::Interval(0.0, 1.0),
            Component::Interval(2.5, 3.0),
        ])
        .unwrap();
        assert_eq!(u.sigma(1.0).unwrap(), 2.5);
        assert_eq!(u.graininess(1.0).unwrap(), 1.5);
    }

    #[test]
    fn cantor_gap_left_endpoints_exact() {
        // Every depth-m gap left endpoint with m < d has mu = 3^-(m+1) exactly.
        let d = 5u32;
        let cantor = TimeScale::cantor(d).unwrap();
        let segs = cantor.segments_in_window(0.0, 1.0).unwrap();
        for pair in segs.windows(2) {
            let gap = pair[1].lo - pair[0].hi;
            let mu = cantor.graininess(pair[0].hi).unwrap();
            assert!(approx_eq(mu, gap), "mu {mu} vs gap {gap}");
            // gap widths are powers of three
            let m = (-gap.ln() / 3f64.ln()).round();
            assert!(approx_eq(gap, 3f64.powf(-m)));
        }
    }

    #[test]
    fn touching_components_merge() {
        let u = TimeScale::finite_union(vec![
            Component::Interval(0.0, 1.0),
            Component::Interval(1.0, 2.0),
            Component::Point(3.0),
        ])
        .unwrap();
        match &u {
            TimeScale::FiniteUnion(comps) => assert_eq!(comps.len(), 2),
            _ => unreachable!(),
        }
        assert_eq!(u.sigma(1.0).unwrap(), 1.0);
    }

    #[test]
    fn dsl_round_trip() {
        let cases = [
            ("R", TimeScale::Reals),
            ("Z", TimeScale::integers()),
            ("hZ:1/2", TimeScale::uniform_grid(0.5, 0.0).unwrap()),
            (
                "hZ:0.25@1",
                TimeScale::uniform_grid(0.25, 1.0).unwrap(),
            ),
            ("cantor:3", TimeScale::cantor(3).unwrap()),
            (
                "union:{[0,1],{2},[3,4.5]}",
                TimeScale::finite_union(vec![
                    Component::Interval(0.0, 1.0),
                    Component::Point(2.0),
                    Component::Interval(3.0, 4.5),
                ])
                .unwrap(),
            ),
            (
                "R[0,2]",
                TimeScale::finite_union(vec![Component::Interval(0.0, 2.0)]).unwrap(),
            ),
        ];
        for (text, expected) in cases {
            let parsed: TimeScale = text.parse().unwrap();
            assert_eq!(parsed, expected, "{text}");
        }
        assert!("union:{".parse::<TimeScale>().is_err());
        assert!("q^Z".parse::<TimeScale>().is_err());
    }

    #[test]
    fn segments_window() {
        let z = TimeScale::integers();
        let segs = z.segments_in_window(-1.2, 2.3).unwrap();
        assert_eq!(
            segs,
            vec![
                Segment { lo: -1.0, hi: -1.0 },
                Segment { lo: 0.0, hi: 0.0 },
                Segment { lo: 1.0, hi: 1.0 },
                Segment { lo: 2.0, hi: 2.0 },
            ]
        );
        assert!(matches!(
            z.segments_in_window(0.2, 0.8),
            Err(Error::WindowEmpty(_, _))
        ));
        let cantor = TimeScale::cantor(2).unwrap();
        let segs = cantor.segments_in_window(0.0, 1.0).unwrap();
        assert_eq!(segs.len(), 4);
        assert!(approx_eq(segs[1].lo, 2.0 / 9.0));
        assert!(approx_eq(segs[1].hi, 1.0 / 3.0));
    }
}

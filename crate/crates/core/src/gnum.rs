//! Generalized numbers represented by sampled nets `eps -> x(eps)`.
//!
//! A net is evaluated on a geometric grid `eps_k = eps_max * q^k` that stands in
//! for the parameter interval `(0, 1]`. Asymptotic statements (valuation,
//! association, supports) are read off the tail of that grid, i.e. the
//! smallest `eps` values.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expr;
use crate::serde_ext;

/// Samples inside the valuation / association window.
pub const ASSOCIATION_WINDOW: usize = 16;
/// Samples inspected by the support estimator.
pub const SUPPORT_WINDOW: usize = 24;
/// Disjoint sub-windows of the support window.
pub const SUPPORT_SUB_WINDOWS: usize = 3;
/// Magnitudes below this count as zero for valuation purposes.
pub const NEGLIGIBLE: f64 = 1e-300;

pub type NetFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GnumError {
    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),
    #[error("operands live on different sampling plans")]
    PlanMismatch,
    #[error("unknown builtin net `{0}`")]
    UnknownBuiltin(String),
    #[error("need {needed} finite nonzero tail samples, found {found}")]
    InsufficientSamples { found: usize, needed: usize },
    #[error("operation `{0}` requires a net or scalar operand")]
    MissingOperand(&'static str),
}

/// Geometric sampling grid on `(0, eps_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub eps_max: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            eps_max: 0.1,
            ratio: 10f64.powf(-1.0 / 8.0),
            count: 64,
        }
    }
}

impl SamplingPlan {
    pub fn new(eps_max: f64, ratio: f64, count: usize) -> Result<Self, GnumError> {
        let plan = SamplingPlan {
            eps_max,
            ratio,
            count,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), GnumError> {
        if !(self.eps_max > 0.0 && self.eps_max <= 1.0) {
            return Err(GnumError::InvalidPlan(format!(
                "eps_max must lie in (0, 1], got {}",
                self.eps_max
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(GnumError::InvalidPlan(format!(
                "ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if self.count < SUPPORT_WINDOW.max(ASSOCIATION_WINDOW) {
            return Err(GnumError::InvalidPlan(format!(
                "count must be at least {}, got {}",
                SUPPORT_WINDOW, self.count
            )));
        }
        if self.floor() <= 0.0 {
            return Err(GnumError::InvalidPlan("grid underflows to zero".into()));
        }
        Ok(())
    }

    /// Strictly decreasing grid points.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.eps_max * self.ratio.powi(k as i32))
            .collect()
    }

    pub fn point(&self, k: usize) -> f64 {
        self.eps_max * self.ratio.powi(k as i32)
    }

    /// Smallest grid point.
    pub fn floor(&self) -> f64 {
        self.point(self.count - 1)
    }

    /// Grid points per decade of `eps`, rounded.
    pub fn points_per_decade(&self) -> usize {
        ((-1.0 / self.ratio.log10()).round() as usize).max(1)
    }

    /// Length of the valuation window: the last two decades, at least 16 points.
    pub fn valuation_window(&self) -> usize {
        (2 * self.points_per_decade()).clamp(ASSOCIATION_WINDOW, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "label", rename_all = "snake_case")]
pub enum Provenance {
    Expression(String),
    Builtin(String),
    Derived(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Expression(s) => write!(f, "expr:{s}"),
            Provenance::Builtin(s) => write!(f, "builtin:{s}"),
            Provenance::Derived(s) => write!(f, "derived:{s}"),
        }
    }
}

/// A scalar net together with its samples on a plan.
#[derive(Clone)]
pub struct GNet {
    eval: NetFn,
    provenance: Provenance,
    plan: SamplingPlan,
    samples: Arc<[f64]>,
}

impl fmt::Debug for GNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GNet")
            .field("provenance", &self.provenance)
            .field("plan", &self.plan)
            .finish_non_exhaustive()
    }
}

impl GNet {
    pub fn from_fn(
        provenance: Provenance,
        plan: &SamplingPlan,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_shared(provenance, plan, Arc::new(f))
    }

    pub fn from_shared(provenance: Provenance, plan: &SamplingPlan, eval: NetFn) -> Self {
        let samples: Arc<[f64]> = plan.grid().into_iter().map(|e| eval(e)).collect();
        GNet {
            eval,
            provenance,
            plan: *plan,
            samples,
        }
    }

    /// Builds a net whose grid samples were computed elsewhere (e.g. in a batch).
    pub(crate) fn with_samples(
        provenance: Provenance,
        plan: &SamplingPlan,
        eval: NetFn,
        samples: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(samples.len(), plan.count);
        GNet {
            eval,
            provenance,
            plan: *plan,
            samples: samples.into(),
        }
    }

    pub fn from_expr(expr: &Expr, plan: &SamplingPlan) -> Self {
        let e = expr.clone();
        Self::from_fn(
            Provenance::Expression(expr.to_string()),
            plan,
            move |eps| e.eval(eps),
        )
    }

    /// The natural gauge `eps -> eps`.
    pub fn alpha(plan: &SamplingPlan) -> Self {
        Self::from_fn(Provenance::Builtin("alpha".into()), plan, |eps| eps)
    }

    pub fn constant(c: f64, plan: &SamplingPlan) -> Self {
        Self::from_fn(Provenance::Builtin(format!("const({c})")), plan, move |_| c)
    }

    /// `a` on even dyadic blocks `floor(log2(1/eps))`, `b` on odd ones.
    pub fn osc(a: f64, b: f64, plan: &SamplingPlan) -> Self {
        Self::from_fn(
            Provenance::Builtin(format!("osc({a},{b})")),
            plan,
            move |eps| if dyadic_block(eps) % 2 == 0 { a } else { b },
        )
    }

    pub fn eval(&self, eps: f64) -> f64 {
        (self.eval)(eps)
    }

    pub fn evaluator(&self) -> NetFn {
        Arc::clone(&self.eval)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Pointwise map, keeping the plan.
    pub fn map(&self, label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> GNet {
        let f = Arc::new(f);
        let inner = Arc::clone(&self.eval);
        let g = Arc::clone(&f);
        let samples = self.samples.iter().map(|&x| f(x)).collect();
        GNet::with_samples(
            Provenance::Derived(format!("{label}({})", self.provenance)),
            &self.plan,
            Arc::new(move |eps| g(inner(eps))),
            samples,
        )
    }

    pub fn add(&self, other: &GNet) -> Result<GNet, GnumError> {
        combine(CombineOp::Add, self, Operand::Net(other))
    }

    pub fn sub(&self, other: &GNet) -> Result<GNet, GnumError> {
        combine(CombineOp::Sub, self, Operand::Net(other))
    }

    pub fn mul(&self, other: &GNet) -> Result<GNet, GnumError> {
        combine(CombineOp::Mul, self, Operand::Net(other))
    }

    pub fn div(&self, other: &GNet) -> Result<GNet, GnumError> {
        combine(CombineOp::Div, self, Operand::Net(other))
    }

    pub fn abs(&self) -> GNet {
        self.map("abs", f64::abs)
    }

    pub fn scale(&self, c: f64) -> GNet {
        self.map(&format!("scale[{c}]"), move |x| c * x)
    }
}

/// `floor(log2(1/eps))`.
pub fn dyadic_block(eps: f64) -> i64 {
    (1.0 / eps).log2().floor() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineOp {
    Add,
    Sub,
    Mul,
    Div,
    Abs,
    Scale,
}

#[derive(Clone, Copy)]
pub enum Operand<'a> {
    Net(&'a GNet),
    Scalar(f64),
    None,
}

fn binary(op: CombineOp) -> fn(f64, f64) -> f64 {
    match op {
        CombineOp::Add => |x, y| x + y,
        CombineOp::Sub => |x, y| x - y,
        CombineOp::Mul | CombineOp::Scale => |x, y| x * y,
        CombineOp::Div => |x, y| x / y,
        CombineOp::Abs => |x, _| x.abs(),
    }
}

/// Pointwise ring operation. Non-finite samples propagate.
pub fn combine(op: CombineOp, a: &GNet, b: Operand<'_>) -> Result<GNet, GnumError> {
    let f = binary(op);
    let name = format!("{op:?}").to_lowercase();
    match (op, b) {
        (CombineOp::Abs, _) => Ok(a.abs()),
        (_, Operand::Net(b)) => {
            if a.plan != b.plan {
                return Err(GnumError::PlanMismatch);
            }
            let samples = a
                .samples
                .iter()
                .zip(b.samples.iter())
                .map(|(&x, &y)| f(x, y))
                .collect();
            let (ea, eb) = (Arc::clone(&a.eval), Arc::clone(&b.eval));
            Ok(GNet::with_samples(
                Provenance::Derived(format!("{name}({}, {})", a.provenance, b.provenance)),
                &a.plan,
                Arc::new(move |eps| f(ea(eps), eb(eps))),
                samples,
            ))
        }
        (_, Operand::Scalar(c)) => Ok(a.map(&format!("{name}[{c}]"), move |x| f(x, c))),
        (_, Operand::None) => Err(GnumError::MissingOperand(match op {
            CombineOp::Add => "add",
            CombineOp::Sub => "sub",
            CombineOp::Mul => "mul",
            CombineOp::Div => "div",
            CombineOp::Scale => "scale",
            CombineOp::Abs => "abs",
        })),
    }
}

/// What a net can be built from.
pub enum NetSource<'a> {
    Expr(&'a Expr),
    Builtin(&'a str),
    Composite(String, NetFn),
}

/// Builds a net; builtins are `alpha` and `osc(a,b)`.
pub fn make_net(src: NetSource<'_>, plan: &SamplingPlan) -> Result<GNet, GnumError> {
    plan.validate()?;
    match src {
        NetSource::Expr(e) => Ok(GNet::from_expr(e, plan)),
        NetSource::Composite(label, f) => Ok(GNet::from_shared(Provenance::Derived(label), plan, f)),
        NetSource::Builtin(name) => {
            let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
            if compact == "alpha" {
                return Ok(GNet::alpha(plan));
            }
            let args = compact
                .strip_prefix("osc(")
                .and_then(|rest| rest.strip_suffix(')'))
                .ok_or_else(|| GnumError::UnknownBuiltin(name.to_string()))?;
            let parts: Vec<&str> = args.split(',').collect();
            let parsed: Option<Vec<f64>> = parts.iter().map(|p| p.parse().ok()).collect();
            match parsed.as_deref() {
                Some([a, b]) => Ok(GNet::osc(*a, *b, plan)),
                _ => Err(GnumError::UnknownBuiltin(name.to_string())),
            }
        }
    }
}

/// Estimated sharp valuation `V(x)`; the sharp norm is `exp(-v_hat)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValuationEstimate {
    #[serde(with = "serde_ext::f64_ext")]
    pub v_hat: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// Index of the first grid point in the window.
    pub window_start: usize,
    pub window_len: usize,
}

impl ValuationEstimate {
    pub fn norm(&self) -> f64 {
        (-self.v_hat).exp()
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (slope, (rss / n).sqrt())
}

/// Slope of `log|x|` against `log eps` over the last two decades of the grid.
pub fn sharp_valuation(x: &GNet) -> Result<ValuationEstimate, GnumError> {
    let plan = x.plan();
    let w = plan.valuation_window();
    let start = plan.count - w;
    let tail = &x.samples()[start..];
    let grid = plan.grid();

    if tail.iter().all(|v| v.abs() < NEGLIGIBLE) {
        return Ok(ValuationEstimate {
            v_hat: f64::INFINITY,
            residual: 0.0,
            window_start: start,
            window_len: w,
        });
    }
    if tail.iter().all(|v| v.is_infinite()) {
        return Ok(ValuationEstimate {
            v_hat: f64::NEG_INFINITY,
            residual: 0.0,
            window_start: start,
            window_len: w,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .zip(&grid[start..])
        .filter(|(v, _)| v.is_finite() && v.abs() >= NEGLIGIBLE)
        .map(|(v, e)| (e.ln(), v.abs().ln()))
        .unzip();
    // zeros never constrain |x| <= alpha^r, so they are skipped; half the
    // window must remain
    if xs.len() < w / 2 {
        return Err(GnumError::InsufficientSamples {
            found: xs.len(),
            needed: w / 2,
        });
    }
    let (slope, residual) = least_squares_slope(&xs, &ys);
    Ok(ValuationEstimate {
        v_hat: slope,
        residual,
        window_start: start,
        window_len: w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GClassKind {
    Null,
    Infinitesimal,
    Associated,
    FiniteMixed,
    Infinity,
    PureInfinity,
}

impl fmt::Display for GClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GClassKind::Null => "null",
            GClassKind::Infinitesimal => "infinitesimal",
            GClassKind::Associated => "associated",
            GClassKind::FiniteMixed => "finite-mixed",
            GClassKind::Infinity => "infinity",
            GClassKind::PureInfinity => "pure-infinity",
        })
    }
}

/// Classification verdict for a scalar net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GClass {
    pub kind: GClassKind,
    /// Association limit; `Some(0.0)` for null and infinitesimal nets.
    pub limit: Option<f64>,
    pub support: Vec<f64>,
    pub valuation: Option<ValuationEstimate>,
    /// Set when the samples do not support a confident verdict.
    pub low_confidence: bool,
}

impl GClass {
    /// The real number the net is associated to, if any.
    pub fn finite_limit(&self) -> Option<f64> {
        match self.kind {
            GClassKind::Null | GClassKind::Infinitesimal | GClassKind::Associated
                if !self.low_confidence =>
            {
                self.limit
            }
            _ => None,
        }
    }
}

fn tail(samples: &[f64], w: usize) -> &[f64] {
    &samples[samples.len().saturating_sub(w)..]
}

/// `|x|` non-decreasing along the tail and at least doubling per decade.
fn diverges_monotonically(samples: &[f64], per_decade: usize) -> bool {
    let t: Vec<f64> = tail(samples, SUPPORT_WINDOW).iter().map(|v| v.abs()).collect();
    if t.iter().any(|v| v.is_nan()) {
        return false;
    }
    let monotone = t.windows(2).all(|p| p[1] >= p[0]);
    let doubling = (0..t.len().saturating_sub(per_decade)).all(|k| t[k + per_decade] >= 2.0 * t[k]);
    monotone && doubling && t[t.len() - 1] > 0.0
}

/// `|x|` non-increasing along the tail and at least halving per decade.
fn decays_monotonically(samples: &[f64], per_decade: usize) -> bool {
    let t: Vec<f64> = tail(samples, SUPPORT_WINDOW).iter().map(|v| v.abs()).collect();
    if t.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let monotone = t.windows(2).all(|p| p[1] <= p[0]);
    let halving = (0..t.len().saturating_sub(per_decade)).all(|k| 2.0 * t[k + per_decade] <= t[k]);
    monotone && halving && t[0] > 0.0
}

/// Maxima of `|x|` over the disjoint sub-windows keep at least doubling.
fn window_maxima_diverge(samples: &[f64]) -> bool {
    let t = tail(samples, SUPPORT_WINDOW);
    let chunk = t.len() / SUPPORT_SUB_WINDOWS;
    let maxima: Vec<f64> = t
        .chunks(chunk.max(1))
        .map(|c| c.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .collect();
    maxima.windows(2).all(|p| p[1] >= 2.0 * p[0]) && maxima.iter().all(|m| *m > 0.0)
}

/// Single-linkage clusters of `values` (ordered along decreasing `eps`) that
/// recur in at least two of `windows` consecutive disjoint chunks. Each
/// cluster is represented by its member with the smallest `eps`.
pub fn recurrent_clusters(values: &[f64], radius: f64, windows: usize) -> Vec<f64> {
    let windows = windows.max(1);
    let chunk = values.len().div_ceil(windows).max(1);
    let mut indexed: Vec<(usize, f64)> = values
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .collect();
    indexed.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut out = Vec::new();
    let mut start = 0;
    while start < indexed.len() {
        let mut end = start + 1;
        while end < indexed.len() && indexed[end].1 - indexed[end - 1].1 <= radius {
            end += 1;
        }
        let members = &indexed[start..end];
        let mut seen = vec![false; windows];
        for (i, _) in members {
            seen[(i / chunk).min(windows - 1)] = true;
        }
        let required = if windows == 1 { 1 } else { 2 };
        if seen.iter().filter(|s| **s).count() >= required {
            let (_, rep) = members.iter().max_by_key(|(i, _)| *i).copied().expect("non-empty");
            out.push(rep);
        }
        start = end;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    pub points: Vec<f64>,
    /// The tail samples are not bounded; `points` only covers the bounded part.
    pub unbounded: bool,
}

/// Finite cluster values of the net as `eps -> 0`.
pub fn support(x: &GNet, cluster_radius: f64) -> SupportSet {
    let t = tail(x.samples(), SUPPORT_WINDOW);
    let unbounded = t.iter().any(|v| v.is_infinite()) || window_maxima_diverge(x.samples());
    let cap = if unbounded {
        let first = t.len() / SUPPORT_SUB_WINDOWS;
        t[..first.max(1)]
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        f64::INFINITY
    };
    let bounded: Vec<f64> = t
        .iter()
        .map(|&v| if v.abs() <= cap { v } else { f64::NAN })
        .collect();
    SupportSet {
        points: recurrent_clusters(&bounded, cluster_radius, SUPPORT_SUB_WINDOWS),
        unbounded,
    }
}

/// Decides the kind of a real scalar net from its tail samples.
pub fn classify(x: &GNet, tol: f64) -> GClass {
    let samples = x.samples();
    let valuation = sharp_valuation(x).ok();
    let w16 = tail(samples, ASSOCIATION_WINDOW);
    let verdict = |kind, limit: Option<f64>, support: Vec<f64>, low_confidence| GClass {
        kind,
        limit,
        support,
        valuation,
        low_confidence,
    };

    if tail(samples, SUPPORT_WINDOW).iter().any(|v| v.is_nan()) {
        return verdict(GClassKind::FiniteMixed, None, Vec::new(), true);
    }
    if w16.iter().all(|v| v.abs() < NEGLIGIBLE) {
        return verdict(GClassKind::Null, Some(0.0), vec![0.0], false);
    }
    if diverges_monotonically(samples, x.plan().points_per_decade()) {
        return verdict(GClassKind::PureInfinity, None, Vec::new(), false);
    }
    if decays_monotonically(samples, x.plan().points_per_decade()) {
        return verdict(GClassKind::Infinitesimal, Some(0.0), vec![0.0], false);
    }

    let finite = w16.iter().all(|v| v.is_finite());
    let (lo, hi) = w16
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if finite && hi - lo < tol {
        let mean = w16.iter().sum::<f64>() / w16.len() as f64;
        let max_abs = lo.abs().max(hi.abs());
        let decaying = valuation.is_none_or(|v| v.v_hat > 0.05);
        if mean.abs() < tol && max_abs < tol && decaying {
            return verdict(GClassKind::Infinitesimal, Some(0.0), vec![0.0], false);
        }
        return verdict(GClassKind::Associated, Some(mean), vec![mean], false);
    }

    let supp = support(x, tol);
    if supp.unbounded {
        return verdict(GClassKind::Infinity, None, supp.points, false);
    }
    // A single recurring cluster with a spread above `tol` means slow
    // convergence; flag it rather than guess.
    let low_confidence = supp.points.len() < 2;
    verdict(GClassKind::FiniteMixed, None, supp.points, low_confidence)
}

/// Characteristic function of a subset `S` of the parameter interval.
#[derive(Clone)]
pub struct Idempotent {
    label: String,
    member: Arc<dyn Fn(f64) -> bool + Send + Sync>,
}

impl fmt::Debug for Idempotent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Idempotent").field(&self.label).finish()
    }
}

impl Idempotent {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(f64) -> bool + Send + Sync + 'static) -> Self {
        Idempotent {
            label: label.into(),
            member: Arc::new(f),
        }
    }

    pub fn all() -> Self {
        Self::from_fn("1", |_| true)
    }

    pub fn even_blocks() -> Self {
        Self::from_fn("even-blocks", |eps| dyadic_block(eps) % 2 == 0)
    }

    pub fn odd_blocks() -> Self {
        Self::even_blocks().complement()
    }

    pub fn complement(&self) -> Self {
        let inner = Arc::clone(&self.member);
        Self::from_fn(format!("1-{}", self.label), move |eps| !inner(eps))
    }

    pub fn contains(&self, eps: f64) -> bool {
        (self.member)(eps)
    }

    /// Membership of each grid point.
    pub fn mask(&self, plan: &SamplingPlan) -> Vec<bool> {
        plan.grid().into_iter().map(|e| self.contains(e)).collect()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `e * x`; samples outside the subset are exactly zero.
pub fn restrict(x: &GNet, e: &Idempotent) -> GNet {
    let mask = e.mask(x.plan());
    let samples = x
        .samples()
        .iter()
        .zip(&mask)
        .map(|(&v, &m)| if m { v } else { 0.0 })
        .collect();
    let inner = x.evaluator();
    let member = Arc::clone(&e.member);
    GNet::with_samples(
        Provenance::Derived(format!("restrict({}, {})", x.provenance(), e.label)),
        x.plan(),
        Arc::new(move |eps| if member(eps) { inner(eps) } else { 0.0 }),
        samples,
    )
}

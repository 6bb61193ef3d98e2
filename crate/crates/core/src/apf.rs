//! Bohr almost periodic functions at desk scale.
//!
//! Mean values `M(f) = lim (1/T) * integral_0^T f` are computed three
//! independent ways:
//!
//! * [`mean_direct`]: the defining limit, by Gauss–Kronrod quadrature over a
//!   doubling horizon schedule;
//! * [`mean_tail`]: the weighted tail `gamma * T^gamma * integral_T^inf f(x) / x^(1+gamma)`;
//! * [`mean_subst`]: `(1/eta) * integral_0^eta f(1/lambda(eps)) d eps`, by stratified
//!   Monte Carlo because the integrand oscillates without bound near 0.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gnum::NetFn;
use crate::mc;

pub type CFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApfError {
    #[error("frequency {0} appears more than once")]
    DuplicateFrequency(f64),
    #[error("step breakpoint must lie in (0, 1), got {0}")]
    InvalidBeta(f64),
    #[error("function is not bounded on the probe grid")]
    Unbounded,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Finite sum `sum_j c_j * exp(i * lambda_j * x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    terms: Vec<(Complex64, f64)>,
}

impl TrigPoly {
    pub fn new(terms: Vec<(Complex64, f64)>) -> Result<Self, ApfError> {
        for (i, (_, l)) in terms.iter().enumerate() {
            if !l.is_finite() {
                return Err(ApfError::InvalidParameter(format!("frequency {l}")));
            }
            if terms[..i].iter().any(|(_, m)| m == l) {
                return Err(ApfError::DuplicateFrequency(*l));
            }
        }
        Ok(TrigPoly { terms })
    }

    /// The pure vibration `c * exp(i * lambda * x)`.
    pub fn vibration(c: Complex64, lambda: f64) -> Self {
        TrigPoly {
            terms: vec![(c, lambda)],
        }
    }

    pub fn terms(&self) -> &[(Complex64, f64)] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, l)| c * Complex64::cis(l * x))
            .sum()
    }

    /// `sum_j |c_j|`, an upper bound for the sup norm.
    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }

    pub fn max_freq(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, (_, l)| m.max(l.abs()))
    }
}

/// Indicator of `[0, beta]` repeated with period 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicStep {
    beta: f64,
}

impl PeriodicStep {
    pub fn new(beta: f64) -> Result<Self, ApfError> {
        if beta > 0.0 && beta < 1.0 {
            Ok(PeriodicStep { beta })
        } else {
            Err(ApfError::InvalidBeta(beta))
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x - x.floor() <= self.beta {
            1.0
        } else {
            0.0
        }
    }
}

/// Points `k * period + offset` where the function may have a kink or jump.
#[derive(Debug, Clone, PartialEq)]
struct Lattice {
    period: f64,
    offsets: Vec<f64>,
}

impl Lattice {
    fn points_in(&self, a: f64, b: f64, out: &mut Vec<f64>) {
        let k0 = (a / self.period).floor() as i64 - 1;
        let k1 = (b / self.period).ceil() as i64 + 1;
        for k in k0..=k1 {
            for o in &self.offsets {
                let x = k as f64 * self.period + o;
                if x > a && x < b {
                    out.push(x);
                }
            }
        }
    }

    fn shifted(&self, c: f64) -> Lattice {
        Lattice {
            period: self.period,
            offsets: self
                .offsets
                .iter()
                .map(|o| (o - c).rem_euclid(self.period))
                .collect(),
        }
    }

    fn dilated(&self, lambda: f64) -> Lattice {
        Lattice {
            period: self.period / lambda,
            offsets: self.offsets.iter().map(|o| o / lambda).collect(),
        }
    }
}

#[derive(Clone)]
struct Component {
    eval: CFn,
    /// Exact period, when known.
    period: Option<f64>,
}

/// A bounded almost periodic function given by its evaluator.
///
/// The function is the sum of its components. Components with a known
/// period let [`mean_tail`] sum whole periods in closed form; `kinks` mark
/// non-smooth points for the quadrature.
#[derive(Clone)]
pub struct APSample {
    label: String,
    components: Vec<Component>,
    kinks: Vec<Lattice>,
    max_freq: Option<f64>,
    sup: f64,
}

impl std::fmt::Debug for APSample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("APSample")
            .field("label", &self.label)
            .field("components", &self.components.len())
            .field("max_freq", &self.max_freq)
            .field("sup", &self.sup)
            .finish()
    }
}

const PROBE_POINTS: usize = 2048;
const PROBE_SPAN: f64 = 100.0;

fn probe_grid() -> impl Iterator<Item = f64> {
    (0..PROBE_POINTS).map(|i| PROBE_SPAN * i as f64 / (PROBE_POINTS - 1) as f64)
}

impl APSample {
    pub fn trig_poly(p: &TrigPoly) -> Self {
        let components = p
            .terms()
            .iter()
            .map(|&(c, l)| Component {
                eval: Arc::new(move |x| c * Complex64::cis(l * x)),
                period: Some(if l == 0.0 { 1.0 } else { 2.0 * PI / l.abs() }),
            })
            .collect();
        APSample {
            label: format!("trigpoly{:?}", p.terms()),
            components,
            kinks: Vec::new(),
            max_freq: Some(p.max_freq()),
            sup: p.sup_bound(),
        }
    }

    pub fn step(s: PeriodicStep) -> Self {
        APSample {
            label: format!("step({})", s.beta),
            components: vec![Component {
                eval: Arc::new(move |x| Complex64::new(s.eval(x), 0.0)),
                period: Some(1.0),
            }],
            kinks: vec![Lattice {
                period: 1.0,
                offsets: vec![0.0, s.beta],
            }],
            max_freq: None,
            sup: 1.0,
        }
    }

    /// `|sin x|`.
    pub fn abs_sin() -> Self {
        APSample {
            label: "abs_sin".into(),
            components: vec![Component {
                eval: Arc::new(|x: f64| Complex64::new(x.sin().abs(), 0.0)),
                period: Some(PI),
            }],
            kinks: vec![Lattice {
                period: PI,
                offsets: vec![0.0],
            }],
            max_freq: Some(1.0),
            sup: 1.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        APSample {
            label: format!("const({c})"),
            components: vec![Component {
                eval: Arc::new(move |_| Complex64::new(c, 0.0)),
                period: Some(1.0),
            }],
            kinks: Vec::new(),
            max_freq: Some(0.0),
            sup: c.abs(),
        }
    }

    /// A user function. Boundedness is checked on the probe grid; the sup
    /// estimate is the probe maximum.
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        period: Option<f64>,
        max_freq: Option<f64>,
    ) -> Result<Self, ApfError> {
        let mut sup = 0.0f64;
        for x in probe_grid().chain(probe_grid().map(|x| 10.0 * x + 0.5)) {
            let v = f(x).norm();
            if !v.is_finite() {
                return Err(ApfError::Unbounded);
            }
            sup = sup.max(v);
        }
        if matches!(period, Some(p) if !(p > 0.0 && p.is_finite())) {
            return Err(ApfError::InvalidParameter("period must be positive".into()));
        }
        Ok(APSample {
            label: label.into(),
            components: vec![Component {
                eval: Arc::new(f),
                period,
            }],
            kinks: Vec::new(),
            max_freq,
            sup,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_freq(&self) -> Option<f64> {
        self.max_freq
    }

    /// Upper bound for `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        self.sup
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.components.iter().map(|c| (c.eval)(x)).sum()
    }

    fn evaluator(&self) -> CFn {
        if self.components.len() == 1 {
            return Arc::clone(&self.components[0].eval);
        }
        let parts: Vec<CFn> = self.components.iter().map(|c| Arc::clone(&c.eval)).collect();
        Arc::new(move |x| parts.iter().map(|f| f(x)).sum())
    }

    /// Period of the whole function, when it has a single periodic component.
    fn single_period(&self) -> Option<f64> {
        match self.components.as_slice() {
            [c] => c.period,
            _ => None,
        }
    }

    /// `x -> g(f(x))`, keeping the period if there is one.
    pub fn map(&self, label: &str, sup: f64, g: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        let f = self.evaluator();
        APSample {
            label: format!("{label}({})", self.label),
            components: vec![Component {
                eval: Arc::new(move |x| g(f(x))),
                period: self.single_period(),
            }],
            kinks: self.kinks.clone(),
            max_freq: self.max_freq,
            sup,
        }
    }

    /// `|f|^p`.
    pub fn abs_pow(&self, p: f64) -> Self {
        let mut out = self.map(&format!("abs^{p}"), self.sup.powf(p), move |z| {
            Complex64::new(if p == 1.0 { z.norm() } else { z.norm().powf(p) }, 0.0)
        });
        out.max_freq = self.max_freq.map(|l| l * p.max(1.0));
        out
    }

    /// `x -> f(x + c)`.
    pub fn shifted(&self, c: f64) -> Self {
        APSample {
            label: format!("{}(x+{c})", self.label),
            components: self
                .components
                .iter()
                .map(|comp| {
                    let f = Arc::clone(&comp.eval);
                    Component {
                        eval: Arc::new(move |x| f(x + c)),
                        period: comp.period,
                    }
                })
                .collect(),
            kinks: self.kinks.iter().map(|k| k.shifted(c)).collect(),
            max_freq: self.max_freq,
            sup: self.sup,
        }
    }

    /// `x -> f(lambda * x)` for `lambda > 0`.
    pub fn dilated(&self, lambda: f64) -> Result<Self, ApfError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ApfError::InvalidParameter(format!("dilation {lambda}")));
        }
        Ok(APSample {
            label: format!("{}({lambda}x)", self.label),
            components: self
                .components
                .iter()
                .map(|comp| {
                    let f = Arc::clone(&comp.eval);
                    Component {
                        eval: Arc::new(move |x| f(lambda * x)),
                        period: comp.period.map(|p| p / lambda),
                    }
                })
                .collect(),
            kinks: self.kinks.iter().map(|k| k.dilated(lambda)).collect(),
            max_freq: self.max_freq.map(|l| l * lambda),
            sup: self.sup,
        })
    }

    /// `a * f + b * g`.
    pub fn linear(&self, a: f64, other: &APSample, b: f64) -> Self {
        let scaled = |s: &APSample, w: f64| -> Vec<Component> {
            s.components
                .iter()
                .map(|comp| {
                    let f = Arc::clone(&comp.eval);
                    Component {
                        eval: Arc::new(move |x| f(x) * w),
                        period: comp.period,
                    }
                })
                .collect()
        };
        let mut components = scaled(self, a);
        components.extend(scaled(other, b));
        let mut kinks = self.kinks.clone();
        kinks.extend(other.kinks.iter().cloned());
        APSample {
            label: format!("{a}*{} + {b}*{}", self.label, other.label),
            components,
            kinks,
            max_freq: match (self.max_freq, other.max_freq) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            },
            sup: a.abs() * self.sup + b.abs() * other.sup,
        }
    }

    /// Pointwise product with `g`; the result is treated as aperiodic.
    fn times(&self, label: String, g: CFn, g_sup: f64, g_freq: f64) -> Self {
        let f = self.evaluator();
        APSample {
            label,
            components: vec![Component {
                eval: Arc::new(move |x| f(x) * g(x)),
                period: None,
            }],
            kinks: self.kinks.clone(),
            max_freq: self.max_freq.map(|l| l + g_freq),
            sup: self.sup * g_sup,
        }
    }

    fn panel_width(&self) -> f64 {
        let from_freq = match self.max_freq {
            Some(l) if l > 0.0 => PI / (10.0 * l),
            _ => 1.0,
        };
        let from_period = self
            .components
            .iter()
            .filter_map(|c| c.period)
            .fold(f64::INFINITY, |m, p| m.min(p / 8.0));
        from_freq.min(from_period).min(10.0)
    }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Returns the Kronrod estimate, its error estimate and the integral of `|f|`.
fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (l, r) = (f(c - dx), f(c + dx));
        let s = l + r;
        kron += s * WGK[j];
        abs += (l.norm() + r.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm(), abs * h.abs())
}

fn adaptive(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
    let (est, err, abs) = gk15(f, a, b);
    // below ~100 ulps of the magnitude further splitting only chases rounding
    if err <= tol.max(2e-14 * abs) || depth == 0 || !err.is_finite() {
        return est;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, 0.5 * tol, depth - 1) + adaptive(f, m, b, 0.5 * tol, depth - 1)
}

const MAX_DEPTH: u32 = 40;

/// `integral_a^b f`, split at kinks and into panels of width at most `h`.
/// Panels run in parallel and are summed in order.
fn integrate(f: &CFn, a: f64, b: f64, h: f64, kinks: &[Lattice], tol_density: f64) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let mut cuts = vec![a, b];
    for k in kinks {
        k.points_in(a, b, &mut cuts);
    }
    cuts.sort_by(f64::total_cmp);
    let scale = a.abs().max(b.abs()).max(1.0);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-13 * scale);

    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        let n = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / n as f64;
        for i in 0..n {
            let lo = w[0] + i as f64 * step;
            let hi = if i + 1 == n { w[1] } else { lo + step };
            panels.push((lo, hi));
        }
    }
    let parts: Vec<Complex64> = panels
        .par_iter()
        .map(|&(lo, hi)| adaptive(f.as_ref(), lo, hi, tol_density * (hi - lo), MAX_DEPTH))
        .collect();
    parts.into_iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMethod {
    Direct,
    Tail,
    Subst,
}

/// Outcome of a mean-value computation. Non-convergence is a flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub method: MeanMethod,
    /// Real part of the estimate.
    pub value: f64,
    pub imag: f64,
    /// `|last - previous|` along the schedule.
    pub gap: f64,
    /// Monte-Carlo standard error (substitution only).
    pub stderr: Option<f64>,
    pub converged: bool,
    /// Final horizon `T`, or final `eta` for the substitution method.
    pub horizon: f64,
    /// Real parts along the schedule.
    pub history: Vec<f64>,
}

impl MeanEstimate {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.value, self.imag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectParams {
    pub t0: f64,
    pub doublings: u32,
    /// Largest acceptable Cauchy gap.
    pub tol: f64,
}

impl Default for DirectParams {
    fn default() -> Self {
        // 156.25 * 2^6 = 1e4
        DirectParams {
            t0: 156.25,
            doublings: 6,
            tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub gamma: f64,
    pub t0: f64,
    pub doublings: u32,
    /// Bound for the truncated mass `sup|f| * (T / X_max)^gamma`.
    pub tail_tol: f64,
    pub tol: f64,
    /// Length of `[T, X]` integrated directly for components without a
    /// known period.
    pub aperiodic_span: f64,
}

impl Default for TailParams {
    fn default() -> Self {
        TailParams {
            gamma: 1.0,
            t0: 1e3,
            doublings: 6,
            tail_tol: 1e-12,
            tol: 1e-3,
            aperiodic_span: 2e4,
        }
    }
}

/// Substitution `x = 1 / lambda(eps)`.
#[derive(Clone)]
pub enum Substitution {
    /// `lambda(eps) = eps^c`.
    Power(f64),
    /// A positive net increasing to `lambda(0+) = 0`; the smoothness of its
    /// inverse is assumed, not checked.
    Net(NetFn),
}

impl std::fmt::Debug for Substitution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Substitution::Power(c) => write!(f, "Power({c})"),
            Substitution::Net(_) => f.write_str("Net(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubstParams {
    pub lam: Substitution,
    /// Horizons `T_j = 1 / lambda(eta_j)`, increasing.
    pub horizons: Vec<f64>,
    pub nodes: usize,
    pub seed: u64,
    pub tol: f64,
}

impl SubstParams {
    pub fn power(c: f64) -> Self {
        SubstParams {
            lam: Substitution::Power(c),
            horizons: vec![1e2, 1e3, 1e4],
            nodes: 200_000,
            seed: 0x5eed,
            tol: 1e-2,
        }
    }
}

fn finish(method: MeanMethod, history: Vec<Complex64>, tol: f64, horizon: f64, stderr: Option<f64>, extra_ok: bool) -> MeanEstimate {
    let last = *history.last().expect("non-empty schedule");
    let gap = if history.len() >= 2 {
        (last - history[history.len() - 2]).norm()
    } else {
        f64::INFINITY
    };
    MeanEstimate {
        method,
        value: last.re,
        imag: last.im,
        gap,
        stderr,
        converged: extra_ok && gap <= tol,
        horizon,
        history: history.iter().map(|z| z.re).collect(),
    }
}

/// `(1/T) * integral_0^T f` along `T_j = t0 * 2^j`.
pub fn mean_direct(f: &APSample, p: &DirectParams) -> Result<MeanEstimate, ApfError> {
    if !(p.t0 > 0.0 && p.t0.is_finite()) {
        return Err(ApfError::InvalidParameter(format!("t0 = {}", p.t0)));
    }
    let g = f.evaluator();
    let h = f.panel_width();
    let tol_density = 1e-12 * f.sup.max(1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = 0.0;
    let mut history = Vec::new();
    let mut t = p.t0;
    for _ in 0..=p.doublings {
        acc += integrate(&g, lo, t, h, &f.kinks, tol_density);
        history.push(acc / t);
        lo = t;
        t *= 2.0;
    }
    Ok(finish(MeanMethod::Direct, history, p.tol, lo, None, true))
}

const BERNOULLI_2J: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta `sum_{n >= 0} (a + n)^(-s)` for `s > 1`, `a > 0`, by
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const N: usize = 12;
    let mut sum: f64 = (0..N).map(|n| (a + n as f64).powf(-s)).sum();
    let x = a + N as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // B_2j / (2j)! * s (s+1) ... (s+2j-2) * x^(-s-2j+1)
    let mut rising = s;
    let mut fact = 2.0;
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_2J.iter().enumerate() {
        sum += b / fact * rising * xp;
        let k = 2.0 * (j as f64 + 1.0);
        rising *= (s + k - 1.0) * (s + k);
        fact *= (k + 1.0) * (k + 2.0);
        xp /= x * x;
    }
    sum
}

const TAYLOR_TERMS: usize = 16;

/// Moments `integral_0^L g(y) * (y - L/2)^j dy` of one period.
fn period_moments(g: &CFn, period: f64, kinks: &[Lattice], h: f64) -> Vec<Complex64> {
    (0..TAYLOR_TERMS)
        .map(|j| {
            let g = Arc::clone(g);
            let half = 0.5 * period;
            let w: CFn = Arc::new(move |y| g(y) * (y - half).powi(j as i32));
            integrate(&w, 0.0, period, h, kinks, 1e-15)
        })
        .collect()
}

/// `integral_T^X g(x) / x^(1+gamma) dx` for a component of period `L`: the
/// partial head period by quadrature, whole periods by a Taylor expansion of
/// the weight around each period midpoint summed with the Hurwitz zeta.
fn periodic_tail(g: &CFn, period: f64, moments: &[Complex64], kinks: &[Lattice], h: f64, gamma: f64, t: f64, x_max: f64) -> Complex64 {
    let k0 = (t / period).ceil();
    let k1 = (x_max / period).floor().max(k0);
    let weight: CFn = {
        let g = Arc::clone(g);
        Arc::new(move |x| g(x) * x.powf(-1.0 - gamma))
    };
    let head = integrate(&weight, t, k0 * period, h, kinks, 1e-15);
    let mut body = Complex64::new(0.0, 0.0);
    let mut binom = 1.0;
    for (j, mu) in moments.iter().enumerate() {
        let s = 1.0 + gamma + j as f64;
        let z = hurwitz_zeta(s, k0 + 0.5) - hurwitz_zeta(s, k1 + 0.5);
        body += mu * (binom * period.powf(-s) * z);
        binom *= (-(1.0 + gamma) - j as f64) / (j as f64 + 1.0);
    }
    head + body
}

/// `gamma * T^gamma * integral_T^{X_max} f(x) / x^(1+gamma) dx` along
/// `T_j = t0 * 2^j`; returns the value at the final horizon.
pub fn mean_tail(f: &APSample, p: &TailParams) -> Result<MeanEstimate, ApfError> {
    if !(p.gamma > 0.0 && p.gamma.is_finite()) {
        return Err(ApfError::InvalidParameter(format!("gamma = {}", p.gamma)));
    }
    if !(p.t0 > 0.0 && p.tail_tol > 0.0) {
        return Err(ApfError::InvalidParameter("t0 and tail_tol must be positive".into()));
    }
    let h = f.panel_width();
    let ratio = (f.sup.max(1e-300) / p.tail_tol).max(1.0).powf(1.0 / p.gamma);

    struct Prepared {
        g: CFn,
        period: Option<f64>,
        kinks: Vec<Lattice>,
        moments: Vec<Complex64>,
    }
    let prepared: Vec<Prepared> = f
        .components
        .iter()
        .map(|c| {
            // extra cuts from other components are harmless
            let kinks = f.kinks.clone();
            let moments = match c.period {
                Some(l) => period_moments(&c.eval, l, &kinks, h.min(l / 8.0)),
                None => Vec::new(),
            };
            Prepared {
                g: Arc::clone(&c.eval),
                period: c.period,
                kinks,
                moments,
            }
        })
        .collect();

    let mut history = Vec::new();
    let mut truncated = false;
    let mut t = p.t0;
    let mut last_t = t;
    for _ in 0..=p.doublings {
        let x_max = t * ratio;
        let mut integral = Complex64::new(0.0, 0.0);
        for c in &prepared {
            integral += match c.period {
                Some(l) => periodic_tail(&c.g, l, &c.moments, &c.kinks, h.min(l / 8.0), p.gamma, t, x_max),
                None => {
                    let end = x_max.min(t + p.aperiodic_span);
                    if end < x_max {
                        truncated = true;
                    }
                    let g = Arc::clone(&c.g);
                    let gamma = p.gamma;
                    let w: CFn = Arc::new(move |x| g(x) * x.powf(-1.0 - gamma));
                    integrate(&w, t, end, h, &c.kinks, 1e-15)
                }
            };
        }
        history.push(integral * (p.gamma * t.powf(p.gamma)));
        last_t = t;
        t *= 2.0;
    }
    Ok(finish(MeanMethod::Tail, history, p.tol, last_t, None, !truncated))
}

/// Solves `lambda(eta) = 1 / horizon` by bisection in `log eps`.
fn invert_net(lam: &NetFn, horizon: f64) -> Result<f64, ApfError> {
    let target = 1.0 / horizon;
    let (mut lo, mut hi) = (-700.0f64, 0.0f64);
    let at = |l: f64| lam(l.exp());
    if !(at(lo) <= target && at(hi) >= target) {
        return Err(ApfError::InvalidParameter(format!(
            "substitution net does not cross {target} on (0, 1]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi.exp())
}

/// `(1/eta) * integral_0^eta f(1/lambda(eps)) d eps` on the schedule
/// `eta_j = lambda^{-1}(1/T_j)`, by stratified Monte Carlo.
pub fn mean_subst(f: &APSample, p: &SubstParams) -> Result<MeanEstimate, ApfError> {
    if p.horizons.is_empty() || p.nodes < 2 {
        return Err(ApfError::InvalidParameter("empty substitution schedule".into()));
    }
    let g = f.evaluator();
    let mut history = Vec::new();
    let mut stderr = 0.0;
    let mut eta = f64::NAN;
    for (j, &horizon) in p.horizons.iter().enumerate() {
        let seed = p.seed.wrapping_add(j as u64);
        let est = match &p.lam {
            Substitution::Power(c) => {
                if !(*c > 0.0) {
                    return Err(ApfError::InvalidParameter(format!("exponent c = {c}")));
                }
                let c = *c;
                eta = horizon.powf(-1.0 / c);
                mc::stratified_mean(|e| g(e.powf(-c)), eta, p.nodes, seed)
            }
            Substitution::Net(lam) => {
                eta = invert_net(lam, horizon)?;
                mc::stratified_mean(|e| g(1.0 / lam(e)), eta, p.nodes, seed)
            }
        };
        stderr = est.stderr;
        history.push(est.mean);
    }
    Ok(finish(MeanMethod::Subst, history, p.tol, eta, Some(stderr), true))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationNumbers {
    pub taus: Vec<f64>,
    /// Largest gap between consecutive accepted shifts; `None` with fewer
    /// than two.
    pub gap: Option<f64>,
}

/// Grid shifts `tau` in `[start, end]` whose probe sup-distance
/// `max_i |f(x_i + tau) - f(x_i)|` over 2048 points of `[0, 100]` is at most
/// `tol`. A grid shift is also accepted when the distance drops below `tol`
/// within its own grid cell (found by golden-section search around discrete
/// local minima).
pub fn translation_numbers(f: &APSample, tol: f64, range: (f64, f64), step: f64) -> Result<TranslationNumbers, ApfError> {
    let (start, end) = range;
    if !(step > 0.0 && end >= start) {
        return Err(ApfError::InvalidParameter("need step > 0 and a non-empty range".into()));
    }
    let g = f.evaluator();
    let probes: Vec<f64> = probe_grid().collect();
    let base: Vec<Complex64> = probes.iter().map(|&x| g(x)).collect();
    let dist = |tau: f64| {
        probes
            .iter()
            .zip(&base)
            .fold(0.0f64, |m, (&x, b)| m.max((g(x + tau) - b).norm()))
    };
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|k| start + k as f64 * step).collect();
    let d: Vec<f64> = grid.par_iter().map(|&t| dist(t)).collect();

    let accepted: Vec<f64> = (0..count)
        .into_par_iter()
        .filter(|&k| {
            if d[k] <= tol {
                return true;
            }
            let left = k == 0 || d[k] <= d[k - 1];
            let right = k + 1 == count || d[k] <= d[k + 1];
            if !(left && right) {
                return false;
            }
            // golden-section search on the half-open cell around grid[k]
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            let (mut a, mut b) = (grid[k] - 0.5 * step, grid[k] + 0.5 * step);
            let mut c = b - phi * (b - a);
            let mut e = a + phi * (b - a);
            let (mut fc, mut fe) = (dist(c), dist(e));
            for _ in 0..60 {
                if fc.min(fe) <= tol {
                    return true;
                }
                if fc < fe {
                    b = e;
                    e = c;
                    fe = fc;
                    c = b - phi * (b - a);
                    fc = dist(c);
                } else {
                    a = c;
                    c = e;
                    fc = fe;
                    e = a + phi * (b - a);
                    fe = dist(e);
                }
            }
            fc.min(fe) <= tol
        })
        .map(|k| grid[k])
        .collect();

    let gap = accepted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(None, |m: Option<f64>, g| Some(m.map_or(g, |m| m.max(g))));
    Ok(TranslationNumbers {
        taus: accepted,
        gap,
    })
}

/// Fourier–Bohr coefficient `M(f(x) * exp(-i * lambda * x))`.
pub fn fourier_bohr(f: &APSample, lambda: f64, p: &DirectParams) -> Result<MeanEstimate, ApfError> {
    let g: CFn = Arc::new(move |x| Complex64::cis(-lambda * x));
    let prod = f.times(format!("{}*e^(-i{lambda}x)", f.label), g, 1.0, lambda.abs());
    mean_direct(&prod, p)
}

/// `|M(|f|^2) - sum_j |M(f * exp(-i lambda_j x))|^2|`.
pub fn parseval_residual(f: &TrigPoly, p: &DirectParams) -> Result<f64, ApfError> {
    let s = APSample::trig_poly(f);
    let energy = mean_direct(&s.abs_pow(2.0), p)?.value;
    let mut coeffs = 0.0;
    for (_, l) in f.terms() {
        coeffs += fourier_bohr(&s, *l, p)?.complex().norm_sqr();
    }
    Ok((energy - coeffs).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductMean {
    /// `M(g * f)`.
    pub mean: MeanEstimate,
    /// Limit of `g` at infinity estimated from tail samples.
    pub limit: f64,
    /// `L * M(f)`.
    pub limit_times_mean: f64,
    pub difference: f64,
    /// The tail samples of `g` spread more than the tolerance.
    pub no_limit: bool,
}

/// `M(g * f)` next to `L * M(f)`, where `L = lim g(x)`.
pub fn mean_product(
    f: &APSample,
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    p: &DirectParams,
    limit_tol: f64,
) -> Result<ProductMean, ApfError> {
    let t_final = p.t0 * 2f64.powi(p.doublings as i32);
    let tail: Vec<f64> = (0..=10).map(|j| g(t_final * 2f64.powi(j))).collect();
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let limit = *tail.last().expect("tail samples");
    let no_limit = !(hi - lo <= limit_tol) || !limit.is_finite();
    let g_sup = tail.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(g(0.0).abs());
    let gc: CFn = {
        let g = Arc::clone(&g);
        Arc::new(move |x| Complex64::new(g(x), 0.0))
    };
    let prod = f.times(format!("g*{}", f.label), gc, g_sup, 0.0);
    let mean = mean_direct(&prod, p)?;
    let limit_times_mean = limit * mean_direct(f, p)?.value;
    Ok(ProductMean {
        difference: (mean.value - limit_times_mean).abs(),
        mean,
        limit,
        limit_times_mean,
        no_limit,
    })
}

//! Generalized transition probabilities.
//!
//! The amplitude of a state pair `(u, v)` under a symmetric matrix net is
//! `eps -> |<u, exp(i A(eps)) v>|`; its generalized transition probability is
//! the net of averages `eta -> (1/eta) * integral_0^eta amplitude`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expr;
use crate::gnum::{
    classify, recurrent_clusters, GClass, GClassKind, GNet, Idempotent, NetFn, Provenance,
    SamplingPlan, SUPPORT_SUB_WINDOWS, SUPPORT_WINDOW,
};
use crate::mc;
use crate::spectral::{eigen_at, eigen_nets, EigenSystem, HermitianNet, SpectralError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TpError {
    #[error("vectors are not orthonormal: |u| = {norm_u}, |v| = {norm_v}, <u,v> = {dot}")]
    NotOrthonormal { norm_u: f64, norm_v: f64, dot: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("interference condition violated: sum of coefficients is {0}")]
    InterferenceViolation(f64),
    #[error("closed form does not apply: {0}")]
    PreconditionNotMet(String),
    #[error("Hamiltonian entry ({0}, {1}) is off the diagonal and not zero")]
    NotDiagonal(usize, usize),
    #[error("sample {sample} exceeds the declared bound {bound}")]
    BoundViolation { sample: f64, bound: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Unit vectors `u`, `v` with `<u, v> = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoPair {
    u: Vec<f64>,
    v: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl OrthoPair {
    pub const TOL: f64 = 1e-12;

    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self, TpError> {
        if u.len() != v.len() {
            return Err(TpError::DimensionMismatch(u.len(), v.len()));
        }
        let (nu, nv, d) = (dot(&u, &u).sqrt(), dot(&v, &v).sqrt(), dot(&u, &v));
        if (nu - 1.0).abs() > Self::TOL || (nv - 1.0).abs() > Self::TOL || d.abs() > Self::TOL {
            return Err(TpError::NotOrthonormal {
                norm_u: nu,
                norm_v: nv,
                dot: d,
            });
        }
        Ok(OrthoPair { u, v })
    }

    /// `u = (1, 1)/sqrt 2`, `v = (1, -1)/sqrt 2`.
    pub fn hadamard() -> Self {
        OrthoPair {
            u: vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            v: vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        }
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// `a_k = (Mu)_k (Mv)_k` at one `eps`, with the eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeDecomposition {
    pub a: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// `sum_k a_k`; zero up to rounding for an orthogonal pair.
    pub sum: f64,
    pub norm_sq: f64,
}

impl AmplitudeDecomposition {
    pub fn new(sys: &EigenSystem, pair: &OrthoPair) -> Result<Self, TpError> {
        let n = sys.values.len();
        if pair.dim() != n {
            return Err(TpError::DimensionMismatch(n, pair.dim()));
        }
        let mu = sys.vectors.matvec(pair.u());
        let mv = sys.vectors.matvec(pair.v());
        let a: Vec<f64> = mu.iter().zip(&mv).map(|(x, y)| x * y).collect();
        Ok(Self::from_parts(a, sys.values.clone()))
    }

    pub fn from_parts(a: Vec<f64>, lambdas: Vec<f64>) -> Self {
        AmplitudeDecomposition {
            sum: a.iter().sum(),
            norm_sq: dot(&a, &a),
            a,
            lambdas,
        }
    }

    /// `|sum_k a_k exp(i lambda_k)| = |<u, exp(iA) v>|`.
    pub fn direct(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.lambdas)
            .map(|(a, l)| Complex64::cis(*l) * a)
            .sum::<Complex64>()
            .norm()
    }
}

/// The three phasor forms of the amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasorForms {
    /// `sqrt(|a|^2 + 2 sum_{i<j} a_i a_j cos(l_i - l_j))`
    pub form1: f64,
    /// `2 sqrt(-sum_{i<j} a_i a_j sin^2((l_i - l_j)/2))`
    pub form2: f64,
    /// `2 sum_{i<j} sqrt(|a_i a_j|) |sin((l_i - l_j)/2)|`
    pub bound: f64,
}

pub const INTERFERENCE_TOL: f64 = 1e-8;

pub fn phasor_amplitude(d: &AmplitudeDecomposition) -> Result<PhasorForms, TpError> {
    if !(d.sum.abs() <= INTERFERENCE_TOL) {
        return Err(TpError::InterferenceViolation(d.sum));
    }
    let n = d.a.len();
    let (mut cos_sum, mut sin_sum, mut bound) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let (ai, aj) = (d.a[i], d.a[j]);
            let diff = d.lambdas[i] - d.lambdas[j];
            let half = (0.5 * diff).sin();
            cos_sum += ai * aj * diff.cos();
            sin_sum += ai * aj * half * half;
            bound += (ai * aj).abs().sqrt() * half.abs();
        }
    }
    Ok(PhasorForms {
        form1: (d.norm_sq + 2.0 * cos_sum).max(0.0).sqrt(),
        form2: 2.0 * (-sin_sum).max(0.0).sqrt(),
        bound: 2.0 * bound,
    })
}

/// `|<u, exp(i A(eps)) v>|` through the eigen-decomposition.
pub fn amplitude_at(h: &HermitianNet, pair: &OrthoPair, eps: f64) -> Result<f64, TpError> {
    let sys = eigen_at(h, eps)?;
    Ok(AmplitudeDecomposition::new(&sys, pair)?.direct())
}

pub fn amplitude_net(h: &HermitianNet, pair: &OrthoPair) -> Result<GNet, TpError> {
    if pair.dim() != h.dim() {
        return Err(TpError::DimensionMismatch(h.dim(), pair.dim()));
    }
    let samples = h
        .plan()
        .grid()
        .into_iter()
        .map(|e| amplitude_at(h, pair, e))
        .collect::<Result<Vec<_>, _>>()?;
    let (hh, pp) = (h.clone(), pair.clone());
    let eval: NetFn = Arc::new(move |eps| amplitude_at(&hh, &pp, eps).unwrap_or(f64::NAN));
    Ok(GNet::with_samples(
        Provenance::Derived("amplitude".into()),
        h.plan(),
        eval,
        samples,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub mean: f64,
    pub stderr: f64,
    pub eta: f64,
    pub draws: usize,
    /// Draws where the matrix overflowed; excluded from the mean.
    pub dropped: usize,
    /// `dropped < 0.1%` of the draws.
    pub valid: bool,
}

pub const MIN_DRAWS: usize = 1000;

/// Mean of the amplitude over `n` uniform draws from `(0, eta)`; the
/// optional trace holds `(eps, amplitude)` in draw order.
pub fn monte_carlo_tp_traced(
    h: &HermitianNet,
    pair: &OrthoPair,
    eta: f64,
    n: usize,
    seed: u64,
    trace: bool,
) -> Result<(McReport, Vec<(f64, f64)>), TpError> {
    if n < MIN_DRAWS {
        return Err(TpError::InvalidParameter(format!("need at least {MIN_DRAWS} draws, got {n}")));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(TpError::InvalidParameter(format!("eta must lie in (0, 1], got {eta}")));
    }
    if pair.dim() != h.dim() {
        return Err(TpError::DimensionMismatch(h.dim(), pair.dim()));
    }
    let (est, points) = mc::uniform_mean(|e| amplitude_at(h, pair, e).ok(), eta, n, seed, trace);
    Ok((
        McReport {
            mean: est.stats.mean,
            stderr: est.stats.stderr(),
            eta,
            draws: n,
            dropped: est.dropped,
            valid: (est.dropped as f64) < 1e-3 * n as f64,
        },
        points,
    ))
}

pub fn monte_carlo_tp(h: &HermitianNet, pair: &OrthoPair, eta: f64, n: usize, seed: u64) -> Result<McReport, TpError> {
    Ok(monte_carlo_tp_traced(h, pair, eta, n, seed, false)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuParams {
    /// Decreasing averaging lengths.
    pub schedule: Vec<f64>,
    pub nodes: usize,
    pub seed: u64,
    pub cluster_radius: f64,
}

impl Default for NuParams {
    fn default() -> Self {
        NuParams {
            // 1e-2 down to 1e-6, three points per decade
            schedule: (0..=12).map(|j| 10f64.powf(-2.0 - j as f64 / 3.0)).collect(),
            nodes: 20_000,
            seed: 0x6e75,
            cluster_radius: 2e-2,
        }
    }
}

pub const UNBOUNDED_SAMPLE: f64 = 1e12;

/// Sampled net `eta -> (1/eta) * integral_0^eta f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuResult {
    pub etas: Vec<f64>,
    pub values: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Recurring cluster values of the tail of `values`.
    pub support: Vec<f64>,
    /// A single cluster: the classical transition probability exists.
    pub classical: bool,
    /// Some integrand sample exceeded `1e12` in magnitude.
    pub unbounded: bool,
    /// Largest `|f|` seen at any node.
    pub max_sample: f64,
    pub non_finite: usize,
}

fn validate_schedule(p: &NuParams) -> Result<(), TpError> {
    let ok = !p.schedule.is_empty()
        && p.schedule.iter().all(|e| *e > 0.0 && *e <= 1.0)
        && p.schedule.windows(2).all(|w| w[1] < w[0]);
    if !ok {
        return Err(TpError::InvalidParameter("eta schedule must be decreasing in (0, 1]".into()));
    }
    if p.nodes < 2 {
        return Err(TpError::InvalidParameter("need at least two nodes".into()));
    }
    Ok(())
}

fn nu_from<F>(f: F, p: &NuParams) -> Result<NuResult, TpError>
where
    F: Fn(f64) -> (f64, f64) + Sync,
{
    validate_schedule(p)?;
    let mut out = NuResult {
        etas: p.schedule.clone(),
        values: Vec::new(),
        stderrs: Vec::new(),
        support: Vec::new(),
        classical: false,
        unbounded: false,
        max_sample: 0.0,
        non_finite: 0,
    };
    for (j, &eta) in p.schedule.iter().enumerate() {
        let seed = p.seed.wrapping_add(j as u64);
        let est = mc::stratified_mean(
            |e| {
                let (num, den) = f(e);
                Complex64::new(num, den)
            },
            eta,
            p.nodes,
            seed,
        );
        // `im` carries the weight; for plain averages it is identically 1
        let value = est.mean.re / est.mean.im;
        out.values.push(value);
        out.stderrs.push(est.stderr / est.mean.im.abs().max(f64::MIN_POSITIVE));
        out.max_sample = out.max_sample.max(est.max_abs_re);
        out.non_finite += est.non_finite;
    }
    out.unbounded = out.max_sample > UNBOUNDED_SAMPLE;
    let tail = &out.values[out.values.len().saturating_sub(SUPPORT_WINDOW)..];
    let windows = SUPPORT_SUB_WINDOWS.min(tail.len());
    out.support = recurrent_clusters(tail, p.cluster_radius, windows);
    out.classical = out.support.len() == 1;
    Ok(out)
}

/// Stratified averages of a real net over the schedule.
pub fn nu_scalar(f: &GNet, p: &NuParams) -> Result<NuResult, TpError> {
    let g = f.evaluator();
    nu_from(|e| (g(e), 1.0), p)
}

/// Averages restricted to the subset of an idempotent:
/// `nu(e * f) / nu(e)`.
pub fn nu_conditional(f: &GNet, e: &Idempotent, p: &NuParams) -> Result<NuResult, TpError> {
    let g = f.evaluator();
    nu_from(
        |x| {
            if e.contains(x) {
                (g(x), 1.0)
            } else {
                (0.0, 0.0)
            }
        },
        p,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    /// `(4/pi) |g1(0) g3(0)|`.
    pub value: f64,
    /// Limit of `g1 g3 = (Mu)_1 (Mv)_1`.
    pub a1_limit: f64,
    pub g1_limit: Option<f64>,
    pub g3_limit: Option<f64>,
    /// Limit of the eigenvector slope `k = M[0][1] / M[0][0]`.
    pub k0: Option<f64>,
    pub k_class: GClassKind,
    pub gap_class: GClassKind,
    pub a1_class: GClassKind,
}

fn coefficient_net(label: &str, plan: &SamplingPlan, samples: Vec<f64>, f: NetFn) -> GNet {
    GNet::with_samples(Provenance::Derived(label.into()), plan, f, samples)
}

/// The prediction `(4/pi) |g1(0) g3(0)|` for a 2x2 net whose eigenvalue gap
/// is a pure infinity, with limits read off classified coefficient nets.
pub fn closed_form_2x2(h: &HermitianNet, pair: &OrthoPair, tol: f64) -> Result<ClosedForm, TpError> {
    if h.dim() != 2 || pair.dim() != 2 {
        return Err(TpError::PreconditionNotMet(format!("dimension {} is not 2", h.dim())));
    }
    let nets = eigen_nets(h)?;
    let gap = nets.values[0].sub(&nets.values[1]).expect("same plan");
    let gap_class = classify(&gap, tol);
    if gap_class.kind != GClassKind::PureInfinity {
        return Err(TpError::PreconditionNotMet(format!(
            "eigenvalue gap is {}, not a pure infinity",
            gap_class.kind
        )));
    }

    let plan = h.plan();
    let coeff = |sys: &EigenSystem| {
        let mu = sys.vectors.matvec(pair.u());
        let mv = sys.vectors.matvec(pair.v());
        let m = &sys.vectors;
        (mu[0], mv[0], mu[0] * mv[0], m[(0, 1)] / m[(0, 0)])
    };
    let per_grid: Vec<(f64, f64, f64, f64)> = nets.systems.iter().map(coeff).collect();
    let net = |label: &str, pick: fn(&(f64, f64, f64, f64)) -> f64| {
        let (hh, pp) = (h.clone(), pair.clone());
        let f: NetFn = Arc::new(move |eps| match eigen_at(&hh, eps) {
            Ok(sys) => {
                let mu = sys.vectors.matvec(pp.u());
                let mv = sys.vectors.matvec(pp.v());
                let m = &sys.vectors;
                pick(&(mu[0], mv[0], mu[0] * mv[0], m[(0, 1)] / m[(0, 0)]))
            }
            Err(_) => f64::NAN,
        });
        coefficient_net(label, plan, per_grid.iter().map(pick).collect(), f)
    };
    let g1 = classify(&net("g1", |t| t.0), tol);
    let g3 = classify(&net("g3", |t| t.1), tol);
    let a1: GClass = classify(&net("g1*g3", |t| t.2), tol);
    let k = classify(&net("k", |t| t.3), tol);

    let a1_limit = a1.finite_limit().ok_or_else(|| {
        TpError::PreconditionNotMet(format!("coefficient g1*g3 is {}, not associated", a1.kind))
    })?;
    Ok(ClosedForm {
        value: 4.0 / PI * a1_limit.abs(),
        a1_limit,
        g1_limit: g1.finite_limit(),
        g3_limit: g3.finite_limit(),
        k0: k.finite_limit(),
        k_class: k.kind,
        gap_class: gap_class.kind,
        a1_class: a1.kind,
    })
}

/// `diag(exp(i g h_j(eps) (t - t0)))` for a diagonal matrix of expressions
/// `h_j`; off-diagonal entries must be the literal `0`.
pub fn diagonal_schrodinger(matrix: &[Vec<Expr>], g: f64, t0: f64, t: f64, eps: f64) -> Result<Vec<Complex64>, TpError> {
    check_diagonal(matrix)?;
    Ok(matrix
        .iter()
        .enumerate()
        .map(|(j, row)| Complex64::cis(g * row[j].eval(eps) * (t - t0)))
        .collect())
}

fn check_diagonal(matrix: &[Vec<Expr>]) -> Result<(), TpError> {
    let n = matrix.len();
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(TpError::DimensionMismatch(n, row.len()));
        }
        for (j, e) in row.iter().enumerate() {
            if i != j && !e.is_literal_zero() {
                return Err(TpError::NotDiagonal(i, j));
            }
        }
    }
    Ok(())
}

/// `eps -> |<u, S(t) v>|` for the diagonal propagator.
pub fn schrodinger_amplitude_net(
    matrix: &[Vec<Expr>],
    g: f64,
    t0: f64,
    t: f64,
    pair: &OrthoPair,
    plan: &SamplingPlan,
) -> Result<GNet, TpError> {
    check_diagonal(matrix)?;
    if pair.dim() != matrix.len() {
        return Err(TpError::DimensionMismatch(matrix.len(), pair.dim()));
    }
    let diag: Vec<Expr> = matrix.iter().enumerate().map(|(j, r)| r[j].clone()).collect();
    let w: Vec<f64> = pair.u().iter().zip(pair.v()).map(|(a, b)| a * b).collect();
    Ok(GNet::from_fn(
        Provenance::Derived(format!("schrodinger(g={g}, t-t0={})", t - t0)),
        plan,
        move |eps| {
            diag.iter()
                .zip(&w)
                .map(|(h, wj)| Complex64::cis(g * h.eval(eps) * (t - t0)) * wj)
                .sum::<Complex64>()
                .norm()
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominatedSupport {
    pub nu: NuResult,
    /// `2 C sum_i |f_i|_inf + 1`.
    pub bound: f64,
    /// Always an estimate: no closed form is known for these nets.
    pub estimate: bool,
}

/// Support of `nu(f)` for a net dominated by `C * sum_i |f_i o mu_i|`,
/// certifying every sample against the declared bound.
pub fn dominated_support(f: &GNet, c: f64, sup_sum: f64, p: &NuParams) -> Result<DominatedSupport, TpError> {
    let bound = 2.0 * c * sup_sum + 1.0;
    let nu = nu_scalar(f, p)?;
    let worst = nu
        .values
        .iter()
        .fold(nu.max_sample, |m, v| m.max(v.abs()));
    if !(worst <= bound) {
        return Err(TpError::BoundViolation { sample: worst, bound });
    }
    Ok(DominatedSupport {
        nu,
        bound,
        estimate: true,
    })
}

/// `|(exp(i/eps) - 2 exp(i/eps^2) + (1+eps) exp(i/sqrt(eps))) / sqrt 6|`.
pub fn triple_exponential(plan: &SamplingPlan) -> GNet {
    GNet::from_fn(Provenance::Builtin("triple-exponential".into()), plan, |e: f64| {
        let z = Complex64::cis(1.0 / e) - Complex64::cis(1.0 / (e * e)) * 2.0
            + Complex64::cis(1.0 / e.sqrt()) * (1.0 + e);
        z.norm() / 6f64.sqrt()
    })
}

/// Declared domination data for [`triple_exponential`]: the net is at most
/// `C * sum |f_i|` with `C = 2/sqrt 6` and `sum_i |f_i|_inf = 3`.
pub const TRIPLE_EXPONENTIAL_C: f64 = 0.816_496_580_927_726;
pub const TRIPLE_EXPONENTIAL_SUP_SUM: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TpMethod {
    ClosedForm2x2,
    Quadrature,
    MonteCarlo,
    Phasor,
}

/// One method's answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TPReport {
    pub method: TpMethod,
    pub value: f64,
    pub stderr: Option<f64>,
    pub support: Vec<f64>,
    pub classical: Option<bool>,
    pub notes: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::spectral::Mat;

    fn h2(rows: [[&str; 2]; 2]) -> HermitianNet {
        let r: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        HermitianNet::from_strings(&r, &SamplingPlan::default()).unwrap()
    }

    #[test]
    fn ortho_pair_validation() {
        assert!(OrthoPair::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_ok());
        assert!(matches!(
            OrthoPair::new(vec![1.0, 0.0], vec![0.1, 1.0]),
            Err(TpError::NotOrthonormal { .. })
        ));
        assert!(OrthoPair::new(vec![1.0], vec![0.0, 1.0]).is_err());
        let h = OrthoPair::hadamard();
        assert!((dot(h.u(), h.v())).abs() < 1e-16);
    }

    #[test]
    fn phasor_examples() {
        let d = AmplitudeDecomposition::from_parts(vec![0.5, -0.5], vec![PI, 0.0]);
        let f = phasor_amplitude(&d).unwrap();
        assert!((f.form1 - 1.0).abs() < 1e-15);
        assert!((f.form2 - 1.0).abs() < 1e-15);
        assert!((d.direct() - 1.0).abs() < 1e-15);
        assert!(f.bound >= f.form2 - 1e-15);

        let bad = AmplitudeDecomposition::from_parts(vec![0.5, -0.2], vec![1.0, 0.0]);
        assert!(matches!(phasor_amplitude(&bad), Err(TpError::InterferenceViolation(s)) if (s - 0.3).abs() < 1e-15));
    }

    #[test]
    fn constant_diagonal_has_zero_variance() {
        let h = h2([["1", "0"], ["0", "2"]]);
        let pair = OrthoPair::hadamard();
        let r = monte_carlo_tp(&h, &pair, 1e-3, 5000, 1).unwrap();
        let exact = (Complex64::cis(1.0) * 0.5 - Complex64::cis(2.0) * 0.5).norm();
        assert!((r.mean - exact).abs() < 1e-15);
        assert_eq!(r.stderr, 0.0);
        assert!(r.valid);
        assert!(monte_carlo_tp(&h, &pair, 1e-3, 999, 1).is_err());
    }

    #[test]
    fn two_by_two_amplitude_pattern() {
        let h = h2([["1/(eps+eps^2)", "0.4/(eps-2*eps^2)"], ["", "1.3/eps^2"]]);
        let pair = OrthoPair::hadamard();
        let net = amplitude_net(&h, &pair).unwrap();
        for (k, e) in h.plan().grid().into_iter().enumerate() {
            let sys = eigen_at(&h, e).unwrap();
            let d = AmplitudeDecomposition::new(&sys, &pair).unwrap();
            assert!((d.a[0] + d.a[1]).abs() < 1e-12);
            // beyond this, rounding of the eigenvalues themselves is a
            // macroscopic phase error
            if sys.values[0].abs().max(sys.values[1].abs()) > 1e5 {
                continue;
            }
            let pattern = 2.0 * d.a[0].abs() * (0.5 * (sys.values[0] - sys.values[1])).sin().abs();
            assert!((net.samples()[k] - pattern).abs() < 1e-10, "{e} {} {pattern}", net.samples()[k]);
        }
    }

    #[test]
    fn orthogonal_basis_pair_on_diagonal_matrix_is_null() {
        let h = h2([["1/eps", "0"], ["0", "1/eps^2"]]);
        let pair = OrthoPair::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let net = amplitude_net(&h, &pair).unwrap();
        assert!(net.samples().iter().all(|v| *v == 0.0), "{:?}", net.samples());
    }

    #[test]
    fn closed_form_rotation_example() {
        let mut plan = SamplingPlan::default();
        plan.eps_max = 1e-12;
        let h = h2([["1/(eps+eps^2)", "0.4/(eps-2*eps^2)"], ["", "1.3/eps^2"]]).with_plan(&plan);
        let c = closed_form_2x2(&h, &OrthoPair::hadamard(), 1e-6).unwrap();
        assert!((c.value - 2.0 / PI).abs() < 1e-9, "{c:?}");
        assert_eq!(c.gap_class, GClassKind::PureInfinity);
    }

    #[test]
    fn closed_form_needs_a_pure_infinite_gap() {
        let h = h2([["1", "eps"], ["", "2"]]);
        assert!(matches!(
            closed_form_2x2(&h, &OrthoPair::hadamard(), 1e-6),
            Err(TpError::PreconditionNotMet(_))
        ));
    }

    #[test]
    fn schrodinger_examples() {
        let m = |rows: [[&str; 2]; 2]| -> Vec<Vec<Expr>> {
            rows.iter().map(|r| r.iter().map(|s| parse(s).unwrap()).collect()).collect()
        };
        let d = m([["1/eps", "0"], ["0", "1/eps^2"]]);
        let s = diagonal_schrodinger(&d, 2.0, 0.3, 0.3, 0.01).unwrap();
        assert!(s.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
        let s = diagonal_schrodinger(&d, PI, 0.0, 1.0, 1.0).unwrap();
        assert!(s.iter().all(|z| (z + 1.0).norm() < 1e-15));
        let off = m([["1/eps", "eps"], ["0", "1/eps^2"]]);
        assert_eq!(diagonal_schrodinger(&off, 1.0, 0.0, 1.0, 0.5).unwrap_err(), TpError::NotDiagonal(0, 1));
    }

    #[test]
    fn nu_constant_is_exact() {
        let f = GNet::constant(0.25, &SamplingPlan::default());
        let r = nu_scalar(&f, &NuParams::default()).unwrap();
        assert!(r.values.iter().all(|v| *v == 0.25));
        assert_eq!(r.support, vec![0.25]);
        assert!(r.classical);
        assert!(!r.unbounded);
    }

    #[test]
    fn nu_unbounded_flag() {
        let f = GNet::from_fn(Provenance::Derived("1/eps^3".into()), &SamplingPlan::default(), |e| 1.0 / (e * e * e));
        let p = NuParams {
            schedule: vec![1e-3, 1e-4],
            nodes: 1000,
            ..NuParams::default()
        };
        assert!(nu_scalar(&f, &p).unwrap().unbounded);
        let bad = NuParams {
            schedule: vec![1e-4, 1e-3],
            ..p
        };
        assert!(nu_scalar(&f, &bad).is_err());
    }

    #[test]
    fn zero_net_has_support_zero() {
        let p = NuParams::default();
        let r = dominated_support(&GNet::constant(0.0, &SamplingPlan::default()), 1.0, 1.0, &p).unwrap();
        assert_eq!(r.nu.support, vec![0.0]);
        let err = dominated_support(&GNet::constant(5.0, &SamplingPlan::default()), 1.0, 1.0, &p).unwrap_err();
        assert!(matches!(err, TpError::BoundViolation { .. }));
    }

    #[test]
    fn association_stability_small_case() {
        let a0 = Mat::from_rows(&[vec![0.3, 1.1], vec![1.1, -0.7]]).unwrap();
        let h = h2([["0.3+eps", "1.1-2*eps"], ["", "-0.7+eps"]]);
        let pair = OrthoPair::hadamard();
        let exact = AmplitudeDecomposition::new(&crate::spectral::eigen_sym(&a0).unwrap(), &pair)
            .unwrap()
            .direct();
        let r = monte_carlo_tp(&h, &pair, 1e-6, 2000, 3).unwrap();
        assert!((r.mean - exact).abs() < 1e-3);
    }
}

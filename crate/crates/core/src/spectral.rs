//! Spectra of real symmetric matrix nets `eps -> A(eps)`.
//!
//! Eigenvalues at each grid point are sorted in descending order, which is a
//! valid choice of permutation net for symmetric matrices; the eigenvalue nets
//! are then ordinary scalar [`GNet`]s and can be classified.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, ParseError};
use crate::gnum::{classify, GClass, GNet, NetFn, Provenance, SamplingPlan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix must be square and non-empty")]
    NotSquare,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("brute-force matching is limited to n <= 8, got {0}")]
    TooLarge(usize),
    #[error("matrix has non-finite entries at eps = {eps:e}")]
    Overflow { eps: f64 },
    #[error("matrix entry ({row}, {col}): {source}")]
    Entry {
        row: usize,
        col: usize,
        source: ParseError,
    },
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpectralError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(SpectralError::NotSquare);
        }
        Ok(Mat {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Copies the upper triangle onto the lower one.
    pub fn symmetrize_from_upper(&mut self) {
        for i in 0..self.n {
            for j in 0..i {
                self[(i, j)] = self[(j, i)];
            }
        }
    }

    fn off_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)] * self[(i, j)];
                }
            }
        }
        s.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// `A = M^T diag(values) M`; the rows of `M` are orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl EigenSystem {
    /// `||A - M^T D M||_F`.
    pub fn reconstruction_residual(&self, a: &Mat) -> f64 {
        let m = &self.vectors;
        let d = Mat::diag(&self.values);
        a.sub(&m.transpose().matmul(&d).matmul(m)).frobenius()
    }

    /// `||M M^T - I||_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        let m = &self.vectors;
        m.matmul(&m.transpose()).sub(&Mat::identity(m.dim())).frobenius()
    }
}

/// `a*d - b*b` with one rounding for each product's error (Kahan).
fn det2(a: f64, b: f64, d: f64) -> f64 {
    let w = b * b;
    let e = b.mul_add(b, -w);
    a.mul_add(d, -w) - e
}

/// Closed form for `[[a, b], [b, d]]`. The first eigenvector is
/// `(cos t, sin t)` with `t = atan2(2b, a - d) / 2`.
fn eigen_2x2(a: f64, b: f64, d: f64) -> EigenSystem {
    let m = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(b);
    // the root of larger magnitude is formed without cancellation, the
    // other one from the determinant
    let (l1, l2) = if m >= 0.0 {
        let big = m + r;
        (big, if big != 0.0 { det2(a, b, d) / big } else { m - r })
    } else {
        let big = m - r;
        (det2(a, b, d) / big, big)
    };
    let t = 0.5 * (2.0 * b).atan2(a - d);
    let (s, c) = match (b == 0.0, a >= d) {
        (true, true) => (0.0, 1.0),
        (true, false) => (1.0, 0.0),
        _ => t.sin_cos(),
    };
    let values = if b == 0.0 {
        vec![a.max(d), a.min(d)]
    } else {
        vec![l1.max(l2), l1.min(l2)]
    };
    EigenSystem {
        values,
        vectors: Mat {
            n: 2,
            data: vec![c, s, -s, c],
        },
    }
}

/// Cyclic Jacobi rotations until the off-diagonal norm is at most
/// `1e-13 * ||A||_F`. Eigenvalues come back in diagonal order, unsorted.
pub fn jacobi(a: &Mat) -> EigenSystem {
    let n = a.dim();
    let mut w = a.clone();
    let mut v = Mat::identity(n);
    let target = 1e-13 * a.frobenius();
    for _sweep in 0..100 {
        if w.off_norm() <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (wkp, wkq) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = c * wkp - s * wkq;
                    w[(k, q)] = s * wkp + c * wkq;
                }
                for k in 0..n {
                    let (wpk, wqk) = (w[(p, k)], w[(q, k)]);
                    w[(p, k)] = c * wpk - s * wqk;
                    w[(q, k)] = s * wpk + c * wqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    EigenSystem {
        values: (0..n).map(|i| w[(i, i)]).collect(),
        vectors: v.transpose(),
    }
}

fn sort_descending(sys: EigenSystem) -> EigenSystem {
    let n = sys.values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sys.values[j].total_cmp(&sys.values[i]));
    let mut vectors = Mat::zeros(n);
    for (r, &i) in order.iter().enumerate() {
        for c in 0..n {
            vectors[(r, c)] = sys.vectors[(i, c)];
        }
    }
    EigenSystem {
        values: order.iter().map(|&i| sys.values[i]).collect(),
        vectors,
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
/// Only the upper triangle is read.
pub fn eigen_sym(a: &Mat) -> Option<EigenSystem> {
    if !a.is_finite() {
        return None;
    }
    let mut a = a.clone();
    a.symmetrize_from_upper();
    Some(match a.dim() {
        1 => EigenSystem {
            values: vec![a[(0, 0)]],
            vectors: Mat::identity(1),
        },
        2 => eigen_2x2(a[(0, 0)], a[(0, 1)], a[(1, 1)]),
        _ => sort_descending(jacobi(&a)),
    })
}

/// A real symmetric matrix net; the upper triangle is authoritative.
#[derive(Clone)]
pub struct HermitianNet {
    n: usize,
    /// Upper triangle, row-major: (0,0), (0,1), ..., (1,1), ...
    entries: Vec<NetFn>,
    sources: Option<Vec<Vec<String>>>,
    plan: SamplingPlan,
}

impl fmt::Debug for HermitianNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianNet")
            .field("n", &self.n)
            .field("sources", &self.sources)
            .field("plan", &self.plan)
            .finish_non_exhaustive()
    }
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl HermitianNet {
    /// Parses entry expressions. Entries below the diagonal are ignored.
    pub fn from_strings<S: AsRef<str>>(rows: &[Vec<S>], plan: &SamplingPlan) -> Result<Self, SpectralError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(SpectralError::NotSquare);
        }
        let mut entries = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in rows.iter().enumerate() {
            for (j, src) in row.iter().enumerate().skip(i) {
                let e = parse(src.as_ref()).map_err(|source| SpectralError::Entry {
                    row: i,
                    col: j,
                    source,
                })?;
                entries.push(Arc::new(move |eps| e.eval(eps)) as NetFn);
            }
        }
        let sources = rows
            .iter()
            .map(|r| r.iter().map(|s| s.as_ref().to_string()).collect())
            .collect();
        Ok(HermitianNet {
            n,
            entries,
            sources: Some(sources),
            plan: *plan,
        })
    }

    /// Entries given as closures, upper triangle row-major.
    pub fn from_fns(n: usize, upper: Vec<NetFn>, plan: &SamplingPlan) -> Result<Self, SpectralError> {
        if n == 0 || upper.len() != n * (n + 1) / 2 {
            return Err(SpectralError::NotSquare);
        }
        Ok(HermitianNet {
            n,
            entries: upper,
            sources: None,
            plan: *plan,
        })
    }

    /// A net that does not depend on `eps`.
    pub fn constant(a: &Mat, plan: &SamplingPlan) -> Self {
        let n = a.dim();
        let mut upper: Vec<NetFn> = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = a[(i, j)];
                upper.push(Arc::new(move |_| v));
            }
        }
        HermitianNet {
            n,
            entries: upper,
            sources: None,
            plan: *plan,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }

    pub fn with_plan(&self, plan: &SamplingPlan) -> Self {
        HermitianNet {
            plan: *plan,
            ..self.clone()
        }
    }

    pub fn sources(&self) -> Option<&[Vec<String>]> {
        self.sources.as_deref()
    }

    pub fn at(&self, eps: f64) -> Mat {
        let mut m = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let v = (self.entries[upper_index(self.n, i, j)])(eps);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    pub fn entry_net(&self, i: usize, j: usize) -> GNet {
        let f = Arc::clone(&self.entries[upper_index(self.n, i, j)]);
        let label = match &self.sources {
            Some(s) => s[i.min(j)][i.max(j)].clone(),
            None => format!("a[{i},{j}]"),
        };
        GNet::from_shared(Provenance::Expression(label), &self.plan, f)
    }

    /// Grid points where some entry is not finite.
    pub fn overflow_points(&self) -> Vec<f64> {
        self.plan
            .grid()
            .into_iter()
            .filter(|&e| !self.at(e).is_finite())
            .collect()
    }
}

/// Decomposition of `H(eps)`.
pub fn eigen_at(h: &HermitianNet, eps: f64) -> Result<EigenSystem, SpectralError> {
    eigen_sym(&h.at(eps)).ok_or(SpectralError::Overflow { eps })
}

/// Descending eigenvalue nets plus the conjugator at every grid point.
#[derive(Debug, Clone)]
pub struct EigenNets {
    pub values: Vec<GNet>,
    pub systems: Vec<EigenSystem>,
}

pub fn eigen_nets(h: &HermitianNet) -> Result<EigenNets, SpectralError> {
    let grid = h.plan.grid();
    let systems: Vec<EigenSystem> = grid
        .par_iter()
        .map(|&e| eigen_at(h, e))
        .collect::<Result<_, _>>()?;
    let values = (0..h.n)
        .map(|i| {
            let hh = h.clone();
            let eval: NetFn = Arc::new(move |eps| match eigen_at(&hh, eps) {
                Ok(s) => s.values[i],
                Err(_) => f64::NAN,
            });
            let samples = systems.iter().map(|s| s.values[i]).collect();
            GNet::with_samples(
                Provenance::Derived(format!("lambda_{}", i + 1)),
                &h.plan,
                eval,
                samples,
            )
        })
        .collect();
    Ok(EigenNets { values, systems })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwMatch {
    /// `sigma[i]` is the index of the eigenvalue of `B` matched with the
    /// `i`-th eigenvalue of `A`.
    pub sigma: Vec<usize>,
    pub cost: f64,
    /// `||A - B||_F^2`.
    pub bound: f64,
    pub bound_holds: bool,
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `min_sigma sum_i (alpha_i - beta_sigma(i))^2` by brute force; the first
/// minimizer in lexicographic order wins.
pub fn hw_match_spectra(alpha: &[f64], beta: &[f64]) -> Result<(Vec<usize>, f64), SpectralError> {
    if alpha.len() != beta.len() {
        return Err(SpectralError::DimensionMismatch(alpha.len(), beta.len()));
    }
    if alpha.len() > 8 {
        return Err(SpectralError::TooLarge(alpha.len()));
    }
    let mut p: Vec<usize> = (0..alpha.len()).collect();
    let mut best = (p.clone(), f64::INFINITY);
    loop {
        let cost: f64 = alpha.iter().zip(&p).map(|(a, &j)| (a - beta[j]).powi(2)).sum();
        if cost < best.1 {
            best = (p.clone(), cost);
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    Ok(best)
}

/// Hoffman–Wielandt matching of the spectra of two symmetric matrices.
/// Eigenvalues are taken in Jacobi's diagonal order (not sorted), so that
/// the optimal permutation is visible.
pub fn hw_match(a: &Mat, b: &Mat) -> Result<HwMatch, SpectralError> {
    if a.dim() != b.dim() {
        return Err(SpectralError::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.dim() > 8 {
        return Err(SpectralError::TooLarge(a.dim()));
    }
    let alpha = jacobi(a).values;
    let beta = jacobi(b).values;
    let (sigma, cost) = hw_match_spectra(&alpha, &beta)?;
    let bound = a.sub(b).frobenius().powi(2);
    Ok(HwMatch {
        sigma,
        cost,
        bound,
        bound_holds: cost <= bound + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapClass {
    pub i: usize,
    pub j: usize,
    pub class: GClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSupportReport {
    pub eigenvalues: Vec<GClass>,
    /// Classes of `lambda_i - lambda_j` for `i < j`.
    pub gaps: Vec<GapClass>,
    /// Union of the eigenvalue supports, ascending.
    pub support: Vec<f64>,
    /// Spectrum of the limit matrix when every entry is associated.
    pub limit_spectrum: Option<Vec<f64>>,
    /// Whether `support` equals `limit_spectrum` within the tolerance.
    pub matches_limit: Option<bool>,
}

pub fn spectrum_support(h: &HermitianNet, tol: f64) -> Result<SpectrumSupportReport, SpectralError> {
    let nets = eigen_nets(h)?;
    let eigenvalues: Vec<GClass> = nets.values.iter().map(|x| classify(x, tol)).collect();
    let mut gaps = Vec::new();
    for i in 0..h.n {
        for j in i + 1..h.n {
            let d = nets.values[i].sub(&nets.values[j]).expect("same plan");
            gaps.push(GapClass {
                i,
                j,
                class: classify(&d, tol),
            });
        }
    }
    let mut support: Vec<f64> = eigenvalues.iter().flat_map(|c| c.support.clone()).collect();
    support.sort_by(f64::total_cmp);

    let mut limit = Mat::zeros(h.n);
    let mut all_associated = true;
    for i in 0..h.n {
        for j in i..h.n {
            match classify(&h.entry_net(i, j), tol).finite_limit() {
                Some(v) => {
                    limit[(i, j)] = v;
                    limit[(j, i)] = v;
                }
                None => all_associated = false,
            }
        }
    }
    let limit_spectrum = if all_associated {
        let mut s = jacobi(&limit).values;
        s.sort_by(f64::total_cmp);
        Some(s)
    } else {
        None
    };
    let matches_limit = limit_spectrum.as_ref().map(|s| {
        let limits: Option<Vec<f64>> = eigenvalues.iter().map(|c| c.finite_limit()).collect();
        match limits {
            Some(mut l) => {
                l.sort_by(f64::total_cmp);
                l.iter().zip(s).all(|(a, b)| (a - b).abs() <= tol)
            }
            None => false,
        }
    });
    Ok(SpectrumSupportReport {
        eigenvalues,
        gaps,
        support,
        limit_spectrum,
        matches_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnum::GClassKind;

    fn strings(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn diagonal() {
        let s = eigen_sym(&Mat::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(s.values, vec![3.0, 1.0]);
        assert_eq!(s.vectors, Mat::identity(2));
        let s = eigen_sym(&Mat::diag(&[1.0, 5.0, 2.0])).unwrap();
        assert_eq!(s.values, vec![5.0, 2.0, 1.0]);
        assert!(s.reconstruction_residual(&Mat::diag(&[1.0, 5.0, 2.0])) < 1e-15);
    }

    #[test]
    fn matches_explicit_eigenvalue_formula() {
        let h = HermitianNet::from_strings(
            &strings(&[&["1/(eps+eps^2)", "1/(eps-2*eps^2)"], &["1/(eps-2*eps^2)", "1/eps"]]),
            &SamplingPlan::default(),
        )
        .unwrap();
        let e: f64 = 0.1;
        let tr = (2.0 * e + e * e) / (e * e + e.powi(3));
        let det = 1.0 / (e * e + e.powi(3)) - 1.0 / (e - 2.0 * e * e).powi(2);
        let root = (tr * tr - 4.0 * det).sqrt();
        let s = eigen_at(&h, e).unwrap();
        assert!((s.values[0] - 0.5 * (tr + root)).abs() < 1e-12 * tr.abs());
        assert!((s.values[1] - 0.5 * (tr - root)).abs() < 1e-12 * tr.abs());
        let j = sort_descending(jacobi(&h.at(e)));
        assert!((j.values[0] - s.values[0]).abs() < 1e-11 * tr.abs());
        assert!((j.values[1] - s.values[1]).abs() < 1e-11 * tr.abs());
    }

    #[test]
    fn random_4x4_reconstruction() {
        let a = Mat::from_rows(&[
            vec![4.0, -1.0, 0.5, 2.0],
            vec![-1.0, 3.0, 1.5, 0.0],
            vec![0.5, 1.5, -2.0, 1.0],
            vec![2.0, 0.0, 1.0, 0.25],
        ])
        .unwrap();
        let s = eigen_sym(&a).unwrap();
        assert!(s.reconstruction_residual(&a) <= 1e-10 * a.frobenius());
        assert!(s.orthogonality_residual() <= 4e-12);
        assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn overflow_is_reported() {
        let h = HermitianNet::from_strings(&strings(&[&["1/(eps-2*eps^2)", "0"], &["0", "1"]]), &SamplingPlan::default()).unwrap();
        assert_eq!(eigen_at(&h, 0.5).unwrap_err(), SpectralError::Overflow { eps: 0.5 });
        assert!(h.overflow_points().is_empty());
    }

    #[test]
    fn lower_triangle_is_ignored() {
        let h = HermitianNet::from_strings(&strings(&[&["1", "2"], &["not parsed?", "3"]]), &SamplingPlan::default());
        let m = h.unwrap().at(0.5);
        assert_eq!(m, Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap());
        let bad = HermitianNet::from_strings(&strings(&[&["1", "2+"], &["0", "3"]]), &SamplingPlan::default());
        assert!(matches!(bad, Err(SpectralError::Entry { row: 0, col: 1, .. })));
        assert_eq!(
            HermitianNet::from_strings(&strings(&[&["1", "2"]]), &SamplingPlan::default()).unwrap_err(),
            SpectralError::NotSquare
        );
    }

    #[test]
    fn eigen_nets_of_diagonal() {
        let plan = SamplingPlan::default();
        let h = HermitianNet::from_strings(&strings(&[&["1/eps", "0"], &["0", "1/eps^2"]]), &plan).unwrap();
        let nets = eigen_nets(&h).unwrap();
        for (k, e) in plan.grid().into_iter().enumerate() {
            assert_eq!(nets.values[0].samples()[k], 1.0 / (e * e));
            assert_eq!(nets.values[1].samples()[k], 1.0 / e);
        }
        assert_eq!(nets.values[0].eval(0.5), 4.0);
    }

    #[test]
    fn hw_examples() {
        let m = hw_match(&Mat::diag(&[1.0, 2.0]), &Mat::diag(&[2.0, 1.0])).unwrap();
        assert_eq!(m.sigma, vec![1, 0]);
        assert_eq!(m.cost, 0.0);
        assert!(m.bound_holds);
        let a = Mat::from_rows(&[vec![1.0, 0.3], vec![0.3, -2.0]]).unwrap();
        let m = hw_match(&a, &a).unwrap();
        assert_eq!(m.sigma, vec![0, 1]);
        assert_eq!(m.cost, 0.0);
        assert!(hw_match(&Mat::identity(2), &Mat::identity(3)).is_err());
        assert_eq!(hw_match(&Mat::identity(9), &Mat::identity(9)).unwrap_err(), SpectralError::TooLarge(9));
    }

    #[test]
    fn perturbed_constant_spectrum() {
        let h = HermitianNet::from_strings(
            &strings(&[
                &["1+eps", "eps", "0"],
                &["eps", "2", "2*eps"],
                &["0", "2*eps", "5-eps"],
            ]),
            &SamplingPlan::default(),
        )
        .unwrap();
        let r = spectrum_support(&h, 1e-3).unwrap();
        assert_eq!(r.support.len(), 3);
        for (s, want) in r.support.iter().zip([1.0, 2.0, 5.0]) {
            assert!((s - want).abs() < 1e-3);
        }
        assert_eq!(r.matches_limit, Some(true));
        assert!(r.eigenvalues.iter().all(|c| c.kind == GClassKind::Associated));
    }
}

use std::f64::consts::FRAC_2_PI;
use std::sync::Arc;

use gentp_core::gnum::NetFn;
use gentp_core::spectral::{eigen_at, eigen_sym};
use gentp_core::tp::{amplitude_at, nu_conditional, NuParams};
use gentp_core::{
    amplitude_net, monte_carlo_tp, nu_scalar, parse, phasor_amplitude, AmplitudeDecomposition, GNet, HermitianNet,
    Idempotent, Mat, OrthoPair, SamplingPlan,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn symmetric(n: usize, scale: f64) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                rows[i][j] = scale * v[i * n + j];
                rows[j][i] = rows[i][j];
            }
        }
        Mat::from_rows(&rows).unwrap()
    })
}

/// Gram–Schmidt on two raw vectors; `None` when they are nearly dependent.
fn orthonormalize(x: &[f64], y: &[f64]) -> Option<OrthoPair> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let nx = dot(x, x).sqrt();
    if nx < 1e-3 {
        return None;
    }
    let u: Vec<f64> = x.iter().map(|a| a / nx).collect();
    let p = dot(&u, y);
    let w: Vec<f64> = y.iter().zip(&u).map(|(b, a)| b - p * a).collect();
    let nw = dot(&w, &w).sqrt();
    if nw < 1e-3 {
        return None;
    }
    let v: Vec<f64> = w.iter().map(|b| b / nw).collect();
    // one more pass keeps <u, v> at the rounding level
    let q = dot(&u, &v);
    let v: Vec<f64> = v.iter().zip(&u).map(|(b, a)| b - q * a).collect();
    let nv = dot(&v, &v).sqrt();
    OrthoPair::new(u, v.iter().map(|b| b / nv).collect()).ok()
}

fn instance(n: usize, scale: f64) -> impl Strategy<Value = (Mat, OrthoPair)> {
    (
        symmetric(n, scale),
        prop::collection::vec(-1.0f64..1.0, n),
        prop::collection::vec(-1.0f64..1.0, n),
    )
        .prop_filter_map("dependent vectors", |(a, x, y)| orthonormalize(&x, &y).map(|p| (a, p)))
}

fn any_instance() -> impl Strategy<Value = (Mat, OrthoPair)> {
    (2usize..=6, prop_oneof![Just(1.0), Just(10.0), Just(100.0)]).prop_flat_map(|(n, s)| instance(n, s))
}

/// `exp(iA)` by scaling and squaring of a Taylor series.
fn expm_i(a: &Mat) -> Vec<Vec<Complex64>> {
    let n = a.dim();
    let norm = a.frobenius();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let s = 2f64.powi(squarings as i32);
    let x: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(0.0, a[(i, j)] / s)).collect())
        .collect();
    let mul = |p: &Vec<Vec<Complex64>>, q: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| p[i][k] * q[k][j]).sum()).collect())
            .collect()
    };
    let mut result: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let mut term = result.clone();
    for k in 1..30 {
        term = mul(&term, &x).into_iter().map(|r| r.into_iter().map(|z| z / k as f64).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul(&result, &result);
    }
    result
}

fn expm_amplitude(a: &Mat, p: &OrthoPair) -> f64 {
    let e = expm_i(a);
    let n = a.dim();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| e[i][j] * p.u()[i] * p.v()[j])
        .sum::<Complex64>()
        .norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn phasor_forms_match_the_direct_amplitude((a, pair) in any_instance()) {
        let sys = eigen_sym(&a).unwrap();
        let d = AmplitudeDecomposition::new(&sys, &pair).unwrap();
        prop_assert!(d.sum.abs() <= 1e-10, "sum {}", d.sum);
        prop_assert!(d.norm_sq < 1.0);
        let forms = phasor_amplitude(&d).unwrap();
        let direct = d.direct();
        prop_assert!((direct - forms.form2).abs() <= 1e-10, "{} vs {}", direct, forms.form2);
        prop_assert!((direct - forms.form1).abs() <= 1e-10);
        prop_assert!(forms.bound >= direct - 1e-10);
        prop_assert!(direct <= 1.0 + 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn eigen_route_matches_exponential_oracle((a, pair) in (2usize..=5).prop_flat_map(|n| instance(n, 3.0))) {
        let sys = eigen_sym(&a).unwrap();
        let direct = AmplitudeDecomposition::new(&sys, &pair).unwrap().direct();
        prop_assert!((direct - expm_amplitude(&a, &pair)).abs() <= 1e-10);
    }

    #[test]
    fn amplitudes_are_unitary_bounded((a, pair) in instance(4, 1.0), b in symmetric(4, 1.0)) {
        let upper: Vec<NetFn> = (0..4)
            .flat_map(|i| (i..4).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (x, y) = (a[(i, j)], b[(i, j)]);
                Arc::new(move |e: f64| x / e + y / (e * e)) as NetFn
            })
            .collect();
        let h = HermitianNet::from_fns(4, upper, &SamplingPlan::default()).unwrap();
        let net = amplitude_net(&h, &pair).unwrap();
        prop_assert!(net.samples().iter().all(|v| *v <= 1.0 + 1e-10));
        for e in h.plan().grid() {
            let d = AmplitudeDecomposition::new(&eigen_at(&h, e).unwrap(), &pair).unwrap();
            prop_assert!(d.sum.abs() <= 1e-10);
            prop_assert!(d.norm_sq < 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn association_stability((a0, pair) in instance(3, 1.0), b in symmetric(3, 1.0)) {
        let upper: Vec<NetFn> = (0..3)
            .flat_map(|i| (i..3).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (x, y) = (a0[(i, j)], b[(i, j)]);
                Arc::new(move |e: f64| x + e * y) as NetFn
            })
            .collect();
        let h = HermitianNet::from_fns(3, upper, &SamplingPlan::default()).unwrap();
        let exact = AmplitudeDecomposition::new(&eigen_sym(&a0).unwrap(), &pair).unwrap().direct();
        let r = monte_carlo_tp(&h, &pair, 1e-6, 2000, 17).unwrap();
        prop_assert!((r.mean - exact).abs() < 1e-3, "{} vs {}", r.mean, exact);
    }
}

fn example_b() -> HermitianNet {
    let rows = vec![vec!["1/(eps+eps^2)", "0.4/(eps-2*eps^2)"], vec!["", "1.3/eps^2"]];
    HermitianNet::from_strings(&rows, &SamplingPlan::default()).unwrap()
}

#[test]
fn seeded_runs_are_bit_identical() {
    let (h, pair) = (example_b(), OrthoPair::hadamard());
    let a = monte_carlo_tp(&h, &pair, 1e-3, 20_000, 99).unwrap();
    let b = monte_carlo_tp(&h, &pair, 1e-3, 20_000, 99).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    let c = monte_carlo_tp(&h, &pair, 1e-3, 20_000, 100).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn idempotent_compatibility() {
    let a0 = Mat::from_rows(&[vec![0.4, 1.2], vec![1.2, -0.3]]).unwrap();
    let a1 = Mat::from_rows(&[vec![2.0, -0.5], vec![-0.5, 0.7]]).unwrap();
    let pair = OrthoPair::hadamard();
    let upper: Vec<NetFn> = [(0, 0), (0, 1), (1, 1)]
        .into_iter()
        .map(|(i, j)| {
            let (x, y) = (a0[(i, j)], a1[(i, j)]);
            let even = Idempotent::even_blocks();
            Arc::new(move |e: f64| if even.contains(e) { x } else { y }) as NetFn
        })
        .collect();
    let h = HermitianNet::from_fns(2, upper, &SamplingPlan::default()).unwrap();
    let amp = amplitude_net(&h, &pair).unwrap();
    let want: Vec<f64> = [&a0, &a1]
        .iter()
        .map(|a| AmplitudeDecomposition::new(&eigen_sym(a).unwrap(), &pair).unwrap().direct())
        .collect();
    assert!((want[0] - want[1]).abs() > 0.05);

    let p = NuParams::default();
    let mut found = Vec::new();
    for e in [Idempotent::even_blocks(), Idempotent::odd_blocks()] {
        found.extend(nu_conditional(&amp, &e, &p).unwrap().support);
    }
    for w in &want {
        assert!(found.iter().any(|s| (s - w).abs() <= p.cluster_radius), "{w} not in {found:?}");
    }
}

#[test]
fn nu_of_oscillating_nets() {
    let plan = SamplingPlan::default();
    let p = NuParams::default();
    let f = GNet::from_expr(&parse("abs(sin(1/eps))").unwrap(), &plan);
    let r = nu_scalar(&f, &p).unwrap();
    assert!(r.values[r.values.len() - 4..].iter().all(|v| (v - FRAC_2_PI).abs() < 2e-2));
    assert!(r.classical);
    assert!((r.support[0] - FRAC_2_PI).abs() < 2e-2);
    assert!(r.values.iter().all(|v| (0.0..=1.0).contains(v)));

    let g = GNet::from_expr(&parse("(3+eps)*abs(sin(1/eps))").unwrap(), &plan);
    let r = nu_scalar(&g, &p).unwrap();
    assert!((r.values.last().unwrap() - 3.0 * FRAC_2_PI).abs() < 5e-2);
}

#[test]
fn amplitude_at_handles_overflow() {
    let rows = vec![vec!["1/eps^200", "0"], vec!["", "1"]];
    let h = HermitianNet::from_strings(&rows, &SamplingPlan::default()).unwrap();
    assert!(amplitude_at(&h, &OrthoPair::hadamard(), 1e-3).is_err());
    let r = monte_carlo_tp(&h, &OrthoPair::hadamard(), 1e-2, 1000, 1).unwrap();
    assert_eq!(r.dropped, 1000);
    assert!(!r.valid);
}

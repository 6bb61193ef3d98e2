use gentp_core::gnum::classify;
use gentp_core::spectral::{eigen_at, eigen_sym, hw_match_spectra, jacobi};
use gentp_core::{eigen_nets, hw_match, spectrum_support, GClassKind, GNet, HermitianNet, Mat, SamplingPlan};
use proptest::prelude::*;

fn symmetric(n: usize) -> impl Strategy<Value = Mat> {
    (prop::collection::vec(-10.0f64..10.0, n * n), -3i32..=3).prop_map(move |(v, k)| {
        let s = 10f64.powi(k);
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                rows[i][j] = v[i * n + j] * s;
                rows[j][i] = rows[i][j];
            }
        }
        Mat::from_rows(&rows).unwrap()
    })
}

/// Entries in `[-10, 10)` without rescaling.
fn unit_symmetric(n: usize) -> impl Strategy<Value = Mat> {
    (symmetric(n), Just(())).prop_map(move |(m, _)| {
        let s = m.frobenius().max(f64::MIN_POSITIVE);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| 10.0 * m[(i, j)] / s).collect()).collect();
        Mat::from_rows(&rows).unwrap()
    })
}

fn any_symmetric() -> impl Strategy<Value = Mat> {
    (2usize..=6).prop_flat_map(symmetric)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn reconstruction_orthogonality_and_order(a in any_symmetric()) {
        let sys = eigen_sym(&a).unwrap();
        let scale = a.frobenius();
        prop_assert!(sys.reconstruction_residual(&a) <= 1e-10 * scale);
        prop_assert!(sys.orthogonality_residual() <= 1e-10);
        prop_assert!(sys.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hoffman_wielandt_bound(a in symmetric(4), b in symmetric(4)) {
        let m = hw_match(&a, &b).unwrap();
        prop_assert!(m.bound_holds, "cost {} > bound {}", m.cost, m.bound);
    }

    #[test]
    fn closed_form_matches_jacobi(a in symmetric(2)) {
        let closed = eigen_sym(&a).unwrap();
        let mut j = jacobi(&a).values;
        j.sort_by(|x, y| y.total_cmp(x));
        let scale = a.frobenius().max(f64::MIN_POSITIVE);
        for (x, y) in closed.values.iter().zip(&j) {
            prop_assert!((x - y).abs() <= 1e-11 * scale, "{:?} vs {:?}", closed.values, j);
        }
    }

    #[test]
    fn perturbed_spectra_converge(a0 in unit_symmetric(3), b in unit_symmetric(3)) {
        let (a0c, bc) = (a0.clone(), b.clone());
        let upper: Vec<_> = (0..3)
            .flat_map(|i| (i..3).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (x, y) = (a0c[(i, j)], bc[(i, j)]);
                std::sync::Arc::new(move |e: f64| x + e * y) as gentp_core::gnum::NetFn
            })
            .collect();
        let h = HermitianNet::from_fns(3, upper, &SamplingPlan::default()).unwrap();
        let target = eigen_sym(&a0).unwrap().values;
        let costs: Vec<f64> = h
            .plan()
            .grid()
            .into_iter()
            .map(|e| hw_match_spectra(&eigen_at(&h, e).unwrap().values, &target).unwrap().1)
            .collect();
        let tail = &costs[costs.len() - 24..];
        prop_assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-8), "{:?}", tail);
        prop_assert!(tail[tail.len() - 1] <= 1e-8 * (1.0 + a0.frobenius().powi(2)));
    }
}

fn net(rows: &[[&str; 2]; 2], plan: &SamplingPlan) -> HermitianNet {
    let r: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    HermitianNet::from_strings(&r, plan).unwrap()
}

const EXAMPLE_A: [[&str; 2]; 2] = [["1/(eps+eps^2)", "1/(eps-2*eps^2)"], ["", "1/eps"]];
const EXAMPLE_B: [[&str; 2]; 2] = [["1/(eps+eps^2)", "0.4/(eps-2*eps^2)"], ["", "1.3/eps^2"]];

#[test]
fn example_a_matches_trace_determinant_formula() {
    let h = net(&EXAMPLE_A, &SamplingPlan::default());
    let e: f64 = 0.1;
    let tr = (2.0 * e + e * e) / (e * e + e * e * e);
    let det = 1.0 / ((e + e * e) * e) - 1.0 / (e - 2.0 * e * e).powi(2);
    let disc = (tr * tr - 4.0 * det).sqrt();
    let sys = eigen_at(&h, e).unwrap();
    assert!((sys.values[0] - 0.5 * (tr + disc)).abs() <= 1e-12 * tr.abs());
    assert!((sys.values[1] - 0.5 * (tr - disc)).abs() <= 1e-12 * tr.abs());
    let mut j = jacobi(&h.at(e)).values;
    j.sort_by(|x, y| y.total_cmp(x));
    assert!((j[0] - sys.values[0]).abs() <= 1e-12 * tr.abs());
}

#[test]
fn diagonal_nets_sort_descending() {
    let h = net(&[["1/eps", "0"], ["", "1/eps^2"]], &SamplingPlan::default());
    let nets = eigen_nets(&h).unwrap();
    for (k, e) in h.plan().grid().into_iter().enumerate() {
        assert_eq!(nets.values[0].samples()[k], 1.0 / (e * e));
        assert_eq!(nets.values[1].samples()[k], 1.0 / e);
    }
}

fn scaled(x: &GNet, power: i32) -> GNet {
    x.mul(&GNet::alpha(x.plan()).map("alpha^k", move |e| e.powi(power))).unwrap()
}

#[test]
fn example_a_eigenvalue_asymptotics() {
    let h = net(&EXAMPLE_A, &SamplingPlan::default());
    let nets = eigen_nets(&h).unwrap();
    let (l1, l2) = (&nets.values[0], &nets.values[1]);
    let tol = 1e-6;
    assert_eq!(classify(l1, tol).kind, GClassKind::PureInfinity);
    // alpha * lambda ~ (2 +- 2) / 2
    assert!((classify(&scaled(l1, 1), tol).finite_limit().unwrap() - 2.0).abs() < 1e-6);
    assert!(classify(&scaled(l2, 1), tol).finite_limit().unwrap().abs() < 1e-6);
    // det ~ -5/eps and lambda_1 ~ 2/eps, so lambda_2 tends to -5/2 rather than 0
    let c2 = classify(l2, 1e-4);
    assert_eq!(c2.kind, GClassKind::Associated);
    assert!((c2.limit.unwrap() + 2.5).abs() < 1e-4);
    let gap = l1.sub(l2).unwrap();
    assert_eq!(classify(&gap, tol).kind, GClassKind::PureInfinity);
    assert!((classify(&scaled(&gap, 1), tol).finite_limit().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn example_b_gap_is_of_order_alpha_minus_two() {
    let h = net(&EXAMPLE_B, &SamplingPlan::default());
    let nets = eigen_nets(&h).unwrap();
    let gap = nets.values[0].sub(&nets.values[1]).unwrap();
    assert_eq!(classify(&gap, 1e-6).kind, GClassKind::PureInfinity);
    let lim = classify(&scaled(&gap, 2), 1e-6).finite_limit().unwrap();
    assert!((lim - 1.3).abs() < 1e-6, "{lim}");
}

#[test]
fn support_of_a_perturbed_diagonal() {
    let rows = [
        ["1+eps", "eps", "2*eps"],
        ["", "2-eps", "eps^2"],
        ["", "", "5+3*eps"],
    ];
    let r: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    let h = HermitianNet::from_strings(&r, &SamplingPlan::default()).unwrap();
    let rep = spectrum_support(&h, 1e-6).unwrap();
    assert_eq!(rep.support.len(), 3);
    for (s, want) in rep.support.iter().zip([1.0, 2.0, 5.0]) {
        assert!((s - want).abs() < 1e-3);
    }
    assert_eq!(rep.matches_limit, Some(true));
    assert!(rep.gaps.iter().all(|g| g.class.kind == GClassKind::Associated));
}

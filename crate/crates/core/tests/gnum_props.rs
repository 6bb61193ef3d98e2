use gentp_core::gnum::{ASSOCIATION_WINDOW, NEGLIGIBLE};
use gentp_core::{
    classify, combine, make_net, parse, restrict, sharp_valuation, support, CombineOp, GClassKind, GNet, Idempotent,
    NetSource, Operand, SamplingPlan,
};
use proptest::prelude::*;

fn plan() -> SamplingPlan {
    SamplingPlan::default()
}

fn net(src: &str) -> GNet {
    make_net(NetSource::Expr(&parse(src).unwrap()), &plan()).unwrap()
}

fn op(o: CombineOp, a: &GNet, b: &GNet) -> GNet {
    combine(o, a, Operand::Net(b)).unwrap()
}

fn samples(x: GNet) -> Vec<f64> {
    x.samples().to_vec()
}

fn alpha_pow(c: f64, r: f64) -> GNet {
    GNet::alpha(&plan()).map("c*alpha^r", move |e| c * e.powf(r))
}

const RATES: [f64; 6] = [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0];

/// Nets whose samples are small dyadic rationals, so every ring operation is
/// exact in floating point.
fn dyadic_net() -> impl Strategy<Value = GNet> {
    prop_oneof![
        (-64i32..64).prop_map(|k| GNet::constant(k as f64 / 8.0, &plan())),
        (-64i32..64, -64i32..64).prop_map(|(a, b)| GNet::osc(a as f64 / 4.0, b as f64 / 4.0, &plan())),
    ]
}

fn expr_net() -> impl Strategy<Value = GNet> {
    prop::sample::select(vec!["1/eps", "2+eps", "sin(1/eps)", "eps^2-3", "sqrt(eps)", "1/(eps+eps^2)", "cos(eps)/eps"])
        .prop_map(net)
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_laws_are_exact_on_dyadic_nets(x in dyadic_net(), y in dyadic_net(), z in dyadic_net()) {
        use CombineOp::*;
        prop_assert_eq!(samples(op(Add, &x, &y)), samples(op(Add, &y, &x)));
        prop_assert_eq!(samples(op(Mul, &x, &y)), samples(op(Mul, &y, &x)));
        prop_assert_eq!(samples(op(Add, &op(Add, &x, &y), &z)), samples(op(Add, &x, &op(Add, &y, &z))));
        prop_assert_eq!(samples(op(Mul, &op(Mul, &x, &y), &z)), samples(op(Mul, &x, &op(Mul, &y, &z))));
        prop_assert_eq!(
            samples(op(Mul, &x, &op(Add, &y, &z))),
            samples(op(Add, &op(Mul, &x, &y), &op(Mul, &x, &z)))
        );
    }

    #[test]
    fn ring_laws_hold_pointwise(x in expr_net(), y in expr_net(), z in expr_net()) {
        use CombineOp::*;
        prop_assert_eq!(samples(op(Add, &x, &y)), samples(op(Add, &y, &x)));
        prop_assert_eq!(samples(op(Mul, &x, &y)), samples(op(Mul, &y, &x)));
        let lhs = op(Mul, &x, &op(Add, &y, &z));
        let rhs = op(Add, &op(Mul, &x, &y), &op(Mul, &x, &z));
        // distributivity can cancel; compare against the magnitude of the terms
        for k in 0..lhs.samples().len() {
            let scale = (x.samples()[k] * y.samples()[k]).abs() + (x.samples()[k] * z.samples()[k]).abs();
            prop_assert!((lhs.samples()[k] - rhs.samples()[k]).abs() <= 1e-14 * scale);
        }
        let a = op(Mul, &op(Mul, &x, &y), &z);
        let b = op(Mul, &x, &op(Mul, &y, &z));
        prop_assert!(a.samples().iter().zip(b.samples()).all(|(p, q)| close(*p, *q)));
    }

    #[test]
    fn valuation_of_scaled_gauge_powers(c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0], k in 0usize..6) {
        let r = RATES[k];
        let v = sharp_valuation(&alpha_pow(c, r)).unwrap();
        prop_assert!((v.v_hat - r).abs() <= 0.05, "c={} r={} v={}", c, r, v.v_hat);
    }

    #[test]
    fn restriction_only_adds_zero_to_the_support(a in -8i32..8, b in -8i32..8, odd in any::<bool>()) {
        let x = GNet::osc(a as f64, b as f64, &plan());
        let e = if odd { Idempotent::odd_blocks() } else { Idempotent::even_blocks() };
        let full = support(&x, 1e-3).points;
        for p in support(&restrict(&x, &e), 1e-3).points {
            prop_assert!(p == 0.0 || full.iter().any(|q| (p - q).abs() <= 1e-3), "{} not in {:?}", p, full);
        }
    }

    #[test]
    fn associated_nets_have_singleton_support(x0 in -50.0f64..50.0, s in -3.0f64..3.0) {
        let x = GNet::alpha(&plan()).map("x0+s*eps", move |e| x0 + s * e);
        let c = classify(&x, 1e-6);
        prop_assert_eq!(c.kind, GClassKind::Associated);
        let lim = c.limit.unwrap();
        prop_assert!((lim - x0).abs() < 1e-6);
        let sup = support(&x, 1e-3).points;
        prop_assert_eq!(sup.len(), 1);
        prop_assert!((sup[0] - lim).abs() < 1e-3);
    }
}

#[test]
fn gauge_powers_classify_by_sign_of_rate() {
    for r in RATES {
        let kind = classify(&alpha_pow(1.0, r), 1e-6).kind;
        let want = match r {
            r if r > 0.0 => GClassKind::Infinitesimal,
            r if r < 0.0 => GClassKind::PureInfinity,
            _ => GClassKind::Associated,
        };
        assert_eq!(kind, want, "alpha^{r}");
    }
}

#[test]
fn restriction_is_idempotent() {
    let x = net("sin(1/eps)+2");
    let e = Idempotent::even_blocks();
    let once = restrict(&x, &e);
    assert_eq!(samples(restrict(&once, &e)), once.samples());
    let mask = e.mask(&plan());
    for (k, m) in mask.iter().enumerate() {
        if !m {
            assert_eq!(once.samples()[k], 0.0);
        }
    }
    assert_eq!(samples(restrict(&x, &Idempotent::all())), x.samples());
}

#[test]
fn infinitesimal_times_infinity_cancels() {
    let one = combine(CombineOp::Mul, &GNet::alpha(&plan()), Operand::Net(&net("1/eps"))).unwrap();
    let c = classify(&one, 1e-9);
    assert_eq!(c.kind, GClassKind::Associated);
    assert!((c.limit.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn negligible_tail_has_infinite_valuation() {
    let tiny = GNet::constant(NEGLIGIBLE / 10.0, &plan());
    assert_eq!(sharp_valuation(&tiny).unwrap().v_hat, f64::INFINITY);
    assert!(plan().count >= ASSOCIATION_WINDOW);
}

use geoconnect::action::{self, DiscretePath};
use geoconnect::fieldlang::FieldExpr;
use geoconnect::geometry::{catalog, MetricModel};
use geoconnect::spacetime::SpacetimeModel;
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fieldlang_matches_rust(a in -3.0..3.0f64, b in -3.0..3.0f64, x1 in coord(), x2 in coord()) {
        let src = format!("{a:?}*sin(x1)*x2^2 - exp(x1*x2/4) / (2 + cos({b:?}*x2))");
        let f = FieldExpr::scalar(&src, 2).unwrap();
        let exact = a * x1.sin() * x2 * x2 - (x1 * x2 / 4.0).exp() / (2.0 + (b * x2).cos());
        let got = f.eval_component(0, &[x1, x2]).unwrap();
        prop_assert!((got - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn fieldlang_derivatives_match_differences(a in -2.0..2.0f64, x1 in coord(), x2 in coord()) {
        let src = format!("[x1^3*x2 + {a:?}*sqrt(1 + x2^2), sin(x1 - x2)*exp(x2/3)]");
        let f = FieldExpr::vector(&src, 2).unwrap();
        for dir in 0..2 {
            let analytic = f.derivative(&[x1, x2], dir).unwrap().into_vector();
            let h = 1e-6;
            let mut plus = [x1, x2];
            plus[dir] += h;
            let mut minus = [x1, x2];
            minus[dir] -= h;
            let fp = f.eval(&plus).unwrap().into_vector();
            let fm = f.eval(&minus).unwrap().into_vector();
            for k in 0..2 {
                let fd = (fp[k] - fm[k]) / (2.0 * h);
                prop_assert!((fd - analytic[k]).abs() <= 1e-6 * (1.0 + analytic[k].abs()), "d{dir} comp {k}: {fd} vs {}", analytic[k]);
            }
        }
    }

    #[test]
    fn lorentzian_signature(d1 in -2.0..2.0f64, d2 in -2.0..2.0f64, beta in 0.05..3.0f64, x1 in coord(), x2 in coord(), n in 1.0..100.0f64) {
        let stationary = catalog::flat(2, &format!("[{d1:?} + x2/3, {d2:?}*cos(x1)]"), &format!("{beta:?} + x1^2/8"))
            .unwrap()
            .with_metric_sources(&["2 + sin(x1)", "x2/5", "x2/5", "1.5"])
            .unwrap();
        let lightlike = catalog::flat(2, &format!("[1 + {d1:?}^2, {d2:?}]"), "0").unwrap();
        let models = [SpacetimeModel::new(&stationary), SpacetimeModel::new(&lightlike), SpacetimeModel::perturbed(&lightlike, n).unwrap()];
        for st in models {
            let eig = SymmetricEigen::new(st.matrix(&[x1, x2]).unwrap()).eigenvalues;
            let neg = eig.iter().filter(|v| **v < 0.0).count();
            let pos = eig.iter().filter(|v| **v > 0.0).count();
            prop_assert_eq!((neg, pos), (1, 2), "eigenvalues {:?}", eig);
            // ∂_t has ⟨K, K⟩ = −β_eff: timelike unless β_eff vanishes.
            let kk = st.lorentz_inner(&[x1, x2], &[0.0, 0.0], 1.0, &[0.0, 0.0], 1.0).unwrap();
            prop_assert_eq!(kk, -st.beta_eff(&[x1, x2]).unwrap());
        }
    }
}

fn path_strategy(m: usize) -> impl Strategy<Value = DiscretePath> {
    proptest::collection::vec(coord(), 2 * (m + 1)).prop_map(|v| DiscretePath::from_flat(2, v).unwrap())
}

fn stationary_models() -> Vec<MetricModel> {
    vec![
        catalog::stationary_flat(2).unwrap(),
        catalog::flat(2, "[-x2, x1]", "1 + x1^2/4").unwrap(),
        catalog::flat(2, "[sin(x2), 1/2]", "2")
            .unwrap()
            .with_metric_sources(&["1 + x1^2/10", "0", "0", "2 + cos(x2)/2"])
            .unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduced_functional_equals_action_of_the_lift(path in path_strategy(16), dt in -3.0..3.0f64, which in 0usize..3) {
        let base = &stationary_models()[which];
        let st = SpacetimeModel::new(base);
        let j = action::reduced_j(&st, &path, dt).unwrap();
        let lift = action::reconstruct_time(&st, &path, dt, 0.5).unwrap();
        let f = action::action_f(&st, &lift).unwrap();
        prop_assert!((j - f).abs() <= 1e-10 * (1.0 + j.abs()), "J = {j}, F = {f}");
        let times = lift.times().unwrap();
        prop_assert!((times[times.len() - 1] - (0.5 + dt)).abs() <= 1e-12 * (1.0 + dt.abs()));
        // The lift has constant Killing pairing.
        let pairings = action::killing_pairings(&st, &lift).unwrap();
        let c = pairings[0];
        prop_assert!(pairings.iter().all(|v| (v - c).abs() <= 1e-10 * (1.0 + c.abs())));
        prop_assert!(action::lower_bound_check(&st, &path, dt).unwrap());
    }

    #[test]
    fn reduced_functional_is_reversal_invariant(path in path_strategy(12), dt in -3.0..3.0f64, n in 1.0..50.0f64) {
        let lightlike = catalog::flat(2, "[1 - x2/4, x1/4]", "0").unwrap();
        let st = SpacetimeModel::perturbed(&lightlike, n).unwrap();
        let j = action::reduced_jn(&st, &path, dt).unwrap();
        let back = action::reduced_jn(&st, &path.reversed(), -dt).unwrap();
        prop_assert!((j - back).abs() <= 1e-10 * (1.0 + j.abs()));
    }

    #[test]
    fn perturbed_functional_increases_with_n(path in path_strategy(12), dt in -3.0..3.0f64, m in 0.5..50.0f64, factor in 1.0..20.0f64) {
        let lightlike = catalog::flat_default(2).unwrap();
        let jm = action::reduced_jn(&SpacetimeModel::perturbed(&lightlike, m).unwrap(), &path, dt).unwrap();
        let jn = action::reduced_jn(&SpacetimeModel::perturbed(&lightlike, m * factor).unwrap(), &path, dt).unwrap();
        prop_assert!(jn >= jm - 1e-12 * (1.0 + jm.abs()));
    }
}

/// On a smooth curve, doubling the node count shrinks the quadrature change
/// roughly fourfold (second-order midpoint rule).
#[test]
fn refinement_converges_at_second_order() {
    let base = catalog::flat(2, "[-x2, x1]", "1 + x1^2/4").unwrap();
    let st = SpacetimeModel::new(&base);
    let curve = |m: usize| {
        DiscretePath::from_fn(2, m, |s, out| {
            out[0] = (2.0 * s).sin() + s;
            out[1] = s * s - 0.5 * (3.0 * s).cos();
        })
        .unwrap()
    };
    let values: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&m| action::reduced_j(&st, &curve(m), 1.5).unwrap())
        .collect();
    for w in values.windows(3) {
        let ratio = (w[0] - w[1]).abs() / (w[1] - w[2]).abs();
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio} from {values:?}");
    }
}

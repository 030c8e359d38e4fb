use gibbs_predictive::approx::{first_order_weights, second_order_weights};
use gibbs_predictive::predictive::{exact_weights, run_trajectory, Backend, DataSource, Settings};
use gibbs_predictive::{
    incomplete_gamma, pd_log_v, stable_log_v, GibbsModel, Observation, PartitionState, RngStream, SecondOrderForm,
};
use proptest::prelude::*;

fn model_strategy() -> impl Strategy<Value = GibbsModel> {
    (0.05f64..0.95, 0usize..3, 0.0f64..15.0).prop_map(|(a, kind, p)| match kind {
        0 => GibbsModel::poisson_dirichlet(a, p - a * 0.99).unwrap(),
        1 => GibbsModel::generalized_gamma(a, p).unwrap(),
        _ => GibbsModel::stable(a).unwrap(),
    })
}

fn counts() -> impl Strategy<Value = (u64, u64)> {
    (1u64..80).prop_flat_map(|n| (Just(n), 1..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weights_are_normalized(model in model_strategy(), (n, k) in counts()) {
        let a = model.alpha();
        let settings = Settings { precision_digits: 150, ..Settings::default() };
        let exact = exact_weights(&model, n, k, &settings).unwrap();
        prop_assert!(exact.normalization_defect(n, k, a).abs() < 1e-12);
        prop_assert!(exact.new_mass > 0.0 && exact.new_mass < 1.0);
        let first = first_order_weights(&model, n, k).unwrap();
        prop_assert!(first.normalization_defect(n, k, a).abs() < 1e-12);
        if let Ok(r) = second_order_weights(&model, n, k, SecondOrderForm::Rational) {
            prop_assert!(r.normalization_defect(n, k, a).abs() < 1e-12);
        }
    }

    #[test]
    fn pd_weight_ratios((a, theta) in (0.05f64..0.95, 0.0f64..20.0), (n, k) in counts()) {
        let v = |n, k| pd_log_v(n, k, a, theta).unwrap().ln_abs;
        let new = (v(n + 1, k + 1) - v(n, k)).exp();
        let old = (v(n + 1, k) - v(n, k)).exp();
        let nf = n as f64;
        prop_assert!((new - (theta + k as f64 * a) / (theta + nf)).abs() < 1e-11);
        prop_assert!((old - 1.0 / (theta + nf)).abs() < 1e-11);
    }

    #[test]
    fn stable_is_pd_with_zero_theta(a in 0.05f64..0.95, (n, k) in counts()) {
        let s = stable_log_v(n, k, a).unwrap().ln_abs;
        let p = pd_log_v(n, k, a, 0.0).unwrap().ln_abs;
        prop_assert!((s - p).abs() < 1e-10 * (1.0 + s.abs()));
    }

    #[test]
    fn incomplete_gamma_recurrence(a in -6.0f64..6.0, b in 0.05f64..30.0) {
        prop_assume!((a - a.round()).abs() > 1e-6 || a.round() != 0.0);
        let lhs = incomplete_gamma(a + 1.0, b).unwrap();
        let rhs = a * incomplete_gamma(a, b).unwrap() + b.powf(a) * (-b).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(b.powf(a) * (-b).exp()));
    }

    #[test]
    fn state_ignores_arrival_order(labels in prop::collection::vec(0u64..12, 1..60), seed in any::<u64>()) {
        let mut shuffled = labels.clone();
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let fold = |ls: &[u64]| ls.iter().fold(PartitionState::new(), |st, &l| st.observe(Observation::new(l)));
        let (a, b) = (fold(&labels), fold(&shuffled));
        prop_assert_eq!(a.n(), b.n());
        prop_assert_eq!(a.k(), b.k());
        prop_assert_eq!(a.sorted_frequencies(), b.sorted_frequencies());
        prop_assert_eq!(a.frequencies().iter().sum::<u64>(), a.n());
    }

    #[test]
    fn trajectories_are_consistent(model in model_strategy(), seed in any::<u64>()) {
        let backends = [Backend::Exact, Backend::First, Backend::SecondRational];
        let rows = run_trajectory(&model, &DataSource::Zeta(1.5), 40, &backends, &Settings::default(), RngStream::new(seed)).unwrap();
        let mut prev = 0;
        for (i, r) in rows.iter().enumerate() {
            prop_assert_eq!(r.n, i as u64 + 1);
            prop_assert!(r.k >= prev && r.k <= prev + 1 && r.k <= r.n);
            prev = r.k;
            let exact = r.weights[0].as_ref().unwrap();
            prop_assert!((0.0..=1.0).contains(&exact.new_mass));
        }
    }
}

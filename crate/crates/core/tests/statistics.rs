use gibbs_predictive::montecarlo::{mc_weight, Execution};
use gibbs_predictive::predictive::{exact_weights, run_trajectory, sample_next, Backend, DataSource, Settings};
use gibbs_predictive::stable::{sample_exp_tilted_stable, RejectionCounter};
use gibbs_predictive::stats::chi_square_gof;
use gibbs_predictive::{ngg_predictive_weight_exact, GibbsModel, PartitionState, RngStream, StableIndex};

#[test]
fn acceptance_falls_with_tilt() {
    let a = StableIndex::new(0.5).unwrap();
    let rate = |c: f64| {
        let mut rng = RngStream::new(11).labelled(&format!("tilt/{c}")).rng();
        let mut counter = RejectionCounter::default();
        for _ in 0..10_000 {
            sample_exp_tilted_stable(a, c, &mut rng, &mut counter).unwrap();
        }
        counter.acceptance_rate()
    };
    assert!(rate(1.0) > rate(100.0));
}

#[test]
fn first_pd_draw_is_new_with_the_exact_rate() {
    let model = GibbsModel::poisson_dirichlet(0.5, 1.0).unwrap();
    let state = PartitionState::from_labels([7u64]);
    let w = exact_weights(&model, 1, 1, &Settings::default()).unwrap();
    assert!((w.new_mass - 0.75).abs() < 1e-15);
    let mut rng = RngStream::new(3).rng();
    let draws = 20_000;
    let new = (0..draws).filter(|_| sample_next(&state, 0.5, &w, &mut rng).unwrap().label != 7).count() as u64;
    let (_, _, p) = chi_square_gof(&[new, draws - new], &[0.75, 0.25]).unwrap();
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn sample_next_follows_the_weights() {
    let model = GibbsModel::poisson_dirichlet(0.25, 2.0).unwrap();
    let state = PartitionState::from_labels([1u64, 1, 1, 2, 3, 3]);
    let w = exact_weights(&model, state.n(), state.k(), &Settings::default()).unwrap();
    let mut rng = RngStream::new(5).rng();
    let mut counts = [0u64; 4];
    for _ in 0..40_000 {
        let l = sample_next(&state, 0.25, &w, &mut rng).unwrap().label;
        counts[if l > 3 { 0 } else { l as usize }] += 1;
    }
    let probs: Vec<f64> = std::iter::once(w.new_mass)
        .chain(state.frequencies().iter().map(|&f| (f as f64 - 0.25) * w.existing_factor))
        .collect();
    let (_, _, p) = chi_square_gof(&counts, &probs).unwrap();
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn urn_growth_matches_n_to_the_alpha() {
    let alpha = 0.5;
    let model = GibbsModel::stable(alpha).unwrap();
    let ratio = |n_max: u64, seed: u64| {
        let rows = run_trajectory(
            &model,
            &DataSource::Urn,
            n_max,
            &[Backend::Exact],
            &Settings::default(),
            RngStream::new(seed),
        )
        .unwrap();
        rows.last().unwrap().k as f64 / (n_max as f64).powf(alpha)
    };
    let mean = |n| (0..20).map(|s| ratio(n, s)).sum::<f64>() / 20.0;
    let (small, large) = (mean(2_000), mean(8_000));
    assert!((large / small - 1.0).abs() < 0.15, "{small} vs {large}");
}

#[test]
fn monte_carlo_is_unbiased() {
    let (n, k, alpha, tau) = (20, 8, 0.5, 3.0);
    let model = GibbsModel::generalized_gamma(alpha, tau).unwrap();
    let exact = ngg_predictive_weight_exact(n, k, alpha, tau, 50).unwrap();
    let stream = RngStream::new(17).labelled("unbiased");
    let estimates: Vec<f64> = (0..50)
        .map(|i| mc_weight(&model, n, k, 1_000, stream.substream(i), Execution::Sequential).unwrap().estimate)
        .collect();
    let mean = estimates.iter().sum::<f64>() / 50.0;
    let sd = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 49.0).sqrt();
    let z = (mean - exact) / (sd / 50f64.sqrt());
    assert!(z.abs() < 4.0, "mean {mean}, exact {exact}, z {z}");
}

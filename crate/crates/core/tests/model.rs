use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use wsn_compress::model::{aarma_compress, ma_ar_compress, model_decompress, pr_compress, AarmaParams, ModelPieces};
use wsn_compress::signal::{generate_correlated, CorrelationSpec, NoiseSpec};
use wsn_compress::{TimeSeries, Tolerance};

fn generate(n_star: usize, seed: u64) -> TimeSeries {
    let spec = CorrelationSpec::new(n_star, 0.05).unwrap();
    generate_correlated(&spec, 500, 0.0, 1.0, &NoiseSpec::new(0.04, seed).unwrap()).unwrap()
}

#[test]
fn higher_order_polynomials_need_fewer_pieces() {
    let tol = Tolerance::new(0.16).unwrap();
    let fewer = (0..100)
        .filter(|&seed| {
            let ts = generate(290, seed);
            pr_compress(&ts, tol, 5).unwrap().0.len() <= pr_compress(&ts, tol, 2).unwrap().0.len()
        })
        .count();
    assert!(fewer >= 80, "{fewer} of 100");
}

fn ma_ar_mean_cost(p: usize, n_star: usize, seeds: u64) -> f64 {
    let tol = Tolerance::new(0.16).unwrap();
    (0..seeds)
        .map(|s| ma_ar_compress(&generate(n_star, s), tol, p).unwrap().1.total() as f64)
        .sum::<f64>()
        / seeds as f64
}

#[test]
fn ma_ar_mean_cost_follows_correlation_length() {
    for p in 2..=5 {
        let costs: Vec<f64> = [10, 50, 110, 290].iter().map(|&n| ma_ar_mean_cost(p, n, 30)).collect();
        assert!(costs.windows(2).all(|w| w[1] >= w[0]), "p={p}: {costs:?}");
    }
}

#[test]
#[ignore = "per-seed ordering holds in only 73-79% of paired seeds; the mean ordering is tested above"]
fn ma_ar_cost_monotone_per_seed() {
    let tol = Tolerance::new(0.16).unwrap();
    for p in 2..=5 {
        let ok = (0..100)
            .filter(|&s| {
                let c: Vec<u64> = [10, 50, 110, 290]
                    .iter()
                    .map(|&n| ma_ar_compress(&generate(n, s), tol, p).unwrap().1.total())
                    .collect();
                c.windows(2).all(|w| w[1] >= w[0])
            })
            .count();
        assert!(ok >= 90, "p={p}: {ok} of 100");
    }
}

#[test]
fn aarma_refits_after_a_regime_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut x = vec![0.0f64; 500];
    for n in 1..500 {
        let phi = if n < 250 { 0.9 } else { 0.2 };
        x[n] = phi * x[n - 1] + noise.sample(&mut rng);
    }
    let ts = TimeSeries::new(x.clone()).unwrap();
    let tol = Tolerance::new(0.2).unwrap();
    let (records, _) = aarma_compress(&ts, tol, AarmaParams::default()).unwrap();
    assert!(records.iter().any(|r| (250..300).contains(&r.start_index)), "{:?}", records.iter().map(|r| r.start_index).collect::<Vec<_>>());
    let rec = model_decompress(ModelPieces::Ar(&records), x.len()).unwrap();
    assert!(rec.max_abs_error(&x) <= 0.2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn aarma_single_step_is_sample_exact(x in prop::collection::vec(-3.0..3.0f64, 3..150), eps in 0.0..1.5f64) {
        let ts = TimeSeries::new(x.clone()).unwrap();
        let (records, _) = aarma_compress(&ts, Tolerance::new(eps).unwrap(), AarmaParams::default()).unwrap();
        let rec = model_decompress(ModelPieces::Ar(&records), x.len()).unwrap();
        prop_assert!(rec.max_abs_error(&x) <= eps);
    }

    #[test]
    fn model_codecs_round_trip(x in prop::collection::vec(-3.0..3.0f64, 6..150), eps in 0.0..1.5f64, p in 2usize..=5) {
        let ts = TimeSeries::new(x.clone()).unwrap();
        let tol = Tolerance::new(eps).unwrap();
        let (pieces, _) = pr_compress(&ts, tol, p).unwrap();
        prop_assert!(model_decompress(ModelPieces::Polynomials(&pieces), x.len()).unwrap().max_abs_error(&x) <= eps);
        let (records, _) = ma_ar_compress(&ts, tol, p).unwrap();
        prop_assert!(model_decompress(ModelPieces::Ar(&records), x.len()).unwrap().max_abs_error(&x) <= eps);
    }
}

use wdmarket::rng::{stream, StreamId};
use wdmarket::stats::spearman;
use wdmarket_sim::coupling::{couple_correlation, Rho};

#[test]
fn independent_scenario_has_no_rank_correlation() {
    let reps = 10_000;
    let mut total = 0.0;
    for r in 0..reps {
        let mut rng = stream(5, StreamId::new(r, 0, 0));
        let values: Vec<f64> = (0..8).map(|i| (i as f64 * 0.37 + r as f64).sin()).collect();
        let theta = couple_correlation(&values, 1.5, Rho::Independent, &mut rng);
        total += spearman(&values, &theta);
    }
    let mean = total / reps as f64;
    assert!(mean.abs() <= 0.05, "mean Spearman {mean}");
}

#[test]
fn coupled_scenarios_are_rank_exact() {
    for r in 0..200 {
        let mut rng = stream(6, StreamId::new(r, 0, 0));
        let values: Vec<f64> = (0..8).map(|i| ((i * 7 + r as usize) % 11) as f64 * 0.1).collect();
        let pos = couple_correlation(&values, 1.0, Rho::Positive, &mut rng);
        let neg = couple_correlation(&values, 1.0, Rho::Negative, &mut rng);
        assert!((spearman(&values, &pos) - 1.0).abs() < 1e-12);
        assert!((spearman(&values, &neg) + 1.0).abs() < 1e-12);
    }
}

use purify_core::queries::{
    linf_distance, mwem, pure_mwem, HistogramDataset, MwemConfig, PureMwemConfig, QueryWorkload,
};
use purify_core::RngStream;

fn mwem_error(iterations: usize, seeds: u64) -> f64 {
    (0..seeds)
        .map(|s| {
            let mut rng = RngStream::new(100, s);
            let w = QueryWorkload::random_counting(5, 20, &mut rng).unwrap();
            let data = HistogramDataset::synthetic(5, 2000, &mut rng).unwrap();
            let out = mwem(&data, &w, &MwemConfig::new(iterations, 1.0), &mut rng).unwrap();
            let truth = w.eval_dataset(&data).unwrap();
            linf_distance(&truth, &w.eval_distribution(&out.distribution()).unwrap())
        })
        .sum::<f64>()
        / seeds as f64
}

#[test]
fn mwem_error_falls_with_iterations() {
    let errs: Vec<f64> = [1, 5, 20].iter().map(|&t| mwem_error(t, 20)).collect();
    println!("mwem errors {errs:?}");
    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
}

fn pure_error(n: usize, seeds: u64) -> (f64, f64) {
    let mut err = 0.0;
    let mut worst_gap_ratio: f64 = 0.0;
    for s in 0..seeds {
        let mut rng = RngStream::new(200 + n as u64, s);
        let w = QueryWorkload::random_counting(4, 10, &mut rng).unwrap();
        let data = HistogramDataset::synthetic(4, n, &mut rng).unwrap();
        let out = pure_mwem(&data, &w, 1.0, &PureMwemConfig::default(), &mut rng).unwrap();
        assert!(out.samples.iter().all(|&x| x < 16));
        let truth = w.eval_dataset(&data).unwrap();
        let released = w.eval_samples(&out.samples).unwrap();
        err += linf_distance(&truth, &released);
        let synthetic = w.eval_distribution(&out.mwem.distribution()).unwrap();
        let m = out.sizes.samples as f64;
        let bound = 2.0 * ((2.0 * w.len() as f64 * n as f64).ln() / (2.0 * m)).sqrt();
        worst_gap_ratio = worst_gap_ratio.max(linf_distance(&synthetic, &released) / bound);
    }
    (err / seeds as f64, worst_gap_ratio)
}

#[test]
fn pure_mwem_tracks_mwem_and_improves_with_n() {
    let results: Vec<(f64, f64)> = [100, 800, 6400].iter().map(|&n| pure_error(n, 10)).collect();
    println!("pure mwem (error, worst gap ratio) {results:?}");
    for (_, ratio) in &results {
        assert!(*ratio <= 1.0);
    }
    assert!(results[0].0 > results[1].0 && results[1].0 > results[2].0);
}

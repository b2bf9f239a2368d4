use purify_core::adaptive::{
    adassp, mode_release, pure_adassp, pure_ptr, AdaSspConfig, BoundedMedian, RegressionInstance,
};
use purify_core::audit::estimate_max_divergence;
use purify_core::linalg::{norm2, sub};
use purify_core::{LogProb, RngStream};

#[test]
fn pure_ptr_passes_divergence_audit() {
    // Discretize the purified median into 16 bins and compare neighbors.
    let q = BoundedMedian::new(0.0, 1.0).unwrap();
    let a: Vec<f64> = vec![0.2, 0.4, 0.4, 0.5, 0.9];
    let mut b = a.clone();
    b[4] = 0.0;
    let (eps, eps_prime) = (0.5, 0.5);
    let delta = LogProb::new(1e-6).unwrap();
    let omega = LogProb::new(0.05).unwrap();
    let mech = |data: &[f64], rng: &mut RngStream| -> usize {
        let out = pure_ptr(&q, data, eps, eps_prime, delta, omega, 0.1, rng).unwrap();
        ((out.value[0].clamp(0.0, 1.0 - 1e-12)) * 16.0) as usize
    };
    let mut rng = RngStream::new(90, 0);
    let rep =
        estimate_max_divergence(mech, &a[..], &b[..], 16, 200_000, Some(2.0 * eps + eps_prime), &mut rng)
            .unwrap();
    println!("pure ptr divergence {:.3} ± {:.3}", rep.estimate(), rep.conf_radius());
    assert_eq!(rep.one_sided, 0);
    assert!(!rep.violated());
}

#[test]
fn mode_release_recovers_clear_mode() {
    // Gap 200 exceeds the 192 required for |X| = 256, ε = 1.
    let mut data = vec![42u64; 500];
    data.extend(std::iter::repeat_n(7u64, 100));
    let mut rng = RngStream::new(91, 0);
    let trials = 3000;
    let hits = (0..trials).filter(|_| mode_release(&data, 256, 1.0, &mut rng).unwrap().item == 42).count();
    let rate = hits as f64 / trials as f64;
    println!("mode rate {rate:.4}");
    assert!(rate >= 1.0 - 3.0 / 256.0);
}

#[test]
fn adassp_error_shrinks_with_n() {
    let mse = |n: usize| -> f64 {
        (0..8)
            .map(|s| {
                let mut rng = RngStream::new(92 + n as u64, s);
                let (inst, truth) = RegressionInstance::synthetic(n, 4, 0.1, &mut rng).unwrap();
                let out = pure_adassp(&inst, 1.0, &AdaSspConfig::default(), &mut rng).unwrap();
                norm2(&sub(&out.theta, &truth)).powi(2)
            })
            .sum::<f64>()
            / 8.0
    };
    let errs: Vec<f64> = [200, 800, 3200].iter().map(|&n| mse(n)).collect();
    println!("adassp errors {errs:?}");
    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
}

#[test]
fn adassp_noise_only_enters_through_perturbations() {
    let mut rng = RngStream::new(93, 0);
    let (inst, _) = RegressionInstance::synthetic(500, 3, 0.1, &mut rng).unwrap();
    let cfg = AdaSspConfig { noise: false, ..Default::default() };
    let delta = LogProb::new(1e-6).unwrap();
    let a = adassp(&inst, 1.0, delta, &cfg, &mut RngStream::new(1, 0)).unwrap();
    let b = adassp(&inst, 1.0, delta, &cfg, &mut RngStream::new(2, 0)).unwrap();
    assert_eq!(a, b);
}

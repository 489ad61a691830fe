//! Statistical behaviour of the reconstruction as the count scale grows.

use aptsim_core::dynamics::{DensityMatrix, Evolution};
use aptsim_core::model::AptParams;
use aptsim_core::tomography::{mle_reconstruct, simulate_counts, BASIS_ORDER};

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn states() -> Vec<DensityMatrix> {
    let p = AptParams::apt(1.2).unwrap();
    let e = Evolution::new(p, p);
    let mut out: Vec<DensityMatrix> = [0.0, 1.0, 2.4, 3.7].iter().map(|&t| e.evolve(t).unwrap().state).collect();
    out.push(DensityMatrix::maximally_mixed());
    out
}

#[test]
fn median_fidelity_improves_with_counts() {
    let states = states();
    let mut medians = Vec::new();
    for total in [1_000u64, 10_000, 1_000_000] {
        let mut fids = Vec::new();
        for (k, rho) in states.iter().enumerate() {
            for seed in 0..8u64 {
                let counts = simulate_counts(rho, total, 1000 * k as u64 + seed).unwrap();
                let mle = mle_reconstruct(&counts).unwrap().with_truth(rho);
                fids.push(mle.fidelity_vs_truth.unwrap());
            }
        }
        medians.push(median(fids));
    }
    assert!(medians.windows(2).all(|w| w[1] >= w[0]), "{medians:?}");
    assert!(medians[2] > 0.999, "{medians:?}");
}

#[test]
fn reconstructions_are_density_matrices() {
    // Sparse, lopsided counts push the estimate onto the boundary of the
    // state space.
    for seed in 0..20u64 {
        let rho = &states()[(seed % 5) as usize];
        let mut counts = simulate_counts(rho, 50, seed).unwrap();
        for (k, r) in counts.iter_mut().enumerate() {
            if (k as u64 + seed) % 3 == 0 {
                r.observed = 0;
            }
        }
        let m = mle_reconstruct(&counts).unwrap().rho_hat;
        assert!(m.matrix().hermiticity_defect() < 1e-12);
        assert!((m.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(m.eigenvalues().iter().all(|&x| x >= -1e-12), "seed {seed}: {:?}", m.eigenvalues());
    }
    assert_eq!(BASIS_ORDER.len(), 16);
}

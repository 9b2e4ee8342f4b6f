#![allow(dead_code)]

use num_complex::Complex64;
use phasespace::fock::mix;
use phasespace::DensityMatrix;
use rand::Rng;

/// Mixture of three random pure states supported on levels `0..levels`.
pub fn random_state<R: Rng>(rng: &mut R, levels: usize, cutoff: usize) -> DensityMatrix {
    let states: Vec<DensityMatrix> = (0..3)
        .map(|_| {
            let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
            for a in amps.iter_mut().take(levels) {
                *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            DensityMatrix::from_pure(&amps, cutoff + 1, 1).unwrap()
        })
        .collect();
    let w: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut w: Vec<f64> = w.iter().map(|x| x / total).collect();
    w[0] = 1.0 - w[1] - w[2];
    mix(&states, &w).unwrap()
}

/// `<alpha|rho|alpha> / pi` with the coherent amplitudes built by a running
/// product instead of factorial logs.
pub fn husimi_oracle(rho: &DensityMatrix, alpha: Complex64) -> f64 {
    let d = rho.dim();
    let mut c = Vec::with_capacity(d);
    let mut term = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..d {
        if n > 0 {
            term *= alpha / (n as f64).sqrt();
        }
        c.push(term);
    }
    let e = rho.entries();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..d {
        for n in 0..d {
            acc += c[m].conj() * e[(m, n)] * c[n];
        }
    }
    acc.re / std::f64::consts::PI
}

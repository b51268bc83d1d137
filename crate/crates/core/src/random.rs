//! Seeded random inputs.
//!
//! The generator is ChaCha20 (`rand_chacha`), seeded with `seed_from_u64(seed)`
//! and switched to stream `index` for sample `index`, so every sample of a batch
//! is reproducible on its own. Normal deviates use Box–Muller on 53-bit
//! uniforms; the recipe is spelled out in the README so other implementations
//! can reproduce the matrices bit for bit (modulo libm differences).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::circuit::{Circuit, Gate};
use crate::mat::ComplexMatrix;

/// Generator for sample `index` of the batch seeded by `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform in `[0, 1)` from the top 53 bits of one `u64`.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal deviate (Box–Muller, cosine branch).
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Haar-random real orthogonal `n×n` matrix with determinant `det` (±1).
///
/// QR of a standard-normal matrix, columns multiplied by `sign(R_ii)`; if the
/// determinant is wrong the first row is negated.
pub fn haar_orthogonal(n: usize, seed: u64, index: u64, det: i8) -> ComplexMatrix {
    let mut rng = sample_rng(seed, index);
    haar_orthogonal_with(n, &mut rng, det)
}

pub fn haar_orthogonal_with(n: usize, rng: &mut impl RngCore, det: i8) -> ComplexMatrix {
    assert!(det == 1 || det == -1, "determinant must be ±1");
    // Row-major fill so the stream order is independent of storage layout.
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = standard_normal(rng);
        }
    }
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant().signum() != det as f64 {
        q.row_mut(0).neg_mut();
    }
    ComplexMatrix::from_real_nalgebra(&q)
}

/// Haar-random unitary (QR of a complex Ginibre matrix with phase correction).
pub fn haar_unitary(n: usize, rng: &mut impl RngCore) -> ComplexMatrix {
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = Complex64::new(standard_normal(rng), standard_normal(rng));
        }
    }
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(&q)
}

/// Random circuit over CNOT / Ry / Rz with up to `max_gates` gates. Angles
/// include exact multiples of π/2 now and then to exercise merges and deletions.
pub fn random_circuit(n: usize, max_gates: usize, rng: &mut impl RngCore) -> Circuit {
    let len = rng.random_range(0..=max_gates);
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let kind = if n > 1 { rng.random_range(0..3) } else { rng.random_range(1..3) };
        let g = match kind {
            0 => {
                let control = rng.random_range(1..=n);
                let mut target = rng.random_range(1..n);
                if target >= control {
                    target += 1;
                }
                Gate::cnot(control, target)
            }
            k => {
                let qubit = rng.random_range(1..=n);
                let angle = if rng.random_range(0..5) == 0 {
                    rng.random_range(-4..=4) as f64 * PI / 2.0
                } else {
                    rng.random_range(-7.0..7.0)
                };
                if k == 1 {
                    Gate::ry(qubit, angle)
                } else {
                    Gate::rz(qubit, angle)
                }
            }
        };
        c.push(g).expect("indices in range");
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::check_real_orthogonal;

    #[test]
    fn deterministic_and_orthogonal() {
        let a = haar_orthogonal(4, 42, 0, 1);
        let b = haar_orthogonal(4, 42, 0, 1);
        assert_eq!(a, b);
        assert_ne!(a, haar_orthogonal(4, 42, 1, 1));
        for (n, det) in [(4, 1), (4, -1), (8, 1)] {
            for index in 0..20 {
                let x = haar_orthogonal(n, 3, index, det);
                let d = check_real_orthogonal(&x, 1e-12).unwrap();
                assert!((d - det as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_range() {
        let mut rng = sample_rng(1, 0);
        for _ in 0..1000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = sample_rng(5, 0);
        for n in [2, 4, 8] {
            assert!(haar_unitary(n, &mut rng).unitarity_deviation() < 1e-13);
        }
    }
}

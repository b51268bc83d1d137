//! Oracles shared by the integration tests. None of these reuse the library's
//! own exponential or factorization code.
#![allow(dead_code)]

use num_complex::Complex64;
use orthosynth::mat::ComplexMatrix;
use orthosynth::pauli::PauliString;
use orthosynth::random::uniform;
use orthosynth::CartanBasisSet;
use rand::RngCore;

/// Dense `exp(m)` by scaling and squaring with a degree-24 Taylor polynomial.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    let norm = m.frobenius_norm();
    let mut s = 0;
    while norm / f64::from(1u32 << s) > 0.25 {
        s += 1;
    }
    let scaled = m.scale(Complex64::new(1.0 / f64::from(1u32 << s), 0.0));
    let id = ComplexMatrix::identity(m.dim());
    let mut sum = id.clone();
    let mut term = id;
    for k in 1..=24 {
        term = (&term * &scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Hermitian `Σ cₖ·Pₖ` assembled entrywise from the Pauli matrices.
pub fn hermitian(terms: &[(f64, PauliString)]) -> ComplexMatrix {
    let dim = 1 << terms[0].1.num_qubits();
    let mut h = ComplexMatrix::zeros(dim);
    for (c, p) in terms {
        h = &h + &p.to_matrix().scale(Complex64::new(*c, 0.0));
    }
    h
}

/// `exp(−i·Σ cₖ·Pₖ)` through the dense oracle.
pub fn exp_minus_i(terms: &[(f64, PauliString)]) -> ComplexMatrix {
    expm(&hermitian(terms).scale(Complex64::new(0.0, -1.0)))
}

pub fn angle(rng: &mut impl RngCore) -> f64 {
    (2.0 * uniform(rng) - 1.0) * std::f64::consts::PI
}

/// Random coefficients in `(−π, π)` on every element of `basis`.
pub fn random_terms(basis: &CartanBasisSet, rng: &mut impl RngCore) -> Vec<(f64, PauliString)> {
    basis.elements.iter().map(|p| (angle(rng), *p)).collect()
}

/// Random group element `exp(−i·Σ rⱼ·Bⱼ)` over `basis`.
pub fn random_element(basis: &CartanBasisSet, rng: &mut impl RngCore) -> ComplexMatrix {
    exp_minus_i(&random_terms(basis, rng))
}

pub fn ry(a: f64) -> ComplexMatrix {
    let (s, c) = a.sin_cos();
    ComplexMatrix::from_real(2, &[c, -s, s, c]).unwrap()
}

pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm()
}

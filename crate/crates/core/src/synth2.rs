//! Two-qubit synthesis: SO(4) into at most 2 CNOT + 6 Ry, and O(4) with
//! determinant −1 into at most 3 CNOT + 6 Ry.
//!
//! `x = k1·A(a,b)·k2` with `k1, k2 = Ry(β)⊗Ry(α)` and
//! `A(a,b) = exp(−i(a·XY + b·YZ)) = C₂¹·Ry₁(b)·Ry₂(a)·C₂¹`.

use serde::{Deserialize, Serialize};

use crate::circuit::{self, counts, optimize, simulate, Circuit, Gate, GateCounts};
use crate::error::{Error, Result};
use crate::kak::{kak_factor, InvolutionSpec, KakResult};
use crate::mat::{check_real_orthogonal, kron, ComplexMatrix};
use crate::tolerance::Tolerances;

/// Knobs shared by the synthesizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthOptions {
    pub tol: Tolerances,
    pub optimize: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            tol: Tolerances::default(),
            optimize: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synth2Result {
    pub circuit: Circuit,
    pub kak: KakResult,
    /// `‖simulate(circuit) − x‖_F`, no phase slack.
    pub reconstruction_error: f64,
    pub counts: GateCounts,
    /// Counts before optimization.
    pub raw_counts: GateCounts,
    pub local_angles: LocalAngles,
}

/// `k1 = Ry(beta1)⊗Ry(alpha1)`, `k2 = Ry(beta2)⊗Ry(alpha2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalAngles {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
}

fn ry(a: f64) -> ComplexMatrix {
    let (s, c) = a.sin_cos();
    ComplexMatrix::from_real(2, &[c, -s, s, c]).expect("2x2")
}

/// Reads `(β, α)` from `k = Ry(β)⊗Ry(α)`.
fn product_angles(k: &ComplexMatrix, tol: f64) -> Result<(f64, f64)> {
    // Top-left block is cos β·Ry(α), bottom-left is sin β·Ry(α).
    let block = |r0: usize| [k[(r0, 0)].re, k[(r0, 1)].re, k[(r0 + 1, 0)].re, k[(r0 + 1, 1)].re];
    let (top, bottom) = (block(0), block(2));
    let norm = |b: &[f64; 4]| b.iter().map(|x| x * x).sum::<f64>();
    let r = if norm(&top) >= norm(&bottom) { top } else { bottom };
    let alpha = (r[2] - r[1]).atan2(r[0] + r[3]);
    let ra = [alpha.cos(), -alpha.sin(), alpha.sin(), alpha.cos()];
    let dot = |b: &[f64; 4]| b.iter().zip(&ra).map(|(x, y)| x * y).sum::<f64>() / 2.0;
    let beta = dot(&bottom).atan2(dot(&top));
    let residual = (&kron(&ry(beta), &ry(alpha)) - k).frobenius_norm();
    if residual > tol {
        return Err(Error::ProductRepairFailed { residual });
    }
    Ok((beta, alpha))
}

/// `A(a,b) = exp(−i(a·XY + b·YZ))` in application order.
pub fn emit_a2_circuit(a: f64, b: f64) -> Circuit {
    Circuit::from_gates(
        2,
        vec![Gate::cnot(2, 1), Gate::ry(2, a), Gate::ry(1, b), Gate::cnot(2, 1)],
    )
    .expect("valid two-qubit gates")
}

pub fn synth_so4(x: &ComplexMatrix, opts: &SynthOptions) -> Result<Synth2Result> {
    if x.dim() != 4 {
        return Err(Error::DimMismatch {
            expected: 4,
            found: x.dim(),
        });
    }
    let det = check_real_orthogonal(x, opts.tol.input)?;
    if (det - 1.0).abs() > opts.tol.input {
        return Err(Error::WrongDeterminant {
            expected: 1.0,
            found: det,
        });
    }
    let kak = kak_factor(x, InvolutionSpec::two_qubit(), &opts.tol)?;
    let (beta1, alpha1) = product_angles(&kak.k1, opts.tol.product)?;
    let (beta2, alpha2) = product_angles(&kak.k2, opts.tol.product)?;
    let mut raw = Circuit::new(2);
    for g in [Gate::ry(1, beta2), Gate::ry(2, alpha2)] {
        raw.push(g)?;
    }
    raw.append(&emit_a2_circuit(kak.params[0], kak.params[1]))?;
    for g in [Gate::ry(1, beta1), Gate::ry(2, alpha1)] {
        raw.push(g)?;
    }
    let circuit = if opts.optimize {
        optimize(&raw, opts.tol.zero_angle)
    } else {
        raw.clone()
    };
    let reconstruction_error = (&simulate(&circuit) - x).frobenius_norm();
    Ok(Synth2Result {
        counts: counts(&circuit),
        raw_counts: counts(&raw),
        circuit,
        kak,
        reconstruction_error,
        local_angles: LocalAngles {
            alpha1,
            beta1,
            alpha2,
            beta2,
        },
    })
}

/// `C₂¹` as a 4×4 matrix.
pub fn cnot21() -> ComplexMatrix {
    simulate(&Circuit::from_gates(2, vec![Gate::cnot(2, 1)]).expect("valid gate"))
}

/// Determinant −1: `x = C·x′` with `C = C₂¹`, so the circuit is that of `x′`
/// followed by `C`.
pub fn synth_o4(x: &ComplexMatrix, opts: &SynthOptions) -> Result<Synth2Result> {
    if x.dim() != 4 {
        return Err(Error::DimMismatch {
            expected: 4,
            found: x.dim(),
        });
    }
    let det = check_real_orthogonal(x, opts.tol.input)?;
    if (det + 1.0).abs() > opts.tol.input {
        return Err(Error::WrongDeterminant {
            expected: -1.0,
            found: det,
        });
    }
    let c = cnot21();
    let inner = synth_so4(&(&c * x), opts)?;
    let mut raw = inner.circuit.clone();
    raw.push(Gate::cnot(2, 1))?;
    let circuit = if opts.optimize {
        optimize(&raw, opts.tol.zero_angle)
    } else {
        raw
    };
    let mut raw_counts = inner.raw_counts.clone();
    raw_counts.cnot += 1;
    let reconstruction_error = (&simulate(&circuit) - x).frobenius_norm();
    Ok(Synth2Result {
        counts: circuit::counts(&circuit),
        raw_counts,
        circuit,
        reconstruction_error,
        ..inner
    })
}

/// Routes on the sign of the determinant.
pub fn dispatch_2q(x: &ComplexMatrix, opts: &SynthOptions) -> Result<Synth2Result> {
    if x.dim() != 4 {
        return Err(Error::DimMismatch {
            expected: 4,
            found: x.dim(),
        });
    }
    let det = check_real_orthogonal(x, opts.tol.input)?;
    if det > 0.0 {
        synth_so4(x, opts)
    } else {
        synth_o4(x, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{exp_commuting_sum, ps, PauliSum};

    #[test]
    fn identity_gives_empty_circuit() {
        let r = synth_so4(&ComplexMatrix::identity(4), &SynthOptions::default()).unwrap();
        assert!(r.circuit.is_empty());
        assert!(r.reconstruction_error < 1e-12);
    }

    #[test]
    fn cnot_gives_single_cnot() {
        let r = synth_o4(&cnot21(), &SynthOptions::default()).unwrap();
        assert_eq!(r.circuit.gates(), &[Gate::cnot(2, 1)]);
        assert!(r.reconstruction_error < 1e-12);
    }

    #[test]
    fn torus_input() {
        let s = PauliSum::new([(0.3, ps("XY")), (-0.7, ps("YZ"))]).unwrap();
        let x = exp_commuting_sum(&s).unwrap();
        let r = synth_so4(&x, &SynthOptions::default()).unwrap();
        assert!(r.reconstruction_error < 1e-10);
        let mid = emit_a2_circuit(r.kak.params[0], r.kak.params[1]);
        assert!((&simulate(&mid) - &r.kak.a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn reflection_diag() {
        let x = ComplexMatrix::from_real(
            4,
            &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., -1.],
        )
        .unwrap();
        let r = dispatch_2q(&x, &SynthOptions::default()).unwrap();
        assert!(r.reconstruction_error < 1e-9);
        assert!(r.counts.cnot <= 3 && r.counts.one_qubit <= 6);
    }

    #[test]
    fn input_gates() {
        let opts = SynthOptions::default();
        let mut x = ComplexMatrix::identity(4);
        x[(0, 1)] = num_complex::Complex64::new(1e-6, 0.0);
        assert!(matches!(synth_so4(&x, &opts), Err(Error::NotOrthogonal { .. })));
        assert!(matches!(synth_o4(&ComplexMatrix::identity(4), &opts), Err(Error::WrongDeterminant { .. })));
        assert!(matches!(synth_so4(&cnot21(), &opts), Err(Error::WrongDeterminant { .. })));
    }
}

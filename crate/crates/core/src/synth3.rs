//! Three-qubit SO(8) synthesis into at most 16 CNOT + 36 one-qubit gates.
//!
//! With `x̃ = 𝓜·x·𝓜†` the nested factorization reads
//! `x̃ = K₁·A₁⁽¹⁾·K₂ · A · K₃·A₂⁽¹⁾·K₄`, so in application order the circuit is
//! `𝓜, K₄, A₂⁽¹⁾, K₃, A, K₂, A₁⁽¹⁾, K₁, 𝓜†`. Each `Kᵢ` is a pair of one-qubit
//! gates on qubits 1 and 2, written as `Rz·Ry·Rz`.

use num_complex::Complex64;

use crate::circuit::{counts, optimize, simulate, Circuit, Gate, GateCounts};
use crate::error::{Error, Result};
use crate::kak::{euler_zyz, kak_factor, nearest_product_2x2, EulerZYZ, InvolutionSpec, KakResult};
use crate::mat::{check_real_orthogonal, kron, phase_distance, ComplexMatrix};
use crate::pauli::magic;
use crate::synth2::SynthOptions;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone)]
pub struct Synth3Result {
    pub circuit: Circuit,
    pub outer: KakResult,
    pub inner_left: KakResult,
    pub inner_right: KakResult,
    /// `(a, b, c, d)` of `A = exp(−i(a·XXY + b·YYY + c·ZZY + d·IIY))`.
    pub abelian_params: [f64; 4],
    /// `(α, β)` of `A₁⁽¹⁾` (left) and `A₂⁽¹⁾` (right), coefficients of IZZ and ZIZ.
    pub inner_params: [[f64; 2]; 2],
    /// One-qubit factors of `K₁…K₄`, qubit 1 then qubit 2 for each.
    pub euler: [EulerZYZ; 8],
    /// Phase-aligned distance between the circuit and the input.
    pub reconstruction_error: f64,
    /// `simulate(circuit) ≈ global_phase · x`.
    pub global_phase: Complex64,
    pub counts: GateCounts,
    pub raw_counts: GateCounts,
    /// Largest distance of a K factor from a one-qubit product on qubits 1, 2.
    pub product_residual: f64,
}

/// `𝓜 = C₂¹·Rz₁(π/4)·Ry₂(π/4)·Rz₂(−π/4)` on qubits 1–2 of a 3-qubit register;
/// `adjoint` gives `𝓜†`.
pub fn emit_m_circuit(adjoint: bool) -> Circuit {
    let q = std::f64::consts::FRAC_PI_4;
    let c = Circuit::from_gates(
        3,
        vec![Gate::rz(2, -q), Gate::ry(2, q), Gate::rz(1, q), Gate::cnot(2, 1)],
    )
    .expect("valid gates");
    if adjoint {
        c.inverse()
    } else {
        c
    }
}

/// `A = exp(−i(a·XXY + b·YYY + c·ZZY + d·IIY))`: 6 CNOT and 6 Ry.
pub fn emit_a_circuit(a: f64, b: f64, c: f64, d: f64) -> Circuit {
    let q = std::f64::consts::FRAC_PI_4;
    Circuit::from_gates(
        3,
        vec![
            Gate::ry(3, d),
            Gate::cnot(2, 1),
            Gate::ry(2, -q),
            Gate::cnot(1, 3),
            Gate::ry(3, c),
            Gate::cnot(2, 3),
            Gate::ry(3, -b),
            Gate::cnot(1, 3),
            Gate::ry(3, a),
            Gate::cnot(2, 3),
            Gate::ry(2, q),
            Gate::cnot(2, 1),
        ],
    )
    .expect("valid gates")
}

/// `Ã = exp(−i(a·IZY − b·ZZY + c·ZIY))`.
pub fn emit_atilde_circuit(a: f64, b: f64, c: f64) -> Circuit {
    Circuit::from_gates(
        3,
        vec![
            Gate::cnot(1, 3),
            Gate::ry(3, c),
            Gate::cnot(2, 3),
            Gate::ry(3, -b),
            Gate::cnot(1, 3),
            Gate::ry(3, a),
            Gate::cnot(2, 3),
        ],
    )
    .expect("valid gates")
}

/// `A⁽¹⁾ = exp(−i(α·IZZ + β·ZIZ))`: 4 CNOT and 2 Rz.
pub fn emit_a1_circuit(alpha: f64, beta: f64) -> Circuit {
    Circuit::from_gates(
        3,
        vec![
            Gate::cnot(2, 3),
            Gate::rz(3, alpha),
            Gate::cnot(2, 3),
            Gate::cnot(1, 3),
            Gate::rz(3, beta),
            Gate::cnot(1, 3),
        ],
    )
    .expect("valid gates")
}

/// `Rz(θ)·Ry(φ)·Rz(ψ)` on `qubit`, in application order.
fn emit_r(qubit: usize, e: &EulerZYZ) -> [Gate; 3] {
    [Gate::rz(qubit, e.psi), Gate::ry(qubit, e.phi), Gate::rz(qubit, e.theta)]
}

/// Splits `k = v ⊗ w ⊗ I₂` into Euler angles for `v` and `w`; returns the
/// product residual as well.
fn split_local(k: &ComplexMatrix, tol: &Tolerances) -> Result<(EulerZYZ, EulerZYZ, f64)> {
    let k4 = ComplexMatrix::from_fn(4, |i, j| k[(2 * i, 2 * j)]);
    let third = (&kron(&k4, &ComplexMatrix::identity(2)) - k).frobenius_norm();
    let (v, w, pair) = nearest_product_2x2(&k4)?;
    let residual = third.max(pair);
    if residual >= tol.product {
        return Err(Error::ProductRepairFailed { residual });
    }
    Ok((euler_zyz(&v)?, euler_zyz(&w)?, residual))
}

pub fn synth_so8(x: &ComplexMatrix, opts: &SynthOptions) -> Result<Synth3Result> {
    if x.dim() != 8 {
        return Err(Error::DimMismatch {
            expected: 8,
            found: x.dim(),
        });
    }
    let tol = &opts.tol;
    let det = check_real_orthogonal(x, tol.input)?;
    if (det - 1.0).abs() > tol.input {
        return Err(Error::WrongDeterminant {
            expected: 1.0,
            found: det,
        });
    }
    let m = magic();
    let xt = &(&m * x) * &m.adjoint();
    let outer = kak_factor(&xt, InvolutionSpec::three_qubit_outer(), tol)?;
    let inner_left = kak_factor(&outer.k1, InvolutionSpec::three_qubit_inner(), tol)?;
    let inner_right = kak_factor(&outer.k2, InvolutionSpec::three_qubit_inner(), tol)?;

    let ks = [&inner_left.k1, &inner_left.k2, &inner_right.k1, &inner_right.k2];
    let mut euler = Vec::with_capacity(8);
    let mut product_residual: f64 = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for k in ks {
        let (v, w, r) = split_local(k, tol)?;
        product_residual = product_residual.max(r);
        phase *= v.phase * w.phase;
        euler.push(v);
        euler.push(w);
    }
    let euler: [EulerZYZ; 8] = euler.try_into().expect("eight factors");
    let p = &outer.params;
    let abelian_params = [p[0], p[1], p[2], p[3]];
    let inner_params = [
        [inner_left.params[0], inner_left.params[1]],
        [inner_right.params[0], inner_right.params[1]],
    ];

    let mut raw = emit_m_circuit(false);
    let k_gates = |i: usize| {
        let mut g = emit_r(1, &euler[2 * i]).to_vec();
        g.extend(emit_r(2, &euler[2 * i + 1]));
        Circuit::from_gates(3, g).expect("valid gates")
    };
    raw.append(&k_gates(3))?;
    raw.append(&emit_a1_circuit(inner_params[1][0], inner_params[1][1]))?;
    raw.append(&k_gates(2))?;
    raw.append(&emit_a_circuit(p[0], p[1], p[2], p[3]))?;
    raw.append(&k_gates(1))?;
    raw.append(&emit_a1_circuit(inner_params[0][0], inner_params[0][1]))?;
    raw.append(&k_gates(0))?;
    raw.append(&emit_m_circuit(true))?;

    let circuit = if opts.optimize {
        optimize(&raw, tol.zero_angle)
    } else {
        raw.clone()
    };
    let (reconstruction_error, global_phase) = phase_distance(&simulate(&circuit), x)?;
    // The tracked phase of the K factors must agree with the measured one.
    let drift = (global_phase - phase.conj()).norm();
    if drift > tol.verify {
        return Err(Error::FactorizationResidual {
            residual: drift,
            context: "global phase of the local factors".into(),
        });
    }
    Ok(Synth3Result {
        counts: counts(&circuit),
        raw_counts: counts(&raw),
        circuit,
        outer,
        inner_left,
        inner_right,
        abelian_params,
        inner_params,
        euler,
        reconstruction_error,
        global_phase,
        product_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{exp_commuting_sum, ps, PauliSum};

    #[test]
    fn m_circuit_is_magic() {
        let c = emit_m_circuit(false);
        assert_eq!(counts(&c).pair(), (1, 3));
        let (d, phase) = phase_distance(&simulate(&c), &magic()).unwrap();
        assert!(d < 1e-12);
        assert!((phase - 1.0).norm() < 1e-12);
        let both = emit_m_circuit(true).then(&emit_m_circuit(false)).unwrap();
        assert!(optimize(&both, 1e-12).is_empty());
    }

    #[test]
    fn a_and_a1_templates() {
        let a = emit_a_circuit(0.3, -0.2, 0.9, 1.3);
        assert_eq!(counts(&a).pair(), (6, 6));
        let s = PauliSum::new([(0.3, ps("XXY")), (-0.2, ps("YYY")), (0.9, ps("ZZY")), (1.3, ps("IIY"))]).unwrap();
        assert!((&simulate(&a) - &exp_commuting_sum(&s).unwrap()).frobenius_norm() < 1e-12);

        let a1 = emit_a1_circuit(0.4, -1.1);
        assert_eq!(counts(&a1).pair(), (4, 2));
        let s = PauliSum::new([(0.4, ps("IZZ")), (-1.1, ps("ZIZ"))]).unwrap();
        assert!((&simulate(&a1) - &exp_commuting_sum(&s).unwrap()).frobenius_norm() < 1e-12);

        assert!(optimize(&emit_a_circuit(0.0, 0.0, 0.0, 0.0), 1e-12).is_empty());
        assert!(optimize(&emit_a1_circuit(0.0, 0.0), 1e-12).is_empty());
        assert!(optimize(&emit_atilde_circuit(0.0, 0.0, 0.0), 1e-12).is_empty());
    }

    #[test]
    fn identity_gives_empty_circuit() {
        let r = synth_so8(&ComplexMatrix::identity(8), &SynthOptions::default()).unwrap();
        assert!(r.circuit.is_empty(), "{:?}", r.circuit);
        assert!(r.reconstruction_error < 1e-11);
    }

    #[test]
    fn rejects_negative_determinant() {
        let mut x = ComplexMatrix::identity(8);
        x[(7, 7)] = Complex64::new(-1.0, 0.0);
        assert!(matches!(
            synth_so8(&x, &SynthOptions::default()),
            Err(Error::WrongDeterminant { .. })
        ));
    }
}

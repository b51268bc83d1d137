//! Command implementations behind the `orthosynth` binary.
//!
//! Each command is a pure function returning its printable output, so the
//! binary only handles files and exit codes.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::RngCore;

use crate::circuit::{
    export_json, export_qasm, export_text, import_json, import_text, simulate, simulate_transposed_cnot,
    Circuit, Gate, GateCounts,
};
use crate::error::{Error, Result};
use crate::mat::{check_real_orthogonal, frobenius_distance, phase_distance, ComplexMatrix};
use crate::matrix_file::{parse_matrix, MatrixFile};
use crate::pauli::{
    basis_f, closure_check, commutator_identity_check, exp_commuting_sum, magic, magic_conjugate, ps, tables,
    CartanBasisSet, Pauli, PauliSum,
};
use crate::random::{haar_orthogonal, sample_rng, uniform};
use crate::synth2::{dispatch_2q, emit_a2_circuit, SynthOptions};
use crate::synth3::{emit_a1_circuit, emit_a_circuit, emit_atilde_circuit, emit_m_circuit, synth_so8};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Qasm,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "qasm" => Ok(OutputFormat::Qasm),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::UnsupportedMode(format!("unknown format {other:?}"))),
        }
    }
}

pub fn render_circuit(c: &Circuit, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => export_text(c),
        OutputFormat::Qasm => export_qasm(c),
        OutputFormat::Json => export_json(c),
    }
}

/// Reads the text format, or JSON when the input starts with `{`.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    if text.trim_start().starts_with('{') {
        import_json(text)
    } else {
        import_text(text)
    }
}

/// Result of synthesizing a 4×4 or 8×8 input.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub mode: &'static str,
    pub circuit: Circuit,
    pub counts: GateCounts,
    pub raw_counts: GateCounts,
    /// Exact Frobenius error for two qubits, phase-aligned for three.
    pub error: f64,
    pub phase: Complex64,
}

pub fn synthesize(x: &ComplexMatrix, opts: &SynthOptions) -> Result<Synthesis> {
    match x.dim() {
        4 => {
            let r = dispatch_2q(x, opts)?;
            let mode = if r.raw_counts.cnot == 3 { "o4" } else { "so4" };
            Ok(Synthesis {
                mode,
                circuit: r.circuit,
                counts: r.counts,
                raw_counts: r.raw_counts,
                error: r.reconstruction_error,
                phase: Complex64::new(1.0, 0.0),
            })
        }
        8 => {
            let det = check_real_orthogonal(x, opts.tol.input)?;
            if det < 0.0 {
                return Err(Error::UnsupportedMode(
                    "three-qubit matrices with determinant -1 are outside SO(8) and not synthesized".into(),
                ));
            }
            let r = synth_so8(x, opts)?;
            Ok(Synthesis {
                mode: "so8",
                circuit: r.circuit,
                counts: r.counts,
                raw_counts: r.raw_counts,
                error: r.reconstruction_error,
                phase: r.global_phase,
            })
        }
        found => Err(Error::DimMismatch { expected: 4, found }),
    }
}

pub fn cmd_random(n_qubits: usize, seed: u64, det: i8) -> Result<MatrixFile> {
    match (n_qubits, det) {
        (2, 1) | (2, -1) | (3, 1) => Ok(MatrixFile::from_matrix(&haar_orthogonal(1 << n_qubits, seed, 0, det))),
        (3, -1) => Err(Error::UnsupportedMode(
            "determinant -1 is only supported for two qubits".into(),
        )),
        (n, d) => Err(Error::UnsupportedMode(format!("{n} qubits with determinant {d:+}"))),
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub synthesis: Synthesis,
    /// The circuit in the requested format.
    pub body: String,
    pub summary: String,
    pub passed: bool,
}

pub fn cmd_synth(matrix_text: &str, opts: &SynthOptions, format: OutputFormat, threshold: f64) -> Result<SynthOutput> {
    let x = parse_matrix(matrix_text)?;
    let s = synthesize(&x, opts)?;
    let passed = s.error <= threshold;
    let summary = format!(
        "mode {} cnot {} one-qubit {} error {:.3e} phase {:+.12}{:+.12}i {}",
        s.mode,
        s.counts.cnot,
        s.counts.one_qubit,
        s.error,
        s.phase.re,
        s.phase.im,
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(SynthOutput {
        body: render_circuit(&s.circuit, format),
        synthesis: s,
        summary,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub frobenius: f64,
    pub phase_aligned: f64,
    pub phase: Complex64,
    pub threshold: f64,
    pub passed: bool,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "frobenius      {:.3e}", self.frobenius)?;
        writeln!(f, "phase-aligned  {:.3e}", self.phase_aligned)?;
        writeln!(f, "phase          {:+.12}{:+.12}i", self.phase.re, self.phase.im)?;
        write!(
            f,
            "{} at threshold {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.threshold
        )
    }
}

/// Passes when the phase-aligned distance is within `threshold`.
pub fn verify(c: &Circuit, x: &ComplexMatrix, threshold: f64) -> Result<VerifyReport> {
    if x.dim() != 1 << c.num_qubits() {
        return Err(Error::DimMismatch {
            expected: 1 << c.num_qubits(),
            found: x.dim(),
        });
    }
    let u = simulate(c);
    let frobenius = frobenius_distance(&u, x)?;
    let (phase_aligned, phase) = phase_distance(&u, x)?;
    Ok(VerifyReport {
        frobenius,
        phase_aligned,
        phase,
        threshold,
        passed: phase_aligned <= threshold,
    })
}

pub fn cmd_verify(circuit_text: &str, matrix_text: &str, threshold: f64) -> Result<VerifyReport> {
    let c = parse_circuit(circuit_text)?;
    let x = parse_matrix(matrix_text)?;
    verify(&c, &x, threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.residual < self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaperReport {
    pub checks: Vec<IdentityCheck>,
}

impl PaperReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for PaperReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<4} {:<36} residual {:.3e} (< {:.0e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.threshold
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(f, "{} identities, {} failed", self.checks.len(), failed)
    }
}

const CHECK_SEED: u64 = 0x5eed_0c0de;
const DRAWS: usize = 100;

fn angle(rng: &mut impl RngCore) -> f64 {
    (2.0 * uniform(rng) - 1.0) * std::f64::consts::PI
}

fn pauli_exp(terms: &[(f64, &str)]) -> ComplexMatrix {
    let s = PauliSum::new(terms.iter().map(|&(c, p)| (c, ps(p)))).expect("valid terms");
    exp_commuting_sum(&s).expect("commuting terms")
}

fn circuit(n: usize, gates: Vec<Gate>) -> Circuit {
    Circuit::from_gates(n, gates).expect("valid gates")
}

/// Worst distance over `DRAWS` parameter draws between a circuit and its oracle.
fn over_draws<const K: usize>(
    stream: u64,
    sim: fn(&Circuit) -> ComplexMatrix,
    build: impl Fn([f64; K]) -> (Circuit, ComplexMatrix),
) -> f64 {
    let mut rng = sample_rng(CHECK_SEED, stream);
    let mut worst: f64 = 0.0;
    for _ in 0..DRAWS {
        let p: [f64; K] = std::array::from_fn(|_| angle(&mut rng));
        let (c, oracle) = build(p);
        worst = worst.max((&sim(&c) - &oracle).frobenius_norm());
    }
    worst
}

/// Runs the built-in identity suite with fixed seeds.
///
/// `transpose_cnot` simulates every CNOT with control and target exchanged; it
/// is a negative control and makes the circuit identities fail.
pub fn check_paper(transpose_cnot: bool) -> PaperReport {
    let sim: fn(&Circuit) -> ComplexMatrix = if transpose_cnot { simulate_transposed_cnot } else { simulate };
    let mut checks = Vec::new();
    let mut push = |name: &str, residual: f64, threshold: f64| {
        checks.push(IdentityCheck {
            name: name.to_string(),
            residual,
            threshold,
        })
    };
    let t = tables();

    for (label, l, p) in [("so4", &t.so4_l, &t.so4_p), ("so8", &t.so8_l, &t.so8_p), ("inner", &t.l1, &t.p1)] {
        push(&format!("closure {label} [l,l] in l"), closure_check(l, l, l), 1e-12);
        push(&format!("closure {label} [l,p] in p"), closure_check(l, p, p), 1e-12);
        push(&format!("closure {label} [p,p] in l"), closure_check(p, p, l), 1e-12);
    }

    let f = basis_f();
    let sizes: [(&CartanBasisSet, usize); 10] = [
        (&t.so4_l, 2),
        (&t.so4_p, 4),
        (&t.so4_a, 2),
        (&t.so8_l, 12),
        (&t.so8_p, 16),
        (&t.so8_a, 4),
        (&t.l1, 6),
        (&t.p1, 6),
        (&t.a1, 2),
        (&f, 28),
    ];
    let mismatched = sizes.iter().filter(|(s, n)| s.len() != *n).count();
    push("cardinalities", mismatched as f64, 0.5);

    let mut magic_real: f64 = 0.0;
    for p in &f.elements {
        let g = magic_conjugate(&p.to_matrix().scale(Complex64::new(0.0, 1.0))).expect("8x8");
        magic_real = magic_real.max(g.max_imag()).max((&g + &g.transpose()).max_abs());
    }
    push("magic-real F generators", magic_real, 1e-12);

    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut comm: f64 = 0.0;
    for a in all {
        for b in all {
            for c in all {
                for d in all {
                    comm = comm.max(commutator_identity_check(a, b, c, d));
                }
            }
        }
    }
    push("commutator identity", comm, 1e-13);

    let two_qubit = over_draws(0, sim, |[a, b]| {
        (emit_a2_circuit(a, b), pauli_exp(&[(a, "XY"), (b, "YZ")]))
    });
    push("two-qubit A(a,b) template", two_qubit, 1e-11);

    let (m_dist, m_phase) = phase_distance(&sim(&emit_m_circuit(false)), &magic()).expect("8x8");
    push("M circuit vs magic matrix", m_dist.max((m_phase - 1.0).norm()), 1e-12);

    let block_a1 = over_draws(1, sim, |[a]| {
        (
            circuit(3, vec![Gate::cnot(2, 3), Gate::ry(3, a), Gate::cnot(2, 3)]),
            pauli_exp(&[(a, "IZY")]),
        )
    });
    push("block C23 Ry3 C23", block_a1, 1e-11);
    let block_a2 = over_draws(2, sim, |[b]| {
        (
            circuit(
                3,
                vec![Gate::cnot(1, 3), Gate::cnot(2, 3), Gate::ry(3, -b), Gate::cnot(2, 3), Gate::cnot(1, 3)],
            ),
            pauli_exp(&[(-b, "ZZY")]),
        )
    });
    push("block C13 C23 Ry3 C23 C13", block_a2, 1e-11);
    let block_a3 = over_draws(3, sim, |[c]| {
        (
            circuit(3, vec![Gate::cnot(1, 3), Gate::ry(3, c), Gate::cnot(1, 3)]),
            pauli_exp(&[(c, "ZIY")]),
        )
    });
    push("block C13 Ry3 C13", block_a3, 1e-11);

    let atilde = over_draws(4, sim, |[a, b, c]| {
        (emit_atilde_circuit(a, b, c), pauli_exp(&[(a, "IZY"), (-b, "ZZY"), (c, "ZIY")]))
    });
    push("A-tilde template", atilde, 1e-11);

    // Diagonal blocks of Ã are Ry(θₖ) on qubit 3 with θ = (a−b+c, b−a+c, a+b−c, −a−b−c).
    let structure = over_draws(5, sim, |[a, b, c]| {
        let thetas = [a - b + c, b - a + c, a + b - c, -a - b - c];
        let oracle = ComplexMatrix::from_fn(8, |i, j| {
            if i / 2 != j / 2 {
                return Complex64::new(0.0, 0.0);
            }
            let (s, co) = thetas[i / 2].sin_cos();
            let v = match (i % 2, j % 2) {
                (0, 0) | (1, 1) => co,
                (0, 1) => -s,
                _ => s,
            };
            Complex64::new(v, 0.0)
        });
        (emit_atilde_circuit(a, b, c), oracle)
    });
    push("A-tilde block structure", structure, 1e-11);

    let a_full = over_draws(6, sim, |[a, b, c, d]| {
        (
            emit_a_circuit(a, b, c, d),
            pauli_exp(&[(a, "XXY"), (b, "YYY"), (c, "ZZY"), (d, "IIY")]),
        )
    });
    push("A(a,b,c,d) template", a_full, 1e-11);

    let a1 = over_draws(7, sim, |[alpha, beta]| {
        (emit_a1_circuit(alpha, beta), pauli_exp(&[(alpha, "IZZ"), (beta, "ZIZ")]))
    });
    push("A1(alpha,beta) template", a1, 1e-11);

    let conj = over_draws(8, sim, |[a, b, c, d]| {
        let lhs = circuit(3, vec![Gate::ry(3, d)])
            .then(&emit_m_circuit(true))
            .and_then(|x| x.then(&emit_atilde_circuit(a, b, c)))
            .and_then(|x| x.then(&emit_m_circuit(false)))
            .expect("same width");
        (lhs, sim(&emit_a_circuit(a, b, c, d)))
    });
    push("M A-tilde M' Ry3(d) equals A", conj, 1e-11);

    PaperReport { checks }
}

//! Circuit IR over CNOT, Ry and Rz.
//!
//! Gate lists are in application order: `gates[0]` acts first on the state.
//! Matrix-order products from the literature are reversed exactly once, in
//! [`simulate`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Y,
    Z,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Y => "ry",
            Axis::Z => "rz",
        }
    }
}

/// One gate. Qubits are 1-based; rotations are `exp(−i·angle·σ_axis)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Gate {
    Cnot { control: usize, target: usize },
    Rot { axis: Axis, qubit: usize, angle: f64 },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    pub fn ry(qubit: usize, angle: f64) -> Gate {
        Gate::Rot {
            axis: Axis::Y,
            qubit,
            angle,
        }
    }

    pub fn rz(qubit: usize, angle: f64) -> Gate {
        Gate::Rot {
            axis: Axis::Z,
            qubit,
            angle,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Rot { qubit, .. } => vec![qubit],
        }
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rot { axis, qubit, angle } => Gate::Rot {
                axis,
                qubit,
                angle: -angle,
            },
            cnot => cnot,
        }
    }

    fn validate(&self, width: usize) -> Result<()> {
        for q in self.qubits() {
            if q == 0 || q > width {
                return Err(Error::BadQubitIndex { index: q, width });
            }
        }
        if let Gate::Cnot { control, target } = *self {
            if control == target {
                return Err(Error::BadQubitIndex {
                    index: target,
                    width,
                });
            }
        }
        Ok(())
    }

    /// Sufficient commutation test covering the rewrites the optimizer needs.
    pub fn commutes_with(&self, other: &Gate) -> bool {
        let (a, b) = (self.qubits(), other.qubits());
        if a.iter().all(|q| !b.contains(q)) {
            return true;
        }
        match (*self, *other) {
            (
                Gate::Cnot {
                    control: c1,
                    target: t1,
                },
                Gate::Cnot {
                    control: c2,
                    target: t2,
                },
            ) => c1 != t2 && c2 != t1,
            (Gate::Rot { axis: Axis::Z, qubit, .. }, Gate::Cnot { control, target })
            | (Gate::Cnot { control, target }, Gate::Rot { axis: Axis::Z, qubit, .. }) => {
                qubit == control && qubit != target
            }
            (Gate::Rot { axis: a1, qubit: q1, .. }, Gate::Rot { axis: a2, qubit: q2, .. }) => {
                q1 != q2 || a1 == a2
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
struct RawCircuit {
    qubits: usize,
    gates: Vec<Gate>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;
    fn try_from(raw: RawCircuit) -> Result<Circuit> {
        Circuit::from_gates(raw.qubits, raw.gates)
    }
}

impl From<Circuit> for RawCircuit {
    fn from(c: Circuit) -> RawCircuit {
        RawCircuit {
            qubits: c.n,
            gates: c.gates,
        }
    }
}

impl Circuit {
    pub fn new(n: usize) -> Circuit {
        assert!((1..=8).contains(&n), "circuit width must be 1..=8");
        Circuit { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Circuit> {
        if !(1..=8).contains(&n) {
            return Err(Error::BadQubitIndex { index: n, width: 8 });
        }
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Circuit { n, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    /// Appends `other` so that it acts after `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn then(mut self, other: &Circuit) -> Result<Circuit> {
        self.append(other)?;
        Ok(self)
    }

    /// Reversed list of inverted gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same gates on a wider register; qubit indices are kept.
    pub fn widen(&self, n: usize) -> Result<Circuit> {
        Circuit::from_gates(n, self.gates.clone())
    }
}

/// Gate tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cnot: usize,
    pub one_qubit: usize,
    pub by_axis: BTreeMap<Axis, usize>,
}

impl GateCounts {
    pub fn pair(&self) -> (usize, usize) {
        (self.cnot, self.one_qubit)
    }
}

pub fn counts(c: &Circuit) -> GateCounts {
    let mut out = GateCounts::default();
    for g in &c.gates {
        match g {
            Gate::Cnot { .. } => out.cnot += 1,
            Gate::Rot { axis, .. } => {
                out.one_qubit += 1;
                *out.by_axis.entry(*axis).or_default() += 1;
            }
        }
    }
    out
}

/// Unitary of the circuit: the last gate is the leftmost matrix factor.
pub fn simulate(c: &Circuit) -> ComplexMatrix {
    simulate_impl(c, false)
}

/// Simulation with the control and target of every CNOT exchanged. Exists only
/// as a negative control for the identity suite.
#[doc(hidden)]
pub fn simulate_transposed_cnot(c: &Circuit) -> ComplexMatrix {
    simulate_impl(c, true)
}

fn simulate_impl(c: &Circuit, transpose_cnot: bool) -> ComplexMatrix {
    let n = c.n;
    let dim = 1usize << n;
    let mut m = ComplexMatrix::identity(dim);
    // Qubit k is bit (n − k) of a basis index: qubit 1 is the most significant.
    let mask = |q: usize| 1usize << (n - q);
    for g in &c.gates {
        match *g {
            Gate::Cnot { control, target } => {
                let (control, target) = if transpose_cnot {
                    (target, control)
                } else {
                    (control, target)
                };
                let (cm, tm) = (mask(control), mask(target));
                let src = m.clone();
                for i in 0..dim {
                    let from = if i & cm != 0 { i ^ tm } else { i };
                    for j in 0..dim {
                        m[(i, j)] = src[(from, j)];
                    }
                }
            }
            Gate::Rot { axis, qubit, angle } => {
                let qm = mask(qubit);
                let (s, co) = angle.sin_cos();
                let g2 = match axis {
                    Axis::Y => [
                        [Complex64::new(co, 0.0), Complex64::new(-s, 0.0)],
                        [Complex64::new(s, 0.0), Complex64::new(co, 0.0)],
                    ],
                    Axis::Z => [
                        [Complex64::new(co, -s), Complex64::new(0.0, 0.0)],
                        [Complex64::new(0.0, 0.0), Complex64::new(co, s)],
                    ],
                };
                for i0 in (0..dim).filter(|i| i & qm == 0) {
                    let i1 = i0 | qm;
                    for j in 0..dim {
                        let (a, b) = (m[(i0, j)], m[(i1, j)]);
                        m[(i0, j)] = g2[0][0] * a + g2[0][1] * b;
                        m[(i1, j)] = g2[1][0] * a + g2[1][1] * b;
                    }
                }
            }
        }
    }
    m
}

/// Maps an angle into `(−π, π]`. Rotations have period 2π in this convention,
/// so the result is the same gate.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Peephole optimization to a fixpoint.
///
/// Rewrites: merge a rotation into the next same-axis rotation on its qubit,
/// cancel a CNOT against the next identical CNOT, and drop rotations whose
/// angle is within `eps` of a multiple of 2π. A gate may travel forward only
/// past gates it commutes with (disjoint qubits, Rz through a CNOT control,
/// CNOTs that share no control/target crossing). Every rewrite is an exact
/// matrix identity.
pub fn optimize(c: &Circuit, eps: f64) -> Circuit {
    let mut gates: Vec<Gate> = c.gates.iter().map(normalized).collect();
    loop {
        let before = gates.len();
        gates.retain(|g| !matches!(g, Gate::Rot { angle, .. } if angle.abs() <= eps));
        let mut i = 0;
        while i < gates.len() {
            if let Some(j) = partner(&gates, i) {
                let g = gates.remove(i);
                let j = j - 1;
                match (g, gates[j]) {
                    (Gate::Rot { angle: a, .. }, Gate::Rot { axis, qubit, angle: b }) => {
                        gates[j] = Gate::Rot {
                            axis,
                            qubit,
                            angle: normalize_angle(a + b),
                        };
                    }
                    _ => {
                        gates.remove(j);
                    }
                }
            } else {
                i += 1;
            }
        }
        if gates.len() == before {
            break;
        }
    }
    Circuit { n: c.n, gates }
}

fn normalized(g: &Gate) -> Gate {
    match *g {
        Gate::Rot { axis, qubit, angle } => Gate::Rot {
            axis,
            qubit,
            angle: normalize_angle(angle),
        },
        cnot => cnot,
    }
}

/// Index of the gate that `gates[i]` can be merged or cancelled with.
fn partner(gates: &[Gate], i: usize) -> Option<usize> {
    let g = gates[i];
    for (j, h) in gates.iter().enumerate().skip(i + 1) {
        let matches = match (g, *h) {
            (Gate::Rot { axis: a1, qubit: q1, .. }, Gate::Rot { axis: a2, qubit: q2, .. }) => {
                a1 == a2 && q1 == q2
            }
            (Gate::Cnot { .. }, Gate::Cnot { .. }) => g == *h,
            _ => false,
        };
        if matches {
            return Some(j);
        }
        if !g.commutes_with(h) {
            return None;
        }
    }
    None
}

/// Line-oriented text: `qubits <n>` then `cnot c t`, `ry q a` or `rz q a`.
pub fn export_text(c: &Circuit) -> String {
    let mut out = format!("qubits {}\n", c.n);
    for g in &c.gates {
        match *g {
            Gate::Cnot { control, target } => writeln!(out, "cnot {control} {target}"),
            Gate::Rot { axis, qubit, angle } => writeln!(out, "{} {qubit} {angle:?}", axis.name()),
        }
        .expect("write to String");
    }
    out
}

pub fn import_text(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("expected a qubit index, found {s:?}")))
        };
        let Some(c) = circuit.as_mut() else {
            match tokens.as_slice() {
                ["qubits", n] => {
                    let n = int(n)?;
                    if !(1..=8).contains(&n) {
                        return Err(Error::parse(line_no, format!("unsupported width {n}")));
                    }
                    circuit = Some(Circuit::new(n));
                    continue;
                }
                _ => return Err(Error::parse(line_no, "expected header `qubits <n>`")),
            }
        };
        let gate = match tokens.as_slice() {
            ["cnot", ctl, tgt] => Gate::cnot(int(ctl)?, int(tgt)?),
            [op @ ("ry" | "rz"), q, a] => {
                let angle: f64 = a
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad angle {a:?}")))?;
                if !angle.is_finite() {
                    return Err(Error::parse(line_no, "angle must be finite"));
                }
                let axis = if *op == "ry" { Axis::Y } else { Axis::Z };
                Gate::Rot {
                    axis,
                    qubit: int(q)?,
                    angle,
                }
            }
            ["qubits", ..] => return Err(Error::parse(line_no, "duplicate header")),
            _ => return Err(Error::parse(line_no, format!("unrecognized gate line {line:?}"))),
        };
        c.push(gate).map_err(|e| Error::parse(line_no, e.to_string()))?;
    }
    circuit.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing header `qubits <n>`"))
}

/// OpenQASM 2.0. Angles are doubled because `ry(θ)` there is `exp(−iθσy/2)`.
pub fn export_qasm(c: &Circuit) -> String {
    let mut out = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n", c.n);
    for g in &c.gates {
        match *g {
            Gate::Cnot { control, target } => {
                writeln!(out, "cx q[{}],q[{}];", control - 1, target - 1)
            }
            Gate::Rot { axis, qubit, angle } => {
                writeln!(out, "{}({:?}) q[{}];", axis.name(), 2.0 * angle, qubit - 1)
            }
        }
        .expect("write to String");
    }
    out
}

pub fn export_json(c: &Circuit) -> String {
    serde_json::to_string_pretty(c).expect("circuit serializes")
}

pub fn import_json(text: &str) -> Result<Circuit> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
}

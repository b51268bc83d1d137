//! Pauli strings, their sums, and the Lie-algebra bases used by the synthesizers.
//!
//! A string is stored symplectically: bit `k` of `x` / `z` belongs to factor `k`
//! (qubit `k + 1`, the leftmost Kronecker factor being qubit 1). Commutation is
//! decided from the bits alone.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{kron, ComplexMatrix, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let entries = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        ComplexMatrix::from_row_major(entries.to_vec()).expect("2x2")
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Pauli operators, qubit 1 first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: u8,
    x: u16,
    z: u16,
}

impl PauliString {
    pub const MAX_QUBITS: usize = 16;

    pub fn new(factors: &[Pauli]) -> Self {
        assert!(
            !factors.is_empty() && factors.len() <= Self::MAX_QUBITS,
            "Pauli string length must be 1..=16"
        );
        let (mut x, mut z) = (0u16, 0u16);
        for (k, p) in factors.iter().enumerate() {
            let (bx, bz) = p.bits();
            x |= (bx as u16) << k;
            z |= (bz as u16) << k;
        }
        PauliString {
            n: factors.len() as u8,
            x,
            z,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(&vec![Pauli::I; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    /// Factor acting on qubit `k + 1`.
    pub fn factor(&self, k: usize) -> Pauli {
        assert!(k < self.num_qubits());
        Pauli::from_bits(self.x >> k & 1 == 1, self.z >> k & 1 == 1)
    }

    pub fn factors(&self) -> Vec<Pauli> {
        (0..self.num_qubits()).map(|k| self.factor(k)).collect()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// True when the two strings commute (even symplectic overlap).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n, "Pauli strings of different lengths");
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        self.factors()
            .iter()
            .map(|p| p.matrix())
            .reduce(|acc, m| kron(&acc, &m))
            .expect("nonempty string")
    }

    /// Concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut f = self.factors();
        f.extend(other.factors());
        PauliString::new(&f)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::parse(1, format!("invalid Pauli symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() || factors.len() > Self::MAX_QUBITS {
            return Err(Error::parse(1, format!("Pauli string {s:?} has bad length")));
        }
        Ok(PauliString::new(&factors))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.factors() {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for string literals known to be valid, e.g. `ps("IZY")`.
pub fn ps(s: &str) -> PauliString {
    s.parse().expect("valid Pauli literal")
}

/// Real linear combination of distinct Pauli strings on the same register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    /// Builds a sum; repeated strings have their coefficients added.
    pub fn new(terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        let mut out: Vec<(f64, PauliString)> = Vec::new();
        for (c, p) in terms {
            if let Some((_, first)) = out.first() {
                if first.num_qubits() != p.num_qubits() {
                    return Err(Error::DimMismatch {
                        expected: first.num_qubits(),
                        found: p.num_qubits(),
                    });
                }
            }
            match out.iter_mut().find(|(_, q)| *q == p) {
                Some(t) => t.0 += c,
                None => out.push((c, p)),
            }
        }
        Ok(PauliSum { terms: out })
    }

    /// Sum over a basis with the given coefficients, in basis order.
    pub fn from_basis(basis: &CartanBasisSet, coefficients: &[f64]) -> Result<Self> {
        if basis.len() != coefficients.len() {
            return Err(Error::DimMismatch {
                expected: basis.len(),
                found: coefficients.len(),
            });
        }
        Self::new(coefficients.iter().copied().zip(basis.elements.iter().copied()))
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn num_qubits(&self) -> Option<usize> {
        self.terms.first().map(|(_, p)| p.num_qubits())
    }

    /// First non-commuting pair of terms, if any.
    pub fn non_commuting_pair(&self) -> Option<(PauliString, PauliString)> {
        for (i, (_, p)) in self.terms.iter().enumerate() {
            for (_, q) in &self.terms[i + 1..] {
                if !p.commutes_with(q) {
                    return Some((*p, *q));
                }
            }
        }
        None
    }

    pub fn is_commuting(&self) -> bool {
        self.non_commuting_pair().is_none()
    }

    pub fn to_matrix(&self) -> Option<ComplexMatrix> {
        let n = self.num_qubits()?;
        let mut acc = ComplexMatrix::zeros(1 << n);
        for (c, p) in &self.terms {
            acc = &acc + &p.to_matrix().scale(Complex64::new(*c, 0.0));
        }
        Some(acc)
    }
}

/// Named ordered list of Pauli strings; each element `P` stands for the
/// Lie-algebra generator `i·P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanBasisSet {
    pub name: String,
    pub elements: Vec<PauliString>,
}

impl CartanBasisSet {
    pub fn new(name: &str, elements: &[&str]) -> Self {
        CartanBasisSet {
            name: name.to_string(),
            elements: elements.iter().map(|s| ps(s)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.elements.first().map_or(0, |p| p.num_qubits())
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.elements.contains(p)
    }

    pub fn is_subset_of(&self, other: &CartanBasisSet) -> bool {
        self.elements.iter().all(|p| other.contains(p))
    }

    pub fn is_abelian(&self) -> bool {
        self.elements
            .iter()
            .enumerate()
            .all(|(i, p)| self.elements[i + 1..].iter().all(|q| p.commutes_with(q)))
    }

    /// Largest `|Tr(PQ)| / 2ⁿ` over distinct pairs.
    pub fn max_overlap(&self) -> f64 {
        let mats: Vec<ComplexMatrix> = self.elements.iter().map(|p| p.to_matrix()).collect();
        let dim = (1usize << self.num_qubits()) as f64;
        let mut worst: f64 = 0.0;
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                worst = worst.max((&mats[i] * &mats[j]).trace().norm() / dim);
            }
        }
        worst
    }
}

/// The basis tables of the two- and three-qubit decompositions.
#[derive(Debug)]
pub struct BasisTables {
    pub so4_l: CartanBasisSet,
    pub so4_p: CartanBasisSet,
    pub so4_a: CartanBasisSet,
    pub so8_l: CartanBasisSet,
    pub so8_p: CartanBasisSet,
    pub so8_a: CartanBasisSet,
    pub l1: CartanBasisSet,
    pub p1: CartanBasisSet,
    pub a1: CartanBasisSet,
}

impl BasisTables {
    fn build() -> Self {
        let t = BasisTables {
            so4_l: CartanBasisSet::new("so4_l", &["IY", "YI"]),
            so4_p: CartanBasisSet::new("so4_p", &["XY", "YX", "ZY", "YZ"]),
            so4_a: CartanBasisSet::new("so4_a", &["XY", "YZ"]),
            so8_l: CartanBasisSet::new(
                "so8_l",
                &[
                    "IXI", "IYI", "IZI", "XII", "YII", "ZII", "IXZ", "IYZ", "IZZ", "XIZ", "YIZ",
                    "ZIZ",
                ],
            ),
            so8_p: CartanBasisSet::new(
                "so8_p",
                &[
                    "IXX", "IYX", "IZX", "XIX", "YIX", "ZIX", "IIY", "XXY", "XYY", "XZY", "YXY",
                    "YYY", "YZY", "ZXY", "ZYY", "ZZY",
                ],
            ),
            so8_a: CartanBasisSet::new("so8_a", &["XXY", "YYY", "ZZY", "IIY"]),
            l1: CartanBasisSet::new("l1", &["IXI", "IYI", "IZI", "XII", "YII", "ZII"]),
            p1: CartanBasisSet::new("p1", &["IXZ", "IYZ", "IZZ", "XIZ", "YIZ", "ZIZ"]),
            a1: CartanBasisSet::new("a1", &["IZZ", "ZIZ"]),
        };
        t.self_check();
        t
    }

    fn self_check(&self) {
        let sizes = [
            (&self.so4_l, 2),
            (&self.so4_p, 4),
            (&self.so4_a, 2),
            (&self.so8_l, 12),
            (&self.so8_p, 16),
            (&self.so8_a, 4),
            (&self.l1, 6),
            (&self.p1, 6),
            (&self.a1, 2),
        ];
        for (set, n) in sizes {
            assert_eq!(set.len(), n, "basis table {} has wrong cardinality", set.name);
            assert!(set.max_overlap() < 1e-13, "basis table {} is not orthogonal", set.name);
        }
        for a in [&self.so4_a, &self.so8_a, &self.a1] {
            assert!(a.is_abelian(), "basis table {} is not abelian", a.name);
        }
        assert!(self.so4_a.is_subset_of(&self.so4_p));
        assert!(self.so8_a.is_subset_of(&self.so8_p));
        assert!(self.a1.is_subset_of(&self.p1));
        let mut inner: Vec<_> = self.l1.elements.iter().chain(&self.p1.elements).collect();
        inner.sort();
        let mut outer: Vec<_> = self.so8_l.elements.iter().collect();
        outer.sort();
        assert_eq!(inner, outer, "l1 ∪ p1 must equal so8_l");
    }
}

pub fn tables() -> &'static BasisTables {
    static TABLES: OnceLock<BasisTables> = OnceLock::new();
    TABLES.get_or_init(BasisTables::build)
}

/// The 28 generators of so(8) in the Pauli picture: one non-identity factor on
/// qubits 1–2 tensored with {X, Z, I}, and {two-qubit σ⊗σ, II} tensored with Y.
pub fn basis_f() -> CartanBasisSet {
    let sigma1 = ["IX", "IY", "IZ", "XI", "YI", "ZI"];
    let s1 = ["XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ", "II"];
    let mut elements = Vec::with_capacity(28);
    for a in sigma1 {
        for b in ["X", "Z", "I"] {
            elements.push(ps(&format!("{a}{b}")));
        }
    }
    for a in s1 {
        elements.push(ps(&format!("{a}Y")));
    }
    CartanBasisSet {
        name: "F".to_string(),
        elements,
    }
}

/// `Tr(P·h) / 2ⁿ`, the Hilbert–Schmidt coefficient of `P` in Hermitian `h`.
pub fn hs_project(h: &ComplexMatrix, p: &PauliString) -> Result<f64> {
    let dim = 1usize << p.num_qubits();
    if h.dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            found: h.dim(),
        });
    }
    let deviation = h.hermiticity_deviation();
    if deviation > 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    Ok((&p.to_matrix() * h).trace().re / dim as f64)
}

/// Residual of `[A⊗B, C⊗D] = ½({A,C}⊗[B,D] + [A,C]⊗{B,D})`.
pub fn commutator_identity_check(a: Pauli, b: Pauli, c: Pauli, d: Pauli) -> f64 {
    let (a, b, c, d) = (a.matrix(), b.matrix(), c.matrix(), d.matrix());
    let lhs = kron(&a, &b).commutator(&kron(&c, &d));
    let rhs = (&kron(&a.anticommutator(&c), &b.commutator(&d))
        + &kron(&a.commutator(&c), &b.anticommutator(&d)))
        .scale(Complex64::new(0.5, 0.0));
    (&lhs - &rhs).frobenius_norm()
}

/// Largest distance of `[a, b]` from `span(target)` over all `a ∈ set_a`, `b ∈ set_b`.
pub fn closure_check(set_a: &CartanBasisSet, set_b: &CartanBasisSet, target: &CartanBasisSet) -> f64 {
    let dim = 1usize << target.num_qubits();
    let targets: Vec<ComplexMatrix> = target.elements.iter().map(|p| p.to_matrix()).collect();
    let mut worst: f64 = 0.0;
    for a in &set_a.elements {
        let am = a.to_matrix();
        for b in &set_b.elements {
            let comm = am.commutator(&b.to_matrix());
            let mut residual = comm.clone();
            for t in &targets {
                let coeff = (t * &comm).trace() / dim as f64;
                residual = &residual - &t.scale(coeff);
            }
            worst = worst.max(residual.frobenius_norm());
        }
    }
    worst
}

/// `exp(−i·Σ cₖPₖ)` for pairwise commuting terms, as a product of
/// `cos(cₖ)·I − i·sin(cₖ)·Pₖ`.
pub fn exp_commuting_sum(s: &PauliSum) -> Result<ComplexMatrix> {
    if let Some((p, q)) = s.non_commuting_pair() {
        return Err(Error::NonCommutingTerms(p.to_string(), q.to_string()));
    }
    let n = s.num_qubits().unwrap_or(1);
    let id = ComplexMatrix::identity(1 << n);
    let mut acc = id.clone();
    for (c, p) in s.terms() {
        let factor = &id.scale(Complex64::new(c.cos(), 0.0))
            + &p.to_matrix().scale(Complex64::new(0.0, -c.sin()));
        acc = &acc * &factor;
    }
    Ok(acc)
}

/// Two-qubit magic matrix `(1/√2)[[1,i,0,0],[0,0,i,1],[0,0,i,−1],[1,−i,0,0]]`.
pub fn magic4() -> ComplexMatrix {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let rows = [
        [ONE, I, ZERO, ZERO],
        [ZERO, ZERO, I, ONE],
        [ZERO, ZERO, I, -ONE],
        [ONE, -I, ZERO, ZERO],
    ];
    ComplexMatrix::from_fn(4, |i, j| rows[i][j] * h)
}

/// Three-qubit magic matrix `magic4 ⊗ I₂`.
pub fn magic() -> ComplexMatrix {
    kron(&magic4(), &ComplexMatrix::identity(2))
}

/// `𝓜†·b·𝓜` for an 8×8 matrix `b`.
pub fn magic_conjugate(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b.dim() != 8 {
        return Err(Error::DimMismatch {
            expected: 8,
            found: b.dim(),
        });
    }
    let m = magic();
    Ok(&(&m.adjoint() * b) * &m)
}

//! Cartan (KAK) synthesis of real orthogonal two- and three-qubit gates.
//!
//! The pipeline factors an SO(4), O(4) or SO(8) matrix through nested Cartan
//! decompositions of the Pauli-built Lie algebras and emits a circuit over
//! CNOT, Ry and Rz with at most 2 CNOT / 6 Ry (SO(4)), 3 CNOT / 6 Ry (O(4)) or
//! 16 CNOT / 36 one-qubit gates (SO(8)).
//!
//! Rotations follow the no-half-angle convention `R_α(a) = exp(−i·a·σ_α)`, and
//! qubit 1 is the leftmost Kronecker factor.
//!
//! ```
//! use orthosynth::{random, synth2};
//!
//! let x = random::haar_orthogonal(4, 7, 0, 1);
//! let r = synth2::dispatch_2q(&x, &Default::default()).unwrap();
//! assert!(r.reconstruction_error < 1e-9);
//! assert!(r.counts.cnot <= 2 && r.counts.one_qubit <= 6);
//! ```

pub mod batch;
pub mod circuit;
pub mod error;
pub mod kak;
pub mod mat;
pub mod matrix_file;
pub mod pauli;
pub mod random;
pub mod synth2;
pub mod synth3;
pub mod tolerance;
pub mod toolkit;

pub use circuit::{Axis, Circuit, Gate, GateCounts};
pub use error::{Error, Result};
pub use kak::{euler_zyz, kak_factor, EulerZYZ, InvolutionSpec, KakResult};
pub use mat::{ComplexMatrix, SpectralDecomposition};
pub use pauli::{CartanBasisSet, Pauli, PauliString, PauliSum};
pub use tolerance::Tolerances;

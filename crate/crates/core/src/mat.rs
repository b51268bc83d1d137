//! Dense complex linear algebra on small square matrices.
//!
//! Everything in the compiler (Pauli strings, Cartan factors, simulated circuits)
//! is carried as a [`ComplexMatrix`]. Dimensions are 2, 4 or 8 in practice, so
//! storage is a plain row-major vector and the heavier factorizations (SVD,
//! Hermitian eigensolver) are delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Builds a matrix from row-major entries; the length must be a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::DimMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(ComplexMatrix {
            dim,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Real part as a row-major vector.
    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    /// Checked product; `*` panics on mismatched dimensions instead.
    pub fn try_mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        Ok(self * rhs)
    }

    /// Commutator `[self, rhs]`.
    pub fn commutator(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        &(self * rhs) - &(rhs * self)
    }

    /// Anticommutator `{self, rhs}`.
    pub fn anticommutator(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        &(self * rhs) + &(rhs * self)
    }

    /// Largest entry of `U†U − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).max_abs()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Real, orthogonal and of determinant +1, all within `tol`.
    pub fn is_special_orthogonal(&self, tol: f64) -> bool {
        self.is_real(tol) && self.is_unitary(tol) && (self.det() - ONE).norm() <= tol
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f != ZERO {
                    for k in col..n {
                        let v = a[col * n + k];
                        a[r * n + k] -= f * v;
                    }
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` for a singular matrix.
    pub fn inverse(&self) -> Option<ComplexMatrix> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).max_by(|&r, &s| a[(r, col)].norm().total_cmp(&a[(s, col)].norm()))?;
            if a[(pivot, col)].norm() < 1e-300 {
                return None;
            }
            if pivot != col {
                for k in 0..n {
                    a.data.swap(col * n + k, pivot * n + k);
                    inv.data.swap(col * n + k, pivot * n + k);
                }
            }
            let p = a[(col, col)].inv();
            for k in 0..n {
                a[(col, k)] *= p;
                inv[(col, k)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == ZERO {
                    continue;
                }
                for k in 0..n {
                    let (av, iv) = (a[(col, k)], inv[(col, k)]);
                    a[(r, k)] -= f * av;
                    inv[(r, k)] -= f * iv;
                }
            }
        }
        Some(inv)
    }

    /// Principal submatrix-like extraction: rows and columns by index lists of equal length.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
        assert_eq!(rows.len(), cols.len());
        Self::from_fn(rows.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self[(i, j)])
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    pub(crate) fn to_real_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self[(i, j)].re)
    }

    pub(crate) fn from_real_nalgebra(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| Complex64::new(m[(i, j)], 0.0))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product `a ⊗ b`; `a` is the more significant (leftmost) factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.dim, b.dim);
    ComplexMatrix::from_fn(m * n, |i, j| a[(i / n, j / n)] * b[(i % n, j % n)])
}

/// Product of the factors as written, left to right: `chain[0] · chain[1] · …`.
/// The leftmost factor is the one applied last to a state.
pub fn matmul_chain(chain: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = chain
        .split_first()
        .ok_or(Error::DimMismatch { expected: 1, found: 0 })?;
    rest.iter().try_fold((*first).clone(), |acc, m| acc.try_mul(m))
}

/// Input gate for synthesis: `x` must be real and orthogonal within `tol`.
/// Returns the (real) determinant.
pub fn check_real_orthogonal(x: &ComplexMatrix, tol: f64) -> Result<f64> {
    let n = x.dim;
    let imag = x.max_imag();
    let mut deviation: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let dot: f64 = (0..n).map(|k| x[(i, k)].re * x[(j, k)].re).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((dot - want).abs());
        }
    }
    if imag > tol || deviation > tol {
        return Err(Error::NotOrthogonal { deviation, imag });
    }
    Ok(x.det().re)
}

pub fn frobenius_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    check_dims(u, v)?;
    Ok((u - v).frobenius_norm())
}

/// Distance up to a global phase: `min_φ ‖u − φ·v‖_F` and the minimizing unit phase.
pub fn phase_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<(f64, Complex64)> {
    check_dims(u, v)?;
    let overlap = (&v.adjoint() * u).trace();
    let scale = u.frobenius_norm() * v.frobenius_norm();
    let phase = if overlap.norm() > 1e-13 * scale.max(f64::MIN_POSITIVE) {
        overlap / overlap.norm()
    } else {
        // Zero overlap: every phase gives the same distance. Report the first
        // eigenphase of v†u when it is unitary so the choice is reproducible.
        let w = &v.adjoint() * u;
        let candidates: Vec<Complex64> = if w.is_unitary(1e-8) {
            eig_unitary(&w, None, &Tolerances::default())
                .map(|s| s.eigenvalues)
                .unwrap_or_default()
        } else {
            Vec::new()
        };
        candidates
            .into_iter()
            .map(|p| ((u - &v.scale(p)).frobenius_norm(), p))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, p)| p)
            .unwrap_or(ONE)
    };
    Ok(((u - &v.scale(phase)).frobenius_norm(), phase))
}

fn check_dims(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<()> {
    if u.dim != v.dim {
        return Err(Error::DimMismatch {
            expected: u.dim,
            found: v.dim,
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eig_hermitian(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let sym = {
        let a = h.to_nalgebra();
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    };
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..h.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(h.dim, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Spectral decomposition `U = V · diag(λ) · V†` of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Columns form an orthonormal eigenbasis, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn reassemble(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diagonal(&self.eigenvalues);
        &(&self.eigenvectors * &d) * &self.eigenvectors.adjoint()
    }

    /// Eigenphases in `[−π, π)`.
    pub fn phases(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| wrap_phase(z.arg())).collect()
    }
}

/// Maps an angle into `[−π, π)`.
fn wrap_phase(phi: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = (phi + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if r >= std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Eigendecomposition of a unitary matrix through a Hermitian (Cayley) embedding.
///
/// The matrix is rotated so that −1 sits in the widest gap of its spectrum and
/// mapped to `H = i(I − V)(I + V)⁻¹`, which has the same eigenvectors and a
/// well-conditioned real spectrum. Eigenphases closer than `tol.cluster` form a
/// degenerate cluster; inside a cluster the basis also diagonalizes the
/// Hermitian part of `tiebreak` when one is supplied, and members are ordered
/// by its eigenvalues. Clusters are ordered by phase in `[−π, π)`.
pub fn eig_unitary(
    u: &ComplexMatrix,
    tiebreak: Option<&ComplexMatrix>,
    tol: &Tolerances,
) -> Result<SpectralDecomposition> {
    let n = u.dim;
    let deviation = u.unitarity_deviation();
    if deviation > tol.input {
        return Err(Error::NotUnitary { deviation });
    }
    if let Some(t) = tiebreak {
        check_dims(u, t)?;
    }

    let shift = cayley_shift(u);
    let v = u.scale(shift.conj());
    let id = ComplexMatrix::identity(n);
    let inv = (&id + &v)
        .inverse()
        .ok_or_else(|| Error::NoConvergence("Cayley embedding is singular".into()))?;
    let h = (&(&id - &v) * &inv).scale(I);
    let (_, mut basis) = eig_hermitian(&h);

    let rotated = &(&basis.adjoint() * u) * &basis;
    let mut lambdas: Vec<Complex64> = (0..n).map(|k| rotated[(k, k)]).collect();
    for z in &mut lambdas {
        if z.norm() < 0.5 {
            return Err(Error::NoConvergence(
                "eigenvector basis does not diagonalize the input".into(),
            ));
        }
        *z /= z.norm();
    }

    // Group eigenvalues into clusters along the unit circle.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| wrap_phase(lambdas[a].arg()).total_cmp(&wrap_phase(lambdas[b].arg())));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(c) if (lambdas[*c.last().unwrap()] - lambdas[k]).norm() < tol.cluster => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    if clusters.len() > 1 {
        let (first, last) = (clusters[0][0], *clusters.last().unwrap().last().unwrap());
        if (lambdas[first] - lambdas[last]).norm() < tol.cluster {
            let tail = clusters.pop().unwrap();
            clusters[0].splice(0..0, tail);
        }
    }

    let mut columns: Vec<(f64, f64, Vec<Complex64>, Complex64)> = Vec::with_capacity(n);
    for cluster in &clusters {
        let mean: Complex64 = cluster.iter().map(|&k| lambdas[k]).sum();
        let cluster_phase = wrap_phase(mean.arg());
        let vecs: Vec<Vec<Complex64>> = cluster
            .iter()
            .map(|&k| (0..n).map(|i| basis[(i, k)]).collect())
            .collect();
        let (keys, vecs) = match tiebreak {
            Some(t) if cluster.len() > 1 => resolve_cluster(&vecs, t),
            _ => ((0..vecs.len()).map(|k| k as f64).collect(), vecs),
        };
        for (key, v) in keys.into_iter().zip(vecs) {
            let lambda = rayleigh(u, &v);
            columns.push((cluster_phase, key, v, lambda / lambda.norm()));
        }
    }
    columns.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    for (j, (_, _, v, _)) in columns.iter().enumerate() {
        let v = canonical_phase(v);
        for i in 0..n {
            basis[(i, j)] = v[i];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues: columns.iter().map(|c| c.3).collect(),
        eigenvectors: basis,
    })
}

/// Rotation `ζ` such that `−ζ` lies in the widest gap of the spectrum of `u`.
fn cayley_shift(u: &ComplexMatrix) -> Complex64 {
    // cos φ is known exactly from the Hermitian part; ±arccos covers every eigenphase.
    let herm = (u + &u.adjoint()).scale(Complex64::new(0.5, 0.0));
    let (cosines, _) = eig_hermitian(&herm);
    let mut angles: Vec<f64> = cosines
        .iter()
        .flat_map(|&c| {
            let a = c.clamp(-1.0, 1.0).acos();
            [a, -a]
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut best = (0.0, angles[0] + std::f64::consts::PI);
    for (k, &a) in angles.iter().enumerate() {
        let next = if k + 1 < angles.len() {
            angles[k + 1]
        } else {
            angles[0] + two_pi
        };
        if next - a > best.0 {
            best = (next - a, 0.5 * (a + next));
        }
    }
    -Complex64::from_polar(1.0, best.1)
}

fn rayleigh(u: &ComplexMatrix, v: &[Complex64]) -> Complex64 {
    let n = u.dim;
    let mut acc = ZERO;
    for i in 0..n {
        let mut uv = ZERO;
        for j in 0..n {
            uv += u[(i, j)] * v[j];
        }
        acc += v[i].conj() * uv;
    }
    acc
}

/// Re-diagonalizes the Hermitian part of `t` restricted to the span of `vecs`.
fn resolve_cluster(vecs: &[Vec<Complex64>], t: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let m = vecs.len();
    let n = t.dim;
    let th = (t + &t.adjoint()).scale(Complex64::new(0.5, 0.0));
    let restricted = ComplexMatrix::from_fn(m, |a, b| {
        let mut acc = ZERO;
        for i in 0..n {
            let mut tv = ZERO;
            for j in 0..n {
                tv += th[(i, j)] * vecs[b][j];
            }
            acc += vecs[a][i].conj() * tv;
        }
        acc
    });
    let (values, w) = eig_hermitian(&restricted);
    let rotated = (0..m)
        .map(|c| {
            (0..n)
                .map(|i| (0..m).map(|a| vecs[a][i] * w[(a, c)]).sum())
                .collect()
        })
        .collect();
    (values, rotated)
}

/// Fixes the free phase of an eigenvector: the first entry with at least half
/// the largest magnitude is made real and positive.
fn canonical_phase(v: &[Complex64]) -> Vec<Complex64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v.iter().find(|z| z.norm() >= 0.5 * max).copied().unwrap_or(ONE);
    let rot = pivot.conj() / pivot.norm();
    v.iter().map(|z| z * rot).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }
    fn sy() -> ComplexMatrix {
        ComplexMatrix::from_row_major(vec![ZERO, -I, I, ZERO]).unwrap()
    }

    #[test]
    fn kron_of_x_and_identity_is_block_swap() {
        let k = kron(&sx(), &ComplexMatrix::identity(2));
        let expected = ComplexMatrix::from_real(
            4,
            &[0., 0., 1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., 1., 0., 0.],
        )
        .unwrap();
        assert_eq!(k, expected);
        assert_eq!(
            kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)),
            ComplexMatrix::identity(4)
        );
    }

    #[test]
    fn kron_of_y_with_y_is_real_antidiagonal() {
        let k = kron(&sy(), &sy());
        assert!(k.is_real(0.0));
        let anti: Vec<f64> = (0..4).map(|i| k[(i, 3 - i)].re).collect();
        assert_eq!(anti, vec![-1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn determinants() {
        // CNOT with control on qubit 2 and target on qubit 1 swaps |01> and |11>.
        let mut c = ComplexMatrix::zeros(4);
        for (i, j) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
            c[(i, j)] = ONE;
        }
        assert!((c.det() + ONE).norm() < 1e-15);
        assert!((ComplexMatrix::identity(8).det() - ONE).norm() < 1e-15);
        assert_eq!(frobenius_distance(&sx(), &sx()).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(4);
        assert!(matches!(frobenius_distance(&a, &b), Err(Error::DimMismatch { .. })));
        assert!(matches!(phase_distance(&a, &b), Err(Error::DimMismatch { .. })));
        assert!(matches!(matmul_chain(&[&a, &b]), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn phase_distance_recovers_exact_phase() {
        let u = kron(&sx(), &sy());
        let p = Complex64::from_polar(1.0, PI / 3.0);
        let (d, phase) = phase_distance(&u, &u.scale(p)).unwrap();
        assert!(d < 1e-14);
        assert!((phase - p.conj()).norm() < 1e-14);
        let (d, phase) = phase_distance(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(d, 0.0);
        assert!((phase - ONE).norm() < 1e-15);
    }

    #[test]
    fn phase_distance_with_zero_overlap() {
        // ‖I − φσx‖² = 4 for every unit φ.
        let (d, phase) = phase_distance(&ComplexMatrix::identity(2), &sx()).unwrap();
        assert!((d - 2.0).abs() < 1e-14);
        assert!((phase.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_unitary_identity_and_pauli() {
        let s = eig_unitary(&ComplexMatrix::identity(4), None, &Tolerances::default()).unwrap();
        assert!(s.eigenvalues.iter().all(|z| (z - ONE).norm() < 1e-14));
        assert!((&s.eigenvectors - &ComplexMatrix::identity(4)).max_abs() < 1e-14);

        let s = eig_unitary(&sy(), None, &Tolerances::default()).unwrap();
        let mut re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-14 && (re[1] - 1.0).abs() < 1e-14);
        assert!((&s.reassemble() - &sy()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn eig_unitary_orders_by_phase() {
        let phases = [2.5, -1.0, 0.3, -3.0];
        let d = ComplexMatrix::diagonal(&phases.map(|p| Complex64::from_polar(1.0, p)));
        let s = eig_unitary(&d, None, &Tolerances::default()).unwrap();
        let got = s.phases();
        let mut want = phases.to_vec();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_unitary_tiebreak_resolves_degenerate_cluster() {
        // diag(1, 1, -1, -1) with a tiebreak that mixes the degenerate pair.
        let d = ComplexMatrix::diagonal(&[ONE, ONE, -ONE, -ONE]);
        let h = 0.5_f64.sqrt();
        let q = ComplexMatrix::from_real(
            4,
            &[h, h, 0., 0., -h, h, 0., 0., 0., 0., 1., 0., 0., 0., 0., 1.],
        )
        .unwrap();
        let u = &(&q * &d) * &q.adjoint();
        let t = &(&q * &ComplexMatrix::diagonal(&[ONE, ONE.scale(2.0), ONE.scale(3.0), ONE.scale(4.0)])) * &q.adjoint();
        let s = eig_unitary(&u, Some(&t), &Tolerances::default()).unwrap();
        let restricted = &(&s.eigenvectors.adjoint() * &t) * &s.eigenvectors;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(restricted[(i, j)].norm() < 1e-12, "tiebreak not diagonal");
                }
            }
        }
        assert!((&s.reassemble() - &u).frobenius_norm() < 1e-13);
    }

    #[test]
    fn eig_unitary_rejects_non_unitary() {
        let m = ComplexMatrix::identity(2).scale(Complex64::new(2.0, 0.0));
        assert!(matches!(
            eig_unitary(&m, None, &Tolerances::default()),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn inverse_round_trip() {
        let a = ComplexMatrix::from_row_major(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(-1.0, 0.3),
            Complex64::new(2.0, -1.0),
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        assert!((&(&a * &inv) - &ComplexMatrix::identity(2)).max_abs() < 1e-14);
        assert!(ComplexMatrix::zeros(3).inverse().is_none());
    }
}

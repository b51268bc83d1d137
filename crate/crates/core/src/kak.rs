//! Numeric Cartan (KAK) factorization and one-qubit Euler angles.
//!
//! Every involution used here becomes a real symmetric matrix after an
//! orthonormal change of frame `T` (identity for two qubits, the magic matrix
//! for three), and the groups involved become real orthogonal block groups.
//! Two strategies cover the three decompositions:
//!
//! * `CosineSine`: the −1 and +1 eigenspaces of σ are paired plane by plane by
//!   the Cartan subalgebra, so the factorization is a CS decomposition
//!   `diag(U₁,U₂)·[[C,−S],[S,C]]·diag(V₁,V₂)ᵀ` in a frame adapted to 𝔞.
//! * `DiagonalPair`: the input is block diagonal `diag(g₁,g₂)` in the frame of
//!   a second involution, the subgroup is `diag(k,k)` and the torus is
//!   `diag(t,tᵀ)`. Then `g₁g₂ᵀ = k·t²·kᵀ` and the orthogonal normal form of
//!   `g₁g₂ᵀ` yields `k` and `t`.
//!
//! Both finish the same way: the abelian angles are re-extracted from the torus
//! factor, the torus factor is rebuilt exactly from them, and the right factor
//! is `k₂ = a†·k₁†·u`.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{eig_hermitian, eig_unitary, kron, ComplexMatrix, I};
use crate::pauli::{self, exp_commuting_sum, magic, ps, CartanBasisSet, PauliString, PauliSum};
use crate::tolerance::Tolerances;

type RMat = DMatrix<f64>;

/// Irrational weights for generic linear combinations of commuting generators.
fn mix_weights() -> [f64; 4] {
    [1.0, 2f64.sqrt(), 3f64.sqrt() + 0.1, 5f64.sqrt() + 0.3]
}

#[derive(Debug, Clone)]
enum Kind {
    CosineSine { q: RMat, half: usize },
    DiagonalPair { block: ComplexMatrix, bq: RMat, qp: RMat },
}

/// An involution `θ(x) = σ·x·σ` together with the bases of its ±1 parts and a
/// Cartan subalgebra.
#[derive(Debug, Clone)]
pub struct InvolutionSpec {
    pub name: String,
    pub sigma: ComplexMatrix,
    pub l_basis: CartanBasisSet,
    pub p_basis: CartanBasisSet,
    pub a_basis: CartanBasisSet,
    /// Unitary `T` with `T†·σ·T` and `T†·(i𝔩 ⊕ i𝔭)·T` real.
    pub frame: ComplexMatrix,
    kind: Kind,
}

impl InvolutionSpec {
    /// Spec factored by the cosine-sine strategy.
    pub fn cosine_sine(
        name: &str,
        sigma: PauliString,
        l_basis: CartanBasisSet,
        p_basis: CartanBasisSet,
        a_basis: CartanBasisSet,
        frame: ComplexMatrix,
    ) -> Result<Self> {
        let mut spec = InvolutionSpec {
            name: name.to_string(),
            sigma: sigma.to_matrix(),
            l_basis,
            p_basis,
            a_basis,
            frame,
            kind: Kind::CosineSine {
                q: RMat::zeros(0, 0),
                half: 0,
            },
        };
        spec.validate()?;
        let sigma_r = spec.real_of(&spec.sigma)?;
        let gens = spec.a_generators()?;
        let (q, half) = cs_frame(&sigma_r, &gens)?;
        spec.kind = Kind::CosineSine { q, half };
        Ok(spec)
    }

    /// Spec factored by the diagonal-pair strategy; `block` is a second
    /// involution that anticommutes with `sigma` and commutes with the whole
    /// algebra `𝔩 ⊕ 𝔭`.
    pub fn diagonal_pair(
        name: &str,
        sigma: PauliString,
        block: PauliString,
        l_basis: CartanBasisSet,
        p_basis: CartanBasisSet,
        a_basis: CartanBasisSet,
        frame: ComplexMatrix,
    ) -> Result<Self> {
        if sigma.commutes_with(&block) {
            return Err(Error::InvalidInvolution(format!(
                "{block} must anticommute with {sigma}"
            )));
        }
        if let Some(p) = l_basis
            .elements
            .iter()
            .chain(&p_basis.elements)
            .find(|p| !p.commutes_with(&block))
        {
            return Err(Error::InvalidInvolution(format!("{p} does not commute with {block}")));
        }
        let mut spec = InvolutionSpec {
            name: name.to_string(),
            sigma: sigma.to_matrix(),
            l_basis,
            p_basis,
            a_basis,
            frame,
            kind: Kind::DiagonalPair {
                block: block.to_matrix(),
                bq: RMat::zeros(0, 0),
                qp: RMat::zeros(0, 0),
            },
        };
        spec.validate()?;
        let sigma_r = spec.real_of(&spec.sigma)?;
        let tau_r = spec.real_of(&block.to_matrix())?;
        let gens = spec.a_generators()?;
        let (bq, qp) = pair_frame(&sigma_r, &tau_r, &gens)?;
        spec.kind = Kind::DiagonalPair {
            block: block.to_matrix(),
            bq,
            qp,
        };
        Ok(spec)
    }

    /// σ = YY over so4_l / so4_p / so4_a.
    pub fn two_qubit() -> &'static InvolutionSpec {
        static SPEC: OnceLock<InvolutionSpec> = OnceLock::new();
        SPEC.get_or_init(|| {
            let t = pauli::tables();
            InvolutionSpec::cosine_sine(
                "two-qubit",
                ps("YY"),
                t.so4_l.clone(),
                t.so4_p.clone(),
                t.so4_a.clone(),
                ComplexMatrix::identity(4),
            )
            .expect("two-qubit involution is valid")
        })
    }

    /// σ = IIZ over so8_l / so8_p / so8_a, in the magic frame.
    pub fn three_qubit_outer() -> &'static InvolutionSpec {
        static SPEC: OnceLock<InvolutionSpec> = OnceLock::new();
        SPEC.get_or_init(|| {
            let t = pauli::tables();
            InvolutionSpec::cosine_sine(
                "three-qubit outer",
                ps("IIZ"),
                t.so8_l.clone(),
                t.so8_p.clone(),
                t.so8_a.clone(),
                magic(),
            )
            .expect("outer three-qubit involution is valid")
        })
    }

    /// σ = IIX over l1 / p1 / a1, in the magic frame.
    pub fn three_qubit_inner() -> &'static InvolutionSpec {
        static SPEC: OnceLock<InvolutionSpec> = OnceLock::new();
        SPEC.get_or_init(|| {
            let t = pauli::tables();
            InvolutionSpec::diagonal_pair(
                "three-qubit inner",
                ps("IIX"),
                ps("IIZ"),
                t.l1.clone(),
                t.p1.clone(),
                t.a1.clone(),
                magic(),
            )
            .expect("inner three-qubit involution is valid")
        })
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    /// `θ(x) = σ·x·σ`.
    pub fn theta(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &(&self.sigma * x) * &self.sigma
    }

    /// Largest of `‖σLσ − L‖` over 𝔩, `‖σPσ + P‖` over 𝔭, pairwise
    /// commutators in 𝔞, and imaginary parts in the real frame.
    pub fn validation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in &self.l_basis.elements {
            let m = l.to_matrix();
            worst = worst.max((&self.theta(&m) - &m).frobenius_norm());
        }
        for p in &self.p_basis.elements {
            let m = p.to_matrix();
            worst = worst.max((&self.theta(&m) + &m).frobenius_norm());
        }
        let a: Vec<ComplexMatrix> = self.a_basis.elements.iter().map(|p| p.to_matrix()).collect();
        for (i, x) in a.iter().enumerate() {
            for y in &a[i + 1..] {
                worst = worst.max(x.commutator(y).frobenius_norm());
            }
        }
        let t_adj = self.frame.adjoint();
        let in_frame = |m: &ComplexMatrix| (&(&t_adj * m) * &self.frame).max_imag();
        worst = worst.max(in_frame(&self.sigma));
        for p in self.l_basis.elements.iter().chain(&self.p_basis.elements) {
            worst = worst.max(in_frame(&p.to_matrix().scale(I)));
        }
        worst
    }

    /// Checks the involution against its bases; fails with `InvalidInvolution`.
    pub fn validate(&self) -> Result<f64> {
        let n = self.sigma.dim();
        let sizes_ok = [&self.l_basis, &self.p_basis, &self.a_basis]
            .iter()
            .all(|b| !b.is_empty() && 1usize << b.num_qubits() == n);
        if !sizes_ok || self.frame.dim() != n {
            return Err(Error::InvalidInvolution(format!("{}: inconsistent dimensions", self.name)));
        }
        if !self.a_basis.is_subset_of(&self.p_basis) {
            return Err(Error::InvalidInvolution(format!("{}: 𝔞 is not inside 𝔭", self.name)));
        }
        if self.a_basis.len() > mix_weights().len() {
            return Err(Error::InvalidInvolution(format!("{}: 𝔞 has too many elements", self.name)));
        }
        if !self.frame.is_unitary(1e-12) {
            return Err(Error::InvalidInvolution(format!("{}: frame is not unitary", self.name)));
        }
        let r = self.validation_residual();
        if r > 1e-12 {
            return Err(Error::InvalidInvolution(format!(
                "{}: validation residual {r:.3e}",
                self.name
            )));
        }
        Ok(r)
    }

    fn real_of(&self, m: &ComplexMatrix) -> Result<RMat> {
        let r = &(&self.frame.adjoint() * m) * &self.frame;
        let imag = r.max_imag();
        if imag > 1e-8 {
            return Err(Error::FactorizationResidual {
                residual: imag,
                context: format!("{}: matrix is not real in the involution frame", self.name),
            });
        }
        Ok(r.to_real_nalgebra())
    }

    fn from_real(&self, r: &RMat) -> ComplexMatrix {
        let m = ComplexMatrix::from_real_nalgebra(r);
        &(&self.frame * &m) * &self.frame.adjoint()
    }

    /// Real-frame generators `T†·(−iP)·T` of 𝔞.
    fn a_generators(&self) -> Result<Vec<RMat>> {
        self.a_basis
            .elements
            .iter()
            .map(|p| self.real_of(&p.to_matrix().scale(-I)))
            .collect()
    }
}

/// `u = k1·a·k2`.
#[derive(Debug, Clone, PartialEq)]
pub struct KakResult {
    pub k1: ComplexMatrix,
    pub a: ComplexMatrix,
    pub k2: ComplexMatrix,
    /// Coefficients of `a = exp(−i·Σ params[j]·a_basis[j])`.
    pub params: Vec<f64>,
    /// Largest θ-fixedness / torus-membership residual observed.
    pub residual: f64,
    /// Determinant and branch repairs applied along the way.
    pub repairs: Vec<String>,
}

impl KakResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.k1 * &self.a) * &self.k2
    }

    pub fn reconstruction_error(&self, u: &ComplexMatrix) -> f64 {
        (&self.reconstruct() - u).frobenius_norm()
    }

    /// `max(‖θ(k1) − k1‖, ‖θ(k2) − k2‖)`.
    pub fn theta_residual(&self, spec: &InvolutionSpec) -> f64 {
        let mut worst: f64 = 0.0;
        for k in [&self.k1, &self.k2] {
            worst = worst.max((&spec.theta(k) - k).frobenius_norm());
            if let Kind::DiagonalPair { block, .. } = &spec.kind {
                worst = worst.max((&(&(block * k) * block) - k).frobenius_norm());
            }
        }
        worst
    }
}

/// Factors `u = k1·a·k2` with `k1, k2 ∈ exp(i𝔩)` and `a ∈ exp(i𝔞)`.
pub fn kak_factor(u: &ComplexMatrix, spec: &InvolutionSpec, tol: &Tolerances) -> Result<KakResult> {
    if u.dim() != spec.dim() {
        return Err(Error::DimMismatch {
            expected: spec.dim(),
            found: u.dim(),
        });
    }
    let deviation = u.unitarity_deviation();
    if deviation > tol.input {
        return Err(Error::NotUnitary { deviation });
    }
    let xr = spec.real_of(u)?;
    let mut repairs = Vec::new();
    let (k1r, ar) = match &spec.kind {
        Kind::CosineSine { q, half } => cs_factor(&xr, q, *half, &mut repairs)?,
        Kind::DiagonalPair { bq, qp, .. } => pair_factor(&xr, bq, qp, tol)?,
    };
    let k1 = spec.from_real(&k1r);
    let a_approx = spec.from_real(&ar);
    let params = abelian_params(&a_approx, &spec.a_basis)?;
    let a = exp_commuting_sum(&PauliSum::from_basis(&spec.a_basis, &params)?)?;
    let k2 = &(&a.adjoint() * &k1.adjoint()) * u;
    let mut result = KakResult {
        k1,
        a,
        k2,
        params,
        residual: 0.0,
        repairs,
    };
    let torus = (&result.a - &a_approx).frobenius_norm();
    result.residual = result.theta_residual(spec).max(torus);
    if result.residual > tol.factorization {
        return Err(Error::FactorizationResidual {
            residual: result.residual,
            context: spec.name.clone(),
        });
    }
    Ok(result)
}

/// Symmetric eigendecomposition, ascending, with each eigenvector's first
/// large entry made positive.
fn sym_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let sym = (m + m.transpose()) * 0.5;
    let e = sym.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let mut v = RMat::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        let col = e.eigenvectors.column(k);
        let max = col.amax();
        let pivot = col.iter().find(|x| x.abs() >= 0.5 * max).copied().unwrap_or(1.0);
        let s = pivot.signum();
        for i in 0..n {
            v[(i, j)] = s * col[i];
        }
    }
    (order.iter().map(|&k| e.eigenvalues[k]).collect(), v)
}

fn columns_where(v: &RMat, w: &[f64], keep: impl Fn(f64) -> bool) -> RMat {
    let cols: Vec<_> = (0..w.len()).filter(|&k| keep(w[k])).map(|k| v.column(k).into_owned()).collect();
    RMat::from_columns(&cols)
}

fn mixed(gens: &[RMat]) -> RMat {
    let n = gens[0].nrows();
    gens.iter()
        .zip(mix_weights())
        .fold(RMat::zeros(n, n), |acc, (g, r)| acc + g * r)
}

/// Frame `Q = [E | F]` with `E` spanning the +1 eigenspace of σ and
/// `F = H·E/ω` the partner vectors under the generic torus generator `H`.
fn cs_frame(sigma_r: &RMat, gens: &[RMat]) -> Result<(RMat, usize)> {
    let (w, v) = sym_eigen(sigma_r);
    let bp = columns_where(&v, &w, |x| x > 0.0);
    let half = bp.ncols();
    if 2 * half != sigma_r.nrows() || gens.len() != half {
        return Err(Error::InvalidInvolution(
            "cosine-sine strategy needs equal eigenspaces paired by 𝔞".into(),
        ));
    }
    let h = mixed(gens);
    let h2 = -(&h * &h);
    let (ww, y) = sym_eigen(&(bp.transpose() * h2 * &bp));
    let e = &bp * y;
    let mut f = RMat::zeros(e.nrows(), half);
    for i in 0..half {
        if ww[i] < 1e-6 {
            return Err(Error::InvalidInvolution("𝔞 does not pair the eigenspaces".into()));
        }
        f.set_column(i, &(&h * e.column(i) / ww[i].sqrt()));
    }
    let mut q = RMat::zeros(e.nrows(), 2 * half);
    q.view_mut((0, 0), (e.nrows(), half)).copy_from(&e);
    q.view_mut((0, half), (e.nrows(), half)).copy_from(&f);
    Ok((q, half))
}

/// Orthonormalizes the columns of `y` in the given order; columns that vanish
/// after projection are replaced from the standard basis.
fn gram_schmidt(y: &RMat, order: &[usize]) -> RMat {
    let (n, p) = y.shape();
    let mut u = RMat::zeros(n, p);
    let mut done: Vec<usize> = Vec::new();
    let project = |mut v: nalgebra::DVector<f64>, u: &RMat, done: &[usize]| {
        for _ in 0..2 {
            for &j in done {
                let c = u.column(j).dot(&v);
                v -= u.column(j) * c;
            }
        }
        v
    };
    for &i in order {
        let mut v = project(y.column(i).into_owned(), &u, &done);
        if v.norm() < 1e-7 {
            for k in std::iter::once(i.min(n - 1)).chain(0..n) {
                let mut e = nalgebra::DVector::zeros(n);
                e[k] = 1.0;
                v = project(e, &u, &done);
                if v.norm() > 0.5 {
                    break;
                }
            }
        }
        let nv = v.norm();
        u.set_column(i, &(v / nv));
        done.push(i);
    }
    u
}

/// Orthonormal basis of the column span of `span` (orthonormal columns) that is
/// as close as possible to the standard basis: projections of `e_k`, chosen
/// greedily by largest remaining norm. Makes degenerate eigenspaces canonical.
fn canonical_basis(span: &RMat) -> RMat {
    let (n, m) = span.shape();
    let proj = span * span.transpose();
    let mut chosen: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(m);
    for _ in 0..m {
        let mut best: Option<(f64, nalgebra::DVector<f64>)> = None;
        for k in 0..n {
            let mut v = proj.column(k).into_owned();
            for _ in 0..2 {
                for c in &chosen {
                    let d = c.dot(&v);
                    v -= c * d;
                }
            }
            let nv = v.norm();
            if best.as_ref().is_none_or(|(b, _)| nv > b + 1e-12) {
                best = Some((nv, v));
            }
        }
        let (nv, v) = best.expect("nonempty span");
        chosen.push(v / nv);
    }
    RMat::from_columns(&chosen)
}

/// Singular value decomposition `m = u·diag(s)·vᵀ` by one-sided Jacobi
/// rotations. nalgebra's bidiagonal SVD leaves reconstruction residuals near
/// 1e-9 on some 4×4 inputs here.
struct Svd {
    u: RMat,
    s: Vec<f64>,
    v: RMat,
}

fn svd(m: &RMat) -> Svd {
    let n = m.ncols();
    let mut a = m.clone();
    let mut v = RMat::identity(n, n);
    for _ in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dot(&a.column(j));
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for x in [&mut a, &mut v] {
                    for r in 0..x.nrows() {
                        let (p, q) = (x[(r, i)], x[(r, j)]);
                        x[(r, i)] = c * p - s * q;
                        x[(r, j)] = s * p + c * q;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    let scale = s.iter().copied().fold(0.0, f64::max);
    let mut y = a.clone();
    for k in 0..n {
        if s[k] > 1e-300 && s[k] > 1e-14 * scale {
            y.column_mut(k).scale_mut(1.0 / s[k]);
        } else {
            y.column_mut(k).fill(0.0);
        }
    }
    // Orthonormal columns are untouched; vanishing ones are completed.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| s[q].total_cmp(&s[p]));
    Svd {
        u: gram_schmidt(&y, &order),
        s,
        v,
    }
}

/// Nearest orthogonal matrix (polar factor).
fn polar(m: &RMat) -> RMat {
    let d = svd(m);
    d.u * d.v.transpose()
}

fn block_diag(a: &RMat, b: &RMat) -> RMat {
    let (p, q) = (a.nrows(), b.nrows());
    let mut m = RMat::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(a);
    m.view_mut((p, p), (q, q)).copy_from(b);
    m
}

fn cs_factor(xr: &RMat, q: &RMat, p: usize, repairs: &mut Vec<String>) -> Result<(RMat, RMat)> {
    let xq = q.transpose() * xr * q;
    let x11 = xq.view((0, 0), (p, p)).into_owned();
    let x12 = xq.view((0, p), (p, p)).into_owned();
    let x21 = xq.view((p, 0), (p, p)).into_owned();
    let x22 = xq.view((p, p), (p, p)).into_owned();

    // Right singular vectors for angles below π/4 come from x21 and the rest
    // from x11, where the singular values are well separated.
    let svd11 = svd(&x11);
    let svd21 = svd(&x21);
    let (v11, v21) = (&svd11.v, &svd21.v);
    let (c_vals, s_vals) = (&svd11.s, &svd21.s);
    let mut by_c: Vec<usize> = (0..p).collect();
    by_c.sort_by(|&a, &b| c_vals[b].total_cmp(&c_vals[a]));
    let mut by_s: Vec<usize> = (0..p).collect();
    by_s.sort_by(|&a, &b| s_vals[a].total_cmp(&s_vals[b]));
    let m = s_vals.iter().filter(|&&s| s < std::f64::consts::FRAC_1_SQRT_2).count();
    let mut cols = Vec::with_capacity(p);
    let mut angles = Vec::with_capacity(p);
    for &k in &by_s[..m] {
        cols.push(v21.column(k).into_owned());
        angles.push(s_vals[k].min(1.0).asin());
    }
    for &k in &by_c[m..] {
        cols.push(v11.column(k).into_owned());
        angles.push(c_vals[k].min(1.0).acos());
    }
    let forward: Vec<usize> = (0..p).collect();
    let mut v1 = gram_schmidt(&RMat::from_columns(&cols), &forward);
    let mut start = 0;
    while start < p {
        let mut end = start + 1;
        while end < p && (angles[end] - angles[start]).abs() < 1e-10 {
            end += 1;
        }
        if end - start > 1 {
            let block = canonical_basis(&v1.columns(start, end - start).into_owned());
            v1.columns_mut(start, end - start).copy_from(&block);
        }
        start = end;
    }

    let backward: Vec<usize> = (0..p).rev().collect();
    let mut u1 = gram_schmidt(&(&x11 * &v1), &forward);
    let mut u2 = gram_schmidt(&(&x21 * &v1), &backward);
    let cc = (u1.transpose() * &x11 * &v1).diagonal();
    let ss = (u2.transpose() * &x21 * &v1).diagonal();
    let mut theta: Vec<f64> = (0..p).map(|i| ss[i].atan2(cc[i])).collect();
    let c = RMat::from_diagonal(&nalgebra::DVector::from_iterator(p, theta.iter().map(|t| t.cos())));
    let s = RMat::from_diagonal(&nalgebra::DVector::from_iterator(p, theta.iter().map(|t| t.sin())));
    let v2t = &c * u2.transpose() * &x22 - &s * u1.transpose() * &x12;
    let mut v2 = polar(&v2t).transpose();

    // Move determinant defects into the torus: negating column 0 of two
    // factors is compensated by a change of θ₀.
    let neg = |m: &RMat| m.determinant() < 0.0;
    let flip = |m: &mut RMat| m.column_mut(0).neg_mut();
    let mut log = |what: &str, theta0: f64| repairs.push(format!("cosine-sine: {what}, θ₀ → {theta0:.6}"));
    if neg(&u1) && neg(&v1) {
        flip(&mut u1);
        flip(&mut v1);
        theta[0] = -theta[0];
        log("flipped (U1, V1)", theta[0]);
    }
    if neg(&u2) && neg(&v2) {
        flip(&mut u2);
        flip(&mut v2);
        theta[0] = -theta[0];
        log("flipped (U2, V2)", theta[0]);
    }
    match (neg(&u1), neg(&u2), neg(&v1), neg(&v2)) {
        (false, false, false, false) => {}
        (true, false, false, true) => {
            flip(&mut u1);
            flip(&mut v2);
            theta[0] = std::f64::consts::PI - theta[0];
            log("flipped (U1, V2)", theta[0]);
        }
        (false, true, true, false) => {
            flip(&mut u2);
            flip(&mut v1);
            theta[0] = std::f64::consts::PI - theta[0];
            log("flipped (U2, V1)", theta[0]);
        }
        (true, true, false, false) => {
            flip(&mut u1);
            flip(&mut u2);
            theta[0] += std::f64::consts::PI;
            log("flipped (U1, U2)", theta[0]);
        }
        (false, false, true, true) => {
            flip(&mut v1);
            flip(&mut v2);
            theta[0] += std::f64::consts::PI;
            log("flipped (V1, V2)", theta[0]);
        }
        other => {
            return Err(Error::FactorizationResidual {
                residual: 1.0,
                context: format!("cosine-sine determinant pattern {other:?} has odd parity"),
            })
        }
    }

    let mut cs = RMat::zeros(2 * p, 2 * p);
    for (i, t) in theta.iter().enumerate() {
        let (sn, cn) = t.sin_cos();
        cs[(i, i)] = cn;
        cs[(p + i, p + i)] = cn;
        cs[(i, p + i)] = -sn;
        cs[(p + i, i)] = sn;
    }
    let k1r = q * block_diag(&u1, &u2) * q.transpose();
    let ar = q * cs * q.transpose();
    Ok((k1r, ar))
}

/// Frames for the diagonal-pair strategy: `Bq = [B₊ | σ·B₊]` block-diagonalizes
/// the algebra, and `Q_p` puts the torus on `Bq`'s first block into 2×2 planes.
fn pair_frame(sigma_r: &RMat, tau_r: &RMat, gens: &[RMat]) -> Result<(RMat, RMat)> {
    let (w, v) = sym_eigen(tau_r);
    let bp = columns_where(&v, &w, |x| x > 0.0);
    let half = bp.ncols();
    if 2 * half != tau_r.nrows() || gens.len() * 2 != half {
        return Err(Error::InvalidInvolution(
            "diagonal-pair strategy needs a maximal torus on each block".into(),
        ));
    }
    let bm = sigma_r * &bp;
    let mut bq = RMat::zeros(2 * half, 2 * half);
    bq.view_mut((0, 0), (2 * half, half)).copy_from(&bp);
    bq.view_mut((0, half), (2 * half, half)).copy_from(&bm);

    let mut blocks = Vec::with_capacity(gens.len());
    for g in gens {
        let gb = bq.transpose() * g * &bq;
        let h = gb.view((0, 0), (half, half)).into_owned();
        let lower = gb.view((half, half), (half, half)).into_owned();
        let off = gb.view((0, half), (half, half)).amax().max(gb.view((half, 0), (half, half)).amax());
        if off > 1e-12 || (&h + &lower).amax() > 1e-12 {
            return Err(Error::InvalidInvolution("𝔞 is not of the form diag(h, −h)".into()));
        }
        blocks.push(h);
    }
    let h = mixed(&blocks);
    let (ww, y) = sym_eigen(&(-(&h * &h)));
    let mut qp = RMat::zeros(half, half);
    for i in (0..half).step_by(2) {
        if ww[i] < 1e-6 {
            return Err(Error::InvalidInvolution("torus generator is singular".into()));
        }
        let e = y.column(i).into_owned();
        let f = &h * &e / ww[i].sqrt();
        qp.set_column(i, &e);
        qp.set_column(i + 1, &f);
    }
    if qp.determinant() < 0.0 {
        qp.column_mut(1).neg_mut();
    }
    Ok((bq, qp))
}

fn plane_rotations(phis: &[f64]) -> RMat {
    let n = 2 * phis.len();
    let mut r = RMat::zeros(n, n);
    for (i, phi) in phis.iter().enumerate() {
        let (s, c) = phi.sin_cos();
        r[(2 * i, 2 * i)] = c;
        r[(2 * i, 2 * i + 1)] = -s;
        r[(2 * i + 1, 2 * i)] = s;
        r[(2 * i + 1, 2 * i + 1)] = c;
    }
    r
}

fn pair_factor(xr: &RMat, bq: &RMat, qp: &RMat, tol: &Tolerances) -> Result<(RMat, RMat)> {
    let half = qp.nrows();
    let lb = bq.transpose() * xr * bq;
    let off = lb.view((0, half), (half, half)).amax().max(lb.view((half, 0), (half, half)).amax());
    if off > tol.factorization {
        return Err(Error::FactorizationResidual {
            residual: off,
            context: "input does not preserve the block involution".into(),
        });
    }
    let g1 = lb.view((0, 0), (half, half)).into_owned();
    let g2 = lb.view((half, half), (half, half)).into_owned();
    // Normal form in the torus frame, so that a trivial torus part gives k = I.
    let w = qp.transpose() * &g1 * g2.transpose() * qp;
    let (k, phis) = orthogonal_normal_form(&w, tol)?;
    let kk = qp * &k * qp.transpose();
    let half_phis: Vec<f64> = phis.iter().map(|p| 0.5 * p).collect();
    let t = qp * plane_rotations(&half_phis) * qp.transpose();
    let k1r = bq * block_diag(&kk, &kk) * bq.transpose();
    let ar = bq * block_diag(&t, &t.transpose()) * bq.transpose();
    Ok((k1r, ar))
}

/// Writes `w ∈ SO(2m)` as `k·R(φ)·kᵀ` with `k ∈ SO(2m)` and `R(φ)` a direct sum
/// of plane rotations.
fn orthogonal_normal_form(w: &RMat, tol: &Tolerances) -> Result<(RMat, Vec<f64>)> {
    let n = w.nrows();
    let wc = ComplexMatrix::from_real_nalgebra(w);
    let spec = eig_unitary(&wc, None, tol)?;
    let vecs = &spec.eigenvectors;
    let mut planes: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut plus: Vec<usize> = Vec::new();
    let mut minus: Vec<usize> = Vec::new();
    for (k, lambda) in spec.eigenvalues.iter().enumerate() {
        if lambda.im.abs() < tol.cluster {
            if lambda.re > 0.0 {
                plus.push(k);
            } else {
                minus.push(k);
            }
        } else if lambda.im > 0.0 {
            let s = std::f64::consts::SQRT_2;
            planes.push(nalgebra::DVector::from_iterator(n, (0..n).map(|i| s * vecs[(i, k)].re)));
            planes.push(nalgebra::DVector::from_iterator(n, (0..n).map(|i| -s * vecs[(i, k)].im)));
        }
    }
    // Real eigenvectors: the real span of each ±1 cluster.
    for cluster in [plus, minus] {
        if cluster.is_empty() {
            continue;
        }
        let proj = RMat::from_fn(n, n, |i, j| {
            cluster
                .iter()
                .map(|&k| (vecs[(i, k)] * vecs[(j, k)].conj()).re)
                .sum::<f64>()
        });
        let (pw, pv) = sym_eigen(&proj);
        let span = columns_where(&pv, &pw, |x| x > 0.5);
        let basis = canonical_basis(&span);
        planes.extend(basis.column_iter().map(|c| c.into_owned()));
    }
    if planes.len() != n {
        return Err(Error::NoConvergence(format!(
            "normal form found {} of {n} basis vectors",
            planes.len()
        )));
    }
    let basis = RMat::from_columns(&planes);
    let qr = basis.qr();
    let (mut k, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            k.column_mut(j).neg_mut();
        }
    }
    if k.determinant() < 0.0 {
        k.column_mut(1).neg_mut();
    }
    let d = k.transpose() * w * &k;
    let phis = (0..n / 2)
        .map(|i| {
            let (a, b) = (2 * i, 2 * i + 1);
            (d[(b, a)] - d[(a, b)]).atan2(d[(a, a)] + d[(b, b)])
        })
        .collect();
    Ok((k, phis))
}

/// Coefficients `c` with `exp(−i·Σ cⱼ·basisⱼ) = a`, minimal in `Σ|cⱼ|` over the
/// 2π-lattice of equivalent branches.
pub fn abelian_params(a: &ComplexMatrix, basis: &CartanBasisSet) -> Result<Vec<f64>> {
    let n = 1usize << basis.num_qubits();
    if a.dim() != n {
        return Err(Error::DimMismatch {
            expected: n,
            found: a.dim(),
        });
    }
    if !basis.is_abelian() {
        let p = basis.elements[0];
        let q = *basis.elements.iter().find(|q| !p.commutes_with(q)).unwrap_or(&p);
        return Err(Error::NonCommutingTerms(p.to_string(), q.to_string()));
    }
    let mats: Vec<ComplexMatrix> = basis.elements.iter().map(|p| p.to_matrix()).collect();
    let m = mats.len();
    if m > mix_weights().len() {
        return Err(Error::DimMismatch {
            expected: mix_weights().len(),
            found: m,
        });
    }
    let h = mats
        .iter()
        .zip(mix_weights())
        .fold(ComplexMatrix::zeros(n), |acc, (p, r)| &acc + &p.scale(Complex64::new(r, 0.0)));
    let (_, v) = eig_hermitian(&h);
    let vd = v.adjoint();
    let d = &(&vd * a) * &v;
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                residual = residual.max(d[(i, j)].norm());
            }
        }
        residual = residual.max((d[(i, i)].norm() - 1.0).abs());
    }
    if residual > 1e-9 {
        return Err(Error::NotInAbelianGroup { residual });
    }
    let phases: Vec<f64> = (0..n).map(|k| -d[(k, k)].arg()).collect();
    let signs: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            mats.iter()
                .map(|p| (&(&vd * p) * &v)[(k, k)].re.signum())
                .collect()
        })
        .collect();

    // Independent rows of the signature matrix, greedily in index order.
    let mut rows: Vec<usize> = Vec::new();
    for k in 0..n {
        let mut trial: Vec<usize> = rows.clone();
        trial.push(k);
        let sub = RMat::from_fn(trial.len(), m, |i, j| signs[trial[i]][j]);
        if sub.svd(false, false).rank(1e-9) == trial.len() {
            rows = trial;
        }
        if rows.len() == m {
            break;
        }
    }
    if rows.len() < m {
        return Err(Error::NotInAbelianGroup { residual: f64::INFINITY });
    }
    let sub = RMat::from_fn(m, m, |i, j| signs[rows[i]][j]);
    let inv = sub.try_inverse().ok_or(Error::NotInAbelianGroup { residual: f64::INFINITY })?;

    let two_pi = 2.0 * std::f64::consts::PI;
    let wrap = |x: f64| {
        let r = x.rem_euclid(two_pi);
        r.min(two_pi - r)
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let span = 7usize;
    for code in 0..span.pow(m as u32) {
        let mut rhs = nalgebra::DVector::zeros(m);
        let mut c = code;
        for i in 0..m {
            let shift = (c % span) as f64 - 3.0;
            c /= span;
            rhs[i] = phases[rows[i]] + two_pi * shift;
        }
        let cand = &inv * rhs;
        let consistent = (0..n).all(|k| {
            let lhs: f64 = (0..m).map(|j| signs[k][j] * cand[j]).sum();
            wrap(lhs - phases[k]) < 1e-7
        });
        if !consistent {
            continue;
        }
        let norm: f64 = cand.iter().map(|x| x.abs()).sum();
        if best.as_ref().is_none_or(|(b, _)| norm < b - 1e-12) {
            best = Some((norm, cand.iter().copied().collect()));
        }
    }
    best.map(|(_, c)| c)
        .ok_or(Error::NotInAbelianGroup { residual: f64::INFINITY })
}

/// `u = phase · Rz(theta) · Ry(phi) · Rz(psi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerZYZ {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub phase: Complex64,
}

impl EulerZYZ {
    pub fn matrix(&self) -> ComplexMatrix {
        let rz = |t: f64| {
            ComplexMatrix::diagonal(&[Complex64::from_polar(1.0, -t), Complex64::from_polar(1.0, t)])
        };
        let (s, c) = self.phi.sin_cos();
        let ry = ComplexMatrix::from_real(2, &[c, -s, s, c]).expect("2x2");
        (&(&rz(self.theta) * &ry) * &rz(self.psi)).scale(self.phase)
    }
}

/// ZYZ Euler angles with `phi ∈ [0, π/2]` and `theta, psi ∈ (−π, π]`. When the
/// Ry angle vanishes, `psi = 0` and the whole z-rotation sits in `theta`.
pub fn euler_zyz(u: &ComplexMatrix) -> Result<EulerZYZ> {
    if u.dim() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    let deviation = u.unitarity_deviation();
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    let root = u.det().sqrt();
    let (a, b) = (u[(0, 0)] / root, u[(1, 0)] / root);
    let phi = b.norm().atan2(a.norm());
    let (theta, psi) = if b.norm() <= 1e-14 {
        (-a.arg(), 0.0)
    } else if a.norm() <= 1e-14 {
        (b.arg(), 0.0)
    } else {
        (0.5 * (b.arg() - a.arg()), -0.5 * (a.arg() + b.arg()))
    };
    let mut e = EulerZYZ {
        theta: crate::circuit::normalize_angle(theta),
        phi,
        psi: crate::circuit::normalize_angle(psi),
        phase: Complex64::new(1.0, 0.0),
    };
    let t = (&e.matrix().adjoint() * u).trace() * 0.5;
    e.phase = t / t.norm();
    Ok(e)
}

/// Best approximation `u ≈ v ⊗ w` by rank-1 truncation of the rearranged
/// matrix `R[(i₁,j₁),(i₂,j₂)] = u[2i₁+i₂, 2j₁+j₂]`. The scalar split is chosen
/// so that `‖v‖_F = √2`.
///
/// The leading singular pair comes from power iteration on `R·R†`, started at
/// the largest column of `R`; for a near-product the spectral gap makes this
/// converge in a couple of steps.
pub fn nearest_product_2x2(u: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix, f64)> {
    if u.dim() != 4 {
        return Err(Error::DimMismatch {
            expected: 4,
            found: u.dim(),
        });
    }
    let r = DMatrix::from_fn(4, 4, |row, col| {
        let (i1, j1, i2, j2) = (row / 2, row % 2, col / 2, col % 2);
        u[(2 * i1 + i2, 2 * j1 + j2)]
    });
    let start = (0..4)
        .max_by(|&a, &b| r.column(a).norm().total_cmp(&r.column(b).norm()))
        .expect("4 columns");
    let mut left = r.column(start).into_owned();
    let norm = left.norm();
    if norm == 0.0 {
        return Ok((ComplexMatrix::zeros(2), ComplexMatrix::zeros(2), 0.0));
    }
    left /= Complex64::new(norm, 0.0);
    let rrh = &r * r.adjoint();
    for _ in 0..100 {
        let mut next = &rrh * &left;
        let n = next.norm();
        next /= Complex64::new(n, 0.0);
        let delta = (&next - &left).norm();
        left = next;
        if delta < 1e-15 {
            break;
        }
    }
    // R ≈ left · rightᵀ with rightᵀ = left†·R.
    let right = left.adjoint() * &r;
    let vn = ComplexMatrix::from_fn(2, |i, j| left[2 * i + j]);
    let wn = ComplexMatrix::from_fn(2, |i, j| right[2 * i + j]);
    let scale = 2f64.sqrt();
    let v = vn.scale(Complex64::new(scale, 0.0));
    let w = wn.scale(Complex64::new(1.0 / scale, 0.0));
    let residual = (&kron(&v, &w) - u).frobenius_norm();
    Ok((v, w, residual))
}

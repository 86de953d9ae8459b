//! Dense complex linear algebra used by the reflection designs.
//!
//! Matrices are `nalgebra` column-major containers, so `vec(A)` is simply the
//! storage slice. The two expensive decompositions (SVD and Hermitian
//! eigendecomposition) are delegated to `faer`, compiled without its thread
//! pool so every result is bit-stable regardless of how callers schedule work.

use nalgebra::{Complex, DMatrix, DVector};
use thiserror::Error;

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;
/// Dense complex matrix (column-major).
pub type CMatrix = DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = DVector<C64>;

/// Absolute tolerance used for structural constraint checks.
pub const CONSTRAINT_TOL: f64 = 1e-10;
/// Relative tolerance used for reconstructions.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Relative gap below which two singular values are treated as one cluster.
pub const SINGULAR_TIE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch ({detail})")]
    Dimension { op: &'static str, detail: String },
    #[error("{op}: input is not complex symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { op: &'static str, asymmetry: f64 },
    #[error("{op}: degenerate input ({detail})")]
    Degenerate { op: &'static str, detail: &'static str },
    #[error("{op}: non-finite entry")]
    NonFinite { op: &'static str },
    #[error("{op}: decomposition did not converge")]
    NoConvergence { op: &'static str },
}

fn dim_err(op: &'static str, detail: impl Into<String>) -> LinalgError {
    LinalgError::Dimension {
        op,
        detail: detail.into(),
    }
}

fn ensure_finite(op: &'static str, a: &CMatrix) -> Result<(), LinalgError> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite { op })
    }
}

/// Frobenius norm.
pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `(A + Aᵀ) / 2`.
pub fn symmetrize(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    if !a.is_square() {
        return Err(dim_err("symmetrize", format!("{}x{} is not square", a.nrows(), a.ncols())));
    }
    let n = a.nrows();
    // Built entrywise from the same two summands so that the result is
    // symmetric bit for bit.
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let (lo, hi) = if i <= j { (a[(i, j)], a[(j, i)]) } else { (a[(j, i)], a[(i, j)]) };
        (lo + hi) * 0.5
    }))
}

/// Relative asymmetry `‖A − Aᵀ‖_F / ‖A‖_F` (zero for the zero matrix).
pub fn asymmetry(a: &CMatrix) -> f64 {
    let norm = frobenius(a);
    if norm == 0.0 {
        return 0.0;
    }
    frobenius(&(a - a.transpose())) / norm
}

// ---------------------------------------------------------------------------
// faer bridge

fn to_faer(a: &CMatrix) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, faer::c64>) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Full SVD `A = U diag(s) Vᴴ`, singular values in nonincreasing order.
pub fn svd(a: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix), LinalgError> {
    ensure_finite("svd", a)?;
    let dec = to_faer(a).svd().map_err(|_| LinalgError::NoConvergence { op: "svd" })?;
    let s = dec.S().column_vector();
    let values = (0..s.nrows()).map(|k| s[k].re).collect();
    Ok((from_faer(dec.U()), values, from_faer(dec.V())))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in nonincreasing order.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix), LinalgError> {
    if !a.is_square() {
        return Err(dim_err("hermitian_eigen", "matrix is not square"));
    }
    ensure_finite("hermitian_eigen", a)?;
    let dec = to_faer(a)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| LinalgError::NoConvergence { op: "hermitian_eigen" })?;
    let n = a.nrows();
    let s = dec.S().column_vector();
    let u = dec.U();
    // faer sorts ascending; flip.
    let values = (0..n).rev().map(|k| s[k].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    Ok((values, vectors))
}

fn real_symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>), LinalgError> {
    let dec = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| LinalgError::NoConvergence { op: "takagi" })?;
    let n = a.nrows();
    let s = dec.S().column_vector();
    let u = dec.U();
    let values = (0..n).rev().map(|k| s[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    Ok((values, vectors))
}

// ---------------------------------------------------------------------------
// Takagi factorization

/// `S = U diag(σ) Uᵀ` for a complex symmetric `S`.
#[derive(Debug, Clone)]
pub struct TakagiDecomposition {
    /// Unitary matrix whose columns are the Takagi vectors.
    pub takagi_vectors: CMatrix,
    /// Nonnegative Takagi values, nonincreasing.
    pub takagi_values: Vec<f64>,
}

impl TakagiDecomposition {
    /// `U diag(σ) Uᵀ`.
    pub fn reconstruct(&self) -> CMatrix {
        let u = &self.takagi_vectors;
        let mut scaled = u.clone();
        for (k, &s) in self.takagi_values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(s);
        }
        scaled * u.transpose()
    }
}

/// Takagi factorization via one SVD followed by per-column phase alignment.
///
/// With `S = A Σ Bᴴ` and `S = Sᵀ`, every column of `conj(B)` belonging to a
/// simple singular value is a unimodular multiple `z_k` of the matching column
/// of `A`; taking `u_k = a_k √z_k` gives the symmetric form. Columns whose
/// singular values coincide (relative gap below [`SINGULAR_TIE_TOL`]) are
/// aligned jointly: the cluster is compressed to `C = A_Iᴴ S conj(A_I)` and `C`
/// is factored through the real symmetric embedding
/// `[[Re C, Im C], [Im C, −Re C]]`, whose positive eigenvectors `[x; y]` give
/// Takagi vectors `x + iy`. Zero singular values keep the SVD columns.
pub fn takagi(s: &CMatrix) -> Result<TakagiDecomposition, LinalgError> {
    const OP: &str = "takagi";
    if !s.is_square() || s.nrows() == 0 {
        return Err(dim_err(OP, format!("{}x{} is not a nonempty square matrix", s.nrows(), s.ncols())));
    }
    ensure_finite(OP, s)?;
    let asym = asymmetry(s);
    if asym > CONSTRAINT_TOL {
        return Err(LinalgError::NotSymmetric { op: OP, asymmetry: asym });
    }
    let n = s.nrows();
    if frobenius(s) == 0.0 {
        return Ok(TakagiDecomposition {
            takagi_vectors: CMatrix::identity(n, n),
            takagi_values: vec![0.0; n],
        });
    }

    let (a, sigma, b) = svd(s)?;
    let sigma_max = sigma[0];
    let zero_floor = sigma_max * (n as f64) * f64::EPSILON;

    let mut u = a.clone();
    let mut values = sigma.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && sigma[end] > zero_floor
            && sigma[end - 1] - sigma[end] <= SINGULAR_TIE_TOL * sigma_max
        {
            end += 1;
        }
        if sigma[start] <= zero_floor {
            // Null space: any unitary basis works; keep the SVD columns.
            for v in &mut values[start..] {
                *v = 0.0;
            }
            break;
        }
        if end - start == 1 {
            let k = start;
            let z = a.column(k).transpose() * b.column(k);
            // z = a_kᵀ b_k = conj(a_kᴴ conj(b_k)); the alignment phase is its conjugate.
            let phase = z[(0, 0)].conj();
            let half = if phase.norm() > 0.0 {
                Complex::from_polar(1.0, phase.arg() / 2.0)
            } else {
                Complex::new(1.0, 0.0)
            };
            u.column_mut(k).scale_mut_complex(half);
        } else {
            align_cluster(s, &a, start, end, &mut u, &mut values)?;
        }
        start = end;
    }

    Ok(TakagiDecomposition {
        takagi_vectors: u,
        takagi_values: values,
    })
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, c: C64);
}

impl<S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>> ScaleComplex
    for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
{
    fn scale_mut_complex(&mut self, c: C64) {
        for z in self.iter_mut() {
            *z *= c;
        }
    }
}

fn align_cluster(
    s: &CMatrix,
    a: &CMatrix,
    start: usize,
    end: usize,
    u: &mut CMatrix,
    values: &mut [f64],
) -> Result<(), LinalgError> {
    let p = end - start;
    let a_i = a.columns(start, p).into_owned();
    let c = a_i.adjoint() * s * a_i.map(|z| z.conj());
    let c = symmetrize(&c)?;
    let emb = nalgebra::DMatrix::<f64>::from_fn(2 * p, 2 * p, |i, j| {
        let (bi, bj) = (i / p, j / p);
        let z = c[(i % p, j % p)];
        match (bi, bj) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => z.im,
        }
    });
    let (eigenvalues, eigenvectors) = real_symmetric_eigen(&emb)?;
    let v = CMatrix::from_fn(p, p, |i, j| Complex::new(eigenvectors[(i, j)], eigenvectors[(i + p, j)]));
    let aligned = &a_i * v;
    u.columns_mut(start, p).copy_from(&aligned);
    for j in 0..p {
        values[start + j] = eigenvalues[j].max(0.0);
    }
    Ok(())
}

/// Nearest symmetric unitary matrix, `Θ = U_Γ U_Γᵀ` from the Takagi factorization.
pub fn project_symmetric_unitary(s: &CMatrix) -> Result<CMatrix, LinalgError> {
    let t = takagi(s)?;
    let u = &t.takagi_vectors;
    let theta = u * u.transpose();
    // UUᵀ is symmetric in exact arithmetic; remove the rounding asymmetry.
    symmetrize(&theta)
}

// ---------------------------------------------------------------------------
// Vectorization operators

/// Column-stacking vectorization.
pub fn vec(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec`] for a target shape.
pub fn unvec(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix, LinalgError> {
    if v.len() != rows * cols {
        return Err(dim_err("unvec", format!("length {} cannot fill {rows}x{cols}", v.len())));
    }
    Ok(CMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Position of `(i, j)`, `i ≥ j`, inside `vech` of an `n×n` matrix (0-based).
pub fn vech_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i >= j && i < n);
    j * n + i - j * (j + 1) / 2
}

/// Half-vectorization: lower triangle (with diagonal), column by column.
pub fn vech(a: &CMatrix) -> Result<CVector, LinalgError> {
    if !a.is_square() {
        return Err(dim_err("vech", "matrix is not square"));
    }
    let n = a.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for i in j..n {
            out.push(a[(i, j)]);
        }
    }
    Ok(CVector::from_vec(out))
}

/// Diagonal as a vector.
pub fn vecd(a: &CMatrix) -> Result<CVector, LinalgError> {
    if !a.is_square() {
        return Err(dim_err("vecd", "matrix is not square"));
    }
    Ok(a.diagonal())
}

/// Duplication matrix `D` (`n² × n(n+1)/2`) with `vec(S) = D vech(S)` for symmetric `S`.
pub fn duplication_matrix(n: usize) -> Result<DMatrix<f64>, LinalgError> {
    if n == 0 {
        return Err(dim_err("duplication_matrix", "n must be at least 1"));
    }
    let mut d = DMatrix::<f64>::zeros(n * n, n * (n + 1) / 2);
    // Dᵀ = Σ_{i≥j} u_ij vec(T_ij)ᵀ
    for j in 0..n {
        for i in j..n {
            let col = vech_index(n, i, j);
            d[(j * n + i, col)] = 1.0;
            d[(i * n + j, col)] = 1.0;
        }
    }
    Ok(d)
}

/// Symmetric matrix from its half-vectorization (`unvec(D θ)`).
pub fn unvech(v: &CVector, n: usize) -> Result<CMatrix, LinalgError> {
    if v.len() != n * (n + 1) / 2 {
        return Err(dim_err("unvech", format!("length {} does not match n = {n}", v.len())));
    }
    let mut a = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let x = v[vech_index(n, i, j)];
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    Ok(a)
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Block-diagonal matrix from square blocks.
pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(n, m);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

// ---------------------------------------------------------------------------
// Dominant singular pair

/// Largest singular value and its right singular vector.
#[derive(Debug, Clone)]
pub struct SingularPair {
    pub value: f64,
    pub vector: CVector,
}

/// Rotate `v` so its first non-negligible entry is real and positive.
pub fn fix_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12 * max).copied() {
        let rot = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Dominant right singular vector of `A`, unit norm, first nonzero entry real positive.
///
/// Works on the smaller Gram matrix: `AᴴA` for tall inputs, `AAᴴ` for wide
/// ones (then `v = Aᴴu/σ`).
pub fn dominant_right_singular_vector(a: &CMatrix) -> Result<SingularPair, LinalgError> {
    const OP: &str = "dominant_right_singular_vector";
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(dim_err(OP, "empty matrix"));
    }
    ensure_finite(OP, a)?;
    if a.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(LinalgError::Degenerate { op: OP, detail: "all-zero matrix" });
    }
    let mut v = if a.nrows() < a.ncols() {
        let (_, u) = hermitian_eigen(&(a * a.adjoint()))?;
        a.adjoint() * u.column(0)
    } else {
        let (_, vecs) = hermitian_eigen(&(a.adjoint() * a))?;
        vecs.column(0).into_owned()
    };
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(LinalgError::Degenerate { op: OP, detail: "vanishing singular vector" });
    }
    v.unscale_mut(norm);
    fix_phase(&mut v);
    let value = (a * &v).norm();
    Ok(SingularPair { value, vector: v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn gaussian(rng: &mut ChaCha8Rng, r: usize, k: usize) -> CMatrix {
        CMatrix::from_fn(r, k, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
    }

    fn real(rows: &[&[f64]]) -> CMatrix {
        let n = rows.len();
        let m = rows[0].len();
        CMatrix::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
    }

    #[test]
    fn symmetrize_examples() {
        assert_eq!(symmetrize(&real(&[&[1.0, 2.0], &[4.0, 3.0]])).unwrap(), real(&[&[1.0, 3.0], &[3.0, 3.0]]));
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 2.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let expect = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert_eq!(symmetrize(&a).unwrap(), expect);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = symmetrize(&gaussian(&mut rng, 6, 6)).unwrap();
        assert_eq!(symmetrize(&s).unwrap(), s);
        assert_eq!(s, s.transpose());
        assert!(matches!(symmetrize(&CMatrix::zeros(2, 3)), Err(LinalgError::Dimension { .. })));
    }

    #[test]
    fn takagi_identity_and_swap() {
        let t = takagi(&CMatrix::identity(2, 2)).unwrap();
        assert_eq!(t.takagi_values, vec![1.0, 1.0]);
        assert!(frobenius(&(t.reconstruct() - CMatrix::identity(2, 2))) < 1e-12);

        let swap = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let t = takagi(&swap).unwrap();
        assert!((t.takagi_values[0] - 1.0).abs() < 1e-12 && (t.takagi_values[1] - 1.0).abs() < 1e-12);
        let u = &t.takagi_vectors;
        assert!(frobenius(&(u * u.transpose() - &swap)) < 1e-12);
    }

    #[test]
    fn takagi_rejects_asymmetric() {
        let a = real(&[&[1.0, 2.0], &[4.0, 3.0]]);
        assert!(matches!(takagi(&a), Err(LinalgError::NotSymmetric { .. })));
        assert!(matches!(takagi(&CMatrix::zeros(0, 0)), Err(LinalgError::Dimension { .. })));
    }

    #[test]
    fn takagi_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 9, 16] {
            let s = symmetrize(&gaussian(&mut rng, n, n)).unwrap();
            let t = takagi(&s).unwrap();
            let u = &t.takagi_vectors;
            assert!(frobenius(&(u.adjoint() * u - CMatrix::identity(n, n))) < 1e-10);
            assert!(frobenius(&(t.reconstruct() - &s)) / frobenius(&s) < 1e-9);
            assert!(t.takagi_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn takagi_repeated_values_fallback() {
        // Q diag(3,3,3,1) Qᵀ with a random unitary Q has a triple Takagi value.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (q, _, _) = svd(&gaussian(&mut rng, 4, 4)).unwrap();
        let mut scaled = q.clone();
        for (k, s) in [3.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
            scaled.column_mut(k).scale_mut(s);
        }
        let s = symmetrize(&(scaled * q.transpose())).unwrap();
        let t = takagi(&s).unwrap();
        let u = &t.takagi_vectors;
        assert!(frobenius(&(u.adjoint() * u - CMatrix::identity(4, 4))) < 1e-10);
        assert!(frobenius(&(t.reconstruct() - &s)) / frobenius(&s) < 1e-9);
    }

    #[test]
    fn takagi_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = gaussian(&mut rng, 6, 2);
        let s = symmetrize(&(&x * x.transpose())).unwrap();
        let t = takagi(&s).unwrap();
        let u = &t.takagi_vectors;
        assert!(frobenius(&(u.adjoint() * u - CMatrix::identity(6, 6))) < 1e-10);
        assert!(frobenius(&(t.reconstruct() - &s)) / frobenius(&s) < 1e-9);
        assert!(t.takagi_values[2..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn projection_fixed_point_and_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = project_symmetric_unitary(&symmetrize(&gaussian(&mut rng, 5, 5)).unwrap()).unwrap();
        let again = project_symmetric_unitary(&w).unwrap();
        assert!(frobenius(&(again - &w)) < 1e-9);

        let gamma = C64::from_polar(2.5, 0.7);
        let p = project_symmetric_unitary(&CMatrix::from_element(1, 1, gamma)).unwrap();
        assert!((p[(0, 0)] - C64::from_polar(1.0, 0.7)).norm() < 1e-14);
    }

    #[test]
    fn projection_matches_polar_factor() {
        // Independent route: the unitary polar factor U Vᴴ of a symmetric
        // matrix is the nearest unitary and is itself symmetric.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in [3, 8, 20] {
            let s = symmetrize(&gaussian(&mut rng, n, n)).unwrap();
            let (u, _, v) = svd(&s).unwrap();
            let polar = u * v.adjoint();
            let theta = project_symmetric_unitary(&s).unwrap();
            assert!(frobenius(&(theta - polar)) < 1e-9);
        }
    }

    #[test]
    fn duplication_small_cases() {
        assert_eq!(duplication_matrix(1).unwrap(), DMatrix::from_element(1, 1, 1.0));
        let d2 = duplication_matrix(2).unwrap();
        let expect = DMatrix::from_row_slice(4, 3, &[1., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 1.]);
        assert_eq!(d2, expect);
        assert!(duplication_matrix(0).is_err());
    }

    #[test]
    fn duplication_structure() {
        for n in 1..=7 {
            let d = duplication_matrix(n).unwrap();
            assert_eq!(d.iter().filter(|&&x| x == 1.0).count(), n * n);
            assert!(d.row_iter().all(|r| r.sum() == 1.0));
            let dtd = d.transpose() * &d;
            for i in 0..dtd.nrows() {
                for j in 0..dtd.ncols() {
                    let x = dtd[(i, j)];
                    if i == j {
                        assert!(x == 1.0 || x == 2.0);
                    } else {
                        assert_eq!(x, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn vectorization_examples() {
        let a = CMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        assert_eq!(unvec(&vec(&a), 2, 3).unwrap(), a);
        assert!(unvec(&vec(&a), 4, 2).is_err());
        let s = real(&[&[1.0, 2.0], &[2.0, 3.0]]);
        assert_eq!(vech(&s).unwrap().as_slice(), &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(vecd(&CMatrix::identity(3, 3)).unwrap(), CVector::from_element(3, c(1.0, 0.0)));
        assert!(vech(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn kron_examples() {
        let b = real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let k = kron(&CMatrix::identity(2, 2), &b);
        assert_eq!(k, block_diag(&[b.clone(), b.clone()]));
        let six = kron(&real(&[&[2.0]]), &real(&[&[3.0]]));
        assert_eq!(six[(0, 0)], c(6.0, 0.0));
    }

    #[test]
    fn kron_vec_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = gaussian(&mut rng, 3, 3);
            let t = gaussian(&mut rng, 3, 3);
            let cm = gaussian(&mut rng, 3, 3);
            let lhs = vec(&(&a * &t * &cm));
            let rhs = kron(&cm.transpose(), &a) * vec(&t);
            let diff = (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn dominant_vector_examples() {
        let a = real(&[&[3.0, 0.0], &[0.0, 1.0]]);
        let p = dominant_right_singular_vector(&a).unwrap();
        assert!((p.vector[0] - c(1.0, 0.0)).norm() < 1e-12 && p.vector[1].norm() < 1e-12);
        assert!((p.value - 3.0).abs() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let row = real(&[&[h, h]]);
        let p = dominant_right_singular_vector(&row).unwrap();
        assert!((p.vector[0] - c(h, 0.0)).norm() < 1e-12 && (p.vector[1] - c(h, 0.0)).norm() < 1e-12);

        assert!(matches!(
            dominant_right_singular_vector(&CMatrix::zeros(2, 2)),
            Err(LinalgError::Degenerate { .. })
        ));
    }

    #[test]
    fn dominant_vector_beats_random_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (r, k) in [(4, 9), (9, 4), (6, 6)] {
            let a = gaussian(&mut rng, r, k);
            let p = dominant_right_singular_vector(&a).unwrap();
            let (_, s, _) = svd(&a).unwrap();
            let rayleigh = (p.vector.adjoint() * a.adjoint() * &a * &p.vector)[(0, 0)].re.sqrt();
            assert!((rayleigh - s[0]).abs() / s[0] < 1e-10);
            let best = (&a * &p.vector).norm();
            for _ in 0..1000 {
                let mut u = gaussian(&mut rng, k, 1).column(0).into_owned();
                u.unscale_mut(u.norm());
                assert!(best >= (&a * u).norm());
            }
        }
    }
}

//! Adversarial reflection designs.
//!
//! The aligned attack maximises `Σ_i μ_i ‖ĝ_iᴴ Θ Ĝ‖²`. Writing the objective
//! over the unique coefficients `θ = vech(Θ)` turns it into `‖S̄θ‖²` with
//! `S̄ = [√μ_i (Ĝᵀ ⊗ ĝ_iᴴ)]_i · D_dup`, whose dominant right singular vector
//! is the relaxed optimum. `S̄` has only `U·M` rows but `D(D+1)/2` columns, so
//! the solver never forms it: the row Gram matrix `K = S̄ S̄ᴴ` has the closed form
//!
//! ```text
//! K[(i,m),(i',m')] = √(μ_i μ_i') · [ (aᵢ·āᵢ')(b_m·b̄_m') + P[i,m'] P̄[i',m]
//!                                    − Σ_p a_ip G_pm ā_i'p Ḡ_pm' ]
//! ```
//!
//! with `aᵢ = conj(ĝ_i)`, `b_m = Ĝ[:, m]` and `P = Aᵀ conj(Ĝ)`. From its top
//! eigenpair `(σ², u)` the relaxed matrix is `Φ = (Z + Zᵀ − Diag Z)/σ` where
//! `Z = Σ_i √μ_i ĝ_i (conj(Ĝ) u_i)ᵀ`. A group-connected surface adds the
//! per-group Gram matrices and slices `Z` per block. The literal matrices are
//! available through [`interference_matrix_fully`] and
//! [`interference_matrix_group`] for cross-checking.

use rand::Rng;

use crate::channel::complex_normal;
use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, dominant_right_singular_vector, duplication_matrix, frobenius, hermitian_eigen, kron,
    project_symmetric_unitary, symmetrize, vech, CMatrix, CVector, C64,
};

/// Circuit topology of the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    Single,
    Group,
    Fully,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::Single, Architecture::Group, Architecture::Fully];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Single => "single",
            Architecture::Group => "group",
            Architecture::Fully => "fully",
        }
    }

    /// Block sizes for `d` elements and groups of `group_size`.
    pub fn group_sizes(self, d: usize, group_size: usize) -> Result<Vec<usize>> {
        if d == 0 {
            return Err(Error::Dimension("surface has no elements".into()));
        }
        match self {
            Architecture::Single => Ok(vec![1; d]),
            Architecture::Fully => Ok(vec![d]),
            Architecture::Group => {
                if group_size == 0 || d % group_size != 0 {
                    return Err(Error::Dimension(format!(
                        "D divisible by D_g required (D = {d}, D_g = {group_size})"
                    )));
                }
                Ok(vec![group_size; d / group_size])
            }
        }
    }
}

impl std::str::FromStr for Architecture {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single" => Ok(Architecture::Single),
            "group" => Ok(Architecture::Group),
            "fully" => Ok(Architecture::Fully),
            _ => Err(format!("unknown architecture `{s}` (expected single, group or fully)")),
        }
    }
}

/// A reflection matrix together with the topology it must respect.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionConfig {
    pub architecture: Architecture,
    pub group_sizes: Vec<usize>,
    pub theta: CMatrix,
}

impl ReflectionConfig {
    pub fn dim(&self) -> usize {
        self.theta.nrows()
    }

    /// Checks the architecture constraints at tolerance `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let arch = self.architecture.name();
        let fail = |detail: String| Err(Error::Constraint { architecture: arch, detail });
        let d = self.group_sizes.iter().sum::<usize>();
        if !self.theta.is_square() || self.theta.nrows() != d {
            return fail(format!(
                "shape {}x{} does not match group sizes summing to {d}",
                self.theta.nrows(),
                self.theta.ncols()
            ));
        }
        if self.theta.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return fail("non-finite entry".into());
        }
        let expected = match self.architecture {
            Architecture::Single => vec![1; d],
            Architecture::Fully => vec![d],
            Architecture::Group => self.group_sizes.clone(),
        };
        if self.group_sizes != expected {
            return fail(format!("group sizes {:?} do not describe this topology", self.group_sizes));
        }
        let mut start = 0;
        for &size in &self.group_sizes {
            for j in 0..d {
                let inside = j >= start && j < start + size;
                if inside {
                    continue;
                }
                for i in start..start + size {
                    if self.theta[(i, j)].norm() > tol {
                        return fail(format!("entry ({i}, {j}) lies outside its block"));
                    }
                }
            }
            let block = self.theta.view((start, start), (size, size)).into_owned();
            if size == 1 {
                let gap = (block[(0, 0)].norm() - 1.0).abs();
                if gap > tol {
                    return fail(format!("|θ_{start}| deviates from 1 by {gap:.3e}"));
                }
            } else {
                let asym = frobenius(&(&block - block.transpose()));
                if asym > tol {
                    return fail(format!("block at {start} is not symmetric ({asym:.3e})"));
                }
                let unit = frobenius(&(&block * block.adjoint() - CMatrix::identity(size, size)));
                if unit > tol {
                    return fail(format!("block at {start} is not unitary ({unit:.3e})"));
                }
            }
            start += size;
        }
        Ok(())
    }
}

fn check_inputs(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64]) -> Result<()> {
    let d = bs_ris.nrows();
    if d == 0 || bs_ris.ncols() == 0 {
        return Err(Error::Dimension("empty BS-surface channel".into()));
    }
    if ris_user.is_empty() || ris_user.len() != weights.len() {
        return Err(Error::Dimension(format!(
            "{} user channels but {} weights",
            ris_user.len(),
            weights.len()
        )));
    }
    if let Some(g) = ris_user.iter().find(|g| g.len() != d) {
        return Err(Error::Dimension(format!("user channel of length {} for D = {d}", g.len())));
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::Dimension("weights must be finite and nonnegative".into()));
    }
    Ok(())
}

fn check_sizes(d: usize, sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes.contains(&0) || sizes.iter().sum::<usize>() != d {
        return Err(Error::Dimension(format!("group sizes {sizes:?} do not partition D = {d}")));
    }
    Ok(())
}

/// Weighted reflected power `Σ_i μ_i ‖ĝ_iᴴ Θ Ĝ‖²`.
pub fn interference_objective(theta: &CMatrix, bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64]) -> f64 {
    let theta_g = theta * bs_ris;
    ris_user
        .iter()
        .zip(weights)
        .map(|(g, &mu)| mu * (g.adjoint() * &theta_g).norm_squared())
        .sum()
}

// ---------------------------------------------------------------------------
// Random attack

fn random_symmetric_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CMatrix> {
    let raw = CMatrix::from_fn(n, n, |_, _| complex_normal(rng, 1.0));
    Ok(project_symmetric_unitary(&symmetrize(&raw)?)?)
}

/// Fresh random reflection obeying the topology.
pub fn random_reflection<R: Rng + ?Sized>(architecture: Architecture, group_sizes: &[usize], rng: &mut R) -> Result<ReflectionConfig> {
    let d: usize = group_sizes.iter().sum();
    check_sizes(d, group_sizes)?;
    let theta = match architecture {
        Architecture::Single => {
            CMatrix::from_diagonal(&CVector::from_iterator(
                d,
                (0..d).map(|_| C64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))),
            ))
        }
        Architecture::Fully => random_symmetric_unitary(d, rng)?,
        Architecture::Group => {
            let blocks = group_sizes
                .iter()
                .map(|&s| random_symmetric_unitary(s, rng))
                .collect::<Result<Vec<_>>>()?;
            block_diag(&blocks)
        }
    };
    Ok(ReflectionConfig {
        architecture,
        group_sizes: group_sizes.to_vec(),
        theta,
    })
}

// ---------------------------------------------------------------------------
// Aligned attack, structured route

/// Relaxed (pre-projection) solution of the aligned attack.
#[derive(Debug, Clone)]
pub struct Relaxation {
    /// `σ₁` of the weighted interference matrix.
    pub singular_value: f64,
    /// Unit-norm stacked coefficients `[vech(Φ_1); …; vech(Φ_G)]`.
    pub theta: CVector,
    /// Relaxed symmetric blocks `Φ_g`.
    pub blocks: Vec<CMatrix>,
}

/// Row Gram matrix `J Jᴴ` of the (group) interference matrix.
fn interference_gram(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64], group_sizes: &[usize]) -> CMatrix {
    let m = bs_ris.ncols();
    let u = ris_user.len();
    let n = u * m;
    let sqrt_mu: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut k = CMatrix::zeros(n, n);
    let mut start = 0;
    for &size in group_sizes {
        let g = bs_ris.rows(start, size);
        // A: D_g × U with columns conj(ĝ_ig)
        let a = CMatrix::from_fn(size, u, |p, i| ris_user[i][start + p].conj());
        let aa = a.transpose() * a.map(|z| z.conj());
        let gg = g.transpose() * g.map(|z| z.conj());
        let pm = a.transpose() * g.map(|z| z.conj());
        // X[p, (i,m)] = a_ip G_pm
        let x = CMatrix::from_fn(size, n, |p, col| a[(p, col / m)] * g[(p, col % m)]);
        let xx = x.transpose() * x.map(|z| z.conj());
        for c2 in 0..n {
            let (i2, m2) = (c2 / m, c2 % m);
            for c1 in 0..n {
                let (i1, m1) = (c1 / m, c1 % m);
                let v = aa[(i1, i2)] * gg[(m1, m2)] + pm[(i1, m2)] * pm[(i2, m1)].conj() - xx[(c1, c2)];
                k[(c1, c2)] += v * (sqrt_mu[i1] * sqrt_mu[i2]);
            }
        }
        start += size;
    }
    // Exact Hermitian symmetry for the eigensolver.
    for c2 in 0..n {
        k[(c2, c2)].im = 0.0;
        for c1 in 0..c2 {
            let avg = (k[(c1, c2)] + k[(c2, c1)].conj()) * 0.5;
            k[(c1, c2)] = avg;
            k[(c2, c1)] = avg.conj();
        }
    }
    k
}

/// Relaxed aligned solution for contiguous groups `group_sizes`.
pub fn aligned_relaxation(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64], group_sizes: &[usize]) -> Result<Relaxation> {
    check_inputs(bs_ris, ris_user, weights)?;
    check_sizes(bs_ris.nrows(), group_sizes)?;
    let m = bs_ris.ncols();
    let k = interference_gram(bs_ris, ris_user, weights, group_sizes);
    let (values, vectors) = hermitian_eigen(&k)?;
    let lambda = values[0];
    let scale = k.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(lambda > 0.0) || scale == 0.0 || lambda <= 1e-14 * scale {
        return Err(Error::Degenerate("aligned attack: interference matrix is zero".into()));
    }
    let sigma = lambda.sqrt();
    let top = vectors.column(0);
    let conj_g = bs_ris.map(|z| z.conj());
    // Z = Σ_i √μ_i ĝ_i (conj(Ĝ) u_i)ᵀ
    let mut z = CMatrix::zeros(bs_ris.nrows(), bs_ris.nrows());
    for (i, (g, &mu)) in ris_user.iter().zip(weights).enumerate() {
        let y = &conj_g * top.rows(i * m, m);
        z.ger(C64::from(mu.sqrt()), g, &y, C64::from(1.0));
    }
    let mut blocks = Vec::with_capacity(group_sizes.len());
    let mut start = 0;
    for &size in group_sizes {
        let zg = z.view((start, start), (size, size));
        let phi = CMatrix::from_fn(size, size, |p, q| {
            let v = if p == q { zg[(p, p)] } else { zg[(p, q)] + zg[(q, p)] };
            v / sigma
        });
        blocks.push(phi);
        start += size;
    }
    let mut theta = CVector::from_iterator(
        blocks.iter().map(|b| b.nrows() * (b.nrows() + 1) / 2).sum(),
        blocks.iter().flat_map(|b| vech(b).expect("square block").iter().copied().collect::<Vec<_>>()),
    );
    let norm = theta.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate("aligned attack: vanishing relaxed solution".into()));
    }
    // Unit norm and first nonzero coefficient real-positive.
    let peak = theta.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let first = theta.iter().find(|c| c.norm() > 1e-12 * peak).copied().unwrap_or(C64::from(1.0));
    let rot = first.conj() / (first.norm() * norm);
    theta *= rot;
    for b in &mut blocks {
        *b *= rot;
    }
    Ok(Relaxation {
        singular_value: sigma,
        theta,
        blocks,
    })
}

fn aligned_blocks(
    architecture: Architecture,
    bs_ris: &CMatrix,
    ris_user: &[CVector],
    weights: &[f64],
    group_sizes: &[usize],
) -> Result<ReflectionConfig> {
    let relaxed = aligned_relaxation(bs_ris, ris_user, weights, group_sizes)?;
    let projected = relaxed
        .blocks
        .iter()
        .map(project_symmetric_unitary)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(ReflectionConfig {
        architecture,
        group_sizes: group_sizes.to_vec(),
        theta: block_diag(&projected),
    })
}

/// Aligned interference attack for a fully connected surface.
pub fn aligned_fully_connected(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64]) -> Result<ReflectionConfig> {
    let d = bs_ris.nrows();
    aligned_blocks(Architecture::Fully, bs_ris, ris_user, weights, &[d])
}

/// Aligned interference attack for a group-connected surface.
pub fn aligned_group_connected(
    bs_ris: &CMatrix,
    ris_user: &[CVector],
    group_sizes: &[usize],
    weights: &[f64],
) -> Result<ReflectionConfig> {
    aligned_blocks(Architecture::Group, bs_ris, ris_user, weights, group_sizes)
}

/// Stacked single-connected interference matrix `[√μ_i Ĝᵀ diag(conj ĝ_i)]_i`.
fn single_interference(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64]) -> CMatrix {
    let (d, m) = (bs_ris.nrows(), bs_ris.ncols());
    CMatrix::from_fn(ris_user.len() * m, d, |r, p| {
        let (i, mm) = (r / m, r % m);
        ris_user[i][p].conj() * bs_ris[(p, mm)] * weights[i].sqrt()
    })
}

/// `Q = Σ_i μ_i A_iᴴ A_i` with `A_i = Ĝᵀ diag(conj ĝ_i)`.
pub fn single_connected_gram(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64]) -> Result<CMatrix> {
    check_inputs(bs_ris, ris_user, weights)?;
    let a = single_interference(bs_ris, ris_user, weights);
    Ok(a.adjoint() * a)
}

/// Aligned attack for a single-connected surface: dominant eigenvector of
/// `Q` followed by per-element phase projection.
pub fn aligned_single_connected(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64]) -> Result<ReflectionConfig> {
    check_inputs(bs_ris, ris_user, weights)?;
    let d = bs_ris.nrows();
    let a = single_interference(bs_ris, ris_user, weights);
    let pair = dominant_right_singular_vector(&a)?;
    let diag = pair.vector.map(|c| if c.norm() > 0.0 { c / c.norm() } else { C64::from(1.0) });
    Ok(ReflectionConfig {
        architecture: Architecture::Single,
        group_sizes: vec![1; d],
        theta: CMatrix::from_diagonal(&diag),
    })
}

/// Aligned attack for any topology.
pub fn aligned_reflection(
    architecture: Architecture,
    group_sizes: &[usize],
    bs_ris: &CMatrix,
    ris_user: &[CVector],
    weights: &[f64],
) -> Result<ReflectionConfig> {
    match architecture {
        Architecture::Single => aligned_single_connected(bs_ris, ris_user, weights),
        Architecture::Group => aligned_group_connected(bs_ris, ris_user, group_sizes, weights),
        Architecture::Fully => aligned_fully_connected(bs_ris, ris_user, weights),
    }
}

// ---------------------------------------------------------------------------
// Literal constructions

/// `S̄ = [√μ_1 S_1; …; √μ_U S_U] · D_dup` with `S_i = Ĝᵀ ⊗ ĝ_iᴴ`.
pub fn interference_matrix_fully(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64]) -> Result<CMatrix> {
    let d = bs_ris.nrows();
    interference_matrix_group(bs_ris, ris_user, weights, &[d])
}

/// `J = [√μ_i [S_i1 D_1, …, S_iG D_G]]_i` with `S_ig = G_gᵀ ⊗ ĝ_igᴴ`.
pub fn interference_matrix_group(bs_ris: &CMatrix, ris_user: &[CVector], weights: &[f64], group_sizes: &[usize]) -> Result<CMatrix> {
    check_inputs(bs_ris, ris_user, weights)?;
    check_sizes(bs_ris.nrows(), group_sizes)?;
    let m = bs_ris.ncols();
    let cols: usize = group_sizes.iter().map(|s| s * (s + 1) / 2).sum();
    let mut j = CMatrix::zeros(ris_user.len() * m, cols);
    let mut row_start = 0;
    for (g, &mu) in ris_user.iter().zip(weights) {
        let mut start = 0;
        let mut col = 0;
        for &size in group_sizes {
            let gg = bs_ris.rows(start, size).into_owned();
            let gi = CMatrix::from_column_slice(size, 1, g.rows(start, size).as_slice());
            let s = kron(&gg.transpose(), &gi.adjoint());
            let dup = duplication_matrix(size)?.map(C64::from);
            let block = s * dup * C64::from(mu.sqrt());
            j.view_mut((row_start, col), (m, block.ncols())).copy_from(&block);
            start += size;
            col += block.ncols();
        }
        row_start += m;
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{unvech, CONSTRAINT_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(rng: &mut ChaCha8Rng, m: usize, d: usize, u: usize) -> (CMatrix, Vec<CVector>, Vec<f64>) {
        let g = CMatrix::from_fn(d, m, |_, _| complex_normal(rng, 1.0));
        let gs = (0..u).map(|_| CVector::from_fn(d, |_, _| complex_normal(rng, 1.0))).collect();
        (g, gs, vec![1.0 / u as f64; u])
    }

    #[test]
    fn architecture_parsing_and_sizes() {
        for a in Architecture::ALL {
            assert_eq!(a.name().parse::<Architecture>().unwrap(), a);
        }
        assert!("diagonal".parse::<Architecture>().is_err());
        assert_eq!(Architecture::Group.group_sizes(4, 2).unwrap(), vec![2, 2]);
        assert_eq!(Architecture::Fully.group_sizes(4, 3).unwrap(), vec![4]);
        assert_eq!(Architecture::Single.group_sizes(3, 5).unwrap(), vec![1, 1, 1]);
        assert!(Architecture::Group.group_sizes(200, 3).is_err());
    }

    #[test]
    fn random_reflections_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let full = random_reflection(Architecture::Fully, &[16], &mut rng).unwrap();
        full.validate(CONSTRAINT_TOL).unwrap();
        let group = random_reflection(Architecture::Group, &[2, 2], &mut rng).unwrap();
        group.validate(CONSTRAINT_TOL).unwrap();
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 0), (3, 1)] {
            assert_eq!(group.theta[(i, j)], C64::from(0.0));
        }
        let single = random_reflection(Architecture::Single, &[1; 7], &mut rng).unwrap();
        single.validate(CONSTRAINT_TOL).unwrap();
    }

    #[test]
    fn random_scalar_keeps_draw_phase() {
        let mut a = ChaCha8Rng::seed_from_u64(2);
        let mut b = a.clone();
        let theta = random_reflection(Architecture::Fully, &[1], &mut a).unwrap().theta[(0, 0)];
        let draw = complex_normal(&mut b, 1.0);
        assert!((theta - C64::from_polar(1.0, draw.arg())).norm() < 1e-14);
    }

    #[test]
    fn validator_rejects_violations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cfg = random_reflection(Architecture::Fully, &[4], &mut rng).unwrap();
        cfg.theta[(0, 1)] += C64::from(1e-6);
        assert!(cfg.validate(CONSTRAINT_TOL).is_err());
        let mut cfg = random_reflection(Architecture::Group, &[2, 2], &mut rng).unwrap();
        cfg.theta[(0, 3)] = C64::from(1e-3);
        assert!(cfg.validate(CONSTRAINT_TOL).is_err());
        let mut cfg = random_reflection(Architecture::Single, &[1; 3], &mut rng).unwrap();
        cfg.theta[(1, 1)] *= 1.01;
        assert!(cfg.validate(CONSTRAINT_TOL).is_err());
    }

    #[test]
    fn explicit_matrix_reproduces_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (g, gs, mu) = instance(&mut rng, 3, 5, 2);
        let sbar = interference_matrix_fully(&g, &gs, &mu).unwrap();
        let s = symmetrize(&CMatrix::from_fn(5, 5, |_, _| complex_normal(&mut rng, 1.0))).unwrap();
        let lhs = (&sbar * vech(&s).unwrap()).norm_squared();
        let rhs = interference_objective(&s, &g, &gs, &mu);
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }

    #[test]
    fn structured_gram_matches_literal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for sizes in [vec![6], vec![2, 2, 2], vec![3, 1, 2], vec![1; 6]] {
            let (g, gs, mu) = instance(&mut rng, 4, 6, 3);
            let j = interference_matrix_group(&g, &gs, &mu, &sizes).unwrap();
            let k = interference_gram(&g, &gs, &mu, &sizes);
            assert!(frobenius(&(&j * j.adjoint() - &k)) < 1e-10 * frobenius(&k));
            let relaxed = aligned_relaxation(&g, &gs, &mu, &sizes).unwrap();
            let direct = dominant_right_singular_vector(&j).unwrap();
            assert!((relaxed.singular_value - direct.value).abs() < 1e-10 * direct.value);
            assert!((&relaxed.theta - &direct.vector).norm() < 1e-8);
        }
    }

    #[test]
    fn relaxed_blocks_unvech_theta() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (g, gs, mu) = instance(&mut rng, 3, 4, 2);
        let r = aligned_relaxation(&g, &gs, &mu, &[4]).unwrap();
        assert_eq!(unvech(&r.theta, 4).unwrap(), r.blocks[0]);
        assert!((r.theta.norm() - 1.0).abs() < 1e-12);
        assert!(r.theta[0].im.abs() < 1e-15 && r.theta[0].re > 0.0);
    }

    #[test]
    fn scalar_aligned_case() {
        let g = CMatrix::from_element(1, 1, C64::from_polar(0.8, 1.1));
        let gs = vec![CVector::from_element(1, C64::from_polar(1.3, -0.4))];
        for cfg in [
            aligned_fully_connected(&g, &gs, &[1.0]).unwrap(),
            aligned_single_connected(&g, &gs, &[1.0]).unwrap(),
            aligned_group_connected(&g, &gs, &[1], &[1.0]).unwrap(),
        ] {
            let t = cfg.theta[(0, 0)];
            assert!((t.norm() - 1.0).abs() < 1e-14);
            // ĝᴴ Θ G is real positive up to the irrelevant global phase, so
            // its magnitude equals the product of magnitudes.
            let obj = interference_objective(&cfg.theta, &g, &gs, &[1.0]);
            assert!((obj - (0.8f64 * 1.3).powi(2)).abs() < 1e-12);
        }
        let a = aligned_fully_connected(&g, &gs, &[1.0]).unwrap().theta[(0, 0)];
        let b = aligned_single_connected(&g, &gs, &[1.0]).unwrap().theta[(0, 0)];
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn group_degenerations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (g, gs, mu) = instance(&mut rng, 4, 6, 3);
        let full = aligned_fully_connected(&g, &gs, &mu).unwrap();
        let as_group = aligned_group_connected(&g, &gs, &[6], &mu).unwrap();
        assert!(frobenius(&(&full.theta - &as_group.theta)) < 1e-12);
        let ones = aligned_group_connected(&g, &gs, &[1; 6], &mu).unwrap();
        let single = aligned_single_connected(&g, &gs, &mu).unwrap();
        assert!(frobenius(&(&ones.theta - &single.theta)) < 1e-8);
        for p in 0..6 {
            assert!((ones.theta[(p, p)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_gram_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (g, gs, mu) = instance(&mut rng, 8, 16, 3);
        let q = single_connected_gram(&g, &gs, &mu).unwrap();
        assert!(frobenius(&(&q - q.adjoint())) < 1e-12 * frobenius(&q));
        let (values, _) = hermitian_eigen(&q).unwrap();
        assert!(values.iter().all(|&v| v >= -1e-10));
    }

    #[test]
    fn zero_channels_are_degenerate() {
        let g = CMatrix::zeros(4, 2);
        let gs = vec![CVector::zeros(4)];
        assert!(matches!(aligned_fully_connected(&g, &gs, &[1.0]), Err(Error::Degenerate(_))));
        assert!(aligned_single_connected(&g, &gs, &[1.0]).is_err());
    }
}

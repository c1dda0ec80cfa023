//! Elementary symmetric functions of principal curvatures, normalized mean
//! curvatures `H_k`, Newton tensors and Gårding cone membership.
//!
//! All matrices are mixed tensors `h_i^j` written in an orthonormal frame,
//! so the metric is the identity.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Umbilicity threshold used by [`maclaurin_gap`].
pub const UMBILIC_TOL: f64 = 1e-12;

/// A tuple of `m = n - 1` principal curvatures.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvTuple(Vec<f64>);

impl CurvTuple {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty curvature tuple".into()));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("principal curvature".into()));
        }
        Ok(CurvTuple(entries))
    }

    /// `(κ₁, κ₂, …, κ₂)` with `κ₂` repeated `m - 1` times.
    pub fn axisym(k1: f64, k2: f64, m: usize) -> Result<Self> {
        let mut v = vec![k2; m];
        v[0] = k1;
        CurvTuple::new(v)
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }
}

/// `σ_0, …, σ_m` of `kappa` by the product recurrence `∏(1 + κᵢ t)`.
pub fn all_sigmas(kappa: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; kappa.len() + 1];
    e[0] = 1.0;
    for (i, &x) in kappa.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `σ_k` for a nonnegative `k`; zero when `k > m`.
pub fn sigma_slice(k: usize, kappa: &[f64]) -> f64 {
    if k > kappa.len() {
        return 0.0;
    }
    all_sigmas(kappa)[k]
}

/// `σ_k(κ)`; rejects negative `k`.
pub fn sigma(k: i32, kappa: &CurvTuple) -> Result<f64> {
    if k < 0 {
        return Err(Error::InvalidArgument(format!("sigma_k with negative k = {k}")));
    }
    Ok(sigma_slice(k as usize, &kappa.0))
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `binom(top, k)` extended to `k = -1` by `1/(top + 1)`, the value that
/// makes `binom(n-1, -1) ω_{n-1} r^n` the volume of the ball of radius `r`.
pub fn binomial_ext(top: usize, k: i32) -> f64 {
    if k == -1 {
        1.0 / (top as f64 + 1.0)
    } else if k < -1 {
        0.0
    } else {
        binomial(top, k as usize)
    }
}

/// `H_k = σ_k / binom(m, k)` for `0 ≤ k ≤ m`.
///
/// `k = -1` is rejected: `H_{-1}` is the support function, which is not a
/// function of the curvatures.
pub fn h_norm(k: i32, kappa: &CurvTuple) -> Result<f64> {
    let m = kappa.m();
    if k == -1 {
        return Err(Error::InvalidArgument(
            "H_{-1} is the support function and cannot be computed from curvatures".into(),
        ));
    }
    if k < 0 || k as usize > m {
        return Err(Error::InvalidArgument(format!("H_k needs 0 <= k <= {m}, got {k}")));
    }
    Ok(h_norm_slice(k as usize, &kappa.0))
}

pub(crate) fn h_norm_slice(k: usize, kappa: &[f64]) -> f64 {
    sigma_slice(k, kappa) / binomial(kappa.len(), k)
}

/// True iff `σ_j(κ) > 0` for `j = 1..=k`.
pub fn cone_check(k: usize, kappa: &CurvTuple) -> bool {
    in_cone(k, &kappa.0)
}

pub(crate) fn in_cone(k: usize, kappa: &[f64]) -> bool {
    let s = all_sigmas(kappa);
    (1..=k.min(kappa.len())).all(|j| s[j] > 0.0)
}

/// Smallest of `σ_1, …, σ_k`; positive iff `κ ∈ Γ_k⁺`.
pub fn cone_margin(k: usize, kappa: &[f64]) -> f64 {
    let s = all_sigmas(kappa);
    (1..=k.min(kappa.len())).map(|j| s[j]).fold(f64::INFINITY, f64::min)
}

/// Whether all entries agree to [`UMBILIC_TOL`] relative to their size.
pub fn is_umbilic(kappa: &[f64]) -> bool {
    let scale = kappa.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let (lo, hi) = kappa
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo <= UMBILIC_TOL * scale
}

/// Newton–MacLaurin gap `H_k H_ℓ - H_{k+1} H_{ℓ-1} ≥ 0` for `1 ≤ ℓ ≤ k ≤ m`
/// and `κ ∈ Γ_k⁺`.
pub fn maclaurin_gap(k: usize, l: usize, kappa: &CurvTuple) -> Result<f64> {
    let m = kappa.m();
    if !(1 <= l && l <= k && k <= m) {
        return Err(Error::InvalidArgument(format!(
            "maclaurin_gap needs 1 <= l <= k <= {m}, got k={k}, l={l}"
        )));
    }
    if !cone_check(k, kappa) {
        return Err(Error::Convexity(format!("curvatures not in the Garding cone G_{k}+")));
    }
    let s = all_sigmas(&kappa.0);
    let h = |j: usize| if j > m { 0.0 } else { s[j] / binomial(m, j) };
    if is_umbilic(&kappa.0) {
        return Ok(0.0);
    }
    Ok(h(k) * h(l) - h(k + 1) * h(l - 1))
}

/// The Weingarten map `h_i^j` as a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Weingarten {
    matrix: DMatrix<f64>,
    symmetric: bool,
}

impl Weingarten {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("Weingarten map must be square".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Weingarten entry".into()));
        }
        let scale = matrix.amax().max(1.0);
        let symmetric = (&matrix - matrix.transpose()).amax() <= 1e-14 * scale;
        Ok(Weingarten { matrix, symmetric })
    }

    pub fn diagonal(kappa: &[f64]) -> Result<Self> {
        Weingarten::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(kappa)))
    }

    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Real eigenvalues; only available for symmetric maps.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.symmetric {
            return Err(Error::InvalidArgument("eigenvalues of a non-symmetric map".into()));
        }
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// `σ_k` of the map: from eigenvalues when symmetric, otherwise as the
    /// sum of principal `k × k` minors.
    pub fn sigma(&self, k: usize) -> f64 {
        let m = self.m();
        if k == 0 {
            return 1.0;
        }
        if k > m {
            return 0.0;
        }
        if self.symmetric {
            return sigma_slice(k, &self.eigenvalues().expect("symmetric"));
        }
        let mut total = 0.0;
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let minor = DMatrix::from_fn(k, k, |i, j| self.matrix[(idx[i], idx[j])]);
            total += minor.determinant();
            // next combination
            let mut i = k;
            while i > 0 && idx[i - 1] == m - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
        total
    }
}

/// Newton tensor `T_k` from `T_0 = I`, `T_k = σ_k I - T_{k-1} h`.
pub fn newton_tensor(k: usize, w: &Weingarten) -> Result<Weingarten> {
    let m = w.m();
    if k >= m {
        return Err(Error::InvalidArgument(format!("newton_tensor needs 0 <= k <= {}, got {k}", m - 1)));
    }
    let h = w.matrix();
    let id = DMatrix::<f64>::identity(m, m);
    let mut t = id.clone();
    for j in 1..=k {
        t = &id * w.sigma(j) - &t * h;
    }
    Weingarten::new(t)
}

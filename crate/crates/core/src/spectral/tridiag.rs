//! Symmetric tridiagonal eigenproblems, optionally periodic (one corner
//! coupling), by Sturm-count bisection and inverse iteration.

/// `T = tridiag(off, diag, off)` plus `corner` at `(0, n-1)` and `(n-1, 0)`.
#[derive(Debug, Clone)]
pub(crate) struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[j]` couples `j` and `j + 1`
    pub off: Vec<f64>,
    pub corner: f64,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>, corner: f64) -> Self {
        debug_assert_eq!(off.len() + 1, diag.len());
        SymTridiag { diag, off, corner }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    fn periodic(&self) -> bool {
        self.corner != 0.0 && self.len() > 2
    }

    /// Gershgorin bounds.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..n {
            let mut r = 0.0;
            if j > 0 {
                r += self.off[j - 1].abs();
            }
            if j + 1 < n {
                r += self.off[j].abs();
            }
            if self.periodic() && (j == 0 || j == n - 1) {
                r += self.corner.abs();
            }
            lo = lo.min(self.diag[j] - r);
            hi = hi.max(self.diag[j] + r);
        }
        (lo, hi)
    }

    fn norm(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.abs().max(hi.abs())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y: Vec<f64> = (0..n).map(|j| self.diag[j] * x[j]).collect();
        for j in 0..n - 1 {
            y[j] += self.off[j] * x[j + 1];
            y[j + 1] += self.off[j] * x[j];
        }
        if self.periodic() {
            y[0] += self.corner * x[n - 1];
            y[n - 1] += self.corner * x[0];
        }
        y
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let tiny = f64::EPSILON * self.norm().max(f64::MIN_POSITIVE);
        let guard = |d: f64| if d.abs() < tiny { -tiny } else { d };
        let inner = if self.periodic() { n - 1 } else { n };
        let mut count = 0;
        let mut d = guard(self.diag[0] - sigma);
        if d < 0.0 {
            count += 1;
        }
        // z = L⁻¹ b for the border column b = (corner, 0, …, 0, off[n-2])
        let mut z = self.corner;
        let mut schur = 0.0;
        if self.periodic() {
            schur += z * z / d;
        }
        for j in 1..inner {
            let l = self.off[j - 1] / d;
            d = guard(self.diag[j] - sigma - l * self.off[j - 1]);
            if d < 0.0 {
                count += 1;
            }
            if self.periodic() {
                z = if j == inner - 1 { self.off[n - 2] - l * z } else { -l * z };
                schur += z * z / d;
            }
        }
        if self.periodic() {
            let s = self.diag[n - 1] - sigma - schur;
            if s < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `i`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, i: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        let floor = f64::EPSILON * self.norm();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 2.0 * f64::EPSILON * mid.abs() + floor {
                break;
            }
            if self.count_below(mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T - mu I) x = r` by banded LU with partial pivoting. A
    /// periodic matrix is first reordered as `0, n-1, 1, n-2, …`, which
    /// makes it pentadiagonal.
    pub fn solve_shifted(&self, mu: f64, r: &[f64]) -> Vec<f64> {
        let n = self.len();
        let order: Vec<usize> = if self.periodic() {
            (0..n).map(|p| if p % 2 == 0 { p / 2 } else { n - 1 - p / 2 }).collect()
        } else {
            (0..n).collect()
        };
        let mut pos = vec![0; n];
        for (p, &node) in order.iter().enumerate() {
            pos[node] = p;
        }
        let band = if self.periodic() { 2 } else { 1 };
        let entry = |i: usize, j: usize| -> f64 {
            let (a, b) = (order[i], order[j]);
            if a == b {
                self.diag[a] - mu
            } else if a.abs_diff(b) == 1 {
                self.off[a.min(b)]
            } else if self.periodic() && a.min(b) == 0 && a.max(b) == n - 1 {
                self.corner
            } else {
                0.0
            }
        };
        let rhs: Vec<f64> = order.iter().map(|&node| r[node]).collect();
        let tiny = f64::EPSILON * self.norm().max(f64::MIN_POSITIVE);
        let y = banded_solve(n, band, band, entry, rhs, tiny);
        (0..n).map(|node| y[pos[node]]).collect()
    }

    /// Inverse iteration at `lambda`, orthogonal to `previous`.
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let shift = lambda - 1e3 * f64::EPSILON * self.norm().max(lambda.abs());
        // deterministic start with every Fourier component present
        let mut x: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 + 0.5;
                1.0 + (0.7548776662 * t).fract() - 0.5 + 0.3 * (1.3247 * t).sin()
            })
            .collect();
        for _ in 0..4 {
            orthogonalize(&mut x, previous);
            normalize(&mut x);
            x = self.solve_shifted(shift, &x);
        }
        orthogonalize(&mut x, previous);
        normalize(&mut x);
        x
    }
}

impl SymTridiag {
    /// Smallest `count` eigenpairs `(λ, x, ‖Tx - λx‖)`, `λ` refined by the
    /// Rayleigh quotient of the inverse-iteration vector.
    pub fn lowest(&self, count: usize) -> Vec<(f64, Vec<f64>, f64)> {
        let count = count.min(self.len());
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let x = self.eigenvector(self.eigenvalue(i), &vectors);
            let tx = self.apply(&x);
            let lambda: f64 = x.iter().zip(&tx).map(|(a, b)| a * b).sum();
            let residual = tx.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            vectors.push(x.clone());
            out.push((lambda, x, residual));
        }
        out
    }
}

/// Gaussian elimination with partial pivoting on a matrix with `kl` sub-
/// and `ku` superdiagonals; pivots below `tiny` are replaced by `tiny`.
fn banded_solve(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> f64, mut rhs: Vec<f64>, tiny: f64) -> Vec<f64> {
    let w = 2 * kl + ku + 1;
    let idx = |i: usize, j: usize| i * w + (j + kl - i);
    let mut a = vec![0.0; n * w];
    for i in 0..n {
        for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
            a[idx(i, j)] = entry(i, j);
        }
    }
    for k in 0..n {
        let last = (k + kl).min(n - 1);
        let right = (k + kl + ku).min(n - 1);
        let p = (k..=last).max_by(|&x, &y| a[idx(x, k)].abs().total_cmp(&a[idx(y, k)].abs())).unwrap_or(k);
        if p != k {
            for j in k..=right {
                a.swap(idx(k, j), idx(p, j));
            }
            rhs.swap(k, p);
        }
        if a[idx(k, k)].abs() < tiny {
            a[idx(k, k)] = tiny.copysign(a[idx(k, k)]);
        }
        let pivot = a[idx(k, k)];
        for i in k + 1..=last {
            let f = a[idx(i, k)] / pivot;
            if f != 0.0 {
                for j in k..=right {
                    a[idx(i, j)] -= f * a[idx(k, j)];
                }
                rhs[i] -= f * rhs[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let right = (k + kl + ku).min(n - 1);
        let s: f64 = (k + 1..=right).map(|j| a[idx(k, j)] * x[j]).sum();
        x[k] = (rhs[k] - s) / a[idx(k, k)];
    }
    x
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c: f64 = x.iter().zip(b).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
        }
    }
}

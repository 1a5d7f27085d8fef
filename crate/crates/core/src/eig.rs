//! Dense real-symmetric eigensolver for excitation blocks.
//!
//! Full decompositions use Householder reduction to tridiagonal form followed
//! by the implicit-shift QL iteration. Matrices that are already tridiagonal
//! (every single-mode block) skip the reduction, and their lowest eigenvalue
//! alone can be had by Sturm-sequence bisection.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const MAX_QL_ITERATIONS: usize = 100;

/// Square dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Contract(format!(
                "matrix is not square: row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        Ok(Matrix { n, data: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, v: f64) {
        self[(i, j)] = v;
        self[(j, i)] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_tridiagonal(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| i.abs_diff(j) <= 1 || self[(i, j)] == 0.0)
        })
    }

    fn check_symmetric(&self) -> Result<()> {
        let tol = SYMMETRY_TOL * self.max_abs().max(1.0);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = (self[(i, j)] - self[(j, i)]).abs();
                if d > tol || d.is_nan() {
                    return Err(Error::Contract(format!(
                        "matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {d:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.vectors.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        Matrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)])
                .sum()
        })
    }
}

/// Full spectrum of a real symmetric matrix, ascending. Each eigenvector is
/// signed so that its largest-magnitude component is positive.
pub fn eigh_symmetric(a: &Matrix) -> Result<EigenDecomposition> {
    a.check_symmetric()?;
    let n = a.dim();
    if n == 0 {
        return Ok(EigenDecomposition { values: vec![], vectors: Matrix::zeros(0) });
    }
    let (mut d, mut e, mut v) = if a.is_tridiagonal() {
        let d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        let mut e = vec![0.0; n];
        for i in 1..n {
            e[i] = a[(i, i - 1)];
        }
        (d, e, Matrix::identity(n))
    } else {
        householder_tridiagonalize(a)
    };
    implicit_ql(&mut d, &mut e, &mut v)?;
    Ok(sorted_decomposition(d, v))
}

/// Lowest eigenvalue and its (sign-normalized) eigenvector.
pub fn lowest_eigenpair(a: &Matrix) -> Result<(f64, Vec<f64>)> {
    if a.dim() == 1 {
        a.check_symmetric()?;
        return Ok((a[(0, 0)], vec![1.0]));
    }
    let dec = eigh_symmetric(a)?;
    let v = dec.vector(0);
    Ok((dec.values[0], v))
}

/// Lowest eigenvalue only. Tridiagonal inputs take the bisection path.
pub fn lowest_eigenvalue(a: &Matrix) -> Result<f64> {
    a.check_symmetric()?;
    let n = a.dim();
    if n == 0 {
        return Err(Error::Contract("empty matrix has no eigenvalues".into()));
    }
    if a.is_tridiagonal() {
        let d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        let off: Vec<f64> = (1..n).map(|i| a[(i, i - 1)]).collect();
        return Ok(tridiagonal_lowest_eigenvalue(&d, &off));
    }
    Ok(eigh_symmetric(a)?.values[0])
}

/// Sturm-sequence bisection for the smallest eigenvalue of the symmetric
/// tridiagonal matrix with diagonal `diag` and sub-diagonal `off`.
pub fn tridiagonal_lowest_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n.max(1));
    if n == 1 {
        return diag[0];
    }
    // Gershgorin bracket
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivot_floor = f64::EPSILON * scale;
    // number of eigenvalues strictly below x
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = diag[0] - x;
        for i in 0..n {
            if i > 0 {
                q = diag[i] - x - off[i - 1] * off[i - 1] / q;
            }
            if q.abs() < pivot_floor {
                q = -pivot_floor;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sorted_decomposition(d: Vec<f64>, v: Matrix) -> EigenDecomposition {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Matrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        // largest-magnitude component positive; first one wins ties
        let mut pivot = 0;
        for i in 1..n {
            if v[(i, k)].abs() > v[(pivot, k)].abs() {
                pivot = i;
            }
        }
        let sign = if v[(pivot, k)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, col)] = sign * v[(i, k)];
        }
    }
    EigenDecomposition { values, vectors }
}

/// Householder reduction. Returns the diagonal, the sub-diagonal in
/// `e[1..]` (with `e[0] = 0`) and the accumulated orthogonal transform.
fn householder_tridiagonalize(a: &Matrix) -> (Vec<f64>, Vec<f64>, Matrix) {
    let n = a.dim();
    let mut v = a.clone();
    let mut d: Vec<f64> = (0..n).map(|j| v[(n - 1, j)]).collect();
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let g: f64 = (0..=i).map(|k| v[(k, i + 1)] * v[(k, j)]).sum();
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
    (d, e, v)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating the
/// rotations into `v`. On entry `e[i]` couples rows `i - 1` and `i`.
fn implicit_ql(d: &mut [f64], e: &mut [f64], v: &mut Matrix) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence { index: l, iterations: MAX_QL_ITERATIONS });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in &mut d[l + 2..n] {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let vk1 = v[(k, i + 1)];
                        let vk = v[(k, i)];
                        v[(k, i + 1)] = s * vk + c * vk1;
                        v[(k, i)] = c * vk - s * vk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

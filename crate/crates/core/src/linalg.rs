//! Small dense complex linear algebra plus a cyclic-banded Hermitian solver.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{dimension, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative pivot threshold below which a factorization is declared singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Unitary DFT matrix F_n.
    pub fn dft(n: usize) -> Self {
        let s = (n as f64).sqrt().recip();
        Self::from_fn(n, n, |k, u| {
            Complex64::from_polar(s, -2.0 * std::f64::consts::PI * ((k * u) % n) as f64 / n as f64)
        })
    }

    /// Forward cyclic shift: (P x)[u] = x[u - 1 mod n].
    pub fn cyclic_shift(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if (c + 1) % n == r { ONE } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Minimizes |H x - y|^2 + reg |x|^2 with Householder QR on the stacked system [H; sqrt(reg) I].
pub fn regularized_least_squares(h: &CMatrix, y: &[Complex64], reg: f64) -> Result<Vec<Complex64>> {
    let (m, n) = (h.rows(), h.cols());
    if y.len() != m {
        return dimension(format!("observation length {} vs {m} matrix rows", y.len()));
    }
    let extra = if reg > 0.0 { n } else { 0 };
    if m + extra < n {
        return Err(Error::Singular(format!("{m} observations for {n} unknowns")));
    }
    let rows = m + extra;
    // column-major working copy
    let mut a = vec![ZERO; rows * n];
    for c in 0..n {
        for r in 0..m {
            a[c * rows + r] = h[(r, c)];
        }
        if extra > 0 {
            a[c * rows + m + c] = Complex64::new(reg.sqrt(), 0.0);
        }
    }
    let mut b = y.to_vec();
    b.resize(rows, ZERO);
    let scale = (0..n)
        .map(|c| a[c * rows..(c + 1) * rows].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Singular("zero channel matrix".into()));
    }
    for k in 0..n {
        let col = &mut a[k * rows..(k + 1) * rows];
        let norm = col[k..].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm <= SINGULAR_TOL * scale {
            return Err(Error::Singular(format!("rank deficient at column {k}")));
        }
        let x0 = col[k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = col[k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        col[k] = alpha;
        for z in col[k + 1..].iter_mut() {
            *z = ZERO;
        }
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |w: &mut [Complex64]| {
            let dot: Complex64 = v.iter().zip(w.iter()).map(|(vi, wi)| vi.conj() * wi).sum();
            let f = dot * 2.0 / vnorm2;
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= f * vi;
            }
        };
        for c in k + 1..n {
            reflect(&mut a[c * rows + k..(c + 1) * rows]);
        }
        reflect(&mut b[k..]);
    }
    let mut x = vec![ZERO; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for c in k + 1..n {
            s -= a[c * rows + k] * x[c];
        }
        x[k] = s / a[k * rows + k];
    }
    Ok(x)
}

/// Dense Cholesky factor (lower) of a Hermitian positive definite matrix.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    let dmax = (0..n).map(|i| a[(i, i)].re.abs()).fold(0.0, f64::max);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > SINGULAR_TOL * dmax) {
            return Err(Error::Singular(format!("non-positive pivot at index {j}")));
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

pub fn cholesky_solve(l: &CMatrix, b: &[Complex64]) -> Vec<Complex64> {
    let n = l.rows();
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let t = l[(i, k)] * z[k];
            z[i] -= t;
        }
        z[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let t = l[(k, i)].conj() * z[k];
            z[i] -= t;
        }
        z[i] /= l[(i, i)];
    }
    z
}

/// Hermitian matrix whose nonzeros sit at cyclic distance at most `b` from the diagonal.
///
/// `band[u * (2b + 1) + b + d]` holds A[u, (u + d) mod n] for d in -b..=b.
#[derive(Clone, Debug)]
pub struct CyclicBanded {
    pub n: usize,
    pub b: usize,
    pub band: Vec<Complex64>,
}

impl CyclicBanded {
    pub fn zeros(n: usize, b: usize) -> Self {
        Self { n, b, band: vec![ZERO; n * (2 * b + 1)] }
    }

    fn width(&self) -> usize {
        2 * self.b + 1
    }

    pub fn add(&mut self, u: usize, d: isize, v: Complex64) {
        let w = self.width();
        self.band[u * w + (self.b as isize + d) as usize] += v;
    }

    /// Entry A[u, v], summing every band offset that wraps onto column v.
    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        let n = self.n as isize;
        let b = self.b as isize;
        let mut s = ZERO;
        for d in -b..=b {
            if (u as isize + d).rem_euclid(n) as usize == v {
                s += self.band[u * self.width() + (b + d) as usize];
            }
        }
        s
    }

    /// Entry lookup when no two offsets alias (n > 2b).
    fn entry(&self, u: usize, v: usize) -> Complex64 {
        let n = self.n as isize;
        let mut d = v as isize - u as isize;
        if d > n / 2 {
            d -= n;
        } else if d < -(n / 2) {
            d += n;
        }
        if d.unsigned_abs() > self.b {
            ZERO
        } else {
            self.band[u * self.width() + (self.b as isize + d) as usize]
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |u, v| self.get(u, v))
    }

    /// Solves A x = r for Hermitian positive definite A.
    ///
    /// The interior block is banded and factored directly; the last `b`
    /// unknowns absorb the wrap-around coupling through a small Schur complement.
    pub fn solve_hpd(&self, r: &[Complex64]) -> Result<Vec<Complex64>> {
        let (n, b) = (self.n, self.b);
        if r.len() != n {
            return dimension(format!("rhs length {} vs {n}", r.len()));
        }
        if n < 4 * b + 2 {
            let l = cholesky(&self.to_dense())?;
            return Ok(cholesky_solve(&l, r));
        }
        let dmax = (0..n).map(|u| self.entry(u, u).re.abs()).fold(0.0, f64::max);
        let n1 = n - b;
        let w = b + 1;
        // l1[u * w + j] = L[u, u - b + j]
        let mut l1 = vec![ZERO; n1 * w];
        for u in 0..n1 {
            let lo = u.saturating_sub(b);
            for v in lo..=u {
                let mut s = self.entry(u, v);
                let klo = lo.max(v.saturating_sub(b));
                for k in klo..v {
                    s -= l1[u * w + k + b - u] * l1[v * w + k + b - v].conj();
                }
                if v == u {
                    if !(s.re > SINGULAR_TOL * dmax) {
                        return Err(Error::Singular(format!("non-positive pivot at index {u}")));
                    }
                    l1[u * w + b] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    l1[u * w + v + b - u] = s / l1[v * w + b];
                }
            }
        }
        let l1_at = |u: usize, v: usize| l1[u * w + v + b - u];
        // coupling W = L1^{-1} A[I, T], stored row-major n1 x b
        let mut wmat = vec![ZERO; n1 * b];
        for u in 0..n1 {
            for t in 0..b {
                let mut s = self.entry(u, n1 + t);
                for k in u.saturating_sub(b)..u {
                    s -= l1_at(u, k) * wmat[k * b + t];
                }
                wmat[u * b + t] = s / l1_at(u, u);
            }
        }
        let mut schur = CMatrix::from_fn(b, b, |i, j| self.entry(n1 + i, n1 + j));
        for u in 0..n1 {
            for i in 0..b {
                let wi = wmat[u * b + i].conj();
                for j in 0..b {
                    schur[(i, j)] -= wi * wmat[u * b + j];
                }
            }
        }
        let l2 = cholesky(&schur).map_err(|_| Error::Singular("wrap-around block is not positive definite".into()))?;
        // forward
        let mut z1 = vec![ZERO; n1];
        for u in 0..n1 {
            let mut s = r[u];
            for k in u.saturating_sub(b)..u {
                s -= l1_at(u, k) * z1[k];
            }
            z1[u] = s / l1_at(u, u);
        }
        let mut rt: Vec<Complex64> = r[n1..].to_vec();
        for u in 0..n1 {
            for (t, v) in rt.iter_mut().enumerate() {
                *v -= wmat[u * b + t].conj() * z1[u];
            }
        }
        let xt = cholesky_solve(&l2, &rt);
        // backward: L1^H x_I = z1 - W x_T
        let mut x = vec![ZERO; n];
        for u in 0..n1 {
            let mut s = z1[u];
            for t in 0..b {
                s -= wmat[u * b + t] * xt[t];
            }
            z1[u] = s;
        }
        for u in (0..n1).rev() {
            let mut s = z1[u];
            for k in u + 1..(u + b + 1).min(n1) {
                s -= l1_at(k, u).conj() * x[k];
            }
            x[u] = s / l1_at(u, u);
        }
        x[n1..].copy_from_slice(&xt);
        Ok(x)
    }
}

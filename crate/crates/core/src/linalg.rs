//! Symmetric banded eigenvalue machinery.
//!
//! Eigenvalues are computed by reducing the band to tridiagonal form with
//! Givens rotations (bulges chased off the end of the band) followed by
//! implicit-shift QL on the tridiagonal matrix. Eigenvectors, when needed,
//! come from inverse iteration with a pivoted band LU factorisation.

use crate::error::{Error, Result};

/// Real symmetric matrix stored by its lower band.
///
/// `lower[i * stride + d]` holds `A[i][i - d]` for `d <= bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymmetric {
    n: usize,
    bandwidth: usize,
    lower: Vec<f64>,
}

impl BandedSymmetric {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        BandedSymmetric {
            n,
            bandwidth,
            lower: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut bw = 0;
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate().take(i) {
                if v != 0.0 {
                    bw = bw.max(i - j);
                }
            }
        }
        let mut m = BandedSymmetric::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                m.set(i, j, rows[i][j]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bandwidth {
            0.0
        } else {
            self.lower[i * (self.bandwidth + 1) + (i - j)]
        }
    }

    /// Set `A[i][j]` and, implicitly, `A[j][i]`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bandwidth, "entry ({i}, {j}) outside the band");
        self.lower[i * (self.bandwidth + 1) + (i - j)] = v;
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let b = self.bandwidth;
        let stride = b + 1;
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.lower[i * stride..(i + 1) * stride];
            y[i] += row[0] * x[i];
            for d in 1..=b.min(i) {
                let v = row[d];
                if v != 0.0 {
                    y[i] += v * x[i - d];
                    y[i - d] += v * x[i];
                }
            }
        }
        y
    }

    /// Orthogonally similar tridiagonal matrix `(diagonal, off_diagonal)`;
    /// `off_diagonal[i]` couples `i` and `i + 1`.
    pub fn tridiagonalize(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let b = self.bandwidth;
        if b <= 1 {
            let diag = (0..n).map(|i| self.get(i, i)).collect();
            let off = (0..n.saturating_sub(1))
                .map(|i| self.get(i + 1, i))
                .collect();
            return (diag, off);
        }
        let mut work = Work::new(self);
        for col in 0..n - 2 {
            for i in ((col + 2)..=(col + b).min(n - 1)).rev() {
                if work.get(i, col) == 0.0 {
                    continue;
                }
                work.rotate(i - 1, col);
                // Chase the bulge at (i - 1 + b + 1, i - 1) down the band.
                let mut bulge_col = i - 1;
                let mut row = i + b;
                while row < n {
                    if work.get(row, bulge_col) != 0.0 {
                        work.rotate(row - 1, bulge_col);
                    }
                    bulge_col = row - 1;
                    row += b;
                }
            }
        }
        let diag = (0..n).map(|i| work.get(i, i)).collect();
        let off = (0..n - 1).map(|i| work.get(i + 1, i)).collect();
        (diag, off)
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let (mut d, off) = self.tridiagonalize();
        let mut e = off;
        e.push(0.0);
        tridiagonal_ql(&mut d, &mut e)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// Unit eigenvector for an eigenvalue approximated by `shift`, by
    /// inverse iteration on `A - shift·I`.
    pub fn inverse_iteration(&self, shift: f64, sweeps: usize) -> Vec<f64> {
        let lu = BandLu::factor(self, shift);
        // Deterministic start vector with components in every direction.
        let mut v: Vec<f64> = (0..self.n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.754_877_666).sin())
            .collect();
        normalize(&mut v);
        for _ in 0..sweeps.max(1) {
            lu.solve(&mut v);
            normalize(&mut v);
        }
        v
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Lower band widened by one diagonal to hold the bulge.
struct Work {
    n: usize,
    reach: usize,
    stride: usize,
    lower: Vec<f64>,
}

impl Work {
    fn new(m: &BandedSymmetric) -> Self {
        let reach = m.bandwidth + 1;
        let stride = reach + 1;
        let mut lower = vec![0.0; m.n * stride];
        for i in 0..m.n {
            for d in 0..=m.bandwidth.min(i) {
                lower[i * stride + d] = m.lower[i * (m.bandwidth + 1) + d];
            }
        }
        Work {
            n: m.n,
            reach,
            stride,
            lower,
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.reach {
            0.0
        } else {
            self.lower[i * self.stride + (i - j)]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(i - j <= self.reach);
        self.lower[i * self.stride + (i - j)] = v;
    }

    /// Similarity by the rotation in plane `(p, p + 1)` that zeroes
    /// `A[p + 1][col]` against `A[p][col]`.
    fn rotate(&mut self, p: usize, col: usize) {
        let q = p + 1;
        let x = self.get(p, col);
        let y = self.get(q, col);
        let r = x.hypot(y);
        if r == 0.0 {
            return;
        }
        let c = x / r;
        let s = y / r;

        let app = self.get(p, p);
        let aqq = self.get(q, q);
        let apq = self.get(q, p);

        let lo = p.saturating_sub(self.reach - 1);
        let hi = (q + self.reach - 1).min(self.n - 1);
        for j in lo..=hi {
            if j == p || j == q {
                continue;
            }
            let ap = self.get(p, j);
            let aq = self.get(q, j);
            if ap == 0.0 && aq == 0.0 {
                continue;
            }
            let np = c * ap + s * aq;
            let nq = -s * ap + c * aq;
            if p.abs_diff(j) <= self.reach {
                self.set(p, j, np);
            }
            if q.abs_diff(j) <= self.reach {
                self.set(q, j, nq);
            }
        }
        self.set(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.set(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.set(q, p, c * s * (aqq - app) + (c * c - s * s) * apq);
        self.set(p, col, r);
        self.set(q, col, 0.0);
    }
}

const QL_MAX_SWEEPS: usize = 100;

/// Implicit-shift QL on a symmetric tridiagonal matrix; on return `diag`
/// holds the eigenvalues (unsorted). `off[i]` couples `i` and `i + 1` and
/// must have the same length as `diag` (last entry ignored).
pub fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    assert_eq!(off.len(), n);
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd || off[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::EigenNonConvergence {
                    index: l,
                    iterations: sweeps,
                });
            }
            // Wilkinson-type shift from the leading 2×2 block.
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Pivoted LU of a shifted banded symmetric matrix, stored by rows with
/// the extra upper diagonals pivoting can create.
struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    rows: Vec<f64>,
    pivots: Vec<usize>,
    multipliers: Vec<f64>,
}

impl BandLu {
    fn factor(m: &BandedSymmetric, shift: f64) -> Self {
        let n = m.n;
        let kl = m.bandwidth;
        let ku = m.bandwidth;
        let width = 2 * kl + ku + 1;
        let mut rows = vec![0.0; n * width];
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let mut v = m.get(i, j);
                if i == j {
                    v -= shift;
                }
                scale = scale.max(v.abs());
                rows[at(i, j)] = v;
            }
        }
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut pivots = vec![0; n];
        let mut multipliers = vec![0.0; n * kl.max(1)];
        for i in 0..n {
            let last_row = (i + kl).min(n - 1);
            let last_col = (i + kl + ku).min(n - 1);
            let mut p = i;
            for r in i + 1..=last_row {
                if rows[at(r, i)].abs() > rows[at(p, i)].abs() {
                    p = r;
                }
            }
            pivots[i] = p;
            if p != i {
                for j in i..=last_col {
                    rows.swap(at(i, j), at(p, j));
                }
            }
            if rows[at(i, i)].abs() < tiny {
                rows[at(i, i)] = tiny;
            }
            let piv = rows[at(i, i)];
            for r in i + 1..=last_row {
                let f = rows[at(r, i)] / piv;
                multipliers[i * kl + (r - i - 1)] = f;
                rows[at(r, i)] = 0.0;
                if f != 0.0 {
                    for j in i + 1..=last_col {
                        rows[at(r, j)] -= f * rows[at(i, j)];
                    }
                }
            }
        }
        BandLu {
            n,
            kl,
            width,
            rows,
            pivots,
            multipliers,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let (n, kl, width) = (self.n, self.kl, self.width);
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        for i in 0..n {
            b.swap(i, self.pivots[i]);
            for r in i + 1..=(i + kl).min(n - 1) {
                b[r] -= self.multipliers[i * kl + (r - i - 1)] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + 2 * kl).min(n - 1) {
                s -= self.rows[at(i, j)] * b[j];
            }
            b[i] = s / self.rows[at(i, i)];
        }
    }
}

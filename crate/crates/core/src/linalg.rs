//! Small dense real matrices and a cyclic Jacobi eigensolver for symmetric
//! matrices.  Dimensions stay below ~100 in this crate, so a hand-rolled
//! solver keeps the numeric core dependency-free and reentrant.

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Mat {
        Mat {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Mat {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols);
            data.extend_from_slice(r);
        }
        Mat {
            n_rows,
            n_cols,
            data,
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = Mat::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n_cols, v.len());
        (0..self.n_rows)
            .map(|i| (0..self.n_cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Mat {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Mat {
        Mat {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn symmetry_defect(&self) -> f64 {
        self.sub(&self.transpose()).frobenius()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        for i in 0..self.n_rows {
            self[(i, j)] = v[i];
        }
    }

    /// exp(A) for nilpotent A: the series terminates exactly.
    pub fn exp_nilpotent(&self) -> Mat {
        assert_eq!(self.n_rows, self.n_cols);
        let n = self.n_rows;
        let mut out = Mat::identity(n);
        let mut term = Mat::identity(n);
        for k in 1..=n {
            term = term.matmul(self).scale(1.0 / k as f64);
            if term.max_abs() == 0.0 {
                break;
            }
            out = out.add(&term);
        }
        out
    }

    /// Kronecker product (self acts on the left/most significant factor).
    pub fn kron(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.n_rows * other.n_rows, self.n_cols * other.n_cols);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                let a = self[(i, j)];
                if a == 0.0 {
                    continue;
                }
                for k in 0..other.n_rows {
                    for l in 0..other.n_cols {
                        out[(i * other.n_rows + k, j * other.n_cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        let idx = i * self.n_cols + j;
        &mut self.data[idx]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Returns (eigenvalues, V) with columns of V the eigenvectors, sorted by
/// ascending eigenvalue.
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    assert_eq!(a.n_rows, a.n_cols);
    let n = a.n_rows;
    let mut d = a.clone();
    let mut v = Mat::identity(n);
    let scale = a.frobenius().max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += d[(i, j)] * d[(i, j)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = d[(p, q)];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let app = d[(p, p)];
                let aqq = d[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows/columns p, q
                for k in 0..n {
                    let dkp = d[(k, p)];
                    let dkq = d[(k, q)];
                    d[(k, p)] = c * dkp - s * dkq;
                    d[(k, q)] = s * dkp + c * dkq;
                }
                for k in 0..n {
                    let dpk = d[(p, k)];
                    let dqk = d[(q, k)];
                    d[(p, k)] = c * dpk - s * dqk;
                    d[(q, k)] = s * dpk + c * dqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[(i, i)].partial_cmp(&d[(j, j)]).unwrap());
    let eigvals: Vec<f64> = order.iter().map(|&i| d[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        let col = v.column(old_j);
        vectors.set_column(new_j, &col);
    }
    (eigvals, vectors)
}

/// Orthonormal basis of the kernel of the stacked rows, via the
/// eigendecomposition of S^T S.  `tol` is relative to the largest
/// eigenvalue (or absolute when everything is tiny).
pub fn kernel_basis(stacked: &Mat, tol: f64) -> Vec<Vec<f64>> {
    let gram = stacked.transpose().matmul(stacked);
    let (vals, vecs) = jacobi_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(1.0);
    (0..vals.len())
        .filter(|&k| vals[k].abs() <= tol * top)
        .map(|k| vecs.column(k))
        .collect()
}

/// Modified Gram-Schmidt; returns orthonormal spanning vectors (drops
/// near-dependent input).
pub fn gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = dot(&w, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= c * ui;
            }
        }
        // second pass for numerical orthogonality
        for u in &out {
            let c = dot(&w, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= c * ui;
            }
        }
        let nw = norm(&w);
        if nw > 1e-10 {
            out.push(w.iter().map(|x| x / nw).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5, 9, 16] {
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let x = rng.gen_range(-2.0..2.0);
                    a[(i, j)] = x;
                    a[(j, i)] = x;
                }
            }
            let (vals, vecs) = jacobi_eigen(&a);
            // A v = lambda v per column
            for k in 0..n {
                let v = vecs.column(k);
                let av = a.matvec(&v);
                for i in 0..n {
                    assert!((av[i] - vals[k] * v[i]).abs() < 1e-10, "n={n}");
                }
            }
            // orthonormality
            let vtv = vecs.transpose().matmul(&vecs);
            assert!(vtv.sub(&Mat::identity(n)).max_abs() < 1e-12);
            // sorted
            for k in 1..n {
                assert!(vals[k] >= vals[k - 1]);
            }
        }
    }

    #[test]
    fn kernel_of_rank_deficient() {
        // rows (1,1,0) and (0,0,1): kernel spanned by (1,-1,0)/sqrt(2)
        let s = Mat::from_rows(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let k = kernel_basis(&s, 1e-12);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!((v[0] + v[1]).abs() < 1e-12);
        assert!(v[2].abs() < 1e-12);
        assert!((norm(v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exp_nilpotent_sl2() {
        let e = Mat::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let ee = e.exp_nilpotent();
        assert_eq!(ee.data, vec![1.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn kron_dimensions() {
        let a = Mat::identity(2);
        let b = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let k = a.kron(&b);
        assert_eq!((k.n_rows, k.n_cols), (4, 4));
        assert_eq!(k[(0, 1)], 2.0);
        assert_eq!(k[(2, 3)], 2.0);
        assert_eq!(k[(0, 3)], 0.0);
    }
}

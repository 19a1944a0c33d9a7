//! Explicit irreducible representations of sl2 and sl3 in the orthonormal
//! Gelfand-Tsetlin basis.
//!
//! Raising generators act with the classical square-root coefficients;
//! lowering generators are their transposes, so every operator assembled
//! from e_a f_a pairs below is real symmetric.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algebra {
    Sl2,
    Sl3,
}

impl Algebra {
    pub fn parse(tag: &str) -> Result<Algebra> {
        match tag {
            "sl2" => Ok(Algebra::Sl2),
            "sl3" => Ok(Algebra::Sl3),
            _ => Err(Error::UnknownAlgebra(tag.to_string())),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Algebra::Sl2 => 1,
            Algebra::Sl3 => 2,
        }
    }

    pub fn matrix_size(&self) -> usize {
        self.rank() + 1
    }

    /// Positive roots eps_i - eps_j as (i, j) index pairs, by height.
    pub fn positive_root_pairs(&self) -> Vec<(usize, usize)> {
        match self {
            Algebra::Sl2 => vec![(0, 1)],
            Algebra::Sl3 => vec![(0, 1), (1, 2), (0, 2)],
        }
    }

    pub fn dynkin_label(&self) -> &'static str {
        match self {
            Algebra::Sl2 => "A1",
            Algebra::Sl3 => "A2",
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algebra::Sl2 => "sl2",
            Algebra::Sl3 => "sl3",
        })
    }
}

/// A real Cartan element, stored as traceless diagonal entries in the
/// defining representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanElt(pub Vec<f64>);

impl CartanElt {
    /// alpha(chi) for the root eps_i - eps_j.
    pub fn root_value(&self, pair: (usize, usize)) -> f64 {
        self.0[pair.0] - self.0[pair.1]
    }

    pub fn is_regular(&self, alg: Algebra) -> bool {
        alg.positive_root_pairs()
            .iter()
            .all(|&p| self.root_value(p).abs() > 1e-12)
    }

    pub fn scale(&self, c: f64) -> CartanElt {
        CartanElt(self.0.iter().map(|x| x * c).collect())
    }

    pub fn lerp(&self, other: &CartanElt, t: f64) -> CartanElt {
        CartanElt(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }
}

/// Irreducible representation with Chevalley generator matrices.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub algebra: Algebra,
    /// Highest weight in fundamental coordinates.
    pub lambda: Vec<i64>,
    pub dim: usize,
    /// Simple raising/lowering/Cartan matrices, one per node.
    pub e: Vec<Mat>,
    pub f: Vec<Mat>,
    pub h: Vec<Mat>,
    /// Weight of each basis vector, fundamental coordinates.
    pub weights: Vec<Vec<i64>>,
}

/// GT pattern for gl2 or gl3, stored row-major from the top.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Pattern(Vec<Vec<i64>>);

fn enumerate_patterns(top: &[i64]) -> Vec<Pattern> {
    let n = top.len();
    let mut rows: Vec<Vec<Vec<i64>>> = vec![vec![top.to_vec()]];
    for level in 1..n {
        let len = n - level;
        let mut next: Vec<Vec<Vec<i64>>> = Vec::new();
        for partial in &rows {
            let prev = partial.last().unwrap();
            let mut row = vec![0i64; len];
            fill_rows(prev, &mut row, 0, partial, &mut next);
        }
        rows = next;
        fn fill_rows(
            prev: &[i64],
            row: &mut Vec<i64>,
            k: usize,
            partial: &[Vec<i64>],
            out: &mut Vec<Vec<Vec<i64>>>,
        ) {
            if k == row.len() {
                let mut np = partial.to_vec();
                np.push(row.clone());
                out.push(np);
                return;
            }
            // interlacing: prev[k] >= row[k] >= prev[k+1]
            for v in (prev[k + 1]..=prev[k]).rev() {
                row[k] = v;
                fill_rows(prev, row, k + 1, partial, out);
            }
        }
    }
    rows.into_iter().map(Pattern).collect()
}

/// Orthonormal-basis raising coefficient for adding 1 to m_{i,k}
/// (1-based i, k), with l_{i,k} = m_{i,k} - i.
fn raising_coeff(p: &Pattern, k: usize, i: usize) -> f64 {
    let n = p.0.len();
    let row = |kk: usize| -> &[i64] { &p.0[n - kk] }; // row of length kk
    let l = |ii: usize, kk: usize| -> i64 { row(kk)[ii - 1] - ii as i64 };
    let li = l(i, k);
    let mut num = 1i64;
    for j in 1..=(k + 1) {
        num *= l(j, k + 1) - li;
    }
    let mut num2 = 1i64;
    if k >= 2 {
        for j in 1..=(k - 1) {
            num2 *= l(j, k - 1) - li - 1;
        }
    }
    let mut den = 1i64;
    for j in 1..=k {
        if j != i {
            den *= (l(j, k) - li) * (l(j, k) - li - 1);
        }
    }
    let val = -(num * num2) as f64 / den as f64;
    if val <= 0.0 {
        0.0
    } else {
        val.sqrt()
    }
}

fn gl_row_sums(p: &Pattern) -> Vec<i64> {
    let n = p.0.len();
    // E_kk eigenvalue: sum(row k) - sum(row k-1), rows counted from bottom
    (1..=n)
        .map(|k| {
            let sum_k: i64 = p.0[n - k].iter().sum();
            let sum_km1: i64 = if k >= 2 { p.0[n - (k - 1)].iter().sum() } else { 0 };
            sum_k - sum_km1
        })
        .collect()
}

pub fn build_irrep(algebra: Algebra, lambda: &[i64]) -> Result<Irrep> {
    if lambda.len() != algebra.rank() || lambda.iter().any(|&c| c < 0) {
        return Err(Error::NonDominant(
            lambda.iter().map(|c| c.to_string()).collect(),
        ));
    }
    // gl top row from the sl highest weight
    let top: Vec<i64> = match algebra {
        Algebra::Sl2 => vec![lambda[0], 0],
        Algebra::Sl3 => vec![lambda[0] + lambda[1], lambda[1], 0],
    };
    let n = top.len();
    let patterns = enumerate_patterns(&top);
    let dim = patterns.len();
    let index: std::collections::HashMap<Pattern, usize> = patterns
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();

    let rank = algebra.rank();
    let mut e_mats = vec![Mat::zeros(dim, dim); rank];
    for (col, p) in patterns.iter().enumerate() {
        for k in 1..=rank {
            for i in 1..=k {
                let c = raising_coeff(p, k, i);
                if c == 0.0 {
                    continue;
                }
                let mut q = p.clone();
                q.0[n - k][i - 1] += 1;
                if let Some(&row) = index.get(&q) {
                    e_mats[k - 1][(row, col)] = c;
                }
            }
        }
    }
    let f_mats: Vec<Mat> = e_mats.iter().map(|m| m.transpose()).collect();
    let mut h_mats = vec![Mat::zeros(dim, dim); rank];
    let mut weights = Vec::with_capacity(dim);
    for (x, p) in patterns.iter().enumerate() {
        let sums = gl_row_sums(p);
        let wt: Vec<i64> = (0..rank).map(|k| sums[k] - sums[k + 1]).collect();
        for k in 0..rank {
            h_mats[k][(x, x)] = wt[k] as f64;
        }
        weights.push(wt);
    }

    Ok(Irrep {
        algebra,
        lambda: lambda.to_vec(),
        dim,
        e: e_mats,
        f: f_mats,
        h: h_mats,
        weights,
    })
}

impl Irrep {
    /// Root vectors e_alpha, f_alpha for all positive roots (by height).
    /// Composite root vectors come from commutators of the simple ones, so
    /// [e_alpha, f_alpha] = h_alpha holds exactly.
    pub fn root_vectors(&self) -> Vec<(Mat, Mat)> {
        match self.algebra {
            Algebra::Sl2 => vec![(self.e[0].clone(), self.f[0].clone())],
            Algebra::Sl3 => {
                let e13 = self.e[0].commutator(&self.e[1]);
                let f31 = self.f[1].commutator(&self.f[0]);
                vec![
                    (self.e[0].clone(), self.f[0].clone()),
                    (self.e[1].clone(), self.f[1].clone()),
                    (e13, f31),
                ]
            }
        }
    }

    /// Matrix of a Cartan element (diagonal entries in the defining rep).
    pub fn cartan_matrix_of(&self, chi: &CartanElt) -> Mat {
        // chi = sum_k c_k h_k with c_k the partial sums of the diagonal
        let mut out = Mat::zeros(self.dim, self.dim);
        let mut partial = 0.0;
        for k in 0..self.algebra.rank() {
            partial += chi.0[k];
            out = out.add(&self.h[k].scale(partial));
        }
        out
    }

    /// Orthonormal Cartan basis with respect to the defining trace form.
    pub fn orthonormal_cartan(&self) -> Vec<Mat> {
        match self.algebra {
            Algebra::Sl2 => vec![self.h[0].scale(1.0 / 2.0_f64.sqrt())],
            Algebra::Sl3 => {
                let h1 = &self.h[0];
                let h2 = &self.h[1];
                vec![
                    h1.scale(1.0 / 2.0_f64.sqrt()),
                    h1.add(&h2.scale(2.0)).scale(1.0 / 6.0_f64.sqrt()),
                ]
            }
        }
    }

    /// Quadratic Casimir, symmetrically ordered:
    /// sum_{alpha>0} (e_a f_a + f_a e_a) + sum_k h'_k^2 over the
    /// trace-orthonormal Cartan basis.  For sl2 this is ef + fe + h^2/2,
    /// the central quantization of the classical generator 2ef + h^2/2,
    /// with eigenvalue (lambda, lambda + 2 rho) under the trace form.
    pub fn casimir(&self) -> Mat {
        let mut out = Mat::zeros(self.dim, self.dim);
        for (e, f) in self.root_vectors() {
            out = out.add(&e.matmul(&f)).add(&f.matmul(&e));
        }
        for h in self.orthonormal_cartan() {
            out = out.add(&h.matmul(&h));
        }
        out
    }

    /// Lift of the simple reflection: n_i = exp(e_i) exp(-f_i) exp(e_i).
    pub fn simple_reflection_lift(&self, i: usize) -> Mat {
        let a = self.e[i].exp_nilpotent();
        let b = self.f[i].scale(-1.0).exp_nilpotent();
        a.matmul(&b).matmul(&a)
    }

    /// rho(w) for a reduced word (letters act left to right, so the product
    /// is taken with the first letter rightmost).
    pub fn weyl_lift(&self, word: &[usize]) -> Mat {
        let mut out = Mat::identity(self.dim);
        for &i in word {
            out = self.simple_reflection_lift(i).matmul(&out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gram_schmidt;

    #[test]
    fn sl2_defining() {
        let v = build_irrep(Algebra::Sl2, &[1]).unwrap();
        assert_eq!(v.dim, 2);
        assert_eq!(v.e[0].data, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(v.h[0].data, vec![1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn sl2_triplet() {
        let v = build_irrep(Algebra::Sl2, &[2]).unwrap();
        assert_eq!(v.dim, 3);
        let mut diag: Vec<f64> = (0..3).map(|i| v.h[0][(i, i)]).collect();
        diag.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(diag, vec![2.0, 0.0, -2.0]);
    }

    #[test]
    fn sl3_dimensions() {
        for (lam, d) in [([1, 0], 3), ([0, 1], 3), ([1, 1], 8), ([2, 0], 6), ([2, 2], 27)] {
            let v = build_irrep(Algebra::Sl3, &lam).unwrap();
            assert_eq!(v.dim, d, "{lam:?}");
        }
    }

    #[test]
    fn bracket_relations() {
        for (alg, lam) in [
            (Algebra::Sl2, vec![3]),
            (Algebra::Sl3, vec![1, 0]),
            (Algebra::Sl3, vec![1, 1]),
            (Algebra::Sl3, vec![2, 1]),
        ] {
            let v = build_irrep(alg, &lam).unwrap();
            let rank = alg.rank();
            let scale = 1.0 + v.e[0].frobenius();
            let cartan: Vec<Vec<i64>> = match alg {
                Algebra::Sl2 => vec![vec![2]],
                Algebra::Sl3 => vec![vec![2, -1], vec![-1, 2]],
            };
            for i in 0..rank {
                for j in 0..rank {
                    // [h_i, e_j] = a_ij e_j
                    let lhs = v.h[i].commutator(&v.e[j]);
                    let rhs = v.e[j].scale(cartan[i][j] as f64);
                    assert!(lhs.sub(&rhs).frobenius() < 1e-10 * scale);
                    // [e_i, f_j] = delta_ij h_i
                    let lhs = v.e[i].commutator(&v.f[j]);
                    let rhs = if i == j {
                        v.h[i].clone()
                    } else {
                        Mat::zeros(v.dim, v.dim)
                    };
                    assert!(lhs.sub(&rhs).frobenius() < 1e-10 * scale, "{alg} {lam:?}");
                }
            }
            // e and f are mutual transposes
            for i in 0..rank {
                assert!(v.e[i].sub(&v.f[i].transpose()).frobenius() == 0.0);
            }
        }
    }

    #[test]
    fn serre_relations_sl3() {
        let v = build_irrep(Algebra::Sl3, &[2, 1]).unwrap();
        // [e1, [e1, e2]] = 0 and [e2, [e2, e1]] = 0
        let e12 = v.e[0].commutator(&v.e[1]);
        let s1 = v.e[0].commutator(&e12);
        assert!(s1.frobenius() < 1e-10);
        let e21 = v.e[1].commutator(&v.e[0]);
        let s2 = v.e[1].commutator(&e21);
        assert!(s2.frobenius() < 1e-10);
    }

    #[test]
    fn casimir_scalars_sl2() {
        // central value (lambda, lambda + 2 rho) = m^2/2 + m
        for m in 0i64..=3 {
            let c = (m * m) as f64 / 2.0 + m as f64;
            let v = build_irrep(Algebra::Sl2, &[m]).unwrap();
            let cas = v.casimir();
            let diff = cas.sub(&Mat::identity(v.dim).scale(c));
            assert!(diff.frobenius() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn casimir_is_scalar_sl3() {
        for lam in [[1, 0], [1, 1], [2, 1]] {
            let v = build_irrep(Algebra::Sl3, &lam).unwrap();
            let cas = v.casimir();
            let c = cas[(0, 0)];
            assert!(cas.sub(&Mat::identity(v.dim).scale(c)).frobenius() < 1e-10);
            assert!(cas.symmetry_defect() < 1e-12);
        }
    }

    #[test]
    fn weyl_lift_sl2() {
        let v = build_irrep(Algebra::Sl2, &[1]).unwrap();
        let n = v.simple_reflection_lift(0);
        assert!((n[(0, 1)] - 1.0).abs() < 1e-14);
        assert!((n[(1, 0)] + 1.0).abs() < 1e-14);
        assert!(n[(0, 0)].abs() < 1e-14 && n[(1, 1)].abs() < 1e-14);
    }

    #[test]
    fn weyl_lift_permutes_weight_spaces() {
        let v = build_irrep(Algebra::Sl3, &[1, 1]).unwrap();
        let n1 = v.simple_reflection_lift(0);
        // weight of image: s_1 wt
        for x in 0..v.dim {
            let col: Vec<f64> = (0..v.dim).map(|r| n1[(r, x)]).collect();
            let wt = &v.weights[x];
            let target = vec![-wt[0], wt[0] + wt[1]]; // s_1 action in fund coords
            for (r, &c) in col.iter().enumerate() {
                if c.abs() > 1e-9 {
                    assert_eq!(v.weights[r], target);
                }
            }
        }
    }

    #[test]
    fn two_reduced_words_agree_on_lines() {
        let v = build_irrep(Algebra::Sl3, &[1, 1]).unwrap();
        let a = v.weyl_lift(&[0, 1, 0]);
        let b = v.weyl_lift(&[1, 0, 1]);
        // the two lifts differ by a torus element: columns agree up to sign
        for x in 0..v.dim {
            let ca: Vec<f64> = (0..v.dim).map(|r| a[(r, x)]).collect();
            let cb: Vec<f64> = (0..v.dim).map(|r| b[(r, x)]).collect();
            let overlap = crate::linalg::dot(&ca, &cb).abs();
            let na = crate::linalg::norm(&ca);
            let nb = crate::linalg::norm(&cb);
            assert!((overlap - na * nb).abs() < 1e-9, "column {x}");
        }
    }

    /// Tensor-power + highest-weight-projection oracle: build the same
    /// irrep inside a tensor power of the defining representation and check
    /// the generator matrices agree under the intertwiner.
    #[test]
    fn cross_check_against_tensor_power_oracle() {
        cross_check(Algebra::Sl2, &[2], 2);
        cross_check(Algebra::Sl2, &[3], 3);
        cross_check(Algebra::Sl3, &[2, 0], 2);
        cross_check(Algebra::Sl3, &[1, 1], 3); // adjoint inside 3 x 3 x 3
    }

    fn cross_check(alg: Algebra, lam: &[i64], power: u32) {
        let gt = build_irrep(alg, lam).unwrap();
        assert!(gt.dim <= 10);
        let def = build_irrep(alg, &{
            let mut e1 = vec![0i64; alg.rank()];
            e1[0] = 1;
            e1
        })
        .unwrap();
        let rank = alg.rank();
        let n = def.dim.pow(power);
        // tensor-power operators
        let place = |m: &Mat, k: u32| -> Mat {
            let mut out = Mat::identity(1);
            for slot in 0..power {
                let factor = if slot == k { m.clone() } else { Mat::identity(def.dim) };
                out = out.kron(&factor);
            }
            out
        };
        let tot = |m: &Mat| -> Mat {
            let mut out = Mat::zeros(n, n);
            for k in 0..power {
                out = out.add(&place(m, k));
            }
            out
        };
        let es: Vec<Mat> = (0..rank).map(|i| tot(&def.e[i])).collect();
        let fs: Vec<Mat> = (0..rank).map(|i| tot(&def.f[i])).collect();
        let hs: Vec<Mat> = (0..rank).map(|i| tot(&def.h[i])).collect();
        // find a highest-weight vector of weight lam in the tensor power
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for e in &es {
            for r in 0..n {
                rows.push((0..n).map(|c| e[(r, c)]).collect());
            }
        }
        for (i, h) in hs.iter().enumerate() {
            // (h_i - lam_i) rows
            let mut m = h.clone();
            for d in 0..n {
                m[(d, d)] -= lam[i] as f64;
            }
            for r in 0..n {
                rows.push((0..n).map(|c| m[(r, c)]).collect());
            }
        }
        let stacked = Mat::from_rows(&rows);
        let hw = crate::linalg::kernel_basis(&stacked, 1e-20);
        assert!(!hw.is_empty(), "no highest weight vector found");
        // generate the cyclic span under lowering operators
        let mut basis: Vec<Vec<f64>> = vec![hw[0].clone()];
        let mut frontier = vec![hw[0].clone()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for v in &frontier {
                for f in &fs {
                    let w = f.matvec(v);
                    if crate::linalg::norm(&w) < 1e-9 {
                        continue;
                    }
                    let ortho = gram_schmidt(&[basis.clone(), vec![w.clone()]].concat());
                    if ortho.len() > basis.len() {
                        basis = ortho;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(basis.len(), gt.dim, "cyclic span has the right dimension");
        // oracle matrices in this basis
        let q = Mat::from_rows(&basis).transpose(); // n x dim, orthonormal columns
        let project = |m: &Mat| -> Mat { q.transpose().matmul(&m.matmul(&q)) };
        let oe: Vec<Mat> = es.iter().map(project).collect();
        let of: Vec<Mat> = fs.iter().map(project).collect();
        let oh: Vec<Mat> = hs.iter().map(project).collect();
        // intertwiner: map GT basis onto the oracle basis by matching the
        // highest weight vector and transporting along f-words
        let dim = gt.dim;
        let mut t = Mat::zeros(dim, dim); // columns: images of GT basis vectors
        let gt_hw = (0..dim)
            .position(|x| gt.weights[x] == lam.to_vec())
            .unwrap();
        let mut known = vec![false; dim];
        t.set_column(gt_hw, &{
            let mut e0 = vec![0.0; dim];
            // oracle hw vector in projected coordinates
            let hw_proj = q.transpose().matvec(&hw[0]);
            let nn = crate::linalg::norm(&hw_proj);
            for (i, v) in hw_proj.iter().enumerate() {
                e0[i] = v / nn;
            }
            e0
        });
        known[gt_hw] = true;
        // BFS through f-edges: if f_i (gt basis x) has a single nonzero
        // coefficient on basis y, transport the oracle image accordingly
        let mut changed = true;
        while changed {
            changed = false;
            for x in 0..dim {
                if !known[x] {
                    continue;
                }
                for i in 0..rank {
                    for y in 0..dim {
                        let c = gt.f[i][(y, x)];
                        if c.abs() > 1e-12 && !known[y] {
                            // T y = (1/c) f_i^{oracle} (T x) requires f_i x
                            // to be a multiple of y alone
                            let col: Vec<f64> = (0..dim).map(|r| gt.f[i][(r, x)]).collect();
                            let others: f64 = col
                                .iter()
                                .enumerate()
                                .filter(|(r, _)| *r != y)
                                .map(|(_, v)| v * v)
                                .sum();
                            if others > 1e-18 {
                                continue;
                            }
                            let tx = t.column(x);
                            let img = of[i].matvec(&tx);
                            let scaled: Vec<f64> = img.iter().map(|v| v / c).collect();
                            t.set_column(y, &scaled);
                            known[y] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !known.iter().all(|&k| k) {
            // fall back: compare spectra of e f pairs instead of a full
            // intertwiner (multiple f-branches unreachable by single edges)
            for i in 0..rank {
                let a = gt.e[i].matmul(&gt.f[i]);
                let b = oe[i].matmul(&of[i]);
                let (mut sa, _) = crate::linalg::jacobi_eigen(&a.add(&a.transpose()).scale(0.5));
                let (mut sb, _) = crate::linalg::jacobi_eigen(&b.add(&b.transpose()).scale(0.5));
                sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
                sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
                for (x, y) in sa.iter().zip(&sb) {
                    assert!((x - y).abs() < 1e-8);
                }
            }
            return;
        }
        // verify T intertwines all generators
        for i in 0..rank {
            for (mine, oracle) in [(&gt.e[i], &oe[i]), (&gt.f[i], &of[i]), (&gt.h[i], &oh[i])] {
                let lhs = t.matmul(mine);
                let rhs = oracle.matmul(&t);
                assert!(
                    lhs.sub(&rhs).frobenius() < 1e-8,
                    "{alg} {lam:?} generator mismatch"
                );
            }
        }
    }
}

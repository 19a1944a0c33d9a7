//! Joint eigenlines of commuting symmetric families and their parallel
//! transport along parameter paths.
//!
//! Joint diagonalization uses a seeded random linear combination of the
//! generators; the result is validated by per-generator residuals and a
//! simple-spectrum check on the joint eigenvalue labels, with retries on
//! label collision.  Transport matches eigenlines step to step by maximal
//! overlap and halves the step whenever the match degrades.

use crate::error::{Error, Result};
use crate::families::OperatorFamily;
use crate::linalg::{dot, jacobi_eigen, kernel_basis, Mat};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Numeric thresholds.  All values are config-overridable; the defaults are
/// the ones the acceptance suite pins.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// relative pairwise commutator bound for families
    pub commutator_rel: f64,
    /// absolute per-generator eigen-residual bound
    pub eigen_residual: f64,
    /// minimal per-step overlap before the step is halved
    pub step_overlap: f64,
    /// minimal handoff fidelity
    pub handoff_fidelity: f64,
    /// maximal number of step halvings
    pub max_step_halvings: u32,
    /// maximal number of delta halvings in handoffs
    pub max_delta_halvings: u32,
    /// joint labels closer than this (relative) collide
    pub label_sep: f64,
    /// random-combination retries on label collision
    pub retries: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            commutator_rel: 1e-8,
            eigen_residual: 1e-7,
            step_overlap: 0.9,
            handoff_fidelity: 0.99,
            max_step_halvings: 40,
            max_delta_halvings: 10,
            label_sep: 1e-6,
            retries: 5,
        }
    }
}

/// An orthonormal invariant block, stored as ambient x k columns.
#[derive(Debug, Clone)]
pub struct Block {
    pub basis: Mat,
}

impl Block {
    pub fn full(dim: usize) -> Block {
        Block {
            basis: Mat::identity(dim),
        }
    }

    pub fn from_vectors(vectors: &[Vec<f64>]) -> Block {
        Block {
            basis: Mat::from_rows(vectors).transpose(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.n_cols
    }

    /// Project an ambient operator to block coordinates; the caller asserts
    /// invariance (checked by the projection residual).
    pub fn project(&self, m: &Mat) -> Result<Mat> {
        let mb = m.matmul(&self.basis);
        let proj = self.basis.transpose().matmul(&mb);
        // invariance: M Q = Q (Q^T M Q)
        let defect = mb.sub(&self.basis.matmul(&proj)).frobenius();
        if defect > 1e-7 * m.frobenius().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "operator does not preserve the block (defect {defect:.2e})"
            )));
        }
        Ok(proj)
    }

    pub fn project_family(&self, fam: &OperatorFamily) -> Result<Vec<Mat>> {
        fam.gens.iter().map(|(_, m)| self.project(m)).collect()
    }
}

/// The weight-mu block of a tensor space (coordinate vectors).
pub fn weight_block(weights: &[Vec<i64>], mu: &[i64]) -> Block {
    let dim = weights.len();
    let members: Vec<usize> = (0..dim).filter(|&x| weights[x] == mu).collect();
    let mut basis = Mat::zeros(dim, members.len());
    for (col, &x) in members.iter().enumerate() {
        basis[(x, col)] = 1.0;
    }
    Block { basis }
}

/// The multiplicity block: highest-weight vectors of weight mu, i.e. the
/// joint kernel of the raising operators inside the weight-mu block.
pub fn multiplicity_block(
    weights: &[Vec<i64>],
    mu: &[i64],
    raising: &[Mat],
) -> Result<Block> {
    let wb = weight_block(weights, mu);
    if wb.dim() == 0 {
        return Ok(wb);
    }
    // stack (E_i Q) and find the kernel in block coordinates
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for e in raising {
        let eq = e.matmul(&wb.basis);
        for r in 0..eq.n_rows {
            rows.push((0..eq.n_cols).map(|c| eq[(r, c)]).collect());
        }
    }
    let stacked = Mat::from_rows(&rows);
    let kernel = kernel_basis(&stacked, 1e-16);
    // back to ambient coordinates
    let vectors: Vec<Vec<f64>> = kernel.iter().map(|v| wb.basis.matvec(v)).collect();
    Ok(Block::from_vectors(&vectors))
}

/// Joint eigenlines on a block, in block coordinates.
#[derive(Debug, Clone)]
pub struct EigenlineSet {
    /// k x k orthonormal columns: one eigenline per column.
    pub vectors: Mat,
    /// labels[line][generator]
    pub labels: Vec<Vec<f64>>,
    /// worst per-generator residual seen when validating
    pub max_residual: f64,
}

impl EigenlineSet {
    pub fn len(&self) -> usize {
        self.vectors.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn line(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j)
    }
}

/// Jointly diagonalize a commuting family of symmetric matrices given in
/// block coordinates.
pub fn joint_eigenlines(
    gens: &[Mat],
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
    block_label: &str,
) -> Result<EigenlineSet> {
    assert!(!gens.is_empty());
    let k = gens[0].n_rows;
    if k == 0 {
        return Ok(EigenlineSet {
            vectors: Mat::zeros(0, 0),
            labels: vec![],
            max_residual: 0.0,
        });
    }
    let mut last_err = None;
    for _attempt in 0..=tol.retries {
        // random real combination (Gaussian-ish via sum of uniforms)
        let mut m = Mat::zeros(k, k);
        for g in gens {
            let c: f64 = (0..6).map(|_| rng.gen_range(-0.5..0.5)).sum();
            m = m.add(&g.scale(c));
        }
        let m = m.add(&m.transpose()).scale(0.5);
        let (_, v) = jacobi_eigen(&m);
        // labels and residuals
        let mut labels = vec![vec![0.0; gens.len()]; k];
        let mut max_residual = 0.0f64;
        for j in 0..k {
            let col = v.column(j);
            for (gi, g) in gens.iter().enumerate() {
                let gv = g.matvec(&col);
                let lam = dot(&col, &gv);
                labels[j][gi] = lam;
                let res: f64 = gv
                    .iter()
                    .zip(&col)
                    .map(|(a, b)| (a - lam * b) * (a - lam * b))
                    .sum::<f64>()
                    .sqrt();
                max_residual = max_residual.max(res);
            }
        }
        if max_residual > tol.eigen_residual {
            last_err = Some(Error::ResidualTooLarge {
                residual: max_residual,
                tol: tol.eigen_residual,
            });
            continue;
        }
        // simple spectrum: joint labels pairwise distinct
        let scales: Vec<f64> = gens.iter().map(|g| g.frobenius().max(1.0)).collect();
        let mut collision = false;
        'outer: for a in 0..k {
            for b in a + 1..k {
                let distinct = (0..gens.len())
                    .any(|gi| (labels[a][gi] - labels[b][gi]).abs() > tol.label_sep * scales[gi]);
                if !distinct {
                    collision = true;
                    break 'outer;
                }
            }
        }
        if collision {
            last_err = Some(Error::SimpleSpectrumViolation {
                block: block_label.to_string(),
                detail: "joint labels collide under repeated random combinations".into(),
            });
            continue;
        }
        return Ok(EigenlineSet {
            vectors: v,
            labels,
            max_residual,
        });
    }
    Err(last_err.unwrap_or(Error::SimpleSpectrumViolation {
        block: block_label.to_string(),
        detail: "no attempts made".into(),
    }))
}

/// Best bijective matching of two orthonormal line sets by |overlap|,
/// greedy on descending overlap.  Returns perm with perm[i] = j matching
/// column i of `a` to column j of `b`, plus the minimal matched overlap.
pub fn match_lines(a: &Mat, b: &Mat) -> (Vec<usize>, f64) {
    let n = a.n_cols;
    assert_eq!(n, b.n_cols);
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(n * n);
    for i in 0..n {
        let ai = a.column(i);
        for j in 0..n {
            let ov = dot(&ai, &b.column(j)).abs();
            entries.push((i, j, ov));
        }
    }
    entries.sort_by(|x, y| y.2.partial_cmp(&x.2).unwrap());
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut min_overlap: f64 = 1.0;
    let mut assigned = 0;
    for (i, j, ov) in entries {
        if perm[i] != usize::MAX || used[j] {
            continue;
        }
        perm[i] = j;
        used[j] = true;
        min_overlap = min_overlap.min(ov);
        assigned += 1;
        if assigned == n {
            break;
        }
    }
    (perm, min_overlap)
}

/// Diagnostics accumulated along one transport.
#[derive(Debug, Clone, Default)]
pub struct TransportTrail {
    pub steps: usize,
    pub min_overlap: f64,
    pub max_residual: f64,
    pub halvings: u32,
}

/// Transport the eigenlines of `family(t)` from t = 0 to t = 1, starting
/// at `start` (block coordinates).  The output set is aligned with the
/// input: column j of the result is the continuation of column j of
/// `start`.
pub fn transport(
    family: &dyn Fn(f64) -> Result<Vec<Mat>>,
    start: &EigenlineSet,
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
    label: &str,
) -> Result<(EigenlineSet, TransportTrail)> {
    let mut trail = TransportTrail {
        steps: 0,
        min_overlap: 1.0,
        max_residual: start.max_residual,
        halvings: 0,
    };
    let mut current = start.clone();
    let mut t = 0.0f64;
    let mut h = 0.125f64;
    let mut depth = 0u32;
    while t < 1.0 {
        let t_next = (t + h).min(1.0);
        let gens = family(t_next)?;
        let lines = joint_eigenlines(&gens, rng, tol, label)?;
        let (perm, min_ov) = match_lines(&current.vectors, &lines.vectors);
        if min_ov < tol.step_overlap {
            depth += 1;
            trail.halvings += 1;
            if depth > tol.max_step_halvings {
                return Err(Error::StepCollapse {
                    t: t_next,
                    overlap: min_ov,
                    depth,
                });
            }
            h /= 2.0;
            continue;
        }
        // align the new lines with the current ordering and orientation
        let k = lines.len();
        let mut vectors = Mat::zeros(k, k);
        let mut labels = vec![vec![]; k];
        for j in 0..k {
            let src = perm[j];
            let mut col = lines.vectors.column(src);
            if dot(&current.vectors.column(j), &col) < 0.0 {
                for c in col.iter_mut() {
                    *c = -*c;
                }
            }
            vectors.set_column(j, &col);
            labels[j] = lines.labels[src].clone();
        }
        current = EigenlineSet {
            vectors,
            labels,
            max_residual: lines.max_residual,
        };
        trail.steps += 1;
        trail.min_overlap = trail.min_overlap.min(min_ov);
        trail.max_residual = trail.max_residual.max(lines.max_residual);
        t = t_next;
        if min_ov > 0.995 && depth == 0 {
            h = (h * 1.5).min(0.25);
        }
        depth = 0;
    }
    Ok((current, trail))
}

/// Match a transported set against a directly computed target basis;
/// `fidelity` is the minimal matched overlap.  Returns perm with
/// perm[j] = target line continuing the j-th transported line.
pub fn handoff_match(
    transported: &EigenlineSet,
    target: &EigenlineSet,
    tol: &Tolerances,
) -> Result<(Vec<usize>, f64)> {
    let (perm, fidelity) = match_lines(&transported.vectors, &target.vectors);
    if fidelity < tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity,
            threshold: tol.handoff_fidelity,
            halvings: 0,
        });
    }
    Ok((perm, fidelity))
}

/// Apply an orthogonal block operator to each line of a set and identify
/// the image lines within the same set.  Returns the induced permutation.
pub fn induced_permutation(
    op: &Mat,
    lines: &EigenlineSet,
    min_overlap: f64,
) -> Result<Vec<usize>> {
    let k = lines.len();
    let mut image = Mat::zeros(k, k);
    for j in 0..k {
        let v = lines.line(j);
        let w = op.matvec(&v);
        let nw = crate::linalg::norm(&w);
        if nw < 1e-9 {
            return Err(Error::InvalidInput("operator annihilated a line".into()));
        }
        let w: Vec<f64> = w.iter().map(|x| x / nw).collect();
        image.set_column(j, &w);
    }
    let (perm, ov) = match_lines(&image, &lines.vectors);
    if ov < min_overlap {
        return Err(Error::FidelityFailure {
            fidelity: ov,
            threshold: min_overlap,
            halvings: 0,
        });
    }
    Ok(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gaudin_hamiltonians, TensorSpace};
    use crate::irrep::{Algebra, CartanElt};
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(17)
    }

    #[test]
    fn four_lines_of_two_spins() {
        let space = TensorSpace::new(Algebra::Sl2, &[vec![1], vec![1]]).unwrap();
        let chi = CartanElt(vec![0.0, 0.0]);
        let fam = gaudin_hamiltonians(&space, &[1.0, 0.0], &chi).unwrap();
        let block = Block::full(space.dim);
        let gens = block.project_family(&fam).unwrap();
        let tol = Tolerances::default();
        let lines = joint_eigenlines(&gens, &mut rng(), &tol, "full").unwrap();
        assert_eq!(lines.len(), 4);
        assert!(lines.max_residual <= tol.eigen_residual);
        // expected lines: |++>, |-->, (|+-> +- |-+>)/sqrt(2)
        let expected = [
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.7071067811865476, 0.7071067811865476, 0.0],
            vec![0.0, 0.7071067811865476, -0.7071067811865476, 0.0],
        ];
        for e in &expected {
            let best = (0..4)
                .map(|j| dot(e, &lines.line(j)).abs())
                .fold(0.0f64, f64::max);
            assert!(best > 1.0 - 1e-10, "missing expected line {e:?}");
        }
    }

    #[test]
    fn one_dimensional_block_is_trivial() {
        let space = TensorSpace::new(Algebra::Sl2, &[vec![1], vec![1]]).unwrap();
        let weights = space.weights();
        let block = weight_block(&weights, &[2]);
        assert_eq!(block.dim(), 1);
        let chi = CartanElt(vec![0.0, 0.0]);
        let fam = gaudin_hamiltonians(&space, &[1.0, 0.0], &chi).unwrap();
        let gens = block.project_family(&fam).unwrap();
        let lines = joint_eigenlines(&gens, &mut rng(), &Tolerances::default(), "wt2").unwrap();
        assert_eq!(lines.len(), 1);
    }

    #[test]
    fn multiplicity_blocks_of_three_spins() {
        let space = TensorSpace::new(Algebra::Sl2, &[vec![1], vec![1], vec![1]]).unwrap();
        let weights = space.weights();
        let raising = [space.delta(|v| v.e[0].clone())];
        let b3 = multiplicity_block(&weights, &[3], &raising).unwrap();
        assert_eq!(b3.dim(), 1);
        let b1 = multiplicity_block(&weights, &[1], &raising).unwrap();
        assert_eq!(b1.dim(), 2);
        let b9 = multiplicity_block(&weights, &[9], &raising).unwrap();
        assert_eq!(b9.dim(), 0);
    }

    #[test]
    fn constant_transport_is_identity() {
        let space = TensorSpace::new(Algebra::Sl2, &[vec![1], vec![1]]).unwrap();
        let chi = CartanElt(vec![0.0, 0.0]);
        let fam = gaudin_hamiltonians(&space, &[1.0, 0.0], &chi).unwrap();
        let block = Block::full(space.dim);
        let gens = block.project_family(&fam).unwrap();
        let tol = Tolerances::default();
        let mut r = rng();
        let start = joint_eigenlines(&gens, &mut r, &tol, "full").unwrap();
        let family = |_t: f64| -> Result<Vec<Mat>> { Ok(gens.clone()) };
        let (end, trail) = transport(&family, &start, &mut r, &tol, "const").unwrap();
        assert!(trail.min_overlap > 1.0 - 1e-12);
        let (perm, ov) = match_lines(&start.vectors, &end.vectors);
        assert!(ov > 1.0 - 1e-12);
        assert!(perm.iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn rescaling_path_gives_identity_permutation() {
        // z: (1,0) -> (2,0): the Hamiltonians rescale, lines are constant
        let space = TensorSpace::new(Algebra::Sl2, &[vec![1], vec![1]]).unwrap();
        let chi = CartanElt(vec![0.0, 0.0]);
        let block = Block::full(space.dim);
        let tol = Tolerances::default();
        let mut r = rng();
        let fam0 = gaudin_hamiltonians(&space, &[1.0, 0.0], &chi).unwrap();
        let start = joint_eigenlines(&block.project_family(&fam0).unwrap(), &mut r, &tol, "z").unwrap();
        let family = |t: f64| -> Result<Vec<Mat>> {
            let fam = gaudin_hamiltonians(&space, &[1.0 + t, 0.0], &chi)?;
            block.project_family(&fam)
        };
        let (end, _) = transport(&family, &start, &mut r, &tol, "rescale").unwrap();
        let (perm, ov) = match_lines(&start.vectors, &end.vectors);
        assert!(ov > 1.0 - 1e-9);
        assert!(perm.iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn reversed_path_inverts_permutation() {
        // a path with an actual crossing structure: rotate chi for a spin-1
        let space = TensorSpace::new(Algebra::Sl2, &[vec![2], vec![1]]).unwrap();
        let chi = CartanElt(vec![0.7, -0.7]);
        let block = Block::full(space.dim);
        let tol = Tolerances::default();
        let mut r = rng();
        let z0 = [1.0, 0.0];
        let z1 = [3.5, 0.0];
        let fam_at = |t: f64| -> Result<Vec<Mat>> {
            let z = [z0[0] + t * (z1[0] - z0[0]), 0.0];
            let fam = crate::families::inhomogeneous_family(&space, &z, &chi)?;
            block.project_family(&fam)
        };
        let start = joint_eigenlines(&fam_at(0.0).unwrap(), &mut r, &tol, "fwd").unwrap();
        let (fwd, _) = transport(&fam_at, &start, &mut r, &tol, "fwd").unwrap();
        let back_fam = |t: f64| -> Result<Vec<Mat>> { fam_at(1.0 - t) };
        let (back, _) = transport(&back_fam, &fwd, &mut r, &tol, "back").unwrap();
        let (perm, ov) = match_lines(&start.vectors, &back.vectors);
        assert!(ov > 0.999);
        assert!(perm.iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn induced_permutation_of_flip() {
        let space = TensorSpace::new(Algebra::Sl2, &[vec![1], vec![1]]).unwrap();
        let chi = CartanElt(vec![0.0, 0.0]);
        let fam = gaudin_hamiltonians(&space, &[1.0, -1.0], &chi).unwrap();
        let block = Block::full(space.dim);
        let gens = block.project_family(&fam).unwrap();
        let lines = joint_eigenlines(&gens, &mut rng(), &Tolerances::default(), "flip").unwrap();
        // factor flip on 2x2: swaps the middle coordinates
        let mut flip = Mat::zeros(4, 4);
        flip[(0, 0)] = 1.0;
        flip[(1, 2)] = 1.0;
        flip[(2, 1)] = 1.0;
        flip[(3, 3)] = 1.0;
        let perm = induced_permutation(&flip, &lines, 0.99).unwrap();
        // symmetric configuration: flip preserves each line
        assert!(perm.iter().enumerate().all(|(i, &j)| i == j));
    }
}

//! Commuting operator families on tensor products of irreducibles:
//! quadratic Gaudin Hamiltonians, shift-of-argument (dynamical)
//! Hamiltonians, and the composed limit families used at boundary
//! handoffs.

use crate::error::{Error, Result};
use crate::irrep::{build_irrep, Algebra, CartanElt, Irrep};
use crate::linalg::Mat;

/// Tensor product of irreducibles of one algebra, with placement helpers.
#[derive(Debug, Clone)]
pub struct TensorSpace {
    pub algebra: Algebra,
    pub factors: Vec<Irrep>,
    pub dims: Vec<usize>,
    pub dim: usize,
}

impl TensorSpace {
    pub fn new(algebra: Algebra, spins: &[Vec<i64>]) -> Result<TensorSpace> {
        let factors: Result<Vec<Irrep>> =
            spins.iter().map(|lam| build_irrep(algebra, lam)).collect();
        let factors = factors?;
        let dims: Vec<usize> = factors.iter().map(|v| v.dim).collect();
        let dim = dims.iter().product();
        Ok(TensorSpace {
            algebra,
            factors,
            dims,
            dim,
        })
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    /// Operator acting as `m` on factor k and identity elsewhere.
    pub fn place(&self, k: usize, m: &Mat) -> Mat {
        let mut out = Mat::identity(1);
        for (slot, d) in self.dims.iter().enumerate() {
            if slot == k {
                out = out.kron(m);
            } else {
                out = out.kron(&Mat::identity(*d));
            }
        }
        out
    }

    /// Sum over a subset of factors of a per-factor generator.
    pub fn delta_subset(&self, subset: &[usize], gen: impl Fn(&Irrep) -> Mat) -> Mat {
        let mut out = Mat::zeros(self.dim, self.dim);
        for &k in subset {
            out = out.add(&self.place(k, &gen(&self.factors[k])));
        }
        out
    }

    pub fn delta(&self, gen: impl Fn(&Irrep) -> Mat) -> Mat {
        let all: Vec<usize> = (0..self.n_factors()).collect();
        self.delta_subset(&all, gen)
    }

    /// Total weight (fundamental coordinates) of each tensor basis vector.
    pub fn weights(&self) -> Vec<Vec<i64>> {
        let rank = self.algebra.rank();
        let mut out = vec![vec![0i64; rank]];
        for v in &self.factors {
            let mut next = Vec::with_capacity(out.len() * v.dim);
            for w in &out {
                for x in 0..v.dim {
                    let mut nw = w.clone();
                    for r in 0..rank {
                        nw[r] += v.weights[x][r];
                    }
                    next.push(nw);
                }
            }
            out = next;
        }
        out
    }

    /// Omega between two disjoint groups of factors:
    /// sum over pairs (i in a, j in b) of sum_a x_a^{(i)} x_a^{(j)}.
    pub fn omega_sites(&self, a: &[usize], b: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.dim, self.dim);
        for &i in a {
            for &j in b {
                out = out.add(&self.omega_pair(i, j));
            }
        }
        out
    }

    /// Omega^{(ij)} for two distinct factors.
    pub fn omega_pair(&self, i: usize, j: usize) -> Mat {
        assert_ne!(i, j, "omega needs distinct factors");
        let vi = &self.factors[i];
        let vj = &self.factors[j];
        let mut out = Mat::zeros(self.dim, self.dim);
        let ri = vi.root_vectors();
        let rj = vj.root_vectors();
        for (a, b) in ri.iter().zip(rj.iter()) {
            // e^i f^j + f^i e^j
            out = out.add(&self.place(i, &a.0).matmul(&self.place(j, &b.1)));
            out = out.add(&self.place(i, &a.1).matmul(&self.place(j, &b.0)));
        }
        for (hi, hj) in vi
            .orthonormal_cartan()
            .iter()
            .zip(vj.orthonormal_cartan().iter())
        {
            out = out.add(&self.place(i, hi).matmul(&self.place(j, hj)));
        }
        out
    }

    /// D_h over a subset: sum_{alpha>0} (alpha(h)/alpha(chi))
    /// Delta_S(e_alpha) Delta_S(f_alpha).
    pub fn dynamical_part(&self, subset: &[usize], h: &CartanElt, chi: &CartanElt) -> Mat {
        let pairs = self.algebra.positive_root_pairs();
        let mut out = Mat::zeros(self.dim, self.dim);
        for (r, &pair) in pairs.iter().enumerate() {
            let num = h.root_value(pair);
            if num == 0.0 {
                continue;
            }
            let c = num / chi.root_value(pair);
            let de = self.delta_subset(subset, |v| v.root_vectors()[r].0.clone());
            let df = self.delta_subset(subset, |v| v.root_vectors()[r].1.clone());
            out = out.add(&de.matmul(&df).scale(c));
        }
        out
    }

    /// Rescaled dynamical generator alpha_i(chi) * D_{h_{alpha_i}}: extends
    /// continuously to the alpha_i = 0 wall, where it degenerates to
    /// <h_{alpha_i}, alpha_i> Delta(e_i) Delta(f_i).
    pub fn dynamical_part_rescaled(
        &self,
        subset: &[usize],
        h: &CartanElt,
        chi: &CartanElt,
        wall_pair: (usize, usize),
    ) -> Mat {
        let pairs = self.algebra.positive_root_pairs();
        let scale = chi.root_value(wall_pair);
        let mut out = Mat::zeros(self.dim, self.dim);
        for (r, &pair) in pairs.iter().enumerate() {
            let num = h.root_value(pair);
            if num == 0.0 {
                continue;
            }
            let c = if pair == wall_pair {
                // the singular term: scale/chi-value = 1 exactly
                num
            } else {
                num * scale / chi.root_value(pair)
            };
            let de = self.delta_subset(subset, |v| v.root_vectors()[r].0.clone());
            let df = self.delta_subset(subset, |v| v.root_vectors()[r].1.clone());
            out = out.add(&de.matmul(&df).scale(c));
        }
        out
    }

    pub fn cartan_matrix_of(&self, subset: &[usize], chi: &CartanElt) -> Mat {
        self.delta_subset(subset, |v| v.cartan_matrix_of(chi))
    }
}

/// Standard Cartan basis as traceless diagonal tuples.
pub fn cartan_basis(algebra: Algebra) -> Vec<CartanElt> {
    match algebra {
        Algebra::Sl2 => vec![CartanElt(vec![1.0, -1.0])],
        Algebra::Sl3 => vec![
            CartanElt(vec![1.0, -1.0, 0.0]),
            CartanElt(vec![0.0, 1.0, -1.0]),
        ],
    }
}

/// A named family of (expected-to-be) commuting symmetric operators.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    pub label: String,
    pub gens: Vec<(String, Mat)>,
}

impl OperatorFamily {
    pub fn new(label: impl Into<String>) -> OperatorFamily {
        OperatorFamily {
            label: label.into(),
            gens: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, m: Mat) {
        self.gens.push((name.into(), m));
    }

    pub fn extend(&mut self, other: &OperatorFamily) {
        self.gens.extend(other.gens.iter().cloned());
    }

    pub fn matrices(&self) -> Vec<&Mat> {
        self.gens.iter().map(|(_, m)| m).collect()
    }

    /// Pairwise commutators and hermiticity, relative Frobenius bound.
    pub fn check(&self, rel_tol: f64) -> Result<()> {
        for (name, m) in &self.gens {
            let defect = m.symmetry_defect();
            if defect > rel_tol * m.frobenius().max(1.0) {
                return Err(Error::NotCommuting(format!(
                    "{}: generator {name} not symmetric (defect {defect:.2e})",
                    self.label
                )));
            }
        }
        for i in 0..self.gens.len() {
            for j in i + 1..self.gens.len() {
                let (na, a) = &self.gens[i];
                let (nb, b) = &self.gens[j];
                let comm = a.commutator(b).frobenius();
                let bound = rel_tol * a.frobenius().max(1.0) * b.frobenius().max(1.0);
                if comm > bound {
                    return Err(Error::NotCommuting(format!(
                        "{}: [{na}, {nb}] = {comm:.3e} > {bound:.3e}",
                        self.label
                    )));
                }
            }
        }
        Ok(())
    }
}

/// KZ Gaudin Hamiltonians H_i = sum_{j != i} Omega^{(ij)}/(z_i - z_j)
/// + chi^{(i)}, together with the diagonal Cartan subalgebra.
pub fn gaudin_hamiltonians(
    space: &TensorSpace,
    z: &[f64],
    chi: &CartanElt,
) -> Result<OperatorFamily> {
    let n = space.n_factors();
    if z.len() != n {
        return Err(Error::InvalidInput("one point per factor required".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).abs() < 1e-12 {
                return Err(Error::CoincidentPoints);
            }
        }
    }
    let mut fam = OperatorFamily::new(format!("gaudin z={z:?}"));
    let mut total = Mat::zeros(space.dim, space.dim);
    for i in 0..n {
        let mut h = space.place(i, &space.factors[i].cartan_matrix_of(chi));
        for j in 0..n {
            if j != i {
                h = h.add(&space.omega_pair(i, j).scale(1.0 / (z[i] - z[j])));
            }
        }
        total = total.add(&h);
        fam.push(format!("H_{}", i + 1), h);
    }
    // sum H_i = Delta(chi), exactly up to roundoff
    let delta_chi = space.cartan_matrix_of(&(0..n).collect::<Vec<_>>(), chi);
    let defect = total.sub(&delta_chi).frobenius();
    if defect > 1e-9 * delta_chi.frobenius().max(1.0) {
        return Err(Error::NotCommuting(format!(
            "sum of Hamiltonians misses Delta(chi) by {defect:.2e}"
        )));
    }
    for (k, h) in cartan_basis(space.algebra).iter().enumerate() {
        fam.push(
            format!("Dh_{}", k + 1),
            space.cartan_matrix_of(&(0..n).collect::<Vec<_>>(), h),
        );
    }
    Ok(fam)
}

/// Dynamical Hamiltonians G_h = sum_i z_i h^{(i)} + D_h for h in a Cartan
/// basis; appended to an existing family.
pub fn dynamical_hamiltonians(
    space: &TensorSpace,
    z: &[f64],
    chi: &CartanElt,
) -> Result<OperatorFamily> {
    if !chi.is_regular(space.algebra) {
        return Err(Error::InvalidInput(
            "chi must be regular for the dynamical Hamiltonians".into(),
        ));
    }
    let n = space.n_factors();
    let all: Vec<usize> = (0..n).collect();
    let mut fam = OperatorFamily::new("dynamical");
    for (k, h) in cartan_basis(space.algebra).iter().enumerate() {
        let mut g = space.dynamical_part(&all, h, chi);
        for i in 0..n {
            g = g.add(
                &space
                    .place(i, &space.factors[i].cartan_matrix_of(h))
                    .scale(z[i]),
            );
        }
        fam.push(format!("G_{}", k + 1), g);
    }
    Ok(fam)
}

/// The full inhomogeneous quadratic family at (z, chi): Gaudin Hamiltonians,
/// diagonal Cartan, and dynamical Hamiltonians.
pub fn inhomogeneous_family(
    space: &TensorSpace,
    z: &[f64],
    chi: &CartanElt,
) -> Result<OperatorFamily> {
    let mut fam = gaudin_hamiltonians(space, z, chi)?;
    fam.extend(&dynamical_hamiltonians(space, z, chi)?);
    Ok(fam)
}

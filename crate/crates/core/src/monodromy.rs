//! Monodromy of Gaudin / shift-of-argument eigenlines: crystal structures
//! on eigenline sets, internal and external cactus generators, the tensor
//! transport between spread and clustered configurations, and the
//! five-edge pentagon loop.
//!
//! Conventions.  A generator s acting at a base point with w-invariant
//! far point decomposes as P^{-1} o rho(w)^{-1} o P: transport to the
//! invariant point, act by the lifted symmetry, transport back.  Transports
//! keep the output aligned with the input ordering, so the middle action
//! read in aligned indices is already the whole monodromy permutation.

use crate::crystal::Crystal;
use crate::eigen::{
    handoff_match, induced_permutation, joint_eigenlines, match_lines, multiplicity_block,
    transport, Block, EigenlineSet, Tolerances, TransportTrail,
};
use crate::error::{Error, Result};
use crate::families::{cartan_basis, OperatorFamily, TensorSpace};
use crate::irrep::{Algebra, CartanElt};
use crate::linalg::{norm, Mat};
use crate::rootdata::{build_root_system, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Run-level knobs shared by every monodromy computation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: Tolerances,
    /// cluster width for boundary handoffs
    pub delta_star: f64,
    /// spread/clustered parameters for two-site transports
    pub z_max: f64,
    pub z_min: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            tol: Tolerances::default(),
            delta_star: 1e-3,
            z_max: 64.0,
            z_min: 1.0 / 64.0,
        }
    }
}

impl RunConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub steps: usize,
    pub min_overlap: f64,
    pub min_fidelity: f64,
    pub max_residual: f64,
    pub delta_used: f64,
    pub halvings: u32,
}

impl Diagnostics {
    fn new() -> Diagnostics {
        Diagnostics {
            steps: 0,
            min_overlap: 1.0,
            min_fidelity: 1.0,
            max_residual: 0.0,
            delta_used: 0.0,
            halvings: 0,
        }
    }

    fn absorb_trail(&mut self, t: &TransportTrail) {
        self.steps += t.steps;
        self.min_overlap = self.min_overlap.min(t.min_overlap);
        self.max_residual = self.max_residual.max(t.max_residual);
        self.halvings += t.halvings;
    }

    fn absorb_fidelity(&mut self, f: f64) {
        self.min_fidelity = self.min_fidelity.min(f);
    }
}

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub perm: Vec<usize>,
    pub seed: u64,
    pub diag: Diagnostics,
}

/// Orthogonal inverse with a defect check.
fn orthogonal_inverse(m: &Mat) -> Result<Mat> {
    let t = m.transpose();
    let defect = t.matmul(m).sub(&Mat::identity(m.n_rows)).max_abs();
    if defect > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "lift is not orthogonal (defect {defect:.2e})"
        )));
    }
    Ok(t)
}

/// Wall data for a simple root of sl3 (and the degenerate sl2 case).
struct WallData {
    /// w0^{{i}}-invariant regular point of the wall face
    chi_wall: CartanElt,
    /// Cartan elements with alpha_i(h) = 0 (the nonsingular directions)
    parallel: Vec<CartanElt>,
    /// the singular direction, rescaled in transports
    singular: CartanElt,
    wall_pair: (usize, usize),
}

fn wall_data(alg: Algebra, node: usize) -> WallData {
    match (alg, node) {
        (Algebra::Sl2, 0) => WallData {
            chi_wall: CartanElt(vec![0.0, 0.0]),
            parallel: vec![],
            singular: CartanElt(vec![1.0, -1.0]),
            wall_pair: (0, 1),
        },
        (Algebra::Sl3, 0) => WallData {
            chi_wall: CartanElt(vec![0.5, 0.5, -1.0]),
            parallel: vec![CartanElt(vec![1.0, 1.0, -2.0])],
            singular: CartanElt(vec![1.0, -1.0, 0.0]),
            wall_pair: (0, 1),
        },
        (Algebra::Sl3, 1) => WallData {
            chi_wall: CartanElt(vec![1.0, -0.5, -0.5]),
            parallel: vec![CartanElt(vec![2.0, -1.0, -1.0])],
            singular: CartanElt(vec![0.0, 1.0, -1.0]),
            wall_pair: (1, 2),
        },
        _ => unreachable!("node out of range"),
    }
}

/// Family transported toward an alpha_i wall: diagonal Cartan, the
/// wall-parallel dynamical Hamiltonians, and the rescaled singular one
/// (which limits to the root sl2 Casimir data).  `frozen` generators ride
/// along unchanged.
fn chi_wall_family(
    space: &TensorSpace,
    chi0: &CartanElt,
    wall: &WallData,
    frozen: &[Mat],
    t: f64,
) -> Vec<Mat> {
    let all: Vec<usize> = (0..space.n_factors()).collect();
    let chi_t = chi0.lerp(&wall.chi_wall, t);
    let mut gens: Vec<Mat> = Vec::new();
    for h in cartan_basis(space.algebra) {
        gens.push(space.cartan_matrix_of(&all, &h));
    }
    for h in &wall.parallel {
        gens.push(space.dynamical_part(&all, h, &chi_t));
    }
    gens.push(space.dynamical_part_rescaled(&all, &wall.singular, &chi_t, wall.wall_pair));
    gens.extend(frozen.iter().cloned());
    gens
}

/// The quadratic shift-of-argument family at a regular chi (with optional
/// frozen extras).
fn chi_point_family(space: &TensorSpace, chi: &CartanElt, frozen: &[Mat]) -> Vec<Mat> {
    let all: Vec<usize> = (0..space.n_factors()).collect();
    let mut gens: Vec<Mat> = Vec::new();
    for h in cartan_basis(space.algebra) {
        gens.push(space.cartan_matrix_of(&all, &h));
    }
    for h in cartan_basis(space.algebra) {
        gens.push(space.dynamical_part(&all, &h, chi));
    }
    gens.extend(frozen.iter().cloned());
    gens
}

/// Integer weight labels of a line set from the diagonal Cartan matrices.
fn line_weights(space: &TensorSpace, lines: &EigenlineSet, block: &Block) -> Result<Vec<Vec<i64>>> {
    let all: Vec<usize> = (0..space.n_factors()).collect();
    let cartans: Vec<Mat> = cartan_basis(space.algebra)
        .iter()
        .map(|h| space.cartan_matrix_of(&all, h))
        .collect();
    let mut out = Vec::with_capacity(lines.len());
    for j in 0..lines.len() {
        let v = block.basis.matvec(&lines.line(j));
        let mut wt = Vec::with_capacity(cartans.len());
        for c in &cartans {
            let val = crate::linalg::dot(&v, &c.matvec(&v));
            let rounded = val.round();
            if (val - rounded).abs() > 1e-6 {
                return Err(Error::InvalidInput(format!(
                    "line {j} has non-integral weight label {val}"
                )));
            }
            wt.push(rounded as i64);
        }
        out.push(wt);
    }
    Ok(out)
}

/// Crystal operators on a line set obtained by transporting to each wall,
/// applying a raw operator pair there, and reading the result in aligned
/// indices.  rank-1 algebras skip the transport (the base is its own wall).
fn crystal_ops_by_wall(
    space: &TensorSpace,
    chi: &CartanElt,
    base: &EigenlineSet,
    frozen: &[Mat],
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
    diag: &mut Diagnostics,
) -> Result<(Vec<Vec<Option<u32>>>, Vec<Vec<Option<u32>>>)> {
    let rank = space.algebra.rank();
    let all: Vec<usize> = (0..space.n_factors()).collect();
    let k = base.len();
    let mut e_ops = vec![vec![None; k]; rank];
    let mut f_ops = vec![vec![None; k]; rank];
    for i in 0..rank {
        let wall = wall_data(space.algebra, i);
        let wall_lines = if rank == 1 {
            base.clone()
        } else {
            let fam = |t: f64| -> Result<Vec<Mat>> {
                Ok(chi_wall_family(space, chi, &wall, frozen, t))
            };
            let (lines, trail) = transport(&fam, base, rng, &cfg.tol, &format!("wall {i}"))?;
            diag.absorb_trail(&trail);
            lines
        };
        let e_mat = space.delta_subset(&all, |v| v.e[i].clone());
        let f_mat = space.delta_subset(&all, |v| v.f[i].clone());
        for (mat, ops) in [(&e_mat, &mut e_ops), (&f_mat, &mut f_ops)] {
            let zero_tol = 1e-6 * mat.frobenius().max(1.0);
            for j in 0..k {
                let v = wall_lines.line(j);
                let w = mat.matvec(&v);
                let nw = norm(&w);
                if nw < zero_tol {
                    continue;
                }
                let w: Vec<f64> = w.iter().map(|x| x / nw).collect();
                // identify the image among the wall lines
                let mut best = (usize::MAX, 0.0f64);
                for cand in 0..k {
                    let ov = crate::linalg::dot(&w, &wall_lines.line(cand)).abs();
                    if ov > best.1 {
                        best = (cand, ov);
                    }
                }
                if best.1 < cfg.tol.handoff_fidelity {
                    return Err(Error::FidelityFailure {
                        fidelity: best.1,
                        threshold: cfg.tol.handoff_fidelity,
                        halvings: 0,
                    });
                }
                diag.absorb_fidelity(best.1);
                ops[i][j] = Some(best.0 as u32);
            }
        }
    }
    Ok((e_ops, f_ops))
}

/// The crystal structure on the shift-of-argument eigenlines of V(lambda).
pub struct EigenlineCrystal {
    pub space: TensorSpace,
    pub chi: CartanElt,
    pub lines: EigenlineSet,
    pub crystal: Crystal,
    pub diag: Diagnostics,
}

pub fn eigenline_crystal(
    alg: Algebra,
    lambda: &[i64],
    chi: &CartanElt,
    cfg: &RunConfig,
) -> Result<EigenlineCrystal> {
    let space = TensorSpace::new(alg, &[lambda.to_vec()])?;
    let mut rng = cfg.rng();
    let mut diag = Diagnostics::new();
    let fam = chi_point_family(&space, chi, &[]);
    check_family(&space, &fam, &cfg.tol)?;
    let lines = joint_eigenlines(&fam, &mut rng, &cfg.tol, "E_chi(lambda)")?;
    diag.max_residual = diag.max_residual.max(lines.max_residual);
    let (e_ops, f_ops) =
        crystal_ops_by_wall(&space, chi, &lines, &[], cfg, &mut rng, &mut diag)?;
    let block = Block::full(space.dim);
    let wts = line_weights(&space, &lines, &block)?;
    let rs = build_root_system(alg.dynkin_label())?;
    let crystal = Crystal::from_raw(
        rs,
        wts.iter().map(|w| Weight::from_ints(w)).collect(),
        e_ops,
        f_ops,
    );
    if !crystal.verify_partial_inverse() {
        return Err(Error::NotNormal(
            "eigenline operators are not mutually inverse".into(),
        ));
    }
    Ok(EigenlineCrystal {
        space,
        chi: chi.clone(),
        lines,
        crystal,
        diag,
    })
}

fn check_family(space: &TensorSpace, gens: &[Mat], tol: &Tolerances) -> Result<()> {
    let mut fam = OperatorFamily::new("family");
    for (k, g) in gens.iter().enumerate() {
        fam.push(format!("g{k}"), g.clone());
    }
    let _ = space;
    fam.check(tol.commutator_rel)
}

/// Monodromy of an internal cactus generator s_J on the eigenlines of
/// V(lambda) at a regular dominant chi with w0(chi) = -chi.
pub fn monodromy_internal(
    alg: Algebra,
    lambda: &[i64],
    chi: &CartanElt,
    subset: &[usize],
    cfg: &RunConfig,
) -> Result<MonodromyResult> {
    let space = TensorSpace::new(alg, &[lambda.to_vec()])?;
    let rank = alg.rank();
    let mut sorted: Vec<usize> = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() || sorted.iter().any(|&j| j >= rank) {
        return Err(Error::BadSubset(subset.to_vec()));
    }
    let mut rng = cfg.rng();
    let mut diag = Diagnostics::new();
    let fam = chi_point_family(&space, chi, &[]);
    check_family(&space, &fam, &cfg.tol)?;
    let base = joint_eigenlines(&fam, &mut rng, &cfg.tol, "E_chi(lambda)")?;
    diag.max_residual = base.max_residual;

    let full: Vec<usize> = (0..rank).collect();
    let perm = if sorted == full {
        // constant path: the action of rho(w0)^{-1}
        let rs = build_root_system(alg.dynkin_label())?;
        let word = rs.longest_element(&full)?;
        let lift = space.factors[0].weyl_lift(&word.0);
        let lift_inv = orthogonal_inverse(&lift)?;
        induced_permutation(&lift_inv, &base, cfg.tol.handoff_fidelity)?
    } else if sorted.len() == 1 {
        let i = sorted[0];
        let wall = wall_data(alg, i);
        let wall_lines = if rank == 1 {
            base.clone()
        } else {
            let famf = |t: f64| -> Result<Vec<Mat>> {
                Ok(chi_wall_family(&space, chi, &wall, &[], t))
            };
            let (lines, trail) = transport(&famf, &base, &mut rng, &cfg.tol, "to wall")?;
            diag.absorb_trail(&trail);
            lines
        };
        let lift = space.factors[0].simple_reflection_lift(i);
        let lift_inv = orthogonal_inverse(&lift)?;
        induced_permutation(&lift_inv, &wall_lines, cfg.tol.handoff_fidelity)?
    } else {
        return Err(Error::InvalidInput(
            "internal monodromy supports J = I or |J| = 1 (covering the sl2/sl3 suite)".into(),
        ));
    };
    Ok(MonodromyResult {
        perm,
        seed: cfg.seed,
        diag,
    })
}

/// Reversal of the tensor factors p..q (1-based) as an ambient matrix;
/// factors inside the block must have equal dimension.
pub(crate) fn reversal_matrix(space: &TensorSpace, p: usize, q: usize) -> Result<Mat> {
    for k in (p - 1)..q {
        if space.dims[k] != space.dims[p - 1] {
            return Err(Error::InvalidInput(
                "factor reversal needs equal-dimensional factors in the block".into(),
            ));
        }
    }
    let dim = space.dim;
    let mut out = Mat::zeros(dim, dim);
    for x in 0..dim {
        // decode mixed-radix tuple, leftmost most significant
        let mut tuple = vec![0usize; space.n_factors()];
        let mut rest = x;
        for (k, &d) in space.dims.iter().enumerate().rev() {
            tuple[k] = rest % d;
            rest /= d;
        }
        tuple[(p - 1)..q].reverse();
        let mut y = 0usize;
        for (k, &d) in space.dims.iter().enumerate() {
            y = y * d + tuple[k];
        }
        out[(y, x)] = 1.0;
    }
    Ok(out)
}

/// Gaudin family (chi = 0) on the multiplicity block.
pub(crate) fn gaudin_block_family(
    space: &TensorSpace,
    block: &Block,
    z: &[f64],
) -> Result<Vec<Mat>> {
    let chi0 = CartanElt(vec![0.0; space.algebra.matrix_size()]);
    let fam = crate::families::gaudin_hamiltonians(space, z, &chi0)?;
    block.project_family(&fam)
}

/// The composed (clustered) limit family on the multiplicity block: inner
/// Gaudin data of the cluster plus outer Gaudin data with the cluster as
/// one site.
pub(crate) fn cluster_limit_family(
    space: &TensorSpace,
    block: &Block,
    z: &[f64],
    p: usize,
    q: usize,
) -> Result<Vec<Mat>> {
    let n = space.n_factors();
    let cluster: Vec<usize> = ((p - 1)..q).collect();
    let outside: Vec<usize> = (0..n).filter(|k| !cluster.contains(k)).collect();
    let mid = (z[p - 1] + z[q - 1]) / 2.0;
    let mut gens: Vec<Mat> = Vec::new();
    // inner total Omega (Casimir-equivalent label for the cluster rep)
    let mut inner_total = Mat::zeros(space.dim, space.dim);
    for a in 0..cluster.len() {
        for b in a + 1..cluster.len() {
            inner_total = inner_total.add(&space.omega_pair(cluster[a], cluster[b]));
        }
    }
    gens.push(inner_total);
    // inner Gaudin Hamiltonians at the true clustered positions
    if cluster.len() > 2 {
        for &j in &cluster {
            let mut h = Mat::zeros(space.dim, space.dim);
            for &l in &cluster {
                if l != j {
                    h = h.add(&space.omega_pair(j, l).scale(1.0 / (z[j] - z[l])));
                }
            }
            gens.push(h);
        }
    }
    // outer Gaudin with the cluster collapsed to its midpoint
    for &i in &outside {
        let mut h = Mat::zeros(space.dim, space.dim);
        for &j in &outside {
            if j != i {
                h = h.add(&space.omega_pair(i, j).scale(1.0 / (z[i] - z[j])));
            }
        }
        h = h.add(&space.omega_sites(&[i], &cluster).scale(1.0 / (z[i] - mid)));
        gens.push(h);
    }
    gens.iter().map(|g| block.project(g)).collect()
}

/// Monodromy of the external generator s_pq on the multiplicity set
/// E(lambda_1, ..., lambda_n)^mu.
pub fn monodromy_external(
    alg: Algebra,
    spins: &[Vec<i64>],
    mu: &[i64],
    base_z: &[f64],
    p: usize,
    q: usize,
    cfg: &RunConfig,
) -> Result<MonodromyResult> {
    let space = TensorSpace::new(alg, spins)?;
    let n = space.n_factors();
    let weights = space.weights();
    let raising: Vec<Mat> = (0..alg.rank())
        .map(|i| space.delta_subset(&(0..n).collect::<Vec<_>>(), |v| v.e[i].clone()))
        .collect();
    let block = multiplicity_block(&weights, mu, &raising)?;
    if block.dim() == 0 {
        return Ok(MonodromyResult {
            perm: vec![],
            seed: cfg.seed,
            diag: Diagnostics::new(),
        });
    }
    let mut rng = cfg.rng();
    let mut diag = Diagnostics::new();
    let base_fam = gaudin_block_family(&space, &block, base_z)?;
    let base = joint_eigenlines(&base_fam, &mut rng, &cfg.tol, "E(lambda)^mu")?;
    diag.max_residual = base.max_residual;
    let rev = block.project(&reversal_matrix(&space, p, q)?)?;

    let k = q - p + 1;
    if k == n {
        // interior path to the symmetric configuration, then the reversal
        let schedule = crate::schedule::cactus_path_schedule(n, p, q, base_z, cfg.delta_star)?;
        let wall_lines = if schedule.segments.is_empty() {
            base.clone()
        } else {
            let seg = schedule.segments[0].clone();
            let famf = |t: f64| -> Result<Vec<Mat>> {
                gaudin_block_family(&space, &block, &seg.at(t))
            };
            let (lines, trail) = transport(&famf, &base, &mut rng, &cfg.tol, "to symmetric")?;
            diag.absorb_trail(&trail);
            lines
        };
        let perm = induced_permutation(&rev, &wall_lines, cfg.tol.handoff_fidelity)?;
        return Ok(MonodromyResult {
            perm,
            seed: cfg.seed,
            diag,
        });
    }

    // proper cluster: transport inward, hand off to the product basis,
    // reverse the cluster, come back; delta halves on fidelity failure
    let mut delta = cfg.delta_star;
    let mut halvings = 0u32;
    loop {
        let schedule = crate::schedule::cactus_path_schedule(n, p, q, base_z, delta)?;
        let seg = schedule.segments[0].clone();
        let famf =
            |t: f64| -> Result<Vec<Mat>> { gaudin_block_family(&space, &block, &seg.at(t)) };
        let mut attempt_diag = diag.clone();
        let attempt = (|| -> Result<(Vec<usize>, Diagnostics)> {
            let mut rng_a = cfg.rng();
            let mut d = Diagnostics::new();
            d.max_residual = attempt_diag.max_residual;
            let base_a = joint_eigenlines(&base_fam, &mut rng_a, &cfg.tol, "E(lambda)^mu")?;
            let (inner_lines, trail) =
                transport(&famf, &base_a, &mut rng_a, &cfg.tol, "inward")?;
            d.absorb_trail(&trail);
            let limit_gens = cluster_limit_family(&space, &block, &seg.z_end, p, q)?;
            let limit_lines =
                joint_eigenlines(&limit_gens, &mut rng_a, &cfg.tol, "cluster limit")?;
            let (to_limit, fid) = handoff_match(&inner_lines, &limit_lines, &cfg.tol)?;
            d.absorb_fidelity(fid);
            // reversal acts within the limit basis
            let rev_on_limit = induced_permutation(&rev, &limit_lines, cfg.tol.handoff_fidelity)?;
            // net permutation in base indices: through the handoff and back
            let mut from_limit = vec![0usize; to_limit.len()];
            for (a, &b) in to_limit.iter().enumerate() {
                from_limit[b] = a;
            }
            let perm: Vec<usize> = (0..base_a.len())
                .map(|j| from_limit[rev_on_limit[to_limit[j]]])
                .collect();
            Ok((perm, d))
        })();
        match attempt {
            Ok((perm, d)) => {
                attempt_diag.steps += d.steps;
                attempt_diag.min_overlap = attempt_diag.min_overlap.min(d.min_overlap);
                attempt_diag.min_fidelity = attempt_diag.min_fidelity.min(d.min_fidelity);
                attempt_diag.max_residual = attempt_diag.max_residual.max(d.max_residual);
                attempt_diag.delta_used = delta;
                attempt_diag.halvings = halvings;
                return Ok(MonodromyResult {
                    perm,
                    seed: cfg.seed,
                    diag: attempt_diag,
                });
            }
            Err(Error::FidelityFailure { .. }) if halvings < cfg.tol.max_delta_halvings => {
                delta /= 2.0;
                halvings += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// A two-site inhomogeneous edge A_chi(z, 0) acting on the groups `site_a`
/// (at z) and `site_b` (at 0), with frozen extras.
pub struct TwoSiteEdge {
    pub site_a: Vec<usize>,
    pub site_b: Vec<usize>,
    pub frozen: Vec<Mat>,
}

impl TwoSiteEdge {
    fn union(&self) -> Vec<usize> {
        let mut u = self.site_a.clone();
        u.extend_from_slice(&self.site_b);
        u.sort_unstable();
        u
    }

    /// Interior family at parameter z.
    pub fn family_at(&self, space: &TensorSpace, chi: &CartanElt, z: f64) -> Vec<Mat> {
        let union = self.union();
        let omega_ab = space.omega_sites(&self.site_a, &self.site_b);
        let mut gens: Vec<Mat> = Vec::new();
        for h in cartan_basis(space.algebra) {
            gens.push(space.cartan_matrix_of(&union, &h));
        }
        gens.push(
            omega_ab
                .scale(1.0 / z)
                .add(&space.cartan_matrix_of(&self.site_a, chi)),
        );
        for h in cartan_basis(space.algebra) {
            let g = space
                .cartan_matrix_of(&self.site_a, &h)
                .scale(z)
                .add(&space.dynamical_part(&union, &h, chi));
            gens.push(g);
        }
        gens.extend(self.frozen.iter().cloned());
        gens
    }

    /// Product family (the z -> infinity vertex): per-site shift-of-argument
    /// quadratic data.
    pub fn product_family(&self, space: &TensorSpace, chi: &CartanElt) -> Vec<Mat> {
        let mut gens: Vec<Mat> = Vec::new();
        for site in [&self.site_a, &self.site_b] {
            for h in cartan_basis(space.algebra) {
                gens.push(space.cartan_matrix_of(site, &h));
            }
            for h in cartan_basis(space.algebra) {
                gens.push(space.dynamical_part(site, &h, chi));
            }
        }
        gens.extend(self.frozen.iter().cloned());
        gens
    }

    /// Composed family (the z -> 0 vertex): diagonal shift-of-argument data
    /// together with the two-site Gaudin generator Omega^{(a,b)}.
    pub fn composed_family(&self, space: &TensorSpace, chi: &CartanElt) -> Vec<Mat> {
        let union = self.union();
        let mut gens: Vec<Mat> = Vec::new();
        for h in cartan_basis(space.algebra) {
            gens.push(space.cartan_matrix_of(&union, &h));
        }
        for h in cartan_basis(space.algebra) {
            gens.push(space.dynamical_part(&union, &h, chi));
        }
        gens.push(space.omega_sites(&self.site_a, &self.site_b));
        gens.extend(self.frozen.iter().cloned());
        gens
    }
}

/// Align a freshly diagonalized line set with a reference ordering.
/// Returns the aligned set and the fidelity of the identification.
pub(crate) fn align_to(reference: &EigenlineSet, fresh: &EigenlineSet) -> (EigenlineSet, f64) {
    let (perm, fid) = match_lines(&reference.vectors, &fresh.vectors);
    let k = fresh.len();
    let mut vectors = Mat::zeros(k, k);
    let mut labels = vec![vec![]; k];
    for j in 0..k {
        let src = perm[j];
        let mut col = fresh.vectors.column(src);
        if crate::linalg::dot(&reference.vectors.column(j), &col) < 0.0 {
            for c in col.iter_mut() {
                *c = -*c;
            }
        }
        vectors.set_column(j, &col);
        labels[j] = fresh.labels[src].clone();
    }
    (
        EigenlineSet {
            vectors,
            labels,
            max_residual: fresh.max_residual,
        },
        fid,
    )
}

/// Transport along a two-site edge from the product end (z = z_max) to the
/// composed end (z = z_min), starting from lines aligned at the product
/// vertex.  Returns the lines aligned at the composed vertex.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_two_site_edge(
    space: &TensorSpace,
    edge: &TwoSiteEdge,
    chi: &CartanElt,
    start_vertex_lines: &EigenlineSet,
    downward: bool,
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
    diag: &mut Diagnostics,
) -> Result<EigenlineSet> {
    let (z_from, z_to) = if downward {
        (cfg.z_max, cfg.z_min)
    } else {
        (cfg.z_min, cfg.z_max)
    };
    // enter the edge: identify the vertex basis with the interior lines
    let start_gens = edge.family_at(space, chi, z_from);
    let fresh = joint_eigenlines(&start_gens, rng, &cfg.tol, "edge start")?;
    let (start, fid) = align_to(start_vertex_lines, &fresh);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    diag.absorb_fidelity(fid);
    // geometric path in z
    let ratio = z_to / z_from;
    let famf = |t: f64| -> Result<Vec<Mat>> {
        let z = z_from * ratio.powf(t);
        Ok(edge.family_at(space, chi, z))
    };
    let (end, trail) = transport(&famf, &start, rng, &cfg.tol, "two-site edge")?;
    diag.absorb_trail(&trail);
    // leave the edge: hand off to the far vertex family
    let far_gens = if downward {
        edge.composed_family(space, chi)
    } else {
        edge.product_family(space, chi)
    };
    let far_fresh = joint_eigenlines(&far_gens, rng, &cfg.tol, "edge end")?;
    let (far, fid) = align_to(&end, &far_fresh);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    diag.absorb_fidelity(fid);
    Ok(far)
}

/// The tensor transport p_{infinity, 0} for a pair of irreducibles:
/// from products of shift-of-argument eigenlines to the clustered basis,
/// with crystal structures on both ends and the connecting bijection.
pub struct TensorTransportResult {
    /// tensor product of the two eigenline crystals (flat labels)
    pub lhs: Crystal,
    /// crystal on the composed-side lines (chi-transport structure)
    pub rhs: Crystal,
    /// map lhs flat label -> rhs line index
    pub map: Vec<usize>,
    /// the composed-side lines themselves (full-space coordinates)
    pub rhs_lines: EigenlineSet,
    /// per rhs line: eigenvalue of Omega (labels the mu component)
    pub rhs_omega: Vec<f64>,
    /// per lhs flat label: weight of the first factor line (order checks)
    pub lhs_first_weight: Vec<Vec<i64>>,
    pub diag: Diagnostics,
}

pub fn tensor_transport(
    alg: Algebra,
    lam1: &[i64],
    lam2: &[i64],
    chi: &CartanElt,
    cfg: &RunConfig,
) -> Result<TensorTransportResult> {
    let mut diag = Diagnostics::new();
    let mut rng = cfg.rng();
    // per-factor eigenline crystals
    let ec1 = eigenline_crystal(alg, lam1, chi, cfg)?;
    let ec2 = eigenline_crystal(alg, lam2, chi, cfg)?;
    let lhs = Crystal::tensor(&ec1.crystal, &ec2.crystal)?;

    let space = TensorSpace::new(alg, &[lam1.to_vec(), lam2.to_vec()])?;
    let edge = TwoSiteEdge {
        site_a: vec![0],
        site_b: vec![1],
        frozen: vec![],
    };
    // product lines in the fixed (j1, j2) order
    let d2 = ec2.lines.len();
    let kk = space.dim;
    let mut prod_vectors = Mat::zeros(kk, kk);
    for j1 in 0..ec1.lines.len() {
        let v1 = ec1.lines.line(j1);
        for j2 in 0..d2 {
            let v2 = ec2.lines.line(j2);
            let mut col = vec![0.0; kk];
            for (a, &x) in v1.iter().enumerate() {
                for (b, &y) in v2.iter().enumerate() {
                    col[a * d2 + b] = x * y;
                }
            }
            prod_vectors.set_column(j1 * d2 + j2, &col);
        }
    }
    let product_ordered = EigenlineSet {
        vectors: prod_vectors,
        labels: vec![vec![]; kk],
        max_residual: 0.0,
    };
    // cross-check against the product vertex family, then run the edge
    let pv = joint_eigenlines(&edge.product_family(&space, chi), &mut rng, &cfg.tol, "products")?;
    let (product_lines, fid) = align_to(&product_ordered, &pv);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    diag.absorb_fidelity(fid);
    let composed = run_two_site_edge(
        &space,
        &edge,
        chi,
        &product_lines,
        true,
        cfg,
        &mut rng,
        &mut diag,
    )?;
    // crystal structure on the composed lines: chi-wall transports with the
    // Gaudin generator frozen
    let omega = space.omega_sites(&[0], &[1]);
    let frozen = vec![omega.clone()];
    let (e_ops, f_ops) =
        crystal_ops_by_wall(&space, chi, &composed, &frozen, cfg, &mut rng, &mut diag)?;
    let block = Block::full(space.dim);
    let wts = line_weights(&space, &composed, &block)?;
    let rs = build_root_system(alg.dynkin_label())?;
    let rhs = Crystal::from_raw(
        rs,
        wts.iter().map(|w| Weight::from_ints(w)).collect(),
        e_ops,
        f_ops,
    );
    let rhs_omega: Vec<f64> = (0..composed.len())
        .map(|j| {
            let v = composed.line(j);
            crate::linalg::dot(&v, &omega.matvec(&v))
        })
        .collect();
    let lhs_first_weight: Vec<Vec<i64>> = (0..kk)
        .map(|x| {
            let j1 = x / d2;
            ec1.crystal
                .weight(j1)
                .int_coords()
                .expect("integral weights")
        })
        .collect();
    // the map on indices is the alignment itself (column x of `composed`
    // continues product line x)
    Ok(TensorTransportResult {
        lhs,
        rhs,
        map: (0..kk).collect(),
        rhs_lines: composed,
        rhs_omega,
        lhs_first_weight,
        diag,
    })
}

/// Pentagon report: the five-edge loop composite on the triple-product
/// eigenlines.
pub struct PentagonReport {
    pub perm: Vec<usize>,
    pub identity: bool,
    pub diag: Diagnostics,
}

pub fn pentagon(
    alg: Algebra,
    spins: &[Vec<i64>],
    chi: &CartanElt,
    cfg: &RunConfig,
) -> Result<PentagonReport> {
    if spins.len() != 3 {
        return Err(Error::InvalidInput("the pentagon needs three factors".into()));
    }
    let space = TensorSpace::new(alg, spins)?;
    let mut rng = cfg.rng();
    let mut diag = Diagnostics::new();

    let e1 = TwoSiteEdge {
        site_a: vec![1],
        site_b: vec![2],
        frozen: single_site_frozen(&space, chi, 0),
    };
    let omega12 = space.omega_sites(&[1], &[2]);
    let e2 = TwoSiteEdge {
        site_a: vec![0],
        site_b: vec![1, 2],
        frozen: vec![omega12.clone()],
    };
    let omega01 = space.omega_sites(&[0], &[1]);
    let e4 = TwoSiteEdge {
        site_a: vec![0, 1],
        site_b: vec![2],
        frozen: vec![omega01.clone()],
    };
    let e5 = TwoSiteEdge {
        site_a: vec![0],
        site_b: vec![1],
        frozen: single_site_frozen(&space, chi, 2),
    };

    // V3: full product vertex
    let v3_gens = e1.product_family(&space, chi); // = per-site data for 1,2 + site-0 frozen
    check_family(&space, &v3_gens, &cfg.tol)?;
    let v3 = joint_eigenlines(&v3_gens, &mut rng, &cfg.tol, "V3")?;
    diag.max_residual = v3.max_residual;

    // E1: V3 -> V2 (cluster factors 1,2)
    let v2 = run_two_site_edge(&space, &e1, chi, &v3, true, cfg, &mut rng, &mut diag)?;
    // E2: V2 -> V1 (all together)
    let v1 = run_two_site_edge(&space, &e2, chi, &v2, true, cfg, &mut rng, &mut diag)?;
    // E3: the Gaudin path between the two bracketings, z(s) = (1, s, 0)
    let v5 = run_gaudin_bridge(&space, chi, &v1, cfg, &mut rng, &mut diag)?;
    // E4: V5 -> V4 (uncluster factor 2 away from {0,1})
    let v4 = run_two_site_edge(&space, &e4, chi, &v5, false, cfg, &mut rng, &mut diag)?;
    // E5: V4 -> V3 (uncluster {0,1})
    let v3_back = run_two_site_edge(&space, &e5, chi, &v4, false, cfg, &mut rng, &mut diag)?;

    // close the loop
    let (perm_back, fid) = match_lines(&v3_back.vectors, &v3.vectors);
    diag.absorb_fidelity(fid);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    let identity = perm_back.iter().enumerate().all(|(a, &b)| a == b);
    Ok(PentagonReport {
        perm: perm_back,
        identity,
        diag,
    })
}

pub(crate) fn single_site_frozen(space: &TensorSpace, chi: &CartanElt, site: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    for h in cartan_basis(space.algebra) {
        out.push(space.cartan_matrix_of(&[site], &h));
    }
    for h in cartan_basis(space.algebra) {
        out.push(space.dynamical_part(&[site], &h, chi));
    }
    out
}

/// The E3 edge: Delta(A_chi) . A(1, s, 0) from the (0(12)) boundary at
/// s -> 0 to the ((01)2) boundary at s -> 1.
fn run_gaudin_bridge(
    space: &TensorSpace,
    chi: &CartanElt,
    v1_lines: &EigenlineSet,
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
    diag: &mut Diagnostics,
) -> Result<EigenlineSet> {
    let all: Vec<usize> = (0..3).collect();
    let s_margin = cfg.z_min.min(0.25);
    let family_at = |s: f64| -> Vec<Mat> {
        let z = [1.0, s, 0.0];
        let mut gens: Vec<Mat> = Vec::new();
        for h in cartan_basis(space.algebra) {
            gens.push(space.cartan_matrix_of(&all, &h));
        }
        for h in cartan_basis(space.algebra) {
            gens.push(space.dynamical_part(&all, &h, chi));
        }
        for i in 0..3 {
            let mut hdl = Mat::zeros(space.dim, space.dim);
            for j in 0..3 {
                if j != i {
                    hdl = hdl.add(&space.omega_pair(i, j).scale(1.0 / (z[i] - z[j])));
                }
            }
            gens.push(hdl);
        }
        gens
    };
    // enter at s = s_margin
    let fresh = joint_eigenlines(&family_at(s_margin), rng, &cfg.tol, "bridge start")?;
    let (start, fid) = align_to(v1_lines, &fresh);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    diag.absorb_fidelity(fid);
    let famf = |t: f64| -> Result<Vec<Mat>> {
        Ok(family_at(s_margin + t * (1.0 - 2.0 * s_margin)))
    };
    let (end, trail) = transport(&famf, &start, rng, &cfg.tol, "gaudin bridge")?;
    diag.absorb_trail(&trail);
    // exit at the V5 vertex: composed family of the (0,1)-cluster edge
    let omega01 = space.omega_sites(&[0], &[1]);
    let e4 = TwoSiteEdge {
        site_a: vec![0, 1],
        site_b: vec![2],
        frozen: vec![omega01],
    };
    let v5_fresh = joint_eigenlines(&e4.composed_family(space, chi), rng, &cfg.tol, "V5")?;
    let (v5, fid) = align_to(&end, &v5_fresh);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    diag.absorb_fidelity(fid);
    Ok(v5)
}

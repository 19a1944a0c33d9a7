//! Verification harness: compares crystal-theoretic cactus actions with
//! the monodromy of eigenline coverings, case by case, and emits
//! machine-readable reports.
//!
//! Outcomes distinguish `Mismatch` (both sides computed, permutations
//! differ) from `Inconclusive` (a runtime assertion failed: simple
//! spectrum, handoff fidelity, step collapse).  They are never conflated.

use crate::cactus::{external_cactus_action, CactusWord};
use crate::crystal::Crystal;
use crate::eigen::{joint_eigenlines, transport, Block, EigenlineSet};
use crate::error::{Error, Result};
use crate::families::TensorSpace;
use crate::involution::{commutor, partial_schutzenberger};
use crate::irrep::{Algebra, CartanElt};
use crate::jsonout::JVal;
use crate::linalg::{dot, norm, Mat};
use crate::monodromy::{
    align_to, eigenline_crystal, gaudin_block_family, monodromy_external, monodromy_internal,
    run_two_site_edge, single_site_frozen, tensor_transport, Diagnostics, RunConfig,
    TwoSiteEdge,
};
use crate::rootdata::{build_root_system, Weight};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Equal,
    Mismatch,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Equal => "equal",
            Outcome::Mismatch => "mismatch",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub case_id: String,
    pub claim: String,
    pub crystal_perm: Vec<usize>,
    pub monodromy_perm: Vec<usize>,
    pub outcome: Outcome,
    pub detail: String,
    pub seed: u64,
    pub wall_ms: u128,
    pub diag: Diagnostics,
}

impl VerificationReport {
    pub fn to_json(&self) -> JVal {
        JVal::obj(vec![
            ("id", JVal::str(&self.case_id)),
            ("claim", JVal::str(&self.claim)),
            ("outcome", JVal::str(self.outcome.as_str())),
            ("crystal_perm", JVal::usizes(&self.crystal_perm)),
            ("monodromy_perm", JVal::usizes(&self.monodromy_perm)),
            ("detail", JVal::str(&self.detail)),
            ("seed", JVal::Int(self.seed as i64)),
            ("wall_ms", JVal::Int(self.wall_ms as i64)),
            (
                "diagnostics",
                JVal::obj(vec![
                    ("steps", JVal::Int(self.diag.steps as i64)),
                    ("min_overlap", JVal::Float(self.diag.min_overlap)),
                    ("min_fidelity", JVal::Float(self.diag.min_fidelity)),
                    ("max_residual", JVal::Float(self.diag.max_residual)),
                    ("delta_used", JVal::Float(self.diag.delta_used)),
                    ("halvings", JVal::Int(self.diag.halvings as i64)),
                ]),
            ),
        ])
    }
}

fn classify(e: &Error) -> Outcome {
    match e {
        Error::SimpleSpectrumViolation { .. }
        | Error::FidelityFailure { .. }
        | Error::StepCollapse { .. }
        | Error::ResidualTooLarge { .. } => Outcome::Inconclusive,
        _ => Outcome::Inconclusive,
    }
}

fn standard_chi(alg: Algebra) -> CartanElt {
    // regular dominant with w0(chi) = -chi
    match alg {
        Algebra::Sl2 => CartanElt(vec![1.0, -1.0]),
        Algebra::Sl3 => CartanElt(vec![1.0, 0.0, -1.0]),
    }
}

/// Internal comparison: monodromy of s_J against the partial
/// Schützenberger involution, through the eigenline crystal (the
/// identification with B(lambda) is the unique crystal isomorphism, so
/// computing xi_J directly on the eigenline crystal is the transported
/// crystal action).
pub fn verify_etingof_internal(
    alg: Algebra,
    lambda: &[i64],
    subset: &[usize],
    cfg: &RunConfig,
) -> VerificationReport {
    let start = Instant::now();
    let case_id = format!(
        "internal {alg} lambda={lambda:?} J={:?}",
        subset.iter().map(|j| j + 1).collect::<Vec<_>>()
    );
    let claim = "monodromy of s_J equals the partial Schützenberger involution".to_string();
    let chi = standard_chi(alg);
    let run = (|| -> Result<(Vec<usize>, Vec<usize>, Diagnostics)> {
        let ec = eigenline_crystal(alg, lambda, &chi, cfg)?;
        if let Err(w) = ec.crystal.check_normal() {
            return Err(Error::NotNormal(format!(
                "eigenline crystal failed normality at element {}: {}",
                w.element, w.reason
            )));
        }
        let rs = build_root_system(alg.dynkin_label())?;
        let model = Crystal::generate(&rs, &Weight::from_ints(lambda))?;
        if ec.crystal.isomorphism(&model).is_none() {
            return Err(Error::NotNormal(
                "eigenline crystal not isomorphic to B(lambda)".into(),
            ));
        }
        let xi = partial_schutzenberger(&ec.crystal, subset)?;
        let mono = monodromy_internal(alg, lambda, &chi, subset, cfg)?;
        let mut diag = ec.diag.clone();
        diag.steps += mono.diag.steps;
        diag.min_overlap = diag.min_overlap.min(mono.diag.min_overlap);
        diag.min_fidelity = diag.min_fidelity.min(mono.diag.min_fidelity);
        diag.max_residual = diag.max_residual.max(mono.diag.max_residual);
        Ok((xi.perm, mono.perm, diag))
    })();
    match run {
        Ok((crystal_perm, monodromy_perm, diag)) => {
            let outcome = if crystal_perm == monodromy_perm {
                Outcome::Equal
            } else {
                Outcome::Mismatch
            };
            VerificationReport {
                case_id,
                claim,
                crystal_perm,
                monodromy_perm,
                outcome,
                detail: String::new(),
                seed: cfg.seed,
                wall_ms: start.elapsed().as_millis(),
                diag,
            }
        }
        Err(e) => VerificationReport {
            case_id,
            claim,
            crystal_perm: vec![],
            monodromy_perm: vec![],
            outcome: classify(&e),
            detail: e.to_string(),
            seed: cfg.seed,
            wall_ms: start.elapsed().as_millis(),
            diag: Diagnostics::default(),
        },
    }
}

/// The transported bijection phi for three equal factors: compose the two
/// clustering edges (products to the 1(23) boundary), select the lines
/// that lie in the weight-mu multiplicity block, and carry them back to
/// the base configuration with the chi = 0 Gaudin family.
///
/// Returns phi as a map (crystal tensor flat hw label, in ascending order)
/// -> base eigenline index, together with the list of hw labels.
#[allow(clippy::type_complexity)]
fn external_phi3(
    alg: Algebra,
    lambda: &[i64],
    mu: &[i64],
    base_z: &[f64],
    cfg: &RunConfig,
) -> Result<(Vec<usize>, Vec<usize>, Diagnostics)> {
    let mut diag = Diagnostics {
        min_overlap: 1.0,
        min_fidelity: 1.0,
        ..Diagnostics::default()
    };
    let chi = standard_chi(alg);
    let mut rng = cfg.rng();
    let ec = eigenline_crystal(alg, lambda, &chi, cfg)?;
    let rs = build_root_system(alg.dynkin_label())?;
    let model = Crystal::generate(&rs, &Weight::from_ints(lambda))?;
    let iso = ec
        .crystal
        .isomorphism(&model)
        .ok_or_else(|| Error::NotNormal("eigenline crystal not isomorphic to B".into()))?;

    let spins3 = vec![lambda.to_vec(), lambda.to_vec(), lambda.to_vec()];
    let space = TensorSpace::new(alg, &spins3)?;
    let d = ec.lines.len();
    // product reference in (j0, j1, j2) order
    let kk = space.dim;
    let mut prod = Mat::zeros(kk, kk);
    for j0 in 0..d {
        let v0 = ec.lines.line(j0);
        for j1 in 0..d {
            let v1 = ec.lines.line(j1);
            for j2 in 0..d {
                let v2 = ec.lines.line(j2);
                let mut col = vec![0.0; kk];
                for (a, &x) in v0.iter().enumerate() {
                    for (b, &y) in v1.iter().enumerate() {
                        for (c, &z) in v2.iter().enumerate() {
                            col[(a * d + b) * d + c] = x * y * z;
                        }
                    }
                }
                prod.set_column((j0 * d + j1) * d + j2, &col);
            }
        }
    }
    let product_reference = EigenlineSet {
        vectors: prod,
        labels: vec![vec![]; kk],
        max_residual: 0.0,
    };
    let e1 = TwoSiteEdge {
        site_a: vec![1],
        site_b: vec![2],
        frozen: single_site_frozen(&space, &chi, 0),
    };
    let omega12 = space.omega_sites(&[1], &[2]);
    let e2 = TwoSiteEdge {
        site_a: vec![0],
        site_b: vec![1, 2],
        frozen: vec![omega12],
    };
    let v3_fresh = joint_eigenlines(&e1.product_family(&space, &chi), &mut rng, &cfg.tol, "V3")?;
    let (v3, fid) = align_to(&product_reference, &v3_fresh);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    diag.min_fidelity = diag.min_fidelity.min(fid);
    let v2 = run_two_site_edge(&space, &e1, &chi, &v3, true, cfg, &mut rng, &mut diag)?;
    let v1 = run_two_site_edge(&space, &e2, &chi, &v2, true, cfg, &mut rng, &mut diag)?;

    // multiplicity block and the hw lines among the boundary lines
    let weights = space.weights();
    let raising: Vec<Mat> = (0..alg.rank())
        .map(|i| space.delta_subset(&[0, 1, 2], |v| v.e[i].clone()))
        .collect();
    let block = crate::eigen::multiplicity_block(&weights, mu, &raising)?;
    let m = block.dim();
    let mut hw_products: Vec<usize> = Vec::new();
    let mut hw_block_coords: Vec<Vec<f64>> = Vec::new();
    for x in 0..kk {
        let v = v1.line(x);
        let coords = block.basis.transpose().matvec(&v);
        let inside = norm(&coords);
        if (inside - 1.0).abs() < 0.05 {
            hw_products.push(x);
            let unit: Vec<f64> = coords.iter().map(|c| c / inside).collect();
            hw_block_coords.push(unit);
        }
    }
    if hw_products.len() != m {
        return Err(Error::InvalidInput(format!(
            "expected {m} boundary lines inside the multiplicity block, found {}",
            hw_products.len()
        )));
    }

    // carry the block lines from the clustered configuration to the base
    let mid = (base_z[1] + base_z[2]) / 2.0;
    let delta = cfg.delta_star;
    let z_c = [base_z[0], mid - delta / 2.0, mid + delta / 2.0];
    let boundary_set = EigenlineSet {
        vectors: Mat::from_rows(&hw_block_coords).transpose(),
        labels: vec![vec![]; m],
        max_residual: 0.0,
    };
    let clustered = joint_eigenlines(
        &gaudin_block_family(&space, &block, &z_c)?,
        &mut rng,
        &cfg.tol,
        "clustered",
    )?;
    let (clustered_aligned, fid) = align_to(&boundary_set, &clustered);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    diag.min_fidelity = diag.min_fidelity.min(fid);
    let famf = |t: f64| -> Result<Vec<Mat>> {
        let z = [
            base_z[0],
            z_c[1] + t * (base_z[1] - z_c[1]),
            z_c[2] + t * (base_z[2] - z_c[2]),
        ];
        gaudin_block_family(&space, &block, &z)
    };
    let (at_base, trail) = transport(&famf, &clustered_aligned, &mut rng, &cfg.tol, "outward")?;
    diag.steps += trail.steps;
    diag.min_overlap = diag.min_overlap.min(trail.min_overlap);
    diag.max_residual = diag.max_residual.max(trail.max_residual);
    // identify against the base lines as computed by monodromy_external
    let mut rng_base = cfg.rng();
    let base_lines = joint_eigenlines(
        &gaudin_block_family(&space, &block, base_z)?,
        &mut rng_base,
        &cfg.tol,
        "base",
    )?;
    let (to_base, fid) = crate::eigen::match_lines(&at_base.vectors, &base_lines.vectors);
    if fid < cfg.tol.handoff_fidelity {
        return Err(Error::FidelityFailure {
            fidelity: fid,
            threshold: cfg.tol.handoff_fidelity,
            halvings: 0,
        });
    }
    diag.min_fidelity = diag.min_fidelity.min(fid);

    // hw labels on the crystal side, ascending flat order
    let tensor_model = Crystal::tensor_many(&[&model, &model, &model])?;
    let mult = tensor_model.multiplicity_set(&Weight::from_ints(mu));
    if mult.members.len() != m {
        return Err(Error::InvalidInput(
            "crystal and numeric multiplicities disagree".into(),
        ));
    }
    // map ec-flat product index -> model-flat index
    let flat_iso = |x: usize| -> usize {
        let j2 = x % d;
        let j1 = (x / d) % d;
        let j0 = x / (d * d);
        (iso[j0] * d + iso[j1]) * d + iso[j2]
    };
    let mut phi = Vec::with_capacity(m);
    for &mem in &mult.members {
        // find the product line mapping to this crystal element
        let x = hw_products
            .iter()
            .position(|&x| flat_iso(x) == mem)
            .ok_or_else(|| {
                Error::InvalidInput(
                    "a crystal highest-weight element has no boundary line".into(),
                )
            })?;
        phi.push(to_base[x]);
    }
    Ok((phi, mult.members.clone(), diag))
}

/// External comparison for s_pq acting on E(lambda, ..., lambda)^mu.
///
/// For three factors the label matching is the transported bijection
/// (iterated clustering transports); for larger n the comparison matches
/// by weight and uses the fact that on fibers of size <= 2 the verdict is
/// independent of the bijection (conjugation is trivial on S_2).
pub fn verify_etingof_external(
    alg: Algebra,
    spins: &[Vec<i64>],
    mu: &[i64],
    p: usize,
    q: usize,
    base_z: &[f64],
    cfg: &RunConfig,
) -> VerificationReport {
    let start = Instant::now();
    let case_id = format!("external {alg} spins={spins:?} mu={mu:?} s_{p}{q}");
    let claim = "monodromy of s_pq equals the external cactus action".to_string();
    let run = (|| -> Result<(Vec<usize>, Vec<usize>, Outcome, String, Diagnostics)> {
        // crystal side
        let rs = build_root_system(alg.dynkin_label())?;
        let models: Vec<Crystal> = spins
            .iter()
            .map(|lam| Crystal::generate(&rs, &Weight::from_ints(lam)))
            .collect::<Result<_>>()?;
        let refs: Vec<&Crystal> = models.iter().collect();
        let tensor = Crystal::tensor_many(&refs)?;
        let act = external_cactus_action(&CactusWord::external(&[(p, q)]), &tensor, &refs)?;
        let mult = tensor.multiplicity_set(&Weight::from_ints(mu));
        for &x in &mult.members {
            if !mult.members.contains(&act[x]) {
                return Err(Error::InvalidInput(
                    "cactus action does not preserve the multiplicity set".into(),
                ));
            }
        }
        let crystal_perm: Vec<usize> = mult
            .members
            .iter()
            .map(|&x| mult.members.iter().position(|&y| y == act[x]).unwrap())
            .collect();
        // monodromy side
        let mono = monodromy_external(alg, spins, mu, base_z, p, q, cfg)?;
        if mono.perm.len() != crystal_perm.len() {
            return Err(Error::InvalidInput(
                "fiber sizes disagree between the two sides".into(),
            ));
        }
        let equal_spins = spins.iter().all(|s| s == &spins[0]);
        if spins.len() == 3 && equal_spins {
            // transported bijection
            let (phi, _members, mut diag) =
                external_phi3(alg, &spins[0], mu, base_z, cfg)?;
            diag.steps += mono.diag.steps;
            diag.min_overlap = diag.min_overlap.min(mono.diag.min_overlap);
            diag.min_fidelity = diag.min_fidelity.min(mono.diag.min_fidelity);
            diag.max_residual = diag.max_residual.max(mono.diag.max_residual);
            diag.delta_used = mono.diag.delta_used;
            let ok = (0..phi.len())
                .all(|a| mono.perm[phi[a]] == phi[crystal_perm[a]]);
            let outcome = if ok { Outcome::Equal } else { Outcome::Mismatch };
            Ok((
                crystal_perm,
                mono.perm,
                outcome,
                "matched through the transported bijection".into(),
                diag,
            ))
        } else {
            // weight-first matching; fibers of size <= 2 make the verdict
            // independent of the bijection
            if crystal_perm.len() > 2 {
                return Err(Error::InvalidInput(
                    "transported matching is only implemented for three equal factors; \
                     larger fibers would need it"
                        .into(),
                ));
            }
            let same = cycle_type(&crystal_perm) == cycle_type(&mono.perm);
            let outcome = if same { Outcome::Equal } else { Outcome::Mismatch };
            Ok((
                crystal_perm,
                mono.perm,
                outcome,
                "matched by weight; fiber size <= 2 makes the verdict bijection-independent"
                    .into(),
                mono.diag,
            ))
        }
    })();
    match run {
        Ok((crystal_perm, monodromy_perm, outcome, detail, diag)) => VerificationReport {
            case_id,
            claim,
            crystal_perm,
            monodromy_perm,
            outcome,
            detail,
            seed: cfg.seed,
            wall_ms: start.elapsed().as_millis(),
            diag,
        },
        Err(e) => VerificationReport {
            case_id,
            claim,
            crystal_perm: vec![],
            monodromy_perm: vec![],
            outcome: classify(&e),
            detail: e.to_string(),
            seed: cfg.seed,
            wall_ms: start.elapsed().as_millis(),
            diag: Diagnostics::default(),
        },
    }
}

fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        cycles.push(len);
    }
    cycles.sort_unstable();
    cycles
}

/// The commutor square: p_{infty,0} after the crystal commutor equals the
/// factor flip after p_{infty,0}.
pub fn verify_commutor_square(
    alg: Algebra,
    lam1: &[i64],
    lam2: &[i64],
    cfg: &RunConfig,
) -> VerificationReport {
    let start = Instant::now();
    let case_id = format!("commutor-square {alg} ({lam1:?}, {lam2:?})");
    let claim = "p_infty0 intertwines the crystal commutor with the factor flip".to_string();
    let chi = standard_chi(alg);
    let run = (|| -> Result<(Vec<usize>, Vec<usize>, Diagnostics)> {
        let tt12 = tensor_transport(alg, lam1, lam2, &chi, cfg)?;
        let tt21 = tensor_transport(alg, lam2, lam1, &chi, cfg)?;
        let mut diag = tt12.diag.clone();
        diag.steps += tt21.diag.steps;
        diag.min_overlap = diag.min_overlap.min(tt21.diag.min_overlap);
        diag.min_fidelity = diag.min_fidelity.min(tt21.diag.min_fidelity);
        diag.max_residual = diag.max_residual.max(tt21.diag.max_residual);
        // the crystal commutor between the eigenline crystals
        let ec1 = eigenline_crystal(alg, lam1, &chi, cfg)?;
        let ec2 = eigenline_crystal(alg, lam2, &chi, cfg)?;
        let sigma = commutor(&ec1.crystal, &ec2.crystal)?;
        // ambient flip matrix V1 x V2 -> V2 x V1
        let d1 = ec1.lines.len();
        let d2 = ec2.lines.len();
        let mut flip = Mat::zeros(d1 * d2, d1 * d2);
        for a in 0..d1 {
            for b in 0..d2 {
                flip[(b * d1 + a, a * d2 + b)] = 1.0;
            }
        }
        // match flip(tt12 boundary lines) against the tt21 boundary lines
        let k = tt12.rhs_lines.len();
        let mut flipped = Mat::zeros(k, k);
        for j in 0..k {
            let v = tt12.rhs_lines.line(j);
            flipped.set_column(j, &flip.matvec(&v));
        }
        let (s_match, fid) = crate::eigen::match_lines(&flipped, &tt21.rhs_lines.vectors);
        if fid < cfg.tol.handoff_fidelity {
            return Err(Error::FidelityFailure {
                fidelity: fid,
                threshold: cfg.tol.handoff_fidelity,
                halvings: 0,
            });
        }
        diag.min_fidelity = diag.min_fidelity.min(fid);
        // numeric route: x -> flip-match; crystal route: x -> sigma
        let numeric: Vec<usize> = (0..k).map(|x| s_match[tt12.map[x]]).collect();
        let crystal_route: Vec<usize> = (0..k).map(|x| tt21.map[sigma.map[x]]).collect();
        Ok((crystal_route, numeric, diag))
    })();
    match run {
        Ok((crystal_perm, monodromy_perm, diag)) => {
            let outcome = if crystal_perm == monodromy_perm {
                Outcome::Equal
            } else {
                Outcome::Mismatch
            };
            VerificationReport {
                case_id,
                claim,
                crystal_perm,
                monodromy_perm,
                outcome,
                detail: String::new(),
                seed: cfg.seed,
                wall_ms: start.elapsed().as_millis(),
                diag,
            }
        }
        Err(e) => VerificationReport {
            case_id,
            claim,
            crystal_perm: vec![],
            monodromy_perm: vec![],
            outcome: classify(&e),
            detail: e.to_string(),
            seed: cfg.seed,
            wall_ms: start.elapsed().as_millis(),
            diag: Diagnostics::default(),
        },
    }
}

/// Gauge and seed invariance for one external case: the permutation must
/// be unchanged under affine re-gauging of z, under a different seed, and
/// under halving delta*.
pub fn external_invariance_checks(
    alg: Algebra,
    spins: &[Vec<i64>],
    mu: &[i64],
    p: usize,
    q: usize,
    base_z: &[f64],
    cfg: &RunConfig,
) -> Result<()> {
    let reference = monodromy_external(alg, spins, mu, base_z, p, q, cfg)?;
    // affine re-gauge
    let gauged: Vec<f64> = base_z.iter().map(|z| 2.0 * z + 5.0).collect();
    let mut cfg_g = cfg.clone();
    cfg_g.delta_star = cfg.delta_star * 2.0;
    let re = monodromy_external(alg, spins, mu, &gauged, p, q, &cfg_g)?;
    if re.perm != reference.perm {
        return Err(Error::InvalidInput(
            "monodromy changed under affine re-gauging".into(),
        ));
    }
    // fresh seed
    let mut cfg_s = cfg.clone();
    cfg_s.seed = cfg.seed.wrapping_add(101);
    let re = monodromy_external(alg, spins, mu, base_z, p, q, &cfg_s)?;
    if re.perm != reference.perm {
        return Err(Error::InvalidInput("monodromy changed under seed change".into()));
    }
    // delta dependence must be reported, not silently accepted
    let mut cfg_d = cfg.clone();
    cfg_d.delta_star = cfg.delta_star / 2.0;
    let re = monodromy_external(alg, spins, mu, base_z, p, q, &cfg_d)?;
    if re.perm != reference.perm {
        return Err(Error::InvalidInput(
            "monodromy depends on the handoff width delta".into(),
        ));
    }
    Ok(())
}

/// The desk-scale verification suite.
pub fn desk_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut reports = Vec::new();
    let z3 = [1.0, 2.0, 3.0];
    let z4 = [1.0, 2.0, 3.0, 4.0];
    let s1 = vec![vec![1], vec![1], vec![1]];
    for mu in [vec![3i64], vec![1]] {
        for (p, q) in [(1, 2), (2, 3), (1, 3)] {
            reports.push(verify_etingof_external(
                Algebra::Sl2,
                &s1,
                &mu,
                p,
                q,
                &z3,
                cfg,
            ));
        }
    }
    let s14 = vec![vec![1], vec![1], vec![1], vec![1]];
    for (p, q) in [(1, 2), (3, 4), (1, 4)] {
        reports.push(verify_etingof_external(
            Algebra::Sl2,
            &s14,
            &[0],
            p,
            q,
            &z4,
            cfg,
        ));
    }
    for m in [1i64, 2, 3] {
        reports.push(verify_etingof_internal(Algebra::Sl2, &[m], &[0], cfg));
    }
    for lambda in [vec![1i64, 0], vec![1, 1]] {
        for subset in [vec![0usize], vec![1], vec![0, 1]] {
            reports.push(verify_etingof_internal(Algebra::Sl3, &lambda, &subset, cfg));
        }
    }
    reports.push(verify_commutor_square(Algebra::Sl2, &[1], &[1], cfg));
    reports.push(verify_commutor_square(Algebra::Sl2, &[1], &[2], cfg));
    reports.push(verify_commutor_square(Algebra::Sl2, &[2], &[0], cfg));
    reports
}

/// JUnit-style XML for a list of reports.
pub fn junit_xml(reports: &[VerificationReport]) -> String {
    let failures = reports
        .iter()
        .filter(|r| r.outcome == Outcome::Mismatch)
        .count();
    let skipped = reports
        .iter()
        .filter(|r| r.outcome == Outcome::Inconclusive)
        .count();
    let mut s = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&format!(
        "<testsuite name=\"verify\" tests=\"{}\" failures=\"{}\" skipped=\"{}\">\n",
        reports.len(),
        failures,
        skipped
    ));
    for r in reports {
        s.push_str(&format!(
            "  <testcase name=\"{}\" time=\"{:.3}\"",
            xml_escape(&r.case_id),
            r.wall_ms as f64 / 1000.0
        ));
        match r.outcome {
            Outcome::Equal => s.push_str("/>\n"),
            Outcome::Mismatch => {
                s.push_str(&format!(
                    ">\n    <failure message=\"{}\"/>\n  </testcase>\n",
                    xml_escape(&r.detail)
                ));
            }
            Outcome::Inconclusive => {
                s.push_str(&format!(
                    ">\n    <skipped message=\"{}\"/>\n  </testcase>\n",
                    xml_escape(&r.detail)
                ));
            }
        }
    }
    s.push_str("</testsuite>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Sanity helpers used by the acceptance suite: a constant family along a
/// trivial path must transport trivially.
pub fn transport_smoke(cfg: &RunConfig) -> Result<()> {
    let space = TensorSpace::new(Algebra::Sl2, &[vec![1], vec![1]])?;
    let block = Block::full(space.dim);
    let gens = gaudin_block_family(&space, &block, &[1.0, 0.0])?;
    let mut rng = cfg.rng();
    let start = joint_eigenlines(&gens, &mut rng, &cfg.tol, "smoke")?;
    let famf = |_t: f64| -> Result<Vec<Mat>> { Ok(gens.clone()) };
    let (end, _) = transport(&famf, &start, &mut rng, &cfg.tol, "smoke")?;
    for j in 0..start.len() {
        if dot(&start.line(j), &end.line(j)).abs() < 0.999 {
            return Err(Error::InvalidInput("constant transport moved a line".into()));
        }
    }
    Ok(())
}

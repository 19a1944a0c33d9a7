//! Cactus group words and their actions on crystals.
//!
//! Internal generators s_J (J a connected subdiagram) act by partial
//! Schützenberger involutions.  External generators s_pq act on n-fold
//! tensor products by reversing the factor block [p, q], applying xi to
//! each reversed factor, and applying xi of the block tensor crystal.

use crate::crystal::Crystal;
use crate::error::{Error, Result};
use crate::involution::{commutor, partial_schutzenberger, schutzenberger, CrystalPermutation};

/// A generator of a cactus group, in either flavor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CactusGen {
    /// s_J for a connected node subset (0-based node indices).
    Internal(Vec<usize>),
    /// s_pq for 1 <= p < q <= n (1-based positions).
    External(usize, usize),
}

/// A word in cactus generators; letters act left to right (the first letter
/// acts first).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CactusWord(pub Vec<CactusGen>);

impl CactusWord {
    pub fn internal(subsets: &[&[usize]]) -> CactusWord {
        CactusWord(
            subsets
                .iter()
                .map(|s| CactusGen::Internal(s.to_vec()))
                .collect(),
        )
    }

    pub fn external(pairs: &[(usize, usize)]) -> CactusWord {
        CactusWord(
            pairs
                .iter()
                .map(|&(p, q)| CactusGen::External(p, q))
                .collect(),
        )
    }

    /// Free reduction by s^2 = 1 on adjacent equal letters.
    pub fn reduced(&self) -> CactusWord {
        let mut out: Vec<CactusGen> = Vec::new();
        for g in &self.0 {
            if out.last() == Some(g) {
                out.pop();
            } else {
                out.push(g.clone());
            }
        }
        CactusWord(out)
    }
}

/// Internal action: s_J acts by xi_J, words compose.
pub fn internal_cactus_action(word: &CactusWord, b: &Crystal) -> Result<CrystalPermutation> {
    let mut acc = CrystalPermutation::identity(b.len());
    for gen in &word.0 {
        let subset = match gen {
            CactusGen::Internal(s) => s,
            CactusGen::External(_, _) => {
                return Err(Error::InvalidInput(
                    "external generator in internal word".into(),
                ))
            }
        };
        let xi = partial_schutzenberger(b, subset)?;
        acc = acc.compose(&xi);
    }
    Ok(acc)
}

/// External action of one generator s_pq on B_1 x ... x B_n.
pub struct ExternalAction {
    pub perm: Vec<usize>,
    /// image order of the factors: output slot k holds input factor order[k]
    pub factor_order: Vec<usize>,
}

pub fn external_generator_action(
    tensor: &Crystal,
    factors: &[&Crystal],
    p: usize,
    q: usize,
) -> Result<ExternalAction> {
    let n = factors.len();
    if !(1 <= p && p < q && q <= n) {
        return Err(Error::BadGenerator(p, q));
    }
    let dims: Vec<usize> = factors.iter().map(|b| b.len()).collect();
    if tensor.factor_dims() != dims.as_slice() {
        return Err(Error::InvalidInput(
            "tensor crystal does not match the factor list".into(),
        ));
    }
    // xi of each factor in the block
    let mut xi_factor: Vec<Option<CrystalPermutation>> = vec![None; n];
    for k in (p - 1)..q {
        xi_factor[k] = Some(schutzenberger(factors[k])?);
    }
    // xi of the reversed block tensor B_q x ... x B_p
    let reversed: Vec<&Crystal> = ((p - 1)..q).rev().map(|k| factors[k]).collect();
    let block = Crystal::tensor_many(&reversed)?;
    let xi_block = schutzenberger(&block)?;

    let mut perm = Vec::with_capacity(tensor.len());
    for x in 0..tensor.len() {
        let tuple = tensor.unflatten(x);
        // reverse the block and apply the factor involutions
        let mut block_tuple: Vec<usize> = ((p - 1)..q).rev().map(|k| tuple[k]).collect();
        for (slot, k) in ((p - 1)..q).rev().enumerate() {
            block_tuple[slot] = xi_factor[k].as_ref().unwrap().perm[block_tuple[slot]];
        }
        let b_flat = block.flatten(&block_tuple);
        let b_img = block.unflatten(xi_block.perm[b_flat]);
        let mut out = tuple.clone();
        for (slot, k) in ((p - 1)..q).enumerate() {
            out[k] = b_img[slot];
        }
        perm.push(tensor.flatten(&out));
    }
    let mut factor_order: Vec<usize> = (0..n).collect();
    factor_order[(p - 1)..q].reverse();
    Ok(ExternalAction { perm, factor_order })
}

/// External action of a word; requires all factors equal (so each generator
/// is an endomap of the same tensor crystal).
pub fn external_cactus_action(
    word: &CactusWord,
    tensor: &Crystal,
    factors: &[&Crystal],
) -> Result<Vec<usize>> {
    let mut acc: Vec<usize> = (0..tensor.len()).collect();
    for gen in &word.0 {
        let (p, q) = match gen {
            CactusGen::External(p, q) => (*p, *q),
            CactusGen::Internal(_) => {
                return Err(Error::InvalidInput(
                    "internal generator in external word".into(),
                ))
            }
        };
        let act = external_generator_action(tensor, factors, p, q)?;
        for slot in acc.iter_mut() {
            *slot = act.perm[*slot];
        }
    }
    Ok(acc)
}

/// Iterated-commutor realization of the block reversal
/// sigma_{p,q}: B_p x ... x B_q -> B_q x ... x B_p,
/// sigma_{p,q} = (sigma_{p+1,q} x id) o sigma_{B_p, B_{p+1} x...x B_q}.
///
/// Used as an independent cross-check of the generator formula.
pub fn iterated_commutor_reversal(factors: &[&Crystal]) -> Result<Vec<usize>> {
    let k = factors.len();
    if k == 1 {
        return Ok((0..factors[0].len()).collect());
    }
    let rest: Vec<&Crystal> = factors[1..].to_vec();
    let rest_tensor = Crystal::tensor_many(&rest)?;
    let head = factors[0];
    // sigma_{B_p, Rest}: head x rest -> rest x head on flat labels
    let c = commutor(head, &rest_tensor)?;
    let inner = iterated_commutor_reversal(&rest)?;
    let n_head = head.len();
    let n_rest = rest_tensor.len();
    let mut out = Vec::with_capacity(n_head * n_rest);
    for x in 0..n_head * n_rest {
        // source flat label over (head, rest...) with head most significant
        let y = c.map[x]; // flat over (rest_tensor, head)
        let (r, h) = (y / n_head, y % n_head);
        let r_img = inner[r];
        out.push(r_img * n_head + h);
    }
    Ok(out)
}

/// Result of a hexagon check.
pub struct HexagonReport {
    pub commutes: bool,
    /// first element (flat label of (B1 x B2) x B3) where it fails
    pub witness: Option<usize>,
    pub detail: String,
}

/// Evaluate both composites of the coboundary hexagon elementwise and check
/// that the binary maps used are crystal morphisms.
///
/// `use_flip` swaps the commutor for the plain factor flip; this is a
/// control that must fail (the flip is not a crystal map).
pub fn check_hexagon(
    b1: &Crystal,
    b2: &Crystal,
    b3: &Crystal,
    use_flip: bool,
) -> Result<HexagonReport> {
    let (n1, n2, n3) = (b1.len(), b2.len(), b3.len());

    // binary map over flat pair labels
    let pair_map = |a: &Crystal, b: &Crystal| -> Result<Vec<usize>> {
        if use_flip {
            let na = a.len();
            let nb = b.len();
            Ok((0..na * nb)
                .map(|x| {
                    let (i, j) = (x / nb, x % nb);
                    j * na + i
                })
                .collect())
        } else {
            Ok(commutor(a, b)?.map)
        }
    };

    // morphism check for the binary maps in play (this is where the flip
    // control fails: the hexagon as bare set maps commutes even for the
    // flip, but the flip is not a morphism of crystals)
    if use_flip {
        for (a, b) in [(b1, b2), (b2, b3)] {
            let src = Crystal::tensor(a, b)?;
            let tgt = Crystal::tensor(b, a)?;
            let m = pair_map(a, b)?;
            if let Some(x) = crate::involution::crystal_map_violation(&src, &tgt, &m) {
                return Ok(HexagonReport {
                    commutes: false,
                    witness: Some(x),
                    detail: "binary map is not a crystal morphism".into(),
                });
            }
        }
    }

    let t12 = Crystal::tensor(b1, b2)?;
    let sigma_12_3 = pair_map(&t12, b3)?; // (B1xB2)xB3 -> B3x(B1xB2)
    let sigma_12 = pair_map(b1, b2)?; // B1xB2 -> B2xB1
    let t23 = Crystal::tensor(b2, b3)?;
    let sigma_1_23 = pair_map(b1, &t23)?; // B1x(B2xB3) -> (B2xB3)xB1
    let sigma_23 = pair_map(b2, b3)?; // B2xB3 -> B3xB2

    // left composite: sigma_{12,3} then (id x sigma_{12})
    // right composite: associator (identity on flat labels), sigma_{1,23},
    // then (sigma_{23} x id), then associator inverse (identity)
    let mut witness = None;
    for x in 0..n1 * n2 * n3 {
        // decode as ((a,b),c)
        let c = x % n3;
        let ab = x / n3;
        // left: y = sigma_{12,3}(x) lives in B3 x (B1 x B2)
        let y = sigma_12_3[ab * n3 + c];
        let (c1, ab1) = (y / (n1 * n2), y % (n1 * n2));
        let left = c1 * (n1 * n2) + sigma_12[ab1];

        // right: x read as a x (b,c) has the same flat label
        let y = sigma_1_23[x];
        let (bc1, a1) = (y / n1, y % n1);
        let right = sigma_23[bc1] * n1 + a1;

        if left != right {
            witness = Some(x);
            break;
        }
    }
    Ok(HexagonReport {
        commutes: witness.is_none(),
        witness,
        detail: if witness.is_none() {
            "hexagon commutes".into()
        } else {
            "hexagon composites differ".into()
        },
    })
}

//! Character oracle: Freudenthal weight multiplicities and tensor-product
//! decomposition by highest-weight peeling.
//!
//! This module is deliberately independent of the crystal construction; the
//! test suite uses it as the reference against which crystal sizes, weight
//! multisets, and tensor decompositions are checked.

use crate::rootdata::{Rat, RootSystem, Weight};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// Coordinates of lambda over the simple roots (exact).
fn root_coords(rs: &RootSystem, lambda: &Weight) -> Vec<Rat> {
    // solve A^T c = lambda  (fund coords of sum c_j alpha_j are A c read
    // columnwise: (sum_j c_j alpha_j)_k = sum_j a[k][j] c_j)
    let n = rs.rank();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| Rat::from_integer(rs.cartan()[k][j]))
                .collect()
        })
        .collect();
    let mut rhs = lambda.0.clone();
    // gaussian elimination
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).expect("regular");
        m.swap(col, piv);
        rhs.swap(col, piv);
        let p = m[col][col];
        for j in 0..n {
            m[col][j] /= p;
        }
        rhs[col] /= p;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for j in 0..n {
                    let v = m[col][j];
                    m[r][j] -= f * v;
                }
                let v = rhs[col];
                rhs[r] -= f * v;
            }
        }
    }
    rhs
}

/// Weight multiplicities of V(lambda), exact.
pub fn weight_multiplicities(rs: &RootSystem, lambda: &Weight) -> BTreeMap<Weight, u64> {
    assert!(lambda.is_dominant());
    let n = rs.rank();
    let rho = rs.rho();
    let lam_rho = lambda.add(&rho);
    let norm_top = rs.form(&lam_rho, &lam_rho);

    // box bound: lambda - mu has root coordinates 0 <= c <= c* where
    // c* are the root coordinates of lambda - w0(lambda)
    let span = lambda.sub(&rs.w0_action(lambda));
    let cmax: Vec<i64> = root_coords(rs, &span)
        .iter()
        .map(|c| {
            assert!(c.is_integer() && !c.is_negative());
            c.to_integer()
        })
        .collect();

    // enumerate the box by increasing height
    let mut shifts: Vec<Vec<i64>> = vec![vec![]];
    for k in 0..n {
        let mut next = Vec::new();
        for s in &shifts {
            for v in 0..=cmax[k] {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        shifts = next;
    }
    shifts.sort_by_key(|s| s.iter().sum::<i64>());

    let simple_roots: Vec<Weight> = (0..n).map(|i| rs.simple_root(i)).collect();
    let pos_roots: Vec<Weight> = rs
        .positive_roots()
        .iter()
        .map(|r| Weight::from_ints(&r.fund_coords))
        .collect();

    let mut mult: BTreeMap<Weight, u64> = BTreeMap::new();
    for shift in &shifts {
        let mut mu = lambda.clone();
        for (k, &c) in shift.iter().enumerate() {
            mu = mu.sub(&simple_roots[k].scale(Rat::from_integer(c)));
        }
        if mu == *lambda {
            mult.insert(mu, 1);
            continue;
        }
        let mu_rho = mu.add(&rho);
        let denom = norm_top - rs.form(&mu_rho, &mu_rho);
        if !denom.is_positive() {
            continue; // outside the weight diagram
        }
        let mut acc = Rat::zero();
        for alpha in &pos_roots {
            let mut k = 1i64;
            loop {
                let nu = mu.add(&alpha.scale(Rat::from_integer(k)));
                match mult.get(&nu) {
                    Some(&m) if m > 0 => {
                        acc += Rat::from_integer(m as i64) * rs.form(&nu, alpha);
                    }
                    _ => {
                        // multiplicities vanish past the diagram; stop once
                        // nu leaves the box through the top
                        let diff = lambda.sub(&nu);
                        let rc = root_coords(rs, &diff);
                        if rc.iter().any(|c| c.is_negative()) {
                            break;
                        }
                    }
                }
                k += 1;
            }
        }
        let m = acc * Rat::from_integer(2) / denom;
        assert!(m.is_integer() && !m.is_negative());
        if m.is_positive() {
            mult.insert(mu, m.to_integer() as u64);
        }
    }
    mult
}

pub fn dimension(rs: &RootSystem, lambda: &Weight) -> u64 {
    weight_multiplicities(rs, lambda).values().sum()
}

/// Convolution of two characters.
pub fn char_product(
    a: &BTreeMap<Weight, u64>,
    b: &BTreeMap<Weight, u64>,
) -> BTreeMap<Weight, u64> {
    let mut out = BTreeMap::new();
    for (wa, ma) in a {
        for (wb, mb) in b {
            *out.entry(wa.add(wb)).or_insert(0) += ma * mb;
        }
    }
    out
}

/// Decompose a character of a (virtual) finite-dimensional representation
/// into irreducible multiplicities by repeated highest-weight peeling.
pub fn decompose_character(
    rs: &RootSystem,
    mut ch: BTreeMap<Weight, u64>,
) -> BTreeMap<Weight, u64> {
    let mut out = BTreeMap::new();
    loop {
        ch.retain(|_, m| *m > 0);
        if ch.is_empty() {
            return out;
        }
        // maximal dominant weight in the support (root order)
        let dominant: Vec<&Weight> = ch.keys().filter(|w| w.is_dominant()).collect();
        assert!(!dominant.is_empty(), "character of a representation");
        let mut top = dominant[0];
        for cand in &dominant[1..] {
            let diff = cand.sub(top);
            let rc = root_coords(rs, &diff);
            if rc.iter().all(|c| !c.is_negative()) {
                top = cand;
            }
        }
        let top = top.clone();
        let mult = ch[&top];
        let irr = weight_multiplicities(rs, &top);
        for (w, m) in irr {
            let cur = ch.entry(w).or_insert(0);
            assert!(*cur >= mult * m, "peeling went negative");
            *cur -= mult * m;
        }
        out.insert(top, mult);
    }
}

/// Multiplicities of V(mu) inside V(lambda_1) x ... x V(lambda_n).
pub fn tensor_decomposition(rs: &RootSystem, lambdas: &[Weight]) -> BTreeMap<Weight, u64> {
    assert!(!lambdas.is_empty());
    let mut ch = weight_multiplicities(rs, &lambdas[0]);
    for lam in &lambdas[1..] {
        ch = char_product(&ch, &weight_multiplicities(rs, lam));
    }
    decompose_character(rs, ch)
}

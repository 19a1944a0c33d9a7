//! Finite-type root system engine.
//!
//! Weights are stored in fundamental-weight coordinates with exact rational
//! arithmetic; roots are kept both in simple-root and fundamental-weight
//! coordinates.  Positive roots are generated by orbit closure under simple
//! reflections rather than per-type tables.

use crate::error::{Error, Result};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

pub type Rat = Rational64;

/// A weight in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<Rat>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![Rat::zero(); rank])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Weight(coords.iter().map(|&c| Rat::from_integer(c)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: Rat) -> Weight {
        Weight(self.0.iter().map(|a| a * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Exact dominance test in the fundamental basis.
    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }

    /// Integer coordinates, if the weight lies in the lattice.
    pub fn int_coords(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|c| if c.is_integer() { Some(c.to_integer()) } else { None })
            .collect()
    }
}

/// A root, kept in both coordinate systems.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root {
    /// Coefficients over the simple roots.
    pub root_coords: Vec<i64>,
    /// Coordinates over the fundamental weights.
    pub fund_coords: Vec<i64>,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.root_coords.iter().sum()
    }
}

/// A word in the simple reflections, acting on weights exactly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeylWord(pub Vec<usize>);

impl WeylWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Cartan datum for one of the supported finite types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    label: String,
    rank: usize,
    /// cartan[i][j] = <alpha_i^vee, alpha_j>
    cartan: Vec<Vec<i64>>,
    /// Symmetrizers d_i with d_i a_ij = d_j a_ji.
    sym: Vec<i64>,
    positive_roots: Vec<Root>,
    /// Gram matrix of the fundamental weights under the invariant form.
    gram: Vec<Vec<Rat>>,
}

fn chain_cartan(n: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 2;
        if i + 1 < n {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    a
}

fn cartan_for_label(label: &str) -> Option<Vec<Vec<i64>>> {
    match label {
        "A1" => Some(chain_cartan(1)),
        "A2" => Some(chain_cartan(2)),
        "A3" => Some(chain_cartan(3)),
        "A4" => Some(chain_cartan(4)),
        "B2" => Some(vec![vec![2, -1], vec![-2, 2]]),
        "C2" => Some(vec![vec![2, -2], vec![-1, 2]]),
        "G2" => Some(vec![vec![2, -3], vec![-1, 2]]),
        "D4" => {
            // node 2 is the branch node (Bourbaki)
            let mut a = vec![vec![0i64; 4]; 4];
            for i in 0..4 {
                a[i][i] = 2;
            }
            for (i, j) in [(0, 1), (1, 2), (1, 3)] {
                a[i][j] = -1;
                a[j][i] = -1;
            }
            Some(a)
        }
        _ => None,
    }
}

/// Smallest positive integer symmetrizers: d_i a_ij = d_j a_ji.
fn symmetrizers(cartan: &[Vec<i64>]) -> Vec<i64> {
    let n = cartan.len();
    let mut d = vec![Rat::zero(); n];
    // propagate along the diagram; components independently seeded with 1
    for start in 0..n {
        if !d[start].is_zero() {
            continue;
        }
        d[start] = Rat::one();
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i != j && cartan[i][j] != 0 && d[j].is_zero() {
                    // d_j = d_i a_ij / a_ji
                    d[j] = d[i] * Rat::new(cartan[i][j], cartan[j][i]);
                    stack.push(j);
                }
            }
        }
    }
    let denom_lcm = d
        .iter()
        .map(|x| *x.denom())
        .fold(1i64, |acc, q| acc / gcd(acc, q) * q);
    let ints: Vec<i64> = d
        .iter()
        .map(|x| (x * Rat::from_integer(denom_lcm)).to_integer())
        .collect();
    let g = ints.iter().fold(0, |acc, &v| gcd(acc, v));
    ints.iter().map(|v| v / g).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact inverse of an integer matrix, via Gauss-Jordan over the rationals.
fn invert_rational(m: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("matrix is singular");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (acj, icj) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * acj;
                    inv[r][j] -= f * icj;
                }
            }
        }
    }
    inv
}

/// The supported finite Dynkin types.
pub const SUPPORTED_TYPES: [&str; 8] = ["A1", "A2", "A3", "A4", "B2", "C2", "G2", "D4"];

pub fn build_root_system(label: &str) -> Result<RootSystem> {
    let cartan =
        cartan_for_label(label).ok_or_else(|| Error::UnknownType(label.to_string()))?;
    Ok(RootSystem::from_cartan(label.to_string(), cartan))
}

impl RootSystem {
    fn from_cartan(label: String, cartan: Vec<Vec<i64>>) -> RootSystem {
        let rank = cartan.len();
        let sym = symmetrizers(&cartan);
        let positive_roots = positive_roots_by_closure(&cartan);
        // Gram of fundamental weights: G_ij = d_j (A^{-1})_{ji}
        let a_rat: Vec<Vec<Rat>> = cartan
            .iter()
            .map(|row| row.iter().map(|&v| Rat::from_integer(v)).collect())
            .collect();
        let ainv = invert_rational(&a_rat);
        let gram: Vec<Vec<Rat>> = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| ainv[j][i] * Rat::from_integer(sym[j]))
                    .collect()
            })
            .collect();
        RootSystem {
            label,
            rank,
            cartan,
            sym,
            positive_roots,
            gram,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn symmetrizers(&self) -> &[i64] {
        &self.sym
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    /// alpha_i in fundamental coordinates (column i of the Cartan matrix).
    pub fn simple_root(&self, i: usize) -> Weight {
        Weight(
            (0..self.rank)
                .map(|k| Rat::from_integer(self.cartan[k][i]))
                .collect(),
        )
    }

    /// <alpha_i^vee, lambda> in the fundamental basis.
    pub fn pairing_simple(&self, i: usize, w: &Weight) -> Rat {
        w.0[i]
    }

    /// Invariant form on weights (normalized so short roots of each component
    /// have the symmetrizer-1 length).
    pub fn form(&self, a: &Weight, b: &Weight) -> Rat {
        let mut s = Rat::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += a.0[i] * self.gram[i][j] * b.0[j];
            }
        }
        s
    }

    /// <alpha^vee, lambda> = 2 (alpha, lambda) / (alpha, alpha) for any root.
    pub fn pairing_coroot(&self, alpha: &Root, w: &Weight) -> Rat {
        // (alpha, lambda) = sum_j c_j d_j lambda_j over simple-root coords
        let num: Rat = (0..self.rank)
            .map(|j| Rat::from_integer(alpha.root_coords[j] * self.sym[j]) * w.0[j])
            .sum();
        let den: Rat = (0..self.rank)
            .map(|j| {
                (0..self.rank)
                    .map(|k| {
                        Rat::from_integer(
                            alpha.root_coords[j] * alpha.root_coords[k] * self.sym[j]
                                * self.cartan[j][k],
                        )
                    })
                    .sum::<Rat>()
            })
            .sum();
        num * Rat::from_integer(2) / den
    }

    /// Simple reflection acting on a weight in fundamental coordinates.
    pub fn reflect(&self, i: usize, w: &Weight) -> Weight {
        let c = w.0[i];
        let mut out = w.clone();
        for k in 0..self.rank {
            out.0[k] -= c * Rat::from_integer(self.cartan[k][i]);
        }
        out
    }

    /// Apply a Weyl word to a weight, letters acting left to right
    /// (the first letter is applied first).
    pub fn apply_word(&self, word: &WeylWord, w: &Weight) -> Weight {
        let mut cur = w.clone();
        for &i in &word.0 {
            cur = self.reflect(i, &cur);
        }
        cur
    }

    /// rho = sum of fundamental weights.
    pub fn rho(&self) -> Weight {
        Weight(vec![Rat::one(); self.rank])
    }

    /// Is the node subset connected in the Dynkin diagram?
    pub fn is_connected(&self, subset: &[usize]) -> bool {
        if subset.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.rank];
        let mut stack = vec![subset[0]];
        seen[subset[0]] = true;
        while let Some(i) = stack.pop() {
            for &j in subset {
                if !seen[j] && self.cartan[i][j] != 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        subset.iter().all(|&j| seen[j])
    }

    /// A reduced word for the longest element of the parabolic W_J.
    ///
    /// Greedy descent from the J-dominant regular weight; the number of steps
    /// equals |Delta_+ cap Delta_J|.
    pub fn longest_element(&self, subset: &[usize]) -> Result<WeylWord> {
        if subset.is_empty() {
            return Err(Error::BadSubset(subset.to_vec()));
        }
        for &j in subset {
            if j >= self.rank {
                return Err(Error::NodeOutOfRange(j, self.rank));
            }
        }
        let mut mu = Weight::zero(self.rank);
        for &j in subset {
            mu.0[j] = Rat::one();
        }
        let mut word = Vec::new();
        while let Some(&j) = subset.iter().find(|&&j| mu.0[j].is_positive()) {
            mu = self.reflect(j, &mu);
            word.push(j);
        }
        Ok(WeylWord(word))
    }

    /// Diagram involution theta_J with alpha_{theta(j)} = -w0^J(alpha_j).
    pub fn theta_involution(&self, subset: &[usize]) -> Result<Vec<usize>> {
        if !self.is_connected(subset) {
            return Err(Error::BadSubset(subset.to_vec()));
        }
        let w0 = self.longest_element(subset)?;
        let mut theta = vec![usize::MAX; self.rank];
        for &j in subset {
            let img = self.apply_word(&w0, &self.simple_root(j)).scale(-Rat::one());
            let target = subset
                .iter()
                .copied()
                .find(|&k| self.simple_root(k) == img)
                .ok_or_else(|| Error::BadSubset(subset.to_vec()))?;
            theta[j] = target;
        }
        Ok(theta)
    }

    /// theta for the full diagram.
    pub fn theta_full(&self) -> Vec<usize> {
        let all: Vec<usize> = (0..self.rank).collect();
        // the full diagram of a supported type is connected except for
        // products we do not ship; fall back node-by-node if needed
        self.theta_involution(&all)
            .expect("full diagram involution")
    }

    /// w0(lambda) computed from a reduced word.
    pub fn w0_action(&self, w: &Weight) -> Weight {
        let all: Vec<usize> = (0..self.rank).collect();
        let w0 = self.longest_element(&all).expect("nonempty diagram");
        self.apply_word(&w0, w)
    }

    /// Weyl dimension formula, evaluated exactly.
    pub fn weyl_dimension(&self, lambda: &Weight) -> Result<u64> {
        if !lambda.is_dominant() {
            return Err(Error::NonDominant(
                lambda.0.iter().map(|c| c.to_string()).collect(),
            ));
        }
        let rho = self.rho();
        let lam_rho = lambda.add(&rho);
        let mut dim = Rat::one();
        for alpha in &self.positive_roots {
            dim *= self.pairing_coroot(alpha, &lam_rho) / self.pairing_coroot(alpha, &rho);
        }
        assert!(dim.is_integer(), "Weyl dimension must be an integer");
        Ok(dim.to_integer() as u64)
    }

    /// Root subsystem on the nodes of J, with nodes relabelled in the order
    /// given by `subset` (sorted ascending).
    pub fn subsystem(&self, subset: &[usize]) -> (RootSystem, Vec<usize>) {
        let mut nodes: Vec<usize> = subset.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let sub_cartan: Vec<Vec<i64>> = nodes
            .iter()
            .map(|&i| nodes.iter().map(|&j| self.cartan[i][j]).collect())
            .collect();
        let label = format!("{}|{:?}", self.label, nodes);
        (RootSystem::from_cartan(label, sub_cartan), nodes)
    }

    /// Project a weight to the fundamental coordinates of the subsystem.
    pub fn project_weight(&self, subset_sorted: &[usize], w: &Weight) -> Weight {
        Weight(subset_sorted.iter().map(|&j| w.0[j]).collect())
    }

    pub fn to_json(&self) -> crate::jsonout::JVal {
        use crate::jsonout::JVal;
        JVal::obj(vec![
            ("type", JVal::str(&self.label)),
            ("rank", JVal::Int(self.rank as i64)),
            (
                "cartan",
                JVal::Arr(
                    self.cartan
                        .iter()
                        .map(|row| {
                            JVal::Arr(row.iter().map(|&v| JVal::Int(v)).collect())
                        })
                        .collect(),
                ),
            ),
        ])
    }
}

fn positive_roots_by_closure(cartan: &[Vec<i64>]) -> Vec<Root> {
    let n = cartan.len();
    let mut seen: Vec<Vec<i64>> = Vec::new();
    let mut queue: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        seen.push(e.clone());
        queue.push(e);
    }
    while let Some(r) = queue.pop() {
        for i in 0..n {
            // s_i in simple-root coordinates
            let pair: i64 = (0..n).map(|j| cartan[i][j] * r[j]).sum();
            let mut img = r.clone();
            img[i] -= pair;
            if !seen.contains(&img) {
                seen.push(img.clone());
                queue.push(img);
            }
        }
    }
    let mut pos: Vec<Vec<i64>> = seen
        .into_iter()
        .filter(|r| r.iter().all(|&c| c >= 0))
        .collect();
    pos.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
    pos.into_iter()
        .map(|rc| {
            let fund: Vec<i64> = (0..n)
                .map(|k| (0..n).map(|j| cartan[k][j] * rc[j]).sum())
                .collect();
            Root {
                root_coords: rc,
                fund_coords: fund,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_root_counts() {
        for (label, count) in [
            ("A1", 1),
            ("A2", 3),
            ("A3", 6),
            ("A4", 10),
            ("B2", 4),
            ("C2", 4),
            ("G2", 6),
            ("D4", 12),
        ] {
            let rs = build_root_system(label).unwrap();
            assert_eq!(rs.positive_roots().len(), count, "{label}");
        }
    }

    #[test]
    fn rejects_unknown_type() {
        assert!(build_root_system("E8").is_err());
        assert!(build_root_system("A0").is_err());
    }

    #[test]
    fn cartan_invariants() {
        for label in SUPPORTED_TYPES {
            let rs = build_root_system(label).unwrap();
            for i in 0..rs.rank() {
                assert_eq!(rs.cartan()[i][i], 2);
                for j in 0..rs.rank() {
                    if i != j {
                        assert!(rs.cartan()[i][j] <= 0);
                    }
                    // pairing(coroot_i, root_j) = cartan[i][j]
                    assert_eq!(
                        rs.pairing_simple(i, &rs.simple_root(j)),
                        Rat::from_integer(rs.cartan()[i][j])
                    );
                }
            }
        }
    }

    #[test]
    fn theta_examples() {
        let a1 = build_root_system("A1").unwrap();
        assert_eq!(a1.theta_involution(&[0]).unwrap()[0], 0);

        let a2 = build_root_system("A2").unwrap();
        let th = a2.theta_involution(&[0, 1]).unwrap();
        assert_eq!((th[0], th[1]), (1, 0));

        let b2 = build_root_system("B2").unwrap();
        let th = b2.theta_involution(&[0, 1]).unwrap();
        assert_eq!((th[0], th[1]), (0, 1));

        assert!(a2.theta_involution(&[]).is_err());
        let a3 = build_root_system("A3").unwrap();
        assert!(a3.theta_involution(&[0, 2]).is_err()); // disconnected
    }

    #[test]
    fn theta_squared_identity() {
        for label in SUPPORTED_TYPES {
            let rs = build_root_system(label).unwrap();
            let th = rs.theta_full();
            for i in 0..rs.rank() {
                assert_eq!(th[th[i]], i);
            }
        }
    }

    #[test]
    fn longest_element_lengths() {
        let a1 = build_root_system("A1").unwrap();
        assert_eq!(a1.longest_element(&[0]).unwrap().0, vec![0]);

        let a2 = build_root_system("A2").unwrap();
        assert_eq!(a2.longest_element(&[0, 1]).unwrap().len(), 3);

        let g2 = build_root_system("G2").unwrap();
        assert_eq!(g2.longest_element(&[0, 1]).unwrap().len(), 6);

        // parabolic: length = |Delta_+ cap Delta_J|
        let a3 = build_root_system("A3").unwrap();
        assert_eq!(a3.longest_element(&[0, 1]).unwrap().len(), 3);
        assert_eq!(a3.longest_element(&[1]).unwrap().len(), 1);
    }

    #[test]
    fn w0_squared_is_identity_on_simple_roots() {
        for label in SUPPORTED_TYPES {
            let rs = build_root_system(label).unwrap();
            for i in 0..rs.rank() {
                let a = rs.simple_root(i);
                assert_eq!(rs.w0_action(&rs.w0_action(&a)), a, "{label} node {i}");
            }
        }
    }

    #[test]
    fn reflections_preserve_root_set() {
        for label in SUPPORTED_TYPES {
            let rs = build_root_system(label).unwrap();
            let all: Vec<Weight> = rs
                .positive_roots()
                .iter()
                .map(|r| Weight::from_ints(&r.fund_coords))
                .collect();
            for alpha in &all {
                for i in 0..rs.rank() {
                    let img = rs.reflect(i, alpha);
                    let neg = img.scale(-Rat::one());
                    assert!(
                        all.contains(&img) || all.contains(&neg),
                        "{label}: reflection left the root set"
                    );
                }
            }
        }
    }

    #[test]
    fn weyl_dimension_examples() {
        let a1 = build_root_system("A1").unwrap();
        for m in 0..=6 {
            assert_eq!(
                a1.weyl_dimension(&Weight::from_ints(&[m])).unwrap(),
                (m + 1) as u64
            );
        }
        let a2 = build_root_system("A2").unwrap();
        assert_eq!(a2.weyl_dimension(&Weight::from_ints(&[1, 1])).unwrap(), 8);
        let b2 = build_root_system("B2").unwrap();
        assert_eq!(b2.weyl_dimension(&Weight::from_ints(&[0, 1])).unwrap(), 4);
        assert!(a2.weyl_dimension(&Weight::from_ints(&[-1, 0])).is_err());
    }

    #[test]
    fn subsystem_projection() {
        let a3 = build_root_system("A3").unwrap();
        let (sub, nodes) = a3.subsystem(&[1, 2]);
        assert_eq!(nodes, vec![1, 2]);
        assert_eq!(sub.rank(), 2);
        assert_eq!(sub.positive_roots().len(), 3); // an A2 inside A3
    }
}

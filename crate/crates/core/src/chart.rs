//! Nested sets, adapted bases, and chart coordinates for the type-A
//! moduli space of marked genus-0 curves.
//!
//! A labelled binary rooted tree on n leaves determines the maximal nested
//! set S(T) = { P_v } (each P_v recorded by the leaf set above v) and, when
//! planar, the adapted basis alpha_v = eps_{l(v)} - eps_{r(v)} with l(v) the
//! maximal label in the left branch and r(v) the minimal label in the right
//! branch.  Chart coordinates u_P for non-root P recover a configuration via
//! z = sum_P (prod_{P subset Q} u_Q) alpha_P^*, with u at the root set to 1.

use crate::error::{Error, Result};
use crate::rootdata::Rat;
use crate::tree::LabelledTree;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// One internal vertex of the tree, as chart data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedElement {
    /// Sorted leaf labels (1-based) above the vertex.
    pub leaf_set: Vec<usize>,
    /// Adapted-basis functional alpha = eps_l - eps_r (planar trees only).
    pub basis_pair: Option<(usize, usize)>,
    /// Index of the parent element in the chart's `sets` list; None at root.
    pub parent: Option<usize>,
}

/// A maximal nested set with adapted basis and optional coordinates.
#[derive(Debug, Clone)]
pub struct NestedSetChart {
    pub n: usize,
    /// Elements ordered by decreasing leaf-set size; index 0 is the root.
    pub sets: Vec<NestedElement>,
}

/// A configuration of n distinct real points (exact rationals), read as a
/// point of the moduli space by marking them together with infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub z: Vec<Rat>,
}

impl Configuration {
    pub fn new(z: Vec<Rat>) -> Result<Configuration> {
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                if z[i] == z[j] {
                    return Err(Error::CoincidentPoints);
                }
            }
        }
        Ok(Configuration { z })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.z
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    }
}

/// Image of a chart point: interior configurations carry distinct points;
/// boundary points (some u = 0) are described by their collapsed clusters.
#[derive(Debug, Clone)]
pub enum ChartImage {
    Interior(Configuration),
    Boundary {
        /// evaluation of the chart formula (clusters collide)
        z: Vec<Rat>,
        /// leaf sets whose coordinate vanished, outermost first
        collapsed: Vec<Vec<usize>>,
    },
}

/// S(T) and, for planar input, b(T).
pub fn tree_to_nested_set(tree: &LabelledTree, planar: bool) -> Result<NestedSetChart> {
    tree.validate()?;
    let n = tree.n_leaves();
    let mut sets: Vec<NestedElement> = Vec::new();
    collect(tree, planar, &mut sets);
    // order by decreasing size so the root (full set) comes first
    sets.sort_by_key(|e| std::cmp::Reverse(e.leaf_set.len()));
    // parent pointers: minimal strictly-containing element
    let parents: Vec<Option<usize>> = sets
        .iter()
        .map(|e| {
            sets.iter()
                .enumerate()
                .filter(|(_, f)| {
                    f.leaf_set.len() > e.leaf_set.len() && is_subset(&e.leaf_set, &f.leaf_set)
                })
                .min_by_key(|(_, f)| f.leaf_set.len())
                .map(|(k, _)| k)
        })
        .collect();
    for (e, p) in sets.iter_mut().zip(parents) {
        e.parent = p;
    }
    Ok(NestedSetChart { n, sets })
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let bs: BTreeSet<usize> = b.iter().copied().collect();
    a.iter().all(|x| bs.contains(x))
}

fn collect(tree: &LabelledTree, planar: bool, out: &mut Vec<NestedElement>) -> Vec<usize> {
    match tree {
        LabelledTree::Leaf(k) => vec![*k],
        LabelledTree::Node(l, r) => {
            let lv = collect(l, planar, out);
            let rv = collect(r, planar, out);
            let basis_pair = if planar {
                // maximal label on the left, minimal label on the right
                Some((
                    lv.iter().copied().max().unwrap(),
                    rv.iter().copied().min().unwrap(),
                ))
            } else {
                None
            };
            let mut leaf_set: Vec<usize> = lv.iter().chain(rv.iter()).copied().collect();
            leaf_set.sort_unstable();
            out.push(NestedElement {
                leaf_set,
                basis_pair,
                parent: None,
            });
            let mut both = lv;
            both.extend(rv);
            both
        }
    }
}

impl NestedSetChart {
    /// The adapted basis as (l, r) pairs, root first.
    pub fn adapted_basis(&self) -> Result<Vec<(usize, usize)>> {
        self.sets
            .iter()
            .map(|e| {
                e.basis_pair
                    .ok_or_else(|| Error::BadChart("chart was built without planar data".into()))
            })
            .collect()
    }

    /// Evaluate the chart at coordinates `u` (one value per non-root set, in
    /// the order of `sets[1..]`).  Zero coordinates yield a boundary
    /// descriptor instead of a configuration.
    pub fn evaluate(&self, u: &[Rat]) -> Result<ChartImage> {
        let m = self.sets.len();
        if u.len() != m - 1 {
            return Err(Error::BadChart(format!(
                "expected {} coordinates, got {}",
                m - 1,
                u.len()
            )));
        }
        if u.iter().all(|c| c.is_zero()) && m > 1 {
            return Err(Error::BadChart("all-zero coordinate vector".into()));
        }
        let basis = self.adapted_basis()?;
        // dual basis alpha_P^* inside { z : z_n = 0 }: solve the linear
        // system alpha_Q(v_P) = delta_QP exactly
        let dual = self.dual_basis(&basis)?;
        // multiplier of alpha_P^*: product of u over all Q containing P
        // (root included with u = 1)
        let mut mult = vec![Rat::one(); m];
        for p in 1..m {
            let parent = self.sets[p].parent.expect("non-root has a parent");
            mult[p] = mult[parent] * u[p - 1];
        }
        let mut z = vec![Rat::zero(); self.n];
        for p in 0..m {
            for k in 0..self.n {
                z[k] += mult[p] * dual[p][k];
            }
        }
        let collapsed: Vec<Vec<usize>> = (1..m)
            .filter(|&p| u[p - 1].is_zero())
            .map(|p| self.sets[p].leaf_set.clone())
            .collect();
        if collapsed.is_empty() {
            Ok(ChartImage::Interior(Configuration::new(z)?))
        } else {
            Ok(ChartImage::Boundary { z, collapsed })
        }
    }

    /// v_P with (eps_l - eps_r)(v_Q) = delta_PQ, gauge-fixed by z_n = 0.
    fn dual_basis(&self, basis: &[(usize, usize)]) -> Result<Vec<Vec<Rat>>> {
        let m = self.sets.len();
        // unknowns: z_1..z_{n-1} (z_n = 0); equations: m rows
        // The nested-set basis has m = n-1 functionals.
        if m != self.n - 1 {
            return Err(Error::BadChart("nested set is not maximal".into()));
        }
        let mut duals = Vec::with_capacity(m);
        for target in 0..m {
            // solve alpha_q(v) = delta_{q,target}
            let mut a: Vec<Vec<Rat>> = Vec::with_capacity(m);
            let mut rhs: Vec<Rat> = Vec::with_capacity(m);
            for (q, &(l, r)) in basis.iter().enumerate() {
                let mut row = vec![Rat::zero(); self.n - 1];
                if l < self.n {
                    row[l - 1] += Rat::one();
                }
                if r < self.n {
                    row[r - 1] -= Rat::one();
                }
                a.push(row);
                rhs.push(if q == target { Rat::one() } else { Rat::zero() });
            }
            let sol = solve(&mut a, &mut rhs)?;
            let mut v = sol;
            v.push(Rat::zero()); // z_n = 0 gauge
            duals.push(v);
        }
        Ok(duals)
    }
}

fn solve(a: &mut [Vec<Rat>], rhs: &mut [Rat]) -> Result<Vec<Rat>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::BadChart("adapted basis is degenerate".into()))?;
        a.swap(col, piv);
        rhs.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
        }
        rhs[col] /= p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let v = a[col][j];
                    a[r][j] -= f * v;
                }
                let v = rhs[col];
                rhs[r] -= f * v;
            }
        }
    }
    Ok(rhs.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(n: i64) -> Rat {
        Rat::from_integer(n)
    }

    #[test]
    fn nested_set_of_left_comb() {
        let t = LabelledTree::parse("((1 2) 3)").unwrap();
        let chart = tree_to_nested_set(&t, true).unwrap();
        assert_eq!(chart.sets.len(), 2);
        assert_eq!(chart.sets[0].leaf_set, vec![1, 2, 3]);
        assert_eq!(chart.sets[1].leaf_set, vec![1, 2]);
        let basis = chart.adapted_basis().unwrap();
        assert_eq!(basis[0], (2, 3)); // root: eps_2 - eps_3
        assert_eq!(basis[1], (1, 2));
        assert_eq!(chart.sets[1].parent, Some(0));
    }

    #[test]
    fn nested_set_of_right_comb_basis() {
        let t = LabelledTree::parse("(1 (2 3))").unwrap();
        let chart = tree_to_nested_set(&t, true).unwrap();
        let basis = chart.adapted_basis().unwrap();
        // root eps_1 - eps_2, inner eps_2 - eps_3
        assert_eq!(basis[0], (1, 2));
        assert_eq!(basis[1], (2, 3));
    }

    #[test]
    fn two_leaves_nested_set_is_root_only() {
        let t = LabelledTree::parse("(1 2)").unwrap();
        let chart = tree_to_nested_set(&t, false).unwrap();
        assert_eq!(chart.sets.len(), 1);
        assert_eq!(chart.sets[0].leaf_set, vec![1, 2]);
    }

    #[test]
    fn chart_evaluation_example() {
        let t = LabelledTree::parse("((1 2) 3)").unwrap();
        let chart = tree_to_nested_set(&t, true).unwrap();
        match chart.evaluate(&[Rat::one()]).unwrap() {
            ChartImage::Interior(cfg) => {
                assert_eq!(cfg.z, vec![rat(2), rat(1), rat(0)]);
            }
            _ => panic!("interior expected"),
        }
    }

    #[test]
    fn chart_boundary_descriptor() {
        let t = LabelledTree::parse("(((1 2) 3) 4)").unwrap();
        let chart = tree_to_nested_set(&t, true).unwrap();
        // collapse only the {1,2} cluster
        let mut u = vec![Rat::one(); 2];
        let idx = chart
            .sets
            .iter()
            .position(|e| e.leaf_set == vec![1, 2])
            .unwrap();
        u[idx - 1] = Rat::zero();
        match chart.evaluate(&u).unwrap() {
            ChartImage::Boundary { z, collapsed } => {
                assert_eq!(collapsed, vec![vec![1, 2]]);
                assert_eq!(z[0], z[1]); // the cluster has collapsed
                assert_ne!(z[0], z[2]);
                assert_ne!(z[2], z[3]);
            }
            _ => panic!("boundary expected"),
        }
    }

    #[test]
    fn positive_coordinates_give_ordered_points() {
        // for the standard planar combs, positive u gives strictly
        // decreasing z (z_1 > ... > z_n)
        let mut rng = {
            use rand::SeedableRng;
            rand_chacha::ChaCha8Rng::seed_from_u64(5)
        };
        use rand::Rng;
        for s in ["((1 2) 3)", "(1 (2 3))", "((1 2) (3 4))", "(((1 2) 3) 4)"] {
            let t = LabelledTree::parse(s).unwrap();
            let chart = tree_to_nested_set(&t, true).unwrap();
            for _ in 0..20 {
                let u: Vec<Rat> = (0..chart.sets.len() - 1)
                    .map(|_| Rat::new(rng.gen_range(1..40), rng.gen_range(1..8)))
                    .collect();
                match chart.evaluate(&u).unwrap() {
                    ChartImage::Interior(cfg) => {
                        for k in 1..cfg.z.len() {
                            assert!(cfg.z[k - 1] > cfg.z[k], "{s}: {:?}", cfg.z);
                        }
                    }
                    _ => panic!("interior expected"),
                }
            }
        }
    }

    #[test]
    fn rejects_all_zero_and_bad_arity() {
        let t = LabelledTree::parse("((1 2) 3)").unwrap();
        let chart = tree_to_nested_set(&t, true).unwrap();
        assert!(chart.evaluate(&[]).is_err());
        assert!(chart.evaluate(&[Rat::zero()]).is_err());
    }
}

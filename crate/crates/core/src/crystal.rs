//! Finite crystals: generation from the path model, tensor products,
//! components, restriction, multiplicity sets, and normality checking.
//!
//! Elements carry dense integer labels.  For generated crystals the labels
//! follow BFS order from the highest-weight element with child order
//! f_1, ..., f_r; for tensor products the label is the mixed-radix flat
//! index of the factor tuple (leftmost factor most significant), which
//! makes the associator literally the identity on labels.

use crate::error::{Error, Result};
use crate::jsonout::JVal;
use crate::path::PathElement;
use crate::rootdata::{Rat, RootSystem, Weight};
use std::collections::{HashMap, VecDeque};

#[derive(Debug, Clone)]
pub struct Crystal {
    rs: RootSystem,
    wt: Vec<Weight>,
    /// e_ops[i][x] / f_ops[i][x]: partial Kashiwara operators per node.
    e_ops: Vec<Vec<Option<u32>>>,
    f_ops: Vec<Vec<Option<u32>>>,
    /// Path realizations when the crystal came from the path model.
    paths: Option<Vec<PathElement>>,
    /// Factor sizes when the crystal is a flat tensor product.
    factor_dims: Vec<usize>,
}

/// One connected component: its unique source (all e_i undefined) and the
/// member labels in BFS order.
#[derive(Debug, Clone)]
pub struct Component {
    pub highest: usize,
    pub members: Vec<usize>,
}

/// Highest-weight elements of a fixed dominant weight inside a crystal.
#[derive(Debug, Clone)]
pub struct MultiplicitySet {
    pub mu: Weight,
    pub members: Vec<usize>,
}

/// Witness for a failed normality check.
#[derive(Debug, Clone)]
pub struct NormalityWitness {
    pub element: usize,
    pub reason: String,
}

impl Crystal {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn len(&self) -> usize {
        self.wt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wt.is_empty()
    }

    pub fn weight(&self, x: usize) -> &Weight {
        &self.wt[x]
    }

    pub fn e(&self, i: usize, x: usize) -> Option<usize> {
        self.e_ops[i][x].map(|v| v as usize)
    }

    pub fn f(&self, i: usize, x: usize) -> Option<usize> {
        self.f_ops[i][x].map(|v| v as usize)
    }

    pub fn path(&self, x: usize) -> Option<&PathElement> {
        self.paths.as_ref().map(|p| &p[x])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    /// epsilon_i: how many times e_i applies.
    pub fn eps(&self, i: usize, x: usize) -> i64 {
        let mut k = 0;
        let mut cur = x;
        while let Some(next) = self.e(i, cur) {
            cur = next;
            k += 1;
        }
        k
    }

    /// phi_i: how many times f_i applies.
    pub fn phi(&self, i: usize, x: usize) -> i64 {
        let mut k = 0;
        let mut cur = x;
        while let Some(next) = self.f(i, cur) {
            cur = next;
            k += 1;
        }
        k
    }

    /// Crystal of the irreducible highest-weight representation, built by
    /// closing the straight path to `lambda` under the root operators.
    pub fn generate(rs: &RootSystem, lambda: &Weight) -> Result<Crystal> {
        if !lambda.is_dominant() {
            return Err(Error::NonDominant(
                lambda.0.iter().map(|c| c.to_string()).collect(),
            ));
        }
        let rank = rs.rank();
        let start = PathElement::straight(lambda);
        let mut index: HashMap<PathElement, usize> = HashMap::new();
        let mut elems: Vec<PathElement> = vec![start.clone()];
        index.insert(start, 0);
        // BFS with f-children first, then e, for deterministic labels
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            let cur = elems[x].clone();
            for img in (0..rank)
                .filter_map(|i| cur.f_op(rs, i))
                .chain((0..rank).filter_map(|i| cur.e_op(rs, i)))
            {
                intern(&mut index, &mut elems, &mut queue, img);
            }
        }
        let n = elems.len();
        let mut e_ops: Vec<Vec<Option<u32>>> = vec![vec![None; n]; rank];
        let mut f_ops: Vec<Vec<Option<u32>>> = vec![vec![None; n]; rank];
        for (x, p) in elems.iter().enumerate() {
            for i in 0..rank {
                e_ops[i][x] = p.e_op(rs, i).map(|q| index[&q] as u32);
                f_ops[i][x] = p.f_op(rs, i).map(|q| index[&q] as u32);
            }
        }
        let wt: Vec<Weight> = elems.iter().map(|p| p.endpoint()).collect();
        let c = Crystal {
            rs: rs.clone(),
            wt,
            e_ops,
            f_ops,
            paths: Some(elems),
            factor_dims: vec![],
        };
        debug_assert!(c.verify_partial_inverse());
        Ok(c)
    }

    /// Mutual-inverse axiom: f_i e_i = id and e_i f_i = id where defined.
    pub fn verify_partial_inverse(&self) -> bool {
        for i in 0..self.rs.rank() {
            for x in 0..self.len() {
                if let Some(y) = self.e(i, x) {
                    if self.f(i, y) != Some(x) {
                        return false;
                    }
                }
                if let Some(y) = self.f(i, x) {
                    if self.e(i, y) != Some(x) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Tensor product on the Cartesian product of the underlying sets.
    pub fn tensor(b1: &Crystal, b2: &Crystal) -> Result<Crystal> {
        if b1.rs != b2.rs {
            return Err(Error::RootSystemMismatch);
        }
        let rank = b1.rs.rank();
        let (n1, n2) = (b1.len(), b2.len());
        let n = n1 * n2;
        let flat = |a: usize, b: usize| a * n2 + b;
        let mut wt = Vec::with_capacity(n);
        for a in 0..n1 {
            for b in 0..n2 {
                wt.push(b1.wt[a].add(&b2.wt[b]));
            }
        }
        let mut e_ops = vec![vec![None; n]; rank];
        let mut f_ops = vec![vec![None; n]; rank];
        for i in 0..rank {
            for a in 0..n1 {
                let ea = b1.eps(i, a);
                for b in 0..n2 {
                    let pb = b2.phi(i, b);
                    // e acts on the left factor iff eps(b1) > phi(b2)
                    let e_img = if ea > pb {
                        b1.e(i, a).map(|a2| flat(a2, b))
                    } else {
                        b2.e(i, b).map(|b2x| flat(a, b2x))
                    };
                    // f acts on the left factor iff eps(b1) >= phi(b2)
                    let f_img = if ea >= pb {
                        b1.f(i, a).map(|a2| flat(a2, b))
                    } else {
                        b2.f(i, b).map(|b2x| flat(a, b2x))
                    };
                    e_ops[i][flat(a, b)] = e_img.map(|v| v as u32);
                    f_ops[i][flat(a, b)] = f_img.map(|v| v as u32);
                }
            }
        }
        let mut factor_dims = if b1.factor_dims.is_empty() {
            vec![n1]
        } else {
            b1.factor_dims.clone()
        };
        if b2.factor_dims.is_empty() {
            factor_dims.push(n2);
        } else {
            factor_dims.extend_from_slice(&b2.factor_dims);
        }
        Ok(Crystal {
            rs: b1.rs.clone(),
            wt,
            e_ops,
            f_ops,
            paths: None,
            factor_dims,
        })
    }

    /// Left-fold tensor of several crystals; flat labels are mixed-radix
    /// tuples with the leftmost factor most significant.
    pub fn tensor_many(factors: &[&Crystal]) -> Result<Crystal> {
        assert!(!factors.is_empty());
        let mut acc = factors[0].clone();
        if acc.factor_dims.is_empty() {
            acc.factor_dims = vec![acc.len()];
        }
        for b in &factors[1..] {
            acc = Crystal::tensor(&acc, b)?;
        }
        Ok(acc)
    }

    /// Decode a flat tensor label into the factor tuple.
    pub fn unflatten(&self, mut x: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.factor_dims.len()];
        for (k, &d) in self.factor_dims.iter().enumerate().rev() {
            tuple[k] = x % d;
            x /= d;
        }
        tuple
    }

    pub fn flatten(&self, tuple: &[usize]) -> usize {
        let mut x = 0;
        for (k, &d) in self.factor_dims.iter().enumerate() {
            x = x * d + tuple[k];
        }
        x
    }

    /// Connected components with their unique sources.
    ///
    /// Errors if some component has zero or more than one source — that is a
    /// witness of non-normality for semi-normal inputs.
    pub fn components(&self) -> Result<Vec<Component>> {
        let n = self.len();
        let mut comp_of = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if comp_of[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start];
            comp_of[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for i in 0..self.rs.rank() {
                    for y in [self.e(i, x), self.f(i, x)].into_iter().flatten() {
                        if comp_of[y] == usize::MAX {
                            comp_of[y] = id;
                            members.push(y);
                            queue.push_back(y);
                        }
                    }
                }
            }
            comps.push(members);
        }
        let mut out = Vec::with_capacity(comps.len());
        for members in comps {
            let sources: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&x| (0..self.rs.rank()).all(|i| self.e(i, x).is_none()))
                .collect();
            if sources.len() != 1 {
                return Err(Error::NotNormal(format!(
                    "component of element {} has {} sources",
                    members[0],
                    sources.len()
                )));
            }
            out.push(Component {
                highest: sources[0],
                members,
            });
        }
        Ok(out)
    }

    /// All highest-weight elements of weight mu.
    pub fn multiplicity_set(&self, mu: &Weight) -> MultiplicitySet {
        let members = (0..self.len())
            .filter(|&x| {
                self.wt[x] == *mu && (0..self.rs.rank()).all(|i| self.e(i, x).is_none())
            })
            .collect();
        MultiplicitySet {
            mu: mu.clone(),
            members,
        }
    }

    /// Same elements, operators kept only for nodes in J, weights projected
    /// to the subsystem lattice.
    pub fn restrict(&self, subset: &[usize]) -> Crystal {
        let (sub_rs, nodes) = self.rs.subsystem(subset);
        let wt = self
            .wt
            .iter()
            .map(|w| self.rs.project_weight(&nodes, w))
            .collect();
        let e_ops = nodes.iter().map(|&j| self.e_ops[j].clone()).collect();
        let f_ops = nodes.iter().map(|&j| self.f_ops[j].clone()).collect();
        Crystal {
            rs: sub_rs,
            wt,
            e_ops,
            f_ops,
            paths: None,
            factor_dims: self.factor_dims.clone(),
        }
    }

    /// Semi-normality: phi_i - eps_i = <alpha_i^vee, wt> for every element.
    pub fn check_semi_normal(&self) -> std::result::Result<(), NormalityWitness> {
        for x in 0..self.len() {
            for i in 0..self.rs.rank() {
                let lhs = Rat::from_integer(self.phi(i, x) - self.eps(i, x));
                if lhs != self.wt[x].0[i] {
                    return Err(NormalityWitness {
                        element: x,
                        reason: format!(
                            "phi - eps = {} but <alpha_{}^vee, wt> = {}",
                            lhs,
                            i + 1,
                            self.wt[x].0[i]
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Normality via the rank-2 criterion: semi-normal, and for each
    /// connected J with |J| <= 2 every component of B_J is isomorphic to the
    /// generated crystal of its highest weight.
    pub fn check_normal(&self) -> std::result::Result<(), NormalityWitness> {
        self.check_semi_normal()?;
        let rank = self.rs.rank();
        let mut subsets: Vec<Vec<usize>> = (0..rank).map(|i| vec![i]).collect();
        for i in 0..rank {
            for j in i + 1..rank {
                if self.rs.cartan()[i][j] != 0 {
                    subsets.push(vec![i, j]);
                }
            }
        }
        for subset in subsets {
            let bj = self.restrict(&subset);
            let comps = match bj.components() {
                Ok(c) => c,
                Err(e) => {
                    return Err(NormalityWitness {
                        element: 0,
                        reason: format!("restriction to {subset:?}: {e}"),
                    })
                }
            };
            for comp in comps {
                let hw = bj.wt[comp.highest].clone();
                if !hw.is_dominant() {
                    return Err(NormalityWitness {
                        element: comp.highest,
                        reason: format!("source weight not dominant in restriction {subset:?}"),
                    });
                }
                let model = Crystal::generate(&bj.rs, &hw).expect("dominant weight");
                if bj.component_iso(comp.highest, &model, 0).is_none() {
                    return Err(NormalityWitness {
                        element: comp.highest,
                        reason: format!(
                            "component not isomorphic to the generated crystal of its \
                             highest weight in restriction {subset:?}"
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Weight-respecting crystal isomorphism from the component of `start`
    /// onto the component of `other_start`, as a partial map of labels.
    pub fn component_iso(
        &self,
        start: usize,
        other: &Crystal,
        other_start: usize,
    ) -> Option<HashMap<usize, usize>> {
        if self.rs.rank() != other.rs.rank() {
            return None;
        }
        if self.wt[start] != other.wt[other_start] {
            return None;
        }
        let mut map: HashMap<usize, usize> = HashMap::new();
        map.insert(start, other_start);
        let mut queue = VecDeque::from([start]);
        let mut seen = vec![start].into_iter().collect::<std::collections::HashSet<_>>();
        while let Some(x) = queue.pop_front() {
            let y = map[&x];
            for i in 0..self.rs.rank() {
                for (mine, theirs) in [
                    (self.f(i, x), other.f(i, y)),
                    (self.e(i, x), other.e(i, y)),
                ] {
                    match (mine, theirs) {
                        (None, None) => {}
                        (Some(xm), Some(ym)) => {
                            if self.wt[xm] != other.wt[ym] {
                                return None;
                            }
                            if let Some(&prev) = map.get(&xm) {
                                if prev != ym {
                                    return None;
                                }
                            } else {
                                map.insert(xm, ym);
                            }
                            if seen.insert(xm) {
                                queue.push_back(xm);
                            }
                        }
                        _ => return None,
                    }
                }
            }
        }
        Some(map)
    }

    /// Full isomorphism of crystals (bijective on all elements), if any.
    pub fn isomorphism(&self, other: &Crystal) -> Option<Vec<usize>> {
        if self.len() != other.len() {
            return None;
        }
        let mine = self.components().ok()?;
        let theirs = other.components().ok()?;
        if mine.len() != theirs.len() {
            return None;
        }
        let mut used = vec![false; theirs.len()];
        let mut total: Vec<usize> = vec![usize::MAX; self.len()];
        for comp in &mine {
            let mut matched = false;
            for (k, tc) in theirs.iter().enumerate() {
                if used[k] || other.wt[tc.highest] != self.wt[comp.highest] {
                    continue;
                }
                if let Some(map) = self.component_iso(comp.highest, other, tc.highest) {
                    if map.len() != comp.members.len() {
                        return None;
                    }
                    for (a, b) in map {
                        total[a] = b;
                    }
                    used[k] = true;
                    matched = true;
                    break;
                }
            }
            if !matched {
                return None;
            }
        }
        if total.contains(&usize::MAX) {
            return None;
        }
        Some(total)
    }

    /// f-edge JSON graph per the documented schema.
    pub fn to_json(&self) -> JVal {
        let elements: Vec<JVal> = (0..self.len())
            .map(|x| {
                let coords: Vec<JVal> = self.wt[x]
                    .0
                    .iter()
                    .map(|c| {
                        if c.is_integer() {
                            JVal::Int(c.to_integer())
                        } else {
                            JVal::str(&c.to_string())
                        }
                    })
                    .collect();
                JVal::obj(vec![("id", JVal::Int(x as i64)), ("wt", JVal::Arr(coords))])
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..self.rs.rank() {
            for x in 0..self.len() {
                if let Some(y) = self.f(i, x) {
                    edges.push(JVal::obj(vec![
                        ("from", JVal::Int(x as i64)),
                        ("to", JVal::Int(y as i64)),
                        ("i", JVal::Int((i + 1) as i64)),
                    ]));
                }
            }
        }
        JVal::obj(vec![
            ("elements", JVal::Arr(elements)),
            ("edges", JVal::Arr(edges)),
        ])
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph crystal {\n  rankdir=TB;\n");
        for x in 0..self.len() {
            let label: Vec<String> = self.wt[x].0.iter().map(|c| c.to_string()).collect();
            s.push_str(&format!("  n{} [label=\"{}\"];\n", x, label.join(",")));
        }
        for i in 0..self.rs.rank() {
            for x in 0..self.len() {
                if let Some(y) = self.f(i, x) {
                    s.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", x, y, i + 1));
                }
            }
        }
        s.push_str("}\n");
        s
    }

    /// Hand-construction entry point for tests and adversarial inputs.
    pub fn from_raw(
        rs: RootSystem,
        wt: Vec<Weight>,
        e_ops: Vec<Vec<Option<u32>>>,
        f_ops: Vec<Vec<Option<u32>>>,
    ) -> Crystal {
        Crystal {
            rs,
            wt,
            e_ops,
            f_ops,
            paths: None,
            factor_dims: vec![],
        }
    }
}

fn intern(
    index: &mut HashMap<PathElement, usize>,
    elems: &mut Vec<PathElement>,
    queue: &mut VecDeque<usize>,
    p: PathElement,
) -> usize {
    if let Some(&id) = index.get(&p) {
        return id;
    }
    let id = elems.len();
    elems.push(p.clone());
    index.insert(p, id);
    queue.push_back(id);
    id
}

//! Labelled binary rooted trees, bracketings, and the grafting operad.

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

/// A planar labelled binary rooted tree.  Leaf labels are 1-based.  The
/// planar structure is the left/right order; forget it with
/// [`LabelledTree::canonical_shape`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LabelledTree {
    Leaf(usize),
    Node(Box<LabelledTree>, Box<LabelledTree>),
}

impl LabelledTree {
    pub fn node(l: LabelledTree, r: LabelledTree) -> LabelledTree {
        LabelledTree::Node(Box::new(l), Box::new(r))
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            LabelledTree::Leaf(k) => out.push(*k),
            LabelledTree::Node(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            LabelledTree::Leaf(_) => 1,
            LabelledTree::Node(l, r) => l.n_leaves() + r.n_leaves(),
        }
    }

    /// Leaves must be exactly {1..n}.
    pub fn validate(&self) -> Result<()> {
        let leaves = self.leaves();
        let set: BTreeSet<usize> = leaves.iter().copied().collect();
        if set.len() != leaves.len() || set.iter().min() != Some(&1) || *set.iter().max().unwrap() != leaves.len()
        {
            return Err(Error::BadTree(format!(
                "leaf labels {leaves:?} are not a permutation of 1..n"
            )));
        }
        Ok(())
    }

    /// The non-planar canonical form: at every vertex put the branch with
    /// the smaller minimal leaf on the left.
    pub fn canonical_shape(&self) -> LabelledTree {
        match self {
            LabelledTree::Leaf(k) => LabelledTree::Leaf(*k),
            LabelledTree::Node(l, r) => {
                let lc = l.canonical_shape();
                let rc = r.canonical_shape();
                let lmin = lc.leaves().into_iter().min().unwrap();
                let rmin = rc.leaves().into_iter().min().unwrap();
                if lmin <= rmin {
                    LabelledTree::node(lc, rc)
                } else {
                    LabelledTree::node(rc, lc)
                }
            }
        }
    }

    /// Print as an ordered bracketing, e.g. `((1 2) 3)`.
    pub fn to_bracketing(&self) -> String {
        format!("{self}")
    }

    /// Parse an ordered bracketing.  Labels are decimal integers; parentheses
    /// group exactly two operands; whitespace separates tokens (optional
    /// around parentheses).
    pub fn parse(input: &str) -> Result<LabelledTree> {
        let mut toks = tokenize(input)?;
        toks.reverse();
        let t = parse_expr(&mut toks)?;
        if !toks.is_empty() {
            return Err(Error::BadTree("trailing input".into()));
        }
        t.validate()?;
        Ok(t)
    }

    /// Operadic grafting: substitute `inners[j]` for the leaf labelled j+1,
    /// shifting labels so the result is labelled 1..(k_1+...+k_n).
    pub fn graft(&self, inners: &[LabelledTree]) -> Result<LabelledTree> {
        let n = self.n_leaves();
        if inners.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: inners.len(),
            });
        }
        for t in inners {
            t.validate()?;
        }
        self.validate()?;
        let arities: Vec<usize> = inners.iter().map(|t| t.n_leaves()).collect();
        let mut offsets = vec![0usize; n];
        for j in 1..n {
            offsets[j] = offsets[j - 1] + arities[j - 1];
        }
        Ok(self.graft_rec(inners, &offsets))
    }

    fn graft_rec(&self, inners: &[LabelledTree], offsets: &[usize]) -> LabelledTree {
        match self {
            LabelledTree::Leaf(k) => inners[k - 1].shift(offsets[k - 1]),
            LabelledTree::Node(l, r) => LabelledTree::node(
                l.graft_rec(inners, offsets),
                r.graft_rec(inners, offsets),
            ),
        }
    }

    fn shift(&self, by: usize) -> LabelledTree {
        match self {
            LabelledTree::Leaf(k) => LabelledTree::Leaf(k + by),
            LabelledTree::Node(l, r) => LabelledTree::node(l.shift(by), r.shift(by)),
        }
    }
}

impl fmt::Display for LabelledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelledTree::Leaf(k) => write!(f, "{k}"),
            LabelledTree::Node(l, r) => write!(f, "({l} {r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Num(usize),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                out.push(Tok::Open);
                chars.next();
            }
            ')' => {
                out.push(Tok::Close);
                chars.next();
            }
            c if c.is_ascii_digit() => {
                let mut v = 0usize;
                while let Some(&d) = chars.peek() {
                    if let Some(dig) = d.to_digit(10) {
                        v = v * 10 + dig as usize;
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Num(v));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            c => return Err(Error::BadTree(format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

fn parse_expr(toks: &mut Vec<Tok>) -> Result<LabelledTree> {
    match toks.pop() {
        Some(Tok::Num(k)) => {
            if k == 0 {
                return Err(Error::BadTree("labels are 1-based".into()));
            }
            Ok(LabelledTree::Leaf(k))
        }
        Some(Tok::Open) => {
            let l = parse_expr(toks)?;
            let r = parse_expr(toks)?;
            match toks.pop() {
                Some(Tok::Close) => Ok(LabelledTree::node(l, r)),
                _ => Err(Error::BadTree("expected `)` after two operands".into())),
            }
        }
        _ => Err(Error::BadTree("unexpected end of input".into())),
    }
}

/// Uniform random planar tree on the labels 1..n (for property tests).
pub fn random_tree(n: usize, rng: &mut impl rand::Rng) -> LabelledTree {
    let mut labels: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        labels.swap(i, j);
    }
    build_random(&labels, rng)
}

fn build_random(labels: &[usize], rng: &mut impl rand::Rng) -> LabelledTree {
    if labels.len() == 1 {
        return LabelledTree::Leaf(labels[0]);
    }
    let split = rng.gen_range(1..labels.len());
    LabelledTree::node(
        build_random(&labels[..split], rng),
        build_random(&labels[split..], rng),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn parse_print_roundtrip_examples() {
        for s in ["((1 2) 3)", "(1 (2 3))", "(((3 1) 6) (4 ((2 7) 5)))"] {
            let t = LabelledTree::parse(s).unwrap();
            assert_eq!(t.to_bracketing(), s);
        }
    }

    #[test]
    fn parse_print_roundtrip_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 2..=8 {
            for _ in 0..40 {
                let t = random_tree(n, &mut rng);
                let s = t.to_bracketing();
                assert_eq!(LabelledTree::parse(&s).unwrap(), t);
            }
        }
    }

    #[test]
    fn rejects_bad_labels() {
        assert!(LabelledTree::parse("(1 3)").is_err());
        assert!(LabelledTree::parse("(1 1)").is_err());
        assert!(LabelledTree::parse("(0 1)").is_err());
        assert!(LabelledTree::parse("(1 2").is_err());
    }

    #[test]
    fn graft_example() {
        let pair = LabelledTree::parse("(1 2)").unwrap();
        let out = pair.graft(&[pair.clone(), pair.clone()]).unwrap();
        assert_eq!(out.to_bracketing(), "((1 2) (3 4))");
    }

    #[test]
    fn graft_unit_axioms() {
        let t = LabelledTree::parse("((1 2) 3)").unwrap();
        let singles: Vec<LabelledTree> = (0..3).map(|_| LabelledTree::Leaf(1)).collect();
        assert_eq!(t.graft(&singles).unwrap(), t);
        let unit = LabelledTree::Leaf(1);
        assert_eq!(unit.graft(&[t.clone()]).unwrap(), t);
    }

    #[test]
    fn graft_associativity() {
        // graft in two stages vs one big graft
        let outer = LabelledTree::parse("(1 2)").unwrap();
        let mid1 = LabelledTree::parse("(1 2)").unwrap();
        let mid2 = LabelledTree::parse("(1 (2 3))").unwrap();
        let inner: Vec<LabelledTree> = vec![
            LabelledTree::parse("(1 2)").unwrap(),
            LabelledTree::Leaf(1),
            LabelledTree::Leaf(1),
            LabelledTree::parse("(2 1)").unwrap(),
            LabelledTree::Leaf(1),
        ];
        let staged = outer
            .graft(&[mid1.clone(), mid2.clone()])
            .unwrap()
            .graft(&inner)
            .unwrap();
        let mid1_done = mid1.graft(&inner[0..2].to_vec()).unwrap();
        let mid2_done = mid2.graft(&inner[2..5].to_vec()).unwrap();
        let direct = outer.graft(&[mid1_done, mid2_done]).unwrap();
        assert_eq!(staged, direct);
    }

    #[test]
    fn arity_mismatch_detected() {
        let t = LabelledTree::parse("(1 2)").unwrap();
        assert!(t.graft(&[LabelledTree::Leaf(1)]).is_err());
    }
}

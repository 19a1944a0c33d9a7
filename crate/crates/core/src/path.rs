//! Littelmann path model on exact rationals.
//!
//! A path is stored as the list of displacement vectors of its maximal
//! linear pieces (fundamental-weight coordinates).  The canonical form —
//! no zero pieces, no consecutive pieces pointing the same way — is unique
//! among monotone reparametrizations, so structural equality is path
//! equality.

use crate::rootdata::{Rat, RootSystem, Weight};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathElement {
    rank: usize,
    pieces: Vec<Vec<Rat>>,
}

impl PathElement {
    /// The straight-line path from the origin to `lambda`.
    pub fn straight(lambda: &Weight) -> PathElement {
        canonicalize(lambda.rank(), vec![lambda.0.clone()])
    }

    pub fn pieces(&self) -> &[Vec<Rat>] {
        &self.pieces
    }

    pub fn endpoint(&self) -> Weight {
        let mut sum = vec![Rat::zero(); self.rank];
        for p in &self.pieces {
            for (s, c) in sum.iter_mut().zip(p) {
                *s += c;
            }
        }
        Weight(sum)
    }

    /// Breakpoint values of h(t) = <alpha_i^vee, pi(t)>; h(0) = 0.
    fn breakpoint_heights(&self, i: usize) -> Vec<Rat> {
        let mut vals = Vec::with_capacity(self.pieces.len() + 1);
        let mut acc = Rat::zero();
        vals.push(acc);
        for p in &self.pieces {
            acc += p[i];
            vals.push(acc);
        }
        vals
    }

    /// Littelmann raising operator for the node `i`.
    pub fn e_op(&self, rs: &RootSystem, i: usize) -> Option<PathElement> {
        let h = self.breakpoint_heights(i);
        let m = h.iter().min().copied().unwrap_or_else(Rat::zero);
        if m > -Rat::from_integer(1) {
            return None;
        }
        // first breakpoint attaining the minimum
        let j1 = h.iter().position(|v| *v == m).unwrap();
        // walk backwards from j1 looking for the last crossing of m+1
        let target = m + Rat::from_integer(1);
        let mut out: Vec<Vec<Rat>> = Vec::new();
        let mut reflected: Vec<Vec<Rat>> = Vec::new();
        let mut j = j1;
        loop {
            debug_assert!(j > 0, "h(0)=0 >= m+1 guarantees a crossing");
            let lo = h[j - 1];
            let piece = &self.pieces[j - 1];
            if lo >= target {
                if lo == target {
                    // crossing exactly at breakpoint j-1
                    out.extend_from_slice(&self.pieces[..j - 1]);
                    reflected.push(reflect_piece(rs, i, piece));
                    break;
                }
                // crossing strictly inside this piece: split it
                let frac = (lo - target) / (lo - h[j]);
                let first: Vec<Rat> = piece.iter().map(|c| c * frac).collect();
                let second: Vec<Rat> = piece.iter().map(|c| c * (Rat::from_integer(1) - frac)).collect();
                out.extend_from_slice(&self.pieces[..j - 1]);
                out.push(first);
                reflected.push(reflect_piece(rs, i, &second));
                break;
            }
            reflected.push(reflect_piece(rs, i, piece));
            j -= 1;
        }
        reflected.reverse();
        out.extend(reflected);
        out.extend_from_slice(&self.pieces[j1..]);
        Some(canonicalize(self.rank, out))
    }

    /// Littelmann lowering operator for the node `i`.
    pub fn f_op(&self, rs: &RootSystem, i: usize) -> Option<PathElement> {
        let h = self.breakpoint_heights(i);
        let m = h.iter().min().copied().unwrap_or_else(Rat::zero);
        let last = *h.last().unwrap();
        if last - m < Rat::from_integer(1) {
            return None;
        }
        // last breakpoint attaining the minimum
        let j0 = h.iter().rposition(|v| *v == m).unwrap();
        let target = m + Rat::from_integer(1);
        let mut out: Vec<Vec<Rat>> = self.pieces[..j0].to_vec();
        let mut j = j0;
        loop {
            debug_assert!(j < self.pieces.len(), "h(1) >= m+1 guarantees a crossing");
            let hi = h[j + 1];
            let piece = &self.pieces[j];
            if hi >= target {
                if hi == target {
                    out.push(reflect_piece(rs, i, piece));
                    out.extend_from_slice(&self.pieces[j + 1..]);
                    break;
                }
                // split inside this piece
                let frac = (target - h[j]) / (hi - h[j]);
                let first: Vec<Rat> = piece.iter().map(|c| c * frac).collect();
                let second: Vec<Rat> = piece.iter().map(|c| c * (Rat::from_integer(1) - frac)).collect();
                out.push(reflect_piece(rs, i, &first));
                out.push(second);
                out.extend_from_slice(&self.pieces[j + 1..]);
                break;
            }
            out.push(reflect_piece(rs, i, piece));
            j += 1;
        }
        Some(canonicalize(self.rank, out))
    }
}

fn reflect_piece(rs: &RootSystem, i: usize, piece: &[Rat]) -> Vec<Rat> {
    rs.reflect(i, &Weight(piece.to_vec())).0
}

fn is_zero(p: &[Rat]) -> bool {
    p.iter().all(|c| c.is_zero())
}

/// d2 a positive multiple of d1?
fn same_direction(d1: &[Rat], d2: &[Rat]) -> bool {
    let k = match d1.iter().position(|c| !c.is_zero()) {
        Some(k) => k,
        None => return false,
    };
    if d2[k].is_zero() || (d2[k].is_positive() != d1[k].is_positive()) {
        return false;
    }
    let c = d2[k] / d1[k];
    d1.iter().zip(d2).all(|(a, b)| *b == a * c)
}

fn canonicalize(rank: usize, pieces: Vec<Vec<Rat>>) -> PathElement {
    let mut out: Vec<Vec<Rat>> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if is_zero(&p) {
            continue;
        }
        if let Some(last) = out.last_mut() {
            if same_direction(last, &p) {
                for (a, b) in last.iter_mut().zip(&p) {
                    *a += b;
                }
                continue;
            }
        }
        out.push(p);
    }
    PathElement { rank, pieces: out }
}

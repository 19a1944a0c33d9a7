//! Piecewise-linear parameter paths realizing cactus generators on real
//! point configurations.
//!
//! For the full-range generator the path moves the base configuration to
//! the symmetric one (z_i = -z_{n+1-i}) without touching any boundary.  For
//! a proper segment [p, q] it contracts those points affinely into a
//! cluster of width delta about their midpoint, with the cluster's internal
//! normalized configuration symmetric, and emits a handoff marker carrying
//! the recursive inner schedule.

use crate::error::{Error, Result};
use crate::jsonout::JVal;

/// One affine segment of a schedule: z(t) interpolates z_start -> z_end for
/// t in [t0, t1].
#[derive(Debug, Clone)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub z_start: Vec<f64>,
    pub z_end: Vec<f64>,
}

impl Segment {
    pub fn at(&self, t: f64) -> Vec<f64> {
        let s = if self.t1 > self.t0 {
            ((t - self.t0) / (self.t1 - self.t0)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        self.z_start
            .iter()
            .zip(&self.z_end)
            .map(|(a, b)| a + s * (b - a))
            .collect()
    }
}

/// What happens at the end of the motion.
#[derive(Debug, Clone)]
pub enum Terminal {
    /// The endpoint is invariant under reversing [p, q]; the generator acts
    /// there by that reversal.
    SymmetricFlip { p: usize, q: usize },
    /// The points p..q sit in a cluster of width `delta`; hand off to the
    /// product structure and run the inner schedule on the normalized
    /// cluster.
    ClusterHandoff {
        p: usize,
        q: usize,
        delta: f64,
        inner: Box<PathSchedule>,
    },
}

#[derive(Debug, Clone)]
pub struct PathSchedule {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub base: Vec<f64>,
    pub segments: Vec<Segment>,
    pub terminal: Terminal,
}

impl PathSchedule {
    pub fn endpoint(&self) -> Vec<f64> {
        self.segments
            .last()
            .map(|s| s.z_end.clone())
            .unwrap_or_else(|| self.base.clone())
    }

    /// Serialize as a list of segments; the final segment carries the
    /// handoff descriptor (pure markers become a zero-length segment).
    pub fn to_json(&self) -> JVal {
        let terminal = match &self.terminal {
            Terminal::SymmetricFlip { p, q } => JVal::obj(vec![
                ("kind", JVal::str("symmetric_flip")),
                ("p", JVal::Int(*p as i64)),
                ("q", JVal::Int(*q as i64)),
            ]),
            Terminal::ClusterHandoff { p, q, delta, inner } => JVal::obj(vec![
                ("kind", JVal::str("cluster_handoff")),
                ("p", JVal::Int(*p as i64)),
                ("q", JVal::Int(*q as i64)),
                ("delta", JVal::Float(*delta)),
                ("inner", inner.to_json()),
            ]),
        };
        let mut segments: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = self
            .segments
            .iter()
            .map(|s| (s.t0, s.t1, s.z_start.clone(), s.z_end.clone()))
            .collect();
        if segments.is_empty() {
            segments.push((0.0, 0.0, self.base.clone(), self.base.clone()));
        }
        let last = segments.len() - 1;
        let jsegs: Vec<JVal> = segments
            .into_iter()
            .enumerate()
            .map(|(k, (t0, t1, z_start, z_end))| {
                JVal::obj(vec![
                    ("t0", JVal::Float(t0)),
                    ("t1", JVal::Float(t1)),
                    ("z_start", JVal::floats(&z_start)),
                    ("z_end", JVal::floats(&z_end)),
                    (
                        "handoff",
                        if k == last { terminal.clone() } else { JVal::Null },
                    ),
                ])
            })
            .collect();
        JVal::obj(vec![
            ("n", JVal::Int(self.n as i64)),
            ("p", JVal::Int(self.p as i64)),
            ("q", JVal::Int(self.q as i64)),
            ("segments", JVal::Arr(jsegs)),
        ])
    }
}

/// Symmetric evenly spaced configuration of k points of total width `w`
/// centered at `c`.
pub fn symmetric_cluster(k: usize, c: f64, w: f64) -> Vec<f64> {
    if k == 1 {
        return vec![c];
    }
    (0..k)
        .map(|j| c + w * (j as f64 / (k as f64 - 1.0) - 0.5))
        .collect()
}

/// Build the parameter path for the generator s_pq at the given strictly
/// increasing base configuration.
pub fn cactus_path_schedule(
    n: usize,
    p: usize,
    q: usize,
    base: &[f64],
    delta: f64,
) -> Result<PathSchedule> {
    if base.len() != n {
        return Err(Error::InvalidInput(format!(
            "base has {} points, expected {n}",
            base.len()
        )));
    }
    if !(1 <= p && p < q && q <= n) {
        return Err(Error::BadGenerator(p, q));
    }
    for k in 1..n {
        if base[k] <= base[k - 1] {
            return Err(Error::InvalidInput(
                "base configuration must be strictly increasing".into(),
            ));
        }
    }
    let min_gap = (1..n)
        .map(|k| base[k] - base[k - 1])
        .fold(f64::INFINITY, f64::min);
    if delta <= 0.0 || (n > 1 && delta >= min_gap / 2.0) {
        return Err(Error::DeltaTooLarge {
            delta,
            min_gap,
        });
    }

    let k = q - p + 1;
    if k == n {
        if n == 2 {
            // the two-point moduli space is a point: pure swap marker
            return Ok(PathSchedule {
                n,
                p,
                q,
                base: base.to_vec(),
                segments: vec![],
                terminal: Terminal::SymmetricFlip { p, q },
            });
        }
        // move to the symmetric configuration z_i = -z_{n+1-i}
        let width = base[n - 1] - base[0];
        let target = symmetric_cluster(n, 0.0, width);
        return Ok(PathSchedule {
            n,
            p,
            q,
            base: base.to_vec(),
            segments: vec![Segment {
                t0: 0.0,
                t1: 1.0,
                z_start: base.to_vec(),
                z_end: target,
            }],
            terminal: Terminal::SymmetricFlip { p, q },
        });
    }

    // contract z_p..z_q into a cluster of width delta about their midpoint
    let mid = (base[p - 1] + base[q - 1]) / 2.0;
    let cluster = symmetric_cluster(k, mid, delta);
    let mut target = base.to_vec();
    target[(p - 1)..q].copy_from_slice(&cluster);
    // the inner normalized configuration is already symmetric, so the
    // recursive schedule for s_{1k} needs no motion
    let inner_base = symmetric_cluster(k, 0.0, 1.0);
    let inner = cactus_path_schedule(k, 1, k, &inner_base, 0.1 / (k as f64))?;
    Ok(PathSchedule {
        n,
        p,
        q,
        base: base.to_vec(),
        segments: vec![Segment {
            t0: 0.0,
            t1: 1.0,
            z_start: base.to_vec(),
            z_end: target,
        }],
        terminal: Terminal::ClusterHandoff {
            p,
            q,
            delta,
            inner: Box::new(inner),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_reversal_hits_symmetric_point() {
        let s = cactus_path_schedule(3, 1, 3, &[1.0, 2.0, 3.0], 0.2).unwrap();
        assert_eq!(s.endpoint(), vec![-1.0, 0.0, 1.0]);
        assert!(matches!(s.terminal, Terminal::SymmetricFlip { p: 1, q: 3 }));
    }

    #[test]
    fn proper_segment_emits_handoff() {
        let s = cactus_path_schedule(3, 1, 2, &[1.0, 2.0, 3.0], 1e-3).unwrap();
        let end = s.endpoint();
        assert!((end[0] - (1.5 - 5e-4)).abs() < 1e-12);
        assert!((end[1] - (1.5 + 5e-4)).abs() < 1e-12);
        assert_eq!(end[2], 3.0);
        match &s.terminal {
            Terminal::ClusterHandoff { p, q, delta, inner } => {
                assert_eq!((*p, *q), (1, 2));
                assert_eq!(*delta, 1e-3);
                assert!(inner.segments.is_empty()); // k = 2: pure marker
            }
            _ => panic!("handoff expected"),
        }
    }

    #[test]
    fn two_points_pure_marker() {
        let s = cactus_path_schedule(2, 1, 2, &[0.0, 1.0], 0.1).unwrap();
        assert!(s.segments.is_empty());
        assert!(matches!(s.terminal, Terminal::SymmetricFlip { .. }));
    }

    #[test]
    fn delta_validation() {
        assert!(cactus_path_schedule(3, 1, 2, &[0.0, 1.0, 2.0], 0.6).is_err());
        assert!(cactus_path_schedule(3, 1, 2, &[0.0, 1.0, 0.5], 0.1).is_err());
    }

    #[test]
    fn gaps_never_fall_below_delta() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(3..=6);
            let mut base = vec![0.0f64; n];
            let mut acc = 0.0;
            for z in base.iter_mut() {
                acc += rng.gen_range(0.5..3.0);
                *z = acc;
            }
            let p = rng.gen_range(1..n);
            let q = rng.gen_range(p + 1..=n);
            let min_gap = (1..n).map(|k| base[k] - base[k - 1]).fold(f64::INFINITY, f64::min);
            let delta = min_gap / rng.gen_range(4.0..50.0);
            let s = cactus_path_schedule(n, p, q, &base, delta).unwrap();
            for seg in &s.segments {
                for step in 0..=32 {
                    let z = seg.at(seg.t0 + (seg.t1 - seg.t0) * step as f64 / 32.0);
                    for k in 1..n {
                        // only non-cluster gaps are protected
                        if p <= k && k + 1 <= q {
                            continue;
                        }
                        let gap = z[k] - z[k - 1];
                        assert!(
                            gap >= delta * (1.0 - 1e-9),
                            "gap {gap} below delta {delta} (n={n}, p={p}, q={q})"
                        );
                    }
                }
            }
        }
    }
}

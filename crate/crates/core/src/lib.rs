//! Crystals, cactus group actions, and Gaudin eigenline monodromy.
//!
//! The combinatorial half (root systems, Littelmann path crystals,
//! Schützenberger involutions, cactus group actions, moduli-space charts)
//! runs on exact rational arithmetic.  The numeric half builds commuting
//! families of symmetric operators (Gaudin and shift-of-argument
//! Hamiltonians), decomposes them into joint eigenlines, and transports
//! those eigenlines along parameter paths to extract monodromy
//! permutations.  The verification harness compares the two.

#![allow(clippy::needless_range_loop)]

pub mod cactus;
pub mod chart;
pub mod cli;
pub mod crystal;
pub mod eigen;
pub mod error;
pub mod families;
pub mod freudenthal;
pub mod involution;
pub mod irrep;
pub mod jsonout;
pub mod linalg;
pub mod monodromy;
pub mod path;
pub mod rootdata;
pub mod schedule;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use rootdata::{build_root_system, RootSystem, Weight, WeylWord};

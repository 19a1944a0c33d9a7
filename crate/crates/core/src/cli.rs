//! Command-line surface.
//!
//! Exit codes: 0 success (and `verify` all-equal), 1 mismatch,
//! 2 inconclusive, 3 usage error.  JSON artifacts are deterministic for a
//! fixed seed: object fields have a fixed order and floats print with 17
//! significant digits.  Timing is excluded from JSON unless requested.

use crate::cactus::{external_cactus_action, internal_cactus_action, CactusWord};
use crate::crystal::Crystal;
use crate::error::Error;
use crate::irrep::{Algebra, CartanElt};
use crate::jsonout::JVal;
use crate::monodromy::{monodromy_external, monodromy_internal, pentagon, RunConfig};
use crate::rootdata::{build_root_system, Weight};
use crate::tree::LabelledTree;
use crate::verify::{
    desk_suite, junit_xml, verify_commutor_square, verify_etingof_external,
    verify_etingof_internal, Outcome, VerificationReport,
};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Crystals, cactus groups, and Gaudin eigenline monodromy.
///
/// Generator grammar: `sI` is the full-diagram internal generator; `s1`,
/// `s2`, `s12` are internal generators on the listed nodes; external
/// generators on n tensor factors are written `s_pq` (or `spq` with single
/// digits), e.g. `s_13` reverses factors 1..3.
#[derive(Debug, Parser, PartialEq)]
#[command(name = "ccl", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, PartialEq)]
pub enum Command {
    /// Crystal combinatorics
    Crystal {
        #[command(subcommand)]
        verb: CrystalVerb,
    },
    /// Moduli-space combinatorics
    Moduli {
        #[command(subcommand)]
        verb: ModuliVerb,
    },
    /// Gaudin numerics
    Gaudin {
        #[command(subcommand)]
        verb: GaudinVerb,
    },
    /// Crystal-vs-monodromy verification
    Verify {
        #[command(subcommand)]
        verb: VerifyVerb,
    },
}

#[derive(Debug, Args, PartialEq)]
pub struct OutputOpts {
    /// output file (stdout when absent)
    #[arg(long, short = 'o')]
    pub out: Option<String>,
    /// output format
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Debug, Subcommand, PartialEq)]
pub enum CrystalVerb {
    /// Build B(lambda) and emit its graph (json or dot)
    Build {
        /// Dynkin type label, e.g. A2
        #[arg(long = "type")]
        type_label: String,
        /// weight in fundamental coordinates, comma separated
        #[arg(long)]
        lambda: String,
        /// emit the root-system datum instead of the crystal graph
        #[arg(long, default_value_t = false)]
        rootsystem: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Tensor product of B(lambda_1) x ... x B(lambda_k)
    Tensor {
        #[arg(long = "type")]
        type_label: String,
        /// one weight per factor (repeatable)
        #[arg(long = "lambda", required = true)]
        lambdas: Vec<String>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// The commutor B(lambda_1) x B(lambda_2) -> B(lambda_2) x B(lambda_1)
    Commutor {
        #[arg(long = "type")]
        type_label: String,
        #[arg(long)]
        lambda1: String,
        #[arg(long)]
        lambda2: String,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Internal or external cactus action as a permutation
    Cactus {
        #[arg(long = "type")]
        type_label: String,
        /// weight of each factor (one = internal action on B(lambda))
        #[arg(long = "lambda", required = true)]
        lambdas: Vec<String>,
        /// generator word, repeatable, applied left to right
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Debug, Subcommand, PartialEq)]
pub enum ModuliVerb {
    /// Nested set, adapted basis, and chart image of a bracketed tree
    Chart {
        /// planar bracketing, e.g. "((1 2) 3)"
        #[arg(long)]
        tree: String,
        /// chart coordinates u per non-root vertex (comma separated
        /// rationals like 1, 1/2); all 1 when absent
        #[arg(long)]
        u: Option<String>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Parameter path schedule for an external generator
    Schedule {
        #[arg(long)]
        n: usize,
        /// generator, e.g. s_12
        #[arg(long)]
        gen: String,
        /// base configuration, comma separated, strictly increasing
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Debug, Subcommand, PartialEq)]
pub enum GaudinVerb {
    /// Joint eigenlines of the (inhomogeneous) Gaudin family
    Eigenlines {
        /// algebra: sl2 or sl3
        #[arg(long = "g")]
        algebra: String,
        /// spins: one weight per site, `;`-separated sites with
        /// comma-separated coordinates (sl2: plain commas work)
        #[arg(long)]
        spins: String,
        /// marked points, comma separated (defaults to 1..n)
        #[arg(long)]
        z: Option<String>,
        /// restrict to the weight-mu multiplicity block
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Monodromy permutation of a cactus generator
    Monodromy {
        #[arg(long = "g")]
        algebra: String,
        /// external: spins of the tensor factors
        #[arg(long)]
        spins: Option<String>,
        /// external: highest weight of the multiplicity set
        #[arg(long)]
        mu: Option<String>,
        /// internal: the single highest weight
        #[arg(long)]
        lambda: Option<String>,
        /// generator (external s_pq, internal sJ/sI)
        #[arg(long)]
        gen: String,
        /// base configuration for external generators
        #[arg(long)]
        z: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Five-edge pentagon loop; exit 0 iff the composite is the identity
    Pentagon {
        #[arg(long = "g")]
        algebra: String,
        #[arg(long)]
        spins: String,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Debug, Subcommand, PartialEq)]
pub enum VerifyVerb {
    /// Run a verification suite
    All {
        #[arg(long, default_value = "desk")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        /// write the JSON report here
        #[arg(long)]
        json: Option<String>,
        /// write a JUnit-style XML report here
        #[arg(long)]
        xml: Option<String>,
        /// include wall-clock timings in the JSON (breaks byte-identity)
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Run a single case described by a JSON config file
    Case {
        #[arg(long)]
        config: String,
        #[arg(long)]
        json: Option<String>,
        #[arg(long)]
        xml: Option<String>,
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
}

/// JSON experiment configuration for `verify case`.
#[derive(Debug, Deserialize)]
pub struct CaseConfig {
    pub kind: String,
    pub algebra: String,
    #[serde(default)]
    pub spins: Vec<Vec<i64>>,
    #[serde(default)]
    pub mu: Vec<i64>,
    #[serde(default)]
    pub generator: Option<String>,
    #[serde(default)]
    pub base_z: Vec<f64>,
    #[serde(default)]
    pub delta_star: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub lambda: Vec<i64>,
    #[serde(default)]
    pub lam1: Vec<i64>,
    #[serde(default)]
    pub lam2: Vec<i64>,
    #[serde(default)]
    pub tolerances: Option<TolerancesConfig>,
}

#[derive(Debug, Deserialize)]
pub struct TolerancesConfig {
    pub commutator_rel: Option<f64>,
    pub eigen_residual: Option<f64>,
    pub step_overlap: Option<f64>,
    pub handoff_fidelity: Option<f64>,
    pub max_step_halvings: Option<u32>,
    pub max_delta_halvings: Option<u32>,
    pub label_sep: Option<f64>,
    pub retries: Option<u32>,
}

impl TolerancesConfig {
    fn apply(&self, t: &mut crate::eigen::Tolerances) {
        if let Some(v) = self.commutator_rel {
            t.commutator_rel = v;
        }
        if let Some(v) = self.eigen_residual {
            t.eigen_residual = v;
        }
        if let Some(v) = self.step_overlap {
            t.step_overlap = v;
        }
        if let Some(v) = self.handoff_fidelity {
            t.handoff_fidelity = v;
        }
        if let Some(v) = self.max_step_halvings {
            t.max_step_halvings = v;
        }
        if let Some(v) = self.max_delta_halvings {
            t.max_delta_halvings = v;
        }
        if let Some(v) = self.label_sep {
            t.label_sep = v;
        }
        if let Some(v) = self.retries {
            t.retries = v;
        }
    }
}

fn parse_weight(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidInput(format!("bad weight coordinate `{c}`")))
        })
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number `{c}`")))
        })
        .collect()
}

fn parse_rationals(s: &str) -> Result<Vec<crate::rootdata::Rat>, Error> {
    s.split(',')
        .map(|c| {
            let c = c.trim();
            if let Some((n, d)) = c.split_once('/') {
                let n: i64 = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad rational `{c}`")))?;
                let d: i64 = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad rational `{c}`")))?;
                Ok(crate::rootdata::Rat::new(n, d))
            } else {
                let n: i64 = c
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad rational `{c}`")))?;
                Ok(crate::rootdata::Rat::from_integer(n))
            }
        })
        .collect()
}

/// Spins: sites separated by `;`, coordinates by `,`.  For rank-1 algebras
/// a plain comma list is one spin per site.
fn parse_spins(alg: Algebra, s: &str) -> Result<Vec<Vec<i64>>, Error> {
    if s.contains(';') {
        s.split(';').map(parse_weight).collect()
    } else {
        let coords = parse_weight(s)?;
        match alg {
            Algebra::Sl2 => Ok(coords.into_iter().map(|c| vec![c]).collect()),
            Algebra::Sl3 => {
                if coords.len() == 2 {
                    Ok(vec![coords])
                } else {
                    Err(Error::InvalidInput(
                        "sl3 spins need `;`-separated pairs, e.g. `1,0;0,1`".into(),
                    ))
                }
            }
        }
    }
}

/// Generator strings: sI | s<digits> (internal nodes) | s_p_q | s_pq | spq
/// (external).  Returns either an internal node set or an external pair.
pub enum ParsedGen {
    Internal(Vec<usize>),
    External(usize, usize),
}

pub fn parse_generator(s: &str, external: bool) -> Result<ParsedGen, Error> {
    let body = s
        .strip_prefix('s')
        .ok_or_else(|| Error::InvalidInput(format!("generator `{s}` must start with s")))?;
    if body == "I" {
        return Ok(ParsedGen::Internal(vec![]));
    }
    let digits: Vec<usize> = if body.contains('_') {
        body.split('_')
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad generator `{s}`")))
            })
            .collect::<Result<_, _>>()?
    } else {
        body.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidInput(format!("bad generator `{s}`")))
            })
            .collect::<Result<_, _>>()?
    };
    if digits.is_empty() {
        return Err(Error::InvalidInput(format!("bad generator `{s}`")));
    }
    if external {
        if digits.len() != 2 || digits[0] >= digits[1] || digits[0] == 0 {
            return Err(Error::InvalidInput(format!(
                "external generator `{s}` must be s_pq with p < q"
            )));
        }
        Ok(ParsedGen::External(digits[0], digits[1]))
    } else {
        // internal: digits are 1-based node labels
        if digits.contains(&0) {
            return Err(Error::InvalidInput("node labels are 1-based".into()));
        }
        Ok(ParsedGen::Internal(digits.iter().map(|d| d - 1).collect()))
    }
}

fn seed_or_env(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("CCL_SEED")
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
    })
    .unwrap_or(7)
}

fn emit(output: &OutputOpts, content: &str) -> Result<(), Error> {
    match &output.out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::InvalidInput(format!("cannot write {path}: {e}"))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            // ignore EPIPE so `ccl ... | head` behaves
            let _ = writeln!(stdout, "{content}");
            Ok(())
        }
    }
}

fn report_json(reports: &[VerificationReport], timings: bool) -> String {
    let cases: Vec<JVal> = reports
        .iter()
        .map(|r| {
            let mut v = r.to_json();
            if !timings {
                if let JVal::Obj(fields) = &mut v {
                    fields.retain(|(k, _)| k != "wall_ms");
                }
            }
            v
        })
        .collect();
    let worst = worst_outcome(reports);
    JVal::obj(vec![
        ("suite_outcome", JVal::str(worst.as_str())),
        ("cases", JVal::Arr(cases)),
    ])
    .to_string()
}

fn worst_outcome(reports: &[VerificationReport]) -> Outcome {
    let mut worst = Outcome::Equal;
    for r in reports {
        match r.outcome {
            Outcome::Mismatch => return Outcome::Mismatch,
            Outcome::Inconclusive => worst = Outcome::Inconclusive,
            Outcome::Equal => {}
        }
    }
    worst
}

fn outcome_exit(o: Outcome) -> i32 {
    match o {
        Outcome::Equal => EXIT_OK,
        Outcome::Mismatch => EXIT_MISMATCH,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // --help/--version print to stdout and exit 0
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SimpleSpectrumViolation { .. }
                | Error::FidelityFailure { .. }
                | Error::StepCollapse { .. }
                | Error::ResidualTooLarge { .. } => EXIT_INCONCLUSIVE,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Crystal { verb } => crystal_verb(verb),
        Command::Moduli { verb } => moduli_verb(verb),
        Command::Gaudin { verb } => gaudin_verb(verb),
        Command::Verify { verb } => verify_verb(verb),
    }
}

fn crystal_output(c: &Crystal, output: &OutputOpts) -> Result<i32, Error> {
    let content = match output.format.as_str() {
        "json" => c.to_json().to_string(),
        "dot" => c.to_dot(),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown format `{other}` (json|dot)"
            )))
        }
    };
    emit(output, &content)?;
    Ok(EXIT_OK)
}

fn crystal_verb(verb: CrystalVerb) -> Result<i32, Error> {
    match verb {
        CrystalVerb::Build {
            type_label,
            lambda,
            rootsystem,
            output,
        } => {
            let rs = build_root_system(&type_label)?;
            if rootsystem {
                emit(&output, &rs.to_json().to_string())?;
                return Ok(EXIT_OK);
            }
            let lam = Weight::from_ints(&parse_weight(&lambda)?);
            let c = Crystal::generate(&rs, &lam)?;
            crystal_output(&c, &output)
        }
        CrystalVerb::Tensor {
            type_label,
            lambdas,
            output,
        } => {
            let rs = build_root_system(&type_label)?;
            let factors: Vec<Crystal> = lambdas
                .iter()
                .map(|l| Crystal::generate(&rs, &Weight::from_ints(&parse_weight(l)?)))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&Crystal> = factors.iter().collect();
            let t = Crystal::tensor_many(&refs)?;
            crystal_output(&t, &output)
        }
        CrystalVerb::Commutor {
            type_label,
            lambda1,
            lambda2,
            output,
        } => {
            let rs = build_root_system(&type_label)?;
            let b1 = Crystal::generate(&rs, &Weight::from_ints(&parse_weight(&lambda1)?))?;
            let b2 = Crystal::generate(&rs, &Weight::from_ints(&parse_weight(&lambda2)?))?;
            let c = crate::involution::commutor(&b1, &b2)?;
            let v = JVal::obj(vec![
                ("map", JVal::usizes(&c.map)),
                ("source_size", JVal::Int(c.source.len() as i64)),
            ]);
            emit(&output, &v.to_string())?;
            Ok(EXIT_OK)
        }
        CrystalVerb::Cactus {
            type_label,
            lambdas,
            gens,
            output,
        } => {
            let rs = build_root_system(&type_label)?;
            let external = lambdas.len() > 1;
            let perm = if external {
                let factors: Vec<Crystal> = lambdas
                    .iter()
                    .map(|l| Crystal::generate(&rs, &Weight::from_ints(&parse_weight(l)?)))
                    .collect::<Result<_, _>>()?;
                let refs: Vec<&Crystal> = factors.iter().collect();
                let t = Crystal::tensor_many(&refs)?;
                let mut pairs = Vec::new();
                for g in &gens {
                    match parse_generator(g, true)? {
                        ParsedGen::External(p, q) => pairs.push((p, q)),
                        ParsedGen::Internal(_) => unreachable!(),
                    }
                }
                external_cactus_action(&CactusWord::external(&pairs), &t, &refs)?
            } else {
                let b = Crystal::generate(&rs, &Weight::from_ints(&parse_weight(&lambdas[0])?))?;
                let mut word = Vec::new();
                for g in &gens {
                    match parse_generator(g, false)? {
                        ParsedGen::Internal(nodes) => {
                            let subset = if nodes.is_empty() {
                                (0..rs.rank()).collect()
                            } else {
                                nodes
                            };
                            word.push(crate::cactus::CactusGen::Internal(subset));
                        }
                        ParsedGen::External(..) => unreachable!(),
                    }
                }
                internal_cactus_action(&CactusWord(word), &b)?.perm
            };
            emit(&output, &JVal::obj(vec![("perm", JVal::usizes(&perm))]).to_string())?;
            Ok(EXIT_OK)
        }
    }
}

fn moduli_verb(verb: ModuliVerb) -> Result<i32, Error> {
    match verb {
        ModuliVerb::Chart { tree, u, output } => {
            let t = LabelledTree::parse(&tree)?;
            let chart = crate::chart::tree_to_nested_set(&t, true)?;
            let m = chart.sets.len();
            let u_vals = match u {
                Some(s) => parse_rationals(&s)?,
                None => vec![crate::rootdata::Rat::from_integer(1); m.saturating_sub(1)],
            };
            let image = chart.evaluate(&u_vals)?;
            let sets: Vec<JVal> = chart
                .sets
                .iter()
                .map(|e| {
                    JVal::obj(vec![
                        (
                            "leaves",
                            JVal::usizes(&e.leaf_set.iter().copied().collect::<Vec<_>>()),
                        ),
                        (
                            "basis",
                            match e.basis_pair {
                                Some((l, r)) => JVal::Arr(vec![
                                    JVal::Int(l as i64),
                                    JVal::Int(r as i64),
                                ]),
                                None => JVal::Null,
                            },
                        ),
                    ])
                })
                .collect();
            let image_json = match image {
                crate::chart::ChartImage::Interior(cfg) => JVal::obj(vec![
                    ("kind", JVal::str("interior")),
                    ("z", JVal::floats(&cfg.to_f64())),
                ]),
                crate::chart::ChartImage::Boundary { z, collapsed } => JVal::obj(vec![
                    ("kind", JVal::str("boundary")),
                    (
                        "z",
                        JVal::floats(
                            &z.iter()
                                .map(|r| *r.numer() as f64 / *r.denom() as f64)
                                .collect::<Vec<_>>(),
                        ),
                    ),
                    (
                        "collapsed",
                        JVal::Arr(
                            collapsed
                                .iter()
                                .map(|c| JVal::usizes(c))
                                .collect(),
                        ),
                    ),
                ]),
            };
            let v = JVal::obj(vec![
                ("tree", JVal::str(&t.to_bracketing())),
                ("nested_set", JVal::Arr(sets)),
                ("image", image_json),
            ]);
            emit(&output, &v.to_string())?;
            Ok(EXIT_OK)
        }
        ModuliVerb::Schedule {
            n,
            gen,
            base,
            delta,
            output,
        } => {
            let (p, q) = match parse_generator(&gen, true)? {
                ParsedGen::External(p, q) => (p, q),
                _ => unreachable!(),
            };
            let base = parse_floats(&base)?;
            let s = crate::schedule::cactus_path_schedule(n, p, q, &base, delta)?;
            emit(&output, &s.to_json().to_string())?;
            Ok(EXIT_OK)
        }
    }
}

fn default_z(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64).collect()
}

fn gaudin_verb(verb: GaudinVerb) -> Result<i32, Error> {
    match verb {
        GaudinVerb::Eigenlines {
            algebra,
            spins,
            z,
            mu,
            seed,
            output,
        } => {
            let alg = Algebra::parse(&algebra)?;
            let spins = parse_spins(alg, &spins)?;
            let space = crate::families::TensorSpace::new(alg, &spins)?;
            let z = match z {
                Some(s) => parse_floats(&s)?,
                None => default_z(space.n_factors()),
            };
            let cfg = RunConfig {
                seed: seed_or_env(seed),
                ..RunConfig::default()
            };
            let chi0 = CartanElt(vec![0.0; alg.matrix_size()]);
            let fam = crate::families::gaudin_hamiltonians(&space, &z, &chi0)?;
            fam.check(cfg.tol.commutator_rel)?;
            let weights = space.weights();
            let block = match mu {
                Some(m) => {
                    let mu = parse_weight(&m)?;
                    let raising: Vec<crate::linalg::Mat> = (0..alg.rank())
                        .map(|i| {
                            space.delta_subset(
                                &(0..space.n_factors()).collect::<Vec<_>>(),
                                |v| v.e[i].clone(),
                            )
                        })
                        .collect();
                    crate::eigen::multiplicity_block(&weights, &mu, &raising)?
                }
                None => crate::eigen::Block::full(space.dim),
            };
            let gens = block.project_family(&fam)?;
            let mut rng = cfg.rng();
            let lines = crate::eigen::joint_eigenlines(&gens, &mut rng, &cfg.tol, "cli")?;
            let jlines: Vec<JVal> = (0..lines.len())
                .map(|j| {
                    JVal::obj(vec![
                        ("id", JVal::Int(j as i64)),
                        ("labels", JVal::floats(&lines.labels[j])),
                        ("vector", JVal::floats(&block.basis.matvec(&lines.line(j)))),
                    ])
                })
                .collect();
            let v = JVal::obj(vec![
                ("seed", JVal::Int(cfg.seed as i64)),
                ("block_dim", JVal::Int(lines.len() as i64)),
                ("max_residual", JVal::Float(lines.max_residual)),
                ("lines", JVal::Arr(jlines)),
            ]);
            emit(&output, &v.to_string())?;
            Ok(EXIT_OK)
        }
        GaudinVerb::Monodromy {
            algebra,
            spins,
            mu,
            lambda,
            gen,
            z,
            seed,
            delta,
            output,
        } => {
            let alg = Algebra::parse(&algebra)?;
            let mut cfg = RunConfig {
                seed: seed_or_env(seed),
                ..RunConfig::default()
            };
            if let Some(d) = delta {
                cfg.delta_star = d;
            }
            let result = match (&spins, &lambda) {
                (Some(spins), None) => {
                    let spins = parse_spins(alg, spins)?;
                    let mu = parse_weight(&mu.ok_or_else(|| {
                        Error::InvalidInput("external monodromy needs --mu".into())
                    })?)?;
                    let (p, q) = match parse_generator(&gen, true)? {
                        ParsedGen::External(p, q) => (p, q),
                        _ => unreachable!(),
                    };
                    let z = match z {
                        Some(s) => parse_floats(&s)?,
                        None => default_z(spins.len()),
                    };
                    monodromy_external(alg, &spins, &mu, &z, p, q, &cfg)?
                }
                (None, Some(lambda)) => {
                    let lam = parse_weight(lambda)?;
                    let subset = match parse_generator(&gen, false)? {
                        ParsedGen::Internal(nodes) => {
                            if nodes.is_empty() {
                                (0..alg.rank()).collect()
                            } else {
                                nodes
                            }
                        }
                        _ => unreachable!(),
                    };
                    let chi = match alg {
                        Algebra::Sl2 => CartanElt(vec![1.0, -1.0]),
                        Algebra::Sl3 => CartanElt(vec![1.0, 0.0, -1.0]),
                    };
                    monodromy_internal(alg, &lam, &chi, &subset, &cfg)?
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "give exactly one of --spins (external) or --lambda (internal)".into(),
                    ))
                }
            };
            let v = JVal::obj(vec![
                ("perm", JVal::usizes(&result.perm)),
                ("seed", JVal::Int(result.seed as i64)),
                (
                    "diagnostics",
                    JVal::obj(vec![
                        ("steps", JVal::Int(result.diag.steps as i64)),
                        ("min_overlap", JVal::Float(result.diag.min_overlap)),
                        ("min_fidelity", JVal::Float(result.diag.min_fidelity)),
                        ("max_residual", JVal::Float(result.diag.max_residual)),
                        ("delta_used", JVal::Float(result.diag.delta_used)),
                        ("halvings", JVal::Int(result.diag.halvings as i64)),
                    ]),
                ),
            ]);
            emit(&output, &v.to_string())?;
            Ok(EXIT_OK)
        }
        GaudinVerb::Pentagon {
            algebra,
            spins,
            seed,
            output,
        } => {
            let alg = Algebra::parse(&algebra)?;
            let spins = parse_spins(alg, &spins)?;
            let cfg = RunConfig {
                seed: seed_or_env(seed),
                ..RunConfig::default()
            };
            let chi = match alg {
                Algebra::Sl2 => CartanElt(vec![1.0, -1.0]),
                Algebra::Sl3 => CartanElt(vec![1.0, 0.0, -1.0]),
            };
            let rep = pentagon(alg, &spins, &chi, &cfg)?;
            let v = JVal::obj(vec![
                ("identity", JVal::Bool(rep.identity)),
                ("perm", JVal::usizes(&rep.perm)),
                ("min_overlap", JVal::Float(rep.diag.min_overlap)),
                ("min_fidelity", JVal::Float(rep.diag.min_fidelity)),
            ]);
            emit(&output, &v.to_string())?;
            Ok(if rep.identity { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

fn verify_verb(verb: VerifyVerb) -> Result<i32, Error> {
    match verb {
        VerifyVerb::All {
            suite,
            seed,
            json,
            xml,
            timings,
        } => {
            if suite != "desk" {
                return Err(Error::InvalidInput(format!(
                    "unknown suite `{suite}` (available: desk)"
                )));
            }
            let cfg = RunConfig {
                seed: seed_or_env(seed),
                ..RunConfig::default()
            };
            let reports = desk_suite(&cfg);
            finish_verify(&reports, json, xml, timings)
        }
        VerifyVerb::Case {
            config,
            json,
            xml,
            timings,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::InvalidInput(format!("cannot read {config}: {e}")))?;
            let report = run_case_from_json(&text)?;
            finish_verify(&[report], json, xml, timings)
        }
    }
}

/// Run one verification case described by its JSON configuration; shared
/// by the CLI and the C ABI.
pub fn run_case_from_json(text: &str) -> Result<VerificationReport, Error> {
    let case: CaseConfig = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("bad config: {e}")))?;
    let alg = Algebra::parse(&case.algebra)?;
    let mut cfg = RunConfig {
        seed: seed_or_env(case.seed),
        ..RunConfig::default()
    };
    if let Some(d) = case.delta_star {
        cfg.delta_star = d;
    }
    if let Some(t) = &case.tolerances {
        t.apply(&mut cfg.tol);
    }
    let report = match case.kind.as_str() {
        "external" => {
            let genstr = case
                .generator
                .as_deref()
                .ok_or_else(|| Error::InvalidInput("external case needs a generator".into()))?;
            let (p, q) = match parse_generator(genstr, true)? {
                ParsedGen::External(p, q) => (p, q),
                _ => unreachable!(),
            };
            let z = if case.base_z.is_empty() {
                default_z(case.spins.len())
            } else {
                case.base_z.clone()
            };
            verify_etingof_external(alg, &case.spins, &case.mu, p, q, &z, &cfg)
        }
        "internal" => {
            let genstr = case
                .generator
                .as_deref()
                .ok_or_else(|| Error::InvalidInput("internal case needs a generator".into()))?;
            let subset = match parse_generator(genstr, false)? {
                ParsedGen::Internal(nodes) => {
                    if nodes.is_empty() {
                        (0..alg.rank()).collect()
                    } else {
                        nodes
                    }
                }
                _ => unreachable!(),
            };
            verify_etingof_internal(alg, &case.lambda, &subset, &cfg)
        }
        "commutor_square" => verify_commutor_square(alg, &case.lam1, &case.lam2, &cfg),
        other => {
            return Err(Error::InvalidInput(format!("unknown case kind `{other}`")));
        }
    };
    Ok(report)
}

fn finish_verify(
    reports: &[VerificationReport],
    json: Option<String>,
    xml: Option<String>,
    timings: bool,
) -> Result<i32, Error> {
    let payload = report_json(reports, timings);
    match &json {
        Some(path) => std::fs::write(path, &payload)
            .map_err(|e| Error::InvalidInput(format!("cannot write {path}: {e}")))?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{payload}");
        }
    }
    if let Some(path) = xml {
        std::fs::write(&path, junit_xml(reports))
            .map_err(|e| Error::InvalidInput(format!("cannot write {path}: {e}")))?;
    }
    Ok(outcome_exit(worst_outcome(reports)))
}

/// Canonical argv for a parsed CLI (parse o render = id).
pub fn render_args(cli: &Cli) -> Vec<String> {
    let mut out = vec!["ccl".to_string()];
    fn push_output(out: &mut Vec<String>, o: &OutputOpts) {
        if let Some(p) = &o.out {
            out.push("--out".into());
            out.push(p.clone());
        }
        out.push("--format".into());
        out.push(o.format.clone());
    }
    match &cli.command {
        Command::Crystal { verb } => {
            out.push("crystal".into());
            match verb {
                CrystalVerb::Build {
                    type_label,
                    lambda,
                    rootsystem,
                    output,
                } => {
                    out.push("build".into());
                    out.push("--type".into());
                    out.push(type_label.clone());
                    out.push("--lambda".into());
                    out.push(lambda.clone());
                    if *rootsystem {
                        out.push("--rootsystem".into());
                    }
                    push_output(&mut out, output);
                }
                CrystalVerb::Tensor {
                    type_label,
                    lambdas,
                    output,
                } => {
                    out.push("tensor".into());
                    out.push("--type".into());
                    out.push(type_label.clone());
                    for l in lambdas {
                        out.push("--lambda".into());
                        out.push(l.clone());
                    }
                    push_output(&mut out, output);
                }
                CrystalVerb::Commutor {
                    type_label,
                    lambda1,
                    lambda2,
                    output,
                } => {
                    out.push("commutor".into());
                    out.push("--type".into());
                    out.push(type_label.clone());
                    out.push("--lambda1".into());
                    out.push(lambda1.clone());
                    out.push("--lambda2".into());
                    out.push(lambda2.clone());
                    push_output(&mut out, output);
                }
                CrystalVerb::Cactus {
                    type_label,
                    lambdas,
                    gens,
                    output,
                } => {
                    out.push("cactus".into());
                    out.push("--type".into());
                    out.push(type_label.clone());
                    for l in lambdas {
                        out.push("--lambda".into());
                        out.push(l.clone());
                    }
                    for g in gens {
                        out.push("--gen".into());
                        out.push(g.clone());
                    }
                    push_output(&mut out, output);
                }
            }
        }
        Command::Moduli { verb } => {
            out.push("moduli".into());
            match verb {
                ModuliVerb::Chart { tree, u, output } => {
                    out.push("chart".into());
                    out.push("--tree".into());
                    out.push(tree.clone());
                    if let Some(u) = u {
                        out.push("--u".into());
                        out.push(u.clone());
                    }
                    push_output(&mut out, output);
                }
                ModuliVerb::Schedule {
                    n,
                    gen,
                    base,
                    delta,
                    output,
                } => {
                    out.push("schedule".into());
                    out.push("--n".into());
                    out.push(n.to_string());
                    out.push("--gen".into());
                    out.push(gen.clone());
                    out.push("--base".into());
                    out.push(base.clone());
                    out.push("--delta".into());
                    out.push(delta.to_string());
                    push_output(&mut out, output);
                }
            }
        }
        Command::Gaudin { verb } => {
            out.push("gaudin".into());
            match verb {
                GaudinVerb::Eigenlines {
                    algebra,
                    spins,
                    z,
                    mu,
                    seed,
                    output,
                } => {
                    out.push("eigenlines".into());
                    out.push("--g".into());
                    out.push(algebra.clone());
                    out.push("--spins".into());
                    out.push(spins.clone());
                    if let Some(z) = z {
                        out.push("--z".into());
                        out.push(z.clone());
                    }
                    if let Some(mu) = mu {
                        out.push("--mu".into());
                        out.push(mu.clone());
                    }
                    if let Some(s) = seed {
                        out.push("--seed".into());
                        out.push(s.to_string());
                    }
                    push_output(&mut out, output);
                }
                GaudinVerb::Monodromy {
                    algebra,
                    spins,
                    mu,
                    lambda,
                    gen,
                    z,
                    seed,
                    delta,
                    output,
                } => {
                    out.push("monodromy".into());
                    out.push("--g".into());
                    out.push(algebra.clone());
                    if let Some(s) = spins {
                        out.push("--spins".into());
                        out.push(s.clone());
                    }
                    if let Some(m) = mu {
                        out.push("--mu".into());
                        out.push(m.clone());
                    }
                    if let Some(l) = lambda {
                        out.push("--lambda".into());
                        out.push(l.clone());
                    }
                    out.push("--gen".into());
                    out.push(gen.clone());
                    if let Some(z) = z {
                        out.push("--z".into());
                        out.push(z.clone());
                    }
                    if let Some(s) = seed {
                        out.push("--seed".into());
                        out.push(s.to_string());
                    }
                    if let Some(d) = delta {
                        out.push("--delta".into());
                        out.push(d.to_string());
                    }
                    push_output(&mut out, output);
                }
                GaudinVerb::Pentagon {
                    algebra,
                    spins,
                    seed,
                    output,
                } => {
                    out.push("pentagon".into());
                    out.push("--g".into());
                    out.push(algebra.clone());
                    out.push("--spins".into());
                    out.push(spins.clone());
                    if let Some(s) = seed {
                        out.push("--seed".into());
                        out.push(s.to_string());
                    }
                    push_output(&mut out, output);
                }
            }
        }
        Command::Verify { verb } => {
            out.push("verify".into());
            match verb {
                VerifyVerb::All {
                    suite,
                    seed,
                    json,
                    xml,
                    timings,
                } => {
                    out.push("all".into());
                    out.push("--suite".into());
                    out.push(suite.clone());
                    if let Some(s) = seed {
                        out.push("--seed".into());
                        out.push(s.to_string());
                    }
                    if let Some(j) = json {
                        out.push("--json".into());
                        out.push(j.clone());
                    }
                    if let Some(x) = xml {
                        out.push("--xml".into());
                        out.push(x.clone());
                    }
                    if *timings {
                        out.push("--timings".into());
                    }
                }
                VerifyVerb::Case {
                    config,
                    json,
                    xml,
                    timings,
                } => {
                    out.push("case".into());
                    out.push("--config".into());
                    out.push(config.clone());
                    if let Some(j) = json {
                        out.push("--json".into());
                        out.push(j.clone());
                    }
                    if let Some(x) = xml {
                        out.push("--xml".into());
                        out.push(x.clone());
                    }
                    if *timings {
                        out.push("--timings".into());
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_render_roundtrip() {
        let argsets: Vec<Vec<&str>> = vec![
            vec!["ccl", "crystal", "build", "--type", "A2", "--lambda", "1,1"],
            vec![
                "ccl", "crystal", "tensor", "--type", "A1", "--lambda", "1", "--lambda", "1",
            ],
            vec![
                "ccl", "gaudin", "monodromy", "--g", "sl2", "--spins", "1,1,1", "--mu", "1",
                "--gen", "s12", "--seed", "7",
            ],
            vec!["ccl", "moduli", "chart", "--tree", "((1 2) 3)", "--u", "1"],
            vec!["ccl", "verify", "all", "--suite", "desk"],
        ];
        for args in argsets {
            let cli = Cli::try_parse_from(&args).unwrap();
            let rendered = render_args(&cli);
            let reparsed = Cli::try_parse_from(&rendered).unwrap();
            assert_eq!(cli, reparsed, "{args:?}");
        }
    }

    #[test]
    fn generator_grammar() {
        assert!(matches!(
            parse_generator("sI", false),
            Ok(ParsedGen::Internal(v)) if v.is_empty()
        ));
        assert!(matches!(
            parse_generator("s1", false),
            Ok(ParsedGen::Internal(v)) if v == vec![0]
        ));
        assert!(matches!(
            parse_generator("s12", false),
            Ok(ParsedGen::Internal(v)) if v == vec![0, 1]
        ));
        assert!(matches!(
            parse_generator("s12", true),
            Ok(ParsedGen::External(1, 2))
        ));
        assert!(matches!(
            parse_generator("s_1_3", true),
            Ok(ParsedGen::External(1, 3))
        ));
        assert!(parse_generator("s21", true).is_err());
        assert!(parse_generator("x12", true).is_err());
    }

    #[test]
    fn usage_errors_exit_three() {
        assert_eq!(run(["ccl", "nonsense"]), EXIT_USAGE);
        assert_eq!(
            run(["ccl", "crystal", "build", "--type", "E8", "--lambda", "1"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn crystal_build_runs() {
        let dir = std::env::temp_dir().join("ccl_cli_test");
        let _ = std::fs::create_dir_all(&dir);
        let out = dir.join("b.json");
        let code = run([
            "ccl",
            "crystal",
            "build",
            "--type",
            "A2",
            "--lambda",
            "1,1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("{\"elements\":"));
        assert_eq!(text.matches("\"id\"").count(), 8);
    }
}

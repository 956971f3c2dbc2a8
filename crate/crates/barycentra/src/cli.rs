//! Command-line surface: loads models from JSON references, runs law checks
//! and structure computations, and emits deterministic JSON reports plus
//! optional DOT diagrams.
//!
//! Exit codes are uniform across commands: 0 when every requested check
//! passes, 1 for a semantic failure (a law fails, a validation finds a
//! witness), 2 for input or usage errors. All sampled work is seeded: the
//! `--seed` flag wins, then the `BARYCENTRA_SEED` environment variable,
//! then the fixed default 7 — so bare invocations are reproducible and
//! outputs are byte-identical across runs.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affine::{
    coset_algebra, enumerate_subspaces, rational_coset_demo, verify_parallelogram_identity,
    verify_plonka_structure, verify_replica_is_projective, FiniteVectorSpace, QSubspaceFamily,
};
use crate::convex::Polytope;
use crate::laws::{
    check_cancellativity, check_identity_pinned, find_law, law_suite, CheckReport, Law, Strategy,
};
use crate::model::{Model, PlonkaModel, ScalarValue};
use crate::plonka::{
    builtin, polytope_as_plonka, AffineMap, Fiber, PlonkaSum, ReconstructionReport, SumElement,
    SumPredicate, BUILTIN_NAMES,
};
use crate::scalar::{self, format_rat, Weight};
use crate::semilattice::FiniteSemilattice;
use crate::{Point, Rat};

/// The seed used when neither `--seed` nor `BARYCENTRA_SEED` is given.
pub const DEFAULT_SEED: u64 = 7;

const KINDS_HELP: &str =
    "polytope, semilattice, plonka, affine-gf, affine-q-family, or builtin";

#[derive(Parser)]
#[command(
    name = "barycentra",
    version,
    about = "Exact weighted-mean algebras: law checking, semilattice quotients, face lattices, \
             sums of fibers, and affine spaces over prime fields"
)]
struct Cli {
    /// Seed for sampled operations; overrides BARYCENTRA_SEED (default 7).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check identities and quasi-identities against a model.
    Check(CheckArgs),
    /// Compute a model's semilattice quotient and class descriptors.
    Replica(ReplicaArgs),
    /// Enumerate the face lattice of a polytope.
    Faces(FacesArgs),
    /// Validate, evaluate, or build sums of fibers over a semilattice.
    #[command(subcommand)]
    Plonka(PlonkaVerb),
    /// Structure reports for affine spaces over GF(p) and rational families.
    #[command(subcommand)]
    Affine(AffineVerb),
    /// List the packaged example models.
    ListBuiltins,
}

#[derive(Args)]
struct CheckArgs {
    /// Model reference `kind:payload`; see docs/formats.md.
    model: String,
    /// Comma-separated law or suite names (law names, or the suites
    /// `barycentric`, `affine`, `cancellativity`).
    #[arg(long, value_delimiter = ',', required = true)]
    laws: Vec<String>,
    /// Sweep every element and weight combination (finite models only).
    #[arg(long, conflicts_with = "sampled")]
    exhaustive: bool,
    /// Number of seeded random samples (default 1000).
    #[arg(long)]
    sampled: Option<usize>,
    /// Pin weight variables to fixed values, e.g. `--pin p=1/2,r=1/3`.
    #[arg(long, value_delimiter = ',')]
    pin: Vec<String>,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplicaArgs {
    /// Model reference `kind:payload`; see docs/formats.md.
    model: String,
    /// Write a DOT Hasse diagram of the replica here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct FacesArgs {
    /// Polytope JSON (inline or a file path; a `polytope:` prefix is allowed).
    polytope: String,
    /// Write a DOT Hasse diagram of the face lattice here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PlonkaVerb {
    /// Build a sum from JSON and run the full validation pipeline.
    Validate {
        /// Sum JSON (inline, a file path, or `builtin:<name>`).
        model: String,
    },
    /// Evaluate one weighted operation in a sum.
    Eval {
        /// Sum JSON (inline, a file path, or `builtin:<name>`).
        model: String,
        /// Weight as a rational in (0,1), e.g. 1/2.
        #[arg(long)]
        p: String,
        /// Left argument: `fiber:coords` or a named point.
        #[arg(long)]
        x: String,
        /// Right argument: `fiber:coords` or a named point.
        #[arg(long)]
        y: String,
    },
    /// Re-present a polytope as a sum of its faces and verify agreement.
    AsPlonka {
        /// Polytope JSON (inline or a file path).
        polytope: String,
        /// Number of seeded sample pairs to compare.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum AffineVerb {
    /// Verify the coset algebra decomposes as a sum of fibers for weight k.
    Structure {
        /// Space reference: `{"modulus":3,"dimension":2}` or `{p:3,n:2}`.
        space: String,
        /// Non-degenerate weight (2 <= k < p).
        #[arg(long)]
        k: u64,
    },
    /// Verify the coset algebra's replica is the subspace lattice.
    Replica {
        /// Space reference as for `structure`.
        space: String,
        /// Weights to test (default: all of 2..p).
        #[arg(long, value_delimiter = ',')]
        weights: Vec<u64>,
    },
    /// Enumerate all linear subspaces of the space.
    Subspaces {
        /// Space reference as for `structure`.
        space: String,
    },
    /// Verify the parallelogram operation is a derived operation.
    Parallelogram {
        /// Space reference as for `structure`.
        space: String,
    },
    /// Demonstrate the fiberwise action on a rational subspace family.
    DemoQ {
        /// Family JSON (inline or a file path).
        family: String,
        /// Number of seeded operation-agreement samples.
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

// ===== Failure plumbing =====

/// A user-facing input or usage problem: exit 2 with a message on stderr.
/// Semantic failures (a law fails, a validation finds a witness) are not
/// errors — they emit their JSON report and map to exit code 1.
struct Failure(String);

type CResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CResult<T> {
    Err(Failure(msg.into()))
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the CLI against explicit argument and output streams; returns the
/// process exit code. The binary forwards `std::env::args` here.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let seed = match resolve_seed(cli.seed) {
        Ok(s) => s,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return 2;
        }
    };
    match dispatch(cli.command, seed, out) {
        Ok(code) => code,
        Err(Failure(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> std::result::Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("BARYCENTRA_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| format!("BARYCENTRA_SEED must be an unsigned integer, got `{text}`")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn dispatch(cmd: Command, seed: u64, out: &mut dyn Write) -> CResult<i32> {
    match cmd {
        Command::Check(args) => cmd_check(args, seed, out),
        Command::Replica(args) => cmd_replica(args, seed, out),
        Command::Faces(args) => cmd_faces(args, out),
        Command::Plonka(verb) => cmd_plonka(verb, seed, out),
        Command::Affine(verb) => cmd_affine(verb, seed, out),
        Command::ListBuiltins => cmd_list_builtins(out),
    }
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> CResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure(format!("cannot serialize output: {e}")))?;
    writeln!(out, "{text}").map_err(|e| Failure(format!("cannot write output: {e}")))
}

fn write_file(path: &PathBuf, text: &str) -> CResult<()> {
    fs::write(path, text)
        .map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))
}

// ===== Model references =====

/// Inline JSON if the payload starts with `{`, otherwise a file's contents.
fn read_payload(payload: &str) -> CResult<String> {
    if payload.trim_start().starts_with('{') {
        Ok(payload.to_string())
    } else {
        fs::read_to_string(payload)
            .map_err(|e| Failure(format!("cannot read `{payload}`: {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> CResult<T> {
    serde_json::from_str(text).map_err(|e| Failure(format!("invalid {what}: {e}")))
}

/// Parses a space payload: strict `{"modulus":p,"dimension":n}` JSON or the
/// compact `{p:3,n:2}` shorthand.
fn parse_space(payload: &str) -> CResult<FiniteVectorSpace> {
    let text = read_payload(payload)?;
    if let Ok(space) = serde_json::from_str::<FiniteVectorSpace>(&text) {
        return Ok(space);
    }
    let bad = || {
        Failure(format!(
            "cannot parse space `{text}`: expected {{\"modulus\":p,\"dimension\":n}} or {{p:3,n:2}}"
        ))
    };
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(bad)?;
    let mut modulus = None;
    let mut dimension = None;
    for part in inner.split(',') {
        let (key, value) = part.split_once(':').ok_or_else(bad)?;
        let value = value.trim();
        match key.trim().trim_matches('"') {
            "p" | "modulus" => modulus = Some(value.parse::<u64>().map_err(|_| bad())?),
            "n" | "dim" | "dimension" => {
                dimension = Some(value.parse::<usize>().map_err(|_| bad())?)
            }
            other => return usage(format!("unknown space field `{other}`")),
        }
    }
    match (modulus, dimension) {
        (Some(p), Some(n)) => Ok(FiniteVectorSpace::new(p, n)?),
        _ => usage("a space needs both a modulus (p) and a dimension (n)"),
    }
}

/// The on-disk shape of a sum: the raw parts plus the optional subalgebra
/// predicate and named points.
#[derive(Deserialize)]
struct PlonkaFile {
    index: FiniteSemilattice,
    fibers: BTreeMap<String, Fiber>,
    #[serde(default)]
    transitions: Vec<TransitionFile>,
    #[serde(default)]
    predicate: Option<SumPredicate>,
    #[serde(default)]
    points: BTreeMap<String, NamedPointFile>,
}

#[derive(Deserialize)]
struct TransitionFile {
    from: String,
    to: String,
    #[serde(with = "crate::scalar::rat_mat")]
    matrix: Vec<Vec<Rat>>,
    #[serde(with = "crate::scalar::rat_vec")]
    offset: Point,
}

#[derive(Deserialize)]
struct NamedPointFile {
    fiber: String,
    #[serde(with = "crate::scalar::rat_vec")]
    point: Point,
}

enum PlonkaLoadError {
    /// Malformed JSON or schema: an input error.
    Parse(String),
    /// Well-formed parts that fail sum validation: a semantic error.
    Invalid(String),
}

fn load_plonka_model(payload: &str, name: &str) -> std::result::Result<PlonkaModel, PlonkaLoadError> {
    let payload = payload.strip_prefix("plonka:").unwrap_or(payload);
    if let Some(builtin_name) = payload.strip_prefix("builtin:") {
        let bundle = builtin(builtin_name).map_err(|e| PlonkaLoadError::Parse(e.to_string()))?;
        return Ok(PlonkaModel::from_bundle(bundle));
    }
    let text = read_payload(payload).map_err(|f| match f {
        Failure(m) => PlonkaLoadError::Parse(m),
    })?;
    let parts: PlonkaFile =
        serde_json::from_str(&text).map_err(|e| PlonkaLoadError::Parse(e.to_string()))?;
    let transitions = parts
        .transitions
        .into_iter()
        .map(|t| {
            (
                t.from,
                t.to,
                AffineMap {
                    matrix: t.matrix,
                    offset: t.offset,
                },
            )
        })
        .collect();
    let sum = PlonkaSum::new(parts.index, parts.fibers, transitions)
        .map_err(|e| PlonkaLoadError::Invalid(e.to_string()))?;
    let mut named_points = BTreeMap::new();
    for (point_name, np) in parts.points {
        let fiber = sum
            .index()
            .index_of(&np.fiber)
            .map_err(|e| PlonkaLoadError::Parse(e.to_string()))?;
        let e = SumElement::new(fiber, np.point);
        sum.check_element(&e)
            .map_err(|er| PlonkaLoadError::Parse(er.to_string()))?;
        named_points.insert(point_name, e);
    }
    let mut model = PlonkaModel::from_sum(name.to_string(), sum);
    model.predicate = parts.predicate.unwrap_or(SumPredicate::All);
    model.named_points = named_points;
    Ok(model)
}

/// Loads a `kind:payload` model reference for the check and replica
/// commands. Every load problem is a usage error here; `plonka validate`
/// uses the dedicated loader to distinguish semantic failures.
fn load_model(reference: &str) -> CResult<Model> {
    let (kind, payload) = reference.split_once(':').ok_or_else(|| {
        Failure(format!(
            "model reference `{reference}` must look like kind:payload (kinds: {KINDS_HELP})"
        ))
    })?;
    match kind {
        "polytope" => Ok(Model::Polytope(parse_json(
            &read_payload(payload)?,
            "polytope",
        )?)),
        "semilattice" => Ok(Model::Semilattice(parse_json(
            &read_payload(payload)?,
            "semilattice",
        )?)),
        "plonka" => match load_plonka_model(payload, reference) {
            Ok(m) => Ok(Model::Plonka(m)),
            Err(PlonkaLoadError::Parse(m)) | Err(PlonkaLoadError::Invalid(m)) => {
                usage(format!("invalid sum: {m}"))
            }
        },
        "affine-gf" => Ok(Model::AffineGf(parse_space(payload)?)),
        "builtin" => Ok(Model::Plonka(PlonkaModel::from_bundle(builtin(payload)?))),
        "affine-q-family" => usage(
            "affine-q-family models carry no single algebra to check; use `affine demo-q`",
        ),
        other => usage(format!("unknown model kind `{other}` (kinds: {KINDS_HELP})")),
    }
}

// ===== check =====

fn resolve_laws(names: &[String]) -> CResult<Vec<Law>> {
    let mut laws: Vec<Law> = Vec::new();
    for name in names {
        let batch = match law_suite(name) {
            Ok(batch) => batch,
            Err(_) => vec![find_law(name)?],
        };
        for law in batch {
            if !laws.iter().any(|l| l.name() == law.name()) {
                laws.push(law);
            }
        }
    }
    Ok(laws)
}

fn parse_pins(pins: &[String], model: &Model) -> CResult<BTreeMap<String, ScalarValue>> {
    let mut out = BTreeMap::new();
    for pin in pins {
        let (name, value) = pin.split_once('=').ok_or_else(|| {
            Failure(format!("pin `{pin}` must look like name=value"))
        })?;
        let value = match model {
            Model::AffineGf(_) => ScalarValue::Gf(value.trim().parse::<u64>().map_err(|_| {
                Failure(format!("pin `{pin}`: expected a field residue"))
            })?),
            _ => ScalarValue::Q(Weight::new(scalar::parse_rat(value.trim())?)?),
        };
        out.insert(name.trim().to_string(), value);
    }
    Ok(out)
}

fn cmd_check(args: CheckArgs, seed: u64, out: &mut dyn Write) -> CResult<i32> {
    let model = load_model(&args.model)?;
    let strategy = if args.exhaustive {
        Strategy::Exhaustive
    } else {
        Strategy::Sampled {
            samples: args.sampled.unwrap_or(1000),
            seed,
        }
    };
    let laws = resolve_laws(&args.laws)?;
    let pins = parse_pins(&args.pin, &model)?;
    let mut reports: Vec<CheckReport> = Vec::new();
    for law in &laws {
        let report = match law {
            Law::Identity(id) => check_identity_pinned(&model, id, strategy, &pins)?,
            Law::Quasi(q) => {
                if let Some(var) = pins.keys().find(|v| v.as_str() != "p") {
                    return Err(Failure(format!(
                        "law `{}` has no weight variable `{var}` (it uses p)",
                        q.name
                    )));
                }
                let ps: Vec<ScalarValue> = match pins.get("p") {
                    Some(v) => vec![v.clone()],
                    None => Vec::new(),
                };
                check_cancellativity(&model, &ps, strategy)?
            }
        };
        reports.push(report);
    }
    let all_pass = reports.iter().all(|r| r.passed());
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&reports)
            .map_err(|e| Failure(format!("cannot serialize output: {e}")))?;
        write_file(path, &format!("{text}\n"))?;
    } else {
        emit(out, &reports)?;
    }
    Ok(if all_pass { 0 } else { 1 })
}

// ===== replica =====

#[derive(Serialize)]
struct ClassifiedSample {
    element: String,
    class: String,
}

#[derive(Serialize)]
struct ReplicaOut {
    model: String,
    classes: usize,
    class_labels: Vec<String>,
    semilattice: FiniteSemilattice,
    #[serde(skip_serializing_if = "Option::is_none")]
    matches_expected: Option<bool>,
    samples: Vec<ClassifiedSample>,
}

const CLASSIFIER_SAMPLES: usize = 5;

fn cmd_replica(args: ReplicaArgs, seed: u64, out: &mut dyn Write) -> CResult<i32> {
    let model = load_model(&args.model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exit = 0;
    let result = match &model {
        Model::Polytope(p) => {
            let lattice = p.face_lattice();
            let cells = p.open_cells();
            let labels: Vec<String> = cells.iter().map(|c| c.label.clone()).collect();
            let semilattice =
                FiniteSemilattice::from_join_fn(labels.clone(), |i, j| lattice.join_idx(i, j))?;
            let samples = (0..CLASSIFIER_SAMPLES)
                .map(|_| {
                    let x = p.sample_point(&mut rng);
                    let class = labels[p.classify(&x)?].clone();
                    Ok(ClassifiedSample {
                        element: scalar::format_point(&x),
                        class,
                    })
                })
                .collect::<CResult<Vec<_>>>()?;
            ReplicaOut {
                model: model.describe(),
                classes: labels.len(),
                class_labels: labels,
                semilattice,
                matches_expected: None,
                samples,
            }
        }
        Model::Semilattice(s) => {
            // A semilattice is its own replica; every class is a singleton.
            let labels: Vec<String> = s.elements().to_vec();
            let samples = labels
                .iter()
                .take(CLASSIFIER_SAMPLES)
                .map(|l| ClassifiedSample {
                    element: l.clone(),
                    class: l.clone(),
                })
                .collect();
            ReplicaOut {
                model: model.describe(),
                classes: s.size(),
                class_labels: labels,
                semilattice: s.clone(),
                matches_expected: None,
                samples,
            }
        }
        Model::Plonka(m) => {
            let full = m.sum.refined_replica()?;
            let restricted = m.sum.restrict(&m.predicate, &full)?;
            let labels: Vec<String> =
                restricted.classes.iter().map(|c| c.label.clone()).collect();
            let mut samples = Vec::new();
            for _ in 0..CLASSIFIER_SAMPLES {
                let e = match model.sample_element(&mut rng)? {
                    crate::model::ModelElement::Sum(e) => e,
                    _ => unreachable!("sum models sample sum elements"),
                };
                let class = restricted.semilattice
                    .label(m.sum.classify_restricted(&restricted, &e)?)
                    .to_string();
                samples.push(ClassifiedSample {
                    element: m.sum.format_element(&e),
                    class,
                });
            }
            let matches_expected = m
                .expected_replica
                .as_ref()
                .map(|expected| expected.is_isomorphic(&restricted.semilattice));
            if matches_expected == Some(false) {
                exit = 1;
            }
            ReplicaOut {
                model: model.describe(),
                classes: restricted.classes.len(),
                class_labels: labels,
                semilattice: restricted.semilattice,
                matches_expected,
                samples,
            }
        }
        Model::AffineGf(space) => {
            let report = verify_replica_is_projective(space, &[])?;
            if !report.pass {
                exit = 1;
            }
            let algebra = coset_algebra(space)?;
            let labels: Vec<String> =
                algebra.subspaces().iter().map(|u| u.label()).collect();
            let samples = (0..CLASSIFIER_SAMPLES)
                .map(|_| {
                    let i = rand::Rng::gen_range(&mut rng, 0..algebra.len());
                    ClassifiedSample {
                        element: algebra.cosets()[i].label(),
                        class: algebra.subspaces()[algebra.fiber_of(i)].label(),
                    }
                })
                .collect();
            ReplicaOut {
                model: model.describe(),
                classes: report.class_count,
                class_labels: labels,
                semilattice: report.replica,
                matches_expected: Some(report.isomorphic_to_subspace_lattice),
                samples,
            }
        }
    };
    if let Some(path) = &args.dot {
        write_file(path, &result.semilattice.to_dot())?;
    }
    emit(out, &result)?;
    Ok(exit)
}

// ===== faces =====

#[derive(Serialize)]
struct FaceOut {
    label: String,
    dim: usize,
    vertices: Vec<usize>,
}

#[derive(Serialize)]
struct FacesOut {
    vertices: usize,
    ambient_dim: usize,
    counts_by_dim: Vec<usize>,
    faces: Vec<FaceOut>,
}

fn cmd_faces(args: FacesArgs, out: &mut dyn Write) -> CResult<i32> {
    let payload = args.polytope.strip_prefix("polytope:").unwrap_or(&args.polytope);
    let p: Polytope = parse_json(&read_payload(payload)?, "polytope")?;
    let lattice = p.face_lattice();
    let counts = lattice.counts_by_dim();
    let faces: Vec<FaceOut> = lattice
        .faces()
        .iter()
        .enumerate()
        .map(|(i, f)| FaceOut {
            label: lattice.label(i),
            dim: f.dim,
            vertices: f.vertices.clone(),
        })
        .collect();
    if let Some(path) = &args.dot {
        write_file(path, &lattice.to_dot())?;
    }
    emit(
        out,
        &FacesOut {
            vertices: p.vertex_count(),
            ambient_dim: p.ambient_dim(),
            counts_by_dim: counts,
            faces,
        },
    )?;
    Ok(0)
}

// ===== plonka =====

#[derive(Serialize)]
struct ValidateOut {
    result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fibers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transitions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<Vec<String>>,
}

#[derive(Serialize)]
struct EvalOut {
    fiber: String,
    point: Vec<String>,
    display: String,
}

#[derive(Serialize)]
struct AsPlonkaOut {
    fibers: usize,
    #[serde(flatten)]
    report: ReconstructionReport,
}

fn cmd_plonka(verb: PlonkaVerb, seed: u64, out: &mut dyn Write) -> CResult<i32> {
    match verb {
        PlonkaVerb::Validate { model } => match load_plonka_model(&model, &model) {
            Ok(m) => {
                let labels: Vec<String> = (0..m.sum.index().size())
                    .map(|i| m.sum.index().label(i).to_string())
                    .collect();
                emit(
                    out,
                    &ValidateOut {
                        result: "pass",
                        error: None,
                        fibers: Some(m.sum.fibers().len()),
                        transitions: Some(m.sum.transition_count()),
                        index: Some(labels),
                    },
                )?;
                Ok(0)
            }
            Err(PlonkaLoadError::Parse(m)) => usage(m),
            Err(PlonkaLoadError::Invalid(m)) => {
                emit(
                    out,
                    &ValidateOut {
                        result: "fail",
                        error: Some(m),
                        fibers: None,
                        transitions: None,
                        index: None,
                    },
                )?;
                Ok(1)
            }
        },
        PlonkaVerb::Eval { model, p, x, y } => {
            let m = match load_plonka_model(&model, &model) {
                Ok(m) => m,
                Err(PlonkaLoadError::Parse(msg)) | Err(PlonkaLoadError::Invalid(msg)) => {
                    return usage(msg)
                }
            };
            let weight = Weight::new(scalar::parse_rat(&p)?)?;
            let ex = m.resolve_element(&x)?;
            let ey = m.resolve_element(&y)?;
            let result = m.sum.eval(&weight, &ex, &ey)?;
            emit(
                out,
                &EvalOut {
                    fiber: m.sum.index().label(result.fiber).to_string(),
                    point: result.point.iter().map(format_rat).collect(),
                    display: m.sum.format_element(&result),
                },
            )?;
            Ok(0)
        }
        PlonkaVerb::AsPlonka { polytope, samples } => {
            let payload = polytope.strip_prefix("polytope:").unwrap_or(&polytope);
            let p: Polytope = parse_json(&read_payload(payload)?, "polytope")?;
            let (sum, report) = polytope_as_plonka(&p, samples, seed)?;
            let pass = report.pass;
            emit(
                out,
                &AsPlonkaOut {
                    fibers: sum.index().size(),
                    report,
                },
            )?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

// ===== affine =====

#[derive(Serialize)]
struct SubspacesOut {
    modulus: u64,
    dimension: usize,
    count: usize,
    counts_by_dim: Vec<usize>,
    labels: Vec<String>,
}

fn cmd_affine(verb: AffineVerb, seed: u64, out: &mut dyn Write) -> CResult<i32> {
    match verb {
        AffineVerb::Structure { space, k } => {
            let space = parse_space(space.strip_prefix("affine-gf:").unwrap_or(&space))?;
            let report = verify_plonka_structure(&space, k)?;
            let pass = report.pass;
            emit(out, &report)?;
            Ok(if pass { 0 } else { 1 })
        }
        AffineVerb::Replica { space, weights } => {
            let space = parse_space(space.strip_prefix("affine-gf:").unwrap_or(&space))?;
            let report = verify_replica_is_projective(&space, &weights)?;
            let pass = report.pass;
            emit(out, &report)?;
            Ok(if pass { 0 } else { 1 })
        }
        AffineVerb::Subspaces { space } => {
            let space = parse_space(space.strip_prefix("affine-gf:").unwrap_or(&space))?;
            let subspaces = enumerate_subspaces(&space)?;
            let mut counts = vec![0usize; space.dimension() + 1];
            for u in &subspaces {
                counts[u.dim()] += 1;
            }
            emit(
                out,
                &SubspacesOut {
                    modulus: space.modulus(),
                    dimension: space.dimension(),
                    count: subspaces.len(),
                    counts_by_dim: counts,
                    labels: subspaces.iter().map(|u| u.label()).collect(),
                },
            )?;
            Ok(0)
        }
        AffineVerb::Parallelogram { space } => {
            let space = parse_space(space.strip_prefix("affine-gf:").unwrap_or(&space))?;
            let report = verify_parallelogram_identity(&space)?;
            let pass = report.pass;
            emit(out, &report)?;
            Ok(if pass { 0 } else { 1 })
        }
        AffineVerb::DemoQ { family, samples } => {
            let payload = family
                .strip_prefix("affine-q-family:")
                .unwrap_or(&family);
            let family: QSubspaceFamily =
                parse_json(&read_payload(payload)?, "subspace family")?;
            let report = rational_coset_demo(&family, samples, seed)?;
            let pass = report.pass;
            emit(out, &report)?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

// ===== list-builtins =====

#[derive(Serialize)]
struct BuiltinOut {
    name: String,
    description: String,
}

fn cmd_list_builtins(out: &mut dyn Write) -> CResult<i32> {
    let list: Vec<BuiltinOut> = BUILTIN_NAMES
        .iter()
        .map(|name| {
            let bundle = builtin(name).expect("every listed builtin builds");
            BuiltinOut {
                name: bundle.name,
                description: bundle.description,
            }
        })
        .collect();
    emit(out, &list)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv: Vec<String> = std::iter::once("barycentra".to_string())
            .chain(args.iter().map(|s| s.to_string()))
            .collect();
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn list_builtins_enumerates_the_four_models() {
        let (code, out) = run_cli(&["list-builtins"]);
        assert_eq!(code, 0);
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
        let names: Vec<&str> = parsed.iter().map(|v| v["name"].as_str().unwrap()).collect();
        assert_eq!(
            names,
            vec![
                "extended-line",
                "homomorphism-example",
                "t-algebra",
                "toy-biology"
            ]
        );
    }

    #[test]
    fn check_barycentric_suite_on_builtin_passes() {
        let (code, out) = run_cli(&[
            "check",
            "builtin:t-algebra",
            "--laws",
            "barycentric",
            "--sampled",
            "1000",
            "--seed",
            "7",
        ]);
        assert_eq!(code, 0, "{out}");
        let reports: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(reports.iter().all(|r| r["result"] == "pass"));
    }

    #[test]
    fn check_cancellativity_on_builtin_fails_with_witness() {
        let (code, out) = run_cli(&[
            "check",
            "builtin:t-algebra",
            "--laws",
            "cancellativity",
            "--sampled",
            "1000",
            "--seed",
            "7",
        ]);
        assert_eq!(code, 1);
        let reports: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
        assert_eq!(reports[0]["result"], "fail");
        assert!(reports[0]["counterexample"]["elements"]["x"]
            .as_str()
            .unwrap()
            .starts_with("1:"));
    }

    #[test]
    fn check_affine_suite_exhaustively() {
        let (code, out) = run_cli(&[
            "check",
            "affine-gf:{p:3,n:2}",
            "--laws",
            "affine",
            "--exhaustive",
        ]);
        assert_eq!(code, 0, "{out}");
        let reports: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(reports.iter().all(|r| r["result"] == "pass"));
    }

    #[test]
    fn replica_of_builtin_matches_expected() {
        let (code, out) = run_cli(&["replica", "builtin:t-algebra"]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["classes"], 5);
        assert_eq!(v["matches_expected"], true);
    }

    #[test]
    fn replica_of_affine_space_counts_subspaces() {
        let (code, out) = run_cli(&["replica", "affine-gf:{p:3,n:2}"]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["classes"], 6);
        assert_eq!(v["matches_expected"], true);
    }

    #[test]
    fn faces_of_inline_triangle() {
        let triangle = r#"{"ambient_dim":2,"vertices":[["0","0"],["1","0"],["0","1"]]}"#;
        let (code, out) = run_cli(&["faces", &format!("polytope:{triangle}")]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["counts_by_dim"], serde_json::json!([3, 3, 1]));
    }

    #[test]
    fn faces_rejects_non_extreme_vertices() {
        // The midpoint of the segment is not a vertex.
        let bad = r#"{"ambient_dim":1,"vertices":[["0"],["1"],["1/2"]]}"#;
        let (code, out) = run_cli(&["faces", bad]);
        assert_eq!(code, 2);
        assert_eq!(out, "");
    }

    #[test]
    fn eval_on_builtin_with_greek_names() {
        let (code, out) = run_cli(&[
            "plonka",
            "eval",
            "builtin:t-algebra",
            "--p",
            "1/2",
            "--x",
            "0:α",
            "--y",
            "1:γ",
        ]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["fiber"], "1");
        assert_eq!(v["point"], serde_json::json!(["1"]));
        assert_eq!(v["display"], "1:(1)");
    }

    #[test]
    fn as_plonka_agrees_on_the_square() {
        let square = r#"{"ambient_dim":2,"vertices":[["0","0"],["1","0"],["0","1"],["1","1"]]}"#;
        let (code, out) = run_cli(&["plonka", "as-plonka", square, "--samples", "200"]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["fibers"], 9);
        assert_eq!(v["agreements"], 200);
        assert_eq!(v["pass"], true);
    }

    #[test]
    fn unknown_kind_and_unknown_law_are_usage_errors() {
        let (code, _) = run_cli(&["check", "pasture:cows", "--laws", "barycentric"]);
        assert_eq!(code, 2);
        let (code, _) = run_cli(&["check", "builtin:t-algebra", "--laws", "flatness"]);
        assert_eq!(code, 2);
        let (code, _) = run_cli(&["replica", "builtin:no-such-model"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn output_is_byte_identical_across_runs() {
        let args = [
            "check",
            "builtin:extended-line",
            "--laws",
            "barycentric,cancellativity",
            "--sampled",
            "60",
        ];
        let (code_a, out_a) = run_cli(&args);
        let (code_b, out_b) = run_cli(&args);
        assert_eq!(code_a, code_b);
        assert_eq!(out_a, out_b);
        assert_eq!(code_a, 1); // cancellativity fails on the extended line
    }
}

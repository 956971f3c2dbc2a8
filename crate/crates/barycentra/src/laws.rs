//! Terms over the binary-mean signature, identities and quasi-identities,
//! the built-in law catalogue, regularity checking, and term evaluation.
//!
//! A term is either an element variable or a node `w(left, right)` whose
//! weight is itself an expression: a rational constant in (0,1), a field
//! residue, a weight variable, or a combination by complement, dual product
//! `r + p - rp`, quotient, or scalar mean. The same term language serves both
//! rational models (where every weight must stay strictly between 0 and 1)
//! and prime-field models (where weights are arbitrary residues).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{mean_vec, Field, PrimeField};
use crate::model::{Model, ModelElement, ScalarValue};
use crate::scalar::{self, Weight};
use crate::{Point, Rat};

// ===== Weight expressions =====

/// An expression evaluating to a scalar weight.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightExpr {
    /// A rational constant, strictly between 0 and 1.
    Const(Weight),
    /// A field residue, interpreted in the model's prime field.
    FieldConst(u64),
    /// A weight variable.
    Var(String),
    /// `1 - w`.
    Complement(Box<WeightExpr>),
    /// `r + p - rp`, the weight composition from skew-associativity.
    DualProduct(Box<WeightExpr>, Box<WeightExpr>),
    /// `a / b`.
    Quotient(Box<WeightExpr>, Box<WeightExpr>),
    /// `(1-r)p + rq`, the scalar mean used to combine weights.
    Mean(Box<WeightExpr>, Box<WeightExpr>, Box<WeightExpr>),
}

impl WeightExpr {
    pub fn var(name: &str) -> Self {
        WeightExpr::Var(name.to_string())
    }

    pub fn complement(e: WeightExpr) -> Self {
        WeightExpr::Complement(Box::new(e))
    }

    pub fn dual(a: WeightExpr, b: WeightExpr) -> Self {
        WeightExpr::DualProduct(Box::new(a), Box::new(b))
    }

    pub fn quotient(a: WeightExpr, b: WeightExpr) -> Self {
        WeightExpr::Quotient(Box::new(a), Box::new(b))
    }

    pub fn mean(r: WeightExpr, p: WeightExpr, q: WeightExpr) -> Self {
        WeightExpr::Mean(Box::new(r), Box::new(p), Box::new(q))
    }

    /// Evaluates over the rationals. Every intermediate value must lie
    /// strictly between 0 and 1 — anything else (including a field constant)
    /// is an error, which is what makes laws such as the projections
    /// inapplicable to rational models.
    pub fn eval_q(&self, bind: &BTreeMap<String, Weight>) -> Result<Weight> {
        let value: Rat = match self {
            WeightExpr::Const(w) => w.value().clone(),
            WeightExpr::FieldConst(k) => {
                return Err(Error::ScalarKind(format!(
                    "field constant {k} cannot be used as a rational weight"
                )))
            }
            WeightExpr::Var(v) => bind
                .get(v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?
                .value()
                .clone(),
            WeightExpr::Complement(e) => {
                scalar::rat_int(1) - e.eval_q(bind)?.value()
            }
            WeightExpr::DualProduct(a, b) => {
                let a = a.eval_q(bind)?;
                let b = b.eval_q(bind)?;
                return Ok(scalar::dual_product(&a, &b));
            }
            WeightExpr::Quotient(a, b) => {
                a.eval_q(bind)?.value() / b.eval_q(bind)?.value()
            }
            WeightExpr::Mean(r, p, q) => {
                let r = r.eval_q(bind)?;
                let p = p.eval_q(bind)?;
                let q = q.eval_q(bind)?;
                (scalar::rat_int(1) - r.value()) * p.value() + r.value() * q.value()
            }
        };
        Weight::new(value)
    }

    /// Evaluates over a prime field; weights there are arbitrary residues.
    pub fn eval_gf(&self, field: &PrimeField, bind: &BTreeMap<String, u64>) -> Result<u64> {
        Ok(match self {
            WeightExpr::Const(w) => {
                let num = field.elem_from_i64(
                    i64::try_from(w.value().numer().clone()).map_err(|_| {
                        Error::ScalarKind(format!("weight {w} is too large for a field residue"))
                    })?,
                );
                let den = field.elem_from_i64(
                    i64::try_from(w.value().denom().clone()).map_err(|_| {
                        Error::ScalarKind(format!("weight {w} is too large for a field residue"))
                    })?,
                );
                let inv = field.inv(&den).ok_or_else(|| Error::DivisionByZero {
                    modulus: field.modulus(),
                    context: format!("denominator of {w}"),
                })?;
                field.mul(&num, &inv)
            }
            WeightExpr::FieldConst(k) => field.elem_from_i64(*k as i64),
            WeightExpr::Var(v) => *bind
                .get(v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
            WeightExpr::Complement(e) => {
                let e = e.eval_gf(field, bind)?;
                field.sub(&field.one(), &e)
            }
            WeightExpr::DualProduct(a, b) => {
                let a = a.eval_gf(field, bind)?;
                let b = b.eval_gf(field, bind)?;
                field.sub(&field.add(&a, &b), &field.mul(&a, &b))
            }
            WeightExpr::Quotient(a, b) => {
                let a = a.eval_gf(field, bind)?;
                let b = b.eval_gf(field, bind)?;
                let inv = field.inv(&b).ok_or_else(|| Error::DivisionByZero {
                    modulus: field.modulus(),
                    context: "weight quotient".to_string(),
                })?;
                field.mul(&a, &inv)
            }
            WeightExpr::Mean(r, p, q) => {
                let r = r.eval_gf(field, bind)?;
                let p = p.eval_gf(field, bind)?;
                let q = q.eval_gf(field, bind)?;
                field.add(&field.mul(&field.sub(&field.one(), &r), &p), &field.mul(&r, &q))
            }
        })
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            WeightExpr::Const(_) | WeightExpr::FieldConst(_) => {}
            WeightExpr::Var(v) => {
                out.insert(v.clone());
            }
            WeightExpr::Complement(e) => e.collect_vars(out),
            WeightExpr::DualProduct(a, b) | WeightExpr::Quotient(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            WeightExpr::Mean(r, p, q) => {
                r.collect_vars(out);
                p.collect_vars(out);
                q.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightExpr::Const(w) => write!(f, "{w}"),
            WeightExpr::FieldConst(k) => write!(f, "{k}"),
            WeightExpr::Var(v) => write!(f, "{v}"),
            WeightExpr::Complement(e) => write!(f, "(1 - {e})"),
            WeightExpr::DualProduct(a, b) => write!(f, "dual({a}, {b})"),
            WeightExpr::Quotient(a, b) => write!(f, "({a} / {b})"),
            WeightExpr::Mean(r, p, q) => write!(f, "mean[{r}]({p}, {q})"),
        }
    }
}

// ===== Terms =====

/// A term in the binary-mean signature.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(String),
    Op {
        weight: WeightExpr,
        left: Box<Term>,
        right: Box<Term>,
    },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn op(weight: WeightExpr, left: Term, right: Term) -> Term {
        Term::Op {
            weight,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn element_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_element_vars(&mut out);
        out
    }

    fn collect_element_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Op { left, right, .. } => {
                left.collect_element_vars(out);
                right.collect_element_vars(out);
            }
        }
    }

    pub fn weight_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_weight_vars(&mut out);
        out
    }

    fn collect_weight_vars(&self, out: &mut BTreeSet<String>) {
        if let Term::Op {
            weight,
            left,
            right,
        } = self
        {
            weight.collect_vars(out);
            left.collect_weight_vars(out);
            right.collect_weight_vars(out);
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Op {
                weight,
                left,
                right,
            } => write!(f, "{weight}({left}, {right})"),
        }
    }
}

/// Evaluates a term on rational vectors: each node is the weighted mean
/// `(1-w)·left + w·right`.
pub fn eval_term_on_q_vectors(
    t: &Term,
    elems: &BTreeMap<String, Point>,
    weights: &BTreeMap<String, Weight>,
) -> Result<Point> {
    match t {
        Term::Var(v) => elems
            .get(v)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(v.clone())),
        Term::Op {
            weight,
            left,
            right,
        } => {
            let w = weight.eval_q(weights)?;
            let l = eval_term_on_q_vectors(left, elems, weights)?;
            let r = eval_term_on_q_vectors(right, elems, weights)?;
            scalar::weighted_mean(&w, &l, &r)
        }
    }
}

/// Evaluates a term on prime-field vectors.
pub fn eval_term_on_gf_vectors(
    t: &Term,
    field: &PrimeField,
    elems: &BTreeMap<String, Vec<u64>>,
    weights: &BTreeMap<String, u64>,
) -> Result<Vec<u64>> {
    match t {
        Term::Var(v) => elems
            .get(v)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(v.clone())),
        Term::Op {
            weight,
            left,
            right,
        } => {
            let w = weight.eval_gf(field, weights)?;
            let l = eval_term_on_gf_vectors(left, field, elems, weights)?;
            let r = eval_term_on_gf_vectors(right, field, elems, weights)?;
            if l.len() != r.len() {
                return Err(Error::DimensionMismatch {
                    expected: l.len(),
                    got: r.len(),
                });
            }
            Ok(mean_vec(field, &w, &l, &r))
        }
    }
}

// ===== Identities and quasi-identities =====

/// Which scalar domains a law makes sense over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Applicability {
    /// Evaluable over both rational and prime-field scalars.
    All,
    /// Needs weights confined to (0,1): rational models only.
    RationalOnly,
    /// Uses residues outside (0,1) (such as 0 and 1): field models only.
    FiniteFieldOnly,
}

impl Applicability {
    pub fn admits_rational(self) -> bool {
        matches!(self, Applicability::All | Applicability::RationalOnly)
    }

    pub fn admits_finite_field(self) -> bool {
        matches!(self, Applicability::All | Applicability::FiniteFieldOnly)
    }
}

/// A named identity `lhs = rhs` with declared variables.
#[derive(Debug, Clone)]
pub struct Identity {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
    pub element_vars: Vec<String>,
    pub weight_vars: Vec<String>,
    pub applicability: Applicability,
}

impl Identity {
    pub fn new(
        name: &str,
        lhs: Term,
        rhs: Term,
        element_vars: &[&str],
        weight_vars: &[&str],
        applicability: Applicability,
    ) -> Result<Self> {
        let id = Identity {
            name: name.to_string(),
            lhs,
            rhs,
            element_vars: element_vars.iter().map(|s| s.to_string()).collect(),
            weight_vars: weight_vars.iter().map(|s| s.to_string()).collect(),
            applicability,
        };
        check_declared(
            &id.element_vars,
            &id.weight_vars,
            [&id.lhs, &id.rhs].into_iter(),
        )?;
        Ok(id)
    }
}

/// A named quasi-identity: premises jointly imply the conclusion.
#[derive(Debug, Clone)]
pub struct QuasiIdentity {
    pub name: String,
    pub premises: Vec<(Term, Term)>,
    pub conclusion: (Term, Term),
    pub element_vars: Vec<String>,
    pub weight_vars: Vec<String>,
    pub applicability: Applicability,
}

impl QuasiIdentity {
    pub fn new(
        name: &str,
        premises: Vec<(Term, Term)>,
        conclusion: (Term, Term),
        element_vars: &[&str],
        weight_vars: &[&str],
        applicability: Applicability,
    ) -> Result<Self> {
        let q = QuasiIdentity {
            name: name.to_string(),
            premises,
            conclusion,
            element_vars: element_vars.iter().map(|s| s.to_string()).collect(),
            weight_vars: weight_vars.iter().map(|s| s.to_string()).collect(),
            applicability,
        };
        let terms = q
            .premises
            .iter()
            .flat_map(|(a, b)| [a, b])
            .chain([&q.conclusion.0, &q.conclusion.1]);
        check_declared(&q.element_vars, &q.weight_vars, terms)?;
        Ok(q)
    }
}

fn check_declared<'a>(
    element_vars: &[String],
    weight_vars: &[String],
    terms: impl Iterator<Item = &'a Term>,
) -> Result<()> {
    let declared_e: BTreeSet<&str> = element_vars.iter().map(|s| s.as_str()).collect();
    let declared_w: BTreeSet<&str> = weight_vars.iter().map(|s| s.as_str()).collect();
    for t in terms {
        for v in t.element_vars() {
            if !declared_e.contains(v.as_str()) {
                return Err(Error::UnboundVariable(v));
            }
        }
        for v in t.weight_vars() {
            if !declared_w.contains(v.as_str()) {
                return Err(Error::UnboundVariable(v));
            }
        }
    }
    Ok(())
}

/// An identity is regular when both sides use exactly the same set of
/// element variables. (Purely syntactic; weight variables do not matter.)
pub fn is_regular(id: &Identity) -> bool {
    id.lhs.element_vars() == id.rhs.element_vars()
}

/// Either kind of law, under one name.
#[derive(Debug, Clone)]
pub enum Law {
    Identity(Identity),
    Quasi(QuasiIdentity),
}

impl Law {
    pub fn name(&self) -> &str {
        match self {
            Law::Identity(i) => &i.name,
            Law::Quasi(q) => &q.name,
        }
    }

    pub fn applicability(&self) -> Applicability {
        match self {
            Law::Identity(i) => i.applicability,
            Law::Quasi(q) => q.applicability,
        }
    }
}

// ===== The built-in catalogue =====

fn x() -> Term {
    Term::var("x")
}
fn y() -> Term {
    Term::var("y")
}
fn z() -> Term {
    Term::var("z")
}
fn t_() -> Term {
    Term::var("t")
}
fn wp() -> WeightExpr {
    WeightExpr::var("p")
}
fn wq() -> WeightExpr {
    WeightExpr::var("q")
}
fn wr() -> WeightExpr {
    WeightExpr::var("r")
}

/// `p(x, x) = x`
pub fn idempotence() -> Identity {
    Identity::new(
        "idempotence",
        Term::op(wp(), x(), x()),
        x(),
        &["x"],
        &["p"],
        Applicability::All,
    )
    .expect("well-formed")
}

/// `p(x, y) = (1-p)(y, x)`
pub fn skew_commutativity() -> Identity {
    Identity::new(
        "skew-commutativity",
        Term::op(wp(), x(), y()),
        Term::op(WeightExpr::complement(wp()), y(), x()),
        &["x", "y"],
        &["p"],
        Applicability::All,
    )
    .expect("well-formed")
}

/// `p(r(x, y), z) = dual(r,p)(x, (p/dual(r,p))(y, z))`
pub fn skew_associativity() -> Identity {
    let outer = WeightExpr::dual(wr(), wp());
    let inner = WeightExpr::quotient(wp(), outer.clone());
    Identity::new(
        "skew-associativity",
        Term::op(wp(), Term::op(wr(), x(), y()), z()),
        Term::op(outer, x(), Term::op(inner, y(), z())),
        &["x", "y", "z"],
        &["p", "r"],
        Applicability::RationalOnly,
    )
    .expect("well-formed")
}

/// `p(r(x, y), r(z, t)) = r(p(x, z), p(y, t))`
pub fn entropicity() -> Identity {
    Identity::new(
        "entropicity",
        Term::op(wp(), Term::op(wr(), x(), y()), Term::op(wr(), z(), t_())),
        Term::op(wr(), Term::op(wp(), x(), z()), Term::op(wp(), y(), t_())),
        &["x", "y", "z", "t"],
        &["p", "r"],
        Applicability::All,
    )
    .expect("well-formed")
}

/// `0(x, y) = x` — only meaningful where 0 is an admissible weight.
pub fn projection_left() -> Identity {
    Identity::new(
        "projection-left",
        Term::op(WeightExpr::FieldConst(0), x(), y()),
        x(),
        &["x", "y"],
        &[],
        Applicability::FiniteFieldOnly,
    )
    .expect("well-formed")
}

/// `1(x, y) = y` — only meaningful where 1 is an admissible weight.
pub fn projection_right() -> Identity {
    Identity::new(
        "projection-right",
        Term::op(WeightExpr::FieldConst(1), x(), y()),
        y(),
        &["x", "y"],
        &[],
        Applicability::FiniteFieldOnly,
    )
    .expect("well-formed")
}

/// `r(p(x, y), q(x, y)) = mean[r](p, q)(x, y)`
pub fn weight_combination() -> Identity {
    Identity::new(
        "weight-combination",
        Term::op(wr(), Term::op(wp(), x(), y()), Term::op(wq(), x(), y())),
        Term::op(WeightExpr::mean(wr(), wp(), wq()), x(), y()),
        &["x", "y"],
        &["p", "q", "r"],
        Applicability::All,
    )
    .expect("well-formed")
}

/// `p(x, y) = r(x, y)` — all operations coincide; holds exactly on
/// semilattice-like models.
pub fn iterated_semilattice() -> Identity {
    Identity::new(
        "iterated-semilattice",
        Term::op(wp(), x(), y()),
        Term::op(wr(), x(), y()),
        &["x", "y"],
        &["p", "r"],
        Applicability::All,
    )
    .expect("well-formed")
}

/// `p(x, y) = p(x, z)  =>  y = z`
pub fn cancellativity() -> QuasiIdentity {
    QuasiIdentity::new(
        "cancellativity",
        vec![(Term::op(wp(), x(), y()), Term::op(wp(), x(), z()))],
        (y(), z()),
        &["x", "y", "z"],
        &["p"],
        Applicability::All,
    )
    .expect("well-formed")
}

/// The full catalogue: eight identities and the one quasi-identity.
pub fn builtin_laws() -> Vec<Law> {
    vec![
        Law::Identity(idempotence()),
        Law::Identity(skew_commutativity()),
        Law::Identity(skew_associativity()),
        Law::Identity(entropicity()),
        Law::Identity(projection_left()),
        Law::Identity(projection_right()),
        Law::Identity(weight_combination()),
        Law::Identity(iterated_semilattice()),
        Law::Quasi(cancellativity()),
    ]
}

pub fn find_law(name: &str) -> Result<Law> {
    builtin_laws()
        .into_iter()
        .find(|l| l.name() == name)
        .ok_or_else(|| Error::UnknownLaw(name.to_string()))
}

/// Named law suites used by the checker and the CLI.
///
/// * `barycentric` — the defining identities of barycentric algebras plus
///   entropicity; holds on every model in this crate.
/// * `affine` — the identities of affine spaces over a field, including the
///   projections; finite-field models.
/// * `cancellativity` — just the quasi-identity.
pub fn law_suite(name: &str) -> Result<Vec<Law>> {
    match name {
        "barycentric" => Ok(vec![
            Law::Identity(idempotence()),
            Law::Identity(skew_commutativity()),
            Law::Identity(skew_associativity()),
            Law::Identity(entropicity()),
        ]),
        "affine" => Ok(vec![
            Law::Identity(idempotence()),
            Law::Identity(entropicity()),
            Law::Identity(projection_left()),
            Law::Identity(projection_right()),
            Law::Identity(weight_combination()),
        ]),
        "cancellativity" => Ok(vec![Law::Quasi(cancellativity())]),
        other => Err(Error::UnknownLaw(format!("suite `{other}`"))),
    }
}

/// The deterministic weight sample every sampled check starts from.
pub fn default_weights() -> Vec<Weight> {
    [(1u64, 2u64), (1, 3), (2, 3), (1, 5), (4, 5)]
        .iter()
        .map(|&(n, d)| Weight::new(scalar::rat(n as i64, d as i64)).expect("in range"))
        .collect()
}

/// A random weight `a/b` with denominator at most 1000.
pub fn sample_weight(rng: &mut impl Rng) -> Weight {
    let b = rng.gen_range(2u64..=1000);
    let a = rng.gen_range(1..b);
    Weight::new(scalar::rat(a as i64, b as i64)).expect("0 < a/b < 1")
}

/// The default weights padded with seeded random weights up to length `n`.
pub fn weight_sample(n: usize, seed: u64) -> Vec<Weight> {
    let mut out = default_weights();
    out.truncate(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n {
        out.push(sample_weight(&mut rng));
    }
    out
}

// ===== Law checking =====

/// How a check quantifies over the carrier and the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy {
    /// Every element assignment and every admissible weight; needs a finite
    /// carrier.
    Exhaustive,
    /// Deterministic probes over canonical elements first, then `samples`
    /// seeded random draws of elements and weights.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckResult {
    Pass,
    Fail,
}

/// A falsifying assignment with both evaluated sides. For the
/// quasi-identity the sides are the conclusion's: the premises hold while
/// `lhs != rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub elements: BTreeMap<String, String>,
    pub weights: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub law: String,
    pub model: String,
    pub strategy: Strategy,
    pub result: CheckResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.result == CheckResult::Pass
    }
}

/// Counts through every tuple in `0..radices[0] x 0..radices[1] x ...`,
/// most significant digit first. Zero positions yield the single empty
/// tuple.
struct MixedRadix {
    radices: Vec<usize>,
    state: Vec<usize>,
    done: bool,
}

impl MixedRadix {
    fn new(radices: Vec<usize>) -> Self {
        let done = radices.iter().any(|&r| r == 0);
        MixedRadix {
            state: vec![0; radices.len()],
            radices,
            done,
        }
    }

    fn total(&self) -> Option<usize> {
        self.radices.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r))
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.state.clone();
        let mut i = self.state.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.state[i] += 1;
            if self.state[i] < self.radices[i] {
                break;
            }
            self.state[i] = 0;
        }
        Some(out)
    }
}

/// The scalar domain an exhaustive (or probe-phase) check ranges weights
/// over: all residues for a field model, the default sample for a rational
/// one.
fn weight_domain(model: &Model) -> Vec<ScalarValue> {
    match model {
        Model::AffineGf(v) => (0..v.modulus()).map(ScalarValue::Gf).collect(),
        _ => default_weights().into_iter().map(ScalarValue::Q).collect(),
    }
}

fn sample_scalar(model: &Model, rng: &mut impl Rng) -> ScalarValue {
    match model {
        Model::AffineGf(v) => ScalarValue::Gf(rng.gen_range(0..v.modulus())),
        _ => ScalarValue::Q(sample_weight(rng)),
    }
}

fn ensure_applicable(model: &Model, name: &str, a: Applicability) -> Result<()> {
    if model.admits(&a) {
        Ok(())
    } else {
        Err(Error::InapplicableLaw {
            law: name.to_string(),
            model: model.kind_name().to_string(),
            reason: model.applicability_mismatch(&a),
        })
    }
}

/// One identity evaluation; returns the failing assignment if the sides
/// differ.
fn try_assignment(
    model: &Model,
    id: &Identity,
    elems: &BTreeMap<String, ModelElement>,
    weights: &BTreeMap<String, ScalarValue>,
) -> Result<Option<Counterexample>> {
    let lhs = model.eval_term(&id.lhs, elems, weights)?;
    let rhs = model.eval_term(&id.rhs, elems, weights)?;
    if lhs == rhs {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        elements: elems
            .iter()
            .map(|(k, v)| (k.clone(), model.format_element(v)))
            .collect(),
        weights: weights
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        lhs: model.format_element(&lhs),
        rhs: model.format_element(&rhs),
    }))
}

/// Runs every combination of `element_pool^element_vars x
/// weight_pool^free_weight_vars` (with `pinned` weights held fixed) through
/// `try_assignment`; `budget` caps the combination count, returning `None`
/// without work when exceeded.
#[allow(clippy::too_many_arguments)]
fn sweep_assignments(
    model: &Model,
    id: &Identity,
    element_pool: &[ModelElement],
    weight_pool: &[ScalarValue],
    free_wvars: &[String],
    pinned: &BTreeMap<String, ScalarValue>,
    budget: Option<usize>,
) -> Result<Option<Option<Counterexample>>> {
    let mut radices = vec![element_pool.len(); id.element_vars.len()];
    radices.extend(vec![weight_pool.len(); free_wvars.len()]);
    let odo = MixedRadix::new(radices);
    if let Some(budget) = budget {
        match odo.total() {
            Some(total) if total <= budget => {}
            _ => return Ok(None),
        }
    }
    let mut elems: BTreeMap<String, ModelElement> = BTreeMap::new();
    let mut weights: BTreeMap<String, ScalarValue> = pinned.clone();
    for digits in odo {
        for (i, var) in id.element_vars.iter().enumerate() {
            elems.insert(var.clone(), element_pool[digits[i]].clone());
        }
        for (j, var) in free_wvars.iter().enumerate() {
            weights.insert(
                var.clone(),
                weight_pool[digits[id.element_vars.len() + j]].clone(),
            );
        }
        if let Some(cx) = try_assignment(model, id, &elems, &weights)? {
            return Ok(Some(Some(cx)));
        }
    }
    Ok(Some(None))
}

/// Checks an identity with some weight variables pinned to fixed values;
/// the remaining weight variables range per the strategy.
pub fn check_identity_pinned(
    model: &Model,
    id: &Identity,
    strategy: Strategy,
    pinned: &BTreeMap<String, ScalarValue>,
) -> Result<CheckReport> {
    ensure_applicable(model, &id.name, id.applicability)?;
    for var in pinned.keys() {
        if !id.weight_vars.contains(var) {
            return Err(Error::UnknownPin {
                law: id.name.clone(),
                var: var.clone(),
                vars: id.weight_vars.join(", "),
            });
        }
    }
    let free_wvars: Vec<String> = id
        .weight_vars
        .iter()
        .filter(|v| !pinned.contains_key(*v))
        .cloned()
        .collect();
    let report = |result: CheckResult, cx: Option<Counterexample>| CheckReport {
        law: id.name.clone(),
        model: model.describe(),
        strategy,
        result,
        counterexample: cx,
    };
    match strategy {
        Strategy::Exhaustive => {
            let pool = model.enumerate_elements()?;
            let wpool = weight_domain(model);
            let outcome =
                sweep_assignments(model, id, &pool, &wpool, &free_wvars, pinned, None)?
                    .expect("no budget given");
            match outcome {
                Some(cx) => Ok(report(CheckResult::Fail, Some(cx))),
                None => Ok(report(CheckResult::Pass, None)),
            }
        }
        Strategy::Sampled { samples, seed } => {
            let probes = model.probe_elements()?;
            let wpool = weight_domain(model);
            if let Some(Some(cx)) = sweep_assignments(
                model,
                id,
                &probes,
                &wpool,
                &free_wvars,
                pinned,
                Some(200_000),
            )? {
                return Ok(report(CheckResult::Fail, Some(cx)));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut elems: BTreeMap<String, ModelElement> = BTreeMap::new();
            let mut weights: BTreeMap<String, ScalarValue> = pinned.clone();
            for _ in 0..samples {
                for var in &id.element_vars {
                    elems.insert(var.clone(), model.sample_element(&mut rng)?);
                }
                for var in &free_wvars {
                    weights.insert(var.clone(), sample_scalar(model, &mut rng));
                }
                if let Some(cx) = try_assignment(model, id, &elems, &weights)? {
                    return Ok(report(CheckResult::Fail, Some(cx)));
                }
            }
            Ok(report(CheckResult::Pass, None))
        }
    }
}

pub fn check_identity(model: &Model, id: &Identity, strategy: Strategy) -> Result<CheckReport> {
    check_identity_pinned(model, id, strategy, &BTreeMap::new())
}

/// A triple witnessing failure of cancellation: `y != z` yet both mix with
/// `x` to the same image under the weight `p`.
#[derive(Debug, Clone)]
pub struct CancellationWitness {
    pub p: ScalarValue,
    pub x: ModelElement,
    pub y: ModelElement,
    pub z: ModelElement,
    pub image: ModelElement,
}

impl CancellationWitness {
    pub fn describe(&self, model: &Model) -> Counterexample {
        let mut elements = BTreeMap::new();
        elements.insert("x".to_string(), model.format_element(&self.x));
        elements.insert("y".to_string(), model.format_element(&self.y));
        elements.insert("z".to_string(), model.format_element(&self.z));
        let mut weights = BTreeMap::new();
        weights.insert("p".to_string(), self.p.to_string());
        Counterexample {
            elements,
            weights,
            lhs: model.format_element(&self.y),
            rhs: model.format_element(&self.z),
        }
    }
}

fn witness_in_pool(
    model: &Model,
    p: &ScalarValue,
    pool: &[ModelElement],
) -> Result<Option<CancellationWitness>> {
    for x in pool {
        for (i, y) in pool.iter().enumerate() {
            for z in &pool[i + 1..] {
                if y == z {
                    continue;
                }
                let a = model.eval(p, x, y)?;
                let b = model.eval(p, x, z)?;
                if a == b {
                    return Ok(Some(CancellationWitness {
                        p: p.clone(),
                        x: x.clone(),
                        y: y.clone(),
                        z: z.clone(),
                        image: a,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Searches for `(x, y, z)` with `y != z` and `p(x,y) = p(x,z)`. Exhaustive
/// strategy sweeps all triples of a finite carrier; sampled strategy sweeps
/// canonical probe triples first and then draws random triples.
pub fn find_cancellation_witness(
    model: &Model,
    p: &ScalarValue,
    strategy: Strategy,
) -> Result<Option<CancellationWitness>> {
    match strategy {
        Strategy::Exhaustive => witness_in_pool(model, p, &model.enumerate_elements()?),
        Strategy::Sampled { samples, seed } => {
            let probes = model.probe_elements()?;
            if probes.len().pow(3) <= 50_000 {
                if let Some(w) = witness_in_pool(model, p, &probes)? {
                    return Ok(Some(w));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let x = model.sample_element(&mut rng)?;
                let y = model.sample_element(&mut rng)?;
                let z = model.sample_element(&mut rng)?;
                if y == z {
                    continue;
                }
                let a = model.eval(p, &x, &y)?;
                let b = model.eval(p, &x, &z)?;
                if a == b {
                    return Ok(Some(CancellationWitness {
                        p: p.clone(),
                        x,
                        y,
                        z,
                        image: a,
                    }));
                }
            }
            Ok(None)
        }
    }
}

/// Default weights for the cancellation quasi-identity: the rational
/// sample, or the non-degenerate residues of the field (0 and 1 are
/// projections and never cancellative).
pub fn cancellation_weights(model: &Model) -> Vec<ScalarValue> {
    match model {
        Model::AffineGf(v) => (2..v.modulus()).map(ScalarValue::Gf).collect(),
        _ => default_weights().into_iter().map(ScalarValue::Q).collect(),
    }
}

/// Checks the cancellation quasi-identity over the given weights (or the
/// model's defaults when empty): pass means no witness exists for any of
/// them.
pub fn check_cancellativity(
    model: &Model,
    ps: &[ScalarValue],
    strategy: Strategy,
) -> Result<CheckReport> {
    let q = cancellativity();
    ensure_applicable(model, &q.name, q.applicability)?;
    let defaults;
    let ps = if ps.is_empty() {
        defaults = cancellation_weights(model);
        &defaults
    } else {
        ps
    };
    let mut report = CheckReport {
        law: q.name.clone(),
        model: model.describe(),
        strategy,
        result: CheckResult::Pass,
        counterexample: None,
    };
    for p in ps {
        if let Some(w) = find_cancellation_witness(model, p, strategy)? {
            report.result = CheckResult::Fail;
            report.counterexample = Some(w.describe(model));
            return Ok(report);
        }
    }
    Ok(report)
}

/// Dispatches either kind of law to its checker.
pub fn check_law(model: &Model, law: &Law, strategy: Strategy) -> Result<CheckReport> {
    match law {
        Law::Identity(id) => check_identity(model, id, strategy),
        Law::Quasi(_) => check_cancellativity(model, &[], strategy),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qbind(pairs: &[(&str, (i64, i64))]) -> BTreeMap<String, Weight> {
        pairs
            .iter()
            .map(|&(n, (a, b))| (n.to_string(), Weight::new(scalar::rat(a, b)).unwrap()))
            .collect()
    }

    #[test]
    fn regularity_of_builtins() {
        assert!(is_regular(&idempotence()));
        assert!(is_regular(&skew_commutativity()));
        assert!(is_regular(&skew_associativity()));
        assert!(is_regular(&entropicity()));
        assert!(is_regular(&weight_combination()));
        assert!(is_regular(&iterated_semilattice()));
        assert!(!is_regular(&projection_left()));
        assert!(!is_regular(&projection_right()));
    }

    #[test]
    fn catalogue_shape() {
        let laws = builtin_laws();
        assert_eq!(laws.len(), 9);
        let quasis: Vec<&Law> = laws.iter().filter(|l| matches!(l, Law::Quasi(_))).collect();
        assert_eq!(quasis.len(), 1);
        assert_eq!(quasis[0].name(), "cancellativity");
        for l in &laws {
            match l.name() {
                "projection-left" | "projection-right" => {
                    assert_eq!(l.applicability(), Applicability::FiniteFieldOnly);
                    assert!(!l.applicability().admits_rational());
                }
                "skew-associativity" => {
                    assert_eq!(l.applicability(), Applicability::RationalOnly)
                }
                _ => assert!(l.applicability().admits_rational()),
            }
        }
        assert!(find_law("idempotence").is_ok());
        assert!(matches!(find_law("no-such-law"), Err(Error::UnknownLaw(_))));
    }

    #[test]
    fn suites() {
        let names = |s: &str| -> Vec<String> {
            law_suite(s)
                .unwrap()
                .iter()
                .map(|l| l.name().to_string())
                .collect()
        };
        assert_eq!(
            names("barycentric"),
            vec![
                "idempotence",
                "skew-commutativity",
                "skew-associativity",
                "entropicity"
            ]
        );
        assert_eq!(
            names("affine"),
            vec![
                "idempotence",
                "entropicity",
                "projection-left",
                "projection-right",
                "weight-combination"
            ]
        );
        assert_eq!(names("cancellativity"), vec!["cancellativity"]);
        assert!(law_suite("everything").is_err());
    }

    #[test]
    fn weight_expr_rational_evaluation() {
        // Skew-associativity's derived weights at p=1/3, r=1/2: the outer
        // weight is 1/2 + 1/3 - 1/6 = 2/3 and the inner is (1/3)/(2/3) = 1/2.
        let bind = qbind(&[("p", (1, 3)), ("r", (1, 2))]);
        let outer = WeightExpr::dual(WeightExpr::var("r"), WeightExpr::var("p"));
        let inner = WeightExpr::quotient(WeightExpr::var("p"), outer.clone());
        assert_eq!(outer.eval_q(&bind).unwrap().value(), &scalar::rat(2, 3));
        assert_eq!(inner.eval_q(&bind).unwrap().value(), &scalar::rat(1, 2));

        // A quotient that escapes (0,1) is rejected.
        let bad = WeightExpr::quotient(WeightExpr::var("r"), WeightExpr::var("p"));
        assert!(matches!(bad.eval_q(&bind), Err(Error::WeightOutOfRange(_))));

        // Field constants have no rational reading.
        let field_const = WeightExpr::FieldConst(0);
        assert!(matches!(field_const.eval_q(&bind), Err(Error::ScalarKind(_))));

        let free = WeightExpr::var("s");
        assert!(matches!(free.eval_q(&bind), Err(Error::UnboundVariable(_))));
    }

    #[test]
    fn weight_expr_field_evaluation() {
        let f5 = PrimeField::new(5).unwrap();
        let bind: BTreeMap<String, u64> =
            [("p".to_string(), 3u64), ("r".to_string(), 2u64)].into();
        // mean[2](3, 4) = (1-2)*3 + 2*4 = 5 = 0 over GF(5)
        let m = WeightExpr::mean(
            WeightExpr::var("r"),
            WeightExpr::var("p"),
            WeightExpr::FieldConst(4),
        );
        assert_eq!(m.eval_gf(&f5, &bind).unwrap(), 0);
        // Rational constant 1/2 reads as 2^{-1} = 3 over GF(5).
        let half = WeightExpr::Const(Weight::new(scalar::rat(1, 2)).unwrap());
        assert_eq!(half.eval_gf(&f5, &bind).unwrap(), 3);
        // Division by zero residue is an error.
        let bad = WeightExpr::quotient(WeightExpr::var("p"), WeightExpr::FieldConst(0));
        assert!(matches!(
            bad.eval_gf(&f5, &bind),
            Err(Error::DivisionByZero { .. })
        ));
    }

    #[test]
    fn term_evaluation_on_segment() {
        // p(x, y) at x=0, y=1, p=1/2 gives the midpoint 1/2.
        let t = Term::op(WeightExpr::var("p"), Term::var("x"), Term::var("y"));
        let elems: BTreeMap<String, Point> = [
            ("x".to_string(), vec![scalar::rat_int(0)]),
            ("y".to_string(), vec![scalar::rat_int(1)]),
        ]
        .into();
        let out = eval_term_on_q_vectors(&t, &elems, &qbind(&[("p", (1, 2))])).unwrap();
        assert_eq!(out, vec![scalar::rat(1, 2)]);
    }

    #[test]
    fn weight_combination_agrees_over_gf5() {
        // r(p(x, y), q(x, y)) versus mean[r](p, q)(x, y) at r=2, p=3, q=4,
        // x=(1), y=(0): both sides come out to (1).
        let f5 = PrimeField::new(5).unwrap();
        let id = weight_combination();
        let elems: BTreeMap<String, Vec<u64>> =
            [("x".to_string(), vec![1u64]), ("y".to_string(), vec![0u64])].into();
        let weights: BTreeMap<String, u64> =
            [("r".to_string(), 2u64), ("p".to_string(), 3u64), ("q".to_string(), 4u64)].into();
        let lhs = eval_term_on_gf_vectors(&id.lhs, &f5, &elems, &weights).unwrap();
        let rhs = eval_term_on_gf_vectors(&id.rhs, &f5, &elems, &weights).unwrap();
        assert_eq!(lhs, vec![1]);
        assert_eq!(lhs, rhs);

        // And exhaustively over all residues and all pairs in GF(5)^1.
        for r in 0..5u64 {
            for p in 0..5u64 {
                for q in 0..5u64 {
                    for a in 0..5u64 {
                        for b in 0..5u64 {
                            let elems: BTreeMap<String, Vec<u64>> =
                                [("x".to_string(), vec![a]), ("y".to_string(), vec![b])].into();
                            let weights: BTreeMap<String, u64> = [
                                ("r".to_string(), r),
                                ("p".to_string(), p),
                                ("q".to_string(), q),
                            ]
                            .into();
                            let lhs =
                                eval_term_on_gf_vectors(&id.lhs, &f5, &elems, &weights).unwrap();
                            let rhs =
                                eval_term_on_gf_vectors(&id.rhs, &f5, &elems, &weights).unwrap();
                            assert_eq!(lhs, rhs, "r={r} p={p} q={q} x={a} y={b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn undeclared_variables_are_rejected() {
        let err = Identity::new(
            "broken",
            Term::op(WeightExpr::var("p"), Term::var("x"), Term::var("w")),
            Term::var("x"),
            &["x"],
            &["p"],
            Applicability::All,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnboundVariable(v) if v == "w"));
    }

    #[test]
    fn display_forms() {
        assert_eq!(
            skew_commutativity().rhs.to_string(),
            "(1 - p)(y, x)"
        );
        assert_eq!(
            skew_associativity().rhs.to_string(),
            "dual(r, p)(x, (p / dual(r, p))(y, z))"
        );
        assert_eq!(
            weight_combination().rhs.to_string(),
            "mean[r](p, q)(x, y)"
        );
    }

    #[test]
    fn weight_sampler_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let w = sample_weight(&mut rng);
            assert!(w.value().numer() > &num_bigint::BigInt::from(0));
            assert!(w.value() < &scalar::rat_int(1));
            assert!(w.value().denom() <= &num_bigint::BigInt::from(1000));
        }
        // Determinism for a fixed seed.
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(sample_weight(&mut a), sample_weight(&mut b));
    }

    #[test]
    fn default_weight_sample() {
        let w = default_weights();
        let shown: Vec<String> = w.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, vec!["1/2", "1/3", "2/3", "1/5", "4/5"]);
    }

    // ===== Checking =====

    use crate::affine::FiniteVectorSpace;
    use crate::convex::Polytope;
    use crate::model::{Model, ModelElement, PlonkaModel, ScalarValue};
    use crate::plonka::builtin;
    use crate::semilattice::vee3;

    fn segment_model() -> Model {
        Model::Polytope(
            Polytope::segment(scalar::rat_int(0), scalar::rat_int(1)).unwrap(),
        )
    }

    fn gf(p: u64, n: usize) -> Model {
        Model::AffineGf(FiniteVectorSpace::new(p, n).unwrap())
    }

    fn builtin_model(name: &str) -> Model {
        Model::Plonka(PlonkaModel::from_bundle(builtin(name).unwrap()))
    }

    fn half() -> ScalarValue {
        ScalarValue::Q(Weight::new(scalar::rat(1, 2)).unwrap())
    }

    #[test]
    fn mixed_radix_counts() {
        let all: Vec<Vec<usize>> = MixedRadix::new(vec![2, 3]).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );
        // No positions: exactly one empty assignment.
        let empty: Vec<Vec<usize>> = MixedRadix::new(vec![]).collect();
        assert_eq!(empty, vec![Vec::<usize>::new()]);
        // A zero radix: nothing at all.
        assert_eq!(MixedRadix::new(vec![3, 0]).count(), 0);
    }

    #[test]
    fn skew_associativity_sampled_on_segment_passes() {
        let report = check_identity(
            &segment_model(),
            &skew_associativity(),
            Strategy::Sampled {
                samples: 1000,
                seed: 7,
            },
        )
        .unwrap();
        assert!(report.passed());
    }

    #[test]
    fn entropicity_exhaustive_on_gf3_squared_passes() {
        let report =
            check_identity(&gf(3, 2), &entropicity(), Strategy::Exhaustive).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn iterated_semilattice_fails_on_segment_at_pinned_weights() {
        let mut pinned = BTreeMap::new();
        pinned.insert(
            "p".to_string(),
            ScalarValue::Q(Weight::new(scalar::rat(1, 2)).unwrap()),
        );
        pinned.insert(
            "r".to_string(),
            ScalarValue::Q(Weight::new(scalar::rat(1, 3)).unwrap()),
        );
        let report = check_identity_pinned(
            &segment_model(),
            &iterated_semilattice(),
            Strategy::Sampled {
                samples: 100,
                seed: 7,
            },
            &pinned,
        )
        .unwrap();
        assert!(!report.passed());
        let cx = report.counterexample.unwrap();
        assert_eq!(cx.elements["x"], "(0)");
        assert_eq!(cx.elements["y"], "(1)");
        assert_eq!(cx.lhs, "(1/2)");
        assert_eq!(cx.rhs, "(1/3)");
    }

    #[test]
    fn check_report_serialization_is_frozen() {
        let mut pinned = BTreeMap::new();
        pinned.insert(
            "p".to_string(),
            ScalarValue::Q(Weight::new(scalar::rat(1, 2)).unwrap()),
        );
        pinned.insert(
            "r".to_string(),
            ScalarValue::Q(Weight::new(scalar::rat(1, 3)).unwrap()),
        );
        let report = check_identity_pinned(
            &segment_model(),
            &iterated_semilattice(),
            Strategy::Sampled {
                samples: 100,
                seed: 7,
            },
            &pinned,
        )
        .unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert_eq!(
            json,
            "{\"law\":\"iterated-semilattice\",\
             \"model\":\"polytope with 2 vertices in dimension 1\",\
             \"strategy\":{\"kind\":\"sampled\",\"samples\":100,\"seed\":7},\
             \"result\":\"fail\",\
             \"counterexample\":{\"elements\":{\"x\":\"(0)\",\"y\":\"(1)\"},\
             \"weights\":{\"p\":\"1/2\",\"r\":\"1/3\"},\
             \"lhs\":\"(1/2)\",\"rhs\":\"(1/3)\"}}"
        );
        let passing = check_identity(
            &segment_model(),
            &idempotence(),
            Strategy::Sampled {
                samples: 10,
                seed: 7,
            },
        )
        .unwrap();
        let json = serde_json::to_string(&passing).unwrap();
        // No counterexample key on a pass.
        assert!(json.ends_with("\"result\":\"pass\"}"));
    }

    #[test]
    fn applicability_gates_are_enforced() {
        assert!(matches!(
            check_identity(
                &segment_model(),
                &projection_left(),
                Strategy::Sampled {
                    samples: 10,
                    seed: 7
                }
            ),
            Err(Error::InapplicableLaw { .. })
        ));
        assert!(matches!(
            check_identity(
                &gf(3, 1),
                &skew_associativity(),
                Strategy::Sampled {
                    samples: 10,
                    seed: 7
                }
            ),
            Err(Error::InapplicableLaw { .. })
        ));
        assert!(matches!(
            check_identity(&segment_model(), &idempotence(), Strategy::Exhaustive),
            Err(Error::ExhaustiveInfinite(_))
        ));
    }

    #[test]
    fn no_cancellation_witness_on_the_segment() {
        let w = find_cancellation_witness(
            &segment_model(),
            &half(),
            Strategy::Sampled {
                samples: 300,
                seed: 7,
            },
        )
        .unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn semilattice_witness_is_a_b_c() {
        let model = Model::Semilattice(vee3());
        let w = find_cancellation_witness(&model, &half(), Strategy::Exhaustive)
            .unwrap()
            .expect("vee join is not cancellative");
        assert_eq!(w.x, ModelElement::Label("a".to_string()));
        assert_eq!(w.y, ModelElement::Label("b".to_string()));
        assert_eq!(w.z, ModelElement::Label("c".to_string()));
        assert_eq!(w.image, ModelElement::Label("c".to_string()));
    }

    #[test]
    fn t_model_witness_straddles_the_branch_point() {
        let model = builtin_model("t-algebra");
        let w = find_cancellation_witness(
            &model,
            &half(),
            Strategy::Sampled {
                samples: 500,
                seed: 7,
            },
        )
        .unwrap()
        .expect("the two-branch model is not cancellative");
        // x sits on the upper branch; y and z are distinct points of the
        // lower branch whose images coincide after the transition collapses
        // them.
        match (&w.x, &w.y, &w.z, &w.image) {
            (
                ModelElement::Sum(x),
                ModelElement::Sum(y),
                ModelElement::Sum(z),
                ModelElement::Sum(image),
            ) => {
                assert_eq!(x.fiber, 1);
                assert_eq!(y.fiber, 0);
                assert_eq!(z.fiber, 0);
                assert_ne!(y.point, z.point);
                assert_eq!(image.fiber, 1);
            }
            other => panic!("unexpected witness shape: {other:?}"),
        }
        assert_eq!(model.format_element(&w.x), "1:(3/2)");
        assert_eq!(model.format_element(&w.y), "0:(0)");
        assert_eq!(model.format_element(&w.z), "0:(1)");
        assert_eq!(model.format_element(&w.image), "1:(1)");
    }

    #[test]
    fn cancellation_transfer_on_mixed_models() {
        // One failing weight means every weight fails: the witness search
        // succeeds for each member of a 20-weight sample.
        for name in ["t-algebra", "extended-line"] {
            let model = builtin_model(name);
            for w in weight_sample(20, 7) {
                let found = find_cancellation_witness(
                    &model,
                    &ScalarValue::Q(w.clone()),
                    Strategy::Sampled {
                        samples: 400,
                        seed: 11,
                    },
                )
                .unwrap();
                assert!(
                    found.is_some(),
                    "no witness for p = {} on {}",
                    w,
                    name
                );
            }
        }
    }

    #[test]
    fn barycentric_suite_passes_on_every_builtin_sampled() {
        for name in crate::plonka::BUILTIN_NAMES {
            let model = builtin_model(name);
            for law in law_suite("barycentric").unwrap() {
                for seed in [7, 42] {
                    let report = check_law(
                        &model,
                        &law,
                        Strategy::Sampled {
                            samples: 40,
                            seed,
                        },
                    )
                    .unwrap();
                    assert!(
                        report.passed(),
                        "{} failed on {}: {:?}",
                        law.name(),
                        name,
                        report.counterexample
                    );
                }
            }
        }
    }

    #[test]
    fn affine_suite_exhaustive_on_small_spaces() {
        for (p, n) in [(3u64, 1usize), (3, 2), (5, 1)] {
            let model = gf(p, n);
            for law in law_suite("affine").unwrap() {
                let report = check_law(&model, &law, Strategy::Exhaustive).unwrap();
                assert!(
                    report.passed(),
                    "{} failed on GF({})^{}",
                    law.name(),
                    p,
                    n
                );
            }
        }
    }

    #[test]
    fn affine_suite_on_gf5_squared() {
        let model = gf(5, 2);
        for law in [idempotence(), projection_left(), projection_right()] {
            let report = check_identity(&model, &law, Strategy::Exhaustive).unwrap();
            assert!(report.passed(), "{} failed on GF(5)^2", law.name, );
        }
        // The four-variable laws are too wide to sweep here; the ignored
        // test below closes the gap.
        for law in [entropicity(), weight_combination()] {
            let report = check_identity(
                &model,
                &law,
                Strategy::Sampled {
                    samples: 3000,
                    seed: 7,
                },
            )
            .unwrap();
            assert!(report.passed(), "{} failed on GF(5)^2", law.name);
        }
    }

    #[test]
    #[ignore = "full sweep of the four-variable laws on GF(5)^2; minutes of work"]
    fn affine_suite_exhaustive_on_gf5_squared_full() {
        let model = gf(5, 2);
        for law in [entropicity(), weight_combination()] {
            let report = check_identity(&model, &law, Strategy::Exhaustive).unwrap();
            assert!(report.passed(), "{} failed on GF(5)^2", law.name);
        }
    }

    #[test]
    fn weight_combination_pinpoint_on_gf5() {
        // r(p(x,y), q(x,y)) with r=2, p=3, q=4 on GF(5): the inner means
        // give (3) and (2), the outer one lands on (1); the combined weight
        // mean[r](p,q) is 0, whose operation projects onto x = (1).
        let model = gf(5, 1);
        let id = weight_combination();
        let mut elems = BTreeMap::new();
        elems.insert("x".to_string(), ModelElement::GfVector(vec![1]));
        elems.insert("y".to_string(), ModelElement::GfVector(vec![0]));
        let mut weights = BTreeMap::new();
        weights.insert("r".to_string(), ScalarValue::Gf(2));
        weights.insert("p".to_string(), ScalarValue::Gf(3));
        weights.insert("q".to_string(), ScalarValue::Gf(4));
        let lhs = model.eval_term(&id.lhs, &elems, &weights).unwrap();
        let rhs = model.eval_term(&id.rhs, &elems, &weights).unwrap();
        assert_eq!(lhs, ModelElement::GfVector(vec![1]));
        assert_eq!(rhs, ModelElement::GfVector(vec![1]));
    }

    #[test]
    fn gf_cancellation_defaults_skip_projections() {
        // With non-degenerate weights the affine space cancels...
        let model = gf(3, 1);
        let report = check_cancellativity(&model, &[], Strategy::Exhaustive).unwrap();
        assert!(report.passed());
        // ...but the projection weight 0 never does.
        let w =
            find_cancellation_witness(&model, &ScalarValue::Gf(0), Strategy::Exhaustive)
                .unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn cancellativity_check_reports_the_conclusion_sides() {
        let model = Model::Semilattice(vee3());
        let report = check_cancellativity(
            &model,
            &[],
            Strategy::Exhaustive,
        )
        .unwrap();
        assert!(!report.passed());
        let cx = report.counterexample.unwrap();
        assert_eq!(cx.elements["x"], "a");
        assert_eq!(cx.lhs, "b");
        assert_eq!(cx.rhs, "c");
    }
}

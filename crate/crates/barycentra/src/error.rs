//! Crate-wide error type.
//!
//! Errors cover construction and evaluation problems: malformed input, a
//! datum outside the structure it is used with, or a validation that fails
//! while building a value. Each variant carries enough context to point at
//! the offending vertex, element, transition, or witness.
//!
//! A *check that does not hold* (a law with a counterexample, a missing
//! openness certificate) is not an error; those outcomes live in the report
//! types returned by the checking functions.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // ===== Scalars =====
    #[error("cannot parse rational from `{0}` (expected `a` or `a/b` with nonzero b)")]
    ParseRational(String),
    #[error("weight {0} is outside the open interval (0,1)")]
    WeightOutOfRange(String),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is not allowed here: {1}")]
    InvalidModulus(u64, String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("division by zero in GF({modulus}) while {context}")]
    DivisionByZero { modulus: u64, context: String },

    // ===== Vectors and polytopes =====
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vertex list is empty")]
    EmptyVertexList,
    #[error("vertices {first} and {second} are identical: {vertex}")]
    DuplicateVertex {
        first: usize,
        second: usize,
        vertex: String,
    },
    #[error("vertex {index} = {vertex} is not extreme (it is a convex combination of the others)")]
    NonExtremeVertex { index: usize, vertex: String },
    #[error("point {0} lies outside the polytope")]
    PointOutsidePolytope(String),
    #[error("wall candidate point {0} lies outside the polytope")]
    WallPointOutside(String),
    #[error("invalid convex combination: {0}")]
    InvalidCombination(String),

    // ===== Semilattices =====
    #[error("semilattice carrier is empty")]
    EmptyCarrier,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("join table has no entry for ({0}, {1})")]
    JoinTableIncomplete(String, String),
    #[error("join table lists conflicting values for ({0}, {1}): `{2}` vs `{3}`")]
    JoinTableConflict(String, String, String, String),
    #[error("join table violates {axiom} at {witness}")]
    SemilatticeAxiom { axiom: String, witness: String },
    #[error("map is not a semilattice homomorphism: h({a} v {b}) = {lhs} but h({a}) v h({b}) = {rhs}")]
    NotHomomorphism {
        a: String,
        b: String,
        lhs: String,
        rhs: String,
    },

    // ===== Sums of fibers over a semilattice =====
    #[error("index element `{0}` has no fiber")]
    FiberMissing(String),
    #[error("fiber label `{0}` does not name an index element")]
    FiberNotInIndex(String),
    #[error("no transition map given for the cover {from} -> {to}")]
    TransitionMissing { from: String, to: String },
    #[error("transition {from} -> {to} given, but {from} is not below {to} in the index")]
    TransitionNotComparable { from: String, to: String },
    #[error("transition {from} -> {to} is dimensionally inconsistent: {detail}")]
    TransitionShape {
        from: String,
        to: String,
        detail: String,
    },
    #[error("transition {from} -> {to} maps generator {point} outside the target fiber")]
    TransitionImage {
        from: String,
        to: String,
        point: String,
    },
    #[error("transition {from} -> {from} must be the identity map")]
    TransitionNotIdentity { from: String },
    #[error("transitions are not functorial at {s} <= {t} <= {u}: composite differs from the direct map")]
    Functoriality { s: String, t: String, u: String },
    #[error("class join of {class_a} and {class_b} depends on the representatives: got {first} and {second}")]
    InconsistentClassJoin {
        class_a: String,
        class_b: String,
        first: String,
        second: String,
    },
    #[error("classifier is not a homomorphism: class({p}; {x}, {y}) = {got} but the class join is {expected}")]
    ReplicaHomomorphism {
        p: String,
        x: String,
        y: String,
        got: String,
        expected: String,
    },
    #[error("subset is not closed under the operations: {p}({x}, {y}) = {result} is not accepted")]
    RestrictionClosure {
        p: String,
        x: String,
        y: String,
        result: String,
    },
    #[error("induced join of surviving classes {class_a} and {class_b} is the dropped class {dropped}")]
    RestrictionJoinDropped {
        class_a: String,
        class_b: String,
        dropped: String,
    },
    #[error("could not sample an accepted element of fiber `{0}` (predicate may reject the whole fiber)")]
    PredicateExhausted(String),
    #[error("element {0} is not in the model's carrier")]
    NotInCarrier(String),

    // ===== Finite affine spaces =====
    #[error("space GF({modulus})^{dim} has {size} points, above the supported bound {bound}")]
    SpaceTooLarge {
        modulus: u64,
        dim: usize,
        size: u64,
        bound: u64,
    },
    #[error("field weight k = {k} is degenerate here (k must avoid 0 and 1)")]
    DegenerateFieldWeight { k: u64 },
    #[error("subspace family is not join-closed: join of {a} and {b} is {join}, which is missing")]
    MissingJoinInFamily { a: String, b: String, join: String },

    // ===== Terms and law checking =====
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("variable `{0}` has no assigned value")]
    UnboundVariable(String),
    #[error("law `{law}` has no weight variable `{var}` (it uses {vars})")]
    UnknownPin {
        law: String,
        var: String,
        vars: String,
    },
    #[error("law `{law}` does not apply to {model}: {reason}")]
    InapplicableLaw {
        law: String,
        model: String,
        reason: String,
    },
    #[error("exhaustive checking requested, but {0} has an infinite carrier")]
    ExhaustiveInfinite(String),
    #[error("scalar kind mismatch: {0}")]
    ScalarKind(String),

    // ===== Input / CLI =====
    #[error("unknown builtin model `{0}`")]
    UnknownBuiltin(String),
    #[error("cannot parse model reference `{reference}`: {reason}")]
    ModelReference { reference: String, reason: String },
    #[error("cannot parse element `{element}`: {reason}")]
    ElementSyntax { element: String, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

//! A uniform view of the algebras the law checker can drive: polytopes,
//! finite semilattices, sums of fibers, and affine spaces over GF(p).
//!
//! A model tells the checker what its elements look like, how to sample or
//! enumerate them, which scalar domain its weights come from, and how to
//! evaluate a term. Everything else (law catalogues, check strategies,
//! reports) lives in the laws module.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::affine::{format_gf_point, FiniteVectorSpace};
use crate::convex::Polytope;
use crate::error::{Error, Result};
use crate::laws::{Applicability, Term, WeightExpr};
use crate::plonka::{Fiber, HomExample, ModelBundle, PlonkaSum, SumElement, SumPredicate};
use crate::scalar::{format_point, format_rat, Weight};
use crate::semilattice::FiniteSemilattice;
use crate::Point;

/// A sum-of-fibers model: the sum itself plus the subalgebra predicate and
/// the optional packaged extras (named points, expected replica, quotient).
#[derive(Debug, Clone)]
pub struct PlonkaModel {
    pub name: String,
    pub sum: PlonkaSum,
    pub predicate: SumPredicate,
    pub named_points: BTreeMap<String, SumElement>,
    pub expected_replica: Option<FiniteSemilattice>,
    pub hom: Option<HomExample>,
}

impl PlonkaModel {
    pub fn from_sum(name: String, sum: PlonkaSum) -> Self {
        PlonkaModel {
            name,
            sum,
            predicate: SumPredicate::All,
            named_points: BTreeMap::new(),
            expected_replica: None,
            hom: None,
        }
    }

    pub fn from_bundle(bundle: ModelBundle) -> Self {
        PlonkaModel {
            name: format!("builtin:{}", bundle.name),
            sum: bundle.sum,
            predicate: bundle.predicate,
            named_points: bundle.named_points,
            expected_replica: Some(bundle.expected_replica),
            hom: bundle.hom,
        }
    }

    /// Resolves an element: a named point (Greek aliases included), a
    /// `fiber:name` pair, or `fiber:coordinates`.
    pub fn resolve_element(&self, text: &str) -> Result<SumElement> {
        let canonical = |name: &str| -> String {
            match name {
                "α" => "alpha".to_string(),
                "β" => "beta".to_string(),
                "γ" => "gamma".to_string(),
                other => other.to_string(),
            }
        };
        if let Some(e) = self.named_points.get(&canonical(text.trim())) {
            return Ok(e.clone());
        }
        if let Some((fiber, rest)) = text.split_once(':') {
            if let Some(e) = self.named_points.get(&canonical(rest.trim())) {
                let declared = self.sum.index().index_of(fiber.trim())?;
                if declared != e.fiber {
                    return Err(Error::ElementSyntax {
                        element: text.to_string(),
                        reason: format!(
                            "named point lives in fiber {}, not {}",
                            self.sum.index().label(e.fiber),
                            fiber.trim()
                        ),
                    });
                }
                return Ok(e.clone());
            }
        }
        self.sum.parse_element(text)
    }
}

/// An algebra the law checker can evaluate terms in.
#[derive(Debug, Clone)]
pub enum Model {
    Polytope(Polytope),
    Semilattice(FiniteSemilattice),
    Plonka(PlonkaModel),
    AffineGf(FiniteVectorSpace),
}

/// A semilattice viewed as an algebra in which every weighted operation
/// evaluates to the join.
pub fn as_iterated_barycentric(s: FiniteSemilattice) -> Model {
    Model::Semilattice(s)
}

/// An element of some model's carrier.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelElement {
    Point(Point),
    Label(String),
    Sum(SumElement),
    GfVector(Vec<u64>),
}

/// A weight value in the scalar domain of some model.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Q(Weight),
    Gf(u64),
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Q(w) => write!(f, "{}", format_rat(w.value())),
            ScalarValue::Gf(k) => write!(f, "{k}"),
        }
    }
}

impl Model {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Polytope(_) => "polytope",
            Model::Semilattice(_) => "semilattice",
            Model::Plonka(_) => "plonka",
            Model::AffineGf(_) => "affine-gf",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Model::Polytope(p) => format!(
                "polytope with {} vertices in dimension {}",
                p.vertex_count(),
                p.ambient_dim()
            ),
            Model::Semilattice(s) => s.to_string(),
            Model::Plonka(m) => m.name.clone(),
            Model::AffineGf(v) => format!("GF({})^{}", v.modulus(), v.dimension()),
        }
    }

    /// Does the model's weight domain fit the law's applicability tag?
    pub fn admits(&self, a: &Applicability) -> bool {
        match self {
            Model::AffineGf(_) => a.admits_finite_field(),
            _ => a.admits_rational(),
        }
    }

    /// Reason string for an inapplicable law, for error reporting.
    pub fn applicability_mismatch(&self, a: &Applicability) -> String {
        match (self, a) {
            (Model::AffineGf(_), _) => {
                "the law needs rational weights strictly between 0 and 1".to_string()
            }
            (_, _) => "the law needs finite-field weights such as 0 and 1".to_string(),
        }
    }

    pub fn contains(&self, e: &ModelElement) -> Result<bool> {
        match (self, e) {
            (Model::Polytope(p), ModelElement::Point(x)) => p.contains(x),
            (Model::Semilattice(s), ModelElement::Label(l)) => Ok(s.contains(l)),
            (Model::Plonka(m), ModelElement::Sum(x)) => {
                m.sum.check_element(x)?;
                m.predicate.accepts(&m.sum, x)
            }
            (Model::AffineGf(v), ModelElement::GfVector(x)) => Ok(v.contains(x)),
            _ => Err(Error::InvalidInput(format!(
                "element kind does not match a {} model",
                self.kind_name()
            ))),
        }
    }

    pub fn format_element(&self, e: &ModelElement) -> String {
        match (self, e) {
            (_, ModelElement::Point(x)) => format_point(x),
            (_, ModelElement::Label(l)) => l.clone(),
            (Model::Plonka(m), ModelElement::Sum(x)) => m.sum.format_element(x),
            (_, ModelElement::Sum(x)) => format!("{}:{}", x.fiber, format_point(&x.point)),
            (_, ModelElement::GfVector(x)) => format_gf_point(x),
        }
    }

    /// A deterministic seeded sampler over the carrier.
    pub fn sample_element(&self, rng: &mut impl Rng) -> Result<ModelElement> {
        match self {
            Model::Polytope(p) => Ok(ModelElement::Point(p.sample_point(rng))),
            Model::Semilattice(s) => {
                let i = rng.gen_range(0..s.size());
                Ok(ModelElement::Label(s.label(i).to_string()))
            }
            Model::Plonka(m) => {
                for _ in 0..10_000 {
                    let e = m.sum.sample_element(rng);
                    if m.predicate.accepts(&m.sum, &e)? {
                        return Ok(ModelElement::Sum(e));
                    }
                }
                Err(Error::PredicateExhausted(m.name.clone()))
            }
            Model::AffineGf(v) => Ok(ModelElement::GfVector(
                (0..v.dimension())
                    .map(|_| rng.gen_range(0..v.modulus()))
                    .collect(),
            )),
        }
    }

    /// A small deterministic set of canonical elements: polytope vertices,
    /// all semilattice labels, fiber landmarks of a sum, and the corner
    /// vectors of an affine space. Checks probe these before drawing random
    /// samples so counterexamples land on recognizable points.
    pub fn probe_elements(&self) -> Result<Vec<ModelElement>> {
        match self {
            Model::Polytope(p) => Ok(p
                .vertices()
                .iter()
                .map(|v| ModelElement::Point(v.clone()))
                .collect()),
            Model::Semilattice(s) => Ok(s
                .elements()
                .iter()
                .map(|l| ModelElement::Label(l.clone()))
                .collect()),
            Model::Plonka(m) => {
                let mut out = Vec::new();
                for (i, fiber) in m.sum.fibers().iter().enumerate() {
                    let points: Vec<Point> = match fiber {
                        Fiber::Polytope(p) => p.vertices().to_vec(),
                        Fiber::AffineSubspace(s) => {
                            let mut pts = vec![s.basepoint().clone()];
                            for d in s.directions() {
                                let shifted: Point = s
                                    .basepoint()
                                    .iter()
                                    .zip(d)
                                    .map(|(b, di)| b + di)
                                    .collect();
                                pts.push(shifted);
                            }
                            pts
                        }
                        Fiber::Singleton(p) => vec![p.clone()],
                    };
                    for p in points {
                        let e = SumElement::new(i, p);
                        if m.predicate.accepts(&m.sum, &e)? {
                            out.push(ModelElement::Sum(e));
                        }
                    }
                }
                Ok(out)
            }
            Model::AffineGf(v) => {
                let n = v.dimension();
                let mut out = vec![ModelElement::GfVector(vec![0; n])];
                for i in 0..n {
                    let mut unit = vec![0; n];
                    unit[i] = 1;
                    out.push(ModelElement::GfVector(unit));
                }
                if n > 1 {
                    out.push(ModelElement::GfVector(vec![1; n]));
                }
                Ok(out)
            }
        }
    }

    /// The whole carrier, when it is finite.
    pub fn enumerate_elements(&self) -> Result<Vec<ModelElement>> {
        match self {
            Model::Polytope(p) => {
                if p.vertex_count() == 1 {
                    Ok(vec![ModelElement::Point(p.vertices()[0].clone())])
                } else {
                    Err(Error::ExhaustiveInfinite(
                        "a polytope with more than one vertex".to_string(),
                    ))
                }
            }
            Model::Semilattice(s) => Ok(s
                .elements()
                .iter()
                .map(|l| ModelElement::Label(l.clone()))
                .collect()),
            Model::Plonka(m) => {
                let mut out = Vec::new();
                for (i, fiber) in m.sum.fibers().iter().enumerate() {
                    match fiber {
                        Fiber::Singleton(p) => {
                            let e = SumElement::new(i, p.clone());
                            if m.predicate.accepts(&m.sum, &e)? {
                                out.push(ModelElement::Sum(e));
                            }
                        }
                        _ => {
                            return Err(Error::ExhaustiveInfinite(format!(
                                "fiber {} of {}",
                                m.sum.index().label(i),
                                m.name
                            )))
                        }
                    }
                }
                Ok(out)
            }
            Model::AffineGf(v) => Ok(v
                .vectors()?
                .into_iter()
                .map(ModelElement::GfVector)
                .collect()),
        }
    }

    /// The single binary operation with an explicit weight.
    pub fn eval(&self, p: &ScalarValue, x: &ModelElement, y: &ModelElement) -> Result<ModelElement> {
        let weight_map = |name: &str| -> BTreeMap<String, ScalarValue> {
            let mut m = BTreeMap::new();
            m.insert(name.to_string(), p.clone());
            m
        };
        let mut elems = BTreeMap::new();
        elems.insert("x".to_string(), x.clone());
        elems.insert("y".to_string(), y.clone());
        let t = Term::op(WeightExpr::var("p"), Term::var("x"), Term::var("y"));
        self.eval_term(&t, &elems, &weight_map("p"))
    }

    /// Bottom-up term evaluation in the model.
    pub fn eval_term(
        &self,
        t: &Term,
        elems: &BTreeMap<String, ModelElement>,
        weights: &BTreeMap<String, ScalarValue>,
    ) -> Result<ModelElement> {
        match self {
            Model::Polytope(p) => {
                let xs = unwrap_points(elems)?;
                let ws = unwrap_q_weights(weights)?;
                let value = crate::laws::eval_term_on_q_vectors(t, &xs, &ws)?;
                if !p.contains(&value)? {
                    return Err(Error::PointOutsidePolytope(format_point(&value)));
                }
                Ok(ModelElement::Point(value))
            }
            Model::Semilattice(s) => {
                let ws = unwrap_q_weights(weights)?;
                let idx = eval_term_on_semilattice(s, t, elems, &ws)?;
                Ok(ModelElement::Label(s.label(idx).to_string()))
            }
            Model::Plonka(m) => {
                let ws = unwrap_q_weights(weights)?;
                Ok(ModelElement::Sum(eval_term_on_sum(&m.sum, t, elems, &ws)?))
            }
            Model::AffineGf(v) => {
                let xs = unwrap_gf_vectors(elems)?;
                let ws = unwrap_gf_weights(weights, v.modulus())?;
                let value = crate::laws::eval_term_on_gf_vectors(t, &v.field(), &xs, &ws)?;
                Ok(ModelElement::GfVector(value))
            }
        }
    }
}

fn unwrap_points(elems: &BTreeMap<String, ModelElement>) -> Result<BTreeMap<String, Point>> {
    elems
        .iter()
        .map(|(k, v)| match v {
            ModelElement::Point(p) => Ok((k.clone(), p.clone())),
            _ => Err(Error::InvalidInput(format!(
                "variable {k} is not a rational point"
            ))),
        })
        .collect()
}

fn unwrap_gf_vectors(
    elems: &BTreeMap<String, ModelElement>,
) -> Result<BTreeMap<String, Vec<u64>>> {
    elems
        .iter()
        .map(|(k, v)| match v {
            ModelElement::GfVector(p) => Ok((k.clone(), p.clone())),
            _ => Err(Error::InvalidInput(format!(
                "variable {k} is not a finite-field vector"
            ))),
        })
        .collect()
}

fn unwrap_q_weights(
    weights: &BTreeMap<String, ScalarValue>,
) -> Result<BTreeMap<String, Weight>> {
    weights
        .iter()
        .map(|(k, v)| match v {
            ScalarValue::Q(w) => Ok((k.clone(), w.clone())),
            ScalarValue::Gf(x) => Err(Error::ScalarKind(format!(
                "weight {k} = {x} is a field element, but the model needs a rational in (0, 1)"
            ))),
        })
        .collect()
}

fn unwrap_gf_weights(
    weights: &BTreeMap<String, ScalarValue>,
    modulus: u64,
) -> Result<BTreeMap<String, u64>> {
    weights
        .iter()
        .map(|(k, v)| match v {
            ScalarValue::Gf(x) => Ok((k.clone(), x % modulus)),
            ScalarValue::Q(w) => Err(Error::ScalarKind(format!(
                "weight {k} = {} is rational, but the model needs a GF({modulus}) element",
                format_rat(w.value())
            ))),
        })
        .collect()
}

fn eval_term_on_semilattice(
    s: &FiniteSemilattice,
    t: &Term,
    elems: &BTreeMap<String, ModelElement>,
    weights: &BTreeMap<String, Weight>,
) -> Result<usize> {
    match t {
        Term::Var(v) => match elems.get(v) {
            Some(ModelElement::Label(l)) => s.index_of(l),
            Some(_) => Err(Error::InvalidInput(format!(
                "variable {v} is not a semilattice element"
            ))),
            None => Err(Error::UnboundVariable(v.clone())),
        },
        Term::Op {
            weight,
            left,
            right,
        } => {
            // Every binary operation of a semilattice is the join; the
            // weight is still evaluated so that out-of-range expressions
            // are rejected.
            weight.eval_q(weights)?;
            let l = eval_term_on_semilattice(s, left, elems, weights)?;
            let r = eval_term_on_semilattice(s, right, elems, weights)?;
            Ok(s.join_idx(l, r))
        }
    }
}

fn eval_term_on_sum(
    sum: &PlonkaSum,
    t: &Term,
    elems: &BTreeMap<String, ModelElement>,
    weights: &BTreeMap<String, Weight>,
) -> Result<SumElement> {
    match t {
        Term::Var(v) => match elems.get(v) {
            Some(ModelElement::Sum(e)) => Ok(e.clone()),
            Some(_) => Err(Error::InvalidInput(format!(
                "variable {v} is not a sum element"
            ))),
            None => Err(Error::UnboundVariable(v.clone())),
        },
        Term::Op {
            weight,
            left,
            right,
        } => {
            let w = weight.eval_q(weights)?;
            let l = eval_term_on_sum(sum, left, elems, weights)?;
            let r = eval_term_on_sum(sum, right, elems, weights)?;
            sum.eval(&w, &l, &r)
        }
    }
}

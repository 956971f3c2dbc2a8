//! Sums of convex fibers over a finite join semilattice.
//!
//! A sum assigns one fiber (a polytope, a full affine subspace of ℚⁿ, or a
//! singleton) to each index element and an affine transition map to each
//! comparable pair, functorial along the order. The binary means act by
//! transporting both arguments into the join fiber and averaging there.
//! On top of the evaluator sit the refined replica (one class per relatively
//! open cell of each fiber), subalgebra restriction by a membership
//! predicate, the face-indexed decomposition of a single polytope, and the
//! built-in example models used across the test suite.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::convex::{CellKind, Polytope};
use crate::error::{Error, Result};
use crate::field::Rationals;
use crate::linalg::{in_span, rref, Rref};
use crate::scalar::{self, format_point, format_rat, Weight};
use crate::semilattice::FiniteSemilattice;
use crate::{Point, Rat};

// ===== Affine subspaces of ℚⁿ =====

/// A full affine subspace `basepoint + span(directions)` of ℚⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspaceQ {
    basepoint: Point,
    directions: Vec<Point>,
    span: Rref<Rat>,
}

impl AffineSubspaceQ {
    pub fn new(basepoint: Point, directions: Vec<Point>) -> Result<Self> {
        let dim = basepoint.len();
        for d in &directions {
            if d.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: d.len(),
                });
            }
        }
        let span = rref(&Rationals, directions.clone(), dim);
        if span.rank() != directions.len() {
            return Err(Error::InvalidInput(
                "affine subspace directions are linearly dependent".to_string(),
            ));
        }
        Ok(AffineSubspaceQ {
            basepoint,
            directions,
            span,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basepoint.len()
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    pub fn directions(&self) -> &[Point] {
        &self.directions
    }

    pub fn contains(&self, p: &[Rat]) -> Result<bool> {
        if p.len() != self.basepoint.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basepoint.len(),
                got: p.len(),
            });
        }
        let diff: Point = p
            .iter()
            .zip(&self.basepoint)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(in_span(&Rationals, &self.span, &diff))
    }

    /// Is the vector within the direction span (not the affine carrier)?
    pub fn spans_direction(&self, v: &[Rat]) -> bool {
        in_span(&Rationals, &self.span, v)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        let mut p = self.basepoint.clone();
        for d in &self.directions {
            let c = scalar::rat(rng.gen_range(-12i64..=12), rng.gen_range(1i64..=4));
            for (pc, dc) in p.iter_mut().zip(d) {
                *pc += c.clone() * dc.clone();
            }
        }
        p
    }
}

#[derive(Serialize, Deserialize)]
struct AffineSubspaceJson {
    #[serde(with = "crate::scalar::rat_vec")]
    basepoint: Point,
    #[serde(with = "crate::scalar::rat_mat")]
    directions: Vec<Point>,
}

impl Serialize for AffineSubspaceQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AffineSubspaceJson {
            basepoint: self.basepoint.clone(),
            directions: self.directions.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffineSubspaceQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = AffineSubspaceJson::deserialize(d)?;
        AffineSubspaceQ::new(raw.basepoint, raw.directions).map_err(serde::de::Error::custom)
    }
}

// ===== Fibers =====

/// One summand of a sum.
#[derive(Debug, Clone, PartialEq)]
pub enum Fiber {
    Polytope(Polytope),
    AffineSubspace(AffineSubspaceQ),
    Singleton(Point),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
enum FiberJson {
    Polytope(Polytope),
    AffineSubspace(AffineSubspaceQ),
    Singleton(SingletonJson),
}

#[derive(Serialize, Deserialize)]
struct SingletonJson {
    #[serde(with = "crate::scalar::rat_vec")]
    point: Point,
}

impl Serialize for Fiber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Fiber::Polytope(p) => FiberJson::Polytope(p.clone()),
            Fiber::AffineSubspace(a) => FiberJson::AffineSubspace(a.clone()),
            Fiber::Singleton(p) => FiberJson::Singleton(SingletonJson { point: p.clone() }),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fiber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match FiberJson::deserialize(d)? {
            FiberJson::Polytope(p) => Fiber::Polytope(p),
            FiberJson::AffineSubspace(a) => Fiber::AffineSubspace(a),
            FiberJson::Singleton(s) => Fiber::Singleton(s.point),
        })
    }
}

impl Fiber {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Fiber::Polytope(p) => p.ambient_dim(),
            Fiber::AffineSubspace(a) => a.ambient_dim(),
            Fiber::Singleton(p) => p.len(),
        }
    }

    pub fn contains(&self, x: &[Rat]) -> Result<bool> {
        match self {
            Fiber::Polytope(p) => p.contains(x),
            Fiber::AffineSubspace(a) => a.contains(x),
            Fiber::Singleton(p) => {
                if x.len() != p.len() {
                    return Err(Error::DimensionMismatch {
                        expected: p.len(),
                        got: x.len(),
                    });
                }
                Ok(x == p.as_slice())
            }
        }
    }

    /// The points on which transition maps are validated: polytope vertices,
    /// a basepoint plus one representative per direction, or the singleton.
    pub fn generators(&self) -> Vec<Point> {
        match self {
            Fiber::Polytope(p) => p.vertices().to_vec(),
            Fiber::AffineSubspace(a) => {
                let mut out = vec![a.basepoint().clone()];
                for d in a.directions() {
                    out.push(
                        a.basepoint()
                            .iter()
                            .zip(d)
                            .map(|(b, dc)| b.clone() + dc.clone())
                            .collect(),
                    );
                }
                out
            }
            Fiber::Singleton(p) => vec![p.clone()],
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        match self {
            Fiber::Polytope(p) => p.sample_point(rng),
            Fiber::AffineSubspace(a) => a.sample(rng),
            Fiber::Singleton(p) => p.clone(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Fiber::Polytope(_) => "polytope",
            Fiber::AffineSubspace(_) => "affine-subspace",
            Fiber::Singleton(_) => "singleton",
        }
    }
}

// ===== Affine transition maps =====

/// An affine map `x ↦ M x + b` between fiber ambients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(with = "crate::scalar::rat_mat")]
    pub matrix: Vec<Vec<Rat>>,
    #[serde(with = "crate::scalar::rat_vec")]
    pub offset: Point,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        let matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| scalar::rat_int(i64::from(i == j)))
                    .collect()
            })
            .collect();
        AffineMap {
            matrix,
            offset: vec![scalar::rat_int(0); dim],
        }
    }

    /// The constant map onto `value`, from a `source_dim`-dimensional domain.
    pub fn constant(value: Point, source_dim: usize) -> Self {
        let matrix = (0..value.len())
            .map(|_| vec![scalar::rat_int(0); source_dim])
            .collect();
        AffineMap {
            matrix,
            offset: value,
        }
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.first().map(|r| r.len()).unwrap_or(0)
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, x: &[Rat]) -> Result<Point> {
        if x.len() != self.source_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim(),
                got: x.len(),
            });
        }
        Ok(self
            .matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| {
                row.iter()
                    .zip(x)
                    .map(|(m, c)| m.clone() * c.clone())
                    .fold(b.clone(), |acc, v| acc + v)
            })
            .collect())
    }

    /// Applies the matrix alone (for direction vectors).
    pub fn apply_linear(&self, v: &[Rat]) -> Point {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .map(|(m, c)| m.clone() * c.clone())
                    .fold(scalar::rat_int(0), |acc, x| acc + x)
            })
            .collect()
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        if self.source_dim() != inner.target_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim(),
                got: inner.target_dim(),
            });
        }
        let matrix: Vec<Vec<Rat>> = self
            .matrix
            .iter()
            .map(|row| {
                (0..inner.source_dim())
                    .map(|j| {
                        row.iter()
                            .zip(&inner.matrix)
                            .map(|(a, irow)| a.clone() * irow[j].clone())
                            .fold(scalar::rat_int(0), |acc, v| acc + v)
                    })
                    .collect()
            })
            .collect();
        let offset = self.apply(&inner.offset)?;
        Ok(AffineMap { matrix, offset })
    }

    pub fn is_identity(&self) -> bool {
        let n = self.target_dim();
        self.source_dim() == n
            && self.offset.iter().all(|b| *b == scalar::rat_int(0))
            && self.matrix.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, m)| *m == scalar::rat_int(i64::from(i == j)))
            })
    }
}

// ===== Elements =====

/// An element of a sum: a fiber index and a point of that fiber.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumElement {
    pub fiber: usize,
    #[serde(with = "crate::scalar::rat_vec")]
    pub point: Point,
}

impl SumElement {
    pub fn new(fiber: usize, point: Point) -> Self {
        SumElement { fiber, point }
    }
}

// ===== The sum =====

/// A validated sum of fibers over a finite join semilattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PlonkaSum {
    index: FiniteSemilattice,
    fibers: Vec<Fiber>,
    transitions: BTreeMap<(usize, usize), AffineMap>,
}

impl PlonkaSum {
    /// Builds and validates a sum.
    ///
    /// Transition maps must be supplied at least for every covering pair;
    /// missing composites are filled in by composition along covers, and
    /// then the whole family is checked: identities on the diagonal, shapes,
    /// images inside the target fibers, and exact functoriality on every
    /// chain `s ≤ t ≤ u`.
    pub fn new(
        index: FiniteSemilattice,
        fibers: BTreeMap<String, Fiber>,
        transitions: Vec<(String, String, AffineMap)>,
    ) -> Result<Self> {
        let n = index.size();
        // Fibers: exactly one per index element.
        let mut fiber_vec: Vec<Option<Fiber>> = vec![None; n];
        for (label, fiber) in fibers {
            let i = index
                .index_of(&label)
                .map_err(|_| Error::FiberNotInIndex(label.clone()))?;
            fiber_vec[i] = Some(fiber);
        }
        let fibers: Vec<Fiber> = fiber_vec
            .into_iter()
            .enumerate()
            .map(|(i, f)| f.ok_or_else(|| Error::FiberMissing(index.label(i).to_string())))
            .collect::<Result<_>>()?;

        // Explicit transitions.
        let mut maps: BTreeMap<(usize, usize), AffineMap> = BTreeMap::new();
        for (from, to, map) in transitions {
            let s = index.index_of(&from)?;
            let t = index.index_of(&to)?;
            if !index.leq_idx(s, t) {
                return Err(Error::TransitionNotComparable { from, to });
            }
            if s == t && !map.is_identity() {
                return Err(Error::TransitionNotIdentity { from });
            }
            maps.insert((s, t), map);
        }
        for (s, fiber) in fibers.iter().enumerate() {
            maps.insert((s, s), AffineMap::identity(fiber.ambient_dim()));
        }

        // Complete missing composites along covers, shortest intervals first.
        let covers = index.covers();
        let interval = |s: usize, t: usize| -> usize {
            (0..n)
                .filter(|&z| index.leq_idx(s, z) && index.leq_idx(z, t))
                .count()
        };
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .filter(|&(s, t)| s != t && index.leq_idx(s, t))
            .collect();
        pairs.sort_by_key(|&(s, t)| interval(s, t));
        for (s, t) in pairs {
            if maps.contains_key(&(s, t)) {
                continue;
            }
            let step = covers
                .iter()
                .find(|&&(a, b)| a == s && index.leq_idx(b, t))
                .map(|&(_, b)| b);
            let Some(c) = step else {
                return Err(Error::TransitionMissing {
                    from: index.label(s).to_string(),
                    to: index.label(t).to_string(),
                });
            };
            let first = maps.get(&(s, c)).cloned().ok_or_else(|| Error::TransitionMissing {
                from: index.label(s).to_string(),
                to: index.label(c).to_string(),
            })?;
            let second = maps.get(&(c, t)).cloned().ok_or_else(|| Error::TransitionMissing {
                from: index.label(c).to_string(),
                to: index.label(t).to_string(),
            })?;
            let composed = second.compose(&first).map_err(|e| Error::TransitionShape {
                from: index.label(s).to_string(),
                to: index.label(t).to_string(),
                detail: e.to_string(),
            })?;
            maps.insert((s, t), composed);
        }

        let sum = PlonkaSum {
            index,
            fibers,
            transitions: maps,
        };
        sum.validate_shapes_and_images()?;
        sum.validate_functoriality()?;
        Ok(sum)
    }

    fn validate_shapes_and_images(&self) -> Result<()> {
        for (&(s, t), map) in &self.transitions {
            let from = self.index.label(s).to_string();
            let to = self.index.label(t).to_string();
            let source = &self.fibers[s];
            let target = &self.fibers[t];
            if map.source_dim() != source.ambient_dim()
                || map.target_dim() != target.ambient_dim()
            {
                return Err(Error::TransitionShape {
                    from,
                    to,
                    detail: format!(
                        "map is {}x{} but fibers have dimensions {} -> {}",
                        map.target_dim(),
                        map.source_dim(),
                        source.ambient_dim(),
                        target.ambient_dim()
                    ),
                });
            }
            for g in source.generators() {
                let image = map.apply(&g)?;
                if !target.contains(&image)? {
                    return Err(Error::TransitionImage {
                        from,
                        to,
                        point: format_point(&g),
                    });
                }
            }
            // A line fiber cannot squeeze into a bounded or smaller target
            // unless its directions are collapsed accordingly; generator
            // checks alone would miss that.
            if let Fiber::AffineSubspace(a) = source {
                for d in a.directions() {
                    let image = map.apply_linear(d);
                    let ok = match target {
                        Fiber::AffineSubspace(b) => b.spans_direction(&image),
                        Fiber::Polytope(_) | Fiber::Singleton(_) => {
                            image.iter().all(|c| *c == scalar::rat_int(0))
                        }
                    };
                    if !ok {
                        return Err(Error::TransitionImage {
                            from,
                            to,
                            point: format!("direction {}", format_point(d)),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_functoriality(&self) -> Result<()> {
        let n = self.index.size();
        for s in 0..n {
            for t in 0..n {
                if !self.index.leq_idx(s, t) {
                    continue;
                }
                for u in 0..n {
                    if !self.index.leq_idx(t, u) {
                        continue;
                    }
                    let st = &self.transitions[&(s, t)];
                    let tu = &self.transitions[&(t, u)];
                    let su = &self.transitions[&(s, u)];
                    if tu.compose(st)? != *su {
                        return Err(Error::Functoriality {
                            s: self.index.label(s).to_string(),
                            t: self.index.label(t).to_string(),
                            u: self.index.label(u).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn index(&self) -> &FiniteSemilattice {
        &self.index
    }

    /// Number of transition maps between distinct fibers (one per
    /// comparable pair `s < t`; the stored identities on each fiber are
    /// not counted).
    pub fn transition_count(&self) -> usize {
        self.transitions.keys().filter(|(s, t)| s != t).count()
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn fiber(&self, i: usize) -> &Fiber {
        &self.fibers[i]
    }

    pub fn transition(&self, s: usize, t: usize) -> Option<&AffineMap> {
        self.transitions.get(&(s, t))
    }

    pub fn format_element(&self, e: &SumElement) -> String {
        format!("{}:{}", self.index.label(e.fiber), format_point(&e.point))
    }

    /// Validates that an element names a real fiber and a member point.
    pub fn check_element(&self, e: &SumElement) -> Result<()> {
        if e.fiber >= self.fibers.len() {
            return Err(Error::NotInCarrier(format!(
                "fiber index {} out of range",
                e.fiber
            )));
        }
        if !self.fibers[e.fiber].contains(&e.point)? {
            return Err(Error::NotInCarrier(self.format_element(e)));
        }
        Ok(())
    }

    /// The binary mean: transport both arguments into the join fiber, then
    /// average there.
    pub fn eval(&self, p: &Weight, x: &SumElement, y: &SumElement) -> Result<SumElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        let j = self.index.join_idx(x.fiber, y.fiber);
        let xt = self.transitions[&(x.fiber, j)].apply(&x.point)?;
        let yt = self.transitions[&(y.fiber, j)].apply(&y.point)?;
        let point = match &self.fibers[j] {
            Fiber::Singleton(p) => {
                debug_assert_eq!(&xt, p);
                debug_assert_eq!(&yt, p);
                p.clone()
            }
            _ => scalar::weighted_mean(p, &xt, &yt)?,
        };
        Ok(SumElement::new(j, point))
    }

    /// A random element: uniform fiber choice, then the fiber's sampler.
    pub fn sample_element(&self, rng: &mut impl Rng) -> SumElement {
        let fiber = rng.gen_range(0..self.fibers.len());
        SumElement::new(fiber, self.fibers[fiber].sample(rng))
    }

    /// Parses `label:(c1, c2, ...)` or `label:[c1, c2, ...]` or `label:c`.
    pub fn parse_element(&self, s: &str) -> Result<SumElement> {
        let (label, coords) = s.split_once(':').ok_or_else(|| Error::ElementSyntax {
            element: s.to_string(),
            reason: "expected `fiber:coordinates`".to_string(),
        })?;
        let fiber = self.index.index_of(label.trim())?;
        let coords = coords.trim();
        let trimmed = coords
            .strip_prefix(['(', '['])
            .and_then(|c| c.strip_suffix([')', ']']))
            .unwrap_or(coords);
        let point: Point = trimmed
            .split(',')
            .map(|c| scalar::parse_rat(c.trim()))
            .collect::<Result<_>>()
            .map_err(|e| Error::ElementSyntax {
                element: s.to_string(),
                reason: e.to_string(),
            })?;
        let e = SumElement::new(fiber, point);
        self.check_element(&e)?;
        Ok(e)
    }
}

// ===== Serde for the sum =====

#[derive(Serialize, Deserialize)]
struct TransitionJson {
    from: String,
    to: String,
    #[serde(with = "crate::scalar::rat_mat")]
    matrix: Vec<Vec<Rat>>,
    #[serde(with = "crate::scalar::rat_vec")]
    offset: Point,
}

#[derive(Serialize, Deserialize)]
struct PlonkaSumJson {
    index: FiniteSemilattice,
    fibers: BTreeMap<String, Fiber>,
    transitions: Vec<TransitionJson>,
}

impl Serialize for PlonkaSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let fibers: BTreeMap<String, Fiber> = self
            .fibers
            .iter()
            .enumerate()
            .map(|(i, f)| (self.index.label(i).to_string(), f.clone()))
            .collect();
        let transitions: Vec<TransitionJson> = self
            .transitions
            .iter()
            .filter(|((a, b), _)| a != b)
            .map(|(&(a, b), m)| TransitionJson {
                from: self.index.label(a).to_string(),
                to: self.index.label(b).to_string(),
                matrix: m.matrix.clone(),
                offset: m.offset.clone(),
            })
            .collect();
        PlonkaSumJson {
            index: self.index.clone(),
            fibers,
            transitions,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlonkaSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PlonkaSumJson::deserialize(d)?;
        let transitions = raw
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
        PlonkaSum::new(raw.index, raw.fibers, transitions).map_err(serde::de::Error::custom)
    }
}

// ===== Replica =====

/// What one replica class looks like geometrically.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CellDescriptor {
    /// A single point (a vertex cell or a singleton fiber).
    Singleton {
        #[serde(with = "crate::scalar::rat_vec")]
        point: Point,
    },
    /// The relative interior of a positive-dimensional face.
    RelativeInterior {
        #[serde(with = "crate::scalar::rat_mat")]
        vertex_points: Vec<Point>,
        #[serde(with = "crate::scalar::rat_vec")]
        representative: Point,
    },
    /// A whole affine subspace.
    FullSubspace {
        #[serde(with = "crate::scalar::rat_vec")]
        representative: Point,
    },
}

impl CellDescriptor {
    pub fn representative(&self) -> &Point {
        match self {
            CellDescriptor::Singleton { point } => point,
            CellDescriptor::RelativeInterior { representative, .. } => representative,
            CellDescriptor::FullSubspace { representative } => representative,
        }
    }
}

/// One replica class: a relatively open cell of one fiber.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDescriptor {
    pub label: String,
    pub fiber: usize,
    /// For polytope fibers, the face index of the cell; 0 otherwise.
    pub cell: usize,
    pub descriptor: CellDescriptor,
}

/// The refined replica: a semilattice of relatively open classes together
/// with the (validated) classifying surjection.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaResult {
    pub semilattice: FiniteSemilattice,
    pub classes: Vec<ClassDescriptor>,
}

impl ReplicaResult {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn find_singleton(&self, point: &[Rat], fiber: usize) -> Option<usize> {
        self.classes.iter().position(|c| {
            c.fiber == fiber
                && matches!(&c.descriptor, CellDescriptor::Singleton { point: p } if p.as_slice() == point)
        })
    }

    pub fn to_dot(&self) -> String {
        self.semilattice.to_dot()
    }
}

impl Serialize for ReplicaResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct ReplicaJson<'a> {
            semilattice: &'a FiniteSemilattice,
            classes: &'a [ClassDescriptor],
        }
        ReplicaJson {
            semilattice: &self.semilattice,
            classes: &self.classes,
        }
        .serialize(s)
    }
}

impl PlonkaSum {
    /// The classes of the refined replica, in fiber order: one per open cell
    /// of each polytope fiber, one per affine-subspace or singleton fiber.
    fn replica_classes(&self) -> Vec<ClassDescriptor> {
        let mut classes = Vec::new();
        for (s, fiber) in self.fibers.iter().enumerate() {
            let fiber_label = self.index.label(s);
            match fiber {
                Fiber::Polytope(p) => {
                    for cell in p.open_cells() {
                        let descriptor = match cell.kind {
                            CellKind::Vertex => CellDescriptor::Singleton {
                                point: cell.representative.clone(),
                            },
                            CellKind::RelativeInterior => CellDescriptor::RelativeInterior {
                                vertex_points: p.face_lattice().faces()[cell.face]
                                    .vertices
                                    .iter()
                                    .map(|&v| p.vertices()[v].clone())
                                    .collect(),
                                representative: cell.representative.clone(),
                            },
                        };
                        classes.push(ClassDescriptor {
                            label: format!("{fiber_label}:{}", cell.label),
                            fiber: s,
                            cell: cell.face,
                            descriptor,
                        });
                    }
                }
                Fiber::AffineSubspace(a) => classes.push(ClassDescriptor {
                    label: format!("{fiber_label}:space"),
                    fiber: s,
                    cell: 0,
                    descriptor: CellDescriptor::FullSubspace {
                        representative: a.basepoint().clone(),
                    },
                }),
                Fiber::Singleton(p) => classes.push(ClassDescriptor {
                    label: format!("{fiber_label}:point"),
                    fiber: s,
                    cell: 0,
                    descriptor: CellDescriptor::Singleton { point: p.clone() },
                }),
            }
        }
        classes
    }

    /// The class index of an element (position in `replica_classes`).
    pub fn classify(&self, classes: &[ClassDescriptor], e: &SumElement) -> Result<usize> {
        self.check_element(e)?;
        let cell = match &self.fibers[e.fiber] {
            Fiber::Polytope(p) => p.classify(&e.point)?,
            _ => 0,
        };
        classes
            .iter()
            .position(|c| c.fiber == e.fiber && c.cell == cell)
            .ok_or_else(|| Error::NotInCarrier(self.format_element(e)))
    }

    /// Three deterministic points of a class, all within the cell.
    fn class_representatives(&self, class: &ClassDescriptor) -> Vec<Point> {
        match (&self.fibers[class.fiber], &class.descriptor) {
            (_, CellDescriptor::Singleton { point }) => vec![point.clone(); 3],
            (Fiber::Polytope(p), CellDescriptor::RelativeInterior { .. }) => {
                let fv = &p.face_lattice().faces()[class.cell].vertices;
                // Positive coefficient patterns keep all three points in the
                // relative interior.
                [1u64, 2, 3]
                    .iter()
                    .map(|&bump| {
                        let coeffs: Vec<u64> = (0..p.vertex_count())
                            .map(|i| {
                                if fv.contains(&i) {
                                    if i == fv[0] {
                                        bump
                                    } else {
                                        1
                                    }
                                } else {
                                    0
                                }
                            })
                            .collect();
                        let total = scalar::rat_int(coeffs.iter().sum::<u64>() as i64);
                        (0..p.ambient_dim())
                            .map(|c| {
                                coeffs
                                    .iter()
                                    .zip(p.vertices())
                                    .map(|(&a, v)| scalar::rat_int(a as i64) * v[c].clone())
                                    .fold(scalar::rat_int(0), |x, y| x + y)
                                    / total.clone()
                            })
                            .collect()
                    })
                    .collect()
            }
            (Fiber::AffineSubspace(a), CellDescriptor::FullSubspace { .. }) => {
                let shift = |sign: i64| -> Point {
                    let mut p = a.basepoint().clone();
                    for d in a.directions() {
                        for (pc, dc) in p.iter_mut().zip(d) {
                            *pc += scalar::rat_int(sign) * dc.clone();
                        }
                    }
                    p
                };
                vec![a.basepoint().clone(), shift(1), shift(-1)]
            }
            _ => unreachable!("descriptor kind always matches the fiber kind"),
        }
    }

    /// Computes the refined replica. The class join is found by averaging
    /// representative points; three independent representative pairs (with
    /// weights 1/2, 1/3, 2/5) must agree, and the classifier is re-validated
    /// as a homomorphism on seeded samples.
    pub fn refined_replica(&self) -> Result<ReplicaResult> {
        let classes = self.replica_classes();
        let n = classes.len();
        let weights: Vec<Weight> = [(1i64, 2i64), (1, 3), (2, 5)]
            .iter()
            .map(|&(a, b)| Weight::new(scalar::rat(a, b)).expect("in range"))
            .collect();
        let mut join = vec![vec![0usize; n]; n];
        for i in 0..n {
            let reps_i = self.class_representatives(&classes[i]);
            for j in 0..n {
                let reps_j = self.class_representatives(&classes[j]);
                let mut results = Vec::new();
                for k in 0..3 {
                    let e = self.eval(
                        &weights[k],
                        &SumElement::new(classes[i].fiber, reps_i[k].clone()),
                        &SumElement::new(classes[j].fiber, reps_j[k].clone()),
                    )?;
                    results.push(self.classify(&classes, &e)?);
                }
                if results[0] != results[1] || results[1] != results[2] {
                    return Err(Error::InconsistentClassJoin {
                        class_a: classes[i].label.clone(),
                        class_b: classes[j].label.clone(),
                        first: classes[results[0]].label.clone(),
                        second: classes[*results.iter().find(|&&r| r != results[0]).unwrap()]
                            .label
                            .clone(),
                    });
                }
                join[i][j] = results[0];
            }
        }
        let labels: Vec<String> = classes.iter().map(|c| c.label.clone()).collect();
        let semilattice = FiniteSemilattice::from_join_fn(labels, |i, j| join[i][j])?;
        let result = ReplicaResult {
            semilattice,
            classes,
        };
        self.validate_replica_hom(&result, 200, 7)?;
        Ok(result)
    }

    /// Checks `classify(eval(p, x, y)) = classify(x) v classify(y)` on seeded
    /// random samples.
    pub fn validate_replica_hom(
        &self,
        replica: &ReplicaResult,
        samples: usize,
        seed: u64,
    ) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = self.sample_element(&mut rng);
            let y = self.sample_element(&mut rng);
            let p = crate::laws::sample_weight(&mut rng);
            let e = self.eval(&p, &x, &y)?;
            let got = self.classify(&replica.classes, &e)?;
            let cx = self.classify(&replica.classes, &x)?;
            let cy = self.classify(&replica.classes, &y)?;
            let expected = replica.semilattice.join_idx(cx, cy);
            if got != expected {
                return Err(Error::ReplicaHomomorphism {
                    p: format_rat(p.value()),
                    x: self.format_element(&x),
                    y: self.format_element(&y),
                    got: replica.semilattice.label(got).to_string(),
                    expected: replica.semilattice.label(expected).to_string(),
                });
            }
        }
        Ok(())
    }
}

// ===== Openness of replica classes =====

/// Why a replica class has no proper nonempty wall.
#[derive(Debug, Clone, Serialize)]
pub struct OpennessCertificate {
    pub class: String,
    pub method: String,
    pub detail: String,
}

impl PlonkaSum {
    /// Produces one certificate per class that the class — as an algebra on
    /// its own — has no proper nonempty wall.
    ///
    /// Singletons have no proper nonempty subset at all. For the relative
    /// interior of a face F, every point's carrier is exactly F (checked on
    /// the representatives) and every proper subface's representative falls
    /// outside the cell, so no face-derived subset survives inside it. For a
    /// full affine subspace, every point splits as a proper mean of two
    /// distinct members, so no singleton (and hence no finite) wall exists.
    pub fn class_openness(&self, replica: &ReplicaResult) -> Result<Vec<OpennessCertificate>> {
        let mut out = Vec::new();
        for class in &replica.classes {
            let cert = match (&self.fibers[class.fiber], &class.descriptor) {
                (_, CellDescriptor::Singleton { .. }) => OpennessCertificate {
                    class: class.label.clone(),
                    method: "singleton".to_string(),
                    detail: "a one-point algebra has no proper nonempty subset".to_string(),
                },
                (Fiber::Polytope(p), CellDescriptor::RelativeInterior { .. }) => {
                    let lattice = p.face_lattice();
                    let fv = &lattice.faces()[class.cell].vertices;
                    for rep in self.class_representatives(class) {
                        let carrier = p.carrier_face(&rep)?;
                        if carrier != class.cell {
                            return Err(Error::NotInCarrier(format!(
                                "representative {} of class {} has carrier {}",
                                format_point(&rep),
                                class.label,
                                lattice.label(carrier)
                            )));
                        }
                    }
                    let mut excluded = 0usize;
                    for (g, face) in lattice.faces().iter().enumerate() {
                        if g == class.cell
                            || !face.vertices.iter().all(|v| fv.contains(v))
                        {
                            continue;
                        }
                        // A proper subface's relative interior misses the cell.
                        let rep = p.centroid_of(&face.vertices);
                        if p.carrier_face(&rep)? == class.cell {
                            return Err(Error::NotInCarrier(format!(
                                "subface {} intrudes into class {}",
                                lattice.label(g),
                                class.label
                            )));
                        }
                        excluded += 1;
                    }
                    OpennessCertificate {
                        class: class.label.clone(),
                        method: "relative-interior".to_string(),
                        detail: format!(
                            "carrier of every representative is the full face; all {excluded} proper subfaces lie outside the cell"
                        ),
                    }
                }
                (Fiber::AffineSubspace(a), CellDescriptor::FullSubspace { .. }) => {
                    if a.directions().is_empty() {
                        OpennessCertificate {
                            class: class.label.clone(),
                            method: "singleton".to_string(),
                            detail: "zero-dimensional subspace".to_string(),
                        }
                    } else {
                        // Each representative x splits as 1/2(x-d, x+d).
                        let half = Weight::new(scalar::rat(1, 2))?;
                        for x in self.class_representatives(class) {
                            let d = a.directions()[0].clone();
                            let left: Point = x
                                .iter()
                                .zip(&d)
                                .map(|(c, dc)| c.clone() - dc.clone())
                                .collect();
                            let right: Point = x
                                .iter()
                                .zip(&d)
                                .map(|(c, dc)| c.clone() + dc.clone())
                                .collect();
                            if !(a.contains(&left)? && a.contains(&right)?)
                                || scalar::weighted_mean(&half, &left, &right)? != x
                            {
                                return Err(Error::NotInCarrier(format!(
                                    "split points of {} escape class {}",
                                    format_point(&x),
                                    class.label
                                )));
                            }
                        }
                        OpennessCertificate {
                            class: class.label.clone(),
                            method: "full-subspace".to_string(),
                            detail: "every point is a proper mean of two distinct members"
                                .to_string(),
                        }
                    }
                }
                _ => unreachable!("descriptor kind always matches the fiber kind"),
            };
            out.push(cert);
        }
        Ok(out)
    }
}

// ===== Subalgebra restriction =====

/// A membership predicate describing a subalgebra of a sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SumPredicate {
    /// The whole sum.
    All,
    /// Everything except finitely many points.
    ExcludePoints { points: Vec<ExcludedPoint> },
    /// Only the elements of one fiber.
    SingleFiber { fiber: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedPoint {
    pub fiber: String,
    #[serde(with = "crate::scalar::rat_vec")]
    pub point: Point,
}

impl SumPredicate {
    pub fn exclude(points: Vec<(String, Point)>) -> Self {
        SumPredicate::ExcludePoints {
            points: points
                .into_iter()
                .map(|(fiber, point)| ExcludedPoint { fiber, point })
                .collect(),
        }
    }

    pub fn accepts(&self, sum: &PlonkaSum, e: &SumElement) -> Result<bool> {
        sum.check_element(e)?;
        Ok(match self {
            SumPredicate::All => true,
            SumPredicate::ExcludePoints { points } => !points.iter().any(|x| {
                sum.index().index_of(&x.fiber).map(|i| i == e.fiber).unwrap_or(false)
                    && x.point == e.point
            }),
            SumPredicate::SingleFiber { fiber } => {
                sum.index().index_of(fiber).map(|i| i == e.fiber).unwrap_or(false)
            }
        })
    }
}

impl PlonkaSum {
    /// Restricts a replica to the subalgebra described by `predicate`.
    ///
    /// Closure of the accepted set under the operations is validated on
    /// seeded samples; classes whose representative the predicate rejects
    /// are dropped; the induced join must avoid dropped classes; and the
    /// classifier is re-validated on the restriction.
    pub fn restrict(
        &self,
        predicate: &SumPredicate,
        replica: &ReplicaResult,
    ) -> Result<ReplicaResult> {
        let samples = 300usize;
        let mut rng = ChaCha8Rng::seed_from_u64(11);

        // Sampled closure check on accepted pairs.
        let mut accepted_budget = samples * 40;
        let mut sample_accepted = |rng: &mut ChaCha8Rng| -> Result<SumElement> {
            loop {
                if accepted_budget == 0 {
                    return Err(Error::PredicateExhausted("any".to_string()));
                }
                accepted_budget -= 1;
                let e = self.sample_element(rng);
                if predicate.accepts(self, &e)? {
                    return Ok(e);
                }
            }
        };
        for _ in 0..samples {
            let x = sample_accepted(&mut rng)?;
            let y = sample_accepted(&mut rng)?;
            let p = crate::laws::sample_weight(&mut rng);
            let r = self.eval(&p, &x, &y)?;
            if !predicate.accepts(self, &r)? {
                return Err(Error::RestrictionClosure {
                    p: format_rat(p.value()),
                    x: self.format_element(&x),
                    y: self.format_element(&y),
                    result: self.format_element(&r),
                });
            }
        }

        // Survivors: classes whose canonical representative is accepted.
        let survives: Vec<bool> = replica
            .classes
            .iter()
            .map(|c| {
                let e = SumElement::new(c.fiber, c.descriptor.representative().clone());
                predicate.accepts(self, &e)
            })
            .collect::<Result<_>>()?;
        let surviving: Vec<usize> = (0..replica.classes.len()).filter(|&i| survives[i]).collect();
        if surviving.is_empty() {
            return Err(Error::PredicateExhausted("all fibers".to_string()));
        }
        let position: BTreeMap<usize, usize> = surviving
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();

        // Induced join table over the survivors.
        let mut join = vec![vec![0usize; surviving.len()]; surviving.len()];
        for (a, &i) in surviving.iter().enumerate() {
            for (b, &j) in surviving.iter().enumerate() {
                let old_join = replica
                    .semilattice
                    .join_idx(i, j);
                match position.get(&old_join) {
                    Some(&new) => join[a][b] = new,
                    None => {
                        return Err(Error::RestrictionJoinDropped {
                            class_a: replica.classes[i].label.clone(),
                            class_b: replica.classes[j].label.clone(),
                            dropped: replica.classes[old_join].label.clone(),
                        })
                    }
                }
            }
        }
        let labels: Vec<String> = surviving
            .iter()
            .map(|&i| replica.classes[i].label.clone())
            .collect();
        let semilattice = FiniteSemilattice::from_join_fn(labels, |a, b| join[a][b])?;
        let classes: Vec<ClassDescriptor> = surviving
            .iter()
            .map(|&i| replica.classes[i].clone())
            .collect();
        let restricted = ReplicaResult {
            semilattice,
            classes,
        };

        // Homomorphism revalidation on accepted samples.
        for _ in 0..samples {
            let x = sample_accepted(&mut rng)?;
            let y = sample_accepted(&mut rng)?;
            let p = crate::laws::sample_weight(&mut rng);
            let e = self.eval(&p, &x, &y)?;
            let cx = self.classify_restricted(&restricted, &x)?;
            let cy = self.classify_restricted(&restricted, &y)?;
            let ce = self.classify_restricted(&restricted, &e)?;
            let expected = restricted.semilattice.join_idx(cx, cy);
            if ce != expected {
                return Err(Error::ReplicaHomomorphism {
                    p: format_rat(p.value()),
                    x: self.format_element(&x),
                    y: self.format_element(&y),
                    got: restricted.semilattice.label(ce).to_string(),
                    expected: restricted.semilattice.label(expected).to_string(),
                });
            }
        }
        Ok(restricted)
    }

    /// Classifies within a restricted replica (classes keep their fiber and
    /// cell identity from the full replica).
    pub fn classify_restricted(
        &self,
        restricted: &ReplicaResult,
        e: &SumElement,
    ) -> Result<usize> {
        self.check_element(e)?;
        let cell = match &self.fibers[e.fiber] {
            Fiber::Polytope(p) => p.classify(&e.point)?,
            _ => 0,
        };
        restricted
            .classes
            .iter()
            .position(|c| c.fiber == e.fiber && c.cell == cell)
            .ok_or_else(|| Error::NotInCarrier(self.format_element(e)))
    }
}

// ===== A polytope as a sum over its own face semilattice =====

/// Agreement report for the face-indexed decomposition of a polytope.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub samples: usize,
    pub agreements: usize,
    pub pass: bool,
    pub first_mismatch: Option<String>,
}

/// Rebuilds a polytope as the sum of its faces over the face semilattice,
/// with inclusion transitions, and verifies on seeded samples that the sum's
/// operation (elements tagged by carrier face) equals the direct mean.
pub fn polytope_as_plonka(c: &Polytope, samples: usize, seed: u64) -> Result<(PlonkaSum, ReconstructionReport)> {
    let lattice = c.face_lattice();
    let index = lattice.to_semilattice();
    let mut fibers = BTreeMap::new();
    for (k, face) in lattice.faces().iter().enumerate() {
        let vertices: Vec<Point> = face.vertices.iter().map(|&v| c.vertices()[v].clone()).collect();
        fibers.insert(
            lattice.label(k),
            Fiber::Polytope(Polytope::new(vertices)?),
        );
    }
    let transitions: Vec<(String, String, AffineMap)> = index
        .covers()
        .into_iter()
        .map(|(s, t)| {
            (
                index.label(s).to_string(),
                index.label(t).to_string(),
                AffineMap::identity(c.ambient_dim()),
            )
        })
        .collect();
    let sum = PlonkaSum::new(index, fibers, transitions)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agreements = 0usize;
    let mut first_mismatch = None;
    for _ in 0..samples {
        let x = c.sample_point(&mut rng);
        let y = c.sample_point(&mut rng);
        let p = crate::laws::sample_weight(&mut rng);
        let ex = SumElement::new(c.carrier_face(&x)?, x.clone());
        let ey = SumElement::new(c.carrier_face(&y)?, y.clone());
        let via_sum = sum.eval(&p, &ex, &ey)?;
        let direct = scalar::weighted_mean(&p, &x, &y)?;
        let tag_ok = via_sum.fiber == c.carrier_face(&direct)?;
        if via_sum.point == direct && tag_ok {
            agreements += 1;
        } else if first_mismatch.is_none() {
            first_mismatch = Some(format!(
                "{}({}, {}) gave {} instead of {}",
                p,
                scalar::format_point(&x),
                scalar::format_point(&y),
                sum.format_element(&via_sum),
                scalar::format_point(&direct)
            ));
        }
    }
    let pass = agreements == samples;
    Ok((
        sum,
        ReconstructionReport {
            samples,
            agreements,
            pass,
            first_mismatch,
        },
    ))
}

// ===== Built-in models =====

/// A right-relabelling of a replica: how a classifying homomorphism into a
/// named semilattice reads each class.
#[derive(Debug, Clone)]
pub struct HomExample {
    /// The target semilattice the classes map onto.
    pub target: FiniteSemilattice,
    /// Target label per replica class (aligned with the replica's classes).
    pub class_to_label: Vec<String>,
    /// A triple (x, y, z) in the target with `p(x,y) = p(x,z)` but `y != z`.
    pub cancellation_witness: (String, String, String),
}

/// A packaged example: the sum, the subalgebra predicate carving the model
/// out of it, the replica the restriction must produce, and named points.
#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub name: String,
    pub description: String,
    pub sum: PlonkaSum,
    pub predicate: SumPredicate,
    pub expected_replica: FiniteSemilattice,
    pub named_points: BTreeMap<String, SumElement>,
    pub hom: Option<HomExample>,
}

pub const BUILTIN_NAMES: [&str; 4] = [
    "extended-line",
    "homomorphism-example",
    "t-algebra",
    "toy-biology",
];

/// The two-interval sum: fiber "0" is [0,1], fiber "1" is [1/2, 3/2], and
/// the transition collapses the lower interval onto the point 1/2.
fn two_interval_sum() -> Result<PlonkaSum> {
    let index = FiniteSemilattice::from_join_fn(vec!["0".into(), "1".into()], |i, j| i.max(j))?;
    let mut fibers = BTreeMap::new();
    fibers.insert(
        "0".to_string(),
        Fiber::Polytope(Polytope::segment(scalar::rat_int(0), scalar::rat_int(1))?),
    );
    fibers.insert(
        "1".to_string(),
        Fiber::Polytope(Polytope::segment(scalar::rat(1, 2), scalar::rat(3, 2))?),
    );
    let transitions = vec![(
        "0".to_string(),
        "1".to_string(),
        AffineMap::constant(vec![scalar::rat(1, 2)], 1),
    )];
    PlonkaSum::new(index, fibers, transitions)
}

fn two_interval_names() -> BTreeMap<String, SumElement> {
    let mut named = BTreeMap::new();
    named.insert("alpha".to_string(), SumElement::new(0, vec![scalar::rat_int(0)]));
    named.insert("beta".to_string(), SumElement::new(0, vec![scalar::rat_int(1)]));
    named.insert("m".to_string(), SumElement::new(1, vec![scalar::rat(1, 2)]));
    named.insert("gamma".to_string(), SumElement::new(1, vec![scalar::rat(3, 2)]));
    named
}

/// Builds one of the packaged example models by name.
pub fn builtin(name: &str) -> Result<ModelBundle> {
    match name {
        "t-algebra" => {
            let sum = two_interval_sum()?;
            Ok(ModelBundle {
                name: "t-algebra".to_string(),
                description: "two joined intervals: [0,1] below, the half-open ]1/2,3/2] above; \
                              the lower interval collapses onto the branch point 1/2"
                    .to_string(),
                sum,
                predicate: SumPredicate::exclude(vec![(
                    "1".to_string(),
                    vec![scalar::rat(1, 2)],
                )]),
                expected_replica: crate::semilattice::five_element_replica(),
                named_points: two_interval_names(),
                hom: None,
            })
        }
        "toy-biology" => {
            let sum = two_interval_sum()?;
            let mut named = BTreeMap::new();
            named.insert("A1".to_string(), SumElement::new(0, vec![scalar::rat_int(0)]));
            named.insert("A2".to_string(), SumElement::new(0, vec![scalar::rat_int(1)]));
            named.insert("B".to_string(), SumElement::new(1, vec![scalar::rat(3, 2)]));
            named.insert("mix".to_string(), SumElement::new(0, vec![scalar::rat(1, 2)]));
            Ok(ModelBundle {
                name: "toy-biology".to_string(),
                description: "a two-type population: pure types A1 and A2 with their blends on \
                              the lower interval, and a type B reachable only through the \
                              uniform mix"
                    .to_string(),
                sum,
                predicate: SumPredicate::exclude(vec![(
                    "1".to_string(),
                    vec![scalar::rat(1, 2)],
                )]),
                expected_replica: crate::semilattice::five_element_replica(),
                named_points: named,
                hom: None,
            })
        }
        "extended-line" => {
            let index = FiniteSemilattice::from_join_fn(
                vec!["line".into(), "inf".into()],
                |i, j| i.max(j),
            )?;
            let mut fibers = BTreeMap::new();
            fibers.insert(
                "line".to_string(),
                Fiber::AffineSubspace(AffineSubspaceQ::new(
                    vec![scalar::rat_int(0)],
                    vec![vec![scalar::rat_int(1)]],
                )?),
            );
            fibers.insert("inf".to_string(), Fiber::Singleton(vec![scalar::rat_int(0)]));
            let transitions = vec![(
                "line".to_string(),
                "inf".to_string(),
                AffineMap::constant(vec![scalar::rat_int(0)], 1),
            )];
            let sum = PlonkaSum::new(index, fibers, transitions)?;
            let mut named = BTreeMap::new();
            named.insert("inf".to_string(), SumElement::new(1, vec![scalar::rat_int(0)]));
            named.insert("zero".to_string(), SumElement::new(0, vec![scalar::rat_int(0)]));
            Ok(ModelBundle {
                name: "extended-line".to_string(),
                description: "the rational line plus one absorbing point at infinity"
                    .to_string(),
                sum,
                predicate: SumPredicate::All,
                expected_replica: crate::semilattice::chain2(),
                named_points: named,
                hom: None,
            })
        }
        "homomorphism-example" => {
            let index = FiniteSemilattice::from_join_fn(vec!["seg".into()], |_, _| 0)?;
            let mut fibers = BTreeMap::new();
            fibers.insert(
                "seg".to_string(),
                Fiber::Polytope(Polytope::segment(scalar::rat_int(0), scalar::rat_int(1))?),
            );
            let sum = PlonkaSum::new(index, fibers, vec![])?;
            let mut named = BTreeMap::new();
            named.insert("zero".to_string(), SumElement::new(0, vec![scalar::rat_int(0)]));
            named.insert("one".to_string(), SumElement::new(0, vec![scalar::rat_int(1)]));
            // Replica classes of the segment come out in face order:
            // {0}, {1}, then the interior — read as a, b, c.
            Ok(ModelBundle {
                name: "homomorphism-example".to_string(),
                description: "the unit segment with its three-class quotient a, b, c \
                              (endpoints and interior); the quotient join is not cancellative"
                    .to_string(),
                sum,
                predicate: SumPredicate::All,
                expected_replica: crate::semilattice::vee3(),
                named_points: named,
                hom: Some(HomExample {
                    target: crate::semilattice::vee3(),
                    class_to_label: vec!["a".to_string(), "b".to_string(), "c".to_string()],
                    cancellation_witness: (
                        "a".to_string(),
                        "b".to_string(),
                        "c".to_string(),
                    ),
                }),
            })
        }
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

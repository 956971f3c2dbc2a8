//! Exact geometry of convex polytopes in ℚⁿ.
//!
//! A polytope is given by its vertices (validated to be extreme); everything
//! else — membership, carrier faces, the face lattice, wall tests, open-cell
//! decomposition, and the binary decomposition of convex combinations — is
//! derived from exact rational linear feasibility, with no floating point
//! and no H-representation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Rationals;
use crate::laws::{Term, WeightExpr};
use crate::linalg::{feasible_combination, max_barycentric_coord, kernel_basis, rref};
use crate::scalar::{self, format_point, Weight};
use crate::semilattice::FiniteSemilattice;
use crate::{Point, Rat};

/// A convex polytope, stored as its (validated) vertex set.
#[derive(Debug, Clone)]
pub struct Polytope {
    vertices: Vec<Point>,
    ambient_dim: usize,
    lattice: OnceLock<FaceLattice>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.ambient_dim == other.ambient_dim
    }
}
impl Eq for Polytope {}

impl Polytope {
    /// Validates: nonempty, consistent dimensions, pairwise distinct
    /// vertices, and every vertex extreme (outside the hull of the others).
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyVertexList);
        }
        let ambient_dim = vertices[0].len();
        for v in &vertices {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: v.len(),
                });
            }
        }
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                if vertices[i] == vertices[j] {
                    return Err(Error::DuplicateVertex {
                        first: i,
                        second: j,
                        vertex: format_point(&vertices[i]),
                    });
                }
            }
        }
        for i in 0..vertices.len() {
            let others: Vec<Point> = vertices
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            if feasible_combination(&others, &vertices[i]) {
                return Err(Error::NonExtremeVertex {
                    index: i,
                    vertex: format_point(&vertices[i]),
                });
            }
        }
        Ok(Polytope {
            vertices,
            ambient_dim,
            lattice: OnceLock::new(),
        })
    }

    /// A 1-dimensional polytope `[a, b]` in ℚ¹.
    pub fn segment(a: Rat, b: Rat) -> Result<Self> {
        Polytope::new(vec![vec![a], vec![b]])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn check_dim(&self, x: &[Rat]) -> Result<()> {
        if x.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Exact membership: is `x` a convex combination of the vertices?
    pub fn contains(&self, x: &[Rat]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(feasible_combination(&self.vertices, x))
    }

    /// The weighted mean of two members, membership-checked.
    pub fn mean(&self, w: &Weight, x: &[Rat], y: &[Rat]) -> Result<Point> {
        for p in [x, y] {
            if !self.contains(p)? {
                return Err(Error::PointOutsidePolytope(format_point(p)));
            }
        }
        scalar::weighted_mean(w, x, y)
    }

    pub fn centroid(&self) -> Point {
        self.centroid_of(&(0..self.vertices.len()).collect::<Vec<_>>())
    }

    /// The average of the given vertices (in the relative interior of the
    /// face they span, when they are a face's vertex set).
    pub fn centroid_of(&self, idxs: &[usize]) -> Point {
        let n = scalar::rat_int(idxs.len() as i64);
        (0..self.ambient_dim)
            .map(|c| {
                idxs.iter()
                    .map(|&i| self.vertices[i][c].clone())
                    .fold(scalar::rat_int(0), |a, b| a + b)
                    / n.clone()
            })
            .collect()
    }

    /// The face lattice (computed once, cached).
    pub fn face_lattice(&self) -> &FaceLattice {
        self.lattice.get_or_init(|| build_lattice(&self.vertices))
    }

    /// Index (into the face lattice) of the minimal face containing `x`;
    /// `x` lies in the relative interior of that face.
    ///
    /// A vertex belongs to the carrier exactly when its maximum feasible
    /// barycentric coordinate at `x` is strictly positive.
    pub fn carrier_face(&self, x: &[Rat]) -> Result<usize> {
        let support = self.carrier_vertices(x)?;
        Ok(self
            .face_lattice()
            .find(&support)
            .expect("the support of a member point is always a face vertex set"))
    }

    /// The vertex set of the carrier face of `x`.
    pub fn carrier_vertices(&self, x: &[Rat]) -> Result<Vec<usize>> {
        self.check_dim(x)?;
        let mut support = Vec::new();
        for i in 0..self.vertices.len() {
            match max_barycentric_coord(&self.vertices, x, i) {
                None => return Err(Error::PointOutsidePolytope(format_point(x))),
                Some(c) => {
                    if c > scalar::rat_int(0) {
                        support.push(i);
                    }
                }
            }
        }
        Ok(support)
    }

    /// Decides whether a candidate subset is a wall, i.e. satisfies
    /// `r(a, b) ∈ W ⇔ a ∈ W and b ∈ W` for every weight r; for polytopes
    /// the walls are exactly the (possibly empty) faces. The report carries
    /// a concrete violating instance when the answer is no.
    pub fn is_wall(&self, candidate: &WallCandidate) -> Result<WallReport> {
        match candidate {
            WallCandidate::Points { points } => self.wall_test_points(points),
            WallCandidate::Hull { generators } => self.wall_test_hull(generators),
        }
    }

    fn wall_test_points(&self, points: &[Point]) -> Result<WallReport> {
        let mut set: Vec<Point> = Vec::new();
        for p in points {
            self.check_dim(p)?;
            if !feasible_combination(&self.vertices, p) {
                return Err(Error::WallPointOutside(format_point(p)));
            }
            if !set.contains(p) {
                set.push(p.clone());
            }
        }
        match set.len() {
            0 => Ok(WallReport {
                is_wall: true,
                face: None,
                witness: None,
                detail: "the empty set is a wall".to_string(),
            }),
            1 => {
                let x = &set[0];
                if let Some(i) = self.vertices.iter().position(|v| v == x) {
                    return Ok(WallReport {
                        is_wall: true,
                        face: Some(vec![i]),
                        witness: None,
                        detail: format!("{{{}}} is the vertex face {{{i}}}", format_point(x)),
                    });
                }
                // x is interior to some positive-dimensional face: it splits
                // as a proper mean of a vertex and another member.
                let support = self.carrier_vertices(x)?;
                let v = support[0];
                let witness = self.split_off_vertex(x, v)?;
                Ok(WallReport {
                    is_wall: false,
                    face: None,
                    detail: format!(
                        "{} is not a vertex: it is a proper mean of members outside the set",
                        format_point(x)
                    ),
                    witness: Some(witness),
                })
            }
            _ => {
                // Two distinct members have infinitely many means; a finite
                // set with at least two points cannot be closed under them.
                let (x, y) = (&set[0], &set[1]);
                for d in 2..=(set.len() as i64 + 2) {
                    let w = Weight::new(scalar::rat(1, d))?;
                    let m = scalar::weighted_mean(&w, x, y)?;
                    if !set.contains(&m) {
                        return Ok(WallReport {
                            is_wall: false,
                            face: None,
                            detail: format!(
                                "not closed under means: {}({}, {}) escapes the set",
                                w,
                                format_point(x),
                                format_point(y)
                            ),
                            witness: Some(WallWitness {
                                weight: w,
                                left: x.clone(),
                                right: y.clone(),
                                mean: m,
                                failure: WallFailure::MeanEscapes,
                            }),
                        });
                    }
                }
                unreachable!("more distinct means than members of the set")
            }
        }
    }

    fn wall_test_hull(&self, generators: &[Point]) -> Result<WallReport> {
        if generators.is_empty() {
            return Err(Error::EmptyVertexList);
        }
        for g in generators {
            self.check_dim(g)?;
            if !feasible_combination(&self.vertices, g) {
                return Err(Error::WallPointOutside(format_point(g)));
            }
        }
        // The centroid of the generators lies in the relative interior of
        // their hull; its carrier face F is then the minimal face containing
        // the hull, so the hull is a wall (= face) iff it swallows all of F's
        // vertices.
        let n = scalar::rat_int(generators.len() as i64);
        let centroid: Point = (0..self.ambient_dim)
            .map(|c| {
                generators
                    .iter()
                    .map(|g| g[c].clone())
                    .fold(scalar::rat_int(0), |a, b| a + b)
                    / n.clone()
            })
            .collect();
        let face_idx = self.carrier_face(&centroid)?;
        let face_vertices = self.face_lattice().faces()[face_idx].vertices.clone();
        for &v in &face_vertices {
            if !feasible_combination(generators, &self.vertices[v]) {
                // v is in the minimal face around the hull but not in the
                // hull itself: the centroid (inside the candidate) is a
                // proper mean involving v (outside the candidate).
                let witness = self.split_off_face_vertex(&centroid, &face_vertices, v)?;
                return Ok(WallReport {
                    is_wall: false,
                    face: None,
                    detail: format!(
                        "hull is a proper subset of its minimal face {}: vertex {} escapes",
                        self.face_lattice().label(face_idx),
                        format_point(&self.vertices[v])
                    ),
                    witness: Some(witness),
                });
            }
        }
        Ok(WallReport {
            is_wall: true,
            face: Some(face_vertices),
            witness: None,
            detail: format!(
                "hull equals face {}",
                self.face_lattice().label(face_idx)
            ),
        })
    }

    /// Writes member `x` as a proper mean `x = r(v, y)` peeling off vertex
    /// `v` (which must have positive maximal coordinate at `x` and differ
    /// from `x`).
    fn split_off_vertex(&self, x: &[Rat], v: usize) -> Result<WallWitness> {
        let lam_max = max_barycentric_coord(&self.vertices, x, v)
            .ok_or_else(|| Error::PointOutsidePolytope(format_point(x)))?;
        Self::split_witness(x, &self.vertices[v], lam_max)
    }

    /// Same, but within a face: coordinates over the face's own vertices.
    fn split_off_face_vertex(
        &self,
        x: &[Rat],
        face_vertices: &[usize],
        v: usize,
    ) -> Result<WallWitness> {
        let pts: Vec<Point> = face_vertices
            .iter()
            .map(|&i| self.vertices[i].clone())
            .collect();
        let pos = face_vertices.iter().position(|&i| i == v).expect("v in face");
        let lam_max = max_barycentric_coord(&pts, x, pos)
            .ok_or_else(|| Error::PointOutsidePolytope(format_point(x)))?;
        Self::split_witness(x, &self.vertices[v], lam_max)
    }

    fn split_witness(x: &[Rat], vertex: &[Rat], lam_max: Rat) -> Result<WallWitness> {
        // With 0 < lam <= lam_max and x = lam*vertex + (1-lam)*y, the point
        // y stays in the hull; halving keeps lam strictly inside (0, 1).
        let lam = lam_max / scalar::rat_int(2);
        let one = scalar::rat_int(1);
        let y: Point = x
            .iter()
            .zip(vertex)
            .map(|(xc, vc)| (xc - lam.clone() * vc) / (one.clone() - lam.clone()))
            .collect();
        let r = Weight::new(one - lam)?;
        let mean = scalar::weighted_mean(&r, vertex, &y)?;
        debug_assert_eq!(mean, x.to_vec());
        Ok(WallWitness {
            weight: r,
            left: vertex.to_vec(),
            right: y,
            mean,
            failure: WallFailure::ArgumentEscapes,
        })
    }

    /// One relatively open cell per face: vertices give singletons, larger
    /// faces give their relative interiors. Cell `k` corresponds to face `k`.
    pub fn open_cells(&self) -> Vec<OpenCell> {
        self.face_lattice()
            .faces()
            .iter()
            .enumerate()
            .map(|(k, f)| {
                if f.dim == 0 {
                    OpenCell {
                        face: k,
                        kind: CellKind::Vertex,
                        representative: self.vertices[f.vertices[0]].clone(),
                        label: self.face_lattice().label(k),
                    }
                } else {
                    OpenCell {
                        face: k,
                        kind: CellKind::RelativeInterior,
                        representative: self.centroid_of(&f.vertices),
                        label: format!("relint{}", self.face_lattice().label(k)),
                    }
                }
            })
            .collect()
    }

    /// The index of the unique open cell containing `x` (equals the carrier
    /// face index).
    pub fn classify(&self, x: &[Rat]) -> Result<usize> {
        self.carrier_face(x)
    }

    /// A random member: a convex combination with small random coefficients.
    /// Zero coefficients are allowed, so boundary faces do come up.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Point {
        let m = self.vertices.len();
        let coeffs: Vec<u64> = loop {
            let c: Vec<u64> = (0..m).map(|_| rng.gen_range(0..=6)).collect();
            if c.iter().any(|&x| x > 0) {
                break c;
            }
        };
        self.combine(&coeffs)
    }

    /// A random point in the relative interior of the given face (all of the
    /// face's vertices get strictly positive coefficients).
    pub fn sample_in_face(&self, face: usize, rng: &mut impl Rng) -> Point {
        let fv = &self.face_lattice().faces()[face].vertices;
        let mut coeffs = vec![0u64; self.vertices.len()];
        for &i in fv {
            coeffs[i] = rng.gen_range(1..=6);
        }
        self.combine(&coeffs)
    }

    fn combine(&self, coeffs: &[u64]) -> Point {
        let total = scalar::rat_int(coeffs.iter().sum::<u64>() as i64);
        (0..self.ambient_dim)
            .map(|c| {
                coeffs
                    .iter()
                    .zip(&self.vertices)
                    .map(|(&a, v)| scalar::rat_int(a as i64) * v[c].clone())
                    .fold(scalar::rat_int(0), |x, y| x + y)
                    / total.clone()
            })
            .collect()
    }
}

// ===== Faces =====

/// One face: its vertex indices (sorted) and its dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceData {
    pub vertices: Vec<usize>,
    pub dim: usize,
}

/// All nonempty faces of a polytope, ordered by (dimension, vertex set);
/// the last face is the whole polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    faces: Vec<FaceData>,
    by_vertices: BTreeMap<Vec<usize>, usize>,
}

impl FaceLattice {
    pub fn faces(&self) -> &[FaceData] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Face counts by dimension, `counts[d]` = number of d-faces.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let top = self.faces.last().map(|f| f.dim).unwrap_or(0);
        let mut counts = vec![0usize; top + 1];
        for f in &self.faces {
            counts[f.dim] += 1;
        }
        counts
    }

    pub fn find(&self, vertices: &[usize]) -> Option<usize> {
        self.by_vertices.get(vertices).copied()
    }

    /// `{0,2,5}`-style label from the face's vertex indices.
    pub fn label(&self, idx: usize) -> String {
        let inner: Vec<String> = self.faces[idx].vertices.iter().map(|v| v.to_string()).collect();
        format!("{{{}}}", inner.join(","))
    }

    /// The minimal face containing both: unique because faces are closed
    /// under intersection.
    pub fn join_idx(&self, i: usize, j: usize) -> usize {
        let union: BTreeSet<usize> = self.faces[i]
            .vertices
            .iter()
            .chain(&self.faces[j].vertices)
            .copied()
            .collect();
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, f)| union.iter().all(|v| f.vertices.contains(v)))
            .min_by_key(|(_, f)| f.vertices.len())
            .map(|(k, _)| k)
            .expect("the full face contains every union")
    }

    /// The intersection, when it is nonempty.
    pub fn meet_idx(&self, i: usize, j: usize) -> Option<usize> {
        let a: BTreeSet<usize> = self.faces[i].vertices.iter().copied().collect();
        let inter: Vec<usize> = self.faces[j]
            .vertices
            .iter()
            .copied()
            .filter(|v| a.contains(v))
            .collect();
        if inter.is_empty() {
            None
        } else {
            Some(self.find(&inter).expect("faces are closed under intersection"))
        }
    }

    /// The join semilattice of faces, labelled by vertex-index sets.
    pub fn to_semilattice(&self) -> FiniteSemilattice {
        let labels: Vec<String> = (0..self.faces.len()).map(|i| self.label(i)).collect();
        FiniteSemilattice::from_join_fn(labels, |i, j| self.join_idx(i, j))
            .expect("face joins satisfy the semilattice axioms")
    }

    /// Hasse diagram of the face order, in DOT format.
    pub fn to_dot(&self) -> String {
        self.to_semilattice().to_dot()
    }
}

/// Computes the face lattice: candidate supporting hyperplanes come from
/// affinely independent vertex subsets spanning (d-1)-flats inside the
/// affine hull; contact sets of supporting ones are faces; every other face
/// is an intersection of those.
fn build_lattice(vertices: &[Point]) -> FaceLattice {
    let m = vertices.len();
    let full: Vec<usize> = (0..m).collect();
    let mut face_sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    face_sets.insert(full.clone());

    // Coordinates within the affine hull: subtract vertex 0 and read off the
    // coefficients over the reduced row basis of the direction vectors.
    let q = Rationals;
    let ambient = vertices[0].len();
    let dirs: Vec<Point> = vertices[1..]
        .iter()
        .map(|v| sub_points(v, &vertices[0]))
        .collect();
    let basis = rref(&q, dirs, ambient);
    let d = basis.rank();
    if d > 0 {
        let coords: Vec<Point> = vertices
            .iter()
            .map(|v| {
                basis
                    .pivots
                    .iter()
                    .map(|&p| v[p].clone() - vertices[0][p].clone())
                    .collect()
            })
            .collect();
        // Every d-subset of vertices that spans a unique hyperplane.
        for subset in combinations(m, d) {
            let rows: Vec<Point> = subset
                .iter()
                .map(|&i| {
                    let mut r = coords[i].clone();
                    r.push(scalar::rat_int(-1));
                    r
                })
                .collect();
            let kernel = kernel_basis(&q, &rows, d + 1);
            if kernel.len() != 1 {
                continue;
            }
            let (normal, offset) = kernel[0].split_at(d);
            let side = |i: usize| -> Rat {
                coords[i]
                    .iter()
                    .zip(normal)
                    .map(|(c, a)| c.clone() * a.clone())
                    .fold(scalar::rat_int(0), |x, y| x + y)
                    - offset[0].clone()
            };
            let zero = scalar::rat_int(0);
            let sides: Vec<Rat> = (0..m).map(side).collect();
            let supporting =
                sides.iter().all(|s| *s >= zero) || sides.iter().all(|s| *s <= zero);
            if supporting {
                let contact: Vec<usize> =
                    (0..m).filter(|&i| sides[i] == zero).collect();
                if !contact.is_empty() && contact.len() < m {
                    face_sets.insert(contact);
                }
            }
        }
        // Close under intersection.
        loop {
            let snapshot: Vec<Vec<usize>> = face_sets.iter().cloned().collect();
            let before = face_sets.len();
            for i in 0..snapshot.len() {
                for j in (i + 1)..snapshot.len() {
                    let a: BTreeSet<usize> = snapshot[i].iter().copied().collect();
                    let inter: Vec<usize> = snapshot[j]
                        .iter()
                        .copied()
                        .filter(|v| a.contains(v))
                        .collect();
                    if !inter.is_empty() {
                        face_sets.insert(inter);
                    }
                }
            }
            if face_sets.len() == before {
                break;
            }
        }
    }

    let mut faces: Vec<FaceData> = face_sets
        .into_iter()
        .map(|vs| {
            let dim = face_dim(vertices, &vs);
            FaceData { vertices: vs, dim }
        })
        .collect();
    faces.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));
    let by_vertices = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f.vertices.clone(), i))
        .collect();
    FaceLattice { faces, by_vertices }
}

fn face_dim(vertices: &[Point], vs: &[usize]) -> usize {
    let base = &vertices[vs[0]];
    let dirs: Vec<Point> = vs[1..]
        .iter()
        .map(|&i| sub_points(&vertices[i], base))
        .collect();
    rref(&Rationals, dirs, base.len()).rank()
}

fn sub_points(a: &[Rat], b: &[Rat]) -> Point {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

/// All size-k index subsets of 0..m, lexicographic.
fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

// ===== Walls =====

/// A candidate subset for the wall test: either a finite literal point set
/// or the convex hull of finitely many member points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WallCandidate {
    Points {
        #[serde(with = "crate::scalar::rat_mat")]
        points: Vec<Point>,
    },
    Hull {
        #[serde(with = "crate::scalar::rat_mat")]
        generators: Vec<Point>,
    },
}

impl WallCandidate {
    pub fn points(points: Vec<Point>) -> Self {
        WallCandidate::Points { points }
    }

    pub fn hull(generators: Vec<Point>) -> Self {
        WallCandidate::Hull { generators }
    }
}

/// Which half of the wall biconditional fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallFailure {
    /// Both arguments are in the candidate but their mean is not.
    MeanEscapes,
    /// The mean is in the candidate but an argument is not.
    ArgumentEscapes,
}

/// A concrete violating instance `weight(left, right) = mean`.
#[derive(Debug, Clone, Serialize)]
pub struct WallWitness {
    pub weight: Weight,
    #[serde(with = "crate::scalar::rat_vec")]
    pub left: Point,
    #[serde(with = "crate::scalar::rat_vec")]
    pub right: Point,
    #[serde(with = "crate::scalar::rat_vec")]
    pub mean: Point,
    pub failure: WallFailure,
}

/// The outcome of a wall test.
#[derive(Debug, Clone, Serialize)]
pub struct WallReport {
    pub is_wall: bool,
    /// When the candidate is a wall: the vertex indices of the face it
    /// equals (`None` for the empty wall).
    pub face: Option<Vec<usize>>,
    pub witness: Option<WallWitness>,
    pub detail: String,
}

// ===== Open cells =====

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellKind {
    Vertex,
    RelativeInterior,
}

/// A relatively open cell of the carrier: a vertex singleton or the relative
/// interior of a positive-dimensional face.
#[derive(Debug, Clone, Serialize)]
pub struct OpenCell {
    pub face: usize,
    pub kind: CellKind,
    #[serde(with = "crate::scalar::rat_vec")]
    pub representative: Point,
    pub label: String,
}

// ===== Binary decomposition of convex combinations =====

/// Expresses `Σ weights[i]·points[i]` by binary means: peels points off the
/// right, renormalizing the prefix, so the term shape is deterministic.
/// Returns the term (over variables `x1..xn`) and the combination's value.
pub fn fold_convex_combination(weights: &[Rat], points: &[Point]) -> Result<(Term, Point)> {
    if points.is_empty() {
        return Err(Error::InvalidCombination("no points given".to_string()));
    }
    if weights.len() != points.len() {
        return Err(Error::InvalidCombination(format!(
            "{} weights for {} points",
            weights.len(),
            points.len()
        )));
    }
    let dim = points[0].len();
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
    }
    let zero = scalar::rat_int(0);
    for w in weights {
        if *w <= zero {
            return Err(Error::InvalidCombination(format!(
                "weight {} is not strictly positive",
                scalar::format_rat(w)
            )));
        }
    }
    let total: Rat = weights.iter().fold(zero, |a, b| a + b);
    if total != scalar::rat_int(1) {
        return Err(Error::InvalidCombination(format!(
            "weights sum to {}, not 1",
            scalar::format_rat(&total)
        )));
    }

    let mut term = Term::var("x1");
    let mut prefix = weights[0].clone();
    for (i, w) in weights.iter().enumerate().skip(1) {
        prefix = prefix + w;
        // weight of the new node: w_i over the mass accumulated so far
        let node = Weight::new(w / prefix.clone())?;
        term = Term::op(
            WeightExpr::Const(node),
            term,
            Term::var(&format!("x{}", i + 1)),
        );
    }

    let value: Point = (0..dim)
        .map(|c| {
            weights
                .iter()
                .zip(points)
                .map(|(w, p)| w.clone() * p[c].clone())
                .fold(scalar::rat_int(0), |a, b| a + b)
        })
        .collect();
    Ok((term, value))
}

// ===== Serde =====

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    ambient_dim: usize,
    #[serde(with = "crate::scalar::rat_mat")]
    vertices: Vec<Point>,
}

impl Serialize for Polytope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson {
            ambient_dim: self.ambient_dim,
            vertices: self.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolytopeJson::deserialize(d)?;
        let p = Polytope::new(raw.vertices).map_err(serde::de::Error::custom)?;
        if p.ambient_dim != raw.ambient_dim {
            return Err(serde::de::Error::custom(Error::DimensionMismatch {
                expected: raw.ambient_dim,
                got: p.ambient_dim,
            }));
        }
        Ok(p)
    }
}

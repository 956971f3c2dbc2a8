//! Affine spaces over odd prime fields and over ℚ.
//!
//! Over GF(p) the module enumerates the subspace join semilattice L(V),
//! builds the algebra S(V) of all cosets of all subspaces with the lifted
//! weighted means and the parallelogram operation, and verifies at desk
//! scale that S(V) decomposes as a sum of coset fibers over L(V), that the
//! coset-to-subspace projection is the replica homomorphism, and that the
//! parallelogram operation is a derived operation of the binary means.
//! Over ℚ it demonstrates the same decomposition on a user-supplied finite
//! join-closed family of subspaces.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{mean_vec, parallelogram_vec, Field, PrimeField, Rationals};
use crate::linalg::{check_desk_scale, in_span, rref};
use crate::scalar::{self, format_point};
use crate::semilattice::FiniteSemilattice;
use crate::{Point, Rat};

/// Largest carrier size for exhaustive enumeration.
pub const DESK_BOUND: u64 = 10_000;

/// Largest carrier size for exhaustive verification over all triples.
pub const TRIPLE_BOUND: u64 = 100;

pub(crate) fn format_gf_point(v: &[u64]) -> String {
    let coords: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("({})", coords.join(", "))
}

// ===== The space =====

/// The vector space GF(p)ⁿ for an odd prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteVectorSpace {
    modulus: u64,
    dimension: usize,
}

impl FiniteVectorSpace {
    pub fn new(modulus: u64, dimension: usize) -> Result<Self> {
        if !crate::field::is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        if modulus == 2 {
            return Err(Error::InvalidInput(
                "the modulus must be an odd prime; characteristic 2 is not supported".to_string(),
            ));
        }
        if dimension == 0 {
            return Err(Error::InvalidInput(
                "dimension must be at least 1".to_string(),
            ));
        }
        Ok(FiniteVectorSpace { modulus, dimension })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.modulus).expect("modulus validated at construction")
    }

    /// Number of vectors, bounded by the desk-scale limit.
    pub fn size(&self) -> Result<u64> {
        check_desk_scale(self.modulus, self.dimension, DESK_BOUND)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        v.len() == self.dimension && v.iter().all(|&c| c < self.modulus)
    }

    fn check_member(&self, v: &[u64]) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: v.len(),
            });
        }
        if !self.contains(v) {
            return Err(Error::InvalidInput(format!(
                "vector {} has entries outside GF({})",
                format_gf_point(v),
                self.modulus
            )));
        }
        Ok(())
    }

    /// Every vector, in lexicographic order.
    pub fn vectors(&self) -> Result<Vec<Vec<u64>>> {
        let size = self.size()?;
        let mut out = Vec::with_capacity(size as usize);
        for mut code in 0..size {
            let mut v = vec![0u64; self.dimension];
            for c in (0..self.dimension).rev() {
                v[c] = code % self.modulus;
                code /= self.modulus;
            }
            out.push(v);
        }
        Ok(out)
    }

    /// The weighted mean `(1-k)x + ky`; every field element is a legal
    /// weight here, including the projections 0 and 1.
    pub fn mean(&self, k: u64, x: &[u64], y: &[u64]) -> Result<Vec<u64>> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(mean_vec(&self.field(), &(k % self.modulus), x, y))
    }

    /// The parallelogram operation `u - v + w`.
    pub fn parallelogram(&self, u: &[u64], v: &[u64], w: &[u64]) -> Result<Vec<u64>> {
        self.check_member(u)?;
        self.check_member(v)?;
        self.check_member(w)?;
        Ok(parallelogram_vec(&self.field(), u, v, w))
    }
}

#[derive(Serialize, Deserialize)]
struct FiniteVectorSpaceJson {
    modulus: u64,
    dimension: usize,
}

impl Serialize for FiniteVectorSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FiniteVectorSpaceJson {
            modulus: self.modulus,
            dimension: self.dimension,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteVectorSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FiniteVectorSpaceJson::deserialize(d)?;
        FiniteVectorSpace::new(raw.modulus, raw.dimension).map_err(serde::de::Error::custom)
    }
}

// ===== Subspaces =====

/// A linear subspace in reduced-row-echelon canonical form; equality is
/// syntactic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    space: FiniteVectorSpace,
    basis: Vec<Vec<u64>>,
}

impl Subspace {
    /// The span of the given vectors, canonicalized.
    pub fn span(space: FiniteVectorSpace, vectors: &[Vec<u64>]) -> Result<Self> {
        for v in vectors {
            space.check_member(v)?;
        }
        let rr = rref(&space.field(), vectors.to_vec(), space.dimension);
        Ok(Subspace {
            space,
            basis: rr.rows,
        })
    }

    pub fn zero(space: FiniteVectorSpace) -> Self {
        Subspace {
            space,
            basis: Vec::new(),
        }
    }

    pub fn space(&self) -> &FiniteVectorSpace {
        &self.space
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.space.dimension
    }

    pub fn label(&self) -> String {
        let rows: Vec<String> = self.basis.iter().map(|r| format_gf_point(r)).collect();
        format!("span{{{}}}", rows.join(","))
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        self.space.check_member(v)?;
        let rr = rref(&self.space.field(), self.basis.clone(), self.space.dimension);
        Ok(in_span(&self.space.field(), &rr, v))
    }

    /// Is `self` a subspace of `other`?
    pub fn leq(&self, other: &Subspace) -> Result<bool> {
        self.check_same_space(other)?;
        for row in &self.basis {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The least upper bound in L(V): the span of the union.
    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_space(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.space, &rows)
    }

    fn check_same_space(&self, other: &Subspace) -> Result<()> {
        if self.space != other.space {
            return Err(Error::InvalidInput(format!(
                "subspaces of different spaces: GF({})^{} vs GF({})^{}",
                self.space.modulus,
                self.space.dimension,
                other.space.modulus,
                other.space.dimension
            )));
        }
        Ok(())
    }

    /// All p^dim member vectors.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let f = self.space.field();
        let p = self.space.modulus;
        let count = p.pow(self.basis.len() as u32);
        let mut out = Vec::with_capacity(count as usize);
        for mut code in 0..count {
            let mut v = vec![0u64; self.space.dimension];
            for row in self.basis.iter().rev() {
                let c = code % p;
                code /= p;
                for (vc, rc) in v.iter_mut().zip(row) {
                    *vc = f.add(vc, &f.mul(&c, rc));
                }
            }
            out.push(v);
        }
        out
    }

    /// The pivot columns of the canonical basis.
    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| row.iter().position(|&c| c != 0).expect("rows are nonzero"))
            .collect()
    }
}

/// All subspaces of the space, canonical and sorted by (dimension, basis).
///
/// Starts from the zero space and the spans of single vectors, then closes
/// under pairwise join; every subspace is a join of one-dimensional ones.
pub fn enumerate_subspaces(space: &FiniteVectorSpace) -> Result<Vec<Subspace>> {
    space.size()?;
    let mut seen: BTreeMap<Vec<Vec<u64>>, Subspace> = BTreeMap::new();
    let zero = Subspace::zero(*space);
    seen.insert(zero.basis.clone(), zero);
    for v in space.vectors()? {
        if v.iter().all(|&c| c == 0) {
            continue;
        }
        let s = Subspace::span(*space, &[v])?;
        seen.insert(s.basis.clone(), s);
    }
    loop {
        let current: Vec<Subspace> = seen.values().cloned().collect();
        let before = seen.len();
        for a in &current {
            for b in &current {
                let j = a.join(b)?;
                seen.entry(j.basis.clone()).or_insert(j);
            }
        }
        if seen.len() == before {
            break;
        }
    }
    let mut out: Vec<Subspace> = seen.into_values().collect();
    out.sort_by(|a, b| (a.dim(), &a.basis).cmp(&(b.dim(), &b.basis)));
    Ok(out)
}

// ===== Cosets =====

/// A coset x + U, canonicalized by clearing the pivot coordinates of U from
/// the representative; equality is syntactic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    subspace: Subspace,
    representative: Vec<u64>,
}

impl Coset {
    pub fn new(subspace: Subspace, point: &[u64]) -> Result<Self> {
        subspace.space.check_member(point)?;
        let f = subspace.space.field();
        let mut rep = point.to_vec();
        for (row, pivot) in subspace.basis.iter().zip(subspace.pivots()) {
            let c = rep[pivot];
            for (rc, bc) in rep.iter_mut().zip(row) {
                *rc = f.sub(rc, &f.mul(&c, bc));
            }
        }
        Ok(Coset {
            subspace,
            representative: rep,
        })
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn representative(&self) -> &[u64] {
        &self.representative
    }

    pub fn label(&self) -> String {
        format!("{}+{}", format_gf_point(&self.representative), self.subspace.label())
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        let f = self.subspace.space.field();
        self.subspace.space.check_member(v)?;
        let diff: Vec<u64> = v
            .iter()
            .zip(&self.representative)
            .map(|(a, b)| f.sub(a, b))
            .collect();
        self.subspace.contains(&diff)
    }

    /// All members: representative + U.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let f = self.subspace.space.field();
        self.subspace
            .elements()
            .into_iter()
            .map(|u| {
                u.iter()
                    .zip(&self.representative)
                    .map(|(a, b)| f.add(a, b))
                    .collect()
            })
            .collect()
    }
}

// ===== The coset algebra S(V) =====

/// All cosets of all subspaces of V, with the lifted weighted means and
/// parallelogram operation. Construction validates that the lifted
/// operations are well defined (setwise images are single cosets) —
/// exhaustively for tiny spaces, on seeded samples otherwise.
#[derive(Debug, Clone)]
pub struct CosetAlgebra {
    space: FiniteVectorSpace,
    subspaces: Vec<Subspace>,
    cosets: Vec<Coset>,
    fiber_of: Vec<usize>,
    validation: &'static str,
}

pub fn coset_algebra(space: &FiniteVectorSpace) -> Result<CosetAlgebra> {
    let size = space.size()?;
    let subspaces = enumerate_subspaces(space)?;
    let vectors = space.vectors()?;
    let mut cosets = Vec::new();
    let mut fiber_of = Vec::new();
    for (si, u) in subspaces.iter().enumerate() {
        let mut reps: BTreeSet<Vec<u64>> = BTreeSet::new();
        for v in &vectors {
            reps.insert(Coset::new(u.clone(), v)?.representative);
        }
        for rep in reps {
            cosets.push(Coset {
                subspace: u.clone(),
                representative: rep,
            });
            fiber_of.push(si);
        }
    }
    let algebra = CosetAlgebra {
        space: *space,
        subspaces,
        cosets,
        fiber_of,
        validation: if size <= 9 { "exhaustive" } else { "sampled" },
    };
    if size <= 9 {
        algebra.validate_exhaustive()?;
    } else {
        algebra.validate_sampled(7)?;
    }
    Ok(algebra)
}

impl CosetAlgebra {
    pub fn space(&self) -> &FiniteVectorSpace {
        &self.space
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn validation(&self) -> &'static str {
        self.validation
    }

    pub fn find_coset(&self, c: &Coset) -> Option<usize> {
        self.cosets.iter().position(|x| x == c)
    }

    pub fn subspace_index(&self, u: &Subspace) -> Option<usize> {
        self.subspaces.iter().position(|x| x == u)
    }

    /// The fiber index (position in `subspaces`) of each coset.
    pub fn fiber_of(&self, coset_idx: usize) -> usize {
        self.fiber_of[coset_idx]
    }

    /// Coset indices belonging to the fiber over the given subspace.
    pub fn fiber(&self, subspace_idx: usize) -> Vec<usize> {
        (0..self.cosets.len())
            .filter(|&i| self.fiber_of[i] == subspace_idx)
            .collect()
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.subspaces.len()];
        for &f in &self.fiber_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// The projection x + U ↦ U.
    pub fn pi<'a>(&self, c: &'a Coset) -> &'a Subspace {
        c.subspace()
    }

    fn check_weight(&self, k: u64) -> Result<u64> {
        let k = k % self.space.modulus;
        if k == 0 || k == 1 {
            return Err(Error::DegenerateFieldWeight { k });
        }
        Ok(k)
    }

    /// The lifted mean: a coset of U₁ ∨ U₂.
    pub fn mean(&self, k: u64, a: &Coset, b: &Coset) -> Result<Coset> {
        let k = self.check_weight(k)?;
        let join = a.subspace.join(&b.subspace)?;
        let point = mean_vec(&self.space.field(), &k, &a.representative, &b.representative);
        Coset::new(join, &point)
    }

    /// The lifted parallelogram operation: a coset of U₁ ∨ U₂ ∨ U₃.
    pub fn parallelogram_coset(&self, a: &Coset, b: &Coset, c: &Coset) -> Result<Coset> {
        let join = a.subspace.join(&b.subspace)?.join(&c.subspace)?;
        let point = parallelogram_vec(
            &self.space.field(),
            &a.representative,
            &b.representative,
            &c.representative,
        );
        Coset::new(join, &point)
    }

    /// Transports a coset of U_s into the fiber over U_t ⊇ U_s.
    pub fn transition(&self, c: &Coset, target: &Subspace) -> Result<Coset> {
        if !c.subspace.leq(target)? {
            return Err(Error::TransitionNotComparable {
                from: c.subspace.label(),
                to: target.label(),
            });
        }
        Coset::new(target.clone(), &c.representative)
    }

    /// L(V) as a finite semilattice with span labels.
    pub fn subspace_lattice(&self) -> Result<FiniteSemilattice> {
        let labels: Vec<String> = self.subspaces.iter().map(|u| u.label()).collect();
        let mut join = vec![vec![0usize; labels.len()]; labels.len()];
        for (i, a) in self.subspaces.iter().enumerate() {
            for (j, b) in self.subspaces.iter().enumerate() {
                let jn = a.join(b)?;
                join[i][j] = self
                    .subspace_index(&jn)
                    .expect("subspace enumeration is join-closed");
            }
        }
        FiniteSemilattice::from_join_fn(labels, |i, j| join[i][j])
    }

    /// Setwise check that `{k(u1, u2)}` over all element pairs is exactly
    /// the claimed coset.
    fn check_setwise_mean(&self, k: u64, a: &Coset, b: &Coset) -> Result<()> {
        let claimed = self.mean(k, a, b)?;
        let mut image = BTreeSet::new();
        for u1 in a.elements() {
            for u2 in b.elements() {
                image.insert(mean_vec(&self.space.field(), &k, &u1, &u2));
            }
        }
        let expected: BTreeSet<Vec<u64>> = claimed.elements().into_iter().collect();
        if image != expected {
            return Err(Error::InvalidInput(format!(
                "lifted mean {k}({}, {}) is not the single coset {}",
                a.label(),
                b.label(),
                claimed.label()
            )));
        }
        Ok(())
    }

    fn check_setwise_parallelogram(&self, a: &Coset, b: &Coset, c: &Coset) -> Result<()> {
        let claimed = self.parallelogram_coset(a, b, c)?;
        let mut image = BTreeSet::new();
        for u1 in a.elements() {
            for u2 in b.elements() {
                for u3 in c.elements() {
                    image.insert(parallelogram_vec(&self.space.field(), &u1, &u2, &u3));
                }
            }
        }
        let expected: BTreeSet<Vec<u64>> = claimed.elements().into_iter().collect();
        if image != expected {
            return Err(Error::InvalidInput(format!(
                "lifted parallelogram P({}, {}, {}) is not the single coset {}",
                a.label(),
                b.label(),
                c.label(),
                claimed.label()
            )));
        }
        Ok(())
    }

    fn validate_exhaustive(&self) -> Result<()> {
        for a in &self.cosets {
            for b in &self.cosets {
                for k in 2..self.space.modulus {
                    self.check_setwise_mean(k, a, b)?;
                }
                for c in &self.cosets {
                    self.check_setwise_parallelogram(a, b, c)?;
                }
            }
        }
        Ok(())
    }

    fn validate_sampled(&self, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = self.space.modulus;
        let pick = |rng: &mut ChaCha8Rng| -> usize { rng.gen_range(0..self.cosets.len()) };
        let pick_elem = |rng: &mut ChaCha8Rng, c: &Coset| -> Vec<u64> {
            let f = self.space.field();
            let mut v = c.representative.clone();
            for row in c.subspace.basis() {
                let coeff = rng.gen_range(0..p);
                for (vc, rc) in v.iter_mut().zip(row) {
                    *vc = f.add(vc, &f.mul(&coeff, rc));
                }
            }
            v
        };
        for _ in 0..200 {
            let a = &self.cosets[pick(&mut rng)];
            let b = &self.cosets[pick(&mut rng)];
            let k = rng.gen_range(2..p);
            let claimed = self.mean(k, a, b)?;
            let m = mean_vec(
                &self.space.field(),
                &k,
                &pick_elem(&mut rng, a),
                &pick_elem(&mut rng, b),
            );
            if !claimed.contains(&m)? {
                return Err(Error::InvalidInput(format!(
                    "sampled mean {k}({}, {}) escaped the coset {}",
                    a.label(),
                    b.label(),
                    claimed.label()
                )));
            }
        }
        for _ in 0..100 {
            let a = &self.cosets[pick(&mut rng)];
            let b = &self.cosets[pick(&mut rng)];
            let c = &self.cosets[pick(&mut rng)];
            let claimed = self.parallelogram_coset(a, b, c)?;
            let m = parallelogram_vec(
                &self.space.field(),
                &pick_elem(&mut rng, a),
                &pick_elem(&mut rng, b),
                &pick_elem(&mut rng, c),
            );
            if !claimed.contains(&m)? {
                return Err(Error::InvalidInput(format!(
                    "sampled parallelogram P({}, {}, {}) escaped the coset {}",
                    a.label(),
                    b.label(),
                    c.label(),
                    claimed.label()
                )));
            }
        }
        Ok(())
    }
}

// ===== Verification: the sum decomposition of S(V) =====

/// Result of checking that S(V) with one weight k is the sum of its coset
/// fibers over L(V).
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub modulus: u64,
    pub dimension: usize,
    pub k: u64,
    pub subspace_count: usize,
    pub coset_count: usize,
    pub fiber_sizes: Vec<usize>,
    pub transition_maps: usize,
    pub functorial_triples: usize,
    pub pairs_checked: usize,
    pub projection_pairs: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

pub fn verify_plonka_structure(space: &FiniteVectorSpace, k: u64) -> Result<StructureReport> {
    let algebra = coset_algebra(space)?;
    let k = algebra.check_weight(k)?;
    let mut report = StructureReport {
        modulus: space.modulus(),
        dimension: space.dimension(),
        k,
        subspace_count: algebra.subspaces.len(),
        coset_count: algebra.len(),
        fiber_sizes: algebra.fiber_sizes(),
        transition_maps: 0,
        functorial_triples: 0,
        pairs_checked: 0,
        projection_pairs: 0,
        pass: true,
        witness: None,
    };
    let fail = |r: &mut StructureReport, w: String| {
        if r.pass {
            r.pass = false;
            r.witness = Some(w);
        }
    };

    // Transitions are containment-respecting: the transported coset must
    // contain the original one.
    for c in &algebra.cosets {
        for t in &algebra.subspaces {
            if !c.subspace().leq(t)? {
                continue;
            }
            report.transition_maps += 1;
            let image = algebra.transition(c, t)?;
            for e in c.elements() {
                if !image.contains(&e)? {
                    fail(
                        &mut report,
                        format!("transport of {} to {} lost {}", c.label(), t.label(), format_gf_point(&e)),
                    );
                }
            }
        }
    }

    // Functoriality along every chain U_s <= U_t <= U_u.
    for s in &algebra.subspaces {
        for t in &algebra.subspaces {
            if !s.leq(t)? {
                continue;
            }
            for u in &algebra.subspaces {
                if !t.leq(u)? {
                    continue;
                }
                report.functorial_triples += 1;
                for ci in algebra.fiber(algebra.subspace_index(s).unwrap()) {
                    let c = &algebra.cosets[ci];
                    let two_step = algebra.transition(&algebra.transition(c, t)?, u)?;
                    let one_step = algebra.transition(c, u)?;
                    if two_step != one_step {
                        fail(
                            &mut report,
                            format!(
                                "transports of {} along {} -> {} -> {} disagree",
                                c.label(),
                                s.label(),
                                t.label(),
                                u.label()
                            ),
                        );
                    }
                }
            }
        }
    }

    // The lifted mean equals transport-to-join followed by the within-fiber
    // mean, and the projection is a homomorphism onto L(V).
    for a in &algebra.cosets {
        for b in &algebra.cosets {
            report.pairs_checked += 1;
            let direct = algebra.mean(k, a, b)?;
            let join = a.subspace().join(b.subspace())?;
            let ta = algebra.transition(a, &join)?;
            let tb = algebra.transition(b, &join)?;
            let via_fiber = algebra.mean(k, &ta, &tb)?;
            if direct != via_fiber {
                fail(
                    &mut report,
                    format!(
                        "{k}({}, {}) differs from the transported within-fiber mean",
                        a.label(),
                        b.label()
                    ),
                );
            }
            report.projection_pairs += 1;
            if *algebra.pi(&direct) != join {
                fail(
                    &mut report,
                    format!(
                        "projection of {k}({}, {}) is not the subspace join",
                        a.label(),
                        b.label()
                    ),
                );
            }
        }
    }
    Ok(report)
}

// ===== Verification: L(V) is the replica =====

/// How one fiber was certified to admit no proper nonempty wall.
#[derive(Debug, Clone, Serialize)]
pub struct FiberCertificate {
    pub subspace: String,
    pub size: usize,
    pub method: String,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Result of checking that the projection is the replica homomorphism:
/// class joins agree with subspace joins for every weight, and each fiber
/// admits no proper nonempty wall.
#[derive(Debug, Clone, Serialize)]
pub struct ReplicaProjectiveReport {
    pub modulus: u64,
    pub dimension: usize,
    pub weights: Vec<u64>,
    pub class_count: usize,
    pub replica: FiniteSemilattice,
    pub isomorphic_to_subspace_lattice: bool,
    pub projection_checks: usize,
    pub fibers: Vec<FiberCertificate>,
    pub pass: bool,
    pub witness: Option<String>,
}

pub fn verify_replica_is_projective(
    space: &FiniteVectorSpace,
    weights: &[u64],
) -> Result<ReplicaProjectiveReport> {
    let algebra = coset_algebra(space)?;
    let p = space.modulus();
    let weights: Vec<u64> = if weights.is_empty() {
        (2..p).collect()
    } else {
        weights
            .iter()
            .map(|&k| algebra.check_weight(k))
            .collect::<Result<_>>()?
    };

    let n = algebra.subspaces.len();
    let mut pass = true;
    let mut witness = None;
    let mut projection_checks = 0usize;

    // The class join induced by the operations, which must be constant per
    // fiber pair and equal to the subspace join.
    let mut join = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let expected = algebra
                .subspace_index(&algebra.subspaces[i].join(&algebra.subspaces[j])?)
                .expect("join-closed");
            join[i][j] = expected;
            for &ci in &algebra.fiber(i) {
                for &cj in &algebra.fiber(j) {
                    for &k in &weights {
                        projection_checks += 1;
                        let m = algebra.mean(k, &algebra.cosets[ci], &algebra.cosets[cj])?;
                        let got = algebra
                            .subspace_index(m.subspace())
                            .expect("join-closed");
                        if got != expected && pass {
                            pass = false;
                            witness = Some(format!(
                                "{k}({}, {}) landed in the fiber over {}",
                                algebra.cosets[ci].label(),
                                algebra.cosets[cj].label(),
                                m.subspace().label()
                            ));
                        }
                    }
                }
            }
        }
    }
    let labels: Vec<String> = algebra.subspaces.iter().map(|u| u.label()).collect();
    let replica = FiniteSemilattice::from_join_fn(labels, |i, j| join[i][j])?;
    let lattice = algebra.subspace_lattice()?;
    let isomorphic = replica.is_isomorphic(&lattice);

    // Per-fiber openness certificates.
    let all_k: Vec<u64> = (2..p).collect();
    let mut fibers = Vec::new();
    for (si, u) in algebra.subspaces.iter().enumerate() {
        let members: Vec<&Coset> = algebra.fiber(si).into_iter().map(|i| &algebra.cosets[i]).collect();
        let size = members.len();
        let op = |k: u64, x: usize, y: usize| -> Result<usize> {
            let m = algebra.mean(k, members[x], members[y])?;
            Ok(members
                .iter()
                .position(|c| **c == m)
                .expect("fiber is closed under its own means"))
        };
        let cert = if size <= 12 {
            // Exhaustive wall search: no proper nonempty subset W may
            // satisfy `k(x, y) in W iff x in W and y in W`.
            let mut found: Option<String> = None;
            'masks: for mask in 1..(1u32 << size) - 1 {
                let in_w = |i: usize| mask >> i & 1 == 1;
                for &k in &all_k {
                    for x in 0..size {
                        for y in 0..size {
                            let m = op(k, x, y)?;
                            if in_w(m) != (in_w(x) && in_w(y)) {
                                continue 'masks;
                            }
                        }
                    }
                }
                let names: Vec<String> =
                    (0..size).filter(|&i| in_w(i)).map(|i| members[i].label()).collect();
                found = Some(format!("wall {{{}}}", names.join(", ")));
                break;
            }
            FiberCertificate {
                subspace: u.label(),
                size,
                method: "exhaustive-wall-search".to_string(),
                pass: found.is_none(),
                witness: found,
            }
        } else {
            // Sufficient condition: cancellative, and every element is
            // reachable from every other by a single operation.
            let mut bad: Option<String> = None;
            'cancel: for &k in &all_k {
                for x in 0..size {
                    for y in 0..size {
                        for z in 0..size {
                            if y != z && op(k, x, y)? == op(k, x, z)? {
                                bad = Some(format!(
                                    "{k}({}, {}) = {k}({}, {})",
                                    members[x].label(),
                                    members[y].label(),
                                    members[x].label(),
                                    members[z].label()
                                ));
                                break 'cancel;
                            }
                        }
                    }
                }
            }
            if bad.is_none() {
                'connect: for x in 0..size {
                    for z in 0..size {
                        let reachable = all_k
                            .iter()
                            .any(|&k| (0..size).any(|y| op(k, z, y).map(|m| m == x).unwrap_or(false)));
                        if !reachable {
                            bad = Some(format!(
                                "{} is not an operation image of {}",
                                members[x].label(),
                                members[z].label()
                            ));
                            break 'connect;
                        }
                    }
                }
            }
            FiberCertificate {
                subspace: u.label(),
                size,
                method: "cancellative-connected".to_string(),
                pass: bad.is_none(),
                witness: bad,
            }
        };
        if !cert.pass && pass {
            pass = false;
            witness = Some(format!("fiber over {} has a wall", u.label()));
        }
        fibers.push(cert);
    }

    Ok(ReplicaProjectiveReport {
        modulus: p,
        dimension: space.dimension(),
        weights,
        class_count: n,
        replica,
        isomorphic_to_subspace_lattice: isomorphic,
        projection_checks,
        fibers,
        pass: pass && isomorphic,
        witness,
    })
}

// ===== Verification: the parallelogram operation is derived =====

#[derive(Debug, Clone, Serialize)]
pub struct ParallelogramReport {
    pub modulus: u64,
    pub dimension: usize,
    pub triples_checked: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Exhaustively checks `P(u, v, w) = 2(v, 2⁻¹(u, w))` over all vector
/// triples.
pub fn verify_parallelogram_identity(space: &FiniteVectorSpace) -> Result<ParallelogramReport> {
    check_desk_scale(space.modulus(), space.dimension(), TRIPLE_BOUND)?;
    let f = space.field();
    let two = f.elem_from_u64(2);
    let half = f.inv(&two).expect("2 is invertible in odd characteristic");
    let vectors = space.vectors()?;
    let mut triples_checked = 0usize;
    let mut pass = true;
    let mut witness = None;
    'outer: for u in &vectors {
        for v in &vectors {
            for w in &vectors {
                triples_checked += 1;
                let direct = parallelogram_vec(&f, u, v, w);
                let derived = mean_vec(&f, &two, v, &mean_vec(&f, &half, u, w));
                if direct != derived {
                    pass = false;
                    witness = Some(format!(
                        "P({}, {}, {}) = {} but the derived term gives {}",
                        format_gf_point(u),
                        format_gf_point(v),
                        format_gf_point(w),
                        format_gf_point(&direct),
                        format_gf_point(&derived)
                    ));
                    break 'outer;
                }
            }
        }
    }
    Ok(ParallelogramReport {
        modulus: space.modulus(),
        dimension: space.dimension(),
        triples_checked,
        pass,
        witness,
    })
}

// ===== Subspaces of ℚⁿ and the rational demonstration =====

/// A linear subspace of ℚⁿ in reduced-row-echelon canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct QSubspace {
    ambient_dim: usize,
    basis: Vec<Point>,
}

impl QSubspace {
    pub fn span(ambient_dim: usize, vectors: &[Point]) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: v.len(),
                });
            }
        }
        let rr = rref(&Rationals, vectors.to_vec(), ambient_dim);
        Ok(QSubspace {
            ambient_dim,
            basis: rr.rows,
        })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        QSubspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                (0..ambient_dim)
                    .map(|j| scalar::rat_int(i64::from(i == j)))
                    .collect()
            })
            .collect();
        QSubspace { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn label(&self) -> String {
        let rows: Vec<String> = self.basis.iter().map(|r| format_point(r)).collect();
        format!("span{{{}}}", rows.join(","))
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.len(),
            });
        }
        let rr = rref(&Rationals, self.basis.clone(), self.ambient_dim);
        Ok(in_span(&Rationals, &rr, v))
    }

    pub fn leq(&self, other: &QSubspace) -> Result<bool> {
        for row in &self.basis {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn join(&self, other: &QSubspace) -> Result<QSubspace> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        QSubspace::span(self.ambient_dim, &rows)
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| {
                row.iter()
                    .position(|c| *c != scalar::rat_int(0))
                    .expect("rows are nonzero")
            })
            .collect()
    }

    /// A random member: a small random combination of the basis.
    pub fn sample_member(&self, rng: &mut impl Rng) -> Point {
        let mut v = vec![scalar::rat_int(0); self.ambient_dim];
        for row in &self.basis {
            let c = scalar::rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=3));
            for (vc, rc) in v.iter_mut().zip(row) {
                *vc += c.clone() * rc.clone();
            }
        }
        v
    }
}

/// A coset x + U of a rational subspace, canonicalized like the finite
/// case: pivot coordinates of the representative are cleared.
#[derive(Debug, Clone, PartialEq)]
pub struct QCoset {
    subspace: QSubspace,
    representative: Point,
}

impl QCoset {
    pub fn new(subspace: QSubspace, point: &[Rat]) -> Result<Self> {
        if point.len() != subspace.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: subspace.ambient_dim,
                got: point.len(),
            });
        }
        let mut rep = point.to_vec();
        for (row, pivot) in subspace.basis.iter().zip(subspace.pivots()) {
            let c = rep[pivot].clone();
            for (rc, bc) in rep.iter_mut().zip(row) {
                *rc -= c.clone() * bc.clone();
            }
        }
        Ok(QCoset {
            subspace,
            representative: rep,
        })
    }

    pub fn subspace(&self) -> &QSubspace {
        &self.subspace
    }

    pub fn representative(&self) -> &[Rat] {
        &self.representative
    }

    pub fn label(&self) -> String {
        format!("{}+{}", format_point(&self.representative), self.subspace.label())
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        let diff: Point = v
            .iter()
            .zip(&self.representative)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        self.subspace.contains(&diff)
    }
}

/// A finite join-closed family of subspaces of ℚⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct QSubspaceFamily {
    ambient_dim: usize,
    members: Vec<QSubspace>,
}

impl QSubspaceFamily {
    pub fn new(ambient_dim: usize, members: Vec<QSubspace>) -> Result<Self> {
        if ambient_dim == 0 || ambient_dim > 4 {
            return Err(Error::InvalidInput(format!(
                "ambient dimension must be between 1 and 4, got {ambient_dim}"
            )));
        }
        if members.is_empty() {
            return Err(Error::EmptyCarrier);
        }
        for m in &members {
            if m.ambient_dim != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: m.ambient_dim,
                });
            }
        }
        for (i, m) in members.iter().enumerate() {
            if members[..i].contains(m) {
                return Err(Error::DuplicateElement(m.label()));
            }
        }
        for a in &members {
            for b in &members {
                let j = a.join(b)?;
                if !members.contains(&j) {
                    return Err(Error::MissingJoinInFamily {
                        a: a.label(),
                        b: b.label(),
                        join: j.label(),
                    });
                }
            }
        }
        let mut members = members;
        members.sort_by_key(|m| (m.dim(), m.label()));
        Ok(QSubspaceFamily {
            ambient_dim,
            members,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn members(&self) -> &[QSubspace] {
        &self.members
    }

    pub fn index_of(&self, u: &QSubspace) -> Option<usize> {
        self.members.iter().position(|m| m == u)
    }

    pub fn to_semilattice(&self) -> Result<FiniteSemilattice> {
        let labels: Vec<String> = self.members.iter().map(|m| m.label()).collect();
        let mut join = vec![vec![0usize; labels.len()]; labels.len()];
        for (i, a) in self.members.iter().enumerate() {
            for (j, b) in self.members.iter().enumerate() {
                join[i][j] = self
                    .index_of(&a.join(b)?)
                    .expect("family validated join-closed");
            }
        }
        FiniteSemilattice::from_join_fn(labels, |i, j| join[i][j])
    }
}

#[derive(Serialize, Deserialize)]
struct QSubspaceJson {
    #[serde(with = "crate::scalar::rat_mat")]
    basis: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct QSubspaceFamilyJson {
    ambient_dim: usize,
    subspaces: Vec<QSubspaceJson>,
}

impl Serialize for QSubspaceFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QSubspaceFamilyJson {
            ambient_dim: self.ambient_dim,
            subspaces: self
                .members
                .iter()
                .map(|m| QSubspaceJson {
                    basis: m.basis.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSubspaceFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = QSubspaceFamilyJson::deserialize(d)?;
        let members = raw
            .subspaces
            .into_iter()
            .map(|s| QSubspace::span(raw.ambient_dim, &s.basis))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        QSubspaceFamily::new(raw.ambient_dim, members).map_err(serde::de::Error::custom)
    }
}

/// Result of demonstrating the sum decomposition on a rational family.
#[derive(Debug, Clone, Serialize)]
pub struct QDemoReport {
    pub ambient_dim: usize,
    pub family: Vec<String>,
    pub functorial_chains: usize,
    pub samples: usize,
    pub agreements: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Demonstrates, on sampled cosets of the family's subspaces, that the
/// weighted means act fiberwise: transports along the family order are
/// functorial, and the mean of two cosets is the coset of the join subspace
/// containing all element means.
pub fn rational_coset_demo(
    family: &QSubspaceFamily,
    samples: usize,
    seed: u64,
) -> Result<QDemoReport> {
    family.to_semilattice()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = family.ambient_dim;
    let sample_point = |rng: &mut ChaCha8Rng| -> Point {
        (0..dim)
            .map(|_| scalar::rat(rng.gen_range(-8i64..=8), rng.gen_range(1i64..=4)))
            .collect()
    };

    let mut pass = true;
    let mut witness = None;
    let fail = |pass: &mut bool, witness: &mut Option<String>, w: String| {
        if *pass {
            *pass = false;
            *witness = Some(w);
        }
    };

    // Functoriality of transports x+U_s -> x+U_t on sampled points.
    let mut functorial_chains = 0usize;
    for s in &family.members {
        for t in &family.members {
            if !s.leq(t)? {
                continue;
            }
            for u in &family.members {
                if !t.leq(u)? {
                    continue;
                }
                functorial_chains += 1;
                for _ in 0..3 {
                    let x = sample_point(&mut rng);
                    let base = QCoset::new(s.clone(), &x)?;
                    let two_step =
                        QCoset::new(u.clone(), QCoset::new(t.clone(), base.representative())?.representative())?;
                    let one_step = QCoset::new(u.clone(), base.representative())?;
                    if two_step != one_step {
                        fail(
                            &mut pass,
                            &mut witness,
                            format!(
                                "transports of {} along {} -> {} -> {} disagree",
                                base.label(),
                                s.label(),
                                t.label(),
                                u.label()
                            ),
                        );
                    }
                }
            }
        }
    }

    // Sampled agreement: means of coset elements land in the mean coset of
    // the join subspace, and the canonical coset of the result is the coset
    // of the transported representatives' mean.
    let mut agreements = 0usize;
    for _ in 0..samples {
        let ui = &family.members[rng.gen_range(0..family.members.len())];
        let uj = &family.members[rng.gen_range(0..family.members.len())];
        let join = ui.join(uj)?;
        let x = sample_point(&mut rng);
        let y = sample_point(&mut rng);
        let p = crate::laws::sample_weight(&mut rng);
        let cx = QCoset::new(ui.clone(), &x)?;
        let cy = QCoset::new(uj.clone(), &y)?;
        let expected = QCoset::new(join.clone(), &scalar::weighted_mean(&p, &x, &y)?)?;

        let ex: Point = x
            .iter()
            .zip(ui.sample_member(&mut rng))
            .map(|(a, b)| a.clone() + b)
            .collect();
        let ey: Point = y
            .iter()
            .zip(uj.sample_member(&mut rng))
            .map(|(a, b)| a.clone() + b)
            .collect();
        let m = scalar::weighted_mean(&p, &ex, &ey)?;
        let ok = expected.contains(&m)? && QCoset::new(join.clone(), &m)? == expected;
        if ok {
            agreements += 1;
        } else {
            fail(
                &mut pass,
                &mut witness,
                format!(
                    "{}({}, {}) escaped the coset {}",
                    p,
                    cx.label(),
                    cy.label(),
                    expected.label()
                ),
            );
        }
    }

    Ok(QDemoReport {
        ambient_dim: dim,
        family: family.members.iter().map(|m| m.label()).collect(),
        functorial_chains,
        samples,
        agreements,
        pass: pass && agreements == samples,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, n: usize) -> FiniteVectorSpace {
        FiniteVectorSpace::new(p, n).unwrap()
    }

    #[test]
    fn space_construction_validation() {
        assert!(FiniteVectorSpace::new(2, 1).is_err());
        assert!(FiniteVectorSpace::new(4, 1).is_err());
        assert!(FiniteVectorSpace::new(3, 0).is_err());
        let v = gf(3, 2);
        assert_eq!(v.size().unwrap(), 9);
        assert_eq!(v.vectors().unwrap().len(), 9);
        assert!(v.contains(&[2, 2]));
        assert!(!v.contains(&[3, 0]));
        assert!(matches!(
            FiniteVectorSpace::new(101, 3).unwrap().size(),
            Err(Error::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn parallelogram_examples() {
        let v = gf(5, 1);
        // 1 - 2 + 3 = 2.
        assert_eq!(v.parallelogram(&[1], &[2], &[3]).unwrap(), vec![2]);
        // P(u, u, w) = w for every pair.
        for u in v.vectors().unwrap() {
            for w in v.vectors().unwrap() {
                assert_eq!(v.parallelogram(&u, &u, &w).unwrap(), w);
            }
        }
    }

    #[test]
    fn parallelogram_is_derived_from_the_means() {
        for (p, n, triples) in [(5u64, 1usize, 125usize), (3, 2, 729), (3, 1, 27)] {
            let report = verify_parallelogram_identity(&gf(p, n)).unwrap();
            assert!(report.pass, "{:?}", report.witness);
            assert_eq!(report.triples_checked, triples);
        }
    }

    #[test]
    fn subspace_enumeration_counts() {
        assert_eq!(enumerate_subspaces(&gf(3, 1)).unwrap().len(), 2);
        assert_eq!(enumerate_subspaces(&gf(3, 2)).unwrap().len(), 6);
        assert_eq!(enumerate_subspaces(&gf(5, 2)).unwrap().len(), 8);
        // Lines through the origin: p + 1 of dimension one.
        let by_dim = |list: &[Subspace]| -> Vec<usize> {
            let mut c = vec![0usize; 3];
            for s in list {
                c[s.dim()] += 1;
            }
            c
        };
        assert_eq!(by_dim(&enumerate_subspaces(&gf(3, 2)).unwrap()), vec![1, 4, 1]);
        assert_eq!(by_dim(&enumerate_subspaces(&gf(5, 2)).unwrap()), vec![1, 6, 1]);
    }

    #[test]
    fn subspace_enumeration_matches_brute_force() {
        // Every additively and scalar-closed subset of GF(3)^2, found by
        // scanning all 2^9 subsets, must appear exactly once.
        let space = gf(3, 2);
        let f = space.field();
        let vectors = space.vectors().unwrap();
        let mut brute: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
        for mask in 0u32..1 << 9 {
            let subset: Vec<&Vec<u64>> = vectors
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| v)
                .collect();
            if !subset.contains(&&vec![0, 0]) {
                continue;
            }
            let set: BTreeSet<&Vec<u64>> = subset.iter().copied().collect();
            let closed = subset.iter().all(|a| {
                subset.iter().all(|b| {
                    let sum: Vec<u64> = a.iter().zip(b.iter()).map(|(x, y)| f.add(x, y)).collect();
                    set.contains(&sum)
                })
            }) && subset.iter().all(|a| {
                (0..3).all(|c| {
                    let scaled: Vec<u64> = a.iter().map(|x| f.mul(&c, x)).collect();
                    set.contains(&scaled)
                })
            });
            if closed {
                let members: Vec<Vec<u64>> = subset.into_iter().cloned().collect();
                brute.insert(
                    Subspace::span(space, &members).unwrap().basis().to_vec(),
                );
            }
        }
        let enumerated: BTreeSet<Vec<Vec<u64>>> = enumerate_subspaces(&space)
            .unwrap()
            .into_iter()
            .map(|s| s.basis().to_vec())
            .collect();
        assert_eq!(brute, enumerated);
    }

    #[test]
    fn subspace_joins() {
        let space = gf(3, 2);
        let ex = Subspace::span(space, &[vec![1, 0]]).unwrap();
        let ey = Subspace::span(space, &[vec![0, 1]]).unwrap();
        let full = ex.join(&ey).unwrap();
        assert!(full.is_full());
        assert_eq!(ex.join(&ex).unwrap(), ex);
        // Two distinct diagonals span the plane; the rank oracle below
        // verifies independence directly.
        let d1 = Subspace::span(space, &[vec![1, 1]]).unwrap();
        let d2 = Subspace::span(space, &[vec![1, 2]]).unwrap();
        assert!(d1.join(&d2).unwrap().is_full());
        let rank = rref(&space.field(), vec![vec![1, 1], vec![1, 2]], 2).rank();
        assert_eq!(rank, 2);
        // The enumerated lattice is a valid semilattice with {0} at the
        // bottom and V at the top.
        let algebra = coset_algebra(&space).unwrap();
        let lattice = algebra.subspace_lattice().unwrap();
        assert_eq!(lattice.size(), 6);
        assert_eq!(lattice.label(lattice.top_idx()), full.label());
        for s in algebra.subspaces() {
            assert!(Subspace::zero(space).leq(s).unwrap());
        }
    }

    #[test]
    fn coset_canonicalization() {
        let space = gf(3, 2);
        let line = Subspace::span(space, &[vec![1, 0]]).unwrap();
        let a = Coset::new(line.clone(), &[2, 1]).unwrap();
        let b = Coset::new(line.clone(), &[0, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.representative(), &[0, 1]);
        assert!(a.contains(&[1, 1]).unwrap());
        assert!(!a.contains(&[1, 2]).unwrap());
        assert_eq!(a.elements().len(), 3);
        assert_eq!(a.label(), "(0, 1)+span{(1, 0)}");
    }

    #[test]
    fn coset_algebra_carrier_sizes() {
        let algebra = coset_algebra(&gf(3, 2)).unwrap();
        assert_eq!(algebra.len(), 22);
        assert_eq!(algebra.fiber_sizes(), vec![9, 3, 3, 3, 3, 1]);
        assert_eq!(algebra.validation(), "exhaustive");
        let small = coset_algebra(&gf(5, 1)).unwrap();
        assert_eq!(small.len(), 6);
        assert_eq!(small.fiber_sizes(), vec![5, 1]);
        // |S(V)| = sum over subspaces of p^(n - dim U).
        let total: usize = algebra
            .subspaces()
            .iter()
            .map(|u| 3usize.pow((2 - u.dim()) as u32))
            .sum();
        assert_eq!(total, algebra.len());
    }

    #[test]
    fn point_coset_means_are_pointwise() {
        let space = gf(3, 2);
        let algebra = coset_algebra(&space).unwrap();
        let zero = Subspace::zero(space);
        for x in space.vectors().unwrap() {
            for y in space.vectors().unwrap() {
                let cx = Coset::new(zero.clone(), &x).unwrap();
                let cy = Coset::new(zero.clone(), &y).unwrap();
                let m = algebra.mean(2, &cx, &cy).unwrap();
                assert_eq!(m.subspace().dim(), 0);
                assert_eq!(m.representative(), space.mean(2, &x, &y).unwrap());
            }
        }
    }

    #[test]
    fn parallel_line_coset_means_stay_parallel() {
        let space = gf(3, 2);
        let algebra = coset_algebra(&space).unwrap();
        for (i, a) in algebra.cosets().iter().enumerate() {
            for b in &algebra.cosets()[i..] {
                if a.subspace() != b.subspace() || a.subspace().dim() != 1 {
                    continue;
                }
                let m = algebra.mean(2, a, b).unwrap();
                assert_eq!(m.subspace(), a.subspace());
            }
        }
    }

    #[test]
    fn degenerate_weights_are_rejected() {
        let space = gf(5, 1);
        let algebra = coset_algebra(&space).unwrap();
        let c = Coset::new(Subspace::zero(space), &[3]).unwrap();
        assert!(matches!(
            algebra.mean(0, &c, &c),
            Err(Error::DegenerateFieldWeight { k: 0 })
        ));
        assert!(matches!(
            algebra.mean(6, &c, &c),
            Err(Error::DegenerateFieldWeight { k: 1 })
        ));
    }

    #[test]
    fn projection_examples() {
        let space = gf(3, 2);
        let algebra = coset_algebra(&space).unwrap();
        let point = Coset::new(Subspace::zero(space), &[1, 2]).unwrap();
        assert_eq!(algebra.pi(&point).dim(), 0);
        let full = Coset::new(
            Subspace::span(space, &[vec![1, 0], vec![0, 1]]).unwrap(),
            &[0, 0],
        )
        .unwrap();
        assert!(algebra.pi(&full).is_full());
        // The homomorphism law on every coset pair.
        for a in algebra.cosets() {
            for b in algebra.cosets() {
                let m = algebra.mean(2, a, b).unwrap();
                assert_eq!(
                    *algebra.pi(&m),
                    algebra.pi(a).join(algebra.pi(b)).unwrap()
                );
            }
        }
    }

    #[test]
    fn structure_verification_passes() {
        let report = verify_plonka_structure(&gf(3, 2), 2).unwrap();
        assert!(report.pass, "{:?}", report.witness);
        assert_eq!(report.subspace_count, 6);
        assert_eq!(report.coset_count, 22);
        assert_eq!(report.fiber_sizes, vec![9, 3, 3, 3, 3, 1]);
        assert_eq!(report.pairs_checked, 484);
        assert_eq!(report.projection_pairs, 484);

        let report = verify_plonka_structure(&gf(5, 1), 3).unwrap();
        assert!(report.pass, "{:?}", report.witness);
        assert_eq!(report.coset_count, 6);

        assert!(matches!(
            verify_plonka_structure(&gf(3, 2), 1),
            Err(Error::DegenerateFieldWeight { k: 1 })
        ));
    }

    #[test]
    fn replica_verification_on_the_plane() {
        let report = verify_replica_is_projective(&gf(3, 2), &[]).unwrap();
        assert!(report.pass, "{:?}", report.witness);
        assert_eq!(report.class_count, 6);
        assert!(report.isomorphic_to_subspace_lattice);
        assert_eq!(report.weights, vec![2]);
        assert_eq!(report.fibers.len(), 6);
        for cert in &report.fibers {
            assert!(cert.pass, "{:?}", cert.witness);
            assert_eq!(cert.method, "exhaustive-wall-search");
        }
    }

    #[test]
    fn replica_verification_on_the_line() {
        let report = verify_replica_is_projective(&gf(3, 1), &[2]).unwrap();
        assert!(report.pass);
        assert_eq!(report.class_count, 2);
        assert!(report.isomorphic_to_subspace_lattice);
    }

    #[test]
    fn large_fibers_use_the_cancellativity_certificate() {
        let report = verify_replica_is_projective(&gf(5, 2), &[2, 3]).unwrap();
        assert!(report.pass, "{:?}", report.witness);
        assert_eq!(report.class_count, 8);
        let over_zero = &report.fibers[0];
        assert_eq!(over_zero.size, 25);
        assert_eq!(over_zero.method, "cancellative-connected");
        assert!(report
            .fibers
            .iter()
            .filter(|c| c.size <= 12)
            .all(|c| c.method == "exhaustive-wall-search"));
    }

    #[test]
    fn rational_demo_on_the_plane_family() {
        let family = QSubspaceFamily::new(
            2,
            vec![
                QSubspace::zero(2),
                QSubspace::span(2, &[vec![scalar::rat_int(1), scalar::rat_int(0)]]).unwrap(),
                QSubspace::full(2),
            ],
        )
        .unwrap();
        let report = rational_coset_demo(&family, 120, 7).unwrap();
        assert!(report.pass, "{:?}", report.witness);
        assert_eq!(report.agreements, 120);
        assert_eq!(
            report.family,
            vec!["span{}", "span{(1, 0)}", "span{(1, 0),(0, 1)}"]
        );
        // Determinism under a fixed seed.
        let again = rational_coset_demo(&family, 120, 7).unwrap();
        assert_eq!(serde_json::to_string(&report).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn rational_demo_trivial_family() {
        let family = QSubspaceFamily::new(2, vec![QSubspace::zero(2)]).unwrap();
        let report = rational_coset_demo(&family, 30, 7).unwrap();
        assert!(report.pass);
        assert_eq!(report.functorial_chains, 1);
    }

    #[test]
    fn rational_family_must_be_join_closed() {
        let x_axis = QSubspace::span(2, &[vec![scalar::rat_int(1), scalar::rat_int(0)]]).unwrap();
        let y_axis = QSubspace::span(2, &[vec![scalar::rat_int(0), scalar::rat_int(1)]]).unwrap();
        let err = QSubspaceFamily::new(2, vec![x_axis, y_axis]).unwrap_err();
        match err {
            Error::MissingJoinInFamily { join, .. } => {
                assert_eq!(join, "span{(1, 0),(0, 1)}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn q_coset_canonicalization() {
        let x_axis = QSubspace::span(2, &[vec![scalar::rat_int(1), scalar::rat_int(0)]]).unwrap();
        let a = QCoset::new(x_axis.clone(), &[scalar::rat(7, 2), scalar::rat_int(4)]).unwrap();
        let b = QCoset::new(x_axis.clone(), &[scalar::rat_int(-1), scalar::rat_int(4)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.representative(),
            &[scalar::rat_int(0), scalar::rat_int(4)]
        );
        assert!(a.contains(&[scalar::rat(1, 3), scalar::rat_int(4)]).unwrap());
        assert!(!a.contains(&[scalar::rat_int(0), scalar::rat_int(5)]).unwrap());
    }

    #[test]
    fn family_serde_round_trip() {
        let family = QSubspaceFamily::new(
            2,
            vec![
                QSubspace::zero(2),
                QSubspace::span(2, &[vec![scalar::rat_int(1), scalar::rat_int(0)]]).unwrap(),
                QSubspace::full(2),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&family).unwrap();
        let back: QSubspaceFamily = serde_json::from_str(&json).unwrap();
        assert_eq!(family, back);
        // A non-closed family must fail on read.
        let bad = r#"{"ambient_dim": 2, "subspaces": [
            {"basis": [["1", "0"]]},
            {"basis": [["0", "1"]]}
        ]}"#;
        assert!(serde_json::from_str::<QSubspaceFamily>(bad).is_err());
        // The space spec format.
        let v: FiniteVectorSpace =
            serde_json::from_str(r#"{"modulus": 3, "dimension": 2}"#).unwrap();
        assert_eq!(v, gf(3, 2));
        assert!(serde_json::from_str::<FiniteVectorSpace>(
            r#"{"modulus": 2, "dimension": 2}"#
        )
        .is_err());
    }
}

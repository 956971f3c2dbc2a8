//! Finite join semilattices with fully validated tables.
//!
//! A [`FiniteSemilattice`] is a set of labelled elements with a binary join
//! that is idempotent, commutative, and associative; construction checks all
//! three exhaustively and reports a witness for the first violation. On top
//! of that sit the induced order, covering pairs, Hasse-diagram DOT export,
//! homomorphisms, isomorphism testing, and an exhaustive enumeration of all
//! small semilattices up to isomorphism (used to sweep the law checker over
//! every shape of idempotent model).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite join semilattice over string labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSemilattice {
    elements: Vec<String>,
    index: BTreeMap<String, usize>,
    join: Vec<Vec<usize>>,
}

impl FiniteSemilattice {
    /// Builds a semilattice from explicit join triples `(a, b, a v b)`.
    ///
    /// Every unordered pair (including the diagonal) must be covered; giving
    /// a pair twice with different values, or any axiom violation, is an
    /// error with a witness.
    pub fn from_join_table(
        elements: Vec<String>,
        triples: &[(String, String, String)],
    ) -> Result<Self> {
        let (elements, index) = check_labels(elements)?;
        let n = elements.len();
        let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
        for (a, b, v) in triples {
            let ia = *index
                .get(a)
                .ok_or_else(|| Error::UnknownElement(a.clone()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| Error::UnknownElement(b.clone()))?;
            let iv = *index
                .get(v)
                .ok_or_else(|| Error::UnknownElement(v.clone()))?;
            for (x, y) in [(ia, ib), (ib, ia)] {
                match table[x][y] {
                    None => table[x][y] = Some(iv),
                    Some(old) if old == iv => {}
                    Some(old) => {
                        return Err(Error::JoinTableConflict(
                            a.clone(),
                            b.clone(),
                            elements[old].clone(),
                            elements[iv].clone(),
                        ))
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if table[i][j].is_none() {
                    return Err(Error::JoinTableIncomplete(
                        elements[i].clone(),
                        elements[j].clone(),
                    ));
                }
            }
        }
        let join: Vec<Vec<usize>> = table
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.unwrap()).collect())
            .collect();
        Self::validated(elements, index, join)
    }

    /// Builds a semilattice from a join function on indices (still validated).
    pub fn from_join_fn(
        elements: Vec<String>,
        f: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let (elements, index) = check_labels(elements)?;
        let n = elements.len();
        let join: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        if let Some(bad) = join.iter().flatten().find(|&&v| v >= n) {
            return Err(Error::UnknownElement(format!("index {bad}")));
        }
        Self::validated(elements, index, join)
    }

    fn validated(
        elements: Vec<String>,
        index: BTreeMap<String, usize>,
        join: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = elements.len();
        for i in 0..n {
            if join[i][i] != i {
                return Err(Error::SemilatticeAxiom {
                    axiom: "idempotence".to_string(),
                    witness: format!("{0} v {0} = {1}", elements[i], elements[join[i][i]]),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if join[i][j] != join[j][i] {
                    return Err(Error::SemilatticeAxiom {
                        axiom: "commutativity".to_string(),
                        witness: format!(
                            "{} v {} = {} but {} v {} = {}",
                            elements[i],
                            elements[j],
                            elements[join[i][j]],
                            elements[j],
                            elements[i],
                            elements[join[j][i]]
                        ),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = join[join[i][j]][k];
                    let right = join[i][join[j][k]];
                    if left != right {
                        return Err(Error::SemilatticeAxiom {
                            axiom: "associativity".to_string(),
                            witness: format!(
                                "({} v {}) v {} = {} but {} v ({} v {}) = {}",
                                elements[i],
                                elements[j],
                                elements[k],
                                elements[left],
                                elements[i],
                                elements[j],
                                elements[k],
                                elements[right]
                            ),
                        });
                    }
                }
            }
        }
        Ok(FiniteSemilattice {
            elements,
            index,
            join,
        })
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.elements[idx]
    }

    pub fn join_idx(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn join(&self, a: &str, b: &str) -> Result<&str> {
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        Ok(&self.elements[self.join[ia][ib]])
    }

    /// The induced order: `a <= b` iff `a v b = b`.
    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.join[i][j] == j
    }

    pub fn leq(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.leq_idx(self.index_of(a)?, self.index_of(b)?))
    }

    /// The top element (the join of everything).
    pub fn top_idx(&self) -> usize {
        (1..self.elements.len()).fold(0, |acc, i| self.join[acc][i])
    }

    /// Covering pairs `(i, j)` of the induced order: `i < j` with nothing
    /// strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.elements.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq_idx(i, j) {
                    continue;
                }
                let blocked = (0..n).any(|k| {
                    k != i && k != j && self.leq_idx(i, k) && self.leq_idx(k, j)
                });
                if !blocked {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Hasse diagram in DOT format, deterministic: nodes and cover edges are
    /// sorted by label, edges point upwards (`rankdir=BT`).
    pub fn to_dot(&self) -> String {
        let mut labels: Vec<&str> = self.elements.iter().map(|s| s.as_str()).collect();
        labels.sort_unstable();
        let mut edges: Vec<(String, String)> = self
            .covers()
            .into_iter()
            .map(|(i, j)| (self.elements[i].clone(), self.elements[j].clone()))
            .collect();
        edges.sort();
        let mut out = String::from("digraph semilattice {\n  rankdir=BT;\n");
        for l in labels {
            out.push_str(&format!("  {};\n", dot_quote(l)));
        }
        for (a, b) in edges {
            out.push_str(&format!("  {} -> {};\n", dot_quote(&a), dot_quote(&b)));
        }
        out.push_str("}\n");
        out
    }

    /// Searches for an isomorphism onto `other`; returns the witness mapping
    /// (pairs of labels, in `self`'s element order) if one exists.
    ///
    /// Backtracking over bijections, pruned by the order profile of each
    /// element (sizes of its down-set and up-set), so only
    /// profile-compatible images are ever tried.
    pub fn isomorphism(&self, other: &FiniteSemilattice) -> Option<Vec<(String, String)>> {
        let n = self.size();
        if n != other.size() {
            return None;
        }
        let my_profile = profile(self);
        let their_profile = profile(other);
        {
            let mut a = my_profile.clone();
            let mut b = their_profile.clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return None;
            }
        }
        // Assign elements in a fixed order; try only profile-matching images.
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if !assign(self, other, &my_profile, &their_profile, 0, &mut image, &mut used) {
            return None;
        }
        Some(
            (0..n)
                .map(|i| {
                    (
                        self.elements[i].clone(),
                        other.elements[image[i]].clone(),
                    )
                })
                .collect(),
        )
    }

    pub fn is_isomorphic(&self, other: &FiniteSemilattice) -> bool {
        self.isomorphism(other).is_some()
    }
}

fn check_labels(elements: Vec<String>) -> Result<(Vec<String>, BTreeMap<String, usize>)> {
    if elements.is_empty() {
        return Err(Error::EmptyCarrier);
    }
    let mut index = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.clone(), i).is_some() {
            return Err(Error::DuplicateElement(e.clone()));
        }
    }
    Ok((elements, index))
}

/// `(down-set size, up-set size)` per element — an isomorphism invariant.
fn profile(s: &FiniteSemilattice) -> Vec<(usize, usize)> {
    let n = s.size();
    (0..n)
        .map(|i| {
            let down = (0..n).filter(|&j| s.leq_idx(j, i)).count();
            let up = (0..n).filter(|&j| s.leq_idx(i, j)).count();
            (down, up)
        })
        .collect()
}

fn assign(
    a: &FiniteSemilattice,
    b: &FiniteSemilattice,
    pa: &[(usize, usize)],
    pb: &[(usize, usize)],
    i: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    let n = a.size();
    if i == n {
        // Full verification: the partial checks below already cover every
        // pair, but this keeps correctness independent of pruning details.
        return (0..n).all(|x| {
            (0..n).all(|y| image[a.join_idx(x, y)] == b.join_idx(image[x], image[y]))
        });
    }
    for cand in 0..n {
        if used[cand] || pa[i] != pb[cand] {
            continue;
        }
        image[i] = cand;
        used[cand] = true;
        // Join consistency against everything assigned so far, whenever the
        // join itself is already assigned.
        let ok = (0..=i).all(|j| {
            let ja = a.join_idx(i, j);
            ja > i || image[ja] == b.join_idx(cand, image[j])
        });
        if ok && assign(a, b, pa, pb, i + 1, image, used) {
            return true;
        }
        used[cand] = false;
        image[i] = usize::MAX;
    }
    false
}

fn dot_quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

// ===== Homomorphisms =====

/// A validated join-semilattice homomorphism.
#[derive(Debug, Clone)]
pub struct SemilatticeHom {
    source: FiniteSemilattice,
    target: FiniteSemilattice,
    map: Vec<usize>,
}

impl SemilatticeHom {
    /// Validates `h(a v b) = h(a) v h(b)` exhaustively.
    pub fn new(
        source: FiniteSemilattice,
        target: FiniteSemilattice,
        map: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut idx_map = vec![usize::MAX; source.size()];
        for (i, label) in source.elements().iter().enumerate() {
            let image = map
                .get(label)
                .ok_or_else(|| Error::UnknownElement(label.clone()))?;
            idx_map[i] = target.index_of(image)?;
        }
        for i in 0..source.size() {
            for j in 0..source.size() {
                let lhs = idx_map[source.join_idx(i, j)];
                let rhs = target.join_idx(idx_map[i], idx_map[j]);
                if lhs != rhs {
                    return Err(Error::NotHomomorphism {
                        a: source.elements()[i].clone(),
                        b: source.elements()[j].clone(),
                        lhs: target.elements()[lhs].clone(),
                        rhs: target.elements()[rhs].clone(),
                    });
                }
            }
        }
        Ok(SemilatticeHom {
            source,
            target,
            map: idx_map,
        })
    }

    pub fn source(&self) -> &FiniteSemilattice {
        &self.source
    }

    pub fn target(&self) -> &FiniteSemilattice {
        &self.target
    }

    pub fn apply(&self, label: &str) -> Result<&str> {
        let i = self.source.index_of(label)?;
        Ok(self.target.label(self.map[i]))
    }
}

// ===== Enumeration of small semilattices =====

/// All join semilattices with exactly `n` elements (n <= 5), up to
/// isomorphism, with elements labelled `e0..`.
///
/// Enumerates every strict relation on n points as a bitmask, keeps the
/// partial orders in which every pair has a least upper bound, and dedupes by
/// isomorphism. Sizes grow fast beyond 5, hence the cap.
pub fn enumerate_semilattices(n: usize) -> Result<Vec<FiniteSemilattice>> {
    if n == 0 || n > 5 {
        return Err(Error::InvalidInput(format!(
            "semilattice enumeration supports 1..=5 elements, got {n}"
        )));
    }
    let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let pair_bits = n * (n - 1);
    let pair_index = |i: usize, j: usize| -> usize {
        // position of ordered pair (i, j), i != j
        i * (n - 1) + if j < i { j } else { j - 1 }
    };
    let mut reps: Vec<FiniteSemilattice> = Vec::new();
    'mask: for mask in 0u32..(1u32 << pair_bits) {
        // above[i] = bitset of j with i <= j (reflexive).
        let mut above = vec![0u32; n];
        for i in 0..n {
            above[i] |= 1 << i;
            for j in 0..n {
                if i != j && mask & (1 << pair_index(i, j)) != 0 {
                    if mask & (1 << pair_index(j, i)) != 0 {
                        continue 'mask; // antisymmetry
                    }
                    above[i] |= 1 << j;
                }
            }
        }
        // Transitivity: i <= j forces above[j] within above[i].
        for i in 0..n {
            for j in 0..n {
                if i != j && above[i] & (1 << j) != 0 && above[j] & !above[i] != 0 {
                    continue 'mask;
                }
            }
        }
        // Binary joins must exist: the least element of above[i] & above[j].
        let mut join = vec![vec![0usize; n]; n];
        for i in 0..n {
            join[i][i] = i;
            for j in (i + 1)..n {
                let ub = above[i] & above[j];
                if ub == 0 {
                    continue 'mask;
                }
                let Some(u) = (0..n).find(|&u| ub & (1 << u) != 0 && ub & !above[u] == 0) else {
                    continue 'mask;
                };
                join[i][j] = u;
                join[j][i] = u;
            }
        }
        let cand = FiniteSemilattice::from_join_fn(labels.clone(), |i, j| join[i][j])
            .expect("joins built from a partial order satisfy the axioms");
        if !reps.iter().any(|r| r.is_isomorphic(&cand)) {
            reps.push(cand);
        }
    }
    Ok(reps)
}

// ===== Serde =====

#[derive(Serialize, Deserialize)]
struct SemilatticeJson {
    elements: Vec<String>,
    join: Vec<(String, String, String)>,
}

impl Serialize for FiniteSemilattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut join = Vec::new();
        for i in 0..self.size() {
            for j in i..self.size() {
                join.push((
                    self.elements[i].clone(),
                    self.elements[j].clone(),
                    self.elements[self.join[i][j]].clone(),
                ));
            }
        }
        SemilatticeJson {
            elements: self.elements.clone(),
            join,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteSemilattice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SemilatticeJson::deserialize(d)?;
        FiniteSemilattice::from_join_table(raw.elements, &raw.join)
            .map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for FiniteSemilattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "semilattice{{{}}}", self.elements.join(", "))
    }
}

// ===== Well-known tables used across the crate and its tests =====

/// The two-element chain `bot < top`.
pub fn chain2() -> FiniteSemilattice {
    FiniteSemilattice::from_join_fn(vec!["bot".into(), "top".into()], |i, j| i.max(j))
        .expect("chain is a semilattice")
}

/// Three elements a, b, c with a v b = c: the image of a segment's endpoint /
/// endpoint / interior classifier.
pub fn vee3() -> FiniteSemilattice {
    let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
    FiniteSemilattice::from_join_fn(labels, |i, j| if i == j { i } else { 2 })
        .expect("vee is a semilattice")
}

/// Five elements with covers a<c, b<c, c<e, d<e — the replica shape of the
/// two-branch interval algebra.
pub fn five_element_replica() -> FiniteSemilattice {
    let labels: Vec<String> = ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect();
    // order: a,b < c < e and d < e
    let leq = |i: usize, j: usize| -> bool {
        i == j || (i <= 1 && (j == 2 || j == 4)) || (i == 2 && j == 4) || (i == 3 && j == 4)
    };
    FiniteSemilattice::from_join_fn(labels, |i, j| {
        (0..5)
            .find(|&u| leq(i, u) && leq(j, u) && (0..5).all(|v| !(leq(i, v) && leq(j, v)) || leq(u, v)))
            .expect("joins exist")
    })
    .expect("five-element table is a semilattice")
}

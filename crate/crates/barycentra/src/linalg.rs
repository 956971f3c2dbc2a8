//! Exact linear algebra over a field context, and an exact simplex pivoter
//! over Q.
//!
//! The row-echelon machinery is generic over [`Field`], so the same code
//! canonicalizes rational direction spaces and GF(p) subspaces. The simplex
//! part is specific to Q — it needs an ordered field — and answers the two
//! questions the convex module keeps asking: *is this point a convex
//! combination of those points*, and *how large can one coefficient be*.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::Rat;

// ===== Reduced row echelon form =====

/// A matrix in reduced row echelon form: only the nonzero rows, each starting
/// with a 1 in its pivot column, with zeros above and below every pivot.
/// RREF is unique, so equal row spaces give equal `Rref` values.
#[derive(Debug, Clone, PartialEq)]
pub struct Rref<E> {
    pub rows: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl<E> Rref<E> {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Gauss-Jordan elimination; returns the canonical form of the row space.
pub fn rref<F: Field>(f: &F, rows: Vec<Vec<F::Elem>>, cols: usize) -> Rref<F::Elem> {
    debug_assert!(rows.iter().all(|r| r.len() == cols));
    let mut rows = rows;
    let mut pivots = Vec::new();
    let mut next = 0usize;
    for c in 0..cols {
        let Some(pr) = (next..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(next, pr);
        let inv = f.inv(&rows[next][c]).expect("pivot entry is nonzero");
        for j in 0..cols {
            rows[next][j] = f.mul(&rows[next][j], &inv);
        }
        for i in 0..rows.len() {
            if i != next && !f.is_zero(&rows[i][c]) {
                let factor = rows[i][c].clone();
                for j in 0..cols {
                    let t = f.mul(&factor, &rows[next][j]);
                    rows[i][j] = f.sub(&rows[i][j], &t);
                }
            }
        }
        pivots.push(c);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    Rref { rows, pivots, cols }
}

/// Subtracts the unique combination of the RREF rows that clears `v`'s pivot
/// coordinates; the remainder is zero exactly when `v` lies in the row space.
pub fn reduce<F: Field>(f: &F, rr: &Rref<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    reduce_with_coeffs(f, rr, v).1
}

/// Like [`reduce`], also returning the coefficient of each RREF row used.
pub fn reduce_with_coeffs<F: Field>(
    f: &F,
    rr: &Rref<F::Elem>,
    v: &[F::Elem],
) -> (Vec<F::Elem>, Vec<F::Elem>) {
    debug_assert_eq!(v.len(), rr.cols);
    let mut v = v.to_vec();
    let mut coeffs = Vec::with_capacity(rr.rows.len());
    for (row, &p) in rr.rows.iter().zip(&rr.pivots) {
        let factor = v[p].clone();
        if !f.is_zero(&factor) {
            for j in 0..v.len() {
                let t = f.mul(&factor, &row[j]);
                v[j] = f.sub(&v[j], &t);
            }
        }
        coeffs.push(factor);
    }
    (coeffs, v)
}

/// Does `v` lie in the row space of `rr`?
pub fn in_span<F: Field>(f: &F, rr: &Rref<F::Elem>, v: &[F::Elem]) -> bool {
    reduce(f, rr, v).iter().all(|e| f.is_zero(e))
}

/// A basis of the null space `{x : M x = 0}` of the row matrix `rows`,
/// one vector per free column, in ascending column order.
pub fn kernel_basis<F: Field>(
    f: &F,
    rows: &[Vec<F::Elem>],
    cols: usize,
) -> Vec<Vec<F::Elem>> {
    let rr = rref(f, rows.to_vec(), cols);
    let pivot_set: BTreeSet<usize> = rr.pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for fc in 0..cols {
        if pivot_set.contains(&fc) {
            continue;
        }
        let mut v = vec![f.zero(); cols];
        v[fc] = f.one();
        for (row, &p) in rr.rows.iter().zip(&rr.pivots) {
            v[p] = f.neg(&row[fc]);
        }
        basis.push(v);
    }
    basis
}

// ===== Exact simplex over Q =====

/// Is `target` a convex combination of `points`?
///
/// Exact phase-1 simplex on `sum l_i p_i = target, sum l_i = 1, l >= 0`.
pub fn feasible_combination(points: &[Vec<Rat>], target: &[Rat]) -> bool {
    match Tableau::phase1(points, target) {
        Some(t) => t.feasible,
        None => false,
    }
}

/// The largest feasible coefficient of `points[idx]` over all convex
/// representations of `target`, or `None` when `target` is not in the hull.
pub fn max_barycentric_coord(points: &[Vec<Rat>], target: &[Rat], idx: usize) -> Option<Rat> {
    assert!(idx < points.len());
    let mut t = Tableau::phase1(points, target)?;
    if !t.feasible {
        return None;
    }
    t.drop_artificials();
    let mut c = vec![Rat::zero(); t.nvars];
    c[idx] = Rat::one();
    Some(t.maximize(&c))
}

/// Dense exact simplex tableau with Bland's anti-cycling rule.
///
/// Row convention: each constraint row ends with its right-hand side; the
/// objective row `obj` represents the equation `z + sum obj[j] x_j = obj[last]`,
/// so at a basic solution the objective value is `obj[last]` and a column may
/// enter whenever its entry is negative.
struct Tableau {
    rows: Vec<Vec<Rat>>,
    obj: Vec<Rat>,
    basis: Vec<usize>,
    ncols: usize, // variables currently in the tableau (excluding rhs)
    nvars: usize, // original variables (prefix of the columns)
    feasible: bool,
}

impl Tableau {
    /// Sets up `sum l_i points[i] = target, sum l_i = 1` with artificial
    /// variables and runs phase 1. Returns `None` only for shape mismatches
    /// (which callers rule out).
    fn phase1(points: &[Vec<Rat>], target: &[Rat]) -> Option<Tableau> {
        let dim = target.len();
        if points.iter().any(|p| p.len() != dim) {
            return None;
        }
        let nvars = points.len();
        let m = dim + 1;
        let ncols = nvars + m;
        let mut rows = Vec::with_capacity(m);
        for d in 0..=dim {
            let mut row = Vec::with_capacity(ncols + 1);
            for p in points {
                row.push(if d < dim { p[d].clone() } else { Rat::one() });
            }
            row.extend(std::iter::repeat_with(Rat::zero).take(m));
            row.push(if d < dim { target[d].clone() } else { Rat::one() });
            rows.push(row);
        }
        // Make the right-hand sides nonnegative, then give each row its
        // artificial basic variable.
        for (i, row) in rows.iter_mut().enumerate() {
            if row[ncols].is_negative() {
                for e in row.iter_mut() {
                    *e = -std::mem::take(e);
                }
            }
            row[nvars + i] = Rat::one();
        }
        let basis: Vec<usize> = (nvars..nvars + m).collect();

        // Objective: maximize -(sum of artificials). In row form that starts
        // as obj[artificial] = 1, and canonicalizing against the basic rows
        // subtracts every constraint row once.
        let mut obj = vec![Rat::zero(); ncols + 1];
        for j in nvars..ncols {
            obj[j] = Rat::one();
        }
        let mut t = Tableau {
            rows,
            obj,
            basis,
            ncols,
            nvars,
            feasible: false,
        };
        for i in 0..t.rows.len() {
            t.subtract_row_from_obj(i);
        }
        t.run();
        t.feasible = t.obj[t.ncols].is_zero();
        Some(t)
    }

    fn subtract_row_from_obj(&mut self, i: usize) {
        for j in 0..=self.ncols {
            let v = &self.rows[i][j];
            if !v.is_zero() {
                self.obj[j] = &self.obj[j] - v;
            }
        }
    }

    /// Bland's rule: entering column is the smallest negative-cost index,
    /// leaving row the minimum ratio with the smallest basis index.
    fn run(&mut self) {
        loop {
            let Some(enter) = (0..self.ncols).find(|&j| self.obj[j].is_negative()) else {
                return;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let coef = &self.rows[i][enter];
                if coef.is_positive() {
                    let ratio = &self.rows[i][self.ncols] / coef;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((li, _)) = leave else {
                // Unbounded: cannot occur for the bounded problems built
                // here (coefficients are confined to a simplex), but stop
                // rather than loop if it ever does.
                debug_assert!(false, "unbounded simplex problem");
                return;
            };
            self.pivot(li, enter);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone().recip();
        for e in self.rows[row].iter_mut() {
            if !e.is_zero() {
                *e = &*e * &inv;
            }
        }
        for i in 0..self.rows.len() {
            if i != row && !self.rows[i][col].is_zero() {
                let factor = self.rows[i][col].clone();
                for j in 0..=self.ncols {
                    let t = &factor * &self.rows[row][j];
                    self.rows[i][j] = &self.rows[i][j] - &t;
                }
            }
        }
        if !self.obj[col].is_zero() {
            let factor = self.obj[col].clone();
            for j in 0..=self.ncols {
                let t = &factor * &self.rows[row][j];
                self.obj[j] = &self.obj[j] - &t;
            }
        }
        self.basis[row] = col;
    }

    /// After a feasible phase 1: pivot artificial variables out of the basis
    /// (or drop redundant rows) and cut the artificial columns off.
    fn drop_artificials(&mut self) {
        let nvars = self.nvars;
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= nvars {
                // Basic artificial at value zero; replace it by any real
                // variable with a nonzero entry, else the row is redundant.
                debug_assert!(self.rows[i][self.ncols].is_zero());
                if let Some(j) = (0..nvars).find(|&j| !self.rows[i][j].is_zero()) {
                    self.pivot(i, j);
                } else {
                    self.rows.remove(i);
                    self.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
        for row in &mut self.rows {
            let rhs = row.pop().expect("row has rhs");
            row.truncate(nvars);
            row.push(rhs);
        }
        let rhs = self.obj.pop().expect("obj has rhs");
        self.obj.truncate(nvars);
        self.obj.push(rhs);
        self.ncols = nvars;
    }

    /// Phase 2 for `maximize c.x` from the current basic feasible point.
    fn maximize(&mut self, c: &[Rat]) -> Rat {
        debug_assert_eq!(c.len(), self.ncols);
        self.obj = c.iter().map(|v| -v.clone()).collect();
        self.obj.push(Rat::zero());
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if !self.obj[b].is_zero() {
                let factor = self.obj[b].clone();
                for j in 0..=self.ncols {
                    let t = &factor * &self.rows[i][j];
                    self.obj[j] = &self.obj[j] - &t;
                }
            }
        }
        self.run();
        self.obj[self.ncols].clone()
    }
}

/// Guard for sizes where exhaustive enumeration is sensible.
pub fn check_desk_scale(modulus: u64, dim: usize, bound: u64) -> Result<u64> {
    let mut size: u64 = 1;
    for _ in 0..dim {
        size = size.saturating_mul(modulus);
        if size > bound {
            return Err(Error::SpaceTooLarge {
                modulus,
                dim,
                size,
                bound,
            });
        }
    }
    Ok(size)
}

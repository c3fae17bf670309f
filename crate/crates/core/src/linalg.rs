//! Dense row-echelon linear algebra over a finite field.

use std::sync::Arc;

use thiserror::Error;

use crate::gf::{Elt, Gf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("vector has length {got}, expected {want}")]
    DimensionMismatch { got: usize, want: usize },
}

/// A subspace of `F^n` stored as its reduced row-echelon basis
/// (leftmost pivots, pivot entries 1, rows sorted by pivot).
#[derive(Clone)]
pub struct Subspace {
    gf: Arc<Gf>,
    n: usize,
    rows: Vec<Vec<Elt>>,
    pivots: Vec<usize>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} in {:?}^{})", self.dim(), self.gf, self.n)
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Subspace) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}
impl Eq for Subspace {}

impl Subspace {
    pub fn zero(gf: Arc<Gf>, n: usize) -> Subspace {
        Subspace { gf, n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(gf: Arc<Gf>, n: usize) -> Subspace {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0; n];
                r[i] = 1;
                r
            })
            .collect();
        Subspace { gf, n, rows, pivots: (0..n).collect() }
    }

    pub fn span(gf: Arc<Gf>, n: usize, vectors: impl IntoIterator<Item = Vec<Elt>>) -> Subspace {
        let mut s = Subspace::zero(gf, n);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn gf(&self) -> &Arc<Gf> {
        &self.gf
    }
    pub fn ambient(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn rows(&self) -> &[Vec<Elt>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` modulo the subspace in place; the result vanishes on
    /// every pivot column.
    pub fn reduce(&self, v: &mut [Elt]) {
        let gf = &*self.gf;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                gf.axpy(&mut v[piv..], gf.neg(c), &row[piv..]);
            }
        }
    }

    /// Adds `v` to the span; returns the new normalized row if the
    /// dimension grew.
    pub fn insert(&mut self, mut v: Vec<Elt>) -> Option<Vec<Elt>> {
        debug_assert_eq!(v.len(), self.n);
        self.reduce(&mut v);
        let l = v.iter().position(|&x| x != 0)?;
        let gf = &*self.gf;
        let inv = gf.inv(v[l]).expect("nonzero pivot");
        gf.scale(&mut v[l..], inv);
        for row in self.rows.iter_mut() {
            let c = row[l];
            if c != 0 {
                gf.axpy(&mut row[l..], gf.neg(c), &v[l..]);
            }
        }
        let pos = self.pivots.partition_point(|&p| p < l);
        self.rows.insert(pos, v.clone());
        self.pivots.insert(pos, l);
        Some(v)
    }

    pub fn contains_vec(&self, v: &[Elt]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains_vec(r))
    }

    fn check(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::AmbientMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other)?;
        let (mut big, small) = if self.dim() >= other.dim() { (self.clone(), other) } else { (other.clone(), self) };
        for r in &small.rows {
            big.insert(r.clone());
        }
        Ok(big)
    }

    /// Zassenhaus: echelonize `[a | a]` and `[b | 0]`; rows with zero left
    /// half span the intersection.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other)?;
        let n = self.n;
        let mut z = Subspace::zero(self.gf.clone(), 2 * n);
        for a in &self.rows {
            let mut v = a.clone();
            v.extend_from_slice(a);
            z.insert(v);
        }
        for b in &other.rows {
            let mut v = b.clone();
            v.resize(2 * n, 0);
            z.insert(v);
        }
        Ok(Subspace::span(
            self.gf.clone(),
            n,
            z.rows
                .iter()
                .zip(&z.pivots)
                .filter(|&(_, &p)| p >= n)
                .map(|(r, _)| r[n..].to_vec()),
        ))
    }

    /// `dim(self + other) - dim(other)`.
    pub fn quotient_dim(&self, other: &Subspace) -> Result<usize, LinalgError> {
        Ok(self.sum(other)?.dim() - other.dim())
    }
}

/// Basis of `{c : sum_i c_i rows_i = 0}`.
pub fn left_kernel(gf: &Arc<Gf>, n: usize, rows: &[Vec<Elt>]) -> Vec<Vec<Elt>> {
    let k = rows.len();
    let mut z = Subspace::zero(gf.clone(), n + k);
    for (i, r) in rows.iter().enumerate() {
        let mut v = r.clone();
        v.resize(n + k, 0);
        v[n + i] = 1;
        z.insert(v);
    }
    z.rows
        .iter()
        .zip(&z.pivots)
        .filter(|&(_, &p)| p >= n)
        .map(|(r, _)| r[n..].to_vec())
        .collect()
}

/// Characteristic polynomial `det(x - A)`, coefficients from degree 0 up,
/// via reduction to upper Hessenberg form.
pub fn char_poly(gf: &Arc<Gf>, a: &[Vec<Elt>]) -> Vec<Elt> {
    let n = a.len();
    let mut h: Vec<Vec<Elt>> = a.to_vec();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else { continue };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = gf.inv(h[j + 1][j]).expect("nonzero pivot");
        for i in j + 2..n {
            let u = gf.mul(h[i][j], inv);
            if u == 0 {
                continue;
            }
            let (top, bottom) = h.split_at_mut(i);
            gf.axpy(&mut bottom[0], gf.neg(u), &top[j + 1]);
            for row in h.iter_mut() {
                row[j + 1] = gf.add(row[j + 1], gf.mul(u, row[i]));
            }
        }
    }
    // polys[m] = det(x - H[..m, ..m]).
    let mut polys: Vec<Vec<Elt>> = vec![vec![1]];
    for m in 0..n {
        let prev = &polys[m];
        let mut next = vec![0; m + 2];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = gf.add(next[d + 1], c);
            next[d] = gf.sub(next[d], gf.mul(h[m][m], c));
        }
        let mut sub = 1;
        for i in (0..m).rev() {
            sub = gf.mul(sub, h[i + 1][i]);
            let coef = gf.mul(h[i][m], sub);
            if coef != 0 {
                for (d, &c) in polys[i].iter().enumerate() {
                    next[d] = gf.sub(next[d], gf.mul(coef, c));
                }
            }
        }
        polys.push(next);
    }
    polys.pop().expect("nonempty")
}

/// Multiplicity of `lambda` as a root of `poly` (coefficients from degree 0).
pub fn root_multiplicity(gf: &Arc<Gf>, poly: &[Elt], lambda: Elt) -> usize {
    let mut cur = poly.to_vec();
    let mut mult = 0;
    while cur.len() > 1 {
        // Synthetic division by (x - lambda).
        let mut quot = vec![0; cur.len() - 1];
        let mut carry = 0;
        for d in (0..cur.len()).rev() {
            let v = gf.add(cur[d], gf.mul(carry, lambda));
            if d == 0 {
                if v != 0 {
                    return mult;
                }
            } else {
                quot[d - 1] = v;
                carry = v;
            }
        }
        mult += 1;
        cur = quot;
    }
    mult
}

pub fn rank(gf: &Arc<Gf>, n: usize, rows: impl IntoIterator<Item = Vec<Elt>>) -> usize {
    Subspace::span(gf.clone(), n, rows).dim()
}

/// Solves `A x = b` for a sparse system given as `(column, coefficient)`
/// rows; returns one solution (free variables zero) or `None`.
pub fn solve_sparse(
    gf: &Arc<Gf>,
    nvars: usize,
    equations: impl IntoIterator<Item = (Vec<(usize, Elt)>, Elt)>,
) -> Option<Vec<Elt>> {
    let mut z = Subspace::zero(gf.clone(), nvars + 1);
    for (terms, rhs) in equations {
        let mut v = vec![0; nvars + 1];
        for (c, a) in terms {
            v[c] = gf.add(v[c], a);
        }
        v[nvars] = rhs;
        z.insert(v);
    }
    if z.pivots.last() == Some(&nvars) {
        return None;
    }
    let mut x = vec![0; nvars];
    for (r, &p) in z.rows.iter().zip(&z.pivots) {
        x[p] = r[nvars];
    }
    Some(x)
}

/// A subspace of a graded ambient space that is the direct sum of its
/// homogeneous pieces, stored one echelon basis per degree.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedSubspace {
    parts: Vec<Subspace>,
}

impl std::fmt::Debug for GradedSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GradedSubspace(dim {})", self.dim())
    }
}

impl GradedSubspace {
    pub fn zero(gf: &Arc<Gf>, sizes: &[usize]) -> GradedSubspace {
        GradedSubspace { parts: sizes.iter().map(|&n| Subspace::zero(gf.clone(), n)).collect() }
    }

    pub fn full(gf: &Arc<Gf>, sizes: &[usize]) -> GradedSubspace {
        GradedSubspace { parts: sizes.iter().map(|&n| Subspace::full(gf.clone(), n)).collect() }
    }

    pub fn parts(&self) -> &[Subspace] {
        &self.parts
    }
    pub fn part(&self, c: usize) -> &Subspace {
        &self.parts[c]
    }
    pub fn dim(&self) -> usize {
        self.parts.iter().map(Subspace::dim).sum()
    }

    pub fn insert(&mut self, class: usize, v: Vec<Elt>) -> Option<Vec<Elt>> {
        self.parts[class].insert(v)
    }

    fn zip_with(
        &self,
        other: &GradedSubspace,
        op: impl Fn(&Subspace, &Subspace) -> Result<Subspace, LinalgError>,
    ) -> Result<GradedSubspace, LinalgError> {
        if self.parts.len() != other.parts.len() {
            return Err(LinalgError::AmbientMismatch(self.parts.len(), other.parts.len()));
        }
        let parts = self.parts.iter().zip(&other.parts).map(|(a, b)| op(a, b)).collect::<Result<_, _>>()?;
        Ok(GradedSubspace { parts })
    }

    pub fn sum(&self, other: &GradedSubspace) -> Result<GradedSubspace, LinalgError> {
        self.zip_with(other, Subspace::sum)
    }

    pub fn intersect(&self, other: &GradedSubspace) -> Result<GradedSubspace, LinalgError> {
        self.zip_with(other, Subspace::intersect)
    }

    pub fn contains(&self, other: &GradedSubspace) -> bool {
        self.parts.len() == other.parts.len() && self.parts.iter().zip(&other.parts).all(|(a, b)| a.contains(b))
    }

    pub fn quotient_dim(&self, other: &GradedSubspace) -> Result<usize, LinalgError> {
        Ok(self.sum(other)?.dim() - other.dim())
    }
}

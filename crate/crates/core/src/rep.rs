//! Spaces of multi-homogeneous polynomials with their GL2(F_q)-action.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::gf::{Elt, FieldSpec};
use crate::group::{generators, GroupElement};
use crate::linalg::{GradedSubspace, Subspace};

pub const AMBIENT_CAP: usize = 4096;
pub const TENSOR_CAP: usize = 20000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("vector has length {got}, expected {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
    #[error("bound violated: {0}")]
    BoundViolated(String),
    #[error("subspace is not stable under the group")]
    NotStable,
}

/// One tensor factor `Sym^deg` precomposed with the Frobenius power `frob`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub deg: u32,
    pub frob: u32,
}

/// A tensor product of Frobenius-twisted symmetric powers, times `det^det`.
///
/// Basis vectors are monomials `prod x_b^{a_b} y_b^{deg_b - a_b}`, indexed
/// in mixed radix with block 0 the slowest digit. The space is graded by
/// the torus weight `sum a_b p^{frob_b} mod (q - 1)`.
pub struct RepSpace {
    field: Arc<FieldSpec>,
    blocks: Vec<Block>,
    det: u64,
    strides: Vec<usize>,
    dim: usize,
    class_of: Vec<u32>,
    local: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl std::fmt::Debug for RepSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RepSpace({:?}, det^{})", self.blocks, self.det)
    }
}

impl RepSpace {
    pub fn new(field: Arc<FieldSpec>, blocks: Vec<Block>, det: u64, cap: usize) -> Result<RepSpace, ModuleError> {
        let dim = blocks.iter().try_fold(1usize, |acc, b| acc.checked_mul(b.deg as usize + 1));
        let dim = match dim {
            Some(d) if d <= cap => d,
            other => return Err(ModuleError::DimensionOverflow { dim: other.unwrap_or(usize::MAX), cap }),
        };
        let mut strides = vec![1usize; blocks.len()];
        for b in (0..blocks.len().saturating_sub(1)).rev() {
            strides[b] = strides[b + 1] * (blocks[b + 1].deg as usize + 1);
        }
        let nclasses = (field.q() - 1).max(1) as usize;
        let p = field.p as u64;
        let mut space = RepSpace {
            field,
            blocks,
            det,
            strides,
            dim,
            class_of: Vec::with_capacity(dim),
            local: Vec::with_capacity(dim),
            members: vec![Vec::new(); nclasses],
        };
        for idx in 0..dim {
            let x: u64 = space
                .exponents(idx)
                .iter()
                .zip(&space.blocks)
                .map(|(&a, b)| a as u64 * p.pow(b.frob))
                .sum();
            let c = (x % nclasses as u64) as usize;
            space.class_of.push(c as u32);
            space.local.push(space.members[c].len() as u32);
            space.members[c].push(idx as u32);
        }
        Ok(space)
    }

    /// `V_r = (r_0, ..., r_{f-1})`.
    pub fn weight(field: &Arc<FieldSpec>, r: &[u32]) -> Result<RepSpace, ModuleError> {
        if r.len() != field.f as usize {
            return Err(ModuleError::DegreeMismatch(format!("need {} degrees, got {}", field.f, r.len())));
        }
        let blocks = r.iter().enumerate().map(|(i, &d)| Block { deg: d, frob: i as u32 }).collect();
        RepSpace::new(field.clone(), blocks, 0, AMBIENT_CAP)
    }

    /// `m^(1) ⊗ m^(2) ⊗ ... ⊗ det^det` for weight tuples `m^(k)`.
    pub fn tensor(field: &Arc<FieldSpec>, factors: &[&[u32]], det: u64) -> Result<RepSpace, ModuleError> {
        let mut blocks = Vec::new();
        for m in factors {
            if m.len() != field.f as usize {
                return Err(ModuleError::DegreeMismatch(format!("need {} degrees, got {}", field.f, m.len())));
            }
            blocks.extend(m.iter().enumerate().map(|(i, &d)| Block { deg: d, frob: i as u32 }));
        }
        RepSpace::new(field.clone(), blocks, det, TENSOR_CAP)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
    pub fn degrees(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.deg).collect()
    }
    pub fn det(&self) -> u64 {
        self.det
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn nclasses(&self) -> usize {
        self.members.len()
    }
    pub fn class_sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }
    pub fn class_of(&self, idx: usize) -> usize {
        self.class_of[idx] as usize
    }
    pub fn local(&self, idx: usize) -> usize {
        self.local[idx] as usize
    }
    pub fn members(&self, class: usize) -> &[u32] {
        &self.members[class]
    }

    /// x-exponents of basis vector `idx`.
    pub fn exponents(&self, idx: usize) -> Vec<u32> {
        self.blocks
            .iter()
            .zip(&self.strides)
            .map(|(b, &s)| ((idx / s) % (b.deg as usize + 1)) as u32)
            .collect()
    }

    pub fn index(&self, exps: &[u32]) -> usize {
        exps.iter().zip(&self.strides).map(|(&a, &s)| a as usize * s).sum()
    }

    /// Integer torus weight `sum a_b p^{frob_b}` of a basis vector.
    pub fn x_weight(&self, idx: usize) -> u64 {
        let p = self.field.p as u64;
        self.exponents(idx).iter().zip(&self.blocks).map(|(&a, b)| a as u64 * p.pow(b.frob)).sum()
    }

    /// `sum deg_b p^{frob_b}`: the total torus weight `X + Y` of every monomial.
    pub fn total_weight(&self) -> u64 {
        let p = self.field.p as u64;
        self.blocks.iter().map(|b| b.deg as u64 * p.pow(b.frob)).sum()
    }

    pub fn zero_subspace(&self) -> GradedSubspace {
        GradedSubspace::zero(self.field.fq(), &self.class_sizes())
    }

    pub fn full_subspace(&self) -> GradedSubspace {
        GradedSubspace::full(self.field.fq(), &self.class_sizes())
    }

    pub fn to_global(&self, class: usize, v: &[Elt]) -> Vec<Elt> {
        let mut out = vec![0; self.dim];
        for (&idx, &x) in self.members[class].iter().zip(v) {
            out[idx as usize] = x;
        }
        out
    }

    /// Nonzero homogeneous components of `v`.
    pub fn components(&self, v: &[Elt]) -> Vec<(usize, Vec<Elt>)> {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(c, mem)| {
                let w: Vec<Elt> = mem.iter().map(|&i| v[i as usize]).collect();
                w.iter().any(|&x| x != 0).then_some((c, w))
            })
            .collect()
    }

    /// Adds every homogeneous component of `v` to `s`.
    pub fn insert_graded(&self, s: &mut GradedSubspace, v: &[Elt]) -> bool {
        let mut grew = false;
        for (c, w) in self.components(v) {
            grew |= s.insert(c, w).is_some();
        }
        grew
    }

    pub fn contains_graded(&self, s: &GradedSubspace, v: &[Elt]) -> bool {
        self.components(v).iter().all(|(c, w)| s.part(*c).contains_vec(w))
    }

    /// Matrix of `g` on block `b`: column `k` holds the coefficients of
    /// `(a'x + c'y)^k (b'x + d'y)^{deg-k}` with `a' = a^{p^frob}`.
    pub fn block_matrix(&self, g: &GroupElement, b: usize) -> Vec<Vec<Elt>> {
        let k = self.field.fq();
        let Block { deg, frob } = self.blocks[b];
        let fr = |x: Elt| k.frob(x, frob);
        let (a, bb, c, d) = (fr(g.a), fr(g.b), fr(g.c), fr(g.d));
        let n = deg as usize;
        // pow_u[k] = (a x + c y)^k, pow_w[k] = (b x + d y)^k as x-power coefficient lists.
        let powers = |s: Elt, t: Elt| {
            let mut out = vec![vec![1 as Elt]];
            for i in 0..n {
                let prev = &out[i];
                let mut next = vec![0 as Elt; i + 2];
                for (j, &coef) in prev.iter().enumerate() {
                    next[j + 1] = k.add(next[j + 1], k.mul(coef, s));
                    next[j] = k.add(next[j], k.mul(coef, t));
                }
                out.push(next);
            }
            out
        };
        let pu = powers(a, c);
        let pw = powers(bb, d);
        let mut m = vec![vec![0 as Elt; n + 1]; n + 1];
        for col in 0..=n {
            let (u, w) = (&pu[col], &pw[n - col]);
            for (i, &x) in u.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in w.iter().enumerate() {
                    m[i + j][col] = k.add(m[i + j][col], k.mul(x, y));
                }
            }
        }
        m
    }

    /// Precomputes everything needed to apply `g` repeatedly.
    pub fn action(&self, g: &GroupElement) -> Result<Action<'_>, ModuleError> {
        let det = g.det(&self.field);
        if det == 0 {
            return Err(ModuleError::SingularMatrix);
        }
        let mats = (0..self.blocks.len()).map(|b| self.block_matrix(g, b)).collect();
        let scalar = self.field.fq().pow(det, self.det);
        Ok(Action { space: self, mats, scalar })
    }

    pub fn act(&self, g: &GroupElement, v: &[Elt]) -> Result<Vec<Elt>, ModuleError> {
        self.action(g)?.apply(v)
    }

    /// The full `dim x dim` matrix of `g` (columns are images of basis vectors).
    pub fn dense_matrix(&self, g: &GroupElement) -> Result<Vec<Vec<Elt>>, ModuleError> {
        let act = self.action(g)?;
        let mut m = vec![vec![0; self.dim]; self.dim];
        for col in 0..self.dim {
            let mut e = vec![0; self.dim];
            e[col] = 1;
            for (row, x) in act.apply(&e)?.into_iter().enumerate() {
                m[row][col] = x;
            }
        }
        Ok(m)
    }

    /// Smallest subspace containing `vectors` and stable under the three
    /// generators, hence under the whole group.
    pub fn spin(&self, vectors: &[Vec<Elt>]) -> Result<GradedSubspace, ModuleError> {
        let gens = generators(&self.field);
        let acts: Vec<Action> = gens.iter().map(|g| self.action(g)).collect::<Result<_, _>>()?;
        let mut s = self.zero_subspace();
        let mut queue = Vec::new();
        for v in vectors {
            if v.len() != self.dim {
                return Err(ModuleError::DimensionMismatch { got: v.len(), want: self.dim });
            }
            for (c, w) in self.components(v) {
                if let Some(row) = s.insert(c, w) {
                    queue.push(self.to_global(c, &row));
                }
            }
        }
        while let Some(v) = queue.pop() {
            for a in &acts {
                let w = a.apply(&v)?;
                for (c, comp) in self.components(&w) {
                    if let Some(row) = s.insert(c, comp) {
                        queue.push(self.to_global(c, &row));
                    }
                }
            }
        }
        Ok(s)
    }

    /// True if every generator maps `s` into itself.
    pub fn is_stable(&self, s: &GradedSubspace) -> Result<bool, ModuleError> {
        for g in generators(&self.field) {
            let act = self.action(&g)?;
            for (c, part) in s.parts().iter().enumerate() {
                for row in part.rows() {
                    let w = act.apply(&self.to_global(c, row))?;
                    if !self.contains_graded(s, &w) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// A group element prepared for repeated application on one space.
pub struct Action<'a> {
    space: &'a RepSpace,
    mats: Vec<Vec<Vec<Elt>>>,
    scalar: Elt,
}

impl Action<'_> {
    /// Applies the block matrices along each tensor axis in turn.
    pub fn apply(&self, v: &[Elt]) -> Result<Vec<Elt>, ModuleError> {
        let sp = self.space;
        if v.len() != sp.dim {
            return Err(ModuleError::DimensionMismatch { got: v.len(), want: sp.dim });
        }
        let k = sp.field.fq();
        let mut cur = v.to_vec();
        let mut next = vec![0; sp.dim];
        for (b, m) in self.mats.iter().enumerate() {
            let s = sp.strides[b];
            let len = m.len();
            next.iter_mut().for_each(|x| *x = 0);
            for base in (0..sp.dim).step_by(len * s) {
                for (col, src) in (0..len).map(|c| (c, &cur[base + c * s..base + (c + 1) * s])) {
                    if src.iter().all(|&x| x == 0) {
                        continue;
                    }
                    for (row, mrow) in m.iter().enumerate() {
                        let coef = mrow[col];
                        if coef != 0 {
                            let o = base + row * s;
                            k.axpy(&mut next[o..o + s], coef, src);
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        if self.scalar != 1 {
            k.scale(&mut cur, self.scalar);
        }
        Ok(cur)
    }
}

/// The quotient `(num + den) / den` of two graded submodules, with a basis
/// of complement rows reduced modulo `den`.
pub struct Quotient<'a> {
    space: &'a RepSpace,
    den: GradedSubspace,
    comp: Vec<Subspace>,
}

impl<'a> Quotient<'a> {
    pub fn new(space: &'a RepSpace, num: &GradedSubspace, den: &GradedSubspace) -> Quotient<'a> {
        let comp = num
            .parts()
            .iter()
            .zip(den.parts())
            .map(|(n, d)| {
                let mut c = Subspace::zero(space.field().fq().clone(), n.ambient());
                for row in n.rows() {
                    let mut v = row.clone();
                    d.reduce(&mut v);
                    c.insert(v);
                }
                c
            })
            .collect();
        Quotient { space, den: den.clone(), comp }
    }

    pub fn dim(&self) -> usize {
        self.comp.iter().map(Subspace::dim).sum()
    }

    /// Per-class dimensions of the quotient.
    pub fn class_dims(&self) -> Vec<usize> {
        self.comp.iter().map(Subspace::dim).collect()
    }

    /// Basis vectors of the complement, in class order.
    pub fn basis(&self) -> Vec<Vec<Elt>> {
        self.comp
            .iter()
            .enumerate()
            .flat_map(|(c, s)| s.rows().iter().map(move |r| self.space.to_global(c, r)))
            .collect()
    }

    /// Coordinates of `w + den` in the complement basis.
    pub fn coordinates(&self, w: &[Elt]) -> Result<Vec<Elt>, ModuleError> {
        let k = self.space.field().fq();
        let mut out = Vec::with_capacity(self.dim());
        let comps = self.space.components(w);
        let mut it = comps.into_iter().peekable();
        for (c, part) in self.comp.iter().enumerate() {
            let mut coords = vec![0; part.dim()];
            if it.peek().map(|x| x.0) == Some(c) {
                let (_, mut v) = it.next().expect("peeked");
                self.den.part(c).reduce(&mut v);
                for (i, (row, &piv)) in part.rows().iter().zip(part.pivots()).enumerate() {
                    let a = v[piv];
                    if a != 0 {
                        coords[i] = a;
                        k.axpy(&mut v, k.neg(a), row);
                    }
                }
                if v.iter().any(|&x| x != 0) {
                    return Err(ModuleError::NotStable);
                }
            }
            out.extend(coords);
        }
        Ok(out)
    }

    /// Matrix of `g` on the quotient; column `j` is the image of basis vector `j`.
    pub fn matrix(&self, g: &GroupElement) -> Result<Vec<Vec<Elt>>, ModuleError> {
        let act = self.space.action(g)?;
        let d = self.dim();
        let mut m = vec![vec![0; d]; d];
        for (j, b) in self.basis().iter().enumerate() {
            for (i, x) in self.coordinates(&act.apply(b)?)?.into_iter().enumerate() {
                m[i][j] = x;
            }
        }
        Ok(m)
    }
}

/// A polynomial in `x_i, y_i` of fixed multi-degree, as a map from
/// x-exponent tuples to coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub deg: Vec<u32>,
    pub terms: BTreeMap<Vec<u32>, Elt>,
}

impl Poly {
    pub fn one(f: usize) -> Poly {
        Poly { deg: vec![0; f], terms: BTreeMap::from([(vec![0; f], 1)]) }
    }

    pub fn mul(&self, other: &Poly, field: &FieldSpec) -> Poly {
        let k = field.fq();
        let deg = self.deg.iter().zip(&other.deg).map(|(a, b)| a + b).collect();
        let mut terms: BTreeMap<Vec<u32>, Elt> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let c = terms.entry(e).or_insert(0);
                *c = k.add(*c, k.mul(ca, cb));
            }
        }
        terms.retain(|_, c| *c != 0);
        Poly { deg, terms }
    }

    pub fn pow(&self, e: u32, field: &FieldSpec) -> Poly {
        (0..e).fold(Poly::one(self.deg.len()), |acc, _| acc.mul(self, field))
    }

    /// Integer torus weight shared by all monomials (`None` if not homogeneous).
    pub fn x_weight(&self, p: u32) -> Option<u64> {
        let ws: Vec<u64> = self
            .terms
            .keys()
            .map(|e| e.iter().enumerate().map(|(i, &a)| a as u64 * (p as u64).pow(i as u32)).sum())
            .collect();
        let q1 = (p as u64).pow(self.deg.len() as u32) - 1;
        let first = *ws.first()? % q1.max(1);
        ws.iter().all(|w| w % q1.max(1) == first).then_some(ws[0])
    }

    /// The coefficient vector in `V_deg`.
    pub fn to_vector(&self, space: &RepSpace) -> Result<Vec<Elt>, ModuleError> {
        if space.degrees() != self.deg {
            return Err(ModuleError::DegreeMismatch(format!("{:?} vs {:?}", space.degrees(), self.deg)));
        }
        let mut v = vec![0; space.dim()];
        for (e, &c) in &self.terms {
            v[space.index(e)] = c;
        }
        Ok(v)
    }
}

/// `theta_i = x_i y_{i-1}^p - y_i x_{i-1}^p`, indices mod f.
pub fn theta(i: usize, field: &FieldSpec) -> Poly {
    let f = field.f as usize;
    let p = field.p;
    let prev = (i + f - 1) % f;
    let mut deg = vec![0; f];
    deg[i] += 1;
    deg[prev] += p;
    let mut t1 = vec![0; f];
    t1[i] += 1;
    let mut t2 = vec![0; f];
    t2[prev] += p;
    let k = field.fq();
    let mut terms = BTreeMap::new();
    terms.insert(t1, 1);
    let c = terms.entry(t2).or_insert(0);
    *c = k.sub(*c, 1);
    terms.retain(|_, c| *c != 0);
    Poly { deg, terms }
}

/// `prod_i theta_i^{j_i}`.
pub fn theta_product(j: &[u32], field: &FieldSpec) -> Poly {
    j.iter().enumerate().fold(Poly::one(field.f as usize), |acc, (i, &e)| {
        acc.mul(&theta(i, field).pow(e, field), field)
    })
}

/// Degree of `prod theta_i^{j_i}` in block `i`: `j_i + p j_{i+1}`.
pub fn theta_degree(j: &[u32], p: u32) -> Vec<u32> {
    let f = j.len();
    (0..f).map(|i| j[i] + p * j[(i + 1) % f]).collect()
}

/// `P * m` for a basis monomial `m` of `src`, as a vector in `dst`.
pub fn mult_monomial(poly: &Poly, src: &RepSpace, idx: usize, dst: &RepSpace) -> Vec<Elt> {
    let a = src.exponents(idx);
    let mut v = vec![0; dst.dim()];
    for (e, &c) in &poly.terms {
        let sum: Vec<u32> = a.iter().zip(e).map(|(x, y)| x + y).collect();
        v[dst.index(&sum)] = c;
    }
    v
}

fn check_mult(poly: &Poly, src: &RepSpace, dst: &RepSpace) -> Result<(), ModuleError> {
    let want: Vec<u32> = src.degrees().iter().zip(&poly.deg).map(|(a, b)| a + b).collect();
    if want != dst.degrees() || src.blocks().len() != poly.deg.len() {
        return Err(ModuleError::DegreeMismatch(format!(
            "{:?} + {:?} != {:?}",
            src.degrees(),
            poly.deg,
            dst.degrees()
        )));
    }
    Ok(())
}

/// Matrix of multiplication by `poly` from `src` to `dst`, as the list of
/// images of the basis monomials.
pub fn mult_map(poly: &Poly, src: &RepSpace, dst: &RepSpace) -> Result<Vec<Vec<Elt>>, ModuleError> {
    check_mult(poly, src, dst)?;
    Ok((0..src.dim()).map(|i| mult_monomial(poly, src, i, dst)).collect())
}

/// The image `poly * src` inside `dst`.
pub fn mult_image(poly: &Poly, src: &RepSpace, dst: &RepSpace) -> Result<GradedSubspace, ModuleError> {
    check_mult(poly, src, dst)?;
    let mut s = dst.zero_subspace();
    for idx in 0..src.dim() {
        let v = mult_monomial(poly, src, idx, dst);
        dst.insert_graded(&mut s, &v);
    }
    Ok(s)
}

/// The image of multiplication by `prod theta_i^{j_i}` in `V_r`, or zero if
/// some source degree is negative.
pub fn theta_multiples(field: &Arc<FieldSpec>, r: &[u32], j: &[u32], dst: &RepSpace) -> Result<GradedSubspace, ModuleError> {
    let d = theta_degree(j, field.p);
    if r.iter().zip(&d).any(|(a, b)| a < b) {
        return Ok(dst.zero_subspace());
    }
    let src_r: Vec<u32> = r.iter().zip(&d).map(|(a, b)| a - b).collect();
    let src = RepSpace::weight(field, &src_r)?;
    mult_image(&theta_product(j, field), &src, dst)
}

/// Flattens a graded subspace of `space` into one ungraded echelon basis.
pub fn flatten(space: &RepSpace, s: &GradedSubspace) -> Subspace {
    let mut out = Subspace::zero(space.field().fq().clone(), space.dim());
    for (c, part) in s.parts().iter().enumerate() {
        for row in part.rows() {
            out.insert(space.to_global(c, row));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::all_elements;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(n: usize, q: u32, rng: &mut ChaCha8Rng) -> Vec<Elt> {
        (0..n).map(|_| rng.gen_range(0..q) as Elt).collect()
    }

    #[test]
    fn unipotent_acts_by_substitution() {
        let field = FieldSpec::build(5, 1).unwrap();
        let v = RepSpace::weight(&field, &[1]).unwrap();
        let g = GroupElement::new(1, 1, 0, 1);
        // Basis index = x-exponent: x = [0, 1], y = [1, 0].
        assert_eq!(v.act(&g, &[0, 1]).unwrap(), vec![0, 1]);
        assert_eq!(v.act(&g, &[1, 0]).unwrap(), vec![1, 1]);
        let id = GroupElement::identity();
        assert_eq!(v.act(&id, &[3, 4]).unwrap(), vec![3, 4]);
    }

    #[test]
    fn action_is_a_homomorphism() {
        let field = FieldSpec::build(3, 2).unwrap();
        let v = RepSpace::weight(&field, &[2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = GroupElement::random(&field, &mut rng);
            let h = GroupElement::random(&field, &mut rng);
            let x = rand_vec(v.dim(), 9, &mut rng);
            let lhs = v.act(&g.mul(&h, &field), &x).unwrap();
            let rhs = v.act(&g, &v.act(&h, &x).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let back = v.act(&g.inverse(&field).unwrap(), &v.act(&g, &x).unwrap()).unwrap();
            assert_eq!(back, x);
        }
        assert!(v.act(&GroupElement::new(0, 0, 0, 0), &vec![0; 9]).is_err());
        assert!(v.act(&GroupElement::identity(), &[0]).is_err());
    }

    #[test]
    fn twisted_tensor_action_is_a_homomorphism() {
        let field = FieldSpec::build(3, 2).unwrap();
        let v = RepSpace::tensor(&field, &[&[1, 0], &[0, 2]], 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let g = GroupElement::random(&field, &mut rng);
            let h = GroupElement::random(&field, &mut rng);
            let x = rand_vec(v.dim(), 9, &mut rng);
            assert_eq!(v.act(&g.mul(&h, &field), &x).unwrap(), v.act(&g, &v.act(&h, &x).unwrap()).unwrap());
        }
    }

    #[test]
    fn theta_is_a_det_eigenvector() {
        let field = FieldSpec::build(3, 2).unwrap();
        let k = field.fq();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..2 {
            let t = theta(i, &field);
            let space = RepSpace::weight(&field, &t.deg).unwrap();
            let v = t.to_vector(&space).unwrap();
            for _ in 0..20 {
                let g = GroupElement::random(&field, &mut rng);
                let mut want = v.clone();
                k.scale(&mut want, k.pow(g.det(&field), 3u64.pow(i as u32)));
                assert_eq!(space.act(&g, &v).unwrap(), want);
            }
        }
        let f1 = FieldSpec::build(3, 1).unwrap();
        let t = theta(0, &f1);
        assert_eq!(t.deg, vec![4]);
        // x y^3 - y x^3.
        assert_eq!(t.terms, BTreeMap::from([(vec![1], 1), (vec![3], 2)]));
    }

    #[test]
    fn theta_product_multiplication_is_injective() {
        let field = FieldSpec::build(3, 2).unwrap();
        let src = RepSpace::weight(&field, &[15, 15]).unwrap();
        let dst = RepSpace::weight(&field, &[19, 19]).unwrap();
        let img = mult_image(&theta_product(&[1, 1], &field), &src, &dst).unwrap();
        assert_eq!(img.dim(), 256);
        assert!(dst.is_stable(&img).unwrap());
        let bad = RepSpace::weight(&field, &[18, 19]).unwrap();
        assert!(mult_map(&theta_product(&[1, 1], &field), &src, &bad).is_err());
    }

    #[test]
    fn spin_examples() {
        let field = FieldSpec::build(3, 1).unwrap();
        let v = RepSpace::weight(&field, &[2]).unwrap();
        assert_eq!(v.spin(&[vec![0, 0, 1]]).unwrap().dim(), 3);
        assert_eq!(v.spin(&[]).unwrap().dim(), 0);
        // Brute-force closure over the whole group agrees.
        let mut s = Subspace::zero(field.fq().clone(), 3);
        for g in all_elements(&field) {
            s.insert(v.act(&g, &[0, 0, 1]).unwrap());
        }
        assert_eq!(s.dim(), 3);
        let f2 = FieldSpec::build(3, 2).unwrap();
        let w = RepSpace::weight(&f2, &[19, 19]).unwrap();
        let t0 = theta_multiples(&f2, &[19, 19], &[1, 0], &w).unwrap();
        let gens: Vec<Vec<Elt>> = t0
            .parts()
            .iter()
            .enumerate()
            .flat_map(|(c, part)| part.rows().iter().map(move |r| (c, r.clone())))
            .take(5)
            .map(|(c, r)| w.to_global(c, &r))
            .collect();
        let spun = w.spin(&gens).unwrap();
        assert!(t0.contains(&spun));
        assert_eq!(w.spin(&flatten(&w, &t0).rows().to_vec()).unwrap(), t0);
    }

    #[test]
    fn theta_square_intersection() {
        let field = FieldSpec::build(3, 2).unwrap();
        let v = RepSpace::weight(&field, &[19, 19]).unwrap();
        let a = theta_multiples(&field, &[19, 19], &[2, 0], &v).unwrap();
        let b = theta_multiples(&field, &[19, 19], &[0, 2], &v).unwrap();
        let ab = theta_multiples(&field, &[19, 19], &[2, 2], &v).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), ab);
    }
}

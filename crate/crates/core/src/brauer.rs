//! Exact Brauer characters of GL2(F_q) with values in `Z[zeta_n]`,
//! `n = q^2 - 1`, where `zeta` lifts the fixed generator of F_{q^2}.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::gf::{gcd, Elt, FieldSpec};
use crate::group::{all_elements, GroupElement};
use crate::linalg::{char_poly, root_multiplicity, GradedSubspace};
use crate::rep::{ModuleError, Quotient, RepSpace};
use crate::weights::{TensorTerm, WeightSum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrauerError {
    #[error("several determinant twists match: {0:?}")]
    Ambiguous(Vec<u64>),
    #[error("module error: {0}")]
    Module(#[from] ModuleError),
}

fn poly_divexact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    let mut quo = vec![0i64; num.len() - dd];
    for k in (0..quo.len()).rev() {
        let c = r[k + dd] / lead;
        quo[k] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                r[k + j] -= c * d;
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0), "division is not exact");
    quo
}

fn radical(mut n: u32) -> u32 {
    let mut rad = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            rad *= d;
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        rad *= n;
    }
    rad
}

/// `Phi_n` with integer coefficients, low degree first.
///
/// Squarefree `n` is handled by dividing `x^n - 1` by `Phi_d` for every
/// proper divisor `d`; otherwise `Phi_n(x) = Phi_rad(n)(x^{n / rad(n)})`.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    let rad = radical(n);
    if rad != n {
        let base = cyclotomic_poly(rad);
        let s = (n / rad) as usize;
        let mut out = vec![0; (base.len() - 1) * s + 1];
        for (i, &c) in base.iter().enumerate() {
            out[i * s] = c;
        }
        return out;
    }
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in (1..n).filter(|d| n % d == 0) {
        p = poly_divexact(&p, &cyclotomic_poly(d));
    }
    p
}

/// The ring `Z[x]/Phi_n` with a sparse copy of `Phi_n` for fast reduction.
#[derive(Debug, Clone)]
pub struct CycRing {
    n: u32,
    phi: Vec<i64>,
    tail: Vec<(usize, i64)>,
}

impl CycRing {
    pub fn new(n: u32) -> CycRing {
        let phi = cyclotomic_poly(n);
        let deg = phi.len() - 1;
        let tail = phi[..deg].iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect();
        CycRing { n, phi, tail }
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }
    pub fn phi(&self) -> &[i64] {
        &self.phi
    }

    /// Reduces `sum_k c_k x^k` (any length) modulo `Phi_n`.
    pub fn reduce(&self, coeffs: &[i64]) -> CycInt {
        let deg = self.degree();
        let mut c = coeffs.to_vec();
        for k in (deg..c.len()).rev() {
            let a = c[k];
            if a != 0 {
                c[k] = 0;
                for &(j, t) in &self.tail {
                    c[k - deg + j] -= a * t;
                }
            }
        }
        c.resize(deg, 0);
        CycInt { n: self.n, coeffs: c }
    }

    pub fn zero(&self) -> CycInt {
        CycInt { n: self.n, coeffs: vec![0; self.degree()] }
    }

    pub fn int(&self, k: i64) -> CycInt {
        self.zeta_pow(0).scale(k)
    }

    pub fn zeta_pow(&self, e: u64) -> CycInt {
        let mut v = vec![0i64; self.n as usize];
        v[(e % self.n as u64) as usize] = 1;
        self.reduce(&v)
    }

    /// Reduces a vector of exponent multiplicities (length `n`, index = exponent).
    pub fn from_counts(&self, counts: &[i64]) -> CycInt {
        self.reduce(counts)
    }

    pub fn mul(&self, a: &CycInt, b: &CycInt) -> CycInt {
        let mut prod = vec![0i64; a.coeffs.len() + b.coeffs.len()];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x != 0 {
                for (j, &y) in b.coeffs.iter().enumerate() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(&prod)
    }
}

/// An element of `Z[zeta_n]` in the power basis `1, zeta, ..., zeta^{phi(n)-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CycInt {
    pub n: u32,
    pub coeffs: Vec<i64>,
}

impl CycInt {
    pub fn add(&self, o: &CycInt) -> CycInt {
        CycInt { n: self.n, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
    pub fn sub(&self, o: &CycInt) -> CycInt {
        CycInt { n: self.n, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
    pub fn neg(&self) -> CycInt {
        self.scale(-1)
    }
    pub fn scale(&self, k: i64) -> CycInt {
        CycInt { n: self.n, coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
    /// The rational integer this equals, if any.
    pub fn as_integer(&self) -> Option<i64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then(|| self.coeffs[0])
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => c.to_string(),
                _ => format!("{c}ζ^{i}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Central,
    Split,
    Nonsplit,
}

/// A p-regular conjugacy class, given by the discrete logs of its
/// eigenvalues in F_{q^2} and a representative matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PRegClass {
    pub kind: ClassKind,
    pub eigen_exponents: (u64, u64),
    pub representative: GroupElement,
}

/// All `q(q - 1)` p-regular classes: central, then split, then nonsplit.
pub fn pregular_classes(field: &FieldSpec) -> Vec<PRegClass> {
    let q = field.q() as u64;
    let n = q * q - 1;
    let k2 = field.fq2();
    let down = |e: u64| field.restrict_q(k2.exp(e)).expect("element of F_q");
    let mut out = Vec::new();
    for t in 0..q - 1 {
        let k = (q + 1) * t;
        let a = down(k);
        out.push(PRegClass { kind: ClassKind::Central, eigen_exponents: (k, k), representative: GroupElement::new(a, 0, 0, a) });
    }
    for s in 0..q - 1 {
        for t in s + 1..q - 1 {
            let (ka, kb) = ((q + 1) * s, (q + 1) * t);
            out.push(PRegClass {
                kind: ClassKind::Split,
                eigen_exponents: (ka, kb),
                representative: GroupElement::new(down(ka), 0, 0, down(kb)),
            });
        }
    }
    for k in 0..n {
        let kq = k * q % n;
        if k % (q + 1) == 0 || kq < k {
            continue;
        }
        let lam = k2.exp(k);
        let trace = field.restrict_q(k2.add(lam, k2.exp(kq))).expect("trace in F_q");
        let norm = field.restrict_q(k2.exp(k + kq)).expect("norm in F_q");
        let fq = field.fq();
        out.push(PRegClass {
            kind: ClassKind::Nonsplit,
            eigen_exponents: (k, kq),
            representative: GroupElement::new(0, fq.neg(norm), 1, trace),
        });
    }
    out
}

/// Number of conjugacy classes of elements of order prime to p, by
/// orbit enumeration over the whole group.
pub fn brute_force_pregular_count(field: &FieldSpec) -> usize {
    let elems = all_elements(field);
    let inverses: Vec<GroupElement> = elems.iter().map(|g| g.inverse(field).expect("invertible")).collect();
    let p = field.p as u64;
    let mut seen = HashSet::new();
    let mut count = 0;
    for x in &elems {
        if seen.contains(x) || x.order(field) % p == 0 {
            continue;
        }
        count += 1;
        for (g, gi) in elems.iter().zip(&inverses) {
            seen.insert(g.mul(x, field).mul(gi, field));
        }
    }
    count
}

/// True if the representatives of `classes` are pairwise non-conjugate.
pub fn representatives_distinct(field: &FieldSpec, classes: &[PRegClass]) -> bool {
    let elems = all_elements(field);
    let mut owner = std::collections::HashMap::new();
    for (i, c) in classes.iter().enumerate() {
        for g in &elems {
            let conj = g.mul(&c.representative, field).mul(&g.inverse(field).expect("invertible"), field);
            if let Some(&j) = owner.get(&conj) {
                if j != i {
                    return false;
                }
            }
            owner.insert(conj, i);
        }
    }
    true
}

/// Character values on every class, in class order.
pub type Character = Vec<CycInt>;

/// Classes and cyclotomic ring for one field.
pub struct Brauer {
    field: Arc<FieldSpec>,
    ring: CycRing,
    classes: Vec<PRegClass>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterTableJson {
    pub classes: Vec<PRegClass>,
    pub values: Vec<Vec<Vec<i64>>>,
}

impl Brauer {
    pub fn new(field: &Arc<FieldSpec>) -> Brauer {
        let n = field.q2() - 1;
        Brauer { field: field.clone(), ring: CycRing::new(n), classes: pregular_classes(field) }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }
    pub fn ring(&self) -> &CycRing {
        &self.ring
    }
    pub fn classes(&self) -> &[PRegClass] {
        &self.classes
    }
    fn n(&self) -> u64 {
        self.ring.n as u64
    }

    fn rotate(&self, counts: &[i64], shift: u64) -> Vec<i64> {
        let n = counts.len();
        let s = (shift % n as u64) as usize;
        let mut out = vec![0; n];
        for (i, &c) in counts.iter().enumerate() {
            out[(i + s) % n] = c;
        }
        out
    }

    /// Multiset of eigenvalue exponents of `t` at class `c`, as counts
    /// indexed by exponent.
    pub fn weight_counts(&self, t: &TensorTerm, c: &PRegClass) -> Vec<i64> {
        let n = self.n();
        let p = self.field.p as u64;
        let (k1, k2) = c.eigen_exponents;
        let mut acc = vec![0i64; n as usize];
        acc[((k1 + k2) % n * (t.det % n) % n) as usize] = 1;
        for m in &t.factors {
            for (i, &mi) in m.iter().enumerate() {
                if mi == 0 {
                    continue;
                }
                let pi = p.pow(i as u32) % n;
                let shifts: Vec<u64> =
                    (0..=mi as u64).map(|k| (k * k1 % n + (mi as u64 - k) * k2 % n) % n * pi % n).collect();
                let mut next = vec![0i64; n as usize];
                for (e, &a) in acc.iter().enumerate() {
                    if a != 0 {
                        for &s in &shifts {
                            next[(e + s as usize) % n as usize] += a;
                        }
                    }
                }
                acc = next;
            }
        }
        acc
    }

    pub fn weight_char(&self, t: &TensorTerm, c: &PRegClass) -> CycInt {
        self.ring.from_counts(&self.weight_counts(t, c))
    }

    pub fn term_character(&self, t: &TensorTerm) -> Character {
        self.classes.iter().map(|c| self.weight_char(t, c)).collect()
    }

    pub fn sum_character(&self, s: &WeightSum) -> Character {
        self.classes
            .iter()
            .map(|c| {
                let mut counts = vec![0i64; self.n() as usize];
                for t in &s.terms {
                    for (a, b) in counts.iter_mut().zip(self.weight_counts(t, c)) {
                        *a += b;
                    }
                }
                self.ring.from_counts(&counts)
            })
            .collect()
    }

    fn induced_counts(&self, s: u64, r_prime: u64, c: &PRegClass) -> Vec<i64> {
        let n = self.n();
        let q = self.field.q() as i64;
        let (k1, k2) = c.eigen_exponents;
        let (s, r) = (s % n, r_prime % n);
        let mut counts = vec![0i64; n as usize];
        match c.kind {
            ClassKind::Central => counts[((r + 2 * s) % n * k1 % n) as usize] += q + 1,
            ClassKind::Split => {
                let base = s * ((k1 + k2) % n) % n;
                counts[((base + r * k1) % n) as usize] += 1;
                counts[((base + r * k2) % n) as usize] += 1;
            }
            ClassKind::Nonsplit => {}
        }
        counts
    }

    /// Character of `ind_B^G(det^S ⊗ d^{r'})` at class `c`.
    pub fn induced_char(&self, s: u64, r_prime: u64, c: &PRegClass) -> CycInt {
        self.ring.from_counts(&self.induced_counts(s, r_prime, c))
    }

    pub fn induced_character(&self, s: u64, r_prime: u64) -> Character {
        self.classes.iter().map(|c| self.induced_char(s, r_prime, c)).collect()
    }

    /// Brauer character of `(num + den) / den` at class `c`, from the
    /// eigenvalue multiplicities of the representative over F_{q^2}; the
    /// representative is semisimple, so these are eigenspace dimensions.
    pub fn module_char(
        &self,
        space: &RepSpace,
        num: &GradedSubspace,
        den: &GradedSubspace,
        c: &PRegClass,
    ) -> Result<CycInt, ModuleError> {
        let quo = Quotient::new(space, num, den);
        self.quotient_char(&quo, c)
    }

    pub fn quotient_char(&self, quo: &Quotient, c: &PRegClass) -> Result<CycInt, ModuleError> {
        let d = quo.dim();
        let m = quo.matrix(&c.representative)?;
        let k2 = self.field.fq2();
        let big: Vec<Vec<Elt>> = m.iter().map(|row| row.iter().map(|&x| self.field.embed_q(x)).collect()).collect();
        let n = self.n();
        let step = gcd(gcd(c.eigen_exponents.0 as u32, c.eigen_exponents.1 as u32), n as u32) as u64;
        let poly = char_poly(k2, &big);
        let mut counts = vec![0i64; n as usize];
        let mut total = 0;
        let mut e = 0;
        while total < d && e < n {
            let mult = root_multiplicity(k2, &poly, k2.exp(e));
            counts[e as usize] += mult as i64;
            total += mult;
            e += step;
        }
        if total != d {
            return Err(ModuleError::NotStable);
        }
        Ok(self.ring.from_counts(&counts))
    }

    pub fn module_character(
        &self,
        space: &RepSpace,
        num: &GradedSubspace,
        den: &GradedSubspace,
    ) -> Result<Character, ModuleError> {
        let quo = Quotient::new(space, num, den);
        self.classes.iter().map(|c| self.quotient_char(&quo, c)).collect()
    }

    /// All `e` in `[0, q - 1)` with `char(w ⊗ det^e) = residual`; `Ok(None)`
    /// if there is none and `Ambiguous` if there are several.
    pub fn solve_det_twist(&self, w: &TensorTerm, residual: &[CycInt]) -> Result<Option<u64>, BrauerError> {
        let matches = self.matching_twists(w, residual);
        match matches.len() {
            0 => Ok(None),
            1 => Ok(Some(matches[0])),
            _ => Err(BrauerError::Ambiguous(matches)),
        }
    }

    pub fn matching_twists(&self, w: &TensorTerm, residual: &[CycInt]) -> Vec<u64> {
        let q1 = self.field.q() as u64 - 1;
        let n = self.n();
        // Check the cheap identity class first and bail at the first mismatch.
        (0..q1)
            .filter(|&e| {
                self.classes.iter().zip(residual).all(|(c, want)| {
                    let base = self.weight_counts(w, c);
                    let shift = (c.eigen_exponents.0 + c.eigen_exponents.1) % n * e % n;
                    &self.ring.from_counts(&self.rotate(&base, shift)) == want
                })
            })
            .collect()
    }

    pub fn table_json(&self, chars: &[Character]) -> CharacterTableJson {
        CharacterTableJson {
            classes: self.classes.clone(),
            values: chars.iter().map(|ch| ch.iter().map(|v| v.coeffs.clone()).collect()).collect(),
        }
    }

    /// Characters agree on every class.
    pub fn equal(a: &[CycInt], b: &[CycInt]) -> bool {
        a == b
    }

    pub fn sub(a: &[CycInt], b: &[CycInt]) -> Character {
        a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
    }

    pub fn add(a: &[CycInt], b: &[CycInt]) -> Character {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }

    /// Class kinds and counts, for reports.
    pub fn class_summary(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for c in &self.classes {
            let k = match c.kind {
                ClassKind::Central => "central",
                ClassKind::Split => "split",
                ClassKind::Nonsplit => "nonsplit",
            };
            *m.entry(k).or_insert(0) += 1;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{cg_general, split_step, Params};

    fn term(fs: &[&[u32]], det: u64) -> TensorTerm {
        TensorTerm::canonical(fs.iter().map(|x| x.to_vec()).collect(), det)
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        let phi80 = cyclotomic_poly(80);
        assert_eq!(phi80.len() - 1, 32);
        let mut xn = vec![0i64; 81];
        xn[0] = -1;
        xn[80] = 1;
        let quo = poly_divexact(&xn, &phi80);
        assert_eq!(quo.len(), 49);
        // Squarefree and non-squarefree paths agree with the divisor product.
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_relations() {
        let ring = CycRing::new(80);
        assert_eq!(ring.zeta_pow(80), ring.int(1));
        let mut phi_at_zeta = ring.zero();
        for (i, &c) in ring.phi().iter().enumerate() {
            phi_at_zeta = phi_at_zeta.add(&ring.zeta_pow(i as u64).scale(c));
        }
        assert!(phi_at_zeta.is_zero());
        let a = ring.zeta_pow(3).add(&ring.int(2));
        let b = ring.zeta_pow(77).sub(&ring.zeta_pow(40));
        assert_eq!(ring.mul(&a, &b), ring.mul(&b, &a));
        // zeta^40 = -1.
        assert_eq!(ring.zeta_pow(40), ring.int(-1));
    }

    #[test]
    fn class_counts_match_brute_force() {
        for (p, f) in [(2, 1), (3, 1), (2, 2)] {
            let field = FieldSpec::build(p, f).unwrap();
            let q = field.q() as usize;
            let cl = pregular_classes(&field);
            assert_eq!(cl.len(), q * (q - 1));
            assert_eq!(brute_force_pregular_count(&field), q * (q - 1));
            assert!(representatives_distinct(&field, &cl));
            for c in &cl {
                assert_ne!(c.representative.order(&field) % p as u64, 0);
            }
        }
        let f9 = FieldSpec::build(3, 2).unwrap();
        assert_eq!(pregular_classes(&f9).len(), 72);
    }

    #[test]
    fn identity_values_are_dimensions() {
        let field = FieldSpec::build(3, 2).unwrap();
        let b = Brauer::new(&field);
        let id = &b.classes()[0];
        assert_eq!(id.eigen_exponents, (0, 0));
        let t = term(&[&[2, 1], &[1, 1]], 5);
        assert_eq!(b.weight_char(&t, id).as_integer(), Some(24));
        assert_eq!(b.induced_char(4, 60, id).as_integer(), Some(10));
        for c in b.classes().iter().filter(|c| c.kind == ClassKind::Nonsplit) {
            assert!(b.induced_char(4, 60, c).is_zero());
        }
    }

    #[test]
    fn tensor_rules_preserve_characters() {
        let field = FieldSpec::build(5, 1).unwrap();
        let b = Brauer::new(&field);
        let pp = Params::new(5, 1);
        assert_eq!(b.classes().len(), 20);
        let lhs = b.term_character(&term(&[&[1], &[2]], 0));
        assert_eq!(lhs, b.sum_character(&split_step(&pp, &[1], 0, 2).unwrap()));
        let f7 = FieldSpec::build(7, 2).unwrap();
        let b7 = Brauer::new(&f7);
        let p7 = Params::new(7, 2);
        let lhs = b7.term_character(&term(&[&[1, 1], &[2, 2]], 0));
        assert_eq!(lhs, b7.sum_character(&cg_general(&p7, &[1, 1], &[2, 2]).unwrap()));
    }

    #[test]
    fn module_char_of_full_space_is_weight_char() {
        let field = FieldSpec::build(3, 2).unwrap();
        let b = Brauer::new(&field);
        let v = RepSpace::weight(&field, &[2, 2]).unwrap();
        let got = b.module_character(&v, &v.full_subspace(), &v.zero_subspace()).unwrap();
        assert_eq!(got, b.term_character(&term(&[&[2, 2]], 0)));
    }

    #[test]
    fn twist_recovery() {
        let field = FieldSpec::build(3, 2).unwrap();
        let b = Brauer::new(&field);
        let w = term(&[&[1, 2]], 0);
        assert_eq!(b.solve_det_twist(&w, &b.term_character(&w)).unwrap(), Some(0));
        let target = b.term_character(&term(&[&[1, 2]], 5));
        assert_eq!(b.solve_det_twist(&w, &target).unwrap(), Some(5));
        let other = b.term_character(&term(&[&[2, 2]], 0));
        assert_eq!(b.solve_det_twist(&w, &other).unwrap(), None);
    }
}

//! Finite fields F_p, F_q = F_{p^f} and F_{q^2}.
//!
//! Elements are stored as indices `sum c_i p^i` of their coefficient vectors
//! relative to the defining polynomial, so the prime field sits inside every
//! extension as the indices `0..p`. Multiplication goes through log/antilog
//! tables; small fields also get full addition and multiplication tables,
//! which the echelon kernel relies on.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a field element.
pub type Elt = u16;

/// Largest admissible `q^2`.
pub const MAX_Q2: u64 = 1 << 16;

const TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field too large: q^2 = {0} exceeds 2^16")]
    FieldTooLarge(u64),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("discrete log of zero")]
    ZeroElement,
    #[error("invalid coefficient vector for this field")]
    BadCoefficients,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomials over F_p, coefficients low to high.

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    let lead_inv = inv_mod(m[dm], p);
    for top in (dm..r.len()).rev() {
        let c = r[top] * lead_inv % p;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = top - dm + i;
                r[idx] = (r[idx] + p - c * mi % p) % p;
            }
        }
    }
    r.truncate(dm);
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn monic_from_index(idx: u64, d: usize, p: u32) -> Vec<u32> {
    let mut c = Vec::with_capacity(d + 1);
    let mut x = idx;
    for _ in 0..d {
        c.push((x % p as u64) as u32);
        x /= p as u64;
    }
    c.push(1);
    c
}

/// Irreducibility over F_p by trial division with every monic polynomial of
/// degree at most `deg / 2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let d = poly.len() - 1;
    if d == 0 {
        return false;
    }
    for k in 1..=d / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let g = monic_from_index(idx, k, p);
            let r = poly_rem(poly, &g, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The smallest monic irreducible polynomial of degree `d` over F_p, ordering
/// candidates by the integer `sum c_i p^i` of their lower coefficients.
pub fn smallest_irreducible(d: usize, p: u32) -> Vec<u32> {
    let count = (p as u64).pow(d as u32);
    for idx in 0..count {
        let poly = monic_from_index(idx, d, p);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Arithmetic kernel for one field `F_p[x]/(modulus)`.
pub struct Gf {
    p: u32,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    generator: Elt,
    exp: Vec<Elt>,
    log: Vec<u32>,
    neg: Vec<Elt>,
    add_t: Option<Vec<Elt>>,
    mul_t: Option<Vec<Elt>>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.degree)
    }
}

impl Gf {
    /// Builds the field and fixes its multiplicative generator as the
    /// smallest element of full order.
    pub fn new(p: u32, modulus: Vec<u32>) -> Gf {
        let degree = (modulus.len() - 1) as u32;
        let size = p.pow(degree);
        let mut gf = Gf {
            p,
            degree,
            size,
            modulus,
            generator: 1,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add_t: None,
            mul_t: None,
        };
        gf.neg = (0..size).map(|a| gf.neg_digits(a as Elt)).collect();
        let order = size - 1;
        let mut exp = Vec::with_capacity(order as usize);
        for cand in 1..size {
            exp.clear();
            let g = cand as Elt;
            let mut x: Elt = 1;
            loop {
                exp.push(x);
                x = gf.poly_mul(x, g);
                if x == 1 || exp.len() > order as usize {
                    break;
                }
            }
            if exp.len() == order as usize {
                gf.generator = g;
                break;
            }
        }
        let mut log = vec![u32::MAX; size as usize];
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        gf.exp = exp;
        gf.log = log;
        if size <= TABLE_LIMIT {
            let s = size as usize;
            let mut at = vec![0; s * s];
            let mut mt = vec![0; s * s];
            for a in 0..s {
                for b in 0..s {
                    at[a * s + b] = gf.add_digits(a as Elt, b as Elt);
                    mt[a * s + b] = gf.mul_log(a as Elt, b as Elt);
                }
            }
            gf.add_t = Some(at);
            gf.mul_t = Some(mt);
        }
        gf
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    /// The fixed generator of the multiplicative group.
    pub fn generator(&self) -> Elt {
        self.generator
    }
    pub fn has_tables(&self) -> bool {
        self.add_t.is_some()
    }

    pub fn digits(&self, a: Elt) -> Vec<u32> {
        let mut x = a as u32;
        (0..self.degree)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, c: &[u32]) -> Elt {
        c.iter().rev().fold(0u32, |acc, &d| acc * self.p + d % self.p) as Elt
    }

    fn add_digits(&self, a: Elt, b: Elt) -> Elt {
        let (mut x, mut y) = (a as u32, b as u32);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.degree {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        out as Elt
    }

    fn neg_digits(&self, a: Elt) -> Elt {
        let mut x = a as u32;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.degree {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        out as Elt
    }

    fn poly_mul(&self, a: Elt, b: Elt) -> Elt {
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u32; da.len() + db.len()];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let r = poly_rem(&prod, &self.modulus, self.p);
        self.from_digits(&r)
    }

    fn mul_log(&self, a: Elt, b: Elt) -> Elt {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.size - 1;
        let k = (self.log[a as usize] + self.log[b as usize]) % n;
        self.exp[k as usize]
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        match &self.add_t {
            Some(t) => t[a as usize * self.size as usize + b as usize],
            None => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elt) -> Elt {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        match &self.mul_t {
            Some(t) => t[a as usize * self.size as usize + b as usize],
            None => self.mul_log(a, b),
        }
    }

    pub fn inv(&self, a: Elt) -> Result<Elt, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.size - 1;
        Ok(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    /// Square-and-multiply power; `0^0 = 1`.
    pub fn pow(&self, a: Elt, mut k: u64) -> Elt {
        let mut result: Elt = 1;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        result
    }

    /// `a^(p^i)`.
    pub fn frob(&self, a: Elt, i: u32) -> Elt {
        if a == 0 {
            return 0;
        }
        let n = (self.size - 1) as u64;
        let e = (self.p as u64).pow(i % self.degree.max(1)) % n.max(1);
        let k = self.log[a as usize] as u64 * e % n.max(1);
        self.exp[k as usize]
    }

    /// Discrete log with respect to [`Gf::generator`].
    pub fn dlog(&self, a: Elt) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroElement);
        }
        Ok(self.log[a as usize])
    }

    /// `generator^k`.
    pub fn exp(&self, k: u64) -> Elt {
        self.exp[(k % (self.size as u64 - 1)) as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Elt) -> u32 {
        let n = self.size - 1;
        let k = self.log[a as usize];
        n / gcd(n, k)
    }

    /// `dst += c * src`, entrywise.
    #[inline]
    pub fn axpy(&self, dst: &mut [Elt], c: Elt, src: &[Elt]) {
        if c == 0 {
            return;
        }
        match (&self.add_t, &self.mul_t) {
            (Some(at), Some(mt)) => {
                let s = self.size as usize;
                let mrow = &mt[c as usize * s..(c as usize + 1) * s];
                for (d, &x) in dst.iter_mut().zip(src) {
                    if x != 0 {
                        *d = at[*d as usize * s + mrow[x as usize] as usize];
                    }
                }
            }
            _ => {
                for (d, &x) in dst.iter_mut().zip(src) {
                    if x != 0 {
                        *d = self.add(*d, self.mul_log(c, x));
                    }
                }
            }
        }
    }

    /// `v *= c`, entrywise.
    pub fn scale(&self, v: &mut [Elt], c: Elt) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Which field a [`FieldElement`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Which {
    Base,
    Q,
    Q2,
}

/// A field element as an explicit coefficient vector with its field tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    pub coeffs: Vec<u32>,
    pub which_field: Which,
}

/// The tower F_p ⊂ F_q ⊂ F_{q^2} with fixed moduli, generator and embedding.
pub struct FieldSpec {
    pub p: u32,
    pub f: u32,
    pub q_modulus: Vec<u32>,
    pub q2_modulus: Vec<u32>,
    pub q2_generator: Vec<u32>,
    fp: Arc<Gf>,
    fq: Arc<Gf>,
    fq2: Arc<Gf>,
    embed: Vec<Elt>,
    restrict: Vec<Option<Elt>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(p={}, f={})", self.p, self.f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpecJson {
    pub p: u32,
    pub f: u32,
    pub q_modulus: Vec<u32>,
    pub q2_modulus: Vec<u32>,
    pub q2_generator: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl FieldSpec {
    /// Builds the tower for `q = p^f`, rejecting non-primes and `q^2 > 2^16`.
    pub fn build(p: u32, f: u32) -> Result<Arc<FieldSpec>, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if f == 0 {
            return Err(FieldError::BadDegree);
        }
        let q2 = (p as u64).checked_pow(2 * f).unwrap_or(u64::MAX);
        if q2 > MAX_Q2 {
            return Err(FieldError::FieldTooLarge(q2));
        }
        let q_modulus = smallest_irreducible(f as usize, p);
        let q2_modulus = smallest_irreducible(2 * f as usize, p);
        let fp = Arc::new(Gf::new(p, vec![0, 1]));
        let fq = Arc::new(Gf::new(p, q_modulus.clone()));
        let fq2 = Arc::new(Gf::new(p, q2_modulus.clone()));
        let q2_generator = fq2.digits(fq2.generator());

        // Image of the class of x in F_q: the root of q_modulus in F_{q^2}
        // with the smallest discrete log.
        let beta: Elt = if f == 1 {
            0
        } else {
            let n = fq2.size() - 1;
            (0..n as u64)
                .map(|k| fq2.exp(k))
                .find(|&b| eval_poly(&fq2, &q_modulus, b) == 0)
                .expect("q_modulus splits in F_{q^2}")
        };
        let q = fq.size();
        let mut embed = vec![0 as Elt; q as usize];
        let mut restrict = vec![None; fq2.size() as usize];
        for a in 0..q {
            let digits = fq.digits(a as Elt);
            let mut acc: Elt = 0;
            let mut pw: Elt = 1;
            for &d in &digits {
                acc = fq2.add(acc, fq2.mul(d as Elt, pw));
                pw = fq2.mul(pw, beta);
            }
            embed[a as usize] = acc;
            restrict[acc as usize] = Some(a as Elt);
        }
        Ok(Arc::new(FieldSpec {
            p,
            f,
            q_modulus,
            q2_modulus,
            q2_generator,
            fp,
            fq,
            fq2,
            embed,
            restrict,
        }))
    }

    pub fn q(&self) -> u32 {
        self.fq.size()
    }
    pub fn q2(&self) -> u32 {
        self.fq2.size()
    }
    pub fn fp(&self) -> &Arc<Gf> {
        &self.fp
    }
    pub fn fq(&self) -> &Arc<Gf> {
        &self.fq
    }
    pub fn fq2(&self) -> &Arc<Gf> {
        &self.fq2
    }

    /// Embeds an F_q index into F_{q^2}.
    pub fn embed_q(&self, a: Elt) -> Elt {
        self.embed[a as usize]
    }

    /// The F_q index of an F_{q^2} element lying in F_q.
    pub fn restrict_q(&self, a: Elt) -> Option<Elt> {
        self.restrict[a as usize]
    }

    /// Smallest primitive element of F_q.
    pub fn q_primitive(&self) -> Elt {
        self.fq.generator()
    }

    pub fn to_json(&self) -> FieldSpecJson {
        FieldSpecJson {
            p: self.p,
            f: self.f,
            q_modulus: self.q_modulus.clone(),
            q2_modulus: self.q2_modulus.clone(),
            q2_generator: self.q2_generator.clone(),
        }
    }

    fn gf(&self, w: Which) -> &Gf {
        match w {
            Which::Base => &self.fp,
            Which::Q => &self.fq,
            Which::Q2 => &self.fq2,
        }
    }

    pub fn element(&self, which: Which, coeffs: Vec<u32>) -> Result<FieldElement, FieldError> {
        let gf = self.gf(which);
        if coeffs.len() != gf.degree() as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadCoefficients);
        }
        Ok(FieldElement { coeffs, which_field: which })
    }

    pub fn from_index(&self, which: Which, a: Elt) -> FieldElement {
        FieldElement { coeffs: self.gf(which).digits(a), which_field: which }
    }

    pub fn index(&self, a: &FieldElement) -> Elt {
        self.gf(a.which_field).from_digits(&a.coeffs)
    }

    /// All elements of the given field in index order.
    pub fn elements(&self, which: Which) -> Vec<FieldElement> {
        (0..self.gf(which).size()).map(|a| self.from_index(which, a as Elt)).collect()
    }

    fn binary(
        &self,
        a: &FieldElement,
        b: &FieldElement,
        op: impl Fn(&Gf, Elt, Elt) -> Elt,
    ) -> Result<FieldElement, FieldError> {
        if a.which_field != b.which_field {
            return Err(FieldError::FieldMismatch);
        }
        let gf = self.gf(a.which_field);
        let r = op(gf, self.index(a), self.index(b));
        Ok(self.from_index(a.which_field, r))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.binary(a, b, |g, x, y| g.add(x, y))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        self.binary(a, b, |g, x, y| g.mul(x, y))
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let gf = self.gf(a.which_field);
        self.from_index(a.which_field, gf.neg(self.index(a)))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        let gf = self.gf(a.which_field);
        Ok(self.from_index(a.which_field, gf.inv(self.index(a))?))
    }

    pub fn pow(&self, a: &FieldElement, k: u64) -> FieldElement {
        let gf = self.gf(a.which_field);
        self.from_index(a.which_field, gf.pow(self.index(a), k))
    }

    /// `a^(p^i)`.
    pub fn frobenius(&self, a: &FieldElement, i: u32) -> FieldElement {
        let gf = self.gf(a.which_field);
        self.from_index(a.which_field, gf.frob(self.index(a), i))
    }

    /// Discrete log in F_{q^2} with respect to `q2_generator`.
    pub fn dlog(&self, a: &FieldElement) -> Result<u32, FieldError> {
        if a.which_field != Which::Q2 {
            return Err(FieldError::FieldMismatch);
        }
        self.fq2.dlog(self.index(a))
    }

    /// The fixed embedding of F_p or F_q into F_{q^2}.
    pub fn embed(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        let idx = match a.which_field {
            Which::Base => a.coeffs[0] as Elt,
            Which::Q => self.embed[self.index(a) as usize],
            Which::Q2 => return Err(FieldError::FieldMismatch),
        };
        Ok(self.from_index(Which::Q2, idx))
    }

    pub fn q2_generator_element(&self) -> FieldElement {
        FieldElement { coeffs: self.q2_generator.clone(), which_field: Which::Q2 }
    }
}

fn eval_poly(gf: &Gf, poly: &[u32], x: Elt) -> Elt {
    poly.iter().rev().fold(0 as Elt, |acc, &c| gf.add(gf.mul(acc, x), c as Elt))
}

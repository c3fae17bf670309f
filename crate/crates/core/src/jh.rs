//! Jordan-Hölder factors of principal series via λ-tuples, socle layers,
//! and hypercube graphs labelled by weights or principal series.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::brauer::{Brauer, Character};
use crate::gf::FieldSpec;
use crate::weights::{Params, TensorTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JhError {
    #[error("bound violated: {0}")]
    BoundViolated(String),
    #[error("non-generic parameters: {0}")]
    NonGeneric(String),
    #[error("bad input: {0}")]
    BadInput(String),
}

/// Entry of a λ-tuple, as a function of `x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sym {
    /// `x_i`
    X,
    /// `x_i - 1`
    XM1,
    /// `p - 2 - x_i`
    PM2,
    /// `p - 1 - x_i`
    PM1,
}

impl Sym {
    pub fn eval(self, x: i64, p: i64) -> i64 {
        match self {
            Sym::X => x,
            Sym::XM1 => x - 1,
            Sym::PM2 => p - 2 - x,
            Sym::PM1 => p - 1 - x,
        }
    }

    fn in_subset(self) -> bool {
        matches!(self, Sym::XM1 | Sym::PM1)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sym::X => "x",
            Sym::XM1 => "x-1",
            Sym::PM2 => "p-2-x",
            Sym::PM1 => "p-1-x",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LambdaTuple {
    pub entries: Vec<Sym>,
}

impl LambdaTuple {
    /// The cyclic adjacency conditions.
    pub fn is_valid(&self) -> bool {
        let f = self.entries.len();
        (0..f).all(|i| {
            let next = self.entries[(i + 1) % f];
            match self.entries[i] {
                Sym::X | Sym::XM1 => matches!(next, Sym::X | Sym::PM2),
                Sym::PM2 | Sym::PM1 => matches!(next, Sym::PM1 | Sym::XM1),
            }
        })
    }

    /// `S(λ)` as a bitmask.
    pub fn subset(&self) -> u64 {
        self.entries.iter().enumerate().filter(|(_, s)| s.in_subset()).map(|(i, _)| 1u64 << i).sum()
    }

    /// `l(λ) = |S(λ)|`.
    pub fn length(&self) -> u32 {
        self.subset().count_ones()
    }

    pub fn eval(&self, a: &[u32], p: u32) -> Vec<i64> {
        self.entries.iter().zip(a).map(|(s, &x)| s.eval(x as i64, p as i64)).collect()
    }
}

impl fmt::Display for LambdaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Elements of a subset bitmask of `{0, ..., f-1}`, ascending.
pub fn mask_elements(mask: u64, f: usize) -> Vec<usize> {
    (0..f).filter(|&i| mask >> i & 1 == 1).collect()
}

/// All valid λ-tuples by exhaustive search over `4^f` candidates, ordered by
/// subset bitmask.
pub fn enumerate_lambda(f: usize, _p: u32) -> Vec<LambdaTuple> {
    let syms = [Sym::X, Sym::XM1, Sym::PM2, Sym::PM1];
    let mut out: Vec<LambdaTuple> = (0..4u64.pow(f as u32))
        .map(|code| LambdaTuple { entries: (0..f).map(|i| syms[(code >> (2 * i) & 3) as usize]).collect() })
        .filter(LambdaTuple::is_valid)
        .collect();
    out.sort_by_key(LambdaTuple::subset);
    out
}

/// The unique λ with `S(λ) = mask`.
pub fn lambda_for_subset(f: usize, mask: u64) -> LambdaTuple {
    let entries = (0..f)
        .map(|i| {
            let si = mask >> i & 1 == 1;
            let sn = mask >> ((i + 1) % f) & 1 == 1;
            match (si, sn) {
                (false, false) => Sym::X,
                (false, true) => Sym::PM2,
                (true, false) => Sym::XM1,
                (true, true) => Sym::PM1,
            }
        })
        .collect();
    LambdaTuple { entries }
}

/// Where a determinant twist came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwistSource {
    /// `f = 1`: the factors `(a)` and `(p-1-a) ⊗ D^a`.
    Classical,
    /// `f = 2`: the printed socle diagram.
    PaperTable,
    /// Found by matching Brauer characters.
    OracleDetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JhFactor {
    pub subset: Vec<usize>,
    pub lambda: LambdaTuple,
    pub weight: Vec<u32>,
    pub twist: u64,
    pub source: TwistSource,
}

impl JhFactor {
    pub fn term(&self) -> TensorTerm {
        TensorTerm::canonical(vec![self.weight.clone()], self.twist)
    }
    pub fn dim(&self) -> u64 {
        self.weight.iter().map(|&x| x as u64 + 1).product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JhResult {
    pub p: u32,
    pub f: usize,
    pub r: u64,
    pub a: u64,
    pub digits: Vec<u32>,
    pub generic: bool,
    pub notes: Vec<String>,
    pub factors: Vec<JhFactor>,
}

impl JhResult {
    pub fn total_dim(&self) -> u64 {
        self.factors.iter().map(JhFactor::dim).sum()
    }
}

fn digits(mut a: u64, p: u32, f: usize) -> Vec<u32> {
    (0..f)
        .map(|_| {
            let d = (a % p as u64) as u32;
            a /= p as u64;
            d
        })
        .collect()
}

fn paper_twist(mask: u64, a: u64, dg: &[u32], p: u64) -> u64 {
    match mask {
        0 => 0,
        1 => (1 + dg[1] as u64) * p,
        2 => 1 + dg[0] as u64,
        _ => a,
    }
}

/// Jordan-Hölder factors of `ind_B^G(d^r)`: one weight per λ-tuple
/// evaluated at the base-p digits of `a = r mod (q-1)`, dropping weights
/// with negative entries.
pub fn jh_factors(r: u64, p: u32, f: usize) -> Result<JhResult, JhError> {
    let field = FieldSpec::build(p, f as u32).map_err(|e| JhError::BadInput(e.to_string()))?;
    let brauer = if f >= 3 { Some(Brauer::new(&field)) } else { None };
    jh_factors_with(r, &field, brauer.as_ref())
}

/// [`jh_factors`] reusing a prepared character context (needed for `f >= 3`).
pub fn jh_factors_with(r: u64, field: &Arc<FieldSpec>, brauer: Option<&Brauer>) -> Result<JhResult, JhError> {
    let (p, f) = (field.p, field.f as usize);
    let q1 = field.q() as u64 - 1;
    let a = r % q1;
    let dg = digits(a, p, f);
    let mut notes = Vec::new();
    let mut generic = true;
    if a == 0 {
        generic = false;
        notes.push("a ≡ 0 mod q-1: non-generic, the factor list is not guaranteed".to_string());
    }
    let mut factors = Vec::new();
    for lam in enumerate_lambda(f, p) {
        let w = lam.eval(&dg, p);
        if w.iter().any(|&x| x < 0) {
            generic = false;
            notes.push(format!("dropped λ = {lam}: negative entry in {w:?}"));
            continue;
        }
        let mask = lam.subset();
        let (twist, source) = match f {
            1 => (if mask == 0 { 0 } else { a }, TwistSource::Classical),
            2 => (paper_twist(mask, a, &dg, p as u64) % q1, TwistSource::PaperTable),
            _ => (0, TwistSource::OracleDetermined),
        };
        factors.push(JhFactor {
            subset: mask_elements(mask, f),
            lambda: lam,
            weight: w.iter().map(|&x| x as u32).collect(),
            twist,
            source,
        });
    }
    if f >= 3 {
        let b = brauer.ok_or_else(|| JhError::BadInput("f >= 3 needs a character context".into()))?;
        match oracle_twists(b, &factors, a) {
            Some((twists, count)) => {
                for (fac, e) in factors.iter_mut().zip(twists) {
                    fac.twist = e;
                }
                if count > 1 {
                    notes.push(format!("{count} factor multisets match the character; the first is reported"));
                }
                let weights: Vec<&Vec<u32>> = factors.iter().map(|fac| &fac.weight).collect();
                if (1..weights.len()).any(|i| weights[..i].contains(&weights[i])) {
                    notes.push("repeated weights: which of them carries which twist is a labeling choice".to_string());
                }
            }
            None => notes.push("no twist assignment matches the induced character".to_string()),
        }
    }
    Ok(JhResult { p, f, r, a, digits: dg, generic, notes, factors })
}

type Multiset = HashMap<(u64, u64), i64>;

fn torus_multiset(w: &[u32], e: u64, p: u64, q1: u64) -> Multiset {
    let mut ms: Multiset = HashMap::new();
    let mut ks = vec![0u32; w.len()];
    loop {
        let (mut u, mut v) = (e, e);
        for (i, (&k, &m)) in ks.iter().zip(w).enumerate() {
            let pi = p.pow(i as u32);
            u += k as u64 * pi;
            v += (m - k) as u64 * pi;
        }
        *ms.entry((u % q1, v % q1)).or_insert(0) += 1;
        let mut i = 0;
        loop {
            if i == w.len() {
                return ms;
            }
            if ks[i] < w[i] {
                ks[i] += 1;
                break;
            }
            ks[i] = 0;
            i += 1;
        }
    }
}

fn induced_multiset(r: u64, q1: u64) -> Multiset {
    let mut ms: Multiset = HashMap::new();
    let r = r % q1;
    *ms.entry((0, r)).or_insert(0) += 1;
    *ms.entry((r, 0)).or_insert(0) += 1;
    for u in 0..q1 {
        *ms.entry((u, (r + q1 - u) % q1)).or_insert(0) += 1;
    }
    ms
}

/// Depth-first search over twists, pruned by the split-torus multiset of
/// the induced representation and confirmed by exact Brauer characters.
/// Returns the first confirmed assignment and the number of distinct factor
/// multisets found (capped at 2).
fn oracle_twists(b: &Brauer, factors: &[JhFactor], a: u64) -> Option<(Vec<u64>, usize)> {
    let field = b.field();
    let q1 = field.q() as u64 - 1;
    let p = field.p as u64;
    let target = b.induced_character(0, a);
    let mut order: Vec<usize> = (0..factors.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(factors[i].dim()));
    let mut twists = vec![0u64; factors.len()];
    let mut found: Vec<Vec<u64>> = Vec::new();
    let remaining = induced_multiset(a, q1);

    fn dfs(
        depth: usize,
        order: &[usize],
        factors: &[JhFactor],
        remaining: &mut Multiset,
        twists: &mut Vec<u64>,
        found: &mut Vec<Vec<u64>>,
        ctx: (&Brauer, &Character, u64, u64),
    ) {
        let (b, target, p, q1) = ctx;
        if found.len() >= 2 {
            return;
        }
        if depth == order.len() {
            let chars: Vec<TensorTerm> = factors
                .iter()
                .zip(twists.iter())
                .map(|(fac, &e)| TensorTerm::canonical(vec![fac.weight.clone()], e))
                .collect();
            let sum = b.sum_character(&crate::weights::WeightSum::new(chars));
            if &sum == target {
                found.push(twists.clone());
            }
            return;
        }
        let idx = order[depth];
        // Equal weights get non-decreasing twists, so each multiset of
        // factors is visited once.
        let lo = order[..depth]
            .iter()
            .rev()
            .find(|&&j| factors[j].weight == factors[idx].weight)
            .map_or(0, |&j| twists[j]);
        for e in lo..q1 {
            let ms = torus_multiset(&factors[idx].weight, e, p, q1);
            if ms.iter().all(|(k, &c)| remaining.get(k).copied().unwrap_or(0) >= c) {
                for (k, c) in &ms {
                    *remaining.get_mut(k).expect("present") -= c;
                }
                twists[idx] = e;
                dfs(depth + 1, order, factors, remaining, twists, found, ctx);
                for (k, c) in &ms {
                    *remaining.get_mut(k).expect("present") += c;
                }
            }
        }
    }

    let mut rem = remaining;
    dfs(0, &order, factors, &mut rem, &mut twists, &mut found, (b, &target, p, q1));
    let count = found.len();
    found.into_iter().next().map(|t| (t, count))
}

/// Socle layers of `Q(τ)`: layer `i` holds the subsets `S(λ') ⊇ S(τ)` with
/// `l(λ') = i + l(τ)`, as sorted element lists.
pub fn socle_layers(tau: &LambdaTuple, f: usize) -> Vec<Vec<Vec<usize>>> {
    let base = tau.subset();
    let l = base.count_ones() as usize;
    (0..=f - l)
        .map(|i| {
            let mut layer: Vec<u64> =
                (0..1u64 << f).filter(|&m| m & base == base && m.count_ones() as usize == l + i).collect();
            layer.sort_by_key(|&m| mask_elements(m, f));
            layer.into_iter().map(|m| mask_elements(m, f)).collect()
        })
        .collect()
}

/// A principal series `ind_B^G(det^S ⊗ d^{r'})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PSeries {
    pub s: u64,
    /// `r'` reduced mod `q - 1`.
    pub r_prime: u64,
    pub r_prime_tuple: Vec<i64>,
    pub source: String,
}

impl PSeries {
    pub fn dim(&self, q: u64) -> u64 {
        q + 1
    }
}

impl fmt::Display for PSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.r_prime_tuple.iter().map(i64::to_string).collect();
        write!(f, "ind(D^{} ⊗ d^{}) r'=({})", self.s, self.r_prime, t.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum VertexLabel {
    Weight { lambda: LambdaTuple, weight: Vec<i64> },
    Series(PSeries),
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Weight { weight, .. } => {
                let t: Vec<String> = weight.iter().map(i64::to_string).collect();
                write!(f, "({})", t.join(","))
            }
            VertexLabel::Series(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub subset: Vec<usize>,
    pub label: VertexLabel,
}

/// Subsets of `{0, ..., f-1}` with an edge `u -> u ∪ {i}` for each `i ∉ u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypercubeGraph {
    pub f: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
}

fn hypercube_edges(f: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..1usize << f {
        for i in 0..f {
            if u >> i & 1 == 0 {
                edges.push((u, u | 1 << i));
            }
        }
    }
    edges
}

impl HypercubeGraph {
    fn build(f: usize, label: impl Fn(u64) -> VertexLabel) -> HypercubeGraph {
        let vertices = (0..1u64 << f).map(|m| Vertex { subset: mask_elements(m, f), label: label(m) }).collect();
        HypercubeGraph { f, vertices, edges: hypercube_edges(f) }
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {name} {{\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let set: Vec<String> = v.subset.iter().map(usize::to_string).collect();
            s += &format!("  v{i} [label=\"{{{}}}: {}\"];\n", set.join(","), v.label);
        }
        for (u, v) in &self.edges {
            s += &format!("  v{u} -> v{v};\n");
        }
        s += "}\n";
        s
    }
}

/// Hypercube whose vertex `X` carries the principal series with
/// `S = sum_{l in X} p^l` and `r'_i = r_i - j_i - p j_{i+1}`, `j` the
/// indicator of `X`.
pub fn hypercube_vx(r: &[u32], m_cap: u32, p: u32) -> Result<HypercubeGraph, JhError> {
    let f = r.len();
    if f == 0 {
        return Err(JhError::BadInput("empty r".into()));
    }
    let q = (p as u64).pow(f as u32);
    let bound = m_cap as u64 + m_cap as u64 * q + q;
    if let Some(&ri) = r.iter().find(|&&ri| (ri as u64) < bound) {
        return Err(JhError::BoundViolated(format!("r_i = {ri} < m + mq + q = {bound}")));
    }
    let q1 = q - 1;
    Ok(HypercubeGraph::build(f, |mask| {
        let j: Vec<i64> = (0..f).map(|i| (mask >> i & 1) as i64).collect();
        let s: u64 = (0..f).filter(|&l| j[l] == 1).map(|l| (p as u64).pow(l as u32)).sum();
        let rp: Vec<i64> = (0..f).map(|i| r[i] as i64 - j[i] - p as i64 * j[(i + 1) % f]).collect();
        let rp_int: i64 = rp.iter().enumerate().map(|(i, &x)| x * (p as i64).pow(i as u32)).sum();
        VertexLabel::Series(PSeries {
            s: s % q1,
            r_prime: rp_int.rem_euclid(q1 as i64) as u64,
            r_prime_tuple: rp,
            source: format!("hypercube vertex {:?}", mask_elements(mask, f)),
        })
    }))
}

/// Hypercube whose vertex `X` carries the weight `λ_X(a)`.
pub fn hypercube_lambda(a: &[u32], p: u32) -> HypercubeGraph {
    let f = a.len();
    HypercubeGraph::build(f, |mask| {
        let lambda = lambda_for_subset(f, mask);
        let weight = lambda.eval(a, p);
        VertexLabel::Weight { lambda, weight }
    })
}

/// One conjectural principal series in the `f = 2` sixteen-factor picture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diamond {
    pub top: TensorTerm,
    pub left: TensorTerm,
    pub right: TensorTerm,
    pub bottom: TensorTerm,
}

impl Diamond {
    pub fn terms(&self) -> [&TensorTerm; 4] {
        [&self.top, &self.left, &self.right, &self.bottom]
    }
    pub fn dim(&self) -> u64 {
        self.terms().iter().map(|t| t.dim()).sum()
    }
}

/// The four diamonds of weights suggested for `V_r / V_r^{**}` when `f = 2`.
/// This grouping is conjectural and is emitted as data only.
pub fn conjectural_f2_grouping(a0: u32, a1: u32, p: u32) -> Result<Vec<Diamond>, JhError> {
    let bad = [0, 1, p.wrapping_sub(2), p - 1];
    if bad.contains(&a0) || bad.contains(&a1) || a0 >= p || a1 >= p {
        return Err(JhError::NonGeneric(format!("need a_0, a_1 ∉ {{0, 1, p-2, p-1}}, got ({a0}, {a1})")));
    }
    let params = Params::new(p, 2);
    let (a0, a1, p) = (a0 as i64, a1 as i64, p as i64);
    let a = a0 + p * a1;
    let t = |m: [i64; 2], e: i64| TensorTerm::from_signed(&[m.to_vec()], e, &params).expect("generic entries are nonnegative");
    Ok(vec![
        Diamond {
            top: t([p - a0, p - a1], a),
            left: t([a0 - 2, p - 1 - a1], (1 + a1) * p + 1),
            right: t([p - 1 - a0, a1 - 2], 1 + a0 + p),
            bottom: t([a0 - 1, a1 - 1], p + 1),
        },
        Diamond {
            top: t([p - a0, p - 2 - a1], a + p),
            left: t([a0 - 2, p - 3 - a1], (2 + a1) * p + 1),
            right: t([p - 1 - a0, a1], 1 + a0),
            bottom: t([a0 - 1, a1 + 1], 1),
        },
        Diamond {
            top: t([p - 2 - a0, p - a1], a + 1),
            left: t([a0, p - 1 - a1], (1 + a1) * p),
            right: t([p - 3 - a0, a1 - 2], 2 + a0 + p),
            bottom: t([a0 + 1, a1 - 1], p),
        },
        Diamond {
            top: t([p - 2 - a0, p - 2 - a1], a + p + 1),
            left: t([a0, p - 3 - a1], (2 + a1) * p),
            right: t([p - 3 - a0, a1], 2 + a0),
            bottom: t([a0 + 1, a1 + 1], 0),
        },
    ])
}

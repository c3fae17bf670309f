//! Weights `(m_0,...,m_{f-1}) ⊗ det^e`, formal sums of their tensor products,
//! and the Clebsch-Gordan rewrite rules.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("need 0 <= k <= n, got n = {n}, k = {k}")]
    OutOfRange { n: i64, k: i64 },
    #[error("p divides the binomial coefficient at blocks {0:?}")]
    NotSplit(Vec<usize>),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Characteristic and number of Frobenius blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub p: u32,
    pub f: usize,
}

impl Params {
    pub fn new(p: u32, f: usize) -> Params {
        Params { p, f }
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.f as u32)
    }

    /// Order of the determinant character.
    pub fn det_mod(&self) -> u64 {
        self.q() - 1
    }

    pub fn reduce_det(&self, e: i64) -> u64 {
        e.rem_euclid(self.det_mod() as i64) as u64
    }

    fn ppow(&self, i: usize) -> i64 {
        (self.p as i64).pow(i as u32)
    }

    /// `psi_p(l) = sum l_j p^j`.
    pub fn psi(&self, l: &[u8]) -> i64 {
        l.iter().enumerate().map(|(j, &b)| b as i64 * self.ppow(j)).sum()
    }
}

/// True iff `p` does not divide `C(n, k)`, by comparing base-p digits.
pub fn lucas_test(p: u32, n: i64, k: i64) -> Result<bool, WeightError> {
    if k < 0 || k > n {
        return Err(WeightError::OutOfRange { n, k });
    }
    let (mut n, mut k) = (n, k);
    let p = p as i64;
    while k > 0 || n > 0 {
        if k % p > n % p {
            return Ok(false);
        }
        n /= p;
        k /= p;
    }
    Ok(true)
}

/// A single weight; `None` from the constructors stands for the zero weight.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub m: Vec<u32>,
    pub e: u64,
}

impl Weight {
    pub fn new(m: &[u32], e: u64) -> Weight {
        Weight { m: m.to_vec(), e }
    }

    /// Any negative entry gives the zero weight.
    pub fn from_signed(m: &[i64], e: i64, params: &Params) -> Option<Weight> {
        if m.iter().any(|&x| x < 0) {
            return None;
        }
        Some(Weight { m: m.iter().map(|&x| x as u32).collect(), e: params.reduce_det(e) })
    }

    pub fn dim(&self) -> u64 {
        tuple_dim(&self.m)
    }

    pub fn term(&self) -> TensorTerm {
        TensorTerm::canonical(vec![self.m.clone()], self.e)
    }
}

pub fn tuple_dim(m: &[u32]) -> u64 {
    m.iter().map(|&x| x as u64 + 1).product()
}

/// A tensor product of weights times a power of the determinant.
///
/// The canonical form sorts, for every block, the nonzero entries of all
/// factors in decreasing order and rebuilds the factors from those columns.
/// Tensor products of blockwise pieces commute, so this depends only on the
/// isomorphism type of the product of the blocks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TensorTerm {
    pub factors: Vec<Vec<u32>>,
    pub det: u64,
}

impl TensorTerm {
    pub fn canonical(factors: Vec<Vec<u32>>, det: u64) -> TensorTerm {
        let f = factors.first().map_or(0, |x| x.len());
        let mut cols: Vec<Vec<u32>> = (0..f)
            .map(|i| {
                let mut c: Vec<u32> =
                    factors.iter().map(|x| x[i]).filter(|&v| v > 0).collect();
                c.sort_unstable_by(|a, b| b.cmp(a));
                c
            })
            .collect();
        let depth = cols.iter().map(Vec::len).max().unwrap_or(0).max(1);
        for c in cols.iter_mut() {
            c.resize(depth, 0);
        }
        let factors = (0..depth).map(|k| cols.iter().map(|c| c[k]).collect()).collect();
        TensorTerm { factors, det }
    }

    /// Builds a term from signed factors; `None` if any entry is negative.
    pub fn from_signed(factors: &[Vec<i64>], det: i64, params: &Params) -> Option<TensorTerm> {
        if factors.iter().flatten().any(|&x| x < 0) {
            return None;
        }
        let fs = factors.iter().map(|x| x.iter().map(|&v| v as u32).collect()).collect();
        Some(TensorTerm::canonical(fs, params.reduce_det(det)))
    }

    pub fn dim(&self) -> u64 {
        self.factors.iter().map(|m| tuple_dim(m)).product()
    }

    pub fn single(&self) -> Option<Weight> {
        (self.factors.len() == 1).then(|| Weight::new(&self.factors[0], self.det))
    }

    pub fn twist(&self, e: u64, params: &Params) -> TensorTerm {
        TensorTerm { factors: self.factors.clone(), det: (self.det + e) % params.det_mod() }
    }
}

impl fmt::Display for TensorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|m| {
                let inner: Vec<String> = m.iter().map(u32::to_string).collect();
                format!("({})", inner.join(","))
            })
            .collect();
        write!(f, "{}", parts.join("⊗"))?;
        if self.det != 0 {
            write!(f, "⊗D^{}", self.det)?;
        }
        Ok(())
    }
}

/// A formal direct sum, kept sorted with zero terms removed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightSum {
    pub terms: Vec<TensorTerm>,
}

impl WeightSum {
    pub fn new(mut terms: Vec<TensorTerm>) -> WeightSum {
        terms.sort();
        WeightSum { terms }
    }

    pub fn from_options(terms: impl IntoIterator<Item = Option<TensorTerm>>) -> WeightSum {
        WeightSum::new(terms.into_iter().flatten().collect())
    }

    pub fn dim(&self) -> u64 {
        self.terms.iter().map(TensorTerm::dim).sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-canonicalizes every term and re-sorts; idempotent.
    pub fn normalize(&self, params: &Params) -> WeightSum {
        WeightSum::new(
            self.terms
                .iter()
                .map(|t| TensorTerm::canonical(t.factors.clone(), t.det % params.det_mod()))
                .collect(),
        )
    }

    pub fn extend(&mut self, other: WeightSum) {
        self.terms.extend(other.terms);
        self.terms.sort();
    }
}

impl fmt::Display for WeightSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

fn signed(m: &[u32]) -> Vec<i64> {
    m.iter().map(|&x| x as i64).collect()
}

fn check_len(params: &Params, tuples: &[&[u32]]) -> Result<(), WeightError> {
    if tuples.iter().any(|t| t.len() != params.f) {
        return Err(WeightError::PreconditionViolated(format!(
            "tuples must have length f = {}",
            params.f
        )));
    }
    Ok(())
}

fn binary_vectors(f: usize) -> impl Iterator<Item = Vec<u8>> {
    (0u64..1 << f).map(move |bits| (0..f).map(|j| ((bits >> j) & 1) as u8).collect())
}

/// `m ⊗ n_i e_i ≅ ((m - e_i) ⊗ (n_i - 1)e_i ⊗ det^{p^i}) ⊕ (m + n_i e_i)`.
pub fn split_step(params: &Params, m: &[u32], i: usize, n_i: u32) -> Result<WeightSum, WeightError> {
    check_len(params, &[m])?;
    if i >= params.f || m[i] == 0 || n_i == 0 {
        return Err(WeightError::PreconditionViolated(
            "split_step needs a valid block with m_i, n_i >= 1".into(),
        ));
    }
    if !lucas_test(params.p, (m[i] + n_i) as i64, m[i] as i64)? {
        return Err(WeightError::NotSplit(vec![i]));
    }
    let mut sub = signed(m);
    sub[i] -= 1;
    let mut ni = vec![0i64; params.f];
    ni[i] = n_i as i64 - 1;
    let mut top = signed(m);
    top[i] += n_i as i64;
    Ok(WeightSum::from_options([
        TensorTerm::from_signed(&[sub, ni], params.ppow(i), params),
        TensorTerm::from_signed(&[top], 0, params),
    ]))
}

/// The general rule `⊕_l (m - l + (1-l)⊙n) ⊗ (l⊙n - l) ⊗ det^{psi_p(l)}`,
/// valid when `p ∤ C(m_i + n_i, n_i)` for every block.
pub fn cg_general(params: &Params, m: &[u32], n: &[u32]) -> Result<WeightSum, WeightError> {
    check_len(params, &[m, n])?;
    let bad: Vec<usize> = (0..params.f)
        .filter(|&i| !lucas_test(params.p, (m[i] + n[i]) as i64, n[i] as i64).unwrap_or(false))
        .collect();
    if !bad.is_empty() {
        return Err(WeightError::NotSplit(bad));
    }
    Ok(WeightSum::from_options(binary_vectors(params.f).map(|l| {
        let a: Vec<i64> = (0..params.f)
            .map(|i| m[i] as i64 - l[i] as i64 + (1 - l[i] as i64) * n[i] as i64)
            .collect();
        let b: Vec<i64> = (0..params.f).map(|i| l[i] as i64 * n[i] as i64 - l[i] as i64).collect();
        TensorTerm::from_signed(&[a, b], params.psi(&l), params)
    })))
}

/// Small weights: `0 <= m_i <= n_i`, `m_i + n_i <= p - 1`.
pub fn cg_small(params: &Params, m: &[u32], n: &[u32]) -> Result<WeightSum, WeightError> {
    check_len(params, &[m, n])?;
    let p = params.p;
    if (0..params.f).any(|i| m[i] > n[i] || m[i] + n[i] > p - 1) {
        return Err(WeightError::PreconditionViolated(
            "cg_small needs m_i <= n_i and m_i + n_i <= p - 1".into(),
        ));
    }
    let mut terms = Vec::new();
    let mut k = vec![0u32; params.f];
    loop {
        let w: Vec<i64> = (0..params.f).map(|i| (m[i] + n[i]) as i64 - 2 * k[i] as i64).collect();
        let e: i64 = (0..params.f).map(|i| k[i] as i64 * params.ppow(i)).sum();
        terms.push(TensorTerm::from_signed(&[w], e, params));
        let mut i = 0;
        loop {
            if i == params.f {
                return Ok(WeightSum::from_options(terms));
            }
            if k[i] < m[i] {
                k[i] += 1;
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

fn large_ok(p: u32, a: u32, b: u32) -> bool {
    a <= b && b < p && a + b + 2 >= p && a + b <= 2 * p - 2
}

/// Large weights: `0 <= m_i <= n_i <= p-1`, `p - 2 <= m_i + n_i <= 2p - 2`.
pub fn cg_large(params: &Params, m: &[u32], n: &[u32]) -> Result<WeightSum, WeightError> {
    check_len(params, &[m, n])?;
    let p = params.p as i64;
    if (0..params.f).any(|i| !large_ok(params.p, m[i], n[i])) {
        return Err(WeightError::PreconditionViolated(
            "cg_large needs m_i <= n_i <= p - 1 and p - 2 <= m_i + n_i <= 2p - 2".into(),
        ));
    }
    Ok(WeightSum::from_options(binary_vectors(params.f).map(|l| {
        let (mut a, mut b, mut e) = (Vec::new(), Vec::new(), 0i64);
        for i in 0..params.f {
            let (mi, ni) = (m[i] as i64, n[i] as i64);
            if l[i] == 1 {
                a.push(p - 2 - mi);
                b.push(p - 2 - ni);
                e += (mi + ni + 2 - p) * params.ppow(i);
            } else {
                a.push(mi + ni - (p - 1));
                b.push(p - 1);
            }
        }
        TensorTerm::from_signed(&[a, b], e, params)
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossMode {
    /// Block 0 small, block 1 large.
    LowHigh,
    /// Block 0 large, block 1 small.
    HighLow,
}

/// The two mixed rules for `f = 2`.
pub fn cg_cross_f2(
    params: &Params,
    m: &[u32],
    n: &[u32],
    mode: CrossMode,
) -> Result<WeightSum, WeightError> {
    if params.f != 2 {
        return Err(WeightError::PreconditionViolated("cg_cross_f2 needs f = 2".into()));
    }
    check_len(params, &[m, n])?;
    let pu = params.p;
    let (small, large) = match mode {
        CrossMode::LowHigh => (0, 1),
        CrossMode::HighLow => (1, 0),
    };
    let ok = m[0] <= n[0]
        && m[1] <= n[1]
        && n[0] < pu
        && n[1] < pu
        && m[small] + n[small] < pu
        && large_ok(pu, m[large], n[large]);
    if !ok {
        return Err(WeightError::PreconditionViolated(format!(
            "cg_cross_f2 ({mode:?}) inequalities fail"
        )));
    }
    let p = pu as i64;
    let (m0, m1, n0, n1) = (m[0] as i64, m[1] as i64, n[0] as i64, n[1] as i64);
    let t = |a: [i64; 2], b: [i64; 2], e: i64| TensorTerm::from_signed(&[a.to_vec(), b.to_vec()], e, params);
    let terms = match mode {
        CrossMode::LowHigh => {
            let h = m1 + n1 + 2 - p;
            [
                t([m0 - 1, p - m1 - 2], [n0 - 1, p - n1 - 2], p * h + 1),
                t([m0 + n0, p - m1 - 2], [0, p - n1 - 2], p * h),
                t([m0 - 1, m1 + n1 + 1 - p], [n0 - 1, p - 1], 1),
                t([m0 + n0, m1 + n1 + 1 - p], [0, p - 1], 0),
            ]
        }
        CrossMode::HighLow => {
            let h = m0 + n0 + 2 - p;
            [
                t([p - m0 - 2, m1 - 1], [p - n0 - 2, n1 - 1], h + p),
                t([p - m0 - 2, m1 + n1], [p - n0 - 2, 0], h),
                t([m0 + n0 + 1 - p, m1 - 1], [p - 1, n1 - 1], p),
                t([m0 + n0 + 1 - p, m1 + n1], [p - 1, 0], 0),
            ]
        }
    };
    Ok(WeightSum::from_options(terms))
}

/// `m ⊗ (p^k - 1)𝟙 ≅` the weight whose entry `j` is `(m_{(j+k) mod f} + 1)p^k - 1`.
pub fn tensor_projective(params: &Params, m: &[u32], k: u32) -> Vec<u32> {
    let f = params.f;
    let pk = params.p.pow(k);
    (0..f).map(|j| (m[(j + k as usize) % f] + 1) * pk - 1).collect()
}

/// Which rule the dispatcher used for one rewrite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    Trivial,
    Projective,
    Small,
    Large,
    Cross,
    General,
    SplitStep,
}

/// A term no rule could rewrite, with the blocks where `p` divides the
/// binomial coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub term: TensorTerm,
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialResult {
    pub resolved: WeightSum,
    pub residual: Vec<Residual>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decomposition {
    Full(WeightSum),
    Partial(PartialResult),
}

impl Decomposition {
    pub fn is_full(&self) -> bool {
        matches!(self, Decomposition::Full(_))
    }

    /// Resolved terms plus residual terms, as one formal sum.
    pub fn all_terms(&self) -> WeightSum {
        match self {
            Decomposition::Full(s) => s.clone(),
            Decomposition::Partial(pr) => {
                let mut s = pr.resolved.clone();
                s.extend(WeightSum::new(pr.residual.iter().map(|r| r.term.clone()).collect()));
                s
            }
        }
    }
}

fn projective_k(params: &Params, n: &[u32]) -> Option<u32> {
    let first = n[0] as u64 + 1;
    if n.iter().any(|&x| x as u64 + 1 != first) || first < params.p as u64 {
        return None;
    }
    let mut k = 0;
    let mut v = first;
    while v % params.p as u64 == 0 {
        v /= params.p as u64;
        k += 1;
    }
    (v == 1).then_some(k)
}

/// Tries the rules on `a ⊗ b` in priority order.
fn rewrite_pair(params: &Params, a: &[u32], b: &[u32]) -> Result<(Rule, WeightSum), Vec<usize>> {
    let f = params.f;
    let p = params.p;
    if a.iter().all(|&x| x == 0) || b.iter().all(|&x| x == 0) {
        let w = a.iter().zip(b).map(|(x, y)| x + y).collect();
        return Ok((Rule::Trivial, WeightSum::new(vec![TensorTerm::canonical(vec![w], 0)])));
    }
    if let Some(k) = projective_k(params, b) {
        let w = tensor_projective(params, a, k);
        return Ok((Rule::Projective, WeightSum::new(vec![TensorTerm::canonical(vec![w], 0)])));
    }
    if let Some(k) = projective_k(params, a) {
        let w = tensor_projective(params, b, k);
        return Ok((Rule::Projective, WeightSum::new(vec![TensorTerm::canonical(vec![w], 0)])));
    }
    // Blockwise the two factors commute, so order each block as m_i <= n_i.
    let m: Vec<u32> = (0..f).map(|i| a[i].min(b[i])).collect();
    let n: Vec<u32> = (0..f).map(|i| a[i].max(b[i])).collect();
    let input = TensorTerm::canonical(vec![m.clone(), n.clone()], 0);
    let progress = |s: &WeightSum| !s.terms.contains(&input);
    if let Ok(s) = cg_small(params, &m, &n) {
        return Ok((Rule::Small, s));
    }
    if let Ok(s) = cg_large(params, &m, &n) {
        if progress(&s) {
            return Ok((Rule::Large, s));
        }
    }
    if f == 2 {
        for mode in [CrossMode::LowHigh, CrossMode::HighLow] {
            if let Ok(s) = cg_cross_f2(params, &m, &n, mode) {
                if progress(&s) {
                    return Ok((Rule::Cross, s));
                }
            }
        }
    }
    match cg_general(params, &m, &n) {
        Ok(s) => Ok((Rule::General, s)),
        Err(WeightError::NotSplit(bad)) => {
            let good = (0..f).find(|&i| {
                m[i] > 0 && n[i] > 0 && lucas_test(p, (m[i] + n[i]) as i64, m[i] as i64).unwrap_or(false)
            });
            match good {
                Some(i) => {
                    let step = split_step(params, &m, i, n[i]).expect("block checked");
                    let mut rest = n.clone();
                    rest[i] = 0;
                    let terms = step
                        .terms
                        .into_iter()
                        .map(|t| {
                            let mut fs = t.factors.clone();
                            fs.push(rest.clone());
                            TensorTerm::canonical(fs, t.det)
                        })
                        .collect();
                    Ok((Rule::SplitStep, WeightSum::new(terms)))
                }
                None => Err(bad),
            }
        }
        Err(_) => Err(Vec::new()),
    }
}

const MAX_DEPTH: usize = 64;

/// Rewrites `m ⊗ n` into single weights using, in order: the projective
/// rule, the small, large and mixed `f = 2` rules, the general rule, and
/// finally single-block splitting. Terms with several factors are rewritten
/// pairwise until one factor is left or no rule applies.
pub fn decompose(params: &Params, m: &[u32], n: &[u32]) -> Decomposition {
    decompose_traced(params, m, n).0
}

/// [`decompose`] together with the list of rules applied.
pub fn decompose_traced(params: &Params, m: &[u32], n: &[u32]) -> (Decomposition, Vec<Rule>) {
    let mut queue = vec![(TensorTerm::canonical(vec![m.to_vec(), n.to_vec()], 0), 0usize)];
    let mut done = Vec::new();
    let mut residual = Vec::new();
    let mut trace = Vec::new();
    while let Some((t, depth)) = queue.pop() {
        if t.factors.len() <= 1 {
            done.push(t);
            continue;
        }
        let mut stuck_blocks = Vec::new();
        let mut applied = None;
        'pairs: for i in 0..t.factors.len() {
            for j in i + 1..t.factors.len() {
                match rewrite_pair(params, &t.factors[i], &t.factors[j]) {
                    Ok(r) => {
                        applied = Some((i, j, r));
                        break 'pairs;
                    }
                    Err(b) => stuck_blocks.extend(b),
                }
            }
        }
        match applied {
            Some((i, j, (rule, sum))) if depth < MAX_DEPTH => {
                trace.push(rule);
                let rest: Vec<Vec<u32>> = t
                    .factors
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, x)| x.clone())
                    .collect();
                for s in sum.terms {
                    let mut fs = s.factors;
                    fs.extend(rest.iter().cloned());
                    let det = (s.det + t.det) % params.det_mod();
                    queue.push((TensorTerm::canonical(fs, det), depth + 1));
                }
            }
            _ => {
                stuck_blocks.sort_unstable();
                stuck_blocks.dedup();
                residual.push(Residual { term: t, blocks: stuck_blocks });
            }
        }
    }
    let resolved = WeightSum::new(done);
    let result = if residual.is_empty() {
        Decomposition::Full(resolved)
    } else {
        residual.sort_by(|a, b| a.term.cmp(&b.term));
        Decomposition::Partial(PartialResult { resolved, residual })
    };
    (result, trace)
}

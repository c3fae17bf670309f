//! Exact checks of the tensor-product identities: the split exact
//! sequences, the projective isomorphism and the Clebsch–Gordan rules.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::brauer::Brauer;
use crate::gf::{Elt, FieldSpec};
use crate::group::{generators, GroupElement};
use crate::linalg::{rank, solve_sparse};
use crate::rep::{ModuleError, RepSpace};
use crate::weights::{
    cg_cross_f2, cg_general, cg_large, cg_small, decompose, lucas_test, split_step, tensor_projective, CrossMode,
    Params, TensorTerm, WeightError, WeightSum,
};

/// Largest section system the solver will set up.
pub const SECTION_UNKNOWN_CAP: usize = 2000;

/// A linear map stored as sparse images of the source basis.
struct SparseMap {
    out_dim: usize,
    cols: Vec<Vec<(usize, Elt)>>,
}

impl SparseMap {
    fn apply(&self, field: &FieldSpec, v: &[Elt]) -> Vec<Elt> {
        let k = field.fq();
        let mut out = vec![0; self.out_dim];
        for (col, &c) in self.cols.iter().zip(v) {
            if c != 0 {
                for &(i, a) in col {
                    out[i] = k.add(out[i], k.mul(a, c));
                }
            }
        }
        out
    }

    fn dense_cols(&self) -> impl Iterator<Item = Vec<Elt>> + '_ {
        self.cols.iter().map(|col| {
            let mut v = vec![0; self.out_dim];
            for &(i, a) in col {
                v[i] = a;
            }
            v
        })
    }

    fn rank(&self, field: &FieldSpec) -> usize {
        rank(field.fq(), self.out_dim, self.dense_cols())
    }
}

/// `f(g v) = g f(v)` for every basis vector `v` and every `g` in `gs`.
fn equivariant_on_basis(
    field: &FieldSpec,
    map: &SparseMap,
    src: &RepSpace,
    dst: &RepSpace,
    gs: &[GroupElement],
) -> Result<bool, ModuleError> {
    for g in gs {
        let (a_src, a_dst) = (src.action(g)?, dst.action(g)?);
        for (k, col) in map.dense_cols().enumerate() {
            let mut e = vec![0; src.dim()];
            e[k] = 1;
            if map.apply(field, &a_src.apply(&e)?) != a_dst.apply(&col)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct SesReport {
    pub p: u32,
    pub f: u32,
    pub m: Vec<u32>,
    pub i: usize,
    pub n_i: u32,
    pub source: String,
    pub middle: String,
    pub quotient: String,
    pub source_dim: usize,
    pub middle_dim: usize,
    pub quotient_dim: usize,
    pub injection_rank: usize,
    pub composite_zero: bool,
    pub multiplication_rank: usize,
    pub equivariant: bool,
    pub exact: bool,
    pub section_unknowns: usize,
    pub split: bool,
    pub lucas: bool,
    pub pass: bool,
}

/// `0 → (m - e_i) ⊗ (n_i - 1)e_i ⊗ det^{p^i} → m ⊗ n_i e_i → m + n_i e_i → 0`:
/// exactness, equivariance, and existence of an equivariant section of the
/// multiplication map, compared with Lucas' criterion.
pub fn verify_ses_and_split(field: &Arc<FieldSpec>, m: &[u32], i: usize, n_i: u32) -> Result<SesReport, ModuleError> {
    let f = field.f as usize;
    let p = field.p;
    if m.len() != f || i >= f {
        return Err(ModuleError::DegreeMismatch(format!("m = {m:?}, i = {i} for f = {f}")));
    }
    if m[i] == 0 || n_i == 0 {
        return Err(ModuleError::DegreeMismatch("need m_i, n_i >= 1".into()));
    }
    let params = Params::new(p, f);
    let mut n = vec![0; f];
    n[i] = n_i;
    let mut m_src = m.to_vec();
    m_src[i] -= 1;
    let mut n_src = vec![0; f];
    n_src[i] = n_i - 1;
    let mut w = m.to_vec();
    w[i] += n_i;
    let det = params.reduce_det((p as i64).pow(i as u32));

    let mid = RepSpace::tensor(field, &[m, &n], 0)?;
    let src = RepSpace::tensor(field, &[&m_src, &n_src], det)?;
    let quo = RepSpace::tensor(field, &[&w], 0)?;
    let k = field.fq();
    let minus_one = k.neg(1);

    let iota = SparseMap {
        out_dim: mid.dim(),
        cols: (0..src.dim())
            .map(|idx| {
                let e = src.exponents(idx);
                let (a, b) = e.split_at(f);
                let mut x = [a, b].concat();
                x[i] += 1;
                let mut y = [a, b].concat();
                y[f + i] += 1;
                vec![(mid.index(&x), 1), (mid.index(&y), minus_one)]
            })
            .collect(),
    };
    let mu = SparseMap {
        out_dim: quo.dim(),
        cols: (0..mid.dim())
            .map(|idx| {
                let e = mid.exponents(idx);
                let s: Vec<u32> = (0..f).map(|l| e[l] + e[f + l]).collect();
                vec![(quo.index(&s), 1)]
            })
            .collect(),
    };

    let injection_rank = iota.rank(field);
    let composite_zero = iota.cols.iter().all(|col| {
        let mut v = vec![0; mid.dim()];
        for &(r, a) in col {
            v[r] = a;
        }
        mu.apply(field, &v).iter().all(|&x| x == 0)
    });
    let multiplication_rank = mu.rank(field);
    let exact = injection_rank == src.dim()
        && composite_zero
        && multiplication_rank == quo.dim()
        && src.dim() + quo.dim() == mid.dim();
    let gens = generators(field);
    let equivariant = equivariant_on_basis(field, &iota, &src, &mid, &gens)?
        && equivariant_on_basis(field, &mu, &mid, &quo, &gens)?;

    let (section_unknowns, split) = solve_section(field, &mid, &quo, &mu, &gens)?;
    let lucas = lucas_test(p, (m[i] + n_i) as i64, m[i] as i64).unwrap_or(false);
    let term = |a: &[u32], b: &[u32], e: u64| TensorTerm { factors: vec![a.to_vec(), b.to_vec()], det: e }.to_string();
    Ok(SesReport {
        p,
        f: field.f,
        m: m.to_vec(),
        i,
        n_i,
        source: term(&m_src, &n_src, det),
        middle: term(m, &n, 0),
        quotient: TensorTerm::canonical(vec![w.clone()], 0).to_string(),
        source_dim: src.dim(),
        middle_dim: mid.dim(),
        quotient_dim: quo.dim(),
        injection_rank,
        composite_zero,
        multiplication_rank,
        equivariant,
        exact,
        section_unknowns,
        split,
        lucas,
        pass: exact && equivariant && split == lucas,
    })
}

/// Looks for `s : quo → mid` with `mu s = 1` commuting with the generators.
/// Unknowns are the entries `s[b][w]` with `b`, `w` in the same torus class.
fn solve_section(
    field: &Arc<FieldSpec>,
    mid: &RepSpace,
    quo: &RepSpace,
    mu: &SparseMap,
    gens: &[GroupElement],
) -> Result<(usize, bool), ModuleError> {
    let mut offset = Vec::with_capacity(quo.dim());
    let mut nvars = 0;
    for w in 0..quo.dim() {
        offset.push(nvars);
        nvars += mid.members(quo.class_of(w)).len();
    }
    if nvars > SECTION_UNKNOWN_CAP {
        return Err(ModuleError::DimensionOverflow { dim: nvars, cap: SECTION_UNKNOWN_CAP });
    }
    let var = |b: usize, w: usize| (mid.class_of(b) == quo.class_of(w)).then(|| offset[w] + mid.local(b));
    let k = field.fq();
    let mut eqs: Vec<(Vec<(usize, Elt)>, Elt)> = Vec::new();

    // mu s = 1.
    for w in 0..quo.dim() {
        let mut rows: HashMap<usize, Vec<(usize, Elt)>> = HashMap::new();
        for &b in mid.members(quo.class_of(w)) {
            for &(w2, a) in &mu.cols[b as usize] {
                rows.entry(w2).or_default().push((var(b as usize, w).expect("same class"), a));
            }
        }
        for w2 in quo.members(quo.class_of(w)) {
            let terms = rows.remove(&(*w2 as usize)).unwrap_or_default();
            eqs.push((terms, (*w2 as usize == w) as Elt));
        }
    }
    // s g = g s.
    for g in gens {
        let gq = quo.dense_matrix(g)?;
        let gm = mid.dense_matrix(g)?;
        for w in 0..quo.dim() {
            for b in 0..mid.dim() {
                let mut terms = Vec::new();
                for (w2, row) in gq.iter().enumerate() {
                    if row[w] != 0 {
                        if let Some(v) = var(b, w2) {
                            terms.push((v, row[w]));
                        }
                    }
                }
                for (b2, &a) in gm[b].iter().enumerate() {
                    if a != 0 {
                        if let Some(v) = var(b2, w) {
                            terms.push((v, k.neg(a)));
                        }
                    }
                }
                if !terms.is_empty() {
                    eqs.push((terms, 0));
                }
            }
        }
    }
    Ok((nvars, solve_sparse(k, nvars, eqs).is_some()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectiveReport {
    pub p: u32,
    pub f: u32,
    pub m: Vec<u32>,
    pub k: u32,
    pub target: Vec<u32>,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub spot_checks: usize,
    pub equivariant: bool,
    pub pass: bool,
}

/// `m ⊗ (p^k - 1)𝟙 → V_target`, `P ⊗ Q ↦ β_k(P) Q`, where `β_k` moves block
/// `j` to block `j - k` and raises the variables to the `p^k`-th power.
pub fn verify_projective(
    field: &Arc<FieldSpec>,
    m: &[u32],
    k: u32,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ProjectiveReport, ModuleError> {
    let f = field.f as usize;
    let p = field.p;
    if m.len() != f {
        return Err(ModuleError::DegreeMismatch(format!("need {f} degrees, got {}", m.len())));
    }
    let params = Params::new(p, f);
    let pk = p.pow(k);
    let ones = vec![pk - 1; f];
    let target = tensor_projective(&params, m, k);
    let src = RepSpace::tensor(field, &[m, &ones], 0)?;
    let dst = RepSpace::tensor(field, &[&target], 0)?;
    let phi = SparseMap {
        out_dim: dst.dim(),
        cols: (0..src.dim())
            .map(|idx| {
                let e = src.exponents(idx);
                let t: Vec<u32> = (0..f).map(|t| e[(t + k as usize) % f] * pk + e[f + t]).collect();
                vec![(dst.index(&t), 1)]
            })
            .collect(),
    };
    let rank = phi.rank(field);
    let fq = field.fq();
    let mut equivariant = true;
    for _ in 0..samples {
        let g = GroupElement::random(field, rng);
        let v: Vec<Elt> = (0..src.dim()).map(|_| rng.gen_range(0..fq.size()) as Elt).collect();
        let lhs = phi.apply(field, &src.act(&g, &v)?);
        let rhs = dst.act(&g, &phi.apply(field, &v))?;
        equivariant &= lhs == rhs;
    }
    Ok(ProjectiveReport {
        p,
        f: field.f,
        m: m.to_vec(),
        k,
        target,
        source_dim: src.dim(),
        target_dim: dst.dim(),
        rank,
        spot_checks: samples,
        equivariant,
        pass: equivariant && rank == dst.dim() && src.dim() == dst.dim(),
    })
}

/// Which rewrite produced the right-hand side of a suite instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CgRule {
    SplitStep { i: usize, n_i: u32 },
    General,
    Small,
    Large,
    Cross(CrossMode),
    Projective { k: u32 },
    Decompose,
}

#[derive(Debug, Clone, Serialize)]
pub struct CgCase {
    pub p: u32,
    pub f: usize,
    pub m: Vec<u32>,
    pub n: Vec<u32>,
    pub rule: CgRule,
}

impl CgCase {
    pub fn new(p: u32, m: &[u32], n: &[u32], rule: CgRule) -> CgCase {
        CgCase { p, f: m.len(), m: m.to_vec(), n: n.to_vec(), rule }
    }

    pub fn label(&self) -> String {
        let lhs = TensorTerm { factors: vec![self.m.clone(), self.n.clone()], det: 0 };
        format!("{:?} p={} {lhs}", self.rule, self.p)
    }

    pub fn rhs(&self) -> Result<(WeightSum, bool), WeightError> {
        let params = Params::new(self.p, self.f);
        let full = |s| Ok((s, true));
        match self.rule {
            CgRule::SplitStep { i, n_i } => full(split_step(&params, &self.m, i, n_i)?),
            CgRule::General => full(cg_general(&params, &self.m, &self.n)?),
            CgRule::Small => full(cg_small(&params, &self.m, &self.n)?),
            CgRule::Large => full(cg_large(&params, &self.m, &self.n)?),
            CgRule::Cross(mode) => full(cg_cross_f2(&params, &self.m, &self.n, mode)?),
            CgRule::Projective { k } => {
                full(WeightSum::new(vec![TensorTerm::canonical(vec![tensor_projective(&params, &self.m, k)], 0)]))
            }
            CgRule::Decompose => {
                let d = decompose(&params, &self.m, &self.n);
                Ok((d.all_terms(), d.is_full()))
            }
        }
    }
}

/// The instances checked by `verify --target cg`.
pub fn cg_suite() -> Vec<CgCase> {
    use CgRule::*;
    vec![
        CgCase::new(5, &[1], &[2], SplitStep { i: 0, n_i: 2 }),
        CgCase::new(5, &[2, 1], &[1, 0], SplitStep { i: 0, n_i: 1 }),
        CgCase::new(5, &[2, 1], &[1, 1], General),
        CgCase::new(7, &[1, 1], &[2, 2], General),
        CgCase::new(7, &[1, 1], &[2, 2], Small),
        CgCase::new(5, &[1], &[2], Small),
        CgCase::new(5, &[2], &[3], Large),
        CgCase::new(3, &[1, 1], &[2, 2], Large),
        CgCase::new(5, &[1, 2], &[1, 3], Cross(CrossMode::LowHigh)),
        CgCase::new(5, &[2, 1], &[3, 1], Cross(CrossMode::HighLow)),
        CgCase::new(3, &[1, 2], &[2, 2], Projective { k: 1 }),
        CgCase::new(3, &[1], &[2], Projective { k: 1 }),
        CgCase::new(5, &[2, 1], &[1, 1], Decompose),
        CgCase::new(3, &[1], &[5], Decompose),
    ]
}

/// The exact-sequence instances checked by `verify --target ses`.
pub fn ses_suite() -> Vec<(u32, u32, Vec<u32>, usize, u32)> {
    vec![
        (5, 1, vec![1], 0, 2),
        (3, 1, vec![2], 0, 2),
        (3, 2, vec![1, 1], 1, 1),
        (5, 2, vec![2, 1], 0, 1),
        (7, 1, vec![2], 0, 3),
        (5, 1, vec![2], 0, 3),
    ]
}

/// Largest tensor whose module character is also computed directly.
pub const MODULE_CHECK_CAP: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct CgReport {
    pub label: String,
    pub case: CgCase,
    pub lhs: String,
    pub rhs: String,
    pub full: bool,
    pub lhs_dim: u64,
    pub rhs_dim: u64,
    pub character_equal: bool,
    /// Character of the materialized tensor against the right-hand side.
    pub module_character_equal: Option<bool>,
    pub pass: bool,
}

pub fn verify_cg(case: &CgCase, brauer: &Brauer) -> Result<CgReport, ModuleError> {
    let field = brauer.field();
    let (rhs, full) = case.rhs().map_err(|e| ModuleError::DegreeMismatch(e.to_string()))?;
    let lhs = TensorTerm { factors: vec![case.m.clone(), case.n.clone()], det: 0 };
    let rhs_char = brauer.sum_character(&rhs);
    let character_equal = brauer.term_character(&lhs) == rhs_char;
    let lhs_dim = lhs.dim();
    let module_character_equal = if lhs_dim as usize <= MODULE_CHECK_CAP {
        let space = RepSpace::tensor(field, &[&case.m, &case.n], 0)?;
        Some(brauer.module_character(&space, &space.full_subspace(), &space.zero_subspace())? == rhs_char)
    } else {
        None
    };
    Ok(CgReport {
        label: case.label(),
        case: case.clone(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        full,
        lhs_dim,
        rhs_dim: rhs.dim(),
        character_equal,
        module_character_equal,
        pass: lhs_dim == rhs.dim() && character_equal && module_character_equal != Some(false),
    })
}

/// Runs every suite instance, sharing one character table per field.
pub fn verify_cg_suite(cases: &[CgCase]) -> Result<Vec<CgReport>, ModuleError> {
    let mut tables: HashMap<(u32, usize), Brauer> = HashMap::new();
    cases
        .iter()
        .map(|c| {
            let b = match tables.entry((c.p, c.f)) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => {
                    let field = FieldSpec::build(c.p, c.f as u32)
                        .map_err(|e| ModuleError::DegreeMismatch(e.to_string()))?;
                    e.insert(Brauer::new(&field))
                }
            };
            verify_cg(c, b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn ses_split_matches_lucas() {
        for (p, f, m, i, n) in ses_suite() {
            let field = FieldSpec::build(p, f).unwrap();
            let r = verify_ses_and_split(&field, &m, i, n).unwrap();
            assert!(r.exact && r.equivariant, "{r:?}");
            assert_eq!(r.split, r.lucas, "{r:?}");
        }
        let field = FieldSpec::build(3, 1).unwrap();
        let r = verify_ses_and_split(&field, &[2], 0, 2).unwrap();
        assert!(!r.split && r.pass);
    }

    #[test]
    fn projective_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let field = FieldSpec::build(3, 2).unwrap();
        let r = verify_projective(&field, &[1, 2], 1, 20, &mut rng).unwrap();
        assert_eq!((r.target.clone(), r.rank), (vec![8, 5], 54));
        assert!(r.pass);
        let r = verify_projective(&field, &[1, 2], 0, 5, &mut rng).unwrap();
        assert_eq!(r.rank, 6);
        assert!(r.pass);
        let field = FieldSpec::build(3, 1).unwrap();
        let r = verify_projective(&field, &[1], 1, 20, &mut rng).unwrap();
        assert_eq!(r.rank, 6);
        assert!(r.pass);
    }

    #[test]
    fn cg_suite_passes() {
        for r in verify_cg_suite(&cg_suite()).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn broken_injection_is_detected() {
        // A map that ignores the Frobenius twist is not equivariant.
        let field = FieldSpec::build(3, 2).unwrap();
        let src = RepSpace::tensor(&field, &[&[1, 0]], 0).unwrap();
        let dst = RepSpace::tensor(&field, &[&[0, 1]], 0).unwrap();
        let map = SparseMap { out_dim: 2, cols: vec![vec![(0, 1)], vec![(1, 1)]] };
        assert!(!equivariant_on_basis(&field, &map, &src, &dst, &generators(&field)).unwrap());
    }
}

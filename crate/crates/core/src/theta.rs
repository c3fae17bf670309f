//! The theta filtration of `V_r / V_r^{(m+1)}` and its principal series
//! sub-quotients.

use std::sync::Arc;

use serde::Serialize;

use crate::brauer::Brauer;
use crate::gf::FieldSpec;
use crate::jh::PSeries;
use crate::linalg::{left_kernel, GradedSubspace};
use crate::rep::{mult_monomial, theta_degree, theta_multiples, theta_product, ModuleError, RepSpace};

/// Exponents `j` of `prod theta_i^{j_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ThetaSpec {
    pub j: Vec<u32>,
}

impl ThetaSpec {
    /// `S_P = sum j_l p^l`.
    pub fn s(&self, p: u32) -> u64 {
        self.j.iter().enumerate().map(|(l, &x)| x as u64 * (p as u64).pow(l as u32)).sum()
    }

    /// `r'_i = r_i - j_i - p j_{i+1}`.
    pub fn r_prime(&self, r: &[u32], p: u32) -> Vec<i64> {
        let d = theta_degree(&self.j, p);
        r.iter().zip(d).map(|(&a, b)| a as i64 - b as i64).collect()
    }
}

/// The tuples `j` with `0 <= j_i <= mu`, some `j_i = mu` and `sum j = mu + n`,
/// grouped by the first index equal to `mu` and lex-descending within a group.
pub fn row_tuples(f: usize, mu: u32, n: u32) -> Vec<Vec<u32>> {
    let total = mu + n;
    let mut all = Vec::new();
    let mut j = vec![0u32; f];
    loop {
        if j.iter().sum::<u32>() == total && j.contains(&mu) {
            all.push(j.clone());
        }
        let mut i = 0;
        loop {
            if i == f {
                all.sort_by(|a, b| {
                    let fa = a.iter().position(|&x| x == mu);
                    let fb = b.iter().position(|&x| x == mu);
                    fa.cmp(&fb).then_with(|| b.cmp(a))
                });
                return all;
            }
            if j[i] < mu {
                j[i] += 1;
                break;
            }
            j[i] = 0;
            i += 1;
        }
    }
}

/// All cells of level `mu`, bottom row (`n = (f-1) mu`) first.
pub fn level_tuples(f: usize, mu: u32) -> Vec<Vec<u32>> {
    (0..=(f as u32 - 1) * mu).rev().flat_map(|n| row_tuples(f, mu, n)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub level: u32,
    pub row: u32,
    pub theta: ThetaSpec,
    pub dim: usize,
    pub series: PSeries,
    /// Some `r'_i < q`, where the principal series statement is not claimed.
    pub low_r_prime: bool,
}

/// The materialized filtration: for each cell the pair (numerator, denominator).
pub struct Filtration {
    pub field: Arc<FieldSpec>,
    pub r: Vec<u32>,
    pub m: u32,
    pub space: RepSpace,
    pub cells: Vec<Cell>,
    pub steps: Vec<(GradedSubspace, GradedSubspace)>,
    /// `V_r^{(mu)}` for `mu = 0 ..= m + 1`.
    pub levels: Vec<GradedSubspace>,
    /// Each level's cells exhaust `V^{(mu)} / V^{(mu+1)}`.
    pub levels_complete: bool,
}

impl Filtration {
    pub fn quotient_dim(&self) -> usize {
        self.space.dim() - self.levels[self.m as usize + 1].dim()
    }

    pub fn expected_quotient_dim(&self) -> usize {
        (self.m as usize + 1).pow(self.field.f) * (self.field.q() as usize + 1)
    }
}

/// `m + mq + q`.
pub fn principal_bound(m: u32, q: u32) -> u64 {
    m as u64 + m as u64 * q as u64 + q as u64
}

/// `V^{(mu)} = sum_i theta_i^mu V_{r - deg}`.
pub fn theta_power_submodule(field: &Arc<FieldSpec>, r: &[u32], mu: u32, space: &RepSpace) -> Result<GradedSubspace, ModuleError> {
    if mu == 0 {
        return Ok(space.full_subspace());
    }
    let f = field.f as usize;
    let mut s = space.zero_subspace();
    for i in 0..f {
        let mut j = vec![0; f];
        j[i] = mu;
        s = s.sum(&theta_multiples(field, r, &j, space)?).expect("same grading");
    }
    Ok(s)
}

/// Builds every cell of the filtration of `V_r / V_r^{(m+1)}`. Without
/// `force`, requires `r_i >= m + mq + q`.
pub fn theta_filtration(field: &Arc<FieldSpec>, r: &[u32], m: u32, force: bool) -> Result<Filtration, ModuleError> {
    let q = field.q();
    let p = field.p;
    let f = field.f as usize;
    if r.len() != f {
        return Err(ModuleError::DegreeMismatch(format!("need {f} degrees, got {}", r.len())));
    }
    let bound = principal_bound(m, q);
    if !force {
        if let Some(&ri) = r.iter().find(|&&ri| (ri as u64) < bound) {
            return Err(ModuleError::BoundViolated(format!("r_i = {ri} < m + mq + q = {bound}")));
        }
    }
    let space = RepSpace::weight(field, r)?;
    let levels: Vec<GradedSubspace> =
        (0..=m + 1).map(|mu| theta_power_submodule(field, r, mu, &space)).collect::<Result<_, _>>()?;
    let q1 = q as i64 - 1;
    let mut cells = Vec::new();
    let mut steps = Vec::new();
    let mut complete = true;
    for mu in 0..=m {
        let mut den = levels[mu as usize + 1].clone();
        for n in (0..=(f as u32 - 1) * mu).rev() {
            for j in row_tuples(f, mu, n) {
                let spec = ThetaSpec { j: j.clone() };
                let img = theta_multiples(field, r, &j, &space)?;
                let num = den.sum(&img).expect("same grading");
                let rp = spec.r_prime(r, p);
                let rp_int: i64 = rp.iter().enumerate().map(|(i, &x)| x * (p as i64).pow(i as u32)).sum();
                cells.push(Cell {
                    level: mu,
                    row: n,
                    dim: num.dim() - den.dim(),
                    series: PSeries {
                        s: spec.s(p) % q1 as u64,
                        r_prime: rp_int.rem_euclid(q1) as u64,
                        r_prime_tuple: rp.clone(),
                        source: format!("theta cell j = {j:?}"),
                    },
                    low_r_prime: rp.iter().any(|&x| x < q as i64),
                    theta: spec,
                });
                steps.push((num.clone(), den));
                den = num;
            }
        }
        complete &= den == levels[mu as usize];
    }
    Ok(Filtration { field: field.clone(), r: r.to_vec(), m, space, cells, steps, levels, levels_complete: complete })
}

#[derive(Debug, Clone, Serialize)]
pub struct Iso1Report {
    pub theta: ThetaSpec,
    pub s: u64,
    pub r_prime: Vec<i64>,
    pub subquotient_dim: usize,
    pub expected_dim: usize,
    pub kernel_dim: usize,
    pub kernel_matches: bool,
    pub character_matches: bool,
    pub classes_checked: usize,
    pub pass: bool,
}

/// `V_{r'}^* = sum_i theta_i V_{r' - deg theta_i}` inside `V_{r'}`.
pub fn star_submodule(field: &Arc<FieldSpec>, r: &[u32], space: &RepSpace) -> Result<GradedSubspace, ModuleError> {
    theta_power_submodule(field, r, 1, space)
}

/// Checks one cell: `Q ↦ PQ + den` has kernel `V_{r'}^*`, the image has
/// dimension `q + 1`, and its Brauer character is that of
/// `ind(det^{S_P} ⊗ d^{r'})`.
pub fn verify_cell(filt: &Filtration, index: usize, brauer: &Brauer) -> Result<Iso1Report, ModuleError> {
    let field = &filt.field;
    let q = field.q();
    let cell = &filt.cells[index];
    let (num, den) = &filt.steps[index];
    let rp = &cell.series.r_prime_tuple;
    if let Some(&x) = rp.iter().find(|&&x| x < q as i64) {
        return Err(ModuleError::BoundViolated(format!("r'_i = {x} < q = {q}")));
    }
    let rp_u: Vec<u32> = rp.iter().map(|&x| x as u32).collect();
    let src = RepSpace::weight(field, &rp_u)?;
    let poly = theta_product(&cell.theta.j, field);
    let dst = &filt.space;

    // Kernel of Q ↦ PQ mod den, class by class in the source.
    let mut kernel = src.zero_subspace();
    for c in 0..src.nclasses() {
        let members = src.members(c);
        if members.is_empty() {
            continue;
        }
        let mut dst_class = None;
        let residues: Vec<Vec<_>> = members
            .iter()
            .map(|&idx| {
                let v = mult_monomial(&poly, &src, idx as usize, dst);
                let comps = dst.components(&v);
                let (dc, mut w) = comps.into_iter().next().expect("P Q is nonzero");
                dst_class = Some(dc);
                den.part(dc).reduce(&mut w);
                w
            })
            .collect();
        let n = dst.members(dst_class.expect("nonempty")).len();
        for k in left_kernel(field.fq(), n, &residues) {
            kernel.insert(c, k);
        }
    }
    let star = star_submodule(field, &rp_u, &src)?;
    let kernel_matches = kernel == star;
    let expected = q as usize + 1;
    let character_matches = brauer.module_character(dst, num, den)?
        == brauer.induced_character(cell.series.s, cell.series.r_prime);
    let pass = kernel_matches && character_matches && cell.dim == expected && src.dim() - kernel.dim() == cell.dim;
    Ok(Iso1Report {
        theta: cell.theta.clone(),
        s: cell.series.s,
        r_prime: rp.clone(),
        subquotient_dim: cell.dim,
        expected_dim: expected,
        kernel_dim: kernel.dim(),
        kernel_matches,
        character_matches,
        classes_checked: brauer.classes().len(),
        pass,
    })
}

/// Standalone check of the cell `j` inside the filtration of level `m`.
pub fn verify_iso1(field: &Arc<FieldSpec>, r: &[u32], j: &[u32], m: u32, brauer: &Brauer) -> Result<Iso1Report, ModuleError> {
    let spec = ThetaSpec { j: j.to_vec() };
    let q = field.q() as i64;
    if let Some(&x) = spec.r_prime(r, field.p).iter().find(|&&x| x < q) {
        return Err(ModuleError::BoundViolated(format!("r'_i = {x} < q = {q}")));
    }
    let filt = theta_filtration(field, r, m, true)?;
    let idx = filt
        .cells
        .iter()
        .position(|c| c.theta == spec)
        .ok_or_else(|| ModuleError::DegreeMismatch(format!("j = {j:?} is not a cell of level <= {m}")))?;
    verify_cell(&filt, idx, brauer)
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionReport {
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub equal: bool,
}

/// `<prod theta_i^m> ∩ V^{(m+1)} = sum_l <(prod_{i≠l} theta_i^m) theta_l^{m+1}>`.
pub fn verify_intersection(field: &Arc<FieldSpec>, r: &[u32], m: u32) -> Result<IntersectionReport, ModuleError> {
    let f = field.f as usize;
    let space = RepSpace::weight(field, r)?;
    let top = theta_multiples(field, r, &vec![m; f], &space)?;
    let next = theta_power_submodule(field, r, m + 1, &space)?;
    let lhs = top.intersect(&next).expect("same grading");
    let mut rhs = space.zero_subspace();
    for l in 0..f {
        let mut j = vec![m; f];
        j[l] += 1;
        rhs = rhs.sum(&theta_multiples(field, r, &j, &space)?).expect("same grading");
    }
    Ok(IntersectionReport { lhs_dim: lhs.dim(), rhs_dim: rhs.dim(), equal: lhs == rhs })
}

//! The eight acceptance criteria, shared by the `acceptance` target and the
//! regular integration tests. Each returns a one-line summary or the reason
//! for failure.

#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thetarep::brauer::{brute_force_pregular_count, pregular_classes, Brauer};
use thetarep::gf::{Elt, FieldSpec, Gf};
use thetarep::group::{closure, generators};
use thetarep::jh::{enumerate_lambda, hypercube_lambda, hypercube_vx, jh_factors_with, lambda_for_subset, VertexLabel};
use thetarep::linalg::Subspace;
use thetarep::theta::{theta_filtration, verify_cell, verify_intersection};
use thetarep::verify::{cg_suite, ses_suite, verify_cg_suite, verify_projective, verify_ses_and_split};
use thetarep::weights::TensorTerm;

pub type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn build(p: u32, f: u32) -> Result<Arc<FieldSpec>, String> {
    FieldSpec::build(p, f).map_err(|e| e.to_string())
}

/// `(p, f, m, r, expected dim V_r / V_r^{(m+1)})`.
pub fn filtration_instances() -> Vec<(u32, u32, u32, Vec<u32>, usize)> {
    vec![
        (3, 1, 1, vec![9], 8),
        (3, 2, 1, vec![19, 19], 40),
        (3, 2, 2, vec![29, 29], 90),
        (5, 1, 2, vec![22], 18),
    ]
}

pub fn criterion_1() -> Outcome {
    let mut dims = Vec::new();
    for (p, f, m, r, want) in filtration_instances() {
        let field = build(p, f)?;
        let filt = theta_filtration(&field, &r, m, false).map_err(|e| e.to_string())?;
        let got = filt.quotient_dim();
        ensure(got == want && got == filt.expected_quotient_dim(), || {
            format!("p={p} f={f} m={m} r={r:?}: dim {got}, expected {want}")
        })?;
        dims.push(got);
    }
    Ok(format!("quotient dims {dims:?}"))
}

pub fn criterion_2() -> Outcome {
    let mut cells = 0;
    for (p, f, m, r, _) in filtration_instances() {
        let field = build(p, f)?;
        let brauer = Brauer::new(&field);
        let classes = (field.q() * (field.q() - 1)) as usize;
        ensure(brauer.classes().len() == classes, || format!("q={}: wrong class count", field.q()))?;
        let filt = theta_filtration(&field, &r, m, false).map_err(|e| e.to_string())?;
        ensure(filt.levels_complete, || format!("r={r:?}: cells do not exhaust the levels"))?;
        for i in 0..filt.cells.len() {
            let rep = verify_cell(&filt, i, &brauer).map_err(|e| format!("r={r:?} cell {i}: {e}"))?;
            ensure(rep.pass, || format!("r={r:?}: {rep:?}"))?;
            cells += 1;
        }
    }
    Ok(format!("{cells} cells: dim q+1, kernel V_r'^*, induced character"))
}

pub fn criterion_3() -> Outcome {
    for (p, f, m, r) in [(3, 2, 1, vec![19, 19]), (3, 2, 2, vec![29, 29])] {
        let field = build(p, f)?;
        let rep = verify_intersection(&field, &r, m).map_err(|e| e.to_string())?;
        ensure(rep.equal, || format!("r={r:?} m={m}: {rep:?}"))?;
    }
    Ok("intersection identity for (19,19) m=1 and (29,29) m=2".into())
}

pub fn criterion_4() -> Outcome {
    let cases = cg_suite();
    let reports = verify_cg_suite(&cases).map_err(|e| e.to_string())?;
    let primes: HashSet<u32> = cases.iter().map(|c| c.p).collect();
    let degrees: HashSet<usize> = cases.iter().map(|c| c.f).collect();
    ensure(cases.len() >= 10 && primes.len() == 3 && degrees.len() == 2, || "suite coverage".into())?;
    for r in &reports {
        ensure(r.pass, || format!("{r:?}"))?;
    }
    let mut split = 0;
    let mut not_split = 0;
    for (p, f, m, i, n) in ses_suite() {
        let field = build(p, f)?;
        let rep = verify_ses_and_split(&field, &m, i, n).map_err(|e| e.to_string())?;
        ensure(rep.pass, || format!("{rep:?}"))?;
        if rep.split {
            split += 1;
        } else {
            not_split += 1;
        }
    }
    let neg = verify_ses_and_split(&build(3, 1)?, &[2], 0, 2).map_err(|e| e.to_string())?;
    ensure(!neg.split && !neg.lucas, || "p=3 (2)⊗(2) must not split".into())?;
    Ok(format!("{} rule instances; {split} split and {not_split} non-split sequences match Lucas", reports.len()))
}

pub fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(thetarep::report::DEFAULT_SEED);
    let mut ranks = Vec::new();
    for (p, f, m, want) in [(3, 2, vec![1, 2], 54), (3, 1, vec![1], 6)] {
        let field = build(p, f)?;
        let rep = verify_projective(&field, &m, 1, 20, &mut rng).map_err(|e| e.to_string())?;
        ensure(rep.rank == want && rep.pass && rep.spot_checks == 20, || format!("{rep:?}"))?;
        ranks.push(rep.rank);
    }
    Ok(format!("ranks {ranks:?}, 20 equivariance checks each"))
}

pub fn criterion_6() -> Outcome {
    for f in 1..=6usize {
        let lams = enumerate_lambda(f, 5);
        ensure(lams.len() == 1 << f, || format!("f={f}: |P| = {}", lams.len()))?;
        let subsets: HashSet<u64> = lams.iter().map(|l| l.subset()).collect();
        ensure(subsets.len() == 1 << f, || format!("f={f}: S not injective"))?;
        for l in &lams {
            ensure(lambda_for_subset(f, l.subset()) == *l, || format!("f={f}: S not inverted at {l}"))?;
        }
    }
    let field = build(7, 2)?;
    let brauer = Brauer::new(&field);
    let res = jh_factors_with(23, &field, Some(&brauer)).map_err(|e| e.to_string())?;
    let got: Vec<(Vec<u32>, u64)> = res.factors.iter().map(|f| (f.weight.clone(), f.twist)).collect();
    let want = vec![(vec![2, 3], 0), (vec![1, 2], 28), (vec![3, 2], 3), (vec![4, 3], 23)];
    ensure(got == want, || format!("factors {got:?}"))?;
    ensure(res.total_dim() == 50, || format!("total {}", res.total_dim()))?;
    // Recover each twist from the induced character minus the other factors.
    let whole = brauer.induced_character(0, 23);
    for (i, fac) in res.factors.iter().enumerate() {
        let mut residual = whole.clone();
        for (j, other) in res.factors.iter().enumerate() {
            if j != i {
                residual = Brauer::sub(&residual, &brauer.term_character(&other.term()));
            }
        }
        let w = TensorTerm::canonical(vec![fac.weight.clone()], 0);
        let e = brauer.solve_det_twist(&w, &residual).map_err(|e| format!("{}: {e}", fac.term()))?;
        ensure(e == Some(fac.twist), || format!("{}: recovered {e:?}", fac.term()))?;
    }
    Ok("|P| = 2^f and S bijective for f <= 6; (7,2,a=(2,3)) twists 0, 28, 3, 23 recovered uniquely".into())
}

pub fn criterion_7() -> Outcome {
    for f in 1..=6usize {
        let g = hypercube_lambda(&vec![2; f], 7);
        let r = vec![2 + 2 * 2u32.pow(f as u32); f];
        let h = hypercube_vx(&r, 1, 2).map_err(|e| e.to_string())?;
        for graph in [&g, &h] {
            ensure(graph.vertices.len() == 1 << f && graph.edges.len() == f << (f - 1), || {
                format!("f={f}: {} vertices, {} edges", graph.vertices.len(), graph.edges.len())
            })?;
        }
    }
    let g = hypercube_vx(&[19, 19], 1, 3).map_err(|e| e.to_string())?;
    for v in &g.vertices {
        let VertexLabel::Series(ps) = &v.label else { return Err("expected series labels".into()) };
        let j: Vec<i64> = (0..2).map(|i| v.subset.contains(&i) as i64).collect();
        let s: u64 = v.subset.iter().map(|&l| 3u64.pow(l as u32)).sum();
        let rp: Vec<i64> = (0..2).map(|i| 19 - j[i] - 3 * j[(i + 1) % 2]).collect();
        ensure(ps.s == s && ps.r_prime_tuple == rp, || format!("{:?}: {ps:?}", v.subset))?;
    }
    Ok("2^f vertices and f 2^(f-1) edges for f <= 6; V_X labels for (3,2,(19,19))".into())
}

fn field_laws(k: &Gf, triples: impl Iterator<Item = (Elt, Elt, Elt)>) -> Result<(), String> {
    let p = k.p();
    for (a, b, c) in triples {
        let ok = k.add(a, k.add(b, c)) == k.add(k.add(a, b), c)
            && k.mul(a, k.mul(b, c)) == k.mul(k.mul(a, b), c)
            && k.add(a, b) == k.add(b, a)
            && k.mul(a, b) == k.mul(b, a)
            && k.mul(a, k.add(b, c)) == k.add(k.mul(a, b), k.mul(a, c))
            && k.add(a, k.neg(a)) == 0
            && k.frob(k.mul(a, b), 1) == k.mul(k.frob(a, 1), k.frob(b, 1))
            && k.frob(k.add(a, b), 1) == k.add(k.frob(a, 1), k.frob(b, 1))
            && k.pow(a, p as u64) == k.frob(a, 1)
            && (a == 0 || k.mul(a, k.inv(a).map_err(|e| e.to_string())?) == 1);
        ensure(ok, || format!("field laws fail in F_{} at ({a},{b},{c})", k.size()))?;
    }
    Ok(())
}

fn lattice_laws(a: &Subspace, b: &Subspace, c: &Subspace) -> Result<(), String> {
    let e = |x: Result<Subspace, _>| x.map_err(|e: thetarep::linalg::LinalgError| e.to_string());
    let ab = e(a.sum(b))?;
    let meet = e(a.intersect(b))?;
    let ok = ab.dim() + meet.dim() == a.dim() + b.dim()
        && ab.contains(a)
        && a.contains(&meet)
        && b.contains(&meet)
        && e(a.intersect(&ab))?.contains(a)
        && a.contains(&e(a.sum(&meet))?)
        && e(b.sum(a))?.contains(&ab)
        && ab.contains(&e(b.sum(a))?);
    ensure(ok, || "lattice laws".into())?;
    // Modular law with a ∩ c in place of a sublattice element of a.
    let ac = e(a.intersect(c))?;
    let lhs = e(a.intersect(&e(b.sum(&ac))?))?;
    let rhs = e(e(a.intersect(b))?.sum(&ac))?;
    ensure(lhs.contains(&rhs) && rhs.contains(&lhs), || "modular law".into())
}

fn all_subspaces(k: &Arc<Gf>, n: usize) -> Vec<Subspace> {
    let q = k.size() as usize;
    let vectors: Vec<Vec<Elt>> = (0..q.pow(n as u32))
        .map(|mut x| {
            (0..n)
                .map(|_| {
                    let d = (x % q) as Elt;
                    x /= q;
                    d
                })
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for u in &vectors {
        for v in &vectors {
            let s = Subspace::span(k.clone(), n, [u.clone(), v.clone()]);
            if seen.insert(s.rows().to_vec()) {
                out.push(s);
            }
        }
    }
    if n > 2 {
        out.push(Subspace::full(k.clone(), n));
    }
    out
}

pub fn criterion_8() -> Outcome {
    for (p, f, order) in [(2, 1, 6), (3, 1, 48), (2, 2, 180)] {
        let field = build(p, f)?;
        let got = closure(&field, &generators(&field)).len();
        ensure(got == order, || format!("q={}: closure {got}", field.q()))?;
    }
    for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        let field = build(p, f)?;
        let q = field.q() as usize;
        let n = pregular_classes(&field).len();
        ensure(n == q * (q - 1), || format!("q={q}: {n} p-regular classes"))?;
        if q <= 4 {
            let bf = brute_force_pregular_count(&field);
            ensure(bf == n, || format!("q={q}: brute force {bf}"))?;
        }
    }
    // Exhaustive field and subspace laws for q <= 4.
    for (p, f) in [(2, 1), (3, 1), (2, 2)] {
        let field = build(p, f)?;
        for k in [field.fq(), field.fq2()] {
            let s = k.size() as Elt;
            field_laws(k, (0..s).flat_map(|a| (0..s).flat_map(move |b| (0..s).map(move |c| (a, b, c)))))?;
        }
        let k = field.fq();
        let n = if field.q() == 4 { 2 } else { 3 };
        let subs = all_subspaces(k, n);
        for a in &subs {
            for b in &subs {
                for c in &subs {
                    lattice_laws(a, b, c)?;
                }
            }
        }
    }
    // 10^3 seeded random cases each for larger fields.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (p, f) in [(5, 1), (7, 1), (2, 3), (3, 2), (5, 2), (7, 2), (3, 3)] {
        let field = build(p, f)?;
        for k in [field.fq(), field.fq2()] {
            let s = k.size();
            let triples: Vec<(Elt, Elt, Elt)> = (0..1000)
                .map(|_| (rng.gen_range(0..s) as Elt, rng.gen_range(0..s) as Elt, rng.gen_range(0..s) as Elt))
                .collect();
            field_laws(k, triples.into_iter())?;
        }
        let k = field.fq();
        let q = k.size();
        for _ in 0..1000 {
            let n = rng.gen_range(1..=6);
            let sub = |rng: &mut ChaCha8Rng| {
                let count = rng.gen_range(0..=n);
                let vs: Vec<Vec<Elt>> =
                    (0..count).map(|_| (0..n).map(|_| rng.gen_range(0..q) as Elt).collect()).collect();
                Subspace::span(k.clone(), n, vs)
            };
            let (a, b, c) = (sub(&mut rng), sub(&mut rng), sub(&mut rng));
            lattice_laws(&a, &b, &c)?;
        }
    }
    Ok("closure 6/48/180; q(q-1) classes for q <= 9; field and lattice laws".into())
}

pub fn all() -> Vec<(&'static str, fn() -> Outcome)> {
    vec![
        ("1 dimension law (m+1)^f(q+1)", criterion_1),
        ("2 principal series cells", criterion_2),
        ("3 intersection identity", criterion_3),
        ("4 Clebsch-Gordan suite and splitting", criterion_4),
        ("5 projective isomorphism", criterion_5),
        ("6 JH combinatorics and twists", criterion_6),
        ("7 hypercube graphs", criterion_7),
        ("8 infrastructure", criterion_8),
    ]
}

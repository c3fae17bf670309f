use thetarep::brauer::Brauer;
use thetarep::gf::FieldSpec;
use thetarep::weights::{
    cg_cross_f2, cg_general, cg_large, cg_small, decompose, decompose_traced, lucas_test, split_step,
    tensor_projective, CrossMode, Decomposition, Params, TensorTerm, WeightError, WeightSum,
};

fn sum(p: u32, f: usize, terms: &[(&[&[u32]], i64)]) -> WeightSum {
    let params = Params::new(p, f);
    WeightSum::new(
        terms
            .iter()
            .map(|(fs, e)| TensorTerm::canonical(fs.iter().map(|x| x.to_vec()).collect(), params.reduce_det(*e)))
            .collect(),
    )
}

fn characters_agree(p: u32, f: usize, m: &[u32], n: &[u32], rhs: &WeightSum) -> bool {
    let field = FieldSpec::build(p, f as u32).unwrap();
    let b = Brauer::new(&field);
    let lhs = TensorTerm { factors: vec![m.to_vec(), n.to_vec()], det: 0 };
    b.term_character(&lhs) == b.sum_character(rhs)
}

#[test]
fn lucas_examples() {
    assert!(lucas_test(5, 3, 1).unwrap());
    assert!(!lucas_test(5, 5, 1).unwrap());
    // C(7,3) = 35 is prime to 3.
    assert_eq!(lucas_test(3, 7, 3).unwrap(), 35 % 3 != 0);
    assert!(matches!(lucas_test(3, 2, 3), Err(WeightError::OutOfRange { .. })));
}

#[test]
fn split_step_examples() {
    let p5 = Params::new(5, 1);
    assert_eq!(split_step(&p5, &[1], 0, 2).unwrap(), sum(5, 1, &[(&[&[3]], 0), (&[&[1]], 1)]));
    let p52 = Params::new(5, 2);
    assert_eq!(split_step(&p52, &[2, 1], 0, 1).unwrap(), sum(5, 2, &[(&[&[3, 1]], 0), (&[&[1, 1]], 1)]));
    assert!(matches!(split_step(&p5, &[2], 0, 3), Err(WeightError::NotSplit(_))));
}

#[test]
fn cg_general_examples() {
    let p = Params::new(5, 2);
    let got = cg_general(&p, &[2, 1], &[1, 1]).unwrap();
    let want = sum(5, 2, &[(&[&[1, 0]], 6), (&[&[3, 0]], 5), (&[&[1, 2]], 1), (&[&[3, 2]], 0)]);
    assert_eq!(got, want);
    assert_eq!(cg_general(&p, &[3, 2], &[0, 0]).unwrap(), sum(5, 2, &[(&[&[3, 2]], 0)]));
    let p7 = Params::new(7, 2);
    let got = cg_general(&p7, &[1, 1], &[2, 2]).unwrap();
    assert_eq!(got.dim(), 36);
    assert!(characters_agree(7, 2, &[1, 1], &[2, 2], &got));
}

#[test]
fn cg_small_examples() {
    let p7 = Params::new(7, 2);
    let got = cg_small(&p7, &[1, 1], &[2, 2]).unwrap();
    let want = sum(7, 2, &[(&[&[3, 3]], 0), (&[&[3, 1]], 7), (&[&[1, 3]], 1), (&[&[1, 1]], 8)]);
    assert_eq!(got, want);
    assert_eq!(cg_small(&p7, &[0, 0], &[2, 4]).unwrap(), sum(7, 2, &[(&[&[2, 4]], 0)]));
    let p5 = Params::new(5, 1);
    assert_eq!(cg_small(&p5, &[1], &[2]).unwrap(), split_step(&p5, &[1], 0, 2).unwrap());
    assert!(matches!(cg_small(&p5, &[3], &[3]), Err(WeightError::PreconditionViolated(_))));
}

#[test]
fn cg_large_examples() {
    let p5 = Params::new(5, 1);
    let got = cg_large(&p5, &[2], &[3]).unwrap();
    assert_eq!(got, sum(5, 1, &[(&[&[1], &[0]], 2), (&[&[1], &[4]], 0)]));
    assert_eq!(got.dim(), 12);
    let p3 = Params::new(3, 2);
    let got = cg_large(&p3, &[1, 1], &[2, 2]).unwrap();
    assert_eq!(got.dim(), 36);
    assert!(characters_agree(3, 2, &[1, 1], &[2, 2], &got));
}

#[test]
fn cg_cross_examples() {
    let p = Params::new(5, 2);
    let got = cg_cross_f2(&p, &[1, 2], &[1, 3], CrossMode::LowHigh).unwrap();
    assert_eq!(got.dim(), 48);
    let mut dets: Vec<u64> = got.terms.iter().map(|t| t.det).collect();
    dets.sort();
    let e = 5 * (2 + 3 + 2 - 5);
    assert_eq!(dets, vec![0, 1, e, e + 1]);
    assert!(characters_agree(5, 2, &[1, 2], &[1, 3], &got));
    let got = cg_cross_f2(&p, &[2, 1], &[3, 1], CrossMode::HighLow).unwrap();
    assert!(characters_agree(5, 2, &[2, 1], &[3, 1], &got));
    assert!(cg_cross_f2(&Params::new(5, 1), &[1], &[1], CrossMode::LowHigh).is_err());
}

#[test]
fn projective_examples() {
    let p3 = Params::new(3, 2);
    assert_eq!(tensor_projective(&p3, &[1, 2], 1), vec![8, 5]);
    assert_eq!(tensor_projective(&p3, &[1, 2], 0), vec![1, 2]);
    assert_eq!(tensor_projective(&Params::new(3, 1), &[1], 1), vec![5]);
}

#[test]
fn decompose_examples() {
    let p = Params::new(5, 2);
    let d = decompose(&p, &[2, 1], &[1, 1]);
    assert_eq!(d, Decomposition::Full(cg_general(&p, &[2, 1], &[1, 1]).unwrap()));
    assert_eq!(decompose(&p, &[4, 2], &[0, 0]), Decomposition::Full(sum(5, 2, &[(&[&[4, 2]], 0)])));
    // (2)⊗(2) with p = 3 is covered by the projective rule: (2) = (p-1).
    let p3 = Params::new(3, 1);
    assert_eq!(decompose(&p3, &[2], &[2]), Decomposition::Full(sum(3, 1, &[(&[&[8]], 0)])));
    match decompose(&p3, &[1], &[5]) {
        Decomposition::Partial(pr) => {
            assert_eq!(pr.residual.len(), 1);
            assert_eq!(pr.residual[0].blocks, vec![0]);
        }
        d => panic!("expected a partial result, got {d:?}"),
    }
}

#[test]
fn decompositions_preserve_characters() {
    for (p, f) in [(3u32, 1usize), (5, 1), (7, 1), (3, 2)] {
        let params = Params::new(p, f);
        let field = FieldSpec::build(p, f as u32).unwrap();
        let b = Brauer::new(&field);
        let max = if f == 1 { 2 * p } else { p };
        let tuples: Vec<Vec<u32>> = if f == 1 {
            (0..max).map(|a| vec![a]).collect()
        } else {
            (0..max).flat_map(|a| (0..max).map(move |c| vec![a, c])).collect()
        };
        for m in &tuples {
            for n in &tuples {
                let (d, rules) = decompose_traced(&params, m, n);
                let rhs = d.all_terms();
                let lhs = TensorTerm { factors: vec![m.clone(), n.clone()], det: 0 };
                assert_eq!(lhs.dim(), rhs.dim(), "{lhs}");
                assert_eq!(b.term_character(&lhs), b.sum_character(&rhs), "{lhs} = {rhs} via {rules:?}");
            }
        }
    }
}

/// Applies `rule` to two-factor terms until only single weights remain.
fn chain(params: &Params, s: WeightSum, rule: &dyn Fn(&[u32], &[u32]) -> WeightSum) -> WeightSum {
    let mut out = Vec::new();
    for t in s.terms {
        if t.factors.len() == 1 {
            out.push(t);
        } else {
            let inner = chain(params, rule(&t.factors[0], &t.factors[1]), rule);
            out.extend(inner.terms.into_iter().map(|x| x.twist(t.det, params)));
        }
    }
    WeightSum::new(out).normalize(params)
}

#[test]
fn rule_agreement_small_f1() {
    for p in [3u32, 5, 7] {
        let params = Params::new(p, 1);
        for m in 1..p {
            for n in m..p - m {
                let small = cg_small(&params, &[m], &[n]).unwrap().normalize(&params);
                let general = chain(&params, cg_general(&params, &[m], &[n]).unwrap(), &|a, b| {
                    cg_general(&params, a, b).unwrap()
                });
                let split = chain(&params, split_step(&params, &[m], 0, n).unwrap(), &|a, b| {
                    split_step(&params, a, 0, b[0]).unwrap()
                });
                assert_eq!(small, general, "p={p} ({m})⊗({n})");
                assert_eq!(small, split, "p={p} ({m})⊗({n})");
            }
        }
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thetarep::brauer::Brauer;
use thetarep::gf::FieldSpec;
use thetarep::group::GroupElement;
use thetarep::rep::{theta_multiples, ModuleError, RepSpace};
use thetarep::theta::{level_tuples, row_tuples, theta_filtration, verify_cell, verify_intersection, verify_iso1};

#[test]
fn level_one_tuples_for_f3() {
    let want = vec![vec![2, 1, 0], vec![2, 0, 1], vec![1, 2, 0], vec![0, 2, 1], vec![1, 0, 2], vec![0, 1, 2]];
    assert_eq!(row_tuples(3, 2, 1), want);
    assert_eq!(level_tuples(3, 2).len(), 19);
}

#[test]
fn iso1_cell_of_level_two() {
    let field = FieldSpec::build(3, 2).unwrap();
    let b = Brauer::new(&field);
    let rep = verify_iso1(&field, &[29, 29], &[2, 1], 2, &b).unwrap();
    assert_eq!(rep.subquotient_dim, 10);
    assert_eq!(rep.r_prime, vec![29 - 2 - 3, 29 - 1 - 6]);
    assert_eq!(rep.s, 2 + 3);
    assert!(rep.pass);
    let rep = verify_iso1(&field, &[19, 19], &[1, 1], 1, &b).unwrap();
    assert_eq!((rep.s, rep.r_prime.clone(), rep.subquotient_dim), (4, vec![15, 15], 10));
}

#[test]
fn forced_filtration_below_the_bound_flags_cells() {
    let field = FieldSpec::build(3, 1).unwrap();
    let filt = theta_filtration(&field, &[6], 1, true).unwrap();
    assert!(filt.cells.iter().any(|c| c.low_r_prime));
    let b = Brauer::new(&field);
    let low = filt.cells.iter().position(|c| c.low_r_prime).unwrap();
    assert!(matches!(verify_cell(&filt, low, &b), Err(ModuleError::BoundViolated(_))));
}

#[test]
fn intersection_instances() {
    for (p, f, r, m) in [(3, 2, vec![19, 19], 1), (3, 2, vec![29, 29], 2), (3, 1, vec![9], 1), (5, 1, vec![22], 2)] {
        let field = FieldSpec::build(p, f).unwrap();
        assert!(verify_intersection(&field, &r, m).unwrap().equal, "p={p} r={r:?} m={m}");
    }
}

#[test]
fn divisibility_subspaces_are_submodules() {
    let field = FieldSpec::build(3, 2).unwrap();
    let space = RepSpace::weight(&field, &[19, 19]).unwrap();
    for j in [[1, 0], [0, 1], [1, 1], [2, 0]] {
        let s = theta_multiples(&field, &[19, 19], &j, &space).unwrap();
        assert!(space.is_stable(&s).unwrap(), "j = {j:?}");
        let basis: Vec<Vec<u16>> = s
            .parts()
            .iter()
            .enumerate()
            .flat_map(|(c, part)| part.rows().iter().map(move |row| (c, row.clone())))
            .map(|(c, row)| space.to_global(c, &row))
            .collect();
        assert_eq!(space.spin(&basis).unwrap(), s);
    }
}

#[test]
fn action_is_a_homomorphism_on_tensors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let field = FieldSpec::build(3, 2).unwrap();
    let space = RepSpace::tensor(&field, &[&[2, 1], &[1, 2]], 3).unwrap();
    for _ in 0..10 {
        let g = GroupElement::random(&field, &mut rng);
        let h = GroupElement::random(&field, &mut rng);
        let v: Vec<u16> = (0..space.dim()).map(|i| (i * 7 % 9) as u16).collect();
        let gh = g.mul(&h, &field);
        assert_eq!(space.act(&gh, &v).unwrap(), space.act(&g, &space.act(&h, &v).unwrap()).unwrap());
        let back = space.act(&g.inverse(&field).unwrap(), &space.act(&g, &v).unwrap()).unwrap();
        assert_eq!(back, v);
    }
}

#[test]
fn dimension_caps() {
    let field = FieldSpec::build(3, 2).unwrap();
    assert!(matches!(RepSpace::weight(&field, &[99, 99]), Err(ModuleError::DimensionOverflow { .. })));
    assert!(matches!(
        RepSpace::tensor(&field, &[&[20, 20], &[20, 20]], 0),
        Err(ModuleError::DimensionOverflow { .. })
    ));
}

use std::sync::Arc;

use eulerint_core::cellcx::{
    barycentric_subdivision, betti_mod2, chi_c, integrate, integrate_all, semicharacteristic, set_complement,
    set_difference, set_intersect, set_union, Cell, CellError, Complex, ComplexFile, ConstructibleFunction,
    DefinableSet,
};
use eulerint_core::random::{random_complex, random_function, random_subset};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn closure(facets: &[&[usize]]) -> Arc<Complex> {
    Arc::new(Complex::simplicial_closure(facets).unwrap())
}

fn tetra_boundary() -> Arc<Complex> {
    closure(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]])
}

fn full(k: &Arc<Complex>) -> DefinableSet {
    DefinableSet::full(k.clone())
}

/// Independent count: vertices − edges + faces − ... straight from the cell list.
fn alternating_count(k: &Complex, keep: impl Fn(usize) -> bool) -> i64 {
    let mut by_dim = [0i64; 8];
    for i in (0..k.len()).filter(|&i| keep(i)) {
        by_dim[k.dim(i)] += 1;
    }
    by_dim.iter().enumerate().map(|(d, n)| if d % 2 == 0 { *n } else { -n }).sum()
}

#[test]
fn chi_of_tetrahedron_boundary() {
    let k = tetra_boundary();
    assert_eq!(k.len(), 14);
    assert_eq!(alternating_count(&k, |_| true), 4 - 6 + 4);
    assert_eq!(chi_c(&full(&k)), 2);
}

#[test]
fn chi_of_single_open_cells() {
    let k = tetra_boundary();
    for (id, expected) in [("0", 1), ("0,1", -1), ("0,1,2", 1)] {
        assert_eq!(chi_c(&DefinableSet::from_ids(k.clone(), &[id]).unwrap()), expected);
    }
    let interval = closure(&[&[0, 1]]);
    assert_eq!(chi_c(&full(&interval)), 1);
}

#[test]
fn interval_inclusion_exclusion() {
    let k = closure(&[&[0, 1]]);
    let a = DefinableSet::from_ids(k.clone(), &["0", "0,1"]).unwrap();
    let b = DefinableSet::from_ids(k.clone(), &["0,1", "1"]).unwrap();
    assert_eq!(chi_c(&a), 0);
    assert_eq!(chi_c(&b), 0);
    let i = set_intersect(&a, &b).unwrap();
    let u = set_union(&a, &b).unwrap();
    assert_eq!(chi_c(&i), -1);
    assert_eq!(chi_c(&u), 1);
    assert_eq!(chi_c(&a) + chi_c(&b) - chi_c(&i), chi_c(&u));
}

#[test]
fn full_and_empty_are_identity_and_absorbing() {
    let k = tetra_boundary();
    let (x, e) = (full(&k), DefinableSet::empty(k.clone()));
    assert_eq!(set_union(&x, &e).unwrap(), x);
    assert_eq!(set_intersect(&x, &e).unwrap(), e);
    assert_eq!(set_complement(&x), e);
    assert_eq!(set_difference(&x, &e).unwrap(), x);
}

#[test]
fn mismatched_complexes_are_rejected() {
    let a = full(&tetra_boundary());
    let b = full(&closure(&[&[0, 1]]));
    assert_eq!(set_union(&a, &b), Err(CellError::DomainMismatch));
    let phi = ConstructibleFunction::constant(closure(&[&[0, 1]]), 1);
    assert_eq!(integrate(&phi, &a), Err(CellError::DomainMismatch));
}

#[test]
fn unknown_member_is_malformed() {
    let k = tetra_boundary();
    assert_eq!(DefinableSet::from_ids(k, &["9"]), Err(CellError::MalformedSet("9".into())));
}

#[test]
fn integrate_examples() {
    let k = tetra_boundary();
    let phi = ConstructibleFunction::constant(k.clone(), 2);
    assert_eq!(integrate_all(&phi).unwrap(), 4);
    let v = DefinableSet::from_ids(k.clone(), &["2"]).unwrap();
    assert_eq!(integrate_all(&ConstructibleFunction::indicator(&v)).unwrap(), 1);
}

#[test]
fn integrate_linearity_against_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let k = Arc::new(random_complex(&mut rng, 40));
    let a = random_subset(&mut rng, &k);
    let b = random_subset(&mut rng, &k);
    let phi = ConstructibleFunction::indicator(&a)
        .linear_combination(3, &ConstructibleFunction::indicator(&b), -1)
        .unwrap();
    for _ in 0..100 {
        let w = random_subset(&mut rng, &k);
        let expected = 3 * chi_c(&a.intersect(&w).unwrap()) - chi_c(&b.intersect(&w).unwrap());
        assert_eq!(integrate(&phi, &w).unwrap(), expected);
    }
}

#[test]
fn betti_numbers_of_small_spaces() {
    let circle = closure(&[&[0, 1], &[1, 2], &[0, 2]]);
    assert_eq!(betti_mod2(&full(&circle)).unwrap(), vec![1, 1]);
    assert_eq!(betti_mod2(&full(&tetra_boundary())).unwrap(), vec![1, 0, 1]);
    let two = closure(&[&[0, 1], &[1, 2], &[0, 2], &[3, 4], &[4, 5], &[3, 5]]);
    assert_eq!(betti_mod2(&full(&two)).unwrap(), vec![2, 2]);
}

#[test]
fn projective_plane_mod2_homology() {
    // Six-vertex RP²: facets from the hemi-icosahedron.
    let facets: [[usize; 3]; 10] = [
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
        [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
    ];
    let k = Arc::new(Complex::simplicial_closure(&facets).unwrap());
    assert_eq!(chi_c(&full(&k)), 1);
    assert_eq!(betti_mod2(&full(&k)).unwrap(), vec![1, 1, 1]);
    assert!(matches!(semicharacteristic(&full(&k)), Err(CellError::SemicharacteristicUndefined(3))));
}

#[test]
fn semicharacteristics() {
    let circle = closure(&[&[0, 1], &[1, 2], &[0, 2]]);
    assert_eq!(semicharacteristic(&full(&circle)).unwrap(), 1);
    let two = closure(&[&[0, 1], &[1, 2], &[0, 2], &[3, 4], &[4, 5], &[3, 5]]);
    assert_eq!(semicharacteristic(&full(&two)).unwrap(), 2);
    let s3_facets: Vec<Vec<usize>> =
        (0..5).map(|skip| (0..5).filter(|&v| v != skip).collect()).collect();
    let s3 = Arc::new(Complex::simplicial_closure(&s3_facets).unwrap());
    assert_eq!(betti_mod2(&full(&s3)).unwrap(), vec![1, 0, 0, 1]);
    assert_eq!(semicharacteristic(&full(&s3)).unwrap(), 1);
}

#[test]
fn betti_requires_a_subcomplex() {
    let k = tetra_boundary();
    let open_edge = DefinableSet::from_ids(k, &["0,1"]).unwrap();
    assert!(matches!(betti_mod2(&open_edge), Err(CellError::NotASubcomplex { .. })));
}

fn cell(id: &str, dim: usize, faces: &[&str]) -> Cell {
    Cell { id: id.into(), dim, faces: faces.iter().map(|s| s.to_string()).collect() }
}

#[test]
fn regular_bigon_is_not_simplicial() {
    let cells = vec![cell("a", 0, &[]), cell("b", 0, &[]), cell("e", 1, &["a", "b"]), cell("f", 1, &["a", "b"])];
    let bigon = Arc::new(Complex::new(cells.clone(), false).unwrap());
    assert_eq!(chi_c(&DefinableSet::full(bigon.clone())), 0);
    assert_eq!(betti_mod2(&DefinableSet::full(bigon)).unwrap(), vec![1, 1]);
    assert!(matches!(Complex::new(cells, true), Err(CellError::NotSimplicial(..))));
}

#[test]
fn malformed_complexes_are_rejected() {
    let loop_edge = vec![cell("v", 0, &[]), cell("e", 1, &["v"])];
    assert!(matches!(Complex::new(loop_edge, false), Err(CellError::NotRegular(..))));
    let unknown = vec![cell("v", 0, &[]), cell("e", 1, &["v", "w"])];
    assert!(matches!(Complex::new(unknown, false), Err(CellError::UnknownFace { .. })));
    let wrong_dim = vec![cell("v", 0, &[]), cell("w", 0, &[]), cell("t", 2, &["v", "w"])];
    assert!(matches!(Complex::new(wrong_dim, false), Err(CellError::FaceDimension { .. })));
    let dup = vec![cell("v", 0, &[]), cell("v", 0, &[])];
    assert!(matches!(Complex::new(dup, false), Err(CellError::DuplicateId(_))));
}

#[test]
fn json_round_trip() {
    let k = tetra_boundary();
    let text = serde_json::to_string(&k.to_file()).unwrap();
    let back = Complex::from_file(serde_json::from_str::<ComplexFile>(&text).unwrap()).unwrap();
    assert_eq!(back, *k);
}

#[test]
fn subdivision_of_a_triangle() {
    let k = closure(&[&[0, 1, 2]]);
    let sub = barycentric_subdivision(&k).unwrap();
    // 7 barycenters, 12 edges, 6 triangles.
    assert_eq!(alternating_count(&sub.complex, |i| sub.complex.dim(i) == 0), 7);
    assert_eq!(sub.complex.len(), 7 + 12 + 6);
    assert_eq!(chi_c(&DefinableSet::full(sub.complex.clone())), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn additivity_on_random_pairs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = Arc::new(random_complex(&mut rng, 50));
        let a = random_subset(&mut rng, &k);
        let b = random_subset(&mut rng, &k);
        let u = set_union(&a, &b).unwrap();
        let i = set_intersect(&a, &b).unwrap();
        prop_assert_eq!(chi_c(&u) + chi_c(&i), chi_c(&a) + chi_c(&b));
        prop_assert_eq!(chi_c(&a), alternating_count(&k, |c| a.contains(c)));
        prop_assert_eq!(chi_c(&a) + chi_c(&set_complement(&a)), chi_c(&DefinableSet::full(k.clone())));
    }

    #[test]
    fn chi_is_invariant_under_subdivision(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = Arc::new(random_complex(&mut rng, 25));
        let a = random_subset(&mut rng, &k);
        let sub = barycentric_subdivision(&k).unwrap();
        prop_assert_eq!(chi_c(&sub.transport_set(&a).unwrap()), chi_c(&a));
        let phi = random_function(&mut rng, &k, -3, 3);
        prop_assert_eq!(
            integrate_all(&sub.transport_function(&phi).unwrap()).unwrap(),
            integrate_all(&phi).unwrap()
        );
    }

    #[test]
    fn integration_is_linear_and_additive(seed in any::<u64>(), a in -5i64..5, b in -5i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = Arc::new(random_complex(&mut rng, 40));
        let phi = random_function(&mut rng, &k, -3, 3);
        let psi = random_function(&mut rng, &k, -3, 3);
        let s = random_subset(&mut rng, &k);
        let combo = phi.linear_combination(a, &psi, b).unwrap();
        prop_assert_eq!(
            integrate(&combo, &s).unwrap(),
            a * integrate(&phi, &s).unwrap() + b * integrate(&psi, &s).unwrap()
        );
        let rest = set_complement(&s);
        prop_assert_eq!(integrate(&phi, &s).unwrap() + integrate(&phi, &rest).unwrap(), integrate_all(&phi).unwrap());
        let one = ConstructibleFunction::constant(k.clone(), 1);
        prop_assert_eq!(integrate(&one, &s).unwrap(), chi_c(&s));
    }

    #[test]
    fn betti_alternating_sum_matches_chi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = Arc::new(random_complex(&mut rng, 40));
        let closed = random_subset(&mut rng, &k).closure();
        let b = betti_mod2(&closed).unwrap();
        let alt: i64 = b.iter().enumerate().map(|(d, &x)| if d % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        prop_assert_eq!(alt, chi_c(&closed));
    }
}

#[test]
fn overflow_is_reported() {
    let k = closure(&[&[0, 1]]);
    let phi = ConstructibleFunction::constant(k, i64::MAX);
    assert_eq!(phi.checked_scale(2).unwrap_err(), CellError::Overflow);
    assert_eq!(integrate_all(&phi).unwrap_err(), CellError::Overflow);
}

use std::collections::HashMap;
use std::sync::Arc;

use eulerint_core::cellcx::{chi_c, integrate_all, Complex, ConstructibleFunction, DefinableSet};
use eulerint_core::pushfwd::{
    barycentric_map, constant_pushforward_check, fubini_verify, level_set_identity, PushError, SimplicialMap,
};
use eulerint_core::random::{random_complex, random_function, random_simplicial_map};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn closure(facets: &[Vec<usize>]) -> Arc<Complex> {
    Arc::new(Complex::simplicial_closure(facets).unwrap())
}

fn cycle(n: usize) -> Arc<Complex> {
    closure(&(0..n).map(|i| vec![i, (i + 1) % n]).collect::<Vec<_>>())
}

fn table(pairs: impl IntoIterator<Item = (usize, usize)>) -> HashMap<String, String> {
    pairs.into_iter().map(|(s, t)| (s.to_string(), t.to_string())).collect()
}

/// Hexagon wrapped twice around a triangle.
fn double_cover() -> SimplicialMap {
    SimplicialMap::new(cycle(6), cycle(3), &table((0..6).map(|i| (i, i % 3)))).unwrap()
}

/// Annulus S¹ × I with bottom circle 0,1,2 and top circle 3,4,5, projected to I.
fn cylinder_projection() -> SimplicialMap {
    let facets = vec![vec![0, 1, 3], vec![1, 3, 4], vec![1, 2, 4], vec![2, 4, 5], vec![2, 0, 5], vec![0, 5, 3]];
    let source = closure(&facets);
    let target = closure(&[vec![0, 1]]);
    SimplicialMap::new(source, target, &table((0..6).map(|i| (i, usize::from(i >= 3))))).unwrap()
}

fn ones(f: &SimplicialMap) -> ConstructibleFunction {
    ConstructibleFunction::constant(f.source().clone(), 1)
}

#[test]
fn cell_images() {
    let k = cycle(4);
    let id = SimplicialMap::identity(k.clone()).unwrap();
    for c in k.cells() {
        assert_eq!(id.cell_image(&c.id).unwrap(), c.id);
    }
    let collapse = SimplicialMap::new(closure(&[vec![0, 1]]), closure(&[vec![0]]), &table([(0, 0), (1, 0)])).unwrap();
    assert_eq!(collapse.cell_image("0,1").unwrap(), "0");
    let f = double_cover();
    assert_eq!(f.cell_image("3,4").unwrap(), "0,1");
    assert_eq!(f.cell_image("0,5").unwrap(), "0,2");
}

#[test]
fn fiber_examples() {
    let point = closure(&[vec![0]]);
    let source = closure(&[vec![0, 1, 2], vec![2, 3]]);
    let collapse = SimplicialMap::constant(source.clone(), point, 0).unwrap();
    let phi = ones(&collapse);
    assert_eq!(collapse.fiber_chi("0", &phi).unwrap(), chi_c(&DefinableSet::full(source)));

    let cyl = cylinder_projection();
    assert_eq!(cyl.fiber_chi("0,1", &ones(&cyl)).unwrap(), 0);
    assert_eq!(cyl.fiber_chi("0", &ones(&cyl)).unwrap(), 0);

    let cover = double_cover();
    for sigma in ["0,1", "1,2", "0,2", "0", "1", "2"] {
        assert_eq!(cover.fiber_chi(sigma, &ones(&cover)).unwrap(), 2);
    }
    assert_eq!(cover.fiber_chi("7", &ones(&cover)), Err(PushError::UnknownCell("7".into(), "target")));
}

#[test]
fn pushforward_examples() {
    let k = cycle(5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi = random_function(&mut rng, &k, -3, 3);
    let id = SimplicialMap::identity(k).unwrap();
    assert_eq!(id.pushforward(&phi).unwrap(), phi);

    let cover = double_cover();
    assert_eq!(cover.pushforward(&ones(&cover)).unwrap().constant_value(), Some(2));
}

#[test]
fn fubini_and_level_sets_on_examples() {
    let cyl = cylinder_projection();
    let r = fubini_verify(&cyl, &ones(&cyl)).unwrap();
    assert_eq!((r.source_integral, r.target_integral, r.holds), (0, 0, true));

    let cover = double_cover();
    let l = level_set_identity(&cover, &ones(&cover)).unwrap();
    assert_eq!((l.source_sum, l.target_sum), (0, 0));
    let c = constant_pushforward_check(&cover, &ones(&cover)).unwrap().unwrap();
    assert_eq!((c.d, c.source_sum, c.target_side, c.holds), (2, 0, 0, true));

    let c = constant_pushforward_check(&cyl, &ones(&cyl)).unwrap().unwrap();
    assert_eq!(c.d, 0);
    assert!(c.holds);

    let k = closure(&[vec![0, 1, 2]]);
    let id = SimplicialMap::identity(k.clone()).unwrap();
    let c = constant_pushforward_check(&id, &ConstructibleFunction::constant(k.clone(), 1)).unwrap().unwrap();
    assert_eq!(c.d, 1);
    let l = level_set_identity(&id, &ConstructibleFunction::constant(k, 1)).unwrap();
    assert_eq!((l.source_sum, l.target_sum), (1, 1));
}

#[test]
fn nonconstant_pushforward_gives_none() {
    let source = closure(&[vec![0, 1]]);
    let f = SimplicialMap::identity(source.clone()).unwrap();
    let phi = ConstructibleFunction::from_map(source, [("0", 1)]).unwrap();
    assert!(constant_pushforward_check(&f, &phi).unwrap().is_none());
}

#[test]
fn map_validation() {
    let tri = closure(&[vec![0, 1], vec![1, 2], vec![0, 2]]);
    let path = closure(&[vec![0, 1], vec![1, 2]]);
    // 0 and 2 are not joined in the path, so the edge {0,2} has no image.
    let bad = SimplicialMap::new(tri.clone(), path.clone(), &table([(0, 0), (1, 1), (2, 2)]));
    assert!(matches!(bad, Err(PushError::ImageNotSimplex(_))));
    let partial = SimplicialMap::new(tri.clone(), path.clone(), &table([(0, 0), (1, 1)]));
    assert!(matches!(partial, Err(PushError::IncompleteMap(_))));
    let not_vertex = SimplicialMap::new(tri, path, &HashMap::from([("0,1".to_string(), "0".to_string())]));
    assert!(matches!(not_vertex, Err(PushError::NotAVertex(..))));
}

#[test]
fn barycentric_helper_approximates_a_projection() {
    // Square [0,1]² as a single 2-cell, projected to its first coordinate.
    let cells: Vec<eulerint_core::Cell> = serde_json::from_str(
        r#"[
        {"id":"a","dim":0,"faces":[]},{"id":"b","dim":0,"faces":[]},
        {"id":"c","dim":0,"faces":[]},{"id":"d","dim":0,"faces":[]},
        {"id":"ab","dim":1,"faces":["a","b"]},{"id":"bc","dim":1,"faces":["b","c"]},
        {"id":"cd","dim":1,"faces":["c","d"]},{"id":"da","dim":1,"faces":["d","a"]},
        {"id":"sq","dim":2,"faces":["ab","bc","cd","da"]}]"#,
    )
    .unwrap();
    let square = Arc::new(Complex::new(cells, false).unwrap());
    let interval = closure(&[vec![0, 1]]);
    let assign: HashMap<String, String> =
        [("a", "0"), ("d", "0"), ("da", "0"), ("b", "1"), ("c", "1"), ("bc", "1"), ("ab", "1"), ("cd", "1"), ("sq", "1")]
            .into_iter()
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .collect();
    let (f, sub) = barycentric_map(&square, interval, &assign).unwrap();
    let phi = sub.transport_function(&ConstructibleFunction::constant(square, 1)).unwrap();
    let r = fubini_verify(&f, &phi).unwrap();
    assert!(r.holds);
    assert_eq!(r.source_integral, 1);
    // Fiber over the open edge is an open segment, over each endpoint a closed one.
    assert_eq!(f.fiber_chi("0,1", &phi).unwrap(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn fubini_on_random_maps(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let source = Arc::new(random_complex(&mut rng, 20));
        let target = Arc::new(random_complex(&mut rng, 20));
        let f = random_simplicial_map(&mut rng, &source, &target);
        let phi = random_function(&mut rng, &source, -3, 3);
        let r = fubini_verify(&f, &phi).unwrap();
        prop_assert!(r.holds);
        prop_assert_eq!(r.source_integral, integrate_all(&phi).unwrap());
        prop_assert!(level_set_identity(&f, &phi).unwrap().holds);
        if let Some(c) = constant_pushforward_check(&f, &phi).unwrap() {
            prop_assert!(c.holds);
        }
    }

    #[test]
    fn pushforward_is_linear(seed in any::<u64>(), a in -4i64..4, b in -4i64..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let source = Arc::new(random_complex(&mut rng, 20));
        let target = Arc::new(random_complex(&mut rng, 20));
        let f = random_simplicial_map(&mut rng, &source, &target);
        let phi = random_function(&mut rng, &source, -3, 3);
        let psi = random_function(&mut rng, &source, -3, 3);
        let lhs = f.pushforward(&phi.linear_combination(a, &psi, b).unwrap()).unwrap();
        let rhs = f.pushforward(&phi).unwrap().linear_combination(a, &f.pushforward(&psi).unwrap(), b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pushforward_matches_fiber_chi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let source = Arc::new(random_complex(&mut rng, 20));
        let target = Arc::new(random_complex(&mut rng, 20));
        let f = random_simplicial_map(&mut rng, &source, &target);
        let phi = random_function(&mut rng, &source, -3, 3);
        let pushed = f.pushforward(&phi).unwrap();
        for c in target.cells() {
            prop_assert_eq!(pushed.value(&c.id).unwrap(), f.fiber_chi(&c.id, &phi).unwrap());
        }
    }
}

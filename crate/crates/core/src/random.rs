//! Seeded generators for complexes, sets, functions and simplicial maps.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cellcx::{Complex, ConstructibleFunction, DefinableSet};
use crate::pushfwd::SimplicialMap;

/// A random simplicial complex with at most `max_cells` cells (at least one vertex).
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, max_cells: usize) -> Complex {
    assert!(max_cells >= 1);
    let n_vertices = rng.gen_range(1..=max_cells.min(8));
    let mut facets: Vec<Vec<usize>> = (0..n_vertices).map(|v| vec![v]).collect();
    let mut current = Complex::simplicial_closure(&facets).expect("vertices form a complex");
    let mut misses = 0;
    while misses < 8 && current.len() < max_cells {
        let size = rng.gen_range(2..=4.min(n_vertices).max(2));
        if size > n_vertices {
            break;
        }
        let mut vs: Vec<usize> = (0..n_vertices).collect();
        vs.shuffle(rng);
        vs.truncate(size);
        facets.push(vs);
        let candidate = Complex::simplicial_closure(&facets).expect("closure of simplices");
        if candidate.len() <= max_cells && candidate.len() > current.len() {
            current = candidate;
            misses = 0;
        } else {
            facets.pop();
            misses += 1;
        }
    }
    current
}

/// Each cell independently with probability one half.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, complex: &Arc<Complex>) -> DefinableSet {
    let mask = (0..complex.len()).map(|_| rng.gen_bool(0.5)).collect();
    DefinableSet::from_mask(complex.clone(), mask)
}

/// Values drawn uniformly from `lo..=hi` on every cell.
pub fn random_function<R: Rng + ?Sized>(rng: &mut R, complex: &Arc<Complex>, lo: i64, hi: i64) -> ConstructibleFunction {
    let values = (0..complex.len()).map(|_| rng.gen_range(lo..=hi)).collect();
    ConstructibleFunction::from_values(complex.clone(), values)
}

/// A random simplicial map: vertices are assigned greedily in random order,
/// each to a target vertex keeping every fully assigned simplex mapped onto a
/// target simplex. Falls back to a constant map if greedy assignment stalls.
pub fn random_simplicial_map<R: Rng + ?Sized>(
    rng: &mut R,
    source: &Arc<Complex>,
    target: &Arc<Complex>,
) -> SimplicialMap {
    let target_vertices: Vec<usize> = target.vertex_indices().collect();
    assert!(!target_vertices.is_empty(), "target needs a vertex");
    let mut order: Vec<usize> = source.vertex_indices().collect();
    order.shuffle(rng);
    let mut table: Vec<Option<usize>> = vec![None; source.len()];
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); source.len()];
    for c in 0..source.len() {
        for &v in source.vertices(c) {
            containing[v].push(c);
        }
    }
    let consistent = |table: &[Option<usize>], v: usize| {
        containing[v].iter().all(|&c| {
            let imgs: Option<BTreeSet<usize>> = source.vertices(c).iter().map(|&u| table[u]).collect();
            match imgs {
                Some(set) => target.cell_spanned_by(&set.into_iter().collect::<Vec<_>>()).is_some(),
                None => true,
            }
        })
    };
    let mut stalled = false;
    'outer: for &v in &order {
        let mut candidates = target_vertices.clone();
        candidates.shuffle(rng);
        for t in candidates {
            table[v] = Some(t);
            if consistent(&table, v) {
                continue 'outer;
            }
        }
        stalled = true;
        break;
    }
    if stalled {
        let point = *target_vertices.choose(rng).expect("nonempty");
        return SimplicialMap::constant(source.clone(), target.clone(), point).expect("constant map is simplicial");
    }
    SimplicialMap::from_table(source.clone(), target.clone(), table).expect("greedy table is simplicial")
}

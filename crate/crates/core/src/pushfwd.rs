//! Simplicial maps, fiberwise Euler integration and pushforward of
//! constructible functions.
//!
//! Over an open target simplex `σ`, the part of the fiber inside an open
//! source simplex `c` with `f(c) = σ` is an open polytope of dimension
//! `dim c − dim σ`, so every fiber integral is a signed cell count.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::cellcx::{
    barycentric_subdivision, chi_c, integrate_all, CellError, Complex, ConstructibleFunction, DefinableSet, Subdivision,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PushError {
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error("{0} complex is not simplicial")]
    NotSimplicial(&'static str),
    #[error("source vertex `{0}` has no image")]
    IncompleteMap(String),
    #[error("`{0}` is not a vertex of the {1} complex")]
    NotAVertex(String, &'static str),
    #[error("image vertices of `{0}` do not span a target simplex")]
    ImageNotSimplex(String),
    #[error("unknown {1} cell `{0}`")]
    UnknownCell(String, &'static str),
}

/// A simplicial map given by its vertex map; `image[c]` is the target simplex
/// spanned by the images of the vertices of `c`.
#[derive(Debug, Clone)]
pub struct SimplicialMap {
    source: Arc<Complex>,
    target: Arc<Complex>,
    vertex_map: Vec<Option<usize>>,
    image: Vec<usize>,
}

impl SimplicialMap {
    /// Build from a vertex table keyed by ids.
    pub fn new(
        source: Arc<Complex>,
        target: Arc<Complex>,
        vertex_map: &HashMap<String, String>,
    ) -> Result<Self, PushError> {
        let mut table = vec![None; source.len()];
        for (s, t) in vertex_map {
            let si = source.index_of(s).ok_or_else(|| PushError::UnknownCell(s.clone(), "source"))?;
            if source.dim(si) != 0 {
                return Err(PushError::NotAVertex(s.clone(), "source"));
            }
            let ti = target.index_of(t).ok_or_else(|| PushError::UnknownCell(t.clone(), "target"))?;
            if target.dim(ti) != 0 {
                return Err(PushError::NotAVertex(t.clone(), "target"));
            }
            table[si] = Some(ti);
        }
        Self::from_table(source, target, table)
    }

    /// Build from a table indexed by source cell index; entries for
    /// non-vertex cells are ignored.
    pub fn from_table(
        source: Arc<Complex>,
        target: Arc<Complex>,
        vertex_map: Vec<Option<usize>>,
    ) -> Result<Self, PushError> {
        if !source.is_simplicial() {
            return Err(PushError::NotSimplicial("source"));
        }
        if !target.is_simplicial() {
            return Err(PushError::NotSimplicial("target"));
        }
        assert_eq!(vertex_map.len(), source.len(), "vertex table length must match the source");
        for v in source.vertex_indices() {
            match vertex_map[v] {
                None => return Err(PushError::IncompleteMap(source.id(v).to_string())),
                Some(t) if target.dim(t) != 0 => {
                    return Err(PushError::NotAVertex(target.id(t).to_string(), "target"))
                }
                Some(_) => {}
            }
        }
        let mut image = Vec::with_capacity(source.len());
        for c in 0..source.len() {
            let vs: BTreeSet<usize> = source.vertices(c).iter().map(|&v| vertex_map[v].expect("checked above")).collect();
            let vs: Vec<usize> = vs.into_iter().collect();
            let sigma = target
                .cell_spanned_by(&vs)
                .ok_or_else(|| PushError::ImageNotSimplex(source.id(c).to_string()))?;
            image.push(sigma);
        }
        Ok(Self { source, target, vertex_map, image })
    }

    pub fn identity(complex: Arc<Complex>) -> Result<Self, PushError> {
        let table = (0..complex.len()).map(Some).collect();
        Self::from_table(complex.clone(), complex, table)
    }

    /// Map every vertex to `point`.
    pub fn constant(source: Arc<Complex>, target: Arc<Complex>, point: usize) -> Result<Self, PushError> {
        let table = vec![Some(point); source.len()];
        Self::from_table(source, target, table)
    }

    pub fn source(&self) -> &Arc<Complex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Complex> {
        &self.target
    }

    /// Image of source cell index `c` as a target cell index.
    pub fn image_of(&self, c: usize) -> usize {
        self.image[c]
    }

    pub fn vertex_image(&self, v: usize) -> Option<usize> {
        self.vertex_map[v]
    }

    pub fn vertex_table(&self) -> HashMap<String, String> {
        self.source
            .vertex_indices()
            .map(|v| (self.source.id(v).to_string(), self.target.id(self.image[v]).to_string()))
            .collect()
    }

    /// Target simplex spanned by the images of the vertices of `c`.
    pub fn cell_image(&self, c: &str) -> Result<&str, PushError> {
        let i = self.source.index_of(c).ok_or_else(|| PushError::UnknownCell(c.to_string(), "source"))?;
        Ok(self.target.id(self.image[i]))
    }

    fn check_domain(&self, phi: &ConstructibleFunction) -> Result<(), PushError> {
        if Arc::ptr_eq(phi.complex(), &self.source) || **phi.complex() == *self.source {
            Ok(())
        } else {
            Err(CellError::DomainMismatch.into())
        }
    }

    /// `∫_{f⁻¹(y)} φ dχ` for any `y` in the open cell `sigma`.
    pub fn fiber_chi(&self, sigma: &str, phi: &ConstructibleFunction) -> Result<i64, PushError> {
        self.check_domain(phi)?;
        let s = self.target.index_of(sigma).ok_or_else(|| PushError::UnknownCell(sigma.to_string(), "target"))?;
        let ds = self.target.dim(s);
        (0..self.source.len()).filter(|&c| self.image[c] == s).try_fold(0i64, |acc, c| {
            let sign = if (self.source.dim(c) - ds) % 2 == 0 { 1 } else { -1 };
            let term = phi.at(c).checked_mul(sign).ok_or(CellError::Overflow)?;
            acc.checked_add(term).ok_or_else(|| CellError::Overflow.into())
        })
    }

    /// `f_*φ`, the function `σ ↦ fiber_chi(σ, φ)` on the target.
    pub fn pushforward(&self, phi: &ConstructibleFunction) -> Result<ConstructibleFunction, PushError> {
        self.check_domain(phi)?;
        let mut values = vec![0i64; self.target.len()];
        for c in 0..self.source.len() {
            let s = self.image[c];
            let sign = if (self.source.dim(c) - self.target.dim(s)) % 2 == 0 { 1 } else { -1 };
            let term = phi.at(c).checked_mul(sign).ok_or(CellError::Overflow)?;
            values[s] = values[s].checked_add(term).ok_or(CellError::Overflow)?;
        }
        Ok(ConstructibleFunction::from_values(self.target.clone(), values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FubiniReport {
    pub source_integral: i64,
    pub target_integral: i64,
    pub holds: bool,
}

/// Both sides of `∫_X φ dχ = ∫_Y f_*φ dχ`.
pub fn fubini_verify(f: &SimplicialMap, phi: &ConstructibleFunction) -> Result<FubiniReport, PushError> {
    let source_integral = integrate_all(phi)?;
    let target_integral = integrate_all(&f.pushforward(phi)?)?;
    Ok(FubiniReport { source_integral, target_integral, holds: source_integral == target_integral })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelSetReport {
    pub source_sum: i64,
    pub target_sum: i64,
    pub holds: bool,
}

fn weighted_level_sum(phi: &ConstructibleFunction) -> Result<i64, CellError> {
    phi.distinct_values().into_iter().filter(|&i| i != 0).try_fold(0i64, |acc, i| {
        let term = i.checked_mul(chi_c(&phi.level_set(i))).ok_or(CellError::Overflow)?;
        acc.checked_add(term).ok_or(CellError::Overflow)
    })
}

/// `Σ_i i·χ_c({φ = i})` against `Σ_j j·χ_c({f_*φ = j})`.
pub fn level_set_identity(f: &SimplicialMap, phi: &ConstructibleFunction) -> Result<LevelSetReport, PushError> {
    let source_sum = weighted_level_sum(phi)?;
    let target_sum = weighted_level_sum(&f.pushforward(phi)?)?;
    Ok(LevelSetReport { source_sum, target_sum, holds: source_sum == target_sum })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConstantPushforward {
    pub d: i64,
    pub source_sum: i64,
    pub target_side: i64,
    pub holds: bool,
}

/// When `f_*φ ≡ d` on the target, compares `Σ_i i·χ_c({φ = i})` with `d·χ_c(Y)`.
pub fn constant_pushforward_check(
    f: &SimplicialMap,
    phi: &ConstructibleFunction,
) -> Result<Option<ConstantPushforward>, PushError> {
    let pushed = f.pushforward(phi)?;
    let Some(d) = pushed.constant_value() else {
        return Ok(None);
    };
    let source_sum = weighted_level_sum(phi)?;
    let target_side =
        d.checked_mul(chi_c(&DefinableSet::full(f.target.clone()))).ok_or(CellError::Overflow)?;
    Ok(Some(ConstantPushforward { d, source_sum, target_side, holds: source_sum == target_side }))
}

/// Simplicial approximation of a cellular map after one barycentric
/// subdivision of the source: `assign` sends each source cell (the barycenter
/// of that cell) to a target vertex.
pub fn barycentric_map(
    source: &Arc<Complex>,
    target: Arc<Complex>,
    assign: &HashMap<String, String>,
) -> Result<(SimplicialMap, Subdivision), PushError> {
    let sub = barycentric_subdivision(source)?;
    let mut table = vec![None; sub.complex.len()];
    for v in sub.complex.vertex_indices() {
        let old = sub.carrier[v];
        let old_id = source.id(old);
        let t = assign.get(old_id).ok_or_else(|| PushError::IncompleteMap(old_id.to_string()))?;
        let ti = target.index_of(t).ok_or_else(|| PushError::UnknownCell(t.clone(), "target"))?;
        table[v] = Some(ti);
    }
    let map = SimplicialMap::from_table(sub.complex.clone(), target, table)?;
    Ok((map, sub))
}

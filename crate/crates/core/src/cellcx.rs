//! Finite regular complexes as face posets, unions of open cells, compactly
//! supported Euler characteristic, constructible functions and mod-2 homology.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("duplicate cell id `{0}`")]
    DuplicateId(String),
    #[error("cell `{cell}` lists unknown face `{face}`")]
    UnknownFace { cell: String, face: String },
    #[error("face `{face}` of `{cell}` has dimension {found}, expected {expected}")]
    FaceDimension { cell: String, face: String, found: usize, expected: usize },
    #[error("cell `{0}` is not a regular cell: {1}")]
    NotRegular(String, String),
    #[error("cell `{0}` breaks the simplicial condition: {1}")]
    NotSimplicial(String, String),
    #[error("unknown cell id `{0}`")]
    MalformedSet(String),
    #[error("operands live on different complexes")]
    DomainMismatch,
    #[error("set is not closed under faces: `{cell}` lacks its face `{face}`")]
    NotASubcomplex { cell: String, face: String },
    #[error("mod-2 Betti numbers sum to {0}, which is odd")]
    SemicharacteristicUndefined(usize),
    #[error("integer overflow in Euler integration")]
    Overflow,
}

/// One cell of a face poset, as written in complex files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    #[serde(default)]
    pub faces: Vec<String>,
}

/// On-disk shape of a complex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexFile {
    pub cells: Vec<Cell>,
    #[serde(default)]
    pub simplicial: bool,
}

/// A validated finite regular complex.
///
/// Cells are addressed by dense indices; ids are kept for I/O. Closed cells
/// of a simplicial complex are determined by their vertex sets.
#[derive(Debug, Clone)]
pub struct Complex {
    cells: Vec<Cell>,
    index: HashMap<String, usize>,
    faces: Vec<Vec<usize>>,
    vertices: Vec<Vec<usize>>,
    simplicial: bool,
    by_vertices: HashMap<Vec<usize>, usize>,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.simplicial == other.simplicial
            && self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(a, b)| {
                let fa: BTreeSet<&String> = a.faces.iter().collect();
                let fb: BTreeSet<&String> = b.faces.iter().collect();
                a.id == b.id && a.dim == b.dim && fa == fb
            })
    }
}

impl Eq for Complex {}

impl Complex {
    pub fn new(cells: Vec<Cell>, simplicial: bool) -> Result<Self, CellError> {
        let mut index = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if index.insert(c.id.clone(), i).is_some() {
                return Err(CellError::DuplicateId(c.id.clone()));
            }
        }

        let mut faces = Vec::with_capacity(cells.len());
        for c in &cells {
            let mut fs = Vec::with_capacity(c.faces.len());
            for f in &c.faces {
                let j = *index.get(f).ok_or_else(|| CellError::UnknownFace {
                    cell: c.id.clone(),
                    face: f.clone(),
                })?;
                if c.dim == 0 || cells[j].dim + 1 != c.dim {
                    return Err(CellError::FaceDimension {
                        cell: c.id.clone(),
                        face: f.clone(),
                        found: cells[j].dim,
                        expected: c.dim.wrapping_sub(1),
                    });
                }
                if fs.contains(&j) {
                    return Err(CellError::NotRegular(c.id.clone(), format!("face `{f}` listed twice")));
                }
                fs.push(j);
            }
            fs.sort_unstable();
            faces.push(fs);
        }

        for (i, c) in cells.iter().enumerate() {
            check_regular(i, c, &cells, &faces)?;
        }

        // Vertex sets, built in order of increasing dimension.
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by_key(|&i| cells[i].dim);
        let mut vertices = vec![Vec::new(); cells.len()];
        for &i in &order {
            if cells[i].dim == 0 {
                vertices[i] = vec![i];
            } else {
                let mut vs = BTreeSet::new();
                for &f in &faces[i] {
                    vs.extend(vertices[f].iter().copied());
                }
                vertices[i] = vs.into_iter().collect();
            }
        }

        let mut by_vertices = HashMap::new();
        if simplicial {
            for (i, c) in cells.iter().enumerate() {
                if vertices[i].len() != c.dim + 1 || faces[i].len() != if c.dim == 0 { 0 } else { c.dim + 1 } {
                    return Err(CellError::NotSimplicial(
                        c.id.clone(),
                        format!("{} vertices and {} faces for a {}-cell", vertices[i].len(), faces[i].len(), c.dim),
                    ));
                }
                if c.dim > 0 {
                    let mut deletions: BTreeSet<Vec<usize>> = BTreeSet::new();
                    for &f in &faces[i] {
                        deletions.insert(vertices[f].clone());
                    }
                    let expected: BTreeSet<Vec<usize>> = (0..vertices[i].len())
                        .map(|skip| {
                            vertices[i].iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect()
                        })
                        .collect();
                    if deletions != expected {
                        return Err(CellError::NotSimplicial(
                            c.id.clone(),
                            "faces are not the vertex deletions".into(),
                        ));
                    }
                }
                if by_vertices.insert(vertices[i].clone(), i).is_some() {
                    return Err(CellError::NotSimplicial(c.id.clone(), "vertex set shared with another cell".into()));
                }
            }
        }

        Ok(Self { cells, index, faces, vertices, simplicial, by_vertices })
    }

    /// The simplicial complex generated by `facets` (vertex labels), with every
    /// face included. Cell ids are the comma-joined sorted vertex labels.
    pub fn simplicial_closure<S: AsRef<[usize]>>(facets: &[S]) -> Result<Self, CellError> {
        let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
        for f in facets {
            let mut vs: Vec<usize> = f.as_ref().to_vec();
            vs.sort_unstable();
            vs.dedup();
            if vs.is_empty() {
                continue;
            }
            assert!(vs.len() <= 24, "facet too large for subset enumeration");
            for mask in 1u32..(1u32 << vs.len()) {
                let sub: Vec<usize> = (0..vs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| vs[i]).collect();
                simplices.insert(sub);
            }
        }
        let mut list: Vec<Vec<usize>> = simplices.into_iter().collect();
        list.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let cells = list
            .iter()
            .map(|s| Cell {
                id: simplex_id(s),
                dim: s.len() - 1,
                faces: if s.len() == 1 {
                    Vec::new()
                } else {
                    (0..s.len())
                        .map(|skip| {
                            let f: Vec<usize> =
                                s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                            simplex_id(&f)
                        })
                        .collect()
                },
            })
            .collect();
        Self::new(cells, true)
    }

    pub fn from_file(file: ComplexFile) -> Result<Self, CellError> {
        Self::new(file.cells, file.simplicial)
    }

    pub fn to_file(&self) -> ComplexFile {
        ComplexFile { cells: self.cells.clone(), simplicial: self.simplicial }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_simplicial(&self) -> bool {
        self.simplicial
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn id(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    pub fn dim(&self, i: usize) -> usize {
        self.cells[i].dim
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn lookup(&self, id: &str) -> Result<usize, CellError> {
        self.index_of(id).ok_or_else(|| CellError::MalformedSet(id.to_string()))
    }

    /// Codimension-one faces of cell `i`, as sorted indices.
    pub fn faces(&self, i: usize) -> &[usize] {
        &self.faces[i]
    }

    /// Vertex cells in the closure of cell `i`, as sorted indices.
    pub fn vertices(&self, i: usize) -> &[usize] {
        &self.vertices[i]
    }

    /// For simplicial complexes, the cell spanned by exactly these vertices.
    pub fn cell_spanned_by(&self, sorted_vertices: &[usize]) -> Option<usize> {
        self.by_vertices.get(sorted_vertices).copied()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn vertex_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.cells[i].dim == 0)
    }

    /// All cells in the closure of `i`, including `i`, sorted.
    pub fn closure(&self, i: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(self.faces[c].iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    /// Cells having `i` as a codimension-one face.
    pub fn cofaces(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.faces[c].binary_search(&i).is_ok()).collect()
    }
}

fn simplex_id(vs: &[usize]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn check_regular(i: usize, c: &Cell, cells: &[Cell], faces: &[Vec<usize>]) -> Result<(), CellError> {
    match c.dim {
        0 => Ok(()),
        1 => {
            if faces[i].len() == 2 {
                Ok(())
            } else {
                Err(CellError::NotRegular(c.id.clone(), format!("edge with {} endpoints", faces[i].len())))
            }
        }
        _ => {
            if faces[i].is_empty() {
                return Err(CellError::NotRegular(c.id.clone(), "no boundary faces".into()));
            }
            // Diamond property: each codimension-two face lies in exactly two facets.
            let mut incidence: BTreeMap<usize, usize> = BTreeMap::new();
            for &f in &faces[i] {
                for &g in &faces[f] {
                    *incidence.entry(g).or_default() += 1;
                }
            }
            if let Some((&g, &k)) = incidence.iter().find(|&(_, &k)| k != 2) {
                return Err(CellError::NotRegular(
                    c.id.clone(),
                    format!("codimension-two face `{}` meets {k} facets", cells[g].id),
                ));
            }
            Ok(())
        }
    }
}

fn same_complex(a: &Arc<Complex>, b: &Arc<Complex>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A union of open cells of one complex.
#[derive(Clone, PartialEq, Eq)]
pub struct DefinableSet {
    complex: Arc<Complex>,
    members: Vec<bool>,
}

impl fmt::Debug for DefinableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.member_ids()).finish()
    }
}

impl DefinableSet {
    pub fn empty(complex: Arc<Complex>) -> Self {
        let n = complex.len();
        Self { complex, members: vec![false; n] }
    }

    pub fn full(complex: Arc<Complex>) -> Self {
        let n = complex.len();
        Self { complex, members: vec![true; n] }
    }

    pub fn from_ids<S: AsRef<str>>(complex: Arc<Complex>, ids: &[S]) -> Result<Self, CellError> {
        let mut members = vec![false; complex.len()];
        for id in ids {
            members[complex.lookup(id.as_ref())?] = true;
        }
        Ok(Self { complex, members })
    }

    pub fn from_indices(complex: Arc<Complex>, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut members = vec![false; complex.len()];
        for i in indices {
            members[i] = true;
        }
        Self { complex, members }
    }

    pub fn from_mask(complex: Arc<Complex>, members: Vec<bool>) -> Self {
        assert_eq!(members.len(), complex.len(), "mask length must match the complex");
        Self { complex, members }
    }

    /// The closed cell `i` as a set (the cell with all its faces).
    pub fn closed_cell(complex: Arc<Complex>, i: usize) -> Self {
        let cl = complex.closure(i);
        Self::from_indices(complex, cl)
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    pub fn member_ids(&self) -> Vec<&str> {
        self.indices().map(|i| self.complex.id(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self, CellError> {
        if !same_complex(&self.complex, &other.complex) {
            return Err(CellError::DomainMismatch);
        }
        let members = self.members.iter().zip(&other.members).map(|(&a, &b)| op(a, b)).collect();
        Ok(Self { complex: self.complex.clone(), members })
    }

    pub fn union(&self, other: &Self) -> Result<Self, CellError> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, CellError> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self, CellError> {
        self.zip_with(other, |a, b| a && !b)
    }

    /// `X ∖ self`.
    pub fn complement(&self) -> Self {
        Self { complex: self.complex.clone(), members: self.members.iter().map(|&m| !m).collect() }
    }

    /// Whether the set is a subcomplex: closed under taking faces.
    pub fn is_closed(&self) -> bool {
        self.first_missing_face().is_none()
    }

    fn first_missing_face(&self) -> Option<(usize, usize)> {
        self.indices().find_map(|c| self.complex.faces(c).iter().find(|&&f| !self.members[f]).map(|&f| (c, f)))
    }

    /// Smallest subcomplex containing the set.
    pub fn closure(&self) -> Self {
        let mut members = self.members.clone();
        let mut stack: Vec<usize> = self.indices().collect();
        while let Some(c) = stack.pop() {
            for &f in self.complex.faces(c) {
                if !members[f] {
                    members[f] = true;
                    stack.push(f);
                }
            }
        }
        Self { complex: self.complex.clone(), members }
    }
}

pub fn set_union(a: &DefinableSet, b: &DefinableSet) -> Result<DefinableSet, CellError> {
    a.union(b)
}

pub fn set_intersect(a: &DefinableSet, b: &DefinableSet) -> Result<DefinableSet, CellError> {
    a.intersect(b)
}

/// Absolute complement `X ∖ a`.
pub fn set_complement(a: &DefinableSet) -> DefinableSet {
    a.complement()
}

/// Relative complement `a ∖ b`.
pub fn set_difference(a: &DefinableSet, b: &DefinableSet) -> Result<DefinableSet, CellError> {
    a.difference(b)
}

fn sign_of_dim(dim: usize) -> i64 {
    if dim % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Compactly supported Euler characteristic: `Σ (−1)^dim` over member cells.
pub fn chi_c(set: &DefinableSet) -> i64 {
    set.indices().map(|i| sign_of_dim(set.complex.dim(i))).sum()
}

/// An integer-valued function constant on open cells.
#[derive(Clone, PartialEq, Eq)]
pub struct ConstructibleFunction {
    complex: Arc<Complex>,
    values: Vec<i64>,
}

impl fmt::Debug for ConstructibleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.nonzero().map(|(i, v)| (self.complex.id(i), v))).finish()
    }
}

impl ConstructibleFunction {
    pub fn zero(complex: Arc<Complex>) -> Self {
        let n = complex.len();
        Self { complex, values: vec![0; n] }
    }

    pub fn constant(complex: Arc<Complex>, value: i64) -> Self {
        let n = complex.len();
        Self { complex, values: vec![value; n] }
    }

    pub fn indicator(set: &DefinableSet) -> Self {
        Self {
            complex: set.complex.clone(),
            values: set.members.iter().map(|&m| i64::from(m)).collect(),
        }
    }

    pub fn from_values(complex: Arc<Complex>, values: Vec<i64>) -> Self {
        assert_eq!(values.len(), complex.len(), "value vector length must match the complex");
        Self { complex, values }
    }

    pub fn from_map<S: AsRef<str>>(
        complex: Arc<Complex>,
        values: impl IntoIterator<Item = (S, i64)>,
    ) -> Result<Self, CellError> {
        let mut out = vec![0; complex.len()];
        for (id, v) in values {
            out[complex.lookup(id.as_ref())?] = v;
        }
        Ok(Self { complex, values: out })
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn at(&self, i: usize) -> i64 {
        self.values[i]
    }

    pub fn value(&self, id: &str) -> Result<i64, CellError> {
        Ok(self.values[self.complex.lookup(id)?])
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.values.iter().copied().enumerate().filter(|&(_, v)| v != 0)
    }

    pub fn to_map(&self) -> BTreeMap<String, i64> {
        self.nonzero().map(|(i, v)| (self.complex.id(i).to_string(), v)).collect()
    }

    pub fn support(&self) -> DefinableSet {
        DefinableSet { complex: self.complex.clone(), members: self.values.iter().map(|&v| v != 0).collect() }
    }

    /// `{x : φ(x) = value}`.
    pub fn level_set(&self, value: i64) -> DefinableSet {
        DefinableSet { complex: self.complex.clone(), members: self.values.iter().map(|&v| v == value).collect() }
    }

    pub fn distinct_values(&self) -> BTreeSet<i64> {
        self.values.iter().copied().collect()
    }

    /// The unique common value, if the function is constant.
    pub fn constant_value(&self) -> Option<i64> {
        let mut it = self.values.iter();
        let first = *it.next()?;
        it.all(|&v| v == first).then_some(first)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CellError> {
        self.linear_combination(1, other, 1)
    }

    pub fn checked_scale(&self, k: i64) -> Result<Self, CellError> {
        let values = self.values.iter().map(|&v| v.checked_mul(k).ok_or(CellError::Overflow)).collect::<Result<_, _>>()?;
        Ok(Self { complex: self.complex.clone(), values })
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: i64, other: &Self, b: i64) -> Result<Self, CellError> {
        if !same_complex(&self.complex, &other.complex) {
            return Err(CellError::DomainMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| {
                x.checked_mul(a).and_then(|ax| y.checked_mul(b).and_then(|by| ax.checked_add(by))).ok_or(CellError::Overflow)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { complex: self.complex.clone(), values })
    }
}

/// `∫_B φ dχ = Σ_{c∈B} φ(c)(−1)^{dim c}`.
pub fn integrate(phi: &ConstructibleFunction, set: &DefinableSet) -> Result<i64, CellError> {
    if !same_complex(&phi.complex, &set.complex) {
        return Err(CellError::DomainMismatch);
    }
    set.indices().try_fold(0i64, |acc, i| {
        let term = phi.values[i].checked_mul(sign_of_dim(phi.complex.dim(i))).ok_or(CellError::Overflow)?;
        acc.checked_add(term).ok_or(CellError::Overflow)
    })
}

/// Integral over the whole complex.
pub fn integrate_all(phi: &ConstructibleFunction) -> Result<i64, CellError> {
    integrate(phi, &DefinableSet::full(phi.complex.clone()))
}

/// Rank over GF(2) of a matrix given by packed bit columns.
fn gf2_rank(mut columns: Vec<Vec<u64>>) -> usize {
    let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut rank = 0;
    for col in columns.iter_mut() {
        loop {
            let Some(low) = highest_bit(col) else { break };
            match pivots.get(&low) {
                Some(p) => {
                    for (w, pw) in col.iter_mut().zip(p) {
                        *w ^= pw;
                    }
                }
                None => {
                    pivots.insert(low, col.clone());
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Mod-2 Betti numbers `b_0, …, b_d` of a subcomplex, `d` its top dimension.
pub fn betti_mod2(closed: &DefinableSet) -> Result<Vec<usize>, CellError> {
    if let Some((c, f)) = closed.first_missing_face() {
        return Err(CellError::NotASubcomplex {
            cell: closed.complex.id(c).to_string(),
            face: closed.complex.id(f).to_string(),
        });
    }
    let cx = &closed.complex;
    let Some(top) = closed.indices().map(|i| cx.dim(i)).max() else {
        return Ok(Vec::new());
    };
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for i in closed.indices() {
        by_dim[cx.dim(i)].push(i);
    }
    // rank of ∂_k : C_k → C_{k−1}, k = 1..=top
    let mut ranks = vec![0usize; top + 2];
    for k in 1..=top {
        let row_of: HashMap<usize, usize> = by_dim[k - 1].iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let words = by_dim[k - 1].len().div_ceil(64).max(1);
        let cols = by_dim[k]
            .iter()
            .map(|&c| {
                let mut col = vec![0u64; words];
                for f in cx.faces(c) {
                    let r = row_of[f];
                    col[r / 64] ^= 1 << (r % 64);
                }
                col
            })
            .collect();
        ranks[k] = gf2_rank(cols);
    }
    Ok((0..=top).map(|k| by_dim[k].len() - ranks[k] - ranks[k + 1]).collect())
}

/// Half the total mod-2 Betti number of a subcomplex.
pub fn semicharacteristic(closed: &DefinableSet) -> Result<i64, CellError> {
    let total: usize = betti_mod2(closed)?.iter().sum();
    if total % 2 == 1 {
        return Err(CellError::SemicharacteristicUndefined(total));
    }
    Ok((total / 2) as i64)
}

/// A barycentric subdivision with the carrier of each new simplex: the old
/// cell whose interior contains it.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub complex: Arc<Complex>,
    pub carrier: Vec<usize>,
    pub original: Arc<Complex>,
}

impl Subdivision {
    pub fn transport_set(&self, set: &DefinableSet) -> Result<DefinableSet, CellError> {
        if !same_complex(&self.original, &set.complex) {
            return Err(CellError::DomainMismatch);
        }
        let members = self.carrier.iter().map(|&c| set.members[c]).collect();
        Ok(DefinableSet { complex: self.complex.clone(), members })
    }

    pub fn transport_function(&self, phi: &ConstructibleFunction) -> Result<ConstructibleFunction, CellError> {
        if !same_complex(&self.original, &phi.complex) {
            return Err(CellError::DomainMismatch);
        }
        let values = self.carrier.iter().map(|&c| phi.values[c]).collect();
        Ok(ConstructibleFunction { complex: self.complex.clone(), values })
    }
}

/// Order complex of the face poset. The poset is graded, so maximal chains
/// descend one dimension at a time. Vertex `v` of the result is the barycenter
/// of old cell `v`; simplices are chains of proper faces.
pub fn barycentric_subdivision(complex: &Arc<Complex>) -> Result<Subdivision, CellError> {
    let n = complex.len();
    let mut facets: Vec<Vec<usize>> = Vec::new();
    let mut chain = Vec::new();
    // Maximal chains start at cells with no cofaces.
    let mut has_coface = vec![false; n];
    for i in 0..n {
        for &f in complex.faces(i) {
            has_coface[f] = true;
        }
    }
    for top in (0..n).filter(|&i| !has_coface[i]) {
        chain.clear();
        chain.push(top);
        descend(complex, &mut chain, &mut facets);
    }
    let sub = Complex::simplicial_closure(&facets)?;
    let carrier = (0..sub.len())
        .map(|i| {
            sub.vertices(i)
                .iter()
                .map(|&v| sub.id(v).parse::<usize>().expect("numeric vertex label"))
                .max_by_key(|&old| complex.dim(old))
                .expect("nonempty simplex")
        })
        .collect();
    Ok(Subdivision { complex: Arc::new(sub), carrier, original: complex.clone() })
}

fn descend(complex: &Complex, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *chain.last().expect("chain is nonempty");
    let faces = complex.faces(last);
    if faces.is_empty() {
        out.push(chain.clone());
        return;
    }
    for &f in faces {
        chain.push(f);
        descend(complex, chain, out);
        chain.pop();
    }
}

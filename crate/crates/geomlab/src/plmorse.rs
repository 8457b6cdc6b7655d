//! PL Morse theory for height functions on triangulated closed surfaces.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use eulerint_core::cellcx::chi_c;
use eulerint_core::localfib::{Sign, StratumType};
use eulerint_core::{CellError, Complex, DefinableSet, SingularLedger};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{int, parse_rat, rat_string, PolyError, Rat};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorseError {
    #[error("not a closed surface: {0}")]
    NotSurface(String),
    #[error("vertices {0} and {1} have the same height; choose another direction")]
    DegenerateDirection(usize, usize),
    #[error("vertex {vertex} has {arcs} lower-link arcs; the height function is not Morse there")]
    NotMorse { vertex: usize, arcs: usize },
    #[error("direction is zero")]
    ZeroDirection,
    #[error(transparent)]
    Coordinate(#[from] PolyError),
    #[error(transparent)]
    Complex(#[from] CellError),
}

/// A closed triangulated surface with rational vertex coordinates in ℝ³.
#[derive(Debug, Clone)]
pub struct EmbeddedSurface {
    pub triangles: Vec<[usize; 3]>,
    pub coords: Vec<[Rat; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Coord {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub triangles: Vec<[usize; 3]>,
    coords: Vec<[Coord; 3]>,
}

impl TryFrom<SurfaceFile> for EmbeddedSurface {
    type Error = MorseError;

    fn try_from(f: SurfaceFile) -> Result<Self, MorseError> {
        let conv = |c: &Coord| match c {
            Coord::Int(v) => Ok(int(*v)),
            Coord::Text(s) => parse_rat(s),
        };
        let coords = f
            .coords
            .iter()
            .map(|p| Ok([conv(&p[0])?, conv(&p[1])?, conv(&p[2])?]))
            .collect::<Result<Vec<_>, PolyError>>()?;
        EmbeddedSurface::new(f.triangles, coords)
    }
}

impl From<&EmbeddedSurface> for SurfaceFile {
    fn from(s: &EmbeddedSurface) -> Self {
        SurfaceFile {
            triangles: s.triangles.clone(),
            coords: s.coords.iter().map(|p| p.clone().map(|c| Coord::Text(rat_string(&c)))).collect(),
        }
    }
}

impl EmbeddedSurface {
    pub fn new(triangles: Vec<[usize; 3]>, coords: Vec<[Rat; 3]>) -> Result<Self, MorseError> {
        let s = EmbeddedSurface { triangles, coords };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), MorseError> {
        let nv = self.coords.len();
        let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for t in &self.triangles {
            if t.iter().any(|&v| v >= nv) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MorseError::NotSurface(format!("bad triangle {t:?}")));
            }
            let mut key = *t;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(MorseError::NotSurface(format!("repeated triangle {t:?}")));
            }
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        if let Some((e, c)) = edges.iter().find(|&(_, &c)| c != 2) {
            return Err(MorseError::NotSurface(format!("edge {e:?} lies in {c} triangles")));
        }
        for v in 0..nv {
            let link = self.link(v);
            if link.is_empty() {
                return Err(MorseError::NotSurface(format!("vertex {v} lies in no triangle")));
            }
            if cycle_order(&link).is_none() {
                return Err(MorseError::NotSurface(format!("link of vertex {v} is not a circle")));
            }
        }
        Ok(())
    }

    /// Link edges of a vertex.
    fn link(&self, v: usize) -> Vec<(usize, usize)> {
        self.triangles
            .iter()
            .filter(|t| t.contains(&v))
            .map(|t| {
                let o: Vec<usize> = t.iter().copied().filter(|&w| w != v).collect();
                (o[0], o[1])
            })
            .collect()
    }

    pub fn complex(&self) -> Result<Complex, MorseError> {
        Ok(Complex::simplicial_closure(&self.triangles)?)
    }

    pub fn euler_characteristic(&self) -> Result<i64, MorseError> {
        let cx = Arc::new(self.complex()?);
        Ok(chi_c(&DefinableSet::full(cx)))
    }

    /// Boundary of the octahedron, vertices `±e_i`.
    pub fn octahedron() -> Self {
        let mut coords = Vec::new();
        for axis in 0..3 {
            for s in [1, -1] {
                let mut p = [int(0), int(0), int(0)];
                p[axis] = int(s);
                coords.push(p);
            }
        }
        let mut triangles = Vec::new();
        for a in 0..2 {
            for b in 2..4 {
                for c in 4..6 {
                    triangles.push([a, b, c]);
                }
            }
        }
        EmbeddedSurface::new(triangles, coords).expect("octahedron is a surface")
    }

    /// Boundary of the regular tetrahedron inscribed in the cube `[−1, 1]³`.
    pub fn tetrahedron() -> Self {
        let coords = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]].map(|p| p.map(int)).to_vec();
        let triangles = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        EmbeddedSurface::new(triangles, coords).expect("tetrahedron is a surface")
    }

    /// 16-vertex torus of revolution, radii 2 and 1, sampled at quarter turns.
    pub fn torus() -> Self {
        let (cos, sin) = ([1, 0, -1, 0], [0, 1, 0, -1]);
        let idx = |i: usize, j: usize| (i % 4) * 4 + (j % 4);
        let mut coords = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                let w = 2 + cos[j];
                coords.push([int(w * cos[i]), int(w * sin[i]), int(sin[j])]);
            }
        }
        let mut triangles = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        EmbeddedSurface::new(triangles, coords).expect("torus is a surface")
    }
}

fn cycle_order(edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|n| n.len() != 2) {
        return None;
    }
    let start = *adj.keys().next()?;
    let mut order = vec![start];
    let (mut prev, mut cur) = (start, adj[&start][0]);
    while cur != start {
        order.push(cur);
        let next = if adj[&cur][0] == prev { adj[&cur][1] } else { adj[&cur][0] };
        prev = cur;
        cur = next;
    }
    (order.len() == adj.len()).then_some(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Regular,
    Minimum,
    Maximum,
    Saddle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalVertex {
    pub vertex: usize,
    pub height: String,
    pub kind: VertexKind,
}

#[derive(Debug, Clone)]
pub struct MorseData {
    pub heights: Vec<Rat>,
    pub kinds: Vec<VertexKind>,
}

impl MorseData {
    pub fn count(&self, kind: VertexKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    pub fn critical(&self) -> Vec<CriticalVertex> {
        let mut out: Vec<CriticalVertex> = (0..self.kinds.len())
            .filter(|&v| self.kinds[v] != VertexKind::Regular)
            .map(|v| CriticalVertex { vertex: v, height: rat_string(&self.heights[v]), kind: self.kinds[v] })
            .collect();
        out.sort_by(|a, b| self.heights[a.vertex].cmp(&self.heights[b.vertex]));
        out
    }
}

/// Classifies every vertex by its lower link under the height `⟨direction, ·⟩`.
pub fn morse_data(s: &EmbeddedSurface, direction: &[Rat; 3]) -> Result<MorseData, MorseError> {
    if direction.iter().all(|c| *c == int(0)) {
        return Err(MorseError::ZeroDirection);
    }
    let heights: Vec<Rat> = s
        .coords
        .iter()
        .map(|p| &(&(&p[0] * &direction[0]) + &(&p[1] * &direction[1])) + &(&p[2] * &direction[2]))
        .collect();
    let mut order: Vec<usize> = (0..heights.len()).collect();
    order.sort_by(|&a, &b| heights[a].cmp(&heights[b]));
    if let Some(w) = order.windows(2).find(|w| heights[w[0]] == heights[w[1]]) {
        return Err(MorseError::DegenerateDirection(w[0].min(w[1]), w[0].max(w[1])));
    }
    let mut kinds = Vec::with_capacity(heights.len());
    for v in 0..heights.len() {
        let cycle = cycle_order(&s.link(v)).expect("validated surface");
        let lower: Vec<bool> = cycle.iter().map(|&w| heights[w] < heights[v]).collect();
        let kind = if lower.iter().all(|&l| !l) {
            VertexKind::Minimum
        } else if lower.iter().all(|&l| l) {
            VertexKind::Maximum
        } else {
            let n = lower.len();
            let arcs = (0..n).filter(|&i| lower[i] && !lower[(i + 1) % n]).count();
            match arcs {
                1 => VertexKind::Regular,
                2 => VertexKind::Saddle,
                _ => return Err(MorseError::NotMorse { vertex: v, arcs }),
            }
        };
        kinds.push(kind);
    }
    Ok(MorseData { heights, kinds })
}

/// Ledger of the height function `M → ℝ`: extrema are `A1+` (nearby fiber a
/// circle), saddles `A1-` (nearby fiber two arcs).
pub fn pl_morse_ledger(s: &EmbeddedSurface, direction: &[Rat; 3]) -> Result<SingularLedger, MorseError> {
    let d = morse_data(s, direction)?;
    let extrema = d.count(VertexKind::Minimum) + d.count(VertexKind::Maximum);
    let mut counts = BTreeMap::new();
    counts.insert(StratumType::a(1, Some(Sign::Plus)), extrema as u64);
    counts.insert(StratumType::a(1, Some(Sign::Minus)), d.count(VertexKind::Saddle) as u64);
    Ok(SingularLedger {
        m: 2,
        n: 1,
        chi_m: s.euler_characteristic()?,
        chi_n: -1,
        chi_f: Some(0),
        stable: true,
        counts,
        ..Default::default()
    })
}

/// Height-axis decomposition of a PL Morse function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalData {
    pub critical_values: Vec<String>,
    /// `χ({g < t})` on the open intervals between critical values, lowest first.
    pub sublevel_chi: Vec<i64>,
    /// Number of level-set circles on the same intervals.
    pub level_components: Vec<usize>,
    /// Ledger of `F(x, z) = g(x) + z²` on `M × ℝ`, carrying `nmax`/`nmin`.
    pub ledger: SingularLedger,
}

/// Interval data of the height function and its quadratic suspension
/// `g + z²: M × ℝ → ℝ`, whose fiber over `t` is `{g < t}` doubled along `{g = t}`.
pub fn interval_ledger(s: &EmbeddedSurface, direction: &[Rat; 3]) -> Result<IntervalData, MorseError> {
    let d = morse_data(s, direction)?;
    let cx = Arc::new(s.complex()?);
    let label: Vec<usize> = (0..cx.len())
        .map(|i| if cx.dim(i) == 0 { cx.id(i).parse().unwrap_or(usize::MAX) } else { usize::MAX })
        .collect();
    let critical = d.critical();
    let mut cuts: Vec<Rat> = critical.iter().map(|c| d.heights[c.vertex].clone()).collect();
    cuts.dedup();
    // One sample height per open interval: below all, between, above all.
    let mut samples = Vec::with_capacity(cuts.len() + 1);
    samples.push(&cuts[0] - int(1));
    for w in cuts.windows(2) {
        samples.push((&w[0] + &w[1]) / int(2));
    }
    samples.push(cuts.last().expect("a closed surface has extrema") + int(1));

    let mut sublevel_chi = Vec::new();
    let mut level_components = Vec::new();
    for t in &samples {
        let below: Vec<usize> = (0..cx.len())
            .filter(|&i| cx.vertices(i).iter().all(|&v| d.heights[label[v]] < *t))
            .collect();
        sublevel_chi.push(chi_c(&DefinableSet::from_indices(cx.clone(), below)));
        level_components.push(level_circles(s, &d.heights, t));
    }

    let fib: Vec<i64> = sublevel_chi.iter().map(|x| 2 * x).collect();
    let mut nmax = BTreeMap::new();
    let mut nmin = BTreeMap::new();
    for (i, &j) in fib.iter().enumerate() {
        *nmax.entry(j).or_insert(0) -= 1;
        *nmin.entry(j).or_insert(0) -= 1;
        if i + 1 < fib.len() {
            *nmax.entry(j.max(fib[i + 1])).or_insert(0) += 1;
            *nmin.entry(j.min(fib[i + 1])).or_insert(0) += 1;
        }
    }
    nmax.retain(|_, c| *c != 0);
    nmin.retain(|_, c| *c != 0);
    let extrema = d.count(VertexKind::Minimum) + d.count(VertexKind::Maximum);
    let mut strata = BTreeMap::new();
    strata.insert(StratumType::a(1, Some(Sign::Plus)), extrema as i64);
    strata.insert(StratumType::a(1, Some(Sign::Minus)), d.count(VertexKind::Saddle) as i64);
    let ledger = SingularLedger {
        m: 3,
        n: 1,
        chi_m: -s.euler_characteristic()?,
        chi_n: -1,
        chi_f: Some(0),
        stable: true,
        strata,
        nmax: Some(nmax),
        nmin: Some(nmin),
        ..Default::default()
    };
    Ok(IntervalData { critical_values: cuts.iter().map(rat_string).collect(), sublevel_chi, level_components, ledger })
}

/// Components of the level set `{g = t}` at a regular value: crossing
/// points on edges, joined through the triangles.
fn level_circles(s: &EmbeddedSurface, h: &[Rat], t: &Rat) -> usize {
    let crosses = |a: usize, b: usize| (h[a] < *t) != (h[b] < *t);
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut parent: Vec<usize> = Vec::new();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for tri in &s.triangles {
        let hits: Vec<usize> = [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])]
            .into_iter()
            .filter(|&(a, b)| crosses(a, b))
            .map(|(a, b)| {
                let key = (a.min(b), a.max(b));
                let n = ids.len();
                *ids.entry(key).or_insert_with(|| {
                    parent.push(n);
                    n
                })
            })
            .collect();
        if let [a, b] = hits[..] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    (0..parent.len()).filter(|&x| find(&mut parent, x) == x).count()
}

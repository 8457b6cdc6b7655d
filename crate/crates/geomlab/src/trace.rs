//! Level curves of plane polynomials by exact-sign marching squares.
//!
//! Vertex signs are exact. A vertex where `f = t` exactly is read as positive,
//! which traces the level `t − ε` for an infinitesimal `ε > 0`; for a regular
//! level this has the same topology in the box. Edges are classified by
//! interval bounds when those decide, otherwise by Sturm sequences, and cells
//! whose crossings do not pair up uniquely are subdivided.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{int, isolate_roots, rat, split_point, to_f64, Interval, Poly, PolyError, PolyMap, Rat, UPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error(transparent)]
    Shape(#[from] PolyError),
    #[error("box must have positive widths")]
    EmptyBox,
    #[error("grid counts must be positive")]
    EmptyGrid,
    #[error("cell near ({x:.6}, {y:.6}) still ambiguous after {depth} subdivisions")]
    ResolutionExhausted { x: f64, y: f64, depth: u32 },
    #[error("level is not transverse to the box boundary near ({x:.6}, {y:.6})")]
    UnstableLevel { x: f64, y: f64 },
    #[error("component counts change under refinement: {base:?} at base, {refined:?} after grid doubling, {enlarged:?} after box doubling")]
    Inconclusive { base: (usize, usize), refined: (usize, usize), enlarged: (usize, usize) },
}

/// Axis-parallel rectangle with rational corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneBox {
    pub x0: Rat,
    pub x1: Rat,
    pub y0: Rat,
    pub y1: Rat,
}

impl PlaneBox {
    pub fn new(x0: Rat, x1: Rat, y0: Rat, y1: Rat) -> Result<Self, TraceError> {
        if x1 <= x0 || y1 <= y0 {
            return Err(TraceError::EmptyBox);
        }
        Ok(PlaneBox { x0, x1, y0, y1 })
    }

    /// `[−h, h]²`.
    pub fn square(h: Rat) -> Result<Self, TraceError> {
        PlaneBox::new(-h.clone(), h.clone(), -h.clone(), h)
    }

    /// Same center, twice the side lengths.
    pub fn doubled(&self) -> Self {
        let half = rat(1, 2);
        let (cx, cy) = ((&self.x0 + &self.x1) * &half, (&self.y0 + &self.y1) * &half);
        PlaneBox {
            x0: &cx * int(2) - &self.x1,
            x1: &cx * int(2) - &self.x0,
            y0: &cy * int(2) - &self.y1,
            y1: &cy * int(2) - &self.y0,
        }
    }

    pub fn bounds_f64(&self) -> [f64; 4] {
        [to_f64(&self.x0), to_f64(&self.x1), to_f64(&self.y0), to_f64(&self.y1)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub nx: u32,
    pub ny: u32,
}

impl GridSpec {
    pub fn square(n: u32) -> Self {
        GridSpec { nx: n, ny: n }
    }

    pub fn doubled(self) -> Self {
        GridSpec { nx: self.nx * 2, ny: self.ny * 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
    pub boundary_exits: u8,
}

/// Euler characteristics of the two sides of a traced level in its box.
///
/// `closed_*` is `χ` of `{±(f − t) ≥ 0} ∩ box`; `open_*` is `χ_c` of
/// `{±(f − t) > 0}` inside the open box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RegionChi {
    pub closed_plus: i64,
    pub closed_minus: i64,
    pub open_plus: i64,
    pub open_minus: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracedCurve {
    pub level: String,
    pub components: Vec<Polyline>,
    pub regions: RegionChi,
}

impl TracedCurve {
    pub fn open_count(&self) -> usize {
        self.components.iter().filter(|c| !c.closed).count()
    }

    pub fn closed_count(&self) -> usize {
        self.components.iter().filter(|c| c.closed).count()
    }

    /// Points where the curve meets the box boundary.
    pub fn boundary_points(&self) -> usize {
        self.components.iter().map(|c| c.boundary_exits as usize).sum()
    }
}

/// `χ_c` of a traced 1-manifold: open arcs count −1, circles 0.
pub fn curve_chi_c(c: &TracedCurve) -> i64 {
    -(c.open_count() as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceOptions {
    /// Maximum number of times one grid cell is halved.
    pub max_depth: u32,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { max_depth: 12 }
    }
}

/// Traces `{f = t} ∩ box` for `f: ℝ² → ℝ`.
pub fn trace_plane_fiber(f: &PolyMap, t: &Rat, bx: &PlaneBox, grid: GridSpec) -> Result<TracedCurve, TraceError> {
    trace_with(f, t, bx, grid, TraceOptions::default())
}

pub fn trace_with(f: &PolyMap, t: &Rat, bx: &PlaneBox, grid: GridSpec, opts: TraceOptions) -> Result<TracedCurve, TraceError> {
    f.expect_shape(2, 1, "ℝ² → ℝ")?;
    let g = &f.components[0] - &Poly::constant(2, t.clone());
    trace_poly(&g, bx, grid, opts).map(|(components, regions)| TracedCurve {
        level: crate::poly::rat_string(t),
        components,
        regions,
    })
}

/// Result of a trace that was repeated under grid and box doubling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableFiber {
    pub chi_c: i64,
    pub curve: TracedCurve,
}

/// Traces at `(box, grid)`, `(box, 2·grid)` and `(2·box, 2·grid)` and returns
/// the base curve when the component counts agree.
pub fn stable_fiber(f: &PolyMap, t: &Rat, bx: &PlaneBox, grid: GridSpec) -> Result<StableFiber, TraceError> {
    let base = trace_plane_fiber(f, t, bx, grid)?;
    let refined = trace_plane_fiber(f, t, bx, grid.doubled())?;
    let enlarged = trace_plane_fiber(f, t, &bx.doubled(), grid.doubled())?;
    let key = |c: &TracedCurve| (c.open_count(), c.closed_count());
    if key(&base) != key(&refined) || key(&base) != key(&enlarged) {
        return Err(TraceError::Inconclusive { base: key(&base), refined: key(&refined), enlarged: key(&enlarged) });
    }
    Ok(StableFiber { chi_c: curve_chi_c(&base), curve: base })
}

/// `χ_c(f⁻¹(t))` with the stability gate.
pub fn fiber_chi_c(f: &PolyMap, t: &Rat, bx: &PlaneBox, grid: GridSpec) -> Result<i64, TraceError> {
    stable_fiber(f, t, bx, grid).map(|s| s.chi_c)
}

const NONE: usize = usize::MAX;

/// Interval bisection levels tried on a segment before Sturm sequences.
const BISECT_DEPTH: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    /// From vertex `(i, j)` to `(i + 1, j)`.
    H(u32, u32),
    /// From vertex `(i, j)` to `(i, j + 1)`.
    V(u32, u32),
}

/// A crossing found on a segment: parameter along it and which end is on the negative side.
#[derive(Debug, Clone, Copy)]
struct SegCrossing {
    param: f64,
    neg_toward_start: bool,
}

struct Crossing {
    pos: [f64; 2],
    /// Unit vector along the carrying segment, pointing into `{g < 0}`.
    neg_dir: [f64; 2],
    /// Perimeter sort key for crossings on the box boundary.
    perimeter: Option<(u8, u32, f64)>,
    links: [usize; 2],
}

struct Tracer<'a> {
    g: &'a Poly,
    gx: Poly,
    gy: Poly,
    gxx: Poly,
    gyy: Poly,
    xs: Vec<Rat>,
    ys: Vec<Rat>,
    xi: Vec<Interval>,
    yi: Vec<Interval>,
    nx: u32,
    ny: u32,
    vsign: HashMap<(u32, u32), i8>,
    edges: HashMap<EdgeKey, Vec<usize>>,
    crossings: Vec<Crossing>,
    max_depth: u32,
}

fn perturbed(s: i8) -> i8 {
    if s == 0 {
        1
    } else {
        s
    }
}

fn grid_coords(lo: &Rat, hi: &Rat, n: u32) -> Vec<Rat> {
    let step = (hi - lo) / int(i64::from(n));
    (0..=n).map(|i| lo + &step * int(i64::from(i))).collect()
}

fn trace_poly(g: &Poly, bx: &PlaneBox, grid: GridSpec, opts: TraceOptions) -> Result<(Vec<Polyline>, RegionChi), TraceError> {
    if grid.nx == 0 || grid.ny == 0 {
        return Err(TraceError::EmptyGrid);
    }
    let xs = grid_coords(&bx.x0, &bx.x1, grid.nx);
    let ys = grid_coords(&bx.y0, &bx.y1, grid.ny);
    let mut tr = Tracer {
        g,
        gx: g.partial(0),
        gy: g.partial(1),
        gxx: g.partial(0).partial(0),
        gyy: g.partial(1).partial(1),
        xi: xs.iter().map(Interval::of_rat).collect(),
        yi: ys.iter().map(Interval::of_rat).collect(),
        xs,
        ys,
        nx: grid.nx,
        ny: grid.ny,
        vsign: HashMap::new(),
        edges: HashMap::new(),
        crossings: Vec::new(),
        max_depth: opts.max_depth,
    };
    tr.check_corners()?;
    let mut cells = Vec::new();
    tr.collect_cells(0, grid.nx, 0, grid.ny, &mut cells);
    cells.sort_unstable();
    for (i, j) in cells {
        tr.resolve_grid_cell(i, j)?;
    }
    tr.assemble()
}

impl Tracer<'_> {
    fn check_corners(&mut self) -> Result<(), TraceError> {
        for (i, j) in [(0, 0), (self.nx, 0), (0, self.ny), (self.nx, self.ny)] {
            let p = [self.xs[i as usize].clone(), self.ys[j as usize].clone()];
            if self.g.sign_at(&p) == 0 {
                return Err(TraceError::UnstableLevel { x: to_f64(&p[0]), y: to_f64(&p[1]) });
            }
        }
        Ok(())
    }

    fn span(&self, i0: u32, i1: u32, j0: u32, j1: u32) -> [Interval; 2] {
        [
            Interval { lo: self.xi[i0 as usize].lo, hi: self.xi[i1 as usize].hi },
            Interval { lo: self.yi[j0 as usize].lo, hi: self.yi[j1 as usize].hi },
        ]
    }

    /// Cells whose closure may meet the level, found by interval culling.
    fn collect_cells(&self, i0: u32, i1: u32, j0: u32, j1: u32, out: &mut Vec<(u32, u32)>) {
        if !self.g.eval_interval(&self.span(i0, i1, j0, j1)).contains_zero() {
            return;
        }
        if i1 - i0 == 1 && j1 - j0 == 1 {
            out.push((i0, j0));
            return;
        }
        if i1 - i0 >= j1 - j0 {
            let m = (i0 + i1) / 2;
            self.collect_cells(i0, m, j0, j1, out);
            self.collect_cells(m, i1, j0, j1, out);
        } else {
            let m = (j0 + j1) / 2;
            self.collect_cells(i0, i1, j0, m, out);
            self.collect_cells(i0, i1, m, j1, out);
        }
    }

    fn vertex_sign(&mut self, i: u32, j: u32) -> i8 {
        if let Some(&s) = self.vsign.get(&(i, j)) {
            return s;
        }
        let s = perturbed(self.g.sign_at(&[self.xs[i as usize].clone(), self.ys[j as usize].clone()]));
        self.vsign.insert((i, j), s);
        s
    }

    fn grid_edge(&mut self, key: EdgeKey) -> Result<Vec<usize>, TraceError> {
        if let Some(v) = self.edges.get(&key) {
            return Ok(v.clone());
        }
        let (i, j, i2, j2, axis) = match key {
            EdgeKey::H(i, j) => (i, j, i + 1, j, 0),
            EdgeKey::V(i, j) => (i, j, i, j + 1, 1),
        };
        let boundary = match key {
            EdgeKey::H(_, j) => j == 0 || j == self.ny,
            EdgeKey::V(i, _) => i == 0 || i == self.nx,
        };
        let s0 = self.vertex_sign(i, j);
        let s1 = self.vertex_sign(i2, j2);
        let p0 = [self.xs[i as usize].clone(), self.ys[j as usize].clone()];
        let p1 = [self.xs[i2 as usize].clone(), self.ys[j2 as usize].clone()];
        let found = self.analyze(&p0, &p1, s0, s1, axis, boundary)?;
        let perim = |param: f64| -> Option<(u8, u32, f64)> {
            match key {
                EdgeKey::H(i, 0) => Some((0, i, param)),
                EdgeKey::V(i, j) if i == self.nx => Some((1, j, param)),
                EdgeKey::H(i, j) if j == self.ny => Some((2, self.nx - 1 - i, 1.0 - param)),
                EdgeKey::V(0, j) => Some((3, self.ny - 1 - j, 1.0 - param)),
                _ => None,
            }
        };
        let keys: Vec<_> = found.iter().map(|c| if boundary { perim(c.param) } else { None }).collect();
        let ids: Vec<usize> = found.iter().zip(keys).map(|(c, k)| self.push_crossing(&p0, &p1, *c, k)).collect();
        self.edges.insert(key, ids.clone());
        Ok(ids)
    }

    fn push_crossing(&mut self, p0: &[Rat; 2], p1: &[Rat; 2], c: SegCrossing, perimeter: Option<(u8, u32, f64)>) -> usize {
        let a = [to_f64(&p0[0]), to_f64(&p0[1])];
        let b = [to_f64(&p1[0]), to_f64(&p1[1])];
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let unit = [d[0] / len, d[1] / len];
        let neg_dir = if c.neg_toward_start { [-unit[0], -unit[1]] } else { unit };
        self.crossings.push(Crossing {
            pos: [a[0] + c.param * d[0], a[1] + c.param * d[1]],
            neg_dir,
            perimeter,
            links: [NONE, NONE],
        });
        self.crossings.len() - 1
    }

    /// Crossings of the perturbed level on the segment `p0 → p1`, which is parallel to `axis`.
    fn analyze(&self, p0: &[Rat; 2], p1: &[Rat; 2], s0: i8, s1: i8, axis: usize, boundary: bool) -> Result<Vec<SegCrossing>, TraceError> {
        let span = [Interval::hull(&p0[0], &p1[0]), Interval::hull(&p0[1], &p1[1])];
        if !self.g.eval_interval(&span).contains_zero() {
            return Ok(vec![]);
        }
        let mut found = Vec::new();
        if self.bisect(p0, p1, s0, s1, axis, (0.0, 1.0), BISECT_DEPTH, &mut found) {
            return Ok(found);
        }
        let dir = [&p1[0] - &p0[0], &p1[1] - &p0[1]];
        let q = self.g.restrict(p0, &dir);
        if q.is_zero() {
            return Ok(vec![]);
        }
        let (zero, one) = (Rat::zero(), Rat::one());
        if boundary {
            let g2 = q.gcd(&q.derivative());
            if g2.degree().unwrap_or(0) > 0
                && (g2.eval(&zero).is_zero() || g2.eval(&one).is_zero() || !isolate_roots(&g2, &zero, &one).is_empty())
            {
                let mid = [to_f64(&(&p0[0] + &p1[0])) / 2.0, to_f64(&(&p0[1] + &p1[1])) / 2.0];
                return Err(TraceError::UnstableLevel { x: mid[0], y: mid[1] });
            }
        }
        Ok(segment_crossings(&q, s0, s1))
    }

    /// Decides the segment by interval bounds on pieces of it: a piece where
    /// `g` keeps its sign has no crossing, one where `g` is monotone has one
    /// exactly when its perturbed end signs differ. `false` when some piece
    /// stays undecided at the depth limit.
    #[allow(clippy::too_many_arguments)]
    fn bisect(&self, p0: &[Rat; 2], p1: &[Rat; 2], s0: i8, s1: i8, axis: usize, params: (f64, f64), depth: u32, out: &mut Vec<SegCrossing>) -> bool {
        let span = [Interval::hull(&p0[0], &p1[0]), Interval::hull(&p0[1], &p1[1])];
        if !self.g.eval_interval(&span).contains_zero() {
            return true;
        }
        let along = if axis == 0 { &self.gx } else { &self.gy };
        if !along.eval_interval(&span).contains_zero() {
            if s0 != s1 {
                out.push(self.interpolated(p0, p1, s0, params));
            }
            return true;
        }
        // A convex (concave) piece has at most two roots, none when both
        // ends are negative (positive) and exactly one when they differ.
        let bend = if axis == 0 { &self.gxx } else { &self.gyy };
        if let Some(curv) = bend.eval_interval(&span).sign() {
            if s0 == s1 && s0 == -curv {
                return true;
            }
            if s0 != s1 {
                out.push(self.interpolated(p0, p1, s0, params));
                return true;
            }
        }
        if depth == 0 {
            return false;
        }
        let half = rat(1, 2);
        let m = [(&p0[0] + &p1[0]) * &half, (&p0[1] + &p1[1]) * &half];
        let sm = perturbed(self.g.sign_at(&m));
        let pm = (params.0 + params.1) / 2.0;
        self.bisect(p0, &m, s0, sm, axis, (params.0, pm), depth - 1, out)
            && self.bisect(&m, p1, sm, s1, axis, (pm, params.1), depth - 1, out)
    }

    /// The single crossing of a piece with opposite end signs, placed by linear interpolation.
    fn interpolated(&self, p0: &[Rat; 2], p1: &[Rat; 2], s0: i8, params: (f64, f64)) -> SegCrossing {
        let v0 = self.g.eval_f64(&[to_f64(&p0[0]), to_f64(&p0[1])]);
        let v1 = self.g.eval_f64(&[to_f64(&p1[0]), to_f64(&p1[1])]);
        let u = if (v0 - v1).abs() > 0.0 { (v0 / (v0 - v1)).clamp(0.0, 1.0) } else { 0.5 };
        SegCrossing { param: params.0 + u * (params.1 - params.0), neg_toward_start: s0 < 0 }
    }

    fn link(&mut self, a: usize, b: usize) -> Result<(), TraceError> {
        for (u, v) in [(a, b), (b, a)] {
            let c = &mut self.crossings[u];
            if c.links[0] == NONE {
                c.links[0] = v;
            } else if c.links[1] == NONE {
                c.links[1] = v;
            } else {
                return Err(TraceError::ResolutionExhausted { x: c.pos[0], y: c.pos[1], depth: self.max_depth });
            }
        }
        Ok(())
    }

    fn resolve_grid_cell(&mut self, i: u32, j: u32) -> Result<(), TraceError> {
        let sides = [
            self.grid_edge(EdgeKey::H(i, j))?,
            self.grid_edge(EdgeKey::V(i + 1, j))?,
            self.grid_edge(EdgeKey::H(i, j + 1))?,
            self.grid_edge(EdgeKey::V(i, j))?,
        ];
        let corners = [
            self.vertex_sign(i, j),
            self.vertex_sign(i + 1, j),
            self.vertex_sign(i + 1, j + 1),
            self.vertex_sign(i, j + 1),
        ];
        let rect = [
            self.xs[i as usize].clone(),
            self.xs[i as usize + 1].clone(),
            self.ys[j as usize].clone(),
            self.ys[j as usize + 1].clone(),
        ];
        self.resolve(&rect, corners, sides, 0)
    }

    /// Pairs the crossings on the sides of `rect = [x0, x1, y0, y1]`.
    ///
    /// Sides run bottom (left to right), right (bottom to top), top (left to
    /// right), left (bottom to top); `corners` are SW, SE, NE, NW signs.
    fn resolve(&mut self, rect: &[Rat; 4], corners: [i8; 4], sides: [Vec<usize>; 4], depth: u32) -> Result<(), TraceError> {
        let total: usize = sides.iter().map(Vec::len).sum();
        if total == 0 {
            return Ok(());
        }
        if total == 2 {
            let ends: Vec<usize> = sides.iter().flatten().copied().collect();
            return self.link(ends[0], ends[1]);
        }
        let [x0, x1, y0, y1] = rect;
        let half = rat(1, 2);
        let (mx, my) = ((x0 + x1) * &half, (y0 + y1) * &half);
        if depth >= self.max_depth {
            return Err(TraceError::ResolutionExhausted { x: to_f64(&mx), y: to_f64(&my), depth });
        }
        let sign = |x: &Rat, y: &Rat| perturbed(self.g.sign_at(&[x.clone(), y.clone()]));
        let [sw, se, ne, nw] = corners;
        let (sb, sr, st, sl, sc) = (sign(&mx, y0), sign(x1, &my), sign(&mx, y1), sign(x0, &my), sign(&mx, &my));

        let pt = |x: &Rat, y: &Rat| [x.clone(), y.clone()];
        // Split a parent side at its midpoint; the first half's count decides the split.
        let split = |tr: &Self, side: &[usize], a: [Rat; 2], m: [Rat; 2], b: [Rat; 2], sa: i8, sm: i8, sb_: i8, axis: usize| {
            let first = tr.analyze(&a, &m, sa, sm, axis, false)?.len();
            let second = tr.analyze(&m, &b, sm, sb_, axis, false)?.len();
            if first + second != side.len() {
                return Err(TraceError::ResolutionExhausted { x: to_f64(&m[0]), y: to_f64(&m[1]), depth });
            }
            Ok::<_, TraceError>((side[..first].to_vec(), side[first..].to_vec()))
        };
        let (bottom_l, bottom_r) = split(self, &sides[0], pt(x0, y0), pt(&mx, y0), pt(x1, y0), sw, sb, se, 0)?;
        let (right_b, right_t) = split(self, &sides[1], pt(x1, y0), pt(x1, &my), pt(x1, y1), se, sr, ne, 1)?;
        let (top_l, top_r) = split(self, &sides[2], pt(x0, y1), pt(&mx, y1), pt(x1, y1), nw, st, ne, 0)?;
        let (left_b, left_t) = split(self, &sides[3], pt(x0, y0), pt(x0, &my), pt(x0, y1), sw, sl, nw, 1)?;

        let inner = |tr: &mut Self, a: [Rat; 2], b: [Rat; 2], sa: i8, sb_: i8, axis: usize| -> Result<Vec<usize>, TraceError> {
            let found = tr.analyze(&a, &b, sa, sb_, axis, false)?;
            Ok(found.into_iter().map(|c| tr.push_crossing(&a, &b, c, None)).collect())
        };
        let mid_l = inner(self, pt(x0, &my), pt(&mx, &my), sl, sc, 0)?;
        let mid_r = inner(self, pt(&mx, &my), pt(x1, &my), sc, sr, 0)?;
        let mid_b = inner(self, pt(&mx, y0), pt(&mx, &my), sb, sc, 1)?;
        let mid_t = inner(self, pt(&mx, &my), pt(&mx, y1), sc, st, 1)?;

        let d = depth + 1;
        self.resolve(&[x0.clone(), mx.clone(), y0.clone(), my.clone()], [sw, sb, sc, sl], [bottom_l, mid_b.clone(), mid_l.clone(), left_b], d)?;
        self.resolve(&[mx.clone(), x1.clone(), y0.clone(), my.clone()], [sb, se, sr, sc], [bottom_r, right_b, mid_r.clone(), mid_b], d)?;
        self.resolve(&[mx.clone(), x1.clone(), my.clone(), y1.clone()], [sc, sr, ne, st], [mid_r, right_t, top_r, mid_t.clone()], d)?;
        self.resolve(&[x0.clone(), mx, my, y1.clone()], [sl, sc, st, nw], [mid_l, mid_t, top_l, left_t], d)
    }

    fn assemble(self) -> Result<(Vec<Polyline>, RegionChi), TraceError> {
        let cs = &self.crossings;
        for c in cs {
            let degree = c.links.iter().filter(|&&l| l != NONE).count();
            let want = if c.perimeter.is_some() { 1 } else { 2 };
            if degree != want {
                return Err(TraceError::ResolutionExhausted { x: c.pos[0], y: c.pos[1], depth: self.max_depth });
            }
        }
        let mut visited = vec![false; cs.len()];
        let mut components = Vec::new();
        let mut partner = HashMap::new();
        let walk = |start: usize, visited: &mut Vec<bool>| -> Vec<usize> {
            let mut path = vec![start];
            visited[start] = true;
            let (mut prev, mut cur) = (NONE, start);
            loop {
                let next = cs[cur].links.iter().copied().find(|&l| l != NONE && l != prev && !visited[l]);
                match next {
                    Some(n) => {
                        visited[n] = true;
                        path.push(n);
                        prev = cur;
                        cur = n;
                    }
                    None => return path,
                }
            }
        };
        let mut boundary: Vec<usize> = (0..cs.len()).filter(|&i| cs[i].perimeter.is_some()).collect();
        boundary.sort_by(|&a, &b| cs[a].perimeter.partial_cmp(&cs[b].perimeter).unwrap());
        for &b in &boundary {
            if visited[b] {
                continue;
            }
            let path = walk(b, &mut visited);
            partner.insert(b, *path.last().unwrap());
            partner.insert(*path.last().unwrap(), b);
            components.push((path, false));
        }
        for i in 0..cs.len() {
            if !visited[i] {
                components.push((walk(i, &mut visited), true));
            }
        }

        let mut loops_in = [0i64; 2];
        for (path, closed) in &components {
            if *closed {
                let s = loop_inside_sign(cs, path);
                loops_in[usize::from(s > 0)] += 1;
            }
        }

        // Boundary faces: walk segment orbits around the perimeter.
        let k2 = boundary.len();
        let corner_sign = self.vsign.get(&(0, 0)).copied().unwrap_or_else(|| {
            perturbed(self.g.sign_at(&[self.xs[0].clone(), self.ys[0].clone()]))
        });
        let mut faces = [0i64; 2];
        let mut plus_segments = 0i64;
        if k2 == 0 {
            faces[usize::from(corner_sign > 0)] += 1;
        } else {
            let index: HashMap<usize, usize> = boundary.iter().enumerate().map(|(i, &b)| (b, i)).collect();
            let seg_sign = |i: usize| if (i + 1) % 2 == 0 { corner_sign } else { -corner_sign };
            plus_segments = (0..k2).filter(|&i| seg_sign(i) > 0).count() as i64;
            let mut seen = vec![false; k2];
            for s in 0..k2 {
                if seen[s] {
                    continue;
                }
                faces[usize::from(seg_sign(s) > 0)] += 1;
                let mut cur = s;
                while !seen[cur] {
                    seen[cur] = true;
                    let end = boundary[(cur + 1) % k2];
                    cur = index[&partner[&end]];
                }
            }
        }
        let k = (k2 / 2) as i64;
        let closed_plus = faces[1] + loops_in[1] - loops_in[0];
        let closed_minus = faces[0] + loops_in[0] - loops_in[1];
        let minus_segments = if k2 == 0 { 0 } else { k2 as i64 - plus_segments };
        let regions = RegionChi {
            closed_plus,
            closed_minus,
            open_plus: closed_plus + k - plus_segments,
            open_minus: closed_minus + k - minus_segments,
        };

        let polylines = components
            .into_iter()
            .map(|(path, closed)| Polyline {
                points: path.iter().map(|&i| cs[i].pos).collect(),
                closed,
                boundary_exits: if closed { 0 } else { 2 },
            })
            .collect();
        Ok((polylines, regions))
    }
}

/// Sign of `g` inside a closed component.
fn loop_inside_sign(cs: &[Crossing], path: &[usize]) -> i8 {
    let n = path.len();
    let area: f64 = (0..n)
        .map(|i| {
            let (a, b) = (cs[path[i]].pos, cs[path[(i + 1) % n]].pos);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    // Take the crossing where the local tangent is most transverse to its segment.
    let mut best = (0.0f64, 0i8);
    for i in 0..n {
        let prev = cs[path[(i + n - 1) % n]].pos;
        let next = cs[path[(i + 1) % n]].pos;
        let t = [next[0] - prev[0], next[1] - prev[1]];
        let norm = (t[0] * t[0] + t[1] * t[1]).sqrt();
        if norm == 0.0 {
            continue;
        }
        let d = cs[path[i]].neg_dir;
        // > 0 when the negative side is to the left of the direction of travel.
        let cross = (t[0] * d[1] - t[1] * d[0]) / norm;
        if cross.abs() > best.0 {
            best = (cross.abs(), if cross > 0.0 { 1 } else { -1 });
        }
    }
    let neg_left = best.1 > 0;
    let ccw = area > 0.0;
    if neg_left == ccw {
        -1
    } else {
        1
    }
}

/// Crossings of `q + ε` on `[0, 1]` for infinitesimal `ε > 0`, given the
/// perturbed endpoint signs.
fn segment_crossings(q: &UPoly, s0: i8, s1: i8) -> Vec<SegCrossing> {
    let (zero, one) = (Rat::zero(), Rat::one());
    let h = q.squarefree();
    let mut hd = h.clone();
    for e in [&zero, &one] {
        if hd.eval(e).is_zero() {
            hd = hd.div_rem(&UPoly::new(vec![-e.clone(), Rat::one()])).0;
        }
    }
    let q0_root = q.eval(&zero).is_zero();
    let q1_root = q.eval(&one).is_zero();
    let mut roots = Vec::new();
    for (lo, hi) in isolate_roots(&hd, &zero, &one) {
        let (mut lo, mut hi) = (lo, hi);
        let tol = rat(1, 1 << 20);
        let mut s_lo = hd.sign_at(&lo);
        loop {
            let needs = (q0_root && lo.is_zero()) || (q1_root && hi == one) || (&hi - &lo) > tol;
            if !needs {
                break;
            }
            let mid = split_point(&hd, &lo, &hi);
            let s_mid = hd.sign_at(&mid);
            if s_mid == s_lo {
                lo = mid;
                s_lo = s_mid;
            } else {
                hi = mid;
            }
        }
        roots.push((lo, hi));
    }
    let mut out = Vec::new();
    let mut before = s0;
    let push_change = |out: &mut Vec<SegCrossing>, before: &mut i8, after: i8, param: f64| {
        if after != *before {
            out.push(SegCrossing { param, neg_toward_start: *before < 0 });
            *before = after;
        }
    };
    if roots.is_empty() {
        let mid = q.sign_at(&rat(1, 2));
        push_change(&mut out, &mut before, mid, 0.0);
        push_change(&mut out, &mut before, s1, 1.0);
        return out;
    }
    for (lo, hi) in &roots {
        let left = q.sign_at(lo);
        let right = q.sign_at(hi);
        push_change(&mut out, &mut before, left, 0.0);
        let at = (to_f64(lo) + to_f64(hi)) / 2.0;
        if left != right {
            push_change(&mut out, &mut before, right, at);
        } else if left < 0 {
            // Even-order touch from below: the perturbed level dips across twice.
            let w = (to_f64(hi) - to_f64(lo)) / 4.0;
            out.push(SegCrossing { param: at - w, neg_toward_start: true });
            out.push(SegCrossing { param: at + w, neg_toward_start: false });
        }
    }
    push_change(&mut out, &mut before, s1, 1.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_rules() {
        // q = s(s − 1): negative inside, zero at both ends.
        let q = UPoly::from_ints(&[0, -1, 1]);
        assert_eq!(segment_crossings(&q, 1, 1).len(), 2);
        // q = −(s − 1/2)²: touches zero from below.
        let q = UPoly::new(vec![rat(-1, 4), int(1), int(-1)]);
        assert_eq!(segment_crossings(&q, -1, -1).len(), 2);
        // q = (s − 1/2)²: touches from above, perturbed level misses it.
        let q = UPoly::new(vec![rat(1, 4), int(-1), int(1)]);
        assert!(segment_crossings(&q, 1, 1).is_empty());
        // Simple root.
        let q = UPoly::new(vec![rat(-1, 3), int(1)]);
        let c = segment_crossings(&q, -1, 1);
        assert_eq!(c.len(), 1);
        assert!(c[0].neg_toward_start);
    }
}

//! Fold curves and cusps of plane-to-plane maps.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use eulerint_core::localfib::{Sign, StratumType};
use eulerint_core::LocalLedger;
use serde::Serialize;
use thiserror::Error;

use crate::degree::{local_degree_2d, DegreeError};
use crate::poly::{Poly, PolyError, PolyMap, Rat};
use crate::trace::{trace_plane_fiber, GridSpec, PlaneBox, TraceError, TracedCurve};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorinError {
    #[error(transparent)]
    Shape(#[from] PolyError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error("cusp candidate near ({x:.6}, {y:.6}) did not converge")]
    Inconclusive { x: f64, y: f64 },
    #[error("loci change under refinement: {0}")]
    Unstable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspPoint {
    pub point: [f64; 2],
    /// Local degree of the map at the cusp, ±1.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorinLoci {
    pub fold_curve: TracedCurve,
    pub cusp_points: Vec<CuspPoint>,
}

impl MorinLoci {
    pub fn cusps_with_sign(&self, s: i8) -> usize {
        self.cusp_points.iter().filter(|c| c.sign == s).count()
    }
}

/// `det df` for `f: ℝ² → ℝ²`.
pub fn jacobian_det(f: &PolyMap) -> Poly {
    let j = f.jacobian();
    &(&j[0][0] * &j[1][1]) - &(&j[0][1] * &j[1][0])
}

/// Derivative of `det df` along the kernel field `(−∂f₁/∂y, ∂f₁/∂x)`.
///
/// On the fold curve the kernel is spanned by that field wherever `∇f₁ ≠ 0`,
/// so cusps are the zeros of this polynomial on `{det df = 0}`.
pub fn kernel_derivative(f: &PolyMap) -> Poly {
    let det = jacobian_det(f);
    let g1 = f.components[0].gradient();
    let k = [-&g1[1], g1[0].clone()];
    &(&det.partial(0) * &k[0]) + &(&det.partial(1) * &k[1])
}

fn newton2(polys: [&Poly; 2], start: [f64; 2], step_cap: f64) -> Option<[f64; 2]> {
    let grads = [polys[0].gradient(), polys[1].gradient()];
    let mut p = start;
    for _ in 0..60 {
        let v = [polys[0].eval_f64(&p), polys[1].eval_f64(&p)];
        let a = [
            [grads[0][0].eval_f64(&p), grads[0][1].eval_f64(&p)],
            [grads[1][0].eval_f64(&p), grads[1][1].eval_f64(&p)],
        ];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (v[0] * a[1][1] - v[1] * a[0][1]) / det;
        let dy = (a[0][0] * v[1] - a[1][0] * v[0]) / det;
        p = [p[0] - dx, p[1] - dy];
        if ((p[0] - start[0]).powi(2) + (p[1] - start[1]).powi(2)).sqrt() > step_cap {
            return None;
        }
        if (dx * dx + dy * dy).sqrt() < 1e-13 * (1.0 + p[0].abs() + p[1].abs()) {
            return Some(p);
        }
    }
    None
}

/// Winding of `f − f(p)` on a small circle around `p`, sampled densely.
fn cusp_sign(f: &PolyMap, p: [f64; 2], rho: f64) -> Option<i8> {
    let fp = f.eval_f64(&p);
    for steps in [1024usize, 8192, 65536] {
        let angle = |i: usize| {
            let t = TAU * i as f64 / steps as f64;
            let v = f.eval_f64(&[p[0] + rho * t.cos(), p[1] + rho * t.sin()]);
            (v[1] - fp[1]).atan2(v[0] - fp[0])
        };
        let mut total = 0.0;
        let mut prev = angle(0);
        let mut fine = true;
        for i in 1..=steps {
            let a = angle(i % steps);
            let mut d = a - prev;
            while d > PI {
                d -= TAU;
            }
            while d <= -PI {
                d += TAU;
            }
            if d.abs() >= PI / 2.0 {
                fine = false;
                break;
            }
            total += d;
            prev = a;
        }
        if fine {
            let w = (total / TAU).round();
            return match w as i64 {
                1 => Some(1),
                -1 => Some(-1),
                _ => None,
            };
        }
    }
    None
}

fn loci_once(f: &PolyMap, bx: &PlaneBox, grid: GridSpec) -> Result<MorinLoci, MorinError> {
    let det = jacobian_det(f);
    let kd = kernel_derivative(f);
    let fold_curve = trace_plane_fiber(&PolyMap::new(vec![det.clone()])?, &Rat::from_integer(0.into()), bx, grid)?;
    let [x0, x1, y0, y1] = bx.bounds_f64();
    let cell = ((x1 - x0) / grid.nx as f64).max((y1 - y0) / grid.ny as f64);
    let mut found: Vec<[f64; 2]> = Vec::new();
    for comp in &fold_curve.components {
        let pts = &comp.points;
        let n = pts.len();
        let pairs = if comp.closed { n } else { n.saturating_sub(1) };
        for i in 0..pairs {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let (ca, cb) = (kd.eval_f64(&a), kd.eval_f64(&b));
            if (ca < 0.0) == (cb < 0.0) {
                continue;
            }
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let p = newton2([&det, &kd], mid, 4.0 * cell).ok_or(MorinError::Inconclusive { x: mid[0], y: mid[1] })?;
            if p[0] < x0 || p[0] > x1 || p[1] < y0 || p[1] > y1 {
                continue;
            }
            if !found.iter().any(|q| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt() < 1e-6 * (x1 - x0)) {
                found.push(p);
            }
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut cusp_points = Vec::new();
    for (i, &p) in found.iter().enumerate() {
        let gap = found
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        let rho = (cell / 4.0).min(gap / 4.0);
        let sign = cusp_sign(f, p, rho).ok_or(MorinError::Inconclusive { x: p[0], y: p[1] })?;
        cusp_points.push(CuspPoint { point: p, sign });
    }
    Ok(MorinLoci { fold_curve, cusp_points })
}

/// Fold curve `{det df = 0}` and cusps in the box, repeated under grid
/// doubling and box doubling.
pub fn morin_loci_2d(f: &PolyMap, bx: &PlaneBox, grid: GridSpec) -> Result<MorinLoci, MorinError> {
    f.expect_shape(2, 2, "ℝ² → ℝ²")?;
    let base = loci_once(f, bx, grid)?;
    let key = |l: &MorinLoci| (l.fold_curve.open_count(), l.fold_curve.closed_count(), l.cusps_with_sign(1), l.cusps_with_sign(-1));
    for (label, other) in [("grid doubling", loci_once(f, bx, grid.doubled())?), ("box doubling", loci_once(f, &bx.doubled(), grid.doubled())?)] {
        if key(&base) != key(&other) {
            return Err(MorinError::Unstable(format!("{label}: {:?} vs {:?}", key(&base), key(&other))));
        }
    }
    Ok(base)
}

/// Local ledger of a stable plane germ at the origin, read off in the box `[−r, r]²`.
///
/// The germ is its own Morin perturbation, so interior data are the closed
/// orientation regions `{±det df ≥ 0}` and the cusps in the box.
pub fn plane_germ_ledger(name: &str, f: &PolyMap, radius: &Rat, grid: GridSpec) -> Result<LocalLedger, MorinError> {
    let bx = PlaneBox::square(radius.clone())?;
    let loci = morin_loci_2d(f, &bx, grid)?;
    let deg0 = local_degree_2d(f, radius)?;
    let regions = loci.fold_curve.regions;
    let mut interior = BTreeMap::new();
    interior.insert(StratumType::a(0, Some(Sign::Plus)), regions.closed_plus);
    interior.insert(StratumType::a(0, Some(Sign::Minus)), regions.closed_minus);
    let mut counts = BTreeMap::new();
    counts.insert(StratumType::a(2, Some(Sign::Plus)), loci.cusps_with_sign(1) as u64);
    counts.insert(StratumType::a(2, Some(Sign::Minus)), loci.cusps_with_sign(-1) as u64);
    Ok(LocalLedger {
        name: Some(name.to_string()),
        n: 2,
        p: 2,
        deg0: Some(deg0),
        half_branches: Some(loci.fold_curve.boundary_points() as i64),
        interior,
        counts,
        ..Default::default()
    })
}

//! Local topological degrees of polynomial map-germs.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{rat_string, to_f64, Interval, Poly, PolyError, PolyMap, Rat};
use crate::trace::{trace_plane_fiber, GridSpec, PlaneBox, TraceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegreeError {
    #[error(transparent)]
    Shape(#[from] PolyError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("map vanishes on or too close to the circle of radius {0}")]
    RadiusTooLarge(String),
    #[error("degree in dimension {0} is not supported (n ≤ 3)")]
    DimensionCap(usize),
    #[error("preimage count unstable: {0}")]
    Unreliable(String),
    #[error("value is not regular: singular Jacobian at a preimage near {0:?}")]
    SingularPreimage(Vec<f64>),
    #[error("winding and preimage degrees disagree: {winding} vs {preimages}")]
    CrossMethod { winding: i64, preimages: i64 },
    #[error("nearby level has χ = {chi}, expected 1 − {degree}")]
    Khimshiashvili { degree: i64, chi: i64 },
}

fn cos_range(a: f64, b: f64) -> Interval {
    let (ca, cb) = (a.cos(), b.cos());
    let (mut lo, mut hi) = (ca.min(cb), ca.max(cb));
    // Extremes of cos sit at multiples of π.
    let first = (a / PI).ceil() as i64;
    let last = (b / PI).floor() as i64;
    for k in first..=last {
        if k.rem_euclid(2) == 0 {
            hi = 1.0;
        } else {
            lo = -1.0;
        }
    }
    Interval::new(lo - 1e-12, hi + 1e-12)
}

fn arc_box(r: f64, a: f64, b: f64) -> [Interval; 2] {
    let rr = Interval::point(r);
    [rr.mul(cos_range(a, b)), rr.mul(cos_range(a - FRAC_PI_2, b - FRAC_PI_2))]
}

fn principal(mut d: f64) -> f64 {
    while d > PI {
        d -= TAU;
    }
    while d <= -PI {
        d += TAU;
    }
    d
}

/// Winding number of `f` around 0 along the circle of the given radius.
///
/// Each accepted arc has an image box missing the origin and an endpoint
/// angle change below π/2, so the summed principal differences are the true
/// total angle.
pub fn local_degree_2d(f: &PolyMap, radius: &Rat) -> Result<i64, DegreeError> {
    f.expect_shape(2, 2, "ℝ² → ℝ²")?;
    let r = to_f64(radius);
    let angle = |t: f64| {
        let v = f.eval_f64(&[r * t.cos(), r * t.sin()]);
        v[1].atan2(v[0])
    };
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, u32)> = (0..64).rev().map(|i| (TAU * i as f64 / 64.0, TAU * (i + 1) as f64 / 64.0, 0)).collect();
    while let Some((a, b, depth)) = stack.pop() {
        let bx = arc_box(r, a, b);
        let clear = f.components.iter().any(|c| !c.eval_interval(&bx).contains_zero());
        let step = principal(angle(b) - angle(a));
        if clear && step.abs() < FRAC_PI_2 {
            total += step;
            continue;
        }
        if depth >= 40 {
            return Err(DegreeError::RadiusTooLarge(rat_string(radius)));
        }
        let m = (a + b) / 2.0;
        stack.push((m, b, depth + 1));
        stack.push((a, m, depth + 1));
    }
    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(DegreeError::RadiusTooLarge(rat_string(radius)));
    }
    Ok(rounded as i64)
}

/// Degree of `f: (ℝ, 0) → (ℝ, 0)` from the signs at `±radius`.
pub fn local_degree_1d(f: &PolyMap, radius: &Rat) -> Result<i64, DegreeError> {
    f.expect_shape(1, 1, "ℝ → ℝ")?;
    let c = &f.components[0];
    let (lo, hi) = (c.sign_at(&[-radius.clone()]), c.sign_at(&[radius.clone()]));
    if lo == 0 || hi == 0 {
        return Err(DegreeError::RadiusTooLarge(rat_string(radius)));
    }
    Ok(i64::from(hi - lo) / 2)
}

/// Newton settings for preimage counting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the step, relative to the radius.
    pub tol: f64,
    /// Preimages closer than this, relative to the radius, are merged.
    pub dedup: f64,
    /// Seeds per axis in the first round.
    pub seeds_per_axis: usize,
    pub max_iter: usize,
    /// Extra seed-doubling rounds allowed when counts disagree.
    pub rounds: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, dedup: 1e-6, seeds_per_axis: 8, max_iter: 80, rounds: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimageCount {
    pub degree: i64,
    pub preimages: Vec<Vec<f64>>,
    pub signs: Vec<i8>,
}

fn seeds(n: usize, r: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let coord = |i: usize| -r + (2 * i + 1) as f64 * r / per_axis as f64;
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p| (0..per_axis).map(move |i| [p.clone(), vec![coord(i)]].concat())).collect();
    }
    out.retain(|p| p.iter().map(|v| v * v).sum::<f64>() < r * r);
    out
}

enum NewtonOutcome {
    Root(Vec<f64>),
    Escaped,
    Stalled,
}

fn newton(f: &PolyMap, jac: &[Vec<Poly>], target: &[f64], start: Vec<f64>, r: f64, opts: &NewtonOptions) -> NewtonOutcome {
    let n = f.n;
    let mut x = start;
    for _ in 0..opts.max_iter {
        let fx = f.eval_f64(&x);
        let rhs = DVector::from_iterator(n, fx.iter().zip(target).map(|(a, b)| b - a));
        let j = DMatrix::from_fn(n, n, |i, k| jac[i][k].eval_f64(&x));
        let Some(step) = j.lu().solve(&rhs) else { return NewtonOutcome::Escaped };
        for (xi, s) in x.iter_mut().zip(step.iter()) {
            *xi += s;
        }
        if x.iter().map(|v| v * v).sum::<f64>() > 16.0 * r * r || x.iter().any(|v| !v.is_finite()) {
            return NewtonOutcome::Escaped;
        }
        if step.norm() <= opts.tol * r {
            return NewtonOutcome::Root(x);
        }
    }
    NewtonOutcome::Stalled
}

fn count_preimages(f: &PolyMap, target: &[f64], r: f64, per_axis: usize, opts: &NewtonOptions) -> Result<PreimageCount, DegreeError> {
    let jac = f.jacobian();
    let all = seeds(f.n, r, per_axis);
    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut stalled = 0;
    for s in &all {
        match newton(f, &jac, target, s.clone(), r, opts) {
            NewtonOutcome::Root(x) => {
                if x.iter().map(|v| v * v).sum::<f64>() >= r * r {
                    continue;
                }
                let close = |y: &Vec<f64>| x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < opts.dedup * r;
                if !roots.iter().any(close) {
                    roots.push(x);
                }
            }
            NewtonOutcome::Escaped => {}
            NewtonOutcome::Stalled => stalled += 1,
        }
    }
    if 2 * stalled > all.len() {
        return Err(DegreeError::Unreliable(format!("{stalled} of {} seeds did not converge", all.len())));
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut signs = Vec::new();
    for x in &roots {
        let j = DMatrix::from_fn(f.n, f.n, |i, k| jac[i][k].eval_f64(x));
        let scale = j.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let det = j.determinant();
        if det.abs() <= 1e-12 * scale.powi(f.n as i32) {
            return Err(DegreeError::SingularPreimage(x.clone()));
        }
        signs.push(if det > 0.0 { 1 } else { -1 });
    }
    Ok(PreimageCount { degree: signs.iter().map(|&s| i64::from(s)).sum(), preimages: roots, signs })
}

/// A small value well inside the image of the ball, in a generic direction.
pub fn default_regular_value(f: &PolyMap, radius: &Rat) -> Vec<f64> {
    let r = to_f64(radius);
    let dirs = seeds(f.n, 1.0, 24);
    let min = dirs
        .iter()
        .filter_map(|d| {
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            (norm > 0.0).then(|| {
                let x: Vec<f64> = d.iter().map(|v| r * v / norm).collect();
                f.eval_f64(&x).iter().map(|v| v * v).sum::<f64>().sqrt()
            })
        })
        .fold(f64::INFINITY, f64::min);
    let u = [0.618_033_988_749_895, 0.414_213_562_373_095_1, 0.302_775_637_731_994_6];
    let norm = u[..f.p].iter().map(|v| v * v).sum::<f64>().sqrt();
    u[..f.p].iter().map(|v| 0.01 * min * v / norm).collect()
}

/// Degree by signed preimage counting, required to agree after halving the
/// value and after doubling the seed density.
pub fn local_degree_nd(f: &PolyMap, radius: &Rat, regular_value: &[f64], opts: NewtonOptions) -> Result<PreimageCount, DegreeError> {
    if f.n != f.p {
        return Err(PolyError::Shape { want: "ℝⁿ → ℝⁿ", n: f.n, p: f.p }.into());
    }
    if f.n == 0 || f.n > 3 {
        return Err(DegreeError::DimensionCap(f.n));
    }
    let r = to_f64(radius);
    let half: Vec<f64> = regular_value.iter().map(|v| v / 2.0).collect();
    let mut per_axis = opts.seeds_per_axis;
    let mut history = Vec::new();
    for _ in 0..=opts.rounds {
        let base = count_preimages(f, regular_value, r, per_axis, &opts)?;
        let halved = count_preimages(f, &half, r, per_axis, &opts)?;
        let denser = count_preimages(f, regular_value, r, 2 * per_axis, &opts)?;
        if base.degree == halved.degree && base.degree == denser.degree && base.preimages.len() == denser.preimages.len() {
            return Ok(base);
        }
        history.push((base.degree, halved.degree, denser.degree));
        per_axis *= 2;
    }
    Err(DegreeError::Unreliable(format!("degrees (value, value/2, 2×seeds) per round: {history:?}")))
}

/// Gradient degree of `g` with the cross-checks that apply in its dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientDegree {
    pub degree: i64,
    /// `χ(g⁻¹(δ) ∩ box)` for a small `δ > 0`, in two variables.
    pub nearby_level_chi: Option<i64>,
    pub level: Option<String>,
}

pub fn gradient_degree(g: &Poly, radius: &Rat) -> Result<GradientDegree, DegreeError> {
    let grad = PolyMap::gradient_map(g);
    match g.nvars() {
        1 => Ok(GradientDegree { degree: local_degree_1d(&grad, radius)?, nearby_level_chi: None, level: None }),
        2 => {
            let winding = local_degree_2d(&grad, radius)?;
            let y = default_regular_value(&grad, radius);
            let counted = local_degree_nd(&grad, radius, &y, NewtonOptions::default())?.degree;
            if winding != counted {
                return Err(DegreeError::CrossMethod { winding, preimages: counted });
            }
            let delta = nearby_level(g, radius);
            let scalar = PolyMap::new(vec![g.clone()])?;
            let bx = PlaneBox::square(radius.clone())?;
            let chi = trace_plane_fiber(&scalar, &delta, &bx, GridSpec::square(64))?.open_count() as i64;
            let finer = trace_plane_fiber(&scalar, &delta, &bx, GridSpec::square(128))?.open_count() as i64;
            if chi != finer {
                return Err(DegreeError::Unreliable(format!("nearby level arcs {chi} vs {finer} after grid doubling")));
            }
            if 1 - winding != chi {
                return Err(DegreeError::Khimshiashvili { degree: winding, chi });
            }
            Ok(GradientDegree { degree: winding, nearby_level_chi: Some(chi), level: Some(rat_string(&delta)) })
        }
        3 => {
            let y = default_regular_value(&grad, radius);
            let d = local_degree_nd(&grad, radius, &y, NewtonOptions::default())?.degree;
            Ok(GradientDegree { degree: d, nearby_level_chi: None, level: None })
        }
        n => Err(DegreeError::DimensionCap(n)),
    }
}

/// `δ = radius^deg / 997`: small against the germ's size on the box, not a special value.
fn nearby_level(g: &Poly, radius: &Rat) -> Rat {
    let d = g.degree().max(1) as usize;
    let v = num_traits::pow(radius.clone(), d) / Rat::from_integer(997.into());
    if v.is_zero() {
        Rat::from_integer(1.into())
    } else {
        v
    }
}

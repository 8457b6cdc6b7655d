//! The curated example zoo: every ledger and numeric cross-check, run through
//! the identity checkers.

use std::collections::BTreeMap;

use eulerint_core::formulas::{applicable_formulas, check_gaffney_mond, check_local, check_named, GermData, Relation};
use eulerint_core::{CheckReport, LocalLedger, SingularLedger, StratumType};
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::degree::{default_regular_value, gradient_degree, local_degree_2d, local_degree_nd, NewtonOptions};
use crate::morin::{morin_loci_2d, plane_germ_ledger};
use crate::plmorse::{interval_ledger, pl_morse_ledger, EmbeddedSurface};
use crate::poly::{int, isolate_roots, rat, Poly, PolyMap, Rat, UPoly};
use crate::riemann::random_rational_map;
use crate::trace::{curve_chi_c, stable_fiber, GridSpec, PlaneBox};

pub const GROUPS: &[&str] = &["complex", "constructed", "degree", "fiber", "global", "local", "morse"];

/// Named polynomial maps used across the zoo.
pub mod germs {
    use super::*;

    fn x() -> Poly {
        Poly::var(2, 0)
    }

    fn y() -> Poly {
        Poly::var(2, 1)
    }

    fn c(v: i64) -> Poly {
        Poly::constant(2, int(v))
    }

    fn map(p: Vec<Poly>) -> PolyMap {
        PolyMap::new(p).expect("two-variable components")
    }

    /// `x(xy + 1)`
    pub fn broughton() -> PolyMap {
        map(vec![&x() * &(&(&x() * &y()) + &c(1))])
    }

    /// `x²y² + 2xy + (y² − 1)²`
    pub fn tibar_zaharia() -> PolyMap {
        let xy = &x() * &y();
        let d = &(&y() * &y()) - &c(1);
        map(vec![&(&(&xy * &xy) + &xy.scale(&int(2))) + &(&d * &d)])
    }

    pub fn identity() -> PolyMap {
        map(vec![x(), y()])
    }

    /// `z ↦ z²`
    pub fn square() -> PolyMap {
        map(vec![&(&x() * &x()) - &(&y() * &y()), (&x() * &y()).scale(&int(2))])
    }

    pub fn reflection() -> PolyMap {
        map(vec![x(), -&y()])
    }

    /// `z ↦ z̄³`
    pub fn conjugate_cube() -> PolyMap {
        let x2 = &x() * &x();
        let y2 = &y() * &y();
        map(vec![&(&x2 * &x()) - &(&(&x() * &y2).scale(&int(3))), &(&y2 * &y()) - &(&(&x2 * &y()).scale(&int(3)))])
    }

    pub fn fold() -> PolyMap {
        map(vec![x(), &y() * &y()])
    }

    /// `(x, y³ − xy)`
    pub fn cusp() -> PolyMap {
        map(vec![x(), &(&y() * &(&y() * &y())) - &(&x() * &y())])
    }

    /// `(x, y³ − (1 − x²)y)`
    pub fn lips() -> PolyMap {
        let y3 = &y() * &(&y() * &y());
        map(vec![x(), &y3 - &(&(&c(1) - &(&x() * &x())) * &y())])
    }

    pub fn minimum() -> Poly {
        &(&x() * &x()) + &(&y() * &y())
    }

    pub fn saddle() -> Poly {
        &(&x() * &x()) - &(&y() * &y())
    }

    /// `x³ − 3xy²`
    pub fn monkey_saddle() -> Poly {
        &(&x() * &(&x() * &x())) - &(&x() * &(&y() * &y())).scale(&int(3))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZooRow {
    pub group: String,
    pub item: String,
    pub formula_id: String,
    pub relation: Relation,
    pub lhs: i64,
    pub rhs: i64,
    pub residual: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZooFailure {
    pub group: String,
    pub item: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZooReport {
    pub seed: u64,
    pub rows: Vec<ZooRow>,
    pub errors: Vec<ZooFailure>,
}

impl ZooReport {
    pub fn all_hold(&self) -> bool {
        self.errors.is_empty() && !self.rows.is_empty() && self.rows.iter().all(|r| r.holds)
    }
}

type Outcome = Result<Vec<CheckReport>, String>;

struct Item {
    group: &'static str,
    name: String,
    run: Box<dyn Fn() -> Outcome + Send + Sync>,
}

fn item(group: &'static str, name: impl Into<String>, run: impl Fn() -> Outcome + Send + Sync + 'static) -> Item {
    Item { group, name: name.into(), run: Box::new(run) }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn t(s: &str) -> StratumType {
    s.parse().expect("known stratum label")
}

/// Every applicable global checker; a ledger with none is a zoo defect.
pub fn check_all(l: &SingularLedger) -> Outcome {
    run_checkers(l, applicable_formulas(l))
}

/// As [`check_all`] without the checkers that assume a compact source.
pub fn check_noncompact(l: &SingularLedger) -> Outcome {
    run_checkers(l, applicable_formulas(l).into_iter().filter(|n| !matches!(*n, "rthm6a" | "quine")).collect())
}

fn run_checkers(l: &SingularLedger, names: Vec<&str>) -> Outcome {
    if names.is_empty() {
        return Err("no applicable checker".into());
    }
    let mut out = Vec::new();
    for n in names {
        out.extend(check_named(n, l).map_err(err)?);
    }
    Ok(out)
}

fn ledger(m: u32, n: u32, chi_m: i64, chi_n: i64, chi_f: Option<i64>, deg: Option<i64>, strata: &[(&str, i64)]) -> SingularLedger {
    SingularLedger {
        m,
        n,
        chi_m,
        chi_n,
        chi_f,
        deg,
        stable: true,
        strata: strata.iter().map(|&(s, v)| (t(s), v)).collect(),
        ..Default::default()
    }
}

/// The lips map on ℝ² read off numerically: fold ellipse, cusp signs,
/// orientation regions, degree and the size of a far fiber.
pub fn lips_ledger() -> Result<SingularLedger, String> {
    let f = germs::lips();
    let loci = morin_loci_2d(&f, &PlaneBox::square(int(2)).map_err(err)?, GridSpec::square(64)).map_err(err)?;
    let regions = loci.fold_curve.regions;
    let cusps = loci.cusp_points.len() as i64;
    let far = local_degree_nd(&f, &int(8), &[0.0, 100.0], NewtonOptions::default()).map_err(err)?;
    let mut l = ledger(
        2,
        2,
        1,
        1,
        Some(far.preimages.len() as i64),
        Some(local_degree_2d(&f, &int(8)).map_err(err)?),
        &[("A0+", regions.open_plus), ("A0-", regions.open_minus), ("A1", curve_chi_c(&loci.fold_curve) - cusps)],
    );
    l.name = Some("lips".into());
    l.counts = [(t("A2+"), loci.cusps_with_sign(1) as u64), (t("A2-"), loci.cusps_with_sign(-1) as u64)].into();
    Ok(l)
}

/// Points of `{g = 0}` on the circle of the given radius, counted exactly
/// through the rational parametrization `((1 − s²), 2s)/(1 + s²)`.
pub fn link_points(g: &Poly, radius: &Rat) -> Result<usize, String> {
    let d = g.degree();
    let (one_minus, two_s, one_plus) =
        (UPoly::from_ints(&[1, 0, -1]), UPoly::from_ints(&[0, 2]), UPoly::from_ints(&[1, 0, 1]));
    let mut h = UPoly::zero();
    for (e, c) in g.terms() {
        let (a, b) = (e[0], e[1]);
        let term = one_minus.pow(a).mul(&two_s.pow(b)).mul(&one_plus.pow(d - a - b));
        h = h.add(&term.scale(&(c * num_traits::pow(radius.clone(), (a + b) as usize))));
    }
    if h.is_zero() {
        return Err("the circle lies in the zero level".into());
    }
    let deg = h.degree().unwrap_or(0) as u32;
    // s = ∞ is the point (−r, 0); its multiplicity is the degree drop.
    let at_infinity = 2 * d - deg;
    let bound = h.coeffs().iter().map(|c| (c / h.lead().expect("nonzero")).abs()).max().unwrap_or_else(|| int(0)) + int(1);
    let repeated = h.gcd(&h.derivative());
    if at_infinity > 1 || (repeated.degree() > Some(0) && !isolate_roots(&repeated.squarefree(), &-&bound, &bound).is_empty()) {
        return Err("the zero level is tangent to the circle".into());
    }
    Ok(isolate_roots(&h.squarefree(), &-&bound, &bound).len() + at_infinity as usize)
}

/// Local data of a two-variable function germ with an isolated critical point.
///
/// The link is `{g = 0}` on the circle of the given radius; the
/// perturbation `g − ⟨v, ·⟩` has critical points the preimages of a small
/// regular value `v` of `∇g`, extrema where the Hessian is positive.
pub fn function_germ_ledger(name: &str, g: &Poly, radius: &Rat) -> Result<LocalLedger, String> {
    let link = link_points(g, radius)? as i64;
    let grad = gradient_degree(g, radius).map_err(err)?;
    let gmap = PolyMap::gradient_map(g);
    let crit = local_degree_nd(&gmap, radius, &default_regular_value(&gmap, radius), NewtonOptions::default()).map_err(err)?;
    let plus = crit.signs.iter().filter(|&&s| s > 0).count() as i64;
    let minus = crit.signs.len() as i64 - plus;
    let mut interior = BTreeMap::new();
    interior.insert(t("A1+"), plus);
    interior.insert(t("A1-"), minus);
    Ok(LocalLedger {
        name: Some(name.into()),
        n: 2,
        p: 1,
        psi_link: Some(link / 2),
        chi_link: Some(link),
        grad_deg: Some(grad.degree),
        counts: interior.iter().map(|(&k, &v)| (k, v as u64)).collect(),
        interior,
        ..Default::default()
    })
}

fn items(seed: u64) -> Vec<Item> {
    let mut v = Vec::new();

    // Reference fiber values at box 25, grid 1000.
    let fibers: [(&str, fn() -> PolyMap, Rat, i64); 6] = [
        ("broughton", germs::broughton, rat(-1, 2), -2),
        ("broughton", germs::broughton, int(0), -3),
        ("broughton", germs::broughton, rat(1, 2), -2),
        ("tibar_zaharia", germs::tibar_zaharia, rat(-1, 2), 0),
        ("tibar_zaharia", germs::tibar_zaharia, int(0), -2),
        ("tibar_zaharia", germs::tibar_zaharia, rat(1, 2), -2),
    ];
    for (name, f, level, want) in fibers {
        v.push(item("fiber", format!("{name} t={level}"), move || {
            let s = stable_fiber(&f(), &level, &PlaneBox::square(int(25)).map_err(err)?, GridSpec::square(1000)).map_err(err)?;
            Ok(vec![CheckReport::new("fiber_chi_c", Relation::Eq, s.chi_c, want).map_err(err)?])
        }));
    }

    let plane: [(&str, fn() -> PolyMap); 8] = [
        ("identity", germs::identity),
        ("square", germs::square),
        ("reflection", germs::reflection),
        ("conjugate_cube", germs::conjugate_cube),
        ("fold", germs::fold),
        ("cusp", germs::cusp),
        ("lips", germs::lips),
        ("broughton_gradient", || PolyMap::gradient_map(&germs::broughton().components[0])),
    ];
    for (name, f) in plane {
        v.push(item("degree", name, move || {
            let f = f();
            let r = rat(1, 2);
            let winding = local_degree_2d(&f, &r).map_err(err)?;
            let counted = local_degree_nd(&f, &r, &default_regular_value(&f, &r), NewtonOptions::default()).map_err(err)?;
            Ok(vec![CheckReport::new("degree.cross", Relation::Eq, winding, counted.degree).map_err(err)?])
        }));
    }
    let functions: [(&str, fn() -> Poly); 3] =
        [("minimum", germs::minimum), ("saddle", germs::saddle), ("monkey_saddle", germs::monkey_saddle)];
    for (name, g) in functions {
        v.push(item("degree", format!("{name} gradient"), move || {
            let d = gradient_degree(&g(), &int(1)).map_err(err)?;
            let arcs = d.nearby_level_chi.ok_or("no level trace")?;
            Ok(vec![CheckReport::new("Khimshiashvili", Relation::Eq, 1 - d.degree, arcs).map_err(err)?])
        }));
        v.push(item("local", name, move || {
            let l = function_germ_ledger(name, &g(), &int(1))?;
            check_local(&l).map_err(err)
        }));
    }
    for (name, f) in [("fold", germs::fold as fn() -> PolyMap), ("cusp", germs::cusp)] {
        v.push(item("local", name, move || {
            let l = plane_germ_ledger(name, &f(), &rat(1, 2), GridSpec::square(32)).map_err(err)?;
            check_local(&l).map_err(err)
        }));
    }

    let dirs: [(&str, fn() -> EmbeddedSurface, [i64; 3]); 3] = [
        ("octahedron", EmbeddedSurface::octahedron, [1, 2, 3]),
        ("tetrahedron", EmbeddedSurface::tetrahedron, [1, 2, 4]),
        ("torus", EmbeddedSurface::torus, [11, 4, 1]),
    ];
    for (name, s, d) in dirs {
        for sign in [1, -1] {
            let dir = d.map(|c| int(sign * c));
            let dir2 = dir.clone();
            let label = format!("{name} height {:?}", d.map(|c| sign * c));
            v.push(item("morse", label.clone(), move || check_all(&pl_morse_ledger(&s(), &dir).map_err(err)?)));
            v.push(item("morse", format!("{label} suspended"), move || {
                check_all(&interval_ledger(&s(), &dir2).map_err(err)?.ledger)
            }));
        }
    }

    v.push(item("global", "lips", || check_noncompact(&lips_ledger()?)));
    let globals: Vec<(&str, SingularLedger)> = vec![
        ("identity S2", ledger(2, 2, 2, 2, Some(1), Some(1), &[("A0+", 2)])),
        ("equatorial fold S2", ledger(2, 2, 2, 2, Some(0), Some(0), &[("A0+", 1), ("A0-", 1), ("A1", 0)])),
        ("sphere to plane projection", ledger(2, 2, 2, 1, Some(0), None, &[("A1", 0)])),
        ("torus to plane projection", ledger(2, 2, 0, 1, Some(0), None, &[("A1", 0)])),
    ];
    for (name, l) in globals {
        v.push(item("global", name, move || check_all(&l)));
    }
    let product = ledger(2, 1, 1, -1, Some(-1), None, &[]);
    v.push(item("global", "product fibration R2 to R", move || check_noncompact(&product)));

    let mut sigma = ledger(3, 2, 1, 1, Some(0), None, &[("sigma2+", 1), ("sigma3-", 1)]);
    sigma.stable = false;
    v.push(item("constructed", "plane genotypes sigma2+ sigma3-", move || check_all(&sigma)));
    let i22 = ledger(4, 4, 3, 1, None, Some(2), &[("A0+", 1), ("A0-", 1), ("I22-", 1)]);
    v.push(item("constructed", "I22- with degree 2", move || check_all(&i22)));

    for d in [2usize, 3] {
        v.push(item("complex", format!("rational map degree {d}"), move || {
            check_all(&random_rational_map(d, seed ^ d as u64).map_err(err)?.ledger().map_err(err)?)
        }));
    }
    let mut cover = ledger(1, 1, 0, 0, Some(3), None, &[]);
    cover.complex = true;
    v.push(item("complex", "unbranched triple cover of an elliptic curve", move || check_all(&cover)));
    for g in [GermData { name: "cusp".into(), deg0: 3, mu: 0, a2: 1 }, GermData { name: "fold".into(), deg0: 2, mu: 0, a2: 0 }] {
        v.push(item("complex", format!("{} germ", g.name), move || Ok(vec![check_gaffney_mond(&g).map_err(err)?])));
    }
    v
}

/// Runs the zoo, optionally restricted to one group. Output order is canonical.
pub fn run_zoo(only: Option<&str>, seed: u64) -> ZooReport {
    let selected: Vec<Item> = items(seed).into_iter().filter(|i| only.is_none_or(|g| g == i.group)).collect();
    let outcomes: Vec<(String, String, Outcome)> =
        selected.par_iter().map(|i| (i.group.to_string(), i.name.clone(), (i.run)())).collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (group, item, outcome) in outcomes {
        match outcome {
            Ok(reports) => rows.extend(reports.into_iter().map(|r| ZooRow {
                group: group.clone(),
                item: item.clone(),
                formula_id: r.formula_id,
                relation: r.relation,
                lhs: r.lhs,
                rhs: r.rhs,
                residual: r.residual,
                holds: r.holds,
            })),
            Err(error) => errors.push(ZooFailure { group, item, error }),
        }
    }
    rows.sort_by(|a, b| (&a.group, &a.item, &a.formula_id).cmp(&(&b.group, &b.item, &b.formula_id)));
    errors.sort_by(|a, b| (&a.group, &a.item).cmp(&(&b.group, &b.item)));
    ZooReport { seed, rows, errors }
}

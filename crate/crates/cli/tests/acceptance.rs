//! Acceptance gate: one line per criterion with its threshold and timing.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use eulerint_cli::run_with;
use eulerint_core::cellcx::{chi_c, set_intersect, set_union};
use eulerint_core::formulas::{check_cmorin, check_local, check_rmorin3, check_rthm6a};
use eulerint_core::localfib::{dk_range, point_fiber_contraction, suspension_fiber_chi, DkVariant, SuspensionData};
use eulerint_core::pushfwd::fubini_verify;
use eulerint_core::random::{random_complex, random_function, random_simplicial_map, random_subset};
use eulerint_core::{Sign, SingularLedger, StratumType};
use eulerint_geomlab::degree::{default_regular_value, gradient_degree, local_degree_2d, local_degree_nd, NewtonOptions};
use eulerint_geomlab::morin::{morin_loci_2d, plane_germ_ledger};
use eulerint_geomlab::plmorse::{interval_ledger, pl_morse_ledger, EmbeddedSurface};
use eulerint_geomlab::poly::{int, rat, Rat};
use eulerint_geomlab::riemann::random_rational_map;
use eulerint_geomlab::trace::{stable_fiber, GridSpec, PlaneBox};
use eulerint_geomlab::zoo::germs;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn inclusion_exclusion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pairs = 0;
    for _ in 0..50 {
        let cx = Arc::new(random_complex(&mut rng, 50));
        for _ in 0..10 {
            let (a, b) = (random_subset(&mut rng, &cx), random_subset(&mut rng, &cx));
            let lhs = chi_c(&set_union(&a, &b).unwrap()) + chi_c(&set_intersect(&a, &b).unwrap());
            let rhs = chi_c(&a) + chi_c(&b);
            ensure(lhs == rhs, || format!("pair {pairs}: {lhs} != {rhs}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs over 50 complexes"))
}

fn fubini() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..500 {
        let source = Arc::new(random_complex(&mut rng, 20));
        let target = Arc::new(random_complex(&mut rng, 20));
        let f = random_simplicial_map(&mut rng, &source, &target);
        let phi = random_function(&mut rng, &source, -3, 3);
        let r = fubini_verify(&f, &phi).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("map {i}: {} != {}", r.source_integral, r.target_integral))?;
    }
    Ok("500 maps".into())
}

fn polynomial_fibers() -> Outcome {
    let bx = PlaneBox::square(int(25)).unwrap();
    let cases = [
        ("Broughton", germs::broughton(), rat(1, 2), -2),
        ("Broughton", germs::broughton(), rat(-1, 2), -2),
        ("Broughton", germs::broughton(), int(0), -3),
        ("Tibar-Zaharia", germs::tibar_zaharia(), int(0), -2),
        ("Tibar-Zaharia", germs::tibar_zaharia(), rat(1, 2), -2),
        ("Tibar-Zaharia", germs::tibar_zaharia(), rat(-1, 2), 0),
    ];
    let mut got = Vec::new();
    for (name, f, t, want) in cases {
        let s = stable_fiber(&f, &t, &bx, GridSpec::square(1000)).map_err(|e| format!("{name} t={t}: {e}"))?;
        ensure(s.chi_c == want, || format!("{name} t={t}: {} != {want}", s.chi_c))?;
        got.push(format!("{t}:{}", s.chi_c));
    }
    Ok(format!("Broughton {} | Tibar-Zaharia {}", got[..3].join(" "), got[3..].join(" ")))
}

fn suspension_table() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (pa, pb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for _ in 0..1000 {
            let a = 2 * rng.gen_range(0..4) + pa;
            let b = 2 * rng.gen_range(0..4) + pb;
            let (plus, minus, zero) = (rng.gen_range(-50..50), rng.gen_range(-50..50), rng.gen_range(-50..50));
            let d = SuspensionData::new(a, b, rng.gen_range(0..5), plus, minus, zero, plus + minus + zero).unwrap();
            let lhs = suspension_fiber_chi(&d).unwrap();
            let rhs = point_fiber_contraction(&d);
            ensure(lhs == rhs, || format!("{d:?}: {lhs} != {rhs}"))?;
        }
    }
    Ok("4 parity classes x 1000 tuples".into())
}

fn dk_ranges() -> Outcome {
    let cases = [
        (4, DkVariant::Minus3branch, vec![-4, -2, 0, 2, 4]),
        (4, DkVariant::Plus1branch, vec![-2, 0, 2]),
        (5, DkVariant::Odd, vec![-3, -1, 1, 3]),
    ];
    for (k, v, want) in cases {
        let got = dk_range(k, v).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("D{k} {v}: {got:?}"))?;
    }
    Ok("D4-, D4+, D5 ranges match".into())
}

fn a1_counts(l: &SingularLedger) -> (i64, i64) {
    (l.count_of(StratumType::a(1, Some(Sign::Plus))), l.count_of(StratumType::a(1, Some(Sign::Minus))))
}

fn morse() -> Outcome {
    let mut parts = Vec::new();
    for (name, s, d, chi) in
        [("octahedron", EmbeddedSurface::octahedron(), [1, 2, 3], 2), ("torus", EmbeddedSurface::torus(), [11, 4, 1], 0)]
    {
        let mut diffs = Vec::new();
        for sign in [1, -1] {
            let dir: [Rat; 3] = d.map(|c| int(sign * c));
            let l = pl_morse_ledger(&s, &dir).map_err(|e| e.to_string())?;
            let (p, m) = a1_counts(&l);
            ensure(p - m == chi && l.chi_m == chi, || format!("{name} sign {sign}: #A1+ - #A1- = {} vs chi {}", p - m, l.chi_m))?;
            ensure(check_rthm6a(&l).map_err(|e| e.to_string())?.holds, || format!("{name}: RThm6A fails"))?;
            diffs.push(p - m);
        }
        parts.push(format!("{name} {} = {} under both signs", diffs[0], chi));
    }
    Ok(parts.join(" | "))
}

fn rmorin3_intervals() -> Outcome {
    let mut parts = Vec::new();
    for (name, s, d) in [("octahedron", EmbeddedSurface::octahedron(), [1, 2, 3]), ("torus", EmbeddedSurface::torus(), [11, 4, 1])] {
        let iv = interval_ledger(&s, &d.map(int)).map_err(|e| e.to_string())?;
        let l = &iv.ledger;
        let sum = |m: &BTreeMap<i64, i64>| m.iter().map(|(j, c)| j * c).sum::<i64>();
        let (smax, smin) = (sum(l.nmax.as_ref().unwrap()), sum(l.nmin.as_ref().unwrap()));
        let a1 = l.chi_of(StratumType::a(1, Some(Sign::Plus))) + l.chi_of(StratumType::a(1, Some(Sign::Minus)));
        ensure((smax - smin) == 2 * a1, || format!("{name}: sum(j/2)(max-min) = {} vs chi_c(A1) = {a1}", (smax - smin) / 2))?;
        ensure((smax + smin) == 2 * l.chi_m, || format!("{name}: sum(j/2)(max+min) = {} vs chi_c(M) = {}", (smax + smin) / 2, l.chi_m))?;
        for r in check_rmorin3(l).map_err(|e| e.to_string())? {
            ensure(r.holds, || format!("{name}: {r}"))?;
        }
        parts.push(format!("{name} ({}, {}) = ({a1}, {})", (smax - smin) / 2, (smax + smin) / 2, l.chi_m));
    }
    Ok(parts.join(" | "))
}

fn degrees() -> Outcome {
    let r = int(1);
    let mut parts = Vec::new();
    for (name, f, want) in [("identity", germs::identity(), 1), ("(x^2-y^2, 2xy)", germs::square(), 2), ("(x, -y)", germs::reflection(), -1)] {
        let w = local_degree_2d(&f, &r).map_err(|e| e.to_string())?;
        let n = local_degree_nd(&f, &r, &default_regular_value(&f, &r), NewtonOptions::default()).map_err(|e| e.to_string())?.degree;
        ensure(w == want && n == want, || format!("{name}: winding {w}, preimages {n}, want {want}"))?;
        parts.push(format!("{name} {w}"));
    }
    for (name, g, want) in [("x^2+y^2", germs::minimum(), 1), ("x^2-y^2", germs::saddle(), -1), ("x^3-3xy^2", germs::monkey_saddle(), -2)] {
        let d = gradient_degree(&g, &r).map_err(|e| format!("{name}: {e}"))?;
        let arcs = d.nearby_level_chi.ok_or_else(|| format!("{name}: no level trace"))?;
        ensure(d.degree == want && 1 - d.degree == arcs, || format!("{name}: degree {}, arcs {arcs}", d.degree))?;
        parts.push(format!("grad {name} {} (arcs {arcs})", d.degree));
    }
    Ok(parts.join(", "))
}

fn local_formulas() -> Outcome {
    let cusp = plane_germ_ledger("cusp", &germs::cusp(), &rat(1, 2), GridSpec::square(32)).map_err(|e| e.to_string())?;
    let a2 = cusp.counts.values().sum::<u64>();
    let triple = (cusp.deg0.unwrap_or(0), cusp.half_branches.unwrap_or(0), a2);
    ensure(triple == (1, 2, 1), || format!("cusp (deg0, b, #A2) = {triple:?}"))?;
    let fi = check_local(&cusp).map_err(|e| e.to_string())?.into_iter().find(|r| r.formula_id == "FukudaIshikawa");
    ensure(fi.as_ref().is_some_and(|r| r.holds), || format!("Fukuda-Ishikawa: {fi:?}"))?;
    let lips = morin_loci_2d(&germs::lips(), &PlaneBox::square(int(2)).unwrap(), GridSpec::square(64)).map_err(|e| e.to_string())?;
    ensure(lips.cusp_points.len() == 2, || format!("lips cusps {}", lips.cusp_points.len()))?;
    let fold = morin_loci_2d(&germs::fold(), &PlaneBox::square(int(1)).unwrap(), GridSpec::square(32)).map_err(|e| e.to_string())?;
    ensure(fold.cusp_points.is_empty(), || format!("fold cusps {}", fold.cusp_points.len()))?;
    Ok(format!("cusp (deg0, b, #A2) = {triple:?}, lips 2 cusps, fold 0 cusps"))
}

fn complex_morin() -> Outcome {
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let l = random_rational_map(d, 10 + d as u64).and_then(|m| m.ledger()).map_err(|e| e.to_string())?;
        let branch = l.count_of(StratumType::a(1, None));
        ensure(branch == 2 * d as i64 - 2, || format!("d={d}: {branch} branch points"))?;
        let r = check_cmorin(&l).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("d={d}: {r}"))?;
        parts.push(format!("d={d}: 2 + {branch} = {}", r.rhs));
    }
    Ok(parts.join(", "))
}

fn zoo_gate() -> Outcome {
    let mut out = Vec::new();
    let code = run_with(vec!["eulerint".into(), "zoo".into()], &mut out, &mut Vec::new());
    let text = String::from_utf8(out).unwrap();
    let summary = text.lines().last().unwrap_or_default().to_string();
    ensure(code == 0, || format!("exit {code}: {summary}"))?;
    Ok(summary)
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 11] = [
        ("inclusion-exclusion on random sets", Some(Duration::from_secs(5)), inclusion_exclusion),
        ("Fubini on random simplicial maps", Some(Duration::from_secs(10)), fubini),
        ("Broughton and Tibar-Zaharia fibers at box 25, grid 1000", Some(Duration::from_secs(30)), polynomial_fibers),
        ("suspension fiber vs point-fiber table", Some(Duration::from_secs(1)), suspension_table),
        ("D_k smoothing ranges", None, dk_ranges),
        ("PL Morse counts and RThm6A", Some(Duration::from_secs(1)), morse),
        ("RMorin3 interval data, dim N = 1", None, rmorin3_intervals),
        ("local and gradient degrees", Some(Duration::from_secs(30)), degrees),
        ("local formulas on plane germs", None, local_formulas),
        ("complex Morin on rational maps", None, complex_morin),
        ("full zoo gate", Some(Duration::from_secs(120)), zoo_gate),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = outcome.is_ok() && in_time;
        failed += usize::from(!pass);
        let limit_text = limit.map_or("exact".to_string(), |l| format!("exact, < {}s", l.as_secs()));
        let detail = match &outcome {
            Ok(d) if in_time => d.clone(),
            Ok(d) => format!("{d}; over time limit"),
            Err(e) => e.clone(),
        };
        println!(
            "criterion {:>2}: {}  {name} [{limit_text}] {:.3}s  {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

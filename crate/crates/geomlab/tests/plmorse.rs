use eulerint_core::formulas::{check_f1, check_rmorin1, check_rmorin3, check_rthm6a};
use eulerint_core::{Sign, StratumType};
use eulerint_geomlab::plmorse::{interval_ledger, morse_data, pl_morse_ledger, EmbeddedSurface, MorseError, VertexKind};
use eulerint_geomlab::poly::{int, Rat};

fn dir(v: [i64; 3]) -> [Rat; 3] {
    v.map(int)
}

fn a1(l: &eulerint_core::SingularLedger) -> (i64, i64) {
    (l.count_of(StratumType::a(1, Some(Sign::Plus))), l.count_of(StratumType::a(1, Some(Sign::Minus))))
}

#[test]
fn sphere_and_torus_counts() {
    let cases = [
        (EmbeddedSurface::octahedron(), [1, 2, 3], 2, (2, 0)),
        (EmbeddedSurface::tetrahedron(), [1, 2, 4], 2, (2, 0)),
        (EmbeddedSurface::torus(), [11, 4, 1], 0, (2, 2)),
    ];
    for (s, d, chi, counts) in cases {
        assert_eq!(s.euler_characteristic().unwrap(), chi);
        for sign in [1, -1] {
            let l = pl_morse_ledger(&s, &dir(d.map(|c| sign * c))).unwrap();
            assert_eq!(a1(&l), counts);
            assert_eq!(l.chi_m, chi);
            for r in [check_f1(&l).unwrap(), check_rmorin1(&l).unwrap(), check_rthm6a(&l).unwrap()] {
                assert!(r.holds, "{r}");
            }
        }
    }
}

#[test]
fn torus_kinds_under_the_tilted_direction() {
    let d = morse_data(&EmbeddedSurface::torus(), &dir([11, 4, 1])).unwrap();
    assert_eq!(d.count(VertexKind::Minimum), 1);
    assert_eq!(d.count(VertexKind::Maximum), 1);
    assert_eq!(d.count(VertexKind::Saddle), 2);
    assert_eq!(d.count(VertexKind::Regular), 12);
}

#[test]
fn ties_and_non_surfaces_are_rejected() {
    let err = pl_morse_ledger(&EmbeddedSurface::octahedron(), &dir([0, 0, 1])).unwrap_err();
    assert!(matches!(err, MorseError::DegenerateDirection(..)));
    let coords = vec![[int(0), int(0), int(0)], [int(1), int(0), int(0)], [int(0), int(1), int(0)]];
    assert!(matches!(EmbeddedSurface::new(vec![[0, 1, 2]], coords), Err(MorseError::NotSurface(_))));
}

#[test]
fn interval_data_of_the_suspension() {
    let sphere = interval_ledger(&EmbeddedSurface::octahedron(), &dir([1, 2, 3])).unwrap();
    assert_eq!(sphere.sublevel_chi, vec![0, 1, 2]);
    assert_eq!(sphere.level_components, vec![0, 1, 0]);
    let torus = interval_ledger(&EmbeddedSurface::torus(), &dir([11, 4, 1])).unwrap();
    assert_eq!(torus.sublevel_chi, vec![0, 1, 0, -1, 0]);
    assert_eq!(torus.level_components, vec![0, 1, 2, 1, 0]);
    let sums = |d: &eulerint_geomlab::plmorse::IntervalData| {
        let s = |m: &std::collections::BTreeMap<i64, i64>| m.iter().map(|(j, c)| j * c).sum::<i64>();
        (s(d.ledger.nmax.as_ref().unwrap()), s(d.ledger.nmin.as_ref().unwrap()))
    };
    assert_eq!(sums(&sphere), (0, -4));
    assert_eq!(sums(&torus), (4, -4));
    for d in [sphere, torus] {
        for r in check_rmorin3(&d.ledger).unwrap() {
            assert!(r.holds, "{r}");
        }
    }
}

mod common;

use common::{all_ids, euclidean, grid, ids};
use proptest::prelude::*;
use tgeometry::gram::{collinear, Collinearity, Multivector};
use tgeometry::tube::{
    check_definiteness, check_section_minimality, classify_extremality, degeneracy_report,
    first_order_locate, tube_membership, tube_scan, tube_section, Definiteness, Degeneracy,
    Extremality, FirstOrderClass, SectionMinimality, TubeBasis, DEFAULT_MAX_BASES,
};
use tgeometry::{GeneratorSpec, PointId, TolerancePolicy, WorldFunction};

fn plane_grid() -> (Vec<Vec<f64>>, WorldFunction) {
    let pts = grid(2, -6, 6, 1.0);
    let wf = euclidean(&pts);
    (pts, wf)
}

fn index_of(pts: &[Vec<f64>], p: &[f64]) -> usize {
    pts.iter().position(|q| q.as_slice() == p).unwrap()
}

/// Exact integer test: r on the line through a and b.
fn on_line(a: &[f64], b: &[f64], r: &[f64]) -> bool {
    (b[0] - a[0]) * (r[1] - a[1]) == (b[1] - a[1]) * (r[0] - a[0])
}

fn grid_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-6i32..=6).prop_map(f64::from), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basis_points_are_members(a in grid_point(), b in grid_point()) {
        prop_assume!(a != b);
        let (pts, wf) = plane_grid();
        let tol = TolerancePolicy::default();
        let basis = TubeBasis::new(&wf, ids(&[index_of(&pts, &a), index_of(&pts, &b)]), &tol).unwrap();
        for &p in basis.points() {
            let r = tube_membership(&basis, p, &tol).unwrap();
            prop_assert!(r.member);
            prop_assert!(r.residual.abs() <= 1e-9);
        }
    }

    #[test]
    fn first_order_scan_matches_line_and_factors(a in grid_point(), b in grid_point()) {
        prop_assume!(a != b);
        let (pts, wf) = plane_grid();
        let tol = TolerancePolicy::default();
        let (i0, i1) = (index_of(&pts, &a), index_of(&pts, &b));
        let basis = TubeBasis::new(&wf, ids(&[i0, i1]), &tol).unwrap();
        for report in tube_scan(&basis, &all_ids(&wf), &tol).unwrap() {
            let r = &pts[report.point.0];
            prop_assert_eq!(report.member, on_line(&a, &b, r), "point {:?}", r);
            let locus = first_order_locate(&wf, PointId(i0), PointId(i1), report.point, &tol).unwrap();
            // the three ordered segments partition the tube
            prop_assert_eq!(locus.class.on_tube(), report.member);
            prop_assert!(locus.class != FirstOrderClass::InteriorViolation);
            // F_2 is quadratic in σ, and σ ≤ 144 on this grid
            prop_assert!((locus.f2_from_factors() - report.residual).abs() <= 1e-12 * 144.0 * 144.0);
            if report.point.0 != i0 {
                let u = Multivector::new(&wf, ids(&[i0, i1])).unwrap();
                let v = Multivector::new(&wf, vec![PointId(i0), report.point]).unwrap();
                let c = collinear(&u, &v, &tol).unwrap();
                prop_assert_eq!(c != Collinearity::NotCollinear, report.member);
            }
        }
    }
}

#[test]
fn first_order_classes_along_a_line() {
    let (pts, wf) = plane_grid();
    let tol = TolerancePolicy::default();
    let (i0, i1) = (index_of(&pts, &[-2.0, -1.0]), index_of(&pts, &[2.0, 1.0]));
    for (i, r) in pts.iter().enumerate() {
        let class = first_order_locate(&wf, PointId(i0), PointId(i1), PointId(i), &tol)
            .unwrap()
            .class;
        let t = if r[0] == 0.0 { None } else { Some(r[0] / 2.0) };
        let expected = match (on_line(&pts[i0], &pts[i1], r), t) {
            (false, _) => FirstOrderClass::Exterior,
            (true, Some(t)) if t > 1.0 => FirstOrderClass::RayBeyondP1,
            (true, Some(t)) if t < -1.0 => FirstOrderClass::RayBeyondP0,
            _ => FirstOrderClass::Segment,
        };
        assert_eq!(class, expected, "{r:?}");
    }
}

#[test]
fn second_order_tube_is_the_plane() {
    let pts = grid(3, -3, 3, 1.0);
    let wf = euclidean(&pts);
    let tol = TolerancePolicy::default();
    let basis = ids(&[
        index_of(&pts, &[0.0, 0.0, 1.0]),
        index_of(&pts, &[2.0, 1.0, 1.0]),
        index_of(&pts, &[-1.0, 3.0, 1.0]),
    ]);
    let tb = TubeBasis::new(&wf, basis, &tol).unwrap();
    for r in tube_scan(&tb, &all_ids(&wf), &tol).unwrap() {
        assert_eq!(r.member, pts[r.point.0][2] == 1.0, "{:?}", pts[r.point.0]);
    }
}

fn minkowski_cone() -> (Vec<Vec<f64>>, WorldFunction, usize) {
    let pts = grid(3, -3, 3, 1.0);
    let wf =
        WorldFunction::from_points(GeneratorSpec::pseudo_euclidean(vec![1, -1, -1]), &pts).unwrap();
    let origin = index_of(&pts, &[0.0, 0.0, 0.0]);
    (pts, wf, origin)
}

#[test]
fn light_cone_is_one_section() {
    let (pts, wf, origin) = minkowski_cone();
    let tol = TolerancePolicy::default();
    let tb = TubeBasis::new(&wf, ids(&[origin]), &tol).unwrap();
    let cone: Vec<PointId> = tube_scan(&tb, &all_ids(&wf), &tol)
        .unwrap()
        .into_iter()
        .filter(|r| r.member)
        .map(|r| r.point)
        .collect();
    let oracle: Vec<PointId> = all_ids(&wf)
        .into_iter()
        .filter(|p| {
            let x = &pts[p.0];
            x[0] * x[0] == x[1] * x[1] + x[2] * x[2]
        })
        .collect();
    assert_eq!(cone, oracle);
    let member = index_of(&pts, &[1.0, 1.0, 0.0]);
    let mut section = tube_section(&tb, PointId(member), &all_ids(&wf), &tol).unwrap();
    section.sort();
    assert_eq!(section, oracle);
    assert!(matches!(
        check_section_minimality(&tb, &all_ids(&wf), &tol).unwrap(),
        SectionMinimality::Fails { .. }
    ));
    assert!(matches!(
        classify_extremality(&tb, &all_ids(&wf), &tol, DEFAULT_MAX_BASES).unwrap(),
        Extremality::NotExtremal { .. }
    ));
}

#[test]
fn euclidean_point_tube_and_line_are_geodesic() {
    let (pts, wf) = plane_grid();
    let tol = TolerancePolicy::default();
    let o = index_of(&pts, &[0.0, 0.0]);
    let point = TubeBasis::new(&wf, ids(&[o]), &tol).unwrap();
    let members: Vec<PointId> = tube_scan(&point, &all_ids(&wf), &tol)
        .unwrap()
        .into_iter()
        .filter(|r| r.member)
        .map(|r| r.point)
        .collect();
    assert_eq!(members, ids(&[o]));
    let line = TubeBasis::new(&wf, ids(&[o, index_of(&pts, &[1.0, 2.0])]), &tol).unwrap();
    assert_eq!(
        classify_extremality(&line, &all_ids(&wf), &tol, DEFAULT_MAX_BASES).unwrap(),
        Extremality::GeodesicTube
    );
}

/// Ball grid of step `h` with σ from the sphere's intrinsic metric applied to chords.
fn intrinsic_ball(h: f64) -> (Vec<Vec<f64>>, WorldFunction) {
    let n = (1.0 / h).round() as i32;
    let pts: Vec<Vec<f64>> = grid(3, -n, n, h)
        .into_iter()
        .filter(|p| p.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12)
        .collect();
    let wf = WorldFunction::from_points(GeneratorSpec::sphere_intrinsic(3), &pts).unwrap();
    (pts, wf)
}

#[test]
fn intrinsic_sigma_in_the_ball_is_nondegenerate() {
    let (pts, wf) = intrinsic_ball(0.25);
    let tol = TolerancePolicy::default();
    let (a, b) = (
        index_of(&pts, &[-0.75, 0.0, 0.0]),
        index_of(&pts, &[0.75, 0.0, 0.0]),
    );
    let report = degeneracy_report(&wf, PointId(a), PointId(b), &all_ids(&wf), &tol).unwrap();
    assert_eq!(report.verdict, Degeneracy::Nondegenerate);
    assert!(report.interior > 0);
}

#[test]
fn euclidean_segment_is_degenerate() {
    let (pts, wf) = plane_grid();
    let tol = TolerancePolicy::default();
    let (a, b) = (index_of(&pts, &[-3.0, -3.0]), index_of(&pts, &[3.0, 3.0]));
    let report = degeneracy_report(&wf, PointId(a), PointId(b), &all_ids(&wf), &tol).unwrap();
    assert_eq!(report.verdict, Degeneracy::Degenerate);
    assert_eq!(report.interior, 0);
    assert_eq!(report.on_segment_non_basis, 5);
}

/// S = √(2σ) for the intrinsic σ as a function of the chord d.
fn s_of_chord(d: f64) -> f64 {
    2.0 * (d / 2.0).min(1.0).asin()
}

/// Point at polar angle `theta` around the x-axis on the surface S(P0,R) + S(R,P1) = S(P0,P1).
fn ring_point(p0: f64, p1: f64, x: f64, theta: f64) -> Vec<f64> {
    let target = s_of_chord(p1 - p0);
    let f = |r: f64| {
        s_of_chord(((x - p0).powi(2) + r * r).sqrt())
            + s_of_chord(((x - p1).powi(2) + r * r).sqrt())
            - target
    };
    // f < 0 on the axis (superadditivity) and grows with the radius
    let (mut lo, mut hi) = (0.0, 0.5);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    vec![x, r * theta.cos(), r * theta.sin()]
}

#[test]
fn intrinsic_segment_surface_is_not_definite() {
    let (p0, p1) = (-0.6, 0.6);
    let mut pts = vec![vec![p0, 0.0, 0.0], vec![p1, 0.0, 0.0]];
    for (k, x) in [-0.3, 0.0, 0.3].into_iter().enumerate() {
        for j in 0..6 {
            let theta = std::f64::consts::PI * (j as f64 / 3.0 + k as f64 / 9.0);
            pts.push(ring_point(p0, p1, x, theta));
        }
    }
    let wf = WorldFunction::from_points(GeneratorSpec::sphere_intrinsic(3), &pts).unwrap();
    let tol = TolerancePolicy::new(1e-7);
    let tb = TubeBasis::new(&wf, ids(&[0, 1]), &tol).unwrap();
    let all = all_ids(&wf);
    assert!(tube_scan(&tb, &all, &tol).unwrap().iter().all(|r| r.member));
    match check_definiteness(&tb, &all, &tol, DEFAULT_MAX_BASES).unwrap() {
        Definiteness::Fails { basis, .. } => assert_ne!(basis, ids(&[0, 1])),
        other => panic!("expected a failing basis, got {other:?}"),
    }
}

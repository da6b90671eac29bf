use std::collections::VecDeque;
use std::f64::consts::PI;

use geoconnect::action::killing_pairings;
use geoconnect::geometry::{catalog, MetricModel};
use geoconnect::obstruction::{certify, sign_conservation_check, SearchConfig};
use geoconnect::spacetime::SpacetimeModel;

fn check_witness(model: &MetricModel, p: &[f64], q: &[f64]) {
    let cert = certify(model, p, q, SearchConfig::default()).unwrap().expect("potential exists");
    assert!(!cert.certifies(), "{} should be reachable", model.name());
    let w = cert.witness().expect("reachable search yields a witness");
    assert_eq!(w.start(), p);
    assert_eq!(w.end(), q);
    for i in 0..w.segments() {
        assert!(model.in_domain(w.node(i)));
        assert!(model.segment_clear(w.node(i), w.node(i + 1)), "segment {i} crosses an excluded region");
    }
    // A monotone-potential curve has a one-signed pairing ⟨δ, ẋ⟩.
    let st = SpacetimeModel::new(model);
    let report = sign_conservation_check(&st, w).unwrap();
    assert!(!report.flagged, "{}: witness pairing changes sign {report:?}", model.name());
    assert_eq!(killing_pairings(&st, w).unwrap().len(), w.segments());
}

#[test]
fn witnesses_are_sound() {
    check_witness(&catalog::slit_plane().unwrap(), &[-2.0, -1.0], &[2.0, 1.0]);
    check_witness(&catalog::slit_plane().unwrap(), &[0.0, 1.0], &[0.5, 2.0]);
    check_witness(&catalog::cos3_wall().unwrap(), &[0.0, 0.0, 0.0], &[-0.5, 0.3, 0.2]);
    check_witness(&catalog::cos3_wall().unwrap(), &[3.5, 0.0, 0.0], &[5.0, -1.0, 2.0]);
    check_witness(&catalog::flat(2, "[2*x1, 2*x2]", "0").unwrap(), &[1.0, 0.0], &[0.0, 2.0]);
}

fn cos3_potential(x1: f64) -> f64 {
    if x1 < PI {
        -(x1.sin() - x1.sin().powi(3) / 3.0)
    } else {
        x1 - PI
    }
}

/// Breadth-first search over a full 3-D grid with 6-neighbour moves, using the
/// closed-form potential. Returns reachability in the three monotone modes.
fn full_grid_search(p: [f64; 3], q: [f64; 3], lo: [f64; 3], hi: [f64; 3], n: usize) -> [bool; 3] {
    let h: Vec<f64> = (0..3).map(|k| (hi[k] - lo[k]) / (n - 1) as f64).collect();
    let snap = |x: [f64; 3]| -> [usize; 3] {
        let mut c = [0; 3];
        for k in 0..3 {
            c[k] = ((x[k] - lo[k]) / h[k]).round() as usize;
        }
        c
    };
    let value = |c: [usize; 3]| cos3_potential(lo[0] + c[0] as f64 * h[0]);
    let (start, goal) = (snap(p), snap(q));
    let eps = 1e-12;
    let modes: [&dyn Fn(f64, f64) -> bool; 3] = [
        &|a, b| b >= a - eps,
        &|a, b| b <= a + eps,
        &|a, b| (b - a).abs() <= eps,
    ];
    let idx = |c: [usize; 3]| (c[0] * n + c[1]) * n + c[2];
    modes.map(|allows| {
        let mut seen = vec![false; n * n * n];
        let mut queue = VecDeque::from([start]);
        seen[idx(start)] = true;
        while let Some(c) = queue.pop_front() {
            if c == goal {
                return true;
            }
            for k in 0..3 {
                for step in [-1i64, 1] {
                    let v = c[k] as i64 + step;
                    if v < 0 || v >= n as i64 {
                        continue;
                    }
                    let mut next = c;
                    next[k] = v as usize;
                    if !seen[idx(next)] && allows(value(c), value(next)) {
                        seen[idx(next)] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        false
    })
}

#[test]
fn full_grid_agrees_with_reduced_search() {
    let wall = catalog::cos3_wall().unwrap();
    let (lo, hi) = ([-1.5, -1.5, -1.5], [3.0 * PI / 2.0 + 1.5, 1.5, 1.5]);
    let cases = [
        ([0.0, 0.0, 0.0], [3.0 * PI / 2.0, 0.0, 0.0], false),
        ([0.0, 0.5, 0.0], [2.0, -0.5, 1.0], false),
        ([0.0, 0.0, 0.0], [-0.6, 0.8, -0.4], true),
        ([2.2, 0.0, 0.0], [5.5, 1.0, 1.0], true),
    ];
    for (p, q, expect) in cases {
        let full = full_grid_search(p, q, lo, hi, 64);
        assert_eq!(full.iter().any(|r| *r), expect, "full grid, {p:?} -> {q:?}: {full:?}");
        let cert = certify(&wall, &p, &q, SearchConfig::default()).unwrap().unwrap();
        assert_eq!(cert.axes, vec![0], "the wall reduces to the x1 axis");
        assert_eq!(!cert.certifies(), expect, "reduced search, {p:?} -> {q:?}");
    }
}

#[test]
fn refinement_preserves_the_slit_certificate() {
    let slit = catalog::slit_plane().unwrap();
    for resolution in [64, 128, 512] {
        let cert = certify(
            &slit,
            &[0.0, -1.0],
            &[0.0, 1.0],
            SearchConfig {
                resolution,
                ..Default::default()
            },
        )
        .unwrap()
        .unwrap();
        assert!(cert.certifies(), "resolution {resolution}");
        assert!(cert.refined.as_ref().unwrap().shape.iter().product::<usize>() > cert.coarse.shape.iter().product());
    }
}

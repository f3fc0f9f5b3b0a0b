use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stlnn::abstraction::{decompose, AbstractionGraph, Geometry, StateBox};
use stlnn::formula::PredicateSet;

fn sample_in<R: Rng>(rng: &mut R, b: &StateBox) -> Vec<f64> {
    b.lo.iter().zip(&b.hi).map(|(a, c)| rng.gen_range(*a..*c)).collect()
}

fn sample_region<R: Rng>(rng: &mut R, g: &AbstractionGraph, d: usize) -> Vec<f64> {
    let r = g.region(d);
    let mut x = sample_in(rng, g.bounds());
    match &r.geometry {
        Geometry::Box(b) => {
            for i in 0..x.len() {
                let m = 1e-7 * (b.hi[i] - b.lo[i]);
                x[i] = rng.gen_range(b.lo[i] + m..b.hi[i] - m);
            }
        }
        Geometry::Polygon { dims, vertices } => {
            // Random convex combination pulled slightly toward the centroid.
            let w: Vec<f64> = vertices.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
            let s: f64 = w.iter().sum();
            let mut p = [0.0, 0.0];
            for (v, wi) in vertices.iter().zip(&w) {
                p[0] += v[0] * wi / s;
                p[1] += v[1] * wi / s;
            }
            x[dims[0]] = 0.999 * p[0] + 0.001 * r.centroid[dims[0]];
            x[dims[1]] = 0.999 * p[1] + 0.001 * r.centroid[dims[1]];
        }
    }
    x
}

fn check(g: &AbstractionGraph, samples: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = g.regions().iter().map(|r| r.volume).sum();
    assert!((total - g.bounds().volume()).abs() <= 1e-6 * g.bounds().volume());
    for d in 0..g.num_regions() {
        for &e in g.neighbors(d) {
            assert_ne!(d, e);
            assert!(g.neighbors(e).contains(&d));
        }
        if g.region(d).pure {
            for _ in 0..64 {
                let x = sample_region(&mut rng, g, d);
                assert_eq!(g.predicates().label(&x).unwrap(), g.label(d), "region {} at {:?}", d, x);
            }
        }
    }
    for _ in 0..samples {
        let x = sample_in(&mut rng, g.bounds());
        let d = g.region_of(&x).unwrap();
        assert!(g.contains(d, &x));
        let containing = (0..g.num_regions()).filter(|&k| g.contains(k, &x)).count();
        assert!(containing >= 1);
        if g.region(d).pure {
            assert_eq!(g.label(d), g.predicates().label(&x).unwrap());
        }
    }
}

#[test]
fn axis_aligned_boxes() {
    let ps = PredicateSet::from_exprs(
        &["x1", "x2"],
        &[("g1a", "x1 - 3"), ("g1b", "4 - x1"), ("g1c", "x2 - 2"), ("g1d", "3 - x2"), ("g2a", "x1 - 1"), ("g2b", "2 - x1")],
    )
    .unwrap();
    let b = StateBox::new(vec![0.0, 0.0], vec![5.0, 5.0]).unwrap();
    check(&decompose(&b, &ps).unwrap(), 100_000, 1);
}

#[test]
fn oblique_polygons() {
    let ps = PredicateSet::from_exprs(&["x", "y"], &[("a", "x + 2*y - 4"), ("b", "3*x - y - 1"), ("c", "y - 2.5")]).unwrap();
    let b = StateBox::new(vec![0.0, 0.0], vec![5.0, 5.0]).unwrap();
    check(&decompose(&b, &ps).unwrap(), 20_000, 2);
}

#[test]
fn circle_boxes() {
    let ps = PredicateSet::from_exprs(&["x", "y"], &[("red", "2 - (x-5)^2 - (y-5)^2"), ("goal", "x - 10")]).unwrap();
    let b = StateBox::new(vec![0.0, 0.0], vec![12.0, 12.0]).unwrap();
    let g = decompose(&b, &ps).unwrap();
    assert!(g.impure_fraction() < 0.02);
    check(&g, 100_000, 3);
    // Monte Carlo: fraction of points in uncertified cells agrees with the volume bookkeeping.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 20_000;
    let hits = (0..n).filter(|_| !g.region(g.region_of(&sample_in(&mut rng, &b)).unwrap()).pure).count();
    assert!((hits as f64 / n as f64) < 0.02);
}

#[test]
fn boundary_points_are_deterministic() {
    let ps = PredicateSet::from_exprs(&["x", "y"], &[("g", "x - 1")]).unwrap();
    let b = StateBox::new(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
    let g = decompose(&b, &ps).unwrap();
    let d1 = g.region_of(&[1.0, 0.5]).unwrap();
    let d2 = g.region_of(&[1.0, 0.5]).unwrap();
    assert_eq!(d1, d2);
    assert_eq!(g.label(d1), 1);
}

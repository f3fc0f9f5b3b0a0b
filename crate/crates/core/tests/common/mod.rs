#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stlnn::dynamics::DynamicsModel;
use stlnn::trajectory::Trajectory;
use stlnn::time::TimeInterval;
use stlnn::{LabelSignal, StlFormula, Symbol};

/// Random piecewise-constant signal over `npred` predicates. Breakpoints lie
/// on a half-unit grid so they often coincide with interval endpoints.
pub fn random_signal<R: Rng>(rng: &mut R, npred: usize, end: f64) -> LabelSignal {
    let full = (1u32 << npred) - 1;
    let mut times = vec![0.0];
    let mut t = 0.0;
    loop {
        t += if rng.gen_bool(0.7) { 0.5 * rng.gen_range(1..4) as f64 } else { rng.gen_range(0.05..1.5) };
        if t >= end {
            break;
        }
        times.push(t);
    }
    let at = times.iter().map(|_| rng.gen::<u32>() & full).collect();
    let between = times[1..].iter().map(|_| rng.gen::<u32>() & full).collect();
    LabelSignal::new(times, at, between, Some(rng.gen::<u32>() & full)).unwrap()
}

fn random_interval<R: Rng>(rng: &mut R, max: u32) -> TimeInterval {
    let a = rng.gen_range(0..max) as f64 * 0.5;
    let b = a + rng.gen_range(0..=4) as f64 * 0.5;
    if a == b {
        TimeInterval::point(a)
    } else {
        TimeInterval::new(a, b, rng.gen_bool(0.5), rng.gen_bool(0.5))
    }
}

pub fn random_prop<R: Rng>(rng: &mut R, npred: usize, depth: u32) -> StlFormula {
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..8) {
            0 => StlFormula::True,
            1 => StlFormula::not(StlFormula::pred(rng.gen_range(0..npred))),
            _ => StlFormula::pred(rng.gen_range(0..npred)),
        };
    }
    let a = random_prop(rng, npred, depth - 1);
    let b = random_prop(rng, npred, depth - 1);
    match rng.gen_range(0..3) {
        0 => StlFormula::and(a, b),
        1 => StlFormula::or(a, b),
        _ => StlFormula::not(a),
    }
}

pub fn random_temporal<R: Rng>(rng: &mut R, npred: usize, max: u32) -> StlFormula {
    let i = random_interval(rng, max);
    match rng.gen_range(0..3) {
        0 => StlFormula::eventually(i, random_prop(rng, npred, 1)),
        1 => StlFormula::globally(i, random_prop(rng, npred, 1)),
        _ => StlFormula::until(i, random_prop(rng, npred, 1), random_prop(rng, npred, 1)),
    }
}

/// Boolean combination of up to `width` temporal operators and predicates.
pub fn random_stl<R: Rng>(rng: &mut R, npred: usize, width: usize, max: u32) -> StlFormula {
    let n = rng.gen_range(1..=width);
    let mut f = random_temporal(rng, npred, max);
    for _ in 1..n {
        let g = if rng.gen_bool(0.85) { random_temporal(rng, npred, max) } else { random_prop(rng, npred, 1) };
        let g = if rng.gen_bool(0.25) { StlFormula::not(g) } else { g };
        f = if rng.gen_bool(0.5) { StlFormula::and(f, g) } else { StlFormula::or(f, g) };
    }
    if rng.gen_bool(0.15) {
        StlFormula::not(f)
    } else {
        f
    }
}

/// Dormand-Prince 5(4) with step-size control; reference solution only.
pub fn dopri(sys: &DynamicsModel, x0: &[f64], u: &[f64], dt: f64, tol: f64) -> Vec<f64> {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] =
        [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut h: f64 = 1e-3;
    while t < dt {
        h = h.min(dt - t);
        let mut k = vec![vec![0.0; n]; 7];
        for s in 0..7 {
            let xs: Vec<f64> = (0..n).map(|i| x[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()).collect();
            k[s] = sys.f(&xs, u);
        }
        let x5: Vec<f64> = (0..n).map(|i| x[i] + h * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>()).collect();
        let err = (0..n)
            .map(|i| h * (0..7).map(|j| (B5[j] - B4[j]) * k[j][i]).sum::<f64>())
            .map(|e| e.abs() / (tol * (1.0 + x[0].abs().max(1.0))))
            .fold(0.0, f64::max);
        if err <= 1.0 {
            t += h;
            x = x5;
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    x
}

/// Largest state error of the planner's propagation against the adaptive
/// reference over `rollouts` random-control runs of 10 s from mid-box.
pub fn rk4_worst_error(sys: &DynamicsModel, seed: u64, rollouts: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..rollouts {
        let x0: Vec<f64> = sys.bounds.lo.iter().zip(&sys.bounds.hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut controls = Vec::new();
        let mut total = 0.0;
        while total < 10.0 {
            let dt = rng.gen_range(0.05..1.0f64).min(10.0 - total);
            let u: Vec<f64> = sys.controls.lo.iter().zip(&sys.controls.hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
            controls.push((u, dt));
            total += dt;
        }
        let traj = Trajectory::simulate(sys, &x0, &controls).unwrap();
        let mut x = x0.clone();
        for ((u, dt), seg) in controls.iter().zip(&traj.segments) {
            x = dopri(sys, &x, u, *dt, 1e-10);
            let e = x.iter().zip(seg.last_state()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(e);
        }
    }
    worst
}

/// Random timed word starting at 0 with at most two symbols per timestamp.
pub fn random_word<R: Rng>(rng: &mut R, npred: usize, len: usize, end: f64) -> Vec<(Symbol, f64)> {
    let full = (1u32 << npred) - 1;
    let mut w = vec![(rng.gen::<u32>() & full, 0.0)];
    let mut t = 0.0;
    let mut same = 1;
    while w.len() < len {
        if same < 2 && rng.gen_bool(0.35) {
            same += 1;
        } else {
            t += if rng.gen_bool(0.6) { 0.5 * rng.gen_range(1..8) as f64 } else { rng.gen_range(0.1..4.0) };
            same = 1;
        }
        if t > end {
            break;
        }
        w.push((rng.gen::<u32>() & full, t));
    }
    w
}

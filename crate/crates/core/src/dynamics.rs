//! Builtin control systems `ẋ = f(x, u)` and fixed-step RK4 propagation.

use crate::abstraction::StateBox;
use crate::error::{Error, Result};

/// Default RK4 step (seconds). Propagation uses the largest `h ≤ STEP` that
/// divides the duration evenly.
pub const STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// `ẋ = y, ẏ = u`.
    DoubleIntegrator,
    /// `ẋ = v cos φ, ẏ = v sin φ, φ̇ = ω, v̇ = a`.
    Unicycle2,
    /// `ẋ = v cos θ, ẏ = v sin θ, θ̇ = (v/L) tan δ` with `L = 1`.
    KinematicCar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsModel {
    pub name: String,
    pub model: Model,
    pub state_names: Vec<String>,
    pub control_names: Vec<String>,
    pub controls: StateBox,
    pub bounds: StateBox,
}

pub const BUILTIN_NAMES: [&str; 3] = ["double_integrator", "unicycle2", "kinematic_car"];

/// The named builtin model with its default state and control bounds.
pub fn builtin_dynamics(name: &str) -> Result<DynamicsModel> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let b = |lo: &[f64], hi: &[f64]| StateBox::new(lo.to_vec(), hi.to_vec()).expect("builtin bounds");
    let m = match name {
        "double_integrator" => DynamicsModel {
            name: name.into(),
            model: Model::DoubleIntegrator,
            state_names: s(&["x", "y"]),
            control_names: s(&["u"]),
            controls: b(&[-1.0], &[1.0]),
            bounds: b(&[-1.0, -2.0], &[5.0, 2.0]),
        },
        "unicycle2" => DynamicsModel {
            name: name.into(),
            model: Model::Unicycle2,
            state_names: s(&["x", "y", "phi", "v"]),
            control_names: s(&["omega", "a"]),
            controls: b(&[-1.5, -1.0], &[1.5, 1.0]),
            bounds: b(&[0.0, 0.0, -10.0, -1.0], &[5.0, 5.0, 10.0, 1.0]),
        },
        "kinematic_car" => DynamicsModel {
            name: name.into(),
            model: Model::KinematicCar,
            state_names: s(&["x", "y", "theta"]),
            control_names: s(&["v", "delta"]),
            controls: b(&[0.0, -0.8], &[3.0, 0.8]),
            bounds: b(&[0.0, 0.0, -50.0], &[12.0, 12.0, 50.0]),
        },
        _ => return Err(Error::UnknownDynamics(name.to_string())),
    };
    Ok(m)
}

impl DynamicsModel {
    pub fn state_dim(&self) -> usize {
        self.state_names.len()
    }

    pub fn control_dim(&self) -> usize {
        self.control_names.len()
    }

    pub fn eval(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        match self.model {
            Model::DoubleIntegrator => {
                out[0] = x[1];
                out[1] = u[0];
            }
            Model::Unicycle2 => {
                out[0] = x[3] * x[2].cos();
                out[1] = x[3] * x[2].sin();
                out[2] = u[0];
                out[3] = u[1];
            }
            Model::KinematicCar => {
                out[0] = u[0] * x[2].cos();
                out[1] = u[0] * x[2].sin();
                out[2] = u[0] * u[1].tan();
            }
        }
    }

    pub fn f(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.eval(x, u, &mut out);
        out
    }

    /// One classical RK4 step of size `h`.
    pub fn rk4_step(&self, x: &[f64], u: &[f64], h: f64) -> Vec<f64> {
        let n = x.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        self.eval(x, u, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        self.eval(&tmp, u, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        self.eval(&tmp, u, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        self.eval(&tmp, u, &mut k4);
        (0..n).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
    }

    /// Integrates under constant `u` for `dt` seconds starting at time `t0`.
    pub fn propagate(&self, x0: &[f64], u: &[f64], t0: f64, dt: f64) -> Segment {
        let steps = ((dt / STEP) - 1e-9).ceil().max(1.0) as usize;
        let h = dt / steps as f64;
        let mut times = Vec::with_capacity(steps + 1);
        let mut states = Vec::with_capacity(steps + 1);
        let mut derivs = Vec::with_capacity(steps + 1);
        let mut x = x0.to_vec();
        for k in 0..=steps {
            times.push(if k == steps { t0 + dt } else { t0 + k as f64 * h });
            derivs.push(self.f(&x, u));
            let next = if k < steps { Some(self.rk4_step(&x, u, h)) } else { None };
            states.push(std::mem::replace(&mut x, next.unwrap_or_default()));
        }
        Segment { u: u.to_vec(), times, states, derivs }
    }
}

/// One constant-control piece of a trajectory, with RK4 grid points and
/// cubic Hermite dense output between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub u: Vec<f64>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivs: Vec<Vec<f64>>,
}

impl Segment {
    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    pub fn num_steps(&self) -> usize {
        self.times.len() - 1
    }

    /// Hermite interpolant on step `k` at fraction `s ∈ [0,1]`.
    pub fn interpolate(&self, k: usize, s: f64) -> Vec<f64> {
        if s <= 0.0 {
            return self.states[k].clone();
        }
        if s >= 1.0 {
            return self.states[k + 1].clone();
        }
        let h = self.times[k + 1] - self.times[k];
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (a, b) = (&self.states[k], &self.states[k + 1]);
        let (da, db) = (&self.derivs[k], &self.derivs[k + 1]);
        (0..a.len()).map(|i| h00 * a[i] + h10 * h * da[i] + h01 * b[i] + h11 * h * db[i]).collect()
    }

    /// Dense state at absolute time `t` within the segment.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        let k = match self.times.binary_search_by(|p| p.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.states[i].clone(),
            Err(0) => return self.states[0].clone(),
            Err(i) if i >= self.times.len() => return self.last_state().to_vec(),
            Err(i) => i - 1,
        };
        let s = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        self.interpolate(k, s)
    }
}

//! Classic cart-pole balancing, integrated with explicit Euler steps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::brain::{TaskId, WiredNetwork};
use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CartpoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Left,
    Right,
}

/// Physical constants, termination thresholds and observation scaling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CartpoleConfig {
    pub max_steps: usize,
    pub gravity: f64,
    pub mass_cart: f64,
    pub mass_pole: f64,
    /// Half the pole length.
    pub half_length: f64,
    pub force: f64,
    pub tau: f64,
    pub x_threshold: f64,
    pub theta_threshold: f64,
    /// Initial state components are drawn from `[-init_range, init_range]`.
    pub init_range: f64,
    /// Divisor mapping both velocities into the network's input range.
    pub velocity_scale: f64,
}

impl Default for CartpoleConfig {
    fn default() -> Self {
        CartpoleConfig {
            max_steps: 1000,
            gravity: 9.8,
            mass_cart: 1.0,
            mass_pole: 0.1,
            half_length: 0.5,
            force: 10.0,
            tau: 0.02,
            x_threshold: 2.4,
            theta_threshold: 12.0_f64.to_radians(),
            init_range: 0.05,
            velocity_scale: 4.0,
        }
    }
}

impl CartpoleConfig {
    pub fn step(&self, s: CartpoleState, action: Action) -> CartpoleState {
        let force = match action {
            Action::Right => self.force,
            Action::Left => -self.force,
        };
        let total_mass = self.mass_cart + self.mass_pole;
        let pole_mass_length = self.mass_pole * self.half_length;
        let (sin, cos) = s.theta.sin_cos();

        let temp = (force + pole_mass_length * s.theta_dot * s.theta_dot * sin) / total_mass;
        let theta_acc = (self.gravity * sin - cos * temp)
            / (self.half_length * (4.0 / 3.0 - self.mass_pole * cos * cos / total_mass));
        let x_acc = temp - pole_mass_length * theta_acc * cos / total_mass;

        CartpoleState {
            x: s.x + self.tau * s.x_dot,
            x_dot: s.x_dot + self.tau * x_acc,
            theta: s.theta + self.tau * s.theta_dot,
            theta_dot: s.theta_dot + self.tau * theta_acc,
        }
    }

    pub fn is_terminal(&self, s: &CartpoleState) -> bool {
        s.x.abs() > self.x_threshold || s.theta.abs() > self.theta_threshold
    }

    /// Scaled, clamped network inputs.
    pub fn observe(&self, s: &CartpoleState) -> [f64; 4] {
        [
            s.x / self.x_threshold,
            s.x_dot / self.velocity_scale,
            s.theta / self.theta_threshold,
            s.theta_dot / self.velocity_scale,
        ]
        .map(|v| v.clamp(-1.0, 1.0))
    }

    pub fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> CartpoleState {
        let r = self.init_range;
        CartpoleState {
            x: rng.gen_range(-r..=r),
            x_dot: rng.gen_range(-r..=r),
            theta: rng.gen_range(-r..=r),
            theta_dot: rng.gen_range(-r..=r),
        }
    }
}

/// Output >= 0 pushes right.
pub fn action_for(output: f64) -> Action {
    if output >= 0.0 {
        Action::Right
    } else {
        Action::Left
    }
}

/// Run one episode from a random start and return the number of steps after
/// which the system was still inside the bounds, capped at `max_steps`.
pub fn run_cartpole_episode<R: Rng + ?Sized>(
    network: &WiredNetwork,
    task: TaskId,
    config: &CartpoleConfig,
    rng: &mut R,
) -> Result<usize> {
    let mut state = config.initial_state(rng);
    let mut values = Vec::new();
    let mut out = [0.0];
    let mut steps = 0;
    while steps < config.max_steps {
        network.evaluate_into(task, &config.observe(&state), &mut values, &mut out)?;
        state = config.step(state, action_for(out[0]));
        if config.is_terminal(&state) {
            break;
        }
        steps += 1;
    }
    Ok(steps)
}

//! Activity dependence: while tasks run, the soma program is re-executed with
//! the task reward and the learning phase flag, and its outputs overwrite the
//! masked-in soma parameters.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::brain::{Brain, DevelopmentConfig, SomaKind, PHASE_LEARNING, PROGRAM_OUTPUTS};
use crate::cgp::{clamp, DecodedGenotype};
use crate::error::{Error, Result};

/// A soma parameter group that activity dependence may rewrite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdTarget {
    Bias,
    Health,
    /// x and y together.
    Position,
}

impl AdTarget {
    pub const ALL: [AdTarget; 3] = [AdTarget::Bias, AdTarget::Health, AdTarget::Position];

    pub fn name(self) -> &'static str {
        match self {
            AdTarget::Bias => "bias",
            AdTarget::Health => "health",
            AdTarget::Position => "position",
        }
    }
}

/// Set of [`AdTarget`]s. Serialized as a list such as `["bias","health"]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<AdTarget>", into = "Vec<AdTarget>")]
pub struct AdMask {
    bits: u8,
}

impl AdMask {
    pub const EMPTY: AdMask = AdMask { bits: 0 };

    pub fn all() -> Self {
        AdTarget::ALL.into_iter().collect()
    }

    pub fn only(target: AdTarget) -> Self {
        [target].into_iter().collect()
    }

    pub fn contains(self, target: AdTarget) -> bool {
        self.bits & (1 << target as u8) != 0
    }

    pub fn insert(&mut self, target: AdTarget) {
        self.bits |= 1 << target as u8;
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn targets(self) -> impl Iterator<Item = AdTarget> {
        AdTarget::ALL.into_iter().filter(move |&t| self.contains(t))
    }
}

impl FromIterator<AdTarget> for AdMask {
    fn from_iter<I: IntoIterator<Item = AdTarget>>(iter: I) -> Self {
        let mut mask = AdMask::EMPTY;
        for t in iter {
            mask.insert(t);
        }
        mask
    }
}

impl From<Vec<AdTarget>> for AdMask {
    fn from(v: Vec<AdTarget>) -> Self {
        v.into_iter().collect()
    }
}

impl From<AdMask> for Vec<AdTarget> {
    fn from(m: AdMask) -> Self {
        m.targets().collect()
    }
}

impl fmt::Display for AdMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        let names: Vec<_> = self.targets().map(AdTarget::name).collect();
        f.write_str(&names.join("+"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdConfig {
    pub mask: AdMask,
    /// Learning epochs per evaluation; each epoch runs every task once.
    pub epochs: usize,
    /// Apply birth/death after an update when health is masked in.
    pub structural_updates: bool,
}

impl Default for AdConfig {
    fn default() -> Self {
        AdConfig { mask: AdMask::EMPTY, epochs: 5, structural_updates: true }
    }
}

impl AdConfig {
    pub fn with_mask(mask: AdMask) -> Self {
        AdConfig { mask, ..Default::default() }
    }
}

/// Task feedback mapped into [-1, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RewardSignal(f64);

impl RewardSignal {
    pub fn new(value: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::Contract(format!("reward {value} outside [-1, 1]")));
        }
        Ok(RewardSignal(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `2 * steps / max_steps - 1`.
pub fn reward_from_cartpole(steps: usize, max_steps: usize) -> Result<RewardSignal> {
    if max_steps == 0 || steps > max_steps {
        return Err(Error::Contract(format!("need 0 <= steps <= max_steps, max_steps > 0 (got {steps}/{max_steps})")));
    }
    RewardSignal::new(2.0 * steps as f64 / max_steps as f64 - 1.0)
}

/// `2 * correct / total - 1`.
pub fn reward_from_accuracy(correct: usize, total: usize) -> Result<RewardSignal> {
    if total == 0 || correct > total {
        return Err(Error::Contract(format!("need 0 <= correct <= total, total > 0 (got {correct}/{total})")));
    }
    RewardSignal::new(2.0 * correct as f64 / total as f64 - 1.0)
}

/// One activity-dependent update of every non-input soma.
///
/// All somas read the pre-update state; masked parameters are replaced by the
/// soma program's outputs. Output somas never move. Dendrites are untouched.
pub fn ad_update<R: Rng + ?Sized>(
    brain: &mut Brain,
    programs: &DecodedGenotype,
    config: &AdConfig,
    reward: RewardSignal,
    development: &DevelopmentConfig,
    rng: &mut R,
) {
    let mask = config.mask;
    if mask.is_empty() {
        return;
    }
    let mut scratch = Vec::new();
    let mut out = [0.0; PROGRAM_OUTPUTS];
    let updates: Vec<_> = brain
        .somas()
        .iter()
        .filter(|s| s.kind != SomaKind::Input)
        .map(|s| {
            let inputs = s.program_inputs(reward.value(), PHASE_LEARNING);
            programs
                .soma
                .execute_into(&inputs, &mut scratch, &mut out)
                .expect("soma program arity checked by Genotype::validate");
            out
        })
        .collect();

    for (soma, [x, y, health, bias]) in brain.somas_mut().iter_mut().filter(|s| s.kind != SomaKind::Input).zip(updates) {
        if mask.contains(AdTarget::Position) && soma.kind == SomaKind::Hidden {
            soma.x = clamp(x);
            soma.y = clamp(y);
        }
        if mask.contains(AdTarget::Health) {
            soma.health = clamp(health);
        }
        if mask.contains(AdTarget::Bias) {
            soma.bias = clamp(bias);
        }
    }

    if mask.contains(AdTarget::Health) && config.structural_updates {
        brain.apply_birth_death(development.theta_birth, development.theta_death, rng);
    }
}

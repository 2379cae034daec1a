//! The developmental substrate: somas and dendrites in a shared 2-D square,
//! grown by the soma and dendrite programs and wired into a feed-forward
//! network by the nearest-left rule.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cgp::{clamp, DecodedGenotype};
use crate::error::{Error, Result};

/// Soma program inputs: x, y, health, bias, mean dendrite weight,
/// mean dendrite health, reward, phase.
pub const SOMA_PROGRAM_INPUTS: usize = 8;
/// Dendrite program inputs: mother x, mother y, dendrite x, dendrite y,
/// weight, health, reward, phase.
pub const DENDRITE_PROGRAM_INPUTS: usize = 8;
/// Both programs emit four updated parameters.
pub const PROGRAM_OUTPUTS: usize = 4;

pub const INPUT_X: f64 = -1.0;
pub const OUTPUT_X: f64 = 1.0;
pub const INITIAL_HEALTH: f64 = 0.5;
/// Positional jitter applied to offspring somas and replicated dendrites.
pub const BIRTH_JITTER: f64 = 0.1;

/// Phase flag fed to the programs during development.
pub const PHASE_DEVELOPMENT: f64 = 0.0;
/// Phase flag fed to the soma program during activity-dependent learning.
pub const PHASE_LEARNING: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SomaId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SomaKind {
    Input,
    Hidden,
    Output,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dendrite {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
    pub health: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Soma {
    pub id: SomaId,
    pub kind: SomaKind,
    pub x: f64,
    pub y: f64,
    pub health: f64,
    pub bias: f64,
    pub dendrites: Vec<Dendrite>,
}

impl Soma {
    pub fn program_inputs(&self, reward: f64, phase: f64) -> [f64; SOMA_PROGRAM_INPUTS] {
        let (mean_weight, mean_health) = if self.dendrites.is_empty() {
            (0.0, 0.0)
        } else {
            let n = self.dendrites.len() as f64;
            (
                self.dendrites.iter().map(|d| d.weight).sum::<f64>() / n,
                self.dendrites.iter().map(|d| d.health).sum::<f64>() / n,
            )
        };
        [self.x, self.y, self.health, self.bias, mean_weight, mean_health, reward, phase]
    }
}

/// Name and I/O arity of one task sharing the brain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSpec {
    pub name: String,
    pub inputs: usize,
    pub outputs: usize,
}

impl TaskSpec {
    pub fn new(name: impl Into<String>, inputs: usize, outputs: usize) -> Self {
        TaskSpec { name: name.into(), inputs, outputs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskBinding {
    pub name: String,
    pub inputs: Vec<SomaId>,
    pub outputs: Vec<SomaId>,
}

/// Development parameters shared by every individual of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DevelopmentConfig {
    pub cycles: usize,
    pub theta_birth: f64,
    pub theta_death: f64,
    pub soma_cap: usize,
    pub max_dendrites: usize,
    pub init_dendrites_per_output: usize,
}

impl Default for DevelopmentConfig {
    fn default() -> Self {
        DevelopmentConfig {
            cycles: 10,
            theta_birth: 0.8,
            theta_death: 0.2,
            soma_cap: 32,
            max_dendrites: 8,
            init_dendrites_per_output: 4,
        }
    }
}

impl DevelopmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0 <= self.theta_death && self.theta_death < self.theta_birth && self.theta_birth <= 1.0) {
            return Err(Error::Config(format!(
                "need -1 <= theta_death < theta_birth <= 1 (got {} and {})",
                self.theta_death, self.theta_birth
            )));
        }
        if self.max_dendrites == 0 {
            return Err(Error::Config("max_dendrites must be >= 1".into()));
        }
        if self.init_dendrites_per_output > self.max_dendrites {
            return Err(Error::Config(format!(
                "init_dendrites_per_output ({}) exceeds max_dendrites ({})",
                self.init_dendrites_per_output, self.max_dendrites
            )));
        }
        Ok(())
    }
}

/// Identifies a task by its position in the brain's task list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TaskId(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Brain {
    somas: Vec<Soma>,
    bindings: Vec<TaskBinding>,
    soma_cap: usize,
    max_dendrites: usize,
    next_id: u32,
}

impl Brain {
    /// Lay out input somas on the left edge and output somas on the right
    /// edge, then give each output soma a few random dendrites.
    pub fn new<R: Rng + ?Sized>(tasks: &[TaskSpec], config: &DevelopmentConfig, rng: &mut R) -> Result<Brain> {
        config.validate()?;
        let total_in: usize = tasks.iter().map(|t| t.inputs).sum();
        let total_out: usize = tasks.iter().map(|t| t.outputs).sum();
        if total_in == 0 {
            return Err(Error::Config("brain needs at least one input soma".into()));
        }
        if total_out == 0 {
            return Err(Error::Config("brain needs at least one output soma".into()));
        }

        let mut somas = Vec::with_capacity(total_in + total_out);
        let mut bindings: Vec<TaskBinding> = tasks
            .iter()
            .map(|t| TaskBinding { name: t.name.clone(), inputs: Vec::new(), outputs: Vec::new() })
            .collect();
        let mut next_id = 0u32;

        let mut slot = 0;
        for (task, binding) in tasks.iter().zip(bindings.iter_mut()) {
            for _ in 0..task.inputs {
                let id = SomaId(next_id);
                next_id += 1;
                somas.push(Soma {
                    id,
                    kind: SomaKind::Input,
                    x: INPUT_X,
                    y: spaced(slot, total_in),
                    health: INITIAL_HEALTH,
                    bias: 0.0,
                    dendrites: Vec::new(),
                });
                binding.inputs.push(id);
                slot += 1;
            }
        }

        let mut slot = 0;
        for (task, binding) in tasks.iter().zip(bindings.iter_mut()) {
            for _ in 0..task.outputs {
                let id = SomaId(next_id);
                next_id += 1;
                let dendrites = (0..config.init_dendrites_per_output)
                    .map(|_| Dendrite {
                        x: rng.gen_range(-1.0..=1.0),
                        y: rng.gen_range(-1.0..=1.0),
                        weight: rng.gen_range(-1.0..=1.0),
                        health: INITIAL_HEALTH,
                    })
                    .collect();
                somas.push(Soma {
                    id,
                    kind: SomaKind::Output,
                    x: OUTPUT_X,
                    y: spaced(slot, total_out),
                    health: INITIAL_HEALTH,
                    bias: 0.0,
                    dendrites,
                });
                binding.outputs.push(id);
                slot += 1;
            }
        }

        Ok(Brain { somas, bindings, soma_cap: config.soma_cap, max_dendrites: config.max_dendrites, next_id })
    }

    pub fn somas(&self) -> &[Soma] {
        &self.somas
    }

    /// Mutable access for learning rules and tests. Callers are responsible
    /// for keeping parameters in [-1, 1].
    pub fn somas_mut(&mut self) -> &mut [Soma] {
        &mut self.somas
    }

    pub fn bindings(&self) -> &[TaskBinding] {
        &self.bindings
    }

    pub fn task_id(&self, name: &str) -> Option<TaskId> {
        self.bindings.iter().position(|b| b.name == name).map(TaskId)
    }

    pub fn soma_cap(&self) -> usize {
        self.soma_cap
    }

    pub fn max_dendrites(&self) -> usize {
        self.max_dendrites
    }

    pub fn soma(&self, id: SomaId) -> Option<&Soma> {
        self.somas.iter().find(|s| s.id == id)
    }

    pub fn count(&self, kind: SomaKind) -> usize {
        self.somas.iter().filter(|s| s.kind == kind).count()
    }

    pub fn hidden_count(&self) -> usize {
        self.count(SomaKind::Hidden)
    }

    pub fn dendrite_count(&self) -> usize {
        self.somas.iter().map(|s| s.dendrites.len()).sum()
    }

    /// Add a hidden soma directly (used by tests and tooling).
    pub fn push_hidden(&mut self, x: f64, y: f64, health: f64, bias: f64, dendrites: Vec<Dendrite>) -> SomaId {
        let id = self.fresh_id();
        self.somas.push(Soma { id, kind: SomaKind::Hidden, x, y, health, bias, dendrites });
        id
    }

    fn fresh_id(&mut self) -> SomaId {
        let id = SomaId(self.next_id);
        self.next_id += 1;
        id
    }

    /// One synchronous development cycle: every program reads the pre-step
    /// snapshot, all updates are applied together, then birth and death run.
    pub fn development_step<R: Rng + ?Sized>(
        &mut self,
        programs: &DecodedGenotype,
        config: &DevelopmentConfig,
        rng: &mut R,
    ) {
        let mut scratch = Vec::new();
        let mut soma_out = [0.0; PROGRAM_OUTPUTS];
        let mut dendrite_out = [0.0; PROGRAM_OUTPUTS];

        let mut soma_updates = Vec::with_capacity(self.somas.len());
        let mut dendrite_updates = Vec::with_capacity(self.dendrite_count());
        for soma in &self.somas {
            if soma.kind == SomaKind::Input {
                continue;
            }
            let inputs = soma.program_inputs(0.0, PHASE_DEVELOPMENT);
            programs
                .soma
                .execute_into(&inputs, &mut scratch, &mut soma_out)
                .expect("soma program arity checked by Genotype::validate");
            soma_updates.push(soma_out);
            for d in &soma.dendrites {
                let inputs = [soma.x, soma.y, d.x, d.y, d.weight, d.health, 0.0, PHASE_DEVELOPMENT];
                programs
                    .dendrite
                    .execute_into(&inputs, &mut scratch, &mut dendrite_out)
                    .expect("dendrite program arity checked by Genotype::validate");
                dendrite_updates.push(dendrite_out);
            }
        }

        let mut soma_updates = soma_updates.into_iter();
        let mut dendrite_updates = dendrite_updates.into_iter();
        for soma in self.somas.iter_mut().filter(|s| s.kind != SomaKind::Input) {
            let [x, y, health, bias] = soma_updates.next().expect("one update per soma");
            if soma.kind == SomaKind::Hidden {
                soma.x = clamp(x);
                soma.y = clamp(y);
            }
            soma.health = clamp(health);
            soma.bias = clamp(bias);
            for d in soma.dendrites.iter_mut() {
                let [x, y, weight, health] = dendrite_updates.next().expect("one update per dendrite");
                *d = Dendrite { x: clamp(x), y: clamp(y), weight: clamp(weight), health: clamp(health) };
            }
        }

        self.apply_birth_death(config.theta_birth, config.theta_death, rng);
    }

    /// Health-threshold structural rule.
    ///
    /// Order: hidden somas below `theta_death` die, then each surviving
    /// soma's dendrites die or replicate, then somas above `theta_birth`
    /// spawn one hidden child while under the soma cap.
    pub fn apply_birth_death<R: Rng + ?Sized>(&mut self, theta_birth: f64, theta_death: f64, rng: &mut R) {
        self.somas.retain(|s| !(s.kind == SomaKind::Hidden && s.health < theta_death));

        let max_dendrites = self.max_dendrites;
        for soma in self.somas.iter_mut().filter(|s| s.kind != SomaKind::Input) {
            soma.dendrites.retain(|d| d.health >= theta_death);
            let mut room = max_dendrites.saturating_sub(soma.dendrites.len());
            let mut replicas = Vec::new();
            for d in soma.dendrites.iter_mut() {
                if d.health > theta_birth && room > 0 {
                    d.health = INITIAL_HEALTH;
                    replicas.push(Dendrite {
                        x: jitter(d.x, rng),
                        y: jitter(d.y, rng),
                        weight: d.weight,
                        health: INITIAL_HEALTH,
                    });
                    room -= 1;
                }
            }
            soma.dendrites.extend(replicas);
        }

        let existing = self.somas.len();
        let mut hidden = self.hidden_count();
        for i in 0..existing {
            let parent = &self.somas[i];
            if parent.kind == SomaKind::Input || parent.health <= theta_birth || hidden >= self.soma_cap {
                continue;
            }
            let dendrites = parent
                .dendrites
                .iter()
                .map(|d| Dendrite { x: jitter(d.x, rng), y: jitter(d.y, rng), ..*d })
                .collect();
            let (x, y, bias) = (jitter(parent.x, rng), jitter(parent.y, rng), parent.bias);
            self.somas[i].health = INITIAL_HEALTH;
            let id = self.fresh_id();
            self.somas.push(Soma { id, kind: SomaKind::Hidden, x, y, health: INITIAL_HEALTH, bias, dendrites });
            hidden += 1;
        }
    }

    pub fn develop<R: Rng + ?Sized>(&mut self, programs: &DecodedGenotype, config: &DevelopmentConfig, rng: &mut R) {
        for _ in 0..config.cycles {
            self.development_step(programs, config, rng);
        }
    }

    /// Nearest-left wiring into an evaluable feed-forward network.
    pub fn wire(&self) -> WiredNetwork {
        let mut order: Vec<usize> = (0..self.somas.len()).collect();
        order.sort_by(|&a, &b| {
            let (sa, sb) = (&self.somas[a], &self.somas[b]);
            let rank = |s: &Soma| (s.kind != SomaKind::Input) as u8;
            rank(sa)
                .cmp(&rank(sb))
                .then(sa.x.total_cmp(&sb.x))
                .then(sa.id.cmp(&sb.id))
        });
        let mut position = vec![0usize; self.somas.len()];
        for (pos, &i) in order.iter().enumerate() {
            position[i] = pos;
        }

        let mut nodes = Vec::with_capacity(order.len());
        let mut edges = Vec::new();
        for &i in &order {
            let soma = &self.somas[i];
            let start = edges.len();
            if soma.kind != SomaKind::Input {
                for d in &soma.dendrites {
                    if d.x >= soma.x {
                        continue;
                    }
                    if let Some(src) = self.nearest_left(d) {
                        edges.push(Edge { source: position[src], weight: d.weight });
                    }
                }
            }
            nodes.push(WiredNode {
                id: soma.id,
                kind: soma.kind,
                x: soma.x,
                bias: soma.bias,
                edges: start..edges.len(),
            });
        }

        let index_of = |id: SomaId| {
            let i = self.somas.iter().position(|s| s.id == id).expect("binding references an existing soma");
            position[i]
        };
        let bindings = self
            .bindings
            .iter()
            .map(|b| {
                Some(WiredBinding {
                    inputs: b.inputs.iter().map(|&id| index_of(id)).collect(),
                    outputs: b.outputs.iter().map(|&id| index_of(id)).collect(),
                })
            })
            .collect();
        WiredNetwork { nodes, edges, bindings }
    }

    fn nearest_left(&self, d: &Dendrite) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (i, t) in self.somas.iter().enumerate() {
            if t.kind == SomaKind::Output || t.x >= d.x {
                continue;
            }
            let dist = (t.x - d.x).powi(2) + (t.y - d.y).powi(2);
            let better = match best {
                None => true,
                Some((bd, bi)) => {
                    let b = &self.somas[bi];
                    dist < bd || (dist == bd && (t.y < b.y || (t.y == b.y && t.id < b.id)))
                }
            };
            if better {
                best = Some((dist, i));
            }
        }
        best.map(|(_, i)| i)
    }

    /// Check every structural and numeric invariant of the brain.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Contract(msg));
        let in_range = |v: f64| (-1.0..=1.0).contains(&v);
        let mut ids: Vec<SomaId> = self.somas.iter().map(|s| s.id).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != self.somas.len() {
            return fail("duplicate soma ids".into());
        }
        if self.hidden_count() > self.soma_cap {
            return fail(format!("{} hidden somas exceed cap {}", self.hidden_count(), self.soma_cap));
        }
        for s in &self.somas {
            if ![s.x, s.y, s.health, s.bias].into_iter().all(in_range) {
                return fail(format!("soma {:?} parameter out of range", s.id));
            }
            if s.dendrites.len() > self.max_dendrites {
                return fail(format!("soma {:?} has {} dendrites", s.id, s.dendrites.len()));
            }
            for d in &s.dendrites {
                if ![d.x, d.y, d.weight, d.health].into_iter().all(in_range) {
                    return fail(format!("dendrite of soma {:?} out of range", s.id));
                }
            }
            match s.kind {
                SomaKind::Input if s.x != INPUT_X || !s.dendrites.is_empty() => {
                    return fail(format!("input soma {:?} moved or grew dendrites", s.id));
                }
                SomaKind::Output if s.x != OUTPUT_X => {
                    return fail(format!("output soma {:?} moved", s.id));
                }
                _ => {}
            }
        }
        for b in &self.bindings {
            for id in b.inputs.iter().chain(&b.outputs) {
                if self.soma(*id).is_none() {
                    return fail(format!("task {} references missing soma {id:?}", b.name));
                }
            }
        }
        Ok(())
    }

    pub fn snapshot(&self) -> BrainSnapshot {
        BrainSnapshot {
            somas: self
                .somas
                .iter()
                .map(|s| SomaRecord { id: s.id, kind: s.kind, x: s.x, y: s.y, health: s.health, bias: s.bias })
                .collect(),
            dendrites: self
                .somas
                .iter()
                .flat_map(|s| {
                    s.dendrites.iter().map(move |d| DendriteRecord {
                        mother: s.id,
                        x: d.x,
                        y: d.y,
                        weight: d.weight,
                        health: d.health,
                    })
                })
                .collect(),
        }
    }
}

/// Centre of slot `i` when `[-1, 1]` is split into `n` equal slots.
fn spaced(i: usize, n: usize) -> f64 {
    -1.0 + (2 * i + 1) as f64 / n as f64
}

fn jitter<R: Rng + ?Sized>(v: f64, rng: &mut R) -> f64 {
    clamp(v + rng.gen_range(-BIRTH_JITTER..=BIRTH_JITTER))
}

/// JSON dump of a brain for debugging.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrainSnapshot {
    pub somas: Vec<SomaRecord>,
    pub dendrites: Vec<DendriteRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SomaRecord {
    pub id: SomaId,
    pub kind: SomaKind,
    pub x: f64,
    pub y: f64,
    pub health: f64,
    pub bias: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DendriteRecord {
    pub mother: SomaId,
    pub x: f64,
    pub y: f64,
    pub weight: f64,
    pub health: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    /// Index of the source node in evaluation order.
    pub source: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WiredNode {
    pub id: SomaId,
    pub kind: SomaKind,
    pub x: f64,
    pub bias: f64,
    edges: std::ops::Range<usize>,
}

#[derive(Clone, Debug, PartialEq)]
struct WiredBinding {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

/// Feed-forward phenotype. Nodes are stored in evaluation order: input somas
/// first, then the rest by ascending x. Every edge reads an earlier node.
#[derive(Clone, Debug, PartialEq)]
pub struct WiredNetwork {
    nodes: Vec<WiredNode>,
    edges: Vec<Edge>,
    bindings: Vec<Option<WiredBinding>>,
}

impl WiredNetwork {
    pub fn nodes(&self) -> &[WiredNode] {
        &self.nodes
    }

    pub fn edges_of(&self, node: usize) -> &[Edge] {
        &self.edges[self.nodes[node].edges.clone()]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn task_count(&self) -> usize {
        self.bindings.len()
    }

    pub fn task_inputs(&self, task: TaskId) -> Option<usize> {
        self.binding(task).ok().map(|b| b.inputs.len())
    }

    /// Node indices of `task`'s output somas.
    pub fn task_output_nodes(&self, task: TaskId) -> Result<&[usize]> {
        Ok(&self.binding(task)?.outputs)
    }

    /// Every node's activation when `task`'s inputs are fed, in node order.
    pub fn activations(&self, task: TaskId, inputs: &[f64]) -> Result<Vec<f64>> {
        let mut values = Vec::new();
        let mut out = vec![0.0; self.binding(task)?.outputs.len()];
        self.evaluate_into(task, inputs, &mut values, &mut out)?;
        Ok(values)
    }

    fn binding(&self, task: TaskId) -> Result<&WiredBinding> {
        self.bindings
            .get(task.0)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Contract(format!("task {} is not bound in this network", task.0)))
    }

    /// Masked-input evaluation: only `task`'s input somas carry signal, every
    /// other input soma emits zero.
    pub fn evaluate(&self, task: TaskId, inputs: &[f64]) -> Result<Vec<f64>> {
        let mut scratch = Vec::new();
        let mut out = vec![0.0; self.binding(task)?.outputs.len()];
        self.evaluate_into(task, inputs, &mut scratch, &mut out)?;
        Ok(out)
    }

    pub fn evaluate_into(&self, task: TaskId, inputs: &[f64], values: &mut Vec<f64>, out: &mut [f64]) -> Result<()> {
        let binding = self.binding(task)?;
        if inputs.len() != binding.inputs.len() {
            return Err(Error::Contract(format!(
                "task {} expects {} inputs, got {}",
                task.0,
                binding.inputs.len(),
                inputs.len()
            )));
        }
        if out.len() != binding.outputs.len() {
            return Err(Error::Contract(format!(
                "task {} has {} outputs, buffer holds {}",
                task.0,
                binding.outputs.len(),
                out.len()
            )));
        }
        values.clear();
        values.resize(self.nodes.len(), 0.0);
        for (&node, &v) in binding.inputs.iter().zip(inputs) {
            values[node] = v;
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.kind == SomaKind::Input {
                continue;
            }
            let mut acc = node.bias;
            for e in &self.edges[node.edges.clone()] {
                acc += e.weight * values[e.source];
            }
            values[i] = acc.tanh();
        }
        for (o, &node) in out.iter_mut().zip(&binding.outputs) {
            *o = values[node];
        }
        Ok(())
    }

    /// Ancestor closure of `task`'s outputs (plus the task's own input
    /// somas), with node and edge order preserved. Other tasks are unbound in
    /// the result.
    pub fn trace_subnetwork(&self, task: TaskId) -> Result<WiredNetwork> {
        let binding = self.binding(task)?;
        let mut keep = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = binding.outputs.clone();
        while let Some(i) = stack.pop() {
            if keep[i] {
                continue;
            }
            keep[i] = true;
            stack.extend(self.edges_of(i).iter().map(|e| e.source).filter(|&s| !keep[s]));
        }
        for &i in &binding.inputs {
            keep[i] = true;
        }

        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            remap[i] = nodes.len();
            let start = edges.len();
            edges.extend(self.edges_of(i).iter().map(|e| Edge { source: remap[e.source], weight: e.weight }));
            nodes.push(WiredNode { edges: start..edges.len(), ..node.clone() });
        }
        let mut bindings = vec![None; self.bindings.len()];
        bindings[task.0] = Some(WiredBinding {
            inputs: binding.inputs.iter().map(|&i| remap[i]).collect(),
            outputs: binding.outputs.iter().map(|&i| remap[i]).collect(),
        });
        Ok(WiredNetwork { nodes, edges, bindings })
    }
}

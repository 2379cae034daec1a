//! Cartesian Genetic Programming: integer-gene genomes encoding feed-forward
//! programs over the closed interval [-1, 1].
//!
//! Source indices address program inputs first (`0..num_inputs`) and then
//! nodes (`num_inputs + position`). A node may only read sources with a
//! smaller index, so every genome is acyclic by construction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GENOME_LENGTH: usize = 64;
pub const DEFAULT_MUTATION_RATE: f64 = 0.05;

/// Denominators smaller than this make division return its numerator.
const DIV_GUARD: f64 = 1e-6;

#[inline]
pub fn clamp(v: f64) -> f64 {
    v.clamp(-1.0, 1.0)
}

/// Primitive function set. Discriminants are the function ids stored in genes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Function {
    Add = 0,
    Sub,
    Mul,
    Div,
    Abs,
    Neg,
    Min,
    Max,
    Step,
    Tanh,
    One,
    Zero,
}

impl Function {
    pub const ALL: [Function; 12] = [
        Function::Add,
        Function::Sub,
        Function::Mul,
        Function::Div,
        Function::Abs,
        Function::Neg,
        Function::Min,
        Function::Max,
        Function::Step,
        Function::Tanh,
        Function::One,
        Function::Zero,
    ];

    pub const COUNT: u8 = Self::ALL.len() as u8;

    pub fn from_id(id: u8) -> Option<Function> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn arity(self) -> usize {
        use Function::*;
        match self {
            Add | Sub | Mul | Div | Min | Max => 2,
            Abs | Neg | Step | Tanh => 1,
            One | Zero => 0,
        }
    }

    /// Evaluate on arguments already in [-1, 1]. The result is always in [-1, 1].
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        use Function::*;
        match self {
            Add => clamp(a + b),
            Sub => clamp(a - b),
            Mul => clamp(a * b),
            Div => {
                if b.abs() < DIV_GUARD {
                    a
                } else {
                    clamp(a / b)
                }
            }
            Abs => a.abs(),
            Neg => -a,
            Min => a.min(b),
            Max => a.max(b),
            Step => {
                if a > 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Tanh => a.tanh(),
            One => 1.0,
            Zero => 0.0,
        }
    }
}

/// One node of the CGP grid. Unary and nullary functions ignore the unused
/// connection genes, which stay in the genome and can become active after a
/// later function mutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct NodeGene {
    pub function_id: u8,
    pub in_a: usize,
    pub in_b: usize,
}

impl NodeGene {
    pub fn new(function: Function, in_a: usize, in_b: usize) -> Self {
        NodeGene { function_id: function.id(), in_a, in_b }
    }

    pub fn function(&self) -> Function {
        Function::from_id(self.function_id).expect("function id validated on construction")
    }
}

impl From<[usize; 3]> for NodeGene {
    fn from([f, a, b]: [usize; 3]) -> Self {
        // Out-of-range ids are rejected by `CgpGenome::validate` during deserialization.
        NodeGene { function_id: u8::try_from(f).unwrap_or(u8::MAX), in_a: a, in_b: b }
    }
}

impl From<NodeGene> for [usize; 3] {
    fn from(g: NodeGene) -> Self {
        [g.function_id as usize, g.in_a, g.in_b]
    }
}

#[derive(Deserialize)]
struct RawGenome {
    inputs: usize,
    outputs: usize,
    nodes: Vec<NodeGene>,
    output_genes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGenome")]
pub struct CgpGenome {
    #[serde(rename = "inputs")]
    num_inputs: usize,
    #[serde(rename = "outputs")]
    num_outputs: usize,
    nodes: Vec<NodeGene>,
    output_genes: Vec<usize>,
}

impl TryFrom<RawGenome> for CgpGenome {
    type Error = Error;

    fn try_from(raw: RawGenome) -> Result<Self> {
        CgpGenome::from_parts(raw.inputs, raw.outputs, raw.nodes, raw.output_genes)
    }
}

impl CgpGenome {
    /// Build a genome from explicit genes, checking every invariant.
    pub fn from_parts(
        num_inputs: usize,
        num_outputs: usize,
        nodes: Vec<NodeGene>,
        output_genes: Vec<usize>,
    ) -> Result<Self> {
        let genome = CgpGenome { num_inputs, num_outputs, nodes, output_genes };
        genome.validate()?;
        Ok(genome)
    }

    pub fn random<R: Rng + ?Sized>(
        num_inputs: usize,
        num_outputs: usize,
        genome_length: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if num_inputs == 0 || num_outputs == 0 {
            return Err(Error::Config(format!(
                "CGP arities must be >= 1 (got {num_inputs} inputs, {num_outputs} outputs)"
            )));
        }
        if genome_length == 0 {
            return Err(Error::Config("CGP genome length must be >= 1".into()));
        }
        let nodes = (0..genome_length)
            .map(|pos| random_node(num_inputs + pos, rng))
            .collect();
        let sources = num_inputs + genome_length;
        let output_genes = (0..num_outputs).map(|_| rng.gen_range(0..sources)).collect();
        Ok(CgpGenome { num_inputs, num_outputs, nodes, output_genes })
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_inputs == 0 || self.num_outputs == 0 || self.nodes.is_empty() {
            return Err(Error::Config("CGP genome needs >= 1 input, output and node".into()));
        }
        for (pos, node) in self.nodes.iter().enumerate() {
            let limit = self.num_inputs + pos;
            if Function::from_id(node.function_id).is_none() {
                return Err(Error::Config(format!(
                    "node {pos}: function id {} out of range",
                    node.function_id
                )));
            }
            if node.in_a >= limit || node.in_b >= limit {
                return Err(Error::Config(format!(
                    "node {pos}: connection ({}, {}) must be < {limit}",
                    node.in_a, node.in_b
                )));
            }
        }
        if self.output_genes.len() != self.num_outputs {
            return Err(Error::Config(format!(
                "expected {} output genes, found {}",
                self.num_outputs,
                self.output_genes.len()
            )));
        }
        let sources = self.num_sources();
        if let Some(bad) = self.output_genes.iter().find(|&&o| o >= sources) {
            return Err(Error::Config(format!("output gene {bad} must be < {sources}")));
        }
        Ok(())
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    pub fn nodes(&self) -> &[NodeGene] {
        &self.nodes
    }

    pub fn output_genes(&self) -> &[usize] {
        &self.output_genes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn num_sources(&self) -> usize {
        self.num_inputs + self.nodes.len()
    }

    /// Per-gene point mutation. Each function gene, connection gene and
    /// output gene is independently resampled from its legal range with
    /// probability `rate`.
    pub fn mutate<R: Rng + ?Sized>(&self, rate: f64, rng: &mut R) -> CgpGenome {
        let rate = rate.clamp(0.0, 1.0);
        let mut child = self.clone();
        for (pos, node) in child.nodes.iter_mut().enumerate() {
            let limit = self.num_inputs + pos;
            if rng.gen_bool(rate) {
                node.function_id = rng.gen_range(0..Function::COUNT);
            }
            if rng.gen_bool(rate) {
                node.in_a = rng.gen_range(0..limit);
            }
            if rng.gen_bool(rate) {
                node.in_b = rng.gen_range(0..limit);
            }
        }
        let sources = self.num_sources();
        for out in child.output_genes.iter_mut() {
            if rng.gen_bool(rate) {
                *out = rng.gen_range(0..sources);
            }
        }
        child
    }

    /// Extract the active subgraph in ascending node order.
    pub fn decode(&self) -> ActiveProgram {
        let n_in = self.num_inputs;
        let mut active = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self.output_genes.iter().copied().filter(|&s| s >= n_in).collect();
        while let Some(src) = stack.pop() {
            let pos = src - n_in;
            if active[pos] {
                continue;
            }
            active[pos] = true;
            let node = &self.nodes[pos];
            let arity = node.function().arity();
            if arity >= 1 && node.in_a >= n_in {
                stack.push(node.in_a);
            }
            if arity == 2 && node.in_b >= n_in {
                stack.push(node.in_b);
            }
        }

        // Compact slots: inputs keep their indices, active nodes follow in order.
        let mut slot = vec![usize::MAX; self.num_sources()];
        for (i, s) in slot.iter_mut().take(n_in).enumerate() {
            *s = i;
        }
        let mut steps = Vec::new();
        for (pos, node) in self.nodes.iter().enumerate() {
            if !active[pos] {
                continue;
            }
            let function = node.function();
            let arity = function.arity();
            let a = if arity >= 1 { slot[node.in_a] } else { 0 };
            let b = if arity == 2 { slot[node.in_b] } else { 0 };
            slot[n_in + pos] = n_in + steps.len();
            steps.push(ActiveNode { position: pos, function, a, b });
        }
        let outputs = self.output_genes.iter().map(|&o| slot[o]).collect();
        ActiveProgram { num_inputs: n_in, steps, outputs }
    }
}

fn random_node<R: Rng + ?Sized>(limit: usize, rng: &mut R) -> NodeGene {
    NodeGene {
        function_id: rng.gen_range(0..Function::COUNT),
        in_a: rng.gen_range(0..limit),
        in_b: rng.gen_range(0..limit),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActiveNode {
    /// Position of the node in the original genome.
    pub position: usize,
    pub function: Function,
    a: usize,
    b: usize,
}

/// Decoded program: active nodes in evaluation order, operands addressed by
/// compact slot (inputs first, then active nodes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveProgram {
    num_inputs: usize,
    steps: Vec<ActiveNode>,
    outputs: Vec<usize>,
}

impl ActiveProgram {
    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn active_nodes(&self) -> &[ActiveNode] {
        &self.steps
    }

    /// Genome positions of the active nodes, ascending.
    pub fn active_positions(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.position).collect()
    }

    pub fn execute(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.outputs.len()];
        let mut scratch = Vec::new();
        self.execute_into(inputs, &mut scratch, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`execute`](Self::execute) for hot loops.
    pub fn execute_into(&self, inputs: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) -> Result<()> {
        if inputs.len() != self.num_inputs {
            return Err(Error::Contract(format!(
                "program expects {} inputs, got {}",
                self.num_inputs,
                inputs.len()
            )));
        }
        if out.len() != self.outputs.len() {
            return Err(Error::Contract(format!(
                "program produces {} outputs, buffer holds {}",
                self.outputs.len(),
                out.len()
            )));
        }
        scratch.clear();
        scratch.extend(inputs.iter().map(|&v| clamp(v)));
        for step in &self.steps {
            let v = step.function.apply(scratch[step.a], scratch[step.b]);
            scratch.push(v);
        }
        for (o, &slot) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[slot];
        }
        Ok(())
    }
}

/// Soma and dendrite developmental programs of one individual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genotype {
    #[serde(rename = "soma")]
    pub soma_genome: CgpGenome,
    #[serde(rename = "dendrite")]
    pub dendrite_genome: CgpGenome,
}

impl Genotype {
    pub fn random<R: Rng + ?Sized>(genome_length: usize, rng: &mut R) -> Result<Self> {
        use crate::brain::{DENDRITE_PROGRAM_INPUTS, PROGRAM_OUTPUTS, SOMA_PROGRAM_INPUTS};
        Ok(Genotype {
            soma_genome: CgpGenome::random(SOMA_PROGRAM_INPUTS, PROGRAM_OUTPUTS, genome_length, rng)?,
            dendrite_genome: CgpGenome::random(DENDRITE_PROGRAM_INPUTS, PROGRAM_OUTPUTS, genome_length, rng)?,
        })
    }

    pub fn mutate<R: Rng + ?Sized>(&self, rate: f64, rng: &mut R) -> Genotype {
        Genotype {
            soma_genome: self.soma_genome.mutate(rate, rng),
            dendrite_genome: self.dendrite_genome.mutate(rate, rng),
        }
    }

    /// Check the program arities against the brain's I/O contract.
    pub fn validate(&self) -> Result<()> {
        use crate::brain::{DENDRITE_PROGRAM_INPUTS, PROGRAM_OUTPUTS, SOMA_PROGRAM_INPUTS};
        self.soma_genome.validate()?;
        self.dendrite_genome.validate()?;
        let arity = |g: &CgpGenome| (g.num_inputs(), g.num_outputs());
        if arity(&self.soma_genome) != (SOMA_PROGRAM_INPUTS, PROGRAM_OUTPUTS)
            || arity(&self.dendrite_genome) != (DENDRITE_PROGRAM_INPUTS, PROGRAM_OUTPUTS)
        {
            return Err(Error::Config("genotype program arities do not match the brain I/O contract".into()));
        }
        Ok(())
    }

    pub fn decode(&self) -> DecodedGenotype {
        DecodedGenotype { soma: self.soma_genome.decode(), dendrite: self.dendrite_genome.decode() }
    }
}

#[derive(Clone, Debug)]
pub struct DecodedGenotype {
    pub soma: ActiveProgram,
    pub dendrite: ActiveProgram,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    /// Evaluates straight off the raw gene list, recursing from each output.
    fn naive_eval(genome: &CgpGenome, inputs: &[f64]) -> Vec<f64> {
        fn value(genome: &CgpGenome, inputs: &[f64], src: usize) -> f64 {
            if src < genome.num_inputs() {
                return inputs[src];
            }
            let node = genome.nodes()[src - genome.num_inputs()];
            let f = Function::from_id(node.function_id).unwrap();
            let a = if f.arity() >= 1 { value(genome, inputs, node.in_a) } else { 0.0 };
            let b = if f.arity() == 2 { value(genome, inputs, node.in_b) } else { 0.0 };
            f.apply(a, b)
        }
        genome.output_genes().iter().map(|&o| value(genome, inputs, o)).collect()
    }

    fn two_node() -> CgpGenome {
        // n0 = add(in0, in1); n1 = mult(n0, in0)
        CgpGenome::from_parts(
            2,
            1,
            vec![NodeGene::new(Function::Add, 0, 1), NodeGene::new(Function::Mul, 2, 0)],
            vec![3],
        )
        .unwrap()
    }

    #[test]
    fn random_genome_respects_feed_forward_limits() {
        let g = CgpGenome::random(8, 4, 64, &mut rng::from_seed(1)).unwrap();
        assert_eq!(g.len(), 64);
        for (i, n) in g.nodes().iter().enumerate() {
            assert!(n.in_a < i + 8 && n.in_b < i + 8);
        }
        g.validate().unwrap();
    }

    #[test]
    fn single_node_genome_reads_input_zero() {
        let g = CgpGenome::random(1, 1, 1, &mut rng::from_seed(7)).unwrap();
        assert_eq!((g.nodes()[0].in_a, g.nodes()[0].in_b), (0, 0));
    }

    #[test]
    fn random_genome_is_seed_deterministic() {
        let a = CgpGenome::random(8, 4, 64, &mut rng::from_seed(3)).unwrap();
        let b = CgpGenome::random(8, 4, 64, &mut rng::from_seed(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_genome_rejects_bad_shapes() {
        let mut r = rng::from_seed(0);
        assert!(matches!(CgpGenome::random(0, 1, 4, &mut r), Err(Error::Config(_))));
        assert!(matches!(CgpGenome::random(1, 0, 4, &mut r), Err(Error::Config(_))));
        assert!(matches!(CgpGenome::random(1, 1, 0, &mut r), Err(Error::Config(_))));
    }

    #[test]
    fn decode_with_outputs_on_inputs_is_empty() {
        let g = CgpGenome::from_parts(2, 1, vec![NodeGene::new(Function::Add, 0, 1)], vec![0]).unwrap();
        assert!(g.decode().active_nodes().is_empty());
    }

    #[test]
    fn decode_two_node_chain() {
        assert_eq!(two_node().decode().active_positions(), vec![0, 1]);
    }

    #[test]
    fn decode_skips_unreferenced_node() {
        let nodes = vec![
            NodeGene::new(Function::Add, 0, 1),
            NodeGene::new(Function::Neg, 2, 0),
            NodeGene::new(Function::Mul, 1, 1),
        ];
        // in_b of the unary Neg node is silent: node 2 is not reachable through it.
        let g = CgpGenome::from_parts(2, 1, nodes, vec![3]).unwrap();
        assert_eq!(g.decode().active_positions(), vec![0, 1]);
    }

    #[test]
    fn execute_two_node_chain_by_hand() {
        let out = two_node().decode().execute(&[0.5, 0.25]).unwrap();
        assert_eq!(out, vec![0.375]);
        let n0 = CgpGenome::from_parts(2, 1, two_node().nodes().to_vec(), vec![2]).unwrap();
        assert_eq!(n0.decode().execute(&[0.5, 0.25]).unwrap(), vec![0.75]);
    }

    #[test]
    fn add_clamps_at_one() {
        assert_eq!(Function::Add.apply(0.7, 0.7), 1.0);
        assert_eq!(Function::Sub.apply(-0.7, 0.7), -1.0);
    }

    #[test]
    fn protected_division() {
        assert_eq!(Function::Div.apply(0.3, 0.0), 0.3);
        assert_eq!(Function::Div.apply(0.3, 5e-7), 0.3);
        assert_eq!(Function::Div.apply(0.5, 0.25), 1.0);
        assert_eq!(Function::Div.apply(0.1, -0.5), -0.2);
    }

    #[test]
    fn identity_outputs_pass_zero_through() {
        let g = CgpGenome::from_parts(3, 3, vec![NodeGene::new(Function::One, 0, 0)], vec![0, 1, 2]).unwrap();
        assert_eq!(g.decode().execute(&[0.0; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn execute_rejects_wrong_arity() {
        let p = two_node().decode();
        assert!(matches!(p.execute(&[0.1]), Err(Error::Contract(_))));
    }

    #[test]
    fn zero_rate_mutation_is_identity() {
        let g = CgpGenome::random(8, 4, 64, &mut rng::from_seed(5)).unwrap();
        assert_eq!(g.mutate(0.0, &mut rng::from_seed(6)), g);
    }

    #[test]
    fn full_rate_mutation_keeps_invariants() {
        let g = CgpGenome::random(8, 4, 64, &mut rng::from_seed(5)).unwrap();
        let m = g.mutate(1.0, &mut rng::from_seed(6));
        m.validate().unwrap();
        assert_ne!(m, g);
    }

    #[test]
    fn mutation_is_reproducible_and_pure() {
        let g = CgpGenome::random(8, 4, 64, &mut rng::from_seed(5)).unwrap();
        let before = g.clone();
        let a = g.mutate(0.05, &mut rng::from_seed(11));
        let b = g.mutate(0.05, &mut rng::from_seed(11));
        assert_eq!(a, b);
        assert_eq!(g, before);
    }

    #[test]
    fn decode_is_idempotent() {
        let g = CgpGenome::random(8, 4, 64, &mut rng::from_seed(12)).unwrap();
        assert_eq!(g.decode(), g.decode());
    }

    #[test]
    fn decode_execute_matches_naive_evaluator_on_1000_genomes() {
        let mut r = rng::from_seed(2024);
        for _ in 0..1000 {
            let n_in = r.gen_range(1..10);
            let n_out = r.gen_range(1..6);
            let len = r.gen_range(1..80);
            let g = CgpGenome::random(n_in, n_out, len, &mut r).unwrap();
            let inputs: Vec<f64> = (0..n_in).map(|_| r.gen_range(-1.0..=1.0)).collect();
            let fast = g.decode().execute(&inputs).unwrap();
            let slow = naive_eval(&g, &inputs);
            assert_eq!(fast, slow, "genome {g:?}");
        }
    }

    #[test]
    fn json_shape_and_roundtrip() {
        let g = two_node();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"inputs": 2, "outputs": 1, "nodes": [[0, 0, 1], [2, 2, 0]], "output_genes": [3]})
        );
        let back: CgpGenome = serde_json::from_value(v).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_rejects_forward_reference() {
        let bad = serde_json::json!({"inputs": 2, "outputs": 1, "nodes": [[0, 2, 1]], "output_genes": [2]});
        assert!(serde_json::from_value::<CgpGenome>(bad).is_err());
        let bad_fn = serde_json::json!({"inputs": 2, "outputs": 1, "nodes": [[12, 0, 1]], "output_genes": [2]});
        assert!(serde_json::from_value::<CgpGenome>(bad_fn).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn execute_output_stays_bounded(
            seed in any::<u64>(),
            inputs in proptest::collection::vec(-1.0f64..=1.0, 8),
        ) {
            let g = CgpGenome::random(8, 4, 64, &mut rng::from_seed(seed)).unwrap();
            for v in g.decode().execute(&inputs).unwrap() {
                prop_assert!((-1.0..=1.0).contains(&v));
            }
        }
    }

    proptest! {
        #[test]
        fn mutation_never_breaks_feed_forward(seed in any::<u64>(), rate in 0.0f64..=1.0) {
            let mut r = rng::from_seed(seed);
            let g = CgpGenome::random(8, 4, 32, &mut r).unwrap();
            let m = g.mutate(rate, &mut r);
            for (i, n) in m.nodes().iter().enumerate() {
                prop_assert!(n.in_a < i + 8 && n.in_b < i + 8);
            }
            prop_assert!(m.validate().is_ok());
        }
    }
}

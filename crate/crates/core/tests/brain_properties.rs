use devann_core::brain::{Brain, DevelopmentConfig, SomaKind, TaskId, TaskSpec};
use devann_core::cgp::Genotype;
use devann_core::learning::{ad_update, AdConfig, AdMask, AdTarget, RewardSignal};
use devann_core::rng;
use proptest::prelude::*;
use rand::Rng;

fn tasks() -> Vec<TaskSpec> {
    vec![TaskSpec::new("cartpole", 4, 1), TaskSpec::new("classification", 4, 1)]
}

fn developed(seed: u64, config: &DevelopmentConfig) -> (Brain, Genotype) {
    let genotype = Genotype::random(64, &mut rng::stream(seed, &[0])).unwrap();
    let mut brain = Brain::new(&tasks(), config, &mut rng::stream(seed, &[1])).unwrap();
    brain.develop(&genotype.decode(), config, &mut rng::stream(seed, &[2]));
    (brain, genotype)
}

fn assert_bounded(brain: &Brain) {
    for s in brain.somas() {
        for v in [s.x, s.y, s.health, s.bias] {
            assert!((-1.0..=1.0).contains(&v), "soma {:?} parameter {v} out of range", s.id);
        }
        for d in &s.dendrites {
            for v in [d.x, d.y, d.weight, d.health] {
                assert!((-1.0..=1.0).contains(&v), "dendrite parameter {v} out of range");
            }
        }
    }
}

#[test]
fn wired_phenotypes_are_acyclic() {
    let config = DevelopmentConfig::default();
    let mut edges = 0;
    for seed in 0..1000 {
        let (brain, _) = developed(seed, &config);
        let net = brain.wire();
        for (i, node) in net.nodes().iter().enumerate() {
            for e in net.edges_of(i) {
                let src = &net.nodes()[e.source];
                assert!(e.source < i, "seed {seed}: edge into node {i} reads later node {}", e.source);
                assert!(src.x < node.x, "seed {seed}: edge does not point rightwards");
                assert_ne!(src.kind, SomaKind::Output, "seed {seed}: output soma used as a source");
                edges += 1;
            }
        }
    }
    assert!(edges > 0, "no developed brain had any connection");
}

#[test]
fn masked_evaluation_equals_traced_subnetwork() {
    let config = DevelopmentConfig::default();
    let mut r = rng::from_seed(99);
    let mut nontrivial = 0;
    for seed in 0..100 {
        let (brain, _) = developed(seed, &config);
        let net = brain.wire();
        for task in [TaskId(0), TaskId(1)] {
            let sub = net.trace_subnetwork(task).unwrap();
            assert!(sub.nodes().len() <= net.nodes().len());
            if sub.edge_count() > 0 {
                nontrivial += 1;
            }
            for _ in 0..5 {
                let inputs: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..=1.0)).collect();
                assert_eq!(net.evaluate(task, &inputs).unwrap(), sub.evaluate(task, &inputs).unwrap(), "seed {seed}");
            }
        }
    }
    assert!(nontrivial > 0);
}

#[test]
fn development_is_reproducible() {
    let config = DevelopmentConfig::default();
    for seed in 0..20 {
        assert_eq!(developed(seed, &config).0.snapshot(), developed(seed, &config).0.snapshot());
    }
}

#[test]
fn caps_hold_for_tight_limits() {
    let config = DevelopmentConfig { soma_cap: 3, max_dendrites: 2, init_dendrites_per_output: 2, ..Default::default() };
    let mut saw_full = false;
    for seed in 0..300 {
        let (brain, _) = developed(seed, &config);
        assert!(brain.hidden_count() <= 3);
        assert!(brain.somas().iter().all(|s| s.dendrites.len() <= 2));
        saw_full |= brain.hidden_count() == 3;
        brain.check_invariants().unwrap();
    }
    assert!(saw_full, "cap was never reached, so it was never exercised");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parameters_stay_bounded(seed in any::<u64>(), cycles in 0usize..25, ad_steps in 0usize..6, mask_bits in 0u8..8, reward in -1.0f64..=1.0) {
        let config = DevelopmentConfig { cycles, ..Default::default() };
        let (mut brain, genotype) = developed(seed, &config);
        assert_bounded(&brain);
        brain.check_invariants().unwrap();

        let mask: AdMask = AdTarget::ALL.into_iter().filter(|&t| mask_bits & (1 << t as u8) != 0).collect();
        let ad = AdConfig::with_mask(mask);
        let programs = genotype.decode();
        let outputs_before: Vec<_> = brain.somas().iter().filter(|s| s.kind == SomaKind::Output).map(|s| (s.id, s.x, s.y)).collect();
        let mut r = rng::stream(seed, &[3]);
        for _ in 0..ad_steps {
            ad_update(&mut brain, &programs, &ad, RewardSignal::new(reward).unwrap(), &config, &mut r);
            assert_bounded(&brain);
            brain.check_invariants().unwrap();
        }
        let outputs_after: Vec<_> = brain.somas().iter().filter(|s| s.kind == SomaKind::Output).map(|s| (s.id, s.x, s.y)).collect();
        prop_assert_eq!(outputs_before, outputs_after);
        prop_assert!(brain.hidden_count() <= config.soma_cap);
    }
}

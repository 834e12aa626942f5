//! Synthetic circuit generators for fixtures, tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netlist::{AigBuilder, Lit, Netlist, Reset};

fn counter_bits(b: &mut AigBuilder, bits: usize, enable: bool) -> Vec<Lit> {
    let regs: Vec<Lit> = (0..bits).map(|_| b.latch(Reset::Zero)).collect();
    let mut carry = if enable { b.input() } else { Lit::TRUE };
    for &r in &regs {
        let next = b.xor(r, carry);
        let c = b.and(r, carry);
        b.set_next(r, next);
        carry = c;
    }
    regs
}

/// A `bits`-wide counter starting at 0 with one bad output that fires when
/// the counter equals `target`. With `enable`, an input gates each step.
pub fn counter(bits: usize, target: u64, enable: bool) -> Netlist {
    let mut b = AigBuilder::new();
    let regs = counter_bits(&mut b, bits, enable);
    let bad = b.equals_const(&regs, target);
    b.bad(bad);
    b.build(format!("counter{bits}_{target}")).expect("generator output is well formed")
}

/// Two independent enabled counters, one property each.
pub fn two_counters(bits: usize, target_a: u64, target_b: u64) -> Netlist {
    let mut b = AigBuilder::new();
    let a = counter_bits(&mut b, bits, true);
    let c = counter_bits(&mut b, bits, true);
    let bad_a = b.equals_const(&a, target_a);
    let bad_b = b.equals_const(&c, target_b);
    b.bad(bad_a);
    b.bad(bad_b);
    b.build(format!("two_counters{bits}_{target_a}_{target_b}"))
        .expect("generator output is well formed")
}

/// Copies every bad literal of `base` `copies` times in a row.
pub fn duplicated_properties(base: &Netlist, copies: usize) -> Netlist {
    let bads: Vec<Lit> = base
        .properties()
        .iter()
        .flat_map(|&p| std::iter::repeat_n(p, copies))
        .collect();
    Netlist::new(
        format!("{}_x{copies}", base.name),
        base.max_var(),
        base.inputs().to_vec(),
        base.latches().to_vec(),
        Vec::new(),
        bads,
        base.ands().to_vec(),
    )
    .expect("same structure as base")
}

fn mixer_step(
    b: &mut AigBuilder,
    rng: &mut ChaCha8Rng,
    regs: &[Lit],
    inputs: &[Lit],
    terms: usize,
) -> Vec<Lit> {
    let pool: Vec<Lit> = regs.iter().chain(inputs).copied().collect();
    let pick = |rng: &mut ChaCha8Rng| {
        let l = pool[rng.gen_range(0..pool.len())];
        if rng.gen_bool(0.5) {
            !l
        } else {
            l
        }
    };
    let mut nexts = Vec::with_capacity(regs.len());
    for &r in regs {
        let mut acc = r;
        for _ in 0..terms {
            let x = pick(rng);
            let y = pick(rng);
            let t = b.and(x, y);
            acc = b.xor(acc, t);
        }
        nexts.push(acc);
    }
    nexts
}

/// Drawn once per seed so that both copies of a miter share the same
/// transition function.
#[derive(Debug, Clone)]
struct MixerShape {
    seed: u64,
    state_bits: usize,
    terms: usize,
}

fn build_mixer(b: &mut AigBuilder, shape: &MixerShape, inputs: &[Lit], init: u64) -> Vec<Lit> {
    let mut rng = ChaCha8Rng::seed_from_u64(shape.seed);
    let regs: Vec<Lit> = (0..shape.state_bits)
        .map(|i| b.latch(if init >> i & 1 == 1 { Reset::One } else { Reset::Zero }))
        .collect();
    let nexts = mixer_step(b, &mut rng, &regs, inputs, shape.terms);
    for (&r, &n) in regs.iter().zip(&nexts) {
        b.set_next(r, n);
    }
    regs
}

/// A nonlinear state machine whose register must be steered to a target
/// value; `copies` properties share the exact same bad literal.
///
/// The target is the state reached after `depth` steps under a seeded
/// input sequence, so the property is falsifiable at `depth` or earlier.
pub fn steering_puzzle(seed: u64, state_bits: usize, input_bits: usize, depth: usize, copies: usize) -> Netlist {
    let shape = MixerShape {
        seed,
        state_bits,
        terms: 3,
    };
    let mut b = AigBuilder::new();
    let inputs: Vec<Lit> = (0..input_bits).map(|_| b.input()).collect();
    let regs = build_mixer(&mut b, &shape, &inputs, 0);
    // The probe is an identical machine exposing its registers as outputs.
    let probe = {
        let mut p = AigBuilder::new();
        let ins: Vec<Lit> = (0..input_bits).map(|_| p.input()).collect();
        let rs = build_mixer(&mut p, &shape, &ins, 0);
        for &r in &rs {
            p.output(r);
        }
        p.build("probe").expect("well formed")
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let stimulus: Vec<Vec<bool>> = (0..depth)
        .map(|_| (0..input_bits).map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let mut state = vec![false; state_bits];
    for frame in &stimulus {
        let values = probe.eval_frame(&state, frame);
        state = probe.next_state(&values);
    }
    let target = state
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &v)| acc | (v as u64) << i);
    let bad = b.equals_const(&regs, target);
    for _ in 0..copies {
        b.bad(bad);
    }
    b.build(format!("steer{seed}_{state_bits}_{input_bits}_{depth}_x{copies}"))
        .expect("generator output is well formed")
}

/// Two copies of one nonlinear machine driven by the same inputs, with
/// `properties` bad outputs each flagging a mismatch on one state bit.
/// The copies never diverge, so every property is unreachable, and all
/// properties share nearly the whole design as their cone.
pub fn equivalence_miter(seed: u64, state_bits: usize, input_bits: usize, properties: usize) -> Netlist {
    let shape = MixerShape {
        seed,
        state_bits,
        terms: 2,
    };
    let mut b = AigBuilder::new();
    let inputs: Vec<Lit> = (0..input_bits).map(|_| b.input()).collect();
    let left = build_mixer(&mut b, &shape, &inputs, 0);
    let right = build_mixer(&mut b, &shape, &inputs, 0);
    for p in 0..properties.min(state_bits) {
        let diff = b.xor(left[p], right[p]);
        b.bad(diff);
    }
    b.build(format!("miter{seed}_{state_bits}_{input_bits}"))
        .expect("generator output is well formed")
}

/// A random sequential circuit within the given size bounds. Latch resets
/// are drawn from {0, 1, unknown}; bad outputs tap random signals.
pub fn random_netlist(
    seed: u64,
    max_latches: usize,
    max_inputs: usize,
    max_ands: usize,
    max_bads: usize,
) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_inputs = rng.gen_range(0..=max_inputs);
    let num_latches = rng.gen_range(1..=max_latches.max(1));
    let num_ands = rng.gen_range(1..=max_ands.max(1));
    let num_bads = rng.gen_range(1..=max_bads.max(1));

    let mut b = AigBuilder::new();
    let mut signals: Vec<Lit> = Vec::new();
    for _ in 0..num_inputs {
        signals.push(b.input());
    }
    let mut latches = Vec::new();
    for _ in 0..num_latches {
        let reset = match rng.gen_range(0..6) {
            0 => Reset::One,
            1 => Reset::Unknown,
            _ => Reset::Zero,
        };
        let l = b.latch(reset);
        latches.push(l);
        signals.push(l);
    }
    let pick = |rng: &mut ChaCha8Rng, signals: &[Lit]| {
        let l = signals[rng.gen_range(0..signals.len())];
        if rng.gen_bool(0.5) {
            !l
        } else {
            l
        }
    };
    for _ in 0..num_ands {
        let x = pick(&mut rng, &signals);
        let y = pick(&mut rng, &signals);
        let g = b.and(x, y);
        signals.push(g);
    }
    for &l in &latches {
        let n = pick(&mut rng, &signals);
        b.set_next(l, n);
    }
    for _ in 0..num_bads {
        // bias towards recent (deeper) gates
        let lo = signals.len().saturating_sub(num_ands.max(1));
        let l = signals[rng.gen_range(lo..signals.len())];
        b.bad(if rng.gen_bool(0.5) { !l } else { l });
    }
    b.build(format!("random{seed}")).expect("generator output is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_fixture_shape() {
        let n = counter(3, 5, true);
        assert_eq!(n.num_latches(), 3);
        assert_eq!(n.num_inputs(), 1);
        assert_eq!(n.num_properties(), 1);
        let again = Netlist::parse_aiger(&n.to_aiger()).unwrap().with_name(n.name.clone());
        assert_eq!(again, n);
    }

    #[test]
    fn duplicated_properties_share_literal() {
        let n = duplicated_properties(&counter(3, 5, true), 3);
        assert_eq!(n.num_properties(), 3);
        assert!(n.properties().windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn steering_target_is_reached_by_stimulus() {
        let n = steering_puzzle(7, 8, 3, 4, 1);
        assert_eq!(n.num_latches(), 8);
        assert_eq!(n.num_properties(), 1);
    }

    #[test]
    fn miter_properties_share_cone() {
        let n = equivalence_miter(3, 6, 2, 2);
        let a = n.coi_of(&[n.properties()[0]]);
        let b = n.coi_of(&[n.properties()[1]]);
        let shared = a.ands.iter().filter(|g| b.ands.contains(g)).count();
        assert!(shared * 10 >= a.ands.len() * 8);
    }

    #[test]
    fn random_netlist_is_deterministic() {
        assert_eq!(random_netlist(11, 6, 4, 40, 3), random_netlist(11, 6, 4, 40, 3));
    }
}

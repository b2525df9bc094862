//! End-to-end sweeps over random messages and deletion patterns.

use std::time::{Duration, Instant};

use kdel::dense_hash::split_blocks;
use kdel::{BitSeq, BlockBound, Codec, Result};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub enum Patterns {
    Exhaustive,
    Random(usize),
}

pub struct Plan {
    pub k: usize,
    pub n_list: Vec<usize>,
    pub patterns: Patterns,
    pub seed: u64,
    pub messages: usize,
    pub bound: BlockBound,
}

pub struct Counterexample {
    pub n: usize,
    pub message: BitSeq,
    pub positions: Vec<usize>,
    pub outcome: String,
}

pub struct Report {
    pub summary: Value,
    pub counterexample: Option<Counterexample>,
}

/// Calls `visit` with every strictly increasing `k`-subset of `1..=len`.
fn for_each_subset(len: usize, k: usize, visit: &mut impl FnMut(&[usize])) {
    let mut cur: Vec<usize> = (1..=k).collect();
    if k > len {
        return;
    }
    loop {
        visit(&cur);
        let mut i = k;
        while i > 0 && cur[i - 1] == len - k + i {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn delete(bits: &BitSeq, positions: &[usize]) -> BitSeq {
    let mut skip = positions.iter().peekable();
    let mut out = Vec::with_capacity(bits.len() - positions.len());
    for (i, b) in bits.iter().enumerate() {
        if skip.peek() == Some(&&(i + 1)) {
            skip.next();
        } else {
            out.push(b);
        }
    }
    BitSeq::from_bits(out)
}

struct Sweep<'a> {
    codec: &'a Codec,
    message: &'a BitSeq,
    codeword: BitSeq,
    dense: BitSeq,
    sync: BitSeq,
    blocks: Vec<BitSeq>,
    trials: usize,
    failures: usize,
    max_block_errors: usize,
    decode_time: Duration,
    first_failure: Option<(Vec<usize>, String)>,
}

impl Sweep<'_> {
    fn run(&mut self, positions: &[usize]) {
        self.trials += 1;
        let d = delete(&self.codeword, positions);
        let started = Instant::now();
        let outcome = self.codec.decode(&d);
        self.decode_time += started.elapsed();
        let verdict = match outcome {
            Ok(c) if &c == self.message => None,
            Ok(c) => Some(format!("decoded {c}")),
            Err(e) => Some(e.to_string()),
        };
        if let Some(v) = verdict {
            self.failures += 1;
            self.first_failure.get_or_insert((positions.to_vec(), v));
        }

        let n_t = self.dense.len();
        let inside: Vec<usize> = positions.iter().copied().filter(|&p| p <= n_t).collect();
        let prefix = delete(&self.dense, &inside);
        if let Ok(cand) = self.codec.dense_hash().candidate_blocks(&prefix, &self.sync) {
            let errors = cand.iter().zip(&self.blocks).filter(|(a, b)| a != b).count();
            self.max_block_errors = self.max_block_errors.max(errors);
        }
    }
}

pub fn run(plan: &Plan) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut rows = Vec::new();
    let mut counterexample = None;
    let mut all_pass = true;
    for &n in &plan.n_list {
        let codec = Codec::with_bound(n, plan.k, plan.bound)?;
        let total = codec.layout().total;
        let mut trials = 0;
        let mut failures = 0;
        let mut transform_failures = 0;
        let mut max_block_errors = 0;
        let mut encode_time = Duration::ZERO;
        let mut decode_time = Duration::ZERO;
        for _ in 0..plan.messages {
            let message = BitSeq::from_bits((0..n).map(|_| rng.gen()).collect());
            let started = Instant::now();
            let codeword = codec.encode(&message)?.payload;
            encode_time += started.elapsed();
            let dense = codeword.slice(0..codec.layout().n_t);
            if codec.transform().t_decode(&dense).ok().as_ref() != Some(&message) {
                transform_failures += 1;
            }
            let sync = codec.dense_hash().sync_vector(&dense);
            let blocks = split_blocks(&dense, &sync)?.blocks;
            let mut sweep = Sweep {
                codec: &codec,
                message: &message,
                codeword,
                dense,
                sync,
                blocks,
                trials: 0,
                failures: 0,
                max_block_errors: 0,
                decode_time: Duration::ZERO,
                first_failure: None,
            };
            match plan.patterns {
                Patterns::Exhaustive => for_each_subset(total, plan.k, &mut |p| sweep.run(p)),
                Patterns::Random(count) => {
                    for _ in 0..count {
                        let mut p: Vec<usize> = sample(&mut rng, total, plan.k).into_iter().map(|i| i + 1).collect();
                        p.sort_unstable();
                        sweep.run(&p);
                    }
                }
            }
            trials += sweep.trials;
            failures += sweep.failures;
            max_block_errors = max_block_errors.max(sweep.max_block_errors);
            decode_time += sweep.decode_time;
            if counterexample.is_none() {
                if let Some((positions, outcome)) = sweep.first_failure {
                    counterexample = Some(Counterexample {
                        n,
                        message: message.clone(),
                        positions,
                        outcome,
                    });
                }
            }
        }
        let pass = failures == 0 && transform_failures == 0 && max_block_errors <= 2 * plan.k;
        all_pass &= pass;
        rows.push(json!({
            "n": n,
            "N": total,
            "messages": plan.messages,
            "trials": trials,
            "failures": failures,
            "transform_failures": transform_failures,
            "max_block_errors": max_block_errors,
            "block_error_bound": 2 * plan.k,
            "encode_ms": encode_time.as_secs_f64() * 1e3,
            "decode_ms": decode_time.as_secs_f64() * 1e3,
            "pass": pass,
        }));
    }
    let summary = json!({
        "k": plan.k,
        "block_bound": plan.bound,
        "seed": plan.seed,
        "patterns": match plan.patterns {
            Patterns::Exhaustive => "exhaustive".to_string(),
            Patterns::Random(t) => format!("random:{t}"),
        },
        "results": rows,
        "pass": all_pass,
    });
    Ok(Report { summary, counterexample })
}

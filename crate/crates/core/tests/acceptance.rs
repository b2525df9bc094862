//! Acceptance suite. Every criterion runs on its own thread, prints one
//! `PASS`/`FAIL` line and the process exits non-zero if any criterion fails.
//!
//! Tolerances: every check is exact. Zero decoding failures, zero oracle
//! violations and exact equality of redundancy and field-width sums.

mod common;

use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use std::time::Instant;

use common::*;
use kdel::bitseq::is_subsequence;
use kdel::dense_hash::split_blocks;
use kdel::rs::{GaloisField, RsCode};
use kdel::small_hash::SmallBlockHash;
use kdel::syncvec::{is_k_dense, sync_vector};
use kdel::transform::DenseTransform;
use kdel::vt::{is_vt_codeword, vt_correct, vt_decode, vt_encode};
use kdel::{BitSeq, BlockBound, CodeLayout, Codec, SyncParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Zero tolerated failures for every criterion.
const MAX_VIOLATIONS: usize = 0;

fn within_tolerance(violations: usize) -> bool {
    violations == MAX_VIOLATIONS
}

struct Outcome {
    violations: usize,
    detail: String,
}

impl Outcome {
    fn new(violations: usize, detail: impl Into<String>) -> Self {
        Self {
            violations,
            detail: detail.into(),
        }
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 12] = [
    (1, "end-to-end k=1, n in {8,16}, every single deletion", end_to_end_single),
    (2, "end-to-end k=2, n=12, seeded double deletions", end_to_end_double),
    (3, "codewords for n<=8 share no (N-1)-subsequence", code_property),
    (4, "moment hash separates sync vectors inside B_1, n<=12", moment_separation),
    (5, "moments e<=6 separate R_3 vectors inside B_3, len<=12", sparse_moments),
    (6, "sync vectors of B_1 neighbours lie in B_3, n<=14", sync_stability),
    (7, "dense decode and block errors on transformed inputs", dense_decode),
    (8, "dense transform density and round trips", transform_round_trips),
    (9, "small-block hash round trip, w in 4..=8, n=16", small_hash_round_trip),
    (10, "Reed-Solomon substitution correction", reed_solomon),
    (11, "VT baseline decoding and redundancy", vt_baseline),
    (12, "redundancy growth for k=1, n in {2^8,2^12,2^16}", redundancy_table),
];

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let started = Instant::now();
    let results: Vec<(Criterion, Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = CRITERIA
            .iter()
            .map(|&c| {
                s.spawn(move || {
                    let t = Instant::now();
                    let out = std::panic::catch_unwind(c.2)
                        .unwrap_or_else(|_| Outcome::new(1, "panicked"));
                    (c, out, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let mut failed = 0;
    for ((id, name, _), out, secs) in &results {
        let ok = within_tolerance(out.violations);
        failed += !ok as usize;
        println!(
            "criterion {id:>2}: {} {name} [{} violations, {secs:.1}s] {}",
            if ok { "PASS" } else { "FAIL" },
            out.violations,
            out.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn end_to_end_single() -> Outcome {
    let mut violations = 0;
    let mut trials = 0;
    let mut r = rng(1);
    for n in [8usize, 16] {
        let codec = Codec::new(n, 1).expect("codec");
        for _ in 0..200 {
            let c = random_bits(&mut r, n);
            let cw = codec.encode(&c).expect("encode").payload;
            for p in 1..=cw.len() {
                let d = BitSeq::from_bits(delete(cw.as_slice(), &[p]));
                trials += 1;
                if codec.decode(&d).ok().as_ref() != Some(&c) {
                    violations += 1;
                }
            }
        }
    }
    Outcome::new(violations, format!("{trials} decodes"))
}

fn end_to_end_double() -> Outcome {
    let codec = Codec::new(12, 2).expect("codec");
    let mut r = rng(2);
    let mut violations = 0;
    let mut trials = 0;
    for _ in 0..50 {
        let c = random_bits(&mut r, 12);
        let cw = codec.encode(&c).expect("encode").payload;
        let len = cw.len();
        for _ in 0..500 {
            let a = r.gen_range(1..=len);
            let mut b = r.gen_range(1..len);
            if b >= a {
                b += 1;
            }
            let d = BitSeq::from_bits(delete(cw.as_slice(), &[a.min(b), a.max(b)]));
            trials += 1;
            if codec.decode(&d).ok().as_ref() != Some(&c) {
                violations += 1;
            }
        }
    }
    Outcome::new(violations, format!("{trials} decodes, N={}", codec.layout().total))
}

fn code_property() -> Outcome {
    let mut violations = 0;
    let mut messages = 0;
    for n in 2..=8usize {
        let codec = Codec::new(n, 1).expect("codec");
        let mut owner: HashMap<Vec<bool>, u64> = HashMap::new();
        for v in 0..(1u64 << n) {
            messages += 1;
            let cw = codec.encode(&BitSeq::from_bits(word(v, n))).expect("encode").payload;
            let subs: HashSet<Vec<bool>> = (1..=cw.len()).map(|p| delete(cw.as_slice(), &[p])).collect();
            for s in subs {
                if let Some(&other) = owner.get(&s) {
                    if other != v {
                        violations += 1;
                    }
                } else {
                    owner.insert(s, v);
                }
            }
        }
    }
    Outcome::new(violations, format!("{messages} messages"))
}

fn moment_separation() -> Outcome {
    let mut violations = 0;
    let mut pairs = 0u64;
    for n in 2..=12usize {
        let table: Vec<(Vec<bool>, Vec<u128>)> = (0..(1u64 << n))
            .map(|v| {
                let s = sync_oracle(&word(v, n), 1);
                let f = f_oracle(&s, 1);
                (s, f)
            })
            .collect();
        for v in 0..(1u64 << n) {
            let (s, f) = &table[v as usize];
            for other in ball1(&word(v, n)) {
                pairs += 1;
                let idx = other.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
                let (s2, f2) = &table[idx];
                if f == f2 && s != s2 {
                    violations += 1;
                }
            }
        }
    }
    Outcome::new(violations, format!("{pairs} ball pairs"))
}

fn is_sparse(v: &[bool], gap: usize) -> bool {
    let ones: Vec<usize> = (0..v.len()).filter(|&i| v[i]).collect();
    ones.windows(2).all(|w| w[1] - w[0] >= gap)
}

fn sparse_moments() -> Outcome {
    let mut violations = 0;
    let mut pairs = 0u64;
    for n in 1..=12usize {
        let members: Vec<Vec<bool>> = (0..(1u64 << n)).map(|v| word(v, n)).filter(|v| is_sparse(v, 3)).collect();
        let moments: Vec<Vec<u128>> = members.iter().map(|v| (0..=6).map(|e| moment(v, e)).collect()).collect();
        for i in 0..members.len() {
            for j in 0..members.len() {
                if i != j && in_ball(&members[i], &members[j], 3) {
                    pairs += 1;
                    if moments[i] == moments[j] {
                        violations += 1;
                    }
                }
            }
        }
    }
    Outcome::new(violations, format!("{pairs} distinct pairs within B_3"))
}

fn sync_stability() -> Outcome {
    let mut violations = 0;
    let mut pairs = 0u64;
    let mut library_mismatch = 0;
    for n in 2..=14usize {
        let params = SyncParams::new(n, 1).expect("params");
        let syncs: Vec<Vec<bool>> = (0..(1u64 << n)).map(|v| sync_oracle(&word(v, n), 1)).collect();
        for v in 0..(1u64 << n) {
            let c = word(v, n);
            if sync_vector(&BitSeq::from_bits(c.clone()), &params).as_slice() != syncs[v as usize].as_slice() {
                library_mismatch += 1;
            }
            for other in ball1(&c) {
                pairs += 1;
                let idx = other.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
                if !in_ball(&syncs[v as usize], &syncs[idx], 3) {
                    violations += 1;
                }
            }
        }
    }
    Outcome::new(
        violations + library_mismatch,
        format!("{pairs} ball pairs, {library_mismatch} library/oracle sync mismatches"),
    )
}

fn dense_decode() -> Outcome {
    let mut violations = 0;
    let mut trials = 0;
    let mut worst = 0;
    let mut r = rng(7);
    for (n, count) in [(16usize, 300usize), (64, 150)] {
        let codec = Codec::new(n, 1).expect("codec");
        let dense = codec.dense_hash();
        let gap = dense.params().max_gap;
        let mut inputs: Vec<BitSeq> = vec![BitSeq::zeros(n), BitSeq::ones(n)];
        inputs.extend((0..count).map(|_| random_bits(&mut r, n)));
        for c in inputs {
            let t = codec.transform().t_encode(&c).expect("transform");
            let sync = BitSeq::from_bits(sync_oracle(t.as_slice(), 1));
            if longest_zero_run(sync.as_slice()) > gap {
                violations += 1;
            }
            let hk = dense.hash(&t).expect("hash");
            let blocks = split_blocks(&t, &sync).expect("split").blocks;
            for p in 1..=t.len() {
                trials += 1;
                let d = BitSeq::from_bits(delete(t.as_slice(), &[p]));
                let cand = dense.candidate_blocks(&d, &sync).expect("candidates");
                let errors = cand.iter().zip(&blocks).filter(|(a, b)| a != b).count() + cand.len().abs_diff(blocks.len());
                worst = worst.max(errors);
                let received = dense.received_blocks(&d, &sync).expect("received");
                let nested = received.len() == blocks.len()
                    && received.iter().zip(&blocks).all(|(b, a)| is_subsequence(b, a));
                let decoded = dense.decode(&d, &sync, &hk).ok();
                if errors > 2 || !nested || decoded.as_ref() != Some(&t) {
                    violations += 1;
                }
            }
        }
    }
    Outcome::new(violations, format!("{trials} deletions, worst block-error count {worst} (bound 2)"))
}

fn dense_checks(x: &BitSeq, p: &SyncParams) -> bool {
    let bits = x.as_slice();
    let sync = sync_oracle(bits, p.k);
    is_k_dense(x, p)
        && longest_zero_run(&sync) <= p.max_gap
        && every_window_has_run(bits, p.run_window, p.run_len)
        && every_window_is_quiet_somewhere(bits, p.quiet_window, p.k, p.run_len)
}

fn phi_input(r: &mut ChaCha8Rng, len: usize, run: usize) -> BitSeq {
    let mut bits: Vec<bool> = (0..len).map(|_| r.gen()).collect();
    for chunk in bits.chunks_mut(run) {
        if chunk.iter().all(|&b| b) {
            chunk[r.gen_range(0..run)] = false;
        }
    }
    BitSeq::from_bits(bits)
}

fn transform_round_trips() -> Outcome {
    let mut violations = 0;
    let mut checks = 0;
    let mut r = rng(8);
    let mut tally = |ok: bool| {
        checks += 1;
        violations += !ok as usize;
    };

    let big = DenseTransform::new(1 << 14, 1).expect("transform");
    let mut inputs: Vec<BitSeq> = (0..200).map(|_| random_bits(&mut r, 1 << 14)).collect();
    inputs.push(BitSeq::ones(1 << 14));
    inputs.push(BitSeq::zeros(1 << 14));
    for c in &inputs {
        let x = big.t_encode(c).expect("encode");
        tally(dense_checks(&x, big.params()));
        tally(big.t_decode(&x).ok().as_ref() == Some(c));
    }

    let huge = DenseTransform::new(1 << 16, 1).expect("transform");
    let zeros = BitSeq::zeros(1 << 16);
    let x = huge.t1_encode(&zeros).expect("t1");
    tally(every_window_has_run(x.as_slice(), huge.params().run_window, huge.params().run_len));
    tally(huge.t1_decode(&x).ok().as_ref() == Some(&zeros));
    let x = huge.t_encode(&zeros).expect("t");
    tally(dense_checks(&x, huge.params()));
    tally(huge.t_decode(&x).ok().as_ref() == Some(&zeros));

    for (n, count) in [(16usize, 200usize), (1 << 14, 20)] {
        let t = DenseTransform::new(n, 1).expect("transform");
        for _ in 0..count {
            let b = phi_input(&mut r, t.params().run_window, t.params().run_len);
            let y = t.phi_encode(&b).expect("phi");
            tally(t.phi_decode(&y).ok().as_ref() == Some(&b));
        }
    }

    for (n, count) in [(1000usize, 100usize), (1 << 14, 50)] {
        let t = DenseTransform::new(n, 1).expect("transform");
        for _ in 0..count {
            let c = random_bits(&mut r, n);
            let x = t.t1_encode(&c).expect("t1");
            tally(t.t1_decode(&x).ok().as_ref() == Some(&c));
        }
    }

    let mut t2_inputs = 0;
    for k in [1usize, 2] {
        let t = DenseTransform::new(64, k).expect("transform");
        let (len, run) = (t.params().pattern_len, t.params().run_len);
        for v in 0..(1u64 << len) {
            let b = word(v, len);
            if !(0..3 * k).any(|j| j + run <= len && b[j..j + run].iter().all(|&x| x)) {
                continue;
            }
            t2_inputs += 1;
            let b = BitSeq::from_bits(b);
            let y = t.t2_encode(&b).expect("t2");
            let quiet = !(0..3 * k).any(|j| j + run <= y.len() && y.as_slice()[j..j + run].iter().all(|&x| x));
            tally(quiet && t.t2_decode(&y).ok().as_ref() == Some(&b));
        }
    }

    for n in 2..=12usize {
        let t = DenseTransform::new(n, 1).expect("transform");
        for v in 0..(1u64 << n) {
            let c = BitSeq::from_bits(word(v, n));
            let x = t.t_encode(&c).expect("t");
            tally(t.t_decode(&x).ok().as_ref() == Some(&c));
        }
    }
    for (n, k) in [(100usize, 1usize), (1000, 1), (1000, 2), (4096, 3)] {
        let t = DenseTransform::new(n, k).expect("transform");
        for _ in 0..50 {
            let c = random_bits(&mut r, n);
            let x = t.t_encode(&c).expect("t");
            tally(dense_checks(&x, t.params()) && t.t_decode(&x).ok().as_ref() == Some(&c));
        }
    }
    Outcome::new(violations, format!("{checks} checks, {t2_inputs} exhaustive T2 inputs"))
}

fn small_hash_round_trip() -> Outcome {
    let mut violations = 0;
    let mut trials = 0;
    for k in [1usize, 2] {
        let h = SmallBlockHash::new(16, k).expect("hash");
        for w in 4..=8usize {
            for v in 0..(1u64 << w) {
                let c = word(v, w);
                let hash = h.hash(&BitSeq::from_bits(c.clone())).expect("hash");
                for m in 0..=k {
                    for pos in position_sets(w, m) {
                        trials += 1;
                        let d = BitSeq::from_bits(delete(&c, &pos));
                        if h.decode(&d, &hash, w).ok().map(|x| x.into_bits()) != Some(c.clone()) {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    Outcome::new(violations, format!("{trials} words x deletion patterns"))
}

fn random_symbol(r: &mut ChaCha8Rng, width: usize) -> BitSeq {
    random_bits(r, width)
}

fn reed_solomon() -> Outcome {
    let mut violations = 0;
    let mut trials = 0u64;
    let field = Arc::new(GaloisField::new(8).expect("field"));
    let code = RsCode::new(field, 2, 8).expect("code");
    let mut r = rng(10);
    let msg: Vec<BitSeq> = (0..6).map(|_| random_symbol(&mut r, 8)).collect();
    let red = code.redundancy(&msg).expect("redundancy");
    let mut word: Vec<BitSeq> = msg.iter().chain(&red).cloned().collect();
    let len = word.len();
    let original = word.clone();
    let corrected = |w: &[BitSeq]| code.correct(&w[..6], &w[6..]).ok().as_deref() == Some(&msg[..]);
    for a in 0..len {
        for b in a + 1..len {
            for ea in 1u64..256 {
                for eb in 1u64..256 {
                    word[a] = xor(&original[a], ea, 8);
                    word[b] = xor(&original[b], eb, 8);
                    trials += 1;
                    violations += !corrected(&word) as usize;
                }
            }
            word[a] = original[a].clone();
            word[b] = original[b].clone();
        }
    }

    for _ in 0..1000 {
        let k = r.gen_range(1..=2usize);
        let symbols = r.gen_range(1..=64usize);
        let m = r.gen_range(7..=10u32);
        let width = m as usize * r.gen_range(1..=3usize);
        let code = RsCode::new(Arc::new(GaloisField::new(m).expect("field")), 2 * k, width).expect("code");
        let msg: Vec<BitSeq> = (0..symbols).map(|_| random_symbol(&mut r, width)).collect();
        let red = code.redundancy(&msg).expect("redundancy");
        let mut rx: Vec<BitSeq> = msg.iter().chain(&red).cloned().collect();
        let errors = r.gen_range(0..=2 * k);
        let mut hit = HashSet::new();
        while hit.len() < errors {
            hit.insert(r.gen_range(0..rx.len()));
        }
        for &p in &hit {
            rx[p] = random_symbol(&mut r, width);
        }
        trials += 1;
        if code.correct(&rx[..symbols], &rx[symbols..]).ok() != Some(msg) {
            violations += 1;
        }
    }
    Outcome::new(violations, format!("{trials} corrections"))
}

fn xor(s: &BitSeq, e: u64, width: usize) -> BitSeq {
    BitSeq::from_bits(s.iter().zip(word(e, width)).map(|(a, b)| a ^ b).collect())
}

fn vt_baseline() -> Outcome {
    let mut violations = 0;
    let mut trials = 0;
    let mut worst_slack = f64::INFINITY;
    for len in 1..=10usize {
        let code: Vec<Vec<bool>> = (0..(1u64 << len))
            .map(|v| word(v, len))
            .filter(|c| (1..=len).filter(|&i| c[i - 1]).sum::<usize>() % (len + 1) == 0)
            .collect();
        let mut owner: HashMap<Vec<bool>, usize> = HashMap::new();
        for (idx, c) in code.iter().enumerate() {
            if !is_vt_codeword(&BitSeq::from_bits(c.clone())) {
                violations += 1;
            }
            for p in 1..=len {
                trials += 1;
                let d = delete(c, &[p]);
                if *owner.entry(d.clone()).or_insert(idx) != idx {
                    violations += 1;
                }
                if vt_correct(&BitSeq::from_bits(d), len).ok().map(|x| x.into_bits()).as_ref() != Some(c) {
                    violations += 1;
                }
            }
        }
        let redundancy = len as f64 - (code.len() as f64).log2();
        let bound = ((len + 1) as f64).log2();
        worst_slack = worst_slack.min(bound - redundancy);
        if redundancy > bound + 1e-12 {
            violations += 1;
        }
    }
    for n in 1..=10usize {
        for v in 0..(1u64 << n) {
            let c = BitSeq::from_bits(word(v, n));
            let cw = vt_encode(&c);
            for p in 0..=cw.len() {
                let d = if p == 0 { cw.clone() } else { BitSeq::from_bits(delete(cw.as_slice(), &[p])) };
                trials += 1;
                if vt_decode(&d, n).ok().as_ref() != Some(&c) {
                    violations += 1;
                }
            }
        }
    }
    Outcome::new(
        violations,
        format!("{trials} decodes, min slack log2(N+1) - redundancy = {worst_slack:.3} bits"),
    )
}

fn redundancy_table() -> Outcome {
    let sizes = [1usize << 8, 1 << 12, 1 << 16];
    let mut violations = 0;
    let mut report = Vec::new();
    for bound in [BlockBound::Tight, BlockBound::Nominal] {
        let rows: Vec<CodeLayout> = sizes.iter().map(|&n| CodeLayout::new(n, 1, bound).expect("layout")).collect();
        let mut cells = Vec::new();
        for l in &rows {
            let fields = (l.n_t - l.n) + 2 * l.w_p + l.w_hashk + l.n2;
            if l.total - l.n != fields || l.total - l.n != l.field_width_sum() || l.redundancy != fields {
                violations += 1;
            }
            cells.push(format!(
                "n=2^{} N-n={} ratio={:.1}",
                l.n.ilog2(),
                l.total - l.n,
                (l.total - l.n) as f64 / (l.n as f64).log2()
            ));
        }
        let red: Vec<usize> = rows.iter().map(|l| l.total - l.n).collect();
        let ratio: Vec<f64> = rows.iter().map(|l| (l.total - l.n) as f64 / (l.n as f64).log2()).collect();
        let monotone = red.windows(2).all(|w| w[0] < w[1]);
        let shrinking = ratio.windows(2).all(|w| w[0] > w[1]);
        if bound == BlockBound::Tight {
            violations += !monotone as usize + !shrinking as usize;
        }
        report.push(format!(
            "{bound:?}: {} (monotone={monotone}, ratio decreasing={shrinking})",
            cells.join(", ")
        ));
    }
    Outcome::new(
        violations,
        format!(
            "{}; default block bound is asserted; the asymptotic 8k log n constant is not asserted at this scale",
            report.join("; ")
        ),
    )
}

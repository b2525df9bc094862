//! Reference implementations written straight from the definitions. They
//! share no code with the library beyond the `BitSeq` container.

#![allow(dead_code)]

use std::collections::HashSet;

use kdel::BitSeq;
use rand::Rng;

pub fn word(v: u64, len: usize) -> Vec<bool> {
    (0..len).rev().map(|j| (v >> j) & 1 == 1).collect()
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> BitSeq {
    BitSeq::from_bits((0..len).map(|_| rng.gen()).collect())
}

pub fn lcs(a: &[bool], b: &[bool]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for &x in a {
        let mut diag = 0;
        for (j, &y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// Same-length words `a`, `b` share a subsequence of length `len - k`.
pub fn in_ball(a: &[bool], b: &[bool], k: usize) -> bool {
    a.len() == b.len() && lcs(a, b) + k >= a.len()
}

/// Members of the single-deletion ball: delete one bit, insert one bit.
pub fn ball1(c: &[bool]) -> HashSet<Vec<bool>> {
    let mut out = HashSet::new();
    for i in 0..c.len() {
        let mut d = c.to_vec();
        d.remove(i);
        for j in 0..=d.len() {
            for b in [false, true] {
                let mut e = d.clone();
                e.insert(j, b);
                out.insert(e);
            }
        }
    }
    out
}

fn ceil_log2(x: usize) -> usize {
    let mut r = 0;
    while (1usize << r) < x {
        r += 1;
    }
    r
}

/// Entry `i` (1-indexed) is 1 iff `c[i-3k+1 ..= i+r-1]` exists, ends in `r`
/// ones and has no all-ones window of length `r` starting earlier.
pub fn sync_oracle(c: &[bool], k: usize) -> Vec<bool> {
    let n = c.len() as isize;
    let r = ceil_log2(k) + 5;
    let (r_i, tk) = (r as isize, 3 * k as isize);
    (1..=n)
        .map(|i| {
            let lo = i - tk + 1;
            let hi = i + r_i - 1;
            if lo < 1 || hi > n {
                return false;
            }
            let w = &c[(lo - 1) as usize..hi as usize];
            let ends = w[w.len() - r..].iter().all(|&b| b);
            let early = (0..w.len() - r).any(|s| w[s..s + r].iter().all(|&b| b));
            ends && !early
        })
        .collect()
}

/// `v · m^(e)` with `m^(e)_i = Σ_{j ≤ i} j^e`, exact.
pub fn moment(v: &[bool], e: u32) -> u128 {
    let mut prefix = 0u128;
    let mut acc = 0u128;
    for (i, &b) in v.iter().enumerate() {
        prefix += ((i + 1) as u128).pow(e);
        if b {
            acc += prefix;
        }
    }
    acc
}

/// `f(v)` with the moduli `3k·n^(e+1)`, `e = 0..=6k`.
pub fn f_oracle(v: &[bool], k: usize) -> Vec<u128> {
    let n = v.len() as u128;
    (0..=6 * k as u32)
        .map(|e| moment(v, e) % (3 * k as u128 * n.pow(e + 1)))
        .collect()
}

/// Every length-`run` window of ones starts somewhere in each length-`span` window.
pub fn every_window_has_run(c: &[bool], span: usize, run: usize) -> bool {
    if c.len() < span {
        return true;
    }
    let starts: Vec<bool> = (0..c.len())
        .map(|j| j + run <= c.len() && c[j..j + run].iter().all(|&b| b))
        .collect();
    (0..=c.len() - span).all(|i| starts[i..=i + span - run].iter().any(|&s| s))
}

/// Every length-`span` window contains `j` such that no run of `run` ones
/// starts in `[j, j + 3k - 1]`, with `j` ranging over the first `span - p + 1` slots.
pub fn every_window_is_quiet_somewhere(c: &[bool], span: usize, k: usize, run: usize) -> bool {
    let p = 3 * k + run - 1;
    if c.len() < span {
        return true;
    }
    let starts: Vec<bool> = (0..c.len())
        .map(|j| j + run <= c.len() && c[j..j + run].iter().all(|&b| b))
        .collect();
    let quiet: Vec<bool> = (0..c.len())
        .map(|j| !starts[j..(j + 3 * k).min(c.len())].iter().any(|&s| s))
        .collect();
    (0..=c.len() - span).all(|i| quiet[i..=i + span - p].iter().any(|&q| q))
}

/// Longest 0-run of a vector.
pub fn longest_zero_run(v: &[bool]) -> usize {
    let (mut best, mut cur) = (0, 0);
    for &b in v {
        if b {
            cur = 0;
        } else {
            cur += 1;
            best = best.max(cur);
        }
    }
    best
}

/// All strictly increasing `k`-subsets of `1..=n`.
pub fn position_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in start..=n {
            cur.push(p);
            rec(p + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn delete(c: &[bool], positions: &[usize]) -> Vec<bool> {
    c.iter()
        .enumerate()
        .filter(|(i, _)| !positions.contains(&(i + 1)))
        .map(|(_, &b)| b)
        .collect()
}

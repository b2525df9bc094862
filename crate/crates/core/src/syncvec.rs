//! Synchronization patterns, synchronization vectors and the k-dense predicate.

use serde::Serialize;

use crate::bitseq::BitSeq;
use crate::error::{Error, Result};

/// `⌈log₂ x⌉`, with `⌈log₂ 0⌉ = ⌈log₂ 1⌉ = 0`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Constants derived from a deletion budget `k` and a sequence length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SyncParams {
    pub n: usize,
    pub k: usize,
    /// `⌈log₂ k⌉`.
    pub log_k: usize,
    /// `⌈log₂ n⌉`.
    pub log_n: usize,
    /// Length of the all-ones run closing a synchronization pattern.
    pub run_len: usize,
    /// Length of a synchronization pattern, `3k + run_len - 1`.
    pub pattern_len: usize,
    /// Window length guaranteed to contain an all-ones run (dense transform, first stage).
    pub run_window: usize,
    /// Window length guaranteed to contain a run-free stretch (dense transform, second stage).
    pub quiet_window: usize,
    /// Longest permitted 0-run of the synchronization vector of a dense sequence.
    pub max_gap: usize,
}

impl SyncParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("deletion budget k must be at least 1"));
        }
        if n < 2 {
            return Err(Error::invalid("sequence length must be at least 2"));
        }
        let log_k = ceil_log2(k as u64) as usize;
        let log_n = ceil_log2(n as u64) as usize;
        let run_len = log_k + 5;
        let pattern_len = 3 * k + log_k + 4;
        let run_window = run_len * (1usize << (log_k + 9)) * log_n;
        let quiet_window = pattern_len * (log_n + 9 + log_k);
        Ok(Self {
            n,
            k,
            log_k,
            log_n,
            run_len,
            pattern_len,
            run_window,
            quiet_window,
            max_gap: run_window + quiet_window,
        })
    }
}

/// `starts[j]` is true iff `bits[j..j + run_len]` is in range and all ones.
pub(crate) fn run_starts(bits: &[bool], run_len: usize) -> Vec<bool> {
    let n = bits.len();
    let mut streak = vec![0usize; n + 1];
    for j in (0..n).rev() {
        streak[j] = if bits[j] { streak[j + 1] + 1 } else { 0 };
    }
    streak[..n].iter().map(|&s| s >= run_len).collect()
}

/// Literal check of both defining conditions of a synchronization pattern.
pub fn is_sync_pattern(w: &BitSeq, params: &SyncParams) -> Result<bool> {
    if w.len() != params.pattern_len {
        return Err(Error::invalid(format!(
            "pattern window must have {} bits, got {}",
            params.pattern_len,
            w.len()
        )));
    }
    let a = w.as_slice();
    let tk = 3 * params.k;
    let r = params.run_len;
    let closes_with_run = a[tk - 1..tk - 1 + r].iter().all(|&b| b);
    let early_run = (0..tk - 1).any(|j| a[j..j + r].iter().all(|&b| b));
    Ok(closes_with_run && !early_run)
}

/// Synchronization vector: entry `i` (1-indexed) is 1 iff the window
/// `c[i-3k+1 ..= i+run_len-1]` lies inside `c` and is a synchronization pattern.
pub fn sync_vector(c: &BitSeq, params: &SyncParams) -> BitSeq {
    BitSeq::from_bits(sync_bits(c.as_slice(), params.k, params.run_len))
}

pub(crate) fn sync_bits(c: &[bool], k: usize, run_len: usize) -> Vec<bool> {
    let n = c.len();
    let starts = run_starts(c, run_len);
    let lead = 3 * k - 1;
    let mut out = vec![false; n];
    // Index of the most recent run start strictly before the current position.
    let mut last_start: Option<usize> = None;
    for idx in 0..n {
        if idx >= lead && starts[idx] && idx + run_len <= n {
            let clear = match last_start {
                Some(p) => p + lead < idx,
                None => true,
            };
            out[idx] = clear;
        }
        if starts[idx] {
            last_start = Some(idx);
        }
    }
    out
}

/// True iff every 0-run of the synchronization vector (including the leading
/// and trailing ones) is at most `params.max_gap` long.
pub fn is_k_dense(c: &BitSeq, params: &SyncParams) -> bool {
    let sync = sync_bits(c.as_slice(), params.k, params.run_len);
    let mut gap = 0usize;
    for b in sync {
        if b {
            gap = 0;
        } else {
            gap += 1;
            if gap > params.max_gap {
                return false;
            }
        }
    }
    true
}

/// 1-indexed positions of the 1 entries of a synchronization vector.
pub fn sync_positions(sync: &BitSeq) -> Vec<usize> {
    sync.iter()
        .enumerate()
        .filter_map(|(i, b)| b.then_some(i + 1))
        .collect()
}

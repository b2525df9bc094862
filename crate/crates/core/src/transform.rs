//! The dense transformation `T` and its building blocks.
//!
//! * `φ` packs a `B`-bit block with no all-ones `r`-bit chunk into fewer bits.
//! * `T₁` makes every length-`B` window contain a run `1^r` (Property 1).
//! * `T₂` rewrites a short block so it contains no run `1^r`.
//! * `T` additionally makes every length-`R` window contain a stretch of
//!   `3k + r - 1` bits with no run start (Property 2).
//!
//! A sequence with both properties is k-dense. Every step deletes a segment
//! and appends an equally long record of what was deleted, so each decoder
//! peels records off the end in reverse order. Positions stored in records
//! are 1-indexed and written as fixed-width big-endian integers.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::bitseq::{bits_to_u64, BitSeq};
use crate::error::{Error, Result};
use crate::syncvec::{ceil_log2, run_starts, SyncParams};

/// Bit lengths of the transformation stages for one `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransformLayout {
    pub t1_out_len: usize,
    pub t2_in_len: usize,
    pub t2_out_len: usize,
    pub t_out_len: usize,
    pub phi_out_len: usize,
    pub index_width: usize,
}

/// `T`, `T₁`, `T₂` and `φ` for messages of `n` bits and `k` deletions.
#[derive(Debug, Clone)]
pub struct DenseTransform {
    params: SyncParams,
    layout: TransformLayout,
    /// Bits of the position field inside a `T₂` record.
    t2_index_width: usize,
    /// Blocks of length `3k + r - 1` in a Property-2 window.
    window_blocks: usize,
}

fn prefix_counts(flags: &[bool]) -> Vec<usize> {
    let mut out = Vec::with_capacity(flags.len() + 1);
    out.push(0);
    let mut acc = 0;
    for &f in flags {
        acc += f as usize;
        out.push(acc);
    }
    out
}

fn push_uint(out: &mut Vec<bool>, value: usize, width: usize) -> Result<()> {
    let bits = BitSeq::from_uint(value as u64, width)
        .map_err(|_| Error::internal(format!("position {value} does not fit in {width} bits")))?;
    out.extend(bits.iter());
    Ok(())
}

/// `good[j]` is true iff no run of `r` ones starts in `[j, j + 3k - 1]` (0-indexed).
fn quiet_starts(bits: &[bool], k: usize, r: usize) -> Vec<bool> {
    let starts = prefix_counts(&run_starts(bits, r));
    let n = bits.len();
    (0..n).map(|j| starts[(j + 3 * k).min(n)] == starts[j]).collect()
}

/// Every length-`B` window contains a run of `r` ones.
pub fn satisfies_property1(c: &BitSeq, params: &SyncParams) -> bool {
    let n = c.len();
    let (b, r) = (params.run_window, params.run_len);
    if n < b {
        return true;
    }
    let starts = prefix_counts(&run_starts(c.as_slice(), r));
    (0..=n - b).all(|i| starts[i + b - r + 1] > starts[i])
}

/// Every length-`R` window contains a length-`(3k + r - 1)` stretch in which
/// no run of `r` ones starts at any of the first `3k` positions.
pub fn satisfies_property2(c: &BitSeq, params: &SyncParams) -> bool {
    let n = c.len();
    let (rw, p) = (params.quiet_window, params.pattern_len);
    if n < rw {
        return true;
    }
    let good = prefix_counts(&quiet_starts(c.as_slice(), params.k, params.run_len));
    (0..=n - rw).all(|i| good[i + rw - p + 1] > good[i])
}

impl DenseTransform {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let params = SyncParams::new(n, k)?;
        let lk = params.log_k;
        let phi_out_len = params
            .run_window
            .checked_sub(params.log_n + 2 * lk + 12)
            .filter(|&l| l > 0)
            .ok_or_else(|| Error::invalid("block compressor would have no output bits"))?;
        let layout = TransformLayout {
            t1_out_len: n + 2 * lk + 10,
            t2_in_len: params.pattern_len,
            t2_out_len: params.pattern_len - 1,
            t_out_len: n + 3 * k + 3 * lk + 15,
            phi_out_len,
            index_width: params.log_n,
        };
        Ok(Self {
            params,
            layout,
            t2_index_width: ceil_log2(3 * k as u64) as usize,
            window_blocks: params.log_n + 9 + lk,
        })
    }

    pub fn params(&self) -> &SyncParams {
        &self.params
    }

    pub fn layout(&self) -> &TransformLayout {
        &self.layout
    }

    fn budget(&self) -> usize {
        (4 * self.params.n * self.params.n).max(64)
    }

    fn phi_digits(&self) -> usize {
        self.params.run_window / self.params.run_len
    }

    /// Packs `B` bits, read as `B / r` digits of base `2^r - 1` with the first
    /// chunk most significant, into `phi_out_len` bits.
    pub fn phi_encode(&self, b: &BitSeq) -> Result<BitSeq> {
        let r = self.params.run_len;
        if b.len() != self.params.run_window {
            return Err(Error::invalid(format!(
                "expected {} bits, got {}",
                self.params.run_window,
                b.len()
            )));
        }
        let base = (1u64 << r) - 1;
        let mut acc = BigUint::zero();
        for chunk in b.as_slice().chunks(r) {
            let digit = bits_to_u64(chunk)?;
            if digit == base {
                return Err(Error::invalid("block contains an all-ones chunk"));
            }
            acc = acc * base + digit;
        }
        BitSeq::from_biguint(&acc, self.layout.phi_out_len)
            .map_err(|_| Error::internal("packed block exceeds its field"))
    }

    pub fn phi_decode(&self, bits: &BitSeq) -> Result<BitSeq> {
        if bits.len() != self.layout.phi_out_len {
            return Err(Error::invalid(format!(
                "expected {} bits, got {}",
                self.layout.phi_out_len,
                bits.len()
            )));
        }
        let r = self.params.run_len;
        let base = BigUint::from((1u64 << r) - 1);
        let mut rest = bits.to_biguint();
        let mut digits = Vec::with_capacity(self.phi_digits());
        for _ in 0..self.phi_digits() {
            let d = (&rest % &base).to_u64().expect("digit below base");
            rest /= &base;
            digits.push(d);
        }
        if !rest.is_zero() {
            return Err(Error::decode("packed block out of range"));
        }
        let mut out = Vec::with_capacity(self.params.run_window);
        for &d in digits.iter().rev() {
            out.extend((0..r).rev().map(|j| (d >> j) & 1 == 1));
        }
        Ok(BitSeq::from_bits(out))
    }

    /// `T₁`: output has `n + 2⌈log k⌉ + 10` bits and satisfies Property 1.
    pub fn t1_encode(&self, c: &BitSeq) -> Result<BitSeq> {
        let p = &self.params;
        if c.len() != p.n {
            return Err(Error::invalid(format!("expected {} bits, got {}", p.n, c.len())));
        }
        let (b, r) = (p.run_window, p.run_len);
        let tail = 2 * p.log_k + 10;
        let iw = self.layout.index_width;
        let mut work = c.as_slice().to_vec();
        work.extend(std::iter::repeat_n(true, tail));
        let total = work.len();
        let mut starts = prefix_counts(&run_starts(&work, r));
        let mut n_prime = p.n;
        let mut i = 1usize;
        let mut steps = 0usize;
        loop {
            steps += 1;
            if steps > self.budget() {
                return Err(Error::internal("first-stage transform exceeded its iteration budget"));
            }
            let lo = i - 1;
            let hi = (i + b - r).min(total);
            let has_run = lo < hi && starts[hi] > starts[lo];
            if !has_run {
                let mut record = Vec::new();
                if i + b <= n_prime + 1 {
                    let block: Vec<bool> = work.drain(i - 1..i - 1 + b).collect();
                    push_uint(&mut record, i, iw)?;
                    record.extend(self.phi_encode(&BitSeq::from_bits(block))?.iter());
                    record.push(false);
                    record.extend(std::iter::repeat_n(true, tail));
                    record.push(false);
                    n_prime -= b;
                } else {
                    let pad = i + b - n_prime - 1;
                    if pad == 0 || pad >= r {
                        return Err(Error::internal("first-stage tail block has an impossible length"));
                    }
                    let mut block: Vec<bool> = work.drain(i - 1..n_prime).collect();
                    block.extend(std::iter::repeat_n(false, pad));
                    push_uint(&mut record, i, iw)?;
                    record.extend(self.phi_encode(&BitSeq::from_bits(block))?.iter());
                    record.push(false);
                    record.extend(std::iter::repeat_n(true, tail - pad));
                    record.push(false);
                    n_prime = i - 1;
                }
                work.extend(record);
                debug_assert_eq!(work.len(), total);
                starts = prefix_counts(&run_starts(&work, r));
                i = 1;
                continue;
            }
            if i <= n_prime {
                i += 1;
            } else {
                break;
            }
        }
        Ok(BitSeq::from_bits(work))
    }

    pub fn t1_decode(&self, x: &BitSeq) -> Result<BitSeq> {
        let p = &self.params;
        let total = self.layout.t1_out_len;
        if x.len() != total {
            return Err(Error::invalid(format!("expected {total} bits, got {}", x.len())));
        }
        let b = p.run_window;
        let tail = 2 * p.log_k + 10;
        let iw = self.layout.index_width;
        let mut work = x.as_slice().to_vec();
        let mut steps = 0usize;
        while !work[total - 1] {
            steps += 1;
            if steps > self.budget() {
                return Err(Error::decode("too many first-stage records"));
            }
            let ones = work[..total - 1].iter().rev().take_while(|&&v| v).count();
            if ones == 0 || ones > tail {
                return Err(Error::decode("malformed first-stage record terminator"));
            }
            let record_len = b - tail + ones;
            if record_len > total {
                return Err(Error::decode("first-stage record longer than the sequence"));
            }
            let start = total - record_len;
            let index = bits_to_u64(&work[start..start + iw])? as usize;
            let packed = BitSeq::from_bits(work[start + iw..total - ones - 2].to_vec());
            let block = self.phi_decode(&packed)?;
            let keep = b - tail + ones;
            if block.as_slice()[keep..].iter().any(|&v| v) {
                return Err(Error::decode("nonzero padding in a first-stage record"));
            }
            if index == 0 || index - 1 > start {
                return Err(Error::decode("first-stage record points outside the sequence"));
            }
            work.truncate(start);
            work.splice(index - 1..index - 1, block.as_slice()[..keep].iter().copied());
        }
        if !work[p.n..].iter().all(|&v| v) {
            return Err(Error::decode("first-stage trailer is not all ones"));
        }
        work.truncate(p.n);
        Ok(BitSeq::from_bits(work))
    }

    /// `T₂`: maps `3k + r - 1` bits containing a run `1^r` that starts within
    /// the first `3k` positions to `3k + r - 2` bits containing no such run.
    pub fn t2_encode(&self, b: &BitSeq) -> Result<BitSeq> {
        let p = &self.params;
        let (r, tk) = (p.run_len, 3 * p.k);
        if b.len() != p.pattern_len {
            return Err(Error::invalid(format!("expected {} bits, got {}", p.pattern_len, b.len())));
        }
        let w3 = self.t2_index_width;
        let mut work = b.as_slice().to_vec();
        work.push(false);
        let starts = run_starts(&work, r);
        let first = (0..tk)
            .find(|&j| starts[j])
            .ok_or_else(|| Error::invalid("block has no run of ones near its start"))?;
        work.drain(first..first + r);
        push_uint(&mut work, first + 1, w3)?;
        work.extend(std::iter::repeat_n(false, p.log_k + 3 - w3));
        let mut n_prime = tk - 1;
        let mut i = 1usize;
        loop {
            if i + r <= n_prime + 1 && work[i - 1..i - 1 + r].iter().all(|&v| v) {
                work.drain(i - 1..i - 1 + r);
                push_uint(&mut work, i, w3)?;
                work.extend(std::iter::repeat_n(false, p.log_k + 4 - w3));
                work.push(true);
                n_prime -= r;
                i = 1;
                continue;
            }
            if i <= n_prime {
                i += 1;
            } else {
                break;
            }
        }
        debug_assert_eq!(work.len(), p.pattern_len - 1);
        Ok(BitSeq::from_bits(work))
    }

    pub fn t2_decode(&self, x: &BitSeq) -> Result<BitSeq> {
        let p = &self.params;
        let (r, tk) = (p.run_len, 3 * p.k);
        let len = p.pattern_len - 1;
        if x.len() != len {
            return Err(Error::invalid(format!("expected {len} bits, got {}", x.len())));
        }
        let w3 = self.t2_index_width;
        let mut work = x.as_slice().to_vec();
        let insert_run = |work: &mut Vec<bool>, index: usize| -> Result<()> {
            if index == 0 || index - 1 > work.len() {
                return Err(Error::decode("pattern record points outside the block"));
            }
            work.splice(index - 1..index - 1, std::iter::repeat_n(true, r));
            Ok(())
        };
        let mut steps = 0;
        while work[len - 1] {
            steps += 1;
            if steps > len {
                return Err(Error::decode("too many pattern records"));
            }
            let index = bits_to_u64(&work[tk - 2..tk - 2 + w3])? as usize;
            work.drain(tk - 2..len);
            insert_run(&mut work, index)?;
        }
        let index = bits_to_u64(&work[tk..tk + w3])? as usize;
        work.drain(tk - 1..len);
        insert_run(&mut work, index)?;
        Ok(BitSeq::from_bits(work))
    }

    /// `T`: output has `n + 3k + 3⌈log k⌉ + 15` bits and is k-dense.
    pub fn t_encode(&self, c: &BitSeq) -> Result<BitSeq> {
        let p = &self.params;
        let (k, r, pl) = (p.k, p.run_len, p.pattern_len);
        let q = self.window_blocks;
        let rw = p.quiet_window;
        let iw = self.layout.index_width;
        let mut work = self.t1_encode(c)?.into_bits();
        work.extend(std::iter::repeat_n(false, 3 * k));
        work.extend(std::iter::repeat_n(true, r));
        let total = work.len();
        debug_assert_eq!(total, self.layout.t_out_len);
        let mut good = prefix_counts(&quiet_starts(&work, k, r));
        let mut n_prime = self.layout.t1_out_len;
        let mut i = 1usize;
        let mut steps = 0usize;
        loop {
            steps += 1;
            if steps > self.budget() {
                return Err(Error::internal("second-stage transform exceeded its iteration budget"));
            }
            let in_range = i <= n_prime && i + rw <= total + 1;
            if in_range && good[i + rw - pl] == good[i - 1] {
                let lo = i - 1 + pl;
                let hi = i - 1 + (q - 1) * pl;
                let removed: Vec<bool> = work.drain(lo..hi).collect();
                let mut record = vec![false];
                for block in removed.chunks(pl) {
                    let enc = self
                        .t2_encode(&BitSeq::from_bits(block.to_vec()))
                        .map_err(|e| Error::internal(format!("window block without a run: {e}")))?;
                    record.extend(enc.iter());
                }
                push_uint(&mut record, i + pl, iw)?;
                record.extend(std::iter::repeat_n(true, r));
                record.push(false);
                work.extend(record);
                debug_assert_eq!(work.len(), total);
                n_prime = (n_prime + 2 * pl)
                    .checked_sub(rw)
                    .ok_or_else(|| Error::internal("second-stage window overlaps its records"))?;
                good = prefix_counts(&quiet_starts(&work, k, r));
                i = 1;
                continue;
            }
            if i <= n_prime {
                i += 1;
            } else {
                break;
            }
        }
        Ok(BitSeq::from_bits(work))
    }

    pub fn t_decode(&self, x: &BitSeq) -> Result<BitSeq> {
        let p = &self.params;
        let (k, r, pl) = (p.k, p.run_len, p.pattern_len);
        let total = self.layout.t_out_len;
        if x.len() != total {
            return Err(Error::invalid(format!("expected {total} bits, got {}", x.len())));
        }
        let iw = self.layout.index_width;
        let blocks = self.window_blocks - 2;
        let record_len = blocks * pl;
        let mut work = x.as_slice().to_vec();
        let mut steps = 0usize;
        while !work[total - 1] {
            steps += 1;
            if steps > self.budget() || record_len > total {
                return Err(Error::decode("malformed second-stage record"));
            }
            let start = total - record_len;
            let index = bits_to_u64(&work[total - 1 - r - iw..total - 1 - r])? as usize;
            let mut restored = Vec::with_capacity(record_len);
            for j in 0..blocks {
                let from = start + 1 + j * (pl - 1);
                restored.extend(self.t2_decode(&BitSeq::from_bits(work[from..from + pl - 1].to_vec()))?.iter());
            }
            if index == 0 || index - 1 > start {
                return Err(Error::decode("second-stage record points outside the sequence"));
            }
            work.truncate(start);
            work.splice(index - 1..index - 1, restored);
        }
        let t1_len = self.layout.t1_out_len;
        let trailer = &work[t1_len..];
        if trailer[..3 * k].iter().any(|&v| v) || !trailer[3 * k..].iter().all(|&v| v) {
            return Err(Error::decode("second-stage trailer is malformed"));
        }
        work.truncate(t1_len);
        self.t1_decode(&BitSeq::from_bits(work))
    }
}

/// `T(c)` for a message of `|c|` bits.
pub fn t_encode(c: &BitSeq, k: usize) -> Result<BitSeq> {
    DenseTransform::new(c.len(), k)?.t_encode(c)
}

/// Inverse of [`t_encode`] for messages of `n` bits.
pub fn t_decode(x: &BitSeq, n: usize, k: usize) -> Result<BitSeq> {
    DenseTransform::new(n, k)?.t_decode(x)
}

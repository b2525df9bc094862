//! Varshamov–Tenengolts single-deletion code `Σ i·c_i ≡ 0 (mod N + 1)`.
//!
//! The systematic encoder places check bits at the power-of-two positions
//! `1, 2, 4, …` and message bits everywhere else; the check bits are the
//! binary expansion of the syndrome deficit.

use crate::bitseq::BitSeq;
use crate::error::{Error, Result};

/// `Σ i·c_i mod (N + 1)` with 1-indexed positions.
pub fn vt_syndrome(c: &BitSeq) -> usize {
    let modulus = c.len() + 1;
    c.iter()
        .enumerate()
        .filter(|(_, b)| *b)
        .fold(0, |acc, (i, _)| (acc + i + 1) % modulus)
}

pub fn is_vt_codeword(c: &BitSeq) -> bool {
    vt_syndrome(c) == 0
}

/// Smallest `N` whose non-dyadic positions hold `n` message bits.
pub fn vt_length(n: usize) -> usize {
    (1..).find(|&len: &usize| len - len.ilog2() as usize > n).unwrap()
}

fn is_dyadic(pos: usize) -> bool {
    pos.is_power_of_two()
}

pub fn vt_encode(c: &BitSeq) -> BitSeq {
    let len = vt_length(c.len());
    let mut out = vec![false; len];
    let mut msg = c.iter();
    for (i, slot) in out.iter_mut().enumerate() {
        if !is_dyadic(i + 1) {
            *slot = msg.next().unwrap_or(false);
        }
    }
    let s = vt_syndrome(&BitSeq::from_bits(out.clone()));
    let mut deficit = (len + 1 - s) % (len + 1);
    let mut pos = 1usize;
    while deficit > 0 {
        if deficit & 1 == 1 {
            out[pos - 1] = true;
        }
        deficit >>= 1;
        pos <<= 1;
    }
    BitSeq::from_bits(out)
}

/// Message bits of a codeword of length `vt_length(n)`.
pub fn vt_extract(codeword: &BitSeq, n: usize) -> BitSeq {
    BitSeq::from_bits(
        codeword
            .iter()
            .enumerate()
            .filter(|(i, _)| !is_dyadic(i + 1))
            .map(|(_, b)| b)
            .take(n)
            .collect(),
    )
}

/// Restores a length-`len` codeword from a word missing at most one bit.
pub fn vt_correct(d: &BitSeq, len: usize) -> Result<BitSeq> {
    if d.len() == len {
        return if is_vt_codeword(d) {
            Ok(d.clone())
        } else {
            Err(Error::decode("not a codeword"))
        };
    }
    if d.len() + 1 != len {
        return Err(Error::invalid(format!("expected {} or {len} bits, got {}", len - 1, d.len())));
    }
    let modulus = len + 1;
    let weight = d.count_ones();
    let sum = d
        .iter()
        .enumerate()
        .filter(|(_, b)| *b)
        .fold(0usize, |acc, (i, _)| (acc + i + 1) % modulus);
    let deficit = (modulus - sum) % modulus;
    let bits = d.as_slice();
    let mut out = bits.to_vec();
    if deficit <= weight {
        // A 0 was deleted with `deficit` ones to its right.
        let mut ones_right = 0;
        let mut at = bits.len();
        while ones_right < deficit {
            at -= 1;
            ones_right += bits[at] as usize;
        }
        out.insert(at, false);
    } else {
        // A 1 was deleted with `deficit - weight - 1` zeros to its left.
        let zeros_left = deficit - weight - 1;
        let mut seen = 0;
        let mut at = 0;
        while seen < zeros_left {
            if at >= bits.len() {
                return Err(Error::decode("syndrome inconsistent with the received word"));
            }
            seen += !bits[at] as usize;
            at += 1;
        }
        out.insert(at, true);
    }
    let out = BitSeq::from_bits(out);
    if !is_vt_codeword(&out) {
        return Err(Error::decode("syndrome inconsistent with the received word"));
    }
    Ok(out)
}

/// Recovers an `n`-bit message from its systematic codeword with at most one deletion.
pub fn vt_decode(d: &BitSeq, n: usize) -> Result<BitSeq> {
    Ok(vt_extract(&vt_correct(d, vt_length(n))?, n))
}

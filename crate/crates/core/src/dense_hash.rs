//! `Hash_k` for k-dense sequences and its block-wise decoder.
//!
//! The synchronization vector splits a sequence into blocks between
//! consecutive synchronization positions. Each block is hashed with the
//! small-block hash `H`, and a Reed–Solomon code protecting the block hashes
//! against `2k` substitutions supplies the redundancy. Given the
//! synchronization vector, a received subsequence is cut at the surviving
//! synchronization positions, which yields correct block hashes everywhere
//! except near deletions; the Reed–Solomon decoder repairs those, and every
//! block is then rebuilt from its hash and an aligned slice of the received word.

use std::sync::Arc;

use serde::Serialize;

use crate::bitseq::BitSeq;
use crate::error::{Error, Result};
use crate::rs::{GaloisField, RsCode};
use crate::small_hash::SmallBlockHash;
use crate::syncvec::{ceil_log2, sync_bits, sync_positions, SyncParams};

/// How the longest hashed block is bounded when sizing the Reed–Solomon symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockBound {
    /// `min(L, n)`: no block of a length-`n` sequence exceeds `n` bits.
    #[default]
    Tight,
    /// `L`, the k-dense gap bound.
    Nominal,
}

impl std::str::FromStr for BlockBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tight" => Ok(BlockBound::Tight),
            "nominal" => Ok(BlockBound::Nominal),
            other => Err(Error::invalid(format!("unknown block bound {other:?}"))),
        }
    }
}

/// Blocks `a_0, …, a_J` between synchronization positions `t_1 < … < t_J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// `t_1, …, t_J`, 1-indexed.
    pub positions: Vec<usize>,
    pub blocks: Vec<BitSeq>,
}

impl BlockDecomposition {
    /// `a_0, 1, a_1, 1, …, 1, a_J`.
    pub fn reassemble(&self) -> BitSeq {
        let mut out = BitSeq::new();
        for (j, block) in self.blocks.iter().enumerate() {
            if j > 0 {
                out.push(true);
            }
            out.extend_from(block);
        }
        out
    }
}

/// Cuts `c` at the 1 entries of `sync`.
pub fn split_blocks(c: &BitSeq, sync: &BitSeq) -> Result<BlockDecomposition> {
    if c.len() != sync.len() {
        return Err(Error::invalid(format!(
            "sequence has {} bits but synchronization vector has {}",
            c.len(),
            sync.len()
        )));
    }
    let positions = sync_positions(sync);
    let mut blocks = Vec::with_capacity(positions.len() + 1);
    let mut prev = 0usize;
    for &t in positions.iter().chain(std::iter::once(&(c.len() + 1))) {
        blocks.push(c.slice(prev..t - 1));
        prev = t;
    }
    Ok(BlockDecomposition { positions, blocks })
}

/// `Hash_k` and its decoder for sequences of one length.
#[derive(Debug, Clone)]
pub struct DenseHash {
    params: SyncParams,
    small: SmallBlockHash,
    rs: RsCode,
    max_block: usize,
}

/// Field degree `max(8, ⌈log₂(n + 4k + 2)⌉)`.
pub fn field_degree(n: usize, k: usize) -> u32 {
    ceil_log2((n + 4 * k + 2) as u64).max(8)
}

impl DenseHash {
    /// Builds the hash for length-`n` sequences. `small` is the block hash
    /// shared with the rest of the codec.
    pub fn new(n: usize, k: usize, bound: BlockBound, small: SmallBlockHash, field: Arc<GaloisField>) -> Result<Self> {
        let params = SyncParams::new(n, k)?;
        if small.coloring().k() != k {
            return Err(Error::invalid("block hash was built for a different k"));
        }
        let max_block = match bound {
            BlockBound::Tight => params.max_gap.min(n),
            BlockBound::Nominal => params.max_gap,
        };
        let m = field.degree() as usize;
        let symbol_width = small.hash_len(max_block).div_ceil(m).max(1) * m;
        let rs = RsCode::new(field, 2 * k, symbol_width)?;
        if rs.max_message_len() < n + 1 {
            return Err(Error::invalid("field too small for the number of blocks"));
        }
        Ok(Self {
            params,
            small,
            rs,
            max_block,
        })
    }

    /// Convenience constructor building its own block hash and field.
    pub fn standalone(n: usize, k: usize, bound: BlockBound) -> Result<Self> {
        let small = SmallBlockHash::new(n, k)?;
        let field = Arc::new(GaloisField::new(field_degree(n, k))?);
        Self::new(n, k, bound, small, field)
    }

    pub fn params(&self) -> &SyncParams {
        &self.params
    }

    pub fn small_hash(&self) -> &SmallBlockHash {
        &self.small
    }

    /// Longest block the fixed symbol width accommodates.
    pub fn max_block(&self) -> usize {
        self.max_block
    }

    pub fn symbol_width(&self) -> usize {
        self.rs.symbol_width()
    }

    /// Output length of [`DenseHash::hash`]: `4k` symbols.
    pub fn hash_len(&self) -> usize {
        self.rs.parity_symbols() * self.rs.symbol_width()
    }

    pub fn sync_vector(&self, c: &BitSeq) -> BitSeq {
        BitSeq::from_bits(sync_bits(c.as_slice(), self.params.k, self.params.run_len))
    }

    fn symbol(&self, block: &BitSeq) -> Result<BitSeq> {
        let mut h = if block.is_empty() {
            BitSeq::new()
        } else {
            self.small.hash(block)?
        };
        let width = self.rs.symbol_width();
        if h.len() > width {
            return Err(Error::invalid(format!("block of {} bits exceeds the symbol width", block.len())));
        }
        h.extend_from(&BitSeq::zeros(width - h.len()));
        Ok(h)
    }

    pub fn hash(&self, c: &BitSeq) -> Result<BitSeq> {
        if c.len() != self.params.n {
            return Err(Error::invalid(format!("expected {} bits, got {}", self.params.n, c.len())));
        }
        let split = split_blocks(c, &self.sync_vector(c))?;
        if let Some(b) = split.blocks.iter().find(|b| b.len() > self.max_block) {
            return Err(Error::invalid(format!(
                "block of {} bits exceeds the bound {}; input is not k-dense",
                b.len(),
                self.max_block
            )));
        }
        let symbols = split.blocks.iter().map(|b| self.symbol(b)).collect::<Result<Vec<_>>>()?;
        let red = self.rs.redundancy(&symbols)?;
        Ok(BitSeq::concat(red.iter()))
    }

    fn check_inputs(&self, d: &BitSeq, sync: &BitSeq) -> Result<usize> {
        let n = self.params.n;
        if sync.len() != n {
            return Err(Error::invalid(format!("synchronization vector must have {n} bits")));
        }
        n.checked_sub(d.len())
            .filter(|&m| m <= self.params.k)
            .ok_or_else(|| Error::invalid(format!("received {} bits for a {n}-bit sequence", d.len())))
    }

    /// Step 2: blocks read off the received word between surviving
    /// synchronization positions, or zero words where none survive.
    pub fn candidate_blocks(&self, d: &BitSeq, sync: &BitSeq) -> Result<Vec<BitSeq>> {
        let missing = self.check_inputs(d, sync)?;
        let n = self.params.n;
        let dl = d.len();
        let mut marks = vec![false; dl + 2];
        marks[0] = true;
        marks[dl + 1] = true;
        for (i, b) in sync_bits(d.as_slice(), self.params.k, self.params.run_len).into_iter().enumerate() {
            marks[i + 1] = b;
        }
        let mut ts = vec![0usize];
        ts.extend(sync_positions(sync));
        ts.push(n + 1);
        let last = ts.len() - 1;
        let anchors: Vec<Option<usize>> = ts
            .iter()
            .enumerate()
            .map(|(j, &t)| match j {
                0 => Some(0),
                j if j == last => Some(dl + 1),
                _ => (t.saturating_sub(missing).max(1)..=t.min(dl)).rev().find(|&p| marks[p]),
            })
            .collect();
        Ok((0..ts.len() - 1)
            .map(|j| match (anchors[j], anchors[j + 1]) {
                (Some(a), Some(b)) if b > a && b - a - 1 <= self.max_block => d.slice(a..b - 1),
                _ => BitSeq::zeros(ts[j + 1] - ts[j] - 1),
            })
            .collect())
    }

    /// Step 4 inputs: `b_j = d[t_j + 1 ..= t_{j+1} - m - 1]` for `m` missing bits.
    pub fn received_blocks(&self, d: &BitSeq, sync: &BitSeq) -> Result<Vec<BitSeq>> {
        let missing = self.check_inputs(d, sync)?;
        let n = self.params.n;
        let mut ts = vec![0usize];
        ts.extend(sync_positions(sync));
        ts.push(n + 1);
        ts.windows(2)
            .map(|w| {
                let end = (w[1] - 1)
                    .checked_sub(missing)
                    .filter(|&e| e >= w[0])
                    .ok_or_else(|| Error::decode("block shorter than the number of deletions"))?;
                Ok(d.slice(w[0]..end))
            })
            .collect()
    }

    /// Rebuilds a k-dense sequence from a subsequence missing at most `k`
    /// bits, its synchronization vector and its hash.
    pub fn decode(&self, d: &BitSeq, sync: &BitSeq, hk: &BitSeq) -> Result<BitSeq> {
        let missing = self.check_inputs(d, sync)?;
        if hk.len() != self.hash_len() {
            return Err(Error::invalid(format!(
                "hash has {} bits, expected {}",
                hk.len(),
                self.hash_len()
            )));
        }
        if missing == 0 {
            return Ok(d.clone());
        }
        let n = self.params.n;
        let positions = sync_positions(sync);
        if positions.iter().any(|&t| !(1..=n).contains(&t)) || positions.len() + 1 > self.rs.max_message_len() {
            return Err(Error::decode("synchronization vector does not fit the code"));
        }
        let candidates = self.candidate_blocks(d, sync)?;
        let symbols = candidates.iter().map(|b| self.symbol(b)).collect::<Result<Vec<_>>>()?;
        let width = self.rs.symbol_width();
        let parity: Vec<BitSeq> = (0..self.rs.parity_symbols())
            .map(|i| hk.slice(i * width..(i + 1) * width))
            .collect();
        let hashes = self.rs.correct(&symbols, &parity)?;

        let received = self.received_blocks(d, sync)?;
        let mut ts = vec![0usize];
        ts.extend(positions);
        ts.push(n + 1);
        let mut blocks = Vec::with_capacity(received.len());
        for (j, (b, h)) in received.iter().zip(&hashes).enumerate() {
            let len = ts[j + 1] - ts[j] - 1;
            if len == 0 {
                blocks.push(BitSeq::new());
                continue;
            }
            let hash_len = self.small.hash_len(len);
            if h.as_slice()[hash_len..].iter().any(|&v| v) {
                return Err(Error::decode(format!("corrected hash of block {j} has nonzero padding")));
            }
            let block = self
                .small
                .decode(b, &h.slice(0..hash_len), len)
                .map_err(|e| Error::decode(format!("block {j}: {e}")))?;
            blocks.push(block);
        }
        Ok(BlockDecomposition {
            positions: ts[1..ts.len() - 1].to_vec(),
            blocks,
        }
        .reassemble())
    }
}

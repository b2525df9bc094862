//! Systematic Reed–Solomon redundancy over wide symbols.
//!
//! A wide symbol of `rows · m` bits is cut into `rows` slices of `m` bits.
//! Slice `r` of every symbol forms one codeword over GF(2^m), so a substituted
//! wide symbol costs at most one symbol error per row. Decoding uses
//! syndromes, Berlekamp–Massey, a Chien search and Forney's formula.

use std::sync::Arc;

use crate::bitseq::{bits_to_u64, BitSeq};
use crate::error::{Error, Result};

/// Primitive polynomials (with the leading term) for GF(2^m), `m = 2..=24`.
const PRIMITIVE_POLYS: [u32; 23] = [
    0x7, 0xb, 0x13, 0x25, 0x43, 0x89, 0x11d, 0x211, 0x409, 0x805, 0x1053, 0x201b, 0x4443, 0x8003, 0x1100b, 0x20009,
    0x40081, 0x80027, 0x100009, 0x200005, 0x400003, 0x800021, 0x100001b,
];

pub const MIN_DEGREE: u32 = 2;
pub const MAX_DEGREE: u32 = 24;

/// Primitive polynomial used for GF(2^m).
pub fn primitive_poly(m: u32) -> Option<u32> {
    (MIN_DEGREE..=MAX_DEGREE)
        .contains(&m)
        .then(|| PRIMITIVE_POLYS[(m - MIN_DEGREE) as usize])
}

/// GF(2^m) with log/antilog tables over the generator `α = x`.
#[derive(Debug, Clone)]
pub struct GaloisField {
    m: u32,
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl GaloisField {
    pub fn new(m: u32) -> Result<Self> {
        let poly = primitive_poly(m)
            .ok_or_else(|| Error::invalid(format!("field degree {m} outside {MIN_DEGREE}..={MAX_DEGREE}")))?;
        let size = 1u32 << m;
        let order = size - 1;
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; size as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x;
            log[x as usize] = i;
            x <<= 1;
            if x & size != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::internal(format!("polynomial {poly:#x} is not primitive")));
        }
        for i in order..2 * order {
            exp[i as usize] = exp[(i - order) as usize];
        }
        Ok(Self { m, order, exp, log })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of nonzero elements, `2^m - 1`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// `α^e`.
    pub fn alpha_pow(&self, e: u64) -> u32 {
        self.exp[(e % self.order as u64) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.exp[((self.order - self.log[a as usize]) % self.order) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// Evaluates a polynomial given highest-degree coefficient first.
    fn eval_desc(&self, poly: &[u32], x: u32) -> u32 {
        poly.iter().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }

    /// Evaluates a polynomial given lowest-degree coefficient first.
    fn eval_asc(&self, poly: &[u32], x: u32) -> u32 {
        poly.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}

/// Reed–Solomon code with `2t` parity symbols over interleaved wide symbols.
#[derive(Debug, Clone)]
pub struct RsCode {
    field: Arc<GaloisField>,
    correctable: usize,
    symbol_width: usize,
    /// Generator `Π_{j=1}^{2t} (x - α^j)`, highest degree first, monic.
    generator: Vec<u32>,
}

impl RsCode {
    /// `correctable` substitutions per codeword; symbols of `symbol_width`
    /// bits, which must be a positive multiple of the field degree.
    pub fn new(field: Arc<GaloisField>, correctable: usize, symbol_width: usize) -> Result<Self> {
        let m = field.degree() as usize;
        if symbol_width == 0 || !symbol_width.is_multiple_of(m) {
            return Err(Error::invalid(format!(
                "symbol width {symbol_width} is not a positive multiple of {m}"
            )));
        }
        if 2 * correctable >= field.order() as usize {
            return Err(Error::invalid("too many parity symbols for the field"));
        }
        let mut generator = vec![1u32];
        for j in 1..=2 * correctable as u64 {
            let root = field.alpha_pow(j);
            let mut next = vec![0u32; generator.len() + 1];
            for (i, &g) in generator.iter().enumerate() {
                next[i] ^= g;
                next[i + 1] ^= field.mul(g, root);
            }
            generator = next;
        }
        Ok(Self {
            field,
            correctable,
            symbol_width,
            generator,
        })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn parity_symbols(&self) -> usize {
        2 * self.correctable
    }

    pub fn symbol_width(&self) -> usize {
        self.symbol_width
    }

    fn rows(&self) -> usize {
        self.symbol_width / self.field.degree() as usize
    }

    /// Longest message the field supports.
    pub fn max_message_len(&self) -> usize {
        self.field.order() as usize - self.parity_symbols()
    }

    fn check_symbols(&self, symbols: &[BitSeq], what: &str) -> Result<()> {
        if let Some(s) = symbols.iter().find(|s| s.len() != self.symbol_width) {
            return Err(Error::invalid(format!(
                "{what} symbol has {} bits, expected {}",
                s.len(),
                self.symbol_width
            )));
        }
        Ok(())
    }

    fn row_values(&self, symbols: &[BitSeq], row: usize) -> Vec<u32> {
        let m = self.field.degree() as usize;
        symbols
            .iter()
            .map(|s| bits_to_u64(&s.as_slice()[row * m..(row + 1) * m]).expect("m <= 24") as u32)
            .collect()
    }

    fn assemble(&self, rows: &[Vec<u32>], count: usize) -> Vec<BitSeq> {
        let m = self.field.degree() as usize;
        (0..count)
            .map(|col| {
                let mut bits = Vec::with_capacity(self.symbol_width);
                for row in rows {
                    let v = row[col];
                    bits.extend((0..m).rev().map(|j| (v >> j) & 1 == 1));
                }
                BitSeq::from_bits(bits)
            })
            .collect()
    }

    fn parity_row(&self, msg: &[u32]) -> Vec<u32> {
        let p = self.parity_symbols();
        let mut rem = vec![0u32; p];
        for &c in msg {
            let factor = c ^ rem[0];
            rem.rotate_left(1);
            rem[p - 1] = 0;
            if factor != 0 {
                for (r, &g) in rem.iter_mut().zip(&self.generator[1..]) {
                    *r ^= self.field.mul(g, factor);
                }
            }
        }
        rem
    }

    /// The `2t` parity symbols of a systematic codeword whose message part is `symbols`.
    pub fn redundancy(&self, symbols: &[BitSeq]) -> Result<Vec<BitSeq>> {
        self.check_symbols(symbols, "message")?;
        if symbols.is_empty() || symbols.len() > self.max_message_len() {
            return Err(Error::invalid(format!(
                "message of {} symbols outside 1..={}",
                symbols.len(),
                self.max_message_len()
            )));
        }
        if self.parity_symbols() == 0 {
            return Ok(Vec::new());
        }
        let rows: Vec<Vec<u32>> = (0..self.rows())
            .map(|r| self.parity_row(&self.row_values(symbols, r)))
            .collect();
        Ok(self.assemble(&rows, self.parity_symbols()))
    }

    /// Corrects up to `t` substituted message or parity symbols and returns
    /// the message part.
    pub fn correct(&self, received: &[BitSeq], redundancy: &[BitSeq]) -> Result<Vec<BitSeq>> {
        self.check_symbols(received, "message")?;
        self.check_symbols(redundancy, "parity")?;
        if redundancy.len() != self.parity_symbols() {
            return Err(Error::invalid(format!(
                "expected {} parity symbols, got {}",
                self.parity_symbols(),
                redundancy.len()
            )));
        }
        if received.is_empty() || received.len() > self.max_message_len() {
            return Err(Error::invalid("message length outside the supported range"));
        }
        let mut word: Vec<BitSeq> = received.to_vec();
        word.extend_from_slice(redundancy);
        let mut rows = Vec::with_capacity(self.rows());
        for r in 0..self.rows() {
            let mut row = self.row_values(&word, r);
            self.correct_row(&mut row)
                .map_err(|e| Error::decode(format!("row {}: {e}", r + 1)))?;
            rows.push(row);
        }
        Ok(self.assemble(&rows, received.len()))
    }

    fn syndromes(&self, word: &[u32]) -> Vec<u32> {
        (1..=self.parity_symbols() as u64)
            .map(|j| self.field.eval_desc(word, self.field.alpha_pow(j)))
            .collect()
    }

    fn correct_row(&self, word: &mut [u32]) -> std::result::Result<(), String> {
        let f = &*self.field;
        let synd = self.syndromes(word);
        if synd.iter().all(|&s| s == 0) {
            return Ok(());
        }
        let locator = berlekamp_massey(f, &synd);
        let errors = locator.len() - 1;
        if errors > self.correctable {
            return Err(format!("{errors} errors exceed the correction radius"));
        }
        let n = word.len();
        // Ω(x) = S(x)Λ(x) mod x^{2t}, ascending coefficients.
        let mut omega = vec![0u32; synd.len()];
        for (i, &s) in synd.iter().enumerate() {
            for (j, &l) in locator.iter().enumerate() {
                if i + j < omega.len() {
                    omega[i + j] ^= f.mul(s, l);
                }
            }
        }
        // Formal derivative: only odd-degree terms survive in characteristic 2.
        let deriv: Vec<u32> = locator
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();
        let mut found = 0;
        for e in 0..n {
            let x_inv = f.alpha_pow((f.order() as u64 - (e as u64 % f.order() as u64)) % f.order() as u64);
            if f.eval_asc(&locator, x_inv) != 0 {
                continue;
            }
            let denom = f.eval_asc(&deriv, x_inv);
            let mag = f
                .div(f.eval_asc(&omega, x_inv), denom)
                .ok_or_else(|| "repeated error locator root".to_string())?;
            word[n - 1 - e] ^= mag;
            found += 1;
        }
        if found != errors {
            return Err("error locator roots fall outside the codeword".into());
        }
        if self.syndromes(word).iter().any(|&s| s != 0) {
            return Err("residual syndrome after correction".into());
        }
        Ok(())
    }
}

/// Error-locator polynomial (ascending coefficients, `Λ(0) = 1`).
fn berlekamp_massey(f: &GaloisField, synd: &[u32]) -> Vec<u32> {
    let mut lambda = vec![1u32];
    let mut prev = vec![1u32];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = 1u32;
    for r in 0..synd.len() {
        let mut disc = synd[r];
        for i in 1..=len.min(lambda.len() - 1) {
            disc ^= f.mul(lambda[i], synd[r - i]);
        }
        if disc == 0 {
            shift += 1;
            continue;
        }
        let coef = f.div(disc, prev_disc).expect("nonzero discrepancy");
        let mut next = lambda.clone();
        if next.len() < prev.len() + shift {
            next.resize(prev.len() + shift, 0);
        }
        for (i, &p) in prev.iter().enumerate() {
            next[i + shift] ^= f.mul(coef, p);
        }
        if 2 * len <= r {
            len = r + 1 - len;
            prev = lambda;
            prev_disc = disc;
            shift = 1;
        } else {
            shift += 1;
        }
        lambda = next;
    }
    while lambda.len() > 1 && *lambda.last().unwrap() == 0 {
        lambda.pop();
    }
    lambda
}

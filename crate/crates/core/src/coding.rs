//! Repetition codes with majority decoding and first-order Reed-Muller codes
//! with fast Hadamard transform decoding.

use alloc::vec::Vec;

use crate::error::{check_unit, Error, Result};

/// Largest repetition factor [`min_repetition`] will search.
pub const MAX_REPETITION: u64 = 10_000_001;
/// Above this length binomial coefficients no longer fit the exact table.
const EXACT_BINOMIAL_MAX_N: u64 = 127;

/// Odd repetition factor `n`; majority decoding never ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepetitionCode {
    n: u64,
}

impl RepetitionCode {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(Error::Validation(alloc::format!(
                "repetition factor must be an odd positive integer, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

pub fn rep_encode(symbol: bool, code: RepetitionCode) -> Vec<bool> {
    alloc::vec![symbol; code.n as usize]
}

pub fn rep_decode(received: &[bool], code: RepetitionCode) -> Result<bool> {
    if received.len() as u64 != code.n {
        return Err(Error::Format(alloc::format!(
            "received {} bits, repetition code expects {}",
            received.len(),
            code.n
        )));
    }
    let ones = received.iter().filter(|&&b| b).count() as u64;
    Ok(2 * ones > code.n)
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Row `n` of Pascal's triangle, exact for `n <= 127`.
fn pascal_row(n: u64) -> Vec<u128> {
    let mut row = alloc::vec![1u128];
    for _ in 0..n {
        let mut next = alloc::vec![1u128; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    row
}

/// `P[Binomial(n, p) > n/2]`.
fn majority_tail(n: u64, p: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let first = n / 2 + 1;
    if n <= EXACT_BINOMIAL_MAX_N {
        let row = pascal_row(n);
        return compensated_sum((first..=n).map(|k| {
            row[k as usize] as f64 * libm::pow(p, k as f64) * libm::pow(1.0 - p, (n - k) as f64)
        }))
        .clamp(0.0, 1.0);
    }
    // Log-space terms, shifted by the largest for stability.
    let (lp, lq) = (libm::log(p), libm::log1p(-p));
    let ln_n1 = libm::lgamma((n + 1) as f64);
    let log_term = |k: u64| {
        ln_n1 - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
            + k as f64 * lp
            + (n - k) as f64 * lq
    };
    let peak = (first..=n).map(log_term).fold(f64::NEG_INFINITY, f64::max);
    let scaled = compensated_sum((first..=n).map(|k| libm::exp(log_term(k) - peak)));
    (libm::exp(peak) * scaled).clamp(0.0, 1.0)
}

/// Exact probability that majority decoding of `code` fails on a BSC(`p`).
pub fn rep_block_error(code: RepetitionCode, p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(majority_tail(code.n, p))
}

/// Smallest odd `n` whose majority-decoding failure probability is at most
/// `target`.
pub fn min_repetition(p: f64, target: f64) -> Result<RepetitionCode> {
    check_unit("p", p)?;
    if p >= 0.5 {
        return Err(Error::Infeasible(alloc::format!(
            "crossover {p} >= 0.5: the channel has zero capacity and no repetition factor helps"
        )));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain { name: "target", value: target, range: "(0, 1)" });
    }
    let fails = |n: u64| majority_tail(n, p) > target;
    if !fails(1) {
        return RepetitionCode::new(1);
    }
    // Bracket in units of odd numbers n = 2j + 1, then bisect on j.
    let (mut lo, mut hi) = (0u64, 1u64);
    while fails(2 * hi + 1) {
        lo = hi;
        hi *= 2;
        if 2 * hi + 1 > MAX_REPETITION {
            if fails(MAX_REPETITION) {
                return Err(Error::Infeasible(alloc::format!(
                    "target {target} needs more than {MAX_REPETITION} repetitions at crossover {p}"
                )));
            }
            hi = (MAX_REPETITION - 1) / 2;
            break;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fails(2 * mid + 1) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RepetitionCode::new(2 * hi + 1)
}

/// First-order Reed-Muller code RM(1, m): length `2^m`, dimension `m + 1`,
/// minimum distance `2^(m-1)`.
///
/// Message bit 0 multiplies the all-ones row; message bit `i >= 1` multiplies
/// the coordinate function `x -> bit (i - 1) of x` over positions
/// `x in 0..2^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReedMullerCode {
    m: u32,
}

impl ReedMullerCode {
    pub const MAX_M: u32 = 20;

    pub fn new(m: u32) -> Result<Self> {
        if !(2..=Self::MAX_M).contains(&m) {
            return Err(Error::Domain { name: "m", value: f64::from(m), range: "[2, 20]" });
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn block_length(&self) -> usize {
        1 << self.m
    }

    pub fn message_length(&self) -> usize {
        self.m as usize + 1
    }

    pub fn min_distance(&self) -> usize {
        1 << (self.m - 1)
    }

    /// Error weights strictly below this are always corrected.
    pub fn correction_radius(&self) -> usize {
        (self.min_distance() - 1) / 2
    }
}

fn message_index(message: &[bool]) -> u64 {
    message.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
}

pub fn rm_encode(message: &[bool], code: ReedMullerCode) -> Result<Vec<bool>> {
    if message.len() != code.message_length() {
        return Err(Error::Format(alloc::format!(
            "message has {} bits, RM(1,{}) expects {}",
            message.len(),
            code.m,
            code.message_length()
        )));
    }
    let index = message_index(message);
    let (constant, linear) = (index & 1 == 1, index >> 1);
    Ok((0..code.block_length() as u64)
        .map(|x| constant ^ ((linear & x).count_ones() & 1 == 1))
        .collect())
}

/// In-place Walsh-Hadamard transform.
fn fast_hadamard(values: &mut [i64]) {
    let mut half = 1;
    while half < values.len() {
        for block in values.chunks_exact_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        half *= 2;
    }
}

/// Maximum-correlation decoding. Returns the message and the number of bits
/// in which `received` differs from the chosen codeword. Ties go to the
/// lowest message index, with bit 0 of the message as the least significant.
pub fn rm_decode(received: &[bool], code: ReedMullerCode) -> Result<(Vec<bool>, usize)> {
    let len = code.block_length();
    if received.len() != len {
        return Err(Error::Format(alloc::format!(
            "received {} bits, RM(1,{}) expects {len}",
            received.len(),
            code.m
        )));
    }
    let mut spectrum: Vec<i64> = received.iter().map(|&b| if b { -1 } else { 1 }).collect();
    fast_hadamard(&mut spectrum);
    // Candidate index = constant | (linear << 1); correlation = ±spectrum[linear].
    let mut best = (i64::MIN, 0u64);
    for index in 0..(2 * len as u64) {
        let s = spectrum[(index >> 1) as usize];
        let corr = if index & 1 == 1 { -s } else { s };
        if corr > best.0 {
            best = (corr, index);
        }
    }
    let (corr, index) = best;
    let message = (0..code.message_length()).map(|i| index >> i & 1 == 1).collect();
    let distance = ((len as i64 - corr) / 2) as usize;
    Ok((message, distance))
}

/// Code used on the binary classifier channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeSpec {
    Uncoded,
    Repetition(RepetitionCode),
    ReedMuller(ReedMullerCode),
}

impl CodeSpec {
    pub fn message_length(&self) -> usize {
        match self {
            CodeSpec::Uncoded | CodeSpec::Repetition(_) => 1,
            CodeSpec::ReedMuller(c) => c.message_length(),
        }
    }

    pub fn block_length(&self) -> usize {
        match self {
            CodeSpec::Uncoded => 1,
            CodeSpec::Repetition(c) => c.n as usize,
            CodeSpec::ReedMuller(c) => c.block_length(),
        }
    }

    /// Encode a message of [`CodeSpec::message_length`] bits.
    pub fn encode(&self, message: &[bool]) -> Result<Vec<bool>> {
        match self {
            CodeSpec::Uncoded | CodeSpec::Repetition(_) if message.len() != 1 => Err(Error::Format(
                alloc::format!("message has {} bits, expected 1", message.len()),
            )),
            CodeSpec::Uncoded => Ok(message.to_vec()),
            CodeSpec::Repetition(c) => Ok(rep_encode(message[0], *c)),
            CodeSpec::ReedMuller(c) => rm_encode(message, *c),
        }
    }

    pub fn decode(&self, received: &[bool]) -> Result<Vec<bool>> {
        match self {
            CodeSpec::Uncoded if received.len() != 1 => Err(Error::Format(alloc::format!(
                "received {} bits, expected 1",
                received.len()
            ))),
            CodeSpec::Uncoded => Ok(received.to_vec()),
            CodeSpec::Repetition(c) => Ok(alloc::vec![rep_decode(received, *c)?]),
            CodeSpec::ReedMuller(c) => Ok(rm_decode(received, *c)?.0),
        }
    }

    /// Exact block error on a BSC(`p`) where a closed form is available.
    pub fn analytic_block_error(&self, p: f64) -> Result<Option<f64>> {
        check_unit("p", p)?;
        Ok(match self {
            CodeSpec::Uncoded => Some(p),
            CodeSpec::Repetition(c) => Some(majority_tail(c.n, p)),
            CodeSpec::ReedMuller(_) => None,
        })
    }
}

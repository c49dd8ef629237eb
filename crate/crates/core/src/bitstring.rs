//! Fixed-length bitstrings, qubit-label sets, Ehrlich enumeration of
//! weight-k words and per-step gate parameters.
//!
//! Two index spaces are used. String positions `p` run 1..=n left to right;
//! qubit labels `q` run 1..=n right to left, with `q = n - p + 1`. Internally
//! bit `q - 1` of the mask stores qubit `q`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Longest supported bitstring.
pub const MAX_QUBITS: usize = 64;

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Position to label (and back: the map is an involution).
pub fn label_of_position(n: usize, p: usize) -> usize {
    n - p + 1
}

pub fn position_of_label(n: usize, q: usize) -> usize {
    n - q + 1
}

/// A set of qubit labels in 1..=64.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct QubitSet(u64);

impl QubitSet {
    pub const EMPTY: QubitSet = QubitSet(0);

    pub fn from_mask(mask: u64) -> Self {
        QubitSet(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn single(q: usize) -> Self {
        debug_assert!((1..=64).contains(&q));
        QubitSet(1u64 << (q - 1))
    }

    /// Labels `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        (lo..=hi).collect()
    }

    pub fn contains(self, q: usize) -> bool {
        (1..=64).contains(&q) && self.0 >> (q - 1) & 1 == 1
    }

    pub fn insert(&mut self, q: usize) {
        self.0 |= 1u64 << (q - 1);
    }

    pub fn remove(&mut self, q: usize) {
        self.0 &= !(1u64 << (q - 1));
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: QubitSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: QubitSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    /// Labels in ascending order.
    pub fn iter(self) -> impl DoubleEndedIterator<Item = usize> {
        (1..=64usize).filter(move |&q| self.contains(q))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for QubitSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = QubitSet::EMPTY;
        for q in iter {
            s.insert(q);
        }
        s
    }
}

impl BitOr for QubitSet {
    type Output = QubitSet;
    fn bitor(self, rhs: Self) -> Self {
        QubitSet(self.0 | rhs.0)
    }
}

impl BitAnd for QubitSet {
    type Output = QubitSet;
    fn bitand(self, rhs: Self) -> Self {
        QubitSet(self.0 & rhs.0)
    }
}

impl Sub for QubitSet {
    type Output = QubitSet;
    fn sub(self, rhs: Self) -> Self {
        QubitSet(self.0 & !rhs.0)
    }
}

impl fmt::Debug for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for QubitSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for QubitSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        let mut s = QubitSet::EMPTY;
        for q in labels {
            if !(1..=64).contains(&q) {
                return Err(serde::de::Error::custom(format!("qubit label {q} out of range")));
            }
            if s.contains(q) {
                return Err(serde::de::Error::custom(format!("qubit label {q} repeated")));
            }
            s.insert(q);
        }
        Ok(s)
    }
}

/// A binary word of length `n`, printed left to right as `q_n … q_1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    n: usize,
    bits: u64,
}

impl BitString {
    pub fn new(n: usize, mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!("bitstring length {n} outside 1..=64")));
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::InvalidArgument(format!("mask {mask:#x} has bits above length {n}")));
        }
        Ok(BitString { n, bits: mask })
    }

    pub(crate) fn from_mask_unchecked(n: usize, mask: u64) -> Self {
        BitString { n, bits: mask }
    }

    pub fn zeros(n: usize) -> Self {
        BitString { n, bits: 0 }
    }

    pub fn ones_word(n: usize) -> Self {
        BitString { n, bits: full_mask(n) }
    }

    /// `1^k 0^(n-k)`: ones on labels n-k+1..=n.
    pub fn leading_ones(n: usize, k: usize) -> Self {
        BitString { n, bits: full_mask(n) & !full_mask(n - k) }
    }

    /// `0^(n-k) 1^k`: ones on labels 1..=k.
    pub fn trailing_ones(n: usize, k: usize) -> Self {
        BitString { n, bits: full_mask(k) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn label(&self, q: usize) -> bool {
        self.bits >> (q - 1) & 1 == 1
    }

    pub fn position(&self, p: usize) -> bool {
        self.label(label_of_position(self.n, p))
    }

    fn flip_position(&mut self, p: usize) {
        self.bits ^= 1u64 << (label_of_position(self.n, p) - 1);
    }

    pub fn ones(&self) -> QubitSet {
        QubitSet(self.bits)
    }

    pub fn zeros_set(&self) -> QubitSet {
        QubitSet(!self.bits & full_mask(self.n))
    }

    pub fn complement(&self) -> Self {
        BitString { n: self.n, bits: !self.bits & full_mask(self.n) }
    }

    pub fn with_flipped(&self, labels: QubitSet) -> Self {
        BitString { n: self.n, bits: self.bits ^ labels.mask() }
    }

    /// Number of positions where the two words differ.
    pub fn distance(&self, other: &BitString) -> usize {
        (self.bits ^ other.bits).count_ones() as usize
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 1..=self.n {
            f.write_str(if self.position(p) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidBitString(s.to_string()));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::InvalidBitString(s.to_string())),
            }
        }
        Ok(BitString { n, bits })
    }
}

impl Not for BitString {
    type Output = BitString;
    fn not(self) -> BitString {
        self.complement()
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A bitstring plus the string positions still marked for exchange.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EhrlichState {
    pub b: BitString,
    pub marked: BTreeSet<usize>,
}

impl EhrlichState {
    pub fn new(b: BitString, marked: impl IntoIterator<Item = usize>) -> Result<Self> {
        let marked: BTreeSet<usize> = marked.into_iter().collect();
        if let Some(&p) = marked.iter().find(|&&p| p == 0 || p > b.n()) {
            return Err(Error::MalformedState(format!("marked position {p} outside 1..={}", b.n())));
        }
        Ok(EhrlichState { b, marked })
    }

    /// `1^k 0^(n-k)` with the ones marked. A word with no zero has nothing
    /// to exchange, so `k = n` starts with an empty mark set.
    pub fn initial(n: usize, k: usize) -> Self {
        let marked = if k < n { (1..=k).collect() } else { BTreeSet::new() };
        EhrlichState { b: BitString::leading_ones(n, k), marked }
    }

    /// `0^(n-k) 1^k` with the zeros marked.
    pub fn initial_zeros_marked(n: usize, k: usize) -> Self {
        let marked = if k > 0 { (1..=n - k).collect() } else { BTreeSet::new() };
        EhrlichState { b: BitString::trailing_ones(n, k), marked }
    }

    pub fn is_exhausted(&self) -> bool {
        self.marked.is_empty()
    }
}

/// One pivot swap of the Ehrlich loop.
pub fn next_bitstring(state: &EhrlichState) -> Result<EhrlichState> {
    let n = state.b.n();
    let m = *state.marked.iter().next_back().ok_or(Error::SequenceExhausted)?;
    let mut b = state.b;
    let partner = if !b.position(m) {
        (m + 1..=n)
            .find(|&p| b.position(p))
            .ok_or_else(|| Error::MalformedState(format!("no 1 to the right of position {m} in {b}")))?
    } else {
        (m + 1..=n)
            .take_while(|&p| !b.position(p))
            .last()
            .ok_or_else(|| Error::MalformedState(format!("no 0 to the right of position {m} in {b}")))?
    };
    b.flip_position(m);
    b.flip_position(partner);

    let last = b.position(n);
    let mut j = n;
    while j > 1 && b.position(j - 1) == last {
        j -= 1;
    }

    let mut marked = state.marked.clone();
    marked.remove(&m);
    marked.extend(m + 1..j);
    Ok(EhrlichState { b, marked })
}

/// The states visited from `start`, `count` of them including `start`.
pub fn ehrlich_walk(start: &EhrlichState, count: usize) -> Result<Vec<EhrlichState>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    out.push(start.clone());
    while out.len() < count {
        let next = next_bitstring(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

pub fn ehrlich_sequence(start: &EhrlichState, count: usize) -> Result<Vec<BitString>> {
    Ok(ehrlich_walk(start, count)?.into_iter().map(|s| s.b).collect())
}

/// Exhausts the walk from `start`.
pub fn ehrlich_full(start: &EhrlichState) -> Vec<BitString> {
    let mut out = vec![start.b];
    let mut s = start.clone();
    while !s.is_exhausted() {
        match next_bitstring(&s) {
            Ok(next) => {
                out.push(next.b);
                s = next;
            }
            Err(_) => break,
        }
    }
    out
}

/// Placement of one gate moving amplitude from `b` to `b_next`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateParams {
    pub ins: QubitSet,
    pub outs: QubitSet,
    pub ctrls: QubitSet,
    pub anti_ctrls: QubitSet,
    /// Common ones dropped from the controls because they were never flipped.
    pub eliminated: QubitSet,
    pub untouched: QubitSet,
}

pub fn gate_params(b: &BitString, b_next: &BitString, untouched: QubitSet) -> Result<GateParams> {
    if b.n() != b_next.n() {
        return Err(Error::LengthMismatch { expected: b.n(), found: b_next.n() });
    }
    if b == b_next {
        return Err(Error::InvalidArgument(format!("gate_params needs distinct bitstrings, got {b} twice")));
    }
    let common = b.ones() & b_next.ones();
    let ins = b.ones() - common;
    let outs = b_next.ones() - common;
    let untouched = untouched - (ins | outs);
    let ctrls = common - untouched;
    Ok(GateParams {
        ins,
        outs,
        ctrls,
        anti_ctrls: QubitSet::EMPTY,
        eliminated: common & untouched,
        untouched,
    })
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

//! Composition index sets.
//!
//! A composition is an ordered tuple of nonnegative integers with a fixed sum;
//! compositions of degree `s` on `l` slots index the coefficient spaces that
//! every operator family lives on. Enumeration order is lexicographically
//! descending on the parts, so `(s, 0, ..., 0)` always comes first; the order
//! is part of the crate's determinism contract (kernel bases and serialized
//! coefficient tables depend on it).

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// An ordered tuple of nonnegative integers together with its cached sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
    degree: u32,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Self {
        let degree = parts.iter().sum();
        Composition { parts, degree }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn slots(&self) -> usize {
        self.parts.len()
    }

    /// Part in slot `j`, slots numbered from 1.
    pub fn part(&self, slot: usize) -> u32 {
        self.parts[slot - 1]
    }

    /// `alpha + e_j`: add one to slot `j` (slots numbered from 1).
    pub fn bump(&self, slot: usize) -> Result<Composition> {
        if slot == 0 || slot > self.parts.len() {
            return Err(Error::SlotOutOfRange {
                slot,
                slots: self.parts.len(),
            });
        }
        let mut parts = self.parts.clone();
        parts[slot - 1] += 1;
        Ok(Composition {
            parts,
            degree: self.degree + 1,
        })
    }

    /// Reorder the parts by a permutation given as the slot each position
    /// should read from (slots numbered from 1).
    pub fn permuted(&self, source_slots: &[usize]) -> Composition {
        debug_assert_eq!(source_slots.len(), self.parts.len());
        Composition::new(source_slots.iter().map(|&j| self.parts[j - 1]).collect())
    }
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All compositions of one degree on a fixed number of slots, in descending
/// lexicographic order, with constant-time rank lookup.
#[derive(Debug, Clone)]
pub struct IndexSet {
    degree: i64,
    slots: usize,
    elems: Vec<Composition>,
    pos: HashMap<Vec<u32>, usize>,
}

impl IndexSet {
    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn cardinality(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Composition> {
        self.elems.iter()
    }

    /// Ordinal of `alpha` in enumeration order.
    pub fn rank(&self, alpha: &Composition) -> Result<usize> {
        self.pos
            .get(alpha.parts())
            .copied()
            .ok_or_else(|| Error::NotInIndexSet {
                parts: alpha.parts().to_vec(),
                degree: self.degree,
                slots: self.slots,
            })
    }

    /// Composition at ordinal `i`.
    pub fn unrank(&self, ordinal: usize) -> Result<&Composition> {
        self.elems.get(ordinal).ok_or(Error::OrdinalOutOfRange {
            ordinal,
            cardinality: self.elems.len(),
        })
    }

    pub fn contains(&self, alpha: &Composition) -> bool {
        self.pos.contains_key(alpha.parts())
    }
}

/// Enumerate the compositions of `degree` on `slots` slots.
///
/// A negative degree yields the empty set: the chain complexes truncate for
/// small order parameters and the builders treat those terms as
/// zero-dimensional rather than special-casing them.
pub fn enumerate_compositions(degree: i64, slots: usize) -> IndexSet {
    assert!(slots >= 1, "index sets need at least one slot");
    let mut elems = Vec::new();
    if degree >= 0 {
        let mut scratch = vec![0u32; slots];
        fill(degree as u32, 0, &mut scratch, &mut elems);
    }
    let pos = elems
        .iter()
        .enumerate()
        .map(|(i, c)| (c.parts().to_vec(), i))
        .collect();
    IndexSet {
        degree,
        slots,
        elems,
        pos,
    }
}

fn fill(remaining: u32, slot: usize, scratch: &mut Vec<u32>, out: &mut Vec<Composition>) {
    if slot + 1 == scratch.len() {
        scratch[slot] = remaining;
        out.push(Composition::new(scratch.clone()));
        return;
    }
    for v in (0..=remaining).rev() {
        scratch[slot] = v;
        fill(remaining - v, slot + 1, scratch, out);
    }
}

/// `C(degree + slots - 1, slots - 1)`, the cardinality of the index set;
/// zero for negative degrees.
pub fn cardinality(degree: i64, slots: usize) -> u128 {
    assert!(slots >= 1);
    if degree < 0 {
        return 0;
    }
    binomial(degree as u128 + slots as u128 - 1, slots as u128 - 1)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The multinomial weight `k! / (alpha_1! ... alpha_l!)`, exactly.
pub fn multinomial(k: u32, alpha: &Composition) -> Result<BigUint> {
    if alpha.degree() != k {
        return Err(Error::DegreeMismatch {
            expected: k,
            found: alpha.degree(),
        });
    }
    let mut acc = BigUint::one();
    let mut used = 0u32;
    for &part in alpha.parts() {
        // multiply C(used + part, part) into the running product
        for i in 1..=part {
            acc = acc * BigUint::from(used + i) / BigUint::from(i);
        }
        used += part;
    }
    Ok(acc)
}

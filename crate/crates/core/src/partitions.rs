//! Set partitions of `{1..r}`, unordered and cyclically ordered.
//!
//! Blocks are bitmasks of width `r` (element `i` is bit `i-1`), which keeps
//! every operation exact and hashable for the ground sets we care about
//! (`r <= 12`). A cyclically ordered partition is stored in its canonical
//! rotation: the block containing element 1 comes first.

use crate::error::{Error, Result};
use std::fmt;

/// Hard enumeration budget on the ground-set size.
pub const MAX_GROUND: usize = 12;

/// A subset of `{1..r}` encoded as a bitmask (element `i` is bit `i-1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_mask(mask: u32) -> Subset {
        Subset(mask)
    }

    pub fn from_elements(elements: &[usize]) -> Result<Subset> {
        let mut mask = 0u32;
        for &e in elements {
            if e == 0 || e > MAX_GROUND {
                return Err(Error::validation(format!(
                    "element {e} outside 1..={MAX_GROUND}"
                )));
            }
            mask |= 1 << (e - 1);
        }
        Ok(Subset(mask))
    }

    /// Full ground set `{1..r}`.
    pub fn full(r: usize) -> Subset {
        Subset(((1u64 << r) - 1) as u32)
    }

    pub fn singleton(element: usize) -> Subset {
        Subset(1 << (element - 1))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, element: usize) -> bool {
        element >= 1 && self.0 & (1 << (element - 1)) != 0
    }

    pub fn contains_subset(self, other: Subset) -> bool {
        other.0 & !self.0 == 0
    }

    pub fn intersect(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn min_element(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize + 1)
        }
    }

    /// Elements in increasing order (1-based).
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut mask = self.0;
        std::iter::from_fn(move || {
            if mask == 0 {
                None
            } else {
                let e = mask.trailing_zeros() as usize + 1;
                mask &= mask - 1;
                Some(e)
            }
        })
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn validate_ground(r: usize) -> Result<()> {
    if r == 0 || r > MAX_GROUND {
        return Err(Error::capacity(
            format!("ground set of size {r}"),
            r as u128,
            MAX_GROUND as u128,
        ));
    }
    Ok(())
}

/// Checks that `blocks` are nonempty, pairwise disjoint, and cover `{1..r}`.
fn validate_blocks(r: usize, blocks: &[Subset]) -> Result<()> {
    let full = Subset::full(r);
    let mut seen = 0u32;
    for b in blocks {
        if b.is_empty() {
            return Err(Error::validation("empty block"));
        }
        if !full.contains_subset(*b) {
            return Err(Error::validation(format!(
                "block {b} not inside {{1..{r}}}"
            )));
        }
        if seen & b.mask() != 0 {
            return Err(Error::validation(format!("block {b} overlaps another")));
        }
        seen |= b.mask();
    }
    if seen != full.mask() {
        return Err(Error::validation(format!(
            "blocks do not cover {{1..{r}}}"
        )));
    }
    Ok(())
}

/// An unordered partition of `{1..r}`; blocks are kept sorted by minimum
/// element so that equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BlockPartition {
    r: usize,
    blocks: Vec<Subset>,
}

impl BlockPartition {
    pub fn new(r: usize, mut blocks: Vec<Subset>) -> Result<BlockPartition> {
        validate_ground(r)?;
        validate_blocks(r, &blocks)?;
        blocks.sort_by_key(|b| b.min_element());
        Ok(BlockPartition { r, blocks })
    }

    /// The partition of `{1..r}` into points.
    pub fn points(r: usize) -> Result<BlockPartition> {
        validate_ground(r)?;
        Ok(BlockPartition {
            r,
            blocks: (1..=r).map(Subset::singleton).collect(),
        })
    }

    /// The one-block partition `{{1..r}}`.
    pub fn single_block(r: usize) -> Result<BlockPartition> {
        validate_ground(r)?;
        Ok(BlockPartition {
            r,
            blocks: vec![Subset::full(r)],
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// The block containing `element`.
    pub fn block_containing(&self, element: usize) -> Option<Subset> {
        self.blocks.iter().copied().find(|b| b.contains(element))
    }
}

impl fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A cyclically ordered partition of `{1..r}`, stored in canonical rotation
/// (the block containing element 1 first). Two block sequences denote the
/// same cyclic partition exactly when they are rotations of each other.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclicPartition {
    r: usize,
    blocks: Vec<Subset>,
}

impl CyclicPartition {
    /// Canonicalizes an ordered block sequence: validates that it is a
    /// partition of `{1..r}` and rotates the block containing element 1 to
    /// the front. Rotation-equivalent inputs produce equal values.
    pub fn canonicalize(r: usize, blocks: Vec<Subset>) -> Result<CyclicPartition> {
        validate_ground(r)?;
        validate_blocks(r, &blocks)?;
        let anchor = blocks
            .iter()
            .position(|b| b.contains(1))
            .expect("element 1 is covered");
        let mut rotated = Vec::with_capacity(blocks.len());
        rotated.extend_from_slice(&blocks[anchor..]);
        rotated.extend_from_slice(&blocks[..anchor]);
        Ok(CyclicPartition { r, blocks: rotated })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Blocks in canonical rotation.
    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// The block sequence rotated so that the block containing `element`
    /// comes first. This is the same cyclic partition, re-anchored.
    pub fn rotation_at_element(&self, element: usize) -> Vec<Subset> {
        let i = self
            .blocks
            .iter()
            .position(|b| b.contains(element))
            .expect("element of the ground set");
        let mut rotated = Vec::with_capacity(self.blocks.len());
        rotated.extend_from_slice(&self.blocks[i..]);
        rotated.extend_from_slice(&self.blocks[..i]);
        rotated
    }

    /// Forgets the cyclic order.
    pub fn unordered(&self) -> BlockPartition {
        BlockPartition::new(self.r, self.blocks.clone()).expect("already a partition")
    }
}

impl fmt::Display for CyclicPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CyclicPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Next subset of `universe` after `current` in increasing numeric order;
/// `None` once `current == universe`.
fn next_subset(current: u32, universe: u32) -> Option<u32> {
    if current == universe {
        None
    } else {
        Some(current.wrapping_sub(universe) & universe)
    }
}

#[derive(Clone)]
struct Frame {
    /// Elements still to be placed when this frame was opened.
    remaining: u32,
    /// Block currently chosen at this position.
    block: u32,
}

/// Streaming enumeration of all cyclically ordered partitions of `{1..r}`,
/// each in canonical form, in lexicographic order of the block-mask sequence.
///
/// The canonical forms are exactly the ordered block sequences whose first
/// block contains element 1, so the iterator walks those: the first block
/// ranges over subsets containing 1, later positions over all nonempty
/// subsets of what remains, each level in increasing mask order.
pub struct CyclicPartitionIter {
    r: usize,
    full: u32,
    stack: Vec<Frame>,
    started: bool,
    done: bool,
}

impl CyclicPartitionIter {
    fn first_block_next(&self, current: u32) -> Option<u32> {
        // First block = {1} ∪ (subset of the rest), enumerated by the subset.
        let rest = self.full & !1;
        next_subset(current & !1, rest).map(|s| s | 1)
    }

    /// Extends the stack with lexicographically-least blocks until the
    /// ground set is exhausted.
    fn descend(&mut self) {
        loop {
            let remaining = match self.stack.last() {
                Some(f) => f.remaining & !f.block,
                None => unreachable!("descend always follows a push"),
            };
            if remaining == 0 {
                return;
            }
            let lowest = remaining & remaining.wrapping_neg();
            self.stack.push(Frame {
                remaining,
                block: lowest,
            });
        }
    }

    fn emit(&self) -> CyclicPartition {
        CyclicPartition {
            r: self.r,
            blocks: self
                .stack
                .iter()
                .map(|f| Subset::from_mask(f.block))
                .collect(),
        }
    }

    /// Advances the deepest frame that still has candidates; returns false
    /// when the whole enumeration is exhausted.
    fn advance(&mut self) -> bool {
        while let Some(top) = self.stack.pop() {
            let next = if self.stack.is_empty() {
                self.first_block_next(top.block)
            } else {
                next_subset(top.block, top.remaining)
            };
            if let Some(block) = next {
                self.stack.push(Frame {
                    remaining: top.remaining,
                    block,
                });
                self.descend();
                return true;
            }
        }
        false
    }
}

impl Iterator for CyclicPartitionIter {
    type Item = CyclicPartition;

    fn next(&mut self) -> Option<CyclicPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.stack.push(Frame {
                remaining: self.full,
                block: 1,
            });
            self.descend();
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.emit())
    }
}

/// Every cyclically ordered partition of `{1..r}` exactly once, canonical
/// form, deterministic order.
pub fn enumerate_cyclic_partitions(r: usize) -> Result<CyclicPartitionIter> {
    validate_ground(r)?;
    Ok(CyclicPartitionIter {
        r,
        full: Subset::full(r).mask(),
        stack: Vec::with_capacity(r),
        started: false,
        done: false,
    })
}

/// Streaming enumeration of unordered partitions via restricted growth
/// strings (block labels `a[i]` with `a[0] = 0`, `a[i] <= 1 + max(prefix)`).
pub struct BlockPartitionIter {
    r: usize,
    rgs: Vec<u8>,
    started: bool,
    done: bool,
}

impl BlockPartitionIter {
    fn emit(&self) -> BlockPartition {
        let k = *self.rgs.iter().max().expect("nonempty") as usize + 1;
        let mut masks = vec![0u32; k];
        for (i, &label) in self.rgs.iter().enumerate() {
            masks[label as usize] |= 1 << i;
        }
        BlockPartition {
            r: self.r,
            blocks: masks.into_iter().map(Subset::from_mask).collect(),
        }
    }

    fn advance(&mut self) -> bool {
        for i in (1..self.r).rev() {
            let prefix_max = *self.rgs[..i].iter().max().expect("i >= 1");
            if self.rgs[i] <= prefix_max {
                self.rgs[i] += 1;
                for j in i + 1..self.r {
                    self.rgs[j] = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for BlockPartitionIter {
    type Item = BlockPartition;

    fn next(&mut self) -> Option<BlockPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.emit())
    }
}

/// Every unordered partition of `{1..r}` exactly once.
pub fn enumerate_block_partitions(r: usize) -> Result<BlockPartitionIter> {
    validate_ground(r)?;
    Ok(BlockPartitionIter {
        r,
        rgs: vec![0; r],
        started: false,
        done: false,
    })
}

/// `|𝔓_[r]| = Σ_k (k-1)!·S(r,k)` where `S` are Stirling numbers of the
/// second kind; used for budget guards.
pub fn cyclic_partition_count(r: usize) -> u128 {
    let s = stirling2_row(r);
    let mut fact: u128 = 1;
    let mut total: u128 = 0;
    for k in 1..=r {
        if k >= 2 {
            fact *= (k - 1) as u128;
        }
        total += fact * s[k];
    }
    total
}

/// Row `r` of the Stirling-second-kind triangle by the standard recurrence.
pub fn stirling2_row(r: usize) -> Vec<u128> {
    let mut row = vec![0u128; r + 1];
    row[0] = 1;
    for _ in 1..=r {
        let mut next = vec![0u128; r + 1];
        for k in 1..=r {
            next[k] = (k as u128) * row[k] + row[k - 1];
        }
        row = next;
    }
    row
}

/// True iff every `R`-block is a union of `Q`-blocks and `R` has strictly
/// fewer blocks.
pub fn is_strictly_coarser(r_part: &BlockPartition, q: &BlockPartition) -> Result<bool> {
    if r_part.r() != q.r() {
        return Err(Error::validation(format!(
            "ground sets differ: {} vs {}",
            r_part.r(),
            q.r()
        )));
    }
    let refines = q.blocks().iter().all(|qb| {
        let e = qb.min_element().expect("nonempty block");
        r_part
            .block_containing(e)
            .is_some_and(|rb| rb.contains_subset(*qb))
    });
    Ok(refines && r_part.num_blocks() < q.num_blocks())
}

/// Replaces blocks `i` and `j` of `Q` by their union.
pub fn merge_blocks(q: &BlockPartition, i: Subset, j: Subset) -> Result<BlockPartition> {
    if i == j {
        return Err(Error::validation("cannot merge a block with itself"));
    }
    for b in [i, j] {
        if !q.blocks().contains(&b) {
            return Err(Error::validation(format!("{b} is not a block of {q}")));
        }
    }
    let mut blocks: Vec<Subset> = q
        .blocks()
        .iter()
        .copied()
        .filter(|b| *b != i && *b != j)
        .collect();
    blocks.push(i.union(j));
    BlockPartition::new(q.r(), blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subset(elems: &[usize]) -> Subset {
        Subset::from_elements(elems).unwrap()
    }

    #[test]
    fn enumeration_counts_match_hand_values() {
        assert_eq!(enumerate_cyclic_partitions(2).unwrap().count(), 2);
        assert_eq!(enumerate_cyclic_partitions(3).unwrap().count(), 6);
        assert_eq!(enumerate_cyclic_partitions(4).unwrap().count(), 26);
        assert_eq!(enumerate_cyclic_partitions(5).unwrap().count(), 150);
    }

    #[test]
    fn enumeration_counts_match_stirling_identity() {
        for r in 1..=8 {
            let count = enumerate_cyclic_partitions(r).unwrap().count() as u128;
            assert_eq!(count, cyclic_partition_count(r), "r = {r}");
        }
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        for r in 1..=6 {
            let all: Vec<_> = enumerate_cyclic_partitions(r).unwrap().collect();
            let set: std::collections::HashSet<_> = all.iter().cloned().collect();
            assert_eq!(all.len(), set.len());
        }
    }

    #[test]
    fn enumeration_order_is_deterministic_golden() {
        let lines: Vec<String> = enumerate_cyclic_partitions(3)
            .unwrap()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(
            lines,
            vec![
                "{1}|{2}|{3}",
                "{1}|{3}|{2}",
                "{1}|{2,3}",
                "{1,2}|{3}",
                "{1,3}|{2}",
                "{1,2,3}",
            ]
        );
    }

    #[test]
    fn enumeration_rejects_oversized_ground_set() {
        assert!(matches!(
            enumerate_cyclic_partitions(13),
            Err(Error::Capacity { .. })
        ));
        assert!(enumerate_cyclic_partitions(0).is_err());
    }

    #[test]
    fn canonicalize_rotates_anchor_to_front() {
        let p = CyclicPartition::canonicalize(3, vec![subset(&[2, 3]), subset(&[1])]).unwrap();
        assert_eq!(p.blocks(), &[subset(&[1]), subset(&[2, 3])]);

        let fixed =
            CyclicPartition::canonicalize(3, vec![subset(&[1]), subset(&[2]), subset(&[3])])
                .unwrap();
        assert_eq!(
            fixed.blocks(),
            &[subset(&[1]), subset(&[2]), subset(&[3])]
        );

        let a = CyclicPartition::canonicalize(3, vec![subset(&[3]), subset(&[1, 2])]).unwrap();
        let b = CyclicPartition::canonicalize(3, vec![subset(&[1, 2]), subset(&[3])]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        for p in enumerate_cyclic_partitions(5).unwrap() {
            let again = CyclicPartition::canonicalize(5, p.blocks().to_vec()).unwrap();
            assert_eq!(p, again);
        }
    }

    #[test]
    fn non_cyclic_reorderings_differ() {
        // (I1,I2,I3) vs (I2,I1,I3) are different cyclic partitions.
        let i1 = subset(&[1]);
        let i2 = subset(&[2]);
        let i3 = subset(&[3]);
        let a = CyclicPartition::canonicalize(3, vec![i1, i2, i3]).unwrap();
        let b = CyclicPartition::canonicalize(3, vec![i2, i1, i3]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn canonicalize_rejects_non_partitions() {
        assert!(CyclicPartition::canonicalize(3, vec![subset(&[1, 2])]).is_err());
        assert!(
            CyclicPartition::canonicalize(3, vec![subset(&[1, 2]), subset(&[2, 3])]).is_err()
        );
        assert!(CyclicPartition::canonicalize(2, vec![subset(&[1]), Subset::EMPTY]).is_err());
    }

    #[test]
    fn strict_coarseness_examples() {
        let k3 = BlockPartition::points(3).unwrap();
        let top = BlockPartition::single_block(3).unwrap();
        let mid = BlockPartition::new(3, vec![subset(&[1, 2]), subset(&[3])]).unwrap();

        assert!(is_strictly_coarser(&top, &k3).unwrap());
        assert!(is_strictly_coarser(&top, &mid).unwrap());
        assert!(is_strictly_coarser(&mid, &k3).unwrap());
        assert!(!is_strictly_coarser(&k3, &k3).unwrap());
        assert!(!is_strictly_coarser(&k3, &top).unwrap());
        // Fewer blocks but not a union of Q-blocks.
        let q = BlockPartition::new(4, vec![subset(&[1, 2]), subset(&[3, 4])]).unwrap();
        let r = BlockPartition::new(4, vec![subset(&[1, 2, 3]), subset(&[4])]).unwrap();
        let rr = BlockPartition::new(4, vec![subset(&[1, 2, 3, 4])]).unwrap();
        assert!(!is_strictly_coarser(&r, &q).unwrap());
        assert!(is_strictly_coarser(&rr, &q).unwrap());
    }

    #[test]
    fn coarseness_rejects_mismatched_ground_sets() {
        let a = BlockPartition::points(3).unwrap();
        let b = BlockPartition::points(4).unwrap();
        assert!(is_strictly_coarser(&a, &b).is_err());
    }

    #[test]
    fn coarseness_is_transitive_and_irreflexive_exhaustive_r4() {
        let all: Vec<_> = enumerate_block_partitions(4).unwrap().collect();
        for p in &all {
            assert!(!is_strictly_coarser(p, p).unwrap());
        }
        for a in &all {
            for b in &all {
                for c in &all {
                    if is_strictly_coarser(a, b).unwrap() && is_strictly_coarser(b, c).unwrap() {
                        assert!(is_strictly_coarser(a, c).unwrap());
                    }
                }
            }
        }
        // {[r]} is the unique maximum, K_r the unique minimum.
        let top = BlockPartition::single_block(4).unwrap();
        let bottom = BlockPartition::points(4).unwrap();
        for p in &all {
            if *p != top {
                assert!(is_strictly_coarser(&top, p).unwrap());
            }
            if *p != bottom {
                assert!(is_strictly_coarser(p, &bottom).unwrap());
            }
        }
    }

    #[test]
    fn merge_blocks_examples() {
        let k3 = BlockPartition::points(3).unwrap();
        let merged = merge_blocks(&k3, subset(&[1]), subset(&[3])).unwrap();
        assert_eq!(
            merged,
            BlockPartition::new(3, vec![subset(&[1, 3]), subset(&[2])]).unwrap()
        );
        assert!(is_strictly_coarser(&merged, &k3).unwrap());

        let q = BlockPartition::new(4, vec![subset(&[1, 2]), subset(&[3, 4])]).unwrap();
        let all = merge_blocks(&q, subset(&[1, 2]), subset(&[3, 4])).unwrap();
        assert_eq!(all, BlockPartition::single_block(4).unwrap());

        assert!(merge_blocks(&k3, subset(&[1]), subset(&[1])).is_err());
        assert!(merge_blocks(&k3, subset(&[1, 2]), subset(&[3])).is_err());
    }

    #[test]
    fn block_partition_count_is_bell() {
        // Bell numbers via the Stirling row.
        for r in 1..=8 {
            let bell: u128 = stirling2_row(r).iter().sum();
            let count = enumerate_block_partitions(r).unwrap().count() as u128;
            assert_eq!(count, bell, "r = {r}");
        }
    }

    #[test]
    fn display_uses_block_notation() {
        let p = BlockPartition::new(3, vec![subset(&[1, 3]), subset(&[2])]).unwrap();
        assert_eq!(p.to_string(), "{1,3}|{2}");
    }
}

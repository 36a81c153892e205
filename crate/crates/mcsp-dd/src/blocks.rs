//! Common-block enumeration and ordering.
//!
//! A block names a pair of equal substrings, one in each input string.
//! Blocks of length at least two are the decision variables of the
//! diagram; length-1 pieces are handled implicitly by the final layer.

use crate::instance::Instance;
use std::cmp::Ordering;

/// A pair of equal substrings: `s1[start1..start1+len] == s2[start2..start2+len]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub start1: usize,
    pub start2: usize,
    pub len: usize,
}

impl Block {
    pub fn new(start1: usize, start2: usize, len: usize) -> Self {
        Self { start1, start2, len }
    }

    /// One past the last covered position in `s1`.
    pub fn end1(&self) -> usize {
        self.start1 + self.len
    }

    /// One past the last covered position in `s2`.
    pub fn end2(&self) -> usize {
        self.start2 + self.len
    }

    /// Checks the defining substring equality against an instance.
    pub fn matches(&self, instance: &Instance) -> bool {
        self.len >= 1
            && self.end1() <= instance.n()
            && self.end2() <= instance.n()
            && instance.s1()[self.start1..self.end1()] == instance.s2()[self.start2..self.end2()]
    }
}

/// True iff the blocks touch a common position in `s1` or in `s2`.
///
/// Two half-open intervals `[a, a+la)` and `[b, b+lb)` intersect iff
/// `a < b + lb && b < a + la`; overlap is that test applied to the
/// blocks' spans in either string. Symmetric in its arguments.
pub fn overlaps(a: &Block, b: &Block) -> bool {
    let hit1 = a.start1 < b.end1() && b.start1 < a.end1();
    let hit2 = a.start2 < b.end2() && b.start2 < a.end2();
    hit1 || hit2
}

/// Blocks of length >= 2, sorted by length descending, then by
/// `start1` and `start2` ascending. The position in the sequence is the
/// block's variable index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSet {
    blocks: Vec<Block>,
}

impl BlockSet {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Block> {
        self.blocks.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Block> {
        self.blocks.iter()
    }

    pub fn as_slice(&self) -> &[Block] {
        &self.blocks
    }

    /// Debug dump, one `k1,k2,t` row per block.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k1,k2,t\n");
        for b in &self.blocks {
            out.push_str(&format!("{},{},{}\n", b.start1, b.start2, b.len));
        }
        out
    }
}

impl<'a> IntoIterator for &'a BlockSet {
    type Item = &'a Block;
    type IntoIter = std::slice::Iter<'a, Block>;

    fn into_iter(self) -> Self::IntoIter {
        self.blocks.iter()
    }
}

fn construction_order(a: &Block, b: &Block) -> Ordering {
    b.len
        .cmp(&a.len)
        .then(a.start1.cmp(&b.start1))
        .then(a.start2.cmp(&b.start2))
}

/// Sorts blocks into construction order (length descending, ties by
/// `start1` then `start2` ascending).
pub fn sort_blocks(blocks: Vec<Block>) -> BlockSet {
    let mut blocks = blocks;
    blocks.sort_by(construction_order);
    BlockSet { blocks }
}

/// Enumerates every block of length >= 2, including sub-blocks of longer
/// matches.
///
/// Uses the match-length table `M[i][j]` = length of the longest common
/// prefix of `s1[i..]` and `s2[j..]`, computed row by row from
/// `M[i][j] = s1[i] == s2[j] ? 1 + M[i+1][j+1] : 0`, and emits `(i, j, t)`
/// for every `2 <= t <= M[i][j]`. The table costs O(n^2); the emitted set
/// is O(n^3) in the worst case.
pub fn enumerate_blocks(instance: &Instance) -> BlockSet {
    let n = instance.n();
    let s1 = instance.s1();
    let s2 = instance.s2();
    let mut blocks = Vec::new();
    let mut next = vec![0u32; n + 1];
    let mut cur = vec![0u32; n + 1];
    for i in (0..n).rev() {
        for j in 0..n {
            cur[j] = if s1[i] == s2[j] { next[j + 1] + 1 } else { 0 };
            for t in 2..=cur[j] as usize {
                blocks.push(Block::new(i, j, t));
            }
        }
        std::mem::swap(&mut next, &mut cur);
    }
    sort_blocks(blocks)
}

//! Layered decision-diagram construction over coverage states.
//!
//! A state is a pair of bitstrings marking the still-uncovered positions
//! of both input strings. Layer `i` decides block `i` of the sorted block
//! set: the 0-arc keeps the state, the 1-arc covers the block's positions
//! at cost `1 - t` (one piece placed, `t` singletons saved). The root
//! weight is `n`, pricing the all-singletons baseline, so the minimal
//! root-to-terminal weight is the partition size. Restricting every layer
//! to its `W` lightest nodes turns the exact diagram into a fast upper
//! bound heuristic; leaving the width unbounded keeps it exact.

use crate::blocks::{Block, BlockSet};
use crate::instance::Instance;
use fixedbitset::FixedBitSet;
use rustc_hash::FxHashMap;
use serde_json::{json, Value};
use std::collections::hash_map::Entry;
use std::fmt;
use std::time::{Duration, Instant};

/// Coverage state: bit `j` of `bs1` is 1 iff position `j` of `s1` is not
/// yet covered by a chosen block, and likewise `bs2` for `s2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeState {
    pub bs1: FixedBitSet,
    pub bs2: FixedBitSet,
}

impl NodeState {
    /// The root state: nothing covered.
    pub fn root(n: usize) -> Self {
        let mut bs = FixedBitSet::with_capacity(n);
        bs.insert_range(..);
        Self {
            bs1: bs.clone(),
            bs2: bs,
        }
    }

    /// Number of uncovered positions in `s1` (equals `s2`'s count on any
    /// reachable state).
    pub fn uncovered(&self) -> usize {
        self.bs1.count_ones(..)
    }

    /// Checks the reachable-state invariants: both strings have the same
    /// number of uncovered positions, and symbol-wise the uncovered
    /// multisets agree.
    pub fn invariants_hold(&self, instance: &Instance) -> bool {
        if self.bs1.count_ones(..) != self.bs2.count_ones(..) {
            return false;
        }
        let mut diff = [0i64; 256];
        for p in self.bs1.ones() {
            diff[instance.s1()[p] as usize] += 1;
        }
        for q in self.bs2.ones() {
            diff[instance.s2()[q] as usize] -= 1;
        }
        diff.iter().all(|&d| d == 0)
    }
}

/// The 0-arc: the state is unchanged and the transition costs nothing.
pub fn transition_zero(state: &NodeState) -> (NodeState, i64) {
    (state.clone(), 0)
}

/// The 1-arc for `block`: defined only when every position the block
/// touches is still uncovered in both strings. Covers those positions and
/// costs `1 - t` (the placed piece replaces `t` singletons).
pub fn transition_one(state: &NodeState, block: &Block) -> Option<(NodeState, i64)> {
    if !state.bs1.contains_all_in_range(block.start1..block.end1())
        || !state.bs2.contains_all_in_range(block.start2..block.end2())
    {
        return None;
    }
    let mut child = state.clone();
    child.bs1.remove_range(block.start1..block.end1());
    child.bs2.remove_range(block.start2..block.end2());
    Some((child, 1 - block.len as i64))
}

/// Solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveConfig {
    /// Maximum nodes kept per layer; `None` builds the exact diagram.
    pub width: Option<usize>,
    /// Record per-layer widths in the result stats.
    pub collect_stats: bool,
    /// Abort once more than this many node records have been created.
    pub node_budget: Option<usize>,
    /// Abort when this point in time passes (checked once per layer).
    pub deadline: Option<Instant>,
}

impl SolveConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn restricted(width: usize) -> Self {
        Self {
            width: Some(width),
            ..Self::default()
        }
    }
}

/// Construction counters for one solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveStats {
    /// Number of block layers processed.
    pub layers: usize,
    /// Largest surviving layer, root layer included.
    pub max_layer_width: usize,
    /// Node records created across all layers, root included.
    pub nodes_created: usize,
    /// Size of the block set the diagram was built over.
    pub blocks_count: usize,
    /// Wall-clock time of the construction.
    pub elapsed: Duration,
    /// Post-restriction width of every block layer; only collected when
    /// [`SolveConfig::collect_stats`] is set.
    pub layer_widths: Option<Vec<usize>>,
}

/// A complete common partition: placed pieces (singletons included) and
/// the claimed piece count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub pieces: Vec<Block>,
    pub value: usize,
}

impl Partition {
    pub fn new(pieces: Vec<Block>) -> Self {
        let value = pieces.len();
        Self { pieces, value }
    }

    /// The piece substrings as read from `s1`.
    pub fn piece_strings(&self, instance: &Instance) -> Vec<String> {
        self.pieces
            .iter()
            .map(|p| {
                String::from_utf8(instance.s1()[p.start1..p.end1()].to_vec())
                    .expect("symbols are ASCII")
            })
            .collect()
    }

    /// JSON array of `[k1, k2, t]` triples.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.pieces
                .iter()
                .map(|p| json!([p.start1, p.start2, p.len]))
                .collect(),
        )
    }
}

/// Output of [`build_dd`].
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Partition size found (minimal weight of any root-terminal path).
    pub value: usize,
    /// Width bound the diagram was built with (`None` = exact).
    pub width: Option<usize>,
    /// Instance length.
    pub n: usize,
    pub partition: Partition,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "value": self.value,
            "width": match self.width {
                Some(w) => json!(w),
                None => json!("exact"),
            },
            "n": self.n,
            "blocks": self.stats.blocks_count,
            "max_layer_width": self.stats.max_layer_width,
            "elapsed_ms": self.stats.elapsed.as_secs_f64() * 1000.0,
            "partition": self.partition.to_json(),
        });
        if let Some(widths) = &self.stats.layer_widths {
            let extras = obj.as_object_mut().expect("object literal");
            extras.insert("layers".into(), json!(self.stats.layers));
            extras.insert("nodes_created".into(), json!(self.stats.nodes_created));
            extras.insert("layer_widths".into(), json!(widths));
        }
        obj
    }
}

/// Construction failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// The configured node budget was exceeded.
    ResourceLimit { created: usize, budget: usize },
    /// The configured deadline passed before the diagram was finished.
    TimedOut,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::ResourceLimit { created, budget } => {
                write!(f, "node budget exceeded: created {created} of allowed {budget}")
            }
            SolveError::TimedOut => write!(f, "solve deadline passed"),
        }
    }
}

impl std::error::Error for SolveError {}

/// Per-state record in a layer: best known path weight and where it came
/// from. The state itself is the layer map's key.
struct NodeRecord {
    weight: u32,
    /// Cached `bs1` popcount; restriction tie-breaker.
    uncovered: u32,
    /// Creation sequence number; final tie-breaker, makes selection total.
    seq: u64,
    /// Index into the trace log for path reconstruction.
    trace: u32,
}

/// Append-only reconstruction log: one entry per winning 1-arc. 0-arcs
/// keep state, weight and provenance, so they never need an entry.
struct TraceEntry {
    block: u32,
    pred: u32,
}

type Layer = FxHashMap<NodeState, NodeRecord>;

/// Keeps the `cap` lightest records; ties broken by fewer uncovered
/// positions, then by creation order. The `(weight, uncovered, seq)`
/// triple is unique per record, so the survivor set is independent of
/// map iteration order. Selection is linear in the layer size.
fn restrict_layer(layer: &mut Layer, cap: usize) {
    let mut ranks: Vec<(u32, u32, u64)> = layer
        .values()
        .map(|r| (r.weight, r.uncovered, r.seq))
        .collect();
    let (_, kth, _) = ranks.select_nth_unstable(cap - 1);
    let threshold = *kth;
    layer.retain(|_, r| (r.weight, r.uncovered, r.seq) <= threshold);
    debug_assert_eq!(layer.len(), cap);
}

/// Builds the decision diagram layer by layer and returns the best value
/// found together with a reconstructed, singleton-completed partition.
///
/// `blocks` must be the instance's enumerated block set; its order is the
/// variable order. With `config.width = None` the diagram is exact and the
/// value is the optimum; with a width bound the value is an upper bound.
pub fn build_dd(
    instance: &Instance,
    blocks: &BlockSet,
    config: &SolveConfig,
) -> Result<SolveResult, SolveError> {
    if let Some(w) = config.width {
        assert!(w >= 1, "layer width bound must be at least 1");
    }
    let start = Instant::now();
    let n = instance.n();
    assert!(n <= u32::MAX as usize, "instance too large");

    let mut layer: Layer = FxHashMap::default();
    let mut trace: Vec<TraceEntry> = vec![TraceEntry {
        block: u32::MAX,
        pred: 0,
    }];
    layer.insert(
        NodeState::root(n),
        NodeRecord {
            weight: n as u32,
            uncovered: n as u32,
            seq: 0,
            trace: 0,
        },
    );
    let mut next_seq = 1u64;
    let mut nodes_created = 1usize;
    let mut max_layer_width = 1usize;
    let mut layer_widths = config.collect_stats.then(|| Vec::with_capacity(blocks.len()));

    // One-arc children produced by the current layer; the 0-arc children
    // are the layer itself, carried over in place.
    struct PendingChild {
        state: NodeState,
        weight: u32,
        uncovered: u32,
        pred: u32,
    }
    let mut scratch: Vec<PendingChild> = Vec::new();

    for (i, block) in blocks.iter().enumerate() {
        if let Some(deadline) = config.deadline {
            if Instant::now() >= deadline {
                return Err(SolveError::TimedOut);
            }
        }
        let t = block.len as u32;
        scratch.clear();
        for (state, rec) in layer.iter() {
            if let Some((child, _cost)) = transition_one(state, block) {
                scratch.push(PendingChild {
                    state: child,
                    weight: rec.weight - (t - 1),
                    uncovered: rec.uncovered - t,
                    pred: rec.trace,
                });
            }
        }
        for child in scratch.drain(..) {
            debug_assert!(child.state.invariants_hold(instance));
            match layer.entry(child.state) {
                Entry::Occupied(mut e) => {
                    if child.weight < e.get().weight {
                        trace.push(TraceEntry {
                            block: i as u32,
                            pred: child.pred,
                        });
                        let r = e.get_mut();
                        r.weight = child.weight;
                        r.trace = (trace.len() - 1) as u32;
                    }
                }
                Entry::Vacant(v) => {
                    trace.push(TraceEntry {
                        block: i as u32,
                        pred: child.pred,
                    });
                    v.insert(NodeRecord {
                        weight: child.weight,
                        uncovered: child.uncovered,
                        seq: next_seq,
                        trace: (trace.len() - 1) as u32,
                    });
                    next_seq += 1;
                    nodes_created += 1;
                }
            }
        }
        if let Some(cap) = config.width {
            debug_assert!(layer.len() <= 2 * cap);
            if layer.len() > cap {
                restrict_layer(&mut layer, cap);
            }
        }
        if let Some(budget) = config.node_budget {
            if nodes_created > budget {
                return Err(SolveError::ResourceLimit {
                    created: nodes_created,
                    budget,
                });
            }
        }
        max_layer_width = max_layer_width.max(layer.len());
        if let Some(widths) = layer_widths.as_mut() {
            widths.push(layer.len());
        }
    }

    // Final layer: every node reaches the terminal through the singleton
    // shortcut at no extra cost, so the terminal weight is the layer
    // minimum.
    let best = layer
        .values()
        .min_by_key(|r| (r.weight, r.uncovered, r.seq))
        .expect("layers are never empty");
    let value = best.weight as usize;

    let mut chosen = Vec::new();
    let mut cursor = best.trace;
    while cursor != 0 {
        let entry = &trace[cursor as usize];
        chosen.push(blocks.as_slice()[entry.block as usize]);
        cursor = entry.pred;
    }
    chosen.reverse();
    let partition = complete_with_singletons(instance, chosen);
    debug_assert_eq!(partition.value, value);
    debug_assert!(validate_partition(instance, &partition).is_ok());

    Ok(SolveResult {
        value,
        width: config.width,
        n,
        partition,
        stats: SolveStats {
            layers: blocks.len(),
            max_layer_width,
            nodes_created,
            blocks_count: blocks.len(),
            elapsed: start.elapsed(),
            layer_widths,
        },
    })
}

/// Extends a set of non-overlapping blocks to a full partition by pairing
/// every uncovered `s1` position, left to right, with the leftmost
/// uncovered `s2` position holding the same symbol.
///
/// # Panics
/// Panics if the blocks are invalid for the instance, overlap, or leave
/// unequal uncovered symbol multisets (impossible for any reachable
/// diagram state).
pub fn complete_with_singletons(instance: &Instance, blocks: Vec<Block>) -> Partition {
    let n = instance.n();
    let mut covered1 = vec![false; n];
    let mut covered2 = vec![false; n];
    for b in &blocks {
        assert!(b.matches(instance), "block does not name equal substrings");
        for slot in &mut covered1[b.start1..b.end1()] {
            assert!(!*slot, "blocks overlap in s1");
            *slot = true;
        }
        for slot in &mut covered2[b.start2..b.end2()] {
            assert!(!*slot, "blocks overlap in s2");
            *slot = true;
        }
    }
    let mut free2: Vec<Vec<usize>> = vec![Vec::new(); 256];
    for (q, &covered) in covered2.iter().enumerate() {
        if !covered {
            free2[instance.s2()[q] as usize].push(q);
        }
    }
    let mut cursor = [0usize; 256];
    let mut pieces = blocks;
    for (p, &covered) in covered1.iter().enumerate() {
        if covered {
            continue;
        }
        let sym = instance.s1()[p] as usize;
        let next = cursor[sym];
        assert!(
            next < free2[sym].len(),
            "no uncovered position in s2 for symbol '{}'",
            sym as u8 as char
        );
        pieces.push(Block::new(p, free2[sym][next], 1));
        cursor[sym] = next + 1;
    }
    Partition::new(pieces)
}

/// First violated partition requirement, with the offending piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    PieceOutOfBounds { index: usize, piece: Block },
    PieceMismatch { index: usize, piece: Block },
    OverlapInS1 { index: usize, piece: Block },
    OverlapInS2 { index: usize, piece: Block },
    UncoveredInS1 { position: usize },
    UncoveredInS2 { position: usize },
    ValueMismatch { stated: usize, actual: usize },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::PieceOutOfBounds { index, piece } => write!(
                f,
                "piece {index} ({},{},{}) is out of bounds",
                piece.start1, piece.start2, piece.len
            ),
            PartitionViolation::PieceMismatch { index, piece } => write!(
                f,
                "piece {index} ({},{},{}) does not name equal substrings",
                piece.start1, piece.start2, piece.len
            ),
            PartitionViolation::OverlapInS1 { index, piece } => write!(
                f,
                "piece {index} ({},{},{}) overlaps another piece in s1",
                piece.start1, piece.start2, piece.len
            ),
            PartitionViolation::OverlapInS2 { index, piece } => write!(
                f,
                "piece {index} ({},{},{}) overlaps another piece in s2",
                piece.start1, piece.start2, piece.len
            ),
            PartitionViolation::UncoveredInS1 { position } => {
                write!(f, "s1 position {position} is not covered by any piece")
            }
            PartitionViolation::UncoveredInS2 { position } => {
                write!(f, "s2 position {position} is not covered by any piece")
            }
            PartitionViolation::ValueMismatch { stated, actual } => {
                write!(f, "stated value {stated} but the partition has {actual} pieces")
            }
        }
    }
}

/// Checks every partition requirement against the instance: pieces in
/// bounds and naming equal substrings, no position covered twice, no
/// position left uncovered, and the stated value equal to the piece
/// count. Returns the first violation found.
pub fn validate_partition(
    instance: &Instance,
    partition: &Partition,
) -> Result<(), PartitionViolation> {
    let n = instance.n();
    let mut covered1 = vec![false; n];
    let mut covered2 = vec![false; n];
    for (index, piece) in partition.pieces.iter().enumerate() {
        if piece.len == 0 || piece.end1() > n || piece.end2() > n {
            return Err(PartitionViolation::PieceOutOfBounds {
                index,
                piece: *piece,
            });
        }
        if !piece.matches(instance) {
            return Err(PartitionViolation::PieceMismatch {
                index,
                piece: *piece,
            });
        }
        for slot in &mut covered1[piece.start1..piece.end1()] {
            if *slot {
                return Err(PartitionViolation::OverlapInS1 {
                    index,
                    piece: *piece,
                });
            }
            *slot = true;
        }
        for slot in &mut covered2[piece.start2..piece.end2()] {
            if *slot {
                return Err(PartitionViolation::OverlapInS2 {
                    index,
                    piece: *piece,
                });
            }
            *slot = true;
        }
    }
    if let Some(position) = covered1.iter().position(|&c| !c) {
        return Err(PartitionViolation::UncoveredInS1 { position });
    }
    if let Some(position) = covered2.iter().position(|&c| !c) {
        return Err(PartitionViolation::UncoveredInS2 { position });
    }
    if partition.value != partition.pieces.len() {
        return Err(PartitionViolation::ValueMismatch {
            stated: partition.value,
            actual: partition.pieces.len(),
        });
    }
    Ok(())
}

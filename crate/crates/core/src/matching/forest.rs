//! Forest decomposition by ID orientation and deterministic 3-coloring of
//! rooted forests (Cole–Vishkin bit reduction followed by shift-down).

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Graph, NodeId};
use crate::sim::{round_count, run_sync, Inbox, NodeContext, NodeProgram, Outbox, SimOptions, Step};

use super::MatchingError;

/// Iterated logarithm: how many times `log2` must be applied to `x` before
/// the value drops to 2 or below.
pub fn log_star(x: u64) -> usize {
    let mut v = x as f64;
    let mut count = 0;
    while v > 2.0 {
        v = v.log2();
        count += 1;
    }
    count
}

/// Number of Cole–Vishkin reduction rounds needed to shrink colors drawn
/// from `0..=id_bound` down to `0..6`.
pub fn cv_iterations(id_bound: u64) -> usize {
    let mut palette = id_bound as u128 + 1;
    let mut iterations = 0;
    while palette > 6 {
        let bits = 128 - (palette - 1).leading_zeros() as u128;
        palette = 2 * bits.max(1);
        iterations += 1;
    }
    iterations
}

fn cv_reduce(own: u64, parent: Option<u64>) -> u64 {
    let parent = parent.unwrap_or(own ^ 1);
    let i = (own ^ parent).trailing_zeros() as u64;
    2 * i + ((own >> i) & 1)
}

fn smallest_free(forbidden: &[u64]) -> u64 {
    (0..3).find(|c| !forbidden.contains(c)).expect("at most two colors are forbidden")
}

/// Color state of one node in one forest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct ColorSlot {
    pub color: u64,
    before_shift: u64,
}

impl ColorSlot {
    pub fn new(id: NodeId) -> Self {
        ColorSlot { color: id.0, before_shift: id.0 }
    }
}

/// Round schedule shared by the standalone coloring program and the
/// matching program: `cv` reduction rounds, then three shift-down/recolor
/// pairs eliminating colors 5, 4 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ColorSchedule {
    pub cv: usize,
}

impl ColorSchedule {
    pub fn for_id_bound(id_bound: u64) -> Self {
        ColorSchedule { cv: cv_iterations(id_bound) }
    }

    pub fn rounds(&self) -> usize {
        self.cv + 6
    }

    /// Updates `slot` in coloring round `t` (1-based). `parent_color` is the
    /// parent's color at the end of round `t - 1`, `None` for roots.
    pub fn update(&self, t: usize, slot: &mut ColorSlot, parent_color: Option<u64>) {
        debug_assert!(t >= 1 && t <= self.rounds());
        if t <= self.cv {
            slot.color = cv_reduce(slot.color, parent_color);
            return;
        }
        let j = t - self.cv - 1;
        let target = 5 - (j / 2) as u64;
        if j % 2 == 0 {
            slot.before_shift = slot.color;
            slot.color = match parent_color {
                Some(pc) => pc,
                None => smallest_free(&[slot.color]),
            };
        } else if slot.color == target {
            // Children now all carry `before_shift`.
            let mut forbidden = vec![slot.before_shift];
            forbidden.extend(parent_color);
            slot.color = smallest_free(&forbidden);
        }
    }
}

/// Edge partition into rooted forests: each edge is oriented toward its
/// higher-ID endpoint and a node's out-edges are numbered by ascending head
/// ID; forest `i` holds the edges numbered `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ForestDecomposition {
    /// Per forest: child → parent.
    pub forests: Vec<BTreeMap<NodeId, NodeId>>,
    /// Per forest: node → color in `1..=3`. Empty until [`Self::color`].
    pub colors: Vec<BTreeMap<NodeId, u8>>,
}

/// The `index`-th higher-ID neighbor of `v`, which is its parent in forest
/// `index` (0-based).
pub(crate) fn forest_parent(v: NodeId, neighbors: &[NodeId], index: usize) -> Option<NodeId> {
    let start = neighbors.partition_point(|&w| w <= v);
    neighbors.get(start + index).copied()
}

pub fn forest_decomposition(g: &Graph) -> ForestDecomposition {
    let mut forests: Vec<BTreeMap<NodeId, NodeId>> = Vec::new();
    for v in g.nodes() {
        let ns = g.neighbors(v);
        let start = ns.partition_point(|&w| w <= v);
        for (i, &parent) in ns[start..].iter().enumerate() {
            if forests.len() <= i {
                forests.push(BTreeMap::new());
            }
            forests[i].insert(v, parent);
        }
    }
    ForestDecomposition { forests, colors: Vec::new() }
}

impl ForestDecomposition {
    pub fn len(&self) -> usize {
        self.forests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forests.is_empty()
    }

    /// Colors every forest with [`three_color_forest`]; returns the largest
    /// round count among them.
    pub fn color(&mut self, g: &Graph, id_bound: u64) -> Result<usize, MatchingError> {
        let mut rounds = 0;
        self.colors.clear();
        for f in &self.forests {
            let run = three_color_forest(g, f, id_bound)?;
            rounds = rounds.max(run.rounds);
            self.colors.push(run.colors);
        }
        Ok(rounds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringRun {
    pub colors: BTreeMap<NodeId, u8>,
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForestColoringState {
    clock: usize,
    parent: Option<NodeId>,
    slot: ColorSlot,
}

/// Node program 3-coloring one rooted forest given as a parent map.
pub struct ForestColoringProgram<'a> {
    parents: &'a BTreeMap<NodeId, NodeId>,
    schedule: ColorSchedule,
}

impl NodeProgram for ForestColoringProgram<'_> {
    type State = ForestColoringState;
    type Msg = u64;
    type Output = u8;

    fn init(&self, ctx: &NodeContext<'_>) -> ForestColoringState {
        ForestColoringState { clock: 0, parent: self.parents.get(&ctx.id).copied(), slot: ColorSlot::new(ctx.id) }
    }

    fn step(&self, _: &NodeContext<'_>, s: &ForestColoringState, inbox: &Inbox<u64>) -> Step<ForestColoringState, u64, u8> {
        let mut next = s.clone();
        next.clock += 1;
        let t = next.clock;
        if t > self.schedule.rounds() {
            return Step { state: s.clone(), outbox: Outbox::Silent, output: Some(s.slot.color as u8 + 1) };
        }
        let parent_color = s.parent.map(|p| if t == 1 { p.0 } else { inbox[&p] });
        self.schedule.update(t, &mut next.slot, parent_color);
        let done = t == self.schedule.rounds();
        Step {
            outbox: if done { Outbox::Silent } else { Outbox::Broadcast(next.slot.color) },
            output: done.then_some(next.slot.color as u8 + 1),
            state: next,
        }
    }
}

fn check_forest(g: &Graph, parents: &BTreeMap<NodeId, NodeId>) -> Result<(), MatchingError> {
    for (&child, &parent) in parents {
        if !g.has_edge(child, parent) {
            return Err(MatchingError::ForestEdgeMissing { child, parent });
        }
    }
    let mut done = BTreeSet::new();
    for &start in parents.keys() {
        let mut path = BTreeSet::new();
        let mut v = start;
        while !done.contains(&v) {
            if !path.insert(v) {
                return Err(MatchingError::CyclicForest(v));
            }
            match parents.get(&v) {
                Some(&p) => v = p,
                None => break,
            }
        }
        done.extend(path);
    }
    Ok(())
}

/// Properly 3-colors the rooted forest `parents` (child → parent, every pair
/// an edge of `g`) by running [`ForestColoringProgram`] on `g`. Nodes of `g`
/// without parent or children are colored as singleton roots. Colors are
/// `1..=3`.
pub fn three_color_forest(g: &Graph, parents: &BTreeMap<NodeId, NodeId>, id_bound: u64) -> Result<ColoringRun, MatchingError> {
    check_forest(g, parents)?;
    let prog = ForestColoringProgram { parents, schedule: ColorSchedule::for_id_bound(id_bound) };
    let opts = SimOptions { id_bound: Some(id_bound), ..Default::default() };
    let trace = run_sync(g, &prog, prog.schedule.rounds(), &opts)?;
    let rounds = round_count(&trace)?;
    Ok(ColoringRun { colors: trace.outputs, rounds })
}

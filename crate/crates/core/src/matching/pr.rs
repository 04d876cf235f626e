//! Deterministic maximal matching in `O(Δ + log* n)` rounds.
//!
//! Schedule, identical at every node:
//!
//! 1. Coloring: every forest of the ID-oriented decomposition is 3-colored
//!    in parallel (`cv_iterations(id_bound) + 6` rounds, colors broadcast
//!    as one vector per round).
//! 2. Matching: for forest `i = 1..=Δ`, for color `k = 1..=3`, two rounds.
//!    In the first, every unmatched node of color `k` proposes to its parent
//!    in forest `i`. In the second, every unmatched parent accepts the
//!    lowest-ID proposer.
//! 3. One final round in which the last acceptances arrive.
//!
//! A node outputs as soon as it is matched; unmatched nodes output when the
//! schedule ends.

use crate::graph::{max_degree, Graph, NodeId};
use crate::sim::{round_count, run_sync, Inbox, NodeContext, NodeProgram, Outbox, SimOptions, Step};

use super::forest::{forest_parent, log_star, ColorSchedule, ColorSlot};
use super::{Matching, MatchingError};

/// Rounds spent per forest and color class.
pub const PR_ROUNDS_A: usize = 2;
/// Additive slack over `log*(id_bound)` covering the fixed coloring tail,
/// the final delivery round and the one extra reduction round the
/// Cole–Vishkin schedule may need.
pub const PR_ROUNDS_B: usize = 8;

/// Upper bound on rounds used by [`PrMatchingProgram`] with `delta` forests.
pub fn pr_round_bound(delta: usize, id_bound: u64) -> usize {
    3 * PR_ROUNDS_A * delta + log_star(id_bound) + PR_ROUNDS_B
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrMsg {
    Colors(Vec<u64>),
    Propose,
    Accept,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrState {
    clock: usize,
    parents: Vec<Option<NodeId>>,
    slots: Vec<ColorSlot>,
    mate: Option<NodeId>,
}

pub struct PrMatchingProgram {
    forests: usize,
    schedule: ColorSchedule,
}

impl PrMatchingProgram {
    /// Program for graphs of maximum degree at most `delta_bound` whose IDs
    /// are at most `id_bound`.
    pub fn new(delta_bound: usize, id_bound: u64) -> Self {
        PrMatchingProgram { forests: delta_bound, schedule: ColorSchedule::for_id_bound(id_bound) }
    }

    /// Length of the full schedule.
    pub fn scheduled_rounds(&self) -> usize {
        self.schedule.rounds() + 3 * PR_ROUNDS_A * self.forests + 1
    }
}

impl NodeProgram for PrMatchingProgram {
    type State = PrState;
    type Msg = PrMsg;
    type Output = Option<NodeId>;

    fn init(&self, ctx: &NodeContext<'_>) -> PrState {
        PrState {
            clock: 0,
            parents: (0..self.forests).map(|i| forest_parent(ctx.id, ctx.neighbors, i)).collect(),
            slots: vec![ColorSlot::new(ctx.id); self.forests],
            mate: None,
        }
    }

    fn step(&self, ctx: &NodeContext<'_>, s: &PrState, inbox: &Inbox<PrMsg>) -> Step<PrState, PrMsg, Option<NodeId>> {
        let mut next = s.clone();
        next.clock += 1;
        let t = next.clock;
        if ctx.neighbors.is_empty() {
            return Step { state: next, outbox: Outbox::Silent, output: Some(None) };
        }
        if let Some((&from, _)) = inbox.iter().find(|(_, m)| **m == PrMsg::Accept) {
            next.mate = Some(from);
        }

        let coloring = self.schedule.rounds();
        let mut outbox = Outbox::Silent;
        if t <= coloring {
            for (f, slot) in next.slots.iter_mut().enumerate() {
                let parent_color = s.parents[f].map(|p| {
                    if t == 1 {
                        p.0
                    } else {
                        match &inbox[&p] {
                            PrMsg::Colors(cs) => cs[f],
                            other => unreachable!("coloring round received {other:?}"),
                        }
                    }
                });
                self.schedule.update(t, slot, parent_color);
            }
            if t < coloring {
                outbox = Outbox::Broadcast(PrMsg::Colors(next.slots.iter().map(|s| s.color).collect()));
            }
        } else if next.mate.is_none() {
            let m = t - coloring - 1;
            let phases = 3 * self.forests;
            if m < PR_ROUNDS_A * phases {
                let phase = m / PR_ROUNDS_A;
                let (forest, class) = (phase / 3, (phase % 3) as u64);
                if m % 2 == 0 {
                    if let (Some(parent), true) = (next.parents[forest], next.slots[forest].color == class) {
                        outbox = Outbox::Direct(vec![(parent, PrMsg::Propose)]);
                    }
                } else if let Some((&child, _)) = inbox.iter().find(|(_, m)| **m == PrMsg::Propose) {
                    // Inbox is ordered by sender, so this is the lowest-ID proposer.
                    next.mate = Some(child);
                    outbox = Outbox::Direct(vec![(child, PrMsg::Accept)]);
                }
            }
        }

        let finished = t >= self.scheduled_rounds();
        let output = (next.mate.is_some() || finished).then_some(next.mate);
        Step { state: next, outbox, output }
    }
}

#[derive(Clone, Debug)]
pub struct PrRun {
    pub matching: Matching,
    pub rounds: usize,
    pub messages: usize,
}

/// Maximal matching of `g`, assuming every node knows `Δ(g)` and the
/// largest ID.
pub fn maximal_matching_pr(g: &Graph) -> Result<Matching, MatchingError> {
    let id_bound = g.max_id().map_or(0, |v| v.0);
    maximal_matching_pr_with(g, max_degree(g), id_bound, &SimOptions::default()).map(|r| r.matching)
}

/// Runs the matching program with explicit degree and ID bounds.
pub fn maximal_matching_pr_with(
    g: &Graph,
    delta_bound: usize,
    id_bound: u64,
    opts: &SimOptions,
) -> Result<PrRun, MatchingError> {
    let actual = max_degree(g);
    if actual > delta_bound {
        return Err(MatchingError::DegreeBoundExceeded { actual, bound: delta_bound });
    }
    let prog = PrMatchingProgram::new(delta_bound, id_bound);
    let opts = SimOptions { id_bound: Some(id_bound), ..opts.clone() };
    let trace = run_sync(g, &prog, prog.scheduled_rounds().max(1), &opts)?;
    if !trace.complete {
        return Err(MatchingError::Unfinished);
    }
    let rounds = round_count(&trace)?;
    let mut matching = Matching::new();
    for (&v, &mate) in &trace.outputs {
        if let Some(w) = mate {
            debug_assert_eq!(trace.outputs.get(&w), Some(&Some(v)), "asymmetric match {v}-{w}");
            matching.insert(v, w)?;
        }
    }
    Ok(PrRun { matching, rounds, messages: trace.messages_sent })
}

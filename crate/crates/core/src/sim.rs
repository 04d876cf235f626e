//! Deterministic synchronous message-passing simulator (LOCAL model).
//!
//! Every node runs the same [`NodeProgram`]. In round `r` each node reads
//! the messages its neighbors sent in round `r - 1`, computes a new state,
//! and emits messages plus an optional output. Nodes know their own ID, the
//! sorted IDs of their neighbors and a global upper bound on IDs from the
//! start; no round is spent discovering neighbors.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// What a node can see about itself and its surroundings.
#[derive(Clone, Copy, Debug)]
pub struct NodeContext<'a> {
    pub id: NodeId,
    pub neighbors: &'a [NodeId],
    /// Upper bound on every ID in the network, known to all nodes.
    pub id_bound: u64,
}

/// Messages received this round, keyed by sender.
pub type Inbox<M> = BTreeMap<NodeId, M>;

#[derive(Clone, Debug, PartialEq)]
pub enum Outbox<M> {
    Silent,
    /// The same message to every neighbor.
    Broadcast(M),
    Direct(Vec<(NodeId, M)>),
}

#[derive(Clone, Debug)]
pub struct Step<S, M, O> {
    pub state: S,
    pub outbox: Outbox<M>,
    pub output: Option<O>,
}

impl<S, M, O> Step<S, M, O> {
    pub fn quiet(state: S) -> Self {
        Step { state, outbox: Outbox::Silent, output: None }
    }
}

/// A per-node program. `step` must be a pure function of its arguments.
pub trait NodeProgram: Sync {
    type State: Clone + Hash + Send + Sync;
    type Msg: Clone + Send + Sync;
    type Output: Clone + PartialEq + Send + Sync;

    fn init(&self, ctx: &NodeContext<'_>) -> Self::State;

    fn step(
        &self,
        ctx: &NodeContext<'_>,
        state: &Self::State,
        inbox: &Inbox<Self::Msg>,
    ) -> Step<Self::State, Self::Msg, Self::Output>;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("node {from} sent a message to non-neighbor {to} in round {round}")]
    NotNeighbor { from: NodeId, to: NodeId, round: usize },
    #[error("node {from} sent two messages to {to} in round {round}")]
    DuplicateMessage { from: NodeId, to: NodeId, round: usize },
    #[error("trace is incomplete: {undecided} node(s) produced no output within {rounds} rounds")]
    Incomplete { undecided: usize, rounds: usize },
    #[error("max_rounds must be at least 1")]
    ZeroRounds,
    #[error("id bound {bound} is below the largest node ID {max}")]
    IdBoundTooSmall { bound: u64, max: u64 },
}

#[derive(Clone, Debug)]
pub struct SimOptions {
    /// Override for the ID universe bound; defaults to the largest node ID.
    pub id_bound: Option<u64>,
    /// Evaluate node steps of a round on the rayon pool.
    pub parallel: bool,
    /// Retain full per-round states in the trace, not only digests.
    pub keep_states: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { id_bound: None, parallel: false, keep_states: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundSnapshot {
    pub round: usize,
    pub digests: BTreeMap<NodeId, u64>,
}

#[derive(Clone, Debug)]
pub struct Trace<S, O> {
    pub rounds_executed: usize,
    pub snapshots: Vec<RoundSnapshot>,
    /// Full states per round, only when `keep_states` was set.
    pub states: Option<Vec<BTreeMap<NodeId, S>>>,
    pub outputs: BTreeMap<NodeId, O>,
    /// Round in which each node first produced an output.
    pub first_output_round: BTreeMap<NodeId, usize>,
    pub messages_sent: usize,
    /// `sent_per_round[r - 1]` messages were emitted in round `r`.
    pub sent_per_round: Vec<usize>,
    /// `delivered_per_round[r - 1]` messages were read in round `r`.
    pub delivered_per_round: Vec<usize>,
    pub complete: bool,
}

/// Rounds until the last node produced its output.
pub fn round_count<S, O>(t: &Trace<S, O>) -> Result<usize, SimError> {
    if !t.complete {
        return Err(SimError::Incomplete {
            undecided: t.snapshots.last().map_or(0, |s| s.digests.len()) - t.first_output_round.len(),
            rounds: t.rounds_executed,
        });
    }
    Ok(t.first_output_round.values().copied().max().unwrap_or(0))
}

pub fn state_digest<S: Hash>(state: &S) -> u64 {
    let mut h = DefaultHasher::new();
    state.hash(&mut h);
    h.finish()
}

/// Round-by-round execution of one program over one graph.
///
/// [`run_sync`] drives this to completion; harnesses that need to touch
/// node state between rounds (fault injection) drive it directly.
pub struct Simulation<'g, P: NodeProgram> {
    graph: &'g Graph,
    program: &'g P,
    id_bound: u64,
    parallel: bool,
    nodes: Vec<NodeId>,
    states: BTreeMap<NodeId, P::State>,
    pending: BTreeMap<NodeId, Inbox<P::Msg>>,
    round: usize,
    trace: Trace<P::State, P::Output>,
}

impl<'g, P: NodeProgram> Simulation<'g, P> {
    pub fn new(graph: &'g Graph, program: &'g P, opts: &SimOptions) -> Result<Self, SimError> {
        let max = graph.max_id().map_or(0, |v| v.0);
        let id_bound = opts.id_bound.unwrap_or(max);
        if id_bound < max {
            return Err(SimError::IdBoundTooSmall { bound: id_bound, max });
        }
        let nodes: Vec<NodeId> = graph.nodes().collect();
        let states = nodes
            .iter()
            .map(|&v| {
                let ctx = NodeContext { id: v, neighbors: graph.neighbors(v), id_bound };
                (v, program.init(&ctx))
            })
            .collect();
        Ok(Simulation {
            graph,
            program,
            id_bound,
            parallel: opts.parallel,
            nodes,
            states,
            pending: BTreeMap::new(),
            round: 0,
            trace: Trace {
                rounds_executed: 0,
                snapshots: Vec::new(),
                states: opts.keep_states.then(Vec::new),
                outputs: BTreeMap::new(),
                first_output_round: BTreeMap::new(),
                messages_sent: 0,
                sent_per_round: Vec::new(),
                delivered_per_round: Vec::new(),
                complete: false,
            },
        })
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn id_bound(&self) -> u64 {
        self.id_bound
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn states(&self) -> &BTreeMap<NodeId, P::State> {
        &self.states
    }

    /// Mutable access between rounds, for adversaries.
    pub fn states_mut(&mut self) -> &mut BTreeMap<NodeId, P::State> {
        &mut self.states
    }

    /// Latest output of every node that has produced one.
    pub fn outputs(&self) -> &BTreeMap<NodeId, P::Output> {
        &self.trace.outputs
    }

    pub fn all_decided(&self) -> bool {
        self.trace.first_output_round.len() == self.nodes.len()
    }

    /// Executes one synchronous round.
    pub fn step(&mut self) -> Result<(), SimError> {
        self.round += 1;
        let round = self.round;
        let empty = Inbox::new();
        let graph = self.graph;
        let program = self.program;
        let id_bound = self.id_bound;
        let states = &self.states;
        let pending = &self.pending;
        let eval = |v: &NodeId| {
            let ctx = NodeContext { id: *v, neighbors: graph.neighbors(*v), id_bound };
            let inbox = pending.get(v).unwrap_or(&empty);
            (*v, program.step(&ctx, &states[v], inbox))
        };
        let results: Vec<_> = if self.parallel {
            self.nodes.par_iter().map(eval).collect()
        } else {
            self.nodes.iter().map(eval).collect()
        };

        let delivered = self.pending.values().map(BTreeMap::len).sum();
        let mut next: BTreeMap<NodeId, Inbox<P::Msg>> = BTreeMap::new();
        let mut sent = 0;
        let mut digests = BTreeMap::new();
        for (v, step) in results {
            match step.outbox {
                Outbox::Silent => {}
                Outbox::Broadcast(msg) => {
                    for &w in graph.neighbors(v) {
                        next.entry(w).or_default().insert(v, msg.clone());
                        sent += 1;
                    }
                }
                Outbox::Direct(list) => {
                    for (w, msg) in list {
                        if !graph.has_edge(v, w) {
                            return Err(SimError::NotNeighbor { from: v, to: w, round });
                        }
                        if next.entry(w).or_default().insert(v, msg).is_some() {
                            return Err(SimError::DuplicateMessage { from: v, to: w, round });
                        }
                        sent += 1;
                    }
                }
            }
            if let Some(out) = step.output {
                self.trace.first_output_round.entry(v).or_insert(round);
                self.trace.outputs.insert(v, out);
            }
            digests.insert(v, state_digest(&step.state));
            self.states.insert(v, step.state);
        }
        self.pending = next;
        self.trace.rounds_executed = round;
        self.trace.messages_sent += sent;
        self.trace.sent_per_round.push(sent);
        self.trace.delivered_per_round.push(delivered);
        self.trace.snapshots.push(RoundSnapshot { round, digests });
        if let Some(all) = self.trace.states.as_mut() {
            all.push(self.states.clone());
        }
        Ok(())
    }

    pub fn into_trace(mut self) -> Trace<P::State, P::Output> {
        self.trace.complete = self.all_decided();
        self.trace
    }
}

/// Runs rounds until every node has produced an output or `max_rounds` is
/// reached. A run that hits the limit returns a trace with `complete ==
/// false` rather than an error.
pub fn run_sync<P: NodeProgram>(
    g: &Graph,
    prog: &P,
    max_rounds: usize,
    opts: &SimOptions,
) -> Result<Trace<P::State, P::Output>, SimError> {
    if max_rounds == 0 {
        return Err(SimError::ZeroRounds);
    }
    let mut sim = Simulation::new(g, prog, opts)?;
    while !sim.all_decided() && sim.round() < max_rounds {
        sim.step()?;
    }
    Ok(sim.into_trace())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct EchoId;

    impl NodeProgram for EchoId {
        type State = ();
        type Msg = ();
        type Output = NodeId;
        fn init(&self, _: &NodeContext<'_>) {}
        fn step(&self, ctx: &NodeContext<'_>, _: &(), _: &Inbox<()>) -> Step<(), (), NodeId> {
            Step { state: (), outbox: Outbox::Silent, output: Some(ctx.id) }
        }
    }

    /// Floods the minimum ID; decides once the value has been stable for
    /// `patience` rounds.
    struct MinFlood {
        patience: usize,
    }

    impl NodeProgram for MinFlood {
        type State = (u64, usize);
        type Msg = u64;
        type Output = u64;
        fn init(&self, ctx: &NodeContext<'_>) -> (u64, usize) {
            (ctx.id.0, 0)
        }
        fn step(&self, _: &NodeContext<'_>, s: &(u64, usize), inbox: &Inbox<u64>) -> Step<(u64, usize), u64, u64> {
            let best = inbox.values().copied().chain([s.0]).min().unwrap();
            let stable = if best == s.0 { s.1 + 1 } else { 0 };
            Step {
                state: (best, stable),
                outbox: Outbox::Broadcast(best),
                output: (stable > self.patience).then_some(best),
            }
        }
    }

    struct Rogue;

    impl NodeProgram for Rogue {
        type State = ();
        type Msg = ();
        type Output = ();
        fn init(&self, _: &NodeContext<'_>) {}
        fn step(&self, _: &NodeContext<'_>, _: &(), _: &Inbox<()>) -> Step<(), (), ()> {
            Step { state: (), outbox: Outbox::Direct(vec![(NodeId(99), ())]), output: Some(()) }
        }
    }

    fn path(n: u64) -> Graph {
        Graph::from_pairs(&(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn echo_program_takes_one_round() {
        let g = path(5);
        let t = run_sync(&g, &EchoId, 10, &SimOptions::default()).unwrap();
        assert_eq!(t.rounds_executed, 1);
        assert_eq!(round_count(&t).unwrap(), 1);
        assert!(t.outputs.iter().all(|(k, v)| k == v));
    }

    #[test]
    fn incomplete_trace_is_flagged() {
        let g = path(8);
        let t = run_sync(&g, &MinFlood { patience: 100 }, 5, &SimOptions::default()).unwrap();
        assert!(!t.complete);
        assert_eq!(t.rounds_executed, 5);
        assert!(matches!(round_count(&t), Err(SimError::Incomplete { .. })));
    }

    #[test]
    fn messages_are_conserved_between_rounds() {
        let g = path(8);
        let t = run_sync(&g, &MinFlood { patience: 8 }, 50, &SimOptions::default()).unwrap();
        assert!(t.complete);
        assert!(t.outputs.values().all(|&v| v == 0));
        assert_eq!(t.delivered_per_round[0], 0);
        for r in 1..t.rounds_executed {
            assert_eq!(t.delivered_per_round[r], t.sent_per_round[r - 1]);
        }
        assert_eq!(t.messages_sent, t.sent_per_round.iter().sum::<usize>());
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = crate::generators::gen_random_gnp(40, 0.1, 4);
        let seq = run_sync(&g, &MinFlood { patience: 3 }, 100, &SimOptions::default()).unwrap();
        let par = run_sync(&g, &MinFlood { patience: 3 }, 100, &SimOptions { parallel: true, ..Default::default() }).unwrap();
        assert_eq!(seq.snapshots, par.snapshots);
        assert_eq!(seq.outputs, par.outputs);
    }

    #[test]
    fn rejects_messages_to_strangers() {
        let g = path(3);
        let err = run_sync(&g, &Rogue, 3, &SimOptions::default()).unwrap_err();
        assert!(matches!(err, SimError::NotNeighbor { .. }));
    }

    #[test]
    fn zero_rounds_and_bad_bounds() {
        let g = path(3);
        assert_eq!(run_sync(&g, &EchoId, 0, &SimOptions::default()).unwrap_err(), SimError::ZeroRounds);
        let opts = SimOptions { id_bound: Some(1), ..Default::default() };
        assert!(matches!(run_sync(&g, &EchoId, 1, &opts), Err(SimError::IdBoundTooSmall { .. })));
    }

    #[test]
    fn keep_states_records_every_round() {
        let g = path(4);
        let t = run_sync(&g, &MinFlood { patience: 4 }, 50, &SimOptions { keep_states: true, ..Default::default() }).unwrap();
        assert_eq!(t.states.as_ref().unwrap().len(), t.rounds_executed);
    }
}

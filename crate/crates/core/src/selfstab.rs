//! Self-stabilizing backup placement in the ROM/RAM fault model.
//!
//! Each node keeps its ID (and its neighbors' IDs, which the link layer
//! supplies) in failure-free ROM; everything else lives in RAM that an
//! adversary may overwrite between rounds. Because next-modulo reads only
//! ROM, recomputing it every round repairs any RAM corruption within one
//! round.
//!
//! Rounds are numbered from 0. Round 0 is the start of the execution and
//! always counts as faulty (the initial RAM is arbitrary). A fault event at
//! round `r` is applied after the round-`r` step, so round `r + 1` is the
//! first faultless round. In-flight messages are not corrupted.

use std::collections::BTreeMap;
use std::hash::Hash;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::placement::next_modulo;
use crate::sim::{state_digest, Inbox, NodeContext, NodeProgram, Outbox, SimError, SimOptions, Simulation, Step};

#[derive(Debug, Error)]
pub enum StabError {
    #[error("total_rounds {total} must exceed the last fault round {last_fault}")]
    RunTooShort { total: usize, last_fault: usize },
    #[error("isolated vertices have no backup: {0:?}")]
    Isolated(Vec<NodeId>),
    #[error("fault victim {0} is not in the graph")]
    UnknownVictim(NodeId),
    #[error("execution never reached a legal state after round {0}")]
    Unstabilized(usize),
    #[error("fault schedule: {0}")]
    Schedule(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Failure-free memory.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rom {
    id: NodeId,
    neighbors: Vec<NodeId>,
}

impl Rom {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn neighbors(&self) -> &[NodeId] {
        &self.neighbors
    }
}

/// Node state split into ROM and corruptible RAM. The ROM half is only
/// readable from outside this module.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabNodeState<R> {
    rom: Rom,
    pub ram: R,
}

impl<R> StabNodeState<R> {
    pub fn rom(&self) -> &Rom {
        &self.rom
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionMode {
    /// Overwrite with random bytes of random length.
    RandomBytes,
    /// Write a well-formed but wrong value.
    TargetedValue,
}

/// RAM contents an adversary can overwrite.
pub trait Corrupt {
    fn corrupt(&mut self, mode: CorruptionMode, rom: &Rom, rng: &mut ChaCha8Rng);
}

impl Corrupt for () {
    fn corrupt(&mut self, _: CorruptionMode, _: &Rom, _: &mut ChaCha8Rng) {}
}

/// Serialized `v.BP`: eight little-endian bytes. Anything else decodes to
/// no selection.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BpRam {
    bytes: Vec<u8>,
}

impl BpRam {
    pub fn encode(v: NodeId) -> Self {
        BpRam { bytes: v.0.to_le_bytes().to_vec() }
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        BpRam { bytes }
    }

    pub fn decode(&self) -> Option<NodeId> {
        let arr: [u8; 8] = self.bytes.as_slice().try_into().ok()?;
        Some(NodeId(u64::from_le_bytes(arr)))
    }
}

impl Corrupt for BpRam {
    fn corrupt(&mut self, mode: CorruptionMode, rom: &Rom, rng: &mut ChaCha8Rng) {
        match mode {
            CorruptionMode::RandomBytes => {
                let len = rng.gen_range(0..=16);
                self.bytes = (0..len).map(|_| rng.gen()).collect();
            }
            CorruptionMode::TargetedValue => {
                let right = next_modulo(rom.id, &rom.neighbors).ok();
                let wrong: Vec<NodeId> = rom.neighbors.iter().copied().filter(|&w| Some(w) != right).collect();
                // With a single neighbor the only wrong value is a non-neighbor.
                let pick = wrong.choose(rng).copied().unwrap_or(rom.id);
                *self = BpRam::encode(pick);
            }
        }
    }
}

/// A node program whose state is split into ROM and RAM and whose RAM
/// holds a backup selection.
pub trait StabProgram: NodeProgram<State = StabNodeState<Self::Ram>> {
    type Ram: Corrupt + Clone + Hash + Send + Sync;

    /// `v.BP` as currently stored in RAM.
    fn selection(ram: &Self::Ram) -> Option<NodeId>;
}

fn rom_of(ctx: &NodeContext<'_>) -> Rom {
    Rom { id: ctx.id, neighbors: ctx.neighbors.to_vec() }
}

/// Next-modulo recomputed from ROM in every round.
#[derive(Clone, Copy, Debug, Default)]
pub struct SelfStabBp;

impl NodeProgram for SelfStabBp {
    type State = StabNodeState<BpRam>;
    type Msg = ();
    type Output = Option<NodeId>;

    fn init(&self, ctx: &NodeContext<'_>) -> Self::State {
        StabNodeState { rom: rom_of(ctx), ram: BpRam::default() }
    }

    fn step(&self, _: &NodeContext<'_>, s: &Self::State, _: &Inbox<()>) -> Step<Self::State, (), Self::Output> {
        let choice = next_modulo(s.rom.id, &s.rom.neighbors).ok();
        let ram = choice.map(BpRam::encode).unwrap_or_default();
        Step { state: StabNodeState { rom: s.rom.clone(), ram }, outbox: Outbox::Silent, output: Some(choice) }
    }
}

impl StabProgram for SelfStabBp {
    type Ram = BpRam;

    fn selection(ram: &BpRam) -> Option<NodeId> {
        ram.decode()
    }
}

/// Who a fault event hits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Victims {
    All,
    Nodes(Vec<NodeId>),
}

impl Serialize for Victims {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Victims::All => s.serialize_str("all"),
            Victims::Nodes(ids) => ids.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Victims {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Ids(Vec<NodeId>),
        }
        match Raw::deserialize(d)? {
            Raw::Tag(t) if t == "all" => Ok(Victims::All),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("expected \"all\" or a list of IDs, found {t:?}"))),
            Raw::Ids(ids) => Ok(Victims::Nodes(ids)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub round: usize,
    pub victims: Victims,
    pub mode: CorruptionMode,
}

/// Corruption events sorted by round, plus the seed driving corrupted values.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FaultSchedule {
    events: Vec<FaultEvent>,
    pub seed: u64,
}

impl FaultSchedule {
    pub fn new(mut events: Vec<FaultEvent>, seed: u64) -> Self {
        events.sort_by_key(|e| e.round);
        FaultSchedule { events, seed }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[FaultEvent] {
        &self.events
    }

    /// Parses the JSON list format `[{"round", "victims", "mode"}, ...]`.
    pub fn from_json(text: &str, seed: u64) -> Result<Self, StabError> {
        let events: Vec<FaultEvent> = serde_json::from_str(text).map_err(|e| StabError::Schedule(e.to_string()))?;
        Ok(Self::new(events, seed))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.events).expect("plain data serializes")
    }

    /// Last faulty round; round 0 is always faulty.
    pub fn last_fault_round(&self) -> usize {
        self.events.iter().map(|e| e.round).max().unwrap_or(0)
    }

    /// `event_count` events at rounds in `0..=max_round` hitting random
    /// subsets (occasionally everyone) with random modes.
    pub fn random(g: &Graph, max_round: usize, event_count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<NodeId> = g.nodes().collect();
        let events = (0..event_count)
            .map(|_| {
                let victims = if rng.gen_bool(0.2) || nodes.is_empty() {
                    Victims::All
                } else {
                    let k = rng.gen_range(1..=nodes.len());
                    let mut pick: Vec<NodeId> = nodes.choose_multiple(&mut rng, k).copied().collect();
                    pick.sort();
                    Victims::Nodes(pick)
                };
                let mode = if rng.gen_bool(0.5) { CorruptionMode::RandomBytes } else { CorruptionMode::TargetedValue };
                FaultEvent { round: rng.gen_range(0..=max_round), victims, mode }
            })
            .collect();
        Self::new(events, rng.gen())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabReport {
    pub total_rounds: usize,
    pub last_fault_round: usize,
    pub stabilized: bool,
    pub stabilization_round: Option<usize>,
    pub stabilization_time: Option<usize>,
    /// Legal in every round from stabilization through `total_rounds`.
    pub stayed_legal: bool,
    /// ROM identical to its initial contents at the end of the run.
    pub rom_intact: bool,
    /// Legality after each round `0..=total_rounds`.
    pub legal: Vec<bool>,
    /// Digest of the global RAM selection map after each round.
    pub selection_digests: Vec<u64>,
}

impl StabReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// True when the selection map never changed from stabilization onward.
    pub fn selection_constant_after_stabilization(&self) -> bool {
        match self.stabilization_round {
            Some(r) => self.selection_digests[r..].windows(2).all(|w| w[0] == w[1]),
            None => false,
        }
    }
}

pub fn stabilization_time(report: &StabReport) -> Result<usize, StabError> {
    report.stabilization_time.ok_or(StabError::Unstabilized(report.last_fault_round))
}

/// Decoded `v.BP` of every node.
pub fn selection_map<P: StabProgram>(states: &BTreeMap<NodeId, P::State>) -> BTreeMap<NodeId, Option<NodeId>> {
    states.iter().map(|(&v, s)| (v, P::selection(&s.ram))).collect()
}

/// Default legality: every node stores a neighbor as its backup and no node
/// is stored by more than `c_bound` others.
pub fn placement_legal(g: &Graph, selection: &BTreeMap<NodeId, Option<NodeId>>, c_bound: usize) -> bool {
    let mut load: BTreeMap<NodeId, usize> = BTreeMap::new();
    for v in g.nodes() {
        match selection.get(&v).copied().flatten() {
            Some(w) if g.has_edge(v, w) => *load.entry(w).or_insert(0) += 1,
            _ => return false,
        }
    }
    load.values().all(|&l| l <= c_bound)
}

/// Runs `prog` for rounds `0..=total_rounds` under `faults` and measures
/// stabilization against `legality`, evaluated on the global state after
/// each round (after that round's corruption, if any).
pub fn run_self_stab<P, L>(
    g: &Graph,
    prog: &P,
    faults: &FaultSchedule,
    total_rounds: usize,
    legality: L,
) -> Result<StabReport, StabError>
where
    P: StabProgram,
    L: Fn(&Graph, &BTreeMap<NodeId, P::State>) -> bool,
{
    let last_fault_round = faults.last_fault_round();
    if total_rounds <= last_fault_round {
        return Err(StabError::RunTooShort { total: total_rounds, last_fault: last_fault_round });
    }
    let isolated = g.isolated_nodes();
    if !isolated.is_empty() {
        return Err(StabError::Isolated(isolated));
    }
    for e in faults.events() {
        if let Victims::Nodes(ids) = &e.victims {
            if let Some(&v) = ids.iter().find(|v| !g.contains_node(**v)) {
                return Err(StabError::UnknownVictim(v));
            }
        }
    }

    let mut sim = Simulation::new(g, prog, &SimOptions::default())?;
    let initial_rom: BTreeMap<NodeId, Rom> = sim.states().iter().map(|(&v, s)| (v, s.rom.clone())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(faults.seed);
    let mut legal = Vec::with_capacity(total_rounds + 1);
    let mut selection_digests = Vec::with_capacity(total_rounds + 1);
    let mut events = faults.events().iter().peekable();

    for round in 0..=total_rounds {
        sim.step()?;
        while let Some(e) = events.next_if(|e| e.round == round) {
            let states = sim.states_mut();
            let victims: Vec<NodeId> = match &e.victims {
                Victims::All => states.keys().copied().collect(),
                Victims::Nodes(ids) => ids.clone(),
            };
            for v in victims {
                let state = states.get_mut(&v).expect("victims validated above");
                let rom = state.rom.clone();
                state.ram.corrupt(e.mode, &rom, &mut rng);
            }
        }
        legal.push(legality(g, sim.states()));
        selection_digests.push(state_digest(&selection_map::<P>(sim.states())));
    }

    let stabilization_round = (last_fault_round + 1..=total_rounds).find(|&r| legal[r]);
    let stayed_legal = stabilization_round.is_some_and(|r| legal[r..].iter().all(|&x| x));
    let rom_intact = sim.states().iter().all(|(v, s)| initial_rom[v] == s.rom);
    Ok(StabReport {
        total_rounds,
        last_fault_round,
        stabilized: stabilization_round.is_some(),
        stabilization_round,
        stabilization_time: stabilization_round.map(|r| r - last_fault_round),
        stayed_legal,
        rom_intact,
        legal,
        selection_digests,
    })
}

/// [`run_self_stab`] for plain self-stabilizing backup placement with the
/// default legality predicate.
pub fn run_self_stab_bp(g: &Graph, faults: &FaultSchedule, total_rounds: usize, c_bound: usize) -> Result<StabReport, StabError> {
    run_self_stab(g, &SelfStabBp, faults, total_rounds, |g, states| {
        placement_legal(g, &selection_map::<SelfStabBp>(states), c_bound)
    })
}

/// Whether one step of `prog` from `state` yields the same next state no
/// matter what RAM held before the step.
pub fn step_ignores_ram<P: StabProgram>(
    prog: &P,
    ctx: &NodeContext<'_>,
    state: &P::State,
    corrupted: &P::Ram,
    inbox: &Inbox<P::Msg>,
) -> bool
where
    P::State: PartialEq,
{
    let mut dirty = state.clone();
    dirty.ram = corrupted.clone();
    prog.step(ctx, state, inbox).state == prog.step(ctx, &dirty, inbox).state
}

/// Upper bound on the stabilization time of a composed program whose
/// payload stabilizes `payload_time` rounds after it sees a fixed `G'`.
pub fn composed_time_bound(payload_time: usize) -> usize {
    1 + payload_time
}

/// RAM of a composed program: the backup selection plus the payload state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComposedRam<S> {
    pub bp: BpRam,
    pub payload: S,
}

impl<S: Corrupt> Corrupt for ComposedRam<S> {
    fn corrupt(&mut self, mode: CorruptionMode, rom: &Rom, rng: &mut ChaCha8Rng) {
        self.bp.corrupt(mode, rom, rng);
        self.payload.corrupt(mode, rom, rng);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComposedMsg<M> {
    /// Sender's freshly recomputed selection.
    pub bp: Option<NodeId>,
    pub payload: Option<M>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposedOutput<O> {
    pub bp: Option<NodeId>,
    pub payload: Option<O>,
}

/// Runs next-modulo first in every round, then one step of the payload on
/// the selected subgraph `G'`.
pub struct ComposedProgram<P> {
    payload: P,
}

/// Wraps `payload` so that each round starts by recomputing the backup
/// selection from ROM. The payload sees a [`NodeContext`] whose neighbor
/// list is the node's `G'` neighborhood: its own selection plus every
/// neighbor that announced selecting it in the previous round. Payload
/// initialization sees an empty neighborhood.
pub fn compose_bp_then<P: NodeProgram>(payload: P) -> ComposedProgram<P> {
    ComposedProgram { payload }
}

impl<P> NodeProgram for ComposedProgram<P>
where
    P: NodeProgram,
    P::State: Corrupt,
    P::Msg: Hash,
{
    type State = StabNodeState<ComposedRam<P::State>>;
    type Msg = ComposedMsg<P::Msg>;
    type Output = ComposedOutput<P::Output>;

    fn init(&self, ctx: &NodeContext<'_>) -> Self::State {
        let blind = NodeContext { neighbors: &[], ..*ctx };
        StabNodeState { rom: rom_of(ctx), ram: ComposedRam { bp: BpRam::default(), payload: self.payload.init(&blind) } }
    }

    fn step(&self, ctx: &NodeContext<'_>, s: &Self::State, inbox: &Inbox<Self::Msg>) -> Step<Self::State, Self::Msg, Self::Output> {
        let me = s.rom.id;
        let bp = next_modulo(me, &s.rom.neighbors).ok();
        let mut gprime: Vec<NodeId> = inbox.iter().filter(|(_, m)| m.bp == Some(me)).map(|(&u, _)| u).collect();
        gprime.extend(bp);
        gprime.sort();
        gprime.dedup();

        let payload_inbox: Inbox<P::Msg> = inbox
            .iter()
            .filter(|(u, _)| gprime.binary_search(u).is_ok())
            .filter_map(|(&u, m)| m.payload.clone().map(|p| (u, p)))
            .collect();
        let view = NodeContext { id: me, neighbors: &gprime, id_bound: ctx.id_bound };
        let inner = self.payload.step(&view, &s.ram.payload, &payload_inbox);

        let mut per_neighbor: BTreeMap<NodeId, P::Msg> = BTreeMap::new();
        match inner.outbox {
            Outbox::Silent => {}
            Outbox::Broadcast(m) => per_neighbor.extend(gprime.iter().map(|&w| (w, m.clone()))),
            Outbox::Direct(list) => per_neighbor.extend(list.into_iter().filter(|(w, _)| gprime.binary_search(w).is_ok())),
        }
        let outbox = Outbox::Direct(
            s.rom
                .neighbors
                .iter()
                .map(|&w| (w, ComposedMsg { bp, payload: per_neighbor.remove(&w) }))
                .collect(),
        );
        Step {
            state: StabNodeState {
                rom: s.rom.clone(),
                ram: ComposedRam { bp: bp.map(BpRam::encode).unwrap_or_default(), payload: inner.state },
            },
            outbox,
            output: Some(ComposedOutput { bp, payload: inner.output }),
        }
    }
}

impl<P> StabProgram for ComposedProgram<P>
where
    P: NodeProgram,
    P::State: Corrupt,
    P::Msg: Hash,
{
    type Ram = ComposedRam<P::State>;

    fn selection(ram: &Self::Ram) -> Option<NodeId> {
        ram.bp.decode()
    }
}

/// Payload that always outputs 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstantPayload;

impl NodeProgram for ConstantPayload {
    type State = ();
    type Msg = ();
    type Output = u64;

    fn init(&self, _: &NodeContext<'_>) {}

    fn step(&self, _: &NodeContext<'_>, _: &(), _: &Inbox<()>) -> Step<(), (), u64> {
        Step { state: (), outbox: Outbox::Silent, output: Some(0) }
    }
}

/// RAM of [`DegreeEcho`]: the last degree it reported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct EchoState(pub Option<u64>);

impl Corrupt for EchoState {
    fn corrupt(&mut self, _: CorruptionMode, _: &Rom, rng: &mut ChaCha8Rng) {
        self.0 = rng.gen_bool(0.5).then(|| rng.gen());
    }
}

/// Payload that reports its degree in `G'`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DegreeEcho;

impl NodeProgram for DegreeEcho {
    type State = EchoState;
    type Msg = ();
    type Output = u64;

    fn init(&self, _: &NodeContext<'_>) -> EchoState {
        EchoState(None)
    }

    fn step(&self, ctx: &NodeContext<'_>, _: &EchoState, _: &Inbox<()>) -> Step<EchoState, (), u64> {
        let d = ctx.neighbors.len() as u64;
        Step { state: EchoState(Some(d)), outbox: Outbox::Silent, output: Some(d) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_unit_disk;
    use crate::oracle::neighborhood_independence;
    use crate::placement::{run_backup_placement, selected_subgraph, IsolatedMode};

    fn triangle_fan() -> Graph {
        Graph::from_pairs(&[(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn faultless_run_is_legal_from_round_one() {
        let g = triangle_fan();
        let r = run_self_stab_bp(&g, &FaultSchedule::none(), 5, 2).unwrap();
        assert_eq!(r.stabilization_round, Some(1));
        assert_eq!(stabilization_time(&r).unwrap(), 1);
        assert!(r.stayed_legal && r.rom_intact);
    }

    #[test]
    fn full_corruption_at_round_five() {
        let g = triangle_fan();
        let faults = FaultSchedule::new(
            vec![FaultEvent { round: 5, victims: Victims::All, mode: CorruptionMode::RandomBytes }],
            11,
        );
        let r = run_self_stab_bp(&g, &faults, 10, 2).unwrap();
        assert!(!r.legal[5], "random bytes should break legality");
        assert_eq!(r.stabilization_round, Some(6));
        assert_eq!(stabilization_time(&r).unwrap(), 1);
        assert!(r.stayed_legal);
    }

    #[test]
    fn run_must_outlast_faults() {
        let g = triangle_fan();
        let faults = FaultSchedule::new(vec![FaultEvent { round: 4, victims: Victims::All, mode: CorruptionMode::RandomBytes }], 0);
        assert!(matches!(run_self_stab_bp(&g, &faults, 4, 2), Err(StabError::RunTooShort { .. })));
    }

    #[test]
    fn rejects_unknown_victims_and_isolated_nodes() {
        let g = triangle_fan();
        let faults = FaultSchedule::new(vec![FaultEvent { round: 1, victims: Victims::Nodes(vec![NodeId(99)]), mode: CorruptionMode::RandomBytes }], 0);
        assert!(matches!(run_self_stab_bp(&g, &faults, 4, 2), Err(StabError::UnknownVictim(NodeId(99)))));
        let lonely = Graph::from_parts([NodeId(0)], [(NodeId(1), NodeId(2))]).unwrap();
        assert!(matches!(run_self_stab_bp(&lonely, &FaultSchedule::none(), 3, 2), Err(StabError::Isolated(_))));
    }

    #[test]
    fn unstabilized_report_errors() {
        let g = triangle_fan();
        let r = run_self_stab(&g, &SelfStabBp, &FaultSchedule::none(), 3, |_, _| false).unwrap();
        assert!(!r.stabilized);
        assert!(matches!(stabilization_time(&r), Err(StabError::Unstabilized(0))));
    }

    #[test]
    fn schedule_json_round_trip() {
        let text = r#"[{"round": 3, "victims": "all", "mode": "random-bytes"},
                       {"round": 1, "victims": [1, 2], "mode": "targeted-value"}]"#;
        let s = FaultSchedule::from_json(text, 5).unwrap();
        assert_eq!(s.events()[0].round, 1);
        assert_eq!(s.last_fault_round(), 3);
        assert_eq!(FaultSchedule::from_json(&s.to_json(), 5).unwrap(), s);
        assert!(FaultSchedule::from_json(r#"[{"round": 1, "victims": "some", "mode": "random-bytes"}]"#, 0).is_err());
    }

    #[test]
    fn bp_ram_decoding() {
        assert_eq!(BpRam::encode(NodeId(42)).decode(), Some(NodeId(42)));
        assert_eq!(BpRam::from_bytes(vec![1, 2, 3]).decode(), None);
    }

    #[test]
    fn next_state_never_reads_ram() {
        let g = gen_unit_disk(30, 0.35, 3);
        let g = g.without_isolated();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for v in g.nodes() {
            let ctx = NodeContext { id: v, neighbors: g.neighbors(v), id_bound: 29 };
            let state = SelfStabBp.init(&ctx);
            for mode in [CorruptionMode::RandomBytes, CorruptionMode::TargetedValue] {
                let mut ram = state.ram.clone();
                ram.corrupt(mode, state.rom(), &mut rng);
                assert!(step_ignores_ram(&SelfStabBp, &ctx, &state, &ram, &Inbox::new()));
            }
        }
    }

    #[test]
    fn composed_constant_payload_stabilizes_in_one_round() {
        let g = triangle_fan();
        let prog = compose_bp_then(ConstantPayload);
        let faults = FaultSchedule::new(vec![FaultEvent { round: 3, victims: Victims::All, mode: CorruptionMode::RandomBytes }], 9);
        let r = run_self_stab(&g, &prog, &faults, 8, |g, states| {
            placement_legal(g, &selection_map::<ComposedProgram<ConstantPayload>>(states), 2)
        })
        .unwrap();
        assert_eq!(stabilization_time(&r).unwrap(), 1);
        assert!(r.selection_constant_after_stabilization());
        assert!(stabilization_time(&r).unwrap() <= composed_time_bound(0));
    }

    #[test]
    fn composed_degree_echo_matches_selected_subgraph() {
        for seed in 0..5 {
            let g = gen_unit_disk(40, 0.3, seed).without_isolated();
            let c = neighborhood_independence(&g).unwrap();
            let gprime = selected_subgraph(&g, &run_backup_placement(&g, IsolatedMode::Strict).unwrap());
            let prog = compose_bp_then(DegreeEcho);
            let faults = FaultSchedule::random(&g, 4, 3, seed);
            let r = run_self_stab(&g, &prog, &faults, 10, |_, states| {
                states.iter().all(|(&v, s)| {
                    s.ram.payload.0 == Some(gprime.degree(v) as u64) && gprime.degree(v) <= c + 1
                })
            })
            .unwrap();
            assert_eq!(stabilization_time(&r).unwrap(), 1, "seed {seed}");
            assert!(r.stayed_legal);
        }
    }
}

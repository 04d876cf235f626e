//! Writing a node program for the simulator: leader election by flooding
//! the maximum ID for a known number of rounds.

use backup_placement::generators::gen_unit_disk;
use backup_placement::sim::{round_count, run_sync, Inbox, NodeContext, NodeProgram, Outbox, SimOptions, Step};
use backup_placement::NodeId;

struct FloodMax {
    diameter_bound: usize,
}

#[derive(Clone, Hash)]
struct State {
    best: NodeId,
    round: usize,
}

impl NodeProgram for FloodMax {
    type State = State;
    type Msg = NodeId;
    type Output = NodeId;

    fn init(&self, ctx: &NodeContext<'_>) -> State {
        State { best: ctx.id, round: 0 }
    }

    fn step(&self, _: &NodeContext<'_>, s: &State, inbox: &Inbox<NodeId>) -> Step<State, NodeId, NodeId> {
        let best = inbox.values().copied().fold(s.best, NodeId::max);
        let round = s.round + 1;
        let done = round > self.diameter_bound;
        Step {
            state: State { best, round },
            outbox: if done { Outbox::Silent } else { Outbox::Broadcast(best) },
            output: done.then_some(best),
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = gen_unit_disk(100, 0.3, 2);
    let prog = FloodMax { diameter_bound: 12 };
    let trace = run_sync(&g, &prog, 50, &SimOptions { parallel: true, ..Default::default() })?;
    let leaders: std::collections::BTreeSet<_> = trace.outputs.values().collect();
    println!("rounds {}, messages {}, leaders per component: {leaders:?}", round_count(&trace)?, trace.messages_sent);
    Ok(())
}

//! Maximally intelligent plays: backward induction and its brute-force
//! enumeration oracle.
//!
//! A full play is maximally intelligent when no acting player can raise
//! their own mechanism score by a single-action deviation, with play after
//! the deviation continued by the same induction policy. Mechanism scores
//! are affine in (reward, GPL), so the part of a score contributed above a
//! node is constant across that node's actions and local argmax choices
//! compose into a globally maximal play.

use super::{
    machine_optimal_action, play_score, ActionId, FullPlay, GameTree, LabError, MachineProfile,
    Mechanism, Node, NodeId, PlayerId,
};

/// Guard on play enumeration in the brute-force oracle.
pub const BRUTE_FORCE_PLAY_LIMIT: usize = 100_000;
/// Guard on play enumeration for extremes.
pub const EXTREMES_PLAY_LIMIT: usize = 100_000;

/// The backward-induction policy: one chosen action per decision node,
/// plus the per-player (reward, GPL-suffix) outcome below every node.
#[derive(Debug, Clone)]
pub struct InductionPolicy {
    choice: Vec<Option<ActionId>>,
    /// `[node][player]`: realized rewards at the terminal the policy reaches.
    rewards_below: Vec<Vec<f64>>,
    /// `[node][player]`: GPL accumulated from this node down under the policy.
    gpl_below: Vec<Vec<f64>>,
}

impl InductionPolicy {
    pub fn choice(&self, node: NodeId) -> Option<ActionId> {
        self.choice[node]
    }

    /// Score of the policy play from `node` for `player`, given the GPL
    /// already accumulated above the node.
    pub fn score_from(
        &self,
        mech: Mechanism,
        node: NodeId,
        player: PlayerId,
        gpl_prefix: f64,
    ) -> f64 {
        mech.score(self.rewards_below[node][player], gpl_prefix + self.gpl_below[node][player])
    }

    /// Follow the policy from `node` to a terminal.
    pub fn play_from(&self, tree: &GameTree, node: NodeId) -> FullPlay {
        let mut steps = Vec::new();
        let mut cur = node;
        while let Node::Decision { children, .. } = &tree.nodes()[cur] {
            let a = self.choice[cur].expect("policy covers every decision node");
            steps.push((cur, a));
            cur = children[a];
        }
        FullPlay { steps, terminal: cur }
    }
}

/// Solve the induction policy for a mechanism and machine.
pub fn induction_policy(
    tree: &GameTree,
    machine: &MachineProfile,
    mech: Mechanism,
) -> Result<InductionPolicy, LabError> {
    let n = tree.nodes().len();
    let players = tree.player_count();
    let mut policy = InductionPolicy {
        choice: vec![None; n],
        rewards_below: vec![vec![0.0; players]; n],
        gpl_below: vec![vec![0.0; players]; n],
    };

    // children have larger ids, so reverse id order is bottom-up
    for id in (0..n).rev() {
        match &tree.nodes()[id] {
            Node::Terminal { rewards } => {
                policy.rewards_below[id] = rewards.clone();
            }
            Node::Decision { owner, children } => {
                let owner = *owner;
                let best_action = machine_optimal_action(tree, machine, id)?;
                let best_ev = machine.action_value(tree, owner, id, best_action)?;

                let mut chosen: Option<(ActionId, f64)> = None;
                for (a, &child) in children.iter().enumerate() {
                    let epl = best_ev - machine.action_value(tree, owner, id, a)?;
                    let score = mech.score(
                        policy.rewards_below[child][owner],
                        epl + policy.gpl_below[child][owner],
                    );
                    match chosen {
                        Some((_, s)) if score <= s => {}
                        _ => chosen = Some((a, score)),
                    }
                }
                let (a, _) = chosen.expect("decision nodes have actions");
                let child = children[a];
                policy.choice[id] = Some(a);
                policy.rewards_below[id] = policy.rewards_below[child].clone();
                policy.gpl_below[id] = policy.gpl_below[child].clone();
                policy.gpl_below[id][owner] +=
                    best_ev - machine.action_value(tree, owner, id, a)?;
            }
        }
    }
    Ok(policy)
}

/// The backward-induction maximally intelligent full play.
pub fn maximally_intelligent_play(
    tree: &GameTree,
    machine: &MachineProfile,
    mech: Mechanism,
) -> Result<FullPlay, LabError> {
    let policy = induction_policy(tree, machine, mech)?;
    Ok(policy.play_from(tree, tree.root()))
}

/// The alternative play deviating from `play` at step `step_index` to
/// `alt_action`, continued by the induction policy.
pub fn deviation_play(
    tree: &GameTree,
    policy: &InductionPolicy,
    play: &FullPlay,
    step_index: usize,
    alt_action: ActionId,
) -> Result<FullPlay, LabError> {
    let (node, _) = play.steps[step_index];
    let children = tree.children(node)?;
    let mut steps: Vec<(NodeId, ActionId)> = play.steps[..step_index].to_vec();
    steps.push((node, alt_action));
    let continuation = policy.play_from(tree, children[alt_action]);
    steps.extend(continuation.steps);
    Ok(FullPlay { steps, terminal: continuation.terminal })
}

/// A deviation that strictly improves the deviating player's score.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalityViolation {
    pub player: PlayerId,
    pub node: NodeId,
    pub alt_action: ActionId,
    pub play_score: f64,
    pub deviation_score: f64,
}

/// Check the maximal-intelligence property of `play` directly: every
/// single-action deviation, continued by `policy`, must not beat the play
/// for the deviating player. Scores are recomputed from scratch.
pub fn find_maximality_violation(
    tree: &GameTree,
    machine: &MachineProfile,
    mech: Mechanism,
    policy: &InductionPolicy,
    play: &FullPlay,
) -> Result<Option<MaximalityViolation>, LabError> {
    for (k, &(node, action)) in play.steps.iter().enumerate() {
        let owner = tree.owner(node)?;
        let base = play_score(tree, machine, mech, play, owner)?;
        let n_actions = tree.children(node)?.len();
        for alt in 0..n_actions {
            if alt == action {
                continue;
            }
            let dev = deviation_play(tree, policy, play, k, alt)?;
            let dev_score = play_score(tree, machine, mech, &dev, owner)?;
            if dev_score > base + 1e-12 {
                return Ok(Some(MaximalityViolation {
                    player: owner,
                    node,
                    alt_action: alt,
                    play_score: base,
                    deviation_score: dev_score,
                }));
            }
        }
    }
    Ok(None)
}

/// Brute-force oracle for the maximally intelligent play.
///
/// Works entirely on explicitly constructed plays scored from scratch,
/// independent of the induction solver's value accumulation: each node's
/// action is picked by enumerating every candidate completion below it,
/// then the chosen play is validated against the definition by exhaustive
/// per-node deviation enumeration. Ties resolve to the lowest action id,
/// mirroring the induction policy, so both routes name the same play even
/// when other maximal plays exist (an exactly indifferent opponent can
/// make the maximal set larger than one play).
pub fn brute_force_max_play(
    tree: &GameTree,
    machine: &MachineProfile,
    mech: Mechanism,
) -> Result<FullPlay, LabError> {
    tree.count_full_plays(BRUTE_FORCE_PLAY_LIMIT)?;
    let play = bf_continuation(tree, machine, mech, tree.root())?;
    if !bf_is_maximal(tree, machine, mech, &play)? {
        // a maximally intelligent play always exists in a finite game,
        // so reaching this means a bug
        return Err(LabError::BadTree("constructed play failed the maximality check".into()));
    }
    Ok(play)
}

fn bf_is_maximal(
    tree: &GameTree,
    machine: &MachineProfile,
    mech: Mechanism,
    play: &FullPlay,
) -> Result<bool, LabError> {
    for (k, &(node, action)) in play.steps.iter().enumerate() {
        let owner = tree.owner(node)?;
        let base = play_score(tree, machine, mech, play, owner)?;
        let children = tree.children(node)?;
        for alt in 0..children.len() {
            if alt == action {
                continue;
            }
            let mut steps = play.steps[..k].to_vec();
            steps.push((node, alt));
            let tail = bf_continuation(tree, machine, mech, children[alt])?;
            steps.extend(tail.steps);
            let dev = FullPlay { steps, terminal: tail.terminal };
            if play_score(tree, machine, mech, &dev, owner)? > base + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Optimal continuation from a node, by direct recursion over completions:
/// at each decision node the owner takes the action whose completion scores
/// best for them (GPL measured from this node down; contributions above are
/// affine offsets shared by all candidates).
fn bf_continuation(
    tree: &GameTree,
    machine: &MachineProfile,
    mech: Mechanism,
    node: NodeId,
) -> Result<FullPlay, LabError> {
    match &tree.nodes()[node] {
        Node::Terminal { .. } => Ok(FullPlay { steps: Vec::new(), terminal: node }),
        Node::Decision { owner, children } => {
            let owner = *owner;
            let best = machine_optimal_action(tree, machine, node)?;
            let best_ev = machine.action_value(tree, owner, node, best)?;
            let mut chosen: Option<(FullPlay, f64)> = None;
            for (a, &child) in children.iter().enumerate() {
                let tail = bf_continuation(tree, machine, mech, child)?;
                let mut steps = vec![(node, a)];
                steps.extend(tail.steps.iter().copied());
                let candidate = FullPlay { steps, terminal: tail.terminal };
                let reward = tree.rewards(candidate.terminal)?[owner];
                let epl = best_ev - machine.action_value(tree, owner, node, a)?;
                let mut gpl = epl;
                for &(n2, a2) in &candidate.steps[1..] {
                    if tree.owner(n2)? == owner {
                        let b2 = machine_optimal_action(tree, machine, n2)?;
                        gpl += machine.action_value(tree, owner, n2, b2)?
                            - machine.action_value(tree, owner, n2, a2)?;
                    }
                }
                let score = mech.score(reward, gpl);
                match &chosen {
                    Some((_, s)) if score <= *s => {}
                    _ => chosen = Some((candidate, score)),
                }
            }
            Ok(chosen.expect("decision nodes have actions").0)
        }
    }
}

/// Min and max mechanism score over all full plays, per player.
pub fn lab_extremes(
    tree: &GameTree,
    machine: &MachineProfile,
    mech: Mechanism,
) -> Result<Vec<(f64, f64)>, LabError> {
    let plays = tree.enumerate_full_plays(EXTREMES_PLAY_LIMIT)?;
    let mut out = Vec::with_capacity(tree.player_count());
    for player in 0..tree.player_count() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for play in &plays {
            let s = play_score(tree, machine, mech, play, player)?;
            lo = lo.min(s);
            hi = hi.max(s);
        }
        out.push((lo, hi));
    }
    Ok(out)
}

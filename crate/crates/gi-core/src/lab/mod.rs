//! Synthetic extensive-form games with per-player machines.
//!
//! The lab hosts small perfect-information trees, machine profiles
//! (node/action evaluations as outcome distributions), and the linear
//! mechanism family. Solvers and property checks live in the submodules:
//! [`solve`] for backward induction and its brute-force oracle, [`checks`]
//! for dynamic consistency, the two-player GI identity, mechanism
//! consistency, and gaming-proofness margins, [`random`] for seeded game
//! and machine generation.

pub mod checks;
pub mod random;
pub mod solve;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::play::PlaySeq;
use crate::reward::{expected_value, OutcomeDistribution, RewardScheme};

pub type NodeId = usize;
pub type ActionId = usize;
pub type PlayerId = usize;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("machine has no evaluation for player {player} at node {node} action {action}")]
    MissingActionEval { player: PlayerId, node: NodeId, action: ActionId },
    #[error("machine has no node-level evaluation for player {player} at node {node}")]
    MissingNodeEval { player: PlayerId, node: NodeId },
    #[error("game has {plays} full plays, over the {limit} guard")]
    SizeGuard { plays: usize, limit: usize },
    #[error("operation needs a two-player game, got {0} players")]
    NotTwoPlayer(usize),
    #[error("terminal rewards are not constant-sum: node {node} sums to {sum}, expected {expected}")]
    NotConstantSum { node: NodeId, sum: f64, expected: f64 },
    #[error("node {0} is not a decision node")]
    NotDecision(NodeId),
    #[error("node {0} does not exist")]
    NoSuchNode(NodeId),
    #[error("invalid tree: {0}")]
    BadTree(String),
}

/// One node of a game tree: a decision point or a terminal with rewards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Decision { owner: PlayerId, children: Vec<NodeId> },
    Terminal { rewards: Vec<f64> },
}

/// A finite perfect-information game tree.
///
/// Node 0 is the root; children always carry larger ids than their parent,
/// which makes the tree acyclic by construction and node ids strictly
/// increasing along every play. Action ids index a node's child list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTree {
    nodes: Vec<Node>,
    player_count: usize,
    /// Per-player outcome set: the distinct terminal reward values.
    schemes: Vec<RewardScheme>,
}

impl GameTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, LabError> {
        self.nodes.get(id).ok_or(LabError::NoSuchNode(id))
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn player_count(&self) -> usize {
        self.player_count
    }

    pub fn scheme(&self, player: PlayerId) -> &RewardScheme {
        &self.schemes[player]
    }

    pub fn is_terminal(&self, id: NodeId) -> bool {
        matches!(self.nodes[id], Node::Terminal { .. })
    }

    pub fn owner(&self, id: NodeId) -> Result<PlayerId, LabError> {
        match self.node(id)? {
            Node::Decision { owner, .. } => Ok(*owner),
            Node::Terminal { .. } => Err(LabError::NotDecision(id)),
        }
    }

    pub fn children(&self, id: NodeId) -> Result<&[NodeId], LabError> {
        match self.node(id)? {
            Node::Decision { children, .. } => Ok(children),
            Node::Terminal { .. } => Err(LabError::NotDecision(id)),
        }
    }

    pub fn rewards(&self, id: NodeId) -> Result<&[f64], LabError> {
        match self.node(id)? {
            Node::Terminal { rewards } => Ok(rewards),
            Node::Decision { .. } => Err(LabError::BadTree(format!("node {id} is not terminal"))),
        }
    }

    pub fn terminal_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| self.is_terminal(i))
    }

    pub fn decision_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.is_terminal(i))
    }

    /// Number of full plays, aborting once `limit` is exceeded.
    pub fn count_full_plays(&self, limit: usize) -> Result<usize, LabError> {
        fn walk(tree: &GameTree, id: NodeId, limit: usize) -> Result<usize, LabError> {
            match &tree.nodes[id] {
                Node::Terminal { .. } => Ok(1),
                Node::Decision { children, .. } => {
                    let mut total = 0usize;
                    for &c in children {
                        total += walk(tree, c, limit)?;
                        if total > limit {
                            return Err(LabError::SizeGuard { plays: total, limit });
                        }
                    }
                    Ok(total)
                }
            }
        }
        walk(self, self.root(), limit)
    }

    /// All full plays in lexicographic action order (guarded).
    pub fn enumerate_full_plays(&self, limit: usize) -> Result<Vec<FullPlay>, LabError> {
        self.count_full_plays(limit)?;
        let mut plays = Vec::new();
        let mut steps: Vec<(NodeId, ActionId)> = Vec::new();
        fn dfs(
            tree: &GameTree,
            id: NodeId,
            steps: &mut Vec<(NodeId, ActionId)>,
            out: &mut Vec<FullPlay>,
        ) {
            match &tree.nodes[id] {
                Node::Terminal { .. } => out.push(FullPlay { steps: steps.clone(), terminal: id }),
                Node::Decision { children, .. } => {
                    for (a, &c) in children.iter().enumerate() {
                        steps.push((id, a));
                        dfs(tree, c, steps, out);
                        steps.pop();
                    }
                }
            }
        }
        dfs(self, self.root(), &mut steps, &mut plays);
        Ok(plays)
    }
}

/// Incremental tree construction: create a node, then attach children.
pub struct GameTreeBuilder {
    nodes: Vec<Node>,
    player_count: usize,
}

impl GameTreeBuilder {
    pub fn new(player_count: usize) -> Self {
        assert!(player_count >= 1);
        Self { nodes: Vec::new(), player_count }
    }

    /// Append a decision node; the first node created is the root.
    pub fn decision(&mut self, owner: PlayerId) -> NodeId {
        assert!(owner < self.player_count);
        self.nodes.push(Node::Decision { owner, children: Vec::new() });
        self.nodes.len() - 1
    }

    /// Append a decision node and link it as the next action of `parent`.
    pub fn decision_child(&mut self, parent: NodeId, owner: PlayerId) -> NodeId {
        let id = self.decision(owner);
        self.link(parent, id);
        id
    }

    /// Append a terminal node and link it as the next action of `parent`.
    pub fn terminal_child(&mut self, parent: NodeId, rewards: Vec<f64>) -> NodeId {
        assert_eq!(rewards.len(), self.player_count);
        self.nodes.push(Node::Terminal { rewards });
        let id = self.nodes.len() - 1;
        self.link(parent, id);
        id
    }

    fn link(&mut self, parent: NodeId, child: NodeId) {
        match &mut self.nodes[parent] {
            Node::Decision { children, .. } => children.push(child),
            Node::Terminal { .. } => panic!("cannot attach children to a terminal"),
        }
    }

    pub fn build(self) -> Result<GameTree, LabError> {
        if self.nodes.is_empty() {
            return Err(LabError::BadTree("empty tree".into()));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::Decision { children, .. } = node {
                if children.is_empty() {
                    return Err(LabError::BadTree(format!("decision node {id} has no actions")));
                }
                for &c in children {
                    if c <= id || c >= self.nodes.len() {
                        return Err(LabError::BadTree(format!("bad child {c} of node {id}")));
                    }
                }
            }
        }
        // every non-root node must be referenced exactly once
        let mut referenced = vec![false; self.nodes.len()];
        referenced[0] = true;
        for node in &self.nodes {
            if let Node::Decision { children, .. } = node {
                for &c in children {
                    if referenced[c] {
                        return Err(LabError::BadTree(format!("node {c} reached twice")));
                    }
                    referenced[c] = true;
                }
            }
        }
        if let Some(orphan) = referenced.iter().position(|r| !r) {
            return Err(LabError::BadTree(format!("node {orphan} unreachable from root")));
        }

        let mut schemes = Vec::with_capacity(self.player_count);
        for player in 0..self.player_count {
            let mut values: Vec<f64> = self
                .nodes
                .iter()
                .filter_map(|n| match n {
                    Node::Terminal { rewards } => Some(rewards[player]),
                    _ => None,
                })
                .collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            if values.is_empty() {
                return Err(LabError::BadTree("tree has no terminals".into()));
            }
            schemes.push(RewardScheme::from_values(values));
        }
        Ok(GameTree { nodes: self.nodes, player_count: self.player_count, schemes })
    }
}

/// A root-to-terminal action sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullPlay {
    pub steps: Vec<(NodeId, ActionId)>,
    pub terminal: NodeId,
}

impl FullPlay {
    /// The subsequence of steps taken by one player.
    pub fn player_seq(&self, tree: &GameTree, player: PlayerId) -> PlaySeq {
        let actions = self
            .steps
            .iter()
            .filter(|(node, _)| tree.owner(*node).is_ok_and(|o| o == player))
            .copied()
            .collect();
        PlaySeq::new(actions, true)
    }

    pub fn move_count(&self, tree: &GameTree, player: PlayerId) -> usize {
        self.steps
            .iter()
            .filter(|(node, _)| tree.owner(*node).is_ok_and(|o| o == player))
            .count()
    }
}

/// Per-player node and action evaluations.
///
/// Action-level entries are primary (GPL and optimal actions read them);
/// node-level entries serve the dynamic-consistency and identity checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineProfile {
    /// `[player][node][action]`
    action_evals: Vec<Vec<Vec<Option<OutcomeDistribution>>>>,
    /// `[player][node]`
    node_evals: Vec<Vec<Option<OutcomeDistribution>>>,
}

impl MachineProfile {
    pub fn empty(tree: &GameTree) -> Self {
        let players = tree.player_count();
        let action_evals = (0..players)
            .map(|_| {
                tree.nodes()
                    .iter()
                    .map(|n| match n {
                        Node::Decision { children, .. } => vec![None; children.len()],
                        Node::Terminal { .. } => Vec::new(),
                    })
                    .collect()
            })
            .collect();
        let node_evals = (0..players).map(|_| vec![None; tree.nodes().len()]).collect();
        Self { action_evals, node_evals }
    }

    pub fn set_action_eval(
        &mut self,
        player: PlayerId,
        node: NodeId,
        action: ActionId,
        dist: OutcomeDistribution,
    ) {
        self.action_evals[player][node][action] = Some(dist);
    }

    pub fn set_node_eval(&mut self, player: PlayerId, node: NodeId, dist: OutcomeDistribution) {
        self.node_evals[player][node] = Some(dist);
    }

    pub fn action_eval(
        &self,
        player: PlayerId,
        node: NodeId,
        action: ActionId,
    ) -> Result<&OutcomeDistribution, LabError> {
        self.action_evals[player]
            .get(node)
            .and_then(|v| v.get(action))
            .and_then(|o| o.as_ref())
            .ok_or(LabError::MissingActionEval { player, node, action })
    }

    pub fn node_eval(&self, player: PlayerId, node: NodeId) -> Result<&OutcomeDistribution, LabError> {
        self.node_evals[player]
            .get(node)
            .and_then(|o| o.as_ref())
            .ok_or(LabError::MissingNodeEval { player, node })
    }

    pub fn has_node_evals(&self) -> bool {
        self.node_evals.iter().all(|per_player| per_player.iter().all(|o| o.is_some()))
    }

    /// Expected value of an action for `player` under their scheme.
    pub fn action_value(
        &self,
        tree: &GameTree,
        player: PlayerId,
        node: NodeId,
        action: ActionId,
    ) -> Result<f64, LabError> {
        let dist = self.action_eval(player, node, action)?;
        expected_value(dist, tree.scheme(player))
            .map_err(|_| LabError::MissingActionEval { player, node, action })
    }

    /// Expected value of a node for `player` under their scheme.
    pub fn node_value(&self, tree: &GameTree, player: PlayerId, node: NodeId) -> Result<f64, LabError> {
        let dist = self.node_eval(player, node)?;
        expected_value(dist, tree.scheme(player))
            .map_err(|_| LabError::MissingNodeEval { player, node })
    }
}

/// The linear mechanism family `alpha * R - beta * GPL + delta`.
///
/// GI is (1, 1, 0); the reward-only and GPL-only members exist as
/// counterexample mechanisms for the consistency checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mechanism {
    Gi,
    Linear { alpha: f64, beta: f64, delta: f64 },
    GplOnly,
    RewardOnly,
}

impl Mechanism {
    /// Score from a play's realized reward and game point loss.
    pub fn score(&self, reward: f64, gpl: f64) -> f64 {
        match self {
            Mechanism::Gi => reward - gpl,
            Mechanism::Linear { alpha, beta, delta } => alpha * reward - beta * gpl + delta,
            Mechanism::GplOnly => -gpl,
            Mechanism::RewardOnly => reward,
        }
    }

    pub fn registry_name(&self) -> String {
        match self {
            Mechanism::Gi => "gi".into(),
            Mechanism::Linear { alpha, beta, delta } => format!("linear:{alpha},{beta},{delta}"),
            Mechanism::GplOnly => "gpl-only".into(),
            Mechanism::RewardOnly => "reward-only".into(),
        }
    }

    /// Parse a registry name: `gi`, `linear:a,b,d`, `gpl-only`, `reward-only`.
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "gi" => Ok(Mechanism::Gi),
            "gpl-only" => Ok(Mechanism::GplOnly),
            "reward-only" => Ok(Mechanism::RewardOnly),
            other => {
                let spec = other
                    .strip_prefix("linear:")
                    .ok_or_else(|| format!("unknown mechanism `{other}`"))?;
                let parts: Vec<&str> = spec.split(',').collect();
                if parts.len() != 3 {
                    return Err(format!("linear mechanism needs alpha,beta,delta, got `{spec}`"));
                }
                let mut vals = [0.0; 3];
                for (i, p) in parts.iter().enumerate() {
                    vals[i] = p.trim().parse::<f64>().map_err(|e| format!("bad number `{p}`: {e}"))?;
                }
                Ok(Mechanism::Linear { alpha: vals[0], beta: vals[1], delta: vals[2] })
            }
        }
    }
}

/// The machine-optimal action at a decision node: argmax of the owner's
/// expected value, ties broken by lowest action id.
pub fn machine_optimal_action(
    tree: &GameTree,
    machine: &MachineProfile,
    node: NodeId,
) -> Result<ActionId, LabError> {
    let owner = tree.owner(node)?;
    optimal_action_for(tree, machine, node, owner)
}

/// Argmax action at `node` under `player`'s machine component (the owner's
/// view is [`machine_optimal_action`]; priors of other agents use this).
pub fn optimal_action_for(
    tree: &GameTree,
    machine: &MachineProfile,
    node: NodeId,
    player: PlayerId,
) -> Result<ActionId, LabError> {
    let children = tree.children(node)?;
    let mut best: Option<(ActionId, f64)> = None;
    for action in 0..children.len() {
        let ev = machine.action_value(tree, player, node, action)?;
        match best {
            Some((_, best_ev)) if ev <= best_ev => {}
            _ => best = Some((action, ev)),
        }
    }
    Ok(best.expect("decision nodes have at least one action").0)
}

/// GPL of `player` along a play: the sum over their steps of
/// EV(machine-optimal action) - EV(played action).
pub fn play_gpl(
    tree: &GameTree,
    machine: &MachineProfile,
    play: &FullPlay,
    player: PlayerId,
) -> Result<f64, LabError> {
    let mut total = 0.0;
    for &(node, action) in &play.steps {
        if tree.owner(node)? != player {
            continue;
        }
        let best = machine_optimal_action(tree, machine, node)?;
        let best_ev = machine.action_value(tree, player, node, best)?;
        let played_ev = machine.action_value(tree, player, node, action)?;
        total += best_ev - played_ev;
    }
    Ok(total)
}

/// A player's mechanism score for a full play.
pub fn play_score(
    tree: &GameTree,
    machine: &MachineProfile,
    mech: Mechanism,
    play: &FullPlay,
    player: PlayerId,
) -> Result<f64, LabError> {
    let reward = tree.rewards(play.terminal)?[player];
    let gpl = play_gpl(tree, machine, play, player)?;
    Ok(mech.score(reward, gpl))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The 3-play toy: root (P0) with a terminal action (1, 0) and an action
    /// to a P1 node whose actions reach (0, 1) and (0.5, 0.5).
    pub(crate) fn toy_tree() -> GameTree {
        let mut b = GameTreeBuilder::new(2);
        let root = b.decision(0);
        b.terminal_child(root, vec![1.0, 0.0]);
        let black = b.decision_child(root, 1);
        b.terminal_child(black, vec![0.0, 1.0]);
        b.terminal_child(black, vec![0.5, 0.5]);
        b.build().unwrap()
    }

    #[test]
    fn builder_produces_valid_toy() {
        let tree = toy_tree();
        assert_eq!(tree.player_count(), 2);
        assert_eq!(tree.count_full_plays(100).unwrap(), 3);
        assert_eq!(tree.scheme(0).values(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn builder_rejects_childless_decision() {
        let mut b = GameTreeBuilder::new(1);
        b.decision(0);
        assert!(b.build().is_err());
    }

    #[test]
    fn play_enumeration_is_lexicographic() {
        let tree = toy_tree();
        let plays = tree.enumerate_full_plays(100).unwrap();
        assert_eq!(plays.len(), 3);
        assert_eq!(plays[0].steps, vec![(0, 0)]);
        assert_eq!(plays[1].steps, vec![(0, 1), (2, 0)]);
        assert_eq!(plays[2].steps, vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn size_guard_triggers() {
        let tree = toy_tree();
        assert!(matches!(tree.count_full_plays(2), Err(LabError::SizeGuard { .. })));
    }

    #[test]
    fn optimal_action_prefers_higher_ev_and_breaks_ties_low() {
        let tree = toy_tree();
        let mut m = MachineProfile::empty(&tree);
        let d = |ev: f64| {
            // EV under scheme [0, 0.5, 1]: mass split between extremes
            OutcomeDistribution::validate(vec![1.0 - ev, 0.0, ev]).unwrap()
        };
        m.set_action_eval(0, 0, 0, d(0.6));
        m.set_action_eval(0, 0, 1, d(0.4));
        assert_eq!(machine_optimal_action(&tree, &m, 0).unwrap(), 0);
        m.set_action_eval(0, 0, 1, d(0.6));
        assert_eq!(machine_optimal_action(&tree, &m, 0).unwrap(), 0, "tie -> lowest id");
        m.set_action_eval(0, 0, 0, d(0.2));
        assert_eq!(machine_optimal_action(&tree, &m, 0).unwrap(), 1);
    }

    #[test]
    fn missing_coverage_is_reported() {
        let tree = toy_tree();
        let m = MachineProfile::empty(&tree);
        assert!(matches!(
            machine_optimal_action(&tree, &m, 0),
            Err(LabError::MissingActionEval { player: 0, node: 0, action: 0 })
        ));
    }

    #[test]
    fn mechanism_registry_round_trip() {
        for m in [
            Mechanism::Gi,
            Mechanism::GplOnly,
            Mechanism::RewardOnly,
            Mechanism::Linear { alpha: 0.5, beta: 1.5, delta: -2.0 },
        ] {
            assert_eq!(Mechanism::parse(&m.registry_name()).unwrap(), m);
        }
        assert!(Mechanism::parse("nonsense").is_err());
        assert!(Mechanism::parse("linear:1,2").is_err());
    }

    #[test]
    fn ggi_reduces_to_gi() {
        let gi = Mechanism::Gi;
        let linear = Mechanism::Linear { alpha: 1.0, beta: 1.0, delta: 0.0 };
        for (r, g) in [(1.0, 0.3), (0.0, -0.2), (0.5, 0.0)] {
            assert_eq!(gi.score(r, g), linear.score(r, g));
        }
    }
}

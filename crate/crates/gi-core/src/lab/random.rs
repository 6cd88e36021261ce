//! Seeded generation of games and machines for the property suites.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{GameTree, GameTreeBuilder, MachineProfile, Node, NodeId};
use crate::reward::OutcomeDistribution;

/// A random tree plus its truthful uniform-continuation machine.
///
/// Deterministic for a fixed seed. Terminal rewards are drawn from a
/// quarter-point grid so equal-reward pairs actually occur in the
/// consistency checks.
pub fn random_game(
    seed: u64,
    depth_max: usize,
    branch_max: usize,
    players: usize,
) -> (GameTree, MachineProfile) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = random_tree(&mut rng, depth_max, branch_max, players, |rng| {
        rng.gen_range(0..=4) as f64 * 0.25
    });
    let machine = truthful_uniform_machine(&tree);
    (tree, machine)
}

/// A random two-player constant-sum tree: terminals pay (r, total - r).
pub fn random_constant_sum_game(seed: u64, depth_max: usize, branch_max: usize, total: f64) -> GameTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree_with(&mut rng, depth_max, branch_max, 2, &mut |rng| {
        let r = rng.gen_range(0..=4) as f64 * 0.25;
        vec![r, total - r]
    })
}

/// A random tree with independently drawn per-player rewards.
pub fn random_tree<R: Rng>(
    rng: &mut R,
    depth_max: usize,
    branch_max: usize,
    players: usize,
    mut reward_gen: impl FnMut(&mut R) -> f64,
) -> GameTree {
    random_tree_with(rng, depth_max, branch_max, players, &mut |rng| {
        (0..players).map(|_| reward_gen(rng)).collect()
    })
}

fn random_tree_with<R: Rng>(
    rng: &mut R,
    depth_max: usize,
    branch_max: usize,
    players: usize,
    rewards_gen: &mut dyn FnMut(&mut R) -> Vec<f64>,
) -> GameTree {
    assert!(depth_max >= 1 && branch_max >= 1);
    let mut b = GameTreeBuilder::new(players);
    let root = b.decision(rng.gen_range(0..players));
    // breadth-first expansion keeps child ids above parent ids
    let mut frontier: Vec<(NodeId, usize)> = vec![(root, depth_max)];
    while let Some((node, depth)) = frontier.pop() {
        let n_actions = rng.gen_range(1..=branch_max);
        for _ in 0..n_actions {
            // bias toward going deeper while depth remains
            let make_terminal = depth == 1 || rng.gen_bool(0.35);
            if make_terminal {
                b.terminal_child(node, rewards_gen(rng));
            } else {
                let child = b.decision_child(node, rng.gen_range(0..players));
                frontier.push((child, depth - 1));
            }
        }
    }
    b.build().expect("generated trees are structurally valid")
}

/// The truthful machine: every node is evaluated as the exact distribution
/// of the player's terminal reward under uniform continuation, and every
/// action as its child's node distribution. Dynamically consistent by
/// construction.
pub fn truthful_uniform_machine(tree: &GameTree) -> MachineProfile {
    let n = tree.nodes().len();
    let players = tree.player_count();
    let mut machine = MachineProfile::empty(tree);
    // [player][node] -> probs over the player's scheme
    let mut node_probs: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n]; players];

    for id in (0..n).rev() {
        match &tree.nodes()[id] {
            Node::Terminal { rewards } => {
                for player in 0..players {
                    let scheme = tree.scheme(player);
                    let mut probs = vec![0.0; scheme.len()];
                    probs[scheme.index_of_value(rewards[player])] = 1.0;
                    node_probs[player][id] = probs;
                }
            }
            Node::Decision { children, .. } => {
                let weight = 1.0 / children.len() as f64;
                for player in 0..players {
                    let mut probs = vec![0.0; tree.scheme(player).len()];
                    for &c in children {
                        for (i, p) in node_probs[player][c].iter().enumerate() {
                            probs[i] += weight * p;
                        }
                    }
                    node_probs[player][id] = probs;
                }
            }
        }
    }

    for id in 0..n {
        for player in 0..players {
            let dist = OutcomeDistribution::validate(node_probs[player][id].clone())
                .expect("uniform mixtures are valid distributions");
            machine.set_node_eval(player, id, dist);
        }
        if let Node::Decision { children, .. } = &tree.nodes()[id] {
            for (a, &c) in children.iter().enumerate() {
                for player in 0..players {
                    let dist = OutcomeDistribution::validate(node_probs[player][c].clone()).unwrap();
                    machine.set_action_eval(player, id, a, dist);
                }
            }
        }
    }
    machine
}

/// The best-response propagated machine: terminals are evaluated
/// truthfully; every decision node copies (for all players) the node
/// distribution of the owner's best child. Dynamically consistent, and on
/// constant-sum trees the two players' node values sum to the constant
/// while each owner's node value equals their best-action value — the
/// premises of the two-player GI identity.
pub fn best_response_machine(tree: &GameTree) -> MachineProfile {
    let n = tree.nodes().len();
    let players = tree.player_count();
    let mut machine = MachineProfile::empty(tree);
    let mut node_probs: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n]; players];
    let mut node_values: Vec<Vec<f64>> = vec![vec![0.0; n]; players];

    for id in (0..n).rev() {
        match &tree.nodes()[id] {
            Node::Terminal { rewards } => {
                for player in 0..players {
                    let scheme = tree.scheme(player);
                    let mut probs = vec![0.0; scheme.len()];
                    probs[scheme.index_of_value(rewards[player])] = 1.0;
                    node_probs[player][id] = probs;
                    node_values[player][id] = rewards[player];
                }
            }
            Node::Decision { owner, children } => {
                let mut best: Option<(NodeId, f64)> = None;
                for &c in children {
                    let v = node_values[*owner][c];
                    match best {
                        Some((_, bv)) if v <= bv => {}
                        _ => best = Some((c, v)),
                    }
                }
                let (best_child, _) = best.expect("decision nodes have actions");
                for player in 0..players {
                    node_probs[player][id] = node_probs[player][best_child].clone();
                    node_values[player][id] = node_values[player][best_child];
                }
            }
        }
    }

    for id in 0..n {
        for player in 0..players {
            let dist = OutcomeDistribution::validate(node_probs[player][id].clone()).unwrap();
            machine.set_node_eval(player, id, dist);
        }
        if let Node::Decision { children, .. } = &tree.nodes()[id] {
            for (a, &c) in children.iter().enumerate() {
                for player in 0..players {
                    let dist = OutcomeDistribution::validate(node_probs[player][c].clone()).unwrap();
                    machine.set_action_eval(player, id, a, dist);
                }
            }
        }
    }
    machine
}

/// A fully random machine: arbitrary valid distributions everywhere.
/// Generally dynamically inconsistent; used to stress the solvers.
pub fn random_machine<R: Rng>(tree: &GameTree, rng: &mut R) -> MachineProfile {
    let mut machine = MachineProfile::empty(tree);
    for id in 0..tree.nodes().len() {
        for player in 0..tree.player_count() {
            machine.set_node_eval(player, id, random_dist(tree.scheme(player).len(), rng));
        }
        if let Node::Decision { children, .. } = &tree.nodes()[id] {
            for a in 0..children.len() {
                for player in 0..tree.player_count() {
                    machine.set_action_eval(player, id, a, random_dist(tree.scheme(player).len(), rng));
                }
            }
        }
    }
    machine
}

fn random_dist<R: Rng>(len: usize, rng: &mut R) -> OutcomeDistribution {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0) + 1e-6).collect();
    let sum: f64 = raw.iter().sum();
    OutcomeDistribution::validate(raw.into_iter().map(|x| x / sum).collect()).unwrap()
}

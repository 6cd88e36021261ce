//! Realized action sequences for one player.

use serde::{Deserialize, Serialize};

/// One player's realized actions in a play: ordered (node, action) pairs.
///
/// Node ids strictly increase along the sequence. `full` marks whether the
/// underlying play reached a terminal node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaySeq {
    actions: Vec<(usize, usize)>,
    full: bool,
}

impl PlaySeq {
    pub fn new(actions: Vec<(usize, usize)>, full: bool) -> Self {
        for pair in actions.windows(2) {
            assert!(pair[0].0 < pair[1].0, "node ids must strictly increase");
        }
        Self { actions, full }
    }

    pub fn empty(full: bool) -> Self {
        Self { actions: Vec::new(), full }
    }

    pub fn actions(&self) -> &[(usize, usize)] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn last(&self) -> Option<(usize, usize)> {
        self.actions.last().copied()
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Work performed on a signal state, in units a hardware realization would
/// pay for.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCounters {
    /// Comb-filter invocations, one per filtered signal buffer.
    pub filters: u64,
    /// Swap-network stages executed, including the undo pass.
    pub swap_stages: u64,
    /// Individual buffer relocations made by swap networks and slot routing.
    pub buffer_moves: u64,
    pub oracle_calls: u64,
    pub gates_by_kind: BTreeMap<String, u64>,
}

impl ResourceCounters {
    pub(crate) fn count_gate(&mut self, kind: impl Into<String>) {
        *self.gates_by_kind.entry(kind.into()).or_insert(0) += 1;
    }

    pub fn total_gates(&self) -> u64 {
        self.gates_by_kind.values().sum()
    }
}

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{KripkeStructure, WorldId};
use crate::logic::Agent;

/// Relational properties of one agent's accessibility relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgentFrame {
    pub agent: Agent,
    pub reflexive: bool,
    pub transitive: bool,
    pub euclidean: bool,
    pub serial: bool,
}

impl AgentFrame {
    pub fn is_kd45(&self) -> bool {
        self.serial && self.transitive && self.euclidean
    }

    pub fn is_s5(&self) -> bool {
        self.is_kd45() && self.reflexive
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameReport {
    pub agents: Vec<AgentFrame>,
    pub is_kd45: bool,
    pub is_s5: bool,
}

impl FrameReport {
    pub fn agent(&self, agent: &Agent) -> Option<&AgentFrame> {
        self.agents.iter().find(|a| &a.agent == agent)
    }
}

/// Exact relational checks, per agent.
pub fn check_frame(m: &KripkeStructure) -> FrameReport {
    let n = m.world_count();
    let agents: Vec<AgentFrame> = m
        .signature()
        .agents()
        .iter()
        .enumerate()
        .map(|(i, agent)| {
            let rel = m.relation(i);
            let has = |u: usize, v: usize| rel[u].binary_search(&v).is_ok();
            let reflexive = (0..n).all(|w| has(w, w));
            let serial = rel.iter().all(|succ| !succ.is_empty());
            // Transitive: R(v) within R(u) for every edge u -> v. Euclidean:
            // R(u) within R(v). Each distinct pair of rows is compared once.
            let row = row_ids(rel);
            let mut transitive = true;
            let mut euclidean = true;
            let mut compared = HashSet::new();
            for u in 0..n {
                for &v in &rel[u] {
                    if row[u] == row[v] || !compared.insert((row[u], row[v])) {
                        continue;
                    }
                    transitive &= is_subset(&rel[v], &rel[u]);
                    euclidean &= is_subset(&rel[u], &rel[v]);
                }
            }
            AgentFrame {
                agent: agent.clone(),
                reflexive,
                transitive,
                euclidean,
                serial,
            }
        })
        .collect();
    let is_kd45 = agents.iter().all(AgentFrame::is_kd45);
    let is_s5 = agents.iter().all(AgentFrame::is_s5);
    FrameReport {
        agents,
        is_kd45,
        is_s5,
    }
}

fn row_ids(rel: &[Vec<WorldId>]) -> Vec<usize> {
    let mut ids: HashMap<&[WorldId], usize> = HashMap::new();
    rel.iter()
        .map(|row| {
            let next = ids.len();
            *ids.entry(row.as_slice()).or_insert(next)
        })
        .collect()
}

/// Both slices sorted.
fn is_subset(small: &[WorldId], large: &[WorldId]) -> bool {
    let mut rest = large.iter();
    small.iter().all(|x| rest.any(|y| y == x))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kripke::Valuation;
    use crate::logic::Signature;

    fn structure(n: usize, edges: &[(usize, usize)]) -> KripkeStructure {
        let sig = Arc::new(Signature::from_names(&["a"], &["f"]));
        KripkeStructure::from_edges(
            sig,
            vec![Valuation(0); n],
            edges.iter().map(|&(u, v)| (0, u, v)),
        )
        .unwrap()
    }

    #[test]
    fn identity_is_s5() {
        let r = check_frame(&structure(3, &[(0, 0), (1, 1), (2, 2)]));
        let a = &r.agents[0];
        assert!(a.reflexive && a.transitive && a.euclidean && a.serial);
        assert!(r.is_s5 && r.is_kd45);
    }

    #[test]
    fn pointing_to_a_sink_is_kd45_only() {
        let r = check_frame(&structure(2, &[(0, 1), (1, 1)]));
        let a = &r.agents[0];
        assert!(a.serial && a.transitive && a.euclidean && !a.reflexive);
        assert!(r.is_kd45 && !r.is_s5);
    }

    #[test]
    fn empty_relation_is_not_serial() {
        let r = check_frame(&structure(1, &[]));
        assert!(!r.agents[0].serial);
        assert!(!r.is_kd45);
        // vacuously transitive and euclidean
        assert!(r.agents[0].transitive && r.agents[0].euclidean);
    }

    #[test]
    fn chain_is_not_transitive_nor_euclidean() {
        let r = check_frame(&structure(3, &[(0, 1), (1, 2), (2, 2)]));
        assert!(!r.agents[0].transitive);
        assert!(!r.agents[0].euclidean);
    }
}

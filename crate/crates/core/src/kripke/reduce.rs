use std::collections::{HashMap, VecDeque};

use super::{KripkeStructure, PointedState, Valuation, WorldId};

/// Drops every world not reachable from the designated one.
///
/// Surviving worlds are renumbered in breadth-first order from the
/// designated world, which becomes world 0.
pub fn prune_unreachable(state: &PointedState) -> PointedState {
    let m = state.structure();
    let agents = m.signature().agents().len();
    let mut index: Vec<Option<WorldId>> = vec![None; m.world_count()];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([state.designated()]);
    index[state.designated()] = Some(0);
    order.push(state.designated());
    while let Some(w) = queue.pop_front() {
        for i in 0..agents {
            for &v in m.successors(i, w) {
                if index[v].is_none() {
                    index[v] = Some(order.len());
                    order.push(v);
                    queue.push_back(v);
                }
            }
        }
    }
    let worlds = order.iter().map(|&w| m.valuation(w)).collect();
    let relations = (0..agents)
        .map(|i| {
            order
                .iter()
                .map(|&w| {
                    let mut succ: Vec<WorldId> = m
                        .successors(i, w)
                        .iter()
                        .map(|&v| index[v].expect("reachable"))
                        .collect();
                    succ.sort_unstable();
                    succ
                })
                .collect()
        })
        .collect();
    let structure = KripkeStructure::from_parts_unchecked(m.signature().clone(), worlds, relations);
    PointedState {
        structure,
        designated: 0,
    }
}

/// Coarsest bisimulation of `m` as a block number per world.
///
/// Starts from the partition by valuation and splits blocks until every
/// world in a block sees the same set of successor blocks for each agent.
/// Block numbers follow first occurrence in world order.
pub fn bisimulation_classes(m: &KripkeStructure) -> Vec<usize> {
    let n = m.world_count();
    let agents = m.signature().agents().len();
    let mut block = number_by_first_occurrence(m.valuations().iter().copied());
    let mut count = block.iter().max().map_or(0, |b| b + 1);
    loop {
        let signatures = (0..n).map(|w| {
            let per_agent: Vec<Vec<usize>> = (0..agents)
                .map(|i| {
                    let mut s: Vec<usize> = m.successors(i, w).iter().map(|&v| block[v]).collect();
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect();
            (block[w], per_agent)
        });
        let next = number_by_first_occurrence(signatures);
        let next_count = next.iter().max().map_or(0, |b| b + 1);
        block = next;
        if next_count == count {
            return block;
        }
        count = next_count;
    }
}

fn number_by_first_occurrence<K: std::hash::Hash + Eq>(
    keys: impl Iterator<Item = K>,
) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

/// Prunes, then quotients by the coarsest bisimulation. The result is the
/// smallest pointed structure bisimilar to the input.
pub fn bisim_contract(state: &PointedState) -> PointedState {
    let pruned = prune_unreachable(state);
    let m = pruned.structure();
    let block = bisimulation_classes(m);
    let count = block.iter().max().map_or(0, |b| b + 1);
    if count == m.world_count() {
        return pruned;
    }
    let mut representative = vec![usize::MAX; count];
    for (w, &b) in block.iter().enumerate() {
        if representative[b] == usize::MAX {
            representative[b] = w;
        }
    }
    let worlds: Vec<Valuation> = representative.iter().map(|&w| m.valuation(w)).collect();
    let relations = (0..m.signature().agents().len())
        .map(|i| {
            representative
                .iter()
                .map(|&w| {
                    let mut succ: Vec<usize> =
                        m.successors(i, w).iter().map(|&v| block[v]).collect();
                    succ.sort_unstable();
                    succ.dedup();
                    succ
                })
                .collect()
        })
        .collect();
    let structure = KripkeStructure::from_parts_unchecked(m.signature().clone(), worlds, relations);
    // renumber breadth-first so contraction is structurally idempotent
    prune_unreachable(&PointedState {
        structure,
        designated: block[pruned.designated()],
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::logic::Signature;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::from_names(&["a", "b"], &["f"]))
    }

    #[test]
    fn prune_drops_unreachable_world() {
        let m = KripkeStructure::from_edges(
            sig(),
            vec![Valuation(1), Valuation(0), Valuation(1)],
            [(0, 0, 1), (1, 1, 0), (0, 2, 0)],
        )
        .unwrap();
        let s = PointedState::new(m, 0).unwrap();
        let p = prune_unreachable(&s);
        assert_eq!(p.world_count(), 2);
        assert_eq!(p.designated(), 0);
        assert_eq!(p.structure().successors(0, 0), &[1]);
        assert_eq!(p.structure().successors(1, 1), &[0]);
    }

    #[test]
    fn prune_renumbers_from_designated() {
        let m = KripkeStructure::from_edges(
            sig(),
            vec![Valuation(0), Valuation(1)],
            [(0, 1, 0), (0, 0, 1)],
        )
        .unwrap();
        let p = prune_unreachable(&PointedState::new(m, 1).unwrap());
        assert_eq!(p.world_count(), 2);
        assert_eq!(p.structure().valuation(0), Valuation(1));
    }

    #[test]
    fn duplicate_worlds_merge() {
        // w1 and w2 are copies: same valuation, both point back to w0.
        let m = KripkeStructure::from_edges(
            sig(),
            vec![Valuation(1), Valuation(0), Valuation(0)],
            [(0, 0, 1), (0, 0, 2), (0, 1, 0), (0, 2, 0)],
        )
        .unwrap();
        let s = PointedState::new(m, 0).unwrap();
        let c = bisim_contract(&s);
        assert_eq!(c.world_count(), 2);
        assert_eq!(c.structure().valuation(c.designated()), Valuation(1));
    }

    #[test]
    fn minimal_state_is_a_fixpoint() {
        let m = KripkeStructure::from_edges(
            sig(),
            vec![Valuation(1), Valuation(0)],
            [(0, 0, 1), (1, 1, 0)],
        )
        .unwrap();
        let s = PointedState::new(m, 0).unwrap();
        let c = bisim_contract(&s);
        assert_eq!(c.world_count(), 2);
        assert_eq!(bisim_contract(&c), c);
    }

    #[test]
    fn same_valuation_different_successors_stay_apart() {
        // w0 -a-> w0 ; w1 has no successors. Both make f true.
        let m = KripkeStructure::from_edges(
            sig(),
            vec![Valuation(1), Valuation(1), Valuation(0)],
            [(0, 0, 0), (0, 0, 1), (1, 0, 2)],
        )
        .unwrap();
        let s = PointedState::new(m, 0).unwrap();
        assert_eq!(bisim_contract(&s).world_count(), 3);
    }
}

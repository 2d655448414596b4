use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use sha2::{Digest, Sha256};

use super::{bisim_contract, KripkeError, KripkeStructure, PointedState, WorldId};

/// Byte encoding of a pointed state up to bisimilarity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StateKey(Vec<u8>);

impl StateKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Short fingerprint for logs and plan traces (first 16 bytes of the
    /// SHA-256 of the key, hex encoded).
    pub fn digest(&self) -> String {
        hex::encode(&Sha256::digest(&self.0)[..16])
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(&self.0))
    }
}

/// Isomorphism-invariant ranks from iterated signature refinement.
///
/// Round 0 ranks worlds by valuation. Each later round sorts the tuples
/// (rank, successor ranks per agent) and uses their position as the new rank.
/// Stops when the number of distinct ranks stops growing; at that point
/// equal ranks mean bisimilar worlds.
fn refined_ranks(m: &KripkeStructure) -> Vec<usize> {
    let agents = m.signature().agents().len();
    let mut rank = dense_rank(m.valuations().to_vec());
    let mut classes = distinct(&rank);
    loop {
        let signatures: Vec<(usize, Vec<Vec<usize>>)> = (0..m.world_count())
            .map(|w| {
                let per_agent = (0..agents)
                    .map(|i| {
                        let mut s: Vec<usize> =
                            m.successors(i, w).iter().map(|&v| rank[v]).collect();
                        s.sort_unstable();
                        s.dedup();
                        s
                    })
                    .collect();
                (rank[w], per_agent)
            })
            .collect();
        let next = dense_rank(signatures);
        let next_classes = distinct(&next);
        rank = next;
        if next_classes == classes {
            return rank;
        }
        classes = next_classes;
    }
}

fn dense_rank<K: Ord>(keys: Vec<K>) -> Vec<usize> {
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    let position: BTreeMap<&K, usize> = sorted
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    keys.iter().map(|k| position[k]).collect()
}

fn distinct(rank: &[usize]) -> usize {
    rank.iter().max().map_or(0, |r| r + 1)
}

/// Deterministic world order for `state`: breadth-first from the designated
/// world, successors visited agent by agent in refined-rank order; worlds not
/// reachable come last. Remaining ties (bisimilar worlds) fall back to the
/// world index.
pub fn canonical_order(state: &PointedState) -> Vec<WorldId> {
    let m = state.structure();
    let rank = refined_ranks(m);
    let agents = m.signature().agents().len();
    let mut seen = vec![false; m.world_count()];
    let mut order = Vec::with_capacity(m.world_count());
    let mut queue = VecDeque::from([state.designated()]);
    seen[state.designated()] = true;
    while let Some(w) = queue.pop_front() {
        order.push(w);
        for i in 0..agents {
            let mut succ: Vec<WorldId> = m.successors(i, w).to_vec();
            succ.sort_by_key(|&v| (rank[v], v));
            for v in succ {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut rest: Vec<WorldId> = (0..m.world_count()).filter(|&w| !seen[w]).collect();
    rest.sort_by_key(|&w| (rank[w], w));
    order.extend(rest);
    order
}

/// Key of the bisimulation contraction of `state` under its canonical world
/// order. Two pointed states over the same signature get equal keys iff they
/// are bisimilar.
pub fn canonical_key(state: &PointedState) -> StateKey {
    let contracted = bisim_contract(state);
    let m = contracted.structure();
    let order = canonical_order(&contracted);
    let mut position = vec![0u32; order.len()];
    for (p, &w) in order.iter().enumerate() {
        position[w] = p as u32;
    }
    let agents = m.signature().agents().len();
    let mut bytes = Vec::with_capacity(8 + order.len() * (8 + 4 * agents));
    bytes.extend_from_slice(&(order.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&(agents as u32).to_le_bytes());
    for &w in &order {
        bytes.extend_from_slice(&m.valuation(w).0.to_le_bytes());
    }
    for i in 0..agents {
        for &w in &order {
            let mut succ: Vec<u32> = m.successors(i, w).iter().map(|&v| position[v]).collect();
            succ.sort_unstable();
            bytes.extend_from_slice(&(succ.len() as u32).to_le_bytes());
            for p in succ {
                bytes.extend_from_slice(&p.to_le_bytes());
            }
        }
    }
    StateKey(bytes)
}

/// Bisimilarity of two pointed states over the same signature.
pub fn states_equal(a: &PointedState, b: &PointedState) -> Result<bool, KripkeError> {
    if a.signature() != b.signature() {
        return Err(KripkeError::DomainMismatch);
    }
    Ok(canonical_key(a) == canonical_key(b))
}

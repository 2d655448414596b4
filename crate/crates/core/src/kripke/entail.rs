use std::collections::{BTreeSet, VecDeque};

use super::{KripkeError, KripkeStructure, PointedState};
use crate::logic::{Agent, BeliefFormula, FluentFormula};

/// Whether the pointed state satisfies `formula`.
pub fn entails(state: &PointedState, formula: &BeliefFormula) -> Result<bool, KripkeError> {
    Ok(state.structure().truth_set(formula)?[state.designated()])
}

impl KripkeStructure {
    /// Truth value of `formula` at every world.
    ///
    /// `C_G φ` holds at `w` iff `φ` holds at every world reachable from `w`
    /// by a non-empty path of `G`-edges.
    pub fn truth_set(&self, formula: &BeliefFormula) -> Result<Vec<bool>, KripkeError> {
        formula.check(self.signature())?;
        Ok(self.sat(formula))
    }

    pub(crate) fn eval_prop(&self, w: usize, p: &FluentFormula) -> bool {
        let v = self.valuation(w);
        let sig = self.signature();
        p.eval_with(&|f| v.holds(sig.fluent_index(f).expect("checked fluent")))
    }

    fn agent_indices<'a>(&self, group: impl IntoIterator<Item = &'a Agent>) -> Vec<usize> {
        group
            .into_iter()
            .map(|a| self.signature().agent_index(a).expect("checked agent"))
            .collect()
    }

    /// Worlds all of whose `agents`-successors are in `inner`.
    fn box_all(&self, agents: &[usize], inner: &[bool]) -> Vec<bool> {
        (0..self.world_count())
            .map(|w| {
                agents
                    .iter()
                    .all(|&i| self.successors(i, w).iter().all(|&v| inner[v]))
            })
            .collect()
    }

    fn sat(&self, formula: &BeliefFormula) -> Vec<bool> {
        use BeliefFormula as F;
        let n = self.world_count();
        match formula {
            F::Prop(p) => (0..n).map(|w| self.eval_prop(w, p)).collect(),
            F::B(ag, a) => self.box_all(&self.agent_indices([ag]), &self.sat(a)),
            F::E(group, a) => self.box_all(&self.agent_indices(group), &self.sat(a)),
            F::C(group, a) => self.common(&self.agent_indices(group), &self.sat(a)),
            F::Not(a) => self.sat(a).into_iter().map(|x| !x).collect(),
            F::And(a, b) => zip_with(self.sat(a), self.sat(b), |x, y| x && y),
            F::Or(a, b) => zip_with(self.sat(a), self.sat(b), |x, y| x || y),
            F::Implies(a, b) => zip_with(self.sat(a), self.sat(b), |x, y| !x || y),
        }
    }

    /// A world fails `C` iff it has a group edge into a failing world or
    /// into a world violating `inner`: backward search from the violations.
    fn common(&self, agents: &[usize], inner: &[bool]) -> Vec<bool> {
        let n = self.world_count();
        let mut preds = vec![Vec::new(); n];
        for &i in agents {
            for w in 0..n {
                for &v in self.successors(i, w) {
                    preds[v].push(w);
                }
            }
        }
        let mut fails = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&w| !inner[w]).collect();
        let mut seen: BTreeSet<usize> = queue.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &u in &preds[v] {
                fails[u] = true;
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        fails.into_iter().map(|f| !f).collect()
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kripke::Valuation;
    use crate::logic::{parse_formula, Signature};

    fn two_world(sig: Arc<Signature>, agents: &[usize]) -> PointedState {
        let mut edges = Vec::new();
        for &a in agents {
            for u in 0..2 {
                for v in 0..2 {
                    edges.push((a, u, v));
                }
            }
        }
        let m = KripkeStructure::from_edges(sig, vec![Valuation(1), Valuation(0)], edges).unwrap();
        PointedState::new(m, 0).unwrap()
    }

    fn holds(state: &PointedState, text: &str) -> bool {
        let f = parse_formula(text, state.signature()).unwrap();
        entails(state, &f).unwrap()
    }

    #[test]
    fn vacuous_belief_without_successors() {
        let sig = Arc::new(Signature::from_names(&["a"], &["f"]));
        let m = KripkeStructure::from_edges(sig, vec![Valuation(1)], []).unwrap();
        let s = PointedState::new(m, 0).unwrap();
        assert!(holds(&s, "B(a, false)"));
        assert!(holds(&s, "C({a}, false)"));
    }

    #[test]
    fn belief_fails_with_a_counter_successor() {
        let sig = Arc::new(Signature::from_names(&["a", "b"], &["f"]));
        let s = two_world(sig, &[0, 1]);
        assert!(!holds(&s, "B(a, f)"));
        assert!(holds(&s, "f"));
        assert!(holds(&s, "C({a,b}, f | !f)"));
        assert!(!holds(&s, "C({a,b}, f)"));
        assert!(holds(&s, "B(a, !B(b, f))"));
    }

    #[test]
    fn common_belief_follows_chains_through_other_agents() {
        // w0 -a-> w1 -b-> w2, f false only at w2.
        let sig = Arc::new(Signature::from_names(&["a", "b"], &["f"]));
        let m = KripkeStructure::from_edges(
            sig,
            vec![Valuation(1), Valuation(1), Valuation(0)],
            [(0, 0, 1), (1, 1, 2)],
        )
        .unwrap();
        let s = PointedState::new(m, 0).unwrap();
        assert!(holds(&s, "E({a,b}, f)"));
        assert!(!holds(&s, "C({a,b}, f)"));
        assert!(holds(&s, "C({a}, f)"));
        assert!(!holds(&s, "E({a,b}, E({a,b}, f))"));
    }

    #[test]
    fn undeclared_symbols_are_errors() {
        let sig = Arc::new(Signature::from_names(&["a"], &["f"]));
        let s = two_world(sig, &[0]);
        let f = BeliefFormula::atom("zz");
        assert!(entails(&s, &f).is_err());
    }
}

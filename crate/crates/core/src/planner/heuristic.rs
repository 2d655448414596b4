use crate::kripke::{entails, PointedState};
use crate::logic::{conjuncts, to_nnf, BeliefFormula};

/// Scores states for best-first search. Lower is better; a goal state must
/// score 0.
pub trait Heuristic {
    fn estimate(&self, state: &PointedState, goal: &BeliefFormula) -> u64;
}

impl<F: Fn(&PointedState, &BeliefFormula) -> u64> Heuristic for F {
    fn estimate(&self, state: &PointedState, goal: &BeliefFormula) -> u64 {
        self(state, goal)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroHeuristic;

impl Heuristic for ZeroHeuristic {
    fn estimate(&self, _: &PointedState, _: &BeliefFormula) -> u64 {
        0
    }
}

/// Number of top-level goal conjuncts (after NNF) not yet satisfied.
#[derive(Debug, Clone, Copy, Default)]
pub struct GoalCount;

impl Heuristic for GoalCount {
    fn estimate(&self, state: &PointedState, goal: &BeliefFormula) -> u64 {
        goal_count_heuristic(state, goal) as u64
    }
}

pub fn goal_count_heuristic(state: &PointedState, goal: &BeliefFormula) -> usize {
    conjuncts(&to_nnf(goal))
        .iter()
        .filter(|c| !entails(state, c).unwrap_or(false))
        .count()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kripke::{KripkeStructure, Valuation};
    use crate::logic::{parse_formula, Signature};

    fn state() -> PointedState {
        // f true, a unsure about f
        let sig = Arc::new(Signature::from_names(&["a"], &["f", "g"]));
        let m = KripkeStructure::from_edges(
            sig,
            vec![Valuation(0b01), Valuation(0b00)],
            [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)],
        )
        .unwrap();
        PointedState::new(m, 0).unwrap()
    }

    fn h(text: &str) -> usize {
        let s = state();
        goal_count_heuristic(&s, &parse_formula(text, s.signature()).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(h("f"), 0);
        assert_eq!(h("f & B(a, f)"), 1);
        assert_eq!(h("g | B(a, f)"), 1);
        assert_eq!(h("!(f -> g) & g & B(a, g)"), 2);
    }
}

//! Strongly connected components of the transition graph, with the
//! condensation order and the trivial/nontrivial split.

use crate::automaton::{PartialDfa, StateId};

/// SCC partition of an automaton's states. Components are listed in
/// topological order of the condensation (sources first); inside a component
/// states keep declaration order. A component is nontrivial iff it carries at
/// least one edge, i.e. it has more than one state or its single state has a
/// self-transition.
#[derive(Clone, Debug)]
pub struct SccDecomposition {
    components: Vec<Vec<StateId>>,
    component_of: Vec<usize>,
    nontrivial: Vec<bool>,
}

impl SccDecomposition {
    pub fn components(&self) -> &[Vec<StateId>] {
        &self.components
    }

    pub fn component_of(&self, s: StateId) -> usize {
        self.component_of[s.0]
    }

    pub fn is_nontrivial(&self, component: usize) -> bool {
        self.nontrivial[component]
    }

    /// True iff `s` lies in a nontrivial component, i.e. some nonempty word
    /// returns it to itself.
    pub fn in_nontrivial(&self, s: StateId) -> bool {
        self.nontrivial[self.component_of[s.0]]
    }

    /// States of nontrivial components, in declaration order.
    pub fn nontrivial_states(&self) -> Vec<StateId> {
        let mut out: Vec<StateId> = self
            .components
            .iter()
            .enumerate()
            .filter(|(i, _)| self.nontrivial[*i])
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Tarjan's algorithm, iteratively.
pub fn sccs(d: &PartialDfa) -> SccDecomposition {
    let n = d.state_count();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            d.letters()
                .filter_map(|a| d.step(StateId(s), a))
                .map(|t| t.0)
                .collect()
        })
        .collect();

    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut lowlink = vec![UNSET; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<StateId>> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(frame) = frames.last_mut() {
            let (v, ei) = *frame;
            if ei == 0 {
                index[v] = next_index;
                lowlink[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if ei < adj[v].len() {
                frame.1 += 1;
                let w = adj[v][ei];
                if index[w] == UNSET {
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                if lowlink[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp.into_iter().map(StateId).collect());
                }
                frames.pop();
                if let Some(&(pv, _)) = frames.last() {
                    lowlink[pv] = lowlink[pv].min(lowlink[v]);
                }
            }
        }
    }

    // Tarjan emits successors first; flip to get sources first.
    components.reverse();

    let mut component_of = vec![0usize; n];
    for (i, comp) in components.iter().enumerate() {
        for &s in comp {
            component_of[s.0] = i;
        }
    }
    let nontrivial = components
        .iter()
        .map(|comp| {
            comp.len() > 1
                || d.letters()
                    .any(|a| d.step(comp[0], a) == Some(comp[0]))
        })
        .collect();

    SccDecomposition {
        components,
        component_of,
        nontrivial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{m_ab, m_run};
    use crate::PartialDfa;

    fn names(d: &PartialDfa, comp: &[StateId]) -> Vec<String> {
        comp.iter().map(|&s| d.state_name(s).to_string()).collect()
    }

    #[test]
    fn running_fixture_has_one_nontrivial_component() {
        let m = m_run();
        let dec = sccs(&m);
        assert_eq!(dec.components().len(), 6);
        let nontrivial: Vec<_> = (0..6).filter(|&i| dec.is_nontrivial(i)).collect();
        assert_eq!(nontrivial.len(), 1);
        let q5 = m.state_index("q5").unwrap();
        assert!(dec.in_nontrivial(q5));
        for s in m.states().filter(|&s| s != q5) {
            assert!(!dec.in_nontrivial(s));
        }
    }

    #[test]
    fn ab_fixture_components_are_both_nontrivial() {
        let m = m_ab();
        let dec = sccs(&m);
        assert_eq!(dec.components().len(), 2);
        assert!(dec.is_nontrivial(0) && dec.is_nontrivial(1));
        // a-cycle {s0, p} must come before the a-loop {q} in condensation order
        assert_eq!(names(&m, &dec.components()[0]), ["s0", "p"]);
        assert_eq!(names(&m, &dec.components()[1]), ["q"]);
    }

    #[test]
    fn single_state_without_loop_is_trivial() {
        let m = PartialDfa::builder()
            .letters(["a"])
            .states(["s"])
            .initial("s")
            .finals(["s"])
            .build()
            .unwrap();
        let dec = sccs(&m);
        assert_eq!(dec.components().len(), 1);
        assert!(!dec.is_nontrivial(0));
    }

    #[test]
    fn condensation_order_is_topological() {
        let m = m_run();
        let dec = sccs(&m);
        for (s, _, t) in m.transitions() {
            assert!(dec.component_of(s) <= dec.component_of(t));
        }
    }
}

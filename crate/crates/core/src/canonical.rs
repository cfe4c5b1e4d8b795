//! Canonical forms and isomorphism checks for trim automata.
//!
//! A trim deterministic automaton with a single initial state has a unique
//! breadth-first numbering of its states, so renaming states to their BFS
//! index (exploring letters in lexicographic order) is a canonical form: two
//! trim automata are isomorphic exactly when their canonical serializations
//! are byte-identical.

use crate::automaton::{PartialDfa, StateId};
use crate::format::serialize_dfa;
use std::collections::VecDeque;

/// A trim automaton renamed to its canonical BFS numbering, together with the
/// canonical serialization text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalDfa {
    dfa: PartialDfa,
    text: String,
}

impl CanonicalDfa {
    pub fn dfa(&self) -> &PartialDfa {
        &self.dfa
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn into_dfa(self) -> PartialDfa {
        self.dfa
    }

    pub fn state_count(&self) -> usize {
        self.dfa.state_count()
    }
}

/// Canonicalizes an automaton: trims it, sorts the alphabet lexicographically,
/// renames states `0..n-1` in BFS order from the initial state.
pub fn canonical_form(d: &PartialDfa) -> CanonicalDfa {
    let t = d.trim();
    let mut letters: Vec<_> = t.letters().collect();
    letters.sort_by(|&x, &y| t.letter_name(x).cmp(t.letter_name(y)));

    let mut order: Vec<StateId> = Vec::with_capacity(t.state_count());
    let mut position = vec![None; t.state_count()];
    if let Some(init) = t.initial() {
        position[init.0] = Some(0usize);
        order.push(init);
        let mut queue = VecDeque::from([init]);
        while let Some(q) = queue.pop_front() {
            for &a in &letters {
                if let Some(next) = t.step(q, a) {
                    if position[next.0].is_none() {
                        position[next.0] = Some(order.len());
                        order.push(next);
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    debug_assert_eq!(order.len(), t.state_count(), "trim automaton is reachable");

    let states: Vec<String> = (0..order.len()).map(|i| i.to_string()).collect();
    let finals: Vec<bool> = order.iter().map(|&s| t.is_final(s)).collect();
    let alphabet: Vec<String> = letters.iter().map(|&a| t.letter_name(a).to_string()).collect();
    let delta = order
        .iter()
        .map(|&s| {
            letters
                .iter()
                .map(|&a| t.step(s, a).map(|q| StateId(position[q.0].unwrap())))
                .collect()
        })
        .collect();
    let initial = t.initial().map(|_| StateId(0));
    let dfa = PartialDfa::from_parts(states, alphabet, initial, finals, delta);
    let text = serialize_dfa(&dfa);
    CanonicalDfa { dfa, text }
}

/// True iff the trim parts of the two automata are isomorphic (same alphabet
/// as a set, same shape modulo renaming states).
pub fn isomorphic(a: &PartialDfa, b: &PartialDfa) -> bool {
    canonical_form(a).text == canonical_form(b).text
}

//! Partial deterministic finite automata with a single initial state and an
//! arbitrary set of final states. The transition function may be undefined on
//! some (state, letter) pairs; running into an undefined transition rejects.

use thiserror::Error;

/// Index of a state in its automaton's declaration order.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(pub usize);

/// Index of a letter in its automaton's declaration order.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LetterId(pub usize);

/// A word over an automaton's alphabet, as letter indices. The empty vector
/// is the empty word.
pub type Word = Vec<LetterId>;

/// Errors raised while constructing an automaton.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DfaError {
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("invalid token `{0}` (tokens are non-empty, without whitespace or '#')")]
    BadToken(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("missing initial state")]
    MissingInitial,
    #[error("duplicate transition from `{0}` on `{1}`")]
    NondeterministicTransition(String, String),
    #[error("alphabet must declare at least one letter")]
    EmptyAlphabet,
}

/// A partial DFA. States and letters are referred to by their declaration
/// index; names are kept for I/O. Values are immutable after construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartialDfa {
    states: Vec<String>,
    alphabet: Vec<String>,
    initial: Option<StateId>,
    finals: Vec<bool>,
    delta: Vec<Vec<Option<StateId>>>,
}

fn valid_token(tok: &str) -> bool {
    !tok.is_empty() && !tok.contains(char::is_whitespace) && !tok.contains('#')
}

impl PartialDfa {
    pub fn builder() -> DfaBuilder {
        DfaBuilder::default()
    }

    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.len()
    }

    /// True iff the automaton has no states (it recognizes the empty language).
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn letters(&self) -> impl Iterator<Item = LetterId> {
        (0..self.alphabet.len()).map(LetterId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn letter_name(&self, a: LetterId) -> &str {
        &self.alphabet[a.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn letter_index(&self, name: &str) -> Option<LetterId> {
        self.alphabet.iter().position(|l| l == name).map(LetterId)
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s.0]
    }

    pub fn final_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|s| self.is_final(*s))
    }

    /// The target of the transition from `s` on `a`, if defined.
    pub fn step(&self, s: StateId, a: LetterId) -> Option<StateId> {
        self.delta[s.0][a.0]
    }

    /// Runs a word from `s`; `None` as soon as a transition is undefined.
    pub fn run(&self, s: StateId, word: &[LetterId]) -> Option<StateId> {
        word.iter().try_fold(s, |q, &a| self.step(q, a))
    }

    /// True iff the word (given as letter names) is accepted from the initial state.
    pub fn accepts(&self, word: &[&str]) -> bool {
        let Some(mut q) = self.initial else {
            return false;
        };
        for tok in word {
            let Some(a) = self.letter_index(tok) else {
                return false;
            };
            match self.step(q, a) {
                Some(t) => q = t,
                None => return false,
            }
        }
        self.is_final(q)
    }

    /// All defined transitions in (source, letter) declaration order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, LetterId, StateId)> + '_ {
        self.states().flat_map(move |s| {
            self.letters()
                .filter_map(move |a| self.step(s, a).map(|t| (s, a, t)))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.transitions().count()
    }

    /// Renders a word as the concatenation of its letter names; `ε` when empty.
    pub fn render_word(&self, word: &[LetterId]) -> String {
        if word.is_empty() {
            "ε".to_string()
        } else {
            word.iter().map(|&a| self.letter_name(a)).collect()
        }
    }

    /// Reverse adjacency: for each state, its incoming transitions `(source, letter)`
    /// in (source, letter) declaration order.
    pub(crate) fn predecessors(&self) -> Vec<Vec<(StateId, LetterId)>> {
        let mut preds = vec![Vec::new(); self.state_count()];
        for (s, a, t) in self.transitions() {
            preds[t.0].push((s, a));
        }
        preds
    }

    /// True iff no two distinct states reach a common target on the same letter.
    pub fn is_reversible(&self) -> bool {
        for a in self.letters() {
            let mut seen = vec![false; self.state_count()];
            for s in self.states() {
                if let Some(t) = self.step(s, a) {
                    if seen[t.0] {
                        return false;
                    }
                    seen[t.0] = true;
                }
            }
        }
        true
    }

    /// States reachable from the initial state.
    pub(crate) fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let Some(init) = self.initial else {
            return seen;
        };
        let mut queue = std::collections::VecDeque::from([init]);
        seen[init.0] = true;
        while let Some(q) = queue.pop_front() {
            for a in self.letters() {
                if let Some(t) = self.step(q, a) {
                    if !seen[t.0] {
                        seen[t.0] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub(crate) fn productive(&self) -> Vec<bool> {
        let preds = self.predecessors();
        let mut good = self.finals.clone();
        let mut queue: std::collections::VecDeque<StateId> =
            self.final_states().collect();
        while let Some(q) = queue.pop_front() {
            for &(p, _) in &preds[q.0] {
                if !good[p.0] {
                    good[p.0] = true;
                    queue.push_back(p);
                }
            }
        }
        good
    }

    pub fn is_trim(&self) -> bool {
        let reach = self.reachable();
        let prod = self.productive();
        self.states().all(|s| reach[s.0] && prod[s.0])
    }

    /// Removes every state that is unreachable or unproductive. The result may
    /// have zero states, which is the (unique) automaton of the empty language.
    pub fn trim(&self) -> PartialDfa {
        self.trim_with_map().0
    }

    /// Like [`trim`](Self::trim), also returning the old-to-new state mapping
    /// (`None` for dropped states).
    pub fn trim_with_map(&self) -> (PartialDfa, Vec<Option<StateId>>) {
        let reach = self.reachable();
        let prod = self.productive();
        let mut map = vec![None; self.state_count()];
        let mut states = Vec::new();
        let mut finals = Vec::new();
        for s in self.states() {
            if reach[s.0] && prod[s.0] {
                map[s.0] = Some(StateId(states.len()));
                states.push(self.states[s.0].clone());
                finals.push(self.finals[s.0]);
            }
        }
        let delta = self
            .states()
            .filter(|s| map[s.0].is_some())
            .map(|s| {
                self.letters()
                    .map(|a| self.step(s, a).and_then(|t| map[t.0]))
                    .collect()
            })
            .collect();
        let initial = self.initial.and_then(|q| map[q.0]);
        let trimmed = PartialDfa {
            states,
            alphabet: self.alphabet.clone(),
            initial,
            finals,
            delta,
        };
        (trimmed, map)
    }

    /// A mutable copy of the transition table, for constructions that rewire
    /// transitions and rebuild via [`PartialDfa::from_parts`].
    pub(crate) fn delta_table(&self) -> Vec<Vec<Option<StateId>>> {
        self.delta.clone()
    }

    /// Internal constructor for already-validated parts. Callers guarantee
    /// index consistency; names are still checked for token validity.
    pub(crate) fn from_parts(
        states: Vec<String>,
        alphabet: Vec<String>,
        initial: Option<StateId>,
        finals: Vec<bool>,
        delta: Vec<Vec<Option<StateId>>>,
    ) -> PartialDfa {
        debug_assert_eq!(states.len(), finals.len());
        debug_assert_eq!(states.len(), delta.len());
        debug_assert!(states.iter().all(|s| valid_token(s)));
        debug_assert!(initial.is_some() || states.is_empty());
        PartialDfa {
            states,
            alphabet,
            initial,
            finals,
            delta,
        }
    }
}

/// Step-by-step construction of a [`PartialDfa`]; `build` validates all
/// invariants (token shape, determinism, reference integrity).
#[derive(Default, Clone)]
pub struct DfaBuilder {
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: Option<String>,
    finals: Vec<String>,
    transitions: Vec<(String, String, String)>,
}

impl DfaBuilder {
    pub fn letters<I, S>(mut self, letters: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.alphabet.extend(letters.into_iter().map(Into::into));
        self
    }

    pub fn states<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(states.into_iter().map(Into::into));
        self
    }

    pub fn initial(mut self, state: impl Into<String>) -> Self {
        self.initial = Some(state.into());
        self
    }

    pub fn finals<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.finals.extend(states.into_iter().map(Into::into));
        self
    }

    pub fn transition(
        mut self,
        src: impl Into<String>,
        letter: impl Into<String>,
        dst: impl Into<String>,
    ) -> Self {
        self.transitions
            .push((src.into(), letter.into(), dst.into()));
        self
    }

    pub fn build(self) -> Result<PartialDfa, DfaError> {
        if self.alphabet.is_empty() {
            return Err(DfaError::EmptyAlphabet);
        }
        for tok in self.alphabet.iter().chain(self.states.iter()) {
            if !valid_token(tok) {
                return Err(DfaError::BadToken(tok.clone()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for l in &self.alphabet {
            if !seen.insert(l.as_str()) {
                return Err(DfaError::DuplicateLetter(l.clone()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for s in &self.states {
            if !seen.insert(s.as_str()) {
                return Err(DfaError::DuplicateState(s.clone()));
            }
        }
        let state_idx = |name: &str| -> Result<StateId, DfaError> {
            self.states
                .iter()
                .position(|s| s == name)
                .map(StateId)
                .ok_or_else(|| DfaError::UnknownState(name.to_string()))
        };
        let letter_idx = |name: &str| -> Result<LetterId, DfaError> {
            self.alphabet
                .iter()
                .position(|l| l == name)
                .map(LetterId)
                .ok_or_else(|| DfaError::UnknownLetter(name.to_string()))
        };
        let initial = match &self.initial {
            Some(name) => Some(state_idx(name)?),
            None if self.states.is_empty() => None,
            None => return Err(DfaError::MissingInitial),
        };
        let mut finals = vec![false; self.states.len()];
        for name in &self.finals {
            finals[state_idx(name)?.0] = true;
        }
        let mut delta = vec![vec![None; self.alphabet.len()]; self.states.len()];
        for (src, letter, dst) in &self.transitions {
            let s = state_idx(src)?;
            let a = letter_idx(letter)?;
            let t = state_idx(dst)?;
            if delta[s.0][a.0].is_some() {
                return Err(DfaError::NondeterministicTransition(
                    src.clone(),
                    letter.clone(),
                ));
            }
            delta[s.0][a.0] = Some(t);
        }
        Ok(PartialDfa {
            states: self.states,
            alphabet: self.alphabet,
            initial,
            finals,
            delta,
        })
    }
}

/// Picks a name not present in `taken`, starting from `base` and appending
/// primes until it is unique.
pub(crate) fn fresh_name(base: &str, taken: &std::collections::HashSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{m_fin, m_run, m_star, n_run};

    #[test]
    fn builder_rejects_duplicate_transition() {
        let err = PartialDfa::builder()
            .letters(["a"])
            .states(["q0", "q1", "q2"])
            .initial("q0")
            .finals(["q1"])
            .transition("q0", "a", "q1")
            .transition("q0", "a", "q2")
            .build()
            .unwrap_err();
        assert_eq!(
            err,
            DfaError::NondeterministicTransition("q0".into(), "a".into())
        );
    }

    #[test]
    fn builder_rejects_missing_initial() {
        let err = PartialDfa::builder()
            .letters(["a"])
            .states(["q0"])
            .build()
            .unwrap_err();
        assert_eq!(err, DfaError::MissingInitial);
    }

    #[test]
    fn run_follows_partial_transitions() {
        let m = m_run();
        let q0 = m.state_index("q0").unwrap();
        let a = m.letter_index("a").unwrap();
        let b = m.letter_index("b").unwrap();
        assert_eq!(m.run(q0, &[b, a]), m.state_index("q5"));
        assert_eq!(m.run(q0, &[a, a, a]), None);
        assert!(m.accepts(&["b", "a", "b", "b"]));
        assert!(!m.accepts(&["a"]));
    }

    #[test]
    fn trim_removes_unreachable_state() {
        let m = PartialDfa::builder()
            .letters(["a", "b", "c", "d"])
            .states(["q0", "q1", "q2", "q3", "q4", "q5", "x"])
            .initial("q0")
            .finals(["q3", "q4", "q5"])
            .transition("q0", "a", "q1")
            .transition("q0", "b", "q2")
            .transition("q0", "d", "q2")
            .transition("q0", "c", "q3")
            .transition("q1", "a", "q4")
            .transition("q2", "b", "q4")
            .transition("q3", "a", "q4")
            .transition("q2", "a", "q5")
            .transition("q5", "b", "q5")
            .transition("x", "a", "q5")
            .build()
            .unwrap();
        assert_eq!(m.trim(), m_run());
    }

    #[test]
    fn trim_removes_trap_of_total_automaton() {
        // total over {a}: one accepting loop state plus a rejecting trap
        let m = PartialDfa::builder()
            .letters(["a", "b"])
            .states(["s", "trap"])
            .initial("s")
            .finals(["s"])
            .transition("s", "a", "s")
            .transition("s", "b", "trap")
            .transition("trap", "a", "trap")
            .transition("trap", "b", "trap")
            .build()
            .unwrap();
        let t = m.trim();
        assert_eq!(t.state_count(), 1);
        assert_eq!(t.step(StateId(0), LetterId(1)), None);
    }

    #[test]
    fn trim_of_empty_finals_is_empty() {
        let m = PartialDfa::builder()
            .letters(["a"])
            .states(["q0", "q1"])
            .initial("q0")
            .transition("q0", "a", "q1")
            .build()
            .unwrap();
        let t = m.trim();
        assert!(t.is_empty());
        assert_eq!(t.initial(), None);
    }

    #[test]
    fn trim_is_idempotent_on_fixture() {
        let t = m_run().trim();
        assert_eq!(t.trim(), t);
    }

    #[test]
    fn reversibility_of_fixtures() {
        assert!(!m_run().is_reversible()); // q1 and q3 share the a-target q4
        assert!(n_run().is_reversible());
        assert!(m_fin().is_reversible()); // merges require the same letter
        assert!(m_star().is_reversible());
    }
}

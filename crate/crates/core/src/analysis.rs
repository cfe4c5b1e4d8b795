//! State classification of the minimal automaton and the finiteness decision
//! for the set of reduced reversible recognizers.
//!
//! States of a minimal automaton `m` are classified along two axes:
//!
//! - by how many words reach them from the initial state: exactly one
//!   ([`Multiplicity::One`]), finitely many but at least two
//!   ([`Multiplicity::FinitePlus`]), or infinitely many
//!   ([`Multiplicity::Infinite`], equivalently: reachable from a nontrivial
//!   SCC);
//! - whether two distinct states reach them by a common word (irreversible)
//!   or not (reversible).
//!
//! The zig-zag states are the least set containing every infinite-multiplicity
//! state, closed forward under transitions and backward through
//! finite-plus states. The language has finitely many reduced reversible
//! recognizers exactly when no zig-zag state is irreversible; otherwise
//! [`find_witness`] extracts the chain that drives the blow-up construction.

use crate::automaton::{LetterId, PartialDfa, StateId, Word};
use crate::minimize::{is_minimal, minimize};
use crate::scc::sccs;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("automaton is not minimal")]
    NotMinimal,
    #[error("no zig-zag state is irreversible")]
    NoIrreversibleZigzag,
}

/// How many words reach a state of the minimal automaton.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Multiplicity {
    One,
    FinitePlus,
    Infinite,
}

/// Direction of one step in a zig-zag chain.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Backward,
}

/// Per-state verdicts for a minimal automaton.
#[derive(Clone, Debug)]
pub struct StateAnalysis {
    multiplicity: Vec<Multiplicity>,
    incoming: Vec<Option<u64>>,
    irreversible: Vec<bool>,
    zigzag: Vec<bool>,
}

impl StateAnalysis {
    pub fn multiplicity(&self, s: StateId) -> Multiplicity {
        self.multiplicity[s.0]
    }

    /// Number of distinct words reaching `s`; `None` for infinite.
    pub fn incoming_count(&self, s: StateId) -> Option<u64> {
        self.incoming[s.0]
    }

    pub fn is_irreversible(&self, s: StateId) -> bool {
        self.irreversible[s.0]
    }

    pub fn is_zigzag(&self, s: StateId) -> bool {
        self.zigzag[s.0]
    }

    pub fn state_count(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn states_with(&self, m: Multiplicity) -> Vec<StateId> {
        (0..self.multiplicity.len())
            .filter(|&i| self.multiplicity[i] == m)
            .map(StateId)
            .collect()
    }

    pub fn irreversible_states(&self) -> Vec<StateId> {
        (0..self.irreversible.len())
            .filter(|&i| self.irreversible[i])
            .map(StateId)
            .collect()
    }

    pub fn zigzag_states(&self) -> Vec<StateId> {
        (0..self.zigzag.len())
            .filter(|&i| self.zigzag[i])
            .map(StateId)
            .collect()
    }

    pub fn has_irreversible_zigzag(&self) -> bool {
        (0..self.zigzag.len()).any(|i| self.zigzag[i] && self.irreversible[i])
    }

    /// The state bound: the sum over all states of the number of reaching
    /// words, counting every infinite-multiplicity state as one.
    pub fn bound(&self) -> u64 {
        self.incoming
            .iter()
            .map(|c| c.unwrap_or(1))
            .fold(0u64, u64::saturating_add)
    }
}

/// An instance of the pattern that rules out reversibility of the language:
/// two distinct states `p`, `q` with `p·a = q·a = r` and `r·word = p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenPattern {
    pub p: StateId,
    pub q: StateId,
    pub letter: LetterId,
    pub word: Word,
}

/// The witness chain produced in the infinite case: a loop feeding an
/// infinite-multiplicity state `r0`, a zig-zag chain from `r0` to an
/// irreversible state `rℓ`, and a merge pair witnessing irreversibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigZagWitness {
    /// State on a nontrivial SCC from which the chain start is reachable.
    pub loop_state: StateId,
    /// Nonempty word returning `loop_state` to itself.
    pub loop_word: Word,
    /// Word from `loop_state` to the chain start (may be empty).
    pub access_path: Word,
    /// Chain steps; a forward step follows a transition, a backward step moves
    /// against one into a finite-plus state.
    pub chain: Vec<(LetterId, Direction)>,
    /// The chain states `r0..rℓ`; one more entry than `chain`.
    pub chain_states: Vec<StateId>,
    /// Two distinct states reaching `rℓ` by `merge_word`.
    pub merge_pair: (StateId, StateId),
    /// Nonempty word with `merge_pair.0 · w = merge_pair.1 · w = rℓ`; its
    /// first letter already merges the pair.
    pub merge_word: Word,
}

impl ZigZagWitness {
    /// Validates every structural invariant against `m`; returns the list of
    /// violations (empty when the witness is sound).
    pub fn check(&self, m: &PartialDfa, analysis: &StateAnalysis) -> Vec<String> {
        let mut bad = Vec::new();
        let name = |s: StateId| m.state_name(s).to_string();
        if self.loop_word.is_empty() {
            bad.push("loop word is empty".to_string());
        } else if m.run(self.loop_state, &self.loop_word) != Some(self.loop_state) {
            bad.push(format!("loop word does not return {} to itself", name(self.loop_state)));
        }
        if self.chain_states.len() != self.chain.len() + 1 {
            bad.push("chain state list does not match step list".to_string());
            return bad;
        }
        let r0 = self.chain_states[0];
        if m.run(self.loop_state, &self.access_path) != Some(r0) {
            bad.push("access path does not reach the chain start".to_string());
        }
        if analysis.multiplicity(r0) != Multiplicity::Infinite {
            bad.push(format!("chain start {} is not an infinite-multiplicity state", name(r0)));
        }
        for (i, &(a, dir)) in self.chain.iter().enumerate() {
            let prev = self.chain_states[i];
            let next = self.chain_states[i + 1];
            match dir {
                Direction::Forward => {
                    if m.step(prev, a) != Some(next) {
                        bad.push(format!("forward step {i} does not follow a transition"));
                    }
                }
                Direction::Backward => {
                    if m.step(next, a) != Some(prev) {
                        bad.push(format!("backward step {i} does not match a transition"));
                    }
                    if analysis.multiplicity(next) != Multiplicity::FinitePlus {
                        bad.push(format!(
                            "backward step {i} enters {} which is not a finite-plus state",
                            name(next)
                        ));
                    }
                }
            }
        }
        for i in 0..self.chain_states.len() {
            for j in (i + 1)..self.chain_states.len() {
                if self.chain_states[i] == self.chain_states[j] {
                    bad.push("chain states are not pairwise distinct".to_string());
                }
            }
        }
        let last = *self.chain_states.last().expect("nonempty chain state list");
        if !analysis.is_irreversible(last) {
            bad.push(format!("chain end {} is not irreversible", name(last)));
        }
        for &s in &self.chain_states[1..self.chain_states.len().saturating_sub(1)] {
            if analysis.is_irreversible(s) {
                bad.push(format!("interior chain state {} is irreversible", name(s)));
            }
        }
        let (s1, s2) = self.merge_pair;
        if s1 == s2 {
            bad.push("merge pair states coincide".to_string());
        }
        if self.merge_word.is_empty() {
            bad.push("merge word is empty".to_string());
        } else {
            let t1 = m.run(s1, &self.merge_word);
            let t2 = m.run(s2, &self.merge_word);
            if t1 != Some(last) || t2 != Some(last) {
                bad.push("merge word does not take both pair states to the chain end".to_string());
            }
        }
        bad
    }
}

/// Outcome of the finiteness decision.
#[derive(Clone, Debug)]
pub enum FinitenessVerdict {
    /// The language is empty; its only recognizer is the 0-state automaton.
    EmptyLanguage,
    /// The language has no reversible recognizer at all.
    NotReversibleLanguage { pattern: ForbiddenPattern },
    /// Finitely many reduced reversible recognizers; none exceeds `bound` states.
    Finite { bound: u64 },
    /// Arbitrarily large reduced reversible recognizers exist.
    Infinite { witness: ZigZagWitness },
}

fn forward_closure(d: &PartialDfa, seeds: impl IntoIterator<Item = StateId>) -> Vec<bool> {
    let mut hit = vec![false; d.state_count()];
    let mut queue: VecDeque<StateId> = VecDeque::new();
    for s in seeds {
        if !hit[s.0] {
            hit[s.0] = true;
            queue.push_back(s);
        }
    }
    while let Some(q) = queue.pop_front() {
        for a in d.letters() {
            if let Some(t) = d.step(q, a) {
                if !hit[t.0] {
                    hit[t.0] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    hit
}

/// Targets of same-letter merges: `(letter, target, its ≥2 predecessors)` in
/// (letter, target) declaration order.
fn merge_events(d: &PartialDfa) -> Vec<(LetterId, StateId, Vec<StateId>)> {
    let mut events = Vec::new();
    for a in d.letters() {
        let mut preds = vec![Vec::new(); d.state_count()];
        for s in d.states() {
            if let Some(t) = d.step(s, a) {
                preds[t.0].push(s);
            }
        }
        for t in d.states() {
            if preds[t.0].len() >= 2 {
                events.push((a, t, std::mem::take(&mut preds[t.0])));
            }
        }
    }
    events
}

/// Classifies the states of a minimal automaton.
pub fn classify(m: &PartialDfa) -> Result<StateAnalysis, AnalysisError> {
    if !is_minimal(m) {
        return Err(AnalysisError::NotMinimal);
    }
    let n = m.state_count();
    let dec = sccs(m);
    let infinite = forward_closure(m, dec.nontrivial_states());

    // Outside the forward closure of the nontrivial SCCs the automaton is a
    // DAG, so word counts are path counts in condensation order.
    let preds = m.predecessors();
    let mut count = vec![None::<u64>; n];
    for comp in dec.components() {
        for &s in comp {
            if infinite[s.0] {
                continue;
            }
            let mut c: u64 = u64::from(m.initial() == Some(s));
            for &(p, _) in &preds[s.0] {
                debug_assert!(!infinite[p.0], "predecessor of a finite state is finite");
                c = c.saturating_add(count[p.0].expect("condensation order"));
            }
            count[s.0] = Some(c);
        }
    }
    let multiplicity: Vec<Multiplicity> = (0..n)
        .map(|i| match count[i] {
            None => Multiplicity::Infinite,
            Some(1) => Multiplicity::One,
            Some(_) => Multiplicity::FinitePlus,
        })
        .collect();

    let merge_targets: Vec<StateId> = merge_events(m).into_iter().map(|(_, t, _)| t).collect();
    let irreversible = forward_closure(m, merge_targets);

    // Least fixpoint of the three zig-zag closure rules.
    let mut zigzag = vec![false; n];
    let mut queue: VecDeque<StateId> = VecDeque::new();
    for i in 0..n {
        if infinite[i] {
            zigzag[i] = true;
            queue.push_back(StateId(i));
        }
    }
    while let Some(q) = queue.pop_front() {
        for a in m.letters() {
            if let Some(t) = m.step(q, a) {
                if !zigzag[t.0] {
                    zigzag[t.0] = true;
                    queue.push_back(t);
                }
            }
        }
        for &(p, _) in &preds[q.0] {
            if !zigzag[p.0] && multiplicity[p.0] == Multiplicity::FinitePlus {
                zigzag[p.0] = true;
                queue.push_back(p);
            }
        }
    }

    Ok(StateAnalysis {
        multiplicity,
        incoming: count,
        irreversible,
        zigzag,
    })
}

/// Shortest word from `from` satisfying `stop` (possibly the empty word),
/// exploring letters in declaration order.
fn shortest_word_to(
    d: &PartialDfa,
    from: StateId,
    stop: impl Fn(StateId) -> bool,
) -> Option<(StateId, Word)> {
    if stop(from) {
        return Some((from, Vec::new()));
    }
    let mut parent: Vec<Option<(StateId, LetterId)>> = vec![None; d.state_count()];
    let mut seen = vec![false; d.state_count()];
    seen[from.0] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        for a in d.letters() {
            let Some(t) = d.step(q, a) else { continue };
            if seen[t.0] {
                continue;
            }
            seen[t.0] = true;
            parent[t.0] = Some((q, a));
            if stop(t) {
                let mut word = Vec::new();
                let mut cur = t;
                while let Some((p, l)) = parent[cur.0] {
                    word.push(l);
                    cur = p;
                }
                word.reverse();
                return Some((t, word));
            }
            queue.push_back(t);
        }
    }
    None
}

/// Shortest nonempty word returning `q` to itself; ties broken toward the
/// lexicographically least word (by letter declaration order).
pub(crate) fn shortest_loop_word(d: &PartialDfa, q: StateId) -> Option<Word> {
    // dist/parents of the forward BFS from q
    let mut parent: Vec<Option<(StateId, LetterId)>> = vec![None; d.state_count()];
    let mut dist: Vec<Option<usize>> = vec![None; d.state_count()];
    dist[q.0] = Some(0);
    let mut queue = VecDeque::from([q]);
    while let Some(x) = queue.pop_front() {
        for a in d.letters() {
            let Some(t) = d.step(x, a) else { continue };
            if dist[t.0].is_none() {
                dist[t.0] = Some(dist[x.0].unwrap() + 1);
                parent[t.0] = Some((x, a));
                queue.push_back(t);
            }
        }
    }
    let path_to = |s: StateId| -> Word {
        let mut word = Vec::new();
        let mut cur = s;
        while let Some((p, l)) = parent[cur.0] {
            word.push(l);
            cur = p;
        }
        word.reverse();
        word
    };
    let mut best: Option<Word> = None;
    for x in d.states() {
        let Some(dx) = dist[x.0] else { continue };
        for a in d.letters() {
            if d.step(x, a) != Some(q) {
                continue;
            }
            let mut word = path_to(x);
            word.push(a);
            debug_assert_eq!(word.len(), dx + 1);
            let better = match &best {
                None => true,
                Some(b) => (word.len(), &word) < (b.len(), b),
            };
            if better {
                best = Some(word);
            }
        }
    }
    best
}

/// Shortest merge word into `target`: a pair of distinct states and a word
/// taking both to `target`, whose first letter already merges them. Returns
/// `None` when `target` is not reachable from any same-letter merge.
fn shortest_merge_into(
    m: &PartialDfa,
    target: StateId,
) -> Option<((StateId, StateId), Word)> {
    // reverse BFS from target: first step of a shortest forward path to it
    let preds = m.predecessors();
    let mut dist: Vec<Option<usize>> = vec![None; m.state_count()];
    let mut next_step: Vec<Option<(LetterId, StateId)>> = vec![None; m.state_count()];
    dist[target.0] = Some(0);
    let mut queue = VecDeque::from([target]);
    while let Some(x) = queue.pop_front() {
        for &(p, b) in &preds[x.0] {
            if dist[p.0].is_none() {
                dist[p.0] = Some(dist[x.0].unwrap() + 1);
                next_step[p.0] = Some((b, x));
                queue.push_back(p);
            }
        }
    }
    let mut best: Option<(usize, (StateId, StateId), LetterId, StateId)> = None;
    for (a, r, preds) in merge_events(m) {
        let Some(d) = dist[r.0] else { continue };
        let total = d + 1;
        if best.as_ref().is_none_or(|(b, ..)| total < *b) {
            best = Some((total, (preds[0], preds[1]), a, r));
        }
    }
    let (_, pair, a, r) = best?;
    let mut word = vec![a];
    let mut cur = r;
    while cur != target {
        let (b, nxt) = next_step[cur.0].expect("reverse BFS reached cur");
        word.push(b);
        cur = nxt;
    }
    Some((pair, word))
}

/// Searches the minimal automaton for the pattern forbidding reversibility of
/// the language: distinct `p`, `q` and a letter with `p·a = q·a = r` such that
/// `r` reaches `p` again. Returns the first instance in (letter, target,
/// predecessor) declaration order, preferring earlier-declared reached states.
pub fn forbidden_pattern(m: &PartialDfa) -> Result<Option<ForbiddenPattern>, AnalysisError> {
    if !is_minimal(m) {
        return Err(AnalysisError::NotMinimal);
    }
    for (a, r, preds) in merge_events(m) {
        for &candidate in &preds {
            if let Some((_, word)) = shortest_word_to(m, r, |s| s == candidate) {
                let other = *preds.iter().find(|&&p| p != candidate).expect("≥2 preds");
                return Ok(Some(ForbiddenPattern {
                    p: candidate,
                    q: other,
                    letter: a,
                    word,
                }));
            }
        }
    }
    Ok(None)
}

/// True iff the language of the minimal automaton `m` has some reversible
/// recognizer.
pub fn is_reversible_language(m: &PartialDfa) -> Result<bool, AnalysisError> {
    Ok(forbidden_pattern(m)?.is_none())
}

/// Upper bound on the state count of any reduced reversible recognizer, when
/// every zig-zag state is reversible.
pub fn state_bound(m: &PartialDfa) -> Result<u64, AnalysisError> {
    Ok(classify(m)?.bound())
}

/// Extracts a shortest zig-zag chain from an infinite-multiplicity state to an
/// irreversible state, with its access loop and merge pair.
///
/// The chain is found by BFS over the derivation moves (forward along a
/// transition; backward against a transition into a finite-plus state),
/// seeded on all infinite-multiplicity states. Among the chain ends at minimal
/// distance the one with the shortest merge word is preferred, so the merge
/// path never passes through an infinite-multiplicity state and every class
/// it visits has duplicates after annotation.
pub fn find_witness(
    m: &PartialDfa,
    analysis: &StateAnalysis,
) -> Result<ZigZagWitness, AnalysisError> {
    debug_assert_eq!(analysis.state_count(), m.state_count());
    if !analysis.has_irreversible_zigzag() {
        return Err(AnalysisError::NoIrreversibleZigzag);
    }
    let n = m.state_count();
    let preds = m.predecessors();

    // BFS over derivation moves from all infinite-multiplicity seeds.
    let mut dist: Vec<Option<usize>> = vec![None; n];
    let mut parent: Vec<Option<(StateId, LetterId, Direction)>> = vec![None; n];
    let mut queue: VecDeque<StateId> = VecDeque::new();
    for s in analysis.states_with(Multiplicity::Infinite) {
        dist[s.0] = Some(0);
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        let dx = dist[x.0].unwrap();
        for a in m.letters() {
            if let Some(t) = m.step(x, a) {
                if dist[t.0].is_none() {
                    dist[t.0] = Some(dx + 1);
                    parent[t.0] = Some((x, a, Direction::Forward));
                    queue.push_back(t);
                }
            }
            for &(y, b) in &preds[x.0] {
                if b == a
                    && dist[y.0].is_none()
                    && analysis.multiplicity(y) == Multiplicity::FinitePlus
                {
                    dist[y.0] = Some(dx + 1);
                    parent[y.0] = Some((x, a, Direction::Backward));
                    queue.push_back(y);
                }
            }
        }
    }

    // Pick the chain end: minimal chain length, then minimal merge word.
    let targets: Vec<StateId> = m
        .states()
        .filter(|&s| analysis.is_zigzag(s) && analysis.is_irreversible(s))
        .collect();
    let min_dist = targets
        .iter()
        .filter_map(|&t| dist[t.0])
        .min()
        .expect("an irreversible zig-zag state is reachable by derivation moves");
    let mut chosen: Option<(usize, StateId, (StateId, StateId), Word)> = None;
    for &t in &targets {
        if dist[t.0] != Some(min_dist) {
            continue;
        }
        let (pair, word) = shortest_merge_into(m, t).expect("irreversible state has a merge");
        if chosen.as_ref().is_none_or(|(len, ..)| word.len() < *len) {
            chosen = Some((word.len(), t, pair, word));
        }
    }
    let (_, end, merge_pair, merge_word) = chosen.expect("some target at minimal distance");

    // Reconstruct the chain back to its seed.
    let mut chain: Vec<(LetterId, Direction)> = Vec::new();
    let mut chain_states = vec![end];
    let mut cur = end;
    while let Some((prev, a, dir)) = parent[cur.0] {
        chain.push((a, dir));
        chain_states.push(prev);
        cur = prev;
    }
    chain.reverse();
    chain_states.reverse();
    let r0 = chain_states[0];

    // Loop state: the nearest nontrivial-SCC state reaching r0.
    let dec = sccs(m);
    let (loop_state, access_path) = if dec.in_nontrivial(r0) {
        (r0, Vec::new())
    } else {
        // multi-source forward BFS from the nontrivial states
        let mut par: Vec<Option<(StateId, LetterId)>> = vec![None; n];
        let mut root: Vec<Option<StateId>> = vec![None; n];
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for s in dec.nontrivial_states() {
            root[s.0] = Some(s);
            queue.push_back(s);
        }
        'bfs: while let Some(x) = queue.pop_front() {
            for a in m.letters() {
                let Some(t) = m.step(x, a) else { continue };
                if root[t.0].is_some() {
                    continue;
                }
                root[t.0] = root[x.0];
                par[t.0] = Some((x, a));
                if t == r0 {
                    break 'bfs;
                }
                queue.push_back(t);
            }
        }
        let p0 = root[r0.0].expect("infinite state is reachable from a nontrivial SCC");
        let mut word = Vec::new();
        let mut cur = r0;
        while let Some((p, a)) = par[cur.0] {
            word.push(a);
            cur = p;
        }
        word.reverse();
        (p0, word)
    };
    let loop_word = shortest_loop_word(m, loop_state).expect("nontrivial SCC has a loop word");

    let witness = ZigZagWitness {
        loop_state,
        loop_word,
        access_path,
        chain,
        chain_states,
        merge_pair,
        merge_word,
    };
    debug_assert!(witness.check(m, analysis).is_empty());
    Ok(witness)
}

/// Decides finiteness for an already-minimal automaton.
pub fn decide_minimal(m: &PartialDfa) -> Result<FinitenessVerdict, AnalysisError> {
    if m.is_empty() {
        return Ok(FinitenessVerdict::EmptyLanguage);
    }
    if let Some(pattern) = forbidden_pattern(m)? {
        return Ok(FinitenessVerdict::NotReversibleLanguage { pattern });
    }
    let analysis = classify(m)?;
    if analysis.has_irreversible_zigzag() {
        Ok(FinitenessVerdict::Infinite {
            witness: find_witness(m, &analysis)?,
        })
    } else {
        Ok(FinitenessVerdict::Finite {
            bound: analysis.bound(),
        })
    }
}

/// Decides whether the language of `d` has finitely many reduced reversible
/// recognizers. The input is minimized first, so any recognizer is accepted;
/// states in the returned verdict refer to `minimize(d)`.
pub fn decide(d: &PartialDfa) -> FinitenessVerdict {
    decide_minimal(&minimize(d)).expect("minimized input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    fn names(m: &PartialDfa, states: &[StateId]) -> Vec<String> {
        states.iter().map(|&s| m.state_name(s).to_string()).collect()
    }

    #[test]
    fn classify_running_fixture() {
        let m = m_run();
        let an = classify(&m).unwrap();
        assert_eq!(names(&m, &an.states_with(Multiplicity::One)), ["q0", "q1", "q3"]);
        assert_eq!(names(&m, &an.states_with(Multiplicity::FinitePlus)), ["q2", "q4"]);
        assert_eq!(names(&m, &an.states_with(Multiplicity::Infinite)), ["q5"]);
        assert_eq!(names(&m, &an.irreversible_states()), ["q4"]);
        assert_eq!(names(&m, &an.zigzag_states()), ["q2", "q4", "q5"]);
        let count = |n: &str| an.incoming_count(m.state_index(n).unwrap());
        assert_eq!(count("q2"), Some(2)); // b, d
        assert_eq!(count("q4"), Some(4)); // aa, bb, db, ca
        assert_eq!(count("q5"), None);
    }

    #[test]
    fn classify_ab_fixture() {
        let m = m_ab();
        let an = classify(&m).unwrap();
        assert_eq!(names(&m, &an.states_with(Multiplicity::Infinite)), ["s0", "p", "q"]);
        assert_eq!(names(&m, &an.irreversible_states()), ["q"]);
        assert_eq!(names(&m, &an.zigzag_states()), ["s0", "p", "q"]);
    }

    #[test]
    fn classify_requires_minimal() {
        assert_eq!(classify(&n_run()).unwrap_err(), AnalysisError::NotMinimal);
    }

    #[test]
    fn reversibility_of_fixture_languages() {
        assert!(is_reversible_language(&m_ab()).unwrap());
        assert!(is_reversible_language(&m_run()).unwrap());
        assert!(is_reversible_language(&m_fin()).unwrap());
        let pat = forbidden_pattern(&m_loop()).unwrap().unwrap();
        let m = m_loop();
        assert_eq!(m.state_name(pat.p), "A");
        assert_eq!(m.state_name(pat.q), "B");
        assert_eq!(m.letter_name(pat.letter), "a");
        assert_eq!(m.render_word(&pat.word), "b");
    }

    #[test]
    fn a_plus_is_not_reversible() {
        // the merge target reaches itself, so the pattern closes with the loop
        let m = crate::parse_dfa(
            "alphabet: a\nstates: s r\ninitial: s\nfinal: r\ns a r\nr a r\n",
        )
        .unwrap();
        let pat = forbidden_pattern(&m).unwrap().unwrap();
        assert_eq!(m.state_name(pat.p), "r");
        assert_eq!(m.state_name(pat.q), "s");
        assert!(pat.word.is_empty());
    }

    #[test]
    fn state_bounds() {
        assert_eq!(state_bound(&m_run()).unwrap(), 10); // 1+1+1+2+4+1
        assert_eq!(state_bound(&m_star()).unwrap(), 1);
        assert_eq!(state_bound(&m_fin()).unwrap(), 3); // 1 + {a,b}
    }

    #[test]
    fn witness_for_running_fixture() {
        let m = m_run();
        let an = classify(&m).unwrap();
        let w = find_witness(&m, &an).unwrap();
        assert_eq!(m.state_name(w.loop_state), "q5");
        assert_eq!(m.render_word(&w.loop_word), "b");
        assert!(w.access_path.is_empty());
        assert_eq!(names(&m, &w.chain_states), ["q5", "q2", "q4"]);
        let a = m.letter_index("a").unwrap();
        let b = m.letter_index("b").unwrap();
        assert_eq!(w.chain, vec![(a, Direction::Backward), (b, Direction::Forward)]);
        assert_eq!(
            (m.state_name(w.merge_pair.0), m.state_name(w.merge_pair.1)),
            ("q1", "q3")
        );
        assert_eq!(m.render_word(&w.merge_word), "a");
        assert!(w.check(&m, &an).is_empty());
    }

    #[test]
    fn witness_for_ab_fixture_has_empty_chain() {
        let m = m_ab();
        let an = classify(&m).unwrap();
        let w = find_witness(&m, &an).unwrap();
        assert_eq!(m.state_name(w.loop_state), "q");
        assert_eq!(m.render_word(&w.loop_word), "a");
        assert!(w.access_path.is_empty());
        assert!(w.chain.is_empty());
        assert_eq!(names(&m, &w.chain_states), ["q"]);
        assert_eq!(
            (m.state_name(w.merge_pair.0), m.state_name(w.merge_pair.1)),
            ("s0", "p")
        );
        assert_eq!(m.render_word(&w.merge_word), "b");
        assert!(w.check(&m, &an).is_empty());
    }

    #[test]
    fn witness_requires_an_irreversible_zigzag_state() {
        let m = m_star();
        let an = classify(&m).unwrap();
        assert_eq!(
            find_witness(&m, &an).unwrap_err(),
            AnalysisError::NoIrreversibleZigzag
        );
    }

    #[test]
    fn decisions_on_fixtures() {
        assert!(matches!(decide(&m_run()), FinitenessVerdict::Infinite { .. }));
        assert!(matches!(decide(&m_ab()), FinitenessVerdict::Infinite { .. }));
        assert!(matches!(decide(&m_star()), FinitenessVerdict::Finite { bound: 1 }));
        assert!(matches!(decide(&m_fin()), FinitenessVerdict::Finite { bound: 3 }));
        assert!(matches!(
            decide(&m_loop()),
            FinitenessVerdict::NotReversibleLanguage { .. }
        ));
    }

    #[test]
    fn decide_accepts_non_minimal_and_empty_inputs() {
        assert!(matches!(decide(&n_run()), FinitenessVerdict::Infinite { .. }));
        let empty = crate::PartialDfa::builder()
            .letters(["a"])
            .states(["s"])
            .initial("s")
            .transition("s", "a", "s")
            .build()
            .unwrap();
        assert!(matches!(decide(&empty), FinitenessVerdict::EmptyLanguage));
    }

    #[test]
    fn irreversibility_is_forward_closed() {
        for m in [m_run(), m_ab(), m_fin(), m_star()] {
            let an = classify(&m).unwrap();
            for (s, _, t) in m.transitions() {
                if an.is_irreversible(s) {
                    assert!(an.is_irreversible(t));
                }
            }
        }
    }

    #[test]
    fn zigzag_set_is_forward_closed_and_contains_infinite() {
        for m in [m_run(), m_ab(), m_fin(), m_star()] {
            let an = classify(&m).unwrap();
            for s in m.states() {
                if an.multiplicity(s) == Multiplicity::Infinite {
                    assert!(an.is_zigzag(s));
                }
            }
            for (s, _, t) in m.transitions() {
                if an.is_zigzag(s) {
                    assert!(an.is_zigzag(t));
                }
            }
        }
    }
}

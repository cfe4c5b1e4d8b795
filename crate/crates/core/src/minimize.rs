//! Minimization by partition refinement over the sink-completed automaton,
//! language equivalence by synchronized product exploration, and the map
//! from a trim recognizer onto the minimal automaton.

use crate::automaton::{LetterId, PartialDfa, StateId};
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StarMapError {
    #[error("automata recognize different languages")]
    NotEquivalent,
    #[error("target automaton is not minimal")]
    NotMinimal,
    #[error("source automaton is not trim")]
    NotTrim,
}

/// Language-equivalence classes of the states, refined against an implicit
/// reject sink (undefined transitions go there). Class ids are numbered by
/// first occurrence in declaration order; states of different classes are
/// inequivalent. The sink's class is returned separately.
pub(crate) fn equivalence_classes(d: &PartialDfa) -> (Vec<usize>, usize) {
    let n = d.state_count();
    let sink = n;
    let mut class = vec![0usize; n + 1];
    for s in 0..n {
        class[s] = usize::from(d.is_final(StateId(s)));
    }
    class[sink] = 0;
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = vec![0usize; n + 1];
        for s in 0..=n {
            let mut sig = Vec::with_capacity(d.letter_count() + 1);
            sig.push(class[s]);
            for a in d.letters() {
                let t = if s == sink {
                    sink
                } else {
                    d.step(StateId(s), a).map_or(sink, |t| t.0)
                };
                sig.push(class[t]);
            }
            let fresh = ids.len();
            next[s] = *ids.entry(sig).or_insert(fresh);
        }
        // ids are renumbered by first occurrence every round, so the partition
        // is stable exactly when the assignment repeats
        let stable = next == class;
        class = next;
        if stable {
            break;
        }
    }
    let sink_class = class[sink];
    class.truncate(n);
    (class, sink_class)
}

/// The minimal partial DFA of `L(d)`: trim, with no two distinct equivalent
/// states. States are named by the representative (first declared) member of
/// their class, so minimizing an already-minimal automaton returns it
/// unchanged. The empty language yields the 0-state automaton.
pub fn minimize(d: &PartialDfa) -> PartialDfa {
    let t = d.trim();
    if t.is_empty() {
        return t;
    }
    let (class, sink_class) = equivalence_classes(&t);
    debug_assert!(
        class.iter().all(|&c| c != sink_class),
        "trim automaton has a state with empty residual"
    );
    // class ids are in first-occurrence order, which is representative order
    let mut reps: Vec<StateId> = Vec::new();
    let mut block_index: HashMap<usize, usize> = HashMap::new();
    for s in t.states() {
        block_index.entry(class[s.0]).or_insert_with(|| {
            reps.push(s);
            reps.len() - 1
        });
    }
    let states: Vec<String> = reps.iter().map(|&r| t.state_name(r).to_string()).collect();
    let finals: Vec<bool> = reps.iter().map(|&r| t.is_final(r)).collect();
    let delta = reps
        .iter()
        .map(|&r| {
            t.letters()
                .map(|a| t.step(r, a).map(|q| StateId(block_index[&class[q.0]])))
                .collect()
        })
        .collect();
    let initial = t.initial().map(|q| StateId(block_index[&class[q.0]]));
    PartialDfa::from_parts(states, t.alphabet().to_vec(), initial, finals, delta).trim()
}

/// True iff `m` is trim and no two distinct states are equivalent.
pub fn is_minimal(m: &PartialDfa) -> bool {
    if m.is_empty() {
        return true;
    }
    if !m.is_trim() {
        return false;
    }
    let (class, _) = equivalence_classes(m);
    let distinct: HashSet<usize> = class.iter().copied().collect();
    distinct.len() == m.state_count()
}

/// Union of the two alphabets by letter name, each side mapped back.
fn union_alphabet(
    a: &PartialDfa,
    b: &PartialDfa,
) -> Vec<(Option<LetterId>, Option<LetterId>)> {
    let mut union: Vec<(Option<LetterId>, Option<LetterId>)> = a
        .letters()
        .map(|l| (Some(l), b.letter_index(a.letter_name(l))))
        .collect();
    for l in b.letters() {
        if a.letter_index(b.letter_name(l)).is_none() {
            union.push((None, Some(l)));
        }
    }
    union
}

fn bisimilar(
    a: &PartialDfa,
    b: &PartialDfa,
    start_a: Option<StateId>,
    start_b: Option<StateId>,
) -> bool {
    let letters = union_alphabet(a, b);
    let mut seen: HashSet<(Option<usize>, Option<usize>)> = HashSet::new();
    let mut queue = VecDeque::from([(start_a, start_b)]);
    seen.insert((start_a.map(|s| s.0), start_b.map(|s| s.0)));
    while let Some((pa, pb)) = queue.pop_front() {
        let acc_a = pa.is_some_and(|s| a.is_final(s));
        let acc_b = pb.is_some_and(|s| b.is_final(s));
        if acc_a != acc_b {
            return false;
        }
        for &(la, lb) in &letters {
            let na = pa.and_then(|s| la.and_then(|l| a.step(s, l)));
            let nb = pb.and_then(|s| lb.and_then(|l| b.step(s, l)));
            if na.is_none() && nb.is_none() {
                continue;
            }
            if seen.insert((na.map(|s| s.0), nb.map(|s| s.0))) {
                queue.push_back((na, nb));
            }
        }
    }
    true
}

/// True iff the two automata recognize the same language. Undefined
/// transitions behave as an implicit reject sink, so alphabets may differ.
pub fn equivalent(a: &PartialDfa, b: &PartialDfa) -> bool {
    bisimilar(a, b, a.initial(), b.initial())
}

/// True iff state `p` of `a` and state `q` of `b` recognize the same language.
pub fn state_equivalent(a: &PartialDfa, p: StateId, b: &PartialDfa, q: StateId) -> bool {
    bisimilar(a, b, Some(p), Some(q))
}

/// For trim `n` equivalent to minimal `m`, maps every state of `n` to the
/// unique equivalent state of `m`. The map commutes with transitions.
pub fn star_map(n: &PartialDfa, m: &PartialDfa) -> Result<Vec<StateId>, StarMapError> {
    if !n.is_trim() {
        return Err(StarMapError::NotTrim);
    }
    if !is_minimal(m) {
        return Err(StarMapError::NotMinimal);
    }
    if !equivalent(n, m) {
        return Err(StarMapError::NotEquivalent);
    }
    let mut image = vec![None; n.state_count()];
    let (Some(init_n), Some(init_m)) = (n.initial(), m.initial()) else {
        return Ok(Vec::new()); // both empty
    };
    image[init_n.0] = Some(init_m);
    let mut queue = VecDeque::from([init_n]);
    while let Some(q) = queue.pop_front() {
        let img = image[q.0].expect("visited state has an image");
        for a in n.letters() {
            let Some(t) = n.step(q, a) else { continue };
            if image[t.0].is_some() {
                continue;
            }
            let target = m
                .letter_index(n.letter_name(a))
                .and_then(|la| m.step(img, la))
                .ok_or(StarMapError::NotEquivalent)?;
            image[t.0] = Some(target);
            queue.push_back(t);
        }
    }
    Ok(image
        .into_iter()
        .map(|i| i.expect("trim automaton is reachable"))
        .collect())
}

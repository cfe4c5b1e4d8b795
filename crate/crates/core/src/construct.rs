//! Constructions that grow reduced reversible recognizers past any prime size:
//! the word annotation that duplicates every finite-plus class, the prime
//! cycle blow-up, the rewiring that threads the witness chain through two
//! parallel copies, and the end-to-end pipeline.

use crate::analysis::{
    classify, decide_minimal, forbidden_pattern, Direction, FinitenessVerdict, Multiplicity,
    ZigZagWitness,
};
use crate::automaton::{fresh_name, LetterId, PartialDfa, StateId, Word};
use crate::congruence::{reduce_reversible_with_map, CongruenceError};
use crate::minimize::{equivalent, minimize, star_map, state_equivalent, StarMapError};
use crate::scc::sccs;
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("automata recognize different languages")]
    NotEquivalent,
    #[error("automaton is not minimal")]
    NotMinimal,
    #[error("base automaton must be trim and reversible")]
    NotReversibleBase,
    #[error("the language has only finitely many reduced reversible recognizers")]
    NotInfiniteCase,
    #[error("cycle length must be a prime number")]
    NotPrime,
    #[error("transition is undefined")]
    UndefinedTransition,
    #[error("no suitable state exists")]
    NoSuchState,
    #[error("a required duplicate state is missing: {0}")]
    MissingDuplicate(String),
    #[error("redirect would break reversibility: {0}")]
    ReversibilityConflict(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("state budget exceeded")]
    BudgetExceeded,
    #[error("the language has no reversible recognizer")]
    NotReversibleLanguage,
}

fn map_star_err(e: StarMapError) -> ConstructError {
    match e {
        StarMapError::NotEquivalent => ConstructError::NotEquivalent,
        StarMapError::NotMinimal => ConstructError::NotMinimal,
        StarMapError::NotTrim => ConstructError::NotReversibleBase,
    }
}

pub(crate) fn is_prime(k: usize) -> bool {
    if k < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= k {
        if k % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A cycle of equivalent states: `states[j] · word = states[(j+1) mod k]`.
#[derive(Clone, Debug)]
pub struct LoopCycle {
    pub states: Vec<StateId>,
    pub word: Word,
}

/// Result of [`cycle_blowup`]: the blown automaton and the `k` copies of the
/// blown state, in index order.
#[derive(Clone, Debug)]
pub struct CycleBlowup {
    pub automaton: PartialDfa,
    pub cycle_states: Vec<StateId>,
}

/// The pattern that forces every reversible congruence to keep the cycle
/// states apart: a prime cycle plus two parallel threads ending in
/// inequivalent states.
#[derive(Clone, Debug)]
pub struct PatternInstance {
    pub cycle_states: Vec<StateId>,
    pub cycle_word: Word,
    /// The second thread starts on this cycle state (`0 < offset < k`).
    pub offset: usize,
    pub thread_letters: Vec<LetterId>,
    pub directions: Vec<Direction>,
    /// First thread states, one more entry than `thread_letters`.
    pub thread_a: Vec<StateId>,
    /// Second thread states.
    pub thread_b: Vec<StateId>,
}

/// Verdict of [`check_pattern`]: the empty violation list means the instance
/// is sound.
#[derive(Clone, Debug)]
pub struct PatternCheck {
    violations: Vec<String>,
}

impl PatternCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }
}

/// All stages of one blow-up run.
#[derive(Clone, Debug)]
pub struct BlowupReport {
    pub base: PartialDfa,
    pub annotated: PartialDfa,
    pub blown: PartialDfa,
    pub rewired: PartialDfa,
    pub reduced: PartialDfa,
    /// Pattern located in `rewired`.
    pub pattern: PatternInstance,
    pub prime: usize,
}

/// Annotates a trim reversible recognizer `n` of the language of the minimal
/// automaton `m` with the words reaching its finite-multiplicity region:
/// states become `(q, u)` pairs whose word component grows only while the
/// image in `m` stays of finite multiplicity. Every finite-plus state of `m`
/// with `c` reaching words ends up with exactly `c` equivalent copies.
pub fn annotate(n: &PartialDfa, m: &PartialDfa) -> Result<PartialDfa, ConstructError> {
    if !(n.is_trim() && n.is_reversible()) {
        return Err(ConstructError::NotReversibleBase);
    }
    let star = star_map(n, m).map_err(map_star_err)?;
    let analysis = classify(m).map_err(|_| ConstructError::NotMinimal)?;
    let infinite = |s: StateId| analysis.multiplicity(s) == Multiplicity::Infinite;

    let Some(init) = n.initial() else {
        // empty base recognizes the empty language; nothing to annotate
        return Ok(n.clone());
    };
    let label = |q: StateId, u: &[LetterId]| -> String {
        let word_part: String = if u.is_empty() {
            "ε".to_string()
        } else {
            u.iter().map(|&a| n.letter_name(a)).collect()
        };
        format!("{},{}", n.state_name(q), word_part)
    };

    let mut taken: HashSet<String> = HashSet::new();
    let mut names: Vec<String> = Vec::new();
    let mut keys: Vec<(StateId, Word)> = Vec::new();
    let mut index: HashMap<(usize, Word), usize> = HashMap::new();
    let mut star_new: Vec<StateId> = Vec::new();
    let mut delta_rows: Vec<Vec<Option<StateId>>> = Vec::new();

    let name = fresh_name(&label(init, &[]), &taken);
    taken.insert(name.clone());
    names.push(name);
    keys.push((init, Vec::new()));
    index.insert((init.0, Vec::new()), 0);
    star_new.push(star[init.0]);

    // the worklist is the key list itself; discovery order is BFS order
    let mut i = 0;
    while i < keys.len() {
        let (q, u) = keys[i].clone();
        let mut row = vec![None; n.letter_count()];
        for a in n.letters() {
            let Some(t) = n.step(q, a) else { continue };
            let tu = if infinite(star[t.0]) {
                u.clone()
            } else {
                let mut w = u.clone();
                w.push(a);
                w
            };
            let key = (t.0, tu.clone());
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    let j = keys.len();
                    let name = fresh_name(&label(t, &tu), &taken);
                    taken.insert(name.clone());
                    names.push(name);
                    keys.push((t, tu));
                    star_new.push(star[t.0]);
                    index.insert(key, j);
                    j
                }
            };
            row[a.0] = Some(StateId(j));
        }
        delta_rows.push(row);
        i += 1;
    }
    let finals = keys.iter().map(|(q, _)| n.is_final(*q)).collect();
    let result = PartialDfa::from_parts(
        names,
        n.alphabet().to_vec(),
        Some(StateId(0)),
        finals,
        delta_rows,
    )
    .trim();

    debug_assert_eq!(result.state_count(), star_new.len(), "reachable part is trim");

    if !result.is_reversible() {
        return Err(ConstructError::VerificationFailed(
            "annotated automaton is not reversible".into(),
        ));
    }
    if !equivalent(&result, n) {
        return Err(ConstructError::VerificationFailed(
            "annotation changed the language".into(),
        ));
    }
    let images = star_map(&result, m).map_err(map_star_err)?;
    for s in m.states() {
        if analysis.multiplicity(s) == Multiplicity::FinitePlus {
            let copies = images.iter().filter(|&&img| img == s).count();
            if copies < 2 {
                return Err(ConstructError::VerificationFailed(format!(
                    "finite-plus state {} has {} copies after annotation",
                    m.state_name(s),
                    copies
                )));
            }
        }
    }
    Ok(result)
}

/// Finds a state of `nprime` equivalent to the looping state `p0` of `m` that
/// lies on a nontrivial SCC, together with the shortest nonempty word
/// returning it to itself (split as first letter + rest).
pub fn find_cycle(
    nprime: &PartialDfa,
    m: &PartialDfa,
    p0: StateId,
) -> Result<(StateId, LetterId, Word), ConstructError> {
    let star = star_map(nprime, m).map_err(map_star_err)?;
    if !sccs(m).in_nontrivial(p0) {
        return Err(ConstructError::NoSuchState);
    }
    let dec = sccs(nprime);
    let q = nprime
        .states()
        .find(|&s| star[s.0] == p0 && dec.in_nontrivial(s))
        .ok_or(ConstructError::NoSuchState)?;
    let word =
        crate::analysis::shortest_loop_word(nprime, q).expect("nontrivial SCC has a loop");
    let (first, rest) = word.split_first().expect("loop word is nonempty");
    Ok((q, *first, rest.to_vec()))
}

/// Replaces the loop through `q` by a cycle of prime length `k`: states become
/// `(state, index)` pairs and the index advances (mod `k`) exactly on the
/// transition `(q, a)`. The result is reversible and equivalent to `nprime`,
/// and contains the `k` reachable copies of `q` with `(q, i) · av = (q, i+1)`.
pub fn cycle_blowup(
    nprime: &PartialDfa,
    q: StateId,
    a: LetterId,
    k: usize,
) -> Result<CycleBlowup, ConstructError> {
    if !is_prime(k) {
        return Err(ConstructError::NotPrime);
    }
    if nprime.step(q, a).is_none() {
        return Err(ConstructError::UndefinedTransition);
    }
    let Some(init) = nprime.initial() else {
        return Err(ConstructError::NoSuchState);
    };

    let mut taken: HashSet<String> = HashSet::new();
    let mut names: Vec<String> = Vec::new();
    let mut keys: Vec<(StateId, usize)> = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut delta_rows: Vec<Vec<Option<StateId>>> = Vec::new();

    let name = fresh_name(&format!("{},0", nprime.state_name(init)), &taken);
    taken.insert(name.clone());
    names.push(name);
    keys.push((init, 0));
    index.insert((init.0, 0), 0);

    let mut i = 0;
    while i < keys.len() {
        let (s, idx) = keys[i];
        let mut row = vec![None; nprime.letter_count()];
        for b in nprime.letters() {
            let Some(t) = nprime.step(s, b) else { continue };
            let ti = if s == q && b == a { (idx + 1) % k } else { idx };
            let j = match index.get(&(t.0, ti)) {
                Some(&j) => j,
                None => {
                    let j = keys.len();
                    let name = fresh_name(&format!("{},{}", nprime.state_name(t), ti), &taken);
                    taken.insert(name.clone());
                    names.push(name);
                    keys.push((t, ti));
                    index.insert((t.0, ti), j);
                    j
                }
            };
            row[b.0] = Some(StateId(j));
        }
        delta_rows.push(row);
        i += 1;
    }
    let finals = keys.iter().map(|(s, _)| nprime.is_final(*s)).collect();
    let automaton = PartialDfa::from_parts(
        names,
        nprime.alphabet().to_vec(),
        Some(StateId(0)),
        finals,
        delta_rows,
    );
    debug_assert!(automaton.is_trim());

    let cycle_states: Vec<StateId> = (0..k)
        .map(|i| {
            index
                .get(&(q.0, i))
                .map(|&j| StateId(j))
                .ok_or_else(|| {
                    ConstructError::VerificationFailed(format!(
                        "cycle copy {i} of {} is unreachable",
                        nprime.state_name(q)
                    ))
                })
        })
        .collect::<Result<_, _>>()?;

    if !automaton.is_reversible() {
        return Err(ConstructError::VerificationFailed(
            "blown automaton is not reversible".into(),
        ));
    }
    if !equivalent(&automaton, nprime) {
        return Err(ConstructError::VerificationFailed(
            "blow-up changed the language".into(),
        ));
    }
    Ok(CycleBlowup {
        automaton,
        cycle_states,
    })
}

/// One step of the uniform chain walked by [`rewire`].
enum ThreadStep {
    Forward(LetterId),
    /// Backward through the class of this state of `m` (always finite-plus).
    Backward(LetterId, StateId),
    /// Final backward step into the two inequivalent classes.
    Split(LetterId, StateId, StateId),
}

/// Threads two parallel copies of the witness chain through the blown
/// automaton, redirecting same-class transitions where a predecessor is
/// missing. Redirected transitions always swap a target for an equivalent
/// one, so every state keeps its language. Returns the rewired automaton and
/// the pattern instance it admits.
pub fn rewire(
    ndd: &PartialDfa,
    m: &PartialDfa,
    witness: &ZigZagWitness,
    cycle: &LoopCycle,
) -> Result<(PartialDfa, PatternInstance), ConstructError> {
    if !(ndd.is_trim() && ndd.is_reversible()) {
        return Err(ConstructError::NotReversibleBase);
    }
    let k = cycle.states.len();
    if !is_prime(k) {
        return Err(ConstructError::NotPrime);
    }
    let star = star_map(ndd, m).map_err(map_star_err)?;
    for (j, &c) in cycle.states.iter().enumerate() {
        if star[c.0] != witness.loop_state {
            return Err(ConstructError::VerificationFailed(
                "cycle state does not map to the loop state".into(),
            ));
        }
        let next = cycle.states[(j + 1) % k];
        if ndd.run(c, &cycle.word) != Some(next) {
            return Err(ConstructError::VerificationFailed(
                "cycle word does not advance the cycle".into(),
            ));
        }
    }

    // the witness letters are named over m; resolve them in ndd's alphabet
    let resolve = |a: LetterId| -> Result<LetterId, ConstructError> {
        ndd.letter_index(m.letter_name(a))
            .ok_or(ConstructError::NotEquivalent)
    };

    // Uniform chain: access path forward, chain steps as recorded, merge word
    // walked backward, final letter splitting into the two pair classes.
    let mut steps: Vec<ThreadStep> = Vec::new();
    for &b in &witness.access_path {
        steps.push(ThreadStep::Forward(resolve(b)?));
    }
    for (i, &(a, dir)) in witness.chain.iter().enumerate() {
        let la = resolve(a)?;
        match dir {
            Direction::Forward => steps.push(ThreadStep::Forward(la)),
            Direction::Backward => {
                steps.push(ThreadStep::Backward(la, witness.chain_states[i + 1]))
            }
        }
    }
    let merge_len = witness.merge_word.len();
    for j in (1..merge_len).rev() {
        // the state s_j of the merge path, m-side
        let s_j = m
            .run(witness.merge_pair.0, &witness.merge_word[..j])
            .expect("merge word runs in m");
        steps.push(ThreadStep::Backward(resolve(witness.merge_word[j])?, s_j));
    }
    steps.push(ThreadStep::Split(
        resolve(witness.merge_word[0])?,
        witness.merge_pair.0,
        witness.merge_pair.1,
    ));

    let mut delta = ndd.delta_table();
    let pred_of = |delta: &[Vec<Option<StateId>>], b: LetterId, t: StateId| -> Option<StateId> {
        (0..delta.len())
            .find(|&i| delta[i][b.0] == Some(t))
            .map(StateId)
    };
    let candidates = |class: StateId| -> Vec<StateId> {
        ndd.states().filter(|s| star[s.0] == class).collect()
    };

    let mut thread_a = vec![cycle.states[0]];
    let mut thread_b = vec![cycle.states[1]];
    let mut letters: Vec<LetterId> = Vec::new();
    let mut dirs: Vec<Direction> = Vec::new();

    for step in &steps {
        let t1 = *thread_a.last().unwrap();
        let t2 = *thread_b.last().unwrap();
        match *step {
            ThreadStep::Forward(b) => {
                let x1 = delta[t1.0][b.0].ok_or_else(|| {
                    ConstructError::VerificationFailed("forward step undefined".into())
                })?;
                let x2 = delta[t2.0][b.0].ok_or_else(|| {
                    ConstructError::VerificationFailed("forward step undefined".into())
                })?;
                thread_a.push(x1);
                thread_b.push(x2);
                letters.push(b);
                dirs.push(Direction::Forward);
            }
            ThreadStep::Backward(b, class) => {
                let cands = candidates(class);
                let pick = |avoid: Option<StateId>| -> Option<StateId> {
                    cands.iter().copied().find(|&x| Some(x) != avoid)
                };
                let (r1, r2) = match (pred_of(&delta, b, t1), pred_of(&delta, b, t2)) {
                    (Some(x1), Some(x2)) => {
                        for x in [x1, x2] {
                            if star[x.0] != class {
                                return Err(ConstructError::ReversibilityConflict(format!(
                                    "state {} already feeds the thread on {}",
                                    ndd.state_name(x),
                                    ndd.letter_name(b)
                                )));
                            }
                        }
                        (x1, x2)
                    }
                    (Some(x1), None) => {
                        if star[x1.0] != class {
                            return Err(ConstructError::ReversibilityConflict(format!(
                                "state {} already feeds the thread on {}",
                                ndd.state_name(x1),
                                ndd.letter_name(b)
                            )));
                        }
                        let r2 = pick(Some(x1)).ok_or_else(|| {
                            ConstructError::MissingDuplicate(m.state_name(class).to_string())
                        })?;
                        debug_assert!(delta[r2.0][b.0].is_some());
                        delta[r2.0][b.0] = Some(t2);
                        (x1, r2)
                    }
                    (None, Some(x2)) => {
                        if star[x2.0] != class {
                            return Err(ConstructError::ReversibilityConflict(format!(
                                "state {} already feeds the thread on {}",
                                ndd.state_name(x2),
                                ndd.letter_name(b)
                            )));
                        }
                        let r1 = pick(Some(x2)).ok_or_else(|| {
                            ConstructError::MissingDuplicate(m.state_name(class).to_string())
                        })?;
                        debug_assert!(delta[r1.0][b.0].is_some());
                        delta[r1.0][b.0] = Some(t1);
                        (r1, x2)
                    }
                    (None, None) => {
                        if cands.len() < 2 {
                            return Err(ConstructError::MissingDuplicate(
                                m.state_name(class).to_string(),
                            ));
                        }
                        let (r1, r2) = (cands[0], cands[1]);
                        delta[r1.0][b.0] = Some(t1);
                        delta[r2.0][b.0] = Some(t2);
                        (r1, r2)
                    }
                };
                thread_a.push(r1);
                thread_b.push(r2);
                letters.push(b);
                dirs.push(Direction::Backward);
            }
            ThreadStep::Split(b, class1, class2) => {
                let mut attach = |class: StateId, target: StateId| -> Result<StateId, ConstructError> {
                    match pred_of(&delta, b, target) {
                        Some(x) if star[x.0] == class => Ok(x),
                        Some(x) => Err(ConstructError::ReversibilityConflict(format!(
                            "state {} already feeds the thread on {}",
                            ndd.state_name(x),
                            ndd.letter_name(b)
                        ))),
                        None => {
                            let r = candidates(class).first().copied().ok_or_else(|| {
                                ConstructError::MissingDuplicate(m.state_name(class).to_string())
                            })?;
                            debug_assert!(delta[r.0][b.0].is_some());
                            delta[r.0][b.0] = Some(target);
                            Ok(r)
                        }
                    }
                };
                let r1 = attach(class1, t1)?;
                let r2 = attach(class2, t2)?;
                debug_assert_ne!(r1, r2);
                thread_a.push(r1);
                thread_b.push(r2);
                letters.push(b);
                dirs.push(Direction::Backward);
            }
        }
    }

    let rewired = PartialDfa::from_parts(
        ndd.state_names().to_vec(),
        ndd.alphabet().to_vec(),
        ndd.initial(),
        ndd.states().map(|s| ndd.is_final(s)).collect(),
        delta,
    );
    let (trimmed, map) = rewired.trim_with_map();
    let remap = |s: StateId| -> Result<StateId, ConstructError> {
        map[s.0].ok_or_else(|| {
            ConstructError::VerificationFailed(format!(
                "pattern state {} was trimmed away",
                ndd.state_name(s)
            ))
        })
    };
    let instance = PatternInstance {
        cycle_states: cycle
            .states
            .iter()
            .map(|&s| remap(s))
            .collect::<Result<_, _>>()?,
        cycle_word: cycle.word.clone(),
        offset: 1,
        thread_letters: letters,
        directions: dirs,
        thread_a: thread_a.iter().map(|&s| remap(s)).collect::<Result<_, _>>()?,
        thread_b: thread_b.iter().map(|&s| remap(s)).collect::<Result<_, _>>()?,
    };

    if !trimmed.is_reversible() {
        return Err(ConstructError::VerificationFailed(
            "rewired automaton is not reversible".into(),
        ));
    }
    if !equivalent(&trimmed, m) {
        return Err(ConstructError::VerificationFailed(
            "rewiring changed the language".into(),
        ));
    }
    let check = check_pattern(&trimmed, &instance);
    if !check.holds() {
        return Err(ConstructError::VerificationFailed(format!(
            "pattern does not hold: {}",
            check.violations().join("; ")
        )));
    }
    Ok((trimmed, instance))
}

/// Verifies every structural requirement of a pattern instance against `n`:
/// primality, the cycle equations, the thread equations, and inequivalence of
/// the two thread ends.
pub fn check_pattern(n: &PartialDfa, inst: &PatternInstance) -> PatternCheck {
    let mut violations = Vec::new();
    let k = inst.cycle_states.len();
    if !is_prime(k) {
        violations.push(format!("cycle length {k} is not prime"));
    }
    if inst.offset == 0 || inst.offset >= k {
        violations.push(format!("offset {} is out of range", inst.offset));
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if inst.cycle_states[i] == inst.cycle_states[j] {
                violations.push("cycle states are not pairwise distinct".into());
            }
        }
    }
    for (j, &c) in inst.cycle_states.iter().enumerate() {
        let next = inst.cycle_states[(j + 1) % k];
        if n.run(c, &inst.cycle_word) != Some(next) {
            violations.push(format!("cycle word does not map copy {j} to its successor"));
        }
    }
    let t = inst.thread_letters.len();
    if inst.directions.len() != t
        || inst.thread_a.len() != t + 1
        || inst.thread_b.len() != t + 1
    {
        violations.push("thread lengths are inconsistent".into());
        return PatternCheck { violations };
    }
    if inst.thread_a[0] != inst.cycle_states[0] {
        violations.push("first thread does not start on cycle state 0".into());
    }
    if inst.offset < k && inst.thread_b[0] != inst.cycle_states[inst.offset] {
        violations.push("second thread does not start on the offset cycle state".into());
    }
    for j in 0..t {
        let a = inst.thread_letters[j];
        let ok = match inst.directions[j] {
            Direction::Forward => {
                n.step(inst.thread_a[j], a) == Some(inst.thread_a[j + 1])
                    && n.step(inst.thread_b[j], a) == Some(inst.thread_b[j + 1])
            }
            Direction::Backward => {
                n.step(inst.thread_a[j + 1], a) == Some(inst.thread_a[j])
                    && n.step(inst.thread_b[j + 1], a) == Some(inst.thread_b[j])
            }
        };
        if !ok {
            violations.push(format!("thread step {j} does not match the transitions"));
        }
    }
    let last_a = *inst.thread_a.last().unwrap();
    let last_b = *inst.thread_b.last().unwrap();
    if state_equivalent(n, last_a, n, last_b) {
        violations.push("thread ends are equivalent".into());
    }
    PatternCheck { violations }
}

/// Splits one state with colliding same-letter predecessors. States on a
/// nontrivial SCC are split by replicating the whole component per external
/// incoming transition; other states are split per incoming transition.
fn split_once(n: &PartialDfa) -> Result<PartialDfa, ConstructError> {
    let merge_target = n
        .states()
        .find(|&r| {
            n.letters().any(|a| {
                n.states().filter(|&s| n.step(s, a) == Some(r)).count() >= 2
            })
        })
        .expect("caller checked a merge exists");
    let dec = sccs(n);
    let comp: Vec<StateId> = if dec.in_nontrivial(merge_target) {
        dec.components()[dec.component_of(merge_target)].clone()
    } else {
        vec![merge_target]
    };
    let in_comp = |s: StateId| comp.contains(&s);
    let initial = n.initial().expect("merge implies nonempty automaton");

    // incoming transitions from outside the component, in declaration order
    let ext: Vec<(StateId, LetterId, StateId)> = n
        .transitions()
        .filter(|&(s, _, t)| !in_comp(s) && in_comp(t))
        .collect();
    let extra = usize::from(in_comp(initial));
    let copies = ext.len() + extra;
    if copies < 2 {
        // splitting cannot make progress here
        return Err(ConstructError::BudgetExceeded);
    }

    let mut taken: HashSet<String> = n
        .states()
        .filter(|&s| !in_comp(s))
        .map(|s| n.state_name(s).to_string())
        .collect();
    let mut names: Vec<String> = Vec::new();
    let mut finals: Vec<bool> = Vec::new();
    let mut outer_index: HashMap<usize, usize> = HashMap::new();
    for s in n.states().filter(|&s| !in_comp(s)) {
        outer_index.insert(s.0, names.len());
        names.push(n.state_name(s).to_string());
        finals.push(n.is_final(s));
    }
    // copies are laid out copy-major after the untouched states
    let mut copy_index: HashMap<(usize, usize), usize> = HashMap::new();
    for i in 0..copies {
        for &c in &comp {
            let name = fresh_name(&format!("{}~{}", n.state_name(c), i), &taken);
            taken.insert(name.clone());
            copy_index.insert((c.0, i), names.len());
            names.push(name);
            finals.push(n.is_final(c));
        }
    }

    let copy_for_ext = |pos: usize| extra + pos;
    let mut delta = vec![vec![None; n.letter_count()]; names.len()];
    for (s, a, t) in n.transitions() {
        match (in_comp(s), in_comp(t)) {
            (false, false) => {
                delta[outer_index[&s.0]][a.0] = Some(StateId(outer_index[&t.0]));
            }
            (false, true) => {
                let pos = ext
                    .iter()
                    .position(|&(es, ea, et)| (es, ea, et) == (s, a, t))
                    .expect("external incoming transition");
                delta[outer_index[&s.0]][a.0] =
                    Some(StateId(copy_index[&(t.0, copy_for_ext(pos))]));
            }
            (true, true) => {
                for i in 0..copies {
                    delta[copy_index[&(s.0, i)]][a.0] = Some(StateId(copy_index[&(t.0, i)]));
                }
            }
            (true, false) => {
                for i in 0..copies {
                    delta[copy_index[&(s.0, i)]][a.0] = Some(StateId(outer_index[&t.0]));
                }
            }
        }
    }
    let new_initial = if in_comp(initial) {
        StateId(copy_index[&(initial.0, 0)])
    } else {
        StateId(outer_index[&initial.0])
    };
    Ok(
        PartialDfa::from_parts(names, n.alphabet().to_vec(), Some(new_initial), finals, delta)
            .trim(),
    )
}

/// Best-effort construction of a trim reversible recognizer of the language of
/// `m` by repeatedly splitting merge targets, up to `budget` states. The
/// result is verified trim, reversible and equivalent; the shape is not
/// pinned. Fails with [`ConstructError::NotReversibleLanguage`] when no
/// reversible recognizer exists at all.
pub fn make_reversible(m: &PartialDfa, budget: usize) -> Result<PartialDfa, ConstructError> {
    let m = minimize(m);
    if m.is_empty() {
        return Ok(m);
    }
    if forbidden_pattern(&m)
        .expect("minimized input")
        .is_some()
    {
        return Err(ConstructError::NotReversibleLanguage);
    }
    let mut n = m.clone();
    loop {
        if n.is_reversible() {
            if !(n.is_trim() && equivalent(&n, &m)) {
                return Err(ConstructError::VerificationFailed(
                    "splitting changed the language".into(),
                ));
            }
            return Ok(n);
        }
        if n.state_count() > budget {
            return Err(ConstructError::BudgetExceeded);
        }
        n = split_once(&n)?;
    }
}

fn default_budget(m: &PartialDfa) -> usize {
    (4 * m.state_count()).max(16)
}

/// Runs the whole construction: annotate a reversible base recognizer, blow
/// the witness loop up to a prime cycle, rewire the chain threads, and reduce.
/// The result is a reduced reversible recognizer with at least `k` states.
///
/// `base` may supply the reversible recognizer to start from (it must be
/// reversible and equivalent); otherwise one is built with [`make_reversible`].
pub fn blowup_pipeline(
    input: &PartialDfa,
    k: usize,
    base: Option<&PartialDfa>,
) -> Result<BlowupReport, ConstructError> {
    if !is_prime(k) {
        return Err(ConstructError::NotPrime);
    }
    let m = minimize(input);
    let verdict = decide_minimal(&m).expect("minimized input");
    let witness = match verdict {
        FinitenessVerdict::Infinite { witness } => witness,
        _ => return Err(ConstructError::NotInfiniteCase),
    };
    let base = match base {
        Some(b) => {
            let b = b.trim();
            if !b.is_reversible() {
                return Err(ConstructError::NotReversibleBase);
            }
            if !equivalent(&b, &m) {
                return Err(ConstructError::NotEquivalent);
            }
            b
        }
        None => make_reversible(&m, default_budget(&m))?,
    };
    let annotated = annotate(&base, &m)?;
    let (q, a, rest) = find_cycle(&annotated, &m, witness.loop_state)?;
    let blown = cycle_blowup(&annotated, q, a, k)?;
    let mut word = vec![a];
    word.extend(rest);
    let cycle = LoopCycle {
        states: blown.cycle_states.clone(),
        word,
    };
    let (rewired, pattern) = rewire(&blown.automaton, &m, &witness, &cycle)?;
    let (reduced, map) = reduce_reversible_with_map(&rewired).map_err(|e| match e {
        CongruenceError::NotReversibleHost => ConstructError::NotReversibleBase,
        other => ConstructError::VerificationFailed(other.to_string()),
    })?;

    if !reduced.is_reversible() || !reduced.is_trim() {
        return Err(ConstructError::VerificationFailed(
            "reduced result is not a trim reversible automaton".into(),
        ));
    }
    if !equivalent(&reduced, &m) {
        return Err(ConstructError::VerificationFailed(
            "reduction changed the language".into(),
        ));
    }
    if reduced.state_count() < k {
        return Err(ConstructError::VerificationFailed(format!(
            "reduced result has {} states, expected at least {k}",
            reduced.state_count()
        )));
    }
    let cycle_images: HashSet<usize> = pattern
        .cycle_states
        .iter()
        .map(|&s| map[s.0].0)
        .collect();
    if cycle_images.len() != k {
        return Err(ConstructError::VerificationFailed(
            "reduction collapsed cycle states".into(),
        ));
    }
    Ok(BlowupReport {
        base,
        annotated,
        blown: blown.automaton,
        rewired,
        reduced,
        pattern,
        prime: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::isomorphic;
    use crate::testutil::*;

    #[test]
    fn annotate_duplicates_every_finite_plus_class() {
        let n = n_run();
        let m = m_run();
        let out = annotate(&n, &m).unwrap();
        assert_eq!(out.state_count(), 11);
        assert!(out.is_reversible());
        assert!(equivalent(&out, &n));
        let star = star_map(&out, &m).unwrap();
        let count = |name: &str| {
            let s = m.state_index(name).unwrap();
            star.iter().filter(|&&img| img == s).count()
        };
        assert_eq!(count("q2"), 2); // reached by b and d
        assert_eq!(count("q4"), 4); // reached by aa, bb, db, ca
        assert_eq!(count("q5"), 2);
        assert_eq!(count("q0"), 1);
    }

    #[test]
    fn annotate_is_identity_without_finite_states() {
        let out = annotate(&m_star(), &m_star()).unwrap();
        assert!(isomorphic(&out, &m_star()));
        assert_eq!(out.state_count(), 1);
    }

    #[test]
    fn annotate_splits_the_shared_final() {
        let out = annotate(&m_fin(), &m_fin()).unwrap();
        assert_eq!(out.state_count(), 3); // initial plus one copy per word
        assert!(out.is_reversible());
        assert!(equivalent(&out, &m_fin()));
    }

    #[test]
    fn find_cycle_on_the_annotated_fixture() {
        let n = annotate(&n_run(), &m_run()).unwrap();
        let m = m_run();
        let p0 = m.state_index("q5").unwrap();
        let (q, a, rest) = find_cycle(&n, &m, p0).unwrap();
        assert_eq!(n.state_name(q), "q5,b");
        assert_eq!(n.letter_name(a), "b");
        assert!(rest.is_empty());
    }

    #[test]
    fn find_cycle_on_the_single_loop() {
        let m = m_star();
        let (q, a, rest) = find_cycle(&m, &m, StateId(0)).unwrap();
        assert_eq!(q, StateId(0));
        assert_eq!(m.letter_name(a), "a");
        assert!(rest.is_empty());
    }

    #[test]
    fn find_cycle_rejects_states_off_nontrivial_sccs() {
        let m = m_fin();
        let f = m.state_index("f").unwrap();
        assert_eq!(find_cycle(&m, &m, f), Err(ConstructError::NoSuchState));
    }

    #[test]
    fn blowup_of_the_single_loop_is_a_cycle() {
        let m = m_star();
        let a = m.letter_index("a").unwrap();
        let blown = cycle_blowup(&m, StateId(0), a, 3).unwrap();
        assert_eq!(blown.automaton.state_count(), 3);
        assert!(blown.automaton.is_reversible());
        assert!(equivalent(&blown.automaton, &m));
        assert_eq!(blown.cycle_states.len(), 3);
        // every copy is final and the a-steps advance the cycle
        for (i, &c) in blown.cycle_states.iter().enumerate() {
            assert!(blown.automaton.is_final(c));
            let next = blown.cycle_states[(i + 1) % 3];
            assert_eq!(blown.automaton.step(c, LetterId(0)), Some(next));
        }
    }

    #[test]
    fn blowup_rejects_composite_lengths() {
        let m = m_star();
        let a = m.letter_index("a").unwrap();
        assert_eq!(
            cycle_blowup(&m, StateId(0), a, 4).unwrap_err(),
            ConstructError::NotPrime
        );
        assert_eq!(
            cycle_blowup(&m, StateId(0), a, 1).unwrap_err(),
            ConstructError::NotPrime
        );
    }

    #[test]
    fn blowup_rejects_undefined_transitions() {
        let m = m_fin();
        let f = m.state_index("f").unwrap();
        let a = m.letter_index("a").unwrap();
        assert_eq!(
            cycle_blowup(&m, f, a, 3).unwrap_err(),
            ConstructError::UndefinedTransition
        );
    }

    #[test]
    fn blowup_of_annotated_fixture_has_fifteen_states() {
        let n = annotate(&n_run(), &m_run()).unwrap();
        let q = n.state_index("q5,b").unwrap();
        let b = n.letter_index("b").unwrap();
        let blown = cycle_blowup(&n, q, b, 5).unwrap();
        assert_eq!(blown.automaton.state_count(), 15);
        assert!(blown.automaton.is_reversible());
        assert!(equivalent(&blown.automaton, &n));
    }

    #[test]
    fn pipeline_reproduces_growing_recognizers() {
        let report = blowup_pipeline(&m_run(), 5, Some(&n_run())).unwrap();
        assert_eq!(report.prime, 5);
        assert!(report.reduced.state_count() >= 5);
        assert!(report.reduced.is_reversible());
        assert!(equivalent(&report.reduced, &m_run()));
        assert!(check_pattern(&report.rewired, &report.pattern).holds());
    }

    #[test]
    fn pipeline_without_base_builds_one() {
        let report = blowup_pipeline(&m_ab(), 3, None).unwrap();
        assert!(report.reduced.state_count() >= 3);
        assert!(equivalent(&report.reduced, &m_ab()));
        assert!(report.base.is_reversible());
    }

    #[test]
    fn pipeline_rejects_finite_languages_and_composites() {
        assert_eq!(
            blowup_pipeline(&m_star(), 5, None).unwrap_err(),
            ConstructError::NotInfiniteCase
        );
        assert_eq!(
            blowup_pipeline(&m_run(), 6, None).unwrap_err(),
            ConstructError::NotPrime
        );
    }

    #[test]
    fn pipeline_rejects_bad_bases() {
        assert_eq!(
            blowup_pipeline(&m_run(), 5, Some(&m_run())).unwrap_err(),
            ConstructError::NotReversibleBase
        );
        assert_eq!(
            blowup_pipeline(&m_run(), 5, Some(&ab_split())).unwrap_err(),
            ConstructError::NotEquivalent
        );
    }

    #[test]
    fn tampered_patterns_are_rejected() {
        let report = blowup_pipeline(&m_run(), 3, Some(&n_run())).unwrap();
        let mut zero_offset = report.pattern.clone();
        zero_offset.offset = 0;
        zero_offset.thread_b[0] = report.pattern.cycle_states[0];
        assert!(!check_pattern(&report.rewired, &zero_offset).holds());

        let mut short_cycle = report.pattern.clone();
        short_cycle.cycle_states.push(short_cycle.cycle_states[0]);
        assert!(!check_pattern(&report.rewired, &short_cycle).holds());
    }

    #[test]
    fn make_reversible_splits_the_running_fixture() {
        let out = make_reversible(&m_run(), 16).unwrap();
        assert!(out.is_reversible());
        assert!(equivalent(&out, &m_run()));
        assert!(out.state_count() <= 16);
    }

    #[test]
    fn make_reversible_keeps_reversible_inputs() {
        assert_eq!(make_reversible(&m_fin(), 8).unwrap(), m_fin());
        assert_eq!(make_reversible(&m_star(), 8).unwrap(), m_star());
    }

    #[test]
    fn make_reversible_builds_the_split_recognizer() {
        let out = make_reversible(&m_ab(), 8).unwrap();
        assert!(isomorphic(&out, &ab_split()));
    }

    #[test]
    fn make_reversible_rejects_irreversible_languages() {
        assert_eq!(
            make_reversible(&m_loop(), 8).unwrap_err(),
            ConstructError::NotReversibleLanguage
        );
    }
}

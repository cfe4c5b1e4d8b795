//! Congruences of partial DFAs, reversible congruences, factor automata, and
//! the reduction of reversible automata.
//!
//! A partition of the state set is a congruence when the final-state set is
//! saturated (blocks never mix final and non-final states) and the partition
//! is compatible with the action: states of one block agree on which letters
//! are defined, and a block's images under a letter stay inside one block. A
//! congruence of a reversible automaton is reversible when the factor
//! automaton is reversible again — no two distinct blocks may map into the
//! same block under the same letter. A trim reversible automaton with no
//! nontrivial reversible congruence is reduced.

use crate::analysis::classify;
use crate::automaton::{PartialDfa, StateId};
use crate::minimize::{equivalence_classes, star_map, StarMapError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("blocks do not partition the state set")]
    NotAPartition,
    #[error("host automaton must be trim and reversible")]
    NotReversibleHost,
    #[error("partition is not a congruence")]
    NotACongruence,
    #[error("automata recognize different languages")]
    NotEquivalent,
    #[error("automaton is not minimal")]
    NotMinimal,
    #[error("seed states must be distinct")]
    IdenticalSeeds,
}

/// A partition of a host automaton's states. Blocks are kept sorted by their
/// least member, states inside a block in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
}

impl Congruence {
    /// Builds a partition from blocks, validating that they cover every state
    /// of `n` exactly once.
    pub fn from_blocks(
        n: &PartialDfa,
        blocks: Vec<Vec<StateId>>,
    ) -> Result<Congruence, CongruenceError> {
        let count = n.state_count();
        let mut block_of = vec![usize::MAX; count];
        let mut blocks: Vec<Vec<StateId>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_by_key(|b| b.first().copied());
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(CongruenceError::NotAPartition);
            }
            for &s in block {
                if s.0 >= count || block_of[s.0] != usize::MAX {
                    return Err(CongruenceError::NotAPartition);
                }
                block_of[s.0] = i;
            }
        }
        if block_of.iter().any(|&b| b == usize::MAX) {
            return Err(CongruenceError::NotAPartition);
        }
        Ok(Congruence { blocks, block_of })
    }

    /// The trivial partition: every state in its own block.
    pub fn identity(n: &PartialDfa) -> Congruence {
        Congruence {
            blocks: n.states().map(|s| vec![s]).collect(),
            block_of: (0..n.state_count()).collect(),
        }
    }

    pub(crate) fn from_block_ids(ids: &[usize]) -> Congruence {
        let mut groups: std::collections::BTreeMap<usize, Vec<StateId>> = Default::default();
        for (s, &id) in ids.iter().enumerate() {
            groups.entry(id).or_default().push(StateId(s));
        }
        let mut blocks: Vec<Vec<StateId>> = groups.into_values().collect();
        blocks.sort_by_key(|b| b.first().copied());
        let mut block_of = vec![0usize; ids.len()];
        for (i, block) in blocks.iter().enumerate() {
            for &s in block {
                block_of[s.0] = i;
            }
        }
        Congruence { blocks, block_of }
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn block_of(&self, s: StateId) -> usize {
        self.block_of[s.0]
    }

    pub fn state_count(&self) -> usize {
        self.block_of.len()
    }

    /// True iff every block is a singleton.
    pub fn is_trivial(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn same_block(&self, p: StateId, q: StateId) -> bool {
        self.block_of[p.0] == self.block_of[q.0]
    }
}

fn check_host(n: &PartialDfa) -> Result<(), CongruenceError> {
    if n.is_trim() && n.is_reversible() {
        Ok(())
    } else {
        Err(CongruenceError::NotReversibleHost)
    }
}

/// True iff the partition is a congruence of `n`: finals saturated, block
/// members agree on definedness, blocks respected under every letter.
pub fn is_congruence(n: &PartialDfa, part: &Congruence) -> Result<bool, CongruenceError> {
    if part.state_count() != n.state_count() {
        return Err(CongruenceError::NotAPartition);
    }
    for block in part.blocks() {
        let rep = block[0];
        if block.iter().any(|&s| n.is_final(s) != n.is_final(rep)) {
            return Ok(false);
        }
        for a in n.letters() {
            let target = n.step(rep, a).map(|t| part.block_of(t));
            for &s in block {
                if n.step(s, a).map(|t| part.block_of(t)) != target {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// True iff the partition is a congruence whose factor automaton is still
/// reversible: no two distinct blocks map into the same block under one letter.
pub fn is_reversible_congruence(
    n: &PartialDfa,
    part: &Congruence,
) -> Result<bool, CongruenceError> {
    check_host(n)?;
    if !is_congruence(n, part)? {
        return Ok(false);
    }
    for a in n.letters() {
        let mut source_of = vec![None; part.blocks().len()];
        for block in part.blocks() {
            let rep = block[0];
            if let Some(t) = n.step(rep, a) {
                let tb = part.block_of(t);
                let sb = part.block_of(rep);
                match source_of[tb] {
                    None => source_of[tb] = Some(sb),
                    Some(other) if other != sb => return Ok(false),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(true)
}

/// The quotient of `n` by a congruence. Block states are named after their
/// least-declared member.
pub fn factor(n: &PartialDfa, part: &Congruence) -> Result<PartialDfa, CongruenceError> {
    if !is_congruence(n, part)? {
        return Err(CongruenceError::NotACongruence);
    }
    let states: Vec<String> = part
        .blocks()
        .iter()
        .map(|b| n.state_name(b[0]).to_string())
        .collect();
    let finals: Vec<bool> = part.blocks().iter().map(|b| n.is_final(b[0])).collect();
    let delta = part
        .blocks()
        .iter()
        .map(|b| {
            n.letters()
                .map(|a| n.step(b[0], a).map(|t| StateId(part.block_of(t))))
                .collect()
        })
        .collect();
    let initial = n.initial().map(|q| StateId(part.block_of(q)));
    Ok(PartialDfa::from_parts(
        states,
        n.alphabet().to_vec(),
        initial,
        finals,
        delta,
    ))
}

fn map_star_err(e: StarMapError) -> CongruenceError {
    match e {
        StarMapError::NotEquivalent => CongruenceError::NotEquivalent,
        StarMapError::NotMinimal => CongruenceError::NotMinimal,
        StarMapError::NotTrim => CongruenceError::NotReversibleHost,
    }
}

/// The partition of `n` grouping states whose image in the minimal automaton
/// `m` is one common zig-zag state; everything else stays singleton. When all
/// zig-zag states of `m` are reversible this is a reversible congruence.
pub fn zigzag_collapse(n: &PartialDfa, m: &PartialDfa) -> Result<Congruence, CongruenceError> {
    check_host(n)?;
    let star = star_map(n, m).map_err(map_star_err)?;
    let analysis = classify(m).map_err(|_| CongruenceError::NotMinimal)?;
    // group ids: shared id per zig-zag image, unique id otherwise
    let offset = m.state_count();
    let ids: Vec<usize> = n
        .states()
        .map(|s| {
            let img = star[s.0];
            if analysis.is_zigzag(img) {
                img.0
            } else {
                offset + s.0
            }
        })
        .collect();
    Ok(Congruence::from_block_ids(&ids))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let root = self.find(self.0[x]);
            self.0[x] = root;
        }
        self.0[x]
    }

    /// Returns true when the two elements were in different sets.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }
}

/// Least block-merge closure containing `{p, q}` that could be a reversible
/// congruence: blocks are closed forward (both successors of one block under
/// a letter unify) and backward (sources mapping into one block under the same
/// letter unify). Returns `None` as soon as the closure hits a definedness
/// mismatch, mixes final with non-final states, or unifies inequivalent
/// states — then no reversible congruence of `n` merges `p` and `q`.
pub fn closure_from_pair(
    n: &PartialDfa,
    p: StateId,
    q: StateId,
) -> Result<Option<Congruence>, CongruenceError> {
    check_host(n)?;
    if p == q {
        return Err(CongruenceError::IdenticalSeeds);
    }
    let (classes, _) = equivalence_classes(n);
    let count = n.state_count();
    let mut uf = UnionFind::new(count);
    uf.union(p.0, q.0);
    loop {
        let mut changed = false;
        // forward closure and consistency checks, block by block
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for s in 0..count {
            let root = uf.find(s);
            members[root].push(s);
        }
        for block in members.iter().filter(|b| b.len() > 1) {
            let rep = block[0];
            for &s in &block[1..] {
                if n.is_final(StateId(s)) != n.is_final(StateId(rep)) {
                    return Ok(None);
                }
                if classes[s] != classes[rep] {
                    return Ok(None);
                }
            }
            for a in n.letters() {
                let mut first: Option<usize> = None;
                for &s in block {
                    match (n.step(StateId(s), a), first) {
                        (Some(t), None) => first = Some(t.0),
                        (Some(t), Some(f)) => changed |= uf.union(f, t.0),
                        (None, None) => {}
                        (None, Some(_)) => {}
                    }
                }
                // definedness must agree across the block
                let defined = block
                    .iter()
                    .map(|&s| n.step(StateId(s), a).is_some())
                    .collect::<Vec<_>>();
                if defined.iter().any(|&d| d) && !defined.iter().all(|&d| d) {
                    return Ok(None);
                }
            }
        }
        // backward closure: same letter into one block forces sources together
        for a in n.letters() {
            let mut source_of: Vec<Option<usize>> = vec![None; count];
            for s in n.states() {
                if let Some(t) = n.step(s, a) {
                    let tb = uf.find(t.0);
                    match source_of[tb] {
                        None => source_of[tb] = Some(s.0),
                        Some(other) => changed |= uf.union(other, s.0),
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let ids: Vec<usize> = (0..count).map(|s| uf.find(s)).collect();
    let congruence = Congruence::from_block_ids(&ids);
    debug_assert_eq!(is_reversible_congruence(n, &congruence), Ok(true));
    Ok(Some(congruence))
}

/// Finds a nontrivial reversible congruence of a trim reversible automaton, or
/// `None` when `n` is reduced. Seed pairs are scanned in declaration order and
/// restricted to language-equivalent states, since congruent states are
/// always equivalent.
pub fn find_nontrivial_reversible_congruence(
    n: &PartialDfa,
) -> Result<Option<Congruence>, CongruenceError> {
    check_host(n)?;
    let (classes, _) = equivalence_classes(n);
    for p in 0..n.state_count() {
        for q in (p + 1)..n.state_count() {
            if classes[p] != classes[q] {
                continue;
            }
            if let Some(c) = closure_from_pair(n, StateId(p), StateId(q))? {
                debug_assert!(!c.is_trivial());
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// Factors `n` by nontrivial reversible congruences until none exists. The
/// result is the reduced reversible automaton this process converges to.
pub fn reduce_reversible(n: &PartialDfa) -> Result<PartialDfa, CongruenceError> {
    Ok(reduce_reversible_with_map(n)?.0)
}

/// Like [`reduce_reversible`], also returning for every state of `n` the state
/// of the reduced automaton its class collapses to.
pub fn reduce_reversible_with_map(
    n: &PartialDfa,
) -> Result<(PartialDfa, Vec<StateId>), CongruenceError> {
    check_host(n)?;
    let mut cur = n.clone();
    let mut map: Vec<StateId> = n.states().collect();
    while let Some(part) = find_nontrivial_reversible_congruence(&cur)? {
        let next = factor(&cur, &part)?;
        debug_assert!(next.state_count() < cur.state_count());
        for slot in map.iter_mut() {
            *slot = StateId(part.block_of(*slot));
        }
        cur = next;
    }
    debug_assert!(cur.is_trim());
    Ok((cur, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::isomorphic;
    use crate::minimize::equivalent;
    use crate::testutil::*;

    fn blocks_by_name(n: &PartialDfa, groups: &[&[&str]]) -> Congruence {
        let mut blocks: Vec<Vec<StateId>> = groups
            .iter()
            .map(|g| g.iter().map(|s| n.state_index(s).unwrap()).collect())
            .collect();
        let mut covered: Vec<StateId> = blocks.iter().flatten().copied().collect();
        covered.sort_unstable();
        for s in n.states() {
            if !covered.contains(&s) {
                blocks.push(vec![s]);
            }
        }
        Congruence::from_blocks(n, blocks).unwrap()
    }

    #[test]
    fn merged_split_finals_form_a_congruence() {
        let n = n_run();
        let part = blocks_by_name(&n, &[&["q4", "q4'"]]);
        assert_eq!(is_congruence(&n, &part), Ok(true));
    }

    #[test]
    fn saturation_failure_is_not_a_congruence() {
        let n = n_run();
        let part = blocks_by_name(&n, &[&["q1", "q3"]]); // q1 non-final, q3 final
        assert_eq!(is_congruence(&n, &part), Ok(false));
    }

    #[test]
    fn identity_is_always_a_congruence() {
        for n in [n_run(), m_run(), m_ab(), m_star()] {
            assert_eq!(is_congruence(&n, &Congruence::identity(&n)), Ok(true));
        }
    }

    #[test]
    fn merged_finals_are_not_a_reversible_congruence() {
        let n = n_run();
        let part = blocks_by_name(&n, &[&["q4", "q4'"]]);
        // the factor re-creates the shared a-target of q1 and q3
        assert_eq!(is_reversible_congruence(&n, &part), Ok(false));
    }

    #[test]
    fn collapsing_the_two_cycle_is_reversible() {
        let n = two_cycle();
        let part = blocks_by_name(&n, &[&["c0", "c1"]]);
        assert_eq!(is_reversible_congruence(&n, &part), Ok(true));
    }

    #[test]
    fn identity_is_reversible_on_reversible_hosts() {
        for n in [n_run(), m_star(), ab_split(), ab_swap()] {
            assert_eq!(
                is_reversible_congruence(&n, &Congruence::identity(&n)),
                Ok(true)
            );
        }
    }

    #[test]
    fn irreversible_hosts_are_rejected() {
        let part = Congruence::identity(&m_run());
        assert_eq!(
            is_reversible_congruence(&m_run(), &part),
            Err(CongruenceError::NotReversibleHost)
        );
    }

    #[test]
    fn factor_merges_split_finals_onto_the_minimal_automaton() {
        let n = n_run();
        let part = blocks_by_name(&n, &[&["q4", "q4'"]]);
        let f = factor(&n, &part).unwrap();
        assert!(isomorphic(&f, &m_run()));
        assert!(equivalent(&n, &f));
    }

    #[test]
    fn factor_by_identity_is_the_automaton_itself() {
        let n = n_run();
        let f = factor(&n, &Congruence::identity(&n)).unwrap();
        assert!(isomorphic(&f, &n));
    }

    #[test]
    fn factor_of_two_cycle_is_the_single_loop() {
        let n = two_cycle();
        let part = blocks_by_name(&n, &[&["c0", "c1"]]);
        assert!(isomorphic(&factor(&n, &part).unwrap(), &m_star()));
    }

    #[test]
    fn factor_rejects_non_congruences() {
        let n = n_run();
        let part = blocks_by_name(&n, &[&["q1", "q3"]]);
        assert_eq!(factor(&n, &part), Err(CongruenceError::NotACongruence));
    }

    #[test]
    fn zigzag_collapse_merges_cycle_onto_star() {
        let n = two_cycle();
        let part = zigzag_collapse(&n, &m_star()).unwrap();
        assert_eq!(part.blocks().len(), 1);
        assert_eq!(is_reversible_congruence(&n, &part), Ok(true));
    }

    #[test]
    fn zigzag_collapse_on_split_finals_is_not_reversible() {
        let n = n_run();
        let part = zigzag_collapse(&n, &m_run()).unwrap();
        let q4 = n.state_index("q4").unwrap();
        let q4p = n.state_index("q4'").unwrap();
        assert!(part.same_block(q4, q4p));
        assert_eq!(part.blocks().len(), 6);
        assert_eq!(is_congruence(&n, &part), Ok(true));
        // q4's image is an irreversible zig-zag state, so reversibility fails
        assert_eq!(is_reversible_congruence(&n, &part), Ok(false));
    }

    #[test]
    fn zigzag_collapse_without_infinite_states_is_trivial() {
        let n = m_fin();
        let part = zigzag_collapse(&n, &m_fin()).unwrap();
        assert!(part.is_trivial());
    }

    #[test]
    fn closure_rejects_the_split_final_pair() {
        let n = n_run();
        let p = n.state_index("q4").unwrap();
        let q = n.state_index("q4'").unwrap();
        // the backward rule forces q1 together with q3, breaking saturation
        assert_eq!(closure_from_pair(&n, p, q), Ok(None));
    }

    #[test]
    fn closure_collapses_the_two_cycle() {
        let n = two_cycle();
        let c = closure_from_pair(&n, StateId(0), StateId(1)).unwrap().unwrap();
        assert_eq!(c.blocks().len(), 1);
    }

    #[test]
    fn closure_fails_on_the_swap_recognizer() {
        let n = ab_swap();
        let p = n.state_index("q").unwrap();
        let q = n.state_index("q'").unwrap();
        assert_eq!(closure_from_pair(&n, p, q), Ok(None));
    }

    #[test]
    fn reducedness_of_fixture_recognizers() {
        assert!(find_nontrivial_reversible_congruence(&ab_split())
            .unwrap()
            .is_none());
        assert!(find_nontrivial_reversible_congruence(&ab_swap())
            .unwrap()
            .is_none());
        assert!(find_nontrivial_reversible_congruence(&m_star())
            .unwrap()
            .is_none());
        let c = find_nontrivial_reversible_congruence(&split_fin())
            .unwrap()
            .unwrap();
        let n = split_fin();
        assert!(c.same_block(
            n.state_index("f1").unwrap(),
            n.state_index("f2").unwrap()
        ));
    }

    #[test]
    fn reduce_collapses_the_five_cycle() {
        let n = crate::parse_dfa(
            "alphabet: a\nstates: c0 c1 c2 c3 c4\ninitial: c0\nfinal: c0 c1 c2 c3 c4\n\
             c0 a c1\nc1 a c2\nc2 a c3\nc3 a c4\nc4 a c0\n",
        )
        .unwrap();
        let reduced = reduce_reversible(&n).unwrap();
        assert!(isomorphic(&reduced, &m_star()));
    }

    #[test]
    fn reduce_of_split_fin_and_fixed_points() {
        assert!(isomorphic(&reduce_reversible(&split_fin()).unwrap(), &m_fin()));
        assert!(isomorphic(&reduce_reversible(&ab_split()).unwrap(), &ab_split()));
    }

    #[test]
    fn reduce_map_tracks_collapsed_states() {
        let n = split_fin();
        let (reduced, map) = reduce_reversible_with_map(&n).unwrap();
        assert_eq!(reduced.state_count(), 2);
        let f1 = n.state_index("f1").unwrap();
        let f2 = n.state_index("f2").unwrap();
        assert_eq!(map[f1.0], map[f2.0]);
        assert_ne!(map[n.state_index("q0").unwrap().0], map[f1.0]);
    }

    #[test]
    fn factor_preserves_language_of_closure_results() {
        let n = split_fin();
        let c = find_nontrivial_reversible_congruence(&n).unwrap().unwrap();
        let f = factor(&n, &c).unwrap();
        assert!(equivalent(&n, &f));
        assert!(f.is_reversible());
    }
}

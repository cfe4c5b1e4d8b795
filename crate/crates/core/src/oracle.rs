//! Brute-force ground truth at desk scale: enumerate all trim reversible
//! recognizers of a language up to a state bound, one per isomorphism class,
//! filter the reduced ones, and cross-check the finiteness decision.
//!
//! Enumeration searches coverings of the minimal automaton: every state of a
//! trim recognizer is equivalent to a unique state of the minimal automaton,
//! the map commutes with transitions, and definedness lifts both ways. New
//! states are introduced in BFS slot order, so each isomorphism class is
//! generated exactly once; reversibility (at most one predecessor per letter)
//! prunes during generation.

use crate::analysis::{decide_minimal, FinitenessVerdict};
use crate::automaton::{LetterId, PartialDfa, StateId};
use crate::canonical::{canonical_form, CanonicalDfa};
use crate::congruence::find_nontrivial_reversible_congruence;
use crate::construct::{blowup_pipeline, is_prime};
use crate::minimize::minimize;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Caps keeping enumeration runtimes in minutes; override via the `_with`
/// function variants.
#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    pub state_cap: usize,
    pub alphabet_cap: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            state_cap: 6,
            alphabet_cap: 3,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("requested {requested} states exceeds the cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("alphabet of {letters} letters exceeds the cap of {cap}")]
    AlphabetCapExceeded { letters: usize, cap: usize },
    #[error("crosscheck assertion failed: {0}")]
    AssertionFailed(String),
}

/// Summary of one cross-check run, serializable as JSON.
#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckReport {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    /// Number of reduced recognizer classes per state count.
    pub sizes: BTreeMap<usize, usize>,
    /// Canonical serializations of the reduced recognizer classes found.
    pub witnesses: Vec<String>,
}

impl CrosscheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Search<'a> {
    m: &'a PartialDfa,
    letters: Vec<LetterId>,
    max_states: usize,
    image: Vec<StateId>,
    delta: Vec<Vec<Option<usize>>>,
    pred_used: Vec<Vec<bool>>,
    found: Vec<PartialDfa>,
}

impl<'a> Search<'a> {
    fn next_slot(&self) -> Option<(usize, usize)> {
        for s in 0..self.image.len() {
            for (li, &l) in self.letters.iter().enumerate() {
                if self.delta[s][li].is_none() && self.m.step(self.image[s], l).is_some() {
                    return Some((s, li));
                }
            }
        }
        None
    }

    fn emit(&mut self) {
        let n = self.image.len();
        let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let finals: Vec<bool> = self.image.iter().map(|&img| self.m.is_final(img)).collect();
        let delta: Vec<Vec<Option<StateId>>> = self
            .delta
            .iter()
            .map(|row| row.iter().map(|t| t.map(StateId)).collect())
            .collect();
        let dfa = PartialDfa::from_parts(
            states,
            self.m.alphabet().to_vec(),
            Some(StateId(0)),
            finals,
            delta,
        );
        debug_assert!(dfa.is_trim() && dfa.is_reversible());
        self.found.push(dfa);
    }

    fn run(&mut self) {
        let Some((s, li)) = self.next_slot() else {
            self.emit();
            return;
        };
        let target_image = self
            .m
            .step(self.image[s], self.letters[li])
            .expect("slot has a defined image transition");
        for j in 0..self.image.len() {
            if self.image[j] == target_image && !self.pred_used[li][j] {
                self.delta[s][li] = Some(j);
                self.pred_used[li][j] = true;
                self.run();
                self.pred_used[li][j] = false;
                self.delta[s][li] = None;
            }
        }
        if self.image.len() < self.max_states {
            let j = self.image.len();
            self.image.push(target_image);
            self.delta.push(vec![None; self.letters.len()]);
            for row in self.pred_used.iter_mut() {
                row.push(false);
            }
            self.delta[s][li] = Some(j);
            self.pred_used[li][j] = true;
            self.run();
            self.pred_used[li][j] = false;
            self.delta[s][li] = None;
            self.image.pop();
            self.delta.pop();
            for row in self.pred_used.iter_mut() {
                row.pop();
            }
        }
    }
}

fn check_limits(
    m: &PartialDfa,
    max_states: usize,
    limits: &OracleLimits,
) -> Result<(), OracleError> {
    if max_states > limits.state_cap {
        return Err(OracleError::CapExceeded {
            requested: max_states,
            cap: limits.state_cap,
        });
    }
    if m.letter_count() > limits.alphabet_cap {
        return Err(OracleError::AlphabetCapExceeded {
            letters: m.letter_count(),
            cap: limits.alphabet_cap,
        });
    }
    Ok(())
}

/// All trim reversible partial DFAs over the input's alphabet with at most
/// `max_states` states recognizing the same language, one per isomorphism
/// class, ordered by state count then canonical text.
pub fn enumerate_recognizers(
    m: &PartialDfa,
    max_states: usize,
) -> Result<Vec<CanonicalDfa>, OracleError> {
    enumerate_recognizers_with(m, max_states, &OracleLimits::default())
}

pub fn enumerate_recognizers_with(
    m: &PartialDfa,
    max_states: usize,
    limits: &OracleLimits,
) -> Result<Vec<CanonicalDfa>, OracleError> {
    check_limits(m, max_states, limits)?;
    let m = minimize(m);
    if m.is_empty() {
        return Ok(vec![canonical_form(&m)]);
    }
    if max_states == 0 {
        return Ok(Vec::new());
    }
    let init = m.initial().expect("nonempty minimal automaton");
    let letters: Vec<LetterId> = m.letters().collect();
    let mut search = Search {
        m: &m,
        pred_used: vec![vec![false; 1]; letters.len()],
        letters,
        max_states,
        image: vec![init],
        delta: vec![vec![None; m.letter_count()]],
        found: Vec::new(),
    };
    search.run();
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<CanonicalDfa> = search
        .found
        .iter()
        .map(canonical_form)
        .filter(|c| seen.insert(c.text().to_string()))
        .collect();
    out.sort_by(|a, b| {
        (a.state_count(), a.text()).cmp(&(b.state_count(), b.text()))
    });
    Ok(out)
}

/// The subset of [`enumerate_recognizers`] with no nontrivial reversible
/// congruence: the reduced reversible recognizers.
pub fn enumerate_reduced(
    m: &PartialDfa,
    max_states: usize,
) -> Result<Vec<CanonicalDfa>, OracleError> {
    enumerate_reduced_with(m, max_states, &OracleLimits::default())
}

pub fn enumerate_reduced_with(
    m: &PartialDfa,
    max_states: usize,
    limits: &OracleLimits,
) -> Result<Vec<CanonicalDfa>, OracleError> {
    Ok(enumerate_recognizers_with(m, max_states, limits)?
        .into_iter()
        .filter(|c| {
            c.dfa().is_empty()
                || find_nontrivial_reversible_congruence(c.dfa())
                    .expect("enumerated recognizers are trim and reversible")
                    .is_none()
        })
        .collect())
}

fn next_prime_above(n: usize) -> usize {
    let mut k = n + 1;
    while !is_prime(k) {
        k += 1;
    }
    k
}

/// Cross-checks the finiteness decision against enumeration: in the finite
/// case no reduced recognizer may exceed the bound; in the infinite case
/// reduced recognizers exist and the blow-up pipeline tops every enumerated
/// one; languages without reversible recognizers admit none at all.
pub fn crosscheck(m: &PartialDfa, max_states: usize) -> Result<CrosscheckReport, OracleError> {
    crosscheck_with(m, max_states, &OracleLimits::default())
}

pub fn crosscheck_with(
    input: &PartialDfa,
    max_states: usize,
    limits: &OracleLimits,
) -> Result<CrosscheckReport, OracleError> {
    let m = minimize(input);
    let report_of = |verdict: &str, bound: Option<u64>, classes: &[CanonicalDfa]| {
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for c in classes {
            *sizes.entry(c.state_count()).or_default() += 1;
        }
        CrosscheckReport {
            verdict: verdict.to_string(),
            bound,
            sizes,
            witnesses: classes.iter().map(|c| c.text().to_string()).collect(),
        }
    };
    let verdict = decide_minimal(&m).expect("minimized input");
    match verdict {
        FinitenessVerdict::EmptyLanguage => {
            let classes = enumerate_recognizers_with(&m, max_states, limits)?;
            Ok(report_of("empty", None, &classes))
        }
        FinitenessVerdict::NotReversibleLanguage { .. } => {
            let classes = enumerate_recognizers_with(&m, max_states, limits)?;
            if !classes.is_empty() {
                return Err(OracleError::AssertionFailed(format!(
                    "language is not reversible but {} recognizers were found",
                    classes.len()
                )));
            }
            Ok(report_of("not-reversible", None, &classes))
        }
        FinitenessVerdict::Finite { bound } => {
            let reduced = enumerate_reduced_with(&m, max_states, limits)?;
            for c in &reduced {
                if c.state_count() as u64 > bound {
                    return Err(OracleError::AssertionFailed(format!(
                        "reduced recognizer with {} states exceeds the bound {bound}",
                        c.state_count()
                    )));
                }
            }
            if (max_states as u64) >= bound && reduced.is_empty() {
                return Err(OracleError::AssertionFailed(
                    "no reduced recognizer found within the bound".into(),
                ));
            }
            Ok(report_of("finite", Some(bound), &reduced))
        }
        FinitenessVerdict::Infinite { .. } => {
            let reduced = enumerate_reduced_with(&m, max_states, limits)?;
            if reduced.is_empty() {
                return Err(OracleError::AssertionFailed(
                    "infinite verdict but no reduced recognizer within the cap".into(),
                ));
            }
            let prime = next_prime_above(max_states);
            let base = reduced[0].dfa().clone();
            let report = blowup_pipeline(&m, prime, Some(&base)).map_err(|e| {
                OracleError::AssertionFailed(format!("blow-up pipeline failed: {e}"))
            })?;
            let largest = reduced
                .iter()
                .map(CanonicalDfa::state_count)
                .max()
                .unwrap_or(0);
            if report.reduced.state_count() <= largest {
                return Err(OracleError::AssertionFailed(format!(
                    "pipeline output of {} states does not exceed the enumerated {largest}",
                    report.reduced.state_count()
                )));
            }
            Ok(report_of("infinite", None, &reduced))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::isomorphic;
    use crate::minimize::equivalent;
    use crate::testutil::*;

    #[test]
    fn recognizers_of_the_finite_language() {
        let classes = enumerate_recognizers(&m_fin(), 3).unwrap();
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().any(|c| isomorphic(c.dfa(), &m_fin())));
        assert!(classes.iter().any(|c| isomorphic(c.dfa(), &split_fin())));
    }

    #[test]
    fn recognizers_of_the_star_language_are_cycles() {
        let classes = enumerate_recognizers(&m_star(), 3).unwrap();
        assert_eq!(classes.len(), 3);
        let sizes: Vec<usize> = classes.iter().map(|c| c.state_count()).collect();
        assert_eq!(sizes, [1, 2, 3]);
        assert!(isomorphic(classes[0].dfa(), &m_star()));
        assert!(isomorphic(classes[1].dfa(), &two_cycle()));
    }

    #[test]
    fn irreversible_languages_have_no_recognizers() {
        assert!(enumerate_recognizers(&m_loop(), 4).unwrap().is_empty());
    }

    #[test]
    fn every_enumerated_recognizer_is_sound() {
        for c in enumerate_recognizers(&m_ab(), 4).unwrap() {
            assert!(c.dfa().is_trim());
            assert!(c.dfa().is_reversible());
            assert!(equivalent(c.dfa(), &m_ab()));
        }
    }

    #[test]
    fn larger_caps_return_supersets() {
        let small: Vec<String> = enumerate_recognizers(&m_star(), 2)
            .unwrap()
            .iter()
            .map(|c| c.text().to_string())
            .collect();
        let large: Vec<String> = enumerate_recognizers(&m_star(), 4)
            .unwrap()
            .iter()
            .map(|c| c.text().to_string())
            .collect();
        assert!(small.iter().all(|t| large.contains(t)));
    }

    #[test]
    fn deduplication_is_sound() {
        let classes = enumerate_recognizers(&m_ab(), 4).unwrap();
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                assert!(!isomorphic(a.dfa(), b.dfa()));
            }
        }
    }

    #[test]
    fn reduced_recognizers_of_fixtures() {
        let fins = enumerate_reduced(&m_fin(), 3).unwrap();
        assert_eq!(fins.len(), 1);
        assert!(isomorphic(fins[0].dfa(), &m_fin()));

        let stars = enumerate_reduced(&m_star(), 3).unwrap();
        assert_eq!(stars.len(), 1);
        assert!(isomorphic(stars[0].dfa(), &m_star()));

        let abs = enumerate_reduced(&m_ab(), 4).unwrap();
        assert!(abs.iter().any(|c| isomorphic(c.dfa(), &ab_split())));
        assert!(abs.iter().any(|c| isomorphic(c.dfa(), &ab_swap())));
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            enumerate_recognizers(&m_star(), 7),
            Err(OracleError::CapExceeded { .. })
        ));
        let limits = OracleLimits {
            state_cap: 8,
            alphabet_cap: 3,
        };
        assert!(enumerate_recognizers_with(&m_star(), 7, &limits).is_ok());
    }

    #[test]
    fn crosscheck_of_fixture_languages() {
        let fin = crosscheck(&m_fin(), 5).unwrap();
        assert_eq!(fin.verdict, "finite");
        assert_eq!(fin.bound, Some(3));
        assert_eq!(fin.sizes.len(), 1);

        let star = crosscheck(&m_star(), 5).unwrap();
        assert_eq!(star.verdict, "finite");
        assert_eq!(star.bound, Some(1));

        let ab = crosscheck(&m_ab(), 4).unwrap();
        assert_eq!(ab.verdict, "infinite");
        assert!(ab.sizes.contains_key(&4));

        let loopy = crosscheck(&m_loop(), 4).unwrap();
        assert_eq!(loopy.verdict, "not-reversible");
        assert!(loopy.witnesses.is_empty());
    }

    #[test]
    fn crosscheck_report_serializes() {
        let report = crosscheck(&m_fin(), 3).unwrap();
        let json = report.to_json();
        assert!(json.contains("\"verdict\": \"finite\""));
        assert!(json.contains("\"bound\": 3"));
    }
}

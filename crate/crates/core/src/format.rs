//! The line-oriented automaton text format and DOT export.
//!
//! ```text
//! # comments start with '#'
//! alphabet: a b
//! states: q0 q1
//! initial: q0
//! final: q1
//! q0 a q1
//! q1 b q0
//! ```
//!
//! The four header lines come first, in this order; every following non-blank
//! line is one transition `src letter dst`. `final:` may list zero states, and
//! for the automaton of the empty language both `states:` and `initial:` are
//! empty.

use crate::automaton::{DfaError, PartialDfa};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: DfaError,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses the text format into an automaton, preserving declaration order.
pub fn parse_dfa(text: &str) -> Result<PartialDfa, ParseError> {
    // (line number, tokens) for every line that carries content
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let stripped = raw.split('#').next().unwrap_or("");
            (i + 1, stripped.split_whitespace().collect::<Vec<_>>())
        })
        .filter(|(_, toks)| !toks.is_empty());

    let mut header = |key: &str| -> Result<(usize, Vec<String>), ParseError> {
        match rows.next() {
            Some((line, toks)) if toks[0] == key => {
                Ok((line, toks[1..].iter().map(|t| t.to_string()).collect()))
            }
            Some((line, toks)) => Err(syntax(line, format!("expected `{key}`, found `{}`", toks[0]))),
            None => Err(syntax(0, format!("missing `{key}` line"))),
        }
    };

    let (alpha_line, alphabet) = header("alphabet:")?;
    let (_, states) = header("states:")?;
    let (init_line, initial_toks) = header("initial:")?;
    let (final_line, final_toks) = header("final:")?;

    let mut builder = PartialDfa::builder().letters(alphabet).states(states);
    match initial_toks.len() {
        0 => {}
        1 => builder = builder.initial(initial_toks[0].clone()),
        _ => return Err(syntax(init_line, "more than one initial state")),
    }
    builder = builder.finals(final_toks);

    let mut transition_lines = Vec::new();
    for (line, toks) in rows {
        if toks.len() != 3 {
            return Err(syntax(line, "expected `src letter dst`"));
        }
        transition_lines.push((line, toks[0].to_string(), toks[1].to_string(), toks[2].to_string()));
    }

    // Build incrementally so errors can name the offending line.
    let base = builder.clone().build().map_err(|e| {
        let line = match &e {
            DfaError::MissingInitial => init_line,
            DfaError::EmptyAlphabet => alpha_line,
            DfaError::UnknownState(_) => final_line,
            _ => alpha_line,
        };
        ParseError::Invalid { line, source: e }
    })?;
    drop(base);
    for (line, src, letter, dst) in &transition_lines {
        builder = builder.transition(src.clone(), letter.clone(), dst.clone());
        if let Err(e) = builder.clone().build() {
            return Err(ParseError::Invalid {
                line: *line,
                source: e,
            });
        }
    }
    builder
        .build()
        .map_err(|e| ParseError::Invalid { line: 0, source: e })
}

/// Serializes an automaton; `parse_dfa(serialize_dfa(d)) == d`, including
/// state and letter order.
pub fn serialize_dfa(d: &PartialDfa) -> String {
    let mut out = String::new();
    out.push_str("alphabet:");
    for a in d.letters() {
        out.push(' ');
        out.push_str(d.letter_name(a));
    }
    out.push_str("\nstates:");
    for s in d.states() {
        out.push(' ');
        out.push_str(d.state_name(s));
    }
    out.push_str("\ninitial:");
    if let Some(q) = d.initial() {
        out.push(' ');
        out.push_str(d.state_name(q));
    }
    out.push_str("\nfinal:");
    for s in d.final_states() {
        out.push(' ');
        out.push_str(d.state_name(s));
    }
    out.push('\n');
    for (s, a, t) in d.transitions() {
        out.push_str(d.state_name(s));
        out.push(' ');
        out.push_str(d.letter_name(a));
        out.push(' ');
        out.push_str(d.state_name(t));
        out.push('\n');
    }
    out
}

fn dot_escape(name: &str) -> String {
    name.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Emits a DOT digraph: final states double-circled, the initial state marked
/// with an entry arrow, everything in declaration order.
pub fn to_dot(d: &PartialDfa) -> String {
    let mut out = String::from("digraph dfa {\n  rankdir=LR;\n");
    if d.initial().is_some() {
        out.push_str("  __initial [shape=point, label=\"\"];\n");
    }
    for s in d.states() {
        let shape = if d.is_final(s) { "doublecircle" } else { "circle" };
        out.push_str(&format!(
            "  \"{}\" [shape={}];\n",
            dot_escape(d.state_name(s)),
            shape
        ));
    }
    if let Some(q) = d.initial() {
        out.push_str(&format!("  __initial -> \"{}\";\n", dot_escape(d.state_name(q))));
    }
    for (s, a, t) in d.transitions() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
            dot_escape(d.state_name(s)),
            dot_escape(d.state_name(t)),
            dot_escape(d.letter_name(a))
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{m_ab, m_run, m_star};

    #[test]
    fn parses_running_fixture() {
        let m = m_run();
        assert_eq!(m.state_count(), 6);
        assert_eq!(m.alphabet(), ["a", "b", "c", "d"]);
        assert_eq!(m.transition_count(), 9);
    }

    #[test]
    fn parses_smallest_loop() {
        let m = parse_dfa("alphabet: a\nstates: s\ninitial: s\nfinal: s\ns a s\n").unwrap();
        assert_eq!(m.state_count(), 1);
        assert!(m.accepts(&["a", "a"]));
    }

    #[test]
    fn rejects_duplicate_transition_with_line() {
        let text = "alphabet: a\nstates: q0 q1 q2\ninitial: q0\nfinal: q1\nq0 a q1\nq0 a q2\n";
        match parse_dfa(text).unwrap_err() {
            ParseError::Invalid { line, source } => {
                assert_eq!(line, 6);
                assert!(matches!(source, DfaError::NondeterministicTransition(..)));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_initial() {
        let text = "alphabet: a\nstates: q0\ninitial:\nfinal:\n";
        match parse_dfa(text).unwrap_err() {
            ParseError::Invalid { line, source } => {
                assert_eq!(line, 3);
                assert_eq!(source, DfaError::MissingInitial);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_undeclared_tokens() {
        let text = "alphabet: a\nstates: q0\ninitial: q0\nfinal:\nq0 b q0\n";
        assert!(matches!(
            parse_dfa(text).unwrap_err(),
            ParseError::Invalid {
                line: 5,
                source: DfaError::UnknownLetter(_)
            }
        ));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored(){
        let text = "# header\nalphabet: a # trailing\n\nstates: s\ninitial: s\nfinal: s\n\ns a s # loop\n";
        assert_eq!(parse_dfa(text).unwrap(), m_star());
    }

    #[test]
    fn round_trips_fixtures() {
        for d in [m_run(), m_ab(), m_star()] {
            assert_eq!(parse_dfa(&serialize_dfa(&d)).unwrap(), d);
        }
    }

    #[test]
    fn round_trips_empty_automaton() {
        let empty = crate::PartialDfa::builder()
            .letters(["a"])
            .states(["s"])
            .initial("s")
            .transition("s", "a", "s")
            .build()
            .unwrap()
            .trim();
        assert!(empty.is_empty());
        let text = serialize_dfa(&empty);
        assert_eq!(parse_dfa(&text).unwrap(), empty);
        assert!(text.contains("states:\n"));
    }

    #[test]
    fn star_fixture_serialization_is_canonical() {
        assert_eq!(
            serialize_dfa(&m_star()),
            "alphabet: a\nstates: m0\ninitial: m0\nfinal: m0\nm0 a m0\n"
        );
    }

    #[test]
    fn dot_output_is_deterministic() {
        let a = to_dot(&m_ab());
        let b = to_dot(&m_ab());
        assert_eq!(a, b);
    }

    #[test]
    fn dot_shapes_and_edges() {
        let dot = to_dot(&m_ab());
        assert_eq!(dot.matches("[label=\"").count(), 5);
        assert_eq!(dot.matches("doublecircle").count(), 2);
        assert_eq!(dot.matches("shape=circle").count(), 1);
        let star = to_dot(&m_star());
        assert_eq!(star.matches("[label=\"").count(), 1);
        assert!(star.contains("\"m0\" -> \"m0\""));
    }
}

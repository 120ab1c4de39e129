use thiserror::Error;

use super::category::Category;
use super::derive::{derive_meanings, Derivation, Item};
use super::lexicon::Lexicon;
use super::normalize::{beta_normalize, DEFAULT_NORMALIZE_FUEL};
use crate::calculus::Expr;

/// Work budget for the proof search over each reading of a sentence.
pub const DEFAULT_SEARCH_LIMIT: usize = 100_000;

/// A sentence split into lowercase words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub words: Vec<String>,
    /// The text ended with `?`.
    pub query: bool,
}

pub fn tokenize(text: &str) -> Sentence {
    let query = text.trim_end().ends_with('?');
    let words = text
        .split_whitespace()
        .map(|w| w.replace('?', "").to_lowercase())
        .filter(|w| !w.is_empty())
        .collect();
    Sentence { words, query }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("nothing to parse")]
    Empty,
    #[error("unknown word `{word}` at position {}", position + 1)]
    UnknownVocabulary { word: String, position: usize },
    #[error("no derivation of category {goal}")]
    NoParse { goal: Category },
    #[error("{} distinct meanings from {derivations} derivations: {}", meanings.len(), meanings.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" | "))]
    Ambiguous { meanings: Vec<Expr>, derivations: u64 },
    #[error("sentence too complex to parse within {limit} search steps")]
    TooComplex { limit: usize },
}

impl ParseError {
    pub fn variant(&self) -> &'static str {
        match self {
            ParseError::Empty => "Empty",
            ParseError::UnknownVocabulary { .. } => "UnknownVocabulary",
            ParseError::NoParse { .. } => "NoParse",
            ParseError::Ambiguous { .. } => "Ambiguous",
            ParseError::TooComplex { .. } => "TooComplex",
        }
    }
}

/// The outcome of a successful parse.
#[derive(Clone, Debug)]
pub struct Parsed {
    /// Term synthesized by the witness derivation.
    pub term: Expr,
    /// Its beta-normal form, shared by every qualifying derivation.
    pub normal_form: Expr,
    pub derivation: Derivation,
    /// Number of focused derivations with this meaning.
    pub derivations: u64,
}

/// Parses with the default search budget.
pub fn parse(words: &[impl AsRef<str>], lex: &Lexicon, goal: &Category) -> Result<Parsed, ParseError> {
    parse_bounded(words, lex, goal, DEFAULT_SEARCH_LIMIT)
}

/// Finds every derivation of `goal` over every segmentation and reading
/// choice that respects imperative structure, and succeeds iff all of them
/// share one meaning up to beta and alpha.
pub fn parse_bounded(
    words: &[impl AsRef<str>],
    lex: &Lexicon,
    goal: &Category,
    limit: usize,
) -> Result<Parsed, ParseError> {
    if words.is_empty() {
        return Err(ParseError::Empty);
    }
    let segmentations = lex.segmentations(words);
    if segmentations.is_empty() {
        let position = lex.first_unknown(words).unwrap_or(0);
        return Err(ParseError::UnknownVocabulary { word: words[position].as_ref().to_owned(), position });
    }

    let mut budget = limit;
    let too_complex = ParseError::TooComplex { limit };
    // (canonical normal form, normal form, witness)
    let mut meanings: Vec<(Expr, Expr, Derivation)> = Vec::new();
    let mut count: u64 = 0;
    for seg in segmentations {
        let mut choice = vec![0usize; seg.len()];
        loop {
            if budget == 0 {
                return Err(too_complex);
            }
            budget -= 1;
            let antecedent: Vec<Item> = seg
                .iter()
                .zip(&choice)
                .map(|(entry, &k)| {
                    let r = &entry.readings[k];
                    (r.term.clone(), r.category.clone())
                })
                .collect();
            let found = derive_meanings(&antecedent, goal, lex.types(), budget).map_err(|_| too_complex.clone())?;
            for m in found {
                count = count.saturating_add(m.derivations);
                let normal = beta_normalize(&m.term, DEFAULT_NORMALIZE_FUEL).map_err(|_| too_complex.clone())?;
                let canonical = normal.alpha_canonical();
                if !meanings.iter().any(|(c, _, _)| *c == canonical) {
                    meanings.push((canonical, normal, m.witness));
                }
            }
            // next reading combination, odometer style
            let mut i = choice.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < seg[i].readings.len() {
                    break;
                }
                choice[i] = 0;
            }
            if choice.iter().all(|&k| k == 0) {
                break;
            }
        }
    }

    match meanings.len() {
        0 => Err(ParseError::NoParse { goal: goal.clone() }),
        1 => {
            let (_, normal_form, derivation) = meanings.pop().expect("one meaning");
            Ok(Parsed { term: derivation.term().clone(), normal_form, derivation, derivations: count })
        }
        _ => Err(ParseError::Ambiguous {
            meanings: meanings.into_iter().map(|(_, n, _)| n).collect(),
            derivations: count,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse_expr;
    use crate::grammar::{parse_category, parse_lexicon};
    use crate::toyblocks;

    fn run(text: &str, goal: &str) -> Result<Parsed, ParseError> {
        parse(&tokenize(text).words, &toyblocks::lexicon(), &parse_category(goal).unwrap())
    }

    fn expr(s: &str) -> Expr {
        parse_expr(s, &toyblocks::descriptor()).unwrap()
    }

    #[test]
    fn tokenizing() {
        assert_eq!(
            tokenize("  Block one is on the TABLE? "),
            Sentence { words: vec!["block", "one", "is", "on", "the", "table"].into_iter().map(String::from).collect(), query: true }
        );
        assert!(!tokenize("move block one").query);
        assert_eq!(tokenize("?").words, Vec::<String>::new());
    }

    #[test]
    fn move_sentence() {
        let p = run("move block one on block two", "a").unwrap();
        assert_eq!(p.term, expr("(\\x:Obj. \\y:Obj. move(x, y)) b1() ((\\x:Obj. x) b2())"));
        assert_eq!(p.normal_form, expr("move(b1(), b2())"));
        assert!(p.derivations >= 1);
    }

    #[test]
    fn declarative_sentence() {
        let p = run("block one is on the table", "s").unwrap();
        assert_eq!(p.normal_form, expr("is_on(b1(), table())"));
    }

    #[test]
    fn conditional_command() {
        let p = run("if block one is on the table move block two on block one", "a").unwrap();
        assert_eq!(
            p.normal_form,
            expr("is_on(b1(), table()) ? move(b2(), b1()) : skip")
        );
    }

    #[test]
    fn failures() {
        assert_eq!(run("on block one", "a").unwrap_err(), ParseError::NoParse { goal: parse_category("a").unwrap() });
        assert_eq!(
            run("move the doughnut", "a").unwrap_err(),
            ParseError::UnknownVocabulary { word: "doughnut".into(), position: 2 }
        );
        assert_eq!(
            run("jump block one", "a").unwrap_err(),
            ParseError::UnknownVocabulary { word: "jump".into(), position: 0 }
        );
        assert_eq!(run("", "a").unwrap_err(), ParseError::Empty);
    }

    #[test]
    fn distinct_meanings_are_ambiguous() {
        let iface = toyblocks::descriptor();
        let mut src = toyblocks::LEXICON_TEXT.to_owned();
        src.push_str("it := b1() : np\nit := b2() : np\n");
        let lex = parse_lexicon(&src, &iface).unwrap();
        let err = parse(&["move", "it", "on", "the", "table"], &lex, &parse_category("a").unwrap()).unwrap_err();
        let ParseError::Ambiguous { meanings, derivations } = err else { panic!("expected ambiguity") };
        assert_eq!(meanings.len(), 2);
        assert!(derivations >= 2);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let lex = toyblocks::lexicon();
        let goal = parse_category("a").unwrap();
        let words = tokenize("move block one on block two").words;
        assert_eq!(parse_bounded(&words, &lex, &goal, 2).unwrap_err(), ParseError::TooComplex { limit: 2 });
    }
}

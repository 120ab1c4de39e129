//! REPL and HTTP front ends over a [`Session`].

pub mod repl;
pub mod service;

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use nlui_core::app::parse_model;
use nlui_core::grammar::{parse_bounded, parse_category, tokenize, Parsed, DEFAULT_SEARCH_LIMIT};
use nlui_core::{Lexicon, ParseError, Session};

/// Where a session's application and lexicon come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AppSource {
    ToyBlocks,
    Files { model: PathBuf, lexicon: PathBuf },
}

pub fn load_session(source: &AppSource) -> anyhow::Result<Session> {
    match source {
        AppSource::ToyBlocks => Ok(Session::toyblocks()),
        AppSource::Files { model, lexicon } => {
            let model_text = fs::read_to_string(model).with_context(|| format!("reading {}", model.display()))?;
            let model = parse_model(&model_text).with_context(|| format!("loading {}", model.display()))?;
            let lex_text = fs::read_to_string(lexicon).with_context(|| format!("reading {}", lexicon.display()))?;
            let lex = nlui_core::parse_lexicon(&lex_text, &model.descriptor)
                .with_context(|| format!("loading {}", lexicon.display()))?;
            Ok(Session::new(lex, model.into_connector()))
        }
    }
}

/// Parses without evaluating. With no goal, picks one the way
/// [`Session::run_command`] does.
pub fn parse_sentence(lexicon: &Lexicon, text: &str, goal: Option<&str>) -> anyhow::Result<Result<Parsed, ParseError>> {
    let sentence = tokenize(text);
    let goals: Vec<&str> = match goal {
        Some(g) => vec![g],
        None if sentence.query => vec!["s"],
        None => vec!["a", "s"],
    };
    let mut first = None;
    for g in goals {
        let cat = parse_category(g).with_context(|| format!("goal `{g}`"))?;
        match parse_bounded(&sentence.words, lexicon, &cat, DEFAULT_SEARCH_LIMIT) {
            Ok(p) => return Ok(Ok(p)),
            Err(e @ ParseError::NoParse { .. }) => {
                first.get_or_insert(e);
            }
            Err(e) => return Ok(Err(e)),
        }
    }
    Ok(Err(first.expect("at least one goal")))
}

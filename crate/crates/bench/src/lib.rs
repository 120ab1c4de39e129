//! Fixtures shared by the benchmarks.

use nlui_core::grammar::Item;
use nlui_core::{toyblocks, Lexicon};

/// `if block one is on the table` repeated `depth` times, then a move.
pub fn nested_conditional(depth: usize) -> String {
    let mut s = "if block one is on the table ".repeat(depth);
    s.push_str("move block two on block one");
    s
}

/// The lexical items of a sentence, first segmentation and first readings.
pub fn antecedent(lex: &Lexicon, sentence: &str) -> Vec<Item> {
    let words = nlui_core::tokenize(sentence).words;
    lex.segmentations(&words)
        .first()
        .expect("sentence is in the vocabulary")
        .iter()
        .map(|e| (e.readings[0].term.clone(), e.readings[0].category.clone()))
        .collect()
}

pub fn lexicon() -> Lexicon {
    toyblocks::lexicon()
}

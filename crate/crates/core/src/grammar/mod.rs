//! Categorial grammar: categories, lexicons, cut-free sequent proof search
//! and sentence parsing.

mod category;
mod derive;
mod lexicon;
mod normalize;
mod parse;

pub use category::{parse_category, Category, CategoryError, TypeAssignment};
pub use derive::{
    check_admissible_typing, derive, derive_bounded, derive_meanings, respects_imperative_structure, AuditError, Derivation, Item,
    Meaning, SearchLimit, SeqRule, Sequent,
};
pub use lexicon::{parse_lexicon, Lexicon, LexiconEntry, LexiconError, LexiconFormatError, Reading};
pub use normalize::{beta_normalize, is_beta_normal, NormalizeError, DEFAULT_NORMALIZE_FUEL};
pub use parse::{parse, parse_bounded, tokenize, ParseError, Parsed, Sentence, DEFAULT_SEARCH_LIMIT};

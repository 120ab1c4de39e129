use std::fmt;

use thiserror::Error;

use super::category::{parse_category, Category, CategoryError, TypeAssignment};
use crate::app::InterfaceDescriptor;
use crate::calculus::{parse_expr, parse_type, type_of, Expr, SyntaxError, Type, TypeEnv, TypeError};

/// A meaning of a phrase: a closed term and its category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Reading {
    pub term: Expr,
    pub category: Category,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexiconEntry {
    pub phrase: Vec<String>,
    pub readings: Vec<Reading>,
}

impl LexiconEntry {
    pub fn phrase_text(&self) -> String {
        self.phrase.join(" ")
    }
}

/// The application-specific vocabulary: phrases with their readings, and
/// the types of the base categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    types: TypeAssignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("`{phrase}`: term `{term}` has free variables")]
    OpenTerm { phrase: String, term: String },
    #[error("`{phrase}`: term `{term}` does not typecheck: {error}")]
    IllTyped { phrase: String, term: String, error: TypeError },
    #[error("`{phrase}`: term has type {found} but category {category} needs {expected}")]
    WrongType { phrase: String, category: String, expected: Type, found: Type },
    #[error("`{phrase}`: {0}", phrase = .1)]
    Category(CategoryError, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {error}")]
    Term { line: usize, error: SyntaxError },
    #[error("line {line}: {error}")]
    Category { line: usize, error: CategoryError },
    #[error("lexicon does not typecheck: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<LexiconError>),
}

impl Lexicon {
    pub fn new(types: TypeAssignment) -> Self {
        Lexicon { entries: Vec::new(), types }
    }

    pub fn types(&self) -> &TypeAssignment {
        &self.types
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    /// Adds a reading, merging it into an existing entry for the same phrase.
    pub fn add(&mut self, phrase: &str, term: Expr, category: Category) {
        let words: Vec<String> = phrase.split_whitespace().map(str::to_lowercase).collect();
        assert!(!words.is_empty(), "lexicon phrases are nonempty");
        let reading = Reading { term, category };
        match self.entries.iter_mut().find(|e| e.phrase == words) {
            Some(entry) => {
                if !entry.readings.contains(&reading) {
                    entry.readings.push(reading);
                }
            }
            None => self.entries.push(LexiconEntry { phrase: words, readings: vec![reading] }),
        }
    }

    pub fn lookup(&self, phrase: &[impl AsRef<str>]) -> Option<&LexiconEntry> {
        self.entries
            .iter()
            .find(|e| e.phrase.len() == phrase.len() && e.phrase.iter().zip(phrase).all(|(a, b)| a == b.as_ref()))
    }

    /// Every way to cut `words` into consecutive known phrases. At each
    /// position longer phrases are tried first.
    pub fn segmentations(&self, words: &[impl AsRef<str>]) -> Vec<Vec<&LexiconEntry>> {
        let words: Vec<&str> = words.iter().map(AsRef::as_ref).collect();
        // coverable[i]: the suffix starting at i can be segmented
        let n = words.len();
        let mut coverable = vec![false; n + 1];
        coverable[n] = true;
        for i in (0..n).rev() {
            coverable[i] = self.matches_at(&words, i).into_iter().any(|e| coverable[i + e.phrase.len()]);
        }
        if n == 0 || !coverable[0] {
            return vec![];
        }
        let mut out = Vec::new();
        self.segment_from(&words, 0, &coverable, &mut Vec::new(), &mut out);
        out
    }

    /// Index of the word at which every segmentation breaks down.
    pub fn first_unknown(&self, words: &[impl AsRef<str>]) -> Option<usize> {
        let words: Vec<&str> = words.iter().map(AsRef::as_ref).collect();
        let n = words.len();
        let mut reachable = vec![false; n + 1];
        reachable[0] = true;
        for i in 0..n {
            if reachable[i] {
                for e in self.matches_at(&words, i) {
                    reachable[i + e.phrase.len()] = true;
                }
            }
        }
        if reachable[n] {
            return None;
        }
        let last = (0..n).rev().find(|&i| reachable[i]).unwrap_or(0);
        // skip past the longest partial phrase match at the last reachable word
        let partial = self
            .entries
            .iter()
            .map(|e| e.phrase.iter().zip(&words[last..]).take_while(|(a, b)| a == *b).count())
            .max()
            .unwrap_or(0);
        Some((last + partial).min(n - 1))
    }

    fn matches_at(&self, words: &[&str], i: usize) -> Vec<&LexiconEntry> {
        let mut found: Vec<&LexiconEntry> = self
            .entries
            .iter()
            .filter(|e| {
                e.phrase.len() <= words.len() - i
                    && e.phrase.iter().zip(&words[i..]).all(|(a, b)| a == b)
            })
            .collect();
        found.sort_by_key(|e| std::cmp::Reverse(e.phrase.len()));
        found
    }

    fn segment_from<'a>(
        &'a self,
        words: &[&str],
        i: usize,
        coverable: &[bool],
        prefix: &mut Vec<&'a LexiconEntry>,
        out: &mut Vec<Vec<&'a LexiconEntry>>,
    ) {
        if i == words.len() {
            out.push(prefix.clone());
            return;
        }
        for entry in self.matches_at(words, i) {
            let next = i + entry.phrase.len();
            if coverable[next] {
                prefix.push(entry);
                self.segment_from(words, next, coverable, prefix, out);
                prefix.pop();
            }
        }
    }

    /// Checks that every reading is a closed term of the type its category
    /// demands.
    pub fn validate(&self, iface: &InterfaceDescriptor) -> Vec<LexiconError> {
        let mut out = Vec::new();
        for entry in &self.entries {
            let phrase = entry.phrase_text();
            for r in &entry.readings {
                if !r.term.is_closed() {
                    out.push(LexiconError::OpenTerm { phrase: phrase.clone(), term: r.term.to_string() });
                    continue;
                }
                let expected = match self.types.assign(&r.category) {
                    Ok(t) => t,
                    Err(e) => {
                        out.push(LexiconError::Category(e, phrase.clone()));
                        continue;
                    }
                };
                match type_of(&TypeEnv::new(), &r.term, iface) {
                    Err(error) => out.push(LexiconError::IllTyped {
                        phrase: phrase.clone(),
                        term: r.term.to_string(),
                        error,
                    }),
                    Ok(found) if found != expected => out.push(LexiconError::WrongType {
                        phrase: phrase.clone(),
                        category: r.category.to_string(),
                        expected,
                        found,
                    }),
                    Ok(_) => {}
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let types: Vec<String> = self.types.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("types: {}\n", types.join(", ")));
        for e in &self.entries {
            for r in &e.readings {
                out.push_str(&format!("{} := {} : {}\n", e.phrase_text(), r.term, r.category));
            }
        }
        out
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.term, self.category)
    }
}

/// Reads a lexicon file and checks it against `iface`.
///
/// ```text
/// # comment
/// types: np=Obj, pp=Obj, s=Bool, a=Act
/// block one := b1() : np
/// move := \x:Obj. \y:Obj. move(x, y) : (a/pp)/np
/// ```
///
/// Without a `types:` line the standard assignment is used. The category is
/// whatever follows the last `:` of an entry line.
pub fn parse_lexicon(src: &str, iface: &InterfaceDescriptor) -> Result<Lexicon, LexiconFormatError> {
    let mut lexicon = Lexicon::new(TypeAssignment::standard());
    let mut custom_types = None;
    for (i, raw) in src.lines().enumerate() {
        let line_no = i + 1;
        let syntax = |message: String| LexiconFormatError::Syntax { line: line_no, message };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("types:") {
            let types = custom_types.get_or_insert_with(std::collections::BTreeMap::new);
            for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
                let (base, ty) = pair
                    .split_once('=')
                    .ok_or_else(|| syntax(format!("expected `base=Type`, found `{}`", pair.trim())))?;
                let ty = parse_type(ty.trim()).map_err(|error| LexiconFormatError::Term { line: line_no, error })?;
                types.insert(base.trim().to_owned(), ty);
            }
            continue;
        }
        let (phrase, rest) = line.split_once(":=").ok_or_else(|| syntax("expected `:=`".into()))?;
        let (term, category) =
            rest.rsplit_once(':').ok_or_else(|| syntax("expected `: category`".into()))?;
        if phrase.trim().is_empty() {
            return Err(syntax("empty phrase".into()));
        }
        let term = parse_expr(term.trim(), iface).map_err(|error| LexiconFormatError::Term { line: line_no, error })?;
        let category =
            parse_category(category).map_err(|error| LexiconFormatError::Category { line: line_no, error })?;
        lexicon.add(phrase, term, category);
    }
    if let Some(types) = custom_types {
        lexicon.types = TypeAssignment(types);
    }
    let errors = lexicon.validate(iface);
    if errors.is_empty() {
        Ok(lexicon)
    } else {
        Err(LexiconFormatError::Invalid(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toyblocks;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn phrases(segs: &[Vec<&LexiconEntry>]) -> Vec<Vec<String>> {
        segs.iter().map(|s| s.iter().map(|e| e.phrase_text()).collect()).collect()
    }

    #[test]
    fn single_segmentation_of_the_example_sentence() {
        let lex = toyblocks::lexicon();
        let segs = lex.segmentations(&words("move block one on block two"));
        assert_eq!(phrases(&segs), vec![vec!["move", "block one", "on", "block two"]]);
        assert_eq!(lex.segmentations(&words("move")).len(), 1);
        assert!(lex.segmentations(&words("move the doughnut")).is_empty());
        assert_eq!(lex.first_unknown(&words("move the doughnut")), Some(2));
        assert_eq!(lex.first_unknown(&words("move block one")), None);
    }

    #[test]
    fn overlapping_phrases_enumerate_longest_first() {
        let iface = toyblocks::descriptor();
        let src = "block := b1() : np\nblock one := b2() : np\none := b1() : np\n";
        let lex = parse_lexicon(src, &iface).unwrap();
        let segs = lex.segmentations(&words("block one"));
        assert_eq!(phrases(&segs), vec![vec!["block one"], vec!["block", "one"]]);
    }

    #[test]
    fn shipped_lexicon_has_the_seven_entries() {
        let lex = toyblocks::lexicon();
        assert_eq!(lex.entries().len(), 7);
        assert_eq!(lex.types(), &TypeAssignment::standard());
        assert!(lex.validate(&toyblocks::descriptor()).is_empty());
        let if_entry = lex.lookup(&["if"]).unwrap();
        assert_eq!(if_entry.readings[0].category.to_string(), "(a/a)/s");
        assert_eq!(if_entry.readings[0].term.to_string(), "\\x:Bool. \\y:Act. x ? y : skip");
        let on = lex.lookup(&["on"]).unwrap();
        assert_eq!(on.readings[0].to_string(), "\\x:Obj. x : pp/np");
    }

    #[test]
    fn text_form_reads_back() {
        let iface = toyblocks::descriptor();
        let lex = toyblocks::lexicon();
        assert_eq!(parse_lexicon(&lex.to_text(), &iface).unwrap(), lex);
    }

    #[test]
    fn ill_typed_entries_are_rejected() {
        let iface = toyblocks::descriptor();
        let err = parse_lexicon("block one := b1() : s\n", &iface).unwrap_err();
        assert!(matches!(
            err,
            LexiconFormatError::Invalid(ref v) if matches!(v[0], LexiconError::WrongType { .. })
        ));
        let err = parse_lexicon("block one := x : np\n", &iface).unwrap_err();
        assert!(matches!(err, LexiconFormatError::Invalid(ref v) if matches!(v[0], LexiconError::OpenTerm { .. })));
        let err = parse_lexicon("block one := b1() : vp\n", &iface).unwrap_err();
        assert!(matches!(err, LexiconFormatError::Invalid(ref v) if matches!(v[0], LexiconError::Category(..))));
        assert!(matches!(
            parse_lexicon("block one b1() : np\n", &iface),
            Err(LexiconFormatError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn repeated_phrases_collect_readings() {
        let iface = toyblocks::descriptor();
        let lex = parse_lexicon("it := b1() : np\nit := b2() : np\n", &iface).unwrap();
        assert_eq!(lex.entries().len(), 1);
        assert_eq!(lex.entries()[0].readings.len(), 2);
    }
}

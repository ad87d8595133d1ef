use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A validated set of distinct, non-empty words.
///
/// Words are kept in scalar-value order; duplicates in the input are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    words: BTreeSet<String>,
}

impl Lexicon {
    pub fn new<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = BTreeSet::new();
        for w in words {
            let w = w.into();
            if w.is_empty() {
                return Err(Error::EmptyWord);
            }
            if w.chars().any(char::is_whitespace) {
                return Err(Error::InvalidWord(w));
            }
            set.insert(w);
        }
        if set.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        Ok(Lexicon { words: set })
    }

    /// Parses a word list: one word per line, surrounding whitespace trimmed,
    /// blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.words.iter().map(String::as_str)
    }

    /// Every letter used by some word, ascending.
    pub fn letters(&self) -> BTreeSet<char> {
        self.words.iter().flat_map(|w| w.chars()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deduplicates_and_sorts() {
        let lex = Lexicon::new(["bc", "ab", "bc", "c"]).unwrap();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.iter().collect::<Vec<_>>(), ["ab", "bc", "c"]);
    }

    #[test]
    fn rejects_empty_inputs() {
        assert!(matches!(Lexicon::new(["ab", ""]), Err(Error::EmptyWord)));
        assert!(matches!(
            Lexicon::new(Vec::<String>::new()),
            Err(Error::EmptyLexicon)
        ));
        assert!(matches!(Lexicon::parse("\n  \n"), Err(Error::EmptyLexicon)));
        assert!(matches!(Lexicon::new(["a b"]), Err(Error::InvalidWord(_))));
    }

    #[test]
    fn word_list_skips_blank_lines() {
        let lex = Lexicon::parse("ab\n\n  ba \r\nc\n").unwrap();
        assert_eq!(lex.iter().collect::<Vec<_>>(), ["ab", "ba", "c"]);
        assert_eq!(lex.letters().into_iter().collect::<String>(), "abc");
    }

    #[test]
    fn unicode_letters_order_by_scalar_value() {
        let lex = Lexicon::new(["été", "eté", "zèbre"]).unwrap();
        assert_eq!(lex.iter().collect::<Vec<_>>(), ["eté", "zèbre", "été"]);
    }
}

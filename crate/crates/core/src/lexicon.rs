//! Word lists backing segmentation, tokenisation and cue scoring.
//!
//! Every list ships embedded in the binary and can be overridden per file
//! from a data directory (see [`Lexicon::from_dir`]). Files hold one entry
//! per line; `#` starts a comment line and blank lines are skipped.
//! `lemma_exceptions.txt` holds `form lemma` pairs instead of single words.

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::Path;

const STOPWORDS: &str = include_str!("../data/stopwords.txt");
const PRONOUNS: &str = include_str!("../data/pronouns.txt");
const ABBREVIATIONS: &str = include_str!("../data/abbreviations.txt");
const CUES_BONUS: &str = include_str!("../data/cues_bonus.txt");
const CUES_STIGMA: &str = include_str!("../data/cues_stigma.txt");
const VERBS: &str = include_str!("../data/verbs.txt");
const LEMMA_EXCEPTIONS: &str = include_str!("../data/lemma_exceptions.txt");

/// Non-verb suffix rules would misfire on these; kept out of the data files
/// because they patch the morphology fallback, not the verb lexicon.
const NONVERB_SURFACES: &[&str] = &[
    "morning",
    "evening",
    "thing",
    "nothing",
    "something",
    "anything",
    "everything",
    "ceiling",
    "during",
    "spring",
    "string",
    "sterling",
    "hundred",
    "sacred",
    "ahead",
    "indeed",
];

#[derive(Debug, Clone)]
pub struct Lexicon {
    pub stopwords: BTreeSet<String>,
    pub pronouns: BTreeSet<String>,
    pub abbreviations: BTreeSet<String>,
    pub bonus_cues: Vec<String>,
    pub stigma_cues: Vec<String>,
    pub verbs: BTreeSet<String>,
    pub lemma_exceptions: BTreeMap<String, String>,
    nonverbs: BTreeSet<String>,
}

fn parse_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}

fn parse_set(text: &str) -> BTreeSet<String> {
    parse_list(text).into_iter().collect()
}

fn parse_pairs(text: &str) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for line in parse_list(text) {
        let mut parts = line.split_whitespace();
        if let (Some(form), Some(lemma)) = (parts.next(), parts.next()) {
            map.insert(form.to_string(), lemma.to_string());
        }
    }
    map
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            stopwords: parse_set(STOPWORDS),
            pronouns: parse_set(PRONOUNS),
            abbreviations: parse_set(ABBREVIATIONS),
            bonus_cues: parse_list(CUES_BONUS),
            stigma_cues: parse_list(CUES_STIGMA),
            verbs: parse_set(VERBS),
            lemma_exceptions: parse_pairs(LEMMA_EXCEPTIONS),
            nonverbs: NONVERB_SURFACES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Lexicon {
    /// Builds the default lexicon, then replaces each list for which the
    /// directory contains a file of the canonical name. Missing files keep
    /// the embedded default; unreadable files are an error.
    pub fn from_dir(dir: &Path) -> io::Result<Lexicon> {
        let mut lex = Lexicon::default();
        let load = |name: &str| -> io::Result<Option<String>> {
            let path = dir.join(name);
            if path.is_file() {
                Ok(Some(std::fs::read_to_string(path)?))
            } else {
                Ok(None)
            }
        };
        if let Some(t) = load("stopwords.txt")? {
            lex.stopwords = parse_set(&t);
        }
        if let Some(t) = load("pronouns.txt")? {
            lex.pronouns = parse_set(&t);
        }
        if let Some(t) = load("abbreviations.txt")? {
            lex.abbreviations = parse_set(&t);
        }
        if let Some(t) = load("cues_bonus.txt")? {
            lex.bonus_cues = parse_list(&t);
        }
        if let Some(t) = load("cues_stigma.txt")? {
            lex.stigma_cues = parse_list(&t);
        }
        if let Some(t) = load("verbs.txt")? {
            lex.verbs = parse_set(&t);
        }
        if let Some(t) = load("lemma_exceptions.txt")? {
            lex.lemma_exceptions = parse_pairs(&t);
        }
        Ok(lex)
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn is_pronoun(&self, word: &str) -> bool {
        self.pronouns.contains(word)
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(word)
    }

    /// True when the surface form should never be treated as a verb even if
    /// the -ed/-ing morphology fallback matches.
    pub fn is_nonverb_surface(&self, word: &str) -> bool {
        self.nonverbs.contains(word)
    }
}

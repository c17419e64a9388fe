//! Text ingestion: sentence segmentation, tokenisation, shallow
//! lemmatisation and surface markedness annotation.
//!
//! Segmentation is rule based: a sentence ends at `.`, `!` or `?` followed
//! by whitespace and an uppercase letter or digit, with an abbreviation
//! table and a single-initial rule suppressing false breaks. Paragraphs are
//! blank-line separated. An optional first line starting with `#TITLE `
//! names the document and is not part of any sentence.

use std::collections::BTreeSet;

use crate::lexicon::Lexicon;

/// Positional and lexical salience cues for one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Markedness {
    pub location_score: f64,
    pub cue_score: f64,
    pub in_title_overlap: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    /// Byte offsets into the source text.
    pub span: (usize, usize),
    pub is_content: bool,
    pub is_pronoun: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub index: usize,
    /// Byte offsets into the source text.
    pub span: (usize, usize),
    pub text: String,
    pub tokens: Vec<Token>,
    pub markedness: Markedness,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub id: String,
    pub title: Option<String>,
    pub sentences: Vec<Sentence>,
    /// Indices of sentences that open a paragraph.
    pub paragraph_starts: BTreeSet<usize>,
}

impl Document {
    pub fn with_id(mut self, id: &str) -> Document {
        self.id = id.to_string();
        self
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// Content lemmas of the title, empty when there is no title.
    pub fn title_lemmas(&self, lexicon: &Lexicon) -> BTreeSet<String> {
        match &self.title {
            None => BTreeSet::new(),
            Some(t) => tokenize(t, 0, lexicon)
                .into_iter()
                .filter(|tok| tok.is_content)
                .map(|tok| tok.lemma)
                .collect(),
        }
    }
}

const MIN_STEM: usize = 3;

fn restore_e(stem: &str) -> bool {
    let b = stem.as_bytes();
    let n = b.len();
    if n < 2 || b[n - 1] == b[n - 2] {
        return false;
    }
    // settl -> settle, handl -> handle; but fail, travel, curl, howl
    // keep their form.
    let consonant_l = b[n - 1] == b'l' && !b"aeiourw".contains(&b[n - 2]);
    matches!(b[n - 1], b'u' | b'v' | b'z' | b'c' | b's') || consonant_l
}

fn ends_in_consonant(stem: &str) -> bool {
    stem.chars()
        .last()
        .map(|c| c.is_ascii_alphabetic() && !"aeiou".contains(c))
        .unwrap_or(false)
}

fn is_vowel(b: u8) -> bool {
    b"aeiou".contains(&b)
}

/// A base is strippable when it still has a vowel (keeps spring, string)
/// and the suffix followed a consonant (keeps speed, seeing).
fn strippable(base: &str) -> bool {
    let b = base.as_bytes();
    base.len() >= MIN_STEM && b.iter().any(|&c| is_vowel(c)) && !is_vowel(b[b.len() - 1])
}

/// planned -> plan, stopped -> stop; letters whose doubled form is usually
/// the lemma itself (call, pass, add, staff, buzz) are kept.
fn undouble(base: &mut String) {
    let b = base.as_bytes();
    let n = b.len();
    if n > MIN_STEM && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !b"lsdfz".contains(&b[n - 1])
    {
        base.pop();
    }
}

fn strip_verb_suffix(word: &str, suffix: &str) -> Option<String> {
    let base = word.strip_suffix(suffix)?;
    if !strippable(base) {
        return None;
    }
    let mut out = base.to_string();
    if restore_e(base) {
        out.push('e');
    } else {
        undouble(&mut out);
    }
    Some(out)
}

fn strip_once(word: &str) -> Option<String> {
    let n = word.len();
    if let Some(base) = word.strip_suffix("ies") {
        if base.len() >= 2 {
            return Some(format!("{base}y"));
        }
    }
    if let Some(base) = word.strip_suffix("ied") {
        if base.len() >= 2 {
            return Some(format!("{base}y"));
        }
    }
    for sib in ["sses", "xes", "zes", "ches", "shes"] {
        if word.ends_with(sib) && n - 2 >= MIN_STEM {
            return Some(word[..n - 2].to_string());
        }
    }
    if word.ends_with('s')
        && !word.ends_with("ss")
        && !word.ends_with("us")
        && !word.ends_with("is")
        && n > MIN_STEM
    {
        return Some(word[..n - 1].to_string());
    }
    if let Some(out) = strip_verb_suffix(word, "ing") {
        return Some(out);
    }
    if let Some(out) = strip_verb_suffix(word, "ed") {
        return Some(out);
    }
    if let Some(base) = word.strip_suffix("ly") {
        if base.len() >= MIN_STEM && ends_in_consonant(base) {
            return Some(base.to_string());
        }
    }
    None
}

/// Lowercases and strips inflectional suffixes. The exception table wins
/// over the rules; rules are retried until none fires, so the result is a
/// fixpoint: `lemmatize(lemmatize(x)) == lemmatize(x)`.
pub fn lemmatize(surface: &str, lexicon: &Lexicon) -> String {
    let mut cur = surface.to_lowercase();
    for _ in 0..16 {
        if let Some(mapped) = lexicon.lemma_exceptions.get(&cur) {
            if *mapped == cur {
                break;
            }
            cur = mapped.clone();
            continue;
        }
        if !cur.is_ascii() {
            break;
        }
        match strip_once(&cur) {
            Some(next) => cur = next,
            None => break,
        }
    }
    cur
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}' || c == '-'
}

/// Splits `text` into tokens. `base` is the byte offset of `text` within
/// the source, so token spans land in source coordinates.
fn tokenize(text: &str, base: usize, lexicon: &Lexicon) -> Vec<Token> {
    let mut tokens = Vec::new();
    let bytes = text.char_indices().collect::<Vec<_>>();
    let mut i = 0;
    while i < bytes.len() {
        if !is_word_char(bytes[i].1) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < bytes.len() && is_word_char(bytes[j].1) {
            j += 1;
        }
        // Trim connector chars that are not between alphanumerics.
        let mut a = i;
        let mut b = j;
        while a < b && !bytes[a].1.is_alphanumeric() {
            a += 1;
        }
        while b > a && !bytes[b - 1].1.is_alphanumeric() {
            b -= 1;
        }
        if a < b {
            let start = bytes[a].0;
            let end = if b < bytes.len() {
                bytes[b].0
            } else {
                text.len()
            };
            let surface = &text[start..end];
            let lemma = lemmatize(surface, lexicon);
            let lower = surface.to_lowercase();
            let is_pronoun = lexicon.is_pronoun(&lemma) || lexicon.is_pronoun(&lower);
            // Single letters are tokenisation debris (initials, "e.g.")
            // rather than words; digits like route numbers stay content.
            let single_letter =
                surface.chars().count() == 1 && surface.chars().all(|c| c.is_alphabetic());
            let is_content = !is_pronoun
                && !single_letter
                && !lexicon.is_stopword(&lemma)
                && !lexicon.is_stopword(&lower);
            tokens.push(Token {
                surface: surface.to_string(),
                lemma,
                span: (base + start, base + end),
                is_content,
                is_pronoun,
            });
        }
        i = j;
    }
    tokens
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

/// Word immediately before byte position `pos`, made of word chars and dots.
fn word_before(text: &str, pos: usize) -> Option<&str> {
    let head = &text[..pos];
    let mut start = pos;
    for (idx, c) in head.char_indices().rev() {
        if c.is_alphanumeric() || c == '.' {
            start = idx;
        } else {
            break;
        }
    }
    if start < pos {
        Some(head[start..].trim_end_matches('.'))
    } else {
        None
    }
}

fn sentence_breaks(para: &str, lexicon: &Lexicon) -> Vec<usize> {
    let chars: Vec<(usize, char)> = para.char_indices().collect();
    let mut breaks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_terminator(chars[i].1) {
            i += 1;
            continue;
        }
        let term_start = i;
        let mut only_dots = true;
        while i < chars.len() && is_terminator(chars[i].1) {
            only_dots &= chars[i].1 == '.';
            i += 1;
        }
        while i < chars.len() && is_closer(chars[i].1) {
            i += 1;
        }
        let end = if i < chars.len() {
            chars[i].0
        } else {
            para.len()
        };
        if i >= chars.len() {
            breaks.push(end);
            break;
        }
        if !chars[i].1.is_whitespace() {
            continue;
        }
        let mut k = i;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        let next = if k < chars.len() {
            Some(chars[k].1)
        } else {
            None
        };
        let opens_sentence = match next {
            Some(c) => c.is_uppercase() || c.is_ascii_digit(),
            None => true,
        };
        if !opens_sentence {
            continue;
        }
        if only_dots {
            if let Some(word) = word_before(para, chars[term_start].0) {
                let lower = word.to_lowercase();
                let single_initial =
                    word.chars().count() == 1 && word.chars().all(|c| c.is_alphabetic());
                if single_initial || lexicon.is_abbreviation(&lower) {
                    continue;
                }
            }
        }
        breaks.push(end);
    }
    breaks
}

/// Byte ranges of blank-line separated paragraphs within `body`.
fn paragraph_ranges(body: &str, base: usize) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    let mut start: Option<usize> = None;
    let mut offset = 0;
    for line in body.split_inclusive('\n') {
        let blank = line.trim().is_empty();
        if blank {
            if let Some(s) = start.take() {
                ranges.push((base + s, base + offset));
            }
        } else if start.is_none() {
            start = Some(offset);
        }
        offset += line.len();
    }
    if let Some(s) = start {
        ranges.push((base + s, base + body.len()));
    }
    ranges
}

/// Segments raw text into a [`Document`]. Total: any input yields a
/// document; empty input yields zero sentences.
pub fn segment(text: &str, lexicon: &Lexicon) -> Document {
    let (title, body_start) = match text.strip_prefix("#TITLE ") {
        Some(rest) => {
            let line_end = rest.find('\n').map(|p| p + 1).unwrap_or(rest.len());
            let title = rest[..line_end].trim().to_string();
            (
                Some(title).filter(|t| !t.is_empty()),
                "#TITLE ".len() + line_end,
            )
        }
        None => (None, 0),
    };
    let body = &text[body_start..];

    let mut doc = Document {
        id: String::new(),
        title,
        sentences: Vec::new(),
        paragraph_starts: BTreeSet::new(),
    };

    for (pstart, pend) in paragraph_ranges(body, body_start) {
        let para = &text[pstart..pend];
        let mut first_in_para = true;
        let mut cursor = 0;
        let mut breaks = sentence_breaks(para, lexicon);
        if breaks.last() != Some(&para.len()) {
            breaks.push(para.len());
        }
        for brk in breaks {
            let raw = &para[cursor..brk];
            let lead = raw.len() - raw.trim_start().len();
            let trail = raw.trim_end().len();
            if trail <= lead {
                cursor = brk;
                continue;
            }
            let start = pstart + cursor + lead;
            let end = pstart + cursor + trail;
            let sent_text = &text[start..end];
            let index = doc.sentences.len();
            let tokens = tokenize(sent_text, start, lexicon);
            doc.sentences.push(Sentence {
                index,
                span: (start, end),
                text: sent_text.to_string(),
                tokens,
                markedness: Markedness::default(),
            });
            if first_in_para {
                doc.paragraph_starts.insert(index);
                first_in_para = false;
            }
            cursor = brk;
        }
    }
    doc
}

fn count_cue_hits(sentence: &Sentence, entries: &[String]) -> usize {
    let lower = sentence.text.to_lowercase();
    let mut hits = 0;
    for entry in entries {
        let hit = if entry.contains(' ') {
            lower.contains(entry.as_str())
        } else {
            sentence
                .tokens
                .iter()
                .any(|t| t.lemma == *entry || t.surface.to_lowercase() == *entry)
        };
        if hit {
            hits += 1;
        }
    }
    hits
}

/// Fills in location, cue and title-overlap scores for every sentence.
///
/// Location: 1.0 for the first sentence of a paragraph and for the last
/// sentence of the document, otherwise `0.5 * (1 - index / (n - 1))`.
/// Cue: `clamp(bonus_hits - stigma_hits, -1, 1)`.
pub fn annotate_markedness(mut doc: Document, lexicon: &Lexicon) -> Document {
    let n = doc.sentences.len();
    let title_lemmas = doc.title_lemmas(lexicon);
    let starts = doc.paragraph_starts.clone();
    for sentence in &mut doc.sentences {
        let idx = sentence.index;
        let location = if starts.contains(&idx) || idx + 1 == n {
            1.0
        } else {
            0.5 * (1.0 - idx as f64 / usize::max(1, n - 1) as f64)
        };
        let bonus = count_cue_hits(sentence, &lexicon.bonus_cues) as f64;
        let stigma = count_cue_hits(sentence, &lexicon.stigma_cues) as f64;
        let cue = (bonus - stigma).clamp(-1.0, 1.0);
        let overlap = !title_lemmas.is_empty()
            && sentence
                .tokens
                .iter()
                .any(|t| t.is_content && title_lemmas.contains(&t.lemma));
        sentence.markedness = Markedness {
            location_score: location,
            cue_score: cue,
            in_title_overlap: overlap,
        };
    }
    doc
}

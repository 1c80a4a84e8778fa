//! Korean text primitives.
//!
//! Tokenization into eojeol, Hangul syllable decomposition into conjoining
//! jamo, jamo-level similarity, and suffix stripping against a closed lexicon
//! of postpositions and verbal endings.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

const DEFAULT_LEXICON: &str = include_str!("../data/particles.tsv");

const SYLLABLE_BASE: u32 = 0xAC00;
const SYLLABLE_LAST: u32 = 0xD7A3;
const LEAD_BASE: u32 = 0x1100;
const VOWEL_BASE: u32 = 0x1161;
const TRAIL_BASE: u32 = 0x11A7;
const LEAD_COUNT: u32 = 19;
const VOWEL_COUNT: u32 = 21;
const TRAIL_COUNT: u32 = 28;
const BLOCK_COUNT: u32 = VOWEL_COUNT * TRAIL_COUNT;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

/// Functional morpheme class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MorphemeKind {
    /// Postposition attached to a nominal.
    Adp,
    /// Verbal ending.
    Part,
}

impl MorphemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MorphemeKind::Adp => "ADP",
            MorphemeKind::Part => "PART",
        }
    }
}

impl fmt::Display for MorphemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MorphemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ADP" => Ok(MorphemeKind::Adp),
            "PART" => Ok(MorphemeKind::Part),
            other => Err(format!("unknown morpheme kind {other:?} (expected ADP or PART)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionalMorpheme {
    pub text: String,
    pub kind: MorphemeKind,
}

/// Closed set of postpositions and verbal endings used for suffix stripping.
///
/// Entries keep file order; that order breaks ties between equally long
/// matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<FunctionalMorpheme>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::parse(DEFAULT_LEXICON).expect("bundled lexicon is well formed")
    }
}

impl Lexicon {
    pub fn new(entries: Vec<FunctionalMorpheme>) -> Self {
        let entries = entries
            .into_iter()
            .map(|m| FunctionalMorpheme {
                text: m.text.nfc().collect(),
                kind: m.kind,
            })
            .collect();
        Lexicon { entries }
    }

    /// Parses `surface<TAB>kind` lines; `#` starts a comment line, blank
    /// lines are ignored.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split('\t');
            let (surface, kind) = match (fields.next(), fields.next(), fields.next()) {
                (Some(s), Some(k), None) => (s.trim(), k.trim()),
                _ => {
                    return Err(LexiconError::Malformed {
                        line,
                        reason: "expected exactly two tab-separated fields".into(),
                    })
                }
            };
            if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                return Err(LexiconError::Malformed {
                    line,
                    reason: format!("invalid surface {surface:?}"),
                });
            }
            let kind = kind
                .parse::<MorphemeKind>()
                .map_err(|reason| LexiconError::Malformed { line, reason })?;
            entries.push(FunctionalMorpheme {
                text: surface.to_string(),
                kind,
            });
        }
        Ok(Lexicon::new(entries))
    }

    pub fn from_path(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|e| LexiconError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Lexicon::parse(&text)
    }

    pub fn entries(&self) -> &[FunctionalMorpheme] {
        &self.entries
    }

    pub fn contains(&self, text: &str) -> bool {
        self.entries.iter().any(|m| m.text == text)
    }

    /// Splits `surface` into stem and functional morpheme by longest suffix
    /// match. A match that would consume the whole token is rejected.
    pub fn strip<'a>(&'a self, surface: &str) -> (String, Option<&'a FunctionalMorpheme>) {
        let mut best: Option<&FunctionalMorpheme> = None;
        for entry in &self.entries {
            if entry.text.len() >= surface.len() || !surface.ends_with(entry.text.as_str()) {
                continue;
            }
            match best {
                Some(b) if b.text.chars().count() >= entry.text.chars().count() => {}
                _ => best = Some(entry),
            }
        }
        match best {
            Some(m) => (surface[..surface.len() - m.text.len()].to_string(), Some(m)),
            None => (surface.to_string(), None),
        }
    }
}

/// `strip_particle` against the bundled default lexicon.
pub fn strip_particle(surface: &str) -> (String, Option<String>) {
    let lexicon = Lexicon::default();
    let (stem, particle) = lexicon.strip(surface);
    (stem, particle.map(|m| m.text.clone()))
}

/// One whitespace-delimited token, split into content stem and an optional
/// functional morpheme.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Eojeol {
    pub surface: String,
    pub stem: String,
    pub particle: Option<FunctionalMorpheme>,
    pub pos: Option<String>,
}

impl Eojeol {
    /// Builds a token from a whitespace-free surface. The surface is NFC
    /// normalized first.
    pub fn new(surface: &str, lexicon: &Lexicon) -> Self {
        let surface: String = surface.nfc().collect();
        debug_assert!(!surface.chars().any(char::is_whitespace));
        let (stem, particle) = lexicon.strip(&surface);
        Eojeol {
            stem,
            particle: particle.cloned(),
            surface,
            pos: None,
        }
    }

    pub fn with_pos(mut self, pos: impl Into<String>) -> Self {
        self.pos = Some(pos.into());
        self
    }

    pub fn particle_text(&self) -> Option<&str> {
        self.particle.as_ref().map(|m| m.text.as_str())
    }
}

impl fmt::Display for Eojeol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

pub fn nfc(text: &str) -> String {
    text.nfc().collect()
}

/// Splits a sentence into maximal whitespace-free tokens after NFC
/// normalization.
pub fn tokenize(sentence: &str, lexicon: &Lexicon) -> Vec<Eojeol> {
    nfc(sentence)
        .split_whitespace()
        .map(|t| Eojeol::new(t, lexicon))
        .collect()
}

/// Reads a `surface/POS` tagged line. The POS is taken after the last `/`;
/// a token without a slash (or with an empty tag) carries no POS.
pub fn tokenize_tagged(line: &str, lexicon: &Lexicon) -> Vec<Eojeol> {
    nfc(line)
        .split_whitespace()
        .map(|t| match t.rsplit_once('/') {
            Some((surface, pos)) if !surface.is_empty() && !pos.is_empty() => {
                Eojeol::new(surface, lexicon).with_pos(pos)
            }
            _ => Eojeol::new(t, lexicon),
        })
        .collect()
}

pub fn join_tokens(tokens: &[Eojeol]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Conjoining-jamo expansion of a text; non-Hangul characters pass through.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct JamoString {
    pub units: Vec<char>,
}

impl JamoString {
    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Recomposes lead/vowel(/trail) runs into precomposed syllables.
    pub fn recompose(&self) -> String {
        let mut out = String::with_capacity(self.units.len() * 2);
        let units = &self.units;
        let mut i = 0;
        while i < units.len() {
            let c = units[i] as u32;
            let next = units.get(i + 1).map(|&n| n as u32);
            match next {
                Some(v)
                    if (LEAD_BASE..LEAD_BASE + LEAD_COUNT).contains(&c)
                        && (VOWEL_BASE..VOWEL_BASE + VOWEL_COUNT).contains(&v) =>
                {
                    let mut code =
                        SYLLABLE_BASE + (c - LEAD_BASE) * BLOCK_COUNT + (v - VOWEL_BASE) * TRAIL_COUNT;
                    i += 2;
                    if let Some(&t) = units.get(i) {
                        let t = t as u32;
                        if t > TRAIL_BASE && t < TRAIL_BASE + TRAIL_COUNT {
                            code += t - TRAIL_BASE;
                            i += 1;
                        }
                    }
                    out.push(char::from_u32(code).expect("valid syllable"));
                }
                _ => {
                    out.push(units[i]);
                    i += 1;
                }
            }
        }
        out
    }
}

impl fmt::Display for JamoString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.units {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn push_jamo(c: char, out: &mut Vec<char>) {
    let code = c as u32;
    if !(SYLLABLE_BASE..=SYLLABLE_LAST).contains(&code) {
        out.push(c);
        return;
    }
    let index = code - SYLLABLE_BASE;
    let lead = LEAD_BASE + index / BLOCK_COUNT;
    let vowel = VOWEL_BASE + (index % BLOCK_COUNT) / TRAIL_COUNT;
    let trail = index % TRAIL_COUNT;
    out.push(char::from_u32(lead).expect("lead jamo"));
    out.push(char::from_u32(vowel).expect("vowel jamo"));
    if trail != 0 {
        out.push(char::from_u32(TRAIL_BASE + trail).expect("trail jamo"));
    }
}

/// Expands every precomposed Hangul syllable of the NFC form of `text` into
/// conjoining jamo (U+1100 block).
pub fn decompose_jamo(text: &str) -> JamoString {
    let mut units = Vec::with_capacity(text.len());
    for c in text.nfc() {
        push_jamo(c, &mut units);
    }
    JamoString { units }
}

pub(crate) fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - lev(jamo(a), jamo(b)) / max(len)`; two empty strings are identical.
pub fn jamo_similarity(a: &str, b: &str) -> f64 {
    let ja = decompose_jamo(a);
    let jb = decompose_jamo(b);
    let longest = ja.len().max(jb.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&ja.units, &jb.units) as f64 / longest as f64
}

/// Ordered literal rewrite rules applied to raw sentence text before
/// tokenization (e.g. spacing fixes for known segmentation artifacts).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizationTable {
    rules: Vec<(String, String)>,
}

impl NormalizationTable {
    pub fn new(rules: Vec<(String, String)>) -> Self {
        NormalizationTable { rules }
    }

    /// `from<TAB>to` per line; `#` comments and blank lines skipped.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once('\t') {
                Some((from, to)) if !from.is_empty() => rules.push((nfc(from), nfc(to))),
                _ => {
                    return Err(LexiconError::Malformed {
                        line: idx + 1,
                        reason: "expected `from<TAB>to`".into(),
                    })
                }
            }
        }
        Ok(NormalizationTable { rules })
    }

    pub fn from_path(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|e| LexiconError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        NormalizationTable::parse(&text)
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn apply(&self, text: &str) -> String {
        let mut out = nfc(text);
        for (from, to) in &self.rules {
            if out.contains(from.as_str()) {
                out = out.replace(from.as_str(), to);
            }
        }
        out
    }
}

//! Whole-corpus utilities: statistics, merging per-annotator files into one
//! multi-reference file, and the inverse split.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::m2::{AnnotatedSentence, M2Corpus};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusStats {
    pub sentence_count: usize,
    pub reference_count: usize,
    pub annotator_count: usize,
    pub token_count: usize,
    pub edit_count: usize,
    pub error_label_histogram: BTreeMap<String, usize>,
    pub edits_per_annotator: BTreeMap<u32, usize>,
}

/// Counts references as annotator ids present per sentence. A block with
/// no annotation lines at all counts as one reference per corpus annotator,
/// since files without noop lines leave error-free sentences bare.
pub fn corpus_stats(corpus: &M2Corpus) -> CorpusStats {
    let annotators = corpus.annotators();
    let mut stats = CorpusStats {
        sentence_count: corpus.len(),
        annotator_count: annotators.len(),
        ..Default::default()
    };
    for sentence in &corpus.sentences {
        stats.token_count += sentence.source_tokens.len();
        let ids = sentence.annotators();
        stats.reference_count += if ids.is_empty() { annotators.len() } else { ids.len() };
        for edit in sentence.edits.iter().filter(|e| !e.is_noop()) {
            stats.edit_count += 1;
            *stats.error_label_histogram.entry(edit.label.to_string()).or_default() += 1;
            *stats.edits_per_annotator.entry(edit.annotator).or_default() += 1;
        }
    }
    stats
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MergeError {
    #[error("input {input} has {found} sentences, expected {expected}")]
    SentenceCount { input: usize, found: usize, expected: usize },
    #[error("sentence {sentence}: source of input {input} differs from input 1")]
    SourceMismatch { sentence: usize, input: usize },
}

/// Unions the annotation lines of several files over the same sentences.
/// Annotator ids are renumbered 0..k-1 following input order, then each
/// input's own ids in ascending order. Indices in errors are 1-based.
pub fn merge_corpora(inputs: &[M2Corpus]) -> Result<M2Corpus, MergeError> {
    let Some(first) = inputs.first() else {
        return Ok(M2Corpus::default());
    };
    let mut mapping: Vec<BTreeMap<u32, u32>> = Vec::with_capacity(inputs.len());
    let mut next = 0;
    for (idx, corpus) in inputs.iter().enumerate() {
        if corpus.len() != first.len() {
            return Err(MergeError::SentenceCount {
                input: idx + 1,
                found: corpus.len(),
                expected: first.len(),
            });
        }
        let mut ids = BTreeMap::new();
        for id in corpus.annotators() {
            ids.insert(id, next);
            next += 1;
        }
        mapping.push(ids);
    }
    let mut sentences = Vec::with_capacity(first.len());
    for (s_idx, base) in first.sentences.iter().enumerate() {
        let mut merged = AnnotatedSentence::new(base.source_tokens.clone());
        for (c_idx, corpus) in inputs.iter().enumerate() {
            let sentence = &corpus.sentences[s_idx];
            if sentence.source_tokens != base.source_tokens {
                return Err(MergeError::SourceMismatch {
                    sentence: s_idx + 1,
                    input: c_idx + 1,
                });
            }
            merged.edits.extend(sentence.edits.iter().map(|e| {
                let mut e = e.clone();
                e.annotator = mapping[c_idx][&e.annotator];
                e
            }));
        }
        sentences.push(merged);
    }
    Ok(M2Corpus::new(sentences))
}

/// One single-annotator corpus per corpus-wide annotator id (ascending),
/// each renumbered to annotator 0. Sentences keep their source lines even
/// when the annotator has nothing on them.
pub fn split_by_annotator(corpus: &M2Corpus) -> Vec<M2Corpus> {
    let ids: BTreeSet<u32> = corpus.annotators();
    ids.into_iter()
        .map(|id| {
            M2Corpus::new(
                corpus
                    .sentences
                    .iter()
                    .map(|s| AnnotatedSentence {
                        source_tokens: s.source_tokens.clone(),
                        edits: s
                            .edits
                            .iter()
                            .filter(|e| e.annotator == id)
                            .map(|e| {
                                let mut e = e.clone();
                                e.annotator = 0;
                                e
                            })
                            .collect(),
                    })
                    .collect(),
            )
        })
        .collect()
}

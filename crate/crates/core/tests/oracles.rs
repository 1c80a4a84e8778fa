//! Independent reference computations checked against the library.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kogec_core::alignment::Aligner;
use kogec_core::classifier::{Edit, ErrorLabel};
use kogec_core::hangul::{decompose_jamo, jamo_similarity, Eojeol, Lexicon};
use kogec_core::m2::parse_m2;
use kogec_core::rubric::cohen_kappa;
use kogec_core::scorer::{f_beta, match_edits, MatchCounts, MatchOptions};

const SAMPLE: &str = "S 비행기 음식이 안 막였습니다 .\n\
A 1 2|||R:NOUN+ADP → NOUN+ADP|||음식을|||REQUIRED|||-NONE-|||0\n\
A 3 4|||R:SPELL|||먹었습니다|||REQUIRED|||-NONE-|||0\n\
A 3 4|||R:SPELL|||맞았습니다|||REQUIRED|||-NONE-|||1\n\n";

/// Edit distance straight from its recursive definition, memoized on
/// suffix positions.
fn edit_distance<T: PartialEq>(a: &[T], b: &[T], memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let key = (a.len(), b.len());
    if let Some(&d) = memo.get(&key) {
        return d;
    }
    let d = [
        edit_distance(&a[1..], &b[1..], memo) + usize::from(a[0] != b[0]),
        edit_distance(&a[1..], b, memo) + 1,
        edit_distance(a, &b[1..], memo) + 1,
    ]
    .into_iter()
    .min()
    .unwrap();
    memo.insert(key, d);
    d
}

#[test]
fn jamo_tables_match_hand_decomposition() {
    // 막 였 습 니 다 / 먹 었 습 니 다 written out jamo by jamo.
    let mak: Vec<char> = "\u{1106}\u{1161}\u{11A8}\u{110B}\u{1167}\u{11BB}\u{1109}\u{1173}\u{11B8}\u{1102}\u{1175}\u{1103}\u{1161}"
        .chars()
        .collect();
    let meok: Vec<char> = "\u{1106}\u{1165}\u{11A8}\u{110B}\u{1165}\u{11BB}\u{1109}\u{1173}\u{11B8}\u{1102}\u{1175}\u{1103}\u{1161}"
        .chars()
        .collect();
    assert_eq!(decompose_jamo("막였습니다").units, mak);
    assert_eq!(decompose_jamo("먹었습니다").units, meok);
    let d = edit_distance(&mak, &meok, &mut HashMap::new());
    assert_eq!(d, 2);
    let expected = 1.0 - d as f64 / 13.0;
    assert_eq!(jamo_similarity("막였습니다", "먹었습니다"), expected);
}

#[test]
fn similarity_matches_recursive_distance_on_word_list() {
    let words = ["음식이", "음식을", "막였습니다", "먹었습니다", "맞았습니다", "학교", "학꾜", "", "abc", "가나다"];
    for a in words {
        for b in words {
            let (ja, jb) = (decompose_jamo(a).units, decompose_jamo(b).units);
            let longest = ja.len().max(jb.len());
            let expected = if longest == 0 {
                1.0
            } else {
                1.0 - edit_distance(&ja, &jb, &mut HashMap::new()) as f64 / longest as f64
            };
            assert_eq!(jamo_similarity(a, b), expected, "{a} / {b}");
        }
    }
}

/// Kappa from an explicit contingency table in floating point.
fn kappa_from_table(a: &[i64], b: &[i64]) -> f64 {
    let n = a.len() as f64;
    let mut labels: Vec<i64> = a.iter().chain(b).copied().collect();
    labels.sort();
    labels.dedup();
    let mut table = vec![vec![0.0; labels.len()]; labels.len()];
    for (x, y) in a.iter().zip(b) {
        let i = labels.binary_search(x).unwrap();
        let j = labels.binary_search(y).unwrap();
        table[i][j] += 1.0;
    }
    let p_o: f64 = (0..labels.len()).map(|i| table[i][i]).sum::<f64>() / n;
    let p_e: f64 = (0..labels.len())
        .map(|k| {
            let row: f64 = table[k].iter().sum();
            let col: f64 = table.iter().map(|r| r[k]).sum();
            (row / n) * (col / n)
        })
        .sum();
    (p_o - p_e) / (1.0 - p_e)
}

#[test]
fn kappa_hand_cases_agree_with_table_oracle() {
    let cases: [(&[i64], &[i64], f64); 3] = [
        (&[1, 2, 3, 1], &[1, 2, 3, 1], 1.0),
        (&[1, 2, 1, 2], &[1, 2, 2, 2], 0.5),
        (&[1, 2], &[2, 1], -1.0),
    ];
    for (a, b, expected) in cases {
        assert_eq!(kappa_from_table(a, b), expected);
        assert_eq!(cohen_kappa(a, b).unwrap(), expected);
    }
}

#[test]
fn kappa_matches_table_oracle_on_random_ratings() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let n = rng.gen_range(2..80);
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..5)).collect();
        let b: Vec<i64> = a
            .iter()
            .map(|&x| if rng.gen_bool(0.6) { x } else { rng.gen_range(0..5) })
            .collect();
        let oracle = kappa_from_table(&a, &b);
        if oracle.is_finite() {
            assert!((cohen_kappa(&a, &b).unwrap() - oracle).abs() < 1e-12);
        }
    }
}

#[test]
fn f_beta_matches_weighted_harmonic_mean() {
    let beta: f64 = 0.5;
    let (p, r) = (0.5, 1.0);
    let w = beta * beta / (1.0 + beta * beta);
    let harmonic = 1.0 / ((1.0 - w) / p + w / r);
    assert!((f_beta(p, r, beta) - harmonic).abs() < 1e-15);
    assert!((harmonic - 0.5556).abs() < 5e-5);
}

#[test]
fn sample_counts_by_enumeration() {
    let corpus = parse_m2(SAMPLE).unwrap();
    let gold0: Vec<Edit> = corpus.sentences[0].edits_for(0).cloned().collect();
    let hyp = [Edit::new(3..4, ErrorLabel::Spell, "맞았습니다", 0)];
    // Hand enumeration: the hypothesis edit shares a span with gold edit 2
    // but not its correction; nothing matches.
    assert_eq!(match_edits(&hyp, &gold0, MatchOptions::default()), MatchCounts::new(0, 1, 2));
}

const TOKENS: [&str; 5] = ["가", "나", "가나", "나가", "음식"];

/// Minimum cost over every valid edit script, enumerated recursively.
fn exhaustive_cost(src: &[&str], tgt: &[&str], sub: &dyn Fn(&str, &str) -> f64) -> f64 {
    fn go(src: &[&str], tgt: &[&str], i: usize, j: usize, acc: f64, sub: &dyn Fn(&str, &str) -> f64, best: &mut f64) {
        if i == src.len() && j == tgt.len() {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        if i < src.len() && j < tgt.len() {
            if src[i] == tgt[j] {
                go(src, tgt, i + 1, j + 1, acc, sub, best);
            } else {
                go(src, tgt, i + 1, j + 1, acc + sub(src[i], tgt[j]), sub, best);
            }
        }
        if i < src.len() {
            go(src, tgt, i + 1, j, acc + 1.0, sub, best);
        }
        if j < tgt.len() {
            go(src, tgt, i, j + 1, acc + 1.0, sub, best);
        }
        if i + 1 < src.len() && j + 1 < tgt.len() && src[i] != src[i + 1] && src[i] == tgt[j + 1] && src[i + 1] == tgt[j] {
            go(src, tgt, i + 2, j + 2, acc + 1.0, sub, best);
        }
        if i < src.len() && j + 1 < tgt.len() && format!("{}{}", tgt[j], tgt[j + 1]) == src[i] {
            go(src, tgt, i + 1, j + 2, acc + 0.5, sub, best);
        }
        if i + 1 < src.len() && j < tgt.len() && format!("{}{}", src[i], src[i + 1]) == tgt[j] {
            go(src, tgt, i + 2, j + 1, acc + 0.5, sub, best);
        }
    }
    let mut best = f64::INFINITY;
    go(src, tgt, 0, 0, 0.0, sub, &mut best);
    best
}

fn sequences(max_len: usize) -> Vec<Vec<&'static str>> {
    let mut all = vec![vec![]];
    let mut frontier: Vec<Vec<&str>> = vec![vec![]];
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|s| TOKENS.iter().map(move |t| [s.as_slice(), &[*t]].concat()))
            .collect();
        all.extend(frontier.iter().cloned());
    }
    all
}

#[test]
fn aligner_is_optimal_on_short_sequences() {
    let lexicon = Lexicon::default();
    let aligner = Aligner::default();
    let sub = |a: &str, b: &str| {
        let (ja, jb) = (decompose_jamo(a).units, decompose_jamo(b).units);
        // Substitution cost is one minus similarity.
        1.0 - (1.0 - edit_distance(&ja, &jb, &mut HashMap::new()) as f64 / ja.len().max(jb.len()) as f64)
    };
    let seqs = sequences(3);
    for s in &seqs {
        let se: Vec<Eojeol> = s.iter().map(|t| Eojeol::new(t, &lexicon)).collect();
        for t in &seqs {
            let te: Vec<Eojeol> = t.iter().map(|x| Eojeol::new(x, &lexicon)).collect();
            let (_, cost) = aligner.align_with_cost(&se, &te);
            assert_eq!(cost, exhaustive_cost(s, t, &sub), "{s:?} -> {t:?}");
        }
    }
}

#[test]
fn uniform_ratings_have_near_zero_kappa() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let a: Vec<u8> = (0..100_000).map(|_| rng.gen_range(0..5)).collect();
    let b: Vec<u8> = (0..100_000).map(|_| rng.gen_range(0..5)).collect();
    assert!(cohen_kappa(&a, &b).unwrap().abs() < 0.05);
}

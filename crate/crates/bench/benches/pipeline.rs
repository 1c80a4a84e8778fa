use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use kogec_bench::{score_sheets, sentence_pairs};
use kogec_core::m2::{parse_m2, serialize_m2, AnnotatedSentence, M2Corpus};
use kogec_core::rubric::kappa_report;
use kogec_core::scorer::{evaluate, MatchOptions};
use kogec_core::{tokenize, Aligner, ErrorAnnotator, Lexicon};

fn bench_align(c: &mut Criterion) {
    let lexicon = Lexicon::default();
    let aligner = Aligner::default();
    let mut group = c.benchmark_group("align");
    for len in [8, 16, 32] {
        let pairs: Vec<_> = sentence_pairs(64, len, 7)
            .into_iter()
            .map(|(s, t)| (tokenize(&s, &lexicon), tokenize(&t, &lexicon)))
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(len), &pairs, |b, pairs| {
            b.iter(|| {
                for (s, t) in pairs {
                    black_box(aligner.align(s, t));
                }
            })
        });
    }
    group.finish();
}

fn annotated_corpus(pairs: &[(String, String)], annotator: &ErrorAnnotator) -> M2Corpus {
    M2Corpus::new(
        pairs
            .iter()
            .map(|(s, t)| {
                let mut sentence = AnnotatedSentence::from_text(s);
                sentence.edits = annotator.annotate_pair(s, t, 0);
                sentence
            })
            .collect(),
    )
}

fn bench_annotate(c: &mut Criterion) {
    let annotator = ErrorAnnotator::default();
    let pairs = sentence_pairs(256, 12, 11);
    c.bench_function("annotate_pair/256x12", |b| {
        b.iter(|| {
            for (s, t) in &pairs {
                black_box(annotator.annotate_pair(s, t, 0));
            }
        })
    });
}

fn bench_m2(c: &mut Criterion) {
    let annotator = ErrorAnnotator::default();
    let corpus = annotated_corpus(&sentence_pairs(1419, 9, 3), &annotator);
    let text = serialize_m2(&corpus);
    c.bench_function("parse_m2/1419", |b| b.iter(|| parse_m2(black_box(&text)).unwrap()));
    c.bench_function("serialize_m2/1419", |b| b.iter(|| serialize_m2(black_box(&corpus))));
    c.bench_function("evaluate/1419", |b| {
        b.iter(|| evaluate(&corpus, &corpus, 0.5, MatchOptions::default()).unwrap())
    });
}

fn bench_kappa(c: &mut Criterion) {
    let sheets = score_sheets(5);
    c.bench_function("kappa_report/4x250", |b| b.iter(|| kappa_report(black_box(&sheets)).unwrap()));
}

criterion_group!(benches, bench_align, bench_annotate, bench_m2, bench_kappa);
criterion_main!(benches);

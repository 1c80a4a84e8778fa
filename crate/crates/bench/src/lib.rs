//! Deterministic synthetic inputs shared by the benchmarks.

use kogec_core::rubric::{LearnerGroup, ScoreSheet, COLUMNS};

const WORDS: [&str; 12] = [
    "비행기", "음식이", "음식을", "안", "먹었습니다", "막였습니다", "학교에", "학교", "할수", "할", "수", "있다",
];

/// Small linear congruential generator so fixtures are identical everywhere.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// `count` (source, target) sentence pairs of roughly `len` tokens, the
/// target being a perturbed copy of the source.
pub fn sentence_pairs(count: usize, len: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = Lcg::new(seed);
    (0..count)
        .map(|_| {
            let src: Vec<&str> = (0..len).map(|_| WORDS[rng.below(WORDS.len())]).collect();
            let tgt: Vec<&str> = src
                .iter()
                .map(|&w| if rng.below(4) == 0 { WORDS[rng.below(WORDS.len())] } else { w })
                .collect();
            (src.join(" "), tgt.join(" "))
        })
        .collect()
}

pub fn score_sheets(seed: u64) -> Vec<ScoreSheet> {
    let mut rng = Lcg::new(seed);
    LearnerGroup::ALL
        .into_iter()
        .map(|g| {
            let r0: Vec<i64> = (0..COLUMNS).map(|_| rng.below(11) as i64).collect();
            let r1: Vec<i64> = r0
                .iter()
                .map(|&v| if rng.below(5) == 0 { rng.below(11) as i64 } else { v })
                .collect();
            ScoreSheet::from_grid(g, [r0, r1])
        })
        .collect()
}

//! Token-level edit alignment between a learner sentence and its correction.
//!
//! The aligner is a weighted edit distance with three extra operations that
//! matter for Korean spacing and word order: a 1→2 split, a 2→1 merge and an
//! adjacent transposition. Costs live in [`AlignCosts`].

use std::fmt;
use std::ops::Range;

use crate::hangul::{jamo_similarity, Eojeol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Equal,
    Substitute,
    Insert,
    Delete,
    Transpose,
    Split,
    Merge,
}

impl OpKind {
    /// Backtrace preference when several predecessors reach the same cost;
    /// lower wins.
    fn preference(self) -> u8 {
        match self {
            OpKind::Equal => 0,
            OpKind::Merge => 1,
            OpKind::Split => 2,
            OpKind::Transpose => 3,
            OpKind::Substitute => 4,
            OpKind::Delete => 5,
            OpKind::Insert => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Equal => "EQUAL",
            OpKind::Substitute => "SUBSTITUTE",
            OpKind::Insert => "INSERT",
            OpKind::Delete => "DELETE",
            OpKind::Transpose => "TRANSPOSE",
            OpKind::Split => "SPLIT",
            OpKind::Merge => "MERGE",
        }
    }

    /// Source and target span lengths this kind always has.
    pub fn span_lengths(self) -> (usize, usize) {
        match self {
            OpKind::Equal | OpKind::Substitute => (1, 1),
            OpKind::Insert => (0, 1),
            OpKind::Delete => (1, 0),
            OpKind::Transpose => (2, 2),
            OpKind::Split => (1, 2),
            OpKind::Merge => (2, 1),
        }
    }
}

/// One step of an edit script. Spans are half-open token ranges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlignOp {
    pub kind: OpKind,
    pub src: Range<usize>,
    pub tgt: Range<usize>,
}

impl AlignOp {
    pub fn new(kind: OpKind, src: Range<usize>, tgt: Range<usize>) -> Self {
        AlignOp { kind, src, tgt }
    }
}

impl fmt::Display for AlignOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}..{},{}..{})",
            self.kind.name(),
            self.src.start,
            self.src.end,
            self.tgt.start,
            self.tgt.end
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignCosts {
    pub insert: f64,
    pub delete: f64,
    pub transpose: f64,
    pub split: f64,
    pub merge: f64,
}

impl Default for AlignCosts {
    fn default() -> Self {
        AlignCosts {
            insert: 1.0,
            delete: 1.0,
            transpose: 1.0,
            split: 0.5,
            merge: 0.5,
        }
    }
}

impl AlignCosts {
    pub fn substitute(&self, a: &str, b: &str) -> f64 {
        1.0 - jamo_similarity(a, b)
    }

    /// Cost of a single operation, or `None` when the operation's defining
    /// condition does not hold for these tokens.
    pub fn op_cost(&self, op: &AlignOp, source: &[Eojeol], target: &[Eojeol]) -> Option<f64> {
        let s = |i: usize| source[op.src.start + i].surface.as_str();
        let t = |i: usize| target[op.tgt.start + i].surface.as_str();
        let (sl, tl) = op.kind.span_lengths();
        if op.src.len() != sl
            || op.tgt.len() != tl
            || op.src.end > source.len()
            || op.tgt.end > target.len()
        {
            return None;
        }
        match op.kind {
            OpKind::Equal => (s(0) == t(0)).then_some(0.0),
            OpKind::Substitute => (s(0) != t(0)).then(|| self.substitute(s(0), t(0))),
            OpKind::Insert => Some(self.insert),
            OpKind::Delete => Some(self.delete),
            OpKind::Transpose => {
                (s(0) != s(1) && s(0) == t(1) && s(1) == t(0)).then_some(self.transpose)
            }
            OpKind::Split => is_concat(s(0), t(0), t(1)).then_some(self.split),
            OpKind::Merge => is_concat(t(0), s(0), s(1)).then_some(self.merge),
        }
    }

    /// Sum of op costs, accumulated left to right. `None` if any op is
    /// invalid for these sequences.
    pub fn script_cost(&self, ops: &[AlignOp], source: &[Eojeol], target: &[Eojeol]) -> Option<f64> {
        ops.iter()
            .try_fold(0.0, |acc, op| Some(acc + self.op_cost(op, source, target)?))
    }
}

fn is_concat(whole: &str, left: &str, right: &str) -> bool {
    whole.len() == left.len() + right.len() && whole.starts_with(left) && whole.ends_with(right)
}

#[derive(Debug, Clone)]
pub struct Aligner {
    pub costs: AlignCosts,
}

impl Default for Aligner {
    fn default() -> Self {
        Aligner::new(AlignCosts::default())
    }
}

impl Aligner {
    pub fn new(costs: AlignCosts) -> Self {
        Aligner { costs }
    }

    /// Minimum-cost edit script. Ties are broken at each backtrace step by
    /// `EQUAL, MERGE, SPLIT, TRANSPOSE, SUBSTITUTE, DELETE, INSERT`.
    pub fn align(&self, source: &[Eojeol], target: &[Eojeol]) -> Vec<AlignOp> {
        self.align_with_cost(source, target).0
    }

    pub fn align_with_cost(&self, source: &[Eojeol], target: &[Eojeol]) -> (Vec<AlignOp>, f64) {
        let n = source.len();
        let m = target.len();
        let width = m + 1;
        let mut cost = vec![f64::INFINITY; (n + 1) * width];
        let mut back: Vec<Option<OpKind>> = vec![None; (n + 1) * width];
        cost[0] = 0.0;

        for i in 0..=n {
            for j in 0..=m {
                if i == 0 && j == 0 {
                    continue;
                }
                let mut best = f64::INFINITY;
                let mut best_kind: Option<OpKind> = None;
                for kind in candidate_kinds() {
                    let (sl, tl) = kind.span_lengths();
                    if sl > i || tl > j {
                        continue;
                    }
                    let prev = cost[(i - sl) * width + (j - tl)];
                    if prev.is_infinite() {
                        continue;
                    }
                    let op = AlignOp::new(kind, i - sl..i, j - tl..j);
                    let Some(c) = self.costs.op_cost(&op, source, target) else {
                        continue;
                    };
                    let total = prev + c;
                    let better = match best_kind {
                        None => true,
                        Some(bk) => {
                            total < best || (total == best && kind.preference() < bk.preference())
                        }
                    };
                    if better {
                        best = total;
                        best_kind = Some(kind);
                    }
                }
                cost[i * width + j] = best;
                back[i * width + j] = best_kind;
            }
        }

        let mut ops = Vec::new();
        let (mut i, mut j) = (n, m);
        while i > 0 || j > 0 {
            let kind = back[i * width + j].expect("every cell is reachable through insert/delete");
            let (sl, tl) = kind.span_lengths();
            ops.push(AlignOp::new(kind, i - sl..i, j - tl..j));
            i -= sl;
            j -= tl;
        }
        ops.reverse();
        (ops, cost[n * width + m])
    }
}

fn candidate_kinds() -> [OpKind; 7] {
    [
        OpKind::Equal,
        OpKind::Merge,
        OpKind::Split,
        OpKind::Transpose,
        OpKind::Substitute,
        OpKind::Delete,
        OpKind::Insert,
    ]
}

/// Alignment with default costs.
pub fn align(source: &[Eojeol], target: &[Eojeol]) -> Vec<AlignOp> {
    Aligner::default().align(source, target)
}

/// Rewrites DELETE/INSERT runs that encode a split, merge or adjacent swap
/// into the dedicated operation. Anything else passes through.
pub fn merge_ops(ops: &[AlignOp], source: &[Eojeol], target: &[Eojeol]) -> Vec<AlignOp> {
    let s = |i: usize| source[i].surface.as_str();
    let t = |j: usize| target[j].surface.as_str();
    let mut out = Vec::with_capacity(ops.len());
    let mut k = 0;
    while k < ops.len() {
        if let Some(window) = ops.get(k..k + 3) {
            if let Some(rewritten) = rewrite_triple(window, &s, &t) {
                out.push(rewritten);
                k += 3;
                continue;
            }
        }
        out.push(ops[k].clone());
        k += 1;
    }
    out
}

fn rewrite_triple<'a>(
    window: &[AlignOp],
    s: &dyn Fn(usize) -> &'a str,
    t: &dyn Fn(usize) -> &'a str,
) -> Option<AlignOp> {
    let kinds = [window[0].kind, window[1].kind, window[2].kind];
    let src = window[0].src.start..window[2].src.end;
    let tgt = window[0].tgt.start..window[2].tgt.end;
    let dels = kinds.iter().filter(|&&k| k == OpKind::Delete).count();
    let ins = kinds.iter().filter(|&&k| k == OpKind::Insert).count();

    // One deleted token against two inserted ones (or the reverse), in any
    // interleaving: both sides are contiguous because DELETE/INSERT consume
    // only one sequence each.
    if dels == 1 && ins == 2 {
        let (a, b) = (t(tgt.start), t(tgt.start + 1));
        return is_concat(s(src.start), a, b).then(|| AlignOp::new(OpKind::Split, src, tgt));
    }
    if dels == 2 && ins == 1 {
        let (a, b) = (s(src.start), s(src.start + 1));
        return is_concat(t(tgt.start), a, b).then(|| AlignOp::new(OpKind::Merge, src, tgt));
    }
    // DELETE x, EQUAL y, INSERT x (or mirrored) is a swap of two neighbours.
    let swap = matches!(
        kinds,
        [OpKind::Delete, OpKind::Equal, OpKind::Insert] | [OpKind::Insert, OpKind::Equal, OpKind::Delete]
    );
    if swap
        && src.len() == 2
        && tgt.len() == 2
        && s(src.start) != s(src.start + 1)
        && s(src.start) == t(tgt.start + 1)
        && s(src.start + 1) == t(tgt.start)
    {
        return Some(AlignOp::new(OpKind::Transpose, src, tgt));
    }
    None
}

/// Checks the span-length and partition invariants of an edit script.
pub fn check_script(ops: &[AlignOp], source: &[Eojeol], target: &[Eojeol]) -> Result<(), String> {
    let (mut i, mut j) = (0, 0);
    for (idx, op) in ops.iter().enumerate() {
        if op.src.start != i || op.tgt.start != j {
            return Err(format!("op {idx} ({op}) does not continue at {i},{j}"));
        }
        if AlignCosts::default().op_cost(op, source, target).is_none() {
            return Err(format!("op {idx} ({op}) violates its defining condition"));
        }
        i = op.src.end;
        j = op.tgt.end;
    }
    if i != source.len() || j != target.len() {
        return Err(format!(
            "script ends at {i},{j} but sequences have lengths {},{}",
            source.len(),
            target.len()
        ));
    }
    Ok(())
}

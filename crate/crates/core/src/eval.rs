//! Attachment scores, corpus statistics, k-fold cross-validation and the
//! paired t-test.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::conllx::{Sentence, Token, Treebank};
use crate::parser::{parse_sentence, train, ParserError};
use crate::schema::Schema;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("sentence {sentence}: {reason}")]
    TokenMismatch { sentence: usize, reason: String },
    #[error("k = {k} folds requested for {n} sentences")]
    KTooLarge { k: usize, n: usize },
    #[error("k must be at least 1")]
    ZeroFolds,
    #[error("score sequences differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("at least two paired scores are needed")]
    TooFewSamples,
    #[error("all paired differences are equal")]
    ZeroVariance,
    #[error("baseline mean is zero")]
    ZeroBase,
    #[error(transparent)]
    Parser(#[from] ParserError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOptions {
    pub exclude_punct: bool,
    pub exclude_root_dot_distance: bool,
    /// Fine POS tags treated as punctuation.
    pub punct_pos: Vec<String>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            exclude_punct: false,
            exclude_root_dot_distance: false,
            punct_pos: vec!["G-".into()],
        }
    }
}

impl EvalOptions {
    pub fn for_schema(schema: &Schema) -> Self {
        EvalOptions {
            punct_pos: schema.punctuation_pos.iter().cloned().collect(),
            ..Default::default()
        }
    }

    fn is_punct(&self, t: &Token) -> bool {
        if !t.postag.is_empty() {
            return self.punct_pos.contains(&t.postag);
        }
        !t.cpostag.is_empty() && self.punct_pos.iter().any(|p| p.starts_with(t.cpostag.as_str()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalReport {
    pub uas: f64,
    pub las: f64,
    pub token_count: usize,
    pub correct_head: usize,
    pub correct_head_and_label: usize,
}

impl EvalReport {
    fn from_counts(token_count: usize, correct_head: usize, correct_head_and_label: usize) -> Self {
        let pct = |x: usize| {
            if token_count == 0 {
                0.0
            } else {
                100.0 * x as f64 / token_count as f64
            }
        };
        EvalReport {
            uas: pct(correct_head),
            las: pct(correct_head_and_label),
            token_count,
            correct_head,
            correct_head_and_label,
        }
    }

    pub fn combine(&self, other: &EvalReport) -> EvalReport {
        EvalReport::from_counts(
            self.token_count + other.token_count,
            self.correct_head + other.correct_head,
            self.correct_head_and_label + other.correct_head_and_label,
        )
    }
}

fn check_alignment(gold: &Sentence, pred: &Sentence, sentence: usize) -> Result<(), EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::TokenMismatch {
            sentence,
            reason: format!("{} gold tokens vs {} predicted", gold.len(), pred.len()),
        });
    }
    if let Some((g, _)) = gold.tokens().iter().zip(pred.tokens()).find(|(g, p)| g.form != p.form) {
        return Err(EvalError::TokenMismatch {
            sentence,
            reason: format!("token {} differs in form", g.id),
        });
    }
    Ok(())
}

fn score_sentence(
    gold: &Sentence,
    pred: &Sentence,
    opts: &EvalOptions,
    sentence: usize,
) -> Result<EvalReport, EvalError> {
    check_alignment(gold, pred, sentence)?;
    let (mut n, mut head, mut both) = (0, 0, 0);
    for (g, p) in gold.tokens().iter().zip(pred.tokens()) {
        if opts.exclude_punct && opts.is_punct(g) {
            continue;
        }
        n += 1;
        if g.head == p.head {
            head += 1;
            if g.deprel == p.deprel {
                both += 1;
            }
        }
    }
    Ok(EvalReport::from_counts(n, head, both))
}

/// UAS and LAS of one predicted sentence against its gold tree.
pub fn attachment_scores(gold: &Sentence, pred: &Sentence, opts: &EvalOptions) -> Result<EvalReport, EvalError> {
    score_sentence(gold, pred, opts, 1)
}

/// Micro-averaged scores over aligned treebanks.
pub fn treebank_scores(gold: &Treebank, pred: &Treebank, opts: &EvalOptions) -> Result<EvalReport, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::TokenMismatch {
            sentence: gold.len().min(pred.len()) + 1,
            reason: format!("{} gold sentences vs {} predicted", gold.len(), pred.len()),
        });
    }
    let mut total = EvalReport::default();
    for (i, (g, p)) in gold.iter().zip(pred.iter()).enumerate() {
        total = total.combine(&score_sentence(g, p, opts, i + 1)?);
    }
    Ok(total)
}

/// Arc direction counts. Root arcs run rightward from position 0 and are
/// counted as RIGHT; `root` reports how many of them there are.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DirectionStats {
    pub total: usize,
    pub left: usize,
    pub right: usize,
    pub root: usize,
    pub left_pct: f64,
    pub right_pct: f64,
}

impl DirectionStats {
    pub fn from_counts(left: usize, total: usize, root: usize) -> Self {
        let pct = |x: usize| {
            if total == 0 {
                0.0
            } else {
                100.0 * x as f64 / total as f64
            }
        };
        DirectionStats {
            total,
            left,
            right: total - left,
            root,
            left_pct: pct(left),
            right_pct: pct(total - left),
        }
    }
}

/// Counts (head, dependent) pairs: LEFT when the head follows the dependent.
pub fn direction_counts(arcs: &[(usize, usize)]) -> DirectionStats {
    let left = arcs.iter().filter(|(h, d)| h > d).count();
    let root = arcs.iter().filter(|(h, _)| *h == 0).count();
    DirectionStats::from_counts(left, arcs.len(), root)
}

pub fn direction_stats(tb: &Treebank) -> DirectionStats {
    let arcs: Vec<(usize, usize)> = tb
        .iter()
        .flat_map(|s| s.tokens().iter().map(|t| (t.head, t.id)))
        .collect();
    direction_counts(&arcs)
}

/// Dependency distance of a non-root arc: tokens strictly between the two.
pub fn arc_distance(head: usize, dependent: usize) -> usize {
    head.abs_diff(dependent).saturating_sub(1)
}

pub type DistanceHistogram = BTreeMap<usize, usize>;

/// Distance histograms for root arcs (main word position minus one) and for
/// all other arcs.
pub fn distance_histogram(tb: &Treebank, opts: &EvalOptions) -> (DistanceHistogram, DistanceHistogram) {
    let mut root = DistanceHistogram::new();
    let mut other = DistanceHistogram::new();
    for s in tb.iter() {
        for t in s.tokens() {
            if t.head == 0 {
                let final_dot = t.id == s.len() && opts.is_punct(t);
                if opts.exclude_root_dot_distance && final_dot {
                    continue;
                }
                *root.entry(t.id - 1).or_insert(0) += 1;
            } else {
                *other.entry(arc_distance(t.head, t.id)).or_insert(0) += 1;
            }
        }
    }
    (root, other)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CardinalityClass {
    Rare,
    Low,
    Medium,
    High,
    VeryHigh,
}

impl CardinalityClass {
    /// Band of a label share given in percent.
    pub fn of_share(pct: f64) -> Self {
        match pct {
            p if p < 1.0 => CardinalityClass::Rare,
            p if p < 5.0 => CardinalityClass::Low,
            p if p < 10.0 => CardinalityClass::Medium,
            p if p < 30.0 => CardinalityClass::High,
            _ => CardinalityClass::VeryHigh,
        }
    }
}

impl fmt::Display for CardinalityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CardinalityClass::Rare => "rare",
            CardinalityClass::Low => "low",
            CardinalityClass::Medium => "medium",
            CardinalityClass::High => "high",
            CardinalityClass::VeryHigh => "very-high",
        })
    }
}

/// Share of all arcs carried by each label, in percent.
pub fn label_shares(tb: &Treebank) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in tb.iter().flat_map(|s| s.tokens()) {
        *counts.entry(t.deprel.clone()).or_insert(0) += 1;
    }
    let total = tb.token_count() as f64;
    counts.into_iter().map(|(l, c)| (l, 100.0 * c as f64 / total)).collect()
}

pub fn cardinality_classes(tb: &Treebank) -> BTreeMap<String, CardinalityClass> {
    label_shares(tb)
        .into_iter()
        .map(|(l, pct)| (l, CardinalityClass::of_share(pct)))
        .collect()
}

/// Contiguous folds in file order; the first `n % k` test blocks hold one
/// extra sentence.
pub fn kfold_split(tb: &Treebank, k: usize) -> Result<Vec<(Treebank, Treebank)>, EvalError> {
    let n = tb.len();
    if k == 0 {
        return Err(EvalError::ZeroFolds);
    }
    if k > n {
        return Err(EvalError::KTooLarge { k, n });
    }
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = n / k + usize::from(i < n % k);
        let end = start + size;
        let test: Treebank = tb.sentences[start..end].iter().cloned().collect();
        let train: Treebank = tb.sentences[..start]
            .iter()
            .chain(&tb.sentences[end..])
            .cloned()
            .collect();
        folds.push((train, test));
        start = end;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldScores {
    /// Per fold (uas, las).
    pub folds: Vec<(f64, f64)>,
    pub avg_uas: f64,
    pub avg_las: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn run_fold(
    train_tb: &Treebank,
    test_tb: &Treebank,
    epochs: usize,
    seed: u64,
    schema: &Schema,
    opts: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    let (model, _) = train(train_tb, epochs, seed, schema)?;
    let pred: Treebank = test_tb.iter().map(|s| parse_sentence(s, &model)).collect();
    treebank_scores(test_tb, &pred, opts)
}

/// Trains and evaluates one model per fold. With `k = 1` the single fold
/// has no training data, so the model is trained on the test block itself.
pub fn cross_validate(
    tb: &Treebank,
    k: usize,
    epochs: usize,
    seed: u64,
    schema: &Schema,
    opts: &EvalOptions,
) -> Result<FoldScores, EvalError> {
    let folds = kfold_split(tb, k)?;
    let run = |(train_tb, test_tb): &(Treebank, Treebank)| {
        let train_tb = if train_tb.is_empty() { test_tb } else { train_tb };
        run_fold(train_tb, test_tb, epochs, seed, schema, opts)
    };
    #[cfg(feature = "parallel")]
    let reports: Vec<Result<EvalReport, EvalError>> = {
        use rayon::prelude::*;
        folds.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let reports: Vec<Result<EvalReport, EvalError>> = folds.iter().map(run).collect();

    let folds: Vec<(f64, f64)> = reports
        .into_iter()
        .map(|r| r.map(|r| (r.uas, r.las)))
        .collect::<Result<_, _>>()?;
    let uas: Vec<f64> = folds.iter().map(|f| f.0).collect();
    let las: Vec<f64> = folds.iter().map(|f| f.1).collect();
    Ok(FoldScores {
        avg_uas: mean(&uas),
        avg_las: mean(&las),
        folds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub df: usize,
    pub mean_diff: f64,
}

/// Paired t-test on `b - a`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch { a: a.len(), b: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(EvalError::TooFewSamples);
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    if d.iter().all(|&x| x == d[0]) {
        return Err(EvalError::ZeroVariance);
    }
    let m = mean(&d);
    let var = d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = m / (var.sqrt() / (n as f64).sqrt());
    let df = n - 1;
    Ok(TTest {
        t,
        p: student_t_two_sided(t, df as f64),
        df,
        mean_diff: m,
    })
}

/// Relative change of the mean, in percent of the baseline mean.
pub fn improvement_pct(base: &[f64], new: &[f64]) -> Result<f64, EvalError> {
    if base.len() != new.len() {
        return Err(EvalError::LengthMismatch {
            a: base.len(),
            b: new.len(),
        });
    }
    if base.is_empty() {
        return Err(EvalError::TooFewSamples);
    }
    let mb = mean(base);
    if mb == 0.0 {
        return Err(EvalError::ZeroBase);
    }
    Ok(100.0 * (mean(new) - mb) / mb)
}

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Lanczos approximation (g = 7, n = 9) of ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// I_x(a, b) via the continued fraction, using the symmetry relation when
/// it converges faster.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllx::Token;

    fn sent(spec: &[(usize, &str)]) -> Sentence {
        Sentence::new(
            spec.iter()
                .enumerate()
                .map(|(i, &(h, l))| {
                    Token::new(i + 1, format!("w{}", i + 1))
                        .with_pos("N", "N-")
                        .with_head(h, l)
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn scores() {
        let gold = sent(&[(0, "TOPIC"), (1, "GEN"), (1, "PRED-VP"), (3, "AGENT"), (3, "OBJ")]);
        let opts = EvalOptions::default();
        let r = attachment_scores(&gold, &gold, &opts).unwrap();
        assert_eq!((r.uas, r.las), (100.0, 100.0));

        // One wrong head (token 2), one wrong label on a correct head (token 5).
        let pred = sent(&[(0, "TOPIC"), (3, "GEN"), (1, "PRED-VP"), (3, "AGENT"), (3, "ADJ")]);
        let r = attachment_scores(&gold, &pred, &opts).unwrap();
        assert_eq!((r.uas, r.las), (80.0, 60.0));
        assert!(r.las <= r.uas);

        let short = sent(&[(0, "TOPIC")]);
        assert!(matches!(
            attachment_scores(&gold, &short, &opts),
            Err(EvalError::TokenMismatch { .. })
        ));
    }

    #[test]
    fn punctuation_exclusion() {
        let mut gold = sent(&[(0, "TOPIC"), (1, "PRED-NOUN"), (0, "END")]).into_tokens();
        gold[2] = gold[2].clone().with_pos("G", "G-");
        let gold = Sentence::new(gold).unwrap();
        let mut pred = gold.clone().into_tokens();
        pred[2].head = 1;
        let pred = Sentence::new(pred).unwrap();
        let mut opts = EvalOptions::default();
        assert_eq!(attachment_scores(&gold, &pred, &opts).unwrap().token_count, 3);
        opts.exclude_punct = true;
        let r = attachment_scores(&gold, &pred, &opts).unwrap();
        assert_eq!((r.token_count, r.uas), (2, 100.0));
    }

    #[test]
    fn directions() {
        let chain: Treebank = [sent(&[(0, "A"), (1, "B"), (2, "C")])].into_iter().collect();
        let d = direction_stats(&chain);
        assert_eq!((d.left, d.right, d.right_pct), (0, 3, 100.0));

        let toy: Treebank = [sent(&[(2, "A"), (0, "B"), (2, "C")])].into_iter().collect();
        let d = direction_stats(&toy);
        assert_eq!(d.left, 1);
        assert!((d.left_pct - 33.33).abs() < 0.005);

        let arcs = [(2, 1), (3, 2), (1, 4), (5, 3)];
        let reversed: Vec<_> = arcs.iter().map(|&(h, d)| (d, h)).collect();
        let (a, b) = (direction_counts(&arcs), direction_counts(&reversed));
        assert_eq!((a.left, a.right), (b.right, b.left));
    }

    #[test]
    fn distances() {
        assert_eq!(arc_distance(3, 4), 0);
        assert_eq!(arc_distance(1, 5), 3);
        assert_eq!(arc_distance(5, 1), arc_distance(1, 5));

        let tb: Treebank = [sent(&[(0, "TOPIC"), (1, "GEN"), (1, "PRED-PP")])]
            .into_iter()
            .collect();
        let (root, other) = distance_histogram(&tb, &EvalOptions::default());
        assert_eq!(root.get(&0), Some(&1));
        assert_eq!(other.values().sum::<usize>(), 2);
    }

    #[test]
    fn cardinality_bands() {
        assert_eq!(CardinalityClass::of_share(35.0), CardinalityClass::VeryHigh);
        assert_eq!(CardinalityClass::of_share(0.5), CardinalityClass::Rare);
        assert_eq!(CardinalityClass::of_share(20.0), CardinalityClass::High);
        assert_eq!(CardinalityClass::of_share(4.5), CardinalityClass::Low);
        assert_eq!(CardinalityClass::of_share(9.5), CardinalityClass::Medium);
        assert_eq!(CardinalityClass::of_share(30.0).to_string(), "very-high");
    }

    #[test]
    fn folds() {
        let tb: Treebank = (0..300).map(|_| sent(&[(0, "TOPIC")])).collect();
        let f = kfold_split(&tb, 10).unwrap();
        assert!(f.iter().all(|(train, test)| test.len() == 30 && train.len() == 270));
        let tb: Treebank = (0..23).map(|_| sent(&[(0, "TOPIC")])).collect();
        let sizes: Vec<_> = kfold_split(&tb, 5).unwrap().iter().map(|f| f.1.len()).collect();
        assert_eq!(sizes, [5, 5, 5, 4, 4]);
        let tb: Treebank = (0..5).map(|_| sent(&[(0, "TOPIC")])).collect();
        assert_eq!(kfold_split(&tb, 10).unwrap_err(), EvalError::KTooLarge { k: 10, n: 5 });
        assert_eq!(kfold_split(&tb, 0).unwrap_err(), EvalError::ZeroFolds);
    }

    #[test]
    fn t_test_errors() {
        assert_eq!(
            paired_t_test(&[1.0, 2.0], &[1.0, 2.0]).unwrap_err(),
            EvalError::ZeroVariance
        );
        assert!(matches!(
            paired_t_test(&[1.0], &[1.0, 2.0]),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert_eq!(improvement_pct(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(improvement_pct(&[0.0], &[1.0]).unwrap_err(), EvalError::ZeroBase);
    }

    const UAS_PADT: [f64; 10] = [77.4, 78.5, 75.4, 75.7, 81.8, 78.2, 79.2, 76.4, 75.2, 80.6];
    const UAS_I3RAB: [f64; 10] = [90.4, 84.4, 82.4, 83.3, 84.3, 77.9, 83.4, 81.7, 82.5, 86.4];
    const LAS_PADT: [f64; 10] = [66.8, 65.8, 62.0, 63.3, 69.4, 66.4, 69.7, 65.4, 64.4, 70.1];
    const LAS_I3RAB: [f64; 10] = [88.3, 79.7, 76.4, 77.6, 79.1, 72.7, 78.3, 76.0, 78.2, 81.7];

    #[test]
    fn published_fold_vectors() {
        for (v, m) in [
            (&UAS_PADT, 77.84),
            (&UAS_I3RAB, 83.67),
            (&LAS_PADT, 66.33),
            (&LAS_I3RAB, 78.80),
        ] {
            assert!((mean(v) - m).abs() <= 0.005, "{} vs {m}", mean(v));
        }
        // Reference values from scipy.stats.ttest_rel.
        let u = paired_t_test(&UAS_PADT, &UAS_I3RAB).unwrap();
        assert!((u.t - 5.2810965665039475).abs() < 1e-9);
        assert!((u.p - 0.000506367053616169).abs() < 1e-8);
        assert_eq!(u.df, 9);
        let l = paired_t_test(&LAS_PADT, &LAS_I3RAB).unwrap();
        assert!((l.t - 9.429397947762634).abs() < 1e-9);
        assert!((l.p - 5.822265913930473e-06).abs() < 1e-8);
        assert!((improvement_pct(&UAS_PADT, &UAS_I3RAB).unwrap() - 7.489722507708098).abs() < 1e-9);
        assert!((improvement_pct(&LAS_PADT, &LAS_I3RAB).unwrap() - 18.799939695462104).abs() < 1e-9);
    }

    #[test]
    fn two_sided_p_reference_values() {
        // scipy.stats.t.sf(t, 9) * 2
        let cases = [
            (0.5, 0.6290712998260264),
            (2.262, 0.05001284550245455),
            (5.28, 0.0005071031710463585),
            (9.4, 5.974105120491206e-06),
        ];
        for (t, p) in cases {
            assert!((student_t_two_sided(t, 9.0) - p).abs() < 1e-8, "t = {t}");
            assert_eq!(student_t_two_sided(-t, 9.0), student_t_two_sided(t, 9.0));
        }
    }

    #[test]
    fn special_functions() {
        // Γ(5) = 24, Γ(1/2) = √π.
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        // I_x(1, 1) = x.
        assert!((regularized_incomplete_beta(1.0, 1.0, 0.3) - 0.3).abs() < 1e-12);
        assert_eq!(student_t_two_sided(0.0, 9.0), 1.0);
        let ps: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&t| student_t_two_sided(t, 9.0))
            .collect();
        assert!(ps.windows(2).all(|w| w[1] < w[0]));
    }
}

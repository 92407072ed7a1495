//! Greedy arc-eager transition parser with an averaged perceptron.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::conllx::{Sentence, Token, Treebank};
use crate::schema::Schema;

pub const MODEL_HEADER: &str = "I3RAB-MODEL v1";

/// Feature templates, in extraction order.
pub const TEMPLATES: &[&str] = &[
    "s0.form",
    "s0.lemma",
    "s0.cpos",
    "s0.pos",
    "s0.feats",
    "s1.form",
    "s1.cpos",
    "s1.pos",
    "b0.form",
    "b0.lemma",
    "b0.cpos",
    "b0.pos",
    "b0.feats",
    "b1.form",
    "b1.cpos",
    "b1.pos",
    "s0.pos+b0.pos",
    "s1.pos+s0.pos",
    "b0.pos+b1.pos",
    "s0.form+b0.pos",
    "s0.pos+b0.form",
    "s0.form+b0.form",
    "s1.pos+s0.pos+b0.pos",
    "s0.pos+b0.pos+b1.pos",
    "s0.lab",
    "s0.head.pos",
    "s0.ldep",
    "s0.rdep",
    "b0.ldep",
    "dist",
    "bias",
];

const NULL: &str = "NULL";
const ROOT: &str = "ROOT";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParserError {
    #[error("illegal transition {transition}: {reason}")]
    IllegalTransition { transition: String, reason: String },
    #[error("sentence is not projective")]
    NonProjectiveInput,
    #[error("treebank is empty")]
    EmptyTreebank,
    #[error("every training sentence is non-projective")]
    AllSentencesNonProjective,
    #[error("model was trained with schema {model}, but schema {requested} was requested")]
    SchemaMismatch { model: String, requested: String },
    #[error("model file line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Transition {
    Shift,
    LeftArc(String),
    RightArc(String),
    Reduce,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Shift => write!(f, "SHIFT"),
            Transition::LeftArc(l) => write!(f, "LEFT_ARC:{}", l),
            Transition::RightArc(l) => write!(f, "RIGHT_ARC:{}", l),
            Transition::Reduce => write!(f, "REDUCE"),
        }
    }
}

impl FromStr for Transition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SHIFT" => Ok(Transition::Shift),
            "REDUCE" => Ok(Transition::Reduce),
            _ => {
                if let Some(l) = s.strip_prefix("LEFT_ARC:").filter(|l| !l.is_empty()) {
                    Ok(Transition::LeftArc(l.into()))
                } else if let Some(l) = s.strip_prefix("RIGHT_ARC:").filter(|l| !l.is_empty()) {
                    Ok(Transition::RightArc(l.into()))
                } else {
                    Err(format!("unknown transition `{}`", s))
                }
            }
        }
    }
}

/// Parser state. Index 0 of `heads`/`labels` is the artificial root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub stack: Vec<usize>,
    /// Remaining input; the front is `buffer[0]`.
    pub buffer: Vec<usize>,
    pub heads: Vec<Option<usize>>,
    pub labels: Vec<Option<String>>,
}

impl Configuration {
    pub fn initial(n: usize) -> Self {
        Configuration {
            stack: vec![0],
            buffer: (1..=n).collect(),
            heads: vec![None; n + 1],
            labels: vec![None; n + 1],
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Arcs as (head, dependent, label), ordered by dependent.
    pub fn arcs(&self) -> BTreeSet<(usize, usize, String)> {
        (1..self.heads.len())
            .filter_map(|d| {
                let h = self.heads[d]?;
                Some((h, d, self.labels[d].clone().unwrap_or_default()))
            })
            .collect()
    }

    fn top(&self) -> Option<usize> {
        self.stack.last().copied()
    }

    fn front(&self) -> Option<usize> {
        self.buffer.first().copied()
    }

    fn legality(&self, t: &Transition) -> Result<(), &'static str> {
        self.front().ok_or("buffer is empty")?;
        let s = self.top().ok_or("stack is empty")?;
        match t {
            Transition::Shift | Transition::RightArc(_) => Ok(()),
            Transition::LeftArc(_) if s == 0 => Err("the root cannot take a head"),
            Transition::LeftArc(_) if self.heads[s].is_some() => Err("stack top already has a head"),
            Transition::LeftArc(_) => Ok(()),
            Transition::Reduce if s == 0 || self.heads[s].is_none() => Err("stack top has no head"),
            Transition::Reduce => Ok(()),
        }
    }

    fn apply_in_place(&mut self, t: &Transition) -> Result<(), ParserError> {
        self.legality(t).map_err(|reason| ParserError::IllegalTransition {
            transition: t.to_string(),
            reason: reason.into(),
        })?;
        match t {
            Transition::Shift => {
                let b = self.buffer.remove(0);
                self.stack.push(b);
            }
            Transition::LeftArc(l) => {
                let s = self.stack.pop().expect("checked");
                self.heads[s] = self.front();
                self.labels[s] = Some(l.clone());
            }
            Transition::RightArc(l) => {
                let b = self.buffer.remove(0);
                self.heads[b] = self.top();
                self.labels[b] = Some(l.clone());
                self.stack.push(b);
            }
            Transition::Reduce => {
                self.stack.pop();
            }
        }
        Ok(())
    }
}

/// Applies `t` to a copy of `c`.
pub fn apply_transition(c: &Configuration, t: &Transition) -> Result<Configuration, ParserError> {
    let mut next = c.clone();
    next.apply_in_place(t)?;
    Ok(next)
}

/// True iff no two arcs cross when drawn above the tokens. Arcs from the
/// root (position 0) are included.
pub fn is_projective(s: &Sentence) -> bool {
    let spans: Vec<(usize, usize)> = s
        .tokens()
        .iter()
        .map(|t| (t.head.min(t.id), t.head.max(t.id)))
        .collect();
    spans.iter().enumerate().all(|(i, &(a, b))| {
        spans[i + 1..]
            .iter()
            .all(|&(c, d)| !((a < c && c < b && b < d) || (c < a && a < d && d < b)))
    })
}

/// Gold transition for `c` under the static arc-eager oracle.
fn oracle_step(c: &Configuration, gold: &Sentence) -> Transition {
    let head = |id: usize| gold.tokens()[id - 1].head;
    let label = |id: usize| gold.tokens()[id - 1].deprel.clone();
    let s = c.top().expect("stack never empties before the buffer");
    let b = c.front().expect("called with a non-empty buffer");
    if s != 0 && head(s) == b {
        return Transition::LeftArc(label(s));
    }
    if head(b) == s {
        return Transition::RightArc(label(b));
    }
    let below = &c.stack[..c.stack.len() - 1];
    if s != 0 && c.heads[s].is_some() && below.iter().any(|&k| head(b) == k || (k != 0 && head(k) == b)) {
        return Transition::Reduce;
    }
    Transition::Shift
}

/// The static oracle's transition sequence for a projective tree.
pub fn oracle_sequence(s: &Sentence) -> Result<Vec<Transition>, ParserError> {
    if !is_projective(s) {
        return Err(ParserError::NonProjectiveInput);
    }
    let mut c = Configuration::initial(s.len());
    let mut seq = Vec::with_capacity(2 * s.len());
    while !c.is_terminal() {
        let t = oracle_step(&c, s);
        c.apply_in_place(&t)?;
        seq.push(t);
    }
    Ok(seq)
}

/// Replays `seq` from the initial configuration of an `n`-token sentence.
pub fn replay(n: usize, seq: &[Transition]) -> Result<Configuration, ParserError> {
    let mut c = Configuration::initial(n);
    for t in seq {
        c.apply_in_place(t)?;
    }
    Ok(c)
}

fn attr<'a>(s: &'a Sentence, id: Option<usize>, f: impl Fn(&'a Token) -> &'a str) -> &'a str {
    match id {
        None => NULL,
        Some(0) => ROOT,
        Some(i) => {
            let v = f(&s.tokens()[i - 1]);
            if v.is_empty() {
                "_"
            } else {
                v
            }
        }
    }
}

fn dep_label(c: &Configuration, head: Option<usize>, leftmost: bool) -> &str {
    let Some(h) = head else { return NULL };
    let mut deps = (1..c.heads.len()).filter(|&d| c.heads[d] == Some(h));
    let d = if leftmost { deps.next() } else { deps.next_back() };
    d.and_then(|d| c.labels[d].as_deref()).unwrap_or(NULL)
}

/// Instantiates every template over the stack top/second and the buffer
/// front/second. Deterministic in `(c, s)`.
pub fn extract_features(c: &Configuration, s: &Sentence) -> Vec<String> {
    let s0 = c.top();
    let s1 = c.stack.len().checked_sub(2).map(|i| c.stack[i]);
    let b0 = c.buffer.first().copied();
    let b1 = c.buffer.get(1).copied();
    let pos = |id| attr(s, id, |t| t.postag.as_str());
    let form = |id| attr(s, id, |t| t.form.as_str());

    let mut out = Vec::with_capacity(48);
    for &tpl in TEMPLATES {
        let value: String = match tpl {
            "s0.form" => form(s0).into(),
            "s0.lemma" => attr(s, s0, |t| t.lemma.as_str()).into(),
            "s0.cpos" => attr(s, s0, |t| t.cpostag.as_str()).into(),
            "s0.pos" => pos(s0).into(),
            "s1.form" => form(s1).into(),
            "s1.cpos" => attr(s, s1, |t| t.cpostag.as_str()).into(),
            "s1.pos" => pos(s1).into(),
            "b0.form" => form(b0).into(),
            "b0.lemma" => attr(s, b0, |t| t.lemma.as_str()).into(),
            "b0.cpos" => attr(s, b0, |t| t.cpostag.as_str()).into(),
            "b0.pos" => pos(b0).into(),
            "b1.form" => form(b1).into(),
            "b1.cpos" => attr(s, b1, |t| t.cpostag.as_str()).into(),
            "b1.pos" => pos(b1).into(),
            "s0.feats" | "b0.feats" => {
                let id = if tpl == "s0.feats" { s0 } else { b0 };
                match id {
                    Some(i) if i > 0 && !s.tokens()[i - 1].feats.is_empty() => {
                        for (k, v) in s.tokens()[i - 1].feats.iter() {
                            out.push(format!("{}={}={}", tpl, k, v));
                        }
                        continue;
                    }
                    Some(i) if i > 0 => "_".into(),
                    Some(_) => ROOT.into(),
                    None => NULL.into(),
                }
            }
            "s0.pos+b0.pos" => format!("{}|{}", pos(s0), pos(b0)),
            "s1.pos+s0.pos" => format!("{}|{}", pos(s1), pos(s0)),
            "b0.pos+b1.pos" => format!("{}|{}", pos(b0), pos(b1)),
            "s0.form+b0.pos" => format!("{}|{}", form(s0), pos(b0)),
            "s0.pos+b0.form" => format!("{}|{}", pos(s0), form(b0)),
            "s0.form+b0.form" => format!("{}|{}", form(s0), form(b0)),
            "s1.pos+s0.pos+b0.pos" => format!("{}|{}|{}", pos(s1), pos(s0), pos(b0)),
            "s0.pos+b0.pos+b1.pos" => format!("{}|{}|{}", pos(s0), pos(b0), pos(b1)),
            "s0.lab" => match s0 {
                Some(i) => c.labels[i].clone().unwrap_or_else(|| NULL.into()),
                None => NULL.into(),
            },
            "s0.head.pos" => pos(s0.and_then(|i| c.heads[i])).into(),
            "s0.ldep" => dep_label(c, s0, true).into(),
            "s0.rdep" => dep_label(c, s0, false).into(),
            "b0.ldep" => dep_label(c, b0, true).into(),
            "dist" => match (s0, b0) {
                (Some(a), Some(b)) => (b - a).min(5).to_string(),
                _ => NULL.into(),
            },
            "bias" => {
                out.push("bias".into());
                continue;
            }
            other => unreachable!("template {other} has no extractor"),
        };
        out.push(format!("{}={}", tpl, value));
    }
    out
}

/// A trained parser. Weights are indexed by the position of a transition in
/// `transitions()`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParserModel {
    pub version: String,
    pub schema_digest: String,
    pub templates: Vec<String>,
    pub labels: Vec<String>,
    /// Label for a word attached to the root by the fallback rule.
    pub root_label: String,
    /// Label for punctuation attached to the root by the fallback rule.
    pub punct_root_label: String,
    /// Label for extra headless words attached under the main word.
    pub attach_label: String,
    pub punct_pos: Vec<String>,
    pub weights: BTreeMap<String, Vec<f64>>,
}

fn transitions_for(labels: &[String]) -> Vec<Transition> {
    let mut ts = vec![Transition::Shift];
    ts.extend(labels.iter().map(|l| Transition::LeftArc(l.clone())));
    ts.extend(labels.iter().map(|l| Transition::RightArc(l.clone())));
    ts.push(Transition::Reduce);
    ts
}

fn most_frequent(counts: &BTreeMap<String, usize>, fallback: &str) -> String {
    counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(l, _)| l.clone())
        .unwrap_or_else(|| fallback.to_string())
}

impl ParserModel {
    /// Every transition the model scores, in tie-break order.
    pub fn transitions(&self) -> Vec<Transition> {
        transitions_for(&self.labels)
    }

    pub fn check_schema(&self, schema: &Schema) -> Result<(), ParserError> {
        let requested = schema.digest();
        if requested != self.schema_digest {
            return Err(ParserError::SchemaMismatch {
                model: self.schema_digest.clone(),
                requested,
            });
        }
        Ok(())
    }

    fn is_punct(&self, t: &Token) -> bool {
        if !t.postag.is_empty() {
            return self.punct_pos.contains(&t.postag);
        }
        !t.cpostag.is_empty() && self.punct_pos.iter().any(|p| p.starts_with(t.cpostag.as_str()))
    }

    fn scores(&self, features: &[String], n: usize) -> Vec<f64> {
        let mut scores = vec![0.0; n];
        for f in features {
            if let Some(w) = self.weights.get(f) {
                for (s, w) in scores.iter_mut().zip(w) {
                    *s += w;
                }
            }
        }
        scores
    }

    /// Canonical text serialization.
    pub fn save(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.version);
        out.push('\n');
        out.push_str(&self.schema_digest);
        out.push('\n');
        out.push_str("templates:\n");
        for t in &self.templates {
            out.push_str(t);
            out.push('\n');
        }
        out.push_str("labels:\n");
        for l in &self.labels {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str("defaults:\n");
        out.push_str(&format!("root\t{}\n", self.root_label));
        out.push_str(&format!("punct_root\t{}\n", self.punct_root_label));
        out.push_str(&format!("attach\t{}\n", self.attach_label));
        for p in &self.punct_pos {
            out.push_str(&format!("punct_pos\t{}\n", p));
        }
        out.push_str("weights:\n");
        let names: Vec<String> = self.transitions().iter().map(Transition::to_string).collect();
        let mut lines = Vec::new();
        for (feature, ws) in &self.weights {
            for (name, w) in names.iter().zip(ws) {
                if *w != 0.0 {
                    lines.push(format!("{}\t{}\t{}\n", feature, name, w));
                }
            }
        }
        lines.sort();
        lines.into_iter().for_each(|l| out.push_str(&l));
        out
    }

    pub fn load(text: &str) -> Result<Self, ParserError> {
        let err = |line: usize, reason: &str| ParserError::ModelFormat {
            line,
            reason: reason.into(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| lines.next().ok_or_else(|| err(0, &format!("missing {}", what)));

        let (n, version) = next("header")?;
        if version != MODEL_HEADER {
            return Err(err(n, "not an I3RAB-MODEL v1 file"));
        }
        let (_, digest) = next("schema digest")?;
        let (n, l) = next("templates block")?;
        if l != "templates:" {
            return Err(err(n, "expected `templates:`"));
        }
        let mut model = ParserModel {
            version: version.into(),
            schema_digest: digest.into(),
            templates: Vec::new(),
            labels: Vec::new(),
            root_label: String::new(),
            punct_root_label: String::new(),
            attach_label: String::new(),
            punct_pos: Vec::new(),
            weights: BTreeMap::new(),
        };
        let mut block = "templates";
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut width = 0;
        for (n, line) in lines {
            match line {
                "labels:" | "defaults:" | "weights:" => {
                    block = line.trim_end_matches(':');
                    if block == "weights" {
                        let ts = model.transitions();
                        width = ts.len();
                        index = ts.iter().enumerate().map(|(i, t)| (t.to_string(), i)).collect();
                    }
                    continue;
                }
                _ => {}
            }
            match block {
                "templates" => model.templates.push(line.into()),
                "labels" => model.labels.push(line.into()),
                "defaults" => match line.split_once('\t') {
                    Some(("root", v)) => model.root_label = v.into(),
                    Some(("punct_root", v)) => model.punct_root_label = v.into(),
                    Some(("attach", v)) => model.attach_label = v.into(),
                    Some(("punct_pos", v)) => model.punct_pos.push(v.into()),
                    _ => return Err(err(n, "unknown default")),
                },
                _ => {
                    let mut parts = line.rsplitn(3, '\t');
                    let (value, trans, feature) = match (parts.next(), parts.next(), parts.next()) {
                        (Some(v), Some(t), Some(f)) => (v, t, f),
                        _ => return Err(err(n, "expected `feature<TAB>transition<TAB>value`")),
                    };
                    let &i = index
                        .get(trans)
                        .ok_or_else(|| err(n, "transition not in the label set"))?;
                    let value: f64 = value.parse().map_err(|_| err(n, "weight is not a number"))?;
                    model.weights.entry(feature.into()).or_insert_with(|| vec![0.0; width])[i] = value;
                }
            }
        }
        if model.templates != TEMPLATES {
            return Err(err(3, "template set differs from this parser's"));
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainReport {
    pub sentences_used: usize,
    pub skipped_nonprojective: usize,
    /// Perceptron mistakes per epoch.
    pub mistakes: Vec<usize>,
}

/// Averaged-perceptron accumulator for one feature.
struct Acc {
    w: Vec<f64>,
    total: Vec<f64>,
    stamp: Vec<u64>,
}

impl Acc {
    fn new(n: usize) -> Self {
        Acc {
            w: vec![0.0; n],
            total: vec![0.0; n],
            stamp: vec![0; n],
        }
    }

    fn update(&mut self, i: usize, delta: f64, now: u64) {
        self.total[i] += (now - self.stamp[i]) as f64 * self.w[i];
        self.stamp[i] = now;
        self.w[i] += delta;
    }

    fn average(&self, now: u64) -> Vec<f64> {
        (0..self.w.len())
            .map(|i| {
                let total = self.total[i] + (now - self.stamp[i]) as f64 * self.w[i];
                total / now as f64
            })
            .collect()
    }
}

fn best_legal(c: &Configuration, scores: &[f64], ts: &[Transition], allowed: impl Fn(&Transition) -> bool) -> usize {
    let mut best: Option<usize> = None;
    for (i, t) in ts.iter().enumerate() {
        if c.legality(t).is_err() || !allowed(t) {
            continue;
        }
        if best.is_none_or(|b| scores[i] > scores[b]) {
            best = Some(i);
        }
    }
    best.expect("SHIFT is legal while the buffer is non-empty")
}

/// Trains a model. Sentence order is shuffled every epoch by a generator
/// seeded with `seed`.
pub fn train(
    tb: &Treebank,
    epochs: usize,
    seed: u64,
    schema: &Schema,
) -> Result<(ParserModel, TrainReport), ParserError> {
    if tb.is_empty() {
        return Err(ParserError::EmptyTreebank);
    }
    let mut report = TrainReport::default();
    let mut usable: Vec<(&Sentence, Vec<Transition>)> = Vec::new();
    for s in tb.iter() {
        match oracle_sequence(s) {
            Ok(seq) => usable.push((s, seq)),
            Err(_) => report.skipped_nonprojective += 1,
        }
    }
    if usable.is_empty() {
        return Err(ParserError::AllSentencesNonProjective);
    }
    report.sentences_used = usable.len();

    let mut label_set = BTreeSet::new();
    let mut root_counts = BTreeMap::new();
    let mut punct_root_counts = BTreeMap::new();
    let mut label_counts = BTreeMap::new();
    for (s, _) in &usable {
        for t in s.tokens() {
            label_set.insert(t.deprel.clone());
            let bucket = match (t.head, schema.is_punct(t)) {
                (0, false) => &mut root_counts,
                (0, true) => &mut punct_root_counts,
                _ => &mut label_counts,
            };
            *bucket.entry(t.deprel.clone()).or_insert(0) += 1;
        }
    }
    let labels: Vec<String> = label_set.into_iter().collect();
    let ts = transitions_for(&labels);
    let index: HashMap<Transition, usize> = ts.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();

    let mut acc: HashMap<String, Acc> = HashMap::new();
    let mut now: u64 = 1;
    let mut order: Vec<usize> = (0..usable.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        let mut mistakes = 0;
        for &k in &order {
            let (s, seq) = &usable[k];
            let mut c = Configuration::initial(s.len());
            for gold in seq {
                let feats = extract_features(&c, s);
                let mut scores = vec![0.0; ts.len()];
                for f in &feats {
                    if let Some(a) = acc.get(f) {
                        for (sc, w) in scores.iter_mut().zip(&a.w) {
                            *sc += w;
                        }
                    }
                }
                let pred = best_legal(&c, &scores, &ts, |_| true);
                let g = index[gold];
                if pred != g {
                    mistakes += 1;
                    for f in feats {
                        let a = acc.entry(f).or_insert_with(|| Acc::new(ts.len()));
                        a.update(g, 1.0, now);
                        a.update(pred, -1.0, now);
                    }
                }
                now += 1;
                c.apply_in_place(gold)?;
            }
        }
        report.mistakes.push(mistakes);
    }

    let weights: BTreeMap<String, Vec<f64>> = acc
        .into_iter()
        .map(|(f, a)| (f, a.average(now)))
        .filter(|(_, w)| w.iter().any(|&x| x != 0.0))
        .collect();
    let model = ParserModel {
        version: MODEL_HEADER.into(),
        schema_digest: schema.digest(),
        templates: TEMPLATES.iter().map(|t| t.to_string()).collect(),
        labels,
        root_label: most_frequent(&root_counts, "TOPIC"),
        punct_root_label: most_frequent(&punct_root_counts, "END"),
        attach_label: most_frequent(&label_counts, "GEN"),
        punct_pos: schema.punctuation_pos.iter().cloned().collect(),
        weights,
    };
    Ok((model, report))
}

/// Parses one sentence greedily; HEAD and DEPREL of the input are ignored.
/// The output always is a tree with one non-punctuation root.
pub fn parse_sentence(s: &Sentence, m: &ParserModel) -> Sentence {
    let ts = m.transitions();
    let n = s.len();
    let mut c = Configuration::initial(n);
    let punct: Vec<bool> = s.tokens().iter().map(|t| m.is_punct(t)).collect();
    let mut has_root = false;
    while !c.is_terminal() {
        let feats = extract_features(&c, s);
        let scores = m.scores(&feats, ts.len());
        let s0 = c.top().unwrap_or(0);
        let b0 = c.front().unwrap_or(0);
        let i = best_legal(&c, &scores, &ts, |t| {
            !(has_root && s0 == 0 && matches!(t, Transition::RightArc(_)) && !punct[b0 - 1])
        });
        if s0 == 0 && matches!(ts[i], Transition::RightArc(_)) && !punct[b0 - 1] {
            has_root = true;
        }
        c.apply_in_place(&ts[i]).expect("only legal transitions are chosen");
    }

    let mut main = (1..=n).find(|&d| c.heads[d] == Some(0) && !punct[d - 1]);
    for d in 1..=n {
        if c.heads[d].is_some() {
            continue;
        }
        let (h, l) = if punct[d - 1] {
            (0, m.punct_root_label.clone())
        } else if let Some(r) = main {
            (r, m.attach_label.clone())
        } else {
            main = Some(d);
            (0, m.root_label.clone())
        };
        c.heads[d] = Some(h);
        c.labels[d] = Some(l);
    }

    let tokens: Vec<Token> = s
        .tokens()
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.head = c.heads[t.id].unwrap_or(0);
            t.deprel = c.labels[t.id].clone().unwrap_or_default();
            t
        })
        .collect();
    Sentence::with_comments(tokens, s.comments().to_vec()).expect("decoded heads stay in range")
}

/// Parses every sentence of `tb`.
pub fn parse_treebank_with(tb: &Treebank, m: &ParserModel) -> Treebank {
    #[cfg(feature = "parallel")]
    let sentences = {
        use rayon::prelude::*;
        tb.sentences.par_iter().map(|s| parse_sentence(s, m)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let sentences = tb.sentences.iter().map(|s| parse_sentence(s, m)).collect();
    let mut out = Treebank::new(sentences);
    out.source = tb.source.clone();
    out
}

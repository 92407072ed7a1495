//! Conversion of PADT-style trees into I3rab trees: re-tokenization (fix
//! list, fused-word splits, joined and covert pronouns) followed by head
//! restructuring by sentence type.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::conllx::{ConllError, FeatureBag, Sentence, Token, Treebank};
use crate::parser::is_projective;
use crate::schema::{
    classify_sentence, first_content_index, parse_split_parts, validate_sentence, Schema, SentenceType, SplitPart,
    Violation, WordClass, COVERT_FEATURE,
};

const DEFAULT_RULES: &str = include_str!("../data/default_rules.conf");

/// PADT labels that mark the predicate of a nominal clause.
const PREDICATE_LABELS: &[&str] = &["Pred", "Pnom"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulesError {
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: duplicate entry `{entry}`")]
    DuplicateEntry { line: usize, entry: String },
    #[error("line {line}: {reason}")]
    MalformedEntry { line: usize, reason: String },
    #[error("label_map target `{target}` (from `{source_label}`) is not an I3rab label")]
    UnknownTarget { source_label: String, target: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvertError {
    #[error("verb `{form}` has no covert pronoun for person={person} gender={gender} number={number}")]
    NoCovertMapping {
        form: String,
        person: String,
        gender: String,
        number: String,
    },
    #[error("cannot restructure: {0}")]
    RestructureFailure(String),
    #[error("override addresses sentence {index}, but the treebank has {len}")]
    OverrideIndexOutOfRange { index: usize, len: usize },
    #[error("override block {position} has no numeric `# sent_id = N` comment")]
    OverrideMissingId { position: usize },
    #[error("override for sentence {sentence} is invalid: {}", first_violation(.violations))]
    InvalidOverride {
        sentence: usize,
        violations: Vec<Violation>,
    },
    #[error("sentence {index}: {source}")]
    AtSentence {
        index: usize,
        #[source]
        source: Box<ConvertError>,
    },
    #[error(transparent)]
    Conll(#[from] ConllError),
}

fn first_violation(v: &[Violation]) -> String {
    v.iter()
        .find(|v| v.is_error())
        .map(|v| v.to_string())
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixAction {
    /// Concatenate with the following token, which keeps its annotation.
    Merge,
    /// Remove; dependents move to the removed token's head.
    Delete,
    Split(Vec<SplitPart>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixEntry {
    pub form: String,
    pub action: FixAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConversionOptions {
    pub insert_covert: bool,
    pub detach_joined: bool,
}

impl Default for ConversionOptions {
    fn default() -> Self {
        ConversionOptions {
            insert_covert: true,
            detach_joined: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionRules {
    pub schema: Schema,
    pub label_map: BTreeMap<String, String>,
    pub fix_list: Vec<FixEntry>,
    pub options: ConversionOptions,
}

impl ConversionRules {
    /// The built-in rules over `schema`.
    pub fn with_schema(schema: Schema) -> Result<Self, RulesError> {
        load_rules("", schema)
    }

    fn fix_action(&self, form: &str) -> Option<&FixAction> {
        self.fix_list.iter().find(|f| f.form == form).map(|f| &f.action)
    }

    /// The I3rab label for a source label, without context refinements.
    pub fn map_label<'a>(&'a self, label: &'a str) -> &'a str {
        match self.label_map.get(base_label(label)) {
            Some(target) => target,
            None => self.schema.resolve(label),
        }
    }

    /// Maps the label of token `id`, refining Atr/Adv style targets by the
    /// word classes involved.
    fn map_token_label(&self, s: &Sentence, id: usize) -> String {
        let t = &s.tokens()[id - 1];
        let Some(target) = self.label_map.get(base_label(&t.deprel)) else {
            return self.schema.resolve(&t.deprel).to_string();
        };
        let head_class = s.token(t.head).map(WordClass::of);
        let class = WordClass::of(t);
        match target.as_str() {
            "GEN" if class == WordClass::Adjective => "ADJ".into(),
            "VB" if class != WordClass::Verb => format!("PRED-{}", predicate_form(s, &s.heads(), id)),
            p if p.starts_with("PRED-") => format!("PRED-{}", predicate_form(s, &s.heads(), id)),
            "ADVP" if head_class == Some(WordClass::Preposition) => "GEN".into(),
            _ => target.clone(),
        }
    }
}

impl Default for ConversionRules {
    fn default() -> Self {
        ConversionRules::with_schema(Schema::default()).expect("embedded rules are valid")
    }
}

/// Strips PADT's coordination/apposition member suffixes (`Sb_Co`).
fn base_label(label: &str) -> &str {
    label
        .strip_suffix("_Co")
        .or_else(|| label.strip_suffix("_Ap"))
        .unwrap_or(label)
}

/// Loads a rules file. Sections present in `text` replace the built-in
/// ones; absent sections keep their defaults.
pub fn load_rules(text: &str, schema: Schema) -> Result<ConversionRules, RulesError> {
    let mut rules = ConversionRules {
        schema,
        label_map: BTreeMap::new(),
        fix_list: Vec::new(),
        options: ConversionOptions::default(),
    };
    apply_rules_text(DEFAULT_RULES, &mut rules)?;
    apply_rules_text(text, &mut rules)?;
    Ok(rules)
}

fn apply_rules_text(text: &str, rules: &mut ConversionRules) -> Result<(), RulesError> {
    let mut seen_sections: Vec<String> = Vec::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let entry = raw.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        if let Some(name) = entry.strip_prefix('[').and_then(|e| e.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !["label_map", "fix_list", "options"].contains(&name.as_str()) {
                return Err(RulesError::UnknownSection { line, name });
            }
            if seen_sections.contains(&name) {
                return Err(RulesError::DuplicateEntry { line, entry: name });
            }
            match name.as_str() {
                "label_map" => rules.label_map.clear(),
                "fix_list" => rules.fix_list.clear(),
                _ => rules.options = ConversionOptions::default(),
            }
            seen_sections.push(name.clone());
            section = Some(name);
            continue;
        }
        let malformed = |reason: &str| RulesError::MalformedEntry {
            line,
            reason: reason.to_string(),
        };
        match section.as_deref() {
            None => return Err(malformed("entry outside of a section")),
            Some("label_map") => {
                let (from, to) = split_arrow(entry).ok_or_else(|| malformed("expected `PADT -> I3RAB`"))?;
                if rules.label_map.insert(from.into(), to.into()).is_some() {
                    return Err(RulesError::DuplicateEntry {
                        line,
                        entry: from.into(),
                    });
                }
            }
            Some("fix_list") => {
                let (form, action) = split_arrow(entry).ok_or_else(|| malformed("expected `FORM -> ACTION`"))?;
                let action = match action {
                    "merge" => FixAction::Merge,
                    "delete" => FixAction::Delete,
                    other => match other.strip_prefix("split") {
                        Some(parts) => FixAction::Split(
                            parse_split_parts(parts.trim())
                                .ok_or_else(|| malformed("split needs at least two parts"))?,
                        ),
                        None => return Err(malformed("action must be merge, delete or split")),
                    },
                };
                if rules.fix_list.iter().any(|f| f.form == form) {
                    return Err(RulesError::DuplicateEntry {
                        line,
                        entry: form.into(),
                    });
                }
                rules.fix_list.push(FixEntry {
                    form: form.into(),
                    action,
                });
            }
            Some(_) => {
                let (key, value) = entry
                    .split_once('=')
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .ok_or_else(|| malformed("expected `key = true|false`"))?;
                let value: bool = value
                    .parse()
                    .map_err(|_| malformed("option value must be true or false"))?;
                match key {
                    "insert_covert" => rules.options.insert_covert = value,
                    "detach_joined" => rules.options.detach_joined = value,
                    _ => return Err(malformed("unknown option")),
                }
            }
        }
    }
    Ok(())
}

fn split_arrow(entry: &str) -> Option<(&str, &str)> {
    let (a, b) = entry.split_once("->")?;
    let (a, b) = (a.trim(), b.trim());
    (!a.is_empty() && !b.is_empty()).then_some((a, b))
}

/// Loads rules and checks every label_map target against the schema.
pub fn load_checked_rules(text: &str, schema: Schema) -> Result<ConversionRules, RulesError> {
    let rules = load_rules(text, schema)?;
    for (source, target) in &rules.label_map {
        if !rules.schema.relation_labels.contains(target) {
            return Err(RulesError::UnknownTarget {
                source_label: source.clone(),
                target: target.clone(),
            });
        }
    }
    Ok(rules)
}

/// Token accounting for a conversion run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConversionReport {
    pub dropped_pronoun: usize,
    pub joined_pronoun: usize,
    pub separated: usize,
    pub merged: usize,
    pub deleted: usize,
    pub overridden_sentences: usize,
    pub nonprojective_outputs: usize,
    pub passed_through: usize,
    /// Output minus input tokens over overridden sentences.
    pub override_token_delta: i64,
    pub input_tokens: usize,
    pub output_tokens: usize,
}

impl ConversionReport {
    pub fn merge(&mut self, other: &ConversionReport) {
        self.dropped_pronoun += other.dropped_pronoun;
        self.joined_pronoun += other.joined_pronoun;
        self.separated += other.separated;
        self.merged += other.merged;
        self.deleted += other.deleted;
        self.overridden_sentences += other.overridden_sentences;
        self.nonprojective_outputs += other.nonprojective_outputs;
        self.passed_through += other.passed_through;
        self.override_token_delta += other.override_token_delta;
        self.input_tokens += other.input_tokens;
        self.output_tokens += other.output_tokens;
    }

    /// True when the token difference is fully explained by the counters.
    pub fn is_balanced(&self) -> bool {
        let explained = self.dropped_pronoun as i64 + self.joined_pronoun as i64 + self.separated as i64
            - self.merged as i64
            - self.deleted as i64
            + self.override_token_delta;
        self.output_tokens as i64 - self.input_tokens as i64 == explained
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ConversionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: [(&str, String); 11] = [
            ("input_tokens", self.input_tokens.to_string()),
            ("output_tokens", self.output_tokens.to_string()),
            ("dropped_pronoun", self.dropped_pronoun.to_string()),
            ("joined_pronoun", self.joined_pronoun.to_string()),
            ("separated", self.separated.to_string()),
            ("merged", self.merged.to_string()),
            ("deleted", self.deleted.to_string()),
            ("overridden_sentences", self.overridden_sentences.to_string()),
            ("override_token_delta", self.override_token_delta.to_string()),
            ("passed_through", self.passed_through.to_string()),
            ("nonprojective_outputs", self.nonprojective_outputs.to_string()),
        ];
        for (k, v) in rows {
            writeln!(f, "{}\t{}", k, v)?;
        }
        Ok(())
    }
}

/// Value of `key` on `t` if it is one of `allowed`, else the only allowed
/// value, else the first.
fn pick(t: &Token, key: &str, allowed: &[String]) -> String {
    match t.feat(key) {
        Some(v) if allowed.iter().any(|a| a == v) => v.to_string(),
        _ => allowed.first().cloned().unwrap_or_default(),
    }
}

/// Splits a joined nominative pronoun off a verb. The longest suffix whose
/// descriptor agrees with the verb's person, gender and number wins; the
/// stem must keep at least two letters.
pub fn detach_joined_pronoun(t: &Token, schema: &Schema) -> Option<(Token, Token)> {
    if WordClass::of(t) != WordClass::Verb {
        return None;
    }
    let keys = ["Person", "Gender", "Number"];
    let has_agreement = keys.iter().any(|k| t.feat(k).is_some());
    let mut candidates: Vec<_> = schema
        .joined_nominative_suffixes
        .iter()
        .filter(|(suffix, _)| t.form.ends_with(suffix.as_str()))
        .filter(|(suffix, _)| t.form.chars().count() >= suffix.chars().count() + 2)
        .collect();
    candidates.sort_by_key(|(suffix, _)| std::cmp::Reverse(suffix.chars().count()));
    let (suffix, desc) = candidates.into_iter().find(|(suffix, desc)| {
        if !has_agreement {
            return suffix.chars().count() > 1;
        }
        [
            ("Person", &desc.person),
            ("Gender", &desc.gender),
            ("Number", &desc.number),
        ]
        .iter()
        .all(|(k, allowed)| t.feat(k).is_none_or(|v| allowed.iter().any(|a| a == v)))
    })?;

    let mut verb = t.clone();
    verb.form = t.form[..t.form.len() - suffix.len()].to_string();
    verb.feats.set("Number", "S");

    let mut feats = FeatureBag::new();
    feats.set("Person", &pick(t, "Person", &desc.person));
    feats.set("Gender", &pick(t, "Gender", &desc.gender));
    feats.set("Number", &pick(t, "Number", &desc.number));
    feats.set("Case", "1");
    let pronoun = Token::new(t.id + 1, suffix.as_str())
        .with_lemma(&desc.pronoun)
        .with_pos("S", "S-")
        .with_feats(feats)
        .with_head(t.id, "AGENT");
    Some((verb, pronoun))
}

/// True when `next` is not an overt agent of the preceding verb.
fn lacks_overt_agent(next: Option<&Token>, rules: &ConversionRules) -> bool {
    match next {
        None => true,
        Some(n) => {
            let overt =
                WordClass::of(n).is_nominal() && (n.feat("Case") == Some("1") || rules.map_label(&n.deprel) == "AGENT");
            !overt
        }
    }
}

fn covert_token(v: &Token, schema: &Schema) -> Result<Token, ConvertError> {
    let person = v.feat("Person").unwrap_or("");
    let gender = v.feat("Gender").unwrap_or("-");
    let number = v.feat("Number").unwrap_or("");
    let pronoun = schema
        .covert_pronoun(person, gender, number)
        .ok_or_else(|| ConvertError::NoCovertMapping {
            form: v.form.clone(),
            person: person.into(),
            gender: gender.into(),
            number: number.into(),
        })?;
    let mut feats = FeatureBag::new();
    for key in ["Person", "Gender", "Number"] {
        if let Some(value) = v.feat(key) {
            feats.set(key, value);
        }
    }
    feats.set("Case", "1");
    feats.set(COVERT_FEATURE.0, COVERT_FEATURE.1);
    Ok(Token::new(v.id + 1, format!("*{}", pronoun))
        .with_lemma(pronoun)
        .with_pos("S", "S-")
        .with_feats(feats)
        .with_head(v.id, "AGENT"))
}

/// The covert agent to insert right after verb `v` of `s`, or `None` when
/// the following token already is a nominative nominal or an agent.
pub fn surmise_covert_pronoun(v: &Token, s: &Sentence, rules: &ConversionRules) -> Result<Option<Token>, ConvertError> {
    if WordClass::of(v) != WordClass::Verb || !lacks_overt_agent(s.token(v.id + 1), rules) {
        return Ok(None);
    }
    covert_token(v, &rules.schema).map(Some)
}

/// A token under conversion. `key` is stable across insertions; heads refer
/// to keys until the final renumbering.
#[derive(Debug, Clone)]
struct Item {
    key: usize,
    tok: Token,
}

fn split_items(item: Item, parts: &[SplitPart], next_key: &mut usize) -> Vec<Item> {
    let anchor = parts.iter().position(|p| p.postag.is_none()).unwrap_or(parts.len() - 1);
    let mut items: Vec<Item> = parts
        .iter()
        .enumerate()
        .map(|(i, part)| {
            let key = if i == anchor {
                item.key
            } else {
                *next_key += 1;
                *next_key - 1
            };
            let mut tok = if i == anchor {
                item.tok.clone()
            } else {
                Token::new(item.tok.id, part.form.as_str()).with_lemma(&part.form)
            };
            tok.form = part.form.clone();
            if let Some(tag) = &part.postag {
                let coarse: String = tag.chars().take(1).collect();
                tok = tok.with_pos(&coarse, tag);
            }
            Item { key, tok }
        })
        .collect();

    let anchor_key = items[anchor].key;
    let prep = (0..anchor).find(|&i| WordClass::of(&items[i].tok) == WordClass::Preposition);
    if let Some(p) = prep {
        let p_key = items[p].key;
        items[p].tok.head = item.tok.head;
        items[p].tok.deprel = "P".into();
        items[anchor].tok.head = p_key;
        items[anchor].tok.deprel = "GEN".into();
    }
    for (i, it) in items.iter_mut().enumerate() {
        if i == anchor || Some(i) == prep {
            continue;
        }
        it.tok.head = anchor_key;
        it.tok.deprel = match WordClass::of(&it.tok) {
            WordClass::Conjunction => "COORD",
            WordClass::Preposition => "P",
            _ => "GEN",
        }
        .into();
    }
    items
}

/// Splits a fused word per the schema's split lexicon. Part ids continue
/// from `t.id`; heads between parts use those ids while the outward head is
/// left as it was.
pub fn split_fused_word(t: &Token, schema: &Schema) -> Vec<Token> {
    let Some(parts) = schema.split_lexicon.get(&t.form) else {
        return vec![t.clone()];
    };
    let mut next_key = usize::MAX / 2;
    let items = split_items(
        Item {
            key: usize::MAX / 4,
            tok: t.clone(),
        },
        parts,
        &mut next_key,
    );
    let local: BTreeMap<usize, usize> = items.iter().enumerate().map(|(i, it)| (it.key, t.id + i)).collect();
    items
        .into_iter()
        .enumerate()
        .map(|(i, mut it)| {
            it.tok.id = t.id + i;
            if let Some(&id) = local.get(&it.tok.head) {
                it.tok.head = id;
            }
            it.tok
        })
        .collect()
}

/// Applies the fix list, fused-word splits, joined-pronoun detachment and
/// covert-pronoun insertion, in that order, and renumbers the sentence.
pub fn retokenize_sentence(
    s: &Sentence,
    rules: &ConversionRules,
) -> Result<(Sentence, ConversionReport), ConvertError> {
    let schema = &rules.schema;
    let mut report = ConversionReport {
        input_tokens: s.len(),
        ..Default::default()
    };
    let mut next_key = s.len() + 1;
    let mut alias: BTreeMap<usize, usize> = BTreeMap::new();

    let mut items: Vec<Item> = Vec::with_capacity(s.len());
    let mut queue = s
        .tokens()
        .iter()
        .cloned()
        .map(|tok| Item { key: tok.id, tok })
        .peekable();
    while let Some(item) = queue.next() {
        let action = rules.fix_action(&item.tok.form);
        match action {
            Some(FixAction::Merge) => {
                if let Some(next) = queue.peek_mut() {
                    next.tok.form = format!("{}{}", item.tok.form, next.tok.form);
                    if next.tok.head == item.key {
                        next.tok.head = item.tok.head;
                    }
                    alias.insert(item.key, next.key);
                    report.merged += 1;
                } else {
                    items.push(item);
                }
            }
            Some(FixAction::Delete) => {
                alias.insert(item.key, item.tok.head);
                report.deleted += 1;
            }
            Some(FixAction::Split(parts)) => {
                report.separated += parts.len() - 1;
                items.extend(split_items(item, parts, &mut next_key));
            }
            None => match schema.split_lexicon.get(&item.tok.form) {
                Some(parts) => {
                    report.separated += parts.len() - 1;
                    items.extend(split_items(item, parts, &mut next_key));
                }
                None => items.push(item),
            },
        }
    }
    if items.is_empty() {
        return Err(ConvertError::RestructureFailure("fix list removed every token".into()));
    }

    if rules.options.detach_joined {
        let mut out = Vec::with_capacity(items.len() + 2);
        for item in items {
            match detach_joined_pronoun(&item.tok, schema) {
                Some((verb, mut pronoun)) => {
                    pronoun.head = item.key;
                    out.push(Item {
                        key: item.key,
                        tok: verb,
                    });
                    out.push(Item {
                        key: next_key,
                        tok: pronoun,
                    });
                    next_key += 1;
                    report.joined_pronoun += 1;
                }
                None => out.push(item),
            }
        }
        items = out;
    }

    if rules.options.insert_covert {
        let mut i = 0;
        while i < items.len() {
            let tok = &items[i].tok;
            if WordClass::of(tok) == WordClass::Verb && lacks_overt_agent(items.get(i + 1).map(|it| &it.tok), rules) {
                let mut covert = covert_token(tok, schema)?;
                covert.head = items[i].key;
                items.insert(
                    i + 1,
                    Item {
                        key: next_key,
                        tok: covert,
                    },
                );
                next_key += 1;
                report.dropped_pronoun += 1;
                i += 1;
            }
            i += 1;
        }
    }

    let ids: BTreeMap<usize, usize> = items.iter().enumerate().map(|(i, it)| (it.key, i + 1)).collect();
    let resolve = |mut key: usize| -> usize {
        for _ in 0..=alias.len() {
            if key == 0 {
                return 0;
            }
            if let Some(&id) = ids.get(&key) {
                return id;
            }
            match alias.get(&key) {
                Some(&next) => key = next,
                None => return 0,
            }
        }
        0
    };
    let tokens: Vec<Token> = items
        .into_iter()
        .enumerate()
        .map(|(i, mut it)| {
            it.tok.id = i + 1;
            it.tok.head = resolve(it.tok.head);
            it.tok
        })
        .collect();
    report.output_tokens = tokens.len();
    let out = Sentence::with_comments(tokens, s.comments().to_vec())?;
    Ok((out, report))
}

/// `PRED-*` suffix by the predicate's form.
fn predicate_form(s: &Sentence, heads: &[usize], id: usize) -> &'static str {
    let t = &s.tokens()[id - 1];
    match WordClass::of(t) {
        WordClass::Verb => "VP",
        WordClass::Preposition => "PP",
        WordClass::Adverb => "ADVP",
        _ => {
            let clause = s.tokens().iter().any(|d| {
                heads[d.id - 1] == id
                    && (PREDICATE_LABELS.contains(&base_label(&d.deprel))
                        || d.deprel.starts_with("PRED")
                        || WordClass::of(d) == WordClass::Verb)
            });
            if clause {
                "NP"
            } else {
                "NOUN"
            }
        }
    }
}

/// First dependent of one of `governors` after `after` that looks like a
/// predicate: a Pred/Pnom label first, then a verb, preposition or adverb.
fn find_predicate(s: &Sentence, governors: &[usize], after: usize, exclude: &[usize]) -> Option<usize> {
    let deps: Vec<&Token> = s
        .tokens()
        .iter()
        .filter(|t| t.id > after && governors.contains(&t.head) && !exclude.contains(&t.id))
        .collect();
    deps.iter()
        .find(|t| PREDICATE_LABELS.contains(&base_label(&t.deprel)))
        .or_else(|| {
            deps.iter().find(|t| {
                matches!(
                    WordClass::of(t),
                    WordClass::Verb | WordClass::Preposition | WordClass::Adverb
                )
            })
        })
        .map(|t| t.id)
}

fn fail(reason: &str) -> ConvertError {
    ConvertError::RestructureFailure(reason.to_string())
}

/// Maps labels and rebuilds the top of the tree by sentence type. The
/// result is validated; any error-level violation is a failure.
pub fn restructure_heads(s: &Sentence, rules: &ConversionRules) -> Result<Sentence, ConvertError> {
    let schema = &rules.schema;
    let toks = s.tokens();
    let n = toks.len();
    let mut heads = s.heads();
    let mut labels: Vec<String> = (1..=n).map(|id| rules.map_token_label(s, id)).collect();
    let kind = classify_sentence(s, schema).map_err(|e| fail(&e.to_string()))?;
    let first = first_content_index(s, schema)
        .map(|i| i + 1)
        .ok_or_else(|| fail("no content word"))?;
    let root = toks
        .iter()
        .find(|t| t.head == 0 && !schema.is_punct(t))
        .map(|t| t.id)
        .ok_or_else(|| fail("no main word"))?;
    let set = |heads: &mut Vec<usize>, labels: &mut Vec<String>, id: usize, head: usize, label: String| {
        heads[id - 1] = head;
        labels[id - 1] = label;
    };

    match kind {
        SentenceType::Nominal => {
            let topic = toks[first - 1..]
                .iter()
                .find(|t| WordClass::of(t).is_nominal() && t.feat("Case") != Some("2"))
                .map(|t| t.id)
                .ok_or_else(|| fail("nominal sentence without a topic"))?;
            let predicate = if root != topic {
                heads[topic - 1] = 0;
                heads[root - 1] = topic;
                Some(root)
            } else {
                find_predicate(s, &[topic], topic, &[])
            };
            labels[topic - 1] = "TOPIC".into();
            if let Some(p) = predicate {
                labels[p - 1] = format!("PRED-{}", predicate_form(s, &heads, p));
            }
        }
        SentenceType::NominalWithInna | SentenceType::NominalWithKana => {
            let abolisher = first;
            let topic = toks[abolisher..]
                .iter()
                .find(|t| WordClass::of(t).is_nominal())
                .map(|t| t.id)
                .ok_or_else(|| fail("abolisher without a topic"))?;
            let predicate = if root != abolisher && root != topic {
                root
            } else {
                find_predicate(s, &[abolisher, topic], abolisher, &[topic])
                    .ok_or_else(|| fail("abolisher without a predicate"))?
            };
            let label = if kind == SentenceType::NominalWithInna {
                "P-ACC"
            } else {
                "VBX"
            };
            set(&mut heads, &mut labels, abolisher, 0, label.into());
            set(&mut heads, &mut labels, topic, abolisher, "TOPICX".into());
            heads[predicate - 1] = abolisher;
            labels[predicate - 1] = format!("PREDX-{}", predicate_form(s, &heads, predicate));
        }
        SentenceType::Verbal => {
            if WordClass::of(&toks[root - 1]) != WordClass::Verb {
                return Err(fail("verbal sentence whose main word is not a verb"));
            }
            let lead = &toks[first - 1];
            if first < root && (schema.is_jussive(lead) || schema.is_accusative_particle(lead)) {
                let label = if schema.is_jussive(lead) { "NEG" } else { "P-ACC" };
                let verb_head = heads[root - 1];
                set(&mut heads, &mut labels, first, verb_head, label.into());
                heads[root - 1] = first;
            }
            labels[root - 1] = "VB".into();
        }
    }

    if let Some(last) = toks.last().filter(|t| schema.is_punct(t)) {
        set(&mut heads, &mut labels, last.id, 0, "END".into());
    }

    let tokens: Vec<Token> = toks
        .iter()
        .zip(heads.iter().zip(labels))
        .map(|(t, (&h, l))| {
            let mut t = t.clone();
            t.head = h;
            t.deprel = l;
            t
        })
        .collect();
    let out = Sentence::with_comments(tokens, s.comments().to_vec())?;
    if let Some(v) = validate_sentence(&out, schema, 0).into_iter().find(Violation::is_error) {
        return Err(fail(&format!("{} {}", v.code, v.message)));
    }
    Ok(out)
}

/// Maps labels only, keeping every head.
fn map_labels_only(s: &Sentence, rules: &ConversionRules) -> Result<Sentence, ConvertError> {
    let tokens = s
        .tokens()
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.deprel = rules.map_token_label(s, t.id);
            t
        })
        .collect();
    Ok(Sentence::with_comments(tokens, s.comments().to_vec())?)
}

/// Converts one sentence. A sentence that cannot be restructured is passed
/// through with mapped labels and counted in `passed_through`.
pub fn convert_sentence(s: &Sentence, rules: &ConversionRules) -> Result<(Sentence, ConversionReport), ConvertError> {
    let (retok, mut report) = retokenize_sentence(s, rules)?;
    let out = match restructure_heads(&retok, rules) {
        Ok(out) => out,
        Err(ConvertError::RestructureFailure(_)) => {
            report.passed_through += 1;
            map_labels_only(&retok, rules)?
        }
        Err(e) => return Err(e),
    };
    if !is_projective(&out) {
        report.nonprojective_outputs += 1;
    }
    Ok((out, report))
}

/// Reads `# sent_id = N` overrides into a 1-based index map, validating
/// each override sentence.
fn collect_overrides(
    overrides: &Treebank,
    len: usize,
    schema: &Schema,
) -> Result<BTreeMap<usize, Sentence>, ConvertError> {
    let mut map = BTreeMap::new();
    for (pos, s) in overrides.iter().enumerate() {
        let index: usize = s
            .sent_id()
            .and_then(|id| id.parse().ok())
            .ok_or(ConvertError::OverrideMissingId { position: pos + 1 })?;
        if index == 0 || index > len {
            return Err(ConvertError::OverrideIndexOutOfRange { index, len });
        }
        let violations = validate_sentence(s, schema, index);
        if violations.iter().any(Violation::is_error) {
            return Err(ConvertError::InvalidOverride {
                sentence: index,
                violations,
            });
        }
        map.insert(index, s.clone());
    }
    Ok(map)
}

/// Converts a treebank. Sentences with an override are replaced wholesale
/// by it.
pub fn convert_treebank(
    tb: &Treebank,
    rules: &ConversionRules,
    overrides: Option<&Treebank>,
) -> Result<(Treebank, ConversionReport), ConvertError> {
    let overrides = match overrides {
        Some(o) => collect_overrides(o, tb.len(), &rules.schema)?,
        None => BTreeMap::new(),
    };
    let convert_one = |(i, s): (usize, &Sentence)| -> Result<(Sentence, ConversionReport), ConvertError> {
        let index = i + 1;
        if let Some(o) = overrides.get(&index) {
            let report = ConversionReport {
                overridden_sentences: 1,
                override_token_delta: o.len() as i64 - s.len() as i64,
                input_tokens: s.len(),
                output_tokens: o.len(),
                nonprojective_outputs: usize::from(!is_projective(o)),
                ..Default::default()
            };
            return Ok((o.clone(), report));
        }
        convert_sentence(s, rules).map_err(|e| ConvertError::AtSentence {
            index,
            source: Box::new(e),
        })
    };

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        tb.sentences.par_iter().enumerate().map(convert_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = tb.sentences.iter().enumerate().map(convert_one).collect();

    let mut report = ConversionReport::default();
    let mut sentences = Vec::with_capacity(tb.len());
    for r in results {
        let (s, rep) = r?;
        report.merge(&rep);
        sentences.push(s);
    }
    let mut out = Treebank::new(sentences);
    out.source = tb.source.clone();
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllx::{parse_feats, parse_treebank};

    fn verb(id: usize, form: &str, feats: &str) -> Token {
        Token::new(id, form)
            .with_lemma(form)
            .with_pos("V", "VI")
            .with_feats(parse_feats(feats).unwrap())
    }

    fn noun(id: usize, form: &str, feats: &str, head: usize, label: &str) -> Token {
        Token::new(id, form)
            .with_lemma(form)
            .with_pos("N", "N-")
            .with_feats(parse_feats(feats).unwrap())
            .with_head(head, label)
    }

    #[test]
    fn detach_examples() {
        let schema = Schema::default();
        let t = verb(3, "يبدأون", "Mood=I|Person=3|Gender=M|Number=P").with_head(0, "Pred");
        let (v, p) = detach_joined_pronoun(&t, &schema).unwrap();
        assert_eq!(v.form, "يبدأ");
        assert_eq!(v.feat("Number"), Some("S"));
        assert_eq!(p.form, "ون");
        assert_eq!(p.feat("Number"), Some("P"));
        assert_eq!(p.feat("Case"), Some("1"));
        assert_eq!((p.cpostag.as_str(), p.postag.as_str()), ("S", "S-"));

        let t = verb(1, "يجتمعان", "Person=3|Gender=M|Number=D");
        let (v, p) = detach_joined_pronoun(&t, &schema).unwrap();
        assert_eq!((v.form.as_str(), p.form.as_str()), ("يجتمع", "ان"));

        assert!(detach_joined_pronoun(&verb(1, "كتب", "Person=3|Gender=M|Number=S"), &schema).is_none());
        // Singular verbs ending in a suffix letter keep it.
        assert!(detach_joined_pronoun(&verb(1, "يدين", "Person=3|Gender=M|Number=S"), &schema).is_none());
        assert!(detach_joined_pronoun(&verb(1, "كانت", "Person=3|Gender=F|Number=S"), &schema).is_none());
        assert!(detach_joined_pronoun(&noun(1, "معلمون", "", 0, "Sb"), &schema).is_none());
    }

    #[test]
    fn covert_examples() {
        let rules = ConversionRules::default();
        let s = Sentence::new(vec![
            Token::new(1, "أن").with_lemma("أن").with_pos("F", "F-"),
            noun(2, "لبنان", "Case=4", 3, "Sb"),
            verb(3, "يدين", "Mood=I|Person=3|Gender=M|Number=S").with_head(1, "Pred"),
            noun(4, "الإرهاب", "Case=4", 3, "Obj"),
        ])
        .unwrap();
        let c = surmise_covert_pronoun(&s.tokens()[2], &s, &rules).unwrap().unwrap();
        assert_eq!(c.form, "*هو");
        assert_eq!(c.feat("Covert"), Some("Y"));
        assert_eq!(c.feat("Case"), Some("1"));
        assert_eq!((c.id, c.head, c.deprel.as_str()), (4, 3, "AGENT"));

        let s = Sentence::new(vec![
            verb(1, "وقع", "Person=3|Gender=M|Number=S"),
            noun(2, "الانفجار", "Case=1", 1, "Sb"),
        ])
        .unwrap();
        assert_eq!(surmise_covert_pronoun(&s.tokens()[0], &s, &rules).unwrap(), None);

        // The agent label alone also counts as overt.
        let s = Sentence::new(vec![
            verb(1, "وقع", "Person=3|Gender=M|Number=S"),
            noun(2, "x", "", 1, "Sb"),
        ])
        .unwrap();
        assert_eq!(surmise_covert_pronoun(&s.tokens()[0], &s, &rules).unwrap(), None);

        let s = Sentence::new(vec![verb(1, "تقرأ", "Mood=I|Person=3|Gender=F|Number=S")]).unwrap();
        let c = surmise_covert_pronoun(&s.tokens()[0], &s, &rules).unwrap().unwrap();
        assert_eq!(c.form, "*هي");

        let s = Sentence::new(vec![verb(1, "اكتبوا", "Mood=D|Person=2|Gender=M|Number=P")]).unwrap();
        assert!(matches!(
            surmise_covert_pronoun(&s.tokens()[0], &s, &rules),
            Err(ConvertError::NoCovertMapping { .. })
        ));
    }

    #[test]
    fn split_examples() {
        let schema = Schema::default();
        let parts = split_fused_word(&Token::new(4, "حسبما").with_lemma("حسبما").with_pos("D", "D-"), &schema);
        let forms: Vec<_> = parts.iter().map(|t| t.form.as_str()).collect();
        assert_eq!(forms, ["حسب", "ما"]);
        assert_eq!(parts[1].postag, "SR");
        assert_eq!(parts[0].postag, "D-");
        assert_eq!(parts[1].head, 4);

        let parts = split_fused_word(
            &Token::new(3, "بالسارس").with_pos("Z", "Z-").with_head(1, "Adv"),
            &schema,
        );
        let forms: Vec<_> = parts.iter().map(|t| t.form.as_str()).collect();
        assert_eq!(forms, ["ب", "السارس"]);
        assert_eq!((parts[0].head, parts[0].deprel.as_str()), (1, "P"));
        assert_eq!((parts[1].head, parts[1].deprel.as_str()), (3, "GEN"));

        let t = Token::new(1, "كتاب");
        assert_eq!(split_fused_word(&t, &schema), vec![t]);
    }

    #[test]
    fn identity_retokenization() {
        let rules = ConversionRules::default();
        let s = Sentence::new(vec![
            noun(1, "الشمس", "Case=1", 0, "Sb"),
            noun(2, "جميلة", "Case=1", 1, "Atr"),
        ])
        .unwrap();
        let (out, rep) = retokenize_sentence(&s, &rules).unwrap();
        assert_eq!(out, s);
        assert_eq!(
            rep.dropped_pronoun + rep.joined_pronoun + rep.separated + rep.merged + rep.deleted,
            0
        );
        assert!(rep.is_balanced());
    }

    #[test]
    fn merge_and_delete_fix_list() {
        let rules = load_rules("[fix_list]\nال -> merge\nـ -> delete\n", Schema::default()).unwrap();
        let s = Sentence::new(vec![
            Token::new(1, "في").with_pos("P", "P-").with_head(0, "AuxP"),
            Token::new(2, "ال").with_pos("N", "N-").with_head(3, "Atr"),
            Token::new(3, "29").with_pos("Q", "Q-").with_head(1, "Adv"),
            Token::new(4, "ـ").with_pos("G", "G-").with_head(3, "AuxG"),
            Token::new(5, "منه").with_pos("S", "S-").with_head(4, "Atr"),
        ])
        .unwrap();
        let (out, rep) = retokenize_sentence(&s, &rules).unwrap();
        assert_eq!(out.forms(), ["في", "ال29", "منه"]);
        assert_eq!(out.heads(), [0, 1, 2]);
        assert_eq!((rep.merged, rep.deleted), (1, 1));
        assert!(rep.is_balanced());
    }

    #[test]
    fn rules_file_errors() {
        assert!(matches!(
            load_rules("[nope]\n", Schema::default()),
            Err(RulesError::UnknownSection { .. })
        ));
        assert!(matches!(
            load_rules("[label_map]\nSb -> AGENT\nSb -> TOPIC\n", Schema::default()),
            Err(RulesError::DuplicateEntry { line: 3, .. })
        ));
        assert!(matches!(
            load_checked_rules("[label_map]\nSb -> SUBJECT\n", Schema::default()),
            Err(RulesError::UnknownTarget { .. })
        ));
        let r = load_rules("[options]\ninsert_covert = false\n", Schema::default()).unwrap();
        assert!(!r.options.insert_covert);
        assert_eq!(r.label_map, ConversionRules::default().label_map);
        for target in ConversionRules::default().label_map.values() {
            assert!(Schema::default().relation_labels.contains(target), "{target}");
        }
    }

    #[test]
    fn coordination_suffix_is_ignored() {
        let rules = ConversionRules::default();
        assert_eq!(rules.map_label("Sb_Co"), "AGENT");
        assert_eq!(rules.map_label("SUBJ"), "TOPIC");
        assert_eq!(rules.map_label("GEN"), "GEN");
    }

    const LAN_SENTENCE: &str = "1\tلن\tلن_1\tF\tF-\t_\t2\tAuxM\t_\t_
2\tيقرأ\tقرأ_1\tV\tVI\tMood=S|Person=3|Gender=M|Number=S\t0\tPred\t_\t_
3\tمحمد\tمحمد_1\tZ\tZ-\tCase=1|Defin=R\t2\tSb\t_\t_
4\tالكتاب\tكتاب_1\tN\tN-\tCase=4|Defin=D\t2\tObj\t_\t_
5\tليلاً\tليل_1\tD\tD-\t_\t2\tAdv\t_\t_
";

    #[test]
    fn accusative_particle_heads_the_verb() {
        let s = &parse_treebank(LAN_SENTENCE).unwrap().sentences[0];
        let (out, rep) = convert_sentence(s, &ConversionRules::default()).unwrap();
        assert_eq!(out.heads(), [0, 1, 2, 2, 2]);
        assert_eq!(out.deprels(), ["P-ACC", "VB", "AGENT", "OBJ", "ADVP"]);
        assert_eq!(rep.passed_through, 0);
    }

    #[test]
    fn nominal_predicate_forms() {
        let rules = ConversionRules::default();
        let pp = "1\tالعصفور\tعصفور\tN\tN-\tCase=1\t0\tExD\t_\t_
2\tفي\tفي\tP\tP-\t_\t1\tAuxP\t_\t_
3\tالقفص\tقفص\tN\tN-\tCase=2\t2\tAdv\t_\t_
";
        let (out, _) = convert_sentence(&parse_treebank(pp).unwrap().sentences[0], &rules).unwrap();
        assert_eq!(out.deprels(), ["TOPIC", "PRED-PP", "GEN"]);

        let advp = "1\tالكتاب\tكتاب\tN\tN-\tCase=1\t2\tSb\t_\t_
2\tفوق\tفوق\tD\tD-\t_\t0\tPred\t_\t_
3\tالطاولة\tطاولة\tN\tN-\tCase=2\t2\tAtr\t_\t_
";
        let (out, _) = convert_sentence(&parse_treebank(advp).unwrap().sentences[0], &rules).unwrap();
        assert_eq!(out.heads(), [0, 1, 2]);
        assert_eq!(out.deprels(), ["TOPIC", "PRED-ADVP", "GEN"]);

        let np = "1\tالفتاة\tفتاة\tN\tN-\tCase=1\t0\tExD\t_\t_
2\tشعر\tشعر\tN\tN-\tCase=1\t1\tPnom\t_\t_
3\tها\tهي\tS\tS-\t_\t2\tAtr\t_\t_
4\tطويل\tطويل\tA\tA-\tCase=1\t2\tPred\t_\t_
";
        let (out, _) = convert_sentence(&parse_treebank(np).unwrap().sentences[0], &rules).unwrap();
        assert_eq!(out.deprels(), ["TOPIC", "PRED-NP", "GEN", "PRED-NOUN"]);
    }

    #[test]
    fn unrestructurable_sentence_is_passed_through() {
        let rules = ConversionRules::default();
        // Two unrelated main words.
        let doc = "1\tيأكل\tأكل\tV\tVI\tPerson=3|Gender=M|Number=S\t0\tPred\t_\t_
2\tالرجل\tرجل\tN\tN-\tCase=1\t1\tSb\t_\t_
3\tالسمك\tسمك\tN\tN-\tCase=4\t0\tObj\t_\t_
";
        let (out, rep) = convert_sentence(&parse_treebank(doc).unwrap().sentences[0], &rules).unwrap();
        assert_eq!(rep.passed_through, 1);
        assert_eq!(out.heads(), [0, 1, 0]);
        assert_eq!(out.deprels(), ["VB", "AGENT", "OBJ"]);
    }

    #[test]
    fn empty_treebank() {
        let (out, rep) = convert_treebank(&Treebank::default(), &ConversionRules::default(), None).unwrap();
        assert!(out.is_empty());
        assert_eq!(rep, ConversionReport::default());
    }

    #[test]
    fn overrides() {
        let rules = ConversionRules::default();
        let tb = parse_treebank(&format!("{LAN_SENTENCE}\n{LAN_SENTENCE}\n{LAN_SENTENCE}")).unwrap();
        let bad = parse_treebank("# sent_id = 3\n1\tx\tx\tN\tN-\t_\t0\tBOGUS\t_\t_\n").unwrap();
        match convert_treebank(&tb, &rules, Some(&bad)) {
            Err(ConvertError::InvalidOverride { sentence: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        let far = parse_treebank("# sent_id = 9\n1\tx\tx\tN\tN-\t_\t0\tTOPIC\t_\t_\n").unwrap();
        assert!(matches!(
            convert_treebank(&tb, &rules, Some(&far)),
            Err(ConvertError::OverrideIndexOutOfRange { index: 9, len: 3 })
        ));
        let good = parse_treebank("# sent_id = 2\n1\tx\tx\tN\tN-\t_\t0\tTOPIC\t_\t_\n").unwrap();
        let (out, rep) = convert_treebank(&tb, &rules, Some(&good)).unwrap();
        assert_eq!(out.sentences[1].len(), 1);
        assert_eq!(rep.overridden_sentences, 1);
        assert_eq!(rep.override_token_delta, -4);
        assert!(rep.is_balanced());
    }

    #[test]
    fn report_text() {
        let text = ConversionReport::default().to_text();
        assert!(text.lines().all(|l| l.split('\t').count() == 2));
        assert!(text.contains("dropped_pronoun\t0\n"));
    }
}

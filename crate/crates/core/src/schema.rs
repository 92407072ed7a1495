//! The I3rab vocabularies and lexicons, and validation of trees against the
//! governance constraints of i'rab analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conllx::{Sentence, Token, Treebank};

const DEFAULT_CONFIG: &str = include_str!("../data/default_schema.conf");

const SECTIONS: &[&str] = &[
    "labels",
    "label_aliases",
    "pos",
    "feats",
    "kana_sisters",
    "inna_sisters",
    "jussive",
    "accusative_particles",
    "joined_nominative_suffixes",
    "covert_pronouns",
    "split_lexicon",
    "punctuation_pos",
];

/// Feature pair marking a token inserted for an unexpressed pronoun.
pub const COVERT_FEATURE: (&str, &str) = ("Covert", "Y");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: duplicate entry `{entry}` in [{section}]")]
    DuplicateEntry {
        line: usize,
        section: String,
        entry: String,
    },
    #[error("alias `{alias}` points to unknown label `{target}`")]
    AliasTargetMissing { alias: String, target: String },
    #[error("line {line}: malformed entry in [{section}]: {reason}")]
    MalformedEntry {
        line: usize,
        section: String,
        reason: String,
    },
}

/// Person/gender/number descriptor of a suffix pronoun. Each field lists
/// the values it agrees with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinedPronoun {
    pub person: Vec<String>,
    pub gender: Vec<String>,
    pub number: Vec<String>,
    /// Independent pronoun the suffix stands for; used as the lemma.
    pub pronoun: String,
}

/// Key of the covert pronoun table. A gender of `-` matches any gender.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PronounKey {
    pub person: String,
    pub gender: String,
    pub number: String,
}

impl PronounKey {
    pub fn new(person: &str, gender: &str, number: &str) -> Self {
        PronounKey {
            person: person.to_string(),
            gender: gender.to_string(),
            number: number.to_string(),
        }
    }
}

/// One part of a split-lexicon entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPart {
    pub form: String,
    /// Fine POS tag when the part carries its own annotation; `None` parts
    /// inherit the fused token's annotation.
    pub postag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub relation_labels: BTreeSet<String>,
    pub pos_tags: BTreeSet<String>,
    pub feature_keys: BTreeMap<String, BTreeSet<String>>,
    pub label_aliases: BTreeMap<String, String>,
    pub kana_sisters: BTreeSet<String>,
    pub inna_sisters: BTreeSet<String>,
    pub jussive_particles: BTreeSet<String>,
    pub accusative_particles: BTreeSet<String>,
    pub joined_nominative_suffixes: BTreeMap<String, JoinedPronoun>,
    pub covert_pronouns: BTreeMap<PronounKey, String>,
    pub split_lexicon: BTreeMap<String, Vec<SplitPart>>,
    pub punctuation_pos: BTreeSet<String>,
}

impl Default for Schema {
    fn default() -> Self {
        parse_sections(DEFAULT_CONFIG, None).expect("built-in schema is valid")
    }
}

/// Loads a schema from the sectioned configuration format. Sections missing
/// from `config` keep their built-in defaults.
pub fn load_schema(config: &str) -> Result<Schema, SchemaError> {
    parse_sections(config, Some(Schema::default()))
}

fn parse_sections(config: &str, base: Option<Schema>) -> Result<Schema, SchemaError> {
    let mut sections: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in config.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(SchemaError::UnknownSection { line: line_no, name });
            }
            if sections.contains_key(&name) {
                return Err(SchemaError::DuplicateEntry {
                    line: line_no,
                    section: name.clone(),
                    entry: format!("[{}]", name),
                });
            }
            sections.insert(name.clone(), Vec::new());
            current = Some(name);
            continue;
        }
        match &current {
            Some(name) => sections
                .get_mut(name)
                .expect("section registered")
                .push((line_no, line.to_string())),
            None => {
                return Err(SchemaError::MalformedEntry {
                    line: line_no,
                    section: String::new(),
                    reason: "entry before any section header".into(),
                })
            }
        }
    }

    let mut schema = match base {
        Some(s) => s,
        None => Schema {
            relation_labels: BTreeSet::new(),
            pos_tags: BTreeSet::new(),
            feature_keys: BTreeMap::new(),
            label_aliases: BTreeMap::new(),
            kana_sisters: BTreeSet::new(),
            inna_sisters: BTreeSet::new(),
            jussive_particles: BTreeSet::new(),
            accusative_particles: BTreeSet::new(),
            joined_nominative_suffixes: BTreeMap::new(),
            covert_pronouns: BTreeMap::new(),
            split_lexicon: BTreeMap::new(),
            punctuation_pos: BTreeSet::new(),
        },
    };

    for (name, entries) in &sections {
        let name = name.as_str();
        match name {
            "labels" => schema.relation_labels = word_set(name, entries)?,
            "pos" => schema.pos_tags = word_set(name, entries)?,
            "kana_sisters" => schema.kana_sisters = word_set(name, entries)?,
            "inna_sisters" => schema.inna_sisters = word_set(name, entries)?,
            "jussive" => schema.jussive_particles = word_set(name, entries)?,
            "accusative_particles" => schema.accusative_particles = word_set(name, entries)?,
            "punctuation_pos" => schema.punctuation_pos = word_set(name, entries)?,
            "label_aliases" => {
                schema.label_aliases = BTreeMap::new();
                for (line, entry) in entries {
                    let (from, to) = arrow(name, *line, entry)?;
                    insert_unique(&mut schema.label_aliases, name, *line, from.into(), to.into())?;
                }
            }
            "feats" => {
                schema.feature_keys = BTreeMap::new();
                for (line, entry) in entries {
                    let (key, values) = entry.split_once('=').ok_or_else(|| SchemaError::MalformedEntry {
                        line: *line,
                        section: name.into(),
                        reason: "expected `Key = v1,v2,...`".into(),
                    })?;
                    let values = values
                        .split(',')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(String::from)
                        .collect();
                    insert_unique(&mut schema.feature_keys, name, *line, key.trim().into(), values)?;
                }
            }
            "joined_nominative_suffixes" => {
                schema.joined_nominative_suffixes = BTreeMap::new();
                for (line, entry) in entries {
                    let (suffix, desc) = arrow(name, *line, entry)?;
                    let fields: Vec<&str> = desc.split(',').map(str::trim).collect();
                    if fields.len() != 4 || fields.iter().any(|f| f.is_empty()) {
                        return Err(SchemaError::MalformedEntry {
                            line: *line,
                            section: name.into(),
                            reason: "expected `suffix -> person,gender,number,form`".into(),
                        });
                    }
                    let alts = |f: &str| f.split('|').map(str::trim).map(String::from).collect();
                    let pron = JoinedPronoun {
                        person: alts(fields[0]),
                        gender: alts(fields[1]),
                        number: alts(fields[2]),
                        pronoun: fields[3].to_string(),
                    };
                    insert_unique(&mut schema.joined_nominative_suffixes, name, *line, suffix.into(), pron)?;
                }
            }
            "covert_pronouns" => {
                schema.covert_pronouns = BTreeMap::new();
                for (line, entry) in entries {
                    let (key, form) = arrow(name, *line, entry)?;
                    let fields: Vec<&str> = key.split(',').map(str::trim).collect();
                    if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
                        return Err(SchemaError::MalformedEntry {
                            line: *line,
                            section: name.into(),
                            reason: "expected `person,gender,number -> form`".into(),
                        });
                    }
                    let key = PronounKey::new(fields[0], fields[1], fields[2]);
                    insert_unique(&mut schema.covert_pronouns, name, *line, key, form.into())?;
                }
            }
            "split_lexicon" => {
                schema.split_lexicon = BTreeMap::new();
                for (line, entry) in entries {
                    let (fused, parts) = arrow(name, *line, entry)?;
                    let parts = parse_split_parts(parts).ok_or_else(|| SchemaError::MalformedEntry {
                        line: *line,
                        section: name.into(),
                        reason: "expected at least two non-empty parts".into(),
                    })?;
                    insert_unique(&mut schema.split_lexicon, name, *line, fused.into(), parts)?;
                }
            }
            _ => unreachable!("section names are checked while reading"),
        }
    }

    for (alias, target) in &schema.label_aliases {
        if !schema.relation_labels.contains(target) {
            return Err(SchemaError::AliasTargetMissing {
                alias: alias.clone(),
                target: target.clone(),
            });
        }
        if schema.relation_labels.contains(alias) {
            return Err(SchemaError::DuplicateEntry {
                line: 0,
                section: "label_aliases".into(),
                entry: alias.clone(),
            });
        }
    }
    Ok(schema)
}

/// Parses `part + part/TAG + ...`; needs at least two non-empty parts.
pub fn parse_split_parts(text: &str) -> Option<Vec<SplitPart>> {
    let parts: Vec<SplitPart> = text
        .split('+')
        .map(str::trim)
        .map(|p| match p.split_once('/') {
            Some((form, tag)) => SplitPart {
                form: form.trim().into(),
                postag: Some(tag.trim().into()).filter(|t: &String| !t.is_empty()),
            },
            None => SplitPart {
                form: p.into(),
                postag: None,
            },
        })
        .collect();
    (parts.len() >= 2 && parts.iter().all(|p| !p.form.is_empty())).then_some(parts)
}

fn word_set(section: &str, entries: &[(usize, String)]) -> Result<BTreeSet<String>, SchemaError> {
    let mut set = BTreeSet::new();
    for (line, entry) in entries {
        if !set.insert(entry.clone()) {
            return Err(SchemaError::DuplicateEntry {
                line: *line,
                section: section.into(),
                entry: entry.clone(),
            });
        }
    }
    Ok(set)
}

fn arrow<'a>(section: &str, line: usize, entry: &'a str) -> Result<(&'a str, &'a str), SchemaError> {
    let (a, b) = entry.split_once("->").ok_or_else(|| SchemaError::MalformedEntry {
        line,
        section: section.into(),
        reason: "expected `FROM -> TO`".into(),
    })?;
    let (a, b) = (a.trim(), b.trim());
    if a.is_empty() || b.is_empty() {
        return Err(SchemaError::MalformedEntry {
            line,
            section: section.into(),
            reason: "empty side of `->`".into(),
        });
    }
    Ok((a, b))
}

fn insert_unique<K: Ord + fmt::Debug, V>(
    map: &mut BTreeMap<K, V>,
    section: &str,
    line: usize,
    key: K,
    value: V,
) -> Result<(), SchemaError> {
    if map.contains_key(&key) {
        return Err(SchemaError::DuplicateEntry {
            line,
            section: section.into(),
            entry: format!("{:?}", key),
        });
    }
    map.insert(key, value);
    Ok(())
}

/// Coarse word class derived from the POS columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordClass {
    Verb,
    Noun,
    Adjective,
    Adverb,
    Pronoun,
    Preposition,
    Conjunction,
    Particle,
    Punctuation,
    Other,
}

impl WordClass {
    pub fn of(token: &Token) -> WordClass {
        let tag = if token.postag.is_empty() {
            &token.cpostag
        } else {
            &token.postag
        };
        match tag.chars().next() {
            Some('V') => WordClass::Verb,
            Some('N') | Some('Z') | Some('Q') | Some('Y') => WordClass::Noun,
            Some('A') => WordClass::Adjective,
            Some('D') => WordClass::Adverb,
            Some('S') => WordClass::Pronoun,
            Some('P') => WordClass::Preposition,
            Some('C') => WordClass::Conjunction,
            Some('F') | Some('I') => WordClass::Particle,
            Some('G') => WordClass::Punctuation,
            _ => WordClass::Other,
        }
    }

    /// Nouns, adjectives and pronouns: words that can fill a topic or agent slot.
    pub fn is_nominal(self) -> bool {
        matches!(self, WordClass::Noun | WordClass::Adjective | WordClass::Pronoun)
    }
}

/// Normalizes Arabic text for lexicon lookup: strips diacritics and
/// tatweel, unifies hamzated alef forms, and drops the `_N` sense index
/// carried by treebank lemmas.
pub fn normalize(word: &str) -> String {
    let word = match word.rsplit_once('_') {
        Some((w, n)) if !w.is_empty() && n.chars().all(|c| c.is_ascii_digit()) => w,
        _ => match word.split_once('_') {
            Some((n, w)) if !w.is_empty() && n.chars().all(|c| c.is_ascii_digit()) => w,
            _ => word,
        },
    };
    word.chars()
        .filter(|&c| !('\u{064B}'..='\u{065F}').contains(&c) && c != '\u{0670}' && c != '\u{0640}')
        .map(|c| match c {
            'أ' | 'إ' | 'آ' | 'ٱ' => 'ا',
            other => other,
        })
        .collect()
}

impl Schema {
    /// Resolves an alias to its relation label; other labels are returned
    /// unchanged.
    pub fn resolve<'a>(&'a self, label: &'a str) -> &'a str {
        self.label_aliases.get(label).map(String::as_str).unwrap_or(label)
    }

    pub fn is_known_label(&self, label: &str) -> bool {
        self.relation_labels.contains(label) || self.label_aliases.contains_key(label)
    }

    pub fn is_punct(&self, token: &Token) -> bool {
        if !token.postag.is_empty() {
            return self.punctuation_pos.contains(&token.postag);
        }
        !token.cpostag.is_empty()
            && self
                .punctuation_pos
                .iter()
                .any(|p| p.starts_with(token.cpostag.as_str()))
    }

    fn lexicon_match(set: &BTreeSet<String>, token: &Token) -> bool {
        let lemma = normalize(&token.lemma);
        let form = normalize(&token.form);
        set.iter().any(|entry| {
            let e = normalize(entry);
            (!lemma.is_empty() && e == lemma) || e == form
        })
    }

    pub fn is_kana_sister(&self, token: &Token) -> bool {
        WordClass::of(token) == WordClass::Verb && Self::lexicon_match(&self.kana_sisters, token)
    }

    pub fn is_inna_sister(&self, token: &Token) -> bool {
        !matches!(
            WordClass::of(token),
            WordClass::Verb | WordClass::Noun | WordClass::Pronoun | WordClass::Adjective
        ) && Self::lexicon_match(&self.inna_sisters, token)
    }

    pub fn is_jussive(&self, token: &Token) -> bool {
        WordClass::of(token) != WordClass::Verb && Self::lexicon_match(&self.jussive_particles, token)
    }

    pub fn is_accusative_particle(&self, token: &Token) -> bool {
        WordClass::of(token) != WordClass::Verb && Self::lexicon_match(&self.accusative_particles, token)
    }

    /// A verb that is not a Kana-sister.
    pub fn is_strong_verb(&self, token: &Token) -> bool {
        WordClass::of(token) == WordClass::Verb && !self.is_kana_sister(token)
    }

    pub fn is_covert(token: &Token) -> bool {
        token.feat(COVERT_FEATURE.0) == Some(COVERT_FEATURE.1)
    }

    /// Looks up the covert pronoun for a verb's person, gender and number.
    pub fn covert_pronoun(&self, person: &str, gender: &str, number: &str) -> Option<&str> {
        self.covert_pronouns
            .get(&PronounKey::new(person, gender, number))
            .or_else(|| self.covert_pronouns.get(&PronounKey::new(person, "-", number)))
            .map(String::as_str)
    }

    /// Canonical configuration text; `load_schema` of the result yields an
    /// equal schema.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let mut set = |name: &str, items: &BTreeSet<String>| {
            out.push_str(&format!("[{}]\n", name));
            for i in items {
                out.push_str(i);
                out.push('\n');
            }
        };
        set("labels", &self.relation_labels);
        set("pos", &self.pos_tags);
        set("kana_sisters", &self.kana_sisters);
        set("inna_sisters", &self.inna_sisters);
        set("jussive", &self.jussive_particles);
        set("accusative_particles", &self.accusative_particles);
        set("punctuation_pos", &self.punctuation_pos);
        out.push_str("[label_aliases]\n");
        for (a, t) in &self.label_aliases {
            out.push_str(&format!("{} -> {}\n", a, t));
        }
        out.push_str("[feats]\n");
        for (k, vs) in &self.feature_keys {
            let vs: Vec<&str> = vs.iter().map(String::as_str).collect();
            out.push_str(&format!("{} = {}\n", k, vs.join(",")));
        }
        out.push_str("[joined_nominative_suffixes]\n");
        for (s, p) in &self.joined_nominative_suffixes {
            out.push_str(&format!(
                "{} -> {},{},{},{}\n",
                s,
                p.person.join("|"),
                p.gender.join("|"),
                p.number.join("|"),
                p.pronoun
            ));
        }
        out.push_str("[covert_pronouns]\n");
        for (k, f) in &self.covert_pronouns {
            out.push_str(&format!("{},{},{} -> {}\n", k.person, k.gender, k.number, f));
        }
        out.push_str("[split_lexicon]\n");
        for (fused, parts) in &self.split_lexicon {
            let parts: Vec<String> = parts
                .iter()
                .map(|p| match &p.postag {
                    Some(t) => format!("{}/{}", p.form, t),
                    None => p.form.clone(),
                })
                .collect();
            out.push_str(&format!("{} -> {}\n", fused, parts.join(" + ")));
        }
        out
    }

    /// Hex SHA-256 of the canonical configuration.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_config().as_bytes());
        hash.iter().map(|b| format!("{:02x}", b)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationCode {
    UnknownLabel,
    UnknownPos,
    UnknownFeature,
    HeadSelfOrRange,
    Cycle,
    MultiRoot,
    RootPunctExtra,
    VerbWithoutAgent,
    CovertNotPronoun,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::UnknownLabel => "UNKNOWN_LABEL",
            ViolationCode::UnknownPos => "UNKNOWN_POS",
            ViolationCode::UnknownFeature => "UNKNOWN_FEATURE",
            ViolationCode::HeadSelfOrRange => "HEAD_SELF_OR_RANGE",
            ViolationCode::Cycle => "CYCLE",
            ViolationCode::MultiRoot => "MULTI_ROOT",
            ViolationCode::RootPunctExtra => "ROOT_PUNCT_EXTRA",
            ViolationCode::VerbWithoutAgent => "VERB_WITHOUT_AGENT",
            ViolationCode::CovertNotPronoun => "COVERT_NOT_PRONOUN",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            ViolationCode::RootPunctExtra | ViolationCode::VerbWithoutAgent | ViolationCode::UnknownFeature => {
                Severity::Warning
            }
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub sentence_index: usize,
    pub token_id: Option<usize>,
    pub code: ViolationCode,
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    fn new(sentence_index: usize, token_id: Option<usize>, code: ViolationCode, message: String) -> Self {
        Violation {
            sentence_index,
            token_id,
            code,
            severity: code.severity(),
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sentence {}", self.sentence_index)?;
        if let Some(id) = self.token_id {
            write!(f, " token {}", id)?;
        }
        write!(f, ": {} {}: {}", self.severity, self.code, self.message)
    }
}

/// Checks one sentence; `sentence_index` is only used for reporting.
/// An empty result means the sentence is valid.
pub fn validate_sentence(s: &Sentence, schema: &Schema, sentence_index: usize) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = Vec::new();
    let n = s.len();
    let mut push = |id: Option<usize>, code, msg: String| {
        out.push(Violation::new(sentence_index, id, code, msg));
    };

    let coarse: BTreeSet<String> = schema
        .pos_tags
        .iter()
        .filter_map(|t| t.chars().next())
        .map(String::from)
        .collect();

    for t in s.tokens() {
        if !schema.is_known_label(&t.deprel) {
            push(
                Some(t.id),
                UnknownLabel,
                format!("relation `{}` is not in the schema", t.deprel),
            );
        }
        if !t.postag.is_empty() && !schema.pos_tags.contains(&t.postag) {
            push(
                Some(t.id),
                UnknownPos,
                format!("POS tag `{}` is not in the schema", t.postag),
            );
        } else if !t.cpostag.is_empty() && !coarse.contains(&t.cpostag) {
            push(
                Some(t.id),
                UnknownPos,
                format!("coarse POS `{}` is not in the schema", t.cpostag),
            );
        }
        for (k, v) in t.feats.iter() {
            match schema.feature_keys.get(k) {
                None => push(
                    Some(t.id),
                    UnknownFeature,
                    format!("feature `{}` is not in the schema", k),
                ),
                Some(vals) if !vals.contains(v) => push(
                    Some(t.id),
                    UnknownFeature,
                    format!("value `{}` not allowed for feature `{}`", v, k),
                ),
                _ => {}
            }
        }
        if t.head == t.id || t.head > n {
            push(
                Some(t.id),
                HeadSelfOrRange,
                format!("head {} is invalid for token {}", t.head, t.id),
            );
        }
        if Schema::is_covert(t) && t.cpostag != "S" {
            push(
                Some(t.id),
                CovertNotPronoun,
                format!("covert token has coarse POS `{}`, expected `S`", t.cpostag),
            );
        }
    }

    // Cycles: walk each head chain; a chain longer than n never reaches 0.
    let mut reported: BTreeSet<usize> = BTreeSet::new();
    for t in s.tokens() {
        if let Some(members) = cycle_from(s, t.id) {
            let first = *members.iter().min().expect("non-empty cycle");
            if reported.insert(first) {
                let ids: Vec<String> = members.iter().map(|i| i.to_string()).collect();
                push(
                    Some(first),
                    Cycle,
                    format!("head chain loops through tokens {}", ids.join(",")),
                );
            }
        }
    }

    let (punct_roots, word_roots): (Vec<&Token>, Vec<&Token>) = s
        .tokens()
        .iter()
        .filter(|t| t.head == 0)
        .partition(|t| schema.is_punct(t));
    for t in word_roots.iter().skip(1) {
        push(
            Some(t.id),
            MultiRoot,
            format!("token {} is a second main word (first is {})", t.id, word_roots[0].id),
        );
    }
    for t in punct_roots.iter().skip(1) {
        push(
            Some(t.id),
            RootPunctExtra,
            "more than one punctuation token attached to ROOT".into(),
        );
    }

    for t in s.tokens() {
        if schema.is_strong_verb(t)
            && !s
                .tokens()
                .iter()
                .any(|d| d.head == t.id && schema.resolve(&d.deprel) == "AGENT")
        {
            push(
                Some(t.id),
                VerbWithoutAgent,
                format!("verb `{}` has no AGENT dependent", t.form),
            );
        }
    }
    out
}

/// Returns the members of the cycle reached from `start`, if any.
fn cycle_from(s: &Sentence, start: usize) -> Option<Vec<usize>> {
    let n = s.len();
    let mut path = Vec::new();
    let mut cur = start;
    for _ in 0..=n {
        if cur == 0 || cur > n {
            return None;
        }
        if let Some(pos) = path.iter().position(|&p| p == cur) {
            return Some(path[pos..].to_vec());
        }
        path.push(cur);
        cur = s.tokens()[cur - 1].head;
    }
    None
}

/// Validates every sentence; sentence indices are 1-based.
pub fn validate_treebank(tb: &Treebank, schema: &Schema) -> Vec<Violation> {
    tb.iter()
        .enumerate()
        .flat_map(|(i, s)| validate_sentence(s, schema, i + 1))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SentenceType {
    Verbal,
    Nominal,
    NominalWithKana,
    NominalWithInna,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("sentence has no content word")]
    Unclassifiable,
}

/// Particles that introduce a sentence without governing it.
fn is_skippable_particle(schema: &Schema, t: &Token) -> bool {
    matches!(WordClass::of(t), WordClass::Conjunction | WordClass::Particle)
        && !schema.is_inna_sister(t)
        && !schema.is_jussive(t)
        && !schema.is_accusative_particle(t)
}

/// Index of the first word that decides the sentence type.
pub fn first_content_index(s: &Sentence, schema: &Schema) -> Option<usize> {
    s.tokens()
        .iter()
        .position(|t| !schema.is_punct(t) && !is_skippable_particle(schema, t))
}

/// Classifies a sentence as verbal or nominal by its first content word.
pub fn classify_sentence(s: &Sentence, schema: &Schema) -> Result<SentenceType, ClassifyError> {
    let toks = s.tokens();
    let i = first_content_index(s, schema).ok_or(ClassifyError::Unclassifiable)?;
    let w = &toks[i];
    if schema.is_inna_sister(w) {
        return Ok(SentenceType::NominalWithInna);
    }
    if WordClass::of(w) == WordClass::Verb {
        return Ok(if schema.is_kana_sister(w) {
            SentenceType::NominalWithKana
        } else {
            SentenceType::Verbal
        });
    }
    let verb_follows = |from: usize, stop_at_nominative: bool| {
        for t in &toks[from + 1..] {
            if WordClass::of(t) == WordClass::Verb {
                return true;
            }
            if stop_at_nominative && WordClass::of(t).is_nominal() && t.feat("Case") == Some("1") {
                return false;
            }
        }
        false
    };
    if schema.is_jussive(w) || schema.is_accusative_particle(w) {
        return Ok(if verb_follows(i, false) {
            SentenceType::Verbal
        } else {
            SentenceType::Nominal
        });
    }
    // A fronted prepositional or adverbial phrase followed by a verb.
    if matches!(WordClass::of(w), WordClass::Preposition | WordClass::Adverb) && verb_follows(i, true) {
        return Ok(SentenceType::Verbal);
    }
    Ok(SentenceType::Nominal)
}

/// True iff `t` governs at least one word in `s`.
pub fn classify_governor(t: &Token, s: &Sentence, _schema: &Schema) -> bool {
    s.tokens().iter().any(|d| d.head == t.id)
}

/// Whether the governance rules predict `t` to be a governor: all verbs,
/// prepositions and jussive/accusative/Inna particles; nouns only when they
/// head something.
pub fn predicted_governor(t: &Token, s: &Sentence, schema: &Schema) -> bool {
    match WordClass::of(t) {
        WordClass::Verb | WordClass::Preposition => true,
        WordClass::Conjunction | WordClass::Particle => {
            schema.is_jussive(t) || schema.is_accusative_particle(t) || schema.is_inna_sister(t)
        }
        WordClass::Punctuation => false,
        _ => classify_governor(t, s, schema),
    }
}

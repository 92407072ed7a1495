//! Reading and writing dependency treebanks in the CoNLL-X format.
//!
//! A document is a sequence of blank-line separated sentence blocks. Each
//! token row carries ten tab-separated columns:
//!
//! ```text
//! ID FORM LEMMA CPOSTAG POSTAG FEATS HEAD DEPREL PHEAD PDEPREL
//! ```
//!
//! The reader also accepts shortened rows: 8 columns (no projective
//! columns), 6 columns (a blind file without HEAD/DEPREL) and 4 columns
//! (`ID FORM HEAD DEPREL`). Both `_` and `-` are read as the empty marker
//! for optional columns; the writer always emits `_`.

use std::fmt;

use thiserror::Error;

/// Marker written for empty optional columns.
pub const EMPTY: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConllError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: expected token id {expected}, found {found}")]
    IdGap { line: usize, expected: usize, found: usize },
    #[error("line {line}: head {head} outside 0..={len}")]
    HeadOutOfRange { line: usize, head: usize, len: usize },
    #[error("duplicate feature key `{0}`")]
    DuplicateKey(String),
    #[error("malformed feature pair `{0}` (expected key=value)")]
    MalformedPair(String),
}

/// Morphological features of a token, kept in input order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FeatureBag(Vec<(String, String)>);

impl FeatureBag {
    pub fn new() -> Self {
        FeatureBag(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Sets `key` to `value`, replacing an existing value in place or
    /// appending a new pair.
    pub fn set(&mut self, key: &str, value: &str) {
        match self.0.iter_mut().find(|(k, _)| k == key) {
            Some(pair) => pair.1 = value.to_string(),
            None => self.0.push((key.to_string(), value.to_string())),
        }
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        let idx = self.0.iter().position(|(k, _)| k == key)?;
        Some(self.0.remove(idx).1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Builds a bag from pairs, rejecting duplicate keys.
    pub fn from_pairs<K, V, I>(pairs: I) -> Result<Self, ConllError>
    where
        K: Into<String>,
        V: Into<String>,
        I: IntoIterator<Item = (K, V)>,
    {
        let mut bag = FeatureBag::new();
        for (k, v) in pairs {
            let k = k.into();
            if bag.get(&k).is_some() {
                return Err(ConllError::DuplicateKey(k));
            }
            bag.0.push((k, v.into()));
        }
        Ok(bag)
    }
}

impl fmt::Display for FeatureBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(EMPTY);
        }
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{}={}", k, v)?;
        }
        Ok(())
    }
}

/// Parses a FEATS column value.
///
/// Pairs are separated by `|`, or by runs of spaces as printed in some
/// annotated examples. Each pair is split on its first `=`.
pub fn parse_feats(field: &str) -> Result<FeatureBag, ConllError> {
    let field = field.trim();
    if field.is_empty() || is_empty_marker(field) {
        return Ok(FeatureBag::new());
    }
    let mut pairs = Vec::new();
    for item in field.split(['|', ' ']).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| ConllError::MalformedPair(item.to_string()))?;
        if k.is_empty() {
            return Err(ConllError::MalformedPair(item.to_string()));
        }
        pairs.push((k, v));
    }
    FeatureBag::from_pairs(pairs)
}

/// One token row.
///
/// Empty optional text columns are stored as empty strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub cpostag: String,
    pub postag: String,
    pub feats: FeatureBag,
    pub head: usize,
    pub deprel: String,
    pub phead: Option<usize>,
    pub pdeprel: Option<String>,
}

impl Token {
    /// A token with only id and form set, attached to the artificial root.
    pub fn new(id: usize, form: impl Into<String>) -> Self {
        Token {
            id,
            form: form.into(),
            lemma: String::new(),
            cpostag: String::new(),
            postag: String::new(),
            feats: FeatureBag::new(),
            head: 0,
            deprel: String::new(),
            phead: None,
            pdeprel: None,
        }
    }

    pub fn with_pos(mut self, cpostag: &str, postag: &str) -> Self {
        self.cpostag = cpostag.to_string();
        self.postag = postag.to_string();
        self
    }

    pub fn with_head(mut self, head: usize, deprel: &str) -> Self {
        self.head = head;
        self.deprel = deprel.to_string();
        self
    }

    pub fn with_lemma(mut self, lemma: &str) -> Self {
        self.lemma = lemma.to_string();
        self
    }

    pub fn with_feats(mut self, feats: FeatureBag) -> Self {
        self.feats = feats;
        self
    }

    pub fn feat(&self, key: &str) -> Option<&str> {
        self.feats.get(key)
    }

    fn write_row(&self, out: &mut String) {
        use std::fmt::Write;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id,
            self.form,
            or_empty(&self.lemma),
            or_empty(&self.cpostag),
            or_empty(&self.postag),
            self.feats,
            self.head,
            or_empty(&self.deprel),
            self.phead.map(|h| h.to_string()).unwrap_or_else(|| EMPTY.to_string()),
            self.pdeprel.as_deref().map(or_empty).unwrap_or(EMPTY),
        );
    }
}

fn or_empty(s: &str) -> &str {
    if s.is_empty() {
        EMPTY
    } else {
        s
    }
}

fn is_empty_marker(s: &str) -> bool {
    s == "_" || s == "-"
}

/// A sentence: tokens numbered 1..n with heads in 0..n.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
    comments: Vec<String>,
}

impl Sentence {
    /// Checks the id and head invariants. Self-attachment is left to the
    /// validator so that it can be reported rather than rejected.
    pub fn new(tokens: Vec<Token>) -> Result<Self, ConllError> {
        Self::with_comments(tokens, Vec::new())
    }

    pub fn with_comments(tokens: Vec<Token>, comments: Vec<String>) -> Result<Self, ConllError> {
        let n = tokens.len();
        for (i, t) in tokens.iter().enumerate() {
            if t.id != i + 1 {
                return Err(ConllError::IdGap {
                    line: i + 1,
                    expected: i + 1,
                    found: t.id,
                });
            }
            if t.head > n {
                return Err(ConllError::HeadOutOfRange {
                    line: i + 1,
                    head: t.head,
                    len: n,
                });
            }
            if t.form.is_empty() {
                return Err(ConllError::MalformedRow {
                    line: i + 1,
                    reason: "empty FORM".into(),
                });
            }
        }
        Ok(Sentence { tokens, comments })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based id.
    pub fn token(&self, id: usize) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Raw comment lines (including the leading `#`).
    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn set_comments(&mut self, comments: Vec<String>) {
        self.comments = comments;
    }

    /// Value of a `# sent_id = N` comment, if present.
    pub fn sent_id(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let rest = c.trim_start_matches('#').trim();
            let (key, value) = rest.split_once('=')?;
            (key.trim() == "sent_id").then(|| value.trim())
        })
    }

    pub fn heads(&self) -> Vec<usize> {
        self.tokens.iter().map(|t| t.head).collect()
    }

    pub fn deprels(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.deprel.as_str()).collect()
    }

    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }

    /// Ids of the direct dependents of `head` (0 for the artificial root).
    pub fn dependents(&self, head: usize) -> impl Iterator<Item = usize> + '_ {
        self.tokens.iter().filter(move |t| t.head == head).map(|t| t.id)
    }

    /// Replaces the head and label of token `id`.
    pub fn attach(&mut self, id: usize, head: usize, deprel: &str) -> Result<(), ConllError> {
        let n = self.tokens.len();
        if head > n {
            return Err(ConllError::HeadOutOfRange { line: id, head, len: n });
        }
        let t = id
            .checked_sub(1)
            .and_then(|i| self.tokens.get_mut(i))
            .ok_or(ConllError::IdGap {
                line: id,
                expected: n,
                found: id,
            })?;
        t.head = head;
        t.deprel = deprel.to_string();
        Ok(())
    }
}

/// An ordered collection of sentences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Treebank {
    pub sentences: Vec<Sentence>,
    pub source: Option<String>,
}

impl Treebank {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Treebank {
            sentences,
            source: None,
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sentence> {
        self.sentences.iter()
    }
}

impl FromIterator<Sentence> for Treebank {
    fn from_iter<I: IntoIterator<Item = Sentence>>(iter: I) -> Self {
        Treebank::new(iter.into_iter().collect())
    }
}

/// Parses a whole CoNLL-X document. CRLF line endings are accepted.
pub fn parse_treebank(document: &str) -> Result<Treebank, ConllError> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    let mut comments: Vec<String> = Vec::new();
    let mut block_start = 0;

    for (idx, raw) in document.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if !tokens.is_empty() {
                sentences.push(finish_block(
                    std::mem::take(&mut tokens),
                    std::mem::take(&mut comments),
                    block_start,
                )?);
            } else if !comments.is_empty() {
                return Err(ConllError::MalformedRow {
                    line: line_no,
                    reason: "comment block without tokens".into(),
                });
            }
            continue;
        }
        if line.starts_with('#') {
            if !tokens.is_empty() {
                return Err(ConllError::MalformedRow {
                    line: line_no,
                    reason: "comment inside a sentence".into(),
                });
            }
            comments.push(line.to_string());
            continue;
        }
        if tokens.is_empty() {
            block_start = line_no;
        }
        let token = parse_row(line, line_no)?;
        let expected = tokens.len() + 1;
        if token.id != expected {
            return Err(ConllError::IdGap {
                line: line_no,
                expected,
                found: token.id,
            });
        }
        tokens.push(token);
    }
    if !tokens.is_empty() {
        sentences.push(finish_block(tokens, comments, block_start)?);
    } else if !comments.is_empty() {
        return Err(ConllError::MalformedRow {
            line: document.lines().count(),
            reason: "comment block without tokens".into(),
        });
    }
    Ok(Treebank::new(sentences))
}

fn finish_block(tokens: Vec<Token>, comments: Vec<String>, first_line: usize) -> Result<Sentence, ConllError> {
    let n = tokens.len();
    if let Some((i, t)) = tokens.iter().enumerate().find(|(_, t)| t.head > n) {
        return Err(ConllError::HeadOutOfRange {
            line: first_line + i,
            head: t.head,
            len: n,
        });
    }
    Ok(Sentence { tokens, comments })
}

fn parse_index(field: &str, line: usize, column: &str) -> Result<usize, ConllError> {
    field.parse::<usize>().map_err(|_| ConllError::MalformedRow {
        line,
        reason: format!("non-numeric {} `{}`", column, field),
    })
}

fn optional_text(field: &str) -> String {
    if is_empty_marker(field) {
        String::new()
    } else {
        field.to_string()
    }
}

fn parse_row(line: &str, line_no: usize) -> Result<Token, ConllError> {
    let cols: Vec<&str> = line.split('\t').collect();
    let malformed = |reason: String| ConllError::MalformedRow { line: line_no, reason };

    let id = parse_index(cols[0], line_no, "ID")?;
    if id == 0 {
        return Err(malformed("token id 0".into()));
    }
    let form = cols.get(1).copied().unwrap_or_default();
    if form.is_empty() {
        return Err(malformed("empty FORM".into()));
    }
    let mut token = Token::new(id, form);

    let (head, deprel) = match cols.len() {
        4 => (Some(cols[2]), Some(cols[3])),
        6 => (None, None),
        8 | 10 => (Some(cols[6]), Some(cols[7])),
        n => return Err(malformed(format!("{} columns (expected 4, 6, 8 or 10)", n))),
    };
    if cols.len() >= 6 {
        token.lemma = optional_text(cols[2]);
        token.cpostag = optional_text(cols[3]);
        token.postag = optional_text(cols[4]);
        token.feats = parse_feats(cols[5]).map_err(|e| malformed(e.to_string()))?;
    }
    if let Some(head) = head {
        // Blind files carry `_` in HEAD; they parse as unattached.
        token.head = if head == EMPTY {
            0
        } else {
            parse_index(head, line_no, "HEAD")?
        };
    }
    if let Some(deprel) = deprel {
        token.deprel = optional_text(deprel);
    }
    if cols.len() == 10 {
        token.phead = if is_empty_marker(cols[8]) {
            None
        } else {
            Some(parse_index(cols[8], line_no, "PHEAD")?)
        };
        token.pdeprel = if is_empty_marker(cols[9]) {
            None
        } else {
            Some(cols[9].to_string())
        };
    }
    Ok(token)
}

/// Writes `sentence` in canonical form, followed by a blank line.
pub fn emit_sentence(sentence: &Sentence, out: &mut String) {
    for c in &sentence.comments {
        out.push_str(c);
        out.push('\n');
    }
    for t in &sentence.tokens {
        t.write_row(out);
    }
    out.push('\n');
}

/// Canonical serialization: ten columns, `_` for empty fields, LF line
/// endings and one blank line after every sentence.
pub fn emit_treebank(tb: &Treebank) -> String {
    let mut out = String::new();
    for s in &tb.sentences {
        emit_sentence(s, &mut out);
    }
    out
}

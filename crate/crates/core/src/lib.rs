//! Toolkit for the I3rab Arabic dependency scheme.
//!
//! * [`conllx`]: CoNLL-X reading and canonical writing.
//! * [`schema`]: label/tag vocabularies, lexicons and the tree validator.
//! * [`converter`]: PADT-style to I3rab re-tokenization and restructuring.
//! * [`parser`]: arc-eager transition parser with an averaged perceptron.
//! * [`eval`]: attachment scores, corpus statistics, cross-validation and
//!   the paired t-test.
//! * [`render`]: text and SVG drawings of dependency trees.

pub mod conllx;
pub mod converter;
pub mod eval;
pub mod parser;
pub mod render;
pub mod schema;

pub use conllx::{emit_treebank, parse_feats, parse_treebank, ConllError, FeatureBag, Sentence, Token, Treebank};
pub use converter::{convert_treebank, ConversionReport, ConversionRules, ConvertError};
pub use eval::{
    attachment_scores, cross_validate, kfold_split, paired_t_test, treebank_scores, EvalError, EvalOptions, EvalReport,
};
pub use parser::{parse_sentence, train, ParserError, ParserModel, Transition};
pub use render::{render_svg, render_text, render_tree, RenderFormat, SvgOptions};
pub use schema::{load_schema, validate_sentence, Schema, SentenceType, Severity, Violation, ViolationCode};

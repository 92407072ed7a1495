//! Browser bindings: draw a tree, convert a PADT-style sentence with
//! before/after drawings, and run the paired t-test on fold scores.

use i3rab::converter::{convert_treebank, ConversionRules};
use i3rab::eval::{improvement_pct, mean, paired_t_test};
use i3rab::render::{render_svg, render_text, SvgOptions};
use i3rab::{emit_treebank, parse_treebank, Sentence, Treebank};
use wasm_bindgen::prelude::*;

fn sentence_at(tb: &Treebank, index: usize) -> Result<&Sentence, String> {
    if tb.is_empty() {
        return Err("no sentences in input".into());
    }
    tb.sentences
        .get(index.wrapping_sub(1))
        .ok_or_else(|| format!("sentence {index} not found ({} in input)", tb.len()))
}

/// SVG drawing of the 1-based `index`-th sentence of a CoNLL-X document.
#[wasm_bindgen]
pub fn render_conll_svg(conll: &str, index: usize, rtl: bool) -> Result<String, String> {
    let tb = parse_treebank(conll).map_err(|e| e.to_string())?;
    Ok(render_svg(sentence_at(&tb, index)?, SvgOptions { rtl }))
}

/// Indented text drawing of the `index`-th sentence.
#[wasm_bindgen]
pub fn render_conll_text(conll: &str, index: usize) -> Result<String, String> {
    let tb = parse_treebank(conll).map_err(|e| e.to_string())?;
    Ok(render_text(sentence_at(&tb, index)?))
}

#[wasm_bindgen]
pub struct Conversion {
    output: String,
    report: String,
    before: String,
    after: String,
}

#[wasm_bindgen]
impl Conversion {
    /// Converted document in canonical CoNLL-X.
    #[wasm_bindgen(getter)]
    pub fn output(&self) -> String {
        self.output.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn report(&self) -> String {
        self.report.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn before_svg(&self) -> String {
        self.before.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn after_svg(&self) -> String {
        self.after.clone()
    }
}

/// Converts a PADT-style document with the built-in rules and draws the
/// `index`-th sentence before and after.
#[wasm_bindgen]
pub fn convert_padt(conll: &str, index: usize, rtl: bool) -> Result<Conversion, String> {
    let tb = parse_treebank(conll).map_err(|e| e.to_string())?;
    let before = render_svg(sentence_at(&tb, index)?, SvgOptions { rtl });
    let (out, report) = convert_treebank(&tb, &ConversionRules::default(), None).map_err(|e| e.to_string())?;
    let after = render_svg(sentence_at(&out, index)?, SvgOptions { rtl });
    Ok(Conversion {
        output: emit_treebank(&out),
        report: report.to_text(),
        before,
        after,
    })
}

fn numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("not a number: {t}")))
        .collect()
}

/// Paired t-test of per-fold scores given as whitespace or comma separated
/// lists; returns a short plain-text summary.
#[wasm_bindgen]
pub fn t_test(baseline: &str, system: &str) -> Result<String, String> {
    let (a, b) = (numbers(baseline)?, numbers(system)?);
    let t = paired_t_test(&a, &b).map_err(|e| e.to_string())?;
    let gain = improvement_pct(&a, &b).map_err(|e| e.to_string())?;
    Ok(format!(
        "mean baseline {:.2}\nmean system {:.2}\nimprovement {:.2}%\nt = {:.4} (df {})\np = {:.3e} (two-sided)\n",
        mean(&a),
        mean(&b),
        gain,
        t.t,
        t.df,
        t.p
    ))
}

/// Bundled PADT-style example sentences.
#[wasm_bindgen]
pub fn sample_padt() -> String {
    include_str!("../../core/data/sample_padt.conll").to_string()
}

//! Text and SVG drawings of dependency trees.

use std::fmt::Write;
use std::str::FromStr;

use crate::conllx::{Sentence, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Svg,
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "svg" => Ok(RenderFormat::Svg),
            other => Err(format!("unknown render format '{other}' (expected text or svg)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SvgOptions {
    /// Mirror the layout so token 1 sits at the right edge.
    pub rtl: bool,
}

pub const FONT_FAMILY: &str =
    "'Amiri', 'Noto Naskh Arabic', 'Scheherazade New', 'Arial Unicode MS', 'DejaVu Sans', sans-serif";

pub fn render_tree(s: &Sentence, format: RenderFormat) -> String {
    match format {
        RenderFormat::Text => render_text(s),
        RenderFormat::Svg => render_svg(s, SvgOptions::default()),
    }
}

fn pos_of(t: &Token) -> &str {
    if !t.cpostag.is_empty() {
        &t.cpostag
    } else if !t.postag.is_empty() {
        &t.postag
    } else {
        "_"
    }
}

fn label_of(t: &Token) -> &str {
    if t.deprel.is_empty() {
        "_"
    } else {
        &t.deprel
    }
}

/// One line per token, depth-first from the root in id order, each line
/// `head → dependent (CPOS) [label]` indented by depth.
pub fn render_text(s: &Sentence) -> String {
    let mut out = String::new();
    let mut seen = vec![false; s.len() + 1];
    let mut stack: Vec<(usize, usize)> = s
        .dependents(0)
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .map(|d| (d, 0))
        .collect();
    let emit = |id: usize, depth: usize, out: &mut String| {
        let t = s.token(id).expect("dependent id within sentence");
        let head = if t.head == 0 {
            "ROOT"
        } else {
            s.token(t.head).map_or("?", |h| h.form.as_str())
        };
        let _ = writeln!(
            out,
            "{}{} → {} ({}) [{}]",
            "  ".repeat(depth),
            head,
            t.form,
            pos_of(t),
            label_of(t)
        );
    };
    loop {
        while let Some((id, depth)) = stack.pop() {
            if seen[id] {
                continue;
            }
            seen[id] = true;
            emit(id, depth, &mut out);
            let kids: Vec<usize> = s.dependents(id).collect();
            stack.extend(kids.into_iter().rev().map(|d| (d, depth + 1)));
        }
        // Tokens unreachable from the root (cyclic input) are still listed.
        match (1..=s.len()).find(|&i| !seen[i]) {
            Some(i) => stack.push((i, 0)),
            None => break,
        }
    }
    out
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const MARGIN: f64 = 20.0;
const GAP: f64 = 24.0;
const CHAR_W: f64 = 11.0;
const MIN_W: f64 = 48.0;
const LEVEL_H: f64 = 28.0;
const ROOT_H: f64 = 24.0;

/// Standalone SVG with tokens on a baseline in id order and labelled arcs
/// above it.
pub fn render_svg(s: &Sentence, opts: SvgOptions) -> String {
    let widths: Vec<f64> = s
        .tokens()
        .iter()
        .map(|t| {
            let chars = t
                .form
                .chars()
                .count()
                .max(pos_of(t).chars().count())
                .max(label_of(t).chars().count());
            (chars as f64 * CHAR_W).max(MIN_W)
        })
        .collect();
    let total_w = MARGIN * 2.0 + widths.iter().sum::<f64>() + GAP * widths.len().saturating_sub(1) as f64;
    let mut centers = Vec::with_capacity(widths.len());
    let mut x = MARGIN;
    for w in &widths {
        let c = x + w / 2.0;
        centers.push(if opts.rtl { total_w - c } else { c });
        x += w + GAP;
    }

    let max_span = s
        .tokens()
        .iter()
        .filter(|t| t.head != 0)
        .map(|t| t.head.abs_diff(t.id))
        .max()
        .unwrap_or(0);
    let arc_top = MARGIN + 16.0;
    let baseline = arc_top + LEVEL_H * max_span.max(1) as f64 + ROOT_H + 10.0;
    let total_h = baseline + 48.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}" font-family="{}" font-size="14">"#,
        total_w,
        total_h,
        total_w,
        total_h,
        FONT_FAMILY.replace('\'', "&apos;"),
    );
    out.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>\n",
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);

    for (t, &cx) in s.tokens().iter().zip(&centers) {
        let _ = writeln!(
            out,
            r##"<text class="form" x="{:.1}" y="{:.1}" text-anchor="middle" fill="#000">{}</text>"##,
            cx,
            baseline + 18.0,
            escape(&t.form)
        );
        let _ = writeln!(
            out,
            r##"<text class="pos" x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11" fill="#666">{}</text>"##,
            cx,
            baseline + 36.0,
            escape(pos_of(t))
        );
    }

    for t in s.tokens() {
        let dx = centers[t.id - 1];
        let label = escape(label_of(t));
        if t.head == 0 || t.head > s.len() {
            let top = arc_top;
            let _ = writeln!(
                out,
                r##"<path class="arc root" d="M{dx:.1},{top:.1} L{dx:.1},{:.1}" stroke="#333" fill="none" marker-end="url(#arrow)"/>"##,
                baseline
            );
            let _ = writeln!(
                out,
                r##"<text class="label" x="{dx:.1}" y="{:.1}" text-anchor="middle" font-size="11" fill="#a33">ROOT {label}</text>"##,
                top - 4.0
            );
            continue;
        }
        let hx = centers[t.head - 1];
        let span = t.head.abs_diff(t.id) as f64;
        let peak = baseline - LEVEL_H * span;
        let mid = (hx + dx) / 2.0;
        let _ = writeln!(
            out,
            r##"<path class="arc" d="M{hx:.1},{baseline:.1} C{hx:.1},{peak:.1} {dx:.1},{peak:.1} {dx:.1},{baseline:.1}" stroke="#333" fill="none" marker-end="url(#arrow)"/>"##
        );
        let _ = writeln!(
            out,
            r##"<text class="label" x="{mid:.1}" y="{:.1}" text-anchor="middle" font-size="11" fill="#a33">{label}</text>"##,
            baseline - LEVEL_H * span * 0.75 - 3.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baghdad() -> Sentence {
        let rows = [
            ("موظفو", "N", 0, "TOPIC"),
            ("اليونيسف", "Z", 1, "GEN"),
            ("يبدأ", "V", 1, "PRED-VP"),
            ("ون", "S", 3, "AGENT"),
            ("العودة", "N", 3, "OBJ"),
            ("إلى", "P", 5, "P"),
            ("بغداد", "Z", 6, "GEN"),
        ];
        Sentence::new(
            rows.iter()
                .enumerate()
                .map(|(i, &(f, p, h, l))| Token::new(i + 1, f).with_pos(p, &format!("{p}-")).with_head(h, l))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_token() {
        let s = Sentence::new(vec![Token::new(1, "نعم").with_pos("F", "F-").with_head(0, "TOPIC")]).unwrap();
        assert_eq!(render_text(&s), "ROOT → نعم (F) [TOPIC]\n");
    }

    #[test]
    fn text_tree() {
        let text = render_text(&baghdad());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "ROOT → موظفو (N) [TOPIC]");
        assert!(lines.contains(&"    يبدأ → ون (S) [AGENT]"));
        assert_eq!(lines[6], "        إلى → بغداد (Z) [GEN]");
    }

    #[test]
    fn svg_is_deterministic_and_mirrors() {
        let s = baghdad();
        let a = render_svg(&s, SvgOptions::default());
        assert_eq!(a, render_svg(&s, SvgOptions::default()));
        assert!(a.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(a.contains("sans-serif"));
        assert_eq!(a.matches("class=\"arc").count(), 7);
        assert_eq!(a.matches(">AGENT<").count(), 1);
        let r = render_svg(&s, SvgOptions { rtl: true });
        assert_ne!(a, r);
        assert_eq!(r.matches("class=\"form\"").count(), 7);
    }

    #[test]
    fn escapes_markup() {
        let s = Sentence::new(vec![Token::new(1, "<&>").with_head(0, "PUNCT")]).unwrap();
        let svg = render_svg(&s, SvgOptions::default());
        assert!(svg.contains("&lt;&amp;&gt;"));
        assert_eq!("svg".parse::<RenderFormat>(), Ok(RenderFormat::Svg));
        assert!("png".parse::<RenderFormat>().is_err());
    }
}

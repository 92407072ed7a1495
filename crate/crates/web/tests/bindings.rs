use i3rab_web::{convert_padt, render_conll_svg, render_conll_text, sample_padt, t_test};

const GOLD: &str = include_str!("../../core/data/sample_i3rab.conll");

#[test]
fn draws_selected_sentence() {
    let svg = render_conll_svg(GOLD, 1, false).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(">AGENT<"));
    assert_ne!(svg, render_conll_svg(GOLD, 1, true).unwrap());
    let text = render_conll_text(GOLD, 1).unwrap();
    assert_eq!(text.lines().next(), Some("ROOT → موظفو (N) [TOPIC]"));
    assert!(render_conll_svg(GOLD, 0, false).is_err());
    assert!(render_conll_svg(GOLD, 17, false).is_err());
    assert!(render_conll_svg("1\tbroken\n", 1, false).is_err());
}

#[test]
fn converts_bundled_sample() {
    let c = convert_padt(&sample_padt(), 1, false).unwrap();
    assert_eq!(c.output(), GOLD);
    assert!(c.report().contains("joined_pronoun\t2"));
    assert!(c.before_svg().contains(">Sb<") || c.before_svg().contains(">Pred<"));
    assert!(c.after_svg().contains(">AGENT<"));
}

#[test]
fn t_test_summary() {
    let out = t_test(
        "77.4 78.5 75.4 75.7 81.8 78.2 79.2 76.4 75.2 80.6",
        "90.4, 84.4, 82.4, 83.3, 84.3, 77.9, 83.4, 81.7, 82.5, 86.4",
    )
    .unwrap();
    assert!(out.contains("improvement 7.49%"), "{out}");
    assert!(out.contains("t = 5.2811 (df 9)"), "{out}");
    assert!(t_test("1 2", "1 2").is_err());
    assert!(t_test("1 x", "1 2").is_err());
}

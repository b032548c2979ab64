use adams_core::chartio::*;
use adams_core::fpmod::ground_field;
use adams_core::resolve::Resolution;
use adams_core::steenrod::Profile;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn golden(name: &str) -> ChartDoc {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/golden").join(name);
    read_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn ext_chart(p: u32, algebra: &str, s_max: usize, t_max: i32) -> ChartDoc {
    let m = ground_field(&Profile::named(p, algebra).unwrap()).unwrap();
    ChartDoc::from_resolution(&Resolution::new(m, s_max, t_max), &[Product::H0, Product::H1], "E2")
}

#[test]
fn a1_chart_products() {
    let doc = ext_chart(2, "A(1)", 8, 20);
    doc.validate().unwrap();
    assert!(doc.dots.contains(&Dot { stem: 4, s: 3, index: 0 }));
    let id = |stem, s| doc.dots.iter().position(|d| *d == Dot { stem, s, index: 0 }).unwrap();
    let has = |a, b, kind| doc.edges.iter().any(|e| e.from == a && e.to == b && e.kind == kind);
    assert!(has(id(0, 0), id(0, 1), EdgeKind::H0));
    assert!(has(id(0, 0), id(1, 1), EdgeKind::H1));
    assert!(has(id(1, 1), id(2, 2), EdgeKind::H1));
    assert!(has(id(4, 3), id(4, 4), EdgeKind::H0));
    assert!(!doc.edges.iter().any(|e| e.from == id(2, 2) && e.kind == EdgeKind::H1));
    let back = read_json(&emit_json(&doc)).unwrap();
    assert_eq!(back, doc);
}

#[test]
fn odd_staircase_of_e1() {
    let doc = ext_chart(3, "E(1)", 6, 30);
    let text = emit_text(&doc, 200).unwrap();
    // F3[v0, v1]: v1 has stem q = 4, so row s has s + 1 dots.
    let cells = doc.cell_counts();
    for s in 0..=6usize {
        for i in 0..=s {
            assert_eq!(cells.get(&(4 * i as i32, s)), Some(&1), "stem {} s {s}", 4 * i);
        }
        assert_eq!(doc.dots.iter().filter(|d| d.s == s && d.stem <= 24).count(), s + 1);
    }
    let row = format!("  1|  1{}  1", " ".repeat(9));
    assert!(text.lines().any(|l| l == row), "{text}");
}

#[test]
fn e_infinity_of_j_stem_seven() {
    let doc = golden("j2-Einf.json");
    assert_eq!(doc.column_counts()[&7], 4);
    let json = emit_json(&doc);
    assert_eq!(read_json(&json).unwrap(), doc);
}

#[test]
fn e_infinity_window_counts() {
    let doc = golden("j2-Einf.json").restrict(Some(36), Some(24));
    let mut want = BTreeMap::new();
    for n in 0..=36 {
        let total: usize = (0..=24).map(|s| adams_core::jay::closed_form(2, adams_core::jay::Variant::J2, adams_core::jay::ClosedPage::Infinity, s, n + s as i32).unwrap()).sum();
        if total > 0 {
            want.insert(n, total);
        }
    }
    assert_eq!(doc.column_counts(), want);
    let svg = emit_svg(&doc, &SvgStyle::default());
    for (n, c) in want {
        assert_eq!(svg.matches(&format!(r#"data-stem="{n}" "#)).count(), c, "stem {n}");
    }
}

#[test]
fn jmod2_bottom_row_and_period() {
    let doc = golden("jmod2-E3.json");
    let text = emit_text(&doc.restrict(Some(12), None), 200).unwrap();
    let row0 = text.lines().find(|l| l.starts_with("  0|")).unwrap();
    assert_eq!(row0, "  0|  1");
    let cells = doc.cell_counts();
    for (&(stem, s), &n) in &cells {
        if stem + 8 <= 24 && s + 4 <= 24 {
            assert_eq!(cells.get(&(stem + 8, s + 4)), Some(&n), "({stem},{s})");
        }
    }
}

#[test]
fn differentials_have_the_right_offsets() {
    let doc = golden("j2-E2.json");
    let d2: Vec<_> = doc.edges.iter().filter(|e| e.kind == EdgeKind::Differential).collect();
    assert!(!d2.is_empty());
    for e in d2 {
        assert_eq!(e.page, Some(2));
        let (a, b) = (doc.dots[e.from], doc.dots[e.to]);
        assert_eq!((b.stem - a.stem, b.s as i64 - a.s as i64), (-1, 2));
    }
    let svg = emit_svg(&doc, &SvgStyle::default());
    assert!(svg.contains(r#"class="differential" data-page="2""#));
}

#[test]
fn config_restricts_window() {
    let c = ChartConfig::from_toml("stem_max = 10\ns_max = 3\n").unwrap();
    let doc = c.apply(&ext_chart(2, "A(1)", 8, 20));
    assert!(doc.dots.iter().all(|d| d.stem <= 10 && d.s <= 3));
    doc.validate().unwrap();
}

fn arb_chart() -> impl Strategy<Value = ChartDoc> {
    (prop::collection::btree_map((0usize..6, 0i32..12), 1usize..3, 0..20), prop::collection::vec((0usize..40, 0usize..40, 0u8..4), 0..20))
        .prop_map(|(cells, raw)| {
            let dims = cells.into_iter().map(|((s, n), d)| ((s, n + s as i32), d)).collect();
            let meta = ChartMeta { prime: 2, algebra: "A(1)".into(), module: "M".into(), page: "E2".into() };
            let mut doc = ChartDoc::from_dims(meta, &dims);
            let n = doc.dots.len();
            for (a, b, k) in raw {
                if n == 0 {
                    break;
                }
                let (a, b) = (a % n, b % n);
                let kind = [EdgeKind::H0, EdgeKind::H1, EdgeKind::OtherProduct, EdgeKind::Differential][k as usize];
                let (da, db) = (doc.dots[a], doc.dots[b]);
                let page = (kind == EdgeKind::Differential).then(|| db.s.wrapping_sub(da.s));
                let e = Edge { from: a, to: b, kind, page };
                let mut trial = doc.clone();
                trial.edges.push(e);
                if trial.validate().is_ok() {
                    doc = trial;
                }
            }
            doc
        })
}

proptest! {
    #[test]
    fn json_round_trip(doc in arb_chart()) {
        let json = emit_json(&doc);
        let back = read_json(&json).unwrap();
        prop_assert_eq!(emit_json(&back), json);
        let mut canon = doc.clone();
        canon.canonicalize();
        prop_assert_eq!(back, canon);
    }

    #[test]
    fn svg_dot_count_matches(doc in arb_chart()) {
        let svg = emit_svg(&doc, &SvgStyle::default());
        prop_assert_eq!(svg.matches("<circle").count(), doc.dots.len());
        prop_assert_eq!(svg.clone(), emit_svg(&doc, &SvgStyle::default()));
    }
}

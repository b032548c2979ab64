use adams_core::chartio::{emit_json, read_json, ChartDoc};
use adams_core::connect::Route;
use adams_core::fpmod::{bockstein_tensor, GradedModule};
use adams_core::jay::*;
use std::path::PathBuf;

fn small(variant: Variant, s_max: usize, n_max: i32) -> Scenario {
    build_scenario_with(variant, Window { s_max, n_max }, false).unwrap()
}

fn ext_dim(r: &adams_core::resolve::Resolution, s: usize, t: i32) -> usize {
    r.gens_in_degree(s, t).len()
}

#[test]
fn change_of_rings_for_the_induced_sub() {
    let sc = small(Variant::J2, 10, 30);
    for s in 0..=10 {
        for n in 0..=30 {
            let t = n + s as i32;
            assert_eq!(ext_dim(&sc.ej.sub, s, t), ext_dim(sc.c(), s, t), "({s},{t})");
        }
    }
}

#[test]
fn odd_kernel_is_shifted_cokernel() {
    let psi = psi_star(Variant::Jp).unwrap();
    let (ez, ey) = psi_sequences(&psi).unwrap();
    let f3 = load_fixture("F3.mod").unwrap();
    assert!(presentation_iso(&f3, &ey.quot).is_some());
    assert!(presentation_iso(&f3.suspend(12), &ez.sub).is_some());
    for t in 0..40 {
        assert_eq!(ez.sub.dim(t + 12), ey.quot.dim(t));
    }
}

fn assert_tensor_fixture(fixture: &str, base: &str) {
    let presented = load_fixture(fixture).unwrap();
    let tensored: GradedModule = bockstein_tensor(&load_fixture(base).unwrap(), "t");
    assert!(presentation_iso(&presented, &tensored).is_some(), "{fixture} vs {base} ⊗ E[Sq1]");
}

#[test]
fn mod_two_fixtures_are_tensor_products() {
    assert_tensor_fixture("ko2.mod", "ko.mod");
    assert_tensor_fixture("ksp4_2.mod", "ksp4.mod");
}

#[test]
fn j2_small_window_facts() {
    let run = run(Variant::J2, Window { s_max: 12, n_max: 16 }, false, Route::Snake).unwrap();
    // w1 supports δ_X, so it never reaches E2; d2 is first forced on w1^2.
    assert_eq!(run.d2.delta_x.rank(4, 12), 1);
    assert_eq!(run.e2().dim(4, 12), 0);
    assert_eq!(run.d2.forced.get(&(8, 24)), Some(&1));
    assert_eq!(run.e2().out_rank(8, 24), 1);
    // Stem 7 of E_inf is h0^i h3 for i ≤ 3.
    let stem7: Vec<_> = (0..=12).filter(|&s| run.einf().dim(s, 7 + s as i32) > 0).collect();
    assert_eq!(stem7, vec![1, 2, 3, 4]);
    assert_eq!(run.einf().stem_total(15), 5);
    assert!(run.abutment.passed(), "{:?}", run.abutment.failures());
}

#[test]
fn d2_never_below_the_composite_rank() {
    let sc = small(Variant::J2, 12, 20);
    let d2 = d2_page(&sc, Route::Snake).unwrap();
    for (&(s, t), &r) in &d2.rho {
        assert!(d2.e2.out_rank(s, t) >= r);
    }
}

#[test]
fn split_extension_breaks_stem_seven() {
    let w = Window { s_max: 12, n_max: 10 };
    let run = run(Variant::J2, w, true, Route::Snake).unwrap();
    assert!(run.abutment.failures().contains(&7));
    assert_eq!(run.abutment.rows[7].expected, Some(4));
    assert_ne!(run.abutment.rows[7].total, 4);
}

#[test]
fn odd_lemma_tables() {
    let sc = small(Variant::Jp, 12, 30);
    let tables = lemma_tables(&sc, Route::Snake).unwrap();
    let bad = lemma_mismatches(&sc, &tables);
    assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(5)]);
}

#[test]
fn jp_delta_x_vanishes_on_generators() {
    let sc = small(Variant::Jp, 12, 30);
    let dx = sc.ej.delta(Route::Snake).unwrap();
    let d = OddDegrees::new(3);
    // δ_X is a derivation vanishing on v0, a_1, a_2 and b, and nonzero on w1.
    for (s, t) in [d.v0(), d.a(1), d.a(2), d.b()] {
        assert_eq!(dx.rank(s as usize, t as i32), 0, "({s},{t})");
    }
    let (s, t) = d.w1();
    assert_eq!(dx.rank(s as usize, t as i32), 1);
}

#[test]
fn jpmodp_single_d2() {
    let run = run(Variant::Jpmodp, Window { s_max: 12, n_max: 30 }, false, Route::Snake).unwrap();
    for s in 0..=12 {
        for n in 0..=30 {
            let t = n + s as i32;
            assert_eq!(run.e2().dim(s, t), closed_form(3, Variant::Jpmodp, ClosedPage::E2, s, t).unwrap());
            assert_eq!(run.e3().dim(s, t), closed_form(3, Variant::Jpmodp, ClosedPage::E3, s, t).unwrap());
        }
    }
    assert_eq!(run.e3().dims, run.einf().dims);
}

#[test]
fn routes_agree_in_rank_at_p3() {
    let sc = small(Variant::Jp, 10, 24);
    for (a, b) in [
        (sc.ey.delta(Route::Snake).unwrap(), sc.ey.delta(Route::Yoneda).unwrap()),
        (sc.ej.delta(Route::Snake).unwrap(), sc.ej.delta(Route::Yoneda).unwrap()),
    ] {
        assert_eq!(a.ranks(), b.ranks());
    }
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/golden").join(name)
}

fn golden_window(v: Variant) -> Window {
    if v == Variant::Jmod2 {
        Window { s_max: 24, n_max: 24 }
    } else {
        Window::default_for(v)
    }
}

/// Set ADAMS_BLESS=1 to rewrite the golden charts.
#[test]
fn golden_charts() {
    let bless = std::env::var_os("ADAMS_BLESS").is_some();
    for v in Variant::ALL {
        let run = run(v, golden_window(v), false, Route::Snake).unwrap();
        for chart in run.charts() {
            let name = format!("{}-{}.json", v.name(), chart.metadata.page);
            let json = emit_json(&chart);
            let path = golden_path(&name);
            if bless {
                std::fs::create_dir_all(path.parent().unwrap()).unwrap();
                std::fs::write(&path, &json).unwrap();
                continue;
            }
            let golden = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {name}"));
            assert!(golden == json, "{name} differs from the golden file");
            let back: ChartDoc = read_json(&golden).unwrap();
            assert_eq!(back, chart);
        }
    }
}

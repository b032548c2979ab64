//! Spectral sequence pages as dimension tables with differential ranks.

use super::{homotopy_order, lemma_form, JayError, LemmaTable, Scenario, Variant, Window};
use crate::connect::{compose_connecting, ExtMap, Route};
use crate::fplin::FpVector;
use std::collections::BTreeMap;

type Table = BTreeMap<(usize, i32), usize>;

/// E_r with the ranks of d_r: E_r^{s,t} → E_r^{s+r,t+r−1} leaving each bidegree.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Page {
    pub r: usize,
    pub window: Window,
    /// Nonzero dimensions for s ≤ s_max and 0 ≤ t − s ≤ n_max + 1.
    pub dims: Table,
    pub out: Table,
}

impl Page {
    pub fn dim(&self, s: usize, t: i32) -> usize {
        self.dims.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn out_rank(&self, s: usize, t: i32) -> usize {
        self.out.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn stem_total(&self, n: i32) -> usize {
        (0..=self.window.s_max).map(|s| self.dim(s, n + s as i32)).sum()
    }

    /// The dimension table restricted to stems ≤ n_max.
    pub fn window_dims(&self) -> Table {
        self.dims.iter().filter(|(&(s, t), _)| t - (s as i32) <= self.window.n_max).map(|(&k, &v)| (k, v)).collect()
    }

    /// E_{r+1}: each bidegree loses the ranks of d_r in and out.
    pub fn next(&self) -> Result<Page, JayError> {
        let r = self.r;
        let mut dims = self.dims.clone();
        let mut take = |s: usize, t: i32, n: usize| -> Result<(), JayError> {
            let d = dims.entry((s, t)).or_insert(0);
            *d = d.checked_sub(n).ok_or(JayError::Pattern { r, s, t })?;
            Ok(())
        };
        for (&(s, t), &n) in &self.out {
            take(s, t, n)?;
            if s + r <= self.window.s_max {
                take(s + r, t + r as i32 - 1, n)?;
            }
        }
        dims.retain(|_, d| *d > 0);
        Ok(Page { r: r + 1, window: self.window, dims, out: Table::new() })
    }
}

/// Everything d₂ is assembled from.
#[derive(Clone, Debug)]
pub struct D2Data {
    pub e2: Page,
    pub coim_q: Table,
    pub im_i: Table,
    /// δ_X: Ext^{s,t}(C') → Ext^{s+1,t}(Σ^{-1}K').
    pub delta_x: ExtMap,
    /// δ_Y δ_Z: Ext^{s,t}(K) → Ext^{s+2,t}(C).
    pub delta_yz: ExtMap,
    /// rank of δ_Y δ_Z moved to the q*-image in E₂^{s,t}.
    pub rho: Table,
    /// Differentials on powers of w₁ forced by the abutment.
    pub forced: Table,
}

fn ord(p: i64, mut k: i64) -> u32 {
    let mut n = 0;
    while k % p == 0 {
        k /= p;
        n += 1;
    }
    n
}

/// Sources of the forced d₂ on h₀^i w₁^k: k ≡ 2 mod 4 at p = 2, and on
/// v₀^i w₁^{pk} with p ∤ k at odd p.
fn forced_d2(variant: Variant, window: Window) -> Table {
    let mut out = Table::new();
    let (w, ok): ((i64, i64), Box<dyn Fn(i64) -> bool>) = match variant {
        Variant::J2 => ((4, 12), Box::new(|k| k % 4 == 2)),
        Variant::Jp => {
            let d = super::OddDegrees::new(3);
            (d.w1(), Box::new(move |k| k % d.p == 0 && (k / d.p) % d.p != 0))
        }
        _ => return out,
    };
    for k in 1.. {
        let (s, t) = (w.0 * k, w.1 * k);
        if s > window.s_max as i64 {
            break;
        }
        if ok(k) && t - s <= window.n_max as i64 + 1 {
            for i in 0..=(window.s_max as i64 - s) {
                out.insert(((s + i) as usize, (t + i) as i32), 1);
            }
        }
    }
    out
}

/// Sources of d_r (r ≥ 3) on the towers h₀^i w₁^k (v₀^i w₁^k at odd p), ord(k) = r − 1.
fn tower_sources(variant: Variant, r: usize, window: Window) -> Vec<(usize, i32)> {
    let (p, w) = match variant {
        Variant::J2 => (2i64, (4i64, 12i64)),
        Variant::Jp => (3, super::OddDegrees::new(3).w1()),
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    for k in 1.. {
        let (s0, t0) = (w.0 * k, w.1 * k);
        if s0 > window.s_max as i64 {
            break;
        }
        if ord(p, k) as usize + 1 != r || t0 - s0 > window.n_max as i64 + 1 {
            continue;
        }
        for i in 0..=(window.s_max as i64 - s0) {
            out.push(((s0 + i) as usize, (t0 + i) as i32));
        }
    }
    out
}

fn rank(m: &ExtMap, s: usize, t: i32) -> usize {
    m.rank(s, t)
}

/// E₂ with d₂ ranks, checked against the long exact sequence of E_j.
pub fn d2_page(sc: &Scenario, route: Route) -> Result<D2Data, JayError> {
    let w = sc.window;
    let delta_x = sc.ej.delta(route)?;
    let delta_yz = compose_connecting(&sc.ez, &sc.ey, route)?;
    let (sub, mid, quot) = (&sc.ej.sub, &sc.ej.mid, &sc.ej.quot);
    let dim = |r: &crate::resolve::Resolution, s: usize, t: i32| r.gens_in_degree(s, t).len();
    let shift = sc.k_shift();
    let forced = forced_d2(sc.variant, w);
    let (mut dims, mut coim_q, mut im_i, mut rho, mut out) = (Table::new(), Table::new(), Table::new(), Table::new(), Table::new());
    for s in 0..=w.s_max {
        for n in 0..=w.n_max + 1 {
            let t = n + s as i32;
            let direct = dim(mid, s, t);
            let into = if s == 0 { 0 } else { rank(&delta_x, s - 1, t) };
            let c = dim(quot, s, t) - into;
            let i = dim(sub, s, t) - rank(&delta_x, s, t);
            if direct != c + i {
                return Err(JayError::Les { s, t, direct, assembled: c + i });
            }
            let r = rank(&delta_yz, s, t + shift);
            let f = forced.get(&(s, t)).copied().unwrap_or(0);
            if r > c {
                return Err(JayError::Transport { s, t, detail: format!("rank {r} exceeds the q*-image {c}") });
            }
            let ker_yz = dim(&sc.ez.sub, s, t + shift) - r;
            if into > ker_yz {
                return Err(JayError::Transport { s, t, detail: format!("image of δ_X ({into}) exceeds ker δ_Yδ_Z ({ker_yz})") });
            }
            for (tab, v) in [(&mut dims, direct), (&mut coim_q, c), (&mut im_i, i), (&mut rho, r), (&mut out, r + f)] {
                if v > 0 {
                    tab.insert((s, t), v);
                }
            }
        }
    }
    for (&(s, t), &n) in &out {
        if s + 2 <= w.s_max && n > dims.get(&(s + 2, t + 1)).copied().unwrap_or(0) {
            return Err(JayError::Transport { s, t, detail: format!("d2 rank {n} exceeds the target dimension") });
        }
    }
    let e2 = Page { r: 2, window: w, dims, out };
    Ok(D2Data { e2, coim_q, im_i, delta_x, delta_yz, rho, forced })
}

/// E₃, E₄, …, ending with E_∞ (the page after the last possible differential).
pub fn later_pages(sc: &Scenario, e3: Page) -> Result<Vec<Page>, JayError> {
    let w = sc.window;
    let mut pages = vec![e3];
    for r in 3..=w.s_max + 1 {
        let mut page = pages.pop().unwrap();
        for src in tower_sources(sc.variant, r, w) {
            *page.out.entry(src).or_insert(0) += 1;
        }
        let next = page.next()?;
        pages.push(page);
        pages.push(next);
    }
    Ok(pages)
}

/// Height of the h₀-tower (v₀ at odd p) on the unique class of E₂^{s,t}.
pub fn h0_tower_height(sc: &Scenario, s: usize, t: i32) -> usize {
    let res = &sc.ej.mid;
    let n = res.gens_in_degree(s, t).len();
    if n == 0 {
        return 0;
    }
    let mut v = FpVector::basis(sc.prime(), n, 0);
    let (mut s, mut t, mut height) = (s, t, 0);
    while !v.is_zero() {
        height += 1;
        if s >= res.s_max() {
            break;
        }
        v = res.primitive_product_matrix((1, 0), s, t).apply_row(&v);
        s += 1;
        t += 1;
    }
    height
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AbutmentRow {
    pub n: i32,
    pub total: usize,
    /// ord_p |π_n|, or `None` for an infinite cyclic group.
    pub expected: Option<u32>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AbutmentReport {
    pub rows: Vec<AbutmentRow>,
}

impl AbutmentReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<i32> {
        self.rows.iter().filter(|r| !r.pass).map(|r| r.n).collect()
    }
}

/// Compares E_∞ stem totals with the homotopy orders. An infinite cyclic
/// group must appear as a tower of one class in every filtration.
pub fn abutment_check(variant: Variant, einf: &Page, n_max: i32) -> AbutmentReport {
    let rows = (0..=n_max)
        .map(|n| {
            let total = einf.stem_total(n);
            let expected = homotopy_order(variant.prime(), variant, n as u32);
            let pass = match expected {
                Some(e) => total == e as usize,
                None => (0..=einf.window.s_max).all(|s| einf.dim(s, n + s as i32) == 1),
            };
            AbutmentRow { n, total, expected, pass }
        })
        .collect();
    AbutmentReport { rows }
}

/// The computed kernel, cokernel and image tables of the connecting maps,
/// over s ≤ s_max and stems in [bottom, n_max].
pub fn lemma_tables(sc: &Scenario, route: Route) -> Result<BTreeMap<LemmaTable, Table>, JayError> {
    let w = sc.window;
    let dy = sc.ey.delta(route)?;
    let dz = sc.ez.delta(route)?;
    let dyz = compose_connecting(&sc.ez, &sc.ey, route)?;
    let dx = sc.ej.delta(route)?;
    let dim = |r: &crate::resolve::Resolution, s: usize, t: i32| r.gens_in_degree(s, t).len();
    let before = |m: &ExtMap, s: usize, t: i32| if s == 0 { 0 } else { m.rank(s - 1, t) };
    let mut out: BTreeMap<LemmaTable, Table> = LemmaTable::ALL.iter().map(|&l| (l, Table::new())).collect();
    let (c, i, k) = (sc.c(), sc.i(), sc.k());
    for s in 0..=w.s_max {
        for n in 0..=w.n_max {
            let t = n + s as i32;
            let vals = [
                (LemmaTable::KerY, dim(i, s, t) - dy.rank(s, t)),
                (LemmaTable::CokY, dim(c, s, t) - before(&dy, s, t)),
                (LemmaTable::KerZ, dim(k, s, t) - dz.rank(s, t)),
                (LemmaTable::CokZ, dim(i, s, t) - before(&dz, s, t)),
                (LemmaTable::KerYZ, dim(k, s, t) - dyz.rank(s, t)),
                (LemmaTable::CokYZ, dim(c, s, t) - if s < 2 { 0 } else { dyz.rank(s - 2, t) }),
                (LemmaTable::ImX, before(&dx, s, t)),
            ];
            for (l, v) in vals {
                if v > 0 {
                    out.get_mut(&l).unwrap().insert((s, t), v);
                }
            }
        }
    }
    Ok(out)
}

/// Bidegrees where a computed lemma table differs from its stated form.
pub fn lemma_mismatches(sc: &Scenario, tables: &BTreeMap<LemmaTable, Table>) -> Vec<(LemmaTable, usize, i32, usize, usize)> {
    let w = sc.window;
    let mut bad = Vec::new();
    for (&l, tab) in tables {
        for s in 0..=w.s_max {
            for n in 0..=w.n_max {
                let t = n + s as i32;
                let got = tab.get(&(s, t)).copied().unwrap_or(0);
                let want = lemma_form(sc.prime(), l, s, t);
                if got != want {
                    bad.push((l, s, t, got, want));
                }
            }
        }
    }
    bad
}

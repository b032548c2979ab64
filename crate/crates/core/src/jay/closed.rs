//! Closed-form charts: dimensions of the stated E₃ and E_∞ terms by monomial
//! counting, and the orders of the homotopy groups they abut to.

use super::Variant;

/// Monomials `base · Π g_k^{e_k}`, e_k ≥ 0, in a bigraded polynomial module.
#[derive(Clone, Debug)]
pub struct Family {
    pub base: (i64, i64),
    pub gens: Vec<(i64, i64)>,
}

impl Family {
    fn new(base: (i64, i64), gens: &[(i64, i64)]) -> Family {
        Family { base, gens: gens.to_vec() }
    }

    /// Number of exponent vectors landing on (s, t). Every generator has
    /// positive s, so the count is finite.
    pub fn count(&self, s: i64, t: i64) -> usize {
        fn go(gens: &[(i64, i64)], s: i64, t: i64) -> usize {
            if s < 0 {
                return 0;
            }
            match gens.split_first() {
                None => usize::from(s == 0 && t == 0),
                Some((&(gs, gt), rest)) => (0..=s / gs).map(|e| go(rest, s - e * gs, t - e * gt)).sum(),
            }
        }
        go(&self.gens, s - self.base.0, t - self.base.1)
    }
}

/// Which page a closed form describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedPage {
    E2,
    E3,
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClosedFormError {
    #[error("no closed form for {variant:?} on page {page:?}")]
    Unsupported { variant: Variant, page: ClosedPage },
}

const H0: (i64, i64) = (1, 1);
const W1: (i64, i64) = (4, 12);
const H3: (i64, i64) = (1, 8);

fn add(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 + b.0, a.1 + b.1)
}

fn mul(k: i64, a: (i64, i64)) -> (i64, i64) {
    (k * a.0, k * a.1)
}

/// The seven F₂[w₁]-free generators h₁, h₁², h₂, h₀h₂, h₀²h₂, c₀, h₁c₀.
fn j2_w1_free() -> Vec<Family> {
    [(1, 2), (2, 4), (1, 4), (2, 5), (3, 6), (3, 11), (4, 13)].into_iter().map(|b| Family::new(b, &[W1])).collect()
}

/// Tower families over the w₁^{2^r}-periodic part of E_∞(j) at p = 2.
const MAX_R: u32 = 8;

fn j2_families(page: ClosedPage) -> Vec<Family> {
    let mut out = j2_w1_free();
    match page {
        ClosedPage::E3 => {
            for i in 0..=3 {
                out.push(Family::new(add(mul(i, H0), H3), &[mul(2, W1)]));
            }
            out.push(Family::new((0, 0), &[H0, mul(4, W1)]));
            out.push(Family::new(add(H3, mul(3, W1)), &[H0, mul(4, W1)]));
            for i in 0..=4 {
                out.push(Family::new(add(add(mul(i, H0), H3), W1), &[mul(4, W1)]));
            }
        }
        ClosedPage::Infinity => {
            out.push(Family::new((0, 0), &[H0]));
            for r in 1..=MAX_R {
                let period = mul(1 << r, W1);
                let base = add(H3, mul((1 << (r - 1)) - 1, W1));
                for i in 0..=(r as i64 + 2) {
                    out.push(Family::new(add(base, mul(i, H0)), &[period]));
                }
            }
        }
        ClosedPage::E2 => unreachable!(),
    }
    out
}

/// The twelve generators of E₃(j/2): the lightning flash and its shift.
pub const JMOD2_GENERATORS: [(&str, (i64, i64)); 12] = [
    ("i(1)", (0, 0)),
    ("i(h1)", (1, 2)),
    ("i(h1^2)", (2, 4)),
    ("~h1", (1, 3)),
    ("h1 ~h1", (2, 5)),
    ("h1^2 ~h1", (3, 7)),
    ("i(h2)", (1, 4)),
    ("~h2^2", (2, 9)),
    ("h1 ~h2^2", (3, 11)),
    ("h1^2 ~h2^2", (4, 13)),
    ("~c0", (3, 12)),
    ("h1 ~c0", (4, 14)),
];

/// Odd-primary generator bidegrees: v₀, a_i (0 < i ≤ p), w₁, v₁, b.
pub struct OddDegrees {
    pub p: i64,
    pub q: i64,
}

impl OddDegrees {
    pub fn new(p: u32) -> OddDegrees {
        OddDegrees { p: p as i64, q: 2 * p as i64 - 2 }
    }
    pub fn v0(&self) -> (i64, i64) {
        (1, 1)
    }
    pub fn v1(&self) -> (i64, i64) {
        (1, self.q + 1)
    }
    /// a_i for 0 < i < p; a_p is the class detected by v₀^{p−1} on the lifted b.
    pub fn a(&self, i: i64) -> (i64, i64) {
        if i == self.p {
            (self.p - 1, self.p * (self.q + 1) - 2)
        } else {
            (i, i * (self.q + 1) - 1)
        }
    }
    pub fn b(&self) -> (i64, i64) {
        (2, self.p * self.q)
    }
    pub fn w1(&self) -> (i64, i64) {
        (self.p, self.p * (self.q + 1))
    }
}

fn jp_families(prime: u32, page: ClosedPage) -> Vec<Family> {
    let d = OddDegrees::new(prime);
    let p = d.p;
    let (v0, w1, ap) = (d.v0(), d.w1(), d.a(p));
    let mut out: Vec<Family> = (1..p).map(|i| Family::new(d.a(i), &[w1])).collect();
    match page {
        ClosedPage::E3 => {
            for k in 1..p {
                for i in 0..=1 {
                    out.push(Family::new(add(add(mul(i, v0), ap), mul(k - 1, w1)), &[mul(p, w1)]));
                }
                for i in 0..=2 {
                    out.push(Family::new(add(add(mul(i, v0), ap), mul(p * k - 1, w1)), &[mul(p * p, w1)]));
                }
            }
            out.push(Family::new((0, 0), &[v0, mul(p * p, w1)]));
            out.push(Family::new(add(ap, mul(p * p - 1, w1)), &[v0, mul(p * p, w1)]));
        }
        ClosedPage::Infinity => {
            out.push(Family::new((0, 0), &[v0]));
            for r in 1..=4u32 {
                let period = mul(p.pow(r), w1);
                for k in 1..p {
                    let base = add(ap, mul(p.pow(r - 1) * k - 1, w1));
                    for i in 0..=r as i64 {
                        out.push(Family::new(add(base, mul(i, v0)), &[period]));
                    }
                }
            }
        }
        ClosedPage::E2 => unreachable!(),
    }
    out
}

/// The monomial families of a closed-form page.
pub fn families(prime: u32, variant: Variant, page: ClosedPage) -> Result<Vec<Family>, ClosedFormError> {
    let unsupported = Err(ClosedFormError::Unsupported { variant, page });
    Ok(match (variant, page) {
        (Variant::J2, ClosedPage::E2) | (Variant::Jmod2, ClosedPage::E2) | (Variant::Jp, ClosedPage::E2) => {
            return unsupported
        }
        (Variant::J2, _) => j2_families(page),
        (Variant::Jmod2, _) => JMOD2_GENERATORS.iter().map(|&(_, b)| Family::new(b, &[W1])).collect(),
        (Variant::Jp, _) => jp_families(prime, page),
        (Variant::Jpmodp, page) => {
            let d = OddDegrees::new(prime);
            let x = (0, d.p * d.q - 1);
            let mut bases = vec![(0, 0), d.a(1)];
            let mut gens = vec![d.v1()];
            if page == ClosedPage::E2 {
                bases.extend([x, add(x, d.a(1))]);
                gens.push(d.b());
            }
            bases.into_iter().map(|b| Family::new(b, &gens)).collect()
        }
    })
}

/// Dimension of the closed-form page at (s, t).
pub fn closed_form(prime: u32, variant: Variant, page: ClosedPage, s: usize, t: i32) -> Result<usize, ClosedFormError> {
    Ok(families(prime, variant, page)?.iter().map(|f| f.count(s as i64, t as i64)).sum())
}

/// Ext_{A(1)}(F₂, F₂) = F₂[h₀, h₁, v, w₁]/(h₀h₁, h₁³, h₁v, v² + h₀²w₁): the
/// monomial basis is F₂[w₁] ⊗ {h₀^i, h₁, h₁², v h₀^i}.
pub fn ext_a1_families() -> Vec<Family> {
    vec![
        Family::new((0, 0), &[H0, W1]),
        Family::new((1, 2), &[W1]),
        Family::new((2, 4), &[W1]),
        Family::new((3, 7), &[H0, W1]),
    ]
}

/// Ext_{A(1)}(F_p, F_p) at odd p. Since v₀^{p−2}b = ±a_i a_{p−i} and v₀a_i = 0,
/// b is killed by v₀^{p−1}; the basis is F_p[w₁] ⊗ (F_p[v₀] ⊕
/// F_p[b]{v₀^m b | m ≤ p−2} ⊕ F_p[b]{a_1, …, a_{p−1}}).
pub fn odd_ext_a1_families(p: u32) -> Vec<Family> {
    let d = OddDegrees::new(p);
    let mut out = vec![Family::new((0, 0), &[d.v0(), d.w1()])];
    out.extend((0..d.p - 1).map(|m| Family::new(add(d.b(), mul(m, d.v0())), &[d.b(), d.w1()])));
    out.extend((1..d.p).map(|i| Family::new(d.a(i), &[d.b(), d.w1()])));
    out
}

/// Kernels and cokernels of the connecting maps, and the image of δ_X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum LemmaTable {
    /// ker δ_Y ⊂ Ext(I)
    KerY,
    /// cok δ_Y, a quotient of Ext(C)
    CokY,
    /// ker δ_Z ⊂ Ext(K)
    KerZ,
    /// cok δ_Z, a quotient of Ext(I)
    CokZ,
    /// ker δ_Y δ_Z ⊂ Ext(K)
    KerYZ,
    /// cok δ_Y δ_Z, a quotient of Ext(C)
    CokYZ,
    /// im δ_X ⊂ Ext(Σ^{-1}K')
    ImX,
}

impl LemmaTable {
    pub const ALL: [LemmaTable; 7] = [
        LemmaTable::KerY,
        LemmaTable::CokY,
        LemmaTable::KerZ,
        LemmaTable::CokZ,
        LemmaTable::KerYZ,
        LemmaTable::CokYZ,
        LemmaTable::ImX,
    ];
}

/// The stated module forms of the tables, for the integral variants.
pub fn lemma_families(prime: u32, table: LemmaTable) -> Vec<Family> {
    use LemmaTable::*;
    if prime == 2 {
        let h1_free = |bases: &[(i64, i64)]| bases.iter().map(|&b| Family::new(b, &[W1])).collect::<Vec<_>>();
        let mut out = Vec::new();
        match table {
            KerY => out.push(Family::new((3, 7), &[H0, W1])),
            CokY => {
                out.push(Family::new((0, 0), &[H0, W1]));
                out.extend(h1_free(&[(1, 2), (2, 4)]));
            }
            KerZ | KerYZ => out.push(Family::new((1, 9), &[H0, W1])),
            CokZ => {
                out.push(Family::new((0, 4), &[H0, W1]));
                out.extend(h1_free(&[(2, 11), (3, 13)]));
            }
            CokYZ => {
                out.push(Family::new((0, 0), &[H0, W1]));
                out.extend(h1_free(&[(1, 2), (2, 4), (1, 4), (2, 5), (3, 6), (3, 11), (4, 13)]));
            }
            ImX => out.push(Family::new((5, 12), &[H0, mul(2, W1)])),
        }
        return out;
    }
    let d = OddDegrees::new(prime);
    let (p, q) = (d.p, d.q);
    let (v0, w1) = (d.v0(), d.w1());
    let v1 = d.v1();
    match table {
        KerY => (1..p).map(|i| Family::new(mul(i, v1), &[v0, w1])).collect(),
        CokY => vec![Family::new((0, 0), &[v0, w1])],
        KerZ | KerYZ => vec![Family::new(add(mul(p - 1, v1), (0, q)), &[v0, w1])],
        CokZ => (0..p - 1).map(|i| Family::new(add(mul(i, v1), (0, q)), &[v0, w1])).collect(),
        CokYZ => {
            let mut out = vec![Family::new((0, 0), &[v0, w1])];
            out.extend((1..p).map(|i| Family::new(d.a(i), &[w1])));
            out
        }
        // Σ^{-1} v₀^{p+1} w₁^{k−1} on the lift of b, p ∤ k.
        ImX => (1..p)
            .map(|k| Family::new(add(add((0, p * q - 1), mul(p + 1, v0)), mul(k - 1, w1)), &[v0, mul(p, w1)]))
            .collect(),
    }
}

/// Dimension of a stated lemma table at (s, t).
pub fn lemma_form(prime: u32, table: LemmaTable, s: usize, t: i32) -> usize {
    lemma_families(prime, table).iter().map(|f| f.count(s as i64, t as i64)).sum()
}

fn ord(p: u32, mut k: u32) -> u32 {
    let mut n = 0;
    while k.is_multiple_of(p) {
        k /= p;
        n += 1;
    }
    n
}

/// Composition length of π_n(j) at the prime, `None` for the integers in
/// degree 0.
fn integral_order(p: u32, n: u32) -> Option<u32> {
    if n == 0 {
        return None;
    }
    Some(if p == 2 {
        match n % 8 {
            7 => 4 + ord(2, (n + 1) / 8),
            _ if n == 1 => 1,
            0 | 2 => 1,
            1 => 2,
            3 => 3,
            _ => 0,
        }
    } else {
        let q = 2 * p - 2;
        if (n + 1).is_multiple_of(q) {
            1 + ord(p, (n + 1) / q)
        } else {
            0
        }
    })
}

/// Number of cyclic summands of π_n(j), counting the integers.
fn summands(p: u32, n: u32) -> u32 {
    match integral_order(p, n) {
        None => 1,
        Some(0) => 0,
        Some(_) if p == 2 && n % 8 == 1 && n > 1 => 2,
        Some(_) => 1,
    }
}

/// ord_p |π_n| for the variant; `None` when π_n is not finite. The mod p
/// orders come from the universal coefficient sequence
/// 0 → π_n ⊗ Z/p → π_n(j/p) → Tor(π_{n−1}, Z/p) → 0.
pub fn homotopy_order(p: u32, variant: Variant, n: u32) -> Option<u32> {
    match variant {
        Variant::J2 | Variant::Jp => integral_order(p, n),
        Variant::Jmod2 | Variant::Jpmodp => {
            let torsion_below = if n == 0 || n == 1 { 0 } else { summands(p, n - 1) };
            Some(summands(p, n) + torsion_below)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stem_total(p: u32, v: Variant, page: ClosedPage, n: i64, s_max: i64) -> usize {
        (0..=s_max).map(|s| closed_form(p, v, page, s as usize, (n + s) as i32).unwrap()).sum()
    }

    #[test]
    fn j2_examples() {
        assert_eq!(closed_form(2, Variant::J2, ClosedPage::E3, 1, 8), Ok(1));
        assert_eq!(closed_form(2, Variant::J2, ClosedPage::Infinity, 3, 3), Ok(1));
        assert_eq!(stem_total(2, Variant::J2, ClosedPage::Infinity, 7, 30), 4);
        assert_eq!(stem_total(2, Variant::J2, ClosedPage::Infinity, 15, 30), 5);
        assert_eq!(homotopy_order(2, Variant::J2, 7), Some(4));
        assert_eq!(homotopy_order(2, Variant::J2, 5), Some(0));
        assert!(closed_form(2, Variant::J2, ClosedPage::E2, 0, 0).is_err());
    }

    #[test]
    fn infinity_pages_sum_to_orders() {
        // Finite stems only carry classes in filtration well below 40.
        for n in 1..=60u32 {
            for (p, v) in [(2, Variant::J2), (2, Variant::Jmod2), (3, Variant::Jp), (3, Variant::Jpmodp)] {
                let total = stem_total(p, v, ClosedPage::Infinity, n as i64, 60);
                assert_eq!(Some(total as u32), homotopy_order(p, v, n), "p={p} {v:?} n={n}");
            }
        }
        assert_eq!(homotopy_order(2, Variant::J2, 0), None);
        assert_eq!(homotopy_order(2, Variant::Jmod2, 0), Some(1));
    }

    #[test]
    fn jmod2_stem_three() {
        assert_eq!(stem_total(2, Variant::Jmod2, ClosedPage::Infinity, 3, 10), 2);
    }

    #[test]
    fn odd_examples() {
        assert_eq!(homotopy_order(3, Variant::Jp, 11), Some(2));
        assert_eq!(stem_total(3, Variant::Jp, ClosedPage::Infinity, 3, 20), 1);
        // E₂(j/p) loses exactly the b-multiples of the lifted class and b itself.
        for s in 0..8usize {
            for t in 0..60i32 {
                let e2 = closed_form(3, Variant::Jpmodp, ClosedPage::E2, s, t).unwrap();
                let e3 = closed_form(3, Variant::Jpmodp, ClosedPage::E3, s, t).unwrap();
                assert!(e3 <= e2);
            }
        }
    }

    #[test]
    fn e3_differs_from_infinity_only_above_stem_thirty() {
        for n in 0..31 {
            assert_eq!(
                stem_total(2, Variant::J2, ClosedPage::E3, n, 24),
                stem_total(2, Variant::J2, ClosedPage::Infinity, n, 24),
                "n={n}"
            );
        }
    }
}

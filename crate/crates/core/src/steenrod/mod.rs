//! Finite sub-Hopf-algebras of the mod-p Steenrod algebra in the Milnor basis.
//!
//! A [`Profile`] bounds the ξ-exponents (and, at odd primes, the τ-support)
//! of Milnor monomials. [`Algebra`] enumerates the basis degree by degree and
//! caches the multiplication table in lazily filled blocks.

mod adem;
mod expr;

pub use adem::{adem_normalize, admissible_to_milnor, AdemError};
pub use expr::{parse_expr, parse_token, ExprError, Token};

use crate::fplin::FpVector;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SteenrodError {
    #[error("unsupported prime {0}")]
    UnsupportedPrime(u32),
    #[error("unknown algebra {0:?}")]
    UnknownAlgebra(String),
    #[error("algebra {0} exceeds the largest supported profile")]
    TooLarge(String),
    #[error("{0} is not in {1}")]
    OutsideProfile(String, String),
    #[error("degree {0} exceeds the algebra's cap {1}")]
    DegreeCap(usize, usize),
}

/// Exponent data selecting a sub-Hopf-algebra.
///
/// `xi[i]` bounds the exponent of ξ_{i+1} by `p^xi[i]`; `tau` is a bitmask of
/// allowed Q_i (odd primes only). `unbounded` selects the whole algebra, used
/// only with an explicit degree cap.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile {
    pub p: u32,
    pub name: String,
    pub xi: Vec<u32>,
    pub tau: u32,
    pub unbounded: bool,
}

impl Profile {
    /// A(n) at p = 2, generated by Sq^1, ..., Sq^{2^n}.
    pub fn a(n: u32) -> Profile {
        Profile {
            p: 2,
            name: format!("A({n})"),
            xi: (1..=n + 1).rev().collect(),
            tau: 0,
            unbounded: false,
        }
    }

    /// The odd-primary A(n): P(r_1 < p^n, r_2 < p^{n-1}, ...), Q_0..Q_n.
    pub fn odd_a(p: u32, n: u32) -> Profile {
        Profile {
            p,
            name: format!("A({n})"),
            xi: (1..=n).rev().collect(),
            tau: (1 << (n + 1)) - 1,
            unbounded: false,
        }
    }

    /// E(1) = E[β, Q_1] at an odd prime.
    pub fn e1(p: u32) -> Profile {
        Profile { p, name: "E(1)".into(), xi: vec![], tau: 0b11, unbounded: false }
    }

    /// P(0) = the subalgebra generated by P^1 at an odd prime.
    pub fn p0(p: u32) -> Profile {
        Profile { p, name: "P(0)".into(), xi: vec![1], tau: 0, unbounded: false }
    }

    pub fn full(p: u32) -> Profile {
        Profile { p, name: "A".into(), xi: vec![], tau: 0, unbounded: true }
    }

    /// Looks up a named profile: `A(n)`, `E(1)`, `P(0)`, or `A` (unbounded).
    pub fn named(p: u32, name: &str) -> Result<Profile, SteenrodError> {
        if !crate::fplin::is_supported_prime(p) {
            return Err(SteenrodError::UnsupportedPrime(p));
        }
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        let profile = match compact.as_str() {
            "A" => Profile::full(p),
            "E(1)" | "E1" if p > 2 => Profile::e1(p),
            "P(0)" | "P0" if p > 2 => Profile::p0(p),
            "E(0)" | "E[Sq1]" if p == 2 => Profile::a(0),
            "E(0)" | "E[b]" => Profile::odd_a(p, 0),
            _ => {
                let inner = compact
                    .strip_prefix("A(")
                    .and_then(|s| s.strip_suffix(')'))
                    .or_else(|| compact.strip_prefix('A'))
                    .ok_or_else(|| SteenrodError::UnknownAlgebra(name.into()))?;
                let n: u32 = inner.parse().map_err(|_| SteenrodError::UnknownAlgebra(name.into()))?;
                let profile = if p == 2 { Profile::a(n) } else { Profile::odd_a(p, n) };
                if profile.total_dim_estimate() > 1 << 12 {
                    return Err(SteenrodError::TooLarge(profile.name));
                }
                profile
            }
        };
        Ok(profile)
    }

    fn total_dim_estimate(&self) -> u64 {
        let mut d: u64 = 1 << self.tau.count_ones();
        for &k in &self.xi {
            d = d.saturating_mul((self.p as u64).saturating_pow(k));
        }
        d
    }

    pub fn contains(&self, m: &Milnor) -> bool {
        if self.unbounded {
            return self.p > 2 || m.q == 0;
        }
        if m.q & !self.tau != 0 || m.r.len() > self.xi.len() {
            return false;
        }
        m.r.iter().zip(&self.xi).all(|(&r, &k)| (r as u64) < (self.p as u64).pow(k))
    }

    /// Top degree of a finite profile.
    pub fn top_degree(&self) -> Option<usize> {
        if self.unbounded {
            return None;
        }
        let mut top = 0;
        for (i, &k) in self.xi.iter().enumerate() {
            top += ((self.p as usize).pow(k) - 1) * xi_degree(self.p, i + 1);
        }
        for i in 0..32 {
            if self.tau & (1 << i) != 0 {
                top += tau_degree(self.p, i);
            }
        }
        Some(top)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Degree of ξ_i: 2^i − 1 at p = 2, 2(p^i − 1) at odd p.
pub fn xi_degree(p: u32, i: usize) -> usize {
    let pi = (p as usize).pow(i as u32);
    if p == 2 {
        pi - 1
    } else {
        2 * (pi - 1)
    }
}

/// Degree of τ_i (the Milnor primitive Q_i): 2p^i − 1.
pub fn tau_degree(p: u32, i: usize) -> usize {
    2 * (p as usize).pow(i as u32) - 1
}

/// A Milnor monomial Q_E P(R); at p = 2 always `q == 0` and `r` is Sq(R).
/// `r` carries no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Milnor {
    pub q: u32,
    pub r: Vec<u32>,
}

impl Milnor {
    pub fn unit() -> Milnor {
        Milnor { q: 0, r: vec![] }
    }

    pub fn new(q: u32, mut r: Vec<u32>) -> Milnor {
        while r.last() == Some(&0) {
            r.pop();
        }
        Milnor { q, r }
    }

    pub fn p_part(r: &[u32]) -> Milnor {
        Milnor::new(0, r.to_vec())
    }

    pub fn q_i(i: usize) -> Milnor {
        Milnor { q: 1 << i, r: vec![] }
    }

    pub fn degree(&self, p: u32) -> usize {
        let mut d = 0;
        for (i, &r) in self.r.iter().enumerate() {
            d += r as usize * xi_degree(p, i + 1);
        }
        for i in 0..32 {
            if self.q & (1 << i) != 0 {
                d += tau_degree(p, i);
            }
        }
        d
    }

    pub fn is_unit(&self) -> bool {
        self.q == 0 && self.r.is_empty()
    }

    pub fn display(&self, p: u32) -> String {
        let mut parts = Vec::new();
        for i in 0..32 {
            if self.q & (1 << i) != 0 {
                parts.push(if i == 0 { "b".to_string() } else { format!("Q{i}") });
            }
        }
        if !self.r.is_empty() {
            let list: Vec<String> = self.r.iter().map(u32::to_string).collect();
            let head = if p == 2 { "Sq" } else { "P" };
            if self.r.len() == 1 {
                parts.push(format!("{head}{}", self.r[0]));
            } else {
                parts.push(format!("{head}({})", list.join(",")));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Multinomial coefficient mod p by Lucas' theorem.
pub fn multinomial_mod(p: u32, parts: &[u32]) -> u32 {
    let mut parts: Vec<u32> = parts.iter().copied().filter(|&x| x > 0).collect();
    if parts.len() <= 1 {
        return 1;
    }
    if p == 2 {
        let mut seen = 0u32;
        for &x in &parts {
            if seen & x != 0 {
                return 0;
            }
            seen |= x;
        }
        return 1;
    }
    let mut coef = 1u64;
    while parts.iter().any(|&x| x > 0) {
        let mut total = 0;
        let mut denom = 1u64;
        for x in parts.iter_mut() {
            let d = *x % p;
            *x /= p;
            total += d;
            denom = denom * factorial_mod(p, d) % p as u64;
        }
        if total >= p {
            return 0;
        }
        let num = factorial_mod(p, total);
        coef = coef * num % p as u64 * crate::fplin::inverse(p, denom as u32) as u64 % p as u64;
    }
    coef as u32
}

fn factorial_mod(p: u32, n: u32) -> u64 {
    (1..=n as u64).fold(1, |acc, k| acc * k % p as u64)
}

/// Binomial coefficient mod p.
pub fn binomial_mod(p: u32, n: u32, k: u32) -> u32 {
    if k > n {
        return 0;
    }
    multinomial_mod(p, &[k, n - k])
}

/// Milnor's product of P-parts: all `(T, c)` with `P(R)·P(S) = Σ c P(T)`.
fn p_part_product(p: u32, r: &[u32], s: &[u32]) -> Vec<(Vec<u32>, u32)> {
    let rows = r.len();
    let cols = s.len();
    // x[i][j] for 1 ≤ i ≤ rows, 1 ≤ j ≤ cols, flattened.
    let mut x = vec![0u32; rows * cols];
    let mut col_left: Vec<u32> = s.to_vec();
    let mut out = Vec::new();
    fn rec(
        p: u32,
        r: &[u32],
        x: &mut [u32],
        col_left: &mut [u32],
        cell: usize,
        row_left: u64,
        out: &mut Vec<(Vec<u32>, u32)>,
    ) {
        let rows = r.len();
        let cols = col_left.len();
        if cell == rows * cols {
            finish(p, r, x, col_left, out);
            return;
        }
        let (i, j) = (cell / cols, cell % cols);
        // Starting a new row resets its weighted budget.
        let budget = if j == 0 { r[i] as u64 } else { row_left };
        let weight = (p as u64).pow(j as u32 + 1);
        let max = (budget / weight).min(col_left[j] as u64) as u32;
        for v in 0..=max {
            x[cell] = v;
            col_left[j] -= v;
            rec(p, r, x, col_left, cell + 1, budget - v as u64 * weight, out);
            col_left[j] += v;
        }
        x[cell] = 0;
    }
    fn finish(p: u32, r: &[u32], x: &[u32], col_left: &[u32], out: &mut Vec<(Vec<u32>, u32)>) {
        let rows = r.len();
        let cols = col_left.len();
        let get = |i: usize, j: usize| -> u32 {
            if i == 0 {
                col_left[j - 1]
            } else if j == 0 {
                let used: u64 = (1..=cols).map(|jj| x[(i - 1) * cols + jj - 1] as u64 * (p as u64).pow(jj as u32)).sum();
                (r[i - 1] as u64 - used) as u32
            } else {
                x[(i - 1) * cols + j - 1]
            }
        };
        let mut t = Vec::with_capacity(rows + cols);
        let mut coef = 1u32;
        let mut diag = Vec::new();
        for n in 1..=rows + cols {
            diag.clear();
            for i in n.saturating_sub(cols)..=n.min(rows) {
                diag.push(get(i, n - i));
            }
            coef = coef * multinomial_mod(p, &diag) % p;
            if coef == 0 {
                return;
            }
            t.push(diag.iter().sum());
        }
        while t.last() == Some(&0) {
            t.pop();
        }
        out.push((t, coef));
    }
    if rows == 0 || cols == 0 {
        let t = if rows == 0 { s.to_vec() } else { r.to_vec() };
        return vec![(Milnor::new(0, t).r, 1)];
    }
    rec(p, r, &mut x, &mut col_left, 0, r[0] as u64, &mut out);
    out
}

/// Product of two Milnor monomials, as a list of (monomial, coefficient).
pub fn milnor_product(p: u32, a: &Milnor, b: &Milnor) -> Vec<(Milnor, u32)> {
    // Move each Q_k of b leftwards past P(R) of a:
    //   P(R) Q_k = Q_k P(R) + Σ_i Q_{k+i} P(R − p^k e_i),
    // then sort it into a's Q-part, with a sign per transposition.
    let mut terms: Vec<(u32, u32, Vec<u32>)> = vec![(1, a.q, a.r.clone())];
    let mut k = 0;
    while b.q >> k != 0 {
        if b.q & (1 << k) != 0 {
            let pk = (p as u64).pow(k);
            let mut next = Vec::new();
            for (c, q, r) in &terms {
                for i in 0..=r.len() {
                    let bit = 1u32 << (k + i as u32);
                    if q & bit != 0 {
                        continue;
                    }
                    if i > 0 && (r[i - 1] as u64) < pk {
                        continue;
                    }
                    let mut nr = r.clone();
                    if i > 0 {
                        nr[i - 1] -= pk as u32;
                    }
                    let larger = (q >> (k + i as u32 + 1)).count_ones();
                    let c = if larger.is_multiple_of(2) { *c } else { (p - c) % p };
                    next.push((c, q | bit, nr));
                }
            }
            terms = next;
        }
        k += 1;
    }
    let mut acc: BTreeMap<Milnor, u32> = BTreeMap::new();
    for (c, q, r) in terms {
        if c == 0 {
            continue;
        }
        let r = Milnor::new(0, r).r;
        for (t, c2) in p_part_product(p, &r, &b.r) {
            let e = acc.entry(Milnor::new(q, t)).or_insert(0);
            *e = (*e + c * c2) % p;
        }
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// An F_p-linear combination of Milnor monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MilnorElement {
    pub p: u32,
    pub terms: BTreeMap<Milnor, u32>,
}

impl MilnorElement {
    pub fn zero(p: u32) -> Self {
        MilnorElement { p, terms: BTreeMap::new() }
    }

    pub fn unit(p: u32) -> Self {
        Self::monomial(p, Milnor::unit(), 1)
    }

    pub fn monomial(p: u32, m: Milnor, c: u32) -> Self {
        let mut e = Self::zero(p);
        e.add_term(m, c);
        e
    }

    pub fn add_term(&mut self, m: Milnor, c: u32) {
        let p = self.p;
        let c = c % p;
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e = (*e + c) % p;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&mut self, other: &MilnorElement, c: u32) {
        for (m, &x) in &other.terms {
            self.add_term(m.clone(), x * (c % self.p));
        }
    }

    pub fn scale(&mut self, c: u32) {
        let p = self.p;
        let mut out = MilnorElement::zero(p);
        for (m, &x) in &self.terms {
            out.add_term(m.clone(), x * (c % p));
        }
        *self = out;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree of all terms, or `None` if zero or inhomogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|m| m.degree(self.p));
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    /// Milnor product, independent of any profile.
    pub fn multiply(&self, other: &MilnorElement) -> MilnorElement {
        assert_eq!(self.p, other.p, "prime mismatch");
        let mut out = MilnorElement::zero(self.p);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                for (m, c) in milnor_product(self.p, a, b) {
                    out.add_term(m, c * ca % self.p * cb);
                }
            }
        }
        out
    }
}

impl fmt::Display for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, &c)) in self.terms.iter().enumerate() {
            let (sign, c) = if self.p > 2 && c > self.p / 2 { ("-", self.p - c) } else { ("+", c) };
            if n > 0 || sign == "-" {
                write!(f, "{}{sign} ", if n > 0 { " " } else { "" })?;
            }
            match (c, m.is_unit()) {
                (1, _) => write!(f, "{}", m.display(self.p))?,
                (_, true) => write!(f, "{c}")?,
                _ => write!(f, "{c} {}", m.display(self.p))?,
            }
        }
        Ok(())
    }
}

/// A profiled subalgebra with its basis and cached multiplication table.
pub struct Algebra {
    profile: Profile,
    max_degree: usize,
    basis: Vec<Vec<Milnor>>,
    index: HashMap<Milnor, usize>,
    table: Vec<OnceLock<Vec<FpVector>>>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra({}, p={}, top={})", self.profile.name, self.profile.p, self.max_degree)
    }
}

impl Algebra {
    /// A finite profile, realized through its top degree.
    pub fn new(profile: Profile) -> Result<Algebra, SteenrodError> {
        let top = profile.top_degree().ok_or_else(|| SteenrodError::TooLarge(profile.name.clone()))?;
        if profile.total_dim_estimate() > 1 << 12 {
            return Err(SteenrodError::TooLarge(profile.name.clone()));
        }
        Ok(Self::build(profile, top))
    }

    pub fn named(p: u32, name: &str) -> Result<Algebra, SteenrodError> {
        let profile = Profile::named(p, name)?;
        if profile.unbounded {
            return Err(SteenrodError::TooLarge(profile.name));
        }
        Algebra::new(profile)
    }

    /// Any profile (including the whole algebra) truncated at `cap`.
    pub fn with_cap(profile: Profile, cap: usize) -> Algebra {
        let cap = profile.top_degree().map_or(cap, |t| t.min(cap));
        Self::build(profile, cap)
    }

    fn build(profile: Profile, max_degree: usize) -> Algebra {
        let p = profile.p;
        let mut basis: Vec<Vec<Milnor>> = vec![Vec::new(); max_degree + 1];
        let mut ps = Vec::new();
        let mut r = Vec::new();
        enumerate_p_parts(&profile, max_degree, 0, 0, &mut r, &mut ps);
        let taus: Vec<usize> = if p == 2 {
            vec![]
        } else {
            (0..31).filter(|&i| tau_degree(p, i) <= max_degree).collect()
        };
        let allowed_tau = if profile.unbounded { u32::MAX } else { profile.tau };
        for mask in 0u32..(1 << taus.len()) {
            if mask & !allowed_tau != 0 {
                continue;
            }
            let qd: usize = taus.iter().filter(|&&i| mask & (1 << i) != 0).map(|&i| tau_degree(p, i)).sum();
            for (rr, rd) in &ps {
                if qd + rd <= max_degree {
                    basis[qd + rd].push(Milnor::new(mask, rr.clone()));
                }
            }
        }
        let mut index = HashMap::new();
        for b in basis.iter_mut() {
            b.sort_by(|x, y| x.q.cmp(&y.q).then_with(|| x.r.cmp(&y.r)));
            for (i, m) in b.iter().enumerate() {
                index.insert(m.clone(), i);
            }
        }
        let n = max_degree + 1;
        Algebra { profile, max_degree, basis, index, table: (0..n * n).map(|_| OnceLock::new()).collect() }
    }

    pub fn prime(&self) -> u32 {
        self.profile.p
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn name(&self) -> &str {
        &self.profile.name
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.basis.get(degree).map_or(0, Vec::len)
    }

    pub fn total_dim(&self) -> usize {
        self.basis.iter().map(Vec::len).sum()
    }

    pub fn basis(&self, degree: usize) -> &[Milnor] {
        self.basis.get(degree).map_or(&[], Vec::as_slice)
    }

    /// Position of a monomial within its degree.
    pub fn index_of(&self, m: &Milnor) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Product of basis elements `(da, ia)·(db, ib)` as a vector in degree
    /// `da + db` (empty if beyond the cap).
    pub fn product(&self, da: usize, ia: usize, db: usize, ib: usize) -> &FpVector {
        let n = self.max_degree + 1;
        let block = self.table[da * n + db].get_or_init(|| self.compute_block(da, db));
        &block[ia * self.dim(db) + ib]
    }

    fn compute_block(&self, da: usize, db: usize) -> Vec<FpVector> {
        let p = self.prime();
        let d = da + db;
        let len = if d <= self.max_degree { self.dim(d) } else { 0 };
        let mut out = Vec::with_capacity(self.dim(da) * self.dim(db));
        for a in self.basis(da) {
            for b in self.basis(db) {
                let mut v = FpVector::new(p, len);
                if d <= self.max_degree {
                    for (m, c) in milnor_product(p, a, b) {
                        let i = self.index_of(&m).unwrap_or_else(|| {
                            panic!("{} · {} escapes {}", a.display(p), b.display(p), self.profile.name)
                        });
                        v.add_to_entry(i, c);
                    }
                }
                out.push(v);
            }
        }
        out
    }

    /// Multiplies two elements; panics if a factor lies outside the profile.
    pub fn multiply(&self, a: &MilnorElement, b: &MilnorElement) -> MilnorElement {
        for m in a.terms.keys().chain(b.terms.keys()) {
            assert!(self.profile.contains(m), "{} is not in {}", m.display(self.prime()), self.profile.name);
        }
        a.multiply(b)
    }

    /// Dense coordinates of a homogeneous element.
    pub fn to_vector(&self, e: &MilnorElement, degree: usize) -> Result<FpVector, SteenrodError> {
        let p = self.prime();
        if degree > self.max_degree {
            return Err(SteenrodError::DegreeCap(degree, self.max_degree));
        }
        let mut v = FpVector::new(p, self.dim(degree));
        for (m, &c) in &e.terms {
            let i = self
                .index_of(m)
                .filter(|_| m.degree(p) == degree)
                .ok_or_else(|| SteenrodError::OutsideProfile(m.display(p), self.profile.name.clone()))?;
            v.add_to_entry(i, c);
        }
        Ok(v)
    }

    pub fn from_vector(&self, degree: usize, v: &FpVector) -> MilnorElement {
        let mut e = MilnorElement::zero(self.prime());
        for (i, c) in v.nonzero_entries() {
            e.add_term(self.basis[degree][i].clone(), c);
        }
        e
    }

    /// Indecomposable generators: Sq^{2^j} at p = 2; β and P^{p^j} at odd p.
    pub fn generators(&self) -> Vec<(usize, usize)> {
        let p = self.prime();
        let mut out = Vec::new();
        if p > 2 {
            if let Some(i) = self.index_of(&Milnor::q_i(0)) {
                out.push((1, i));
            }
        }
        for j in 0..16u32 {
            let m = Milnor::p_part(&[p.pow(j)]);
            let d = m.degree(p);
            if d > self.max_degree {
                break;
            }
            if let Some(i) = self.index_of(&m) {
                out.push((d, i));
            }
        }
        out
    }

    /// Coefficient of `x ⊗ Q_0` in the coproduct of a basis element, i.e.
    /// the component contracting against β (or Sq^1 at p = 2). Returns the
    /// partner's index in degree `degree − 1` and the coefficient.
    pub fn exterior_partner(&self, degree: usize, idx: usize) -> Option<(usize, u32)> {
        let p = self.prime();
        let m = &self.basis[degree][idx];
        if p == 2 {
            let r1 = *m.r.first()?;
            if r1 == 0 {
                return None;
            }
            let mut r = m.r.clone();
            r[0] -= 1;
            let n = Milnor::new(0, r);
            Some((self.index_of(&n)?, 1))
        } else {
            if m.q & 1 == 0 {
                return None;
            }
            let n = Milnor::new(m.q & !1, m.r.clone());
            let sign = if (m.q.count_ones() - 1).is_multiple_of(2) { 1 } else { p - 1 };
            Some((self.index_of(&n)?, sign))
        }
    }
}

fn enumerate_p_parts(
    profile: &Profile,
    cap: usize,
    i: usize,
    deg: usize,
    r: &mut Vec<u32>,
    out: &mut Vec<(Vec<u32>, usize)>,
) {
    let p = profile.p;
    let xd = xi_degree(p, i + 1);
    let bound: Option<u64> = if profile.unbounded {
        if xd > cap {
            None
        } else {
            Some(((cap - deg) / xd) as u64 + 1)
        }
    } else {
        profile.xi.get(i).map(|&k| (p as u64).pow(k))
    };
    let Some(bound) = bound else {
        out.push((Milnor::new(0, r.clone()).r, deg));
        return;
    };
    for v in 0..bound {
        let d = deg + v as usize * xd;
        if d > cap {
            break;
        }
        r.push(v as u32);
        enumerate_p_parts(profile, cap, i + 1, d, r, out);
        r.pop();
    }
}

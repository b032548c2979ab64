//! Brute-force Ext from the normalized bar complex, for checking minimal
//! resolutions in small bidegrees.
//!
//! C_s(t) has basis `[a_1 | … | a_s] m` with each a_i a positive-degree
//! algebra basis element and m a module basis element, total degree t. The
//! boundary is
//! ∂[a_1|…|a_s]m = Σ_{i<s} (−1)^i [… | a_i a_{i+1} | …]m + (−1)^s [a_1|…|a_{s−1}] a_s m,
//! and dim Ext^{s,t}(M, F_p) = dim H_s(C_•(t)).

use crate::fplin::{FpMatrix, FpVector};
use crate::fpmod::GradedModule;
use crate::steenrod::Algebra;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};

/// Per-(s,t) basis size above which the oracle refuses to run.
pub const SIZE_GUARD: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("bar complex has {size} basis elements at ({s},{t}), above the guard {guard}")]
    TooLarge { s: usize, t: i32, size: usize, guard: usize },
}

/// A bar basis element: algebra factors as (degree, index), then the module
/// element as (degree, index).
type Cell = (Vec<(usize, usize)>, (i32, usize));

/// The normalized bar complex of a module, truncated at s ≤ s_max + 1.
pub struct BarComplex<'a> {
    module: &'a GradedModule,
    algebra: &'a Algebra,
    s_max: usize,
    t_max: i32,
    /// `bases[s][t - t_min]`
    bases: Vec<Vec<Vec<Cell>>>,
}

impl<'a> BarComplex<'a> {
    pub fn new(module: &'a GradedModule, s_max: usize, t_max: i32) -> Result<BarComplex<'a>, OracleError> {
        let algebra: &Algebra = module.algebra();
        let t_min = module.min_degree();
        let mut bases: Vec<Vec<Vec<Cell>>> = Vec::new();
        // s = 0: module basis.
        bases.push((t_min..=t_max).map(|t| (0..module.dim(t)).map(|j| (Vec::new(), (t, j))).collect()).collect());
        for s in 1..=s_max + 1 {
            let prev = &bases[s - 1];
            let mut level: Vec<Vec<Cell>> = vec![Vec::new(); prev.len()];
            for (ti, cells) in level.iter_mut().enumerate() {
                let t = t_min + ti as i32;
                // Prepend a_1 of degree d to cells of degree t − d.
                for d in 1..=algebra.max_degree().min((t - t_min).max(0) as usize) {
                    let src = &prev[ti - d];
                    for i in 0..algebra.dim(d) {
                        for (tail, m) in src {
                            let mut f = Vec::with_capacity(s);
                            f.push((d, i));
                            f.extend_from_slice(tail);
                            cells.push((f, *m));
                        }
                    }
                    if cells.len() > SIZE_GUARD {
                        return Err(OracleError::TooLarge { s, t, size: cells.len(), guard: SIZE_GUARD });
                    }
                }
                cells.sort();
            }
            bases.push(level);
        }
        Ok(BarComplex { module, algebra, s_max, t_max, bases })
    }

    pub fn t_min(&self) -> i32 {
        self.module.min_degree()
    }

    pub fn dim(&self, s: usize, t: i32) -> usize {
        if t < self.t_min() || t > self.t_max || s > self.s_max + 1 {
            return 0;
        }
        self.bases[s][(t - self.t_min()) as usize].len()
    }

    /// ∂_s: C_s(t) → C_{s−1}(t), rows indexed by C_s(t).
    pub fn boundary(&self, s: usize, t: i32) -> FpMatrix {
        let p = self.algebra.prime();
        let ti = (t - self.t_min()) as usize;
        let target = &self.bases[s - 1][ti];
        let index: HashMap<&Cell, usize> = target.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let rows = self.bases[s][ti]
            .par_iter()
            .map(|(fs, m)| {
                let mut v = FpVector::new(p, target.len());
                for i in 0..s - 1 {
                    let sign = if (i + 1) % 2 == 0 { 1 } else { p - 1 };
                    let (da, ia) = fs[i];
                    let (db, ib) = fs[i + 1];
                    if da + db > self.algebra.max_degree() {
                        continue;
                    }
                    for (k, c) in self.algebra.product(da, ia, db, ib).nonzero_entries() {
                        let mut f = Vec::with_capacity(s - 1);
                        f.extend_from_slice(&fs[..i]);
                        f.push((da + db, k));
                        f.extend_from_slice(&fs[i + 2..]);
                        v.add_to_entry(index[&(f, *m)], c * sign % p);
                    }
                }
                let sign = if s.is_multiple_of(2) { 1 } else { p - 1 };
                let (d, i) = fs[s - 1];
                let tm = m.0 + d as i32;
                if tm <= self.module.max_degree() {
                    for (k, c) in self.module.act(d, i, m.0, m.1).nonzero_entries() {
                        let f = fs[..s - 1].to_vec();
                        v.add_to_entry(index[&(f, (tm, k))], c * sign % p);
                    }
                }
                v
            })
            .collect();
        FpMatrix::from_rows(p, target.len(), rows)
    }

    /// dim H_s(C_•(t)) for s ≤ s_max.
    pub fn homology_dims(&self) -> BTreeMap<(usize, i32), usize> {
        let ranks: BTreeMap<(usize, i32), usize> = (1..=self.s_max + 1)
            .flat_map(|s| (self.t_min()..=self.t_max).map(move |t| (s, t)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(s, t)| ((s, t), if self.dim(s, t) == 0 || self.dim(s - 1, t) == 0 { 0 } else { self.boundary(s, t).rank() }))
            .collect();
        let mut out = BTreeMap::new();
        for s in 0..=self.s_max {
            for t in self.t_min()..=self.t_max {
                let into = ranks.get(&(s + 1, t)).copied().unwrap_or(0);
                let out_of = if s == 0 { 0 } else { ranks[&(s, t)] };
                let h = self.dim(s, t) - into - out_of;
                if h > 0 {
                    out.insert((s, t), h);
                }
            }
        }
        out
    }

    /// ∂∘∂ = 0 in every degree.
    pub fn check_square_zero(&self) -> bool {
        (2..=self.s_max + 1).all(|s| {
            (self.t_min()..=self.t_max).all(|t| {
                self.dim(s, t) == 0 || self.dim(s - 2, t) == 0 || self.boundary(s, t).mul(&self.boundary(s - 1, t)).is_zero()
            })
        })
    }
}

/// Ext dimensions of M over its algebra from the bar complex.
pub fn bar_ext_dims(module: &GradedModule, s_max: usize, t_max: i32) -> Result<BTreeMap<(usize, i32), usize>, OracleError> {
    Ok(BarComplex::new(module, s_max, t_max)?.homology_dims())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmod::{bockstein_tensor, ground_field};
    use crate::resolve::Resolution;
    use crate::steenrod::Profile;

    #[test]
    fn a1_ground_field_matches_resolution() {
        let m = ground_field(&Profile::a(1)).unwrap();
        let bar = BarComplex::new(&m, 4, 14).unwrap();
        assert!(bar.check_square_zero());
        let r = Resolution::new(m.clone(), 4, 14);
        assert_eq!(bar.homology_dims(), r.ext_dims());
    }

    #[test]
    fn e1_at_three_is_polynomial() {
        let m = ground_field(&Profile::e1(3)).unwrap();
        let dims = bar_ext_dims(&m, 5, 20).unwrap();
        for s in 0..=5usize {
            for t in 0..=20i32 {
                let expected = (0..=s).filter(|&b| (s - b) as i32 + 5 * b as i32 == t).count();
                assert_eq!(dims.get(&(s, t)).copied().unwrap_or(0), expected, "({s},{t})");
            }
        }
    }

    #[test]
    fn euler_characteristic() {
        let m = ground_field(&Profile::a(1)).unwrap();
        let bar = BarComplex::new(&m, 6, 6).unwrap();
        let h = bar.homology_dims();
        for t in 0..=6 {
            let chi_c: i64 = (0..=6).map(|s| if s % 2 == 0 { 1 } else { -1 } * bar.dim(s, t) as i64).sum();
            let chi_h: i64 = (0..=6).map(|s| if s % 2 == 0 { 1 } else { -1 } * h.get(&(s, t)).copied().unwrap_or(0) as i64).sum();
            assert_eq!(chi_c, chi_h, "t = {t}");
        }
    }

    #[test]
    fn size_guard() {
        let m = ground_field(&Profile::a(2)).unwrap();
        assert!(matches!(BarComplex::new(&m, 12, 60), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn tensor_cell_is_a_module() {
        let f2 = ground_field(&Profile::a(2)).unwrap();
        let e = bockstein_tensor(&f2, "E");
        assert_eq!(e.dims().into_iter().filter(|d| d.1 > 0).collect::<Vec<_>>(), vec![(0, 1), (1, 1)]);
        assert!(e.check_associativity(23).is_ok());
        let ee = bockstein_tensor(&e, "E⊗E");
        assert_eq!(ee.total_dim(), 4);
        assert!(ee.check_associativity(23).is_ok());
        let f3 = ground_field(&Profile::odd_a(3, 1)).unwrap();
        let e3 = bockstein_tensor(&bockstein_tensor(&f3, "E"), "E⊗E");
        assert!(e3.check_associativity(12).is_ok());
    }
}

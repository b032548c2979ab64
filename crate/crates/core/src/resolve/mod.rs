//! Minimal free resolutions, chain maps between them, and Yoneda products.
//!
//! Ext^{s,t}(M, F_p) has a basis dual to the level-s generators in degree
//! t, because the resolutions built here are minimal.

mod chart;
mod free;

pub use chart::{ExtClass, NameError, NamedChart};
pub use free::FreeLevel;

use crate::fplin::{FpVector, ImageKernel, Subspace};
use crate::fpmod::GradedModule;
use crate::steenrod::Algebra;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("bidegree ({s},{t}) lies outside the resolved window s ≤ {s_max}, t ≤ {t_max}")]
    OutOfWindow { s: usize, t: i32, s_max: usize, t_max: i32 },
    #[error("chain map cannot be lifted at level {level}, degree {t}")]
    NoLift { level: usize, t: i32 },
    #[error("{0}")]
    Invalid(String),
}

/// A minimal free resolution `… → F_1 → F_0 → M`, exact through `t_max`.
pub struct Resolution {
    module: GradedModule,
    algebra: Arc<Algebra>,
    s_max: usize,
    t_max: i32,
    levels: Vec<FreeLevel>,
}

impl std::fmt::Debug for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Resolution({}, s ≤ {}, t ≤ {})", self.module.name(), self.s_max, self.t_max)
    }
}

impl Resolution {
    /// Builds a minimal resolution through homological degree `s_max` and
    /// internal degree `t_max`.
    pub fn new(module: GradedModule, s_max: usize, t_max: i32) -> Resolution {
        let algebra = module.algebra().clone();
        let t_min = module.min_degree().min(t_max);
        let mut res = Resolution { module, algebra, s_max, t_max, levels: Vec::new() };
        // Kernel of the previous differential in each degree; for s = 0 it
        // is all of M, which the augmentation must hit.
        let mut kernels: Vec<Vec<FpVector>> = (t_min..=t_max)
            .map(|t| {
                let n = res.module.dim(t);
                (0..n).map(|j| FpVector::basis(res.prime(), n, j)).collect()
            })
            .collect();
        for s in 0..=s_max {
            let mut level = FreeLevel::new(res.algebra.clone(), t_min);
            let mut next_kernels = Vec::with_capacity(kernels.len());
            for (ti, t) in (t_min..=t_max).enumerate() {
                let rows = res.rows_for(&level, s, t);
                let target_dim = res.target_dim(s, t);
                let ik = ImageKernel::compute(res.prime(), target_dim, &rows);
                let mut span = Subspace::from_vectors(res.prime(), target_dim, ik.image_rows());
                for k in &kernels[ti] {
                    if let Some(v) = span.insert(k) {
                        level.add_generator(t, v);
                    }
                }
                level.close_degree(t);
                let n = level.dim(t);
                next_kernels.push(ik.kernel.iter().map(|v| v.resized(n)).collect());
            }
            kernels = next_kernels;
            res.levels.push(level);
        }
        res
    }

    pub fn prime(&self) -> u32 {
        self.algebra.prime()
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn t_max(&self) -> i32 {
        self.t_max
    }

    pub fn t_min(&self) -> i32 {
        self.levels.first().map_or(self.module.min_degree(), |l| l.t_min())
    }

    pub fn level(&self, s: usize) -> &FreeLevel {
        &self.levels[s]
    }

    /// Dimension of the codomain of d_s in degree t.
    pub fn target_dim(&self, s: usize, t: i32) -> usize {
        if s == 0 {
            self.module.dim(t)
        } else {
            self.levels[s - 1].dim(t)
        }
    }

    fn rows_for(&self, level: &FreeLevel, s: usize, t: i32) -> Vec<FpVector> {
        let basis = level.basis_in_degree(t);
        basis
            .par_iter()
            .map(|&(g, d, i)| {
                let gd = level.gen_degree(g);
                self.act_on_target(s, d, i, gd, level.d(g))
            })
            .collect()
    }

    /// θ_{d,i} · x for x in the codomain of d_s at degree t.
    pub fn act_on_target(&self, s: usize, d: usize, i: usize, t: i32, x: &FpVector) -> FpVector {
        if s == 0 {
            self.module.act_on(d, i, t, x)
        } else {
            self.levels[s - 1].act(d, i, t, x)
        }
    }

    /// Images under d_s of the basis of F_s(t), as vectors in F_{s-1}(t) (or M_t).
    pub fn differential_rows(&self, s: usize, t: i32) -> Vec<FpVector> {
        self.rows_for(&self.levels[s], s, t)
    }

    /// d_s applied to an element of F_s(t).
    pub fn apply_d(&self, s: usize, t: i32, x: &FpVector) -> FpVector {
        let level = &self.levels[s];
        let mut out = FpVector::new(self.prime(), self.target_dim(s, t));
        for (c, coef) in x.nonzero_entries() {
            let (g, d, i) = level.decode(t, c);
            out.add_scaled(&self.act_on_target(s, d, i, level.gen_degree(g), level.d(g)), coef);
        }
        out
    }

    /// Solver for d_s in degree t (image echelon with preimages).
    pub fn solver(&self, s: usize, t: i32) -> ImageKernel {
        ImageKernel::compute(self.prime(), self.target_dim(s, t), &self.differential_rows(s, t))
    }

    pub fn gens(&self, s: usize) -> &[i32] {
        self.levels[s].gen_degrees()
    }

    /// Indices of level-s generators in degree t.
    pub fn gens_in_degree(&self, s: usize, t: i32) -> std::ops::Range<usize> {
        self.levels[s].gens_in_degree(t)
    }

    pub fn check_window(&self, s: usize, t: i32) -> Result<(), ResolveError> {
        if s > self.s_max || t > self.t_max {
            Err(ResolveError::OutOfWindow { s, t, s_max: self.s_max, t_max: self.t_max })
        } else {
            Ok(())
        }
    }

    /// dim Ext^{s,t}(M, F_p).
    pub fn ext_dim(&self, s: usize, t: i32) -> Result<usize, ResolveError> {
        self.check_window(s, t)?;
        Ok(self.gens_in_degree(s, t).len())
    }

    /// All nonzero Ext dimensions in the window.
    pub fn ext_dims(&self) -> BTreeMap<(usize, i32), usize> {
        let mut out = BTreeMap::new();
        for s in 0..=self.s_max {
            for &t in self.gens(s) {
                *out.entry((s, t)).or_insert(0) += 1;
            }
        }
        out
    }

    /// Whether d∘d = 0 and every differential lies in the augmentation ideal.
    pub fn verify(&self) -> Result<(), String> {
        for s in 0..=self.s_max {
            let level = &self.levels[s];
            for (g, &t) in level.gen_degrees().iter().enumerate() {
                let dg = level.d(g);
                if s >= 1 {
                    let prev = &self.levels[s - 1];
                    for g2 in prev.gens_in_degree(t) {
                        if dg.entry(prev.unit_coord(g2)) != 0 {
                            return Err(format!("non-minimal differential at ({s},{t})"));
                        }
                    }
                    if !self.apply_d(s - 1, t, dg).is_zero() {
                        return Err(format!("d∘d ≠ 0 at ({s},{t})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Filtration-one product: coefficient of θ x in d(g), for each
    /// level-(s+1) generator g in degree t + |θ|. `theta` is an algebra basis
    /// element dual to a primitive (Sq(2^i), P(p^i), or Q_0).
    pub fn primitive_product(&self, theta: (usize, usize), s: usize, x: usize) -> Vec<(usize, u32)> {
        let (d, i) = theta;
        let t = self.gens(s)[x];
        let level = &self.levels[s];
        let mut out = Vec::new();
        if s + 1 > self.s_max || t + d as i32 > self.t_max {
            return out;
        }
        let coord = level.coord(t + d as i32, x, i);
        for g in self.gens_in_degree(s + 1, t + d as i32) {
            let c = self.levels[s + 1].d(g).entry(coord);
            if c != 0 {
                out.push((g, c));
            }
        }
        out
    }

    /// Matrix of the filtration-one product Ext^{s,t} → Ext^{s+1,t+|θ|}.
    pub fn primitive_product_matrix(&self, theta: (usize, usize), s: usize, t: i32) -> crate::fplin::FpMatrix {
        let p = self.prime();
        let tt = t + theta.0 as i32;
        let cols = if s < self.s_max && tt <= self.t_max { self.gens_in_degree(s + 1, tt) } else { 0..0 };
        let rows = self
            .gens_in_degree(s, t)
            .map(|x| {
                let mut v = FpVector::new(p, cols.len());
                for (g, c) in self.primitive_product(theta, s, x) {
                    v.set_entry(g - cols.start, c);
                }
                v
            })
            .collect();
        crate::fplin::FpMatrix::from_rows(p, cols.len(), rows)
    }
}

/// Chain map `f_j: P_{j+k} → Q_j`, lowering internal degree by `t0`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub k: usize,
    pub t0: i32,
    /// `maps[j][g]` = f_j(g) in Q_j(|g| − t0); `None` beyond the target window.
    pub maps: Vec<Vec<Option<FpVector>>>,
}

/// Seed for a chain-map lift: images ε_Q f_0(g) ∈ N for the generators of P_k.
#[derive(Clone, Debug)]
pub struct ChainSeed {
    pub k: usize,
    pub t0: i32,
    pub images: Vec<FpVector>,
}

impl ChainSeed {
    /// The seed of an Ext class `x ∈ Ext^{k,t}(M)` mapping to the resolution of F_p.
    pub fn from_class(src: &Resolution, k: usize, coeffs: &[(usize, u32)]) -> ChainSeed {
        let p = src.prime();
        let gens = src.gens(k);
        let t0 = gens[coeffs[0].0];
        let images = gens
            .iter()
            .enumerate()
            .map(|(g, &t)| {
                let mut v = FpVector::new(p, if t == t0 { 1 } else { 0 });
                if let Some(&(_, c)) = coeffs.iter().find(|(x, _)| *x == g) {
                    v.set_entry(0, c);
                }
                v
            })
            .collect();
        ChainSeed { k, t0, images }
    }
}

impl ChainMap {
    pub fn depth(&self) -> usize {
        self.maps.len().saturating_sub(1)
    }

    /// Coefficient of the target generator `y` (level j) in f_j(g).
    pub fn coefficient(&self, tgt: &Resolution, j: usize, g: usize, y: usize) -> Option<u32> {
        let v = self.maps.get(j)?.get(g)?.as_ref()?;
        Some(v.entry(tgt.level(j).unit_coord(y)))
    }

    /// Pullback on Ext: Ext^{j,t}(N) → Ext^{j+k,t+t0}(M) as a matrix with
    /// rows indexed by target generators y and columns by source generators.
    pub fn ext_matrix(&self, src: &Resolution, tgt: &Resolution, j: usize, t: i32) -> Result<crate::fplin::FpMatrix, ResolveError> {
        let p = src.prime();
        let ys = tgt.gens_in_degree(j, t);
        let s = j + self.k;
        src.check_window(s, t + self.t0)?;
        let gs = src.gens_in_degree(s, t + self.t0);
        let mut rows = Vec::with_capacity(ys.len());
        for y in ys {
            let mut v = FpVector::new(p, gs.len());
            for (col, g) in gs.clone().enumerate() {
                let c = self.coefficient(tgt, j, g, y).ok_or(ResolveError::OutOfWindow {
                    s,
                    t: t + self.t0,
                    s_max: src.s_max(),
                    t_max: tgt.t_max() + self.t0,
                })?;
                v.set_entry(col, c);
            }
            rows.push(v);
        }
        Ok(crate::fplin::FpMatrix::from_rows(p, gs.len(), rows))
    }
}

/// Applies f_j (given on generators) to an element of P_{j+k}(t).
pub fn apply_chain(src: &Resolution, tgt: &Resolution, f: &ChainMap, j: usize, t: i32, x: &FpVector) -> Option<FpVector> {
    let s = j + f.k;
    let level = src.level(s);
    let tl = &tgt.level(j);
    let mut out = FpVector::new(src.prime(), tl.dim(t - f.t0));
    for (c, coef) in x.nonzero_entries() {
        let (g, d, i) = level.decode(t, c);
        let img = f.maps[j][g].as_ref()?;
        out.add_scaled(&tl.act(d, i, level.gen_degree(g) - f.t0, img), coef);
    }
    Some(out)
}

/// Lifts several seeds to chain maps into the same target resolution,
/// building each target solver once. Each map is lifted until its source
/// level would exceed `src.s_max()` or its target level exceeds `depth`.
pub fn lift_chain_maps(
    src: &Resolution,
    tgt: &Resolution,
    seeds: &[ChainSeed],
    depth: usize,
) -> Result<Vec<ChainMap>, ResolveError> {
    let p = src.prime();
    let mut maps: Vec<ChainMap> = seeds.iter().map(|s| ChainMap { k: s.k, t0: s.t0, maps: Vec::new() }).collect();
    for j in 0..=depth.min(tgt.s_max()) {
        // Degrees needed at target level j.
        let mut needed: Vec<i32> = Vec::new();
        for seed in seeds {
            if j + seed.k > src.s_max() {
                continue;
            }
            for &t in src.gens(j + seed.k) {
                let tt = t - seed.t0;
                if tt <= tgt.t_max() && tt >= tgt.t_min() {
                    needed.push(tt);
                }
            }
        }
        needed.sort_unstable();
        needed.dedup();
        let solvers: BTreeMap<i32, ImageKernel> = needed.par_iter().map(|&t| (t, tgt.solver(j, t))).collect();
        for (seed, map) in seeds.iter().zip(maps.iter_mut()) {
            let s = j + seed.k;
            if s > src.s_max() {
                continue;
            }
            let gens = src.gens(s);
            let level_images: Result<Vec<Option<FpVector>>, ResolveError> = (0..gens.len())
                .into_par_iter()
                .map(|g| {
                    let t = gens[g];
                    let tt = t - seed.t0;
                    if tt > tgt.t_max() {
                        return Ok(None);
                    }
                    if tt < tgt.t_min() {
                        return Ok(Some(FpVector::new(p, 0)));
                    }
                    let target = if j == 0 {
                        seed.images[g].clone()
                    } else {
                        let dg = src.level(s).d(g);
                        match apply_chain(src, tgt, map, j - 1, t, dg) {
                            Some(v) => v,
                            None => return Ok(None),
                        }
                    };
                    let solver = &solvers[&tt];
                    solver.solve(&target).map(Some).ok_or(ResolveError::NoLift { level: j, t: tt })
                })
                .collect();
            map.maps.push(level_images?);
        }
    }
    Ok(maps)
}

/// Lifts a module map (given as a seed at shift 0) or an Ext class to a chain map.
pub fn lift_chain_map(src: &Resolution, tgt: &Resolution, seed: ChainSeed, depth: usize) -> Result<ChainMap, ResolveError> {
    Ok(lift_chain_maps(src, tgt, &[seed], depth)?.pop().unwrap())
}

/// Seed for the chain map induced by a module map `f: M → N` (degree-preserving).
pub fn module_map_seed(src: &Resolution, f: &crate::fpmod::ModuleMap) -> ChainSeed {
    let images = src
        .gens(0)
        .iter()
        .enumerate()
        .map(|(g, &t)| f.apply(t, src.level(0).d(g)))
        .collect();
    ChainSeed { k: 0, t0: -f.shift, images }
}

/// Yoneda product g·x of a class g ∈ Ext^{s_g,t_g}(F_p) (in `ground`) with
/// x ∈ Ext^{s,t}(M) (in `res`): lift x to depth s_g and evaluate g.
pub fn yoneda_product(
    res: &Resolution,
    ground: &Resolution,
    x: (usize, &[(usize, u32)]),
    g: (usize, &[(usize, u32)]),
) -> Result<(usize, i32, FpVector), ResolveError> {
    let (s, xc) = x;
    let (sg, gc) = g;
    let tg = ground.gens(sg)[gc[0].0];
    let seed = ChainSeed::from_class(res, s, xc);
    let t = seed.t0;
    res.check_window(s + sg, t + tg)?;
    let f = lift_chain_map(res, ground, seed, sg)?;
    let m = f.ext_matrix(res, ground, sg, tg)?;
    let ys = ground.gens_in_degree(sg, tg);
    let mut out = FpVector::new(res.prime(), m.cols());
    for &(y, c) in gc {
        out.add_scaled(m.row(y - ys.start), c);
    }
    Ok((s + sg, t + tg, out))
}

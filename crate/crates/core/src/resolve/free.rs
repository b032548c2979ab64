use crate::fplin::FpVector;
use crate::steenrod::Algebra;
use std::sync::Arc;

/// One level F_s of a resolution: a free module on generators of
/// nondecreasing degree, together with each generator's differential.
///
/// The basis of F_s(t) lists, generator by generator, the algebra basis in
/// degree t − |g|.
#[derive(Clone)]
pub struct FreeLevel {
    algebra: Arc<Algebra>,
    t_min: i32,
    gens: Vec<i32>,
    d: Vec<FpVector>,
    /// `starts[t - t_min]`: block offsets of the generators of degree ≤ t,
    /// followed by the total dimension.
    starts: Vec<Vec<usize>>,
}

impl FreeLevel {
    pub(crate) fn new(algebra: Arc<Algebra>, t_min: i32) -> FreeLevel {
        FreeLevel { algebra, t_min, gens: Vec::new(), d: Vec::new(), starts: Vec::new() }
    }

    pub(crate) fn add_generator(&mut self, t: i32, d: FpVector) {
        debug_assert!(self.gens.last().is_none_or(|&x| x <= t));
        self.gens.push(t);
        self.d.push(d);
    }

    /// Fixes the basis of degree t; generators of degree t must all be added.
    pub(crate) fn close_degree(&mut self, t: i32) {
        debug_assert_eq!(self.starts.len() as i32, t - self.t_min);
        let mut starts = Vec::new();
        let mut off = 0;
        for &g in self.gens.iter().take_while(|&&g| g <= t) {
            starts.push(off);
            off += self.alg_dim(t - g);
        }
        starts.push(off);
        self.starts.push(starts);
    }

    fn alg_dim(&self, d: i32) -> usize {
        if d < 0 {
            0
        } else {
            self.algebra.dim(d as usize)
        }
    }

    pub fn t_min(&self) -> i32 {
        self.t_min
    }

    pub fn gen_degrees(&self) -> &[i32] {
        &self.gens
    }

    pub fn gen_degree(&self, g: usize) -> i32 {
        self.gens[g]
    }

    pub fn d(&self, g: usize) -> &FpVector {
        &self.d[g]
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gens_in_degree(&self, t: i32) -> std::ops::Range<usize> {
        self.gens.partition_point(|&g| g < t)..self.gens.partition_point(|&g| g <= t)
    }

    fn starts(&self, t: i32) -> &[usize] {
        if t < self.t_min {
            return &[0];
        }
        self.starts
            .get((t - self.t_min) as usize)
            .unwrap_or_else(|| panic!("degree {t} is beyond the resolved range"))
    }

    pub fn dim(&self, t: i32) -> usize {
        *self.starts(t).last().unwrap()
    }

    /// Coordinate of `a_i · g` in F_s(t), where a_i has degree t − |g|.
    pub fn coord(&self, t: i32, g: usize, i: usize) -> usize {
        self.starts(t)[g] + i
    }

    /// Coordinate of the generator g itself in degree |g|.
    pub fn unit_coord(&self, g: usize) -> usize {
        self.starts(self.gens[g])[g]
    }

    /// (generator, algebra degree, algebra index) of a coordinate in degree t.
    pub fn decode(&self, t: i32, c: usize) -> (usize, usize, usize) {
        let st = self.starts(t);
        let g = st.partition_point(|&x| x <= c) - 1;
        (g, (t - self.gens[g]) as usize, c - st[g])
    }

    /// The basis of F_s(t) for generators of degree < t, plus any of degree t
    /// already added, as (generator, algebra degree, algebra index).
    pub(crate) fn basis_in_degree(&self, t: i32) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (g, &gd) in self.gens.iter().enumerate().take_while(|(_, &gd)| gd <= t) {
            let d = (t - gd) as usize;
            if d <= self.algebra.max_degree() {
                out.extend((0..self.algebra.dim(d)).map(|i| (g, d, i)));
            }
        }
        out
    }

    /// θ_{d,i} · x for x ∈ F_s(t).
    pub fn act(&self, d: usize, i: usize, t: i32, x: &FpVector) -> FpVector {
        let target = t + d as i32;
        let p = self.algebra.prime();
        let mut out = FpVector::new(p, self.dim(target));
        if out.is_empty() {
            return out;
        }
        let st = self.starts(t);
        let tst = self.starts(target);
        for (c, coef) in x.nonzero_entries() {
            let g = st.partition_point(|&x| x <= c) - 1;
            let db = (t - self.gens[g]) as usize;
            if d + db > self.algebra.max_degree() {
                continue;
            }
            let prod = self.algebra.product(d, i, db, c - st[g]);
            out.add_shifted(prod, tst[g], coef);
        }
        out
    }
}

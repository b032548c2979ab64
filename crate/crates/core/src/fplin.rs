//! Dense linear algebra over prime fields.
//!
//! Vectors over `F_2` are bit-packed, 64 entries to a word. Odd primes use one
//! byte per residue. Every elimination routine scans columns left to right and
//! takes the topmost unused row with a nonzero entry, so pivot choices (and
//! everything built on them) are reproducible regardless of thread count.

use rayon::prelude::*;
use std::fmt;

/// Rows wider than this many words times rows are eliminated in parallel.
const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Limbs {
    Bits(Vec<u64>),
    Residues(Vec<u8>),
}

/// A vector over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpVector {
    p: u32,
    len: usize,
    limbs: Limbs,
}

#[inline]
fn words(len: usize) -> usize {
    len.div_ceil(64)
}

/// Multiplicative inverse mod a small prime.
pub fn inverse(p: u32, a: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    let mut result = 1u64;
    let mut base = (a % p) as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Whether `p` is a prime this module supports (byte residues).
pub fn is_supported_prime(p: u32) -> bool {
    (2..=251).contains(&p) && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl FpVector {
    pub fn new(p: u32, len: usize) -> Self {
        let limbs = if p == 2 {
            Limbs::Bits(vec![0; words(len)])
        } else {
            Limbs::Residues(vec![0; len])
        };
        FpVector { p, len, limbs }
    }

    pub fn from_entries(p: u32, entries: &[u32]) -> Self {
        let mut v = FpVector::new(p, entries.len());
        for (i, &e) in entries.iter().enumerate() {
            v.set_entry(i, e % p);
        }
        v
    }

    pub fn basis(p: u32, len: usize, i: usize) -> Self {
        let mut v = FpVector::new(p, len);
        v.set_entry(i, 1);
        v
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn entry(&self, i: usize) -> u32 {
        debug_assert!(i < self.len);
        match &self.limbs {
            Limbs::Bits(w) => ((w[i >> 6] >> (i & 63)) & 1) as u32,
            Limbs::Residues(r) => r[i] as u32,
        }
    }

    #[inline]
    pub fn set_entry(&mut self, i: usize, value: u32) {
        debug_assert!(i < self.len);
        let value = value % self.p;
        match &mut self.limbs {
            Limbs::Bits(w) => {
                let mask = 1u64 << (i & 63);
                if value == 1 {
                    w[i >> 6] |= mask;
                } else {
                    w[i >> 6] &= !mask;
                }
            }
            Limbs::Residues(r) => r[i] = value as u8,
        }
    }

    #[inline]
    pub fn add_to_entry(&mut self, i: usize, value: u32) {
        let p = self.p;
        match &mut self.limbs {
            Limbs::Bits(w) => {
                if value & 1 == 1 {
                    w[i >> 6] ^= 1u64 << (i & 63);
                }
            }
            Limbs::Residues(r) => r[i] = ((r[i] as u32 + value % p) % p) as u8,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.limbs {
            Limbs::Bits(w) => w.iter().all(|&x| x == 0),
            Limbs::Residues(r) => r.iter().all(|&x| x == 0),
        }
    }

    pub fn set_to_zero(&mut self) {
        match &mut self.limbs {
            Limbs::Bits(w) => w.iter_mut().for_each(|x| *x = 0),
            Limbs::Residues(r) => r.iter_mut().for_each(|x| *x = 0),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &FpVector, c: u32) {
        self.add_scaled_from(other, c, 0);
    }

    /// `self += c * other`, assuming `other` vanishes below index `start`.
    pub fn add_scaled_from(&mut self, other: &FpVector, c: u32, start: usize) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        let p = self.p;
        let c = c % p;
        if c == 0 {
            return;
        }
        match (&mut self.limbs, &other.limbs) {
            (Limbs::Bits(a), Limbs::Bits(b)) => {
                for (x, y) in a[start >> 6..].iter_mut().zip(&b[start >> 6..]) {
                    *x ^= *y;
                }
            }
            (Limbs::Residues(a), Limbs::Residues(b)) => {
                for (x, y) in a[start..].iter_mut().zip(&b[start..]) {
                    if *y != 0 {
                        *x = ((*x as u32 + c * *y as u32) % p) as u8;
                    }
                }
            }
            _ => panic!("prime mismatch"),
        }
    }

    pub fn scale(&mut self, c: u32) {
        let p = self.p;
        let c = c % p;
        match &mut self.limbs {
            Limbs::Bits(w) => {
                if c == 0 {
                    w.iter_mut().for_each(|x| *x = 0)
                }
            }
            Limbs::Residues(r) => r.iter_mut().for_each(|x| *x = ((*x as u32 * c) % p) as u8),
        }
    }

    pub fn first_nonzero(&self) -> Option<(usize, u32)> {
        self.first_nonzero_from(0)
    }

    pub fn first_nonzero_from(&self, start: usize) -> Option<(usize, u32)> {
        match &self.limbs {
            Limbs::Bits(w) => {
                let mut wi = start >> 6;
                if wi >= w.len() {
                    return None;
                }
                let mut word = w[wi] & (!0u64 << (start & 63));
                loop {
                    if word != 0 {
                        return Some((wi * 64 + word.trailing_zeros() as usize, 1));
                    }
                    wi += 1;
                    if wi >= w.len() {
                        return None;
                    }
                    word = w[wi];
                }
            }
            Limbs::Residues(r) => r[start.min(r.len())..]
                .iter()
                .position(|&x| x != 0)
                .map(|i| (i + start, r[i + start] as u32)),
        }
    }

    /// Nonzero entries in increasing index order.
    pub fn nonzero_entries(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        match &self.limbs {
            Limbs::Bits(w) => {
                for (wi, &word) in w.iter().enumerate() {
                    let mut word = word;
                    while word != 0 {
                        let b = word.trailing_zeros() as usize;
                        out.push((wi * 64 + b, 1));
                        word &= word - 1;
                    }
                }
            }
            Limbs::Residues(r) => {
                for (i, &x) in r.iter().enumerate() {
                    if x != 0 {
                        out.push((i, x as u32));
                    }
                }
            }
        }
        out
    }

    pub fn count_nonzero(&self) -> usize {
        match &self.limbs {
            Limbs::Bits(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            Limbs::Residues(r) => r.iter().filter(|&&x| x != 0).count(),
        }
    }

    pub fn dot(&self, other: &FpVector) -> u32 {
        assert_eq!(self.len, other.len);
        match (&self.limbs, &other.limbs) {
            (Limbs::Bits(a), Limbs::Bits(b)) => {
                a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() & 1
            }
            (Limbs::Residues(a), Limbs::Residues(b)) => {
                let p = self.p as u64;
                (a.iter().zip(b).map(|(&x, &y)| x as u64 * y as u64).sum::<u64>() % p) as u32
            }
            _ => panic!("prime mismatch"),
        }
    }

    pub fn to_entries(&self) -> Vec<u32> {
        (0..self.len).map(|i| self.entry(i)).collect()
    }

    /// Concatenation `self ⊕ other`.
    pub fn concat(&self, other: &FpVector) -> FpVector {
        let mut v = FpVector::new(self.p, self.len + other.len);
        for (i, c) in self.nonzero_entries() {
            v.set_entry(i, c);
        }
        for (i, c) in other.nonzero_entries() {
            v.set_entry(self.len + i, c);
        }
        v
    }

    pub fn slice(&self, start: usize, end: usize) -> FpVector {
        assert!(start <= end && end <= self.len);
        let mut v = FpVector::new(self.p, end - start);
        for (i, c) in self.nonzero_entries() {
            if i >= start && i < end {
                v.set_entry(i - start, c);
            }
        }
        v
    }

    /// Copies `other` into positions `offset..offset + other.len()`, adding `c` times it.
    pub fn add_shifted(&mut self, other: &FpVector, offset: usize, c: u32) {
        for (i, x) in other.nonzero_entries() {
            self.add_to_entry(offset + i, x * c);
        }
    }

    /// Zero-extends (or truncates) to the given length.
    pub fn resized(&self, len: usize) -> FpVector {
        let mut v = FpVector::new(self.p, len);
        for (i, c) in self.nonzero_entries() {
            if i < len {
                v.set_entry(i, c);
            }
        }
        v
    }
}

impl fmt::Debug for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.entry(i))?;
        }
        write!(f, "]")
    }
}

/// Dense row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    cols: usize,
    rows: Vec<FpVector>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix p={} {}x{}", self.p, self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {:?}", r)?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonForm {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("right-hand side is not in the column space")]
pub struct NoSolution;

impl FpMatrix {
    pub fn zero(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix { p, cols, rows: (0..rows).map(|_| FpVector::new(p, cols)).collect() }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        FpMatrix { p, cols: n, rows: (0..n).map(|i| FpVector::basis(p, n, i)).collect() }
    }

    pub fn from_rows(p: u32, cols: usize, rows: Vec<FpVector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            assert_eq!(r.prime(), p, "prime mismatch");
        }
        FpMatrix { p, cols, rows }
    }

    pub fn from_entries(p: u32, entries: &[Vec<u32>]) -> Self {
        let cols = entries.first().map_or(0, Vec::len);
        let rows = entries.iter().map(|r| FpVector::from_entries(p, r)).collect();
        FpMatrix::from_rows(p, cols, rows)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &FpVector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[FpVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<FpVector> {
        self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.rows[i].entry(j)
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: u32) {
        self.rows[i].set_entry(j, v)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(FpVector::is_zero)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zero(self.p, self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in r.nonzero_entries() {
                t.rows[j].set_entry(i, c);
            }
        }
        t
    }

    /// `m · x` for a column vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &FpVector) -> FpVector {
        assert_eq!(x.len(), self.cols);
        let mut out = FpVector::new(self.p, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            out.set_entry(i, r.dot(x));
        }
        out
    }

    /// Row vector times matrix: `v · m` for `v` of length `rows`.
    pub fn apply_row(&self, v: &FpVector) -> FpVector {
        assert_eq!(v.len(), self.rows.len());
        let mut out = FpVector::new(self.p, self.cols);
        for (i, c) in v.nonzero_entries() {
            out.add_scaled(&self.rows[i], c);
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows.len(), "dimension mismatch");
        let rows = self.rows.iter().map(|r| other.apply_row(r)).collect();
        FpMatrix { p: self.p, cols: other.cols, rows }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce_limited(self.cols).len()
    }

    /// In-place reduced row-echelon form, searching pivots only among the
    /// first `limit` columns. Pivot rows end up on top, normalized.
    pub fn row_reduce_limited(&mut self, limit: usize) -> Vec<usize> {
        row_reduce(self.p, &mut self.rows, limit.min(self.cols))
    }

    pub fn rref(&self) -> EchelonForm {
        let mut m = self.clone();
        let pivots = m.row_reduce_limited(self.cols);
        let rank = pivots.len();
        EchelonForm { matrix: m, pivots, rank }
    }

    /// A basis of `{x : m·x = 0}`, one basis vector per free column.
    pub fn kernel_basis(&self) -> FpMatrix {
        let ech = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = FpVector::new(p, self.cols);
            v.set_entry(f, 1);
            for (r, &pc) in ech.pivots.iter().enumerate() {
                let e = ech.matrix.entry(r, f);
                if e != 0 {
                    v.set_entry(pc, p - e);
                }
            }
            basis.push(v);
        }
        FpMatrix { p, cols: self.cols, rows: basis }
    }

    /// Some `x` with `m·x = b`, free coordinates set to zero.
    pub fn solve(&self, b: &FpVector) -> Result<FpVector, NoSolution> {
        assert_eq!(b.len(), self.rows.len());
        let mut aug: Vec<FpVector> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&FpVector::from_entries(self.p, &[b.entry(i)])))
            .collect();
        let pivots = row_reduce(self.p, &mut aug, self.cols);
        if aug[pivots.len()..].iter().any(|r| r.entry(self.cols) != 0) {
            return Err(NoSolution);
        }
        let mut x = FpVector::new(self.p, self.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            x.set_entry(pc, aug[r].entry(self.cols));
        }
        Ok(x)
    }

    /// Coordinates on the cokernel of `x ↦ m·x`.
    pub fn cokernel_coords(&self) -> Cokernel {
        let ech = self.transpose().rref();
        let mut is_pivot = vec![false; self.rows.len()];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        let free = (0..self.rows.len()).filter(|&c| !is_pivot[c]).collect();
        Cokernel { echelon: ech, free }
    }
}

/// Projection of the codomain of a matrix onto a complement of its column space.
#[derive(Clone, Debug)]
pub struct Cokernel {
    /// Reduced echelon form of the transpose (rows span the column space).
    pub echelon: EchelonForm,
    /// Codomain coordinates indexing the cokernel basis.
    pub free: Vec<usize>,
}

impl Cokernel {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn project(&self, y: &FpVector) -> FpVector {
        let p = y.prime();
        let mut y = y.clone();
        for (r, &pc) in self.echelon.pivots.iter().enumerate() {
            let c = y.entry(pc);
            if c != 0 {
                y.add_scaled(self.echelon.matrix.row(r), p - c);
            }
        }
        let mut out = FpVector::new(p, self.free.len());
        for (i, &f) in self.free.iter().enumerate() {
            out.set_entry(i, y.entry(f));
        }
        out
    }
}

/// Reduces `rows` to reduced echelon form, pivots among the first `limit`
/// columns. Returns pivot columns; the first `pivots.len()` rows are the
/// pivot rows in order.
pub fn row_reduce(p: u32, rows: &mut [FpVector], limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let n = rows.len();
    if n == 0 {
        return pivots;
    }
    let width = words(rows[0].len()).max(1);
    let mut rank = 0;
    for col in 0..limit {
        if rank == n {
            break;
        }
        let Some(found) = (rank..n).find(|&r| rows[r].entry(col) != 0) else {
            continue;
        };
        rows.swap(rank, found);
        let lead = rows[rank].entry(col);
        if lead != 1 {
            rows[rank].scale(inverse(p, lead));
        }
        let (head, tail) = rows.split_at_mut(rank);
        let (pivot_row, tail) = tail.split_first_mut().unwrap();
        let pivot_row = &*pivot_row;
        let eliminate = |r: &mut FpVector| {
            let c = r.entry(col);
            if c != 0 {
                r.add_scaled_from(pivot_row, p - c, col);
            }
        };
        if n * width >= PAR_THRESHOLD {
            head.par_iter_mut().for_each(eliminate);
            tail.par_iter_mut().for_each(eliminate);
        } else {
            head.iter_mut().for_each(eliminate);
            tail.iter_mut().for_each(eliminate);
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// Image and kernel of a linear map given by the images of a basis.
///
/// `images[i]` is the image of the i-th source basis vector in a target of
/// dimension `target_dim`. Image rows are stored in reduced echelon form along
/// with a preimage for each, which makes `solve` a single pass.
#[derive(Clone, Debug)]
pub struct ImageKernel {
    p: u32,
    target_dim: usize,
    source_dim: usize,
    pub pivots: Vec<usize>,
    image: Vec<FpVector>,
    preimage: Vec<FpVector>,
    pub kernel: Vec<FpVector>,
}

impl ImageKernel {
    pub fn compute(p: u32, target_dim: usize, images: &[FpVector]) -> Self {
        let n = images.len();
        let mut aug: Vec<FpVector> = images
            .iter()
            .enumerate()
            .map(|(i, v)| {
                debug_assert_eq!(v.len(), target_dim);
                let mut w = v.resized(target_dim + n);
                w.set_entry(target_dim + i, 1);
                w
            })
            .collect();
        let pivots = row_reduce(p, &mut aug, target_dim);
        let rank = pivots.len();
        let mut image = Vec::with_capacity(rank);
        let mut preimage = Vec::with_capacity(rank);
        let mut kernel = Vec::with_capacity(n - rank);
        for (i, row) in aug.into_iter().enumerate() {
            if i < rank {
                image.push(row.slice(0, target_dim));
                preimage.push(row.slice(target_dim, target_dim + n));
            } else {
                kernel.push(row.slice(target_dim, target_dim + n));
            }
        }
        ImageKernel { p, target_dim, source_dim: n, pivots, image, preimage, kernel }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn image_rows(&self) -> &[FpVector] {
        &self.image
    }

    /// A source vector mapping to `target`, if any.
    pub fn solve(&self, target: &FpVector) -> Option<FpVector> {
        let mut rest = target.clone();
        let mut x = FpVector::new(self.p, self.source_dim);
        for (r, &pc) in self.pivots.iter().enumerate() {
            let c = rest.entry(pc);
            if c != 0 {
                rest.add_scaled(&self.image[r], self.p - c);
                x.add_scaled(&self.preimage[r], c);
            }
        }
        rest.is_zero().then_some(x)
    }

    /// Reduces `v` modulo the image; zero iff `v` lies in the image.
    pub fn reduce(&self, v: &FpVector) -> FpVector {
        let mut rest = v.clone();
        for (r, &pc) in self.pivots.iter().enumerate() {
            let c = rest.entry(pc);
            if c != 0 {
                rest.add_scaled(&self.image[r], self.p - c);
            }
        }
        rest
    }
}

/// An incrementally grown subspace kept in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    p: u32,
    ambient: usize,
    rows: Vec<FpVector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(p: u32, ambient: usize) -> Self {
        Subspace { p, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors(p: u32, ambient: usize, vs: &[FpVector]) -> Self {
        let mut s = Subspace::new(p, ambient);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[FpVector] {
        &self.rows
    }

    pub fn reduce(&self, v: &FpVector) -> FpVector {
        let mut v = v.clone();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v.entry(pc);
            if c != 0 {
                v.add_scaled(row, self.p - c);
            }
        }
        v
    }

    pub fn contains(&self, v: &FpVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns the reduced vector that enlarged the space, if any.
    pub fn insert(&mut self, v: &FpVector) -> Option<FpVector> {
        let mut r = self.reduce(v);
        let (pc, lead) = r.first_nonzero()?;
        r.scale(inverse(self.p, lead));
        for row in &mut self.rows {
            let c = row.entry(pc);
            if c != 0 {
                row.add_scaled(&r, self.p - c);
            }
        }
        let pos = self.pivots.partition_point(|&x| x < pc);
        self.pivots.insert(pos, pc);
        self.rows.insert(pos, r.clone());
        Some(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(p: u32, rows: &[&[u32]]) -> FpMatrix {
        FpMatrix::from_entries(p, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = FpMatrix::identity(2, 3);
        let e = id.rref();
        assert_eq!(e.matrix, id);
        assert_eq!(e.pivots, vec![0, 1, 2]);
        assert_eq!(e.rank, 3);

        let z = FpMatrix::zero(2, 2, 4);
        let e = z.rref();
        assert!(e.matrix.is_zero());
        assert!(e.pivots.is_empty());
        assert_eq!(e.rank, 0);
    }

    #[test]
    fn rref_two_rows() {
        let e = m(2, &[&[1, 1, 0, 0], &[0, 1, 1, 0]]).rref();
        assert_eq!(e.pivots, vec![0, 1]);
        assert_eq!(e.rank, 2);
        assert_eq!(e.matrix, m(2, &[&[1, 0, 1, 0], &[0, 1, 1, 0]]));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(FpMatrix::zero(2, 2, 3).kernel_basis().rows(), 3);
        assert_eq!(FpMatrix::identity(3, 4).kernel_basis().rows(), 0);
        let a = m(2, &[&[1, 1, 1]]);
        let k = a.kernel_basis();
        assert_eq!(k.rows(), 2);
        // Enumerate F_2^3 to confirm the kernel has exactly 4 elements.
        let mut count = 0;
        for bits in 0..8u32 {
            let x = FpVector::from_entries(2, &[bits & 1, (bits >> 1) & 1, (bits >> 2) & 1]);
            if a.mul_vec(&x).is_zero() {
                count += 1;
            }
        }
        assert_eq!(count, 1 << k.rows());
        for r in k.row_vectors() {
            assert!(a.mul_vec(r).is_zero());
        }
    }

    #[test]
    fn solve_examples() {
        let id = FpMatrix::identity(2, 3);
        let b = FpVector::from_entries(2, &[1, 0, 1]);
        assert_eq!(id.solve(&b).unwrap(), b);
        assert_eq!(FpMatrix::zero(3, 2, 2).solve(&FpVector::from_entries(3, &[1, 0])), Err(NoSolution));
        let a = m(2, &[&[1, 1, 0], &[0, 1, 1]]);
        let b = FpVector::from_entries(2, &[1, 1]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        // x = (0, 1, 0) is the solution with free coordinate x_2 = 0.
        assert_eq!(x, FpVector::from_entries(2, &[0, 1, 0]));
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(FpMatrix::zero(2, 3, 2).cokernel_coords().dim(), 3);
        assert_eq!(FpMatrix::identity(5, 4).cokernel_coords().dim(), 0);
        let c = m(2, &[&[1], &[1], &[0]]).cokernel_coords();
        assert_eq!(c.dim(), 2);
        // The column itself projects to zero.
        assert!(c.project(&FpVector::from_entries(2, &[1, 1, 0])).is_zero());
    }

    #[test]
    fn image_kernel_solve() {
        let images = vec![
            FpVector::from_entries(3, &[1, 2, 0]),
            FpVector::from_entries(3, &[2, 1, 0]),
            FpVector::from_entries(3, &[0, 0, 1]),
        ];
        let ik = ImageKernel::compute(3, 3, &images);
        assert_eq!(ik.rank(), 2);
        assert_eq!(ik.kernel.len(), 1);
        let t = FpVector::from_entries(3, &[2, 1, 2]);
        let x = ik.solve(&t).unwrap();
        let mut y = FpVector::new(3, 3);
        for (i, c) in x.nonzero_entries() {
            y.add_scaled(&images[i], c);
        }
        assert_eq!(y, t);
        assert!(ik.solve(&FpVector::from_entries(3, &[1, 0, 0])).is_none());
    }

    fn arb_matrix(p: u32) -> impl Strategy<Value = FpMatrix> {
        (1usize..9, 1usize..9).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(proptest::collection::vec(0..p, c), r)
                .prop_map(move |e| FpMatrix::from_entries(p, &e))
        })
    }

    fn arb_any() -> impl Strategy<Value = FpMatrix> {
        prop_oneof![arb_matrix(2), arb_matrix(3)]
    }

    /// Generic byte-residue elimination, used to cross-check the packed path.
    fn naive_rank(p: u32, rows: &[Vec<u32>], cols: usize) -> usize {
        let mut a: Vec<Vec<u32>> = rows.to_vec();
        let mut rank = 0;
        for c in 0..cols {
            let Some(f) = (rank..a.len()).find(|&r| !a[r][c].is_multiple_of(p)) else { continue };
            a.swap(rank, f);
            let inv = inverse(p, a[rank][c]);
            for x in a[rank].iter_mut() {
                *x = *x * inv % p;
            }
            for r in 0..a.len() {
                if r != rank && a[r][c] != 0 {
                    let k = a[r][c];
                    for j in 0..cols {
                        a[r][j] = (a[r][j] + (p - k) * a[rank][j]) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn rank_nullity(a in arb_any()) {
            prop_assert_eq!(a.rank() + a.kernel_basis().rows(), a.cols());
        }

        #[test]
        fn rref_idempotent(a in arb_any()) {
            let e = a.rref();
            prop_assert_eq!(e.matrix.rref(), e);
        }

        #[test]
        fn solve_roundtrip(a in arb_any(), seed in proptest::collection::vec(0u32..3, 8)) {
            let p = a.prime();
            let x = FpVector::from_entries(p, &seed[..a.cols()].iter().map(|v| v % p).collect::<Vec<_>>());
            let b = a.mul_vec(&x);
            let y = a.solve(&b).expect("b is in the column space");
            prop_assert_eq!(a.mul_vec(&y), b);
        }

        #[test]
        fn packed_agrees_with_residues(rows in proptest::collection::vec(proptest::collection::vec(0u32..2, 70), 1..12)) {
            let packed = FpMatrix::from_entries(2, &rows);
            prop_assert_eq!(packed.rank(), naive_rank(2, &rows, 70));
            let k = packed.kernel_basis();
            for r in k.row_vectors() {
                prop_assert!(packed.mul_vec(r).is_zero());
            }
        }

        #[test]
        fn kernel_free_coordinates(a in arb_any()) {
            let e = a.rref();
            let free: Vec<usize> = (0..a.cols()).filter(|c| !e.pivots.contains(c)).collect();
            let k = a.kernel_basis();
            for (i, v) in k.row_vectors().iter().enumerate() {
                prop_assert!(a.mul_vec(v).is_zero());
                for (j, &f) in free.iter().enumerate() {
                    prop_assert_eq!(v.entry(f), u32::from(i == j));
                }
            }
        }
    }
}

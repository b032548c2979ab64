use super::Resolution;
use crate::fplin::FpVector;
use std::collections::BTreeMap;

/// An element of Ext^{s,t}, in the basis dual to the level-s generators of
/// degree t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    pub s: usize,
    pub t: i32,
    pub coords: FpVector,
}

impl ExtClass {
    pub fn stem(&self) -> i32 {
        self.t - self.s as i32
    }

    /// (generator index, coefficient) pairs, with generator indices global
    /// to level s.
    pub fn terms(&self, res: &Resolution) -> Vec<(usize, u32)> {
        let start = res.gens_in_degree(self.s, self.t).start;
        self.coords.nonzero_entries().into_iter().map(|(i, c)| (start + i, c)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NameError {
    #[error("cannot name {name}: Ext^({s},{t}) has dimension {dim}")]
    AmbiguousName { name: String, s: usize, t: i32, dim: usize },
    #[error("name {0} is already used")]
    Duplicate(String),
    #[error("bidegree ({s},{t}) is outside the chart")]
    OutOfWindow { s: usize, t: i32 },
}

/// Ext dimensions of a resolution plus named classes.
#[derive(Clone, Debug, Default)]
pub struct NamedChart {
    pub module: String,
    pub prime: u32,
    pub s_max: usize,
    pub t_max: i32,
    pub dims: BTreeMap<(usize, i32), usize>,
    pub names: BTreeMap<String, ExtClass>,
}

impl NamedChart {
    pub fn new(res: &Resolution) -> NamedChart {
        NamedChart {
            module: res.module().name(),
            prime: res.prime(),
            s_max: res.s_max(),
            t_max: res.t_max(),
            dims: res.ext_dims(),
            names: BTreeMap::new(),
        }
    }

    pub fn dim(&self, s: usize, t: i32) -> usize {
        self.dims.get(&(s, t)).copied().unwrap_or(0)
    }

    /// Names the unique basis class at (s, t); the bidegree must be one-dimensional.
    pub fn name(&mut self, name: &str, s: usize, t: i32) -> Result<&ExtClass, NameError> {
        if s > self.s_max || t > self.t_max {
            return Err(NameError::OutOfWindow { s, t });
        }
        let dim = self.dim(s, t);
        if dim != 1 {
            return Err(NameError::AmbiguousName { name: name.to_string(), s, t, dim });
        }
        if self.names.contains_key(name) {
            return Err(NameError::Duplicate(name.to_string()));
        }
        let class = ExtClass { s, t, coords: FpVector::from_entries(self.prime, &[1]) };
        Ok(self.names.entry(name.to_string()).or_insert(class))
    }

    pub fn get(&self, name: &str) -> Option<&ExtClass> {
        self.names.get(name)
    }
}

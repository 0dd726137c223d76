use serde::{Deserialize, Serialize};

use crate::raster::IndexRange;
use crate::{Error, Result};

/// Box of integer output modes, flattened row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeBox {
    ranges: Vec<IndexRange>,
}

impl ModeBox {
    pub fn new(ranges: Vec<IndexRange>) -> Result<Self> {
        if ranges.is_empty() || ranges.len() > 2 {
            return Err(Error::param("modes", format!("need 1 or 2 axes, got {}", ranges.len())));
        }
        Ok(Self { ranges })
    }

    /// `|m_a| ≤ M_a` on every axis.
    pub fn symmetric(extents: &[usize]) -> Result<Self> {
        Self::new(extents.iter().map(|&m| IndexRange::symmetric(m)).collect())
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[IndexRange] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.iter().map(IndexRange::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest `|m|` over all axes.
    pub fn max_abs(&self) -> i64 {
        self.ranges.iter().map(IndexRange::max_abs).max().unwrap_or(0)
    }

    /// Per-axis offsets of flattened mode `k` into each axis range.
    pub fn axis_offsets(&self, k: usize) -> [usize; 2] {
        match self.ranges.as_slice() {
            [_] => [k, 0],
            [_, b] => [k / b.len(), k % b.len()],
            _ => unreachable!(),
        }
    }

    /// Multi-index of flattened mode `k`.
    pub fn mode(&self, k: usize) -> Vec<i64> {
        let off = self.axis_offsets(k);
        self.ranges.iter().zip(off).map(|(r, o)| r.lo + o as i64).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(|k| self.mode(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattening() {
        let b = ModeBox::symmetric(&[1, 2]).unwrap();
        assert_eq!(b.len(), 15);
        assert_eq!(b.mode(0), vec![-1, -2]);
        assert_eq!(b.mode(1), vec![-1, -1]);
        assert_eq!(b.mode(5), vec![0, -2]);
        assert_eq!(b.mode(14), vec![1, 2]);
        assert_eq!(b.max_abs(), 2);
    }
}

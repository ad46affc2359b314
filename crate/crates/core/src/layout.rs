//! Virtual-to-physical qubit assignments.
//!
//! A layout is a full permutation of the backend's physical qubits: the
//! virtual circuit is padded with idle qubits up to the device size before
//! the layout stage, so `map[v]` is defined for every `v < n`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    /// `map[v]` is the physical qubit assigned to virtual qubit `v`.
    map: Vec<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("layout length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("layout is not a permutation: value {value} at position {position}")]
    NotBijective { position: usize, value: usize },
}

impl Layout {
    /// Builds a layout after checking that `map` is a bijection on `0..n`.
    pub fn new(map: Vec<usize>) -> Result<Self, LayoutError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (position, &value) in map.iter().enumerate() {
            if value >= n || seen[value] {
                return Err(LayoutError::NotBijective { position, value });
            }
            seen[value] = true;
        }
        Ok(Layout { map })
    }

    pub fn identity(n: usize) -> Self {
        Layout {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Physical qubit assigned to virtual qubit `v`.
    pub fn physical(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Layout {
        let mut inv = vec![0; self.map.len()];
        for (v, &p) in self.map.iter().enumerate() {
            inv[p] = v;
        }
        Layout { map: inv }
    }
}

/// Pointwise composition: `result[v] = b[a[v]]`.
pub fn compose_layout(a: &Layout, b: &Layout) -> Result<Layout, LayoutError> {
    if a.len() != b.len() {
        return Err(LayoutError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let map = a.map.iter().map(|&p| b.map[p]).collect();
    Ok(Layout { map })
}

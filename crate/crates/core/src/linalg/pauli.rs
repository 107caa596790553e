//! Pauli strings on spin-1/2 chains.
//!
//! Site 0 is the leftmost tensor factor, i.e. the most significant bit of the
//! computational-basis index. `|0⟩ = (1, 0)ᵀ` is the `σ_z = +1` state.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{HermitianOperator, SparseOperator};
use crate::error::{Error, Result};

/// Default cap on chain length for dense embeddings (dimension `2^14`).
pub const MAX_SITES: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn phases(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            other => Err(Error::Unknown {
                kind: "Pauli label",
                name: other.to_string(),
            }),
        }
    }
}

/// Tensor product of single-site Paulis, stored as bit masks.
///
/// The string acts as `i^{n_y} X^{x} Z^{z}` with `Y = iXZ`, so column `b` maps
/// to row `b ^ x_mask` with amplitude `i^{n_y} (-1)^{popcount(b & z_mask)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: usize,
    x_mask: usize,
    z_mask: usize,
    n_y: u32,
}

impl PauliString {
    pub fn new(n_sites: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        Self::with_cap(n_sites, ops, MAX_SITES)
    }

    pub fn with_cap(n_sites: usize, ops: &[(usize, Pauli)], cap: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidInput(
                "a chain needs at least one site".into(),
            ));
        }
        if n_sites > cap {
            return Err(Error::DimensionCap { n_sites, cap });
        }
        let mut seen = 0usize;
        let mut s = Self {
            n_sites,
            x_mask: 0,
            z_mask: 0,
            n_y: 0,
        };
        for &(site, p) in ops {
            if site >= n_sites {
                return Err(Error::SiteOutOfRange { site, n_sites });
            }
            let bit = 1usize << (n_sites - 1 - site);
            if seen & bit != 0 {
                return Err(Error::InvalidInput(format!(
                    "site {site} appears twice in a Pauli string"
                )));
            }
            seen |= bit;
            if p.flips() {
                s.x_mask |= bit;
            }
            if p.phases() {
                s.z_mask |= bit;
            }
            if p == Pauli::Y {
                s.n_y += 1;
            }
        }
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// `(row, col, value)` for every nonzero entry, one per column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let prefactor = match self.n_y % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        (0..self.dim()).map(move |col| {
            let sign = if (col & self.z_mask).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            (col ^ self.x_mask, col, prefactor * sign)
        })
    }

    pub fn to_sparse(&self) -> SparseOperator {
        SparseOperator::from_triplets(self.dim(), self.entries().collect())
            .expect("Pauli string entries are in range")
    }

    pub fn to_dense(&self) -> HermitianOperator {
        self.to_sparse()
            .to_dense()
            .expect("Pauli strings are Hermitian")
    }
}

/// Real-weighted sum of Pauli strings on a common chain.
#[derive(Clone, Debug, Default)]
pub struct PauliSum {
    n_sites: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, weight: f64, ops: &[(usize, Pauli)]) -> Result<&mut Self> {
        self.terms
            .push((weight, PauliString::new(self.n_sites, ops)?));
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_sparse(&self) -> SparseOperator {
        let dim = 1usize << self.n_sites;
        let triplets = self
            .terms
            .iter()
            .flat_map(|(w, s)| s.entries().map(move |(r, c, v)| (r, c, v * *w)))
            .collect();
        SparseOperator::from_triplets(dim, triplets).expect("Pauli string entries are in range")
    }
}

/// `I ⊗ … ⊗ σ_label ⊗ … ⊗ I` with the Pauli at `site` of an `n_sites` chain.
pub fn embed_site_operator(label: Pauli, site: usize, n_sites: usize) -> Result<HermitianOperator> {
    embed_site_operator_capped(label, site, n_sites, MAX_SITES)
}

pub fn embed_site_operator_capped(
    label: Pauli,
    site: usize,
    n_sites: usize,
    cap: usize,
) -> Result<HermitianOperator> {
    Ok(PauliString::with_cap(n_sites, &[(site, label)], cap)?.to_dense())
}

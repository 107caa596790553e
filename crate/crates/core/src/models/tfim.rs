use super::{periodic_bonds, ConstantDef, Constants, ModelFamily, ParametricHamiltonian, Term};
use crate::error::{Error, Result};
use crate::linalg::{Pauli, PauliSum};

/// Periodic transverse-field Ising chain, `H = −J Σ σˣᵢσˣᵢ₊₁ − B Σ σᶻᵢ`.
pub struct Tfim;

pub const TFIM_SITES: std::ops::RangeInclusive<usize> = 2..=12;

impl ModelFamily for Tfim {
    fn name(&self) -> &'static str {
        "tfim"
    }

    fn description(&self) -> &'static str {
        "periodic transverse-field Ising chain with field parameter b"
    }

    fn constants(&self) -> Vec<ConstantDef> {
        vec![
            ConstantDef::number("j", 10.0, "Ising coupling"),
            ConstantDef::number("n", 4.0, "number of sites, 2..=12"),
        ]
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["b"]
    }

    fn build(&self, constants: &Constants) -> Result<ParametricHamiltonian> {
        let j = constants.number("j")?;
        let n = constants.count("n")?;
        if !TFIM_SITES.contains(&n) {
            return Err(Error::InvalidModel(format!(
                "tfim supports 2..=12 sites, got {n}"
            )));
        }
        let mut coupling = PauliSum::new(n);
        for (a, b) in periodic_bonds(n) {
            coupling.push(1.0, &[(a, Pauli::X), (b, Pauli::X)])?;
        }
        let mut field = PauliSum::new(n);
        for i in 0..n {
            field.push(1.0, &[(i, Pauli::Z)])?;
        }
        let terms = vec![
            Term::constant("coupling", coupling.to_sparse(), -j),
            Term::smooth("field", field.to_sparse(), |p| -p[0], |_, _| -1.0),
        ];
        ParametricHamiltonian::new(1 << n, terms)
    }
}

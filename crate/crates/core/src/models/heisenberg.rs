use super::{periodic_bonds, ConstantDef, Constants, ModelFamily, ParametricHamiltonian, Term};
use crate::error::{Error, Result};
use crate::linalg::{Pauli, PauliSum};

/// Periodic Heisenberg ring in a rotating field,
/// `H = −J Σ σᵢ·σᵢ₊₁ − Σ h(θ)·σᵢ` with `h = (sin θ, 0, cos θ)`.
pub struct Heisenberg;

pub const HEISENBERG_SITES: std::ops::RangeInclusive<usize> = 2..=10;

impl ModelFamily for Heisenberg {
    fn name(&self) -> &'static str {
        "heisenberg"
    }

    fn description(&self) -> &'static str {
        "periodic isotropic Heisenberg ring in a unit field tilted by theta in the x–z plane"
    }

    fn constants(&self) -> Vec<ConstantDef> {
        vec![
            ConstantDef::number("j", -0.3, "exchange coupling"),
            ConstantDef::number("n", 4.0, "number of sites, 2..=10"),
        ]
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["theta"]
    }

    fn build(&self, constants: &Constants) -> Result<ParametricHamiltonian> {
        let j = constants.number("j")?;
        let n = constants.count("n")?;
        if !HEISENBERG_SITES.contains(&n) {
            return Err(Error::InvalidModel(format!(
                "heisenberg supports 2..=10 sites, got {n}"
            )));
        }
        let mut exchange = PauliSum::new(n);
        for (a, b) in periodic_bonds(n) {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                exchange.push(1.0, &[(a, p), (b, p)])?;
            }
        }
        let mut field_x = PauliSum::new(n);
        let mut field_z = PauliSum::new(n);
        for i in 0..n {
            field_x.push(1.0, &[(i, Pauli::X)])?;
            field_z.push(1.0, &[(i, Pauli::Z)])?;
        }
        let terms = vec![
            Term::constant("exchange", exchange.to_sparse(), -j),
            Term::smooth(
                "field_x",
                field_x.to_sparse(),
                |p| -p[0].sin(),
                |p, _| -p[0].cos(),
            ),
            Term::smooth(
                "field_z",
                field_z.to_sparse(),
                |p| -p[0].cos(),
                |p, _| p[0].sin(),
            ),
        ];
        ParametricHamiltonian::new(1 << n, terms)
    }
}

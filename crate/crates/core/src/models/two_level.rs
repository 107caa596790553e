use super::{ConstantDef, Constants, ModelFamily, ParametricHamiltonian, Term};
use crate::error::{Error, Result};
use crate::linalg::{Pauli, PauliString};

/// `H = B n̂(θ, φ)·σ` with `n̂ = (sin θ cos φ, sin θ sin φ, cos θ)`.
pub struct TwoLevel;

pub(crate) fn positive_field(constants: &Constants, family: &str) -> Result<f64> {
    let b = constants.number("b")?;
    if b <= 0.0 {
        return Err(Error::InvalidModel(format!(
            "`{family}` needs b > 0, got {b}"
        )));
    }
    Ok(b)
}

pub(crate) fn sigma(p: Pauli) -> crate::linalg::SparseOperator {
    PauliString::new(1, &[(0, p)])
        .expect("single site")
        .to_sparse()
}

impl ModelFamily for TwoLevel {
    fn name(&self) -> &'static str {
        "two-level"
    }

    fn description(&self) -> &'static str {
        "spin-1/2 in a field of magnitude b along (θ, φ)"
    }

    fn constants(&self) -> Vec<ConstantDef> {
        vec![ConstantDef::number("b", 1.0, "field magnitude, > 0")]
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["theta", "phi"]
    }

    fn build(&self, constants: &Constants) -> Result<ParametricHamiltonian> {
        let b = positive_field(constants, self.name())?;
        let terms = vec![
            Term::smooth(
                "x",
                sigma(Pauli::X),
                move |p| b * p[0].sin() * p[1].cos(),
                move |p, w| match w {
                    0 => b * p[0].cos() * p[1].cos(),
                    _ => -b * p[0].sin() * p[1].sin(),
                },
            ),
            Term::smooth(
                "y",
                sigma(Pauli::Y),
                move |p| b * p[0].sin() * p[1].sin(),
                move |p, w| match w {
                    0 => b * p[0].cos() * p[1].sin(),
                    _ => b * p[0].sin() * p[1].cos(),
                },
            ),
            Term::smooth(
                "z",
                sigma(Pauli::Z),
                move |p| b * p[0].cos(),
                move |p, w| match w {
                    0 => -b * p[0].sin(),
                    _ => 0.0,
                },
            ),
        ];
        ParametricHamiltonian::new(2, terms)
    }
}

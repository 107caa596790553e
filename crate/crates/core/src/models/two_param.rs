use super::two_level::{positive_field, sigma};
use super::{ConstantDef, Constants, ModelFamily, ParametricHamiltonian, Term};
use crate::error::Result;
use crate::linalg::Pauli;

/// `H = B n̂(x, y)·σ` with
/// `n̂ = (sin(x+y) cos(xy), sin(x+y) sin(xy), cos(x+y))`.
///
/// Unlike the (θ, φ) family this one has a nonzero off-diagonal metric.
pub struct TwoParamTwoLevel;

impl ModelFamily for TwoParamTwoLevel {
    fn name(&self) -> &'static str {
        "two-param"
    }

    fn description(&self) -> &'static str {
        "spin-1/2 whose field direction mixes two parameters x and y"
    }

    fn constants(&self) -> Vec<ConstantDef> {
        vec![ConstantDef::number("b", 1.0, "field magnitude, > 0")]
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["x", "y"]
    }

    fn build(&self, constants: &Constants) -> Result<ParametricHamiltonian> {
        let b = positive_field(constants, self.name())?;
        let terms = vec![
            Term::opaque("x", sigma(Pauli::X), move |p| {
                b * (p[0] + p[1]).sin() * (p[0] * p[1]).cos()
            }),
            Term::opaque("y", sigma(Pauli::Y), move |p| {
                b * (p[0] + p[1]).sin() * (p[0] * p[1]).sin()
            }),
            Term::opaque("z", sigma(Pauli::Z), move |p| b * (p[0] + p[1]).cos()),
        ];
        ParametricHamiltonian::new(2, terms)
    }
}

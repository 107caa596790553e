use std::f64::consts::TAU;

use super::{ConstantDef, Constants, ModelFamily, ParametricHamiltonian, Term};
use crate::error::{Error, Result};
use crate::linalg::{Pauli, PauliString, SparseOperator};

/// NV electron spin (σ) coupled to a ¹³C nuclear spin (τ), rotating frame:
///
/// ```text
/// H = Ω/2 [cos θ σ_z + sin θ (cos φ σ_d + sin φ σ_y)]
///   + (γₙB∥/2 − A_z/4) τ_z − A_x/4 τ_x − A_z/4 σ_z τ_z − A_x/4 σ_z τ_x
/// ```
///
/// `σ_d` is `σ_x` by default (`drive = "x"`); `drive = "z"` selects the
/// literal `σ_z` variant. Frequencies are given in MHz and stored as angular
/// frequencies in rad/µs, so times are in µs.
pub struct NvTwoQubit;

fn op(ops: &[(usize, Pauli)]) -> SparseOperator {
    PauliString::new(2, ops)
        .expect("two-qubit string")
        .to_sparse()
}

impl ModelFamily for NvTwoQubit {
    fn name(&self) -> &'static str {
        "nv"
    }

    fn description(&self) -> &'static str {
        "NV electron spin hyperfine-coupled to a nuclear spin, rotating frame"
    }

    fn constants(&self) -> Vec<ConstantDef> {
        vec![
            ConstantDef::number("a_x", 2.79, "transverse hyperfine coupling, MHz"),
            ConstantDef::number("a_z", 11.832, "longitudinal hyperfine coupling, MHz"),
            ConstantDef::number("omega_mw", 2.13, "microwave Rabi frequency, MHz"),
            ConstantDef::number(
                "gamma_n_b",
                1.07 * 0.74932,
                "nuclear Larmor frequency γₙB∥, MHz",
            ),
            ConstantDef::text("drive", "x", "transverse drive axis at φ = 0: `x` or `z`"),
        ]
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["theta", "phi"]
    }

    fn build(&self, constants: &Constants) -> Result<ParametricHamiltonian> {
        let a_x = TAU * constants.number("a_x")?;
        let a_z = TAU * constants.number("a_z")?;
        let omega = TAU * constants.number("omega_mw")?;
        let larmor = TAU * constants.number("gamma_n_b")?;
        let drive = match constants.text("drive")? {
            "x" => Pauli::X,
            "z" => Pauli::Z,
            other => {
                return Err(Error::InvalidModel(format!(
                    "nv drive must be `x` or `z`, got `{other}`"
                )))
            }
        };
        let half = omega / 2.0;
        let terms = vec![
            Term::opaque("drive_z", op(&[(0, Pauli::Z)]), move |p| half * p[0].cos()),
            Term::opaque("drive_c", op(&[(0, drive)]), move |p| {
                half * p[0].sin() * p[1].cos()
            }),
            Term::opaque("drive_s", op(&[(0, Pauli::Y)]), move |p| {
                half * p[0].sin() * p[1].sin()
            }),
            Term::constant("nuclear_z", op(&[(1, Pauli::Z)]), larmor / 2.0 - a_z / 4.0),
            Term::constant("nuclear_x", op(&[(1, Pauli::X)]), -a_x / 4.0),
            Term::constant(
                "hyperfine_zz",
                op(&[(0, Pauli::Z), (1, Pauli::Z)]),
                -a_z / 4.0,
            ),
            Term::constant(
                "hyperfine_zx",
                op(&[(0, Pauli::Z), (1, Pauli::X)]),
                -a_x / 4.0,
            ),
        ];
        ParametricHamiltonian::new(4, terms)
    }
}

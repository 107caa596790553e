//! Parameterized Hamiltonian families.
//!
//! Each family implements [`ModelFamily`] and is registered by name in a
//! [`ModelRegistry`]. Building a [`ModelSpec`] through the registry yields a
//! [`Model`]: the family's parameter names plus a [`ParametricHamiltonian`].

mod hamiltonian;
mod heisenberg;
mod nv;
mod spec;
mod tfim;
mod two_level;
mod two_param;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use hamiltonian::{ParametricHamiltonian, Term};
pub use heisenberg::Heisenberg;
pub use nv::NvTwoQubit;
pub use spec::{ConstValue, ConstantDef, Constants, ModelSpec};
pub use tfim::Tfim;
pub use two_level::TwoLevel;
pub use two_param::TwoParamTwoLevel;

use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, SparseOperator};

/// A family of Hamiltonians `H(params)` sharing fixed constants.
pub trait ModelFamily: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn constants(&self) -> Vec<ConstantDef>;

    fn param_names(&self) -> &'static [&'static str];

    fn build(&self, constants: &Constants) -> Result<ParametricHamiltonian>;
}

/// Name → family lookup.
#[derive(Clone, Default)]
pub struct ModelRegistry {
    families: BTreeMap<&'static str, Arc<dyn ModelFamily>>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding the five built-in families.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(TwoLevel));
        r.register(Arc::new(TwoParamTwoLevel));
        r.register(Arc::new(NvTwoQubit));
        r.register(Arc::new(Tfim));
        r.register(Arc::new(Heisenberg));
        r
    }

    pub fn register(&mut self, family: Arc<dyn ModelFamily>) -> Option<Arc<dyn ModelFamily>> {
        self.families.insert(family.name(), family)
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn ModelFamily>> {
        self.families.get(name).ok_or_else(|| Error::Unknown {
            kind: "model",
            name: name.to_string(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.families.keys().copied()
    }

    pub fn build(&self, spec: &ModelSpec) -> Result<Model> {
        let family = self.get(&spec.variant)?;
        let constants = Constants::resolve(family.name(), &family.constants(), &spec.constants)?;
        let hamiltonian = family.build(&constants)?;
        Ok(Model {
            spec: ModelSpec {
                variant: family.name().to_string(),
                constants: constants.into_map(),
            },
            param_names: family.param_names(),
            hamiltonian,
        })
    }
}

/// Builds a spec against the built-in registry.
pub fn build(spec: &ModelSpec) -> Result<Model> {
    ModelRegistry::builtin().build(spec)
}

/// A concrete Hamiltonian family member with resolved constants.
#[derive(Clone, Debug)]
pub struct Model {
    spec: ModelSpec,
    param_names: &'static [&'static str],
    hamiltonian: ParametricHamiltonian,
}

impl Model {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.variant
    }

    pub fn param_names(&self) -> &[&'static str] {
        self.param_names
    }

    pub fn n_params(&self) -> usize {
        self.param_names.len()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn parametric(&self) -> &ParametricHamiltonian {
        &self.hamiltonian
    }

    pub fn param_index(&self, name: &str) -> Result<usize> {
        self.param_names
            .iter()
            .position(|p| *p == name)
            .ok_or_else(|| {
                Error::InvalidParams(format!("model `{}` has no parameter `{name}`", self.name()))
            })
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::InvalidParams(format!(
                "model `{}` takes {} parameters ({}), got {}",
                self.name(),
                self.n_params(),
                self.param_names.join(", "),
                params.len()
            )));
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite parameter {p}")));
        }
        Ok(())
    }

    fn check_which(&self, which: usize) -> Result<()> {
        if which >= self.n_params() {
            return Err(Error::InvalidParams(format!(
                "parameter index {which} out of range for model `{}` with {} parameters",
                self.name(),
                self.n_params()
            )));
        }
        Ok(())
    }

    pub fn hamiltonian(&self, params: &[f64]) -> Result<HermitianOperator> {
        self.check_params(params)?;
        self.hamiltonian.dense(params)
    }

    /// `∂H/∂λ_which`.
    ///
    /// Terms with closed-form coefficient gradients are differentiated
    /// exactly; the others by a central difference of their coefficient with
    /// step `1e-5·max(1, |λ|)`.
    pub fn d_hamiltonian(&self, params: &[f64], which: usize) -> Result<HermitianOperator> {
        self.check_params(params)?;
        self.check_which(which)?;
        let step = 1e-5 * params[which].abs().max(1.0);
        self.hamiltonian.derivative(params, which, step)
    }

    /// Central difference of the whole matrix, re-symmetrized; a check on
    /// [`Self::d_hamiltonian`].
    pub fn d_hamiltonian_fd(&self, params: &[f64], which: usize) -> Result<HermitianOperator> {
        self.check_params(params)?;
        self.check_which(which)?;
        let h = 1e-5 * params[which].abs().max(1.0);
        let mut plus = params.to_vec();
        let mut minus = params.to_vec();
        plus[which] += h;
        minus[which] -= h;
        let step = plus[which] - minus[which];
        let hp = self.hamiltonian.dense(&plus)?;
        let hm = self.hamiltonian.dense(&minus)?;
        Ok(HermitianOperator::symmetrized(
            (hp.into_matrix() - hm.into_matrix()).unscale(step),
        ))
    }

    /// The same model with `H → H + c·I`.
    pub fn shifted(&self, c: f64) -> Model {
        let mut hamiltonian = self.hamiltonian.clone();
        hamiltonian
            .push(Term::constant(
                "shift",
                SparseOperator::identity(self.dim()),
                c,
            ))
            .expect("identity matches the model dimension");
        Model {
            spec: self.spec.clone(),
            param_names: self.param_names,
            hamiltonian,
        }
    }
}

/// Periodic nearest-neighbour bonds `(i, i+1 mod n)`.
pub(crate) fn periodic_bonds(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).map(move |i| (i, (i + 1) % n))
}

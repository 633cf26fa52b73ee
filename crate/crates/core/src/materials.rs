//! Material parameter pipeline: derives the rod model's coefficients from
//! physical constants in exact rational arithmetic. No rounding happens
//! here; floats appear only at the evaluation boundary in other modules.

use crate::rational::{rat_serde, rat_to_string, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Physical inputs: Lamé coefficients, constitutive constants, density,
/// characteristic speed, and the two small model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialConstants {
    #[serde(with = "rat_serde")]
    pub lambda1: Rat,
    #[serde(with = "rat_serde")]
    pub mu1: Rat,
    #[serde(with = "rat_serde")]
    pub nu1: Rat,
    #[serde(with = "rat_serde")]
    pub nu2: Rat,
    #[serde(with = "rat_serde")]
    pub nu4: Rat,
    #[serde(with = "rat_serde")]
    pub rho: Rat,
    #[serde(with = "rat_serde")]
    pub c: Rat,
    #[serde(with = "rat_serde")]
    pub delta: Rat,
    #[serde(with = "rat_serde")]
    pub epsilon: Rat,
}

/// Derived coefficients. All fields exact rationals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParameters {
    #[serde(with = "rat_serde")]
    pub n1: Rat,
    #[serde(with = "rat_serde")]
    pub beta1: Rat,
    #[serde(with = "rat_serde")]
    pub alpha1: Rat,
    #[serde(with = "rat_serde")]
    pub alpha2: Rat,
    #[serde(with = "rat_serde")]
    pub c1: Rat,
    #[serde(with = "rat_serde")]
    pub c2: Rat,
    #[serde(with = "rat_serde")]
    pub kappa1: Rat,
    #[serde(with = "rat_serde")]
    pub kappa3: Rat,
    #[serde(with = "rat_serde")]
    pub kappa5: Rat,
    #[serde(with = "rat_serde")]
    pub kappa6: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaterialError {
    /// lambda1 = 0 makes n1 = 0 and the c2 formula divides by n1.
    #[error("ZeroPoissonRatio: lambda1 = 0 makes n1 vanish and c2 undefined")]
    ZeroPoissonRatio,
    #[error("InvalidConstants: {field} violates `{requirement}`")]
    InvalidConstants {
        field: &'static str,
        requirement: &'static str,
    },
}

impl MaterialConstants {
    fn validate(&self) -> Result<(), MaterialError> {
        let bad = |field, requirement| Err(MaterialError::InvalidConstants { field, requirement });
        if !self.mu1.is_positive() {
            return bad("mu1", "mu1 > 0");
        }
        if !self.rho.is_positive() {
            return bad("rho", "rho > 0");
        }
        if self.c.is_zero() {
            return bad("c", "c != 0");
        }
        if (&self.lambda1 + &self.mu1).is_zero() {
            return bad("lambda1", "lambda1 + mu1 != 0");
        }
        if self.delta.is_zero() {
            return bad("delta", "delta != 0");
        }
        if self.epsilon.is_zero() {
            return bad("epsilon", "epsilon != 0");
        }
        if self.lambda1.is_zero() {
            return Err(MaterialError::ZeroPoissonRatio);
        }
        Ok(())
    }
}

/// Derive all coefficients. Exact in, exact out.
pub fn derive_parameters(mc: &MaterialConstants) -> Result<DerivedParameters, MaterialError> {
    mc.validate()?;
    let two = Rat::from_integer(2.into());
    let three = Rat::from_integer(3.into());
    let four = Rat::from_integer(4.into());

    let lam_plus_mu = &mc.lambda1 + &mc.mu1;
    let n1 = &mc.lambda1 / (&two * &lam_plus_mu);

    let kappa1 =
        &two * (&lam_plus_mu + &two * &mc.nu1 + &four * &mc.nu2 / &three + &mc.nu4 / &three);
    let kappa3 = &mc.lambda1 + &two * &mc.nu1 + &four * &mc.nu2;
    let kappa5 = &mc.lambda1 + &two * &mc.nu1 + &two * &mc.nu2;
    let kappa6 = &mc.lambda1 / &two + &mc.mu1 + &mc.nu1 + &mc.nu2 / &three + &mc.nu4 / &three;

    let n1sq = &n1 * &n1;
    let c1 = &two * &lam_plus_mu * &n1sq - &two * &mc.lambda1 * &n1 + &mc.lambda1 / &two + &mc.mu1;
    let c2 = -&kappa1 * &n1sq + &kappa3 * &n1 - &kappa5 + &kappa6 / &n1;

    let beta1 = &mc.rho * &mc.c * &mc.c / &mc.mu1;
    let beta1_mu1 = &beta1 * &mc.mu1;
    let alpha1 = &two * &c1 / &beta1_mu1;
    let alpha2 = &c2 / &beta1_mu1;

    Ok(DerivedParameters {
        n1,
        beta1,
        alpha1,
        alpha2,
        c1,
        c2,
        kappa1,
        kappa3,
        kappa5,
        kappa6,
    })
}

impl DerivedParameters {
    /// Ordered (name, "p/q") pairs for display and JSON table output.
    pub fn as_fraction_rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n1", rat_to_string(&self.n1)),
            ("kappa1", rat_to_string(&self.kappa1)),
            ("kappa3", rat_to_string(&self.kappa3)),
            ("kappa5", rat_to_string(&self.kappa5)),
            ("kappa6", rat_to_string(&self.kappa6)),
            ("c1", rat_to_string(&self.c1)),
            ("c2", rat_to_string(&self.c2)),
            ("beta1", rat_to_string(&self.beta1)),
            ("alpha1", rat_to_string(&self.alpha1)),
            ("alpha2", rat_to_string(&self.alpha2)),
        ]
    }
}

/// First reference constant set used by the 2D configurations.
pub fn reference_set_a() -> MaterialConstants {
    use crate::rational::rat;
    MaterialConstants {
        lambda1: rat(3, 2),
        mu1: rat(5, 2),
        nu1: rat(2, 1),
        nu2: rat(3, 1),
        nu4: rat(5, 1),
        rho: rat(3, 1),
        c: rat(4, 1),
        delta: rat(5, 2),
        epsilon: rat(7, 2),
    }
}

/// Second reference constant set used by the 3D configurations.
pub fn reference_set_b() -> MaterialConstants {
    use crate::rational::rat;
    MaterialConstants {
        lambda1: rat(3, 4),
        mu1: rat(5, 4),
        nu1: rat(1, 1),
        nu2: rat(2, 1),
        nu4: rat(4, 1),
        rho: rat(5, 2),
        c: rat(7, 2),
        delta: rat(1, 1),
        epsilon: rat(2, 1),
    }
}

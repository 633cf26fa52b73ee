//! Registry of the fifteen closed-form traveling-wave families.
//!
//! Each family couples a coefficient set (closed formulas in the material
//! parameters and the free wave constants) to an evaluation rule built from
//! one of the hyperbolic, trigonometric, exponential, or constant profiles.
//! The registry enumerates every published (method, case, profile, sign)
//! combination, gates each one behind its validity constraints, and exposes
//! pointwise evaluation both as a complex number and as an order-4 jet in
//! the traveling coordinate xi = mu (x - lambda t).

use crate::jet::{Complex64, Jet, JetError, DEFAULT_POLE_FLOOR};
use crate::materials::{derive_parameters, DerivedParameters, MaterialConstants, MaterialError};
use crate::rational::{rat_to_f64, Rat};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

// -------------------- identifiers --------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SineGordon,
    Mefm,
}

impl Method {
    fn token(self) -> &'static str {
        match self {
            Method::SineGordon => "sg",
            Method::Mefm => "mefm",
        }
    }
}

/// Profile the solution is written in. For the sine-Gordon families this is
/// the realization of the auxiliary flow; for the exp-function families it
/// is the auxiliary solution set the case composes with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Tanh,
    Coth,
    Tan,
    Exp,
    Rational,
}

impl Variant {
    fn token(self) -> &'static str {
        match self {
            Variant::Tanh => "tanh",
            Variant::Coth => "coth",
            Variant::Tan => "tan",
            Variant::Exp => "exp",
            Variant::Rational => "rational",
        }
    }
}

/// Sign choice for the dependent wave constant(s). Families whose lambda is
/// computed take the sign on lambda, families whose mu is computed take it
/// on mu; Cases 11-12 compute both and flip both together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn token(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyId {
    pub method: Method,
    pub case_no: u8,
    pub variant: Variant,
    pub branch: Branch,
}

impl FamilyId {
    pub fn new(method: Method, case_no: u8, variant: Variant, branch: Branch) -> FamilyId {
        FamilyId {
            method,
            case_no,
            variant,
            branch,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.case{}.{}.{}",
            self.method.token(),
            self.case_no,
            self.variant.token(),
            self.branch.token()
        )
    }
}

impl FromStr for FamilyId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<FamilyId, CatalogError> {
        let unknown = || CatalogError::UnknownFamily { id: s.to_string() };
        let parts: Vec<&str> = s.split('.').collect();
        if parts.len() != 4 {
            return Err(unknown());
        }
        let method = match parts[0] {
            "sg" => Method::SineGordon,
            "mefm" => Method::Mefm,
            _ => return Err(unknown()),
        };
        let case_no: u8 = parts[1]
            .strip_prefix("case")
            .and_then(|n| n.parse().ok())
            .ok_or_else(unknown)?;
        let variant = match parts[2] {
            "tanh" => Variant::Tanh,
            "coth" => Variant::Coth,
            "tan" => Variant::Tan,
            "exp" => Variant::Exp,
            "rational" => Variant::Rational,
            _ => return Err(unknown()),
        };
        let branch = match parts[3] {
            "plus" => Branch::Plus,
            "minus" => Branch::Minus,
            _ => return Err(unknown()),
        };
        let id = FamilyId::new(method, case_no, variant, branch);
        if family_info(&id).is_none() {
            return Err(unknown());
        }
        Ok(id)
    }
}

impl Serialize for FamilyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FamilyId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<FamilyId, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Topological,
    Singular,
    CompoundTopologicalNontopological,
    CompoundSingular,
    SolitonLike,
    SingularPeriodic,
    Exponential,
    Rational,
}

// -------------------- inputs --------------------

/// Material data a family evaluation needs: the derived wave coefficients
/// plus the two expansion constants that scale the dispersive and nonlinear
/// terms (they appear in the closed forms but are raw inputs, not derived).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialInputs {
    pub derived: DerivedParameters,
    #[serde(with = "crate::rational::rat_serde")]
    pub delta: Rat,
    #[serde(with = "crate::rational::rat_serde")]
    pub epsilon: Rat,
}

impl MaterialInputs {
    pub fn from_constants(mc: &MaterialConstants) -> Result<MaterialInputs, MaterialError> {
        Ok(MaterialInputs {
            derived: derive_parameters(mc)?,
            delta: mc.delta.clone(),
            epsilon: mc.epsilon.clone(),
        })
    }
}

/// Free parameters of a family. Only the fields a family declares free are
/// read; everything else is computed. `list_families` names the free fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyInputs {
    pub material: MaterialInputs,
    /// wave number, free for the sine-Gordon families and Cases 9-15
    pub mu: f64,
    /// wave speed, free for Cases 7-8 and 15
    pub lambda: f64,
    /// auxiliary flow constants (exp-function families only)
    pub tau: f64,
    pub sigma: f64,
    /// integration constant inside the profile argument
    pub e: f64,
    /// free denominator coefficients (exp-function families only)
    pub q0: f64,
    pub q1: f64,
}

impl FamilyInputs {
    pub fn new(material: MaterialInputs) -> FamilyInputs {
        FamilyInputs {
            material,
            mu: 0.25,
            lambda: 2.0,
            tau: 2.5,
            sigma: 0.5,
            e: 2.0,
            q0: 2.0,
            q1: 2.0,
        }
    }
}

// -------------------- errors --------------------

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("UnknownFamily: {id} is not a published combination")]
    UnknownFamily { id: String },
    #[error("ConstraintViolated: {family} requires {predicate}")]
    ConstraintViolated { family: String, predicate: String },
    #[error("DegenerateDenominator: {family} has {denominator} = 0")]
    DegenerateDenominator { family: String, denominator: String },
    #[error("SingularPoint: {family} at xi = {xi}: {detail}")]
    SingularPoint {
        family: String,
        xi: Complex64,
        detail: String,
    },
}

// -------------------- coefficient sets --------------------

/// Closed-form coefficients with the branch sign already applied to the
/// dependent wave constants. Free constants are echoed so a coefficient set
/// is self-contained for evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoefficientSet {
    SineGordon {
        a0: Complex64,
        a1: Complex64,
        a2: Complex64,
        b1: Complex64,
        b2: Complex64,
        lambda: Complex64,
        mu: Complex64,
    },
    Mefm {
        p: [Complex64; 4],
        q0: Complex64,
        q1: Complex64,
        lambda: Complex64,
        mu: Complex64,
        /// quartic combination the Cases 11-12 radicals are built from
        big_lambda: Option<Complex64>,
    },
}

impl CoefficientSet {
    pub fn lambda(&self) -> Complex64 {
        match self {
            CoefficientSet::SineGordon { lambda, .. } => *lambda,
            CoefficientSet::Mefm { lambda, .. } => *lambda,
        }
    }
    pub fn mu(&self) -> Complex64 {
        match self {
            CoefficientSet::SineGordon { mu, .. } => *mu,
            CoefficientSet::Mefm { mu, .. } => *mu,
        }
    }
}

// -------------------- registry --------------------

#[derive(Debug, Clone, Serialize)]
pub struct FamilyInfo {
    pub id: FamilyId,
    pub classification: Classification,
    /// names of the FamilyInputs fields this family actually reads
    pub free_parameters: &'static [&'static str],
    /// human-readable validity predicate, also the gate evaluate enforces
    pub constraint: &'static str,
}

const SG_FREE: &[&str] = &["mu"];
const MEFM_LAMBDA_FREE: &[&str] = &["lambda", "tau", "sigma", "e", "q0", "q1"];
const MEFM_MU_FREE: &[&str] = &["mu", "tau", "sigma", "e", "q0", "q1"];
const MEFM_MU_Q_FREE: &[&str] = &["mu", "tau", "sigma", "q1"];
const MEFM_EXP_FREE: &[&str] = &["mu", "tau", "e", "q0", "q1"];
const MEFM_CONST_FREE: &[&str] = &["lambda", "mu", "tau"];

fn classification_for(case_no: u8, variant: Variant) -> Classification {
    match (case_no, variant) {
        (1 | 2, Variant::Tanh) => Classification::Topological,
        (1 | 2, Variant::Coth) => Classification::Singular,
        (3..=6, Variant::Tanh) => Classification::CompoundTopologicalNontopological,
        (3..=6, Variant::Coth) => Classification::CompoundSingular,
        (7..=12, Variant::Tanh) => Classification::SolitonLike,
        (7 | 8 | 11 | 12, Variant::Tan) => Classification::SingularPeriodic,
        (9 | 10 | 15, Variant::Rational) => Classification::Rational,
        (13 | 14, Variant::Exp) => Classification::Exponential,
        _ => unreachable!("unpublished combination"),
    }
}

fn published_variants(method: Method, case_no: u8) -> &'static [Variant] {
    match (method, case_no) {
        (Method::SineGordon, 1..=6) => &[Variant::Tanh, Variant::Coth],
        (Method::Mefm, 7 | 8 | 11 | 12) => &[Variant::Tanh, Variant::Tan],
        (Method::Mefm, 9 | 10) => &[Variant::Tanh, Variant::Rational],
        (Method::Mefm, 13 | 14) => &[Variant::Exp],
        (Method::Mefm, 15) => &[Variant::Rational],
        _ => &[],
    }
}

fn branches_for(method: Method, case_no: u8) -> &'static [Branch] {
    // Case 15 has no dependent constant, so no sign to choose.
    if method == Method::Mefm && case_no == 15 {
        &[Branch::Plus]
    } else {
        &[Branch::Plus, Branch::Minus]
    }
}

fn free_parameters_for(method: Method, case_no: u8) -> &'static [&'static str] {
    match method {
        Method::SineGordon => SG_FREE,
        Method::Mefm => match case_no {
            7 | 8 => MEFM_LAMBDA_FREE,
            9 | 10 => MEFM_MU_Q_FREE,
            11 | 12 => MEFM_MU_FREE,
            13 | 14 => MEFM_EXP_FREE,
            _ => MEFM_CONST_FREE,
        },
    }
}

fn constraint_for(method: Method, case_no: u8, variant: Variant) -> &'static str {
    match method {
        Method::SineGordon => match case_no {
            1 => "1 + 2*delta*n1^2*mu^2 != 0",
            2 => "2*delta*n1^2*mu^2 - 1 != 0",
            3 | 4 => "delta*n1^2*mu^2 - 2 != 0",
            _ => "delta*n1^2*mu^2 + 2 != 0",
        },
        Method::Mefm => match (case_no, variant) {
            (7 | 8, Variant::Tanh) => "sigma != 0, tau^2 - 4*sigma > 0, lambda^2*beta1 != 1",
            (7 | 8, Variant::Tan) => "sigma != 0, tau^2 - 4*sigma < 0, lambda^2*beta1 != 1",
            (9 | 10, Variant::Tanh) => {
                "sigma != 0, tau^2 - 4*sigma > 0, 2 + delta*n1^2*mu^2*(tau^2-4*sigma) != 0"
            }
            (9 | 10, Variant::Rational) => {
                "sigma != 0, tau^2 - 4*sigma < 0, 2 + delta*n1^2*mu^2*(tau^2-4*sigma) != 0"
            }
            (11 | 12, Variant::Tanh) => "sigma != 0, tau^2 - 4*sigma > 0, Lambda != 0",
            (11 | 12, Variant::Tan) => "sigma != 0, tau^2 - 4*sigma < 0, Lambda != 0",
            (13, _) => "tau != 0 (sigma = 0 flow), delta*n1^2*mu^2*tau^2 - 2 != 0",
            (14, _) => "tau != 0 (sigma = 0 flow), delta*n1^2*mu^2*tau^2 + 2 != 0",
            _ => "tau != 0 (sigma = 0 flow)",
        },
    }
}

/// Every published family in stable (method, case, variant, branch) order.
pub fn list_families() -> Vec<FamilyInfo> {
    let mut out = Vec::new();
    for (method, cases) in [(Method::SineGordon, 1u8..=6), (Method::Mefm, 7u8..=15)] {
        for case_no in cases {
            for &variant in published_variants(method, case_no) {
                for &branch in branches_for(method, case_no) {
                    let id = FamilyId::new(method, case_no, variant, branch);
                    out.push(FamilyInfo {
                        id,
                        classification: classification_for(case_no, variant),
                        free_parameters: free_parameters_for(method, case_no),
                        constraint: constraint_for(method, case_no, variant),
                    });
                }
            }
        }
    }
    out
}

/// Registry lookup; `None` for combinations that were never published.
pub fn family_info(id: &FamilyId) -> Option<FamilyInfo> {
    if !published_variants(id.method, id.case_no).contains(&id.variant) {
        return None;
    }
    if !branches_for(id.method, id.case_no).contains(&id.branch) {
        return None;
    }
    Some(FamilyInfo {
        id: *id,
        classification: classification_for(id.case_no, id.variant),
        free_parameters: free_parameters_for(id.method, id.case_no),
        constraint: constraint_for(id.method, id.case_no, id.variant),
    })
}

// -------------------- scalar material view --------------------

/// Material parameters lowered to f64 once per call; all coefficient
/// formulas read these.
struct Mat {
    n1sq: f64,
    beta1: f64,
    alpha1: f64,
    delta: f64,
    /// nonlinear strength alpha2 * epsilon
    g: f64,
    /// alpha1*beta1 - 1, the shared numerator factor
    ab_m1: f64,
}

impl Mat {
    fn new(m: &MaterialInputs) -> Mat {
        let n1 = rat_to_f64(&m.derived.n1);
        let beta1 = rat_to_f64(&m.derived.beta1);
        let alpha1 = rat_to_f64(&m.derived.alpha1);
        let alpha2 = rat_to_f64(&m.derived.alpha2);
        let delta = rat_to_f64(&m.delta);
        let epsilon = rat_to_f64(&m.epsilon);
        Mat {
            n1sq: n1 * n1,
            beta1,
            alpha1,
            delta,
            g: alpha2 * epsilon,
            ab_m1: alpha1 * beta1 - 1.0,
        }
    }

    /// dispersion scale delta * n1^2 * mu^2
    fn dmu(&self, mu: f64) -> f64 {
        self.delta * self.n1sq * mu * mu
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn csqrt(x: f64) -> Complex64 {
    c(x).sqrt()
}

// -------------------- coefficient construction --------------------

fn degenerate(id: &FamilyId, denominator: &str) -> CatalogError {
    CatalogError::DegenerateDenominator {
        family: id.to_string(),
        denominator: denominator.to_string(),
    }
}

/// Degeneracy test with a relative floor: `value` is a sum whose parts
/// have total magnitude `scale`, so anything below scale*1e-12 has lost
/// its significance to cancellation.
fn check_denominator(
    id: &FamilyId,
    value: f64,
    scale: f64,
    name: &str,
) -> Result<f64, CatalogError> {
    if value.abs() <= scale.max(1.0) * 1e-12 {
        Err(degenerate(id, name))
    } else {
        Ok(value)
    }
}

fn violated(id: &FamilyId, predicate: &str) -> CatalogError {
    CatalogError::ConstraintViolated {
        family: id.to_string(),
        predicate: predicate.to_string(),
    }
}

/// Check the auxiliary-flow gate for the exp-function families.
fn check_aux_gate(id: &FamilyId, tau: f64, sigma: f64) -> Result<(), CatalogError> {
    let disc = tau * tau - 4.0 * sigma;
    match id.variant {
        Variant::Tanh => {
            if sigma == 0.0 {
                return Err(violated(id, "sigma != 0"));
            }
            if disc <= 0.0 {
                return Err(violated(id, "tau^2 - 4*sigma > 0"));
            }
        }
        Variant::Tan => {
            if sigma == 0.0 {
                return Err(violated(id, "sigma != 0"));
            }
            if disc >= 0.0 {
                return Err(violated(id, "tau^2 - 4*sigma < 0"));
            }
        }
        Variant::Rational if matches!(id.case_no, 9 | 10) => {
            if sigma == 0.0 {
                return Err(violated(id, "sigma != 0"));
            }
            if disc >= 0.0 {
                return Err(violated(id, "tau^2 - 4*sigma < 0"));
            }
        }
        Variant::Exp | Variant::Rational => {
            if tau == 0.0 {
                return Err(violated(id, "tau != 0"));
            }
        }
        Variant::Coth => unreachable!("coth is not an exp-function profile"),
    }
    Ok(())
}

/// Build the coefficient set for `id` from `inputs`, applying the branch
/// sign to each dependent wave constant. Radicands are taken through
/// complex arithmetic when negative; nothing is filtered for realness.
pub fn coefficient_set(
    id: &FamilyId,
    inputs: &FamilyInputs,
) -> Result<CoefficientSet, CatalogError> {
    family_info(id).ok_or_else(|| CatalogError::UnknownFamily { id: id.to_string() })?;
    let m = Mat::new(&inputs.material);
    if m.g == 0.0 {
        return Err(degenerate(id, "alpha2*epsilon"));
    }
    let s = id.branch.sign();
    match id.method {
        Method::SineGordon => sg_coefficients(id, &m, inputs.mu, s),
        Method::Mefm => mefm_coefficients(id, &m, inputs, s),
    }
}

fn sg_coefficients(
    id: &FamilyId,
    m: &Mat,
    mu: f64,
    sign: f64,
) -> Result<CoefficientSet, CatalogError> {
    let d = m.dmu(mu);
    let zero = Complex64::ZERO;
    let (a0, a2, b2, lam2) = match id.case_no {
        1 => {
            let den = check_denominator(
                id,
                1.0 + 2.0 * d,
                1.0 + 2.0 * d.abs(),
                "1 + 2*delta*n1^2*mu^2",
            )?;
            let x = d * m.ab_m1 / (m.g * m.beta1 * den);
            let lam2 = (m.alpha1 * m.beta1 + 2.0 * d) / (m.beta1 * den);
            (c(-x / 3.0), c(x), zero, lam2)
        }
        2 => {
            let den = check_denominator(
                id,
                2.0 * d - 1.0,
                2.0 * d.abs() + 1.0,
                "2*delta*n1^2*mu^2 - 1",
            )?;
            let x = d * m.ab_m1 / (m.g * m.beta1 * den);
            let lam2 = (m.alpha1 * m.beta1 - 2.0 * d) / (m.beta1 * (1.0 - 2.0 * d));
            (c(x), c(-x), zero, lam2)
        }
        3 | 4 => {
            let den = check_denominator(id, d - 2.0, d.abs() + 2.0, "delta*n1^2*mu^2 - 2")?;
            let x = d * m.ab_m1 / (m.g * m.beta1 * den);
            let im = if id.case_no == 3 { x } else { -x };
            let lam2 = (2.0 * m.alpha1 * m.beta1 - d) / (m.beta1 * (2.0 - d));
            (c(x), c(-x), Complex64::new(0.0, im), lam2)
        }
        5 | 6 => {
            let den = check_denominator(id, d + 2.0, d.abs() + 2.0, "delta*n1^2*mu^2 + 2")?;
            let y = d * m.ab_m1 / (m.g * m.beta1 * den);
            let im = if id.case_no == 5 { y } else { -y };
            let lam2 = (2.0 * m.alpha1 * m.beta1 + d) / (m.beta1 * den);
            (c(-2.0 * y / 3.0), c(y), Complex64::new(0.0, im), lam2)
        }
        _ => unreachable!("sine-Gordon cases are 1..=6"),
    };
    Ok(CoefficientSet::SineGordon {
        a0,
        a1: zero,
        a2,
        b1: zero,
        b2,
        lambda: csqrt(lam2) * sign,
        mu: c(mu),
    })
}

fn mefm_coefficients(
    id: &FamilyId,
    m: &Mat,
    inputs: &FamilyInputs,
    sign: f64,
) -> Result<CoefficientSet, CatalogError> {
    let (tau, sigma) = (inputs.tau, inputs.sigma);
    check_aux_gate(id, tau, sigma)?;
    let disc = tau * tau - 4.0 * sigma;
    let (q0, q1) = (inputs.q0, inputs.q1);
    let zero = Complex64::ZERO;

    match id.case_no {
        7 | 8 => {
            let lam = inputs.lambda;
            let lam2 = lam * lam;
            let lb = check_denominator(
                id,
                lam2 * m.beta1 - 1.0,
                (lam2 * m.beta1).abs() + 1.0,
                "lambda^2*beta1 - 1",
            )?;
            let l = lam2 - m.alpha1;
            let case_sign = if id.case_no == 7 { 1.0 } else { -1.0 };
            let a = case_sign * 2.0 * l / (m.g * disc);
            let (p0, p1) = if id.case_no == 7 {
                (a * sigma * q0, a * (tau * q0 + sigma * q1))
            } else {
                let head = tau * tau + 2.0 * sigma;
                (a * head * q0 / 6.0, a * (tau * q0 + head * q1 / 6.0))
            };
            let mu2 = case_sign * 2.0 * l * m.beta1 / (m.n1sq * m.delta * lb * disc);
            Ok(CoefficientSet::Mefm {
                p: [c(p0), c(p1), c(a * (q0 + tau * q1)), c(a * q1)],
                q0: c(q0),
                q1: c(q1),
                lambda: c(lam),
                mu: csqrt(mu2) * sign,
                big_lambda: None,
            })
        }
        9 | 10 => {
            let d = m.dmu(inputs.mu);
            let h = check_denominator(
                id,
                2.0 + d * disc,
                2.0 + (d * disc).abs(),
                "2 + delta*n1^2*mu^2*(tau^2-4*sigma)",
            )?;
            let root_sign = if id.case_no == 9 { 1.0 } else { -1.0 };
            // the pinned denominator root (tau +/- sqrt(disc))/2; complex
            // for the rational profile where disc < 0
            let root = (c(tau) + csqrt(disc) * root_sign) * 0.5;
            let mm = d * disc * m.ab_m1 / (3.0 * m.g * m.beta1 * h);
            let lam2 = (2.0 * m.alpha1 * m.beta1 + d * disc) / (m.beta1 * h);
            Ok(CoefficientSet::Mefm {
                p: [root * (mm * q1), c(mm * q1), zero, zero],
                q0: root * q1,
                q1: c(q1),
                lambda: csqrt(lam2) * sign,
                mu: c(inputs.mu),
                big_lambda: None,
            })
        }
        11 | 12 => {
            let (big, big_scale) = big_lambda_parts(q0, q1, tau, sigma);
            let big = check_denominator(id, big, big_scale, "Lambda")?;
            let rl = csqrt(big);
            let den = 12.0 * m.g * m.beta1;
            let (q0_2, q0_3) = (q0 * q0, q0 * q0 * q0);
            let (q1_2, q1_3, q1_4) = (q1 * q1, q1 * q1 * q1, q1 * q1 * q1 * q1);
            let (t2, t4, s2) = (tau * tau, tau * tau * tau * tau, sigma * sigma);
            let (s_num, p1_inner, mu2_sign, p0_sign) = if id.case_no == 11 {
                let s_num = c(-12.0 * q0_2 * q0_3)
                    + c(24.0 * tau * q1 * q0_2 * q0_2)
                    + (rl * 6.0 + c(-24.0 * sigma * q1_2 - 12.0 * t2 * q1_2)) * q0_3
                    + (rl * (-12.0 * tau * q1) + c(24.0 * sigma * tau * q1_3)) * q0_2
                    + (rl * (5.0 * t2 * q1_2 + 10.0 * sigma * q1_2)
                        + c(4.0 * s2 * q1_4 + t4 * q1_4 - 8.0 * t2 * sigma * q1_4))
                        * q0
                    + rl * (-6.0 * sigma * tau * q1_3);
                let p1_inner =
                    rl + c(-t2 * q1_2 - 2.0 * sigma * q1_2 + 6.0 * q0 * q1 * tau - 6.0 * q0_2);
                (s_num, p1_inner, -1.0, 1.0)
            } else {
                let s_num = c(12.0 * q0_2 * q0_3)
                    + c(-24.0 * tau * q1 * q0_2 * q0_2)
                    + (rl * 6.0 + c(24.0 * sigma * q1_2 + 12.0 * t2 * q1_2)) * q0_3
                    + (rl * (-12.0 * tau * q1) + c(-24.0 * sigma * tau * q1_3)) * q0_2
                    + (rl * (5.0 * t2 * q1_2 + 10.0 * sigma * q1_2)
                        + c(-4.0 * s2 * q1_4 - t4 * q1_4 + 8.0 * t2 * sigma * q1_4))
                        * q0
                    + rl * (-6.0 * sigma * tau * q1_3);
                let p1_inner =
                    rl + c(t2 * q1_2 + 2.0 * sigma * q1_2 - 6.0 * q0 * q1 * tau + 6.0 * q0_2);
                (s_num, p1_inner, 1.0, -1.0)
            };
            let p0 = s_num * (p0_sign * m.ab_m1) / (den * big);
            let p1 = p1_inner * (q1 * m.ab_m1) / (rl * den);
            let lam2 = (m.alpha1 * m.beta1 + 1.0) / (2.0 * m.beta1);
            let mu2 = c(2.0 * mu2_sign * q1 * q1) / (c(m.delta * m.n1sq) * rl);
            Ok(CoefficientSet::Mefm {
                p: [p0, p1, zero, zero],
                q0: c(q0),
                q1: c(q1),
                lambda: csqrt(lam2) * sign,
                mu: mu2.sqrt() * sign,
                big_lambda: Some(c(big)),
            })
        }
        13 | 14 => {
            let d = m.dmu(inputs.mu);
            let cc = d * tau * tau;
            if id.case_no == 13 {
                let den =
                    check_denominator(id, cc - 2.0, cc.abs() + 2.0, "delta*n1^2*mu^2*tau^2 - 2")?;
                let a = -2.0 * d * m.ab_m1 / (m.g * m.beta1 * den);
                let lam2 = (cc - 2.0 * m.alpha1 * m.beta1) / (m.beta1 * den);
                Ok(CoefficientSet::Mefm {
                    p: [zero, c(a * tau * q0), c(a * (q0 + tau * q1)), c(a * q1)],
                    q0: c(q0),
                    q1: c(q1),
                    lambda: csqrt(lam2) * sign,
                    mu: c(inputs.mu),
                    big_lambda: None,
                })
            } else {
                let den =
                    check_denominator(id, cc + 2.0, cc.abs() + 2.0, "delta*n1^2*mu^2*tau^2 + 2")?;
                let b = 2.0 * d * m.ab_m1 / (m.g * m.beta1 * den);
                let lam2 = (2.0 * m.alpha1 * m.beta1 + cc) / (m.beta1 * den);
                Ok(CoefficientSet::Mefm {
                    p: [
                        c(b * tau * tau * q0 / 6.0),
                        c(b * (tau * q0 + tau * tau * q1 / 6.0)),
                        c(b * (q0 + tau * q1)),
                        c(b * q1),
                    ],
                    q0: c(q0),
                    q1: c(q1),
                    lambda: csqrt(lam2) * sign,
                    mu: c(inputs.mu),
                    big_lambda: None,
                })
            }
        }
        15 => {
            let l = inputs.lambda * inputs.lambda - m.alpha1;
            let r = -l / (3.0 * m.g);
            Ok(CoefficientSet::Mefm {
                p: [c(r * q0), c(r * q1), zero, zero],
                q0: c(q0),
                q1: c(q1),
                lambda: c(inputs.lambda),
                mu: c(inputs.mu),
                big_lambda: None,
            })
        }
        _ => unreachable!("exp-function cases are 7..=15"),
    }
}

/// Quartic combination under the Cases 11-12 radicals.
pub fn big_lambda(q0: f64, q1: f64, tau: f64, sigma: f64) -> f64 {
    big_lambda_parts(q0, q1, tau, sigma).0
}

/// (value, sum of term magnitudes) of the quartic, for cancellation-aware
/// degeneracy checks.
fn big_lambda_parts(q0: f64, q1: f64, tau: f64, sigma: f64) -> (f64, f64) {
    let (q0_2, q1_2) = (q0 * q0, q1 * q1);
    let (q0_3, q1_3) = (q0_2 * q0, q1_2 * q1);
    let (q0_4, q1_4) = (q0_2 * q0_2, q1_2 * q1_2);
    let t2 = tau * tau;
    let terms = [
        -12.0 * q0_4,
        24.0 * q0_3 * q1 * tau,
        24.0 * q1_3 * q0 * sigma * tau,
        -12.0 * q0_2 * q1_2 * t2,
        -24.0 * q0_2 * q1_2 * sigma,
        -8.0 * q1_4 * t2 * sigma,
        4.0 * q1_4 * sigma * sigma,
        q1_4 * t2 * t2,
    ];
    (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
}

// -------------------- evaluation --------------------

fn singular(id: &FamilyId, xi: Complex64, err: JetError) -> CatalogError {
    CatalogError::SingularPoint {
        family: id.to_string(),
        xi,
        detail: err.to_string(),
    }
}

/// Order-4 jet of the profile function E(xi) for the exp-function variants.
fn profile_jet(id: &FamilyId, xi: Jet, tau: f64, sigma: f64, e: f64) -> Result<Jet, CatalogError> {
    let xi0 = xi.value();
    let shifted = xi + Jet::real_constant(e);
    let disc = tau * tau - 4.0 * sigma;
    let fail = |err| singular(id, xi0, err);
    match id.variant {
        Variant::Tanh => {
            let rd = disc.sqrt();
            let den = shifted.scale(c(rd / 2.0)).tanh().scale(c(rd)) + Jet::real_constant(tau);
            Ok(den
                .recip(DEFAULT_POLE_FLOOR)
                .map_err(fail)?
                .scale(c(-2.0 * sigma)))
        }
        Variant::Tan => {
            let rn = (-disc).sqrt();
            let tan = shifted
                .scale(c(rn / 2.0))
                .tan(DEFAULT_POLE_FLOOR)
                .map_err(fail)?;
            let den = tan.scale(c(rn)) - Jet::real_constant(tau);
            Ok(den
                .recip(DEFAULT_POLE_FLOOR)
                .map_err(fail)?
                .scale(c(2.0 * sigma)))
        }
        Variant::Exp => {
            let den = shifted.scale(c(tau)).exp() - Jet::real_constant(1.0);
            Ok(den.recip(DEFAULT_POLE_FLOOR).map_err(fail)?.scale(c(tau)))
        }
        _ => unreachable!("profile_jet serves tanh/tan/exp variants only"),
    }
}

/// Order-4 jet of Phi in xi at xi = mu(x - lambda t).
pub fn evaluate_jet(
    id: &FamilyId,
    inputs: &FamilyInputs,
    x: f64,
    t: f64,
) -> Result<Jet, CatalogError> {
    let coeffs = coefficient_set(id, inputs)?;
    jet_from_coefficients(id, inputs, &coeffs, x, t)
}

/// Same as `evaluate_jet` but reusing an already-built coefficient set
/// (grids call this in a loop).
pub fn jet_from_coefficients(
    id: &FamilyId,
    inputs: &FamilyInputs,
    coeffs: &CoefficientSet,
    x: f64,
    t: f64,
) -> Result<Jet, CatalogError> {
    let xi0 = coeffs.mu() * (c(x) - coeffs.lambda() * t);
    jet_at_xi(id, inputs, coeffs, xi0)
}

/// Order-4 jet of u at a given traveling coordinate. Residual checks in
/// the xi domain enter here directly.
pub fn jet_at_xi(
    id: &FamilyId,
    inputs: &FamilyInputs,
    coeffs: &CoefficientSet,
    xi0: Complex64,
) -> Result<Jet, CatalogError> {
    let xi = Jet::variable(xi0);
    let fail = |err| singular(id, xi0, err);

    match coeffs {
        CoefficientSet::SineGordon {
            a0, a1, a2, b1, b2, ..
        } => {
            // realization of the auxiliary flow: (C, S) with C' = -S^2,
            // S' = S C; both profiles below satisfy it identically
            let (cc, ss) = match id.variant {
                Variant::Tanh => {
                    let cc = -xi.clone().tanh();
                    let ss = -xi.sech(DEFAULT_POLE_FLOOR).map_err(fail)?;
                    (cc, ss)
                }
                Variant::Coth => {
                    let cc = -xi.clone().coth(DEFAULT_POLE_FLOOR).map_err(fail)?;
                    let ss = xi
                        .csch(DEFAULT_POLE_FLOOR)
                        .map_err(fail)?
                        .scale(Complex64::new(0.0, -1.0));
                    (cc, ss)
                }
                _ => unreachable!("sine-Gordon variants are tanh/coth"),
            };
            let u = Jet::constant(*a0)
                + cc.clone().scale(*a1)
                + ss.clone().scale(*b1)
                + (cc.clone() * cc.clone()).scale(*a2)
                + (ss * cc).scale(*b2);
            Ok(u)
        }
        CoefficientSet::Mefm { p, q0, q1, .. } => match (id.case_no, id.variant) {
            // constant profiles: the assembled quotient is xi-independent
            (9 | 10, Variant::Rational) | (15, Variant::Rational) => Ok(Jet::constant(p[1] / q1)),
            // gauge-reduced forms: the denominator divides the numerator
            (13, Variant::Exp) => {
                let a = p[3] / q1;
                let ee = profile_jet(id, xi, inputs.tau, inputs.sigma, inputs.e)?;
                Ok((ee.clone() * (ee + Jet::real_constant(inputs.tau))).scale(a))
            }
            (14, Variant::Exp) => {
                let b = p[3] / q1;
                let tau = inputs.tau;
                let ee = profile_jet(id, xi, tau, inputs.sigma, inputs.e)?;
                let u = ee.clone() * ee.clone()
                    + ee.scale(c(tau))
                    + Jet::real_constant(tau * tau / 6.0);
                Ok(u.scale(b))
            }
            _ => {
                let ee = profile_jet(id, xi, inputs.tau, inputs.sigma, inputs.e)?;
                let num = ((Jet::constant(p[3]) * ee.clone() + Jet::constant(p[2])) * ee.clone()
                    + Jet::constant(p[1]))
                    * ee.clone()
                    + Jet::constant(p[0]);
                let den = ee.scale(*q1) + Jet::constant(*q0);
                num.div(den, DEFAULT_POLE_FLOOR).map_err(fail)
            }
        },
    }
}

/// Phi(x, t) in complex double precision.
pub fn evaluate(
    id: &FamilyId,
    inputs: &FamilyInputs,
    x: f64,
    t: f64,
) -> Result<Complex64, CatalogError> {
    Ok(evaluate_jet(id, inputs, x, t)?.value())
}

// -------------------- singular loci --------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularLocus {
    /// isolated real pole at xi = value
    Point { xi: f64 },
    /// poles at xi = base + k*period for integer k
    Periodic { base: f64, period: f64 },
    /// denominator vanishes only in a limit, never at finite real xi
    Asymptotic { direction: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityReport {
    pub family: String,
    pub loci: Vec<(SingularLocus, String)>,
}

impl SingularityReport {
    /// Distance from xi to the nearest finite locus (infinite when all
    /// loci are asymptotic or the list is empty).
    pub fn distance(&self, xi: f64) -> f64 {
        let mut best = f64::INFINITY;
        for (locus, _) in &self.loci {
            let d = match locus {
                SingularLocus::Point { xi: p } => (xi - p).abs(),
                SingularLocus::Periodic { base, period } => {
                    let k = ((xi - base) / period).round();
                    (xi - (base + k * period)).abs()
                }
                SingularLocus::Asymptotic { .. } => f64::INFINITY,
            };
            best = best.min(d);
        }
        best
    }
}

/// Real-xi singular loci of the family's closed form. Loci are reported
/// for real profile arguments; evaluate() independently guards every
/// division, so complex wave constants are still safe.
pub fn singularities(
    id: &FamilyId,
    inputs: &FamilyInputs,
) -> Result<SingularityReport, CatalogError> {
    coefficient_set(id, inputs)?;
    let mut loci: Vec<(SingularLocus, String)> = Vec::new();
    let (tau, sigma, e) = (inputs.tau, inputs.sigma, inputs.e);
    let disc = tau * tau - 4.0 * sigma;

    match (id.method, id.variant) {
        (Method::SineGordon, Variant::Tanh) => {}
        (Method::SineGordon, Variant::Coth) => {
            loci.push((
                SingularLocus::Point { xi: 0.0 },
                "coth/csch pole at xi = 0".into(),
            ));
        }
        (Method::Mefm, Variant::Rational) => {}
        (Method::Mefm, Variant::Exp) => {
            loci.push((
                SingularLocus::Point { xi: -e },
                "profile pole where exp(tau(xi+e)) = 1".into(),
            ));
        }
        (Method::Mefm, Variant::Tanh) => {
            let rd = disc.sqrt();
            if matches!(id.case_no, 9 | 10) {
                let direction = if id.case_no == 9 { -1.0 } else { 1.0 };
                loci.push((
                    SingularLocus::Asymptotic { direction },
                    "denominator -> 0 only as the profile saturates at infinity".into(),
                ));
            } else {
                // profile pole: rd*tanh(w) + tau = 0 has a real root only
                // when |tau| < rd, i.e. sigma < 0
                let y = -tau / rd;
                if y.abs() < 1.0 {
                    loci.push((
                        SingularLocus::Point {
                            xi: 2.0 * y.atanh() / rd - e,
                        },
                        "profile denominator root".into(),
                    ));
                }
                // assembled denominator Q0 + Q1 E = 0
                if inputs.q1 != 0.0 && inputs.q0 != 0.0 {
                    let y = (2.0 * sigma * inputs.q1 / inputs.q0 - tau) / rd;
                    if y.abs() < 1.0 {
                        loci.push((
                            SingularLocus::Point {
                                xi: 2.0 * y.atanh() / rd - e,
                            },
                            "assembled denominator root".into(),
                        ));
                    }
                }
            }
        }
        (Method::Mefm, Variant::Tan) => {
            let rn = (-disc).sqrt();
            let period = 2.0 * std::f64::consts::PI / rn;
            loci.push((
                SingularLocus::Periodic {
                    base: std::f64::consts::PI / rn - e,
                    period,
                },
                "tan poles".into(),
            ));
            // rn*tan(w) - tau = 0 always has a periodic real solution
            let w0 = (tau / rn).atan();
            loci.push((
                SingularLocus::Periodic {
                    base: 2.0 * w0 / rn - e,
                    period,
                },
                "profile denominator root".into(),
            ));
            if !matches!(id.case_no, 9 | 10 | 13 | 14 | 15) && inputs.q1 != 0.0 && inputs.q0 != 0.0
            {
                let y = (tau - 2.0 * sigma * inputs.q1 / inputs.q0) / rn;
                loci.push((
                    SingularLocus::Periodic {
                        base: 2.0 * y.atan() / rn - e,
                        period,
                    },
                    "assembled denominator root".into(),
                ));
            }
        }
        _ => unreachable!("unpublished combination survived the registry gate"),
    }
    Ok(SingularityReport {
        family: id.to_string(),
        loci,
    })
}

// -------------------- exact coefficient mirror --------------------

/// Exact-rational mirrors of the radical-free coefficient pieces, used by
/// tests to pin the floating path. Everything here is a plain rational
/// function of the inputs, so the mirror is exact.
pub mod exact {
    use super::MaterialInputs;
    use crate::rational::{rat_to_f64, rint, Rat};

    pub struct SgExact {
        pub a0: Rat,
        pub a2: Rat,
        /// imaginary part of B2 (B2 is purely imaginary in every case)
        pub b2_im: Rat,
        pub lambda_sq: Rat,
    }

    fn dmu(m: &MaterialInputs, mu: &Rat) -> Rat {
        let n1sq = &m.derived.n1 * &m.derived.n1;
        &(&m.delta * &n1sq) * &(mu * mu)
    }

    fn shared(m: &MaterialInputs) -> (Rat, Rat, Rat) {
        let g = &m.derived.alpha2 * &m.epsilon;
        let ab = &m.derived.alpha1 * &m.derived.beta1;
        let ab_m1 = &ab - &rint(1);
        (g, ab, ab_m1)
    }

    /// Rational parts of the sine-Gordon coefficient sets.
    pub fn sg_coefficients(case_no: u8, m: &MaterialInputs, mu: &Rat) -> SgExact {
        let d = dmu(m, mu);
        let (g, ab, ab_m1) = shared(m);
        let b1 = &m.derived.beta1;
        let zero = rint(0);
        match case_no {
            1 => {
                let den = &rint(1) + &(&rint(2) * &d);
                let x = &(&d * &ab_m1) / &(&(&g * b1) * &den);
                SgExact {
                    a0: &-&x / &rint(3),
                    a2: x,
                    b2_im: zero,
                    lambda_sq: &(&ab + &(&rint(2) * &d)) / &(b1 * &den),
                }
            }
            2 => {
                let den = &(&rint(2) * &d) - &rint(1);
                let x = &(&d * &ab_m1) / &(&(&g * b1) * &den);
                SgExact {
                    a0: x.clone(),
                    a2: -&x,
                    b2_im: zero,
                    lambda_sq: &(&ab - &(&rint(2) * &d)) / &(b1 * &(&rint(1) - &(&rint(2) * &d))),
                }
            }
            3 | 4 => {
                let den = &d - &rint(2);
                let x = &(&d * &ab_m1) / &(&(&g * b1) * &den);
                let sgn = if case_no == 3 { rint(1) } else { rint(-1) };
                SgExact {
                    a0: x.clone(),
                    a2: -&x,
                    b2_im: &sgn * &x,
                    lambda_sq: &(&(&rint(2) * &ab) - &d) / &(b1 * &(&rint(2) - &d)),
                }
            }
            5 | 6 => {
                let den = &d + &rint(2);
                let y = &(&d * &ab_m1) / &(&(&g * b1) * &den);
                let sgn = if case_no == 5 { rint(1) } else { rint(-1) };
                SgExact {
                    a0: &(&rint(-2) * &y) / &rint(3),
                    a2: y.clone(),
                    b2_im: &sgn * &y,
                    lambda_sq: &(&(&rint(2) * &ab) + &d) / &(b1 * &den),
                }
            }
            _ => panic!("sine-Gordon cases are 1..=6"),
        }
    }

    /// lambda^2 for the exp-function families whose lambda is dependent
    /// and radical-free before the square root (Cases 9-14).
    pub fn mefm_lambda_sq(
        case_no: u8,
        m: &MaterialInputs,
        mu: &Rat,
        tau: &Rat,
        sigma: &Rat,
    ) -> Rat {
        let d = dmu(m, mu);
        let (_, ab, _) = shared(m);
        let b1 = &m.derived.beta1;
        match case_no {
            9 | 10 => {
                let disc = &(tau * tau) - &(&rint(4) * sigma);
                let h = &rint(2) + &(&d * &disc);
                &(&(&rint(2) * &ab) + &(&d * &disc)) / &(b1 * &h)
            }
            11 | 12 => &(&ab + &rint(1)) / &(&rint(2) * b1),
            13 => {
                let cc = &d * &(tau * tau);
                &(&cc - &(&rint(2) * &ab)) / &(b1 * &(&cc - &rint(2)))
            }
            14 => {
                let cc = &d * &(tau * tau);
                &(&(&rint(2) * &ab) + &cc) / &(b1 * &(&cc + &rint(2)))
            }
            _ => panic!("dependent lambda^2 exists for cases 9..=14"),
        }
    }

    /// mu^2 for Cases 7-8 (dependent mu, radical-free before the root).
    pub fn mefm_mu_sq(
        case_no: u8,
        m: &MaterialInputs,
        lambda: &Rat,
        tau: &Rat,
        sigma: &Rat,
    ) -> Rat {
        assert!(case_no == 7 || case_no == 8);
        let lam2 = lambda * lambda;
        let l = &lam2 - &m.derived.alpha1;
        let b1 = &m.derived.beta1;
        let lb = &(&lam2 * b1) - &rint(1);
        let disc = &(tau * tau) - &(&rint(4) * sigma);
        let n1sq = &m.derived.n1 * &m.derived.n1;
        let sgn = if case_no == 7 { rint(2) } else { rint(-2) };
        &(&(&sgn * &l) * b1) / &(&(&(&n1sq * &m.delta) * &lb) * &disc)
    }

    pub fn to_f64(r: &Rat) -> f64 {
        rat_to_f64(r)
    }
}

//! A small exact-arithmetic engine for the two derivation algebras behind
//! the solution catalog: trigonometric elements A(c) + s*B(c) closed under
//! d/dxi via c' = -s^2, s' = s*c, and rational elements in E = exp(-phi)
//! closed under E' = -(E^2 + tau*E + sigma).
//!
//! Substituting the method ansatz into the working wave ODE and collecting
//! coefficients regenerates the overdetermined algebraic systems; published
//! coefficient sets can then be checked for exact annihilation with all
//! free symbols kept symbolic. The engine only checks candidate solutions,
//! it never solves the systems.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::rational::{rat, rat_to_f64, rat_to_string, rint, Rat};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasError {
    #[error("IncompleteAssignment: unknown {missing} has no assigned expression")]
    IncompleteAssignment { missing: String },
    #[error("UnknownSymbol: {name} is not a variable of this system's ring")]
    UnknownSymbol { name: String },
    #[error("RingMismatch: expression built over a different variable ring")]
    RingMismatch,
}

// ---------------------------------------------------------------------------
// Gaussian rationals

/// Exact complex number with rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> GaussRat {
        GaussRat { re, im }
    }

    pub fn from_rat(re: Rat) -> GaussRat {
        GaussRat {
            re,
            im: Rat::zero(),
        }
    }

    pub fn from_int(n: i64) -> GaussRat {
        GaussRat::from_rat(rint(n))
    }

    /// The imaginary unit.
    pub fn i() -> GaussRat {
        GaussRat {
            re: Rat::zero(),
            im: Rat::one(),
        }
    }

    pub fn zero() -> GaussRat {
        GaussRat::from_int(0)
    }

    pub fn one() -> GaussRat {
        GaussRat::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }

    pub fn neg(&self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> GaussRat {
        let n = &(&self.re * &self.re) + &(&self.im * &self.im);
        assert!(!n.is_zero(), "inverse of zero");
        GaussRat::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", rat_to_string(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}*i", rat_to_string(&self.im))
        } else if self.im < Rat::zero() {
            write!(
                f,
                "{}{}*i",
                rat_to_string(&self.re),
                rat_to_string(&self.im)
            )
        } else {
            write!(
                f,
                "{}+{}*i",
                rat_to_string(&self.re),
                rat_to_string(&self.im)
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Variable rings and multivariate polynomials

type Terms = BTreeMap<Vec<u8>, GaussRat>;

/// An ordered set of symbols, optionally with square relations: a variable
/// v may be declared algebraic with v^2 rewriting to a polynomial in the
/// other variables (used for square roots of discriminants).
#[derive(PartialEq)]
pub struct Ring {
    vars: Vec<String>,
    sq_rels: BTreeMap<usize, Terms>,
}

impl Ring {
    pub fn new(vars: &[&str]) -> Arc<Ring> {
        Arc::new(Ring {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            sq_rels: BTreeMap::new(),
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || a.vars == b.vars
}

#[derive(Clone)]
pub struct MPoly {
    ring: Arc<Ring>,
    terms: Terms,
}

impl MPoly {
    pub fn zero(ring: &Arc<Ring>) -> MPoly {
        MPoly {
            ring: ring.clone(),
            terms: Terms::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: GaussRat) -> MPoly {
        let mut terms = Terms::new();
        if !c.is_zero() {
            terms.insert(vec![0; ring.len()], c);
        }
        MPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn int(ring: &Arc<Ring>, n: i64) -> MPoly {
        MPoly::constant(ring, GaussRat::from_int(n))
    }

    pub fn rational(ring: &Arc<Ring>, r: Rat) -> MPoly {
        MPoly::constant(ring, GaussRat::from_rat(r))
    }

    /// Panics on an unknown name; variable sets are fixed per ring.
    pub fn var(ring: &Arc<Ring>, name: &str) -> MPoly {
        let idx = ring
            .index_of(name)
            .unwrap_or_else(|| panic!("no variable {name} in ring"));
        let mut exps = vec![0u8; ring.len()];
        exps[idx] = 1;
        let mut terms = Terms::new();
        terms.insert(exps, GaussRat::one());
        MPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient when the polynomial is constant, if it is.
    pub fn constant_value(&self) -> Option<GaussRat> {
        if self.terms.is_empty() {
            return Some(GaussRat::zero());
        }
        if self.terms.len() == 1 {
            let (exps, c) = self.terms.iter().next().unwrap();
            if exps.iter().all(|&e| e == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn degree_in(&self, name: &str) -> u8 {
        match self.ring.index_of(name) {
            Some(idx) => self.terms.keys().map(|e| e[idx]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Every monomial carries the named variable.
    pub fn every_term_involves(&self, name: &str) -> bool {
        match self.ring.index_of(name) {
            Some(idx) => self.terms.keys().all(|e| e[idx] > 0),
            None => false,
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        debug_assert!(same_ring(&self.ring, &o.ring));
        let mut terms = self.terms.clone();
        for (exps, c) in &o.terms {
            merge_term(&mut terms, exps.clone(), c.clone());
        }
        MPoly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> MPoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.neg()))
            .collect();
        MPoly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        debug_assert!(same_ring(&self.ring, &o.ring));
        let mut terms = Terms::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let exps: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                merge_term(&mut terms, exps, ca.mul(cb));
            }
        }
        reduce_squares(&self.ring, &mut terms);
        MPoly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &GaussRat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ring);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, x)| (e.clone(), x.mul(c)))
            .collect();
        MPoly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn pow(&self, k: u8) -> MPoly {
        let mut out = MPoly::int(&self.ring, 1);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact evaluation at a full variable assignment. The caller must pass
    /// values consistent with any square relations; the system builders
    /// never emit relation variables, so plain systems evaluate freely.
    pub fn eval_exact(&self, vals: &[GaussRat]) -> GaussRat {
        assert_eq!(vals.len(), self.ring.len());
        let mut acc = GaussRat::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (idx, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&vals[idx]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Coefficient map for serialization: exponent vector -> rational string.
    pub fn coefficients_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (exps, c) in &self.terms {
            let key: Vec<String> = exps.iter().map(|e| e.to_string()).collect();
            map.insert(key.join(","), Value::String(c.to_string()));
        }
        Value::Object(map)
    }
}

impl PartialEq for MPoly {
    fn eq(&self, o: &MPoly) -> bool {
        same_ring(&self.ring, &o.ring) && self.terms == o.terms
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(exps, c)| {
                let vars: Vec<String> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            self.ring.vars[i].clone()
                        } else {
                            format!("{}^{}", self.ring.vars[i], e)
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn merge_term(terms: &mut Terms, exps: Vec<u8>, c: GaussRat) {
    if c.is_zero() {
        return;
    }
    match terms.entry(exps) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get().add(&c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// Rewrite v^2 -> relation polynomial until every relation variable has
/// exponent <= 1. Relations never mention their own variable, so this
/// terminates.
fn reduce_squares(ring: &Arc<Ring>, terms: &mut Terms) {
    if ring.sq_rels.is_empty() {
        return;
    }
    loop {
        let hit = terms.iter().find_map(|(exps, _)| {
            ring.sq_rels
                .keys()
                .find(|&&v| exps[v] >= 2)
                .map(|&v| (exps.clone(), v))
        });
        let Some((exps, v)) = hit else { break };
        let coeff = terms.remove(&exps).unwrap();
        let mut base = exps;
        base[v] -= 2;
        let rel = &ring.sq_rels[&v];
        for (rexps, rc) in rel {
            let merged: Vec<u8> = base.iter().zip(rexps).map(|(x, y)| x + y).collect();
            merge_term(terms, merged, coeff.mul(rc));
        }
    }
}

// ---------------------------------------------------------------------------
// Rational expressions (numerator / denominator pairs, no reduction)

#[derive(Clone, Debug)]
pub struct RatExpr {
    pub num: MPoly,
    pub den: MPoly,
}

impl RatExpr {
    pub fn from_poly(num: MPoly) -> RatExpr {
        let den = MPoly::int(num.ring(), 1);
        RatExpr { num, den }
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> RatExpr {
        RatExpr::from_poly(MPoly::var(ring, name))
    }

    pub fn int(ring: &Arc<Ring>, n: i64) -> RatExpr {
        RatExpr::from_poly(MPoly::int(ring, n))
    }

    pub fn rational(ring: &Arc<Ring>, r: Rat) -> RatExpr {
        RatExpr::from_poly(MPoly::rational(ring, r))
    }

    pub fn constant(ring: &Arc<Ring>, c: GaussRat) -> RatExpr {
        RatExpr::from_poly(MPoly::constant(ring, c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatExpr) -> RatExpr {
        if self.den == o.den {
            return RatExpr {
                num: self.num.add(&o.num),
                den: self.den.clone(),
            };
        }
        RatExpr {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub fn sub(&self, o: &RatExpr) -> RatExpr {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatExpr {
        RatExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &RatExpr) -> RatExpr {
        RatExpr {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
    }

    /// Panics on a zero denominator polynomial.
    pub fn div(&self, o: &RatExpr) -> RatExpr {
        assert!(!o.num.is_zero(), "division by zero expression");
        RatExpr {
            num: self.num.mul(&o.den),
            den: self.den.mul(&o.num),
        }
    }

    pub fn pow(&self, k: u8) -> RatExpr {
        RatExpr {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }
}

// ---------------------------------------------------------------------------
// Univariate polynomials over MPoly coefficients

#[derive(Clone, PartialEq)]
struct UPoly {
    ring: Arc<Ring>,
    coeffs: Vec<MPoly>,
}

impl UPoly {
    fn zero(ring: &Arc<Ring>) -> UPoly {
        UPoly {
            ring: ring.clone(),
            coeffs: Vec::new(),
        }
    }

    fn from_coeffs(ring: &Arc<Ring>, coeffs: Vec<MPoly>) -> UPoly {
        let mut p = UPoly {
            ring: ring.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(MPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    fn get(&self, k: usize) -> MPoly {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| MPoly::zero(&self.ring))
    }

    fn deg(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    fn add(&self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|k| self.get(k).add(&o.get(k))).collect();
        UPoly::from_coeffs(&self.ring, coeffs)
    }

    fn mul(&self, o: &UPoly) -> UPoly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return UPoly::zero(&self.ring);
        }
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut coeffs = vec![MPoly::zero(&self.ring); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        UPoly::from_coeffs(&self.ring, coeffs)
    }

    fn scale(&self, m: &MPoly) -> UPoly {
        let coeffs = self.coeffs.iter().map(|c| c.mul(m)).collect();
        UPoly::from_coeffs(&self.ring, coeffs)
    }

    fn scale_int(&self, n: i64) -> UPoly {
        self.scale(&MPoly::int(&self.ring, n))
    }

    /// Formal derivative with respect to the indeterminate.
    fn dx(&self) -> UPoly {
        if self.coeffs.len() <= 1 {
            return UPoly::zero(&self.ring);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&GaussRat::from_int(k as i64)))
            .collect();
        UPoly::from_coeffs(&self.ring, coeffs)
    }

    /// Multiply by the indeterminate.
    fn mul_x(&self) -> UPoly {
        if self.coeffs.is_empty() {
            return UPoly::zero(&self.ring);
        }
        let mut coeffs = vec![MPoly::zero(&self.ring)];
        coeffs.extend(self.coeffs.iter().cloned());
        UPoly::from_coeffs(&self.ring, coeffs)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Trigonometric elements: A(c) + s*B(c) with s^2 = 1 - c^2

/// Element of the closed algebra generated by c = cos w, s = sin w along
/// trajectories of w' = sin w.
#[derive(Clone, PartialEq)]
pub struct TrigElement {
    a: UPoly,
    b: UPoly,
}

impl TrigElement {
    /// Build from even-part and odd-part coefficient lists (low degree
    /// first): sum a[k] c^k + s * sum b[k] c^k.
    pub fn new(even: Vec<MPoly>, odd: Vec<MPoly>, ring: &Arc<Ring>) -> TrigElement {
        TrigElement {
            a: UPoly::from_coeffs(ring, even),
            b: UPoly::from_coeffs(ring, odd),
        }
    }

    pub fn add(&self, o: &TrigElement) -> TrigElement {
        TrigElement {
            a: self.a.add(&o.a),
            b: self.b.add(&o.b),
        }
    }

    /// Product, reducing s^2 to 1 - c^2.
    pub fn mul(&self, o: &TrigElement) -> TrigElement {
        let ring = &self.a.ring;
        // (1 - c^2) as a c-polynomial
        let one_m_c2 = UPoly::from_coeffs(
            ring,
            vec![MPoly::int(ring, 1), MPoly::zero(ring), MPoly::int(ring, -1)],
        );
        let a = self.a.mul(&o.a).add(&one_m_c2.mul(&self.b.mul(&o.b)));
        let b = self.a.mul(&o.b).add(&self.b.mul(&o.a));
        TrigElement { a, b }
    }

    pub fn scale(&self, m: &MPoly) -> TrigElement {
        TrigElement {
            a: self.a.scale(m),
            b: self.b.scale(m),
        }
    }

    /// d/dxi under c' = -s^2, s' = s*c, reduced back into the algebra:
    /// d[A + sB] = (c^2 - 1) A'(c) + s * [c B(c) + (c^2 - 1) B'(c)].
    pub fn derive(&self) -> TrigElement {
        let ring = &self.a.ring;
        let c2_m_one = UPoly::from_coeffs(
            ring,
            vec![MPoly::int(ring, -1), MPoly::zero(ring), MPoly::int(ring, 1)],
        );
        let a = c2_m_one.mul(&self.a.dx());
        let b = self.b.mul_x().add(&c2_m_one.mul(&self.b.dx()));
        TrigElement { a, b }
    }

    pub fn even_coeff(&self, k: usize) -> MPoly {
        self.a.get(k)
    }

    pub fn odd_coeff(&self, k: usize) -> MPoly {
        self.b.get(k)
    }

    pub fn even_degree(&self) -> Option<usize> {
        self.a.deg()
    }

    pub fn odd_degree(&self) -> Option<usize> {
        self.b.deg()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

// ---------------------------------------------------------------------------
// Exponential elements: P(E)/Q(E) with E' = -(E^2 + tau*E + sigma)

/// Rational function of E = exp(-phi) along trajectories of the auxiliary
/// flow phi' = exp(-phi) + sigma*exp(phi) + tau.
#[derive(Clone)]
pub struct EElement {
    p: UPoly,
    q: UPoly,
    tau: MPoly,
    sigma: MPoly,
}

impl EElement {
    pub fn new(
        num: Vec<MPoly>,
        den: Vec<MPoly>,
        tau: MPoly,
        sigma: MPoly,
        ring: &Arc<Ring>,
    ) -> EElement {
        let q = UPoly::from_coeffs(ring, den);
        assert!(!q.is_zero(), "zero denominator");
        EElement {
            p: UPoly::from_coeffs(ring, num),
            q,
            tau,
            sigma,
        }
    }

    fn flow(&self) -> UPoly {
        let ring = &self.p.ring;
        UPoly::from_coeffs(
            ring,
            vec![self.sigma.clone(), self.tau.clone(), MPoly::int(ring, 1)],
        )
    }

    pub fn add(&self, o: &EElement) -> EElement {
        EElement {
            p: self.p.mul(&o.q).add(&o.p.mul(&self.q)),
            q: self.q.mul(&o.q),
            tau: self.tau.clone(),
            sigma: self.sigma.clone(),
        }
    }

    pub fn mul(&self, o: &EElement) -> EElement {
        EElement {
            p: self.p.mul(&o.p),
            q: self.q.mul(&o.q),
            tau: self.tau.clone(),
            sigma: self.sigma.clone(),
        }
    }

    /// d/dxi via E' = -(E^2 + tau E + sigma):
    /// d(P/Q) = -(E^2+tau E+sigma)(P'Q - PQ') / Q^2.
    pub fn derive(&self) -> EElement {
        let w = self
            .p
            .dx()
            .mul(&self.q)
            .add(&self.p.mul(&self.q.dx()).scale_int(-1));
        EElement {
            p: self.flow().mul(&w).scale_int(-1),
            q: self.q.mul(&self.q),
            tau: self.tau.clone(),
            sigma: self.sigma.clone(),
        }
    }

    /// Equality as rational functions (cross multiplication).
    pub fn equivalent(&self, o: &EElement) -> bool {
        self.p.mul(&o.q) == o.p.mul(&self.q)
    }
}

// ---------------------------------------------------------------------------
// Algebraic systems

#[derive(Clone)]
pub struct Equation {
    pub label: String,
    pub poly: MPoly,
}

pub struct AlgebraicSystem {
    pub kind: String,
    pub ring: Arc<Ring>,
    pub equations: Vec<Equation>,
    pub unknowns: Vec<String>,
}

impl AlgebraicSystem {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "vars": self.ring.vars(),
            "unknowns": self.unknowns,
            "equations": self.equations.iter().map(|e| json!({
                "label": e.label,
                "coefficients": e.poly.coefficients_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Shared material-parameter symbol tail for both method rings.
const PARAM_VARS: [&str; 8] = [
    "lam2", "mu2", "n1sq", "delta", "beta1", "alpha1", "alpha2", "eps",
];

/// Ring for the sine-Gordon expansion system: five ansatz coefficients
/// plus squared wave parameters and material symbols. Both the generated
/// equations and the published coefficient sets involve lambda and mu only
/// through their squares, so the ring carries lam2 and mu2 directly.
pub fn sg_ring() -> Arc<Ring> {
    let mut vars = vec!["a0", "a1", "a2", "b1", "b2"];
    vars.extend(PARAM_VARS);
    Ring::new(&vars)
}

/// Ring for the exponential-method system at order M: numerator and
/// denominator coefficients, wave and auxiliary symbols, plus radical
/// helpers rdelta (square root of tau^2 - 4 sigma, any M) and, for M = 1,
/// rlam (square root of the published quartic discriminant), each with its
/// square relation installed.
pub fn mefm_ring(m: u32) -> Arc<Ring> {
    let m = m as usize;
    let mut names: Vec<String> = Vec::new();
    for i in 0..=(m + 2) {
        names.push(format!("p{i}"));
    }
    for j in 0..=m {
        names.push(format!("q{j}"));
    }
    for n in [
        "lam2", "mu2", "tau", "sigma", "n1sq", "delta", "beta1", "alpha1", "alpha2", "eps",
    ] {
        names.push(n.into());
    }
    names.push("rdelta".into());
    if m == 1 {
        names.push("rlam".into());
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();

    let idx = |n: &str| refs.iter().position(|v| *v == n).unwrap();
    let nvars = refs.len();
    let mono = |pairs: &[(&str, u8)], num: i64| -> (Vec<u8>, GaussRat) {
        let mut exps = vec![0u8; nvars];
        for (n, e) in pairs {
            exps[idx(n)] = *e;
        }
        (exps, GaussRat::from_int(num))
    };

    let mut sq_rels = BTreeMap::new();
    // rdelta^2 = tau^2 - 4 sigma
    let mut rel: Terms = Terms::new();
    for (e, c) in [mono(&[("tau", 2)], 1), mono(&[("sigma", 1)], -4)] {
        rel.insert(e, c);
    }
    sq_rels.insert(idx("rdelta"), rel);

    if m == 1 {
        // rlam^2 = the quartic discriminant in (q0, q1, tau, sigma)
        let mut rel: Terms = Terms::new();
        for (e, c) in [
            mono(&[("q0", 4)], -12),
            mono(&[("q0", 3), ("q1", 1), ("tau", 1)], 24),
            mono(&[("q0", 1), ("q1", 3), ("sigma", 1), ("tau", 1)], 24),
            mono(&[("q0", 2), ("q1", 2), ("tau", 2)], -12),
            mono(&[("q0", 2), ("q1", 2), ("sigma", 1)], -24),
            mono(&[("q1", 4), ("tau", 2), ("sigma", 1)], -8),
            mono(&[("q1", 4), ("sigma", 2)], 4),
            mono(&[("q1", 4), ("tau", 4)], 1),
        ] {
            rel.insert(e, c);
        }
        sq_rels.insert(idx("rlam"), rel);
    }

    Arc::new(Ring {
        vars: names,
        sq_rels,
    })
}

/// Homogeneous balance of u'' against u^2: a pole of order p gives orders
/// p+2 and 2p, so p = 2. The trig ansatz therefore stops at degree N = 2,
/// and the quotient ansatz numerator leads its denominator by two degrees,
/// N = M + 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    SineGordon,
    Mefm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Balance {
    pub n: u32,
    pub m: Option<u32>,
}

pub fn balance(kind: MethodKind, m: Option<u32>) -> Option<Balance> {
    match kind {
        MethodKind::SineGordon => Some(Balance { n: 2, m: None }),
        MethodKind::Mefm => {
            let m = m?;
            if m == 0 {
                return None;
            }
            Some(Balance {
                n: m + 2,
                m: Some(m),
            })
        }
    }
}

/// Claimed system size for the exponential method at order M.
pub fn theorem1_counts(m: u32) -> (u32, u32) {
    (m + 7, 2 * (m + 3))
}

/// The working ODE scaled by 2*beta1 to clear fractions:
/// n1^2 mu^2 delta (1 - lam^2 beta1) u'' + 6 alpha2 eps beta1 u^2
///   + 2 beta1 (lam^2 - alpha1) u = 0.
fn scaled_ode_parts(ring: &Arc<Ring>) -> (MPoly, MPoly, MPoly) {
    let v = |n: &str| MPoly::var(ring, n);
    let k2b = v("n1sq")
        .mul(&v("mu2"))
        .mul(&v("delta"))
        .mul(&MPoly::int(ring, 1).sub(&v("lam2").mul(&v("beta1"))));
    let g2b = MPoly::int(ring, 6)
        .mul(&v("alpha2"))
        .mul(&v("eps"))
        .mul(&v("beta1"));
    let l2b = MPoly::int(ring, 2)
        .mul(&v("beta1"))
        .mul(&v("lam2").sub(&v("alpha1")));
    (k2b, g2b, l2b)
}

/// Substitute the degree-2 trig ansatz u = A0 + A1 c + B1 s + A2 c^2
/// + B2 s c into the working ODE and collect {1, s} x c^k coefficients.
pub fn build_sg_system() -> AlgebraicSystem {
    let ring = sg_ring();
    let v = |n: &str| MPoly::var(&ring, n);
    let zero = MPoly::zero(&ring);

    let u = TrigElement::new(
        vec![v("a0"), v("a1"), v("a2")],
        vec![v("b1"), v("b2")],
        &ring,
    );
    let upp = u.derive().derive();
    let (k2b, g2b, l2b) = scaled_ode_parts(&ring);
    let full = upp
        .scale(&k2b)
        .add(&u.mul(&u).scale(&g2b))
        .add(&u.scale(&l2b));

    assert_eq!(full.even_degree(), Some(4), "even part must reach c^4");
    assert_eq!(full.odd_degree(), Some(3), "odd part must reach s*c^3");
    let _ = zero;

    let mut equations = Vec::new();
    for k in 0..=4 {
        equations.push(Equation {
            label: format!("c^{k}"),
            poly: full.even_coeff(k),
        });
    }
    for k in 0..=3 {
        equations.push(Equation {
            label: format!("s*c^{k}"),
            poly: full.odd_coeff(k),
        });
    }
    AlgebraicSystem {
        kind: "sg".into(),
        ring,
        equations,
        unknowns: ["a0", "a1", "a2", "b1", "b2", "lam2", "mu2"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    }
}

/// Auxiliary-flow variant: which specialization of E' = -(E^2 + tau E
/// + sigma) the system is generated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxVariant {
    Full,
    Sigma0,
    Discrim0,
    Both0,
}

impl AuxVariant {
    pub fn parse(s: &str) -> Option<AuxVariant> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Some(AuxVariant::Full),
            "sigma0" => Some(AuxVariant::Sigma0),
            "discrim0" => Some(AuxVariant::Discrim0),
            "both0" => Some(AuxVariant::Both0),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AuxVariant::Full => "full",
            AuxVariant::Sigma0 => "sigma0",
            AuxVariant::Discrim0 => "discrim0",
            AuxVariant::Both0 => "both0",
        }
    }
}

/// Substitute the quotient ansatz u = N(E)/D(E), deg N = M+2, deg D = M,
/// into the working ODE, clear D^3, and collect powers of E. With
/// W = N'D - ND' and R = E^2 + tau E + sigma:
/// u''*D^3 = R'RWD + R^2(W'D - 2WD').
pub fn build_mefm_system(m: u32, aux: AuxVariant) -> AlgebraicSystem {
    assert!(m >= 1, "order must be at least 1");
    let ring = mefm_ring(m);
    let v = |n: &str| MPoly::var(&ring, n);
    let m = m as usize;

    let (tau, sigma) = match aux {
        AuxVariant::Full => (v("tau"), v("sigma")),
        AuxVariant::Sigma0 => (v("tau"), MPoly::zero(&ring)),
        AuxVariant::Discrim0 => {
            let quarter = MPoly::rational(&ring, rat(1, 4));
            (v("tau").clone(), v("tau").mul(&v("tau")).mul(&quarter))
        }
        AuxVariant::Both0 => (MPoly::zero(&ring), MPoly::zero(&ring)),
    };

    let n_poly = UPoly::from_coeffs(&ring, (0..=(m + 2)).map(|i| v(&format!("p{i}"))).collect());
    let d_poly = UPoly::from_coeffs(&ring, (0..=m).map(|j| v(&format!("q{j}"))).collect());
    let r_poly = UPoly::from_coeffs(&ring, vec![sigma, tau, MPoly::int(&ring, 1)]);

    let w = n_poly
        .dx()
        .mul(&d_poly)
        .add(&n_poly.mul(&d_poly.dx()).scale_int(-1));
    let upp_d3 = r_poly.dx().mul(&r_poly).mul(&w).mul(&d_poly).add(
        &r_poly
            .mul(&r_poly)
            .mul(&w.dx().mul(&d_poly).add(&w.mul(&d_poly.dx()).scale_int(-2))),
    );

    let (k2b, g2b, l2b) = scaled_ode_parts(&ring);
    let cleared = upp_d3
        .scale(&k2b)
        .add(&n_poly.mul(&n_poly).mul(&d_poly).scale(&g2b))
        .add(&n_poly.mul(&d_poly).mul(&d_poly).scale(&l2b));

    let mut equations = Vec::new();
    for k in 0..cleared.coeffs.len() {
        let poly = cleared.get(k);
        if !poly.is_zero() {
            equations.push(Equation {
                label: format!("E^{k}"),
                poly,
            });
        }
    }

    let mut unknowns: Vec<String> = (0..=(m + 2)).map(|i| format!("p{i}")).collect();
    unknowns.extend((0..=m).map(|j| format!("q{j}")));
    unknowns.push("lam2".into());
    unknowns.push("mu2".into());

    AlgebraicSystem {
        kind: format!("mefm.m{m}.{}", aux.name()),
        ring,
        equations,
        unknowns,
    }
}

/// Substitute exact expressions for the unknowns and return one residual
/// polynomial per equation (numerators over a cleared common denominator;
/// zero means exact annihilation). Free symbols stay symbolic; extra keys
/// may assign them too. Unassigned unknowns are an error.
pub fn check_candidate(
    sys: &AlgebraicSystem,
    assignment: &BTreeMap<String, RatExpr>,
) -> Result<Vec<MPoly>, CasError> {
    let ring = &sys.ring;
    for name in assignment.keys() {
        if ring.index_of(name).is_none() {
            return Err(CasError::UnknownSymbol { name: name.clone() });
        }
    }
    for unknown in &sys.unknowns {
        if !assignment.contains_key(unknown) {
            return Err(CasError::IncompleteAssignment {
                missing: unknown.clone(),
            });
        }
    }

    let mut table: Vec<Option<(MPoly, MPoly)>> = vec![None; ring.len()];
    for (name, expr) in assignment {
        if !same_ring(expr.num.ring(), ring) {
            return Err(CasError::RingMismatch);
        }
        let idx = ring.index_of(name).unwrap();
        table[idx] = Some((expr.num.clone(), expr.den.clone()));
    }

    let mut residuals = Vec::with_capacity(sys.equations.len());
    for eq in &sys.equations {
        residuals.push(substitute(ring, &eq.poly, &table));
    }
    Ok(residuals)
}

/// Expand an equation over the common denominator prod_i d_i^(m_i) where
/// m_i is the variable's maximal exponent in the equation; each term picks
/// up n_i^(e_i) d_i^(m_i - e_i). Zero-ness of the result equals zero-ness
/// of the substituted expression because denominators are non-zero polys.
fn substitute(ring: &Arc<Ring>, eq: &MPoly, table: &[Option<(MPoly, MPoly)>]) -> MPoly {
    let nvars = ring.len();
    let mut max_exp = vec![0u8; nvars];
    for exps in eq.terms.keys() {
        for (i, &e) in exps.iter().enumerate() {
            max_exp[i] = max_exp[i].max(e);
        }
    }

    // power tables for assigned variables only
    let mut num_pows: Vec<Vec<MPoly>> = vec![Vec::new(); nvars];
    let mut den_pows: Vec<Vec<MPoly>> = vec![Vec::new(); nvars];
    for i in 0..nvars {
        if let Some((n, d)) = &table[i] {
            if max_exp[i] == 0 {
                continue;
            }
            let mut np = vec![MPoly::int(ring, 1)];
            let mut dp = vec![MPoly::int(ring, 1)];
            for k in 1..=max_exp[i] as usize {
                np.push(np[k - 1].mul(n));
                dp.push(dp[k - 1].mul(d));
            }
            num_pows[i] = np;
            den_pows[i] = dp;
        }
    }

    let mut acc = MPoly::zero(ring);
    for (exps, coeff) in &eq.terms {
        let mut mono_exps = vec![0u8; nvars];
        let mut term = MPoly::constant(ring, coeff.clone());
        for i in 0..nvars {
            if table[i].is_some() && max_exp[i] > 0 {
                let e = exps[i] as usize;
                term = term.mul(&num_pows[i][e]);
                term = term.mul(&den_pows[i][max_exp[i] as usize - e]);
            } else {
                mono_exps[i] = exps[i];
            }
        }
        if mono_exps.iter().any(|&e| e > 0) {
            let mut t = Terms::new();
            t.insert(mono_exps, GaussRat::one());
            reduce_squares(ring, &mut t);
            let mono = MPoly {
                ring: ring.clone(),
                terms: t,
            };
            term = term.mul(&mono);
        }
        acc = acc.add(&term);
    }
    acc
}

// ---------------------------------------------------------------------------
// Published coefficient sets, as exact symbolic assignments

pub mod candidates {
    //! The closed-form coefficient sets of the solution catalog, expressed
    //! as exact rational (and Gaussian-rational) expressions over the
    //! system rings, for annihilation checks with free symbols symbolic.

    use super::*;

    fn ve(ring: &Arc<Ring>, n: &str) -> RatExpr {
        RatExpr::var(ring, n)
    }

    fn int(ring: &Arc<Ring>, n: i64) -> RatExpr {
        RatExpr::int(ring, n)
    }

    /// n1^2 mu^2 delta, the dispersion-to-wavenumber group.
    fn dmu(ring: &Arc<Ring>) -> RatExpr {
        ve(ring, "n1sq")
            .mul(&ve(ring, "mu2"))
            .mul(&ve(ring, "delta"))
    }

    /// alpha2 * eps, the quadratic coefficient group.
    fn gg(ring: &Arc<Ring>) -> RatExpr {
        ve(ring, "alpha2").mul(&ve(ring, "eps"))
    }

    /// alpha1*beta1 - 1.
    fn ab_m1(ring: &Arc<Ring>) -> RatExpr {
        ve(ring, "alpha1")
            .mul(&ve(ring, "beta1"))
            .sub(&int(ring, 1))
    }

    /// Trig-method coefficient sets, cases 1 through 6. Unassigned wave
    /// number: mu2 stays symbolic.
    pub fn sg_case(case: u8, ring: &Arc<Ring>) -> BTreeMap<String, RatExpr> {
        assert!((1..=6).contains(&case));
        let d = dmu(ring);
        let g = gg(ring);
        let b1 = ve(ring, "beta1");
        let a1b1 = ve(ring, "alpha1").mul(&b1);
        let num = d.mul(&ab_m1(ring));
        let zero = int(ring, 0);
        let ii = RatExpr::constant(ring, GaussRat::i());

        let mut m = BTreeMap::new();
        m.insert("a1".into(), zero.clone());
        m.insert("b1".into(), zero.clone());
        m.insert("mu2".into(), ve(ring, "mu2"));

        match case {
            1 => {
                let p = num.div(
                    &g.mul(&b1)
                        .mul(&int(ring, 3))
                        .mul(&int(ring, 1).add(&d.mul(&int(ring, 2)))),
                );
                m.insert("a0".into(), p.neg());
                m.insert("a2".into(), p.mul(&int(ring, 3)));
                m.insert("b2".into(), zero);
                m.insert(
                    "lam2".into(),
                    a1b1.add(&d.mul(&int(ring, 2)))
                        .div(&b1.mul(&int(ring, 1).add(&d.mul(&int(ring, 2))))),
                );
            }
            2 => {
                let a0 = num.div(&g.mul(&b1).mul(&d.mul(&int(ring, 2)).sub(&int(ring, 1))));
                m.insert("a0".into(), a0.clone());
                m.insert("a2".into(), a0.neg());
                m.insert("b2".into(), zero);
                m.insert(
                    "lam2".into(),
                    a1b1.sub(&d.mul(&int(ring, 2)))
                        .div(&b1.mul(&int(ring, 1).sub(&d.mul(&int(ring, 2))))),
                );
            }
            3 | 4 => {
                let a0 = num.div(&g.mul(&b1).mul(&d.sub(&int(ring, 2))));
                m.insert("a0".into(), a0.clone());
                m.insert("a2".into(), a0.neg());
                let b2 = a0.mul(&ii);
                m.insert("b2".into(), if case == 3 { b2 } else { b2.neg() });
                m.insert(
                    "lam2".into(),
                    a1b1.mul(&int(ring, 2))
                        .sub(&d)
                        .div(&b1.mul(&int(ring, 2).sub(&d))),
                );
            }
            _ => {
                let a2 = num.div(&g.mul(&b1).mul(&d.add(&int(ring, 2))));
                m.insert("a0".into(), a2.mul(&int(ring, -2)).div(&int(ring, 3)));
                m.insert("a2".into(), a2.clone());
                let b2 = a2.mul(&ii);
                m.insert("b2".into(), if case == 5 { b2 } else { b2.neg() });
                m.insert(
                    "lam2".into(),
                    a1b1.mul(&int(ring, 2))
                        .add(&d)
                        .div(&b1.mul(&int(ring, 2).add(&d))),
                );
            }
        }
        m
    }

    /// Exponential-method coefficient sets, cases 7 through 15, over the
    /// order-1 ring. Radical-bearing sets use the ring's rdelta and rlam
    /// variables, whose squares rewrite to the matching discriminants.
    pub fn mefm_case(case: u8, ring: &Arc<Ring>) -> BTreeMap<String, RatExpr> {
        assert!((7..=15).contains(&case));
        let d = dmu(ring);
        let g = gg(ring);
        let b1 = ve(ring, "beta1");
        let a1b1 = ve(ring, "alpha1").mul(&b1);
        let tau = ve(ring, "tau");
        let sigma = ve(ring, "sigma");
        let q0 = ve(ring, "q0");
        let q1 = ve(ring, "q1");
        // lam2 - alpha1
        let l = ve(ring, "lam2").sub(&ve(ring, "alpha1"));
        let delta_disc = tau.pow(2).sub(&sigma.mul(&int(ring, 4)));
        let zero = int(ring, 0);

        let mut m = BTreeMap::new();
        m.insert("q0".into(), q0.clone());
        m.insert("q1".into(), q1.clone());
        m.insert("lam2".into(), ve(ring, "lam2"));
        m.insert("mu2".into(), ve(ring, "mu2"));

        match case {
            7 | 8 => {
                // wave speed free, wave number dependent
                let sign = if case == 7 { 1 } else { -1 };
                let a = l.mul(&int(ring, 2 * sign)).div(&g.mul(&delta_disc));
                let head = if case == 7 {
                    // leading pair starts the quotient at sigma*Q0
                    a.mul(&sigma).mul(&q0)
                } else {
                    a.mul(&tau.pow(2).add(&sigma.mul(&int(ring, 2))))
                        .mul(&q0)
                        .div(&int(ring, 6))
                };
                let second = if case == 7 {
                    a.mul(&tau.mul(&q0).add(&sigma.mul(&q1)))
                } else {
                    a.mul(
                        &tau.mul(&q0).add(
                            &tau.pow(2)
                                .add(&sigma.mul(&int(ring, 2)))
                                .mul(&q1)
                                .div(&int(ring, 6)),
                        ),
                    )
                };
                m.insert("p0".into(), head);
                m.insert("p1".into(), second);
                m.insert("p2".into(), a.mul(&q0.add(&tau.mul(&q1))));
                m.insert("p3".into(), a.mul(&q1));
                m.insert(
                    "mu2".into(),
                    l.mul(&b1).mul(&int(ring, 2 * sign)).div(
                        &ve(ring, "n1sq")
                            .mul(&ve(ring, "delta"))
                            .mul(&ve(ring, "lam2").mul(&b1).sub(&int(ring, 1)))
                            .mul(&delta_disc),
                    ),
                );
            }
            9 | 10 => {
                // denominator root pinned to a root of the auxiliary flow
                let rdelta = ve(ring, "rdelta");
                let root = if case == 9 {
                    tau.add(&rdelta).div(&int(ring, 2))
                } else {
                    tau.sub(&rdelta).div(&int(ring, 2))
                };
                let h = int(ring, 2).add(&d.mul(&delta_disc));
                let mm = d
                    .mul(&delta_disc)
                    .mul(&ab_m1(ring))
                    .div(&g.mul(&b1).mul(&h).mul(&int(ring, 3)));
                m.insert("q0".into(), root.mul(&q1));
                m.insert("p0".into(), mm.mul(&root).mul(&q1));
                m.insert("p1".into(), mm.mul(&q1));
                m.insert("p2".into(), zero.clone());
                m.insert("p3".into(), zero);
                m.insert(
                    "lam2".into(),
                    a1b1.mul(&int(ring, 2))
                        .add(&d.mul(&delta_disc))
                        .div(&b1.mul(&h)),
                );
            }
            11 | 12 => {
                // both root symbols in play: quartic discriminant radical
                let rl = ve(ring, "rlam");
                let lam_quartic = rl.pow(2);
                let den = g.mul(&b1).mul(&int(ring, 12));
                let (s_num, p1_inner, mu_sign) = if case == 11 {
                    let s_num = q0
                        .pow(5)
                        .mul(&int(ring, -12))
                        .add(&q1.mul(&tau).mul(&q0.pow(4)).mul(&int(ring, 24)))
                        .add(
                            &q1.pow(2)
                                .mul(&sigma)
                                .mul(&int(ring, -24))
                                .add(&rl.mul(&int(ring, 6)))
                                .add(&q1.pow(2).mul(&tau.pow(2)).mul(&int(ring, -12)))
                                .mul(&q0.pow(3)),
                        )
                        .add(
                            &q1.mul(&tau)
                                .mul(&rl)
                                .mul(&int(ring, -12))
                                .add(&sigma.mul(&tau).mul(&q1.pow(3)).mul(&int(ring, 24)))
                                .mul(&q0.pow(2)),
                        )
                        .add(
                            &q1.pow(2)
                                .mul(&tau.pow(2))
                                .mul(&rl)
                                .mul(&int(ring, 5))
                                .add(&q1.pow(2).mul(&sigma).mul(&rl).mul(&int(ring, 10)))
                                .add(&q1.pow(4).mul(&sigma.pow(2)).mul(&int(ring, 4)))
                                .add(&q1.pow(4).mul(&tau.pow(4)))
                                .add(&q1.pow(4).mul(&tau.pow(2)).mul(&sigma).mul(&int(ring, -8)))
                                .mul(&q0),
                        )
                        .add(&q1.pow(3).mul(&sigma).mul(&tau).mul(&rl).mul(&int(ring, -6)));
                    let p1_inner = rl
                        .sub(&q1.pow(2).mul(&tau.pow(2)))
                        .sub(&q1.pow(2).mul(&sigma).mul(&int(ring, 2)))
                        .add(&q0.mul(&q1).mul(&tau).mul(&int(ring, 6)))
                        .sub(&q0.pow(2).mul(&int(ring, 6)));
                    (s_num, p1_inner, -1)
                } else {
                    let s_num = q0
                        .pow(5)
                        .mul(&int(ring, 12))
                        .add(&q1.mul(&tau).mul(&q0.pow(4)).mul(&int(ring, -24)))
                        .add(
                            &q1.pow(2)
                                .mul(&sigma)
                                .mul(&int(ring, 24))
                                .add(&rl.mul(&int(ring, 6)))
                                .add(&q1.pow(2).mul(&tau.pow(2)).mul(&int(ring, 12)))
                                .mul(&q0.pow(3)),
                        )
                        .add(
                            &q1.mul(&tau)
                                .mul(&rl)
                                .mul(&int(ring, -12))
                                .add(&sigma.mul(&tau).mul(&q1.pow(3)).mul(&int(ring, -24)))
                                .mul(&q0.pow(2)),
                        )
                        .add(
                            &q1.pow(2)
                                .mul(&tau.pow(2))
                                .mul(&rl)
                                .mul(&int(ring, 5))
                                .add(&q1.pow(2).mul(&sigma).mul(&rl).mul(&int(ring, 10)))
                                .add(&q1.pow(4).mul(&sigma.pow(2)).mul(&int(ring, -4)))
                                .add(&q1.pow(4).mul(&tau.pow(4)).neg())
                                .add(&q1.pow(4).mul(&tau.pow(2)).mul(&sigma).mul(&int(ring, 8)))
                                .mul(&q0),
                        )
                        .add(&q1.pow(3).mul(&sigma).mul(&tau).mul(&rl).mul(&int(ring, -6)));
                    let p1_inner = rl
                        .add(&q1.pow(2).mul(&tau.pow(2)))
                        .add(&q1.pow(2).mul(&sigma).mul(&int(ring, 2)))
                        .sub(&q0.mul(&q1).mul(&tau).mul(&int(ring, 6)))
                        .add(&q0.pow(2).mul(&int(ring, 6)));
                    (s_num, p1_inner, 1)
                };
                let p0_sign = if case == 11 { 1 } else { -1 };
                m.insert(
                    "p0".into(),
                    ab_m1(ring)
                        .mul(&int(ring, p0_sign))
                        .mul(&s_num)
                        .div(&den.mul(&lam_quartic)),
                );
                m.insert(
                    "p1".into(),
                    q1.mul(&ab_m1(ring)).mul(&p1_inner).div(&den.mul(&rl)),
                );
                m.insert("p2".into(), zero.clone());
                m.insert("p3".into(), zero);
                m.insert(
                    "lam2".into(),
                    a1b1.add(&int(ring, 1)).div(&b1.mul(&int(ring, 2))),
                );
                m.insert(
                    "mu2".into(),
                    q1.pow(2)
                        .mul(&int(ring, 2 * mu_sign))
                        .div(&ve(ring, "delta").mul(&ve(ring, "n1sq")).mul(&rl)),
                );
            }
            13 | 14 => {
                // sigma = 0 flow; c := Dmu tau^2
                let c = d.mul(&tau.pow(2));
                if case == 13 {
                    let a = d
                        .mul(&ab_m1(ring))
                        .mul(&int(ring, -2))
                        .div(&g.mul(&b1).mul(&c.sub(&int(ring, 2))));
                    m.insert("p0".into(), zero);
                    m.insert("p1".into(), a.mul(&tau).mul(&q0));
                    m.insert("p2".into(), a.mul(&q0.add(&tau.mul(&q1))));
                    m.insert("p3".into(), a.mul(&q1));
                    m.insert(
                        "lam2".into(),
                        c.sub(&a1b1.mul(&int(ring, 2)))
                            .div(&b1.mul(&c.sub(&int(ring, 2)))),
                    );
                } else {
                    let b = d
                        .mul(&ab_m1(ring))
                        .mul(&int(ring, 2))
                        .div(&g.mul(&b1).mul(&c.add(&int(ring, 2))));
                    m.insert("p0".into(), b.mul(&tau.pow(2)).mul(&q0).div(&int(ring, 6)));
                    m.insert(
                        "p1".into(),
                        b.mul(&tau.mul(&q0).add(&tau.pow(2).mul(&q1).div(&int(ring, 6)))),
                    );
                    m.insert("p2".into(), b.mul(&q0.add(&tau.mul(&q1))));
                    m.insert("p3".into(), b.mul(&q1));
                    m.insert(
                        "lam2".into(),
                        a1b1.mul(&int(ring, 2))
                            .add(&c)
                            .div(&b1.mul(&c.add(&int(ring, 2)))),
                    );
                }
            }
            _ => {
                // constant solution: u = -(lam2 - alpha1)/(3 alpha2 eps)
                let r = l.neg().div(&g.mul(&int(ring, 3)));
                m.insert("p0".into(), r.mul(&q0));
                m.insert("p1".into(), r.mul(&q1));
                m.insert("p2".into(), zero.clone());
                m.insert("p3".into(), zero);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet, DEFAULT_POLE_FLOOR};
    use proptest::prelude::*;

    fn all_zero(residuals: &[MPoly]) -> bool {
        residuals.iter().all(MPoly::is_zero)
    }

    // -------------------- Gaussian rationals --------------------

    #[test]
    fn gauss_rat_is_a_field() {
        let i = GaussRat::i();
        assert_eq!(i.mul(&i), GaussRat::from_int(-1));
        let z = GaussRat::new(rat(3, 4), rat(-2, 5));
        assert_eq!(z.mul(&z.inv()), GaussRat::one());
        assert_eq!(z.sub(&z), GaussRat::zero());
        assert_eq!(z.add(&z.neg()), GaussRat::zero());
    }

    // -------------------- polynomials --------------------

    #[test]
    fn square_relation_rewrites() {
        // test ring: r^2 = x
        let names = ["x", "r"];
        let mut rel = Terms::new();
        rel.insert(vec![1, 0], GaussRat::one());
        let ring = Arc::new(Ring {
            vars: names.iter().map(|s| s.to_string()).collect(),
            sq_rels: BTreeMap::from([(1usize, rel)]),
        });
        let r = MPoly::var(&ring, "r");
        let x = MPoly::var(&ring, "x");
        let one = MPoly::int(&ring, 1);
        // (r+1)^2 = x + 2r + 1
        let sq = r.add(&one).pow(2);
        let expect = x.add(&r.scale(&GaussRat::from_int(2))).add(&one);
        assert_eq!(sq, expect);
        // r^4 = x^2
        assert_eq!(r.pow(4), x.pow(2));
    }

    #[test]
    fn constant_value_detection() {
        let ring = Ring::new(&["x"]);
        assert_eq!(MPoly::zero(&ring).constant_value(), Some(GaussRat::zero()));
        assert_eq!(
            MPoly::int(&ring, 7).constant_value(),
            Some(GaussRat::from_int(7))
        );
        assert_eq!(MPoly::var(&ring, "x").constant_value(), None);
    }

    proptest! {
        #[test]
        fn mpoly_ring_laws(
            ta in prop::collection::vec((0u8..3, 0u8..3, -5i64..5), 1..4),
            tb in prop::collection::vec((0u8..3, 0u8..3, -5i64..5), 1..4),
            tc in prop::collection::vec((0u8..3, 0u8..3, -5i64..5), 1..4),
        ) {
            let ring = Ring::new(&["x", "y"]);
            let build = |ts: &[(u8, u8, i64)]| {
                let mut p = MPoly::zero(&ring);
                for &(ex, ey, c) in ts {
                    let mono = MPoly::var(&ring, "x").pow(ex)
                        .mul(&MPoly::var(&ring, "y").pow(ey))
                        .scale(&GaussRat::from_int(c));
                    p = p.add(&mono);
                }
                p
            };
            let a = build(&ta);
            let b = build(&tb);
            let c = build(&tc);
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
        }
    }

    // -------------------- derivations are derivations --------------------

    fn rat_trig(seed: &mut u64) -> TrigElement {
        let ring = Ring::new(&[]);
        let mut next = || {
            let mut x = *seed;
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            *seed = x;
            MPoly::rational(&ring, rat((x % 11) as i64 - 5, 1 + (x % 7) as i64))
        };
        let even = (0..4).map(|_| next()).collect();
        let odd = (0..3).map(|_| next()).collect();
        TrigElement::new(even, odd, &ring)
    }

    #[test]
    fn trig_derivation_satisfies_leibniz() {
        let mut seed = 0x9e3779b97f4a7c15;
        for _ in 0..60 {
            let f = rat_trig(&mut seed);
            let g = rat_trig(&mut seed);
            let lhs = f.mul(&g).derive();
            let rhs = f.derive().mul(&g).add(&f.mul(&g.derive()));
            assert!(lhs == rhs, "product rule must hold exactly");
        }
    }

    #[test]
    fn e_element_derivation_satisfies_leibniz() {
        let ring = Ring::new(&["tau", "sigma"]);
        let tau = MPoly::var(&ring, "tau");
        let sigma = MPoly::var(&ring, "sigma");
        let mk = |num: Vec<i64>, den: Vec<i64>| {
            EElement::new(
                num.into_iter().map(|n| MPoly::int(&ring, n)).collect(),
                den.into_iter().map(|n| MPoly::int(&ring, n)).collect(),
                tau.clone(),
                sigma.clone(),
                &ring,
            )
        };
        let cases = [
            (
                mk(vec![1, -2, 0, 3], vec![2, 1]),
                mk(vec![0, 1], vec![1, 1, 1]),
            ),
            (mk(vec![5], vec![1, 0, 2]), mk(vec![-1, 1, 4], vec![3])),
            (
                mk(vec![2, 7], vec![1, -1]),
                mk(vec![1, 1, 1, 1], vec![2, -3]),
            ),
        ];
        for (f, g) in cases {
            let lhs = f.mul(&g).derive();
            let rhs = f.derive().mul(&g).add(&f.mul(&g.derive()));
            assert!(lhs.equivalent(&rhs), "product rule must hold exactly");
        }
    }

    #[test]
    fn trig_derivation_matches_jet_differentiation() {
        // realize the flow w' = sin w: c = cos w = tanh(-xi), s = sech(xi)
        let mut seed = 0xfeed5eed;
        for _ in 0..10 {
            let t = rat_trig(&mut seed);
            let dt = t.derive();
            let ddt = dt.derive();
            for xi in [-1.3, -0.4, 0.2, 0.9, 2.1] {
                let x = Jet::variable(Complex64::new(xi, 0.0));
                let c = (-x).tanh();
                let s = x.sech(DEFAULT_POLE_FLOOR).unwrap();
                let f = eval_trig(&t, c, s);
                let f1 = eval_trig(&dt, c, s);
                let f2 = eval_trig(&ddt, c, s);
                assert!((f.derivative(1) - f1.value()).norm() < 1e-10);
                assert!((f.derivative(2) - f2.value()).norm() < 1e-10);
            }
        }
    }

    fn eval_trig(t: &TrigElement, c: Jet, s: Jet) -> Jet {
        let horner = |deg: Option<usize>, coeff: &dyn Fn(usize) -> MPoly| -> Jet {
            let Some(d) = deg else { return Jet::zero() };
            let mut acc = Jet::zero();
            for k in (0..=d).rev() {
                let cv = coeff(k).constant_value().unwrap().to_c64();
                acc = acc * c + Jet::constant(cv);
            }
            acc
        };
        let a = horner(t.even_degree(), &|k| t.even_coeff(k));
        let b = horner(t.odd_degree(), &|k| t.odd_coeff(k));
        a + s * b
    }

    #[test]
    fn exponential_to_hyperbolic_identities() {
        // 2e^xi/(e^{2xi}+1) = sech xi and (e^{2xi}-1)/(e^{2xi}+1) = tanh xi
        let mut seed = 0xabcdef12345u64;
        for _ in 0..100 {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            let xi = -3.0 + 6.0 * ((seed >> 11) as f64 / (1u64 << 53) as f64);
            let e2 = (2.0 * xi).exp();
            assert!((2.0 * xi.exp() / (e2 + 1.0) - 1.0 / xi.cosh()).abs() < 1e-12);
            assert!(((e2 - 1.0) / (e2 + 1.0) - xi.tanh()).abs() < 1e-12);
        }
    }

    // -------------------- system generation --------------------

    #[test]
    fn balance_results() {
        assert_eq!(
            balance(MethodKind::SineGordon, None),
            Some(Balance { n: 2, m: None })
        );
        assert_eq!(
            balance(MethodKind::Mefm, Some(1)),
            Some(Balance { n: 3, m: Some(1) })
        );
        assert_eq!(
            balance(MethodKind::Mefm, Some(2)),
            Some(Balance { n: 4, m: Some(2) })
        );
        assert_eq!(balance(MethodKind::Mefm, None), None);
        assert_eq!(balance(MethodKind::Mefm, Some(0)), None);
    }

    #[test]
    fn sg_system_has_nine_equations_seven_unknowns() {
        let sys = build_sg_system();
        assert_eq!(sys.equations.len(), 9);
        assert_eq!(sys.unknowns.len(), 7);
        let labels: Vec<&str> = sys.equations.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(
            labels,
            ["c^0", "c^1", "c^2", "c^3", "c^4", "s*c^0", "s*c^1", "s*c^2", "s*c^3"]
        );
    }

    struct SgVals {
        a0: i128,
        a1: i128,
        a2: i128,
        b1: i128,
        b2: i128,
        l2: i128,
        m2: i128,
        n2: i128,
        de: i128,
        be: i128,
        al1: i128,
        al2: i128,
        ep: i128,
    }

    /// Reference expansion computed independently at high precision and
    /// frozen here; the engine must reproduce it exactly.
    fn sg_frozen(label: &str, v: &SgVals) -> i128 {
        let SgVals {
            a0,
            a1,
            a2,
            b1,
            b2,
            l2,
            m2,
            n2,
            de,
            be,
            al1,
            al2,
            ep,
        } = *v;
        let k = de * m2 * n2;
        let gbe = al2 * be * ep;
        match label {
            "c^0" => {
                6 * a0 * a0 * gbe - 2 * a0 * al1 * be + 2 * a0 * be * l2 - 2 * a2 * be * k * l2
                    + 2 * a2 * k
                    + 6 * b1 * b1 * gbe
            }
            "c^1" => {
                12 * a0 * a1 * gbe - 2 * a1 * al1 * be + 2 * a1 * be * k * l2 + 2 * a1 * be * l2
                    - 2 * a1 * k
                    + 12 * b1 * b2 * gbe
            }
            "c^2" => {
                12 * a0 * a2 * gbe + 6 * a1 * a1 * gbe - 2 * a2 * al1 * be
                    + 8 * a2 * be * k * l2
                    + 2 * a2 * be * l2
                    - 8 * a2 * k
                    - 6 * b1 * b1 * gbe
                    + 6 * b2 * b2 * gbe
            }
            "c^3" => 12 * a1 * a2 * gbe - 2 * a1 * be * k * l2 + 2 * a1 * k - 12 * b1 * b2 * gbe,
            "c^4" => 6 * a2 * a2 * gbe - 6 * a2 * be * k * l2 + 6 * a2 * k - 6 * b2 * b2 * gbe,
            "s*c^0" => {
                12 * a0 * b1 * gbe - 2 * b1 * al1 * be + b1 * be * k * l2 + 2 * b1 * be * l2
                    - b1 * k
            }
            "s*c^1" => {
                12 * a0 * b2 * gbe + 12 * a1 * b1 * gbe - 2 * b2 * al1 * be
                    + 5 * b2 * be * k * l2
                    + 2 * b2 * be * l2
                    - 5 * b2 * k
            }
            "s*c^2" => 12 * a1 * b2 * gbe + 12 * a2 * b1 * gbe - 2 * b1 * be * k * l2 + 2 * b1 * k,
            "s*c^3" => 12 * a2 * b2 * gbe - 6 * b2 * be * k * l2 + 6 * b2 * k,
            other => panic!("no frozen equation {other}"),
        }
    }

    #[test]
    fn sg_system_matches_frozen_expansion() {
        let sys = build_sg_system();
        let mut seed = 0x12345678u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 9) as i128 - 4
        };
        for _ in 0..12 {
            let v = SgVals {
                a0: next(),
                a1: next(),
                a2: next(),
                b1: next(),
                b2: next(),
                l2: next(),
                m2: next(),
                n2: next(),
                de: next(),
                be: next(),
                al1: next(),
                al2: next(),
                ep: next(),
            };
            let vals: Vec<GaussRat> = [
                v.a0, v.a1, v.a2, v.b1, v.b2, v.l2, v.m2, v.n2, v.de, v.be, v.al1, v.al2, v.ep,
            ]
            .iter()
            .map(|&x| GaussRat::from_int(x as i64))
            .collect();
            for eq in &sys.equations {
                let got = eq.poly.eval_exact(&vals);
                let want = GaussRat::from_int(sg_frozen(&eq.label, &v) as i64);
                assert_eq!(got, want, "equation {} diverges", eq.label);
            }
        }
    }

    #[test]
    fn sg_pure_even_reduction() {
        // with A1 = B1 = 0 every surviving odd equation involves B2
        let sys = build_sg_system();
        let ring = &sys.ring;
        let mut assignment = BTreeMap::new();
        for name in ["a0", "a2", "b2", "lam2", "mu2"] {
            assignment.insert(name.to_string(), RatExpr::var(ring, name));
        }
        assignment.insert("a1".into(), RatExpr::int(ring, 0));
        assignment.insert("b1".into(), RatExpr::int(ring, 0));
        let residuals = check_candidate(&sys, &assignment).unwrap();
        for (eq, res) in sys.equations.iter().zip(&residuals) {
            if eq.label.starts_with("s*") {
                assert!(
                    res.is_zero() || res.every_term_involves("b2"),
                    "odd equation {} kept a term without b2",
                    eq.label
                );
            }
        }
        assert!(!all_zero(&residuals), "even equations must survive");
    }

    #[test]
    fn mefm_counts_measured() {
        // the order-1 system matches the claimed count; the higher orders
        // are larger than claimed, which the acceptance suite reports
        let measured: Vec<(u32, usize, usize)> = (1..=3)
            .map(|m| {
                let sys = build_mefm_system(m, AuxVariant::Full);
                (m, sys.equations.len(), sys.unknowns.len())
            })
            .collect();
        assert_eq!(measured, vec![(1, 8, 8), (2, 11, 10), (3, 14, 12)]);
        assert_eq!(theorem1_counts(1), (8, 8));
        assert_eq!(theorem1_counts(2), (9, 10));
        assert_eq!(theorem1_counts(3), (10, 12));
    }

    #[test]
    fn mefm_labels_are_contiguous_powers() {
        let sys = build_mefm_system(1, AuxVariant::Full);
        let labels: Vec<&str> = sys.equations.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(
            labels,
            ["E^0", "E^1", "E^2", "E^3", "E^4", "E^5", "E^6", "E^7"]
        );
    }

    struct MeVals {
        p0: i128,
        p1: i128,
        p2: i128,
        p3: i128,
        q0: i128,
        q1: i128,
        l2: i128,
        m2: i128,
        ta: i128,
        si: i128,
        n2: i128,
        de: i128,
        be: i128,
        al1: i128,
        al2: i128,
        ep: i128,
    }

    /// Frozen reference coefficients for the order-1 full system.
    fn mefm_frozen(label: &str, v: &MeVals) -> Option<i128> {
        let MeVals {
            p0,
            p1,
            p2,
            p3,
            q0,
            q1,
            l2,
            m2,
            ta,
            si,
            n2,
            de,
            be,
            al1,
            al2,
            ep,
        } = *v;
        let k = de * m2 * n2;
        let gbe = al2 * be * ep;
        match label {
            "E^0" => Some(
                6 * p0 * p0 * q0 * gbe - 2 * p0 * q0 * q0 * al1 * be
                    + 2 * p0 * q0 * q0 * be * l2
                    + p0 * q0 * q1 * be * k * l2 * si * ta
                    - p0 * q0 * q1 * k * si * ta
                    - 2 * p0 * q1 * q1 * be * k * l2 * si * si
                    + 2 * p0 * q1 * q1 * k * si * si
                    - p1 * q0 * q0 * be * k * l2 * si * ta
                    + p1 * q0 * q0 * k * si * ta
                    + 2 * p1 * q0 * q1 * be * k * l2 * si * si
                    - 2 * p1 * q0 * q1 * k * si * si
                    - 2 * p2 * q0 * q0 * be * k * l2 * si * si
                    + 2 * p2 * q0 * q0 * k * si * si,
            ),
            "E^1" => Some(
                6 * p0 * p0 * q1 * gbe + 12 * p0 * p1 * q0 * gbe - 4 * p0 * q0 * q1 * al1 * be
                    + 2 * p0 * q0 * q1 * be * k * l2 * si
                    + p0 * q0 * q1 * be * k * l2 * ta * ta
                    + 4 * p0 * q0 * q1 * be * l2
                    - 2 * p0 * q0 * q1 * k * si
                    - p0 * q0 * q1 * k * ta * ta
                    - 3 * p0 * q1 * q1 * be * k * l2 * si * ta
                    + 3 * p0 * q1 * q1 * k * si * ta
                    - 2 * p1 * q0 * q0 * al1 * be
                    - 2 * p1 * q0 * q0 * be * k * l2 * si
                    - p1 * q0 * q0 * be * k * l2 * ta * ta
                    + 2 * p1 * q0 * q0 * be * l2
                    + 2 * p1 * q0 * q0 * k * si
                    + p1 * q0 * q0 * k * ta * ta
                    + 3 * p1 * q0 * q1 * be * k * l2 * si * ta
                    - 3 * p1 * q0 * q1 * k * si * ta
                    - 6 * p2 * q0 * q0 * be * k * l2 * si * ta
                    + 6 * p2 * q0 * q0 * k * si * ta
                    - 6 * p3 * q0 * q0 * be * k * l2 * si * si
                    + 6 * p3 * q0 * q0 * k * si * si,
            ),
            "E^7" => {
                Some(6 * p3 * p3 * q1 * gbe - 6 * p3 * q1 * q1 * be * k * l2 + 6 * p3 * q1 * q1 * k)
            }
            _ => None,
        }
    }

    #[test]
    fn mefm_system_matches_frozen_expansion() {
        let sys = build_mefm_system(1, AuxVariant::Full);
        let ring = &sys.ring;
        let mut seed = 0x87654321u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 7) as i128 - 3
        };
        for _ in 0..12 {
            let v = MeVals {
                p0: next(),
                p1: next(),
                p2: next(),
                p3: next(),
                q0: next(),
                q1: next(),
                l2: next(),
                m2: next(),
                ta: next(),
                si: next(),
                n2: next(),
                de: next(),
                be: next(),
                al1: next(),
                al2: next(),
                ep: next(),
            };
            // radical slots must be consistent with their squares; both are
            // zero-exponent in generated systems, so any value works
            let mut vals: Vec<GaussRat> = Vec::new();
            for name in ring.vars() {
                let x = match name.as_str() {
                    "p0" => v.p0,
                    "p1" => v.p1,
                    "p2" => v.p2,
                    "p3" => v.p3,
                    "q0" => v.q0,
                    "q1" => v.q1,
                    "lam2" => v.l2,
                    "mu2" => v.m2,
                    "tau" => v.ta,
                    "sigma" => v.si,
                    "n1sq" => v.n2,
                    "delta" => v.de,
                    "beta1" => v.be,
                    "alpha1" => v.al1,
                    "alpha2" => v.al2,
                    "eps" => v.ep,
                    _ => 0,
                };
                vals.push(GaussRat::from_int(x as i64));
            }
            for eq in &sys.equations {
                if let Some(want) = mefm_frozen(&eq.label, &v) {
                    let got = eq.poly.eval_exact(&vals);
                    assert_eq!(
                        got,
                        GaussRat::from_int(want as i64),
                        "equation {}",
                        eq.label
                    );
                }
            }
        }
    }

    #[test]
    fn mefm_aux_variants_specialize() {
        let sig0 = build_mefm_system(1, AuxVariant::Sigma0);
        for eq in &sig0.equations {
            assert_eq!(eq.poly.degree_in("sigma"), 0, "{} kept sigma", eq.label);
        }
        let both0 = build_mefm_system(1, AuxVariant::Both0);
        for eq in &both0.equations {
            assert_eq!(eq.poly.degree_in("sigma"), 0);
            assert_eq!(eq.poly.degree_in("tau"), 0);
        }
        // discrim0 keeps tau but no sigma
        let disc0 = build_mefm_system(1, AuxVariant::Discrim0);
        assert!(disc0
            .equations
            .iter()
            .all(|e| e.poly.degree_in("sigma") == 0));
        assert!(disc0.equations.iter().any(|e| e.poly.degree_in("tau") > 0));
    }

    // -------------------- candidate checks --------------------

    #[test]
    fn all_six_trig_cases_annihilate() {
        let sys = build_sg_system();
        for case in 1..=6 {
            let assignment = candidates::sg_case(case, &sys.ring);
            let residuals = check_candidate(&sys, &assignment).unwrap();
            assert!(all_zero(&residuals), "trig case {case} left a residual");
        }
    }

    #[test]
    fn perturbed_case_fails() {
        let sys = build_sg_system();
        let mut assignment = candidates::sg_case(1, &sys.ring);
        let a2 = assignment["a2"].clone();
        assignment.insert("a2".into(), a2.mul(&RatExpr::int(&sys.ring, 2)));
        let residuals = check_candidate(&sys, &assignment).unwrap();
        assert!(!all_zero(&residuals), "non-solution must leave a residual");
    }

    #[test]
    fn incomplete_assignment_is_an_error() {
        let sys = build_sg_system();
        let mut assignment = candidates::sg_case(1, &sys.ring);
        assignment.remove("lam2");
        match check_candidate(&sys, &assignment) {
            Err(CasError::IncompleteAssignment { missing }) => assert_eq!(missing, "lam2"),
            other => panic!("expected IncompleteAssignment, got {other:?}"),
        }
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let sys = build_sg_system();
        let mut assignment = candidates::sg_case(1, &sys.ring);
        assignment.insert("bogus".into(), RatExpr::int(&sys.ring, 0));
        assert!(matches!(
            check_candidate(&sys, &assignment),
            Err(CasError::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn exponential_cases_seven_eight_annihilate() {
        let sys = build_mefm_system(1, AuxVariant::Full);
        for case in [7u8, 8] {
            let assignment = candidates::mefm_case(case, &sys.ring);
            let residuals = check_candidate(&sys, &assignment).unwrap();
            assert!(all_zero(&residuals), "case {case} left a residual");
        }
    }

    #[test]
    fn exponential_cases_nine_ten_annihilate_with_radical() {
        let sys = build_mefm_system(1, AuxVariant::Full);
        for case in [9u8, 10] {
            let assignment = candidates::mefm_case(case, &sys.ring);
            let residuals = check_candidate(&sys, &assignment).unwrap();
            assert!(all_zero(&residuals), "case {case} left a residual");
        }
    }

    #[test]
    fn exponential_cases_eleven_twelve_do_not_annihilate() {
        // the published coefficient pair leaves an exact non-zero residual
        // in the constant equation; kept as a documented flag, the numeric
        // verifier reports it too
        let sys = build_mefm_system(1, AuxVariant::Full);
        for case in [11u8, 12] {
            let assignment = candidates::mefm_case(case, &sys.ring);
            let residuals = check_candidate(&sys, &assignment).unwrap();
            assert!(
                !all_zero(&residuals),
                "case {case} unexpectedly annihilates"
            );
            assert!(
                !residuals[0].is_zero(),
                "case {case}: the E^0 equation is the failing one"
            );
        }
    }

    #[test]
    fn exponential_sigma_zero_cases_annihilate() {
        let sys = build_mefm_system(1, AuxVariant::Sigma0);
        for case in [13u8, 14] {
            let assignment = candidates::mefm_case(case, &sys.ring);
            let residuals = check_candidate(&sys, &assignment).unwrap();
            assert!(all_zero(&residuals), "case {case} left a residual");
        }
    }

    #[test]
    fn constant_case_annihilates_both_flows() {
        for aux in [AuxVariant::Full, AuxVariant::Sigma0] {
            let sys = build_mefm_system(1, aux);
            let assignment = candidates::mefm_case(15, &sys.ring);
            let residuals = check_candidate(&sys, &assignment).unwrap();
            assert!(all_zero(&residuals), "constant case left a residual");
        }
    }

    // -------------------- serialization --------------------

    #[test]
    fn system_serialization_shape() {
        let sys = build_sg_system();
        let v = sys.to_json();
        assert_eq!(v["kind"], "sg");
        assert_eq!(v["equations"].as_array().unwrap().len(), 9);
        // c^4 contains the monomial 6 * a2^2 * alpha2 * beta1 * eps
        let c4 = &v["equations"][4];
        assert_eq!(c4["label"], "c^4");
        let coeffs = c4["coefficients"].as_object().unwrap();
        // ring order: a0 a1 a2 b1 b2 lam2 mu2 n1sq delta beta1 alpha1 alpha2 eps
        let key = "0,0,2,0,0,0,0,0,0,1,0,1,1";
        assert_eq!(coeffs[key], "6");
        let parsed: Value = serde_json::from_str(&v.to_string()).unwrap();
        assert_eq!(parsed, v);
    }
}

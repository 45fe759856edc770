//! Sparse homogeneous polynomials with rational coefficients, the
//! generating polynomials of set functions and matroids, and the Lorentzian
//! test through codegree-2 Hessians.
//!
//! Terms are kept in lexicographic monomial order with `x0 > x1 > ...`, so
//! `x0^d` comes first. Witnesses always refer to the first offender in this
//! order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bits;
use crate::exactnum::{binomial, factorial, fmt_rational, ExtValue, NumError, QWeight, Rational};
use crate::matroid::Matroid;
use crate::setfn::{from_matroid, MatroidFunction, SetFunction};
use crate::symmat::{inertia_by_elimination, Inertia, SymMatrix};
use crate::verdict::Verdict;

/// Default bound on `|Δ_n^{d-2}|` for [`is_lorentzian`].
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("exponent {exp:?} has {got} entries, expected {expected}")]
    WrongArity {
        exp: Vec<u32>,
        expected: usize,
        got: usize,
    },
    #[error("exponent {exp:?} does not have degree {degree}")]
    NotHomogeneous { exp: Vec<u32>, degree: u32 },
    #[error("polynomials in {left} and {right} variables")]
    NvarsMismatch { left: usize, right: usize },
    #[error("polynomials of degree {left} and {right}")]
    DegreeMismatch { left: u32, right: u32 },
    #[error("{count} codegree-2 exponents exceed the cap of {cap}")]
    SizeCap { count: String, cap: u64 },
    #[error("variable {0} does not exist")]
    BadVariable(usize),
    #[error("expected a polynomial in 2 variables, got {0}")]
    NotBivariate(usize),
    #[error("empty domain")]
    EmptyDomain,
    #[error(transparent)]
    Num(#[from] NumError),
}

/// An exponent vector, ordered so that larger monomials in lex order sort
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<u32>);

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Deref for Exponent {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Exponent(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn plus(&self, other: &[u32]) -> Exponent {
        Exponent(self.0.iter().zip(other).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, if nonnegative.
    pub fn minus(&self, other: &[u32]) -> Option<Exponent> {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Exponent)
    }

    /// `self + e_j - e_i`, if nonnegative.
    pub fn exchange(&self, i: usize, j: usize) -> Option<Exponent> {
        if self.0[i] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        v[j] += 1;
        Some(Exponent(v))
    }

    /// `α!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&a| factorial(a)).product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Exponent, Rational>,
}

impl HomogPoly {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomogPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars, 0);
        p.add_term(Exponent::zero(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars, 1);
        p.add_term(Exponent::unit(nvars, i), Rational::one());
        p
    }

    /// Collects terms, summing repeated exponents and dropping zeros.
    pub fn from_terms(
        nvars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(nvars, degree);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(PolyError::WrongArity {
                    got: exp.len(),
                    exp,
                    expected: nvars,
                });
            }
            if exp.iter().sum::<u32>() != degree {
                return Err(PolyError::NotHomogeneous { exp, degree });
            }
            p.add_term(Exponent(exp), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[u32]) -> Rational {
        self.terms
            .get(&Exponent(exp.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    fn check_compatible(&self, other: &HomogPoly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(PolyError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &HomogPoly) -> Result<HomogPoly, PolyError> {
        self.check_compatible(other)?;
        let mut out = if self.is_zero() {
            other.clone()
        } else {
            self.clone()
        };
        if !self.is_zero() {
            for (e, c) in &other.terms {
                out.add_term(e.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HomogPoly) -> Result<HomogPoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> HomogPoly {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> HomogPoly {
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &HomogPoly) -> Result<HomogPoly, PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.plus(b), x * y);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> HomogPoly {
        let mut out = Self::constant(self.nvars, Rational::one());
        for _ in 0..k {
            out = out.mul(self).expect("same variables");
        }
        out
    }

    pub fn partial(&self, i: usize) -> HomogPoly {
        let mut alpha = vec![0; self.nvars];
        alpha[i] = 1;
        self.partial_multi(&alpha)
    }

    /// `∂^α f`; the zero polynomial when `|α| > d`.
    pub fn partial_multi(&self, alpha: &[u32]) -> HomogPoly {
        let k: u32 = alpha.iter().sum();
        if k > self.degree {
            return Self::zero(self.nvars, 0);
        }
        let mut out = Self::zero(self.nvars, self.degree - k);
        for (e, c) in &self.terms {
            if let Some(rest) = e.minus(alpha) {
                let falling: BigInt = e.factorial() / rest.factorial();
                out.add_term(rest, c * Rational::from_integer(falling));
            }
        }
        out
    }

    /// Replaces `x_i` by `y_{map[i]}` in a polynomial in `m` new variables.
    pub fn collapse_vars(&self, map: &[usize], m: usize) -> Result<HomogPoly, PolyError> {
        if map.len() != self.nvars {
            return Err(PolyError::WrongArity {
                exp: vec![],
                expected: self.nvars,
                got: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= m) {
            return Err(PolyError::BadVariable(bad));
        }
        let mut out = Self::zero(m, self.degree);
        for (e, c) in &self.terms {
            let mut v = vec![0u32; m];
            for (i, &a) in e.iter().enumerate() {
                v[map[i]] += a;
            }
            out.add_term(Exponent(v), c.clone());
        }
        Ok(out)
    }

    /// One fresh variable per block: `block_of[i]` is 0 or 1.
    pub fn specialize_bivariate(&self, block_of: &[usize]) -> Result<HomogPoly, PolyError> {
        self.collapse_vars(block_of, 2)
    }

    /// `x_i -> c_i x_i`.
    pub fn scale_vars(&self, c: &[Rational]) -> HomogPoly {
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, v) in &self.terms {
            let w = e
                .iter()
                .zip(c)
                .fold(v.clone(), |acc, (&a, ci)| acc * ci.pow(a as i32));
            out.add_term(e.clone(), w);
        }
        out
    }

    /// `f(A y)`: `x_i -> Σ_j a[i][j] y_j`, with `a` an `nvars x m` matrix.
    pub fn substitute(&self, a: &[Vec<Rational>]) -> Result<HomogPoly, PolyError> {
        if a.len() != self.nvars {
            return Err(PolyError::WrongArity {
                exp: vec![],
                expected: self.nvars,
                got: a.len(),
            });
        }
        let m = a.first().map_or(0, Vec::len);
        let forms: Vec<HomogPoly> = a
            .iter()
            .map(|row| {
                let mut p = Self::zero(m, 1);
                for (j, c) in row.iter().enumerate() {
                    p.add_term(Exponent::unit(m, j), c.clone());
                }
                p
            })
            .collect();
        let mut out = Self::zero(m, self.degree);
        for (e, c) in &self.terms {
            let mut prod = Self::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    prod = prod.mul(&forms[i].pow(k))?;
                }
            }
            out = out.add(&prod)?;
        }
        out.degree = self.degree;
        Ok(out)
    }

    /// `(f_0, ..., f_d)` with `f = Σ x_i^k f_k`, each in the other variables.
    pub fn coefficient_slices(&self, i: usize) -> Result<Vec<HomogPoly>, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::BadVariable(i));
        }
        let mut out: Vec<HomogPoly> = (0..=self.degree)
            .map(|k| Self::zero(self.nvars - 1, self.degree - k))
            .collect();
        for (e, c) in &self.terms {
            let mut rest = e.0.clone();
            let k = rest.remove(i);
            out[k as usize].add_term(Exponent(rest), c.clone());
        }
        Ok(out)
    }

    /// Coefficient of `Π x_{vars[t]}^{exp[t]}` as a polynomial in the
    /// remaining variables (kept in their original order).
    pub fn slice_monomial(&self, vars: &[usize], exp: &[u32]) -> Result<HomogPoly, PolyError> {
        if let Some(&bad) = vars.iter().find(|&&v| v >= self.nvars) {
            return Err(PolyError::BadVariable(bad));
        }
        let k: u32 = exp.iter().sum();
        let keep: Vec<usize> = (0..self.nvars).filter(|v| !vars.contains(v)).collect();
        let mut out = Self::zero(keep.len(), self.degree.saturating_sub(k));
        for (e, c) in &self.terms {
            if vars.iter().zip(exp).all(|(&v, &a)| e[v] == a) {
                out.add_term(Exponent(keep.iter().map(|&v| e[v]).collect()), c.clone());
            }
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (&a, xi)| acc * xi.pow(a as i32))
            })
            .sum()
    }

    /// The smallest coefficient, or zero for the zero polynomial.
    pub fn min_coefficient(&self) -> Rational {
        self.terms
            .values()
            .min()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            match (k, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| {
                    if a == 1 {
                        format!("x{i}")
                    } else {
                        format!("x{i}^{a}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `Z_{q,ν}(x, y) = Σ_S q^{-ν(S)} x^S y^{|E \ S|}`, with `y` the last variable.
pub fn z_poly(nu: &SetFunction, w: &QWeight) -> Result<HomogPoly, PolyError> {
    homogenized(nu, w, false)
}

/// `N(Z_{q,ν})`: as [`z_poly`] with the `y` power divided by its factorial.
pub fn nz_poly(nu: &SetFunction, w: &QWeight) -> Result<HomogPoly, PolyError> {
    homogenized(nu, w, true)
}

fn homogenized(nu: &SetFunction, w: &QWeight, normalize: bool) -> Result<HomogPoly, PolyError> {
    let n = nu.ground_size();
    let mut p = HomogPoly::zero(n + 1, n as u32);
    for s in 0..=bits::full(n) {
        let c = w.weight(nu.value(s))?;
        let k = (n - bits::size(s)) as u32;
        let c = if normalize {
            c / Rational::from_integer(factorial(k))
        } else {
            c
        };
        p.add_term(set_exponent(n, s, k), c);
    }
    Ok(p)
}

fn set_exponent(n: usize, s: bits::Mask, y: u32) -> Exponent {
    let mut v: Vec<u32> = (0..n).map(|i| bits::contains(s, i) as u32).collect();
    v.push(y);
    Exponent(v)
}

/// Homogeneous multivariate Tutte polynomial `Σ_S q^{-rk(S)} x^S y^{|E \ S|}`.
pub fn tutte_poly(m: &Matroid, w: &QWeight) -> Result<HomogPoly, PolyError> {
    z_poly(&from_matroid(m, MatroidFunction::Rank), w)
}

/// Homogeneous independent set generating polynomial `Σ_I x^I y^{|E \ I|}`.
pub fn indep_poly(m: &Matroid) -> HomogPoly {
    let n = m.ground_size();
    let mut p = HomogPoly::zero(n + 1, n as u32);
    for s in m.independent_sets() {
        p.add_term(
            set_exponent(n, s, (n - bits::size(s)) as u32),
            Rational::one(),
        );
    }
    p
}

/// A function `Δ_n^d -> Q ∪ {+inf}`, stored on its effective domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeFunction {
    nvars: usize,
    degree: u32,
    values: BTreeMap<Exponent, Rational>,
}

impl LatticeFunction {
    pub fn new(
        nvars: usize,
        degree: u32,
        entries: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self, PolyError> {
        let mut values = BTreeMap::new();
        for (exp, v) in entries {
            if exp.len() != nvars {
                return Err(PolyError::WrongArity {
                    got: exp.len(),
                    exp,
                    expected: nvars,
                });
            }
            if exp.iter().sum::<u32>() != degree {
                return Err(PolyError::NotHomogeneous { exp, degree });
            }
            values.insert(Exponent(exp), v);
        }
        if values.is_empty() {
            return Err(PolyError::EmptyDomain);
        }
        Ok(LatticeFunction {
            nvars,
            degree,
            values,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn get(&self, a: &Exponent) -> Option<&Rational> {
        self.values.get(a)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Exponent> {
        self.values.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.values.iter()
    }
}

/// `f_{q,ν} = Σ_{α ∈ dom ν} q^{ν(α)} x^α / α!`.
pub fn f_mconvex(nu: &LatticeFunction, w: &QWeight) -> Result<HomogPoly, PolyError> {
    let mut p = HomogPoly::zero(nu.nvars, nu.degree);
    for (a, v) in &nu.values {
        let c = w.weight(&ExtValue::Finite(-v))? / Rational::from_integer(a.factorial());
        p.add_term(a.clone(), c);
    }
    Ok(p)
}

/// `f_J = Σ_{α ∈ J} x^α / α!`.
pub fn f_set(nvars: usize, degree: u32, j: &[Exponent]) -> HomogPoly {
    let mut p = HomogPoly::zero(nvars, degree);
    for a in j {
        p.add_term(a.clone(), Rational::new(1.into(), a.factorial()));
    }
    p
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MConvexWitness {
    pub alpha: Exponent,
    pub beta: Exponent,
    pub i: usize,
}

/// Symmetric exchange for a set of lattice points of equal degree.
pub fn is_mconvex_set(j: &[Exponent]) -> Verdict<MConvexWitness> {
    let set: BTreeSet<&Exponent> = j.iter().collect();
    let sorted: Vec<&Exponent> = set.iter().copied().collect();
    let hit = sorted.par_iter().find_map_first(|&alpha| {
        for &beta in &sorted {
            for i in 0..alpha.len() {
                if alpha[i] <= beta[i] {
                    continue;
                }
                let ok = (0..alpha.len()).filter(|&k| beta[k] > alpha[k]).any(|k| {
                    let a2 = alpha.exchange(i, k).expect("alpha_i > 0");
                    let b2 = beta.exchange(k, i).expect("beta_k > 0");
                    set.contains(&a2) && set.contains(&b2)
                });
                if !ok {
                    return Some(MConvexWitness {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        i,
                    });
                }
            }
        }
        None
    });
    hit.into()
}

/// Exchange inequality `ν(α) + ν(β) >= ν(α + e_j - e_i) + ν(β + e_i - e_j)`
/// for some `j` with `β_j > α_j`; values outside the domain are `+inf`.
pub fn is_mconvex_function(nu: &LatticeFunction) -> Verdict<MConvexWitness> {
    let dom: Vec<(&Exponent, &Rational)> = nu.values.iter().collect();
    let hit = dom.par_iter().find_map_first(|&(alpha, va)| {
        for &(beta, vb) in &dom {
            let lhs = va + vb;
            for i in 0..nu.nvars {
                if alpha[i] <= beta[i] {
                    continue;
                }
                let ok = (0..nu.nvars).filter(|&k| beta[k] > alpha[k]).any(|k| {
                    let a2 = alpha.exchange(i, k).expect("alpha_i > 0");
                    let b2 = beta.exchange(k, i).expect("beta_k > 0");
                    match (nu.values.get(&a2), nu.values.get(&b2)) {
                        (Some(x), Some(y)) => lhs >= x + y,
                        _ => false,
                    }
                });
                if !ok {
                    return Some(MConvexWitness {
                        alpha: alpha.clone(),
                        beta: beta.clone(),
                        i,
                    });
                }
            }
        }
        None
    });
    hit.into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum LorentzianWitness {
    NegativeCoefficient {
        exp: Exponent,
        #[serde(with = "crate::exactnum::serde_rational")]
        c: Rational,
    },
    Support(MConvexWitness),
    /// The Hessian of `∂^α f` has more than one positive eigenvalue.
    Hessian {
        alpha: Exponent,
        inertia: Inertia,
    },
}

impl LorentzianWitness {
    /// Re-derives the failure from `f` independently of the search.
    pub fn recheck(&self, f: &HomogPoly) -> bool {
        match self {
            LorentzianWitness::NegativeCoefficient { exp, c } => {
                f.coefficient(exp) == *c && c.is_negative()
            }
            LorentzianWitness::Support(w) => {
                let supp = f.support();
                supp.contains(&w.alpha)
                    && supp.contains(&w.beta)
                    && is_mconvex_set(&supp).witness() == Some(w)
            }
            LorentzianWitness::Hessian { alpha, inertia } => {
                let g = f.partial_multi(alpha);
                let h = hessian(&g);
                let actual = crate::symmat::inertia(&h);
                actual == *inertia && actual.n_pos > 1
            }
        }
    }
}

/// Hessian of a quadratic form (constant matrix).
pub fn hessian(g: &HomogPoly) -> SymMatrix {
    let n = g.nvars();
    SymMatrix::from_fn(n, |i, j| {
        let mut e = vec![0u32; n];
        e[i] += 1;
        e[j] += 1;
        let c = g.coefficient(&e);
        if i == j {
            c * Rational::from_integer(2.into())
        } else {
            c
        }
    })
    .expect("variable count within the matrix cap")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LorentzianOptions {
    /// Upper bound on `|Δ_n^{d-2}|`.
    pub cap: u64,
    /// Eigenvalues at most this are treated as zero (float mode only).
    pub tolerance: Option<Rational>,
}

impl Default for LorentzianOptions {
    fn default() -> Self {
        LorentzianOptions {
            cap: DEFAULT_CAP,
            tolerance: None,
        }
    }
}

impl LorentzianOptions {
    pub fn for_weight(w: &QWeight) -> Self {
        LorentzianOptions {
            cap: DEFAULT_CAP,
            tolerance: (!w.is_certifying()).then(|| w.tolerance()),
        }
    }
}

/// Lorentzian test: nonnegative coefficients, M-convex support, and for
/// every `α ∈ Δ_n^{d-2}` a Hessian of `∂^α f` with at most one positive
/// eigenvalue. Exponents `α` with `∂^α f = 0` pass trivially and are skipped.
pub fn is_lorentzian(
    f: &HomogPoly,
    opts: &LorentzianOptions,
) -> Result<Verdict<LorentzianWitness>, PolyError> {
    if let Some((e, c)) = f.terms().find(|(_, c)| c.is_negative()) {
        return Ok(Verdict::Fails(LorentzianWitness::NegativeCoefficient {
            exp: e.clone(),
            c: c.clone(),
        }));
    }
    let supp = f.support();
    if let Verdict::Fails(w) = is_mconvex_set(&supp) {
        return Ok(Verdict::Fails(LorentzianWitness::Support(w)));
    }
    let (n, d) = (f.nvars(), f.degree());
    if d < 2 || f.is_zero() {
        return Ok(Verdict::Holds);
    }
    let count = binomial(n as u32 + d - 3, d - 2);
    if count > BigInt::from(opts.cap) {
        return Err(PolyError::SizeCap {
            count: count.to_string(),
            cap: opts.cap,
        });
    }
    let mut alphas = BTreeSet::new();
    for beta in &supp {
        for i in 0..n {
            for j in i..n {
                let mut pair = vec![0u32; n];
                pair[i] += 1;
                pair[j] += 1;
                if let Some(a) = beta.minus(&pair) {
                    alphas.insert(a);
                }
            }
        }
    }
    let alphas: Vec<Exponent> = alphas.into_iter().collect();
    let hit = alphas.par_iter().find_map_first(|alpha| {
        let (h, dropped) = alpha_hessian(f, alpha);
        let h = match &opts.tolerance {
            Some(eps) => h
                .sub(&SymMatrix::identity(h.size()).ok()?.scale(eps))
                .ok()?,
            None => h,
        };
        let reduced = inertia_by_elimination(&h);
        let inertia = Inertia::new(reduced.n_pos, reduced.n_zero + dropped, reduced.n_neg);
        (inertia.n_pos > 1).then(|| LorentzianWitness::Hessian {
            alpha: alpha.clone(),
            inertia,
        })
    });
    Ok(hit.into())
}

/// Hessian of `∂^α f` restricted to its nonzero rows: entry `(i, j)` is
/// `c_β β!` with `β = α + e_i + e_j`. All-zero rows do not change the
/// positive eigenvalue count and are dropped; their number is returned too.
fn alpha_hessian(f: &HomogPoly, alpha: &Exponent) -> (SymMatrix, usize) {
    let n = f.nvars();
    let entry = |i: usize, j: usize| -> Rational {
        let mut b = alpha.0.clone();
        b[i] += 1;
        b[j] += 1;
        let b = Exponent(b);
        match f.terms.get(&b) {
            Some(c) => c * Rational::from_integer(b.factorial()),
            None => Rational::zero(),
        }
    };
    let full: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| entry(i, j)).collect())
        .collect();
    let live: Vec<usize> = (0..n)
        .filter(|&i| full[i].iter().any(|v| !v.is_zero()))
        .collect();
    let h =
        SymMatrix::from_fn(live.len(), |a, b| full[live[a]][live[b]].clone()).expect("within cap");
    (h, n - live.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum BivariateWitness {
    /// Index `k` is the power of the first variable.
    Negative {
        k: u32,
    },
    InternalZero {
        k: u32,
    },
    NotLogConcave {
        k: u32,
    },
}

/// Bivariate criterion: `a_k / C(d, k)` nonnegative, log-concave, without
/// internal zeros.
pub fn is_lorentzian_bivariate(f: &HomogPoly) -> Result<Verdict<BivariateWitness>, PolyError> {
    if f.nvars() != 2 {
        return Err(PolyError::NotBivariate(f.nvars()));
    }
    let d = f.degree();
    let a: Vec<Rational> = (0..=d)
        .map(|k| f.coefficient(&[k, d - k]) / Rational::from_integer(binomial(d, k)))
        .collect();
    if let Some(k) = (0..=d).find(|&k| a[k as usize].is_negative()) {
        return Ok(Verdict::Fails(BivariateWitness::Negative { k }));
    }
    let nonzero: Vec<u32> = (0..=d).filter(|&k| !a[k as usize].is_zero()).collect();
    if let (Some(&lo), Some(&hi)) = (nonzero.first(), nonzero.last()) {
        if let Some(k) = (lo..=hi).find(|&k| a[k as usize].is_zero()) {
            return Ok(Verdict::Fails(BivariateWitness::InternalZero { k }));
        }
    }
    for k in 1..d {
        let k = k as usize;
        if &a[k] * &a[k] < &a[k - 1] * &a[k + 1] {
            return Ok(Verdict::Fails(BivariateWitness::NotLogConcave {
                k: k as u32,
            }));
        }
    }
    Ok(Verdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::symmat::inertia;

    fn p(nvars: usize, degree: u32, terms: &[(&[u32], Rational)]) -> HomogPoly {
        HomogPoly::from_terms(
            nvars,
            degree,
            terms.iter().map(|(e, c)| (e.to_vec(), c.clone())),
        )
        .unwrap()
    }

    fn lor(f: &HomogPoly) -> Verdict<LorentzianWitness> {
        is_lorentzian(f, &LorentzianOptions::default()).unwrap()
    }

    fn exact(q: Rational) -> QWeight {
        QWeight::exact(q).unwrap()
    }

    fn pinned_nu() -> SetFunction {
        SetFunction::new(
            2,
            vec![
                ExtValue::zero(),
                ExtValue::zero(),
                ExtValue::zero(),
                ExtValue::from_int(1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn partial_examples() {
        let f = p(2, 3, &[(&[2, 1], int(1))]);
        assert_eq!(f.partial_multi(&[1, 0]), p(2, 2, &[(&[1, 1], int(2))]));
        assert_eq!(f.partial_multi(&[2, 1]), HomogPoly::constant(2, int(2)));
        assert!(f.partial_multi(&[3, 1]).is_zero());
    }

    #[test]
    fn y_derivative_matches_displayed_formula() {
        // ν ≡ 0, n = 3, q = 1: ∂_y Z = 3y^2 + 2(x1 + x2 + x3) y + (x1x2 + x1x3 + x2x3)
        let z = z_poly(&SetFunction::zero(3).unwrap(), &exact(int(1))).unwrap();
        let g = z.partial(3);
        let expected = p(
            4,
            2,
            &[
                (&[0, 0, 0, 2], int(3)),
                (&[1, 0, 0, 1], int(2)),
                (&[0, 1, 0, 1], int(2)),
                (&[0, 0, 1, 1], int(2)),
                (&[1, 1, 0, 0], int(1)),
                (&[1, 0, 1, 0], int(1)),
                (&[0, 1, 1, 0], int(1)),
            ],
        );
        assert_eq!(g, expected);
    }

    #[test]
    fn generating_polynomial_examples() {
        let z = z_poly(&SetFunction::zero(2).unwrap(), &exact(rat(1, 3))).unwrap();
        assert_eq!(
            z,
            p(
                3,
                2,
                &[
                    (&[1, 1, 0], int(1)),
                    (&[1, 0, 1], int(1)),
                    (&[0, 1, 1], int(1)),
                    (&[0, 0, 2], int(1))
                ]
            )
        );
        let z = z_poly(&pinned_nu(), &exact(rat(1, 2))).unwrap();
        assert_eq!(z.coefficient(&[1, 1, 0]), int(2));
        assert_eq!(z.coefficient(&[1, 0, 1]), int(1));

        let u12 = Matroid::uniform(1, 2).unwrap();
        let t = tutte_poly(&u12, &exact(rat(1, 2))).unwrap();
        assert_eq!(
            t,
            p(
                3,
                2,
                &[
                    (&[0, 0, 2], int(1)),
                    (&[1, 0, 1], int(2)),
                    (&[0, 1, 1], int(2)),
                    (&[1, 1, 0], int(2))
                ]
            )
        );
        assert_eq!(
            indep_poly(&u12),
            p(
                3,
                2,
                &[
                    (&[0, 0, 2], int(1)),
                    (&[1, 0, 1], int(1)),
                    (&[0, 1, 1], int(1))
                ]
            )
        );
    }

    #[test]
    fn nz_divides_by_y_factorial() {
        let nz = nz_poly(&SetFunction::zero(3).unwrap(), &exact(int(1))).unwrap();
        assert_eq!(nz.coefficient(&[0, 0, 0, 3]), rat(1, 6));
        assert_eq!(nz.coefficient(&[1, 0, 0, 2]), rat(1, 2));
        assert_eq!(nz.coefficient(&[1, 1, 1, 0]), int(1));
    }

    #[test]
    fn mconvex_set_examples() {
        assert!(is_mconvex_set(&[Exponent(vec![1, 0]), Exponent(vec![0, 1])]).holds());
        assert_eq!(
            is_mconvex_set(&[Exponent(vec![2, 0]), Exponent(vec![0, 2])]),
            Verdict::Fails(MConvexWitness {
                alpha: Exponent(vec![2, 0]),
                beta: Exponent(vec![0, 2]),
                i: 0
            })
        );
        let z = z_poly(&SetFunction::zero(3).unwrap(), &exact(rat(1, 2))).unwrap();
        assert!(is_mconvex_set(&z.support()).holds());
    }

    #[test]
    fn remark_quadratics() {
        let first = p(
            2,
            2,
            &[
                (&[2, 0], rat(1, 2)),
                (&[1, 1], int(1)),
                (&[0, 2], rat(1, 2)),
            ],
        );
        let second = p(
            2,
            2,
            &[(&[2, 0], int(1)), (&[1, 1], int(1)), (&[0, 2], rat(1, 2))],
        );
        let third = p(
            2,
            2,
            &[(&[2, 0], int(1)), (&[1, 1], int(1)), (&[0, 2], int(1))],
        );
        assert!(lor(&first).holds());
        assert!(!lor(&second).holds());
        assert!(!lor(&third).holds());
        assert!(is_lorentzian_bivariate(&first).unwrap().holds());
        assert!(!is_lorentzian_bivariate(&second).unwrap().holds());
        assert_eq!(
            is_lorentzian_bivariate(&third).unwrap(),
            Verdict::Fails(BivariateWitness::NotLogConcave { k: 1 })
        );
    }

    #[test]
    fn elementary_symmetric_quadratic() {
        let e2 = p(
            3,
            2,
            &[
                (&[1, 1, 0], int(1)),
                (&[1, 0, 1], int(1)),
                (&[0, 1, 1], int(1)),
            ],
        );
        assert!(lor(&e2).holds());
        assert_eq!(inertia(&hessian(&e2)), Inertia::new(1, 0, 2));
    }

    #[test]
    fn pinned_non_mnat_example() {
        let z = z_poly(&pinned_nu(), &exact(rat(1, 2))).unwrap();
        let v = lor(&z);
        let w = v.witness().unwrap();
        assert_eq!(
            *w,
            LorentzianWitness::Hessian {
                alpha: Exponent(vec![0, 0, 0]),
                inertia: Inertia::new(2, 0, 1)
            }
        );
        assert!(w.recheck(&z));
        assert_eq!(
            hessian(&z),
            SymMatrix::from_ints(&[&[0, 2, 1], &[2, 0, 1], &[1, 1, 2]]).unwrap()
        );
    }

    #[test]
    fn bivariate_examples() {
        let sq = p(
            2,
            2,
            &[(&[2, 0], int(1)), (&[1, 1], int(2)), (&[0, 2], int(1))],
        );
        assert!(is_lorentzian_bivariate(&sq).unwrap().holds());
        let gap = p(2, 2, &[(&[2, 0], int(1)), (&[0, 2], int(1))]);
        assert_eq!(
            is_lorentzian_bivariate(&gap).unwrap(),
            Verdict::Fails(BivariateWitness::InternalZero { k: 1 })
        );
        assert!(!lor(&gap).holds());
        assert_eq!(
            is_lorentzian_bivariate(&HomogPoly::var(3, 0)),
            Err(PolyError::NotBivariate(3))
        );
    }

    #[test]
    fn specialization_examples() {
        let z = z_poly(&SetFunction::zero(2).unwrap(), &exact(int(1))).unwrap();
        let b = z.specialize_bivariate(&[0, 0, 1]).unwrap();
        assert_eq!(
            b,
            p(
                2,
                2,
                &[(&[2, 0], int(1)), (&[1, 1], int(2)), (&[0, 2], int(1))]
            )
        );

        let i = indep_poly(&Matroid::uniform(2, 3).unwrap())
            .specialize_bivariate(&[0, 0, 0, 1])
            .unwrap();
        assert_eq!(
            i,
            p(
                2,
                3,
                &[(&[2, 1], int(3)), (&[1, 2], int(3)), (&[0, 3], int(1))]
            )
        );
        assert_eq!(z.collapse_vars(&[0, 1, 2], 3).unwrap(), z);
    }

    #[test]
    fn slice_examples() {
        // x0^2 x1 + x0 x2^2, slicing in x0
        let f = p(3, 3, &[(&[2, 1, 0], int(1)), (&[1, 0, 2], int(1))]);
        let s = f.coefficient_slices(0).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s[0].is_zero());
        assert_eq!(s[1], p(2, 2, &[(&[0, 2], int(1))]));
        assert_eq!(s[2], p(2, 1, &[(&[1, 0], int(1))]));
        assert!(s[3].is_zero());
        assert_eq!(f.slice_monomial(&[0], &[2]).unwrap(), s[2]);
    }

    #[test]
    fn multiplication_examples() {
        let x = HomogPoly::var(2, 0);
        let y = HomogPoly::var(2, 1);
        let one = HomogPoly::constant(2, int(1));
        assert_eq!(x.mul(&one).unwrap(), x);
        let diff = x.add(&y).unwrap().mul(&x.sub(&y).unwrap()).unwrap();
        assert_eq!(diff, p(2, 2, &[(&[2, 0], int(1)), (&[0, 2], int(-1))]));

        // Z(x, y) Z(x, z) for ν ≡ 0 on a single element, in variables (x, y, z)
        let xyz = |e: [u32; 3]| (e.to_vec(), int(1));
        let zy = HomogPoly::from_terms(3, 1, [xyz([1, 0, 0]), xyz([0, 1, 0])]).unwrap();
        let zz = HomogPoly::from_terms(3, 1, [xyz([1, 0, 0]), xyz([0, 0, 1])]).unwrap();
        let prod = zy.mul(&zz).unwrap();
        let expected = HomogPoly::from_terms(
            3,
            2,
            [
                xyz([2, 0, 0]),
                xyz([1, 0, 1]),
                xyz([1, 1, 0]),
                xyz([0, 1, 1]),
            ],
        )
        .unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            HomogPoly::from_terms(2, 2, [(vec![1, 0], int(1))]),
            Err(PolyError::NotHomogeneous { .. })
        ));
        assert!(matches!(
            HomogPoly::from_terms(2, 1, [(vec![1], int(1))]),
            Err(PolyError::WrongArity { .. })
        ));
        let x = HomogPoly::var(2, 0);
        assert_eq!(
            x.add(&x.mul(&x).unwrap()),
            Err(PolyError::DegreeMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn display_is_in_lex_order() {
        let f = p(
            2,
            2,
            &[(&[0, 2], rat(-1, 2)), (&[2, 0], int(1)), (&[1, 1], int(3))],
        );
        assert_eq!(f.to_string(), "x0^2 + 3*x0*x1 - 1/2*x1^2");
        assert_eq!(HomogPoly::zero(2, 2).to_string(), "0");
    }

    #[test]
    fn size_cap() {
        let f = z_poly(&SetFunction::zero(4).unwrap(), &exact(int(1))).unwrap();
        let opts = LorentzianOptions {
            cap: 3,
            tolerance: None,
        };
        assert!(matches!(
            is_lorentzian(&f, &opts),
            Err(PolyError::SizeCap { .. })
        ));
    }

    #[test]
    fn mconvex_function_generating_polynomial() {
        // ν(α) = α0^2 + α1^2 on Δ_2^2 is M-convex.
        let nu = LatticeFunction::new(
            2,
            2,
            [
                (vec![2, 0], int(4)),
                (vec![1, 1], int(2)),
                (vec![0, 2], int(4)),
            ],
        )
        .unwrap();
        assert!(is_mconvex_function(&nu).holds());
        for q in [int(1), rat(1, 2), rat(1, 10)] {
            assert!(lor(&f_mconvex(&nu, &exact(q)).unwrap()).holds());
        }
        let concave = LatticeFunction::new(
            2,
            2,
            [
                (vec![2, 0], int(0)),
                (vec![1, 1], int(2)),
                (vec![0, 2], int(0)),
            ],
        )
        .unwrap();
        assert!(!is_mconvex_function(&concave).holds());
        assert!(!lor(&f_mconvex(&concave, &exact(rat(1, 2))).unwrap()).holds());
    }

    #[test]
    fn tutte_limit_exponents() {
        let m = Matroid::graphic(&[(0, 1), (1, 2), (0, 2), (0, 1)]).unwrap();
        let rk = m.rank_function();
        for q in [rat(1, 2), rat(1, 7)] {
            let t = tutte_poly(&m, &exact(q.clone())).unwrap();
            let mut scale = vec![q.clone(); 4];
            scale.push(int(1));
            let tq = t.scale_vars(&scale);
            for s in 0..16u32 {
                let e = set_exponent(4, s, (4 - bits::size(s)) as u32);
                let gap = bits::size(s) - rk[s as usize];
                assert_eq!(tq.coefficient(&e), q.pow(gap as i32));
                assert_eq!(gap == 0, m.is_independent(s));
            }
        }
    }
}

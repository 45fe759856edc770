//! Log-concavity inequalities for independent-set counts and their polynomial
//! refinements, all evaluated exactly.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bits::{self, Mask};
use crate::exactnum::{binomial, factorial_q, fmt_rational, NumError, QWeight, Rational};
use crate::matroid::{Matroid, MatroidError};
use crate::poly::{Exponent, HomogPoly, PolyError};
use crate::setfn::{duplicate_extend, SetFnError, SetFunction};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IneqError {
    #[error("indices ({i}, {j}, {k}, {l}) need 0 <= i <= j <= k <= l <= {n} and i + l = j + k")]
    BadIndices {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        n: usize,
    },
    #[error("sizes {a} + {b} do not add up to {total}")]
    BadSizes { a: usize, b: usize, total: usize },
    #[error("index {k} is outside 1..{n}")]
    BadIndex { k: usize, n: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    SetFn(#[from] SetFnError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IneqReport {
    pub claim: String,
    pub params: BTreeMap<String, Value>,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    /// Scalar checks: `lhs - rhs`. Polynomial checks: the smallest
    /// coefficient of `lhs - rhs` (zero if the difference vanishes).
    #[serde(with = "crate::exactnum::serde_rational")]
    pub margin: Rational,
    /// False when the inputs came from floating point weights.
    pub certifying: bool,
}

impl IneqReport {
    fn scalar(claim: &str, params: BTreeMap<String, Value>, lhs: Rational, rhs: Rational) -> Self {
        let margin = &lhs - &rhs;
        let verdict = !margin.is_negative();
        let witness =
            (!verdict).then(|| json!({"lhs": fmt_rational(&lhs), "rhs": fmt_rational(&rhs)}));
        IneqReport {
            claim: claim.into(),
            params,
            verdict,
            witness,
            margin,
            certifying: true,
        }
    }

    fn polynomial(
        claim: &str,
        params: BTreeMap<String, Value>,
        lhs: &HomogPoly,
        rhs: &HomogPoly,
    ) -> Result<Self, IneqError> {
        if lhs.nvars() != rhs.nvars() {
            return Err(PolyError::NvarsMismatch {
                left: lhs.nvars(),
                right: rhs.nvars(),
            }
            .into());
        }
        if lhs.degree() != rhs.degree() && !lhs.is_zero() && !rhs.is_zero() {
            return Err(PolyError::DegreeMismatch {
                left: lhs.degree(),
                right: rhs.degree(),
            }
            .into());
        }
        let diff = lhs.sub(rhs)?;
        let first_negative = diff.terms().find(|(_, c)| c.is_negative());
        let witness =
            first_negative.map(|(e, c)| json!({"monomial": e, "coefficient": fmt_rational(c)}));
        Ok(IneqReport {
            claim: claim.into(),
            params,
            verdict: witness.is_none(),
            witness,
            margin: diff.min_coefficient(),
            certifying: true,
        })
    }

    /// Float-mode weights are approximations: mark the report and accept
    /// margins down to `-tolerance`.
    fn uncertified_if(mut self, w: &QWeight) -> Self {
        self.certifying = w.is_certifying();
        if !self.certifying && !self.verdict && self.margin >= -w.tolerance() {
            self.verdict = true;
            self.witness = None;
        }
        self
    }

    /// Re-evaluates a polynomial witness against `lhs - rhs`.
    pub fn witness_is_negative_in(&self, lhs: &HomogPoly, rhs: &HomogPoly) -> bool {
        let Some(w) = &self.witness else { return false };
        let Some(exp) = w
            .get("monomial")
            .and_then(|m| serde_json::from_value::<Vec<u32>>(m.clone()).ok())
        else {
            return false;
        };
        (lhs.coefficient(&exp) - rhs.coefficient(&exp)).is_negative()
    }
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn q_param(w: &QWeight) -> Value {
    Value::String(fmt_rational(w.q()))
}

/// `(I_{q,ν;0}, ..., I_{q,ν;n})` with `I_{q,ν;k} = Σ_{|S| = k} q^{-ν(S)}`.
pub fn iq_counts(nu: &SetFunction, w: &QWeight) -> Result<Vec<Rational>, NumError> {
    let n = nu.ground_size();
    let mut out = vec![Rational::zero(); n + 1];
    for s in 0..=bits::full(n) {
        out[bits::size(s)] += w.weight(nu.value(s))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UlcStyle {
    /// `a_k^2 >= a_{k-1} a_{k+1}`
    M1,
    /// `a_k^2 >= (1 + 1/k) a_{k-1} a_{k+1}`
    M2,
    /// `a_k^2 >= (1 + 1/k)(1 + 1/(n-k)) a_{k-1} a_{k+1}`
    M3,
}

impl UlcStyle {
    pub fn factor(self, k: usize, n: usize) -> Rational {
        let one = Rational::one();
        let inv = |m: usize| Rational::new(1.into(), m.into());
        match self {
            UlcStyle::M1 => one,
            UlcStyle::M2 => one + inv(k),
            UlcStyle::M3 => (&one + inv(k)) * (one + inv(n - k)),
        }
    }
}

/// One report per `0 < k < n`.
pub fn check_ulc(seq: &[Rational], style: UlcStyle, n: usize) -> Vec<IneqReport> {
    (1..n.min(seq.len().saturating_sub(1)))
        .map(|k| {
            let lhs = &seq[k] * &seq[k];
            let rhs = style.factor(k, n) * &seq[k - 1] * &seq[k + 1];
            let claim = format!("ulc_{style:?}").to_lowercase();
            IneqReport::scalar(&claim, params(&[("k", json!(k))]), lhs, rhs)
        })
        .collect()
}

/// `I_{q,ν;k}(x) = Σ_{|S| = k} q^{-ν(S)} x^S`.
pub fn iq_poly(nu: &SetFunction, w: &QWeight, k: usize) -> Result<HomogPoly, IneqError> {
    let n = nu.ground_size();
    if k > n {
        return Err(IneqError::BadIndex { k, n });
    }
    let terms = bits::subsets_of_size(n, k)
        .map(|s| Ok((mask_exponent(n, s), w.weight(nu.value(s))?)))
        .collect::<Result<Vec<_>, NumError>>()?;
    Ok(HomogPoly::from_terms(n, k as u32, terms)?)
}

fn mask_exponent(n: usize, s: Mask) -> Vec<u32> {
    (0..n).map(|i| bits::contains(s, i) as u32).collect()
}

/// `f ⪰ g`: every coefficient of `f - g` is nonnegative. On failure the
/// witness is the first negative monomial in lex order.
pub fn poly_geq(f: &HomogPoly, g: &HomogPoly) -> Result<IneqReport, IneqError> {
    IneqReport::polynomial("poly_geq", BTreeMap::new(), f, g)
}

fn check_indices(i: usize, j: usize, k: usize, l: usize, n: usize) -> Result<(), IneqError> {
    if i <= j && j <= k && k <= l && l <= n && i + l == j + k {
        Ok(())
    } else {
        Err(IneqError::BadIndices { i, j, k, l, n })
    }
}

/// `c_j f_j c_k f_k ⪰ c_i f_i c_l f_l` for a sequence of polynomials, with
/// `c_m = m!` when `factorial_weights` is set and 1 otherwise.
pub fn check_sequence_family(
    seq: &[HomogPoly],
    (i, j, k, l): (usize, usize, usize, usize),
    factorial_weights: bool,
) -> Result<IneqReport, IneqError> {
    check_indices(i, j, k, l, seq.len().saturating_sub(1))?;
    let c = |m: usize| {
        if factorial_weights {
            factorial_q(m as u32)
        } else {
            Rational::one()
        }
    };
    let lhs = seq[j].mul(&seq[k])?.scale(&(c(j) * c(k)));
    let rhs = seq[i].mul(&seq[l])?.scale(&(c(i) * c(l)));
    let claim = if factorial_weights {
        "sequence_family"
    } else {
        "sequence_family_unweighted"
    };
    let p = params(&[
        ("i", json!(i)),
        ("j", json!(j)),
        ("k", json!(k)),
        ("l", json!(l)),
    ]);
    IneqReport::polynomial(claim, p, &lhs, &rhs)
}

/// `j! I_j(x) k! I_k(x) ⪰ i! I_i(x) l! I_l(x)`.
pub fn check_poly_family(
    nu: &SetFunction,
    w: &QWeight,
    (i, j, k, l): (usize, usize, usize, usize),
) -> Result<IneqReport, IneqError> {
    let n = nu.ground_size();
    check_indices(i, j, k, l, n)?;
    let f = |m: usize| iq_poly(nu, w, m);
    let (fi, fj, fk, fl) = (f(i)?, f(j)?, f(k)?, f(l)?);
    let lhs = fj
        .mul(&fk)?
        .scale(&(factorial_q(j as u32) * factorial_q(k as u32)));
    let rhs = fi
        .mul(&fl)?
        .scale(&(factorial_q(i as u32) * factorial_q(l as u32)));
    let p = params(&[
        ("i", json!(i)),
        ("j", json!(j)),
        ("k", json!(k)),
        ("l", json!(l)),
        ("q", q_param(w)),
    ]);
    Ok(IneqReport::polynomial("poly_family", p, &lhs, &rhs)?.uncertified_if(w))
}

/// `I_k(x)^2 ⪰ (1 + 1/k) I_{k-1}(x) I_{k+1}(x)` for `0 < k < n`.
pub fn check_qpolynomial(nu: &SetFunction, w: &QWeight, k: usize) -> Result<IneqReport, IneqError> {
    let n = nu.ground_size();
    if k == 0 || k >= n {
        return Err(IneqError::BadIndex { k, n });
    }
    let ik = iq_poly(nu, w, k)?;
    let lhs = ik.mul(&ik)?;
    let rhs = iq_poly(nu, w, k - 1)?
        .mul(&iq_poly(nu, w, k + 1)?)?
        .scale(&UlcStyle::M2.factor(k, n));
    let p = params(&[("k", json!(k)), ("q", q_param(w))]);
    Ok(IneqReport::polynomial("qpolynomial", p, &lhs, &rhs)?.uncertified_if(w))
}

/// The coefficientwise ultra log-concave version
/// `(I_k / C(n,k))^2 ⪰ I_{k-1} / C(n,k-1) · I_{k+1} / C(n,k+1)`,
/// which fails in general.
pub fn check_poly_ulc(nu: &SetFunction, w: &QWeight, k: usize) -> Result<IneqReport, IneqError> {
    let n = nu.ground_size();
    if k == 0 || k >= n {
        return Err(IneqError::BadIndex { k, n });
    }
    let normalized = |m: usize| -> Result<HomogPoly, IneqError> {
        let b = Rational::from_integer(binomial(n as u32, m as u32));
        Ok(iq_poly(nu, w, m)?.scale(&b.recip()))
    };
    let ik = normalized(k)?;
    let lhs = ik.mul(&ik)?;
    let rhs = normalized(k - 1)?.mul(&normalized(k + 1)?)?;
    let p = params(&[("k", json!(k)), ("q", q_param(w))]);
    Ok(IneqReport::polynomial("poly_ulc", p, &lhs, &rhs)?.uncertified_if(w))
}

fn check_multiplicities(nu: &SetFunction, s: &[usize]) -> Result<(), IneqError> {
    if s.len() != nu.ground_size() {
        return Err(SetFnError::WrongLength {
            expected: nu.ground_size(),
            got: s.len(),
        }
        .into());
    }
    if let Some((element, &m)) = s.iter().enumerate().find(|(_, &m)| m > 2) {
        return Err(SetFnError::MultiplicityTooHigh {
            element,
            multiplicity: m,
        }
        .into());
    }
    Ok(())
}

/// `N^S_{q,ν}(a, b) = Σ q^{-ν(A) - ν(B)}` over ordered pairs of sets with
/// `|A| = a`, `|B| = b` and multiset union `S` (given by multiplicities).
pub fn n_s_coeff(
    nu: &SetFunction,
    w: &QWeight,
    s: &[usize],
    a: usize,
    b: usize,
) -> Result<Rational, IneqError> {
    check_multiplicities(nu, s)?;
    let total: usize = s.iter().sum();
    if a + b != total {
        return Err(IneqError::BadSizes { a, b, total });
    }
    let doubled = bits::from_elements((0..s.len()).filter(|&e| s[e] == 2));
    let single = bits::from_elements((0..s.len()).filter(|&e| s[e] == 1));
    let mut sum = Rational::zero();
    // Both parts contain every doubled element; the singles are split.
    for part in bits::submasks(single) {
        let aa = doubled | part;
        let bb = doubled | (single & !part);
        if bits::size(aa) == a && bits::size(bb) == b {
            sum += w.weight(nu.value(aa))? * w.weight(nu.value(bb))?;
        }
    }
    Ok(sum)
}

/// `N^S(a, b)` recomputed through the duplicate extension `ν'` on `E'`:
/// `N^{E'}_{ν'}(a, b) / 2^{#doubled}`. Every contributing partition of `E'`
/// splits the two copies of a doubled element, which accounts for the power
/// of two.
pub fn n_s_coeff_via_extension(
    nu: &SetFunction,
    w: &QWeight,
    s: &[usize],
    a: usize,
    b: usize,
) -> Result<Rational, IneqError> {
    check_multiplicities(nu, s)?;
    let ext = duplicate_extend(nu, s)?;
    let n2 = ext.origin.len();
    if a + b != n2 {
        return Err(IneqError::BadSizes { a, b, total: n2 });
    }
    let all = bits::full(n2);
    let mut sum = Rational::zero();
    for aa in bits::subsets_of_size(n2, a) {
        sum += w.weight(ext.function.value(aa))? * w.weight(ext.function.value(all & !aa))?;
    }
    Ok(sum / Rational::from_integer(num_bigint::BigInt::from(2u32).pow(ext.doubled() as u32)))
}

/// `(n-j)! (n-k)! N^S(j,k) >= (n-i)! (n-l)! N^S(i,l)` for `i + l = j + k = |S|`.
pub fn check_lc4acoeff(
    nu: &SetFunction,
    w: &QWeight,
    s: &[usize],
    (i, j, k, l): (usize, usize, usize, usize),
) -> Result<IneqReport, IneqError> {
    let n = nu.ground_size();
    let total: usize = s.iter().sum();
    check_indices(i, j, k, l, total)?;
    if i + l != total {
        return Err(IneqError::BadIndices {
            i,
            j,
            k,
            l,
            n: total,
        });
    }
    // A part larger than the ground set has no sets, so its term vanishes.
    let f = |m: usize| {
        if m > n {
            Rational::zero()
        } else {
            factorial_q((n - m) as u32)
        }
    };
    let lhs = f(j) * f(k) * n_s_coeff(nu, w, s, j, k)?;
    let rhs = f(i) * f(l) * n_s_coeff(nu, w, s, i, l)?;
    let p = params(&[
        ("S", json!(s)),
        ("i", json!(i)),
        ("j", json!(j)),
        ("k", json!(k)),
        ("l", json!(l)),
        ("q", q_param(w)),
    ]);
    Ok(IneqReport::scalar("lc4acoeff", p, lhs, rhs).uncertified_if(w))
}

/// `j! k! N^S(j,k) >= i! l! N^S(i,l)` for `i + l = j + k = |S|`.
pub fn check_ns_family(
    nu: &SetFunction,
    w: &QWeight,
    s: &[usize],
    (i, j, k, l): (usize, usize, usize, usize),
) -> Result<IneqReport, IneqError> {
    let total: usize = s.iter().sum();
    check_indices(i, j, k, l, total)?;
    if i + l != total {
        return Err(IneqError::BadIndices {
            i,
            j,
            k,
            l,
            n: total,
        });
    }
    let f = |m: usize| factorial_q(m as u32);
    let lhs = f(j) * f(k) * n_s_coeff(nu, w, s, j, k)?;
    let rhs = f(i) * f(l) * n_s_coeff(nu, w, s, i, l)?;
    let p = params(&[
        ("S", json!(s)),
        ("i", json!(i)),
        ("j", json!(j)),
        ("k", json!(k)),
        ("l", json!(l)),
        ("q", q_param(w)),
    ]);
    Ok(IneqReport::scalar("ns_family", p, lhs, rhs).uncertified_if(w))
}

/// `j! k! N_M(j,k) >= i! l! N_M(i,l)` for `i + l = j + k = n`.
pub fn check_cor_partition(
    m: &Matroid,
    (i, j, k, l): (usize, usize, usize, usize),
) -> Result<IneqReport, IneqError> {
    let n = m.ground_size();
    check_indices(i, j, k, l, n)?;
    if i + l != n {
        return Err(IneqError::BadIndices { i, j, k, l, n });
    }
    let f = |x: usize| factorial_q(x as u32);
    let lhs = f(j) * f(k) * Rational::from_integer(m.n_partitions(j, k)?.into());
    let rhs = f(i) * f(l) * Rational::from_integer(m.n_partitions(i, l)?.into());
    let p = params(&[
        ("i", json!(i)),
        ("j", json!(j)),
        ("k", json!(k)),
        ("l", json!(l)),
    ]);
    Ok(IneqReport::scalar("cor_partition", p, lhs, rhs))
}

/// All `(i, j, k, l)` with `0 <= i <= j <= k <= l <= n` and `i + l = j + k`.
pub fn family_indices(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in i..=n {
            for k in j..=n {
                let l = j + k - i;
                if l >= k && l <= n {
                    out.push((i, j, k, l));
                }
            }
        }
    }
    out
}

/// All multiplicity vectors in `{0,1,2}^n` with total `m`.
pub fn multisets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=2.min(left) {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, m, &mut cur, &mut out);
    out
}

/// The monomial `x^S` for a multiplicity vector.
pub fn multiset_exponent(s: &[usize]) -> Exponent {
    Exponent(s.iter().map(|&m| m as u32).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat, ExtValue};
    use crate::setfn::{from_matroid, MatroidFunction};

    fn exact(q: Rational) -> QWeight {
        QWeight::exact(q).unwrap()
    }

    fn ind(m: &Matroid) -> SetFunction {
        from_matroid(m, MatroidFunction::Indicator)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn iq_count_examples() {
        let u23 = ind(&Matroid::uniform(2, 3).unwrap());
        assert_eq!(
            iq_counts(&u23, &exact(rat(1, 5))).unwrap(),
            ints(&[1, 3, 3, 0])
        );
        let rk = from_matroid(&Matroid::free(1).unwrap(), MatroidFunction::Rank);
        assert_eq!(iq_counts(&rk, &exact(rat(1, 2))).unwrap(), ints(&[1, 2]));
    }

    #[test]
    fn ulc_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        let seq: Vec<Rational> = u23.ik_counts().iter().map(|&c| int(c as i64)).collect();
        let r = &check_ulc(&seq, UlcStyle::M3, 3)[0];
        assert!(r.verdict);
        assert_eq!(r.margin, int(0));

        let u24: Vec<Rational> = Matroid::uniform(2, 4)
            .unwrap()
            .ik_counts()
            .iter()
            .map(|&c| int(c as i64))
            .collect();
        let r = &check_ulc(&u24, UlcStyle::M3, 4)[0];
        assert_eq!(r.margin, int(0));

        let r = &check_ulc(&ints(&[1, 1, 3]), UlcStyle::M1, 2)[0];
        assert!(!r.verdict);
        assert_eq!(r.margin, int(-2));
    }

    #[test]
    fn iq_poly_examples() {
        let u22 = ind(&Matroid::free(2).unwrap());
        let p = iq_poly(&u22, &exact(int(1)), 1).unwrap();
        assert_eq!(
            p,
            HomogPoly::from_terms(2, 1, [(vec![1, 0], int(1)), (vec![0, 1], int(1))]).unwrap()
        );
        let nu = SetFunction::new(
            2,
            vec![
                ExtValue::zero(),
                ExtValue::zero(),
                ExtValue::zero(),
                ExtValue::from_int(1),
            ],
        )
        .unwrap();
        assert_eq!(
            iq_poly(&nu, &exact(rat(1, 2)), 2)
                .unwrap()
                .coefficient(&[1, 1]),
            int(2)
        );
        assert_eq!(
            iq_poly(&nu, &exact(rat(1, 2)), 0).unwrap(),
            HomogPoly::constant(2, int(1))
        );
    }

    #[test]
    fn poly_geq_examples() {
        let x = HomogPoly::var(2, 0);
        let y = HomogPoly::var(2, 1);
        let s = x.add(&y).unwrap();
        let sq = s.mul(&s).unwrap();
        let two_xy = x.mul(&y).unwrap().scale(&int(2));
        assert!(poly_geq(&sq, &two_xy).unwrap().verdict);
        assert!(poly_geq(&sq, &sq).unwrap().verdict);

        let pak = check_poly_ulc(&ind(&Matroid::free(2).unwrap()), &exact(int(1)), 1).unwrap();
        assert!(!pak.verdict);
        assert_eq!(
            pak.witness,
            Some(json!({"monomial": [1, 1], "coefficient": "-1/2"}))
        );
        assert_eq!(pak.margin, rat(-1, 2));

        let f = x.add(&y.scale(&rat(7, 4))).unwrap();
        let g = y.scale(&int(3));
        let r = poly_geq(&s.mul(&f).unwrap(), &x.mul(&g).unwrap()).unwrap();
        assert_eq!(
            r.witness,
            Some(json!({"monomial": [1, 1], "coefficient": "-1/4"}))
        );
        assert!(r.witness_is_negative_in(&s.mul(&f).unwrap(), &x.mul(&g).unwrap()));

        assert!(matches!(
            poly_geq(&x, &sq),
            Err(IneqError::Poly(PolyError::DegreeMismatch { .. }))
        ));
    }

    #[test]
    fn footnote_sequence_is_locally_but_not_globally_log_concave() {
        let x = HomogPoly::var(2, 0);
        let y = HomogPoly::var(2, 1);
        let seq = vec![
            x.clone(),
            x.add(&y).unwrap(),
            x.add(&y.scale(&rat(7, 4))).unwrap(),
            y.scale(&int(3)),
        ];
        for k in 1..3 {
            assert!(
                check_sequence_family(&seq, (k - 1, k, k, k + 1), false)
                    .unwrap()
                    .verdict
            );
        }
        let global = check_sequence_family(&seq, (0, 1, 2, 3), false).unwrap();
        assert!(!global.verdict);
        assert_eq!(
            global.witness,
            Some(json!({"monomial": [1, 1], "coefficient": "-1/4"}))
        );
    }

    #[test]
    fn poly_family_examples() {
        let u22 = ind(&Matroid::free(2).unwrap());
        assert!(
            check_poly_family(&u22, &exact(int(1)), (0, 1, 1, 2))
                .unwrap()
                .verdict
        );
        let trivial = check_poly_family(&u22, &exact(int(1)), (1, 1, 2, 2)).unwrap();
        assert!(trivial.verdict);
        assert_eq!(trivial.margin, int(0));
        assert!(matches!(
            check_poly_family(&u22, &exact(int(1)), (0, 1, 1, 1)),
            Err(IneqError::BadIndices { .. })
        ));
    }

    #[test]
    fn n_s_examples() {
        let z = SetFunction::zero(2).unwrap();
        let one = exact(int(1));
        assert_eq!(n_s_coeff(&z, &one, &[1, 1], 1, 1).unwrap(), int(2));
        assert_eq!(n_s_coeff(&z, &one, &[2, 0], 1, 1).unwrap(), int(1));
        assert_eq!(n_s_coeff(&z, &one, &[1, 1], 2, 0).unwrap(), int(1));
        assert_eq!(
            n_s_coeff(&z, &one, &[1, 1], 1, 0),
            Err(IneqError::BadSizes {
                a: 1,
                b: 0,
                total: 2
            })
        );
        assert_eq!(
            n_s_coeff(&z, &one, &[3, 0], 2, 1),
            Err(IneqError::SetFn(SetFnError::MultiplicityTooHigh {
                element: 0,
                multiplicity: 3
            }))
        );
    }

    #[test]
    fn n_s_through_duplicate_extension() {
        let rk = from_matroid(&Matroid::uniform(2, 3).unwrap(), MatroidFunction::Rank);
        let w = exact(rat(1, 3));
        for m in 0..=6 {
            for s in multisets(3, m) {
                for a in 0..=m {
                    assert_eq!(
                        n_s_coeff(&rk, &w, &s, a, m - a).unwrap(),
                        n_s_coeff_via_extension(&rk, &w, &s, a, m - a).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn cor_partition_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        let r = check_cor_partition(&u23, (0, 1, 2, 3)).unwrap();
        assert!(r.verdict);
        assert_eq!(r.margin, int(6));
        let r = check_cor_partition(&Matroid::free(2).unwrap(), (0, 1, 1, 2)).unwrap();
        assert!(r.verdict);
        assert_eq!(r.margin, int(0));
        let r = check_cor_partition(&u23, (1, 1, 2, 2)).unwrap();
        assert_eq!(r.margin, int(0));
    }

    #[test]
    fn index_enumeration() {
        assert!(family_indices(3).contains(&(0, 1, 2, 3)));
        assert!(family_indices(3)
            .iter()
            .all(|&(i, j, k, l)| i + l == j + k && l <= 3));
        assert_eq!(multisets(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }
}

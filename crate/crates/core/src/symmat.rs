//! Dense symmetric rational matrices: characteristic polynomial, inertia,
//! PSD certificates, Schur complements and congruence rescaling.
//!
//! Inertia is read off the exact characteristic polynomial with Descartes'
//! rule of signs, which counts roots exactly because a symmetric matrix has
//! only real eigenvalues. Symmetric elimination produces certificates and
//! witnesses, and a second inertia routine for hot loops; tests keep the two
//! paths in agreement.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{common_denominator, fmt_rational, Rational};

/// Largest supported matrix size.
pub const MAX_SIZE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("row {row} has length {len}, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("entries ({i},{j}) and ({j},{i}) differ")]
    NotSymmetric { i: usize, j: usize },
    #[error("size {0} exceeds the cap of {MAX_SIZE}")]
    TooLarge(usize),
    #[error("pivot block is singular")]
    SingularPivot,
    #[error("scale factor at index {0} is not positive")]
    NonPositiveScale(usize),
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        f.write_str("]")
    }
}

impl SymMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        check_size(n)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::NotSquare {
                    row: i,
                    len: r.len(),
                    expected: n,
                });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(MatrixError::NotSymmetric { i, j });
                }
            }
        }
        Ok(SymMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds the matrix from its upper triangle: `f(i, j)` is called for `i <= j`.
    pub fn from_fn(
        n: usize,
        mut f: impl FnMut(usize, usize) -> Rational,
    ) -> Result<Self, MatrixError> {
        check_size(n)?;
        let mut data = vec![Rational::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[j * n + i] = v.clone();
                data[i * n + j] = v;
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self, MatrixError> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| Rational::from_integer(BigInt::from(v)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn zeros(n: usize) -> Result<Self, MatrixError> {
        Self::from_fn(n, |_, _| Rational::zero())
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        Self::from_fn(n, |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn ones(n: usize) -> Result<Self, MatrixError> {
        Self::from_fn(n, |_, _| Rational::one())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn scale(&self, c: &Rational) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn neg(&self) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix, MatrixError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix, MatrixError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(
        &self,
        other: &SymMatrix,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<SymMatrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch(self.n, other.n));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(SymMatrix { n: self.n, data })
    }

    /// Simultaneous row/column permutation: `result[a][b] = self[perm[a]][perm[b]]`.
    pub fn permute(&self, perm: &[usize]) -> Result<SymMatrix, MatrixError> {
        if perm.len() != self.n {
            return Err(MatrixError::DimensionMismatch(perm.len(), self.n));
        }
        if let Some(&bad) = perm.iter().find(|&&p| p >= self.n) {
            return Err(MatrixError::BadIndex(bad));
        }
        Self::from_fn(self.n, |a, b| self.get(perm[a], perm[b]).clone())
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> Result<SymMatrix, MatrixError> {
        if let Some(&bad) = idx.iter().find(|&&p| p >= self.n) {
            return Err(MatrixError::BadIndex(bad));
        }
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]).clone())
    }

    /// `v^T M v`.
    pub fn quad_form(&self, v: &[Rational]) -> Rational {
        assert_eq!(v.len(), self.n, "vector length must match matrix size");
        let mut acc = Rational::zero();
        for i in 0..self.n {
            if v[i].is_zero() {
                continue;
            }
            let mut row = Rational::zero();
            for j in 0..self.n {
                if !v[j].is_zero() {
                    row += self.get(i, j) * &v[j];
                }
            }
            acc += &v[i] * row;
        }
        acc
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn has_nonnegative_entries(&self) -> bool {
        self.data.iter().all(|v| !v.is_negative())
    }

    /// Indices whose row is entirely zero.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.row(i).iter().all(Zero::is_zero))
            .collect()
    }
}

fn check_size(n: usize) -> Result<(), MatrixError> {
    if n == 0 {
        Err(MatrixError::Empty)
    } else if n > MAX_SIZE {
        Err(MatrixError::TooLarge(n))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inertia {
    pub n_pos: usize,
    pub n_zero: usize,
    pub n_neg: usize,
}

impl Inertia {
    pub fn new(n_pos: usize, n_zero: usize, n_neg: usize) -> Self {
        Inertia {
            n_pos,
            n_zero,
            n_neg,
        }
    }

    pub fn size(&self) -> usize {
        self.n_pos + self.n_zero + self.n_neg
    }

    /// Inertia of a block-diagonal sum.
    pub fn combine(&self, other: &Inertia) -> Inertia {
        Inertia::new(
            self.n_pos + other.n_pos,
            self.n_zero + other.n_zero,
            self.n_neg + other.n_neg,
        )
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n_pos, self.n_zero, self.n_neg)
    }
}

/// Coefficients of `det(lambda I - M)` in ascending degree: `c[k]` multiplies
/// `lambda^k`, and `c[size] = 1`.
pub fn char_poly(m: &SymMatrix) -> Vec<Rational> {
    let n = m.n;
    let denom = common_denominator(&m.data);
    let ints: Vec<BigInt> = m
        .data
        .iter()
        .map(|v| (v * Rational::from_integer(denom.clone())).to_integer())
        .collect();
    let c_int = faddeev_leverrier(n, &ints);
    // det(lambda I - B/L) = L^(-n) det(L lambda I - B), so c_k = c'_k / L^(n-k).
    let mut scale = Rational::one();
    let denom_q = Rational::from_integer(denom);
    let mut out = vec![Rational::zero(); n + 1];
    for k in (0..=n).rev() {
        out[k] = Rational::from_integer(c_int[k].clone()) / &scale;
        scale *= &denom_q;
    }
    out
}

/// Faddeev-LeVerrier on an integer matrix. Every division is exact because
/// the coefficients of an integer matrix's characteristic polynomial are
/// integers.
fn faddeev_leverrier(n: usize, a: &[BigInt]) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    // am holds A * M_k; M_1 = I so A * M_1 = A.
    let mut am: Vec<BigInt> = a.to_vec();
    for k in 1..=n {
        let trace: BigInt = (0..n).map(|i| &am[i * n + i]).sum();
        let (q, r) = (-trace).div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero(), "Faddeev-LeVerrier division must be exact");
        c[n - k] = q;
        if k == n {
            break;
        }
        // M_{k+1} = A M_k + c_{n-k} I
        let mut mk = am.clone();
        for i in 0..n {
            mk[i * n + i] += &c[n - k];
        }
        am = mat_mul(n, a, &mk);
    }
    c
}

fn mat_mul(n: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let bkj = &b[k * n + j];
                if !bkj.is_zero() {
                    out[i * n + j] += aik * bkj;
                }
            }
        }
    }
    out
}

fn sign_variations<'a>(
    coeffs: impl Iterator<Item = (usize, &'a Rational)>,
    flip_odd: bool,
) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for (k, c) in coeffs {
        if c.is_zero() {
            continue;
        }
        let mut positive = c.is_positive();
        if flip_odd && k % 2 == 1 {
            positive = !positive;
        }
        if let Some(prev) = last {
            if prev != positive {
                count += 1;
            }
        }
        last = Some(positive);
    }
    count
}

/// Exact eigenvalue sign counts.
pub fn inertia(m: &SymMatrix) -> Inertia {
    let c = char_poly(m);
    inertia_from_char_poly(&c)
}

fn inertia_from_char_poly(c: &[Rational]) -> Inertia {
    let n = c.len() - 1;
    let n_zero = c.iter().take_while(|v| v.is_zero()).count();
    let n_pos = sign_variations(c.iter().enumerate().rev(), false);
    let n_neg = sign_variations(c.iter().enumerate().rev(), true);
    assert_eq!(
        n_pos + n_neg + n_zero,
        n,
        "Descartes counts must be exact for a real-rooted characteristic polynomial"
    );
    Inertia::new(n_pos, n_zero, n_neg)
}

/// Inertia by symmetric elimination with 1x1 and 2x2 pivots. Congruence
/// preserves inertia, so this agrees with [`inertia`] at a fraction of the
/// cost.
pub fn inertia_by_elimination(m: &SymMatrix) -> Inertia {
    let mut a = m.to_rows();
    let mut alive: Vec<usize> = (0..m.n).collect();
    let (mut pos, mut neg) = (0, 0);
    loop {
        if let Some(k) = alive.iter().position(|&i| !a[i][i].is_zero()) {
            let p = alive.remove(k);
            let pivot = a[p][p].clone();
            if pivot.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for &i in &alive {
                if a[i][p].is_zero() {
                    continue;
                }
                let f = &a[i][p] / &pivot;
                for &j in &alive {
                    let v = &f * &a[p][j];
                    a[i][j] -= v;
                }
            }
            continue;
        }
        let pair = alive.iter().enumerate().find_map(|(k, &x)| {
            alive[k + 1..]
                .iter()
                .find(|&&y| !a[x][y].is_zero())
                .map(|&y| (x, y))
        });
        let Some((x, y)) = pair else { break };
        // [[0, c], [c, 0]] has one positive and one negative eigenvalue.
        pos += 1;
        neg += 1;
        alive.retain(|&i| i != x && i != y);
        let c = a[x][y].clone();
        for &i in &alive {
            for &j in &alive {
                let v = (&a[i][x] * &a[y][j] + &a[i][y] * &a[x][j]) / &c;
                a[i][j] -= v;
            }
        }
    }
    Inertia::new(pos, alive.len(), neg)
}

/// Elementary congruence: row `target` += `factor` * row `source`, and the
/// same for columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceStep {
    pub target: usize,
    pub source: usize,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub factor: Rational,
}

impl CongruenceStep {
    pub fn apply(&self, a: &mut [Vec<Rational>]) {
        let n = a.len();
        let (t, s) = (self.target, self.source);
        for j in 0..n {
            let v = &a[s][j] * &self.factor;
            a[t][j] += v;
        }
        for i in 0..n {
            let v = &a[i][s] * &self.factor;
            a[i][t] += v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PsdCertificate {
    Psd {
        steps: Vec<CongruenceStep>,
        #[serde(with = "crate::exactnum::serde_rational_vec")]
        pivots: Vec<Rational>,
    },
    NotPsd {
        #[serde(with = "crate::exactnum::serde_rational_vec")]
        witness: Vec<Rational>,
    },
}

impl PsdCertificate {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdCertificate::Psd { .. })
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            PsdCertificate::NotPsd { witness } => Some(witness),
            PsdCertificate::Psd { .. } => None,
        }
    }

    /// Replays the certificate against `m`: for `Psd` the congruence steps
    /// must diagonalize `m` into the recorded nonnegative pivots, for
    /// `NotPsd` the witness must give a negative quadratic form.
    pub fn verify(&self, m: &SymMatrix) -> bool {
        match self {
            PsdCertificate::NotPsd { witness } => {
                witness.len() == m.size() && m.quad_form(witness).is_negative()
            }
            PsdCertificate::Psd { steps, pivots } => {
                if pivots.len() != m.size() || pivots.iter().any(Signed::is_negative) {
                    return false;
                }
                let mut a = m.to_rows();
                for s in steps {
                    if s.target >= m.size() || s.source >= m.size() || s.target == s.source {
                        return false;
                    }
                    s.apply(&mut a);
                }
                (0..m.size()).all(|i| {
                    (0..m.size()).all(|j| {
                        if i == j {
                            a[i][i] == pivots[i]
                        } else {
                            a[i][j].is_zero()
                        }
                    })
                })
            }
        }
    }
}

/// PSD verdict by symmetric elimination, with a certificate either way.
pub fn is_psd(m: &SymMatrix) -> PsdCertificate {
    let n = m.n;
    let mut a = m.to_rows();
    // Rows of `t` map the current basis back to the original coordinates:
    // current = T M T^T.
    let mut t: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut steps = Vec::new();
    for k in 0..n {
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            return PsdCertificate::NotPsd {
                witness: t[k].clone(),
            };
        }
        if pivot.is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // 2x2 block [[0, c], [c, a_jj]]: w = (s, -sign c) gives
                // w^T B w = -2 s |c| + a_jj < 0 for s = (1 + |a_jj|) / |c|.
                let c = a[k][j].clone();
                let s = (Rational::one() + a[j][j].abs()) / c.abs();
                let sign = if c.is_positive() {
                    Rational::one()
                } else {
                    -Rational::one()
                };
                let witness = (0..n)
                    .map(|col| &s * &t[k][col] - &sign * &t[j][col])
                    .collect();
                return PsdCertificate::NotPsd { witness };
            }
            continue;
        }
        for j in k + 1..n {
            if a[j][k].is_zero() {
                continue;
            }
            let step = CongruenceStep {
                target: j,
                source: k,
                factor: -&a[j][k] / &pivot,
            };
            step.apply(&mut a);
            for col in 0..n {
                let v = &t[k][col] * &step.factor;
                t[j][col] += v;
            }
            steps.push(step);
        }
    }
    let pivots = (0..n).map(|i| a[i][i].clone()).collect();
    PsdCertificate::Psd { steps, pivots }
}

/// `C - B^T P^{-1} B` where `P` is the principal block on `pivot_block` and
/// `C` the block on the remaining indices (kept in increasing order).
pub fn schur_complement(m: &SymMatrix, pivot_block: &[usize]) -> Result<SymMatrix, MatrixError> {
    let n = m.n;
    let mut in_pivot = vec![false; n];
    for &p in pivot_block {
        if p >= n {
            return Err(MatrixError::BadIndex(p));
        }
        in_pivot[p] = true;
    }
    let piv: Vec<usize> = (0..n).filter(|&i| in_pivot[i]).collect();
    let rest: Vec<usize> = (0..n).filter(|&i| !in_pivot[i]).collect();
    if rest.is_empty() {
        return Err(MatrixError::Empty);
    }
    let p = piv.len();
    let inv = invert(
        &piv.iter()
            .map(|&i| piv.iter().map(|&j| m.get(i, j).clone()).collect())
            .collect::<Vec<_>>(),
    )
    .ok_or(MatrixError::SingularPivot)?;
    // X = P^{-1} B, with B[a][b] = m[piv[a]][rest[b]].
    let x: Vec<Vec<Rational>> = (0..p)
        .map(|a| {
            (0..rest.len())
                .map(|b| (0..p).map(|c| &inv[a][c] * m.get(piv[c], rest[b])).sum())
                .collect()
        })
        .collect();
    SymMatrix::from_fn(rest.len(), |a, b| {
        let correction: Rational = (0..p).map(|c| m.get(rest[a], piv[c]) * &x[c][b]).sum();
        m.get(rest[a], rest[b]) - correction
    })
}

/// Gauss-Jordan inverse; `None` when singular.
fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pr = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pr);
        let inv_p = aug[col][col].recip();
        for v in aug[col].iter_mut() {
            *v *= &inv_p;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in 0..2 * n {
                    let v = &f * &aug[col][c];
                    aug[r][c] -= v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `result[i][j] = d[i] * m[i][j] * d[j]` for a positive vector `d`.
pub fn congruence_rescale(m: &SymMatrix, d: &[Rational]) -> Result<SymMatrix, MatrixError> {
    if d.len() != m.n {
        return Err(MatrixError::DimensionMismatch(d.len(), m.n));
    }
    if let Some(i) = d.iter().position(|v| !v.is_positive()) {
        return Err(MatrixError::NonPositiveScale(i));
    }
    SymMatrix::from_fn(m.n, |i, j| &d[i] * m.get(i, j) * &d[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn poly(c: &[i64]) -> Vec<Rational> {
        c.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(
            char_poly(&SymMatrix::from_ints(&[&[5]]).unwrap()),
            poly(&[-5, 1])
        );
        assert_eq!(
            char_poly(&SymMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap()),
            poly(&[-1, 0, 1])
        );
        let k3 = SymMatrix::from_ints(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap();
        assert_eq!(char_poly(&k3), poly(&[-2, -3, 0, 1]));
    }

    #[test]
    fn char_poly_with_fractions() {
        // [[1/2, 1/3], [1/3, 1/4]]: lambda^2 - 3/4 lambda + (1/8 - 1/9)
        let m = SymMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 3), rat(1, 4)]])
            .unwrap();
        assert_eq!(char_poly(&m), vec![rat(1, 72), rat(-3, 4), int(1)]);
    }

    #[test]
    fn inertia_examples() {
        let swap = SymMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(inertia(&swap), Inertia::new(1, 0, 1));
        let k3 = SymMatrix::from_ints(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap();
        assert_eq!(inertia(&k3), Inertia::new(1, 0, 2));
        let m = SymMatrix::identity(3)
            .unwrap()
            .sub(&SymMatrix::ones(3).unwrap().scale(&rat(1, 3)))
            .unwrap();
        assert_eq!(inertia(&m), Inertia::new(2, 1, 0));
    }

    #[test]
    fn elimination_inertia_matches_examples() {
        let cases = [
            SymMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap(),
            SymMatrix::from_ints(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap(),
            SymMatrix::from_ints(&[&[0, 2, 1], &[2, 0, 1], &[1, 1, 2]]).unwrap(),
            SymMatrix::from_ints(&[&[0, 0, 1], &[0, 0, 0], &[1, 0, 0]]).unwrap(),
            SymMatrix::zeros(3).unwrap(),
        ];
        for m in &cases {
            assert_eq!(inertia_by_elimination(m), inertia(m), "{m:?}");
        }
        assert_eq!(inertia_by_elimination(&cases[2]), Inertia::new(2, 0, 1));
    }

    #[test]
    fn psd_examples() {
        let ones = SymMatrix::from_ints(&[&[1, 1], &[1, 1]]).unwrap();
        let cert = is_psd(&ones);
        assert!(cert.is_psd());
        assert!(cert.verify(&ones));

        let swap = SymMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        let cert = is_psd(&swap);
        assert_eq!(cert.witness().unwrap(), &[int(1), int(-1)]);
        assert_eq!(swap.quad_form(cert.witness().unwrap()), int(-2));
        assert!(cert.verify(&swap));
    }

    #[test]
    fn zero_diagonal_witness_handles_large_partner_entry() {
        let m = SymMatrix::from_ints(&[&[0, 1], &[1, 10]]).unwrap();
        let cert = is_psd(&m);
        assert!(!cert.is_psd());
        assert!(cert.verify(&m));
    }

    #[test]
    fn zero_rows_are_skipped() {
        let m = SymMatrix::from_ints(&[&[0, 0, 0], &[0, 2, 1], &[0, 1, 1]]).unwrap();
        let cert = is_psd(&m);
        assert!(cert.is_psd());
        assert!(cert.verify(&m));
    }

    #[test]
    fn schur_examples() {
        let m = SymMatrix::from_ints(&[&[2, 1], &[1, 2]]).unwrap();
        assert_eq!(
            schur_complement(&m, &[0]).unwrap(),
            SymMatrix::from_rows(vec![vec![rat(3, 2)]]).unwrap()
        );

        let a = SymMatrix::from_ints(&[&[2, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap();
        let b = schur_complement(&a, &[0]).unwrap();
        let expected = SymMatrix::from_rows(vec![
            vec![rat(-1, 2), rat(1, 2)],
            vec![rat(1, 2), rat(-1, 2)],
        ])
        .unwrap();
        assert_eq!(b, expected);

        let block =
            SymMatrix::from_ints(&[&[3, 1, 0, 0], &[1, 3, 0, 0], &[0, 0, 5, 2], &[0, 0, 2, 7]])
                .unwrap();
        let other = schur_complement(&block, &[0, 1]).unwrap();
        assert_eq!(other, SymMatrix::from_ints(&[&[5, 2], &[2, 7]]).unwrap());
    }

    #[test]
    fn schur_rejects_singular_pivot() {
        let m = SymMatrix::from_ints(&[&[0, 1], &[1, 2]]).unwrap();
        assert_eq!(schur_complement(&m, &[0]), Err(MatrixError::SingularPivot));
    }

    #[test]
    fn rescale_examples() {
        let m = SymMatrix::from_ints(&[&[4, 2], &[2, 4]]).unwrap();
        assert_eq!(congruence_rescale(&m, &[int(1), int(1)]).unwrap(), m);
        let half = congruence_rescale(&m, &[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(
            half,
            SymMatrix::from_rows(vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), int(1)]]).unwrap()
        );
        assert_eq!(
            congruence_rescale(&m, &[int(1), int(0)]),
            Err(MatrixError::NonPositiveScale(1))
        );
    }

    #[test]
    fn rejects_non_symmetric() {
        let r = SymMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(r, Err(MatrixError::NotSymmetric { i: 0, j: 1 }));
        assert_eq!(SymMatrix::zeros(65), Err(MatrixError::TooLarge(65)));
    }
}

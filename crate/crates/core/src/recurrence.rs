//! Monic orthogonal polynomial families given by eventually periodic
//! three-term recurrence coefficients
//!
//! ```text
//! x P_n(x) = P_{n+1}(x) + β_n P_n(x) + γ_n P_{n-1}(x),   P_0 = 1,  P_1 = x - β_0
//! ```
//!
//! A family is stored as the head `β_0, β_1, γ_1` followed by a tail of
//! period `k`: `β_2..β_{k+1}` and `γ_2..γ_{k+1}` repeat for every `n >= 2`.
//! A lifted family keeps `β̃_2` in its head, so the head length `h` (default
//! 2) is a parameter: the tail then starts at `n = h`.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::DoubleDouble;
use crate::poly::Poly;
use crate::rational::{from_f64, to_f64, Rational};

/// Above this degree monic values are accumulated in double-double.
const EXTENDED_PRECISION_DEGREE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Definiteness {
    /// every `γ_n > 0`
    Positive,
    /// every `γ_n != 0`
    Quasi,
}

impl Definiteness {
    pub fn as_str(self) -> &'static str {
        match self {
            Definiteness::Positive => "positive",
            Definiteness::Quasi => "quasi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicRecurrence {
    k: usize,
    head: usize,
    beta: Vec<Rational>,
    gamma: Vec<Rational>,
    definiteness: Definiteness,
    exact: bool,
}

impl PeriodicRecurrence {
    /// `beta = [β_0, β_1, β_2, …, β_{k+1}]`, `gamma = [γ_1, γ_2, …, γ_{k+1}]`.
    ///
    /// Families built from rationals are flagged exact, which makes case
    /// routing in the lift solver use exact comparisons.
    pub fn new(k: usize, beta: Vec<Rational>, gamma: Vec<Rational>, definiteness: Definiteness) -> Result<Self> {
        Self::build(k, beta, gamma, definiteness, true)
    }

    pub fn from_f64(k: usize, beta: &[f64], gamma: &[f64], definiteness: Definiteness) -> Result<Self> {
        let beta = beta.iter().map(|&b| from_f64(b)).collect::<Result<Vec<_>>>()?;
        let gamma = gamma.iter().map(|&g| from_f64(g)).collect::<Result<Vec<_>>>()?;
        Self::build(k, beta, gamma, definiteness, false)
    }

    /// Period-2 family with rational coefficients.
    pub fn k2(beta: [Rational; 4], gamma: [Rational; 3], definiteness: Definiteness) -> Result<Self> {
        Self::new(2, beta.to_vec(), gamma.to_vec(), definiteness)
    }

    pub(crate) fn build(
        k: usize,
        beta: Vec<Rational>,
        gamma: Vec<Rational>,
        definiteness: Definiteness,
        exact: bool,
    ) -> Result<Self> {
        Self::build_with_head(k, 2, beta, gamma, definiteness, exact)
    }

    /// `beta = [β_0, …, β_{h-1}, tail]`, `gamma = [γ_1, …, γ_{h-1}, tail]`,
    /// each tail of length `k`.
    pub fn with_head(k: usize, head: usize, beta: Vec<Rational>, gamma: Vec<Rational>, definiteness: Definiteness) -> Result<Self> {
        Self::build_with_head(k, head, beta, gamma, definiteness, true)
    }

    pub(crate) fn build_with_head(
        k: usize,
        head: usize,
        beta: Vec<Rational>,
        gamma: Vec<Rational>,
        definiteness: Definiteness,
        exact: bool,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidFamily("tail period k must be positive".into()));
        }
        if head < 2 {
            return Err(Error::InvalidFamily(format!("head length must be at least 2, got {head}")));
        }
        if beta.len() != k + head {
            return Err(Error::InvalidFamily(format!("beta needs k+{head} = {} entries, got {}", k + head, beta.len())));
        }
        if gamma.len() != k + head - 1 {
            return Err(Error::InvalidFamily(format!("gamma needs k+{} = {} entries, got {}", head - 1, k + head - 1, gamma.len())));
        }
        if let Some(i) = gamma.iter().position(Zero::is_zero) {
            return Err(Error::InvalidFamily(format!("gamma_{} = 0 (quasi-definiteness requires gamma_n != 0)", i + 1)));
        }
        if definiteness == Definiteness::Positive {
            if let Some(i) = gamma.iter().position(|g| !g.is_positive()) {
                return Err(Error::InvalidFamily(format!(
                    "gamma_{} = {} but a positive-definite family needs gamma_n > 0",
                    i + 1,
                    to_f64(&gamma[i])
                )));
            }
        }
        Ok(Self { k, head, beta, gamma, definiteness, exact })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of `β` entries before the periodic tail.
    pub fn head(&self) -> usize {
        self.head
    }

    /// Same `γ` sequence and same `β_n` for `n >= head_betas.len()`, with the
    /// leading `β` replaced. This is the shape of a lifted family.
    pub fn with_head_betas(&self, head_betas: &[Rational], exact: bool) -> Result<Self> {
        let h = head_betas.len().max(self.head);
        let mut beta = head_betas.to_vec();
        beta.extend((beta.len()..h).map(|n| self.beta(n).clone()));
        beta.extend((h..h + self.k).map(|n| self.beta(n).clone()));
        let gamma = (1..h + self.k).map(|n| self.gamma(n).expect("n >= 1").clone()).collect();
        Self::build_with_head(self.k, h, beta, gamma, self.definiteness, exact)
    }

    pub fn definiteness(&self) -> Definiteness {
        self.definiteness
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// The stored coefficients `[β_0, …, β_{k+1}]`.
    pub fn beta_coeffs(&self) -> &[Rational] {
        &self.beta
    }

    /// The stored coefficients `[γ_1, …, γ_{k+1}]`.
    pub fn gamma_coeffs(&self) -> &[Rational] {
        &self.gamma
    }

    pub fn beta_head(&self) -> &[Rational] {
        &self.beta[..self.head]
    }

    pub fn beta_tail(&self) -> &[Rational] {
        &self.beta[self.head..]
    }

    pub fn gamma_head(&self) -> &[Rational] {
        &self.gamma[..self.head - 1]
    }

    pub fn gamma_tail(&self) -> &[Rational] {
        &self.gamma[self.head - 1..]
    }

    pub fn beta(&self, n: usize) -> &Rational {
        &self.beta[periodic_index(n, self.head, self.k)]
    }

    /// `γ_n` for `n >= 1`; `γ_s` whenever `n = k m + s`, `s = 2..=k+1`.
    pub fn gamma(&self, n: usize) -> Result<&Rational> {
        if n == 0 {
            return Err(Error::Index("gamma_0 is undefined; recurrence coefficients gamma_n start at n = 1".into()));
        }
        Ok(&self.gamma[periodic_index(n, self.head, self.k) - 1])
    }

    /// `(β_n, γ_n)`; fails for `n = 0` because `γ_0` is undefined.
    pub fn coefficients_at(&self, n: usize) -> Result<(Rational, Rational)> {
        Ok((self.beta(n).clone(), self.gamma(n)?.clone()))
    }

    pub fn beta_f64(&self, n: usize) -> f64 {
        to_f64(self.beta(n))
    }

    /// `γ_n` as a float, with the convention `γ_0 = 0`.
    pub fn gamma_f64(&self, n: usize) -> f64 {
        self.gamma(n).map(to_f64).unwrap_or(0.0)
    }

    /// All `γ_n > 0` (checked on the stored head and one period).
    pub fn is_positive(&self) -> bool {
        self.gamma.iter().all(Signed::is_positive)
    }

    /// `P_n(x)` by forward recurrence.
    pub fn eval_monic(&self, n: usize, x: f64) -> f64 {
        if n > EXTENDED_PRECISION_DEGREE {
            return self.eval_monic_extended(n, x);
        }
        let (mut prev, mut cur) = (0.0, 1.0);
        for j in 0..n {
            let next = (x - self.beta_f64(j)) * cur - self.gamma_f64(j) * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    fn eval_monic_extended(&self, n: usize, x: f64) -> f64 {
        let xd = DoubleDouble::from_f64(x);
        let (mut prev, mut cur) = (DoubleDouble::ZERO, DoubleDouble::ONE);
        for j in 0..n {
            let shifted = xd.sub(DoubleDouble::from_f64(self.beta_f64(j)));
            let next = shifted.mul(cur).sub(DoubleDouble::from_f64(self.gamma_f64(j)).mul(prev));
            prev = cur;
            cur = next;
        }
        cur.to_f64()
    }

    /// `P_0(x), …, P_n(x)`.
    pub fn monic_values(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        out.push(cur);
        for j in 0..n {
            let next = (x - self.beta_f64(j)) * cur - self.gamma_f64(j) * prev;
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    pub fn eval_monic_exact(&self, n: usize, x: &Rational) -> Rational {
        let (mut prev, mut cur) = (Rational::zero(), Rational::one());
        for j in 0..n {
            let g = if j == 0 { Rational::zero() } else { self.gamma(j).expect("j >= 1").clone() };
            let next = (x - self.beta(j)) * &cur - g * &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Exact monic polynomials `P_0, …, P_n`.
    pub fn monic_polys(&self, n: usize) -> Vec<Poly> {
        let mut out = vec![Poly::constant(Rational::one())];
        if n == 0 {
            return out;
        }
        out.push(Poly::linear_monic(self.beta(0)));
        for j in 1..n {
            let g = self.gamma(j).expect("j >= 1");
            let next = &(&out[j].shift_up() - &out[j].scale(self.beta(j))) - &out[j - 1].scale(g);
            out.push(next);
        }
        out
    }

    /// Exact ascending coefficients of `P_n`; length `n + 1`, leading entry 1.
    pub fn coefficient_vector(&self, n: usize) -> Vec<Rational> {
        self.monic_polys(n).pop().expect("nonempty").into_coeffs()
    }

    pub fn jacobi_matrix(&self, dim: usize) -> Result<JacobiMatrix> {
        if dim == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        Ok(JacobiMatrix {
            dim,
            diagonal: (0..dim).map(|n| self.beta_f64(n)).collect(),
            superdiagonal: vec![1.0; dim - 1],
            subdiagonal: (1..dim).map(|n| self.gamma_f64(n)).collect(),
        })
    }

    pub fn symmetrize(&self) -> Result<OrthonormalCoefficients> {
        if let Some(i) = self.gamma.iter().position(|g| !g.is_positive()) {
            return Err(Error::NotPositiveDefinite(format!("gamma_{} = {}", i + 1, to_f64(&self.gamma[i]))));
        }
        Ok(OrthonormalCoefficients {
            k: self.k,
            head: self.head,
            beta: self.beta.iter().map(to_f64).collect(),
            gamma: self.gamma.iter().map(to_f64).collect(),
        })
    }

    /// Same `γ` sequence, checked exactly on both heads and one joint period.
    pub fn same_gamma(&self, other: &PeriodicRecurrence) -> bool {
        let span = self.head.max(other.head) + num_integer::lcm(self.k, other.k);
        (1..=span).all(|n| self.gamma(n).ok() == other.gamma(n).ok())
    }
}

/// Storage slot of coefficient `n`: the head verbatim, then the tail cyclically.
fn periodic_index(n: usize, head: usize, k: usize) -> usize {
    if n < head {
        n
    } else {
        head + (n - head) % k
    }
}

/// Truncated monic Jacobi matrix: `β` on the diagonal, `γ` below, ones above.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    pub dim: usize,
    pub diagonal: Vec<f64>,
    pub superdiagonal: Vec<f64>,
    pub subdiagonal: Vec<f64>,
}

impl JacobiMatrix {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            m[(i, i)] = self.diagonal[i];
            if i + 1 < self.dim {
                m[(i, i + 1)] = self.superdiagonal[i];
                m[(i + 1, i)] = self.subdiagonal[i];
            }
        }
        m
    }

    /// Partition at index 3 into `[[A, I₁], [I₂, B]]`; needs `dim > 3`.
    pub fn blocks(&self) -> Option<[DMatrix<f64>; 4]> {
        if self.dim <= 3 {
            return None;
        }
        let m = self.to_dense();
        let r = self.dim - 3;
        Some([
            m.view((0, 0), (3, 3)).into_owned(),
            m.view((0, 3), (3, r)).into_owned(),
            m.view((3, 0), (r, 3)).into_owned(),
            m.view((3, 3), (r, r)).into_owned(),
        ])
    }
}

/// Orthonormal form of a positive-definite family:
/// `x φ_n = b_n φ_{n+1} + β_n φ_n + b_{n-1} φ_{n-1}` with `b_n = √γ_{n+1}`,
/// `b_{-1} = 0`, and `P_n = α_n φ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalCoefficients {
    k: usize,
    head: usize,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl OrthonormalCoefficients {
    fn gamma(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.gamma[periodic_index(n, self.head, self.k) - 1]
        }
    }

    fn beta(&self, n: usize) -> f64 {
        self.beta[periodic_index(n, self.head, self.k)]
    }

    /// `b_n = √γ_{n+1}` for `n >= 0`.
    pub fn b(&self, n: usize) -> f64 {
        self.gamma(n + 1).sqrt()
    }

    /// `b_0, …, b_{len-1}`.
    pub fn b_list(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.b(n)).collect()
    }

    /// Scale factor `α_n` with `P_n = α_n φ_n`. For `n = (m-1)k + s`,
    /// `m >= 1`, `s = 2..=k+1`:
    /// `α_n = √γ_1 (γ_2⋯γ_s)^{m/2} (γ_{s+1}⋯γ_{k+1})^{(m-1)/2}`.
    /// Longer heads fall back to the running product `√(γ_1⋯γ_n)`.
    pub fn alpha(&self, n: usize) -> f64 {
        if self.head != 2 {
            return (1..=n).map(|j| self.gamma(j).sqrt()).product();
        }
        match n {
            0 => 1.0,
            1 => self.gamma[0].sqrt(),
            _ => {
                let m = (n - 2) / self.k + 1;
                let s = (n - 2) % self.k + 2;
                let lower: f64 = (2..=s).map(|j| self.gamma[j - 1]).product();
                let upper: f64 = (s + 1..=self.k + 1).map(|j| self.gamma[j - 1]).product();
                self.gamma[0].sqrt() * lower.powf(m as f64 / 2.0) * upper.powf((m as f64 - 1.0) / 2.0)
            }
        }
    }

    pub fn alpha_list(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.alpha(n)).collect()
    }

    /// `φ_0(x), …, φ_n(x)` from the symmetrized recurrence.
    pub fn orthonormal_values(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(1.0);
        let (mut prev, mut cur, mut b_prev) = (0.0, 1.0, 0.0);
        for j in 0..n {
            let bj = self.b(j);
            let next = ((x - self.beta(j)) * cur - b_prev * prev) / bj;
            prev = cur;
            cur = next;
            b_prev = bj;
            out.push(cur);
        }
        out
    }

    /// Symmetric Jacobi matrix of order `m`: `β_n` on the diagonal, `b_n` off it.
    pub fn symmetric_jacobi(&self, m: usize) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(m, m);
        for i in 0..m {
            j[(i, i)] = self.beta(i);
            if i + 1 < m {
                j[(i, i + 1)] = self.b(i);
                j[(i + 1, i)] = self.b(i);
            }
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn fam(beta: [i64; 4], gamma: [i64; 3]) -> PeriodicRecurrence {
        PeriodicRecurrence::k2(beta.map(int), gamma.map(int), Definiteness::Positive).unwrap()
    }

    #[test]
    fn periodic_accessors() {
        let f = fam([0, 1, 0, 2], [1, 1, 2]);
        assert_eq!(f.coefficients_at(5).unwrap(), (int(2), int(2)));
        assert_eq!(f.coefficients_at(4).unwrap(), (int(0), int(1)));
        assert!(matches!(f.coefficients_at(0), Err(Error::Index(_))));
        assert_eq!(f.beta(0), &int(0));

        let g = PeriodicRecurrence::new(
            3,
            vec![int(0), int(0), int(1), int(2), int(3)],
            vec![int(1), int(5), int(6), int(7)],
            Definiteness::Positive,
        )
        .unwrap();
        // n = 3·1 + 2
        assert_eq!(g.gamma(5).unwrap(), g.gamma(2).unwrap());
        assert_eq!(g.gamma(7).unwrap(), &int(7));
        assert_eq!(g.beta(5), &int(1));
    }

    #[test]
    fn rejects_bad_families() {
        let z = PeriodicRecurrence::k2([0, 0, 0, 0].map(int), [1, 0, 1].map(int), Definiteness::Quasi);
        assert!(matches!(z, Err(Error::InvalidFamily(_))));
        let neg = PeriodicRecurrence::k2([0, 0, 0, 0].map(int), [1, -1, 1].map(int), Definiteness::Positive);
        assert!(neg.is_err());
        let ok = PeriodicRecurrence::k2([0, 0, 0, 0].map(int), [1, -1, 1].map(int), Definiteness::Quasi);
        assert!(ok.is_ok());
        assert!(PeriodicRecurrence::new(2, vec![int(0); 3], vec![int(1); 3], Definiteness::Quasi).is_err());
        assert!(PeriodicRecurrence::from_f64(2, &[0.0, f64::NAN, 0.0, 0.0], &[1.0; 3], Definiteness::Quasi).is_err());
    }

    #[test]
    fn monic_evaluation_examples() {
        let f = fam([0, 1, 0, 2], [1, 1, 2]);
        assert_eq!(f.eval_monic(0, 3.7), 1.0);
        assert_eq!(f.eval_monic(1, 5.0), 5.0);
        assert_eq!(f.eval_monic(2, 2.0), 1.0);
        assert_eq!(f.eval_monic_exact(2, &int(2)), int(1));
    }

    #[test]
    fn coefficient_vectors() {
        let f = fam([0, 1, 0, 2], [1, 1, 2]);
        assert_eq!(f.coefficient_vector(0), vec![int(1)]);
        assert_eq!(f.coefficient_vector(1), vec![int(0), int(1)]);
        assert_eq!(f.coefficient_vector(2), vec![int(-1), int(-1), int(1)]);
        for n in 0..12 {
            let c = f.coefficient_vector(n);
            assert_eq!(c.len(), n + 1);
            assert_eq!(c[n], int(1));
        }
    }

    #[test]
    fn jacobi_fill_and_blocks() {
        let f = fam([0, 1, 0, 2], [1, 1, 2]);
        assert!(matches!(f.jacobi_matrix(0), Err(Error::Dimension { .. })));
        assert_eq!(f.jacobi_matrix(1).unwrap().diagonal, vec![0.0]);
        let j3 = f.jacobi_matrix(3).unwrap();
        assert_eq!(j3.diagonal, vec![0.0, 1.0, 0.0]);
        assert_eq!(j3.subdiagonal, vec![1.0, 1.0]);
        assert_eq!(j3.superdiagonal, vec![1.0, 1.0]);
        let m = f.jacobi_matrix(6).unwrap().to_dense();
        assert_eq!(m[(5, 4)], 2.0);
        assert_eq!(m[(4, 4)], 0.0);

        let [a, i1, i2, b] = f.jacobi_matrix(7).unwrap().blocks().unwrap();
        assert_eq!(a, DMatrix::from_row_slice(3, 3, &[0., 1., 0., 1., 1., 1., 0., 1., 0.]));
        assert_eq!(i1[(2, 0)], 1.0);
        assert_eq!(i1.iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!(i2[(0, 2)], 2.0);
        assert_eq!(i2.iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!((b[(0, 0)], b[(1, 0)], b[(1, 1)], b[(2, 1)]), (2.0, 1.0, 0.0, 2.0));
    }

    #[test]
    fn symmetrization() {
        let f = fam([0, 1, 0, 2], [1, 1, 2]);
        let s = f.symmetrize().unwrap();
        let b = s.b_list(5);
        let r2 = 2f64.sqrt();
        for (got, want) in b.iter().zip([1.0, 1.0, r2, 1.0, r2]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(s.alpha(0), 1.0);
        assert_eq!(s.alpha(1), 1.0);
        // α ratios reproduce the monic values at x = 1
        let phi = s.orthonormal_values(8, 1.0);
        for n in 0..=8 {
            let p = f.eval_monic(n, 1.0);
            assert!((s.alpha(n) * phi[n] - p).abs() <= 1e-12 * p.abs().max(1.0));
        }

        let unit = fam([0, 0, 0, 0], [1, 1, 1]).symmetrize().unwrap();
        assert!(unit.b_list(10).iter().all(|&b| b == 1.0));
        assert!(unit.alpha_list(10).iter().all(|&a| a == 1.0));

        let q = PeriodicRecurrence::k2([0, 0, 0, 0].map(int), [1, -1, 1].map(int), Definiteness::Quasi).unwrap();
        assert!(matches!(q.symmetrize(), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn alpha_matches_running_product() {
        let f = PeriodicRecurrence::new(
            3,
            vec![int(0), ratio(1, 2), int(1), int(-1), int(2)],
            vec![int(2), ratio(1, 3), int(5), ratio(7, 4)],
            Definiteness::Positive,
        )
        .unwrap();
        let s = f.symmetrize().unwrap();
        let mut prod = 1.0;
        for n in 0..20 {
            assert!((s.alpha(n) - prod).abs() <= 1e-12 * prod, "n = {n}");
            prod *= s.b(n);
        }
    }

    #[test]
    fn extended_precision_agrees_with_exact() {
        let f = PeriodicRecurrence::k2(
            [int(0), ratio(1, 3), ratio(-2, 7), ratio(5, 11)],
            [ratio(1, 2), ratio(3, 5), ratio(2, 9)],
            Definiteness::Positive,
        )
        .unwrap();
        let x = ratio(7, 5);
        for n in [31, 40, 60] {
            let exact = to_f64(&f.eval_monic_exact(n, &x));
            let got = f.eval_monic(n, 1.4);
            assert!((got - exact).abs() <= 1e-13 * exact.abs(), "n = {n}");
        }
    }
}

//! Truncated generalized-oscillator operators over the orthonormal basis of a
//! positive-definite family.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::recurrence::PeriodicRecurrence;

pub const DEFAULT_DIM: usize = 64;

/// `a⁺ φ_n = √2 b_n φ_{n+1}`, `a⁻ φ_n = √2 b_{n-1} φ_{n-1}`, `N φ_n = n φ_n`,
/// `B(N) φ_n = γ_n φ_n` with `γ_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorTruncation {
    pub dim: usize,
    pub b: Vec<f64>,
    pub a_plus: DMatrix<f64>,
    pub a_minus: DMatrix<f64>,
    pub number_op: DMatrix<f64>,
    pub b_diag: Vec<f64>,
    pub hamiltonian_diag: Vec<f64>,
}

impl OscillatorTruncation {
    pub fn build(family: &PeriodicRecurrence, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Dimension { min: 2, got: dim });
        }
        let sym = family.symmetrize()?;
        let b = sym.b_list(dim);
        let mut a_plus = DMatrix::zeros(dim, dim);
        for n in 0..dim - 1 {
            a_plus[(n + 1, n)] = std::f64::consts::SQRT_2 * b[n];
        }
        let a_minus = a_plus.transpose();
        let number_op = DMatrix::from_diagonal(&DVector::from_iterator(dim, (0..dim).map(|n| n as f64)));
        let b_diag: Vec<f64> = (0..dim).map(|n| family.gamma_f64(n)).collect();
        let hamiltonian_diag = (0..dim).map(|n| 2.0 * (b_diag[n] + family.gamma_f64(n + 1))).collect();
        Ok(Self { dim, b, a_plus, a_minus, number_op, b_diag, hamiltonian_diag })
    }

    /// `a⁻a⁺ + a⁺a⁻` from the stored ladder matrices.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        &self.a_minus * &self.a_plus + &self.a_plus * &self.a_minus
    }
}

/// Largest interior deviation of each defining relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationReport {
    /// `a⁻a⁺ - 2B(N + 𝕀)`
    pub lowering_raising: f64,
    /// `a⁺a⁻ - 2B(N)`
    pub raising_lowering: f64,
    /// `[N, a⁺] - a⁺`
    pub commutator_plus: f64,
    /// `[N, a⁻] + a⁻`
    pub commutator_minus: f64,
}

impl RelationReport {
    pub fn max(&self) -> f64 {
        self.lowering_raising.max(self.raising_lowering).max(self.commutator_plus).max(self.commutator_minus)
    }
}

fn interior_max(m: &DMatrix<f64>) -> f64 {
    let d = m.nrows() - 1;
    m.view((0, 0), (d, d)).iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Checks the relations on indices `0..=D-2`; the last row and column carry
/// truncation artifacts and are excluded.
pub fn verify_algebra_relations(t: &OscillatorTruncation) -> Result<RelationReport> {
    if t.dim < 3 {
        return Err(Error::Dimension { min: 3, got: t.dim });
    }
    let d = t.dim;
    let b_shift = DMatrix::from_diagonal(&DVector::from_iterator(d, (0..d).map(|n| t.b[n] * t.b[n])));
    let b_n = DMatrix::from_diagonal(&DVector::from_vec(t.b_diag.clone()));
    let n = &t.number_op;
    Ok(RelationReport {
        lowering_raising: interior_max(&(&t.a_minus * &t.a_plus - b_shift * 2.0)),
        raising_lowering: interior_max(&(&t.a_plus * &t.a_minus - b_n * 2.0)),
        commutator_plus: interior_max(&(n * &t.a_plus - &t.a_plus * n - &t.a_plus)),
        commutator_minus: interior_max(&(n * &t.a_minus - &t.a_minus * n + &t.a_minus)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub dim: usize,
    /// eigenvalue attached to basis index n, for n = 0..=D-2
    pub eigenvalues: Vec<f64>,
    /// `2(γ_n + γ_{n+1})` with `γ_0 = 0`
    pub closed_form: Vec<f64>,
    pub max_rel_dev: f64,
}

/// Eigenvalues of the truncated Hamiltonian on the interior indices. Each
/// eigenvector is attached to the basis index carrying most of its weight.
pub fn hamiltonian_spectrum(t: &OscillatorTruncation) -> Spectrum {
    let h = t.hamiltonian();
    let eig = SymmetricEigen::new(h);
    let interior = t.dim - 1;
    let mut eigenvalues = vec![f64::NAN; interior];
    for j in 0..t.dim {
        let col = eig.eigenvectors.column(j);
        let idx = col.iamax();
        if idx < interior {
            eigenvalues[idx] = eig.eigenvalues[j];
        }
    }
    let closed_form = t.hamiltonian_diag[..interior].to_vec();
    let max_rel_dev = eigenvalues
        .iter()
        .zip(&closed_form)
        .map(|(e, c)| (e - c).abs() / c.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Spectrum { dim: t.dim, eigenvalues, closed_form, max_rel_dev }
}

/// Same oscillator algebra: identical structure functions, i.e. identical
/// `γ_n` for every `n >= 1`. The β coefficients play no role.
pub fn algebras_equal(p: &PeriodicRecurrence, q: &PeriodicRecurrence) -> bool {
    p.same_gamma(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionVerdict {
    FiniteCandidate,
    Infinite,
}

/// Least-squares fit of `b_n²` against `(a_0 + a_2 n)(1 + n)`; only an exact
/// fit (max deviation within `1e-12`) leaves a finite-dimensional algebra possible.
pub fn dimension_check_sequence(b_squared: &[f64]) -> DimensionVerdict {
    let rows = b_squared.len();
    let design = DMatrix::from_fn(rows, 2, |n, j| {
        let nf = n as f64;
        if j == 0 {
            1.0 + nf
        } else {
            nf * (1.0 + nf)
        }
    });
    let rhs = DVector::from_column_slice(b_squared);
    let Ok(coef) = design.clone().svd(true, true).solve(&rhs, 1e-14) else {
        return DimensionVerdict::Infinite;
    };
    let fit = &design * coef;
    let dev = (fit - &rhs).amax();
    let scale = rhs.amax().max(1.0);
    if dev <= 1e-12 * scale {
        DimensionVerdict::FiniteCandidate
    } else {
        DimensionVerdict::Infinite
    }
}

/// Fit on `n = 0..=2k+3`.
pub fn dimension_check(family: &PeriodicRecurrence) -> Result<DimensionVerdict> {
    let sym = family.symmetrize()?;
    let b2: Vec<f64> = (0..=2 * family.k() + 3).map(|n| sym.b(n).powi(2)).collect();
    Ok(dimension_check_sequence(&b2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::recurrence::Definiteness;

    fn fam(beta: [i64; 4], gamma: [i64; 3]) -> PeriodicRecurrence {
        PeriodicRecurrence::k2(beta.map(int), gamma.map(int), Definiteness::Positive).unwrap()
    }

    #[test]
    fn unit_gamma_truncation() {
        let t = OscillatorTruncation::build(&fam([0, 0, 0, 0], [1, 1, 1]), 3).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        assert_eq!((t.a_plus[(1, 0)], t.a_plus[(2, 1)]), (r2, r2));
        assert_eq!(t.hamiltonian_diag[0], 2.0);
        assert_eq!(t.hamiltonian_diag[1], 4.0);
        assert_eq!(t.b_diag, vec![0.0, 1.0, 1.0]);

        let t2 = OscillatorTruncation::build(&fam([0, 0, 0, 0], [3, 1, 1]), 2).unwrap();
        assert_eq!(t2.a_plus.shape(), (2, 2));
        assert!((t2.a_plus[(1, 0)] - 6f64.sqrt()).abs() < 1e-15);
        assert!(OscillatorTruncation::build(&fam([0, 0, 0, 0], [1, 1, 1]), 1).is_err());
    }

    #[test]
    fn periodic_b_values() {
        let t = OscillatorTruncation::build(&fam([0, 1, 0, 2], [1, 1, 2]), 6).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        for (got, want) in t.b.iter().zip([1.0, 1.0, r2, 1.0, r2, 1.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn relations_and_fault_injection() {
        let mut t = OscillatorTruncation::build(&fam([0, 1, 0, 2], [1, 1, 2]), 10).unwrap();
        assert!(verify_algebra_relations(&t).unwrap().max() <= 1e-14);
        t.a_plus[(3, 2)] *= 1.01;
        t.a_minus[(2, 3)] *= 1.01;
        let r = verify_algebra_relations(&t).unwrap();
        assert!(r.lowering_raising > 1e-3 && r.raising_lowering > 1e-3);
    }

    #[test]
    fn spectrum_closed_form() {
        let t = OscillatorTruncation::build(&fam([0, 1, 0, 2], [1, 1, 2]), 8).unwrap();
        let s = hamiltonian_spectrum(&t);
        assert_eq!(s.eigenvalues.len(), 7);
        for (e, want) in s.eigenvalues.iter().zip([2.0, 4.0, 6.0, 6.0, 6.0, 6.0, 6.0]) {
            assert!((e - want).abs() < 1e-12);
        }
        assert!(s.max_rel_dev <= 1e-12);
    }

    #[test]
    fn algebra_equality() {
        let p = fam([0, 1, 0, 2], [1, 1, 2]);
        let same_gamma = fam([5, -1, 3, 3], [1, 1, 2]);
        assert!(algebras_equal(&p, &same_gamma));
        let bumped = PeriodicRecurrence::from_f64(2, &[0.0, 1.0, 0.0, 2.0], &[1.0, 1.001, 2.0], Definiteness::Positive).unwrap();
        assert!(!algebras_equal(&p, &bumped));
    }

    #[test]
    fn dimension_fits() {
        assert_eq!(dimension_check(&fam([0, 1, 0, 2], [1, 1, 2])).unwrap(), DimensionVerdict::Infinite);
        assert_eq!(dimension_check(&fam([0, 0, 0, 0], [3, 3, 3])).unwrap(), DimensionVerdict::Infinite);
        let harmonic: Vec<f64> = (0..8).map(|n| 1.0 + n as f64).collect();
        assert_eq!(dimension_check_sequence(&harmonic), DimensionVerdict::FiniteCandidate);
    }
}

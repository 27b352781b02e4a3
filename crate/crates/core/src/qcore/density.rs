use nalgebra::Matrix4;
use num_complex::Complex64;

use super::state::{ComplexAmp, StateVector, EXACT_TOL};
use super::QcoreError;

/// Two-qubit density matrix. Only produced as an analysis output; states
/// are never evolved in this form.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix2 {
    pub entries: [[ComplexAmp; 4]; 4],
}

impl DensityMatrix2 {
    pub fn maximally_mixed() -> Self {
        let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = Complex64::new(0.25, 0.0);
        }
        Self { entries }
    }

    pub fn trace(&self) -> ComplexAmp {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..4).all(|r| (0..4).all(|c| (self.entries[r][c] - self.entries[c][r].conj()).norm() <= tol))
    }

    /// Eigenvalues in ascending order (matrix assumed Hermitian).
    pub fn eigenvalues(&self) -> [f64; 4] {
        let m = Matrix4::from_fn(|r, c| self.entries[r][c]);
        let eig = m.symmetric_eigenvalues();
        let mut out = [eig[0], eig[1], eig[2], eig[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        self.eigenvalues()[0] >= -1e-10
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        worst
    }

    /// Hermitian, unit trace and PSD at the engine's tolerances.
    pub fn is_valid(&self) -> bool {
        self.is_hermitian(EXACT_TOL)
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= EXACT_TOL
            && self.is_positive_semidefinite()
    }
}

/// `density_average`: `Σ wᵢ |sᵢ⟩⟨sᵢ|` over two-qubit states.
pub fn density_average(states: &[StateVector], weights: &[f64]) -> Result<DensityMatrix2, QcoreError> {
    if states.len() != weights.len() || states.is_empty() {
        return Err(QcoreError::WeightMismatch(format!(
            "{} states but {} weights",
            states.len(),
            weights.len()
        )));
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (total - 1.0).abs() > EXACT_TOL {
        return Err(QcoreError::WeightMismatch(format!(
            "weights must be non-negative and sum to 1 (sum = {total})"
        )));
    }
    let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (s, &w) in states.iter().zip(weights) {
        if s.n_qubits() != 2 {
            return Err(QcoreError::DimensionMismatch {
                left: 2,
                right: s.n_qubits(),
            });
        }
        let a = s.amplitudes();
        for r in 0..4 {
            for c in 0..4 {
                entries[r][c] += a[r] * a[c].conj() * w;
            }
        }
    }
    Ok(DensityMatrix2 { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::bell::BellSet;

    #[test]
    fn single_product_state_gives_rank_one_projector() {
        let s = StateVector::basis_state(2, 0).unwrap();
        let rho = density_average(&[s], &[1.0]).unwrap();
        assert!(rho.is_valid());
        let ev = rho.eigenvalues();
        assert!((ev[3] - 1.0).abs() < EXACT_TOL);
        assert!(ev[..3].iter().all(|e| e.abs() < EXACT_TOL));
        assert_eq!(rho.entries[0][0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn standard_set_average_is_maximally_mixed() {
        let states: Vec<_> = BellSet::Standard.members().map(|m| m.state()).collect();
        let rho = density_average(&states, &[0.25; 4]).unwrap();
        assert!(rho.max_abs_diff(&DensityMatrix2::maximally_mixed()) < EXACT_TOL);
    }

    #[test]
    fn weight_errors() {
        let s = StateVector::basis_state(2, 0).unwrap();
        assert!(density_average(std::slice::from_ref(&s), &[0.5]).is_err());
        assert!(density_average(&[s.clone(), s.clone()], &[1.0]).is_err());
        let one = StateVector::basis_state(1, 0).unwrap();
        assert!(density_average(&[one], &[1.0]).is_err());
    }
}

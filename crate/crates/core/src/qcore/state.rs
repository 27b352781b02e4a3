//! Dense complex statevectors over at most [`MAX_QUBITS`] qubits.
//!
//! Qubit 0 is the most significant bit of the basis-state index, so for a
//! two-photon state the amplitudes are ordered `|00⟩, |01⟩, |10⟩, |11⟩` with
//! photon B as the left (first) tensor factor.

use num_complex::Complex64;

use super::QcoreError;

/// Amplitude type used throughout the engine.
pub type ComplexAmp = Complex64;

/// Largest joint state the registry will build.
pub const MAX_QUBITS: usize = 8;

/// Tolerance for exact algebra (normalisation, unitarity, phase comparisons).
pub const EXACT_TOL: f64 = 1e-12;

/// A single-qubit operator in row-major order.
pub type Matrix2 = [[ComplexAmp; 2]; 2];

pub(crate) const ZERO: ComplexAmp = Complex64::new(0.0, 0.0);
pub(crate) const ONE: ComplexAmp = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<ComplexAmp>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, rescaling to unit norm.
    ///
    /// The length must be `2^n` for `1 <= n <= MAX_QUBITS`; every amplitude
    /// must be finite and the vector must not be zero.
    pub fn normalized(amps: Vec<ComplexAmp>) -> Result<Self, QcoreError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QcoreError::InvalidAmplitudes(format!(
                "length {len} is not 2^n for n >= 1"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(QcoreError::TooManyQubits(n_qubits));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QcoreError::InvalidAmplitudes("non-finite amplitude".into()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QcoreError::InvalidAmplitudes("zero vector".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index⟩` on `n_qubits` qubits.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self, QcoreError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QcoreError::TooManyQubits(n_qubits));
        }
        let len = 1usize << n_qubits;
        if index >= len {
            return Err(QcoreError::InvalidAmplitudes(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; len];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[ComplexAmp] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `self ⊗ other`; qubits of `self` come first.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, QcoreError> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(QcoreError::TooManyQubits(n));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    /// Scales every amplitude by a unit-modulus phase.
    pub fn with_global_phase(&self, phase: ComplexAmp) -> StateVector {
        StateVector {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// Applies a 2x2 matrix to one qubit in place.
    pub fn apply_single(&mut self, qubit: usize, m: &Matrix2) -> Result<(), QcoreError> {
        if qubit >= self.n_qubits {
            return Err(QcoreError::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        let stride = 1usize << (self.n_qubits - 1 - qubit);
        for base in 0..self.amps.len() {
            if base & stride != 0 {
                continue;
            }
            let a0 = self.amps[base];
            let a1 = self.amps[base | stride];
            self.amps[base] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[base | stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<ComplexAmp, QcoreError> {
        self.check_dims(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Phase-insensitive overlap `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, QcoreError> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    pub fn equal_up_to_phase(&self, other: &StateVector, tol: f64) -> Result<bool, QcoreError> {
        Ok(self.fidelity(other)? >= 1.0 - tol)
    }

    /// Amplitude-wise comparison, sensitive to global phase.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> Result<bool, QcoreError> {
        self.check_dims(other)?;
        Ok(self.amps.iter().zip(&other.amps).all(|(a, b)| (a - b).norm() <= tol))
    }

    fn check_dims(&self, other: &StateVector) -> Result<(), QcoreError> {
        if self.n_qubits != other.n_qubits {
            return Err(QcoreError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Contracts `bra` against the listed qubits (in that order).
    ///
    /// Returns the unnormalised amplitude vector over the remaining qubits,
    /// which keep their relative order. Its squared norm is the Born
    /// probability of the projection.
    pub(crate) fn contract(&self, qubits: &[usize], bra: &StateVector) -> Vec<ComplexAmp> {
        let n = self.n_qubits;
        let m = qubits.len();
        debug_assert_eq!(bra.n_qubits, m);
        let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
        let mut out = vec![ZERO; 1 << rest.len()];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut base = 0usize;
            for (pos, &q) in rest.iter().enumerate() {
                if (j >> (rest.len() - 1 - pos)) & 1 == 1 {
                    base |= 1 << (n - 1 - q);
                }
            }
            let mut acc = ZERO;
            for (s, b) in bra.amps.iter().enumerate() {
                if *b == ZERO {
                    continue;
                }
                let mut idx = base;
                for (pos, &q) in qubits.iter().enumerate() {
                    if (s >> (m - 1 - pos)) & 1 == 1 {
                        idx |= 1 << (n - 1 - q);
                    }
                }
                acc += b.conj() * self.amps[idx];
            }
            *slot = acc;
        }
        out
    }

    /// Returns the same state with qubits reordered so that new qubit `i`
    /// is old qubit `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<StateVector, QcoreError> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(QcoreError::InvalidAmplitudes(format!(
                "{order:?} is not a permutation of {n} qubits"
            )));
        }
        let mut amps = vec![ZERO; self.amps.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut old_idx = 0usize;
            for (new_q, &old_q) in order.iter().enumerate() {
                if (new_idx >> (n - 1 - new_q)) & 1 == 1 {
                    old_idx |= 1 << (n - 1 - old_q);
                }
            }
            *slot = self.amps[old_idx];
        }
        Ok(StateVector { n_qubits: n, amps })
    }
}

/// Builds a normalised state from a literal amplitude list of `(re, im)` pairs.
pub fn state_from_parts(parts: &[(f64, f64)]) -> Result<StateVector, QcoreError> {
    StateVector::normalized(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexAmp {
        Complex64::new(re, im)
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let mut s = StateVector::basis_state(2, 0).unwrap();
        let x = [[ZERO, ONE], [ONE, ZERO]];
        s.apply_single(0, &x).unwrap();
        // |10⟩ sits at index 2.
        assert_eq!(s.amplitudes()[2], ONE);
    }

    #[test]
    fn rejects_bad_lengths_and_values() {
        assert!(StateVector::normalized(vec![ONE; 3]).is_err());
        assert!(StateVector::normalized(vec![ONE]).is_err());
        assert!(StateVector::normalized(vec![ZERO; 4]).is_err());
        assert!(StateVector::normalized(vec![c(f64::NAN, 0.0), ONE]).is_err());
        assert!(matches!(
            StateVector::basis_state(9, 0),
            Err(QcoreError::TooManyQubits(9))
        ));
    }

    #[test]
    fn fidelity_requires_equal_dims() {
        let a = StateVector::basis_state(1, 0).unwrap();
        let b = StateVector::basis_state(2, 0).unwrap();
        assert!(matches!(
            a.fidelity(&b),
            Err(QcoreError::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn contract_keeps_remaining_order() {
        // |0⟩|1⟩|+⟩ contracted on the middle qubit with ⟨1|.
        let plus = state_from_parts(&[(1.0, 0.0), (1.0, 0.0)]).unwrap();
        let s = StateVector::basis_state(1, 0)
            .unwrap()
            .tensor(&StateVector::basis_state(1, 1).unwrap())
            .unwrap()
            .tensor(&plus)
            .unwrap();
        let rest = s.contract(&[1], &StateVector::basis_state(1, 1).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((rest[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((rest[1] - c(h, 0.0)).norm() < 1e-15);
        assert_eq!(rest[2], ZERO);
    }

    #[test]
    fn permutation_swaps_factors() {
        let s = StateVector::basis_state(2, 1).unwrap(); // |01⟩
        let p = s.permuted(&[1, 0]).unwrap();
        assert_eq!(p.amplitudes()[2], ONE); // |10⟩
        assert!(s.permuted(&[0, 0]).is_err());
    }
}

//! Photon bookkeeping across independently prepared states.
//!
//! Every live photon points at one qubit of one registered [`StateVector`].
//! Joint operations on photons from different states first merge those
//! states by tensor product; measured photons are projected out and retired
//! immediately, so a state only ever holds qubits that are still in flight.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::basis::MeasBasis;
use super::bell::{BellSet, BellState};
use super::state::{ComplexAmp, Matrix2, StateVector};
use super::unitary::UnitaryCode;
use super::QcoreError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhotonId(pub u64);

impl fmt::Display for PhotonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "photon#{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateHandle(u64);

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PhotonRef {
    pub photon_id: PhotonId,
    pub state_handle: StateHandle,
    pub qubit_index: usize,
}

#[derive(Clone, Debug)]
struct Entry {
    state: StateVector,
    /// `owners[q]` is the photon stored at qubit `q`.
    owners: Vec<PhotonId>,
}

#[derive(Clone, Debug, Default)]
pub struct PairRegistry {
    states: BTreeMap<StateHandle, Entry>,
    photons: BTreeMap<PhotonId, PhotonRef>,
    next_photon: u64,
    next_state: u64,
}

impl PairRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a state; returns one photon per qubit, in qubit order.
    pub fn insert(&mut self, state: StateVector) -> Vec<PhotonId> {
        let handle = StateHandle(self.next_state);
        self.next_state += 1;
        let owners: Vec<PhotonId> = (0..state.n_qubits())
            .map(|q| {
                let id = PhotonId(self.next_photon);
                self.next_photon += 1;
                self.photons.insert(
                    id,
                    PhotonRef {
                        photon_id: id,
                        state_handle: handle,
                        qubit_index: q,
                    },
                );
                id
            })
            .collect();
        self.states.insert(
            handle,
            Entry {
                state,
                owners: owners.clone(),
            },
        );
        owners
    }

    pub fn photon(&self, id: PhotonId) -> Result<PhotonRef, QcoreError> {
        self.photons.get(&id).copied().ok_or(QcoreError::DeadPhoton(id))
    }

    pub fn is_live(&self, id: PhotonId) -> bool {
        self.photons.contains_key(&id)
    }

    pub fn live_photons(&self) -> usize {
        self.photons.len()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Drops everything without measuring.
    pub fn clear(&mut self) {
        self.states.clear();
        self.photons.clear();
    }

    pub fn apply_matrix(&mut self, id: PhotonId, m: &Matrix2) -> Result<(), QcoreError> {
        let p = self.photon(id)?;
        let entry = self.states.get_mut(&p.state_handle).expect("live photon has a state");
        entry.state.apply_single(p.qubit_index, m)
    }

    /// `apply_local`: one encoding operation on one photon.
    pub fn apply_local(&mut self, u: UnitaryCode, id: PhotonId) -> Result<(), QcoreError> {
        self.apply_matrix(id, &u.matrix())
    }

    /// Exact Born probabilities of measuring `id` in `basis`.
    pub fn outcome_probabilities(&self, id: PhotonId, basis: MeasBasis) -> Result<[f64; 2], QcoreError> {
        let p = self.photon(id)?;
        let state = &self.states[&p.state_handle].state;
        let mut probs = [0.0; 2];
        for (outcome, prob) in probs.iter_mut().enumerate() {
            let rest = state.contract(&[p.qubit_index], &basis.eigenstate(outcome as u8));
            *prob = rest.iter().map(|a| a.norm_sqr()).sum();
        }
        Ok(probs)
    }

    /// Post-selects `outcome`; returns its probability. The photon is retired.
    pub fn project_single(&mut self, id: PhotonId, basis: MeasBasis, outcome: u8) -> Result<f64, QcoreError> {
        let p = self.photon(id)?;
        self.project(p.state_handle, &[p.qubit_index], &basis.eigenstate(outcome))
    }

    /// `measure_single`: Born-sampled outcome with collapse; the photon is
    /// retired and its partners keep the conditional state.
    pub fn measure_single<R: Rng + ?Sized>(
        &mut self,
        id: PhotonId,
        basis: MeasBasis,
        rng: &mut R,
    ) -> Result<u8, QcoreError> {
        let probs = self.outcome_probabilities(id, basis)?;
        let outcome = sample_index(&probs, rng) as u8;
        self.project_single(id, basis, outcome)?;
        Ok(outcome)
    }

    /// Exact probabilities of each member of `set` for the pair `(a, b)`,
    /// with `a` in the first tensor slot. Merges the two states if needed.
    pub fn bell_probabilities(&mut self, a: PhotonId, b: PhotonId, set: BellSet) -> Result<[f64; 4], QcoreError> {
        let (handle, qa, qb) = self.colocate(a, b)?;
        let state = &self.states[&handle].state;
        let mut probs = [0.0; 4];
        for (m, prob) in probs.iter_mut().enumerate() {
            let bra = BellState { set, member: m as u8 }.state();
            let rest = state.contract(&[qa, qb], &bra);
            *prob = rest.iter().map(|z| z.norm_sqr()).sum();
        }
        Ok(probs)
    }

    /// Post-selects one Bell outcome on `(a, b)`; returns its probability.
    pub fn project_bell(&mut self, a: PhotonId, b: PhotonId, set: BellSet, member: u8) -> Result<f64, QcoreError> {
        let (handle, qa, qb) = self.colocate(a, b)?;
        let bra = BellState::new(set, member)
            .ok_or(QcoreError::InvalidMember(member))?
            .state();
        self.project(handle, &[qa, qb], &bra)
    }

    /// `bell_measure`: Born-sampled projection of `(a, b)` onto `set`.
    pub fn bell_measure<R: Rng + ?Sized>(
        &mut self,
        a: PhotonId,
        b: PhotonId,
        set: BellSet,
        rng: &mut R,
    ) -> Result<u8, QcoreError> {
        let probs = self.bell_probabilities(a, b, set)?;
        let member = sample_index(&probs, rng) as u8;
        self.project_bell(a, b, set, member)?;
        Ok(member)
    }

    /// Traces a photon out by measuring it in Z and forgetting the result.
    pub fn discard<R: Rng + ?Sized>(&mut self, id: PhotonId, rng: &mut R) -> Result<(), QcoreError> {
        self.measure_single(id, MeasBasis::Z, rng).map(|_| ())
    }

    /// The joint state of exactly the given photons, in the given order.
    ///
    /// Fails with [`QcoreError::NotIsolated`] unless the photons make up one
    /// whole registered state.
    pub fn joint_state(&self, ids: &[PhotonId]) -> Result<StateVector, QcoreError> {
        let first = self.photon(*ids.first().ok_or(QcoreError::NotIsolated)?)?;
        let entry = &self.states[&first.state_handle];
        if entry.owners.len() != ids.len() {
            return Err(QcoreError::NotIsolated);
        }
        let mut order = Vec::with_capacity(ids.len());
        for id in ids {
            let p = self.photon(*id)?;
            if p.state_handle != first.state_handle {
                return Err(QcoreError::NotIsolated);
            }
            order.push(p.qubit_index);
        }
        entry.state.permuted(&order)
    }

    fn colocate(&mut self, a: PhotonId, b: PhotonId) -> Result<(StateHandle, usize, usize), QcoreError> {
        if a == b {
            return Err(QcoreError::IdenticalPhotons(a));
        }
        let pa = self.photon(a)?;
        let pb = self.photon(b)?;
        if pa.state_handle != pb.state_handle {
            self.merge(pa.state_handle, pb.state_handle)?;
        }
        let pa = self.photon(a)?;
        let pb = self.photon(b)?;
        Ok((pa.state_handle, pa.qubit_index, pb.qubit_index))
    }

    /// Replaces two states by their tensor product under the first handle.
    fn merge(&mut self, keep: StateHandle, other: StateHandle) -> Result<(), QcoreError> {
        let n = self.states[&keep].state.n_qubits() + self.states[&other].state.n_qubits();
        if n > super::state::MAX_QUBITS {
            return Err(QcoreError::TooManyQubits(n));
        }
        let second = self.states.remove(&other).expect("merge of live state");
        let first = self.states.get_mut(&keep).expect("merge of live state");
        first.state = first.state.tensor(&second.state)?;
        first.owners.extend(second.owners);
        let owners = first.owners.clone();
        self.reindex(keep, &owners);
        Ok(())
    }

    fn reindex(&mut self, handle: StateHandle, owners: &[PhotonId]) {
        for (q, id) in owners.iter().enumerate() {
            let r = self.photons.get_mut(id).expect("owner is live");
            r.state_handle = handle;
            r.qubit_index = q;
        }
    }

    fn project(&mut self, handle: StateHandle, qubits: &[usize], bra: &StateVector) -> Result<f64, QcoreError> {
        let entry = self.states.get(&handle).expect("live state");
        let rest: Vec<ComplexAmp> = entry.state.contract(qubits, bra);
        let prob: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
        if prob <= 1e-300 {
            return Err(QcoreError::ZeroProbabilityOutcome);
        }
        let mut entry = self.states.remove(&handle).expect("live state");
        for &q in qubits {
            self.photons.remove(&entry.owners[q]);
        }
        let survivors: Vec<PhotonId> = entry
            .owners
            .iter()
            .enumerate()
            .filter(|(q, _)| !qubits.contains(q))
            .map(|(_, id)| *id)
            .collect();
        if !survivors.is_empty() {
            entry.state = StateVector::normalized(rest)?;
            entry.owners = survivors.clone();
            self.states.insert(handle, entry);
            self.reindex(handle, &survivors);
        }
        Ok(prob)
    }
}

/// Inverse-CDF draw over a probability vector that sums to one up to
/// rounding.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    last_nonzero
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::bell::state_of;
    use crate::qcore::state::EXACT_TOL;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn dead_and_identical_references_are_rejected() {
        let mut reg = PairRegistry::new();
        let ids = reg.insert(state_of(BellSet::Standard, 0).unwrap());
        let mut r = rng();
        assert!(matches!(
            reg.bell_measure(ids[0], ids[0], BellSet::Standard, &mut r),
            Err(QcoreError::IdenticalPhotons(_))
        ));
        reg.measure_single(ids[0], MeasBasis::Z, &mut r).unwrap();
        assert!(matches!(
            reg.apply_local(UnitaryCode::U1, ids[0]),
            Err(QcoreError::DeadPhoton(_))
        ));
        assert!(matches!(
            reg.measure_single(ids[0], MeasBasis::Z, &mut r),
            Err(QcoreError::DeadPhoton(_))
        ));
    }

    #[test]
    fn measured_qubits_are_factored_out() {
        let mut reg = PairRegistry::new();
        let ids = reg.insert(state_of(BellSet::Standard, 0).unwrap());
        let mut r = rng();
        let outcome = reg.measure_single(ids[0], MeasBasis::Z, &mut r).unwrap();
        assert_eq!(reg.live_photons(), 1);
        let partner = reg.joint_state(&[ids[1]]).unwrap();
        assert_eq!(partner.n_qubits(), 1);
        let expected = MeasBasis::Z.eigenstate(outcome);
        assert!(partner.equal_up_to_phase(&expected, EXACT_TOL).unwrap());
        reg.measure_single(ids[1], MeasBasis::Z, &mut r).unwrap();
        assert_eq!(reg.state_count(), 0);
    }

    #[test]
    fn merging_beyond_eight_qubits_fails() {
        let mut reg = PairRegistry::new();
        let big = StateVector::basis_state(7, 0).unwrap();
        let a = reg.insert(big);
        let b = reg.insert(state_of(BellSet::Standard, 0).unwrap());
        assert!(matches!(
            reg.bell_probabilities(a[0], b[0], BellSet::Standard),
            Err(QcoreError::TooManyQubits(9))
        ));
    }

    #[test]
    fn joint_state_reorders_and_checks_isolation() {
        let mut reg = PairRegistry::new();
        let ids = reg.insert(state_of(BellSet::Standard, 2).unwrap());
        let other = reg.insert(StateVector::basis_state(1, 0).unwrap());
        assert!(matches!(reg.joint_state(&[ids[0]]), Err(QcoreError::NotIsolated)));
        assert!(matches!(
            reg.joint_state(&[ids[0], other[0]]),
            Err(QcoreError::NotIsolated)
        ));
        // ψ+ is symmetric, ψ− flips sign under exchange.
        let swapped = reg.joint_state(&[ids[1], ids[0]]).unwrap();
        assert!(swapped
            .approx_eq(&state_of(BellSet::Standard, 2).unwrap(), EXACT_TOL)
            .unwrap());
    }

    #[test]
    fn zero_probability_projection_leaves_state_untouched() {
        let mut reg = PairRegistry::new();
        let ids = reg.insert(StateVector::basis_state(1, 0).unwrap());
        assert!(matches!(
            reg.project_single(ids[0], MeasBasis::Z, 1),
            Err(QcoreError::ZeroProbabilityOutcome)
        ));
        assert!(reg.is_live(ids[0]));
    }
}

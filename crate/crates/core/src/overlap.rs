//! Inner products between bowtie states on different cones.
//!
//! A bowtie state on cone `S` is `|a⟩ ⊗ |0⟩` on the full register, so
//! `⟨a|b⟩` only receives contributions from assignments of `S_A ∩ S_B` with
//! every other cone bit set to zero.

use num_traits::Zero;
use serde::Serialize;

use crate::lightcone::LightCone;
use crate::scalar::{Cplx, Scalar};
use crate::statevector::{BoundBowtieState, StateVector};

/// Cached index data for one pair of cones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionPlan {
    pub a: usize,
    pub b: usize,
    /// Local bit positions of the shared qubits in `a`'s amplitude index.
    pub mask_a: u64,
    /// Same for `b`.
    pub mask_b: u64,
}

impl ContractionPlan {
    pub fn new(a: usize, cone_a: &LightCone, b: usize, cone_b: &LightCone) -> Self {
        let (mut mask_a, mut mask_b) = (0u64, 0u64);
        let (qa, qb) = (cone_a.qubits(), cone_b.qubits());
        let (mut i, mut j) = (0, 0);
        while i < qa.len() && j < qb.len() {
            match qa[i].cmp(&qb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    mask_a |= 1 << i;
                    mask_b |= 1 << j;
                    i += 1;
                    j += 1;
                }
            }
        }
        ContractionPlan { a, b, mask_a, mask_b }
    }

    /// `|S_A ∩ S_B|`.
    pub fn intersection_size(&self) -> u32 {
        self.mask_a.count_ones()
    }
}

/// `⟨a|b⟩` over the cone intersection, plus the number of terms summed.
///
/// Both masks are walked as sub-masks in increasing order; since the shared
/// qubits appear in the same relative order in both cones, the `k`-th sub-mask
/// of each corresponds to the same intersection assignment.
pub fn overlap_counted<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>, plan: &ContractionPlan) -> (Cplx<T>, u64) {
    let (aa, bb) = (a.amplitudes(), b.amplitudes());
    let (ma, mb) = (plan.mask_a, plan.mask_b);
    let mut acc = Cplx::zero();
    let (mut ia, mut ib) = (0u64, 0u64);
    let mut terms = 0u64;
    loop {
        acc += aa[ia as usize].conj() * bb[ib as usize];
        terms += 1;
        if ia == ma {
            break;
        }
        ia = ia.wrapping_sub(ma) & ma;
        ib = ib.wrapping_sub(mb) & mb;
    }
    (acc, terms)
}

/// `⟨a|b⟩` through a pre-computed plan.
pub fn overlap<T: Scalar>(a: &BoundBowtieState<T>, b: &BoundBowtieState<T>, plan: &ContractionPlan) -> Cplx<T> {
    overlap_counted(&a.state, &b.state, plan).0
}

/// `⟨b|α⟩` with `|α⟩ = |0…0⟩`: the conjugated all-zero amplitude.
pub fn overlap_with_alpha<T: Scalar>(b: &BoundBowtieState<T>) -> Cplx<T> {
    b.state.amplitudes()[0].conj()
}

/// Ad-hoc overlap of two states given their cones.
pub fn overlap_on_cones<T: Scalar>(
    a: &StateVector<T>,
    cone_a: &LightCone,
    b: &StateVector<T>,
    cone_b: &LightCone,
) -> Cplx<T> {
    overlap_counted(a, b, &ContractionPlan::new(0, cone_a, 1, cone_b)).0
}

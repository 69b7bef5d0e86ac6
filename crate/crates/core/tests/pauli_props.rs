mod common;

use bowtie_core::pauli::{
    conjugate_by_clifford, propagate_rotation_different_angles, Bits, CliffordGate, CliffordKind, Pauli, PauliString,
    Phase,
};
use common::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn letter() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn phase() -> impl Strategy<Value = Phase> {
    prop_oneof![
        Just(Phase::PlusOne),
        Just(Phase::PlusI),
        Just(Phase::MinusOne),
        Just(Phase::MinusI)
    ]
}

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(letter(), n), phase()).prop_map(move |(ls, ph)| {
        let ops: Vec<(usize, Pauli)> = ls.into_iter().enumerate().filter(|(_, p)| *p != Pauli::I).collect();
        PauliString::from_sparse(n, &ops).unwrap().with_phase(ph)
    })
}

fn basis_vec(n: usize, s: usize) -> State {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[s] = c(1.0, 0.0);
    v
}

/// Columns of the operator applied by `f`.
fn columns(n: usize, f: impl Fn(&State) -> State) -> Vec<State> {
    (0..1 << n).map(|s| f(&basis_vec(n, s))).collect()
}

fn same_operator(a: &[State], b: &[State], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| x.iter().zip(y).all(|(u, v)| (u - v).norm() < tol))
}

fn clifford_gate() -> impl Strategy<Value = CliffordGate> {
    let kinds = prop_oneof![
        Just(CliffordKind::H),
        Just(CliffordKind::S),
        Just(CliffordKind::Sdg),
        Just(CliffordKind::X),
        Just(CliffordKind::Y),
        Just(CliffordKind::Z),
        Just(CliffordKind::CX)
    ];
    (kinds, 0usize..3, 1usize..3).prop_map(|(k, a, off)| {
        if k == CliffordKind::CX {
            CliffordGate::new(k, &[a, (a + off) % 3]).unwrap()
        } else {
            CliffordGate::new(k, &[a]).unwrap()
        }
    })
}

fn apply_clifford_dense(psi: &State, g: &CliffordGate, dagger: bool) -> State {
    match g.kind() {
        CliffordKind::CX => apply_2q(psi, g.qubits()[0], g.qubits()[1], &cx_matrix()),
        k => {
            let k = if dagger { k.inverse() } else { k };
            apply_1q(psi, g.qubits()[0], &clifford_1q(k))
        }
    }
}

proptest! {
    #[test]
    fn product_matches_matrix_product(a in pauli(3), b in pauli(3)) {
        let ab = a.multiply(&b).unwrap();
        let lhs = columns(3, |v| apply_pauli(v, &ab));
        let rhs = columns(3, |v| apply_pauli(&apply_pauli(v, &b), &a));
        prop_assert!(same_operator(&lhs, &rhs, 1e-14));
    }

    #[test]
    fn commutation_matches_matrices(a in pauli(3), b in pauli(3)) {
        let ab = columns(3, |v| apply_pauli(&apply_pauli(v, &b), &a));
        let ba = columns(3, |v| apply_pauli(&apply_pauli(v, &a), &b));
        prop_assert_eq!(a.commutes(&b).unwrap(), same_operator(&ab, &ba, 1e-14));
    }

    #[test]
    fn squares_to_phase_identity(a in pauli(4)) {
        let sq = a.multiply(&a).unwrap();
        prop_assert!(sq.is_identity());
        let expected = if a.phase() == Phase::PlusOne || a.phase() == Phase::MinusOne {
            Phase::PlusOne
        } else {
            Phase::MinusOne
        };
        prop_assert_eq!(sq.phase(), expected);
    }

    #[test]
    fn basis_action_matches_dense(a in pauli(4), s in 0u64..16) {
        let (ph, t) = a.apply_to_basis(s);
        let v = apply_pauli(&basis_vec(4, s as usize), &a);
        prop_assert!((v[t as usize] - phase_value(ph)).norm() < 1e-15);
    }

    #[test]
    fn clifford_image_and_conjugation(p in pauli(3), g in clifford_gate()) {
        // image: g P g†, conjugation: g† P g
        let img = g.image(&p).unwrap();
        let lhs = columns(3, |v| apply_pauli(v, &img));
        let rhs = columns(3, |v| {
            let w = apply_clifford_dense(v, &g, true);
            apply_clifford_dense(&apply_pauli(&w, &p), &g, false)
        });
        prop_assert!(same_operator(&lhs, &rhs, 1e-13));
        let conj = conjugate_by_clifford(&p, &g).unwrap();
        let lhs = columns(3, |v| apply_pauli(v, &conj));
        let rhs = columns(3, |v| {
            let w = apply_clifford_dense(v, &g, false);
            apply_clifford_dense(&apply_pauli(&w, &p), &g, true)
        });
        prop_assert!(same_operator(&lhs, &rhs, 1e-13));
    }

    #[test]
    fn clifford_preserves_commutation(a in pauli(3), b in pauli(3), g in clifford_gate()) {
        let (ia, ib) = (g.image(&a).unwrap(), g.image(&b).unwrap());
        prop_assert_eq!(a.commutes(&b).unwrap(), ia.commutes(&ib).unwrap());
    }

    #[test]
    fn different_angle_propagation_matches_dense(
        p in pauli(2).prop_filter("non-identity", |p| !p.is_identity()),
        q in pauli(2),
        theta in -3.2f64..3.2,
        delta in -3.2f64..3.2,
    ) {
        let p = p.unsigned();
        let sum = propagate_rotation_different_angles(&q, &p, theta, delta).unwrap();
        let lhs = columns(2, |v| apply_sum(v, &sum));
        // half-angle rotations: R_P(φ) = e^{-iφP/2}
        let rhs = columns(2, |v| {
            let w = apply_rotation(v, &p, -(theta - delta) / 2.0);
            apply_rotation(&apply_pauli(&w, &q), &p, (theta + delta) / 2.0)
        });
        prop_assert!(same_operator(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn label_roundtrip(a in pauli(6)) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<PauliString>().unwrap(), a);
    }

    #[test]
    fn support_is_union_of_masks(a in pauli(8)) {
        let mut b = Bits::zero();
        for q in 0..8 {
            if a.pauli_at(q) != Pauli::I {
                b.set(q, true);
            }
        }
        prop_assert_eq!(a.support_bits(), b);
    }
}

#[test]
fn rotation_unitary_is_unitary() {
    let p: PauliString = "XYZ".parse().unwrap();
    let cols = columns(3, |v| apply_rotation(v, &p, 0.37));
    for i in 0..8 {
        for j in 0..8 {
            let ip: C = inner(&cols[i], &cols[j]);
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((ip - c(want, 0.0)).norm() < 1e-14);
        }
    }
}

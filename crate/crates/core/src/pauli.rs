//! Phase-tracked Pauli strings in X/Z bit-mask form and their conjugation by
//! Clifford gates and Pauli rotations.
//!
//! Qubit `q` is bit `q` of both masks. On a single qubit `(x, z)` encodes
//! `(0,0) = I`, `(1,0) = X`, `(0,1) = Z` and `(1,1) = Y` (the Hermitian `Y`,
//! not `XZ`). The full operator is `phase * P_{n-1} ⊗ ... ⊗ P_0`.
//!
//! Labels are written most-significant qubit first, so qubit 0 is the
//! rightmost character, with an optional leading phase token:
//! `"XZ"`, `"-iYI"`, `"+1ZZ"`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};

/// Maximum register width representable by [`PauliString`].
pub const MAX_QUBITS: usize = 256;
const WORDS: usize = MAX_QUBITS / 64;

/// Fixed-width bit set used for the X and Z masks.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Bits([u64; WORDS]);

impl Bits {
    pub const fn zero() -> Self {
        Bits([0; WORDS])
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        (self.0[q >> 6] >> (q & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, v: bool) {
        let w = &mut self.0[q >> 6];
        if v {
            *w |= 1 << (q & 63);
        } else {
            *w &= !(1 << (q & 63));
        }
    }

    #[inline]
    pub fn flip(&mut self, q: usize) {
        self.0[q >> 6] ^= 1 << (q & 63);
    }

    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    /// Low 64 bits; callers guarantee the register fits.
    #[inline]
    pub fn low_word(&self) -> u64 {
        self.0[0]
    }

    pub fn from_low_word(w: u64) -> Self {
        let mut b = Bits::zero();
        b.0[0] = w;
        b
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }
}

macro_rules! bits_binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl std::ops::$tr for Bits {
            type Output = Bits;
            #[inline]
            fn $f(self, rhs: Bits) -> Bits {
                let mut out = [0u64; WORDS];
                for k in 0..WORDS {
                    out[k] = self.0[k] $op rhs.0[k];
                }
                Bits(out)
            }
        }
    };
}
bits_binop!(BitAnd, bitand, &);
bits_binop!(BitOr, bitor, |);
bits_binop!(BitXor, bitxor, ^);

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

/// Unit phase `i^k`, `k ∈ {0,1,2,3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Phase {
    #[default]
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: u32) -> Self {
        match k & 3 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u32 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn conj(self) -> Self {
        Phase::from_exponent(4 - self.exponent())
    }

    pub fn negate(self) -> Self {
        Phase::from_exponent(self.exponent() + 2)
    }

    pub fn is_real(self) -> bool {
        self.exponent() & 1 == 0
    }

    pub fn to_complex<T: Scalar>(self) -> Cplx<T> {
        match self {
            Phase::PlusOne => Complex::new(T::one(), T::zero()),
            Phase::PlusI => Complex::new(T::zero(), T::one()),
            Phase::MinusOne => Complex::new(-T::one(), T::zero()),
            Phase::MinusI => Complex::new(T::zero(), -T::one()),
        }
    }

    fn token(self) -> &'static str {
        match self {
            Phase::PlusOne => "",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + rhs.exponent())
    }
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Phase-tracked n-qubit Pauli operator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: Bits,
    z: Bits,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(PauliString {
            n_qubits,
            x: Bits::zero(),
            z: Bits::zero(),
            phase: Phase::PlusOne,
        })
    }

    /// Builds a string from `(qubit, letter)` pairs; repeated qubits multiply.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = PauliString::identity(n_qubits)?;
        for &(q, op) in ops {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            let (x, z) = op.bits();
            let mut single = PauliString::identity(n_qubits)?;
            single.x.set(q, x);
            single.z.set(q, z);
            p = p.multiply(&single)?;
        }
        Ok(p)
    }

    pub fn single(n_qubits: usize, q: usize, op: Pauli) -> Result<Self> {
        PauliString::from_sparse(n_qubits, &[(q, op)])
    }

    /// Raw constructor from masks. Bits above `n_qubits` must be clear.
    pub fn from_masks(n_qubits: usize, x: Bits, z: Bits, phase: Phase) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        if let Some(q) = (x | z).ones().find(|&q| q >= n_qubits) {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        Ok(PauliString {
            n_qubits,
            x,
            z,
            phase,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> Bits {
        self.x
    }

    pub fn z_mask(&self) -> Bits {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Same operator letters with phase reset to +1.
    pub fn unsigned(self) -> Self {
        self.with_phase(Phase::PlusOne)
    }

    pub fn support_bits(&self) -> Bits {
        self.x | self.z
    }

    /// Sorted qubits on which the string acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        self.support_bits().ones().collect()
    }

    pub fn weight(&self) -> usize {
        self.support_bits().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support_bits().is_zero()
    }

    pub fn pauli_at(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    /// Operator product `self · rhs` with exact phase.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.n_qubits != rhs.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, rhs.n_qubits));
        }
        Ok(self.mul_unchecked(rhs))
    }

    pub(crate) fn mul_unchecked(&self, rhs: &PauliString) -> PauliString {
        // sigma(x,z) = i^{xz} X^x Z^z, and Z^a X^b = (-1)^{ab} X^b Z^a.
        let x = self.x ^ rhs.x;
        let z = self.z ^ rhs.z;
        let e = (self.x & self.z).count_ones() + (rhs.x & rhs.z).count_ones()
            + 2 * (self.z & rhs.x).count_ones()
            + 3 * (x & z).count_ones();
        PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: self.phase * rhs.phase * Phase::from_exponent(e),
        }
    }

    pub fn commutes(&self, rhs: &PauliString) -> Result<bool> {
        if self.n_qubits != rhs.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, rhs.n_qubits));
        }
        Ok(self.commutes_unchecked(rhs))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, rhs: &PauliString) -> bool {
        ((self.x & rhs.z).count_ones() + (self.z & rhs.x).count_ones()).is_multiple_of(2)
    }

    /// Action on a computational basis state `|s⟩` (n ≤ 64):
    /// returns `(phase, s')` with `P|s⟩ = phase |s'⟩`.
    pub fn apply_to_basis(&self, s: u64) -> (Phase, u64) {
        let x = self.x.low_word();
        let z = self.z.low_word();
        let e = self.phase.exponent() + (x & z).count_ones() + 2 * (z & s).count_ones();
        (Phase::from_exponent(e), s ^ x)
    }

    /// Label without the phase token.
    pub fn letters(&self) -> String {
        (0..self.n_qubits)
            .rev()
            .map(|q| self.pauli_at(q).to_char())
            .collect()
    }

    /// Restriction to an ordered qubit subset, re-indexed to `0..map.len()`.
    pub fn restrict(&self, map: &[usize]) -> PauliString {
        let mut x = Bits::zero();
        let mut z = Bits::zero();
        for (local, &q) in map.iter().enumerate() {
            x.set(local, self.x.get(q));
            z.set(local, self.z.get(q));
        }
        PauliString {
            n_qubits: map.len(),
            x,
            z,
            phase: self.phase,
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase.token(), self.letters())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLabel(s.to_string());
        let (phase, rest) = [
            ("+i", Phase::PlusI),
            ("-i", Phase::MinusI),
            ("+1", Phase::PlusOne),
            ("-1", Phase::MinusOne),
            ("i", Phase::PlusI),
            ("+", Phase::PlusOne),
            ("-", Phase::MinusOne),
        ]
        .iter()
        .find_map(|(tok, ph)| s.strip_prefix(tok).map(|r| (*ph, r)))
        .unwrap_or((Phase::PlusOne, s));
        if rest.is_empty() {
            return Err(bad());
        }
        let n = rest.chars().count();
        let mut p = PauliString::identity(n)?;
        for (k, c) in rest.chars().enumerate() {
            let op = Pauli::from_char(c).ok_or_else(bad)?;
            let (x, z) = op.bits();
            let q = n - 1 - k;
            p.x.set(q, x);
            p.z.set(q, z);
        }
        p.phase = phase;
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `a · b` with exact phase.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.multiply(b)
}

/// True iff the symplectic product of the masks is even.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes(b)
}

/// Clifford gate kinds understood by the circuit layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CliffordKind {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    CX,
}

impl CliffordKind {
    pub fn arity(self) -> usize {
        match self {
            CliffordKind::CX => 2,
            _ => 1,
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            CliffordKind::S => CliffordKind::Sdg,
            CliffordKind::Sdg => CliffordKind::S,
            k => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CliffordKind::H => "H",
            CliffordKind::S => "S",
            CliffordKind::Sdg => "SDG",
            CliffordKind::X => "X",
            CliffordKind::Y => "Y",
            CliffordKind::Z => "Z",
            CliffordKind::CX => "CX",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "H" => CliffordKind::H,
            "S" => CliffordKind::S,
            "SDG" => CliffordKind::Sdg,
            "X" => CliffordKind::X,
            "Y" => CliffordKind::Y,
            "Z" => CliffordKind::Z,
            "CX" | "CNOT" => CliffordKind::CX,
            _ => return None,
        })
    }
}

/// Clifford gate on one or two qubits. For `CX`, `qubits()[0]` is the control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CliffordGate {
    kind: CliffordKind,
    qubits: [usize; 2],
}

impl CliffordGate {
    pub fn new(kind: CliffordKind, qubits: &[usize]) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} expects {} qubit(s), got {}",
                kind.name(),
                kind.arity(),
                qubits.len()
            )));
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidGate(format!(
                "{} on repeated qubit {}",
                kind.name(),
                qubits[0]
            )));
        }
        let mut q = [0; 2];
        q[..qubits.len()].copy_from_slice(qubits);
        Ok(CliffordGate { kind, qubits: q })
    }

    pub fn kind(&self) -> CliffordKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn inverse(&self) -> CliffordGate {
        CliffordGate {
            kind: self.kind.inverse(),
            qubits: self.qubits,
        }
    }

    /// Forward image `g p g†`.
    pub fn image(&self, p: &PauliString) -> Result<PauliString> {
        if let Some(&q) = self.qubits().iter().find(|&&q| q >= p.n_qubits) {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: p.n_qubits,
            });
        }
        Ok(self.image_unchecked(p))
    }

    pub(crate) fn image_unchecked(&self, p: &PauliString) -> PauliString {
        let mut out = *p;
        let flip;
        let a = self.qubits[0];
        let (xa, za) = (p.x.get(a), p.z.get(a));
        match self.kind {
            CliffordKind::H => {
                flip = xa && za;
                out.x.set(a, za);
                out.z.set(a, xa);
            }
            CliffordKind::S => {
                flip = xa && za;
                out.z.set(a, za ^ xa);
            }
            CliffordKind::Sdg => {
                flip = xa && !za;
                out.z.set(a, za ^ xa);
            }
            CliffordKind::X => flip = za,
            CliffordKind::Y => flip = xa ^ za,
            CliffordKind::Z => flip = xa,
            CliffordKind::CX => {
                let t = self.qubits[1];
                let (xt, zt) = (p.x.get(t), p.z.get(t));
                flip = xa && zt && !(xt ^ za);
                out.x.set(t, xt ^ xa);
                out.z.set(a, za ^ zt);
            }
        }
        if flip {
            out.phase = out.phase.negate();
        }
        out
    }

    /// Heisenberg-picture conjugation `g† p g`.
    pub(crate) fn conjugate_unchecked(&self, p: &PauliString) -> PauliString {
        self.inverse().image_unchecked(p)
    }
}

/// Returns `g† p g` as a single phase-tracked Pauli string.
pub fn conjugate_by_clifford(p: &PauliString, g: &CliffordGate) -> Result<PauliString> {
    g.inverse().image(p)
}

/// Angle slot of a rotation gate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    /// Index into the parameter vector.
    Param(usize),
    /// Fixed angle in radians (rotation convention `e^{-iPθ}`).
    Fixed(f64),
}

/// Rotation `e^{-i P θ}` about a Pauli generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliRotation {
    generator: PauliString,
    angle: Angle,
}

impl PauliRotation {
    pub fn new(generator: PauliString, angle: Angle) -> Result<Self> {
        if generator.phase() != Phase::PlusOne || generator.is_identity() {
            return Err(Error::InvalidGenerator);
        }
        if let Angle::Fixed(a) = angle {
            if !a.is_finite() {
                return Err(Error::NonFinite(format!("rotation angle {a}")));
            }
        }
        Ok(PauliRotation { generator, angle })
    }

    pub fn generator(&self) -> &PauliString {
        &self.generator
    }

    pub fn angle(&self) -> Angle {
        self.angle
    }

    /// Bound angle for a parameter vector.
    pub fn bound_angle<T: Scalar>(&self, params: &[T]) -> Result<T> {
        match self.angle {
            Angle::Fixed(a) => Ok(T::of(a)),
            Angle::Param(i) => params.get(i).copied().ok_or(Error::UnboundParameter {
                index: i,
                len: params.len(),
            }),
        }
    }
}

/// Converts a conventional half-angle rotation angle (`e^{-iφP/2}`) into the
/// `e^{-iPθ}` convention used by circuits: `θ = φ/2`.
pub fn half_angle_to_circuit<T: Scalar>(phi: T) -> T {
    phi / T::of(2.0)
}

/// Inverse of [`half_angle_to_circuit`].
pub fn circuit_to_half_angle<T: Scalar>(theta: T) -> T {
    theta * T::of(2.0)
}

/// Real linear combination of phase-tracked Pauli strings.
///
/// Each stored string carries phase `+1` or `+i`; a sign on input is folded
/// into the coefficient. Terms with identical letters and phase are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPauliSum<T> {
    n_qubits: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Scalar> WeightedPauliSum<T> {
    pub fn empty(n_qubits: usize) -> Self {
        WeightedPauliSum {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = (T, PauliString)>) -> Result<Self> {
        let mut sum = WeightedPauliSum::empty(n_qubits);
        for (c, p) in terms {
            sum.push(c, p)?;
        }
        Ok(sum)
    }

    /// Adds a term, merging with an existing equal string.
    pub fn push(&mut self, coeff: T, pauli: PauliString) -> Result<()> {
        if pauli.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, pauli.n_qubits()));
        }
        if !coeff.is_finite() {
            return Err(Error::NonFinite(format!("coefficient of {pauli}")));
        }
        let (coeff, pauli) = match pauli.phase() {
            Phase::MinusOne => (-coeff, pauli.with_phase(Phase::PlusOne)),
            Phase::MinusI => (-coeff, pauli.with_phase(Phase::PlusI)),
            _ => (coeff, pauli),
        };
        if let Some(slot) = self.terms.iter_mut().find(|(_, p)| *p == pauli) {
            slot.0 += coeff;
        } else {
            self.terms.push((coeff, pauli));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficients(&self) -> Vec<T> {
        self.terms.iter().map(|(c, _)| *c).collect()
    }

    pub fn paulis(&self) -> Vec<PauliString> {
        self.terms.iter().map(|(_, p)| *p).collect()
    }

    /// True when every string has phase +1 (real coefficients then give a Hermitian operator).
    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.phase() == Phase::PlusOne)
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn one_norm(&self) -> T {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Converts coefficients to another scalar type.
    pub fn cast<U: Scalar>(&self) -> WeightedPauliSum<U> {
        WeightedPauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(c, p)| (U::of(c.to_f64_lossless()), *p))
                .collect(),
        }
    }
}

/// `R_P(θ+Δ) Q R_P†(θ−Δ)` with the half-angle convention `R_P(φ) = e^{-iφP/2}`.
///
/// Commuting `P, Q` give `cos(Δ) Q − sin(Δ) iPQ`; anticommuting ones give
/// `cos(θ) Q − sin(θ) iPQ`. Terms whose weight is exactly zero are omitted.
pub fn propagate_rotation_different_angles<T: Scalar>(
    q: &PauliString,
    p: &PauliString,
    theta: T,
    delta: T,
) -> Result<WeightedPauliSum<T>> {
    if p.n_qubits() != q.n_qubits() {
        return Err(Error::SizeMismatch(p.n_qubits(), q.n_qubits()));
    }
    if p.is_identity() {
        return Err(Error::InvalidGenerator);
    }
    let angle = if p.commutes_unchecked(q) { delta } else { theta };
    let ipq = p.mul_unchecked(q).with_phase(p.mul_unchecked(q).phase() * Phase::PlusI);
    let mut out = WeightedPauliSum::empty(q.n_qubits());
    let (c, s) = (angle.cos(), angle.sin());
    if c != T::zero() {
        out.push(c, *q)?;
    }
    if s != T::zero() {
        out.push(-s, ipq)?;
    }
    Ok(out)
}

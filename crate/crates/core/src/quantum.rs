//! Dense complex linear algebra over the two-ion ⊗ motional Hilbert space.
//!
//! Basis labels are `(ion 1 level, ion 2 level, Fock n)` of the centre-of-mass
//! mode. Bases are canonical: level sets are sorted and deduplicated, and labels
//! are enumerated lexicographically, so any two states built over the same level
//! sets and truncation are index-compatible.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::Half;

/// Fine-structure terms of the Ba⁺ level diagram used by the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    #[serde(rename = "6S1/2")]
    S12,
    #[serde(rename = "5D3/2")]
    D32,
    #[serde(rename = "5D5/2")]
    D52,
    #[serde(rename = "6P1/2")]
    P12,
    #[serde(rename = "6P3/2")]
    P32,
}

impl Term {
    pub const ALL: [Term; 5] = [Term::S12, Term::D32, Term::D52, Term::P12, Term::P32];

    pub fn j(self) -> Half {
        match self {
            Term::S12 | Term::P12 => Half(1),
            Term::D32 | Term::P32 => Half(3),
            Term::D52 => Half(5),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Term::S12 => "6S1/2",
            Term::D32 => "5D3/2",
            Term::D52 => "5D5/2",
            Term::P12 => "6P1/2",
            Term::P32 => "6P3/2",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Term {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Term::ALL
            .into_iter()
            .find(|t| t.label() == s || t.label()[1..] == *s)
            .ok_or_else(|| Error::Usage(format!("unknown term `{s}`")))
    }
}

/// An internal sublevel of one ion: fine-structure term, optional hyperfine F, projection m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level {
    pub term: Term,
    pub f: Option<Half>,
    pub m: Half,
}

impl Level {
    pub const fn new(term: Term, m: Half) -> Self {
        Level { term, f: None, m }
    }

    pub const fn hyperfine(term: Term, f: Half, m: Half) -> Self {
        Level { term, f: Some(f), m }
    }

    /// |0⟩ = 6S₁/₂ m=−1/2, |1⟩ = 6S₁/₂ m=+1/2.
    pub fn qubit(bit: u8) -> Self {
        if bit == 0 {
            Level::S_DOWN
        } else {
            Level::S_UP
        }
    }

    pub const S_DOWN: Level = Level::new(Term::S12, Half(-1));
    pub const S_UP: Level = Level::new(Term::S12, Half(1));

    pub fn is_ground_qubit(&self) -> bool {
        self.term == Term::S12 && self.f.is_none() && self.m.twice().abs() == 1
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            Some(ff) => write!(f, "{} F={} m={}", self.term, ff, self.m),
            None => write!(f, "{} m={}", self.term, self.m),
        }
    }
}

/// Parses `"6S1/2 m=1/2"`, `"D5/2 m=-1/2"` or `"6S1/2 F=2 m=-2"`.
impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let term: Term = parts
            .next()
            .ok_or_else(|| Error::Usage("empty level label".into()))?
            .parse()?;
        let mut f = None;
        let mut m = None;
        for part in parts {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("malformed level label `{s}`")))?;
            let q = parse_half(val).ok_or_else(|| Error::Usage(format!("bad quantum number in `{s}`")))?;
            match key {
                "F" => f = Some(q),
                "m" => m = Some(q),
                _ => return Err(Error::Usage(format!("unknown quantum number `{key}` in `{s}`"))),
            }
        }
        let m = m.ok_or_else(|| Error::Usage(format!("level `{s}` lacks m")))?;
        Ok(Level { term, f, m })
    }
}

fn parse_half(s: &str) -> Option<Half> {
    let s = s.trim_start_matches('+');
    if let Some((num, den)) = s.split_once('/') {
        if den != "2" {
            return None;
        }
        num.parse::<i32>().ok().map(Half)
    } else {
        s.parse::<i32>().ok().map(Half::from_int)
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub ion1: Level,
    pub ion2: Level,
    pub fock: usize,
}

impl BasisLabel {
    pub fn new(ion1: Level, ion2: Level, fock: usize) -> Self {
        BasisLabel { ion1, ion2, fock }
    }

    /// Level of ion 1 or 2.
    pub fn ion(&self, index: IonIndex) -> Level {
        match index {
            IonIndex::One => self.ion1,
            IonIndex::Two => self.ion2,
        }
    }

    pub fn with_ion(mut self, index: IonIndex, level: Level) -> Self {
        match index {
            IonIndex::One => self.ion1 = level,
            IonIndex::Two => self.ion2 = level,
        }
        self
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}; {}; n={}⟩", self.ion1, self.ion2, self.fock)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IonIndex {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl IonIndex {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(IonIndex::One),
            2 => Ok(IonIndex::Two),
            _ => Err(Error::Usage(format!("ion index must be 1 or 2, got {n}"))),
        }
    }

    pub fn other(self) -> Self {
        match self {
            IonIndex::One => IonIndex::Two,
            IonIndex::Two => IonIndex::One,
        }
    }
}

/// Canonical ordered basis of the two-ion ⊗ Fock space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    levels1: Vec<Level>,
    levels2: Vec<Level>,
    n_max: usize,
}

/// Builds the canonical lexicographic basis; size is |L1|·|L2|·(n_max+1).
pub fn tensor_basis(levels1: &[Level], levels2: &[Level], n_max: usize) -> Result<Arc<Basis>> {
    if levels1.is_empty() || levels2.is_empty() {
        return Err(Error::Config("level sets must be non-empty".into()));
    }
    let canon = |ls: &[Level]| {
        let mut v = ls.to_vec();
        v.sort();
        v.dedup();
        v
    };
    Ok(Arc::new(Basis {
        levels1: canon(levels1),
        levels2: canon(levels2),
        n_max,
    }))
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.levels1.len() * self.levels2.len() * (self.n_max + 1)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn levels(&self, ion: IonIndex) -> &[Level] {
        match ion {
            IonIndex::One => &self.levels1,
            IonIndex::Two => &self.levels2,
        }
    }

    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        if label.fock > self.n_max {
            return None;
        }
        let i1 = self.levels1.binary_search(&label.ion1).ok()?;
        let i2 = self.levels2.binary_search(&label.ion2).ok()?;
        Some((i1 * self.levels2.len() + i2) * (self.n_max + 1) + label.fock)
    }

    pub fn label(&self, index: usize) -> BasisLabel {
        let nf = self.n_max + 1;
        let fock = index % nf;
        let rest = index / nf;
        let i2 = rest % self.levels2.len();
        let i1 = rest / self.levels2.len();
        BasisLabel::new(self.levels1[i1], self.levels2[i2], fock)
    }

    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.dim()).map(|i| self.label(i))
    }

    pub fn require_index(&self, label: &BasisLabel) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::Usage(format!("{label} is not in the basis")))
    }
}

/// Immutable complex state vector over a canonical basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<Basis>,
    amps: Array1<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(basis: Arc<Basis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::Usage(format!(
                "{} amplitudes for a basis of dimension {}",
                amps.len(),
                basis.dim()
            )));
        }
        Ok(StateVector {
            basis,
            amps: Array1::from(amps),
        })
    }

    pub fn basis_state(basis: Arc<Basis>, label: &BasisLabel) -> Result<Self> {
        let idx = basis.require_index(label)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        StateVector::from_amplitudes(basis, amps)
    }

    /// Normalized superposition Σ cᵢ|labelᵢ⟩.
    pub fn superposition(basis: Arc<Basis>, terms: &[(BasisLabel, Complex64)]) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for (label, c) in terms {
            amps[basis.require_index(label)?] += *c;
        }
        let s = StateVector::from_amplitudes(basis, amps)?;
        let n = s.norm();
        if n == 0.0 {
            return Err(Error::Usage("zero superposition".into()));
        }
        Ok(s.scaled(1.0 / n))
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.basis
            .index_of(label)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, k: f64) -> Self {
        StateVector {
            basis: self.basis.clone(),
            amps: self.amps.mapv(|a| a * k),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Simulation("cannot normalize a null state".into()));
        }
        Ok(self.scaled(1.0 / n))
    }

    /// Multiplies each amplitude by `f(label)`.
    pub fn map_labels(&self, mut f: impl FnMut(&BasisLabel) -> Complex64) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| a * f(&self.basis.label(i)))
            .collect::<Vec<_>>();
        StateVector {
            basis: self.basis.clone(),
            amps: Array1::from(amps),
        }
    }

    /// Total population of labels matching `pred`.
    pub fn population(&self, mut pred: impl FnMut(&BasisLabel) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(&self.basis.label(*i)))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// ⟨a|b⟩.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.basis != b.basis {
        return Err(Error::Usage("overlap of states over different bases".into()));
    }
    Ok(a.amps.iter().zip(b.amps.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    overlap(a, b).map(|c| c.norm_sqr())
}

/// Tolerance used when asserting unitarity of a constructed operator.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Operator {
    basis: Arc<Basis>,
    matrix: Array2<Complex64>,
    unitary: bool,
}

impl Operator {
    pub fn new(basis: Arc<Basis>, matrix: Array2<Complex64>) -> Result<Self> {
        let d = basis.dim();
        if matrix.dim() != (d, d) {
            return Err(Error::Usage(format!(
                "matrix of shape {:?} for a basis of dimension {d}",
                matrix.dim()
            )));
        }
        Ok(Operator {
            basis,
            matrix,
            unitary: false,
        })
    }

    /// Constructs an operator flagged unitary; fails unless ‖U†U − I‖_max < 1e-12.
    pub fn new_unitary(basis: Arc<Basis>, matrix: Array2<Complex64>) -> Result<Self> {
        let mut op = Operator::new(basis, matrix)?;
        let dev = op.unitarity_defect();
        if dev >= UNITARY_TOL {
            return Err(Error::Usage(format!(
                "matrix is not unitary: max |U†U − I| = {dev:e}"
            )));
        }
        op.unitary = true;
        Ok(op)
    }

    pub fn identity(basis: Arc<Basis>) -> Self {
        let d = basis.dim();
        Operator {
            basis,
            matrix: Array2::eye(d),
            unitary: true,
        }
    }

    /// Diagonal operator with entries `f(label)`; unitary if every |f| = 1.
    pub fn diagonal(basis: Arc<Basis>, f: impl Fn(&BasisLabel) -> Complex64) -> Self {
        let d = basis.dim();
        let mut m = Array2::zeros((d, d));
        let mut unitary = true;
        for i in 0..d {
            let v = f(&basis.label(i));
            unitary &= (v.norm() - 1.0).abs() < UNITARY_TOL;
            m[(i, i)] = v;
        }
        Operator {
            basis,
            matrix: m,
            unitary,
        }
    }

    /// Lifts a single-ion operator, given as matrix elements ⟨l′|A|l⟩, to the full space
    /// (identity on the other ion and the motional mode).
    pub fn single_ion(
        basis: Arc<Basis>,
        ion: IonIndex,
        elements: impl Fn(Level, Level) -> Complex64,
    ) -> Self {
        let d = basis.dim();
        let mut m = Array2::zeros((d, d));
        for col in 0..d {
            let from = basis.label(col);
            for &lvl in basis.levels(ion) {
                let v = elements(lvl, from.ion(ion));
                if v != Complex64::new(0.0, 0.0) {
                    let row = basis
                        .index_of(&from.with_ion(ion, lvl))
                        .expect("level drawn from the basis");
                    m[(row, col)] = v;
                }
            }
        }
        Operator {
            basis,
            matrix: m,
            unitary: false,
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// max |(U†U − I)ᵢⱼ|.
    pub fn unitarity_defect(&self) -> f64 {
        let uh = self.matrix.t().mapv(|z| z.conj());
        let prod = uh.dot(&self.matrix);
        prod.indexed_iter()
            .map(|((i, j), z)| {
                let target = if i == j { 1.0 } else { 0.0 };
                (z - Complex64::new(target, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// self · rhs; unitary if both factors are.
    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        if self.basis != rhs.basis {
            return Err(Error::Usage("composing operators over different bases".into()));
        }
        Ok(Operator {
            basis: self.basis.clone(),
            matrix: self.matrix.dot(&rhs.matrix),
            unitary: self.unitary && rhs.unitary,
        })
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            basis: self.basis.clone(),
            matrix: self.matrix.t().mapv(|z| z.conj()),
            unitary: self.unitary,
        }
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        if self.basis != rhs.basis {
            return Err(Error::Usage("adding operators over different bases".into()));
        }
        Ok(Operator {
            basis: self.basis.clone(),
            matrix: &self.matrix + &rhs.matrix,
            unitary: false,
        })
    }

    pub fn expectation(&self, s: &StateVector) -> Result<Complex64> {
        let applied = apply(self, s)?;
        overlap(s, &applied)
    }
}

/// op · s.
pub fn apply(op: &Operator, s: &StateVector) -> Result<StateVector> {
    if op.basis != s.basis {
        return Err(Error::Usage(format!(
            "operator of dimension {} applied to state of dimension {}",
            op.basis.dim(),
            s.basis.dim()
        )));
    }
    Ok(StateVector {
        basis: s.basis.clone(),
        amps: op.matrix.dot(&s.amps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn three_levels() -> Vec<Level> {
        vec![
            Level::S_DOWN,
            Level::S_UP,
            Level::new(Term::D52, Half(1)),
        ]
    }

    fn qubits() -> Arc<Basis> {
        tensor_basis(&[Level::qubit(0), Level::qubit(1)], &[Level::qubit(0), Level::qubit(1)], 0)
            .unwrap()
    }

    fn ket(basis: &Arc<Basis>, b1: u8, b2: u8) -> StateVector {
        StateVector::basis_state(
            basis.clone(),
            &BasisLabel::new(Level::qubit(b1), Level::qubit(b2), 0),
        )
        .unwrap()
    }

    #[test]
    fn basis_sizes() {
        let l = three_levels();
        assert_eq!(tensor_basis(&l, &l, 1).unwrap().dim(), 18);
        assert_eq!(tensor_basis(&l, &l, 2).unwrap().dim(), 27);
        assert_eq!(qubits().dim(), 4);
        assert!(matches!(tensor_basis(&[], &l, 1), Err(Error::Config(_))));
    }

    #[test]
    fn basis_is_canonical() {
        let mut l = three_levels();
        let a = tensor_basis(&l, &l, 2).unwrap();
        l.reverse();
        let b = tensor_basis(&l, &l, 2).unwrap();
        assert_eq!(a, b);
        let labels: Vec<_> = a.labels().collect();
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(labels, sorted);
    }

    #[test]
    fn label_index_round_trip() {
        let l = three_levels();
        let b = tensor_basis(&l, &l, 2).unwrap();
        for i in 0..b.dim() {
            assert_eq!(b.index_of(&b.label(i)), Some(i));
        }
    }

    #[test]
    fn identity_and_phase() {
        let b = qubits();
        let s = StateVector::superposition(
            b.clone(),
            &[
                (b.label(0), c(0.3, 0.1)),
                (b.label(1), c(-0.2, 0.7)),
                (b.label(3), c(0.5, 0.0)),
            ],
        )
        .unwrap();
        let out = apply(&Operator::identity(b.clone()), &s).unwrap();
        assert_eq!(out.amplitudes(), s.amplitudes());

        let target = b.label(1);
        let phase = Operator::diagonal(b.clone(), |l| {
            if *l == target {
                Complex64::from_polar(1.0, 0.7)
            } else {
                c(1.0, 0.0)
            }
        });
        assert!(phase.is_unitary());
        let out = apply(&phase, &s).unwrap();
        for i in 0..b.dim() {
            let expected = if i == 1 {
                s.amplitudes()[i] * Complex64::from_polar(1.0, 0.7)
            } else {
                s.amplitudes()[i]
            };
            assert_abs_diff_eq!((out.amplitudes()[i] - expected).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sigma_x_on_ion_one() {
        let b = qubits();
        let x = Operator::single_ion(b.clone(), IonIndex::One, |to, from| {
            if to != from {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let out = apply(&x, &ket(&b, 0, 0)).unwrap();
        assert_abs_diff_eq!(overlap(&ket(&b, 1, 0), &out).unwrap().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn overlaps() {
        let b = qubits();
        let s00 = ket(&b, 0, 0);
        let s11 = ket(&b, 1, 1);
        assert_abs_diff_eq!(overlap(&s00, &s00).unwrap().re, 1.0);
        assert_eq!(overlap(&s00, &s11).unwrap(), c(0.0, 0.0));
        let bell = StateVector::superposition(
            b.clone(),
            &[(b.label(0), c(1.0, 0.0)), (b.label(3), c(1.0, 0.0))],
        )
        .unwrap();
        assert_abs_diff_eq!(
            overlap(&s00, &bell).unwrap().re,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let b = qubits();
        let l = three_levels();
        let big = tensor_basis(&l, &l, 1).unwrap();
        let s = ket(&b, 0, 0);
        assert!(matches!(apply(&Operator::identity(big), &s), Err(Error::Usage(_))));
        assert!(Operator::new_unitary(b.clone(), Array2::zeros((4, 4))).is_err());
    }

    fn random_unitary(basis: &Arc<Basis>, angles: &[f64]) -> Operator {
        // product of two-level rotations on neighbouring indices
        let d = basis.dim();
        let mut u = Operator::identity(basis.clone());
        for (k, &a) in angles.iter().enumerate() {
            let i = k % (d - 1);
            let mut m: Array2<Complex64> = Array2::eye(d);
            let (s, co) = a.sin_cos();
            let ph = Complex64::from_polar(1.0, 1.3 * a);
            m[(i, i)] = c(co, 0.0);
            m[(i, i + 1)] = -ph.conj() * s;
            m[(i + 1, i)] = ph * s;
            m[(i + 1, i + 1)] = c(co, 0.0);
            let g = Operator::new_unitary(basis.clone(), m).unwrap();
            u = g.compose(&u).unwrap();
        }
        u
    }

    proptest! {
        #[test]
        fn unitary_sequences_preserve_norm(angles in prop::collection::vec(-3.2f64..3.2, 1..40)) {
            let l = three_levels();
            let b = tensor_basis(&l, &l, 1).unwrap();
            let mut s = StateVector::basis_state(b.clone(), &b.label(0)).unwrap();
            for chunk in angles.chunks(3) {
                s = apply(&random_unitary(&b, chunk), &s).unwrap();
            }
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn composition_matches_sequential_application(
            a in prop::collection::vec(-3.2f64..3.2, 1..8),
            bb in prop::collection::vec(-3.2f64..3.2, 1..8),
        ) {
            let basis = qubits();
            let ua = random_unitary(&basis, &a);
            let ub = random_unitary(&basis, &bb);
            let s = StateVector::superposition(
                basis.clone(),
                &[(basis.label(0), c(0.6, 0.0)), (basis.label(2), c(0.0, 0.8))],
            ).unwrap();
            let seq = apply(&ua, &apply(&ub, &s).unwrap()).unwrap();
            let once = apply(&ua.compose(&ub).unwrap(), &s).unwrap();
            for (x, y) in seq.amplitudes().iter().zip(once.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }
    }
}

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cabs, cone, cr, czero, i_pow, Real, C};

/// Coefficients with modulus below this are dropped by simplification.
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

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

    /// Index in `I, X, Y, Z` order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix<T: Real>(self) -> CMatrix<T> {
        let (o, z, i) = (cone::<T>(), czero::<T>(), crate::scalar::ci::<T>());
        let rows = match self {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[o, z], [z, -o]],
        };
        CMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()])
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis on `n` qubits, stored as X and Z
/// bit masks (`Y = iXZ`). Qubit 0 is the least significant bit of a
/// computational-basis index and the rightmost letter of the label.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self {
            n: n_qubits as u8,
            x: 0,
            z: 0,
        }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Self {
        assert!(n_qubits <= MAX_QUBITS);
        let mask = low_mask(n_qubits);
        assert!(x & !mask == 0 && z & !mask == 0, "mask exceeds register");
        Self {
            n: n_qubits as u8,
            x,
            z,
        }
    }

    /// Single letter on one qubit, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.set(qubit, p);
        s
    }

    /// Parses a label such as `"XIZ"`; the last character is qubit 0.
    pub fn parse(label: &str) -> Option<Self> {
        let n = label.chars().count();
        if n > MAX_QUBITS {
            return None;
        }
        let mut s = Self::identity(n);
        for (pos, ch) in label.chars().enumerate() {
            let p = match ch.to_ascii_uppercase() {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return None,
            };
            s.set(n - 1 - pos, p);
        }
        Some(s)
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (q, &p) in letters.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.n_qubits());
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.n_qubits(), "qubit {qubit} outside register");
        let (xb, zb) = p.bits();
        let bit = 1u64 << qubit;
        self.x = if xb { self.x | bit } else { self.x & !bit };
        self.z = if zb { self.z | bit } else { self.z & !bit };
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n_qubits()).map(|q| self.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `self · other = i^k · result`; returns `(k mod 4, result)`.
    #[inline]
    pub fn mul(&self, other: &Self) -> (u8, Self) {
        debug_assert_eq!(self.n, other.n);
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y3 = (x & z).count_ones();
        let k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones() + 4 * 64
            - y3;
        (
            (k % 4) as u8,
            Self {
                n: self.n,
                x,
                z,
            },
        )
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Action on a computational basis state: `P|b⟩ = phase · |b'⟩`.
    #[inline]
    pub fn apply_to_basis<T: Real>(&self, b: u64) -> (C<T>, u64) {
        let sign = if (self.z & b).count_ones() % 2 == 1 { 2 } else { 0 };
        (i_pow(self.y_count() as u8 % 4 + sign), b ^ self.x)
    }

    pub fn to_matrix<T: Real>(&self) -> CMatrix<T> {
        let dim = 1usize << self.n_qubits();
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim as u64 {
            let (ph, out) = self.apply_to_basis::<T>(b);
            m[(out as usize, b as usize)] = ph;
        }
        m
    }

    pub fn label(&self) -> String {
        (0..self.n_qubits()).rev().map(|q| self.get(q).symbol()).collect()
    }

    fn sort_key(&self, q: usize) -> usize {
        self.get(q).index()
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for q in (0..self.n_qubits()).rev() {
                match self.sort_key(q).cmp(&other.sort_key(q)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.label())
    }
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Weighted sum of Pauli strings on a fixed register, kept simplified:
/// no coefficient below [`PRUNE_TOLERANCE`], terms in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliOperator<T: Real> {
    n_qubits: usize,
    terms: BTreeMap<PauliString, C<T>>,
}

impl<T: Real> PauliOperator<T> {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::term(PauliString::identity(n_qubits), cone())
    }

    pub fn term(s: PauliString, coeff: C<T>) -> Self {
        let mut op = Self::zero(s.n_qubits());
        op.add_term(s, coeff);
        op.prune();
        op
    }

    /// From `(label, coefficient)` pairs; panics on a bad label.
    pub fn from_labels(n_qubits: usize, terms: &[(&str, C<T>)]) -> Self {
        let mut op = Self::zero(n_qubits);
        for (label, c) in terms {
            let s = PauliString::parse(label).expect("valid Pauli label");
            assert_eq!(s.n_qubits(), n_qubits, "label length");
            op.add_term(s, *c);
        }
        op.prune();
        op
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &C<T>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &PauliString) -> C<T> {
        self.terms.get(s).copied().unwrap_or_else(czero)
    }

    fn add_term(&mut self, s: PauliString, coeff: C<T>) {
        let e = self.terms.entry(s).or_insert_with(czero);
        *e += coeff;
    }

    fn prune(&mut self) {
        let tol = T::lit(PRUNE_TOLERANCE);
        self.terms.retain(|_, c| cabs(*c) >= tol);
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, *c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-cone::<T>()))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for (k, c) in &self.terms {
            out.terms.insert(*k, *c * s);
        }
        out.prune();
        out
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }

    /// Distributive product using the single-qubit multiplication table.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n_qubits);
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                let (k, s) = sa.mul(sb);
                out.add_term(s, *ca * *cb * i_pow::<T>(k));
            }
        }
        out.prune();
        Ok(out)
    }

    /// `[A, B] = AB − BA`. Only anticommuting string pairs contribute.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let two = cr(T::lit(2.0));
        let mut out = Self::zero(self.n_qubits);
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                if sa.commutes_with(sb) {
                    continue;
                }
                let (k, s) = sa.mul(sb);
                out.add_term(s, *ca * *cb * i_pow::<T>(k) * two);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `[A, B, C] = ([[A, B], C] + [A, [B, C]]) / 2`.
    pub fn double_commutator(&self, b: &Self, c: &Self) -> Result<Self> {
        let left = self.commutator(b)?.commutator(c)?;
        let right = self.commutator(&b.commutator(c)?)?;
        Ok(left.add(&right)?.scale_real(T::lit(0.5)))
    }

    /// Largest coefficient of the anti-Hermitian part.
    pub fn hermiticity_error(&self) -> T {
        self.terms
            .values()
            .map(|c| c.im.abs())
            .fold(T::zero(), T::max)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Sum of the moduli of all coefficients.
    pub fn one_norm(&self) -> T {
        self.terms.values().map(|c| cabs(*c)).sum()
    }

    /// Distinct strings carried by the operator.
    pub fn strings(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.keys()
    }

    pub fn to_matrix(&self) -> CMatrix<T> {
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (s, c) in &self.terms {
            for b in 0..dim as u64 {
                let (ph, out) = s.apply_to_basis::<T>(b);
                m[(out as usize, b as usize)] += ph * *c;
            }
        }
        m
    }

    /// Converts the coefficients to another precision.
    pub fn cast<U: Real>(&self) -> PauliOperator<U> {
        PauliOperator {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, C::new(U::lit(c.re.to_f64_lossy()), U::lit(c.im.to_f64_lossy()))))
                .collect(),
        }
    }
}

impl<T: Real> fmt::Display for PauliOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({} {:+}i) {}", c.re, c.im, s)?;
        }
        Ok(())
    }
}

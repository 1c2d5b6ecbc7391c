//! Single-qubit informationally complete measurements: frame definition,
//! observable decomposition, shot sampling and estimation.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix};
use crate::operators::{Pauli, PauliOperator, PauliString};
use crate::scalar::{c, cone, czero, Real, C};
use crate::simulator::StateVector;

/// Shots drawn from one RNG stream.
pub const SHOT_BLOCK: usize = 1024;
/// Largest register for which all `4^N` string estimates are formed at
/// once.
pub const DENSE_TRANSFORM_MAX_QUBITS: usize = 10;

/// Four effects on every qubit of the register.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmSpec<T: Real> {
    effects: Vec<[CMatrix<T>; 4]>,
}

impl<T: Real> PovmSpec<T> {
    /// Checks that each qubit's effects are Hermitian, positive
    /// semidefinite and sum to the identity.
    pub fn new(effects: Vec<[CMatrix<T>; 4]>) -> Result<Self> {
        let tol = T::lit(1e-12);
        for (q, set) in effects.iter().enumerate() {
            let mut sum = CMatrix::zeros(2, 2);
            for e in set {
                if e.rows() != 2 || !e.is_square() {
                    return Err(Error::invalid("povm", format!("qubit {q}: effects must be 2x2")));
                }
                if e.hermiticity_error() > tol {
                    return Err(Error::invalid("povm", format!("qubit {q}: effect not Hermitian")));
                }
                if eigh(e).values[0] < -tol {
                    return Err(Error::invalid("povm", format!("qubit {q}: effect not positive")));
                }
                sum = &sum + e;
            }
            if sum.max_abs_diff(&CMatrix::identity(2)) > tol {
                return Err(Error::invalid("povm", format!("qubit {q}: effects do not sum to I")));
            }
        }
        Ok(Self { effects })
    }

    pub fn n_qubits(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self, qubit: usize) -> &[CMatrix<T>; 4] {
        &self.effects[qubit]
    }

    /// `⊗_q Π_{m_q}` as a dense matrix (qubit 0 least significant).
    pub fn joint_effect(&self, outcome: &[u8]) -> CMatrix<T> {
        let mut m = CMatrix::identity(1);
        for (q, &k) in outcome.iter().enumerate() {
            m = self.effects[q][k as usize].kron(&m);
        }
        m
    }
}

/// Tetrahedral SIC-POVM `Π_i = ½|π_i⟩⟨π_i|` with `|π_0⟩ = |0⟩` and
/// `|π_k⟩ = (|0⟩ + √2 e^{i2π(k−1)/3}|1⟩)/√3`, on every qubit.
pub fn canonical_sic<T: Real>(n_qubits: usize) -> PovmSpec<T> {
    let half = T::lit(0.5);
    let third = T::one() / T::lit(3.0);
    let mut set: Vec<CMatrix<T>> = Vec::with_capacity(4);
    for k in 0..4 {
        let v: [C<T>; 2] = if k == 0 {
            [cone(), czero()]
        } else {
            let angle = T::TAU() * T::from_count(k - 1) * third;
            let s = (T::lit(2.0) * third).sqrt();
            [c(third.sqrt(), T::zero()), c(s * angle.cos(), s * angle.sin())]
        };
        set.push(CMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj() * half));
    }
    let set: [CMatrix<T>; 4] = set.try_into().expect("four effects");
    PovmSpec {
        effects: vec![set; n_qubits],
    }
}

/// Per-qubit dual coefficients: `P = Σ_i coeff[P][i] Π_i` for every letter.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameCoefficients<T: Real> {
    per_qubit: Vec<[[T; 4]; 4]>,
}

impl<T: Real> FrameCoefficients<T> {
    pub fn new(spec: &PovmSpec<T>) -> Result<Self> {
        let per_qubit = (0..spec.n_qubits())
            .map(|q| letter_coefficients(spec.effects(q)))
            .collect::<Result<_>>()?;
        Ok(Self { per_qubit })
    }

    pub fn n_qubits(&self) -> usize {
        self.per_qubit.len()
    }

    /// `c^P_m` on `qubit`.
    #[inline]
    pub fn get(&self, qubit: usize, letter: Pauli, outcome: u8) -> T {
        self.per_qubit[qubit][letter.index()][outcome as usize]
    }

    /// Weight of a single Pauli string: `∏_q c^{P_q}_{m_q}`.
    pub fn string_weight(&self, s: &PauliString, outcome: &[u8]) -> T {
        let mut w = T::one();
        for (q, &m) in outcome.iter().enumerate() {
            let p = s.get(q);
            if p != Pauli::I {
                w *= self.per_qubit[q][p.index()][m as usize];
            }
        }
        w
    }
}

/// Solves `Tr(σ_a P) = Σ_i c_i Tr(σ_a Π_i)` for each letter `P`.
fn letter_coefficients<T: Real>(effects: &[CMatrix<T>; 4]) -> Result<[[T; 4]; 4]> {
    let paulis: Vec<CMatrix<T>> = Pauli::ALL.iter().map(|p| p.matrix()).collect();
    let mut frame = [[T::zero(); 4]; 4];
    for (a, s) in paulis.iter().enumerate() {
        for (i, e) in effects.iter().enumerate() {
            frame[a][i] = (s * e).trace().re;
        }
    }
    let mut out = [[T::zero(); 4]; 4];
    for (p, row) in out.iter_mut().enumerate() {
        let mut rhs = [T::zero(); 4];
        rhs[p] = T::lit(2.0);
        *row = solve4(frame, rhs).ok_or(Error::NotInformationallyComplete)?;
    }
    Ok(out)
}

/// Gaussian elimination with partial pivoting.
fn solve4<T: Real>(mut a: [[T; 4]; 4], mut b: [T; 4]) -> Option<[T; 4]> {
    let scale = a
        .iter()
        .flatten()
        .fold(T::zero(), |m, v| m.max(v.abs()));
    let tol = T::lit(1e-12) * scale.max(T::min_positive_value());
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .expect("finite frame")
        })?;
        if a[piv][col].abs() <= tol {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..4 {
            let f = a[r][col] / a[col][col];
            for k in col..4 {
                let v = a[col][k];
                a[r][k] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    let mut x = [T::zero(); 4];
    for r in (0..4).rev() {
        let mut acc = b[r];
        for k in (r + 1)..4 {
            acc -= a[r][k] * x[k];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

/// `m ↦ ω_m` for one observable: `ω_m = Σ_terms coeff · ∏_q c^{P_q}_{m_q}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction<T: Real> {
    frame: FrameCoefficients<T>,
    terms: Vec<(PauliString, T)>,
}

impl<T: Real> WeightFunction<T> {
    pub fn n_qubits(&self) -> usize {
        self.frame.n_qubits()
    }

    pub fn weight(&self, outcome: &[u8]) -> T {
        self.terms
            .iter()
            .map(|(s, coeff)| *coeff * self.frame.string_weight(s, outcome))
            .sum()
    }
}

pub fn decompose_observable<T: Real>(
    op: &PauliOperator<T>,
    spec: &PovmSpec<T>,
) -> Result<WeightFunction<T>> {
    if op.n_qubits() != spec.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: op.n_qubits(),
            right: spec.n_qubits(),
        });
    }
    let herm = op.hermiticity_error();
    if herm > T::lit(1e-10) {
        return Err(Error::NonHermitianInput(herm.to_f64_lossy()));
    }
    Ok(WeightFunction {
        frame: FrameCoefficients::new(spec)?,
        terms: op.terms().map(|(s, c)| (*s, c.re)).collect(),
    })
}

/// Sampled outcome strings, one row of `n_qubits` indices per shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeRecord {
    n_qubits: usize,
    seed: u64,
    outcomes: Vec<u8>,
}

impl OutcomeRecord {
    pub fn new(n_qubits: usize, seed: u64, outcomes: Vec<u8>) -> Result<Self> {
        if n_qubits == 0 || outcomes.len() % n_qubits != 0 {
            return Err(Error::SizeMismatch {
                expected: n_qubits,
                actual: outcomes.len(),
            });
        }
        if let Some(bad) = outcomes.iter().find(|&&m| m > 3) {
            return Err(Error::invalid("outcome", format!("index {bad} is not in 0..4")));
        }
        Ok(Self {
            n_qubits,
            seed,
            outcomes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn shots(&self) -> usize {
        self.outcomes.len() / self.n_qubits
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn shot(&self, s: usize) -> &[u8] {
        &self.outcomes[s * self.n_qubits..(s + 1) * self.n_qubits]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.outcomes.chunks_exact(self.n_qubits)
    }

    /// Occurrences of each distinct outcome, keyed by `Σ_q m_q 4^q`.
    pub fn histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for shot in self.iter() {
            *h.entry(outcome_index(shot)).or_insert(0) += 1;
        }
        h
    }

    /// CSV with a `# seed=` comment line, a `q0,q1,...` header and one row
    /// per shot.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        writeln!(file, "# seed={}", self.seed).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        let header: Vec<String> = (0..self.n_qubits).map(|q| format!("q{q}")).collect();
        w.write_record(&header)
            .map_err(|e| Error::Serialization(e.to_string()))?;
        for shot in self.iter() {
            w.write_record(shot.iter().map(|m| m.to_string()))
                .map_err(|e| Error::Serialization(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = BufReader::new(file);
        let mut first = String::new();
        reader
            .read_line(&mut first)
            .map_err(|e| Error::io(path, e))?;
        let seed = first
            .trim()
            .strip_prefix("# seed=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedLine {
                line: 1,
                reason: "expected '# seed=<integer>'".into(),
            })?;
        let mut r = csv::Reader::from_reader(reader);
        let n_qubits = r
            .headers()
            .map_err(|e| Error::Serialization(e.to_string()))?
            .len();
        let mut outcomes = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::Serialization(e.to_string()))?;
            if rec.len() != n_qubits {
                return Err(Error::MalformedLine {
                    line: i + 3,
                    reason: format!("{} columns, expected {n_qubits}", rec.len()),
                });
            }
            for field in rec.iter() {
                outcomes.push(field.trim().parse::<u8>().map_err(|_| Error::MalformedLine {
                    line: i + 3,
                    reason: format!("bad outcome '{field}'"),
                })?);
            }
        }
        Self::new(n_qubits, seed, outcomes)
    }
}

#[inline]
fn outcome_index(shot: &[u8]) -> u64 {
    shot.iter()
        .rev()
        .fold(0u64, |acc, &m| acc * 4 + m as u64)
}

/// Per-qubit measurement data used while sampling.
enum Kraus<T: Real> {
    /// `√Π_i = √λ_i |e_i⟩⟨e_i|`: the measured qubit factors out.
    RankOne(Vec<[(T, [C<T>; 2]); 4]>),
    /// General `√Π_i` acting on the full register.
    General(Vec<[CMatrix<T>; 4]>),
}

fn kraus_operators<T: Real>(spec: &PovmSpec<T>) -> Kraus<T> {
    let tol = T::lit(1e-12);
    let mut rank_one = Vec::with_capacity(spec.n_qubits());
    let mut general = Vec::with_capacity(spec.n_qubits());
    let mut all_rank_one = true;
    for q in 0..spec.n_qubits() {
        let mut r1 = [(T::zero(), [czero(), czero()]); 4];
        let mut g: Vec<CMatrix<T>> = Vec::with_capacity(4);
        for (i, e) in spec.effects(q).iter().enumerate() {
            let eg = eigh(e);
            let (lo, hi) = (eg.values[0].max(T::zero()), eg.values[1].max(T::zero()));
            all_rank_one &= lo <= tol * hi.max(T::one());
            r1[i] = (hi, [eg.vectors[(0, 1)], eg.vectors[(1, 1)]]);
            let vecs = &eg.vectors;
            let sq = [lo.sqrt(), hi.sqrt()];
            g.push(CMatrix::from_fn(2, 2, |a, b| {
                (0..2)
                    .map(|k| vecs[(a, k)] * vecs[(b, k)].conj() * sq[k])
                    .sum()
            }));
        }
        rank_one.push(r1);
        general.push(g.try_into().expect("four effects"));
    }
    if all_rank_one {
        Kraus::RankOne(rank_one)
    } else {
        Kraus::General(general)
    }
}

fn draw(rng: &mut ChaCha8Rng, probs: &[f64; 4]) -> u8 {
    let total: f64 = probs.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u8;
        }
    }
    // rounding at the upper edge: last outcome with nonzero mass
    (0..4).rev().find(|&i| probs[i] > 0.0).unwrap_or(3) as u8
}

fn sample_rank_one<T: Real>(
    psi: &[C<T>],
    kraus: &[[(T, [C<T>; 2]); 4]],
    rng: &mut ChaCha8Rng,
    out: &mut Vec<u8>,
) {
    let mut state = psi.to_vec();
    let mut next = Vec::with_capacity(state.len() / 2);
    for effects in kraus {
        // reduced state of the lowest remaining qubit
        let (mut r00, mut r11, mut r01) = (T::zero(), T::zero(), czero::<T>());
        for pair in state.chunks_exact(2) {
            r00 += pair[0].norm_sqr();
            r11 += pair[1].norm_sqr();
            r01 += pair[0] * pair[1].conj();
        }
        let mut probs = [0.0; 4];
        for (p, (lam, e)) in probs.iter_mut().zip(effects) {
            // λ ⟨e|ρ|e⟩
            let v = e[0].norm_sqr() * r00
                + e[1].norm_sqr() * r11
                + (T::lit(2.0)) * (e[0].conj() * r01 * e[1]).re;
            *p = (*lam * v).to_f64_lossy().max(0.0);
        }
        let m = draw(rng, &probs);
        out.push(m);
        let e = effects[m as usize].1;
        next.clear();
        next.extend(
            state
                .chunks_exact(2)
                .map(|pair| e[0].conj() * pair[0] + e[1].conj() * pair[1]),
        );
        let n2: T = next.iter().map(|a| a.norm_sqr()).sum();
        let inv = T::one() / n2.sqrt();
        std::mem::swap(&mut state, &mut next);
        if n2 > T::zero() {
            state.iter_mut().for_each(|a| *a = *a * inv);
        }
    }
}

fn apply_single<T: Real>(state: &[C<T>], q: usize, k: &CMatrix<T>, out: &mut Vec<C<T>>) {
    out.clear();
    out.resize(state.len(), czero());
    let bit = 1usize << q;
    for (b, o) in out.iter_mut().enumerate() {
        let a = (b >> q) & 1;
        let b0 = b & !bit;
        *o = k[(a, 0)] * state[b0] + k[(a, 1)] * state[b0 | bit];
    }
}

fn sample_general<T: Real>(
    psi: &[C<T>],
    kraus: &[[CMatrix<T>; 4]],
    rng: &mut ChaCha8Rng,
    out: &mut Vec<u8>,
) {
    let mut state = psi.to_vec();
    let mut branches: [Vec<C<T>>; 4] = Default::default();
    for (q, ks) in kraus.iter().enumerate() {
        let mut probs = [0.0; 4];
        for i in 0..4 {
            apply_single(&state, q, &ks[i], &mut branches[i]);
            probs[i] = branches[i]
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<T>()
                .to_f64_lossy();
        }
        let m = draw(rng, &probs) as usize;
        out.push(m as u8);
        let inv = T::lit(1.0 / probs[m].sqrt());
        state = branches[m].iter().map(|a| *a * inv).collect();
    }
}

/// Draws `shots` outcome strings by measuring qubit 0, 1, … in turn and
/// conditioning on each result. Shots are split in blocks of
/// [`SHOT_BLOCK`], block `k` using ChaCha8 stream `k` of `seed`, so the
/// record is identical for any thread count.
pub fn sample_outcomes<T: Real>(
    psi: &StateVector<T>,
    spec: &PovmSpec<T>,
    shots: usize,
    seed: u64,
) -> Result<OutcomeRecord> {
    if psi.n_qubits() != spec.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: spec.n_qubits(),
            right: psi.n_qubits(),
        });
    }
    if shots == 0 {
        return Err(Error::invalid("shots", "at least one shot is required"));
    }
    let n = psi.n_qubits();
    let kraus = kraus_operators(spec);
    let blocks = shots.div_ceil(SHOT_BLOCK);
    let chunks: Vec<Vec<u8>> = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(blk as u64);
            let count = SHOT_BLOCK.min(shots - blk * SHOT_BLOCK);
            let mut out = Vec::with_capacity(count * n);
            for _ in 0..count {
                match &kraus {
                    Kraus::RankOne(k) => sample_rank_one(psi.amplitudes(), k, &mut rng, &mut out),
                    Kraus::General(k) => sample_general(psi.amplitudes(), k, &mut rng, &mut out),
                }
            }
            out
        })
        .collect();
    OutcomeRecord::new(n, seed, chunks.concat())
}

/// Exact `p_m = ⟨psi|⊗_q Π_{m_q}|psi⟩` for all `4^N` outcomes, indexed by
/// `Σ_q m_q 4^q`.
pub fn outcome_probabilities<T: Real>(psi: &StateVector<T>, spec: &PovmSpec<T>) -> Result<Vec<T>> {
    let n = psi.n_qubits();
    if n != spec.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: spec.n_qubits(),
            right: n,
        });
    }
    let dim = 1usize << n;
    let mut out = vec![T::zero(); 1usize << (2 * n)];
    let mut scratch = Vec::new();
    let mut outcome = vec![0u8; n];
    for (idx, p) in out.iter_mut().enumerate() {
        let mut rest = idx;
        for m in outcome.iter_mut() {
            *m = (rest % 4) as u8;
            rest /= 4;
        }
        let mut v = psi.amplitudes().to_vec();
        for (q, &m) in outcome.iter().enumerate() {
            apply_single(&v, q, &spec.effects(q)[m as usize], &mut scratch);
            std::mem::swap(&mut v, &mut scratch);
        }
        let val: C<T> = (0..dim).map(|b| psi.amplitudes()[b].conj() * v[b]).sum();
        *p = val.re;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EstimatorResult<T: Real> {
    pub mean: T,
    pub standard_error: T,
    pub shots_used: usize,
}

fn finish<T: Real>(sum: T, sum_sq: T, shots: usize) -> EstimatorResult<T> {
    let s = T::from_count(shots);
    let mean = sum / s;
    let standard_error = if shots > 1 {
        let var = ((sum_sq / s - mean * mean) * s / (s - T::one())).max(T::zero());
        (var / s).sqrt()
    } else {
        T::zero()
    };
    EstimatorResult {
        mean,
        standard_error,
        shots_used: shots,
    }
}

/// Sample mean of `ω_{m_s}` with standard error `std / √S`.
pub fn estimate<T: Real>(weights: &WeightFunction<T>, rec: &OutcomeRecord) -> Result<EstimatorResult<T>> {
    if rec.is_empty() {
        return Err(Error::EmptyRecord);
    }
    if rec.n_qubits() != weights.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: weights.n_qubits(),
            right: rec.n_qubits(),
        });
    }
    let (mut sum, mut sum_sq) = (T::zero(), T::zero());
    let mut shot = vec![0u8; rec.n_qubits()];
    for (key, count) in rec.histogram() {
        let mut rest = key;
        for m in shot.iter_mut() {
            *m = (rest % 4) as u8;
            rest /= 4;
        }
        let w = weights.weight(&shot);
        let k = T::lit(count as f64);
        sum += w * k;
        sum_sq += w * w * k;
    }
    Ok(finish(sum, sum_sq, rec.shots()))
}

/// Estimates of many Pauli strings from one shared record.
///
/// Up to [`DENSE_TRANSFORM_MAX_QUBITS`] qubits the outcome histogram is
/// pushed through the per-qubit coefficient matrices, which yields the
/// estimates of all `4^N` strings at once; larger registers evaluate each
/// string over the distinct outcomes.
pub fn estimate_pauli_strings<T: Real>(
    strings: &[PauliString],
    spec: &PovmSpec<T>,
    rec: &OutcomeRecord,
) -> Result<Vec<EstimatorResult<T>>> {
    if rec.is_empty() {
        return Err(Error::EmptyRecord);
    }
    let n = rec.n_qubits();
    if n != spec.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: spec.n_qubits(),
            right: n,
        });
    }
    let frame = FrameCoefficients::new(spec)?;
    let shots = rec.shots();
    let hist = rec.histogram();
    if n <= DENSE_TRANSFORM_MAX_QUBITS {
        let mut dense = vec![T::zero(); 1usize << (2 * n)];
        for (&k, &count) in &hist {
            dense[k as usize] = T::lit(count as f64);
        }
        let first = tensor_transform(&frame, dense.clone(), false);
        let second = tensor_transform(&frame, dense, true);
        return Ok(strings
            .iter()
            .map(|s| {
                let idx = string_index(s);
                finish(first[idx], second[idx], shots)
            })
            .collect());
    }
    let distinct: Vec<(Vec<u8>, T)> = hist
        .iter()
        .map(|(&k, &count)| {
            let mut rest = k;
            let shot = (0..n)
                .map(|_| {
                    let m = (rest % 4) as u8;
                    rest /= 4;
                    m
                })
                .collect();
            (shot, T::lit(count as f64))
        })
        .collect();
    Ok(strings
        .par_iter()
        .map(|s| {
            let (mut sum, mut sum_sq) = (T::zero(), T::zero());
            for (shot, k) in &distinct {
                let w = frame.string_weight(s, shot);
                sum += w * *k;
                sum_sq += w * w * *k;
            }
            finish(sum, sum_sq, shots)
        })
        .collect())
}

/// `Σ_q letter_q 4^q` with I, X, Y, Z = 0, 1, 2, 3.
fn string_index(s: &PauliString) -> usize {
    (0..s.n_qubits())
        .rev()
        .fold(0usize, |acc, q| acc * 4 + s.get(q).index())
}

/// Applies `⊗_q C_q` (or its elementwise square) to `data`, indexed by
/// outcome digits on input and letter digits on output.
fn tensor_transform<T: Real>(frame: &FrameCoefficients<T>, mut data: Vec<T>, squared: bool) -> Vec<T> {
    let n = frame.n_qubits();
    let mut buf = [T::zero(); 4];
    for q in 0..n {
        let mut coeff = frame.per_qubit[q];
        if squared {
            coeff.iter_mut().flatten().for_each(|c| *c = *c * *c);
        }
        let stride = 1usize << (2 * q);
        let span = stride * 4;
        for base in (0..data.len()).step_by(span) {
            for off in 0..stride {
                let idx = |d: usize| base + d * stride + off;
                for (p, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..4).map(|m| coeff[p][m] * data[idx(m)]).sum();
                }
                for (p, &v) in buf.iter().enumerate() {
                    data[idx(p)] = v;
                }
            }
        }
    }
    data
}

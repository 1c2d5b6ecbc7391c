//! FCIDUMP integral files.
//!
//! Indices are 1-based on disk and 0-based in memory. Two-electron
//! integrals stay in chemists' notation `(pq|rs)`; conversion to the
//! physicists' ordering happens when the Hamiltonian is built.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Tolerance for deciding that two listings of the same integral disagree.
pub const DUPLICATE_TOLERANCE: f64 = 1e-10;

/// One- and two-electron integrals of an active space.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    n_spatial_orbitals: usize,
    n_electrons: usize,
    spin_2s: i64,
    core_energy: f64,
    one_body: BTreeMap<(usize, usize), f64>,
    two_body: BTreeMap<[usize; 4], f64>,
}

impl MolecularIntegrals {
    /// Builds a validated, symmetry-completed integral set from 0-based
    /// entries. Entries related by permutation symmetry must agree.
    pub fn new(
        n_spatial_orbitals: usize,
        n_electrons: usize,
        spin_2s: i64,
        core_energy: f64,
        one_body: impl IntoIterator<Item = ((usize, usize), f64)>,
        two_body: impl IntoIterator<Item = ([usize; 4], f64)>,
    ) -> Result<Self> {
        if n_electrons > 2 * n_spatial_orbitals {
            return Err(Error::IndexOutOfRange {
                index: n_electrons,
                limit: 2 * n_spatial_orbitals,
                context: "electron count".into(),
            });
        }
        let mut ints = Self {
            n_spatial_orbitals,
            n_electrons,
            spin_2s,
            core_energy,
            one_body: BTreeMap::new(),
            two_body: BTreeMap::new(),
        };
        for ((p, q), v) in one_body {
            ints.check_index(&[p, q])?;
            ints.insert_one(p, q, v)?;
        }
        for (idx, v) in two_body {
            ints.check_index(&idx)?;
            ints.insert_two(idx, v)?;
        }
        Ok(ints)
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        for &i in idx {
            if i >= self.n_spatial_orbitals {
                return Err(Error::IndexOutOfRange {
                    index: i + 1,
                    limit: self.n_spatial_orbitals,
                    context: "orbital index".into(),
                });
            }
        }
        Ok(())
    }

    fn put<K: Ord + Copy>(
        map: &mut BTreeMap<K, f64>,
        key: K,
        indices: &[usize],
        value: f64,
    ) -> Result<()> {
        if let Some(&old) = map.get(&key) {
            if (old - value).abs() > DUPLICATE_TOLERANCE {
                return Err(Error::ConflictingDuplicate {
                    indices: indices.iter().map(|i| i + 1).collect(),
                    first: old,
                    second: value,
                });
            }
            return Ok(());
        }
        map.insert(key, value);
        Ok(())
    }

    fn insert_one(&mut self, p: usize, q: usize, v: f64) -> Result<()> {
        for (a, b) in [(p, q), (q, p)] {
            Self::put(&mut self.one_body, (a, b), &[a, b], v)?;
        }
        Ok(())
    }

    fn insert_two(&mut self, [p, q, r, s]: [usize; 4], v: f64) -> Result<()> {
        for key in eightfold(p, q, r, s) {
            Self::put(&mut self.two_body, key, &key, v)?;
        }
        Ok(())
    }

    pub fn n_spatial_orbitals(&self) -> usize {
        self.n_spatial_orbitals
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial_orbitals
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    /// `2S`, the `MS2` header field.
    pub fn spin_2s(&self) -> i64 {
        self.spin_2s
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    /// `h_pq` (0-based), zero when absent.
    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body.get(&(p, q)).copied().unwrap_or(0.0)
    }

    /// `(pq|rs)` in chemists' notation (0-based), zero when absent.
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body.get(&[p, q, r, s]).copied().unwrap_or(0.0)
    }

    pub fn one_body_entries(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.one_body
    }

    pub fn two_body_entries(&self) -> &BTreeMap<[usize; 4], f64> {
        &self.two_body
    }

    /// Re-applies permutation symmetry. A no-op on any value produced by
    /// this module.
    pub fn symmetry_completed(&self) -> Result<Self> {
        Self::new(
            self.n_spatial_orbitals,
            self.n_electrons,
            self.spin_2s,
            self.core_energy,
            self.one_body.clone(),
            self.two_body.clone(),
        )
    }

    /// Serializes one representative per symmetry class.
    pub fn to_fcidump_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            " &FCI NORB={},NELEC={},MS2={},",
            self.n_spatial_orbitals, self.n_electrons, self.spin_2s
        );
        let _ = writeln!(out, " &END");
        for (&[p, q, r, s], &v) in &self.two_body {
            if [p, q, r, s] == canonical_two(p, q, r, s) {
                let _ = writeln!(out, "{v:24.16e} {:4} {:4} {:4} {:4}", p + 1, q + 1, r + 1, s + 1);
            }
        }
        for (&(p, q), &v) in &self.one_body {
            if p >= q {
                let _ = writeln!(out, "{v:24.16e} {:4} {:4} {:4} {:4}", p + 1, q + 1, 0, 0);
            }
        }
        let _ = writeln!(out, "{:24.16e} {:4} {:4} {:4} {:4}", self.core_energy, 0, 0, 0, 0);
        out
    }
}

fn eightfold(p: usize, q: usize, r: usize, s: usize) -> [[usize; 4]; 8] {
    [
        [p, q, r, s],
        [q, p, r, s],
        [p, q, s, r],
        [q, p, s, r],
        [r, s, p, q],
        [s, r, p, q],
        [r, s, q, p],
        [s, r, q, p],
    ]
}

fn canonical_two(p: usize, q: usize, r: usize, s: usize) -> [usize; 4] {
    eightfold(p, q, r, s).into_iter().max().expect("nonempty")
}

/// Parses FCIDUMP text.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut lines = text.lines().enumerate();
    let mut header = String::new();
    let mut saw_start = false;
    let mut body_start = None;
    for (no, line) in lines.by_ref() {
        let trimmed = line.trim();
        let upper = trimmed.to_ascii_uppercase();
        if !saw_start {
            if upper.is_empty() {
                continue;
            }
            if !upper.starts_with("&FCI") {
                return Err(Error::MissingHeaderField("NORB"));
            }
            saw_start = true;
            header.push_str(&upper["&FCI".len()..]);
            header.push(',');
        } else {
            header.push_str(&upper);
            header.push(',');
        }
        if upper.contains("&END") || upper == "/" || upper.ends_with('/') {
            body_start = Some(no + 1);
            break;
        }
    }
    if body_start.is_none() {
        return Err(Error::MissingHeaderField("NORB"));
    }
    let header = header.replace("&END", "").replace('/', "");
    let fields = header_fields(&header);
    let norb = header_count(&fields, "NORB")?;
    let nelec = header_count(&fields, "NELEC")?;
    let ms2 = match fields.get("MS2") {
        Some(v) => v.parse::<i64>().map_err(|_| Error::MalformedLine {
            line: 1,
            reason: format!("MS2 value `{v}`"),
        })?,
        None => 0,
    };

    let mut core = None::<f64>;
    let mut one = Vec::new();
    let mut two = Vec::new();
    for (no, line) in lines {
        let line_no = no + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!("expected `value i j k l`, found {} tokens", toks.len()),
            });
        }
        let value = parse_value(toks[0]).ok_or_else(|| Error::MalformedLine {
            line: line_no,
            reason: format!("non-numeric value `{}`", toks[0]),
        })?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            *slot = tok.parse().map_err(|_| Error::MalformedLine {
                line: line_no,
                reason: format!("non-integer index `{tok}`"),
            })?;
            if *slot > norb {
                return Err(Error::IndexOutOfRange {
                    index: *slot,
                    limit: norb,
                    context: format!("line {line_no}"),
                });
            }
        }
        match idx {
            [0, 0, 0, 0] => {
                if let Some(old) = core {
                    if (old - value).abs() > DUPLICATE_TOLERANCE {
                        return Err(Error::ConflictingDuplicate {
                            indices: vec![0, 0, 0, 0],
                            first: old,
                            second: value,
                        });
                    }
                }
                core = Some(value);
            }
            [i, j, 0, 0] if i > 0 && j > 0 => one.push(((i - 1, j - 1), value)),
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                two.push(([i - 1, j - 1, k - 1, l - 1], value))
            }
            // orbital-energy lines `e i 0 0 0` carry no Hamiltonian information
            [_, 0, 0, 0] => {}
            _ => {
                return Err(Error::MalformedLine {
                    line: line_no,
                    reason: format!("unsupported index pattern {idx:?}"),
                })
            }
        }
    }
    MolecularIntegrals::new(norb, nelec, ms2, core.unwrap_or(0.0), one, two)
}

pub fn read_fcidump(path: &Path) -> Result<MolecularIntegrals> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fcidump(&text)
}

fn parse_value(tok: &str) -> Option<f64> {
    tok.replace(['D', 'd'], "E").parse().ok()
}

fn header_fields(header: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for piece in header.split(',') {
        if let Some((k, v)) = piece.split_once('=') {
            out.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    out
}

fn header_count(fields: &BTreeMap<String, String>, key: &'static str) -> Result<usize> {
    let raw = fields.get(key).ok_or(Error::MissingHeaderField(key))?;
    raw.parse().map_err(|_| Error::MalformedLine {
        line: 1,
        reason: format!("{key} value `{raw}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = " &FCI NORB=1,NELEC=2,\n &END\n -1.25 1 1 0 0\n 0.5 0 0 0 0\n";

    #[test]
    fn minimal_file() {
        let ints = parse_fcidump(MINIMAL).unwrap();
        assert_eq!(ints.n_spatial_orbitals(), 1);
        assert_eq!(ints.n_electrons(), 2);
        assert_eq!(ints.spin_2s(), 0);
        assert_eq!(ints.one_body(0, 0), -1.25);
        assert_eq!(ints.core_energy(), 0.5);
    }

    #[test]
    fn single_two_electron_entry() {
        let text = format!("{MINIMAL} 0.675 1 1 1 1\n");
        let ints = parse_fcidump(&text).unwrap();
        assert_eq!(ints.two_body(0, 0, 0, 0), 0.675);
    }

    #[test]
    fn header_variants() {
        let text = "&FCI NORB=2,\n NELEC=2, MS2=0,\n ORBSYM=1,1,\n ISYM=1\n/\n 0.3 2 1 0 0\n";
        let ints = parse_fcidump(text).unwrap();
        assert_eq!(ints.one_body(0, 1), 0.3);
        assert_eq!(ints.one_body(1, 0), 0.3);
    }

    #[test]
    fn fortran_exponents() {
        let text = "&FCI NORB=1,NELEC=0 &END\n 1.5D-01 1 1 0 0\n";
        assert_eq!(parse_fcidump(text).unwrap().one_body(0, 0), 0.15);
    }

    #[test]
    fn eightfold_completion() {
        let text = "&FCI NORB=3,NELEC=2 &END\n 0.1 1 2 3 1\n";
        let ints = parse_fcidump(text).unwrap();
        for k in eightfold(0, 1, 2, 0) {
            assert_eq!(ints.two_body(k[0], k[1], k[2], k[3]), 0.1);
        }
        assert_eq!(ints.two_body(0, 0, 1, 2), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_fcidump("&FCI NELEC=2 &END\n"),
            Err(Error::MissingHeaderField("NORB"))
        ));
        assert!(matches!(
            parse_fcidump("&FCI NORB=2 &END\n"),
            Err(Error::MissingHeaderField("NELEC"))
        ));
        assert!(matches!(
            parse_fcidump("&FCI NORB=1,NELEC=2 &END\n 1.0 2 1 0 0\n"),
            Err(Error::IndexOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            parse_fcidump("&FCI NORB=1,NELEC=2 &END\n abc 1 1 0 0\n"),
            Err(Error::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_fcidump("&FCI NORB=2,NELEC=2 &END\n 1.0 1 2 0 0\n 1.1 2 1 0 0\n"),
            Err(Error::ConflictingDuplicate { .. })
        ));
        // equal within tolerance is accepted
        assert!(parse_fcidump("&FCI NORB=2,NELEC=2 &END\n 1.0 1 2 0 0\n 1.0 2 1 0 0\n").is_ok());
        assert!(parse_fcidump("&FCI NORB=1,NELEC=3 &END\n").is_err());
    }

    #[test]
    fn roundtrip_and_idempotent_completion() {
        let text = "&FCI NORB=3,NELEC=2,MS2=0 &END\n 0.1 1 2 3 1\n 0.7 2 2 1 1\n -0.4 3 1 0 0\n -3.5 0 0 0 0\n";
        let ints = parse_fcidump(text).unwrap();
        let again = parse_fcidump(&ints.to_fcidump_string()).unwrap();
        assert_eq!(ints, again);
        assert_eq!(ints.symmetry_completed().unwrap(), ints);
    }
}

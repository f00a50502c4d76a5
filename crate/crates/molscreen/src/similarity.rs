//! Molecular similarity: circular fingerprints with Tanimoto, SMILES edit
//! similarity, and the Weisfeiler-Lehman subtree kernel.
//!
//! These are the three pairing scores consumed by the evolutionary network in
//! [`crate::mevon`]; fingerprints double as the descriptor space for
//! [`crate::domains`] and the screening pipeline.
//!
//! # Hashing
//!
//! Fingerprint environments are hashed with the splitmix64 finalizer
//! (constants `0x9E3779B97F4A7C15`, `0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`)
//! folded over the environment tuple from the fixed seed `0x243F6A8885A308D3`.
//! The constants are frozen so fingerprints are bit-exact across platforms.

use thiserror::Error;

use crate::chem::Molecule;

pub const DEFAULT_FP_RADIUS: usize = 2;
pub const DEFAULT_FP_WIDTH: usize = 2048;
pub const DEFAULT_WL_ITERATIONS: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error("fingerprint width mismatch: {a} vs {b}")]
    WidthMismatch { a: usize, b: usize },
    #[error("fingerprint width {width} must be a power of two >= 64")]
    BadWidth { width: usize },
}

/// Fixed-width bitset of hashed circular atom environments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
    radius: usize,
}

impl Fingerprint {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn popcount(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn bit(&self, index: usize) -> bool {
        debug_assert!(index < self.width);
        self.words[index / 64] >> (index % 64) & 1 == 1
    }

    fn set_bit(&mut self, index: usize) {
        self.words[index / 64] |= 1 << (index % 64);
    }

    pub fn set_bits(&self) -> Vec<usize> {
        (0..self.width).filter(|&i| self.bit(i)).collect()
    }

    /// Bits as 0/1 reals; the descriptor vector used by domain selection.
    pub fn to_dense(&self) -> Vec<f64> {
        (0..self.width)
            .map(|i| if self.bit(i) { 1.0 } else { 0.0 })
            .collect()
    }

    /// Test helper: build a fingerprint from explicit bit indices.
    pub fn from_bits(width: usize, bits: &[usize]) -> Fingerprint {
        let mut fp = Fingerprint {
            words: vec![0; width.div_ceil(64)],
            width,
            radius: 0,
        };
        for &b in bits {
            assert!(b < width);
            fp.set_bit(b);
        }
        fp
    }
}

/// splitmix64 finalizer; the published mix this module's hashes build on.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const HASH_SEED: u64 = 0x243F_6A88_85A3_08D3;

fn hash_chain(parts: impl IntoIterator<Item = u64>) -> u64 {
    parts
        .into_iter()
        .fold(HASH_SEED, |acc, p| mix64(acc ^ mix64(p)))
}

/// Circular (Morgan-style) fingerprint over atom environments of radius
/// `0..=radius`. Identical molecules produce identical bitsets regardless of
/// input atom order.
pub fn morgan_fingerprint(
    mol: &Molecule,
    radius: usize,
    width: usize,
) -> Result<Fingerprint, SimilarityError> {
    if width < 64 || !width.is_power_of_two() {
        return Err(SimilarityError::BadWidth { width });
    }
    let n = mol.atom_count();
    let mut fp = Fingerprint {
        words: vec![0; width / 64],
        width,
        radius,
    };

    // Radius-0 invariants: (element, charge, aromatic), matching the WL
    // kernel's initial labels.
    let mut hashes: Vec<u64> = mol
        .atoms()
        .iter()
        .map(|a| {
            hash_chain([
                a.element.index() as u64,
                (a.charge as i64) as u64,
                u64::from(a.aromatic),
            ])
        })
        .collect();
    for &h in &hashes {
        fp.set_bit((h % width as u64) as usize);
    }

    for _ in 1..=radius {
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let mut env: Vec<(u8, u64)> = mol
                .neighbors(i)
                .iter()
                .map(|&(j, order)| (order.code(), hashes[j]))
                .collect();
            env.sort_unstable();
            let h = hash_chain(
                std::iter::once(hashes[i])
                    .chain(env.iter().flat_map(|&(code, h)| [code as u64, h])),
            );
            next.push(h);
        }
        hashes = next;
        for &h in &hashes {
            fp.set_bit((h % width as u64) as usize);
        }
    }
    Ok(fp)
}

/// Fingerprint with the crate defaults (radius 2, width 2048).
pub fn default_fingerprint(mol: &Molecule) -> Fingerprint {
    morgan_fingerprint(mol, DEFAULT_FP_RADIUS, DEFAULT_FP_WIDTH).expect("default width is valid")
}

/// Tanimoto similarity |a∧b| / |a∨b|; 1 when both fingerprints are empty.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, SimilarityError> {
    if a.width != b.width {
        return Err(SimilarityError::WidthMismatch {
            a: a.width,
            b: b.width,
        });
    }
    let mut inter = 0u32;
    let mut union = 0u32;
    for (x, y) in a.words.iter().zip(&b.words) {
        inter += (x & y).count_ones();
        union += (x | y).count_ones();
    }
    if union == 0 {
        Ok(1.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

/// Normalized Levenshtein similarity `1 - d(a,b) / max(|a|, |b|)`; 1 when both
/// strings are empty. Intended for canonical SMILES texts.
pub fn edit_similarity(a: &str, b: &str) -> f64 {
    let (la, lb) = (a.chars().count(), b.chars().count());
    if la == 0 && lb == 0 {
        return 1.0;
    }
    let d = levenshtein(a, b);
    1.0 - d as f64 / la.max(lb) as f64
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Weisfeiler-Lehman subtree kernel similarity, normalized to [0, 1].
///
/// Label histograms are accumulated over iterations `0..=iterations` with
/// initial labels (element, charge, aromatic); the result is
/// `k(a,b) / sqrt(k(a,a) * k(b,b))`.
pub fn wl_similarity(a: &Molecule, b: &Molecule, iterations: usize) -> f64 {
    let mut labels_a = initial_wl_labels(a);
    let mut labels_b = initial_wl_labels(b);
    let mut kab = 0.0;
    let mut kaa = 0.0;
    let mut kbb = 0.0;

    for round in 0..=iterations {
        if round > 0 {
            let (na, nb) = wl_refine(a, &labels_a, b, &labels_b);
            labels_a = na;
            labels_b = nb;
        }
        let mut counts: std::collections::HashMap<u64, (f64, f64)> = std::collections::HashMap::new();
        for &l in &labels_a {
            counts.entry(l).or_default().0 += 1.0;
        }
        for &l in &labels_b {
            counts.entry(l).or_default().1 += 1.0;
        }
        for (ca, cb) in counts.values() {
            kab += ca * cb;
            kaa += ca * ca;
            kbb += cb * cb;
        }
    }
    kab / (kaa * kbb).sqrt()
}

fn initial_wl_labels(mol: &Molecule) -> Vec<u64> {
    mol.atoms()
        .iter()
        .map(|a| {
            hash_chain([
                a.element.index() as u64,
                (a.charge as i64) as u64,
                u64::from(a.aromatic),
            ])
        })
        .collect()
}

fn wl_refine(
    a: &Molecule,
    labels_a: &[u64],
    b: &Molecule,
    labels_b: &[u64],
) -> (Vec<u64>, Vec<u64>) {
    let step = |mol: &Molecule, labels: &[u64]| -> Vec<u64> {
        (0..mol.atom_count())
            .map(|i| {
                let mut env: Vec<(u8, u64)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(j, order)| (order.code(), labels[j]))
                    .collect();
                env.sort_unstable();
                hash_chain(
                    std::iter::once(labels[i])
                        .chain(env.iter().flat_map(|&(code, l)| [code as u64, l])),
                )
            })
            .collect()
    };
    (step(a, labels_a), step(b, labels_b))
}

/// Which stage-1 score [`crate::mevon`] and the `sim` CLI use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMetric {
    Fingerprint,
    Edit,
    Wl,
}

impl std::str::FromStr for SimilarityMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fingerprint" | "fp" | "tanimoto" => Ok(SimilarityMetric::Fingerprint),
            "edit" => Ok(SimilarityMetric::Edit),
            "wl" => Ok(SimilarityMetric::Wl),
            other => Err(format!("unknown similarity metric '{other}'")),
        }
    }
}

/// Pairwise similarity under one metric, with crate-default parameters.
pub fn molecule_similarity(a: &Molecule, b: &Molecule, metric: SimilarityMetric) -> f64 {
    match metric {
        SimilarityMetric::Fingerprint => {
            tanimoto(&default_fingerprint(a), &default_fingerprint(b)).expect("equal widths")
        }
        SimilarityMetric::Edit => {
            edit_similarity(&crate::chem::write_smiles(a), &crate::chem::write_smiles(b))
        }
        SimilarityMetric::Wl => wl_similarity(a, b, DEFAULT_WL_ITERATIONS),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    #[test]
    fn methane_radius_zero_sets_one_bit() {
        let mol = parse_smiles("C").unwrap();
        let fp = morgan_fingerprint(&mol, 0, 2048).unwrap();
        assert_eq!(fp.popcount(), 1);
    }

    #[test]
    fn permuted_inputs_share_fingerprints() {
        let a = parse_smiles("CC(=O)OC1=CC=CC=C1C(=O)O").unwrap();
        let b = parse_smiles("OC(=O)C1=CC=CC=C1OC(C)=O").unwrap();
        assert_eq!(default_fingerprint(&a), default_fingerprint(&b));
    }

    #[test]
    fn tanimoto_basics() {
        let f = default_fingerprint(&parse_smiles("CCO").unwrap());
        assert_eq!(tanimoto(&f, &f).unwrap(), 1.0);

        let a = Fingerprint::from_bits(64, &[1, 2, 3]);
        let b = Fingerprint::from_bits(64, &[2, 3, 4]);
        assert_eq!(tanimoto(&a, &b).unwrap(), 0.5);

        let c = Fingerprint::from_bits(64, &[10, 11]);
        let d = Fingerprint::from_bits(64, &[20, 21]);
        assert_eq!(tanimoto(&c, &d).unwrap(), 0.0);

        let e = Fingerprint::from_bits(64, &[]);
        assert_eq!(tanimoto(&e, &e).unwrap(), 1.0);

        let wide = Fingerprint::from_bits(128, &[0]);
        assert_eq!(
            tanimoto(&a, &wide).unwrap_err(),
            SimilarityError::WidthMismatch { a: 64, b: 128 }
        );
    }

    #[test]
    fn edit_similarity_examples() {
        assert_eq!(edit_similarity("CCO", "CCO"), 1.0);
        assert_eq!(edit_similarity("C", "O"), 0.0);
        let expected = 1.0 - 1.0 / 3.0;
        assert!((edit_similarity("CC", "CCO") - expected).abs() < 1e-12);
        assert_eq!(edit_similarity("", ""), 1.0);
    }

    #[test]
    fn edit_similarity_matches_bruteforce_recursion() {
        // Independent oracle: naive recursive edit distance.
        fn naive(a: &[u8], b: &[u8]) -> usize {
            if a.is_empty() {
                return b.len();
            }
            if b.is_empty() {
                return a.len();
            }
            let sub = naive(&a[1..], &b[1..]) + usize::from(a[0] != b[0]);
            let del = naive(&a[1..], b) + 1;
            let ins = naive(a, &b[1..]) + 1;
            sub.min(del).min(ins)
        }
        let cases = [
            ("CCO", "CC(C)O"),
            ("c1ccccc1", "C1CCCCC1"),
            ("CCN", "NCC"),
            ("C#N", "CC#N"),
        ];
        for (a, b) in cases {
            let d = naive(a.as_bytes(), b.as_bytes());
            let expected = 1.0 - d as f64 / a.len().max(b.len()) as f64;
            assert!((edit_similarity(a, b) - expected).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn wl_identity_and_disjoint() {
        let a = parse_smiles("CCO").unwrap();
        let b = parse_smiles("OCC").unwrap();
        assert!((wl_similarity(&a, &b, 3) - 1.0).abs() < 1e-12);

        let c = parse_smiles("C").unwrap();
        let n = parse_smiles("N").unwrap();
        for iters in 0..4 {
            assert_eq!(wl_similarity(&c, &n, iters), 0.0);
        }
    }

    #[test]
    fn wl_ethane_vs_ethanol_hand_computed() {
        // Iteration 0: ethane {C:2}, ethanol {C:2, O:1} -> dot 4, norms 4 and 5.
        // Iteration 1: ethane {C(C):2}; ethanol {C(C):1, C(C,O):1, O(C):1}
        //   -> dot 2, norms 4 and 3.
        // total: 6 / sqrt(8 * 8) = 0.75.
        let a = parse_smiles("CC").unwrap();
        let b = parse_smiles("CCO").unwrap();
        assert!((wl_similarity(&a, &b, 1) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn wl_symmetry() {
        let a = parse_smiles("c1ccccc1").unwrap();
        let b = parse_smiles("c1ccncc1").unwrap();
        for iters in 0..4 {
            assert_eq!(
                wl_similarity(&a, &b, iters),
                wl_similarity(&b, &a, iters)
            );
        }
    }
}

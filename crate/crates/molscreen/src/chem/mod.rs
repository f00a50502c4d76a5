//! Molecular graphs: parsing, validation, serialization, and tensorization.
//!
//! This is the shared data substrate for every other module. A [`Molecule`] is
//! an atom/bond graph over a fixed ten-element vocabulary with valence-checked
//! chemistry. Molecules are immutable after construction and safe to share
//! across threads.

mod iso;
mod parser;
mod tensors;
mod writer;

pub use iso::are_isomorphic;
pub use parser::{parse_smiles, SmilesError};
pub use tensors::{molecule_from_tensors, to_tensors, GraphTensors, TensorError, ATOM_FEATURES};
pub use writer::write_smiles;

use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Element vocabulary. Everything outside this set is rejected at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    C,
    N,
    O,
    F,
    S,
    P,
    Cl,
    Br,
    I,
    H,
}

pub const ELEMENT_COUNT: usize = 10;

impl Element {
    pub const ALL: [Element; ELEMENT_COUNT] = [
        Element::C,
        Element::N,
        Element::O,
        Element::F,
        Element::S,
        Element::P,
        Element::Cl,
        Element::Br,
        Element::I,
        Element::H,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::S => "S",
            Element::P => "P",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
            Element::H => "H",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Element> {
        Element::ALL.iter().copied().find(|e| e.symbol() == s)
    }

    /// Index into one-hot feature blocks; stable across the crate.
    pub fn index(self) -> usize {
        Element::ALL.iter().position(|&e| e == self).unwrap()
    }

    /// Allowed standard valences, smallest first.
    pub fn valences(self) -> &'static [i32] {
        match self {
            Element::C => &[4],
            Element::N => &[3],
            Element::O => &[2],
            Element::F | Element::Cl | Element::Br | Element::I | Element::H => &[1],
            Element::S => &[2, 4, 6],
            Element::P => &[3, 5],
        }
    }

    /// Whether the element may carry the aromatic flag (lowercase SMILES form).
    pub fn supports_aromatic(self) -> bool {
        matches!(
            self,
            Element::C | Element::N | Element::O | Element::S | Element::P
        )
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Bond order on a molecular graph edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Numeric order used in adjacency tensors (aromatic encoded as 1.5).
    pub fn value(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }

    /// Small stable code for hashing and WL labels.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
    pub implicit_h: u8,
    pub aromatic: bool,
}

impl Atom {
    pub fn uncharged(element: Element, implicit_h: u8) -> Atom {
        Atom {
            element,
            charge: 0,
            implicit_h,
            aromatic: false,
        }
    }
}

/// Undirected bond; endpoints are atom indices with `a < b` after normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

#[derive(Debug, Error, PartialEq)]
pub enum MoleculeError {
    #[error("molecule has no atoms")]
    Empty,
    #[error("bond ({a}, {b}) endpoint out of range for {atoms} atoms")]
    BondOutOfRange { a: usize, b: usize, atoms: usize },
    #[error("bond ({a}, {b}) connects an atom to itself")]
    SelfBond { a: usize, b: usize },
    #[error("duplicate bond between atoms {a} and {b}")]
    DuplicateBond { a: usize, b: usize },
    #[error("aromatic bond between atoms {a} and {b} requires both to be aromatic")]
    AromaticBondOnPlainAtoms { a: usize, b: usize },
    #[error("aromatic flag on atom {index} ({element}) is not supported")]
    AromaticNotSupported { index: usize, element: Element },
    #[error(
        "valence violation on atom {index} ({element}{charge:+}): \
         {units} explicit bond units + {implicit_h} H exceeds every allowed valence"
    )]
    Valence {
        index: usize,
        element: Element,
        charge: i8,
        units: i32,
        implicit_h: u8,
    },
}

/// A small molecule as a valence-checked atom/bond graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    name: Option<String>,
    /// neighbors[i] = sorted list of (neighbor index, bond order)
    neighbors: Vec<Vec<(usize, BondOrder)>>,
}

impl Molecule {
    /// Build and validate a molecule. Bonds are normalized to `a < b` and the
    /// adjacency is precomputed.
    pub fn new(
        atoms: Vec<Atom>,
        bonds: Vec<Bond>,
        name: Option<String>,
    ) -> Result<Molecule, MoleculeError> {
        if atoms.is_empty() {
            return Err(MoleculeError::Empty);
        }
        let n = atoms.len();
        let mut normalized = Vec::with_capacity(bonds.len());
        let mut seen = std::collections::HashSet::new();
        for bond in &bonds {
            if bond.a >= n || bond.b >= n {
                return Err(MoleculeError::BondOutOfRange {
                    a: bond.a,
                    b: bond.b,
                    atoms: n,
                });
            }
            if bond.a == bond.b {
                return Err(MoleculeError::SelfBond {
                    a: bond.a,
                    b: bond.b,
                });
            }
            let (a, b) = if bond.a < bond.b {
                (bond.a, bond.b)
            } else {
                (bond.b, bond.a)
            };
            if !seen.insert((a, b)) {
                return Err(MoleculeError::DuplicateBond { a, b });
            }
            if bond.order == BondOrder::Aromatic && !(atoms[a].aromatic && atoms[b].aromatic) {
                return Err(MoleculeError::AromaticBondOnPlainAtoms { a, b });
            }
            normalized.push(Bond {
                a,
                b,
                order: bond.order,
            });
        }
        for (index, atom) in atoms.iter().enumerate() {
            if atom.aromatic && !atom.element.supports_aromatic() {
                return Err(MoleculeError::AromaticNotSupported {
                    index,
                    element: atom.element,
                });
            }
        }

        let mut neighbors = vec![Vec::new(); n];
        for bond in &normalized {
            neighbors[bond.a].push((bond.b, bond.order));
            neighbors[bond.b].push((bond.a, bond.order));
        }
        for list in &mut neighbors {
            list.sort_unstable_by_key(|&(idx, order)| (idx, order.code()));
        }

        let mol = Molecule {
            atoms,
            bonds: normalized,
            name,
            neighbors,
        };
        for index in 0..n {
            let atom = mol.atoms[index];
            let units = mol.explicit_valence_units(index);
            let total = units + atom.implicit_h as i32;
            let allowed = allowed_valences(atom.element, atom.charge);
            if !allowed.iter().any(|&v| total <= v) {
                return Err(MoleculeError::Valence {
                    index,
                    element: atom.element,
                    charge: atom.charge,
                    units,
                    implicit_h: atom.implicit_h,
                });
            }
        }
        Ok(mol)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Molecule {
        self.name = Some(name.into());
        self
    }

    /// Sorted `(neighbor, bond order)` pairs for one atom.
    pub fn neighbors(&self, index: usize) -> &[(usize, BondOrder)] {
        &self.neighbors[index]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.neighbors[index].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<BondOrder> {
        self.neighbors[a]
            .iter()
            .find(|&&(idx, _)| idx == b)
            .map(|&(_, order)| order)
    }

    /// Atoms that are not explicit hydrogens.
    pub fn heavy_atom_count(&self) -> usize {
        self.atoms
            .iter()
            .filter(|a| a.element != Element::H)
            .count()
    }

    /// Number of independent cycles (cyclomatic number).
    pub fn ring_count(&self) -> usize {
        let components = self.component_count();
        self.bonds.len() + components - self.atoms.len()
    }

    fn component_count(&self) -> usize {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            stack.push(start);
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &(u, _) in &self.neighbors[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        components
    }

    /// Copy of the molecule with atoms relabeled: old atom `i` becomes atom
    /// `perm[i]`. Useful for permutation-invariance checks.
    pub fn permuted(&self, perm: &[usize]) -> Result<Molecule, MoleculeError> {
        assert_eq!(perm.len(), self.atoms.len(), "permutation length mismatch");
        let mut atoms = vec![None; self.atoms.len()];
        for (i, &p) in perm.iter().enumerate() {
            assert!(atoms[p].is_none(), "not a permutation");
            atoms[p] = Some(self.atoms[i]);
        }
        let atoms: Vec<Atom> = atoms.into_iter().map(|a| a.unwrap()).collect();
        let bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|b| Bond {
                a: perm[b.a],
                b: perm[b.b],
                order: b.order,
            })
            .collect();
        Molecule::new(atoms, bonds, self.name.clone())
    }

    /// Integer bond-unit count used by the valence model.
    pub fn explicit_valence_units(&self, index: usize) -> i32 {
        let atom = self.atoms[index];
        explicit_units(
            atom.element,
            Some(atom.implicit_h),
            self.neighbors[index].iter().map(|&(_, order)| order),
        )
    }
}

/// Valence accounting over a set of incident bond orders.
///
/// Aromatic bonds are counted Kekulé-style without ring perception: aromatic
/// carbon takes one ring double bond (`k` aromatic bonds count `k + 1` units);
/// aromatic O/S donate a lone pair (`k` units); aromatic N/P take the +1 only
/// in the pyridine-like case (no other substituent and no declared hydrogen —
/// pyrrole must be written `[nH]`). `declared_h` is `None` while hydrogens are
/// still to be inferred for a bare organic-subset atom.
pub(crate) fn explicit_units(
    element: Element,
    declared_h: Option<u8>,
    orders: impl Iterator<Item = BondOrder>,
) -> i32 {
    let mut plain = 0i32;
    let mut aromatic = 0i32;
    for order in orders {
        match order {
            BondOrder::Single => plain += 1,
            BondOrder::Double => plain += 2,
            BondOrder::Triple => plain += 3,
            BondOrder::Aromatic => aromatic += 1,
        }
    }
    if aromatic == 0 {
        return plain;
    }
    let pi_bonus = match element {
        Element::C => 1,
        Element::N | Element::P => {
            if plain == 0 && matches!(declared_h, None | Some(0)) {
                1
            } else {
                0
            }
        }
        _ => 0,
    };
    plain + aromatic + pi_bonus
}

/// Allowed total valences for an element at a formal charge.
///
/// Positive charges on N, O, S, P raise the allowed valence by the charge
/// (ammonium nitrogen binds four); every other charge lowers it.
pub(crate) fn allowed_valences(element: Element, charge: i8) -> Vec<i32> {
    let lone_pair_donor = matches!(
        element,
        Element::N | Element::O | Element::S | Element::P
    );
    element
        .valences()
        .iter()
        .map(|&v| {
            let adjusted = if charge > 0 && lone_pair_donor {
                v + charge as i32
            } else {
                v - charge.unsigned_abs() as i32
            };
            adjusted.max(0)
        })
        .collect()
}

/// Smallest allowed valence that covers `units` bond units, and the implicit
/// hydrogen count it implies. `None` if every allowed valence is exceeded.
pub(crate) fn infer_implicit_h(element: Element, charge: i8, units: i32) -> Option<u8> {
    allowed_valences(element, charge)
        .into_iter()
        .filter(|&v| v >= units)
        .map(|v| (v - units) as u8)
        .next()
}

#[derive(Debug, Error)]
pub enum SmilesFileError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: SmilesError },
}

/// Read a SMILES list file: UTF-8, one record per line, optional tab-separated
/// name, `#` lines and blank lines ignored.
pub fn read_smiles_file(path: impl AsRef<Path>) -> Result<Vec<Molecule>, SmilesFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SmilesFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_smiles_list(&text)
}

/// Parse the SMILES list format from an in-memory string.
pub fn parse_smiles_list(text: &str) -> Result<Vec<Molecule>, SmilesFileError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (smiles, name) = match line.split_once('\t') {
            Some((s, n)) => (s.trim(), Some(n.trim().to_string())),
            None => (line, None),
        };
        let mol = parse_smiles(smiles).map_err(|source| SmilesFileError::Parse {
            line: lineno + 1,
            source,
        })?;
        let mol = match name {
            Some(n) if !n.is_empty() => mol.with_name(n),
            _ => mol,
        };
        out.push(mol);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valence_adjustment_for_charges() {
        assert_eq!(allowed_valences(Element::N, 1), vec![4]);
        assert_eq!(allowed_valences(Element::N, -1), vec![2]);
        assert_eq!(allowed_valences(Element::O, -1), vec![1]);
        assert_eq!(allowed_valences(Element::O, 1), vec![3]);
        assert_eq!(allowed_valences(Element::C, 1), vec![3]);
        assert_eq!(allowed_valences(Element::C, -1), vec![3]);
        assert_eq!(allowed_valences(Element::S, 0), vec![2, 4, 6]);
    }

    #[test]
    fn duplicate_bond_rejected() {
        let atoms = vec![
            Atom::uncharged(Element::C, 3),
            Atom::uncharged(Element::C, 3),
        ];
        let bonds = vec![
            Bond {
                a: 0,
                b: 1,
                order: BondOrder::Single,
            },
            Bond {
                a: 1,
                b: 0,
                order: BondOrder::Single,
            },
        ];
        let err = Molecule::new(atoms, bonds, None).unwrap_err();
        assert_eq!(err, MoleculeError::DuplicateBond { a: 0, b: 1 });
    }

    #[test]
    fn overfull_carbon_rejected() {
        // CH4 plus one more bond.
        let atoms = vec![
            Atom::uncharged(Element::C, 4),
            Atom::uncharged(Element::C, 3),
        ];
        let bonds = vec![Bond {
            a: 0,
            b: 1,
            order: BondOrder::Single,
        }];
        assert!(matches!(
            Molecule::new(atoms, bonds, None),
            Err(MoleculeError::Valence { index: 0, .. })
        ));
    }

    #[test]
    fn aromatic_units_follow_ring_membership() {
        let two_ar = [BondOrder::Aromatic, BondOrder::Aromatic];
        let three_ar = [
            BondOrder::Aromatic,
            BondOrder::Aromatic,
            BondOrder::Aromatic,
        ];
        // Benzene carbon and fused junction carbon.
        assert_eq!(explicit_units(Element::C, None, two_ar.into_iter()), 3);
        assert_eq!(explicit_units(Element::C, None, three_ar.into_iter()), 4);
        // Pyridine nitrogen vs pyrrole nitrogen.
        assert_eq!(explicit_units(Element::N, None, two_ar.into_iter()), 3);
        assert_eq!(explicit_units(Element::N, Some(1), two_ar.into_iter()), 2);
        // Furan oxygen donates its lone pair.
        assert_eq!(explicit_units(Element::O, None, two_ar.into_iter()), 2);
    }

    #[test]
    fn smiles_list_skips_comments_and_names_molecules() {
        let text = "# header\nC\tmethane\n\nCC\n";
        let mols = parse_smiles_list(text).unwrap();
        assert_eq!(mols.len(), 2);
        assert_eq!(mols[0].name(), Some("methane"));
        assert_eq!(mols[1].name(), None);
    }
}

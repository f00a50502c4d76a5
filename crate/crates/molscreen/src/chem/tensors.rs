//! Dense tensor view of a molecule: node-feature matrix X and bond-order
//! adjacency A. This is the continuous representation the diffusion and
//! message-passing modules operate on.

use thiserror::Error;

use super::{infer_implicit_h, Atom, Bond, BondOrder, Element, Molecule, ELEMENT_COUNT};
use crate::linalg::Mat;

/// Node feature width: element one-hot block, formal charge, aromatic flag.
pub const ATOM_FEATURES: usize = ELEMENT_COUNT + 2;

/// Default cap on atom count for tensorization (small-molecule scale).
pub const DEFAULT_MAX_ATOMS: usize = 38;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("molecule has {atoms} atoms, above the configured maximum {max}")]
    TooManyAtoms { atoms: usize, max: usize },
    #[error("tensor entry at ({i}, {j}) = {value} is not an exact bond-order encoding")]
    NonExactBond { i: usize, j: usize, value: f64 },
    #[error("node row {row} is not an exact atom encoding")]
    NonExactAtom { row: usize },
    #[error("decoded graph is not a valid molecule: {0}")]
    InvalidMolecule(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphTensors {
    /// n × ATOM_FEATURES node features.
    pub x: Mat,
    /// n × n symmetric bond-order matrix (aromatic encoded as 1.5).
    pub a: Mat,
}

impl GraphTensors {
    pub fn atom_count(&self) -> usize {
        self.x.rows()
    }
}

/// Tensorize with the default atom-count cap.
pub fn to_tensors(mol: &Molecule) -> Result<GraphTensors, TensorError> {
    to_tensors_with_limit(mol, DEFAULT_MAX_ATOMS)
}

pub fn to_tensors_with_limit(mol: &Molecule, max_atoms: usize) -> Result<GraphTensors, TensorError> {
    let n = mol.atom_count();
    if n > max_atoms {
        return Err(TensorError::TooManyAtoms {
            atoms: n,
            max: max_atoms,
        });
    }
    let mut x = Mat::zeros(n, ATOM_FEATURES);
    for (i, atom) in mol.atoms().iter().enumerate() {
        x.set(i, atom.element.index(), 1.0);
        x.set(i, ELEMENT_COUNT, atom.charge as f64);
        x.set(i, ELEMENT_COUNT + 1, if atom.aromatic { 1.0 } else { 0.0 });
    }
    let mut a = Mat::zeros(n, n);
    for bond in mol.bonds() {
        let v = bond.order.value();
        a.set(bond.a, bond.b, v);
        a.set(bond.b, bond.a, v);
    }
    Ok(GraphTensors { x, a })
}

/// Exact inverse of [`to_tensors`]: recovers elements, charges, aromatic flags
/// and bond orders bit-for-bit. Implicit hydrogens are re-derived from the
/// valence table (they are not stored in X).
pub fn molecule_from_tensors(t: &GraphTensors) -> Result<Molecule, TensorError> {
    let n = t.x.rows();
    let mut drafts = Vec::with_capacity(n);
    for i in 0..n {
        let row = t.x.row(i);
        let mut element = None;
        for (k, &v) in row[..ELEMENT_COUNT].iter().enumerate() {
            if v == 1.0 {
                if element.is_some() {
                    return Err(TensorError::NonExactAtom { row: i });
                }
                element = Some(Element::ALL[k]);
            } else if v != 0.0 {
                return Err(TensorError::NonExactAtom { row: i });
            }
        }
        let element = element.ok_or(TensorError::NonExactAtom { row: i })?;
        let charge = row[ELEMENT_COUNT];
        if charge.fract() != 0.0 || charge.abs() > 15.0 {
            return Err(TensorError::NonExactAtom { row: i });
        }
        let aromatic = match row[ELEMENT_COUNT + 1] {
            v if v == 0.0 => false,
            v if v == 1.0 => true,
            _ => return Err(TensorError::NonExactAtom { row: i }),
        };
        drafts.push((element, charge as i8, aromatic));
    }

    let mut bonds = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = t.a.get(i, j);
            if v != t.a.get(j, i) {
                return Err(TensorError::NonExactBond { i, j, value: v });
            }
            let order = match v {
                v if v == 0.0 => continue,
                v if v == 1.0 => BondOrder::Single,
                v if v == 1.5 => BondOrder::Aromatic,
                v if v == 2.0 => BondOrder::Double,
                v if v == 3.0 => BondOrder::Triple,
                _ => return Err(TensorError::NonExactBond { i, j, value: v }),
            };
            bonds.push(Bond { a: i, b: j, order });
        }
    }

    let mut orders: Vec<Vec<BondOrder>> = vec![Vec::new(); n];
    for bond in &bonds {
        orders[bond.a].push(bond.order);
        orders[bond.b].push(bond.order);
    }
    let atoms: Vec<Atom> = drafts
        .iter()
        .enumerate()
        .map(|(i, &(element, charge, aromatic))| {
            let units = super::explicit_units(element, None, orders[i].iter().copied());
            let implicit_h = infer_implicit_h(element, charge, units).unwrap_or(0);
            Atom {
                element,
                charge,
                implicit_h,
                aromatic,
            }
        })
        .collect();

    Molecule::new(atoms, bonds, None)
        .map_err(|e| TensorError::InvalidMolecule(e.to_string()))
}

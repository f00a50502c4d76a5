//! Labeled graph isomorphism for molecules (VF2-style backtracking).
//!
//! Atoms match on (element, charge, aromatic, implicit hydrogens); edges must
//! agree in bond order. Intended for the desk-scale regime (≤ 38 atoms), where
//! label pruning keeps the search tiny.

use super::{Atom, Molecule};

fn label(a: &Atom) -> (u8, i8, bool, u8) {
    (a.element.index() as u8, a.charge, a.aromatic, a.implicit_h)
}

/// True when the two molecules are isomorphic as labeled graphs.
pub fn are_isomorphic(a: &Molecule, b: &Molecule) -> bool {
    let n = a.atom_count();
    if n != b.atom_count() || a.bond_count() != b.bond_count() {
        return false;
    }
    let mut la: Vec<_> = a.atoms().iter().map(label).collect();
    let mut lb: Vec<_> = b.atoms().iter().map(label).collect();
    la.sort_unstable();
    lb.sort_unstable();
    if la != lb {
        return false;
    }

    // Order a's atoms so each one (after the first in its component) touches
    // an already-mapped atom; this keeps the backtracking anchored.
    let order = connectivity_order(a);
    let mut mapping: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    extend(a, b, &order, 0, &mut mapping, &mut used)
}

fn connectivity_order(mol: &Molecule) -> Vec<usize> {
    let n = mol.atom_count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(u, _) in mol.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    order
}

fn extend(
    a: &Molecule,
    b: &Molecule,
    order: &[usize],
    depth: usize,
    mapping: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let i = order[depth];
    let li = label(&a.atoms()[i]);
    for j in 0..b.atom_count() {
        if used[j] || label(&b.atoms()[j]) != li || a.degree(i) != b.degree(j) {
            continue;
        }
        if !edges_consistent(a, b, i, j, mapping) {
            continue;
        }
        mapping[i] = Some(j);
        used[j] = true;
        if extend(a, b, order, depth + 1, mapping, used) {
            return true;
        }
        mapping[i] = None;
        used[j] = false;
    }
    false
}

fn edges_consistent(
    a: &Molecule,
    b: &Molecule,
    i: usize,
    j: usize,
    mapping: &[Option<usize>],
) -> bool {
    let mut mapped_neighbors = 0;
    for &(u, order) in a.neighbors(i) {
        if let Some(v) = mapping[u] {
            mapped_neighbors += 1;
            if b.bond_between(v, j) != Some(order) {
                return false;
            }
        }
    }
    // No extra edges from j into the mapped image.
    let image_neighbors = b
        .neighbors(j)
        .iter()
        .filter(|&&(v, _)| mapping.iter().any(|m| *m == Some(v)))
        .count();
    mapped_neighbors == image_neighbors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    #[test]
    fn isomorphic_under_reordering() {
        let a = parse_smiles("CCO").unwrap();
        let b = parse_smiles("OCC").unwrap();
        assert!(are_isomorphic(&a, &b));
    }

    #[test]
    fn distinguishes_constitutional_isomers() {
        // n-butane vs isobutane: same formula, different connectivity.
        let a = parse_smiles("CCCC").unwrap();
        let b = parse_smiles("CC(C)C").unwrap();
        assert!(!are_isomorphic(&a, &b));
    }

    #[test]
    fn bond_orders_matter() {
        let a = parse_smiles("CC=O").unwrap();
        let b = parse_smiles("CCO").unwrap();
        assert!(!are_isomorphic(&a, &b));
    }

    #[test]
    fn ring_against_chain() {
        let a = parse_smiles("C1CCCCC1").unwrap();
        let b = parse_smiles("CCCCCC").unwrap();
        assert!(!are_isomorphic(&a, &b));
    }
}

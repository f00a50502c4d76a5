//! Canonical SMILES serialization.
//!
//! Atom order comes from iterative neighborhood refinement: atoms start with
//! invariant keys (element, charge, aromatic flag, hydrogen count, degree) and
//! are repeatedly re-ranked by their sorted neighbor signatures until the
//! partition stabilizes. Remaining ties are broken by trying every member of
//! the first tied class and keeping the lexicographically smallest string, so
//! the output is invariant under input atom permutations.

use super::{infer_implicit_h, BondOrder, Element, Molecule};

/// Serialize a molecule to canonical SMILES.
///
/// `parse_smiles(write_smiles(m))` is graph-isomorphic to `m`, and two
/// atom-permuted copies of the same molecule serialize identically.
pub fn write_smiles(mol: &Molecule) -> String {
    let init = initial_ranks(mol);
    canonical_string(mol, init)
}

fn initial_ranks(mol: &Molecule) -> Vec<usize> {
    let n = mol.atom_count();
    let keys: Vec<(usize, bool, i8, u8, usize)> = (0..n)
        .map(|i| {
            let a = mol.atoms()[i];
            (
                a.element.index(),
                a.aromatic,
                a.charge,
                a.implicit_h,
                mol.degree(i),
            )
        })
        .collect();
    dense_ranks_by_key(&keys)
}

fn dense_ranks_by_key<K: Ord>(keys: &[K]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0; keys.len()];
    let mut rank = 0;
    for w in 0..idx.len() {
        if w > 0 && keys[idx[w]] != keys[idx[w - 1]] {
            rank += 1;
        }
        ranks[idx[w]] = rank;
    }
    ranks
}

fn refine(mol: &Molecule, mut ranks: Vec<usize>) -> Vec<usize> {
    loop {
        let classes = distinct(&ranks);
        let sigs: Vec<(usize, Vec<(u8, usize)>)> = (0..ranks.len())
            .map(|i| {
                let mut nb: Vec<(u8, usize)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(j, order)| (order.code(), ranks[j]))
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let new_ranks = dense_ranks_by_key(&sigs);
        let new_classes = distinct(&new_ranks);
        ranks = new_ranks;
        if new_classes == classes {
            return ranks;
        }
    }
}

fn distinct(ranks: &[usize]) -> usize {
    let mut seen: Vec<usize> = ranks.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn canonical_string(mol: &Molecule, ranks: Vec<usize>) -> String {
    let ranks = refine(mol, ranks);
    let n = ranks.len();
    if distinct(&ranks) == n {
        return emit(mol, &ranks);
    }
    // Tie-break: split the first non-singleton class on each of its members
    // and keep the smallest resulting string.
    let tied_rank = (0..n)
        .map(|i| ranks[i])
        .filter(|&r| ranks.iter().filter(|&&x| x == r).count() > 1)
        .min()
        .unwrap();
    let candidates: Vec<usize> = (0..n).filter(|&i| ranks[i] == tied_rank).collect();
    candidates
        .into_iter()
        .map(|chosen| {
            let promoted: Vec<usize> = (0..n)
                .map(|i| 2 * ranks[i] + usize::from(i != chosen))
                .collect();
            canonical_string(mol, promoted)
        })
        .min()
        .unwrap()
}

/// Deterministic SMILES emission for a total atom order.
fn emit(mol: &Molecule, ranks: &[usize]) -> String {
    let n = mol.atom_count();
    let start = (0..n).min_by_key(|&i| ranks[i]).unwrap();

    // First pass: classify edges into tree edges and ring closures, visiting
    // neighbors in rank order.
    let mut visited = vec![false; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    // closure edges as (open atom = visited first, close atom)
    let mut closures: Vec<(usize, usize)> = Vec::new();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut roots = Vec::new();

    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&i| ranks[i]);
    for s in std::iter::once(start).chain(starts) {
        if visited[s] {
            continue;
        }
        roots.push(s);
        // iterative DFS preserving neighbor rank order
        let mut stack = vec![(s, usize::MAX)];
        visited[s] = true;
        while let Some((v, parent)) = stack.pop() {
            order.push(v);
            let mut nbs: Vec<usize> = mol.neighbors(v).iter().map(|&(u, _)| u).collect();
            nbs.sort_by_key(|&u| ranks[u]);
            let mut to_push = Vec::new();
            for u in nbs {
                if u == parent {
                    continue;
                }
                if visited[u] {
                    // Back edge; record once, opened at the earlier atom.
                    if !closures.contains(&(u, v)) && !closures.contains(&(v, u)) {
                        closures.push((u, v));
                    }
                } else {
                    visited[u] = true;
                    children[v].push(u);
                    to_push.push((u, v));
                }
            }
            // Reverse so the lowest-rank child is processed first.
            for item in to_push.into_iter().rev() {
                stack.push(item);
            }
        }
    }

    // A DFS stack visits subtrees depth-first, but children[] order is what
    // drives emission below, so the stack order nuance does not matter.
    let position_in_order: Vec<usize> = {
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        pos
    };

    // Ring closure bookkeeping: digit assignment happens in emission order.
    let mut opens_at: Vec<Vec<usize>> = vec![Vec::new(); n]; // closure ids opening at atom
    let mut closes_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (cid, &(open, close)) in closures.iter().enumerate() {
        // The "open" atom is whichever was emitted first.
        let (o, c) = if position_in_order[open] <= position_in_order[close] {
            (open, close)
        } else {
            (close, open)
        };
        opens_at[o].push(cid);
        closes_at[c].push(cid);
    }
    for list in opens_at.iter_mut().chain(closes_at.iter_mut()) {
        list.sort_by_key(|&cid| {
            let (a, b) = closures[cid];
            position_in_order[a].max(position_in_order[b])
        });
    }

    let mut digits = DigitPool::new();
    let mut digit_of: Vec<Option<u32>> = vec![None; closures.len()];
    let mut out = String::new();
    for (k, &root) in roots.iter().enumerate() {
        if k > 0 {
            // Unreachable for parser-produced molecules ('.' is rejected),
            // but programmatic molecules may be disconnected.
            out.push('.');
        }
        emit_atom(
            mol,
            ranks,
            root,
            None,
            &children,
            &opens_at,
            &closes_at,
            &closures,
            &mut digits,
            &mut digit_of,
            &mut out,
        );
    }
    out
}

struct DigitPool {
    in_use: Vec<u32>,
}

impl DigitPool {
    fn new() -> DigitPool {
        DigitPool { in_use: Vec::new() }
    }

    fn acquire(&mut self) -> u32 {
        let mut d = 1;
        while self.in_use.contains(&d) {
            d += 1;
        }
        self.in_use.push(d);
        d
    }

    fn release(&mut self, d: u32) {
        self.in_use.retain(|&x| x != d);
    }
}

fn push_digit(out: &mut String, d: u32) {
    if d < 10 {
        out.push(char::from(b'0' + d as u8));
    } else {
        out.push('%');
        out.push(char::from(b'0' + (d / 10) as u8));
        out.push(char::from(b'0' + (d % 10) as u8));
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_atom(
    mol: &Molecule,
    ranks: &[usize],
    v: usize,
    parent: Option<usize>,
    children: &[Vec<usize>],
    opens_at: &[Vec<usize>],
    closes_at: &[Vec<usize>],
    closures: &[(usize, usize)],
    digits: &mut DigitPool,
    digit_of: &mut Vec<Option<u32>>,
    out: &mut String,
) {
    if let Some(p) = parent {
        out.push_str(bond_symbol(mol, p, v));
    }
    out.push_str(&atom_token(mol, v));

    // Close digits first, then open new ones.
    for &cid in &closes_at[v] {
        let d = digit_of[cid].expect("closure digit allocated before close");
        push_digit(out, d);
        digits.release(d);
    }
    for &cid in &opens_at[v] {
        let (a, b) = closures[cid];
        let other = if a == v { b } else { a };
        let d = digits.acquire();
        digit_of[cid] = Some(d);
        out.push_str(bond_symbol(mol, v, other));
        push_digit(out, d);
    }

    let kids = &children[v];
    let mut kids: Vec<usize> = kids.clone();
    kids.sort_by_key(|&u| ranks[u]);
    for (i, &u) in kids.iter().enumerate() {
        let last = i + 1 == kids.len();
        if !last {
            out.push('(');
        }
        emit_atom(
            mol, ranks, u, Some(v), children, opens_at, closes_at, closures, digits, digit_of,
            out,
        );
        if !last {
            out.push(')');
        }
    }
}

fn bond_symbol(mol: &Molecule, a: usize, b: usize) -> &'static str {
    let both_aromatic = mol.atoms()[a].aromatic && mol.atoms()[b].aromatic;
    match mol.bond_between(a, b).expect("bond exists") {
        BondOrder::Single => {
            if both_aromatic {
                "-"
            } else {
                ""
            }
        }
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic => "",
    }
}

fn atom_token(mol: &Molecule, v: usize) -> String {
    let atom = mol.atoms()[v];
    let symbol = if atom.aromatic {
        atom.element.symbol().to_ascii_lowercase()
    } else {
        atom.element.symbol().to_string()
    };
    // A bare token is only legal when re-parsing would infer the same
    // hydrogen count, so compute units as the parser would for a bare atom.
    let units_bare = crate::chem::explicit_units(
        atom.element,
        None,
        mol.neighbors(v).iter().map(|&(_, order)| order),
    );
    let bare_ok = atom.charge == 0
        && atom.element != Element::H
        && infer_implicit_h(atom.element, 0, units_bare) == Some(atom.implicit_h);
    if bare_ok {
        return symbol;
    }
    let mut token = String::from("[");
    token.push_str(&symbol);
    if atom.implicit_h == 1 {
        token.push('H');
    } else if atom.implicit_h > 1 {
        token.push('H');
        token.push_str(&atom.implicit_h.to_string());
    }
    match atom.charge.cmp(&0) {
        std::cmp::Ordering::Greater => {
            token.push('+');
            if atom.charge > 1 {
                token.push_str(&atom.charge.to_string());
            }
        }
        std::cmp::Ordering::Less => {
            token.push('-');
            if atom.charge < -1 {
                token.push_str(&(-atom.charge).to_string());
            }
        }
        std::cmp::Ordering::Equal => {}
    }
    token.push(']');
    token
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{are_isomorphic, parse_smiles, Atom, Bond, Molecule};

    #[test]
    fn methane_is_bare_c() {
        let mol = parse_smiles("C").unwrap();
        assert_eq!(write_smiles(&mol), "C");
    }

    #[test]
    fn roundtrip_is_isomorphic() {
        for smiles in [
            "C",
            "CC",
            "CCO",
            "C1CC1",
            "c1ccccc1",
            "CC(=O)OC1=CC=CC=C1C(=O)O",
            "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
            "[NH4+]",
            "CC(=O)[O-]",
            "OS(=O)(=O)O",
            "c1ccc2ccccc2c1",
            "C#N",
            "N#Cc1ccccc1",
            "c1cc[nH]c1",
        ] {
            let mol = parse_smiles(smiles).unwrap();
            let written = write_smiles(&mol);
            let reparsed = parse_smiles(&written)
                .unwrap_or_else(|e| panic!("{smiles} -> {written}: {e}"));
            assert!(
                are_isomorphic(&mol, &reparsed),
                "{smiles} -> {written} not isomorphic"
            );
        }
    }

    #[test]
    fn permuted_atoms_serialize_identically() {
        // Ethanol built with two different atom orders.
        let a = Molecule::new(
            vec![
                Atom::uncharged(crate::chem::Element::C, 3),
                Atom::uncharged(crate::chem::Element::C, 2),
                Atom::uncharged(crate::chem::Element::O, 1),
            ],
            vec![
                Bond {
                    a: 0,
                    b: 1,
                    order: BondOrder::Single,
                },
                Bond {
                    a: 1,
                    b: 2,
                    order: BondOrder::Single,
                },
            ],
            None,
        )
        .unwrap();
        let b = Molecule::new(
            vec![
                Atom::uncharged(crate::chem::Element::O, 1),
                Atom::uncharged(crate::chem::Element::C, 3),
                Atom::uncharged(crate::chem::Element::C, 2),
            ],
            vec![
                Bond {
                    a: 2,
                    b: 0,
                    order: BondOrder::Single,
                },
                Bond {
                    a: 1,
                    b: 2,
                    order: BondOrder::Single,
                },
            ],
            None,
        )
        .unwrap();
        assert_eq!(write_smiles(&a), write_smiles(&b));
    }

    #[test]
    fn aromatic_single_bond_is_explicit() {
        let mol = parse_smiles("c1ccccc1-c1ccccc1").unwrap();
        let written = write_smiles(&mol);
        let reparsed = parse_smiles(&written).unwrap();
        assert!(are_isomorphic(&mol, &reparsed), "{written}");
    }
}

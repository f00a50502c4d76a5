//! SMILES parser.
//!
//! Grammar coverage: organic-subset atoms, bracket atoms with charge and
//! explicit hydrogen counts, bond orders `- = # :`, branches, ring closures
//! (digits and `%nn`), and aromatic lowercase forms. Stereochemistry, isotopes,
//! wildcards, and dot-disconnected components are rejected with an error that
//! names the offending position; nothing is silently dropped.
//!
//! Aromatic flags are taken from the input as written. There is no ring
//! perception: a bond between two aromatic-flagged atoms defaults to aromatic,
//! so a biphenyl-style single bond must be written explicitly (`c1ccccc1-c1ccccc1`).
//!
//! Error positions are 1-based character offsets into the input.

use thiserror::Error;

use super::{infer_implicit_h, Atom, Bond, BondOrder, Element, Molecule};

#[derive(Debug, Error, PartialEq)]
pub enum SmilesError {
    #[error("empty SMILES input")]
    Empty,
    #[error("unbalanced bracket at position {position}")]
    UnbalancedBracket { position: usize },
    #[error("unknown element at position {position}")]
    UnknownElement { position: usize },
    #[error("unclosed ring bond {digit} opened at position {position}")]
    UnclosedRing { digit: u32, position: usize },
    #[error("valence violation at position {position}: {element} with charge {charge} cannot carry {units} bond units + {hydrogens} H")]
    ValenceViolation {
        position: usize,
        element: Element,
        charge: i8,
        units: i32,
        hydrogens: u8,
    },
    #[error("unsupported SMILES feature at position {position}: {feature}")]
    Unsupported {
        position: usize,
        feature: &'static str,
    },
    #[error("syntax error at position {position}: {message}")]
    Syntax {
        position: usize,
        message: &'static str,
    },
}

impl SmilesError {
    /// 1-based character position of the offending input.
    pub fn position(&self) -> usize {
        match self {
            SmilesError::Empty => 1,
            SmilesError::UnbalancedBracket { position }
            | SmilesError::UnknownElement { position }
            | SmilesError::UnclosedRing { position, .. }
            | SmilesError::ValenceViolation { position, .. }
            | SmilesError::Unsupported { position, .. }
            | SmilesError::Syntax { position, .. } => *position,
        }
    }
}

struct DraftAtom {
    element: Element,
    charge: i8,
    aromatic: bool,
    /// `Some` for bracket atoms (explicit), `None` for organic-subset atoms
    /// (inferred from the valence table after all bonds are known).
    explicit_h: Option<u8>,
    position: usize,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<DraftAtom>,
    bonds: Vec<Bond>,
    bond_set: std::collections::HashSet<(usize, usize)>,
    /// Attachment point for the next atom.
    prev: Option<usize>,
    /// Open branch points with the 1-based position of their '('.
    branch_stack: Vec<(Option<usize>, usize)>,
    pending_bond: Option<(BondOrder, usize)>,
    /// ring number -> (atom, explicit bond at open, 1-based position of open)
    open_rings: std::collections::HashMap<u32, (usize, Option<BondOrder>, usize)>,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Parser<'a> {
        Parser {
            bytes: input.as_bytes(),
            pos: 0,
            atoms: Vec::new(),
            bonds: Vec::new(),
            bond_set: std::collections::HashSet::new(),
            prev: None,
            branch_stack: Vec::new(),
            pending_bond: None,
            open_rings: std::collections::HashMap::new(),
        }
    }

    fn here(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn run(mut self) -> Result<Molecule, SmilesError> {
        while let Some(b) = self.peek() {
            match b {
                b'(' => {
                    let position = self.here();
                    self.bump();
                    if self.prev.is_none() {
                        return Err(SmilesError::Syntax {
                            position,
                            message: "branch before any atom",
                        });
                    }
                    if self.pending_bond.is_some() {
                        return Err(SmilesError::Syntax {
                            position,
                            message: "bond symbol before '('",
                        });
                    }
                    self.branch_stack.push((self.prev, position));
                }
                b')' => {
                    let position = self.here();
                    self.bump();
                    if let Some((_, bpos)) = self.pending_bond {
                        return Err(SmilesError::Syntax {
                            position: bpos,
                            message: "dangling bond before ')'",
                        });
                    }
                    match self.branch_stack.pop() {
                        Some((restore, _)) => self.prev = restore,
                        None => return Err(SmilesError::UnbalancedBracket { position }),
                    }
                }
                b'-' | b'=' | b'#' | b':' => {
                    let position = self.here();
                    self.bump();
                    if self.pending_bond.is_some() {
                        return Err(SmilesError::Syntax {
                            position,
                            message: "two consecutive bond symbols",
                        });
                    }
                    let order = match b {
                        b'-' => BondOrder::Single,
                        b'=' => BondOrder::Double,
                        b'#' => BondOrder::Triple,
                        _ => BondOrder::Aromatic,
                    };
                    self.pending_bond = Some((order, position));
                }
                b'/' | b'\\' => {
                    return Err(SmilesError::Unsupported {
                        position: self.here(),
                        feature: "directional (stereo) bond",
                    });
                }
                b'.' => {
                    return Err(SmilesError::Unsupported {
                        position: self.here(),
                        feature: "dot-disconnected components",
                    });
                }
                b'0'..=b'9' => {
                    let position = self.here();
                    self.bump();
                    self.ring_closure((b - b'0') as u32, position)?;
                }
                b'%' => {
                    let position = self.here();
                    self.bump();
                    let d1 = self.bump();
                    let d2 = self.bump();
                    match (d1, d2) {
                        (Some(a), Some(b)) if a.is_ascii_digit() && b.is_ascii_digit() => {
                            let num = (a - b'0') as u32 * 10 + (b - b'0') as u32;
                            self.ring_closure(num, position)?;
                        }
                        _ => {
                            return Err(SmilesError::Syntax {
                                position,
                                message: "'%' requires two digits",
                            })
                        }
                    }
                }
                b'[' => self.bracket_atom()?,
                _ => self.organic_atom()?,
            }
        }
        self.finish()
    }

    fn ring_closure(&mut self, number: u32, position: usize) -> Result<(), SmilesError> {
        let here = match self.prev {
            Some(a) => a,
            None => {
                return Err(SmilesError::Syntax {
                    position,
                    message: "ring closure before any atom",
                })
            }
        };
        let pending = self.pending_bond.take();
        if let Some((other, open_bond, open_pos)) = self.open_rings.remove(&number) {
            if other == here {
                return Err(SmilesError::Syntax {
                    position,
                    message: "ring bond connects an atom to itself",
                });
            }
            let order = match (open_bond, pending.map(|(o, _)| o)) {
                (Some(a), Some(b)) if a != b => {
                    return Err(SmilesError::Syntax {
                        position,
                        message: "ring bond order conflicts with its opening",
                    })
                }
                (Some(a), _) => Some(a),
                (None, b) => b,
            };
            self.add_bond(other, here, order, position)?;
            let _ = open_pos;
        } else {
            self.open_rings
                .insert(number, (here, pending.map(|(o, _)| o), position));
        }
        Ok(())
    }

    fn add_bond(
        &mut self,
        a: usize,
        b: usize,
        explicit: Option<BondOrder>,
        position: usize,
    ) -> Result<(), SmilesError> {
        let key = (a.min(b), a.max(b));
        if !self.bond_set.insert(key) {
            return Err(SmilesError::Syntax {
                position,
                message: "duplicate bond between the same atoms",
            });
        }
        let both_aromatic = self.atoms[a].aromatic && self.atoms[b].aromatic;
        let order = match explicit {
            Some(BondOrder::Aromatic) if !both_aromatic => {
                return Err(SmilesError::Syntax {
                    position,
                    message: "aromatic bond requires aromatic atoms on both ends",
                })
            }
            Some(o) => o,
            None => {
                if both_aromatic {
                    BondOrder::Aromatic
                } else {
                    BondOrder::Single
                }
            }
        };
        self.bonds.push(Bond { a, b, order });
        Ok(())
    }

    fn push_atom(&mut self, atom: DraftAtom) -> Result<(), SmilesError> {
        let position = atom.position;
        self.atoms.push(atom);
        let idx = self.atoms.len() - 1;
        if let Some(prev) = self.prev {
            let pending = self.pending_bond.take().map(|(o, _)| o);
            self.add_bond(prev, idx, pending, position)?;
        } else if let Some((_, bpos)) = self.pending_bond.take() {
            return Err(SmilesError::Syntax {
                position: bpos,
                message: "bond symbol before any atom",
            });
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<(), SmilesError> {
        let position = self.here();
        let b = self.bump().unwrap();
        let (element, aromatic) = match b {
            b'C' => {
                if self.peek() == Some(b'l') {
                    self.bump();
                    (Element::Cl, false)
                } else {
                    (Element::C, false)
                }
            }
            b'B' => {
                if self.peek() == Some(b'r') {
                    self.bump();
                    (Element::Br, false)
                } else {
                    return Err(SmilesError::UnknownElement { position });
                }
            }
            b'N' => (Element::N, false),
            b'O' => (Element::O, false),
            b'F' => (Element::F, false),
            b'S' => (Element::S, false),
            b'P' => (Element::P, false),
            b'I' => (Element::I, false),
            b'c' => (Element::C, true),
            b'n' => (Element::N, true),
            b'o' => (Element::O, true),
            b's' => (Element::S, true),
            b'p' => (Element::P, true),
            _ => return Err(SmilesError::UnknownElement { position }),
        };
        self.push_atom(DraftAtom {
            element,
            charge: 0,
            aromatic,
            explicit_h: None,
            position,
        })
    }

    fn bracket_atom(&mut self) -> Result<(), SmilesError> {
        let open_position = self.here();
        self.bump(); // '['

        if matches!(self.peek(), Some(b'0'..=b'9')) {
            return Err(SmilesError::Unsupported {
                position: self.here(),
                feature: "isotope specification",
            });
        }

        let sym_position = self.here();
        let (element, aromatic) = match self.bump() {
            Some(b'C') => {
                if self.peek() == Some(b'l') {
                    self.bump();
                    (Element::Cl, false)
                } else {
                    (Element::C, false)
                }
            }
            Some(b'B') => {
                if self.peek() == Some(b'r') {
                    self.bump();
                    (Element::Br, false)
                } else {
                    return Err(SmilesError::UnknownElement {
                        position: sym_position,
                    });
                }
            }
            Some(b'N') => (Element::N, false),
            Some(b'O') => (Element::O, false),
            Some(b'F') => (Element::F, false),
            Some(b'S') => (Element::S, false),
            Some(b'P') => (Element::P, false),
            Some(b'I') => (Element::I, false),
            Some(b'H') => (Element::H, false),
            Some(b'c') => (Element::C, true),
            Some(b'n') => (Element::N, true),
            Some(b'o') => (Element::O, true),
            Some(b's') => (Element::S, true),
            Some(b'p') => (Element::P, true),
            Some(b'*') => {
                return Err(SmilesError::Unsupported {
                    position: sym_position,
                    feature: "wildcard atom",
                })
            }
            Some(_) => {
                return Err(SmilesError::UnknownElement {
                    position: sym_position,
                })
            }
            None => {
                return Err(SmilesError::UnbalancedBracket {
                    position: open_position,
                })
            }
        };

        if self.peek() == Some(b'@') {
            return Err(SmilesError::Unsupported {
                position: self.here(),
                feature: "tetrahedral stereochemistry",
            });
        }

        // Explicit hydrogen count. A bare standalone [H] atom carries none.
        let mut hydrogens = 0u8;
        if element != Element::H && self.peek() == Some(b'H') {
            self.bump();
            hydrogens = 1;
            if let Some(d @ b'0'..=b'9') = self.peek() {
                self.bump();
                hydrogens = d - b'0';
            }
        }

        let mut charge: i8 = 0;
        match self.peek() {
            Some(sign @ (b'+' | b'-')) => {
                let unit: i8 = if sign == b'+' { 1 } else { -1 };
                self.bump();
                charge = unit;
                if let Some(d @ b'1'..=b'9') = self.peek() {
                    self.bump();
                    charge = unit * (d - b'0') as i8;
                } else {
                    while self.peek() == Some(sign) {
                        self.bump();
                        charge += unit;
                    }
                }
            }
            _ => {}
        }

        if self.peek() == Some(b':') {
            return Err(SmilesError::Unsupported {
                position: self.here(),
                feature: "atom class",
            });
        }
        match self.bump() {
            Some(b']') => {}
            _ => {
                return Err(SmilesError::UnbalancedBracket {
                    position: open_position,
                })
            }
        }

        self.push_atom(DraftAtom {
            element,
            charge,
            aromatic,
            explicit_h: Some(hydrogens),
            position: sym_position,
        })
    }

    fn finish(self) -> Result<Molecule, SmilesError> {
        if let Some((_, position)) = self.pending_bond {
            return Err(SmilesError::Syntax {
                position,
                message: "dangling bond at end of input",
            });
        }
        if let Some(&(_, position)) = self.branch_stack.first() {
            return Err(SmilesError::UnbalancedBracket { position });
        }
        if let Some((&digit, &(_, _, position))) = self
            .open_rings
            .iter()
            .min_by_key(|(_, &(_, _, position))| position)
        {
            return Err(SmilesError::UnclosedRing { digit, position });
        }
        if self.atoms.is_empty() {
            return Err(SmilesError::Empty);
        }

        // Resolve hydrogen counts and run the valence check with positions.
        let n = self.atoms.len();
        let mut orders: Vec<Vec<BondOrder>> = vec![Vec::new(); n];
        for bond in &self.bonds {
            orders[bond.a].push(bond.order);
            orders[bond.b].push(bond.order);
        }
        let mut atoms = Vec::with_capacity(n);
        for (i, draft) in self.atoms.iter().enumerate() {
            let units =
                super::explicit_units(draft.element, draft.explicit_h, orders[i].iter().copied());
            let implicit_h = match draft.explicit_h {
                Some(h) => h,
                None => {
                    infer_implicit_h(draft.element, draft.charge, units).ok_or(
                        SmilesError::ValenceViolation {
                            position: draft.position,
                            element: draft.element,
                            charge: draft.charge,
                            units,
                            hydrogens: 0,
                        },
                    )?
                }
            };
            let total = units + implicit_h as i32;
            let allowed = super::allowed_valences(draft.element, draft.charge);
            if !allowed.iter().any(|&v| total <= v) {
                return Err(SmilesError::ValenceViolation {
                    position: draft.position,
                    element: draft.element,
                    charge: draft.charge,
                    units,
                    hydrogens: implicit_h,
                });
            }
            atoms.push(Atom {
                element: draft.element,
                charge: draft.charge,
                implicit_h,
                aromatic: draft.aromatic,
            });
        }

        Molecule::new(atoms, self.bonds, None).map_err(|_| SmilesError::Syntax {
            position: 1,
            message: "inconsistent molecular graph",
        })
    }
}

/// Parse a SMILES string into a valence-checked [`Molecule`].
pub fn parse_smiles(input: &str) -> Result<Molecule, SmilesError> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Err(SmilesError::Empty);
    }
    Parser::new(trimmed).run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn methane() {
        let mol = parse_smiles("C").unwrap();
        assert_eq!(mol.atom_count(), 1);
        assert_eq!(mol.bond_count(), 0);
        assert_eq!(mol.atoms()[0].element, Element::C);
        assert_eq!(mol.atoms()[0].implicit_h, 4);
    }

    #[test]
    fn cyclopropane() {
        let mol = parse_smiles("C1CC1").unwrap();
        assert_eq!(mol.atom_count(), 3);
        assert_eq!(mol.bond_count(), 3);
        assert!(mol
            .bonds()
            .iter()
            .all(|b| b.order == BondOrder::Single));
        assert_eq!(mol.ring_count(), 1);
    }

    #[test]
    fn unbalanced_branch_position() {
        let err = parse_smiles("C(").unwrap_err();
        assert_eq!(
            err,
            SmilesError::UnbalancedBracket { position: 2 }
        );
    }

    #[test]
    fn benzene_is_aromatic() {
        let mol = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(mol.atom_count(), 6);
        assert_eq!(mol.bond_count(), 6);
        assert!(mol.atoms().iter().all(|a| a.aromatic && a.implicit_h == 1));
        assert!(mol
            .bonds()
            .iter()
            .all(|b| b.order == BondOrder::Aromatic));
    }

    #[test]
    fn bracket_atoms_carry_charge_and_h() {
        let mol = parse_smiles("[NH4+]").unwrap();
        let atom = mol.atoms()[0];
        assert_eq!(atom.element, Element::N);
        assert_eq!(atom.charge, 1);
        assert_eq!(atom.implicit_h, 4);

        let mol = parse_smiles("[O-]").unwrap();
        assert_eq!(mol.atoms()[0].charge, -1);
        assert_eq!(mol.atoms()[0].implicit_h, 0);

        let mol = parse_smiles("[N+2]").unwrap();
        assert_eq!(mol.atoms()[0].charge, 2);
    }

    #[test]
    fn stereo_and_isotopes_rejected() {
        assert!(matches!(
            parse_smiles("[C@@H](N)C"),
            Err(SmilesError::Unsupported { position: 3, .. })
        ));
        assert!(matches!(
            parse_smiles("[13C]"),
            Err(SmilesError::Unsupported { position: 2, .. })
        ));
        assert!(matches!(
            parse_smiles("F/C=C/F"),
            Err(SmilesError::Unsupported { position: 2, .. })
        ));
    }

    #[test]
    fn unclosed_ring_reports_opening() {
        let err = parse_smiles("C1CC").unwrap_err();
        assert_eq!(
            err,
            SmilesError::UnclosedRing {
                digit: 1,
                position: 2
            }
        );
    }

    #[test]
    fn percent_ring_closures() {
        let mol = parse_smiles("C%10CC%10").unwrap();
        assert_eq!(mol.bond_count(), 3);
    }

    #[test]
    fn valence_violation_positions() {
        // Pentavalent carbon.
        let err = parse_smiles("C(C)(C)(C)(C)C").unwrap_err();
        assert!(matches!(err, SmilesError::ValenceViolation { .. }));
        // Texas nitrogen in brackets.
        let err = parse_smiles("[NH5]").unwrap_err();
        assert!(matches!(
            err,
            SmilesError::ValenceViolation { position: 2, .. }
        ));
    }

    #[test]
    fn sulfur_hypervalence_allowed() {
        // Sulfate-like S(=O)(=O) with two more oxygens: valence 6.
        let mol = parse_smiles("OS(=O)(=O)O").unwrap();
        assert_eq!(mol.atom_count(), 5);
        // Sulfoxide-style valence 4.
        assert!(parse_smiles("CS(=O)C").is_ok());
    }

    #[test]
    fn unknown_element_position() {
        let err = parse_smiles("CCX").unwrap_err();
        assert_eq!(err, SmilesError::UnknownElement { position: 3 });
    }

    #[test]
    fn every_error_carries_a_position_within_input() {
        let cases = [
            "C(", "CCX", "C1CC", "C=(C)", "[NH5]", "C%1C", "[C@@H]", ".C", "C=", "[Zn]",
        ];
        for input in cases {
            let err = parse_smiles(input).unwrap_err();
            let pos = err.position();
            assert!(
                pos >= 1 && pos <= input.len(),
                "{input:?}: position {pos} outside 1..={}",
                input.len()
            );
        }
    }

    #[test]
    fn fused_aromatic_rings() {
        // Naphthalene: junction carbons carry three aromatic bonds.
        let mol = parse_smiles("c1ccc2ccccc2c1").unwrap();
        assert_eq!(mol.atom_count(), 10);
        assert_eq!(mol.bond_count(), 11);
        assert_eq!(mol.ring_count(), 2);
        let junctions = (0..10)
            .filter(|&i| mol.degree(i) == 3)
            .collect::<Vec<_>>();
        assert_eq!(junctions.len(), 2);
        for j in junctions {
            assert_eq!(mol.atoms()[j].implicit_h, 0);
        }
    }
}

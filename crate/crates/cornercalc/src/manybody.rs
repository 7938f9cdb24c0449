//! Exact rational subspace arrangements and their compactified corner
//! combinatorics.
//!
//! An [`Arrangement`] is an intersection-closed family of linear subspaces
//! of `Q^n` containing the zero subspace and the whole space, each stored
//! as a reduced-row-echelon basis. Radially compactifying the ambient space
//! and blowing up the subspace boundaries in order of size yields a
//! manifold whose boundary hypersurfaces are the nonzero subspaces ordered
//! by inclusion; [`mb_space`] builds that interior-minimal corner complex
//! directly, together with the fibration each hypersurface carries: its
//! fiber is the compactification of the quotient arrangement
//! ([`quotient_arrangement`]) and its base is indexed by the subspaces
//! strictly inside it.
//!
//! [`mb_product_check`] verifies, arrangement by arrangement, that the
//! ordered product of two such compactifications is isomorphic to the
//! compactification of the product arrangement `{S ⊕ T}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::corners::CornersSpace;
use crate::products::{maximal_chains, PairLabel, ProductSpace};
use crate::ratmat::{canonical_rowspace, in_rowspace, intersect_rowspaces};
use crate::{Error, Label, Result};

/// A linear subspace of `Q^ambient_dim`, stored as the reduced row echelon
/// basis of its row space (no zero rows); two subspaces are equal exactly
/// when their stored bases are.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subspace {
    rows: Vec<Vec<BigRational>>,
}

impl Subspace {
    /// Canonicalizes spanning rows into a subspace of `Q^ambient_dim`.
    pub fn new(ambient_dim: usize, rows: Vec<Vec<BigRational>>) -> Result<Subspace> {
        for row in &rows {
            if row.len() != ambient_dim {
                return Err(Error::InvalidArrangement(format!(
                    "spanning row of length {} in ambient dimension {ambient_dim}",
                    row.len()
                )));
            }
        }
        Ok(Subspace {
            rows: canonical_rowspace(&rows),
        })
    }

    /// The zero subspace.
    pub fn zero() -> Subspace {
        Subspace { rows: Vec::new() }
    }

    /// The whole ambient space.
    pub fn full(ambient_dim: usize) -> Subspace {
        let rows = (0..ambient_dim)
            .map(|i| {
                (0..ambient_dim)
                    .map(|j| {
                        if i == j {
                            BigRational::from_integer(1.into())
                        } else {
                            BigRational::from_integer(0.into())
                        }
                    })
                    .collect()
            })
            .collect();
        Subspace { rows }
    }

    /// Convenience constructor from integer spanning rows.
    pub fn from_int_rows(ambient_dim: usize, rows: &[&[i64]]) -> Result<Subspace> {
        Subspace::new(
            ambient_dim,
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&n| BigRational::from_integer(n.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The canonical basis rows.
    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    /// True when `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| in_rowspace(&self.rows, r))
    }

    pub fn intersect(&self, other: &Subspace, ambient_dim: usize) -> Subspace {
        Subspace {
            rows: intersect_rowspaces(&self.rows, &other.rows, ambient_dim),
        }
    }

    /// The smallest subspace containing both.
    pub fn join_with(&self, other: &Subspace) -> Subspace {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Subspace {
            rows: canonical_rowspace(&rows),
        }
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let entries: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", entries.join(" "))
            })
            .collect();
        write!(f, "span({})", rows.join(", "))
    }
}

/// An intersection-closed family of subspaces containing the zero subspace
/// and the whole space, canonically ordered by (dimension, basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    ambient_dim: usize,
    subspaces: Vec<Subspace>,
}

impl Arrangement {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// All subspaces, sorted by (dimension, canonical basis); the zero
    /// subspace first, the whole space last.
    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn contains(&self, s: &Subspace) -> bool {
        self.subspaces.contains(s)
    }

    /// Restriction to the subspaces contained in `s`, an arrangement on the
    /// same ambient space with `s` as its largest member.
    pub fn restricted_to(&self, s: &Subspace) -> Result<Arrangement> {
        if !self.contains(s) {
            return Err(Error::InvalidArrangement(format!(
                "{s} is not a member of the arrangement"
            )));
        }
        let subspaces: Vec<Subspace> = self
            .subspaces
            .iter()
            .filter(|t| s.contains(t))
            .cloned()
            .collect();
        Ok(Arrangement {
            ambient_dim: self.ambient_dim,
            subspaces,
        })
    }
}

fn sort_key(s: &Subspace) -> (usize, Vec<Vec<BigRational>>) {
    (s.dim(), s.rows.clone())
}

/// The smallest intersection-closed arrangement containing the given
/// subspaces, the zero subspace, and the whole space.
pub fn close_arrangement(
    ambient_dim: usize,
    raw: impl IntoIterator<Item = Subspace>,
) -> Result<Arrangement> {
    let mut set: BTreeSet<Subspace> = BTreeSet::new();
    set.insert(Subspace::zero());
    set.insert(Subspace::full(ambient_dim));
    for s in raw {
        for row in &s.rows {
            if row.len() != ambient_dim {
                return Err(Error::InvalidArrangement(format!(
                    "subspace row of length {} in ambient dimension {ambient_dim}",
                    row.len()
                )));
            }
        }
        set.insert(s);
    }
    loop {
        let members: Vec<Subspace> = set.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                grew |= set.insert(a.intersect(b, ambient_dim));
            }
        }
        if !grew {
            break;
        }
    }
    let mut subspaces: Vec<Subspace> = set.into_iter().collect();
    subspaces.sort_by_key(sort_key);
    Ok(Arrangement {
        ambient_dim,
        subspaces,
    })
}

/// The fibration carried by one hypersurface of a compactified arrangement:
/// the fiber is the compactification of the quotient arrangement, the base
/// is indexed by the subspaces strictly inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MbFibration {
    pub fiber: Arrangement,
    pub base_index: BTreeSet<Label>,
}

/// The compactification of an arrangement: an interior-minimal corner
/// complex whose hypersurfaces are the nonzero subspaces ordered by strict
/// inclusion, with corners the inclusion chains, plus per-hypersurface
/// fibration data and the label dictionary.
#[derive(Clone, Debug)]
pub struct MbSpace {
    arrangement: Arrangement,
    space: CornersSpace,
    labels: BTreeMap<Label, Subspace>,
    fibrations: BTreeMap<Label, MbFibration>,
}

impl MbSpace {
    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn space(&self) -> &CornersSpace {
        &self.space
    }

    pub fn subspace(&self, label: &Label) -> Option<&Subspace> {
        self.labels.get(label)
    }

    pub fn label_of(&self, s: &Subspace) -> Option<Label> {
        self.labels
            .iter()
            .find(|(_, t)| *t == s)
            .map(|(l, _)| l.clone())
    }

    pub fn fibration(&self, label: &Label) -> Option<&MbFibration> {
        self.fibrations.get(label)
    }

    pub fn fibrations(&self) -> &BTreeMap<Label, MbFibration> {
        &self.fibrations
    }
}

/// Builds the compactified corner complex of a closed arrangement. The
/// interior is the zero subspace; every nonzero subspace contributes one
/// hypersurface above it; two hypersurfaces are comparable — and incident —
/// exactly when the subspaces are nested.
pub fn mb_space(arrangement: &Arrangement) -> Result<MbSpace> {
    let named: Vec<(Label, Subspace)> = arrangement
        .subspaces
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let label = if s.dim() == 0 {
                Label::new("0")
            } else {
                Label::new(format!("S{i}"))
            };
            (label, s.clone())
        })
        .collect();
    let interior = Label::new("0");
    let hypersurfaces: Vec<Label> = named
        .iter()
        .filter(|(_, s)| s.dim() > 0)
        .map(|(l, _)| l.clone())
        .collect();
    let mut order = Vec::new();
    for (la, sa) in &named {
        for (lb, sb) in &named {
            if la != lb && sb.contains(sa) {
                order.push((la.clone(), lb.clone()));
            }
        }
    }
    let proper: Vec<Label> = hypersurfaces.clone();
    let nested = |a: &Label, b: &Label| -> bool {
        let sa = &named.iter().find(|(l, _)| l == a).expect("named label").1;
        let sb = &named.iter().find(|(l, _)| l == b).expect("named label").1;
        sb.contains(sa)
    };
    let corners: Vec<BTreeSet<Label>> = maximal_chains(&proper, &|a, b| nested(a, b))
        .into_iter()
        .map(|chain| chain.into_iter().collect())
        .collect();
    let space = CornersSpace::new(interior, hypersurfaces, order, corners)?;
    let violations = space.validate();
    if let Some(v) = violations.first() {
        return Err(Error::ConstructionMismatch(format!(
            "compactified arrangement is not an ordered corners space: {v}"
        )));
    }
    let labels: BTreeMap<Label, Subspace> = named
        .iter()
        .filter(|(_, s)| s.dim() > 0)
        .cloned()
        .collect();
    let mut fibrations = BTreeMap::new();
    for (label, s) in &labels {
        let fiber = quotient_arrangement(arrangement, s)?;
        let base_index: BTreeSet<Label> = labels
            .iter()
            .filter(|(l, t)| *l != label && s.contains(t))
            .map(|(l, _)| l.clone())
            .collect();
        fibrations.insert(label.clone(), MbFibration { fiber, base_index });
    }
    Ok(MbSpace {
        arrangement: arrangement.clone(),
        space,
        labels,
        fibrations,
    })
}

/// The induced arrangement on the quotient by a member subspace, presented
/// in the coordinates of the non-pivot ambient axes of `s` (which project
/// isomorphically onto the quotient), re-closed and canonicalized.
pub fn quotient_arrangement(arrangement: &Arrangement, s: &Subspace) -> Result<Arrangement> {
    if !arrangement.contains(s) {
        return Err(Error::InvalidArrangement(format!(
            "{s} is not a member of the arrangement"
        )));
    }
    let n = arrangement.ambient_dim;
    let pivots: Vec<usize> = s
        .rows
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("no zero rows"))
        .collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    // Reduce a vector modulo s by clearing its pivot coordinates, then read
    // off the free coordinates.
    let project = |v: &[BigRational]| -> Vec<BigRational> {
        let mut w = v.to_vec();
        for (row, &p) in s.rows.iter().zip(&pivots) {
            let c = w[p].clone();
            if !c.is_zero() {
                for (wi, ri) in w.iter_mut().zip(row) {
                    *wi -= &c * ri;
                }
            }
        }
        free.iter().map(|&c| w[c].clone()).collect()
    };
    let mut images = Vec::new();
    for t in &arrangement.subspaces {
        let rows: Vec<Vec<BigRational>> = t.rows.iter().map(|r| project(r)).collect();
        images.push(Subspace::new(free.len(), rows)?);
    }
    close_arrangement(free.len(), images)
}

/// The product arrangement `{S ⊕ T}` on the concatenated ambient space.
pub fn product_arrangement(a: &Arrangement, b: &Arrangement) -> Result<Arrangement> {
    let dim = a.ambient_dim + b.ambient_dim;
    let zero_rat = BigRational::from_integer(0.into());
    let mut members = Vec::new();
    for s in &a.subspaces {
        for t in &b.subspaces {
            let mut rows: Vec<Vec<BigRational>> = Vec::new();
            for r in &s.rows {
                let mut row = r.clone();
                row.extend(std::iter::repeat(zero_rat.clone()).take(b.ambient_dim));
                rows.push(row);
            }
            for r in &t.rows {
                let mut row = vec![zero_rat.clone(); a.ambient_dim];
                row.extend(r.iter().cloned());
                rows.push(row);
            }
            members.push(Subspace::new(dim, rows)?);
        }
    }
    close_arrangement(dim, members)
}

/// The verdict of the product-isomorphism check: whether the
/// compactification of the product arrangement is isomorphic, as an ordered
/// corner complex, to the ordered product of the factor compactifications,
/// and the face dictionary realizing it.
#[derive(Clone, Debug)]
pub struct MbProductCheck {
    pub iso: bool,
    /// Hypersurface of the compactified product arrangement → hypersurface
    /// of the ordered product.
    pub witness: BTreeMap<Label, Label>,
    pub product_side: ProductSpace,
    pub arrangement_side: MbSpace,
}

/// Builds both sides of the product isomorphism and compares them: each
/// subspace `S ⊕ T` must correspond to the product face `(S, T)` with the
/// same order and incidence.
pub fn mb_product_check(a: &Arrangement, b: &Arrangement) -> Result<MbProductCheck> {
    let mb_a = mb_space(a)?;
    let mb_b = mb_space(b)?;
    let combined = product_arrangement(a, b)?;
    let arrangement_side = mb_space(&combined)?;
    let product_side = ProductSpace::new(mb_a.space(), mb_b.space())?;
    // Decompose each product-arrangement subspace as S ⊕ T by intersecting
    // with the two factor axes.
    let zero_rat = BigRational::from_integer(0.into());
    let left_axis = Subspace::new(
        a.ambient_dim + b.ambient_dim,
        Subspace::full(a.ambient_dim)
            .rows
            .iter()
            .map(|r| {
                let mut row = r.clone();
                row.extend(std::iter::repeat(zero_rat.clone()).take(b.ambient_dim));
                row
            })
            .collect(),
    )?;
    let right_axis = Subspace::new(
        a.ambient_dim + b.ambient_dim,
        Subspace::full(b.ambient_dim)
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![zero_rat.clone(); a.ambient_dim];
                row.extend(r.iter().cloned());
                row
            })
            .collect(),
    )?;
    let dim = a.ambient_dim + b.ambient_dim;
    let mut witness = BTreeMap::new();
    let mut iso = true;
    for (label, u) in &arrangement_side.labels {
        let s_rows: Vec<Vec<BigRational>> = u
            .intersect(&left_axis, dim)
            .rows
            .iter()
            .map(|r| r[..a.ambient_dim].to_vec())
            .collect();
        let t_rows: Vec<Vec<BigRational>> = u
            .intersect(&right_axis, dim)
            .rows
            .iter()
            .map(|r| r[a.ambient_dim..].to_vec())
            .collect();
        let s = Subspace::new(a.ambient_dim, s_rows)?;
        let t = Subspace::new(b.ambient_dim, t_rows)?;
        // Every member of the closed product arrangement splits as S ⊕ T;
        // anything else would falsify the check.
        if s.dim() + t.dim() != u.dim() {
            iso = false;
            continue;
        }
        let left = if s.dim() == 0 {
            mb_a.space().interior().clone()
        } else {
            match mb_a.label_of(&s) {
                Some(l) => l,
                None => {
                    iso = false;
                    continue;
                }
            }
        };
        let right = if t.dim() == 0 {
            mb_b.space().interior().clone()
        } else {
            match mb_b.label_of(&t) {
                Some(l) => l,
                None => {
                    iso = false;
                    continue;
                }
            }
        };
        witness.insert(label.clone(), PairLabel { left, right }.encoded());
    }
    let mapped: BTreeSet<&Label> = witness.values().collect();
    let product_hyps = product_side.space().hypersurfaces();
    iso = iso
        && witness.len() == arrangement_side.labels.len()
        && mapped.len() == witness.len()
        && mapped.iter().all(|l| product_hyps.contains(l))
        && product_hyps.len() == witness.len();
    if iso {
        // Order isomorphism both ways.
        for (la, _) in &arrangement_side.labels {
            for (lb, _) in &arrangement_side.labels {
                if la == lb {
                    continue;
                }
                let left = arrangement_side.space().order().less(la, lb);
                let right = product_side.space().order().less(&witness[la], &witness[lb]);
                if left != right {
                    iso = false;
                }
            }
        }
        // Corner isomorphism.
        let mapped_corners: BTreeSet<BTreeSet<Label>> = arrangement_side
            .space()
            .corners()
            .iter()
            .map(|c| c.iter().map(|l| witness[l].clone()).collect())
            .collect();
        if mapped_corners != *product_side.space().corners() {
            iso = false;
        }
    }
    Ok(MbProductCheck {
        iso,
        witness,
        product_side,
        arrangement_side,
    })
}

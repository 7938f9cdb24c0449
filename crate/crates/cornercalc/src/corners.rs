//! The combinatorial model of a manifold with ordered corners and its
//! blown-up states.
//!
//! A space is described by its boundary hypersurface labels, a strict partial
//! order on them together with a designated interior element, and the corner
//! complex recording which hypersurfaces mutually intersect. The ordered
//! axiom — incomparable faces must be disjoint — makes every corner a totally
//! ordered chain. A blown-up state attaches a fan to every maximal corner;
//! fans agree on shared faces, and rays equal as global lattice vectors are
//! one blown-up hypersurface.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::monoid_fan::{Cone, Fan, MonoidVector};
use crate::{Error, Label, Result};

/// Strict partial order stored transitively closed, so chain checks are
/// subset checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialOrder {
    pairs: BTreeSet<(Label, Label)>,
}

impl PartialOrder {
    /// Transitively closes the given `a < b` pairs; rejects cycles.
    pub fn new(pairs: impl IntoIterator<Item = (Label, Label)>) -> Result<PartialOrder> {
        let mut set: BTreeSet<(Label, Label)> = pairs.into_iter().collect();
        loop {
            let mut added = Vec::new();
            for (a, b) in &set {
                for (c, d) in &set {
                    if b == c && !set.contains(&(a.clone(), d.clone())) {
                        added.push((a.clone(), d.clone()));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            set.extend(added);
        }
        for (a, b) in &set {
            if a == b {
                return Err(Error::InvalidSpace(format!("order has a cycle through {a}")));
            }
            if set.contains(&(b.clone(), a.clone())) {
                return Err(Error::InvalidSpace(format!(
                    "order has a cycle between {a} and {b}"
                )));
            }
        }
        Ok(PartialOrder { pairs: set })
    }

    pub fn less(&self, a: &Label, b: &Label) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn comparable(&self, a: &Label, b: &Label) -> bool {
        a == b || self.less(a, b) || self.less(b, a)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Label, Label)> {
        self.pairs.iter()
    }

    /// Covering pairs: a < b with nothing strictly between.
    pub fn covers(&self) -> Vec<(Label, Label)> {
        self.pairs
            .iter()
            .filter(|(a, b)| {
                !self
                    .pairs
                    .iter()
                    .any(|(c, d)| a == c && self.less(d, b) && d != b && d != a)
            })
            .cloned()
            .collect()
    }
}

/// A violation of the ordered-corners axioms, reported as data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Two hypersurfaces share a corner but are incomparable.
    IncomparableIntersection {
        simplex: BTreeSet<Label>,
        pair: (Label, Label),
    },
    /// A hypersurface is incomparable to the interior element.
    InteriorIncomparable { hypersurface: Label },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IncomparableIntersection { simplex, pair } => {
                write!(
                    f,
                    "incomparable hypersurfaces {} and {} share the corner {{{}}}",
                    pair.0,
                    pair.1,
                    simplex
                        .iter()
                        .map(Label::as_str)
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            }
            Violation::InteriorIncomparable { hypersurface } => {
                write!(f, "hypersurface {hypersurface} is incomparable to the interior")
            }
        }
    }
}

/// A manifold with ordered corners, combinatorially: hypersurface labels, a
/// strict partial order on hypersurfaces and the interior element, and the
/// corner complex (simplices = sets of hypersurfaces with nonempty mutual
/// intersection, closed under subsets).
///
/// Construction only enforces well-formedness (known labels, acyclic order,
/// subset-closed complex); the ordered-corners axioms are checked by
/// [`validate`](Self::validate), which reports violations as data so that
/// not-yet-resolved products can be represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornersSpace {
    interior: Label,
    hypersurfaces: BTreeSet<Label>,
    order: PartialOrder,
    corners: BTreeSet<BTreeSet<Label>>,
}

impl CornersSpace {
    pub fn new(
        interior: Label,
        hypersurfaces: impl IntoIterator<Item = Label>,
        order: impl IntoIterator<Item = (Label, Label)>,
        corners: impl IntoIterator<Item = BTreeSet<Label>>,
    ) -> Result<CornersSpace> {
        let hypersurfaces: BTreeSet<Label> = hypersurfaces.into_iter().collect();
        if hypersurfaces.contains(&interior) {
            return Err(Error::InvalidSpace(format!(
                "interior {interior} is also listed as a hypersurface"
            )));
        }
        let known = |l: &Label| *l == interior || hypersurfaces.contains(l);
        let order_pairs: Vec<(Label, Label)> = order.into_iter().collect();
        for (a, b) in &order_pairs {
            if !known(a) || !known(b) {
                return Err(Error::InvalidSpace(format!(
                    "order pair {a} < {b} mentions an unknown label"
                )));
            }
        }
        let order = PartialOrder::new(order_pairs)?;
        // Close the complex under subsets; every hypersurface is itself a
        // nonempty face, so singletons (and the empty simplex) are always in.
        let mut closed: BTreeSet<BTreeSet<Label>> = BTreeSet::new();
        closed.insert(BTreeSet::new());
        for h in &hypersurfaces {
            closed.insert(BTreeSet::from([h.clone()]));
        }
        for simplex in corners {
            for l in &simplex {
                if !hypersurfaces.contains(l) {
                    return Err(Error::InvalidSpace(format!(
                        "corner simplex mentions unknown hypersurface {l}"
                    )));
                }
            }
            let elems: Vec<Label> = simplex.iter().cloned().collect();
            for mask in 0..1u64 << elems.len() {
                closed.insert(
                    elems
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, l)| l.clone())
                        .collect(),
                );
            }
        }
        Ok(CornersSpace {
            interior,
            hypersurfaces,
            order,
            corners: closed,
        })
    }

    /// A totally ordered space: every pair of hypersurfaces intersects, and
    /// the interior sits between `below` and `above` (each listed ascending).
    pub fn total_chain(interior: Label, below: &[Label], above: &[Label]) -> Result<CornersSpace> {
        let all: Vec<Label> = below.iter().chain(above).cloned().collect();
        let mut ranked: Vec<Label> = below.to_vec();
        ranked.push(interior.clone());
        ranked.extend(above.iter().cloned());
        let mut order = Vec::new();
        for i in 0..ranked.len() {
            for j in i + 1..ranked.len() {
                order.push((ranked[i].clone(), ranked[j].clone()));
            }
        }
        CornersSpace::new(
            interior,
            all.clone(),
            order,
            [all.into_iter().collect::<BTreeSet<Label>>()],
        )
    }

    /// A space with no boundary at all.
    pub fn point(interior: Label) -> CornersSpace {
        CornersSpace::new(interior, [], [], []).expect("point space is well-formed")
    }

    pub fn interior(&self) -> &Label {
        &self.interior
    }

    pub fn hypersurfaces(&self) -> &BTreeSet<Label> {
        &self.hypersurfaces
    }

    pub fn order(&self) -> &PartialOrder {
        &self.order
    }

    pub fn corners(&self) -> &BTreeSet<BTreeSet<Label>> {
        &self.corners
    }

    /// Hypersurfaces strictly below the interior element.
    pub fn below_interior(&self) -> Vec<Label> {
        self.hypersurfaces
            .iter()
            .filter(|h| self.order.less(h, &self.interior))
            .cloned()
            .collect()
    }

    /// Hypersurfaces strictly above the interior element.
    pub fn above_interior(&self) -> Vec<Label> {
        self.hypersurfaces
            .iter()
            .filter(|h| self.order.less(&self.interior, h))
            .cloned()
            .collect()
    }

    /// Simplices not strictly contained in another simplex.
    pub fn maximal_simplices(&self) -> Vec<BTreeSet<Label>> {
        self.corners
            .iter()
            .filter(|s| {
                !self
                    .corners
                    .iter()
                    .any(|t| t.len() > s.len() && s.is_subset(t))
            })
            .cloned()
            .collect()
    }

    /// Size of the deepest corner.
    pub fn depth(&self) -> usize {
        self.corners.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Members of a chain simplex sorted ascending by the space's order.
    /// Requires the simplex to be totally ordered.
    pub fn chain_sorted(&self, simplex: &BTreeSet<Label>) -> Result<Vec<Label>> {
        let mut v: Vec<Label> = simplex.iter().cloned().collect();
        for a in &v {
            for b in &v {
                if a != b && !self.order.comparable(a, b) {
                    return Err(Error::InvalidSpace(format!(
                        "{a} and {b} are incomparable; the simplex is not a chain"
                    )));
                }
            }
        }
        v.sort_by(|a, b| {
            if self.order.less(a, b) {
                std::cmp::Ordering::Less
            } else if self.order.less(b, a) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        });
        Ok(v)
    }

    /// Checks the ordered-corners axioms, reporting each breach.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        for simplex in &self.corners {
            let elems: Vec<&Label> = simplex.iter().collect();
            for (i, a) in elems.iter().enumerate() {
                for b in &elems[i + 1..] {
                    if !self.order.comparable(a, b) {
                        violations.push(Violation::IncomparableIntersection {
                            simplex: simplex.clone(),
                            pair: ((*a).clone(), (*b).clone()),
                        });
                    }
                }
            }
        }
        for h in &self.hypersurfaces {
            if !self.order.comparable(h, &self.interior) {
                violations.push(Violation::InteriorIncomparable {
                    hypersurface: h.clone(),
                });
            }
        }
        violations
    }

    /// The coarsest suborder forced by the geometry: keep `a < b` only when
    /// the two faces intersect or one of them is the interior, then close
    /// transitively. Extra comparabilities between disjoint faces are
    /// conventions, not geometric facts, and are dropped.
    pub fn minimal_suborder(&self) -> Result<CornersSpace> {
        let touching = |a: &Label, b: &Label| {
            *a == self.interior
                || *b == self.interior
                || self
                    .corners
                    .contains(&BTreeSet::from([a.clone(), b.clone()]))
        };
        let kept = self
            .order
            .pairs()
            .filter(|(a, b)| touching(a, b))
            .cloned()
            .collect::<Vec<_>>();
        CornersSpace::new(
            self.interior.clone(),
            self.hypersurfaces.iter().cloned(),
            kept,
            self.corners.iter().cloned(),
        )
    }
}

/// A blown-up state of a [`CornersSpace`]: one fan per maximal corner, all
/// agreeing on shared faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedSpace {
    base: CornersSpace,
    fans: BTreeMap<BTreeSet<Label>, Fan>,
}

/// Trivial refinement of a validated space: every maximal corner carries the
/// full orthant cone on its unit generators.
pub fn initial_refinement(space: &CornersSpace) -> Result<RefinedSpace> {
    let violations = space.validate();
    if let Some(v) = violations.first() {
        return Err(Error::InvalidSpace(format!(
            "space does not satisfy the ordered-corners axioms: {v} ({} violation(s) total)",
            violations.len()
        )));
    }
    Ok(trivial_refinement_unchecked(space))
}

/// Trivial refinement without the ordered-corners axioms.
///
/// Blow-ups and the sign analysis of rational combinations are meaningful on
/// plain manifolds with corners, where no hypersurface order is imposed; use
/// [`initial_refinement`] when the ordered axioms are required downstream.
pub fn plain_refinement(space: &CornersSpace) -> RefinedSpace {
    trivial_refinement_unchecked(space)
}

/// Like [`initial_refinement`] but skipping the ordered-corners axioms, for
/// intermediate states (e.g. a cartesian product before resolution).
pub(crate) fn trivial_refinement_unchecked(space: &CornersSpace) -> RefinedSpace {
    let fans = space
        .maximal_simplices()
        .into_iter()
        .map(|s| {
            let fan = Fan::orthant(s.iter().cloned());
            (s, fan)
        })
        .collect();
    RefinedSpace {
        base: space.clone(),
        fans,
    }
}

impl RefinedSpace {
    /// Assembles a refined space from explicit per-corner fans, checking the
    /// shared-face compatibility invariant.
    pub(crate) fn from_parts(
        base: CornersSpace,
        fans: BTreeMap<BTreeSet<Label>, Fan>,
    ) -> Result<RefinedSpace> {
        let r = RefinedSpace { base, fans };
        r.assert_compatible()?;
        Ok(r)
    }

    pub fn base(&self) -> &CornersSpace {
        &self.base
    }

    pub fn fans(&self) -> impl Iterator<Item = (&BTreeSet<Label>, &Fan)> {
        self.fans.iter()
    }

    pub fn fan(&self, simplex: &BTreeSet<Label>) -> Option<&Fan> {
        self.fans.get(simplex)
    }

    /// Blows up the boundary face spanned by `center` in every fan whose
    /// corner supports it. Fails if the center has vanished somewhere it is
    /// supported (an ill-ordered blow-up sequence), or is supported nowhere.
    pub fn blow_up_face(&self, center: &[MonoidVector]) -> Result<RefinedSpace> {
        let center_cone = Cone::new(center.to_vec())?;
        let support = center_cone.support();
        let mut fans = BTreeMap::new();
        let mut touched = false;
        for (simplex, fan) in &self.fans {
            if support.is_subset(simplex) {
                fans.insert(simplex.clone(), fan.star_subdivide(&center_cone)?);
                touched = true;
            } else {
                fans.insert(simplex.clone(), fan.clone());
            }
        }
        if !touched {
            return Err(Error::CenterNotACone(format!(
                "center {center_cone} is not supported on any corner of the space"
            )));
        }
        let result = RefinedSpace {
            base: self.base.clone(),
            fans,
        };
        result.assert_compatible()?;
        Ok(result)
    }

    /// Fans must restrict identically to every shared sub-corner.
    fn assert_compatible(&self) -> Result<()> {
        let keys: Vec<&BTreeSet<Label>> = self.fans.keys().collect();
        for (i, s) in keys.iter().enumerate() {
            for t in &keys[i + 1..] {
                let shared: BTreeSet<Label> = s.intersection(t).cloned().collect();
                let a = self.fans[*s].faces_supported_on(&shared);
                let b = self.fans[*t].faces_supported_on(&shared);
                if a != b {
                    return Err(Error::FanInvariant(format!(
                        "fans on {s:?} and {t:?} disagree on their shared face"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Global blown-up hypersurfaces: rays collected across fans by vector
    /// equality.
    pub fn rays(&self) -> BTreeSet<MonoidVector> {
        self.fans.values().flat_map(Fan::rays).collect()
    }

    /// The face poset of the blown-up space: global rays and the sets that
    /// cospan a cone in some fan.
    pub fn face_poset(&self) -> FacePoset {
        let rays = self.rays();
        let incidence = self
            .fans
            .values()
            .flat_map(|fan| {
                fan.faces()
                    .into_iter()
                    .map(|c| c.generators().iter().cloned().collect::<BTreeSet<_>>())
            })
            .collect();
        FacePoset {
            rays,
            incidence,
            order: None,
        }
    }
}

/// Blown-up hypersurfaces, which of them mutually intersect, and (when one
/// has been derived) the partial order making the blown-up space ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacePoset {
    rays: BTreeSet<MonoidVector>,
    incidence: BTreeSet<BTreeSet<MonoidVector>>,
    order: Option<BTreeSet<(MonoidVector, MonoidVector)>>,
}

impl FacePoset {
    pub fn new(
        rays: BTreeSet<MonoidVector>,
        incidence: BTreeSet<BTreeSet<MonoidVector>>,
        order: Option<BTreeSet<(MonoidVector, MonoidVector)>>,
    ) -> FacePoset {
        FacePoset {
            rays,
            incidence,
            order,
        }
    }

    pub fn rays(&self) -> &BTreeSet<MonoidVector> {
        &self.rays
    }

    pub fn incidence(&self) -> &BTreeSet<BTreeSet<MonoidVector>> {
        &self.incidence
    }

    pub fn order(&self) -> Option<&BTreeSet<(MonoidVector, MonoidVector)>> {
        self.order.as_ref()
    }

    pub fn with_order(mut self, order: BTreeSet<(MonoidVector, MonoidVector)>) -> FacePoset {
        self.order = Some(order);
        self
    }

    pub fn incident(&self, a: &MonoidVector, b: &MonoidVector) -> bool {
        self.incidence
            .contains(&BTreeSet::from([a.clone(), b.clone()]))
    }

    /// Every incidence simplex must be a chain of the order, when present.
    pub fn validate(&self) -> Vec<(MonoidVector, MonoidVector)> {
        let Some(order) = &self.order else {
            return Vec::new();
        };
        let comparable = |a: &MonoidVector, b: &MonoidVector| {
            a == b
                || order.contains(&(a.clone(), b.clone()))
                || order.contains(&(b.clone(), a.clone()))
        };
        let mut bad = Vec::new();
        for simplex in &self.incidence {
            let elems: Vec<&MonoidVector> = simplex.iter().collect();
            for (i, a) in elems.iter().enumerate() {
                for b in &elems[i + 1..] {
                    if !comparable(a, b) {
                        bad.push(((*a).clone(), (*b).clone()));
                    }
                }
            }
        }
        bad.sort();
        bad.dedup();
        bad
    }
}

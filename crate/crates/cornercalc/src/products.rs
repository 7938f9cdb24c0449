//! Ordered products, relative cones, joins, and fiber products of manifolds
//! with ordered corners, computed on corner complexes and their monoid fans.
//!
//! The ordered product `X ⊗ Y` lives over the cartesian corner complex of
//! the factors. Over each product corner its fan has one maximal cone per
//! maximal totally ordered chain of hypersurface pairs `(H, G)` comparable
//! to the pair of interiors, the generator of the chain element being the
//! sum of the two unit generators. The same space arises by blowing up the
//! cartesian product along every pair of hypersurfaces lying on the same
//! side of both interiors — deepest pairs first below the interiors,
//! shallowest first above — and [`ordered_product_blowup`] performs that
//! iterated blow-up and checks it against the chain construction.
//!
//! On top of the product sit:
//!
//! * [`relative_cone`]: a space with one fresh boundary hypersurface added
//!   at the bottom or top of the order, the old hypersurfaces repositioned
//!   against the new interior;
//! * [`join`]: the boundary hypersurface created by blowing up the pair of
//!   fresh faces in a product of two relative cones, cross-checked against
//!   a direct blow-up of `X × Y × I`;
//! * [`ProductSpace::fibration_tags`]: the fiber/base decomposition carried
//!   by every product hypersurface;
//! * [`fiber_product`]: the corner data of the fiber product of two ordered
//!   maps into a common target, with its smoothness functionals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::bmaps::{psub_lift, BMap};
use crate::corners::{trivial_refinement_unchecked, CornersSpace, RefinedSpace};
use crate::monoid_fan::{Cone, Fan, MonoidVector};
use crate::{Error, Label, Result};

/// A boundary hypersurface of a product, named by its two factor
/// components. Either component may be that factor's interior label, but
/// not both: the pair of interiors is the product's interior.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairLabel {
    pub left: Label,
    pub right: Label,
}

impl PairLabel {
    /// The flat label `(left,right)` naming this face in the product's
    /// corner complex.
    pub fn encoded(&self) -> Label {
        Label::new(format!("({},{})", self.left.as_str(), self.right.as_str()))
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left, self.right)
    }
}

/// Namespaced copy of a left-factor label inside a cartesian complex.
pub fn left_label(h: &Label) -> Label {
    Label::new(format!("l:{}", h.as_str()))
}

/// Namespaced copy of a right-factor label inside a cartesian complex.
pub fn right_label(g: &Label) -> Label {
    Label::new(format!("r:{}", g.as_str()))
}

/// A face of a product, as an optional hypersurface per factor (`None` is
/// that factor's interior).
type Elem = (Option<Label>, Option<Label>);

fn factor_le(space: &CornersSpace, a: Option<&Label>, b: Option<&Label>) -> bool {
    let ia = a.unwrap_or_else(|| space.interior());
    let ib = b.unwrap_or_else(|| space.interior());
    ia == ib || space.order().less(ia, ib)
}

fn pair_le(x: &CornersSpace, y: &CornersSpace, a: &Elem, b: &Elem) -> bool {
    factor_le(x, a.0.as_ref(), b.0.as_ref()) && factor_le(y, a.1.as_ref(), b.1.as_ref())
}

fn basepoint_comparable(x: &CornersSpace, y: &CornersSpace, e: &Elem) -> bool {
    let bp: Elem = (None, None);
    pair_le(x, y, e, &bp) || pair_le(x, y, &bp, e)
}

/// The fan generator of a face pair: the sum of the namespaced unit
/// generators of its proper components.
fn elem_vector(e: &Elem) -> MonoidVector {
    let mut parts = Vec::new();
    if let Some(h) = &e.0 {
        parts.push(MonoidVector::unit(left_label(h)));
    }
    if let Some(g) = &e.1 {
        parts.push(MonoidVector::unit(right_label(g)));
    }
    MonoidVector::sum(parts.iter())
}

fn elem_pair(x: &CornersSpace, y: &CornersSpace, e: &Elem) -> PairLabel {
    PairLabel {
        left: e.0.clone().unwrap_or_else(|| x.interior().clone()),
        right: e.1.clone().unwrap_or_else(|| y.interior().clone()),
    }
}

/// Decodes a product-fan ray back into its face pair. Every ray of an
/// ordered product is the sum of at most one generator per side, each with
/// coefficient one.
fn ray_elem(ray: &MonoidVector) -> Result<Elem> {
    let mut left = None;
    let mut right = None;
    for (label, n) in ray.coords() {
        if *n != BigInt::from(1) {
            return Err(Error::ConstructionMismatch(format!(
                "product ray {ray} has a non-unit coefficient"
            )));
        }
        if let Some(h) = label.as_str().strip_prefix("l:") {
            if left.replace(Label::new(h)).is_some() {
                return Err(Error::ConstructionMismatch(format!(
                    "product ray {ray} has two left components"
                )));
            }
        } else if let Some(g) = label.as_str().strip_prefix("r:") {
            if right.replace(Label::new(g)).is_some() {
                return Err(Error::ConstructionMismatch(format!(
                    "product ray {ray} has two right components"
                )));
            }
        } else {
            return Err(Error::ConstructionMismatch(format!(
                "product ray {ray} mentions the non-product label {label}"
            )));
        }
    }
    Ok((left, right))
}

fn require_valid(space: &CornersSpace) -> Result<()> {
    let violations = space.validate();
    if let Some(v) = violations.first() {
        return Err(Error::InvalidSpace(format!(
            "factor is not an ordered corners space: {v} ({} violation(s) total)",
            violations.len()
        )));
    }
    Ok(())
}

/// The cartesian corner complex of two spaces: namespaced copies of the
/// factors' hypersurfaces, products of corners as corners, and the product
/// order on single-factor faces. The result generally violates the chain
/// axiom (faces on opposite sides of the two interiors intersect without
/// being comparable); it is the unresolved space the ordered product
/// refines.
pub fn cartesian_space(x: &CornersSpace, y: &CornersSpace) -> Result<CornersSpace> {
    let interior = PairLabel {
        left: x.interior().clone(),
        right: y.interior().clone(),
    }
    .encoded();
    let mut singles: Vec<(Label, Elem)> = Vec::new();
    for h in x.hypersurfaces() {
        singles.push((left_label(h), (Some(h.clone()), None)));
    }
    for g in y.hypersurfaces() {
        singles.push((right_label(g), (None, Some(g.clone()))));
    }
    let hypersurfaces: Vec<Label> = singles.iter().map(|(l, _)| l.clone()).collect();
    let mut all = singles;
    all.push((interior.clone(), (None, None)));
    let mut order = Vec::new();
    for (la, ea) in &all {
        for (lb, eb) in &all {
            if la != lb && pair_le(x, y, ea, eb) {
                order.push((la.clone(), lb.clone()));
            }
        }
    }
    let mut corners = Vec::new();
    for sx in x.maximal_simplices() {
        for sy in y.maximal_simplices() {
            let simplex: BTreeSet<Label> = sx
                .iter()
                .map(left_label)
                .chain(sy.iter().map(right_label))
                .collect();
            corners.push(simplex);
        }
    }
    CornersSpace::new(interior, hypersurfaces, order, corners)
}

/// All maximal chains of a finite poset, each listed ascending. The empty
/// poset has exactly one (empty) maximal chain.
pub(crate) fn maximal_chains<T: Clone + Ord>(elems: &[T], le: &dyn Fn(&T, &T) -> bool) -> Vec<Vec<T>> {
    if elems.is_empty() {
        return vec![Vec::new()];
    }
    let lt = |a: &T, b: &T| a != b && le(a, b);
    let mut stack: Vec<Vec<T>> = elems
        .iter()
        .filter(|e| !elems.iter().any(|o| lt(o, e)))
        .map(|e| vec![e.clone()])
        .collect();
    let mut chains = Vec::new();
    while let Some(chain) = stack.pop() {
        let last = chain.last().expect("chains start from a minimal element");
        let covers: Vec<&T> = elems
            .iter()
            .filter(|e| lt(last, e) && !elems.iter().any(|m| lt(last, m) && lt(m, e)))
            .collect();
        if covers.is_empty() {
            chains.push(chain);
        } else {
            for c in covers {
                let mut next = chain.clone();
                next.push(c.clone());
                stack.push(next);
            }
        }
    }
    chains.sort();
    chains
}

/// The ordered product as a refined cartesian complex: over each product
/// corner `σ × τ`, one maximal cone per maximal totally ordered chain of
/// interior-comparable face pairs drawn from the two chains.
pub fn ordered_product_fan(x: &CornersSpace, y: &CornersSpace) -> Result<RefinedSpace> {
    require_valid(x)?;
    require_valid(y)?;
    let base = cartesian_space(x, y)?;
    let le = |a: &Elem, b: &Elem| pair_le(x, y, a, b);
    let mut fans = BTreeMap::new();
    for sx in x.maximal_simplices() {
        for sy in y.maximal_simplices() {
            let mut elems = Vec::new();
            for h in [None].into_iter().chain(sx.iter().cloned().map(Some)) {
                for g in [None].into_iter().chain(sy.iter().cloned().map(Some)) {
                    let e = (h.clone(), g);
                    if e != (None, None) && basepoint_comparable(x, y, &e) {
                        elems.push(e);
                    }
                }
            }
            let mut cones = BTreeSet::new();
            for chain in maximal_chains(&elems, &le) {
                cones.insert(Cone::new(chain.iter().map(elem_vector).collect())?);
            }
            let ambient: BTreeSet<Label> = sx
                .iter()
                .map(left_label)
                .chain(sy.iter().map(right_label))
                .collect();
            fans.insert(ambient.clone(), Fan::from_parts_unchecked(ambient, cones));
        }
    }
    RefinedSpace::from_parts(base, fans)
}

/// The blow-up centers of the ordered product: all pairs of hypersurfaces
/// below both interiors, and all pairs above both.
pub fn product_center_pairs(
    x: &CornersSpace,
    y: &CornersSpace,
) -> (Vec<(Label, Label)>, Vec<(Label, Label)>) {
    let mut lower = Vec::new();
    for h in x.below_interior() {
        for g in y.below_interior() {
            lower.push((h.clone(), g.clone()));
        }
    }
    let mut upper = Vec::new();
    for h in x.above_interior() {
        for g in y.above_interior() {
            upper.push((h.clone(), g.clone()));
        }
    }
    (lower, upper)
}

/// Deterministic linear extension of a strict partial order, reversed when
/// `descending`.
fn linear_extension<T: Clone + Ord>(
    elems: &[T],
    lt: &dyn Fn(&T, &T) -> bool,
    descending: bool,
) -> Vec<T> {
    let mut rest: Vec<T> = elems.to_vec();
    rest.sort();
    rest.dedup();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let idx = rest
            .iter()
            .position(|e| {
                rest.iter()
                    .all(|o| o == e || if descending { !lt(e, o) } else { !lt(o, e) })
            })
            .expect("a finite strict order always has an extremal element");
        out.push(rest.remove(idx));
    }
    out
}

fn center_lt(x: &CornersSpace, y: &CornersSpace, a: &(Label, Label), b: &(Label, Label)) -> bool {
    a != b
        && pair_le(
            x,
            y,
            &(Some(a.0.clone()), Some(a.1.clone())),
            &(Some(b.0.clone()), Some(b.1.clone())),
        )
}

/// The canonical admissible blow-up sequence: the lower block ascending in
/// the product order, then the upper block descending.
pub fn canonical_center_sequence(x: &CornersSpace, y: &CornersSpace) -> Vec<(Label, Label)> {
    let (lower, upper) = product_center_pairs(x, y);
    let lt = |a: &(Label, Label), b: &(Label, Label)| center_lt(x, y, a, b);
    let mut seq = linear_extension(&lower, &lt, false);
    seq.extend(linear_extension(&upper, &lt, true));
    seq
}

/// True when `seq` lists every product center exactly once, ascending
/// within the lower block and descending within the upper block (the two
/// blocks may interleave freely).
pub fn is_admissible_sequence(
    x: &CornersSpace,
    y: &CornersSpace,
    seq: &[(Label, Label)],
) -> bool {
    let (lower, upper) = product_center_pairs(x, y);
    let lower: BTreeSet<_> = lower.into_iter().collect();
    let upper: BTreeSet<_> = upper.into_iter().collect();
    let listed: BTreeSet<_> = seq.iter().cloned().collect();
    let mut expected = lower.clone();
    expected.extend(upper.iter().cloned());
    if listed != expected || seq.len() != expected.len() {
        return false;
    }
    for (i, a) in seq.iter().enumerate() {
        for b in &seq[i + 1..] {
            if lower.contains(a) && lower.contains(b) && center_lt(x, y, b, a) {
                return false;
            }
            if upper.contains(a) && upper.contains(b) && center_lt(x, y, a, b) {
                return false;
            }
        }
    }
    true
}

/// Blows up the cartesian complex along the given sequence of hypersurface
/// pairs, with no admissibility check: an ill-ordered sequence either fails
/// (a center has vanished) or produces a different refinement.
pub fn ordered_product_blowup_sequence(
    x: &CornersSpace,
    y: &CornersSpace,
    seq: &[(Label, Label)],
) -> Result<RefinedSpace> {
    require_valid(x)?;
    require_valid(y)?;
    for (h, g) in seq {
        if !x.hypersurfaces().contains(h) || !y.hypersurfaces().contains(g) {
            return Err(Error::InvalidSpace(format!(
                "blow-up center ({h},{g}) mentions an unknown hypersurface"
            )));
        }
    }
    let mut refined = trivial_refinement_unchecked(&cartesian_space(x, y)?);
    for (h, g) in seq {
        refined = refined.blow_up_face(&[
            MonoidVector::unit(left_label(h)),
            MonoidVector::unit(right_label(g)),
        ])?;
    }
    Ok(refined)
}

/// The ordered product by iterated blow-up along the canonical admissible
/// sequence, checked against the chain construction.
pub fn ordered_product_blowup(x: &CornersSpace, y: &CornersSpace) -> Result<RefinedSpace> {
    let seq = canonical_center_sequence(x, y);
    let blown = ordered_product_blowup_sequence(x, y, &seq)?;
    let chain = ordered_product_fan(x, y)?;
    if blown != chain {
        return Err(Error::ConstructionMismatch(
            "iterated blow-up disagrees with the chain construction".into(),
        ));
    }
    Ok(blown)
}

/// Which factor of a product a component descriptor refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// A symbolic reference to a piece of a fibration: the fiber or base of the
/// boundary fibration carried by a factor's hypersurface, or a whole
/// factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    FiberOf(Side, Label),
    BaseOf(Side, Label),
    Whole(Side),
}

/// The symbolic shape of the fiber or base of a product hypersurface's
/// boundary fibration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Descriptor {
    Single(Component),
    OrderedProduct(Component, Component),
    Join(Component, Component),
}

/// The boundary fibration data of one product hypersurface: what its fiber
/// and base are assembled from, and which other hypersurfaces each side
/// indexes (those strictly above, respectively strictly below, it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationTag {
    pub fiber: Descriptor,
    pub base: Descriptor,
    pub fiber_index: BTreeSet<Label>,
    pub base_index: BTreeSet<Label>,
}

/// An ordered product together with its face dictionary: the validated
/// corner complex on pair labels, the refined cartesian complex underneath,
/// and the translation between the two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpace {
    space: CornersSpace,
    refined: RefinedSpace,
    pairs: BTreeMap<Label, PairLabel>,
    rays: BTreeMap<Label, MonoidVector>,
    left: CornersSpace,
    right: CornersSpace,
}

impl ProductSpace {
    pub fn new(x: &CornersSpace, y: &CornersSpace) -> Result<ProductSpace> {
        let refined = ordered_product_fan(x, y)?;
        let poset = refined.face_poset();
        let mut pairs = BTreeMap::new();
        let mut rays = BTreeMap::new();
        let mut elems = BTreeMap::new();
        for ray in poset.rays() {
            let e = ray_elem(ray)?;
            let label = elem_pair(x, y, &e).encoded();
            pairs.insert(label.clone(), elem_pair(x, y, &e));
            rays.insert(label.clone(), ray.clone());
            elems.insert(label, e);
        }
        let interior = PairLabel {
            left: x.interior().clone(),
            right: y.interior().clone(),
        }
        .encoded();
        let mut all: Vec<(Label, Elem)> = elems.into_iter().collect();
        all.push((interior.clone(), (None, None)));
        let mut order = Vec::new();
        for (la, ea) in &all {
            for (lb, eb) in &all {
                if la != lb && pair_le(x, y, ea, eb) {
                    order.push((la.clone(), lb.clone()));
                }
            }
        }
        let label_of: BTreeMap<&MonoidVector, &Label> =
            rays.iter().map(|(l, v)| (v, l)).collect();
        let mut corners = Vec::new();
        for simplex in poset.incidence() {
            corners.push(
                simplex
                    .iter()
                    .map(|v| (*label_of.get(v).expect("incidence uses fan rays")).clone())
                    .collect::<BTreeSet<Label>>(),
            );
        }
        let space = CornersSpace::new(interior, rays.keys().cloned(), order, corners)?;
        let violations = space.validate();
        if let Some(v) = violations.first() {
            return Err(Error::ConstructionMismatch(format!(
                "ordered product is not an ordered corners space: {v}"
            )));
        }
        Ok(ProductSpace {
            space,
            refined,
            pairs,
            rays,
            left: x.clone(),
            right: y.clone(),
        })
    }

    pub fn space(&self) -> &CornersSpace {
        &self.space
    }

    pub fn refined(&self) -> &RefinedSpace {
        &self.refined
    }

    pub fn left(&self) -> &CornersSpace {
        &self.left
    }

    pub fn right(&self) -> &CornersSpace {
        &self.right
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Label, &PairLabel)> {
        self.pairs.iter()
    }

    pub fn pair(&self, hypersurface: &Label) -> Option<&PairLabel> {
        self.pairs.get(hypersurface)
    }

    /// The fan ray presenting a product hypersurface.
    pub fn ray(&self, hypersurface: &Label) -> Option<&MonoidVector> {
        self.rays.get(hypersurface)
    }

    fn elem_of(&self, pair: &PairLabel) -> Elem {
        let left = (pair.left != *self.left.interior()).then(|| pair.left.clone());
        let right = (pair.right != *self.right.interior()).then(|| pair.right.clone());
        (left, right)
    }

    /// The two boundary projections, as exponent maps on the product's
    /// corner complex. Both are simple, b-normal, ordered morphisms.
    pub fn projections(&self) -> Result<(BMap, BMap)> {
        let mut lcols = Vec::new();
        let mut rcols = Vec::new();
        for (label, pair) in &self.pairs {
            let lcol = if pair.left == *self.left.interior() {
                MonoidVector::zero()
            } else {
                MonoidVector::unit(pair.left.clone())
            };
            let rcol = if pair.right == *self.right.interior() {
                MonoidVector::zero()
            } else {
                MonoidVector::unit(pair.right.clone())
            };
            lcols.push((label.clone(), lcol));
            rcols.push((label.clone(), rcol));
        }
        let pi_left = BMap::new(self.space.clone(), self.left.clone(), lcols)?;
        let pi_right = BMap::new(self.space.clone(), self.right.clone(), rcols)?;
        for pi in [&pi_left, &pi_right] {
            let c = pi.classify();
            if !(c.simple && c.b_normal && c.ordered) {
                return Err(Error::ConstructionMismatch(
                    "a product projection failed to be an ordered morphism".into(),
                ));
            }
        }
        Ok((pi_left, pi_right))
    }

    /// The boundary fibration carried by each product hypersurface. Faces
    /// below both interiors fiber a join of fibers over a product of bases;
    /// faces above both invert that; single-factor faces keep their own
    /// fibration with the other factor riding along on one side.
    pub fn fibration_tags(&self) -> BTreeMap<Label, FibrationTag> {
        let bp: Elem = (None, None);
        let elems: BTreeMap<&Label, Elem> = self
            .pairs
            .iter()
            .map(|(l, p)| (l, self.elem_of(p)))
            .collect();
        let mut tags = BTreeMap::new();
        for label in self.pairs.keys() {
            let e = &elems[label];
            let below = pair_le(&self.left, &self.right, e, &bp);
            let (fiber, base) = match (&e.0, &e.1) {
                (Some(h), Some(g)) if below => (
                    Descriptor::Join(
                        Component::FiberOf(Side::Left, h.clone()),
                        Component::FiberOf(Side::Right, g.clone()),
                    ),
                    Descriptor::OrderedProduct(
                        Component::BaseOf(Side::Left, h.clone()),
                        Component::BaseOf(Side::Right, g.clone()),
                    ),
                ),
                (Some(h), Some(g)) => (
                    Descriptor::OrderedProduct(
                        Component::FiberOf(Side::Left, h.clone()),
                        Component::FiberOf(Side::Right, g.clone()),
                    ),
                    Descriptor::Join(
                        Component::BaseOf(Side::Left, h.clone()),
                        Component::BaseOf(Side::Right, g.clone()),
                    ),
                ),
                (Some(h), None) if below => (
                    Descriptor::Single(Component::FiberOf(Side::Left, h.clone())),
                    Descriptor::OrderedProduct(
                        Component::BaseOf(Side::Left, h.clone()),
                        Component::Whole(Side::Right),
                    ),
                ),
                (Some(h), None) => (
                    Descriptor::OrderedProduct(
                        Component::FiberOf(Side::Left, h.clone()),
                        Component::Whole(Side::Right),
                    ),
                    Descriptor::Single(Component::BaseOf(Side::Left, h.clone())),
                ),
                (None, Some(g)) if below => (
                    Descriptor::Single(Component::FiberOf(Side::Right, g.clone())),
                    Descriptor::OrderedProduct(
                        Component::Whole(Side::Left),
                        Component::BaseOf(Side::Right, g.clone()),
                    ),
                ),
                (None, Some(g)) => (
                    Descriptor::OrderedProduct(
                        Component::Whole(Side::Left),
                        Component::FiberOf(Side::Right, g.clone()),
                    ),
                    Descriptor::Single(Component::BaseOf(Side::Right, g.clone())),
                ),
                (None, None) => unreachable!("the interior pair is not a hypersurface"),
            };
            let mut fiber_index = BTreeSet::new();
            let mut base_index = BTreeSet::new();
            for (other, oe) in &elems {
                if *other == label {
                    continue;
                }
                if pair_le(&self.left, &self.right, e, oe) {
                    fiber_index.insert((*other).clone());
                }
                if pair_le(&self.left, &self.right, oe, e) {
                    base_index.insert((*other).clone());
                }
            }
            tags.insert(
                label.clone(),
                FibrationTag {
                    fiber,
                    base,
                    fiber_index,
                    base_index,
                },
            );
        }
        tags
    }
}

/// Factors a pair of ordered maps `f: Z → X`, `g: Z → Y` through the
/// ordered product: each hypersurface of `Z` is sent to the product face
/// named by its two images. Composing with the projections recovers the
/// factors exactly.
pub fn universal_factorization(f: &BMap, g: &BMap, product: &ProductSpace) -> Result<BMap> {
    if f.domain() != g.domain() {
        return Err(Error::InvalidMap(
            "the two factors have different domains".into(),
        ));
    }
    if f.codomain() != product.left() || g.codomain() != product.right() {
        return Err(Error::InvalidMap(
            "the factors' codomains do not match the product factors".into(),
        ));
    }
    for m in [f, g] {
        let c = m.classify();
        if !(c.simple && c.b_normal && c.ordered) {
            return Err(Error::NotAMorphism(
                "only simple b-normal ordered maps factor through the product".into(),
            ));
        }
    }
    let mut columns = Vec::new();
    for e in f.domain().hypersurfaces() {
        let a = f.f_sharp(e).expect("b-normal maps induce a face map");
        let b = g.f_sharp(e).expect("b-normal maps induce a face map");
        let column = if a == *product.left().interior() && b == *product.right().interior() {
            MonoidVector::zero()
        } else {
            let label = PairLabel { left: a, right: b }.encoded();
            if !product.pairs.contains_key(&label) {
                return Err(Error::ConstructionMismatch(format!(
                    "image pair {label} is missing from the product"
                )));
            }
            MonoidVector::unit(label)
        };
        columns.push((e.clone(), column));
    }
    let factored = BMap::new(f.domain().clone(), product.space().clone(), columns)?;
    let c = factored.classify();
    if !(c.simple && c.b_normal && c.ordered) {
        return Err(Error::ConstructionMismatch(
            "the factorization failed to be an ordered morphism".into(),
        ));
    }
    let (pi_left, pi_right) = product.projections()?;
    if factored.compose(&pi_left)? != *f || factored.compose(&pi_right)? != *g {
        return Err(Error::ConstructionMismatch(
            "the factorization does not recover the factors".into(),
        ));
    }
    Ok(factored)
}

/// Where the fresh boundary face of a relative cone sits, and how the old
/// hypersurfaces are repositioned around the cone's interior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConePlacement {
    /// Fresh face maximal; every old hypersurface between the interior and
    /// it.
    Min,
    /// Fresh face minimal; every old hypersurface between it and the
    /// interior.
    Max,
    /// Fresh face at the designated end; old hypersurfaces split between
    /// the two sides of the interior (`below` lists those underneath).
    Relative {
        below: BTreeSet<Label>,
        xi_maximal: bool,
    },
}

/// Adds one fresh boundary hypersurface `xi` meeting every corner of `x`.
/// The old hypersurfaces keep their mutual order but are repositioned
/// against the interior according to the placement; a split that reverses
/// an existing relation is rejected.
pub fn relative_cone(x: &CornersSpace, xi: Label, placement: &ConePlacement) -> Result<CornersSpace> {
    require_valid(x)?;
    if x.hypersurfaces().contains(&xi) || xi == *x.interior() {
        return Err(Error::InvalidSpace(format!(
            "fresh hypersurface {xi} already names a face"
        )));
    }
    let (below, xi_maximal): (BTreeSet<Label>, bool) = match placement {
        ConePlacement::Min => (BTreeSet::new(), true),
        ConePlacement::Max => (x.hypersurfaces().clone(), false),
        ConePlacement::Relative { below, xi_maximal } => {
            for h in below {
                if !x.hypersurfaces().contains(h) {
                    return Err(Error::InvalidSpace(format!(
                        "split mentions unknown hypersurface {h}"
                    )));
                }
            }
            (below.clone(), *xi_maximal)
        }
    };
    let mut order: Vec<(Label, Label)> = x
        .order()
        .pairs()
        .filter(|(a, b)| x.hypersurfaces().contains(a) && x.hypersurfaces().contains(b))
        .cloned()
        .collect();
    for h in x.hypersurfaces() {
        if below.contains(h) {
            order.push((h.clone(), x.interior().clone()));
        } else {
            order.push((x.interior().clone(), h.clone()));
        }
    }
    for v in x.hypersurfaces().iter().chain([x.interior()]) {
        if xi_maximal {
            order.push((v.clone(), xi.clone()));
        } else {
            order.push((xi.clone(), v.clone()));
        }
    }
    let mut corners: Vec<BTreeSet<Label>> = Vec::new();
    for simplex in x.corners() {
        corners.push(simplex.clone());
        let mut coned = simplex.clone();
        coned.insert(xi.clone());
        corners.push(coned);
    }
    let hypersurfaces: Vec<Label> = x
        .hypersurfaces()
        .iter()
        .cloned()
        .chain([xi.clone()])
        .collect();
    let cone = CornersSpace::new(x.interior().clone(), hypersurfaces, order, corners)?;
    let violations = cone.validate();
    if let Some(v) = violations.first() {
        return Err(Error::ConstructionMismatch(format!(
            "relative cone is not an ordered corners space: {v}"
        )));
    }
    Ok(cone)
}

/// Which relative cones a join is built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinVariant {
    /// Both fresh faces maximal.
    Min,
    /// Both fresh faces minimal.
    Max,
    /// Explicit placements per factor; no direct-formula cross-check is
    /// available for this variant.
    Relative {
        left: ConePlacement,
        right: ConePlacement,
    },
}

/// The join of two spaces: the boundary hypersurface created by blowing up
/// the pair of fresh faces in the product of two relative cones, with the
/// incidence, order, and fibration data it inherits.
#[derive(Clone, Debug)]
pub struct Join {
    space: CornersSpace,
    pairs: BTreeMap<Label, PairLabel>,
    representatives: BTreeMap<Label, MonoidVector>,
    tags: BTreeMap<Label, FibrationTag>,
    product: ProductSpace,
    xi: Label,
    eta: Label,
}

impl Join {
    pub fn space(&self) -> &CornersSpace {
        &self.space
    }

    /// Components of each join face inside the two relative cones.
    pub fn pairs(&self) -> impl Iterator<Item = (&Label, &PairLabel)> {
        self.pairs.iter()
    }

    pub fn pair(&self, hypersurface: &Label) -> Option<&PairLabel> {
        self.pairs.get(hypersurface)
    }

    /// The product-fan ray representing a join face (the canonical
    /// representative of its class modulo the blown-up center).
    pub fn representative(&self, hypersurface: &Label) -> Option<&MonoidVector> {
        self.representatives.get(hypersurface)
    }

    pub fn tags(&self) -> &BTreeMap<Label, FibrationTag> {
        &self.tags
    }

    /// The ambient product of relative cones the join was carved from.
    pub fn product(&self) -> &ProductSpace {
        &self.product
    }

    pub fn xi(&self) -> &Label {
        &self.xi
    }

    pub fn eta(&self) -> &Label {
        &self.eta
    }
}

fn fresh_label(base: &str, space: &CornersSpace) -> Label {
    let mut name = base.to_string();
    let taken = |n: &str| {
        space.interior().as_str() == n || space.hypersurfaces().iter().any(|h| h.as_str() == n)
    };
    while taken(&name) {
        name.push('\'');
    }
    Label::new(name)
}

pub fn join(x: &CornersSpace, y: &CornersSpace, variant: &JoinVariant) -> Result<Join> {
    let (px, py) = match variant {
        JoinVariant::Min => (ConePlacement::Min, ConePlacement::Min),
        JoinVariant::Max => (ConePlacement::Max, ConePlacement::Max),
        JoinVariant::Relative { left, right } => (left.clone(), right.clone()),
    };
    let xi = fresh_label("xi", x);
    let eta = fresh_label("eta", y);
    let cone_x = relative_cone(x, xi.clone(), &px)?;
    let cone_y = relative_cone(y, eta.clone(), &py)?;
    let product = ProductSpace::new(&cone_x, &cone_y)?;
    let center = elem_vector(&(Some(xi.clone()), Some(eta.clone())));
    let poset = product.refined.face_poset();
    if !poset.rays().contains(&center) {
        return Err(Error::ConstructionMismatch(
            "the pair of fresh faces was not blown up in the product".into(),
        ));
    }
    // The join is the link of the blown-up center: its faces are the
    // cospanning sets that extend by the center ray.
    let mut link: BTreeSet<BTreeSet<MonoidVector>> = BTreeSet::new();
    for simplex in poset.incidence() {
        if simplex.contains(&center) {
            let mut s = simplex.clone();
            s.remove(&center);
            link.insert(s);
        }
    }
    let rays: BTreeSet<MonoidVector> = link.iter().flatten().cloned().collect();
    let label_of: BTreeMap<&MonoidVector, &Label> =
        product.rays.iter().map(|(l, v)| (v, l)).collect();
    let mut pairs = BTreeMap::new();
    let mut representatives = BTreeMap::new();
    let mut elems = BTreeMap::new();
    for ray in &rays {
        let label = (*label_of
            .get(ray)
            .expect("link rays are product hypersurfaces"))
        .clone();
        pairs.insert(label.clone(), product.pairs[&label].clone());
        representatives.insert(label.clone(), ray.clone());
        elems.insert(label, ray_elem(ray)?);
    }
    let interior = PairLabel {
        left: xi.clone(),
        right: eta.clone(),
    }
    .encoded();
    let center_elem: Elem = (Some(xi.clone()), Some(eta.clone()));
    let mut order = Vec::new();
    for (la, ea) in &elems {
        for (lb, eb) in &elems {
            if la != lb && pair_le(&cone_x, &cone_y, ea, eb) {
                order.push((la.clone(), lb.clone()));
            }
        }
        if pair_le(&cone_x, &cone_y, ea, &center_elem) {
            order.push((la.clone(), interior.clone()));
        }
        if pair_le(&cone_x, &cone_y, &center_elem, ea) {
            order.push((interior.clone(), la.clone()));
        }
    }
    let corners: Vec<BTreeSet<Label>> = link
        .iter()
        .map(|s| {
            s.iter()
                .map(|v| (*label_of.get(v).expect("link rays are labeled")).clone())
                .collect()
        })
        .collect();
    let space = CornersSpace::new(interior, pairs.keys().cloned(), order, corners)?;
    let violations = space.validate();
    if let Some(v) = violations.first() {
        return Err(Error::ConstructionMismatch(format!(
            "join is not an ordered corners space: {v}"
        )));
    }
    let hyps = space.hypersurfaces().clone();
    let tags: BTreeMap<Label, FibrationTag> = product
        .fibration_tags()
        .into_iter()
        .filter(|(l, _)| hyps.contains(l))
        .map(|(l, mut tag)| {
            tag.fiber_index = tag.fiber_index.intersection(&hyps).cloned().collect();
            tag.base_index = tag.base_index.intersection(&hyps).cloned().collect();
            (l, tag)
        })
        .collect();
    match variant {
        JoinVariant::Min => direct_join_check(x, y, false, &xi, &eta, &rays, &link)?,
        JoinVariant::Max => direct_join_check(x, y, true, &xi, &eta, &rays, &link)?,
        JoinVariant::Relative { .. } => {}
    }
    Ok(Join {
        space,
        pairs,
        representatives,
        tags,
        product,
        xi,
        eta,
    })
}

const END0: &str = "end0";
const END1: &str = "end1";

/// The join presented directly: blow up `X × Y × I` along every `X`-face
/// paired with one interval end, every `Y`-face paired with the other end,
/// and every mixed pair of `X`- and `Y`-faces — each group run in the order
/// of the factors for the maximal variant and reversed for the minimal one.
fn direct_join_complex(x: &CornersSpace, y: &CornersSpace, maximal: bool) -> Result<RefinedSpace> {
    let xlab = |h: &Label| Label::new(format!("x:{}", h.as_str()));
    let ylab = |g: &Label| Label::new(format!("y:{}", g.as_str()));
    let interior = Label::new("t");
    let hypersurfaces: Vec<Label> = x
        .hypersurfaces()
        .iter()
        .map(&xlab)
        .chain(y.hypersurfaces().iter().map(&ylab))
        .chain([Label::new(END0), Label::new(END1)])
        .collect();
    let mut corners = Vec::new();
    for sx in x.maximal_simplices() {
        for sy in y.maximal_simplices() {
            for end in [END0, END1] {
                let simplex: BTreeSet<Label> = sx
                    .iter()
                    .map(&xlab)
                    .chain(sy.iter().map(&ylab))
                    .chain([Label::new(end)])
                    .collect();
                corners.push(simplex);
            }
        }
    }
    let base = CornersSpace::new(interior, hypersurfaces, [], corners)?;
    let mut refined = trivial_refinement_unchecked(&base);
    let xs: Vec<Label> = x.hypersurfaces().iter().cloned().collect();
    let ys: Vec<Label> = y.hypersurfaces().iter().cloned().collect();
    let x_lt = |a: &Label, b: &Label| x.order().less(a, b);
    let y_lt = |a: &Label, b: &Label| y.order().less(a, b);
    for h in linear_extension(&xs, &x_lt, !maximal) {
        refined = refined.blow_up_face(&[
            MonoidVector::unit(xlab(&h)),
            MonoidVector::unit(Label::new(END0)),
        ])?;
    }
    for g in linear_extension(&ys, &y_lt, !maximal) {
        refined = refined.blow_up_face(&[
            MonoidVector::unit(ylab(&g)),
            MonoidVector::unit(Label::new(END1)),
        ])?;
    }
    let mut mixed = Vec::new();
    for h in &xs {
        for g in &ys {
            mixed.push((h.clone(), g.clone()));
        }
    }
    let mixed_lt = |a: &(Label, Label), b: &(Label, Label)| {
        a != b
            && (a.0 == b.0 || x.order().less(&a.0, &b.0))
            && (a.1 == b.1 || y.order().less(&a.1, &b.1))
    };
    for (h, g) in linear_extension(&mixed, &mixed_lt, !maximal) {
        refined = refined.blow_up_face(&[MonoidVector::unit(xlab(&h)), MonoidVector::unit(ylab(&g))])?;
    }
    Ok(refined)
}

/// Checks the blown-up `X × Y × I` presentation against the link extracted
/// from the product of cones, ray for ray: one interval end translates to
/// the left fresh face, the other to the right one.
fn direct_join_check(
    x: &CornersSpace,
    y: &CornersSpace,
    maximal: bool,
    xi: &Label,
    eta: &Label,
    rays: &BTreeSet<MonoidVector>,
    link: &BTreeSet<BTreeSet<MonoidVector>>,
) -> Result<()> {
    let direct = direct_join_complex(x, y, maximal)?;
    let translate = |v: &MonoidVector| {
        v.map_labels(|l| {
            if let Some(h) = l.as_str().strip_prefix("x:") {
                left_label(&Label::new(h))
            } else if let Some(g) = l.as_str().strip_prefix("y:") {
                right_label(&Label::new(g))
            } else if l.as_str() == END1 {
                left_label(xi)
            } else if l.as_str() == END0 {
                right_label(eta)
            } else {
                l.clone()
            }
        })
    };
    let poset = direct.face_poset();
    let direct_rays: BTreeSet<MonoidVector> = poset.rays().iter().map(&translate).collect();
    if direct_rays != *rays {
        return Err(Error::ConstructionMismatch(
            "direct join presentation disagrees with the extracted link on rays".into(),
        ));
    }
    let direct_link: BTreeSet<BTreeSet<MonoidVector>> = poset
        .incidence()
        .iter()
        .map(|s| s.iter().map(&translate).collect())
        .collect();
    if direct_link != *link {
        return Err(Error::ConstructionMismatch(
            "direct join presentation disagrees with the extracted link on incidence".into(),
        ));
    }
    Ok(())
}

/// The two joins of a pair of spaces together with the face exchange
/// between them: swapping each fresh face with the matching interior
/// component is a bijection preserving incidence and the order among
/// hypersurfaces.
#[derive(Clone, Debug)]
pub struct JoinEquivalence {
    pub max: Join,
    pub min: Join,
    /// Hypersurface labels of the maximal join mapped to those of the
    /// minimal one.
    pub ray_map: BTreeMap<Label, Label>,
}

pub fn join_equivalence(x: &CornersSpace, y: &CornersSpace) -> Result<JoinEquivalence> {
    let max = join(x, y, &JoinVariant::Max)?;
    let min = join(x, y, &JoinVariant::Min)?;
    let swap = |pair: &PairLabel, xi: &Label, eta: &Label, xint: &Label, yint: &Label| PairLabel {
        left: if pair.left == *xi {
            xint.clone()
        } else if pair.left == *xint {
            xi.clone()
        } else {
            pair.left.clone()
        },
        right: if pair.right == *eta {
            yint.clone()
        } else if pair.right == *yint {
            eta.clone()
        } else {
            pair.right.clone()
        },
    };
    let mut ray_map = BTreeMap::new();
    for (label, pair) in &max.pairs {
        let image = swap(pair, &max.xi, &max.eta, x.interior(), y.interior()).encoded();
        if !min.pairs.contains_key(&image) {
            return Err(Error::ConstructionMismatch(format!(
                "the exchange sends {label} outside the minimal join"
            )));
        }
        ray_map.insert(label.clone(), image);
    }
    let images: BTreeSet<&Label> = ray_map.values().collect();
    if images.len() != min.pairs.len() {
        return Err(Error::ConstructionMismatch(
            "the exchange is not a bijection of join faces".into(),
        ));
    }
    let map_set = |s: &BTreeSet<Label>| -> BTreeSet<Label> {
        s.iter().map(|l| ray_map[l].clone()).collect()
    };
    let max_corners: BTreeSet<BTreeSet<Label>> =
        max.space.corners().iter().map(map_set).collect();
    if max_corners != *min.space.corners() {
        return Err(Error::ConstructionMismatch(
            "the exchange does not preserve join incidence".into(),
        ));
    }
    for (a, b) in max.space.order().pairs() {
        let a_hyp = max.space.hypersurfaces().contains(a);
        let b_hyp = max.space.hypersurfaces().contains(b);
        if a_hyp && b_hyp && !min.space.order().less(&ray_map[a], &ray_map[b]) {
            return Err(Error::ConstructionMismatch(
                "the exchange does not preserve the order among join faces".into(),
            ));
        }
    }
    for (label, tag) in &max.tags {
        let image_tag = &min.tags[&ray_map[label]];
        if map_set(&tag.fiber_index) != image_tag.fiber_index
            || map_set(&tag.base_index) != image_tag.base_index
        {
            return Err(Error::ConstructionMismatch(
                "the exchange does not intertwine the fibration index sets".into(),
            ));
        }
    }
    Ok(JoinEquivalence { max, min, ray_map })
}

/// How a face of a fiber product sits over the target: either a plain fiber
/// product of the two boundary fibrations, or a join-type face lying over
/// the target's interior.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberFaceKind {
    FiberProduct,
    JoinType,
}

/// The corner combinatorics of the fiber product of two ordered maps into
/// a common target: which face pairs survive, their order, the smoothness
/// functional of each target hypersurface, and whether all functionals cut
/// the product fans along faces.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub elements: BTreeSet<Label>,
    pub pairs: BTreeMap<Label, PairLabel>,
    pub order: BTreeSet<(Label, Label)>,
    pub tags: BTreeMap<Label, FiberFaceKind>,
    pub functionals: BTreeMap<Label, MonoidVector>,
    pub psub_ok: bool,
}

pub fn fiber_product(f: &BMap, g: &BMap) -> Result<FiberProduct> {
    if f.codomain() != g.codomain() {
        return Err(Error::InvalidMap(
            "fiber product factors must share a codomain".into(),
        ));
    }
    for m in [f, g] {
        let c = m.classify();
        if !(c.simple && c.b_normal && c.ordered) {
            return Err(Error::NotAMorphism(
                "fiber products are formed over simple b-normal ordered maps".into(),
            ));
        }
    }
    let x = f.domain();
    let y = g.domain();
    let z = f.codomain();
    let sharp = |m: &BMap, a: &Option<Label>| -> Label {
        match a {
            Some(h) => m.f_sharp(h).expect("b-normal maps induce a face map"),
            None => z.interior().clone(),
        }
    };
    let mut elements = BTreeSet::new();
    let mut pairs = BTreeMap::new();
    let mut tags = BTreeMap::new();
    let mut elems: Vec<(Label, Elem)> = Vec::new();
    for a in [None].into_iter().chain(x.hypersurfaces().iter().cloned().map(Some)) {
        for b in [None].into_iter().chain(y.hypersurfaces().iter().cloned().map(Some)) {
            let e = (a.clone(), b);
            if e == (None, None) || !basepoint_comparable(x, y, &e) {
                continue;
            }
            if sharp(f, &e.0) != sharp(g, &e.1) {
                continue;
            }
            let pair = elem_pair(x, y, &e);
            let label = pair.encoded();
            let kind = match (&e.0, &e.1) {
                (Some(_), Some(_)) if sharp(f, &e.0) == *z.interior() => FiberFaceKind::JoinType,
                _ => FiberFaceKind::FiberProduct,
            };
            elements.insert(label.clone());
            pairs.insert(label.clone(), pair);
            tags.insert(label.clone(), kind);
            elems.push((label, e));
        }
    }
    let mut order = BTreeSet::new();
    for (la, ea) in &elems {
        for (lb, eb) in &elems {
            if la != lb && pair_le(x, y, ea, eb) {
                order.insert((la.clone(), lb.clone()));
            }
        }
    }
    let mut functionals = BTreeMap::new();
    for e in z.hypersurfaces() {
        let mut terms: Vec<(Label, BigInt)> = Vec::new();
        for h in x.hypersurfaces() {
            terms.push((left_label(h), f.exponent(e, h)));
        }
        for g_hyp in y.hypersurfaces() {
            terms.push((right_label(g_hyp), -g.exponent(e, g_hyp)));
        }
        functionals.insert(e.clone(), MonoidVector::from_pairs(terms));
    }
    let refined = ordered_product_fan(x, y)?;
    let sigmas: Vec<MonoidVector> = functionals.values().cloned().collect();
    let psub_ok = psub_lift(&refined, &sigmas);
    Ok(FiberProduct {
        elements,
        pairs,
        order,
        tags,
        functionals,
        psub_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(s: &str) -> Label {
        Label::new(s)
    }

    /// Half-line with the hypersurface above the interior.
    fn half_line_min(interior: &str, h: &str) -> CornersSpace {
        CornersSpace::total_chain(l(interior), &[], &[l(h)]).unwrap()
    }

    /// Half-line with the hypersurface below the interior.
    fn half_line_max(interior: &str, h: &str) -> CornersSpace {
        CornersSpace::total_chain(l(interior), &[l(h)], &[]).unwrap()
    }

    fn point(interior: &str) -> CornersSpace {
        CornersSpace::point(l(interior))
    }

    fn lv(s: &str) -> MonoidVector {
        MonoidVector::unit(left_label(&l(s)))
    }

    fn rv(s: &str) -> MonoidVector {
        MonoidVector::unit(right_label(&l(s)))
    }

    fn cone(gens: Vec<MonoidVector>) -> Cone {
        Cone::new(gens).unwrap()
    }

    fn pair(a: &str, b: &str) -> Label {
        PairLabel {
            left: l(a),
            right: l(b),
        }
        .encoded()
    }

    #[test]
    fn min_min_half_lines_fan_is_the_blown_quadrant() {
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let refined = ordered_product_fan(&x, &y).unwrap();
        let simplex: BTreeSet<Label> = [left_label(&l("H")), right_label(&l("G"))]
            .into_iter()
            .collect();
        let fan = refined.fan(&simplex).unwrap();
        let expected = Fan::new(
            simplex.clone(),
            [
                cone(vec![lv("H"), lv("H").add(&rv("G"))]),
                cone(vec![rv("G"), lv("H").add(&rv("G"))]),
            ],
        )
        .unwrap();
        assert_eq!(*fan, expected);
        fan.validate().unwrap();
    }

    #[test]
    fn min_max_half_lines_are_already_the_cartesian_product() {
        let x = half_line_max("X", "H");
        let y = half_line_min("Y", "G");
        let refined = ordered_product_fan(&x, &y).unwrap();
        let simplex: BTreeSet<Label> = [left_label(&l("H")), right_label(&l("G"))]
            .into_iter()
            .collect();
        let fan = refined.fan(&simplex).unwrap();
        assert_eq!(*fan, Fan::orthant(simplex));
        assert!(canonical_center_sequence(&x, &y).is_empty());
    }

    #[test]
    fn a_point_factor_leaves_the_other_factor_unrefined() {
        let x = point("P");
        let y = CornersSpace::total_chain(l("Y"), &[l("G1")], &[l("G2")]).unwrap();
        let refined = ordered_product_fan(&x, &y).unwrap();
        assert_eq!(refined, trivial_refinement_unchecked(refined.base()));
        let product = ProductSpace::new(&x, &y).unwrap();
        assert_eq!(product.space().hypersurfaces().len(), 2);
        assert_eq!(
            product.space().corners().len(),
            y.corners().len(),
            "the product corner complex is the factor's"
        );
    }

    #[test]
    fn blow_up_and_chain_constructions_agree_on_a_two_chain_times_a_half_line() {
        let x = CornersSpace::total_chain(l("X"), &[], &[l("H1"), l("H2")]).unwrap();
        let y = half_line_min("Y", "G");
        assert_eq!(
            canonical_center_sequence(&x, &y),
            vec![(l("H2"), l("G")), (l("H1"), l("G"))],
            "the upper block is blown up deepest pair last"
        );
        let blown = ordered_product_blowup(&x, &y).unwrap();
        let simplex: BTreeSet<Label> =
            [left_label(&l("H1")), left_label(&l("H2")), right_label(&l("G"))]
                .into_iter()
                .collect();
        let h1g = lv("H1").add(&rv("G"));
        let h2g = lv("H2").add(&rv("G"));
        let expected = Fan::new(
            simplex.clone(),
            [
                cone(vec![lv("H1"), lv("H2"), h2g.clone()]),
                cone(vec![lv("H1"), h1g.clone(), h2g.clone()]),
                cone(vec![rv("G"), h1g.clone(), h2g.clone()]),
            ],
        )
        .unwrap();
        assert_eq!(*blown.fan(&simplex).unwrap(), expected);
    }

    #[test]
    fn an_inadmissible_blow_up_order_builds_a_different_fan() {
        let x = CornersSpace::total_chain(l("X"), &[], &[l("H1"), l("H2")]).unwrap();
        let y = half_line_min("Y", "G");
        let bad = vec![(l("H1"), l("G")), (l("H2"), l("G"))];
        assert!(!is_admissible_sequence(&x, &y, &bad));
        let result = ordered_product_blowup_sequence(&x, &y, &bad).unwrap();
        assert_ne!(result, ordered_product_fan(&x, &y).unwrap());
    }

    #[test]
    fn admissible_interleavings_of_the_two_blocks_agree() {
        let x = CornersSpace::total_chain(l("X"), &[l("A")], &[l("B")]).unwrap();
        let y = CornersSpace::total_chain(l("Y"), &[l("C")], &[l("D")]).unwrap();
        let one = vec![(l("A"), l("C")), (l("B"), l("D"))];
        let two = vec![(l("B"), l("D")), (l("A"), l("C"))];
        assert!(is_admissible_sequence(&x, &y, &one));
        assert!(is_admissible_sequence(&x, &y, &two));
        let canonical = ordered_product_fan(&x, &y).unwrap();
        assert_eq!(
            ordered_product_blowup_sequence(&x, &y, &one).unwrap(),
            canonical
        );
        assert_eq!(
            ordered_product_blowup_sequence(&x, &y, &two).unwrap(),
            canonical
        );
    }

    #[test]
    fn product_space_poset_of_min_min_half_lines() {
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let product = ProductSpace::new(&x, &y).unwrap();
        let expected: BTreeSet<Label> = [pair("H", "Y"), pair("X", "G"), pair("H", "G")]
            .into_iter()
            .collect();
        assert_eq!(*product.space().hypersurfaces(), expected);
        let corners = product.space().corners();
        assert!(corners.contains(&BTreeSet::from([pair("H", "Y"), pair("H", "G")])));
        assert!(corners.contains(&BTreeSet::from([pair("X", "G"), pair("H", "G")])));
        assert!(!corners.contains(&BTreeSet::from([pair("H", "Y"), pair("X", "G")])));
        let order = product.space().order();
        assert!(order.less(&pair("H", "Y"), &pair("H", "G")));
        assert!(order.less(&pair("X", "G"), &pair("H", "G")));
        assert!(!order.comparable(&pair("H", "Y"), &pair("X", "G")));
        assert!(order.less(product.space().interior(), &pair("H", "Y")));
    }

    #[test]
    fn mixed_half_lines_product_has_two_comparable_hypersurfaces() {
        // One factor's hypersurface below its interior, the other's above:
        // the mixed pair is not comparable to the pair of interiors, so only
        // the two single-factor faces survive, and they intersect.
        let x = half_line_max("X", "H");
        let y = half_line_min("Y", "G");
        let product = ProductSpace::new(&x, &y).unwrap();
        let expected: BTreeSet<Label> = [pair("H", "Y"), pair("X", "G")].into_iter().collect();
        assert_eq!(*product.space().hypersurfaces(), expected);
        assert!(product
            .space()
            .corners()
            .contains(&BTreeSet::from([pair("H", "Y"), pair("X", "G")])));
        assert!(product
            .space()
            .order()
            .less(&pair("H", "Y"), &pair("X", "G")));
    }

    #[test]
    fn projections_are_ordered_morphisms_recovering_the_blow_down() {
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let product = ProductSpace::new(&x, &y).unwrap();
        let (pi_left, pi_right) = product.projections().unwrap();
        assert_eq!(*pi_left.column(&pair("H", "G")), MonoidVector::unit(l("H")));
        assert_eq!(*pi_left.column(&pair("X", "G")), MonoidVector::zero());
        assert_eq!(
            *pi_right.column(&pair("H", "G")),
            MonoidVector::unit(l("G"))
        );
        // Projection exponents match blowing down to the cartesian complex
        // and reading off one side's coordinates.
        for (label, ray) in &product.rays {
            for h in x.hypersurfaces() {
                assert_eq!(
                    pi_left.exponent(h, label),
                    ray.coeff(&left_label(h)),
                    "blow-down then project must equal the lifted projection"
                );
            }
            for g in y.hypersurfaces() {
                assert_eq!(pi_right.exponent(g, label), ray.coeff(&right_label(g)));
            }
        }
    }

    #[test]
    fn universal_factorization_of_the_diagonal_and_of_the_projections() {
        let x = half_line_min("X", "H");
        let product = ProductSpace::new(&x, &x).unwrap();
        let id = BMap::identity(&x);
        let diagonal = universal_factorization(&id, &id, &product).unwrap();
        assert_eq!(
            *diagonal.column(&l("H")),
            MonoidVector::unit(pair("H", "H"))
        );
        let (pi_left, pi_right) = product.projections().unwrap();
        let refactored = universal_factorization(&pi_left, &pi_right, &product).unwrap();
        assert_eq!(refactored, BMap::identity(product.space()));
    }

    #[test]
    fn factorization_through_a_point_factor_recovers_the_map() {
        let z = CornersSpace::total_chain(l("Z"), &[], &[l("E")]).unwrap();
        let x = half_line_min("X", "H");
        let f = BMap::new(
            z.clone(),
            x.clone(),
            [(l("E"), MonoidVector::unit(l("H")))],
        )
        .unwrap();
        let p = point("P");
        let g = BMap::new(z.clone(), p.clone(), []).unwrap();
        let product = ProductSpace::new(&x, &p).unwrap();
        let factored = universal_factorization(&f, &g, &product).unwrap();
        assert_eq!(
            *factored.column(&l("E")),
            MonoidVector::unit(pair("H", "P"))
        );
    }

    #[test]
    fn non_morphism_factors_are_rejected() {
        let z = CornersSpace::total_chain(l("Z"), &[], &[l("E")]).unwrap();
        let x = half_line_min("X", "H");
        // Exponent 2 is not simple, hence not a morphism for this purpose.
        let f = BMap::new(
            z.clone(),
            x.clone(),
            [(l("E"), MonoidVector::from_pairs([(l("H"), 2)]))],
        )
        .unwrap();
        let g = BMap::new(z.clone(), point("P"), []).unwrap();
        let product = ProductSpace::new(&x, &point("P")).unwrap();
        assert!(matches!(
            universal_factorization(&f, &g, &product),
            Err(Error::NotAMorphism(_))
        ));
    }

    #[test]
    fn relative_cone_of_a_point_puts_the_fresh_face_at_the_stated_end() {
        let p = point("P");
        let min = relative_cone(&p, l("xi"), &ConePlacement::Min).unwrap();
        assert!(min.order().less(&l("P"), &l("xi")));
        let max = relative_cone(&p, l("xi"), &ConePlacement::Max).unwrap();
        assert!(max.order().less(&l("xi"), &l("P")));
    }

    #[test]
    fn relative_cone_repositions_old_faces_around_the_new_interior() {
        let x = half_line_min("X", "H");
        let max = relative_cone(&x, l("xi"), &ConePlacement::Max).unwrap();
        assert!(max.order().less(&l("xi"), &l("H")));
        assert!(max.order().less(&l("H"), &l("X")), "old face moves below");
        assert!(max
            .corners()
            .contains(&BTreeSet::from([l("xi"), l("H")])));
        let min = relative_cone(&x, l("xi"), &ConePlacement::Min).unwrap();
        assert!(min.order().less(&l("X"), &l("H")));
        assert!(min.order().less(&l("H"), &l("xi")));
    }

    #[test]
    fn relative_cone_respects_an_explicit_split() {
        let x = CornersSpace::total_chain(l("X"), &[l("A"), l("B")], &[]).unwrap();
        let placement = ConePlacement::Relative {
            below: BTreeSet::from([l("A")]),
            xi_maximal: false,
        };
        let cone = relative_cone(&x, l("xi"), &placement).unwrap();
        assert!(cone.order().less(&l("xi"), &l("A")));
        assert!(cone.order().less(&l("A"), &l("X")));
        assert!(cone.order().less(&l("X"), &l("B")));
        assert!(cone.order().less(&l("A"), &l("B")), "mutual order kept");
    }

    #[test]
    fn relative_cone_rejects_an_order_incompatible_split() {
        let x = CornersSpace::total_chain(l("X"), &[l("A"), l("B")], &[]).unwrap();
        // A < B in the factor, but the split puts B below the interior and A
        // above it, reversing them.
        let placement = ConePlacement::Relative {
            below: BTreeSet::from([l("B")]),
            xi_maximal: false,
        };
        assert!(relative_cone(&x, l("xi"), &placement).is_err());
    }

    #[test]
    fn join_of_two_points_is_an_interval() {
        let max = join(&point("P"), &point("Q"), &JoinVariant::Max).unwrap();
        let ends: BTreeSet<Label> = [pair("xi", "Q"), pair("P", "eta")].into_iter().collect();
        assert_eq!(*max.space().hypersurfaces(), ends);
        assert!(!max
            .space()
            .corners()
            .contains(&BTreeSet::from([pair("xi", "Q"), pair("P", "eta")])));
        for h in max.space().hypersurfaces() {
            assert!(max.space().order().less(max.space().interior(), h));
        }
        let min = join(&point("P"), &point("Q"), &JoinVariant::Min).unwrap();
        for h in min.space().hypersurfaces() {
            assert!(min.space().order().less(h, min.space().interior()));
        }
    }

    #[test]
    fn join_of_half_lines_has_seven_faces() {
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let j = join(&x, &y, &JoinVariant::Max).unwrap();
        let expected: BTreeSet<Label> = [
            pair("H", "G"),
            pair("H", "eta"),
            pair("xi", "G"),
            pair("H", "Y"),
            pair("X", "G"),
            pair("xi", "Y"),
            pair("X", "eta"),
        ]
        .into_iter()
        .collect();
        assert_eq!(*j.space().hypersurfaces(), expected);
        for h in j.space().hypersurfaces() {
            assert!(
                j.space().order().less(j.space().interior(), h),
                "every face of the maximal join lies above its interior"
            );
        }
    }

    #[test]
    fn join_direct_formula_cross_checks_on_mixed_shapes() {
        // The direct X x Y x I presentation is verified inside `join` for
        // the minimal and maximal variants.
        let chain = CornersSpace::total_chain(l("X"), &[], &[l("H1"), l("H2")]).unwrap();
        let half = half_line_max("Y", "G");
        join(&chain, &half, &JoinVariant::Max).unwrap();
        join(&chain, &half, &JoinVariant::Min).unwrap();
        let bouquet = CornersSpace::new(
            l("X"),
            [l("A"), l("B")],
            [(l("X"), l("A")), (l("X"), l("B"))],
            [],
        )
        .unwrap();
        join(&bouquet, &point("P"), &JoinVariant::Max).unwrap();
        join(&bouquet, &point("P"), &JoinVariant::Min).unwrap();
    }

    #[test]
    fn join_equivalence_swaps_fresh_and_interior_components() {
        let eq = join_equivalence(&point("P"), &point("Q")).unwrap();
        assert_eq!(eq.ray_map[&pair("xi", "Q")], pair("P", "eta"));
        assert_eq!(eq.ray_map[&pair("P", "eta")], pair("xi", "Q"));
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let eq = join_equivalence(&x, &y).unwrap();
        assert_eq!(eq.ray_map[&pair("H", "G")], pair("H", "G"));
        assert_eq!(eq.ray_map[&pair("H", "eta")], pair("H", "Y"));
        assert_eq!(eq.ray_map[&pair("H", "Y")], pair("H", "eta"));
        assert_eq!(eq.ray_map[&pair("xi", "Y")], pair("X", "eta"));
        assert_eq!(eq.ray_map[&pair("X", "eta")], pair("xi", "Y"));
        assert_eq!(eq.ray_map[&pair("xi", "G")], pair("X", "G"));
    }

    #[test]
    fn fibration_tags_on_min_min_half_lines() {
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let product = ProductSpace::new(&x, &y).unwrap();
        let tags = product.fibration_tags();
        let deep = &tags[&pair("H", "G")];
        assert_eq!(
            deep.fiber,
            Descriptor::OrderedProduct(
                Component::FiberOf(Side::Left, l("H")),
                Component::FiberOf(Side::Right, l("G"))
            )
        );
        assert_eq!(
            deep.base,
            Descriptor::Join(
                Component::BaseOf(Side::Left, l("H")),
                Component::BaseOf(Side::Right, l("G"))
            )
        );
        assert!(deep.fiber_index.is_empty());
        assert_eq!(
            deep.base_index,
            BTreeSet::from([pair("H", "Y"), pair("X", "G")])
        );
        let single = &tags[&pair("H", "Y")];
        assert_eq!(
            single.fiber,
            Descriptor::OrderedProduct(
                Component::FiberOf(Side::Left, l("H")),
                Component::Whole(Side::Right)
            )
        );
        assert_eq!(
            single.base,
            Descriptor::Single(Component::BaseOf(Side::Left, l("H")))
        );
        assert_eq!(single.fiber_index, BTreeSet::from([pair("H", "G")]));
        assert!(single.base_index.is_empty());
    }

    #[test]
    fn fibration_tags_on_max_max_half_lines() {
        let x = half_line_max("X", "H");
        let y = half_line_max("Y", "G");
        let product = ProductSpace::new(&x, &y).unwrap();
        let tags = product.fibration_tags();
        let deep = &tags[&pair("H", "G")];
        assert_eq!(
            deep.fiber,
            Descriptor::Join(
                Component::FiberOf(Side::Left, l("H")),
                Component::FiberOf(Side::Right, l("G"))
            )
        );
        assert_eq!(
            deep.base,
            Descriptor::OrderedProduct(
                Component::BaseOf(Side::Left, l("H")),
                Component::BaseOf(Side::Right, l("G"))
            )
        );
    }

    #[test]
    fn fiber_product_over_a_point_recovers_the_ordered_product() {
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let f = BMap::new(x.clone(), point("P"), []).unwrap();
        let g = BMap::new(y.clone(), point("P"), []).unwrap();
        let fp = fiber_product(&f, &g).unwrap();
        let product = ProductSpace::new(&x, &y).unwrap();
        assert_eq!(fp.elements, *product.space().hypersurfaces());
        assert!(fp.psub_ok);
        assert!(fp.functionals.is_empty());
        assert_eq!(fp.tags[&pair("H", "G")], FiberFaceKind::JoinType);
        assert_eq!(fp.tags[&pair("H", "Y")], FiberFaceKind::FiberProduct);
    }

    #[test]
    fn graph_fiber_product_matches_the_domain_poset() {
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let f = BMap::new(
            x.clone(),
            y.clone(),
            [(l("H"), MonoidVector::unit(l("G")))],
        )
        .unwrap();
        let fp = fiber_product(&f, &BMap::identity(&y)).unwrap();
        assert_eq!(fp.elements, BTreeSet::from([pair("H", "G")]));
        assert_eq!(
            fp.functionals[&l("G")],
            MonoidVector::from_pairs([
                (left_label(&l("H")), BigInt::from(1)),
                (right_label(&l("G")), BigInt::from(-1)),
            ])
        );
        assert!(fp.psub_ok, "the diagonal is resolved by the product fan");
        assert_eq!(fp.tags[&pair("H", "G")], FiberFaceKind::FiberProduct);
    }

    #[test]
    fn fiber_product_flags_faces_over_the_target_interior() {
        let x = half_line_min("X", "H");
        let y = half_line_min("Y", "G");
        let z = half_line_min("Z", "E");
        let f = BMap::new(x.clone(), z.clone(), [(l("H"), MonoidVector::zero())]).unwrap();
        let g = BMap::new(y.clone(), z.clone(), [(l("G"), MonoidVector::zero())]).unwrap();
        let fp = fiber_product(&f, &g).unwrap();
        assert_eq!(fp.tags[&pair("H", "G")], FiberFaceKind::JoinType);
        assert_eq!(fp.tags[&pair("H", "Y")], FiberFaceKind::FiberProduct);
        assert_eq!(fp.functionals[&l("E")], MonoidVector::zero());
        assert!(fp.psub_ok);
    }

    #[test]
    fn products_commute_up_to_swapping_pair_components() {
        let x = CornersSpace::total_chain(l("X"), &[], &[l("H1"), l("H2")]).unwrap();
        let y = half_line_max("Y", "G");
        let xy = ProductSpace::new(&x, &y).unwrap();
        let yx = ProductSpace::new(&y, &x).unwrap();
        let swap = |label: &Label| {
            let p = &xy.pairs[label];
            PairLabel {
                left: p.right.clone(),
                right: p.left.clone(),
            }
            .encoded()
        };
        let swapped: BTreeSet<Label> = xy.space().hypersurfaces().iter().map(swap).collect();
        assert_eq!(swapped, *yx.space().hypersurfaces());
        let swapped_corners: BTreeSet<BTreeSet<Label>> = xy
            .space()
            .corners()
            .iter()
            .map(|s| s.iter().map(swap).collect())
            .collect();
        assert_eq!(swapped_corners, *yx.space().corners());
        for (a, b) in xy.space().order().pairs() {
            if xy.space().hypersurfaces().contains(a) && xy.space().hypersurfaces().contains(b) {
                assert!(yx.space().order().less(&swap(a), &swap(b)));
            }
        }
    }

    #[test]
    fn products_associate_up_to_flattening_pair_components() {
        let x = half_line_min("X", "H");
        let y = half_line_max("Y", "G");
        let z = half_line_min("Z", "E");
        let xy = ProductSpace::new(&x, &y).unwrap();
        let xy_z = ProductSpace::new(xy.space(), &z).unwrap();
        let yz = ProductSpace::new(&y, &z).unwrap();
        let x_yz = ProductSpace::new(&x, yz.space()).unwrap();
        let flatten_left = |label: &Label| -> (Label, Label, Label) {
            let p = &xy_z.pairs[label];
            if p.left == *xy.space().interior() {
                (l("X"), l("Y"), p.right.clone())
            } else {
                let inner = &xy.pairs[&p.left];
                (inner.left.clone(), inner.right.clone(), p.right.clone())
            }
        };
        let flatten_right = |label: &Label| -> (Label, Label, Label) {
            let p = &x_yz.pairs[label];
            if p.right == *yz.space().interior() {
                (p.left.clone(), l("Y"), l("Z"))
            } else {
                let inner = &yz.pairs[&p.right];
                (p.left.clone(), inner.left.clone(), inner.right.clone())
            }
        };
        let left: BTreeSet<_> = xy_z
            .space()
            .hypersurfaces()
            .iter()
            .map(flatten_left)
            .collect();
        let right: BTreeSet<_> = x_yz
            .space()
            .hypersurfaces()
            .iter()
            .map(flatten_right)
            .collect();
        assert_eq!(left, right);
        let left_corners: BTreeSet<BTreeSet<_>> = xy_z
            .space()
            .corners()
            .iter()
            .map(|s| s.iter().map(flatten_left).collect())
            .collect();
        let right_corners: BTreeSet<BTreeSet<_>> = x_yz
            .space()
            .corners()
            .iter()
            .map(|s| s.iter().map(flatten_right).collect())
            .collect();
        assert_eq!(left_corners, right_corners);
    }

    /// Random valid space: hypersurfaces on random sides of the interior,
    /// random compatible mutual order, every chain a corner.
    fn build_space(tag: &str, sides: &[bool], edges: &[bool]) -> CornersSpace {
        let n = sides.len();
        let labels: Vec<Label> = (0..n).map(|i| l(&format!("{tag}{i}"))).collect();
        let interior = l(&format!("{tag}int"));
        let mut order = Vec::new();
        for (i, h) in labels.iter().enumerate() {
            if sides[i] {
                order.push((interior.clone(), h.clone()));
            } else {
                order.push((h.clone(), interior.clone()));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                // Adding h_i < h_j is consistent unless it reverses the
                // interior relations.
                if edges[i * n + j] && !(sides[i] && !sides[j]) {
                    order.push((labels[i].clone(), labels[j].clone()));
                }
            }
        }
        let ord = crate::corners::PartialOrder::new(order.clone()).unwrap();
        let mut corners = Vec::new();
        for mask in 0u32..1 << n {
            let subset: Vec<&Label> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| &labels[i]).collect();
            let chain = subset
                .iter()
                .enumerate()
                .all(|(a, x)| subset[a + 1..].iter().all(|y| ord.comparable(x, y)));
            if chain {
                corners.push(subset.into_iter().cloned().collect::<BTreeSet<Label>>());
            }
        }
        CornersSpace::new(interior, labels, order, corners).unwrap()
    }

    fn arb_space(tag: &'static str, max_h: usize) -> impl Strategy<Value = CornersSpace> {
        (0..=max_h).prop_flat_map(move |n| {
            (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n * n),
            )
                .prop_map(move |(sides, edges)| build_space(tag, &sides, &edges))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_products_cross_check_and_match_the_face_census(
            x in arb_space("a", 2),
            y in arb_space("b", 2),
            picks in proptest::collection::vec(any::<bool>(), 16),
        ) {
            // Blow-up route equals chain route (asserted inside).
            let blown = ordered_product_blowup(&x, &y).unwrap();
            // Any admissible interleaving of the two blocks agrees.
            let (lower, upper) = product_center_pairs(&x, &y);
            let lt = |a: &(Label, Label), b: &(Label, Label)| center_lt(&x, &y, a, b);
            let mut lo = std::collections::VecDeque::from(linear_extension(&lower, &lt, false));
            let mut hi = std::collections::VecDeque::from(linear_extension(&upper, &lt, true));
            let mut seq = Vec::new();
            let mut turn = picks.iter().cycle();
            while !lo.is_empty() || !hi.is_empty() {
                let take_lower = if lo.is_empty() {
                    false
                } else if hi.is_empty() {
                    true
                } else {
                    *turn.next().unwrap()
                };
                seq.push(if take_lower { lo.pop_front().unwrap() } else { hi.pop_front().unwrap() });
            }
            prop_assert!(is_admissible_sequence(&x, &y, &seq));
            prop_assert_eq!(&ordered_product_blowup_sequence(&x, &y, &seq).unwrap(), &blown);
            // Face census: the product hypersurfaces are exactly the face
            // pairs comparable to the pair of interiors.
            let product = ProductSpace::new(&x, &y).unwrap();
            let mut expected = BTreeSet::new();
            for a in [None].into_iter().chain(x.hypersurfaces().iter().cloned().map(Some)) {
                for b in [None].into_iter().chain(y.hypersurfaces().iter().cloned().map(Some)) {
                    let e = (a.clone(), b);
                    if e != (None, None) && basepoint_comparable(&x, &y, &e) {
                        expected.insert(elem_pair(&x, &y, &e).encoded());
                    }
                }
            }
            prop_assert_eq!(&expected, product.space().hypersurfaces());
            // Every product fan is a genuine fan.
            for (_, fan) in product.refined().fans() {
                fan.validate().unwrap();
            }
        }
    }
}

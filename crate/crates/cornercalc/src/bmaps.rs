//! Rigid interior b-maps as boundary-exponent matrices, their structural
//! predicates, and lifting through blow-ups.
//!
//! A map is recorded by the exponents `e(G, H)` with which the defining
//! function of codomain hypersurface `G` pulls back along domain hypersurface
//! `H`; positive smooth factors carry no combinatorial content and are
//! quotiented away. The column of `H` is thus a lattice vector over the
//! codomain's hypersurfaces, and composition is matrix multiplication.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::corners::{CornersSpace, FacePoset, RefinedSpace};
use crate::monoid_fan::{Cone, MonoidVector, SignKind, SignVerdict};
use crate::{Error, Label, Result};

/// Exponent vector of a rational combination of boundary defining functions
/// `prod_j rho_j ^ a_j`; the `a_j` may be negative.
pub type RationalCombination = MonoidVector;

/// A rigid interior b-map between ordered-corners models.
///
/// Beyond well-formedness, construction enforces the interior-b-map
/// condition: the image supports of every domain corner lie jointly inside a
/// single codomain corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMap {
    domain: CornersSpace,
    codomain: CornersSpace,
    /// Column per domain hypersurface: the image of its generator.
    columns: BTreeMap<Label, MonoidVector>,
}

/// The structural predicates of a b-map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    /// All exponents lie in {0, 1}.
    pub simple: bool,
    /// Every column has at most one nonzero entry.
    pub b_normal: bool,
    /// The induced basepointed face map preserves the order.
    pub ordered: bool,
    /// Order shadow of a fibration: faces below H land below f♯(H); faces
    /// above H land above f♯(H) or in the codomain interior.
    pub interior_fibered_order: bool,
}

impl BMap {
    pub fn new(
        domain: CornersSpace,
        codomain: CornersSpace,
        columns: impl IntoIterator<Item = (Label, MonoidVector)>,
    ) -> Result<BMap> {
        let mut cols: BTreeMap<Label, MonoidVector> = BTreeMap::new();
        for (h, v) in columns {
            if !domain.hypersurfaces().contains(&h) {
                return Err(Error::InvalidMap(format!(
                    "column for {h}, which is not a domain hypersurface"
                )));
            }
            if !v.is_nonnegative() {
                return Err(Error::InvalidMap(format!(
                    "column of {h} has a negative exponent"
                )));
            }
            if let Some(g) = v.support().find(|g| !codomain.hypersurfaces().contains(*g)) {
                return Err(Error::InvalidMap(format!(
                    "column of {h} mentions {g}, which is not a codomain hypersurface"
                )));
            }
            cols.insert(h, v);
        }
        for h in domain.hypersurfaces() {
            cols.entry(h.clone()).or_insert_with(MonoidVector::zero);
        }
        let map = BMap {
            domain,
            codomain,
            columns: cols,
        };
        for simplex in map.domain.maximal_simplices() {
            let image = map.corner_image_support(&simplex);
            if !map.codomain.corners().contains(&image) {
                return Err(Error::InvalidMap(format!(
                    "image of corner {simplex:?} spans {image:?}, which is not a codomain corner"
                )));
            }
        }
        Ok(map)
    }

    pub fn identity(space: &CornersSpace) -> BMap {
        BMap::new(
            space.clone(),
            space.clone(),
            space
                .hypersurfaces()
                .iter()
                .map(|h| (h.clone(), MonoidVector::unit(h.clone()))),
        )
        .expect("identity is a valid b-map")
    }

    pub fn domain(&self) -> &CornersSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &CornersSpace {
        &self.codomain
    }

    pub fn column(&self, h: &Label) -> &MonoidVector {
        &self.columns[h]
    }

    pub fn columns(&self) -> impl Iterator<Item = (&Label, &MonoidVector)> {
        self.columns.iter()
    }

    pub fn exponent(&self, g: &Label, h: &Label) -> BigInt {
        self.columns[h].coeff(g)
    }

    /// Linear extension of the generator images.
    pub fn apply(&self, v: &MonoidVector) -> MonoidVector {
        let mut acc = MonoidVector::zero();
        for (h, n) in v.coords() {
            let col = &self.columns[h];
            acc = acc.add(&MonoidVector::from_pairs(
                col.coords().map(|(g, c)| (g.clone(), c * n)),
            ));
        }
        acc
    }

    fn corner_image_support(&self, simplex: &BTreeSet<Label>) -> BTreeSet<Label> {
        simplex
            .iter()
            .flat_map(|h| self.columns[h].support().cloned())
            .collect()
    }

    /// The induced map on faces with interiors as basepoints. `None` when the
    /// column has two or more nonzero entries (only b-normal maps induce a
    /// single-valued face map).
    pub fn f_sharp(&self, h: &Label) -> Option<Label> {
        if h == self.domain.interior() {
            return Some(self.codomain.interior().clone());
        }
        let col = &self.columns[h];
        let mut support = col.support();
        match (support.next(), support.next()) {
            (None, _) => Some(self.codomain.interior().clone()),
            (Some(g), None) => Some(g.clone()),
            _ => None,
        }
    }

    pub fn classify(&self) -> Classification {
        let simple = self
            .columns
            .values()
            .all(|c| c.coords().all(|(_, n)| n.is_one()));
        let b_normal = self
            .columns
            .values()
            .all(|c| c.support().count() <= 1);

        // The order predicates are conditions on f♯ and only meaningful for
        // b-normal maps.
        let mut ordered = b_normal;
        let mut interior_fibered_order = b_normal;
        if b_normal {
            let dom_elems: Vec<Label> = self
                .domain
                .hypersurfaces()
                .iter()
                .chain([self.domain.interior()])
                .cloned()
                .collect();
            let le_dom = |a: &Label, b: &Label| a == b || self.domain.order().less(a, b);
            let le_cod = |a: &Label, b: &Label| a == b || self.codomain.order().less(a, b);
            let sharp = |a: &Label| self.f_sharp(a).expect("b-normal column");
            for a in &dom_elems {
                for b in &dom_elems {
                    if self.domain.order().less(a, b) && !le_cod(&sharp(a), &sharp(b)) {
                        ordered = false;
                    }
                }
            }
            for h in self.domain.hypersurfaces() {
                let image = sharp(h);
                for other in &dom_elems {
                    if le_dom(other, h) && !le_cod(&sharp(other), &image) {
                        interior_fibered_order = false;
                    }
                    if le_dom(h, other) {
                        let target = sharp(other);
                        if !le_cod(&image, &target) && target != *self.codomain.interior() {
                            interior_fibered_order = false;
                        }
                    }
                }
            }
        }
        Classification {
            simple,
            b_normal,
            ordered,
            interior_fibered_order,
        }
    }

    /// Composition `g ∘ self`; the corner-image condition of the composite is
    /// re-checked, and classification is never assumed from the factors.
    pub fn compose(&self, g: &BMap) -> Result<BMap> {
        if self.codomain != g.domain {
            return Err(Error::InvalidMap(
                "composition through mismatched spaces".into(),
            ));
        }
        BMap::new(
            self.domain.clone(),
            g.codomain.clone(),
            self.columns
                .iter()
                .map(|(h, col)| (h.clone(), g.apply(col))),
        )
    }

    /// The unique lift through a blow-up of the codomain, if it exists.
    ///
    /// For each domain corner, the images of its generators must lie jointly
    /// in one cone of the refinement over the image corner; the lift's
    /// columns are the (integral) membership coefficients. Uniqueness is
    /// asserted by recomputing through every containing cone.
    pub fn lift_through_blowup(&self, refined: &RefinedSpace) -> Result<Option<LiftedBMap>> {
        if refined.base() != &self.codomain {
            return Err(Error::InvalidMap(
                "refinement does not blow up this map's codomain".into(),
            ));
        }
        let mut lifted: BTreeMap<Label, BTreeMap<MonoidVector, BigInt>> = BTreeMap::new();
        for simplex in self.domain.maximal_simplices() {
            let image_support = self.corner_image_support(&simplex);
            let mut contained_somewhere = false;
            for (fan_simplex, fan) in refined.fans() {
                if !image_support.is_subset(fan_simplex) {
                    continue;
                }
                let images: Vec<&MonoidVector> =
                    simplex.iter().map(|h| &self.columns[h]).collect();
                for cone in fan.max_cones() {
                    let coeffs: Option<Vec<Vec<_>>> =
                        images.iter().map(|v| cone.membership(v)).collect();
                    let Some(coeffs) = coeffs else { continue };
                    contained_somewhere = true;
                    for (h, cs) in simplex.iter().zip(coeffs) {
                        let mut col = BTreeMap::new();
                        for (c, ray) in cs.iter().zip(cone.generators()) {
                            assert!(c.is_integer(), "unimodular membership is integral");
                            let n = c.to_integer();
                            if !n.is_zero() {
                                col.insert(ray.clone(), n);
                            }
                        }
                        match lifted.entry(h.clone()) {
                            std::collections::btree_map::Entry::Vacant(e) => {
                                e.insert(col);
                            }
                            std::collections::btree_map::Entry::Occupied(e) => {
                                assert_eq!(
                                    e.get(),
                                    &col,
                                    "lift coefficients must agree across containing cones"
                                );
                            }
                        }
                    }
                }
            }
            if !contained_somewhere {
                return Ok(None);
            }
        }
        for h in self.domain.hypersurfaces() {
            lifted.entry(h.clone()).or_default();
        }
        let lift = LiftedBMap {
            domain: self.domain.clone(),
            target: refined.face_poset(),
            columns: lifted,
        };
        // Blow-down factorization: expanding each ray in base generators must
        // reproduce the original exponents exactly.
        for (h, col) in &lift.columns {
            let mut expanded = MonoidVector::zero();
            for (ray, n) in col {
                expanded = expanded.add(&MonoidVector::from_pairs(
                    ray.coords().map(|(l, c)| (l.clone(), c * n)),
                ));
            }
            assert_eq!(&expanded, &self.columns[h], "blow-down factorization");
        }
        Ok(Some(lift))
    }
}

/// A b-map into a blown-up space: columns are indexed by the blown-up
/// hypersurfaces (rays) of the target refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedBMap {
    domain: CornersSpace,
    target: FacePoset,
    columns: BTreeMap<Label, BTreeMap<MonoidVector, BigInt>>,
}

impl LiftedBMap {
    pub fn domain(&self) -> &CornersSpace {
        &self.domain
    }

    pub fn target(&self) -> &FacePoset {
        &self.target
    }

    pub fn column(&self, h: &Label) -> &BTreeMap<MonoidVector, BigInt> {
        &self.columns[h]
    }

    pub fn columns(&self) -> impl Iterator<Item = (&Label, &BTreeMap<MonoidVector, BigInt>)> {
        self.columns.iter()
    }

    pub fn is_simple(&self) -> bool {
        self.columns
            .values()
            .all(|c| c.values().all(|n| n.is_one()))
    }

    pub fn is_b_normal(&self) -> bool {
        self.columns.values().all(|c| c.len() <= 1)
    }
}

/// How a rational combination extends to a blown-up space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaVerdict {
    /// Extends smoothly with values in [0, ∞).
    SmoothToHalfLine,
    /// The inverse extends smoothly: values in (0, ∞].
    SmoothToInverseHalfLine,
    /// Smooth as a b-map to [0, ∞]; the direction varies by chart.
    SmoothToExtendedHalfLine,
    /// Some chart mixes vanishing and blowing up: no smooth extension.
    NotSmooth,
}

/// Full sign analysis of one rational combination on a refinement.
#[derive(Clone, Debug)]
pub struct SigmaReport {
    pub verdict: SigmaVerdict,
    /// Per max cone of each fan, in deterministic order.
    pub per_cone: Vec<(BTreeSet<Label>, Cone, SignVerdict)>,
    /// Rays on which the combination vanishes (positive pairing).
    pub vanishing: BTreeSet<MonoidVector>,
    /// Rays on which the inverse vanishes (negative pairing).
    pub inverse_vanishing: BTreeSet<MonoidVector>,
}

/// Decides whether the combination lifts smoothly to the blown-up space, and
/// where it (and its inverse) vanish.
pub fn sigma_lift(refined: &RefinedSpace, sigma: &RationalCombination) -> SigmaReport {
    let mut per_cone = Vec::new();
    let mut any_indeterminate = false;
    let mut any_positive = false;
    let mut any_negative = false;
    for (simplex, fan) in refined.fans() {
        for cone in fan.max_cones() {
            let verdict = cone.functional_sign(sigma);
            match verdict.kind {
                SignKind::Indeterminate => any_indeterminate = true,
                SignKind::NonNegative => any_positive = true,
                SignKind::NonPositive => any_negative = true,
                SignKind::Zero => {}
            }
            per_cone.push((simplex.clone(), cone.clone(), verdict));
        }
    }
    let mut vanishing = BTreeSet::new();
    let mut inverse_vanishing = BTreeSet::new();
    for ray in refined.rays() {
        let p = sigma.dot(&ray);
        if p.is_positive() {
            vanishing.insert(ray);
        } else if p.is_negative() {
            inverse_vanishing.insert(ray);
        }
    }
    let verdict = if any_indeterminate {
        SigmaVerdict::NotSmooth
    } else {
        match (any_positive, any_negative) {
            (true, true) => SigmaVerdict::SmoothToExtendedHalfLine,
            (false, true) => SigmaVerdict::SmoothToInverseHalfLine,
            _ => SigmaVerdict::SmoothToHalfLine,
        }
    };
    SigmaReport {
        verdict,
        per_cone,
        vanishing,
        inverse_vanishing,
    }
}

/// True iff the joint zero set of the combinations meets every chart of the
/// blown-up space in a boundary face (lifts to a p-submanifold).
pub fn psub_lift(refined: &RefinedSpace, sigmas: &[RationalCombination]) -> bool {
    refined
        .fans()
        .all(|(_, fan)| fan.kernel_face_check_all(sigmas))
}

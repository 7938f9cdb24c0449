//! Free commutative monoids on labeled generators, unimodular simplicial
//! cones, and fans refining the positive orthant.
//!
//! A boundary face with hypersurfaces `h1..hn` is modeled by the free
//! commutative monoid on those labels. An iterated boundary blow-up is
//! recorded as a *fan*: a set of unimodular simplicial cones covering the
//! positive orthant and pairwise intersecting in common faces. Blowing up a
//! face is stellar subdivision: in every maximal cone containing the center,
//! exactly one center generator is replaced by the sum of all of them.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals); the
//! predicates answered here are sign and face conditions where rounding would
//! be fatal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::fm::{eq_pair, feasible, Ineq};
use crate::ratmat::{self, Rat};
use crate::{Error, Label, Result};

/// Sparse integer vector indexed by hypersurface labels.
///
/// Cone generators are componentwise nonnegative and nonzero; functionals
/// (exponent vectors of rational combinations of boundary defining functions)
/// may carry any sign. The zero vector is reserved for the honorary interior
/// element. Zero entries are never stored, so derived equality and ordering
/// are canonical.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonoidVector {
    coords: BTreeMap<Label, BigInt>,
}

impl MonoidVector {
    pub fn zero() -> Self {
        MonoidVector::default()
    }

    /// The unit generator of one label.
    pub fn unit(label: Label) -> Self {
        MonoidVector::from_pairs([(label, 1)])
    }

    pub fn from_pairs<I, N>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Label, N)>,
        N: Into<BigInt>,
    {
        let mut coords = BTreeMap::new();
        for (label, n) in pairs {
            let n: BigInt = n.into();
            if !n.is_zero() {
                *coords.entry(label).or_insert_with(BigInt::zero) += n;
            }
        }
        coords.retain(|_, v| !v.is_zero());
        MonoidVector { coords }
    }

    pub fn coeff(&self, label: &Label) -> BigInt {
        self.coords.get(label).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coords(&self) -> impl Iterator<Item = (&Label, &BigInt)> {
        self.coords.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Label> {
        self.coords.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coords.values().all(|v| !v.is_negative())
    }

    pub fn add(&self, other: &MonoidVector) -> MonoidVector {
        let mut coords = self.coords.clone();
        for (label, n) in &other.coords {
            *coords.entry(label.clone()).or_insert_with(BigInt::zero) += n;
        }
        coords.retain(|_, v| !v.is_zero());
        MonoidVector { coords }
    }

    pub fn sub(&self, other: &MonoidVector) -> MonoidVector {
        let mut coords = self.coords.clone();
        for (label, n) in &other.coords {
            *coords.entry(label.clone()).or_insert_with(BigInt::zero) -= n;
        }
        coords.retain(|_, v| !v.is_zero());
        MonoidVector { coords }
    }

    pub fn sum<'a>(vs: impl IntoIterator<Item = &'a MonoidVector>) -> MonoidVector {
        vs.into_iter()
            .fold(MonoidVector::zero(), |acc, v| acc.add(v))
    }

    /// Standard integer pairing over the shared support.
    pub fn dot(&self, other: &MonoidVector) -> BigInt {
        self.coords
            .iter()
            .filter_map(|(l, a)| other.coords.get(l).map(|b| a * b))
            .sum()
    }

    /// Rewrites every label; summing coefficients when labels collide.
    pub fn map_labels(&self, f: impl Fn(&Label) -> Label) -> MonoidVector {
        MonoidVector::from_pairs(self.coords.iter().map(|(l, n)| (f(l), n.clone())))
    }

    /// Dense rational coordinates in the given label order.
    pub(crate) fn to_dense(&self, order: &[Label]) -> Vec<Rat> {
        order
            .iter()
            .map(|l| Rat::from_integer(self.coeff(l)))
            .collect()
    }
}

impl fmt::Display for MonoidVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        for (i, (label, n)) in self.coords.iter().enumerate() {
            let mag = n.magnitude();
            let sign = if n.is_negative() { "-" } else { "+" };
            if i > 0 || n.is_negative() {
                write!(f, "{sign}")?;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "{label}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MonoidVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Whether a rational combination of boundary defining functions has a
/// determinate sign on a cone, together with the witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignKind {
    NonNegative,
    NonPositive,
    Zero,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignVerdict {
    pub kind: SignKind,
    /// Generators with strictly positive pairing (the combination vanishes there).
    pub positive: Vec<MonoidVector>,
    /// Generators with strictly negative pairing (the inverse vanishes there).
    pub negative: Vec<MonoidVector>,
}

impl SignVerdict {
    pub fn is_determinate(&self) -> bool {
        self.kind != SignKind::Indeterminate
    }
}

/// Unimodular simplicial cone: a canonically sorted list of linearly
/// independent, componentwise-nonnegative generators. Every sublist of
/// generators spans a face, which is again a `Cone`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cone {
    generators: Vec<MonoidVector>,
}

impl Cone {
    pub fn new(generators: Vec<MonoidVector>) -> Result<Cone> {
        let mut gens = generators;
        gens.sort();
        gens.dedup();
        for g in &gens {
            if g.is_zero() {
                return Err(Error::DegenerateCone("zero generator".into()));
            }
            if !g.is_nonnegative() {
                return Err(Error::DegenerateCone(format!(
                    "generator {g} has a negative coordinate"
                )));
            }
        }
        let order = support_order(&gens);
        let rows: Vec<Vec<Rat>> = gens.iter().map(|g| g.to_dense(&order)).collect();
        if ratmat::rank(&rows) != gens.len() {
            return Err(Error::DegenerateCone(format!(
                "generators {} are linearly dependent",
                Cone { generators: gens }
            )));
        }
        Ok(Cone { generators: gens })
    }

    pub fn generators(&self) -> &[MonoidVector] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// Union of the generators' supports.
    pub fn support(&self) -> BTreeSet<Label> {
        self.generators
            .iter()
            .flat_map(|g| g.support().cloned())
            .collect()
    }

    /// True when `self`'s generators form a sub(multi)set of `other`'s.
    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.generators
            .iter()
            .all(|g| other.generators.contains(g))
    }

    /// All faces, including the empty cone and the cone itself.
    pub fn faces(&self) -> Vec<Cone> {
        let n = self.generators.len();
        (0..1u32 << n)
            .map(|mask| {
                let gens = self
                    .generators
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, g)| g.clone())
                    .collect();
                // Sub-lists of an independent list stay independent.
                Cone { generators: gens }
            })
            .collect()
    }

    /// Unique nonnegative rational coefficients expressing `v` over the
    /// generators, or `None` when `v` lies outside the cone.
    pub fn membership(&self, v: &MonoidVector) -> Option<Vec<Rat>> {
        self.solve(v)
            .filter(|coeffs| coeffs.iter().all(ratmat::is_nonneg))
    }

    /// Like [`membership`](Self::membership) but requiring strictly positive
    /// coefficients: membership in the relative interior.
    pub fn relint_membership(&self, v: &MonoidVector) -> Option<Vec<Rat>> {
        self.solve(v)
            .filter(|coeffs| coeffs.iter().all(|c| c.is_positive()))
            .or_else(|| (self.generators.is_empty() && v.is_zero()).then(Vec::new))
    }

    fn solve(&self, v: &MonoidVector) -> Option<Vec<Rat>> {
        let mut order = support_order(&self.generators);
        for l in v.support() {
            if !order.contains(l) {
                order.push(l.clone());
            }
        }
        order.sort();
        let cols: Vec<Vec<Rat>> = self.generators.iter().map(|g| g.to_dense(&order)).collect();
        ratmat::solve_in_column_span(&cols, &v.to_dense(&order))
    }

    /// Sign pattern of the functional `f` against every generator.
    pub fn functional_sign(&self, f: &MonoidVector) -> SignVerdict {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for g in &self.generators {
            let p = f.dot(g);
            if p.is_positive() {
                positive.push(g.clone());
            } else if p.is_negative() {
                negative.push(g.clone());
            }
        }
        let kind = match (positive.is_empty(), negative.is_empty()) {
            (true, true) => SignKind::Zero,
            (false, true) => SignKind::NonNegative,
            (true, false) => SignKind::NonPositive,
            (false, false) => SignKind::Indeterminate,
        };
        SignVerdict {
            kind,
            positive,
            negative,
        }
    }

    /// True iff the intersection of the cone with the joint kernel of `fs`
    /// equals the face spanned by the generators lying in that kernel.
    ///
    /// Decided exactly: the intersection is *larger* than the face iff some
    /// nonnegative generator combination with positive mass outside the
    /// in-kernel generators still pairs to zero with every functional.
    pub fn kernel_face_check(&self, fs: &[MonoidVector]) -> bool {
        let n = self.generators.len();
        if n == 0 {
            return true;
        }
        let pairings: Vec<Vec<BigInt>> = fs
            .iter()
            .map(|f| self.generators.iter().map(|g| f.dot(g)).collect())
            .collect();
        let out_of_kernel: Vec<usize> = (0..n)
            .filter(|&i| pairings.iter().any(|row| !row[i].is_zero()))
            .collect();
        if out_of_kernel.is_empty() {
            return true;
        }
        let mut system: Vec<Ineq> = Vec::new();
        for i in 0..n {
            let mut coeffs = vec![Rat::zero(); n];
            coeffs[i] = Rat::one();
            system.push(Ineq::ge(coeffs, Rat::zero()));
        }
        for row in &pairings {
            let coeffs: Vec<Rat> = row.iter().map(|p| Rat::from_integer(p.clone())).collect();
            system.extend(eq_pair(coeffs, Rat::zero()));
        }
        let mut mass = vec![Rat::zero(); n];
        for &i in &out_of_kernel {
            mass[i] = Rat::one();
        }
        system.push(Ineq::ge(mass, Rat::one()));
        !feasible(system, n)
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn support_order(gens: &[MonoidVector]) -> Vec<Label> {
    let set: BTreeSet<Label> = gens.iter().flat_map(|g| g.support().cloned()).collect();
    set.into_iter().collect()
}

/// A refinement of the positive orthant on an ambient label set: full
/// dimensional unimodular simplicial cones, pairwise intersecting in common
/// faces, jointly covering the orthant.
///
/// Two fans compare equal exactly when their ambient sets and max-cone sets
/// coincide; refinements determine the iterated blow-up up to diffeomorphism,
/// so `==` is the right notion of "same blown-up space".
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fan {
    ambient: BTreeSet<Label>,
    max_cones: BTreeSet<Cone>,
}

impl Fan {
    /// The trivial refinement: one orthant cone on unit generators.
    pub fn orthant(labels: impl IntoIterator<Item = Label>) -> Fan {
        let ambient: BTreeSet<Label> = labels.into_iter().collect();
        let gens = ambient.iter().cloned().map(MonoidVector::unit).collect();
        let cone = Cone { generators: gens };
        Fan {
            ambient,
            max_cones: BTreeSet::from([cone]),
        }
    }

    /// Builds a fan from explicit max cones, checking every invariant.
    pub fn new(
        ambient: impl IntoIterator<Item = Label>,
        max_cones: impl IntoIterator<Item = Cone>,
    ) -> Result<Fan> {
        let fan = Fan {
            ambient: ambient.into_iter().collect(),
            max_cones: max_cones.into_iter().collect(),
        };
        fan.validate()?;
        Ok(fan)
    }

    pub(crate) fn from_parts_unchecked(
        ambient: BTreeSet<Label>,
        max_cones: BTreeSet<Cone>,
    ) -> Fan {
        Fan { ambient, max_cones }
    }

    pub fn ambient(&self) -> &BTreeSet<Label> {
        &self.ambient
    }

    pub fn max_cones(&self) -> impl Iterator<Item = &Cone> {
        self.max_cones.iter()
    }

    pub fn max_cone_count(&self) -> usize {
        self.max_cones.len()
    }

    /// True when the generator set of `c` is a face of some max cone.
    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.max_cones.iter().any(|m| c.is_face_of(m))
    }

    /// All faces of all max cones, deduplicated.
    pub fn faces(&self) -> BTreeSet<Cone> {
        self.max_cones.iter().flat_map(Cone::faces).collect()
    }

    /// The blown-up hypersurfaces: all 1-dimensional faces' generators.
    pub fn rays(&self) -> BTreeSet<MonoidVector> {
        self.max_cones
            .iter()
            .flat_map(|c| c.generators().iter().cloned())
            .collect()
    }

    /// Faces entirely supported on a label subset (restriction of the fan to
    /// a shared sub-simplex).
    pub fn faces_supported_on(&self, labels: &BTreeSet<Label>) -> BTreeSet<Cone> {
        self.faces()
            .into_iter()
            .filter(|c| c.support().is_subset(labels))
            .collect()
    }

    /// Stellar subdivision at `center`: in every max cone containing the
    /// center, exactly one center generator is replaced by the sum of all of
    /// them. A 1-dimensional center yields the identity. Preserves all fan
    /// invariants, which are therefore not re-checked here.
    pub fn star_subdivide(&self, center: &Cone) -> Result<Fan> {
        if center.generators().is_empty() {
            return Err(Error::UnsupportedCenter(
                "empty center (codimension-0 blow-up)".into(),
            ));
        }
        if !self.contains_cone(center) {
            return Err(Error::CenterNotACone(format!(
                "{center} is not a cone of the fan (ill-ordered blow-up sequence)"
            )));
        }
        let barycenter = MonoidVector::sum(center.generators());
        let mut max_cones = BTreeSet::new();
        for cone in &self.max_cones {
            if center.is_face_of(cone) {
                for replaced in center.generators() {
                    let gens: Vec<MonoidVector> = cone
                        .generators()
                        .iter()
                        .map(|g| {
                            if g == replaced {
                                barycenter.clone()
                            } else {
                                g.clone()
                            }
                        })
                        .collect();
                    let mut gens = gens;
                    gens.sort();
                    max_cones.insert(Cone { generators: gens });
                }
            } else {
                max_cones.insert(cone.clone());
            }
        }
        Ok(Fan {
            ambient: self.ambient.clone(),
            max_cones,
        })
    }

    /// Checks every fan invariant, returning the first violation found.
    pub fn validate(&self) -> Result<()> {
        let order: Vec<Label> = self.ambient.iter().cloned().collect();
        for cone in &self.max_cones {
            if !cone.support().is_subset(&self.ambient) {
                return Err(Error::FanInvariant(format!(
                    "cone {cone} uses labels outside the ambient set"
                )));
            }
            if cone.dim() != order.len() {
                return Err(Error::FanInvariant(format!(
                    "cone {cone} is not full-dimensional (dim {} in ambient {})",
                    cone.dim(),
                    order.len()
                )));
            }
            let m: Vec<Vec<BigInt>> = cone
                .generators()
                .iter()
                .map(|g| order.iter().map(|l| g.coeff(l)).collect())
                .collect();
            if !ratmat::det_bigint(&m).magnitude().is_one() {
                return Err(Error::FanInvariant(format!("cone {cone} is not unimodular")));
            }
        }
        let cones: Vec<&Cone> = self.max_cones.iter().collect();
        for (i, a) in cones.iter().enumerate() {
            for b in &cones[i + 1..] {
                if !intersect_in_common_face(a, b, &order) {
                    return Err(Error::FanInvariant(format!(
                        "cones {a} and {b} do not intersect in a common face"
                    )));
                }
            }
        }
        // With interiors pairwise disjoint (common faces) and all cones inside
        // the orthant, covering is exactly the volume identity
        //   sum over cones of 1 / prod_i (coordinate sum of generator i) = 1.
        let mut total = Rat::zero();
        for cone in &self.max_cones {
            let mut denom = BigInt::one();
            for g in cone.generators() {
                let s: BigInt = g.coords().map(|(_, n)| n).sum();
                denom *= s;
            }
            total += Rat::new(BigInt::one(), denom);
        }
        if !total.is_one() {
            return Err(Error::FanInvariant(format!(
                "max cones cover {total} of the positive orthant"
            )));
        }
        Ok(())
    }

    /// Exhaustive covering test: every lattice vector with coordinate sum
    /// ≤ `max_sum` lies in at least one max cone and in exactly one face's
    /// relative interior.
    pub fn covering_sample_check(&self, max_sum: u32) -> bool {
        let order: Vec<Label> = self.ambient.iter().cloned().collect();
        let faces = self.faces();
        for point in lattice_points(order.len(), max_sum) {
            let v = MonoidVector::from_pairs(
                order.iter().cloned().zip(point.iter().map(|&x| x as i64)),
            );
            if !self.max_cones.iter().any(|c| c.membership(&v).is_some()) {
                return false;
            }
            let owners = faces
                .iter()
                .filter(|f| f.relint_membership(&v).is_some())
                .count();
            if owners != 1 {
                return false;
            }
        }
        true
    }

    /// Max cones containing `v`.
    pub fn cones_containing(&self, v: &MonoidVector) -> Vec<&Cone> {
        self.max_cones
            .iter()
            .filter(|c| c.membership(v).is_some())
            .collect()
    }

    /// True when the functional has determinate sign on every max cone.
    pub fn has_determinate_sign(&self, f: &MonoidVector) -> bool {
        self.max_cones
            .iter()
            .all(|c| c.functional_sign(f).is_determinate())
    }

    /// Per-cone sign verdicts, in canonical cone order.
    pub fn sign_analysis(&self, f: &MonoidVector) -> Vec<(&Cone, SignVerdict)> {
        self.max_cones
            .iter()
            .map(|c| (c, c.functional_sign(f)))
            .collect()
    }

    /// True when the joint kernel meets every max cone in a face.
    pub fn kernel_face_check_all(&self, fs: &[MonoidVector]) -> bool {
        self.max_cones.iter().all(|c| c.kernel_face_check(fs))
    }
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fan{{")?;
        for (i, c) in self.max_cones.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// Exact test that two full-dimensional simplicial cones meet exactly in the
/// face spanned by their shared generators: infeasibility of a point of the
/// intersection carrying positive mass on a non-shared generator of `a`.
fn intersect_in_common_face(a: &Cone, b: &Cone, order: &[Label]) -> bool {
    let na = a.dim();
    let nb = b.dim();
    let nvars = na + nb;
    let mut system: Vec<Ineq> = Vec::new();
    for i in 0..nvars {
        let mut coeffs = vec![Rat::zero(); nvars];
        coeffs[i] = Rat::one();
        system.push(Ineq::ge(coeffs, Rat::zero()));
    }
    for l in order {
        let mut coeffs = Vec::with_capacity(nvars);
        for g in a.generators() {
            coeffs.push(Rat::from_integer(g.coeff(l)));
        }
        for g in b.generators() {
            coeffs.push(-Rat::from_integer(g.coeff(l)));
        }
        system.extend(eq_pair(coeffs, Rat::zero()));
    }
    let mut mass = vec![Rat::zero(); nvars];
    let mut any_noncommon = false;
    for (i, g) in a.generators().iter().enumerate() {
        if !b.generators().contains(g) {
            mass[i] = Rat::one();
            any_noncommon = true;
        }
    }
    if !any_noncommon {
        // a is a face of b; the intersection is a itself.
        return true;
    }
    system.push(Ineq::ge(mass, Rat::one()));
    !feasible(system, nvars)
}

fn lattice_points(dim: usize, max_sum: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in out {
            let used: u32 = p.iter().sum();
            for x in 0..=max_sum - used {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(name: &str) -> Label {
        Label::new(name)
    }

    fn mv(pairs: &[(&str, i64)]) -> MonoidVector {
        MonoidVector::from_pairs(pairs.iter().map(|&(n, c)| (l(n), c)))
    }

    fn cone(gens: &[&[(&str, i64)]]) -> Cone {
        Cone::new(gens.iter().map(|g| mv(g)).collect()).unwrap()
    }

    fn h(i: usize) -> MonoidVector {
        MonoidVector::unit(l(&format!("h{i}")))
    }

    fn orthant3() -> Fan {
        Fan::orthant([l("h1"), l("h2"), l("h3")])
    }

    /// Single blow-up of the deepest corner.
    fn fan_b() -> Fan {
        orthant3()
            .star_subdivide(&Cone::new(vec![h(1), h(2), h(3)]).unwrap())
            .unwrap()
    }

    /// Single blow-up of the 2-3 corner.
    fn fan_c() -> Fan {
        orthant3()
            .star_subdivide(&Cone::new(vec![h(2), h(3)]).unwrap())
            .unwrap()
    }

    /// Common resolution: deepest corner first, then the 2-3 corner.
    fn fan_d() -> Fan {
        fan_b()
            .star_subdivide(&Cone::new(vec![h(2), h(3)]).unwrap())
            .unwrap()
    }

    #[test]
    fn membership_inside_a_planar_cone() {
        let c = cone(&[&[("a", 1)], &[("a", 1), ("b", 1)]]);
        let coeffs = c.membership(&mv(&[("a", 2), ("b", 1)])).unwrap();
        // generators sort as (a) < (a+b): coefficients 1, 1
        assert_eq!(coeffs, vec![crate::ratmat::rat(1), crate::ratmat::rat(1)]);
    }

    #[test]
    fn membership_rejects_sign_violation() {
        let c = cone(&[&[("a", 1)], &[("a", 1), ("b", 1)]]);
        assert!(c.membership(&mv(&[("b", 1)])).is_none());
    }

    #[test]
    fn membership_rejects_unblown_generator_after_corner_blowup() {
        let c = cone(&[
            &[("h1", 1), ("h2", 1), ("h3", 1)],
            &[("h2", 1)],
            &[("h3", 1)],
        ]);
        assert!(c.membership(&h(1)).is_none());
    }

    #[test]
    fn membership_recombines_exactly() {
        let c = cone(&[
            &[("h1", 1), ("h2", 1), ("h3", 1)],
            &[("h2", 1), ("h3", 1)],
            &[("h3", 1)],
        ]);
        let v = mv(&[("h1", 2), ("h2", 5), ("h3", 7)]);
        let coeffs = c.membership(&v).unwrap();
        let mut acc = MonoidVector::zero();
        for (coeff, g) in coeffs.iter().zip(c.generators()) {
            assert!(coeff.is_integer());
            let n = coeff.to_integer();
            acc = acc.add(&MonoidVector::from_pairs(
                g.coords().map(|(l, c)| (l.clone(), c * &n)),
            ));
        }
        assert_eq!(acc, v);
    }

    #[test]
    fn deepest_corner_blowup_has_three_cones() {
        let expected = [
            cone(&[&[("h1", 1), ("h2", 1), ("h3", 1)], &[("h2", 1)], &[("h3", 1)]]),
            cone(&[&[("h1", 1)], &[("h1", 1), ("h2", 1), ("h3", 1)], &[("h3", 1)]]),
            cone(&[&[("h1", 1)], &[("h2", 1)], &[("h1", 1), ("h2", 1), ("h3", 1)]]),
        ];
        let fan = fan_b();
        assert_eq!(fan.max_cone_count(), 3);
        for c in &expected {
            assert!(fan.max_cones().any(|m| m == c));
        }
        fan.validate().unwrap();
    }

    #[test]
    fn edge_blowup_has_two_cones() {
        let expected = [
            cone(&[&[("h1", 1)], &[("h2", 1), ("h3", 1)], &[("h2", 1)]]),
            cone(&[&[("h1", 1)], &[("h2", 1), ("h3", 1)], &[("h3", 1)]]),
        ];
        let fan = fan_c();
        assert_eq!(fan.max_cone_count(), 2);
        for c in &expected {
            assert!(fan.max_cones().any(|m| m == c));
        }
        fan.validate().unwrap();
    }

    #[test]
    fn iterated_blowups_reach_the_common_resolution() {
        let expected = Fan::new(
            [l("h1"), l("h2"), l("h3")],
            [
                cone(&[
                    &[("h1", 1), ("h2", 1), ("h3", 1)],
                    &[("h2", 1), ("h3", 1)],
                    &[("h2", 1)],
                ]),
                cone(&[
                    &[("h1", 1), ("h2", 1), ("h3", 1)],
                    &[("h2", 1), ("h3", 1)],
                    &[("h3", 1)],
                ]),
                cone(&[&[("h1", 1)], &[("h1", 1), ("h2", 1), ("h3", 1)], &[("h3", 1)]]),
                cone(&[&[("h1", 1)], &[("h2", 1)], &[("h1", 1), ("h2", 1), ("h3", 1)]]),
            ],
        )
        .unwrap();
        assert_eq!(fan_d(), expected);
    }

    #[test]
    fn opposite_blowup_order_gives_the_same_resolution() {
        // After the edge blow-up, the deep corner survives as the cone
        // spanned by h1 and the new front face h2+h3.
        let lifted_center = cone(&[&[("h1", 1)], &[("h2", 1), ("h3", 1)]]);
        let other_order = fan_c().star_subdivide(&lifted_center).unwrap();
        assert_eq!(other_order, fan_d());
        assert_ne!(fan_b(), fan_d());
        assert_ne!(orthant3(), fan_b());
    }

    #[test]
    fn codimension_one_blowup_is_the_identity() {
        let fan = fan_c();
        let center = Cone::new(vec![h(1)]).unwrap();
        assert_eq!(fan.star_subdivide(&center).unwrap(), fan);
    }

    #[test]
    fn vanished_center_is_rejected() {
        // The deep corner is no longer a cone after the edge blow-up.
        let center = Cone::new(vec![h(1), h(2), h(3)]).unwrap();
        assert!(matches!(
            fan_c().star_subdivide(&center),
            Err(Error::CenterNotACone(_))
        ));
    }

    #[test]
    fn empty_center_is_rejected() {
        let center = Cone::new(vec![]).unwrap();
        assert!(matches!(
            orthant3().star_subdivide(&center),
            Err(Error::UnsupportedCenter(_))
        ));
    }

    #[test]
    fn subdivision_preserves_validity_and_covering() {
        for fan in [orthant3(), fan_b(), fan_c(), fan_d()] {
            fan.validate().unwrap();
            assert!(fan.covering_sample_check(5));
        }
    }

    #[test]
    fn overlapping_cones_fail_validation() {
        let a = cone(&[&[("a", 1)], &[("a", 1), ("b", 1)]]);
        let b = cone(&[&[("a", 1)], &[("b", 1)]]);
        assert!(matches!(
            Fan::new([l("a"), l("b")], [a, b]),
            Err(Error::FanInvariant(_))
        ));
    }

    #[test]
    fn covering_gap_fails_validation() {
        let a = cone(&[&[("a", 1)], &[("a", 1), ("b", 1)]]);
        assert!(matches!(
            Fan::new([l("a"), l("b")], [a]),
            Err(Error::FanInvariant(_))
        ));
    }

    #[test]
    fn non_unimodular_cone_fails_validation() {
        let a = cone(&[&[("a", 1)], &[("a", 1), ("b", 2)]]);
        let b = cone(&[&[("a", 1), ("b", 2)], &[("b", 1)]]);
        assert!(matches!(
            Fan::new([l("a"), l("b")], [a, b]),
            Err(Error::FanInvariant(_))
        ));
    }

    #[test]
    fn quotient_sign_is_indeterminate_after_corner_blowup() {
        let c = cone(&[
            &[("h1", 1)],
            &[("h2", 1)],
            &[("h1", 1), ("h2", 1), ("h3", 1)],
        ]);
        let f = h(1).sub(&h(2));
        let verdict = c.functional_sign(&f);
        assert_eq!(verdict.kind, SignKind::Indeterminate);
        assert_eq!(verdict.positive, vec![h(1)]);
        assert_eq!(verdict.negative, vec![h(2)]);
    }

    #[test]
    fn quotient_sign_is_nonnegative_on_one_side_of_edge_blowup() {
        let c = cone(&[&[("h1", 1)], &[("h2", 1), ("h3", 1)], &[("h2", 1)]]);
        let verdict = c.functional_sign(&h(2).sub(&h(3)));
        assert_eq!(verdict.kind, SignKind::NonNegative);
        assert_eq!(verdict.positive, vec![h(2)]);
        assert!(verdict.negative.is_empty());
    }

    #[test]
    fn zero_functional_is_zero_everywhere() {
        for c in fan_d().max_cones() {
            let verdict = c.functional_sign(&MonoidVector::zero());
            assert_eq!(verdict.kind, SignKind::Zero);
            assert!(c.kernel_face_check(&[MonoidVector::zero()]));
        }
    }

    #[test]
    fn joint_kernel_is_a_face_at_the_barycenter_cone() {
        let c = cone(&[
            &[("h1", 1)],
            &[("h2", 1)],
            &[("h1", 1), ("h2", 1), ("h3", 1)],
        ]);
        let fs = [h(1).sub(&h(2)), h(1).sub(&h(3))];
        assert!(c.kernel_face_check(&fs));
    }

    #[test]
    fn joint_kernel_crosses_the_edge_blowup_cone() {
        // h1 + (h2+h3) lies in the joint kernel but no generator does.
        let c = cone(&[&[("h1", 1)], &[("h2", 1), ("h3", 1)], &[("h2", 1)]]);
        let fs = [h(1).sub(&h(2)), h(1).sub(&h(3))];
        assert!(!c.kernel_face_check(&fs));
    }

    #[test]
    fn empty_functional_list_is_always_a_face() {
        for c in fan_c().max_cones() {
            assert!(c.kernel_face_check(&[]));
        }
    }

    #[test]
    fn fan_level_predicates_match_the_worked_verdicts() {
        let f12 = h(1).sub(&h(2));
        let f13 = h(1).sub(&h(3));
        for fan in [fan_b(), fan_c(), fan_d()] {
            assert!(!fan.has_determinate_sign(&f12));
            assert!(!fan.has_determinate_sign(&f13));
        }
        assert!(fan_b().kernel_face_check_all(&[f12.clone(), f13.clone()]));
        assert!(fan_d().kernel_face_check_all(&[f12.clone(), f13.clone()]));
        assert!(!orthant3().kernel_face_check_all(&[f12.clone(), f13.clone()]));
        assert!(!fan_c().kernel_face_check_all(&[f12, f13]));
    }

    #[test]
    fn face_restriction_of_the_resolution_is_consistent() {
        let labels: BTreeSet<Label> = [l("h2"), l("h3")].into();
        let restricted = fan_d().faces_supported_on(&labels);
        // The h2-h3 quadrant is refined by the edge blow-up in either order.
        let expected: BTreeSet<Cone> = fan_c()
            .star_subdivide(&cone(&[&[("h1", 1)], &[("h2", 1), ("h3", 1)]]))
            .unwrap()
            .faces_supported_on(&labels);
        assert_eq!(restricted, expected);
    }

    #[test]
    fn empty_ambient_fan_is_valid() {
        let fan = Fan::orthant([]);
        fan.validate().unwrap();
        assert_eq!(fan.max_cone_count(), 1);
        assert!(fan.rays().is_empty());
    }

    #[test]
    fn display_formats_are_stable() {
        assert_eq!(mv(&[("h1", 1), ("h2", 2)]).to_string(), "h1+2*h2");
        assert_eq!(h(1).sub(&h(2)).to_string(), "h1-h2");
        assert_eq!(MonoidVector::zero().to_string(), "0");
        assert_eq!(
            cone(&[&[("h1", 1)], &[("h2", 1)]]).to_string(),
            "<h1, h2>"
        );
    }
}

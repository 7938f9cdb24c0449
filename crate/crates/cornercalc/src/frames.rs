//! Exact monomial vector fields and the canonical corner frames.
//!
//! A corner model carries coordinates split into boundary coordinates
//! `x1 … xn` (ordered from the shallowest to the deepest hypersurface),
//! one optional interior block label per hypersurface (`y1 … yn`), and an
//! optional final interior block (`z`).  Interior blocks of any dimension
//! are represented by a single symbolic label; every statement below acts
//! blockwise, so block dimensions never enter the computation.
//!
//! Three frames — bases of vector fields with monomial coefficients — are
//! attached to such a chart:
//!
//! - the *edge* frame `v_j ∂y_j, v_j ∂x_j, …, ∂z` with `v_j = x_j⋯x_n`,
//! - the *wedge* frame `∂y_1, ∂x_1, w_1 ∂y_2, …, w_n ∂z` with
//!   `w_j = 1/(x_1⋯x_j)`, and
//! - the *phi* frame `v_1 ∂y_1, x_1 v_1 ∂x_1, v_2 ∂y_2,
//!   v_2 (x_2 ∂x_2 − x_1 ∂x_1), …, ∂z`, whose fields annihilate the total
//!   boundary monomial `x_1⋯x_n` to second order.
//!
//! [`MonomialMap`] is a rigid map between charts: each target coordinate
//! pulls back either to a monomial in the source boundary coordinates or to
//! a single source interior coordinate.  [`MonomialMap::pushforward`] moves
//! a field across such a map, erroring when the result is not expressible
//! over the target coordinates; [`MonomialMap::pushforward_raw`] keeps the
//! coefficients in source coordinates (the total derivative along the map),
//! which is always defined and is what the splitting tables display.
//!
//! [`verify_splitting`] pushes the phi frame through the deep-collapse
//! projection `t = x_k⋯x_n` (respectively the wedge frame through the
//! shallow-collapse projection `t = x_1⋯x_k`) and checks the resulting
//! table: the surviving fields reproduce, element by element, the frame of
//! the collapsed chart, and the dying fields reproduce the frame of the
//! complementary chart.  Phi kernel fields push to literal zero; wedge
//! kernel fields merely vanish on the zero section `{x_k = 0}` and are not
//! projectable, which is why the raw pushforward exists.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::ratmat::{self, Rat};
use crate::{Error, Label, Result};

/// Exponent vector of a Laurent monomial, indexed by coordinate label.
///
/// Zero exponents are never stored, so equality of maps is equality of
/// monomials.
pub type Monomial = BTreeMap<Label, i64>;

/// Builds an exponent vector, summing duplicates and dropping zeros.
pub fn monomial<I, L>(entries: I) -> Monomial
where
    I: IntoIterator<Item = (L, i64)>,
    L: Into<Label>,
{
    let mut out = Monomial::new();
    for (label, exp) in entries {
        *out.entry(label.into()).or_insert(0) += exp;
    }
    out.retain(|_, exp| *exp != 0);
    out
}

fn canonical(mut m: Monomial) -> Monomial {
    m.retain(|_, exp| *exp != 0);
    m
}

/// True when the exponent vector of `m` dominates that of `divisor`
/// componentwise, i.e. the monomial `divisor` divides the monomial `m`.
pub fn monomial_divides(divisor: &Monomial, m: &Monomial) -> bool {
    divisor
        .iter()
        .all(|(label, exp)| m.get(label).copied().unwrap_or(0) >= *exp)
}

fn fmt_monomial(m: &Monomial) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter()
        .map(|(label, exp)| {
            if *exp == 1 {
                label.to_string()
            } else {
                format!("{label}^{exp}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// A vector field whose coefficients are integer multiples of Laurent
/// monomials in the boundary coordinates.
///
/// Terms are kept canonical: merged by (exponent vector, direction) and
/// nonzero.  Equality is therefore exact equality of fields.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MonomialVectorField {
    terms: BTreeMap<(Monomial, Label), BigInt>,
}

impl MonomialVectorField {
    pub fn zero() -> Self {
        MonomialVectorField {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (C, Monomial, Label)>,
        C: Into<BigInt>,
    {
        let mut out: BTreeMap<(Monomial, Label), BigInt> = BTreeMap::new();
        for (coeff, exponents, direction) in terms {
            *out.entry((canonical(exponents), direction)).or_default() += coeff.into();
        }
        out.retain(|_, coeff| !coeff.is_zero());
        MonomialVectorField { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as (coefficient, exponent vector, direction), in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &Monomial, &Label)> {
        self.terms
            .iter()
            .map(|((exponents, direction), coeff)| (coeff, exponents, direction))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (key, coeff) in &other.terms {
            *out.entry(key.clone()).or_default() += coeff;
        }
        out.retain(|_, coeff| !coeff.is_zero());
        MonomialVectorField { terms: out }
    }

    pub fn scaled(&self, factor: i64) -> Self {
        if factor == 0 {
            return MonomialVectorField::zero();
        }
        let factor = BigInt::from(factor);
        MonomialVectorField {
            terms: self
                .terms
                .iter()
                .map(|(key, coeff)| (key.clone(), coeff * &factor))
                .collect(),
        }
    }

    /// The sub-field made of the terms pointing along the given directions.
    pub fn component_along(&self, directions: &BTreeSet<Label>) -> Self {
        MonomialVectorField {
            terms: self
                .terms
                .iter()
                .filter(|((_, direction), _)| directions.contains(direction))
                .map(|(key, coeff)| (key.clone(), coeff.clone()))
                .collect(),
        }
    }

    /// Derivative of the monomial function `x^gamma` along the field: a
    /// formal integer combination of monomials.
    pub fn applied_to(&self, gamma: &Monomial) -> BTreeMap<Monomial, BigInt> {
        let mut out: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for ((beta, direction), coeff) in &self.terms {
            let exp = gamma.get(direction).copied().unwrap_or(0);
            if exp == 0 {
                continue;
            }
            let mut m = beta.clone();
            for (label, e) in gamma {
                *m.entry(label.clone()).or_insert(0) += e;
            }
            *m.entry(direction.clone()).or_insert(0) -= 1;
            *out.entry(canonical(m)).or_default() += coeff * BigInt::from(exp);
        }
        out.retain(|_, coeff| !coeff.is_zero());
        out
    }

    /// True when every monomial produced by applying the field to `x^rho`
    /// is divisible by `x^(2*rho)`: the field kills `x^rho` to second order.
    pub fn annihilates_to_second_order(&self, rho: &Monomial) -> bool {
        let squared: Monomial = rho.iter().map(|(l, e)| (l.clone(), 2 * e)).collect();
        self.applied_to(rho)
            .keys()
            .all(|m| monomial_divides(&squared, m))
    }

    /// True when every term carries a strictly positive power of `label`,
    /// so the field restricts to zero on the section `{label = 0}`.
    pub fn vanishes_where_zero(&self, label: &Label) -> bool {
        self.terms
            .keys()
            .all(|(beta, _)| beta.get(label).copied().unwrap_or(0) > 0)
    }
}

impl fmt::Display for MonomialVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((beta, direction), coeff)) in self.terms.iter().enumerate() {
            let negative = coeff.is_negative();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let abs = coeff.abs();
            let mut factors = Vec::new();
            if !abs.is_one() || beta.is_empty() {
                factors.push(abs.to_string());
            }
            for (label, exp) in beta {
                factors.push(if *exp == 1 {
                    label.to_string()
                } else {
                    format!("{label}^{exp}")
                });
            }
            write!(f, "{} d{}", factors.join("*"), direction)?;
        }
        Ok(())
    }
}

/// What a single target coordinate pulls back to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoordinateRule {
    /// A monomial in the source boundary coordinates (exponents >= 0).
    Boundary(Monomial),
    /// A single source interior coordinate.
    Interior(Label),
}

/// A rigid map between coordinate charts: every target coordinate is either
/// a monomial in the source boundary coordinates or a projection onto one
/// source interior coordinate.
///
/// The boundary exponent columns are required to be linearly independent so
/// that a monomial is expressible over the target coordinates in at most
/// one way, making [`MonomialMap::pushforward`] deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    source_boundary: BTreeSet<Label>,
    source_interior: BTreeSet<Label>,
    targets: Vec<(Label, CoordinateRule)>,
}

impl MonomialMap {
    pub fn new(
        source_boundary: impl IntoIterator<Item = Label>,
        source_interior: impl IntoIterator<Item = Label>,
        targets: impl IntoIterator<Item = (Label, CoordinateRule)>,
    ) -> Result<MonomialMap> {
        let source_boundary: BTreeSet<Label> = source_boundary.into_iter().collect();
        let source_interior: BTreeSet<Label> = source_interior.into_iter().collect();
        if let Some(label) = source_boundary.intersection(&source_interior).next() {
            return Err(Error::InvalidMap(format!(
                "coordinate {label} is both boundary and interior"
            )));
        }
        let targets: Vec<(Label, CoordinateRule)> = targets
            .into_iter()
            .map(|(label, rule)| match rule {
                CoordinateRule::Boundary(m) => (label, CoordinateRule::Boundary(canonical(m))),
                rule => (label, rule),
            })
            .collect();
        let mut seen_targets = BTreeSet::new();
        let mut seen_interiors = BTreeSet::new();
        for (target, rule) in &targets {
            if !seen_targets.insert(target.clone()) {
                return Err(Error::InvalidMap(format!(
                    "duplicate target coordinate {target}"
                )));
            }
            match rule {
                CoordinateRule::Boundary(m) => {
                    for (label, exp) in m {
                        if !source_boundary.contains(label) {
                            return Err(Error::InvalidMap(format!(
                                "target {target} pulls back through {label}, \
                                 which is not a source boundary coordinate"
                            )));
                        }
                        if *exp < 0 {
                            return Err(Error::InvalidMap(format!(
                                "target {target} pulls back with a negative power of {label}"
                            )));
                        }
                    }
                }
                CoordinateRule::Interior(source) => {
                    if !source_interior.contains(source) {
                        return Err(Error::InvalidMap(format!(
                            "target {target} projects onto {source}, \
                             which is not a source interior coordinate"
                        )));
                    }
                    if !seen_interiors.insert(source.clone()) {
                        return Err(Error::InvalidMap(format!(
                            "two target coordinates project onto {source}"
                        )));
                    }
                }
            }
        }
        let map = MonomialMap {
            source_boundary,
            source_interior,
            targets,
        };
        let columns = map.boundary_columns();
        if ratmat::rank(&columns) != columns.len() {
            return Err(Error::InvalidMap(
                "boundary target exponents must be linearly independent".into(),
            ));
        }
        Ok(map)
    }

    /// The identity chart map: every coordinate pulls back to itself.
    pub fn identity(
        boundary: impl IntoIterator<Item = Label>,
        interior: impl IntoIterator<Item = Label>,
    ) -> MonomialMap {
        let boundary: BTreeSet<Label> = boundary.into_iter().collect();
        let interior: BTreeSet<Label> = interior.into_iter().collect();
        let targets = boundary
            .iter()
            .map(|x| {
                (
                    x.clone(),
                    CoordinateRule::Boundary(monomial([(x.clone(), 1)])),
                )
            })
            .chain(
                interior
                    .iter()
                    .map(|u| (u.clone(), CoordinateRule::Interior(u.clone()))),
            )
            .collect::<Vec<_>>();
        MonomialMap::new(boundary, interior, targets).expect("identity map is always valid")
    }

    pub fn source_boundary(&self) -> &BTreeSet<Label> {
        &self.source_boundary
    }

    pub fn source_interior(&self) -> &BTreeSet<Label> {
        &self.source_interior
    }

    pub fn targets(&self) -> &[(Label, CoordinateRule)] {
        &self.targets
    }

    fn boundary_targets(&self) -> impl Iterator<Item = (&Label, &Monomial)> {
        self.targets.iter().filter_map(|(label, rule)| match rule {
            CoordinateRule::Boundary(m) => Some((label, m)),
            CoordinateRule::Interior(_) => None,
        })
    }

    fn boundary_order(&self) -> Vec<Label> {
        self.source_boundary.iter().cloned().collect()
    }

    fn boundary_columns(&self) -> Vec<Vec<Rat>> {
        let order = self.boundary_order();
        self.boundary_targets()
            .map(|(_, m)| dense_exponents(m, &order))
            .collect()
    }

    /// Composition: first this map, then `next`.  The source coordinates of
    /// `next` must be exactly the target coordinates of this map, split the
    /// same way into boundary and interior.
    pub fn then(&self, next: &MonomialMap) -> Result<MonomialMap> {
        let mid_boundary: BTreeSet<Label> =
            self.boundary_targets().map(|(t, _)| t.clone()).collect();
        let mid_interior: BTreeSet<Label> = self
            .targets
            .iter()
            .filter(|(_, rule)| matches!(rule, CoordinateRule::Interior(_)))
            .map(|(t, _)| t.clone())
            .collect();
        if next.source_boundary != mid_boundary || next.source_interior != mid_interior {
            return Err(Error::InvalidMap(
                "composition mismatch: middle coordinates do not line up".into(),
            ));
        }
        let rule_of = |label: &Label| {
            self.targets
                .iter()
                .find(|(t, _)| t == label)
                .map(|(_, rule)| rule)
                .expect("middle coordinate checked above")
        };
        let mut targets = Vec::new();
        for (final_target, rule) in &next.targets {
            let composed = match rule {
                CoordinateRule::Boundary(nu) => {
                    let mut m = Monomial::new();
                    for (mid, outer_exp) in nu {
                        match rule_of(mid) {
                            CoordinateRule::Boundary(inner) => {
                                for (label, inner_exp) in inner {
                                    *m.entry(label.clone()).or_insert(0) += outer_exp * inner_exp;
                                }
                            }
                            CoordinateRule::Interior(_) => unreachable!("mid sets are disjoint"),
                        }
                    }
                    CoordinateRule::Boundary(canonical(m))
                }
                CoordinateRule::Interior(mid) => match rule_of(mid) {
                    CoordinateRule::Interior(source) => CoordinateRule::Interior(source.clone()),
                    CoordinateRule::Boundary(_) => unreachable!("mid sets are disjoint"),
                },
            };
            targets.push((final_target.clone(), composed));
        }
        MonomialMap::new(
            self.source_boundary.clone(),
            self.source_interior.clone(),
            targets,
        )
    }

    /// Total derivative of the field along the map: directions become
    /// target coordinates while coefficients stay monomials in the source
    /// boundary coordinates.  Always defined; this is the form in which the
    /// splitting tables are stated.
    pub fn pushforward_raw(&self, field: &MonomialVectorField) -> Result<MonomialVectorField> {
        let mut out: BTreeMap<(Monomial, Label), BigInt> = BTreeMap::new();
        for ((beta, direction), coeff) in &field.terms {
            for label in beta.keys() {
                if !self.source_boundary.contains(label) {
                    return Err(Error::InvalidMap(format!(
                        "coefficient mentions {label}, which is not a source boundary coordinate"
                    )));
                }
            }
            if self.source_boundary.contains(direction) {
                for (target, nu) in self.boundary_targets() {
                    let weight = nu.get(direction).copied().unwrap_or(0);
                    if weight == 0 {
                        continue;
                    }
                    // x^beta d/dx applied through target t = x^nu picks up
                    // the exponent of x in nu: weight * x^(beta+nu-e_x) dt.
                    let mut m = beta.clone();
                    for (label, exp) in nu {
                        *m.entry(label.clone()).or_insert(0) += exp;
                    }
                    *m.entry(direction.clone()).or_insert(0) -= 1;
                    *out.entry((canonical(m), target.clone())).or_default() +=
                        coeff * BigInt::from(weight);
                }
            } else if self.source_interior.contains(direction) {
                let lifted = self.targets.iter().find_map(|(target, rule)| match rule {
                    CoordinateRule::Interior(source) if source == direction => Some(target),
                    _ => None,
                });
                if let Some(target) = lifted {
                    *out.entry((beta.clone(), target.clone())).or_default() += coeff;
                }
            } else {
                return Err(Error::InvalidMap(format!(
                    "direction {direction} is not a source coordinate"
                )));
            }
        }
        out.retain(|_, coeff| !coeff.is_zero());
        Ok(MonomialVectorField { terms: out })
    }

    /// Pushforward with the result expressed over the target coordinates.
    ///
    /// Errors with [`Error::NotProjectable`] when some surviving
    /// coefficient has no integral expression as a monomial in the target
    /// coordinates.
    pub fn pushforward(&self, field: &MonomialVectorField) -> Result<MonomialVectorField> {
        let raw = self.pushforward_raw(field)?;
        let order = self.boundary_order();
        let columns = self.boundary_columns();
        let names: Vec<&Label> = self.boundary_targets().map(|(t, _)| t).collect();
        let mut out: BTreeMap<(Monomial, Label), BigInt> = BTreeMap::new();
        for ((beta, direction), coeff) in raw.terms {
            let rewritten = if beta.is_empty() {
                Monomial::new()
            } else {
                let target = dense_exponents(&beta, &order);
                let solution = ratmat::solve_in_column_span(&columns, &target).ok_or_else(|| {
                    Error::NotProjectable(format!(
                        "coefficient {} has no expression over the target coordinates",
                        fmt_monomial(&beta)
                    ))
                })?;
                let mut mu = Monomial::new();
                for (value, name) in solution.iter().zip(&names) {
                    if !value.is_integer() {
                        return Err(Error::NotProjectable(format!(
                            "coefficient {} requires a fractional power of {name}",
                            fmt_monomial(&beta)
                        )));
                    }
                    let exp = i64::try_from(value.to_integer()).map_err(|_| {
                        Error::NotProjectable(format!(
                            "coefficient {} needs an exponent of {name} outside i64",
                            fmt_monomial(&beta)
                        ))
                    })?;
                    if exp != 0 {
                        mu.insert((*name).clone(), exp);
                    }
                }
                mu
            };
            *out.entry((rewritten, direction)).or_default() += coeff;
        }
        out.retain(|_, coeff| !coeff.is_zero());
        Ok(MonomialVectorField { terms: out })
    }
}

fn dense_exponents(m: &Monomial, order: &[Label]) -> Vec<Rat> {
    order
        .iter()
        .map(|label| {
            Rat::from_integer(BigInt::from(m.get(label).copied().unwrap_or(0)))
        })
        .collect()
}

/// Coordinate chart for a corner model: boundary coordinates from the
/// shallowest to the deepest hypersurface, an aligned optional interior
/// block per hypersurface, and an optional final interior block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameCoords {
    boundary: Vec<Label>,
    blocks: Vec<Option<Label>>,
    cap: Option<Label>,
}

impl FrameCoords {
    pub fn new(
        boundary: Vec<Label>,
        blocks: Vec<Option<Label>>,
        cap: Option<Label>,
    ) -> Result<FrameCoords> {
        if boundary.len() != blocks.len() {
            return Err(Error::InvalidSpace(
                "need one interior block slot per boundary coordinate".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        let all = boundary
            .iter()
            .chain(blocks.iter().flatten())
            .chain(cap.iter());
        for label in all {
            if !seen.insert(label.clone()) {
                return Err(Error::InvalidSpace(format!(
                    "duplicate coordinate label {label}"
                )));
            }
        }
        Ok(FrameCoords {
            boundary,
            blocks,
            cap,
        })
    }

    /// The standard chart `x1 … xn, y1 … yn, z`.
    pub fn standard(n: usize) -> FrameCoords {
        FrameCoords {
            boundary: (1..=n).map(xl).collect(),
            blocks: (1..=n).map(|i| Some(yl(i))).collect(),
            cap: Some(zl()),
        }
    }

    pub fn boundary(&self) -> &[Label] {
        &self.boundary
    }

    pub fn blocks(&self) -> &[Option<Label>] {
        &self.blocks
    }

    pub fn cap(&self) -> Option<&Label> {
        self.cap.as_ref()
    }

    /// All interior coordinates: the block labels followed by the cap.
    pub fn interiors(&self) -> Vec<Label> {
        self.blocks
            .iter()
            .flatten()
            .chain(self.cap.iter())
            .cloned()
            .collect()
    }
}

/// Which of the three canonical frames to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Edge,
    Wedge,
    Phi,
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameKind::Edge => "edge",
            FrameKind::Wedge => "wedge",
            FrameKind::Phi => "phi",
        })
    }
}

/// The frame fields of the chart, from the shallowest hypersurface to the
/// deepest: per hypersurface the interior-block field (when the block is
/// present) followed by the boundary field, capped by the final interior
/// field (when present).
pub fn make_frame(kind: FrameKind, coords: &FrameCoords) -> Vec<MonomialVectorField> {
    let x = &coords.boundary;
    let n = x.len();
    let deep_tail = |j: usize| monomial(x[j..].iter().map(|l| (l.clone(), 1)));
    let shallow_head = |j: usize| monomial(x[..j].iter().map(|l| (l.clone(), -1)));
    let mut fields = Vec::new();
    for j in 0..n {
        let coeff = match kind {
            FrameKind::Edge | FrameKind::Phi => deep_tail(j),
            FrameKind::Wedge => shallow_head(j),
        };
        if let Some(y) = &coords.blocks[j] {
            fields.push(MonomialVectorField::from_terms([(
                1,
                coeff.clone(),
                y.clone(),
            )]));
        }
        let boundary_field = match kind {
            FrameKind::Edge | FrameKind::Wedge => {
                MonomialVectorField::from_terms([(1, coeff, x[j].clone())])
            }
            FrameKind::Phi => {
                let own = monomial([(x[j].clone(), 1)]);
                let lead = canonical(sum_exponents(&coeff, &own));
                if j == 0 {
                    MonomialVectorField::from_terms([(1, lead, x[0].clone())])
                } else {
                    let prev = canonical(sum_exponents(&coeff, &monomial([(x[j - 1].clone(), 1)])));
                    MonomialVectorField::from_terms([
                        (1, lead, x[j].clone()),
                        (-1, prev, x[j - 1].clone()),
                    ])
                }
            }
        };
        fields.push(boundary_field);
    }
    if let Some(z) = &coords.cap {
        let coeff = match kind {
            FrameKind::Edge | FrameKind::Phi => Monomial::new(),
            FrameKind::Wedge => shallow_head(n),
        };
        fields.push(MonomialVectorField::from_terms([(1, coeff, z.clone())]));
    }
    fields
}

/// The frame of the standard chart with `n` hypersurfaces.
pub fn standard_frame(kind: FrameKind, n: usize) -> Vec<MonomialVectorField> {
    make_frame(kind, &FrameCoords::standard(n))
}

fn sum_exponents(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (label, exp) in b {
        *out.entry(label.clone()).or_insert(0) += exp;
    }
    out
}

/// Outcome of pushing a frame through its canonical splitting projection.
#[derive(Clone, Debug)]
pub struct SplittingReport {
    /// Every pushforward matched the expected table entry, the kernel
    /// fields reproduced the frame of the complementary chart, and the
    /// surviving fields reproduced the frame of the collapsed chart.
    pub table_ok: bool,
    /// The frame fields killed by the projection, in source coordinates.
    /// For phi frames they push to literal zero; for wedge frames their
    /// raw pushforwards vanish on the zero section `{x_k = 0}`.
    pub kernel_frame: Vec<MonomialVectorField>,
    /// Pushforwards of the surviving fields, in target coordinates.
    pub image_frame: Vec<MonomialVectorField>,
}

/// Pushes the phi frame through `t = x_k⋯x_n` (keeping `y_1…y_k` and
/// `x_1…x_(k-1)`), or the wedge frame through `t = x_1⋯x_k` (keeping the
/// coordinates deeper than `x_k`), and verifies the splitting table.
///
/// Requires `1 <= k <= n` and a splittable kind (edge frames have no
/// splitting table).
pub fn verify_splitting(kind: FrameKind, n: usize, k: usize) -> Result<SplittingReport> {
    if !(1..=n).contains(&k) {
        return Err(Error::InvalidMap(format!(
            "splitting index k={k} is out of range for n={n}"
        )));
    }
    match kind {
        FrameKind::Phi => verify_phi_splitting(n, k),
        FrameKind::Wedge => verify_wedge_splitting(n, k),
        FrameKind::Edge => Err(Error::InvalidMap(
            "edge frames have no splitting table".into(),
        )),
    }
}

fn verify_phi_splitting(n: usize, k: usize) -> Result<SplittingReport> {
    let source = FrameCoords::standard(n);
    let frame = make_frame(FrameKind::Phi, &source);
    let mut targets: Vec<(Label, CoordinateRule)> = Vec::new();
    for i in 1..=k {
        targets.push((yl(i), CoordinateRule::Interior(yl(i))));
    }
    for i in 1..k {
        targets.push((xl(i), CoordinateRule::Boundary(monomial([(xl(i), 1)]))));
    }
    targets.push((
        tl(),
        CoordinateRule::Boundary(monomial((k..=n).map(|i| (xl(i), 1)))),
    ));
    let map = MonomialMap::new(
        source.boundary().to_vec(),
        source.interiors(),
        targets,
    )?;

    // The collapsed chart keeps y1..yk and x1..x(k-1), with t as its
    // deepest boundary coordinate and no final block.
    let target_boundary: Vec<Label> = (1..k).map(xl).chain([tl()]).collect();
    let target_blocks: Vec<Option<Label>> = (1..=k).map(|i| Some(yl(i))).collect();
    let target_coords = FrameCoords::new(target_boundary, target_blocks, None)?;
    let expected_image = make_frame(FrameKind::Phi, &target_coords);

    // The complementary chart keeps the deep coordinates.
    let fiber_coords = FrameCoords::new(
        (k + 1..=n).map(xl).collect(),
        (k + 1..=n).map(|i| Some(yl(i))).collect(),
        Some(zl()),
    )?;
    let fiber_frame = make_frame(FrameKind::Phi, &fiber_coords);
    let fiber_directions: BTreeSet<Label> = fiber_coords
        .boundary()
        .iter()
        .cloned()
        .chain(fiber_coords.interiors())
        .collect();

    let mut table_ok = true;
    let mut kernel_frame = Vec::new();
    let mut image_frame = Vec::new();
    for (index, field) in frame.iter().enumerate() {
        let raw = map.pushforward_raw(field)?;
        let dies = raw.is_zero();
        table_ok &= dies == (index >= 2 * k);
        if dies {
            kernel_frame.push(field.clone());
        } else {
            let pushed = map.pushforward(field)?;
            table_ok &= expected_image.get(image_frame.len()) == Some(&pushed);
            image_frame.push(pushed);
        }
    }
    // Read in the fiber coordinates (where x_k is a dependent function of
    // the free coordinates), the kernel fields are exactly the fiber frame.
    let restricted: Vec<MonomialVectorField> = kernel_frame
        .iter()
        .map(|field| field.component_along(&fiber_directions))
        .collect();
    table_ok &= restricted == fiber_frame;
    table_ok &= image_frame == expected_image;
    Ok(SplittingReport {
        table_ok,
        kernel_frame,
        image_frame,
    })
}

fn verify_wedge_splitting(n: usize, k: usize) -> Result<SplittingReport> {
    let source = FrameCoords::standard(n);
    let frame = make_frame(FrameKind::Wedge, &source);
    let mut targets: Vec<(Label, CoordinateRule)> = vec![(
        tl(),
        CoordinateRule::Boundary(monomial((1..=k).map(|i| (xl(i), 1)))),
    )];
    for j in k + 1..=n {
        targets.push((yl(j), CoordinateRule::Interior(yl(j))));
        targets.push((xl(j), CoordinateRule::Boundary(monomial([(xl(j), 1)]))));
    }
    targets.push((zl(), CoordinateRule::Interior(zl())));
    let map = MonomialMap::new(
        source.boundary().to_vec(),
        source.interiors(),
        targets,
    )?;

    // The collapsed chart: t is its shallowest boundary coordinate and has
    // no interior block of its own.
    let target_boundary: Vec<Label> = [tl()].into_iter().chain((k + 1..=n).map(xl)).collect();
    let target_blocks: Vec<Option<Label>> = [None]
        .into_iter()
        .chain((k + 1..=n).map(|j| Some(yl(j))))
        .collect();
    let target_coords = FrameCoords::new(target_boundary, target_blocks, Some(zl()))?;
    let expected_image = make_frame(FrameKind::Wedge, &target_coords);

    // The complementary chart keeps the shallow coordinates, with y_k as
    // its final block.
    let base_coords = FrameCoords::new(
        (1..k).map(xl).collect(),
        (1..k).map(|i| Some(yl(i))).collect(),
        Some(yl(k)),
    )?;
    let base_frame = make_frame(FrameKind::Wedge, &base_coords);

    let xk = xl(k);
    let mut table_ok = true;
    let mut kernel_frame = Vec::new();
    let mut image_frame = Vec::new();
    for (index, field) in frame.iter().enumerate() {
        let raw = map.pushforward_raw(field)?;
        let dies = raw.vanishes_where_zero(&xk);
        table_ok &= dies == (index < 2 * k - 1);
        if dies {
            // Interior-block fields die outright; boundary fields survive
            // as the tail monomial x_(j+1)..x_k times dt, which vanishes on
            // the zero section and has no target-coordinate expression.
            let expected_raw = if index % 2 == 0 {
                MonomialVectorField::zero()
            } else {
                let j = index / 2 + 1;
                MonomialVectorField::from_terms([(
                    1,
                    monomial((j + 1..=k).map(|i| (xl(i), 1))),
                    tl(),
                )])
            };
            table_ok &= raw == expected_raw;
            kernel_frame.push(field.clone());
        } else {
            let pushed = map.pushforward(field)?;
            table_ok &= expected_image.get(image_frame.len()) == Some(&pushed);
            image_frame.push(pushed);
        }
    }
    table_ok &= kernel_frame == base_frame;
    table_ok &= image_frame == expected_image;
    Ok(SplittingReport {
        table_ok,
        kernel_frame,
        image_frame,
    })
}

fn xl(i: usize) -> Label {
    Label::new(format!("x{i}"))
}

fn yl(i: usize) -> Label {
    Label::new(format!("y{i}"))
}

fn zl() -> Label {
    Label::new("z")
}

fn tl() -> Label {
    Label::new("t")
}

//! Deterministic JSON rendering of library values, and the face graphs
//! drawn for DOT output.

use std::collections::BTreeSet;

use anyhow::{Context, Result};
use cornercalc::bmaps::SigmaVerdict;
use cornercalc::corners::{CornersSpace, FacePoset};
use cornercalc::monoid_fan::{Cone, Fan, MonoidVector};
use cornercalc::products::{Component, Descriptor, FibrationTag, ProductSpace, Side};
use cornercalc::Label;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

pub fn int(v: &BigInt) -> Result<Value> {
    let n: i64 = v.try_into().context("integer too large for a report")?;
    Ok(Value::from(n))
}

/// A monoid vector as its coordinate map `{label: coefficient}`.
pub fn ray(v: &MonoidVector) -> Result<Value> {
    let mut m = Map::new();
    for (label, coeff) in v.coords() {
        m.insert(label.to_string(), int(coeff)?);
    }
    Ok(Value::Object(m))
}

pub fn rays<'a>(iter: impl IntoIterator<Item = &'a MonoidVector>) -> Result<Value> {
    Ok(Value::Array(
        iter.into_iter().map(ray).collect::<Result<_>>()?,
    ))
}

pub fn labels<'a>(iter: impl IntoIterator<Item = &'a Label>) -> Value {
    Value::Array(
        iter.into_iter()
            .map(|l| Value::from(l.to_string()))
            .collect(),
    )
}

pub fn label_pairs<'a>(iter: impl IntoIterator<Item = &'a (Label, Label)>) -> Value {
    Value::Array(
        iter.into_iter()
            .map(|(a, b)| json!([a.to_string(), b.to_string()]))
            .collect(),
    )
}

pub fn cone(c: &Cone) -> Result<Value> {
    rays(c.generators())
}

pub fn fan(f: &Fan) -> Result<Value> {
    Ok(Value::Array(
        f.max_cones().map(cone).collect::<Result<_>>()?,
    ))
}

pub fn rational(r: &BigRational) -> Value {
    if r.denom() == &BigInt::from(1) {
        Value::from(r.numer().to_string())
    } else {
        Value::from(format!("{}/{}", r.numer(), r.denom()))
    }
}

pub fn sigma_verdict(v: &SigmaVerdict) -> &'static str {
    match v {
        SigmaVerdict::SmoothToHalfLine => "smooth-to-half-line",
        SigmaVerdict::SmoothToInverseHalfLine => "smooth-to-inverse-half-line",
        SigmaVerdict::SmoothToExtendedHalfLine => "smooth-to-extended-half-line",
        SigmaVerdict::NotSmooth => "not-smooth",
    }
}

fn side(s: &Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn component(c: &Component) -> String {
    match c {
        Component::FiberOf(s, l) => format!("fiber({}:{l})", side(s)),
        Component::BaseOf(s, l) => format!("base({}:{l})", side(s)),
        Component::Whole(s) => format!("whole({})", side(s)),
    }
}

pub fn descriptor(d: &Descriptor) -> String {
    match d {
        Descriptor::Single(c) => component(c),
        Descriptor::OrderedProduct(a, b) => format!("{} x {}", component(a), component(b)),
        Descriptor::Join(a, b) => format!("{} join {}", component(a), component(b)),
    }
}

pub fn tag(t: &FibrationTag) -> Value {
    json!({
        "fiber": descriptor(&t.fiber),
        "base": descriptor(&t.base),
        "fiber_index": labels(&t.fiber_index),
        "base_index": labels(&t.base_index),
    })
}

/// Covering edges of the order restricted to the hypersurfaces. Dropping
/// the interior can expose new covers, so they are recomputed from the
/// restricted relation rather than filtered from the full covers.
pub fn hypersurface_covers(space: &CornersSpace) -> Vec<(Label, Label)> {
    let hyps = space.hypersurfaces();
    let order = space.order();
    let mut out = Vec::new();
    for a in hyps {
        for b in hyps {
            if order.less(a, b)
                && !hyps.iter().any(|c| order.less(a, c) && order.less(c, b))
            {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// The boundary face graph of a space itself: one node per hypersurface,
/// incidence from the corners, order from the space.
pub fn label_poset(space: &CornersSpace) -> FacePoset {
    let unit = |l: &Label| MonoidVector::unit(l.clone());
    let rays: BTreeSet<MonoidVector> = space.hypersurfaces().iter().map(unit).collect();
    let incidence: BTreeSet<BTreeSet<MonoidVector>> = space
        .corners()
        .iter()
        .map(|c| c.iter().map(unit).collect())
        .collect();
    let mut order = BTreeSet::new();
    for a in space.hypersurfaces() {
        for b in space.hypersurfaces() {
            if space.order().less(a, b) {
                order.insert((unit(a), unit(b)));
            }
        }
    }
    FacePoset::new(rays, incidence, Some(order))
}

/// Attaches the space's hypersurface order to a refined face poset when
/// every ray is still an unblown hypersurface; blown-up rays carry no
/// order, so those posets keep incidence only.
pub fn try_label_order(space: &CornersSpace, poset: FacePoset) -> FacePoset {
    let unit = |l: &Label| MonoidVector::unit(l.clone());
    let units: BTreeSet<MonoidVector> = space.hypersurfaces().iter().map(unit).collect();
    if !poset.rays().iter().all(|r| units.contains(r)) {
        return poset;
    }
    let mut order = BTreeSet::new();
    for a in space.hypersurfaces() {
        for b in space.hypersurfaces() {
            if space.order().less(a, b) {
                order.insert((unit(a), unit(b)));
            }
        }
    }
    poset.with_order(order)
}

/// The product order transported onto the fan rays through the face
/// dictionary.
pub fn product_order_on_rays(p: &ProductSpace) -> BTreeSet<(MonoidVector, MonoidVector)> {
    let mut out = BTreeSet::new();
    for (a, _) in p.pairs() {
        for (b, _) in p.pairs() {
            if p.space().order().less(a, b) {
                let ra = p.ray(a).expect("every product face has a ray");
                let rb = p.ray(b).expect("every product face has a ray");
                out.insert((ra.clone(), rb.clone()));
            }
        }
    }
    out
}

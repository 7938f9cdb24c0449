//! One handler per subcommand, each producing a deterministic outcome:
//! the operation name, an input fingerprint, an optional verdict (false
//! maps to exit code 2), the JSON outputs, and the face graph for DOT
//! output where one exists.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use cornercalc::bmaps::SigmaVerdict;
use cornercalc::corners::{CornersSpace, FacePoset};
use cornercalc::frames::{self, FrameKind};
use cornercalc::manybody::{mb_product_check, mb_space};
use cornercalc::products::{
    fiber_product, join, relative_cone, ConePlacement, FiberFaceKind, JoinVariant, ProductSpace,
};
use cornercalc::Label;
use serde_json::{json, Map, Value};

use crate::docs::{self, Digest};
use crate::render;
use crate::sigma;
use crate::{Command, Kind, Variant, XiEnd};

pub struct Outcome {
    pub operation: &'static str,
    pub digest: String,
    pub verdict: Option<bool>,
    pub outputs: Value,
    pub poset: Option<FacePoset>,
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Validate { space } => validate(space),
        Command::Product { x, y, variant } => product(x, y, *variant),
        Command::Join {
            x,
            y,
            variant,
            left_below,
            right_below,
            left_xi,
            right_xi,
        } => join_spaces(
            x,
            y,
            *variant,
            left_below.as_deref(),
            right_below.as_deref(),
            *left_xi,
            *right_xi,
        ),
        Command::Cone {
            space,
            xi,
            variant,
            below,
            xi_end,
        } => cone(space, xi, *variant, below.as_deref(), *xi_end),
        Command::Blowup { space, centers } => blowup(space, centers.as_deref()),
        Command::LiftCheck { map, centers } => lift_check(map, centers.as_deref()),
        Command::SigmaCheck { space, sigmas } => sigma_check(space, sigmas),
        Command::PsubCheck { space, sigmas } => psub_check(space, sigmas),
        Command::FiberProduct { f, g } => fiber_product_op(f, g),
        Command::Manybody { arrangement } => manybody(arrangement),
        Command::MbProductCheck { a, b } => mb_check(a, b),
        Command::FramesVerify { kind, n, k } => frames_verify(*kind, *n, *k),
    }
}

fn variant_str(v: Variant) -> &'static str {
    match v {
        Variant::Min => "min",
        Variant::Max => "max",
        Variant::Relative => "relative",
    }
}

fn xi_end_str(e: XiEnd) -> &'static str {
    match e {
        XiEnd::Maximal => "maximal",
        XiEnd::Minimal => "minimal",
    }
}

fn kind_str(k: Kind) -> &'static str {
    match k {
        Kind::Edge => "edge",
        Kind::Wedge => "wedge",
        Kind::Phi => "phi",
    }
}

fn simplices(space: &CornersSpace) -> Value {
    let mut all: Vec<Vec<String>> = space
        .maximal_simplices()
        .into_iter()
        .map(|s| s.iter().map(Label::to_string).collect())
        .collect();
    all.sort();
    serde_json::to_value(all).expect("strings serialize")
}

fn parse_below(space: &CornersSpace, which: &str, csv: Option<&str>) -> Result<BTreeSet<Label>> {
    let mut below = BTreeSet::new();
    let Some(csv) = csv else {
        return Ok(below);
    };
    for part in csv.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let label = Label::new(part);
        ensure!(
            space.hypersurfaces().contains(&label),
            "{which} has no hypersurface named {part}"
        );
        below.insert(label);
    }
    Ok(below)
}

fn check_variant(which: &str, space: &CornersSpace, variant: Variant) -> Result<()> {
    match variant {
        Variant::Min => ensure!(
            space.below_interior().is_empty(),
            "--variant min requires the interior of {which} to be minimal"
        ),
        Variant::Max => ensure!(
            space.above_interior().is_empty(),
            "--variant max requires the interior of {which} to be maximal"
        ),
        Variant::Relative => {}
    }
    Ok(())
}

fn validate(path: &Path) -> Result<Outcome> {
    let file = docs::read_space(path)?;
    let mut digest = Digest::new("validate");
    digest.push_doc("space", &file.doc)?;
    let violations: Vec<String> = file.space.validate().iter().map(|v| v.to_string()).collect();
    let refined = docs::refine(&file, &[])?;
    let outputs = json!({
        "interior": file.space.interior().to_string(),
        "hypersurfaces": render::labels(file.space.hypersurfaces()),
        "order": file.doc.order,
        "corners": file.doc.corners,
        "depth": file.space.depth(),
        "violations": violations,
        "rays_after_blowups": render::rays(&refined.rays())?,
    });
    Ok(Outcome {
        operation: "validate",
        digest: digest.finish(),
        verdict: Some(violations.is_empty()),
        outputs,
        poset: Some(render::label_poset(&file.space)),
    })
}

fn product(x: &Path, y: &Path, variant: Option<Variant>) -> Result<Outcome> {
    let fx = docs::read_space(x)?;
    let fy = docs::read_space(y)?;
    docs::forbid_centers(&fx, "product")?;
    docs::forbid_centers(&fy, "product")?;
    if let Some(variant) = variant {
        check_variant("the left factor", &fx.space, variant)?;
        check_variant("the right factor", &fy.space, variant)?;
    }
    let p = ProductSpace::new(&fx.space, &fy.space)?;
    let mut digest = Digest::new("product");
    digest.push_doc("x", &fx.doc)?;
    digest.push_doc("y", &fy.doc)?;
    digest.push("variant", variant.map_or("none", variant_str));

    let mut hypersurfaces = Vec::new();
    let mut tags = Map::new();
    for (label, pair) in p.pairs() {
        let ray = p.ray(label).expect("every product face has a ray");
        hypersurfaces.push(json!({
            "label": label.to_string(),
            "left": pair.left.to_string(),
            "right": pair.right.to_string(),
            "ray": render::ray(ray)?,
        }));
    }
    for (label, tag) in p.fibration_tags() {
        tags.insert(label.to_string(), render::tag(&tag));
    }
    let outputs = json!({
        "variant": variant.map_or("none", variant_str),
        "interior": p.space().interior().to_string(),
        "hypersurfaces": hypersurfaces,
        "rays": render::rays(&p.refined().rays())?,
        "poset_edges": render::label_pairs(&render::hypersurface_covers(p.space())),
        "corners": simplices(p.space()),
        "tags": Value::Object(tags),
    });
    let poset = p
        .refined()
        .face_poset()
        .with_order(render::product_order_on_rays(&p));
    Ok(Outcome {
        operation: "product",
        digest: digest.finish(),
        verdict: None,
        outputs,
        poset: Some(poset),
    })
}

#[allow(clippy::too_many_arguments)]
fn join_spaces(
    x: &Path,
    y: &Path,
    variant: Variant,
    left_below: Option<&str>,
    right_below: Option<&str>,
    left_xi: XiEnd,
    right_xi: XiEnd,
) -> Result<Outcome> {
    let fx = docs::read_space(x)?;
    let fy = docs::read_space(y)?;
    docs::forbid_centers(&fx, "join")?;
    docs::forbid_centers(&fy, "join")?;
    let join_variant = match variant {
        Variant::Min => JoinVariant::Min,
        Variant::Max => JoinVariant::Max,
        Variant::Relative => JoinVariant::Relative {
            left: ConePlacement::Relative {
                below: parse_below(&fx.space, "the left factor", left_below)?,
                xi_maximal: matches!(left_xi, XiEnd::Maximal),
            },
            right: ConePlacement::Relative {
                below: parse_below(&fy.space, "the right factor", right_below)?,
                xi_maximal: matches!(right_xi, XiEnd::Maximal),
            },
        },
    };
    let j = join(&fx.space, &fy.space, &join_variant)?;
    let mut digest = Digest::new("join");
    digest.push_doc("x", &fx.doc)?;
    digest.push_doc("y", &fy.doc)?;
    digest.push("variant", variant_str(variant));
    digest.push("left_below", left_below.unwrap_or(""));
    digest.push("right_below", right_below.unwrap_or(""));
    digest.push("left_xi", xi_end_str(left_xi));
    digest.push("right_xi", xi_end_str(right_xi));

    let mut hypersurfaces = Vec::new();
    for (label, pair) in j.pairs() {
        let representative = j
            .representative(label)
            .expect("every join face has a representative");
        hypersurfaces.push(json!({
            "label": label.to_string(),
            "left": pair.left.to_string(),
            "right": pair.right.to_string(),
            "representative": render::ray(representative)?,
        }));
    }
    let mut tags = Map::new();
    for (label, tag) in j.tags() {
        tags.insert(label.to_string(), render::tag(tag));
    }
    let outputs = json!({
        "variant": variant_str(variant),
        "xi": j.xi().to_string(),
        "eta": j.eta().to_string(),
        "interior": j.space().interior().to_string(),
        "hypersurfaces": hypersurfaces,
        "poset_edges": render::label_pairs(&render::hypersurface_covers(j.space())),
        "corners": simplices(j.space()),
        "tags": Value::Object(tags),
    });
    Ok(Outcome {
        operation: "join",
        digest: digest.finish(),
        verdict: None,
        outputs,
        poset: Some(render::label_poset(j.space())),
    })
}

fn cone(path: &Path, xi: &str, variant: Variant, below: Option<&str>, xi_end: XiEnd) -> Result<Outcome> {
    let file = docs::read_space(path)?;
    docs::forbid_centers(&file, "cone")?;
    let placement = match variant {
        Variant::Min => ConePlacement::Min,
        Variant::Max => ConePlacement::Max,
        Variant::Relative => ConePlacement::Relative {
            below: parse_below(&file.space, "the space", below)?,
            xi_maximal: matches!(xi_end, XiEnd::Maximal),
        },
    };
    let result = relative_cone(&file.space, Label::new(xi), &placement)?;
    let mut digest = Digest::new("cone");
    digest.push_doc("space", &file.doc)?;
    digest.push("xi", xi);
    digest.push("variant", variant_str(variant));
    digest.push("below", below.unwrap_or(""));
    digest.push("xi_end", xi_end_str(xi_end));
    let outputs = json!({
        "variant": variant_str(variant),
        "xi": xi,
        "space": serde_json::to_value(docs::space_document(&result, None, &[])?)?,
    });
    Ok(Outcome {
        operation: "cone",
        digest: digest.finish(),
        verdict: None,
        outputs,
        poset: Some(render::label_poset(&result)),
    })
}

fn blowup(path: &Path, centers: Option<&str>) -> Result<Outcome> {
    let file = docs::read_space(path)?;
    let extra = centers.map_or(Ok(Vec::new()), sigma::parse_centers)?;
    let refined = docs::refine(&file, &extra)?;
    let mut digest = Digest::new("blowup");
    digest.push_doc("space", &file.doc)?;
    digest.push("centers", centers.unwrap_or(""));
    let mut fans = Vec::new();
    for corner in file.space.maximal_simplices() {
        let fan = refined
            .fan(&corner)
            .context("every corner carries a fan")?;
        fans.push(json!({
            "corner": render::labels(&corner),
            "cones": render::fan(fan)?,
        }));
    }
    let outputs = json!({
        "centers_applied": file.centers.len() + extra.len(),
        "rays": render::rays(&refined.rays())?,
        "fans": fans,
    });
    let poset = render::try_label_order(&file.space, refined.face_poset());
    Ok(Outcome {
        operation: "blowup",
        digest: digest.finish(),
        verdict: None,
        outputs,
        poset: Some(poset),
    })
}

fn lift_check(path: &Path, centers: Option<&str>) -> Result<Outcome> {
    let file = docs::read_map(path)?;
    let extra = centers.map_or(Ok(Vec::new()), sigma::parse_centers)?;
    let mut refined = cornercalc::corners::plain_refinement(file.map.codomain());
    for center in file.codomain_centers.iter().chain(extra.iter()) {
        refined = refined.blow_up_face(center)?;
    }
    let mut digest = Digest::new("lift-check");
    digest.push_doc("map", &file.doc)?;
    digest.push("centers", centers.unwrap_or(""));
    let lifted = file.map.lift_through_blowup(&refined)?;
    let outputs = match &lifted {
        None => json!({ "exists": false }),
        Some(lift) => {
            let mut columns = Map::new();
            for (h, column) in lift.columns() {
                let entries: Vec<Value> = column
                    .iter()
                    .map(|(ray, exponent)| {
                        Ok(json!({
                            "ray": render::ray(ray)?,
                            "exponent": render::int(exponent)?,
                        }))
                    })
                    .collect::<Result<_>>()?;
                columns.insert(h.to_string(), Value::Array(entries));
            }
            json!({
                "exists": true,
                "columns": Value::Object(columns),
                "simple": lift.is_simple(),
                "b_normal": lift.is_b_normal(),
            })
        }
    };
    let poset = render::try_label_order(file.map.codomain(), refined.face_poset());
    Ok(Outcome {
        operation: "lift-check",
        digest: digest.finish(),
        verdict: Some(lifted.is_some()),
        outputs,
        poset: Some(poset),
    })
}

fn sigma_check(path: &Path, sigmas: &str) -> Result<Outcome> {
    let file = docs::read_space(path)?;
    let combinations = sigma::parse_sigmas(sigmas)?;
    let refined = docs::refine(&file, &[])?;
    let mut digest = Digest::new("sigma-check");
    digest.push_doc("space", &file.doc)?;
    digest.push(
        "sigmas",
        &combinations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let mut all_smooth = true;
    let mut reports = Vec::new();
    for combination in &combinations {
        let report = cornercalc::bmaps::sigma_lift(&refined, combination);
        if matches!(report.verdict, SigmaVerdict::NotSmooth) {
            all_smooth = false;
        }
        reports.push(json!({
            "combination": combination.to_string(),
            "verdict": render::sigma_verdict(&report.verdict),
            "vanishing": render::rays(&report.vanishing)?,
            "inverse_vanishing": render::rays(&report.inverse_vanishing)?,
        }));
    }
    let outputs = json!({ "sigmas": reports });
    let poset = render::try_label_order(&file.space, refined.face_poset());
    Ok(Outcome {
        operation: "sigma-check",
        digest: digest.finish(),
        verdict: Some(all_smooth),
        outputs,
        poset: Some(poset),
    })
}

fn psub_check(path: &Path, sigmas: &str) -> Result<Outcome> {
    let file = docs::read_space(path)?;
    let combinations = sigma::parse_sigmas(sigmas)?;
    let refined = docs::refine(&file, &[])?;
    let mut digest = Digest::new("psub-check");
    digest.push_doc("space", &file.doc)?;
    digest.push(
        "sigmas",
        &combinations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let psub = cornercalc::bmaps::psub_lift(&refined, &combinations);
    let verdicts: Vec<Value> = combinations
        .iter()
        .map(|c| {
            let report = cornercalc::bmaps::sigma_lift(&refined, c);
            json!({
                "combination": c.to_string(),
                "verdict": render::sigma_verdict(&report.verdict),
            })
        })
        .collect();
    let outputs = json!({ "psub": psub, "sigmas": verdicts });
    let poset = render::try_label_order(&file.space, refined.face_poset());
    Ok(Outcome {
        operation: "psub-check",
        digest: digest.finish(),
        verdict: Some(psub),
        outputs,
        poset: Some(poset),
    })
}

fn fiber_product_op(f: &Path, g: &Path) -> Result<Outcome> {
    let ff = docs::read_map(f)?;
    let gf = docs::read_map(g)?;
    ensure!(
        ff.codomain_centers.is_empty() && gf.codomain_centers.is_empty(),
        "fiber products operate on unblown codomains; remove the blowups"
    );
    let fp = fiber_product(&ff.map, &gf.map)?;
    let mut digest = Digest::new("fiber-product");
    digest.push_doc("f", &ff.doc)?;
    digest.push_doc("g", &gf.doc)?;
    let mut pairs = Map::new();
    for (label, pair) in &fp.pairs {
        pairs.insert(
            label.to_string(),
            json!({ "left": pair.left.to_string(), "right": pair.right.to_string() }),
        );
    }
    let mut kinds = Map::new();
    for (label, kind) in &fp.tags {
        let text = match kind {
            FiberFaceKind::FiberProduct => "fiber-product",
            FiberFaceKind::JoinType => "join-type",
        };
        kinds.insert(label.to_string(), Value::from(text));
    }
    let mut functionals = Map::new();
    for (label, functional) in &fp.functionals {
        functionals.insert(label.to_string(), render::ray(functional)?);
    }
    let outputs = json!({
        "elements": render::labels(&fp.elements),
        "pairs": Value::Object(pairs),
        "order": render::label_pairs(&fp.order),
        "kinds": Value::Object(kinds),
        "functionals": Value::Object(functionals),
        "psub_ok": fp.psub_ok,
    });
    Ok(Outcome {
        operation: "fiber-product",
        digest: digest.finish(),
        verdict: None,
        outputs,
        poset: None,
    })
}

fn manybody(path: &Path) -> Result<Outcome> {
    let file = docs::read_arrangement(path)?;
    let mb = mb_space(&file.arrangement)?;
    let mut digest = Digest::new("manybody");
    digest.push_doc("arrangement", &file.doc)?;
    let mut hypersurfaces = Vec::new();
    for label in mb.space().hypersurfaces() {
        let subspace = mb.subspace(label).expect("every label names a subspace");
        let basis: Vec<Vec<Value>> = subspace
            .basis()
            .iter()
            .map(|row| row.iter().map(render::rational).collect())
            .collect();
        hypersurfaces.push(json!({
            "label": label.to_string(),
            "dim": subspace.dim(),
            "basis": basis,
        }));
    }
    let mut fibrations = Map::new();
    for (label, fibration) in mb.fibrations() {
        let dims: Vec<usize> = fibration
            .fiber
            .subspaces()
            .iter()
            .map(|s| s.dim())
            .collect();
        fibrations.insert(
            label.to_string(),
            json!({
                "base_index": render::labels(&fibration.base_index),
                "fiber": {
                    "ambient_dim": fibration.fiber.ambient_dim(),
                    "subspace_dims": dims,
                },
            }),
        );
    }
    let outputs = json!({
        "ambient_dim": file.arrangement.ambient_dim(),
        "interior": mb.space().interior().to_string(),
        "hypersurfaces": hypersurfaces,
        "poset_edges": render::label_pairs(&render::hypersurface_covers(mb.space())),
        "corners": simplices(mb.space()),
        "fibrations": Value::Object(fibrations),
    });
    Ok(Outcome {
        operation: "manybody",
        digest: digest.finish(),
        verdict: None,
        outputs,
        poset: Some(render::label_poset(mb.space())),
    })
}

fn mb_check(a: &Path, b: &Path) -> Result<Outcome> {
    let fa = docs::read_arrangement(a)?;
    let fb = docs::read_arrangement(b)?;
    let check = mb_product_check(&fa.arrangement, &fb.arrangement)?;
    let mut digest = Digest::new("mb-product-check");
    digest.push_doc("a", &fa.doc)?;
    digest.push_doc("b", &fb.doc)?;
    let mut witness = Map::new();
    for (from, to) in &check.witness {
        witness.insert(from.to_string(), Value::from(to.to_string()));
    }
    let outputs = json!({
        "iso": check.iso,
        "witness": Value::Object(witness),
        "arrangement_hypersurfaces": check.arrangement_side.space().hypersurfaces().len(),
        "product_hypersurfaces": check.product_side.space().hypersurfaces().len(),
    });
    Ok(Outcome {
        operation: "mb-product-check",
        digest: digest.finish(),
        verdict: Some(check.iso),
        outputs,
        poset: Some(render::label_poset(check.arrangement_side.space())),
    })
}

fn frames_verify(kind: Kind, n: usize, k: Option<usize>) -> Result<Outcome> {
    let frame_kind = match kind {
        Kind::Edge => FrameKind::Edge,
        Kind::Wedge => FrameKind::Wedge,
        Kind::Phi => FrameKind::Phi,
    };
    let mut digest = Digest::new("frames-verify");
    digest.push("kind", kind_str(kind));
    digest.push("n", &n.to_string());
    digest.push("k", &k.map_or(String::new(), |k| k.to_string()));
    let strings = |fields: &[frames::MonomialVectorField]| -> Vec<String> {
        fields.iter().map(|f| f.to_string()).collect()
    };
    let outcome = match k {
        Some(k) => {
            let report = frames::verify_splitting(frame_kind, n, k)?;
            let outputs = json!({
                "kind": kind_str(kind),
                "n": n,
                "k": k,
                "table_ok": report.table_ok,
                "kernel_frame": strings(&report.kernel_frame),
                "image_frame": strings(&report.image_frame),
            });
            Outcome {
                operation: "frames-verify",
                digest: digest.finish(),
                verdict: Some(report.table_ok),
                outputs,
                poset: None,
            }
        }
        None => {
            let frame = frames::standard_frame(frame_kind, n);
            let mut outputs = json!({
                "kind": kind_str(kind),
                "n": n,
                "frame": strings(&frame),
            });
            let mut verdict = None;
            if matches!(kind, Kind::Phi) {
                let rho = frames::monomial((1..=n).map(|i| (format!("x{i}"), 1)));
                let annihilates = frame.iter().all(|f| f.annihilates_to_second_order(&rho));
                outputs["annihilates_defining_function"] = Value::from(annihilates);
                verdict = Some(annihilates);
            }
            Outcome {
                operation: "frames-verify",
                digest: digest.finish(),
                verdict,
                outputs,
                poset: None,
            }
        }
    };
    Ok(outcome)
}

//! JSON document formats shared by all subcommands.
//!
//! Three input document kinds — spaces, boundary maps, and linear subspace
//! arrangements — plus the report envelope every subcommand emits. Saving
//! is canonical: keys sorted, the order stored as its covering relation,
//! corners as maximal simplices only. Loading restores the full data, so
//! load-then-save is idempotent and repeated runs over the same inputs
//! produce byte-identical reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use cornercalc::bmaps::BMap;
use cornercalc::corners::{plain_refinement, CornersSpace, RefinedSpace};
use cornercalc::manybody::{close_arrangement, Arrangement, Subspace};
use cornercalc::monoid_fan::MonoidVector;
use cornercalc::Label;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Fiber and base hypersurface index sets annotated on one hypersurface.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSets {
    #[serde(default)]
    pub fiber: Vec<String>,
    #[serde(default)]
    pub base: Vec<String>,
}

/// An ordered-corners space: interior label, boundary hypersurfaces, order
/// edges (any generating set; the transitive closure is restored on load),
/// corner simplices, optional fibration annotations, and optional blow-up
/// centers to apply before fan-level operations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub schema_version: u32,
    pub interior: String,
    pub hypersurfaces: Vec<String>,
    #[serde(default)]
    pub order: Vec<[String; 2]>,
    #[serde(default)]
    pub corners: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibered_index_sets: Option<BTreeMap<String, IndexSets>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blowups: Vec<Vec<BTreeMap<String, i64>>>,
}

/// A boundary map between two spaces, as a nonnegative exponent matrix:
/// `exponents[h][g]` is the power of the codomain hypersurface `g` in the
/// pullback along the domain hypersurface `h`. Missing rows and entries
/// are zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub schema_version: u32,
    pub domain: SpaceDocument,
    pub codomain: SpaceDocument,
    #[serde(default)]
    pub exponents: BTreeMap<String, BTreeMap<String, i64>>,
}

/// A scalar in a subspace row: a plain integer or a fraction `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

/// A finite collection of linear subspaces of `Q^n`, each given by spanning
/// rows. The intersection closure, the zero subspace, and the whole space
/// are added on load.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrangementDocument {
    pub schema_version: u32,
    pub ambient_dim: usize,
    #[serde(default)]
    pub subspaces: Vec<Vec<Vec<Scalar>>>,
}

/// A space document together with its parsed space and blow-up centers.
pub struct SpaceFile {
    pub doc: SpaceDocument,
    pub space: CornersSpace,
    pub centers: Vec<Vec<MonoidVector>>,
}

/// A map document together with its parsed map and the codomain's centers.
pub struct MapFile {
    pub doc: MapDocument,
    pub map: BMap,
    pub codomain_centers: Vec<Vec<MonoidVector>>,
}

/// An arrangement document together with its intersection closure.
pub struct ArrangementFile {
    pub doc: ArrangementDocument,
    pub arrangement: Arrangement,
}

pub fn read_space(path: &Path) -> Result<SpaceFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: SpaceDocument = serde_json::from_str(&text)
        .with_context(|| format!("parsing space document {}", path.display()))?;
    space_from_document(doc).with_context(|| format!("loading {}", path.display()))
}

pub fn space_from_document(doc: SpaceDocument) -> Result<SpaceFile> {
    ensure!(
        doc.schema_version == SCHEMA_VERSION,
        "unsupported schema_version {} (expected {SCHEMA_VERSION})",
        doc.schema_version
    );
    let space = CornersSpace::new(
        Label::new(&doc.interior),
        doc.hypersurfaces.iter().map(Label::new),
        doc.order
            .iter()
            .map(|[a, b]| (Label::new(a), Label::new(b))),
        doc.corners
            .iter()
            .map(|c| c.iter().map(Label::new).collect::<BTreeSet<Label>>()),
    )?;
    if let Some(annotations) = &doc.fibered_index_sets {
        for (h, sets) in annotations {
            let known = |l: &String| space.hypersurfaces().contains(&Label::new(l));
            ensure!(known(h), "fibered_index_sets mentions unknown hypersurface {h}");
            for l in sets.fiber.iter().chain(sets.base.iter()) {
                ensure!(known(l), "index sets of {h} mention unknown hypersurface {l}");
            }
        }
    }
    let mut centers = Vec::new();
    for (i, center) in doc.blowups.iter().enumerate() {
        let mut generators = Vec::new();
        for generator in center {
            for label in generator.keys() {
                ensure!(
                    space.hypersurfaces().contains(&Label::new(label)),
                    "blow-up center {i} mentions unknown hypersurface {label}"
                );
            }
            generators.push(MonoidVector::from_pairs(
                generator.iter().map(|(l, c)| (Label::new(l), *c)),
            ));
        }
        centers.push(generators);
    }
    let doc = space_document(&space, doc.fibered_index_sets.as_ref(), &centers)?;
    Ok(SpaceFile { doc, space, centers })
}

/// Canonical document for a space: sorted labels, covering order edges,
/// maximal corners only.
pub fn space_document(
    space: &CornersSpace,
    fibered: Option<&BTreeMap<String, IndexSets>>,
    centers: &[Vec<MonoidVector>],
) -> Result<SpaceDocument> {
    let order: BTreeSet<[String; 2]> = space
        .order()
        .covers()
        .into_iter()
        .map(|(a, b)| [a.to_string(), b.to_string()])
        .collect();
    let mut corners: Vec<Vec<String>> = space
        .maximal_simplices()
        .into_iter()
        .map(|s| s.iter().map(Label::to_string).collect())
        .collect();
    corners.sort();
    let fibered_index_sets = fibered.map(|m| {
        m.iter()
            .map(|(h, sets)| {
                let normalize = |v: &[String]| {
                    let set: BTreeSet<&String> = v.iter().collect();
                    set.into_iter().cloned().collect::<Vec<String>>()
                };
                (
                    h.clone(),
                    IndexSets {
                        fiber: normalize(&sets.fiber),
                        base: normalize(&sets.base),
                    },
                )
            })
            .collect()
    });
    let mut blowups = Vec::new();
    for center in centers {
        let mut generators = Vec::new();
        for v in center {
            let mut m = BTreeMap::new();
            for (label, coeff) in v.coords() {
                let coeff: i64 = coeff
                    .try_into()
                    .context("blow-up coefficient too large for a document")?;
                m.insert(label.to_string(), coeff);
            }
            generators.push(m);
        }
        blowups.push(generators);
    }
    Ok(SpaceDocument {
        schema_version: SCHEMA_VERSION,
        interior: space.interior().to_string(),
        hypersurfaces: space.hypersurfaces().iter().map(Label::to_string).collect(),
        order: order.into_iter().collect(),
        corners,
        fibered_index_sets,
        blowups,
    })
}

/// Applies a space file's own blow-up centers, then the extra ones.
pub fn refine(file: &SpaceFile, extra: &[Vec<MonoidVector>]) -> Result<RefinedSpace> {
    let mut refined = plain_refinement(&file.space);
    for center in file.centers.iter().chain(extra.iter()) {
        refined = refined.blow_up_face(center)?;
    }
    Ok(refined)
}

pub fn read_map(path: &Path) -> Result<MapFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: MapDocument = serde_json::from_str(&text)
        .with_context(|| format!("parsing map document {}", path.display()))?;
    map_from_document(doc).with_context(|| format!("loading {}", path.display()))
}

pub fn map_from_document(doc: MapDocument) -> Result<MapFile> {
    ensure!(
        doc.schema_version == SCHEMA_VERSION,
        "unsupported schema_version {} (expected {SCHEMA_VERSION})",
        doc.schema_version
    );
    let domain = space_from_document(doc.domain).context("loading the domain")?;
    ensure!(
        domain.centers.is_empty(),
        "blow-ups on a map's domain are not supported"
    );
    let codomain = space_from_document(doc.codomain).context("loading the codomain")?;
    let columns: Vec<(Label, MonoidVector)> = doc
        .exponents
        .iter()
        .map(|(h, row)| {
            (
                Label::new(h),
                MonoidVector::from_pairs(row.iter().map(|(g, e)| (Label::new(g), *e))),
            )
        })
        .collect();
    let map = BMap::new(domain.space, codomain.space, columns)?;
    let doc = map_document(&map, &codomain.centers)?;
    Ok(MapFile {
        doc,
        map,
        codomain_centers: codomain.centers,
    })
}

/// Canonical document for a boundary map: canonical factor spaces and the
/// exponent matrix with zero entries dropped.
pub fn map_document(map: &BMap, codomain_centers: &[Vec<MonoidVector>]) -> Result<MapDocument> {
    let mut exponents = BTreeMap::new();
    for (h, column) in map.columns() {
        let mut row = BTreeMap::new();
        for (g, e) in column.coords() {
            let e: i64 = e.try_into().context("exponent too large for a document")?;
            row.insert(g.to_string(), e);
        }
        if !row.is_empty() {
            exponents.insert(h.to_string(), row);
        }
    }
    Ok(MapDocument {
        schema_version: SCHEMA_VERSION,
        domain: space_document(map.domain(), None, &[])?,
        codomain: space_document(map.codomain(), None, codomain_centers)?,
        exponents,
    })
}

fn parse_scalar(s: &Scalar) -> Result<BigRational> {
    match s {
        Scalar::Int(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
        Scalar::Text(t) => {
            let (num, den) = match t.split_once('/') {
                Some((n, d)) => (n, d),
                None => (t.as_str(), "1"),
            };
            let num = BigInt::from_str(num.trim())
                .with_context(|| format!("invalid numerator in scalar {t:?}"))?;
            let den = BigInt::from_str(den.trim())
                .with_context(|| format!("invalid denominator in scalar {t:?}"))?;
            ensure!(den != BigInt::from(0), "zero denominator in scalar {t:?}");
            Ok(BigRational::new(num, den))
        }
    }
}

fn render_scalar(r: &BigRational) -> Scalar {
    if r.denom() == &BigInt::from(1) {
        match i64::try_from(r.numer()) {
            Ok(n) => Scalar::Int(n),
            Err(_) => Scalar::Text(r.numer().to_string()),
        }
    } else {
        Scalar::Text(format!("{}/{}", r.numer(), r.denom()))
    }
}

pub fn read_arrangement(path: &Path) -> Result<ArrangementFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: ArrangementDocument = serde_json::from_str(&text)
        .with_context(|| format!("parsing arrangement document {}", path.display()))?;
    arrangement_from_document(doc).with_context(|| format!("loading {}", path.display()))
}

pub fn arrangement_from_document(doc: ArrangementDocument) -> Result<ArrangementFile> {
    ensure!(
        doc.schema_version == SCHEMA_VERSION,
        "unsupported schema_version {} (expected {SCHEMA_VERSION})",
        doc.schema_version
    );
    let mut raw = Vec::new();
    let mut canonical = Vec::new();
    for rows in &doc.subspaces {
        let parsed: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|row| row.iter().map(parse_scalar).collect())
            .collect::<Result<_>>()?;
        let subspace = Subspace::new(doc.ambient_dim, parsed)?;
        canonical.push(
            subspace
                .basis()
                .iter()
                .map(|row| row.iter().map(render_scalar).collect())
                .collect::<Vec<Vec<Scalar>>>(),
        );
        raw.push(subspace);
    }
    canonical.sort();
    canonical.dedup();
    let arrangement = close_arrangement(doc.ambient_dim, raw)?;
    let doc = ArrangementDocument {
        schema_version: SCHEMA_VERSION,
        ambient_dim: doc.ambient_dim,
        subspaces: canonical,
    };
    Ok(ArrangementFile { doc, arrangement })
}

/// FNV-1a hash of the operation name, its canonical input documents, and
/// the normalized option string: a stable fingerprint tying a report to
/// its inputs without embedding file paths.
pub struct Digest {
    state: u64,
}

impl Digest {
    pub fn new(operation: &str) -> Digest {
        let mut d = Digest {
            state: 0xcbf2_9ce4_8422_2325,
        };
        d.push("operation", operation);
        d
    }

    fn raw(&mut self, bytes: &[u8]) {
        for b in (bytes.len() as u64)
            .to_le_bytes()
            .iter()
            .chain(bytes.iter())
        {
            self.state ^= u64::from(*b);
            self.state = self.state.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn push(&mut self, tag: &str, content: &str) {
        self.raw(tag.as_bytes());
        self.raw(content.as_bytes());
    }

    pub fn push_doc<T: Serialize>(&mut self, tag: &str, doc: &T) -> Result<()> {
        self.push(tag, &serde_json::to_string(doc)?);
        Ok(())
    }

    pub fn finish(&self) -> String {
        format!("fnv1a64:{:016x}", self.state)
    }
}

/// The report envelope: schema version, operation name, input fingerprint,
/// optional seed and verdict, and the operation's outputs.
pub fn report(
    operation: &str,
    digest: &str,
    seed: Option<u64>,
    verdict: Option<bool>,
    outputs: Value,
) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    m.insert("operation".into(), Value::from(operation));
    m.insert("inputs_digest".into(), Value::from(digest));
    if let Some(seed) = seed {
        m.insert("seed".into(), Value::from(seed));
    }
    if let Some(verdict) = verdict {
        m.insert("verdict".into(), Value::from(verdict));
    }
    m.insert("outputs".into(), outputs);
    Value::Object(m)
}

/// Rejects documents that carry blow-ups, for operations defined on the
/// unrefined space.
pub fn forbid_centers(file: &SpaceFile, operation: &str) -> Result<()> {
    if file.centers.is_empty() {
        Ok(())
    } else {
        bail!("{operation} operates on the space itself; remove the document's blowups")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrant() -> SpaceDocument {
        serde_json::from_value(serde_json::json!({
            "schema_version": 1,
            "interior": "0",
            "hypersurfaces": ["a", "b"],
            "order": [["0", "a"], ["0", "b"], ["a", "b"]],
            "corners": [["a", "b"]],
        }))
        .expect("valid document")
    }

    #[test]
    fn loading_then_saving_is_idempotent() {
        let file = space_from_document(quadrant()).expect("loads");
        let doc = space_document(&file.space, None, &file.centers).expect("renders");
        assert_eq!(doc, file.doc);
        let reloaded = space_from_document(doc.clone()).expect("reloads");
        assert_eq!(reloaded.doc, doc);
    }

    #[test]
    fn transitive_closure_is_restored_from_covers() {
        let file = space_from_document(quadrant()).expect("loads");
        assert_eq!(file.doc.order, vec![
            ["0".to_string(), "a".to_string()],
            ["a".to_string(), "b".to_string()],
        ]);
        assert!(file
            .space
            .order()
            .less(&Label::new("0"), &Label::new("b")));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let result = serde_json::from_value::<SpaceDocument>(serde_json::json!({
            "schema_version": 1,
            "interior": "0",
            "hypersurfaces": [],
            "cornerz": [],
        }));
        assert!(result.is_err());
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let mut doc = quadrant();
        doc.schema_version = 7;
        assert!(space_from_document(doc).is_err());
    }

    #[test]
    fn blowup_centers_are_parsed_and_validated() {
        let mut doc = quadrant();
        doc.blowups = vec![vec![
            BTreeMap::from([("a".to_string(), 1)]),
            BTreeMap::from([("b".to_string(), 1)]),
        ]];
        let file = space_from_document(doc.clone()).expect("loads");
        assert_eq!(file.centers.len(), 1);
        let refined = refine(&file, &[]).expect("blows up");
        assert_eq!(refined.rays().len(), 3);

        doc.blowups = vec![vec![BTreeMap::from([("zz".to_string(), 1)])]];
        assert!(space_from_document(doc).is_err());
    }

    #[test]
    fn fraction_scalars_round_trip() {
        let doc: ArrangementDocument = serde_json::from_value(serde_json::json!({
            "schema_version": 1,
            "ambient_dim": 2,
            "subspaces": [[[1, "1/2"]]],
        }))
        .expect("valid document");
        let file = arrangement_from_document(doc).expect("loads");
        // Zero and the whole plane are adjoined by the closure.
        assert_eq!(file.arrangement.subspaces().len(), 3);
        assert_eq!(file.doc.subspaces, vec![vec![vec![
            Scalar::Int(1),
            Scalar::Text("1/2".to_string()),
        ]]]);
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let mut a = Digest::new("validate");
        a.push("space", "x");
        let mut b = Digest::new("validate");
        b.push("space", "x");
        assert_eq!(a.finish(), b.finish());
        let mut c = Digest::new("validate");
        c.push("space", "y");
        assert_ne!(a.finish(), c.finish());
    }
}

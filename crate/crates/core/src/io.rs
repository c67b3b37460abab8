//! JSON documents (schema `exobasis/1`), CSV exports and number formatting.
//!
//! Rationals travel as `"p/q"` strings, lattice points and dual vectors as
//! integer arrays. Parse errors from malformed JSON carry line and column.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::admissibility::{AdmissibilityCertificate, Violation};
use crate::basis::{BoundsReport, ExponentialSystem, Offset};
use crate::completion::Addition;
use crate::error::{Error, Result};
use crate::lattice::{DualVector, Lattice, LatticePoint};
use crate::multitile::{fiber_partition, FiberClass, FiberPartition, MultiTileSet, Piece};
use crate::rational::{self, Rational};
use crate::region::{UnitBox, UnitRegion};

pub const SCHEMA: &str = "exobasis/1";

/// A rational serialized as `"p/q"`.
#[derive(Debug, Clone, PartialEq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map(Q).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    pub dim: usize,
    pub basis: Vec<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDoc {
    pub lo: Vec<Q>,
    pub hi: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDoc {
    pub boxes: Vec<BoxDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub region: RegionDoc,
    pub translate: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDoc {
    #[serde(default = "schema_tag")]
    pub schema: String,
    pub lattice: LatticeDoc,
    pub pieces: Vec<PieceDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDoc {
    pub region: RegionDoc,
    pub points: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    #[serde(default = "schema_tag")]
    pub schema: String,
    pub lattice: LatticeDoc,
    pub classes: Vec<ClassDoc>,
    pub uncovered: RegionDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub n: u64,
    pub v: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationDoc {
    pub region: RegionDoc,
    pub points: [Vec<i64>; 2],
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationsDoc {
    pub violations: Vec<ViolationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OffsetDoc {
    Structured { s: i64, n: u64, w: Vec<i64>, a: Vec<f64> },
    Free { a: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassBoundsDoc {
    #[serde(rename = "R")]
    pub r: Vec<Vec<i64>>,
    pub residues: Option<Vec<u64>>,
    pub eig_min: f64,
    pub eig_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsDoc {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "A_L2")]
    pub a_l2: f64,
    #[serde(rename = "B_L2")]
    pub b_l2: f64,
    pub kind: String,
    pub k: usize,
    pub classes: Vec<ClassBoundsDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditionDoc {
    /// `None` for the uncovered part of the fundamental domain.
    pub class: Option<usize>,
    pub region: RegionDoc,
    pub residue: u64,
    pub point: Vec<i64>,
}

fn schema_tag() -> String {
    SCHEMA.to_string()
}

fn check_schema(schema: &str) -> Result<()> {
    if schema == SCHEMA {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "unsupported schema {schema:?}, expected {SCHEMA:?}"
        )))
    }
}

/// Deserializes JSON, reporting syntax and type errors with line and column.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let msg = msg
            .rsplit_once(" at line ")
            .map_or(msg.as_str(), |(head, _)| head)
            .to_string();
        Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), msg))
    })
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

fn unq(v: Vec<Q>) -> Vec<Rational> {
    v.into_iter().map(|q| q.0).collect()
}

impl LatticeDoc {
    pub fn from_lattice(l: &Lattice) -> Self {
        LatticeDoc {
            dim: l.dim(),
            basis: l.basis().iter().map(|row| qs(row)).collect(),
        }
    }

    pub fn to_lattice(self) -> Result<Lattice> {
        if self.basis.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.basis.len(),
            });
        }
        Lattice::new(self.basis.into_iter().map(unq).collect())
    }
}

impl RegionDoc {
    pub fn from_region(r: &UnitRegion) -> Self {
        RegionDoc {
            boxes: r
                .boxes()
                .iter()
                .map(|b| BoxDoc {
                    lo: qs(&b.lo),
                    hi: qs(&b.hi),
                })
                .collect(),
        }
    }

    pub fn to_region(self, dim: usize) -> Result<UnitRegion> {
        let boxes = self
            .boxes
            .into_iter()
            .map(|b| UnitBox::new(unq(b.lo), unq(b.hi)))
            .collect::<Result<Vec<_>>>()?;
        UnitRegion::from_boxes(dim, boxes)
    }
}

impl SetDoc {
    pub fn from_set(s: &MultiTileSet) -> Self {
        SetDoc {
            schema: schema_tag(),
            lattice: LatticeDoc::from_lattice(s.lattice()),
            pieces: s
                .pieces()
                .iter()
                .map(|p| PieceDoc {
                    region: RegionDoc::from_region(&p.region),
                    translate: p.translate.0.clone(),
                })
                .collect(),
        }
    }

    pub fn to_set(self) -> Result<MultiTileSet> {
        check_schema(&self.schema)?;
        let lattice = self.lattice.to_lattice()?;
        let dim = lattice.dim();
        let pieces = self
            .pieces
            .into_iter()
            .map(|p| {
                Ok(Piece {
                    region: p.region.to_region(dim)?,
                    translate: LatticePoint(p.translate),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MultiTileSet::new(lattice, pieces)
    }
}

impl PartitionDoc {
    pub fn from_partition(p: &FiberPartition) -> Self {
        PartitionDoc {
            schema: schema_tag(),
            lattice: LatticeDoc::from_lattice(&p.lattice),
            classes: p
                .classes
                .iter()
                .map(|c| ClassDoc {
                    region: RegionDoc::from_region(&c.region),
                    points: c.points.iter().map(|z| z.0.clone()).collect(),
                })
                .collect(),
            uncovered: RegionDoc::from_region(&p.uncovered),
        }
    }

    /// Rebuilds the partition and checks that it is the canonical one for
    /// the set it describes.
    pub fn to_partition(self) -> Result<FiberPartition> {
        check_schema(&self.schema)?;
        let lattice = self.lattice.to_lattice()?;
        let dim = lattice.dim();
        let classes = self
            .classes
            .into_iter()
            .map(|c| {
                Ok(FiberClass {
                    region: c.region.to_region(dim)?,
                    points: c.points.into_iter().map(LatticePoint).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let uncovered = self.uncovered.to_region(dim)?;
        let p = FiberPartition {
            lattice,
            classes,
            uncovered,
        };
        if fiber_partition(&p.to_multitile()?)? != p {
            return Err(Error::Parse(
                "classes do not form the canonical fiber partition of their union".into(),
            ));
        }
        Ok(p)
    }
}

impl CertificateDoc {
    pub fn from_certificate(c: &AdmissibilityCertificate) -> Self {
        CertificateDoc {
            n: c.n(),
            v: c.v().0.clone(),
        }
    }

    pub fn to_certificate(self) -> Result<AdmissibilityCertificate> {
        AdmissibilityCertificate::new(self.n, DualVector(self.v))
    }
}

impl ViolationsDoc {
    pub fn from_violations(vs: &[Violation]) -> Self {
        ViolationsDoc {
            violations: vs
                .iter()
                .map(|v| ViolationDoc {
                    region: RegionDoc::from_region(&v.class_region),
                    points: [v.points.0 .0.clone(), v.points.1 .0.clone()],
                    residue: v.residue,
                })
                .collect(),
        }
    }
}

pub fn offset_docs(sys: &ExponentialSystem) -> Vec<OffsetDoc> {
    sys.offsets()
        .iter()
        .enumerate()
        .map(|(j, off)| match off {
            Offset::Structured { s, n, v } => OffsetDoc::Structured {
                s: *s,
                n: *n,
                w: v.0.clone(),
                a: sys.offset_vector(j),
            },
            Offset::Free(a) => OffsetDoc::Free { a: a.clone() },
        })
        .collect()
}

impl BoundsDoc {
    pub fn from_report(r: &BoundsReport) -> Self {
        BoundsDoc {
            a: r.a,
            b: r.b,
            a_l2: r.a_l2,
            b_l2: r.b_l2,
            kind: r.kind.to_string(),
            k: r.k,
            classes: r
                .per_class
                .iter()
                .map(|c| ClassBoundsDoc {
                    r: c.points.iter().map(|z| z.0.clone()).collect(),
                    residues: c.residues.clone(),
                    eig_min: c.eig_min,
                    eig_max: c.eig_max,
                })
                .collect(),
        }
    }
}

impl AdditionDoc {
    pub fn from_addition(a: &Addition, p: &FiberPartition) -> Self {
        let region = match a.class_index {
            Some(i) => &p.classes[i].region,
            None => &p.uncovered,
        };
        AdditionDoc {
            class: a.class_index,
            region: RegionDoc::from_region(region),
            residue: a.residue,
            point: a.point.0.clone(),
        }
    }
}

pub fn read_set(text: &str) -> Result<MultiTileSet> {
    parse_json::<SetDoc>(text)?.to_set()
}

pub fn write_set(s: &MultiTileSet) -> String {
    to_json_string(&SetDoc::from_set(s))
}

pub fn read_partition(text: &str) -> Result<FiberPartition> {
    parse_json::<PartitionDoc>(text)?.to_partition()
}

pub fn write_partition(p: &FiberPartition) -> String {
    to_json_string(&PartitionDoc::from_partition(p))
}

/// Fixed-point with 12 significant digits; scientific notation outside
/// `[1e-4, 1e12)`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.*}", (DIGITS - 1) as usize, 0.0);
    }
    let mut exp = x.abs().log10().floor() as i32;
    // rounding can carry into a new leading digit, e.g. 9.99…9 → 10.0…0
    let rounded: f64 = format!("{:.*e}", (DIGITS - 1) as usize, x).parse().unwrap_or(x);
    if rounded.abs() >= 10f64.powi(exp + 1) {
        exp += 1;
    }
    if !(-4..12).contains(&exp) {
        return format!("{:.*e}", (DIGITS - 1) as usize, x);
    }
    format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, x)
}

/// `(1, -2)`-style rendering of integer coordinates.
pub fn fmt_point(z: &[i64]) -> String {
    let inner: Vec<String> = z.iter().map(i64::to_string).collect();
    format!("({})", inner.join(", "))
}

/// `[lo, hi)` per box, axes joined by `×`, boxes by ` ∪ `.
pub fn fmt_region(r: &UnitRegion) -> String {
    if r.is_empty() {
        return "∅".to_string();
    }
    r.boxes()
        .iter()
        .map(|b| {
            b.lo.iter()
                .zip(&b.hi)
                .map(|(l, h)| format!("[{l}, {h})"))
                .collect::<Vec<_>>()
                .join("×")
        })
        .collect::<Vec<_>>()
        .join(" ∪ ")
}

fn csv_points(points: &[LatticePoint]) -> String {
    points
        .iter()
        .map(|z| z.0.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

/// One row per fiber class: `class,size,points,residues,eig_min,eig_max`.
pub fn bounds_csv(r: &BoundsReport) -> String {
    let mut out = String::from("class,size,points,residues,eig_min,eig_max\n");
    for (i, c) in r.per_class.iter().enumerate() {
        let residues = c
            .residues
            .as_ref()
            .map(|rs| rs.iter().map(u64::to_string).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{i},{},{},{residues},{},{}\n",
            c.points.len(),
            csv_points(&c.points),
            fmt_sig(c.eig_min),
            fmt_sig(c.eig_max),
        ));
    }
    out
}

/// One row per trial: `trial,quotient,lower,upper`.
pub fn trials_csv(quotients: &[f64], lower: f64, upper: f64) -> String {
    let mut out = String::from("trial,quotient,lower,upper\n");
    for (i, q) in quotients.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{}\n",
            fmt_sig(*q),
            fmt_sig(lower),
            fmt_sig(upper)
        ));
    }
    out
}

/// One row per trial: `trial,direct,fiber,rel_diff`.
pub fn parseval_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("trial,direct,fiber,rel_diff\n");
    for (i, (d, f)) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{}\n",
            fmt_sig(*d),
            fmt_sig(*f),
            fmt_sig((d - f).abs() / d.abs())
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::rational::ratio;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(2.0), "2.00000000000");
        assert_eq!(fmt_sig(-0.5), "-0.500000000000");
        assert_eq!(fmt_sig(0.0), "0.00000000000");
        assert_eq!(fmt_sig(123.456), "123.456000000");
        assert_eq!(fmt_sig(9.9999999999999), "10.0000000000");
        assert_eq!(fmt_sig(1e-9), "1.00000000000e-9");
        assert_eq!(fmt_sig(3e15), "3.00000000000e15");
    }

    #[test]
    fn set_round_trip() {
        let s = gallery::example_2_11(5).unwrap();
        let text = write_set(&s);
        assert!(text.contains("\"schema\": \"exobasis/1\""));
        assert!(text.contains("\"15/16\""));
        assert_eq!(read_set(&text).unwrap(), s);
    }

    #[test]
    fn partition_round_trip() {
        let p = fiber_partition(&gallery::example_2_10(4).unwrap()).unwrap();
        assert_eq!(read_partition(&write_partition(&p)).unwrap(), p);
    }

    #[test]
    fn non_canonical_partition_rejected() {
        let p = fiber_partition(&gallery::example_2_10(2).unwrap()).unwrap();
        let mut doc = PartitionDoc::from_partition(&p);
        doc.classes[0].points.reverse();
        let text = to_json_string(&doc);
        assert!(matches!(read_partition(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = read_set("{\n  \"lattice\": {\"dim\": 1,\n  \"basis\": [[\"1\"]]}\n  \"pieces\": []\n}").unwrap_err();
        let Error::Parse(msg) = err else { panic!("{err:?}") };
        assert!(msg.starts_with("line 4, column 3"), "{msg}");
    }

    #[test]
    fn bad_rationals_have_positions() {
        let text = r#"{"lattice": {"dim": 1, "basis": [["1/0"]]}, "pieces": []}"#;
        let Error::Parse(msg) = read_set(text).unwrap_err() else { panic!() };
        assert!(msg.starts_with("line 1, column "), "{msg}");
        assert!(msg.contains("1/0"), "{msg}");
    }

    #[test]
    fn semantic_errors_pass_through() {
        let text = r#"{"lattice": {"dim": 1, "basis": [["2"]]},
            "pieces": [{"region": {"boxes": [{"lo": ["1/2"], "hi": ["1/4"]}]}, "translate": [0]}]}"#;
        assert_eq!(read_set(text), Err(Error::MalformedBox { axis: 0 }));
        let text = r#"{"schema": "other/2", "lattice": {"dim": 1, "basis": [["1"]]}, "pieces": []}"#;
        assert!(matches!(read_set(text), Err(Error::Parse(_))));
    }

    #[test]
    fn scaled_lattice_reads_back() {
        let text = r#"{"lattice": {"dim": 1, "basis": [["1/2"]]},
            "pieces": [{"region": {"boxes": [{"lo": ["0"], "hi": ["0.5"]}]}, "translate": [3]}]}"#;
        let s = read_set(text).unwrap();
        assert_eq!(s.measure(), ratio(1, 4));
    }

    #[test]
    fn csv_layout() {
        let delta = gallery::box_k_tile(2, &Lattice::integer(1)).unwrap();
        let p = fiber_partition(&delta).unwrap();
        let c = AdmissibilityCertificate::new(2, DualVector(vec![1])).unwrap();
        let sys = crate::basis::build_offsets(&Lattice::integer(1), &c, 2).unwrap();
        let r = crate::basis::riesz_bounds(&p, &sys).unwrap();
        assert_eq!(
            bounds_csv(&r),
            "class,size,points,residues,eig_min,eig_max\n0,2,0;1,0;1,2.00000000000,2.00000000000\n"
        );
        assert_eq!(
            trials_csv(&[1.5], 1.0, 2.0),
            "trial,quotient,lower,upper\n0,1.50000000000,1.00000000000,2.00000000000\n"
        );
    }
}

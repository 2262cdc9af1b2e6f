//! Finite-type surface signatures, gluing moves, exhaustions, and simple
//! closed curves on planar stages.
//!
//! A signature records only what the homology layer consumes: genus (0 or 1),
//! ordered puncture labels, and ordered boundary labels. Planar stages are
//! disks with punctures (exactly one boundary); the end of an infinite-type
//! surface is never represented directly — a curve on a planar stage is
//! recorded by the finite set of punctures it encloses, i.e. the side away
//! from the boundary.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::homology::{HomologyClass, Symbol};
use crate::{Error, Result};

/// Finite-type surface signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSig {
    pub genus: u8,
    pub punctures: Vec<String>,
    pub boundaries: Vec<String>,
}

fn check_label(label: &str) -> Result<()> {
    if label.is_empty() || label.contains(':') || label.contains(',') || label.chars().any(char::is_whitespace) {
        return Err(Error::InvalidSignature {
            reason: format!("label `{label}` must be nonempty and free of `:`, `,`, and whitespace"),
        });
    }
    Ok(())
}

impl SurfaceSig {
    pub fn new(
        genus: u8,
        punctures: impl IntoIterator<Item = impl Into<String>>,
        boundaries: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let sig = SurfaceSig {
            genus,
            punctures: punctures.into_iter().map(Into::into).collect(),
            boundaries: boundaries.into_iter().map(Into::into).collect(),
        };
        sig.validate()?;
        Ok(sig)
    }

    /// Check the signature invariants: genus 0 or 1, pairwise distinct
    /// labels, and at most one boundary in the planar case (a disk with
    /// punctures, or a forgetful-target sphere with none).
    pub fn validate(&self) -> Result<()> {
        if self.genus > 1 {
            return Err(Error::InvalidSignature {
                reason: format!("genus {} not supported; only 0 and 1", self.genus),
            });
        }
        if self.genus == 0 && self.boundaries.len() > 1 {
            return Err(Error::InvalidSignature {
                reason: "a planar signature has at most one boundary".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for label in self.punctures.iter().chain(&self.boundaries) {
            check_label(label)?;
            if !seen.insert(label.as_str()) {
                return Err(Error::LabelCollision { label: label.clone() });
            }
        }
        Ok(())
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.punctures.iter().any(|l| l == label) || self.boundaries.iter().any(|l| l == label)
    }

    pub fn has_puncture(&self, label: &str) -> bool {
        self.punctures.iter().any(|l| l == label)
    }
}

/// The three gluing moves that carry one stage of an exhaustion to the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GluingKind {
    #[serde(rename = "disk")]
    PuncturedDisk,
    #[serde(rename = "annulus")]
    PuncturedAnnulus,
    #[serde(rename = "pants")]
    PairOfPants,
}

impl GluingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GluingKind::PuncturedDisk => "disk",
            GluingKind::PuncturedAnnulus => "annulus",
            GluingKind::PairOfPants => "pants",
        }
    }
}

/// A single gluing onto a named boundary curve. Fresh labels are supplied
/// explicitly so that exhaustion files are reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingOp {
    pub kind: GluingKind,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_puncture: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub new_boundaries: Vec<String>,
}

impl GluingOp {
    pub fn disk(target: impl Into<String>, new_puncture: impl Into<String>) -> Self {
        GluingOp {
            kind: GluingKind::PuncturedDisk,
            target: target.into(),
            new_puncture: Some(new_puncture.into()),
            new_boundaries: Vec::new(),
        }
    }

    pub fn annulus(
        target: impl Into<String>,
        new_puncture: impl Into<String>,
        new_boundary: impl Into<String>,
    ) -> Self {
        GluingOp {
            kind: GluingKind::PuncturedAnnulus,
            target: target.into(),
            new_puncture: Some(new_puncture.into()),
            new_boundaries: vec![new_boundary.into()],
        }
    }

    pub fn pants(
        target: impl Into<String>,
        new_boundary_0: impl Into<String>,
        new_boundary_1: impl Into<String>,
    ) -> Self {
        GluingOp {
            kind: GluingKind::PairOfPants,
            target: target.into(),
            new_puncture: None,
            new_boundaries: vec![new_boundary_0.into(), new_boundary_1.into()],
        }
    }

    /// Fresh labels introduced by this op, in declaration order.
    pub fn fresh_labels(&self) -> impl Iterator<Item = &String> {
        self.new_puncture.iter().chain(&self.new_boundaries)
    }

    fn check_arity(&self) -> Result<()> {
        let (want_puncture, want_boundaries) = match self.kind {
            GluingKind::PuncturedDisk => (true, 0),
            GluingKind::PuncturedAnnulus => (true, 1),
            GluingKind::PairOfPants => (false, 2),
        };
        if self.new_puncture.is_some() != want_puncture {
            return Err(Error::InvalidOp {
                reason: format!(
                    "{} gluing {} a new puncture",
                    self.kind.as_str(),
                    if want_puncture { "requires" } else { "does not take" }
                ),
            });
        }
        if self.new_boundaries.len() != want_boundaries {
            return Err(Error::InvalidOp {
                reason: format!(
                    "{} gluing introduces exactly {} new boundaries, got {}",
                    self.kind.as_str(),
                    want_boundaries,
                    self.new_boundaries.len()
                ),
            });
        }
        Ok(())
    }
}

/// Apply one gluing move to a signature.
///
/// A punctured disk caps the target boundary and adds one puncture; a
/// punctured annulus renames the boundary and adds one puncture; a pair of
/// pants replaces the boundary by two fresh ones. Genus never changes.
pub fn apply_gluing(sig: &SurfaceSig, op: &GluingOp) -> Result<SurfaceSig> {
    op.check_arity()?;
    let Some(pos) = sig.boundaries.iter().position(|b| b == &op.target) else {
        return Err(Error::UnknownBoundary { label: op.target.clone() });
    };
    let mut fresh = BTreeSet::new();
    for label in op.fresh_labels() {
        check_label(label)?;
        if sig.has_label(label) || !fresh.insert(label.as_str()) {
            return Err(Error::LabelCollision { label: label.clone() });
        }
    }

    let mut out = sig.clone();
    match op.kind {
        GluingKind::PuncturedDisk => {
            out.boundaries.remove(pos);
            out.punctures.push(op.new_puncture.clone().expect("arity checked"));
        }
        GluingKind::PuncturedAnnulus => {
            out.boundaries[pos] = op.new_boundaries[0].clone();
            out.punctures.push(op.new_puncture.clone().expect("arity checked"));
        }
        GluingKind::PairOfPants => {
            out.boundaries.splice(pos..=pos, op.new_boundaries.iter().cloned());
        }
    }
    out.validate()?;
    Ok(out)
}

/// An exhaustion: a base signature and an ordered list of gluing moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub base: SurfaceSig,
    pub ops: Vec<GluingOp>,
}

impl Exhaustion {
    pub fn depth(&self) -> usize {
        self.ops.len()
    }
}

/// Fold the gluing moves over the base, returning every stage signature.
///
/// Fails on the first invalid op, annotated with its stage index. An empty
/// op list yields just the base.
pub fn validate_exhaustion(exh: &Exhaustion) -> Result<Vec<SurfaceSig>> {
    exh.base.validate().map_err(|e| e.at_stage(0))?;
    let mut stages = Vec::with_capacity(exh.ops.len() + 1);
    stages.push(exh.base.clone());
    for (i, op) in exh.ops.iter().enumerate() {
        let next = apply_gluing(stages.last().expect("nonempty"), op).map_err(|e| e.at_stage(i))?;
        stages.push(next);
    }
    Ok(stages)
}

/// The standard flute exhaustion: a disk with punctures `a`, `b`, extended
/// `depth` times by a punctured annulus. The puncture added at stage `k` is
/// labeled `k`; the boundary after stage `k` is labeled `∂k`.
pub fn flute_exhaustion(depth: usize) -> Exhaustion {
    let base = SurfaceSig {
        genus: 0,
        punctures: vec!["a".into(), "b".into()],
        boundaries: vec!["∂0".into()],
    };
    let ops = (1..=depth)
        .map(|k| GluingOp::annulus(format!("∂{}", k - 1), k.to_string(), format!("∂{k}")))
        .collect();
    Exhaustion { base, ops }
}

/// A simple closed curve on a planar stage, recorded by the finite set of
/// punctures it encloses (the side away from the boundary).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarCurve {
    pub enclosed: BTreeSet<String>,
}

impl PlanarCurve {
    pub fn enclosing(labels: impl IntoIterator<Item = impl Into<String>>) -> Self {
        PlanarCurve {
            enclosed: labels.into_iter().map(Into::into).collect(),
        }
    }
}

/// Homology class of the Dehn twist about a planar curve: the sum of the
/// pair twists over all puncture pairs inside the curve.
///
/// A curve enclosing fewer than two punctures bounds a disk or a
/// once-punctured disk, so its twist is trivial and the class is zero. In
/// particular the boundary-parallel curve of a stage maps to the sum over
/// all pairs, the full twist written without inverses.
pub fn curve_twist_class(curve: &PlanarCurve, stage: &SurfaceSig) -> Result<HomologyClass> {
    if stage.genus != 0 {
        return Err(Error::WrongGenus { expected: 0, found: stage.genus });
    }
    if stage.boundaries.len() != 1 {
        return Err(Error::Unsupported {
            reason: "pair-twist classes live on a disk with punctures (one boundary)".into(),
        });
    }
    for label in &curve.enclosed {
        if !stage.has_puncture(label) {
            return Err(Error::UnknownPuncture { label: label.clone() });
        }
    }
    let mut class = HomologyClass::zero();
    for (p, q) in curve.enclosed.iter().tuple_combinations() {
        class.add_term(Symbol::pair(p, q), 1)?;
    }
    Ok(class)
}

//! First homology of pure mapping class groups of finite-type stages, and
//! the transition maps along gluings.
//!
//! For a genus-one stage with boundary curves `b_1 < … < b_m` the homology is
//! free of rank `m` on the twist `τ` about a nonseparating curve together
//! with the boundary twists `∂_{b_1}, …, ∂_{b_{m-1}}`; the last boundary
//! twist is redundant through the relation `12τ = ∂_{b_1} + … + ∂_{b_m}`.
//! A closed genus-one stage has homology `Z/12` on `τ`. A planar stage (disk
//! with punctures) has free homology on the twists about curves enclosing
//! each pair of punctures.
//!
//! All twists about nonseparating curves are identified in homology, so the
//! abelianized star relation `(T_{c_1}T_{c_2}T_{c_3}T_b)^3 = T_{d_1}T_{d_2}T_{d_3}`
//! always reads `12τ = Σ d_i` with trivial `d_i` dropped. Star
//! configurations record only which boundary curves each `d_i` encloses;
//! punctures in the complementary pieces are suppressed because the homology
//! class of a separating twist does not depend on them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::surface::{apply_gluing, GluingKind, GluingOp, SurfaceSig};
use crate::{Error, Result};

pub(crate) fn cadd(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::ArithmeticOverflow)
}

pub(crate) fn cmul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::ArithmeticOverflow)
}

/// A twist symbol: the generator alphabet for stage homology.
///
/// `Separating` names the twist about a separating curve by the set of
/// boundary labels it encloses; it appears only in relations and derivation
/// logs, never in a presentation basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Twist about a nonseparating curve (genus one). All such twists are
    /// homologous.
    Tau,
    /// Twist about the named boundary curve.
    Boundary(String),
    /// Twist about a curve enclosing exactly the two named punctures.
    Pair(String, String),
    /// Twist about a separating curve enclosing the named boundary curves.
    Separating(Vec<String>),
}

impl Symbol {
    pub fn boundary(label: impl Into<String>) -> Symbol {
        Symbol::Boundary(label.into())
    }

    /// Pair symbol with the two labels in lexicographic order.
    pub fn pair(a: impl Into<String>, b: impl Into<String>) -> Symbol {
        let (a, b) = (a.into(), b.into());
        assert_ne!(a, b, "pair symbol needs two distinct punctures");
        if a < b {
            Symbol::Pair(a, b)
        } else {
            Symbol::Pair(b, a)
        }
    }

    pub fn separating(labels: impl IntoIterator<Item = impl Into<String>>) -> Symbol {
        let labels: Vec<String> = labels.into_iter().map(Into::into).sorted().dedup().collect();
        assert!(!labels.is_empty(), "separating symbol needs at least one label");
        Symbol::Separating(labels)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Tau => write!(f, "tau"),
            Symbol::Boundary(b) => write!(f, "bd:{b}"),
            Symbol::Pair(a, b) => write!(f, "pair:{a}:{b}"),
            Symbol::Separating(ls) => write!(f, "sep:{}", ls.join(":")),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Symbol> {
        if s == "tau" {
            return Ok(Symbol::Tau);
        }
        if let Some(label) = s.strip_prefix("bd:") {
            if label.is_empty() {
                return Err(Error::Parse(format!("empty boundary label in `{s}`")));
            }
            return Ok(Symbol::Boundary(label.to_string()));
        }
        if let Some(rest) = s.strip_prefix("pair:") {
            let mut it = rest.splitn(2, ':');
            let (a, b) = (it.next().unwrap_or(""), it.next().unwrap_or(""));
            if a.is_empty() || b.is_empty() || a == b {
                return Err(Error::Parse(format!("bad pair symbol `{s}`")));
            }
            return Ok(Symbol::pair(a, b));
        }
        if let Some(rest) = s.strip_prefix("sep:") {
            let labels: Vec<&str> = rest.split(':').collect();
            if labels.iter().any(|l| l.is_empty()) {
                return Err(Error::Parse(format!("bad separating symbol `{s}`")));
            }
            return Ok(Symbol::separating(labels));
        }
        Err(Error::Parse(format!("unknown symbol `{s}`")))
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Symbol, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Serde helpers for `BTreeMap<Symbol, i64>` with decimal-string values, the
/// wire form used by every report so consumers avoid fixed-width surprises.
pub mod int_map_serde {
    use super::*;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<Symbol, i64>,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        // keys sorted as strings, matching every other report map
        let sorted = to_string_map(map);
        let mut out = serializer.serialize_map(Some(sorted.len()))?;
        for (key, value) in &sorted {
            out.serialize_entry(key, value)?;
        }
        out.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<BTreeMap<Symbol, i64>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(deserializer)?;
        let mut map = BTreeMap::new();
        for (key, value) in raw {
            let sym: Symbol = key.parse().map_err(D::Error::custom)?;
            let value: i64 = value
                .parse()
                .map_err(|e| D::Error::custom(format!("coefficient `{value}`: {e}")))?;
            map.insert(sym, value);
        }
        Ok(map)
    }

    /// The wire form as an owned map, for hand-assembled reports.
    pub fn to_string_map(map: &BTreeMap<Symbol, i64>) -> BTreeMap<String, String> {
        map.iter().map(|(sym, v)| (sym.to_string(), v.to_string())).collect()
    }
}

/// Serde helpers for a single `i64` carried as a decimal string.
pub mod int_str_serde {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &i64,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<i64, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse()
            .map_err(|e| D::Error::custom(format!("integer `{raw}`: {e}")))
    }
}

/// A sparse integer vector over twist symbols. Zero coefficients are never
/// stored; arithmetic is overflow-checked.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologyClass {
    coeffs: BTreeMap<Symbol, i64>,
}

impl HomologyClass {
    pub fn zero() -> HomologyClass {
        HomologyClass::default()
    }

    pub fn generator(sym: Symbol) -> HomologyClass {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(sym, 1);
        HomologyClass { coeffs }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Symbol, i64)>) -> Result<HomologyClass> {
        let mut class = HomologyClass::zero();
        for (sym, c) in terms {
            class.add_term(sym, c)?;
        }
        Ok(class)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, sym: &Symbol) -> i64 {
        self.coeffs.get(sym).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, sym: Symbol, c: i64) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let next = cadd(self.coeff(&sym), c)?;
        if next == 0 {
            self.coeffs.remove(&sym);
        } else {
            self.coeffs.insert(sym, next);
        }
        Ok(())
    }

    pub fn add(&self, other: &HomologyClass) -> Result<HomologyClass> {
        let mut out = self.clone();
        for (sym, c) in &other.coeffs {
            out.add_term(sym.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HomologyClass) -> Result<HomologyClass> {
        self.add(&other.scale(-1)?)
    }

    pub fn scale(&self, k: i64) -> Result<HomologyClass> {
        if k == 0 {
            return Ok(HomologyClass::zero());
        }
        let mut out = HomologyClass::zero();
        for (sym, c) in &self.coeffs {
            out.add_term(sym.clone(), cmul(*c, k)?)?;
        }
        Ok(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, i64)> {
        self.coeffs.iter().map(|(s, c)| (s, *c))
    }

    pub fn support(&self) -> impl Iterator<Item = &Symbol> {
        self.coeffs.keys()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl Serialize for HomologyClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        int_map_serde::serialize(&self.coeffs, serializer)
    }
}

impl<'de> Deserialize<'de> for HomologyClass {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<HomologyClass, D::Error> {
        let coeffs = int_map_serde::deserialize(deserializer)?;
        Ok(HomologyClass {
            coeffs: coeffs.into_iter().filter(|(_, c)| *c != 0).collect(),
        })
    }
}

/// An equation `lhs = rhs` between twist classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub lhs: HomologyClass,
    pub rhs: HomologyClass,
}

impl Relation {
    /// `lhs - rhs`, the class that the relation declares to vanish.
    pub fn residual(&self) -> Result<HomologyClass> {
        self.lhs.sub(&self.rhs)
    }
}

/// First homology of the pure mapping class group of one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1Presentation {
    genus: u8,
    basis: Vec<Symbol>,
    /// Genus one with boundary: the redundant boundary twist (lexicographically
    /// last label), expressible as `12τ` minus the basis boundary twists.
    omitted: Option<Symbol>,
    /// Genus one without boundary: `τ` has order 12.
    tau_torsion_12: bool,
    /// Vanishing classes over the extended symbol set.
    relations: Vec<HomologyClass>,
}

impl H1Presentation {
    pub fn genus(&self) -> u8 {
        self.genus
    }

    pub fn basis(&self) -> &[Symbol] {
        &self.basis
    }

    pub fn omitted(&self) -> Option<&Symbol> {
        self.omitted.as_ref()
    }

    pub fn has_tau_torsion(&self) -> bool {
        self.tau_torsion_12
    }

    pub fn relations(&self) -> &[HomologyClass] {
        &self.relations
    }

    /// Rank of the free part.
    pub fn free_rank(&self) -> usize {
        if self.tau_torsion_12 {
            0
        } else {
            self.basis.len()
        }
    }

    pub fn in_basis(&self, sym: &Symbol) -> bool {
        self.basis.contains(sym)
    }

    pub fn check_over_basis(&self, class: &HomologyClass) -> Result<()> {
        for sym in class.support() {
            if !self.in_basis(sym) {
                return Err(Error::BasisMismatch { symbol: sym.to_string() });
            }
        }
        Ok(())
    }

    /// Rewrite a class into the basis: the omitted boundary twist is
    /// eliminated through `12τ = Σ ∂_i`, and on a closed genus-one stage the
    /// `τ` coordinate is normalized mod 12.
    pub fn reduce(&self, class: &HomologyClass) -> Result<HomologyClass> {
        let mut out = class.clone();
        if let Some(omitted) = &self.omitted {
            let c = out.coeff(omitted);
            if c != 0 {
                out.add_term(omitted.clone(), -c)?;
                out.add_term(Symbol::Tau, cmul(12, c)?)?;
                for sym in &self.basis {
                    if matches!(sym, Symbol::Boundary(_)) {
                        out.add_term(sym.clone(), -c)?;
                    }
                }
            }
        }
        if self.tau_torsion_12 {
            let c = out.coeff(&Symbol::Tau);
            let r = c.rem_euclid(12);
            out.add_term(Symbol::Tau, cadd(r, -c)?)?;
        }
        self.check_over_basis(&out)?;
        Ok(out)
    }

    /// Whether the class reduces to zero in this presentation.
    pub fn is_zero_class(&self, class: &HomologyClass) -> Result<bool> {
        Ok(self.reduce(class)?.is_zero())
    }
}

/// Build the stage homology presentation for a signature.
///
/// Genus one with `m > 0` boundaries: free on `τ` and the first `m-1`
/// boundary twists in label order, with the relation `12τ = Σ ∂_i` kept
/// explicitly over all `m` boundary symbols. Genus one closed: `Z/12` on
/// `τ`. Planar with one boundary: free on the pair twists. Planar spheres
/// and multi-boundary planar surfaces are not supported.
pub fn h1_presentation(sig: &SurfaceSig) -> Result<H1Presentation> {
    sig.validate()?;
    match sig.genus {
        1 => {
            let sorted: Vec<&String> = sig.boundaries.iter().sorted().collect();
            if sorted.is_empty() {
                return Ok(H1Presentation {
                    genus: 1,
                    basis: vec![Symbol::Tau],
                    omitted: None,
                    tau_torsion_12: true,
                    relations: vec![HomologyClass::from_terms([(Symbol::Tau, 12)])?],
                });
            }
            let mut basis = vec![Symbol::Tau];
            basis.extend(sorted[..sorted.len() - 1].iter().map(|b| Symbol::boundary(*b)));
            let omitted = Symbol::boundary(*sorted.last().expect("nonempty"));
            let mut relation = HomologyClass::from_terms([(Symbol::Tau, 12)])?;
            for b in &sorted {
                relation.add_term(Symbol::boundary(*b), -1)?;
            }
            Ok(H1Presentation {
                genus: 1,
                basis,
                omitted: Some(omitted),
                tau_torsion_12: false,
                relations: vec![relation],
            })
        }
        0 => {
            if sig.boundaries.len() != 1 {
                return Err(Error::Unsupported {
                    reason: "planar homology is computed for a disk with punctures (one boundary)"
                        .into(),
                });
            }
            let basis = sig
                .punctures
                .iter()
                .sorted()
                .tuple_combinations()
                .map(|(a, b)| Symbol::pair(a, b))
                .collect();
            Ok(H1Presentation {
                genus: 0,
                basis,
                omitted: None,
                tau_torsion_12: false,
                relations: Vec::new(),
            })
        }
        g => Err(Error::WrongGenus { expected: 1, found: g }),
    }
}

/// One `d`-entry of a star configuration: trivial (the curve bounds a disk
/// or once-punctured disk), a boundary-parallel curve, or a separating curve
/// named by the boundaries it encloses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarEntry {
    Trivial,
    Boundary(String),
    Separating(Vec<String>),
}

impl StarEntry {
    /// The twist symbol this entry contributes, if any.
    pub fn symbol(&self) -> Option<Symbol> {
        match self {
            StarEntry::Trivial => None,
            StarEntry::Boundary(b) => Some(Symbol::boundary(b.clone())),
            StarEntry::Separating(ls) => Some(Symbol::separating(ls.clone())),
        }
    }

    /// The entry enclosing a given set of boundary labels.
    pub fn enclosing(labels: &[String]) -> StarEntry {
        match labels {
            [] => StarEntry::Trivial,
            [one] => StarEntry::Boundary(one.clone()),
            many => StarEntry::Separating(many.iter().cloned().sorted().collect()),
        }
    }
}

impl fmt::Display for StarEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarEntry::Trivial => write!(f, "trivial"),
            StarEntry::Boundary(b) => write!(f, "bd:{b}"),
            StarEntry::Separating(ls) => write!(f, "sep:{}", ls.join(":")),
        }
    }
}

impl FromStr for StarEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<StarEntry> {
        if s == "trivial" {
            return Ok(StarEntry::Trivial);
        }
        match s.parse::<Symbol>()? {
            Symbol::Boundary(b) => Ok(StarEntry::Boundary(b)),
            Symbol::Separating(ls) => Ok(StarEntry::Separating(ls)),
            other => Err(Error::Parse(format!("`{other}` cannot be a star boundary entry"))),
        }
    }
}

impl Serialize for StarEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StarEntry {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<StarEntry, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// A star relation configuration on a genus-one subsurface: interior curves
/// `c1, c2, c3, b` (all nonseparating, hence `τ` in homology) and the three
/// boundary curves `d1, d2, d3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarConfig {
    pub c1: String,
    pub c2: String,
    pub c3: String,
    pub b: String,
    pub d: [StarEntry; 3],
}

impl StarConfig {
    pub fn new(d: [StarEntry; 3]) -> StarConfig {
        StarConfig {
            c1: "c1".into(),
            c2: "c2".into(),
            c3: "c3".into(),
            b: "b".into(),
            d,
        }
    }
}

/// Abelianize a star relation: `(T_{c1}T_{c2}T_{c3}T_b)^3 = T_{d1}T_{d2}T_{d3}`
/// becomes `3(c1+c2+c3+b) = Σ d_i`, and with every interior curve identified
/// to `τ` the left side is `12τ`. Trivial entries drop out of the right side,
/// giving the degenerate forms down to `12τ = 0`.
pub fn star_relation_abelianized(cfg: &StarConfig) -> Relation {
    let lhs = HomologyClass::from_terms([(Symbol::Tau, 12)]).expect("small coefficients");
    let mut rhs = HomologyClass::zero();
    for entry in &cfg.d {
        if let Some(sym) = entry.symbol() {
            rhs.add_term(sym, 1).expect("small coefficients");
        }
    }
    Relation { lhs, rhs }
}

/// One step of a boundary-sum derivation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivationStep {
    /// The opening star; its abelianized equation seeds the accumulator.
    Open { star: StarConfig },
    /// Split one separating twist into a boundary twist plus a remainder by
    /// subtracting two stars that share their other entry.
    Split {
        subject: Symbol,
        parts: Vec<Symbol>,
        degenerate: StarConfig,
        full: StarConfig,
    },
}

/// The boundary-sum relation together with the star derivation that proves it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySumDerivation {
    pub relation: Relation,
    pub steps: Vec<DerivationStep>,
}

/// Derive `12τ = Σ ∂_i` over all boundary curves of a genus-one stage.
///
/// The derivation opens with the star whose entries are the first boundary,
/// the curve enclosing all remaining boundaries, and a trivial entry; each
/// later step peels one boundary off the enclosing curve. The log has one
/// step for `m ≤ 2` and `m - 1` steps otherwise, and replays to the returned
/// relation via [`replay_derivation`].
pub fn boundary_sum_relation(sig: &SurfaceSig) -> Result<BoundarySumDerivation> {
    if sig.genus != 1 {
        return Err(Error::WrongGenus { expected: 1, found: sig.genus });
    }
    sig.validate()?;
    let bs: Vec<String> = sig.boundaries.iter().cloned().sorted().collect();
    let m = bs.len();

    let mut rhs = HomologyClass::zero();
    for b in &bs {
        rhs.add_term(Symbol::boundary(b.clone()), 1)?;
    }
    let relation = Relation {
        lhs: HomologyClass::from_terms([(Symbol::Tau, 12)])?,
        rhs,
    };

    let mut steps = Vec::new();
    match m {
        0 => steps.push(DerivationStep::Open {
            star: StarConfig::new([StarEntry::Trivial, StarEntry::Trivial, StarEntry::Trivial]),
        }),
        1 => steps.push(DerivationStep::Open {
            star: StarConfig::new([
                StarEntry::Boundary(bs[0].clone()),
                StarEntry::Trivial,
                StarEntry::Trivial,
            ]),
        }),
        _ => {
            steps.push(DerivationStep::Open {
                star: StarConfig::new([
                    StarEntry::Boundary(bs[0].clone()),
                    StarEntry::enclosing(&bs[1..]),
                    StarEntry::Trivial,
                ]),
            });
            for k in 1..m - 1 {
                let alpha = StarEntry::enclosing(&bs[..k]);
                let subject = StarEntry::enclosing(&bs[k..]).symbol().expect("len >= 2");
                let rest = StarEntry::enclosing(&bs[k + 1..]);
                let parts = vec![
                    Symbol::boundary(bs[k].clone()),
                    rest.symbol().expect("len >= 1"),
                ];
                steps.push(DerivationStep::Split {
                    subject,
                    parts,
                    degenerate: StarConfig::new([
                        alpha.clone(),
                        StarEntry::enclosing(&bs[k..]),
                        StarEntry::Trivial,
                    ]),
                    full: StarConfig::new([alpha, StarEntry::Boundary(bs[k].clone()), rest]),
                });
            }
        }
    }
    Ok(BoundarySumDerivation { relation, steps })
}

/// Fold a derivation log back into a relation, checking each step.
///
/// `Open` seeds the accumulator with its star's abelianized equation. For a
/// `Split`, the two stars must agree once the subject (resp. the parts) are
/// removed from their right sides; the subject is then substituted by the
/// parts inside the accumulator.
pub fn replay_derivation(steps: &[DerivationStep]) -> Result<Relation> {
    let mut acc: Option<Relation> = None;
    for (i, step) in steps.iter().enumerate() {
        match step {
            DerivationStep::Open { star } => {
                if acc.is_some() {
                    return Err(Error::RelationViolation {
                        detail: format!("step {i}: a derivation opens with exactly one star"),
                    });
                }
                acc = Some(star_relation_abelianized(star));
            }
            DerivationStep::Split { subject, parts, degenerate, full } => {
                let Some(current) = acc.as_mut() else {
                    return Err(Error::RelationViolation {
                        detail: format!("step {i}: split before any opening star"),
                    });
                };
                let eq_deg = star_relation_abelianized(degenerate);
                let eq_full = star_relation_abelianized(full);
                if eq_deg.rhs.coeff(subject) != 1 {
                    return Err(Error::RelationViolation {
                        detail: format!("step {i}: degenerate star does not mention {subject}"),
                    });
                }
                let mut parts_sum = HomologyClass::zero();
                for p in parts {
                    parts_sum.add_term(p.clone(), 1)?;
                }
                let shared_deg = eq_deg.rhs.sub(&HomologyClass::generator(subject.clone()))?;
                let shared_full = eq_full.rhs.sub(&parts_sum)?;
                if shared_deg != shared_full {
                    return Err(Error::RelationViolation {
                        detail: format!("step {i}: the two stars disagree off the subject"),
                    });
                }
                let c = current.rhs.coeff(subject);
                if c == 0 {
                    return Err(Error::RelationViolation {
                        detail: format!("step {i}: subject {subject} absent from the accumulator"),
                    });
                }
                current.rhs = current
                    .rhs
                    .sub(&HomologyClass::generator(subject.clone()).scale(c)?)?
                    .add(&parts_sum.scale(c)?)?;
            }
        }
    }
    acc.ok_or(Error::RelationViolation { detail: "empty derivation".into() })
}

/// The homology map induced by one gluing, given by substitution rules on
/// the extended generating set of the source stage: `τ` and every boundary
/// twist for genus one, every pair twist for a planar stage.
#[derive(Debug, Clone)]
pub struct TransitionMap {
    source: H1Presentation,
    target: H1Presentation,
    rules: BTreeMap<Symbol, HomologyClass>,
}

impl TransitionMap {
    pub fn source(&self) -> &H1Presentation {
        &self.source
    }

    pub fn target(&self) -> &H1Presentation {
        &self.target
    }

    pub fn rules(&self) -> &BTreeMap<Symbol, HomologyClass> {
        &self.rules
    }

    pub fn rule(&self, sym: &Symbol) -> Option<&HomologyClass> {
        self.rules.get(sym)
    }
}

/// Build the transition map for one gluing on a stage.
///
/// Genus one: a punctured disk kills the capped boundary twist, a punctured
/// annulus carries it to the renamed boundary, a pair of pants splits it
/// into the sum of the two new boundary twists; `τ` and the untouched
/// boundary twists map to themselves. Images are re-expressed in the target
/// basis, through `12τ = Σ ∂_i` when they land on the omitted symbol.
/// Planar stages admit punctured-annulus gluings, under which every pair
/// twist maps to itself.
pub fn transition_map(sig_n: &SurfaceSig, op: &GluingOp) -> Result<TransitionMap> {
    if sig_n.genus == 0 && op.kind != GluingKind::PuncturedAnnulus {
        return Err(Error::Unsupported {
            reason: "planar transitions support punctured-annulus gluings only".into(),
        });
    }
    let target_sig = apply_gluing(sig_n, op)?;
    let source = h1_presentation(sig_n)?;
    let target = h1_presentation(&target_sig)?;
    let mut rules = BTreeMap::new();

    match sig_n.genus {
        1 => {
            rules.insert(Symbol::Tau, target.reduce(&HomologyClass::generator(Symbol::Tau))?);
            for b in &sig_n.boundaries {
                let raw = if *b == op.target {
                    match op.kind {
                        GluingKind::PuncturedDisk => HomologyClass::zero(),
                        GluingKind::PuncturedAnnulus => {
                            HomologyClass::generator(Symbol::boundary(op.new_boundaries[0].clone()))
                        }
                        GluingKind::PairOfPants => HomologyClass::from_terms([
                            (Symbol::boundary(op.new_boundaries[0].clone()), 1),
                            (Symbol::boundary(op.new_boundaries[1].clone()), 1),
                        ])?,
                    }
                } else {
                    HomologyClass::generator(Symbol::boundary(b.clone()))
                };
                rules.insert(Symbol::boundary(b.clone()), target.reduce(&raw)?);
            }
        }
        _ => {
            for sym in source.basis() {
                rules.insert(sym.clone(), HomologyClass::generator(sym.clone()));
            }
        }
    }

    Ok(TransitionMap { source, target, rules })
}

/// Push a class forward along a transition map by linear extension.
pub fn push_forward(class: &HomologyClass, tmap: &TransitionMap) -> Result<HomologyClass> {
    let mut out = HomologyClass::zero();
    for (sym, c) in class.iter() {
        let rule = tmap
            .rule(sym)
            .ok_or_else(|| Error::BasisMismatch { symbol: sym.to_string() })?;
        out = out.add(&rule.scale(c)?)?;
    }
    tmap.target().reduce(&out)
}

//! Integer cochains on exhaustion stages and the `phi` family on the flute.
//!
//! A [`HomSpec`] stores one integer assignment per stage, each over that
//! stage's homology basis. A consistent family of stage assignments is the
//! data of a homomorphism from the compactly supported pure mapping class
//! group to the integers; it extends to the full group exactly when, in
//! addition, its support is anchored at a fixed compact stage. Both checks
//! are explicit here: [`check_consistency`] replays every transition map,
//! and [`escaping_support`] finds the anchor stage or exhibits an escaping
//! family of nonzero twists.
//!
//! The flute family `phi_A` assigns, at every stage, `+1` to the pair twist
//! joining `a` to a numbered puncture outside `A`, `-1` to the one joining
//! `b` to it, and `0` everywhere else. Its value on any twist about a curve
//! enclosing both or neither of `a, b` telescopes to zero, which is what
//! makes the truncated evaluation of infinite twist products stabilize.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::homology::{
    h1_presentation, int_map_serde, push_forward, transition_map, HomologyClass, Symbol,
};
use crate::surface::{
    curve_twist_class, validate_exhaustion, Exhaustion, GluingKind, PlanarCurve, SurfaceSig,
};
use crate::{Error, Result};

/// How a set of positive integers is described.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsetMode {
    /// The set is exactly the listed members (finite, so the complement is
    /// automatically infinite).
    #[serde(rename = "listed_in_A")]
    ListedInA,
    /// The set is everything except the listed members. Rejected by
    /// [`make_phi`]: the complement would be finite.
    #[serde(rename = "listed_out_of_A")]
    ListedOutOfA,
}

/// A finitely described subset `A` of the positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSpec {
    pub mode: SubsetMode,
    pub members: BTreeSet<u64>,
}

impl SubsetSpec {
    pub fn listed(members: impl IntoIterator<Item = u64>) -> SubsetSpec {
        SubsetSpec {
            mode: SubsetMode::ListedInA,
            members: members.into_iter().collect(),
        }
    }

    pub fn empty() -> SubsetSpec {
        SubsetSpec::listed([])
    }
}

/// The assignment of one stage: integer values on the stage basis.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StageAssignment {
    #[serde(with = "int_map_serde")]
    pub assign: BTreeMap<Symbol, i64>,
}

/// An integer cochain on the stages of an exhaustion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSpec {
    /// Tag naming the exhaustion this cochain lives on (a file reference in
    /// serialized form).
    #[serde(rename = "exhaustion")]
    pub domain: String,
    pub stages: Vec<StageAssignment>,
}

impl HomSpec {
    pub fn new(domain: impl Into<String>, stages: Vec<StageAssignment>) -> HomSpec {
        HomSpec { domain: domain.into(), stages }
    }

    /// Index of the deepest stage carrying an assignment.
    pub fn deepest_stage(&self) -> Option<usize> {
        self.stages.len().checked_sub(1)
    }

    pub fn stage(&self, n: usize) -> Result<&StageAssignment> {
        self.stages.get(n).ok_or(Error::Unsupported {
            reason: format!("cochain has no stage {n} (defined to {:?})", self.deepest_stage()),
        })
    }
}

fn numeric_label(label: &str) -> Option<u64> {
    label.parse::<u64>().ok().filter(|v| *v >= 1)
}

/// Validate that an exhaustion is a flute: a disk with punctures `a`, `b`,
/// grown only by punctured annuli whose punctures are positive integers.
fn flute_stages(exh: &Exhaustion) -> Result<Vec<SurfaceSig>> {
    let stages = validate_exhaustion(exh)?;
    let base = &stages[0];
    if base.genus != 0 || base.boundaries.len() != 1 || base.punctures != ["a", "b"] {
        return Err(Error::WrongExhaustion {
            reason: "base stage must be a disk with punctures `a` and `b`".into(),
        });
    }
    for (i, op) in exh.ops.iter().enumerate() {
        if op.kind != GluingKind::PuncturedAnnulus {
            return Err(Error::WrongExhaustion {
                reason: format!("op {i} is not a punctured annulus"),
            });
        }
        let label = op.new_puncture.as_deref().unwrap_or("");
        if numeric_label(label).is_none() {
            return Err(Error::WrongExhaustion {
                reason: format!("op {i} adds puncture `{label}`, not a positive integer"),
            });
        }
    }
    Ok(stages)
}

fn phi_pair_value(a_set: &BTreeSet<u64>, p: &str, q: &str) -> i64 {
    let sign = |other: &str| -> Option<i64> {
        numeric_label(other).map(|i| if a_set.contains(&i) { 0 } else { 1 })
    };
    match (p, q) {
        ("a", "b") | ("b", "a") => 0,
        ("a", other) | (other, "a") => sign(other).unwrap_or(0),
        ("b", other) | (other, "b") => -sign(other).unwrap_or(0),
        _ => 0,
    }
}

/// Build the cochain `phi_A` on a flute exhaustion.
///
/// At every stage: the twist pairing `a` with a numbered puncture `i ∉ A`
/// maps to `+1`, the twist pairing `b` with it to `-1`, and everything else
/// (the `a`–`b` pair, pairs of numbered punctures, and pairs meeting `A`) to
/// zero. `A` must be given by its members, so that its complement is
/// infinite; the empty set recovers the canonical cochain.
pub fn make_phi(subset: &SubsetSpec, exh: &Exhaustion) -> Result<HomSpec> {
    if subset.mode == SubsetMode::ListedOutOfA {
        return Err(Error::InfiniteComplementViolation);
    }
    let stages = flute_stages(exh)?;
    let mut assignments = Vec::with_capacity(stages.len());
    for sig in &stages {
        let pres = h1_presentation(sig)?;
        let mut assign = BTreeMap::new();
        for sym in pres.basis() {
            let Symbol::Pair(p, q) = sym else {
                return Err(Error::WrongExhaustion {
                    reason: format!("unexpected basis symbol `{sym}` on a flute stage"),
                });
            };
            assign.insert(sym.clone(), phi_pair_value(&subset.members, p, q));
        }
        assignments.push(StageAssignment { assign });
    }
    Ok(HomSpec::new(format!("flute(depth={})", exh.depth()), assignments))
}

/// Evaluate a stage assignment on a class over the same stage basis.
pub fn eval_on_class(h: &HomSpec, class: &HomologyClass, stage: usize) -> Result<i64> {
    let assignment = h.stage(stage)?;
    let mut total: i64 = 0;
    for (sym, c) in class.iter() {
        let Some(value) = assignment.assign.get(sym) else {
            return Err(Error::BasisMismatch { symbol: sym.to_string() });
        };
        total = crate::homology::cadd(total, crate::homology::cmul(c, *value)?)?;
    }
    Ok(total)
}

/// One letter of a twist word: a curve with a nonzero exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistLetter {
    #[serde(flatten)]
    pub curve: PlanarCurve,
    #[serde(with = "crate::homology::int_str_serde")]
    pub exponent: i64,
}

/// A product of twists about planar curves, all read on one stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistWord {
    pub stage: usize,
    pub letters: Vec<TwistLetter>,
}

/// Evaluate a cochain on a twist word: the exponent-weighted sum of the
/// values on each twist's class.
pub fn eval_on_twist_word(h: &HomSpec, word: &TwistWord, stages: &[SurfaceSig]) -> Result<i64> {
    let sig = stages.get(word.stage).ok_or(Error::Unsupported {
        reason: format!("twist word stage {} beyond the exhaustion", word.stage),
    })?;
    let mut total: i64 = 0;
    for letter in &word.letters {
        if letter.exponent == 0 {
            return Err(Error::Parse("twist word exponents must be nonzero".into()));
        }
        let class = curve_twist_class(&letter.curve, sig)?;
        let value = eval_on_class(h, &class, word.stage)?;
        total = crate::homology::cadd(total, crate::homology::cmul(letter.exponent, value)?)?;
    }
    Ok(total)
}

/// Outcome of a consistency check across stage transitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConsistencyVerdict {
    Consistent,
    /// First violation found: the stage-`n` value of `symbol` differs from
    /// the stage-`n+1` value of its image.
    Violated {
        stage: usize,
        symbol: Symbol,
        #[serde(with = "crate::homology::int_str_serde")]
        source_value: i64,
        #[serde(with = "crate::homology::int_str_serde")]
        image_value: i64,
    },
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ConsistencyVerdict::Consistent)
    }
}

/// Check stage assignments against every transition map up to `depth`:
/// for each basis symbol `s` of stage `n`, the stage-`n+1` assignment
/// evaluated on the image of `s` must reproduce the stage-`n` value.
pub fn check_consistency(h: &HomSpec, exh: &Exhaustion, depth: usize) -> Result<ConsistencyVerdict> {
    let stages = validate_exhaustion(exh)?;
    if depth > exh.depth() {
        return Err(Error::Unsupported {
            reason: format!("depth {depth} exceeds the exhaustion depth {}", exh.depth()),
        });
    }
    h.stage(depth)?;
    for n in 0..depth {
        let tmap = transition_map(&stages[n], &exh.ops[n])?;
        for sym in tmap.source().basis() {
            let image = push_forward(&HomologyClass::generator(sym.clone()), &tmap)?;
            let image_value = eval_on_class(h, &image, n + 1)?;
            let Some(source_value) = h.stage(n)?.assign.get(sym).copied() else {
                return Err(Error::MissingAssignment { symbol: sym.to_string() });
            };
            if source_value != image_value {
                return Ok(ConsistencyVerdict::Violated {
                    stage: n,
                    symbol: sym.clone(),
                    source_value,
                    image_value,
                });
            }
        }
    }
    Ok(ConsistencyVerdict::Consistent)
}

/// Validate stage assignments structurally: every stage must assign exactly
/// its basis symbols, and a closed genus-one stage forces `τ ↦ 0`.
pub fn validate_assignments(h: &HomSpec, exh: &Exhaustion) -> Result<()> {
    let stages = validate_exhaustion(exh)?;
    for (n, assignment) in h.stages.iter().enumerate() {
        let Some(sig) = stages.get(n) else {
            return Err(Error::Unsupported {
                reason: format!("cochain stage {n} beyond the exhaustion depth {}", exh.depth()),
            });
        };
        let pres = h1_presentation(sig)?;
        for sym in assignment.assign.keys() {
            if !pres.in_basis(sym) {
                return Err(Error::BasisMismatch { symbol: sym.to_string() }.at_stage(n));
            }
        }
        for sym in pres.basis() {
            if !assignment.assign.contains_key(sym) {
                return Err(Error::MissingAssignment { symbol: sym.to_string() }.at_stage(n));
            }
        }
        if pres.has_tau_torsion() && assignment.assign.get(&Symbol::Tau).copied().unwrap_or(0) != 0
        {
            return Err(Error::RelationViolation {
                detail: format!("stage {n}: τ is 12-torsion, so any integer cochain kills it"),
            });
        }
    }
    Ok(())
}

/// A nonzero basis twist together with the first stage a puncture of it
/// appears at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportWitness {
    pub symbol: Symbol,
    pub anchor_stage: usize,
    #[serde(with = "crate::homology::int_str_serde")]
    pub value: i64,
}

/// Report of [`escaping_support`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportReport {
    /// Every nonzero basis twist touches a puncture of this stage, which is
    /// strictly inside the inspected horizon.
    SupportedAt { stage: usize },
    /// Support still grows at the horizon: nonzero twists anchored at the
    /// deepest inspected stage, listed by anchor.
    EscapingFamily { witnesses: Vec<SupportWitness> },
}

/// Find the minimal stage whose punctures meet every nonzero basis twist,
/// or report an escaping family when the inspected horizon does not certify
/// one.
///
/// A pair twist is anchored at the first stage containing either of its
/// punctures, and the candidate support stage is the maximal anchor `k` over
/// the nonzero twists of the deepest assignment. Only a prefix is
/// inspectable, so `k` counts as certified when it has already stayed
/// maximal for at least `k` further stages; a maximum still growing near the
/// horizon is reported as an escaping family instead, listed by anchor.
pub fn escaping_support(h: &HomSpec, exh: &Exhaustion, depth: usize) -> Result<SupportReport> {
    let stages = validate_exhaustion(exh)?;
    if depth > exh.depth() {
        return Err(Error::Unsupported {
            reason: format!("depth {depth} exceeds the exhaustion depth {}", exh.depth()),
        });
    }
    let mut first_stage: BTreeMap<&str, usize> = BTreeMap::new();
    for (n, sig) in stages.iter().enumerate().take(depth + 1) {
        for p in &sig.punctures {
            first_stage.entry(p).or_insert(n);
        }
    }
    let anchor_of = |sym: &Symbol| -> Result<usize> {
        let Symbol::Pair(p, q) = sym else {
            return Err(Error::Unsupported {
                reason: format!("support anchoring is defined for pair twists, got `{sym}`"),
            });
        };
        match (first_stage.get(p.as_str()), first_stage.get(q.as_str())) {
            (Some(sp), Some(sq)) => Ok(*sp.min(sq)),
            _ => Err(Error::UnknownPuncture { label: format!("{p} or {q}") }),
        }
    };

    // max anchor per inspected stage; nonzero support only grows along a
    // consistent family, so this sequence is the anchor-growth curve
    let mut max_anchor_at = Vec::with_capacity(depth + 1);
    for j in 0..=depth {
        let mut max_anchor = 0usize;
        for (sym, value) in &h.stage(j)?.assign {
            if *value != 0 {
                max_anchor = max_anchor.max(anchor_of(sym)?);
            }
        }
        max_anchor_at.push(max_anchor);
    }
    let k = max_anchor_at[depth];
    let attained = max_anchor_at.iter().position(|m| *m == k).unwrap_or(depth);
    if depth - attained >= k {
        return Ok(SupportReport::SupportedAt { stage: k });
    }

    let mut witnesses = Vec::new();
    for (sym, value) in &h.stage(depth)?.assign {
        if *value != 0 {
            witnesses.push(SupportWitness {
                symbol: sym.clone(),
                anchor_stage: anchor_of(sym)?,
                value: *value,
            });
        }
    }
    witnesses.sort_by(|a, b| (a.anchor_stage, &a.symbol).cmp(&(b.anchor_stage, &b.symbol)));
    Ok(SupportReport::EscapingFamily { witnesses })
}

/// Outcome of a truncated infinite-product evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductOutcome {
    /// All summands vanish from `stabilized_at` on; `value` is the total.
    Stabilized {
        #[serde(with = "crate::homology::int_str_serde")]
        value: i64,
        stabilized_at: usize,
    },
    /// The final summand of the prefix is still nonzero.
    NotStabilized,
}

/// Summands, partial sums, and stabilization verdict for a curve prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductEval {
    pub summands: Vec<i64>,
    pub partial_sums: Vec<i64>,
    pub outcome: ProductOutcome,
}

/// Evaluate a cochain on a prefix of an infinite product of twists, one
/// curve per entry with its stage index.
///
/// The product of the twists converges in the group only if the curves
/// leave every compact set. A finite prefix can never refute that — any
/// prefix extends to an escaping sequence — so no escape error is raised
/// here; the report instead states whether the partial sums have stabilized
/// within the prefix (final summand zero) or not.
pub fn eval_truncated_infinite_product(
    h: &HomSpec,
    curves: &[(PlanarCurve, usize)],
    exh: &Exhaustion,
) -> Result<ProductEval> {
    let stages = validate_exhaustion(exh)?;
    let mut summands = Vec::with_capacity(curves.len());
    let mut partial_sums = Vec::with_capacity(curves.len());
    let mut total: i64 = 0;
    for (curve, stage) in curves {
        let sig = stages.get(*stage).ok_or(Error::Unsupported {
            reason: format!("curve stage {stage} beyond the exhaustion"),
        })?;
        let class = curve_twist_class(curve, sig)?;
        let value = eval_on_class(h, &class, *stage)?;
        total = crate::homology::cadd(total, value)?;
        summands.push(value);
        partial_sums.push(total);
    }
    let outcome = match summands.last() {
        Some(last) if *last != 0 => ProductOutcome::NotStabilized,
        _ => ProductOutcome::Stabilized {
            value: total,
            stabilized_at: summands
                .iter()
                .rposition(|v| *v != 0)
                .map_or(0, |i| i + 1),
        },
    };
    Ok(ProductEval { summands, partial_sums, outcome })
}

/// Witness that a cochain sees a forgotten puncture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorWitness {
    pub symbol: Symbol,
    #[serde(with = "crate::homology::int_str_serde")]
    pub value: i64,
}

/// Result of [`factors_through_forgetful`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCheck {
    pub factors: bool,
    pub witness: Option<FactorWitness>,
}

/// Whether the cochain factors through forgetting every puncture outside
/// `kept`: true iff it vanishes on every basis pair twist involving a
/// forgotten puncture. On failure the witness is the first such twist with
/// a nonzero value, scanning stages in order and symbols lexicographically.
pub fn factors_through_forgetful(h: &HomSpec, kept: &BTreeSet<String>) -> FactorCheck {
    for assignment in &h.stages {
        for (sym, value) in &assignment.assign {
            if *value == 0 {
                continue;
            }
            let Symbol::Pair(p, q) = sym else { continue };
            if !kept.contains(p) || !kept.contains(q) {
                return FactorCheck {
                    factors: false,
                    witness: Some(FactorWitness { symbol: sym.clone(), value: *value }),
                };
            }
        }
    }
    FactorCheck { factors: true, witness: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::flute_exhaustion;

    fn phi_empty(depth: usize) -> (HomSpec, Exhaustion) {
        let exh = flute_exhaustion(depth);
        let h = make_phi(&SubsetSpec::empty(), &exh).unwrap();
        (h, exh)
    }

    fn value(h: &HomSpec, stage: usize, p: &str, q: &str) -> i64 {
        h.stages[stage].assign[&Symbol::pair(p, q)]
    }

    #[test]
    fn phi_stage_one_matches_construction() {
        let (h, _) = phi_empty(1);
        assert_eq!(value(&h, 1, "a", "b"), 0);
        assert_eq!(value(&h, 1, "a", "1"), 1);
        assert_eq!(value(&h, 1, "b", "1"), -1);
    }

    #[test]
    fn phi_new_symbols_each_stage() {
        let (h, _) = phi_empty(3);
        assert_eq!(value(&h, 3, "a", "3"), 1);
        assert_eq!(value(&h, 3, "b", "3"), -1);
        assert_eq!(value(&h, 3, "1", "3"), 0);
        assert_eq!(value(&h, 3, "2", "3"), 0);
    }

    #[test]
    fn phi_members_are_zeroed() {
        let exh = flute_exhaustion(2);
        let h = make_phi(&SubsetSpec::listed([2]), &exh).unwrap();
        assert_eq!(value(&h, 2, "a", "2"), 0);
        assert_eq!(value(&h, 2, "b", "2"), 0);
        assert_eq!(value(&h, 2, "a", "1"), 1);
        assert_eq!(value(&h, 2, "b", "1"), -1);
    }

    #[test]
    fn phi_rejects_cofinite_subsets_and_foreign_exhaustions() {
        let exh = flute_exhaustion(1);
        let spec = SubsetSpec { mode: SubsetMode::ListedOutOfA, members: BTreeSet::new() };
        assert_eq!(make_phi(&spec, &exh).unwrap_err(), Error::InfiniteComplementViolation);

        let genus_one = Exhaustion {
            base: SurfaceSig::new(1, Vec::<String>::new(), ["b0"]).unwrap(),
            ops: vec![],
        };
        assert!(matches!(
            make_phi(&SubsetSpec::empty(), &genus_one).unwrap_err(),
            Error::WrongExhaustion { .. }
        ));
    }

    #[test]
    fn eval_examples() {
        let (h, exh) = phi_empty(2);
        let stages = validate_exhaustion(&exh).unwrap();

        let e_a1 = HomologyClass::generator(Symbol::pair("a", "1"));
        assert_eq!(eval_on_class(&h, &e_a1, 1).unwrap(), 1);

        // curve around K0 and puncture 1: 0 + 1 - 1
        let c = curve_twist_class(&PlanarCurve::enclosing(["a", "b", "1"]), &stages[1]).unwrap();
        assert_eq!(eval_on_class(&h, &c, 1).unwrap(), 0);

        // curve disjoint from K0
        let c = curve_twist_class(&PlanarCurve::enclosing(["1", "2"]), &stages[2]).unwrap();
        assert_eq!(eval_on_class(&h, &c, 2).unwrap(), 0);

        let foreign = HomologyClass::generator(Symbol::pair("a", "9"));
        assert!(matches!(eval_on_class(&h, &foreign, 1), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn twist_word_evaluation() {
        let (h, exh) = phi_empty(3);
        let stages = validate_exhaustion(&exh).unwrap();
        let word = TwistWord {
            stage: 1,
            letters: vec![
                TwistLetter { curve: PlanarCurve::enclosing(["a", "1"]), exponent: 1 },
                TwistLetter { curve: PlanarCurve::enclosing(["b", "1"]), exponent: 1 },
            ],
        };
        assert_eq!(eval_on_twist_word(&h, &word, &stages).unwrap(), 0);

        let empty = TwistWord { stage: 0, letters: vec![] };
        assert_eq!(eval_on_twist_word(&h, &empty, &stages).unwrap(), 0);

        let doubled = TwistWord {
            stage: 3,
            letters: vec![TwistLetter { curve: PlanarCurve::enclosing(["a", "3"]), exponent: 2 }],
        };
        assert_eq!(eval_on_twist_word(&h, &doubled, &stages).unwrap(), 2);
    }

    #[test]
    fn phi_is_consistent() {
        let (h, exh) = phi_empty(6);
        assert!(check_consistency(&h, &exh, 6).unwrap().is_consistent());
        validate_assignments(&h, &exh).unwrap();
    }

    #[test]
    fn consistency_flags_first_violation() {
        let (mut h, exh) = phi_empty(2);
        let sym = Symbol::pair("a", "1");
        h.stages[2].assign.insert(sym.clone(), 2);
        let verdict = check_consistency(&h, &exh, 2).unwrap();
        assert_eq!(
            verdict,
            ConsistencyVerdict::Violated { stage: 1, symbol: sym, source_value: 1, image_value: 2 }
        );
    }

    #[test]
    fn zero_spec_is_consistent_and_supported() {
        let exh = flute_exhaustion(4);
        let stages = validate_exhaustion(&exh).unwrap();
        let assignments = stages
            .iter()
            .map(|sig| {
                let pres = h1_presentation(sig).unwrap();
                StageAssignment {
                    assign: pres.basis().iter().map(|s| (s.clone(), 0)).collect(),
                }
            })
            .collect();
        let zero = HomSpec::new("zero", assignments);
        assert!(check_consistency(&zero, &exh, 4).unwrap().is_consistent());
        assert_eq!(
            escaping_support(&zero, &exh, 4).unwrap(),
            SupportReport::SupportedAt { stage: 0 }
        );
    }

    #[test]
    fn phi_support_is_anchored_at_base() {
        let (h, exh) = phi_empty(8);
        assert_eq!(
            escaping_support(&h, &exh, 8).unwrap(),
            SupportReport::SupportedAt { stage: 0 }
        );
    }

    #[test]
    fn drifting_support_is_reported_escaping() {
        // nonzero values on e_{12}, e_{34}, e_{56}: anchors 1, 3, 5
        let exh = flute_exhaustion(6);
        let stages = validate_exhaustion(&exh).unwrap();
        let assignments: Vec<StageAssignment> = stages
            .iter()
            .map(|sig| {
                let pres = h1_presentation(sig).unwrap();
                let assign = pres
                    .basis()
                    .iter()
                    .map(|s| {
                        let v = match s {
                            Symbol::Pair(p, q)
                                if matches!(
                                    (p.as_str(), q.as_str()),
                                    ("1", "2") | ("3", "4") | ("5", "6")
                                ) =>
                            {
                                1
                            }
                            _ => 0,
                        };
                        (s.clone(), v)
                    })
                    .collect();
                StageAssignment { assign }
            })
            .collect();
        let h = HomSpec::new("drift", assignments);
        let report = escaping_support(&h, &exh, 6).unwrap();
        let SupportReport::EscapingFamily { witnesses } = report else {
            panic!("expected an escaping family");
        };
        let anchors: Vec<usize> = witnesses.iter().map(|w| w.anchor_stage).collect();
        assert_eq!(anchors, vec![1, 3, 5]);
        assert_eq!(witnesses[2].symbol, Symbol::pair("5", "6"));
    }

    #[test]
    fn product_of_outside_curves_stabilizes_at_zero() {
        let (h, exh) = phi_empty(10);
        let curves: Vec<(PlanarCurve, usize)> = (1..=8)
            .map(|n| {
                (PlanarCurve::enclosing([n.to_string(), (n + 1).to_string()]), (n + 1) as usize)
            })
            .collect();
        let eval = eval_truncated_infinite_product(&h, &curves, &exh).unwrap();
        assert_eq!(eval.outcome, ProductOutcome::Stabilized { value: 0, stabilized_at: 0 });
        assert!(eval.summands.iter().all(|v| *v == 0));
    }

    #[test]
    fn product_of_enclosing_curves_telescopes_to_zero() {
        let (h, exh) = phi_empty(10);
        let curves: Vec<(PlanarCurve, usize)> = (1..=9)
            .map(|n| {
                let mut labels = vec!["a".to_string(), "b".to_string()];
                labels.extend((1..=n).map(|k| k.to_string()));
                (PlanarCurve::enclosing(labels), n as usize)
            })
            .collect();
        let eval = eval_truncated_infinite_product(&h, &curves, &exh).unwrap();
        assert_eq!(eval.outcome, ProductOutcome::Stabilized { value: 0, stabilized_at: 0 });
    }

    #[test]
    fn product_of_anchored_curves_diverges() {
        let (h, exh) = phi_empty(10);
        let curves: Vec<(PlanarCurve, usize)> = (1..=10)
            .map(|n| (PlanarCurve::enclosing(["a".to_string(), n.to_string()]), n as usize))
            .collect();
        let eval = eval_truncated_infinite_product(&h, &curves, &exh).unwrap();
        assert_eq!(eval.outcome, ProductOutcome::NotStabilized);
        assert_eq!(eval.partial_sums, (1..=10).collect::<Vec<i64>>());
    }

    #[test]
    fn empty_product_is_stable() {
        let (h, exh) = phi_empty(1);
        let eval = eval_truncated_infinite_product(&h, &[], &exh).unwrap();
        assert_eq!(eval.outcome, ProductOutcome::Stabilized { value: 0, stabilized_at: 0 });
    }

    #[test]
    fn phi_never_factors_through_a_finite_stage() {
        let (h, _) = phi_empty(6);
        let kept: BTreeSet<String> =
            ["a", "b", "1", "2", "3"].iter().map(|s| s.to_string()).collect();
        let check = factors_through_forgetful(&h, &kept);
        assert!(!check.factors);
        let witness = check.witness.unwrap();
        assert_eq!(witness.symbol, Symbol::pair("a", "4"));
        assert_eq!(witness.value, 1);
    }

    #[test]
    fn zero_spec_factors_through_anything() {
        let exh = flute_exhaustion(3);
        let stages = validate_exhaustion(&exh).unwrap();
        let assignments = stages
            .iter()
            .map(|sig| {
                let pres = h1_presentation(sig).unwrap();
                StageAssignment {
                    assign: pres.basis().iter().map(|s| (s.clone(), 0)).collect(),
                }
            })
            .collect();
        let zero = HomSpec::new("zero", assignments);
        assert!(factors_through_forgetful(&zero, &BTreeSet::new()).factors);
    }

    #[test]
    fn hom_spec_json_round_trip() {
        let (h, _) = phi_empty(2);
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.starts_with(r#"{"exhaustion":"flute(depth=2)""#));
        assert_eq!(serde_json::from_str::<HomSpec>(&text).unwrap(), h);
    }
}

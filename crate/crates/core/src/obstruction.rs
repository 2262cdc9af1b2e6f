//! The genus-one obstruction trace: drive a candidate integer cochain along
//! an exhaustion until it contradicts itself or exhibits an escaping witness.
//!
//! On a genus-one stage the relation `12·f(τ) = Σ f(∂_i)` forces the value of
//! the one boundary twist left out of the basis, so any nonzero candidate is
//! nonzero on some boundary twist. Tracking that twist forward: a punctured
//! disk kills it (the candidate cannot extend — a contradiction), a punctured
//! annulus carries its value to the renamed boundary, and a pair of pants
//! splits the value across two children, at least one of which can be made
//! positive. Iterating yields boundary twists with positive values on later
//! and later stages — a sequence no integer-valued homomorphism can admit,
//! since the product of the twists converges while the value sum does not.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::homology::{cadd, cmul, h1_presentation, Symbol};
use crate::surface::{validate_exhaustion, Exhaustion, GluingKind, SurfaceSig};
use crate::{Error, Result};

/// Complete a basis assignment on a genus-one stage with boundary to all
/// boundary twists, solving `12·f(τ) = Σ f(∂_i)` for the omitted one.
///
/// The input must assign every basis symbol (`τ` and all but the last
/// boundary twist). It may also assign the omitted twist, in which case the
/// relation is checked instead of solved.
pub fn forced_values(
    partial: &BTreeMap<Symbol, i64>,
    sig: &SurfaceSig,
) -> Result<BTreeMap<Symbol, i64>> {
    if sig.genus != 1 {
        return Err(Error::WrongGenus { expected: 1, found: sig.genus });
    }
    let pres = h1_presentation(sig)?;
    let Some(omitted) = pres.omitted().cloned() else {
        return Err(Error::Unsupported {
            reason: "a closed genus-one stage has no boundary twist to force".into(),
        });
    };
    for sym in partial.keys() {
        if !pres.in_basis(sym) && *sym != omitted {
            return Err(Error::BasisMismatch { symbol: sym.to_string() });
        }
    }
    for sym in pres.basis() {
        if !partial.contains_key(sym) {
            return Err(Error::MissingAssignment { symbol: sym.to_string() });
        }
    }

    let tau = partial[&Symbol::Tau];
    let mut boundary_sum: i64 = 0;
    for sym in pres.basis() {
        if matches!(sym, Symbol::Boundary(_)) {
            boundary_sum = cadd(boundary_sum, partial[sym])?;
        }
    }
    let forced = cadd(cmul(12, tau)?, -boundary_sum)?;

    let mut completed = partial.clone();
    match completed.get(&omitted) {
        Some(given) if *given != forced => Err(Error::RelationViolation {
            detail: format!(
                "12·f(τ) = Σ f(∂_i) forces {omitted} ↦ {forced}, but {given} was given"
            ),
        }),
        _ => {
            completed.insert(omitted, forced);
            Ok(completed)
        }
    }
}

/// One stage of a trace: the boundary twist tracked after the stage's
/// gluing, its value, and the gluing kind applied at that stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub stage: usize,
    pub boundary: String,
    #[serde(with = "crate::homology::int_str_serde")]
    pub value: i64,
    pub op: GluingKind,
}

/// Terminal state of an obstruction trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceOutcome {
    /// The walk reached the requested depth; the steps are the witness
    /// sequence of positively valued boundary twists.
    EscapingWitness,
    /// A punctured disk capped the tracked boundary: the candidate value
    /// would have to vanish there, contradicting its positivity.
    CappedContradiction { stage: usize, boundary: String },
    /// The seed was identically zero; nothing to track.
    ZeroConsistent,
}

impl TraceOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceOutcome::EscapingWitness => "escaping",
            TraceOutcome::CappedContradiction { .. } => "capped",
            TraceOutcome::ZeroConsistent => "zero",
        }
    }
}

/// Full record of an obstruction walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionTrace {
    /// The completed seed after sign normalization, on the base stage.
    pub seed: BTreeMap<Symbol, i64>,
    /// Whether normalization negated the seed so the tracked value is
    /// positive.
    pub negated: bool,
    pub steps: Vec<TraceStep>,
    pub outcome: TraceOutcome,
    pub diagnostics: Vec<String>,
}

impl ObstructionTrace {
    /// The escaping witness, when the walk produced one.
    pub fn witness(&self) -> Option<&[TraceStep]> {
        matches!(self.outcome, TraceOutcome::EscapingWitness).then_some(self.steps.as_slice())
    }
}

fn zero_trace(seed: BTreeMap<Symbol, i64>) -> ObstructionTrace {
    ObstructionTrace {
        seed,
        negated: false,
        steps: Vec::new(),
        outcome: TraceOutcome::ZeroConsistent,
        diagnostics: Vec::new(),
    }
}

/// Walk a seed assignment on the base stage of a genus-one exhaustion
/// forward for `depth` gluings.
///
/// The zero seed returns `ZeroConsistent`. Otherwise some boundary twist has
/// a nonzero completed value; the lexicographically least such label is
/// tracked, after negating the whole assignment if needed to make its value
/// positive. Each gluing touching the tracked boundary either caps it
/// (`CappedContradiction`), renames it (value carried), or splits it in two
/// (the first-listed child inherits the full value under the minimal
/// extension, recorded as the step's boundary). Surviving to `depth` yields
/// an `EscapingWitness` with one step per stage, all values positive.
pub fn trace_obstruction(
    seed: &BTreeMap<Symbol, i64>,
    exh: &Exhaustion,
    depth: usize,
) -> Result<ObstructionTrace> {
    let stages = validate_exhaustion(exh)?;
    let base = &stages[0];
    if base.genus != 1 {
        return Err(Error::WrongGenus { expected: 1, found: base.genus });
    }
    if depth > exh.depth() {
        return Err(Error::Unsupported {
            reason: format!("depth {depth} exceeds the exhaustion depth {}", exh.depth()),
        });
    }

    if base.boundaries.is_empty() {
        // closed base: 12·f(τ) = 0 over the integers leaves only zero
        for (sym, value) in seed {
            if *sym != Symbol::Tau {
                return Err(Error::BasisMismatch { symbol: sym.to_string() });
            }
            if *value != 0 {
                return Err(Error::RelationViolation {
                    detail: "τ is 12-torsion on a closed stage, forcing f(τ) = 0".into(),
                });
            }
        }
        return Ok(zero_trace(seed.clone()));
    }

    let completed = forced_values(seed, base)?;
    if completed.values().all(|v| *v == 0) {
        return Ok(zero_trace(completed));
    }

    let (tracked_label, tracked_value) = completed
        .iter()
        .filter_map(|(sym, value)| match sym {
            Symbol::Boundary(label) if *value != 0 => Some((label.clone(), *value)),
            _ => None,
        })
        .next()
        .expect("a nonzero assignment is nonzero on some boundary twist");

    let negated = tracked_value < 0;
    let seed = if negated {
        let mut flipped = BTreeMap::new();
        for (sym, value) in &completed {
            flipped.insert(sym.clone(), cmul(-1, *value)?);
        }
        flipped
    } else {
        completed
    };
    let mut tracked = (tracked_label, tracked_value.abs());

    let mut steps = Vec::with_capacity(depth);
    let mut outcome = TraceOutcome::EscapingWitness;
    let mut last_touched = None;
    for (k, op) in exh.ops.iter().take(depth).enumerate() {
        let stage = k + 1;
        if op.target == tracked.0 {
            last_touched = Some(stage);
            match op.kind {
                GluingKind::PuncturedDisk => {
                    steps.push(TraceStep {
                        stage,
                        boundary: tracked.0.clone(),
                        value: tracked.1,
                        op: op.kind,
                    });
                    outcome =
                        TraceOutcome::CappedContradiction { stage, boundary: tracked.0.clone() };
                    break;
                }
                GluingKind::PuncturedAnnulus => {
                    tracked.0 = op.new_boundaries[0].clone();
                }
                GluingKind::PairOfPants => {
                    tracked.0 = op.new_boundaries[0].clone();
                }
            }
        }
        steps.push(TraceStep { stage, boundary: tracked.0.clone(), value: tracked.1, op: op.kind });
    }

    let mut diagnostics = Vec::new();
    if matches!(outcome, TraceOutcome::EscapingWitness) && depth > 0 && last_touched.is_none() {
        diagnostics.push(format!(
            "StalledBoundary: `{}` was never glued within {depth} stages; the witness cannot leave the base",
            tracked.0
        ));
    }

    Ok(ObstructionTrace { seed, negated, steps, outcome, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::GluingOp;

    fn sig(boundaries: &[&str]) -> SurfaceSig {
        SurfaceSig::new(1, Vec::<&str>::new(), boundaries.iter().copied()).unwrap()
    }

    fn assignment(entries: &[(&str, i64)]) -> BTreeMap<Symbol, i64> {
        entries
            .iter()
            .map(|(s, v)| (s.parse::<Symbol>().unwrap(), *v))
            .collect()
    }

    #[test]
    fn forced_values_solves_the_relation() {
        let completed =
            forced_values(&assignment(&[("tau", 1), ("bd:b1", 0)]), &sig(&["b1", "b2"])).unwrap();
        assert_eq!(completed[&Symbol::boundary("b2")], 12);

        let completed =
            forced_values(&assignment(&[("tau", 0), ("bd:b1", 0)]), &sig(&["b1", "b2"])).unwrap();
        assert_eq!(completed[&Symbol::boundary("b2")], 0);

        let completed = forced_values(
            &assignment(&[("tau", 1), ("bd:b1", 5), ("bd:b2", 7)]),
            &sig(&["b1", "b2", "b3"]),
        )
        .unwrap();
        assert_eq!(completed[&Symbol::boundary("b3")], 0);
    }

    #[test]
    fn forced_values_checks_overdetermined_seeds() {
        let ok = assignment(&[("tau", 1), ("bd:b1", 0), ("bd:b2", 12)]);
        assert!(forced_values(&ok, &sig(&["b1", "b2"])).is_ok());
        let bad = assignment(&[("tau", 1), ("bd:b1", 0), ("bd:b2", 3)]);
        assert!(matches!(
            forced_values(&bad, &sig(&["b1", "b2"])).unwrap_err(),
            Error::RelationViolation { .. }
        ));
    }

    #[test]
    fn forced_values_validates_domain() {
        assert!(matches!(
            forced_values(&assignment(&[("tau", 1)]), &sig(&["b1", "b2"])).unwrap_err(),
            Error::MissingAssignment { .. }
        ));
        assert!(matches!(
            forced_values(&assignment(&[("tau", 1), ("bd:zz", 0)]), &sig(&["b1"])).unwrap_err(),
            Error::BasisMismatch { .. }
        ));
        let planar = SurfaceSig::new(0, ["a"], ["∂0"]).unwrap();
        assert!(matches!(
            forced_values(&BTreeMap::new(), &planar).unwrap_err(),
            Error::WrongGenus { .. }
        ));
    }

    fn annulus_tower(depth: usize) -> Exhaustion {
        let ops = (1..=depth)
            .map(|k| GluingOp::annulus(format!("e{}", k - 1), format!("p{k}"), format!("e{k}")))
            .collect();
        Exhaustion { base: sig(&["e0"]), ops }
    }

    #[test]
    fn annulus_tower_gives_constant_witness() {
        let exh = annulus_tower(5);
        let trace = trace_obstruction(&assignment(&[("tau", 1)]), &exh, 5).unwrap();
        assert_eq!(trace.outcome, TraceOutcome::EscapingWitness);
        let witness = trace.witness().unwrap();
        assert_eq!(witness.len(), 5);
        for (i, step) in witness.iter().enumerate() {
            assert_eq!(step.value, 12);
            assert_eq!(step.stage, i + 1);
            assert_eq!(step.boundary, format!("e{}", i + 1));
        }
        assert!(trace.diagnostics.is_empty());
    }

    #[test]
    fn capping_the_tracked_boundary_contradicts() {
        let exh = Exhaustion { base: sig(&["e0"]), ops: vec![GluingOp::disk("e0", "p1")] };
        let trace = trace_obstruction(&assignment(&[("tau", 1)]), &exh, 1).unwrap();
        assert_eq!(
            trace.outcome,
            TraceOutcome::CappedContradiction { stage: 1, boundary: "e0".into() }
        );
        assert!(trace.witness().is_none());
    }

    #[test]
    fn zero_seed_is_consistent() {
        let exh = annulus_tower(3);
        let trace = trace_obstruction(&assignment(&[("tau", 0)]), &exh, 3).unwrap();
        assert_eq!(trace.outcome, TraceOutcome::ZeroConsistent);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn negative_seeds_are_sign_normalized() {
        let exh = annulus_tower(2);
        let trace = trace_obstruction(&assignment(&[("tau", -1)]), &exh, 2).unwrap();
        assert!(trace.negated);
        assert!(trace.witness().unwrap().iter().all(|s| s.value == 12));
        assert_eq!(trace.seed[&Symbol::Tau], 1);
    }

    #[test]
    fn pants_tracks_first_child_with_full_value() {
        let exh = Exhaustion {
            base: sig(&["e0"]),
            ops: vec![
                GluingOp::pants("e0", "e1", "f1"),
                GluingOp::annulus("e1", "p1", "e2"),
            ],
        };
        let trace = trace_obstruction(&assignment(&[("tau", 1)]), &exh, 2).unwrap();
        let witness = trace.witness().unwrap();
        assert_eq!(witness[0].boundary, "e1");
        assert_eq!(witness[0].op, GluingKind::PairOfPants);
        assert_eq!(witness[1].boundary, "e2");
        assert!(witness.iter().all(|s| s.value == 12));
    }

    #[test]
    fn lex_least_nonzero_boundary_is_tracked() {
        let exh = Exhaustion {
            base: sig(&["x", "y", "z"]),
            ops: vec![GluingOp::annulus("y", "p1", "y1")],
        };
        // basis is tau, ∂x, ∂y; forced ∂z = -(−3) ... = 3 with tau = 0
        let seed = assignment(&[("tau", 0), ("bd:x", 0), ("bd:y", -3)]);
        let trace = trace_obstruction(&seed, &exh, 1).unwrap();
        // tracked label: lex-least nonzero is `y` (value −3 → negated)
        assert!(trace.negated);
        let witness = trace.witness().unwrap();
        assert_eq!(witness[0].boundary, "y1");
        assert_eq!(witness[0].value, 3);
    }

    #[test]
    fn untouched_boundary_stalls_with_diagnostic() {
        let exh = Exhaustion {
            base: sig(&["e0", "other"]),
            ops: vec![GluingOp::annulus("other", "p1", "other1")],
        };
        let seed = assignment(&[("tau", 0), ("bd:e0", 4)]);
        let trace = trace_obstruction(&seed, &exh, 1).unwrap();
        assert_eq!(trace.outcome, TraceOutcome::EscapingWitness);
        assert_eq!(trace.steps[0].boundary, "e0");
        assert_eq!(trace.diagnostics.len(), 1);
        assert!(trace.diagnostics[0].contains("StalledBoundary"));
    }

    #[test]
    fn closed_base_accepts_only_zero() {
        let closed = Exhaustion { base: sig(&[]), ops: vec![] };
        let trace = trace_obstruction(&assignment(&[("tau", 0)]), &closed, 0).unwrap();
        assert_eq!(trace.outcome, TraceOutcome::ZeroConsistent);
        assert!(matches!(
            trace_obstruction(&assignment(&[("tau", 2)]), &closed, 0).unwrap_err(),
            Error::RelationViolation { .. }
        ));
    }
}

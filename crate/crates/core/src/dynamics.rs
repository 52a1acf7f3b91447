//! Permutation dynamics of a labelled tuple: which member approximates
//! worst at height t, how the descending order σ(t) evolves, and how many
//! distinct orderings recur.
//!
//! σ(t) is constant between jump points of the members' ψ functions, so a
//! trace only evaluates orderings at those events; there is no per-integer
//! scanning even when denominators have thousands of digits. Orderings are
//! proven strict by [`compare_error`]; a tie aborts the trace rather than
//! being broken arbitrarily, because everything downstream presupposes
//! strict inequalities.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::cf::{compare_error, CannotSeparate, ContinuedFraction, ErrorValue, StrictOrder};
use crate::psi::{PsiError, PsiFunction};

#[derive(Clone, Debug)]
pub enum DynError {
    /// Two members could not be strictly ordered at `t`: either they are
    /// commensurable or the refinement budget was too small.
    TieDetected {
        t: BigUint,
        left: String,
        right: String,
        detail: CannotSeparate,
    },
    EmptyWindow,
    DuplicateLabel(String),
    /// Tuples need at least two members.
    TupleTooSmall,
    InvalidWindow {
        t_min: BigUint,
        t_max: BigUint,
    },
    InvalidBurnIn,
    Psi(PsiError),
}

impl fmt::Display for DynError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynError::TieDetected {
                t,
                left,
                right,
                detail,
            } => {
                write!(f, "tie between '{left}' and '{right}' at t = {t}: {detail}")
            }
            DynError::EmptyWindow => write!(f, "no events in the requested window"),
            DynError::DuplicateLabel(l) => write!(f, "duplicate label '{l}'"),
            DynError::TupleTooSmall => write!(f, "tuple needs at least 2 members"),
            DynError::InvalidWindow { t_min, t_max } => {
                write!(f, "invalid window [{t_min}, {t_max}]")
            }
            DynError::InvalidBurnIn => write!(f, "burn-in fraction must satisfy 0 <= b < 1"),
            DynError::Psi(e) => write!(f, "{e}"),
        }
    }
}

impl From<PsiError> for DynError {
    fn from(e: PsiError) -> Self {
        DynError::Psi(e)
    }
}

/// An ordered tuple of labelled numbers with pairwise distinct labels.
#[derive(Clone, Debug)]
pub struct LabeledTuple {
    members: Vec<(String, ContinuedFraction)>,
}

impl LabeledTuple {
    pub fn new(members: Vec<(String, ContinuedFraction)>) -> Result<Self, DynError> {
        if members.len() < 2 {
            return Err(DynError::TupleTooSmall);
        }
        let mut seen = BTreeSet::new();
        for (label, _) in &members {
            if !seen.insert(label.clone()) {
                return Err(DynError::DuplicateLabel(label.clone()));
            }
        }
        Ok(LabeledTuple { members })
    }

    pub fn members(&self) -> &[(String, ContinuedFraction)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn psi_functions(&self) -> Result<Vec<(String, PsiFunction)>, DynError> {
        self.members
            .iter()
            .map(|(l, cf)| Ok((l.clone(), PsiFunction::new(cf.clone())?)))
            .collect()
    }
}

/// One maximal interval `[t_from, t_to)` of constant ordering. `t_to` of
/// the final event is open: the ordering persists at least to the window
/// end. Labels are sorted by strictly descending ψ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub t_from: BigUint,
    pub t_to: Option<BigUint>,
    pub sigma: Vec<String>,
}

/// The σ(t) history over a window; events tile `[t_min, t_max]` with no
/// gaps or overlaps, and consecutive events carry distinct orderings.
#[derive(Clone, Debug)]
pub struct PermutationTrace {
    pub t_min: BigUint,
    pub t_max: BigUint,
    pub events: Vec<TraceEvent>,
}

fn ordering_at(
    members: &mut [(String, PsiFunction)],
    t: &BigUint,
    max_depth: u64,
) -> Result<Vec<usize>, DynError> {
    // materialise the segment value for every member first, then sort
    // through the cached enclosures so refinement work persists
    let mut indices = Vec::with_capacity(members.len());
    for (_, f) in members.iter_mut() {
        let nu = f.eval_ref(t)?.index();
        indices.push(nu);
    }
    let values: Vec<&ErrorValue> = members
        .iter()
        .zip(&indices)
        .map(|((_, f), &nu)| f.cached(nu).expect("materialised above"))
        .collect();
    let mut order: Vec<usize> = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let mut pos = order.len();
        for (slot, &j) in order.iter().enumerate() {
            match compare_error(values[i], values[j], max_depth) {
                Ok(StrictOrder::Greater) => {
                    pos = slot;
                    break;
                }
                Ok(StrictOrder::Less) => {}
                Err(detail) => {
                    return Err(DynError::TieDetected {
                        t: t.clone(),
                        left: members[i].0.clone(),
                        right: members[j].0.clone(),
                        detail,
                    })
                }
            }
        }
        order.insert(pos, i);
    }
    Ok(order)
}

/// Trace the descending-ψ ordering over `[t_min, t_max]` for an already
/// constructed set of ψ functions (caches are reused across events).
pub fn sigma_trace_with(
    members: &mut [(String, PsiFunction)],
    t_min: &BigUint,
    t_max: &BigUint,
    max_depth: u64,
) -> Result<PermutationTrace, DynError> {
    if t_min >= t_max || t_min.is_zero() {
        return Err(DynError::InvalidWindow {
            t_min: t_min.clone(),
            t_max: t_max.clone(),
        });
    }
    for (_, f) in members.iter_mut() {
        f.ensure_covers(t_max)?;
        if t_min < f.q1() {
            return Err(PsiError::BelowFirstDenominator {
                t: t_min.clone(),
                q1: f.q1().clone(),
            }
            .into());
        }
    }
    let mut boundaries: BTreeSet<BigUint> = BTreeSet::new();
    for (_, f) in members.iter_mut() {
        boundaries.extend(f.jumps_in(t_min, t_max)?);
    }
    let mut starts = Vec::with_capacity(boundaries.len() + 1);
    starts.push(t_min.clone());
    starts.extend(boundaries);

    let mut events: Vec<TraceEvent> = Vec::new();
    for (i, start) in starts.iter().enumerate() {
        let order = ordering_at(members, start, max_depth)?;
        let sigma: Vec<String> = order.iter().map(|&m| members[m].0.clone()).collect();
        let t_to = starts.get(i + 1).cloned();
        match events.last_mut() {
            // a jump that did not change the ordering merges
            Some(last) if last.sigma == sigma => last.t_to = t_to,
            _ => events.push(TraceEvent {
                t_from: start.clone(),
                t_to,
                sigma,
            }),
        }
    }
    if let Some(last) = events.last_mut() {
        last.t_to = None;
    }
    Ok(PermutationTrace {
        t_min: t_min.clone(),
        t_max: t_max.clone(),
        events,
    })
}

/// Trace σ(t) for a tuple over `[t_min, t_max]`.
pub fn sigma_trace(
    tuple: &LabeledTuple,
    t_min: &BigUint,
    t_max: &BigUint,
    max_depth: u64,
) -> Result<PermutationTrace, DynError> {
    let mut members = tuple.psi_functions()?;
    sigma_trace_with(&mut members, t_min, t_max, max_depth)
}

/// Distinct orderings past the burn-in point, with occurrence counts.
#[derive(Clone, Debug)]
pub struct KIndexEstimate {
    pub burn_in_t: BigUint,
    pub counts: BTreeMap<Vec<String>, u64>,
}

impl KIndexEstimate {
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }
}

/// Count the distinct orderings among the events past the burn-in point:
/// the first `burn_in` fraction of the *event sequence* is dropped and the
/// orderings of the remaining events are tallied.
///
/// Events are exponentially spaced in t (they sit on convergent
/// denominators), so a cutoff in t-space would discard all but the last
/// couple of events; the burn-in therefore counts events. The reported
/// `burn_in_t` is where the kept suffix starts. This is a finite-window
/// heuristic for the recurrence notion "appears past every finite cutoff":
/// a finite trace can only bound that quantity, so the policy is explicit
/// and configurable.
pub fn k_index_estimate(
    trace: &PermutationTrace,
    burn_in: (u64, u64),
) -> Result<KIndexEstimate, DynError> {
    let (num, den) = burn_in;
    if den == 0 || num >= den {
        return Err(DynError::InvalidBurnIn);
    }
    if trace.events.is_empty() {
        return Err(DynError::EmptyWindow);
    }
    let cut = (trace.events.len() as u64 * num / den) as usize;
    let kept = &trace.events[cut.min(trace.events.len() - 1)..];
    let burn_in_t = kept.first().expect("nonempty suffix").t_from.clone();
    let mut counts: BTreeMap<Vec<String>, u64> = BTreeMap::new();
    for ev in kept {
        *counts.entry(ev.sigma.clone()).or_insert(0) += 1;
    }
    Ok(KIndexEstimate { burn_in_t, counts })
}

/// A maximal interval on which one member stays strictly above the other.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub t_from: BigUint,
    pub t_to: Option<BigUint>,
    pub upper: String,
}

/// Maximal intervals where `ψ_a > ψ_b` alternate with `ψ_a < ψ_b`; the
/// number of alternations is `len − 1`. Deepening the window never removes
/// an alternation, it can only append.
pub fn sign_changes(
    a: &ContinuedFraction,
    b: &ContinuedFraction,
    t_min: &BigUint,
    t_max: &BigUint,
    max_depth: u64,
) -> Result<Vec<Crossing>, DynError> {
    let tuple = LabeledTuple::new(alloc::vec![
        (String::from(a.label()), a.clone()),
        (String::from(b.label()), b.clone()),
    ])?;
    let trace = sigma_trace(&tuple, t_min, t_max, max_depth)?;
    Ok(trace
        .events
        .into_iter()
        .map(|ev| Crossing {
            t_from: ev.t_from,
            t_to: ev.t_to,
            upper: ev.sigma[0].clone(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoincidenceKind {
    /// ψ values proven identical (equal denominator pairs and provably
    /// equal tails), i.e. the pair is commensurable on this segment.
    ProvenEqual,
    /// The comparison exhausted its budget without separating; equality
    /// could not be proven from the stream descriptions.
    Unresolved,
}

/// First point of a window where the two ψ functions could not be strictly
/// ordered, with the strongest statement the scan could prove.
#[derive(Clone, Debug)]
pub struct Coincidence {
    pub t_from: BigUint,
    pub kind: CoincidenceKind,
    pub left_index: u64,
    pub right_index: u64,
}

/// Scan `[max(q_1), t_max]` for a failure of strict ordering between ψ_a
/// and ψ_b. `None` means strict order holds at every event in the window.
pub fn incommensurability_scan(
    a: &ContinuedFraction,
    b: &ContinuedFraction,
    t_max: &BigUint,
    max_depth: u64,
) -> Result<Option<Coincidence>, DynError> {
    let mut fa = PsiFunction::new(a.clone())?;
    let mut fb = PsiFunction::new(b.clone())?;
    fa.ensure_covers(t_max)?;
    fb.ensure_covers(t_max)?;
    let t_min = fa.q1().max(fb.q1()).clone();
    if &t_min > t_max {
        return Err(DynError::InvalidWindow {
            t_min,
            t_max: t_max.clone(),
        });
    }
    let mut boundaries: BTreeSet<BigUint> = BTreeSet::new();
    boundaries.extend(fa.jumps_in(&t_min, t_max)?);
    boundaries.extend(fb.jumps_in(&t_min, t_max)?);
    let mut starts = Vec::with_capacity(boundaries.len() + 1);
    starts.push(t_min);
    starts.extend(boundaries);

    for t in &starts {
        let (na, nb) = {
            let xa = fa.eval_ref(t)?;
            let na = xa.index();
            let xb = fb.eval_ref(t)?;
            (na, xb.index())
        };
        let xa = fa.cached(na).expect("materialised");
        let xb = fb.cached(nb).expect("materialised");
        if compare_error(xa, xb, max_depth).is_err() {
            let kind = if xa.provably_equal(xb) {
                CoincidenceKind::ProvenEqual
            } else {
                CoincidenceKind::Unresolved
            };
            return Ok(Some(Coincidence {
                t_from: t.clone(),
                kind,
                left_index: na,
                right_index: nb,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn quots(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn golden() -> ContinuedFraction {
        ContinuedFraction::periodic(0, vec![], quots(&[1]), "g").unwrap()
    }

    fn sqrt2m1() -> ContinuedFraction {
        ContinuedFraction::periodic(0, vec![], quots(&[2]), "s").unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn pair(a: ContinuedFraction, b: ContinuedFraction) -> LabeledTuple {
        LabeledTuple::new(vec![
            (a.label().to_string(), a.clone()),
            (b.label().to_string(), b.clone()),
        ])
        .unwrap()
    }

    #[test]
    fn tuple_construction_guards() {
        assert!(matches!(
            LabeledTuple::new(vec![("x".into(), golden())]),
            Err(DynError::TupleTooSmall)
        ));
        assert!(matches!(
            LabeledTuple::new(vec![("x".into(), golden()), ("x".into(), sqrt2m1())]),
            Err(DynError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn golden_vs_sqrt2_trace_flips() {
        // hand-checked event structure on [3, 29]: the ordering flips at
        // 5, 8, 12, 21 and 29 (13 is a golden jump that changes nothing)
        let trace = sigma_trace(&pair(golden(), sqrt2m1()), &big(3), &big(29), 64).unwrap();
        let froms: Vec<u64> = trace
            .events
            .iter()
            .map(|e| (&e.t_from).try_into().unwrap())
            .collect();
        assert_eq!(froms, vec![3, 5, 8, 12, 21, 29]);
        let uppers: Vec<&str> = trace.events.iter().map(|e| e.sigma[0].as_str()).collect();
        assert_eq!(uppers, vec!["s", "g", "s", "g", "s", "g"]);
        // events tile the window
        for w in trace.events.windows(2) {
            assert_eq!(w[0].t_to.as_ref(), Some(&w[1].t_from));
        }
        assert_eq!(trace.events.last().unwrap().t_to, None);
    }

    #[test]
    fn identical_members_tie() {
        let a = ContinuedFraction::periodic(0, vec![], quots(&[1]), "a").unwrap();
        let b = ContinuedFraction::periodic(0, vec![], quots(&[1]), "b").unwrap();
        let err = sigma_trace(&pair(a, b), &big(2), &big(30), 24).unwrap_err();
        assert!(matches!(err, DynError::TieDetected { .. }));
    }

    #[test]
    fn k_index_counts_orderings() {
        let trace = sigma_trace(&pair(golden(), sqrt2m1()), &big(3), &big(29), 64).unwrap();
        let est = k_index_estimate(&trace, (0, 2)).unwrap();
        assert_eq!(est.distinct(), 2);
        let est_late = k_index_estimate(&trace, (1, 2)).unwrap();
        assert!(est_late.distinct() >= 1);
        assert!(k_index_estimate(&trace, (2, 2)).is_err());
    }

    #[test]
    fn k_index_single_ordering() {
        // far enough apart that no flip happens in a short window
        let a = ContinuedFraction::periodic(0, vec![], quots(&[1]), "a").unwrap();
        let b = ContinuedFraction::periodic(0, quots(&[9, 9]), quots(&[9]), "b").unwrap();
        let trace = sigma_trace(&pair(a, b), &big(9), &big(15), 64).unwrap();
        let est = k_index_estimate(&trace, (0, 2)).unwrap();
        assert_eq!(est.distinct(), 1);
    }

    #[test]
    fn sign_changes_alternate() {
        // exact regression values from the scan: 13 alternations by 10^3,
        // 23 by 10^5, 28 by 10^6
        let crossings = sign_changes(&golden(), &sqrt2m1(), &big(3), &big(1000), 64).unwrap();
        assert_eq!(crossings.len() - 1, 13);
        for w in crossings.windows(2) {
            assert_ne!(w[0].upper, w[1].upper, "consecutive intervals alternate");
        }
        // deepening the window never reduces the count
        let deeper = sign_changes(&golden(), &sqrt2m1(), &big(3), &big(100_000), 64).unwrap();
        assert_eq!(deeper.len() - 1, 23);
        let deepest = sign_changes(&golden(), &sqrt2m1(), &big(3), &big(1_000_000), 64).unwrap();
        assert_eq!(deepest.len() - 1, 28);
    }

    #[test]
    fn perturbed_golden_alternates_below_the_perturbation() {
        // b agrees with golden up to a_3 and has a_4 = 2. The perturbed
        // quotient sits at alternating parity depth inside each tail, so
        // the sign of ψ_g − ψ_b flips at every shared breakpoint below the
        // perturbation, not only past it. Frozen from the exact scan.
        let b = ContinuedFraction::periodic(0, quots(&[1, 1, 1, 2]), quots(&[1]), "b").unwrap();
        let crossings = sign_changes(&golden(), &b, &big(1), &big(200), 64).unwrap();
        assert!(crossings.len() >= 2);
        let froms: Vec<u64> = crossings
            .iter()
            .take(3)
            .map(|c| (&c.t_from).try_into().unwrap())
            .collect();
        assert_eq!(froms, vec![1, 2, 3]);
    }

    #[test]
    fn commensurable_pair_detected() {
        // same quotient stream, different integer part: ψ coincide exactly
        let a = ContinuedFraction::periodic(0, vec![], quots(&[1, 2]), "a").unwrap();
        let b = ContinuedFraction::periodic(7, vec![], quots(&[1, 2]), "b").unwrap();
        let hit = incommensurability_scan(&a, &b, &big(500), 24)
            .unwrap()
            .unwrap();
        assert_eq!(hit.kind, CoincidenceKind::ProvenEqual);
        assert_eq!(hit.t_from, big(1));
    }

    #[test]
    fn incommensurable_pair_scans_clean() {
        assert!(
            incommensurability_scan(&golden(), &sqrt2m1(), &big(100_000), 64)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn shared_tail_different_head() {
        // [0;1,(3,1)] vs [0;2,(3,1)]: same tail, different first quotient
        let a = ContinuedFraction::periodic(0, quots(&[1]), quots(&[3, 1]), "a").unwrap();
        let b = ContinuedFraction::periodic(0, quots(&[2]), quots(&[3, 1]), "b").unwrap();
        let res = incommensurability_scan(&a, &b, &big(100_000), 64).unwrap();
        // recorded once computed: these two stay strictly ordered per event
        assert!(res.is_none());
    }
}

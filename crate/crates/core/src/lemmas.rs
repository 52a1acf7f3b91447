//! Machine checks of the continued-fraction lemmas at desk scale: the
//! continuant recurrence, the splitting identity for denominators, the
//! Perron tail identity, the reversed-tail equality lemma, an exhaustive
//! scanner for the main-lemma conditions on pairs of fractions, and the
//! empirical four-number check.
//!
//! The main lemma says: for indices ν, μ and a gap d ≥ 1, the four
//! conditions
//!
//! 1. `ξ_ν ≤ η_μ`
//! 2. `ξ_{ν+1} ≤ η_{μ+d−1}`
//! 3. `q_{ν+1} ≤ r_{μ+1}`
//! 4. `q_{ν+2} = r_{μ+d}`
//!
//! can only hold together when all three inequalities are equalities,
//! `d = 2`, and the reversed tails agree: `α*_{ν+2} = β*_{μ+2}`. The
//! scanner enumerates all index cells, decides (4) and (3) by exact big
//! integers, (1) and (2) exactly for rational inputs and by interval
//! refinement otherwise, and flags any conditions-held cell whose
//! conclusion fails as a violation. It has to distinguish `=` from `<`
//! rigorously because the conclusion turns non-strict inequalities into
//! equalities.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::cf::{
    compare_error, CannotSeparate, CfError, ContinuedFraction, ErrorValue, StrictOrder,
};
use crate::dynamics::{k_index_estimate, DynError, KIndexEstimate, LabeledTuple};
use crate::ratio::Rational;

#[derive(Clone, Debug)]
pub enum LemmaError {
    /// An inequality condition could not be decided within the refinement
    /// budget and equality could not be established from the streams.
    CannotDecide {
        nu: u64,
        mu: u64,
        d: u64,
        detail: CannotSeparate,
    },
    Cf(CfError),
    IndexOutOfRange {
        op: &'static str,
    },
}

impl fmt::Display for LemmaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LemmaError::CannotDecide { nu, mu, d, detail } => {
                write!(
                    f,
                    "cannot decide condition at (nu={nu}, mu={mu}, d={d}): {detail}"
                )
            }
            LemmaError::Cf(e) => write!(f, "{e}"),
            LemmaError::IndexOutOfRange { op } => write!(f, "{op}: index out of range"),
        }
    }
}

impl From<CfError> for LemmaError {
    fn from(e: CfError) -> Self {
        LemmaError::Cf(e)
    }
}

/// The continuant `⟨b_1, …, b_m⟩`: `⟨⟩ = 1`, `⟨b⟩ = b`,
/// `⟨b_1…b_m⟩ = b_m·⟨b_1…b_{m−1}⟩ + ⟨b_1…b_{m−2}⟩`.
pub fn continuant(b: &[BigUint]) -> BigUint {
    let mut prev = BigUint::zero();
    let mut cur = BigUint::one();
    for x in b {
        let next = x * &cur + &prev;
        prev = core::mem::replace(&mut cur, next);
    }
    cur
}

fn quotient_run(cf: &ContinuedFraction, from: u64, to: u64) -> Result<Vec<BigUint>, CfError> {
    // a_from ..= a_to, empty when to < from
    let mut v = Vec::new();
    let mut j = from;
    while j <= to {
        v.push(cf.quotient(j)?);
        j += 1;
    }
    Ok(v)
}

/// Check the splitting identity `r_{μ+d} = r_{μ+1}·b + r_μ·b_−` with
/// `b = ⟨a_{μ+2}, …, a_{μ+d}⟩` and `b_− = ⟨a_{μ+3}, …, a_{μ+d}⟩`, both
/// computed from the partial quotients. Requires `d ≥ 2`; at `d = 2` the
/// shortened continuant is the empty one and the identity reduces to the
/// denominator recurrence.
pub fn kont_identity_check(cf: &ContinuedFraction, mu: u64, d: u64) -> Result<bool, LemmaError> {
    if d < 2 {
        return Err(LemmaError::IndexOutOfRange {
            op: "kont_identity_check",
        });
    }
    let b = continuant(&quotient_run(cf, mu + 2, mu + d)?);
    let b_minus = continuant(&quotient_run(cf, mu + 3, mu + d)?);
    let (r_mu, r_mu1) = cf.denominator_pair(mu + 1)?;
    let (_, r_mud) = cf.denominator_pair(mu + d)?;
    Ok(r_mud == &r_mu1 * &b + &r_mu * &b_minus)
}

/// Tail enclosure `[lo, hi]` for `α_start` after consuming up to `depth`
/// quotients: the truncation and its last-quotient bump.
fn tail_enclosure(
    cf: &ContinuedFraction,
    start: u64,
    depth: u64,
) -> Result<(Rational, Rational), CfError> {
    let mut s_prev = BigUint::one();
    let mut w_prev = BigUint::zero();
    let mut s_cur = cf.quotient(start)?;
    let mut w_cur = BigUint::one();
    let mut consumed = 1;
    while consumed < depth {
        match cf.quotient(start + consumed) {
            Ok(a) => {
                let s = &a * &s_cur + &s_prev;
                let w = &a * &w_cur + &w_prev;
                s_prev = core::mem::replace(&mut s_cur, s);
                w_prev = core::mem::replace(&mut w_cur, w);
                consumed += 1;
            }
            Err(_) => break, // finite tail: enclosure stays valid
        }
    }
    let a = Rational::new(s_cur.clone(), w_cur.clone());
    let b = Rational::new(&s_cur + &s_prev, &w_cur + &w_prev);
    Ok(if a <= b { (a, b) } else { (b, a) })
}

const PERRON_REL_TOL_LOG2: u64 = 48;

/// Does `[lo, hi]` pin its value to relative width `2^-48`?
fn tight(lo: &Rational, hi: &Rational) -> bool {
    // (hi/lo - 1) <= 2^-48  ⟺  (hi·lo.den − lo·hi.den)·2^48 <= lo.num·hi.den
    let width_num = &hi.num * &lo.den - &lo.num * &hi.den;
    (width_num << PERRON_REL_TOL_LOG2) <= &lo.num * &hi.den
}

/// Verify the Perron identity
/// `β_{μ+2}·b_− = b + (−1)^d / (b_−·β_{μ+d+1} + b_−^−)`
/// by interval arithmetic at the given refinement depth. Both sides are
/// enclosed independently; `Ok(false)` means the enclosures exclude each
/// other (the identity failed), `Ok(true)` means they overlap and both pin
/// their value to relative width `2^-48`. Coarser overlapping enclosures
/// cannot confirm anything and error out.
pub fn perron_check(
    cf: &ContinuedFraction,
    mu: u64,
    d: u64,
    depth: u64,
) -> Result<bool, LemmaError> {
    if d < 2 || depth < 2 {
        return Err(LemmaError::IndexOutOfRange { op: "perron_check" });
    }
    let b = continuant(&quotient_run(cf, mu + 2, mu + d)?);
    let b_minus = continuant(&quotient_run(cf, mu + 3, mu + d)?);
    // for d = 2 the doubly shortened continuant underflows to 0, and the
    // identity degenerates to the tail recurrence β_{μ+2} = a_{μ+2} + 1/β_{μ+3}
    let b_mm = if d == 2 {
        BigUint::zero()
    } else {
        continuant(&quotient_run(cf, mu + 3, mu + d - 1)?)
    };

    // left side: β_{μ+2}·b_−
    let (tlo, thi) = tail_enclosure(cf, mu + 2, depth)?;
    let lhs_lo = Rational::new(&tlo.num * &b_minus, tlo.den.clone());
    let lhs_hi = Rational::new(&thi.num * &b_minus, thi.den.clone());

    // right side: endpoints of b ± 1/(b_−·x + b_−^−) over the enclosure of
    // x = β_{μ+d+1}; the map is monotone so endpoint images suffice
    let (ulo, uhi) = tail_enclosure(cf, mu + d + 1, depth)?;
    let image = |x: &Rational| -> Rational {
        let den = &b_minus * &x.num + &b_mm * &x.den; // (b_−·x + b_−^−)·x.den
        let base = &b * &den;
        let num = if d % 2 == 0 {
            base + &x.den
        } else {
            base - &x.den
        };
        Rational::new(num, den)
    };
    let c1 = image(&ulo);
    let c2 = image(&uhi);
    let (rhs_lo, rhs_hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };

    if lhs_hi < rhs_lo || rhs_hi < lhs_lo {
        return Ok(false);
    }
    if tight(&lhs_lo, &lhs_hi) && tight(&rhs_lo, &rhs_hi) {
        return Ok(true);
    }
    Err(LemmaError::CannotDecide {
        nu: 0,
        mu,
        d,
        detail: CannotSeparate {
            left: (lhs_lo, lhs_hi),
            right: (rhs_lo, rhs_hi),
            left_depth: depth,
            right_depth: depth,
        },
    })
}

/// Outcome of the reversed-tail equality lemma on a pair of indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailEqualityOutcome {
    /// Whether the hypotheses `q_{ν−1} = r_{μ−1}` and `q_ν = r_μ` held.
    pub applicable: bool,
    /// The conclusion `α*_ν = β*_μ`; vacuously true when not applicable.
    pub holds: bool,
}

/// If two numbers share a consecutive denominator pair, their reversed
/// tails agree exactly (uniqueness of the rational expansion).
pub fn check_reversed_tail_equality(
    a: &ContinuedFraction,
    b: &ContinuedFraction,
    nu: u64,
    mu: u64,
) -> Result<TailEqualityOutcome, LemmaError> {
    if nu == 0 || mu == 0 {
        return Err(LemmaError::IndexOutOfRange {
            op: "check_reversed_tail_equality",
        });
    }
    let (qa_prev, qa) = a.denominator_pair(nu)?;
    let (rb_prev, rb) = b.denominator_pair(mu)?;
    if qa_prev != rb_prev || qa != rb {
        return Ok(TailEqualityOutcome {
            applicable: false,
            holds: true,
        });
    }
    let holds = a.alpha_star(nu)? == b.alpha_star(mu)?;
    Ok(TailEqualityOutcome {
        applicable: true,
        holds,
    })
}

/// How a non-strict inequality condition held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CondRel {
    StrictlyLess,
    Equal,
}

/// An error value of one side: exact for finite expansions (evaluated
/// against the side's own rational value), enclosed otherwise.
enum XiVal {
    Exact(Rational),
    Enclosed(ErrorValue),
}

struct ScanSide {
    cf: ContinuedFraction,
    /// `q_0 .. q_top`
    dens: Vec<BigUint>,
    nums: Vec<BigInt>,
    xis: Vec<Option<XiVal>>,
    /// `(p, q)` of the full rational value, finite case only
    value: Option<(BigInt, BigUint)>,
}

impl ScanSide {
    fn new(cf: &ContinuedFraction, depth: u64) -> Result<Self, LemmaError> {
        let avail = cf.quotients_available().unwrap_or(depth).min(depth);
        let convs = cf.convergents(avail + 1)?;
        let dens: Vec<BigUint> = convs.iter().map(|c| c.q.clone()).collect();
        let nums: Vec<BigInt> = convs.iter().map(|c| c.p.clone()).collect();
        let value = if cf.is_rational() {
            let last = convs.last().expect("at least one convergent");
            Some((last.p.clone(), last.q.clone()))
        } else {
            None
        };
        Ok(ScanSide {
            cf: cf.clone(),
            dens,
            nums,
            xis: (0..=avail).map(|_| None).collect(),
            value,
        })
    }

    fn max_index(&self) -> u64 {
        (self.dens.len() - 1) as u64
    }

    fn materialise_xi(&mut self, nu: u64) -> Result<(), LemmaError> {
        let slot = nu as usize;
        if self.xis[slot].is_none() {
            let val = match &self.value {
                Some((p_full, q_full)) => {
                    // ξ_ν = |q_ν α − p_ν| = |q_ν p_L − p_ν q_L| / q_L exactly
                    let num = (BigInt::from(self.dens[slot].clone()) * p_full
                        - &self.nums[slot] * BigInt::from(q_full.clone()))
                    .abs()
                    .to_biguint()
                    .expect("absolute value");
                    XiVal::Exact(Rational::new(num, q_full.clone()))
                }
                None => XiVal::Enclosed(self.cf.xi(nu)?),
            };
            self.xis[slot] = Some(val);
        }
        Ok(())
    }
}

/// Order an exact rational against an enclosed value by refining the
/// enclosure. A rational never equals a value with an infinite tail, so
/// non-separation within the budget stays undecided rather than equal.
fn cmp_exact_enclosed(
    p: &Rational,
    q: &ErrorValue,
    max_depth: u64,
) -> Result<core::cmp::Ordering, CannotSeparate> {
    loop {
        let (lo, hi) = q.bounds();
        if *p < lo {
            return Ok(core::cmp::Ordering::Less);
        }
        if *p > hi {
            return Ok(core::cmp::Ordering::Greater);
        }
        if !q.try_refine_one(max_depth) {
            return Err(CannotSeparate {
                left: (p.clone(), p.clone()),
                right: (lo, hi),
                left_depth: 0,
                right_depth: q.depth(),
            });
        }
    }
}

/// Decide `ξ_ν(a) ≤ η_μ(b)` distinguishing strict from equal; `None`
/// means the condition fails (strictly greater).
fn cmp_le(
    a: &mut ScanSide,
    b: &mut ScanSide,
    nu: u64,
    mu: u64,
    d: u64,
    max_depth: u64,
) -> Result<Option<CondRel>, LemmaError> {
    a.materialise_xi(nu)?;
    b.materialise_xi(mu)?;
    let x = a.xis[nu as usize].as_ref().unwrap();
    let y = b.xis[mu as usize].as_ref().unwrap();
    let decided: Result<Option<CondRel>, CannotSeparate> = match (x, y) {
        (XiVal::Exact(p), XiVal::Exact(q)) => Ok(match p.cmp(q) {
            core::cmp::Ordering::Less => Some(CondRel::StrictlyLess),
            core::cmp::Ordering::Equal => Some(CondRel::Equal),
            core::cmp::Ordering::Greater => None,
        }),
        (XiVal::Enclosed(p), XiVal::Enclosed(q)) => match compare_error(p, q, max_depth) {
            Ok(StrictOrder::Less) => Ok(Some(CondRel::StrictlyLess)),
            Ok(StrictOrder::Greater) => Ok(None),
            Err(detail) => {
                if p.provably_equal(q) {
                    Ok(Some(CondRel::Equal))
                } else {
                    Err(detail)
                }
            }
        },
        (XiVal::Exact(p), XiVal::Enclosed(q)) => {
            cmp_exact_enclosed(p, q, max_depth).map(|o| match o {
                core::cmp::Ordering::Less => Some(CondRel::StrictlyLess),
                _ => None,
            })
        }
        (XiVal::Enclosed(p), XiVal::Exact(q)) => {
            cmp_exact_enclosed(q, p, max_depth).map(|o| match o {
                core::cmp::Ordering::Greater => Some(CondRel::StrictlyLess),
                _ => None,
            })
        }
    };
    decided.map_err(|detail| LemmaError::CannotDecide { nu, mu, d, detail })
}

/// One conditions-held cell of the main-lemma scan, with witness data.
#[derive(Clone, Debug)]
pub struct LemmaFinding {
    pub a_label: String,
    pub b_label: String,
    pub nu: u64,
    pub mu: u64,
    pub d: u64,
    /// How conditions (1), (2), (3) held.
    pub rel1: CondRel,
    pub rel2: CondRel,
    pub rel3: CondRel,
    /// Conclusion: `d = 2`, (1)–(3) equalities, `α*_{ν+2} = β*_{μ+2}`.
    pub conclusion_holds: bool,
    /// A conditions-held cell whose conclusion fails.
    pub violation: bool,
    /// Witness denominators and the proof-internal slack
    /// `x = r_{μ+1} − q_{ν+1}` (recorded for debugging, not asserted).
    pub q_nu1: BigUint,
    pub q_nu2: BigUint,
    pub r_mu1: BigUint,
    pub r_mud: BigUint,
    pub x_slack: BigUint,
}

/// Exhaustively scan all `(ν, μ, d)` with `ν+2 ≤ depth`, `μ+d ≤ depth`,
/// `1 ≤ d ≤ d_max`, recording every cell where conditions (1)–(4) all
/// hold together with whether the conclusion holds. Condition (4) is
/// matched first (exact denominator equality), so a cell's inequality
/// conditions are only evaluated when a denominator coincidence exists;
/// that keeps the scan cheap over tens of millions of pairs.
pub fn scan_main_lemma(
    a: &ContinuedFraction,
    b: &ContinuedFraction,
    depth: u64,
    d_max: u64,
    max_cmp_depth: u64,
) -> Result<Vec<LemmaFinding>, LemmaError> {
    scan_main_lemma_impl(a, b, depth, d_max, max_cmp_depth, false).map(|(findings, _)| findings)
}

/// Like [`scan_main_lemma`], but an undecidable condition skips its cell
/// (counted) instead of aborting the scan. A cell the data cannot decide
/// is not a cell where the conditions are established to hold, so skipping
/// is sound for a corpus of prefixes whose continuations are unknown.
pub fn scan_main_lemma_lenient(
    a: &ContinuedFraction,
    b: &ContinuedFraction,
    depth: u64,
    d_max: u64,
    max_cmp_depth: u64,
) -> Result<(Vec<LemmaFinding>, u64), LemmaError> {
    scan_main_lemma_impl(a, b, depth, d_max, max_cmp_depth, true)
}

fn scan_main_lemma_impl(
    a: &ContinuedFraction,
    b: &ContinuedFraction,
    depth: u64,
    d_max: u64,
    max_cmp_depth: u64,
    lenient: bool,
) -> Result<(Vec<LemmaFinding>, u64), LemmaError> {
    if depth < 4 || d_max < 1 {
        return Err(LemmaError::IndexOutOfRange {
            op: "scan_main_lemma",
        });
    }
    let mut sa = ScanSide::new(a, depth)?;
    let mut sb = ScanSide::new(b, depth)?;
    let mut out = Vec::new();
    let mut undecided = 0u64;
    if sa.max_index() < 2 {
        return Ok((out, undecided));
    }
    for nu in 0..=sa.max_index() - 2 {
        for m in 1..=sb.max_index() {
            // condition (4): q_{ν+2} = r_{μ+d}
            if sa.dens[(nu + 2) as usize] != sb.dens[m as usize] {
                continue;
            }
            for d in 1..=d_max.min(m) {
                let mu = m - d;
                // condition (3): q_{ν+1} ≤ r_{μ+1}
                let q_nu1 = sa.dens[(nu + 1) as usize].clone();
                let r_mu1 = sb.dens[(mu + 1) as usize].clone();
                let rel3 = match q_nu1.cmp(&r_mu1) {
                    core::cmp::Ordering::Less => CondRel::StrictlyLess,
                    core::cmp::Ordering::Equal => CondRel::Equal,
                    core::cmp::Ordering::Greater => continue,
                };
                // condition (1): ξ_ν ≤ η_μ
                let rel1 = match cmp_le(&mut sa, &mut sb, nu, mu, d, max_cmp_depth) {
                    Ok(Some(rel)) => rel,
                    Ok(None) => continue,
                    Err(e) if lenient && matches!(e, LemmaError::CannotDecide { .. }) => {
                        undecided += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                // condition (2): ξ_{ν+1} ≤ η_{μ+d−1}
                let rel2 = match cmp_le(&mut sa, &mut sb, nu + 1, mu + d - 1, d, max_cmp_depth) {
                    Ok(Some(rel)) => rel,
                    Ok(None) => continue,
                    Err(e) if lenient && matches!(e, LemmaError::CannotDecide { .. }) => {
                        undecided += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let all_equal =
                    rel1 == CondRel::Equal && rel2 == CondRel::Equal && rel3 == CondRel::Equal;
                let conclusion_holds =
                    d == 2 && all_equal && a.alpha_star(nu + 2)? == b.alpha_star(mu + 2)?;
                out.push(LemmaFinding {
                    a_label: a.label().into(),
                    b_label: b.label().into(),
                    nu,
                    mu,
                    d,
                    rel1,
                    rel2,
                    rel3,
                    conclusion_holds,
                    violation: !conclusion_holds,
                    q_nu2: sa.dens[(nu + 2) as usize].clone(),
                    r_mud: sb.dens[m as usize].clone(),
                    x_slack: &r_mu1 - &q_nu1,
                    q_nu1,
                    r_mu1,
                });
            }
        }
    }
    Ok((out, undecided))
}

/// A corpus entry for the exhaustive scan: a known prefix of an
/// irrational, with precomputed convergent denominators and the exclusive
/// interval endpoints of each error value. The true `ξ_ν` of any
/// continuation lies strictly between the truncation value
/// `xi_nums[ν]/q_full` and the bumped-truncation value
/// `xi_bump_nums[ν]/q_bump`, so interval decisions made from these tables
/// are valid for every irrational the prefix might continue into.
/// Machine integers suffice: `ξ_ν < 1` keeps numerators below the
/// denominators.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub quotients: Vec<u64>,
    /// `q_0 .. q_L`.
    pub dens: Vec<u64>,
    /// `|q_ν p_L − p_ν q_L|` against the plain truncation.
    pub xi_nums: Vec<u64>,
    pub q_full: u64,
    /// `|q_ν p'_L − p_ν q'_L|` against the last-quotient bump.
    pub xi_bump_nums: Vec<u64>,
    pub q_bump: u64,
}

impl CorpusEntry {
    pub fn build(quotients: &[u64]) -> CorpusEntry {
        let q = quotients.to_vec();
        let mut dens = Vec::with_capacity(q.len() + 1);
        let mut nums = Vec::with_capacity(q.len() + 1);
        let (mut d_prev, mut d_cur) = (0u64, 1u64); // q_{-1}, q_0
        let (mut n_prev, mut n_cur) = (1i128, 0i128); // p_{-1}, p_0 (a0 = 0)
        dens.push(d_cur);
        nums.push(n_cur);
        for &a in &q {
            let d_next = a * d_cur + d_prev;
            let n_next = a as i128 * n_cur + n_prev;
            d_prev = core::mem::replace(&mut d_cur, d_next);
            n_prev = core::mem::replace(&mut n_cur, n_next);
            dens.push(d_cur);
            nums.push(n_cur);
        }
        let q_full = *dens.last().unwrap();
        let p_full = *nums.last().unwrap();
        let q_bump = q_full + dens[dens.len() - 2];
        let p_bump = p_full + nums[nums.len() - 2];
        let xi_against = |qq: u64, pp: i128, qe: u64, pe: i128| {
            (qq as i128 * pe - pp * qe as i128).unsigned_abs() as u64
        };
        let xi_nums = dens
            .iter()
            .zip(&nums)
            .map(|(&qq, &pp)| xi_against(qq, pp, q_full, p_full))
            .collect();
        let xi_bump_nums = dens
            .iter()
            .zip(&nums)
            .map(|(&qq, &pp)| xi_against(qq, pp, q_bump, p_bump))
            .collect();
        CorpusEntry {
            quotients: q,
            dens,
            xi_nums,
            q_full,
            xi_bump_nums,
            q_bump,
        }
    }

    /// Largest index with data, `L`.
    pub fn top_index(&self) -> u64 {
        (self.dens.len() - 1) as u64
    }

    pub fn to_cf(&self, label: &str) -> Result<ContinuedFraction, CfError> {
        ContinuedFraction::prefix(
            0,
            self.quotients.iter().map(|&x| BigUint::from(x)).collect(),
            label,
        )
    }

    /// Exclusive enclosure endpoints of `ξ_ν` as fractions `(num, den)`,
    /// smaller endpoint first.
    fn xi_interval(&self, nu: usize) -> ((u128, u128), (u128, u128)) {
        let a = (self.xi_nums[nu] as u128, self.q_full as u128);
        let b = (self.xi_bump_nums[nu] as u128, self.q_bump as u128);
        if a.0 * b.1 <= b.0 * a.1 {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// All length-`len` quotient tuples over `{1, …, max_quotient}` as corpus
/// entries (raw prefixes: a trailing 1 is a legitimate prefix digit).
pub fn prefix_corpus(len: u32, max_quotient: u64) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    let mut current = vec![1u64; len as usize];
    loop {
        out.push(CorpusEntry::build(&current));
        // odometer increment
        let mut pos = len as usize;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if current[pos] < max_quotient {
                current[pos] += 1;
                for x in &mut current[pos + 1..] {
                    *x = 1;
                }
                break;
            }
        }
    }
}

/// A conditions-held cell from the machine-integer scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellOutcome {
    pub nu: u64,
    pub mu: u64,
    pub d: u64,
    /// Conditions (1)–(3) all held with equality.
    pub all_equalities: bool,
    pub conclusion_holds: bool,
}

/// Result of scanning one ordered pair of corpus entries.
#[derive(Clone, Debug, Default)]
pub struct PairScan {
    /// Conditions-held cells.
    pub cells: Vec<CellOutcome>,
    /// Cells where an inequality condition could not be decided from the
    /// prefixes and equality was not provable: conservatively skipped.
    pub undecided: u64,
}

/// How an interval comparison of a condition came out.
enum FastRel {
    Holds(CondRel),
    Fails,
    Undecided,
}

/// Decide `ξ_ν(a) ≤ η_μ(b)` from the exclusive prefix intervals. A
/// touching or disjoint pair of open intervals decides strictly; the same
/// stream at the same index is an exact equality; anything else depends on
/// the unknown continuations.
fn fast_le(a: &CorpusEntry, b: &CorpusEntry, nu: u64, mu: u64, same_stream: bool) -> FastRel {
    if same_stream && nu == mu {
        return FastRel::Holds(CondRel::Equal);
    }
    let (alo, ahi) = a.xi_interval(nu as usize);
    let (blo, bhi) = b.xi_interval(mu as usize);
    if ahi.0 * blo.1 < blo.0 * ahi.1 {
        return FastRel::Holds(CondRel::StrictlyLess);
    }
    if alo.0 * bhi.1 > bhi.0 * alo.1 {
        return FastRel::Fails;
    }
    FastRel::Undecided
}

/// Machine-integer twin of the lenient scanner for corpus entries: same
/// cells, same decisions, exact `u128` arithmetic throughout.
pub fn scan_pair_fast(a: &CorpusEntry, b: &CorpusEntry, d_max: u64) -> PairScan {
    let mut out = PairScan::default();
    if a.top_index() < 2 {
        return out;
    }
    let same_stream = a.quotients == b.quotients;
    for nu in 0..=a.top_index() - 2 {
        for m in 1..=b.top_index() {
            // condition (4)
            if a.dens[(nu + 2) as usize] != b.dens[m as usize] {
                continue;
            }
            for d in 1..=d_max.min(m) {
                let mu = m - d;
                // condition (3), exact scaffold data
                let q_nu1 = a.dens[(nu + 1) as usize];
                let r_mu1 = b.dens[(mu + 1) as usize];
                let rel3 = match q_nu1.cmp(&r_mu1) {
                    core::cmp::Ordering::Less => CondRel::StrictlyLess,
                    core::cmp::Ordering::Equal => CondRel::Equal,
                    core::cmp::Ordering::Greater => continue,
                };
                // condition (1)
                let rel1 = match fast_le(a, b, nu, mu, same_stream) {
                    FastRel::Holds(rel) => rel,
                    FastRel::Fails => continue,
                    FastRel::Undecided => {
                        out.undecided += 1;
                        continue;
                    }
                };
                // condition (2)
                let rel2 = match fast_le(a, b, nu + 1, mu + d - 1, same_stream) {
                    FastRel::Holds(rel) => rel,
                    FastRel::Fails => continue,
                    FastRel::Undecided => {
                        out.undecided += 1;
                        continue;
                    }
                };
                let all_equalities =
                    rel1 == CondRel::Equal && rel2 == CondRel::Equal && rel3 == CondRel::Equal;
                // α*_{ν+2} = β*_{μ+2} by exact cross multiplication
                let stars_agree = d == 2 && {
                    let l = a.dens[(nu + 1) as usize] as u128 * b.dens[(mu + 2) as usize] as u128;
                    let r = b.dens[(mu + 1) as usize] as u128 * a.dens[(nu + 2) as usize] as u128;
                    l == r
                };
                let conclusion_holds = d == 2 && all_equalities && stars_agree;
                out.cells.push(CellOutcome {
                    nu,
                    mu,
                    d,
                    all_equalities,
                    conclusion_holds,
                });
            }
        }
    }
    out
}

/// Tally of an exhaustive all-pairs corpus scan.
#[derive(Clone, Copy, Debug, Default)]
pub struct CorpusScanSummary {
    pub entries: u64,
    pub ordered_pairs: u64,
    /// Conditions-held cells found.
    pub findings: u64,
    /// Findings whose conclusion failed.
    pub violations: u64,
    /// Findings with `d = 2` and equalities throughout.
    pub concluded: u64,
    /// Cells skipped because the prefixes could not decide a condition.
    pub undecided: u64,
}

/// Scan every ordered pair of corpus entries (including each entry against
/// itself) and tally conditions-held cells, conclusions and violations.
pub fn scan_corpus(corpus: &[CorpusEntry], d_max: u64) -> CorpusScanSummary {
    let mut summary = CorpusScanSummary {
        entries: corpus.len() as u64,
        ..CorpusScanSummary::default()
    };
    for a in corpus {
        for b in corpus {
            summary.ordered_pairs += 1;
            let scan = scan_pair_fast(a, b, d_max);
            summary.undecided += scan.undecided;
            for cell in scan.cells {
                summary.findings += 1;
                if cell.conclusion_holds {
                    summary.concluded += 1;
                } else {
                    summary.violations += 1;
                }
            }
        }
    }
    summary
}

/// Report of the empirical four-number check.
#[derive(Clone, Debug)]
pub struct FourNumberReport {
    /// Pairs whose ψ-defining streams coincide, directly or through the
    /// head reflection — evidence that `α_i ± α_j ∈ ℤ`.
    pub precondition_violations: Vec<(String, String)>,
    /// Absent when a precondition violation makes the trace meaningless
    /// (coincident members tie instead of ordering strictly).
    pub estimate: Option<KIndexEstimate>,
    /// Fewer than 3 recurring orderings in the window. A finite window
    /// cannot disprove the bound, so this is a flag, not a failure.
    pub suspect: bool,
    pub t_min: BigUint,
    pub t_max: BigUint,
}

impl FourNumberReport {
    pub fn distinct(&self) -> usize {
        self.estimate
            .as_ref()
            .map(KIndexEstimate::distinct)
            .unwrap_or(0)
    }
}

/// The quotient stream of `m − α` rewrites the head of α's stream:
/// `[0;1,a2,…] ↦ [0;a2+1,…]` and `[0;a1,…] ↦ [0;1,a1−1,…]` for `a1 ≥ 2`.
fn reflected_stream(cf: &ContinuedFraction, probe: u64) -> Result<Vec<BigUint>, CfError> {
    let a1 = cf.quotient(1)?;
    let mut v = Vec::new();
    if a1.is_one() {
        v.push(cf.quotient(2)? + BigUint::one());
        for j in 3..=probe {
            v.push(cf.quotient(j)?);
        }
    } else {
        v.push(BigUint::one());
        v.push(a1 - BigUint::one());
        for j in 2..probe {
            v.push(cf.quotient(j)?);
        }
    }
    Ok(v)
}

/// Heuristic witness that `α ± β ∈ ℤ`: ψ depends only on the quotient
/// stream, and integer translations/reflections rewrite only the head, so
/// a direct or reflected stream coincidence over the probe makes the two
/// ψ functions identical as far as the data shows.
pub fn integer_translation_coincidence(
    a: &ContinuedFraction,
    b: &ContinuedFraction,
    probe: u64,
) -> bool {
    let direct = (1..=probe).all(|j| match (a.quotient(j), b.quotient(j)) {
        (Ok(x), Ok(y)) => x == y,
        _ => true, // out of data: cannot refute
    });
    if direct {
        return true;
    }
    match reflected_stream(a, probe) {
        Ok(refl) => refl
            .iter()
            .enumerate()
            .all(|(i, x)| match b.quotient(i as u64 + 1) {
                Ok(y) => y == *x,
                _ => true,
            }),
        Err(_) => false,
    }
}

/// Run the trace and ordering census on a 4-tuple; flag SUSPECT windows.
///
/// The integer-translation precondition `α_i ± α_j ∉ ℤ` is checked
/// heuristically by comparing quotient streams (directly and reflected)
/// over a finite probe; ψ depends only on the stream, so a coincidence
/// there makes the ψ functions identical.
pub fn check_four_number_bound(
    tuple: &LabeledTuple,
    t_max: &BigUint,
    burn_in: (u64, u64),
    max_depth: u64,
) -> Result<FourNumberReport, DynError> {
    let members = tuple.members();
    let mut violations = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            if integer_translation_coincidence(&members[i].1, &members[j].1, 48) {
                violations.push((members[i].0.clone(), members[j].0.clone()));
            }
        }
    }
    let mut psis = tuple.psi_functions()?;
    let mut t_min = BigUint::one();
    for (_, f) in psis.iter_mut() {
        f.ensure_covers(t_max)?;
        t_min = t_min.max(f.q1().clone());
    }
    if !violations.is_empty() {
        // coincident members tie instead of ordering strictly; report the
        // violation rather than failing mid-trace
        return Ok(FourNumberReport {
            precondition_violations: violations,
            estimate: None,
            suspect: true,
            t_min,
            t_max: t_max.clone(),
        });
    }
    let trace = crate::dynamics::sigma_trace_with(&mut psis, &t_min, t_max, max_depth)?;
    let estimate = k_index_estimate(&trace, burn_in)?;
    let suspect = estimate.distinct() < 3;
    Ok(FourNumberReport {
        precondition_violations: violations,
        estimate: Some(estimate),
        suspect,
        t_min,
        t_max: t_max.clone(),
    })
}

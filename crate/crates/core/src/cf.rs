//! Continued-fraction representation, convergent recurrences, tails, and
//! rigorous exact comparison of approximation errors.
//!
//! A [`ContinuedFraction`] is `a0 + 1/(a1 + 1/(a2 + ...))` with a partial
//! quotient stream that is either a finite list (an exact rational, kept in
//! canonical form with last quotient ≥ 2), a known prefix of an irrational,
//! an eventually periodic description, or a seeded deterministic generator.
//!
//! The approximation error `ξ_ν = |q_ν α − p_ν| = 1/(q_ν α_{ν+1} + q_{ν−1})`
//! is represented by [`ErrorValue`]: the exact pair `(q_ν, q_{ν−1})` plus a
//! handle to the tail `α_{ν+1}`, enclosed by a shrinking rational interval.
//! Refinement step `d` brackets the tail between the truncations
//! `[a_{ν+1}; …; a_{ν+d}]` and `[a_{ν+1}; …; a_{ν+d}+1]`, which alternate
//! above and below the true value, so the enclosures nest and never exclude
//! it. [`compare_error`] refines two enclosures alternately until they are
//! disjoint and returns a proven strict ordering, or reports that it cannot
//! separate them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand_core::{RngCore, SeedableRng};

use crate::ratio::Rational;

/// Errors from stream access and construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfError {
    /// A finite or prefix stream has no quotient at the requested index.
    StreamExhausted { label: String, index: u64 },
    /// A partial quotient `a_j` with `j ≥ 1` must be positive.
    InvalidQuotient { index: u64 },
    /// Periodic streams need a nonempty period.
    EmptyPeriod,
    /// Generator streams need `bound ≥ 1`.
    ZeroRandomBound,
    /// Index precondition violated (e.g. `ν ≥ 1` for `alpha_star`).
    IndexOutOfRange { op: &'static str, index: u64 },
}

impl fmt::Display for CfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfError::StreamExhausted { label, index } => {
                write!(f, "stream of '{label}' exhausted at quotient index {index}")
            }
            CfError::InvalidQuotient { index } => {
                write!(f, "partial quotient at index {index} must be >= 1")
            }
            CfError::EmptyPeriod => write!(f, "periodic stream needs a nonempty period"),
            CfError::ZeroRandomBound => write!(f, "random stream needs bound >= 1"),
            CfError::IndexOutOfRange { op, index } => {
                write!(f, "{op}: index {index} out of range")
            }
        }
    }
}

/// Partial-quotient stream `a_1, a_2, …`. Always deterministic: re-reading
/// index `j` yields the same value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stream {
    /// Exact rational: the stream ends. Canonical form (last quotient ≥ 2).
    Finite(Vec<BigUint>),
    /// Known prefix of an irrational; reading past the end is an error,
    /// not evidence of rationality.
    Prefix(Vec<BigUint>),
    /// `preperiod` then `period` repeating forever.
    Periodic {
        preperiod: Vec<BigUint>,
        period: Vec<BigUint>,
    },
    /// Seeded generator: `a_j = 1 + (chacha8(seed) draw (skip+j-1)) mod bound`.
    Random { seed: u64, bound: u64, skip: u64 },
}

fn nth_random(seed: u64, bound: u64, draw: u64) -> u64 {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // each u64 draw consumes two 32-bit words
    rng.set_word_pos(u128::from(draw) * 2);
    1 + rng.next_u64() % bound
}

/// A real number as `[a_0; a_1, a_2, …]` plus an opaque label.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    a0: BigInt,
    stream: Stream,
    label: String,
}

fn validate_positive(quotients: &[BigUint]) -> Result<(), CfError> {
    for (i, a) in quotients.iter().enumerate() {
        if a.is_zero() {
            return Err(CfError::InvalidQuotient {
                index: i as u64 + 1,
            });
        }
    }
    Ok(())
}

impl ContinuedFraction {
    /// Exact rational `[a0; quotients…]`, canonicalised so the last
    /// quotient is ≥ 2 (a trailing 1 is merged into its predecessor),
    /// making the representation unique.
    pub fn rational(
        a0: impl Into<BigInt>,
        quotients: Vec<BigUint>,
        label: impl Into<String>,
    ) -> Result<Self, CfError> {
        validate_positive(&quotients)?;
        let mut a0: BigInt = a0.into();
        let mut q = quotients;
        if q.last().map(|a| a.is_one()).unwrap_or(false) {
            q.pop();
            match q.last_mut() {
                Some(prev) => *prev += BigUint::one(),
                None => a0 += 1,
            }
        }
        Ok(ContinuedFraction {
            a0,
            stream: Stream::Finite(q),
            label: label.into(),
        })
    }

    /// Known prefix of an irrational number's expansion.
    pub fn prefix(
        a0: impl Into<BigInt>,
        quotients: Vec<BigUint>,
        label: impl Into<String>,
    ) -> Result<Self, CfError> {
        validate_positive(&quotients)?;
        Ok(ContinuedFraction {
            a0: a0.into(),
            stream: Stream::Prefix(quotients),
            label: label.into(),
        })
    }

    /// Eventually periodic expansion (a quadratic irrational).
    pub fn periodic(
        a0: impl Into<BigInt>,
        preperiod: Vec<BigUint>,
        period: Vec<BigUint>,
        label: impl Into<String>,
    ) -> Result<Self, CfError> {
        if period.is_empty() {
            return Err(CfError::EmptyPeriod);
        }
        validate_positive(&preperiod)?;
        validate_positive(&period)?;
        Ok(ContinuedFraction {
            a0: a0.into(),
            stream: Stream::Periodic { preperiod, period },
            label: label.into(),
        })
    }

    /// Deterministic pseudo-random expansion with quotients in `[1, bound]`.
    pub fn random(
        a0: impl Into<BigInt>,
        seed: u64,
        bound: u64,
        label: impl Into<String>,
    ) -> Result<Self, CfError> {
        if bound == 0 {
            return Err(CfError::ZeroRandomBound);
        }
        Ok(ContinuedFraction {
            a0: a0.into(),
            stream: Stream::Random {
                seed,
                bound,
                skip: 0,
            },
            label: label.into(),
        })
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn stream(&self) -> &Stream {
        &self.stream
    }

    /// True when the stream is a finite (rational) expansion.
    pub fn is_rational(&self) -> bool {
        matches!(self.stream, Stream::Finite(_))
    }

    /// Number of quotients available, `None` when inexhaustible.
    pub fn quotients_available(&self) -> Option<u64> {
        match &self.stream {
            Stream::Finite(v) | Stream::Prefix(v) => Some(v.len() as u64),
            _ => None,
        }
    }

    /// The partial quotient `a_j`, `j ≥ 1`.
    pub fn quotient(&self, j: u64) -> Result<BigUint, CfError> {
        if j == 0 {
            return Err(CfError::IndexOutOfRange {
                op: "quotient",
                index: 0,
            });
        }
        match &self.stream {
            Stream::Finite(v) | Stream::Prefix(v) => {
                v.get((j - 1) as usize)
                    .cloned()
                    .ok_or(CfError::StreamExhausted {
                        label: self.label.clone(),
                        index: j,
                    })
            }
            Stream::Periodic { preperiod, period } => {
                let j = (j - 1) as usize;
                if j < preperiod.len() {
                    Ok(preperiod[j].clone())
                } else {
                    Ok(period[(j - preperiod.len()) % period.len()].clone())
                }
            }
            Stream::Random { seed, bound, skip } => {
                Ok(BigUint::from(nth_random(*seed, *bound, skip + j - 1)))
            }
        }
    }

    /// The shifted number `α_ν = [a_ν; a_{ν+1}, …]`, `ν ≥ 1`.
    /// Shifts compose: `tail(tail(x,1),1)` equals `tail(x,2)`.
    pub fn tail(&self, nu: u64) -> Result<ContinuedFraction, CfError> {
        if nu == 0 {
            return Err(CfError::IndexOutOfRange {
                op: "tail",
                index: 0,
            });
        }
        let head = self.quotient(nu)?;
        let shift = nu as usize;
        let stream = match &self.stream {
            Stream::Finite(v) => Stream::Finite(v[shift..].to_vec()),
            Stream::Prefix(v) => Stream::Prefix(v[shift..].to_vec()),
            Stream::Periodic { preperiod, period } => {
                if shift <= preperiod.len() {
                    Stream::Periodic {
                        preperiod: preperiod[shift..].to_vec(),
                        period: period.clone(),
                    }
                } else {
                    let rot = (shift - preperiod.len()) % period.len();
                    let mut p = period.clone();
                    p.rotate_left(rot);
                    Stream::Periodic {
                        preperiod: Vec::new(),
                        period: p,
                    }
                }
            }
            Stream::Random { seed, bound, skip } => Stream::Random {
                seed: *seed,
                bound: *bound,
                skip: skip + nu,
            },
        };
        // keep shift labels composable: "x@2" shifted by 3 becomes "x@5"
        let label = match self
            .label
            .rsplit_once('@')
            .and_then(|(base, off)| off.parse::<u64>().ok().map(|o| (base.to_string(), o)))
        {
            Some((base, off)) => format!("{base}@{}", off + nu),
            None => format!("{}@{nu}", self.label),
        };
        Ok(ContinuedFraction {
            a0: BigInt::from(head),
            stream,
            label,
        })
    }

    /// Convergents `p_ν/q_ν` for `ν = 0..n-1`.
    pub fn convergents(&self, n: u64) -> Result<Vec<Convergent>, CfError> {
        if n == 0 {
            return Err(CfError::IndexOutOfRange {
                op: "convergents",
                index: 0,
            });
        }
        let mut out = Vec::with_capacity(n as usize);
        let mut p_prev2 = BigInt::zero(); // p_{-2}
        let mut p_prev = BigInt::one(); // p_{-1}
        let mut q_prev2 = BigInt::one(); // q_{-2}
        let mut q_prev = BigInt::zero(); // q_{-1}
        for nu in 0..n {
            let a: BigInt = if nu == 0 {
                self.a0.clone()
            } else {
                BigInt::from(self.quotient(nu)?)
            };
            let p = &a * &p_prev + &p_prev2;
            let q = &a * &q_prev + &q_prev2;
            out.push(Convergent {
                index: nu,
                p: p.clone(),
                q: q.to_biguint().expect("denominators are positive"),
            });
            p_prev2 = core::mem::replace(&mut p_prev, p);
            q_prev2 = core::mem::replace(&mut q_prev, q);
        }
        Ok(out)
    }

    /// `(q_{ν-1}, q_ν)` by running the denominator recurrence only.
    pub fn denominator_pair(&self, nu: u64) -> Result<(BigUint, BigUint), CfError> {
        let mut q_prev = BigUint::zero(); // q_{-1}
        let mut q = BigUint::one(); // q_0
        for j in 1..=nu {
            let a = self.quotient(j)?;
            let next = &a * &q + &q_prev;
            q_prev = core::mem::replace(&mut q, next);
        }
        Ok((q_prev, q))
    }

    /// The reversed tail `α*_ν = q_{ν-1}/q_ν = [0; a_ν, …, a_1]`, `ν ≥ 1`.
    /// Consecutive denominators are coprime, so this is in lowest terms.
    pub fn alpha_star(&self, nu: u64) -> Result<Rational, CfError> {
        if nu == 0 {
            return Err(CfError::IndexOutOfRange {
                op: "alpha_star",
                index: 0,
            });
        }
        let (q_prev, q) = self.denominator_pair(nu)?;
        Ok(Rational::new(q_prev, q))
    }

    /// The approximation error `ξ_ν = |q_ν α − p_ν|` as a rigorously
    /// enclosed value; needs the tail at `ν+1`.
    pub fn xi(&self, nu: u64) -> Result<ErrorValue, CfError> {
        let (q_prev, q) = self.denominator_pair(nu)?;
        let tail = self.tail(nu + 1)?;
        Ok(ErrorValue::new(nu, q, q_prev, tail))
    }
}

/// One convergent `p_ν/q_ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub index: u64,
    pub p: BigInt,
    pub q: BigUint,
}

impl Convergent {
    /// `p_ν q_{ν-1} − p_{ν-1} q_ν`, always ±1 for consecutive convergents.
    pub fn determinant_with(&self, prev: &Convergent) -> BigInt {
        &self.p * BigInt::from(prev.q.clone()) - &prev.p * BigInt::from(self.q.clone())
    }
}

#[derive(Clone, Debug)]
struct Refine {
    /// Tail quotients consumed so far (truncation depth), ≥ 1.
    consumed: u64,
    s_prev: BigUint,
    w_prev: BigUint,
    s_cur: BigUint,
    w_cur: BigUint,
    lo: Rational,
    hi: Rational,
    exhausted: bool,
}

/// The exact value `ξ_ν = 1/(q_ν α_{ν+1} + q_{ν-1})`, enclosed by a
/// shrinking rational interval that only ever tightens.
///
/// Cloning snapshots the enclosure; refining a clone does not affect the
/// original, which is how concurrent use is meant to work.
#[derive(Clone, Debug)]
pub struct ErrorValue {
    nu: u64,
    q: BigUint,
    q_prev: BigUint,
    head: BigUint,
    tail: ContinuedFraction,
    state: RefCell<Refine>,
}

fn xi_endpoint(q: &BigUint, q_prev: &BigUint, s: &BigUint, w: &BigUint) -> Rational {
    // image of the tail truncation s/w under x -> 1/(q x + q_prev)
    Rational::new(w.clone(), q * s + q_prev * w)
}

impl ErrorValue {
    fn new(nu: u64, q: BigUint, q_prev: BigUint, tail: ContinuedFraction) -> Self {
        let head = tail.a0().to_biguint().expect("tail head is positive");
        let s_prev = BigUint::one();
        let w_prev = BigUint::zero();
        let s_cur = head.clone();
        let w_cur = BigUint::one();
        let (lo, hi) = Self::endpoints(&q, &q_prev, &s_prev, &w_prev, &s_cur, &w_cur);
        ErrorValue {
            nu,
            q,
            q_prev,
            head,
            tail,
            state: RefCell::new(Refine {
                consumed: 1,
                s_prev,
                w_prev,
                s_cur,
                w_cur,
                lo,
                hi,
                exhausted: false,
            }),
        }
    }

    fn endpoints(
        q: &BigUint,
        q_prev: &BigUint,
        s_prev: &BigUint,
        w_prev: &BigUint,
        s_cur: &BigUint,
        w_cur: &BigUint,
    ) -> (Rational, Rational) {
        let a = xi_endpoint(q, q_prev, s_cur, w_cur);
        let b = xi_endpoint(q, q_prev, &(s_cur + s_prev), &(w_cur + w_prev));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    fn term(&self, i: u64) -> Result<BigUint, CfError> {
        if i == 1 {
            Ok(self.head.clone())
        } else {
            self.tail.quotient(i - 1)
        }
    }

    pub fn index(&self) -> u64 {
        self.nu
    }

    pub fn denominator(&self) -> &BigUint {
        &self.q
    }

    pub fn denominator_prev(&self) -> &BigUint {
        &self.q_prev
    }

    pub fn tail(&self) -> &ContinuedFraction {
        &self.tail
    }

    /// Current enclosure `[lo, hi]`; the true value lies strictly inside
    /// while the tail continues, and is never excluded.
    pub fn bounds(&self) -> (Rational, Rational) {
        let st = self.state.borrow();
        (st.lo.clone(), st.hi.clone())
    }

    pub fn depth(&self) -> u64 {
        self.state.borrow().consumed
    }

    /// One refinement step. Returns false when the budget is reached or the
    /// tail has no more data; the enclosure stays valid either way.
    pub fn try_refine_one(&self, max_depth: u64) -> bool {
        let mut st = self.state.borrow_mut();
        if st.exhausted || st.consumed >= max_depth {
            return false;
        }
        let next = match self.term(st.consumed + 1) {
            Ok(t) => t,
            Err(_) => {
                st.exhausted = true;
                return false;
            }
        };
        let s_next = &next * &st.s_cur + &st.s_prev;
        let w_next = &next * &st.w_cur + &st.w_prev;
        st.s_prev = core::mem::replace(&mut st.s_cur, s_next);
        st.w_prev = core::mem::replace(&mut st.w_cur, w_next);
        st.consumed += 1;
        let (lo, hi) = Self::endpoints(
            &self.q,
            &self.q_prev,
            &st.s_prev,
            &st.w_prev,
            &st.s_cur,
            &st.w_cur,
        );
        debug_assert!(lo >= st.lo && hi <= st.hi, "refinement must nest");
        st.lo = lo;
        st.hi = hi;
        true
    }

    /// Refine until `depth` tail quotients are consumed (or data runs out).
    pub fn refine_to(&self, depth: u64) {
        while self.try_refine_one(depth) {}
    }

    /// Exact equality proof: same denominator pair and provably identical
    /// tails. Returns false when equality cannot be established, which is
    /// not a proof of inequality.
    pub fn provably_equal(&self, other: &ErrorValue) -> bool {
        self.q == other.q
            && self.q_prev == other.q_prev
            && cf_provably_equal(&self.tail, &other.tail) == Some(true)
    }
}

/// Proven strict ordering between two enclosed values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrictOrder {
    Less,
    Greater,
}

impl StrictOrder {
    pub fn reverse(self) -> Self {
        match self {
            StrictOrder::Less => StrictOrder::Greater,
            StrictOrder::Greater => StrictOrder::Less,
        }
    }
}

/// The comparison could not prove a strict ordering within the refinement
/// budget: either the values are equal (commensurable inputs) or the depth
/// was insufficient. Carries both enclosures as diagnostics.
#[derive(Clone, Debug)]
pub struct CannotSeparate {
    pub left: (Rational, Rational),
    pub right: (Rational, Rational),
    pub left_depth: u64,
    pub right_depth: u64,
}

impl fmt::Display for CannotSeparate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cannot separate [{}, {}] (depth {}) from [{}, {}] (depth {})",
            self.left.0.to_fraction_string(),
            self.left.1.to_fraction_string(),
            self.left_depth,
            self.right.0.to_fraction_string(),
            self.right.1.to_fraction_string(),
            self.right_depth,
        )
    }
}

fn disjoint(x: &ErrorValue, y: &ErrorValue) -> Option<StrictOrder> {
    let xs = x.state.borrow();
    let ys = y.state.borrow();
    if xs.hi < ys.lo {
        Some(StrictOrder::Less)
    } else if ys.hi < xs.lo {
        Some(StrictOrder::Greater)
    } else {
        None
    }
}

/// Refine both enclosures alternately (shallower first) until they are
/// disjoint, and return the proven ordering of `x` versus `y`. The result
/// is independent of refinement order because enclosures nest.
///
/// Never guesses: when both enclosures still overlap after `max_depth`
/// refinements (or both tails run dry) the caller gets [`CannotSeparate`].
pub fn compare_error(
    x: &ErrorValue,
    y: &ErrorValue,
    max_depth: u64,
) -> Result<StrictOrder, CannotSeparate> {
    let fail = |x: &ErrorValue, y: &ErrorValue| CannotSeparate {
        left: x.bounds(),
        right: y.bounds(),
        left_depth: x.depth(),
        right_depth: y.depth(),
    };
    if core::ptr::eq(x, y) {
        // identical values never separate
        return Err(fail(x, y));
    }
    loop {
        if let Some(ord) = disjoint(x, y) {
            return Ok(ord);
        }
        let (first, second) = if x.depth() <= y.depth() {
            (x, y)
        } else {
            (y, x)
        };
        if !first.try_refine_one(max_depth) && !second.try_refine_one(max_depth) {
            return Err(fail(x, y));
        }
    }
}

/// Decide whether two numbers are provably the same real.
///
/// `Some(true)` and `Some(false)` are proofs; `None` means the available
/// data cannot settle it (prefix streams that agree as far as they go, or a
/// generator stream matching a periodic one term for term).
///
/// A prefix descriptor names one specific number whose further quotients
/// are simply unavailable; two prefix descriptors are provably the same
/// number only when they are the same descriptor, label included. Data
/// equality alone is not enough: equal suffixes of different numbers
/// continue independently.
pub fn cf_provably_equal(a: &ContinuedFraction, b: &ContinuedFraction) -> Option<bool> {
    if a.a0() != b.a0() {
        return Some(false);
    }
    if let (Stream::Prefix(u), Stream::Prefix(v)) = (&a.stream, &b.stream) {
        return if u == v && a.label == b.label {
            Some(true)
        } else if probe_differs(&a.stream, &b.stream, 128) {
            Some(false)
        } else {
            None
        };
    }
    streams_provably_equal(&a.stream, &b.stream)
}

fn probe_differs(a: &Stream, b: &Stream, upto: u64) -> bool {
    let ca = ContinuedFraction {
        a0: BigInt::zero(),
        stream: a.clone(),
        label: String::new(),
    };
    let cb = ContinuedFraction {
        a0: BigInt::zero(),
        stream: b.clone(),
        label: String::new(),
    };
    for j in 1..=upto {
        match (ca.quotient(j), cb.quotient(j)) {
            (Ok(x), Ok(y)) => {
                if x != y {
                    return true;
                }
            }
            _ => return false,
        }
    }
    false
}

fn streams_provably_equal(a: &Stream, b: &Stream) -> Option<bool> {
    const PROBE: u64 = 128;
    match (a, b) {
        (Stream::Finite(u), Stream::Finite(v)) => Some(u == v),
        // a finite stream is a rational; the other kinds denote irrationals
        (Stream::Finite(_), _) | (_, Stream::Finite(_)) => Some(false),
        (
            Stream::Periodic {
                preperiod: pa,
                period: qa,
            },
            Stream::Periodic {
                preperiod: pb,
                period: qb,
            },
        ) => {
            // two eventually periodic streams agree everywhere iff they
            // agree on max(preperiods) + lcm(periods) leading terms
            let window = pa.len().max(pb.len()) + qa.len().lcm(&qb.len());
            Some(!probe_differs(a, b, window as u64))
        }
        (
            Stream::Random {
                seed: sa,
                bound: ba,
                skip: ka,
            },
            Stream::Random {
                seed: sb,
                bound: bb,
                skip: kb,
            },
        ) => {
            if sa == sb && ba == bb && ka == kb {
                Some(true)
            } else if probe_differs(a, b, PROBE) {
                Some(false)
            } else {
                None
            }
        }

        _ => {
            if probe_differs(a, b, PROBE) {
                Some(false)
            } else {
                None
            }
        }
    }
}

//! The irrationality-measure function `ψ_α(t) = min_{1≤q≤t} ||qα||` as a
//! queryable piecewise-constant object, plus an independent brute-force
//! oracle over a rational proxy.
//!
//! `ψ_α` is constant on `[q_ν, q_{ν+1})` with value `ξ_ν`, nonincreasing,
//! and drops exactly at convergent denominators. Evaluation is defined for
//! `t ≥ q_1` only: the function only matters for large arguments and the
//! region below the first denominator adds nothing. Rationals are rejected
//! here (their error eventually hits zero and the minimum degenerates);
//! admit them in [`crate::cf`] but not at the ψ level.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cf::{CfError, ContinuedFraction, ErrorValue};
use crate::ratio::Rational;

#[derive(Clone, Debug)]
pub enum PsiError {
    /// ψ is only defined from the first denominator on.
    BelowFirstDenominator {
        t: BigUint,
        q1: BigUint,
    },
    /// Rational numbers have no honest ψ: rejected at construction.
    RationalNotAllowed {
        label: String,
    },
    /// The proxy convergent is not precise enough for the requested scan.
    ProxyTooCoarse {
        needed: BigUint,
        got: BigUint,
    },
    /// Scan ranges are bounded to machine integers.
    RangeTooLarge,
    Cf(CfError),
}

impl fmt::Display for PsiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiError::BelowFirstDenominator { t, q1 } => {
                write!(f, "t = {t} is below the first denominator q_1 = {q1}")
            }
            PsiError::RationalNotAllowed { label } => {
                write!(
                    f,
                    "'{label}' is rational; psi is defined for irrationals only"
                )
            }
            PsiError::ProxyTooCoarse { needed, got } => {
                write!(f, "proxy denominator {got} too coarse, need > {needed}")
            }
            PsiError::RangeTooLarge => write!(f, "scan range exceeds machine integers"),
            PsiError::Cf(e) => write!(f, "{e}"),
        }
    }
}

impl From<CfError> for PsiError {
    fn from(e: CfError) -> Self {
        PsiError::Cf(e)
    }
}

/// One materialised breakpoint: ψ equals `xi` on `[q, next q)`.
#[derive(Clone, Debug)]
pub struct Breakpoint {
    pub nu: u64,
    pub q: BigUint,
    xi: Option<ErrorValue>,
}

/// A discontinuity of ψ at `t = q`, with left and right values.
#[derive(Clone, Debug)]
pub struct JumpPoint {
    pub nu: u64,
    pub q: BigUint,
    pub before: ErrorValue,
    pub after: ErrorValue,
}

/// ψ_α as a lazily materialised step function. Materialisation is
/// incremental and cached; trace scans re-query overlapping prefixes.
#[derive(Clone, Debug)]
pub struct PsiFunction {
    cf: ContinuedFraction,
    breaks: Vec<Breakpoint>,
    q_last_pair: (BigUint, BigUint), // (q_{n-1}, q_n) for the last materialised n
}

impl PsiFunction {
    pub fn new(cf: ContinuedFraction) -> Result<Self, PsiError> {
        if cf.is_rational() {
            return Err(PsiError::RationalNotAllowed {
                label: cf.label().into(),
            });
        }
        let mut f = PsiFunction {
            cf,
            breaks: Vec::new(),
            q_last_pair: (BigUint::zero(), BigUint::one()),
        };
        f.push_break(0)?; // q_0 = 1
        f.push_break(1)?;
        Ok(f)
    }

    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn label(&self) -> &str {
        self.cf.label()
    }

    /// First denominator `q_1`; ψ's domain starts here.
    pub fn q1(&self) -> &BigUint {
        &self.breaks[1].q
    }

    fn push_break(&mut self, nu: u64) -> Result<(), PsiError> {
        debug_assert_eq!(nu as usize, self.breaks.len());
        let q = if nu == 0 {
            BigUint::one()
        } else {
            let a = self.cf.quotient(nu)?;
            let (q_prev, q_cur) = self.q_last_pair.clone();
            let next = &a * &q_cur + &q_prev;
            self.q_last_pair = (q_cur, next.clone());
            next
        };
        self.breaks.push(Breakpoint { nu, q, xi: None });
        Ok(())
    }

    /// Materialise breakpoints until the last denominator exceeds `t`.
    pub fn ensure_covers(&mut self, t: &BigUint) -> Result<(), PsiError> {
        while self.breaks.last().map(|b| &b.q <= t).unwrap_or(true) {
            let next = self.breaks.len() as u64;
            self.push_break(next)?;
        }
        Ok(())
    }

    /// Materialise at least `n` convergent denominators.
    pub fn ensure_depth(&mut self, n: u64) -> Result<(), PsiError> {
        while (self.breaks.len() as u64) < n {
            let next = self.breaks.len() as u64;
            self.push_break(next)?;
        }
        Ok(())
    }

    /// Index ν of the segment `q_ν ≤ t < q_{ν+1}`; requires coverage.
    fn segment_index(&self, t: &BigUint) -> Result<u64, PsiError> {
        if t < &self.breaks[1].q {
            return Err(PsiError::BelowFirstDenominator {
                t: t.clone(),
                q1: self.breaks[1].q.clone(),
            });
        }
        // last ν with q_ν <= t; duplicates (q_0 = q_1 when a_1 = 1) resolve
        // to the later index, whose segment is the nonempty one
        let pos = self.breaks.partition_point(|b| &b.q <= t);
        Ok((pos - 1) as u64)
    }

    fn xi_at_index(&mut self, nu: u64) -> Result<&ErrorValue, PsiError> {
        if self.breaks[nu as usize].xi.is_none() {
            let xi = self.cf.xi(nu)?;
            self.breaks[nu as usize].xi = Some(xi);
        }
        Ok(self.breaks[nu as usize].xi.as_ref().unwrap())
    }

    /// ψ(t) = ξ_ν for the unique ν with `q_ν ≤ t < q_{ν+1}`. The returned
    /// value shares no refinement state with the internal cache.
    pub fn eval(&mut self, t: &BigUint) -> Result<ErrorValue, PsiError> {
        Ok(self.eval_ref(t)?.clone())
    }

    /// Like [`Self::eval`] but returns the cached value, so refinement work
    /// done during comparisons is kept for later queries.
    pub fn eval_ref(&mut self, t: &BigUint) -> Result<&ErrorValue, PsiError> {
        self.ensure_covers(t)?;
        let nu = self.segment_index(t)?;
        self.xi_at_index(nu)
    }

    /// Already-materialised segment value at index ν, if any. Used by
    /// trace scans to hold several members' values at once.
    pub fn cached(&self, nu: u64) -> Option<&ErrorValue> {
        self.breaks.get(nu as usize).and_then(|b| b.xi.as_ref())
    }

    /// All discontinuities of ψ in `[q_1, t_max]`: the points `q_ν`, ν ≥ 2
    /// (the domain start `q_1` is an interval start, not a jump), each with
    /// left value ξ_{ν−1} and right value ξ_ν.
    pub fn jump_points(&mut self, t_max: &BigUint) -> Result<Vec<JumpPoint>, PsiError> {
        if t_max < &self.breaks[1].q {
            return Err(PsiError::BelowFirstDenominator {
                t: t_max.clone(),
                q1: self.breaks[1].q.clone(),
            });
        }
        self.ensure_covers(t_max)?;
        let mut out = Vec::new();
        for nu in 2..self.breaks.len() as u64 {
            if &self.breaks[nu as usize].q > t_max {
                break;
            }
            self.xi_at_index(nu - 1)?;
            self.xi_at_index(nu)?;
            out.push(JumpPoint {
                nu,
                q: self.breaks[nu as usize].q.clone(),
                before: self.breaks[(nu - 1) as usize].xi.clone().unwrap(),
                after: self.breaks[nu as usize].xi.clone().unwrap(),
            });
        }
        Ok(out)
    }

    /// Denominators `q_ν` with `ν ≥ 2` lying in `(lo, hi]`: the event
    /// boundaries a trace over that window has to consider.
    pub fn jumps_in(&mut self, lo: &BigUint, hi: &BigUint) -> Result<Vec<BigUint>, PsiError> {
        self.ensure_covers(hi)?;
        Ok(self
            .breaks
            .iter()
            .skip(2)
            .filter(|b| &b.q > lo && &b.q <= hi)
            .map(|b| b.q.clone())
            .collect())
    }

    /// The constancy segments of ψ intersecting `[max(q_1, t_min), t_max]`,
    /// with inclusive integer endpoints. The step-function export format.
    pub fn step_segments(
        &mut self,
        t_min: &BigUint,
        t_max: &BigUint,
    ) -> Result<Vec<StepSegment>, PsiError> {
        self.ensure_covers(t_max)?;
        let start = t_min.clone().max(self.breaks[1].q.clone());
        if start > *t_max {
            return Ok(Vec::new());
        }
        let first = self.segment_index(&start)?;
        let mut out = Vec::new();
        for nu in first.. {
            let slot = nu as usize;
            if slot + 1 >= self.breaks.len() || self.breaks[slot].q > *t_max {
                break;
            }
            // skip the empty q_0 segment when q_0 = q_1
            if self.breaks[slot + 1].q == self.breaks[slot].q {
                continue;
            }
            let t_start = self.breaks[slot].q.clone().max(start.clone());
            let t_end = (self.breaks[slot + 1].q.clone() - BigUint::one()).min(t_max.clone());
            self.xi_at_index(nu)?;
            out.push(StepSegment {
                nu,
                q: self.breaks[slot].q.clone(),
                t_start,
                t_end,
                xi: self.breaks[slot].xi.clone().unwrap(),
            });
        }
        Ok(out)
    }
}

/// One constancy interval of ψ: value `xi` for `t_start ≤ t ≤ t_end`.
#[derive(Clone, Debug)]
pub struct StepSegment {
    pub nu: u64,
    pub q: BigUint,
    pub t_start: BigUint,
    pub t_end: BigUint,
    pub xi: ErrorValue,
}

/// Brute-force oracle: `min_{1≤q≤t} ||q·proxy||` as an exact rational.
///
/// `proxy = p/den` must be a convergent of the target, deep enough that the
/// minimum and its argmin match the true number. When `horizon` (the
/// largest t the caller will scan) is given, the fidelity precondition
/// `den > 2·t²·horizon` is enforced; `None` means the caller vouches.
pub fn psi_bruteforce(
    p: &BigInt,
    den: &BigUint,
    t: &BigUint,
    horizon: Option<&BigUint>,
) -> Result<Rational, PsiError> {
    let points = psi_bruteforce_scan(p, den, t, horizon)?;
    Ok(points
        .last()
        .expect("t >= 1 yields at least one point")
        .min
        .clone())
}

/// A running-minimum change point of the brute-force scan.
#[derive(Clone, Debug)]
pub struct ScanPoint {
    /// Smallest t at which this minimum is attained.
    pub t: u64,
    pub min: Rational,
    /// The q achieving it.
    pub argmin: u64,
}

/// Incremental brute force over `1 ≤ q ≤ t_max`, recording every point
/// where the running minimum drops. Exact rational arithmetic throughout.
pub fn psi_bruteforce_scan(
    p: &BigInt,
    den: &BigUint,
    t_max: &BigUint,
    horizon: Option<&BigUint>,
) -> Result<Vec<ScanPoint>, PsiError> {
    if t_max.is_zero() {
        return Err(PsiError::RangeTooLarge);
    }
    if let Some(h) = horizon {
        let needed = BigUint::from(2u32) * t_max * t_max * h;
        if den <= &needed {
            return Err(PsiError::ProxyTooCoarse {
                needed,
                got: den.clone(),
            });
        }
    }
    let t_max: u64 = t_max.try_into().map_err(|_| PsiError::RangeTooLarge)?;
    let den_i = BigInt::from(den.clone());
    let p_mod = p.mod_floor(&den_i).to_biguint().expect("positive residue");
    let mut out: Vec<ScanPoint> = Vec::new();
    let mut acc = BigUint::zero(); // q*p mod den
    for q in 1..=t_max {
        acc += &p_mod;
        if acc >= *den {
            acc -= den;
        }
        let complement = den - &acc;
        let num = acc.clone().min(complement);
        let val = Rational::new(num, den.clone());
        if out.last().map(|s| val < s.min).unwrap_or(true) {
            out.push(ScanPoint {
                t: q,
                min: val,
                argmin: q,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::compare_error;
    use alloc::vec;
    use alloc::vec::Vec;

    fn quots(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn golden() -> ContinuedFraction {
        ContinuedFraction::periodic(0, vec![], quots(&[1]), "golden").unwrap()
    }

    fn sqrt2m1() -> ContinuedFraction {
        ContinuedFraction::periodic(0, vec![], quots(&[2]), "sqrt2m1").unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn rationals_are_rejected() {
        let r = ContinuedFraction::rational(0, quots(&[2, 3]), "r").unwrap();
        assert!(matches!(
            PsiFunction::new(r),
            Err(PsiError::RationalNotAllowed { .. })
        ));
    }

    #[test]
    fn eval_picks_the_enclosing_segment() {
        let mut f = PsiFunction::new(golden()).unwrap();
        // q_3 = 3 <= 4 < q_4 = 5, brute-force check below pins the value
        let xi = f.eval(&big(4)).unwrap();
        assert_eq!(xi.index(), 3);
        let (lo, hi) = xi.bounds();
        let oracle =
            psi_bruteforce(&BigInt::from(6765), &big(10946), &big(4), Some(&big(4))).unwrap();
        assert!(lo <= oracle && oracle <= hi);

        // right-closed at the jump: t = q_nu exactly yields ξ_nu
        let xi = f.eval(&big(5)).unwrap();
        assert_eq!(xi.index(), 4);
        let xi = f.eval(&big(3)).unwrap();
        assert_eq!(xi.index(), 3);
    }

    #[test]
    fn eval_sqrt2_example() {
        let mut f = PsiFunction::new(sqrt2m1()).unwrap();
        // q_2 = 5: ξ_2 = |5α−2| ≈ 0.0710678
        let xi = f.eval(&big(5)).unwrap();
        assert_eq!(xi.index(), 2);
        xi.refine_to(60);
        let (lo, hi) = xi.bounds();
        assert!(lo >= Rational::from_u64(710_678, 10_000_000));
        assert!(hi <= Rational::from_u64(710_679, 10_000_000));
    }

    #[test]
    fn below_first_denominator() {
        let five = ContinuedFraction::periodic(0, vec![], quots(&[5]), "fifth").unwrap();
        let mut f = PsiFunction::new(five).unwrap();
        assert!(matches!(
            f.eval(&big(4)),
            Err(PsiError::BelowFirstDenominator { .. })
        ));
        assert!(matches!(
            f.jump_points(&big(4)),
            Err(PsiError::BelowFirstDenominator { .. })
        ));
    }

    #[test]
    fn brute_force_matches_golden_t4() {
        // proxy p_19/q_19 = 6765/10946
        let pts =
            psi_bruteforce_scan(&BigInt::from(6765), &big(10946), &big(4), Some(&big(4))).unwrap();
        let last = pts.last().unwrap();
        assert_eq!(last.argmin, 3);
        // |3α−2| = 0.1458980…; proxy value is 1597/10946
        assert_eq!(last.min.reduced().num, big(1597));
        assert_eq!(last.min.reduced().den, big(10946));
    }

    #[test]
    fn brute_force_single_term() {
        let v = psi_bruteforce(&BigInt::from(6765), &big(10946), &big(1), None).unwrap();
        assert_eq!(v, Rational::from_u64(4181, 10946)); // ||proxy||
    }

    #[test]
    fn brute_force_exact_hit_on_rational_proxy() {
        // proxy 1/2 for the rational 1/2: q = 2 hits zero. This is why
        // rationals are rejected upstream.
        let v = psi_bruteforce(&BigInt::from(1), &big(2), &big(2), None).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn proxy_guard_fires() {
        assert!(matches!(
            psi_bruteforce(&BigInt::from(1), &big(2), &big(2), Some(&big(2))),
            Err(PsiError::ProxyTooCoarse { .. })
        ));
    }

    #[test]
    fn jump_points_examples() {
        let mut f = PsiFunction::new(golden()).unwrap();
        let jumps = f.jump_points(&big(8)).unwrap();
        let qs: Vec<u64> = jumps.iter().map(|j| (&j.q).try_into().unwrap()).collect();
        assert_eq!(qs, vec![2, 3, 5, 8]);
        for j in &jumps {
            // ξ_{ν-1} > ξ_ν at every jump
            assert_eq!(
                compare_error(&j.before, &j.after, 64).unwrap(),
                crate::cf::StrictOrder::Greater
            );
        }

        let mut f =
            PsiFunction::new(ContinuedFraction::prefix(0, quots(&[1, 2, 3, 4, 5]), "x").unwrap())
                .unwrap();
        let jumps = f.jump_points(&big(43)).unwrap();
        let qs: Vec<u64> = jumps.iter().map(|j| (&j.q).try_into().unwrap()).collect();
        assert_eq!(qs, vec![3, 10, 43]);
    }

    #[test]
    fn monotone_and_cached() {
        let mut f = PsiFunction::new(sqrt2m1()).unwrap();
        let hi = f.eval(&big(3)).unwrap();
        let lo = f.eval(&big(100)).unwrap();
        assert_eq!(
            compare_error(&hi, &lo, 64).unwrap(),
            crate::cf::StrictOrder::Greater
        );
        // same segment: equal indices rather than a separation attempt
        let a = f.eval(&big(13)).unwrap();
        let b = f.eval(&big(20)).unwrap();
        assert_eq!(a.index(), b.index());
    }
}

//! Construction of an `n = k(k+1)/2` tuple whose ψ functions realise
//! exactly `k` recurring descending orderings.
//!
//! The tuple is indexed by a family of labels: one singleton `{i}` per
//! `1 ≤ i ≤ k` and one pair `{i,j}` per `1 ≤ i < j ≤ k`, enumerated in
//! blocks (`{i}` followed by `{i,k}, {i,k−1}, …, {i,i+1}`). A cyclic
//! relabelling Σ of order k acts on the family; the k phase rows of the
//! enumeration under Σ are the only orderings the constructed tuple's ψ
//! functions realise for large t.
//!
//! All convergent denominators of all members come from one shared
//! scaffold `t_0 < t_1 < t_2 < …`, grown one entry per step by solving
//! simultaneous congruences: the new `t_{kν+l}` is congruent to
//! `t_{k(ν−2)+l}` modulo `t_{k(ν−1)+l}` and to `t_{k(ν−1)+l}` modulo each
//! of the next `k−1` scaffold entries. Those congruences make every
//! partial-quotient division exact, keep the sliding window of k
//! consecutive entries pairwise coprime, and pin each member's
//! denominators to an arithmetic-progression subsequence of the scaffold:
//! singleton `s` has `q_ν = t_{kν+s−1}`, and pair `{i,j}` interleaves
//! `q_{2ν} = t_{kν+i−1}` with `q_{2ν+1} = t_{kν+j−1}`.
//!
//! Solutions are the smallest congruence-class member at least `G(ν)·M`
//! (M the product of the step's moduli, `G(ν) = 2^ν` by default), which
//! forces the consecutive-ratio and double-ratio growth the ordering
//! argument needs while keeping runs deterministic and resumable.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cf::{compare_error, CfError, ContinuedFraction, StrictOrder};
use crate::dynamics::{sigma_trace_with, DynError, LabeledTuple, PermutationTrace};
use crate::psi::{PsiError, PsiFunction};

#[derive(Clone, Debug)]
pub enum ForgeError {
    /// Family machinery needs `k ≥ 2` (and phase index `l < k`).
    InvalidOrder {
        k: u32,
    },
    /// Congruence moduli must be pairwise coprime; carries the witness gcd.
    ModuliNotCoprime {
        gcd: BigUint,
    },
    /// A partial-quotient division left a remainder: the congruences were
    /// violated upstream (construction bug, never expected).
    NonIntegerQuotient {
        context: String,
    },
    /// A required growth ratio failed; kept as an honest assertion.
    GrowthScheduleUnsatisfiable {
        detail: String,
    },
    /// A scaffold coprimality invariant broke after a round.
    CoprimalityViolated {
        s1: u64,
        s2: u64,
    },
    /// Emitting or verifying needs more completed rounds.
    InsufficientRounds {
        have: u64,
        need: u64,
    },
    /// A deserialized state's tables are inconsistent.
    MalformedState {
        detail: String,
    },
    /// Burn-in leaves no events to verify.
    EmptyWindow,
    /// Members' first denominators reach `t_{2k−1}`, so a verification
    /// window must start at round 2 or later.
    BurnInTooSmall {
        burn_in_rounds: u64,
    },
    /// Scaffold and independently recomputed denominators disagree.
    DenominatorMismatch {
        label: String,
        index: u64,
    },
    /// A traced ordering matches no phase row.
    OrderingMismatch {
        t: BigUint,
        got: Vec<String>,
    },
    /// Some phase row never occurred past burn-in.
    MissingPhase {
        phase: u32,
    },
    /// A checkpoint chain inequality failed or could not be proven.
    ChainViolated {
        nu: u64,
        left: String,
        right: String,
    },
    Dyn(DynError),
    Cf(CfError),
}

impl fmt::Display for ForgeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForgeError::InvalidOrder { k } => write!(f, "family order k = {k} must be >= 2"),
            ForgeError::ModuliNotCoprime { gcd } => {
                write!(f, "congruence moduli share a factor (gcd {gcd})")
            }
            ForgeError::NonIntegerQuotient { context } => {
                write!(f, "non-integer partial quotient: {context}")
            }
            ForgeError::GrowthScheduleUnsatisfiable { detail } => {
                write!(f, "growth schedule violated: {detail}")
            }
            ForgeError::CoprimalityViolated { s1, s2 } => {
                write!(f, "scaffold entries t_{s1} and t_{s2} are not coprime")
            }
            ForgeError::InsufficientRounds { have, need } => {
                write!(f, "{have} rounds completed, need {need}")
            }
            ForgeError::MalformedState { detail } => write!(f, "malformed state: {detail}"),
            ForgeError::EmptyWindow => write!(f, "burn-in leaves no verification window"),
            ForgeError::BurnInTooSmall { burn_in_rounds } => {
                write!(f, "burn-in of {burn_in_rounds} rounds starts below the first denominators; need >= 2")
            }
            ForgeError::DenominatorMismatch { label, index } => {
                write!(
                    f,
                    "denominator of '{label}' at index {index} does not match the scaffold"
                )
            }
            ForgeError::OrderingMismatch { t, got } => {
                write!(f, "ordering at t = {t} matches no phase row: {got:?}")
            }
            ForgeError::MissingPhase { phase } => {
                write!(f, "phase row {phase} never occurred past burn-in")
            }
            ForgeError::ChainViolated { nu, left, right } => {
                write!(
                    f,
                    "checkpoint chain at round {nu}: '{left}' not above '{right}'"
                )
            }
            ForgeError::Dyn(e) => write!(f, "{e}"),
            ForgeError::Cf(e) => write!(f, "{e}"),
        }
    }
}

impl From<DynError> for ForgeError {
    fn from(e: DynError) -> Self {
        ForgeError::Dyn(e)
    }
}

impl From<CfError> for ForgeError {
    fn from(e: CfError) -> Self {
        ForgeError::Cf(e)
    }
}

impl From<PsiError> for ForgeError {
    fn from(e: PsiError) -> Self {
        ForgeError::Dyn(DynError::Psi(e))
    }
}

/// Member label: singleton `{i}` or pair `{i,j}` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyLabel {
    Single(u32),
    Pair(u32, u32),
}

impl FamilyLabel {
    fn pair(a: u32, b: u32) -> Self {
        if a < b {
            FamilyLabel::Pair(a, b)
        } else {
            FamilyLabel::Pair(b, a)
        }
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyLabel::Single(i) => write!(f, "{{{i}}}"),
            FamilyLabel::Pair(i, j) => write!(f, "{{{i},{j}}}"),
        }
    }
}

/// The canonical enumeration of the family for order `k`, with block
/// offsets `w_1 = 1`, `w_{i+1} = w_i + k − i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyOrder {
    pub k: u32,
    pub labels: Vec<FamilyLabel>,
    /// 1-based position of `{i}` for each `i`.
    pub offsets: Vec<u64>,
}

/// Enumerate the family: block `i` is `{i}` then `{i,k}, {i,k−1}, …, {i,i+1}`.
pub fn family_indexing(k: u32) -> Result<FamilyOrder, ForgeError> {
    if k < 2 {
        return Err(ForgeError::InvalidOrder { k });
    }
    let mut labels = Vec::with_capacity((k * (k + 1) / 2) as usize);
    let mut offsets = Vec::with_capacity(k as usize);
    for i in 1..=k {
        offsets.push(labels.len() as u64 + 1);
        labels.push(FamilyLabel::Single(i));
        for j in (i + 1..=k).rev() {
            labels.push(FamilyLabel::Pair(i, j));
        }
    }
    Ok(FamilyOrder { k, labels, offsets })
}

/// The cyclic relabelling: `Σ({1}) = {k}`, `Σ({i}) = {i−1}`,
/// `Σ({1,j}) = {j−1,k}`, `Σ({i,j}) = {i−1,j−1}` for `i ≥ 2`.
pub fn sigma_apply(k: u32, label: FamilyLabel) -> FamilyLabel {
    match label {
        FamilyLabel::Single(1) => FamilyLabel::Single(k),
        FamilyLabel::Single(i) => FamilyLabel::Single(i - 1),
        FamilyLabel::Pair(1, j) => FamilyLabel::pair(j - 1, k),
        FamilyLabel::Pair(i, j) => FamilyLabel::pair(i - 1, j - 1),
    }
}

/// Blocks of the `l`-th phase row in closed form (`0 ≤ l ≤ k−1`). The
/// flattened row pushed elementwise through `Σ^l` restores the family
/// enumeration; that is how the closed form is validated against
/// [`sigma_apply`].
pub fn sigma_power_blocks(k: u32, l: u32) -> Result<Vec<Vec<FamilyLabel>>, ForgeError> {
    if k < 2 || l >= k {
        return Err(ForgeError::InvalidOrder { k });
    }
    let mut blocks = Vec::with_capacity(k as usize);
    for i in 1..=k - l {
        let c = l + i;
        let mut block = vec![FamilyLabel::Single(c)];
        for m in (1..=l).rev() {
            block.push(FamilyLabel::pair(m, c));
        }
        for j in (c + 1..=k).rev() {
            block.push(FamilyLabel::pair(c, j));
        }
        blocks.push(block);
    }
    for i in k - l + 1..=k {
        let c = l + i - k;
        let mut block = vec![FamilyLabel::Single(c)];
        for j in (c + 1..=l).rev() {
            block.push(FamilyLabel::pair(c, j));
        }
        blocks.push(block);
    }
    Ok(blocks)
}

/// Flattened phase row `l`.
pub fn family_phase(k: u32, l: u32) -> Result<Vec<FamilyLabel>, ForgeError> {
    Ok(sigma_power_blocks(k, l)?.into_iter().flatten().collect())
}

/// Order of Σ: smallest `l ≥ 1` with `Σ^l` the identity on the family.
pub fn sigma_order(k: u32) -> Result<u64, ForgeError> {
    let family = family_indexing(k)?;
    let mut current = family.labels.clone();
    for l in 1..=(k as u64) * 2 {
        for x in current.iter_mut() {
            *x = sigma_apply(k, *x);
        }
        if current == family.labels {
            return Ok(l);
        }
    }
    unreachable!("relabelling is a finite permutation");
}

/// Smallest `x ≥ lower_bound` with `x ≡ r_i (mod m_i)` for every pair.
/// Moduli must be pairwise coprime; a shared factor is reported, not
/// worked around, because it signals a broken invariant upstream.
pub fn crt_solve(
    congruences: &[(BigUint, BigUint)],
    lower_bound: &BigUint,
) -> Result<BigUint, ForgeError> {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (ri, mi) in congruences {
        let mi_b = BigInt::from(mi.clone());
        let g = m.gcd(&mi_b);
        if !g.is_one() {
            return Err(ForgeError::ModuliNotCoprime {
                gcd: g.to_biguint().expect("gcd of positives"),
            });
        }
        // solve r + m·y ≡ ri (mod mi)
        let eg = m.extended_gcd(&mi_b);
        let inv = eg.x.mod_floor(&mi_b);
        let diff = (BigInt::from(ri.clone()) - &r).mod_floor(&mi_b);
        let y = (diff * inv).mod_floor(&mi_b);
        r += &m * y;
        m *= mi_b;
        r = r.mod_floor(&m);
    }
    let m = m.to_biguint().expect("positive modulus");
    let r = r.to_biguint().expect("mod_floor of positive");
    if &r >= lower_bound {
        return Ok(r);
    }
    let deficit = lower_bound - &r;
    let steps = (&deficit + &m - BigUint::one()) / &m;
    Ok(r + steps * m)
}

/// Lower-bound schedule for congruence solutions: `G(ν)·M` with
/// `G(ν) = base^ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthSchedule {
    pub base: u64,
}

impl Default for GrowthSchedule {
    fn default() -> Self {
        GrowthSchedule { base: 2 }
    }
}

impl GrowthSchedule {
    fn factor(&self, round: u64) -> BigUint {
        BigUint::from(self.base).pow(u32::try_from(round).expect("desk-scale round count"))
    }
}

/// Digit sizes of one completed round's new scaffold entries.
#[derive(Clone, Debug)]
pub struct RoundSummary {
    pub round: u64,
    /// (scaffold index, decimal digit count) per new entry.
    pub new_entries: Vec<(u64, usize)>,
}

/// The resumable state of the inductive construction: the scaffold, both
/// partial-quotient tables, and the growth schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionState {
    k: u32,
    rounds: u64,
    growth: GrowthSchedule,
    /// `t_s` for `s ≥ 0`; seeds `t_0 = … = t_{k−1} = 1` (`t_s = 0` for
    /// negative s is implicit).
    t: Vec<BigUint>,
    /// Singleton quotients, outer index `i−1`, inner `ν−1`.
    a_single: Vec<Vec<BigUint>>,
    /// Pair quotients from index 1 on; seeded with `a_1 = 1`.
    a_pair: BTreeMap<(u32, u32), Vec<BigUint>>,
}

impl ConstructionState {
    pub fn new(k: u32, growth: GrowthSchedule) -> Result<Self, ForgeError> {
        if k < 2 {
            return Err(ForgeError::InvalidOrder { k });
        }
        let mut a_pair = BTreeMap::new();
        for i in 1..=k {
            for j in i + 1..=k {
                a_pair.insert((i, j), vec![BigUint::one()]);
            }
        }
        Ok(ConstructionState {
            k,
            rounds: 0,
            growth,
            t: vec![BigUint::one(); k as usize],
            a_single: vec![Vec::new(); k as usize],
            a_pair,
        })
    }

    /// Rebuild a state from its serialized parts, checking table shapes.
    pub fn from_parts(
        k: u32,
        rounds: u64,
        growth: GrowthSchedule,
        t: Vec<BigUint>,
        a_single: Vec<Vec<BigUint>>,
        a_pair: BTreeMap<(u32, u32), Vec<BigUint>>,
    ) -> Result<Self, ForgeError> {
        if k < 2 {
            return Err(ForgeError::InvalidOrder { k });
        }
        let expect_t = (k as u64) * (rounds + 1);
        if t.len() as u64 != expect_t {
            return Err(ForgeError::MalformedState {
                detail: format!("scaffold has {} entries, expected {expect_t}", t.len()),
            });
        }
        if a_single.len() != k as usize || a_single.iter().any(|v| v.len() as u64 != rounds) {
            return Err(ForgeError::MalformedState {
                detail: "singleton quotient table shape".into(),
            });
        }
        let pairs = (k as usize * (k as usize - 1)) / 2;
        if a_pair.len() != pairs
            || a_pair.values().any(|v| v.len() as u64 != 2 * rounds + 1)
            || a_pair.keys().any(|&(i, j)| i == 0 || i >= j || j > k)
        {
            return Err(ForgeError::MalformedState {
                detail: "pair quotient table shape".into(),
            });
        }
        Ok(ConstructionState {
            k,
            rounds,
            growth,
            t,
            a_single,
            a_pair,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn growth(&self) -> GrowthSchedule {
        self.growth
    }

    pub fn scaffold(&self) -> &[BigUint] {
        &self.t
    }

    pub fn singleton_quotients(&self) -> &[Vec<BigUint>] {
        &self.a_single
    }

    pub fn pair_quotients(&self) -> &BTreeMap<(u32, u32), Vec<BigUint>> {
        &self.a_pair
    }

    /// `t_s` including the zero seeds at negative indices.
    fn t_signed(&self, s: i128) -> BigUint {
        if s < 0 {
            BigUint::zero()
        } else {
            self.t[s as usize].clone()
        }
    }

    fn exact_div(num: BigUint, den: &BigUint, context: &str) -> Result<BigUint, ForgeError> {
        let (q, r) = num.div_rem(den);
        if !r.is_zero() || q.is_zero() {
            return Err(ForgeError::NonIntegerQuotient {
                context: context.into(),
            });
        }
        Ok(q)
    }

    /// Run one round: k congruence solves, one per new scaffold entry,
    /// plus the partial-quotient assignments those congruences make exact.
    /// Steps run in increasing `l` strictly: the odd pair quotients divide
    /// by scaffold entries created earlier in the same round.
    pub fn construct_round(&mut self) -> Result<RoundSummary, ForgeError> {
        let k = self.k as u64;
        let nu = self.rounds + 1;
        let mut summary = RoundSummary {
            round: nu,
            new_entries: Vec::new(),
        };
        for l in 0..k {
            let base = (k * (nu - 1) + l) as usize; // index of t_{k(ν−1)+l}
            let older = self.t_signed(k as i128 * (nu as i128 - 2) + l as i128);
            let anchor = self.t[base].clone();

            let mut congruences = Vec::with_capacity(k as usize);
            congruences.push((&older % &anchor, anchor.clone()));
            let mut product = anchor.clone();
            for j in 1..k as usize {
                let m = self.t[base + j].clone();
                congruences.push((&anchor % &m, m.clone()));
                product *= &m;
            }
            let lower = self.growth.factor(nu) * &product;
            let x = crt_solve(&congruences, &lower)?;

            // a^{(l+1)}_ν = (x − t_{k(ν−2)+l}) / t_{k(ν−1)+l}
            let a = Self::exact_div(
                &x - &older,
                &anchor,
                &format!("singleton {} at round {nu}", l + 1),
            )?;
            self.a_single[l as usize].push(a);

            // a^{(l+1, j+1)}_{2ν} = (x − t_{k(ν−1)+l}) / t_{k(ν−1)+j}:
            // the pairs where l+1 is the smaller member
            for j in (l + 1)..k {
                let den = self.t[(k * (nu - 1) + j) as usize].clone();
                let a = Self::exact_div(
                    &x - &anchor,
                    &den,
                    &format!("pair {{{},{}}} even at round {nu}", l + 1, j + 1),
                )?;
                self.a_pair
                    .get_mut(&(l as u32 + 1, j as u32 + 1))
                    .expect("pair exists")
                    .push(a);
            }
            // a^{(i, l+1)}_{2ν+1} = (x − t_{k(ν−1)+l}) / t_{kν+i−1}
            for i in 1..=l {
                let den = self.t[(k * nu + i - 1) as usize].clone();
                let a = Self::exact_div(
                    &x - &anchor,
                    &den,
                    &format!("pair {{{},{}}} odd at round {nu}", i, l + 1),
                )?;
                self.a_pair
                    .get_mut(&(i as u32, l as u32 + 1))
                    .expect("pair exists")
                    .push(a);
            }

            summary.new_entries.push((k * nu + l, x.to_string().len()));
            self.t.push(x);
        }
        self.rounds = nu;
        self.check_coprimality()?;
        self.check_growth()?;
        Ok(summary)
    }

    /// Window coprimality after the last round: each new entry is coprime
    /// to its same-offset predecessor and to the other new entries.
    fn check_coprimality(&self) -> Result<(), ForgeError> {
        let k = self.k as u64;
        let nu = self.rounds;
        for i in 0..k {
            let a = (k * nu + i) as usize;
            let b = (k * (nu - 1) + i) as usize;
            if !self.t[a].gcd(&self.t[b]).is_one() {
                return Err(ForgeError::CoprimalityViolated {
                    s1: a as u64,
                    s2: b as u64,
                });
            }
            for j in i + 1..k {
                let c = (k * nu + j) as usize;
                if !self.t[a].gcd(&self.t[c]).is_one() {
                    return Err(ForgeError::CoprimalityViolated {
                        s1: a as u64,
                        s2: c as u64,
                    });
                }
            }
        }
        Ok(())
    }

    /// Ratio assertions for the last round: consecutive ratios exceed the
    /// round number and never decrease, and the cross-round double ratio
    /// exceeds the round number as well.
    fn check_growth(&self) -> Result<(), ForgeError> {
        let k = self.k as u64;
        let nu = self.rounds;
        let nu_b = BigUint::from(nu);
        for l in 0..k {
            let s = (k * nu + l) as usize;
            if self.t[s] <= &nu_b * &self.t[s - 1] {
                return Err(ForgeError::GrowthScheduleUnsatisfiable {
                    detail: format!("t_{s}/t_{} <= {nu}", s - 1),
                });
            }
            if s >= 2 && &self.t[s] * &self.t[s - 2] < &self.t[s - 1] * &self.t[s - 1] {
                return Err(ForgeError::GrowthScheduleUnsatisfiable {
                    detail: format!("ratio into t_{s} decreased"),
                });
            }
            // (t_{kν+l}/t_{kν+l−1}) · (t_{k(ν−1)+l−1}/t_{k(ν−1)+l}) > ν
            let prev = k as i128 * (nu as i128 - 1) + l as i128;
            if prev - 1 >= 0 {
                let lhs = &self.t[s] * self.t_signed(prev - 1);
                let rhs = &nu_b * &self.t[s - 1] * self.t_signed(prev);
                if lhs <= rhs {
                    return Err(ForgeError::GrowthScheduleUnsatisfiable {
                        detail: format!("double ratio at t_{s} <= {nu}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// The member numbers as labelled prefix expansions, in family order.
    /// Streams end at the constructed rounds; extend by running more.
    pub fn emit_tuple(&self) -> Result<LabeledTuple, ForgeError> {
        if self.rounds < 2 {
            return Err(ForgeError::InsufficientRounds {
                have: self.rounds,
                need: 2,
            });
        }
        let order = family_indexing(self.k)?;
        let mut members = Vec::with_capacity(order.labels.len());
        for label in &order.labels {
            let quotients = match label {
                FamilyLabel::Single(i) => self.a_single[(i - 1) as usize].clone(),
                FamilyLabel::Pair(i, j) => self.a_pair[&(*i, *j)].clone(),
            };
            let cf = ContinuedFraction::prefix(0, quotients, label.to_string())?;
            members.push((label.to_string(), cf));
        }
        LabeledTuple::new(members).map_err(ForgeError::from)
    }

    /// Recompute every member's convergent denominators independently from
    /// the quotient tables and check them against the scaffold:
    /// `q_ν^{(s)} = t_{kν+s−1}`, `q_{2ν}^{(i,j)} = t_{kν+i−1}`,
    /// `q_{2ν+1}^{(i,j)} = t_{kν+j−1}`.
    pub fn verify_scaffold_identities(&self) -> Result<(), ForgeError> {
        let k = self.k as u64;
        for i in 1..=self.k {
            let label = FamilyLabel::Single(i).to_string();
            let cf = ContinuedFraction::prefix(0, self.a_single[(i - 1) as usize].clone(), &label)?;
            for nu in 1..=self.rounds {
                let (_, q) = cf.denominator_pair(nu)?;
                if q != self.t[(k * nu + i as u64 - 1) as usize] {
                    return Err(ForgeError::DenominatorMismatch { label, index: nu });
                }
            }
        }
        for (&(i, j), quotients) in &self.a_pair {
            let label = FamilyLabel::Pair(i, j).to_string();
            let cf = ContinuedFraction::prefix(0, quotients.clone(), &label)?;
            for nu in 1..=self.rounds {
                let (_, even) = cf.denominator_pair(2 * nu)?;
                if even != self.t[(k * nu + i as u64 - 1) as usize] {
                    return Err(ForgeError::DenominatorMismatch {
                        label,
                        index: 2 * nu,
                    });
                }
                let (_, odd) = cf.denominator_pair(2 * nu + 1)?;
                if odd != self.t[(k * nu + j as u64 - 1) as usize] {
                    return Err(ForgeError::DenominatorMismatch {
                        label,
                        index: 2 * nu + 1,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Strict-inequality tallies at one checkpoint `t = t_{kν} − 1`, split by
/// the three adjacent-pair families of the full descending chain.
#[derive(Clone, Debug)]
pub struct CheckpointReport {
    pub nu: u64,
    pub t: BigUint,
    /// `ψ_i > ψ_{i,k}` pairs proven.
    pub singleton_over_pair: u32,
    /// `ψ_{i,j} > ψ_{i,j−1}` pairs proven.
    pub pair_descent: u32,
    /// `ψ_{i,i+1} > ψ_{i+1}` pairs proven.
    pub pair_over_next_singleton: u32,
}

/// Result of verifying a constructed tuple's dynamics.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub k: u32,
    pub rounds: u64,
    pub burn_in_rounds: u64,
    pub t_min: BigUint,
    pub t_max: BigUint,
    pub events: usize,
    /// Occurrences of each phase row `l` among post-burn-in events.
    pub phase_counts: BTreeMap<u32, u64>,
    pub checkpoints: Vec<CheckpointReport>,
    pub trace: PermutationTrace,
}

impl VerifyReport {
    pub fn distinct_orderings(&self) -> usize {
        self.phase_counts.len()
    }
}

/// Verify the constructed dynamics over `[t_{k·burn_in}, t_{k(R−1)} − 1]`:
///
/// * every traced ordering equals some phase row, and all k rows occur;
/// * at every checkpoint `t = t_{kν} − 1` inside the window the full
///   descending chain over the family enumeration holds, proven pair by
///   adjacent pair with the three inequality families tallied separately.
///
/// The window stops one round short of the data horizon so every
/// comparison can still refine its tail enclosure at least twice.
pub fn verify_construction(
    state: &ConstructionState,
    burn_in_rounds: u64,
    max_depth: u64,
) -> Result<VerifyReport, ForgeError> {
    let k = state.k as u64;
    let rounds = state.rounds;
    if rounds < 2 {
        return Err(ForgeError::InsufficientRounds {
            have: rounds,
            need: 2,
        });
    }
    if burn_in_rounds < 2 {
        return Err(ForgeError::BurnInTooSmall { burn_in_rounds });
    }
    if burn_in_rounds + 2 > rounds {
        return Err(ForgeError::EmptyWindow);
    }
    let t_min = state.t[(k * burn_in_rounds) as usize].clone();
    let t_max = state.t[(k * (rounds - 1)) as usize].clone() - BigUint::one();
    if t_min > t_max {
        return Err(ForgeError::EmptyWindow);
    }

    let tuple = state.emit_tuple()?;
    let mut psis: Vec<(String, PsiFunction)> = tuple.psi_functions()?;
    let trace = sigma_trace_with(&mut psis, &t_min, &t_max, max_depth)?;

    let rows: Vec<Vec<String>> = (0..state.k)
        .map(|l| family_phase(state.k, l).map(|row| row.iter().map(ToString::to_string).collect()))
        .collect::<Result<_, _>>()?;
    let mut phase_counts: BTreeMap<u32, u64> = BTreeMap::new();
    for ev in &trace.events {
        match rows.iter().position(|row| row == &ev.sigma) {
            Some(l) => *phase_counts.entry(l as u32).or_insert(0) += 1,
            None => {
                return Err(ForgeError::OrderingMismatch {
                    t: ev.t_from.clone(),
                    got: ev.sigma.clone(),
                })
            }
        }
    }
    for l in 0..state.k {
        if !phase_counts.contains_key(&l) {
            return Err(ForgeError::MissingPhase { phase: l });
        }
    }

    // checkpoint chain: the family enumeration is the phase-0 row
    let order = family_indexing(state.k)?;
    let mut checkpoints = Vec::new();
    for nu in burn_in_rounds + 1..=rounds - 1 {
        let t = state.t[(k * nu) as usize].clone() - BigUint::one();
        let mut report = CheckpointReport {
            nu,
            t: t.clone(),
            singleton_over_pair: 0,
            pair_descent: 0,
            pair_over_next_singleton: 0,
        };
        let indices: Vec<u64> = psis
            .iter_mut()
            .map(|(_, f)| f.eval_ref(&t).map(|x| x.index()))
            .collect::<Result<_, PsiError>>()?;
        for w in 0..order.labels.len() - 1 {
            let left = psis[w].1.cached(indices[w]).expect("materialised");
            let right = psis[w + 1].1.cached(indices[w + 1]).expect("materialised");
            match compare_error(left, right, max_depth) {
                Ok(StrictOrder::Greater) => {}
                _ => {
                    return Err(ForgeError::ChainViolated {
                        nu,
                        left: psis[w].0.clone(),
                        right: psis[w + 1].0.clone(),
                    })
                }
            }
            match (order.labels[w], order.labels[w + 1]) {
                (FamilyLabel::Single(_), FamilyLabel::Pair(_, _)) => {
                    report.singleton_over_pair += 1
                }
                (FamilyLabel::Pair(_, _), FamilyLabel::Pair(_, _)) => report.pair_descent += 1,
                (FamilyLabel::Pair(_, _), FamilyLabel::Single(_)) => {
                    report.pair_over_next_singleton += 1
                }
                (FamilyLabel::Single(_), FamilyLabel::Single(_)) => {
                    unreachable!("singletons are never adjacent in the family order")
                }
            }
        }
        checkpoints.push(report);
    }

    Ok(VerifyReport {
        k: state.k,
        rounds,
        burn_in_rounds,
        t_min,
        t_max,
        events: trace.events.len(),
        phase_counts,
        checkpoints,
        trace,
    })
}

//! Derivations: checkable chains of two-out-of-three inferences.
//!
//! A derivation starts from a list of generator modules and concludes a
//! target, one step at a time. Every non-axiom step carries an explicit
//! short exact sequence; verification re-checks each sequence with
//! [`verify_ses`] and matches the premises and the conclusion against the
//! sequence's invariants. [`derive_witness`] builds such a derivation for
//! any member of the closure of the generators.

use crate::error::{ClosureViolation, Error, Result};
use crate::fgmodule::{FGModule, Prime};
use crate::matrix::IntMatrix;
use crate::ses::{
    family_mult_cyclic, family_split, family_torsion_strip, identity_ses, padded_step1,
    padded_step2, verify_ses, Ses,
};
use crate::subcat::{closure, SubcatDescriptor};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Inference rule of a derivation step.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Rule {
    /// Restates a generator; carries no sequence.
    Axiom,
    /// Middle inference on a split sequence: from A and B conclude A (+) B.
    SumSplit,
    /// From middle and quotient conclude the sub.
    SubInfer,
    /// From sub and middle conclude the quotient.
    QuotientInfer,
    /// From sub and quotient conclude the middle.
    MiddleInfer,
}

/// Where a premise sits in the step's short exact sequence.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Sub,
    Middle,
    Quotient,
}

/// Reference to a previously available module: generators come first, then
/// step conclusions in order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Premise {
    pub index: usize,
    pub position: Position,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DerivationStep {
    pub rule: Rule,
    #[serde(default)]
    pub premises: Vec<Premise>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ses: Option<Ses>,
    pub conclusion: FGModule,
}

/// A full chain of inferences from generators to a target.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Derivation {
    pub generators: Vec<FGModule>,
    pub steps: Vec<DerivationStep>,
    pub target: FGModule,
}

/// Outcome of derivation verification; failures carry the offending step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DerivationVerdict {
    Verified,
    Failure { step: Option<usize>, reason: String },
}

impl DerivationVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, DerivationVerdict::Verified)
    }

    fn fail(step: Option<usize>, reason: impl Into<String>) -> DerivationVerdict {
        DerivationVerdict::Failure { step, reason: reason.into() }
    }
}

impl fmt::Display for DerivationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationVerdict::Verified => write!(f, "Verified"),
            DerivationVerdict::Failure { step: Some(i), reason } => {
                write!(f, "Failure at step {i}: {reason}")
            }
            DerivationVerdict::Failure { step: None, reason } => write!(f, "Failure: {reason}"),
        }
    }
}

/// Checks every step of a derivation. Nothing is trusted: sequences are
/// re-verified, premise indices are bounds-checked and matched against the
/// sequence invariants, and the final conclusion must equal the target.
pub fn verify_derivation(d: &Derivation) -> DerivationVerdict {
    let mut available = d.generators.clone();
    for (i, step) in d.steps.iter().enumerate() {
        match step.rule {
            Rule::Axiom => {
                if step.ses.is_some() {
                    return DerivationVerdict::fail(Some(i), "axiom step carries a sequence");
                }
                if !step.premises.is_empty() {
                    return DerivationVerdict::fail(Some(i), "axiom step lists premises");
                }
                if !d.generators.contains(&step.conclusion) {
                    return DerivationVerdict::fail(
                        Some(i),
                        format!("axiom conclusion {} is not a generator", step.conclusion),
                    );
                }
            }
            rule => {
                let Some(ses) = &step.ses else {
                    return DerivationVerdict::fail(Some(i), "inference step lacks a sequence");
                };
                match verify_ses(ses) {
                    Ok(v) if v.is_verified() => {}
                    Ok(v) => return DerivationVerdict::fail(Some(i), v.to_string()),
                    Err(e) => return DerivationVerdict::fail(Some(i), e.to_string()),
                }
                let (sub, mid, quot) = match ses.invariants() {
                    Ok(t) => t,
                    Err(e) => return DerivationVerdict::fail(Some(i), e.to_string()),
                };
                let at = |pos: Position| match pos {
                    Position::Sub => &sub,
                    Position::Middle => &mid,
                    Position::Quotient => &quot,
                };
                let (required, concluded): ([Position; 2], Position) = match rule {
                    Rule::SubInfer => ([Position::Middle, Position::Quotient], Position::Sub),
                    Rule::QuotientInfer => ([Position::Sub, Position::Middle], Position::Quotient),
                    Rule::MiddleInfer | Rule::SumSplit => {
                        ([Position::Sub, Position::Quotient], Position::Middle)
                    }
                    Rule::Axiom => unreachable!(),
                };
                if step.premises.len() != 2 {
                    return DerivationVerdict::fail(Some(i), "inference step needs two premises");
                }
                let mut positions: Vec<Position> =
                    step.premises.iter().map(|p| p.position).collect();
                positions.sort_by_key(|p| *p as u8);
                let mut expected = required.to_vec();
                expected.sort_by_key(|p| *p as u8);
                if positions != expected {
                    return DerivationVerdict::fail(
                        Some(i),
                        format!("rule {rule:?} premises must sit at {required:?}"),
                    );
                }
                for premise in &step.premises {
                    let Some(module) = available.get(premise.index) else {
                        return DerivationVerdict::fail(
                            Some(i),
                            format!("premise index {} not yet available", premise.index),
                        );
                    };
                    if module != at(premise.position) {
                        return DerivationVerdict::fail(
                            Some(i),
                            format!(
                                "premise {} is {module}, sequence has {} at {:?}",
                                premise.index,
                                at(premise.position),
                                premise.position
                            ),
                        );
                    }
                }
                if &step.conclusion != at(concluded) {
                    return DerivationVerdict::fail(
                        Some(i),
                        format!(
                            "conclusion {} does not match the sequence's {:?} ({})",
                            step.conclusion,
                            concluded,
                            at(concluded)
                        ),
                    );
                }
            }
        }
        available.push(step.conclusion.clone());
    }
    match d.steps.last() {
        None => DerivationVerdict::fail(None, "derivation has no steps"),
        Some(last) if last.conclusion == d.target => DerivationVerdict::Verified,
        Some(last) => DerivationVerdict::fail(
            None,
            format!("final conclusion {} is not the target {}", last.conclusion, d.target),
        ),
    }
}

// ---------------------------------------------------------------------------
// Witness engine
// ---------------------------------------------------------------------------

const COEFFICIENT_CAP: u64 = 10_000;

struct Builder {
    generators: Vec<FGModule>,
    available: Vec<FGModule>,
    first_index: HashMap<FGModule, usize>,
    steps: Vec<DerivationStep>,
}

impl Builder {
    fn new(generators: &[FGModule]) -> Builder {
        let mut first_index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            first_index.entry(g.clone()).or_insert(i);
        }
        Builder {
            generators: generators.to_vec(),
            available: generators.to_vec(),
            first_index,
            steps: Vec::new(),
        }
    }

    fn lookup(&self, m: &FGModule) -> Option<usize> {
        self.first_index.get(m).copied()
    }

    fn push(
        &mut self,
        rule: Rule,
        premises: Vec<Premise>,
        ses: Option<Ses>,
        conclusion: FGModule,
    ) -> usize {
        self.steps.push(DerivationStep {
            rule,
            premises,
            ses,
            conclusion: conclusion.clone(),
        });
        let idx = self.available.len();
        self.available.push(conclusion.clone());
        self.first_index.entry(conclusion).or_insert(idx);
        idx
    }

    fn last_conclusion(&self) -> Option<&FGModule> {
        self.steps.last().map(|s| &s.conclusion)
    }

    /// Derives the zero module from any nonzero available module via the
    /// identity sequence.
    fn ensure_zero(&mut self) -> Result<usize> {
        let zero = FGModule::zero();
        if let Some(i) = self.lookup(&zero) {
            return Ok(i);
        }
        let (idx, module) = self
            .available
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_zero())
            .map(|(i, m)| (i, m.clone()))
            .ok_or_else(|| Error::NotInClosure(ClosureViolation::EmptyClosure))?;
        let ses = identity_ses(&module);
        Ok(self.push(
            Rule::SubInfer,
            vec![
                Premise { index: idx, position: Position::Middle },
                Premise { index: idx, position: Position::Quotient },
            ],
            Some(ses),
            zero,
        ))
    }

    /// Concludes `a (+) b` from available indices for a and b.
    fn merge(&mut self, a_idx: usize, b_idx: usize) -> usize {
        let a = self.available[a_idx].clone();
        let b = self.available[b_idx].clone();
        let sum = a.direct_sum(&b);
        if let Some(i) = self.lookup(&sum) {
            return i;
        }
        let ses = family_split(&a, &b);
        self.push(
            Rule::SumSplit,
            vec![
                Premise { index: a_idx, position: Position::Sub },
                Premise { index: b_idx, position: Position::Quotient },
            ],
            Some(ses),
            sum,
        )
    }

    // ---- Case of a positive-rank generator -------------------------------

    /// Cyclic torsion from a positive-rank module: quotient inference on
    /// the multiplication sequence 0 -> M -> M -> Z/p^t -> 0.
    fn ensure_cyclic(&mut self, base_idx: usize, p: Prime, t: u64) -> Result<usize> {
        let cyclic = FGModule::cyclic(p, t);
        if let Some(i) = self.lookup(&cyclic) {
            return Ok(i);
        }
        let base = self.available[base_idx].clone();
        let ses = family_mult_cyclic(&base, p, t)?;
        Ok(self.push(
            Rule::QuotientInfer,
            vec![
                Premise { index: base_idx, position: Position::Sub },
                Premise { index: base_idx, position: Position::Middle },
            ],
            Some(ses),
            cyclic,
        ))
    }

    /// An arbitrary torsion module, assembled from cyclic pieces.
    fn ensure_torsion(&mut self, base_idx: usize, t: &FGModule) -> Result<usize> {
        debug_assert!(t.is_torsion());
        if t.is_zero() {
            return self.ensure_zero();
        }
        if let Some(i) = self.lookup(t) {
            return Ok(i);
        }
        let summands = t.cyclic_summands();
        let mut acc = self.ensure_cyclic(base_idx, summands[0].0, summands[0].1)?;
        for &(p, e) in &summands[1..] {
            let next = self.ensure_cyclic(base_idx, p, e)?;
            acc = self.merge(acc, next);
        }
        Ok(acc)
    }

    /// Strips the torsion off a mixed generator: with Tor(g) and g known,
    /// the quotient inference on the strip sequence yields the free part.
    fn ensure_free_part_of(&mut self, base_idx: usize, gen_idx: usize) -> Result<usize> {
        let g = self.available[gen_idx].clone();
        let free = g.free_part();
        if let Some(i) = self.lookup(&free) {
            return Ok(i);
        }
        let tor_idx = self.ensure_torsion(base_idx, &g.torsion_part())?;
        let ses = family_torsion_strip(&g);
        Ok(self.push(
            Rule::QuotientInfer,
            vec![
                Premise { index: tor_idx, position: Position::Sub },
                Premise { index: gen_idx, position: Position::Middle },
            ],
            Some(ses),
            free,
        ))
    }

    /// Subtraction step of the Euclidean reduction: with Z^a and Z^b at
    /// hand (a > b), the sub inference on the split of Z^a yields Z^{a-b}.
    fn euclid_subtract(&mut self, a: u64, b: u64) -> usize {
        let diff = FGModule::free(a - b);
        if let Some(i) = self.lookup(&diff) {
            return i;
        }
        let a_idx = self.lookup(&FGModule::free(a)).expect("Z^a available");
        let b_idx = self.lookup(&FGModule::free(b)).expect("Z^b available");
        let ses = family_split(&diff, &FGModule::free(b));
        self.push(
            Rule::SubInfer,
            vec![
                Premise { index: a_idx, position: Position::Middle },
                Premise { index: b_idx, position: Position::Quotient },
            ],
            Some(ses),
            diff,
        )
    }

    /// Realizes Z^gcd from the available free modules Z^{r_i} by repeated
    /// subtraction.
    fn euclid_gcd(&mut self, ranks: &[u64]) -> u64 {
        let mut g = ranks[0];
        for &r in &ranks[1..] {
            let (mut a, mut b) = (g, r);
            while a != b {
                if a < b {
                    std::mem::swap(&mut a, &mut b);
                }
                self.euclid_subtract(a, b);
                a -= b;
            }
            g = a;
        }
        g
    }

    // ---- Torsion case -----------------------------------------------------

    /// Flattens a torsion module to its elementary form (all exponents 1),
    /// lowering the largest exponent one unit at a time through the shared
    /// middle of the exponent-lowering pair.
    fn flatten(&mut self, start_idx: usize) -> Result<usize> {
        let mut cur_idx = start_idx;
        loop {
            let cur = self.available[cur_idx].clone();
            let top = cur
                .torsion()
                .iter()
                .find_map(|(p, part)| {
                    let max = *part.parts().first()?;
                    (max >= 2).then_some((*p, max))
                });
            let Some((p, r)) = top else {
                return Ok(cur_idx);
            };
            let rest = remove_parts(&cur, p, &[r]);
            let (first, second) = padded_step1(p, r, &rest)?;
            let mid = second.mid().invariant()?;
            debug_assert_eq!(first.sub().invariant()?, cur);
            let mid_idx = match self.lookup(&mid) {
                Some(i) => i,
                None => self.push(
                    Rule::MiddleInfer,
                    vec![
                        Premise { index: cur_idx, position: Position::Sub },
                        Premise { index: cur_idx, position: Position::Quotient },
                    ],
                    Some(first),
                    mid,
                ),
            };
            let next = second.quot().invariant()?;
            cur_idx = match self.lookup(&next) {
                Some(i) => i,
                None => self.push(
                    Rule::QuotientInfer,
                    vec![
                        Premise { index: cur_idx, position: Position::Sub },
                        Premise { index: mid_idx, position: Position::Middle },
                    ],
                    Some(second),
                    next,
                ),
            };
        }
    }

    /// Grows elementary material into the target partition shape, raising
    /// one exponent at a time through the shared middle of the
    /// exponent-raising pair.
    fn grow(&mut self, start_idx: usize, target: &FGModule) -> Result<usize> {
        let mut cur_idx = start_idx;
        for (p, partition) in target.torsion() {
            for &part in partition.parts() {
                for s in 1..part {
                    let cur = self.available[cur_idx].clone();
                    let rest = remove_parts(&cur, *p, &[1, s]);
                    let (first, second) = padded_step2(*p, s, &rest)?;
                    debug_assert_eq!(first.sub().invariant()?, cur);
                    let mid = second.mid().invariant()?;
                    let mid_idx = match self.lookup(&mid) {
                        Some(i) => i,
                        None => self.push(
                            Rule::MiddleInfer,
                            vec![
                                Premise { index: cur_idx, position: Position::Sub },
                                Premise { index: cur_idx, position: Position::Quotient },
                            ],
                            Some(first),
                            mid,
                        ),
                    };
                    let next = second.quot().invariant()?;
                    cur_idx = match self.lookup(&next) {
                        Some(i) => i,
                        None => self.push(
                            Rule::QuotientInfer,
                            vec![
                                Premise { index: cur_idx, position: Position::Sub },
                                Premise { index: mid_idx, position: Position::Middle },
                            ],
                            Some(second),
                            next,
                        ),
                    };
                }
            }
        }
        Ok(cur_idx)
    }

    /// Final guard: the last step must conclude the target.
    fn finish(&mut self, target: &FGModule) -> Result<()> {
        if self.last_conclusion() == Some(target) {
            return Ok(());
        }
        if self.generators.contains(target) {
            self.push(Rule::Axiom, vec![], None, target.clone());
            return Ok(());
        }
        let target_idx = self
            .lookup(target)
            .expect("target must have been derived by the phases");
        let zero_idx = self.ensure_zero()?;
        let ses = family_split(target, &FGModule::zero());
        self.push(
            Rule::MiddleInfer,
            vec![
                Premise { index: target_idx, position: Position::Sub },
                Premise { index: zero_idx, position: Position::Quotient },
            ],
            Some(ses),
            target.clone(),
        );
        Ok(())
    }

    fn into_derivation(self, target: FGModule) -> Derivation {
        Derivation {
            generators: self.generators,
            steps: self.steps,
            target,
        }
    }
}

fn remove_parts(m: &FGModule, p: Prime, remove: &[u64]) -> FGModule {
    let mut torsion = m.torsion().clone();
    let mut parts: Vec<u64> = torsion
        .get(&p)
        .map(|part| part.parts().to_vec())
        .unwrap_or_default();
    for &r in remove {
        let pos = parts
            .iter()
            .position(|&e| e == r)
            .expect("removed part present");
        parts.remove(pos);
    }
    if parts.is_empty() {
        torsion.remove(&p);
    } else {
        torsion.insert(p, crate::fgmodule::Partition::new(parts).expect("positive parts"));
    }
    FGModule::new(m.rank(), torsion)
}

fn elementary(support: &[Prime], coords: &[u64]) -> FGModule {
    let mut acc = FGModule::zero();
    for (p, &c) in support.iter().zip(coords) {
        for _ in 0..c {
            acc = acc.direct_sum(&FGModule::cyclic(*p, 1));
        }
    }
    acc
}

/// Explains why `target` fails membership in the closure descriptor.
fn violation(d: &SubcatDescriptor, target: &FGModule) -> ClosureViolation {
    match d {
        SubcatDescriptor::Empty => ClosureViolation::EmptyClosure,
        SubcatDescriptor::IMod(k) => ClosureViolation::RankClass {
            modulus: *k,
            rank: target.rank(),
        },
        SubcatDescriptor::TorsionF { support, lattice, .. } => {
            if target.rank() > 0 {
                return ClosureViolation::RankClass { modulus: 0, rank: target.rank() };
            }
            let lv = target.length_vector().expect("torsion");
            if !lv.supported_on(support) {
                let outside: Vec<String> = lv
                    .support()
                    .filter(|p| !support.contains(p))
                    .map(|p| p.to_string())
                    .collect();
                return ClosureViolation::LatticeMembership {
                    detail: format!("torsion at {} outside the support", outside.join(", ")),
                };
            }
            let coords = lv.restrict(support);
            debug_assert!(!lattice.contains(&coords).unwrap_or(false));
            ClosureViolation::LatticeMembership {
                detail: format!(
                    "length vector ({}) is not in the subgroup",
                    coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                ),
            }
        }
    }
}

/// Builds a verified derivation of `target` from `generators`, following
/// the constructive recipe: positive-rank generators yield cyclic torsion
/// and Euclidean rank arithmetic; torsion generators are flattened to
/// elementary form, combined inside the length lattice, and regrown into
/// the target shape.
pub fn derive_witness(generators: &[FGModule], target: &FGModule) -> Result<Derivation> {
    let descriptor = closure(generators);
    if !descriptor.member(target) {
        return Err(Error::NotInClosure(violation(&descriptor, target)));
    }
    let mut b = Builder::new(generators);
    if generators.contains(target) {
        b.push(Rule::Axiom, vec![], None, target.clone());
        return Ok(b.into_derivation(target.clone()));
    }

    match &descriptor {
        SubcatDescriptor::Empty => unreachable!("empty closure has no members"),
        SubcatDescriptor::IMod(_) => {
            let base_idx = generators
                .iter()
                .enumerate()
                .filter(|(_, g)| g.rank() > 0)
                .min_by_key(|(_, g)| g.rank())
                .map(|(i, _)| i)
                .expect("rank case has a positive-rank generator");
            let rank = target.rank();
            let torsion = target.torsion_part();
            if rank > 0 {
                // free parts of every positive-rank generator, then Euclid
                let ranks: Vec<u64> = {
                    let mut seen = Vec::new();
                    for (i, g) in generators.iter().enumerate() {
                        if g.rank() > 0 {
                            b.ensure_free_part_of(base_idx, i)?;
                            seen.push(g.rank());
                        }
                    }
                    seen
                };
                let k = b.euclid_gcd(&ranks);
                debug_assert_eq!(rank % k, 0);
                let mut free_idx = b.lookup(&FGModule::free(k)).expect("gcd module available");
                let mut have = k;
                let k_idx = free_idx;
                while have < rank {
                    free_idx = b.merge(free_idx, k_idx);
                    have += k;
                }
                if torsion.is_zero() {
                    debug_assert_eq!(b.available[free_idx], *target);
                } else {
                    let tor_idx = b.ensure_torsion(base_idx, &torsion)?;
                    b.merge(free_idx, tor_idx);
                }
            } else if torsion.is_zero() {
                b.ensure_zero()?;
            } else {
                b.ensure_torsion(base_idx, &torsion)?;
            }
        }
        SubcatDescriptor::TorsionF { support, .. } => {
            derive_torsion_case(&mut b, generators, target, support)?;
        }
    }
    b.finish(target)?;
    let d = b.into_derivation(target.clone());
    debug_assert!(verify_derivation(&d).is_verified());
    Ok(d)
}

fn derive_torsion_case(
    b: &mut Builder,
    generators: &[FGModule],
    target: &FGModule,
    support: &[Prime],
) -> Result<()> {
    let target_vector = target.length_vector().expect("torsion target");
    if target_vector.is_zero() {
        // target is the zero module
        b.ensure_zero()?;
        return Ok(());
    }
    // length vectors of the nonzero generators, as rows
    let active: Vec<(usize, Vec<BigInt>)> = generators
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_zero())
        .map(|(i, g)| (i, g.length_vector().expect("torsion").restrict(support)))
        .collect();
    let rows: Vec<Vec<BigInt>> = active.iter().map(|(_, v)| v.clone()).collect();
    let l_t = IntMatrix::from_rows(&rows)?.transpose();
    let rhs_col: Vec<Vec<BigInt>> = target_vector
        .restrict(support)
        .into_iter()
        .map(|v| vec![v])
        .collect();
    let rhs = IntMatrix::from_rows(&rhs_col)?;
    let solution = l_t
        .solve(&rhs)
        .expect("membership guarantees an integral combination");
    let mut coefficients: Vec<BigInt> = (0..active.len()).map(|i| solution.at(i, 0).clone()).collect();
    reduce_coefficients(&mut coefficients, &l_t);

    let shift = coefficients
        .iter()
        .map(|c| if c.is_negative() { -c.clone() } else { BigInt::zero() })
        .max()
        .unwrap_or_else(BigInt::zero);
    let shift = shift
        .to_u64()
        .filter(|&m| m <= COEFFICIENT_CAP)
        .ok_or_else(|| Error::WitnessTooLarge("combination shift exceeds the cap".into()))?;
    let shifted: Vec<u64> = coefficients
        .iter()
        .map(|c| {
            (c + BigInt::from(shift))
                .to_u64()
                .filter(|&v| v <= COEFFICIENT_CAP)
                .ok_or_else(|| Error::WitnessTooLarge("combination coefficient exceeds the cap".into()))
        })
        .collect::<Result<_>>()?;

    // flatten the generators that take part in the combination
    let mut elementary_idx: HashMap<usize, usize> = HashMap::new();
    for ((gen_idx, _), &count) in active.iter().zip(&shifted) {
        if count > 0 || shift > 0 {
            let idx = b.flatten(*gen_idx)?;
            elementary_idx.insert(*gen_idx, idx);
        }
    }

    // assemble E(mu) = sum of shifted copies and E(mu - lambda) = the
    // uniform-shift surplus, then split off E(lambda)
    let assemble = |b: &mut Builder, counts: &[u64]| -> Option<usize> {
        let mut acc: Option<usize> = None;
        for ((gen_idx, _), &count) in active.iter().zip(counts) {
            for _ in 0..count {
                let e_idx = elementary_idx[gen_idx];
                acc = Some(match acc {
                    None => e_idx,
                    Some(prev) => b.merge(prev, e_idx),
                });
            }
        }
        acc
    };
    let mu_idx = assemble(b, &shifted).expect("target vector is nonzero");
    let target_elem = elementary(support, &unsigned_coords(&target_vector.restrict(support)));
    let elem_idx = if shift == 0 {
        debug_assert_eq!(b.available[mu_idx], target_elem);
        mu_idx
    } else {
        let surplus_counts: Vec<u64> = vec![shift; active.len()];
        let surplus_idx = assemble(b, &surplus_counts).expect("shift is positive");
        let surplus = b.available[surplus_idx].clone();
        let ses = family_split(&surplus, &target_elem);
        debug_assert_eq!(ses.mid().invariant()?, b.available[mu_idx]);
        match b.lookup(&target_elem) {
            Some(i) => i,
            None => b.push(
                Rule::QuotientInfer,
                vec![
                    Premise { index: surplus_idx, position: Position::Sub },
                    Premise { index: mu_idx, position: Position::Middle },
                ],
                Some(ses),
                target_elem.clone(),
            ),
        }
    };
    b.grow(elem_idx, target)?;
    Ok(())
}

fn unsigned_coords(coords: &[BigInt]) -> Vec<u64> {
    coords
        .iter()
        .map(|c| c.to_u64().expect("length coordinates are small nonnegative"))
        .collect()
}

/// Shrinks a particular solution by rounding off integer multiples of the
/// kernel of the combination system.
fn reduce_coefficients(coefficients: &mut [BigInt], l_t: &IntMatrix) {
    for kernel_vec in l_t.kernel_basis() {
        let dot: BigInt = coefficients
            .iter()
            .zip(&kernel_vec)
            .map(|(a, b)| a * b)
            .sum();
        let norm: BigInt = kernel_vec.iter().map(|v| v * v).sum();
        if norm.is_zero() {
            continue;
        }
        let two_dot: BigInt = &dot * 2;
        let two_norm: BigInt = &norm * 2;
        let q = (two_dot + &norm).div_floor(&two_norm);
        if q.is_zero() {
            continue;
        }
        for (c, k) in coefficients.iter_mut().zip(&kernel_vec) {
            *c -= &q * k;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> FGModule {
        FGModule::parse(s).unwrap()
    }

    fn gens(exprs: &[&str]) -> Vec<FGModule> {
        exprs.iter().map(|e| parse(e)).collect()
    }

    fn assert_witness(generators: &[&str], target: &str) -> Derivation {
        let g = gens(generators);
        let t = parse(target);
        let d = derive_witness(&g, &t).unwrap_or_else(|e| {
            panic!("no witness for {target} from {generators:?}: {e}");
        });
        let verdict = verify_derivation(&d);
        assert!(verdict.is_verified(), "{verdict} for {target} from {generators:?}");
        assert_eq!(&d.target, &t);
        d
    }

    #[test]
    fn single_generator_torsion() {
        let d = assert_witness(&["Z/2"], "Z/4 + Z/2 + Z/2");
        assert!(d.steps.len() <= 12, "{} steps", d.steps.len());
    }

    #[test]
    fn rank_case() {
        assert_witness(&["Z + Z/3"], "Z^2 + Z/8");
        assert_witness(&["Z^2 + Z/5"], "Z^4 + Z/9");
        assert_witness(&["Z^2 + Z/5"], "Z/7"); // pure torsion target
        assert_witness(&["Z^4", "Z^6"], "Z^2");
        assert_witness(&["Z^2"], "0");
    }

    #[test]
    fn torsion_case_multi_prime() {
        assert_witness(&["Z/4 + Z/3"], "Z/16 + Z/9");
        assert_witness(&["Z/2 + Z/3"], "Z/8 + Z/27");
        assert_witness(&["Z/2 + Z/2"], "Z/4 + Z/4");
        assert_witness(&["Z/2"], "0");
    }

    #[test]
    fn torsion_case_negative_coefficients() {
        // lambda_target = 2*(1,0) + ... requires mixing: target (1,2) from
        // (1,1) and (0,1): c = (1, 1); and (3,0) from (1,1),(0,1): c = (3,-3)
        assert_witness(&["Z/2 + Z/3", "Z/3"], "Z/2 + Z/9");
        assert_witness(&["Z/2 + Z/3", "Z/3"], "Z/8");
        assert_witness(&["Z/2 + Z/3", "Z/3"], "Z/2 + Z/2 + Z/2");
    }

    #[test]
    fn axiom_shortcut() {
        let d = assert_witness(&["Z/6"], "Z/6");
        assert_eq!(d.steps.len(), 1);
        assert_eq!(d.steps[0].rule, Rule::Axiom);
    }

    #[test]
    fn zero_generators() {
        let d = assert_witness(&["0"], "0");
        assert_eq!(d.steps.len(), 1);
    }

    #[test]
    fn out_of_closure_errors() {
        let e = derive_witness(&gens(&["Z/2"]), &parse("Z/3")).unwrap_err();
        assert!(matches!(
            e,
            Error::NotInClosure(ClosureViolation::LatticeMembership { .. })
        ));

        let e = derive_witness(&gens(&["Z^2"]), &parse("Z^3")).unwrap_err();
        assert!(matches!(
            e,
            Error::NotInClosure(ClosureViolation::RankClass { modulus: 2, rank: 3 })
        ));

        let e = derive_witness(&gens(&["Z/2"]), &parse("Z")).unwrap_err();
        assert!(matches!(
            e,
            Error::NotInClosure(ClosureViolation::RankClass { modulus: 0, rank: 1 })
        ));

        let e = derive_witness(&[], &parse("0")).unwrap_err();
        assert!(matches!(e, Error::NotInClosure(ClosureViolation::EmptyClosure)));

        let e = derive_witness(&gens(&["Z/2 + Z/2"]), &parse("Z/2")).unwrap_err();
        assert!(matches!(
            e,
            Error::NotInClosure(ClosureViolation::LatticeMembership { .. })
        ));
    }

    #[test]
    fn corrupted_step_fails_verification() {
        let d = assert_witness(&["Z/2"], "Z/4");
        let mut bad = d.clone();
        let step_idx = bad
            .steps
            .iter()
            .position(|s| s.ses.is_some())
            .expect("has an inference step");
        let ses = bad.steps[step_idx].ses.as_ref().unwrap().clone();
        bad.steps[step_idx].ses = Some(ses.with_f_entry_bumped(0, 0));
        let verdict = verify_derivation(&bad);
        assert!(!verdict.is_verified());
        match verdict {
            DerivationVerdict::Failure { step, .. } => assert_eq!(step, Some(step_idx)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn tampered_conclusion_fails() {
        let d = assert_witness(&["Z/2"], "Z/2 + Z/2");
        let mut bad = d.clone();
        bad.target = parse("Z/4");
        assert!(!verify_derivation(&bad).is_verified());

        let mut bad = d;
        let last = bad.steps.len() - 1;
        bad.steps[last].conclusion = parse("Z/4");
        assert!(!verify_derivation(&bad).is_verified());
    }

    #[test]
    fn empty_derivation_fails() {
        let d = Derivation {
            generators: gens(&["Z/2"]),
            steps: vec![],
            target: parse("Z/2"),
        };
        assert!(!verify_derivation(&d).is_verified());
    }

    #[test]
    fn json_round_trip() {
        let d = assert_witness(&["Z/4 + Z/3"], "Z/4 + Z/4 + Z/9");
        let text = serde_json::to_string(&d).unwrap();
        let back: Derivation = serde_json::from_str(&text).unwrap();
        assert_eq!(d, back);
        assert!(verify_derivation(&back).is_verified());
    }

    #[test]
    fn step_budget() {
        // soft bound: steps stay within 10x the total invariant size
        for (g, t) in [
            (vec!["Z/2"], "Z/8 + Z/4 + Z/2"),
            (vec!["Z + Z/3"], "Z^3 + Z/25"),
            (vec!["Z/4 + Z/9", "Z/2 + Z/3"], "Z/4 + Z/2 + Z/27"),
            (vec!["Z^4", "Z^6"], "Z^2 + Z/121"),
        ] {
            let generators = gens(&g);
            let target = parse(t);
            let d = derive_witness(&generators, &target).unwrap();
            assert!(verify_derivation(&d).is_verified());
            let size: u64 = generators
                .iter()
                .chain(std::iter::once(&target))
                .map(|m| m.rank() + m.torsion_length())
                .sum();
            assert!(
                (d.steps.len() as u64) <= 10 * size,
                "{} steps for size {size} ({g:?} -> {t})",
                d.steps.len()
            );
        }
    }
}

//! Canonical invariants of finitely generated abelian groups (modules over
//! the integers): rank plus one exponent partition per torsion prime, the
//! Euler characteristics chi_p, and explicit presentations.

use crate::arith::{factor, is_prime};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

/// A positive prime number, validated on construction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Prime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v: u64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("expected a prime, got {s:?}")))?;
        Prime::new(v)
    }
}

/// Value of chi_p: finite length, or infinite when a free summand survives
/// localization.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Chi {
    Finite(u64),
    Infinite,
}

impl Add for Chi {
    type Output = Chi;
    fn add(self, rhs: Chi) -> Chi {
        match (self, rhs) {
            (Chi::Finite(a), Chi::Finite(b)) => Chi::Finite(a + b),
            _ => Chi::Infinite,
        }
    }
}

impl fmt::Display for Chi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chi::Finite(v) => write!(f, "{v}"),
            Chi::Infinite => write!(f, "INFINITE"),
        }
    }
}

/// Weakly decreasing list of positive exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Partition(Vec<u64>);

impl Partition {
    pub fn new(mut parts: Vec<u64>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::BadPartition);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

/// Canonical form of a finitely generated module over the integers.
///
/// Equality of values is isomorphism of modules; the torsion map never
/// stores an empty partition.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "ModuleJson", into = "ModuleJson")]
pub struct FGModule {
    rank: u64,
    torsion: BTreeMap<Prime, Partition>,
}

impl FGModule {
    pub fn new(rank: u64, torsion: BTreeMap<Prime, Partition>) -> Self {
        let torsion = torsion.into_iter().filter(|(_, p)| !p.is_empty()).collect();
        FGModule { rank, torsion }
    }

    pub fn zero() -> Self {
        FGModule::new(0, BTreeMap::new())
    }

    pub fn free(rank: u64) -> Self {
        FGModule::new(rank, BTreeMap::new())
    }

    /// The cyclic module of order p^exponent.
    pub fn cyclic(p: Prime, exponent: u64) -> Self {
        assert!(exponent > 0, "cyclic module needs a positive exponent");
        FGModule::new(0, BTreeMap::from([(p, Partition::new(vec![exponent]).unwrap())]))
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn torsion(&self) -> &BTreeMap<Prime, Partition> {
        &self.torsion
    }

    pub fn torsion_primes(&self) -> impl Iterator<Item = Prime> + '_ {
        self.torsion.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.rank == 0
    }

    /// True when every torsion prime equals p (the zero module counts).
    pub fn is_p_torsion(&self, p: Prime) -> bool {
        self.rank == 0 && self.torsion.keys().all(|&q| q == p)
    }

    /// chi_p for a nonzero prime p: the length of the localization at p.
    /// chi_0 is `rank()`.
    pub fn chi(&self, p: Prime) -> Chi {
        if self.rank > 0 {
            Chi::Infinite
        } else {
            Chi::Finite(self.torsion.get(&p).map_or(0, Partition::total))
        }
    }

    /// Total torsion length, summed over all primes.
    pub fn torsion_length(&self) -> u64 {
        self.torsion.values().map(Partition::total).sum()
    }

    /// Order of a finite module, None when rank > 0 or the order overflows.
    pub fn order(&self) -> Option<u128> {
        if self.rank > 0 {
            return None;
        }
        let mut acc: u128 = 1;
        for (p, part) in &self.torsion {
            for &e in part.parts() {
                for _ in 0..e {
                    acc = acc.checked_mul(p.get() as u128)?;
                }
            }
        }
        Some(acc)
    }

    /// The vector (chi_p)_p of a torsion module; errors on positive rank.
    pub fn length_vector(&self) -> Result<LengthVector> {
        if self.rank > 0 {
            return Err(Error::PositiveRank);
        }
        Ok(LengthVector(
            self.torsion
                .iter()
                .map(|(p, part)| (*p, part.total()))
                .collect(),
        ))
    }

    pub fn direct_sum(&self, other: &FGModule) -> FGModule {
        let mut torsion = self.torsion.clone();
        for (p, part) in &other.torsion {
            let merged = torsion.entry(*p).or_insert_with(|| Partition(vec![]));
            let mut parts = merged.0.clone();
            parts.extend_from_slice(part.parts());
            *merged = Partition::new(parts).expect("positive parts stay positive");
        }
        FGModule::new(self.rank + other.rank, torsion)
    }

    pub fn torsion_part(&self) -> FGModule {
        FGModule::new(0, self.torsion.clone())
    }

    pub fn free_part(&self) -> FGModule {
        FGModule::free(self.rank)
    }

    /// Cyclic prime-power summands in canonical order (primes ascending,
    /// exponents descending).
    pub fn cyclic_summands(&self) -> Vec<(Prime, u64)> {
        self.torsion
            .iter()
            .flat_map(|(p, part)| part.parts().iter().map(move |&e| (*p, e)))
            .collect()
    }

    /// Invariant form of the cokernel of a presentation's relation map.
    pub fn from_presentation(p: &Presentation) -> Result<FGModule> {
        let snf = p.relations.smith_normal_form();
        let diag = snf.diagonal();
        let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
        let rank = (p.generators - nonzero) as u64;
        let mut torsion: BTreeMap<Prime, Vec<u64>> = BTreeMap::new();
        for d in diag.iter().filter(|d| !d.is_zero() && !d.is_one()) {
            let v = d
                .to_u64()
                .filter(|&v| v <= i64::MAX as u64)
                .ok_or_else(|| Error::FactorTooLarge(d.to_string()))?;
            for (q, e) in factor(v) {
                torsion.entry(Prime(q)).or_default().push(e);
            }
        }
        let torsion = torsion
            .into_iter()
            .map(|(p, parts)| (p, Partition::new(parts).expect("positive exponents")))
            .collect();
        Ok(FGModule::new(rank, torsion))
    }

    /// Standard presentation: one generator per summand, free generators
    /// first, then one diagonal relation per cyclic summand.
    pub fn to_presentation(&self) -> Presentation {
        let summands = self.cyclic_summands();
        let n = self.rank as usize + summands.len();
        let mut relations = IntMatrix::zero(n, summands.len());
        for (j, (p, e)) in summands.iter().enumerate() {
            let mut v = BigInt::one();
            for _ in 0..*e {
                v *= p.get();
            }
            relations.set(self.rank as usize + j, j, v);
        }
        Presentation::new(n, relations).expect("square-consistent by construction")
    }

    /// Parses a module expression, e.g. `Z^2 + Z/4 + (Z/2)^3` or `0`.
    /// Composite moduli split into prime-power summands.
    pub fn parse(text: &str) -> Result<FGModule> {
        parse_expr(text)
    }
}

impl FromStr for FGModule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FGModule::parse(s)
    }
}

impl fmt::Display for FGModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        match self.rank {
            0 => {}
            1 => terms.push("Z".to_string()),
            r => terms.push(format!("Z^{r}")),
        }
        for (p, e) in self.cyclic_summands() {
            let modulus = p.get().checked_pow(e as u32);
            match modulus {
                Some(m) => terms.push(format!("Z/{m}")),
                None => terms.push(format!("Z/{}^{}", p, e)),
            }
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// Finite map p -> chi_p for a torsion module; zero entries are not stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct LengthVector(BTreeMap<Prime, u64>);

impl LengthVector {
    pub fn new(coords: BTreeMap<Prime, u64>) -> Self {
        LengthVector(coords.into_iter().filter(|(_, v)| *v > 0).collect())
    }

    pub fn coords(&self) -> &BTreeMap<Prime, u64> {
        &self.0
    }

    pub fn get(&self, p: Prime) -> u64 {
        self.0.get(&p).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = Prime> + '_ {
        self.0.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &LengthVector) -> LengthVector {
        let mut out = self.0.clone();
        for (p, v) in &other.0 {
            *out.entry(*p).or_insert(0) += v;
        }
        LengthVector::new(out)
    }

    /// Coordinates of the restriction to `support`, in support order.
    pub fn restrict(&self, support: &[Prime]) -> Vec<BigInt> {
        support.iter().map(|p| BigInt::from(self.get(*p))).collect()
    }

    /// True when every nonzero coordinate lies in `support`.
    pub fn supported_on(&self, support: &[Prime]) -> bool {
        self.0.keys().all(|p| support.contains(p))
    }
}

/// A finite presentation: `generators` free generators modulo the column
/// span of `relations` (one column per relation).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "PresentationJson", into = "PresentationJson")]
pub struct Presentation {
    generators: usize,
    relations: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    generators: usize,
    relations: IntMatrix,
}

impl TryFrom<PresentationJson> for Presentation {
    type Error = Error;
    fn try_from(raw: PresentationJson) -> Result<Self> {
        Presentation::new(raw.generators, raw.relations)
    }
}

impl From<Presentation> for PresentationJson {
    fn from(p: Presentation) -> Self {
        PresentationJson {
            generators: p.generators,
            relations: p.relations,
        }
    }
}

impl Presentation {
    pub fn new(generators: usize, relations: IntMatrix) -> Result<Self> {
        if relations.rows() != generators {
            return Err(Error::DimensionMismatch(format!(
                "relations have {} rows for {} generators",
                relations.rows(),
                generators
            )));
        }
        Ok(Presentation { generators, relations })
    }

    pub fn free(rank: usize) -> Self {
        Presentation {
            generators: rank,
            relations: IntMatrix::zero(rank, 0),
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn invariant(&self) -> Result<FGModule> {
        FGModule::from_presentation(self)
    }
}

// ---------------------------------------------------------------------------
// Expression parser
//
//   expr := term ("+" term)* | "0"
//   term := "Z" | "Z^" nat | "Z/" nat | "(" expr ")^" nat
// ---------------------------------------------------------------------------

const MODULUS_CAP: u64 = i64::MAX as u64; // CLI-facing cap of 2^63 on moduli
const SUMMAND_CAP: u64 = 1 << 20; // guards runaway (expr)^n repetitions

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser { input, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len()
            && self.input.as_bytes()[self.pos].is_ascii_whitespace()
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected {:?} at position {} in {:?}",
                b as char, self.pos, self.input
            )))
        }
    }

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.input.len() && self.input.as_bytes()[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!(
                "expected a number at position {} in {:?}",
                start, self.input
            )));
        }
        let text = &self.input[start..self.pos];
        let v: u64 = text
            .parse()
            .map_err(|_| Error::Parse(format!("number {text:?} out of range")))?;
        if v == 0 {
            return Err(Error::Parse("expected a positive number, got 0".into()));
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<FGModule> {
        if self.eat(b'(') {
            let inner = self.expr()?;
            self.expect(b')')?;
            self.expect(b'^')?;
            let n = self.nat()?;
            if n.saturating_mul(inner.rank() + inner.torsion_length()) > SUMMAND_CAP {
                return Err(Error::Parse("repetition too large".into()));
            }
            let mut acc = FGModule::zero();
            for _ in 0..n {
                acc = acc.direct_sum(&inner);
            }
            return Ok(acc);
        }
        if self.eat(b'Z') {
            if self.eat(b'^') {
                let n = self.nat()?;
                return Ok(FGModule::free(n));
            }
            if self.eat(b'/') {
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.input.len()
                    && self.input.as_bytes()[self.pos].is_ascii_digit()
                {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(Error::Parse(format!(
                        "expected a modulus at position {} in {:?}",
                        start, self.input
                    )));
                }
                let text = &self.input[start..self.pos];
                let modulus: u64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("modulus {text:?} out of range")))?;
                if modulus < 2 {
                    return Err(Error::BadModulus(modulus));
                }
                if modulus > MODULUS_CAP {
                    return Err(Error::Parse(format!("modulus {modulus} exceeds 2^63 - 1")));
                }
                // CRT split into prime-power cyclic summands
                let mut acc = FGModule::zero();
                for (p, e) in factor(modulus) {
                    acc = acc.direct_sum(&FGModule::cyclic(Prime(p), e));
                }
                return Ok(acc);
            }
            return Ok(FGModule::free(1));
        }
        Err(Error::Parse(format!(
            "expected a term at position {} in {:?}",
            self.pos, self.input
        )))
    }

    fn expr(&mut self) -> Result<FGModule> {
        if self.eat(b'0') {
            return Ok(FGModule::zero());
        }
        let mut acc = self.term()?;
        while self.eat(b'+') {
            acc = acc.direct_sum(&self.term()?);
        }
        Ok(acc)
    }
}

fn parse_expr(text: &str) -> Result<FGModule> {
    let mut p = Parser::new(text);
    let m = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(Error::Parse(format!(
            "trailing input at position {} in {:?}",
            p.pos, p.input
        )));
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// JSON form: {"rank": 2, "torsion": {"2": [2,1], "3": [2]}}; an {"expr": ...}
// object is accepted on input as well.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ModuleJson {
    Canonical {
        rank: u64,
        #[serde(default)]
        torsion: BTreeMap<String, Vec<u64>>,
    },
    Expr {
        expr: String,
    },
}

impl TryFrom<ModuleJson> for FGModule {
    type Error = Error;
    fn try_from(raw: ModuleJson) -> Result<Self> {
        match raw {
            ModuleJson::Canonical { rank, torsion } => {
                let mut map = BTreeMap::new();
                for (key, parts) in torsion {
                    let p: Prime = key.parse()?;
                    if parts.is_empty() {
                        continue;
                    }
                    map.insert(p, Partition::new(parts)?);
                }
                Ok(FGModule::new(rank, map))
            }
            ModuleJson::Expr { expr } => FGModule::parse(&expr),
        }
    }
}

impl From<FGModule> for ModuleJson {
    fn from(m: FGModule) -> Self {
        ModuleJson::Canonical {
            rank: m.rank,
            torsion: m
                .torsion
                .iter()
                .map(|(p, part)| (p.to_string(), part.parts().to_vec()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> FGModule {
        FGModule::parse(s).unwrap()
    }

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn parse_examples() {
        let m = parse("Z^2 + Z/4 + Z/9");
        assert_eq!(m.rank(), 2);
        assert_eq!(m.torsion()[&p(2)].parts(), &[2]);
        assert_eq!(m.torsion()[&p(3)].parts(), &[2]);

        let m = parse("Z/12");
        assert_eq!(m.rank(), 0);
        assert_eq!(m.torsion()[&p(2)].parts(), &[2]);
        assert_eq!(m.torsion()[&p(3)].parts(), &[1]);

        assert!(parse("0").is_zero());
        assert_eq!(parse("(Z/2)^3").torsion()[&p(2)].parts(), &[1, 1, 1]);
        assert_eq!(parse("Z").rank(), 1);
        assert_eq!(parse(" Z + Z / 8 ").torsion()[&p(2)].parts(), &[3]);
    }

    #[test]
    fn parse_rejects() {
        assert!(FGModule::parse("Z/0").is_err());
        assert!(FGModule::parse("Z/1").is_err());
        assert!(FGModule::parse("Z^0").is_err());
        assert!(FGModule::parse("Z/").is_err());
        assert!(FGModule::parse("Q").is_err());
        assert!(FGModule::parse("Z + ").is_err());
        assert!(FGModule::parse("Z Z").is_err());
        assert!(FGModule::parse("0 + Z").is_err());
    }

    #[test]
    fn parse_crt_against_trial_division() {
        // independent factorization: repeated division by the smallest divisor
        fn naive_factor(mut n: u64) -> Vec<(u64, u64)> {
            let mut out: Vec<(u64, u64)> = Vec::new();
            let mut d = 2;
            while n > 1 {
                while n % d != 0 {
                    d += 1;
                }
                let mut e = 0;
                while n % d == 0 {
                    n /= d;
                    e += 1;
                }
                out.push((d, e));
            }
            out
        }
        for n in 2u64..=1000 {
            let m = parse(&format!("Z/{n}"));
            let expected: BTreeMap<Prime, Partition> = naive_factor(n)
                .into_iter()
                .map(|(q, e)| (p(q), Partition::new(vec![e]).unwrap()))
                .collect();
            assert_eq!(m.torsion(), &expected, "n = {n}");
        }
    }

    #[test]
    fn chi_examples() {
        let m = parse("Z^2 + Z/4 + Z/9");
        assert_eq!(m.rank(), 2); // chi_0
        assert_eq!(m.chi(p(2)), Chi::Infinite);

        let m = parse("Z/4 + Z/8");
        assert_eq!(m.chi(p(2)), Chi::Finite(5));
        assert_eq!(m.chi(p(3)), Chi::Finite(0));

        assert_eq!(parse("Z + Z/4").chi(p(2)), Chi::Infinite);
    }

    #[test]
    fn length_vector_examples() {
        let lv = parse("Z/4 + Z/9").length_vector().unwrap();
        assert_eq!(lv.get(p(2)), 2);
        assert_eq!(lv.get(p(3)), 2);

        assert!(parse("0").length_vector().unwrap().is_zero());

        let lv = parse("Z/2 + Z/2 + Z/27").length_vector().unwrap();
        assert_eq!(lv.get(p(2)), 2);
        assert_eq!(lv.get(p(3)), 3);

        assert_eq!(parse("Z").length_vector(), Err(Error::PositiveRank));
    }

    #[test]
    fn direct_sum_examples() {
        let a = parse("Z + Z/2").direct_sum(&parse("Z/4"));
        assert_eq!(a, parse("Z + Z/4 + Z/2"));
        assert_eq!(a.torsion()[&p(2)].parts(), &[2, 1]);

        assert_eq!(parse("Z/6").direct_sum(&FGModule::zero()), parse("Z/6"));
        assert_eq!(
            parse("Z/2").direct_sum(&parse("Z/2")).torsion()[&p(2)].parts(),
            &[1, 1]
        );
    }

    #[test]
    fn presentation_round_trip() {
        for s in ["0", "Z", "Z^3", "Z/4", "Z + Z/4", "Z^2 + Z/8 + Z/2 + Z/9", "Z/6"] {
            let m = parse(s);
            let back = FGModule::from_presentation(&m.to_presentation()).unwrap();
            assert_eq!(m, back, "round trip failed for {s}");
        }
    }

    #[test]
    fn from_presentation_examples() {
        let pres = Presentation::new(2, IntMatrix::from_rows(&[vec![2, 0], vec![0, 4]]).unwrap())
            .unwrap();
        assert_eq!(pres.invariant().unwrap(), parse("Z/4 + Z/2"));

        let pres = Presentation::new(2, IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]).unwrap())
            .unwrap();
        assert_eq!(pres.invariant().unwrap(), parse("Z/4 + Z/2"));

        assert_eq!(Presentation::free(1).invariant().unwrap(), parse("Z"));
        // unit diagonal entries contribute nothing
        let pres = Presentation::new(2, IntMatrix::from_rows(&[vec![1, 0], vec![0, 6]]).unwrap())
            .unwrap();
        assert_eq!(pres.invariant().unwrap(), parse("Z/6"));
    }

    #[test]
    fn to_presentation_examples() {
        let pres = parse("Z + Z/4").to_presentation();
        assert_eq!(pres.generators(), 2);
        assert_eq!(pres.relations(), &IntMatrix::from_rows(&[vec![0], vec![4]]).unwrap());

        assert_eq!(FGModule::zero().to_presentation().generators(), 0);

        let pres = parse("Z/2 + Z/3").to_presentation();
        assert_eq!(
            pres.relations(),
            &IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap()
        );
    }

    #[test]
    fn display_round_trip() {
        for s in ["0", "Z", "Z^3", "Z/4 + Z/2", "Z^2 + Z/8 + Z/9"] {
            let m = parse(s);
            assert_eq!(parse(&m.to_string()), m);
            assert_eq!(m.to_string(), s);
        }
    }

    #[test]
    fn json_round_trip() {
        let m = parse("Z^2 + Z/4 + Z/2 + Z/9");
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"rank":2,"torsion":{"2":[2,1],"3":[2]}}"#);
        let back: FGModule = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);

        let via_expr: FGModule = serde_json::from_str(r#"{"expr":"Z^2 + Z/4 + Z/2 + Z/9"}"#).unwrap();
        assert_eq!(via_expr, m);

        let bad: std::result::Result<FGModule, _> =
            serde_json::from_str(r#"{"rank":0,"torsion":{"4":[1]}}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn order_examples() {
        assert_eq!(parse("Z/4 + Z/3").order(), Some(12));
        assert_eq!(FGModule::zero().order(), Some(1));
        assert_eq!(parse("Z").order(), None);
    }
}

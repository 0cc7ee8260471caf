//! Finite descriptors for 2-3 subcategories, decidable membership, closure
//! of a generator set, and the correspondence with subgroups of the
//! Grothendieck group of the torsion subcategory over a prime set.
//!
//! Every 2-3 subcategory of finitely generated abelian groups is either a
//! rank class `I_k = { X : k | rank X }` or a torsion family
//! `F(S, H) = { torsion X : (chi_p(X))_{p in S} in H }`. A descriptor pins
//! one of these down with finite data.

use crate::error::{Error, Result};
use crate::fgmodule::{FGModule, LengthVector, Prime};
use crate::lattice::Lattice;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;

/// What a torsion-family descriptor says about primes outside its support.
///
/// `Forbidden` members carry no torsion outside the support; this is what
/// closures of finite generator sets produce. `Free` leaves torsion at
/// other primes unconstrained and realizes the literal family F(S, H) —
/// in particular the full torsion subcategory is `TorsionF` over the empty
/// support with the trivial lattice and `Free` policy.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutsidePolicy {
    Forbidden,
    Free,
}

/// Finite description of a 2-3 subcategory.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SubcatDescriptor {
    /// The empty subcategory.
    Empty,
    /// `I_k`: modules whose rank is divisible by k (k >= 1).
    IMod(u64),
    /// A torsion family cut out by a subgroup of length vectors.
    TorsionF {
        support: Vec<Prime>,
        lattice: Lattice,
        outside: OutsidePolicy,
    },
}

impl SubcatDescriptor {
    pub fn imod(k: u64) -> SubcatDescriptor {
        assert!(k >= 1, "IMod modulus must be at least 1");
        SubcatDescriptor::IMod(k)
    }

    /// Builds a torsion family, normalizing the support order to match the
    /// lattice's support.
    pub fn torsion_family(lattice: Lattice, outside: OutsidePolicy) -> SubcatDescriptor {
        SubcatDescriptor::TorsionF {
            support: lattice.support().to_vec(),
            lattice,
            outside,
        }
    }

    /// The subcategory containing exactly the zero module.
    pub fn zero_only() -> SubcatDescriptor {
        SubcatDescriptor::torsion_family(Lattice::zero(vec![]), OutsidePolicy::Forbidden)
    }

    /// All torsion modules (the paper-level I_0).
    pub fn all_torsion() -> SubcatDescriptor {
        SubcatDescriptor::torsion_family(Lattice::zero(vec![]), OutsidePolicy::Free)
    }

    /// Decides membership of a module.
    pub fn member(&self, x: &FGModule) -> bool {
        match self {
            SubcatDescriptor::Empty => false,
            SubcatDescriptor::IMod(k) => x.rank() % k == 0,
            SubcatDescriptor::TorsionF { support, lattice, outside } => {
                if !x.is_torsion() {
                    return false;
                }
                let lv = x.length_vector().expect("torsion module");
                if *outside == OutsidePolicy::Forbidden && !lv.supported_on(support) {
                    return false;
                }
                let coords = lv.restrict(support);
                lattice.contains(&coords).expect("aligned by construction")
            }
        }
    }

    /// Drops support primes whose constraint is vacuous under the policy:
    /// a coordinate forced to zero (Forbidden) or completely free (Free).
    /// The member set is unchanged; the result is a fixed point.
    pub fn canonicalize(&self) -> SubcatDescriptor {
        match self {
            SubcatDescriptor::TorsionF { support, lattice, outside } => {
                let keep: Vec<Prime> = support
                    .iter()
                    .copied()
                    .filter(|&p| match outside {
                        OutsidePolicy::Forbidden => !lattice.coordinate_forced_zero(p),
                        OutsidePolicy::Free => !lattice.contains_unit(p),
                    })
                    .collect();
                if keep.len() == support.len() {
                    return self.clone();
                }
                let projected = lattice.project(&keep).expect("keep is a sub-support");
                SubcatDescriptor::TorsionF {
                    support: keep,
                    lattice: projected,
                    outside: *outside,
                }
            }
            other => other.clone(),
        }
    }

    /// Equality of member sets, computed on canonical forms with aligned
    /// supports.
    pub fn equal(&self, other: &SubcatDescriptor) -> bool {
        let a = self.canonicalize();
        let b = other.canonicalize();
        match (&a, &b) {
            (SubcatDescriptor::Empty, SubcatDescriptor::Empty) => true,
            (SubcatDescriptor::IMod(k1), SubcatDescriptor::IMod(k2)) => k1 == k2,
            (
                SubcatDescriptor::TorsionF { outside: o1, .. },
                SubcatDescriptor::TorsionF { outside: o2, .. },
            ) => {
                if o1 != o2 {
                    // A Free family admits torsion at arbitrarily large
                    // primes; a Forbidden one is supported inside a finite
                    // set. The member sets always differ.
                    return false;
                }
                let (l1, l2) = align(&a, &b);
                l1.equal(&l2).expect("aligned supports")
            }
            _ => false,
        }
    }

    /// True when every member of `other` is a member of `self`.
    pub fn includes(&self, other: &SubcatDescriptor) -> bool {
        let big = self.canonicalize();
        let small = other.canonicalize();
        match (&big, &small) {
            (_, SubcatDescriptor::Empty) => true,
            (SubcatDescriptor::Empty, _) => false,
            (SubcatDescriptor::IMod(k1), SubcatDescriptor::IMod(k2)) => k2 % k1 == 0,
            // torsion modules have rank 0, divisible by anything
            (SubcatDescriptor::IMod(_), SubcatDescriptor::TorsionF { .. }) => true,
            // any IMod contains free modules of positive rank
            (SubcatDescriptor::TorsionF { .. }, SubcatDescriptor::IMod(_)) => false,
            (
                SubcatDescriptor::TorsionF { outside: o1, .. },
                SubcatDescriptor::TorsionF { outside: o2, .. },
            ) => {
                if *o1 == OutsidePolicy::Forbidden && *o2 == OutsidePolicy::Free {
                    return false;
                }
                let (l1, l2) = align(&big, &small);
                l1.includes(&l2).expect("aligned supports")
            }
        }
    }

    pub fn support(&self) -> &[Prime] {
        match self {
            SubcatDescriptor::TorsionF { support, .. } => support,
            _ => &[],
        }
    }

    /// Image in the Grothendieck group of the whole category (= Z via the
    /// rank): the subgroup generated by ranks of members, returned as its
    /// nonnegative generator.
    pub fn rank_class_image(&self) -> u64 {
        match self {
            SubcatDescriptor::IMod(k) => *k,
            _ => 0,
        }
    }
}

/// Aligns two torsion families over the union support, extending each
/// lattice per its own policy (zero at new coordinates for Forbidden, full
/// at new coordinates for Free). Callers match policies beforehand where
/// semantics require it.
fn align(a: &SubcatDescriptor, b: &SubcatDescriptor) -> (Lattice, Lattice) {
    let (SubcatDescriptor::TorsionF { support: s1, lattice: l1, outside: o1 },
         SubcatDescriptor::TorsionF { support: s2, lattice: l2, outside: o2 }) = (a, b)
    else {
        panic!("align called on non-torsion descriptors");
    };
    let mut union: Vec<Prime> = s1.iter().chain(s2.iter()).copied().collect();
    union.sort_unstable();
    union.dedup();
    let e1 = l1
        .extend(union.clone(), *o1 == OutsidePolicy::Free)
        .expect("union contains support");
    let e2 = l2
        .extend(union, *o2 == OutsidePolicy::Free)
        .expect("union contains support");
    (e1, e2)
}

impl fmt::Display for SubcatDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubcatDescriptor::Empty => write!(f, "Empty"),
            SubcatDescriptor::IMod(k) => write!(f, "I_{k}"),
            SubcatDescriptor::TorsionF { support, lattice, outside } => {
                let supp = support
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let h = if lattice.is_zero() {
                    "0".to_string()
                } else if lattice.is_full() {
                    match support.len() {
                        1 => "Z".to_string(),
                        n => format!("Z^{n}"),
                    }
                } else {
                    let rows = lattice
                        .basis_rows()
                        .iter()
                        .map(|row| {
                            format!(
                                "({})",
                                row.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
                            )
                        })
                        .collect::<Vec<_>>()
                        .join(", ");
                    format!("<{rows}>")
                };
                write!(f, "F({{{supp}}}, {h})")?;
                if *outside == OutsidePolicy::Free {
                    write!(f, " [outside free]")?;
                }
                Ok(())
            }
        }
    }
}

/// Closure: the smallest 2-3 subcategory containing the generators.
///
/// - no generators: the empty subcategory;
/// - a generator of positive rank: `I_k` with k the gcd of the positive
///   generator ranks (every torsion module then comes along for free);
/// - torsion generators: the family over the union support whose lattice
///   is generated by the generators' length vectors.
pub fn closure(generators: &[FGModule]) -> SubcatDescriptor {
    if generators.is_empty() {
        return SubcatDescriptor::Empty;
    }
    let positive_ranks: Vec<u64> = generators
        .iter()
        .map(FGModule::rank)
        .filter(|&r| r > 0)
        .collect();
    if !positive_ranks.is_empty() {
        let k = positive_ranks.into_iter().fold(0, crate::arith::gcd_u64);
        return SubcatDescriptor::IMod(k);
    }
    if generators.iter().all(FGModule::is_zero) {
        return SubcatDescriptor::zero_only();
    }
    let mut support: Vec<Prime> = generators
        .iter()
        .flat_map(|g| g.torsion_primes().collect::<Vec<_>>())
        .collect();
    support.sort_unstable();
    support.dedup();
    let vectors: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|g| {
            g.length_vector()
                .expect("all generators are torsion here")
                .restrict(&support)
        })
        .collect();
    let lattice = Lattice::from_generators(support, &vectors).expect("aligned vectors");
    SubcatDescriptor::torsion_family(lattice, OutsidePolicy::Forbidden).canonicalize()
}

/// The 2-3 subcategory of torsion modules over S corresponding to a
/// subgroup H of the Grothendieck group of that subcategory.
pub fn subgroup_to_subcat(lattice: Lattice) -> SubcatDescriptor {
    SubcatDescriptor::torsion_family(lattice, OutsidePolicy::Forbidden).canonicalize()
}

/// Inverse direction: reads the subgroup back off a Forbidden torsion
/// family, extended to the requested support. Errors for descriptors with
/// no corresponding subgroup (Empty, IMod, Free policy) and when the
/// descriptor's support is not contained in `support`.
pub fn subcat_to_subgroup(d: &SubcatDescriptor, support: &[Prime]) -> Result<Lattice> {
    let canon = d.canonicalize();
    match &canon {
        SubcatDescriptor::Empty => Err(Error::NoSubgroup(
            "the empty subcategory has no class group".into(),
        )),
        SubcatDescriptor::IMod(k) => Err(Error::NoSubgroup(format!(
            "I_{k} contains modules of positive rank"
        ))),
        SubcatDescriptor::TorsionF { support: s, lattice, outside } => {
            if *outside == OutsidePolicy::Free {
                return Err(Error::NoSubgroup(
                    "a free-outside family is not a subcategory of the torsion modules over S"
                        .into(),
                ));
            }
            if !s.iter().all(|p| support.contains(p)) {
                return Err(Error::SupportMismatch(format!(
                    "descriptor support {:?} not contained in {:?}",
                    s, support
                )));
            }
            let mut sorted = support.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            lattice.extend(sorted, false)
        }
    }
}

/// Two provably different 2-3 subcategories with the same image in the
/// Grothendieck group of the whole category, witnessing that the
/// subgroup correspondence breaks down over the full prime spectrum.
pub fn k0_failure_witness() -> (SubcatDescriptor, SubcatDescriptor) {
    let two = Prime::new(2).unwrap();
    let three = Prime::new(3).unwrap();
    (
        SubcatDescriptor::torsion_family(Lattice::full(vec![two]), OutsidePolicy::Forbidden),
        SubcatDescriptor::torsion_family(Lattice::full(vec![three]), OutsidePolicy::Forbidden),
    )
}

/// Class of a module in a Grothendieck group: the rank for the whole
/// category, the length vector for the torsion subcategory over a prime
/// set. Additive under direct sums.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum K0Class {
    Full(u64),
    Torsion(LengthVector),
}

impl K0Class {
    pub fn of_module_full(x: &FGModule) -> K0Class {
        K0Class::Full(x.rank())
    }

    pub fn of_module_torsion(x: &FGModule) -> Result<K0Class> {
        Ok(K0Class::Torsion(x.length_vector()?))
    }

    pub fn add(&self, other: &K0Class) -> Result<K0Class> {
        match (self, other) {
            (K0Class::Full(a), K0Class::Full(b)) => Ok(K0Class::Full(a + b)),
            (K0Class::Torsion(a), K0Class::Torsion(b)) => Ok(K0Class::Torsion(a.add(b))),
            _ => Err(Error::SupportMismatch(
                "cannot add classes from different Grothendieck groups".into(),
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON form:
//   {"kind": "empty"}
//   {"kind": "imod", "k": 2}
//   {"kind": "torsionF", "support": ["2","3"], "basis": [[2,1]],
//    "outside": "forbidden"}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum DescriptorJson {
    #[serde(rename = "empty")]
    Empty,
    #[serde(rename = "imod")]
    IMod { k: u64 },
    #[serde(rename = "torsionF")]
    TorsionF {
        support: Vec<String>,
        basis: Vec<Vec<BasisEntry>>,
        outside: OutsidePolicy,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BasisEntry {
    Int(i64),
    Str(String),
}

impl Serialize for SubcatDescriptor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match self {
            SubcatDescriptor::Empty => DescriptorJson::Empty,
            SubcatDescriptor::IMod(k) => DescriptorJson::IMod { k: *k },
            SubcatDescriptor::TorsionF { support, lattice, outside } => DescriptorJson::TorsionF {
                support: support.iter().map(|p| p.to_string()).collect(),
                basis: lattice
                    .basis_rows()
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| match i64::try_from(e.clone()) {
                                Ok(v) => BasisEntry::Int(v),
                                Err(_) => BasisEntry::Str(e.to_string()),
                            })
                            .collect()
                    })
                    .collect(),
                outside: *outside,
            },
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SubcatDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DescriptorJson::deserialize(deserializer)?;
        match raw {
            DescriptorJson::Empty => Ok(SubcatDescriptor::Empty),
            DescriptorJson::IMod { k } => {
                if k == 0 {
                    return Err(D::Error::custom(
                        "imod modulus must be >= 1 (use a free-outside torsion family for all torsion modules)",
                    ));
                }
                Ok(SubcatDescriptor::IMod(k))
            }
            DescriptorJson::TorsionF { support, basis, outside } => {
                let support: Vec<Prime> = support
                    .iter()
                    .map(|s| s.parse().map_err(D::Error::custom))
                    .collect::<std::result::Result<_, _>>()?;
                let mut sorted = support.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != support.len() {
                    return Err(D::Error::custom("support primes must be distinct"));
                }
                let rows: Vec<Vec<BigInt>> = basis
                    .into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|e| match e {
                                BasisEntry::Int(v) => Ok(BigInt::from(v)),
                                BasisEntry::Str(s) => s
                                    .trim()
                                    .parse::<BigInt>()
                                    .map_err(|_| D::Error::custom(format!("bad integer {s:?}"))),
                            })
                            .collect()
                    })
                    .collect::<std::result::Result<_, _>>()?;
                // reorder coordinates to the sorted support
                let perm: Vec<usize> = sorted
                    .iter()
                    .map(|p| support.iter().position(|q| q == p).expect("same set"))
                    .collect();
                let rows: Vec<Vec<BigInt>> = rows
                    .into_iter()
                    .map(|row| {
                        if row.len() != support.len() {
                            return Err(D::Error::custom("basis row length mismatch"));
                        }
                        Ok(perm.iter().map(|&i| row[i].clone()).collect())
                    })
                    .collect::<std::result::Result<_, _>>()?;
                let lattice =
                    Lattice::from_generators(sorted, &rows).map_err(D::Error::custom)?;
                Ok(SubcatDescriptor::torsion_family(lattice, outside))
            }
        }
    }
}

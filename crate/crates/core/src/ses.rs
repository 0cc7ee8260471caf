//! Short exact sequences of presented modules with explicit integer
//! matrices, exactness verification, and the constructive sequence
//! families behind the classification.
//!
//! Everything here is checkable: a sequence is a triple of presentations
//! plus two matrices, and [`verify_ses`] decides exactness by exact linear
//! algebra (no sequence is trusted because of how it was built).

use crate::error::{Error, Result};
use crate::fgmodule::{FGModule, Presentation, Prime};
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A map between presented modules, given on generators.
///
/// The matrix has one column per source generator, expressing its image in
/// the target generators. The map is *well-defined* when it sends source
/// relations into the span of target relations.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "MorphismJson", into = "MorphismJson")]
pub struct PresentedMorphism {
    source: Presentation,
    target: Presentation,
    matrix: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct MorphismJson {
    source: Presentation,
    target: Presentation,
    matrix: IntMatrix,
}

impl TryFrom<MorphismJson> for PresentedMorphism {
    type Error = Error;
    fn try_from(raw: MorphismJson) -> Result<Self> {
        PresentedMorphism::new(raw.source, raw.target, raw.matrix)
    }
}

impl From<PresentedMorphism> for MorphismJson {
    fn from(m: PresentedMorphism) -> Self {
        MorphismJson {
            source: m.source,
            target: m.target,
            matrix: m.matrix,
        }
    }
}

impl PresentedMorphism {
    pub fn new(source: Presentation, target: Presentation, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.generators() || matrix.cols() != source.generators() {
            return Err(Error::DimensionMismatch(format!(
                "morphism matrix {}x{} between presentations with {} and {} generators",
                matrix.rows(),
                matrix.cols(),
                source.generators(),
                target.generators()
            )));
        }
        Ok(PresentedMorphism { source, target, matrix })
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Checks that the matrix sends source relations into the column span
    /// of the target relations.
    pub fn is_well_defined(&self) -> bool {
        let image = self.matrix.mul(self.source.relations());
        self.target.relations().solve(&image).is_some()
    }

    fn require_well_defined(&self) -> Result<()> {
        if self.is_well_defined() {
            Ok(())
        } else {
            Err(Error::IllDefinedMorphism(
                "matrix does not send source relations into target relations".into(),
            ))
        }
    }

    /// Invariant form of the kernel of the induced map.
    ///
    /// Computed by lifting: the preimage lattice K = { x : M x in span of
    /// target relations } is the projection of the kernel of [M | -R_target],
    /// and the kernel module is K modulo the source relations.
    pub fn kernel(&self) -> Result<FGModule> {
        self.require_well_defined()?;
        let n = self.source.generators();
        let combined = self.matrix.hstack(&self.target.relations().negated());
        let kernel_cols = combined.kernel_basis();
        let projected: Vec<Vec<BigInt>> = kernel_cols
            .iter()
            .map(|col| col[..n].to_vec())
            .collect();
        let generators = if projected.is_empty() {
            IntMatrix::zero(0, n)
        } else {
            IntMatrix::from_rows(&projected)?
        };
        let (h, _) = generators.hermite_normal_form();
        let basis_rows: Vec<Vec<BigInt>> = h
            .row_vecs()
            .into_iter()
            .filter(|row| row.iter().any(|e| !num_traits::Zero::is_zero(e)))
            .collect();
        let t = basis_rows.len();
        let basis_t = if t == 0 {
            IntMatrix::zero(n, 0)
        } else {
            IntMatrix::from_rows(&basis_rows)?.transpose()
        };
        // source relations lie in K, so this solve is exact
        let coeffs = basis_t
            .solve(self.source.relations())
            .expect("source relations lie in the preimage lattice");
        Presentation::new(t, coeffs)?.invariant()
    }

    /// Invariant form of the cokernel: target modulo relations and image.
    pub fn cokernel(&self) -> Result<FGModule> {
        self.require_well_defined()?;
        let rel = self.target.relations().hstack(&self.matrix);
        Presentation::new(self.target.generators(), rel)?.invariant()
    }
}

/// A short exact sequence candidate `0 -> sub -> mid -> quot -> 0`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "SesJson", into = "SesJson")]
pub struct Ses {
    sub: Presentation,
    mid: Presentation,
    quot: Presentation,
    f: IntMatrix,
    g: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct SesJson {
    sub: Presentation,
    mid: Presentation,
    quot: Presentation,
    f: IntMatrix,
    g: IntMatrix,
}

impl TryFrom<SesJson> for Ses {
    type Error = Error;
    fn try_from(raw: SesJson) -> Result<Self> {
        Ses::new(raw.sub, raw.mid, raw.quot, raw.f, raw.g)
    }
}

impl From<Ses> for SesJson {
    fn from(s: Ses) -> Self {
        SesJson {
            sub: s.sub,
            mid: s.mid,
            quot: s.quot,
            f: s.f,
            g: s.g,
        }
    }
}

impl Ses {
    pub fn new(
        sub: Presentation,
        mid: Presentation,
        quot: Presentation,
        f: IntMatrix,
        g: IntMatrix,
    ) -> Result<Self> {
        if f.rows() != mid.generators() || f.cols() != sub.generators() {
            return Err(Error::DimensionMismatch(format!(
                "f is {}x{}, expected {}x{}",
                f.rows(),
                f.cols(),
                mid.generators(),
                sub.generators()
            )));
        }
        if g.rows() != quot.generators() || g.cols() != mid.generators() {
            return Err(Error::DimensionMismatch(format!(
                "g is {}x{}, expected {}x{}",
                g.rows(),
                g.cols(),
                quot.generators(),
                mid.generators()
            )));
        }
        Ok(Ses { sub, mid, quot, f, g })
    }

    pub fn sub(&self) -> &Presentation {
        &self.sub
    }

    pub fn mid(&self) -> &Presentation {
        &self.mid
    }

    pub fn quot(&self) -> &Presentation {
        &self.quot
    }

    pub fn f_morphism(&self) -> PresentedMorphism {
        PresentedMorphism::new(self.sub.clone(), self.mid.clone(), self.f.clone())
            .expect("shapes checked at construction")
    }

    pub fn g_morphism(&self) -> PresentedMorphism {
        PresentedMorphism::new(self.mid.clone(), self.quot.clone(), self.g.clone())
            .expect("shapes checked at construction")
    }

    /// Invariant forms of (sub, mid, quot).
    pub fn invariants(&self) -> Result<(FGModule, FGModule, FGModule)> {
        Ok((
            self.sub.invariant()?,
            self.mid.invariant()?,
            self.quot.invariant()?,
        ))
    }

    pub fn f_matrix(&self) -> &IntMatrix {
        &self.f
    }

    pub fn g_matrix(&self) -> &IntMatrix {
        &self.g
    }

    /// Test hook: returns a copy with one entry of f bumped, for mutation
    /// checks.
    pub fn with_f_entry_bumped(&self, r: usize, c: usize) -> Ses {
        let mut f = self.f.clone();
        let v = f.at(r, c) + BigInt::one();
        f.set(r, c, v);
        Ses { f, ..self.clone() }
    }
}

/// Outcome of exactness verification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SesVerdict {
    Verified,
    Failure(SesFailure),
}

impl SesVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, SesVerdict::Verified)
    }
}

/// First failed exactness condition.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SesFailure {
    /// f has a nonzero kernel.
    SubNotInjective,
    /// g has a nonzero cokernel.
    QuotientNotSurjective,
    /// g o f is not the zero map (so the image cannot equal the kernel).
    CompositeNonzero,
    /// The induced map mid/image(f) -> quot is not an isomorphism.
    MiddleExactness,
}

impl fmt::Display for SesFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            SesFailure::SubNotInjective => "the sub map is not injective",
            SesFailure::QuotientNotSurjective => "the quotient map is not surjective",
            SesFailure::CompositeNonzero => "the composite of the two maps is nonzero",
            SesFailure::MiddleExactness => "image of the sub map differs from the kernel of the quotient map",
        };
        write!(f, "{text}")
    }
}

impl fmt::Display for SesVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SesVerdict::Verified => write!(f, "Verified"),
            SesVerdict::Failure(reason) => write!(f, "Failure: {reason}"),
        }
    }
}

/// Decides exactness of the sequence. Ill-defined morphisms are an error,
/// distinct from a verification failure.
///
/// Exactness at the middle is decided by the induced map from
/// mid/image(f) to quot: with f injective and g surjective, the sequence
/// is exact precisely when that map is an isomorphism.
pub fn verify_ses(s: &Ses) -> Result<SesVerdict> {
    let f = s.f_morphism();
    let g = s.g_morphism();
    f.require_well_defined()?;
    g.require_well_defined()?;

    if !f.kernel()?.is_zero() {
        return Ok(SesVerdict::Failure(SesFailure::SubNotInjective));
    }
    if !g.cokernel()?.is_zero() {
        return Ok(SesVerdict::Failure(SesFailure::QuotientNotSurjective));
    }
    let coker_f = Presentation::new(
        s.mid.generators(),
        s.mid.relations().hstack(&s.f),
    )?;
    let induced = PresentedMorphism::new(coker_f, s.quot.clone(), s.g.clone())?;
    if !induced.is_well_defined() {
        return Ok(SesVerdict::Failure(SesFailure::CompositeNonzero));
    }
    if !induced.kernel()?.is_zero() || !induced.cokernel()?.is_zero() {
        return Ok(SesVerdict::Failure(SesFailure::MiddleExactness));
    }
    Ok(SesVerdict::Verified)
}

// ---------------------------------------------------------------------------
// Constructive families
// ---------------------------------------------------------------------------

fn prime_power(p: Prime, e: u64) -> BigInt {
    let mut v = BigInt::one();
    for _ in 0..e {
        v *= p.get();
    }
    v
}

fn diag_presentation(moduli: &[BigInt]) -> Presentation {
    let n = moduli.len();
    let mut rel = IntMatrix::zero(n, n);
    for (i, m) in moduli.iter().enumerate() {
        rel.set(i, i, m.clone());
    }
    Presentation::new(n, rel).expect("square relations")
}

/// The split sequence `0 -> A -> A (+) B -> B -> 0` with canonical
/// inclusion and projection.
pub fn family_split(a: &FGModule, b: &FGModule) -> Ses {
    let pa = a.to_presentation();
    let pb = b.to_presentation();
    let (na, nb) = (pa.generators(), pb.generators());
    let mid = Presentation::new(
        na + nb,
        IntMatrix::block_diag(&[pa.relations(), pb.relations()]),
    )
    .expect("block shapes agree");
    let f = IntMatrix::identity(na).vstack(&IntMatrix::zero(nb, na));
    let g = IntMatrix::zero(nb, na).hstack(&IntMatrix::identity(nb));
    Ses::new(pa, mid, pb, f, g).expect("shapes by construction")
}

/// `0 -> M -> M -> Z/p^t -> 0` where the map multiplies one free
/// coordinate of M by p^t and is the identity elsewhere. Requires
/// rank(M) >= 1.
pub fn family_mult_cyclic(m: &FGModule, p: Prime, t: u64) -> Result<Ses> {
    if m.rank() == 0 {
        return Err(Error::BadFamilyParameter(
            "multiplication family needs a module of positive rank".into(),
        ));
    }
    if t == 0 {
        return Err(Error::BadFamilyParameter("exponent must be positive".into()));
    }
    let pm = m.to_presentation();
    let n = pm.generators();
    let mut f = IntMatrix::identity(n);
    f.set(0, 0, prime_power(p, t)); // free generators come first
    let quot = diag_presentation(&[prime_power(p, t)]);
    let mut g = IntMatrix::zero(1, n);
    g.set(0, 0, BigInt::one());
    Ses::new(pm.clone(), pm, quot, f, g)
}

/// `0 -> Tor(M) -> M -> M/Tor(M) -> 0`.
pub fn family_torsion_strip(m: &FGModule) -> Ses {
    let torsion = m.torsion_part();
    let pt = torsion.to_presentation();
    let pm = m.to_presentation();
    let k = m.rank() as usize;
    let nt = pt.generators();
    let f = IntMatrix::zero(k, nt).vstack(&IntMatrix::identity(nt));
    let g = IntMatrix::identity(k).hstack(&IntMatrix::zero(k, nt));
    Ses::new(pt, pm, Presentation::free(k), f, g).expect("shapes by construction")
}

/// Pads a sequence with `0 -> G -> G (+) G -> G -> 0` (diagonal and
/// difference maps), yielding `0 -> A+G -> B+G+G -> C+G -> 0`.
pub(crate) fn pad_with(core: &Ses, g_mod: &FGModule) -> Ses {
    let pg = g_mod.to_presentation();
    let ng = pg.generators();
    if ng == 0 {
        return core.clone();
    }
    let (na, nb, nc) = (
        core.sub.generators(),
        core.mid.generators(),
        core.quot.generators(),
    );
    let sub = Presentation::new(
        na + ng,
        IntMatrix::block_diag(&[core.sub.relations(), pg.relations()]),
    )
    .expect("block shapes agree");
    let mid = Presentation::new(
        nb + 2 * ng,
        IntMatrix::block_diag(&[core.mid.relations(), pg.relations(), pg.relations()]),
    )
    .expect("block shapes agree");
    let quot = Presentation::new(
        nc + ng,
        IntMatrix::block_diag(&[core.quot.relations(), pg.relations()]),
    )
    .expect("block shapes agree");

    let mut f = IntMatrix::zero(nb + 2 * ng, na + ng);
    f.set_block(0, 0, &core.f);
    f.set_block(nb, na, &IntMatrix::identity(ng));
    f.set_block(nb + ng, na, &IntMatrix::identity(ng));

    let mut g = IntMatrix::zero(nc + ng, nb + 2 * ng);
    g.set_block(0, 0, &core.g);
    g.set_block(nc, nb, &IntMatrix::identity(ng));
    g.set_block(nc, nb + ng, &IntMatrix::identity(ng).negated());

    Ses::new(sub, mid, quot, f, g).expect("shapes by construction")
}

fn step1_cores(p: Prime, r: u64) -> (Ses, Ses) {
    let sub = diag_presentation(&[prime_power(p, r)]);
    let mid = diag_presentation(&[prime_power(p, r - 1), prime_power(p, r + 1)]);

    // 0 -> Z/p^r -> Z/p^{r-1} (+) Z/p^{r+1} -> Z/p^r -> 0
    let f1 = IntMatrix::from_rows(&[vec![BigInt::one()], vec![BigInt::from(p.get())]])
        .expect("rows agree");
    let g1 = IntMatrix::from_rows(&[vec![-BigInt::from(p.get()), BigInt::one()]])
        .expect("rows agree");
    let first = Ses::new(sub.clone(), mid.clone(), diag_presentation(&[prime_power(p, r)]), f1, g1)
        .expect("shapes by construction");

    // 0 -> Z/p^r -> Z/p^{r-1} (+) Z/p^{r+1} -> Z/p^{r-1} (+) Z/p -> 0
    let f2 = IntMatrix::from_rows(&[vec![BigInt::from(0)], vec![BigInt::from(p.get())]])
        .expect("rows agree");
    let g2 = IntMatrix::identity(2);
    let quot2 = diag_presentation(&[prime_power(p, r - 1), prime_power(p, 1)]);
    let second = Ses::new(sub, mid, quot2, f2, g2).expect("shapes by construction");
    (first, second)
}

fn step2_cores(p: Prime, r: u64) -> (Ses, Ses) {
    let pv = BigInt::from(p.get());
    let sub = diag_presentation(&[prime_power(p, 1), prime_power(p, r)]);
    let mid = diag_presentation(&[
        prime_power(p, 1),
        prime_power(p, r + 1),
        prime_power(p, r),
    ]);

    // 0 -> Z/p (+) Z/p^r -> Z/p (+) Z/p^{r+1} (+) Z/p^r -> Z/p (+) Z/p^r -> 0
    let f1 = IntMatrix::from_rows(&[
        vec![BigInt::from(0), BigInt::from(0)],
        vec![prime_power(p, r), BigInt::from(0)],
        vec![BigInt::from(0), BigInt::one()],
    ])
    .expect("rows agree");
    let g1 = IntMatrix::from_rows(&[
        vec![BigInt::one(), BigInt::from(0), BigInt::from(0)],
        vec![BigInt::from(0), BigInt::one(), BigInt::from(0)],
    ])
    .expect("rows agree");
    let quot1 = diag_presentation(&[prime_power(p, 1), prime_power(p, r)]);
    let first = Ses::new(sub.clone(), mid.clone(), quot1, f1, g1).expect("shapes by construction");

    // 0 -> Z/p (+) Z/p^r -> Z/p (+) Z/p^{r+1} (+) Z/p^r -> Z/p^{r+1} -> 0
    let f2 = IntMatrix::from_rows(&[
        vec![BigInt::one(), BigInt::from(0)],
        vec![-prime_power(p, r), -pv.clone()],
        vec![BigInt::from(0), BigInt::one()],
    ])
    .expect("rows agree");
    let g2 = IntMatrix::from_rows(&[vec![prime_power(p, r), BigInt::one(), pv]])
        .expect("rows agree");
    let quot2 = diag_presentation(&[prime_power(p, r + 1)]);
    let second = Ses::new(sub, mid, quot2, f2, g2).expect("shapes by construction");
    (first, second)
}

fn require_p_torsion(g: &FGModule, p: Prime) -> Result<()> {
    if g.is_p_torsion(p) {
        Ok(())
    } else {
        Err(Error::BadFamilyParameter(format!(
            "padding module must be {p}-torsion, got {g}"
        )))
    }
}

/// The exponent-lowering pair: both sequences share sub `Z/p^r (+) G` and
/// middle `Z/p^{r-1} (+) Z/p^{r+1} (+) G (+) G`; the first has quotient
/// equal to the sub, the second has quotient `Z/p^{r-1} (+) Z/p (+) G`.
/// Requires r >= 2 and G p-torsion.
pub fn family_step1(p: Prime, r: u64, g: &FGModule) -> Result<(Ses, Ses)> {
    if r < 2 {
        return Err(Error::BadFamilyParameter(
            "exponent lowering needs r >= 2".into(),
        ));
    }
    require_p_torsion(g, p)?;
    let (first, second) = step1_cores(p, r);
    Ok((pad_with(&first, g), pad_with(&second, g)))
}

/// The exponent-raising pair: both sequences share sub
/// `Z/p (+) Z/p^r (+) G` and middle `Z/p (+) Z/p^{r+1} (+) Z/p^r (+) G (+) G`;
/// the first has quotient equal to the sub, the second has quotient
/// `Z/p^{r+1} (+) G`. Requires r >= 1 and G p-torsion.
pub fn family_step2(p: Prime, r: u64, g: &FGModule) -> Result<(Ses, Ses)> {
    if r < 1 {
        return Err(Error::BadFamilyParameter(
            "exponent raising needs r >= 1".into(),
        ));
    }
    require_p_torsion(g, p)?;
    let (first, second) = step2_cores(p, r);
    Ok((pad_with(&first, g), pad_with(&second, g)))
}

/// Step-1 pair padded with an arbitrary torsion module; the witness engine
/// uses this for generators with torsion at several primes.
pub(crate) fn padded_step1(p: Prime, r: u64, g: &FGModule) -> Result<(Ses, Ses)> {
    if r < 2 {
        return Err(Error::BadFamilyParameter(
            "exponent lowering needs r >= 2".into(),
        ));
    }
    if !g.is_torsion() {
        return Err(Error::BadFamilyParameter("padding module must be torsion".into()));
    }
    let (first, second) = step1_cores(p, r);
    Ok((pad_with(&first, g), pad_with(&second, g)))
}

/// Step-2 pair padded with an arbitrary torsion module.
pub(crate) fn padded_step2(p: Prime, r: u64, g: &FGModule) -> Result<(Ses, Ses)> {
    if r < 1 {
        return Err(Error::BadFamilyParameter(
            "exponent raising needs r >= 1".into(),
        ));
    }
    if !g.is_torsion() {
        return Err(Error::BadFamilyParameter("padding module must be torsion".into()));
    }
    let (first, second) = step2_cores(p, r);
    Ok((pad_with(&first, g), pad_with(&second, g)))
}

/// The identity-based sequence `0 -> 0 -> M -> M -> 0`.
pub(crate) fn identity_ses(m: &FGModule) -> Ses {
    let pm = m.to_presentation();
    let n = pm.generators();
    Ses::new(
        Presentation::new(0, IntMatrix::zero(0, 0)).expect("empty"),
        pm.clone(),
        pm,
        IntMatrix::zero(n, 0),
        IntMatrix::identity(n),
    )
    .expect("shapes by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgmodule::Chi;

    fn parse(s: &str) -> FGModule {
        FGModule::parse(s).unwrap()
    }

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn morphism(src: &str, tgt: &str, mat: &[Vec<i64>]) -> PresentedMorphism {
        PresentedMorphism::new(
            parse(src).to_presentation(),
            parse(tgt).to_presentation(),
            IntMatrix::from_rows(mat).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn kernel_examples() {
        let id = morphism("Z^2", "Z^2", &[vec![1, 0], vec![0, 1]]);
        assert!(id.kernel().unwrap().is_zero());

        let proj = morphism("Z^2", "Z^2", &[vec![1, 0], vec![0, 0]]);
        assert_eq!(proj.kernel().unwrap(), parse("Z"));

        let mult4 = morphism("Z/2", "Z/2", &[vec![4]]);
        assert_eq!(mult4.kernel().unwrap(), parse("Z/2"));
    }

    #[test]
    fn cokernel_examples() {
        let mult4 = morphism("Z", "Z", &[vec![4]]);
        assert_eq!(mult4.cokernel().unwrap(), parse("Z/4"));

        // canonical presentation of Z/6 is the CRT split with 2 generators
        let id = morphism("Z/6", "Z/6", &[vec![1, 0], vec![0, 1]]);
        assert!(id.cokernel().unwrap().is_zero());

        let zero = morphism("Z", "Z/2", &[vec![0]]);
        assert_eq!(zero.cokernel().unwrap(), parse("Z/2"));
    }

    #[test]
    fn ill_defined_morphism_is_an_error() {
        // Z/2 -> Z/4 sending the generator to a generator: 2*1 = 2 is not a
        // relation of Z/4
        let bad = PresentedMorphism::new(
            parse("Z/2").to_presentation(),
            parse("Z/4").to_presentation(),
            IntMatrix::from_rows(&[vec![1]]).unwrap(),
        )
        .unwrap();
        assert!(!bad.is_well_defined());
        assert!(matches!(bad.kernel(), Err(Error::IllDefinedMorphism(_))));
        assert!(matches!(bad.cokernel(), Err(Error::IllDefinedMorphism(_))));
        // but Z/2 -> Z/4 by multiplication by 2 is fine
        let good = morphism("Z/2", "Z/4", &[vec![2]]);
        assert!(good.is_well_defined());
        assert!(good.kernel().unwrap().is_zero());
    }

    #[test]
    fn verify_split_and_mult() {
        let s = family_split(&parse("Z/2"), &parse("Z/3"));
        assert!(verify_ses(&s).unwrap().is_verified());

        // 0 -> Z -(x4)-> Z -> Z/4 -> 0
        let s = family_mult_cyclic(&parse("Z"), p(2), 2).unwrap();
        assert!(verify_ses(&s).unwrap().is_verified());
        assert_eq!(s.quot().invariant().unwrap(), parse("Z/4"));

        // 0 -> Z -(x2)-> Z -> Z/4 -> 0 must fail
        let bad = Ses::new(
            Presentation::free(1),
            Presentation::free(1),
            parse("Z/4").to_presentation(),
            IntMatrix::from_rows(&[vec![2]]).unwrap(),
            IntMatrix::from_rows(&[vec![1]]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            verify_ses(&bad).unwrap(),
            SesVerdict::Failure(SesFailure::CompositeNonzero)
        );

        // 0 -> Z -(x4)-> Z -> Z/2 -> 0 fails exactness in the middle
        let bad = Ses::new(
            Presentation::free(1),
            Presentation::free(1),
            parse("Z/2").to_presentation(),
            IntMatrix::from_rows(&[vec![4]]).unwrap(),
            IntMatrix::from_rows(&[vec![1]]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            verify_ses(&bad).unwrap(),
            SesVerdict::Failure(SesFailure::MiddleExactness)
        );
    }

    #[test]
    fn verify_detects_non_injective_and_non_surjective() {
        // f = 0 from Z/2: not injective
        let bad = Ses::new(
            parse("Z/2").to_presentation(),
            parse("Z/2").to_presentation(),
            parse("Z/2").to_presentation(),
            IntMatrix::from_rows(&[vec![0]]).unwrap(),
            IntMatrix::from_rows(&[vec![1]]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            verify_ses(&bad).unwrap(),
            SesVerdict::Failure(SesFailure::SubNotInjective)
        );

        // g = multiplication by 2 into Z/4: not surjective
        let bad = Ses::new(
            Presentation::new(0, IntMatrix::zero(0, 0)).unwrap(),
            parse("Z/2").to_presentation(),
            parse("Z/4").to_presentation(),
            IntMatrix::zero(1, 0),
            IntMatrix::from_rows(&[vec![2]]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            verify_ses(&bad).unwrap(),
            SesVerdict::Failure(SesFailure::QuotientNotSurjective)
        );
    }

    #[test]
    fn split_family_edge_cases() {
        let s = family_split(&FGModule::zero(), &parse("Z + Z/4"));
        assert!(verify_ses(&s).unwrap().is_verified());
        assert_eq!(s.mid().invariant().unwrap(), parse("Z + Z/4"));

        let s = family_split(&parse("Z"), &parse("Z"));
        assert!(verify_ses(&s).unwrap().is_verified());
        assert_eq!(s.mid().invariant().unwrap(), parse("Z^2"));
    }

    #[test]
    fn mult_cyclic_examples() {
        let s = family_mult_cyclic(&parse("Z + Z/3"), p(2), 1).unwrap();
        assert!(verify_ses(&s).unwrap().is_verified());
        assert_eq!(s.quot().invariant().unwrap(), parse("Z/2"));
        assert_eq!(s.sub().invariant().unwrap(), parse("Z + Z/3"));
        assert_eq!(s.mid().invariant().unwrap(), parse("Z + Z/3"));

        let s = family_mult_cyclic(&parse("Z^2"), p(3), 2).unwrap();
        assert!(verify_ses(&s).unwrap().is_verified());
        assert_eq!(s.quot().invariant().unwrap(), parse("Z/9"));

        assert!(family_mult_cyclic(&parse("Z/2"), p(2), 1).is_err());
    }

    #[test]
    fn torsion_strip_examples() {
        let s = family_torsion_strip(&parse("Z + Z/2"));
        assert!(verify_ses(&s).unwrap().is_verified());
        assert_eq!(s.sub().invariant().unwrap(), parse("Z/2"));
        assert_eq!(s.quot().invariant().unwrap(), parse("Z"));

        let s = family_torsion_strip(&parse("Z/4 + Z/9"));
        assert!(verify_ses(&s).unwrap().is_verified());
        assert!(s.quot().invariant().unwrap().is_zero());

        let s = family_torsion_strip(&parse("Z^3"));
        assert!(verify_ses(&s).unwrap().is_verified());
        assert!(s.sub().invariant().unwrap().is_zero());
    }

    #[test]
    fn step1_examples() {
        let (s1, s2) = family_step1(p(2), 2, &FGModule::zero()).unwrap();
        assert!(verify_ses(&s1).unwrap().is_verified());
        assert!(verify_ses(&s2).unwrap().is_verified());
        assert_eq!(s1.mid().invariant().unwrap(), parse("Z/2 + Z/8"));
        assert_eq!(s1.quot().invariant().unwrap(), parse("Z/4"));
        assert_eq!(s2.quot().invariant().unwrap(), parse("Z/2 + Z/2"));

        let (s1, s2) = family_step1(p(2), 3, &parse("Z/2")).unwrap();
        assert!(verify_ses(&s1).unwrap().is_verified());
        assert!(verify_ses(&s2).unwrap().is_verified());
        assert_eq!(s1.sub().invariant().unwrap(), parse("Z/8 + Z/2"));
        assert_eq!(s2.quot().invariant().unwrap(), parse("Z/4 + Z/2 + Z/2"));

        let (s1, _) = family_step1(p(3), 2, &FGModule::zero()).unwrap();
        assert_eq!(s1.mid().invariant().unwrap(), parse("Z/3 + Z/27"));

        assert!(family_step1(p(2), 1, &FGModule::zero()).is_err());
        assert!(family_step1(p(2), 2, &parse("Z/3")).is_err());
        assert!(family_step1(p(2), 2, &parse("Z")).is_err());
    }

    #[test]
    fn step2_examples() {
        // merges Z/2 (+) Z/2 into Z/4
        let (s1, s2) = family_step2(p(2), 1, &FGModule::zero()).unwrap();
        assert!(verify_ses(&s1).unwrap().is_verified());
        assert!(verify_ses(&s2).unwrap().is_verified());
        assert_eq!(s1.sub().invariant().unwrap(), parse("Z/2 + Z/2"));
        assert_eq!(s2.quot().invariant().unwrap(), parse("Z/4"));

        let (_, s2) = family_step2(p(2), 2, &parse("Z/2")).unwrap();
        assert!(verify_ses(&s2).unwrap().is_verified());
        assert_eq!(s2.quot().invariant().unwrap(), parse("Z/8 + Z/2"));

        let (_, s2) = family_step2(p(5), 1, &FGModule::zero()).unwrap();
        assert!(verify_ses(&s2).unwrap().is_verified());
        assert_eq!(s2.quot().invariant().unwrap(), parse("Z/25"));

        assert!(family_step2(p(2), 0, &FGModule::zero()).is_err());
        assert!(family_step2(p(2), 1, &parse("Z/3")).is_err());
    }

    #[test]
    fn chi_additivity_on_families() {
        let sequences = vec![
            family_split(&parse("Z/4 + Z/3"), &parse("Z + Z/2")),
            family_mult_cyclic(&parse("Z + Z/9"), p(2), 3).unwrap(),
            family_torsion_strip(&parse("Z^2 + Z/8 + Z/3")),
            family_step1(p(2), 3, &parse("Z/4")).unwrap().0,
            family_step2(p(3), 2, &parse("Z/3")).unwrap().1,
        ];
        for s in sequences {
            assert!(verify_ses(&s).unwrap().is_verified());
            let (a, b, c) = s.invariants().unwrap();
            assert_eq!(b.rank(), a.rank() + c.rank());
            for q in [p(2), p(3), p(5)] {
                let sum = a.chi(q) + c.chi(q);
                match (b.chi(q), sum) {
                    (Chi::Infinite, Chi::Infinite) => {}
                    (x, y) => assert_eq!(x, y, "prime {q} in {a} >-> {b} ->> {c}"),
                }
            }
        }
    }

    #[test]
    fn identity_ses_verifies() {
        let s = identity_ses(&parse("Z + Z/6"));
        assert!(verify_ses(&s).unwrap().is_verified());
        assert!(s.sub().invariant().unwrap().is_zero());
    }

    #[test]
    fn padded_general_torsion() {
        let (s1, s2) = padded_step1(p(2), 2, &parse("Z/3")).unwrap();
        assert!(verify_ses(&s1).unwrap().is_verified());
        assert!(verify_ses(&s2).unwrap().is_verified());
        assert_eq!(s1.sub().invariant().unwrap(), parse("Z/4 + Z/3"));
        assert_eq!(s2.quot().invariant().unwrap(), parse("Z/2 + Z/2 + Z/3"));

        let (_, s2) = padded_step2(p(2), 1, &parse("Z/9")).unwrap();
        assert!(verify_ses(&s2).unwrap().is_verified());
        assert_eq!(s2.quot().invariant().unwrap(), parse("Z/4 + Z/9"));
    }

    #[test]
    fn json_round_trip() {
        let s = family_step2(p(2), 1, &parse("Z/2")).unwrap().1;
        let text = serde_json::to_string(&s).unwrap();
        let back: Ses = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
        assert!(verify_ses(&back).unwrap().is_verified());
    }

    #[test]
    fn mutation_breaks_verification() {
        let s = family_mult_cyclic(&parse("Z"), p(2), 2).unwrap();
        let bumped = s.with_f_entry_bumped(0, 0);
        let verdict = verify_ses(&bumped);
        assert!(matches!(verdict, Ok(SesVerdict::Failure(_)) | Err(_)));
    }
}

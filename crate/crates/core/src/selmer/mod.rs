//! The 2-Selmer group `S(k) = V(k)/(k*)^2` and the parametrization of
//! quadratic extensions `K/k` by pairs `(a, u)`.
//!
//! A pair of a squarefree ideal `a` with square class and a Selmer class `u`
//! gives `K = k(sqrt(alpha0 u))` where `a q^2 = (alpha0)`, `(q, 2) = 1`.
//! Its relative discriminant is `4a/c^2` with `c = c(a, u)` the conductor ideal.

pub mod local;

pub use local::{LocalTwo, Res4, Ring4, TwoDivisor};

use crate::classgroup::{principal_generator, ClassGroup};
use crate::quadfield::{fundamental_unit, is_square_in_k, FieldElement, QuadField, QuadIdeal};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use std::fmt;
use std::str::FromStr;

/// Galois group of the normal closure of a quartic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GaloisType {
    C4,
    V4,
    D4,
}

impl fmt::Display for GaloisType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GaloisType::C4 => "C4",
            GaloisType::V4 => "V4",
            GaloisType::D4 => "D4",
        })
    }
}

impl FromStr for GaloisType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "C4" => Ok(GaloisType::C4),
            "V4" => Ok(GaloisType::V4),
            "D4" => Ok(GaloisType::D4),
            other => Err(Error::InvalidArgument(format!("unknown Galois type {other:?}"))),
        }
    }
}

/// Galois type of `k(sqrt(delta))` from the rational norm of `delta`.
pub fn galois_type_from_norm(disc: i64, norm: &BigRational) -> GaloisType {
    if is_rational_square(norm) {
        GaloisType::V4
    } else if is_rational_square(&(norm * BigRational::from_integer(disc.into()))) {
        GaloisType::C4
    } else {
        GaloisType::D4
    }
}

fn is_rational_square(q: &BigRational) -> bool {
    if !q.is_positive() {
        return false;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    &rn * &rn == *n && &rd * &rd == *d
}

/// A Selmer class, as a bit vector over the group basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SelmerElement(pub u32);

impl SelmerElement {
    pub fn is_trivial(&self) -> bool {
        self.0 == 0
    }
}

/// `S(k)` with a basis of representatives prime to 2: the units modulo
/// squares, then generators of `Gamma^{n_i e_i}` for each even invariant.
#[derive(Clone, Debug)]
pub struct SelmerGroup {
    field: QuadField,
    basis: Vec<FieldElement>,
    unit_rank: usize,
}

impl SelmerGroup {
    pub fn new(cg: &ClassGroup) -> Self {
        let field = *cg.field();
        let d = field.disc();
        let mut basis = Vec::new();
        if d == -4 {
            basis.push(FieldElement::from_ints(d, 2, 1));
        } else {
            basis.push(FieldElement::integer(d, -1));
        }
        if d > 0 {
            basis.push(fundamental_unit(&field).expect("real field").unit);
        }
        let unit_rank = basis.len();
        let grp = cg.group();
        for (n, rel) in grp.invariants().iter().zip(grp.smith_relations()) {
            if n % 2 == 0 {
                basis.push(cg.relation_generator(&rel));
            }
        }
        SelmerGroup { field, basis, unit_rank }
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    /// Number of unit basis vectors, `r1 + r2`.
    pub fn unit_rank(&self) -> usize {
        self.unit_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn order(&self) -> u64 {
        1 << self.basis.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = SelmerElement> {
        (0..self.order() as u32).map(SelmerElement)
    }

    /// The representative `prod basis_i^{bit_i}`.
    pub fn element(&self, u: SelmerElement) -> FieldElement {
        let mut acc = FieldElement::one(self.field.disc());
        for (i, b) in self.basis.iter().enumerate() {
            if u.0 >> i & 1 == 1 {
                acc = &acc * b;
            }
        }
        acc
    }

    /// The class of `x` when `x` lies in `V(k)`.
    pub fn class_of(&self, x: &FieldElement) -> Option<SelmerElement> {
        self.elements().find(|&u| is_square_in_k(&self.field, &(x * &self.element(u))))
    }
}

/// Everything attached to a pair `(a, u)`.
#[derive(Clone, Debug)]
pub struct ExtensionDescriptor {
    pub disc: i64,
    pub a: QuadIdeal,
    pub u: SelmerElement,
    pub alpha0: FieldElement,
    pub c: QuadIdeal,
    pub rel_disc: QuadIdeal,
    pub rel_disc_norm: u64,
    pub abs_disc: u64,
    pub galois_type: GaloisType,
}

impl ExtensionDescriptor {
    pub fn is_trivial(&self) -> bool {
        self.a.is_unit() && self.u.is_trivial()
    }
}

/// The parametrization data of one field.
#[derive(Clone, Debug)]
pub struct Parametrization {
    field: QuadField,
    cg: ClassGroup,
    selmer: SelmerGroup,
    local: LocalTwo,
}

impl Parametrization {
    pub fn new(field: &QuadField) -> Self {
        let cg = ClassGroup::wide(field);
        let selmer = SelmerGroup::new(&cg);
        Parametrization { field: *field, cg, selmer, local: LocalTwo::new(field) }
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn class_group(&self) -> &ClassGroup {
        &self.cg
    }

    pub fn selmer(&self) -> &SelmerGroup {
        &self.selmer
    }

    pub fn local(&self) -> &LocalTwo {
        &self.local
    }

    /// `(alpha0, q)` with `a q^2 = (alpha0)` and `q` integral and prime to 2.
    pub fn alpha0_for(&self, a: &QuadIdeal) -> Result<(FieldElement, QuadIdeal)> {
        let d = self.field.disc();
        let grp = self.cg.group();
        let y = self.cg.ideal_class(a);
        if !grp.is_square(&y) {
            return Err(Error::NotASquareClass);
        }
        let z: Vec<i64> = y
            .iter()
            .zip(grp.invariants())
            .map(|(&yi, &n)| if n % 2 == 0 { yi / 2 } else { (yi * (n + 1) / 2).rem_euclid(n) })
            .collect();
        // q = Gamma^{-z} scaled by m to be integral
        let e: Vec<i64> = grp.exponents(&z).iter().map(|x| -x).collect();
        let mut q = self.field.unit_ideal();
        let mut m = BigInt::one();
        for (p, &ej) in self.cg.generator_primes().iter().zip(&e) {
            if ej >= 0 {
                q = q.mul(&p.ideal().pow(ej as u32));
            } else {
                q = q.mul(&p.conj().ideal().pow((-ej) as u32));
                m *= BigInt::from(p.norm()).pow((-ej) as u32);
            }
        }
        let target = a.mul(&q).mul(&q);
        if target.is_unit() {
            return Ok((FieldElement::one(d), q));
        }
        // a Gamma^{-2z} = mu * r, then alpha0 = m^2 * mu * gen(r)
        let two_e: Vec<i64> = e.iter().map(|x| 2 * x).collect();
        let (mu, r) = self.cg.exponent_ideal(&two_e);
        let ar = a.mul(&r);
        let (lam, ar2) = crate::classgroup::reduce_ideal(&ar);
        let g = principal_generator(&ar2).ok_or_else(|| Error::Invariant("a q^2 is not principal".into()))?;
        let m2 = BigRational::from_integer(&m * &m);
        let alpha0 = (&(&mu * &lam) * &g).scale(&m2);
        debug_assert_eq!(QuadIdeal::from_element(&alpha0), target);
        Ok((alpha0, q))
    }

    /// The Kummer generator `delta = alpha0 u`.
    pub fn kummer_generator(&self, a: &QuadIdeal, u: SelmerElement) -> Result<FieldElement> {
        let (alpha0, _) = self.alpha0_for(a)?;
        Ok(&alpha0 * &self.selmer.element(u))
    }

    fn conductor_of(&self, a: &QuadIdeal, delta: &FieldElement) -> &TwoDivisor {
        let r = Ring4::residue(delta).expect("Kummer generator is not 2-integral");
        let mask = self.local.mask_of(a);
        &self.local.divisors[self.local.conductor_index(mask, r)]
    }

    /// The largest `c | 2` prime to `a` with `alpha0 u` a unit square mod `c^2`.
    pub fn conductor_ideal(&self, a: &QuadIdeal, u: SelmerElement) -> Result<QuadIdeal> {
        let delta = self.kummer_generator(a, u)?;
        Ok(self.conductor_of(a, &delta).ideal.clone())
    }

    /// `4a / c^2`.
    pub fn relative_discriminant(&self, a: &QuadIdeal, u: SelmerElement) -> Result<QuadIdeal> {
        let c = self.conductor_ideal(a, u)?;
        Ok(rel_disc_of(&self.field, a, &c))
    }

    pub fn classify_galois(&self, a: &QuadIdeal, u: SelmerElement) -> Result<GaloisType> {
        let delta = self.kummer_generator(a, u)?;
        Ok(galois_type_from_norm(self.field.disc(), &delta.norm()))
    }

    pub fn describe(&self, a: &QuadIdeal, u: SelmerElement) -> Result<ExtensionDescriptor> {
        let d = self.field.disc();
        let (alpha0, _) = self.alpha0_for(a)?;
        let delta = &alpha0 * &self.selmer.element(u);
        let c = self.conductor_of(a, &delta).ideal.clone();
        let rel_disc = rel_disc_of(&self.field, a, &c);
        let rel_disc_norm = rel_disc.norm();
        Ok(ExtensionDescriptor {
            disc: d,
            a: a.clone(),
            u,
            alpha0,
            galois_type: galois_type_from_norm(d, &delta.norm()),
            c,
            rel_disc,
            rel_disc_norm,
            abs_disc: rel_disc_norm * (d * d) as u64,
        })
    }
}

fn rel_disc_of(field: &QuadField, a: &QuadIdeal, c: &QuadIdeal) -> QuadIdeal {
    let four_a = a.mul(&QuadIdeal::from_element(&field.element(4, 0)));
    c.mul(c).divide_into(&four_a).expect("c^2 does not divide 4a")
}

pub fn selmer_group(k: &QuadField) -> SelmerGroup {
    SelmerGroup::new(&ClassGroup::wide(k))
}

#[cfg(test)]
mod tests;

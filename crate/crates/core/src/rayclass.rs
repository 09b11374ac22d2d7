//! Ray class groups `Cl_{d^2}(k)` for `d | 2`, with a finite modulus only.
//!
//! The group is presented on the Smith generators `G_i` of the class group
//! and generators of `(O/d^2)*`. A prime `p = theta * prod G_i^{y_i}` has
//! ray coordinates `(y, dlog(theta))`.

use crate::classgroup::abelian::{self, AbelianGroup};
use crate::classgroup::{ClassGroup, Decomposer};
use crate::quadfield::{fundamental_unit, FieldElement, QuadField, QuadIdeal};
use crate::selmer::local::reduce_key;
use crate::selmer::{Res4, Ring4};
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::Arc;

/// Generators of the unit group: a root of unity, then `epsilon` if real.
pub fn unit_generators(k: &QuadField) -> Vec<FieldElement> {
    let d = k.disc();
    let mut out = vec![match d {
        -4 => FieldElement::from_ints(d, 2, 1),
        -3 => FieldElement::from_ints(d, 2, 1),
        _ => FieldElement::integer(d, -1),
    }];
    if d > 0 {
        out.push(fundamental_unit(k).expect("real field").unit);
    }
    out
}

/// The unit group of `O/m` for `m | 4`, on residues modulo 4.
#[derive(Clone, Debug)]
pub struct ResidueUnits {
    ring: Ring4,
    /// Reduction `O/4 -> O/m` as canonical keys.
    key: [u8; 16],
    unit: [bool; 16],
    /// Exponent vector of each unit key over `gens`.
    table: HashMap<u8, Vec<i64>>,
    gens: Vec<Res4>,
    relations: Vec<Vec<i64>>,
    order: usize,
}

impl ResidueUnits {
    pub fn new(disc: i64, m: &QuadIdeal) -> Self {
        let ring = Ring4::new(disc);
        let mut key = [0u8; 16];
        for (r, kk) in key.iter_mut().enumerate() {
            *kk = reduce_key(m, r as u8);
        }
        let one = key[1];
        let mut unit = [false; 16];
        for (r, u) in unit.iter_mut().enumerate() {
            *u = (0..16u8).any(|s| key[ring.mul(r as u8, s) as usize] == one);
        }
        let mut rep: HashMap<u8, Res4> = HashMap::new();
        for r in (0..16u8).rev() {
            if unit[r as usize] {
                rep.insert(key[r as usize], r);
            }
        }
        let order = rep.len();
        let cands: Vec<u8> = (0..16u8).filter(|&r| unit[r as usize]).map(|r| key[r as usize]).collect();
        let gen = abelian::generate(one, cands.iter().copied(), order, |x, y| key[ring.mul(rep[x], rep[y]) as usize]);
        let gens = gen.chosen.iter().map(|&i| rep[&cands[i]]).collect();
        ResidueUnits { ring, key, unit, table: gen.table, gens, relations: gen.relations, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn ring(&self) -> &Ring4 {
        &self.ring
    }

    pub fn is_unit(&self, r: Res4) -> bool {
        self.unit[r as usize]
    }

    pub fn key(&self, r: Res4) -> u8 {
        self.key[r as usize]
    }

    pub fn relations(&self) -> &[Vec<i64>] {
        &self.relations
    }

    /// Exponents of a unit residue over the generators.
    pub fn dlog(&self, r: Res4) -> Option<Vec<i64>> {
        if !self.unit[r as usize] {
            return None;
        }
        Some(self.table[&self.key[r as usize]].clone())
    }

    pub fn dlog_element(&self, x: &FieldElement) -> Option<Vec<i64>> {
        self.dlog(Ring4::residue(x)?)
    }

    /// All unit residues, one per class modulo `m`.
    pub fn representatives(&self) -> Vec<Res4> {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for r in 0..16u8 {
            if self.unit[r as usize] && !seen.contains(&self.key[r as usize]) {
                seen.push(self.key[r as usize]);
                out.push(r);
            }
        }
        out
    }
}

/// `Cl_m(k)` for `m = d^2`, `d | 2`, no infinite places.
#[derive(Clone, Debug)]
pub struct RayClassGroup {
    field: QuadField,
    d: QuadIdeal,
    modulus: QuadIdeal,
    decomposer: Arc<Decomposer>,
    units: ResidueUnits,
    class_rank: usize,
    group: AbelianGroup,
}

impl RayClassGroup {
    pub fn new(decomposer: Arc<Decomposer>, d: &QuadIdeal) -> Result<Self> {
        let cg = decomposer.class_group();
        let field = *cg.field();
        let two = QuadIdeal::from_element(&field.element(2, 0));
        if !d.divides(&two) {
            return Err(Error::InvalidArgument(format!("{d:?} does not divide 2")));
        }
        let modulus = d.mul(d);
        let units = ResidueUnits::new(field.disc(), &modulus);
        let cgroup = cg.group();
        let r = cgroup.rank();
        let t = units.ngens();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (i, (n, rel)) in cgroup.invariants().iter().zip(cgroup.smith_relations()).enumerate() {
            let rho = cg.relation_generator(&rel);
            let mut row = vec![0i64; r + t];
            row[i] = *n;
            let dl = units.dlog_element(&rho).ok_or_else(|| Error::Invariant("relation generator meets 2".into()))?;
            for (j, x) in dl.iter().enumerate() {
                row[r + j] = -x;
            }
            rows.push(row);
        }
        for u in unit_generators(&field) {
            let mut row = vec![0i64; r];
            row.extend(units.dlog_element(&u).expect("units are 2-units"));
            rows.push(row);
        }
        for rel in units.relations() {
            let mut row = vec![0i64; r];
            row.extend(rel.iter().copied());
            rows.push(row);
        }
        let group = AbelianGroup::from_relations(&rows, r + t);
        Ok(RayClassGroup { field, d: d.clone(), modulus, decomposer, units, class_rank: r, group })
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn d(&self) -> &QuadIdeal {
        &self.d
    }

    pub fn modulus(&self) -> &QuadIdeal {
        &self.modulus
    }

    pub fn class_group(&self) -> &ClassGroup {
        self.decomposer.class_group()
    }

    pub fn residue_units(&self) -> &ResidueUnits {
        &self.units
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn invariants(&self) -> &[i64] {
        self.group.invariants()
    }

    pub fn two_torsion(&self) -> u64 {
        self.group.two_torsion()
    }

    /// Exponent vector of the class of `(x)`, `x` a unit at `m`.
    pub fn element_exponents(&self, x: &FieldElement) -> Option<Vec<i64>> {
        let mut e = vec![0i64; self.class_rank];
        e.extend(self.units.dlog_element(x)?);
        Some(e)
    }

    /// Exponent vector of an ideal coprime to the modulus.
    pub fn ideal_exponents(&self, a: &QuadIdeal) -> Option<Vec<i64>> {
        if !a.is_coprime(&self.modulus) {
            return None;
        }
        let (y, theta) = self.decomposer.decompose(a);
        let mut e = y;
        e.extend(self.units.dlog_element(&theta)?);
        Some(e)
    }

    /// Coordinates of the ray class of `a`, or `None` if `a` meets the modulus.
    pub fn dlog(&self, a: &QuadIdeal) -> Option<Vec<i64>> {
        let mut acc = vec![0i64; self.group.ngens()];
        for (p, m) in a.factor() {
            let e = self.ideal_exponents(p.ideal())?;
            for (x, y) in acc.iter_mut().zip(e) {
                *x += y * m as i64;
            }
        }
        Some(self.group.coords(&acc))
    }

    /// Parity mask of the coordinates at the even invariants.
    pub fn parity_mask(&self, coords: &[i64]) -> u32 {
        let mut mask = 0u32;
        let mut bit = 0;
        for (x, n) in coords.iter().zip(self.invariants()) {
            if n % 2 == 0 {
                if x % 2 != 0 {
                    mask |= 1 << bit;
                }
                bit += 1;
            }
        }
        mask
    }

    /// All `chi` with `chi^2 = chi_0`, the principal character first.
    pub fn quadratic_characters(&self) -> Vec<RayCharacter<'_>> {
        let even = self.invariants().iter().filter(|&&n| n % 2 == 0).count();
        (0..1u32 << even).map(|mask| RayCharacter { group: self, mask }).collect()
    }

    pub fn evaluate(&self, chi: &RayCharacter<'_>, a: &QuadIdeal) -> i32 {
        chi.evaluate(a)
    }
}

/// A character of order dividing 2, stored as a mask over the even
/// invariants: `chi(x) = (-1)^{sum of masked coordinates}`.
#[derive(Clone, Copy, Debug)]
pub struct RayCharacter<'g> {
    group: &'g RayClassGroup,
    mask: u32,
}

impl<'g> RayCharacter<'g> {
    pub fn group(&self) -> &'g RayClassGroup {
        self.group
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn is_principal(&self) -> bool {
        self.mask == 0
    }

    /// Exponents `k_i` with `chi(G_i) = exp(2 pi i k_i / n_i)`.
    pub fn exponent_vector(&self) -> Vec<i64> {
        let mut bit = 0;
        self.group
            .invariants()
            .iter()
            .map(|&n| {
                if n % 2 == 0 {
                    let on = self.mask >> bit & 1 == 1;
                    bit += 1;
                    if on {
                        n / 2
                    } else {
                        0
                    }
                } else {
                    0
                }
            })
            .collect()
    }

    pub fn on_parity(&self, parity: u32) -> i32 {
        if (self.mask & parity).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn on_coords(&self, coords: &[i64]) -> i32 {
        self.on_parity(self.group.parity_mask(coords))
    }

    /// `chi(a)`, zero when `a` meets the modulus.
    pub fn evaluate(&self, a: &QuadIdeal) -> i32 {
        match self.group.dlog(a) {
            Some(c) => self.on_coords(&c),
            None => 0,
        }
    }

    fn trivial_on_kernel_to(&self, f: &QuadIdeal) -> bool {
        let units = self.group.residue_units();
        let one = reduce_key(f, 1);
        units.representatives().into_iter().filter(|&r| reduce_key(f, r) == one).all(|r| {
            let e = self.group.element_exponents(&FieldElement::from_ints(
                self.group.field.disc(),
                (r % 4) as i64,
                (r / 4) as i64,
            ));
            self.on_coords(&self.group.group.coords(&e.expect("unit residue"))) == 1
        })
    }

    /// Smallest `f | m` such that `chi` factors through `Cl_f(k)`.
    pub fn conductor(&self) -> CharacterConductor {
        let mut good: Vec<QuadIdeal> =
            self.group.modulus.divisors().into_iter().filter(|f| self.trivial_on_kernel_to(f)).collect();
        good.sort_by_key(|f| (f.norm(), f.sort_key()));
        let f = good[0].clone();
        debug_assert!(good.iter().all(|g| f.divides(g)));
        CharacterConductor { mask: self.mask, f }
    }
}

/// The conductor of a quadratic ray character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterConductor {
    pub mask: u32,
    pub f: QuadIdeal,
}

impl CharacterConductor {
    pub fn norm(&self) -> u64 {
        self.f.norm()
    }
}

pub fn ray_class_group(k: &QuadField, d: &QuadIdeal) -> Result<RayClassGroup> {
    let dec = Arc::new(Decomposer::new(ClassGroup::wide(k)));
    RayClassGroup::new(dec, d)
}

//! Class groups of quadratic fields through binary quadratic forms.
//!
//! An ideal `content*(a, (b + sqrt d)/2)` is sent to the form `(a, b, c)`.
//! The form class group is the narrow class group; the wide group is its
//! quotient by the class of `(sqrt d)`.

pub mod abelian;
mod bqf;

pub use abelian::AbelianGroup;
pub use bqf::{class_representatives, reduced_forms_definite, reduced_forms_indefinite, Bqf};

use crate::arith;
use crate::quadfield::{FieldElement, PrimeIdeal, QuadField, QuadIdeal, SplitKind};
use bqf::Move;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::HashMap;

/// A Z-basis `(beta1, beta2)` of an ideal with `beta2/beta1 = (b + sqrt d)/(2a)`
/// and `N(beta1) = a N(I)`, where `(a, b, c)` is the attached form.
#[derive(Clone, Debug)]
struct TrackedBasis {
    beta1: FieldElement,
    beta2: FieldElement,
    form: Bqf,
}

impl TrackedBasis {
    fn of_ideal(i: &QuadIdeal) -> Self {
        let d = i.disc();
        let c = i.content();
        let beta1 = FieldElement::integer(d, c * i.a());
        let beta2 = FieldElement::from_ints(d, c * ((i.b() - d) / 2), c);
        TrackedBasis { beta1, beta2, form: Bqf::from_ideal(i) }
    }

    fn apply(&mut self, step: &bqf::Step) {
        match step.mv {
            Move::Translate(t) => {
                self.beta2 = &self.beta2 + &self.beta1.scale(&BigRational::from_integer(t.into()));
            }
            Move::Rho(t) => {
                let b2 = &self.beta2.scale(&BigRational::from_integer(t.into())) - &self.beta1;
                self.beta1 = std::mem::replace(&mut self.beta2, b2);
            }
        }
        self.form = step.form;
    }

    fn reduce(&mut self) {
        for s in self.form.reduction_path() {
            self.apply(&s);
        }
    }

    /// `beta1 / a`, the scalar taking the form ideal onto the lattice.
    fn scalar(&self) -> FieldElement {
        self.beta1.scale(&BigRational::new(BigInt::from(1), BigInt::from(self.form.a)))
    }
}

/// Write `i = lambda * j` with `j` the ideal of a reduced form.
pub fn reduce_ideal(i: &QuadIdeal) -> (FieldElement, QuadIdeal) {
    let mut t = TrackedBasis::of_ideal(i);
    t.reduce();
    (t.scalar(), t.form.to_ideal())
}

/// A generator of `i` when it is principal.
pub fn principal_generator(i: &QuadIdeal) -> Option<FieldElement> {
    let mut t = TrackedBasis::of_ideal(i);
    t.reduce();
    if i.disc() < 0 {
        return (t.form.a == 1).then(|| t.beta1.clone());
    }
    let start = t.form;
    loop {
        if t.form.a.abs() == 1 {
            return Some(t.scalar());
        }
        let s = t.form.rho();
        t.apply(&s);
        if t.form == start {
            return None;
        }
    }
}

/// Odd primes in increasing order.
fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&p| arith::is_prime(p))
}

/// Structure of the narrow or wide class group with discrete logarithms.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    field: QuadField,
    narrow: bool,
    group: AbelianGroup,
    gen_primes: Vec<PrimeIdeal>,
    table: HashMap<Bqf, Vec<i64>>,
    generators: Vec<Bqf>,
}

impl ClassGroup {
    pub fn new(field: &QuadField, narrow: bool) -> Self {
        let d = field.disc();
        let order = class_representatives(d).len();
        let mut seen: Vec<PrimeIdeal> = Vec::new();
        let f = *field;
        let candidates = odd_primes()
            .filter(move |&p| f.splitting_type(p) != SplitKind::Inert)
            .flat_map(move |p| f.primes_above(p))
            .map(|pr| {
                let form = Bqf::from_ideal(pr.ideal()).reduce().unwrap();
                seen.push(pr);
                form
            });
        let gen =
            abelian::generate(Bqf::principal(d).reduce().unwrap(), candidates, order, |x, y| x.compose(y).unwrap());
        let gen_primes: Vec<PrimeIdeal> = gen.chosen.iter().map(|&i| seen[i].clone()).collect();
        let mut relations = gen.relations.clone();
        let s = gen_primes.len();
        if !narrow && d > 0 {
            let root = QuadIdeal::from_element(&FieldElement::sqrt_disc(d));
            relations.push(gen.table[&Bqf::from_ideal(&root).reduce().unwrap()].clone());
        }
        let group =
            if s == 0 { AbelianGroup::from_relations(&[], 0) } else { AbelianGroup::from_relations(&relations, s) };
        let mut cg = ClassGroup { field: *field, narrow, group, gen_primes, table: gen.table, generators: Vec::new() };
        cg.generators = (0..cg.group.rank())
            .map(|i| {
                let mut y = cg.group.zero();
                y[i] = 1;
                cg.form_of_exponents(&cg.group.exponents(&y))
            })
            .collect();
        cg
    }

    pub fn narrow(field: &QuadField) -> Self {
        Self::new(field, true)
    }

    pub fn wide(field: &QuadField) -> Self {
        Self::new(field, false)
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn is_narrow(&self) -> bool {
        self.narrow
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn elementary_divisors(&self) -> &[i64] {
        self.group.invariants()
    }

    /// Forms representing the Smith generators.
    pub fn generators(&self) -> &[Bqf] {
        &self.generators
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// The prime ideals whose classes generate the group.
    pub fn generator_primes(&self) -> &[PrimeIdeal] {
        &self.gen_primes
    }

    fn form_of_exponents(&self, e: &[i64]) -> Bqf {
        let d = self.field.disc();
        let mut acc = Bqf::principal(d).reduce().unwrap();
        for (p, &ej) in self.gen_primes.iter().zip(e) {
            let f = Bqf::from_ideal(p.ideal());
            let f = if ej < 0 { f.inverse() } else { f };
            for _ in 0..ej.unsigned_abs() {
                acc = acc.compose(&f).unwrap();
            }
        }
        acc
    }

    /// Coordinates of a form class.
    pub fn dlog_form(&self, f: &Bqf) -> Vec<i64> {
        let key = f.reduce().expect("degenerate form");
        self.group.coords(&self.table[&key])
    }

    /// Coordinates of the class of an ideal.
    pub fn ideal_class(&self, i: &QuadIdeal) -> Vec<i64> {
        self.dlog_form(&Bqf::from_ideal(i))
    }

    pub fn in_square_subgroup(&self, i: &QuadIdeal) -> bool {
        self.group.is_square(&self.ideal_class(i))
    }

    pub fn two_torsion(&self) -> u64 {
        self.group.two_torsion()
    }

    /// `prod P_j^{e_j} = mu * r` with `r` integral and reduced.
    pub fn exponent_ideal(&self, e: &[i64]) -> (FieldElement, QuadIdeal) {
        let d = self.field.disc();
        let mut mu = FieldElement::one(d);
        let mut r = self.field.unit_ideal();
        for (p, &ej) in self.gen_primes.iter().zip(e) {
            let (step, inv_norm) = if ej >= 0 {
                (p.ideal().clone(), None)
            } else {
                (p.conj().ideal().clone(), Some(BigRational::new(1.into(), p.norm().into())))
            };
            for _ in 0..ej.unsigned_abs() {
                r = r.mul(&step);
                if let Some(s) = &inv_norm {
                    mu = mu.scale(s);
                }
                let (lam, r2) = reduce_ideal(&r);
                mu = &mu * &lam;
                r = r2;
            }
        }
        (mu, r)
    }

    /// Generator of the principal fractional ideal `prod P_j^{e_j}`.
    pub fn relation_generator(&self, e: &[i64]) -> FieldElement {
        let (mu, r) = self.exponent_ideal(e);
        let g = principal_generator(&r).expect("relation ideal is not principal");
        &mu * &g
    }
}

/// Class group data for writing ideals as `theta * Gamma^y`, where
/// `Gamma^y = prod P_j^{(y W)_j}` over the generator primes.
#[derive(Clone, Debug)]
pub struct Decomposer {
    cg: ClassGroup,
    inverse_reps: HashMap<Vec<i64>, (FieldElement, QuadIdeal)>,
}

impl Decomposer {
    pub fn new(cg: ClassGroup) -> Self {
        let mut inverse_reps = HashMap::new();
        let mut classes: Vec<Vec<i64>> = cg.table.values().map(|e| cg.group.coords(e)).collect();
        classes.sort();
        classes.dedup();
        for y in classes {
            let neg: Vec<i64> = cg.group.exponents(&y).iter().map(|x| -x).collect();
            inverse_reps.insert(y, cg.exponent_ideal(&neg));
        }
        Decomposer { cg, inverse_reps }
    }

    pub fn class_group(&self) -> &ClassGroup {
        &self.cg
    }

    /// `(y, theta)` with `i = theta * Gamma^y`.
    pub fn decompose(&self, i: &QuadIdeal) -> (Vec<i64>, FieldElement) {
        let y = self.cg.ideal_class(i);
        let (mu, r) = &self.inverse_reps[&y];
        let g = principal_generator(&i.mul(r)).expect("class bookkeeping broke");
        (y, mu * &g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(d: i64) -> QuadField {
        QuadField::new(d).unwrap()
    }

    #[test]
    fn class_group_examples() {
        assert_eq!(ClassGroup::wide(&k(-4)).order(), 1);
        let g = ClassGroup::wide(&k(-23));
        assert_eq!(g.elementary_divisors(), &[3]);
        // form-count oracle: 3 reduced forms
        assert_eq!(reduced_forms_definite(-23).len(), 3);
        assert_eq!(ClassGroup::narrow(&k(40)).order(), 2);
        assert_eq!(ClassGroup::wide(&k(40)).order(), 2);
        assert_eq!(ClassGroup::narrow(&k(12)).order(), 2);
        assert_eq!(ClassGroup::wide(&k(12)).order(), 1);
        assert_eq!(ClassGroup::wide(&k(-20)).two_torsion(), 2);
        assert_eq!(ClassGroup::wide(&k(-4)).two_torsion(), 1);
    }

    #[test]
    fn ideal_class_examples() {
        let f = k(-23);
        let g = ClassGroup::wide(&f);
        assert_eq!(g.ideal_class(&f.unit_ideal()), vec![0]);
        let p2 = f.primes_above(2)[0].ideal().clone();
        assert_ne!(g.ideal_class(&p2), vec![0]);
        assert!(g.in_square_subgroup(&p2));
        assert_eq!(Bqf::from_ideal(&p2).reduce().unwrap(), Bqf::new(2, 1, 3));
        let h = k(-20);
        let gh = ClassGroup::wide(&h);
        assert!(!gh.in_square_subgroup(h.primes_above(2)[0].ideal()));
        assert!(gh.in_square_subgroup(&h.unit_ideal()));
    }

    #[test]
    fn principal_ideals_are_trivial() {
        for d in [-23i64, -20, -84, 5, 12, 40, 229, 136, -3, -4] {
            let f = k(d);
            let g = ClassGroup::wide(&f);
            let zero = g.group().zero();
            for (x, y) in [(3i64, 1i64), (7, -2), (11, 5), (1, 1), (-4, 9), (13, 0)] {
                let a = f.element(x, y);
                if a.is_zero() {
                    continue;
                }
                let i = QuadIdeal::from_element(&a);
                assert_eq!(g.ideal_class(&i), zero, "d={d}");
                let gen = principal_generator(&i).unwrap();
                // generator differs from a by a unit
                let q = gen.div(&a);
                assert!(q.is_integral() && q.inverse().is_integral(), "d={d} a={a:?} gen={gen:?}");
            }
        }
    }

    #[test]
    fn reduce_ideal_relation() {
        for d in [-23i64, -84, 229, 40, -5 * 4] {
            let f = k(d);
            for m in 2..60u64 {
                for i in f.ideals_of_norm(m) {
                    let (lam, j) = reduce_ideal(&i);
                    let back = QuadIdeal::generated_by(d, &j.basis().iter().map(|b| &lam * b).collect::<Vec<_>>());
                    assert_eq!(back, i);
                }
            }
        }
    }

    #[test]
    fn narrow_wide_ratio() {
        for fd in arith::fundamental_discriminants(400) {
            let f = QuadField::from_disc(fd);
            let n = ClassGroup::narrow(&f).order();
            let w = ClassGroup::wide(&f).order();
            let expect = if f.is_real() && crate::quadfield::fundamental_unit(&f).unwrap().norm == 1 { 2 } else { 1 };
            assert_eq!(n, w * expect, "d={}", f.disc());
        }
    }

    #[test]
    fn decomposition_and_relations() {
        for d in [-84i64, -20, 229, 136, -4 * 14, 40, -23] {
            let f = k(d);
            let dec = Decomposer::new(ClassGroup::wide(&f));
            let cg = dec.class_group();
            for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 2] {
                for pr in f.primes_above(p) {
                    let (y, theta) = dec.decompose(pr.ideal());
                    // theta * Gamma^y == P
                    let (mu, r) = cg.exponent_ideal(&cg.group().exponents(&y));
                    let t = &theta * &mu;
                    let back = QuadIdeal::generated_by(d, &r.basis().iter().map(|b| &t * b).collect::<Vec<_>>());
                    assert_eq!(&back, pr.ideal(), "d={d} p={p}");
                }
            }
            for b in cg.group().smith_relations() {
                let rho = cg.relation_generator(&b);
                assert!(rho.residue(4).is_some());
            }
        }
    }

    #[test]
    fn genus_bound() {
        for fd in arith::fundamental_discriminants(1000) {
            let f = QuadField::from_disc(fd);
            let t = ClassGroup::wide(&f).two_torsion();
            let w = arith::omega(f.disc().unsigned_abs());
            assert!(t <= 1 << (w - 1), "d={}", f.disc());
        }
    }

    #[test]
    fn odd_order_is_all_squares() {
        let f = k(-23);
        let g = ClassGroup::wide(&f);
        for m in 1..50 {
            for i in f.ideals_of_norm(m) {
                assert!(g.in_square_subgroup(&i));
            }
        }
    }
}

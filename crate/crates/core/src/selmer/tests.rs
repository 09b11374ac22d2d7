use super::*;
use crate::arith;
use num_traits::{ToPrimitive, Zero};

fn k(d: i64) -> QuadField {
    QuadField::new(d).unwrap()
}

/// Independent count of `V(k)/(k*)^2`: small elements whose principal ideal
/// is a square, grouped by square classes.
fn brute_selmer_order(d: i64, box_size: i64) -> usize {
    let f = k(d);
    let mut reps: Vec<FieldElement> = Vec::new();
    for x in -box_size..=box_size {
        for y in -box_size..=box_size {
            let e = f.element(x - y * d.div_euclid(2), y);
            if e.is_zero() {
                continue;
            }
            let i = QuadIdeal::from_element(&e);
            if !i.factor().iter().all(|&(_, m)| m % 2 == 0) {
                continue;
            }
            if !reps.iter().any(|r| is_square_in_k(&f, &(r * &e))) {
                reps.push(e);
            }
        }
    }
    reps.len()
}

#[test]
fn selmer_orders_match_brute_force() {
    for (d, expect) in [(-4i64, 2usize), (-20, 4), (5, 4), (-23, 2), (-84, 8), (12, 4), (40, 8)] {
        assert_eq!(brute_selmer_order(d, 12), expect, "oracle d={d}");
        assert_eq!(selmer_group(&k(d)).order() as usize, expect, "d={d}");
    }
}

#[test]
fn selmer_order_formula_and_independence() {
    for fd in arith::fundamental_discriminants(500) {
        let f = QuadField::from_disc(fd);
        let cg = ClassGroup::wide(&f);
        let s = SelmerGroup::new(&cg);
        assert_eq!(s.order(), (1u64 << (f.r1() + f.r2())) * cg.two_torsion());
        for u in s.elements().skip(1) {
            let e = s.element(u);
            assert!(!is_square_in_k(&f, &e), "d={} u={u:?}", f.disc());
        }
        for b in s.basis() {
            assert!(b.residue(4).is_some());
            let n = b.norm();
            assert!(is_rational_square(&n.abs()), "d={}", f.disc());
            let scaled = b.scale(&BigRational::from_integer(b.parts().2.clone()));
            if scaled.norm().numer().bits() < 60 {
                // (b) = q^2 up to the square of its denominator
                let i = QuadIdeal::from_element(&scaled);
                assert!(i.factor().iter().all(|&(_, m)| m % 2 == 0), "d={}", f.disc());
            }
        }
    }
}

#[test]
fn alpha0_examples() {
    let g = Parametrization::new(&k(-4));
    let (a0, q) = g.alpha0_for(&k(-4).unit_ideal()).unwrap();
    assert_eq!(a0, FieldElement::one(-4));
    assert!(q.is_unit());
    let p = k(-4).primes_above(2)[0].ideal().clone();
    let (a0, q) = g.alpha0_for(&p).unwrap();
    assert!(q.is_unit());
    assert_eq!(QuadIdeal::from_element(&a0), p);

    let f = k(-23);
    let h = Parametrization::new(&f);
    let p2 = f.primes_above(2)[0].ideal().clone();
    let (a0, q) = h.alpha0_for(&p2).unwrap();
    assert!(q.is_coprime(&QuadIdeal::from_element(&f.element(2, 0))));
    assert_eq!(QuadIdeal::from_element(&a0), p2.mul(&q).mul(&q));

    let e = Parametrization::new(&k(-20));
    assert!(e.alpha0_for(k(-20).primes_above(2)[0].ideal()).is_err());
}

#[test]
fn alpha0_relation_holds_widely() {
    for d in [-84i64, -20, 229, 136, -56, 40, -23, 145, -260] {
        let f = k(d);
        let par = Parametrization::new(&f);
        for m in 1..120u64 {
            for a in f.ideals_of_norm(m) {
                if !a.is_squarefree() || !par.class_group().in_square_subgroup(&a) {
                    continue;
                }
                let (a0, q) = par.alpha0_for(&a).unwrap();
                assert!(a0.is_integral());
                assert!(q.is_coprime(&QuadIdeal::from_element(&f.element(2, 0))));
                assert_eq!(QuadIdeal::from_element(&a0), a.mul(&q).mul(&q), "d={d} a={a:?}");
            }
        }
    }
}

/// Direct search for the conductor: the largest `c | 2`, prime to `a`, with
/// `x^2 = delta` solvable by a unit `x` modulo `c^2`.
fn brute_conductor(f: &QuadField, a: &QuadIdeal, delta: &FieldElement) -> QuadIdeal {
    let d = f.disc();
    let den = delta.parts().2.clone();
    let delta = delta.scale(&BigRational::from_integer(&den * &den));
    let two = QuadIdeal::from_element(&f.element(2, 0));
    let four = FieldElement::integer(d, 4);
    let mut best = f.unit_ideal();
    for c in two.divisors() {
        if !c.is_coprime(a) {
            continue;
        }
        let m = c.mul(&c);
        let mut ok = false;
        for x in 0..4 {
            for y in 0..4 {
                let xe = f.element(x, y);
                let unit = m.is_coprime(&QuadIdeal::generated_by(d, &[xe.clone(), four.clone()]));
                if unit && m.contains(&(&(&xe * &xe) - &delta)) {
                    ok = true;
                }
            }
        }
        if ok && c.norm() > best.norm() {
            best = c;
        }
    }
    best
}

#[test]
fn conductor_examples() {
    let f = k(-4);
    let par = Parametrization::new(&f);
    let one = f.unit_ideal();
    let i_class = SelmerElement(1);
    assert_eq!(par.selmer().element(i_class), FieldElement::from_ints(-4, 2, 1));
    assert!(par.conductor_ideal(&one, i_class).unwrap().is_unit());
    let desc = par.describe(&one, i_class).unwrap();
    assert_eq!(desc.rel_disc, QuadIdeal::from_element(&f.element(4, 0)));
    assert_eq!(desc.rel_disc_norm, 16);
    assert_eq!(desc.abs_disc, 256);
    assert_eq!(desc.galois_type, GaloisType::V4);
    assert_eq!(resolvent_oracle(-4, &FieldElement::from_ints(-4, 2, 1)), GaloisType::V4);
    // trivial pair has c = (2) and norm 1
    let t = par.describe(&one, SelmerElement(0)).unwrap();
    assert!(t.is_trivial());
    assert_eq!(t.rel_disc_norm, 1);
    // Q(sqrt5): -1 is not a square mod 4
    let g = k(5);
    let pg = Parametrization::new(&g);
    let minus_one = pg.selmer().class_of(&g.element(-1, 0)).unwrap();
    assert!(pg.conductor_ideal(&g.unit_ideal(), minus_one).unwrap().is_unit());
    assert_eq!(pg.classify_galois(&g.unit_ideal(), minus_one).unwrap(), GaloisType::V4);
    // Q(i)(sqrt(1+i)) is D4
    let p = f.primes_above(2)[0].ideal().clone();
    let u = par.selmer().elements().find(|&u| {
        let delta = &par.kummer_generator(&p, u).unwrap();
        is_square_in_k(&f, &delta.div(&f.element(3, 1)))
    });
    if let Some(u) = u {
        assert_eq!(par.classify_galois(&p, u).unwrap(), GaloisType::D4);
    }
    assert_eq!(resolvent_oracle(-4, &f.element(3, 1)), GaloisType::D4);
}

#[test]
fn conductor_matches_direct_search() {
    for d in [-4i64, -3, 5, 8, 12, -7, 17, -15, -20, 40, -84, 33, 41, -8, 24] {
        let f = k(d);
        let par = Parametrization::new(&f);
        for m in 1..40u64 {
            for a in f.ideals_of_norm(m) {
                if !a.is_squarefree() || !par.class_group().in_square_subgroup(&a) {
                    continue;
                }
                for u in par.selmer().elements() {
                    let delta = par.kummer_generator(&a, u).unwrap();
                    assert_eq!(
                        par.conductor_ideal(&a, u).unwrap(),
                        brute_conductor(&f, &a, &delta),
                        "d={d} a={a:?} u={u:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn conductor_independent_of_choices() {
    let mut count = 0;
    for d in [-4i64, 5, -7, 17, -20, 40, -84, 12] {
        let f = k(d);
        let par = Parametrization::new(&f);
        for m in 1..30u64 {
            for a in f.ideals_of_norm(m) {
                if !a.is_squarefree() || !par.class_group().in_square_subgroup(&a) {
                    continue;
                }
                for u in par.selmer().elements() {
                    let delta = par.kummer_generator(&a, u).unwrap();
                    let base = par.conductor_of(&a, &delta).ideal.clone();
                    for (x, y) in [(3i64, 2i64), (1, 4), (5, 6), (7, 0)] {
                        let gamma = f.element(x, y);
                        if gamma.norm().numer().to_i64().unwrap() % 2 == 0 {
                            continue;
                        }
                        let other = &delta * &(&gamma * &gamma);
                        assert_eq!(par.conductor_of(&a, &other).ideal, base);
                        count += 1;
                    }
                }
            }
        }
    }
    assert!(count >= 200);
}

/// Galois group of the normal closure of `k(sqrt(delta))`, found from the
/// quartic `x^4 - Tr(delta) x^2 + N(delta)` and its resolvent cubic.
fn resolvent_oracle(d: i64, delta: &FieldElement) -> GaloisType {
    let den = delta.parts().2.clone();
    let delta = delta.scale(&BigRational::from_integer(&den * &den));
    if delta.is_rational() {
        return GaloisType::V4;
    }
    let t = delta.trace().to_integer();
    let n = delta.norm().to_integer();
    // f = x^4 + a3 x^3 + b x^2 + c x + e
    let (a3, b, c, e) = (BigInt::zero(), -t.clone(), BigInt::zero(), n.clone());
    // reducible as (x^2 + u x + v)(x^2 - u x + v)
    if is_rational_square(&BigRational::from_integer(e.clone())) {
        let v = e.sqrt();
        for s in [v.clone(), -v] {
            let u2: BigInt = &t + &s * 2;
            if u2.is_zero() || is_rational_square(&BigRational::from_integer(u2)) {
                return GaloisType::V4;
            }
        }
    }
    // resolvent x^3 + p x^2 + q x + r
    let p: BigInt = -b.clone();
    let q: BigInt = &a3 * &c - &e * 4;
    let a3sq: BigInt = &a3 * &a3;
    let r: BigInt = &b * &e * 4 - a3sq * &e - &c * &c;
    let cubic = |x: &BigInt| x * x * x + &p * x * x + &q * x + &r;
    let roots = integer_roots_of_cubic(&p, &q, &r);
    for x in &roots {
        assert!(cubic(x).is_zero());
    }
    match roots.len() {
        3 => GaloisType::V4,
        1 => {
            let rt = &roots[0];
            let disc = &p * &p * &q * &q - &q * &q * &q * 4 - &p * &p * &p * &r * 4 - &r * &r * 27 + &p * &q * &r * 18;
            let splits = |pp: &BigInt, qq: &BigInt| {
                let dq: BigInt = pp * pp - qq * 4;
                dq.is_zero()
                    || is_rational_square(&BigRational::from_integer(dq.clone()))
                    || is_rational_square(&BigRational::from_integer(&dq * &disc))
            };
            if splits(&-rt.clone(), &e) && splits(&a3, &(&b - rt)) {
                GaloisType::C4
            } else {
                GaloisType::D4
            }
        }
        _ => panic!("resolvent with {} rational roots for d={d}", roots.len()),
    }
}

/// Distinct integer roots of a monic integer cubic, by bracketing its real
/// roots and testing nearby integers.
fn integer_roots_of_cubic(p: &BigInt, q: &BigInt, r: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| x * x * x + p * x * x + q * x + r;
    // roots are bounded by 1 + max |coeff|
    let bound = BigInt::one() + p.abs().max(q.abs()).max(r.abs());
    // critical points split the line into monotone pieces
    let mut cuts = vec![-bound.clone()];
    let disc: BigInt = p * p - q * 3;
    if disc.is_positive() {
        let s = disc.sqrt();
        cuts.push((-p - &s) / 3 - 1);
        cuts.push((-p - &s) / 3 + 1);
        cuts.push((-p + &s) / 3 - 1);
        cuts.push((-p + &s) / 3 + 1);
    }
    cuts.push(bound.clone());
    cuts.sort();
    let mut out: Vec<BigInt> = Vec::new();
    let mut check = |x: BigInt| {
        if f(&x).is_zero() && !out.contains(&x) {
            out.push(x);
        }
    };
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
        check(lo.clone());
        check(hi.clone());
        let (flo, fhi) = (f(&lo).signum(), f(&hi).signum());
        if flo == fhi || flo.is_zero() || fhi.is_zero() {
            continue;
        }
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) / 2;
            if f(&mid).signum() == flo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        check(lo);
        check(hi);
    }
    // integers around critical points
    if disc.is_positive() || disc.is_zero() {
        let s = disc.sqrt();
        for c in [(-p - &s) / 3, (-p + &s) / 3] {
            for dx in -2..=2 {
                check(&c + dx);
            }
        }
    }
    out
}

#[test]
fn classification_matches_resolvent_oracle() {
    let mut seen = [0usize; 3];
    for fd in arith::fundamental_discriminants(79) {
        let f = QuadField::from_disc(fd);
        let d = f.disc();
        let par = Parametrization::new(&f);
        let ymax = 100_000 / (d * d) as u64;
        for m in 1..=ymax {
            for a in f.ideals_of_norm(m) {
                if !a.is_squarefree() || !par.class_group().in_square_subgroup(&a) {
                    continue;
                }
                for u in par.selmer().elements() {
                    let desc = par.describe(&a, u).unwrap();
                    if desc.is_trivial() || desc.abs_disc > 100_000 {
                        continue;
                    }
                    let delta = par.kummer_generator(&a, u).unwrap();
                    assert_eq!(desc.galois_type, resolvent_oracle(d, &delta), "d={d} a={a:?} u={u:?}");
                    seen[desc.galois_type as usize] += 1;
                }
            }
        }
    }
    assert!(seen.iter().all(|&s| s > 0), "{seen:?}");
}

#[test]
fn pairs_are_separated_by_discriminant_and_kummer_class() {
    for d in [-4i64, 5, -20, 40, -84] {
        let f = k(d);
        let par = Parametrization::new(&f);
        let mut all: Vec<(QuadIdeal, FieldElement)> = Vec::new();
        for m in 1..60u64 {
            for a in f.ideals_of_norm(m) {
                if !a.is_squarefree() || !par.class_group().in_square_subgroup(&a) {
                    continue;
                }
                for u in par.selmer().elements() {
                    let desc = par.describe(&a, u).unwrap();
                    let delta = &desc.alpha0 * &par.selmer().element(u);
                    for (rd, other) in &all {
                        if *rd == desc.rel_disc {
                            assert!(!is_square_in_k(&f, &delta.div(other)), "d={d}");
                        }
                    }
                    all.push((desc.rel_disc, delta));
                }
            }
        }
        assert!(all.len() > 10);
    }
}

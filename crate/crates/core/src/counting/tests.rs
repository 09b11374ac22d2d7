use super::*;
use proptest::prelude::*;

fn k(d: i64) -> QuadField {
    QuadField::new(d).unwrap()
}

fn both(d: i64, y: f64) -> (u64, i128) {
    let e = FieldEngine::new(&k(d)).unwrap();
    (e.count_direct(y, false).unwrap().total, e.count_characters(y).unwrap())
}

#[test]
fn gaussian_field_small_bounds() {
    assert_eq!(both(-4, 1.0), (0, 0));
    let r = count_relative_direct(&k(-4), 16.0, true).unwrap();
    let descs = r.descriptors.unwrap();
    assert_eq!(descs.len() as u64, r.total);
    let zeta8 = descs.iter().find(|d| d.a.is_unit() && d.rel_disc_norm == 16).expect("Q(zeta8) missing");
    assert_eq!(zeta8.abs_disc, 256);
    assert_eq!(zeta8.galois_type, GaloisType::V4);
    assert_eq!(count_relative_characters(&k(-4), 16.0).unwrap(), r.total);
}

/// Pairs `(a, u)` counted straight from the parametrization, one ideal at a time.
fn oracle_count(d: i64, y: u64) -> TypeCounts {
    let f = k(d);
    let par = Parametrization::new(&f);
    let mut out = TypeCounts::default();
    for m in 1..=y {
        for a in f.ideals_of_norm(m) {
            if !a.is_squarefree() || !par.class_group().in_square_subgroup(&a) {
                continue;
            }
            for u in par.selmer().elements() {
                let desc = par.describe(&a, u).unwrap();
                if !desc.is_trivial() && desc.rel_disc_norm <= y {
                    out.add(desc.galois_type, 1);
                }
            }
        }
    }
    out
}

#[test]
fn direct_engine_matches_pairwise_oracle() {
    for (d, y) in
        [(-4i64, 16u64), (5, 100), (-3, 200), (-20, 300), (40, 300), (-84, 200), (-23, 300), (12, 150), (229, 100)]
    {
        let r = count_relative_direct(&k(d), y as f64, false).unwrap();
        assert_eq!(r.by_type, oracle_count(d, y), "d={d} y={y}");
    }
}

#[test]
fn descriptor_path_agrees_with_fast_path() {
    for d in [-4i64, -3, 5, 8, -7, 17, -15, -20, 40, -84, 12, 136, -23, 145] {
        let r = count_relative_direct(&k(d), 400.0, true).unwrap();
        assert_eq!(r.descriptors.as_ref().unwrap().len() as u64, r.total);
    }
}

#[test]
fn engines_agree_on_small_grid() {
    for fd in arith::fundamental_discriminants(60) {
        let e = FieldEngine::new(&QuadField::from_disc(fd)).unwrap();
        let table = e.prime_table(1024).unwrap();
        for j in 0..=10 {
            let y = 1u64 << j;
            let direct = e.count_direct_with(&table, y, false).unwrap().total;
            let chars = e.count_characters_with(&table, y).unwrap();
            assert_eq!(direct as i128, chars, "disc {} Y {y}", fd.get());
        }
    }
}

#[test]
fn engines_agree_at_fractional_bounds() {
    for d in [-4i64, 5, -20] {
        for y in [1.5, 16.9, 99.99, 250.5] {
            let (a, b) = both(d, y);
            assert_eq!(a as i128, b, "d={d} y={y}");
        }
    }
}

#[test]
fn minus_one_excludes_trivial_extension() {
    // Q(sqrt5): every quadratic extension is ramified somewhere, so the
    // smallest relative norm exceeds 1
    assert_eq!(both(5, 1.0), (0, 0));
    // Q(sqrt-15) has class number 2 and an unramified extension
    let (a, b) = both(-15, 1.0);
    assert_eq!(a, 1);
    assert_eq!(b, 1);
}

#[test]
fn counts_are_monotone() {
    for d in [-4i64, 5, -20, 40] {
        let e = FieldEngine::new(&k(d)).unwrap();
        let table = e.prime_table(2000).unwrap();
        let mut prev = 0;
        for y in (1..=2000).step_by(37) {
            let n = e.count_direct_with(&table, y, false).unwrap().total;
            assert!(n >= prev);
            prev = n;
        }
    }
}

#[test]
fn selmer_solvability_examples() {
    let f = k(-4);
    let par = Parametrization::new(&f);
    let one = f.unit_ideal();
    assert_eq!(selmer_solvability_count(&par, &one, &one).unwrap(), par.selmer().order());
    let p = f.primes_above(2)[0].ideal().clone();
    // exhaustive loop: u in {1, i}, x^2 = u mod (2): 1 always, i = (1+i)^2/2 ... only 1 works
    let n = selmer_solvability_count(&par, &one, &p).unwrap();
    let ray = crate::rayclass::ray_class_group(&f, &p).unwrap();
    assert_eq!(n, selmer_solvability_closed_form(&ray, &one).unwrap());
    let mut brute = 0;
    for u in par.selmer().elements() {
        let e = par.selmer().element(u);
        let m = p.mul(&p);
        let ok = (0..4).any(|x| {
            (0..4).any(|y| {
                let xe = f.element(x, y);
                !p.contains(&xe) && m.contains(&(&(&xe * &xe) - &e))
            })
        });
        brute += ok as u64;
    }
    assert_eq!(n, brute);
}

#[test]
fn selmer_solvability_closed_form_small() {
    for fd in arith::fundamental_discriminants(40) {
        let f = QuadField::from_disc(fd);
        let eng = FieldEngine::new(&f).unwrap();
        let par = eng.parametrization();
        for (ci, c) in par.local().divisors.iter().enumerate() {
            let ray = &eng.ray_groups()[ci];
            for m in 1..=60u64 {
                for a in f.ideals_of_norm(m) {
                    if !a.is_squarefree() || !a.is_coprime(&c.ideal) || !par.class_group().in_square_subgroup(&a) {
                        continue;
                    }
                    let n = selmer_solvability_count(par, &a, &c.ideal).unwrap();
                    assert_eq!(
                        n,
                        selmer_solvability_closed_form(ray, &a).unwrap(),
                        "disc {} a {a:?} c {:?}",
                        fd.get(),
                        c.ideal
                    );
                }
            }
        }
    }
}

#[test]
fn char_sum_examples() {
    let f = k(-4);
    let g = crate::rayclass::ray_class_group(&f, &f.unit_ideal()).unwrap();
    let chi0 = g.quadratic_characters()[0];
    assert_eq!(char_sum(&chi0, 5.5).unwrap() as u64, f.count_ideals_upto(5.5));
    assert_eq!(char_sum_squarefree(&chi0, 1.0).unwrap(), 1);
    // squarefree ideals of norm <= 4: (1), (1+i)
    let brute = (1..=4u64).flat_map(|m| f.ideals_of_norm(m)).filter(|a| a.is_squarefree()).count();
    assert_eq!(brute, 2);
    assert_eq!(char_sum_squarefree(&chi0, 4.0).unwrap(), 2);

    let two = QuadIdeal::from_element(&f.element(2, 0));
    let g4 = crate::rayclass::ray_class_group(&f, &two).unwrap();
    let chi = g4.quadratic_characters()[1];
    // the smallest norm prime to 2 is 5
    assert_eq!(char_sum(&chi, 1.0).unwrap(), 1);
    let direct: i64 = (1..=100u64).flat_map(|m| f.ideals_of_norm(m)).map(|a| chi.evaluate(&a) as i64).sum();
    assert_eq!(char_sum(&chi, 100.0).unwrap(), direct);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]
    #[test]
    fn squarefree_paths_agree(di in 0usize..6, ci in 0usize..4, which in 0usize..8, x in 1.0f64..3000.0) {
        let d = [-4i64, -20, 5, 17, -84, 40][di];
        let f = k(d);
        let divs = QuadIdeal::from_element(&f.element(2, 0)).divisors();
        let g = crate::rayclass::ray_class_group(&f, &divs[ci % divs.len()]).unwrap();
        let chars = g.quadratic_characters();
        let chi = chars[which % chars.len()];
        prop_assert_eq!(char_sum_squarefree(&chi, x).unwrap(), char_sum_squarefree_mobius(&chi, x).unwrap());
    }
}

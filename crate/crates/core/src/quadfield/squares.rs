use super::element::FieldElement;
use super::QuadField;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// A square root of `x` in `k`, if one exists.
///
/// With `y^2 = x`, `m = N(y)` satisfies `m^2 = N(x)` and `t = Tr(y)` satisfies
/// `t^2 = Tr(x) + 2m`; for `t != 0` the root is `(x + m)/t`.
pub fn sqrt_in_k(k: &QuadField, x: &FieldElement) -> Option<FieldElement> {
    let disc = k.disc();
    assert_eq!(x.disc(), disc);
    assert!(!x.is_zero(), "square test of zero");
    if x.is_rational() {
        let q = x.x();
        if let Some(r) = rational_sqrt(&q) {
            return Some(FieldElement::from_rationals(disc, &r, &BigRational::zero()));
        }
        // x = r^2 * disc, root r*sqrt(disc)
        let r = rational_sqrt(&(q / BigRational::from_integer(BigInt::from(disc))))?;
        return Some(FieldElement::sqrt_disc(disc).scale(&r));
    }
    let n = rational_sqrt(&x.norm())?;
    let tr = x.trace();
    for m in [n.clone(), -n] {
        let two_m = &m + &m;
        let Some(t) = rational_sqrt(&(&tr + two_m)) else { continue };
        if t.is_zero() {
            continue;
        }
        let y = (x + &FieldElement::from_rationals(disc, &m, &BigRational::zero())).scale(&t.recip());
        if &(&y * &y) == x {
            return Some(y);
        }
    }
    None
}

pub fn is_square_in_k(k: &QuadField, x: &FieldElement) -> bool {
    sqrt_in_k(k, x).is_some()
}

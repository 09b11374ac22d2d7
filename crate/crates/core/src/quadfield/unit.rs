use super::element::FieldElement;
use super::QuadField;
use crate::arith::isqrt;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// The fundamental unit of a real quadratic field and its norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub unit: FieldElement,
    pub norm: i32,
}

/// Smallest unit `> 1` of a real quadratic field.
///
/// Scans the convergents `p/q` of `alpha = (s + sqrt d)/2`, `s = d mod 2`, for
/// the first `p - q*conj(alpha)` of norm `+-1`.
pub fn fundamental_unit(k: &QuadField) -> Result<FundamentalUnit> {
    let d = k.disc();
    if d < 0 {
        return Err(Error::ImaginaryField(d));
    }
    let s = d.rem_euclid(2);
    let r = isqrt(d as u64) as i64;
    // alpha = (P + sqrt d)/Q
    let (mut pp, mut qq) = (s as i128, 2i128);
    let (mut p0, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q0, mut q1) = (BigInt::one(), BigInt::zero());
    let n_alpha = BigInt::from((s * s - d) / 4);
    let s_big = BigInt::from(s);
    let dd = d as i128;
    loop {
        let a = if qq > 0 { (pp + r as i128).div_euclid(qq) } else { floor_neg(pp, r as i128, qq) };
        let p2 = BigInt::from(a) * &p1 + &p0;
        let q2 = BigInt::from(a) * &q1 + &q0;
        (p0, p1) = (p1, p2);
        (q0, q1) = (q1, q2);
        let norm = &p1 * &p1 - &p1 * &q1 * &s_big + &q1 * &q1 * &n_alpha;
        if norm.is_one() || norm == -BigInt::one() {
            // conj(alpha) = (d + s)/2 - omega
            let x = &p1 - &q1 * BigInt::from((d + s) / 2);
            let unit = FieldElement::new(d, x, q1.clone(), BigInt::one());
            let norm = if norm.is_one() { 1 } else { -1 };
            return Ok(FundamentalUnit { unit, norm });
        }
        pp = a * qq - pp;
        qq = (dd - pp * pp) / qq;
    }
}

/// `floor((p + sqrt d)/q)` for `q < 0`, with `r = isqrt(d)` and `d` not a square.
fn floor_neg(p: i128, r: i128, q: i128) -> i128 {
    // p + sqrt d lies strictly in (p + r, p + r + 1)
    (p + r + 1).div_euclid(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fu(d: i64) -> FundamentalUnit {
        fundamental_unit(&QuadField::new(d).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        // (1 + sqrt5)/2 = omega - 2
        let u5 = fu(5);
        assert_eq!(u5.unit, FieldElement::from_ints(5, -2, 1));
        assert_eq!(u5.norm, -1);
        // 1 + sqrt2 = 1 + (2*omega - 8)/2 = omega - 3
        let u8 = fu(8);
        assert_eq!(u8.unit, FieldElement::from_ints(8, -3, 1));
        assert_eq!(u8.norm, -1);
        // 2 + sqrt3 with omega = 6 + sqrt3
        let u12 = fu(12);
        assert_eq!(u12.unit, FieldElement::from_ints(12, -4, 1));
        assert_eq!(u12.norm, 1);
        assert!(fundamental_unit(&QuadField::new(-4).unwrap()).is_err());
    }

    #[test]
    fn brute_force_minimal_unit() {
        // units x + y*sqrt(d)/... searched directly: smallest (x, y) with x^2 - d y^2 = +-4
        for k in crate::arith::fundamental_discriminants(400).into_iter().filter(|d| d.get() > 0) {
            let d = k.get();
            let u = fu(d);
            assert!(u.unit.to_f64() > 1.0);
            assert_eq!(u.unit.norm(), num_rational::BigRational::from_integer(u.norm.into()));
            // u = (t + v sqrt d)/2 with t = Tr(u), v = y-coordinate
            let (_, v, _) = u.unit.parts();
            let v: i64 = v.try_into().unwrap_or(i64::MAX);
            let mut found = None;
            'outer: for y in 1i64..=v.min(200_000) {
                for sign in [-4i64, 4] {
                    let t2 = d as i128 * (y as i128).pow(2) + sign as i128;
                    if t2 > 0 {
                        let t = isqrt(t2 as u64) as i128;
                        if t * t == t2 {
                            found = Some(y);
                            break 'outer;
                        }
                    }
                }
            }
            if v <= 200_000 {
                assert_eq!(found, Some(v), "d={d}");
            } else {
                assert_eq!(found, None, "d={d}");
            }
        }
    }

    #[test]
    fn unit_is_large_for_awkward_disc() {
        // 94: fundamental unit 2143295 + 221064 sqrt94
        let u = fu(376);
        assert_eq!(u.norm, 1);
        let (_, y, _) = u.unit.parts();
        assert_eq!(*y, BigInt::from(221064));
    }
}

//! Quadratic fields `k = Q(sqrt(d))`: elements, ideals in canonical form,
//! prime splitting, ideal enumeration by norm and units.

mod element;
mod ideal;
mod squares;
mod unit;

pub use element::FieldElement;
pub use ideal::{PrimeIdeal, QuadIdeal, SplitKind, Which};
pub use squares::{is_square_in_k, sqrt_in_k};
pub use unit::{fundamental_unit, FundamentalUnit};

use crate::arith::{self, FundamentalDiscriminant};
use crate::{Error, Result};

/// A quadratic field, fixed by its fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadField {
    disc: FundamentalDiscriminant,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        FundamentalDiscriminant::new(d).map(|disc| QuadField { disc }).ok_or(Error::NotFundamental(d))
    }

    pub fn from_disc(disc: FundamentalDiscriminant) -> Self {
        QuadField { disc }
    }

    pub fn disc(&self) -> i64 {
        self.disc.get()
    }

    pub fn fundamental_disc(&self) -> FundamentalDiscriminant {
        self.disc
    }

    pub fn is_real(&self) -> bool {
        self.disc() > 0
    }

    pub fn r1(&self) -> u32 {
        if self.is_real() {
            2
        } else {
            0
        }
    }

    pub fn r2(&self) -> u32 {
        if self.is_real() {
            0
        } else {
            1
        }
    }

    /// Number of roots of unity.
    pub fn roots_of_unity(&self) -> u32 {
        match self.disc() {
            -4 => 4,
            -3 => 6,
            _ => 2,
        }
    }

    /// `chi_disc(n)`, the Kronecker character attached to the field.
    pub fn chi(&self, n: i64) -> i32 {
        arith::kronecker(self.disc(), n)
    }

    pub fn splitting_type(&self, p: u64) -> SplitKind {
        match self.chi(p as i64) {
            1 => SplitKind::Split,
            -1 => SplitKind::Inert,
            _ => SplitKind::Ramified,
        }
    }

    /// Prime ideals above the rational prime `p`, `First` before `Second`.
    pub fn primes_above(&self, p: u64) -> Vec<PrimeIdeal> {
        PrimeIdeal::above(*self, p)
    }

    /// Prime ideals above 2 together with their ramification index.
    pub fn primes_above_two(&self) -> Vec<PrimeIdeal> {
        self.primes_above(2)
    }

    pub fn unit_ideal(&self) -> QuadIdeal {
        QuadIdeal::unit(self.disc())
    }

    pub fn element(&self, x: i64, y: i64) -> FieldElement {
        FieldElement::from_ints(self.disc(), x, y)
    }

    /// All integral ideals of norm `m`, sorted by `(content, a, b)`.
    pub fn ideals_of_norm(&self, m: u64) -> Vec<QuadIdeal> {
        assert!(m >= 1);
        let mut acc = vec![self.unit_ideal()];
        for &(p, e) in &arith::factorize(m).factors {
            let primes = self.primes_above(p);
            let options: Vec<QuadIdeal> = match self.splitting_type(p) {
                SplitKind::Split => {
                    (0..=e).map(|i| primes[0].ideal().pow(i).mul(&primes[1].ideal().pow(e - i))).collect()
                }
                SplitKind::Inert => {
                    if e % 2 == 0 {
                        vec![primes[0].ideal().pow(e / 2)]
                    } else {
                        Vec::new()
                    }
                }
                SplitKind::Ramified => vec![primes[0].ideal().pow(e)],
            };
            acc = acc.iter().flat_map(|a| options.iter().map(move |o| a.mul(o))).collect();
        }
        acc.sort_by_key(|i| i.sort_key());
        acc
    }

    /// Dedekind zeta coefficients `r(m) = #{ideals of norm m}` for `m <= n`.
    pub fn zeta_coefficients(&self, n: usize) -> Vec<u32> {
        let mut chi = vec![0i32; n + 1];
        for (e, c) in chi.iter_mut().enumerate().skip(1) {
            *c = self.chi(e as i64);
        }
        let mut r = vec![0i64; n + 1];
        for e in 1..=n {
            if chi[e] == 0 {
                continue;
            }
            let mut m = e;
            while m <= n {
                r[m] += chi[e] as i64;
                m += e;
            }
        }
        r.into_iter().map(|v| v as u32).collect()
    }

    /// Number of integral ideals of norm at most `x`.
    pub fn count_ideals_upto(&self, x: f64) -> u64 {
        assert!(x >= 1.0);
        let n = x.floor() as usize;
        self.zeta_coefficients(n).iter().map(|&v| v as u64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(d: i64) -> QuadField {
        QuadField::new(d).unwrap()
    }

    #[test]
    fn signature() {
        assert_eq!((k(-4).r1(), k(-4).r2()), (0, 1));
        assert_eq!((k(5).r1(), k(5).r2()), (2, 0));
        assert!(QuadField::new(9).is_err());
        assert!(QuadField::new(1).is_err());
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(k(-4).splitting_type(5), SplitKind::Split);
        assert_eq!(k(-4).splitting_type(2), SplitKind::Ramified);
        assert_eq!(k(-4).splitting_type(3), SplitKind::Inert);
    }

    #[test]
    fn ideals_of_small_norm() {
        let f = k(-4);
        let five = f.ideals_of_norm(5);
        assert_eq!(five.len(), 2);
        assert_ne!(five[0], five[1]);
        assert!(f.ideals_of_norm(3).is_empty());
        // norm 4 in Z[i]: only (1+i)^2 = (2)
        let four = f.ideals_of_norm(4);
        assert_eq!(four, vec![QuadIdeal::from_element(&f.element(2, 0))]);
    }

    #[test]
    fn ideal_counts_match_divisor_sums() {
        for d in [-4i64, -3, 5, 8, -23, 40] {
            let f = k(d);
            for m in 1..=2000u64 {
                let brute: i64 = (1..=m).filter(|e| m % e == 0).map(|e| arith::kronecker(d, e as i64) as i64).sum();
                let ideals = f.ideals_of_norm(m);
                assert_eq!(ideals.len() as i64, brute, "disc {d} norm {m}");
                assert!(ideals.iter().all(|i| i.norm() == m));
            }
        }
    }

    #[test]
    fn count_upto_examples() {
        assert_eq!(k(-4).count_ideals_upto(1.0), 1);
        // r(1..5) for -4: 1,1,0,1,2
        assert_eq!(k(-4).count_ideals_upto(5.5), 5);
        // r(1..10) for 5: 1,0,0,1,1,0,0,0,1,0
        assert_eq!(k(5).count_ideals_upto(10.0), 4);
    }
}

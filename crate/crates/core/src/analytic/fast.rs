//! `f64` evaluation of `L(1, chi_d)` and `L(2, chi_d)` for many `d`, the
//! constant `C` and a memo table of these values.
//!
//! Every value is a finite sum over `1 <= a < q`:
//! * `L(1)`, odd: `-pi q^(-3/2) sum a chi(a)` (exact integer sum);
//! * `L(1)`, even: `(2/sqrt q) log(prod_{chi=-1} sin(pi a/q) / prod_{chi=1} sin(pi a/q))`;
//! * `L(2)`, even: `pi^2 q^(-5/2) sum a^2 chi(a)` (exact integer sum);
//! * `L(2)`, odd: `q^-2 sum chi(a) psi_1(a/q)`, folded onto `a < q/2` and
//!   written as `1/a^2 - 1/(q-a)^2 + q^-2 F(a/q - 1/2)` with
//!   `F(u) = psi_1(3/2 + u) - psi_1(3/2 - u)` summed from its Taylor series.

use crate::arith::{fundamental_discriminants, is_fundamental};
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{OnceLock, RwLock};

/// Environment variable naming the directory of the on-disk memo table.
pub const CACHE_DIR_VAR: &str = "QUARTIC_CENSUS_CACHE_DIR";
const CACHE_FILE: &str = "lvalues-f64-v1.txt";

/// `tail_bound(B) = K_TAIL (log B + 3) / B`, with `K_TAIL = 45/pi^4`.
pub const K_TAIL: f64 = 45.0 / (PI * PI * PI * PI);
/// Allowance for `f64` rounding, relative to the partial sum.
pub const ROUNDING_REL: f64 = 1e-10;

const ZETA2: f64 = PI * PI / 6.0;
const TAYLOR_TERMS: usize = 19;
const _: () = assert!(TAYLOR_TERMS == 19, "the split Horner loop below assumes 19 terms");

/// `zeta(s, 3/2)` for `s >= 3`.
fn hurwitz_three_halves(s: i32) -> f64 {
    const M: usize = 64;
    let z = M as f64 + 1.5;
    let sf = s as f64;
    let mut acc = z.powi(1 - s) / (sf - 1.0) + 0.5 * z.powi(-s) + sf * z.powi(-s - 1) / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * z.powi(-s - 3) / 720.0;
    for j in (0..M).rev() {
        acc += (j as f64 + 1.5).powi(-s);
    }
    acc
}

/// Taylor coefficients of `F(u) / u` in powers of `u^2`.
fn f_coefficients() -> &'static [f64; TAYLOR_TERMS] {
    static C: OnceLock<[f64; TAYLOR_TERMS]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; TAYLOR_TERMS];
        for (m, v) in c.iter_mut().enumerate() {
            let k = 2 * m as i32 + 1;
            *v = -2.0 * (k + 1) as f64 * hurwitz_three_halves(k + 2);
        }
        c
    })
}

/// Values of `chi_d` on `0..q`, as a product of the characters of the
/// prime discriminants dividing `d`.
#[derive(Default)]
pub struct LEvaluator {
    chi: Vec<i8>,
    tables: Vec<Vec<i8>>,
}

fn legendre_table(p: usize) -> Vec<i8> {
    let mut t = vec![-1i8; p];
    t[0] = 0;
    for x in 1..=p / 2 {
        t[x * x % p] = 1;
    }
    t
}

impl LEvaluator {
    fn fill(&mut self, d: i64, q: usize) {
        self.tables.clear();
        let mut m = q >> q.trailing_zeros();
        let mut p = 3;
        while p * p <= m {
            if m.is_multiple_of(p) {
                self.tables.push(legendre_table(p));
                m /= p;
            }
            p += 2;
        }
        if m > 1 {
            self.tables.push(legendre_table(m));
        }
        // 2-part of d: one of 1, -4, 8, -8; a period-8 table
        let odd: i64 = self
            .tables
            .iter()
            .map(|t| {
                let p = t.len() as i64;
                if p % 4 == 1 {
                    p
                } else {
                    -p
                }
            })
            .product();
        let two = match d / odd {
            1 => None,
            -4 => Some([0, 1, 0, -1, 0, 1, 0, -1]),
            8 => Some([0, 1, 0, -1, 0, -1, 0, 1]),
            -8 => Some([0, 1, 0, 1, 0, -1, 0, -1]),
            r => unreachable!("2-part {r} of fundamental discriminant {d}"),
        };
        if let Some(t) = two {
            self.tables.push(t.to_vec());
        }
        self.chi.clear();
        self.chi.resize(q, 1);
        for t in &self.tables {
            let p = t.len();
            let mut r = 0;
            for c in self.chi.iter_mut() {
                *c *= t[r];
                r += 1;
                if r == p {
                    r = 0;
                }
            }
        }
    }

    /// `(L(1, chi_d), L(2, chi_d))`.
    fn eval(&mut self, d: i64) -> (f64, f64) {
        let q = d.unsigned_abs() as usize;
        self.fill(d, q);
        let chi = &self.chi;
        let qf = q as f64;
        let half = (q - 1) / 2;
        if d < 0 {
            let w: i64 = (1..q).map(|a| a as i64 * chi[a] as i64).sum();
            let l1 = -PI * w as f64 / (qf * qf.sqrt());
            let c = f_coefficients();
            let (mut direct, mut smooth) = (0.0f64, 0.0f64);
            for (a, &x) in chi.iter().enumerate().take(half + 1).skip(1) {
                if x == 0 {
                    continue;
                }
                let af = a as f64;
                let b = qf - af;
                let u = af / qf - 0.5;
                let u2 = u * u;
                // two Horner chains in u^4
                let u4 = u2 * u2;
                let (mut fe, mut fo) = (c[18], c[17]);
                for m in (0..9).rev() {
                    fe = fe * u4 + c[2 * m];
                    if m > 0 {
                        fo = fo * u4 + c[2 * m - 1];
                    }
                }
                let f = fe + u2 * fo;
                let t = 1.0 / (af * af) - 1.0 / (b * b);
                let s = f * u;
                if x > 0 {
                    direct += t;
                    smooth += s;
                } else {
                    direct -= t;
                    smooth -= s;
                }
            }
            (l1, direct + smooth / (qf * qf))
        } else {
            let (mut pos, mut neg) = (1.0f64, 1.0f64);
            let mut log_ratio = 0.0f64;
            // sin(pi a/q) by rotation, re-anchored every 64 steps
            let (sd, cd) = (PI / qf).sin_cos();
            let (mut sn, mut cs) = (0.0f64, 1.0f64);
            for (a, &x) in chi.iter().enumerate().take(half + 1).skip(1) {
                if a % 64 == 0 {
                    (sn, cs) = (PI * a as f64 / qf).sin_cos();
                } else {
                    (sn, cs) = (sn * cd + cs * sd, cs * cd - sn * sd);
                }
                if x == 0 {
                    continue;
                }
                let s = sn;
                if x > 0 {
                    pos *= s;
                    if pos < 1e-250 {
                        log_ratio -= pos.ln();
                        pos = 1.0;
                    }
                } else {
                    neg *= s;
                    if neg < 1e-250 {
                        log_ratio += neg.ln();
                        neg = 1.0;
                    }
                }
            }
            log_ratio += neg.ln() - pos.ln();
            let l1 = 2.0 * log_ratio / qf.sqrt();
            let w: i128 = (1..q).map(|a| (a as i128) * (a as i128) * chi[a] as i128).sum();
            let l2 = PI * PI * w as f64 / (qf * qf * qf.sqrt());
            (l1, l2)
        }
    }
}

/// `(L(1, chi_d), L(2, chi_d))` in `f64`.
pub fn l_values_f64(d: i64) -> Result<(f64, f64)> {
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(LEvaluator::default().eval(d))
}

/// Memo table of `f64` L-values, optionally backed by a file.
pub struct LValueCache {
    dir: Option<PathBuf>,
    map: RwLock<HashMap<i64, (f64, f64)>>,
}

impl LValueCache {
    /// Opens the table, reading `dir`'s file when present. A missing or
    /// unreadable file starts an empty table.
    pub fn open(dir: Option<PathBuf>) -> Self {
        let mut map = HashMap::new();
        if let Some(text) = dir.as_ref().and_then(|d| std::fs::read_to_string(d.join(CACHE_FILE)).ok()) {
            for line in text.lines() {
                let mut it = line.split_whitespace();
                let parsed = (|| {
                    let d: i64 = it.next()?.parse().ok()?;
                    let a = u64::from_str_radix(it.next()?, 16).ok()?;
                    let b = u64::from_str_radix(it.next()?, 16).ok()?;
                    Some((d, (f64::from_bits(a), f64::from_bits(b))))
                })();
                if let Some((d, v)) = parsed {
                    if is_fundamental(d) {
                        map.insert(d, v);
                    }
                }
            }
        }
        LValueCache { dir, map: RwLock::new(map) }
    }

    /// The process-wide table, backed by `$QUARTIC_CENSUS_CACHE_DIR` if set.
    pub fn global() -> &'static LValueCache {
        static G: OnceLock<LValueCache> = OnceLock::new();
        G.get_or_init(|| LValueCache::open(std::env::var_os(CACHE_DIR_VAR).map(PathBuf::from)))
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values for each (fundamental) `d`, computing and recording the missing ones.
    pub fn get_many(&self, ds: &[i64]) -> Result<Vec<(f64, f64)>> {
        let missing: Vec<i64> = {
            let map = self.map.read().expect("cache lock");
            ds.iter().copied().filter(|d| !map.contains_key(d)).collect()
        };
        if !missing.is_empty() {
            if let Some(&bad) = missing.iter().find(|&&d| !is_fundamental(d)) {
                return Err(Error::NotFundamental(bad));
            }
            let fresh: Vec<(i64, (f64, f64))> =
                missing.par_iter().map_init(LEvaluator::default, |ev, &d| (d, ev.eval(d))).collect();
            let mut map = self.map.write().expect("cache lock");
            for (d, v) in fresh {
                map.entry(d).or_insert(v);
            }
            if let Some(dir) = &self.dir {
                persist(dir, &map)?;
            }
        }
        let map = self.map.read().expect("cache lock");
        Ok(ds.iter().map(|d| map[d]).collect())
    }

    pub fn get(&self, d: i64) -> Result<(f64, f64)> {
        Ok(self.get_many(&[d])?[0])
    }
}

fn persist(dir: &Path, map: &HashMap<i64, (f64, f64)>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut rows: Vec<_> = map.iter().collect();
    rows.sort_by_key(|(d, _)| **d);
    let tmp = dir.join(format!("{CACHE_FILE}.{}.tmp", std::process::id()));
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        for (d, (a, b)) in rows {
            writeln!(f, "{d} {:016x} {:016x}", a.to_bits(), b.to_bits())?;
        }
        f.flush()?;
    }
    std::fs::rename(&tmp, dir.join(CACHE_FILE))?;
    Ok(())
}

/// `L(1) / (2^r2 zeta(2) L(2))` in `f64`.
pub fn main_term_f64(d: i64) -> Result<f64> {
    let (l1, l2) = LValueCache::global().get(d)?;
    Ok(main_term_from(d, l1, l2))
}

pub(crate) fn main_term_from(d: i64, l1: f64, l2: f64) -> f64 {
    let r2 = if d < 0 { 2.0 } else { 1.0 };
    l1 / (r2 * ZETA2 * l2)
}

/// Explicit bound used for the tail: `L(1, chi_d) <= log|d| / 2 + 1`.
pub fn l1_upper_bound(d: i64) -> f64 {
    0.5 * (d.unsigned_abs() as f64).ln() + 1.0
}

/// Certified enclosure of `C` from the fields with `|Delta| <= B`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantCResult {
    pub truncation: u64,
    pub fields: usize,
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub rounding_bound: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ConstantCResult {
    pub fn value_interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `K_TAIL (log B + 3) / B`.
pub fn tail_bound(b: u64) -> f64 {
    let bf = b as f64;
    K_TAIL * (bf.ln() + 3.0) / bf
}

/// `C = 1/2 sum_k zeta_k^*(1) / (2^r2 Delta^2 zeta_k(2))`, summed over
/// `|Delta| <= B` in increasing `|Delta|`, plus the tail bound.
pub fn constant_c(b: u64) -> Result<ConstantCResult> {
    constant_c_with(LValueCache::global(), b)
}

pub fn constant_c_with(cache: &LValueCache, b: u64) -> Result<ConstantCResult> {
    if b < 3 {
        return Err(Error::InvalidArgument(format!("truncation {b} < 3")));
    }
    let ds: Vec<i64> = fundamental_discriminants(b).into_iter().map(|d| d.get()).collect();
    let vals = cache.get_many(&ds)?;
    // Neumaier summation
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (&d, &(l1, l2)) in ds.iter().zip(&vals) {
        if !(l1 > 0.0 && l1 <= l1_upper_bound(d) && l2 > 0.0) {
            return Err(Error::Invariant(format!("L(1, chi_{d}) = {l1} outside (0, log|d|/2 + 1]")));
        }
        let dd = (d as f64) * (d as f64);
        let t = 0.5 * main_term_from(d, l1, l2) / dd;
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
    }
    let partial_sum = sum + comp;
    let tail = tail_bound(b);
    let rounding = ROUNDING_REL * partial_sum;
    Ok(ConstantCResult {
        truncation: b,
        fields: ds.len(),
        partial_sum,
        tail_bound: tail,
        rounding_bound: rounding,
        lo: partial_sum - tail - rounding,
        hi: partial_sum + tail + rounding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_values() {
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let z3 = 1.2020569031595942;
        assert!((hurwitz_three_halves(3) - (7.0 * z3 - 8.0)).abs() < 1e-14);
        let z4 = PI.powi(4) / 90.0;
        assert!((hurwitz_three_halves(4) - (15.0 * z4 - 16.0)).abs() < 1e-14);
    }

    #[test]
    fn small_characters() {
        let (l1, l2) = l_values_f64(-4).unwrap();
        assert!((l1 - PI / 4.0).abs() < 1e-15);
        assert!((l2 - 0.915_965_594_177_219).abs() < 1e-14, "{l2}");
        let (l1, l2) = l_values_f64(5).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((l1 - 2.0 * phi.ln() / 5f64.sqrt()).abs() < 1e-15);
        assert!((l2 - 4.0 * PI * PI / (25.0 * 5f64.sqrt())).abs() < 1e-15);
        assert!(l_values_f64(9).is_err());
    }

    #[test]
    fn character_tables_match_kronecker() {
        let mut ev = LEvaluator::default();
        for d in fundamental_discriminants(3000) {
            let d = d.get();
            let q = d.unsigned_abs() as usize;
            ev.fill(d, q);
            for a in 0..q {
                assert_eq!(ev.chi[a] as i32, crate::arith::kronecker(d, a as i64), "d={d} a={a}");
            }
        }
    }

    #[test]
    fn tail_bound_decreases() {
        let mut prev = f64::INFINITY;
        for b in [3u64, 10, 100, 1000, 10_000, 100_000] {
            let t = tail_bound(b);
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn cache_round_trips_through_file() {
        let dir = std::env::temp_dir().join(format!("qc-cache-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let c = LValueCache::open(Some(dir.clone()));
        let v = c.get_many(&[-4, 5, -23, 8]).unwrap();
        let c2 = LValueCache::open(Some(dir.clone()));
        assert_eq!(c2.len(), 4);
        assert_eq!(c2.get_many(&[-4, 5, -23, 8]).unwrap(), v);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

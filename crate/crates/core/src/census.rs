//! Quartic fields with `|Delta_K| <= X` through their quadratic subfields.
//!
//! Summing the relative counts `N_k(X / Delta_k^2)` over quadratic `k` sees
//! each `D4` field twice, each `C4` field once and each `V4` field three
//! times. The census runs one field engine per `k`, audits the `D4`
//! multiplicity through the conjugation pairing, and checks `V4` against an
//! enumeration of discriminant triples.

use crate::analytic::fast::{main_term_from, tail_bound, LValueCache, K_TAIL};
use crate::analytic::{main_term_constant, to_f64};
use crate::arith::{disc_order_key, fundamental_discriminants, isqrt, squarefree_part};
use crate::counting::{FieldEngine, PrimeTable, TypeCounts};
use crate::quadfield::QuadField;
use crate::selmer::GaloisType;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};

/// One quadratic field's share of the census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldRow {
    pub disc: i64,
    /// `floor(X / Delta_k^2)`.
    pub bound: u64,
    pub count: u64,
    pub by_type: TypeCounts,
}

/// Outcome of the `D4` pairing audit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct D4Audit {
    pub descriptors: u64,
    pub pairs: u64,
}

/// Number of quartic fields with a given `|Delta_K|` and Galois type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiscRow {
    pub abs_disc: u64,
    pub galois_type: GaloisType,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusResult {
    pub x: u64,
    pub total: u64,
    pub n_d4: u64,
    pub n_c4: u64,
    pub n_v4: u64,
    pub per_field: Vec<FieldRow>,
    pub audit: Option<D4Audit>,
    pub disc_table: Option<Vec<DiscRow>>,
}

impl CensusResult {
    /// `total = 2 n_d4 + n_c4 + 3 n_v4`.
    pub fn identity_holds(&self) -> bool {
        self.total == 2 * self.n_d4 + self.n_c4 + 3 * self.n_v4
            && self.per_field.iter().map(|r| r.count).sum::<u64>() == self.total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusOptions {
    pub audit: bool,
    pub disc_table: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions { audit: true, disc_table: false }
    }
}

/// Quadratic fields with `|Delta| <= sqrt(X)`, in census order.
pub fn base_fields(x: u64) -> Vec<i64> {
    let mut ds: Vec<i64> = fundamental_discriminants(isqrt(x)).into_iter().map(|d| d.get()).collect();
    ds.sort_by_key(|&d| disc_order_key(d));
    ds
}

struct FieldOutcome {
    row: FieldRow,
    audit: Option<D4Audit>,
    hist: Vec<((u64, GaloisType), u64)>,
}

/// Alpha0 signatures of a node and its `D4` extensions `(u, N(rel disc))`.
struct D4Node {
    sig: u64,
    sig_conj: u64,
    entries: Vec<(usize, u64)>,
}

fn field_census(d: i64, x: u64, opts: CensusOptions) -> Result<FieldOutcome> {
    let k = QuadField::new(d)?;
    let dd = (d * d) as u64;
    let bound = x / dd;
    let eng = FieldEngine::new(&k)?;
    let mut table = eng.prime_table(bound)?;
    let aux = if opts.audit { Some(eng.attach_signatures(&mut table)?) } else { None };
    let rho = aux.as_ref().map(|a| eng.odd_rho_signatures(a));
    let mut by_type = TypeCounts::default();
    let mut hist: BTreeMap<(u64, GaloisType), u64> = BTreeMap::new();
    let mut nodes: HashMap<Vec<usize>, D4Node> = HashMap::new();
    eng.walk_squarefree(&table, bound, &mut |node| {
        let mut d4 = Vec::new();
        eng.node_extensions(node, bound, &mut |u, rel, t| {
            by_type.add(t, 1);
            if opts.disc_table {
                *hist.entry((rel * dd, t)).or_default() += 1;
            }
            if t == GaloisType::D4 {
                d4.push((u, rel));
            }
        });
        if opts.audit && !d4.is_empty() {
            let (_, _, sig, sig_conj) = eng.alpha0_data(node, rho.as_deref());
            nodes.insert(node.path.to_vec(), D4Node { sig, sig_conj, entries: d4 });
        }
    });
    let audit = match &aux {
        Some(a) => Some(audit_d4(&eng, &table, &eng.selmer_signatures(a), &nodes)?),
        None => None,
    };
    Ok(FieldOutcome {
        row: FieldRow { disc: d, bound, count: by_type.total(), by_type },
        audit,
        hist: hist.into_iter().collect(),
    })
}

/// Pairs every `D4` descriptor `(a, u)` with the one describing the
/// conjugate extension, `(sigma a, u')`, and checks that this is a
/// fixed-point-free involution on `D4` descriptors of equal relative norm.
fn audit_d4(
    eng: &FieldEngine,
    table: &PrimeTable,
    selmer_sigs: &[(u64, u64)],
    nodes: &HashMap<Vec<usize>, D4Node>,
) -> Result<D4Audit> {
    let disc = eng.field().disc();
    let orphan = |path: &[usize], u: usize| {
        Error::Invariant(format!("D4 descriptor without partner: disc {disc}, primes {path:?}, unit {u}"))
    };
    let mut by_sig: HashMap<u64, usize> = HashMap::new();
    for (u, &(s, _)) in selmer_sigs.iter().enumerate() {
        if by_sig.insert(s, u).is_some() {
            return Err(Error::Invariant(format!("auxiliary primes do not separate S(k) for disc {disc}")));
        }
    }
    let conj_path = |path: &[usize]| {
        let mut p: Vec<usize> = path.iter().map(|&i| table.entries[i].conj).collect();
        p.sort_unstable();
        p
    };
    let partner = |path: &[usize], n: &D4Node, u: usize| -> Option<(Vec<usize>, usize)> {
        let sp = conj_path(path);
        let m = nodes.get(&sp)?;
        let target = n.sig_conj ^ selmer_sigs[u].1 ^ m.sig;
        let u2 = *by_sig.get(&target)?;
        Some((sp, u2))
    };
    let mut audit = D4Audit::default();
    // visit in a fixed order so that the first error reported is deterministic
    let mut keys: Vec<&Vec<usize>> = nodes.keys().collect();
    keys.sort();
    for path in keys {
        let n = &nodes[path];
        for &(u, rel) in &n.entries {
            audit.descriptors += 1;
            let (sp, u2) = partner(path, n, u).ok_or_else(|| orphan(path, u))?;
            let m = &nodes[&sp];
            if !m.entries.contains(&(u2, rel)) {
                return Err(orphan(path, u));
            }
            if sp == *path && u2 == u {
                return Err(Error::Invariant(format!(
                    "D4 descriptor is its own conjugate: disc {disc}, primes {path:?}"
                )));
            }
            if partner(&sp, m, u2) != Some((path.clone(), u)) {
                return Err(Error::Invariant(format!("conjugation pairing is not an involution at disc {disc}")));
            }
        }
    }
    if audit.descriptors % 2 != 0 {
        return Err(Error::Invariant(format!("odd number of D4 descriptors for disc {disc}")));
    }
    audit.pairs = audit.descriptors / 2;
    Ok(audit)
}

/// The census at `X`: every quadratic `k` with `|Delta_k| <= sqrt(X)`, with
/// the `D4` audit.
pub fn quad_over_quad_total(x: u64) -> Result<CensusResult> {
    census(x, CensusOptions::default())
}

pub fn census(x: u64, opts: CensusOptions) -> Result<CensusResult> {
    if x == 0 {
        return Err(Error::InvalidArgument("census bound must be >= 1".into()));
    }
    let outcomes: Vec<FieldOutcome> =
        base_fields(x).into_par_iter().map(|d| field_census(d, x, opts)).collect::<Result<_>>()?;
    let mut types = TypeCounts::default();
    let mut audit = opts.audit.then(D4Audit::default);
    let mut hist: BTreeMap<(u64, GaloisType), u64> = BTreeMap::new();
    let mut per_field = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        types.merge(&o.row.by_type);
        if let (Some(a), Some(b)) = (audit.as_mut(), o.audit) {
            a.descriptors += b.descriptors;
            a.pairs += b.pairs;
        }
        for (key, c) in o.hist {
            *hist.entry(key).or_default() += c;
        }
        per_field.push(o.row);
    }
    if types.d4 % 2 != 0 || types.v4 % 3 != 0 {
        return Err(Error::Invariant(format!("multiplicities fail at X = {x}: {types:?}")));
    }
    let disc_table = if opts.disc_table {
        let mut rows = Vec::with_capacity(hist.len());
        for ((abs_disc, t), c) in hist {
            let m = match t {
                GaloisType::D4 => 2,
                GaloisType::C4 => 1,
                GaloisType::V4 => 3,
            };
            if c % m != 0 {
                return Err(Error::Invariant(format!("{c} {t} descriptors at |disc| {abs_disc}")));
            }
            rows.push(DiscRow { abs_disc, galois_type: t, count: c / m });
        }
        Some(rows)
    } else {
        None
    };
    Ok(CensusResult {
        x,
        total: types.total(),
        n_d4: types.d4 / 2,
        n_c4: types.c4,
        n_v4: types.v4 / 3,
        per_field,
        audit,
        disc_table,
    })
}

/// `N_4(D4, X)` with the pairing audit.
pub fn d4_exact(x: u64) -> Result<(u64, D4Audit)> {
    let r = quad_over_quad_total(x)?;
    Ok((r.n_d4, r.audit.unwrap_or_default()))
}

/// Fundamental discriminant of `Q(sqrt(n))`.
fn fundamental_of(n: i64) -> i64 {
    let m = squarefree_part(n);
    if m.rem_euclid(4) == 1 {
        m
    } else {
        4 * m
    }
}

/// `V4` fields with `|Delta_K| <= X`: unordered triples of distinct
/// fundamental discriminants `{d1, d2, d3}`, `d3` the discriminant of
/// `Q(sqrt(d1 d2))`, with `|d1 d2 d3| <= X`.
pub fn v4_independent(x: u64) -> u64 {
    v4_triples(x).len() as u64
}

/// The triples behind [`v4_independent`], each sorted by `(|d|, sign)`.
pub fn v4_triples(x: u64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    let cube = (x as f64).cbrt() as u64 + 1;
    let all: Vec<i64> = {
        let mut v: Vec<i64> = fundamental_discriminants(isqrt(x / 3).max(1)).into_iter().map(|d| d.get()).collect();
        v.sort_by_key(|&d| disc_order_key(d));
        v
    };
    for (i, &d1) in all.iter().enumerate() {
        let a1 = d1.unsigned_abs();
        if a1 > cube {
            break;
        }
        for &d2 in &all[i + 1..] {
            let a2 = d2.unsigned_abs();
            // |d3| >= |d2|
            if (a1 as u128) * (a2 as u128) * (a2 as u128) > x as u128 {
                break;
            }
            let d3 = fundamental_of(d1 * d2);
            if disc_order_key(d3) <= disc_order_key(d2) {
                continue;
            }
            if (a1 as u128) * (a2 as u128) * (d3.unsigned_abs() as u128) <= x as u128 {
                out.push([d1, d2, d3]);
            }
        }
    }
    out
}

/// Parses `start:end:logN` (N points per decade) or `start:end:linN`
/// (N points) into a sorted list of distinct integers `>= 1`.
pub fn parse_grid(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidArgument(format!("grid {text:?} is not start:end:logN or start:end:linN"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    if !(start >= 1.0 && end >= start && end.is_finite()) {
        return Err(bad());
    }
    let step = parts[2].trim();
    let mut out: Vec<u64> = if let Some(n) = step.strip_prefix("log") {
        let n: u32 = n.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        let (l0, l1) = (start.log10(), end.log10());
        let steps = ((l1 - l0) * n as f64).round() as u64;
        (0..=steps).map(|i| 10f64.powf(l0 + i as f64 / n as f64).round() as u64).collect()
    } else if let Some(n) = step.strip_prefix("lin") {
        let n: u64 = n.parse().map_err(|_| bad())?;
        if n < 2 {
            return Err(bad());
        }
        (0..n).map(|i| (start + (end - start) * i as f64 / (n - 1) as f64).round() as u64).collect()
    } else {
        return Err(bad());
    };
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub y: u64,
    pub count: u64,
    pub main: f64,
    pub error: f64,
    /// `|E_k(Y)| / (|Delta|^(1/3) Y^(1/2) (1 + log Y))`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorScan {
    pub disc: i64,
    pub main_term: f64,
    pub rows: Vec<ScanRow>,
    pub sup_ratio: f64,
}

/// `E_k(Y) = N_k(Y) - c_k Y` on a grid, from a single walk to the largest `Y`.
pub fn error_scan(k: &QuadField, grid: &[u64]) -> Result<ErrorScan> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] == 0 {
        return Err(Error::InvalidArgument("grid must be increasing and start at 1 or more".into()));
    }
    let c = to_f64(&main_term_constant(k)?);
    let ymax = *grid.last().expect("nonempty");
    let eng = FieldEngine::new(k)?;
    let table = eng.prime_table(ymax)?;
    let mut rels: Vec<u64> = Vec::new();
    eng.walk_squarefree(&table, ymax, &mut |node| {
        eng.node_extensions(node, ymax, &mut |_, rel, _| rels.push(rel));
    });
    rels.sort_unstable();
    let scale = (k.disc().unsigned_abs() as f64).cbrt();
    let rows = grid
        .iter()
        .map(|&y| {
            let count = rels.partition_point(|&r| r <= y) as u64;
            let yf = y as f64;
            let main = c * yf;
            let error = count as f64 - main;
            let ratio = error.abs() / (scale * yf.sqrt() * (1.0 + yf.ln()));
            ScanRow { y, count, main, error, ratio }
        })
        .collect::<Vec<_>>();
    let sup_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(ErrorScan { disc: k.disc(), main_term: c, rows, sup_ratio })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZSplitRow {
    pub label: &'static str,
    pub z: f64,
    /// `sum_{|Delta| <= Z} |E_k(X / Delta^2)|`.
    pub measured: f64,
    /// `sum_{Z < |Delta| <= sqrt X} |S(k)| #{a : N(a) <= X / Delta^2}`.
    pub crude: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZSplitReport {
    pub x: u64,
    pub rows: Vec<ZSplitRow>,
    pub best: &'static str,
    /// Upper estimate of `sum_{|Delta| > sqrt X} c_k / Delta^2`.
    pub tail_sum: f64,
    /// `6 K_TAIL X^(-1/2) (1 + log X)`.
    pub tail_shape: f64,
}

/// Per-field pieces of the split: `(|Delta|, |E_k|, crude bound)`.
fn split_pieces(x: u64) -> Result<Vec<(u64, f64, f64)>> {
    let ds = base_fields(x);
    let mains = LValueCache::global().get_many(&ds)?;
    ds.par_iter()
        .zip(mains.par_iter())
        .map(|(&d, &(l1, l2))| {
            let k = QuadField::new(d)?;
            let y = x / (d * d) as u64;
            let eng = FieldEngine::new(&k)?;
            let n = eng.count_direct(y as f64, false)?.total;
            let c = main_term_from(d, l1, l2);
            let e = (n as f64 - c * y as f64).abs();
            let crude = eng.selmer_order() as f64 * k.count_ideals_upto(y as f64) as f64;
            Ok((d.unsigned_abs(), e, crude))
        })
        .collect()
}

pub fn z_split_experiment(x: u64) -> Result<ZSplitReport> {
    if x < 16 {
        return Err(Error::InvalidArgument(format!("X = {x} < 16")));
    }
    let pieces = split_pieces(x)?;
    let xf = x as f64;
    let mut rows = Vec::new();
    for (label, e) in [("X^1/4", 0.25), ("X^3/8", 0.375), ("X^1/2", 0.5)] {
        let z = xf.powf(e);
        let (mut measured, mut crude) = (0.0, 0.0);
        for &(a, err, cr) in &pieces {
            if (a as f64) <= z {
                measured += err;
            } else {
                crude += cr;
            }
        }
        rows.push(ZSplitRow { label, z, measured, crude, total: measured + crude });
    }
    let best = rows
        .iter()
        .min_by(|a, b| a.total.partial_cmp(&b.total).expect("finite totals"))
        .map(|r| r.label)
        .expect("three rows");
    let root = isqrt(x);
    let b = (10 * root).max(1000);
    let ds: Vec<i64> =
        fundamental_discriminants(b).into_iter().map(|d| d.get()).filter(|d| d.unsigned_abs() > root).collect();
    let vals = LValueCache::global().get_many(&ds)?;
    let mut tail_sum = 2.0 * tail_bound(b);
    for (&d, &(l1, l2)) in ds.iter().zip(&vals) {
        tail_sum += main_term_from(d, l1, l2) / (d as f64 * d as f64);
    }
    let tail_shape = 6.0 * K_TAIL * (1.0 + xf.ln()) / xf.sqrt();
    Ok(ZSplitReport { x, rows, best, tail_sum, tail_shape })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondaryFit {
    pub grid: Vec<u64>,
    pub counts: Vec<u64>,
    pub fitted_d: f64,
    pub residuals: Vec<f64>,
    /// Residual divided by `X^(1/2) (log X)^2`.
    pub relative_residuals: Vec<f64>,
    /// The conditional secondary term `-(3/2) D X^(1/2) (log X)^2`.
    pub secondary_prediction: Vec<f64>,
}

fn shape(x: f64) -> f64 {
    x.sqrt() * x.ln().powi(2)
}

/// Least-squares `D` in `y = D X^(1/2) (log X)^2`.
pub fn fit_shape(xs: &[u64], ys: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let f = shape(x as f64);
        num += f * y;
        den += f * f;
    }
    num / den
}

/// Fits `N_4(V4, X) = D X^(1/2) (log X)^2` to the triple enumeration.
pub fn secondary_fit(grid: &[u64]) -> Result<SecondaryFit> {
    let (Some(&lo), Some(&hi)) = (grid.first(), grid.last()) else {
        return Err(Error::InvalidArgument("empty grid".into()));
    };
    if lo < 2 || hi < 100 * lo {
        return Err(Error::InvalidArgument("grid must start at 2 or more and span two decades".into()));
    }
    let counts: Vec<u64> = grid.par_iter().map(|&x| v4_independent(x)).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let d = fit_shape(grid, &ys);
    let mut residuals = Vec::new();
    let mut relative_residuals = Vec::new();
    let mut secondary_prediction = Vec::new();
    for (&x, &y) in grid.iter().zip(&ys) {
        let f = shape(x as f64);
        residuals.push(y - d * f);
        relative_residuals.push((y - d * f) / f);
        secondary_prediction.push(-1.5 * d * f);
    }
    Ok(SecondaryFit { grid: grid.to_vec(), counts, fitted_d: d, residuals, relative_residuals, secondary_prediction })
}

/// One line of the engine comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineRow {
    pub disc: i64,
    pub y: u64,
    pub direct: u64,
    pub characters: i128,
}

/// Both engines for every fundamental `|Delta| <= max_disc` and `Y = 2^j`,
/// `j <= max_j`.
pub fn engine_table(max_disc: u64, max_j: u32) -> Result<Vec<EngineRow>> {
    let mut ds: Vec<i64> = fundamental_discriminants(max_disc).into_iter().map(|d| d.get()).collect();
    ds.sort_by_key(|&d| disc_order_key(d));
    let per: Vec<Vec<EngineRow>> = ds
        .into_par_iter()
        .map(|d| {
            let eng = FieldEngine::new(&QuadField::new(d)?)?;
            let table = eng.prime_table(1 << max_j)?;
            (0..=max_j)
                .map(|j| {
                    let y = 1u64 << j;
                    Ok(EngineRow {
                        disc: d,
                        y,
                        direct: eng.count_direct_with(&table, y, false)?.total,
                        characters: eng.count_characters_with(&table, y)?,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

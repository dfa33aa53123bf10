//! Raptor-like codes: a base matrix at the highest grid rate plus an
//! ordered list of extension checks, each bringing one new degree-1 parity bit.

use std::collections::HashSet;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encoder::Encoder;
use super::matrix::ParityCheckMatrix;
use crate::error::{invalid, Error, Result};

const MAGIC: &[u8; 4] = b"RLCS";
pub const CONTAINER_VERSION: u16 = 1;

/// Block-length bounds enforced outside test scale.
pub const PRODUCTION_MIN_N: usize = 100_000;
pub const PRODUCTION_MAX_N: usize = 2_000_000;

/// Relative slack allowed when flooring a rate onto the grid.
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    seed: u64,
    k: usize,
    base: ParityCheckMatrix,
    /// Row `j` lists its connections among the first `n_base + j` columns; its own
    /// parity is column `n_base + j` and is not stored.
    extension: Vec<Vec<u32>>,
    /// Number of extension rows in use at each grid point, strictly increasing.
    grid: Vec<usize>,
}

impl CodeSpec {
    /// Assembles a spec, computing the dimension from the base matrix.
    pub fn new(seed: u64, base: ParityCheckMatrix, extension: Vec<Vec<u32>>, grid: Vec<usize>) -> Result<Self> {
        let n_base = base.n_vars();
        for (j, row) in extension.iter().enumerate() {
            let mut sorted = row.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != row.len() {
                return Err(invalid(format!("extension row {j} lists a column twice")));
            }
            if row.iter().any(|&c| c as usize >= n_base + j) {
                return Err(invalid(format!("extension row {j} reaches a column not yet defined")));
            }
        }
        if grid.is_empty() {
            return Err(invalid("rate grid is empty"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("rate grid must be strictly decreasing in rate"));
        }
        if *grid.last().unwrap() > extension.len() {
            return Err(invalid("rate grid needs more extension rows than the schedule holds"));
        }
        let k = Encoder::new(&base)?.k();
        if k == 0 {
            return Err(invalid("base matrix has no information bits"));
        }
        Ok(Self { seed, k, base, extension, grid })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Information bits per frame.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_base(&self) -> usize {
        self.base.n_vars()
    }

    pub fn base(&self) -> &ParityCheckMatrix {
        &self.base
    }

    pub fn extension(&self) -> &[Vec<u32>] {
        &self.extension
    }

    pub fn grid_rows(&self) -> &[usize] {
        &self.grid
    }

    /// Rate with `p` extension rows.
    pub fn rate_with(&self, p: usize) -> f64 {
        self.k as f64 / (self.n_base() + p) as f64
    }

    /// Supported rates, descending.
    pub fn rates(&self) -> Vec<f64> {
        self.grid.iter().map(|&p| self.rate_with(p)).collect()
    }

    pub fn max_rate(&self) -> f64 {
        self.rate_with(self.grid[0])
    }

    pub fn min_rate(&self) -> f64 {
        self.rate_with(*self.grid.last().unwrap())
    }

    /// Extension rows in use at `rate`. Both the exact grid rate and the nominal rate
    /// it was derived from (`k / round(k / r)`) are accepted.
    pub fn rows_for_rate(&self, rate: f64) -> Result<usize> {
        if !(rate > 0.0) {
            return Err(Error::RateNotOnGrid(rate));
        }
        let n = (self.k as f64 / rate).round();
        if n < self.n_base() as f64 {
            return Err(Error::RateNotOnGrid(rate));
        }
        let p = n as usize - self.n_base();
        self.grid.binary_search(&p).map(|_| p).map_err(|_| Error::RateNotOnGrid(rate))
    }

    /// Largest grid rate not exceeding `rate`.
    pub fn floor_rate(&self, rate: f64) -> Option<f64> {
        self.rates().into_iter().find(|&r| r <= rate * (1.0 + GRID_TOL))
    }

    pub fn block_length(&self, rate: f64) -> Result<usize> {
        Ok(self.n_base() + self.rows_for_rate(rate)?)
    }

    /// Whether every grid block length lies within the production bounds.
    pub fn is_production_scale(&self) -> bool {
        self.grid.iter().all(|&p| (PRODUCTION_MIN_N..=PRODUCTION_MAX_N).contains(&(self.n_base() + p)))
    }

    /// Parity-check matrix of the subcode with `p` extension rows.
    pub fn matrix_with(&self, p: usize) -> ParityCheckMatrix {
        let n_base = self.n_base();
        let mut rows = self.base.rows().to_vec();
        for (j, row) in self.extension[..p].iter().enumerate() {
            let mut r = row.clone();
            r.push((n_base + j) as u32);
            rows.push(r);
        }
        ParityCheckMatrix::new(n_base + p, rows).expect("extension rows are validated on construction")
    }

    pub fn matrix_at(&self, rate: f64) -> Result<ParityCheckMatrix> {
        Ok(self.matrix_with(self.rows_for_rate(rate)?))
    }

    pub fn syndrome(&self, rate: f64, word: &[u8]) -> Result<Vec<u8>> {
        self.matrix_at(rate)?.syndrome(word)
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&CONTAINER_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.seed.to_le_bytes());
        for v in [self.k, self.n_base(), self.base.n_checks()] {
            buf.extend_from_slice(&(v as u64).to_le_bytes());
        }
        let put_row = |buf: &mut Vec<u8>, row: &[u32]| {
            buf.extend_from_slice(&(row.len() as u32).to_le_bytes());
            for &c in row {
                buf.extend_from_slice(&c.to_le_bytes());
            }
        };
        for row in self.base.rows() {
            put_row(&mut buf, row);
        }
        buf.extend_from_slice(&(self.extension.len() as u64).to_le_bytes());
        for row in &self.extension {
            put_row(&mut buf, row);
        }
        buf.extend_from_slice(&(self.grid.len() as u64).to_le_bytes());
        for &p in &self.grid {
            buf.extend_from_slice(&(p as u64).to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write_to(&mut v).expect("writing to memory cannot fail");
        v
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::Parse("not a code container".into()));
        }
        let version = u16::from_le_bytes(cur.take(2)?.try_into().unwrap());
        if version != CONTAINER_VERSION {
            return Err(Error::Parse(format!("unsupported container version {version}")));
        }
        let seed = cur.u64()?;
        let k = cur.u64()? as usize;
        let n_base = cur.u64()? as usize;
        let m_base = cur.u64()? as usize;
        let base_rows = (0..m_base).map(|_| cur.row()).collect::<Result<Vec<_>>>()?;
        let n_ext = cur.u64()? as usize;
        let extension = (0..n_ext).map(|_| cur.row()).collect::<Result<Vec<_>>>()?;
        let n_grid = cur.u64()? as usize;
        let grid = (0..n_grid).map(|_| Ok(cur.u64()? as usize)).collect::<Result<Vec<_>>>()?;
        if cur.pos != bytes.len() {
            return Err(Error::Parse("trailing bytes after code container".into()));
        }
        let base = ParityCheckMatrix::new(n_base, base_rows)?;
        let spec = Self::new(seed, base, extension, grid)?;
        if spec.k != k {
            return Err(Error::Parse(format!("container claims k = {k}, matrix has k = {}", spec.k)));
        }
        Ok(spec)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Parse("code container is truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn row(&mut self) -> Result<Vec<u32>> {
        let len = self.u32()? as usize;
        if len > self.bytes.len() {
            return Err(Error::Parse("code container is truncated".into()));
        }
        (0..len).map(|_| self.u32()).collect()
    }
}

/// Degree distribution given as `(degree, fraction)` pairs.
pub type DegreeProfile = Vec<(usize, f64)>;

/// High-rate code: information columns with the given degrees and an accumulator
/// (dual-diagonal) parity part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HrcParams {
    pub rate: f64,
    pub info_degrees: DegreeProfile,
}

/// How extension checks are wired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionParams {
    /// Connections per check, not counting its own parity bit.
    pub degrees: DegreeProfile,
    /// Probability that a connection lands on an earlier extension parity rather than
    /// on a base column.
    #[serde(default)]
    pub parity_share: f64,
}

/// Grid of nominal rates; each is mapped to the nearest whole number of extension rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateGrid {
    Step { max: f64, min: f64, step: f64 },
    List { rates: Vec<f64> },
}

impl RateGrid {
    pub fn nominal(&self) -> Result<Vec<f64>> {
        let mut rates = match self {
            RateGrid::Step { max, min, step } => {
                if !(step > &0.0) || min > max {
                    return Err(invalid("rate grid needs step > 0 and min <= max"));
                }
                let n = ((max - min) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| max - i as f64 * step).collect::<Vec<_>>()
            }
            RateGrid::List { rates } => rates.clone(),
        };
        rates.sort_by(|a, b| b.total_cmp(a));
        rates.dedup();
        if rates.iter().any(|&r| !(0.01 - 1e-12..=0.2 + 1e-12).contains(&r)) {
            return Err(invalid("code rates must lie in [0.01, 0.2]"));
        }
        Ok(rates)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeParams {
    pub seed: u64,
    pub info_bits: usize,
    pub hrc: HrcParams,
    pub extension: ExtensionParams,
    pub grid: RateGrid,
    #[serde(default = "yes")]
    pub avoid_4_cycles: bool,
}

fn yes() -> bool {
    true
}

impl CodeParams {
    /// Desk-scale default: 1000 information bits, block length 10^4 at rate 0.1.
    pub fn desk(seed: u64) -> Self {
        Self {
            seed,
            info_bits: 1000,
            hrc: HrcParams { rate: 0.75, info_degrees: vec![(3, 1.0)] },
            extension: ExtensionParams { degrees: vec![(2, 0.2), (3, 0.8)], parity_share: 0.03 },
            grid: RateGrid::Step { max: 0.2, min: 0.01, step: 0.001 },
            avoid_4_cycles: true,
        }
    }
}

/// Integer counts summing to `total` in the proportions of `profile`.
fn apportion(profile: &[(usize, f64)], total: usize) -> Result<Vec<(usize, usize)>> {
    let weight: f64 = profile.iter().map(|p| p.1).sum();
    if profile.is_empty() || !(weight > 0.0) || profile.iter().any(|p| p.0 == 0 || p.1 < 0.0) {
        return Err(invalid("degree profile needs positive degrees and nonnegative weights"));
    }
    let mut counts: Vec<(usize, usize)> =
        profile.iter().map(|&(d, w)| (d, (w / weight * total as f64).floor() as usize)).collect();
    let mut short = total - counts.iter().map(|c| c.1).sum::<usize>();
    let mut i = 0;
    while short > 0 {
        if profile[i % profile.len()].1 > 0.0 {
            counts[i % profile.len()].1 += 1;
            short -= 1;
        }
        i += 1;
    }
    Ok(counts)
}

struct PairSet {
    enabled: bool,
    pairs: HashSet<u64>,
}

impl PairSet {
    fn key(a: u32, b: u32) -> u64 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        ((lo as u64) << 32) | hi as u64
    }

    fn clashes(&self, chosen: &[u32], c: u32) -> bool {
        self.enabled && chosen.iter().any(|&s| self.pairs.contains(&Self::key(s, c)))
    }

    fn add_row(&mut self, row: &[u32]) {
        if !self.enabled {
            return;
        }
        for (i, &a) in row.iter().enumerate() {
            for &b in &row[i + 1..] {
                self.pairs.insert(Self::key(a, b));
            }
        }
    }
}

/// Picks `degree` distinct columns from `pool`, preferring lightly used ones and avoiding
/// pairs that already share a check when possible.
fn pick_balanced(rng: &mut ChaCha8Rng, pool: &[u32], usage: &mut [u32], degree: usize, pairs: &PairSet) -> Vec<u32> {
    let mut chosen: Vec<u32> = Vec::with_capacity(degree);
    for _ in 0..degree {
        let mut best: Option<u32> = None;
        for attempt in 0..64 {
            let a = pool[rng.random_range(0..pool.len())];
            let b = pool[rng.random_range(0..pool.len())];
            let c = if usage[a as usize] <= usage[b as usize] { a } else { b };
            if chosen.contains(&c) {
                continue;
            }
            if best.is_none() {
                best = Some(c);
            }
            if !pairs.clashes(&chosen, c) {
                best = Some(c);
                break;
            }
            if attempt == 63 {
                break;
            }
        }
        let c = match best {
            Some(c) => c,
            None => *pool.iter().find(|c| !chosen.contains(c)).expect("pool larger than degree"),
        };
        usage[c as usize] += 1;
        chosen.push(c);
    }
    chosen.sort_unstable();
    chosen
}

/// Extension checks for a base of `n_base` columns. Connections to base columns are
/// drawn from `base_pool`.
fn extension_rows(
    rng: &mut ChaCha8Rng,
    params: &ExtensionParams,
    n_base: usize,
    base_pool: &[u32],
    count: usize,
    pairs: &mut PairSet,
) -> Result<Vec<Vec<u32>>> {
    if !(0.0..1.0).contains(&params.parity_share) {
        return Err(invalid("parity_share must lie in [0, 1)"));
    }
    let mut degrees: Vec<usize> =
        apportion(&params.degrees, count)?.into_iter().flat_map(|(d, c)| std::iter::repeat_n(d, c)).collect();
    degrees.shuffle(rng);
    let max_deg = degrees.iter().copied().max().unwrap_or(0);
    if max_deg > base_pool.len() {
        return Err(invalid("extension degree exceeds the number of base columns"));
    }
    let mut usage = vec![0u32; n_base + count];
    let mut rows = Vec::with_capacity(count);
    let mut parity_pool: Vec<u32> = Vec::new();
    for (j, &d) in degrees.iter().enumerate() {
        let from_parity = (0..d)
            .filter(|_| !parity_pool.is_empty() && rng.random::<f64>() < params.parity_share)
            .count()
            .min(parity_pool.len());
        let mut row = pick_balanced(rng, base_pool, &mut usage, d - from_parity, pairs);
        if from_parity > 0 {
            let mut extra = pick_balanced(rng, &parity_pool, &mut usage, from_parity, pairs);
            row.append(&mut extra);
            row.sort_unstable();
        }
        let mut with_own = row.clone();
        with_own.push((n_base + j) as u32);
        pairs.add_row(&with_own);
        parity_pool.push((n_base + j) as u32);
        rows.push(row);
    }
    Ok(rows)
}

fn grid_rows(k: usize, n_base: usize, nominal: &[f64]) -> Result<Vec<usize>> {
    let mut grid = Vec::with_capacity(nominal.len());
    for &r in nominal {
        let n = (k as f64 / r).round() as usize;
        if n < n_base {
            return Err(invalid(format!("rate {r} is above the base rate {}", k as f64 / n_base as f64)));
        }
        let p = n - n_base;
        if grid.last().is_some_and(|&last| last >= p) {
            return Err(invalid(format!("rate grid too fine for k = {k} near rate {r}")));
        }
        grid.push(p);
    }
    Ok(grid)
}

/// Builds a raptor-like code: an accumulator-based high-rate code extended by degree-1
/// parity checks down to the top grid rate (the base code) and on to the lowest rate
/// (the schedule). Deterministic for a given parameter set.
pub fn build_code(params: &CodeParams) -> Result<CodeSpec> {
    let k = params.info_bits;
    if k < 8 {
        return Err(invalid("need at least 8 information bits"));
    }
    if !(params.hrc.rate > 0.2 && params.hrc.rate < 1.0) {
        return Err(invalid("high-rate code rate must lie in (0.2, 1)"));
    }
    let nominal = params.grid.nominal()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pairs = PairSet { enabled: params.avoid_4_cycles, pairs: HashSet::new() };

    let n_h = (k as f64 / params.hrc.rate).round() as usize;
    let m_h = n_h - k;
    let mut hrc_rows: Vec<Vec<u32>> = vec![Vec::new(); m_h];
    for j in 0..m_h {
        hrc_rows[j].push((k + j) as u32);
        if j > 0 {
            hrc_rows[j].push((k + j - 1) as u32);
        }
    }
    let mut info_deg: Vec<usize> =
        apportion(&params.hrc.info_degrees, k)?.into_iter().flat_map(|(d, c)| std::iter::repeat_n(d, c)).collect();
    info_deg.shuffle(&mut rng);
    if info_deg.iter().any(|&d| d > m_h) {
        return Err(invalid("information degree exceeds the number of high-rate checks"));
    }
    let rows_pool: Vec<u32> = (0..m_h as u32).collect();
    let mut row_usage = vec![0u32; m_h];
    let mut row_sets: Vec<HashSet<u32>> = vec![HashSet::new(); m_h];
    for (v, &d) in info_deg.iter().enumerate() {
        // Choose checks for this variable; a pair of checks already sharing a variable
        // would close a 4-cycle, so track check pairs through the variable sets.
        let mut chosen: Vec<u32> = Vec::with_capacity(d);
        for _ in 0..d {
            let mut pick = None;
            for _ in 0..64 {
                let a = rows_pool[rng.random_range(0..m_h)];
                let b = rows_pool[rng.random_range(0..m_h)];
                let r = if row_usage[a as usize] <= row_usage[b as usize] { a } else { b };
                if chosen.contains(&r) {
                    continue;
                }
                let clash = params.avoid_4_cycles
                    && chosen.iter().any(|&s| row_sets[s as usize].iter().any(|x| row_sets[r as usize].contains(x)));
                pick.get_or_insert(r);
                if !clash {
                    pick = Some(r);
                    break;
                }
            }
            let r = pick.unwrap_or_else(|| *rows_pool.iter().find(|r| !chosen.contains(r)).unwrap());
            row_usage[r as usize] += 1;
            chosen.push(r);
        }
        for &r in &chosen {
            hrc_rows[r as usize].push(v as u32);
            row_sets[r as usize].insert(v as u32);
        }
    }
    for row in &mut hrc_rows {
        row.sort_unstable();
        pairs.add_row(row);
    }

    let n_top = (k as f64 / nominal[0]).round() as usize;
    if n_top < n_h {
        return Err(invalid("top grid rate exceeds the high-rate code"));
    }
    let p0 = n_top - n_h;
    let n_bottom = (k as f64 / nominal[nominal.len() - 1]).round() as usize;
    let total_ext = n_bottom - n_h;
    let hrc_pool: Vec<u32> = (0..n_h as u32).collect();
    let ext = extension_rows(&mut rng, &params.extension, n_h, &hrc_pool, total_ext, &mut pairs)?;

    let mut base_rows = hrc_rows;
    for (j, row) in ext[..p0].iter().enumerate() {
        let mut r = row.clone();
        r.push((n_h + j) as u32);
        base_rows.push(r);
    }
    let base = ParityCheckMatrix::new(n_top, base_rows)?;
    let schedule = ext[p0..].to_vec();
    let grid = grid_rows(k, n_top, &nominal)?;
    CodeSpec::new(params.seed, base, schedule, grid)
}

/// Extends an externally supplied base matrix with a pseudo-random schedule.
pub fn extend_base(
    base: ParityCheckMatrix,
    params: &ExtensionParams,
    grid: &RateGrid,
    seed: u64,
    avoid_4_cycles: bool,
) -> Result<CodeSpec> {
    let k = Encoder::new(&base)?.k();
    let nominal = grid.nominal()?;
    let n_base = base.n_vars();
    let grid_p = grid_rows(k, n_base, &nominal)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = PairSet { enabled: avoid_4_cycles, pairs: HashSet::new() };
    for row in base.rows() {
        pairs.add_row(row);
    }
    let pool: Vec<u32> = (0..n_base as u32).collect();
    let ext = extension_rows(&mut rng, params, n_base, &pool, *grid_p.last().unwrap(), &mut pairs)?;
    CodeSpec::new(seed, base, ext, grid_p)
}

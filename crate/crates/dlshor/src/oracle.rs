//! Exact brute-force output distribution for tiny instances.
//!
//! For every output pair (j, k) the true probability is
//!
//! ```text
//!   P(j,k) = 1/2^(4(m+ℓ)) Σ_e | Σ_{a,b: a-bd ≡ e (mod r)} ω^(aj+bk) |²
//! ```
//!
//! with ω = e^(2πi/2^(m+ℓ)). Two independent evaluation paths are provided
//! and cross-checked against each other:
//!
//! * the full-table path runs, for each residue class e, a two-dimensional
//!   FFT of the class indicator over the (a, b) grid;
//! * [`GeometricOracle`] evaluates a single pair by summing over b with the
//!   inner a-progression collapsed into a closed-form geometric sum, using
//!   a root-of-unity table computed at extended precision from exact
//!   rational phases.
//!
//! Probabilities are stored as `f64`; at the guarded instance sizes both
//! paths carry errors orders of magnitude below the 1e-12 tolerances this
//! module is held to.

use std::sync::Arc;

use rug::float::Constant;
use rug::{Float, Integer, Rational};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::kernel::{
    arguments_of, heuristic_density, AnglePair, FrequencyPair, ProblemInstance,
};
use crate::numtheory::{reduce_mod, reduce_signed, round_nearest};
use crate::quadrature::{capture_probability, delta_integral, QuadratureConfig};
use crate::{map_range, Error, Result};

/// Largest m+ℓ the full-table computation accepts by default.
pub const DEFAULT_RESOURCE_GUARD: u32 = 12;

/// Grid sizes up to this are computed with residue classes in parallel;
/// larger grids go class-by-class with the row FFTs parallelized instead.
const BLOCK_PARALLEL_L: usize = 1024;

/// Dense exact output distribution of an instance.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    inst: ProblemInstance,
    l: usize,
    probs: Vec<f64>,
    total: f64,
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn checked_small(inst: &ProblemInstance, guard: u32) -> Result<(usize, u64, u64)> {
    let mpl = inst.m_plus_ell();
    if mpl > guard {
        return Err(Error::ResourceGuard(mpl, guard));
    }
    let l = 1usize << mpl;
    let r = inst.r().to_u64().expect("guarded r fits u64");
    let d = inst.d().to_u64().expect("guarded d fits u64");
    Ok((l, r, d))
}

/// ω^q for q in [0, L), computed at 192-bit precision from the exact
/// rational phases q/L and rounded once to f64.
fn unit_root_table(l: usize) -> Vec<Complex64> {
    let wp = 192;
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    (0..l)
        .map(|q| {
            let phase = Float::with_val(wp, Rational::from((q as u64, l as u64))) * &two_pi;
            let (s, c) = phase.sin_cos(Float::new(wp));
            Complex64::new(c.to_f64(), s.to_f64())
        })
        .collect()
}

fn fft_rows(fft: &Arc<dyn Fft<f64>>, grid: &mut [Complex64], l: usize) {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.par_chunks_exact_mut(l).for_each_init(
            || vec![Complex64::default(); fft.get_inplace_scratch_len()],
            |scratch, row| fft.process_with_scratch(row, scratch),
        );
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for row in grid.chunks_exact_mut(l) {
            fft.process_with_scratch(row, &mut scratch);
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], l: usize) {
    const BLOCK: usize = 64;
    for bi in (0..l).step_by(BLOCK) {
        for bj in (0..l).step_by(BLOCK) {
            for i in bi..(bi + BLOCK).min(l) {
                for j in bj..(bj + BLOCK).min(l) {
                    dst[j * l + i] = src[i * l + j];
                }
            }
        }
    }
}

/// Accumulates |DFT2(χ_e)|² for e in [e_lo, e_hi) into a fresh buffer.
fn accumulate_classes(
    fft: &Arc<dyn Fft<f64>>,
    l: usize,
    r: u64,
    d: u64,
    e_range: std::ops::Range<u64>,
    parallel_rows: bool,
) -> Vec<f64> {
    let mut out = vec![0.0f64; l * l];
    let mut grid = vec![Complex64::default(); l * l];
    let mut flipped = vec![Complex64::default(); l * l];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for e in e_range {
        // χ_e(a, b) = 1 when a ≡ e + b·d (mod r); row per b over a
        grid.fill(Complex64::default());
        for b in 0..l as u64 {
            let mut a = (e + b * d) % r;
            let row = &mut grid[(b as usize) * l..(b as usize + 1) * l];
            while (a as usize) < l {
                row[a as usize] = Complex64::new(1.0, 0.0);
                a += r;
            }
        }
        if parallel_rows {
            fft_rows(fft, &mut grid, l);
        } else {
            for row in grid.chunks_exact_mut(l) {
                fft.process_with_scratch(row, &mut scratch);
            }
        }
        transpose(&grid, &mut flipped, l);
        if parallel_rows {
            fft_rows(fft, &mut flipped, l);
        } else {
            for row in flipped.chunks_exact_mut(l) {
                fft.process_with_scratch(row, &mut scratch);
            }
        }
        // flipped[j*l + k] = Σ_{a,b} χ ω^(aj + bk)
        for (acc, v) in out.iter_mut().zip(flipped.iter()) {
            *acc += v.norm_sqr();
        }
    }
    out
}

/// Exact distribution with the default resource guard (m+ℓ ≤ 12).
pub fn exact_distribution(inst: &ProblemInstance) -> Result<ExactDistribution> {
    exact_distribution_guarded(inst, DEFAULT_RESOURCE_GUARD)
}

/// Exact distribution with a caller-chosen resource guard.
pub fn exact_distribution_guarded(inst: &ProblemInstance, guard: u32) -> Result<ExactDistribution> {
    let (l, r, d) = checked_small(inst, guard)?;
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft(l, FftDirection::Inverse);

    let mut probs = if l <= BLOCK_PARALLEL_L {
        let blocks = (r as usize).min(8).max(1);
        let per = r.div_ceil(blocks as u64);
        let partials = map_range(blocks, |bi| {
            let lo = bi as u64 * per;
            let hi = ((bi as u64 + 1) * per).min(r);
            accumulate_classes(&fft, l, r, d, lo..hi, false)
        });
        let mut out = vec![0.0f64; l * l];
        for partial in partials {
            for (acc, v) in out.iter_mut().zip(partial.iter()) {
                *acc += v;
            }
        }
        out
    } else {
        accumulate_classes(&fft, l, r, d, 0..r, true)
    };

    let norm = (l as f64).powi(4);
    for p in probs.iter_mut() {
        *p /= norm;
    }
    let total = neumaier_sum(probs.iter().copied());
    Ok(ExactDistribution {
        inst: inst.clone(),
        l,
        probs,
        total,
    })
}

impl ExactDistribution {
    pub fn instance(&self) -> &ProblemInstance {
        &self.inst
    }

    pub fn register_size(&self) -> usize {
        self.l
    }

    pub fn prob(&self, j: u64, k: u64) -> f64 {
        self.probs[(j as usize) * self.l + k as usize]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Σ over all (j, k); 1 up to the numerical error of the paths.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// For a fixed j and Δ, the unique k whose α_d equals
    /// round(α_r·d/r) + Δ, when that value is representable.
    fn pair_for(&self, j: u64, delta: i64) -> Option<u64> {
        let l = self.l as i64;
        let li = Integer::from(self.l as u64);
        let alpha_r = reduce_signed(&Integer::from(self.inst.r() * j), &li).expect("positive");
        let t = round_nearest(&Rational::from((
            Integer::from(&alpha_r * self.inst.d()),
            self.inst.r().clone(),
        )));
        let alpha_d = t + delta;
        if alpha_d < -(l / 2) || alpha_d >= l / 2 {
            return None;
        }
        let k = reduce_mod(&(alpha_d - Integer::from(self.inst.d() * j)), &li).expect("positive");
        k.to_u64()
    }

    /// Exact probability mass on B-good pairs.
    pub fn capture(&self, b: u64) -> f64 {
        let per_j = map_range(self.l, |j| {
            let mut vals = Vec::with_capacity(2 * b as usize + 1);
            for delta in -(b as i64)..=(b as i64) {
                if let Some(k) = self.pair_for(j as u64, delta) {
                    vals.push(self.prob(j as u64, k));
                }
            }
            neumaier_sum(vals.into_iter())
        });
        neumaier_sum(per_j.into_iter())
    }

    /// Exact probability mass of pairs whose decomposition has this Δ.
    pub fn delta_mass(&self, delta: i64) -> f64 {
        let per_j = map_range(self.l, |j| {
            self.pair_for(j as u64, delta)
                .map_or(0.0, |k| self.prob(j as u64, k))
        });
        neumaier_sum(per_j.into_iter())
    }

    /// Tab-separated export with an instance header line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# exact-distribution m={} ell={} r=0x{} d=0x{} total={:.17e}\n",
            self.inst.m(),
            self.inst.ell(),
            self.inst.r().to_string_radix(16),
            self.inst.d().to_string_radix(16),
            self.total
        ));
        out.push_str("# j\tk\tprobability\n");
        for j in 0..self.l {
            for k in 0..self.l {
                out.push_str(&format!("{j}\t{k}\t{:.17e}\n", self.probs[j * self.l + k]));
            }
        }
        out
    }
}

/// Exact mass on B-good pairs, computing the distribution on the fly.
pub fn exact_capture(inst: &ProblemInstance, b: u64) -> Result<f64> {
    Ok(exact_distribution(inst)?.capture(b))
}

/// Per-pair evaluator: the b-sum of the probability with the inner
/// a-progression in closed geometric form. Independent of the FFT path.
pub struct GeometricOracle {
    l: u64,
    r: u64,
    d: u64,
    table: Vec<Complex64>,
}

impl GeometricOracle {
    pub fn new(inst: &ProblemInstance) -> Result<Self> {
        Self::with_guard(inst, DEFAULT_RESOURCE_GUARD)
    }

    pub fn with_guard(inst: &ProblemInstance, guard: u32) -> Result<Self> {
        let (l, r, d) = checked_small(inst, guard)?;
        Ok(Self {
            l: l as u64,
            r,
            d,
            table: unit_root_table(l),
        })
    }

    fn root(&self, exponent: i128) -> Complex64 {
        self.table[exponent.rem_euclid(self.l as i128) as usize]
    }

    /// Exact probability of observing the pair (j, k).
    pub fn probability(&self, j: u64, k: u64) -> f64 {
        let (l, r, d) = (self.l, self.r, self.d);
        let alpha = (r * j) % l; // rj mod L drives the geometric ratio
        let beta = (d * j + k) % l;

        // the progression count over a ∈ [0, L) is one of two values
        let n_small = (l / r) as i128;
        let geo = |n: i128| -> Complex64 {
            if alpha == 0 {
                Complex64::new(n as f64, 0.0)
            } else {
                let top = self.root(alpha as i128 * n) - 1.0;
                let bot = self.root(alpha as i128) - 1.0;
                top / bot
            }
        };
        let geo_small = geo(n_small);
        let geo_big = geo(n_small + 1);

        let mut total = 0.0;
        for e in 0..r {
            let mut acc = Complex64::default();
            for b in 0..l {
                let base = e + b * d;
                let q_floor = (base / r) as i128; // n_lo = -q_floor
                let rem = base % r;
                // count = ceil((L - base)/r) + q_floor
                let num = l as i128 - base as i128;
                let c1 = num.div_euclid(r as i128)
                    + i128::from(num.rem_euclid(r as i128) != 0);
                let n = c1 + q_floor;
                let phase = b as i128 * beta as i128 - q_floor * alpha as i128;
                let g = if n == n_small { geo_small } else { geo_big };
                debug_assert!(n == n_small || n == n_small + 1, "count {n}");
                acc += self.root(phase) * g;
                let _ = rem;
            }
            total += acc.norm_sqr();
        }
        total / (l as f64).powi(4)
    }
}

/// Convenience wrapper over [`GeometricOracle`] for a single pair.
pub fn exact_probability(inst: &ProblemInstance, pair: &FrequencyPair) -> Result<f64> {
    let oracle = GeometricOracle::new(inst)?;
    let l = Integer::from(1u64 << inst.m_plus_ell());
    let j = reduce_mod(&pair.j, &l).expect("positive").to_u64().expect("guarded");
    let k = reduce_mod(&pair.k, &l).expect("positive").to_u64().expect("guarded");
    Ok(oracle.probability(j, k))
}

/// Exact-versus-heuristic validation data for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub m: u32,
    pub ell: u32,
    pub r: Integer,
    pub d: Integer,
    pub precision_bits: u32,
    pub total: f64,
    /// (B, exact capture, heuristic capture)
    pub capture_rows: Vec<(u64, f64, f64)>,
    /// (Δ, exact mass, heuristic mass)
    pub delta_rows: Vec<(i64, f64, f64)>,
    /// Δ ≥ 1 where exact mass at +Δ and -Δ differ by more than 10%.
    pub asymmetry_flags: Vec<i64>,
    /// Relative density error over B-good pairs with |Δ| ≤ 2.
    pub density_max_rel: f64,
    pub density_mean_rel: f64,
}

/// Builds the oracle comparison report: capture probabilities (exact vs
/// heuristic) for each B, per-Δ masses, asymmetry flags, and density-error
/// statistics over the near-good pairs.
pub fn compare_report(
    inst: &ProblemInstance,
    b_list: &[u64],
    cfg: &QuadratureConfig,
) -> Result<CompareReport> {
    let dist = exact_distribution(inst)?;
    let pub_inst = inst.public();

    let mut capture_rows = Vec::with_capacity(b_list.len());
    for &b in b_list {
        let exact = dist.capture(b);
        let heuristic = capture_probability(&pub_inst, b, cfg)?.to_f64();
        capture_rows.push((b, exact, heuristic));
    }

    let b_max = b_list.iter().copied().max().unwrap_or(0);
    let delta_span = b_max.min(10) as i64;
    let kap = crate::numtheory::kappa(inst.r())?;
    let bound = Rational::from(Integer::from(1) << (inst.m_plus_ell() - kap - 1));
    let outer = crate::quadrature::alpha_r_integral(
        inst.m(),
        inst.ell(),
        inst.r(),
        &(-bound.clone()),
        &bound,
        cfg,
    )?;
    let prefactor = Float::with_val(
        cfg.precision_bits,
        Rational::from((
            Integer::from(inst.r() << kap),
            Integer::from(1) << (2 * inst.m_plus_ell()),
        )),
    );
    let scale = Float::with_val(cfg.precision_bits, &prefactor * &outer);
    let mut delta_rows = Vec::new();
    for delta in -delta_span..=delta_span {
        let exact = dist.delta_mass(delta);
        let inner = delta_integral(inst.m(), inst.ell(), &Integer::from(delta), cfg)?;
        let heuristic = Float::with_val(cfg.precision_bits, &scale * &inner).to_f64();
        delta_rows.push((delta, exact, heuristic));
    }

    let mut asymmetry_flags = Vec::new();
    for delta in 1..=delta_span {
        let plus = dist.delta_mass(delta);
        let minus = dist.delta_mass(-delta);
        if (plus - minus).abs() > 0.1 * plus.max(minus) {
            asymmetry_flags.push(delta);
        }
    }

    let mut max_rel = 0.0f64;
    let mut sum_rel = 0.0f64;
    let mut count = 0u64;
    for j in 0..dist.register_size() as u64 {
        for delta in -2i64..=2 {
            if let Some(k) = dist.pair_for(j, delta) {
                let pair = FrequencyPair {
                    j: Integer::from(j),
                    k: Integer::from(k),
                };
                let args = arguments_of(inst, &pair);
                let angles = AnglePair::from_arguments(inst, &args, cfg.precision_bits);
                let dens = heuristic_density(inst, &angles, cfg.precision_bits).to_f64();
                let exact = dist.prob(j, k);
                if exact > 0.0 {
                    let rel = (dens - exact).abs() / exact;
                    max_rel = max_rel.max(rel);
                    sum_rel += rel;
                    count += 1;
                }
            }
        }
    }

    Ok(CompareReport {
        m: inst.m(),
        ell: inst.ell(),
        r: inst.r().clone(),
        d: inst.d().clone(),
        precision_bits: cfg.precision_bits,
        total: dist.total(),
        capture_rows,
        delta_rows,
        asymmetry_flags,
        density_max_rel: max_rel,
        density_mean_rel: if count > 0 { sum_rel / count as f64 } else { 0.0 },
    })
}

impl CompareReport {
    /// Tab-separated text form; see the repository README for the record
    /// grammar. Floats are printed with 17 significant digits so the parse
    /// below round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# exact-compare m={} ell={} r=0x{} d=0x{} precision={}\n",
            self.m,
            self.ell,
            self.r.to_string_radix(16),
            self.d.to_string_radix(16),
            self.precision_bits
        ));
        out.push_str(&format!("total\t{:.17e}\n", self.total));
        for (b, exact, heuristic) in &self.capture_rows {
            out.push_str(&format!(
                "capture\t{b}\t{exact:.17e}\t{heuristic:.17e}\t{:.17e}\n",
                (exact - heuristic).abs()
            ));
        }
        for (delta, exact, heuristic) in &self.delta_rows {
            out.push_str(&format!("delta\t{delta}\t{exact:.17e}\t{heuristic:.17e}\n"));
        }
        for delta in &self.asymmetry_flags {
            out.push_str(&format!("asymmetry\t{delta}\n"));
        }
        out.push_str(&format!(
            "density\t{:.17e}\t{:.17e}\n",
            self.density_max_rel, self.density_mean_rel
        ));
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header = None;
        let mut total = None;
        let mut capture_rows = Vec::new();
        let mut delta_rows = Vec::new();
        let mut asymmetry_flags = Vec::new();
        let mut density = None;
        let float = |s: &str| s.parse::<f64>().map_err(|_| Error::Malformed("float field"));
        for line in text.lines() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# exact-compare ") {
                let mut m = None;
                let mut ell = None;
                let mut r = None;
                let mut d = None;
                let mut precision = None;
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("m=") {
                        m = v.parse::<u32>().ok();
                    } else if let Some(v) = field.strip_prefix("ell=") {
                        ell = v.parse::<u32>().ok();
                    } else if let Some(v) = field.strip_prefix("r=0x") {
                        r = Integer::from_str_radix(v, 16).ok();
                    } else if let Some(v) = field.strip_prefix("d=0x") {
                        d = Integer::from_str_radix(v, 16).ok();
                    } else if let Some(v) = field.strip_prefix("precision=") {
                        precision = v.parse::<u32>().ok();
                    }
                }
                header = Some((
                    m.ok_or(Error::Malformed("m"))?,
                    ell.ok_or(Error::Malformed("ell"))?,
                    r.ok_or(Error::Malformed("r"))?,
                    d.ok_or(Error::Malformed("d"))?,
                    precision.ok_or(Error::Malformed("precision"))?,
                ));
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[0] {
                "total" if fields.len() == 2 => total = Some(float(fields[1])?),
                "capture" if fields.len() == 5 => capture_rows.push((
                    fields[1].parse().map_err(|_| Error::Malformed("B"))?,
                    float(fields[2])?,
                    float(fields[3])?,
                )),
                "delta" if fields.len() == 4 => delta_rows.push((
                    fields[1].parse().map_err(|_| Error::Malformed("delta"))?,
                    float(fields[2])?,
                    float(fields[3])?,
                )),
                "asymmetry" if fields.len() == 2 => asymmetry_flags
                    .push(fields[1].parse().map_err(|_| Error::Malformed("delta"))?),
                "density" if fields.len() == 3 => {
                    density = Some((float(fields[1])?, float(fields[2])?))
                }
                _ => return Err(Error::Malformed("unknown record")),
            }
        }
        let (m, ell, r, d, precision_bits) = header.ok_or(Error::Malformed("missing header"))?;
        let (density_max_rel, density_mean_rel) = density.ok_or(Error::Malformed("missing density"))?;
        Ok(CompareReport {
            m,
            ell,
            r,
            d,
            precision_bits,
            total: total.ok_or(Error::Malformed("missing total"))?,
            capture_rows,
            delta_rows,
            asymmetry_flags,
            density_max_rel,
            density_mean_rel,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(m: u32, ell: u32, r: i64, d: i64) -> ProblemInstance {
        ProblemInstance::new(m, ell, Integer::from(r), Integer::from(d)).unwrap()
    }

    /// Independent test oracle: direct O(L²) summation per pair.
    fn direct_probability(inst: &ProblemInstance, j: u64, k: u64) -> f64 {
        let l = 1u64 << inst.m_plus_ell();
        let r = inst.r().to_u64().unwrap();
        let d = inst.d().to_u64().unwrap();
        let table = unit_root_table(l as usize);
        let mut total = 0.0;
        for e in 0..r {
            let mut acc = Complex64::default();
            for a in 0..l {
                for b in 0..l {
                    if (a as i128 - (b * d) as i128).rem_euclid(r as i128) == e as i128 {
                        acc += table[((a * j + b * k) % l) as usize];
                    }
                }
            }
            total += acc.norm_sqr();
        }
        total / (l as f64).powi(4)
    }

    #[test]
    fn m2_distribution_matches_frozen_dyadics() {
        // exact probabilities for m=2, ell=0, r=3, d=1 are dyadic rationals
        let inst = inst(2, 0, 3, 1);
        let dist = exact_distribution(&inst).unwrap();
        let expected = [
            [86, 4, 2, 4],
            [4, 6, 12, 42],
            [2, 12, 6, 12],
            [4, 42, 12, 6],
        ];
        for j in 0..4u64 {
            for k in 0..4u64 {
                let want = expected[j as usize][k as usize] as f64 / 256.0;
                assert!(
                    (dist.prob(j, k) - want).abs() < 1e-13,
                    "({j},{k}): {} vs {want}",
                    dist.prob(j, k)
                );
            }
        }
        assert!((dist.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_paths_agree_at_tiny_size() {
        let inst = inst(2, 0, 3, 1);
        let dist = exact_distribution(&inst).unwrap();
        let geo = GeometricOracle::new(&inst).unwrap();
        for j in 0..4u64 {
            for k in 0..4u64 {
                let f = dist.prob(j, k);
                let g = geo.probability(j, k);
                let b = direct_probability(&inst, j, k);
                assert!((f - g).abs() < 1e-13, "fft vs geo at ({j},{k})");
                assert!((f - b).abs() < 1e-13, "fft vs direct at ({j},{k})");
            }
        }
    }

    #[test]
    fn paths_agree_at_m5() {
        let inst = inst(5, 1, 29, 11);
        let dist = exact_distribution(&inst).unwrap();
        let geo = GeometricOracle::new(&inst).unwrap();
        let mut worst = 0.0f64;
        for j in 0..64u64 {
            for k in 0..64u64 {
                worst = worst.max((dist.prob(j, k) - geo.probability(j, k)).abs());
            }
        }
        assert!(worst < 1e-13, "max abs diff {worst}");
        assert!((dist.total() - 1.0).abs() < 1e-12, "total {}", dist.total());
    }

    #[test]
    fn normalization_and_full_capture() {
        let inst = inst(6, 0, 61, 17);
        let dist = exact_distribution(&inst).unwrap();
        assert!((dist.total() - 1.0).abs() < 1e-12, "total {}", dist.total());
        // |Delta| is bounded by 2^(m+ell): alpha_d and the rounded term
        // each span half the modulus, so B = 2^(m+ell) covers every pair
        let all = dist.capture(64);
        assert!((all - 1.0).abs() < 1e-12, "full capture {all}");
        assert!(dist.capture(32) < 1.0);
        // monotone in B
        let mut prev = 0.0;
        for b in [0u64, 1, 2, 5, 10, 31] {
            let c = dist.capture(b);
            assert!(c >= prev - 1e-15, "capture({b}) = {c} < {prev}");
            prev = c;
        }
    }

    #[test]
    fn resource_guard_refuses_large_instances() {
        let inst = inst(13, 0, 8191, 101);
        match exact_distribution(&inst) {
            Err(Error::ResourceGuard(13, 12)) => {}
            other => panic!("expected resource guard, got {other:?}"),
        }
    }

    #[test]
    fn claim_one_marginal_structure() {
        // odd r: every alpha_r is hit by exactly one j
        let inst = inst(4, 0, 13, 5);
        let l = 16u64;
        let li = Integer::from(l);
        let mut counts = std::collections::HashMap::new();
        for j in 0..l {
            let ar = reduce_signed(&Integer::from(inst.r() * j), &li).unwrap();
            *counts.entry(ar).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), l as usize);
        assert!(counts.values().all(|&c| c == 1));
    }

    #[test]
    fn heuristic_density_matches_oracle_on_good_pairs() {
        // verified B-good pairs at m=6, r=61, d=17; the heuristic tracks the
        // exact probability far inside the 15% bound on such pairs
        let inst = inst(6, 0, 61, 17);
        let dist = exact_distribution(&inst).unwrap();
        for (j, k) in [(1u64, 46u64), (5, 39), (20, 45)] {
            let pair = FrequencyPair {
                j: Integer::from(j),
                k: Integer::from(k),
            };
            assert!(crate::kernel::is_b_good(&inst, &pair, 0), "({j},{k})");
            let args = arguments_of(&inst, &pair);
            let angles = AnglePair::from_arguments(&inst, &args, 192);
            let dens = heuristic_density(&inst, &angles, 192).to_f64();
            let exact = dist.prob(j, k);
            let rel = (dens - exact).abs() / exact;
            assert!(rel <= 0.15, "({j},{k}): heuristic {dens:e} vs exact {exact:e}");
            assert!(rel <= 0.01, "unexpectedly large error {rel:e} at ({j},{k})");
        }
    }

    #[test]
    fn report_round_trips() {
        let inst = inst(4, 1, 13, 5);
        let cfg = QuadratureConfig::default();
        let report = compare_report(&inst, &[0, 1, 2], &cfg).unwrap();
        let text = report.to_text();
        let parsed = CompareReport::parse(&text).unwrap();
        assert_eq!(parsed, report);
        assert!(CompareReport::parse("garbage\t1\n").is_err());
        // internal consistency with the direct calls
        let dist = exact_distribution(&inst).unwrap();
        for (b, exact, _heur) in &report.capture_rows {
            assert!((dist.capture(*b) - exact).abs() < 1e-15);
        }
    }
}

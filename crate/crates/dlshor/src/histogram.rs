//! The (Δ, α_r) histogram: piecewise integration of the capture-probability
//! integrand, inverse-transform sampling, and conversion of samples into
//! simulated quantum outputs (j, k).
//!
//! Cells live in u = α_r/r coordinates. Each cell is a (Δ, [u_lo, u_hi))
//! box whose mass factors as
//!
//! ```text
//!   mass = 2^κ r / 2^(2(m+ℓ)) · ∫_cell outer(α_r) dα_r · I(Δ)
//! ```
//!
//! so a histogram over bands × Δ values needs only bands + Δ quadratures.
//! Within |u| ≤ 1 the band widths shrink geometrically toward u = 0 (down
//! to 2^-20) because the outer integrand has a 1/α_r² envelope; beyond
//! |u| = 1 each unit interval gets `cells_per_unit` uniform bands. Bands
//! that contain no admissible integer α_r are merged into their outward
//! neighbor before any integration happens.
//!
//! Sampling draws a cell by inverse transform over the cumulative masses
//! (residual mass 1 - total is the explicit `OutsideCapture` outcome), picks
//! an admissible α_r uniformly inside the cell, sets α_d = round(α_r·d/r) + Δ,
//! and solves r·j ≡ α_r, then d·j + k ≡ α_d (mod 2^(m+ℓ)) for (j, k).
//!
//! # Serialized format (version 1)
//!
//! Big-endian throughout, CRC-32 (IEEE) over every preceding byte at the end:
//!
//! ```text
//! "DLSH" | version u8 | m u32 | ell u32 | r bigint | d bigint | B_max u64
//!        | precision_bits u32 | cell_count u64 | cells... | crc32 u32
//! cell:  delta i64 | u_lo rational | u_hi rational | mass_len u16 | mass ascii
//! bigint:   len u32 | magnitude bytes (big-endian)
//! rational: sign u8 (0 positive, 1 negative) | numerator bigint | denominator bigint
//! ```
//!
//! Masses are decimal strings with 40 significant digits, so a histogram
//! round-trips exactly from its second serialization onward.

use rand_core::RngCore;
use rug::{Float, Integer, Rational};

use crate::kernel::{FrequencyPair, ProblemInstance};
use crate::numtheory::{kappa, mod_inverse, reduce_mod, round_nearest};
use crate::quadrature::{alpha_r_integral, delta_integral, QuadratureConfig};
use crate::{map_range, Error, Result};

const MAGIC: &[u8; 4] = b"DLSH";
const FORMAT_VERSION: u8 = 1;

/// Geometric refinement floor: no band inside |u| ≤ 1 is narrower than 2^-20.
const MIN_BAND_LOG2: u32 = 20;

/// One (Δ, u-interval) box of the histogram.
#[derive(Debug, Clone)]
pub struct HistogramCell {
    pub delta: i64,
    pub u_lo: Rational,
    pub u_hi: Rational,
    pub mass: Float,
}

/// Piecewise-integrated output distribution of an instance, samplable and
/// serializable. Residual mass 1 - total_mass is outside the histogram.
#[derive(Debug, Clone)]
pub struct Histogram {
    m: u32,
    ell: u32,
    r: Integer,
    d: Integer,
    b_max: u64,
    precision_bits: u32,
    cells: Vec<HistogramCell>,
    total_mass: Float,
    cumulative: Vec<f64>,
}

/// One simulated measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampledOutcome {
    Pair {
        pair: FrequencyPair,
        delta: i64,
        alpha_r: Integer,
    },
    /// The draw fell in the probability mass the histogram does not cover.
    OutsideCapture,
}

fn rational_ceil(q: &Rational) -> Integer {
    use rug::ops::DivRounding;
    let num = q.numer();
    let den = q.denom(); // always positive
    Integer::from(num + Integer::from(den - 1u32)).div_floor(Integer::from(den))
}

/// Number of admissible integers (multiples of 2^κ) in [lo, hi), bounds in
/// α_r units.
fn admissible_count(lo: &Rational, hi: &Rational, kap: u32) -> Integer {
    let scale = Integer::from(1) << kap;
    let lo_scaled = Rational::from(lo / &scale);
    let hi_scaled = Rational::from(hi / &scale);
    rational_ceil(&hi_scaled) - rational_ceil(&lo_scaled)
}

/// Ascending boundaries 0 = b_0 < ... < b_n = u_max for one side.
fn side_boundaries(u_max: &Rational, cells_per_unit: u32) -> Vec<Rational> {
    let mut bounds = vec![Rational::new()];
    let per_octave = ((cells_per_unit as usize * 16).div_ceil(MIN_BAND_LOG2 as usize)).max(2);

    // geometric region (0, 1]: one floor band then split octaves
    let floor_band = Rational::from((Integer::from(1), Integer::from(1) << MIN_BAND_LOG2));
    bounds.push(floor_band);
    for octave in (0..MIN_BAND_LOG2).rev() {
        // band [2^-(octave+1), 2^-octave] split uniformly
        let lo = Rational::from((Integer::from(1), Integer::from(1) << (octave + 1)));
        let width = lo.clone();
        for i in 1..=per_octave {
            bounds.push(lo.clone() + Rational::from((i as u64, per_octave as u64)) * width.clone());
        }
    }
    // unit region beyond |u| = 1
    let mut unit = Integer::from(1);
    while Rational::from(&unit) < *u_max {
        for i in 1..=cells_per_unit {
            bounds.push(
                Rational::from(&unit) + Rational::from((i as u64, cells_per_unit as u64)),
            );
        }
        unit += 1;
    }

    bounds.retain(|b| *b < *u_max);
    bounds.sort();
    bounds.dedup();
    bounds.push(u_max.clone());
    bounds
}

/// Bands [lo, hi) for one side in outward order, with every band guaranteed
/// to contain at least one admissible integer. `negative` mirrors the
/// boundaries to [-u_max, 0).
fn side_bands(
    u_max: &Rational,
    cells_per_unit: u32,
    kap: u32,
    r: &Integer,
    negative: bool,
) -> Vec<(Rational, Rational)> {
    let bounds = side_boundaries(u_max, cells_per_unit);
    let raw: Vec<(Rational, Rational)> = bounds
        .windows(2)
        .map(|w| {
            if negative {
                (-w[1].clone(), -w[0].clone())
            } else {
                (w[0].clone(), w[1].clone())
            }
        })
        .collect();

    // walk outward, merging admissible-free bands into the next one out
    let mut merged = Vec::with_capacity(raw.len());
    let mut pending: Option<(Rational, Rational)> = None;
    for (lo, hi) in raw {
        let (lo, hi) = match pending.take() {
            // extend the pending empty band over this one
            Some((plo, phi)) => {
                if negative {
                    (lo, phi)
                } else {
                    (plo, hi)
                }
            }
            None => (lo, hi),
        };
        let lo_r = Rational::from(&lo * r);
        let hi_r = Rational::from(&hi * r);
        if admissible_count(&lo_r, &hi_r, kap) > 0 {
            merged.push((lo, hi));
        } else {
            pending = Some((lo, hi));
        }
    }
    if let Some((plo, phi)) = pending {
        // outermost sliver is empty: absorb it into the last real band
        if let Some(last) = merged.last_mut() {
            if negative {
                last.0 = plo;
            } else {
                last.1 = phi;
            }
        }
    }
    merged
}

/// Builds the histogram for `inst` covering |Δ| ≤ b_max.
pub fn build(
    inst: &ProblemInstance,
    b_max: u64,
    cells_per_unit: u32,
    cfg: &QuadratureConfig,
) -> Result<Histogram> {
    if cells_per_unit < 2 {
        return Err(Error::InvalidInput(format!(
            "cells_per_unit must be >= 2, got {cells_per_unit}"
        )));
    }
    let wp = cfg.precision_bits;
    let m = inst.m();
    let ell = inst.ell();
    let kap = kappa(inst.r())?;
    let u_max = Rational::from((
        Integer::from(1) << (m + ell - kap - 1),
        inst.r().clone(),
    ));

    let mut bands = side_bands(&u_max, cells_per_unit, kap, inst.r(), true);
    bands.extend(side_bands(&u_max, cells_per_unit, kap, inst.r(), false));
    bands.sort_by(|a, b| a.0.cmp(&b.0));

    // one outer integral per band, one inner integral per Δ
    let band_integrals = map_range(bands.len(), |i| {
        let (lo, hi) = &bands[i];
        let lo_r = Rational::from(lo * inst.r());
        let hi_r = Rational::from(hi * inst.r());
        alpha_r_integral(m, ell, inst.r(), &lo_r, &hi_r, cfg)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let delta_count = (2 * b_max + 1) as usize;
    let delta_of = |idx: usize| idx as i64 - b_max as i64;
    let inner_integrals = map_range(delta_count, |idx| {
        delta_integral(m, ell, &Integer::from(delta_of(idx)), cfg)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let prefactor = Float::with_val(
        wp,
        Rational::from((
            Integer::from(inst.r() << kap),
            Integer::from(1) << (2 * (m + ell)),
        )),
    );

    // cells ordered by (Δ ascending, u_lo ascending)
    let mut cells = Vec::with_capacity(delta_count * bands.len());
    for (di, inner) in inner_integrals.iter().enumerate() {
        let delta_scale = Float::with_val(wp, &prefactor * inner);
        for ((lo, hi), outer) in bands.iter().zip(band_integrals.iter()) {
            cells.push(HistogramCell {
                delta: delta_of(di),
                u_lo: lo.clone(),
                u_hi: hi.clone(),
                mass: Float::with_val(wp, &delta_scale * outer),
            });
        }
    }

    Ok(Histogram::from_cells(
        m,
        ell,
        inst.r().clone(),
        inst.d().clone(),
        b_max,
        wp,
        cells,
    ))
}

impl Histogram {
    fn from_cells(
        m: u32,
        ell: u32,
        r: Integer,
        d: Integer,
        b_max: u64,
        precision_bits: u32,
        cells: Vec<HistogramCell>,
    ) -> Self {
        let mut total = Float::with_val(precision_bits, 0);
        let mut cumulative = Vec::with_capacity(cells.len());
        for cell in &cells {
            total += &cell.mass;
            cumulative.push(total.to_f64());
        }
        Histogram {
            m,
            ell,
            r,
            d,
            b_max,
            precision_bits,
            cells,
            total_mass: total,
            cumulative,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn r(&self) -> &Integer {
        &self.r
    }

    pub fn d(&self) -> &Integer {
        &self.d
    }

    pub fn b_max(&self) -> u64 {
        self.b_max
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn cells(&self) -> &[HistogramCell] {
        &self.cells
    }

    pub fn total_mass(&self) -> &Float {
        &self.total_mass
    }

    /// The instance this histogram was built for.
    pub fn instance(&self) -> Result<ProblemInstance> {
        ProblemInstance::new(self.m, self.ell, self.r.clone(), self.d.clone())
    }

    /// Inverse-transform draw: a cell index with probability equal to that
    /// cell's mass, `None` (outside capture) with probability 1 - total_mass.
    pub fn sample_index<R: RngCore + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let idx = self.cumulative.partition_point(|&c| c <= u);
        (idx < self.cells.len()).then_some(idx)
    }

    /// Like [`Histogram::sample_index`] but resolving the cell.
    pub fn sample_cell<R: RngCore + ?Sized>(&self, rng: &mut R) -> Option<&HistogramCell> {
        self.sample_index(rng).map(|i| &self.cells[i])
    }

    /// Serializes to the versioned binary format documented on this module.
    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&self.m.to_be_bytes());
        out.extend_from_slice(&self.ell.to_be_bytes());
        write_bigint(&mut out, &self.r);
        write_bigint(&mut out, &self.d);
        out.extend_from_slice(&self.b_max.to_be_bytes());
        out.extend_from_slice(&self.precision_bits.to_be_bytes());
        out.extend_from_slice(&(self.cells.len() as u64).to_be_bytes());
        for cell in &self.cells {
            out.extend_from_slice(&cell.delta.to_be_bytes());
            write_rational(&mut out, &cell.u_lo);
            write_rational(&mut out, &cell.u_hi);
            let mass = format!("{:.39e}", cell.mass);
            out.extend_from_slice(&(mass.len() as u16).to_be_bytes());
            out.extend_from_slice(mass.as_bytes());
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    /// Parses the versioned binary format, verifying the checksum.
    pub fn deserialize(bytes: &[u8]) -> Result<Histogram> {
        if bytes.len() < MAGIC.len() + 1 + 4 {
            return Err(Error::Malformed("truncated header"));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::Malformed("bad magic"));
        }
        let version = bytes[4];
        if version != FORMAT_VERSION {
            return Err(Error::UnknownVersion(version));
        }
        let (body, crc_bytes) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_be_bytes(crc_bytes.try_into().expect("4 bytes"));
        if crc32fast::hash(body) != stored {
            return Err(Error::ChecksumMismatch);
        }
        let mut cur = Cursor {
            data: &body[5..],
            pos: 0,
        };
        let m = cur.u32()?;
        let ell = cur.u32()?;
        let r = cur.bigint()?;
        let d = cur.bigint()?;
        let b_max = cur.u64()?;
        let precision_bits = cur.u32()?;
        if precision_bits < 2 {
            return Err(Error::Malformed("precision"));
        }
        let n_cells = cur.u64()? as usize;
        let mut cells = Vec::with_capacity(n_cells.min(1 << 24));
        for _ in 0..n_cells {
            let delta = cur.i64()?;
            let u_lo = cur.rational()?;
            let u_hi = cur.rational()?;
            let mass_len = cur.u16()? as usize;
            let mass_str = std::str::from_utf8(cur.take(mass_len)?)
                .map_err(|_| Error::Malformed("mass encoding"))?;
            let parsed = Float::parse(mass_str).map_err(|_| Error::Malformed("mass value"))?;
            let mass = Float::with_val(precision_bits, parsed);
            if u_lo >= u_hi {
                return Err(Error::Malformed("cell bounds"));
            }
            cells.push(HistogramCell {
                delta,
                u_lo,
                u_hi,
                mass,
            });
        }
        if cur.pos != cur.data.len() {
            return Err(Error::Malformed("trailing data"));
        }
        Ok(Histogram::from_cells(m, ell, r, d, b_max, precision_bits, cells))
    }
}

fn write_bigint(out: &mut Vec<u8>, v: &Integer) {
    let digits = v.to_digits::<u8>(rug::integer::Order::MsfBe);
    out.extend_from_slice(&(digits.len() as u32).to_be_bytes());
    out.extend_from_slice(&digits);
}

fn write_rational(out: &mut Vec<u8>, q: &Rational) {
    out.push(u8::from(*q < 0));
    write_bigint(out, &Integer::from(q.numer().clone().abs()));
    write_bigint(out, q.denom());
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::Malformed("unexpected end of data"));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().expect("2")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8")))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_be_bytes(self.take(8)?.try_into().expect("8")))
    }

    fn bigint(&mut self) -> Result<Integer> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        Ok(Integer::from_digits(bytes, rug::integer::Order::MsfBe))
    }

    fn rational(&mut self) -> Result<Rational> {
        let sign = match self.take(1)?[0] {
            0 => 1i32,
            1 => -1,
            _ => return Err(Error::Malformed("rational sign")),
        };
        let num = self.bigint()?;
        let den = self.bigint()?;
        if den == 0 {
            return Err(Error::Malformed("zero denominator"));
        }
        Ok(Rational::from((num * sign, den)))
    }
}

/// Converts a sampled cell into a concrete output pair: draws an admissible
/// α_r uniformly inside the cell, then solves for j and k.
///
/// A cell with no admissible integer yields [`Error::EmptyCell`] (the
/// builder merges such cells away). The rare combination where
/// round(α_r·d/r) + Δ leaves the representable signed range has no
/// corresponding k and counts as outside capture.
pub fn cell_to_pair<R: RngCore + ?Sized>(
    inst: &ProblemInstance,
    cell: &HistogramCell,
    rng: &mut R,
) -> Result<SampledOutcome> {
    let kap = kappa(inst.r())?;
    let modulus = inst.modulus();
    let lo_r = Rational::from(&cell.u_lo * inst.r());
    let hi_r = Rational::from(&cell.u_hi * inst.r());
    let count = admissible_count(&lo_r, &hi_r, kap);
    if count <= 0 {
        return Err(Error::EmptyCell);
    }
    let scale = Integer::from(1) << kap;
    let first = rational_ceil(&Rational::from(&lo_r / &scale));
    let pick = crate::solver::uniform_below(&count, rng);
    let alpha_r = Integer::from(&first + &pick) << kap;

    let rounded = round_nearest(&Rational::from((
        Integer::from(&alpha_r * inst.d()),
        inst.r().clone(),
    )));
    let alpha_d = rounded + cell.delta;
    let half = inst.half_modulus();
    if alpha_d < -half.clone() || alpha_d >= half {
        return Ok(SampledOutcome::OutsideCapture);
    }

    // r·j ≡ α_r (mod 2^(m+ℓ)): divide out 2^κ, invert the odd part, then
    // pick one of the 2^κ solutions uniformly
    let r_odd = Integer::from(inst.r() >> kap);
    let sub_modulus = Integer::from(&modulus >> kap);
    let alpha_reduced = Integer::from(&alpha_r >> kap);
    let inv = mod_inverse(&r_odd, &sub_modulus)?
        .expect("odd value is invertible modulo a power of two");
    let j_base = reduce_mod(&(alpha_reduced * inv), &sub_modulus)?;
    let j = if kap == 0 {
        j_base
    } else {
        let lift = crate::solver::uniform_below(&(Integer::from(1) << kap), rng);
        j_base + Integer::from(&sub_modulus * &lift)
    };

    let k = reduce_mod(&(alpha_d - Integer::from(inst.d() * &j)), &modulus)?;
    Ok(SampledOutcome::Pair {
        pair: FrequencyPair { j, k },
        delta: cell.delta,
        alpha_r,
    })
}

/// Draws `count` independent outcomes from the histogram.
pub fn sample<R: RngCore + ?Sized>(
    inst: &ProblemInstance,
    hist: &Histogram,
    rng: &mut R,
    count: usize,
) -> Result<Vec<SampledOutcome>> {
    if hist.m != inst.m() || hist.ell != inst.ell() || hist.r != *inst.r() || hist.d != *inst.d() {
        return Err(Error::InvalidInput(
            "histogram was built for a different instance".into(),
        ));
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        match hist.sample_cell(rng) {
            None => out.push(SampledOutcome::OutsideCapture),
            Some(cell) => out.push(cell_to_pair(inst, cell, rng)?),
        }
    }
    Ok(out)
}

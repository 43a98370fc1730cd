//! Extended-precision numerical integration and the capture-probability
//! computation behind the success-probability table.
//!
//! Integration is composite Simpson with Richardson extrapolation: trapezoid
//! sums are refined by halving the panel width, Simpson values are formed
//! from consecutive trapezoid levels, and Richardson-extrapolated values are
//! compared until two of them agree to the configured relative tolerance.
//!
//! The capture probability of a bound B for an instance (m, ℓ, r) is
//!
//! ```text
//!   2^κ · r / 2^(2(m+ℓ))
//!     · ∫ (1 - cos(2π α_r / r)) / (2π² α_r²) dα_r        over |α_r| ≤ 2^(m+ℓ-κ-1)
//!     · Σ_{|Δ| ≤ B} ∫ (cos(2πδ) - 1) / (cos(2π(Δ+δ)/2^(m+ℓ)) - 1) dδ   over [-1/2, 1/2]
//! ```
//!
//! where 2^κ is the largest power of two dividing r. The outer integrand is
//! integrated in units of u = α_r/r (one oscillation per unit interval), and
//! the Δ-sum is accumulated from Δ = 0 outward.

use rug::{Float, Integer, Rational};

use crate::kernel::PublicInstance;
use crate::numtheory::kappa;
use crate::{map_range, Error, Result};

/// Parameters for extended-precision integration.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    /// Mantissa bits for all extended-precision reals.
    pub precision_bits: u32,
    /// Initial Simpson panel count per interval; even, at least 2.
    pub base_panels: u32,
    /// Maximum number of panel-width halvings before giving up.
    pub refine_limit: u32,
    /// Target relative agreement between successive extrapolated values.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            precision_bits: 192,
            base_panels: 64,
            refine_limit: 20,
            rel_tol: 1e-10,
        }
    }
}

impl QuadratureConfig {
    pub fn with_precision(precision_bits: u32) -> Self {
        Self {
            precision_bits,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.precision_bits < 64 {
            return Err(Error::InvalidInput(format!(
                "precision_bits must be >= 64, got {}",
                self.precision_bits
            )));
        }
        if self.base_panels < 2 || self.base_panels % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "base_panels must be even and >= 2, got {}",
                self.base_panels
            )));
        }
        if self.refine_limit < 4 {
            return Err(Error::InvalidInput(format!(
                "refine_limit must be >= 4, got {}",
                self.refine_limit
            )));
        }
        Ok(())
    }
}

/// Plain composite Simpson with a fixed panel count (no refinement).
/// `panels` must be even.
pub fn simpson<F>(f: F, a: &Float, b: &Float, panels: u32, precision_bits: u32) -> Float
where
    F: Fn(&Float) -> Float + Sync,
{
    assert!(panels >= 2 && panels % 2 == 0, "panels must be even and >= 2");
    let wp = precision_bits;
    let width = Float::with_val(wp, b - a);
    let n = panels as usize;
    let values = map_range(n + 1, |i| {
        let node = Float::with_val(wp, a + &width * Float::with_val(wp, Rational::from((i as u64, n as u64))));
        f(&node)
    });
    let mut sum = Float::with_val(wp, &values[0] + &values[n]);
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        sum += Float::with_val(wp, v * if i % 2 == 1 { 4u32 } else { 2u32 });
    }
    let h = width / Float::with_val(wp, n as u64);
    sum * h / 3u32
}

/// Composite Simpson refined by Richardson extrapolation until two
/// successive extrapolated values agree to `cfg.rel_tol`, or the refinement
/// limit is exhausted (a convergence-failure error carrying the last two
/// estimates).
pub fn integrate<F>(f: F, a: &Float, b: &Float, cfg: &QuadratureConfig) -> Result<Float>
where
    F: Fn(&Float) -> Float + Sync,
{
    cfg.validate()?;
    let wp = cfg.precision_bits;
    let width = Float::with_val(wp, b - a);
    if width == 0 {
        return Ok(Float::with_val(wp, 0));
    }

    // level-0 trapezoid over base_panels intervals
    let n0 = cfg.base_panels as u64;
    let endpoint_values = map_range(n0 as usize + 1, |i| {
        let node = Float::with_val(
            wp,
            a + &width * Float::with_val(wp, Rational::from((i as u64, n0))),
        );
        f(&node)
    });
    let mut trap = {
        let mut s = Float::with_val(wp, &endpoint_values[0] + &endpoint_values[n0 as usize]) / 2u32;
        for v in &endpoint_values[1..n0 as usize] {
            s += v;
        }
        s * Float::with_val(wp, &width / Float::with_val(wp, n0))
    };

    let mut n = n0;
    let mut simpson_prev: Option<Float> = None;
    let mut richardson_prev: Option<Float> = None;
    let rel_tol = Float::with_val(wp, cfg.rel_tol);

    for _ in 0..cfg.refine_limit {
        // midpoints of the current n intervals
        let mid_values = map_range(n as usize, |i| {
            let node = Float::with_val(
                wp,
                a + &width * Float::with_val(wp, Rational::from((2 * i as u64 + 1, 2 * n))),
            );
            f(&node)
        });
        let mut mid_sum = Float::with_val(wp, 0);
        for v in &mid_values {
            mid_sum += v;
        }
        let h_next = Float::with_val(wp, &width / Float::with_val(wp, 2 * n));
        let trap_next = Float::with_val(wp, &trap / 2u32) + mid_sum * h_next;

        let simpson = (Float::with_val(wp, 4u32 * &trap_next) - &trap) / 3u32;
        if let Some(sp) = simpson_prev.take() {
            let richardson = (Float::with_val(wp, 16u32 * &simpson) - sp) / 15u32;
            if let Some(rp) = richardson_prev.take() {
                let diff = Float::with_val(wp, &richardson - &rp).abs();
                let scale = Float::with_val(wp, richardson.clone().abs());
                if diff <= Float::with_val(wp, &rel_tol * &scale) {
                    return Ok(richardson);
                }
            }
            richardson_prev = Some(richardson);
        }
        simpson_prev = Some(simpson);
        trap = trap_next;
        n *= 2;
    }

    let last = richardson_prev.as_ref().map_or(f64::NAN, |r| r.to_f64());
    let prev = simpson_prev.as_ref().map_or(f64::NAN, |s| s.to_f64());
    Err(Error::Convergence { last, prev })
}

/// Window beyond which a node counts as clear of a removable singularity.
fn singular_window(wp: u32) -> Float {
    Float::with_val(wp, Float::i_exp(1, -40))
}

/// The inner integral of the capture probability for a fixed Δ:
///
/// ```text
///   I(Δ) = ∫_{-1/2}^{1/2} (cos(2πδ) - 1) / (cos(2π(Δ+δ)/2^(m+ℓ)) - 1) dδ
/// ```
///
/// evaluated as sin²(πδ)/sin²(π(Δ+δ)/2^(m+ℓ)), with the removable limit
/// 2^(2(m+ℓ)) substituted within 2^-40 of the singular point Δ+δ = 0.
pub fn delta_integral(m: u32, ell: u32, delta: &Integer, cfg: &QuadratureConfig) -> Result<Float> {
    let mpl = m + ell;
    let half_modulus = Integer::from(1) << (mpl - 1);
    if delta.clone().abs() > half_modulus {
        return Err(Error::InvalidInput(format!(
            "delta = {delta} exceeds 2^(m+ell-1)"
        )));
    }
    let wp = cfg.precision_bits;
    let pi = Float::with_val(wp, rug::float::Constant::Pi);
    let delta_f = Float::with_val(wp, delta);
    let limit = Float::with_val(wp, Integer::from(1) << (2 * mpl));
    let window = singular_window(wp);

    let integrand = move |x: &Float| {
        let shifted = Float::with_val(wp, &delta_f + x);
        if shifted.clone().abs() < window {
            return limit.clone();
        }
        let num_s = Float::with_val(wp, &pi * x).sin();
        let den_arg = Float::with_val(wp, &pi * &shifted) >> mpl;
        let den_s = den_arg.sin();
        let num = Float::with_val(wp, &num_s * &num_s);
        let den = Float::with_val(wp, &den_s * &den_s);
        num / den
    };

    let a = Float::with_val(wp, -0.5f64);
    let b = Float::with_val(wp, 0.5f64);
    integrate(integrand, &a, &b, cfg)
}

/// The outer integrand of the capture probability in units of u = α_r/r:
/// g(u) = sin²(πu)/(πu)², with g(0) = 1.
fn outer_integrand(u: &Float, pi: &Float, window: &Float) -> Float {
    let wp = u.prec();
    if u.clone().abs() < *window {
        return Float::with_val(wp, 1);
    }
    let arg = Float::with_val(wp, pi * u);
    let s = arg.clone().sin();
    Float::with_val(wp, &s * &s) / Float::with_val(wp, &arg * &arg)
}

/// ∫_{lo}^{hi} (1 - cos(2π α_r / r)) / (2π² α_r²) dα_r with exact rational
/// bounds in α_r units. Internally substitutes u = α_r/r and integrates one
/// unit interval of u at a time, so each oscillation of the integrand gets
/// its own panel set.
pub fn alpha_r_integral(
    m: u32,
    ell: u32,
    r: &Integer,
    lo: &Rational,
    hi: &Rational,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    if lo >= hi {
        return Err(Error::InvalidInput(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let kap = kappa(r)?;
    let bound = Rational::from(Integer::from(1) << (m + ell - kap - 1));
    if *lo < -bound.clone() || *hi > bound {
        return Err(Error::InvalidInput(format!(
            "bounds [{lo}, {hi}] outside the admissible range of alpha_r"
        )));
    }
    let wp = cfg.precision_bits;
    let pi = Float::with_val(wp, rug::float::Constant::Pi);
    let window = singular_window(wp);

    let u_lo = Rational::from(lo / r);
    let u_hi = Rational::from(hi / r);

    // split [u_lo, u_hi] at integer boundaries
    let mut pieces: Vec<(Rational, Rational)> = Vec::new();
    let mut cur = u_lo;
    while cur < u_hi {
        let next_int = Rational::from(cur.clone().floor() + 1);
        let next = if next_int < u_hi { next_int } else { u_hi.clone() };
        pieces.push((cur.clone(), next.clone()));
        cur = next;
    }

    let mut total = Float::with_val(wp, 0);
    for (plo, phi_) in pieces {
        let a = Float::with_val(wp, &plo);
        let b = Float::with_val(wp, &phi_);
        let v = integrate(
            |u: &Float| outer_integrand(u, &pi, &window),
            &a,
            &b,
            cfg,
        )?;
        total += v;
    }
    // back to alpha_r units: dalpha_r = r du, and the integrand carries 1/r^2
    Ok(total / Float::with_val(wp, r))
}

/// Δ values in the outward accumulation order 0, +1, -1, +2, -2, ...
fn outward_delta(idx: usize) -> i64 {
    if idx == 0 {
        0
    } else if idx % 2 == 1 {
        ((idx + 1) / 2) as i64
    } else {
        -((idx / 2) as i64)
    }
}

fn capture_parts(
    pub_inst: &PublicInstance,
    b: u64,
    cfg: &QuadratureConfig,
) -> Result<(Float, Vec<Float>, Float)> {
    let wp = cfg.precision_bits;
    let m = pub_inst.m();
    let ell = pub_inst.ell();
    let kap = kappa(pub_inst.r())?;
    let bound = Rational::from(Integer::from(1) << (m + ell - kap - 1));
    let outer = alpha_r_integral(m, ell, pub_inst.r(), &(-bound.clone()), &bound, cfg)?;

    let count = (2 * b + 1) as usize;
    let inners: Vec<Result<Float>> = map_range(count, |idx| {
        delta_integral(m, ell, &Integer::from(outward_delta(idx)), cfg)
    });
    let inners = inners.into_iter().collect::<Result<Vec<_>>>()?;

    let prefactor = Float::with_val(
        wp,
        Rational::from((
            Integer::from(pub_inst.r() << kap),
            Integer::from(1) << (2 * (m + ell)),
        )),
    );
    Ok((outer, inners, prefactor))
}

/// The capture probability: total heuristic probability mass on B-good
/// pairs for the instance (m, ℓ, r).
pub fn capture_probability(
    pub_inst: &PublicInstance,
    b: u64,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let (outer, inners, prefactor) = capture_parts(pub_inst, b, cfg)?;
    let wp = cfg.precision_bits;
    let mut sum = Float::with_val(wp, 0);
    for v in &inners {
        sum += v;
    }
    Ok(prefactor * outer * sum)
}

/// Capture probabilities over a grid of padding lengths and search bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptureTable {
    pub m: u32,
    pub r: Integer,
    pub precision_bits: u32,
    pub ells: Vec<u32>,
    pub bs: Vec<u64>,
    /// Row-major: `values[i][j]` is the probability at `ells[i]`, `bs[j]`.
    pub values: Vec<Vec<f64>>,
}

/// Builds the capture table cell by cell. Within each row the Δ-integrals
/// are computed once up to max(bs) and reused across the B columns.
pub fn capture_table(
    m: u32,
    r: &Integer,
    ells: &[u32],
    bs: &[u64],
    cfg: &QuadratureConfig,
) -> Result<CaptureTable> {
    if ells.is_empty() || bs.is_empty() {
        return Err(Error::InvalidInput("empty table axis".into()));
    }
    let wp = cfg.precision_bits;
    let b_max = *bs.iter().max().expect("non-empty");
    let mut values = Vec::with_capacity(ells.len());
    for &ell in ells {
        let pub_inst = PublicInstance::new(m, ell, r.clone())?;
        let (outer, inners, prefactor) = capture_parts(&pub_inst, b_max, cfg)?;
        // outward prefix sums: prefix[t] = sum of the first t inner values
        let mut prefix = Vec::with_capacity(inners.len() + 1);
        let mut acc = Float::with_val(wp, 0);
        prefix.push(acc.clone());
        for v in &inners {
            acc += v;
            prefix.push(acc.clone());
        }
        let scale = Float::with_val(wp, &prefactor * &outer);
        let row: Vec<f64> = bs
            .iter()
            .map(|&b| {
                let t = (2 * b + 1) as usize;
                Float::with_val(wp, &scale * &prefix[t]).to_f64()
            })
            .collect();
        values.push(row);
    }
    Ok(CaptureTable {
        m,
        r: r.clone(),
        precision_bits: cfg.precision_bits,
        ells: ells.to_vec(),
        bs: bs.to_vec(),
        values,
    })
}

impl CaptureTable {
    pub fn get(&self, ell: u32, b: u64) -> Option<f64> {
        let i = self.ells.iter().position(|&e| e == ell)?;
        let j = self.bs.iter().position(|&x| x == b)?;
        Some(self.values[i][j])
    }

    /// Tab-separated text form: a `# m=<m> r=<hex> precision=<bits>` header,
    /// a commented column-label line, then one row per ℓ with probabilities
    /// printed to four decimal digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# m={} r=0x{} precision={}\n",
            self.m,
            self.r.to_string_radix(16),
            self.precision_bits
        ));
        out.push_str("# ell");
        for b in &self.bs {
            out.push_str(&format!("\tB={b}"));
        }
        out.push('\n');
        for (i, &ell) in self.ells.iter().enumerate() {
            out.push_str(&ell.to_string());
            for v in &self.values[i] {
                out.push_str(&format!("\t{v:.4}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `to_text` format back.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = None;
        let mut r = None;
        let mut precision = None;
        let mut bs: Vec<u64> = Vec::new();
        let mut ells = Vec::new();
        let mut values = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if rest.starts_with("m=") {
                    for field in rest.split_whitespace() {
                        if let Some(v) = field.strip_prefix("m=") {
                            m = Some(v.parse::<u32>().map_err(|_| Error::Malformed("m field"))?);
                        } else if let Some(v) = field.strip_prefix("r=0x") {
                            r = Some(
                                Integer::from_str_radix(v, 16)
                                    .map_err(|_| Error::Malformed("r field"))?,
                            );
                        } else if let Some(v) = field.strip_prefix("precision=") {
                            precision =
                                Some(v.parse::<u32>().map_err(|_| Error::Malformed("precision field"))?);
                        }
                    }
                } else if rest.starts_with("ell") {
                    bs = rest
                        .split('\t')
                        .skip(1)
                        .map(|f| {
                            f.trim()
                                .strip_prefix("B=")
                                .ok_or(Error::Malformed("column label"))?
                                .parse::<u64>()
                                .map_err(|_| Error::Malformed("column label"))
                        })
                        .collect::<Result<Vec<_>>>()?;
                }
                continue;
            }
            let mut fields = line.split('\t');
            let ell = fields
                .next()
                .ok_or(Error::Malformed("empty row"))?
                .parse::<u32>()
                .map_err(|_| Error::Malformed("row label"))?;
            let row = fields
                .map(|f| f.parse::<f64>().map_err(|_| Error::Malformed("probability cell")))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != bs.len() {
                return Err(Error::Malformed("row width"));
            }
            ells.push(ell);
            values.push(row);
        }
        Ok(CaptureTable {
            m: m.ok_or(Error::Malformed("missing m"))?,
            r: r.ok_or(Error::Malformed("missing r"))?,
            precision_bits: precision.ok_or(Error::Malformed("missing precision"))?,
            ells,
            bs,
            values,
        })
    }
}

//! Synthetic stationary Gaussian fields.
//!
//! [`generate_sgs`] draws a 3D field with a chosen covariance model by
//! circulant embedding: the covariance is wrapped onto a torus at least twice
//! the grid size, diagonalized by an FFT, and white noise is coloured with
//! the square roots of its eigenvalues. It stands in for sequential Gaussian
//! simulation, which produces the same kind of unconditional realization.
//!
//! [`generate_spectral`] builds `ξ(x, y, h) = Σ_k a_k(x, y) L_k(h)` from
//! independent 2D fields `a_k` and Legendre polynomials in the vertical
//! coordinate `h ∈ [-1, 1]`.

use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::ScalarGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Covariance {
    /// `exp(-h)`
    #[default]
    Exponential,
    /// `exp(-h^2)`
    Gaussian,
}

impl Covariance {
    /// Correlation at normalized lag `h`.
    pub fn correlation(self, h: f64) -> f64 {
        match self {
            Covariance::Exponential => (-h).exp(),
            Covariance::Gaussian => (-h * h).exp(),
        }
    }
}

impl FromStr for Covariance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Ok(Covariance::Exponential),
            "gaussian" | "gauss" => Ok(Covariance::Gaussian),
            other => Err(Error::InvalidParams(format!("unknown covariance model {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SgsParams {
    pub mean: f64,
    pub std: f64,
    pub covariance: Covariance,
    /// Correlation ranges along x, y, z in cells.
    pub ranges: [f64; 3],
}

impl Default for SgsParams {
    fn default() -> Self {
        SgsParams {
            mean: 0.0,
            std: 1.0,
            covariance: Covariance::Gaussian,
            ranges: [8.0, 8.0, 4.0],
        }
    }
}

impl SgsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.std >= 0.0) || !self.mean.is_finite() {
            return Err(Error::InvalidParams(format!("std must be >= 0, got {}", self.std)));
        }
        if self.ranges.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "ranges must be positive, got {:?}",
                self.ranges
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralParams {
    pub k_max: usize,
    /// Standard deviation of `a_k`, one entry per order `0..=k_max`.
    pub coeff_std: Vec<f64>,
    /// Lateral correlation range of the `a_k` in cells.
    pub lateral_range: f64,
    pub covariance: Covariance,
}

impl SpectralParams {
    /// `coeff_std[k] = 1 / (k + 1)`.
    pub fn with_order(k_max: usize) -> Self {
        SpectralParams {
            k_max,
            coeff_std: (0..=k_max).map(|k| 1.0 / (k as f64 + 1.0)).collect(),
            lateral_range: 8.0,
            covariance: Covariance::Exponential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.coeff_std.len() != self.k_max + 1 {
            return Err(Error::InvalidParams(format!(
                "coeff_std has {} entries, k_max = {} needs {}",
                self.coeff_std.len(),
                self.k_max,
                self.k_max + 1
            )));
        }
        if self.coeff_std.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParams("coeff_std entries must be >= 0".into()));
        }
        if !(self.lateral_range > 0.0) || !self.lateral_range.is_finite() {
            return Err(Error::InvalidParams(format!(
                "lateral_range must be positive, got {}",
                self.lateral_range
            )));
        }
        Ok(())
    }
}

impl Default for SpectralParams {
    fn default() -> Self {
        SpectralParams::with_order(8)
    }
}

/// `L_0(x) … L_k_max(x)` by the three-term recurrence.
pub fn legendre(k_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    if k_max >= 1 {
        out.push(x);
    }
    for n in 1..k_max {
        let n_f = n as f64;
        let next = ((2.0 * n_f + 1.0) * x * out[n] - n_f * out[n - 1]) / (n_f + 1.0);
        out.push(next);
    }
    out
}

/// Vertical coordinate of layer `k3` out of `nz`.
pub fn layer_height(k3: usize, nz: usize) -> f64 {
    -1.0 + 2.0 * (k3 as f64 + 0.5) / nz as f64
}

fn embedding_size(n: usize, range: f64) -> usize {
    if n == 1 {
        return 1;
    }
    let m = (2 * n).max(n + (6.0 * range).ceil() as usize);
    m + m % 2
}

/// In-place unnormalized 3D DFT of an x-fastest array.
fn fft3(data: &mut [Complex64], m: [usize; 3], inverse: bool) {
    let mut planner = FftPlanner::new();
    for axis in 0..3 {
        let len = m[axis];
        if len == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let stride = match axis {
            0 => 1,
            1 => m[0],
            _ => m[0] * m[1],
        };
        let lines = data.len() / len;
        let starts: Vec<usize> = (0..data.len())
            .filter(|&i| (i / stride) % len == 0)
            .take(lines)
            .collect();
        let mut buf: Vec<Vec<Complex64>> = starts
            .iter()
            .map(|&s| (0..len).map(|t| data[s + t * stride]).collect())
            .collect();
        buf.par_iter_mut().for_each(|line| fft.process(line));
        for (line, &s) in buf.iter().zip(&starts) {
            for (t, v) in line.iter().enumerate() {
                data[s + t * stride] = *v;
            }
        }
    }
}

/// Zero-mean unit-variance stationary field on `dims` via circulant embedding.
pub fn gaussian_field(dims: [usize; 3], ranges: [f64; 3], covariance: Covariance, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = [0, 1, 2].map(|a| embedding_size(dims[a], ranges[a]));
    let total = m[0] * m[1] * m[2];
    let mut c = vec![Complex64::new(0.0, 0.0); total];
    for k in 0..m[2] {
        for j in 0..m[1] {
            for i in 0..m[0] {
                let lag = |t: usize, a: usize| t.min(m[a] - t) as f64 / ranges[a];
                let (x, y, z) = (lag(i, 0), lag(j, 1), lag(k, 2));
                let h = (x * x + y * y + z * z).sqrt();
                c[i + m[0] * (j + m[1] * k)] = Complex64::new(covariance.correlation(h), 0.0);
            }
        }
    }
    fft3(&mut c, m, false);
    let scale = 1.0 / total as f64;
    let mut w: Vec<Complex64> = Vec::with_capacity(total);
    for lambda in &c {
        let s = (lambda.re.max(0.0) * scale).sqrt();
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        w.push(Complex64::new(s * a, s * b));
    }
    fft3(&mut w, m, true);
    let mut out = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                out.push(w[i + m[0] * (j + m[1] * k)].re);
            }
        }
    }
    out
}

fn check_dims(dims: [usize; 3]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::InvalidDims(dims));
    }
    Ok(())
}

/// SGS-like stationary Gaussian field with the requested mean and std.
pub fn generate_sgs(p: &SgsParams, dims: [usize; 3], seed: u64) -> Result<ScalarGrid> {
    p.validate()?;
    check_dims(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = gaussian_field(dims, p.ranges, p.covariance, &mut rng);
    let values = z.into_iter().map(|v| p.mean + p.std * v).collect();
    ScalarGrid::new(dims, values)
}

/// Legendre expansion with random 2D coefficient fields.
pub fn generate_spectral(p: &SpectralParams, dims: [usize; 3], seed: u64) -> Result<ScalarGrid> {
    p.validate()?;
    check_dims(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plane = [dims[0], dims[1], 1];
    let r = p.lateral_range;
    let coeffs: Vec<Vec<f64>> = p
        .coeff_std
        .iter()
        .map(|&s| {
            gaussian_field(plane, [r, r, 1.0], p.covariance, &mut rng)
                .into_iter()
                .map(|v| s * v)
                .collect()
        })
        .collect();
    synthesize_spectral(&coeffs, dims)
}

/// `Σ_k coeffs[k](x, y) L_k(h)`; each coefficient field is x-fastest on `nx × ny`.
pub fn synthesize_spectral(coeffs: &[Vec<f64>], dims: [usize; 3]) -> Result<ScalarGrid> {
    check_dims(dims)?;
    let [nx, ny, nz] = dims;
    if let Some(c) = coeffs.iter().find(|c| c.len() != nx * ny) {
        return Err(Error::DimsMismatch {
            dims: [nx, ny, 1],
            expected: nx * ny,
            found: c.len(),
        });
    }
    let k_max = coeffs.len().saturating_sub(1);
    let basis: Vec<Vec<f64>> = (0..nz).map(|k3| legendre(k_max, layer_height(k3, nz))).collect();
    let mut values = Vec::with_capacity(nx * ny * nz);
    for lk in &basis {
        for col in 0..nx * ny {
            values.push(coeffs.iter().zip(lk).map(|(a, l)| a[col] * l).sum());
        }
    }
    ScalarGrid::new(dims, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Spectral,
    Sgs,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spectral" => Ok(Method::Spectral),
            "sgs" | "sgs-like" => Ok(Method::Sgs),
            other => Err(Error::InvalidParams(format!("unknown method {other:?}"))),
        }
    }
}

/// Parsed generator configuration.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FieldConfig {
    pub method: Method,
    pub dims: Option<[usize; 3]>,
    pub seed: Option<u64>,
    pub sgs: SgsParams,
    pub spectral: SpectralParams,
}

impl FieldConfig {
    pub fn generate(&self, dims: [usize; 3], seed: u64) -> Result<ScalarGrid> {
        match self.method {
            Method::Spectral => generate_spectral(&self.spectral, dims, seed),
            Method::Sgs => generate_sgs(&self.sgs, dims, seed),
        }
    }

    /// `key = value` lines as accepted by [`parse_config`].
    pub fn describe(&self) -> String {
        let mut s = String::new();
        match self.method {
            Method::Spectral => {
                let p = &self.spectral;
                let stds: Vec<String> = p.coeff_std.iter().map(|v| v.to_string()).collect();
                s += "method = spectral\n";
                s += &format!("k_max = {}\ncoeff_std = {}\n", p.k_max, stds.join(", "));
                s += &format!(
                    "lateral_range = {}\ncovariance = {}\n",
                    p.lateral_range,
                    cov_name(p.covariance)
                );
            }
            Method::Sgs => {
                let p = &self.sgs;
                s += "method = sgs\n";
                s += &format!(
                    "mean = {}\nstd = {}\ncovariance = {}\n",
                    p.mean,
                    p.std,
                    cov_name(p.covariance)
                );
                s += &format!("ranges = {} {} {}\n", p.ranges[0], p.ranges[1], p.ranges[2]);
            }
        }
        if let Some([x, y, z]) = self.dims {
            s += &format!("dims = {x} {y} {z}\n");
        }
        if let Some(seed) = self.seed {
            s += &format!("seed = {seed}\n");
        }
        s
    }
}

fn cov_name(c: Covariance) -> &'static str {
    match c {
        Covariance::Exponential => "exponential",
        Covariance::Gaussian => "gaussian",
    }
}

fn numbers<T: FromStr>(v: &str) -> Option<Vec<T>> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().ok())
        .collect()
}

/// Parses `key = value` lines; `#` starts a comment.
///
/// Keys: `method`, `dims`, `seed`, `k_max`, `coeff_std`, `lateral_range`,
/// `covariance`, `mean`, `std`, `ranges`. Lists are separated by commas or
/// spaces. `covariance` applies to the generator selected by `method`.
pub fn parse_config(text: &str, path: &Path) -> Result<FieldConfig> {
    let mut cfg = FieldConfig::default();
    let mut k_max: Option<(usize, usize)> = None;
    let mut coeff_std: Option<(Vec<f64>, usize)> = None;
    let mut covariance: Option<Covariance> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::parse(path, line_no, msg);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || err(format!("bad value for {key}: {value:?}"));
        match key {
            "method" => cfg.method = value.parse().map_err(|e: Error| err(e.to_string()))?,
            "dims" => {
                let d: Vec<usize> = numbers(value).ok_or_else(bad)?;
                if d.len() != 3 || d.contains(&0) {
                    return Err(err(format!("dims needs three positive integers, found {value:?}")));
                }
                cfg.dims = Some([d[0], d[1], d[2]]);
            }
            "seed" => cfg.seed = Some(value.parse().map_err(|_| bad())?),
            "k_max" => k_max = Some((value.parse().map_err(|_| bad())?, line_no)),
            "coeff_std" => coeff_std = Some((numbers(value).ok_or_else(bad)?, line_no)),
            "lateral_range" => cfg.spectral.lateral_range = value.parse().map_err(|_| bad())?,
            "covariance" => {
                covariance = Some(value.parse().map_err(|e: Error| err(e.to_string()))?);
            }
            "mean" => cfg.sgs.mean = value.parse().map_err(|_| bad())?,
            "std" => cfg.sgs.std = value.parse().map_err(|_| bad())?,
            "ranges" => {
                let r: Vec<f64> = numbers(value).ok_or_else(bad)?;
                match r.len() {
                    1 => cfg.sgs.ranges = [r[0]; 3],
                    3 => cfg.sgs.ranges = [r[0], r[1], r[2]],
                    _ => return Err(err(format!("ranges needs one or three values, found {value:?}"))),
                }
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    match (k_max, coeff_std) {
        (Some((k, _)), None) => {
            let keep = cfg.spectral.lateral_range;
            cfg.spectral = SpectralParams::with_order(k);
            cfg.spectral.lateral_range = keep;
        }
        (None, Some((s, line))) => {
            if s.is_empty() {
                return Err(Error::parse(path, line, "coeff_std is empty"));
            }
            cfg.spectral.k_max = s.len() - 1;
            cfg.spectral.coeff_std = s;
        }
        (Some((k, _)), Some((s, line))) => {
            if s.len() != k + 1 {
                return Err(Error::parse(
                    path,
                    line,
                    format!("coeff_std has {} entries but k_max = {k}", s.len()),
                ));
            }
            cfg.spectral.k_max = k;
            cfg.spectral.coeff_std = s;
        }
        (None, None) => {}
    }
    if let Some(c) = covariance {
        match cfg.method {
            Method::Spectral => cfg.spectral.covariance = c,
            Method::Sgs => cfg.sgs.covariance = c,
        }
    }
    let check = match cfg.method {
        Method::Spectral => cfg.spectral.validate(),
        Method::Sgs => cfg.sgs.validate(),
    };
    check.map_err(|e| Error::InvalidParams(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

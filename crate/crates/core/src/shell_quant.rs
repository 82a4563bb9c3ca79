//! Power-shell geometry: uniform sampling, spherical coordinates, angular
//! sector quantization and the KL/Pinsker bounds on the quantization error.

use std::collections::BTreeMap;
use std::f64::consts::{LOG2_E, PI};
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::quantization_slack;
use crate::channel::{dist2, norm2, ChannelSpec};
use crate::error::{check_dim, domain, Error, Result};
use crate::numerics::{LogLayered, RngStream, StreamRng};
use crate::resolvability::{tv_estimate, OutputMixture, TvEstimate};

/// Tolerance for caller-supplied shell points.
pub const INGEST_TOL: f64 = 1e-6;
/// Tolerance for points this crate generates.
pub const GENERATE_TOL: f64 = 1e-9;

/// Uniform point on the sphere of radius `radius` in `R^n`.
pub fn sample_sphere(n: usize, radius: f64, rng: &mut StreamRng) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = norm2(&x).sqrt();
        if norm == 0.0 {
            continue;
        }
        let scale = radius / norm;
        x.iter_mut().for_each(|v| *v *= scale);
        // second pass removes the rounding left by the first scale
        let fix = radius / norm2(&x).sqrt();
        x.iter_mut().for_each(|v| *v *= fix);
        return x;
    }
}

/// A uniform draw from the power shell `||x||^2 = nP`.
pub fn sample_shell(spec: &ChannelSpec, stream: &RngStream) -> Vec<f64> {
    sample_sphere(spec.n(), spec.shell_radius(), &mut stream.rng())
}

/// `(radius, [phi_1, ..., phi_{n-1}])` with `phi_1..phi_{n-2}` in `[0, pi]`
/// and `phi_{n-1}` in `[0, 2 pi)`.
///
/// `x_k = r sin(phi_1)...sin(phi_{k-1}) cos(phi_k)` for `k < n` and
/// `x_n = r sin(phi_1)...sin(phi_{n-1})`. When a trailing block of
/// coordinates vanishes the remaining angles are 0 (or `pi` for a negative
/// leading coordinate).
pub fn to_spherical(x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    if n < 2 {
        return domain("spherical coordinates need n >= 2");
    }
    let mut tail = vec![0.0; n + 1];
    for k in (0..n).rev() {
        tail[k] = x[k].hypot(tail[k + 1]);
    }
    let radius = tail[0];
    if radius == 0.0 {
        return Err(Error::Degenerate("angles are undefined at the origin".into()));
    }
    let mut angles = Vec::with_capacity(n - 1);
    for k in 0..n - 2 {
        angles.push(tail[k + 1].atan2(x[k]));
    }
    let mut last = x[n - 1].atan2(x[n - 2]);
    if last < 0.0 {
        last += 2.0 * PI;
    }
    if last >= 2.0 * PI {
        last = 0.0;
    }
    angles.push(last);
    Ok((radius, angles))
}

pub fn from_spherical(radius: f64, angles: &[f64]) -> Result<Vec<f64>> {
    if angles.is_empty() {
        return domain("spherical coordinates need at least one angle");
    }
    if !(radius >= 0.0 && radius.is_finite()) {
        return domain(format!("radius must be finite and non-negative, got {radius}"));
    }
    let last = angles.len() - 1;
    for (m, &a) in angles.iter().enumerate() {
        let hi = if m == last { 2.0 * PI } else { PI };
        if !(0.0..=hi).contains(&a) {
            return domain(format!("angle {} = {a} outside [0, {hi}]", m + 1));
        }
    }
    let n = angles.len() + 1;
    let mut x = Vec::with_capacity(n);
    let mut sin_prod = radius;
    for &a in angles {
        x.push(sin_prod * a.cos());
        sin_prod *= a.sin();
    }
    x.push(sin_prod);
    Ok(x)
}

/// Angular sector grid on the shell of radius `radius` in `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    n: usize,
    theta: f64,
    radius: f64,
    count_polar: u32,
    count_azimuthal: u32,
}

fn grid_count(span: f64, theta: f64) -> u32 {
    // pi / (pi/4) must give 4, not 5
    (span / theta - 1e-9).ceil().max(1.0) as u32
}

impl QuantizerSpec {
    pub fn new(n: usize, theta: f64, radius: f64) -> Result<Self> {
        if n < 2 {
            return domain("sector quantization needs n >= 2");
        }
        if !(theta > 0.0 && theta <= PI) {
            return domain(format!("sector width must lie in (0, pi], got {theta}"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("radius must be positive, got {radius}"));
        }
        if PI / theta > u32::MAX as f64 / 2.0 {
            return domain(format!("sector width {theta} too small for an explicit grid"));
        }
        Ok(QuantizerSpec {
            n,
            theta,
            radius,
            count_polar: grid_count(PI, theta),
            count_azimuthal: grid_count(2.0 * PI, theta),
        })
    }

    /// Grid on the power shell of `spec`.
    pub fn for_channel(spec: &ChannelSpec, theta: f64) -> Result<Self> {
        Self::new(spec.n(), theta, spec.shell_radius())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn count_polar(&self) -> u32 {
        self.count_polar
    }

    pub fn count_azimuthal(&self) -> u32 {
        self.count_azimuthal
    }

    fn width(&self, axis: usize) -> f64 {
        if axis + 1 == self.n - 1 {
            2.0 * PI / self.count_azimuthal as f64
        } else {
            PI / self.count_polar as f64
        }
    }

    fn count(&self, axis: usize) -> u32 {
        if axis + 1 == self.n - 1 {
            self.count_azimuthal
        } else {
            self.count_polar
        }
    }

    /// Multi-index of the sector holding the given angles. Points on a bin
    /// edge belong to the lower bin.
    pub fn sector_of_angles(&self, angles: &[f64]) -> Vec<u32> {
        angles
            .iter()
            .enumerate()
            .map(|(axis, &a)| {
                let raw = (a / self.width(axis)).ceil() - 1.0;
                raw.clamp(0.0, (self.count(axis) - 1) as f64) as u32
            })
            .collect()
    }

    pub fn sector_of(&self, x: &[f64]) -> Result<Vec<u32>> {
        check_dim(self.n, x.len())?;
        let (_, angles) = to_spherical(x)?;
        Ok(self.sector_of_angles(&angles))
    }

    /// Angular midpoint of a sector, projected to the shell.
    pub fn midpoint(&self, index: &[u32]) -> Result<Vec<f64>> {
        check_dim(self.n - 1, index.len())?;
        let angles: Vec<f64> = index
            .iter()
            .enumerate()
            .map(|(axis, &i)| (i as f64 + 0.5) * self.width(axis))
            .collect();
        from_spherical(self.radius, &angles)
    }

    /// Number of cells of the explicit grid, `count_polar^{n-2} count_azimuthal`.
    pub fn grid_sector_count(&self) -> LogLayered {
        LogLayered::from_log2(
            (self.n - 2) as f64 * (self.count_polar as f64).log2()
                + (self.count_azimuthal as f64).log2(),
        )
    }

    /// Exact grid cell count, `None` on `u128` overflow.
    pub fn grid_sector_count_exact(&self) -> Option<u128> {
        let polar = u128::from(self.count_polar);
        let mut m = u128::from(self.count_azimuthal);
        for _ in 2..self.n {
            m = m.checked_mul(polar)?;
        }
        Some(m)
    }
}

/// `log2 m = (n-2) log2(pi/theta) + log2(2 pi/theta)`.
pub fn sector_count_log2(n: usize, theta: f64) -> Result<LogLayered> {
    if n < 2 {
        return domain("sector count needs n >= 2");
    }
    if !(theta > 0.0 && theta <= PI) {
        return domain(format!("sector width must lie in (0, pi], got {theta}"));
    }
    Ok(LogLayered::from_log2(
        (n - 2) as f64 * (PI / theta).log2() + (2.0 * PI / theta).log2(),
    ))
}

/// Sector count `m_n = (pi/theta)^{n-2} (2 pi/theta)` of a quantizer.
pub fn sector_count(qs: &QuantizerSpec) -> Result<LogLayered> {
    sector_count_log2(qs.n, qs.theta)
}

/// `log2 m_n` at `theta = e^{-n}` in the closed form
/// `m_n = 2 pi^{n-1} / (e^{-n})^{n-1}`.
pub fn sector_count_log2_exp_width(n: usize) -> f64 {
    let nf = n as f64;
    1.0 + (nf - 1.0) * PI.log2() + nf * (nf - 1.0) * LOG2_E
}

/// `log2 log2 m_n / log2 n` at `theta = e^{-n}`; tends to 2.
pub fn sector_growth_ratio(n: usize) -> Result<f64> {
    if n < 3 {
        return domain("growth ratio needs n >= 3");
    }
    Ok(sector_count_log2_exp_width(n).log2() / (n as f64).log2())
}

/// One occupied sector of a quantized distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub mass: f64,
    pub representative: Vec<f64>,
}

/// A distribution on the shell collapsed to one point per occupied sector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedDistribution {
    pub spec: QuantizerSpec,
    pub sectors: BTreeMap<Vec<u32>, Sector>,
}

impl QuantizedDistribution {
    pub fn total_mass(&self) -> f64 {
        self.sectors.values().map(|s| s.mass).sum()
    }

    /// `(representative, mass)` pairs in sector order.
    pub fn atoms(&self) -> Vec<(Vec<f64>, f64)> {
        self.sectors.values().map(|s| (s.representative.clone(), s.mass)).collect()
    }

    /// Flat text table, one row per occupied sector:
    /// `index_1 .. index_{n-1} mass u_1 .. u_n`, reals at 17 significant digits.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let s = &self.spec;
        let _ = writeln!(out, "quantized-distribution 1");
        let _ = writeln!(out, "n {}", s.n);
        let _ = writeln!(out, "theta {:.16e}", s.theta);
        let _ = writeln!(out, "radius {:.16e}", s.radius);
        let _ = writeln!(out, "sectors {}", self.sectors.len());
        for (idx, sector) in &self.sectors {
            let mut fields: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            fields.push(format!("{:.16e}", sector.mass));
            fields.extend(sector.representative.iter().map(|v| format!("{v:.16e}")));
            let _ = writeln!(out, "{}", fields.join(" "));
        }
        out
    }

    pub fn from_table(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing {key}")))?;
            let (k, v) = line
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("malformed line {line:?}")))?;
            if k != key {
                return Err(Error::Parse(format!("expected {key}, found {k}")));
            }
            Ok(v.trim().to_string())
        };
        if next("quantized-distribution")? != "1" {
            return Err(Error::Parse("unsupported table version".into()));
        }
        let n: usize = parse(&next("n")?)?;
        let theta: f64 = parse(&next("theta")?)?;
        let radius: f64 = parse(&next("radius")?)?;
        let count: usize = parse(&next("sectors")?)?;
        let spec = QuantizerSpec::new(n, theta, radius)?;
        let mut sectors = BTreeMap::new();
        for _ in 0..count {
            let line = lines.next().ok_or_else(|| Error::Parse("missing sector row".into()))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 * n {
                return Err(Error::Parse(format!("sector row has {} fields, want {}", fields.len(), 2 * n)));
            }
            let idx = fields[..n - 1].iter().map(|f| parse::<u32>(f)).collect::<Result<Vec<_>>>()?;
            let mass = parse::<f64>(fields[n - 1])?;
            let representative = fields[n..].iter().map(|f| parse::<f64>(f)).collect::<Result<Vec<_>>>()?;
            sectors.insert(idx, Sector { mass, representative });
        }
        Ok(QuantizedDistribution { spec, sectors })
    }
}

pub(crate) fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("cannot parse {s:?}")))
}

/// Collapses weighted shell points to sector representatives.
///
/// Each sector's representative is its angular midpoint on the shell,
/// except when every point credited to the sector is the same atom, in
/// which case the atom itself is used.
pub fn quantize_distribution(points: &[(Vec<f64>, f64)], qs: &QuantizerSpec) -> Result<QuantizedDistribution> {
    if points.is_empty() {
        return domain("nothing to quantize");
    }
    let r2 = qs.radius * qs.radius;
    let mut total = 0.0;
    for (x, w) in points {
        check_dim(qs.n, x.len())?;
        if (norm2(x) - r2).abs() > INGEST_TOL * r2.max(1.0) {
            return domain(format!("sample off the shell: ||x||^2 = {}, r^2 = {r2}", norm2(x)));
        }
        if !(*w >= 0.0 && w.is_finite()) {
            return domain(format!("weights must be finite and non-negative, got {w}"));
        }
        total += w;
    }
    if total <= 0.0 {
        return domain("total weight must be positive");
    }

    // per sector: accumulated weight and the single atom seen so far (if unique)
    let mut acc: BTreeMap<Vec<u32>, (f64, Option<&[f64]>, bool)> = BTreeMap::new();
    for (x, w) in points {
        let idx = qs.sector_of(x)?;
        let entry = acc.entry(idx).or_insert((0.0, Some(x.as_slice()), true));
        entry.0 += w / total;
        if let Some(first) = entry.1 {
            if first != x.as_slice() {
                entry.2 = false;
            }
        }
    }
    let mut sectors = BTreeMap::new();
    for (idx, (mass, first, single)) in acc {
        let representative = match (single, first) {
            (true, Some(atom)) => atom.to_vec(),
            _ => qs.midpoint(&idx)?,
        };
        sectors.insert(idx, Sector { mass, representative });
    }
    Ok(QuantizedDistribution { spec: *qs, sectors })
}

/// `D(N(x, I) || N(u, I)) = ||x - u||^2 / 2` in nats.
pub fn gaussian_kl(x: &[f64], u: &[f64]) -> Result<f64> {
    check_dim(x.len(), u.len())?;
    Ok(0.5 * dist2(x, u))
}

/// The KL expression carrying an extra factor `n`, `n ||x-u||^2 / 2`.
/// Looser than [`gaussian_kl`]; kept for comparison.
pub fn gaussian_kl_dimension_scaled(x: &[f64], u: &[f64]) -> Result<f64> {
    Ok(x.len() as f64 * gaussian_kl(x, u)?)
}

/// `min(2, sqrt(2 kl))`: L1 distance bound, range `[0, 2]`.
pub fn pinsker_tv_bound(kl_nats: f64) -> Result<f64> {
    if !(kl_nats >= 0.0) {
        return domain(format!("KL divergence must be non-negative, got {kl_nats}"));
    }
    Ok((2.0 * kl_nats).sqrt().min(2.0))
}

/// Empirical `d(QW, Q_bar W)` next to the bounds that control it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizationTvReport {
    pub empirical: TvEstimate,
    /// `sum_l Q_bar(l) max_{x in sector l} pinsker(D(x, u_l))`.
    pub pinsker_bound: f64,
    /// Same chain with the dimension-scaled KL expression.
    pub dimension_scaled_bound: f64,
    /// `sqrt(P) n^{3/2} e^{-n}`, the asymptotic slack at `theta = e^{-n}`.
    pub closed_form: f64,
    pub occupied_sectors: usize,
}

pub fn quantization_tv_report(
    points: &[(Vec<f64>, f64)],
    qs: &QuantizerSpec,
    spec: &ChannelSpec,
    trials: usize,
    stream: &RngStream,
) -> Result<QuantizationTvReport> {
    check_dim(spec.n(), qs.n)?;
    if (qs.radius - spec.shell_radius()).abs() > INGEST_TOL * spec.shell_radius().max(1.0) {
        return domain("quantizer radius differs from the channel's power shell");
    }
    let quantized = quantize_distribution(points, qs)?;

    let total: f64 = points.iter().map(|(_, w)| w).sum();
    let mut worst: BTreeMap<Vec<u32>, (f64, f64)> = BTreeMap::new();
    for (x, _) in points {
        let idx = qs.sector_of(x)?;
        let u = &quantized.sectors[&idx].representative;
        let tight = pinsker_tv_bound(gaussian_kl(x, u)?)?;
        let loose = pinsker_tv_bound(gaussian_kl_dimension_scaled(x, u)?)?;
        let e = worst.entry(idx).or_insert((0.0, 0.0));
        e.0 = e.0.max(tight);
        e.1 = e.1.max(loose);
    }
    let (mut pinsker_bound, mut dimension_scaled_bound) = (0.0, 0.0);
    for (idx, (tight, loose)) in &worst {
        let mass = quantized.sectors[idx].mass;
        pinsker_bound += mass * tight;
        dimension_scaled_bound += mass * loose;
    }

    let n = spec.n();
    let flat: Vec<f64> = points.iter().flat_map(|(x, _)| x.iter().copied()).collect();
    let weights: Vec<f64> = points.iter().map(|(_, w)| w / total).collect();
    let original = OutputMixture::weighted(n, flat, &weights)?;
    let atoms = quantized.atoms();
    let q_flat: Vec<f64> = atoms.iter().flat_map(|(u, _)| u.iter().copied()).collect();
    let q_weights: Vec<f64> = atoms.iter().map(|(_, m)| *m).collect();
    let collapsed = OutputMixture::weighted(n, q_flat, &q_weights)?;

    let empirical = tv_estimate(
        |y| original.log_density(y),
        |y| collapsed.log_density(y),
        |rng| original.sample(rng),
        trials,
        stream,
    )?;

    Ok(QuantizationTvReport {
        empirical,
        pinsker_bound: pinsker_bound.min(2.0),
        dimension_scaled_bound: dimension_scaled_bound.min(2.0),
        closed_form: quantization_slack(n, spec.power()),
        occupied_sectors: quantized.sectors.len(),
    })
}

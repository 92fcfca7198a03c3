//! Sensor Consensus Analysis.
//!
//! A measurement pre-processing step for sets of sensors that measure the
//! same physical quantity. Pairwise z-tests at a user probability decide
//! which measurements are statistically inconsistent with their peers; the
//! variances of the measurements in consensus with the fewest others are
//! then inflated by the minimum factor that brings at least one failing
//! pair to the consensus boundary, and the process repeats until every
//! pair passes. Inconsistent sensors are never discarded, only de-weighted.

use crate::error::{Error, Result};
use crate::types::Measurement;

/// Variances are floored to this value before a z-test so that sensors
/// claiming zero variance do not divide by zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Slack applied on the consensus boundary. A pair scaled exactly onto the
/// boundary lands within a few ulp of the desired z; without the slack such
/// a pair can keep failing the strict comparison and stall the iteration.
const BOUNDARY_TOL: f64 = 1e-12;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.506628274631000502415765284811;

/// Standard normal CDF via the complementary error function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Inverse standard normal CDF: returns z with `cdf(z) = q`.
///
/// Rational approximation (Acklam's coefficients) refined by one Newton
/// step against the erfc-based CDF; absolute error below 1e-9 across
/// q in [1e-10, 1 - 1e-10].
pub fn norminv(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!(
            "norminv requires 0 < q < 1, got {q}"
        )));
    }
    // Work on the lower half only; 1 - q is exact for q >= 0.5 and the
    // lower-tail CDF keeps full relative precision for the refinement.
    if q > 0.5 {
        return Ok(-norminv_lower(1.0 - q));
    }
    Ok(norminv_lower(q))
}

fn norminv_lower(q: f64) -> f64 {
    debug_assert!(q > 0.0 && q <= 0.5);
    let x = acklam(q);
    // One Newton step: x - (cdf(x) - q) / pdf(x).
    let err = std_normal_cdf(x) - q;
    let pdf = (-0.5 * x * x).exp() / SQRT_2PI;
    x - err / pdf
}

/// Acklam's rational approximation of the inverse normal CDF,
/// relative error < 1.15e-9 on its own.
fn acklam(q: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const Q_LOW: f64 = 0.02425;

    if q < Q_LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else {
        // q <= 0.5 here, the central branch.
        let r = q - 0.5;
        let s = r * r;
        (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r
            / (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0)
    }
}

/// Two-sample z-value for the hypothesis that both measurements share a
/// population mean: `-|mu1 - mu2| / sqrt(var1 + var2)`. Always <= 0.
pub fn z_test(m1: &Measurement, m2: &Measurement) -> Result<f64> {
    if m1.variance < VARIANCE_FLOOR && m2.variance < VARIANCE_FLOOR {
        return Err(Error::DegenerateVariance);
    }
    let v1 = m1.variance.max(VARIANCE_FLOOR);
    let v2 = m2.variance.max(VARIANCE_FLOOR);
    Ok(-(m1.mean - m2.mean).abs() / (v1 + v2).sqrt())
}

/// The z-value a pair must reach to count as consensual at probability `p`.
pub fn z_desired(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "consensus probability must satisfy 0 <= p < 1, got {p}"
        )));
    }
    if p == 0.0 {
        // p = 0 disables the test entirely; callers never compare against
        // this but -inf keeps "z_test >= z_desired" trivially true.
        return Ok(f64::NEG_INFINITY);
    }
    norminv(p / 2.0)
}

/// Whether two measurements pass the consensus test at probability `p`.
/// `p = 0` disables the test and always returns true.
pub fn in_consensus(m1: &Measurement, m2: &Measurement, p: f64) -> Result<bool> {
    let zd = z_desired(p)?;
    if zd == f64::NEG_INFINITY {
        return Ok(true);
    }
    Ok(z_test(m1, m2)? >= zd - BOUNDARY_TOL)
}

/// Scaling factor that brings a failing pair to the desired z when BOTH
/// variances are multiplied by it.
///
/// Callers must only invoke this on pairs failing consensus at `z` (z < 0);
/// equal means degenerate to s = 0.
pub fn scale_both(mi: &Measurement, mj: &Measurement, z: f64) -> f64 {
    let d = mi.mean - mj.mean;
    d * d / (z * z * (mi.variance + mj.variance))
}

/// Scaling factor that brings a failing pair to the desired z when only
/// measurement `mi`'s variance is multiplied by it.
pub fn scale_one(mi: &Measurement, mj: &Measurement, z: f64) -> f64 {
    let d = (mi.mean - mj.mean) / z;
    (d * d - mj.variance) / mi.variance
}

/// For each measurement, the number of OTHER measurements it is in
/// consensus with at probability `p`.
pub fn consensus_counts(measurements: &[Measurement], p: f64) -> Result<Vec<usize>> {
    let n = measurements.len();
    let mut counts = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if in_consensus(&measurements[i], &measurements[j], p)? {
                counts[i] += 1;
                counts[j] += 1;
            }
        }
    }
    Ok(counts)
}

/// The minimum scaling factor that lets at least one measurement indexed by
/// `l` pass the consensus test with a measurement it currently fails with.
///
/// Pairs with both endpoints in `l` use [`scale_both`]; pairs whose second
/// endpoint is outside `l` use [`scale_one`].
pub fn calculate_min_scale(l: &[usize], n: &[Measurement], p: f64) -> Result<f64> {
    if l.is_empty() {
        return Err(Error::InvalidInput("empty index list".into()));
    }
    let z = norminv(p / 2.0)?;
    let mut c = f64::INFINITY;
    for &i in l {
        for j in 0..n.len() {
            if in_consensus(&n[i], &n[j], p)? {
                continue;
            }
            let s = if l.contains(&j) {
                scale_both(&n[i], &n[j], z)
            } else {
                scale_one(&n[i], &n[j], z)
            };
            if s < c {
                c = s;
            }
        }
    }
    if !c.is_finite() {
        return Err(Error::Logic(
            "calculate_min_scale called without any failing pair".into(),
        ));
    }
    Ok(c)
}

/// Applies per-measurement variance scales; means and timestamps unchanged.
pub fn scale_measurements(m: &[Measurement], scales: &[f64]) -> Result<Vec<Measurement>> {
    if m.len() != scales.len() {
        return Err(Error::InvalidInput(format!(
            "{} measurements but {} scales",
            m.len(),
            scales.len()
        )));
    }
    Ok(m.iter()
        .zip(scales)
        .map(|(meas, &s)| meas.with_scaled_variance(s))
        .collect())
}

/// Outcome of one consensus analysis run.
#[derive(Debug, Clone)]
pub struct ConsensusReport {
    /// The input measurements, unmodified.
    pub measurements: Vec<Measurement>,
    /// Final variance multiplier per input measurement; all >= 1.
    pub scales: Vec<f64>,
    /// Number of scaling iterations performed.
    pub iterations: usize,
    /// z-value of every pair (i, j), i < j, of the scaled measurements.
    pub pair_z: Vec<(usize, usize, f64)>,
}

impl ConsensusReport {
    /// The inputs with the final scales applied.
    pub fn scaled_measurements(&self) -> Vec<Measurement> {
        self.measurements
            .iter()
            .zip(&self.scales)
            .map(|(m, &s)| m.with_scaled_variance(s))
            .collect()
    }
}

fn any_pair_failing(n: &[Measurement], p: f64) -> Result<bool> {
    for i in 0..n.len() {
        for j in (i + 1)..n.len() {
            if !in_consensus(&n[i], &n[j], p)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn pairwise_z(n: &[Measurement]) -> Result<Vec<(usize, usize, f64)>> {
    let mut out = Vec::new();
    for i in 0..n.len() {
        for j in (i + 1)..n.len() {
            out.push((i, j, z_test(&n[i], &n[j])?));
        }
    }
    Ok(out)
}

/// Sensor consensus analysis.
///
/// Iteratively inflates the variances of the measurements with the minimum
/// consensus until every pair passes the z-test at probability `p`.
/// `p = 0` and sets of at most one measurement return all-ones scales.
///
/// Each iteration brings at least one previously failing pair onto the
/// boundary, so the loop finishes within n(n-1)/2 iterations; exceeding the
/// cap is reported as a hard error rather than looping forever.
pub fn sca(m: &[Measurement], p: f64) -> Result<ConsensusReport> {
    z_desired(p)?; // validate p before doing any work
    let count = m.len();
    let mut scales = vec![1.0; count];
    if p == 0.0 || count <= 1 {
        return Ok(ConsensusReport {
            measurements: m.to_vec(),
            scales,
            iterations: 0,
            pair_z: pairwise_z(m)?,
        });
    }

    let cap = count * (count - 1) / 2 + 1;
    let mut n = m.to_vec();
    let mut iterations = 0usize;
    while any_pair_failing(&n, p)? {
        if iterations >= cap {
            return Err(Error::Logic(format!(
                "consensus analysis failed to terminate within {cap} iterations"
            )));
        }
        let counts = consensus_counts(&n, p)?;
        let min = *counts.iter().min().expect("non-empty");
        let l: Vec<usize> = (0..count).filter(|&i| counts[i] == min).collect();
        let c = calculate_min_scale(&l, &n, p)?;
        for &i in &l {
            scales[i] *= c;
        }
        n = scale_measurements(m, &scales)?;
        iterations += 1;
    }

    Ok(ConsensusReport {
        measurements: m.to_vec(),
        scales,
        iterations,
        pair_z: pairwise_z(&n)?,
    })
}

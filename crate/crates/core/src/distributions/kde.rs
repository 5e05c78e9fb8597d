//! Gaussian kernel density estimation for plot-ready output.

use crate::error::{Error, Result};

use super::std_normal_pdf;

/// A density evaluated on an ascending grid. Serializes to two-column CSV
/// for external plotting.
#[derive(Clone, Debug)]
pub struct Density {
    grid: Vec<f64>,
    values: Vec<f64>,
    bandwidth: f64,
}

impl Density {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Grid point with the largest density value.
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for i in 1..self.values.len() {
            if self.values[i] > self.values[best] {
                best = i;
            }
        }
        self.grid[best]
    }

    /// Trapezoidal integral over the grid; close to 1 when the grid spans
    /// the sample.
    pub fn trapezoid_integral(&self) -> f64 {
        let mut total = 0.0;
        for i in 1..self.grid.len() {
            let w = self.grid[i] - self.grid[i - 1];
            total += 0.5 * w * (self.values[i] + self.values[i - 1]);
        }
        total
    }

    /// Two-column CSV (`grid,value`), LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("grid,value\n");
        for (g, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{g},{v}\n"));
        }
        out
    }
}

/// Silverman's rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5).
///
/// Falls back to the standard deviation alone when the interquartile range
/// degenerates; errors when the sample itself is constant.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSample(
            "bandwidth needs at least 2 samples".into(),
        ));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    if var <= 0.0 {
        return Err(Error::DegenerateSample(
            "constant sample has no density scale".into(),
        ));
    }
    let sd = var.sqrt();

    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let iqr = interpolated_quantile(&sorted, 0.75) - interpolated_quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * n.powf(-0.2))
}

/// Linear interpolation between order statistics (sorted input).
fn interpolated_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Gaussian KDE on the given ascending grid with Silverman's bandwidth.
pub fn kde_density(samples: &[f64], grid: &[f64]) -> Result<Density> {
    let h = silverman_bandwidth(samples)?;
    kde_density_with_bandwidth(samples, grid, h)
}

/// Gaussian KDE with an explicit bandwidth.
pub fn kde_density_with_bandwidth(samples: &[f64], grid: &[f64], bandwidth: f64) -> Result<Density> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSample(
            "density estimation needs at least 2 samples".into(),
        ));
    }
    if !bandwidth.is_finite() || bandwidth <= 0.0 {
        return Err(Error::domain(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("grid must be nonempty and strictly ascending"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("samples must be finite"));
    }

    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;

    // Kernel mass beyond 8 bandwidths is below 1e-15; restrict each grid
    // point to that window of the sorted sample.
    let cutoff = 8.0 * bandwidth;
    let values = grid
        .iter()
        .map(|&g| {
            let start = sorted.partition_point(|&x| x < g - cutoff);
            let stop = sorted.partition_point(|&x| x <= g + cutoff);
            let sum: f64 = sorted[start..stop]
                .iter()
                .map(|&x| std_normal_pdf((g - x) / bandwidth))
                .sum();
            sum / (n * bandwidth)
        })
        .collect();

    Ok(Density {
        grid: grid.to_vec(),
        values,
        bandwidth,
    })
}

/// Evenly spaced grid of `points` values covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && hi > lo);
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_sample_is_symmetric() {
        let grid = linspace(-3.0, 3.0, 121);
        let d = kde_density(&[-1.0, 1.0], &grid).unwrap();
        let v = d.values();
        for i in 0..v.len() / 2 {
            assert!(
                (v[i] - v[v.len() - 1 - i]).abs() < 1e-12,
                "asymmetry at {i}"
            );
        }
    }

    #[test]
    fn constant_sample_is_rejected() {
        let grid = linspace(-1.0, 1.0, 11);
        assert!(matches!(
            kde_density(&[2.0, 2.0, 2.0], &grid),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn unsorted_grid_is_rejected() {
        assert!(kde_density(&[0.0, 1.0], &[0.0, -1.0]).is_err());
    }

    #[test]
    fn mass_integrates_to_one() {
        // Deterministic pseudo-sample via the crate stream.
        let mut s = crate::rng::RngState::new(3).stream();
        let samples: Vec<f64> = (0..20_000).map(|_| s.next_normal()).collect();
        let h = silverman_bandwidth(&samples).unwrap();
        let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * h;
        let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
        let d = kde_density(&samples, &linspace(lo, hi, 801)).unwrap();
        let mass = d.trapezoid_integral();
        assert!((0.98..=1.02).contains(&mass), "mass {mass}");
        assert!(d.values().iter().all(|&v| v >= 0.0));
    }
}

//! Fixed-grid Gaussian kernel density for per-arm score comparison.

use crate::error::{Error, Result};

/// Per-arm densities of a score, evaluated on a common grid.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ArmDensities {
    pub grid: Vec<f64>,
    pub treated: Vec<f64>,
    pub control: Vec<f64>,
    pub bandwidth_treated: f64,
    pub bandwidth_control: f64,
}

/// Silverman's rule of thumb: `0.9 min(sd, iqr/1.34) n^(-1/5)`, floored to
/// keep degenerate samples finite.
fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantile = |q: f64| {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    };
    let iqr = quantile(0.75) - quantile(0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    (0.9 * spread * n.powf(-0.2)).max(1e-4)
}

fn kernel_density(values: &[f64], grid: &[f64], bandwidth: f64) -> Vec<f64> {
    let norm = 1.0 / (values.len() as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    grid.iter()
        .map(|&g| {
            norm * values
                .iter()
                .map(|&v| (-0.5 * ((g - v) / bandwidth).powi(2)).exp())
                .sum::<f64>()
        })
        .collect()
}

/// Kernel densities of the two arms' scores on an even grid over [0, 1]
/// (the natural domain of a probability score), one bandwidth per arm.
pub fn score_densities(
    treated: &[f64],
    control: &[f64],
    points: usize,
) -> Result<ArmDensities> {
    if treated.is_empty() {
        return Err(Error::EmptyGroup(1));
    }
    if control.is_empty() {
        return Err(Error::EmptyGroup(0));
    }
    if points < 2 {
        return Err(Error::Domain("density grid needs at least 2 points".into()));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| i as f64 / (points - 1) as f64)
        .collect();
    let bandwidth_treated = silverman_bandwidth(treated);
    let bandwidth_control = silverman_bandwidth(control);
    Ok(ArmDensities {
        treated: kernel_density(treated, &grid, bandwidth_treated),
        control: kernel_density(control, &grid, bandwidth_control),
        grid,
        bandwidth_treated,
        bandwidth_control,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::SeededRng;
    use rand::Rng;

    #[test]
    fn densities_integrate_to_roughly_one() {
        let mut rng = SeededRng::new(31, 0);
        let treated: Vec<f64> = (0..500).map(|_| rng.random_range(0.2..0.8)).collect();
        let control: Vec<f64> = (0..500).map(|_| rng.random_range(0.1..0.7)).collect();
        let d = score_densities(&treated, &control, 201).unwrap();
        for dens in [&d.treated, &d.control] {
            let step = d.grid[1] - d.grid[0];
            let mass: f64 = dens.iter().sum::<f64>() * step;
            assert!((mass - 1.0).abs() < 0.05, "mass {mass}");
        }
    }

    #[test]
    fn degenerate_scores_stay_finite() {
        let treated = vec![0.5; 40];
        let control = vec![0.25; 40];
        let d = score_densities(&treated, &control, 101).unwrap();
        assert!(d.treated.iter().all(|v| v.is_finite()));
        assert!(d.bandwidth_treated >= 1e-4);
    }

    #[test]
    fn arm_emptiness_is_reported() {
        assert!(matches!(
            score_densities(&[], &[0.5], 11),
            Err(Error::EmptyGroup(1))
        ));
        assert!(matches!(
            score_densities(&[0.5], &[], 11),
            Err(Error::EmptyGroup(0))
        ));
    }
}

//! The two-dimensional polarization map: Gaussian kernel densities of the
//! Democrat and Republican populations over (influence percentile, rescaled
//! botness), scored cell by cell with a normalized density log-ratio.

use rayon::prelude::*;
use thiserror::Error;

use crate::partisan::Polarity;
use crate::scalar::{from_count, from_f64, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("density estimation needs at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("density grids have different shapes")]
    GridMismatch,
    #[error("map point {index} lies outside the unit square")]
    OutOfRange { index: usize },
}

/// Minimum points per polarity for a density estimate.
pub const MIN_DENSITY_POINTS: usize = 10;

/// One politically polarized user projected onto the map plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint<T> {
    /// Influence percentile in [0, 1].
    pub x: T,
    /// Raw botness in [0, 1]; rescaled before density estimation.
    pub y_raw: T,
    pub polarity: Polarity,
}

/// Empirical-CDF rescaling: each query value maps to the fraction of
/// reference values at or below it, with tied reference blocks contributing
/// their average rank. Equal-length intervals of the output then hold equal
/// numbers of reference values. Monotone non-decreasing; values below the
/// reference minimum map to 0 and above the maximum to 1.
pub fn botness_rescale<T: Real>(reference: &[T], queries: &[T]) -> Vec<T> {
    assert!(reference.len() >= 2, "rescaling needs >= 2 reference values");
    let mut sorted = reference.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("botness values must not be NaN"));
    let n = from_count::<T>(sorted.len());
    queries
        .iter()
        .map(|&value| {
            let below = sorted.partition_point(|&r| r < value);
            let through = sorted.partition_point(|&r| r <= value);
            let ties = through - below;
            if ties == 0 {
                from_count::<T>(below) / n
            } else {
                // average rank of the tied block
                let half = from_count::<T>(ties + 1) / from_count::<T>(2);
                (from_count::<T>(below) + half) / n
            }
        })
        .collect()
}

/// Kernel bandwidth selection per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth<T> {
    /// Scott's rule: sample standard deviation times `n^(-1/6)`.
    Scott,
    Fixed { x: T, y: T },
}

/// A normalized density over the unit square on a regular grid, stored
/// row-major as `values[ix * gy + iy]` at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid<T> {
    pub gx: usize,
    pub gy: usize,
    pub values: Vec<T>,
}

impl<T: Real> DensityGrid<T> {
    /// Riemann-sum integral over the unit square; 1 after normalization.
    pub fn integral(&self) -> T {
        let cell = T::one() / from_count::<T>(self.gx * self.gy);
        self.values.iter().fold(T::zero(), |acc, &v| acc + v) * cell
    }
}

/// Scott's rule for a 2D product kernel, floored at half a cell width so
/// degenerate (zero-variance) samples still land mass on the nearest cell.
fn scott_bandwidth<T: Real>(values: &[T], cells: usize) -> T {
    let n = from_count::<T>(values.len());
    let mean = values.iter().fold(T::zero(), |acc, &v| acc + v) / n;
    let variance = values
        .iter()
        .fold(T::zero(), |acc, &v| acc + (v - mean) * (v - mean))
        / (n - T::one());
    let exponent = from_f64::<T>(-1.0 / 6.0);
    let h = variance.sqrt() * n.powf(exponent);
    h.max(from_f64::<T>(0.5) / from_count(cells))
}

/// Gaussian kernel density of one population on a `gx x gy` grid over the
/// unit square, with mass reflected at the boundaries and renormalized so the
/// grid integrates to one.
pub fn density_grid<T: Real>(
    points: &[(T, T)],
    gx: usize,
    gy: usize,
    bandwidth: Bandwidth<T>,
) -> Result<DensityGrid<T>, MapError> {
    if points.len() < MIN_DENSITY_POINTS {
        return Err(MapError::TooFewPoints {
            needed: MIN_DENSITY_POINTS,
            found: points.len(),
        });
    }
    for (index, &(x, y)) in points.iter().enumerate() {
        if !(T::zero()..=T::one()).contains(&x) || !(T::zero()..=T::one()).contains(&y) {
            return Err(MapError::OutOfRange { index });
        }
    }
    let n = points.len();
    let xs: Vec<T> = points.iter().map(|p| p.0).collect();
    let ys: Vec<T> = points.iter().map(|p| p.1).collect();
    let (hx, hy) = match bandwidth {
        Bandwidth::Scott => (scott_bandwidth(&xs, gx), scott_bandwidth(&ys, gy)),
        Bandwidth::Fixed { x, y } => {
            assert!(x > T::zero() && y > T::zero(), "bandwidths must be positive");
            (x, y)
        }
    };

    let inv_sqrt_2pi = from_f64::<T>(1.0 / (2.0 * std::f64::consts::PI).sqrt());
    let half = from_f64::<T>(0.5);
    let two = from_count::<T>(2);
    // per-axis kernel value with reflection at 0 and 1
    let kernel = |center: T, point: T, h: T| -> T {
        let mut total = T::zero();
        for image in [point, -point, two - point] {
            let u = (center - image) / h;
            total = total + (-half * u * u).exp();
        }
        total * inv_sqrt_2pi / h
    };

    // Separable precompute: KX is gx x n (row-major per cell row), KY is
    // n x gy (row-major per point), so the accumulation below streams both.
    let x_centers: Vec<T> = (0..gx)
        .map(|ix| (from_count::<T>(ix) + half) / from_count::<T>(gx))
        .collect();
    let y_centers: Vec<T> = (0..gy)
        .map(|iy| (from_count::<T>(iy) + half) / from_count::<T>(gy))
        .collect();
    let mut kx: Vec<T> = Vec::with_capacity(gx * n);
    for &cx in &x_centers {
        for &px in &xs {
            kx.push(kernel(cx, px, hx));
        }
    }
    let mut ky: Vec<T> = Vec::with_capacity(n * gy);
    for &py in &ys {
        for &cy in &y_centers {
            ky.push(kernel(cy, py, hy));
        }
    }

    let nf = from_count::<T>(n);
    let mut values: Vec<T> = (0..gx)
        .into_par_iter()
        .flat_map_iter(|ix| {
            let kx_row = &kx[ix * n..(ix + 1) * n];
            let mut row = vec![T::zero(); gy];
            for (point, &kxv) in kx_row.iter().enumerate() {
                let ky_row = &ky[point * gy..(point + 1) * gy];
                for (cell, &kyv) in row.iter_mut().zip(ky_row) {
                    *cell = *cell + kxv * kyv;
                }
            }
            row.into_iter().map(move |v| v / nf)
        })
        .collect();

    // renormalize the Riemann sum to exactly one
    let cell_area = T::one() / from_count::<T>(gx * gy);
    let total = values.iter().fold(T::zero(), |acc, &v| acc + v) * cell_area;
    if total > T::zero() {
        for v in values.iter_mut() {
            *v = *v / total;
        }
    }
    Ok(DensityGrid { gx, gy, values })
}

/// The polarization map grid: densities of both populations and the
/// normalized log-ratio score per cell, in `[-1, 1]` with -1 mostly Democrat
/// and +1 mostly Republican.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationGrid<T> {
    pub gx: usize,
    pub gy: usize,
    /// Cell edges, `gx + 1` and `gy + 1` entries.
    pub x_edges: Vec<T>,
    pub y_edges: Vec<T>,
    pub dem_density: Vec<T>,
    pub rep_density: Vec<T>,
    pub score: Vec<T>,
}

impl<T: Real> PolarizationGrid<T> {
    #[inline]
    pub fn cell(&self, ix: usize, iy: usize) -> usize {
        ix * self.gy + iy
    }
}

/// Scores every cell as `log((rep + floor) / (dem + floor))`, renormalized by
/// the maximum absolute value over the grid. Equal densities score zero
/// everywhere; swapping the populations negates every score exactly.
pub fn polarization_score_grid<T: Real>(
    dem: &DensityGrid<T>,
    rep: &DensityGrid<T>,
    floor: T,
) -> Result<PolarizationGrid<T>, MapError> {
    if dem.gx != rep.gx || dem.gy != rep.gy {
        return Err(MapError::GridMismatch);
    }
    assert!(floor > T::zero(), "density floor must be positive");
    let (gx, gy) = (dem.gx, dem.gy);
    // ln(rep + f) - ln(dem + f): the subtraction form makes the swap
    // antisymmetry exact in floating point.
    let raw: Vec<T> = rep
        .values
        .iter()
        .zip(&dem.values)
        .map(|(&r, &d)| (r + floor).ln() - (d + floor).ln())
        .collect();
    let max_abs = raw
        .iter()
        .fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let score: Vec<T> = if max_abs == T::zero() {
        vec![T::zero(); raw.len()]
    } else {
        raw.iter().map(|&v| v / max_abs).collect()
    };
    let edges = |count: usize| -> Vec<T> {
        (0..=count)
            .map(|i| from_count::<T>(i) / from_count::<T>(count))
            .collect()
    };
    Ok(PolarizationGrid {
        gx,
        gy,
        x_edges: edges(gx),
        y_edges: edges(gy),
        dem_density: dem.values.clone(),
        rep_density: rep.values.clone(),
        score,
    })
}

/// Rescales botness over the pooled reference, splits by polarity, estimates
/// both densities and scores the grid.
pub fn build_polarization_grid<T: Real>(
    points: &[MapPoint<T>],
    gx: usize,
    gy: usize,
    bandwidth: Bandwidth<T>,
    floor: T,
) -> Result<PolarizationGrid<T>, MapError> {
    for (index, p) in points.iter().enumerate() {
        let unit = T::zero()..=T::one();
        if !unit.contains(&p.x) || !unit.contains(&p.y_raw) {
            return Err(MapError::OutOfRange { index });
        }
    }
    let reference: Vec<T> = points.iter().map(|p| p.y_raw).collect();
    if reference.len() < 2 {
        return Err(MapError::TooFewPoints {
            needed: MIN_DENSITY_POINTS,
            found: reference.len(),
        });
    }
    let rescaled = botness_rescale(&reference, &reference);
    let split = |polarity: Polarity| -> Vec<(T, T)> {
        points
            .iter()
            .zip(&rescaled)
            .filter(|(p, _)| p.polarity == polarity)
            .map(|(p, &y)| (p.x, y))
            .collect()
    };
    let dem = density_grid(&split(Polarity::Democrat), gx, gy, bandwidth)?;
    let rep = density_grid(&split(Polarity::Republican), gx, gy, bandwidth)?;
    polarization_score_grid(&dem, &rep, floor)
}

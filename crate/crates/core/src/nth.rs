//! `N_th(p)`: mean gap between the backoff counters of an MLD's two links.

use serde::{Deserialize, Serialize};

use crate::params::BackoffParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NthModel {
    Constant {
        value: f64,
    },
    Affine {
        a: f64,
        b: f64,
    },
    /// Piecewise-linear table over `p`, sorted by `p`.
    Table {
        points: Vec<(f64, f64)>,
    },
}

pub const DEFAULT_TABLE_POINTS: usize = 200;

impl NthModel {
    /// Table of [`mean_counter_gap`] on an even grid over `[0, 1]`.
    pub fn table(backoff: &BackoffParams, intervals: usize) -> NthModel {
        let intervals = intervals.max(1);
        let points = (0..=intervals)
            .map(|k| {
                let p = k as f64 / intervals as f64;
                (p, mean_counter_gap(backoff, p))
            })
            .collect();
        NthModel::Table { points }
    }

    pub fn default_for(backoff: &BackoffParams) -> NthModel {
        NthModel::table(backoff, DEFAULT_TABLE_POINTS)
    }

    pub fn label(&self) -> String {
        match self {
            NthModel::Constant { value } => format!("constant({value})"),
            NthModel::Affine { a, b } => format!("affine({a}+{b}p)"),
            NthModel::Table { points } => format!("table({} points)", points.len()),
        }
    }
}

pub fn n_th(model: &NthModel, p: f64) -> f64 {
    let v = match model {
        NthModel::Constant { value } => *value,
        NthModel::Affine { a, b } => a + b * p,
        NthModel::Table { points } => interpolate(points, p),
    };
    v.max(0.0)
}

fn interpolate(points: &[(f64, f64)], p: f64) -> f64 {
    match points {
        [] => 0.0,
        [only] => only.1,
        _ => {
            let idx = points.partition_point(|&(x, _)| x <= p);
            let hi = idx.clamp(1, points.len() - 1);
            let (x0, y0) = points[hi - 1];
            let (x1, y1) = points[hi];
            if x1 == x0 {
                return y0;
            }
            let t = ((p - x0) / (x1 - x0)).clamp(0.0, 1.0);
            y0 + t * (y1 - y0)
        }
    }
}

/// `E|K1 - K2|` for two independent counters, each drawn by picking stage `i`
/// with the stationary stage-entry law (`(1-p) p^i` below `m`, `p^m` at `m`)
/// and then a value uniformly from `[0, W_i)`.
pub fn mean_counter_gap(backoff: &BackoffParams, p: f64) -> f64 {
    let windows = backoff.windows();
    let m = backoff.m as usize;
    let weights: Vec<f64> = (0..=m)
        .map(|i| {
            if i < m {
                (1.0 - p) * p.powi(i as i32)
            } else {
                p.powi(m as i32)
            }
        })
        .collect();
    let w_max = windows[m] as usize;
    // Point masses, then E|X - Y| = 2 sum_t F(t) (1 - F(t)).
    let mut pmf = vec![0.0; w_max];
    for (w, q) in windows.iter().zip(&weights) {
        let share = q / f64::from(*w);
        for slot in pmf.iter_mut().take(*w as usize) {
            *slot += share;
        }
    }
    let mut cdf = 0.0;
    let mut gap = 0.0;
    for mass in pmf {
        cdf += mass;
        gap += cdf * (1.0 - cdf);
    }
    2.0 * gap
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_and_affine() {
        assert_eq!(n_th(&NthModel::Constant { value: 3.5 }, 0.7), 3.5);
        assert_eq!(n_th(&NthModel::Affine { a: 1.0, b: 4.0 }, 0.5), 3.0);
        assert_eq!(n_th(&NthModel::Affine { a: -1.0, b: 0.0 }, 0.5), 0.0);
    }

    #[test]
    fn zero_collision_uniform_gap() {
        // Two uniform draws on {0..15}: (W^2 - 1) / (3W).
        let bo = BackoffParams::default();
        assert_relative_eq!(mean_counter_gap(&bo, 0.0), 255.0 / 48.0, epsilon = 1e-12);
        let table = NthModel::default_for(&bo);
        assert_relative_eq!(n_th(&table, 0.0), 255.0 / 48.0, epsilon = 1e-12);
    }

    #[test]
    fn table_hits_grid_points() {
        let bo = BackoffParams::default();
        let table = NthModel::table(&bo, 10);
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            assert_relative_eq!(
                n_th(&table, p),
                mean_counter_gap(&bo, p),
                max_relative = 1e-12
            );
        }
    }

    proptest! {
        #[test]
        fn nonnegative_and_bounded(p in 0.0f64..1.0) {
            let bo = BackoffParams::default();
            let t = NthModel::default_for(&bo);
            let v = n_th(&t, p);
            prop_assert!(v >= 0.0 && v < f64::from(bo.window(bo.m)));
        }

        #[test]
        fn interpolation_close_to_exact(p in 0.0f64..0.99) {
            let bo = BackoffParams { w0: 8, m: 3, cw_min_sld: 7 };
            let t = NthModel::table(&bo, 400);
            let exact = mean_counter_gap(&bo, p);
            prop_assert!((n_th(&t, p) - exact).abs() < 1e-2 * exact);
        }
    }
}

//! Expected list sizes and distortion of the list decoder, plus the
//! entropy bound on embedding efficiency.

use serde::Serialize;

use crate::code::StGenParams;
use crate::decoder::{weight_schedule_update, DecoderConfig};
use crate::error::{Error, Result};

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("probability {p} outside [0, 1]")));
    }
    let term = |q: f64| if q == 0.0 { 0.0 } else { -q * q.log2() };
    Ok(term(p) + term(1.0 - p))
}

/// The `p` in `(0, 1/2]` with `H(p) = alpha`, by bisection to 1e-12.
pub fn entropy_inverse(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Parameter(format!("rate {alpha} outside (0, 1]")));
    }
    if alpha == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid)? < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Upper bound `alpha / H^-1(alpha)` on embedding efficiency at rate `alpha`.
pub fn efficiency_bound(alpha: f64) -> Result<f64> {
    Ok(alpha / entropy_inverse(alpha)?)
}

pub(crate) fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expected number `V_i(j)` of weight-`j` partial errors in the list after
/// each step, under the decoder's weight schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionProfile {
    /// `table[i-1][j] = V_i(j)` for `0 <= j <= w_i`.
    pub table: Vec<Vec<f64>>,
    pub expected_list_sizes: Vec<f64>,
    pub w_schedule: Vec<usize>,
    /// Smallest `j` with `V_v(j) >= 1`, if any.
    pub r_alg: Option<usize>,
}

impl DistortionProfile {
    /// `V_i(j)`, zero outside the table.
    pub fn v(&self, i: usize, j: usize) -> f64 {
        self.table[i - 1].get(j).copied().unwrap_or(0.0)
    }

    /// `|B_i(j)| = Σ_{s <= j} V_i(s)`, zero for negative `j`.
    pub fn ball(&self, i: usize, j: isize) -> f64 {
        if j < 0 {
            return 0.0;
        }
        self.table[i - 1].iter().take(j as usize + 1).sum()
    }

    pub fn steps(&self) -> usize {
        self.table.len()
    }
}

pub fn distortion_profile(params: &StGenParams, cfg: &DecoderConfig) -> Result<DistortionProfile> {
    params.validate()?;
    cfg.validate()?;
    let (k1, n1) = params.block_dims(1);
    let first: Vec<f64> = (0..=cfg.w1)
        .map(|j| binomial(k1 + n1, j) / 2f64.powi(n1 as i32))
        .collect();
    let mut table = vec![first];
    let mut w_schedule = vec![cfg.w1];
    let mut sizes = vec![table[0].iter().sum::<f64>()];

    for i in 2..=params.v {
        let (ki, ni) = params.block_dims(i);
        // Same rule as the decoder; for an integer cap, x < L iff floor(x) < L.
        let w = weight_schedule_update(w_schedule[i - 2], sizes[i - 2].floor() as usize, cfg);
        let prev = &table[i - 2];
        let scale = 2f64.powi(ni as i32);
        let coeff: Vec<f64> = (0..=cfg.wb).map(|l| binomial(ki + ni, l) / scale).collect();
        let row: Vec<f64> = (0..=w)
            .map(|j| {
                (0..=j.min(cfg.wb))
                    .map(|l| coeff[l] * prev.get(j - l).copied().unwrap_or(0.0))
                    .sum()
            })
            .collect();
        sizes.push(row.iter().sum());
        table.push(row);
        w_schedule.push(w);
    }
    let r_alg = table[params.v - 1].iter().position(|&x| x >= 1.0);
    Ok(DistortionProfile {
        table,
        expected_list_sizes: sizes,
        w_schedule,
        r_alg,
    })
}

/// Balls at or below this size are treated as empty when locating the
/// lowest live weight of a list.
pub const BALL_CUTOFF: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DynamicsReport {
    pub transitions: usize,
    /// Worst relative gap between the closed-form next list size and the
    /// directly summed one.
    pub closed_form_max_rel_err: f64,
    /// Ball sizes whose increase/decrease was predicted at constant weight.
    pub trend_checks: usize,
    pub trend_mismatches: usize,
    /// For each constant-weight stretch, how many non-decreasing steps came
    /// before the list shrank.
    pub shrink_delays: Vec<usize>,
    pub max_shrink_delay: Option<usize>,
    /// Non-decreasing constant-weight steps at the end of the walk that were
    /// cut off by the last block before the list could shrink.
    pub trailing_stretch: usize,
    /// `(2^{n_2} - k_2 - n_2 - 1) / C(k_2 + n_2, 2)`.
    pub growth_coefficient: f64,
    pub growth_coefficient_negative: bool,
    pub weight_increments: usize,
    pub growth_mismatches: usize,
    pub all_increments_grew: bool,
}

/// Evaluates the list growth and decay conditions for `w_b = 2` along the
/// expected trajectory of [`distortion_profile`].
pub fn list_dynamics_report(params: &StGenParams, cfg: &DecoderConfig) -> Result<DynamicsReport> {
    if cfg.wb != 2 {
        return Err(Error::Parameter(format!(
            "list dynamics are only characterised for w_b = 2, got {}",
            cfg.wb
        )));
    }
    let prof = distortion_profile(params, cfg)?;
    let (k2, n2) = (params.k2, params.n2);
    let m = (k2 + n2) as f64;
    let pairs = binomial(k2 + n2, 2);
    let scale = 2f64.powi(n2 as i32);
    let coefficient = (scale - m - 1.0) / pairs;

    let mut closed_form_max_rel_err = 0.0f64;
    let mut trend_checks = 0;
    let mut trend_mismatches = 0;
    let mut s_values = Vec::new();
    let mut streak = 0usize;
    let mut increments = 0;
    let mut growth_mismatches = 0;
    let mut all_grew = true;

    for i in 1..prof.steps() {
        let w = prof.w_schedule[i - 1] as isize;
        let list_now = prof.expected_list_sizes[i - 1];
        let list_next = prof.expected_list_sizes[i];
        let constant = prof.w_schedule[i] == prof.w_schedule[i - 1];

        let closed = if constant {
            (list_now + m * prof.ball(i, w - 1) + pairs * prof.ball(i, w - 2)) / scale
        } else {
            ((m + 1.0) * list_now + pairs * prof.ball(i, w - 1)) / scale
        };
        let rel = if list_next == 0.0 && closed == 0.0 {
            0.0
        } else {
            (closed - list_next).abs() / list_next.abs().max(f64::MIN_POSITIVE)
        };
        closed_form_max_rel_err = closed_form_max_rel_err.max(rel);

        if constant {
            let cut = |j: isize| {
                let b = prof.ball(i, j);
                if b <= BALL_CUTOFF {
                    0.0
                } else {
                    b
                }
            };
            let lowest = (0..=w).find(|&j| cut(j) > 0.0);
            if let Some(lowest) = lowest {
                for j in lowest..=w {
                    let predicted = m * cut(j - 1) + pairs * cut(j - 2) < (scale - 1.0) * cut(j);
                    let observed = prof.ball(i + 1, j) < prof.ball(i, j);
                    trend_checks += 1;
                    if predicted != observed {
                        trend_mismatches += 1;
                    }
                }
            }
            if list_next < list_now {
                s_values.push(streak);
                streak = 0;
            } else {
                streak += 1;
            }
        } else {
            streak = 0;
            increments += 1;
            let grew = list_next > list_now;
            let predicted = prof.ball(i, w - 1) > coefficient * list_now;
            all_grew &= grew;
            if grew != predicted {
                growth_mismatches += 1;
            }
        }
    }

    Ok(DynamicsReport {
        transitions: prof.steps().saturating_sub(1),
        closed_form_max_rel_err,
        trend_checks,
        trend_mismatches,
        max_shrink_delay: s_values.iter().copied().max(),
        shrink_delays: s_values,
        trailing_stretch: streak,
        growth_coefficient: coefficient,
        growth_coefficient_negative: coefficient < 0.0,
        weight_increments: increments,
        growth_mismatches,
        all_increments_grew: all_grew,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{base_catalog, BaseCode};
    use rand::{Rng, SeedableRng};

    /// Newton iteration on `H(p) - alpha`, independent of the bisection.
    fn newton_inverse(alpha: f64) -> f64 {
        let mut p = 0.25f64;
        for _ in 0..100 {
            let h = binary_entropy(p).unwrap() - alpha;
            let dh = ((1.0 - p) / p).log2();
            p = (p - h / dh).clamp(1e-15, 0.5);
        }
        p
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.11).unwrap() - 0.499916).abs() < 1e-6);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn inverse_values() {
        assert!((entropy_inverse(1.0).unwrap() - 0.5).abs() < 1e-12);
        let h = entropy_inverse(0.5).unwrap();
        assert!((h - newton_inverse(0.5)).abs() < 1e-11);
        assert!((h - 0.110028).abs() < 1e-6);
        for a in 1..=9 {
            let a = a as f64 / 10.0;
            let p = entropy_inverse(a).unwrap();
            assert!((binary_entropy(p).unwrap() - a).abs() < 1e-10);
            assert!((p - newton_inverse(a)).abs() < 1e-11);
        }
        assert!(entropy_inverse(0.0).is_err());
        assert!(entropy_inverse(1.1).is_err());
    }

    #[test]
    fn bound_values() {
        assert!((efficiency_bound(1.0).unwrap() - 2.0).abs() < 1e-10);
        let b = efficiency_bound(0.5).unwrap();
        assert!((b - 0.5 / newton_inverse(0.5)).abs() < 1e-9);
        assert!((b - 4.5443).abs() < 1e-3);
        let grid: Vec<f64> = (1..100)
            .map(|i| efficiency_bound(i as f64 / 100.0).unwrap())
            .collect();
        assert!(grid.windows(2).all(|w| w[0] > w[1]));
        assert!(efficiency_bound(0.0).is_err());
    }

    #[test]
    fn first_block_counts() {
        let base = BaseCode::from_id("(3,1)1").unwrap();
        let params = StGenParams::new(14, 2, base, 3, 0).unwrap();
        let p = distortion_profile(&params, &DecoderConfig::default()).unwrap();
        assert_eq!(p.table[0], vec![0.25, 4.0, 30.0]);
    }

    #[test]
    fn zero_weight_halves_each_block() {
        let base = BaseCode::from_id("(2,1)1").unwrap();
        let params = StGenParams::new(14, 1, base, 30, 0).unwrap();
        let p = distortion_profile(&params, &DecoderConfig::default()).unwrap();
        for i in 1..=30 {
            let expect = p.v(1, 0) / 2f64.powi(i as i32 - 1);
            assert!((p.v(i, 0) - expect).abs() <= 1e-15 * expect);
        }
    }

    #[test]
    fn table_shape_and_sign() {
        for base in base_catalog() {
            let params = StGenParams::new(10, 2, base, 120, 0).unwrap();
            let cfg = DecoderConfig {
                list_cap: 64,
                ..Default::default()
            };
            let p = distortion_profile(&params, &cfg).unwrap();
            for (i, row) in p.table.iter().enumerate() {
                assert_eq!(row.len(), p.w_schedule[i] + 1);
                assert!(row.iter().all(|&x| x >= 0.0));
            }
            for i in 1..p.steps() {
                let grew = p.w_schedule[i] == p.w_schedule[i - 1] + 1;
                assert_eq!(grew, p.expected_list_sizes[i - 1] < 64.0);
            }
        }
    }

    #[test]
    fn growth_coefficient_for_21() {
        let base = BaseCode::from_id("(2,1)1").unwrap();
        let params = StGenParams::new(14, 1, base, 50, 0).unwrap();
        let r = list_dynamics_report(&params, &DecoderConfig::default()).unwrap();
        assert_eq!(r.growth_coefficient, -1.0);
        assert!(r.growth_coefficient_negative);
        assert!(r.all_increments_grew);
    }

    #[test]
    fn dynamics_requires_wb_two() {
        let params = StGenParams::from_table2(2, 100, 0).unwrap();
        let cfg = DecoderConfig {
            wb: 1,
            ..Default::default()
        };
        assert!(list_dynamics_report(&params, &cfg).is_err());
    }

    #[test]
    fn closed_forms_match_direct_sums() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let cat = base_catalog();
        for _ in 0..10 {
            let base = cat[rng.gen_range(0..cat.len())].clone();
            let params = StGenParams::new(
                rng.gen_range(2..12),
                rng.gen_range(1..4),
                base,
                rng.gen_range(2..60),
                0,
            )
            .unwrap();
            let cfg = DecoderConfig {
                list_cap: rng.gen_range(4..200),
                ..Default::default()
            };
            let r = list_dynamics_report(&params, &cfg).unwrap();
            assert!(r.closed_form_max_rel_err <= 1e-12, "{r:?}");
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(16, 2), 120.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}

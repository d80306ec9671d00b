//! Monte-Carlo embedding experiments over the practical parameter table.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::{StGenCode, StGenParams, TABLE2};
use crate::decoder::DecoderConfig;
use crate::distortion::{distortion_profile, efficiency_bound};
use crate::embed::StegoContext;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Code length selection for a table row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeSize {
    /// The row's quoted length near 1000 bits.
    Quoted1000,
    /// The row's quoted length near 1500 bits.
    Quoted1500,
    /// The achievable length nearest to this target.
    Target(usize),
}

impl CodeSize {
    pub fn target_for_row(self, row: usize) -> usize {
        let r = &TABLE2[row - 1];
        match self {
            CodeSize::Quoted1000 => r.quoted_1000.0,
            CodeSize::Quoted1500 => r.quoted_1500.0,
            CodeSize::Target(n) => n,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    /// 1-based table rows.
    pub rows: Vec<usize>,
    pub sizes: Vec<CodeSize>,
    pub wbs: Vec<usize>,
    pub list_caps: Vec<usize>,
    pub w1: usize,
    pub retry_limit: usize,
    pub trials: usize,
    /// Seeds cover and message generation.
    pub seed: u64,
    /// Seeds the random blocks of every code.
    pub code_seed: u64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            rows: (1..=TABLE2.len()).collect(),
            sizes: vec![CodeSize::Quoted1000, CodeSize::Quoted1500],
            wbs: vec![2],
            list_caps: vec![DecoderConfig::default().list_cap],
            w1: 2,
            retry_limit: DecoderConfig::default().retry_limit,
            trials: 50,
            seed: 1,
            code_seed: 1,
        }
    }
}

/// One CSV row. Column names are part of the output format.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub code_id: String,
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub inv_alpha: f64,
    pub trials: usize,
    pub mean_distortion: Option<f64>,
    pub e_a: Option<f64>,
    #[serde(rename = "theory_R_alg")]
    pub theory_r_alg: Option<f64>,
    pub theory_e_a: Option<f64>,
    pub bound_e: f64,
    pub w_b: usize,
    #[serde(rename = "L_cap")]
    pub l_cap: usize,
    pub seed: String,
}

pub const CSV_COLUMNS: &str =
    "code_id,n,k,alpha,inv_alpha,trials,mean_distortion,e_a,theory_R_alg,theory_e_a,bound_e,w_b,L_cap,seed";

/// Random cover and message for one trial. The stream depends only on the
/// seed, row, size slot and trial, so every decoder setting sees the same
/// inputs.
pub fn trial_inputs(
    seed: u64,
    row: usize,
    size_slot: usize,
    trial: usize,
    n: usize,
    m: usize,
) -> (BitVector, BitVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((row as u64) << 48) | ((size_slot as u64) << 32) | trial as u64);
    let y = BitVector::from_bits((0..n).map(|_| rng.gen()));
    let msg = BitVector::from_bits((0..m).map(|_| rng.gen()));
    (y, msg)
}

/// Embeds `trials` random messages; returns the per-trial change counts in
/// trial order.
pub fn measure_changes(
    ctx: &StegoContext,
    seed: u64,
    row: usize,
    size_slot: usize,
    trials: usize,
) -> Result<Vec<usize>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let (y, m) = trial_inputs(seed, row, size_slot, t, ctx.block_len(), ctx.message_len());
            let out = ctx.emb(&y, &m)?;
            debug_assert_eq!(ctx.ext(&out.stego)?, m);
            Ok(out.changes)
        })
        .collect()
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<ExperimentRecord>> {
    let mut records = Vec::new();
    for &row in &plan.rows {
        if row == 0 || row > TABLE2.len() {
            return Err(Error::Parameter(format!(
                "table row {row} not in 1..={}",
                TABLE2.len()
            )));
        }
        for (slot, size) in plan.sizes.iter().enumerate() {
            let params = StGenParams::from_table2(row, size.target_for_row(row), plan.code_seed)?;
            let code = StGenCode::build(params.clone())?;
            let (n, k) = (code.n(), code.k());
            let alpha = (n - k) as f64 / n as f64;
            for &wb in &plan.wbs {
                for &cap in &plan.list_caps {
                    let cfg = DecoderConfig {
                        w1: plan.w1,
                        wb,
                        list_cap: cap,
                        retry_limit: plan.retry_limit,
                    };
                    let ctx = StegoContext::new(code.clone(), cfg)?;
                    let r_alg = distortion_profile(&params, &cfg)?.r_alg.map(|r| r as f64);
                    let (mean, e_a) = if plan.trials == 0 {
                        (None, None)
                    } else {
                        let changes = measure_changes(&ctx, plan.seed, row, slot, plan.trials)?;
                        let mean = changes.iter().sum::<usize>() as f64 / plan.trials as f64;
                        (Some(mean), Some((n - k) as f64 / mean))
                    };
                    records.push(ExperimentRecord {
                        code_id: format!("row{row}-n{n}-k{k}"),
                        n,
                        k,
                        alpha,
                        inv_alpha: 1.0 / alpha,
                        trials: plan.trials,
                        mean_distortion: mean,
                        e_a,
                        theory_r_alg: r_alg,
                        theory_e_a: r_alg.filter(|&r| r > 0.0).map(|r| (n - k) as f64 / r),
                        bound_e: efficiency_bound(alpha)?,
                        w_b: wb,
                        l_cap: cap,
                        seed: plan.seed.to_string(),
                    });
                }
            }
        }
    }
    Ok(records)
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_COLUMNS.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

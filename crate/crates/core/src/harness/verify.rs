//! Self-checks run by `stgen verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::{base_catalog, StGenCode, StGenParams, TABLE2};
use crate::decoder::{decode_close, DecoderConfig};
use crate::error::Result;
use crate::gf2::BitVector;
use crate::oracle::OracleBudget;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(check: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            check: check.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// A stored code to check for `G·H^T = 0` and for agreement with a
    /// fresh build from its own parameters and seed.
    pub descriptor: Option<StGenCode>,
    /// Random small codes for the decoder-versus-oracle comparison.
    pub oracle_codes: usize,
    pub words_per_code: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            descriptor: None,
            oracle_codes: 20,
            words_per_code: 10,
            seed: 1,
        }
    }
}

/// Random staircase parameters with `k <= 14` and `n <= 24`, at least two
/// blocks.
pub fn random_small_params(rng: &mut impl Rng) -> StGenParams {
    let catalog = base_catalog();
    loop {
        let base = catalog[rng.gen_range(0..catalog.len())].clone();
        let k1 = rng.gen_range(1..=8);
        let n1 = rng.gen_range(1..=3);
        let (k2, n2) = (base.k, base.n - base.k);
        let by_k = (14 - k1) / k2;
        let by_n = (24usize.saturating_sub(k1 + n1)) / (k2 + n2);
        let max_extra = by_k.min(by_n);
        if max_extra == 0 {
            continue;
        }
        let v = 1 + rng.gen_range(1..=max_extra);
        let seed = rng.gen();
        return StGenParams::new(k1, n1, base, v, seed).expect("valid by construction");
    }
}

/// Decoder weight minus true distance to the code, for random words on
/// random small codes.
pub fn decoder_oracle_gaps(
    codes: usize,
    words_per_code: usize,
    cfg: &DecoderConfig,
    seed: u64,
) -> Result<Vec<isize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = OracleBudget::default();
    let mut gaps = Vec::with_capacity(codes * words_per_code);
    for _ in 0..codes {
        let code = StGenCode::build(random_small_params(&mut rng))?;
        let g = code.generator_matrix();
        for _ in 0..words_per_code {
            let c0 = BitVector::from_bits((0..code.n()).map(|_| rng.gen()));
            let got = decode_close(&code, &c0, cfg)?;
            let best = oracle.nearest_codeword(&g, &c0)?;
            gaps.push(got.weight as isize - best.distance as isize);
        }
    }
    Ok(gaps)
}

fn gh_zero(code: &StGenCode) -> bool {
    let h = code.parity_check_matrix();
    code.generator_matrix()
        .mul(&h.transpose())
        .map(|m| m.is_zero())
        .unwrap_or(false)
}

pub fn run_verify(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let oracle = OracleBudget::default();

    for base in base_catalog() {
        let r = oracle.covering_radius(&base.generator())?;
        out.push(CheckResult::new(
            format!("covering_radius {}", base.id()),
            r == base.radius,
            format!("computed {r}, catalog {}", base.radius),
        ));
    }

    for (i, row) in TABLE2.iter().enumerate() {
        let params = StGenParams::from_table2(i + 1, row.quoted_1000.0, opts.seed)?;
        let code = StGenCode::build(params)?;
        out.push(CheckResult::new(
            format!("gh_zero row{} ({},{})", i + 1, code.n(), code.k()),
            gh_zero(&code),
            "G·H^T over the dense matrices",
        ));
    }

    match &opts.descriptor {
        Some(code) => {
            out.push(CheckResult::new(
                "gh_zero descriptor",
                gh_zero(code),
                "G·H^T over the dense matrices",
            ));
            let fresh = StGenCode::build(code.params().clone())?;
            out.push(CheckResult::new(
                "determinism descriptor",
                &fresh == code,
                "stored blocks against a rebuild from the stored seed",
            ));
        }
        None => {
            let params = StGenParams::from_table2(2, 1001, opts.seed)?;
            let same = StGenCode::build(params.clone())? == StGenCode::build(params)?;
            out.push(CheckResult::new(
                "determinism rebuild",
                same,
                "two builds from one seed",
            ));
        }
    }

    let cfg = DecoderConfig::default();
    let gaps = decoder_oracle_gaps(opts.oracle_codes, opts.words_per_code, &cfg, opts.seed)?;
    let min = gaps.iter().copied().min().unwrap_or(0);
    let mean = if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<isize>() as f64 / gaps.len() as f64
    };
    let exact = gaps.iter().filter(|&&g| g == 0).count();
    out.push(CheckResult::new(
        "decoder_vs_oracle",
        min >= 0,
        format!(
            "{} words, mean gap {mean:.4}, min gap {min}, exact {exact}",
            gaps.len()
        ),
    ));
    Ok(out)
}

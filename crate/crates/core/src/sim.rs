//! Monte Carlo frame error rate simulation.
//!
//! Frames are decoded in parallel in fixed-size batches and folded back in
//! frame order, stopping at the exact frame that reaches the error target.
//! Every frame draws from its own random stream keyed by the master seed and
//! the frame index, so results do not depend on the number of worker threads.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autgroup::{psl2_generators, GeneratorSet, ProductReplacement, SamplerParams};
use crate::channel::{encode, frame_rng, sigma_from_ebn0, transmit};
use crate::codes::{resolve_code, CodeSpec, Provenance};
use crate::decode::{DecodeParams, DecoderKind, DecoderState};
use crate::gf2::BinMatrix;
use crate::tanner::TannerGraph;
use crate::{Error, Result};

fn default_min_errors() -> u64 {
    100
}

fn default_max_frames() -> u64 {
    1_000_000
}

fn default_seed() -> u64 {
    1
}

fn default_batch() -> u64 {
    256
}

fn default_true() -> bool {
    true
}

/// A simulation run: one code, one decoder, a list of Eb/N0 points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// `qr:<p>`, `eqr:<p>` or an alist path.
    pub code: String,
    pub decoder: DecoderKind,
    #[serde(default)]
    pub params: DecodeParams,
    /// Iteration limit `T`; defaults to `I1·I2·I3`. Plain SPA and the
    /// undamped ELC decoder are driven by this value alone.
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub ebn0_db: Vec<f64>,
    #[serde(default = "default_min_errors")]
    pub min_frame_errors: u64,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// `psl2:<p>` or a generator JSON file; defaults to PSL(2,p) for
    /// constructed extended QR codes.
    #[serde(default)]
    pub automorphisms: Option<String>,
    #[serde(default)]
    pub sampler: SamplerParams,
    /// Frames decoded per parallel batch.
    #[serde(default = "default_batch")]
    pub batch_frames: u64,
    /// Transmit uniformly random codewords rather than the all-zero word.
    #[serde(default = "default_true")]
    pub random_codewords: bool,
}

impl SimConfig {
    pub fn new(code: impl Into<String>, decoder: DecoderKind) -> Self {
        SimConfig {
            code: code.into(),
            decoder,
            params: DecodeParams::default(),
            iterations: None,
            ebn0_db: Vec::new(),
            min_frame_errors: default_min_errors(),
            max_frames: default_max_frames(),
            seed: default_seed(),
            automorphisms: None,
            sampler: SamplerParams::default(),
            batch_frames: default_batch(),
            random_codewords: true,
        }
    }

    /// Iteration limit `T`.
    pub fn max_iterations(&self) -> usize {
        self.iterations.unwrap_or_else(|| self.params.max_iterations())
    }

    /// Parameters actually handed to the decoder.
    pub fn effective_params(&self) -> Result<DecodeParams> {
        let t = self.max_iterations();
        let p = match self.decoder {
            DecoderKind::Spa => DecodeParams {
                i1: 1,
                i2: t,
                i3: 1,
                alpha0: 1.0,
                p: 0,
                syndrome_stop: self.params.syndrome_stop,
            },
            DecoderKind::SpaElcUndamped => DecodeParams {
                syndrome_stop: self.params.syndrome_stop,
                ..DecodeParams::undamped(self.params.p, self.params.i1, t)?
            },
            DecoderKind::SpaPd | DecoderKind::SpaElc => {
                if t != self.params.max_iterations() {
                    return Err(Error::InvalidConfig(format!(
                        "iterations = {t} disagrees with I1·I2·I3 = {}",
                        self.params.max_iterations()
                    )));
                }
                self.params
            }
        };
        if self.decoder != DecoderKind::Spa {
            p.validate()?;
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_frame_errors == 0 {
            return Err(Error::InvalidConfig("min_frame_errors must be at least 1".into()));
        }
        if self.max_frames == 0 {
            return Err(Error::InvalidConfig("max_frames must be positive".into()));
        }
        if self.batch_frames == 0 {
            return Err(Error::InvalidConfig("batch_frames must be positive".into()));
        }
        if let Some(x) = self.ebn0_db.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig(format!("Eb/N0 value {x} is not finite")));
        }
        self.effective_params().map(|_| ())
    }
}

/// Aggregated result of one Eb/N0 point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FerPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    /// Frames decoded to a codeword other than the one transmitted.
    pub undetected: u64,
    pub fer: f64,
    pub avg_spa_messages: f64,
    pub avg_checkmsg_only: f64,
    pub avg_iterations: f64,
    pub avg_elc_ops: f64,
    /// The frame limit was reached before the error target.
    pub budget_exceeded: bool,
    #[serde(skip)]
    pub wallclock: Duration,
}

impl PartialEq for FerPoint {
    /// Compares statistics only; wall-clock time is ignored.
    fn eq(&self, o: &Self) -> bool {
        self.ebn0_db == o.ebn0_db
            && self.frames == o.frames
            && self.frame_errors == o.frame_errors
            && self.undetected == o.undetected
            && self.fer == o.fer
            && self.avg_spa_messages == o.avg_spa_messages
            && self.avg_checkmsg_only == o.avg_checkmsg_only
            && self.avg_iterations == o.avg_iterations
            && self.avg_elc_ops == o.avg_elc_ops
            && self.budget_exceeded == o.budget_exceeded
    }
}

impl FerPoint {
    /// Binomial standard deviation of the FER estimate.
    pub fn fer_sigma(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        (self.fer * (1.0 - self.fer) / self.frames as f64).sqrt()
    }
}

/// Per-frame outcome before aggregation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FrameOutcome {
    pub error: bool,
    pub undetected: bool,
    pub spa_messages: u64,
    pub checkmsg_only: u64,
    pub iterations: u64,
    pub elc_ops: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Totals {
    frames: u64,
    errors: u64,
    undetected: u64,
    spa_messages: u64,
    checkmsg_only: u64,
    iterations: u64,
    elc_ops: u64,
}

impl Totals {
    fn add(&mut self, f: &FrameOutcome) {
        self.frames += 1;
        self.errors += u64::from(f.error);
        self.undetected += u64::from(f.undetected);
        self.spa_messages += f.spa_messages;
        self.checkmsg_only += f.checkmsg_only;
        self.iterations += f.iterations;
        self.elc_ops += f.elc_ops;
    }

    fn point(&self, ebn0_db: f64, budget_exceeded: bool, wallclock: Duration) -> FerPoint {
        let n = self.frames.max(1) as f64;
        FerPoint {
            ebn0_db,
            frames: self.frames,
            frame_errors: self.errors,
            undetected: self.undetected,
            fer: self.errors as f64 / n,
            avg_spa_messages: self.spa_messages as f64 / n,
            avg_checkmsg_only: self.checkmsg_only as f64 / n,
            avg_iterations: self.iterations as f64 / n,
            avg_elc_ops: self.elc_ops as f64 / n,
            budget_exceeded,
            wallclock,
        }
    }
}

/// A configuration bound to its code, Tanner graph and sampler.
#[derive(Clone, Debug)]
pub struct Simulator {
    pub config: SimConfig,
    pub code: CodeSpec,
    params: DecodeParams,
    graph: TannerGraph,
    generator: BinMatrix,
    sampler: Option<ProductReplacement>,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        let code = resolve_code(&config.code)?;
        Self::with_code(config, code)
    }

    /// Uses `code` instead of resolving `config.code`.
    ///
    /// SPA and SPA-PD decode on `H` exactly as given; the ELC decoders start
    /// from `H` if it is in standard form and from its reduced echelon form
    /// otherwise.
    pub fn with_code(config: SimConfig, code: CodeSpec) -> Result<Self> {
        config.validate()?;
        let params = config.effective_params()?;
        let generator = code.generator_matrix();
        let graph = match config.decoder {
            DecoderKind::Spa | DecoderKind::SpaPd => TannerGraph::unpivoted(&code.h),
            DecoderKind::SpaElc | DecoderKind::SpaElcUndamped => TannerGraph::from_matrix(&code.h)?,
        };
        let sampler = if config.decoder == DecoderKind::SpaPd {
            let set = automorphisms_for(&config, &code, &generator)?;
            Some(ProductReplacement::new(&set, config.sampler, config.seed))
        } else {
            None
        };
        Ok(Simulator {
            config,
            code,
            params,
            graph,
            generator,
            sampler,
        })
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    pub fn params(&self) -> &DecodeParams {
        &self.params
    }

    pub fn rate(&self) -> f64 {
        self.code.k as f64 / self.code.n as f64
    }

    /// Transmits and decodes frame `index` at noise level `sigma`.
    pub fn run_frame(&self, state: &mut DecoderState, sigma: f64, index: u64) -> FrameOutcome {
        let mut rng = frame_rng(self.config.seed, index);
        let sent = if self.config.random_codewords {
            let u: Vec<u8> = (0..self.code.k).map(|_| u8::from(rng.random::<bool>())).collect();
            encode(&self.generator, &u)
        } else {
            vec![0; self.code.n]
        };
        let y = transmit(&sent, sigma, &mut rng);
        let res = match self.config.decoder {
            DecoderKind::Spa => {
                state.spa_with(&y, &self.graph, self.params.i2, sigma, self.params.syndrome_stop)
            }
            DecoderKind::SpaPd => {
                let base = self.sampler.as_ref().expect("sampler built for SPA-PD");
                let mut sampler = base.reseeded(rng.next_u64());
                state.spa_pd(&y, &self.graph, &self.params, &mut sampler, sigma)
            }
            DecoderKind::SpaElc | DecoderKind::SpaElcUndamped => {
                let mut tg = self.graph.clone();
                state.spa_elc(&y, &mut tg, &self.params, sigma, &mut rng)
            }
        };
        let undetected = res.codeword.as_ref().is_some_and(|c| *c != sent);
        FrameOutcome {
            error: !res.converged || undetected,
            undetected,
            spa_messages: res.spa_messages,
            checkmsg_only: res.checkmsg_only,
            iterations: res.iterations_used as u64,
            elc_ops: res.elc_ops,
        }
    }

    /// Simulates frames until `min_frame_errors` errors or `max_frames` frames.
    pub fn run_point(&self, ebn0_db: f64) -> FerPoint {
        let start = Instant::now();
        let sigma = sigma_from_ebn0(ebn0_db, self.rate());
        let mut totals = Totals::default();
        let mut next = 0u64;
        loop {
            let end = (next + self.config.batch_frames).min(self.config.max_frames);
            let outcomes: Vec<FrameOutcome> = (next..end)
                .into_par_iter()
                .map_init(
                    || DecoderState::for_graph(&self.graph),
                    |st, idx| self.run_frame(st, sigma, idx),
                )
                .collect();
            for o in &outcomes {
                totals.add(o);
                if totals.errors >= self.config.min_frame_errors {
                    return totals.point(ebn0_db, false, start.elapsed());
                }
            }
            next = end;
            if next >= self.config.max_frames {
                return totals.point(ebn0_db, true, start.elapsed());
            }
        }
    }

    pub fn run_curve(&self) -> Vec<FerPoint> {
        self.config.ebn0_db.iter().map(|&e| self.run_point(e)).collect()
    }

    /// Result rows for the CSV/JSON output.
    pub fn rows(&self, points: &[FerPoint]) -> Vec<ResultRow> {
        points
            .iter()
            .map(|pt| ResultRow::new(&self.code.name, self.config.decoder, &self.params, self.config.seed, pt))
            .collect()
    }
}

fn automorphisms_for(config: &SimConfig, code: &CodeSpec, g: &BinMatrix) -> Result<GeneratorSet> {
    let set = match config.automorphisms.as_deref() {
        Some(spec) => match spec.strip_prefix("psl2:") {
            Some(p) => psl2_generators(
                p.parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad prime in {spec:?}")))?,
            )?,
            None => return GeneratorSet::load(spec, g, &code.h),
        },
        None => match code.provenance {
            Provenance::Constructed { p, extended: true } => psl2_generators(p)?,
            _ => {
                return Err(Error::InvalidConfig(
                    "SPA-PD needs automorphisms (psl2:<p> or a generator file)".into(),
                ))
            }
        },
    };
    if set.n != code.n {
        return Err(Error::DimensionMismatch(format!(
            "generators act on {} coordinates, code has {}",
            set.n, code.n
        )));
    }
    set.verify(g, &code.h)?;
    Ok(set)
}

/// Resolves the code and simulates one point.
pub fn run_point(config: &SimConfig, ebn0_db: f64) -> Result<FerPoint> {
    Ok(Simulator::new(config.clone())?.run_point(ebn0_db))
}

/// Resolves the code and simulates every configured point.
pub fn run_curve(config: &SimConfig) -> Result<Vec<FerPoint>> {
    Ok(Simulator::new(config.clone())?.run_curve())
}

/// One output row; the JSON form mirrors the CSV columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub code: String,
    pub decoder: String,
    pub p: usize,
    #[serde(rename = "I1")]
    pub i1: usize,
    #[serde(rename = "I2")]
    pub i2: usize,
    #[serde(rename = "I3")]
    pub i3: usize,
    pub alpha0: f64,
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub undetected: u64,
    pub fer: f64,
    pub avg_spa_messages: f64,
    pub avg_checkmsg_only: f64,
    pub avg_iterations: f64,
    pub avg_elc_ops: f64,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "code,decoder,p,I1,I2,I3,alpha0,ebn0_db,frames,frame_errors,undetected,fer,avg_spa_messages,avg_checkmsg_only,avg_iterations,avg_elc_ops,seed";

impl ResultRow {
    pub fn new(code: &str, decoder: DecoderKind, params: &DecodeParams, seed: u64, pt: &FerPoint) -> Self {
        ResultRow {
            code: code.to_string(),
            decoder: decoder.to_string(),
            p: params.p,
            i1: params.i1,
            i2: params.i2,
            i3: params.i3,
            alpha0: params.alpha0,
            ebn0_db: pt.ebn0_db,
            frames: pt.frames,
            frame_errors: pt.frame_errors,
            undetected: pt.undetected,
            fer: pt.fer,
            avg_spa_messages: pt.avg_spa_messages,
            avg_checkmsg_only: pt.avg_checkmsg_only,
            avg_iterations: pt.avg_iterations,
            avg_elc_ops: pt.avg_elc_ops,
            seed,
        }
    }

    fn csv_line(&self) -> String {
        let code = if self.code.contains([',', '"', '\n']) {
            format!("\"{}\"", self.code.replace('"', "\"\""))
        } else {
            self.code.clone()
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            code,
            self.decoder,
            self.p,
            self.i1,
            self.i2,
            self.i3,
            self.alpha0,
            self.ebn0_db,
            self.frames,
            self.frame_errors,
            self.undetected,
            self.fer,
            self.avg_spa_messages,
            self.avg_checkmsg_only,
            self.avg_iterations,
            self.avg_elc_ops,
            self.seed
        )
    }
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[ResultRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)? + "\n")
}

/// Two-column gnuplot data: `(ebn0 fer, ebn0 avg_spa_messages)`.
pub fn to_gnuplot(points: &[FerPoint]) -> (String, String) {
    let mut fer = String::new();
    let mut msgs = String::new();
    for p in points {
        let _ = writeln!(fer, "{} {}", p.ebn0_db, p.fer);
        let _ = writeln!(msgs, "{} {}", p.ebn0_db, p.avg_spa_messages);
    }
    (fer, msgs)
}

/// Results of an ELC-per-step sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<ResultRow>,
    /// Best `p` per Eb/N0 point: lowest FER, ties broken by fewer messages.
    pub best: Vec<(f64, usize)>,
}

/// Runs the configured ELC decoder once per value of `p`.
pub fn sweep_p(config: &SimConfig, p_values: &[usize]) -> Result<SweepReport> {
    if !matches!(config.decoder, DecoderKind::SpaElc | DecoderKind::SpaElcUndamped) {
        return Err(Error::InvalidConfig("p sweeps need an ELC decoder".into()));
    }
    let mut seen = p_values.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfig("duplicate p values".into()));
    }
    let code = resolve_code(&config.code)?;
    let mut rows = Vec::new();
    let mut per_p = Vec::new();
    for &p in p_values {
        let mut cfg = config.clone();
        cfg.params.p = p;
        let sim = Simulator::with_code(cfg, code.clone())?;
        let pts = sim.run_curve();
        rows.extend(sim.rows(&pts));
        per_p.push((p, pts));
    }
    let best = config
        .ebn0_db
        .iter()
        .enumerate()
        .filter_map(|(i, &e)| {
            per_p
                .iter()
                .min_by(|a, b| {
                    let (x, y) = (&a.1[i], &b.1[i]);
                    x.fer
                        .total_cmp(&y.fer)
                        .then(x.avg_spa_messages.total_cmp(&y.avg_spa_messages))
                })
                .map(|(p, _)| (e, *p))
        })
        .collect();
    Ok(SweepReport { rows, best })
}

//! Flooding sum-product decoding (SPA), permutation decoding (SPA-PD) and
//! decoding with random edge local complementation (SPA-ELC).
//!
//! Messages live in dense `checks × bits` arrays indexed `check * n + bit`.
//! Entries off the current incidence set are kept at zero, so the storage
//! always mirrors the Tanner graph in effect.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::autgroup::{Permutation, ProductReplacement};
use crate::channel::llr;
use crate::gf2::pack_bits;
use crate::tanner::TannerGraph;
use crate::{Error, Result};

/// Bound on the magnitude of every message.
pub const MSG_CLAMP: f64 = 25.0;

/// Iteration and damping parameters shared by SPA-PD and SPA-ELC.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub i1: usize,
    pub i2: usize,
    pub i3: usize,
    pub alpha0: f64,
    /// ELC operations per inner step (SPA-ELC only).
    pub p: usize,
    /// Stop as soon as the hard decision is a codeword.
    #[serde(default = "default_true")]
    pub syndrome_stop: bool,
}

fn default_true() -> bool {
    true
}

impl Default for DecodeParams {
    fn default() -> Self {
        DecodeParams {
            i1: 1,
            i2: 30,
            i3: 20,
            alpha0: 0.08,
            p: 1,
            syndrome_stop: true,
        }
    }
}

impl DecodeParams {
    /// Maximum number of flooding iterations, `I1·I2·I3`.
    pub fn max_iterations(&self) -> usize {
        self.i1 * self.i2 * self.i3
    }

    /// The undamped decoder with `T` iterations: `α0 = 1`, `I2 = T/I1`, `I3 = 1`.
    pub fn undamped(p: usize, i1: usize, t: usize) -> Result<Self> {
        if i1 == 0 || !t.is_multiple_of(i1) {
            return Err(Error::InvalidConfig(format!(
                "T={t} is not a positive multiple of I1={i1}"
            )));
        }
        Ok(DecodeParams {
            i1,
            i2: t / i1,
            i3: 1,
            alpha0: 1.0,
            p,
            syndrome_stop: true,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.i1 == 0 || self.i2 == 0 || self.i3 == 0 {
            return Err(Error::InvalidConfig(
                "I1, I2 and I3 must be positive".into(),
            ));
        }
        if !(self.alpha0 > 0.0 && self.alpha0 <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha0 = {} outside (0, 1]",
                self.alpha0
            )));
        }
        Ok(())
    }
}

/// Damping coefficient on outer loop `t`: a linear ramp from `alpha0` at
/// `t = 0` to exactly 1 at `t = I3 − 1`; constant `alpha0` when `I3 = 1`.
pub fn damping_schedule(alpha0: f64, i3: usize, t: usize) -> f64 {
    if i3 <= 1 {
        alpha0
    } else {
        alpha0 + t as f64 * (1.0 - alpha0) / (i3 - 1) as f64
    }
}

/// Decoder variants driven by the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Spa,
    SpaPd,
    SpaElc,
    SpaElcUndamped,
}

impl DecoderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecoderKind::Spa => "spa",
            DecoderKind::SpaPd => "spa_pd",
            DecoderKind::SpaElc => "spa_elc",
            DecoderKind::SpaElcUndamped => "spa_elc_undamped",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "spa" => Ok(DecoderKind::Spa),
            "spa_pd" => Ok(DecoderKind::SpaPd),
            "spa_elc" => Ok(DecoderKind::SpaElc),
            "spa_elc_undamped" => Ok(DecoderKind::SpaElcUndamped),
            _ => Err(Error::InvalidConfig(format!("unknown decoder {s:?}"))),
        }
    }
}

/// Outcome of decoding one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// The decoded codeword when the decoder converged.
    pub codeword: Option<Vec<u8>>,
    /// Final hard decision, in the original coordinate order.
    pub hard_decision: Vec<u8>,
    pub iterations_used: usize,
    /// Messages in both directions (2 per incidence per flooding).
    pub spa_messages: u64,
    /// Check-to-bit messages only (1 per incidence per flooding).
    pub checkmsg_only: u64,
    pub elc_ops: u64,
    pub converged: bool,
}

/// Running totals for one frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub spa_messages: u64,
    pub checkmsg_only: u64,
    pub flood_iterations: usize,
    pub elc_ops: u64,
}

/// Messages, channel LLRs and APPs of one decoder instance.
#[derive(Clone, Debug)]
pub struct DecoderState {
    n: usize,
    m: usize,
    /// Channel LLRs currently fed to the bit nodes.
    pub channel: Vec<f64>,
    b2c: Vec<f64>,
    c2b: Vec<f64>,
    /// A posteriori LLRs after the last flooding.
    pub app: Vec<f64>,
    pub counters: Counters,
    tanh_buf: Vec<f64>,
    prefix_buf: Vec<f64>,
}

impl DecoderState {
    pub fn new(n_bits: usize, n_checks: usize) -> Self {
        DecoderState {
            n: n_bits,
            m: n_checks,
            channel: vec![0.0; n_bits],
            b2c: vec![0.0; n_bits * n_checks],
            c2b: vec![0.0; n_bits * n_checks],
            app: vec![0.0; n_bits],
            counters: Counters::default(),
            tanh_buf: Vec::new(),
            prefix_buf: Vec::new(),
        }
    }

    pub fn for_graph(tg: &TannerGraph) -> Self {
        Self::new(tg.n_bits(), tg.n_checks())
    }

    fn reset(&mut self, channel: &[f64]) {
        self.channel.copy_from_slice(channel);
        self.app.copy_from_slice(channel);
        self.counters = Counters::default();
    }

    #[inline]
    pub fn bit_to_check(&self, check: usize, bit: usize) -> f64 {
        self.b2c[check * self.n + bit]
    }

    #[inline]
    pub fn check_to_bit(&self, check: usize, bit: usize) -> f64 {
        self.c2b[check * self.n + bit]
    }

    /// Sets every bit-to-check message to the bit's channel LLR and every
    /// check-to-bit message to zero; entries off the incidence set are zeroed.
    pub fn init_messages(&mut self, tg: &TannerGraph) {
        self.b2c.fill(0.0);
        self.c2b.fill(0.0);
        for j in 0..self.m {
            for &v in tg.check_nbrs(j) {
                self.b2c[j * self.n + v] = self.channel[v].clamp(-MSG_CLAMP, MSG_CLAMP);
            }
        }
    }

    /// True iff nonzero messages occur only on incidences of `tg`.
    pub fn messages_match(&self, tg: &TannerGraph) -> bool {
        (0..self.m).all(|j| {
            (0..self.n).all(|v| {
                tg.has_edge(j, v) || (self.b2c[j * self.n + v] == 0.0 && self.c2b[j * self.n + v] == 0.0)
            })
        })
    }

    /// One flooding iteration: all checks (tanh rule), then all bits.
    pub fn flood_iteration(&mut self, tg: &TannerGraph) {
        let n = self.n;
        let t_max = (MSG_CLAMP / 2.0).tanh();
        for j in 0..self.m {
            let nbrs = tg.check_nbrs(j);
            let d = nbrs.len();
            self.tanh_buf.clear();
            self.tanh_buf
                .extend(nbrs.iter().map(|&v| (self.b2c[j * n + v] / 2.0).tanh()));
            // prefix_buf[i] = product of tanh_buf[..i].
            self.prefix_buf.clear();
            let mut acc = 1.0;
            for &t in &self.tanh_buf {
                self.prefix_buf.push(acc);
                acc *= t;
            }
            let mut suffix = 1.0;
            for i in (0..d).rev() {
                let prod = self.prefix_buf[i] * suffix;
                self.c2b[j * n + nbrs[i]] = if prod.abs() >= t_max {
                    MSG_CLAMP.copysign(prod)
                } else {
                    2.0 * prod.atanh()
                };
                suffix *= self.tanh_buf[i];
            }
        }
        for v in 0..n {
            let nbrs = tg.bit_nbrs(v);
            let total = self.channel[v] + nbrs.iter().map(|&u| self.c2b[u * n + v]).sum::<f64>();
            self.app[v] = total;
            for &u in nbrs {
                self.b2c[u * n + v] = (total - self.c2b[u * n + v]).clamp(-MSG_CLAMP, MSG_CLAMP);
            }
        }
        let e = tg.n_edges() as u64;
        self.counters.spa_messages += 2 * e;
        self.counters.checkmsg_only += e;
        self.counters.flood_iterations += 1;
    }

    /// Hard decision of the APPs; a zero LLR decodes to 0.
    pub fn hard_decision(&self) -> Vec<u8> {
        self.app.iter().map(|&x| u8::from(x < 0.0)).collect()
    }

    fn finish(&self, word: Vec<u8>, converged: bool) -> DecodeResult {
        DecodeResult {
            codeword: converged.then(|| word.clone()),
            hard_decision: word,
            iterations_used: self.counters.flood_iterations,
            spa_messages: self.counters.spa_messages,
            checkmsg_only: self.counters.checkmsg_only,
            elc_ops: self.counters.elc_ops,
            converged,
        }
    }

    /// Plain flooding SPA for at most `max_iter` iterations.
    pub fn spa(&mut self, y: &[f64], tg: &TannerGraph, max_iter: usize, sigma: f64) -> DecodeResult {
        self.spa_with(y, tg, max_iter, sigma, true)
    }

    pub fn spa_with(
        &mut self,
        y: &[f64],
        tg: &TannerGraph,
        max_iter: usize,
        sigma: f64,
        syndrome_stop: bool,
    ) -> DecodeResult {
        self.reset(&llr(y, sigma));
        self.init_messages(tg);
        let mut word = self.hard_decision();
        for _ in 0..max_iter {
            self.flood_iteration(tg);
            word = self.hard_decision();
            if syndrome_stop && is_codeword(tg, &word) {
                return self.finish(word, true);
            }
        }
        let ok = max_iter > 0 && is_codeword(tg, &word);
        self.finish(word, ok)
    }

    /// SPA with random automorphisms between damped re-initialisations.
    pub fn spa_pd(
        &mut self,
        y: &[f64],
        tg: &TannerGraph,
        params: &DecodeParams,
        sampler: &mut ProductReplacement,
        sigma: f64,
    ) -> DecodeResult {
        let l0 = llr(y, sigma);
        self.reset(&l0);
        let mut theta = Permutation::identity(self.n);
        let mut word = self.hard_decision();
        for t in 0..params.i3 {
            let alpha = damping_schedule(params.alpha0, params.i3, t);
            self.channel.copy_from_slice(&l0);
            theta = Permutation::identity(self.n);
            for _ in 0..params.i2 {
                self.init_messages(tg);
                for _ in 0..params.i1 {
                    self.flood_iteration(tg);
                }
                word = self.hard_decision();
                if params.syndrome_stop && is_codeword(tg, &word) {
                    return self.finish(theta.inverse().apply(&word), true);
                }
                for (l, &x) in self.channel.iter_mut().zip(&self.app) {
                    *l += (x - *l) * alpha;
                }
                let pi = sampler.sample();
                self.channel = pi.apply(&self.channel);
                theta = pi.compose(&theta);
            }
        }
        let ok = is_codeword(tg, &word);
        self.finish(theta.inverse().apply(&word), ok)
    }

    /// SPA interleaved with `p` random ELC operations per inner step. New
    /// incidences start from the damped APP of their bit. `tg` is modified.
    pub fn spa_elc<R: Rng>(
        &mut self,
        y: &[f64],
        tg: &mut TannerGraph,
        params: &DecodeParams,
        sigma: f64,
        rng: &mut R,
    ) -> DecodeResult {
        let l0 = llr(y, sigma);
        self.reset(&l0);
        let n = self.n;
        let mut word = self.hard_decision();
        for t in 0..params.i3 {
            let alpha = damping_schedule(params.alpha0, params.i3, t);
            self.channel.copy_from_slice(&l0);
            self.init_messages(tg);
            for _ in 0..params.i2 {
                for _ in 0..params.i1 {
                    self.flood_iteration(tg);
                }
                word = self.hard_decision();
                if params.syndrome_stop && is_codeword(tg, &word) {
                    return self.finish(word, true);
                }
                for _ in 0..params.p {
                    let count = tg.eligible_edge_count();
                    if count == 0 {
                        break;
                    }
                    let (j, v) = tg
                        .nth_eligible_edge(rng.random_range(0..count))
                        .expect("index below eligible count");
                    let rec = tg.elc_in_place(j, v).expect("eligible edge");
                    for &(c, b) in &rec.removed {
                        self.b2c[c * n + b] = 0.0;
                        self.c2b[c * n + b] = 0.0;
                    }
                    for &(c, b) in &rec.created {
                        let l = self.channel[b];
                        self.b2c[c * n + b] = ((self.app[b] - l) * alpha + l).clamp(-MSG_CLAMP, MSG_CLAMP);
                        self.c2b[c * n + b] = 0.0;
                    }
                    self.counters.elc_ops += 1;
                    debug_assert!(self.messages_match(tg));
                }
            }
        }
        let ok = is_codeword(tg, &word);
        self.finish(word, ok)
    }
}

/// Syndrome test against the graph's current parity-check matrix.
pub fn is_codeword(tg: &TannerGraph, word: &[u8]) -> bool {
    tg.matrix().annihilates(&pack_bits(word))
}

/// Plain SPA on a fresh decoder state.
pub fn spa(y: &[f64], tg: &TannerGraph, max_iter: usize, sigma: f64) -> DecodeResult {
    DecoderState::for_graph(tg).spa(y, tg, max_iter, sigma)
}

/// SPA-PD on a fresh decoder state.
pub fn spa_pd(
    y: &[f64],
    tg: &TannerGraph,
    params: &DecodeParams,
    sampler: &mut ProductReplacement,
    sigma: f64,
) -> DecodeResult {
    DecoderState::for_graph(tg).spa_pd(y, tg, params, sampler, sigma)
}

/// SPA-ELC on a fresh decoder state.
pub fn spa_elc<R: Rng>(
    y: &[f64],
    tg: &mut TannerGraph,
    params: &DecodeParams,
    sigma: f64,
    rng: &mut R,
) -> DecodeResult {
    DecoderState::for_graph(tg).spa_elc(y, tg, params, sigma, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autgroup::{psl2_generators, GeneratorSet, GeneratorSource, SamplerParams};
    use crate::channel::{frame_rng, transmit};
    use crate::codes::eqr_code;
    use crate::gf2::BinMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn golay_tg() -> TannerGraph {
        TannerGraph::from_matrix(&eqr_code(23).unwrap().h).unwrap()
    }

    #[test]
    fn damping_examples() {
        assert!((damping_schedule(0.08, 20, 0) - 0.08).abs() < 1e-15);
        assert!((damping_schedule(0.08, 20, 19) - 1.0).abs() < 1e-12);
        for t in 0..7 {
            assert_eq!(damping_schedule(1.0, 7, t), 1.0);
        }
        let ramp: Vec<f64> = (0..3).map(|t| damping_schedule(0.5, 3, t)).collect();
        assert_eq!(ramp, vec![0.5, 0.75, 1.0]);
        assert_eq!(damping_schedule(0.3, 1, 0), 0.3);
    }

    #[test]
    fn params_validation() {
        assert!(DecodeParams::default().validate().is_ok());
        let bad = DecodeParams { alpha0: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = DecodeParams { i2: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let u = DecodeParams::undamped(2, 1, 600).unwrap();
        assert_eq!((u.i1, u.i2, u.i3, u.alpha0, u.p), (1, 600, 1, 1.0, 2));
        assert_eq!(u.max_iterations(), 600);
        assert!(DecodeParams::undamped(1, 7, 600).is_err());
        assert_eq!("spa-pd".parse::<DecoderKind>().unwrap(), DecoderKind::SpaPd);
        assert!("bp".parse::<DecoderKind>().is_err());
    }

    #[test]
    fn init_messages_examples() {
        let h = BinMatrix::from_strs(&["101", "011"]).unwrap();
        let tg = TannerGraph::from_standard(h).unwrap();
        let mut st = DecoderState::for_graph(&tg);
        st.init_messages(&tg);
        assert!((0..2).all(|j| (0..3).all(|v| st.bit_to_check(j, v) == 0.0)));
        st.channel = vec![0.0, 0.0, 3.0];
        st.init_messages(&tg);
        assert_eq!(st.bit_to_check(0, 2), 3.0);
        assert_eq!(st.bit_to_check(1, 2), 3.0);
        assert_eq!(st.check_to_bit(0, 2), 0.0);
        assert!(st.messages_match(&tg));
    }

    #[test]
    fn two_bit_check_passes_llr_through() {
        let h = BinMatrix::from_strs(&["11"]).unwrap();
        let tg = TannerGraph::from_standard(h).unwrap();
        let mut st = DecoderState::for_graph(&tg);
        st.channel = vec![1.5, -0.7];
        st.init_messages(&tg);
        st.flood_iteration(&tg);
        assert!((st.check_to_bit(0, 0) - -0.7).abs() < 1e-12);
        assert!((st.check_to_bit(0, 1) - 1.5).abs() < 1e-12);
        assert_eq!(st.counters.spa_messages, 4);
        assert_eq!(st.counters.checkmsg_only, 2);
    }

    #[test]
    fn degree_one_check_emits_clamp() {
        let h = BinMatrix::from_strs(&["10", "01"]).unwrap();
        let tg = TannerGraph::from_standard(h).unwrap();
        let mut st = DecoderState::for_graph(&tg);
        st.channel = vec![-2.0, 0.5];
        st.init_messages(&tg);
        st.flood_iteration(&tg);
        assert!((st.check_to_bit(0, 0) - MSG_CLAMP).abs() < 1e-9);
    }

    #[test]
    fn noiseless_frame_decodes_in_one_iteration() {
        let tg = golay_tg();
        let y = vec![1.0; 24];
        let r = spa(&y, &tg, 600, 0.5);
        assert!(r.converged);
        assert_eq!(r.iterations_used, 1);
        assert_eq!(r.spa_messages, 2 * tg.n_edges() as u64);
        assert_eq!(r.codeword, Some(vec![0; 24]));
    }

    #[test]
    fn all_ones_word_is_recovered() {
        let tg = golay_tg();
        let y = vec![-1.0; 24];
        let r = spa(&y, &tg, 50, 0.6);
        assert!(r.converged);
        assert_eq!(r.codeword, Some(vec![1; 24]));
    }

    #[test]
    fn zero_iterations_fail_without_messages() {
        let tg = golay_tg();
        let r = spa(&[1.0; 24], &tg, 0, 0.5);
        assert!(!r.converged);
        assert_eq!(r.spa_messages, 0);
        assert_eq!(r.iterations_used, 0);
    }

    #[test]
    fn static_graph_message_count_without_stop() {
        let tg = golay_tg();
        let mut st = DecoderState::for_graph(&tg);
        let r = st.spa_with(&[1.0; 24], &tg, 13, 0.5, false);
        assert_eq!(r.spa_messages, 2 * 13 * tg.n_edges() as u64);
        assert!(r.converged);
    }

    #[test]
    fn spa_pd_with_identity_group_is_spa_with_reinit() {
        let tg = golay_tg();
        let id = GeneratorSet::new(24, vec![Permutation::identity(24)], GeneratorSource::Other)
            .unwrap();
        let params = DecodeParams { i1: 3, i2: 4, i3: 1, alpha0: 1.0, p: 0, syndrome_stop: true };
        let sigma = 0.9;
        for frame in 0..40 {
            let y = transmit(&[0; 24], sigma, &mut frame_rng(2, frame));
            let mut sampler = ProductReplacement::new(&id, SamplerParams::default(), 0);
            let pd = spa_pd(&y, &tg, &params, &mut sampler, sigma);
            // Reference: SPA restarted from its own APPs every I1 iterations.
            let mut st = DecoderState::for_graph(&tg);
            st.reset(&llr(&y, sigma));
            let mut reference = None;
            for _ in 0..params.i2 {
                st.init_messages(&tg);
                for _ in 0..params.i1 {
                    st.flood_iteration(&tg);
                }
                let w = st.hard_decision();
                if is_codeword(&tg, &w) {
                    reference = Some(w);
                    break;
                }
                st.channel = st.app.clone();
            }
            assert_eq!(pd.codeword, reference, "frame {frame}");
        }
    }

    #[test]
    fn spa_pd_noiseless_frame() {
        let code = eqr_code(23).unwrap();
        let tg = TannerGraph::from_matrix(&code.h).unwrap();
        let set = psl2_generators(23).unwrap();
        let mut sampler = ProductReplacement::new(&set, SamplerParams::default(), 5);
        let r = spa_pd(&[1.0; 24], &tg, &DecodeParams::default(), &mut sampler, 0.5);
        assert!(r.converged);
        assert_eq!(r.iterations_used, 1);
        assert_eq!(r.codeword, Some(vec![0; 24]));
    }

    #[test]
    fn spa_pd_output_is_in_original_coordinates() {
        let code = eqr_code(23).unwrap();
        let g = code.generator_matrix();
        let tg = TannerGraph::from_matrix(&code.h).unwrap();
        let set = psl2_generators(23).unwrap();
        let sigma = crate::channel::sigma_from_ebn0(2.5, 0.5);
        let mut decoded_nonzero = 0;
        for frame in 0..200u64 {
            let u: Vec<u8> = (0..12).map(|i| ((frame >> (i % 7)) & 1) as u8 ^ (i as u8 & 1)).collect();
            let c = crate::channel::encode(&g, &u);
            let y = transmit(&c, sigma, &mut frame_rng(8, frame));
            let mut sampler = ProductReplacement::new(&set, SamplerParams::default(), frame);
            let r = spa_pd(&y, &tg, &DecodeParams::default(), &mut sampler, sigma);
            if let Some(w) = r.codeword {
                assert!(code.h.annihilates(&pack_bits(&w)));
                if w == c {
                    decoded_nonzero += 1;
                }
            }
        }
        assert!(decoded_nonzero > 150);
    }

    #[test]
    fn spa_elc_with_zero_ops_is_spa_with_reinit() {
        let tg0 = golay_tg();
        let params = DecodeParams { i1: 2, i2: 5, i3: 3, alpha0: 0.5, p: 0, syndrome_stop: true };
        let sigma = 0.9;
        for frame in 0..30 {
            let y = transmit(&[0; 24], sigma, &mut frame_rng(4, frame));
            let mut tg = tg0.clone();
            let r = spa_elc(&y, &mut tg, &params, sigma, &mut ChaCha8Rng::seed_from_u64(frame));
            assert_eq!(tg, tg0);
            assert_eq!(r.elc_ops, 0);
            // With no ELC the inner loop is plain flooding; outer loops restart it.
            let mut st = DecoderState::for_graph(&tg0);
            let mut reference = None;
            let mut iters = 0;
            'outer: for _ in 0..params.i3 {
                st.channel = llr(&y, sigma);
                st.init_messages(&tg0);
                for _ in 0..params.i2 * params.i1 {
                    st.flood_iteration(&tg0);
                    iters += 1;
                    if iters % params.i1 == 0 && is_codeword(&tg0, &st.hard_decision()) {
                        reference = Some(st.hard_decision());
                        break 'outer;
                    }
                }
            }
            assert_eq!(r.codeword, reference);
            assert_eq!(r.iterations_used, iters);
        }
    }

    #[test]
    fn spa_elc_keeps_messages_on_incidences_and_code() {
        let code = eqr_code(23).unwrap();
        let tg0 = TannerGraph::from_matrix(&code.h).unwrap();
        let params = DecodeParams { i1: 1, i2: 40, i3: 2, alpha0: 0.3, p: 3, syndrome_stop: true };
        let sigma = crate::channel::sigma_from_ebn0(1.0, 0.5);
        let mut any_ops = false;
        for frame in 0..20 {
            let y = transmit(&[0; 24], sigma, &mut frame_rng(6, frame));
            let mut tg = tg0.clone();
            let mut st = DecoderState::for_graph(&tg);
            let r = st.spa_elc(&y, &mut tg, &params, sigma, &mut ChaCha8Rng::seed_from_u64(frame));
            assert!(st.messages_match(&tg));
            assert!(tg.is_consistent());
            assert!(tg.matrix().row_space_equal(&code.h));
            any_ops |= r.elc_ops > 0;
            if let Some(w) = &r.codeword {
                assert!(code.h.annihilates(&pack_bits(w)));
            }
        }
        assert!(any_ops);
    }

    #[test]
    fn created_incidences_are_the_complemented_block() {
        // The new incidences of a pivot on (u, v) are exactly the incidences
        // present afterwards between N(v)\{u} and N(u)\{v}.
        let tg0 = golay_tg();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut tg = tg0.clone();
        for _ in 0..200 {
            let idx = rng.random_range(0..tg.eligible_edge_count());
            let (u, v) = tg.nth_eligible_edge(idx).unwrap();
            let nv: Vec<usize> = tg.bit_nbrs(v).iter().copied().filter(|&c| c != u).collect();
            let nu: Vec<usize> = tg.check_nbrs(u).iter().copied().filter(|&b| b != v).collect();
            let rec = tg.elc_in_place(u, v).unwrap();
            let mut block: Vec<(usize, usize)> = nv
                .iter()
                .flat_map(|&c| nu.iter().map(move |&b| (c, b)))
                .filter(|&(c, b)| tg.has_edge(c, b))
                .collect();
            let mut created = rec.created.clone();
            block.sort_unstable();
            created.sort_unstable();
            assert_eq!(created, block);
        }
    }

    #[test]
    fn decoders_are_deterministic() {
        let code = eqr_code(23).unwrap();
        let tg0 = TannerGraph::from_matrix(&code.h).unwrap();
        let sigma = crate::channel::sigma_from_ebn0(1.5, 0.5);
        let params = DecodeParams { p: 2, ..Default::default() };
        for frame in 0..10 {
            let y = transmit(&[0; 24], sigma, &mut frame_rng(1, frame));
            let run = || {
                let mut tg = tg0.clone();
                spa_elc(&y, &mut tg, &params, sigma, &mut ChaCha8Rng::seed_from_u64(frame))
            };
            assert_eq!(run(), run());
        }
    }
}

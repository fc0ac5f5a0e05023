use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use elcdec::autgroup::{psl2_generators, ProductReplacement, SamplerParams};
use elcdec::channel::{frame_rng, sigma_from_ebn0, transmit};
use elcdec::codes::eqr_code;
use elcdec::decode::{DecodeParams, DecoderState};
use elcdec::TannerGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph(p: u64) -> TannerGraph {
    TannerGraph::from_matrix(&eqr_code(p).unwrap().h).unwrap()
}

fn flooding(c: &mut Criterion) {
    for p in [23u64, 47] {
        let tg = graph(p);
        let sigma = sigma_from_ebn0(2.0, 0.5);
        let y = transmit(&vec![0; tg.n_bits()], sigma, &mut frame_rng(1, 0));
        let mut st = DecoderState::for_graph(&tg);
        st.channel = elcdec::channel::llr(&y, sigma);
        st.init_messages(&tg);
        c.bench_function(&format!("flood_iteration EQR{}", p + 1), |b| {
            b.iter(|| st.flood_iteration(black_box(&tg)))
        });
    }
}

fn elc(c: &mut Criterion) {
    let mut tg = graph(47);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    c.bench_function("random elc EQR48", |b| {
        b.iter(|| {
            let idx = rng.random_range(0..tg.eligible_edge_count());
            let (j, v) = tg.nth_eligible_edge(idx).unwrap();
            black_box(tg.elc_in_place(j, v).unwrap());
        })
    });
}

fn decode_frames(c: &mut Criterion) {
    let tg = graph(23);
    let sigma = sigma_from_ebn0(3.0, 0.5);
    let params = DecodeParams { p: 1, ..DecodeParams::default() };
    let mut frame = 0u64;
    let mut st = DecoderState::for_graph(&tg);
    c.bench_function("spa_elc frame Golay 3dB", |b| {
        b.iter_batched(
            || {
                frame += 1;
                let mut rng = frame_rng(5, frame);
                (transmit(&[0; 24], sigma, &mut rng), rng, tg.clone())
            },
            |(y, mut rng, mut g)| black_box(st.spa_elc(&y, &mut g, &params, sigma, &mut rng)),
            BatchSize::SmallInput,
        )
    });
    let set = psl2_generators(23).unwrap();
    let base = ProductReplacement::new(&set, SamplerParams::default(), 1);
    let mut st = DecoderState::for_graph(&tg);
    c.bench_function("spa_pd frame Golay 3dB", |b| {
        b.iter_batched(
            || {
                frame += 1;
                (transmit(&[0; 24], sigma, &mut frame_rng(6, frame)), base.reseeded(frame))
            },
            |(y, mut sampler)| black_box(st.spa_pd(&y, &tg, &params, &mut sampler, sigma)),
            BatchSize::SmallInput,
        )
    });
}

fn structure(c: &mut Criterion) {
    let golay = eqr_code(23).unwrap();
    let g = golay.generator_matrix();
    c.bench_function("min_distance Golay", |b| b.iter(|| g.min_distance().unwrap()));
    let tg = graph(23);
    c.bench_function("canonical_form Golay", |b| b.iter(|| black_box(&tg).canonical_form()));
}

criterion_group!(benches, flooding, elc, decode_frames, structure);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use semcom_core::bleu::{bleu, BleuConfig};
use semcom_core::corpus::{generate_synthetic_corpus, TemplateSet};
use semcom_core::extract::{compute_mask, extract_keywords};
use semcom_core::kb::build_base_kb;
use semcom_core::lm::{generate_candidates, train_lm};
use semcom_core::phy::{build_codebook, decode, encode, transmit};
use semcom_core::{ChannelConfig, GeneratorParams, NormalizationPolicy, SlotTemplate};

fn benches(c: &mut Criterion) {
    let corpus = generate_synthetic_corpus(7, 1000, "football").unwrap();
    let set = TemplateSet::load("football").unwrap();
    let kb = build_base_kb(&set.keywords, &NormalizationPolicy::default()).unwrap();
    let lm = train_lm(&corpus, 3).unwrap();
    let s = &corpus.sentences()[0];
    let r = &corpus.sentences()[1];

    c.bench_function("bleu_cumulative_4", |b| {
        let cfg = BleuConfig::default();
        b.iter(|| bleu(black_box(s), black_box(r), &cfg).score)
    });

    let mask = compute_mask(s, &kb);
    let keywords = extract_keywords(s, &mask).unwrap();
    let template = SlotTemplate::from_keywords(s.len(), &keywords).unwrap();
    c.bench_function("generate_candidates_m4_beam8", |b| {
        let params = GeneratorParams::default();
        b.iter(|| generate_candidates(black_box(&template), &lm, &params).unwrap())
    });

    let cb = build_codebook(&kb).unwrap();
    let ch = ChannelConfig::default();
    c.bench_function("encode_transmit_decode", |b| {
        b.iter(|| {
            let frame = encode(&mask, &keywords, &cb).unwrap();
            decode(&transmit(&frame, &ch).unwrap(), &cb, &ch).unwrap()
        })
    });

    c.bench_function("train_lm_1000", |b| {
        b.iter(|| train_lm(black_box(&corpus), 3).unwrap())
    });
}

criterion_group!(pipeline, benches);
criterion_main!(pipeline);

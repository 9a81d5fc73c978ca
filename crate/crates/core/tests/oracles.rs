//! Library results against brute-force references.

mod common;

use std::sync::Arc;

use common::*;
use grand_isi::channel::{ebn0_to_sigma2, transmit};
use grand_isi::decoder::{
    build_cdf_model, fit_grid, fit_two_line, genie_ml_error_event, DecoderConfig, GammaProvider, GrandIsiDecoder,
    Outcome,
};
use grand_isi::detector::{viterbi_hard, weight_lambda};
use grand_isi::reliability::{enumerate_bursts, pair_coupling_delta, rel_direct, rel_table_general, right_window};
use grand_isi::{ChannelModel, CodeSpec, RealBlock};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INSTANCES: usize = 500;
const TOL: f64 = 1e-9;

struct Instance {
    model: ChannelModel,
    y: RealBlock,
    x: Vec<u8>,
}

fn instance(rng: &mut ChaCha8Rng, l: usize) -> Instance {
    let n = rng.gen_range(l + 4..=16);
    let model = random_model(rng, l);
    let sent = random_bits(rng, n);
    let y = transmit(&sent, &model, rng);
    let x = viterbi_hard(&y, &model).hard_sequence.into_inner();
    Instance { model, y, x }
}

impl Instance {
    fn rel(&self, set: &[usize]) -> f64 {
        let x = grand_isi::BitBlock::from_bits(self.x.clone()).unwrap();
        rel_direct(set, &x, &self.y, &self.model).unwrap()
    }

    fn oracle(&self, set: &[usize]) -> f64 {
        rel_oracle(&self.x, set, self.y.as_slice(), self.model.taps(), self.model.noise_var())
    }
}

/// Random contiguous run inside `lo..hi`.
fn run(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Vec<usize> {
    let a = rng.gen_range(lo..hi);
    let b = rng.gen_range(a..hi);
    (a..=b).collect()
}

#[test]
fn windowed_reliability_equals_full_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..INSTANCES {
        let l = rng.gen_range(0..=3);
        let inst = instance(&mut rng, l);
        let n = inst.x.len();
        let set: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
        if set.is_empty() {
            continue;
        }
        assert!((inst.rel(&set) - inst.oracle(&set)).abs() < TOL);
    }
}

#[test]
fn separated_sets_add_first_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..INSTANCES {
        let inst = instance(&mut rng, 1);
        let n = inst.x.len();
        let cut = rng.gen_range(1..n - 2);
        let w1 = run(&mut rng, 0, cut);
        let w2 = run(&mut rng, w1[w1.len() - 1] + 2, n);
        let w: Vec<usize> = w1.iter().chain(&w2).copied().collect();
        assert!((inst.rel(&w) - inst.rel(&w1) - inst.rel(&w2)).abs() < TOL);
        assert!((inst.oracle(&w) - inst.oracle(&w1) - inst.oracle(&w2)).abs() < TOL);
    }
}

#[test]
fn contiguous_runs_split_into_pair_couplings() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..INSTANCES {
        let inst = instance(&mut rng, 1);
        let n = inst.x.len();
        let w = run(&mut rng, 0, n);
        let singles: f64 = w.iter().map(|&i| inst.oracle(&[i])).sum();
        let pairs: f64 = w
            .windows(2)
            .map(|p| inst.oracle(p) - inst.oracle(&[p[0]]) - inst.oracle(&[p[1]]))
            .sum();
        assert!((inst.rel(&w) - singles - pairs).abs() < TOL);
    }
}

#[test]
fn pair_coupling_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..INSTANCES {
        let inst = instance(&mut rng, 1);
        let i = rng.gen_range(0..inst.x.len() - 1);
        let direct = inst.oracle(&[i, i + 1]) - inst.oracle(&[i]) - inst.oracle(&[i + 1]);
        let x = grand_isi::BitBlock::from_bits(inst.x.clone()).unwrap();
        let closed = pair_coupling_delta(&x, i, &inst.model).unwrap();
        assert!((direct - closed).abs() < TOL, "{direct} vs {closed}");
        let h = inst.model.taps();
        assert!((closed.abs() - (4.0 * h[0] * h[1] / inst.model.noise_var()).abs()).abs() < TOL);
    }
}

#[test]
fn separated_sets_add_any_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..INSTANCES {
        let l = rng.gen_range(1..=2);
        let inst = instance(&mut rng, l);
        let n = inst.x.len();
        let cut = rng.gen_range(1..n - l - 1);
        let w1 = run(&mut rng, 0, cut);
        let start = w1[w1.len() - 1] + l + 1;
        let w2: Vec<usize> = (start..n).filter(|_| rng.gen_bool(0.5)).collect();
        let w2 = if w2.is_empty() { vec![start] } else { w2 };
        let w: Vec<usize> = w1.iter().chain(&w2).copied().collect();
        assert!((inst.rel(&w) - inst.rel(&w1) - inst.rel(&w2)).abs() < TOL);
    }
}

#[test]
fn partially_separated_sets_have_window_correction() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..INSTANCES {
        let inst = instance(&mut rng, 2);
        let (n, l) = (inst.x.len(), 2);
        let w1 = run(&mut rng, 0, n - 3);
        let start = w1[w1.len() - 1] + 2;
        let end = rng.gen_range(start..n);
        let w2: Vec<usize> = (start..=end).collect();
        let w: Vec<usize> = w1.iter().chain(&w2).copied().collect();

        let (taps, var, y) = (inst.model.taps(), inst.model.noise_var(), inst.y.as_slice());
        let base = position_loglik(&inst.x, y, taps, var);
        let f1 = position_loglik(&flipped(&inst.x, &w1), y, taps, var);
        let f2 = position_loglik(&flipped(&inst.x, &w2), y, taps, var);
        let fw = position_loglik(&flipped(&inst.x, &w), y, taps, var);
        let hi = right_window(&w1, l, n);
        let correction: f64 = (w2[0]..=hi).map(|i| (f1[i] - base[i]) + (f2[i] - fw[i])).sum();
        let got = inst.rel(&w);
        assert!((got - inst.rel(&w1) - inst.rel(&w2) - correction).abs() < TOL);
    }
}

#[test]
fn trellis_detection_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let l = rng.gen_range(0..=3);
        let model = random_model(&mut rng, l);
        let y = transmit(&random_bits(&mut rng, n), &model, &mut rng);
        let (best, value) = exhaustive_detection(y.as_slice(), model.taps(), model.noise_var());
        let det = viterbi_hard(&y, &model);
        assert_eq!(det.hard_sequence.as_slice(), best.as_slice());
        assert!((det.weight - value).abs() < TOL);
        assert_eq!(det.branch_metrics, n * (1 << l) * 2);
    }
}

#[test]
fn exact_reliability_ordering_is_maximum_likelihood() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..1000 {
        let n = rng.gen_range(6..=16);
        let k = rng.gen_range(3..=8.min(n - 1));
        let l = 1 + trial % 2;
        let code = Arc::new(random_code(&mut rng, n, k));
        let taps = random_taps(&mut rng, l);
        let snr_db = rng.gen_range(0.0..8.0);
        let model = ChannelModel::new(taps, ebn0_to_sigma2(snr_db, code.rate()).unwrap()).unwrap();
        let words = all_codewords(&code);
        let sent = &words[rng.gen_range(0..words.len())];
        let y = transmit(sent, &model, &mut rng);
        let dec = GrandIsiDecoder::new(code.clone(), model.clone(), GammaProvider::SGrand, DecoderConfig::unbounded(n))
            .unwrap();
        let r = dec.decode(&y).unwrap();
        let Outcome::Decoded(c) = &r.outcome else { panic!("unbounded search abandoned") };
        assert!(code.is_codeword(c).unwrap());
        let (_, best) = ml_best(&words, &y, &model);
        let got = loglik(c.as_slice(), y.as_slice(), model.taps(), model.noise_var());
        assert!((got - best).abs() < TOL, "trial {trial}: {got} vs {best}");
        assert!(r.valid_queries <= r.candidate_queries);
    }
}

#[test]
fn genie_event_matches_exhaustive_ml_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut events = 0;
    for _ in 0..400 {
        let n = rng.gen_range(8..=14);
        let k = rng.gen_range(3..=7);
        let code = Arc::new(random_code(&mut rng, n, k));
        let model = ChannelModel::new(random_taps(&mut rng, 1), ebn0_to_sigma2(1.0, code.rate()).unwrap()).unwrap();
        let words = all_codewords(&code);
        let sent = &words[rng.gen_range(0..words.len())];
        let y = transmit(sent, &model, &mut rng);
        let r = GrandIsiDecoder::new(code.clone(), model.clone(), GammaProvider::SGrand, DecoderConfig::unbounded(n))
            .unwrap()
            .decode(&y)
            .unwrap();
        let (ml, _) = ml_best(&words, &y, &model);
        let event = genie_ml_error_event(&r, sent, &y, &model).unwrap();
        assert_eq!(event, ml != *sent);
        events += usize::from(event);
    }
    assert!(events > 0, "the low SNR should produce some ML errors");
}

#[test]
fn decoded_weight_is_library_weight() {
    // The oracle log-likelihood agrees with the library's Lambda.
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..100 {
        let l = rng.gen_range(0..=3);
        let inst = instance(&mut rng, l);
        let x = grand_isi::BitBlock::from_bits(inst.x.clone()).unwrap();
        let a = weight_lambda(&x, &inst.y, &inst.model).unwrap();
        let b = loglik(&inst.x, inst.y.as_slice(), inst.model.taps(), inst.model.noise_var());
        assert!((a - b).abs() < TOL);
    }
}

#[test]
fn general_table_matches_oracle_on_every_burst() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..50 {
        let l = rng.gen_range(1..=3);
        let inst = instance(&mut rng, l);
        let n = inst.x.len();
        let dict = enumerate_bursts(n, l, 4);
        let x = grand_isi::BitBlock::from_bits(inst.x.clone()).unwrap();
        let table = rel_table_general(&x, &inst.y, &inst.model, &dict).unwrap();
        for (b, v) in dict.bursts().iter().zip(table.values()) {
            assert!((v - inst.oracle(b.indices())).abs() < TOL);
        }
    }
}

fn bch_cdf(sigma2: f64, seed: u64) -> grand_isi::decoder::CdfModel {
    let code = CodeSpec::build_bch(5, 1).unwrap();
    let model = ChannelModel::new(vec![0.9f64.sqrt(), 0.1f64.sqrt()], sigma2).unwrap();
    build_cdf_model(&code, &model, 0, 1000, seed).unwrap()
}

#[test]
fn cdf_model_bookkeeping_and_monotone_quantiles() {
    let cdf = bch_cdf(0.5, 1);
    assert_eq!(cdf.len(), 1000 * enumerate_bursts(31, 1, 0).len());
    let qs: Vec<f64> = (1..100).map(|i| cdf.quantile(i as f64 / 100.0)).collect();
    assert!(qs.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(bch_cdf(0.5, 1), cdf);
}

#[test]
fn reliability_mass_moves_up_with_snr() {
    let low = bch_cdf(ebn0_to_sigma2(2.0, 26.0 / 31.0).unwrap(), 2);
    let high = bch_cdf(ebn0_to_sigma2(6.0, 26.0 / 31.0).unwrap(), 3);
    for i in 1..20 {
        let p = i as f64 / 20.0;
        assert!(high.quantile(p) > low.quantile(p), "p = {p}");
    }
}

#[test]
fn two_line_fit_properties() {
    let cdf = bch_cdf(0.5, 4);
    let fit = fit_two_line(&cdf).unwrap();
    let grid = fit_grid(&cdf);
    // Best single line by the normal equations.
    let m = grid.len() as f64;
    let (sp, sv) = grid.iter().fold((0.0, 0.0), |a, &(p, v)| (a.0 + p, a.1 + v));
    let (mp, mv) = (sp / m, sv / m);
    let cov: f64 = grid.iter().map(|&(p, v)| (p - mp) * (v - mv)).sum();
    let var: f64 = grid.iter().map(|&(p, _)| (p - mp).powi(2)).sum();
    let slope = cov / var;
    let line_mse: f64 = grid.iter().map(|&(p, v)| (v - (mv + slope * (p - mp))).powi(2)).sum::<f64>() / m;
    assert!(fit.residual <= line_mse + 1e-12);
    assert!(fit.breakpoint > 0.1 && fit.breakpoint < 0.9, "{fit:?}");
    let direct: f64 = grid.iter().map(|&(p, v)| (v - fit.eval(p)).powi(2)).sum::<f64>() / m;
    assert!((direct - fit.residual).abs() < 1e-9 * direct.max(1.0));
}

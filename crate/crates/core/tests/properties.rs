use m2m_core::datasets::{long_tail_counts, LabeledDataset};
use m2m_core::m2m::{reject_probability, seed_class_distribution, translate, M2mConfig};
use m2m_core::math::{log_softmax, softmax};
use m2m_core::netcore::{Activation, Layer, Matrix, Net, ObjectiveTerm};
use m2m_core::rebalance::{cbrw_weights, rw_weights, smote_sample};
use m2m_core::rng;
use proptest::prelude::*;

fn counts_strategy(max_k: usize, max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=max_n, 2..=max_k).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    })
}

fn random_net(seed: u64, input: usize, hidden: &[usize], classes: usize) -> Net {
    Net::dense(input, hidden, classes, &mut rng::stream(seed, &[99]))
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    d / na.max(nb).max(1e-8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn softmax_is_a_distribution(logits in prop::collection::vec(-500.0f64..500.0, 1..20)) {
        let p = softmax(&logits);
        prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let lp = log_softmax(&logits);
        for (a, b) in p.iter().zip(&lp) {
            prop_assert!((a - b.exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn input_gradient_matches_differences(
        seed in any::<u64>(),
        input in 1usize..=16,
        hidden in prop::collection::vec(1usize..=16, 0..=2),
        classes in 2usize..=6,
        lambda in 0.0f64..1.0,
    ) {
        let net = random_net(seed, input, &hidden, classes);
        let mut r = rng::stream(seed, &[1]);
        let x: Vec<f64> = (0..input).map(|_| rand::Rng::random_range(&mut r, -1.0..1.0)).collect();
        let terms = [
            ObjectiveTerm::CrossEntropy { target: 0, weight: 1.0 },
            ObjectiveTerm::Logit { class: classes - 1, weight: lambda },
        ];
        let (_, g) = net.input_gradient(&x, &terms).unwrap();
        let h = 1e-6;
        let numeric: Vec<f64> = (0..input).map(|j| {
            let mut a = x.clone();
            let mut b = x.clone();
            a[j] += h;
            b[j] -= h;
            (net.input_gradient(&a, &terms).unwrap().0 - net.input_gradient(&b, &terms).unwrap().0) / (2.0 * h)
        }).collect();
        // A relu kink inside [x - h, x + h] breaks the comparison; with
        // random inputs this is rare, and then the error is large.
        let err = rel_err(&g, &numeric);
        prop_assume!(err < 1e-2);
        prop_assert!(err < 1e-4, "relative error {err}");
    }

    #[test]
    fn weights_are_positive_with_unit_mean(counts in counts_strategy(12, 10_000), beta in 0.0f64..0.99999) {
        for w in [rw_weights(&counts), cbrw_weights(&counts, beta)] {
            prop_assert!(w.iter().all(|&v| v > 0.0));
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            prop_assert!((mean - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cbrw_approaches_rw_as_beta_nears_one(counts in counts_strategy(10, 10_000)) {
        let cb = cbrw_weights(&counts, 1.0 - 1e-9);
        let rw = rw_weights(&counts);
        for (a, b) in cb.iter().zip(&rw) {
            prop_assert!((a - b).abs() / b < 1e-3);
        }
    }

    #[test]
    fn reject_probability_decreases_with_gap(n in 1usize..10_000, gap in 0usize..5_000, beta in 0.0f64..1.0) {
        let p = reject_probability(n + gap, n, beta);
        let q = reject_probability(n + gap + 1, n, beta);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(q <= p);
        prop_assert_eq!(reject_probability(n, n + gap, beta), 1.0);
    }

    #[test]
    fn seed_distribution_beats_perturbations(
        counts in counts_strategy(6, 5000),
        beta in prop::sample::select(vec![0.9, 0.99, 0.999]),
        noise in prop::collection::vec(0.0f64..1.0, 6),
    ) {
        let target = counts.len() - 1;
        let Some(q) = seed_class_distribution(&counts, target, beta) else {
            return Ok(());
        };
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let la: Vec<f64> = counts.iter().map(|&n| {
            let gap = n.saturating_sub(counts[target]);
            if gap == 0 { f64::NEG_INFINITY } else { (1.0 - beta.powi(gap as i32)).ln() }
        }).collect();
        let objective = |q: &[f64]| -> f64 {
            q.iter().zip(&la).filter(|(&p, _)| p > 0.0).map(|(&p, &l)| p * l - p * p.ln()).sum()
        };
        for (c, &p) in q.iter().enumerate() {
            if la[c] == f64::NEG_INFINITY {
                prop_assert_eq!(p, 0.0);
            }
        }
        let mut other: Vec<f64> = q.iter().zip(&noise).zip(&la)
            .map(|((&p, &e), &l)| if l.is_finite() { p + e } else { 0.0 })
            .collect();
        let s: f64 = other.iter().sum();
        other.iter_mut().for_each(|v| *v /= s);
        prop_assert!(objective(&q) >= objective(&other) - 1e-12);
    }

    #[test]
    fn long_tail_counts_hit_the_ratio(n in 100usize..6000, k in 2usize..=12, ratio in 1.5f64..50.0) {
        let Ok(c) = long_tail_counts(n, k, ratio) else {
            return Ok(());
        };
        prop_assert_eq!(c[0], n);
        prop_assert!(c.windows(2).all(|w| w[0] >= w[1]));
        // round-half-up moves the tail by at most half a sample
        let tail = n as f64 / ratio;
        prop_assert!((c[k - 1] as f64 - tail).abs() <= 0.5 + 1e-9);
    }

    #[test]
    fn translation_respects_the_step_budget(
        seed in any::<u64>(),
        steps in 1usize..=12,
        eta in 0.01f64..1.0,
        lambda in 0.0f64..1.0,
    ) {
        let g = random_net(seed, 5, &[8], 4);
        let f = random_net(seed ^ 1, 5, &[8], 4);
        let cfg = M2mConfig { steps, step_size: eta, lambda, ..M2mConfig::default() };
        let x0 = [0.3, -0.2, 0.1, 0.0, 1.0];
        let t = translate(&[g], &f, &x0, 0, 3, &cfg, &mut rng::stream(seed, &[2])).unwrap();
        let moved: f64 = t.x.iter().zip(&t.start).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(moved <= steps as f64 * eta * (1.0 + 1e-12));
        prop_assert!(t.start.iter().zip(&x0).all(|(s, x)| (s - x).abs() <= cfg.init_noise));
    }

    #[test]
    fn linear_guide_loss_never_increases(seed in any::<u64>(), eta in 0.001f64..=0.1) {
        let mut r = rng::stream(seed, &[3]);
        let layer = Layer::random(4, 3, Activation::Identity, &mut r);
        let g = Net::new(vec![layer]).unwrap();
        let cfg = M2mConfig { lambda: 0.0, step_size: eta, init_noise: 0.0, ..M2mConfig::default() };
        let mut x = vec![0.5, -1.0, 0.25, 2.0];
        let mut prev = m2m_core::m2m::generation_loss(std::slice::from_ref(&g), &x, 2).unwrap();
        for _ in 0..10 {
            let one = M2mConfig { steps: 1, ..cfg.clone() };
            let t = translate(std::slice::from_ref(&g), &g, &x, 0, 2, &one, &mut r).unwrap();
            prop_assert!(t.loss <= prev + 1e-8, "{} > {}", t.loss, prev);
            prev = t.loss;
            x = t.x;
        }
    }

    #[test]
    fn smote_stays_in_the_class_box(seed in any::<u64>(), n in 2usize..30, neighbors in 1usize..8) {
        let mut r = rng::stream(seed, &[4]);
        let values: Vec<f64> = (0..(n + 3) * 3).map(|_| rand::Rng::random_range(&mut r, -5.0..5.0)).collect();
        let inputs = Matrix::from_vec(n + 3, 3, values).unwrap();
        let mut labels = vec![0; n];
        labels.extend([1, 1, 1]);
        let ds = LabeledDataset::new(inputs, labels, 2).unwrap();
        let class = if n >= 3 { 0 } else { 1 };
        let members: Vec<&[f64]> = (0..ds.len()).filter(|&i| ds.labels()[i] == class).map(|i| ds.inputs().row(i)).collect();
        for _ in 0..10 {
            let s = smote_sample(&ds, class, neighbors, &mut r).unwrap();
            for j in 0..3 {
                let lo = members.iter().map(|m| m[j]).fold(f64::INFINITY, f64::min);
                let hi = members.iter().map(|m| m[j]).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(s.x[j] >= lo - 1e-12 && s.x[j] <= hi + 1e-12);
            }
        }
    }
}

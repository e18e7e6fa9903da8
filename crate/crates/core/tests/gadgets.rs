use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solnet::gadgets::{
    append_product, box_indicator_node, dc_difference_net, maxaffine_to_lp, multi_bump_node, polyhedral_indicator_node,
    product_subnet, MaxAffineFunction, MaxAffinePair,
};
use solnet::lp::Tolerances;
use solnet::net::{NetworkBuilder, Source};

fn planes(rng: &mut ChaCha8Rng, nx: usize, k: usize) -> MaxAffineFunction<f64> {
    MaxAffineFunction::new((0..k).map(|_| ((0..nx).map(|_| rng.gen_range(-3.0..3.0)).collect(), rng.gen_range(-1.0..1.0))).collect()).unwrap()
}

#[test]
fn product_matches_multiplication_on_ten_thousand_pairs() {
    let net = product_subnet(0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let x1 = 1.0 - rng.gen::<f64>();
        let x2 = 1.0 - rng.gen::<f64>();
        worst = worst.max((net.evaluate(&[x1, x2]).unwrap()[0] - x1 * x2).abs());
    }
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn translated_product_handles_signs() {
    let net = product_subnet(0.5, -0.25);
    for (x1, x2) in [(-1.0, 2.0), (0.2, -3.0), (4.0, 0.0)] {
        let want: f64 = (x1 - 0.5) * (x2 + 0.25);
        assert!((net.evaluate(&[x1, x2]).unwrap()[0] - want).abs() <= 1e-12);
    }
}

#[test]
fn polyhedral_indicator_matches_membership() {
    let hs = vec![(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0), (vec![1.0, 1.0], 1.0)];
    let node = polyhedral_indicator_node(&hs).unwrap();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let x = [rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5)];
        let inside = hs.iter().all(|(a, b)| a[0] * x[0] + a[1] * x[1] <= *b);
        assert_eq!(node.evaluate(&x, &tol).unwrap()[0], if inside { 1.0 } else { 0.0 });
    }
}

#[test]
fn maxaffine_node_matches_direct_max() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = planes(&mut rng, 2, 8);
    let node = maxaffine_to_lp(&h);
    assert_eq!((node.program.n_z, node.program.m1()), (1, 8));
    let tol = Tolerances::default();
    for _ in 0..1000 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let direct = h.planes.iter().map(|(p, q)| p[0] * x[0] + p[1] * x[1] + q).fold(f64::NEG_INFINITY, f64::max);
        assert!((node.evaluate(&x, &tol).unwrap()[0] - direct).abs() <= 1e-10);
    }
}

#[test]
fn dc_difference_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let pair = MaxAffinePair::new(planes(&mut rng, 3, 5), planes(&mut rng, 3, 5)).unwrap();
        let net = dc_difference_net(&pair);
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let direct = pair.h1.planes.iter().map(|(p, q)| solnet::linalg::dot(p, &x) + q).fold(f64::NEG_INFINITY, f64::max)
                - pair.h2.planes.iter().map(|(p, q)| solnet::linalg::dot(p, &x) + q).fold(f64::NEG_INFINITY, f64::max);
            assert!((net.evaluate(&x).unwrap()[0] - direct).abs() <= 1e-9);
        }
    }
}

#[test]
fn identical_halves_cancel() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = planes(&mut rng, 2, 6);
    let net = dc_difference_net(&MaxAffinePair::new(h.clone(), h).unwrap());
    for _ in 0..1000 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        assert_eq!(net.evaluate(&x).unwrap()[0], 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn triple_product_is_associative(x1 in 1e-3f64..=1.0, x2 in 1e-3f64..=1.0, x3 in 1e-3f64..=1.0) {
        let mut b = NetworkBuilder::new(3, 1);
        let p12 = append_product(&mut b, (Source::Input, 0), 0.0, (Source::Input, 1), 0.0).unwrap();
        let p123 = append_product(&mut b, (Source::Node(p12), 0), 0.0, (Source::Input, 2), 0.0).unwrap();
        b.readout_component(Source::Node(p123), 0, 0, 1.0).unwrap();
        let net = b.build().unwrap();
        prop_assert!((net.evaluate(&[x1, x2, x3]).unwrap()[0] - x1 * x2 * x3).abs() <= 1e-8);
    }

    #[test]
    fn indicator_outputs_are_binary(m0 in 0usize..4, m1 in 0usize..4, x0 in -0.2f64..1.2, x1 in -0.2f64..1.2) {
        let node = box_indicator_node(&[m0, m1], 4).unwrap();
        let v = node.evaluate(&[x0, x1], &Tolerances::default()).unwrap()[0];
        let inside = [(m0, x0), (m1, x1)].iter().all(|&(m, x)| (x - (2.0 * m as f64 + 1.0) / 8.0).abs() <= 0.125);
        prop_assert_eq!(v, if inside { 1.0 } else { 0.0 });
    }

    #[test]
    fn multi_bump_is_union_membership(x in -1.0f64..5.0, a in 0.0f64..1.0, w in 0.0f64..1.0, gap in 0.1f64..1.0) {
        let iv = [(a, a + w), (a + w + gap, a + w + gap + w)];
        let node = multi_bump_node(&iv).unwrap();
        let v = node.evaluate(&[x], &Tolerances::default()).unwrap()[0];
        let inside = iv.iter().any(|&(lo, hi)| lo <= x && x <= hi);
        let want = if inside { 1.0 } else { 0.0 };
        prop_assert!((v - want).abs() <= 1e-12);
    }
}

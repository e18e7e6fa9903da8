use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solnet::gadgets::{bump_node, product_subnet};
use solnet::net::{network_from_json, network_to_json, parallel, series, NetError, NetworkBuilder, SolutionNetwork, Source};

fn bump_net() -> SolutionNetwork<f64> {
    let mut b = NetworkBuilder::new(1, 1);
    let n = b.add_node(bump_node());
    b.connect_all(Source::Input, n, 0).unwrap();
    b.readout_component(Source::Node(n), 0, 0, 2.0).unwrap();
    b.readout_offset(vec![0.5]).unwrap();
    b.build().unwrap()
}

#[test]
fn parallel_stacks_outputs() {
    let (p, q) = (product_subnet::<f64>(0.0, 0.0), product_subnet::<f64>(-1.0, 2.0));
    let both = parallel(&[&p, &q]).unwrap();
    assert_eq!((both.n_inputs(), both.out_dim()), (2, 2));
    assert_eq!(both.widths().nodes, p.widths().nodes + q.widths().nodes);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let x = [rng.gen_range(0.1..1.0), rng.gen_range(-1.0..1.0)];
        let v = both.evaluate(&x).unwrap();
        assert_eq!(v, vec![p.evaluate(&x).unwrap()[0], q.evaluate(&x).unwrap()[0]]);
    }
}

#[test]
fn series_feeds_readout_forward() {
    let p = product_subnet::<f64>(0.0, 0.0);
    let chain = series(&p, &bump_net()).unwrap();
    assert_eq!(chain.widths().depth, p.widths().depth + 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let x: [f64; 2] = [rng.gen_range(0.05..2.0), rng.gen_range(-2.0..2.0)];
        let prod = x[0] * x[1];
        if (prod.abs() - 1.0).abs() < 1e-6 {
            continue;
        }
        let want = 0.5 + if prod.abs() <= 1.0 { 2.0 } else { 0.0 };
        assert!((chain.evaluate(&x).unwrap()[0] - want).abs() <= 1e-9, "{x:?}");
    }
    let text = network_to_json(&chain);
    assert_eq!(network_from_json::<f64>(&text).unwrap().evaluate(&[0.5, 0.5]).unwrap(), chain.evaluate(&[0.5, 0.5]).unwrap());
}

#[test]
fn composition_checks_dimensions() {
    let p = product_subnet::<f64>(0.0, 0.0);
    assert!(matches!(series(&p, &p), Err(NetError::InvalidEdge(_))));
    assert!(matches!(parallel(&[&p, &bump_net()]), Err(NetError::InvalidEdge(_))));
    assert!(parallel::<f64>(&[]).is_err());
}

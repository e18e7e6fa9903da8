use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solnet::recon::{
    bundled_texture, drop_constraints, fit_image_pwa, mean_drop_mse, recon_testfn, reconstruct, synthetic_texture, sweep_csv, Benchmark,
    Image, ReconError, TriangularPwa, SWEEP_HEADER, TEXTURE_SEED,
};
use solnet::target::{JetTarget, Target};
use solnet::recon::recon_point;

fn ramp(w: usize, h: usize) -> Image {
    let mut img = Image::new(w, h, 3);
    for r in 0..h {
        for c in 0..w {
            img.set(r, c, 0, 0.1 + 0.02 * c as f64 + 0.03 * r as f64);
            img.set(r, c, 1, 0.9 - 0.05 * r as f64);
            img.set(r, c, 2, 0.4);
        }
    }
    img
}

#[test]
fn bundled_texture_matches_generator() {
    let img = bundled_texture();
    assert_eq!((img.width, img.height, img.channels), (32, 32, 3));
    assert_eq!(img, synthetic_texture(32, TEXTURE_SEED));
    let mean = img.mean();
    let var: f64 = img.data.iter().enumerate().map(|(i, v)| (v - mean[i % 3]).powi(2)).sum::<f64>() / img.data.len() as f64;
    assert!(var > 0.005, "texture is nearly flat: {var}");
}

#[test]
fn pnm_round_trip() {
    let img = bundled_texture();
    assert_eq!(Image::decode(&img.encode().unwrap()).unwrap(), img);
    let mut gray = Image::new(3, 2, 1);
    gray.data = vec![0.0, 1.0, 128.0 / 255.0, 3.0 / 255.0, 1.0, 0.0];
    let bytes = gray.encode().unwrap();
    assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
    assert_eq!(Image::decode(&bytes).unwrap(), gray);
    let commented = b"P5 # comment\n# another\n2 1\n# x\n255\n\x00\xff";
    assert_eq!(Image::decode(commented).unwrap().data, vec![0.0, 1.0]);
    assert!(matches!(Image::decode(b"P2\n1 1\n255\n0"), Err(ReconError::UnsupportedFormat(_))));
    assert!(matches!(Image::decode(b"P5\n1 1\n65535\n\x00\x00"), Err(ReconError::UnsupportedFormat(_))));
    assert!(matches!(Image::decode(b"P5\n4 4\n255\n\x00"), Err(ReconError::UnsupportedFormat(_))));
}

#[test]
fn fit_rejects_bad_images() {
    assert!(matches!(TriangularPwa::fit(&Image::new(1, 5, 1)), Err(ReconError::UnsupportedFormat(_))));
    assert!(matches!(TriangularPwa::fit(&Image::new(3, 3, 2)), Err(ReconError::UnsupportedFormat(_))));
}

#[test]
fn constant_and_ramp_images_are_exact() {
    let mut c = Image::new(2, 2, 1);
    c.data = vec![0.7; 4];
    let fit = fit_image_pwa(&c).unwrap();
    assert_eq!(reconstruct(&fit.network, &c, &fit.mean).unwrap().raw_mse, 0.0);
    c.data = vec![178.0 / 255.0; 4];
    let fit = fit_image_pwa(&c).unwrap();
    assert_eq!(reconstruct(&fit.network, &c, &fit.mean).unwrap().mse, 0.0);
    let r = ramp(2, 2);
    let fit = fit_image_pwa(&r).unwrap();
    assert!(reconstruct(&fit.network, &r, &fit.mean).unwrap().raw_mse <= 1e-30);
    // an affine image is reproduced everywhere, not just at the corners
    let r = ramp(5, 4);
    let pwa = TriangularPwa::fit(&r).unwrap();
    let net = pwa.network(None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let (x, y): (f64, f64) = (rng.gen_range(0.0..4.0), rng.gen_range(0.0..3.0));
        let v = net.evaluate(&[x, y]).unwrap();
        let want = [0.1 + 0.02 * x + 0.03 * y, 0.9 - 0.05 * y, 0.4];
        for k in 0..3 {
            assert!((v[k] / v[3] - want[k]).abs() <= 1e-12);
        }
    }
}

#[test]
fn triangles_partition_each_square() {
    let pwa = TriangularPwa::fit(&bundled_texture()).unwrap();
    assert_eq!(pwa.triangles.len(), 2 * 31 * 31);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..2000 {
        let (x, y): (f64, f64) = (rng.gen_range(0.0..31.0), rng.gen_range(0.0..31.0));
        let hits = pwa.triangles.iter().filter(|t| t.contains(x, y)).count();
        assert_eq!(hits, 1, "({x}, {y})");
    }
}

#[test]
fn network_matches_direct_interpolation() {
    let img = bundled_texture();
    let fit = fit_image_pwa(&img).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let (x, y): (f64, f64) = (rng.gen_range(0.0..31.0), rng.gen_range(0.0..31.0));
        let v = fit.network.evaluate(&[x, y]).unwrap();
        let direct = fit.pwa.eval(x, y).unwrap();
        // bilinear-free oracle: barycentric interpolation in the containing triangle
        let (j, i) = (x.floor(), y.floor());
        let (u, w) = (x - j, y - i);
        let (i, j) = (i as usize, j as usize);
        for c in 0..3 {
            let p = |r: usize, s: usize| img.get(r, s, c);
            let bary = if u >= w {
                (1.0 - u) * p(i, j) + (u - w) * p(i, j + 1) + w * p(i + 1, j + 1)
            } else {
                (1.0 - w) * p(i, j) + (w - u) * p(i + 1, j) + u * p(i + 1, j + 1)
            };
            assert!((v[c] / v[3] - bary).abs() <= 1e-10);
            assert!((direct[c] - bary).abs() <= 1e-12);
        }
    }
}

#[test]
fn full_budget_reproduces_corners() {
    let img = bundled_texture();
    let fit = fit_image_pwa(&img).unwrap();
    let rec = reconstruct(&fit.network, &img, &fit.mean).unwrap();
    assert_eq!(rec.mse, 0.0);
    assert!(rec.raw_mse <= 1e-10, "{}", rec.raw_mse);
    assert_eq!(rec.fallback_pixels, 0);
    let d = drop_constraints(&fit, &img, 1.0, 9).unwrap();
    assert_eq!(d.mse, rec.mse);
    assert_eq!(d.kept_rows, d.total_rows);
}

#[test]
fn dropping_is_reproducible_and_degrades() {
    let img = bundled_texture();
    let fit = fit_image_pwa(&img).unwrap();
    let a = drop_constraints(&fit, &img, 0.05, 17).unwrap();
    let b = drop_constraints(&fit, &img, 0.05, 17).unwrap();
    assert_eq!(a.mse, b.mse);
    assert_eq!(a.image, b.image);
    assert_eq!(a.kept_rows, (0.05f64 * 3.0 * 1922.0).round() as usize);
    assert!(a.mse > 0.0);
    assert!(a.fallback_pixels > 0 && a.kept_triangles < 1922 / 50);
    let (c, d) = (drop_constraints(&fit, &img, 0.5, 17).unwrap(), drop_constraints(&fit, &img, 0.5, 18).unwrap());
    assert_ne!(c.image, d.image);
    let (lo, hi) = (mean_drop_mse(&fit, &img, 0.05, 0, 20).unwrap(), mean_drop_mse(&fit, &img, 0.5, 0, 20).unwrap());
    assert!(lo > hi && hi > 0.0, "{lo} vs {hi}");
    assert!(drop_constraints(&fit, &img, 0.0, 0).is_err());
    assert!(drop_constraints(&fit, &img, 1.5, 0).is_err());
}

#[test]
fn benchmark_spot_values() {
    assert_eq!(Benchmark::Powell.eval(&[0.0; 4]), 0.0);
    assert!(Benchmark::Parsopoulos.eval(&[std::f64::consts::FRAC_PI_2, 0.0]).abs() <= 1e-30);
    let x = [1.3, 2.7];
    assert!((Benchmark::Alpine.eval(&x) - (1.3f64.sqrt() * 1.3f64.sin() * 2.7f64.sqrt() * 2.7f64.sin())).abs() <= 1e-14);
    assert!((Benchmark::Trid.eval(&x) - ((0.3f64).powi(2) + (1.7f64).powi(2) - 1.3 * 2.7)).abs() <= 1e-14);
    let p = [1.0, -2.0, 0.5, 3.0];
    let want = (0.5f64 - 10.0).powi(2) + 5.0 * 25.0 + 5.0f64.powi(4) + 10.0 * 2.5f64.powi(4);
    assert!((Benchmark::Powell.eval(&p) - want).abs() <= 1e-9);
    for b in Benchmark::ALL {
        assert_eq!(Benchmark::parse(b.name()), Some(b));
        let t = b.unit_target();
        let (lo, hi) = b.interval();
        let u = vec![0.25; b.dim()];
        assert!((t.eval(&u) - b.eval(&vec![lo + 0.25 * (hi - lo); b.dim()])).abs() <= 1e-9);
    }
}

#[test]
fn parsopoulos_error_falls_with_n() {
    let rows = recon_testfn(Benchmark::Parsopoulos, 4, &[4, 8]).unwrap();
    assert!(rows[1].mse < rows[0].mse, "{rows:?}");
    let csv = sweep_csv(&rows);
    assert_eq!(csv.lines().next().unwrap(), SWEEP_HEADER);
    assert!(csv.lines().nth(1).unwrap().starts_with("parsopoulos,2,4,4,-5,5,100,"));
}

#[test]
fn quadratic_trid_is_exact_and_constant_is_zero() {
    let rows = recon_testfn(Benchmark::Trid, 2, &[1, 2]).unwrap();
    assert!(rows.iter().all(|r| r.mse <= 1e-18), "{rows:?}");
    let c = JetTarget::new(2, |x| x[0].clone() * 0.0 + 0.37);
    for n in [1, 3] {
        assert!(recon_point(&c, "constant", (0.0, 1.0), 3, n, 30).unwrap().mse <= 1e-28);
    }
}

#[test]
fn powell_sweep_decreases() {
    let rows = recon_testfn(Benchmark::Powell, 3, &[1, 2, 3]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].mse < w[0].mse), "{rows:?}");
    let exact = recon_testfn(Benchmark::Powell, 4, &[1, 2]).unwrap();
    assert!(exact.iter().all(|r| r.mse <= 1e-12 * rows[0].mse), "{exact:?}");
}

#[test]
fn alpine_error_falls_with_n() {
    let rows = recon_testfn(Benchmark::Alpine, 4, &[4, 8]).unwrap();
    assert!(rows[1].mse < rows[0].mse, "{rows:?}");
    assert_eq!(rows[0].domain_lo, 0.1);
}

mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;
use twdf_core::analytics::*;
use twdf_core::channel::gamma_cdf;
use twdf_core::{Branch, ChannelParams64, HardwareProfile64, SystemConfig64};

fn unit(shapes: (u32, u32, u32)) -> ChannelParams64 {
    ChannelParams64::new(shapes, (1.0, 1.0, 1.0)).unwrap()
}

fn random_config(rng: &mut ChaCha8Rng) -> SystemConfig64 {
    let shapes = (rng.random_range(1..=4), rng.random_range(1..=4), rng.random_range(1..=4));
    let ch = ChannelParams64::from_geometry(
        shapes,
        (rng.random_range(1.0..15.0), rng.random_range(1.0..15.0), rng.random_range(2.0..30.0)),
        rng.random_range(2.0..4.0),
        rng.random_range(2.0..4.0),
    )
    .unwrap();
    reference()
        .with_channels(ch)
        .unwrap()
        .with_hardware(HardwareProfile64::new(rng.random_range(0.0..0.2), rng.random_range(0.0..0.2)).unwrap())
        .unwrap()
        .with_tx_power_dbm(rng.random_range(-30.0..50.0))
        .unwrap()
        .with(|p| {
            p.target_rate = rng.random_range(0.1..2.5);
            p.eta = rng.random_range(0.01..0.99);
            p.beta = rng.random_range(0.001..0.999);
            p.quadrature_order = rng.random_range(1..=64);
        })
        .unwrap()
}

#[test]
fn deltas_ratio_and_vanishing() {
    let cfg = reference().with_tx_power_dbm(0.0).unwrap();
    let d = deltas(&cfg).unwrap();
    assert!((d.delta2 / d.delta1 - 0.1 / (0.6 * 0.9)).abs() < 1e-12);
    // hand evaluation: γ_th = 7, κ = 0.02, ρ = 1e-3 / 1e-8
    let c = 7.0 / ((1.0 - 0.02 * 7.0) * 1e5);
    assert!((d.delta1 - c / 0.1).abs() < 1e-15 * d.delta1.max(1.0));
    assert!((d.delta2 - c / 0.54).abs() < 1e-12 * d.delta2);

    let far = reference().with(|p| p.tx_power = 1e12 * p.noise_power).unwrap();
    let d = deltas(&far).unwrap();
    assert!(d.delta1 < 1e-10 && d.delta2 < 1e-10);
    assert!(matches!(deltas(&reference().with(|p| p.target_rate = 2.0).unwrap()), Err(twdf_core::Error::Branch { .. })));
}

#[test]
fn q_curve_identities() {
    let d2 = 0.37_f64;
    assert!((q_curve(0.0, d2) - d2.sqrt()).abs() < 1e-15);
    assert!((q_curve((d2 / 2.0).sqrt(), d2) - (d2 / 2.0).sqrt()).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let t: f64 = rng.random_range(0.0..50.0);
        let q = q_curve(t, d2);
        assert!((t * q + q * q - d2).abs() < 1e-10);
    }
}

#[test]
fn p1_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let cfg = random_config(&mut rng);
        if is_ceiling(&cfg) {
            assert_eq!(p1(&cfg), 1.0);
            continue;
        }
        let kappa = cfg.hardware().distortion();
        let g = cfg.sndr_threshold();
        let ch = cfg.channels();
        let v = g / (cfg.input_snr() * (1.0 - kappa * g));
        let via_cdf = gamma_cdf(v, ch.m_d(), ch.theta_d()).unwrap();
        assert!((p1(&cfg) - via_cdf).abs() < 1e-14);
    }
    let ideal = reference()
        .with_hardware(HardwareProfile64::ideal())
        .unwrap()
        .with_channels(unit((2, 2, 1)))
        .unwrap();
    let want = 1.0 - (-7.0 / ideal.input_snr()).exp();
    assert!((p1(&ideal) - want).abs() < 1e-15);
}

#[test]
fn p1_matches_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let cfg = random_config(&mut rng);
        if is_ceiling(&cfg) {
            continue;
        }
        let (a, b) = (p1(&cfg), direct_outage_1d(&cfg, 1e-13));
        assert!((a - b).abs() < 1e-8, "{a} vs {b}: {:?}", cfg.params());
    }
}

#[test]
fn decode_bound_matches_oracle() {
    let mut hits = 0;
    for dbm in [-10.0, -5.0, 0.0, 5.0, 10.0, 20.0, 30.0] {
        let cfg = reference()
            .with_channels(unit((2, 2, 1)))
            .unwrap()
            .with_input_snr_db(dbm)
            .unwrap()
            .with_beta(0.5)
            .unwrap();
        if let Ok(p) = p2_case_a(&cfg) {
            hits += 1;
            assert!((p - relay_success_2d(&cfg, 1e-11)).abs() < 1e-6, "{dbm} dB");
        }
    }
    assert!(hits >= 4);
}

#[test]
fn harvest_bound_matches_oracle_at_moderate_order() {
    // interval spans ~23 fading scales here
    let cfg = reference().with_tx_power_dbm(-10.0).unwrap().with(|p| p.quadrature_order = 64).unwrap();
    assert_eq!(deltas(&cfg).unwrap().branch(), Branch::HarvestBound);
    assert!((p2_case_b(&cfg).unwrap() - relay_success_2d(&cfg, 1e-11)).abs() < 1e-4);
}

#[test]
fn harvest_bound_converges_at_second_order() {
    for dbm in [-10.0, -5.0, 5.0] {
        let cfg = reference().with_tx_power_dbm(dbm).unwrap();
        let at = |n: usize| p2_case_b(&cfg.with(|p| p.quadrature_order = n).unwrap()).unwrap();
        let (a, b, c) = (at(128), at(256), at(512));
        let ratio = (b - a) / (c - b);
        assert!((3.5..4.5).contains(&ratio), "{dbm} dBm: ratio {ratio}");
        let oracle = relay_success_2d(&cfg, 1e-11);
        assert!((at(16384) - oracle).abs() < 1e-6);
    }
}

#[test]
fn explicit_branches_reject_the_wrong_region() {
    let low = reference().with_tx_power_dbm(-10.0).unwrap();
    assert!(p2_case_a(&low).is_err());
    assert!(p2_case_b(&low).is_ok());
    let high_beta = reference().with_channels(unit((2, 2, 1))).unwrap().with_input_snr_db(0.0).unwrap().with_beta(0.5).unwrap();
    assert!(p2_case_b(&high_beta).is_err());
    let ceiling = reference().with(|p| p.target_rate = 2.5).unwrap();
    assert!(p2_case_a(&ceiling).is_err() && p2_case_b(&ceiling).is_err());
}

#[test]
fn decode_bound_vanishes_for_tiny_snr() {
    let cfg = reference().with_input_snr_db(-60.0).unwrap();
    assert!(p2_case_a(&cfg).unwrap() < 1e-12);
}

#[test]
fn ceiling_cases() {
    for r in [2.0, 2.5] {
        for dbm in [-10.0, 10.0, 30.0] {
            let cfg = reference().with(|p| p.target_rate = r).unwrap().with_tx_power_dbm(dbm).unwrap();
            let o = system_outage(&cfg);
            assert_eq!((o.p_out, o.p1, o.p2, o.branch), (1.0, 1.0, 0.0, Branch::OscCeiling));
            assert_eq!(diversity_gain(&cfg), 0);
            assert_eq!(energy_efficiency(&cfg), 0.0);
        }
    }
    // γ_th exactly at the threshold is already the ceiling
    let at = reference().with_hardware(HardwareProfile64::symmetric(0.5).unwrap()).unwrap();
    let at = at.with_sndr_threshold(2.0).unwrap();
    assert!(is_ceiling(&at));
}

#[test]
fn excellent_direct_link_removes_outage() {
    let ch = ChannelParams64::new((2, 2, 1), (1.0, 1.0, 1e9)).unwrap();
    let cfg = reference().with_hardware(HardwareProfile64::ideal()).unwrap().with_channels(ch).unwrap();
    assert!(system_outage(&cfg).p_out < 1e-12);
}

#[test]
fn probabilities_stay_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let cfg = random_config(&mut rng);
        let o = system_outage(&cfg);
        for v in [o.p_out, o.p1, o.p2] {
            assert!((0.0..=1.0).contains(&v), "{o:?}");
        }
        if o.branch != Branch::OscCeiling {
            assert_eq!(o.p_out, o.p1 * (1.0 - o.p2));
        }
    }
}

#[test]
fn swapping_relay_links_leaves_outage_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let cfg = random_config(&mut rng);
        let swapped = cfg.with_channels(cfg.channels().swapped()).unwrap();
        let (a, b) = (system_outage(&cfg).p_out, system_outage(&swapped).p_out);
        assert!((a - b).abs() <= 4.0 * f64::EPSILON, "{a} vs {b}");
    }
}

#[test]
fn extreme_power_splits_fall_back_to_direct_link() {
    for dbm in [-5.0, 10.0, 25.0] {
        let cfg = reference().with_tx_power_dbm(dbm).unwrap();
        for beta in [1e-6, 1.0 - 1e-6] {
            let o = system_outage(&cfg.with_beta(beta).unwrap());
            assert!(o.p2 < 1e-6, "β={beta} {dbm} dBm: p2 {}", o.p2);
            assert!((o.p_out - o.p1).abs() <= 1e-6 * o.p1);
        }
    }
}

#[test]
fn outage_falls_with_snr() {
    for cfg in [
        fine(&reference()),
        fine(&reference().with_channels(unit((2, 1, 1))).unwrap()),
        fine(&reference().with_hardware(HardwareProfile64::symmetric(0.15).unwrap()).unwrap()),
    ] {
        let mut prev = 1.0;
        for db in (0..=60).map(|i| i as f64) {
            let p = system_outage(&cfg.with_input_snr_db(db).unwrap()).p_out;
            assert!(p <= prev, "{db} dB");
            prev = p;
        }
    }
}

fn fine(cfg: &SystemConfig64) -> SystemConfig64 {
    cfg.with(|p| p.quadrature_order = 4096).unwrap()
}

#[test]
fn diversity_orders() {
    let cfg = reference().with_channels(unit((2, 1, 1))).unwrap();
    assert_eq!(diversity_gain(&cfg), 2);
    assert_eq!(diversity_gain(&cfg.with_channels(unit((3, 2, 2))).unwrap()), 4);
    let slope = outage_slope(&fine(&cfg), 40.0, 50.0).unwrap();
    assert!((slope + 2.0).abs() <= 0.15, "{slope}");
    let ideal = fine(&reference().with_hardware(HardwareProfile64::ideal()).unwrap().with_channels(unit((1, 1, 1))).unwrap());
    let slope = outage_slope(&ideal, 40.0, 50.0).unwrap();
    assert!((slope + 2.0).abs() <= 0.15, "{slope}");
}

#[test]
fn energy_efficiency_structure() {
    let cfg = reference();
    let p = system_outage(&cfg).p_out;
    let ee = energy_efficiency_with(&cfg, p);
    assert_eq!(ee, energy_efficiency(&cfg));
    let doubled = cfg.with(|q| q.tx_power *= 2.0).unwrap();
    assert!((energy_efficiency_with(&doubled, p) - ee / 2.0).abs() < 1e-12 * ee);
    assert_eq!(energy_efficiency_with(&cfg, 1.0), 0.0);
    // R_th (1 - Pout) / (2 T P_o / 3) with P_o = 10 mW
    assert!((ee - (1.0 - p) / (2.0 * 0.01 / 3.0)).abs() < 1e-9 * ee);
}

#[test]
fn energy_efficiency_has_interior_peak() {
    let cfg = reference();
    let ee: Vec<f64> = (-30..=30)
        .map(|d| energy_efficiency(&cfg.with_tx_power_dbm(d as f64).unwrap()))
        .collect();
    let k = ee.iter().enumerate().fold(0, |b, (i, &v)| if v > ee[b] { i } else { b });
    assert!(k > 0 && k + 1 < ee.len());
    assert!(ee[..=k].windows(2).all(|w| w[1] >= w[0]));
    assert!(ee[k..].windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn optimal_beta_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let cfg = random_config(&mut rng);
        let res = optimal_beta(&cfg, 41).unwrap();
        let brute = res
            .grid
            .iter()
            .copied()
            .fold((f64::NAN, f64::INFINITY), |b, (beta, p)| if p < b.1 { (beta, p) } else { b });
        assert_eq!(res.grid[grid_argmin(&res.grid)], brute);
        for (beta, p) in &res.grid {
            assert_eq!(*p, system_outage(&cfg.with_beta(*beta).unwrap()).p_out);
        }
        assert!(res.p_out <= brute.1);
    }
}

#[test]
fn optimal_beta_flat_region_takes_smallest() {
    let cfg = reference().with(|p| p.target_rate = 2.0).unwrap();
    let res = optimal_beta(&cfg, BETA_GRID_POINTS).unwrap();
    assert_eq!(res.beta, BETA_SEARCH_MIN);
    assert_eq!(res.p_out, 1.0);
    assert!(optimal_beta(&cfg, 2).is_err());
}

#[test]
fn optimal_beta_is_interior_and_grows_with_shape() {
    let beta = |m: u32| {
        let ch = ChannelParams64::from_geometry((m, m, 1), (5.0, 5.0, 10.0), 2.7, 3.0).unwrap();
        optimal_beta(&fine(&reference().with_channels(ch).unwrap()), BETA_GRID_POINTS).unwrap()
    };
    let (two, three) = (beta(2), beta(3));
    assert!(two.beta > BETA_SEARCH_MIN && two.beta < BETA_SEARCH_MAX);
    assert!(three.beta > two.beta);
}

#[test]
fn single_precision_tracks_double() {
    let cfg64 = reference().with_tx_power_dbm(0.0).unwrap();
    let cfg32 = twdf_core::SystemParams32::reference()
        .validate()
        .unwrap()
        .with_tx_power_dbm(0.0)
        .unwrap();
    let (a, b) = (system_outage(&cfg64).p_out, system_outage(&cfg32).p_out);
    assert!((a - b as f64).abs() < 1e-4 * a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_configs_agree_across_branches(dbm in -10.0f64..25.0, r in 0.3f64..1.5, ma in 1u32..=3, mb in 1u32..=3) {
        let ch = ChannelParams64::from_geometry((ma, mb, 1), (5.0, 6.0, 10.0), 2.7, 3.0).unwrap();
        let cfg = reference()
            .with_channels(ch).unwrap()
            .with_tx_power_dbm(dbm).unwrap()
            .with(|p| { p.target_rate = r; p.quadrature_order = 64; }).unwrap();
        let cfg = cfg.with_beta(boundary_beta(&cfg)).unwrap();
        let a = p2_case_a(&cfg).unwrap();
        let b = p2_case_b(&cfg).unwrap();
        prop_assert!((a - b).abs() < 1e-3);
    }
}

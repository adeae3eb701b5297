use nda_core::catalog::{catalog_list, explicit_node, subshell_family, StateParams, StateSpec};
use nda_core::reference::{
    quasiclassical_gap, subshell_kin_nda_coeff, subshell_pot_nda_coeff, subshell_total_coeff, Rational, SubshellParams,
};
use nda_core::sampling::{chain_rng, ReferenceDensity};
use nda_core::surface::SheetSampler;
use nda_core::{Configuration, WaveFunctionModel};
use proptest::prelude::*;

fn states() -> Vec<StateSpec> {
    catalog_list(&StateParams::default()).unwrap()
}

fn models() -> Vec<(String, WaveFunctionModel)> {
    states().into_iter().filter_map(|s| s.model.clone().map(|m| (s.name, m))).collect()
}

/// Configuration with `3 n` coordinates in `[-6, 6]`.
fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-6.0..6.0f64, 3 * n)
}

fn swap(x: &[f64], i: usize, j: usize) -> Vec<f64> {
    let mut y = x.to_vec();
    for c in 0..3 {
        y.swap(3 * i + c, 3 * j + c);
    }
    y
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn min_radius(x: &[f64]) -> f64 {
    x.chunks(3).map(norm).fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn same_spin_exchange_flips_sign_bitwise(x in coords(4), pick in 0usize..64) {
        for (name, m) in models() {
            let x = &x[..m.dim()];
            let pairs = m.same_spin_pairs();
            if pairs.is_empty() {
                continue;
            }
            let (i, j) = pairs[pick % pairs.len()];
            let a = m.value(x);
            let b = m.value(&swap(x, i, j));
            prop_assert_eq!(b.to_bits(), (-a).to_bits(), "{} ({}, {})", name, i, j);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn derivatives_match_finite_differences(x in coords(4)) {
        for (name, m) in models() {
            let x = &x[..m.dim()];
            if min_radius(x) < 0.05 {
                continue;
            }
            let mut grad = vec![0.0; m.dim()];
            let (psi, lap) = m.value_grad_lap(x, &mut grad);
            let gn = norm(&grad);
            // Away from the node: the zero set must be at least 0.01 away.
            if psi.abs() < 1e-2 * gn || psi == 0.0 {
                continue;
            }
            let h = 1e-4;
            let mut y = x.to_vec();
            let mut fd_lap = 0.0;
            for k in 0..x.len() {
                y[k] = x[k] + h;
                let p = m.value(&y);
                y[k] = x[k] - h;
                let q = m.value(&y);
                y[k] = x[k];
                let fd = (p - q) / (2.0 * h);
                prop_assert!((fd - grad[k]).abs() <= 1e-6 * gn, "{name} d{k}: {fd} vs {}", grad[k]);
                let h2 = 1e-3;
                y[k] = x[k] + h2;
                let p = m.value(&y);
                y[k] = x[k] - h2;
                let q = m.value(&y);
                y[k] = x[k];
                fd_lap += (p - 2.0 * psi + q) / (h2 * h2);
            }
            let scale = lap.abs().max(psi.abs()).max(gn);
            prop_assert!((fd_lap - lap).abs() <= 1e-5 * scale, "{name} lap: {fd_lap} vs {lap}");
        }
    }

    #[test]
    fn harmonic_exact_local_energy_is_constant(x in coords(2)) {
        let s = states().into_iter().find(|s| s.name == "harmonic_exact").unwrap();
        let m = s.model().unwrap();
        if m.value(&x).abs() > 1e-12 {
            if let Ok(e) = s.hamiltonian.local_energy(m, &Configuration::new(2, x.clone()).unwrap()) {
                prop_assert!((e - 1.25).abs() < 1e-10, "{e}");
            }
        }
    }

    #[test]
    fn parametrized_node_points_are_zeros(seed in any::<u64>()) {
        let mut all = states();
        all.push(subshell_family(1, 4, 1.3).unwrap());
        all.push(subshell_family(2, 1, 1.0).unwrap());
        for s in all {
            let Ok(sheets) = explicit_node(&s) else { continue };
            let m = s.model().unwrap();
            let g = ReferenceDensity::for_model(m).unwrap();
            let mut rng = chain_rng(seed, 0, 0);
            let (mut x, mut grad) = (vec![0.0; m.dim()], vec![0.0; m.dim()]);
            for sheet in sheets {
                let smp = SheetSampler::new(sheet, g).unwrap();
                let w = smp.sample(&mut rng, &mut x);
                prop_assert!(w.is_finite() && w > 0.0);
                let psi = m.value_grad(&x, &mut grad);
                prop_assert!(psi.abs() <= 1e-10 * norm(&grad), "{}: {psi}", s.name);
            }
        }
    }
}

#[test]
fn subshell_identities_hold_exactly() {
    for l in 1..=100u32 {
        for k in 1..=2 * (2 * l + 1) {
            let p = SubshellParams::new(k, l, 1.0).unwrap();
            let total = subshell_kin_nda_coeff(&p) + subshell_pot_nda_coeff(&p);
            assert_eq!(total, subshell_total_coeff(&p));
            let l = i64::from(l);
            let k = i64::from(k);
            assert_eq!(total, Rational::new(k * (l - 2 * (l + 1)), 2 * (l + 1) * (l + 1) * (l + 2)));
        }
    }
}

#[test]
fn quasiclassical_ratios_converge_monotonically() {
    let g: Vec<_> = (1..=100).map(|l| quasiclassical_gap(&SubshellParams::new(1, l, 1.0).unwrap())).collect();
    for w in g.windows(2) {
        assert!(w[1].kin_ratio > w[0].kin_ratio && w[1].pot_ratio > w[0].pot_ratio);
        assert!(w[1].kin() < 1.0 && w[1].pot() < 1.0);
    }
    assert!((g[59].kin() - 1.0).abs() < 0.05 && (g[59].pot() - 1.0).abs() < 0.05);
}

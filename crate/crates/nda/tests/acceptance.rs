//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Details of every check are printed above its verdict.

use std::collections::BTreeMap;
use std::time::Instant;

use nda::compute::{compute, Component, ComponentResult, KinMethod};
use nda::exec::Parallel;
use nda_core::catalog::{catalog_list, lookup, StateParams, StateSpec, STATE_NAMES};
use nda_core::Configuration;
use nda_core::estimators::{
    estimate_kin_nda_shell_with, estimate_kin_nda_surface_with, NdaEstimate, SamplerConfig,
};
use nda_core::exec::Sequential;
use nda_core::orbital::Axis;
use nda_core::quadrature::{integrals, Target};
use nda_core::reference::{
    quasiclassical_gap, subshell_kin_nda_coeff, subshell_pot_nda_coeff, Rational, SubshellParams,
};
use nda_core::sampling::{chain_rng, ReferenceDensity};
use nda_core::topology::{count_nodal_domains_with, test_node_equivalence_with, DomainSettings, TransformSpec, Verdict};

const SIGMA: f64 = 3.0;

struct Criterion {
    id: u32,
    name: &'static str,
    checks: Vec<(bool, String)>,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Criterion { id, name, checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        println!("    {} {detail}", if ok { "ok  " } else { "FAIL" });
        self.checks.push((ok, detail));
    }

    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.0)
    }
}

fn state(name: &str) -> StateSpec {
    lookup(name, &StateParams::default()).unwrap()
}

fn within(est: &NdaEstimate, exact: f64) -> bool {
    (est.mean - exact).abs() <= SIGMA * est.stderr
}

fn describe(label: &str, est: &NdaEstimate, exact: f64) -> String {
    format!(
        "{label}: {:.6} ± {:.2e} vs {:.6} ({:+.2}σ)",
        est.mean,
        est.stderr,
        exact,
        (est.mean - exact) / est.stderr
    )
}

fn find(rs: &[ComponentResult], c: Component) -> &NdaEstimate {
    &rs.iter().find(|r| r.component == c).unwrap().estimate
}

/// `(kin_nda, pot_nda)` estimates gathered along the way, for the sum
/// identity.
type NdaCache = BTreeMap<String, (NdaEstimate, NdaEstimate)>;

/// Production budgets (steps per chain) chosen from measured variances and
/// autocorrelation times so that every standard error stays below the
/// bound with margin: `(state, psi^2 walk, |psi| walk, kin draws)`.
const TABLE_II: [(&str, usize, usize, usize); 4] = [
    ("3S_1s2s", 7_000_000, 400_000, 200_000),
    ("3P_1s2p", 1_500_000, 400_000, 200_000),
    ("1S_1s2_2s2", 6_000_000, 1_500_000, 200_000),
    ("1S_1s2_2p2", 2_500_000, 1_200_000, 600_000),
];
const TABLE_II_CHAINS: usize = 16;
const MAX_STDERR: f64 = 2e-3;

fn table_ii(exec: &Parallel, cache: &mut NdaCache) -> Criterion {
    let mut c = Criterion::new(1, "Table II reproduction");
    let t = Instant::now();
    for (i, &(name, std_steps, pot_steps, kin_draws)) in TABLE_II.iter().enumerate() {
        let s = state(name);
        let seed = 100 + i as u64;
        let run = |comps: &[Component], steps: usize| {
            let cfg = SamplerConfig::with_steps(TABLE_II_CHAINS, steps, seed);
            compute(&s, comps, KinMethod::Auto, &cfg, exec).unwrap()
        };
        let std = run(&[Component::KinStd, Component::PotStd], std_steps);
        let pot = run(&[Component::Pot], pot_steps);
        let kin = run(&[Component::Kin], kin_draws);
        let rows = [
            ("kin_std", find(&std, Component::KinStd), s.exact_expectations.as_ref().unwrap().kin.value()),
            ("pot_std", find(&std, Component::PotStd), s.exact_expectations.as_ref().unwrap().pot.value()),
            ("kin_nda", find(&kin, Component::Kin), s.exact_nda.as_ref().unwrap().kin.value()),
            ("pot_nda", find(&pot, Component::Pot), s.exact_nda.as_ref().unwrap().pot.value()),
        ];
        for (label, est, exact) in rows {
            let ok = within(est, exact) && est.stderr <= MAX_STDERR;
            c.check(ok, describe(&format!("{name} {label} [{}]", est.method.name()), est, exact));
        }
        cache.insert(name.into(), (find(&kin, Component::Kin).clone(), find(&pot, Component::Pot).clone()));
    }
    let secs = t.elapsed().as_secs_f64();
    c.check(secs <= 600.0, format!("runtime {secs:.1} s (limit 600 s)"));
    c
}

fn table_iii(exec: &Parallel, cache: &mut NdaCache) -> Criterion {
    let mut c = Criterion::new(2, "Table III reproduction");
    let names = ["3P_2p2", "1S_2p2", "1D_2p2"];
    let mut got = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let s = state(name);
        let cfg = SamplerConfig::with_steps(8, 400_000, 200 + i as u64);
        let r = compute(&s, &[Component::Kin, Component::Pot], KinMethod::Surface, &cfg, exec).unwrap();
        let (k, p) = (find(&r, Component::Kin).clone(), find(&r, Component::Pot).clone());
        c.check(within(&k, 1.0 / 12.0), describe(&format!("{name} kin_nda"), &k, 1.0 / 12.0));
        c.check(within(&p, -1.0 / 3.0), describe(&format!("{name} pot_nda"), &p, -1.0 / 3.0));
        cache.insert(name.to_string(), (k.clone(), p.clone()));
        got.push((name, k, p));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            for (label, a, b) in [("kin", &got[i].1, &got[j].1), ("pot", &got[i].2, &got[j].2)] {
                let comb = a.stderr.hypot(b.stderr);
                let d = a.mean - b.mean;
                c.check(
                    d.abs() <= SIGMA * comb,
                    format!("{} vs {} {label}: difference {d:+.2e} ({:+.2}σ combined)", got[i].0, got[j].0, d / comb),
                );
            }
        }
    }
    c
}

fn quadrature_exactness() -> Criterion {
    let mut c = Criterion::new(3, "Quadrature-oracle exactness");
    let p2 = integrals(&state("2P_2p")).unwrap();
    let s3 = integrals(&state("3S_1s2s")).unwrap();
    let cases = [
        ("2P_2p pot_nda", p2.target(Target::PotNda), -1.0 / 6.0),
        ("2P_2p kin_nda", p2.target(Target::KinNda), 1.0 / 24.0),
        ("3S_1s2s pot_nda", s3.target(Target::PotNda), -1185.0 / 1768.0),
    ];
    for (label, v, exact) in cases {
        let err = (v - exact).abs();
        c.check(err <= 1e-8, format!("{label}: {v:.15} vs {exact:.15}, error {err:.1e}"));
    }
    let again = integrals(&state("3S_1s2s")).unwrap();
    c.check(
        again.target(Target::PotNda).to_bits() == s3.target(Target::PotNda).to_bits(),
        "repeat evaluation bitwise identical".into(),
    );
    c
}

fn sum_identity(exec: &Parallel, cache: &mut NdaCache) -> Criterion {
    let mut c = Criterion::new(4, "Sum identity");
    let params = StateParams::default();
    for (i, s) in catalog_list(&params).unwrap().iter().enumerate() {
        let Some(total) = s.exact_total.as_ref().map(|e| e.value()) else { continue };
        if !cache.contains_key(&s.name) {
            let cfg = SamplerConfig::with_steps(8, 200_000, 400 + i as u64);
            let r = compute(s, &[Component::Kin, Component::Pot], KinMethod::Auto, &cfg, exec).unwrap();
            cache.insert(s.name.clone(), (find(&r, Component::Kin).clone(), find(&r, Component::Pot).clone()));
        }
        let (k, p) = &cache[&s.name];
        let d = k.mean + p.mean - total;
        let comb = k.stderr.hypot(p.stderr);
        c.check(d.abs() <= SIGMA * comb, format!("{} MC: kin+pot-E = {d:+.2e} ({:+.2}σ)", s.name, d / comb));
        if s.reduction.is_some() {
            let q = integrals(s).unwrap();
            let d = q.target(Target::KinNda) + q.target(Target::PotNda) - total;
            c.check(d.abs() <= 1e-7, format!("{} quadrature: kin+pot-E = {d:+.1e}", s.name));
        }
    }
    c
}

/// True value of `kin_nda + pot_nda` for the noninteracting wave function
/// under the interacting Hamiltonian at `w = 1/4, g0 = 1`.
const CASE_C_SUM: f64 = 1.221_556_731_363_189_5;

fn harmonic_cases(exec: &Parallel, cache: &mut NdaCache) -> Criterion {
    let mut c = Criterion::new(5, "Harmonic cases");
    let run = |name: &str, seed: u64| {
        let cfg = SamplerConfig::with_steps(8, 400_000, seed);
        compute(&state(name), &[Component::Kin, Component::Pot, Component::Sum], KinMethod::Surface, &cfg, exec).unwrap()
    };
    let a = run("harmonic_noninteracting", 501);
    let (ak, ap) = (find(&a, Component::Kin), find(&a, Component::Pot));
    c.check(within(ap, 7.0 / 8.0), describe("(a) pot_nda", ap, 7.0 / 8.0));
    c.check(within(ak, 1.0 / 8.0), describe("(a) kin_nda", ak, 1.0 / 8.0));
    let q = integrals(&state("harmonic_noninteracting")).unwrap();
    c.check(
        (q.target(Target::PotNda) - 0.875).abs() <= 1e-8 && (q.target(Target::KinNda) - 0.125).abs() <= 1e-8,
        format!("(a) quadrature ({:.10}, {:.10})", q.target(Target::PotNda), q.target(Target::KinNda)),
    );
    cache.insert("harmonic_noninteracting".into(), (ak.clone(), ap.clone()));

    let b = run("harmonic_exact", 502);
    let sp = std::f64::consts::PI.sqrt();
    let closed = 3.5 * 0.25 + 0.375 * sp / (4.0 + 3.0 * sp) + (1.0 + 0.5 * sp) / (4.0 + 3.0 * sp);
    c.check(within(find(&b, Component::Sum), 1.25), describe("(b) total", find(&b, Component::Sum), 1.25));
    c.check(within(find(&b, Component::Pot), closed), describe("(b) pot_nda", find(&b, Component::Pot), closed));
    cache.insert("harmonic_exact".into(), (find(&b, Component::Kin).clone(), find(&b, Component::Pot).clone()));

    let m = run("harmonic_mixed", 503);
    let sum = find(&m, Component::Sum);
    c.check(within(sum, CASE_C_SUM), describe("(c) sum", sum, CASE_C_SUM));
    let below = (1.25 - sum.mean) / sum.stderr;
    c.check(below >= 5.0, format!("(c) sum lies {below:.1}σ below 5/4"));
    let q = integrals(&state("harmonic_mixed")).unwrap();
    let qs = q.target(Target::KinNda) + q.target(Target::PotNda);
    c.check((qs - CASE_C_SUM).abs() <= 1e-8, format!("(c) quadrature sum {qs:.10}"));
    c
}

fn cross_validation(exec: &Parallel) -> Criterion {
    let mut c = Criterion::new(6, "Estimator cross-validation");
    for (i, name) in ["2P_2p", "3S_1s2s", "3P_2p2", "harmonic_noninteracting"].iter().enumerate() {
        let s = state(name);
        let cfg = SamplerConfig::with_steps(8, 200_000, 600 + i as u64);
        let a = estimate_kin_nda_surface_with(&s, &cfg, exec).unwrap();
        let b = estimate_kin_nda_shell_with(&s, &cfg, exec).unwrap();
        let comb = a.stderr.hypot(b.stderr);
        let d = a.mean - b.mean;
        c.check(
            d.abs() <= SIGMA * comb && b.status == nda_core::estimators::EstimateStatus::Ok,
            format!(
                "{name}: surface {:.6} ± {:.1e}, shell {:.6} ± {:.1e} ({:+.2}σ)",
                a.mean, a.stderr, b.mean, b.stderr, d / comb
            ),
        );
    }
    c
}

fn subshell_identities() -> Criterion {
    let mut c = Criterion::new(7, "Subshell identities");
    let mut bad = Vec::new();
    let mut cells = 0;
    for l in 1..=100u32 {
        for k in 1..=2 * (2 * l + 1) {
            let p = SubshellParams::new(k, l, 1.0).unwrap();
            let want = Rational::new(-i64::from(k), 2 * i64::from(l + 1).pow(2));
            cells += 1;
            if subshell_kin_nda_coeff(&p) + subshell_pot_nda_coeff(&p) != want {
                bad.push((k, l));
            }
        }
    }
    c.check(bad.is_empty(), format!("kin+pot = -k/(2(l+1)^2) exactly in {} of {cells} cases", cells - bad.len()));
    let gaps: Vec<_> = (1..=100u32).map(|l| quasiclassical_gap(&SubshellParams::new(1, l, 1.0).unwrap())).collect();
    let mono = gaps.windows(2).all(|w| w[1].kin_ratio > w[0].kin_ratio && w[1].pot_ratio > w[0].pot_ratio);
    c.check(mono, "ratios to the ordinary expectations increase monotonically towards 1".into());
    let same_k = (1..=100u32).all(|l| {
        (1..=2 * (2 * l + 1)).all(|k| quasiclassical_gap(&SubshellParams::new(k, l, 1.0).unwrap()) == gaps[l as usize - 1])
    });
    c.check(same_k, "ratios do not depend on the occupation".into());
    let g60 = gaps[59];
    c.check(
        (g60.kin() - 1.0).abs() < 0.05 && (g60.pot() - 1.0).abs() < 0.05,
        format!("l = 60: kin ratio {} = {:.4}, pot ratio {} = {:.4}", g60.kin_ratio, g60.kin(), g60.pot_ratio, g60.pot()),
    );
    c
}

fn topology(exec: &Parallel) -> Criterion {
    let mut c = Criterion::new(8, "Topology");
    for name in ["2P_2p", "3P_2p2", "1S_2p2", "1D_2p2"] {
        let rep = count_nodal_domains_with(&state(name), &DomainSettings::default(), exec).unwrap();
        c.check(
            rep.n_domains == 2,
            format!("{name}: {} domains over {} points, sizes {:?}", rep.n_domains, rep.n_points, rep.component_sizes),
        );
    }
    let flip = TransformSpec::flip(2, 1, Axis::X).unwrap();
    let rep = test_node_equivalence_with(&state("1D_2p2"), &state("3P_2p2"), &flip, 100_000, 0, exec).unwrap();
    c.check(
        rep.verdict == Verdict::Equivalent && rep.agreement_fraction == 1.0 && rep.n_points == 100_000,
        format!("1D_2p2 vs 3P_2p2 under x_2 -> -x_2: agreement {} over {} points", rep.agreement_fraction, rep.n_points),
    );
    for name in STATE_NAMES {
        let s = state(name);
        let Ok(m) = s.model() else { continue };
        let id = TransformSpec::identity(m.n_particles());
        let rep = test_node_equivalence_with(&s, &s, &id, 10_000, 1, exec).unwrap();
        c.check(
            rep.verdict == Verdict::Equivalent && rep.agreement_fraction == 1.0,
            format!("{name} self-equivalence: agreement {}", rep.agreement_fraction),
        );
    }
    c
}

fn determinism() -> Criterion {
    let mut c = Criterion::new(9, "Determinism");
    let comps = [Component::Kin, Component::Pot, Component::KinStd, Component::PotStd];
    for (name, method) in [("3S_1s2s", KinMethod::Surface), ("3P_1s2p", KinMethod::Shell), ("harmonic_exact", KinMethod::Surface)] {
        let s = state(name);
        let cfg = SamplerConfig::with_steps(6, 20_000, 9);
        let runs: Vec<String> = [
            serde_json::to_string(&compute(&s, &comps, method, &cfg, &Sequential).unwrap()).unwrap(),
            serde_json::to_string(&compute(&s, &comps, method, &cfg, &Parallel::new(1)).unwrap()).unwrap(),
            serde_json::to_string(&compute(&s, &comps, method, &cfg, &Parallel::new(4)).unwrap()).unwrap(),
            serde_json::to_string(&compute(&s, &comps, method, &cfg, &Parallel::new(4)).unwrap()).unwrap(),
        ]
        .into();
        c.check(runs.iter().all(|r| *r == runs[0]), format!("{name}: sequential, 1 and 4 workers, repeated: identical"));
    }
    let settings = DomainSettings { n_points: 4000, ..DomainSettings::default() };
    let a = count_nodal_domains_with(&state("1D_2p2"), &settings, &Parallel::new(1)).unwrap();
    let b = count_nodal_domains_with(&state("1D_2p2"), &settings, &Parallel::new(3)).unwrap();
    c.check(a == b, "domain report identical for 1 and 3 workers".into());
    let cli = |threads: &str| {
        std::env::set_var(nda::exec::THREADS_ENV, threads);
        let mut out = Vec::new();
        let args = ["nda", "compute", "--state", "2P_2p", "--samples", "2e5", "--seed", "5", "--format", "csv"];
        let code = nda::run(args, &mut out, &mut std::io::sink());
        (code, out)
    };
    let (a, b) = (cli("1"), cli("4"));
    std::env::remove_var(nda::exec::THREADS_ENV);
    c.check(a.0 == 0 && a == b, "CLI output identical with NDA_THREADS=1 and 4".into());
    c
}

fn local_energy() -> Criterion {
    let mut c = Criterion::new(10, "Local-energy constancy");
    let params = StateParams::default();
    let mut names: Vec<&str> = vec!["harmonic_exact"];
    names.extend(STATE_NAMES.iter().filter(|n| !n.starts_with("harmonic")));
    names.push("harmonic_noninteracting");
    for name in names {
        let s = lookup(name, &params).unwrap();
        let m = s.model().unwrap();
        let total = s.exact_total.as_ref().unwrap().value();
        let g = ReferenceDensity::for_model(m).unwrap();
        let mut rng = chain_rng(10, 99, 0);
        let mut x = vec![0.0; m.dim()];
        let (mut lo, mut hi, mut worst) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        let mut n = 0;
        while n < 1000 {
            g.sample(&mut rng, &mut x);
            let cfg = Configuration::new(m.n_particles(), x.clone()).unwrap();
            let Ok(e) = s.hamiltonian.local_energy(m, &cfg) else { continue };
            lo = lo.min(e);
            hi = hi.max(e);
            worst = worst.max((e - total).abs());
            n += 1;
        }
        c.check(
            hi - lo < 1e-9 && worst < 1e-9,
            format!("{name}: spread {:.1e}, max |E_L - {total}| {worst:.1e} over 1000 points", hi - lo),
        );
    }
    c
}

fn main() {
    let t = Instant::now();
    let exec = Parallel::from_env();
    println!("acceptance run on {} worker(s)", exec.threads());
    let mut cache = NdaCache::new();
    let mut results = Vec::new();
    type Job<'a> = Box<dyn FnOnce(&mut NdaCache) -> Criterion + 'a>;
    let jobs: Vec<Job> = vec![
        Box::new(|cache| table_ii(&exec, cache)),
        Box::new(|cache| table_iii(&exec, cache)),
        Box::new(|_| quadrature_exactness()),
        Box::new(|cache| harmonic_cases(&exec, cache)),
        Box::new(|cache| sum_identity(&exec, cache)),
        Box::new(|_| cross_validation(&exec)),
        Box::new(|_| subshell_identities()),
        Box::new(|_| topology(&exec)),
        Box::new(|_| determinism()),
        Box::new(|_| local_energy()),
    ];
    for job in jobs {
        let start = Instant::now();
        let c = job(&mut cache);
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        println!("[{verdict}] criterion {}: {} ({:.1} s)", c.id, c.name, start.elapsed().as_secs_f64());
        results.push(c);
    }
    results.sort_by_key(|c| c.id);
    println!("\nsummary");
    for c in &results {
        println!("criterion {:>2} {} {}", c.id, if c.passed() { "PASS" } else { "FAIL" }, c.name);
    }
    println!("total {:.1} s", t.elapsed().as_secs_f64());
    if results.iter().any(|c| !c.passed()) {
        std::process::exit(1);
    }
}

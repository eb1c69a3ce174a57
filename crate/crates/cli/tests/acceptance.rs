//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bingham_dae::constitutive::{sgn, Bingham, DashpotLaw, SystemParams};
use bingham_dae::filippov::check_inclusion;
use bingham_dae::forcing::Forcing;
use bingham_dae::scenarios::{paper_bingham, paper_params, run_paper_case, ScenarioId, PAPER_DT};
use bingham_dae::stepper::{
    convergence_study, corrector_bingham, corrector_generic, predictor, residual_check, Trajectory,
};
use bingham_dae::system::is_equilibrium;
use bingham_dae_cli::commands::cmd_compare_naive;
use bingham_dae_cli::config::RunConfig;
use bingham_dae_cli::csv::{read_rows, write_trajectory};
use bingham_dae_cli::report::parse_report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_TUPLES: usize = 5_000;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

struct Cases {
    f1: Trajectory,
    small: Trajectory,
    large: Trajectory,
    f2: Trajectory,
    f1_time: Duration,
}

impl Cases {
    fn all(&self) -> [(&'static str, &Trajectory); 4] {
        [("f1", &self.f1), ("small", &self.small), ("large", &self.large), ("f2", &self.f2)]
    }
}

fn run(id: ScenarioId) -> Trajectory {
    run_paper_case(id, id.default_t_end()).expect("reference case runs").0
}

fn max_abs(t: &Trajectory, f: impl Fn(&bingham_dae::system::State) -> f64) -> f64 {
    t.states.iter().map(|s| f(s).abs()).fold(0.0, f64::max)
}

fn analytical(c: &Cases) -> Verdict {
    let t = &c.f1;
    let f1 = Forcing::f1();
    let (x, v, fs) = (max_abs(t, |s| s.x), max_abs(t, |s| s.v), max_abs(t, |s| s.fs));
    let fd_err = t.states.iter().map(|s| (s.fd - f1.eval(s.t)).abs()).fold(0.0, f64::max);
    let ok = t.states.len() == 20_001 && x <= 1e-12 && v <= 1e-12 && fs <= 1e-12 && fd_err <= 1e-12;
    verdict(
        ok && c.f1_time < Duration::from_secs(1),
        format!(
            "nodes={} max|x|={x:e} max|v|={v:e} max|Fs|={fs:e} max|Fd-F1|={fd_err:e} runtime={:?}",
            t.states.len(),
            c.f1_time
        ),
    )
}

fn stretched_rest(c: &Cases) -> Verdict {
    let t = &c.small;
    let s = bingham_dae::scenarios::summarize(t);
    let exact_x = t.states.iter().all(|s| s.x == 0.005);
    let still = t.states.iter().all(|s| s.v == 0.0);
    let eq = is_equilibrium(&t.params, &paper_bingham(), t.last(), t.forcing.eval(t.last().t));
    verdict(
        exact_x && still && s.stick_fraction == 1.0 && eq,
        format!("x≡0.005: {exact_x}, v≡0: {still}, stick_fraction={}, equilibrium: {eq}", s.stick_fraction),
    )
}

fn free_decay(c: &Cases) -> Verdict {
    let t = &c.large;
    let s = bingham_dae::scenarios::summarize(t);
    let mags: Vec<f64> = s.extrema.iter().map(|e| e.1.abs()).collect();
    let decreasing = mags.windows(2).all(|w| w[1] < w[0]);
    let last = t.last();
    let dissipative = t.states.iter().all(|s| s.fd * s.v >= 0.0);
    let ok = decreasing
        && !mags.is_empty()
        && last.v == 0.0
        && last.x.abs() <= 0.01
        && s.total_dissipation > 0.0
        && s.total_dissipation <= 12.5
        && dissipative;
    verdict(
        ok,
        format!(
            "extrema={} strictly decreasing: {decreasing}, final v={:e} x={:e}, dissipation={:.6}, Fd·v≥0: {dissipative}",
            mags.len(),
            last.v,
            last.x,
            s.total_dissipation
        ),
    )
}

fn forced_slip(c: &Cases) -> Verdict {
    let t = &c.f2;
    let peak = t.states.iter().filter(|s| s.t <= 1.0).map(|s| s.x.abs()).fold(0.0, f64::max);
    let s = bingham_dae::scenarios::summarize(t);
    let permanent = s
        .rest_time
        .map(|r| t.states.iter().filter(|s| s.t >= r).all(|s| s.v == 0.0))
        .unwrap_or(false);
    let last = t.last();
    let ok = peak > 0.01 && permanent && s.rest_time.is_some_and(|r| r > 1.0 && r < 2.0) && last.x.abs() <= 0.01;
    verdict(ok, format!("max|x| on [0,1]={peak:.6}, rest at {:?}, final x={:e}", s.rest_time, last.x))
}

fn certification(c: &Cases) -> Verdict {
    let mut worst_res = 0.0f64;
    let mut worst_inc = 0.0f64;
    let mut violations = 0;
    for (_, t) in c.all() {
        worst_res = worst_res.max(residual_check(t, &t.forcing).max());
        let inc = check_inclusion(t, &t.forcing, 1e-8).expect("Bingham law");
        violations += inc.violations.len();
        worst_inc = worst_inc.max(inc.max_distance);
    }
    verdict(
        worst_res <= 1e-10 && violations == 0,
        format!("max residual={worst_res:e}, max inclusion distance={worst_inc:e}, violations={violations}"),
    )
}

struct Tuple {
    params: SystemParams,
    law: Bingham,
    f_tilde: f64,
    dt: f64,
}

fn random_tuples(seed: u64, n: usize) -> Vec<Tuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (rng.gen_range(lo.ln()..hi.ln())).exp();
    (0..n)
        .map(|_| {
            let m = log_uniform(&mut rng, 1e-1, 10.0);
            let k = log_uniform(&mut rng, 1e-1, 1e3);
            let gamma = log_uniform(&mut rng, 1e-2, 1e2);
            let threshold = rng.gen_range(0.0..10.0);
            let dt = log_uniform(&mut rng, 1e-5, 1.0);
            let f_tilde = rng.gen_range(-1e3..1e3);
            Tuple { params: SystemParams::new(m, k).unwrap(), law: Bingham { gamma, threshold }, f_tilde, dt }
        })
        .collect()
}

fn corrector_equivalence(tuples: &[Tuple]) -> Verdict {
    let (mut dv, mut dfd, mut failures) = (0.0f64, 0.0f64, 0);
    for t in tuples {
        let closed = corrector_bingham(&t.params, &t.law, t.f_tilde, t.dt);
        match corrector_generic(&t.params, &DashpotLaw::bingham_as_generic(t.law), t.f_tilde, t.dt) {
            Ok(g) => {
                dv = dv.max((g.v - closed.v).abs());
                dfd = dfd.max((g.fd - closed.fd).abs());
            }
            Err(_) => failures += 1,
        }
    }
    verdict(
        failures == 0 && dv <= 1e-10 && dfd <= 1e-10,
        format!("tuples={} max|Δv|={dv:e} max|ΔFd|={dfd:e} root failures={failures}", tuples.len()),
    )
}

fn coulomb_limit() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = paper_params();
    let law = Bingham { gamma: 1e9, threshold: 1.0 };
    let mut worst = 0.0f64;
    for i in 0..RANDOM_TUPLES {
        let magnitude: f64 = if i % 2 == 0 { rng.gen_range(1.0..2.0) } else { rng.gen_range(2.0..1e3) };
        let f_tilde = if rng.gen::<bool>() { magnitude } else { -magnitude };
        if f_tilde.abs() <= 1.0 {
            continue;
        }
        let dt = if i % 3 == 0 { PAPER_DT } else { rng.gen_range(1e-5..1.0) };
        let c = corrector_bingham(&params, &law, f_tilde, dt);
        worst = worst.max((c.fd - sgn(f_tilde)).abs());
    }
    verdict(worst <= 1e-6, format!("max|Fd - sgn(F̃)|={worst:e} (m=1, k=100)"))
}

fn sign_transfer(c: &Cases, tuples: &[Tuple]) -> Verdict {
    let mut checked = 0usize;
    let mut exceptions = 0usize;
    for t in tuples {
        let closed = corrector_bingham(&t.params, &t.law, t.f_tilde, t.dt);
        let generic = corrector_generic(&t.params, &DashpotLaw::bingham_as_generic(t.law), t.f_tilde, t.dt);
        checked += 1;
        exceptions += usize::from(sgn(closed.fd) != sgn(t.f_tilde));
        if let Ok(g) = generic {
            checked += 1;
            exceptions += usize::from(sgn(g.fd) != sgn(t.f_tilde));
        }
    }
    for (_, traj) in c.all() {
        for (n, pair) in traj.states.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let load = traj.forcing.eval(b.t);
            let f_tilde = predictor(&traj.params, a.v, a.fs, load, traj.dt);
            checked += 1;
            if sgn(b.fd) != sgn(f_tilde) {
                exceptions += 1;
                eprintln!("sign transfer broken at step {} (F̃={f_tilde:e}, Fd={:e})", n + 1, b.fd);
            }
        }
    }
    verdict(exceptions == 0, format!("checked={checked} exceptions={exceptions}"))
}

fn convergence() -> Verdict {
    let start = Instant::now();
    let params = paper_params();
    let law = DashpotLaw::Bingham(paper_bingham());
    let init = ScenarioId::F2Forced.initial_state();
    let rows = convergence_study(&params, &law, &Forcing::f2(), init, 0.5, &[4e-4, 2e-4, 1e-4], Some(1e-5));
    let elapsed = start.elapsed();
    match rows {
        Ok(rows) => {
            let orders: Vec<f64> = rows.iter().filter_map(|r| r.observed_order).collect();
            let ok = orders.len() == 2 && orders.iter().all(|p| (0.7..=1.3).contains(p));
            let errors: Vec<String> = rows.iter().map(|r| format!("{:e}", r.error)).collect();
            verdict(
                ok && elapsed < Duration::from_secs(30),
                format!("errors=[{}] orders={orders:.4?} runtime={elapsed:?}", errors.join(", ")),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn non_existence(dir: &Path) -> Verdict {
    let config = RunConfig::paper(ScenarioId::SmallDisplacement);
    match cmd_compare_naive(&config, dir) {
        Ok(out) => {
            let on_disk = std::fs::read_to_string(dir.join("small_compare.report")).unwrap_or_default();
            let pairs = parse_report(&on_disk);
            let get = |k: &str| pairs.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone()).unwrap_or_default();
            let moving: f64 = get("naive.moving_fraction").parse().unwrap_or(0.0);
            let dae_stick: f64 = get("dae.stick_fraction").parse().unwrap_or(0.0);
            let detected = get("divergence.detected") == "true";
            verdict(
                moving > 0.1 && dae_stick == 1.0 && detected && out.files.len() == 3,
                format!("naive v≠0 at {:.1}% of nodes, DAE v=0 at {:.1}%, divergence reported: {detected}", moving * 100.0, dae_stick * 100.0),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn csv_round_trip(c: &Cases, dir: &Path) -> Verdict {
    let mut mismatches = 0usize;
    let mut values = 0usize;
    for (_, t) in c.all() {
        let rows = read_rows(&write_trajectory(t)).expect("own output parses");
        for (row, s) in rows.iter().zip(&t.states) {
            for (a, b) in [(row.state.t, s.t), (row.state.x, s.x), (row.state.v, s.v), (row.state.fs, s.fs), (row.state.fd, s.fd)] {
                values += 1;
                mismatches += usize::from(a.to_bits() != b.to_bits());
            }
        }
        mismatches += usize::from(rows.len() != t.states.len());
    }

    let clean = dir.join("large.csv");
    std::fs::write(&clean, write_trajectory(&c.large)).expect("write csv");
    let text = std::fs::read_to_string(&clean).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let target = 1234;
    let mut fields: Vec<String> = lines[target].split(',').map(String::from).collect();
    fields[4] = format!("{:.16e}", fields[4].parse::<f64>().unwrap() + 0.1);
    lines[target] = fields.join(",");
    let corrupt = dir.join("large_corrupt.csv");
    std::fs::write(&corrupt, lines.join("\n") + "\n").expect("write csv");

    let verify = |p: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_bingham-dae")).arg("verify").arg(p).output().expect("spawn cli");
        (out.status.code(), String::from_utf8_lossy(&out.stderr).trim().to_string())
    };
    let (clean_code, _) = verify(&clean);
    let (corrupt_code, corrupt_err) = verify(&corrupt);
    verdict(
        mismatches == 0 && clean_code == Some(0) && corrupt_code == Some(4),
        format!(
            "values={values} bit mismatches={mismatches}, verify clean → {clean_code:?}, corrupted → {corrupt_code:?} ({corrupt_err})"
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let start = Instant::now();
    let f1 = run(ScenarioId::F1Forced);
    let f1_time = start.elapsed();
    let cases = Cases {
        f1,
        small: run(ScenarioId::SmallDisplacement),
        large: run(ScenarioId::LargeDisplacement),
        f2: run(ScenarioId::F2Forced),
        f1_time,
    };
    let tuples = random_tuples(2024, RANDOM_TUPLES);

    let results: Vec<(&str, Verdict)> = vec![
        ("analytical F1 case", analytical(&cases)),
        ("stretched-spring rest", stretched_rest(&cases)),
        ("free-vibration decay", free_decay(&cases)),
        ("forced slip then rest", forced_slip(&cases)),
        ("residual and inclusion certification", certification(&cases)),
        ("corrector equivalence", corrector_equivalence(&tuples)),
        ("Coulomb limit", coulomb_limit()),
        ("sign transfer", sign_transfer(&cases, &tuples)),
        ("convergence order", convergence()),
        ("naive integrator chatter", non_existence(dir.path())),
        ("CSV round trip and verify", csv_round_trip(&cases, dir.path())),
    ];

    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", i + 1, v.detail);
        failed += usize::from(!v.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on failure.

use std::time::{Duration, Instant};

use warpres::asymptotics::{c_n_constant, counting_report, region_term_from_grid, CnConstant};
use warpres::phase::{trace_gamma, GammaCurve};
use warpres::resonance::{required_cutoff, resonance_set, seed_nontrivial, Resonance, ZeroKind};
use warpres::spectrum::CrossSection;
use warpres_cli::verify::{alpha0, certify_rectangles, run_suite};
use warpres_cli::{run, Command, CrossSectionSpec, Format, RunConfig, Shape, CURVE_RESOLUTION};

const ALPHA0_PAPER: f64 = 1.509;
const ALPHA0_TOL: f64 = 0.005;
const ALPHA0_RESIDUAL_TOL: f64 = 1e-8;
const ALPHA0_BUDGET: Duration = Duration::from_secs(1);

const SPHERE_RMAX: f64 = 12.0;
const SPHERE_RMAX_SMALL: f64 = 8.0;
const MIN_RECTANGLES: usize = 20;
const SPHERE_BUDGET: Duration = Duration::from_secs(120);

const CIRCLE_R: f64 = 60.0;
const CIRCLE_R_HALF: f64 = 30.0;
const COUNT_TOL: f64 = 0.10;
const CIRCLE_BUDGET: Duration = Duration::from_secs(600);

const SUITE_BUDGET: Duration = Duration::from_secs(60);

const QUAD_TOL: f64 = 1e-8;
const SUMMAND_STABILITY: f64 = 1e-4;
const CN_BUDGET: Duration = Duration::from_secs(60);

const CUBE_ROOT_STABILITY: f64 = 0.20;

const THREAD_COUNTS: [usize; 3] = [1, 4, 8];
const SEED: u64 = 20;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn config(command: Command, shape: Shape, dim: usize, r_max: f64) -> RunConfig {
    RunConfig {
        command,
        cross_section: CrossSectionSpec { shape, dim, lmax: None, lengths: Vec::new(), spectrum_file: None, cutoff: None },
        r_max,
        quad_tol: QUAD_TOL,
        threads: None,
        seed: SEED,
        out: None,
        format: Format::Csv,
        radii: None,
        samples: 17,
        eval: None,
        plot: None,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn sphere_set(r_max: f64, curve: &GammaCurve) -> (CrossSection, Vec<Resonance>) {
    let cs = config(Command::Resonances, Shape::Sphere, 2, r_max).cross_section().expect("sphere spectrum");
    let set = resonance_set(&cs, r_max, curve).expect("sphere resonances");
    (cs, set)
}

fn min_cube_root_ratio(set: &[Resonance]) -> f64 {
    set.iter()
        .filter(|z| z.kind == ZeroKind::Nontrivial)
        .map(|z| z.nu.re / z.nu.im.cbrt())
        .fold(f64::INFINITY, f64::min)
}

fn lines_of(set: &[Resonance]) -> Vec<(f64, Vec<Resonance>)> {
    let mut lines: Vec<(f64, Vec<Resonance>)> = Vec::new();
    for z in set {
        match lines.last_mut() {
            Some((l, zs)) if *l == z.lambda => zs.push(*z),
            _ => lines.push((z.lambda, vec![*z])),
        }
    }
    lines
}

fn alpha0_criterion() -> Verdict {
    let cfg = config(Command::Constants, Shape::Sphere, 2, 1.0);
    let (report, elapsed) = timed(|| run(&cfg));
    let (a0, res) = alpha0();
    let ok = report.is_ok() && (a0 - ALPHA0_PAPER).abs() <= ALPHA0_TOL && res <= ALPHA0_RESIDUAL_TOL && elapsed < ALPHA0_BUDGET;
    verdict(
        ok,
        format!("α₀ = {a0:.6}, |ρ(α₀) - iπα₀/2| = {res:.1e}, constants report in {:.2} s", elapsed.as_secs_f64()),
    )
}

fn sphere_structure(curve: &GammaCurve, cs: &CrossSection, set: &[Resonance], elapsed: Duration) -> Verdict {
    let t = Instant::now();
    let lines = lines_of(set);
    let a0 = curve.alpha0;
    // One family per l ≥ 1, in order, with multiplicity 2l + 1.
    let families_ok = lines.iter().enumerate().all(|(k, (lambda, zs))| {
        let l = k as u64 + 1;
        ((l * (l + 1)) as f64).sqrt() == *lambda && zs.iter().all(|z| z.mult_lambda == 2 * l + 1)
    });
    let expected_lines = (1u64..).take_while(|&l| ((l * (l + 1)) as f64).sqrt() * a0 < SPHERE_RMAX - 1.0).count();
    let families_ok = families_ok && lines.len() >= expected_lines && cs.cutoff >= required_cutoff(SPHERE_RMAX);

    // Distance from each non-trivial zero to its nearest seed, with the
    // nearest-other-seed distance as the size of its cell.
    let mut cells: Vec<(f64, f64, f64)> = Vec::new();
    for (lambda, zs) in &lines {
        let seeds = seed_nontrivial(*lambda, SPHERE_RMAX, curve).expect("seeds");
        for z in zs.iter().filter(|z| z.kind == ZeroKind::Nontrivial) {
            let mut d: Vec<(f64, usize)> = seeds.iter().enumerate().map(|(i, s)| ((s - z.nu).norm(), i)).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (dist, i) = d.first().copied().unwrap_or((f64::INFINITY, 0));
            let cell = seeds
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, s)| (s - seeds[i]).norm())
                .fold(f64::INFINITY, f64::min);
            cells.push((*lambda, dist, cell));
        }
    }
    // Fit c on the lower half of the lines, test on all of them.
    let lambdas: Vec<f64> = lines.iter().map(|l| l.0).collect();
    let split = lambdas[lambdas.len() / 2];
    let c_fit = cells.iter().filter(|c| c.0 < split).map(|c| c.1 / c.0.cbrt()).fold(0.0, f64::max);
    let seeds_ok = !cells.is_empty()
        && cells.iter().all(|&(lambda, d, cell)| d <= c_fit * lambda.cbrt() && d < 0.5 * cell);

    let cert = certify_rectangles(SEED, MIN_RECTANGLES + 4, &lines, SPHERE_RMAX);
    let cert_ok = cert.worst == 0.0 && cert.points >= MIN_RECTANGLES;
    let total = elapsed + t.elapsed();
    verdict(
        families_ok && seeds_ok && cert_ok && total < SPHERE_BUDGET,
        format!(
            "{} line families (need ≥ {expected_lines}); {} non-trivial zeros within {c_fit:.4}·λ^(1/3) of their seeds; \
             {} rectangles, {} mismatched; {:.1} s",
            lines.len(),
            cells.len(),
            cert.points,
            cert.worst,
            total.as_secs_f64()
        ),
    )
}

fn circle_criteria(curve: &GammaCurve) -> (Verdict, Verdict) {
    let cfg = config(Command::Count, Shape::Circle, 1, CIRCLE_R);
    let ((cs, set), elapsed) = timed(|| {
        let cs = cfg.cross_section().expect("circle spectrum");
        let set = resonance_set(&cs, CIRCLE_R, curve).expect("circle resonances");
        (cs, set)
    });
    let report = counting_report(&cs, &set, &[CIRCLE_R_HALF, CIRCLE_R], curve, QUAD_TOL).expect("counting report");
    let (half, full) = (&report.samples[0], &report.samples[1]);
    let dev = |x: f64| (x - 1.0).abs();
    let law = verdict(
        dev(full.ratio) <= COUNT_TOL && dev(half.ratio) > dev(full.ratio) && elapsed < CIRCLE_BUDGET,
        format!(
            "N/(C r²) = {:.4} at r = {CIRCLE_R}, {:.4} at r = {CIRCLE_R_HALF}; {:.1} s",
            full.ratio,
            half.ratio,
            elapsed.as_secs_f64()
        ),
    );
    let trivial = full.n_trivial as f64 / full.trivial_asymptotic;
    let nontrivial = full.n_nontrivial as f64 / full.nontrivial_asymptotic;
    let split = verdict(
        dev(trivial) <= COUNT_TOL && dev(nontrivial) <= COUNT_TOL,
        format!(
            "trivial {} vs {:.1} (ratio {trivial:.4}), non-trivial {} vs {:.1} (ratio {nontrivial:.4})",
            full.n_trivial, full.trivial_asymptotic, full.n_nontrivial, full.nontrivial_asymptotic
        ),
    );
    (law, split)
}

fn identity_suite(curve: &GammaCurve) -> Verdict {
    let (outcomes, elapsed) = timed(|| run_suite(SEED, curve));
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{} ({:.1e} > {:.0e})", o.measurement.name, o.measurement.worst, o.tolerance))
        .collect();
    verdict(
        failed.is_empty() && elapsed < SUITE_BUDGET,
        if failed.is_empty() {
            format!("{} checks within tolerance; {:.1} s", outcomes.len(), elapsed.as_secs_f64())
        } else {
            format!("failed: {}", failed.join(", "))
        },
    )
}

fn cn_criterion(curve: &GammaCurve) -> Verdict {
    let t = Instant::now();
    let mut worst_halving: f64 = 0.0;
    let mut worst_paths: f64 = 0.0;
    for n in 1..=3 {
        let a = c_n_constant(n, curve, QUAD_TOL).expect("c_n");
        let b = c_n_constant(n, curve, QUAD_TOL / 2.0).expect("c_n");
        let parts = |c: &CnConstant| [c.gamma_term, c.trivial_term, c.region_term];
        for (x, y) in parts(&a).iter().zip(parts(&b)) {
            worst_halving = worst_halving.max((x - y).abs() / x.abs());
        }
        let grid = region_term_from_grid(n, 16, 10, QUAD_TOL).expect("grid path");
        worst_paths = worst_paths.max((grid - a.region_term).abs() / a.region_term.abs().max(1.0));
    }
    let elapsed = t.elapsed();
    verdict(
        worst_halving <= SUMMAND_STABILITY && worst_paths <= QUAD_TOL && elapsed < CN_BUDGET,
        format!(
            "halving changes summands by ≤ {worst_halving:.1e}, grid vs adaptive region term {worst_paths:.1e}; {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn cube_root_criterion(curve: &GammaCurve, set12: &[Resonance]) -> Verdict {
    let (_, set8) = sphere_set(SPHERE_RMAX_SMALL, curve);
    let m12 = min_cube_root_ratio(set12);
    let m8 = min_cube_root_ratio(&set8);
    verdict(
        m8 > 0.0 && m12 > 0.0 && m8.is_finite() && (m8 / m12 - 1.0).abs() <= CUBE_ROOT_STABILITY,
        format!("min Re ν/(Im ν)^(1/3) = {m8:.4} at r_max = {SPHERE_RMAX_SMALL}, {m12:.4} at r_max = {SPHERE_RMAX}"),
    )
}

/// Reports behind criteria 1 to 7, rendered in a pool of `threads` workers.
fn reports(threads: usize) -> Vec<String> {
    let mut configs = Vec::new();
    for n in 1..=3 {
        configs.push(config(Command::Constants, Shape::Sphere, n, 1.0));
    }
    configs.push(config(Command::Resonances, Shape::Sphere, 2, SPHERE_RMAX));
    configs.push(config(Command::Resonances, Shape::Sphere, 2, SPHERE_RMAX_SMALL));
    let mut count = config(Command::Count, Shape::Circle, 1, CIRCLE_R);
    count.radii = Some(vec![CIRCLE_R_HALF, CIRCLE_R]);
    configs.push(count);
    configs.push(config(Command::Verify, Shape::Sphere, 2, 1.0));
    let mut json = config(Command::Resonances, Shape::Sphere, 2, SPHERE_RMAX);
    json.format = Format::Json;
    configs.push(json);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    pool.install(|| configs.iter().map(|c| run(c).expect("report").report).collect())
}

fn determinism() -> Verdict {
    let base = reports(THREAD_COUNTS[0]);
    let mut mismatched = Vec::new();
    for &t in &THREAD_COUNTS[1..] {
        let other = reports(t);
        for (k, (a, b)) in base.iter().zip(&other).enumerate() {
            if a != b {
                mismatched.push(format!("report {k} with {t} threads"));
            }
        }
    }
    verdict(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{} reports identical across {:?} threads", base.len(), THREAD_COUNTS)
        } else {
            format!("differ: {}", mismatched.join(", "))
        },
    )
}

fn main() {
    let curve = trace_gamma(CURVE_RESOLUTION).expect("level curve");
    let mut results: Vec<(&str, Verdict)> = Vec::new();
    let mut record = |name, v: Verdict| {
        println!("{} {name}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        results.push((name, v));
    };

    record("1 alpha0 reproduction", alpha0_criterion());
    let ((cs, set12), elapsed) = timed(|| sphere_set(SPHERE_RMAX, &curve));
    record("2 two-sphere resonance structure", sphere_structure(&curve, &cs, &set12, elapsed));
    let (law, split) = circle_criteria(&curve);
    record("3 counting law on the circle", law);
    record("4 trivial/non-trivial decomposition", split);
    record("5 identity suite", identity_suite(&curve));
    record("6 c_n quadrature self-consistency", cn_criterion(&curve));
    record("7 cube-root resonance-free region", cube_root_criterion(&curve, &set12));
    record("8 determinism across thread counts", determinism());

    let failed = results.iter().filter(|(_, v)| !v.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

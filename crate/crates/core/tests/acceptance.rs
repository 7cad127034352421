//! End-to-end acceptance checks, one test per criterion.
//!
//! Each test prints a single `criterion N: PASS|FAIL ...` line to the real
//! stdout (bypassing the test harness capture) and then asserts.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use illg::config::{parse_config, Plan, RunConfig};
use illg::experiment::{run, RunSummary, TIMESERIES_FILE};
use illg::mms::{run_convergence_study, ConvergenceTable, ManufacturedCase, StudyAxis, StudySpec};
use illg::observables::{energy_with_field, modified_energy};
use illg::scheme::{cold_start, solve_cross_system, ColdStart, FieldSpec, IllgStepper, SchemeParams, TimeWindow};
use illg::{init, Dim, Grid, Vec3, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-7;

fn report(n: usize, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n}: {verdict} {detail}");
    let _ = out.flush();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn load(name: &str) -> RunConfig {
    let text = std::fs::read_to_string(config_path(name)).unwrap();
    parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn study_of(cfg: &RunConfig) -> &StudySpec {
    match &cfg.plan {
        Plan::Study(s) => s,
        Plan::Simulation(_) => panic!("{} is not a study", cfg.experiment),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs()
}

fn table_line(t: &ConvergenceTable) -> String {
    let rows: Vec<String> = t
        .rows
        .iter()
        .map(|r| format!("{:.4e}:{:.4e}/{:.4e}", r.resolution, r.error_l2, r.error_linf))
        .collect();
    format!("orders {:.3}/{:.3} rows [{}]", t.order_l2, t.order_linf, rows.join(", "))
}

struct StudyRun {
    table: ConvergenceTable,
    elapsed: Duration,
    metadata: String,
}

/// Runs a study config through the experiment driver, checking that the
/// parsed parameters are the ones the criterion names.
fn run_study_config(name: &str, check: impl Fn(&StudySpec)) -> StudyRun {
    let cfg = load(name);
    let spec = study_of(&cfg);
    assert_eq!(spec.fp_tolerance, EPS);
    check(spec);
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let summary = run(&cfg, dir.path()).unwrap_or_else(|e| panic!("{name}: {e}"));
    let elapsed = start.elapsed();
    let RunSummary::Study(table) = summary else { panic!("{name}: expected a table") };
    let metadata = std::fs::read_to_string(dir.path().join("metadata.txt")).unwrap();
    StudyRun { table, elapsed, metadata }
}

fn time_1d() -> &'static StudyRun {
    static RUN: OnceLock<StudyRun> = OnceLock::new();
    RUN.get_or_init(|| {
        run_study_config("converge-time-1d.cfg", |s| {
            let t = 0.01;
            assert_eq!((s.case.dim, s.axis), (Dim::One, StudyAxis::Time));
            assert_eq!((s.case.alpha, s.case.tau, s.final_time), (0.1, 10.0, t));
            assert!(close(s.fixed, 0.001));
            let want = [t / 40.0, t / 60.0, t / 80.0, t / 100.0];
            assert!(s.resolutions.iter().zip(want).all(|(&a, b)| close(a, b)), "{:?}", s.resolutions);
        })
    })
}

fn space_1d() -> &'static StudyRun {
    static RUN: OnceLock<StudyRun> = OnceLock::new();
    RUN.get_or_init(|| {
        run_study_config("converge-space-1d.cfg", |s| {
            assert_eq!((s.case.dim, s.axis), (Dim::One, StudyAxis::Space));
            assert_eq!((s.case.alpha, s.case.tau, s.final_time), (0.1, 10.0, 0.5));
            assert!(close(s.fixed, 2e-6));
            let want = [1.0 / 20.0, 1.0 / 40.0, 1.0 / 60.0, 1.0 / 80.0];
            assert!(s.resolutions.iter().zip(want).all(|(&a, b)| close(a, b)), "{:?}", s.resolutions);
        })
    })
}

fn time_3d() -> &'static StudyRun {
    static RUN: OnceLock<StudyRun> = OnceLock::new();
    RUN.get_or_init(|| {
        run_study_config("converge-time-3d.cfg", |s| {
            let t = 0.01;
            assert_eq!((s.case.dim, s.axis), (Dim::Three, StudyAxis::Time));
            assert_eq!((s.case.alpha, s.case.tau, s.final_time), (0.01, 1000.0, t));
            assert!(close(s.fixed, 1.0 / 16.0));
            let want = [t / 100.0, t / 120.0, t / 140.0, t / 160.0];
            assert!(s.resolutions.iter().zip(want).all(|(&a, b)| close(a, b)), "{:?}", s.resolutions);
        })
    })
}

/// The 3-D spatial study with the stated T = 0.01, built directly since the
/// shipped config uses T = 0.5.
fn space_3d() -> &'static StudyRun {
    static RUN: OnceLock<StudyRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let case = ManufacturedCase::new(Dim::Three, 0.01, 1000.0);
        let hs = vec![1.0 / 8.0, 1.0 / 10.0, 1.0 / 12.0, 1.0 / 14.0];
        let mut spec = StudySpec::new(case, StudyAxis::Space, hs, 2e-6, 0.01);
        spec.fp_tolerance = EPS;
        let start = Instant::now();
        let table = run_convergence_study(&spec).unwrap();
        StudyRun { table, elapsed: start.elapsed(), metadata: String::new() }
    })
}

struct SimRun {
    rows: Vec<Vec<f64>>,
    max_len_dev: f64,
    final_average: Vec3,
}

impl SimRun {
    fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }
}

const COL_TIME: usize = 1;
const COL_MX: usize = 2;
const COL_MY: usize = 3;
const COL_ENERGY: usize = 5;
const COL_LEN: usize = 9;

/// Runs a simulation config with every step recorded and reads the CSV back.
fn run_sim_config(name: &str) -> SimRun {
    let mut cfg = load(name);
    cfg.record_every = 1;
    let dir = tempfile::tempdir().unwrap();
    let summary = run(&cfg, dir.path()).unwrap_or_else(|e| panic!("{name}: {e}"));
    let RunSummary::Simulation(summary) = summary else { panic!("{name}: expected a simulation") };
    let text = std::fs::read_to_string(dir.path().join(TIMESERIES_FILE)).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), summary.steps + 1);
    SimRun { rows, max_len_dev: summary.max_len_dev, final_average: summary.final_average }
}

fn relax_llg() -> &'static SimRun {
    static RUN: OnceLock<SimRun> = OnceLock::new();
    RUN.get_or_init(|| run_sim_config("relax-llg.cfg"))
}

fn relax_illg() -> &'static SimRun {
    static RUN: OnceLock<SimRun> = OnceLock::new();
    RUN.get_or_init(|| run_sim_config("relax-illg.cfg"))
}

#[test]
fn criterion_01_temporal_order_1d() {
    let r = time_1d();
    let t = &r.table;
    let paper = [(1.2500e-11, 1.2584e-11), (5.6887e-12, 5.6024e-12), (3.2008e-12, 3.1525e-12), (2.0487e-12, 2.0174e-12)];
    let within = |x: f64, p: f64| x >= p / 10.0 && x <= p * 10.0;
    let magnitudes = t.rows.iter().zip(paper).all(|(row, (l2, linf))| within(row.error_l2, l2) && within(row.error_linf, linf));
    let orders = (1.8..=2.2).contains(&t.order_l2) && (1.8..=2.2).contains(&t.order_linf);
    let fast = r.elapsed <= Duration::from_secs(120);
    report(1, orders && magnitudes && fast, format!("{} time {:.1?}", table_line(t), r.elapsed));
}

#[test]
fn criterion_02_spatial_order_1d() {
    let r = space_1d();
    let t = &r.table;
    let orders = (1.8..=2.2).contains(&t.order_l2) && (1.8..=2.2).contains(&t.order_linf);
    let fast = r.elapsed <= Duration::from_secs(30 * 60);
    report(2, orders && fast, format!("{} time {:.1?}", table_line(t), r.elapsed));
}

#[test]
fn criterion_03_temporal_order_3d() {
    let r = time_3d();
    let t = &r.table;
    let orders = (1.7..=2.3).contains(&t.order_l2) && (1.7..=2.3).contains(&t.order_linf);
    let fast = r.elapsed <= Duration::from_secs(15 * 60);
    let documented = r.metadata.lines().any(|l| l.starts_with("note = ") && l.contains("1/16"));
    report(
        3,
        orders && fast && documented,
        format!("{} time {:.1?} h=1/16 noted in metadata: {documented}", table_line(t), r.elapsed),
    );
}

#[test]
fn criterion_04_spatial_order_3d() {
    // Supplementary run at the final time of the 1-D spatial study, where the
    // spatial error is well above rounding. Printed for reference only.
    let case = ManufacturedCase::new(Dim::Three, 0.01, 1000.0);
    let hs = vec![1.0 / 8.0, 1.0 / 10.0, 1.0 / 12.0, 1.0 / 14.0];
    let mut spec = StudySpec::new(case, StudyAxis::Space, hs, 1e-4, 0.5);
    spec.fp_tolerance = EPS;
    let supplementary = run_convergence_study(&spec).unwrap();
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion 4 (supplementary, T=0.5, k=1e-4, not the criterion): {}", table_line(&supplementary));
    drop(out);

    let r = space_3d();
    let t = &r.table;
    let orders = t.order_l2 >= 1.6 && t.order_linf >= 1.6;
    let fast = r.elapsed <= Duration::from_secs(60 * 60);
    report(4, orders && fast, format!("T=0.01 {} time {:.1?}", table_line(t), r.elapsed));
}

#[test]
fn criterion_05_length_preservation() {
    let runs = [
        ("1", time_1d().table.max_len_dev()),
        ("2", space_1d().table.max_len_dev()),
        ("3", time_3d().table.max_len_dev()),
        ("4", space_3d().table.max_len_dev()),
        ("7", relax_llg().max_len_dev),
        ("8", relax_illg().max_len_dev),
    ];
    // the CSV column must agree with the summaries
    for run in [relax_llg(), relax_illg()] {
        let col = run.column(COL_LEN).into_iter().fold(0.0, f64::max);
        assert_eq!(col, run.max_len_dev);
    }
    let pass = runs.iter().all(|&(_, d)| d <= 1e-6);
    let detail: Vec<String> = runs.iter().map(|(n, d)| format!("run{n}={d:.3e}")).collect();
    report(5, pass, format!("max ||m|^2-1| {}", detail.join(" ")));
}

fn dissipation_run(field: FieldSpec) -> (f64, f64, usize) {
    let g = Grid::unit_cube(8).unwrap();
    let h = g.min_spacing();
    let k = h * h / 8.0;
    let params = SchemeParams::new(0.5, 1.0, k).unwrap().with_tolerance(EPS);
    let m0 = init::smooth_random_unit(g, 2024);
    let [m0, m1, _] = cold_start(&m0, field.at(0.0), &params, ColdStart::Taylor, None).unwrap();
    let energy = |next: &VectorField, curr: &VectorField| match field {
        FieldSpec::Zero => modified_energy(next, curr, &params).unwrap().total,
        _ => energy_with_field(next, curr, field.at(0.0), &params).unwrap().total,
    };
    let e1 = energy(&m1, &m0);
    let slack = 10.0 * EPS * (1.0 + e1.abs());
    let mut window = TimeWindow::new(m0, m1, k, 1).unwrap();
    let mut stepper = IllgStepper::new(g, params, field).unwrap();
    let mut prev = e1;
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..500 {
        let (next, _) = stepper.step(&window, None).unwrap();
        let e = energy(&next, &window.m_curr);
        worst = worst.max(e - prev);
        if e > prev + slack {
            violations += 1;
        }
        prev = e;
        window.advance(next, k);
    }
    (worst, slack, violations)
}

#[test]
fn criterion_06_energy_dissipation() {
    let (w0, s0, v0) = dissipation_run(FieldSpec::Zero);
    let (w1, s1, v1) = dissipation_run(FieldSpec::Constant(Vec3::new(10.0, 0.0, 0.0)));
    report(
        6,
        v0 == 0 && v1 == 0,
        format!("max increment zero-field {w0:.3e} (slack {s0:.1e}), constant-field {w1:.3e} (slack {s1:.1e})"),
    );
}

#[test]
fn criterion_07_relaxation_endpoint() {
    let r = relax_llg();
    let d = (r.final_average - Vec3::X).norm();
    report(7, d <= 1e-3, format!("|<m> - x| = {d:.3e}"));
}

fn derivative_sign_changes_before(time: &[f64], y: &[f64], until: f64) -> usize {
    let d: Vec<(f64, f64)> = y.windows(2).zip(time.windows(2)).map(|(w, t)| (t[1], w[1] - w[0])).collect();
    d.windows(2)
        .filter(|p| p[1].0 < until && p[0].1 * p[1].1 < 0.0)
        .count()
}

#[test]
fn criterion_08_inertial_nutation() {
    let illg = relax_illg();
    let llg = relax_llg();
    let (t, my) = (illg.column(COL_TIME), illg.column(COL_MY));
    let changes = derivative_sign_changes_before(&t, &my, 10.0);

    let (tl, mx) = (llg.column(COL_TIME), llg.column(COL_MX));
    let mx_tail: Vec<f64> = tl.iter().zip(&mx).filter(|(t, _)| **t >= 0.1).map(|(_, m)| *m).collect();
    let monotone = mx_tail.windows(2).all(|w| w[1] >= w[0]);

    let e = illg.column(COL_ENERGY);
    let rise = e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    report(
        8,
        changes >= 1 && monotone && rise <= 0.0,
        format!("d<m_y>/dt sign changes before t=10: {changes}; llg <m_x> monotone after 0.1: {monotone}; max energy increment {rise:.3e}"),
    );
}

/// Solves `(I - [a]×) v = b` by Gaussian elimination with partial pivoting.
fn eliminate(a: Vec3, b: Vec3) -> Vec3 {
    let mut m = [
        [1.0, a[2], -a[1], b[0]],
        [-a[2], 1.0, a[0], b[1]],
        [a[1], -a[0], 1.0, b[2]],
    ];
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        for r in c + 1..3 {
            let f = m[r][c] / m[c][c];
            for j in c..4 {
                m[r][j] -= f * m[c][j];
            }
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|j| m[r][j] * x[j]).sum();
        x[r] = (m[r][3] - s) / m[r][r];
    }
    Vec3::new(x[0], x[1], x[2])
}

#[test]
fn criterion_09_inner_solver_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let unit = |rng: &mut ChaCha8Rng| loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            break v / n;
        }
    };
    let (mut worst_rel, mut worst_res) = (0.0f64, 0.0f64);
    for _ in 0..1_000_000 {
        let a = unit(&mut rng) * rng.gen_range(0.0..=100.0);
        let b = unit(&mut rng) * 10f64.powf(rng.gen_range(-3.0..3.0));
        let v = solve_cross_system(a, b);
        let oracle = eliminate(a, b);
        worst_rel = worst_rel.max((v - oracle).norm() / oracle.norm());
        worst_res = worst_res.max((v - a.cross(v) - b).norm() / (1.0 + b.norm()));
    }
    report(
        9,
        worst_rel <= 1e-12 && worst_res <= 1e-13,
        format!("10^6 pairs: max relative mismatch {worst_rel:.3e}, max scaled residual {worst_res:.3e}"),
    );
}

#[test]
fn criterion_10_contraction_bound() {
    let g = Grid::line(32, 1.0).unwrap();
    let h = g.min_spacing();
    let k = h * h / 8.0;
    let params = SchemeParams::new(0.5, 1.0, k).unwrap().with_tolerance(EPS);
    let field = FieldSpec::Constant(Vec3::new(10.0, 0.0, 0.0));
    // rough data so the inner iteration has work to do
    let m0 = init::random_unit(g, 10);
    let levels = cold_start(&m0, field.at(0.0), &params, ColdStart::Taylor, None).unwrap();
    let mut window = TimeWindow::from_levels(levels, k).unwrap();
    let mut stepper = IllgStepper::new(g, params, field).unwrap();
    let (mut worst_ratio, mut worst_iters, mut ratios) = (0.0f64, 0, 0);
    for _ in 0..500 {
        let (next, rep) = stepper.step(&window, None).unwrap();
        worst_ratio = rep.contraction_ratios.iter().copied().fold(worst_ratio, f64::max);
        worst_iters = worst_iters.max(rep.iterations);
        ratios += rep.contraction_ratios.len();
        window.advance(next, k);
    }
    report(
        10,
        worst_ratio <= 0.55 && worst_iters <= 30,
        format!("4k/h^2 = {:.2}, 500 steps, {ratios} ratios: max ratio {worst_ratio:.3e}, max iterations {worst_iters}", 4.0 * k / (h * h)),
    );
}

fn random_field(g: Grid, rng: &mut ChaCha8Rng) -> VectorField {
    VectorField::from_fn(g, |_| Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .with_ghosts_filled()
}

#[test]
fn criterion_11_mesh_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grids = [
        ("1-D n=8", Grid::line(8, 1.0).unwrap()),
        ("1-D n=64", Grid::line(64, 1.0).unwrap()),
        ("3-D 4^3", Grid::unit_cube(4).unwrap()),
        ("3-D 8^3", Grid::unit_cube(8).unwrap()),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, g) in grids {
        let h = g.min_spacing();
        let (mut sbp, mut grad, mut lap) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..100 {
            let u = random_field(g, &mut rng);
            let v = random_field(g, &mut rng);
            let lhs = -u.laplacian().inner(&v).unwrap();
            let rhs = u.gradient().inner(&v.gradient());
            sbp = sbp.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
            let l2 = u.norm_l2();
            grad = grad.max(u.gradient().norm_sq().sqrt() * h / l2);
            lap = lap.max(u.laplacian().norm_l2() * h * h / l2);
        }
        pass &= sbp <= 1e-12 && grad <= 2.0 && lap <= 4.0;
        detail.push(format!("{name}: sbp rel {sbp:.1e}, h|grad f|/|f| {grad:.3} (<=2), h^2|lap f|/|f| {lap:.3} (<=4)"));
    }
    report(11, pass, detail.join("; "));
}

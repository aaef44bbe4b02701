//! Run specifications, table outputs and the VTK writer.

use std::fs;
use std::path::Path;

use oldroyd_core::experiments::{run, run_contraction, run_mms, run_sweep, RunSpec, SolverSpec};
use oldroyd_core::problems::manufactured_config;
use oldroyd_core::vtk::{export_vtk, to_vtk_string};
use oldroyd_core::{AaConfig, Error, Experiment, Manufactured};

/// Parsed legacy VTK unstructured grid.
struct Vtk {
    points: Vec<[f64; 3]>,
    cells: Vec<Vec<usize>>,
    cell_types: Vec<u32>,
    vectors: Vec<[f64; 3]>,
    scalars: Vec<f64>,
    tensors: Vec<[f64; 9]>,
}

fn parse_vtk(text: &str) -> Vtk {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# vtk DataFile Version 3.0"));
    let title = lines.next().expect("title line");
    assert!(title.len() <= 256);
    assert_eq!(lines.next(), Some("ASCII"));
    assert_eq!(lines.next(), Some("DATASET UNSTRUCTURED_GRID"));
    let mut tokens = lines.flat_map(str::split_whitespace).peekable();
    let mut next = || tokens.next().expect("unexpected end of file");
    let num = |s: &str| -> f64 {
        let v: f64 = s.parse().unwrap_or_else(|_| panic!("bad number {s:?}"));
        assert!(v.is_finite());
        v
    };

    assert_eq!(next(), "POINTS");
    let np: usize = next().parse().unwrap();
    assert_eq!(next(), "double");
    let points = (0..np).map(|_| [num(next()), num(next()), num(next())]).collect();

    assert_eq!(next(), "CELLS");
    let nc: usize = next().parse().unwrap();
    let total: usize = next().parse().unwrap();
    let mut cells = Vec::new();
    let mut count = 0;
    for _ in 0..nc {
        let k: usize = next().parse().unwrap();
        cells.push((0..k).map(|_| next().parse::<usize>().unwrap()).collect());
        count += k + 1;
    }
    assert_eq!(count, total);

    assert_eq!(next(), "CELL_TYPES");
    assert_eq!(next().parse::<usize>().unwrap(), nc);
    let cell_types = (0..nc).map(|_| next().parse().unwrap()).collect();

    assert_eq!(next(), "POINT_DATA");
    assert_eq!(next().parse::<usize>().unwrap(), np);
    assert_eq!((next(), next(), next()), ("VECTORS", "velocity", "double"));
    let vectors = (0..np).map(|_| [num(next()), num(next()), num(next())]).collect();
    assert_eq!((next(), next(), next(), next()), ("SCALARS", "pressure", "double", "1"));
    assert_eq!((next(), next()), ("LOOKUP_TABLE", "default"));
    let scalars = (0..np).map(|_| num(next())).collect();

    assert_eq!(next(), "CELL_DATA");
    assert_eq!(next().parse::<usize>().unwrap(), nc);
    assert_eq!((next(), next(), next()), ("TENSORS", "stress", "double"));
    let tensors = (0..nc)
        .map(|_| {
            let mut t = [0.0; 9];
            t.iter_mut().for_each(|v| *v = num(next()));
            t
        })
        .collect();
    Vtk {
        points,
        cells,
        cell_types,
        vectors,
        scalars,
        tensors,
    }
}

#[test]
fn vtk_output_is_a_well_formed_grid_with_nodal_fields() {
    let cfg = manufactured_config(4, 0.0, 0.5, AaConfig::default()).unwrap();
    let space = &cfg.space;
    let exact = Manufactured { alpha: 0.5 };
    let state = space.interpolate(
        |x| oldroyd_core::fe_space::ExactSolution::velocity(&exact, x),
        |x| oldroyd_core::fe_space::ExactSolution::stress(&exact, x),
        |x| oldroyd_core::fe_space::ExactSolution::pressure(&exact, x),
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.vtk");
    export_vtk(space, &state, &path).unwrap();
    let vtk = parse_vtk(&fs::read_to_string(&path).unwrap());

    let mesh = space.mesh();
    assert_eq!(vtk.points.len(), mesh.num_vertices());
    assert_eq!(vtk.cells.len(), mesh.num_triangles());
    assert!(vtk.cell_types.iter().all(|&t| t == 5));
    for (cell, tri) in vtk.cells.iter().zip(mesh.triangles()) {
        assert_eq!(cell.as_slice(), tri.as_slice());
    }
    for (i, (p, x)) in vtk.points.iter().zip(mesh.vertices()).enumerate() {
        assert_eq!([p[0], p[1], p[2]], [x[0], x[1], 0.0]);
        let u = oldroyd_core::fe_space::ExactSolution::velocity(&exact, *x);
        assert!((vtk.vectors[i][0] - u[0]).abs() < 1e-15 && (vtk.vectors[i][1] - u[1]).abs() < 1e-15);
        let p_exact = oldroyd_core::fe_space::ExactSolution::pressure(&exact, *x);
        assert!((vtk.scalars[i] - p_exact).abs() < 1e-15);
    }
    for t in &vtk.tensors {
        assert_eq!(t[1], t[3]);
        assert_eq!([t[2], t[5], t[6], t[7], t[8]], [0.0; 5]);
    }
}

#[test]
fn vtk_title_cannot_break_the_header() {
    let cfg = manufactured_config(1, 0.0, 0.5, AaConfig::default()).unwrap();
    let text = to_vtk_string(&cfg.space, &cfg.space.zero_state(), "two\nlines");
    parse_vtk(&text);
}

#[test]
fn export_reports_io_errors() {
    let cfg = manufactured_config(1, 0.0, 0.5, AaConfig::default()).unwrap();
    let bad = Path::new("/nonexistent-directory/for/sure/x.vtk");
    assert!(matches!(export_vtk(&cfg.space, &cfg.space.zero_state(), bad), Err(Error::Io { .. })));
}

#[test]
fn json_specs_take_experiment_defaults() {
    let spec = RunSpec::from_json(r#"{"experiment": "sweep", "lambdas": [0.0, 0.5]}"#).unwrap();
    assert_eq!(spec.experiment, Experiment::Sweep);
    assert_eq!(spec.solvers, RunSpec::defaults_for(Experiment::Sweep).solvers);
    assert_eq!(spec.lambdas, vec![0.0, 0.5]);
    let echoed = RunSpec::from_json(&spec.to_json()).unwrap();
    assert_eq!(echoed, spec);

    let mms = RunSpec::from_json(r#"{"experiment": "mms"}"#).unwrap();
    assert_eq!(mms.alpha, 0.5);
    assert_eq!(mms.sizes, vec![8, 16, 32]);
    assert_eq!(RunSpec::from_json("{}").unwrap().experiment, Experiment::Contraction);
}

#[test]
fn invalid_specs_are_rejected() {
    for text in [
        r#"{"experiment": "sweep", "lambdas": []}"#,
        r#"{"experiment": "sweep", "lambdas": [0.5, 0.1]}"#,
        r#"{"alpha": 1.0}"#,
        r#"{"lambdas": [-1.0]}"#,
        r#"{"solvers": []}"#,
        r#"{"solvers": [{"depth": 2, "beta": 0.0}]}"#,
        r#"{"nx": 7, "ny": 3}"#,
        r#"{"levels": 0}"#,
        r#"{"experiment": "mms", "sizes": [0]}"#,
        r#"{"experiment": "cylinder"}"#,
        r#"{"lamdas": [0.1]}"#,
        "not json",
    ] {
        assert!(RunSpec::from_json(text).is_err(), "{text} accepted");
    }
}

fn small_sweep(out: &Path) -> RunSpec {
    RunSpec {
        nx: 8,
        ny: 4,
        lambdas: vec![0.0, 0.2, 0.4],
        solvers: vec![SolverSpec::PICARD, SolverSpec { depth: 3, beta: 0.8 }],
        out: out.to_path_buf(),
        ..RunSpec::defaults_for(Experiment::Sweep)
    }
}

#[test]
fn sweep_tables_are_deterministic_and_backed_by_traces() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let report = run_sweep(&small_sweep(a.path())).unwrap();
    run_sweep(&small_sweep(b.path())).unwrap();
    for name in ["sweep.csv", "sweep.md"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
    assert!(report.cells.iter().flatten().all(|c| c.converged()));
    assert_eq!(report.max_convergent_lambda(&SolverSpec::PICARD), Some(0.4));
    let traces = fs::read_dir(a.path().join("traces")).unwrap().count();
    assert_eq!(traces, 6);
    let trace = fs::read_to_string(a.path().join("traces").join("sweep_l0p2_picard.csv")).unwrap();
    let cell = report.cell(1, &SolverSpec::PICARD).unwrap();
    assert_eq!(trace.lines().count(), cell.iterations + 1);
    assert!(trace.starts_with("k,res_inf,res_l2,theta,restart,ms"));

    let echoed = fs::read_to_string(a.path().join("runspec.json")).unwrap();
    assert_eq!(RunSpec::from_json(&echoed).unwrap().lambdas, vec![0.0, 0.2, 0.4]);
    let md = fs::read_to_string(a.path().join("sweep.md")).unwrap();
    assert!(md.contains("| lambda | Picard | AA m=3 beta=0.8 |"));
    assert!(md.contains("warm-started"));
}

#[test]
fn cold_and_warm_sweeps_are_labelled() {
    let dir = tempfile::tempdir().unwrap();
    let spec = RunSpec {
        warm_start: false,
        lambdas: vec![0.1],
        ..small_sweep(dir.path())
    };
    let md = run(&spec).unwrap();
    assert!(md.contains("cold start"));
}

#[test]
fn manufactured_study_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let spec = RunSpec {
        sizes: vec![4, 8],
        lambdas: vec![0.0],
        out: dir.path().to_path_buf(),
        ..RunSpec::defaults_for(Experiment::Mms)
    };
    let report = run_mms(&spec).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert!(report.rows[0].orders.is_none());
    let orders = report.rows[1].orders.unwrap();
    assert!(orders[0] > 2.0 && orders[1] > 1.0 && orders[2] > 1.0, "{orders:?}");
    let csv = fs::read_to_string(dir.path().join("mms.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn contraction_writes_norms_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let spec = RunSpec {
        nx: 8,
        ny: 4,
        levels: 2,
        lambdas: vec![0.3],
        solvers: vec![SolverSpec::PICARD, SolverSpec { depth: 5, beta: 0.5 }],
        out: dir.path().to_path_buf(),
        ..RunSpec::defaults_for(Experiment::Contraction)
    };
    let report = run_contraction(&spec).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!((report.rows[1].nx, report.rows[1].ny), (16, 8));
    assert_eq!((report.rows[0].dx, report.rows[0].dy), (1.0, 0.25));
    for row in &report.rows {
        for c in &row.results {
            assert!(c.cell.converged());
            let n = c.norms.unwrap();
            assert!(n.h1_u() > n.h1_semi_u && n.l2_u > 0.0);
        }
    }
    let fields = fs::read_dir(dir.path().join("fields")).unwrap().count();
    assert_eq!(fields, 4);
    let csv = fs::read_to_string(dir.path().join("contraction.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

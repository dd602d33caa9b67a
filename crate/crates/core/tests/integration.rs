use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wenods::cnn::{multipliers_for_direction, ArchSpec, ArchTag, CnnModel, MultiplierRequest};
use wenods::fileio::{self, DatasetManifest, GridFile, ProblemEntry, SnapshotEntry};
use wenods::grid::{restrict_nodes, Boundary};
use wenods::metrics::{compare_table, euler_l1, l1_by_variable, primitive_planes};
use wenods::riemann::builtin_ic;
use wenods::solver::{make_reference, SchemeConfig, SnapshotPolicy, Solver};
use wenods::weno::{reconstruct_half, reconstruct_interface, Scheme, SplitSign, WeightKind};
use wenods::{Axis, GasModel, PrimitiveState};

#[test]
fn smooth_reconstruction_is_fifth_order() {
    // Point values of sin are cell averages of this h, so the interface
    // flux should approximate h(x_{i+1/2}).
    let mut errors = Vec::new();
    for n in [20usize, 40, 80] {
        let dx = 1.0 / n as f64;
        let scale = PI * dx / (PI * dx).sin();
        let f = |i: isize| (2.0 * PI * i as f64 * dx).sin();
        let mut sum = 0.0;
        for i in 0..n as isize {
            let stencil: [f64; 5] = std::array::from_fn(|s| f(i - 2 + s as isize));
            let got = reconstruct_half(&stencil, SplitSign::Plus, WeightKind::Z, 1e-6, None);
            let exact = scale * (2.0 * PI * (i as f64 + 0.5) * dx).sin();
            sum += (got - exact).abs();
        }
        errors.push(sum / n as f64);
    }
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 4.5, "order {order}, errors {errors:?}");
    }
}

#[test]
fn periodic_line_telescopes_for_every_scheme() {
    let n = 40;
    let line: Vec<f64> = (0..n).map(|i| if i < 15 { 1.0 } else { 0.2 + 0.1 * (i as f64).sin() }).collect();
    let d: Vec<f64> = (0..n).map(|i| 0.5 + 0.3 * (0.7 * i as f64).cos()).collect();
    let at = |v: &[f64], i: isize| v[i.rem_euclid(n as isize) as usize];
    for scheme in [Scheme::Js, Scheme::Z, Scheme::DsJs, Scheme::DsZ] {
        let flux = |i: isize| {
            let plus: [f64; 5] = std::array::from_fn(|s| at(&line, i - 2 + s as isize));
            let minus: [f64; 5] = std::array::from_fn(|s| -0.5 * at(&line, i - 1 + s as isize));
            let ds = wenods::weno::DsWindows {
                plus: std::array::from_fn(|m| at(&d, i + m as isize - 1)),
                minus: std::array::from_fn(|m| at(&d, i + 2 - m as isize)),
                c: 0.1,
            };
            reconstruct_interface(&plus, &minus, scheme, 1e-6, Some(&ds)).unwrap()
        };
        let total: f64 = (0..n as isize).map(|i| flux(i) - flux(i - 1)).sum();
        assert!(total.abs() < 1e-12, "{scheme}: {total}");
    }
}

#[test]
fn constant_state_gives_constant_multipliers() {
    let model = CnnModel::random(&ArchSpec::default_for(ArchTag::B), &mut ChaCha8Rng::seed_from_u64(4), 0.5).unwrap();
    let gas = GasModel::default();
    let cfg = SchemeConfig::with_scheme(Scheme::DsZ);
    let solver = Solver::new(cfg, gas, Some(model.clone())).unwrap();
    let mut grid = solver.grid_from_fn(10, 8, |_, _| PrimitiveState::new(1.2, 0.3, -0.1, 0.8)).unwrap();
    grid.fill_ghosts(Boundary::ZeroGradient);
    for axis in [Axis::X, Axis::Y] {
        for sign in [SplitSign::Plus, SplitSign::Minus] {
            let fields = multipliers_for_direction(&grid, axis, sign, &model, &gas, 2.0).unwrap();
            for line in &fields {
                for channel in line {
                    assert_eq!(channel.len(), if axis == Axis::X { 10 } else { 8 } + 4);
                    let first = channel.values[0];
                    assert!(first > 0.0);
                    assert!(channel.values.iter().all(|&v| v == first));
                }
            }
        }
    }
}

#[test]
fn multipliers_shift_with_the_input() {
    let model = CnnModel::random(&ArchSpec::default_for(ArchTag::C), &mut ChaCha8Rng::seed_from_u64(8), 1.0).unwrap();
    let line: Vec<[f64; 4]> = (0..30).map(|p| std::array::from_fn(|c| ((p * 7 + c * 3) % 11) as f64 / 5.0)).collect();
    let a = model.forward(&MultiplierRequest::padded(line[..29].to_vec(), model.k).unwrap()).unwrap();
    let b = model.forward(&MultiplierRequest::padded(line[1..].to_vec(), model.k).unwrap()).unwrap();
    for c in 0..4 {
        assert_eq!(a[c].values[1..], b[c].values[..b[c].len() - 1]);
    }
}

#[test]
fn reference_runs_are_deterministic_and_aligned() {
    let mut spec = builtin_ic("config3").unwrap();
    spec.t_final = 0.05;
    let collect = || {
        let mut snaps = Vec::new();
        make_reference(&spec, 40, SnapshotPolicy::EveryNSteps(3), &mut |s| {
            snaps.push(s);
            Ok(())
        })
        .unwrap();
        snaps
    };
    let (a, b) = (collect(), collect());
    assert_eq!(a, b);
    assert_eq!(a.last().unwrap().time, 0.05);

    let fine = &a.last().unwrap().field;
    let coarse = fine.restrict(10, 10).unwrap();
    for j in 0..10 {
        for i in 0..10 {
            assert_eq!(coarse.get(i, j), fine.get(4 * i, 4 * j));
        }
    }
    let xy: Vec<f64> = (0..400).map(|k| ((k % 20) + (k / 20)) as f64 / 20.0).collect();
    let r = restrict_nodes(&xy, 20, 20, 5, 5).unwrap();
    assert!(r.iter().enumerate().all(|(k, v)| *v == ((k % 5) + (k / 5)) as f64 / 5.0));
}

#[test]
fn self_comparison_has_unit_ratios() {
    let mut spec = builtin_ic("config2").unwrap();
    spec.t_final = 0.05;
    let gas = GasModel::default();
    let reference = make_reference(&spec, 80, SnapshotPolicy::FinalOnly, &mut |_| Ok(())).unwrap();
    let z = Solver::new(SchemeConfig::default(), gas, None).unwrap();
    let z2 = Solver::new(SchemeConfig::default(), gas, None).unwrap();
    let rows = compare_table(&spec, &[(20, 20), (40, 40)], &z, &z2, &reference.final_field).unwrap();
    for row in &rows {
        assert_eq!(row.ratio_rounded().to_array(), [1.0; 4]);
        assert_eq!(row.baseline.l1, row.candidate.l1);
    }
    assert!(rows[1].baseline.l1.rho < rows[0].baseline.l1.rho);
    let text = wenods::metrics::format_table(&rows);
    assert_eq!(text.lines().count(), 1 + 4 * rows.len());
}

#[test]
fn euler_l1_is_sum_of_components() {
    let spec = builtin_ic("config16").unwrap();
    let gas = GasModel::default();
    let solver = Solver::new(SchemeConfig::default(), gas, None).unwrap();
    let mut short = spec.clone();
    short.t_final = 0.02;
    let a = solver.solve(&short, 16, 16).unwrap().final_field;
    let b = solver.initial_grid(&spec, 16, 16).unwrap().to_state_field();
    let parts = l1_by_variable(&primitive_planes(&a, &gas).unwrap(), &primitive_planes(&b, &gas).unwrap()).unwrap();
    let total = euler_l1(&a, &b, &gas).unwrap();
    assert!((total - (parts.rho + parts.u + parts.v + parts.p)).abs() < 1e-15);
    assert!(total > 0.0);
}

#[test]
fn field_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = builtin_ic("config19").unwrap();
    let gas = GasModel::default();
    let field = Solver::new(SchemeConfig::default(), gas, None)
        .unwrap()
        .initial_grid(&spec, 12, 9)
        .unwrap()
        .to_state_field();
    let paths = fileio::write_primitive_dir(dir.path(), &field, &gas).unwrap();
    assert_eq!(paths.len(), 4);
    let (nx, ny, planes) = fileio::read_primitive_dir(dir.path()).unwrap();
    assert_eq!((nx, ny), (12, 9));
    assert_eq!(planes, primitive_planes(&field, &gas).unwrap());

    let snap = dir.path().join("s.f64grid");
    GridFile::from_state_field(&field).write(&snap).unwrap();
    assert_eq!(GridFile::read(&snap).unwrap().to_state_field().unwrap(), field);

    let manifest = DatasetManifest {
        config: 3,
        seed: 7,
        count: 1,
        fine_grid: 12,
        problems: vec![ProblemEntry {
            index: 0,
            spec: builtin_ic("config3").unwrap(),
            fine_grid: 12,
            steps: 0,
            snapshots: vec![SnapshotEntry {
                step: 0,
                time: 0.0,
                file: "s.f64grid".into(),
            }],
        }],
    };
    let mpath = dir.path().join("manifest.json");
    manifest.save(&mpath).unwrap();
    assert_eq!(DatasetManifest::load(&mpath).unwrap(), manifest);
}

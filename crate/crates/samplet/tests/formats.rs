use samplet::bench::uniform_cloud;
use samplet::config::{RunConfig, SolverChoice};
use samplet::io::{parse_labeled_csv, read_labeled_csv, write_labeled_csv};
use samplet::opfile::{read_operator, write_matrix_market, write_operator};
use samplet::Error;
use samplet_core::{build_cluster_tree, compress, CompressedOperator, KernelSpec, SampletBasis};

#[test]
fn labeled_csv_basics() {
    let d = parse_labeled_csv("0,0,1\n1,1,-1\n".as_bytes()).unwrap();
    assert_eq!(d.cloud.len(), 2);
    assert_eq!(d.cloud.dim(), 2);
    assert_eq!(d.values, vec![1.0, -1.0]);

    let d = parse_labeled_csv("x,y,value\n0.5, 2 ,3\n".as_bytes()).unwrap();
    assert_eq!(d.cloud.point(0), &[0.5, 2.0]);
    assert_eq!(d.values, vec![3.0]);
}

#[test]
fn labeled_csv_errors_name_the_cell() {
    match parse_labeled_csv("0,0,1\n1,1\n".as_bytes()) {
        Err(Error::RaggedRow { row: 2, expected: 3, found: 2 }) => {}
        other => panic!("{other:?}"),
    }
    match parse_labeled_csv("0,0,1\n1,abc,2\n".as_bytes()) {
        Err(Error::BadCell { row: 2, column: 2, text }) => assert_eq!(text, "abc"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_labeled_csv("x,y\n".as_bytes()), Err(Error::NoData)));
    assert!(matches!(parse_labeled_csv("1\n2\n".as_bytes()), Err(Error::RaggedRow { .. })));
    assert!(parse_labeled_csv("0,nan,1\n".as_bytes()).is_err());
}

#[test]
fn rescale_maps_to_unit_box() {
    let cloud = uniform_cloud(500, 2, 3).unwrap();
    let r = cloud.rescaled_to_unit_box();
    let b = r.bbox();
    for k in 0..2 {
        assert!(b.min[k].abs() < 1e-15);
        assert!((b.max[k] - 1.0).abs() < 1e-15);
    }
}

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = uniform_cloud(10_000, 3, 9).unwrap();
    let values: Vec<f64> = cloud.points().map(|p| (p[0] * 1e3).sin() / 7.0 + p[2] * 1e-9).collect();
    let path = dir.path().join("d.csv");
    write_labeled_csv(&path, &cloud, &values).unwrap();
    let back = read_labeled_csv(&path).unwrap();
    assert_eq!(back.cloud, cloud);
    assert_eq!(back.values, values);
}

fn sample_operator() -> CompressedOperator {
    let cloud = uniform_cloud(200, 2, 1).unwrap();
    let basis = SampletBasis::new(build_cluster_tree(&cloud, 12).unwrap(), &cloud, 2).unwrap();
    compress(&basis, &KernelSpec::matern32(0.3).unwrap(), &cloud, 1e-4).unwrap()
}

#[test]
fn operator_binary_round_trip() {
    let op = sample_operator();
    let mut buf = Vec::new();
    write_operator(&mut buf, &op).unwrap();
    assert_eq!(&buf[..5], b"SMPK1");
    assert_eq!(buf.len(), 5 + 6 * 8 + (op.n_rows() + 1) * 8 + op.nnz() * 16);
    let back = read_operator(&mut buf.as_slice()).unwrap();
    assert_eq!(back, op);

    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(matches!(read_operator(&mut bad.as_slice()), Err(Error::OperatorFormat(_))));
    assert!(matches!(read_operator(&mut &buf[..buf.len() - 3]), Err(Error::OperatorFormat(_))));
    let mut long = buf.clone();
    long.push(0);
    assert!(read_operator(&mut long.as_slice()).is_err());
}

#[test]
fn matrix_market_lists_every_entry() {
    let op = sample_operator();
    let mut buf = Vec::new();
    write_matrix_market(&mut buf, &op).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('%'));
    let dims: Vec<usize> = lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
    assert_eq!(dims, vec![200, 200, op.nnz()]);
    let dense = op.to_dense();
    let mut count = 0;
    for l in lines {
        let t: Vec<&str> = l.split(' ').collect();
        let (i, j): (usize, usize) = (t[0].parse().unwrap(), t[1].parse().unwrap());
        let v: f64 = t[2].parse().unwrap();
        assert_eq!(v, dense[(i - 1, j - 1)]);
        count += 1;
    }
    assert_eq!(count, op.nnz());
}

#[test]
fn config_text_round_trips() {
    let text = "\
# two kernels
q = 2
tau = 1e-5
weight = 3e-4
solver = mrfista
gamma = 0.5
rescale = true
kernel.0.family = tensor
kernel.0.factor.0.family = matern32
kernel.0.factor.0.length = 0.2
kernel.0.factor.0.dims = 0..2
kernel.0.factor.1.family = periodic
kernel.0.factor.1.length = 0.2
kernel.0.factor.1.dims = 2..3
kernel.1.family = exponential
kernel.1.length = 0.01
";
    let mut cfg = RunConfig::default();
    cfg.apply_text(text).unwrap();
    assert_eq!(cfg.q, 2);
    assert_eq!(cfg.solver, Some(SolverChoice::Mrfista));
    assert_eq!(cfg.gamma, Some(0.5));
    assert_eq!(cfg.kernels.len(), 2);
    let specs = cfg.kernel_specs().unwrap();
    specs[0].check_dim(3).unwrap();
    let x = [0.1, 0.2, 0.3];
    let y = [0.3, -0.1, 1.3];
    let r = ((0.2f64).powi(2) + (0.3f64).powi(2)).sqrt();
    let s = 3f64.sqrt() * r / 0.2;
    let want = (1.0 + s) * (-s).exp() * (-2.0 * (std::f64::consts::PI).sin().powi(2) / 0.04).exp();
    assert!((specs[0].eval(&x, &y).unwrap() - want).abs() < 1e-14);

    let mut again = RunConfig::default();
    again.apply_text(&cfg.to_text()).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn config_errors_carry_line_numbers() {
    let mut cfg = RunConfig::default();
    match cfg.apply_text("q = 2\nnot a pair\n") {
        Err(Error::Config { line: 2, .. }) => {}
        other => panic!("{other:?}"),
    }
    match cfg.apply_text("\nq = two\n") {
        Err(Error::Config { line: 2, .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(cfg.apply_text("bogus = 1\n").is_err());
    assert!(cfg.apply_text("kernel.0.factor.0.dims = 3\n").is_err());
    let mut cfg = RunConfig::default();
    cfg.apply_text("kernel.0.family = nope\n").unwrap();
    assert!(cfg.kernel_specs().is_err());
}

#[test]
fn fit_dispatch_rule() {
    let mut cfg = RunConfig::default();
    assert_eq!(cfg.resolved_solver(), SolverChoice::Ridge);
    cfg.lambda = Some(0.1);
    cfg.weight = Some(0.0);
    assert_eq!(cfg.resolved_solver(), SolverChoice::Ridge);
    cfg.weight = Some(1e-3);
    assert_eq!(cfg.resolved_solver(), SolverChoice::Mrssn);
    cfg.solver = Some(SolverChoice::Fista);
    assert_eq!(cfg.resolved_solver(), SolverChoice::Fista);
}

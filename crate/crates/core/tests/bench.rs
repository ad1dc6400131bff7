use std::collections::BTreeMap;
use std::path::PathBuf;

use ssvrptw::bench::experiment::{profiles_from_rows, read_rows, write_rows, write_summary};
use ssvrptw::bench::{
    generate_instance, run_experiment, write_profiles_csv, ExperimentSpec, GeneratorConfig, ResultRow, ENGINE_VERSION,
};
use ssvrptw::model::io::{
    instance_from_str, instance_to_string, read_instance, read_solution, solution_from_str, solution_to_string,
    write_instance, write_solution,
};
use ssvrptw::search::{Budget, EvalMode};

fn config(seed: u64) -> GeneratorConfig {
    GeneratorConfig {
        customers: 8,
        waiting: Some(4),
        seed,
        capacity: Some(4),
        ..GeneratorConfig::default()
    }
}

#[test]
fn generation_is_deterministic() {
    let a = instance_to_string(&generate_instance(&config(3)).unwrap());
    let b = instance_to_string(&generate_instance(&config(3)).unwrap());
    assert_eq!(a, b);
    let c = instance_to_string(&generate_instance(&config(4)).unwrap());
    assert_ne!(a, c);
}

#[test]
fn waiting_at_customers_keeps_the_requests() {
    let separated = generate_instance(&config(9)).unwrap();
    let merged = generate_instance(&GeneratorConfig {
        waiting: None,
        ..config(9)
    })
    .unwrap();
    assert_eq!(merged.waiting_count(), merged.customer_count());
    let key = |inst: &ssvrptw::model::Instance| {
        let m = inst.waiting_count();
        inst.requests()
            .iter()
            .map(|r| {
                (
                    r.customer - m,
                    r.reveal,
                    r.tw_start,
                    r.tw_end,
                    r.demand,
                    r.probability.to_bits(),
                )
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(key(&separated), key(&merged));
    // customer-to-customer travel is the same too
    let (ms, mm) = (separated.waiting_count(), merged.waiting_count());
    for i in 1..=8 {
        for j in 1..=8 {
            assert_eq!(separated.travel(ms + i, ms + j), merged.travel(mm + i, mm + j));
        }
    }
}

#[test]
fn generated_probabilities_are_plausible() {
    for seed in 0..10 {
        let inst = generate_instance(&config(seed)).unwrap();
        let mut per_customer = vec![0.0; inst.vertex_count()];
        for r in inst.requests() {
            assert!(r.probability > 0.0 && r.probability <= 1.0);
            assert!(r.tw_start <= r.tw_end && r.tw_end <= inst.horizon());
            assert_eq!(r.reveal % 5, 0);
            per_customer[r.customer] += r.probability;
        }
        // two modes of at most one expected request each
        assert!(per_customer.iter().all(|&s| s <= 2.0 + 1e-9));
    }
}

fn row(instance: &str, method: &str, cost: Option<f64>) -> ResultRow {
    ResultRow {
        instance: instance.into(),
        method: method.into(),
        seed: 0,
        cost,
        e_rq: cost,
        e_rqplus: cost,
        ws_mean: Some(4.0),
        ws_stderr: Some(0.1),
        gain: cost.and_then(|c| ssvrptw::bench::gain(c, 4.0)),
        feasible: Some(true),
        proven: None,
        iterations: Some(10),
        wall_time: 0.5,
        engine_version: ENGINE_VERSION.into(),
        params: BTreeMap::new(),
        error: cost.is_none().then(|| "failed".to_string()),
    }
}

#[test]
fn profiles_from_hand_rows() {
    let costs = [
        ("a", [Some(1.0), Some(2.0), Some(4.0), Some(1.0)]),
        ("b", [Some(2.0), Some(2.0), Some(2.0), Some(2.0)]),
        ("c", [Some(1.0), None, Some(8.0), Some(3.0)]),
    ];
    let rows: Vec<ResultRow> = costs
        .iter()
        .flat_map(|(m, cs)| cs.iter().enumerate().map(move |(i, &c)| row(&format!("i{i}"), m, c)))
        .collect();
    let profiles = profiles_from_rows(&rows).unwrap();
    let points: Vec<Vec<(f64, f64)>> = profiles.iter().map(|p| p.points.clone()).collect();
    assert_eq!(
        points,
        vec![
            vec![(1.0, 0.75), (2.0, 1.0)],
            vec![(1.0, 0.5), (2.0, 1.0)],
            vec![(1.0, 0.25), (3.0, 0.5), (4.0, 0.75)],
        ]
    );
    assert_eq!(profiles[2].fraction_at(100.0), 0.75);
    let mut csv = Vec::new();
    write_profiles_csv(&profiles, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert!(csv.starts_with("method,x,y\na,1,0.75\n"));

    let mut summary = Vec::new();
    write_summary(&rows, &mut summary).unwrap();
    let summary = String::from_utf8(summary).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "instance,ws_mean,a_cost,a_gain,b_cost,b_gain,c_cost,c_gain");
    assert_eq!(lines[2], "i1,4.000,2.000,50.000,2.000,50.000,NA,NA");
}

#[test]
fn rows_round_trip_through_jsonl() {
    let rows = vec![row("x", "a", Some(1.5)), row("x", "b", None)];
    let mut out = Vec::new();
    write_rows(&rows, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(read_rows(&text).unwrap(), rows);
}

fn write_instances(dir: &std::path::Path, seeds: &[u64]) -> Vec<PathBuf> {
    seeds
        .iter()
        .map(|&s| {
            let name = PathBuf::from(format!("inst{s}.json"));
            write_instance(dir.join(&name), &generate_instance(&config(s)).unwrap()).unwrap();
            name
        })
        .collect()
}

fn spec(instances: Vec<PathBuf>, methods: &[&str], seeds: Vec<u64>) -> ExperimentSpec {
    ExperimentSpec {
        instances,
        methods: methods.iter().map(|m| m.to_string()).collect(),
        seeds,
        budget: Budget::Iterations(300),
        eval: EvalMode::Hybrid,
        mc_samples: 2000,
    }
}

#[test]
fn experiment_rows_are_complete_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_instances(dir.path(), &[1]);
    assert!(run_experiment(&spec(files.clone(), &[], vec![1, 2]), dir.path()).is_empty());

    let s = spec(files, &["a-star-b10"], vec![1, 2]);
    let rows = run_experiment(&s, dir.path());
    assert_eq!(rows.len(), 2);
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![1, 2]);
    for r in &rows {
        assert!(r.error.is_none(), "{:?}", r.error);
        assert_eq!(r.cost, r.e_rqplus);
        assert_eq!(r.engine_version, ENGINE_VERSION);
        assert_eq!(r.params["eval"], "hybrid");
        assert!(r.ws_mean.is_some() && r.gain.is_some());
    }
    let strip = |mut rows: Vec<ResultRow>| {
        rows.iter_mut().for_each(|r| r.wall_time = 0.0);
        rows
    };
    assert_eq!(strip(rows), strip(run_experiment(&s, dir.path())));
}

#[test]
fn experiment_records_failures() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = write_instances(dir.path(), &[2]);
    files.push(PathBuf::from("missing.json"));
    let rows = run_experiment(&spec(files, &["a1-b-star", "no-such-method"], vec![7]), dir.path());
    assert_eq!(rows.len(), 4);
    let failed: Vec<(&str, &str)> = rows
        .iter()
        .filter(|r| r.error.is_some())
        .map(|r| (r.instance.as_str(), r.method.as_str()))
        .collect();
    assert_eq!(
        failed,
        vec![
            ("inst2.json", "no-such-method"),
            ("missing.json", "a1-b-star"),
            ("missing.json", "no-such-method")
        ]
    );
    assert!(rows.iter().filter(|r| r.error.is_some()).all(|r| r.cost.is_none()));
}

#[test]
fn instances_and_solutions_round_trip() {
    let inst = generate_instance(&config(5)).unwrap();
    let text = instance_to_string(&inst);
    assert_eq!(instance_from_str(&text).unwrap(), inst);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json");
    write_instance(&path, &inst).unwrap();
    assert_eq!(read_instance(&path).unwrap(), inst);

    let mut sol = ssvrptw::model::FirstStageSolution::empty(2);
    sol.routes[0] = vec![2, 1];
    sol.wait.insert(1, 30);
    sol.wait.insert(2, 45);
    assert_eq!(solution_from_str(&solution_to_string(&sol)).unwrap(), sol);
    let path = dir.path().join("s.json");
    write_solution(&path, &sol).unwrap();
    assert_eq!(read_solution(&path).unwrap(), sol);
    assert!(instance_from_str("{").is_err());
}

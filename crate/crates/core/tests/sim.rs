mod common;

use common::{instance, req, solution};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssvrptw::bench::random::{micro_instance, random_solution, MicroConfig};
use ssvrptw::expectation::{brute_force_expected_cost, ENUMERATION_BUDGET};
use ssvrptw::model::{Capacity, Instance, Plan, Strategy};
use ssvrptw::sim::{
    monte_carlo, sample_indexed, simulate, simulate_wait_and_serve, Disposition, EventKind, Policy, RejectReason,
    Scenario, SimOutcome, TraceEvent,
};

fn flat(m: usize, n: usize, h: i64, fleet: usize, requests: Vec<ssvrptw::model::PotentialRequest>) -> Instance {
    instance(m, n, h, fleet, Capacity::Bounded(3), |_, _| 3, requests)
}

fn kinds(events: &[TraceEvent]) -> Vec<(EventKind, i64, i64, usize)> {
    events.iter().map(|e| (e.kind, e.start, e.end, e.vertex)).collect()
}

#[test]
fn empty_scenario_is_the_planned_tour() {
    let inst = flat(1, 2, 40, 1, vec![req(2, 10, 20, 0.5)]);
    let sol = solution(&[&[(1, 30)]]);
    for strategy in Strategy::ALL {
        let plan = Plan::new(strategy, &inst, &sol).unwrap();
        let out = simulate(&plan, &Scenario::empty(1)).unwrap();
        assert!(out.accepted.is_empty());
        assert_eq!(out.rejected_count, 0);
        assert_eq!(
            kinds(&out.trace[0]),
            vec![
                (EventKind::Travel, 1, 4, 1),
                (EventKind::Wait, 4, 34, 1),
                (EventKind::Travel, 34, 37, 0)
            ]
        );
    }
}

#[test]
fn single_request_is_served_on_time() {
    let inst = flat(1, 2, 40, 1, vec![req(2, 10, 20, 1.0)]);
    let sol = solution(&[&[(1, 30)]]);
    for strategy in Strategy::ALL {
        let plan = Plan::new(strategy, &inst, &sol).unwrap();
        let out = simulate(&plan, &Scenario::from_ids(1, [0])).unwrap();
        assert_eq!(out.accepted, vec![0]);
        assert_eq!(
            out.dispositions[0],
            Disposition::Accepted {
                vehicle: 0,
                from: 1,
                departure: 10
            }
        );
        // leaves at max(t_min, on_lo) = 10, arrives 13
        let mut expected = vec![
            (EventKind::Travel, 1, 4, 1),
            (EventKind::Wait, 4, 10, 1),
            (EventKind::Travel, 10, 13, 2),
            (EventKind::Serve, 13, 14, 2),
        ];
        match strategy {
            Strategy::Rq => expected.extend([(EventKind::Travel, 14, 17, 1), (EventKind::Wait, 17, 34, 1)]),
            // nothing else to wait for: it stays at the customer
            Strategy::RqPlus => expected.push((EventKind::Wait, 14, 34, 2)),
        }
        expected.push((EventKind::Travel, 34, 37, 0));
        assert_eq!(kinds(&out.trace[0]), expected);
    }
}

#[test]
fn unassigned_request_is_rejected() {
    // window closes before the vehicle could get there
    let inst = flat(1, 2, 40, 1, vec![req(2, 5, 5, 1.0)]);
    let sol = solution(&[&[(1, 30)]]);
    let plan = Plan::new(Strategy::Rq, &inst, &sol).unwrap();
    let out = simulate(&plan, &Scenario::from_ids(1, [0])).unwrap();
    assert_eq!(out.dispositions[0], Disposition::Rejected(RejectReason::Unassigned));
    assert_eq!(out.rejected_count, 1);
}

#[test]
fn scenario_size_is_checked() {
    let inst = flat(1, 2, 40, 1, vec![req(2, 10, 20, 1.0)]);
    let sol = solution(&[&[(1, 30)]]);
    let plan = Plan::new(Strategy::Rq, &inst, &sol).unwrap();
    assert!(simulate(&plan, &Scenario::empty(3)).is_err());
}

#[test]
fn wait_and_serve_examples() {
    let inst = flat(1, 2, 40, 1, vec![req(2, 5, 20, 1.0)]);
    assert_eq!(
        simulate_wait_and_serve(&inst, &Scenario::empty(1))
            .unwrap()
            .rejected_count,
        0
    );
    let out = simulate_wait_and_serve(&inst, &Scenario::from_ids(1, [0])).unwrap();
    assert_eq!(out.accepted, vec![0]);

    // two simultaneous requests, one vehicle, windows too tight to chain
    let inst = flat(1, 2, 40, 1, vec![req(2, 5, 10, 1.0), req(3, 5, 10, 1.0)]);
    let out = simulate_wait_and_serve(&inst, &Scenario::from_ids(2, [0, 1])).unwrap();
    assert_eq!(out.accepted, vec![0]);
    assert_eq!(out.dispositions[1], Disposition::Rejected(RejectReason::NoVehicle));
}

#[test]
fn wait_and_serve_prefers_the_closest_vehicle() {
    // vehicle 0 ends at customer 2, which is next to customer 3
    let travel = |i: usize, j: usize| if (i, j) == (2, 3) || (i, j) == (3, 2) { 1 } else { 4 };
    let inst = instance(
        1,
        2,
        60,
        2,
        Capacity::Bounded(3),
        travel,
        vec![req(2, 2, 20, 1.0), req(3, 10, 30, 1.0)],
    );
    let out = simulate_wait_and_serve(&inst, &Scenario::from_ids(2, [0, 1])).unwrap();
    let vehicles: Vec<usize> = out
        .dispositions
        .iter()
        .map(|d| match d {
            Disposition::Accepted { vehicle, .. } => *vehicle,
            other => panic!("{other:?}"),
        })
        .collect();
    assert_eq!(vehicles, vec![0, 0]);
}

#[test]
fn scenario_sampling_extremes_and_concentration() {
    let zero = flat(1, 2, 40, 1, vec![req(2, 5, 20, 0.0), req(3, 6, 20, 0.0)]);
    let one = flat(1, 2, 40, 1, vec![req(2, 5, 20, 1.0), req(3, 6, 20, 1.0)]);
    for i in 0..100 {
        assert!(sample_indexed(&zero, 7, i).ids().next().is_none());
        assert_eq!(sample_indexed(&one, 7, i).ids().count(), 2);
    }
    let half = flat(1, 20, 40, 1, (0..20).map(|c| req(2 + c, 5, 20, 0.5)).collect());
    let n = 100_000u64;
    let total: usize = (0..n).map(|i| sample_indexed(&half, 42, i).ids().count()).sum();
    let mean = total as f64 / n as f64;
    assert!((mean - 10.0).abs() < 0.1, "{mean}");
}

#[test]
fn monte_carlo_on_deterministic_and_single_samples() {
    let inst = flat(
        1,
        2,
        40,
        1,
        vec![req(2, 5, 7, 1.0), req(3, 6, 20, 1.0), req(2, 30, 35, 0.0)],
    );
    let sol = solution(&[&[(1, 30)]]);
    let plan = Plan::new(Strategy::Rq, &inst, &sol).unwrap();
    let single = simulate(&plan, &Scenario::from_ids(3, [0, 1])).unwrap().rejected_count as f64;
    let est = monte_carlo(Policy::Recourse(&plan), &inst, 1000, 3);
    assert_eq!((est.mean, est.std_error), (single, 0.0));
    let inst = flat(1, 2, 40, 1, vec![req(2, 5, 20, 0.5)]);
    let plan = Plan::new(Strategy::Rq, &inst, &sol).unwrap();
    let est = monte_carlo(Policy::Recourse(&plan), &inst, 1, 9);
    assert_eq!(est.std_error, 0.0);
    assert_eq!(est.n_samples, 1);
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cfg = MicroConfig::default();
    for _ in 0..5 {
        let inst = micro_instance(&mut rng, &cfg);
        let sol = random_solution(&mut rng, &inst);
        for strategy in Strategy::ALL {
            let plan = Plan::new(strategy, &inst, &sol).unwrap();
            let exact = brute_force_expected_cost::<f64>(&plan, ENUMERATION_BUDGET)
                .unwrap()
                .total;
            let est = monte_carlo(Policy::Recourse(&plan), &inst, 100_000, 5);
            assert!(
                (est.mean - exact).abs() <= 4.0 * est.std_error + 1e-12,
                "{strategy}: {} vs {exact} ± {}",
                est.mean,
                est.std_error
            );
        }
    }
}

/// Physical consistency of a replay.
fn check_outcome(
    inst: &Instance,
    scenario: &Scenario,
    out: &SimOutcome,
    horizon_ok: bool,
) -> Result<(), TestCaseError> {
    let q = match inst.capacity() {
        Capacity::Bounded(q) => q as u64,
        Capacity::Unbounded => u64::MAX,
    };
    for &r in &out.accepted {
        prop_assert!(scenario.is_revealed(r));
    }
    prop_assert_eq!(out.revealed, scenario.ids().count());
    prop_assert_eq!(out.rejected_count, out.revealed - out.accepted.len());
    for (k, events) in out.trace.iter().enumerate() {
        let mut load = 0u64;
        for pair in events.windows(2) {
            prop_assert!(pair[0].end <= pair[1].start, "vehicle {k}: {:?}", pair);
        }
        for e in events {
            prop_assert!(e.start <= e.end);
            if e.kind == EventKind::Travel {
                prop_assert_eq!(e.end - e.start, inst.travel(e.from, e.vertex));
            }
            if let (EventKind::Serve, Some(r)) = (e.kind, e.request) {
                let req = inst.request(r);
                prop_assert!(out.is_accepted(r));
                prop_assert_eq!(e.vertex, req.customer);
                prop_assert!(
                    req.tw_start <= e.start && e.start <= req.tw_end,
                    "request {r} at {}",
                    e.start
                );
                prop_assert_eq!(e.end - e.start, req.service);
                load += req.demand as u64;
                prop_assert!(load <= q);
            }
        }
        if horizon_ok {
            if let Some(last) = events.last() {
                prop_assert!(last.end <= inst.horizon());
                prop_assert_eq!(last.vertex, 0);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn replays_are_physically_consistent(seed in any::<u64>(), scenario_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = micro_instance(&mut rng, &MicroConfig::default());
        let sol = random_solution(&mut rng, &inst);
        let scenario = sample_indexed(&inst, scenario_seed, 0);
        for strategy in Strategy::ALL {
            let plan = Plan::new(strategy, &inst, &sol).unwrap();
            let out = simulate(&plan, &scenario).unwrap();
            check_outcome(&inst, &scenario, &out, plan.schedule.is_feasible())?;
            prop_assert_eq!(&out, &simulate(&plan, &scenario).unwrap());
            for events in &out.trace {
                for pair in events.windows(2) {
                    let (a, b) = (&pair[0], &pair[1]);
                    if b.kind == EventKind::Serve && a.kind == EventKind::Travel {
                        let from_customer = !inst.is_waiting_vertex(a.from) && a.from != 0;
                        if strategy == Strategy::Rq {
                            prop_assert!(!from_customer, "round trips only: {:?}", a);
                        }
                    }
                }
            }
        }
        let ws = simulate_wait_and_serve(&inst, &scenario).unwrap();
        check_outcome(&inst, &scenario, &ws, true)?;
    }
}

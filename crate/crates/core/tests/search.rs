mod common;

use std::time::Duration;

use common::{instance, req, solution};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssvrptw::bench::random::{micro_instance, MicroConfig};
use ssvrptw::expectation::{expected_cost, ScaleTag};
use ssvrptw::model::{validate_first_stage, Capacity, FirstStageSolution, Instance, Plan, Strategy};
use ssvrptw::search::{
    exact_enumerate, local_search, restricted_candidate_count, unrestricted_candidate_count, Budget, ExactParams,
    Problem, SearchParams, WaitDomain,
};

fn problem(instance: Instance, waits: &[i64]) -> Problem {
    Problem {
        instance,
        domain: WaitDomain::new(waits.to_vec()).unwrap(),
        scale: ScaleTag::default(),
    }
}

fn small_config() -> MicroConfig {
    MicroConfig {
        max_waiting: 3,
        max_fleet: 2,
        max_requests: 8,
        max_uncertain: 8,
        ..MicroConfig::default()
    }
}

fn unrestricted(strategy: Strategy) -> ExactParams {
    ExactParams {
        strategy,
        restricted: false,
        ..ExactParams::default()
    }
}

/// Random solution with waits from `domain`, idle vehicles allowed.
fn random_in_domain(rng: &mut ChaCha8Rng, inst: &Instance, domain: &WaitDomain) -> FirstStageSolution {
    let mut vertices: Vec<usize> = inst.waiting_vertices().filter(|_| rng.random_bool(0.6)).collect();
    vertices.shuffle(rng);
    let mut sol = FirstStageSolution::empty(inst.fleet());
    for w in vertices {
        sol.routes[rng.random_range(0..inst.fleet())].push(w);
        sol.wait.insert(w, domain.random(rng));
    }
    sol
}

#[test]
fn enumerated_counts_follow_the_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let inst = micro_instance(&mut rng, &small_config());
        let (m, k) = (inst.waiting_count(), inst.fleet());
        let p = problem(inst, &[3, 6, 11]);
        let r = exact_enumerate(&p, &ExactParams::default());
        assert_eq!(r.candidates as u128, restricted_candidate_count(m, k, 3));
        assert!(r.proven);
        assert!(r.evaluated <= r.candidates);
        let u = exact_enumerate(&p, &unrestricted(Strategy::Rq));
        assert_eq!(u.candidates as u128, unrestricted_candidate_count(m, k, 3));
    }
}

#[test]
fn singleton_space_has_one_candidate() {
    let inst = instance(1, 1, 30, 1, Capacity::Bounded(2), |_, _| 3, vec![req(2, 5, 20, 0.5)]);
    let r = exact_enumerate(&problem(inst, &[10]), &ExactParams::default());
    assert_eq!((r.candidates, r.evaluated), (1, 1));
    assert!(r.proven);
    let best = r.solution.unwrap();
    assert_eq!(best.routes, vec![vec![1]]);
    // the only value fits: 1 + 3 + 10 + 3 <= 30
    assert_eq!(best.wait_of(1), Some(10));
}

#[test]
fn optimum_beats_random_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let inst = micro_instance(&mut rng, &small_config());
        let p = problem(inst, &[2, 5, 9, 14]);
        for strategy in Strategy::ALL {
            let best = exact_enumerate(&p, &unrestricted(strategy)).cost.unwrap().total;
            for _ in 0..1000 {
                let sol = random_in_domain(&mut rng, &p.instance, &p.domain);
                if !validate_first_stage(&sol, &p.instance).is_valid() {
                    continue;
                }
                let cost = expected_cost::<f64>(&Plan::new(strategy, &p.instance, &sol).unwrap()).total;
                assert!(best <= cost + 1e-12, "{strategy}: {best} > {cost} for {sol:?}");
            }
        }
    }
}

#[test]
fn unrestricted_optimum_is_never_worse() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let inst = micro_instance(&mut rng, &small_config());
        let p = problem(inst, &[2, 5, 9, 14]);
        let restricted = exact_enumerate(&p, &ExactParams::default());
        let free = exact_enumerate(&p, &unrestricted(Strategy::Rq));
        if let Some(c) = restricted.cost {
            assert!(free.cost.unwrap().total <= c.total + 1e-12);
        }
    }
}

#[test]
fn time_limit_stops_unproven() {
    let requests = (0..6).map(|i| req(4 + i % 3, 3 + 4 * i as i64, 200, 0.5)).collect();
    let inst = instance(3, 3, 240, 2, Capacity::Bounded(3), |_, _| 4, requests);
    let waits: Vec<i64> = (1..=200).collect();
    let r = exact_enumerate(
        &problem(inst, &waits),
        &ExactParams {
            time_limit: Some(Duration::ZERO),
            ..ExactParams::default()
        },
    );
    assert!(!r.proven);
    assert!((r.candidates as u128) < restricted_candidate_count(3, 2, 200));
}

#[test]
fn search_finds_the_optimum_of_a_tiny_instance() {
    let requests = vec![req(2, 4, 12, 0.7), req(2, 15, 22, 0.4), req(2, 24, 30, 0.9)];
    let inst = instance(
        1,
        1,
        40,
        1,
        Capacity::Bounded(3),
        |i, j| if i + j == 3 { 2 } else { 4 },
        requests,
    );
    let p = Problem::unscaled(inst);
    let optimum = exact_enumerate(&p, &unrestricted(Strategy::Rq)).cost.unwrap().total;
    let mut hits = 0;
    for seed in 0..10 {
        let params = SearchParams {
            seed,
            budget: Budget::Iterations(2000),
            ..SearchParams::default()
        };
        let r = local_search(&p, &solution(&[&[]]), &params).unwrap();
        assert!(r.cost.total >= optimum - 1e-12);
        if (r.cost.total - optimum).abs() < 1e-9 {
            hits += 1;
        }
    }
    assert!(hits >= 9, "{hits}/10");
}

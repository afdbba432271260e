use num_traits::Zero;

use tverberg::arith::{rat, ratio};
use tverberg::model::solve_system;
use tverberg::oracle::for_each_proper_partition;
use tverberg::{
    build_system, enumerate_tverberg, perturb, random_instance, replaced_column_det, solve,
    verify_certificate, CertifiedFor, Distribution, Instance, Partition, Point, SolveResult,
    SolverConfig,
};

fn pts(rows: &[&[i64]]) -> Vec<Point> {
    rows.iter()
        .map(|r| r.iter().map(|&v| rat(v)).collect())
        .collect()
}

/// Instance named by `certified_for`.
fn certified_set(inst: &Instance, res: &SolveResult) -> Instance {
    match res.certified_for {
        CertifiedFor::Original => inst.clone(),
        CertifiedFor::Perturbed => {
            Instance::new(inst.d(), inst.r(), res.perturbed_points.clone()).unwrap()
        }
    }
}

/// Re-applies the recorded pivots to the initial partition.
fn replay(res: &SolveResult) -> Partition {
    res.trace
        .iter()
        .fold(res.initial.partition.clone(), |part, ev| {
            assert_eq!(part.block_of(ev.h), ev.q);
            part.move_point(ev.h, ev.j)
        })
}

#[test]
fn solver_partition_is_in_oracle_set() {
    for seed in 0..8 {
        for (d, r) in [(2, 3), (1, 3), (2, 2), (1, 4)] {
            let inst = random_instance(d, r, Distribution::default(), seed);
            let res = solve(&inst, &SolverConfig::with_seed(seed)).unwrap();
            assert_eq!(res.certified_for, CertifiedFor::Original);
            assert_eq!(
                verify_certificate(&inst, &res.partition, &res.certificate, false),
                Ok(())
            );
            let report = enumerate_tverberg(&inst, false).unwrap();
            assert!(!report.valid_partitions.is_empty());
            assert!(report.contains(&res.partition), "d={d} r={r} seed={seed}");
            assert_eq!(
                report.certificate_for(&res.partition),
                Some(&res.certificate)
            );
        }
    }
}

#[test]
fn trace_replay_reproduces_final_partition() {
    for seed in 0..10 {
        let inst = random_instance(2, 3, Distribution::UnitCube, seed);
        let res = solve(&inst, &SolverConfig::with_seed(seed)).unwrap();
        assert_eq!(replay(&res).canonical(), res.partition);
        assert_eq!(res.stats.total_pivots(), res.trace.len());
    }
}

#[test]
fn solve_is_deterministic() {
    let inst = random_instance(3, 2, Distribution::default(), 21);
    let cfg = SolverConfig::with_seed(5);
    assert_eq!(solve(&inst, &cfg).unwrap(), solve(&inst, &cfg).unwrap());
}

#[test]
fn random_instances_are_nondegenerate_for_every_proper_partition() {
    for seed in 0..5 {
        for (d, r) in [(2, 2), (1, 3), (2, 3)] {
            let inst = random_instance(d, r, Distribution::UnitCube, seed);
            let inst = perturb(&inst, &ratio(1, 1 << 10), seed);
            for_each_proper_partition(inst.n(), r, d + 1, |blocks| {
                let part = Partition::new(blocks.to_vec(), inst.n()).unwrap();
                let sys = build_system(&inst, &part, None).unwrap();
                let det = sys.det().unwrap();
                assert!(!det.is_zero());
                let cert = solve_system(&sys).unwrap();
                for i in 0..inst.n() {
                    let di = replaced_column_det(&sys, i).unwrap();
                    assert!(!di.is_zero());
                    assert_eq!(&cert.alpha[i] * &det, di);
                }
            });
        }
    }
}

#[test]
fn perturbed_square_has_no_singular_partition() {
    let square = Instance::new(2, 2, pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap();
    let inst = perturb(&square, &ratio(1, 1000), 9);
    let report = enumerate_tverberg(&inst, false).unwrap();
    assert_eq!(report.singular, 0);
    assert_eq!(report.total_proper_partitions, 7);
}

#[test]
fn singleton_coefficient_is_one() {
    let inst = random_instance(2, 3, Distribution::default(), 3);
    for_each_proper_partition(inst.n(), 3, 3, |blocks| {
        let part = Partition::new(blocks.to_vec(), inst.n()).unwrap();
        let cert = tverberg::solve_partition(&inst, &part, None).unwrap();
        for b in part.blocks().iter().filter(|b| b.len() == 1) {
            assert_eq!(cert.alpha[b[0]], rat(1));
        }
    });
}

#[test]
fn degenerate_inputs_never_return_invalid_certificates() {
    let cases = [
        // Collinear.
        Instance::new(2, 2, pts(&[&[0, 0], &[1, 1], &[2, 2], &[3, 3]])).unwrap(),
        // Cocircular: the square's corners, r = 2.
        Instance::new(2, 2, pts(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]])).unwrap(),
        // Seven points with many collinear triples.
        Instance::new(
            2,
            3,
            pts(&[
                &[0, 0],
                &[1, 0],
                &[2, 0],
                &[0, 1],
                &[0, 2],
                &[1, 1],
                &[2, 2],
            ]),
        )
        .unwrap(),
        // Repeated coordinates on a line.
        Instance::new(1, 3, pts(&[&[0], &[1], &[2], &[3], &[4]])).unwrap(),
    ];
    for (k, inst) in cases.iter().enumerate() {
        for seed in 0..3 {
            let res = solve(inst, &SolverConfig::with_seed(seed)).unwrap();
            let set = certified_set(inst, &res);
            let strict = res.certified_for == CertifiedFor::Perturbed;
            assert_eq!(
                verify_certificate(&set, &res.partition, &res.certificate, strict),
                Ok(()),
                "case {k} seed {seed}"
            );
            assert!(res.stats.restarts <= 5);
        }
    }
}

#[test]
fn collinear_radon_falls_back_to_perturbed() {
    let inst = Instance::new(2, 2, pts(&[&[0, 0], &[1, 0], &[2, 0], &[3, 0]])).unwrap();
    let res = solve(&inst, &SolverConfig::default()).unwrap();
    // Every proper partition of four collinear points is singular.
    assert_eq!(res.certified_for, CertifiedFor::Perturbed);
    assert_eq!(res.stats.restarts, 5);
    let perturbed = Instance::new(2, 2, res.perturbed_points.clone()).unwrap();
    assert_eq!(
        verify_certificate(&perturbed, &res.partition, &res.certificate, true),
        Ok(())
    );
}

#[test]
fn skipping_original_certification_reports_perturbed() {
    let inst = random_instance(2, 2, Distribution::default(), 1);
    let cfg = SolverConfig {
        certify_original: false,
        ..SolverConfig::default()
    };
    let res = solve(&inst, &cfg).unwrap();
    assert_eq!(res.certified_for, CertifiedFor::Perturbed);
    assert!(res.certificate.strict);
}

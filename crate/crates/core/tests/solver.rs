use std::path::{Path, PathBuf};

use kazhdan::certify::{verify, Certificate};
use kazhdan::pipeline::{build_problem, GroupSpec, Target};
use kazhdan::rootsys::Family;
use kazhdan::sos::{parse_sdpa, solve, to_sdpa, write_sdpa, Backend, SolverConfig, SolverStatus};
use kazhdan::Exec;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

fn z5() -> kazhdan::sos::SosProblem {
    build_problem(
        &GroupSpec::Cyclic {
            order: 5,
            steps: vec![1],
        },
        Target::DeltaSq,
        2,
        Exec::default(),
        None,
    )
    .unwrap()
}

fn shipped(family: &str, rank: u64, target: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/certificates");
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("cert-"))
        .find(|p| {
            let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
            c["group"]["family"] == family && c["group"]["rank"] == rank && c["target"] == target
        })
        .expect("certificate shipped")
}

#[test]
fn sdpa_round_trip_and_determinism() {
    let p = build_problem(
        &GroupSpec::Chevalley {
            family: Family::A,
            rank: 2,
        },
        Target::Adj,
        1,
        Exec::default(),
        None,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a2.dat-s");
    let written = write_sdpa(&p, &path).unwrap();
    assert_eq!(parse_sdpa(&path).unwrap(), written);
    assert_eq!(to_sdpa(&p).unwrap(), written);
    let again = dir.path().join("again.dat-s");
    write_sdpa(&p, &again).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    // one equation per pair {g, g⁻¹}
    let classes = (0..p.num_constraints())
        .filter(|&c| p.constraint_inverse[c] as usize >= c)
        .count();
    assert_eq!(written.num_constraints(), classes);
}

#[test]
fn accepted_solutions_reconstruct_the_target() {
    let p = z5();
    let sol = solve(
        &p,
        &SolverConfig {
            tolerance: 1e-10,
            max_iter: 50_000,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(sol.status, SolverStatus::Optimal);
    assert!(
        sol.stats.reconstruction_residual <= 1e-8,
        "{}",
        sol.stats.reconstruction_residual
    );
    assert!(p.reconstruction_residual(&sol.gram, sol.lambda) <= 1e-8);
}

#[test]
fn larger_radius_never_hurts() {
    let p = build_problem(
        &GroupSpec::Chevalley {
            family: Family::A,
            rank: 2,
        },
        Target::Adj,
        1,
        Exec::default(),
        None,
    )
    .unwrap();
    let r1 = solve(
        &p,
        &SolverConfig {
            tolerance: 1e-8,
            max_iter: 20_000,
            ..Default::default()
        },
    )
    .unwrap();
    let cert = Certificate::load(&shipped("A", 2, "adj")).unwrap();
    let r2 = cert.lambda_certified().unwrap().to_f64().unwrap();
    // the radius 2 value is a certified lower bound on the radius 2 optimum
    assert!(r1.lambda <= r2 + 1e-6, "R=1 {} vs R=2 {r2}", r1.lambda);
}

#[test]
fn lowering_lambda_keeps_certificates_valid() {
    let path = shipped("A", 2, "adj");
    let cert = Certificate::load(&path).unwrap();
    let gram = cert.load_gram(&path).unwrap();
    let p = build_problem(&cert.group, cert.target, cert.radius, Exec::default(), None).unwrap();
    let full = cert.check_against(&p, &gram).unwrap();
    let lambda: BigRational = full.lambda_rounded.clone();
    for k in [999, 990, 900] {
        let lower = &lambda * BigRational::new(k.into(), 1000.into());
        let v = verify(&p, &gram, &lower).unwrap();
        assert!(!v.lambda_certified.is_negative(), "{k}");
        assert!(v.lambda_certified >= full.lambda_certified, "{k}");
    }
}

#[test]
fn scs_agrees_on_a_small_problem() {
    let p = z5();
    let cfg = SolverConfig {
        backend: Backend::Scs,
        tolerance: 1e-8,
        ..Default::default()
    };
    match solve(&p, &cfg) {
        Ok(sol) if sol.status.is_usable() => assert!((sol.lambda - 1.381966).abs() < 1e-3, "{}", sol.lambda),
        Ok(sol) => panic!("scs returned {:?}: {}", sol.status, sol.stats.message),
        Err(kazhdan::Error::SolverEnvironment(e)) => eprintln!("skipped, no scs: {e}"),
        Err(e) => panic!("{e}"),
    }
}

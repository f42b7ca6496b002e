//! One PASS/FAIL line per acceptance criterion.
//!
//! Runs without a solver: SDP results come from the certificates shipped in
//! `data/certificates`, each replayed from file. Lines listed in
//! `KNOWN_FAILURES` are reported but do not fail the target; any other FAIL
//! does.

mod common;

use std::path::{Path, PathBuf};
use std::time::Instant;

use kazhdan::certify::Certificate;
use kazhdan::chevalley::steinberg_generators;
use kazhdan::elements::{
    adj_tensor, check_weyl_sum, full_square_tensor, levels, sq_tensor, AdjScope, ChevalleyRing, LengthClass,
};
use kazhdan::groupring::RingElement;
use kazhdan::pipeline::{GroupSpec, Target};
use kazhdan::replicate::{render_tables, ConstantSet, ReportOptions, TableId};
use kazhdan::rootsys::{Family, PlaneCensus, PlaneType, RootSystem};
use kazhdan::Exec;
use num_traits::ToPrimitive;

/// The literal κ reading of the SDP criterion: the thresholds are λ values,
/// so κ = √(2λ/|S|) cannot reach them (see the README).
const KNOWN_FAILURES: &[&str] = &["4c", "4e", "5b"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        id,
        pass,
        detail: detail.into(),
    }
}

fn criterion1() -> Vec<Outcome> {
    let t = Instant::now();
    let mut ok = true;
    let mut done = Vec::new();
    for (f, n) in [(Family::A, 2), (Family::A, 3), (Family::C, 2)] {
        let r = ChevalleyRing::new(steinberg_generators(f, n).unwrap(), 1, Exec::default()).unwrap();
        let rs = r.generators().system();
        let census = PlaneCensus::new(rs).unwrap();
        let delta = r.laplacian();
        let t_sq = sq_tensor(rs, LengthClass::All).plus(&adj_tensor(rs, &census, AdjScope::Full));
        ok &= t_sq == full_square_tensor(rs);
        ok &= r.evaluate(&t_sq).unwrap() == delta.mul(&delta).unwrap();
        done.push(format!("Sq+Adj {f}{n}"));
    }
    for n in [2, 3] {
        let r = ChevalleyRing::new(steinberg_generators(Family::C, n).unwrap(), 1, Exec::default()).unwrap();
        let l = levels(r.generators().system()).unwrap();
        let delta = r.laplacian();
        let sum = (1..=4).fold(RingElement::zero(r.context()), |acc, i| {
            acc.add(&r.evaluate(l.level(i)).unwrap()).unwrap()
        });
        ok &= sum == delta.mul(&delta).unwrap();
        done.push(format!("sum of levels C{n}"));
    }
    let secs = t.elapsed().as_secs_f64();
    vec![line(
        "1",
        ok && secs < 60.0,
        format!("{} exact; {secs:.1}s", done.join(", ")),
    )]
}

fn criterion2() -> Vec<Outcome> {
    let t = Instant::now();
    let (mut checked, mut ok) = (0, true);
    for n in 1..=4 {
        for m in 1..=n {
            for i in 1..=m {
                ok &= check_weyl_sum(n, m, i, Exec::default()).unwrap().holds;
                checked += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    vec![line(
        "2",
        ok && secs < 60.0,
        format!("{checked} triples (n, m, i), n <= 4; {secs:.1}s"),
    )]
}

fn criterion3() -> Vec<Outcome> {
    let gamma = |f, n| PlaneCensus::new(&RootSystem::build(f, n).unwrap()).unwrap().gamma();
    let mut ok = (2..=8).all(|n| gamma(Family::A, n) == n - 1);
    ok &= (4..=8).all(|n| gamma(Family::D, n) == 2 * (n - 2));
    ok &= [6, 7, 8].map(|n| gamma(Family::E, n)) == [10, 16, 28];
    for n in 2..=8 {
        let rs = RootSystem::build(Family::C, n).unwrap();
        let census = PlaneCensus::new(&rs).unwrap();
        for a in 0..rs.len() {
            let inc = census.incidence(a);
            let c2 = inc.get(&PlaneType::C2).copied().unwrap_or(0);
            let a2 = inc.get(&PlaneType::A2).copied().unwrap_or(0);
            ok &= if rs.is_long(a) {
                c2 == n - 1 && a2 == 0
            } else {
                c2 == 1 && a2 == 2 * (n - 2)
            };
        }
    }
    let f4 = RootSystem::build(Family::F, 4).unwrap();
    let census = PlaneCensus::new(&f4).unwrap();
    for a in (0..f4.len()).filter(|&a| !f4.is_long(a)) {
        let inc = census.incidence(a);
        ok &= inc.get(&PlaneType::C2) == Some(&3) && inc.get(&PlaneType::A2) == Some(&4);
    }
    vec![line(
        "3",
        ok,
        "gamma(A_n), gamma(D_n) n <= 8, gamma(E6,E7,E8), C_n incidences n <= 8, F4 short (3, 4)",
    )]
}

fn shipped() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/certificates");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .map(|d| d.map(|e| e.unwrap().path()).collect())
        .unwrap_or_default();
    v.retain(|p| p.file_name().unwrap().to_string_lossy().starts_with("cert-"));
    v.sort();
    v
}

/// Best replayed λ for a problem among the shipped certificates.
fn replayed(family: Family, rank: usize, target: Target) -> Option<(f64, usize)> {
    shipped()
        .into_iter()
        .filter_map(|p| {
            let c = Certificate::load(&p).ok()?;
            (c.group == GroupSpec::Chevalley { family, rank } && c.target == target && c.radius == 2).then_some(p)
        })
        .filter_map(|p| {
            let v = Certificate::replay(&p, Exec::default(), None).ok()?;
            let c = Certificate::load(&p).ok()?;
            Some((v.lambda_certified.to_f64()?, c.generators))
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
}

fn criterion4() -> Vec<Outcome> {
    let mut out = Vec::new();
    let lambda_line = |id, name: &str, got: Option<(f64, usize)>, reference: f64| match got {
        Some((l, _)) => line(
            id,
            l >= 0.9 * reference,
            format!(
                "{name}: certified lambda {l:.6} vs 0.9*{reference} = {:.6}",
                0.9 * reference
            ),
        ),
        None => line(id, false, format!("{name}: no verified certificate")),
    };
    let kappa_line = |id, name: &str, got: Option<(f64, usize)>, reference: f64| match got {
        Some((l, s)) => {
            let k = (2.0 * l / s as f64).sqrt();
            line(
                id,
                k >= 0.9 * reference,
                format!(
                    "{name}: certified kappa {k:.6} vs 0.9*{reference} = {:.6} (literal reading)",
                    0.9 * reference
                ),
            )
        }
        None => line(id, false, format!("{name}: no verified certificate")),
    };
    let a2_adj = replayed(Family::A, 2, Target::Adj);
    let a2_sq = replayed(Family::A, 2, Target::DeltaSq);
    let c2_sq = replayed(Family::C, 2, Target::DeltaSq);
    let c3 = replayed(Family::C, 3, Target::Levels23);
    out.push(lambda_line("4a", "A2 Adj - lambda*Delta", a2_adj, 0.158606));
    out.push(lambda_line("4b", "A2 Delta^2 - lambda*Delta", a2_sq, 0.280406));
    out.push(kappa_line("4c", "A2 Delta^2 - lambda*Delta", a2_sq, 0.280406));
    out.push(lambda_line("4d", "C2 Delta^2 - lambda*Delta", c2_sq, 0.879159));
    out.push(kappa_line("4e", "C2 Delta^2 - lambda*Delta", c2_sq, 0.879159));
    out.push(lambda_line("4f", "C3 Lev2 + Lev3 - lambda*Delta", c3, 2.417393));
    out
}

fn criterion5() -> Vec<Outcome> {
    let t = Instant::now();
    let report = render_tables(
        &ConstantSet::shipped(),
        ReportOptions {
            max_rank: 10,
            only: None,
        },
    )
    .unwrap();
    let secs = t.elapsed().as_secs_f64();
    let checked: Vec<_> = report.rows.iter().filter(|r| r.matches_reference.is_some()).collect();
    let bad: Vec<String> = checked
        .iter()
        .filter(|r| r.matches_reference == Some(false) && r.family != Family::F)
        .map(|r| format!("{}{} R={}", r.family, r.n, r.radius))
        .collect();
    let levels_form = report
        .rows
        .iter()
        .filter(|r| r.table == TableId::Overview && r.family == Family::C && r.radius == 2 && r.n >= 3)
        .all(|r| (r.kappa_lb - ((2.417393 / 2.0) / (r.n * r.n) as f64).sqrt()).abs() <= 1e-6);
    let f4 = report.rows.iter().find(|r| r.family == Family::F).unwrap();
    let f4_corrected = (2.0 * (4.0 * 0.273954 + 3.0 * 0.244935) / 96.0f64).sqrt();
    vec![
        line(
            "5a",
            bad.is_empty() && levels_form && (f4.kappa_lb - f4_corrected).abs() <= 1e-6,
            format!(
                "{} rows within 1e-6 of the closed forms (F4 against 3*0.244935), C_n R=2 as sqrt((2.417393/2)/n^2); {secs:.1}s{}",
                checked.len(),
                if bad.is_empty() { String::new() } else { format!("; mismatches {bad:?}") }
            ),
        ),
        line(
            "5b",
            f4.matches_reference == Some(true),
            format!("F4 as typeset: {:.6} vs recomputed {:.6}", f4.reference.unwrap_or(f64::NAN), f4.kappa_lb),
        ),
    ]
}

fn criterion6() -> Vec<Outcome> {
    let t = Instant::now();
    let o = common::perturbation_trials(100, 0xacce);
    vec![line(
        "6",
        o.violations == 0 && o.certified > 0,
        format!(
            "{} trials on groups of order <= 60, {} certified, {} violations, max certified/gap {:.4}; {:.1}s",
            o.trials,
            o.certified,
            o.violations,
            o.worst_ratio,
            t.elapsed().as_secs_f64()
        ),
    )]
}

fn criterion7() -> Vec<Outcome> {
    let certs = shipped();
    let failed: Vec<String> = certs
        .iter()
        .filter(|p| Certificate::replay(p, Exec::default(), None).is_err())
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    vec![line(
        "7",
        !certs.is_empty() && failed.is_empty(),
        format!(
            "{} certificates replayed from file{}",
            certs.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failed {failed:?}")
            }
        ),
    )]
}

fn main() {
    let all: Vec<Outcome> = [
        criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7,
    ]
    .into_iter()
    .flat_map(|c| c())
    .collect();
    let mut unexpected = 0;
    for o in &all {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, KNOWN_FAILURES.contains(&o.id)) {
            (false, true) => " [known, analyzed]",
            (true, true) => " [listed as known failure but passed]",
            (false, false) => {
                unexpected += 1;
                ""
            }
            _ => "",
        };
        println!("{status} {}: {}{note}", o.id, o.detail);
    }
    if unexpected > 0 {
        eprintln!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}

//! Finite groups with exactly computable spectra, shared by test targets.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use kazhdan::certify::{certify, CertifyConfig};
use kazhdan::pipeline::{build_problem, GroupSpec, Target};
use kazhdan::sos::{solve, NumericSolution, SolverConfig, SolverStatus, SosProblem};
use kazhdan::Exec;
use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type P = Vec<u16>;

pub fn compose(p: &P, q: &P) -> P {
    q.iter().map(|&i| p[i as usize]).collect()
}

pub fn inverse(p: &P) -> P {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j as usize] = i as u16;
    }
    inv
}

pub fn cycle(n: usize, c: &[u16]) -> P {
    let mut img: P = (0..n as u16).collect();
    for k in 0..c.len() {
        img[c[k] as usize] = c[(k + 1) % c.len()];
    }
    img
}

pub fn shift(n: usize, k: usize) -> P {
    (0..n).map(|x| ((x + k) % n) as u16).collect()
}

/// Generators closed under inverses, identity and duplicates removed.
pub fn symmetric_set(gens: &[P]) -> Vec<P> {
    let mut s: Vec<P> = Vec::new();
    for g in gens {
        for h in [g.clone(), inverse(g)] {
            if !s.contains(&h) && h != (0..h.len() as u16).collect::<P>() {
                s.push(h);
            }
        }
    }
    s
}

/// Smallest nonzero eigenvalue of `Δ = |S| − Σ s` in the regular representation.
pub fn spectral_gap(gens: &[P]) -> f64 {
    let s = symmetric_set(gens);
    let id: P = (0..s[0].len() as u16).collect();
    let mut index: HashMap<P, usize> = HashMap::from([(id.clone(), 0)]);
    let mut elems = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &s {
            let h = compose(g, &elems[i]);
            if !index.contains_key(&h) {
                index.insert(h.clone(), elems.len());
                queue.push_back(elems.len());
                elems.push(h);
            }
        }
    }
    let n = elems.len();
    let mut lap = DMatrix::<f64>::identity(n, n) * s.len() as f64;
    for (i, x) in elems.iter().enumerate() {
        for g in &s {
            lap[(index[&compose(g, x)], i)] -= 1.0;
        }
    }
    let mut ev: Vec<f64> = lap.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    *ev.iter().find(|&&v| v > 1e-8).expect("nontrivial group")
}

pub struct Case {
    pub spec: GroupSpec,
    pub gens: Vec<P>,
}

pub fn cases() -> Vec<Case> {
    vec![
        Case {
            spec: GroupSpec::Cyclic {
                order: 5,
                steps: vec![1],
            },
            gens: vec![shift(5, 1)],
        },
        Case {
            spec: GroupSpec::Cyclic {
                order: 12,
                steps: vec![1, 5],
            },
            gens: vec![shift(12, 1), shift(12, 5)],
        },
        Case {
            spec: GroupSpec::Dihedral { n: 7 },
            gens: vec![shift(7, 1), (0..7).map(|x| ((7 - x) % 7) as u16).collect()],
        },
        Case {
            spec: GroupSpec::Symmetric4,
            gens: vec![cycle(4, &[0, 1]), cycle(4, &[0, 1, 2, 3])],
        },
        Case {
            spec: GroupSpec::Alternating5,
            gens: vec![cycle(5, &[0, 1, 2]), cycle(5, &[0, 1, 2, 3, 4])],
        },
    ]
}

pub fn solver() -> SolverConfig {
    SolverConfig {
        tolerance: 1e-8,
        max_iter: 20_000,
        ..Default::default()
    }
}

#[derive(Debug, Default)]
pub struct TrialOutcome {
    pub trials: usize,
    pub certified: usize,
    pub violations: usize,
    /// Largest `λ_certified / gap` seen.
    pub worst_ratio: f64,
}

/// Solves every case at radius 1 and 2, then certifies `trials` randomly
/// corrupted copies (λ scaled by 0.5..1.5, Gram noise up to 0.1, random
/// margin) and compares each certified λ with the exact gap.
pub fn perturbation_trials(trials: usize, seed: u64) -> TrialOutcome {
    let mut base: Vec<(SosProblem, NumericSolution, f64)> = Vec::new();
    for case in cases() {
        let gap = spectral_gap(&case.gens);
        for radius in [1, 2] {
            let p = build_problem(&case.spec, Target::DeltaSq, radius, Exec::default(), None).unwrap();
            let sol = solve(&p, &solver()).unwrap();
            base.push((p, sol, gap));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrialOutcome {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let (p, sol, gap) = &base[rng.gen_range(0..base.len())];
        let mut s = sol.clone();
        s.status = SolverStatus::Optimal;
        s.lambda = gap * rng.gen_range(0.5..1.5);
        let noise = [0.0, 1e-6, 1e-3, 1e-1][rng.gen_range(0..4)];
        let n = s.n;
        for i in 0..n {
            for j in i..n {
                let e = noise * rng.gen_range(-1.0..1.0);
                s.gram[i * n + j] += e;
                if i != j {
                    s.gram[j * n + i] += e;
                }
            }
        }
        let cfg = CertifyConfig {
            lambda_margin: rng.gen_range(0.0..0.05),
            ..Default::default()
        };
        if let Ok(b) = certify(p, &s, &cfg) {
            out.certified += 1;
            let l = b.verified.lambda_certified.to_f64().unwrap();
            out.worst_ratio = out.worst_ratio.max(l / gap);
            if l > *gap * (1.0 + 1e-12) {
                out.violations += 1;
            }
        }
    }
    out
}

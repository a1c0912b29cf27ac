//! Re-derives the stored reference minima: random probing must never beat
//! them, and a local refinement from the known basin must reach them.

use nmgo_core::{get_problem, BenchmarkProblem, PROBLEM_NAMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn probe(p: &BenchmarkProblem, rng: &mut ChaCha8Rng) -> f64 {
    let x: Vec<f64> = p
        .space()
        .lower()
        .iter()
        .zip(p.space().upper())
        .map(|(&l, &u)| rng.gen_range(l..=u))
        .collect();
    p.evaluate(&x).unwrap()
}

// Nelder-Mead with every vertex clamped into the box.
fn nelder_mead(p: &BenchmarkProblem, start: &[f64], scale: f64) -> f64 {
    let n = start.len();
    let sp = p.space();
    let clamp = |x: &mut Vec<f64>| {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(sp.lower()[i], sp.upper()[i]);
        }
    };
    let eval = |x: &Vec<f64>| p.evaluate(x).unwrap();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), eval(&start.to_vec())));
    for i in 0..n {
        let mut x = start.to_vec();
        let w = sp.upper()[i] - sp.lower()[i];
        x[i] += if x[i] + scale * w <= sp.upper()[i] {
            scale * w
        } else {
            -scale * w
        };
        clamp(&mut x);
        let f = eval(&x);
        simplex.push((x, f));
    }
    for _ in 0..20_000 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= 1e-15 && size <= 1e-12 {
            break;
        }
        let mut c = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / n as f64;
            }
        }
        let along = |t: f64| {
            let mut x: Vec<f64> = c
                .iter()
                .zip(&simplex[n].0)
                .map(|(ci, w)| ci + t * (ci - w))
                .collect();
            clamp(&mut x);
            x
        };
        let xr = along(1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = along(if fr < simplex[n].1 { 0.5 } else { -0.5 });
            let fc = eval(&xc);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, f) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *f = eval(x);
                }
            }
        }
    }
    simplex.iter().map(|s| s.1).fold(f64::INFINITY, f64::min)
}

#[test]
fn probes_are_finite_and_never_below_reference() {
    for (k, name) in PROBLEM_NAMES.iter().enumerate() {
        let p = get_problem(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        let mut best = f64::INFINITY;
        for i in 0..100_000 {
            let f = probe(&p, &mut rng);
            if i < 10_000 {
                assert!(f.is_finite(), "{name}: non-finite probe");
            }
            best = best.min(f);
        }
        assert!(
            best >= p.f_star() - 1e-9,
            "{name}: probe {best} below {}",
            p.f_star()
        );
    }
}

#[test]
fn local_refinement_reaches_reference() {
    let basins: [(&str, &[f64]); 13] = [
        ("ackley", &[0.01, -0.01]),
        ("adjiman", &[1.99, 0.1]),
        ("bohachevsky", &[0.01, 0.01]),
        ("branin", &[3.1, 2.3]),
        ("bukin", &[-10.0, 1.0]),
        ("dropwave", &[0.01, 0.0]),
        ("eggholder", &[511.0, 404.0]),
        ("hartman3", &[0.11, 0.55, 0.85]),
        ("hartman6", &[0.2, 0.15, 0.48, 0.28, 0.31, 0.66]),
        ("rastrigin", &[0.01, -0.01]),
        ("rosenbrock", &[1.01, 0.99, 1.0, 1.02, 0.98, 1.0, 1.0, 1.01]),
        ("step2", &[0.3, -0.2, 0.1, 0.4, -0.4]),
        ("styblinskitang", &[-2.9, -2.9, -2.9, -2.9, -2.9]),
    ];
    for (name, start) in basins {
        let p = get_problem(name).unwrap();
        let refined = nelder_mead(&p, start, 1e-3);
        assert!(
            refined >= p.f_star() - 1e-9,
            "{name}: {refined} below reference"
        );
        assert!(
            refined - p.f_star() <= 1e-7,
            "{name}: refined {refined} vs {}",
            p.f_star()
        );
    }
}

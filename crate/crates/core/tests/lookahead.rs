use nmgo_core::acquisition::{stochastic_acquisition, AcquisitionParams, GaussHermiteRule};
use nmgo_core::{
    evaluate_multistep_objective, evaluate_rollout_objective, minimize_box, next_query,
    sample_posterior, Dataset, Draws, HorizonPlan, IdwModel, LookaheadConfig, RandomStream,
    RbfState, SamplingKind, SamplingScheme, SearchSpace, SolveConfig, Strategy, StreamLabel,
    Surrogate,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dataset(points: &[&[f64]], values: &[f64], lo: f64, hi: f64) -> Dataset {
    let n = points[0].len();
    let space = SearchSpace::new(vec![lo; n], vec![hi; n]).unwrap();
    Dataset::from_pairs(space, points.iter().copied().zip(values.iter().copied())).unwrap()
}

fn five_point_1d() -> Dataset {
    dataset(
        &[&[0.05], &[0.3], &[0.45], &[0.7], &[0.95]],
        &[1.2, -0.4, 0.3, -1.1, 0.8],
        0.0,
        1.0,
    )
}

fn random_2d(seed: u64, k: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = SearchSpace::new(vec![-2.0, 0.0], vec![2.0, 3.0]).unwrap();
    let mut data = Dataset::new(space);
    while data.len() < k {
        let x: [f64; 2] = [rng.gen_range(-2.0..2.0), rng.gen_range(0.0..3.0)];
        let f = (x[0] - 0.5).powi(2) + (3.0 * x[1]).sin();
        let _ = data.push(&x, f);
    }
    data
}

fn models(data: &Dataset, eps: f64) -> [Surrogate; 2] {
    [
        Surrogate::Idw(IdwModel::new(data.clone(), 1e-12).unwrap()),
        Surrogate::Rbf(RbfState::fit(data.clone(), eps, 1e-8).unwrap()),
    ]
}

fn params() -> AcquisitionParams {
    AcquisitionParams::new(0.7, 0.4).unwrap()
}

fn rule() -> GaussHermiteRule {
    GaussHermiteRule::new(16).unwrap()
}

// Scenario tree by explicit recursion over refitted surrogates.
fn recursive_tree(
    model: &Surrogate,
    plan: &[Vec<f64>],
    branches: &[usize],
    p: &AcquisitionParams,
    r: &GaussHermiteRule,
) -> f64 {
    let x = &plan[0];
    let here = stochastic_acquisition(model, p, x, r);
    if plan.len() == 1 {
        return here;
    }
    let gh = GaussHermiteRule::new(branches[0]).unwrap();
    let mut acc = 0.0;
    for (y, w) in gh.normal_points().zip(gh.weights()) {
        let f = sample_posterior(model, x, y);
        let child = model.partial_fit(x, f).unwrap();
        acc += w * recursive_tree(&child, &plan[1..], &branches[1..], p, r);
    }
    here + acc
}

#[test]
fn two_stage_composition_with_mean_draw() {
    let data = random_2d(3, 8);
    let x1 = [0.3, 1.7];
    let x2 = [-1.2, 0.4];
    for model in models(&data, 0.5) {
        let plan = HorizonPlan::fixed(2, 2).unwrap();
        let got = evaluate_multistep_objective(
            &model,
            &plan,
            &[x1[0], x1[1], x2[0], x2[1]],
            &Draws::mean(1),
            &params(),
            &rule(),
        )
        .unwrap();
        let fantasy = model.partial_fit(&x1, model.predict(&x1)).unwrap();
        let oracle = stochastic_acquisition(&model, &params(), &x1, &rule())
            + stochastic_acquisition(&fantasy, &params(), &x2, &rule());
        assert!((got - oracle).abs() < 1e-10, "{got} vs {oracle}");
    }
}

#[test]
fn single_branch_tree_is_certainty_equivalent_rollout() {
    let data = random_2d(5, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for model in models(&data, 0.5) {
        for h in [2, 3, 4] {
            let plan = HorizonPlan::fixed(h, 2).unwrap();
            let u: Vec<f64> = (0..h)
                .flat_map(|_| [rng.gen_range(-2.0..2.0), rng.gen_range(0.0..3.0)])
                .collect();
            let tree = evaluate_multistep_objective(
                &model,
                &plan,
                &u,
                &Draws::mean(h - 1),
                &params(),
                &rule(),
            )
            .unwrap();
            let rollout = evaluate_rollout_objective(
                &model,
                &plan,
                &u,
                SamplingKind::GaussHermite,
                &params(),
                &rule(),
                &mut rng,
            )
            .unwrap();
            assert!((tree - rollout).abs() < 1e-10);
        }
    }
}

#[test]
fn depthwise_path_weights_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for draws in [
        Draws::qmc(&[10, 5], &mut rng).unwrap(),
        Draws::gauss_hermite(&[10, 5]).unwrap(),
    ] {
        assert_eq!(draws.leaves(), 50);
        let depths = draws.path_weights();
        assert_eq!(
            depths.iter().map(Vec::len).collect::<Vec<_>>(),
            vec![1, 10, 50]
        );
        for level in depths {
            assert!((level.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(level.iter().all(|&w| w > 0.0 && w <= 1.0));
        }
    }
}

// Straight-line rollout with its own IDW and RBF formulas and a dense
// Gaussian-elimination solve: no shared code with the library besides the
// draws.
mod straight_line {
    pub fn idw_weights(xs: &[f64], x: f64) -> Vec<f64> {
        let raw: Vec<f64> = xs
            .iter()
            .map(|p| 1.0 / ((p - x) * (p - x)).max(1e-12))
            .collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|w| w / s).collect()
    }

    pub fn weight_sum(xs: &[f64], x: f64) -> f64 {
        xs.iter()
            .map(|p| 1.0 / ((p - x) * (p - x)).max(1e-12))
            .sum()
    }

    #[allow(clippy::needless_range_loop)]
    fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
                .unwrap();
            a.swap(c, p);
            b.swap(c, p);
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
        let mut out = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|k| a[r][k] * out[k]).sum();
            out[r] = (b[r] - s) / a[r][r];
        }
        out
    }

    pub fn rbf_predict(xs: &[f64], fs: &[f64], eps: f64, x: f64) -> f64 {
        let phi = |d: f64| 1.0 / (1.0 + eps * eps * d * d);
        let m = xs
            .iter()
            .map(|a| xs.iter().map(|b| phi(a - b)).collect())
            .collect();
        let beta = solve(m, fs.to_vec());
        xs.iter().zip(&beta).map(|(p, b)| b * phi(p - x)).sum()
    }

    pub fn stage_value(
        xs: &[f64],
        fs: &[f64],
        x: f64,
        rbf_eps: Option<f64>,
        lambda: f64,
        mu: f64,
        gh: &[(f64, f64)],
    ) -> (f64, f64, f64) {
        let v = idw_weights(xs, x);
        let fhat = match rbf_eps {
            Some(eps) => rbf_predict(xs, fs, eps, x),
            None => v.iter().zip(fs).map(|(a, b)| a * b).sum(),
        };
        let sigma = v
            .iter()
            .zip(fs)
            .map(|(a, f)| a * (fhat - f).powi(2))
            .sum::<f64>()
            .sqrt();
        let mut e_sigma = 0.0;
        for &(y, w) in gh {
            let zj = fhat + sigma * y;
            e_sigma += w * v
                .iter()
                .zip(fs)
                .map(|(a, f)| a * (zj - f).powi(2))
                .sum::<f64>()
                .sqrt();
        }
        let range = fs.iter().cloned().fold(f64::MIN, f64::max)
            - fs.iter().cloned().fold(f64::MAX, f64::min);
        let zeta = std::f64::consts::FRAC_2_PI * (1.0 / weight_sum(xs, x)).atan();
        (fhat - lambda * e_sigma - mu * range * zeta, fhat, sigma)
    }
}

#[test]
fn rollout_matches_straight_line_reimplementation() {
    let data = five_point_1d();
    let xs: Vec<f64> = data.points().map(|p| p[0]).collect();
    let r = rule();
    let gh: Vec<(f64, f64)> = r.normal_points().zip(r.weights().iter().copied()).collect();
    let p = params();
    let plan = HorizonPlan::fixed(3, 1).unwrap();
    for (model, eps) in [
        (
            Surrogate::Idw(IdwModel::new(data.clone(), 1e-12).unwrap()),
            None,
        ),
        (
            Surrogate::Rbf(RbfState::fit(data.clone(), 5.0, 1e-8).unwrap()),
            Some(5.0),
        ),
    ] {
        for seed in 0..5u64 {
            let u = [0.12 + 0.04 * seed as f64, 0.58, 0.88 - 0.05 * seed as f64];
            let rng = RandomStream::new(seed).substream(StreamLabel::PosteriorSampling);
            let draws = Draws::qmc(&[1, 1], &mut rng.clone()).unwrap();
            let got = evaluate_rollout_objective(
                &model,
                &plan,
                &u,
                SamplingKind::Qmc,
                &p,
                &r,
                &mut rng.clone(),
            )
            .unwrap();

            let mut xs = xs.clone();
            let mut fs = data.values().to_vec();
            let mut oracle = 0.0;
            for (t, &x) in u.iter().enumerate() {
                let (value, fhat, sigma) =
                    straight_line::stage_value(&xs, &fs, x, eps, p.lambda, p.mu, &gh);
                oracle += value;
                if t < 2 {
                    xs.push(x);
                    fs.push(fhat + sigma * draws.stage(t)[0].0);
                }
            }
            assert!(
                (got - oracle).abs() < 1e-10,
                "seed {seed}: {got} vs {oracle}"
            );
        }
    }
}

#[test]
fn rbf_tree_matches_recursive_refits() {
    let data = random_2d(11, 9);
    let model = Surrogate::Rbf(RbfState::fit(data, 0.5, 1e-8).unwrap());
    let plan_pts = vec![vec![0.9, 2.2], vec![-0.4, 1.1], vec![1.6, 0.3]];
    let u: Vec<f64> = plan_pts.concat();
    let plan = HorizonPlan::fixed(3, 2).unwrap();
    let got = evaluate_multistep_objective(
        &model,
        &plan,
        &u,
        &Draws::gauss_hermite(&[3, 2]).unwrap(),
        &params(),
        &rule(),
    )
    .unwrap();
    let oracle = recursive_tree(&model, &plan_pts, &[3, 2], &params(), &rule());
    assert!(
        (got - oracle).abs() < 1e-8 * (1.0 + oracle.abs()),
        "{got} vs {oracle}"
    );
}

#[test]
fn idw_tree_matches_recursive_refits() {
    let data = random_2d(12, 7);
    let model = Surrogate::Idw(IdwModel::new(data, 1e-12).unwrap());
    let plan_pts = vec![vec![1.1, 0.2], vec![-1.5, 2.9]];
    let plan = HorizonPlan::fixed(2, 2).unwrap();
    let got = evaluate_multistep_objective(
        &model,
        &plan,
        &plan_pts.concat(),
        &Draws::gauss_hermite(&[5]).unwrap(),
        &params(),
        &rule(),
    )
    .unwrap();
    let oracle = recursive_tree(&model, &plan_pts, &[5], &params(), &rule());
    assert!((got - oracle).abs() < 1e-12 * (1.0 + oracle.abs()));
}

#[test]
fn rollout_is_bit_reproducible() {
    let data = random_2d(2, 8);
    let plan = HorizonPlan::fixed(3, 2).unwrap();
    let u = [0.1, 0.2, -1.0, 2.0, 1.5, 1.5];
    for model in models(&data, 0.5) {
        let eval = || {
            let mut rng = RandomStream::new(42).substream(StreamLabel::PosteriorSampling);
            evaluate_rollout_objective(
                &model,
                &plan,
                &u,
                SamplingKind::Qmc,
                &params(),
                &rule(),
                &mut rng,
            )
            .unwrap()
        };
        assert_eq!(eval().to_bits(), eval().to_bits());
    }
}

fn config(strategy: Strategy, horizon: usize) -> LookaheadConfig {
    LookaheadConfig {
        strategy,
        horizon,
        scheme: SamplingScheme::new(SamplingKind::Qmc, vec![4, 2]).unwrap(),
        params: params(),
        rule: rule(),
        solver: SolveConfig {
            n_starts: 4,
            ..SolveConfig::default()
        },
    }
}

#[test]
fn last_iteration_reduces_to_stochastic_acquisition() {
    let data = random_2d(8, 6);
    let stream = RandomStream::new(8);
    for model in models(&data, 0.5) {
        for strategy in [Strategy::Rollout, Strategy::Multistep] {
            let cfg = config(strategy, 3);
            let q = next_query(&model, 20, 20, &cfg, &stream).unwrap();
            let mut rng = stream.substream_indexed(StreamLabel::Multistart, 20);
            let direct = minimize_box(
                |x| stochastic_acquisition(&model, &cfg.params, x, &cfg.rule),
                data.space().lower(),
                data.space().upper(),
                &cfg.solver,
                &mut rng,
            )
            .unwrap();
            assert_eq!(q, direct.point);
        }
    }
}

#[test]
fn horizon_one_rollout_is_myopic() {
    let data = random_2d(9, 6);
    let stream = RandomStream::new(3);
    for model in models(&data, 0.5) {
        for k in [6, 7, 12] {
            let a = next_query(&model, k, 30, &config(Strategy::Rollout, 1), &stream).unwrap();
            let b = next_query(&model, k, 30, &config(Strategy::Myopic, 4), &stream).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn pure_exploitation_finds_surrogate_minimizer() {
    let xs = [0.0, 0.15, 0.4, 0.55, 0.8, 1.0];
    let points: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
    let refs: Vec<&[f64]> = points.iter().map(|p| &p[..]).collect();
    let values: Vec<f64> = xs.iter().map(|x| (x - 0.47f64).powi(2)).collect();
    let data = dataset(&refs, &values, 0.0, 1.0);
    let stream = RandomStream::new(5);
    for model in models(&data, 1.0) {
        let cfg = LookaheadConfig {
            params: AcquisitionParams::new(0.0, 0.0).unwrap(),
            ..config(Strategy::Rollout, 1)
        };
        let q = next_query(&model, 6, 40, &cfg, &stream).unwrap();
        let grid_min = (0..=200_000)
            .map(|i| i as f64 / 200_000.0)
            .min_by(|a, b| model.predict(&[*a]).total_cmp(&model.predict(&[*b])))
            .unwrap();
        assert!((q[0] - grid_min).abs() < 1e-3, "{} vs {grid_min}", q[0]);
    }
}

#[test]
fn posterior_sample_moments() {
    let data = five_point_1d();
    let mut rng = RandomStream::new(1).substream(StreamLabel::PosteriorSampling);
    let x = [0.6];
    for model in models(&data, 2.0) {
        let fhat = model.predict(&x);
        let sigma = model.variance(&x);
        let draws = Draws::qmc(&[100_000], &mut rng).unwrap();
        let samples: Vec<f64> = draws
            .stage(0)
            .iter()
            .map(|&(z, _)| sample_posterior(&model, &x, z))
            .collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!((mean - fhat).abs() < 1e-2 * sigma);
        assert!((std - sigma).abs() < 0.02 * sigma);
    }
}

#[test]
fn finite_difference_gradient_is_consistent() {
    let data = random_2d(21, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let draws = Draws::qmc(&[4, 3], &mut rng).unwrap();
    let plan = HorizonPlan::fixed(3, 2).unwrap();
    for model in models(&data, 0.5) {
        for _ in 0..10 {
            let u: Vec<f64> = (0..3)
                .flat_map(|_| [rng.gen_range(-1.8..1.8), rng.gen_range(0.2..2.8)])
                .collect();
            let f = |v: &[f64]| {
                evaluate_multistep_objective(&model, &plan, v, &draws, &params(), &rule()).unwrap()
            };
            let grad = |h: f64| -> Vec<f64> {
                (0..u.len())
                    .map(|i| {
                        let (mut a, mut b) = (u.clone(), u.clone());
                        a[i] += h;
                        b[i] -= h;
                        (f(&a) - f(&b)) / (2.0 * h)
                    })
                    .collect()
            };
            let (g1, g2) = (grad(1e-6), grad(1e-5));
            let norm = g1.iter().map(|v| v * v).sum::<f64>().sqrt();
            let diff = g1
                .iter()
                .zip(&g2)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(diff <= 1e-4 * norm.max(1e-8), "{diff} vs {norm}");
        }
    }
}

#[test]
fn lookahead_never_mutates_the_model() {
    let data = random_2d(30, 8);
    let stream = RandomStream::new(30);
    for model in models(&data, 0.5) {
        let before = model.clone();
        for strategy in [Strategy::Rollout, Strategy::Multistep] {
            next_query(&model, 8, 30, &config(strategy, 2), &stream).unwrap();
        }
        assert_eq!(model, before);
    }
}

#[test]
fn sibling_order_does_not_matter() {
    let data = random_2d(40, 8);
    let plan = HorizonPlan::fixed(3, 2).unwrap();
    let u = [0.4, 0.9, -0.8, 2.1, 1.3, 0.6];
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let draws = Draws::qmc(&[3, 2], &mut rng).unwrap();
    // reorder first-level siblings by `perm`, carrying their subtrees along,
    // and reverse every second-level sibling group
    let perm = [2, 0, 1];
    let stage0: Vec<(f64, f64)> = perm.iter().map(|&i| draws.stage(0)[i]).collect();
    let stage1: Vec<(f64, f64)> = perm
        .iter()
        .flat_map(|&i| draws.stage(1)[2 * i..2 * i + 2].iter().rev().copied())
        .collect();
    let shuffled = Draws::from_table(vec![3, 2], vec![stage0, stage1]).unwrap();
    for model in models(&data, 0.5) {
        let a =
            evaluate_multistep_objective(&model, &plan, &u, &draws, &params(), &rule()).unwrap();
        let b =
            evaluate_multistep_objective(&model, &plan, &u, &shuffled, &params(), &rule()).unwrap();
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}

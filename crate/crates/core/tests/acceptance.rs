//! Acceptance criteria, run sequentially so the timing limits are measured
//! without competing test threads. Prints one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use rand::Rng as _;

use netdesign::car::{gls_fit, profile_mle, simulate_noiseless, CarParams, CarSampler, ResponseSimulator};
use netdesign::cli::{run_bench, BenchSpec, DesignMethod, SolverKind};
use netdesign::criteria::{d_efficiency, d_value, expected_random_efficiency, prop1_objective, Design};
use netdesign::netgraph::{compose_clusters, generate_random, ClusterSet, Network};
use netdesign::optimizer::{
    build_linearized_mip, build_modified_qubo, build_original_qubo, combine_clusters, solve_branch_bound, solve_brute,
    Balance, BranchBoundOptions,
};
use netdesign::rng::{rng_from_seed, substream};
use netdesign::simulation::{nth_random_design, random_design_study, variance_study, Estimator, StudyOptions};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn all_designs(n: usize) -> impl Iterator<Item = Design> {
    (0u32..1 << n).map(move |b| Design::new((0..n).map(|i| if b >> i & 1 == 1 { 1 } else { -1 }).collect()).unwrap())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn oracle_exactness() -> Outcome {
    let start = Instant::now();
    let (mut agree, mut total) = (0, 0);
    for k in 0..50u64 {
        let n = 6 + (k as usize % 9);
        let p = if k % 2 == 0 { 0.2 } else { 0.4 };
        let net = generate_random(n, p, 1000 + k).map_err(|e| e.to_string())?;
        let mut problems = Vec::new();
        for rho in [0.0, 0.2, 0.5] {
            problems.push((build_original_qubo(&net, rho).unwrap(), None));
        }
        problems.push((build_modified_qubo(&net), Some(Balance::calibrated(&net, 0.6).unwrap())));
        for (obj, bal) in &problems {
            let a = solve_brute(obj, bal.as_ref(), 24).unwrap();
            let b = solve_branch_bound(obj, bal.as_ref(), &BranchBoundOptions::default()).unwrap();
            total += 1;
            if close(a.objective, b.objective) && b.is_optimal() {
                agree += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        agree == total && secs < 60.0,
        format!("{agree}/{total} agree in {secs:.1}s"),
    )
}

fn objective_equivalence() -> Outcome {
    let mut mismatches = 0;
    for k in 0..20u64 {
        let n = 4 + (k as usize % 9);
        let net = generate_random(n, 0.4, 2000 + k).map_err(|e| e.to_string())?;
        let rho = [0.1, 0.3, 0.6, 0.9][k as usize % 4];
        let d: Vec<f64> = all_designs(n).map(|x| d_value(&net, &x, rho).unwrap()).collect();
        let q: Vec<f64> = all_designs(n)
            .map(|x| prop1_objective(&net, &x, rho).unwrap())
            .collect();
        let d_max = d.iter().cloned().fold(f64::MIN, f64::max);
        let q_min = q.iter().cloned().fold(f64::MAX, f64::min);
        mismatches += d
            .iter()
            .zip(&q)
            .filter(|(dv, qv)| close(**dv, d_max) != close(**qv, q_min))
            .count();
    }
    check(mismatches == 0, format!("{mismatches} mismatches over 20 networks"))
}

/// `det(XᵀQX)` with `X = [1, x]` and dense `Q = D − ρW`.
fn direct_det(net: &Network, x: &Design, rho: f64) -> f64 {
    let n = net.n();
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = net.degree(i) as f64;
        for &j in net.neighbors(i) {
            row[j] = -rho;
        }
    }
    let cols = [vec![1.0; n], x.as_f64()];
    let mut m = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for i in 0..n {
                for j in 0..n {
                    m[a][b] += cols[a][i] * q[i][j] * cols[b][j];
                }
            }
        }
    }
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn determinant_identity() -> Outcome {
    let mut rng = rng_from_seed(3);
    let mut worst = 0.0f64;
    for t in 0..10_000u64 {
        let n = rng.gen_range(2..=10);
        let p = rng.gen_range(0.3..0.9);
        let net = generate_random(n, p, t).map_err(|e| e.to_string())?;
        let rho = rng.gen_range(0.0..0.99);
        let x = nth_random_design(n, t, 0).unwrap();
        let direct = direct_det(&net, &x, rho);
        worst = worst.max((d_value(&net, &x, rho).unwrap() - direct).abs() / direct.abs());
    }
    check(
        worst <= 1e-9,
        format!("max relative error {worst:.2e} over 10^4 triples"),
    )
}

/// Inverse of a symmetric 3×3 matrix by cofactors.
fn inverse3(a: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let c = |r: usize, s: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (s1, s2) = ((s + 1) % 3, (s + 2) % 3);
        a[r1][s1] * a[r2][s2] - a[r1][s2] * a[r2][s1]
    };
    let det = a[0][0] * c(0, 0) + a[0][1] * c(0, 1) + a[0][2] * c(0, 2);
    let mut inv = [[0.0; 3]; 3];
    for (r, row) in inv.iter_mut().enumerate() {
        for (s, v) in row.iter_mut().enumerate() {
            *v = c(s, r) / det;
        }
    }
    inv
}

fn car_sampling() -> Outcome {
    let start = Instant::now();
    let tri = Network::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let sampler = CarSampler::new(&tri, 0.3, 2.0).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(4);
    let draws = 400_000;
    let mut sum = [0.0; 3];
    let mut cross = [[0.0; 3]; 3];
    for _ in 0..draws {
        let d = sampler.draw(&mut rng);
        for i in 0..3 {
            sum[i] += d[i];
            for j in 0..3 {
                cross[i][j] += d[i] * d[j];
            }
        }
    }
    let exact = inverse3([[2.0, -0.3, -0.3], [-0.3, 2.0, -0.3], [-0.3, -0.3, 2.0]]);
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let cov = (cross[i][j] - sum[i] * sum[j] / draws as f64) / (draws - 1) as f64;
            worst = worst.max((cov - 2.0 * exact[i][j]).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 0.03 && secs < 30.0,
        format!("max entry error {worst:.4} in {secs:.1}s"),
    )
}

struct ReferenceNetwork {
    net: Network,
    modified: Design,
}

fn reference_network() -> ReferenceNetwork {
    let net = generate_random(50, 0.1, 7).unwrap();
    let opts = BranchBoundOptions {
        time_budget: Duration::from_secs(300),
        ..Default::default()
    };
    let bal = Balance::calibrated(&net, 0.6).unwrap();
    let report = solve_branch_bound(&build_modified_qubo(&net), Some(&bal), &opts).unwrap();
    ReferenceNetwork {
        net,
        modified: report.design,
    }
}

fn efficiency_pattern(t: &ReferenceNetwork) -> Outcome {
    let e3 = d_efficiency(&t.net, &t.modified, 0.3).unwrap();
    let e2 = d_efficiency(&t.net, &t.modified, 0.2).unwrap();
    let r3 = expected_random_efficiency(&t.net, 0.3).unwrap();
    let r2 = expected_random_efficiency(&t.net, 0.2).unwrap();
    check(
        e3 >= 0.88 && e2 >= 0.92 && (r3 - 0.76).abs() <= 0.05 && (r2 - 0.82).abs() <= 0.05,
        format!("modified {e3:.4} (rho=0.3), {e2:.4} (rho=0.2); random {r3:.4}, {r2:.4}"),
    )
}

fn variance_pattern(t: &ReferenceNetwork) -> Outcome {
    let start = Instant::now();
    let params = CarParams::new(0.0, 2.0, 0.3, 1.0).unwrap();
    let opts = StudyOptions {
        reps: 500,
        estimator: Estimator::Car,
        seed: 21,
        noiseless: false,
    };
    let modified = variance_study(&t.net, &t.modified, params, &opts).map_err(|e| e.to_string())?;
    let random = random_design_study(&t.net, params, 100, &opts).map_err(|e| e.to_string())?;
    let ratio = modified.variance / random.mean_variance;
    let secs = start.elapsed().as_secs_f64();
    check(
        ratio <= 0.95 && secs < 600.0,
        format!(
            "modified {:.5} vs random {:.5}, ratio {ratio:.3} in {secs:.1}s",
            modified.variance, random.mean_variance
        ),
    )
}

fn linearization() -> Outcome {
    let mut failures = Vec::new();
    for k in 0..30u64 {
        let n = 3 + (k as usize % 8);
        let net = generate_random(n, 0.5, 3000 + k).map_err(|e| e.to_string())?;
        let (obj, bal) = if k % 2 == 0 {
            (build_original_qubo(&net, 0.1 * (k % 7) as f64).unwrap(), None)
        } else {
            (build_modified_qubo(&net), Some(Balance::calibrated(&net, 0.7).unwrap()))
        };
        let mip = build_linearized_mip(&obj, bal.as_ref()).unwrap();
        let quad_opt = solve_brute(&obj, bal.as_ref(), 24).unwrap().objective;
        let mut best = f64::INFINITY;
        let mut optima = Vec::new();
        for bits in 0u32..1 << n {
            let v: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let u = mip.optimal_products(&v);
            if !mip.is_feasible(&v, &u) {
                continue;
            }
            let value = mip.to_quadratic_value(mip.objective(&v, &u));
            if value < best - 1e-9 * best.abs().max(1.0) {
                best = value;
                optima.clear();
            }
            if close(value, best) {
                optima.push((v, u));
            }
        }
        let products_exact = optima.iter().all(|(v, u)| {
            mip.products
                .iter()
                .zip(u)
                .all(|(p, &uv)| uv == f64::from(u8::from(v[p.i] && v[p.j])))
        });
        if !close(best, quad_opt) || !products_exact {
            failures.push(k);
        }
    }
    check(
        failures.is_empty(),
        format!("{} of 30 instances disagree {failures:?}", failures.len()),
    )
}

fn cluster_combination() -> Outcome {
    let start = Instant::now();
    let mut clusters = Vec::new();
    for k in 0..20u64 {
        let net = generate_random(45 + (k as usize % 11), 0.1, 4000 + k).map_err(|e| e.to_string())?;
        let design = nth_random_design(net.n(), 4000 + k, 0).unwrap();
        clusters.push((net, design));
    }
    let combined = combine_clusters(&clusters).map_err(|e| e.to_string())?;
    let sums: Vec<i64> = clusters.iter().map(|(n, d)| d.degree_imbalance(n)).collect();
    let exhaustive = (0u32..1 << 20)
        .map(|mask| {
            let t: i64 = sums
                .iter()
                .enumerate()
                .map(|(k, s)| if mask >> k & 1 == 1 { -s } else { *s })
                .sum();
            i128::from(t) * i128::from(t)
        })
        .min()
        .unwrap();
    let union = compose_clusters(&ClusterSet::new(clusters.iter().map(|(n, _)| n.clone()).collect()).unwrap()).unwrap();
    let achieved = i128::from(combined.design.degree_imbalance(&union)).pow(2);
    let secs = start.elapsed().as_secs_f64();
    check(
        combined.value == exhaustive && achieved == exhaustive && combined.signs[0] == 1 && secs < 30.0,
        format!("combined {} vs exhaustive {exhaustive} in {secs:.1}s", combined.value),
    )
}

fn estimation() -> Outcome {
    let net = generate_random(50, 0.1, 5).unwrap();
    let x = nth_random_design(50, 5, 0).unwrap();
    let truth = CarParams::new(1.5, 2.0, 0.2, 1.0).unwrap();
    let y = simulate_noiseless(&net, &x, truth).unwrap();
    let mut gls_err = 0.0f64;
    for rho in [0.0, 0.2, 0.5, 0.9] {
        let (b0, b) = gls_fit(&net, &x, &y, rho).unwrap();
        gls_err = gls_err.max((b0 - 1.5).abs()).max((b - 2.0).abs());
    }
    let sim = ResponseSimulator::new(&net, CarParams::default()).unwrap();
    let mut rho_sum = 0.0;
    for r in 0..100 {
        let y = sim.draw(&x, &mut substream(55, r)).unwrap();
        rho_sum += profile_mle(&net, &x, &y).unwrap().rho_hat.unwrap();
    }
    let mean = rho_sum / 100.0;
    check(
        gls_err <= 1e-10 && (mean - 0.2).abs() <= 0.10,
        format!("GLS error {gls_err:.1e}; mean rho_hat {mean:.4}"),
    )
}

fn runtime_growth() -> Outcome {
    let rows = run_bench(&BenchSpec {
        nodes: vec![10, 15, 20, 25],
        densities: vec![0.1],
        methods: vec![DesignMethod::Original],
        rhos: vec![0.2],
        alphas: vec![],
        solver: SolverKind::BranchBound,
        time_budget: Duration::from_secs(60),
        repeats: 5,
        trials: 20,
        seed: 3,
    })
    .map_err(|e| e.to_string())?;
    let medians: Vec<f64> = [10, 15, 20, 25]
        .iter()
        .map(|&n| {
            let mut t: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.seconds).collect();
            t.sort_by(f64::total_cmp);
            t[t.len() / 2]
        })
        .collect();
    let us: Vec<String> = medians.iter().map(|s| format!("{:.1}us", s * 1e6)).collect();
    check(
        medians.windows(2).all(|w| w[0] <= w[1]),
        format!("median solve time over n=10,15,20,25: {}", us.join(", ")),
    )
}

fn main() {
    let reference = reference_network();
    let criteria: Vec<Criterion> = vec![
        ("branch-and-bound equals brute force", Box::new(oracle_exactness)),
        ("objective equivalence", Box::new(objective_equivalence)),
        ("determinant identity", Box::new(determinant_identity)),
        ("CAR sampling covariance", Box::new(car_sampling)),
        ("efficiency pattern", Box::new(|| efficiency_pattern(&reference))),
        ("variance pattern", Box::new(|| variance_pattern(&reference))),
        ("linearization exactness", Box::new(linearization)),
        ("cluster combination", Box::new(cluster_combination)),
        ("estimation", Box::new(estimation)),
        ("runtime growth", Box::new(runtime_growth)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Acceptance suite. Runs every criterion in sequence (timings stay
//! meaningful on a busy machine), prints one PASS/FAIL line each and exits
//! non-zero if any fails. A positional argument filters criteria by name.

mod oracle;

use std::time::Instant;

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use septensor_cli::experiments::schulz::{self, Params as SchulzParams};
use septensor_cli::experiments::{ortho, redundant, scaling, spectra};
use septensor_cli::CliError;
use septensor_core::linalg::{matrix_id, randomized_matrix_id, sym_id};
use septensor_core::sgti::{build_kronecker_sum, schulz_invert, SchulzConfig, SchulzTrace};
use septensor_core::snorm::{rank_one_approx, s_norm, s_norm_diff, InitStrategy};
use septensor_core::tensor_id::{
    projection_matrix, random_rank_one, tensor_id_randomized, Distribution, RandomTensorConfig,
};
use septensor_core::{Ctd, Error, Matrix, RankSpec};

use oracle::{dense, dist, kron_sum_dense, norm, norm2, singular_values, term_matrix, to_na};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = (u32, &'static str, fn() -> Verdict);

const CRITERIA: [Criterion; 10] = [
    (1, "spectra", c1_spectra),
    (2, "redundant", c2_redundant),
    (3, "matrix-id", c3_matrix_id),
    (4, "sym-id", c4_sym_id),
    (5, "tensor-id-chain", c5_tensor_id_chain),
    (6, "q-factorization", c6_q_factorization),
    (7, "s-norm", c7_s_norm),
    (8, "ortho-limit", c8_ortho_limit),
    (9, "schulz", c9_schulz),
    (10, "scaling", c10_scaling),
];

fn main() {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (id, name, f) in CRITERIA {
        if filter.as_ref().is_some_and(|s| !name.contains(s.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let v = f();
        let secs = t0.elapsed().as_secs_f64();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {name}: {} [{secs:.1} s]", v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn gaussian(rows: usize, cols: usize, rng: &mut StdRng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn from_na(a: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// `X·diag(s)·Yᵀ` with Gaussian `X`, `Y`.
fn planted(m: usize, n: usize, s: &[f64], rng: &mut StdRng) -> DMatrix<f64> {
    let x = gaussian(m, s.len(), rng);
    let y = gaussian(n, s.len(), rng);
    x * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(s)) * y.transpose()
}

fn random_ctd(dims: &[usize], r: usize, rng: &mut StdRng) -> Ctd {
    let comps = dims
        .iter()
        .map(|&m| Matrix::from_fn(m, r, |_, _| rng.sample(StandardNormal)))
        .collect();
    let w = (0..r).map(|_| rng.random_range(0.1..2.0)).collect();
    Ctd::from_raw(w, comps).expect("finite random tensor")
}

fn random_dims(rng: &mut StdRng, d_max: usize, m_max: usize) -> Vec<usize> {
    let d = rng.random_range(2..=d_max);
    (0..d).map(|_| rng.random_range(2..=m_max)).collect()
}

fn c1_spectra() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut slowest: f64 = 0.0;
    for dist in Distribution::ALL {
        let mut good = 0;
        let mut gram = Vec::new();
        let mut proj = Vec::new();
        for seed in 0..5 {
            let p = spectra::Params {
                distribution: dist,
                seed,
                ..spectra::Params::default()
            };
            let out = match spectra::run(&p) {
                Ok(o) => o,
                Err(e) => return Verdict::new(false, format!("{dist}: {e}")),
            };
            slowest = slowest.max(out.seconds);
            if (30..=40).contains(&out.rank_gram) && (70..=85).contains(&out.rank_proj) {
                good += 1;
            }
            gram.push(out.rank_gram);
            proj.push(out.rank_proj);
        }
        ok &= good >= 4;
        parts.push(format!("{dist} {good}/5 (G {gram:?}, Y {proj:?})"));
    }
    ok &= slowest < 60.0;
    Verdict::new(
        ok,
        format!(
            "ranks at 1e-15, need G in [30,40] and Y in [70,85] for >=4/5 seeds: {}; slowest run {slowest:.2} s",
            parts.join("; ")
        ),
    )
}

fn c2_redundant() -> Verdict {
    let out = match redundant::run(&redundant::Params::default()) {
        Ok(o) => o,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let rows: Vec<_> = out.randomized.iter().filter(|r| r.ell >= 80).collect();
    let rand_ok = !rows.is_empty()
        && rows
            .iter()
            .all(|r| r.snorm_rel_err <= 1e-12 && (67..=73).contains(&r.rank));
    let worst = rows.iter().map(|r| r.snorm_rel_err).fold(0.0, f64::max);
    let ranks: Vec<usize> = rows.iter().map(|r| r.rank).collect();
    let g = &out.gram;
    let gram_ok = (1e-9..=1e-7).contains(&g.snorm_rel_err) && (33..=38).contains(&g.rank);
    Verdict::new(
        rand_ok && gram_ok && out.seconds < 120.0,
        format!(
            "randomized ell>=80: ranks {ranks:?}, worst s-error {worst:.2e} (need 70+-3, <=1e-12); \
             gram: rank {}, s-error {:.2e} (need 33..38, [1e-9,1e-7]); {:.1} s",
            g.rank, g.snorm_rel_err, out.seconds
        ),
    )
}

fn c3_matrix_id() -> Verdict {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(3);
    let mut det_fail = Vec::new();
    let (mut rand_ok, mut rand_total) = (0, 0);
    for trial in 0..50 {
        let m = rng.random_range(10..=200);
        let n = rng.random_range(10..=200);
        let k0 = rng.random_range(1..=30.min(m.min(n) - 1));
        let s: Vec<f64> = (0..k0)
            .map(|i| 10f64.powf(-3.0 * i as f64 / k0 as f64))
            .collect();
        let a = planted(m, n, &s, &mut rng) + gaussian(m, n, &mut rng) * 1e-8;
        let tau = singular_values(&a);
        let am = from_na(&a);
        // Every tenth trial exercises the exact full-rank property.
        let k = if trial % 10 == 9 { m.min(n) } else { k0 };
        let id = match matrix_id(&am, RankSpec::Fixed(k)) {
            Ok(id) => id,
            Err(e) => return Verdict::new(false, format!("trial {trial}: {e}")),
        };
        let p = to_na(&id.p);
        let err = norm2(&(to_na(&id.reconstruct()) - &a));
        let kf = k as f64;
        let nk = (kf * (n - k) as f64 + 1.0).sqrt();
        let identity = id
            .skeleton_indices
            .iter()
            .enumerate()
            .all(|(i, &c)| (0..k).all(|r| id.p[(r, c)] == if r == i { 1.0 } else { 0.0 }));
        let bounded = id.p.max_abs() <= 1.0;
        let sp = singular_values(&p);
        let pnorm = sp[0] <= nk * (1.0 + 1e-12);
        let pmin = *sp.last().unwrap() >= 1.0 - 1e-12;
        let accurate = if k == m.min(n) {
            err <= 1e-12 * tau[0]
        } else {
            err <= nk * tau[k] * (1.0 + 1e-10)
        };
        if !(identity && bounded && pnorm && pmin && accurate) {
            det_fail.push(trial);
        }
        if k < m.min(n) {
            for seed in 0..4u64 {
                let ell = (k + 10).min(m);
                let mut r2 = StdRng::seed_from_u64(1000 * trial as u64 + seed);
                let rid = match randomized_matrix_id(&am, ell, RankSpec::Fixed(k), &mut r2) {
                    Ok(id) => id,
                    Err(e) => return Verdict::new(false, format!("trial {trial}: {e}")),
                };
                let rerr = norm2(&(to_na(&rid.reconstruct()) - &a));
                rand_total += 1;
                if rerr <= (4.0 * kf * (n - k) as f64 + 1.0).sqrt() * tau[k] {
                    rand_ok += 1;
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let frac = rand_ok as f64 / rand_total as f64;
    Verdict::new(
        det_fail.is_empty() && frac >= 0.9 && secs < 30.0,
        format!(
            "deterministic failures {det_fail:?} of 50; randomized bound met in {rand_ok}/{rand_total} trials (need >=90%)"
        ),
    )
}

fn c4_sym_id() -> Verdict {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let mut fails = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for trial in 0..20 {
        let n = rng.random_range(5..=60);
        let m = rng.random_range(n..=n + 60);
        let k = rng.random_range(1..n);
        let mut s: Vec<f64> = (0..k)
            .map(|i| 10f64.powf(-2.0 * i as f64 / k as f64))
            .collect();
        s.extend((k..n).map(|i| 1e-3 * 10f64.powf(-((i - k) as f64) / n as f64)));
        let a = planted(m, n, &s, &mut rng);
        let b = a.transpose() * &a;
        let id = match sym_id(&from_na(&b), RankSpec::Fixed(k)) {
            Ok(id) => id,
            Err(e) => return Verdict::new(false, format!("trial {trial}: {e}")),
        };
        let bk = to_na(&id.reconstruct());
        let err_b = norm2(&(&b - &bk));
        let (nf, kf) = (n as f64, k as f64);
        let bound = (1.0 + (nf * kf * (nf - kf)).sqrt()) * id.eps_k;
        let p = to_na(&id.p);
        let cols: Vec<usize> = id.skeleton_indices.clone();
        let ac = DMatrix::from_fn(m, k, |i, j| a[(i, cols[j])]);
        let err_a = norm2(&(&a - ac * p));
        let rel = (err_a - err_b.sqrt()).abs() / err_a;
        worst_rel = worst_rel.max(rel);
        if err_b > bound * (1.0 + 1e-10) || rel > 1e-6 {
            fails.push(trial);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    Verdict::new(
        fails.is_empty() && secs < 20.0,
        format!("failures {fails:?} of 20; worst |‖A−A_cP‖ − ‖B−B_k‖^½| relative {worst_rel:.1e}"),
    )
}

fn c5_tensor_id_chain() -> Verdict {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let mut fails = Vec::new();
    for trial in 0..30 {
        let dims = random_dims(&mut rng, 4, 8);
        let r = rng.random_range(2..=10);
        let u = random_ctd(&dims, r, &mut rng);
        let k = rng.random_range(1..r);
        let cfg = RandomTensorConfig::new(Distribution::Normal, trial);
        let out = match tensor_id_randomized(&u, r, RankSpec::Fixed(k), &cfg) {
            Ok(o) => o,
            Err(e) => return Verdict::new(false, format!("trial {trial}: {e}")),
        };
        // Rebuild the coefficient matrix from the same projections.
        let rs: Vec<Ctd> = (0..r as u64)
            .map(|l| random_rank_one(&dims, &cfg, l).unwrap())
            .collect();
        let y = projection_matrix(&u, &rs).unwrap();
        let id = matrix_id(&y, RankSpec::Fixed(k)).unwrap();
        if id.skeleton_indices != out.skeleton_indices {
            fails.push(trial);
            continue;
        }
        let umat = term_matrix(&u);
        let uc = DMatrix::from_fn(umat.nrows(), k, |i, j| umat[(i, id.skeleton_indices[j])]);
        let uk = uc * to_na(&id.p);
        let diff = &umat - &uk;
        let tensor_err = dist(&dense(&u), &dense(&out.reduced));
        // The reduced CTD is the row sum of U_k.
        let rowsum: Vec<f64> = (0..uk.nrows()).map(|i| uk.row(i).sum()).collect();
        let consistent = dist(&rowsum, &dense(&out.reduced)) <= 1e-12 * norm(&dense(&u)).max(1.0);
        let rf = r as f64;
        let mid = rf.sqrt() * diff.norm();
        let top = rf * norm2(&diff);
        let slack = 1e-12 * norm(&dense(&u));
        if !(consistent && tensor_err <= mid + slack && mid <= top * (1.0 + 1e-12) + slack) {
            fails.push(trial);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    Verdict::new(
        fails.is_empty() && secs < 20.0,
        format!("‖𝒰−𝒰_k‖_F ≤ √r‖U−U_k‖_F ≤ r‖U−U_k‖_2 violated in {fails:?} of 30"),
    )
}

fn c6_q_factorization() -> Verdict {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst_norm: f64 = 0.0;
    let mut worst_err: f64 = 0.0;
    for trial in 0..20 {
        let dims = random_dims(&mut rng, 4, 12);
        let r = rng.random_range(2..=6);
        let u = random_ctd(&dims, r, &mut rng);
        let qf = match u.q_factorize(0.0) {
            Ok(q) => q,
            Err(e) => return Verdict::new(false, format!("trial {trial}: {e}")),
        };
        let du = dense(&u);
        let nu = norm(&du);
        worst_norm = worst_norm.max((nu - norm(&dense(&qf.s))).abs() / nu);
        let cfg = RandomTensorConfig::new(Distribution::Normal, trial);
        let sk = tensor_id_randomized(&qf.s, r, RankSpec::Fixed(r - 1), &cfg).unwrap();
        let uk = qf.expand(&sk.reduced).unwrap();
        let e_u = dist(&du, &dense(&uk));
        let e_s = dist(&dense(&qf.s), &dense(&sk.reduced));
        worst_err = worst_err.max((e_u - e_s).abs() / e_u);
    }
    Verdict::new(
        worst_norm <= 1e-10 && worst_err <= 1e-10,
        format!("worst |‖𝒰‖−‖𝒮‖|/‖𝒰‖ {worst_norm:.1e}; worst reduction-error transfer {worst_err:.1e} (need <=1e-10)"),
    )
}

fn c7_s_norm() -> Verdict {
    let mut rng = StdRng::seed_from_u64(7);
    let mut issues = Vec::new();
    let mut worst_var: f64 = 0.0;
    for trial in 0..50 {
        let dims = random_dims(&mut rng, 5, 6);
        let r = rng.random_range(1..=8);
        let u = random_ctd(&dims, r, &mut rng);
        let sn = s_norm(&u);
        let fro = u.frob_norm();
        let sum: f64 = u.svals().iter().sum();
        let l2 = u.svals().iter().map(|s| s * s).sum::<f64>().sqrt();
        if fro * fro / sum > sn * (1.0 + 1e-12) {
            issues.push(format!("lower bound #{trial}"));
        }
        if sn > fro * (1.0 + 1e-12) {
            issues.push(format!("frobenius bound #{trial}"));
        }
        if sn > l2 * (1.0 + 1e-12) {
            issues.push(format!("upper bound #{trial} ({:.3} > {:.3})", sn, l2));
        }
        for alpha in [-3.5, 0.25, 7.0] {
            let scaled = s_norm(&u.scale(alpha).unwrap());
            if (scaled - alpha.abs() * sn).abs() > 1e-10 * alpha.abs() * sn {
                issues.push(format!("homogeneity #{trial}"));
            }
        }
        for init in InitStrategy::ALL {
            let a = rank_one_approx(&u, init, 200, 1e-14);
            if a.history.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-12)) {
                issues.push(format!("monotone #{trial}"));
            }
            let du = dense(&u);
            let dx = dense(&a.to_ctd().unwrap());
            let lhs = dist(&du, &dx).powi(2);
            let rhs = norm(&du).powi(2) - a.sigma * a.sigma;
            let rel = (lhs - rhs).abs() / norm(&du).powi(2);
            worst_var = worst_var.max(rel);
            if rel > 1e-10 {
                issues.push(format!("variational #{trial}"));
            }
        }
        if s_norm_diff(&u, &u).unwrap() > 1e-12 * fro {
            issues.push(format!("self-difference #{trial}"));
        }
    }
    issues.dedup();
    Verdict::new(
        issues.is_empty(),
        format!("50 tensors; worst variational mismatch {worst_var:.1e}; issues {issues:?}"),
    )
}

fn c8_ortho_limit() -> Verdict {
    let out = match ortho::run(&ortho::Params::default()) {
        Ok(o) => o,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let mut bad = Vec::new();
    for r in &out.rows {
        let ok = match r.case {
            ortho::Case::Flat => r.eps < 0.3 && r.rank == 8,
            ortho::Case::Decaying => r.parseval.is_some() && r.matches_parseval(),
        };
        if !ok {
            bad.push(format!("{}/{}/{}", r.case.name(), r.path.name(), r.eps));
        }
    }
    Verdict::new(
        bad.is_empty(),
        format!(
            "{} rows (flat: all 8 terms kept; decaying: skeleton equals the Parseval set); mismatches {bad:?}",
            out.rows.len()
        ),
    )
}

/// Quadratic-tail, rank and final-error checks on a Schulz trace.
fn schulz_trace_checks(
    trace: &SchulzTrace,
    eps_reduce: f64,
    cap: usize,
) -> (bool, bool, bool, String) {
    let recs = &trace.records;
    let floor = 100.0 * eps_reduce;
    let mut pairs = 0;
    let mut quad_ok = true;
    for w in recs.windows(2) {
        let (e0, e1) = (w[0].error, w[1].error);
        if e0 < 0.5 && 2.0 * e0 * e0 > floor {
            pairs += 1;
            quad_ok &= e1 <= 2.0 * e0 * e0;
        }
    }
    let a = pairs > 0 && quad_ok;
    let within_cap = recs.iter().all(|r| r.rank_post_id <= cap);
    let compressing = recs
        .iter()
        .filter(|r| r.rank_pre >= 2 * r.rank_post_id)
        .count();
    let b = within_cap && compressing >= 3;
    let last = trace.final_error().unwrap_or(f64::NAN);
    let c = last <= 1e-8;
    let errors: Vec<String> = recs.iter().map(|r| format!("{:.1e}", r.error)).collect();
    let ranks: Vec<String> = recs
        .iter()
        .map(|r| format!("{}->{}", r.rank_pre, r.rank_post_id))
        .collect();
    (
        a,
        b,
        c,
        format!(
            "(a) {} over {pairs} pairs, (b) cap {} / {compressing} compressing steps, (c) final {last:.1e}; \
             E {errors:?}; ranks {ranks:?}",
            if a { "ok" } else { "no" },
            if within_cap { "ok" } else { "exceeded" },
        ),
    )
}

fn diag_kronecker_check() -> Result<f64, Error> {
    let d = Matrix::diag(&[1.0, 2.0]);
    let b = build_kronecker_sum(&d, 2)?;
    let cfg = SchulzConfig {
        eps_reduce: 1e-14,
        target: 1e-13,
        ..SchulzConfig::default()
    };
    let (x, _) = schulz_invert(&b, &cfg)?;
    let dd = to_na(&d);
    let i2 = DMatrix::<f64>::identity(2, 2);
    let dense_b = kron_sum_dense(&[1.0, 1.0], &[vec![dd.clone(), i2.clone()], vec![i2, dd]]);
    let inv = dense_b.try_inverse().expect("positive diagonal");
    let factors: Vec<Vec<DMatrix<f64>>> = (0..x.rank())
        .map(|l| (0..2).map(|j| to_na(&x.factor(l, j))).collect())
        .collect();
    let dense_x = kron_sum_dense(x.svals(), &factors);
    Ok(norm2(&(dense_x - inv)))
}

fn c9_schulz() -> Verdict {
    let t0 = Instant::now();
    let p = SchulzParams::default();
    let (trace, status) = match schulz::run(&p) {
        Ok(o) => (o.trace, "completed".to_string()),
        Err(CliError::Numerical(Error::RankOverflow { rank, cap, trace })) => {
            (*trace, format!("rank overflow {rank} > {cap}"))
        }
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let (a, b, c, detail) = schulz_trace_checks(&trace, p.eps_reduce, p.max_rank);
    let small = diag_kronecker_check();
    let small_ok = matches!(small, Ok(e) if e <= 1e-10);
    let secs = t0.elapsed().as_secs_f64();
    Verdict::new(
        a && b && c && small_ok && secs < 600.0,
        format!(
            "m={} d={} order {}: {status}; {detail}; diag(1,2) dense error {}",
            p.m,
            p.d,
            p.order,
            match small {
                Ok(e) => format!("{e:.1e}"),
                Err(e) => e.to_string(),
            }
        ),
    )
}

fn c10_scaling() -> Verdict {
    let p = scaling::Params {
        repeats: 5,
        ..scaling::Params::default()
    };
    let out = match scaling::run(&p) {
        Ok(o) => o,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let rows: Vec<_> = out.rows_for(scaling::Stage::TensorId).collect();
    let num: f64 = rows.iter().map(|r| r.seconds * r.d as f64).sum();
    let den: f64 = rows.iter().map(|r| (r.d * r.d) as f64).sum();
    let c = num / den;
    let ratios: Vec<f64> = rows.iter().map(|r| r.seconds / (c * r.d as f64)).collect();
    let ok = ratios.iter().all(|q| (0.5..=2.0).contains(q));
    let times: Vec<String> = rows
        .iter()
        .map(|r| format!("d={} {:.2e}s", r.d, r.seconds))
        .collect();
    let als = out
        .rows_for(scaling::Stage::Als)
        .next()
        .map_or("none".to_string(), |r| {
            format!("{:.2e}s at rank {}", r.seconds, r.rank)
        });
    Verdict::new(
        ok,
        format!(
            "tensor ID {times:?}; measured/fit ratios {:?} (need within [0.5, 2]); illustrative ALS {als}",
            ratios.iter().map(|q| format!("{q:.2}")).collect::<Vec<_>>()
        ),
    )
}

mod common;

use std::sync::Arc;

use adares::certificates::{least_squares_conjugate, logistic_conjugate, regularizer_conjugate};
use adares::data_io::{parse_libsvm, synth_strongly_convex, write_libsvm, Dataset};
use adares::problem::{least_squares_value_grad, logistic_value_grad, Logistic, SmoothOracle};
use adares::restart::{ada_res, AdaResConfig};
use adares::schemes::run_inner;
use adares::{CompositeProblem, CsrMatrix, DesignMatrix, Regularizer, SchemeKind};
use common::*;
use proptest::prelude::*;

fn regularizers() -> impl Strategy<Value = Regularizer> {
    prop_oneof![
        Just(Regularizer::Zero),
        (0.0..5.0f64).prop_map(|l| Regularizer::L1 { lambda: l }),
        (0.0..5.0f64, 0.0..5.0f64).prop_map(|(a, b)| Regularizer::ElasticNet { l1: a, l2: b }),
    ]
}

/// Optimality of `p = prox(x)` for `½v(x − y)² + ψ(y)`: `v(x − p) ∈ ∂ψ(p)`.
fn prox_optimal(reg: Regularizer, x: f64, v: f64, p: f64) -> bool {
    let r = v * (x - p);
    let tol = 1e-9 * (1.0 + r.abs());
    let (l1, l2) = match reg {
        Regularizer::Zero => return (x - p).abs() <= 1e-12 * (1.0 + x.abs()),
        Regularizer::L1 { lambda } => (lambda, 0.0),
        Regularizer::ElasticNet { l1, l2 } => (l1, l2),
    };
    let smooth_part = l2 * p;
    if p == 0.0 {
        r.abs() <= l1 + tol
    } else {
        (r - smooth_part - l1 * p.signum()).abs() <= tol
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prox_satisfies_subgradient_condition(reg in regularizers(), x in -50.0..50.0f64, v in 0.01..100.0f64) {
        let p = reg.prox_coord(x, v);
        prop_assert!(prox_optimal(reg, x, v, p), "reg {reg:?} x {x} v {v} p {p}");
    }

    #[test]
    fn prox_is_nonexpansive(reg in regularizers(), a in -50.0..50.0f64, b in -50.0..50.0f64, v in 0.01..100.0f64) {
        let d = (reg.prox_coord(a, v) - reg.prox_coord(b, v)).abs();
        prop_assert!(d <= (a - b).abs() * (1.0 + 1e-12));
    }

    #[test]
    fn least_squares_gradient_matches_finite_differences(seed in 0u64..1000) {
        let mut r = rng(seed);
        let a = Dense::random(&mut r, 6, 4);
        let b = gauss_vec(&mut r, 6);
        let x = gauss_vec(&mut r, 4);
        let (_, g) = least_squares_value_grad(&a.design(), &b, &x).unwrap();
        let f = |x: &[f64]| {
            let res: Vec<f64> = a.mul(x).iter().zip(&b).map(|(p, q)| p - q).collect();
            0.5 * sq(&res)
        };
        for i in 0..4 {
            let h = 1e-6;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            prop_assert!(rel_close(fd, g[i], 1e-6), "{fd} vs {}", g[i]);
        }
    }

    #[test]
    fn logistic_gradient_matches_finite_differences(seed in 0u64..1000, c in 0.01..10.0f64) {
        let mut r = rng(seed);
        let a = Dense::random(&mut r, 7, 3);
        let b: Vec<f64> = (0..7).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let x = gauss_vec(&mut r, 3);
        let (v, g) = logistic_value_grad(&a.design(), &b, c, &x).unwrap();
        let f = |x: &[f64]| -> f64 {
            a.mul(x).iter().zip(&b).map(|(m, bj)| c * (1.0 + (bj * m).exp()).ln()).sum()
        };
        prop_assert!(rel_close(v, f(&x), 1e-12));
        for i in 0..3 {
            let h = 1e-6;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            prop_assert!(rel_close(fd, g[i], 1e-6), "{fd} vs {}", g[i]);
        }
    }

    #[test]
    fn descent_lemma_with_default_weights(seed in 0u64..1000, lambda1 in 1.0..1000.0f64) {
        let mut r = rng(seed);
        let a = Dense::random(&mut r, 12, 5);
        let b: Vec<f64> = (0..12).map(|_| if gauss(&mut r) > 0.0 { 1.0 } else { -1.0 }).collect();
        let x = gauss_vec(&mut r, 5);
        let y = gauss_vec(&mut r, 5);
        for p in [
            CompositeProblem::lasso(a.design(), b.clone(), lambda1).unwrap(),
            CompositeProblem::logistic(a.design(), b.clone(), lambda1, None).unwrap(),
        ] {
            let s = p.smooth();
            let g = s.gradient(&x);
            let lin: f64 = g.iter().zip(&y).zip(&x).map(|((gi, yi), xi)| gi * (yi - xi)).sum();
            let upper = s.value(&x) + lin + 0.5 * p.dist_sq(&y, &x);
            prop_assert!(s.value(&y) <= upper + 1e-9 * (1.0 + upper.abs()));
        }
    }

    #[test]
    fn iterates_satisfy_three_sequence_relation(seed in 0u64..500, apg in any::<bool>()) {
        let case = random_lasso(seed, 15, 8);
        let scheme = if apg { SchemeKind::Apg } else { SchemeKind::Fista };
        let mut r = rng(seed + 7);
        let x0 = gauss_vec(&mut r, 8);
        let mut prev_x = x0.clone();
        let mut ok = true;
        run_inner(&case.problem, &x0, 40, scheme, None, |st| {
            let th = st.last_theta;
            for i in 0..st.x.len() {
                let rhs = (1.0 - th) * prev_x[i] + th * st.z[i];
                if (st.x[i] - rhs).abs() > 1e-10 * (1.0 + st.x[i].abs()) {
                    ok = false;
                }
            }
            prev_x = st.x.clone();
            true
        });
        prop_assert!(ok);
    }

    #[test]
    fn objective_never_exceeds_start(seed in 0u64..500, apg in any::<bool>(), k in 1usize..60) {
        let case = random_lasso(seed, 20, 10);
        let scheme = if apg { SchemeKind::Apg } else { SchemeKind::Fista };
        let x0 = gauss_vec(&mut rng(seed ^ 0xabc), 10);
        let f0 = lasso_value(&case.a, &case.b, case.weight, &x0);
        let mut worst = f64::NEG_INFINITY;
        run_inner(&case.problem, &x0, k, scheme, None, |st| {
            worst = worst.max(lasso_value(&case.a, &case.b, case.weight, &st.x));
            true
        });
        prop_assert!(worst <= f0 + 1e-8 * (1.0 + f0.abs()));
    }

    #[test]
    fn fundamental_estimate_on_quadratic(seed in 0u64..200, cond in 1.0..1e4f64, apg in any::<bool>()) {
        let fx = synth_strongly_convex(6, cond, seed).unwrap();
        let scheme = if apg { SchemeKind::Apg } else { SchemeKind::Fista };
        let x0 = gauss_vec(&mut rng(seed + 1), 6);
        let rhs = 0.5 * fx.dist_sq(&x0);
        let mut ok = true;
        run_inner(&fx.problem, &x0, 80, scheme, None, |st| {
            let th = st.last_theta;
            let lhs = fx.problem.value(&st.x) / (th * th) + 0.5 * fx.dist_sq(&st.z);
            ok &= lhs <= rhs * (1.0 + 1e-8) + 1e-14;
            true
        });
        prop_assert!(ok);
    }

    #[test]
    fn schemes_agree_without_regularizer(seed in 0u64..200) {
        let (_, p) = random_quadratic(seed, 10, 6);
        let x0 = gauss_vec(&mut rng(seed), 6);
        let a = run_inner(&p, &x0, 50, SchemeKind::Fista, None, |_| true);
        let b = run_inner(&p, &x0, 50, SchemeKind::Apg, None, |_| true);
        let scale = 1.0 + sq(&a.x).sqrt();
        for (u, v) in a.x.iter().zip(&b.x) {
            prop_assert!((u - v).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn fenchel_young_inequality(seed in 0u64..1000, c in 0.1..5.0f64) {
        let mut r = rng(seed);
        let m = 5;
        let b: Vec<f64> = (0..m).map(|j| if j % 3 == 0 { -1.0 } else { 1.0 }).collect();
        let z = gauss_vec(&mut r, m);
        // least squares: any u
        let u = gauss_vec(&mut r, m);
        let g_ls = 0.5 * z.iter().zip(&b).map(|(zi, bi)| (zi - bi).powi(2)).sum::<f64>();
        let zu: f64 = z.iter().zip(&u).map(|(a, b)| a * b).sum();
        prop_assert!(g_ls + least_squares_conjugate(&b, &u) >= zu - 1e-10 * (1.0 + zu.abs()));
        // logistic: u in the conjugate domain, u_j = c b_j q_j with q_j in (0, 1)
        let u: Vec<f64> = b.iter().map(|bj| c * bj * (0.5 + 0.49 * gauss(&mut r).tanh())).collect();
        let g_lo: f64 = z.iter().zip(&b).map(|(zi, bi)| c * (1.0 + (bi * zi).exp()).ln()).sum();
        let zu: f64 = z.iter().zip(&u).map(|(a, b)| a * b).sum();
        prop_assert!(g_lo + logistic_conjugate(&b, c, &u) >= zu - 1e-10 * (1.0 + zu.abs()));
        // elastic net
        let reg = Regularizer::ElasticNet { l1: 0.7, l2: 1.3 };
        let x = gauss_vec(&mut r, m);
        let v = gauss_vec(&mut r, m);
        let xv: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!(reg.value(&x) + regularizer_conjugate(reg, &v) >= xv - 1e-10 * (1.0 + xv.abs()));
    }

    #[test]
    fn gap_is_nonnegative_at_random_points(seed in 0u64..300, lambda1 in 1.0..1e4f64) {
        let mut r = rng(seed);
        let a = Dense::random(&mut r, 15, 6);
        let b: Vec<f64> = (0..15).map(|_| if gauss(&mut r) > 0.0 { 1.0 } else { -1.0 }).collect();
        let x: Vec<f64> = gauss_vec(&mut r, 6).iter().map(|v| v * 3.0).collect();
        for p in [
            CompositeProblem::lasso(a.design(), b.clone(), lambda1).unwrap(),
            CompositeProblem::logistic(a.design(), b.clone(), lambda1, None).unwrap(),
        ] {
            let rep = p.gap_oracle().unwrap().report(&x);
            prop_assert!(rep.gap >= -1e-8, "{rep:?}");
            prop_assert!(rel_close(rep.primal, p.value(&x), 1e-12));
        }
    }

    #[test]
    fn libsvm_round_trip(seed in 0u64..500, m in 1usize..20, n in 1usize..15) {
        let mut r = rng(seed);
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for _ in 0..m {
            for c in 0..n {
                if gauss(&mut r) > 0.3 {
                    indices.push(c);
                    values.push(gauss(&mut r) * 10f64.powi((gauss(&mut r) * 3.0) as i32));
                }
            }
            indptr.push(indices.len());
        }
        let a = CsrMatrix::new(m, n, indptr, indices, values).unwrap();
        let b = gauss_vec(&mut r, m);
        let ds = Dataset { a: Arc::new(DesignMatrix::Csr(a)), b };
        let mut buf = Vec::new();
        write_libsvm(&ds, &mut buf).unwrap();
        let back = parse_libsvm(&buf[..], "mem", Some(n)).unwrap();
        prop_assert_eq!(back, ds);
    }
}

#[test]
fn fixture_growth_holds_at_random_points() {
    for (seed, cond) in [(1, 1.0), (2, 10.0), (3, 1e3), (4, 1e6)] {
        let fx = synth_strongly_convex(8, cond, seed).unwrap();
        let mut r = rng(seed);
        for _ in 0..10_000 {
            let x: Vec<f64> = gauss_vec(&mut r, 8).iter().zip(&fx.x_star).map(|(d, s)| s + 5.0 * d).collect();
            let lhs = fx.problem.value(&x) - fx.f_star();
            let rhs = 0.5 * fx.mu_true * fx.dist_sq(&x);
            assert!(lhs >= rhs * (1.0 - 1e-12), "{lhs} < {rhs}");
        }
    }
}

#[test]
fn restart_points_never_increase_objective() {
    for seed in 0..10 {
        let case = random_lasso(seed, 40, 20);
        for mu0 in [1e-1, 1e-3] {
            let mut cfg = AdaResConfig::new(mu0, 1e-12);
            cfg.max_prox_evals = Some(200_000);
            let out = ada_res(&case.problem, &vec![1.0; 20], &cfg).unwrap();
            let f: Vec<f64> = out.trace.records.iter().map(|r| r.f).collect();
            for w in f.windows(2) {
                assert!(w[1] <= w[0] + 1e-10 * (1.0 + w[0].abs()), "{w:?}");
            }
            assert_eq!(out.n_hat, out.n_hat_formula());
        }
    }
}

#[test]
fn logistic_oracle_value_is_stable_for_large_margins() {
    let a = Arc::new(DesignMatrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap());
    let lo = Logistic::new(a, vec![1.0, 1.0], 0.5).unwrap();
    let v = lo.value(&[800.0]);
    assert!(v.is_finite());
    assert!(rel_close(v, 0.5 * 800.0, 1e-12));
}

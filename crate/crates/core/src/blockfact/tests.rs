use super::*;
use crate::characters::characters_with_parity;
use crate::matrices::det_numeric;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(p: u32) -> HpContext {
    HpContext::new(p).unwrap()
}

fn abs_diff(a: &HpValue, b: &HpValue) -> Float {
    let re = Float::with_val(64, &a.re - &b.re).abs();
    let im = Float::with_val(64, &a.im - &b.im).abs();
    re + im
}

fn tiny(v: &Float, bits: i32) -> bool {
    *v < pow2(64, -bits)
}

#[test]
fn entry_positions() {
    assert_eq!(entry_position(6, 3, 2), None);
    assert_eq!(entry_position(6, 4, 2), Some((2, 2)));
    assert_eq!(entry_position(6, 2, 2), Some((2, 1)));
    assert_eq!(entry_position(6, 0, 0), Some((6, 0)));
    // k = 5 is a unit mod 6 with inverse 5
    assert_eq!(entry_position(6, 1, 5), Some((1, 5)));
}

#[test]
fn exact_hats_match_direct_sums() {
    let c = ctx(192);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=12u64 {
        for kind in [Kind::X, Kind::Y, Kind::Z] {
            if kind == Kind::Z && n < 3 {
                continue;
            }
            let asg = ValueAssignment::random(kind, n, &mut rng).unwrap();
            for d in divisors(n) {
                let nd = n / d;
                for t in 0..nd {
                    let exact = hat_exact(&asg, d, t).unwrap().evaluate(&c);
                    let direct = hat_direct_hp(&asg, d, t, &c).unwrap();
                    let diff = abs_diff(&exact, &direct);
                    assert!(tiny(&diff, 150), "N={n} {kind:?} d={d} t={t}");
                }
            }
        }
    }
}

#[test]
fn block_sizes() {
    let c = ctx(128);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sizes = |kind, n| -> Vec<usize> {
        let asg = ValueAssignment::random(kind, n, &mut rng.clone()).unwrap();
        decompose(&asg, &c).unwrap().blocks.iter().map(|b| b.indices.len()).collect()
    };
    assert_eq!(sizes(Kind::Z, 5), vec![2]);
    assert_eq!(sizes(Kind::X, 6), vec![1, 1, 2, 2]);
    assert_eq!(sizes(Kind::Y, 4), vec![1, 1, 1]);
    assert_eq!(sizes(Kind::Y, 12).iter().sum::<usize>(), 7);
    rng = ChaCha8Rng::seed_from_u64(2);
    let asg = ValueAssignment::random(Kind::X, 6, &mut rng).unwrap();
    let dec = decompose(&asg, &c).unwrap();
    assert_eq!(dec.order, vec![0, 3, 2, 4, 1, 5]);
    assert!(dec.exact && dec.residual.is_zero() && dec.off_block_residual.is_zero());
}

#[test]
fn support_holds_for_small_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=12u64 {
        for kind in [Kind::X, Kind::Y, Kind::Z] {
            if kind == Kind::Z && n < 3 {
                continue;
            }
            let asg = ValueAssignment::random(kind, n, &mut rng).unwrap();
            let check = support_check_exact_with(&asg, Exec::Sequential).unwrap();
            assert!(check.holds(), "N={n} {kind:?}: {:?}", check.mismatches);
            assert_eq!(check.positions, kind.indices(n).len().pow(2));
        }
    }
    let check = support_check_exact(&ValueAssignment::bernoulli(3, 12).unwrap()).unwrap();
    assert!(check.holds());
    assert!(check.asserted_zeros > 0);
}

#[test]
fn tangent_decomposition_is_numerically_block_triangular() {
    let c = ctx(256);
    for (m, n) in [(1, 9), (2, 9), (3, 15)] {
        let dec = decompose(&ValueAssignment::tangent(m, n).unwrap(), &c).unwrap();
        assert!(!dec.exact);
        assert!(tiny(&dec.residual, 200), "m={m} N={n}");
        assert!(tiny(&dec.off_block_residual, 200));
    }
}

#[test]
fn factor_parity_is_enforced() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let y = ValueAssignment::random(Kind::Y, 7, &mut rng).unwrap();
    let z = ValueAssignment::random(Kind::Z, 7, &mut rng).unwrap();
    let odd = characters_with_parity(7, -1).unwrap();
    let even = characters_with_parity(7, 1).unwrap();
    assert!(dedekind_factor_exact(&y, 1, &odd[0]).is_err());
    assert!(dedekind_factor_exact(&z, 1, &even[0]).is_err());
    assert!(dedekind_factor_exact(&z, 7, &odd[0]).is_err());
    assert_eq!(factor_characters(Kind::X, 7).unwrap().len(), 6);
    assert_eq!(factor_characters(Kind::Y, 7).unwrap().len(), 3);
    assert_eq!(factor_characters(Kind::Z, 7).unwrap().len(), 3);
}

#[test]
fn single_factor_bernoulli() {
    let asg = ValueAssignment::bernoulli(1, 4).unwrap();
    let odd = characters_with_parity(4, -1).unwrap();
    let f = dedekind_factor_exact(&asg, 1, &odd[0]).unwrap();
    assert_eq!(f.as_rational(), Some(Rational::from((-1, 4))));
}

#[test]
fn block_determinant_is_product_of_its_factors() {
    let c = ctx(192);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [7u64, 9, 12, 15] {
        for kind in [Kind::X, Kind::Y, Kind::Z] {
            let asg = ValueAssignment::random(kind, n, &mut rng).unwrap();
            let dec = decompose(&asg, &c).unwrap();
            for block in &dec.blocks {
                let direct = det_numeric(&block.matrix).value;
                let mut prod = c.one();
                for chi in factor_characters(kind, block.nd).unwrap() {
                    prod = &prod * &dedekind_factor(&asg, block.d, &chi, &c).unwrap();
                }
                let scale = Float::with_val(64, direct.abs()).max(&Float::with_val(64, 1));
                let diff = abs_diff(&prod, &direct);
                assert!(tiny(&Float::with_val(64, diff / scale), 120), "N={n} {kind:?} d={}", block.d);
            }
        }
    }
}

#[test]
fn factorization_reproduces_exact_determinants() {
    let b22 = det_via_factorization(&ValueAssignment::bernoulli(2, 2).unwrap(), 128).unwrap();
    assert_eq!(b22.exact_assembled, Some(Rational::from((-1, 24))));
    let b23 = det_via_factorization(&ValueAssignment::bernoulli(2, 3).unwrap(), 128).unwrap();
    assert_eq!(b23.exact_assembled, Some(Rational::from((-1, 27))));
    let b33 = det_via_factorization(&ValueAssignment::bernoulli(3, 3).unwrap(), 128).unwrap();
    assert_eq!(b33.exact_assembled, Some(Rational::from((1, 27))));
    assert!(b22.pass && b23.pass && b33.pass);

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [5u64, 7, 8, 12] {
        for kind in [Kind::X, Kind::Y, Kind::Z] {
            let asg = ValueAssignment::random(kind, n, &mut rng).unwrap();
            let report = det_via_factorization_with(&asg, 128, Exec::Sequential).unwrap();
            assert!(report.pass, "N={n} {kind:?}: {} vs {}", report.assembled, report.oracle);
            assert_eq!(report.exact_assembled, report.exact_oracle);
        }
    }
}

#[test]
fn bernoulli_hats_against_direct_sums() {
    let c = ctx(192);
    for k in 1..=4u32 {
        for n in [5u64, 6, 12] {
            let asg = ValueAssignment::bernoulli(k, n).unwrap();
            for d in divisors(n) {
                let nd = n / d;
                for t in 1..nd {
                    let closed = bernoulli_hat_closed(k, d, t, n, &c).unwrap();
                    let direct = hat_direct_hp(&asg, d, t, &c).unwrap();
                    assert!(tiny(&abs_diff(&closed, &direct), 150), "k={k} N={n} d={d} t={t}");
                }
            }
            if k % 2 == 0 {
                let closed = bernoulli_hat_closed(k, n, 0, n, &c).unwrap();
                let direct = hat_direct_hp(&asg, n, 0, &c).unwrap();
                assert!(tiny(&closed.relative_distance(&direct), 150));
            }
        }
    }
    assert!(bernoulli_hat_closed(1, 5, 0, 5, &c).is_err());
}

#[test]
fn bernoulli_formula_small_cases() {
    for (k, n) in [(2, 2), (3, 3), (1, 5), (4, 12), (1, 12)] {
        let r = bernoulli_det_formula_with(k, n, 256, Exec::Sequential).unwrap();
        assert!(r.pass, "k={k} N={n}: {} vs {} ({})", r.assembled, r.oracle, r.rel_error);
    }
}

#[test]
fn tangent_integer_forms() {
    for n in (3..=31u64).step_by(2) {
        for d in divisors(n).into_iter().filter(|&d| d < n) {
            let nd = n / d;
            for t in 1..nd {
                for m in [1, 2] {
                    let closed = tangent_hat_closed(m, d, t, n).unwrap() * Rational::from(d);
                    assert_eq!(closed, tangent_hat_integer(m, d, t, n).unwrap(), "m={m} N={n} d={d} t={t}");
                }
            }
        }
    }
    assert!(tangent_hat_integer(3, 1, 1, 7).is_err());
    assert!(matches!(tangent_hat_closed(2, 1, 0, 7), Err(Error::Unsupported(_))));
}

#[test]
fn tangent_closed_hats_against_direct_sums() {
    let c = ctx(256);
    for m in 1..=5u32 {
        for n in [7u64, 9, 15] {
            for d in divisors(n) {
                let nd = n / d;
                for t in 0..nd {
                    let direct = tangent_hat_direct(m, d, t, n, &c).unwrap();
                    match tangent_hat_closed(m, d, t, n) {
                        Ok(q) => {
                            let diff = Float::with_val(64, (c.real(&q).re - &direct.re).abs());
                            let scale = Float::with_val(64, direct.abs()).max(&Float::with_val(64, 1));
                            assert!(tiny(&Float::with_val(64, diff / scale), 200), "m={m} N={n} d={d} t={t}");
                        }
                        Err(_) => assert!(m % 2 == 0 && t == 0),
                    }
                }
            }
        }
    }
}

#[test]
fn tangent_formula_small_cases() {
    let r = tangent_det_formula(1, 3, 256).unwrap();
    let root3 = Float::with_val(256, 3).sqrt();
    assert!(tiny(&r.assembled_value.relative_distance(&HpValue::from_real(root3)), 200));
    assert!(r.pass && r.third.is_some());

    let r = tangent_det_formula(1, 5, 256).unwrap();
    assert!(r.pass);
    assert!(tiny(&r.oracle_value.relative_distance(&c_int(-10)), 200));

    for (m, n) in [(2, 5), (3, 7), (4, 9), (5, 9)] {
        let r = tangent_det_formula_with(m, n, 256, Exec::Sequential).unwrap();
        assert!(r.pass, "m={m} N={n}: {} vs {}", r.assembled, r.oracle);
        assert!(r.third.is_none());
    }
}

fn c_int(v: i64) -> HpValue {
    ctx(256).int(v)
}

#[test]
fn tangent_zero_determinant() {
    let r = tangent_det_formula(1, 21, 256).unwrap();
    assert_eq!(r.assembled, "0");
    assert!(r.pass, "{} {}", r.rel_error, r.oracle);
}

#[test]
fn odd_tangent_via_generic_factorization() {
    let r = det_via_factorization(&ValueAssignment::tangent(3, 9).unwrap(), 256).unwrap();
    assert_eq!(r.formula, "dedekind-factorization");
    assert!(r.pass, "{} vs {}", r.assembled, r.oracle);
    let r = det_via_factorization(&ValueAssignment::tangent(2, 9).unwrap(), 256).unwrap();
    assert_eq!(r.formula, "tangent-determinant");
    assert!(r.pass);
}

#[test]
fn sign_matrix_checks() {
    for n in [3u64, 5, 7, 9, 15, 21] {
        let rec = sun_check(n).unwrap();
        assert!(rec.holds(), "{rec:?}");
    }
    assert!(sun_check(8).is_err());
    let tilde = sun_sign_matrix(5).unwrap();
    assert_eq!(tilde.rows(), 2);
    assert!(tilde.row(0).iter().all(|v| *v == 1 || *v == -1 || *v == 0));
}

#[test]
fn permutation_parity_rule() {
    for n in 1..=49u64 {
        let sigma = sun_permutation(n);
        let mut sorted = sigma.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..n as usize).collect::<Vec<_>>());
        assert_eq!(permutation_sign(&sigma) == -1, n % 4 == 2, "n={n}");
    }
}

#[test]
fn factor_only_and_dense_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cases = vec![
        ValueAssignment::bernoulli(2, 12).unwrap(),
        ValueAssignment::bernoulli(3, 10).unwrap(),
        ValueAssignment::tangent(1, 15).unwrap(),
        ValueAssignment::tangent(4, 9).unwrap(),
        ValueAssignment::random(Kind::X, 9, &mut rng).unwrap(),
        ValueAssignment::random(Kind::Z, 11, &mut rng).unwrap(),
    ];
    for asg in cases {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let f = factorized_det(&asg, 256, exec).unwrap();
            let d = dense_det(&asg, 256, exec).unwrap();
            assert!(tiny(&f.relative_distance(&d), 200), "{:?}", asg.family());
        }
    }
}

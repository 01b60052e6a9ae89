//! Property tests across modules: counting kernel against brute force,
//! reconstruction round trips, Newton polygon invariants and slope zetas.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use zetamill::counting::{count_in_domains, count_in_domains_naive, Domain, DEFAULT_CAP};
use zetamill::ffield::FieldDesc;
use zetamill::intpoly::{ord_p, IntPolynomial};
use zetamill::laurent::LaurentPoly;
use zetamill::newtonpolygon::{lies_above, newton_polygon_of, Q};

use zetamill::zetareconstruct::{recurrence_reconstruct, slope_zeta, ZetaFactorization};

fn small_poly() -> impl Strategy<Value = (u64, Vec<(Vec<i64>, i64)>)> {
    (prop_oneof![Just(2u64), Just(3), Just(5)], proptest::collection::vec(((-2i64..=2, -2i64..=2), 1i64..5), 1..5))
        .prop_map(|(p, terms)| (p, terms.into_iter().map(|((a, b), c)| (vec![a, b], c)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn kernel_matches_brute_force((p, terms) in small_poly(), a in 1usize..=2, b in 1usize..=2, affine in any::<bool>()) {
        let field = FieldDesc::new(p, 1).unwrap();
        let f = LaurentPoly::from_terms(2, &field, terms.iter().map(|(u, c)| (u.clone(), field.from_int(*c)))).unwrap();
        prop_assume!(!f.is_zero());
        let has_negative = f.support().iter().flatten().any(|&e| e < 0);
        let first = if affine && !has_negative { Domain::Affine(a) } else { Domain::Torus(a) };
        let domains = [first, Domain::Torus(b)];
        let fast = count_in_domains(&f, &domains, DEFAULT_CAP).unwrap().count;
        let slow = count_in_domains_naive(&f, &domains, DEFAULT_CAP).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn reconstruction_round_trip(zeros in proptest::collection::vec(-9i64..=9, 0..4), poles in proptest::collection::vec(-9i64..=9, 0..4)) {
        prop_assume!(!zeros.iter().chain(&poles).any(|&a| a == 0));
        prop_assume!(!zeros.iter().any(|a| poles.contains(a)));
        let build = |rs: &[i64]| rs.iter().fold(IntPolynomial::one(), |acc, &a| acc.mul(&IntPolynomial::linear(BigInt::from(a))));
        let z = ZetaFactorization::from_parts(build(&zeros), build(&poles));
        let counts = z.counts(2 * z.total_degree().max(1));
        let back = recurrence_reconstruct(&counts, z.total_degree().max(1)).unwrap();
        prop_assert_eq!(&back.numerator, &z.numerator);
        prop_assert_eq!(&back.denominator, &z.denominator);
        prop_assert_eq!(back.counts(counts.len()), counts);
    }

    #[test]
    fn newton_polygon_lies_below_points(coeffs in proptest::collection::vec(-400i64..=400, 1..6), p in prop_oneof![Just(2u64), Just(3), Just(7)]) {
        let mut c = vec![1i64];
        c.extend(coeffs);
        let poly = IntPolynomial::from_i64s(&c);
        let np = newton_polygon_of(&poly, p).unwrap();
        let deg = poly.deg();
        let (ex, _) = np.endpoint();
        prop_assert_eq!(ex, Q::from_integer(deg as i64));
        for i in 0..=deg {
            let ci = poly.coeff(i);
            if ci.is_zero() {
                continue;
            }
            let x = Q::from_integer(i as i64);
            let y = Q::from_integer(i64::from(ord_p(&ci, p)));
            prop_assert!(np.value_at(x).unwrap() <= y);
        }
        prop_assert!(lies_above(&np, &np).above);
    }

    #[test]
    fn slope_zeta_is_multiplicative(a in proptest::collection::vec(prop_oneof![Just(1i64), Just(-3), Just(9), Just(27), Just(-2)], 1..4),
                                    b in proptest::collection::vec(prop_oneof![Just(1i64), Just(3), Just(-9), Just(5)], 1..4)) {
        let q = 3u64;
        let build = |rs: &[i64]| rs.iter().fold(IntPolynomial::one(), |acc, &x| acc.mul(&IntPolynomial::linear(BigInt::from(x))));
        let za = ZetaFactorization::from_parts(build(&a), IntPolynomial::one());
        let zb = ZetaFactorization::from_parts(IntPolynomial::one(), build(&b));
        let zab = ZetaFactorization::from_parts(build(&a), build(&b));
        let lhs = slope_zeta(&za, q).unwrap().mul(&slope_zeta(&zb, q).unwrap());
        let rhs = slope_zeta(&zab, q).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(lhs.mul(&lhs.reciprocal()).is_identity());
        let ord3 = |x: i64| {
            let (mut x, mut v) = (x.abs(), 0i64);
            while x % 3 == 0 {
                x /= 3;
                v += 1;
            }
            v
        };
        let mass: i64 = a.iter().map(|&x| ord3(x)).sum::<i64>() - b.iter().map(|&x| ord3(x)).sum::<i64>();
        prop_assert_eq!(rhs.slope_mass(), Q::from_integer(mass));
    }
}

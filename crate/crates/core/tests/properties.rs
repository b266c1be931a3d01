use padic_polar::building::{distance, relative_position, LatticeClass};
use padic_polar::padic::{embed_rational, hilbert_symbol, PadicScalar, PrimeContext};
use padic_polar::plinalg::{is_integral_unit, smith_cartan, PMatrix};
use proptest::prelude::*;

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p, 48).unwrap()
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11])
}

fn nonzero() -> impl Strategy<Value = i64> {
    (-2000i64..2000).prop_filter("non-zero", |x| *x != 0)
}

fn int_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-60i64..60, n), n)
}

fn det_i128(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0] as i128;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] as i128 * det_i128(&minor)
        })
        .sum()
}

fn to_pmatrix(c: PrimeContext, m: &[Vec<i64>]) -> PMatrix {
    let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
    PMatrix::from_ints(c, &rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn embedding_is_a_ring_map(p in prime(), a in nonzero(), b in nonzero(), c in 1i64..500, d in 1i64..500) {
        let k = ctx(p);
        prop_assume!(c % p as i64 != 0 && d % p as i64 != 0);
        let x = embed_rational(a, c, k).unwrap();
        let y = embed_rational(b, d, k).unwrap();
        let sum = embed_rational(a * d + b * c, c * d, k).unwrap();
        let product = embed_rational(a * b, c * d, k).unwrap();
        prop_assert!(x.add_lossy(&y).agrees_with(&sum));
        prop_assert!(x.mul_scalar(&y).agrees_with(&product));
        prop_assert!(x.mul_scalar(&x.inv().unwrap()).agrees_with(&PadicScalar::one(k)));
    }

    #[test]
    fn hilbert_symbol_is_symmetric_and_kills_squares(p in prime(), a in nonzero(), b in nonzero()) {
        let k = ctx(p);
        let (x, y) = (PadicScalar::from_int(k, a), PadicScalar::from_int(k, b));
        prop_assert_eq!(hilbert_symbol(&x, &y).unwrap(), hilbert_symbol(&y, &x).unwrap());
        prop_assert_eq!(hilbert_symbol(&x, &y.square()).unwrap(), 1);
        prop_assert_eq!(hilbert_symbol(&x, &x.neg()).unwrap(), 1);
    }

    #[test]
    fn cartan_exponents_sum_to_det_valuation(p in prime(), m in int_matrix(3)) {
        let det = det_i128(&m);
        prop_assume!(det != 0);
        let k = ctx(p);
        let g = to_pmatrix(k, &m);
        let f = smith_cartan(&g).unwrap();
        let mut v = 0;
        let mut rest = det.abs();
        while rest % p as i128 == 0 {
            rest /= p as i128;
            v += 1;
        }
        prop_assert_eq!(f.exponents.iter().sum::<i64>(), v);
        prop_assert!(f.exponents.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(is_integral_unit(&f.k1).unwrap() && is_integral_unit(&f.k2).unwrap());
        prop_assert!(f.reconstruct().unwrap().agreement(&g).unwrap() >= 40);
    }

    #[test]
    fn lattice_distance_is_symmetric(p in prime(), a in int_matrix(2), b in int_matrix(2)) {
        prop_assume!(det_i128(&a) != 0 && det_i128(&b) != 0);
        let k = ctx(p);
        let x = LatticeClass::from_basis(&to_pmatrix(k, &a)).unwrap();
        let y = LatticeClass::from_basis(&to_pmatrix(k, &b)).unwrap();
        prop_assert_eq!(distance(&x, &y).unwrap(), distance(&y, &x).unwrap());
        prop_assert_eq!(relative_position(&x, &x).unwrap(), vec![0, 0]);
        prop_assert_eq!(x.act(&PMatrix::identity(k, 2)).unwrap(), x);
    }
}

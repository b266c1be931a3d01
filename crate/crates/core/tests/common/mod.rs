#![allow(dead_code)]

use padic_polar::padic::{PadicScalar, PrimeContext};
use padic_polar::plinalg::{determinant, PMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const PRIMES: [u64; 3] = [3, 5, 7];

/// `p^v * u` with `u` a random unit of `digits` base-p digits.
pub fn scalar(rng: &mut ChaCha8Rng, ctx: PrimeContext, v: i64, digits: usize) -> PadicScalar {
    let p = ctx.p();
    let mut ds: Vec<u64> = (0..digits).map(|_| rng.random_range(0..p)).collect();
    ds[0] = rng.random_range(1..p);
    // zero-padded: an exact finite expansion at the context precision
    PadicScalar::from_digits(ctx, v, &ds).unwrap().with_precision(ctx.precision())
}

/// A non-zero scalar with valuation uniform in `lo..=hi`.
pub fn scalar_in(rng: &mut ChaCha8Rng, ctx: PrimeContext, lo: i64, hi: i64) -> PadicScalar {
    let v = rng.random_range(lo..=hi);
    scalar(rng, ctx, v, 12)
}

/// Random matrix with entries of valuation in `lo..=hi`, a fifth of them zero.
pub fn matrix(rng: &mut ChaCha8Rng, ctx: PrimeContext, n: usize, lo: i64, hi: i64) -> PMatrix {
    PMatrix::from_fn(ctx, n, n, |_, _| {
        if rng.random_range(0..5) == 0 {
            PadicScalar::zero(ctx)
        } else {
            scalar_in(rng, ctx, lo, hi)
        }
    })
}

pub fn invertible(rng: &mut ChaCha8Rng, ctx: PrimeContext, n: usize, lo: i64, hi: i64) -> PMatrix {
    loop {
        let g = matrix(rng, ctx, n, lo, hi);
        if determinant(&g).is_ok_and(|d| !d.is_zero()) {
            return g;
        }
    }
}

/// Random non-degenerate symmetric Gram matrix.
pub fn gram(rng: &mut ChaCha8Rng, ctx: PrimeContext, n: usize, lo: i64, hi: i64) -> PMatrix {
    loop {
        let mut b = matrix(rng, ctx, n, lo, hi);
        for i in 0..n {
            for j in 0..i {
                b[(i, j)] = b[(j, i)].clone();
            }
        }
        if determinant(&b).is_ok_and(|d| !d.is_zero()) {
            return b;
        }
    }
}

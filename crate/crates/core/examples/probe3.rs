use std::time::Instant;
use wmac_core::scalars::Scalar;

fn main() {
    // typical working values: products of q,t-binomials over others
    let one = Scalar::one();
    let q = Scalar::q();
    let t = Scalar::t();
    let qt = &q * &t;
    let mut num = one.clone();
    let mut den = one.clone();
    for k in 1..6i64 {
        num = &num * &(&one - &(&qt * &Scalar::q_pow(k)));
        den = &den * &(&one - &(&q * &Scalar::t_pow(-k)));
    }
    let a = &num / &den;
    let b = &(&num * &(&one - &qt)) / &(&den * &(&one - &q));
    let t0 = Instant::now();
    let mut acc = Scalar::zero();
    for _ in 0..50 {
        acc = &acc + &(&a * &b); // mixed mult + add with gcd reduction
    }
    println!("50 mixed ops: {:?} ({} terms)", t0.elapsed(), acc.num_terms());
    let snap = wmac_core::scalars::stats::snapshot();
    println!("gcd calls {} total {:.3}s", snap.0, snap.1 as f64 / 1e9);
}

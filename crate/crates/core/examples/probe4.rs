use wmac_core::scalars::Scalar;
fn main() {
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
    eprintln!("inputs built; one mixed multiply:");
    let v = &a * &b;
    eprintln!("done {}", v.num_terms());
}

use wmac_core::scalars::XorShift;
use std::time::Instant;
fn main() {
    let mut rng = XorShift::new(7);
    for i in 0..40 {
        let a = rng.scalar(3);
        let b = rng.scalar(3);
        let c = rng.scalar(3);
        let t0 = Instant::now();
        let _ = &(&a + &b) + &c;
        let _ = &a + &(&b + &c);
        let t1 = t0.elapsed();
        let t0 = Instant::now();
        let _ = &(&a * &b) * &c;
        let _ = &a * &(&b * &c);
        let t2 = t0.elapsed();
        let t0 = Instant::now();
        let _ = &a * &(&b + &c);
        let _ = &(&a * &b) + &(&a * &c);
        let t3 = t0.elapsed();
        if t1.as_millis() + t2.as_millis() + t3.as_millis() > 50 {
            println!("iter {} slow: add {:?} mul {:?} dist {:?}", i, t1, t2, t3);
            println!("  a = {}", a.to_display_string());
            println!("  b = {}", b.to_display_string());
            println!("  c = {}", c.to_display_string());
        }
    }
    println!("done");
}

use std::time::Instant;
use wmac_core::fock::{shuffle_action, FockVector};
use wmac_core::partitions::Partition;
use wmac_core::shuffle::{e_pn, f_pn, h_pn};

fn main() {
    for (name, f) in [
        ("F_{0,1}", f_pn(0, 1, 3)),
        ("F_{0,2}", f_pn(0, 2, 3)),
        ("E_{0,2}", e_pn(0, 2, 3)),
        ("H_{0,2}", h_pn(0, 2, 3)),
    ] {
        let t0 = Instant::now();
        let out = shuffle_action(&f, &FockVector::vacuum(3)).unwrap();
        println!("{} on vacuum: {} targets, {:?}", name, out.terms.len(), t0.elapsed());
        let t0 = Instant::now();
        let snap0 = wmac_core::scalars::stats::snapshot();
        let out = shuffle_action(&f, &FockVector::basis_state(3, Partition::new(vec![2, 1]))).unwrap();
        let snap1 = wmac_core::scalars::stats::snapshot();
        println!(
            "{} on (2,1): {} targets, {:?} | gcd calls {} time {:.2}s avg-terms {}",
            name,
            out.terms.len(),
            t0.elapsed(),
            snap1.0 - snap0.0,
            (snap1.1 - snap0.1) as f64 / 1e9,
            (snap1.2 - snap0.2) / (snap1.0 - snap0.0).max(1)
        );
    }
}

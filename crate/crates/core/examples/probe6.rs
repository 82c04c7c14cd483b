use std::time::Instant;
use wmac_core::fock::{operator_matrix, shuffle_action, FockVector};
use wmac_core::partitions::partitions_of;
use wmac_core::shuffle::f_pn;

fn main() {
    let f = f_pn(0, 1, 3);
    for size in 0..=6u64 {
        let t0 = Instant::now();
        let mut n = 0;
        for lam in partitions_of(size) {
            let out = shuffle_action(&f, &FockVector::basis_state(3, lam)).unwrap();
            n += out.terms.len();
        }
        println!("F01 sources size {}: {} entries, {:?}", size, n, t0.elapsed());
    }
    let t0 = Instant::now();
    let m = operator_matrix(&f_pn(0, 2, 3), 9, 3).unwrap();
    println!("F02 matrix trunc 9: {} entries {:?}", m.entries.len(), t0.elapsed());
}

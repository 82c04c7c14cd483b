use std::time::Instant;
use wmac_core::fock::{shuffle_action, FockVector};
use wmac_core::partitions::Partition;
use wmac_core::shuffle::e_pn;
fn main() {
    let f = e_pn(0, 2, 3);
    let t0 = Instant::now();
    let out = shuffle_action(&f, &FockVector::basis_state(3, Partition::new(vec![2, 1]))).unwrap();
    println!("E on (2,1): {} targets {:?}", out.terms.len(), t0.elapsed());
}

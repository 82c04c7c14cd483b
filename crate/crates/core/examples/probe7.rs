use std::time::Instant;
use wmac_core::fock::operator_matrix;
use wmac_core::shuffle::f_pn;

fn main() {
    let t0 = Instant::now();
    let mut ops = Vec::new();
    for p in 0..3 {
        ops.push((format!("F{}1", p), operator_matrix(&f_pn(p, 1, 3), 9, 3).unwrap()));
    }
    for p in 0..3 {
        ops.push((format!("F{}2", p), operator_matrix(&f_pn(p, 2, 3), 9, 3).unwrap()));
    }
    println!("matrices built {:?}", t0.elapsed());
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let t0 = Instant::now();
            let ok = ops[i].1.commutes_with(&ops[j].1, 9);
            println!("[{}, {}] zero={} {:?}", ops[i].0, ops[j].0, ok, t0.elapsed());
        }
    }
}

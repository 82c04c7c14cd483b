//! Internal timing helper for the verification checks.

use std::time::Instant;
use wmac_cli::verify;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "fock".into());
    match which.as_str() {
        "fock" => {
            let t0 = Instant::now();
            let r = verify::psi_weight_corematch(3);
            println!("psi-weight: {:?} ok={}", t0.elapsed(), r.is_none());
            let t0 = Instant::now();
            let r = verify::adjacency_vanishing(3, 9);
            println!("adjacency: {:?} ok={}", t0.elapsed(), r.is_none());
            let t0 = Instant::now();
            let r = verify::heisenberg_commutativity(3, 9);
            println!("commutativity: {:?} ok={}", t0.elapsed(), r.is_none());
        }
        "shuffle" => {
            let t0 = Instant::now();
            let r = verify::suite_shuffle(3, 2, 1);
            r.print_lines();
            println!("shuffle suite: {:?} ok={}", t0.elapsed(), r.all_passed());
        }
        "macdonald" => {
            let t0 = Instant::now();
            let r = verify::suite_macdonald(3, 2, 2, Some(1));
            r.print_lines();
            println!("macdonald suite: {:?} ok={}", t0.elapsed(), r.all_passed());
        }
        "main" => {
            let t0 = Instant::now();
            let opts = verify::MainTheoremOptions {
                corrupt: None,
                no_cache: true,
                seed: Some(1),
            };
            let r = verify::verify_main_theorem(3, &[0, 0, 0], 2, &opts);
            r.print_lines();
            println!("main: {:?} ok={}", t0.elapsed(), r.all_passed());
        }
        other => eprintln!("unknown: {}", other),
    }
}

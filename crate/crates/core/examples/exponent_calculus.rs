//! Exponent window, parameter gates and the integrability bootstrap.

use chemotaxis::analysis::{admissible_pair, bootstrap_sequence, p_interval, theorem_gate, ExponentWindow};

fn main() -> chemotaxis::Result<()> {
    for (chi, mu, n) in [(0.8, 0.5, 2), (0.5, 0.3, 3), (0.6, 0.3, 4), (1.2, 0.5, 2)] {
        let gate = theorem_gate(chi, mu, n);
        let (lo, hi) = p_interval(chi, mu, n);
        print!("chi = {chi}, mu = {mu}, n = {n}: chi_ok = {}, lemma = {}, strict = {}", gate.chi_ok, gate.lemma58, gate.thm1_strict);
        match admissible_pair(chi, mu, n) {
            Some((p, r)) => {
                let w = ExponentWindow::new(p, chi, mu)?;
                println!("\n  p in ({lo:.4}, {hi:.4}) -> p = {p}, r in ({:.6}, {:.6}) -> r = {r}", w.r_minus, w.r_high());
            }
            None => println!("\n  no admissible pair"),
        }
    }

    for (p0, n) in [(1.28125, 2), (2.0, 3), (3.0, 3), (2.6, 5)] {
        let trace = bootstrap_sequence(p0, n)?;
        let seq: Vec<String> = trace.sequence.iter().map(|e| e.to_string()).collect();
        println!("bootstrap n = {n} from {p0}: {}", seq.join(" -> "));
    }
    Ok(())
}

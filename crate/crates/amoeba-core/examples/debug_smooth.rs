//! Scratch diagnostic: d=3 best-effort transition verification.

use amoeba_core::*;

fn main() {
    let tol = Tolerances::default();
    for (ef, m) in [(0.7f64, 10.0f64), (0.8, 10.0), (0.9, 10.0), (1.0, 10.0)] {
        let params = FamilyParams { eps: ef, m };
        println!("=== params eps={ef} M={m} ===");
        for n in 0..=3usize {
            for seed in [42u64, 7, 11] {
                let t0 = std::time::Instant::now();
                let lines = match construct_arrangement(3, n, &params, seed, &tol) {
                    Ok(l) => l,
                    Err(e) => {
                        println!("n={n} seed={seed}: construct failed: {e}");
                        continue;
                    }
                };
                let fams: Vec<String> = lines
                    .iter()
                    .map(|l| format!("{:?}@{:.2}", l.family, l.theta))
                    .collect();
                match verify_smoothing(&lines, 0, None, &tol) {
                    Ok(rep) => println!(
                        "n={n} seed={seed} [{}]: predicted {} tracked {} (rel {:.0e}) [{:.1}s]",
                        fams.join(" "),
                        rep.predicted_b0,
                        rep.tracked_b0,
                        rep.relative_eps,
                        t0.elapsed().as_secs_f64()
                    ),
                    Err(e) => println!(
                        "n={n} seed={seed} [{}]: {e} [{:.1}s]",
                        fams.join(" "),
                        t0.elapsed().as_secs_f64()
                    ),
                }
            }
        }
    }
}

//! End-to-end workflows through the public API.

use nichewave_core::evolution::long_time_verdict;
use nichewave_core::experiments::{epsilon_sweep, GridCoupling, TARGET_A_PLUS};
use nichewave_core::io::sweep_csv;
use nichewave_core::*;

#[test]
fn hostile_landscape_goes_extinct() {
    let p = Problem::new(Kernel::tent(1), GrowthProfile::constant(-0.3)).with_grid(5.0, 0.1);
    let sol = p.stationary(&StationaryOptions::default()).unwrap();
    assert_eq!(sol.verdict, Verdict::Extinction);
    assert!(sol.values.iter().all(|v| *v == 0.0));
}

#[test]
fn favourable_niche_persists_and_attracts() {
    let p = Problem::new(Kernel::tent(1), GrowthProfile::bump(1.5, 1.0, -1.0)).with_grid(6.0, 0.1);
    let op = p.operator().unwrap();
    let sol = p.stationary(&StationaryOptions::default()).unwrap();
    assert_eq!(sol.verdict, Verdict::Persistence);
    assert!(sol.sub.iter().zip(&sol.values).all(|(s, u)| *s <= u + 1e-10));
    assert!(sol.values.iter().zip(&sol.super_).all(|(u, s)| *u <= s + 1e-10));
    let u0 = vec![0.5; op.len()];
    let rep = long_time_verdict(&op, &p.reaction, &sol.lambda_p_used, &u0, Some(&sol.values), 100.0, 1e-3).unwrap();
    assert!(rep.final_dist_sup.unwrap() <= 1e-3);
}

#[test]
fn sweep_output_is_reproducible() {
    let p = Problem::new(Kernel::tent(1), GrowthProfile::bump(1.0, 1.0, -1.0)).with_grid(5.0, 0.1);
    let run = || {
        let s = epsilon_sweep(&p, 1.0, &[0.5, 1.0], &GridCoupling::fixed(), &StationaryOptions::default()).unwrap();
        sweep_csv(&s, TARGET_A_PLUS)
    };
    assert_eq!(run(), run());
}

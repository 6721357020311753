#[path = "support/oracle.rs"]
mod oracle;

use rabi_core::overlap::{
    displaced_overlap_d, real_displacement_element, LaguerreKernel, OverlapKernel,
};

const GS: [f64; 5] = [0.05, 0.1, 0.3, 0.5, 1.0];

#[test]
fn oracle_is_unitary_on_low_block() {
    let d = oracle::displacement_matrix(0.6, 120);
    for i in 0..20 {
        for j in 0..20 {
            let dot: f64 = (0..120).map(|k| d.get(k, i) * d.get(k, j)).sum();
            assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
    // vacuum column is a coherent state
    assert!((d.get(0, 0) - (-0.18f64).exp()).abs() < 1e-14);
}

#[test]
fn series_matches_matrix_exponential() {
    for &g in &GS {
        let d = oracle::displacement_matrix(2.0 * g, 200);
        let mut worst = 0.0f64;
        for m in 0..=30 {
            for n in 0..=30 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let expected = sign * d.get(m, n);
                worst = worst.max((displaced_overlap_d(m, n, g).unwrap() - expected).abs());
            }
        }
        assert!(worst <= 1e-10, "g = {g}: {worst:e}");
    }
}

#[test]
fn laguerre_matches_matrix_exponential() {
    let g = 0.3;
    let d = oracle::displacement_matrix(2.0 * g, 200);
    for m in 0..=30 {
        for n in 0..=30 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(
                (LaguerreKernel.overlap_d(m, n, g).unwrap() - sign * d.get(m, n)).abs() < 1e-10
            );
            assert!((real_displacement_element(2.0 * g, m, n) - d.get(m, n)).abs() < 1e-10);
        }
    }
}

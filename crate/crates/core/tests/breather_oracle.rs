//! Closed-form values against a 60-digit evaluation of the unscaled formula
//! (`oracle/breather_values.py`).

use gardner5::breather::{eval_rational, Breather};
use gardner5::fourier::mean;
use gardner5::solver::breather_grid;
use gardner5::BreatherParams;

/// alpha, beta, mu, x1, x2, t, x, B
const REFERENCE: &[[f64; 8]] = &[
    [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0],
    [1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.7, 0.473_570_761_736_281_7],
    [2.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.3, -1.076_510_592_704_047],
    [2.0, 1.0, 0.3, 0.0, 0.0, 0.0, 0.0, 2.072_945_188_565_154_4],
    [2.0, 1.0, 0.3, 0.0, 0.0, 0.0, 0.25, 1.466_044_922_452_088_2],
    [2.0, 1.0, 0.3, 0.0, 0.0, 0.0, -2.5, 0.239_160_393_358_193_64],
    [2.0, 1.0, 0.3, 0.0, 0.0, 0.01, 0.4, 0.200_456_885_027_776_84],
    [2.0, 1.0, 0.3, 0.5, -1.5, 0.05, 3.0, -1.842_826_057_518_652],
    [1.5, 0.7, 0.4, 0.0, 0.0, 0.2, -4.0, -0.011_834_694_775_098_72],
    [3.0, 0.5, 0.1, 1.0, 2.0, -0.1, 10.0, 2.715_102_036_063_889_4e-11],
    [16.0, 0.0625, 0.05, 0.0, 0.0, 0.0, 0.1, -0.003_659_013_948_626_395_3],
    [16.0, 0.0625, 0.05, 0.0, 0.0, 0.0, 40.0, 0.012_971_409_989_543_891],
    [2.0, 1.0, 0.3, 0.0, 0.0, 0.0, 30.0, -3.180_560_863_266_676e-13],
    [2.0, 1.0, 0.3, 0.0, 0.0, 0.0, -30.0, -3.108_462_960_525_529_7e-13],
    [2.0, 1.0, 0.3, 0.0, 0.0, 0.0, 600.0, 0.0],
];

const MASS_2_1_03: f64 = -0.506_151_304_329_204_5;

#[test]
fn matches_high_precision_reference() {
    for row in REFERENCE {
        let &[alpha, beta, mu, x1, x2, t, x, expected] = row;
        let p = BreatherParams::new(alpha, beta, mu, x1, x2).unwrap();
        let got = eval_rational(&p, t, x).unwrap();
        let tol = 1e-12 * expected.abs() + 1e-15;
        assert!((got - expected).abs() <= tol, "{row:?}: got {got:e}");
    }
}

#[test]
fn sampled_integral_matches_reference_mass() {
    let p = BreatherParams::new(2.0, 1.0, 0.3, 0.0, 0.0).unwrap();
    let g = breather_grid(&p, 0.0, 1e-12).unwrap();
    let m = mean(&Breather::new(p).sample_rational(0.0, &g).unwrap());
    assert!((m - MASS_2_1_03).abs() <= 1e-12, "{m}");
    assert!((p.mass() - MASS_2_1_03).abs() <= 1e-15);
}

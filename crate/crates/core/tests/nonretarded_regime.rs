//! Extent of the `S⁻²` regime of the thermally integrated plate transfer.

use nfheat::materials::{sic, sio2_standin};
use nfheat::planar::{integrate_plate, PlanarConfig, PlatePair};

fn scaled(pair: &PlatePair, gaps: &[f64]) -> Vec<(f64, f64, f64)> {
    gaps.iter()
        .map(|&s| {
            let f = integrate_plate(pair, 300.0, 0.0, s, &PlanarConfig::default(), 1e-6).unwrap();
            (s, s * s * f.channels.total, f.channels.evan_e / f.channels.total)
        })
        .collect()
}

#[test]
fn sic_inverse_square_up_to_thirty_nanometres() {
    let pair = PlatePair::symmetric(sic().model);
    let gaps: Vec<f64> = (0..13).map(|i| 1e-9 * 10f64.powf(i as f64 / 4.0)).collect();
    let rows = scaled(&pair, &gaps);
    let plateau = rows[0].1;
    for w in rows.windows(2) {
        assert!(w[1].2 < w[0].2, "evan_E share not monotone: {rows:?}");
    }
    for &(s, s2h, share) in &rows {
        let excess = s2h / plateau - 1.0;
        if s <= 3.2e-8 {
            assert!(excess < 0.1 && share > 0.9, "S={s:e}: excess {excess}, share {share}");
        }
        if s >= 1e-7 {
            assert!(excess > 0.5, "S={s:e}: excess {excess}");
        }
    }
    let crossing = rows.windows(2).find(|w| w[0].2 >= 0.5 && w[1].2 < 0.5).map(|w| w[0].0);
    eprintln!("SiC: evan_E share falls below 1/2 after S = {crossing:?} m");
}

#[test]
fn sio2_regime_extends_an_order_further() {
    let pair = PlatePair::symmetric(sio2_standin().model);
    let rows = scaled(&pair, &[1e-9, 1e-7, 1e-6]);
    let plateau = rows[0].1;
    assert!(rows[1].1 / plateau - 1.0 < 0.1, "{rows:?}");
    assert!(rows[2].1 / plateau - 1.0 > 1.0, "{rows:?}");
}

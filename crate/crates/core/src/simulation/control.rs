use crate::load::EdgeLoadMatrix;

/// Background load left when a fraction `gamma` of traffic is controlled.
///
/// Every cell becomes `round(load · (1 − γ))`, halves rounded up.
pub fn apply_control_factor(base: &EdgeLoadMatrix, gamma: f64) -> EdgeLoadMatrix {
    assert!(
        (0.0..=1.0).contains(&gamma),
        "control factor must lie in [0, 1]"
    );
    let mut out = EdgeLoadMatrix::new(base.edge_count(), base.horizon());
    for (edge, interval, load) in base.iter_nonzero() {
        // The epsilon keeps exact halves such as 0.5 from landing at 0.4999….
        let scaled = (f64::from(load) * (1.0 - gamma) + 0.5 + 1e-9).floor() as u32;
        if scaled > 0 {
            out.set(edge, interval, scaled).expect("same shape as base");
        }
    }
    out
}

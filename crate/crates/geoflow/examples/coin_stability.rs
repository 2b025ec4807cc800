//! The coin-toss instability: a uniform cylinder spun about a diameter is
//! unstable exactly when its height drops below sqrt(3/2) times its radius,
//! where the (1,2) rotation plane's sectional curvature turns negative.

use geoflow::models::{inertia_from_shape, RigidBodySpec};
use geoflow::rigid::{coin_threshold, cylinder_h_scan, triangle_stability};

fn main() -> geoflow::Result<()> {
    let r = 1.0;
    let h_star = coin_threshold(r)?;
    println!("threshold height h* = {h_star:.6} for r = {r}");

    for h in [0.8, 1.1, h_star, 1.3, 2.0] {
        let inertia = inertia_from_shape(&RigidBodySpec::Cylinder { r, h })?;
        let report = triangle_stability(inertia.mu[0], inertia.mu[1], inertia.mu[2])?;
        println!(
            "h = {h:.4}: K12 = {:+.4}, K23 = {:+.4}, K31 = {:+.4} -> {:?}",
            report.sectional[0], report.sectional[1], report.sectional[2], report.verdict
        );
    }

    // Locate the sign change on a fine scan.
    let rows = cylinder_h_scan(r, 1.0, 1.5, 1e-4)?;
    let flip = rows
        .windows(2)
        .find(|w| w[0].k12 < 0.0 && w[1].k12 >= 0.0)
        .expect("sign change inside the scan window");
    println!(
        "scan with step 1e-4 brackets the flip at h = {:.4} (exact {h_star:.4})",
        flip[1].h
    );
    Ok(())
}

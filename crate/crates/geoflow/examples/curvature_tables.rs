//! Curvature biquadratic reports for every registered algebra: basis-plane
//! sectional curvatures and sign statistics.

use geoflow::models::{make_affine2, make_sdiff_t2, make_so3, make_vect_s1};
use geoflow::CurvatureReport;

fn main() -> geoflow::Result<()> {
    let algebras = vec![
        make_so3(1.0, 2.0, 3.0)?,
        make_affine2()?,
        make_vect_s1(4)?,
        make_sdiff_t2(3)?,
    ];
    for a in &algebras {
        let report = CurvatureReport::for_basis_planes(a, 6)?;
        println!(
            "{} (dim {}): {} planes, K in [{:+.4}, {:+.4}], {} negative / {} positive / {} flat",
            a.label(),
            a.dim(),
            report.planes.len(),
            report.min_sectional,
            report.max_sectional,
            report.negative_planes,
            report.positive_planes,
            report.zero_planes,
        );
        if a.label() == "affine2" {
            for p in &report.planes {
                println!("  plane {}: K = {}", p.plane, p.sectional);
            }
        }
    }
    Ok(())
}

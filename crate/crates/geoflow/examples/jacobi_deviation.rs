//! Geodesic deviation measured by integrating two nearby geodesics: the
//! quartic coefficient of |separation|² recovers −R(u,v)/3, negative
//! curvature meaning exponential spreading.

use geoflow::geodesic::{deviation_expansion, DeviationModel};
use geoflow::models::{make_affine2, make_so3};
use nalgebra::DVector;

fn main() -> geoflow::Result<()> {
    let grid: Vec<f64> = (1..=20).map(|i| 0.005 * i as f64).collect();

    let hp = make_affine2()?;
    let u = DVector::from_vec(vec![1.0, 0.0]);
    let v = DVector::from_vec(vec![0.0, 1.0]);
    let (_, b) = deviation_expansion(&hp, DeviationModel::Affine2, &v, &u, 1e-4, &grid)?;
    let r = hp.curvature_biquadratic(&u, &v)?;
    println!("half-plane: fitted b = {b:+.6}, prediction -R/3 = {:+.6}", -r / 3.0);

    let so3 = make_so3(1.0, 1.0, 1.0)?;
    let u = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let v = DVector::from_vec(vec![0.0, 1.0, 0.0]);
    let (_, b) = deviation_expansion(&so3, DeviationModel::So3BiInvariant, &v, &u, 1e-4, &grid)?;
    let r = so3.curvature_biquadratic(&u, &v)?;
    println!("round so(3): fitted b = {b:+.6}, prediction -R/3 = {:+.6}", -r / 3.0);
    println!("negative b means nearby geodesics converge; positive b, they spread.");
    Ok(())
}

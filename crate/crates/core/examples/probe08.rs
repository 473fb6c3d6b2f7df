use br_core::family::FamilyMember;
use br_core::params::{Exponent, Params};
use br_core::profiles::{BumpSpec, DyadicPartition, SchwartzProfile};
use br_core::truncop::*;
use std::sync::Arc;
fn main() {
    let psi = Arc::new(SchwartzProfile::build(BumpSpec::psi_hat(), 1e-10).unwrap());
    let part = DyadicPartition { sharpness: 1.0, base_index: 4 };
    let params = Params::new(2, Exponent::Infinity, 0.2, 0.2, 2f64.powi(-6)).unwrap();
    let member = FamilyMember::new(params, psi).unwrap();
    let ks: Vec<u32> = (1..=11).collect();
    for x in [1.0f64, 1.5] {
        let rep = regime_bound_check(&member, &part, 0.2, 1.0, 2, x, &ks, 4.0).unwrap();
        println!("x={x}: C=({:.3e},{:.3e},{:.3e})", rep.c_near, rep.c_critical, rep.c_far);
        for r in &rep.rows {
            println!("  k={:2} {} val {:.3e} err {:.1e} bound {:.3e} ratio {:.3e}", r.k, r.regime, r.value, r.err, r.bound, r.ratio);
        }
    }
}

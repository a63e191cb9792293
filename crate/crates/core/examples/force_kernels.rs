//! The three force kernels on a few hand-checkable inputs, and the balance
//! point of attraction and repulsion at separation k.
//!
//!     cargo run --example force_kernels

use geolayout::forces::{attractive_force, geo_force, repulsive_force};
use geolayout::Vec3;

fn show(label: &str, f: Vec3) {
    println!("{label:<44} ({:>7.3}, {:>7.3}, {:>7.3})  |f| = {:.3}", f.x, f.y, f.z, f.norm());
}

fn main() {
    let origin = Vec3::ZERO;
    let x1 = Vec3::new(1.0, 0.0, 0.0);

    show("attraction on origin from (1,0,0), k=1", attractive_force(x1, origin, 1.0));
    show("attraction on origin from (2,0,0), k=2", attractive_force(x1 * 2.0, origin, 2.0));
    show("repulsion on origin from (1,0,0), k=1", repulsive_force(x1, origin, 1.0));
    show("repulsion on (0,0,2) from origin, k=1", repulsive_force(origin, Vec3::new(0.0, 0.0, 2.0), 1.0));
    show("geo pull at origin toward (1,0,0), K=5, k=1", geo_force(origin, x1, 5.0, 1.0));
    show("geo pull with K=0", geo_force(origin, x1, 0.0, 1.0));

    // attraction grows as d², repulsion falls as 1/d; they cancel at d = k
    let k = 30.0;
    println!("\n{:>6}  {:>10}  {:>10}  {:>10}", "d/k", "|f_A|", "|f_R|", "net");
    for ratio in [0.5, 0.8, 1.0, 1.25, 2.0] {
        let u = Vec3::new(ratio * k, 0.0, 0.0);
        let fa = attractive_force(u, origin, k);
        let fr = repulsive_force(u, origin, k);
        println!("{ratio:>6.2}  {:>10.3}  {:>10.3}  {:>+10.3}", fa.norm(), fr.norm(), (fa + fr).x);
    }
}

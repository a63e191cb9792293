//! The three force kernels: edge attraction, pairwise repulsion and the
//! geo-force that pulls a node toward its projected geolocation.
//!
//! `f(u, v)` is always the force that `v` receives from `u`.

use sha2::{Digest, Sha256};

use crate::vector::{ForceVector, VirtualPosition, Vec3};

/// Separations below this are treated as coincident by the repulsion kernel.
pub const COINCIDENT_EPSILON: f64 = 1e-9;

/// Attraction along an edge: `‖d‖·d / k` with `d = pos_u − pos_v`.
///
/// Points from `v` toward `u` with magnitude `‖d‖² / k`.
pub fn attractive_force(pos_u: VirtualPosition, pos_v: VirtualPosition, k: f64) -> ForceVector {
    let d = pos_u - pos_v;
    d * (d.norm() / k)
}

/// Repulsion between any two nodes: `−k²·d / ‖d‖²` with `d = pos_u − pos_v`.
///
/// Coincident positions are separated along +x; use
/// [`repulsive_force_with_fallback`] to choose the direction.
pub fn repulsive_force(pos_u: VirtualPosition, pos_v: VirtualPosition, k: f64) -> ForceVector {
    repulsive_force_with_fallback(pos_u, pos_v, k, Vec3::new(1.0, 0.0, 0.0))
}

/// Like [`repulsive_force`], but when `‖d‖ < COINCIDENT_EPSILON` the
/// displacement is replaced by `fallback · COINCIDENT_EPSILON`. `fallback`
/// must be a unit vector pointing from `v` to `u`.
pub fn repulsive_force_with_fallback(
    pos_u: VirtualPosition,
    pos_v: VirtualPosition,
    k: f64,
    fallback: Vec3,
) -> ForceVector {
    let mut d = pos_u - pos_v;
    let mut dist2 = d.norm_squared();
    if dist2 < COINCIDENT_EPSILON * COINCIDENT_EPSILON {
        d = fallback * COINCIDENT_EPSILON;
        dist2 = d.norm_squared();
    }
    d * (-k * k / dist2)
}

/// Pull toward the projected anchor: `K·‖a‖·a / k` with `a = anchor − pos`.
pub fn geo_force(pos: VirtualPosition, anchor: VirtualPosition, geo_weight: f64, k: f64) -> ForceVector {
    if geo_weight == 0.0 {
        return Vec3::ZERO;
    }
    let a = anchor - pos;
    a * (geo_weight * a.norm() / k)
}

/// Deterministic unit direction from `v` toward `u` used when the two nodes
/// coincide. Swapping the ids flips the sign, so the repulsion stays
/// antisymmetric.
pub fn coincident_direction(id_u: &str, id_v: &str) -> Vec3 {
    let (lo, hi, sign) = if id_u <= id_v {
        (id_u, id_v, 1.0)
    } else {
        (id_v, id_u, -1.0)
    };
    let mut hasher = Sha256::new();
    hasher.update(lo.as_bytes());
    hasher.update([0u8]);
    hasher.update(hi.as_bytes());
    let digest = hasher.finalize();
    let a = u64::from_le_bytes(digest[0..8].try_into().unwrap());
    let b = u64::from_le_bytes(digest[8..16].try_into().unwrap());
    let unit = |x: u64| (x >> 11) as f64 / (1u64 << 53) as f64;
    // uniform point on the sphere
    let z = 2.0 * unit(a) - 1.0;
    let phi = 2.0 * std::f64::consts::PI * unit(b);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z) * sign
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn attraction_examples() {
        assert_eq!(attractive_force(v(1., 0., 0.), v(0., 0., 0.), 1.0), v(1., 0., 0.));
        assert_eq!(attractive_force(v(3., 2., 1.), v(3., 2., 1.), 1.0), Vec3::ZERO);
        assert_eq!(attractive_force(v(2., 0., 0.), v(0., 0., 0.), 2.0), v(2., 0., 0.));
    }

    #[test]
    fn repulsion_examples() {
        assert_eq!(repulsive_force(v(1., 0., 0.), v(0., 0., 0.), 1.0), v(-1., 0., 0.));
        assert_eq!(repulsive_force(v(0., 0., 0.), v(0., 0., 2.), 1.0), v(0., 0., 0.5));
    }

    #[test]
    fn attraction_balances_repulsion_at_k() {
        let k = 3.7;
        let u = v(0.0, 0.0, 0.0);
        let p = v(k, 0.0, 0.0);
        let fa = attractive_force(u, p, k);
        let fr = repulsive_force(u, p, k);
        assert_relative_eq!(fa.norm(), k, max_relative = 1e-15);
        assert_relative_eq!(fr.norm(), k, max_relative = 1e-15);
        assert!((fa + fr).norm() < 1e-12);
    }

    #[test]
    fn geo_examples() {
        let p = v(4., -2., 1.);
        assert_eq!(geo_force(p, p, 7.0, 1.0), Vec3::ZERO);
        assert_eq!(geo_force(v(0., 0., 0.), v(10., 3., 1.), 0.0, 1.0), Vec3::ZERO);
        assert_eq!(geo_force(v(0., 0., 0.), v(1., 0., 0.), 5.0, 1.0), v(5., 0., 0.));
    }

    #[test]
    fn coincident_nodes_repel_finitely_and_antisymmetrically() {
        let p = v(1.0, 1.0, 1.0);
        let fwd = repulsive_force_with_fallback(p, p, 2.0, coincident_direction("a", "b"));
        let back = repulsive_force_with_fallback(p, p, 2.0, coincident_direction("b", "a"));
        assert!(fwd.is_finite());
        assert_relative_eq!(fwd.norm(), 4.0 / COINCIDENT_EPSILON, max_relative = 1e-9);
        assert_eq!(fwd, -back);
    }

    #[test]
    fn coincident_direction_is_unit_and_stable() {
        let d = coincident_direction("node-17", "node-3");
        assert_relative_eq!(d.norm(), 1.0, max_relative = 1e-12);
        assert_eq!(d, coincident_direction("node-17", "node-3"));
        assert_ne!(d, coincident_direction("node-17", "node-4"));
    }
}

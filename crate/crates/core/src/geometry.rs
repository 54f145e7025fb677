//! Bistatic triangle solver.
//!
//! Angles here are measured at each node from the baseline toward the target
//! (degrees, in `(0°, 180°)`). Array steering uses broadside-referenced angles;
//! both arrays have broadside perpendicular to the baseline, so the two
//! conventions are related by [`broadside_deg`].

use crate::error::{contract, Error, Result};
use crate::SPEED_OF_LIGHT;

/// Minimum length of any propagation leg.
pub const MIN_SEGMENT_M: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn sub(self, other: Point) -> (f64, f64) {
        (self.x - other.x, self.y - other.y)
    }
}

/// Converts a baseline-referenced angle to the array's broadside-referenced
/// steering angle (and back; the map is an involution).
pub fn broadside_deg(angle_deg: f64) -> f64 {
    90.0 - angle_deg
}

/// Tx at the origin, Rx anywhere else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeLayout {
    rx: Point,
    baseline: f64,
}

impl NodeLayout {
    pub fn new(rx: Point) -> Result<Self> {
        let baseline = rx.distance(Point::new(0.0, 0.0));
        if !(baseline > 0.0) || !baseline.is_finite() {
            return Err(contract("receiver must be separated from the transmitter"));
        }
        Ok(Self { rx, baseline })
    }

    pub fn tx(&self) -> Point {
        Point::new(0.0, 0.0)
    }

    pub fn rx(&self) -> Point {
        self.rx
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    /// Unit vector from Tx to Rx and its left-hand normal.
    fn frame(&self) -> ((f64, f64), (f64, f64)) {
        let b = (self.rx.x / self.baseline, self.rx.y / self.baseline);
        (b, (-b.1, b.0))
    }

    /// Point at range `d` from the Rx, `angle_deg` off the Rx→Tx direction,
    /// on the left side of the baseline.
    pub fn point_from_rx(&self, angle_deg: f64, d: f64) -> Point {
        let (b, n) = self.frame();
        let (s, c) = angle_deg.to_radians().sin_cos();
        Point::new(
            self.rx.x - d * c * b.0 + d * s * n.0,
            self.rx.y - d * c * b.1 + d * s * n.1,
        )
    }

    /// Angle at `vertex` between the ray toward `reference` and the ray toward `p`.
    fn angle_at(vertex: Point, reference: Point, p: Point) -> f64 {
        let (ux, uy) = reference.sub(vertex);
        let (vx, vy) = p.sub(vertex);
        let cross = ux * vy - uy * vx;
        let dot = ux * vx + uy * vy;
        cross.abs().atan2(dot).to_degrees()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistaticSolution {
    pub target: Point,
    pub d_tx: f64,
    pub d_rx: f64,
    pub d_bis: f64,
    /// Angle of departure at the Tx, from the baseline.
    pub theta_t: f64,
    /// Angle of arrival at the Rx, from the baseline.
    pub theta_r: f64,
    /// Bistatic angle `180° − θ_t − θ_r`.
    pub beta_t: f64,
    pub baseline: f64,
}

impl BistaticSolution {
    /// Largest relative spread among `L/sin β = d_Tx/cos θ̄_r = d_Rx/cos θ̄_t`,
    /// where θ̄ are the broadside-referenced angles.
    pub fn ratio_identity_residual(&self) -> f64 {
        let a = self.baseline / self.beta_t.to_radians().sin();
        let b = self.d_tx / broadside_deg(self.theta_r).to_radians().cos();
        let c = self.d_rx / broadside_deg(self.theta_t).to_radians().cos();
        let hi = a.max(b).max(c);
        let lo = a.min(b).min(c);
        (hi - lo) / hi
    }

    /// `|L − √(d_Rx² + d_Tx² − 2 d_Tx d_Rx cos β)|` in meters.
    pub fn law_of_cosines_residual(&self) -> f64 {
        let rhs = (self.d_rx.powi(2) + self.d_tx.powi(2)
            - 2.0 * self.d_tx * self.d_rx * self.beta_t.to_radians().cos())
        .sqrt();
        (self.baseline - rhs).abs()
    }

    pub fn tau(&self) -> f64 {
        self.d_bis / SPEED_OF_LIGHT
    }
}

/// Solves the triangle for a target at a known position.
pub fn solve_from_position(target: Point, layout: &NodeLayout) -> Result<BistaticSolution> {
    let d_tx = target.distance(layout.tx());
    let d_rx = target.distance(layout.rx());
    if d_tx <= MIN_SEGMENT_M || d_rx <= MIN_SEGMENT_M {
        return Err(Error::DegenerateGeometry(format!(
            "target within {MIN_SEGMENT_M} m of a node (d_Tx = {d_tx}, d_Rx = {d_rx})"
        )));
    }
    let theta_t = NodeLayout::angle_at(layout.tx(), layout.rx(), target);
    let theta_r = NodeLayout::angle_at(layout.rx(), layout.tx(), target);
    let beta_t = 180.0 - theta_t - theta_r;
    let (b, _) = layout.frame();
    let cross = b.0 * target.y - b.1 * target.x;
    if beta_t <= 0.0 || cross.abs() <= 1e-12 * d_tx {
        return Err(Error::DegenerateGeometry(format!(
            "target is collinear with the baseline (beta = {beta_t} deg)"
        )));
    }
    Ok(BistaticSolution {
        target,
        d_tx,
        d_rx,
        d_bis: d_tx + d_rx,
        theta_t,
        theta_r,
        beta_t,
        baseline: layout.baseline(),
    })
}

/// Rx-to-target range from bistatic range and AoA, valid for any baseline ≥ 0.
pub fn rx_range(d_bis: f64, baseline: f64, theta_r_deg: f64) -> f64 {
    (d_bis * d_bis - baseline * baseline)
        / (2.0 * (d_bis - baseline * theta_r_deg.to_radians().cos()))
}

/// Recovers the full triangle from an estimated AoA and bistatic range.
pub fn invert_from_estimates(
    theta_r_deg: f64,
    d_bis: f64,
    layout: &NodeLayout,
) -> Result<BistaticSolution> {
    let baseline = layout.baseline();
    if !(d_bis > baseline) {
        return Err(Error::InfeasibleEllipse { d_bis, baseline });
    }
    if !(theta_r_deg > 0.0 && theta_r_deg < 180.0) {
        return Err(contract(format!("AoA {theta_r_deg} deg outside (0, 180)")));
    }
    let d_rx = rx_range(d_bis, baseline, theta_r_deg);
    let target = layout.point_from_rx(theta_r_deg, d_rx);
    let mut sol = solve_from_position(target, layout)?;
    // Keep the closed-form ranges rather than the re-measured ones.
    sol.d_rx = d_rx;
    sol.d_tx = d_bis - d_rx;
    sol.d_bis = d_bis;
    Ok(sol)
}

/// Legs of the Tx → target → clutter → Rx path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClutterPath {
    pub d_tx: f64,
    pub d_tc: f64,
    pub d_crx: f64,
    pub tau_c: f64,
    /// AoA of the clutter→Rx leg, baseline-referenced.
    pub theta_c: f64,
}

pub fn clutter_path(target: Point, clutter: Point, layout: &NodeLayout) -> Result<ClutterPath> {
    let d_tx = target.distance(layout.tx());
    let d_tc = clutter.distance(target);
    let d_crx = layout.rx().distance(clutter);
    for (name, d) in [
        ("Tx-target", d_tx),
        ("target-clutter", d_tc),
        ("clutter-Rx", d_crx),
    ] {
        if d <= MIN_SEGMENT_M {
            return Err(Error::DegenerateGeometry(format!(
                "{name} leg is {d} m (minimum {MIN_SEGMENT_M} m)"
            )));
        }
    }
    Ok(ClutterPath {
        d_tx,
        d_tc,
        d_crx,
        tau_c: (d_tx + d_tc + d_crx) / SPEED_OF_LIGHT,
        theta_c: NodeLayout::angle_at(layout.rx(), layout.tx(), clutter),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> NodeLayout {
        NodeLayout::new(Point::new(15.0, 0.0)).unwrap()
    }

    #[test]
    fn isosceles_example() {
        let s = solve_from_position(Point::new(7.5, 10.0), &layout()).unwrap();
        assert!((s.d_tx - 12.5).abs() < 1e-12);
        assert!((s.d_rx - 12.5).abs() < 1e-12);
        assert!((s.d_bis - 25.0).abs() < 1e-12);
        let theta = (10.0f64 / 7.5).atan().to_degrees();
        assert!((s.theta_t - theta).abs() < 1e-10);
        assert!((s.theta_r - theta).abs() < 1e-10);
        assert!((s.theta_t - 53.130).abs() < 1e-3);
        assert!((s.beta_t - 73.740).abs() < 1e-3);
        assert!(s.ratio_identity_residual() < 1e-9);
        assert!(s.law_of_cosines_residual() < 1e-6);
    }

    #[test]
    fn thirty_degree_example() {
        let s = solve_from_position(Point::new(7.5, 7.5 / 3f64.sqrt()), &layout()).unwrap();
        assert!((s.theta_t - 30.0).abs() < 1e-10);
        assert!((s.theta_r - 30.0).abs() < 1e-10);
    }

    #[test]
    fn target_above_tx() {
        let s = solve_from_position(Point::new(0.0, 5.0), &layout()).unwrap();
        assert!((s.d_tx - 5.0).abs() < 1e-12);
        assert!((s.theta_t - 90.0).abs() < 1e-10);
    }

    #[test]
    fn collinear_and_collocated_targets_rejected() {
        let l = layout();
        assert!(matches!(
            solve_from_position(Point::new(7.0, 0.0), &l),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(matches!(
            solve_from_position(Point::new(20.0, 0.0), &l),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(solve_from_position(Point::new(15.0, 0.05), &l).is_err());
    }

    #[test]
    fn inverse_hand_example() {
        let theta = (10.0f64 / 7.5).atan().to_degrees();
        let s = invert_from_estimates(theta, 25.0, &layout()).unwrap();
        assert!((s.d_rx - 12.5).abs() < 1e-12);
        assert!((s.target.x - 7.5).abs() < 1e-9 && (s.target.y - 10.0).abs() < 1e-9);
        assert!((rx_range(25.0, 15.0, 53.130) - 400.0 / 32.0).abs() < 1e-3);
    }

    #[test]
    fn monostatic_limit() {
        for theta in [5.0, 45.0, 120.0] {
            assert!((rx_range(30.0, 0.0, theta) - 15.0).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_ellipse() {
        assert!(matches!(
            invert_from_estimates(40.0, 15.0, &layout()),
            Err(Error::InfeasibleEllipse { .. })
        ));
    }

    #[test]
    fn clutter_paths() {
        let l = layout();
        let target = Point::new(7.5, 10.0);
        let clutter = l.point_from_rx(10.0, 10.0);
        let p = clutter_path(target, clutter, &l).unwrap();
        let d_tc = ((7.5 - clutter.x).powi(2) + (10.0 - clutter.y).powi(2)).sqrt();
        assert!((clutter.x - (15.0 - 10.0 * 10f64.to_radians().cos())).abs() < 1e-12);
        assert!((p.d_tc - d_tc).abs() < 1e-12);
        assert!((p.d_crx - 10.0).abs() < 1e-12);
        assert!((p.theta_c - 10.0).abs() < 1e-10);
        assert!((p.tau_c - (12.5 + d_tc + 10.0) / SPEED_OF_LIGHT).abs() < 1e-20);

        // clutter just past the collocation limit: delay collapses to the target's
        let near = Point::new(target.x + 0.08, target.y + 0.08);
        let p = clutter_path(target, near, &l).unwrap();
        assert!((p.tau_c - 25.0 / SPEED_OF_LIGHT).abs() < 0.2 / SPEED_OF_LIGHT);
        assert!(clutter_path(target, target, &l).is_err());
    }
}

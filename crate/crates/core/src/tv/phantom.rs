//! Shepp-Logan phantom rasterization.

use ndarray::Array2;

use super::ImageGrid;

/// Ellipse table: (intensity, semi-axis a, semi-axis b, center x, center y,
/// rotation in degrees). Intensities follow the low-contrast variant whose
/// pixel values land in [0, 1]; a final clip guards the overlap sums.
const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    (-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    (-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    (0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    (0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    (0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    (0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0),
];

/// Rasterize the ten-ellipse head phantom at `n x n`, pixel centers on
/// `[-1, 1]^2`, values clipped to `[0, 1]`.
pub fn shepp_logan(n: usize) -> ImageGrid {
    assert!(n >= 16, "phantom needs n >= 16");
    let mut pixels = Array2::zeros((n, n));
    let coord = |idx: usize| (2.0 * idx as f64 + 1.0) / n as f64 - 1.0;
    for i in 0..n {
        let y = -coord(i);
        for j in 0..n {
            let x = coord(j);
            let mut value = 0.0;
            for &(a, sa, sb, cx, cy, angle) in &ELLIPSES {
                let rad = angle.to_radians();
                let (s, c) = rad.sin_cos();
                let dx = x - cx;
                let dy = y - cy;
                let xr = dx * c + dy * s;
                let yr = -dx * s + dy * c;
                if (xr / sa).powi(2) + (yr / sb).powi(2) <= 1.0 {
                    value += a;
                }
            }
            pixels[[i, j]] = value.clamp(0.0, 1.0);
        }
    }
    ImageGrid { n, pixels }
}

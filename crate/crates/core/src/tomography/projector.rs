use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

/// Lengths below this are treated as zero.
const DIRECTION_EPS: f64 = 1e-12;
/// Segments shorter than this are dropped.
const MIN_SEGMENT: f64 = 1e-12;

/// Parallel-beam acquisition: projection angles in degrees and the number of
/// detectors per angle.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGeometry {
    angles: Vec<f64>,
    n_detectors: usize,
}

impl ScanGeometry {
    pub fn new(angles: Vec<f64>, n_detectors: usize) -> Result<Self> {
        if n_detectors == 0 {
            return Err(Error::InvalidParameter("geometry needs at least one detector".into()));
        }
        if angles.is_empty() {
            return Err(Error::InvalidParameter("geometry needs at least one angle".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("projection angles"));
        }
        Ok(Self { angles, n_detectors })
    }

    /// `n_angles` angles evenly spaced over `[0°, 180°)`.
    pub fn uniform(n_angles: usize, n_detectors: usize) -> Result<Self> {
        let angles = (0..n_angles).map(|k| 180.0 * k as f64 / n_angles as f64).collect();
        Self::new(angles, n_detectors)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn n_detectors(&self) -> usize {
        self.n_detectors
    }

    pub fn n_rays(&self) -> usize {
        self.angles.len() * self.n_detectors
    }

    /// Signed offset of detector `k` along the detector axis. The array
    /// spans the image diagonal symmetrically.
    pub fn detector_offset(&self, k: usize, width: usize, height: usize) -> f64 {
        let diag = ((width * width + height * height) as f64).sqrt();
        let spacing = diag / self.n_detectors as f64;
        -0.5 * diag + (k as f64 + 0.5) * spacing
    }
}

/// A ray `p + t·v` with unit direction `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: [f64; 2],
    pub direction: [f64; 2],
}

impl Ray {
    /// Ray for `angle_deg` at signed detector offset `s`: it passes through
    /// `s·(cos φ, sin φ)` with direction `(−sin φ, cos φ)`.
    pub fn parallel(angle_deg: f64, s: f64) -> Self {
        let (sin, cos) = angle_deg.to_radians().sin_cos();
        let snap = |v: f64| if v.abs() < DIRECTION_EPS { 0.0 } else { v };
        let (sin, cos) = (snap(sin), snap(cos));
        Self {
            origin: [s * cos, s * sin],
            direction: [-sin, cos],
        }
    }
}

/// Pixel `(r, c)` covers `x ∈ [−w/2 + c, −w/2 + c + 1]` and
/// `y ∈ [h/2 − r − 1, h/2 − r]`; row 0 is the top row. Returns
/// `(pixel index r·w + c, length)` for every pixel the ray crosses.
pub fn trace_ray(ray: &Ray, width: usize, height: usize) -> Vec<(usize, f64)> {
    let half = [width as f64 / 2.0, height as f64 / 2.0];
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for axis in 0..2 {
        let (p, v) = (ray.origin[axis], ray.direction[axis]);
        if v.abs() < DIRECTION_EPS {
            if p < -half[axis] || p > half[axis] {
                return Vec::new();
            }
        } else {
            let a = (-half[axis] - p) / v;
            let b = (half[axis] - p) / v;
            t_lo = t_lo.max(a.min(b));
            t_hi = t_hi.min(a.max(b));
        }
    }
    if !(t_hi - t_lo > MIN_SEGMENT) {
        return Vec::new();
    }

    let mut ts = vec![t_lo, t_hi];
    for (axis, n) in [width, height].into_iter().enumerate() {
        let (p, v) = (ray.origin[axis], ray.direction[axis]);
        if v.abs() < DIRECTION_EPS {
            continue;
        }
        for k in 0..=n {
            let t = (-half[axis] + k as f64 - p) / v;
            if t > t_lo && t < t_hi {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);

    let mut out = Vec::with_capacity(ts.len());
    for pair in ts.windows(2) {
        let len = pair[1] - pair[0];
        if len <= MIN_SEGMENT {
            continue;
        }
        let tm = 0.5 * (pair[0] + pair[1]);
        let x = ray.origin[0] + tm * ray.direction[0];
        let y = ray.origin[1] + tm * ray.direction[1];
        let c = ((x + half[0]).floor() as isize).clamp(0, width as isize - 1) as usize;
        let r = ((half[1] - y).floor() as isize).clamp(0, height as isize - 1) as usize;
        out.push((r * width + c, len));
    }
    out
}

/// Sparse projector of shape `(n_angles·n_detectors) × (width·height)`.
/// Row `a·n_detectors + k` holds the intersection lengths of the ray of angle
/// `a` and detector `k` with each pixel.
pub fn build_projector(width: usize, height: usize, geometry: &ScanGeometry) -> Result<CsrMatrix> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!("image must be at least 1x1, got {width}x{height}")));
    }
    let mut triplets = Vec::new();
    for (a, &angle) in geometry.angles().iter().enumerate() {
        for k in 0..geometry.n_detectors() {
            let ray = Ray::parallel(angle, geometry.detector_offset(k, width, height));
            let row = a * geometry.n_detectors() + k;
            triplets.extend(trace_ray(&ray, width, height).into_iter().map(|(j, len)| (row, j, len)));
        }
    }
    CsrMatrix::from_triplets(geometry.n_rays(), width * height, triplets)
}

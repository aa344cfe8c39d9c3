//! Antenna-array responses, path loss and the wrapped hexagonal cell layout.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::linalg::CMat;
use crate::scalar::{Real, C};

/// `10^((dBm − 30)/10)` watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Half-wavelength uniform linear array response `[1, e^{−jπ sinθ}, …, e^{−jπ(count−1) sinθ}]ᵀ`.
pub fn steering_vector<T: Real>(theta: T, count: usize) -> CMat<T> {
    let s = theta.sin();
    CMat::column(
        (0..count)
            .map(|k| C::from_polar(T::one(), -T::PI() * T::from_usize_lossy(k) * s))
            .collect(),
    )
}

/// Entrywise `dθ` of [`steering_vector`]: entry `k` is `(−jπk cosθ) e^{−jπk sinθ}`.
pub fn steering_vector_derivative<T: Real>(theta: T, count: usize) -> CMat<T> {
    let (s, c) = theta.sin_cos();
    CMat::column(
        (0..count)
            .map(|k| {
                let kk = T::from_usize_lossy(k);
                C::new(T::zero(), -T::PI() * kk * c) * C::from_polar(T::one(), -T::PI() * kk * s)
            })
            .collect(),
    )
}

/// Monostatic response `a_r(θ) a_t(θ)ᵀ` (`rx × tx`).
pub fn steering_matrix<T: Real>(theta: T, tx: usize, rx: usize) -> CMat<T> {
    steering_vector(theta, rx).matmul(&steering_vector(theta, tx).transpose())
}

/// `∂/∂θ [a_r(θ) a_t(θ)ᵀ] = ȧ_r a_tᵀ + a_r ȧ_tᵀ`.
pub fn steering_derivative<T: Real>(theta: T, tx: usize, rx: usize) -> CMat<T> {
    let (at, dat) = (steering_vector(theta, tx), steering_vector_derivative(theta, tx));
    let (ar, dar) = (steering_vector(theta, rx), steering_vector_derivative(theta, rx));
    dar.matmul(&at.transpose()).add(&ar.matmul(&dat.transpose()))
}

/// Angle of `target` seen from an array laid along the x-axis, measured from broadside (+y).
pub fn broadside_angle(array: [f64; 2], target: [f64; 2]) -> f64 {
    (target[0] - array[0]).atan2(target[1] - array[1])
}

pub fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Urban micro path loss in dB for a distance in meters.
pub fn isac_path_loss_db(d_m: f64) -> f64 {
    32.6 + 36.7 * d_m.log10()
}

/// Macro-cell path loss in dB for a distance in kilometres, before shadowing.
pub fn mimo_path_loss_db(d_km: f64) -> f64 {
    128.1 + 37.6 * d_km.log10()
}

/// Seven-cell hexagonal cluster with inter-site distance `isd`, wrapped onto a torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HexLayout {
    pub isd: f64,
}

impl HexLayout {
    pub const CELLS: usize = 7;

    pub fn new(isd: f64) -> Self {
        Self { isd }
    }

    fn a1(&self) -> [f64; 2] {
        [self.isd, 0.0]
    }

    fn a2(&self) -> [f64; 2] {
        [self.isd * 0.5, self.isd * 3f64.sqrt() * 0.5]
    }

    /// Translations that tile the plane with copies of the cluster.
    pub fn cluster_vectors(&self) -> [[f64; 2]; 2] {
        let (a1, a2) = (self.a1(), self.a2());
        [
            [2.0 * a1[0] + a2[0], 2.0 * a1[1] + a2[1]],
            [-a1[0] + 3.0 * a2[0], -a1[1] + 3.0 * a2[1]],
        ]
    }

    /// Site `c` of the cluster: the centre, then its six neighbours counter-clockwise from +x.
    pub fn site(&self, c: usize) -> [f64; 2] {
        assert!(c < Self::CELLS);
        if c == 0 {
            return [0.0, 0.0];
        }
        let ang = std::f64::consts::FRAC_PI_3 * (c - 1) as f64;
        [self.isd * ang.cos(), self.isd * ang.sin()]
    }

    /// Shortest distance between `a` and any cluster translate of `b`.
    pub fn wrapped_distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let [c1, c2] = self.cluster_vectors();
        let d = [a[0] - b[0], a[1] - b[1]];
        // Coordinates of d in the (c1, c2) basis, reduced to the fundamental cell.
        let det = c1[0] * c2[1] - c1[1] * c2[0];
        let u = (d[0] * c2[1] - d[1] * c2[0]) / det;
        let v = (c1[0] * d[1] - c1[1] * d[0]) / det;
        let (u0, v0) = (u - u.round(), v - v.round());
        let mut best = f64::INFINITY;
        for i in -1..=1 {
            for j in -1..=1 {
                let (uu, vv) = (u0 + i as f64, v0 + j as f64);
                let x = uu * c1[0] + vv * c2[0];
                let y = uu * c1[1] + vv * c2[1];
                best = best.min(x.hypot(y));
            }
        }
        best
    }

    /// Whether `p` (relative to its site) lies inside the cell hexagon.
    pub fn in_cell(&self, p: [f64; 2]) -> bool {
        let h = self.isd / 2.0;
        let (x, y) = (p[0].abs(), p[1].abs());
        x <= h && x / 2.0 + y * 3f64.sqrt() / 2.0 <= h
    }

    /// Uniform point in cell `c`, at least `guard` away from the site.
    pub fn sample_user<R: Rng + ?Sized>(&self, c: usize, guard: f64, rng: &mut R) -> [f64; 2] {
        let h = self.isd / 2.0;
        let r = h * 2.0 / 3f64.sqrt();
        let site = self.site(c);
        loop {
            let p = [rng.random_range(-h..=h), rng.random_range(-r..=r)];
            if self.in_cell(p) && p[0].hypot(p[1]) >= guard {
                return [site[0] + p[0], site[1] + p[1]];
            }
        }
    }
}

/// Log-normal shadowing draw in dB.
pub fn shadowing_db<R: Rng + ?Sized>(std_db: f64, rng: &mut R) -> f64 {
    if std_db == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, std_db).expect("finite std").sample(rng)
}

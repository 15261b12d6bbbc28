//! Fixtures and independent reference implementations shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use crossrig::eval::{EvalSample, Prediction};
use crossrig::geometry::Pose;
use crossrig::map::{Frame, MapClass, MapElement, MapLayer};
use crossrig::scene::Gaussian3D;
use nalgebra::{UnitQuaternion, Vector2, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---- poses -----------------------------------------------------------------

pub fn random_pose(r: &mut ChaCha8Rng, reach: f64) -> Pose<f64> {
    let q = [
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
    ];
    let t = [
        r.gen_range(-reach..reach),
        r.gen_range(-reach..reach),
        r.gen_range(-reach..reach),
    ];
    Pose::from_wxyz(q, t).unwrap_or_else(|_| Pose::from_translation(t[0], t[1], t[2]))
}

pub type Mat4 = [[f64; 4]; 4];

/// Homogeneous matrix of a pose, built from the quaternion by the textbook
/// formula rather than through nalgebra.
pub fn matrix_of(p: &Pose<f64>) -> Mat4 {
    let [w, x, y, z] = p.rotation_wxyz();
    let [tx, ty, tz] = p.translation_xyz();
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            tx,
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            ty,
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
            tz,
        ],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn matmul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

// ---- Gaussians ---------------------------------------------------------------

/// A random scene in front of an identity camera looking down +z.
pub fn random_gaussians(r: &mut ChaCha8Rng, n: usize) -> Vec<Gaussian3D<f64>> {
    (0..n)
        .map(|_| {
            let z = r.gen_range(1.5..12.0);
            let mean = Vector3::new(r.gen_range(-0.6..0.6) * z, r.gen_range(-0.6..0.6) * z, z);
            let scale = Vector3::new(
                r.gen_range(0.02..0.4),
                r.gen_range(0.02..0.4),
                r.gen_range(0.02..0.4),
            );
            let rot = UnitQuaternion::from_euler_angles(
                r.gen_range(-3.0..3.0),
                r.gen_range(-3.0..3.0),
                r.gen_range(-3.0..3.0),
            );
            let degree = r.gen_range(0..=3usize);
            let sh: Vec<[f64; 3]> = (0..(degree + 1) * (degree + 1))
                .map(|k| {
                    let amp = if k == 0 { 1.5 } else { 0.3 };
                    [
                        r.gen_range(-amp..amp),
                        r.gen_range(-amp..amp),
                        r.gen_range(-amp..amp),
                    ]
                })
                .collect();
            Gaussian3D::new(mean, scale, rot, r.gen_range(0.05..1.0), sh).unwrap()
        })
        .collect()
}

// ---- map evaluation -----------------------------------------------------------

pub const N_POINTS: usize = 6;

fn random_element(r: &mut ChaCha8Rng, class: MapClass) -> MapElement<f64> {
    let start = Vector2::new(r.gen_range(-25.0..25.0), r.gen_range(-12.0..12.0));
    let heading: f64 = r.gen_range(-3.2..3.2);
    let step = r.gen_range(0.5..2.0);
    let points = (0..N_POINTS)
        .map(|k| start + Vector2::new(heading.cos(), heading.sin()) * (k as f64 * step))
        .collect();
    MapElement::new(points, Frame::Ego, class, false).unwrap()
}

fn jitter(r: &mut ChaCha8Rng, e: &MapElement<f64>, sigma: f64) -> MapElement<f64> {
    let shift = Vector2::new(r.gen_range(-sigma..sigma), r.gen_range(-sigma..sigma));
    let points = e
        .points
        .iter()
        .map(|p| p + shift + Vector2::new(r.gen_range(-0.2..0.2), r.gen_range(-0.2..0.2)) * sigma)
        .collect();
    MapElement::new(points, Frame::Ego, e.class, e.is_closed).unwrap()
}

/// Several samples with every class present in the ground truth. Predictions
/// are noisy copies of some GT elements plus unrelated false positives, with
/// continuous scores.
pub fn random_fixture(r: &mut ChaCha8Rng) -> Vec<EvalSample<f64>> {
    let n_samples = r.gen_range(1..6);
    let mut samples = Vec::new();
    for s in 0..n_samples {
        let mut gt = Vec::new();
        let mut preds = Vec::new();
        for class in MapClass::ALL {
            let force = s == 0;
            let n_gt = if force {
                r.gen_range(1..4)
            } else {
                r.gen_range(0..4)
            };
            for _ in 0..n_gt {
                let e = random_element(r, class);
                if r.gen_bool(0.75) {
                    let sigma = r.gen_range(0.0..2.5);
                    preds.push(
                        Prediction::new(jitter(r, &e, sigma), r.gen_range(0.0..1.0)).unwrap(),
                    );
                }
                gt.push(e);
            }
            for _ in 0..r.gen_range(0..3) {
                preds.push(
                    Prediction::new(random_element(r, class), r.gen_range(0.0..1.0)).unwrap(),
                );
            }
        }
        samples.push(EvalSample {
            sample_id: format!("s{s}"),
            predictions: preds,
            ground_truth: MapLayer::new(Frame::Ego, gt).unwrap(),
        });
    }
    samples
}

/// Direct transcription of the metric: explicit loops, no shared helpers.
pub fn brute_force_chamfer(a: &[Vector2<f64>], b: &[Vector2<f64>]) -> f64 {
    let one_way = |x: &[Vector2<f64>], y: &[Vector2<f64>]| {
        let mut total = 0.0;
        for p in x {
            let mut best = f64::INFINITY;
            for q in y {
                let d = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt();
                if d < best {
                    best = d;
                }
            }
            total += best;
        }
        total / x.len() as f64
    };
    0.5 * one_way(a, b) + 0.5 * one_way(b, a)
}

/// AP of one class at one threshold, globally pooled, 101-point interpolation.
pub fn brute_force_ap(samples: &[EvalSample<f64>], class: MapClass, threshold: f64) -> Option<f64> {
    let mut dets: Vec<(f64, bool)> = Vec::new();
    let mut n_gt = 0;
    for s in samples {
        let gts: Vec<&MapElement<f64>> = s
            .ground_truth
            .elements
            .iter()
            .filter(|e| e.class == class)
            .collect();
        n_gt += gts.len();
        let mut preds: Vec<&Prediction<f64>> = s
            .predictions
            .iter()
            .filter(|p| p.element.class == class)
            .collect();
        preds.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
        let mut used = vec![false; gts.len()];
        for p in preds {
            let mut best: Option<(usize, f64)> = None;
            for (g, e) in gts.iter().enumerate() {
                if used[g] {
                    continue;
                }
                let d = brute_force_chamfer(&p.element.points, &e.points);
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((g, d));
                }
            }
            let tp = match best {
                Some((g, d)) if d <= threshold => {
                    used[g] = true;
                    true
                }
                _ => false,
            };
            dets.push((p.score, tp));
        }
    }
    if n_gt == 0 {
        return if dets.is_empty() { None } else { Some(0.0) };
    }
    dets.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut points = Vec::new();
    let mut tp = 0;
    for (k, d) in dets.iter().enumerate() {
        if d.1 {
            tp += 1;
        }
        points.push((tp as f64 / n_gt as f64, tp as f64 / (k + 1) as f64));
    }
    let mut total = 0.0;
    for r in 0..=100 {
        let level = r as f64 / 100.0;
        let best = points
            .iter()
            .filter(|(rec, _)| *rec >= level)
            .map(|(_, prec)| *prec)
            .fold(0.0, f64::max);
        total += best;
    }
    Some(total / 101.0)
}

/// mAP x 100 from the brute-force APs.
pub fn brute_force_map(
    samples: &[EvalSample<f64>],
    thresholds: &[f64],
) -> (Vec<Vec<Option<f64>>>, f64) {
    let per_class: Vec<Vec<Option<f64>>> = MapClass::ALL
        .iter()
        .map(|&c| {
            thresholds
                .iter()
                .map(|&t| brute_force_ap(samples, c, t))
                .collect()
        })
        .collect();
    let class_ap: Vec<f64> = per_class
        .iter()
        .filter_map(|aps| {
            let d: Vec<f64> = aps.iter().flatten().copied().collect();
            (!d.is_empty()).then(|| d.iter().sum::<f64>() / d.len() as f64)
        })
        .collect();
    let map = if class_ap.is_empty() {
        0.0
    } else {
        100.0 * class_ap.iter().sum::<f64>() / class_ap.len() as f64
    };
    (per_class, map)
}

use crate::bev::BevBox;
use crate::codec::{Box2D, Box3D};

const DEGENERATE_AREA: f64 = 1e-12;

/// Axis-aligned intersection over union.
pub fn iou_2d(a: &Box2D, b: &Box2D) -> f64 {
    let iw = (a.max_u().min(b.max_u()) - a.min_u().max(b.min_u())).max(0.0);
    let ih = (a.max_v().min(b.max_v()) - a.min_v().max(b.min_v())).max(0.0);
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= DEGENERATE_AREA {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Shoelace area of a simple polygon (positive when counter-clockwise).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

/// Sutherland-Hodgman: clips `subject` against the convex, counter-clockwise
/// polygon `clip`.
pub fn clip_convex(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut output = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let cur_in = cross(a, b, cur) >= 0.0;
            let prev_in = cross(a, b, prev) >= 0.0;
            if cur_in {
                if !prev_in {
                    output.push(intersect(prev, cur, a, b));
                }
                output.push(cur);
            } else if prev_in {
                output.push(intersect(prev, cur, a, b));
            }
        }
    }
    output
}

fn intersect(p: [f64; 2], q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let d1 = cross(a, b, p);
    let d2 = cross(a, b, q);
    let t = d1 / (d1 - d2);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Intersection area of two BEV footprints.
pub fn bev_intersection_area(a: &BevBox, b: &BevBox) -> f64 {
    polygon_area(&clip_convex(&a.corners(), &b.corners())).max(0.0)
}

/// Rotated-rectangle IoU in the ground plane.
pub fn iou_bev(a: &BevBox, b: &BevBox) -> f64 {
    if a.area() < DEGENERATE_AREA || b.area() < DEGENERATE_AREA {
        return 0.0;
    }
    let inter = bev_intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= DEGENERATE_AREA {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Upright 3D IoU: footprint intersection times vertical overlap over the
/// union of volumes. Both boxes must share a frame whose z axis is vertical.
pub fn iou_3d(a: &Box3D, b: &Box3D) -> f64 {
    let fa = crate::bev::to_bev(a, None);
    let fb = crate::bev::to_bev(b, None);
    let overlap_z = ((a.center[2] + 0.5 * a.h).min(b.center[2] + 0.5 * b.h)
        - (a.center[2] - 0.5 * a.h).max(b.center[2] - 0.5 * b.h))
    .max(0.0);
    if overlap_z == 0.0 {
        return 0.0;
    }
    let inter = bev_intersection_area(&fa, &fb) * overlap_z;
    let union = a.l * a.w * a.h + b.l * b.w * b.h - inter;
    if union <= DEGENERATE_AREA {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

//! Bird's-eye-view overlap by sampling and by vertex collection.

use roadside_eval::Box3D;

/// Footprint corners `(x, z)` in counterclockwise order seen from above
/// (`+z` up the page, `+x` to the right), starting anywhere.
pub fn footprint(b: &Box3D) -> [[f64; 2]; 4] {
    // Box axes in the x-z plane for a rotation about the downward y axis.
    let (s, c) = b.yaw.sin_cos();
    let along = [c, -s];
    let across = [s, c];
    let (hl, hw) = (0.5 * b.length, 0.5 * b.width);
    let mut pts = [[0.0; 2]; 4];
    for (k, (p, q)) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)].iter().enumerate() {
        pts[k] = [
            b.center.x + p * hl * along[0] + q * hw * across[0],
            b.center.z + p * hl * along[1] + q * hw * across[1],
        ];
    }
    if signed_area(&pts) < 0.0 {
        pts.reverse();
    }
    pts
}

fn signed_area(p: &[[f64; 2]]) -> f64 {
    let n = p.len();
    (0..n).map(|i| p[i][0] * p[(i + 1) % n][1] - p[(i + 1) % n][0] * p[i][1]).sum::<f64>() / 2.0
}

fn inside_rect(b: &Box3D, x: f64, z: f64) -> bool {
    let (s, c) = b.yaw.sin_cos();
    let (dx, dz) = (x - b.center.x, z - b.center.z);
    let u = dx * c - dz * s;
    let v = dx * s + dz * c;
    u.abs() <= 0.5 * b.length && v.abs() <= 0.5 * b.width
}

/// BEV IoU from an `n x n` stratified lattice over `a`'s footprint, shifted
/// by `offset` (in cell units, each component in `[0, 1)`). With a uniform
/// random offset this is an unbiased estimate of the overlap fraction.
pub fn monte_carlo_iou_bev(a: &Box3D, b: &Box3D, n: usize, offset: [f64; 2]) -> f64 {
    let (s, c) = a.yaw.sin_cos();
    let (du, dv) = (a.length / n as f64, a.width / n as f64);
    let (bs, bc) = b.yaw.sin_cos();
    let (hl, hw) = (0.5 * b.length, 0.5 * b.width);
    let mut hits = 0usize;
    for i in 0..n {
        let u = -0.5 * a.length + (i as f64 + offset[0]) * du;
        for j in 0..n {
            let v = -0.5 * a.width + (j as f64 + offset[1]) * dv;
            // Local (u, v) of a to world x-z, then into b's local frame.
            let x = a.center.x + u * c + v * s;
            let z = a.center.z - u * s + v * c;
            let (dx, dz) = (x - b.center.x, z - b.center.z);
            let bu = dx * bc - dz * bs;
            let bv = dx * bs + dz * bc;
            if bu.abs() <= hl && bv.abs() <= hw {
                hits += 1;
            }
        }
    }
    let area_a = a.length * a.width;
    let inter = area_a * hits as f64 / (n * n) as f64;
    inter / (area_a + b.length * b.width - inter)
}

fn segment_intersection(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> Option<[f64; 2]> {
    let r = [p2[0] - p1[0], p2[1] - p1[1]];
    let s = [q2[0] - q1[0], q2[1] - q1[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    if den.abs() < 1e-300 {
        return None;
    }
    let qp = [q1[0] - p1[0], q1[1] - p1[1]];
    let t = (qp[0] * s[1] - qp[1] * s[0]) / den;
    let u = (qp[0] * r[1] - qp[1] * r[0]) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then(|| [p1[0] + t * r[0], p1[1] + t * r[1]])
}

/// Exact BEV intersection area: gathers the corners of each rectangle that
/// lie inside the other plus all edge crossings, orders them by angle about
/// their centroid and takes the shoelace area.
pub fn intersection_area_bev(a: &Box3D, b: &Box3D) -> f64 {
    let pa = footprint(a);
    let pb = footprint(b);
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let grow = |bx: &Box3D| Box3D { length: bx.length * (1.0 + 1e-12), width: bx.width * (1.0 + 1e-12), ..*bx };
    let (ga, gb) = (grow(a), grow(b));
    pts.extend(pa.iter().filter(|p| inside_rect(&gb, p[0], p[1])));
    pts.extend(pb.iter().filter(|p| inside_rect(&ga, p[0], p[1])));
    for i in 0..4 {
        for j in 0..4 {
            if let Some(p) = segment_intersection(pa[i], pa[(i + 1) % 4], pb[j], pb[(j + 1) % 4]) {
                pts.push(p);
            }
        }
    }
    if pts.len() < 3 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cz = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    pts.sort_by(|p, q| (p[1] - cz).atan2(p[0] - cx).total_cmp(&(q[1] - cz).atan2(q[0] - cx)));
    signed_area(&pts).abs()
}

pub fn iou_bev(a: &Box3D, b: &Box3D) -> f64 {
    let inter = intersection_area_bev(a, b);
    let union = a.length * a.width + b.length * b.width - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// 3D IoU of boxes that rotate only about the vertical axis.
pub fn iou_3d(a: &Box3D, b: &Box3D) -> f64 {
    let top = (a.center.y - 0.5 * a.height).max(b.center.y - 0.5 * b.height);
    let bottom = (a.center.y + 0.5 * a.height).min(b.center.y + 0.5 * b.height);
    if bottom <= top {
        return 0.0;
    }
    let inter = intersection_area_bev(a, b) * (bottom - top);
    let union = a.length * a.width * a.height + b.length * b.width * b.height - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

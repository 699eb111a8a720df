//! Exact convex polygon clipping in the plane.
//!
//! Used by the k = 2 symmetry check, which intersects every cell with every
//! reflected-translated cell and tests the symmetry sum at the vertices of
//! each intersection. Polygons are vertex lists; clipping a convex polygon
//! against a half-plane keeps crossings exact.

use crate::lp::LinearConstraint;
use crate::rational::{dot, Rat};
use num_traits::{Signed, Zero};

/// Twice the signed area (shoelace); positive for counterclockwise.
pub fn signed_area_twice(poly: &[Vec<Rat>]) -> Rat {
    let n = poly.len();
    let mut acc = Rat::zero();
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        acc += &a[0] * &b[1] - &b[0] * &a[1];
    }
    acc
}

/// Clips `poly` by `con.coeffs . x <= con.rhs` (Sutherland-Hodgman step).
fn clip_halfplane(poly: &[Vec<Rat>], con: &LinearConstraint) -> Vec<Vec<Rat>> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let value = |p: &[Rat]| dot(&con.coeffs, p) - &con.rhs; // <= 0 is inside
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for i in 0..n {
        let cur = &poly[i];
        let nxt = &poly[(i + 1) % n];
        let vc = value(cur);
        let vn = value(nxt);
        let cur_in = !vc.is_positive();
        let nxt_in = !vn.is_positive();
        if cur_in {
            out.push(cur.clone());
        }
        if cur_in != nxt_in {
            // crossing point: cur + t (nxt - cur) with t = vc / (vc - vn)
            let t = &vc / (&vc - &vn);
            let cross: Vec<Rat> = cur.iter().zip(nxt).map(|(a, b)| a + &t * (b - a)).collect();
            out.push(cross);
        }
    }
    dedupe(out)
}

fn dedupe(poly: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let mut out: Vec<Vec<Rat>> = Vec::with_capacity(poly.len());
    for p in poly {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Intersection of a convex polygon with a closed half-space system. The
/// result may be empty or lower-dimensional (a segment or point); its
/// vertices are exact.
pub fn intersect_convex(poly: &[Vec<Rat>], halfspaces: &[LinearConstraint]) -> Vec<Vec<Rat>> {
    let mut current = ensure_ccw(poly.to_vec());
    for con in halfspaces {
        if current.is_empty() {
            break;
        }
        current = clip_halfplane(&current, con);
    }
    current
}

/// Reorders to counterclockwise if needed; degenerate inputs pass through.
pub fn ensure_ccw(mut poly: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    if poly.len() >= 3 && signed_area_twice(&poly).is_negative() {
        poly.reverse();
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::simplex::Simplex;
    use num_traits::Signed;

    fn tri(v: [[i64; 2]; 3]) -> Vec<Vec<Rat>> {
        v.iter().map(|p| vec![int(p[0]), int(p[1])]).collect()
    }

    #[test]
    fn area_orientation() {
        let ccw = tri([[0, 0], [1, 0], [0, 1]]);
        assert_eq!(signed_area_twice(&ccw), int(1));
        let cw: Vec<_> = ccw.iter().rev().cloned().collect();
        assert!(signed_area_twice(&cw).is_negative());
    }

    #[test]
    fn overlapping_triangles() {
        // intersect the unit triangle with its reflection through (1/2, 1/2):
        // the middle square-ish quad has area 1/4... compute exactly.
        let a = tri([[0, 0], [1, 0], [0, 1]]);
        let b = Simplex::new(tri([[1, 1], [0, 1], [1, 0]]).into_iter().collect()).unwrap();
        let inter = intersect_convex(&a, &b.halfspaces(false));
        // intersection is the segment x + y = 1 from (1,0) to (0,1)
        assert_eq!(inter.len(), 2);
        for p in &inter {
            assert_eq!(&p[0] + &p[1], int(1));
        }
    }

    #[test]
    fn proper_overlap_region() {
        let a = tri([[0, 0], [2, 0], [0, 2]]);
        let b = Simplex::new(vec![
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(5, 2), rat(1, 2)],
            vec![rat(1, 2), rat(5, 2)],
        ])
        .unwrap();
        let inter = intersect_convex(&a, &b.halfspaces(false));
        assert!(inter.len() >= 3);
        let area2 = signed_area_twice(&ensure_ccw(inter));
        assert!(area2.is_positive());
    }

    #[test]
    fn disjoint_triangles() {
        let a = tri([[0, 0], [1, 0], [0, 1]]);
        let b = Simplex::new(tri([[5, 5], [6, 5], [5, 6]])).unwrap();
        assert!(intersect_convex(&a, &b.halfspaces(false)).is_empty());
    }
}

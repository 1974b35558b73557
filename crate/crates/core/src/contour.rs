//! Outer-contour tracing of binary masks and rectilinear corner extraction.

use crate::grid::Grid;

/// Moore neighborhood, clockwise on screen (y down), starting west.
const RING: [(isize, isize); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn ring_index(d: (isize, isize)) -> usize {
    RING.iter().position(|&r| r == d).expect("neighbor offset")
}

fn is_set(mask: &Grid<bool>, x: isize, y: isize) -> bool {
    mask.get_signed(x, y).unwrap_or(false)
}

/// 8-connected components of `mask`, each as a list of pixels in raster
/// order. Components are ordered by their first pixel in raster order.
pub fn components(mask: &Grid<bool>) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = Grid::filled(w, h, false);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || seen.get(x, y) {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![(x, y)];
            seen.set(x, y, true);
            while let Some((cx, cy)) = stack.pop() {
                comp.push((cx, cy));
                for (dx, dy) in RING {
                    let (nx, ny) = (cx as isize + dx, cy as isize + dy);
                    if is_set(mask, nx, ny) && !seen.get(nx as usize, ny as usize) {
                        seen.set(nx as usize, ny as usize, true);
                        stack.push((nx as usize, ny as usize));
                    }
                }
            }
            comp.sort_by_key(|&(x, y)| (y, x));
            out.push(comp);
        }
    }
    out
}

/// Moore-neighbor trace of the outer boundary of the component containing
/// `start`, which must be the component's first pixel in raster order.
///
/// Returns the closed boundary pixel chain without repeating the start.
/// Tracing stops when the start pixel is about to be left through the same
/// move as the first step (Jacob's criterion).
pub fn trace_outer(mask: &Grid<bool>, start: (usize, usize)) -> Vec<(isize, isize)> {
    let s = (start.0 as isize, start.1 as isize);
    let mut contour = vec![s];
    // Entered from the west: nothing precedes the start in raster order.
    let mut back = 0usize;
    let mut cur = s;
    let mut first_step: Option<(isize, isize)> = None;
    let limit = 4 * mask.width() * mask.height() + 8;

    for _ in 0..limit {
        let mut next = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let cand = (cur.0 + RING[d].0, cur.1 + RING[d].1);
            if is_set(mask, cand.0, cand.1) {
                let prev_dir = (d + 7) % 8;
                let prev = (cur.0 + RING[prev_dir].0, cur.1 + RING[prev_dir].1);
                next = Some((cand, ring_index((prev.0 - cand.0, prev.1 - cand.1))));
                break;
            }
        }
        let Some((n, nback)) = next else {
            // isolated pixel
            break;
        };
        if cur == s {
            match first_step {
                None => first_step = Some(n),
                Some(f) if f == n => break,
                Some(_) => {}
            }
        }
        contour.push(n);
        cur = n;
        back = nback;
    }
    if contour.len() > 1 && contour.last() == Some(&s) {
        contour.pop();
    }
    contour
}

/// Keeps only the points where the chain direction changes, treating the
/// chain as closed.
pub fn simplify_chain(chain: &[(isize, isize)]) -> Vec<(isize, isize)> {
    let n = chain.len();
    if n < 3 {
        return chain.to_vec();
    }
    let dir = |a: (isize, isize), b: (isize, isize)| ((b.0 - a.0).signum(), (b.1 - a.1).signum());
    (0..n)
        .filter(|&k| {
            let prev = chain[(k + n - 1) % n];
            let next = chain[(k + 1) % n];
            dir(prev, chain[k]) != dir(chain[k], next)
        })
        .map(|k| chain[k])
        .collect()
}

/// Polygon corners: simplified contour points that end at least one
/// axis-aligned segment (consecutive points sharing an x or y coordinate).
///
/// A concave corner of a rectilinear region shows up in a pixel-center chain
/// as a one-pixel diagonal step between two perpendicular axis-aligned runs;
/// such a step is replaced by the corner pixel where the two runs meet, when
/// that pixel belongs to the mask.
pub fn rectilinear_corners(simplified: &[(isize, isize)], mask: &Grid<bool>) -> Vec<(isize, isize)> {
    let n = simplified.len();
    if n < 2 {
        return simplified.to_vec();
    }
    let aligned = |a: (isize, isize), b: (isize, isize)| a.0 == b.0 || a.1 == b.1;
    let corners: Vec<_> = (0..n)
        .filter(|&k| {
            let p = simplified[k];
            aligned(simplified[(k + n - 1) % n], p) || aligned(p, simplified[(k + 1) % n])
        })
        .map(|k| simplified[k])
        .collect();
    close_notches(&corners, mask)
}

fn close_notches(pts: &[(isize, isize)], mask: &Grid<bool>) -> Vec<(isize, isize)> {
    let n = pts.len();
    if n < 4 {
        return pts.to_vec();
    }
    let mut out = Vec::with_capacity(n);
    let mut skip_first = false;
    let mut k = 0;
    while k < n {
        let a = pts[k];
        let b = pts[(k + 1) % n];
        let prev = pts[(k + n - 1) % n];
        let next = pts[(k + 2) % n];
        let unit_diag = (b.0 - a.0).abs() == 1 && (b.1 - a.1).abs() == 1;
        let corner = if prev.0 == a.0 && prev.1 != a.1 && next.1 == b.1 && next.0 != b.0 {
            Some((a.0, b.1))
        } else if prev.1 == a.1 && prev.0 != a.0 && next.0 == b.0 && next.1 != b.1 {
            Some((b.0, a.1))
        } else {
            None
        };
        match corner {
            Some(c) if unit_diag && (k + 1 < n || !skip_first) && is_set(mask, c.0, c.1) => {
                out.push(c);
                if k + 1 == n {
                    // The pair wraps around: drop the already emitted start.
                    out.remove(0);
                } else if k == 0 {
                    skip_first = true;
                }
                k += 2;
            }
            _ => {
                out.push(a);
                k += 1;
            }
        }
    }
    out
}

/// Traces every component of `mask` and returns its corner polygon.
pub fn mask_polygons(mask: &Grid<bool>) -> Vec<Vec<(isize, isize)>> {
    components(mask)
        .into_iter()
        .map(|comp| rectilinear_corners(&simplify_chain(&trace_outer(mask, comp[0])), mask))
        .collect()
}

//! Algebraic raster-to-vector conversion.
//!
//! Boundary coordinates are weighted means of the rectified finite-difference
//! response of the soft primitive mask; facet angles are orientation-weighted
//! means of the cosine image; the primitive type comes from winner-takes-all
//! pixel counts. All formulas are piecewise smooth in the input
//! probabilities.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{PrimitiveType, RoofPrimitive, Side};
use crate::raster::{RasterBundle, CH_BG, CH_LR, CH_TB};
use crate::scalar::Scalar;

/// Fraction of the mask below which the minority facet group is ignored
/// when deciding between gable and hip.
pub const GABLE_MINORITY_FRACTION: f64 = 0.05;

/// Primitive mask probability: one minus the background probability.
pub fn mask_from_orientation<T: Scalar>(orientation: &Grid<[T; 3]>) -> Grid<T> {
    orientation.map(|o| T::one() - o[CH_BG])
}

/// Rectified derivative responses for one side, as `(coordinate, response)`
/// pairs per row/column position.
///
/// Left/top use the backward difference `m(x) - m(x - 1)` with zero padding;
/// right/bottom use `m(x - 1) - m(x)` evaluated up to one past the last
/// pixel, so a hard mask over columns `[l, r)` responds exactly at `l` and
/// `r`.
fn response_at<T: Scalar>(mask: &Grid<T>, side: Side, a: usize, b: usize) -> T {
    let zero = T::zero();
    let (w, h) = (mask.width(), mask.height());
    let m = |x: usize, y: usize| if x < w && y < h { mask.get(x, y) } else { zero };
    // (a, b) = (position along the differentiated axis, position across it)
    let d = match side {
        Side::Left => m(a, b) - if a == 0 { zero } else { m(a - 1, b) },
        Side::Top => m(b, a) - if a == 0 { zero } else { m(b, a - 1) },
        Side::Right => (if a == 0 { zero } else { m(a - 1, b) }) - m(a, b),
        Side::Bottom => (if a == 0 { zero } else { m(b, a - 1) }) - m(b, a),
    };
    d.max(zero)
}

fn extents<T>(mask: &Grid<T>, side: Side) -> (usize, usize) where T: Copy {
    // (count along the differentiated axis including the trailing edge, across)
    if side.is_lr() {
        (mask.width() + 1, mask.height())
    } else {
        (mask.height() + 1, mask.width())
    }
}

/// Weighted-mean boundary coordinate of `side`.
pub fn boundary_coordinate<T: Scalar>(mask: &Grid<T>, side: Side) -> Result<T> {
    let (along, across) = extents(mask, side);
    let mut num = T::zero();
    let mut den = T::zero();
    for a in 0..along {
        let pos = T::of_usize(a);
        for b in 0..across {
            let r = response_at(mask, side, a, b);
            num = num + pos * r;
            den = den + r;
        }
    }
    if !(den > T::zero()) {
        return Err(Error::NoBoundaryResponse(side));
    }
    Ok(num / den)
}

/// Per-position summed response, used for diagnostics.
pub fn boundary_profile<T: Scalar>(mask: &Grid<T>, side: Side) -> Vec<T> {
    let (along, across) = extents(mask, side);
    (0..along).map(|a| (0..across).map(|b| response_at(mask, side, a, b)).sum()).collect()
}

/// `(left, right, top, bottom)` of the soft mask.
pub fn vectorize_box<T: Scalar>(orientation: &Grid<[T; 3]>) -> Result<(T, T, T, T)> {
    let mask = mask_from_orientation(orientation);
    Ok((
        boundary_coordinate(&mask, Side::Left)?,
        boundary_coordinate(&mask, Side::Right)?,
        boundary_coordinate(&mask, Side::Top)?,
        boundary_coordinate(&mask, Side::Bottom)?,
    ))
}

/// Recovered facet angles; `None` when the facet group has no weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetAngles<T> {
    pub lr: Option<T>,
    pub tb: Option<T>,
}

/// Arccos of the orientation-weighted mean cosine, per facet group. A group
/// is absent when its total weight is below `1e-6` per pixel.
pub fn vectorize_angles<T: Scalar>(orientation: &Grid<[T; 3]>, angle: &Grid<T>) -> FacetAngles<T> {
    let eps = T::of(1e-6) * T::of_usize(orientation.data().len());
    let group = |ch: usize| {
        let (mut num, mut den) = (T::zero(), T::zero());
        for (o, &a) in orientation.data().iter().zip(angle.data()) {
            num = num + o[ch] * a;
            den = den + o[ch];
        }
        (den >= eps && den > T::zero()).then(|| (num / den).max(-T::one()).min(T::one()).acos())
    };
    FacetAngles { lr: group(CH_LR), tb: group(CH_TB) }
}

/// Winner-takes-all pixel counts `(top/bottom, left/right)`. Ties between
/// channels go to the lower channel index.
pub fn orientation_counts<T: Scalar>(orientation: &Grid<[T; 3]>) -> (usize, usize) {
    let mut tb = 0;
    let mut lr = 0;
    for o in orientation.data() {
        let mut best = 0;
        for ch in 1..3 {
            if o[ch] > o[best] {
                best = ch;
            }
        }
        match best {
            CH_TB => tb += 1,
            CH_LR => lr += 1,
            _ => {}
        }
    }
    (tb, lr)
}

/// Horizontal when top/bottom pixels are at least as many as left/right
/// ones; gable when the minority group is at most 5% of the mask.
pub fn classify_type<T: Scalar>(orientation: &Grid<[T; 3]>) -> Result<PrimitiveType> {
    let (s_b, s_g) = orientation_counts(orientation);
    classify_counts(s_b, s_g)
}

pub fn classify_counts(s_b: usize, s_g: usize) -> Result<PrimitiveType> {
    let total = s_b + s_g;
    if total == 0 {
        return Err(Error::AllBackground);
    }
    // minority <= 0.05 * total, in integers
    let small = |minority: usize| 20 * minority <= total;
    Ok(if s_b >= s_g {
        if small(s_g) {
            PrimitiveType::HorizontalGable
        } else {
            PrimitiveType::HorizontalHip
        }
    } else if small(s_b) {
        PrimitiveType::VerticalGable
    } else {
        PrimitiveType::VerticalHip
    })
}

/// Full primitive from one primitive's raster; absent angles become zero.
pub fn vectorize_primitive<T: Scalar>(bundle: &RasterBundle<T>) -> Result<RoofPrimitive<T>> {
    let (left, right, top, bottom) = vectorize_box(&bundle.orientation)?;
    let angles = vectorize_angles(&bundle.orientation, &bundle.angle);
    let ptype = classify_type(&bundle.orientation)?;
    Ok(RoofPrimitive {
        left,
        right,
        top,
        bottom,
        angle_lr: angles.lr.unwrap_or_else(T::zero),
        angle_tb: angles.tb.unwrap_or_else(T::zero),
        ptype,
    })
}

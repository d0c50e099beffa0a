//! Adaptive Simpson quadrature with an absolute error target.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tolerance: 1e-8,
            max_subdivisions: 1 << 20,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tolerance > 0.0) {
            return Err(invalid("quadrature tolerance must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("quadrature needs at least one subdivision"));
        }
        Ok(())
    }
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

// Splits are forced down to this depth before the error estimate is trusted.
const MIN_DEPTH: u32 = 2;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// `∫_a^b f` to within `settings.abs_tolerance`.
///
/// The range is first cut into panels no wider than `max_panel`, so that an
/// oscillating integrand is resolved before the error estimate is consulted;
/// each panel then receives a share of the tolerance proportional to its
/// width and is refined adaptively.
pub fn integrate<F>(mut f: F, a: f64, b: f64, max_panel: f64, settings: &QuadratureSettings) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    settings.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("integration bounds must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, max_panel, settings).map(|v| -v);
    }
    let len = b - a;
    let panels = if max_panel > 0.0 && max_panel.is_finite() {
        (len / max_panel).ceil().max(1.0)
    } else {
        1.0
    };
    if panels > settings.max_subdivisions as f64 {
        return Err(Error::Quadrature(settings.max_subdivisions));
    }
    let panels = panels as usize;
    let width = len / panels as f64;
    let mut stack = Vec::with_capacity(64);
    let mut subdivisions = panels;
    let mut total = 0.0;
    let mut left = a;
    let mut f_left = f(a);
    for i in 0..panels {
        let right = if i + 1 == panels { b } else { a + width * (i + 1) as f64 };
        let mid = 0.5 * (left + right);
        let (fm, fr) = (f(mid), f(right));
        stack.push(Segment {
            a: left,
            b: right,
            fa: f_left,
            fm,
            fb: fr,
            whole: simpson(left, right, f_left, fm, fr),
            tol: settings.abs_tolerance * (right - left) / len,
            depth: 0,
        });
        while let Some(seg) = stack.pop() {
            let m = 0.5 * (seg.a + seg.b);
            let lm = 0.5 * (seg.a + m);
            let rm = 0.5 * (m + seg.b);
            let (flm, frm) = (f(lm), f(rm));
            let l = simpson(seg.a, m, seg.fa, flm, seg.fm);
            let r = simpson(m, seg.b, seg.fm, frm, seg.fb);
            let diff = l + r - seg.whole;
            let too_narrow = m <= seg.a || m >= seg.b;
            if too_narrow || (seg.depth >= MIN_DEPTH && diff.abs() <= 15.0 * seg.tol) {
                total += l + r + diff / 15.0;
                continue;
            }
            subdivisions += 1;
            if subdivisions > settings.max_subdivisions {
                return Err(Error::Quadrature(settings.max_subdivisions));
            }
            let half = 0.5 * seg.tol;
            stack.push(Segment {
                a: m,
                b: seg.b,
                fa: seg.fm,
                fm: frm,
                fb: seg.fb,
                whole: r,
                tol: half,
                depth: seg.depth + 1,
            });
            stack.push(Segment {
                a: seg.a,
                b: m,
                fa: seg.fa,
                fm: flm,
                fb: seg.fm,
                whole: l,
                tol: half,
                depth: seg.depth + 1,
            });
        }
        left = right;
        f_left = fr;
    }
    Ok(total)
}

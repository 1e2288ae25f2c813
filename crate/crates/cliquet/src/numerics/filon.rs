//! Oscillatory Fourier transforms of smooth profiles on an interval.
//!
//! The pricing integrands repeatedly need `T(x) = int P(w) e^{ixw} dw` for
//! one fixed real profile `P` and many frequencies `x` (up to a few
//! thousand). Direct quadrature would cost O(x) work per evaluation;
//! instead `P` is fitted once by an adaptive piecewise cubic Hermite
//! interpolant and the transform of each cubic segment is evaluated in
//! closed form, making every evaluation O(segments) regardless of
//! frequency.
//!
//! Two implementation points keep an evaluation cheap and stable:
//! - refinement is by bisection of a uniform base grid, so segment widths
//!   take only a handful of dyadic values; the per-segment moments
//!   `int_0^h t^k e^{ixt} dt` are computed once per width class, and the
//!   running phase `e^{ix w_i}` advances by one complex multiply per
//!   segment instead of an `exp`;
//! - the subtracted kernel `e^{ixw} - 1` is carried through every step
//!   (moments via a Taylor branch for `|xh| <= 1`, phases as
//!   `e^{ixw} - 1` updated without cancellation), so `transform_minus_one`
//!   keeps full relative accuracy down to `x -> 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `e^{i theta} - 1` without cancellation at small angles.
pub fn cis_minus_one(theta: f64) -> Complex64 {
    let s = (0.5 * theta).sin();
    Complex64::new(-2.0 * s * s, theta.sin())
}

#[derive(Debug, Clone)]
struct Segment {
    /// dyadic width class: width = base_width / 2^class
    class: u8,
    /// monomial coefficients of the local cubic p(t), t in [0, h]
    c: [f64; 4],
    /// int_0^h p(t) dt
    plain: f64,
}

/// Per width class, the moment set at one frequency.
#[derive(Clone, Copy)]
struct ClassMoments {
    /// subtracted moments `int_0^h t^k (e^{ixt}-1) dt`
    sub: [Complex64; 4],
    /// `e^{ixh} - 1`
    e_m1: Complex64,
}

/// Piecewise-cubic fit of a real profile, ready for repeated transforms.
#[derive(Debug, Clone)]
pub struct OscProfile {
    lo: f64,
    base_width: f64,
    segments: Vec<Segment>,
    mass: f64,
}

impl OscProfile {
    /// Fit `f` (with analytic derivative `df`) on `[lo, hi]` so that the
    /// interpolant matches `f` to absolute tolerance `tol`.
    pub fn build(
        f: &dyn Fn(f64) -> f64,
        df: &dyn Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        tol: f64,
    ) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParam(format!(
                "profile interval must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        const BASE: usize = 64;
        const MAX_CLASS: u8 = 40;
        const MAX_SEGMENTS: usize = 120_000;
        let base_width = (hi - lo) / BASE as f64;

        let mut segments = Vec::new();
        // pending (w0, class, fa, da, fb, db); pushed right-to-left
        let mut stack: Vec<(f64, u8, f64, f64, f64, f64)> = Vec::with_capacity(BASE);
        for i in (0..BASE).rev() {
            let a = lo + i as f64 * base_width;
            let b = a + base_width;
            stack.push((a, 0, f(a), df(a), f(b), df(b)));
        }
        while let Some((w0, class, fa, da, fb, db)) = stack.pop() {
            if segments.len() + stack.len() >= MAX_SEGMENTS {
                return Err(Error::QuadratureFailure(format!(
                    "profile fit needs more than {MAX_SEGMENTS} segments at tol {tol:.1e}"
                )));
            }
            let h = base_width / (1u64 << class) as f64;
            let c = hermite_coeffs(h, fa, da, fb, db);
            // probes at irrational-ish fractions to dodge aliasing
            let ok = class >= MAX_CLASS
                || [0.381_966_011_250_105f64, 0.723_606_797_749_979f64]
                    .iter()
                    .all(|&q| {
                        let t = q * h;
                        let p = ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
                        (p - f(w0 + t)).abs() <= tol
                    });
            if ok {
                let plain = h * (c[0] + h * (c[1] / 2.0 + h * (c[2] / 3.0 + h * c[3] / 4.0)));
                segments.push(Segment { class, c, plain });
            } else {
                let mid = w0 + 0.5 * h;
                let fm = f(mid);
                let dm = df(mid);
                stack.push((mid, class + 1, fm, dm, fb, db));
                stack.push((w0, class + 1, fa, da, fm, dm));
            }
        }
        let mass = segments.iter().map(|s| s.plain).sum();
        Ok(OscProfile {
            lo,
            base_width,
            segments,
            mass,
        })
    }

    /// `int P(w) dw` (the transform at x = 0).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// `T(x) = int P(w) e^{ixw} dw`.
    pub fn transform(&self, x: f64) -> Complex64 {
        self.transform_minus_one(x) + self.mass
    }

    /// `int P(w) (e^{ixw} - 1) dw`, accurate relative to its own size even
    /// for tiny `x` where `transform(x) - mass()` would cancel.
    pub fn transform_minus_one(&self, x: f64) -> Complex64 {
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut class_moments: [Option<ClassMoments>; 41] = [None; 41];
        // running d_i = e^{ix(w_i - lo)} - 1, advanced segment by segment
        let mut d = Complex64::new(0.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for s in &self.segments {
            let cm = class_moments[s.class as usize].get_or_insert_with(|| {
                let h = self.base_width / (1u64 << s.class) as f64;
                ClassMoments::at(x, h)
            });
            let sub = &cm.sub;
            let inner_sub = s.c[0] * sub[0] + s.c[1] * sub[1] + s.c[2] * sub[2] + s.c[3] * sub[3];
            // int_seg P (e^{ixv}-1) dv over lo-relative v:
            //   (1+d)(plain + inner_sub) - plain = d*plain + (1+d)*inner_sub
            acc += d * s.plain + (d + 1.0) * inner_sub;
            // d <- d * e^{ixh} + (e^{ixh} - 1)
            d = d * (cm.e_m1 + 1.0) + cm.e_m1;
        }
        // absolute phases: T~ = e^{ix lo} * acc + (e^{ix lo} - 1) * mass
        let lo_m1 = cis_minus_one(x * self.lo);
        (lo_m1 + 1.0) * acc + lo_m1 * self.mass
    }
}

impl ClassMoments {
    fn at(x: f64, h: f64) -> Self {
        let z = x * h;
        if z.abs() <= 1.0 {
            // Taylor in (ix), shared factor (ixh)^j / j!:
            //   I~_k = sum_{j>=1} (ix)^j h^{k+j+1} / (j! (k+j+1))
            // |z| <= 1 makes 24 terms plenty (remainder < 1/25!).
            let ixh = Complex64::new(0.0, z);
            let scale = [h, h * h, h * h * h, h * h * h * h];
            let mut sub = [Complex64::new(0.0, 0.0); 4];
            let mut term = Complex64::new(1.0, 0.0);
            for j in 1..=24 {
                term *= ixh / j as f64;
                for k in 0..4 {
                    sub[k] += term * (scale[k] / (k + j + 1) as f64);
                }
                if term.norm_sqr() < 1e-68 {
                    break;
                }
            }
            // e^{ixh} - 1 = ix I_0 exactly, with I_0 = I~_0 + h
            ClassMoments {
                sub,
                e_m1: Complex64::new(0.0, x) * (sub[0] + h),
            }
        } else {
            let ix = Complex64::new(0.0, x);
            let e = Complex64::from_polar(1.0, z);
            let mut full = [Complex64::new(0.0, 0.0); 4];
            full[0] = (e - 1.0) / ix;
            let mut hk = 1.0;
            for k in 1..4 {
                hk *= h;
                full[k] = (hk * e - k as f64 * full[k - 1]) / ix;
            }
            let mut sub = full;
            let mut hk = h;
            for (k, slot) in sub.iter_mut().enumerate() {
                *slot -= hk / (k as f64 + 1.0);
                hk *= h;
            }
            ClassMoments { sub, e_m1: e - 1.0 }
        }
    }
}

fn hermite_coeffs(h: f64, fa: f64, da: f64, fb: f64, db: f64) -> [f64; 4] {
    let slope = (fb - fa) / h;
    [
        fa,
        da,
        (3.0 * slope - 2.0 * da - db) / h,
        (-2.0 * slope + da + db) / (h * h),
    ]
}

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{amplitudes_3adic, fourier_bohr_numeric, FourierModuleElement, TypedPatch1D, WeightedPointPatch};
use crate::catalog;
use crate::chair::chair_recursion;
use crate::error::Result;
use crate::exactnum::{fmt_rational, Rational};
use crate::output::{fmt17, F17};

/// Columns of the spectrum table.
pub const CSV_HEADER: [&str; 7] = ["m", "n", "k", "analytic_re", "analytic_im_abs2", "numeric_abs2", "rel_err"];

/// Relative tolerance for analytic vs numeric intensities.
pub const TOLERANCE: f64 = 0.05;

/// Intensity threshold, relative to the strongest peak, for the tolerance check.
pub const SIGNIFICANT: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    pub m: i64,
    pub n: u32,
    pub k: String,
    pub analytic_re: F17,
    /// Analytic intensity `|Σ h A|²`.
    pub analytic_abs2: F17,
    pub numeric_re: F17,
    pub numeric_im: F17,
    pub numeric_abs2: F17,
    pub rel_err: Option<F17>,
}

/// Which closed form is matched to which tile type.
#[derive(Clone, Debug, Serialize)]
pub struct AssignmentCheck {
    pub candidates: Vec<(String, F17)>,
    /// Candidate with the smallest per-type amplitude error.
    pub chosen: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub radius: i64,
    pub weights: Vec<F17>,
    pub entries: Vec<SpectrumEntry>,
    /// `(m, n)` of the strongest analytic peaks, strongest first.
    pub strongest: Vec<(i64, u32)>,
    pub max_rel_err_strongest: F17,
    /// Peaks with analytic intensity at least `SIGNIFICANT` times the maximum.
    pub significant_peaks: usize,
    pub max_rel_err_significant: F17,
    pub tolerance: F17,
    pub pass: bool,
    pub assignment: AssignmentCheck,
    /// `(Σ h_x/6)²`, the analytic and the numeric intensity at `k = 0`.
    pub k0: (F17, F17, F17),
}

impl SpectrumReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| crate::Error::Precondition(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(io)?;
        for e in &self.entries {
            w.write_record([
                e.m.to_string(),
                e.n.to_string(),
                e.k.clone(),
                fmt17(e.analytic_re.0),
                fmt17(e.analytic_abs2.0),
                fmt17(e.numeric_abs2.0),
                e.rel_err.map(|x| fmt17(x.0)).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Precondition(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn combine(a: &[Complex64], h: &[f64]) -> Complex64 {
    a.iter().zip(h).map(|(x, w)| x * w).sum()
}

/// Analytic intensities against exact-phase Fourier–Bohr estimates on a
/// three-type patch, in canonical `k` order.
pub fn spectrum_compare(
    patch: &TypedPatch1D,
    h: &[f64; 3],
    elements: &[FourierModuleElement],
    n_strongest: usize,
) -> Result<SpectrumReport> {
    let rows: Vec<(FourierModuleElement, [Complex64; 3], Vec<Complex64>)> =
        elements.par_iter().map(|e| (*e, amplitudes_3adic(e), patch.per_type_rational(e.m, e.denominator()))).collect();
    let entries: Vec<SpectrumEntry> = rows
        .iter()
        .map(|(e, a, f)| {
            let ana = combine(a, h);
            let num = combine(f, h);
            let (ia, inum) = (ana.norm_sqr(), num.norm_sqr());
            SpectrumEntry {
                m: e.m,
                n: e.n,
                k: fmt_rational(&e.value()),
                analytic_re: F17(ana.re),
                analytic_abs2: F17(ia),
                numeric_re: F17(num.re),
                numeric_im: F17(num.im),
                numeric_abs2: F17(inum),
                rel_err: (ia > 0.0).then(|| F17((inum - ia).abs() / ia)),
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| {
        entries[j]
            .analytic_abs2
            .0
            .total_cmp(&entries[i].analytic_abs2.0)
            .then_with(|| rows[i].0.value().cmp(&rows[j].0.value()))
    });
    order.truncate(n_strongest);
    let max_rel = order.iter().map(|&i| entries[i].rel_err.map_or(f64::INFINITY, |x| x.0)).fold(0.0, f64::max);

    let i_max = entries.iter().map(|e| e.analytic_abs2.0).fold(0.0, f64::max);
    let significant: Vec<f64> = entries
        .iter()
        .filter(|e| e.analytic_abs2.0 >= SIGNIFICANT * i_max && i_max > 0.0)
        .map(|e| e.rel_err.map_or(f64::INFINITY, |x| x.0))
        .collect();
    let max_sig = significant.iter().copied().fold(0.0, f64::max);

    let assignments: [(&str, [usize; 3]); 2] = [
        ("A_a, A_b, A_c = first, second, third formula", [0, 1, 2]),
        ("A_a, A_b, A_c = first, third, second formula", [0, 2, 1]),
    ];
    let candidates: Vec<(String, F17)> = assignments
        .iter()
        .map(|(name, perm)| {
            let err =
                rows.iter().flat_map(|(_, a, f)| (0..3).map(move |t| (f[t] - a[perm[t]]).norm())).fold(0.0, f64::max);
            (name.to_string(), F17(err))
        })
        .collect();
    let chosen = candidates.iter().min_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).map(|c| c.0.clone()).unwrap_or_default();

    let zero = FourierModuleElement { m: 0, n: 2 };
    let expected = (h.iter().sum::<f64>() / 6.0).powi(2);
    let k0_num = combine(&patch.per_type_rational(0, 1), h).norm_sqr();
    Ok(SpectrumReport {
        radius: patch.radius,
        weights: h.iter().map(|&x| F17(x)).collect(),
        strongest: order.iter().map(|&i| (entries[i].m, entries[i].n)).collect(),
        max_rel_err_strongest: F17(max_rel),
        significant_peaks: significant.len(),
        max_rel_err_significant: F17(max_sig),
        tolerance: F17(TOLERANCE),
        pass: max_rel <= TOLERANCE && max_sig <= TOLERANCE,
        assignment: AssignmentCheck { candidates, chosen },
        k0: (F17(expected), F17(combine(&amplitudes_3adic(&zero), h).norm_sqr()), F17(k0_num)),
        entries,
    })
}

/// Reduced fractions `m/2ⁿ` in `[0, 1]` with `n ≤ n_max`, sorted.
pub fn dyadic_grid(n_max: u32) -> Vec<Rational> {
    let q = 1i64 << n_max;
    (0..=q).map(|m| Rational::new(m.into(), q.into())).collect()
}

/// Chair points of `T^level(C)` weighted by orientation.
pub fn chair_patch(level: u32, h: &[f64; 4]) -> Result<WeightedPointPatch> {
    let s = chair_recursion(level)?;
    let top = s.top();
    let pts: Vec<((i64, i64), f64)> = top.iter().map(|(p, k)| (p, h[k])).collect();
    Ok(WeightedPointPatch::lattice_2d_square(&pts, (top.side * top.side) as f64))
}

#[derive(Clone, Debug, Serialize)]
pub struct ChairSpectrumEntry {
    pub kx: String,
    pub ky: String,
    pub numeric_abs2: F17,
}

/// Numeric-only spectrum on the dyadic grid of `[0, 1]²`.
pub fn chair_spectrum(patch: &WeightedPointPatch, n_max: u32) -> Vec<ChairSpectrumEntry> {
    use num_traits::ToPrimitive;
    let grid = dyadic_grid(n_max);
    let ks: Vec<(&Rational, &Rational)> = grid.iter().flat_map(|x| grid.iter().map(move |y| (x, y))).collect();
    ks.par_iter()
        .map(|(x, y)| {
            let k = [x.to_f64().unwrap(), y.to_f64().unwrap()];
            ChairSpectrumEntry {
                kx: fmt_rational(x),
                ky: fmt_rational(y),
                numeric_abs2: F17(fourier_bohr_numeric(patch, &k).norm_sqr()),
            }
        })
        .collect()
}

impl ChairSpectrumEntry {
    pub fn csv(entries: &[ChairSpectrumEntry]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| crate::Error::Precondition(format!("csv: {e}"));
        w.write_record(["kx", "ky", "numeric_abs2"]).map_err(io)?;
        for e in entries {
            w.write_record([e.kx.clone(), e.ky.clone(), fmt17(e.numeric_abs2.0)]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Precondition(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThueMorseReport {
    pub radii: (i64, i64),
    /// Largest `|F(k)|²` on the dyadic grid at each radius, with its `k`.
    pub max_small: (String, F17),
    pub max_large: (String, F17),
    pub shrinking: bool,
}

/// Thue–Morse comb with weights `+1` (a) and `−1` (b): the largest
/// intensity on the dyadic grid shrinks as the radius grows.
pub fn thue_morse_control(r_small: i64, r_large: i64, n_max: u32) -> Result<ThueMorseReport> {
    use num_traits::ToPrimitive;
    let tp = TypedPatch1D::from_entry(&catalog::thuemorse(), r_large)?;
    let big = tp.weighted(&[1.0, -1.0])?;
    let small = TypedPatch1D {
        letters: tp.letters.clone(),
        per_type: tp.per_type.iter().map(|v| v.iter().copied().filter(|t| t.abs() <= r_small).collect()).collect(),
        radius: r_small,
    }
    .weighted(&[1.0, -1.0])?;
    let grid = dyadic_grid(n_max);
    let peak = |p: &WeightedPointPatch| {
        grid.par_iter()
            .map(|k| (fmt_rational(k), fourier_bohr_numeric(p, &[k.to_f64().unwrap()]).norm_sqr()))
            .collect::<Vec<_>>()
            .into_iter()
            .fold((String::new(), -1.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    };
    let (ks, vs) = peak(&small);
    let (kl, vl) = peak(&big);
    Ok(ThueMorseReport {
        radii: (r_small, r_large),
        max_small: (ks, F17(vs)),
        max_large: (kl, F17(vl)),
        shrinking: vl < vs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub radii: (i64, i64),
    /// `(k, |F_r(k)|, |F_3r(k)|)`.
    pub samples: Vec<(F17, F17, F17)>,
    pub decreasing: usize,
    pub all_decrease: bool,
}

/// Fourier–Bohr moduli at wave numbers outside the module, at radius `r` and `3r`.
pub fn off_module_decay(h: &[f64; 3], r: i64, ks: &[f64]) -> Result<DecayReport> {
    let big = TypedPatch1D::limitperiodic3(3 * r)?;
    let small = TypedPatch1D {
        letters: big.letters.clone(),
        per_type: big.per_type.iter().map(|v| v.iter().copied().filter(|t| t.abs() <= r).collect()).collect(),
        radius: r,
    };
    let (pb, ps) = (big.weighted(h)?, small.weighted(h)?);
    let samples: Vec<(F17, F17, F17)> = ks
        .par_iter()
        .map(|&k| (F17(k), F17(fourier_bohr_numeric(&ps, &[k]).norm()), F17(fourier_bohr_numeric(&pb, &[k]).norm())))
        .collect();
    let decreasing = samples.iter().filter(|s| s.2 .0 < s.1 .0).count();
    Ok(DecayReport { radii: (r, 3 * r), all_decrease: decreasing == samples.len(), decreasing, samples })
}

/// Sample wave numbers outside the Fourier module: odd multiples of `1/14`,
/// skipping `1/2`.
pub fn off_module_samples() -> Vec<f64> {
    [1, 3, 5, 9, 11, 13, 15, 17, 19, 23].iter().map(|&j| j as f64 / 14.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffraction::fourier_module;
    use crate::exactnum::rat;

    #[test]
    fn compare_small() {
        let tp = TypedPatch1D::limitperiodic3(729).unwrap();
        let els = fourier_module(3, &rat(0, 1), &rat(2, 1)).unwrap();
        let r = spectrum_compare(&tp, &[1.0, 1.0, 1.0], &els, 5).unwrap();
        assert!((r.k0.1 .0 - 0.25).abs() < 1e-15);
        assert!(r.max_rel_err_strongest.0 < 0.05, "{:?}", r.max_rel_err_strongest);
        assert!(r.assignment.chosen.starts_with("A_a, A_b, A_c = first, second, third"));
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("m,n,k,analytic_re,analytic_im_abs2,numeric_abs2,rel_err\n"));
        assert_eq!(csv.lines().count(), els.len() + 1);
    }

    #[test]
    fn thue_morse_shrinks() {
        let r = thue_morse_control(256, 4096, 6).unwrap();
        assert!(r.shrinking, "{r:?}");
    }

    #[test]
    fn decay() {
        let r = off_module_decay(&[1.0, 1.0, 1.0], 729, &off_module_samples()).unwrap();
        assert!(r.all_decrease, "{r:?}");
    }

    #[test]
    fn chair_numeric_only() {
        let p = chair_patch(4, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let s = chair_spectrum(&p, 2);
        assert_eq!(s.len(), 25);
        assert!(s.iter().all(|e| e.numeric_abs2.0 >= 0.0));
        let k0 = &s[0];
        assert_eq!((k0.kx.as_str(), k0.ky.as_str()), ("0", "0"));
    }
}

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A supported scaling-function family.
///
/// Daubechies families carry their vanishing-moment count `p` (2..=8); the
/// Haar family is the `p = 1` member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Haar,
    Daubechies(u8),
}

pub const MAX_VANISHING_MOMENTS: usize = 8;

impl Family {
    pub fn daubechies(p: usize) -> Result<Self> {
        match p {
            1 => Ok(Family::Haar),
            2..=MAX_VANISHING_MOMENTS => Ok(Family::Daubechies(p as u8)),
            _ => Err(Error::UnsupportedFamily(format!("db{p}"))),
        }
    }

    pub fn vanishing_moments(self) -> usize {
        match self {
            Family::Haar => 1,
            Family::Daubechies(p) => p as usize,
        }
    }

    /// Number of boundary-corrected functions at each edge of the interval.
    pub fn boundary_width(self) -> usize {
        match self {
            Family::Haar => 0,
            Family::Daubechies(p) => p as usize,
        }
    }

    /// Smallest number of functions `2^J` a reconstruction space may have.
    pub fn min_space_len(self) -> usize {
        match self {
            Family::Haar => 2,
            Family::Daubechies(p) => 2 * p as usize,
        }
    }

    /// Low-pass filter normalized to `sum h_k = 1`, indexed from
    /// [`Family::filter_offset`].
    pub fn filter(self) -> &'static [f64] {
        match self {
            Family::Haar => &HAAR,
            Family::Daubechies(2) => &DB2,
            Family::Daubechies(3) => &DB3,
            Family::Daubechies(4) => &DB4,
            Family::Daubechies(5) => &DB5,
            Family::Daubechies(6) => &DB6,
            Family::Daubechies(7) => &DB7,
            Family::Daubechies(8) => &DB8,
            Family::Daubechies(p) => unreachable!("db{p} cannot be constructed"),
        }
    }

    /// Index of the first filter tap; the scaling function lives on
    /// `[offset, offset + taps - 1] = [1 - p, p]`.
    pub fn filter_offset(self) -> i64 {
        1 - self.vanishing_moments() as i64
    }

    /// Tag byte used by the coefficient file format.
    pub fn tag(self) -> u8 {
        match self {
            Family::Haar => 0,
            Family::Daubechies(p) => p,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Family::Haar),
            t => Family::daubechies(t as usize),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Haar => f.write_str("haar"),
            Family::Daubechies(p) => write!(f, "db{p}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "haar" || lower == "db1" {
            return Ok(Family::Haar);
        }
        lower
            .strip_prefix("db")
            .and_then(|rest| rest.parse::<usize>().ok())
            .filter(|p| (2..=MAX_VANISHING_MOMENTS).contains(p))
            .map(|p| Family::Daubechies(p as u8))
            .ok_or_else(|| Error::UnsupportedFamily(s.to_string()))
    }
}

/// Filter taps of the named family (`haar`, `db2` .. `db8`), summing to one.
pub fn filter_coefficients(name: &str) -> Result<Vec<f64>> {
    Ok(name.parse::<Family>()?.filter().to_vec())
}

// Extremal-phase Daubechies filters, rescaled from the usual sum-sqrt(2)
// normalization to sum one.

const HAAR: [f64; 2] = [0.5, 0.5];

const DB2: [f64; 4] = [
    3.41506350946109649e-01,
    5.91506350946109705e-01,
    1.58493649053890351e-01,
    -9.15063509461096491e-02,
];

const DB3: [f64; 6] = [
    2.35233603892081838e-01,
    5.70558457915721795e-01,
    3.25182500263116236e-01,
    -9.54672077841636768e-02,
    -6.04161041551981026e-02,
    2.49087498684418644e-02,
];

const DB4: [f64; 8] = [
    1.62901714025649180e-01,
    5.05472857545914422e-01,
    4.46100069123379794e-01,
    -1.97875131178223210e-02,
    -1.32253583684519865e-01,
    2.18081502370886249e-02,
    2.32518005354908804e-02,
    -7.49349466518073586e-03,
];

const DB5: [f64; 10] = [
    1.13209491291779193e-01,
    4.26971771352514129e-01,
    5.12163472129598563e-01,
    9.78834806739046770e-02,
    -1.71328357691467426e-01,
    -2.28005659417736505e-02,
    5.48513293210668301e-02,
    -4.41340005417912695e-03,
    -8.89593505097709472e-03,
    2.35871396953393590e-03,
];

const DB6: [f64; 12] = [
    7.88712160014507085e-02,
    3.49751907037617826e-01,
    5.31131879940868967e-01,
    2.22915661465017761e-01,
    -1.59993299446061388e-01,
    -9.17590320301475831e-02,
    6.89440464873722902e-02,
    1.94616048541646630e-02,
    -2.23318741650945334e-02,
    3.91625576148577894e-04,
    3.37803118146393815e-03,
    -7.61766902801253227e-04,
];

const DB7: [f64; 14] = [
    5.50497153728118499e-02,
    2.80395641812762553e-01,
    5.15574245818098631e-01,
    3.32186241105539681e-01,
    -1.01756911231346239e-01,
    -1.58417505640332829e-01,
    5.04232325046940835e-02,
    5.70017225798715790e-02,
    -2.68912262948454370e-02,
    -1.17199707821032898e-02,
    8.87489618968076432e-03,
    3.03757497701069362e-04,
    -1.27395235909368650e-03,
    2.50113426561245306e-04,
];

const DB8: [f64; 16] = [
    3.84778110540762372e-02,
    2.21233623576124916e-01,
    4.77743075213873658e-01,
    4.13908266211195919e-01,
    -1.11928676668802182e-02,
    -2.00829316390489038e-01,
    3.34097046220118820e-04,
    9.10381784236577590e-02,
    -1.22819505228484102e-02,
    -3.11751033251394319e-02,
    9.88607964835075924e-03,
    6.18442240981592270e-03,
    -3.44385962844180908e-03,
    -2.77002274479389347e-04,
    4.77614855649626142e-04,
    -8.30686306866126878e-05,
];

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> Vec<Family> {
        (1..=8).map(|p| Family::daubechies(p).unwrap()).collect()
    }

    #[test]
    fn filters_sum_to_one() {
        for fam in all() {
            let s: f64 = fam.filter().iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "{fam}: {s}");
            assert_eq!(fam.filter().len(), 2 * fam.vanishing_moments());
        }
    }

    #[test]
    fn filters_are_orthonormal_and_have_vanishing_moments() {
        for fam in all() {
            let h = fam.filter();
            let p = fam.vanishing_moments();
            // sum_k h_k h_{k+2l} = delta_l / 2 in the sum-one normalization
            for l in 0..p {
                let s: f64 = (0..h.len() - 2 * l).map(|k| h[k] * h[k + 2 * l]).sum();
                let want = if l == 0 { 0.5 } else { 0.0 };
                assert!((s - want).abs() < 1e-13, "{fam} shift {l}: {s}");
            }
            for moment in 0..p {
                let s: f64 = h
                    .iter()
                    .enumerate()
                    .map(|(k, hk)| {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        sign * (k as f64).powi(moment as i32) * hk
                    })
                    .sum();
                assert!(s.abs() < 1e-9, "{fam} moment {moment}: {s}");
            }
        }
    }

    #[test]
    fn db2_closed_form() {
        let r3 = 3f64.sqrt();
        let want = [(1.0 + r3) / 8.0, (3.0 + r3) / 8.0, (3.0 - r3) / 8.0, (1.0 - r3) / 8.0];
        let got = filter_coefficients("db2").unwrap();
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn haar_and_unsupported() {
        assert_eq!(filter_coefficients("haar").unwrap(), vec![0.5, 0.5]);
        assert!(matches!(filter_coefficients("db9"), Err(Error::UnsupportedFamily(_))));
        assert!(matches!(filter_coefficients("sym4"), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn tags_round_trip() {
        for fam in all() {
            assert_eq!(Family::from_tag(fam.tag()).unwrap(), fam);
            assert_eq!(fam.to_string().parse::<Family>().unwrap(), fam);
        }
    }
}

use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/tw2_table.txt");

/// Tabulated unitary Tracy–Widom CDF `F₂` with monotone cubic (PCHIP)
/// interpolation between nodes and constant extension beyond the ends.
#[derive(Clone, Debug)]
pub struct Tw2Table {
    s: Vec<f64>,
    f: Vec<f64>,
    slope: Vec<f64>,
    header: Vec<String>,
}

impl Tw2Table {
    /// The table shipped with the crate.
    pub fn bundled() -> &'static Tw2Table {
        static TABLE: OnceLock<Tw2Table> = OnceLock::new();
        TABLE.get_or_init(|| Tw2Table::parse(BUNDLED).expect("bundled TW2 table is well formed"))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::TableFormat(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses `s F₂(s)` rows; lines starting with `#` are header comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Vec::new();
        let mut f = Vec::new();
        let mut header = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                header.push(h.trim().to_string());
                continue;
            }
            let mut cols = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| Error::TableFormat(format!("line {}: expected two columns", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::TableFormat(format!("line {}: {e}", lineno + 1)))
            };
            let (x, y) = (parse(cols.next())?, parse(cols.next())?);
            if cols.next().is_some() {
                return Err(Error::TableFormat(format!("line {}: more than two columns", lineno + 1)));
            }
            if !x.is_finite() || !(0.0..=1.0).contains(&y) {
                return Err(Error::TableFormat(format!("line {}: value out of range", lineno + 1)));
            }
            s.push(x);
            f.push(y);
        }
        if s.len() < 2 {
            return Err(Error::TableFormat("need at least two rows".into()));
        }
        for k in 1..s.len() {
            if !(s[k] > s[k - 1]) {
                return Err(Error::TableFormat(format!("abscissae not increasing at row {}", k + 1)));
            }
            if !(f[k] > f[k - 1]) {
                return Err(Error::TableFormat(format!("CDF not strictly increasing at row {}", k + 1)));
            }
        }
        let slope = pchip_slopes(&s, &f);
        Ok(Self { s, f, slope, header })
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s[0], self.s[self.s.len() - 1])
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.s.iter().copied().zip(self.f.iter().copied())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x <= self.s[0] {
            return self.f[0];
        }
        if x >= self.s[n - 1] {
            return self.f[n - 1];
        }
        let k = self.s.partition_point(|&v| v <= x) - 1;
        let h = self.s[k + 1] - self.s[k];
        let u = (x - self.s[k]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
            u * (1.0 - u) * (1.0 - u),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        h00 * self.f[k] + h10 * h * self.slope[k] + h01 * self.f[k + 1] + h11 * h * self.slope[k + 1]
    }

    /// Smallest `s` with `F₂(s) ≥ q` on the interpolant, by bisection.
    pub fn quantile(&self, q: f64) -> f64 {
        let (lo_s, hi_s) = self.range();
        if q <= self.f[0] {
            return lo_s;
        }
        if q >= self.f[self.f.len() - 1] {
            return hi_s;
        }
        let k = self.f.partition_point(|&v| v < q);
        let (mut lo, mut hi) = (self.s[k - 1], self.s[k]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Mean and standard deviation of the tabulated distribution.
    pub fn moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for k in 0..self.s.len() - 1 {
            let mid = 0.5 * (self.s[k] + self.s[k + 1]);
            let w = self.f[k + 1] - self.f[k];
            m1 += mid * w;
            m2 += mid * mid * w;
        }
        let mass = self.f[self.f.len() - 1] - self.f[0];
        let mean = m1 / mass;
        (mean, (m2 / mass - mean * mean).sqrt())
    }
}

/// Fritsch–Carlson slopes: harmonic-mean interior slopes, zero at local extrema.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let v = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if v.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && v.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            v
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// `F₂(s)` from the bundled table.
pub fn tw2_cdf(s: f64) -> f64 {
    Tw2Table::bundled().cdf(s)
}

/// `F₂⁻¹(q)` from the bundled table.
pub fn tw2_quantile(q: f64) -> f64 {
    Tw2Table::bundled().quantile(q)
}

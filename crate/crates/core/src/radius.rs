//! Finite radius grids standing in for suprema over `r > 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lattice::Lattice;
use crate::scalar::Real;
use crate::{Error, Result};

/// How a radius grid was generated. Text forms:
/// `geometric:r_min:r_max:count`, `list:r1,r2,...`, `all-aligned`.
#[derive(Clone, Debug, PartialEq)]
pub enum RadiusSpec {
    Geometric { min: f64, max: f64, count: usize },
    List(Vec<f64>),
    /// Every multiple of the lattice spacing up to the lattice diameter.
    AllAligned,
}

impl RadiusSpec {
    /// Default norm grid `geometric:4h:L:25`.
    pub fn default_for<T: Real>(lattice: &Lattice<T>) -> Self {
        let h = lattice.spacing().as_f64();
        RadiusSpec::Geometric { min: 4.0 * h, max: lattice.half_width().as_f64(), count: 25 }
    }

    /// Resolves the grid; `all-aligned` needs the lattice.
    pub fn resolve<T: Real>(&self, lattice: Option<&Lattice<T>>) -> Result<RadiusGrid<T>> {
        match self {
            RadiusSpec::Geometric { min, max, count } => RadiusGrid::geometric(T::lit(*min), T::lit(*max), *count),
            RadiusSpec::List(r) => RadiusGrid::from_list(r.iter().map(|x| T::lit(*x)).collect()),
            RadiusSpec::AllAligned => {
                let l = lattice.ok_or_else(|| Error::InvalidRadii("all-aligned needs a lattice".into()))?;
                RadiusGrid::all_aligned(l)
            }
        }
    }
}

impl fmt::Display for RadiusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusSpec::Geometric { min, max, count } => write!(f, "geometric:{min}:{max}:{count}"),
            RadiusSpec::List(r) => {
                let items: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                write!(f, "list:{}", items.join(","))
            }
            RadiusSpec::AllAligned => write!(f, "all-aligned"),
        }
    }
}

impl FromStr for RadiusSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidRadii(format!("{s:?}: {why}"));
        let s = s.trim();
        if s == "all-aligned" {
            return Ok(RadiusSpec::AllAligned);
        }
        if let Some(rest) = s.strip_prefix("geometric:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected geometric:r_min:r_max:count"));
            }
            let min: f64 = parts[0].parse().map_err(|_| bad("r_min is not a number"))?;
            let max: f64 = parts[1].parse().map_err(|_| bad("r_max is not a number"))?;
            let count: usize = parts[2].parse().map_err(|_| bad("count is not an integer"))?;
            return Ok(RadiusSpec::Geometric { min, max, count });
        }
        if let Some(rest) = s.strip_prefix("list:") {
            let r: std::result::Result<Vec<f64>, _> = rest.split(',').map(|x| x.trim().parse::<f64>()).collect();
            return Ok(RadiusSpec::List(r.map_err(|_| bad("list entries must be numbers"))?));
        }
        Err(bad("unknown radius grid kind"))
    }
}

impl Serialize for RadiusSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RadiusSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Strictly increasing positive radii.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusGrid<T> {
    radii: Vec<T>,
    spec: RadiusSpec,
}

impl<T: Real> RadiusGrid<T> {
    /// `count` radii `r_min · (r_max/r_min)^{i/(count−1)}`; the endpoints are exact.
    pub fn geometric(min: T, max: T, count: usize) -> Result<Self> {
        if !(min > T::zero() && max.is_finite() && max >= min) {
            return Err(Error::InvalidRadii(format!("need 0 < r_min ≤ r_max, got {min}, {max}")));
        }
        if count == 0 || (count == 1 && min != max) {
            return Err(Error::InvalidRadii(format!("count {count} too small")));
        }
        let radii: Vec<T> = if count == 1 {
            vec![min]
        } else {
            let log_span = (max / min).ln();
            (0..count)
                .map(|i| {
                    if i == 0 {
                        min
                    } else if i + 1 == count {
                        max
                    } else {
                        min * (log_span * T::from_count(i) / T::from_count(count - 1)).exp()
                    }
                })
                .collect()
        };
        let mut grid = Self::from_list(radii)?;
        grid.spec = RadiusSpec::Geometric { min: min.as_f64(), max: max.as_f64(), count };
        Ok(grid)
    }

    /// Sorted, deduplicated list of positive radii.
    pub fn from_list(mut radii: Vec<T>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidRadii("empty radius grid".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > T::zero())) {
            return Err(Error::InvalidRadii("radii must be finite and positive".into()));
        }
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup();
        let spec = RadiusSpec::List(radii.iter().map(|r| r.as_f64()).collect());
        Ok(Self { radii, spec })
    }

    /// `h, 2h, …` up to the lattice diameter.
    pub fn all_aligned(lattice: &Lattice<T>) -> Result<Self> {
        let h = lattice.spacing();
        let k = (lattice.diameter() / h).ceil().to_usize().unwrap_or(1).max(1);
        let mut grid = Self::from_list((1..=k).map(|i| h * T::from_count(i)).collect())?;
        grid.spec = RadiusSpec::AllAligned;
        Ok(grid)
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn spec(&self) -> &RadiusSpec {
        &self.spec
    }

    pub fn max(&self) -> T {
        *self.radii.last().unwrap()
    }

    pub fn min(&self) -> T {
        self.radii[0]
    }

    /// Geometric grid with twice the density (`2·count − 1` points, same
    /// endpoints, old points kept). Lists are densified by inserting
    /// geometric midpoints.
    pub fn doubled(&self) -> Result<Self> {
        match self.spec {
            RadiusSpec::Geometric { count, .. } if count > 1 => {
                Self::geometric(self.min(), self.max(), 2 * count - 1)
            }
            _ => {
                let mut r = self.radii.clone();
                r.extend(self.radii.windows(2).map(|w| (w[0] * w[1]).sqrt()));
                Self::from_list(r)
            }
        }
    }

    pub fn is_aligned(&self, lattice: &Lattice<T>) -> bool {
        self.radii.iter().all(|r| lattice.aligned_cells(*r).is_some())
    }

    /// Rounds each radius to the nearest positive multiple of the spacing.
    pub fn aligned_to(&self, lattice: &Lattice<T>) -> Result<Self> {
        let h = lattice.spacing();
        let r = self.radii.iter().map(|r| h * (*r / h).round().max(T::one())).collect();
        Self::from_list(r)
    }
}

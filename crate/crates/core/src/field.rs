//! Realized weight fields.
//!
//! A field holds one i.i.d. lattice of weights on the rectangle
//! `0..=width x 0..=height`, in row-major order (row = constant y). Sampled
//! fields are keyed per site by `(seed, i, j)`, so regenerating with the same
//! key reproduces identical bits and any sub-rectangle of a larger field
//! carries the same weights as a field sampled at the smaller extents.

use std::io::{Read, Write};

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::real::Real;
use crate::rng::SiteRng;

const MAGIC: &[u8; 4] = b"LPPF";
const FORMAT_VERSION: u32 = 1;

/// Where a field's weights came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance<T: Real> {
    Sampled {
        seed: u64,
        distribution: WeightDistribution<T>,
    },
    Explicit,
}

#[derive(Debug, Clone)]
pub struct WeightField<T: Real> {
    width: u32,
    height: u32,
    weights: Vec<T>,
    provenance: Provenance<T>,
}

impl<T: Real> WeightField<T> {
    /// Sample every site of the rectangle from its own counter-based stream.
    pub fn sample(
        dist: WeightDistribution<T>,
        width: u32,
        height: u32,
        seed: u64,
    ) -> Result<Self> {
        let sites = (width as usize + 1) * (height as usize + 1);
        let mut weights = Vec::new();
        weights.try_reserve_exact(sites).map_err(|_| Error::Allocation {
            bytes: sites * std::mem::size_of::<T>(),
        })?;
        for j in 0..=height {
            for i in 0..=width {
                let mut rng = SiteRng::for_site(seed, i, j);
                weights.push(dist.sample(&mut rng));
            }
        }
        Ok(WeightField {
            width,
            height,
            weights,
            provenance: Provenance::Sampled {
                seed,
                distribution: dist,
            },
        })
    }

    /// Build a field from explicit weights (row-major, `(width+1)*(height+1)`
    /// entries). Used by tests and the enumeration oracle.
    pub fn from_weights(width: u32, height: u32, weights: Vec<T>) -> Result<Self> {
        let expect = (width as usize + 1) * (height as usize + 1);
        if weights.len() != expect {
            return Err(Error::FieldFormat {
                reason: format!("expected {expect} weights, got {}", weights.len()),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero())) {
            return Err(Error::InvalidParameter {
                what: "weight",
                value: w.to_f64_lossy(),
                requirement: ">= 0",
            });
        }
        Ok(WeightField {
            width,
            height,
            weights,
            provenance: Provenance::Explicit,
        })
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn provenance(&self) -> Provenance<T> {
        self.provenance
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        p.x <= self.width && p.y <= self.height
    }

    #[inline]
    pub fn weight(&self, i: u32, j: u32) -> T {
        debug_assert!(i <= self.width && j <= self.height);
        self.weights[j as usize * (self.width as usize + 1) + i as usize]
    }

    /// Binary dump: magic, version, extents, seed, distribution tag and
    /// parameters, then row-major little-endian f64 weights.
    pub fn dump<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&self.width.to_le_bytes())?;
        out.write_all(&self.height.to_le_bytes())?;
        let (seed, tag, params): (u64, u32, Vec<f64>) = match self.provenance {
            Provenance::Explicit => (0, 0, vec![]),
            Provenance::Sampled { seed, distribution } => match distribution {
                WeightDistribution::Exponential { rate } => {
                    (seed, 1, vec![rate.to_f64_lossy()])
                }
                WeightDistribution::Gamma { shape, rate } => {
                    (seed, 2, vec![shape.to_f64_lossy(), rate.to_f64_lossy()])
                }
            },
        };
        out.write_all(&seed.to_le_bytes())?;
        out.write_all(&tag.to_le_bytes())?;
        for p in params {
            out.write_all(&p.to_le_bytes())?;
        }
        for w in &self.weights {
            out.write_all(&w.to_f64_lossy().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::FieldFormat {
                reason: "bad magic".into(),
            });
        }
        let version = read_u32(&mut input)?;
        if version != FORMAT_VERSION {
            return Err(Error::FieldFormat {
                reason: format!("unsupported version {version}"),
            });
        }
        let width = read_u32(&mut input)?;
        let height = read_u32(&mut input)?;
        let seed = read_u64(&mut input)?;
        let tag = read_u32(&mut input)?;
        let provenance = match tag {
            0 => Provenance::Explicit,
            1 => Provenance::Sampled {
                seed,
                distribution: WeightDistribution::exponential(T::from_f64_lossy(read_f64(
                    &mut input,
                )?))?,
            },
            2 => {
                let shape = T::from_f64_lossy(read_f64(&mut input)?);
                let rate = T::from_f64_lossy(read_f64(&mut input)?);
                Provenance::Sampled {
                    seed,
                    distribution: WeightDistribution::gamma(shape, rate)?,
                }
            }
            other => {
                return Err(Error::FieldFormat {
                    reason: format!("unknown distribution tag {other}"),
                })
            }
        };
        let sites = (width as usize + 1) * (height as usize + 1);
        let mut weights = Vec::new();
        weights.try_reserve_exact(sites).map_err(|_| Error::Allocation {
            bytes: sites * std::mem::size_of::<T>(),
        })?;
        for _ in 0..sites {
            weights.push(T::from_f64_lossy(read_f64(&mut input)?));
        }
        if weights.iter().any(|w| !(*w >= T::zero())) {
            return Err(Error::FieldFormat {
                reason: "negative weight in dump".into(),
            });
        }
        Ok(WeightField {
            width,
            height,
            weights,
            provenance,
        })
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

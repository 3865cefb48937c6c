//! Slater-determinant bases and many-body vectors.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::TorusConfig;

/// Jordan-Wigner sign: parity of the occupied orbitals below `orbital`.
fn jw_sign(mask: u64, orbital: usize) -> f64 {
    let below = mask & ((1u64 << orbital) - 1);
    if below.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c_orbital |mask>`: `None` if the orbital is empty.
pub fn annihilate(mask: u64, orbital: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << orbital;
    if mask & bit == 0 {
        None
    } else {
        Some((mask & !bit, jw_sign(mask, orbital)))
    }
}

/// `c^dag_orbital |mask>`: `None` if the orbital is filled.
pub fn create(mask: u64, orbital: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << orbital;
    if mask & bit != 0 {
        None
    } else {
        Some((mask | bit, jw_sign(mask, orbital)))
    }
}

fn binomial(m: u64, n: u64) -> u128 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for k in 0..n {
        acc = acc * (m - k) as u128 / (k + 1) as u128;
    }
    acc
}

/// All `N`-particle bitmasks over `M` orbitals in ascending numeric
/// (bitmask-lexicographic) order.
#[derive(Debug)]
pub struct SlaterBasis {
    pub orbital_count: usize,
    pub particle_count: usize,
    pub masks: Vec<u64>,
}

impl SlaterBasis {
    pub fn enumerate(orbital_count: usize, particle_count: usize, budget: usize) -> Result<Self> {
        if orbital_count > 63 {
            return Err(Error::Precondition(format!(
                "orbital count {orbital_count} exceeds the 63-bit mask limit"
            )));
        }
        if particle_count == 0 || particle_count > orbital_count {
            return Err(Error::Precondition(format!(
                "cannot place {particle_count} fermions in {orbital_count} orbitals"
            )));
        }
        let dim = binomial(orbital_count as u64, particle_count as u64);
        if dim > budget as u128 {
            return Err(Error::Budget(format!(
                "dimension C({orbital_count}, {particle_count}) = {dim} exceeds \
                 the budget {budget}"
            )));
        }
        let mut masks = Vec::with_capacity(dim as usize);
        // Gosper's hack walks the masks in increasing order.
        let mut state: u64 = (1u64 << particle_count) - 1;
        let limit: u64 = 1u64 << orbital_count;
        while state < limit {
            masks.push(state);
            let c = state & state.wrapping_neg();
            let r = state + c;
            state = (((r ^ state) >> 2) / c) | r;
            if c == 0 {
                break;
            }
        }
        debug_assert_eq!(masks.len() as u128, dim);
        Ok(Self { orbital_count, particle_count, masks })
    }

    pub fn dimension(&self) -> usize {
        self.masks.len()
    }

    pub fn mask(&self, index: usize) -> u64 {
        self.masks[index]
    }

    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.masks.binary_search(&mask).ok()
    }

    /// The lowest-filling determinant: orbitals `0..N`.
    pub fn fermi_sea(&self) -> u64 {
        (1u64 << self.particle_count) - 1
    }
}

/// A many-body wave function over a Slater basis.
#[derive(Clone, Debug)]
pub struct FockVector {
    pub basis: Arc<SlaterBasis>,
    pub coefficients: Vec<Complex64>,
}

impl FockVector {
    pub fn zeros(basis: Arc<SlaterBasis>) -> Self {
        let dim = basis.dimension();
        Self { basis, coefficients: vec![Complex64::default(); dim] }
    }

    /// The unit vector on a single determinant.
    pub fn determinant(basis: Arc<SlaterBasis>, mask: u64) -> Result<Self> {
        let index = basis
            .index_of(mask)
            .ok_or_else(|| Error::Precondition(format!("mask {mask:b} not in the basis")))?;
        let mut v = Self::zeros(basis);
        v.coefficients[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for c in &mut self.coefficients {
                *c /= n;
            }
        }
    }

    /// Persists the vector in the documented binary layout:
    /// magic `LTFV`, version u32, orbital count u64, particle count u64,
    /// dimension u64, orbital-order hash u64, then the coefficients as
    /// little-endian IEEE-754 doubles (re, im) in basis order.
    pub fn write_binary(&self, mut out: impl Write, order_hash: u64) -> std::io::Result<()> {
        out.write_all(b"LTFV")?;
        out.write_all(&1u32.to_le_bytes())?;
        out.write_all(&(self.basis.orbital_count as u64).to_le_bytes())?;
        out.write_all(&(self.basis.particle_count as u64).to_le_bytes())?;
        out.write_all(&(self.basis.dimension() as u64).to_le_bytes())?;
        out.write_all(&order_hash.to_le_bytes())?;
        for c in &self.coefficients {
            out.write_all(&c.re.to_le_bytes())?;
            out.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a vector written by [`FockVector::write_binary`]; the caller
    /// checks the returned orbital-order hash against its configuration.
    pub fn read_binary(mut input: impl Read, budget: usize) -> Result<(Self, u64)> {
        let io = |e: std::io::Error| Error::Validation(format!("fock vector read: {e}"));
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic).map_err(io)?;
        if &magic != b"LTFV" {
            return Err(Error::Validation("bad magic in fock vector file".into()));
        }
        let mut u32buf = [0u8; 4];
        input.read_exact(&mut u32buf).map_err(io)?;
        if u32::from_le_bytes(u32buf) != 1 {
            return Err(Error::Validation("unsupported fock vector version".into()));
        }
        let mut u64buf = [0u8; 8];
        let mut next_u64 = |input: &mut dyn Read| -> Result<u64> {
            input.read_exact(&mut u64buf).map_err(io)?;
            Ok(u64::from_le_bytes(u64buf))
        };
        let orbital_count = next_u64(&mut input)? as usize;
        let particle_count = next_u64(&mut input)? as usize;
        let dimension = next_u64(&mut input)? as usize;
        let order_hash = next_u64(&mut input)?;
        let basis = SlaterBasis::enumerate(orbital_count, particle_count, budget)?;
        if basis.dimension() != dimension {
            return Err(Error::Validation(format!(
                "dimension {dimension} does not match C({orbital_count}, {particle_count})"
            )));
        }
        let mut coefficients = Vec::with_capacity(dimension);
        let mut f64buf = [0u8; 8];
        for _ in 0..dimension {
            input.read_exact(&mut f64buf).map_err(io)?;
            let re = f64::from_le_bytes(f64buf);
            input.read_exact(&mut f64buf).map_err(io)?;
            let im = f64::from_le_bytes(f64buf);
            coefficients.push(Complex64::new(re, im));
        }
        Ok((Self { basis: Arc::new(basis), coefficients }, order_hash))
    }
}

/// FNV-1a hash of the canonical orbital order and the configuration
/// scalars; written into persisted vectors so stale files are detected.
pub fn orbital_order_hash(cfg: &TorusConfig, n_max: usize) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(b"landau-orbitals/n*d+l");
    eat(&(cfg.degeneracy() as u64).to_le_bytes());
    eat(&(n_max as u64).to_le_bytes());
    eat(&cfg.length().to_le_bytes());
    eat(&cfg.hbar().to_le_bytes());
    h
}

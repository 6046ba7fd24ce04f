//! Spatial side of the problem on `T^N = (R / 2 pi Z)^N`, `N <= 3`.

mod field;
mod symbol;

pub use field::{analyze, synthesize, SpectralField, TorusGrid};
pub use symbol::{EllipticSymbol, SymbolTerm};

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("torus dimension must be 1..={MAX_DIM}, got {dim}")))
    }
}

/// `[-cutoff, cutoff]^N` in row-major order.
pub(crate) fn lattice(dim: usize, cutoff: usize) -> impl Iterator<Item = Vec<i64>> {
    let side = 2 * cutoff + 1;
    let c = cutoff as i64;
    (0..side.pow(dim as u32)).map(move |mut flat| {
        let mut n = vec![0i64; dim];
        for slot in n.iter_mut().rev() {
            *slot = (flat % side) as i64 - c;
            flat /= side;
        }
        n
    })
}

/// A lattice frequency with its eigenvalue `A(n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMode {
    pub n: Vec<i64>,
    pub lambda: f64,
}

/// Modes of `[-cutoff, cutoff]^N` ordered by `|n|^2`, then lexicographically.
pub fn mode_list(symbol: &EllipticSymbol, cutoff: usize) -> Result<Vec<SpectralMode>> {
    let mut ns: Vec<Vec<i64>> = lattice(symbol.dim(), cutoff).collect();
    ns.sort_by_key(|n| (n.iter().map(|k| k * k).sum::<i64>(), n.clone()));
    ns.into_iter()
        .map(|n| {
            let lambda = symbol.eval(&n)?;
            Ok(SpectralMode { n, lambda })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_list() {
        let modes = mode_list(&EllipticSymbol::laplacian(1).unwrap(), 2).unwrap();
        let got: Vec<(i64, f64)> = modes.iter().map(|m| (m.n[0], m.lambda)).collect();
        assert_eq!(got, vec![(0, 0.0), (-1, 1.0), (1, 1.0), (-2, 4.0), (2, 4.0)]);
    }

    #[test]
    fn two_dimensional_list() {
        let modes = mode_list(&EllipticSymbol::laplacian(2).unwrap(), 1).unwrap();
        assert_eq!(modes.len(), 9);
        assert_eq!(modes[0].n, vec![0, 0]);
        assert_eq!(modes[1].n, vec![-1, 0]);
        assert!(modes.windows(2).all(|w| w[0].lambda <= w[1].lambda));
    }

    #[test]
    fn lattice_order_matches_field_storage() {
        let n: Vec<Vec<i64>> = lattice(2, 1).collect();
        assert_eq!(n[0], vec![-1, -1]);
        assert_eq!(n[1], vec![-1, 0]);
        assert_eq!(n[8], vec![1, 1]);
        assert!(check_dim(0).is_err() && check_dim(4).is_err());
    }
}

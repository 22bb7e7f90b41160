use alloc::vec;
use alloc::vec::Vec;
// Float methods for no_std builds; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaterialName {
    FusedSilica,
    Silicon,
    Custom,
}

/// Bulk refractive index model
///
/// `n^2 = constant + sum_i B_i l^2 / (l^2 - C_i) + inverse_square / l^2`,
/// with `l` in um and `C_i` in um^2. A classical Sellmeier fit has
/// `constant = 1` and `inverse_square = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    pub name: MaterialName,
    pub constant: f64,
    pub sellmeier_coefficients: Vec<(f64, f64)>,
    pub inverse_square: f64,
    pub window_um: (f64, f64),
}

impl MaterialModel {
    /// Malitson (1965) fused silica, 0.21-3.71 um.
    pub fn fused_silica() -> Self {
        MaterialModel {
            name: MaterialName::FusedSilica,
            constant: 1.0,
            sellmeier_coefficients: vec![
                (0.696_166_3, 0.068_404_3 * 0.068_404_3),
                (0.407_942_6, 0.116_241_4 * 0.116_241_4),
                (0.897_479_4, 9.896_161 * 9.896_161),
            ],
            inverse_square: 0.0,
            window_um: (0.21, 3.71),
        }
    }

    /// Li (1980) crystalline silicon at 293 K, 1.2-14 um:
    /// `n^2 = 11.67316 + 1/l^2 + 0.004482633/(l^2 - 1.108205^2)`.
    ///
    /// The last term is `B/(l^2 - C)`, rewritten as `(B/C) l^2/(l^2 - C) - B/C`.
    pub fn silicon() -> Self {
        let c = 1.108_205 * 1.108_205;
        let b = 0.004_482_633 / c;
        MaterialModel {
            name: MaterialName::Silicon,
            constant: 11.673_16 - b,
            sellmeier_coefficients: vec![(b, c)],
            inverse_square: 1.0,
            window_um: (1.2, 14.0),
        }
    }

    /// Classical Sellmeier model from `(B, C)` pairs.
    pub fn custom(sellmeier_coefficients: Vec<(f64, f64)>, window_um: (f64, f64)) -> Result<Self> {
        let m = MaterialModel {
            name: MaterialName::Custom,
            constant: 1.0,
            sellmeier_coefficients,
            inverse_square: 0.0,
            window_um,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.window_um;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid("material validity window must satisfy 0 < min < max"));
        }
        for &(b, c) in &self.sellmeier_coefficients {
            if !b.is_finite() || !c.is_finite() || c < 0.0 {
                return Err(Error::invalid("Sellmeier terms need finite B and C >= 0"));
            }
            if c > 0.0 && c.sqrt() >= lo && c.sqrt() <= hi && b != 0.0 {
                return Err(Error::invalid("Sellmeier resonance lies inside the validity window"));
            }
        }
        Ok(())
    }

    pub fn index(&self, wavelength_um: f64) -> Result<f64> {
        material_index(self, wavelength_um)
    }
}

pub fn material_index(model: &MaterialModel, wavelength_um: f64) -> Result<f64> {
    let (lo, hi) = model.window_um;
    if !(wavelength_um >= lo && wavelength_um <= hi) {
        return Err(Error::OutOfDomain {
            quantity: "wavelength_um",
            value: wavelength_um,
            min: lo,
            max: hi,
        });
    }
    let l2 = wavelength_um * wavelength_um;
    let mut n2 = model.constant + model.inverse_square / l2;
    for &(b, c) in &model.sellmeier_coefficients {
        n2 += b * l2 / (l2 - c);
    }
    if !(n2 >= 1.0) || !n2.is_finite() {
        return Err(Error::numerical("material model gives an index below 1"));
    }
    Ok(n2.sqrt())
}

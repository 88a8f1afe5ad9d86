//! Lowest-digit extraction polynomials modulo prime powers.
//!
//! The arithmetic is generic over the integer word holding residues (see
//! [`Word`]); the aliases below fix it to `u64` for everyday use and to
//! [`BigUint`] when `p^e` outgrows 64 bits.

pub mod construct;
pub mod error;
pub mod evalcost;
pub mod oracle;
pub mod poly;
pub mod ring;
pub mod scalar;

pub use num_bigint::BigUint;

pub use error::{Error, Result};
pub use poly::{Basis, NewtonPoly, Poly, PolyRecord};
pub use ring::{PrimePowerModulus, Residue};
pub use scalar::Word;

pub type Modulus = PrimePowerModulus<u64>;
pub type Residue64 = Residue<u64>;
pub type Poly64 = Poly<u64>;
pub type NewtonPoly64 = NewtonPoly<u64>;

pub type BigModulus = PrimePowerModulus<BigUint>;
pub type BigResidue = Residue<BigUint>;
pub type BigPoly = Poly<BigUint>;
pub type BigNewtonPoly = NewtonPoly<BigUint>;

//! Arithmetic over small finite fields GF(q).
//!
//! Every field element is stored as a plain `u8` residue in `[0, q)`; the
//! [`Field`] handle carries the order and supplies the operations. Supported
//! orders are primes up to 251 and binary extensions 4, 8, ..., 256. The
//! binary field (`q = 2`) is the workhorse: all the window-code matrices live
//! there, and its addition is a plain XOR. GF(256) backs coded transmissions
//! whose coefficients do not fit the binary field.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported field order {0}: expected a prime <= 251 or a power of two <= 256")]
    UnsupportedOrder(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u16),
    #[error("value {value} is not an element of GF({order})")]
    NotAnElement { value: u8, order: u16 },
}

/// Reduction polynomials for GF(2^k), k = 2..=8, with the x^k term included.
const BINARY_POLYS: [u16; 7] = [
    0b111,         // x^2 + x + 1
    0b1011,        // x^3 + x + 1
    0b1_0011,      // x^4 + x + 1
    0b10_0101,     // x^5 + x^2 + 1
    0b100_0011,    // x^6 + x + 1
    0b1000_0011,   // x^7 + x + 1
    0b1_0001_1101, // x^8 + x^4 + x^3 + x^2 + 1
];

/// A finite field of order `q`, acting on `u8` residues.
///
/// The handle is `Copy`; it is passed by value wherever arithmetic is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    order: u16,
    /// Characteristic: `order` itself for prime fields, 2 for extensions.
    prime: u16,
    /// Extension degree over the prime subfield.
    degree: u8,
    /// Reduction polynomial for binary extensions, unused otherwise.
    poly: u16,
}

/// GF(2). Addition is XOR; the only scalars are 0 and 1.
pub const BINARY: Field = Field {
    order: 2,
    prime: 2,
    degree: 1,
    poly: 0,
};

/// GF(2^8) with the reduction polynomial x^8 + x^4 + x^3 + x^2 + 1.
pub const GF256: Field = Field {
    order: 256,
    prime: 2,
    degree: 8,
    poly: BINARY_POLYS[6],
};

fn is_prime(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= v {
        if v.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Builds the field of the given order.
    ///
    /// Accepts primes up to 251 and powers of two up to 256. Other prime
    /// powers (9, 27, 25, ...) are rejected; nothing in this crate needs them.
    pub fn new(order: u64) -> Result<Self, FieldError> {
        if order == 2 {
            return Ok(BINARY);
        }
        if order.is_power_of_two() && (4..=256).contains(&order) {
            let k = order.trailing_zeros() as u8;
            return Ok(Field {
                order: order as u16,
                prime: 2,
                degree: k,
                poly: BINARY_POLYS[(k - 2) as usize],
            });
        }
        if order <= 251 && is_prime(order) {
            return Ok(Field {
                order: order as u16,
                prime: order as u16,
                degree: 1,
                poly: 0,
            });
        }
        Err(FieldError::UnsupportedOrder(order))
    }

    pub fn order(&self) -> u16 {
        self.order
    }

    /// True when the characteristic is two, i.e. subtraction is addition.
    pub fn is_binary_extension(&self) -> bool {
        self.prime == 2
    }

    pub fn contains(&self, value: u8) -> bool {
        (value as u16) < self.order
    }

    pub fn check(&self, value: u8) -> Result<u8, FieldError> {
        if self.contains(value) {
            Ok(value)
        } else {
            Err(FieldError::NotAnElement {
                value,
                order: self.order,
            })
        }
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        if self.prime == 2 {
            a ^ b
        } else {
            ((a as u16 + b as u16) % self.prime) as u8
        }
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        if self.prime == 2 {
            a
        } else if a == 0 {
            0
        } else {
            (self.prime - a as u16) as u8
        }
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if self.degree == 1 {
            ((a as u32 * b as u32) % self.prime as u32) as u8
        } else {
            // Carry-less multiply with on-the-fly polynomial reduction.
            let mut acc: u16 = 0;
            let mut lhs = a as u16;
            let mut rhs = b as u16;
            let top = 1u16 << self.degree;
            while rhs != 0 {
                if rhs & 1 != 0 {
                    acc ^= lhs;
                }
                rhs >>= 1;
                lhs <<= 1;
                if lhs & top != 0 {
                    lhs ^= self.poly;
                }
            }
            acc as u8
        }
    }

    /// Multiplicative inverse via exponentiation by q - 2.
    pub fn inv(&self, a: u8) -> Result<u8, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero(self.order));
        }
        let mut result = 1u8;
        let mut base = a;
        let mut exp = self.order - 2;
        while exp != 0 {
            if exp & 1 != 0 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        Ok(result)
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elements(f: Field) -> impl Iterator<Item = u8> {
        (0..f.order()).map(|v| v as u8)
    }

    fn check_axioms(f: Field) {
        for a in elements(f) {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.mul(a, 0), 0);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                let inv = f.inv(a).unwrap();
                assert_eq!(
                    f.mul(a, inv),
                    1,
                    "inverse failed for {a} in GF({})",
                    f.order()
                );
            }
        }
        for a in elements(f) {
            for b in elements(f) {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in elements(f) {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(
                        f.mul(a, f.add(b, c)),
                        f.add(f.mul(a, b), f.mul(a, c)),
                        "distributivity failed in GF({})",
                        f.order()
                    );
                }
            }
        }
    }

    #[test]
    fn axioms_hold_for_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 11, 16] {
            check_axioms(Field::new(q).unwrap());
        }
    }

    #[test]
    fn axioms_hold_for_gf256_sampled() {
        let f = GF256;
        // Unary laws and inverses exhaustively, ternary laws on a lattice.
        for a in 0..=255u8 {
            assert_eq!(f.add(a, a), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
        for a in (0..=255u8).step_by(17) {
            for b in (0..=255u8).step_by(13) {
                for c in (0..=255u8).step_by(11) {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn binary_addition_is_xor() {
        let f = BINARY;
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.add(1, 0), 1);
        assert_eq!(f.sub(0, 1), 1);
    }

    #[test]
    fn rejects_unsupported_orders() {
        for q in [0u64, 1, 6, 9, 10, 12, 25, 27, 257, 512] {
            assert_eq!(Field::new(q), Err(FieldError::UnsupportedOrder(q)));
        }
        assert_eq!(Field::new(251).unwrap().order(), 251);
        assert_eq!(Field::new(256).unwrap(), GF256);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(BINARY.inv(0), Err(FieldError::DivisionByZero(2)));
        assert!(GF256.div(5, 0).is_err());
    }
}

//! Arithmetic in GF(2^16) via log/antilog tables.

use std::sync::OnceLock;

/// x^16 + x^12 + x^3 + x + 1, primitive over GF(2).
const POLY: u32 = 0x1_100B;
const ORDER: usize = 1 << 16;
const GROUP: usize = ORDER - 1;

struct Tables {
    log: Vec<u16>,
    // doubled so exp[log a + log b] needs no reduction
    exp: Vec<u16>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut log = vec![0u16; ORDER];
        let mut exp = vec![0u16; 2 * GROUP];
        let mut x: u32 = 1;
        for i in 0..GROUP {
            exp[i] = x as u16;
            exp[i + GROUP] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & 0x1_0000 != 0 {
                x ^= POLY;
            }
        }
        debug_assert_eq!(x, 1, "generator order must be 2^16 - 1");
        Tables { log, exp }
    })
}

/// Field element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf16(pub u16);

impl Gf16 {
    pub const ZERO: Gf16 = Gf16(0);
    pub const ONE: Gf16 = Gf16(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn inv(self) -> Gf16 {
        assert!(!self.is_zero(), "inverse of zero");
        let t = tables();
        Gf16(t.exp[GROUP - t.log[self.0 as usize] as usize])
    }

    pub fn pow(self, e: usize) -> Gf16 {
        if e == 0 {
            return Gf16::ONE;
        }
        if self.is_zero() {
            return Gf16::ZERO;
        }
        let t = tables();
        let l = (t.log[self.0 as usize] as usize * (e % GROUP)) % GROUP;
        Gf16(t.exp[l])
    }
}

impl std::ops::Add for Gf16 {
    type Output = Gf16;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf16) -> Gf16 {
        Gf16(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl std::ops::AddAssign for Gf16 {
    fn add_assign(&mut self, rhs: Gf16) {
        self.0 ^= rhs.0;
    }
}

impl std::ops::Sub for Gf16 {
    type Output = Gf16;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Gf16) -> Gf16 {
        Gf16(self.0 ^ rhs.0)
    }
}

impl std::ops::Mul for Gf16 {
    type Output = Gf16;
    fn mul(self, rhs: Gf16) -> Gf16 {
        if self.is_zero() || rhs.is_zero() {
            return Gf16::ZERO;
        }
        let t = tables();
        Gf16(t.exp[t.log[self.0 as usize] as usize + t.log[rhs.0 as usize] as usize])
    }
}

impl std::ops::Div for Gf16 {
    type Output = Gf16;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Gf16) -> Gf16 {
        self * rhs.inv()
    }
}

/// `dst[i] += c * src[i]` over 16-bit little-endian symbols.
pub(crate) fn mul_add_into(dst: &mut [u8], src: &[u8], c: Gf16) {
    debug_assert_eq!(dst.len(), src.len());
    if c.is_zero() {
        return;
    }
    if c == Gf16::ONE {
        dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s);
        return;
    }
    debug_assert_eq!(dst.len() % 2, 0);
    let t = tables();
    let lc = t.log[c.0 as usize] as usize;
    for (d, s) in dst.chunks_exact_mut(2).zip(src.chunks_exact(2)) {
        let sv = u16::from_le_bytes([s[0], s[1]]);
        if sv == 0 {
            continue;
        }
        let prod = t.exp[lc + t.log[sv as usize] as usize];
        let dv = u16::from_le_bytes([d[0], d[1]]) ^ prod;
        d.copy_from_slice(&dv.to_le_bytes());
    }
}

/// Inverts a square matrix by Gauss-Jordan elimination, `None` if singular.
pub(crate) fn invert(mut m: Vec<Vec<Gf16>>) -> Option<Vec<Vec<Gf16>>> {
    let n = m.len();
    let mut inv: Vec<Vec<Gf16>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Gf16::ONE } else { Gf16::ZERO }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = m[col][col].inv();
        for j in 0..n {
            m[col][j] = m[col][j] * scale;
            inv[col][j] = inv[col][j] * scale;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col];
            for j in 0..n {
                let a = m[col][j];
                let b = inv[col][j];
                m[r][j] += factor * a;
                inv[r][j] += factor * b;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_on_samples() {
        let xs = [1u16, 2, 3, 0x1234, 0x8000, 0xFFFF, 0xABCD];
        for &a in &xs {
            let a = Gf16(a);
            assert_eq!(a * a.inv(), Gf16::ONE);
            assert_eq!(a * Gf16::ONE, a);
            assert_eq!(a * Gf16::ZERO, Gf16::ZERO);
            for &b in &xs {
                let b = Gf16(b);
                assert_eq!(a * b, b * a);
                assert_eq!((a * b) / b, a);
                for &c in &xs {
                    let c = Gf16(c);
                    assert_eq!(a * (b + c), a * b + a * c);
                    assert_eq!((a * b) * c, a * (b * c));
                }
            }
        }
    }

    #[test]
    fn table_mul_matches_carryless_reduction() {
        fn slow(a: u16, b: u16) -> u16 {
            let mut acc: u32 = 0;
            for i in 0..16 {
                if b >> i & 1 == 1 {
                    acc ^= (a as u32) << i;
                }
            }
            for i in (16..32).rev() {
                if acc >> i & 1 == 1 {
                    acc ^= POLY << (i - 16);
                }
            }
            acc as u16
        }
        let mut x: u16 = 0x9E37;
        for _ in 0..2000 {
            x = x.wrapping_mul(31421).wrapping_add(6927);
            let y = x.rotate_left(7) ^ 0x5A5A;
            assert_eq!((Gf16(x) * Gf16(y)).0, slow(x, y));
        }
    }

    #[test]
    fn generator_is_primitive() {
        let t = tables();
        let mut seen = vec![false; ORDER];
        for &e in &t.exp[..GROUP] {
            assert!(!seen[e as usize]);
            seen[e as usize] = true;
        }
        assert!(!seen[0]);
    }

    #[test]
    fn invert_round_trip() {
        let m: Vec<Vec<Gf16>> = (0..5)
            .map(|i| (0..5).map(|j| Gf16(i as u16 + 1).pow(j)).collect())
            .collect();
        let inv = invert(m.clone()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = Gf16::ZERO;
                for t in 0..5 {
                    acc += m[i][t] * inv[t][j];
                }
                assert_eq!(acc, if i == j { Gf16::ONE } else { Gf16::ZERO });
            }
        }
        let singular = vec![vec![Gf16(1), Gf16(2)], vec![Gf16(1), Gf16(2)]];
        assert!(invert(singular).is_none());
    }
}

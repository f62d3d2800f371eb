//! 32-bit integer machine words.
//!
//! Posit and float kernels are written once against [`Word`] and run either
//! on concrete values ([`Bits`]) or on recorded handles
//! ([`crate::opgraph::Traced`]) that build an operation graph. The primitive
//! set is deliberately small: add/sub/mul/mulhi, shifts, bitwise logic,
//! compares, count-leading-zeros, select and min/max.
//!
//! Shift semantics: amounts of 32 or more produce 0 (logical shifts) or the
//! sign fill (arithmetic shift right). Compares produce 0 or 1.

use std::ops::{Add, BitAnd, BitOr, BitXor, Not, Shl, Shr, Sub};

/// Primitive integer operations. Every kernel operation maps to exactly one
/// of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prim {
    Add,
    Sub,
    Mul,
    MulHi,
    And,
    Or,
    Xor,
    Not,
    Shl,
    Shr,
    Sar,
    Clz,
    Eq,
    Ne,
    Ult,
    Ule,
    Slt,
    Sle,
    Select,
    UMin,
    UMax,
    SMin,
    SMax,
}

impl Prim {
    pub fn arity(self) -> usize {
        match self {
            Prim::Not | Prim::Clz => 1,
            Prim::Select => 3,
            _ => 2,
        }
    }

    /// Reference semantics shared by direct evaluation, constant folding and
    /// graph replay.
    pub fn eval(self, args: &[u32]) -> u32 {
        let a = args[0];
        let b = args.get(1).copied().unwrap_or(0);
        match self {
            Prim::Add => a.wrapping_add(b),
            Prim::Sub => a.wrapping_sub(b),
            Prim::Mul => a.wrapping_mul(b),
            Prim::MulHi => ((a as u64 * b as u64) >> 32) as u32,
            Prim::And => a & b,
            Prim::Or => a | b,
            Prim::Xor => a ^ b,
            Prim::Not => !a,
            Prim::Shl => shl(a, b),
            Prim::Shr => shr(a, b),
            Prim::Sar => sar(a, b),
            Prim::Clz => a.leading_zeros(),
            Prim::Eq => (a == b) as u32,
            Prim::Ne => (a != b) as u32,
            Prim::Ult => (a < b) as u32,
            Prim::Ule => (a <= b) as u32,
            Prim::Slt => ((a as i32) < (b as i32)) as u32,
            Prim::Sle => ((a as i32) <= (b as i32)) as u32,
            Prim::Select => {
                if a != 0 {
                    b
                } else {
                    args[2]
                }
            }
            Prim::UMin => a.min(b),
            Prim::UMax => a.max(b),
            Prim::SMin => (a as i32).min(b as i32) as u32,
            Prim::SMax => (a as i32).max(b as i32) as u32,
        }
    }
}

#[inline(always)]
fn shl(a: u32, s: u32) -> u32 {
    if s >= 32 {
        0
    } else {
        a << s
    }
}

#[inline(always)]
fn shr(a: u32, s: u32) -> u32 {
    if s >= 32 {
        0
    } else {
        a >> s
    }
}

#[inline(always)]
fn sar(a: u32, s: u32) -> u32 {
    ((a as i32) >> s.min(31)) as u32
}

/// A 32-bit machine word with the primitive operation set.
///
/// The std operator impls map as: `+ - & | ^ !` to wrapping/bitwise ops,
/// `<<` to [`Prim::Shl`] and `>>` to the *logical* [`Prim::Shr`].
pub trait Word:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + BitAnd<Output = Self>
    + BitOr<Output = Self>
    + BitXor<Output = Self>
    + Not<Output = Self>
    + Shl<Output = Self>
    + Shr<Output = Self>
{
    fn lit(v: u32) -> Self;
    fn mul(self, o: Self) -> Self;
    fn mulhi(self, o: Self) -> Self;
    fn sar(self, o: Self) -> Self;
    fn clz(self) -> Self;
    fn eq(self, o: Self) -> Self;
    fn ne(self, o: Self) -> Self;
    fn ult(self, o: Self) -> Self;
    fn ule(self, o: Self) -> Self;
    fn slt(self, o: Self) -> Self;
    fn sle(self, o: Self) -> Self;
    fn umin(self, o: Self) -> Self;
    fn umax(self, o: Self) -> Self;
    fn smin(self, o: Self) -> Self;
    fn smax(self, o: Self) -> Self;
    /// `c != 0 ? a : b`
    fn select(c: Self, a: Self, b: Self) -> Self;

    /// Data-dependent if/else. Concrete words take the branch; traced words
    /// record both arms and merge their results with selects, which is how a
    /// dataflow compiler if-converts control flow.
    fn cond<T: Merge<Self>>(c: Self, then: impl FnOnce() -> T, els: impl FnOnce() -> T) -> T;

    /// Concrete value, if known at trace time.
    fn known(self) -> Option<u32>;
}

/// Values that can be merged by a select on a word condition.
pub trait Merge<W: Word> {
    fn merge(c: W, a: Self, b: Self) -> Self;
}

impl<W: Word> Merge<W> for () {
    fn merge(_: W, _: (), _: ()) {}
}

impl<W: Word> Merge<W> for W {
    fn merge(c: W, a: W, b: W) -> W {
        W::select(c, a, b)
    }
}

macro_rules! merge_tuple {
    ($($t:ident $i:tt),+) => {
        impl<W: Word, $($t: Merge<W>),+> Merge<W> for ($($t,)+) {
            fn merge(c: W, a: Self, b: Self) -> Self {
                ($($t::merge(c, a.$i, b.$i),)+)
            }
        }
    };
}

merge_tuple!(A 0, B 1);
merge_tuple!(A 0, B 1, C 2);
merge_tuple!(A 0, B 1, C 2, D 3);
merge_tuple!(A 0, B 1, C 2, D 3, E 4);
merge_tuple!(A 0, B 1, C 2, D 3, E 4, F 5);

/// A concrete 32-bit word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bits(pub u32);

macro_rules! bits_binop {
    ($tr:ident, $f:ident, $e:expr) => {
        impl $tr for Bits {
            type Output = Bits;
            #[inline(always)]
            fn $f(self, o: Bits) -> Bits {
                let f: fn(u32, u32) -> u32 = $e;
                Bits(f(self.0, o.0))
            }
        }
    };
}

bits_binop!(Add, add, |a, b| a.wrapping_add(b));
bits_binop!(Sub, sub, |a, b| a.wrapping_sub(b));
bits_binop!(BitAnd, bitand, |a, b| a & b);
bits_binop!(BitOr, bitor, |a, b| a | b);
bits_binop!(BitXor, bitxor, |a, b| a ^ b);
bits_binop!(Shl, shl, shl);
bits_binop!(Shr, shr, shr);

impl Not for Bits {
    type Output = Bits;
    #[inline(always)]
    fn not(self) -> Bits {
        Bits(!self.0)
    }
}

impl Word for Bits {
    #[inline(always)]
    fn lit(v: u32) -> Self {
        Bits(v)
    }
    #[inline(always)]
    fn mul(self, o: Self) -> Self {
        Bits(self.0.wrapping_mul(o.0))
    }
    #[inline(always)]
    fn mulhi(self, o: Self) -> Self {
        Bits(((self.0 as u64 * o.0 as u64) >> 32) as u32)
    }
    #[inline(always)]
    fn sar(self, o: Self) -> Self {
        Bits(sar(self.0, o.0))
    }
    #[inline(always)]
    fn clz(self) -> Self {
        Bits(self.0.leading_zeros())
    }
    #[inline(always)]
    fn eq(self, o: Self) -> Self {
        Bits((self.0 == o.0) as u32)
    }
    #[inline(always)]
    fn ne(self, o: Self) -> Self {
        Bits((self.0 != o.0) as u32)
    }
    #[inline(always)]
    fn ult(self, o: Self) -> Self {
        Bits((self.0 < o.0) as u32)
    }
    #[inline(always)]
    fn ule(self, o: Self) -> Self {
        Bits((self.0 <= o.0) as u32)
    }
    #[inline(always)]
    fn slt(self, o: Self) -> Self {
        Bits(((self.0 as i32) < (o.0 as i32)) as u32)
    }
    #[inline(always)]
    fn sle(self, o: Self) -> Self {
        Bits(((self.0 as i32) <= (o.0 as i32)) as u32)
    }
    #[inline(always)]
    fn umin(self, o: Self) -> Self {
        Bits(self.0.min(o.0))
    }
    #[inline(always)]
    fn umax(self, o: Self) -> Self {
        Bits(self.0.max(o.0))
    }
    #[inline(always)]
    fn smin(self, o: Self) -> Self {
        Bits((self.0 as i32).min(o.0 as i32) as u32)
    }
    #[inline(always)]
    fn smax(self, o: Self) -> Self {
        Bits((self.0 as i32).max(o.0 as i32) as u32)
    }
    #[inline(always)]
    fn select(c: Self, a: Self, b: Self) -> Self {
        if c.0 != 0 {
            a
        } else {
            b
        }
    }
    #[inline(always)]
    fn cond<T: Merge<Self>>(c: Self, then: impl FnOnce() -> T, els: impl FnOnce() -> T) -> T {
        if c.0 != 0 {
            then()
        } else {
            els()
        }
    }
    #[inline(always)]
    fn known(self) -> Option<u32> {
        Some(self.0)
    }
}

/// Shorthand for a literal word.
#[inline(always)]
pub fn k<W: Word>(v: u32) -> W {
    W::lit(v)
}

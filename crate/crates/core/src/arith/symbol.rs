//! Compact, ordered, copyable variable names.

use core::fmt;

/// A variable name of at most [`Symbol::MAX_LEN`] ASCII bytes.
///
/// Symbols compare lexicographically by name, which fixes the variable order
/// used by the multivariate polynomial code (larger name = more significant).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol([u8; 8]);

impl Symbol {
    pub const MAX_LEN: usize = 8;

    /// Returns `None` unless `name` is a nonempty identifier of at most eight bytes.
    pub fn new(name: &str) -> Option<Symbol> {
        let bytes = name.as_bytes();
        if bytes.is_empty() || bytes.len() > Self::MAX_LEN {
            return None;
        }
        if !(bytes[0].is_ascii_alphabetic() || bytes[0] == b'_') {
            return None;
        }
        if !bytes.iter().all(|b| b.is_ascii_alphanumeric() || *b == b'_') {
            return None;
        }
        let mut buf = [0u8; 8];
        buf[..bytes.len()].copy_from_slice(bytes);
        Some(Symbol(buf))
    }

    /// A new bound-variable name `_<n>` not produced before in this process.
    pub fn fresh() -> Symbol {
        static NEXT: core::sync::atomic::AtomicU64 = core::sync::atomic::AtomicU64::new(0);
        let mut n = NEXT.fetch_add(1, core::sync::atomic::Ordering::Relaxed);
        let mut buf = [0u8; 8];
        buf[0] = b'_';
        let mut digits = [0u8; 7];
        let mut len = 0;
        loop {
            let d = (n % 36) as u8;
            digits[len] = if d < 10 { b'0' + d } else { b'a' + d - 10 };
            len += 1;
            n /= 36;
            if n == 0 || len == 7 {
                break;
            }
        }
        for k in 0..len {
            buf[1 + k] = digits[len - 1 - k];
        }
        Symbol(buf)
    }

    pub fn is_fresh(&self) -> bool {
        self.0[0] == b'_'
    }

    pub fn as_str(&self) -> &str {
        let len = self.0.iter().position(|b| *b == 0).unwrap_or(8);
        core::str::from_utf8(&self.0[..len]).expect("symbol bytes are ascii")
    }
}

/// Shorthand for building a symbol from a literal; panics on an invalid name.
pub fn sym(name: &str) -> Symbol {
    Symbol::new(name).unwrap_or_else(|| panic!("invalid symbol name {name:?}"))
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

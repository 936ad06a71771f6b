//! Body alphabets and integer translation matrices between them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::body::Body;
use crate::error::{Error, Result};

/// Ordered set of basis symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index_of(symbol).is_some()
    }
}

/// Integer matrix of shape `dim(to) × dim(from)`, rows indexed by target symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationMatrix {
    from: Alphabet,
    to: Alphabet,
    entries: Vec<Vec<i64>>,
}

impl TranslationMatrix {
    pub fn new(from: Alphabet, to: Alphabet, entries: Vec<Vec<i64>>) -> Result<Self> {
        if entries.len() != to.dim() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} rows for a target alphabet of {} symbols",
                entries.len(),
                to.dim()
            )));
        }
        if let Some(row) = entries.iter().find(|r| r.len() != from.dim()) {
            return Err(Error::DimensionMismatch(alloc::format!(
                "row of {} entries for a source alphabet of {} symbols",
                row.len(),
                from.dim()
            )));
        }
        Ok(TranslationMatrix { from, to, entries })
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let n = alphabet.dim();
        let entries = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        TranslationMatrix {
            from: alphabet.clone(),
            to: alphabet,
            entries,
        }
    }

    pub fn from_alphabet(&self) -> &Alphabet {
        &self.from
    }

    pub fn to_alphabet(&self) -> &Alphabet {
        &self.to
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    fn column(&self, j: usize) -> impl Iterator<Item = i64> + '_ {
        self.entries.iter().map(move |r| r[j])
    }

    /// Target symbols reached by at least one source symbol.
    pub fn image(&self) -> BTreeSet<&str> {
        (0..self.to.dim())
            .filter(|&i| self.entries[i].iter().any(|e| *e != 0))
            .map(|i| self.to.symbols[i].as_str())
            .collect()
    }

    /// Rank over the rationals (fraction-free elimination).
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<i128>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|e| *e as i128).collect())
            .collect();
        let rows = m.len();
        let cols = self.from.dim();
        let mut rank = 0;
        let mut prev = 1i128;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, p);
            for r in rank + 1..rows {
                for k in c + 1..cols {
                    m[r][k] = (m[rank][c] * m[r][k] - m[r][c] * m[rank][k]) / prev;
                }
                m[r][c] = 0;
            }
            prev = m[rank][c];
            rank += 1;
        }
        rank
    }

    /// Integral two-sided inverse, when one exists.
    pub fn inverse(&self) -> Option<TranslationMatrix> {
        if !is_invertible(self) {
            return None;
        }
        let n = self.from.dim();
        // Gauss-Jordan over rationals kept as (num, den) pairs.
        let mut a: Vec<Vec<(i128, i128)>> = (0..n)
            .map(|i| {
                let mut row: Vec<(i128, i128)> = self.entries[i].iter().map(|e| (*e as i128, 1)).collect();
                row.extend((0..n).map(|j| (i128::from(i == j), 1)));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| a[r][c].0 != 0)?;
            a.swap(c, p);
            let piv = a[c][c];
            for x in a[c].iter_mut() {
                *x = frac_div(*x, piv);
            }
            let pivot_row = a[c].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != c && row[c].0 != 0 {
                    let f = row[c];
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x = frac_sub(*x, frac_mul(f, *p));
                    }
                }
            }
        }
        let mut entries = Vec::with_capacity(n);
        for row in a {
            let mut out = Vec::with_capacity(n);
            for (num, den) in row.into_iter().skip(n) {
                if num % den != 0 {
                    return None;
                }
                out.push(i64::try_from(num / den).ok()?);
            }
            entries.push(out);
        }
        Some(TranslationMatrix {
            from: self.to.clone(),
            to: self.from.clone(),
            entries,
        })
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

fn norm((n, d): (i128, i128)) -> (i128, i128) {
    let g = gcd(n, d);
    let s = if d < 0 { -1 } else { 1 };
    (s * n / g, s * d / g)
}

fn frac_mul(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    norm((a.0 * b.0, a.1 * b.1))
}

fn frac_div(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    norm((a.0 * b.1, a.1 * b.0))
}

fn frac_sub(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    norm((a.0 * b.1 - b.0 * a.1, a.1 * b.1))
}

/// Re-expresses the body's coefficient vector over the target alphabet: `c' = L·c`.
pub fn translate(body: &Body, l: &TranslationMatrix) -> Result<Body> {
    let mut out = vec_zero(l.to.dim());
    for (sym, c) in &body.symbols {
        let j = l.from.index_of(sym).ok_or_else(|| Error::UnknownSymbol(sym.clone()))?;
        if l.column(j).all(|e| e == 0) {
            return Err(Error::UntranslatableSymbol(sym.clone()));
        }
        for (i, e) in l.column(j).enumerate() {
            out[i] += e * i64::from(*c);
        }
    }
    let mut symbols = BTreeMap::new();
    for (i, v) in out.into_iter().enumerate() {
        let name = &l.to.symbols[i];
        if v < 0 {
            return Err(Error::NegativeCoefficient(name.clone()));
        }
        if v > 0 {
            let v = u32::try_from(v).map_err(|_| Error::NegativeCoefficient(name.clone()))?;
            symbols.insert(name.clone(), v);
        }
    }
    Ok(body.clone().with_coefficients(symbols))
}

fn vec_zero(n: usize) -> Vec<i64> {
    alloc::vec![0; n]
}

/// Translates a body written over `l`'s target alphabet back to its source.
///
/// A target symbol is only recoverable when exactly one source symbol maps
/// onto it and onto nothing else.
pub fn reverse_translate(body: &Body, l: &TranslationMatrix) -> Result<Body> {
    let mut symbols = BTreeMap::new();
    for (sym, c) in &body.symbols {
        let i = l.to.index_of(sym).ok_or_else(|| Error::UnknownSymbol(sym.clone()))?;
        let unit: Vec<usize> = (0..l.from.dim())
            .filter(|&j| l.column(j).enumerate().all(|(r, e)| e == i64::from(r == i)))
            .collect();
        match unit.as_slice() {
            [j] => {
                symbols.insert(l.from.symbols[*j].clone(), *c);
            }
            _ => return Err(Error::UntranslatableSymbol(sym.clone())),
        }
    }
    Ok(body.clone().with_coefficients(symbols))
}

/// Square and of full rank.
pub fn is_invertible(l: &TranslationMatrix) -> bool {
    l.from.dim() == l.to.dim() && l.rank() == l.from.dim()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    Continuous,
    /// Patch `boundary` shares nothing with patch `boundary + 1`.
    BrokenAt(usize),
}

/// Checks that every neighbouring pair of patch languages overlaps once the
/// first is translated into the second. `maps[a]` carries patch `a` to `a + 1`.
pub fn continuity_check(patches: &[Alphabet], maps: &[TranslationMatrix]) -> Result<Continuity> {
    if patches.len() != maps.len() + 1 && !(patches.is_empty() && maps.is_empty()) {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} patches need {} matrices, got {}",
            patches.len(),
            patches.len().saturating_sub(1),
            maps.len()
        )));
    }
    for (a, l) in maps.iter().enumerate() {
        let (here, next) = (&patches[a], &patches[a + 1]);
        if l.from.dim() != here.dim() || l.to.dim() != next.dim() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "matrix {} is {}x{} between patches of {} and {} symbols",
                a,
                l.to.dim(),
                l.from.dim(),
                here.dim(),
                next.dim()
            )));
        }
        if !l.image().iter().any(|s| next.contains(s)) {
            return Ok(Continuity::BrokenAt(a));
        }
    }
    Ok(Continuity::Continuous)
}

/// Symbols common to two promised bodies and the receiver's acceptance filter.
/// An empty result means the receiver can tell the two promisers apart.
pub fn common_part(alphabet: &Alphabet, b1: &Body, b2: &Body, filter: &Body) -> Result<BTreeSet<String>> {
    for b in [b1, b2, filter] {
        if let Some(s) = b.symbols.keys().find(|s| !alphabet.contains(s)) {
            return Err(Error::AlphabetMismatch(s.clone()));
        }
    }
    Ok(b1
        .symbols
        .keys()
        .filter(|s| b2.symbols.contains_key(*s) && filter.symbols.contains_key(*s))
        .cloned()
        .collect())
}

/// Union of sub-agent alphabets, sorted lexicographically.
pub fn superagent_language(subs: &[Alphabet]) -> Alphabet {
    let all: BTreeSet<&String> = subs.iter().flat_map(|a| a.symbols.iter()).collect();
    Alphabet {
        symbols: all.into_iter().map(ToString::to_string).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn paper_matrix() -> TranslationMatrix {
        TranslationMatrix::new(
            Alphabet::new(["SEND", "RECEIVE", "SEEK", "FORWARD", "BACK"]).unwrap(),
            Alphabet::new(["PUT", "GET", "APPEND"]).unwrap(),
            vec![vec![1, 0, 0, 0, 0], vec![0, 1, 0, 0, 0], vec![1, 0, 1, 1, 0]],
        )
        .unwrap()
    }

    fn word(s: &str) -> Body {
        Body::offer("msg").with_symbols([s])
    }

    #[test]
    fn send_puts_and_receive_gets() {
        let l = paper_matrix();
        let put = translate(&word("SEND"), &l).unwrap();
        assert_eq!(put.symbols.get("PUT"), Some(&1));
        let get = translate(&word("RECEIVE"), &l).unwrap();
        assert_eq!(get.symbol_set().into_iter().collect::<Vec<_>>(), ["GET"]);
        let seek = translate(&word("SEEK"), &l).unwrap();
        assert_eq!(seek.symbol_set().into_iter().collect::<Vec<_>>(), ["APPEND"]);
        assert_eq!(
            translate(&word("BACK"), &l),
            Err(Error::UntranslatableSymbol("BACK".into()))
        );
        assert_eq!(translate(&word("JUMP"), &l), Err(Error::UnknownSymbol("JUMP".into())));
    }

    #[test]
    fn one_way_only() {
        let l = paper_matrix();
        assert!(!is_invertible(&l));
        assert_eq!(l.rank(), 3);
        assert!(l.inverse().is_none());
        let back = reverse_translate(&Body::offer("msg").with_symbols(["GET"]), &l).unwrap();
        assert_eq!(back.symbol_set().into_iter().collect::<Vec<_>>(), ["RECEIVE"]);
        assert_eq!(
            reverse_translate(&Body::offer("msg").with_symbols(["APPEND"]), &l),
            Err(Error::UntranslatableSymbol("APPEND".into()))
        );
    }

    #[test]
    fn identity_and_swap() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let id = TranslationMatrix::identity(a.clone());
        let b = Body::offer("t").with_symbols(["x", "y"]);
        assert_eq!(translate(&b, &id).unwrap(), b);
        assert!(is_invertible(&id));
        let swap = TranslationMatrix::new(a.clone(), a, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(is_invertible(&swap));
        assert_eq!(swap.inverse().unwrap(), swap);
    }

    #[test]
    fn non_integral_inverse_is_withheld() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let m = TranslationMatrix::new(a.clone(), a, vec![vec![2, 0], vec![0, 1]]).unwrap();
        assert!(is_invertible(&m));
        assert!(m.inverse().is_none());
    }

    #[test]
    fn rank_deficient_square() {
        let a = Alphabet::new(["x", "y", "z"]).unwrap();
        let m = TranslationMatrix::new(a.clone(), a, vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        assert!(!is_invertible(&m));
    }

    #[test]
    fn continuity() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let b = Alphabet::new(["p", "q"]).unwrap();
        assert_eq!(continuity_check(core::slice::from_ref(&a), &[]), Ok(Continuity::Continuous));
        let id = TranslationMatrix::identity(a.clone());
        assert_eq!(
            continuity_check(&[a.clone(), a.clone()], core::slice::from_ref(&id)),
            Ok(Continuity::Continuous)
        );
        let zero = TranslationMatrix::new(a.clone(), b.clone(), vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(
            continuity_check(&[a.clone(), b.clone()], &[zero]),
            Ok(Continuity::BrokenAt(0))
        );
        assert!(matches!(
            continuity_check(&[a.clone(), Alphabet::new(["p"]).unwrap()], &[id]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn distinguishability() {
        let alpha = Alphabet::new(["DNA", "ink", "paper", "plasma"]).unwrap();
        let letter = Body::offer("sample").with_symbols(["DNA", "ink", "paper"]);
        let blood = Body::offer("sample").with_symbols(["DNA", "plasma"]);
        let lab = Body::use_of("sample").with_symbols(["DNA"]);
        let common = common_part(&alpha, &letter, &blood, &lab).unwrap();
        assert_eq!(common.into_iter().collect::<Vec<_>>(), ["DNA"]);
        let ink = Body::offer("s").with_symbols(["ink"]);
        let plasma = Body::offer("s").with_symbols(["plasma"]);
        assert!(common_part(&alpha, &ink, &plasma, &lab).unwrap().is_empty());
        assert_eq!(common_part(&alpha, &letter, &letter, &letter).unwrap().len(), 3);
        assert!(matches!(
            common_part(&alpha, &word("SEND"), &letter, &lab),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn superagent_language_is_sorted_union() {
        let a = Alphabet::new(["SEND", "RECEIVE"]).unwrap();
        let b = Alphabet::new(["PUT", "GET", "SEND"]).unwrap();
        let u = superagent_language(&[a.clone(), b]);
        assert_eq!(u.symbols(), ["GET", "PUT", "RECEIVE", "SEND"]);
        assert_eq!(superagent_language(core::slice::from_ref(&a)).dim(), 2);
    }
}

use super::ConstructError;
use crate::code::Code;
use crate::word::{Symbol, Word};
use crate::Rational;

/// Canonical prefix-free code with the given length multiset.
///
/// Lengths are sorted ascending and each gets the lexicographically least
/// word that keeps the code prefix-free: the successor of the previous word,
/// padded with `a`s.
pub fn code_from_lengths(lengths: &[usize]) -> Result<Code, ConstructError> {
    if lengths.is_empty() {
        return Err(ConstructError::NoLengths);
    }
    if lengths.contains(&0) {
        return Err(ConstructError::ZeroLength);
    }
    let sum: Rational =
        lengths.iter().map(|&l| Rational::new(1u32.into(), num_traits::pow(2u32.into(), l))).sum();
    if sum > Rational::from_integer(1u32.into()) {
        return Err(ConstructError::KraftViolation(sum));
    }

    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let mut words = Vec::with_capacity(sorted.len());
    let mut current: Option<Word> = None;
    for len in sorted {
        let mut next = match current {
            None => Word::empty(),
            Some(prev) => successor(&prev).expect("Kraft sum ≤ 1 leaves room"),
        };
        while next.len() < len {
            next.push(Symbol::A);
        }
        words.push(next.clone());
        current = Some(next);
    }
    Ok(Code::new(words).expect("canonical words are distinct and nonempty"))
}

/// Binary successor with `a = 0`, `b = 1`; `None` on `b^n`.
fn successor(w: &Word) -> Option<Word> {
    let symbols = w.symbols();
    let last_a = symbols.iter().rposition(|&s| s == Symbol::A)?;
    let mut out: Vec<Symbol> = symbols[..last_a].to_vec();
    out.push(Symbol::B);
    out.extend(std::iter::repeat_n(Symbol::A, symbols.len() - last_a - 1));
    Some(Word::from_symbols(out))
}

use proptest::prelude::*;
use semspace_core::language::{is_invertible, reverse_translate, translate, Alphabet, TranslationMatrix};
use semspace_core::{Body, Error};

fn alphabet(prefix: &str, n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| format!("{}{}", prefix, i))).unwrap()
}

/// Row `i` has its single one in column `perm[i]`.
fn permutation(perm: &[usize]) -> TranslationMatrix {
    let n = perm.len();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| i64::from(perm[i] == j)).collect())
        .collect();
    TranslationMatrix::new(alphabet("x", n), alphabet("y", n), rows).unwrap()
}

proptest! {
    #[test]
    fn permutations_translate_both_ways(perm in (1usize..7).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle()), pick in any::<prop::sample::Index>()) {
        let l = permutation(&perm);
        prop_assert!(is_invertible(&l));
        let s = format!("x{}", pick.index(perm.len()));
        let body = Body::offer("msg").with_symbols([s.as_str()]);
        let there = translate(&body, &l).unwrap();
        // Column j lands on the row that holds its one.
        let j = pick.index(perm.len());
        let row = perm.iter().position(|&c| c == j).unwrap();
        let expected = format!("y{}", row);
        prop_assert_eq!(there.symbol_set().into_iter().collect::<Vec<_>>(), vec![expected.as_str()]);
        prop_assert_eq!(reverse_translate(&there, &l).unwrap().symbols, body.symbols);
    }
}

#[test]
fn zero_column_is_untranslatable() {
    let l = TranslationMatrix::new(alphabet("x", 2), alphabet("y", 2), vec![vec![1, 0], vec![0, 0]]).unwrap();
    let body = Body::offer("msg").with_symbols(["x1"]);
    assert_eq!(translate(&body, &l), Err(Error::UntranslatableSymbol("x1".into())));
    assert!(!is_invertible(&l));
}

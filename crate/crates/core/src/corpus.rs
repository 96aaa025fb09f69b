//! Named example terms used by tests, benchmarks and documentation.

use crate::syntax::{parse, Term};

/// A named example in concrete syntax.
#[derive(Copy, Clone, Debug)]
pub struct Example {
    pub name: &'static str,
    pub source: &'static str,
}

impl Example {
    pub fn term(&self) -> Term {
        parse(self.source).unwrap_or_else(|e| panic!("example {} does not parse: {e}", self.name))
    }
}

macro_rules! examples {
    ($($id:ident = $name:literal : $src:literal;)*) => {
        $(pub const $id: Example = Example { name: $name, source: $src };)*
        /// Every named example.
        pub const ALL: &[Example] = &[$($id),*];
    };
}

examples! {
    ID_ID = "id-id": r"(\x. x) (\x. x)";
    ID_ID_SHARED = "id-id-shared": r"let id = \x. x in id id";
    FIX = "fix": r"\f. let r = f r in r";
    FIX_UNROLLED = "fix-unrolled": r"\f. let r = f (f r) in r";
    COUNTER = "counter": r"let f = \x. f x in f";
    COUNTER_REDEX = "counter-redex": r"let f = \x. (\y. f y) x in f";
    COUNTER_NESTED = "counter-nested": r"let f = \x. (\y. f x) x in f";
    SCOPE_OUTER = "scope-outer": r"let I = \z. z in \x. \y. let f = x in ((y I) (I y)) (f f)";
    SCOPE_MIDDLE = "scope-middle": r"\x. let I = \z. z in \y. let f = x in ((y I) (I y)) (f f)";
    SCOPE_INNER = "scope-inner": r"\x. \y. let I = \z. z, f = x in ((y I) (I y)) (f f)";
    SCOPE_INNER_ALIAS = "scope-inner-alias": r"\x. let I = \z. z in \y. let f = x, g = I in ((y g) (g y)) (f f)";
    BLACK_HOLE = "black-hole": r"\x. let f = f in f x";
    VARIABLE_ALIAS = "variable-alias": r"\a. \b. let f = a in ((a a) (f a)) b";
    ETA_SHARED = "eta-shared": r"\a. (\b. \c. a c) (\d. a d)";
    SELF_APPLY = "self-apply": r"\x. let f = \y. f x y in f f";
    GARBAGE = "garbage": r"\x. let f = x, g = \y. g y in f x";
    MUTUAL = "mutual": r"\x. let even = \n. odd (n x), odd = \n. even (x n) in even";
    NESTED_LETS = "nested-lets": r"let a = \x. let b = \y. a (b y) in b x in a";
    DOUBLE = "double": r"\x. x x";
    DEEP_SCOPES = "deep-scopes": r"\x. \y. \z. (\w. w x) (\v. v y)";
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_examples_parse() {
        assert!(ALL.len() >= 10);
        for e in ALL {
            e.term();
        }
    }
}

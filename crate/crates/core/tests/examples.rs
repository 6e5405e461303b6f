macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $name() {
            $name::run_example().expect("example runs");
        }
    };
}

example!(forms_basics, "forms_basics.rs");
example!(hilbert_functions, "hilbert_functions.rs");
example!(orbit_normalization, "orbit_normalization.rs");
example!(trichotomy, "trichotomy.rs");
example!(sylvester_bound, "sylvester_bound.rs");
example!(terracini_locus, "terracini_locus.rs");
example!(pentahedral, "pentahedral.rs");
example!(numeric_search, "numeric_search.rs");
example!(verification_suite, "verification_suite.rs");

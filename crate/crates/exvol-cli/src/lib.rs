//! Support pieces of the exvol command line: the dispatch table mapping
//! library operations to owning subcommands, and the deterministic output
//! writer.

pub mod output;

/// Which subcommand exposes each library operation. Every operation is
/// owned by exactly one subcommand; the coverage test enforces the
/// inventory and uniqueness.
pub const DISPATCH_TABLE: &[(&str, &str)] = &[
    // lattice
    ("real_generator_matrix", "torus mu"),
    ("covolume", "torus mu"),
    ("period_matrix", "torus mu-prime"),
    ("from_siegel", "torus verify-bound"),
    // invariants
    ("omega_volume_class", "torus mu"),
    ("is_totally_real", "torus mu"),
    ("phase", "torus mu"),
    ("extremal_volume", "torus mu"),
    ("mu_prime", "torus mu-prime"),
    ("product_lattice", "torus mu"),
    ("product_class", "torus mu"),
    // reduction
    ("reduce_tau", "torus reduce"),
    ("is_in_fundamental_domain", "torus reduce"),
    ("mu_pair", "torus reduce"),
    ("translate_reduce_siegel", "torus reduce"),
    ("polarized_mu_and_bound", "torus reduce"),
    // systole
    ("enumerate_classes", "torus systole"),
    ("complex_systole", "torus systole"),
    ("lagrange_gauss_shortest", "torus systole"),
    ("systolic_ratio", "torus systole"),
    ("verify_polarized_bound", "torus verify-bound"),
    // extremal length
    ("area", "length ratio"),
    ("len_class", "length ratio"),
    ("ratio", "length ratio"),
    ("loewner_check", "verify loewner"),
    // reinhardt
    ("log_volume", "reinhardt mu"),
    ("reinhardt_mu", "reinhardt mu"),
    ("product_base", "reinhardt mu"),
    ("monomial_pushforward", "reinhardt verify-invariance"),
    ("dilation_pushforward", "reinhardt verify-invariance"),
    ("elliptic_bundle_mu", "elliptic mu"),
    // minimality
    ("cycle_omega_volume_1d", "verify minimality"),
    ("surface_omega_volume_2d", "verify minimality"),
    ("verify_minimality", "verify minimality"),
];

//! Ready-to-run spec files for the gallery, with the expected statuses
//! written into each case as `expect_fail`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

struct Member {
    name: &'static str,
    about: &'static str,
    twist: &'static str,
    delta: &'static str,
    delta_k: &'static str,
    /// Checks that must fail with residual at or above the floor.
    expect_fail: &'static [&'static str],
}

const TWO_LEVEL: &str = "[4.0, 0.25]";
const TWO_LEVEL_K: &str = "[16.0, 0.0625]";
const THREE_LEVEL: &str = "[3.0, 1.0, 0.3333333333333333]";
const THREE_LEVEL_K: &str = "[9.0, 1.0, 0.1111111111111111]";

/// Everything that fails when the vacuum is not standard.
const NOT_STANDARD: &[&str] = &[
    "crossing",
    "kms_rotation",
    "kms_shift",
    "locality",
    "tomita",
];

const MEMBERS: &[Member] = &[
    Member {
        name: "zero",
        about: "T = 0: the full Fock space with free left and right fields.",
        twist: r#"{ gallery = "zero" }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: &[],
    },
    Member {
        name: "q_flip_pos",
        about: "T = qF with q = 0.5: strict, braided and crossing symmetric.",
        twist: r#"{ gallery = "q_flip", q = 0.5 }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: &[],
    },
    Member {
        name: "q_flip_neg",
        about: "T = qF with q = -0.5.",
        twist: r#"{ gallery = "q_flip", q = -0.5 }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: &[],
    },
    Member {
        name: "flip",
        about: "T = F: the symmetric (Bose) case. Left and right fields coincide.",
        twist: r#"{ gallery = "flip" }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: &[],
    },
    Member {
        name: "neg_flip",
        about: "T = -F: the antisymmetric (Fermi) case; the Fock space stops at level d.",
        twist: r#"{ gallery = "neg_flip" }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: &[],
    },
    Member {
        name: "identity",
        about: "T = 1: P_n = n! but the twist is not crossing symmetric.",
        twist: r#"{ gallery = "identity" }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: NOT_STANDARD,
    },
    Member {
        name: "neg_identity",
        about: "T = -1: P_n = 0 from level 2 on, a degenerate twist.",
        twist: r#"{ gallery = "neg_identity" }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: NOT_STANDARD,
    },
    Member {
        name: "elem_tensor",
        about: "T = A⊗B with A = diag(1, 0.3), B = diag(0.5, 0.2): violates Yang-Baxter.",
        twist: r#"{ gallery = "elem_tensor", a = [1.0, 0.3], b = [0.5, 0.2] }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: &[
            "crossing",
            "kms_rotation",
            "kms_shift",
            "locality",
            "tomita",
            "yang_baxter",
        ],
    },
    Member {
        name: "flip_sandwich",
        about: "T = F(A⊗A) on C^3 with A = diag(0.6, -0.8, 0.6) commuting with J.",
        twist: r#"{ gallery = "flip_sandwich", d = 3, a = [0.6, -0.8, 0.6] }"#,
        delta: THREE_LEVEL,
        delta_k: THREE_LEVEL_K,
        expect_fail: &[],
    },
    Member {
        name: "proj_pair",
        about: "T = 0.5 E⊗E with E = diag(1, 0): braided and compatible, not crossing symmetric.",
        twist: r#"{ gallery = "proj_pair", q = 0.5, e = [1.0, 0.0], e_tilde = [1.0, 0.0] }"#,
        delta: TWO_LEVEL,
        delta_k: TWO_LEVEL_K,
        expect_fail: NOT_STANDARD,
    },
];

const HEADER: &str = "\
# twistlab run config. Run with `twistlab run --config <this file>`.
# Each case lists the checks it is expected to fail in `expect_fail`,
# together with the residual floor the failure must reach.
seed = 7
suites = [\"all\"]

[cutoffs]
n_max = 5
N = 4
max_degree = 3

[tolerances]
exact = 1e-10
analytic = 1e-8
floor = 1e-3
";

const FLOOR: f64 = 1e-3;

fn case_block(m: &Member) -> String {
    let mut s = String::new();
    writeln!(s, "\n# {}", m.about).unwrap();
    writeln!(s, "[[cases]]").unwrap();
    writeln!(s, "name = \"{}\"", m.name).unwrap();
    writeln!(s, "twist = {}", m.twist).unwrap();
    writeln!(s, "subspace = {{ delta = {} }}", m.delta).unwrap();
    writeln!(s, "subspace_k = {{ delta = {} }}", m.delta_k).unwrap();
    if m.expect_fail.is_empty() {
        writeln!(s, "expect_fail = {{}}").unwrap();
    } else {
        let entries: Vec<String> = m
            .expect_fail
            .iter()
            .map(|c| format!("{c} = {FLOOR:e}"))
            .collect();
        writeln!(s, "expect_fail = {{ {} }}", entries.join(", ")).unwrap();
    }
    s
}

pub fn gallery_all() -> String {
    let mut text = HEADER.to_string();
    for m in MEMBERS {
        text.push_str(&case_block(m));
    }
    text
}

/// Writes `gallery_all.toml` and one `<member>.toml` per member; returns the paths.
pub fn write(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let all = dir.join("gallery_all.toml");
    std::fs::write(&all, gallery_all())?;
    written.push(all);
    for m in MEMBERS {
        let path = dir.join(format!("{}.toml", m.name));
        std::fs::write(&path, format!("{HEADER}{}", case_block(m)))?;
        written.push(path);
    }
    Ok(written)
}

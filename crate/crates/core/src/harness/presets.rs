//! Named scenarios, stored as TOML so they read exactly like user configs.

pub const PRESET_NAMES: [&str; 4] = ["steady-decay", "2d-thm1", "1d-bounded", "perturbed-1d"];

/// Homogeneous equilibrium `u ≡ κ/μ` with `v ≡ 1`, so `v(t) = e^{−(κ/μ)t}` exactly.
const STEADY_DECAY: &str = r#"
[grid]
dim = 1
extents = [1.0]
cells = [128]

[model]
formulation = "uv"
chi = 0.8
kappa = 1.0
mu = 0.5

[initial.u]
kind = "constant"
value = 2.0

[initial.v]
kind = "constant"
value = 1.0

[time]
t_end = 5.0
cadence = 0.05

[output]
name = "steady-decay"
"#;

/// Two-dimensional run inside the boundedness region. The signal decays like
/// `e^{−2t}` down to about `e^{−40}`, so the sensitivity floor is set far below
/// that to keep the unmodified sensitivity `χ/v` in force.
const TWO_D: &str = r#"
[grid]
dim = 2
extents = [4.0, 4.0]
cells = [64, 64]

[model]
formulation = "uv"
chi = 0.8
kappa = 1.0
mu = 0.5
eta = 1e-40

[initial.u]
kind = "gaussian"
base = 0.2
amplitude = 3.0
width = 0.5

[initial.v]
kind = "cosine"
base = 1.0
amplitude = 0.5
modes = [1, 1]

[time]
t_end = 20.0
cadence = 0.05

[output]
name = "2d-thm1"
"#;

/// Strong sensitivity in one dimension over a long horizon, in log-depth form
/// since `v` falls to roughly `e^{−400}`.
const ONE_D_BOUNDED: &str = r#"
[grid]
dim = 1
extents = [10.0]
cells = [256]

[model]
formulation = "uw"
chi = 2.0
kappa = 1.0
mu = 0.25

[initial.u]
kind = "gaussian"
base = 0.5
amplitude = 4.5
width = 1.0

[initial.v]
kind = "cosine"
base = 1.0
amplitude = 0.5
modes = [2]

[time]
t_end = 100.0
cadence = 0.05

[output]
name = "1d-bounded"
"#;

/// Smooth non-homogeneous data for comparing the two formulations. The larger
/// safety factor makes the `O(dt)` part of the gap dominate its `O(h²)` part.
const PERTURBED_1D: &str = r#"
[grid]
dim = 1
extents = [1.0]
cells = [32]

[model]
formulation = "both"
chi = 0.5
kappa = 1.0
mu = 1.0

[initial.u]
kind = "cosine"
base = 1.0
amplitude = 0.5
modes = [1]

[initial.v]
kind = "cosine"
base = 1.0
amplitude = 0.3
modes = [2]

[time]
t_end = 0.25
cadence = 0.05
safety = 0.8

[compare]
levels = 3

[output]
name = "perturbed-1d"
"#;

pub fn preset_toml(name: &str) -> Option<&'static str> {
    match name {
        "steady-decay" => Some(STEADY_DECAY),
        "2d-thm1" => Some(TWO_D),
        "1d-bounded" => Some(ONE_D_BOUNDED),
        "perturbed-1d" => Some(PERTURBED_1D),
        _ => None,
    }
}

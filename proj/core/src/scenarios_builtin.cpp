#include "defalg/scenario.hpp"

// The bundled scenario documents. Anchor strings are opaque labels carried
// into reports; numeric entries are plain JSON numbers, varying entries are
// expression strings.

namespace defalg::scenario {
namespace {

const char* kSubgeodesicR2 = R"json({
  "name": "subgeodesic_r2",
  "kind": "chart",
  "anchor": "Eq (2.1)",
  "chart": {"dim": 2, "bounds": [[0.2, 1.0], [0.2, 1.0]], "samples": 32, "seed": 0},
  "metric": [[1, 0], [0, 1]],
  "recipe": {"type": "subgeodesic", "theta": [0.3, 0.1]},
  "checks": [
    {"op": "residual_2_2", "anchor": "Eq (2.2)", "tolerance": 1e-12, "bound": "upper"}
  ],
  "classification": {"anchor": "Prop 2.1", "tolerance": 1e-8, "expect": "FORMAL", "verdicted": true}
})json";

const char* kSubgeodesicRigidity = R"json({
  "name": "subgeodesic_rigidity",
  "kind": "chart",
  "anchor": "Eq (2.3)",
  "chart": {"dim": 2, "bounds": [[0.2, 1.0], [0.2, 1.0]], "samples": 32, "seed": 0},
  "metric": [[1, 0], [0, 1]],
  "recipe": {"type": "subgeodesic", "theta": [0.5, 0.2], "factor": 2},
  "checks": [
    {"op": "residual_2_2", "anchor": "Eq (2.2)", "tolerance": 1e-8, "bound": "upper"}
  ],
  "classification": {"anchor": "Prop 2.2", "tolerance": 1e-8, "verdicted": false}
})json";

const char* kConformalR2 = R"json({
  "name": "conformal_r2",
  "kind": "chart",
  "anchor": "Eq (2.1)",
  "chart": {"dim": 2, "bounds": [[0.2, 1.0], [0.2, 1.0]], "samples": 32, "seed": 0},
  "metric": [[1, 0], [0, 1]],
  "recipe": {"type": "conformal", "u": "x1"},
  "checks": [
    {"op": "route_equivalence", "anchor": "Eq (2.1)", "tolerance": 1e-6, "bound": "upper"}
  ],
  "classification": {"anchor": "Prop 2.1", "tolerance": 1e-8, "verdicted": false}
})json";

const char* kParaboloid = R"json({
  "name": "paraboloid",
  "kind": "chart",
  "anchor": "Eq (2.4)",
  "chart": {"dim": 2, "bounds": [[-0.8, 0.8], [-0.8, 0.8]], "samples": 24, "seed": 0},
  "recipe": {"type": "immersion", "components": ["x1", "x2", "(x1^2+x2^2)/2"]},
  "checks": [
    {"op": "codazzi_residual", "anchor": "Eq (2.5)", "tolerance": 1e-7, "bound": "upper"},
    {"op": "route_equivalence", "anchor": "Eq (2.4)", "tolerance": 1e-6, "bound": "upper"},
    {"op": "residual_4_1", "anchor": "Eq (4.1)", "tolerance": 1e-7, "bound": "upper"},
    {"op": "residual_4_2", "anchor": "Eq (4.2)", "tolerance": 1e-6, "bound": "upper"}
  ],
  "classification": {"anchor": "Prop 2.3", "tolerance": 1e-5, "expect": "FORMAL", "verdicted": true}
})json";

const char* kSphere = R"json({
  "name": "sphere",
  "kind": "chart",
  "anchor": "Eq (2.4)",
  "chart": {"dim": 2, "bounds": [[0.3, 2.8415926535897931], [0.2, 6.0]], "samples": 32, "seed": 0},
  "recipe": {"type": "immersion", "components": ["sin(x1)*cos(x2)", "sin(x1)*sin(x2)", "cos(x1)"]},
  "checks": [
    {"op": "umbilic_gap", "anchor": "Eq (2.4)", "tolerance": 1e-7, "bound": "upper"},
    {"op": "deformation_max", "anchor": "Eq (2.4)", "tolerance": 1e-7, "bound": "upper"},
    {"op": "route_equivalence", "anchor": "Eq (2.4)", "tolerance": 1e-6, "bound": "upper"}
  ],
  "classification": {"anchor": "Prop 2.3", "tolerance": 1e-6, "expect": "FORMAL", "verdicted": true}
})json";

const char* kEllipsoid = R"json({
  "name": "ellipsoid",
  "kind": "chart",
  "anchor": "Eq (2.4)",
  "chart": {"dim": 2, "bounds": [[0.3, 2.8415926535897931], [0.2, 6.0]], "samples": 24, "seed": 0},
  "recipe": {"type": "immersion", "components": ["sin(x1)*cos(x2)", "1.2*sin(x1)*sin(x2)", "0.8*cos(x1)"]},
  "checks": [
    {"op": "codazzi_residual", "anchor": "Eq (2.5)", "tolerance": 1e-7, "bound": "upper"},
    {"op": "route_equivalence", "anchor": "Eq (2.4)", "tolerance": 1e-6, "bound": "upper"}
  ],
  "classification": {"anchor": "Prop 2.3", "tolerance": 1e-5, "expect": "FORMAL", "verdicted": true}
})json";

const char* kSelfadjointR2 = R"json({
  "name": "selfadjoint_r2",
  "kind": "chart",
  "anchor": "Eq (2.6)",
  "chart": {"dim": 2, "bounds": [[0.2, 1.0], [0.2, 1.0]], "samples": 32, "seed": 0},
  "metric": [[1, 0], [0, 1]],
  "recipe": {"type": "selfadjoint", "j": [["1.5+0.1*sin(x1)", "0.1*x2"], ["0.1*x2", "1.2"]]},
  "checks": [
    {"op": "residual_4_1", "anchor": "Eq (4.1)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "equivalence_2_8", "anchor": "Eq (2.8)", "tolerance": 1e-8, "bound": "upper"}
  ],
  "classification": {"anchor": "Prop 2.4", "tolerance": 1e-8, "verdicted": false}
})json";

const char* kSelfadjointRecurrent = R"json({
  "name": "selfadjoint_recurrent",
  "kind": "chart",
  "anchor": "Eq (2.9)",
  "chart": {"dim": 2, "bounds": [[0.2, 1.0], [0.2, 1.0]], "samples": 32, "seed": 0},
  "metric": [[1, 0], [0, 1]],
  "recipe": {"type": "recurrent", "scale": "exp(x1)", "omega": [1, 0]},
  "checks": [
    {"op": "recurrence_gap", "anchor": "Prop 2.5", "tolerance": 1e-10, "bound": "upper"},
    {"op": "residual_2_9", "anchor": "Eq (2.9)", "tolerance": 0.5, "bound": "lower"}
  ],
  "classification": {"anchor": "Prop 2.5", "tolerance": 1e-8, "verdicted": false}
})json";

const char* kGolabR2 = R"json({
  "name": "golab_r2",
  "kind": "chart",
  "anchor": "Eq (3.1)",
  "chart": {"dim": 2, "bounds": [[0.2, 1.0], [0.2, 1.0]], "samples": 32, "seed": 0},
  "metric": [[1, 0], [0, 1]],
  "recipe": {"type": "golab", "theta": [0.4, 0.1], "f": [[1.3, 0.2], [0.2, 0.9]]},
  "checks": [
    {"op": "torsion_shape", "anchor": "Eq (3.1)", "tolerance": 1e-10, "bound": "upper"},
    {"op": "metric_compat", "anchor": "Eq (3.2)", "tolerance": 1e-8, "bound": "upper"},
    {"op": "residual_3_3", "anchor": "Eq (3.3)", "tolerance": 0.0, "bound": "lower", "verdicted": false}
  ],
  "classification": {"anchor": "Prop 3.2", "tolerance": 1e-8, "verdicted": false}
})json";

const char* kLyraR2 = R"json({
  "name": "lyra_r2",
  "kind": "chart",
  "anchor": "Eq (3.3)",
  "chart": {"dim": 2, "bounds": [[0.2, 1.0], [0.2, 1.0]], "samples": 32, "seed": 0},
  "metric": [[1, 0], [0, 1]],
  "recipe": {"type": "golab", "theta": [1, 0], "f": [[1, 0], [0, 1]]},
  "checks": [
    {"op": "torsion_shape", "anchor": "Eq (3.1)", "tolerance": 1e-10, "bound": "upper"},
    {"op": "metric_compat", "anchor": "Eq (3.2)", "tolerance": 1e-8, "bound": "upper"},
    {"op": "residual_3_3", "anchor": "Eq (3.3)", "tolerance": 1e-8, "bound": "upper"}
  ],
  "classification": {"anchor": "Eq (3.3)", "tolerance": 1e-8, "expect": "FORMAL", "verdicted": true}
})json";

const char* kSo3 = R"json({
  "name": "so3",
  "kind": "lie_algebra",
  "anchor": "Eq (3.12)",
  "algebra": {"dim": 3, "brackets": [[1, 2, 3, 1.0], [2, 3, 1, 1.0], [1, 3, 2, -1.0]], "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
  "checks": [
    {"op": "pairing_lines_1_3", "anchor": "Eq (3.13)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "pairing_line_4", "anchor": "Eq (3.13)", "tolerance": 0.5, "bound": "lower"},
    {"op": "orthogonality", "anchor": "Eq (3.14)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "torsion_identities", "anchor": "Eq (3.15)", "tolerance": 1e-15, "bound": "upper"},
    {"op": "neutral_deformation_zero", "anchor": "Eq (3.12)", "tolerance": 1e-15, "bound": "upper"},
    {"op": "verdict_equivalence", "anchor": "Prop 3.4", "tolerance": 0.5, "bound": "upper"},
    {"op": "commutativity_equivalence", "anchor": "Prop 3.6", "tolerance": 0.5, "bound": "upper"}
  ],
  "classification": {"anchor": "Eq (3.12)", "tolerance": 1e-12, "expect": ["WEAK", "WEAK", "WEAK", "WEAK", "FORMAL", "WEAK"], "verdicted": true}
})json";

const char* kAffine2d = R"json({
  "name": "affine2d",
  "kind": "lie_algebra",
  "anchor": "Eq (3.14)",
  "algebra": {"dim": 2, "brackets": [[1, 2, 2, 1.0]], "metric": [[1, 0], [0, 1]]},
  "checks": [
    {"op": "pairing_lines_1_3", "anchor": "Eq (3.13)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "pairing_line_4", "anchor": "Eq (3.13)", "tolerance": 0.0, "bound": "lower", "verdicted": false},
    {"op": "orthogonality", "anchor": "Eq (3.14)", "tolerance": 0.5, "bound": "lower"},
    {"op": "torsion_identities", "anchor": "Eq (3.15)", "tolerance": 1e-15, "bound": "upper"},
    {"op": "verdict_equivalence", "anchor": "Prop 3.4", "tolerance": 0.5, "bound": "upper"},
    {"op": "commutativity_equivalence", "anchor": "Prop 3.6", "tolerance": 0.5, "bound": "upper"}
  ],
  "classification": {"anchor": "Eq (3.12)", "tolerance": 1e-12, "verdicted": false}
})json";

const char* kHeisenberg = R"json({
  "name": "heisenberg",
  "kind": "lie_algebra",
  "anchor": "Eq (3.14)",
  "algebra": {"dim": 3, "brackets": [[1, 2, 3, 1.0]], "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
  "checks": [
    {"op": "pairing_lines_1_3", "anchor": "Eq (3.13)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "pairing_line_4", "anchor": "Eq (3.13)", "tolerance": 0.0, "bound": "lower", "verdicted": false},
    {"op": "orthogonality", "anchor": "Eq (3.14)", "tolerance": 0.5, "bound": "lower"},
    {"op": "torsion_identities", "anchor": "Eq (3.15)", "tolerance": 1e-15, "bound": "upper"},
    {"op": "verdict_equivalence", "anchor": "Prop 3.4", "tolerance": 0.5, "bound": "upper"},
    {"op": "commutativity_equivalence", "anchor": "Prop 3.6", "tolerance": 0.5, "bound": "upper"}
  ],
  "classification": {"anchor": "Eq (3.12)", "tolerance": 1e-12, "verdicted": false}
})json";

const char* kAbelian3 = R"json({
  "name": "abelian3",
  "kind": "lie_algebra",
  "anchor": "Eq (3.12)",
  "algebra": {"dim": 3, "brackets": [], "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
  "checks": [
    {"op": "pairing_lines_1_3", "anchor": "Eq (3.13)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "pairing_line_4", "anchor": "Eq (3.13)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "orthogonality", "anchor": "Eq (3.14)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "torsion_identities", "anchor": "Eq (3.15)", "tolerance": 1e-15, "bound": "upper"},
    {"op": "verdict_equivalence", "anchor": "Prop 3.4", "tolerance": 0.5, "bound": "upper"},
    {"op": "commutativity_equivalence", "anchor": "Prop 3.6", "tolerance": 0.5, "bound": "upper"}
  ],
  "classification": {"anchor": "Eq (3.12)", "tolerance": 1e-12, "expect": ["FORMAL", "FORMAL", "FORMAL", "FORMAL", "FORMAL", "FORMAL"], "verdicted": true}
})json";

const char* kKahlerFlatQ = R"json({
  "name": "kahler_flat_q",
  "kind": "chart",
  "anchor": "Eq (3.19)",
  "chart": {"dim": 4, "bounds": [[0.2, 1.0], [0.2, 1.0], [0.2, 1.0], [0.2, 1.0]], "samples": 16, "seed": 0},
  "metric": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
  "recipe": {"type": "kahler", "j": "standard", "q_entries": [[1, 1, 1, 0.7], [2, 1, 2, 0.4], [3, 2, 4, -0.3]]},
  "dstar_omega": [0.3, 0.1, 0, 0.2],
  "checks": [
    {"op": "projection_identity", "anchor": "Eq (3.19)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "projection_idempotent", "anchor": "Eq (3.19)", "tolerance": 1e-12, "bound": "upper"},
    {"op": "chern_deformation_max", "anchor": "Eq (3.21)", "tolerance": 1e-10, "bound": "upper"},
    {"op": "bismut_deformation_max", "anchor": "Eq (3.21)", "tolerance": 1e-10, "bound": "upper"},
    {"op": "residual_3_22", "anchor": "Eq (3.22)", "tolerance": 1e-10, "bound": "upper"},
    {"op": "residual_3_23", "anchor": "Eq (3.23)", "tolerance": 1e-10, "bound": "upper"},
    {"op": "residual_3_24", "anchor": "Eq (3.24)", "tolerance": 0.0, "bound": "lower", "verdicted": false},
    {"op": "residual_3_25", "anchor": "Eq (3.25)", "tolerance": 1e-15, "bound": "upper"}
  ],
  "classification": {"anchor": "Eq (3.19)", "tolerance": 1e-8, "verdicted": false}
})json";

const char* kLckR4 = R"json({
  "name": "lck_r4",
  "kind": "chart",
  "anchor": "Eq (3.21)",
  "chart": {"dim": 4, "bounds": [[0.2, 1.0], [0.2, 1.0], [0.2, 1.0], [0.2, 1.0]], "samples": 16, "seed": 0},
  "metric": [["exp(2*x1)", 0, 0, 0], [0, "exp(2*x1)", 0, 0], [0, 0, "exp(2*x1)", 0], [0, 0, 0, "exp(2*x1)"]],
  "recipe": {"type": "hermitian", "j": "standard", "connection": "bismut", "lee_form": [2, 0, 0, 0]},
  "checks": [
    {"op": "lck_residual", "anchor": "Prop 3.9", "tolerance": 1e-8, "bound": "upper"},
    {"op": "deformation_max", "anchor": "Eq (3.21)", "tolerance": 0.1, "bound": "lower"},
    {"op": "residual_3_24", "anchor": "Eq (3.24)", "tolerance": 0.0, "bound": "lower", "verdicted": false}
  ],
  "classification": {"anchor": "Prop 3.9", "tolerance": 1e-8, "expect": "WEAK", "verdicted": true}
})json";

const char* kCross3 = R"json({
  "name": "cross3",
  "kind": "chart",
  "anchor": "Ex 4.1",
  "chart": {"dim": 3, "bounds": [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]], "samples": 8, "seed": 0},
  "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
  "recipe": {"type": "cross"},
  "checks": [
    {"op": "cyclic_exact", "anchor": "Ex 4.1", "tolerance": 1e-15, "bound": "upper"},
    {"op": "norm_identity", "anchor": "Ex 4.1", "tolerance": 1e-10, "bound": "upper"}
  ],
  "classification": {"anchor": "Ex 4.1", "tolerance": 1e-12, "expect": "WEAK", "verdicted": true}
})json";

const char* kCross7 = R"json({
  "name": "cross7",
  "kind": "chart",
  "anchor": "Ex 4.1",
  "chart": {"dim": 7, "bounds": [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]], "samples": 8, "seed": 0},
  "metric": [[1, 0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 0, 1]],
  "recipe": {"type": "cross"},
  "checks": [
    {"op": "cyclic_exact", "anchor": "Ex 4.1", "tolerance": 1e-15, "bound": "upper"},
    {"op": "norm_identity", "anchor": "Ex 4.1", "tolerance": 1e-10, "bound": "upper"}
  ],
  "classification": {"anchor": "Ex 4.1", "tolerance": 1e-12, "expect": "WEAK", "verdicted": true}
})json";

const char* kEinsteinS2 = R"json({
  "name": "einstein_s2",
  "kind": "chart",
  "anchor": "Eq (4.3)",
  "chart": {"dim": 2, "bounds": [[0.3, 2.8415926535897931], [0.2, 6.0]], "samples": 48, "seed": 0},
  "metric": [[1, 0], [0, "sin(x1)^2"]],
  "recipe": {"type": "einstein", "expected_lambda": 1.0},
  "checks": [
    {"op": "einstein_lambda", "anchor": "Eq (4.3)", "tolerance": 1e-4, "bound": "upper"},
    {"op": "einstein_proportionality", "anchor": "Eq (4.3)", "tolerance": 1e-4, "bound": "upper"},
    {"op": "einstein_deformation_max", "anchor": "Eq (2.1)", "tolerance": 1e-4, "bound": "upper"},
    {"op": "ricci_codazzi", "anchor": "Eq (4.4)", "tolerance": 1e-5, "bound": "upper"}
  ]
})json";

const char* kBates = R"json({
  "name": "bates",
  "kind": "dynamics",
  "anchor": "Eq (5.1)",
  "system": "bates",
  "integrate": {"x0": [0.0, 0.5, 1.0, 0.3], "t1": 10.0, "step": 0.001, "stride": 10},
  "fit_integral": {"degree": 4, "ensemble": 8, "seed": 7, "t1": 5.0, "step": 0.001, "stride": 25},
  "fit_metric": {"degree": 2},
  "checks": [
    {"op": "drift_1", "anchor": "Eq (5.2)", "tolerance": 1e-10, "bound": "upper"},
    {"op": "drift_2", "anchor": "Eq (5.2)", "tolerance": 1e-8, "bound": "upper"},
    {"op": "integral_fit", "anchor": "Eq (5.2)", "tolerance": 1e-6, "bound": "upper"},
    {"op": "metric_fit", "anchor": "Eq (5.1)", "tolerance": 0.01, "bound": "lower"}
  ]
})json";

const char* kHalphen = R"json({
  "name": "halphen",
  "kind": "dynamics",
  "anchor": "Eq (5.3)",
  "system": "halphen",
  "integrate": {"x0": [1.0, 1.2, 0.8], "t1": 0.3, "step": 0.001, "stride": 1},
  "fit_integral": {"degree": 4, "ensemble": 20, "seed": 100, "t1": 2.0, "step": 0.001, "stride": 20},
  "fit_metric": {"degree": 1},
  "checks": [
    {"op": "finite_window", "anchor": "Eq (5.3)", "tolerance": 1000000.0, "bound": "upper"},
    {"op": "integral_fit", "anchor": "Eq (5.4)", "tolerance": 0.001, "bound": "lower"},
    {"op": "metric_fit", "anchor": "Eq (5.3)", "tolerance": 0.01, "bound": "lower"}
  ]
})json";

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> all = {
      {"subgeodesic_r2", "Eq (2.1)", kSubgeodesicR2},
      {"subgeodesic_rigidity", "Eq (2.3)", kSubgeodesicRigidity},
      {"conformal_r2", "Eq (2.1)", kConformalR2},
      {"paraboloid", "Eq (2.4)", kParaboloid},
      {"sphere", "Eq (2.4)", kSphere},
      {"ellipsoid", "Eq (2.4)", kEllipsoid},
      {"selfadjoint_r2", "Eq (2.6)", kSelfadjointR2},
      {"selfadjoint_recurrent", "Eq (2.9)", kSelfadjointRecurrent},
      {"golab_r2", "Eq (3.1)", kGolabR2},
      {"lyra_r2", "Eq (3.3)", kLyraR2},
      {"so3", "Eq (3.12)", kSo3},
      {"affine2d", "Eq (3.14)", kAffine2d},
      {"heisenberg", "Eq (3.14)", kHeisenberg},
      {"abelian3", "Eq (3.12)", kAbelian3},
      {"kahler_flat_q", "Eq (3.19)", kKahlerFlatQ},
      {"lck_r4", "Eq (3.21)", kLckR4},
      {"cross3", "Ex 4.1", kCross3},
      {"cross7", "Ex 4.1", kCross7},
      {"einstein_s2", "Eq (4.3)", kEinsteinS2},
      {"bates", "Eq (5.1)", kBates},
      {"halphen", "Eq (5.3)", kHalphen},
  };
  return all;
}

const BuiltinScenario* find_builtin(const std::string& name) {
  for (const auto& s : builtin_scenarios())
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace defalg::scenario

// Built-in models, stored as model-file documents so they load exactly like
// files on disk.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lagroid {

namespace detail {

inline constexpr std::string_view kRigidBody = R"json({
  "name": "rigid-body",
  "base": {"dim": 0, "coords": []},
  "rank": 3,
  "fiber_coords": ["y1", "y2", "y3"],
  "parameters": {"I1": 3, "I2": 2, "I3": 2},
  "structure_functions": [
    {"alpha": 1, "beta": 2, "gamma": 3, "expr": "1"},
    {"alpha": 2, "beta": 3, "gamma": 1, "expr": "1"},
    {"alpha": 3, "beta": 1, "gamma": 2, "expr": "1"}
  ],
  "anchor": [[], [], []],
  "lagrangians": {"L": "(I1*y1^2 + I2*y2^2 + I3*y3^2)/2"},
  "sections": {"xi1": ["1", "0", "0"], "xi2": ["0", "1", "0"], "xi3": ["0", "0", "1"]},
  "one_forms": {"e1": ["1", "0", "0"]},
  "functions_on_M": {"zero": "0"}
})json";

// so(3) with C^3_{12} moved to 1.1 and its mirror left at -1.
inline constexpr std::string_view kRigidBodyBroken = R"json({
  "name": "rigid-body-broken",
  "base": {"dim": 0, "coords": []},
  "rank": 3,
  "fiber_coords": ["y1", "y2", "y3"],
  "parameters": {"I1": 3, "I2": 2, "I3": 2},
  "antisymmetrize": false,
  "structure_functions": [
    {"alpha": 1, "beta": 2, "gamma": 3, "expr": "1.1"},
    {"alpha": 2, "beta": 1, "gamma": 3, "expr": "-1"},
    {"alpha": 2, "beta": 3, "gamma": 1, "expr": "1"},
    {"alpha": 3, "beta": 2, "gamma": 1, "expr": "-1"},
    {"alpha": 3, "beta": 1, "gamma": 2, "expr": "1"},
    {"alpha": 1, "beta": 3, "gamma": 2, "expr": "-1"}
  ],
  "anchor": [[], [], []],
  "lagrangians": {"L": "(I1*y1^2 + I2*y2^2 + I3*y3^2)/2"},
  "sections": {"xi1": ["1", "0", "0"], "xi2": ["0", "1", "0"], "xi3": ["0", "0", "1"]},
  "functions_on_M": {"zero": "0"}
})json";

inline constexpr std::string_view kTangentR1 = R"json({
  "name": "tangent-r1",
  "base": {"dim": 1, "coords": ["x1"]},
  "rank": 1,
  "fiber_coords": ["y1"],
  "anchor": [["1"]],
  "lagrangians": {"L": "(y1^2 - x1^2)/2", "free": "y1^2/2"},
  "sections": {"dx": ["1"], "xdx": ["x1"]},
  "one_forms": {"dx": ["1"]},
  "functions_on_M": {"zero": "0", "x": "x1"}
})json";

inline constexpr std::string_view kTangentR2 = R"json({
  "name": "tangent-r2",
  "base": {"dim": 2, "coords": ["x1", "x2"]},
  "rank": 2,
  "fiber_coords": ["y1", "y2"],
  "anchor": [["1", "0"], ["0", "1"]],
  "lagrangians": {"L": "(y1^2 + y2^2)/2", "cross": "y1*y2"},
  "sections": {"e1": ["1", "0"], "e2": ["0", "1"], "rot": ["-x2", "x1"]},
  "one_forms": {"exact": ["x1", "x2"], "curl": ["-x2", "x1"]},
  "functions_on_M": {"zero": "0"}
})json";

inline constexpr std::string_view kHarmonicPair = R"json({
  "name": "harmonic-pair",
  "base": {"dim": 2, "coords": ["x1", "x2"]},
  "rank": 2,
  "fiber_coords": ["y1", "y2"],
  "anchor": [["1", "0"], ["0", "1"]],
  "lagrangians": {"L": "(y1^2 + y2^2 - x1^2 - x2^2)/2", "L2": "y1*y2 - x1*x2"},
  "sections": {"rot": ["-x2", "x1"]},
  "functions_on_M": {"zero": "0"}
})json";

// Anchor e2 -> (1 + x1^2/2) d/dx2, so [e1, e2] = x1/(1 + x1^2/2) e2.
inline constexpr std::string_view kScaledFrame = R"json({
  "name": "scaled-frame",
  "base": {"dim": 2, "coords": ["x1", "x2"]},
  "rank": 2,
  "fiber_coords": ["y1", "y2"],
  "structure_functions": [
    {"alpha": 1, "beta": 2, "gamma": 2, "expr": "x1/(1 + x1^2/2)"}
  ],
  "anchor": [["1", "0"], ["0", "1 + x1^2/2"]],
  "lagrangians": {"L": "(1 + x1^2/4)*y1^2/2 + y2^2/2 + sin(x1)*y2 - (x1^2 + x2^2)/2"},
  "sections": {"e1": ["1", "0"], "e2": ["0", "1"]},
  "one_forms": {"e1": ["1", "0"]},
  "functions_on_M": {"zero": "0"}
})json";

inline constexpr std::array<std::pair<std::string_view, std::string_view>, 6> kCatalog = {{
    {"rigid-body", kRigidBody},
    {"rigid-body-broken", kRigidBodyBroken},
    {"tangent-r1", kTangentR1},
    {"tangent-r2", kTangentR2},
    {"harmonic-pair", kHarmonicPair},
    {"scaled-frame", kScaledFrame},
}};

}  // namespace detail

inline std::optional<std::string_view> catalog_model(std::string_view name) {
  for (const auto& [n, text] : detail::kCatalog)
    if (n == name) return text;
  return std::nullopt;
}

inline std::vector<std::string> catalog_names() {
  std::vector<std::string> v;
  for (const auto& entry : detail::kCatalog) v.emplace_back(entry.first);
  return v;
}

}  // namespace lagroid

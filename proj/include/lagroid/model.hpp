// Model files: one JSON schema that serializes an algebroid chart together
// with named Lagrangians, sections, 1-forms and base functions.
//
//   {
//     "name": "rigid-body",
//     "base": {"dim": 0, "coords": []},
//     "rank": 3,
//     "fiber_coords": ["y1", "y2", "y3"],
//     "parameters": {"I1": 3, ...},
//     "antisymmetrize": true,
//     "structure_functions": [{"alpha": 1, "beta": 2, "gamma": 3, "expr": "1"}, ...],
//     "anchor": [["..."], ...],          // rank rows of dim expressions
//     "lagrangians": {"L": "..."},
//     "sections": {"xi1": ["1", "0", "0"]},
//     "one_forms": {"e1": ["1", "0", "0"]},
//     "functions_on_M": {"zero": "0"}
//   }
//
// Indices in structure_functions are 1-based; an entry (a, b, g, e) sets
// C^g_{ab} = e and, unless "antisymmetrize" is false, C^g_{ba} = -e.
#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lagroid/catalog.hpp"
#include "lagroid/conserved.hpp"

namespace lagroid {

class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what) : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report)
      : Error("algebroid failed validation"), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct StructureEntry {
  int alpha = 0, beta = 0, gamma = 0;  // 1-based
  std::string expr;
};

struct ModelFile {
  std::string name;
  std::vector<std::string> base_coords;
  std::vector<std::string> fiber_coords;
  Parameters parameters;
  bool antisymmetrize = true;
  std::vector<StructureEntry> structure_functions;
  std::vector<std::vector<std::string>> anchor;
  std::map<std::string, std::string> lagrangians;
  std::map<std::string, std::vector<std::string>> sections;
  std::map<std::string, std::vector<std::string>> one_forms;
  std::map<std::string, std::string> functions_on_M;
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw SchemaError(path, "missing field '" + key + "'");
  return j.at(key);
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

inline std::vector<std::string> as_strings(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
  std::vector<std::string> v;
  for (std::size_t k = 0; k < j.size(); ++k) v.push_back(as_string(j[k], path + "[" + std::to_string(k) + "]"));
  return v;
}

template <class F>
void for_each_named(const json& root, const std::string& key, F&& f) {
  if (!root.contains(key)) return;
  const json& obj = root.at(key);
  if (!obj.is_object()) throw SchemaError(key, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) f(it.key(), it.value(), key + "." + it.key());
}

}  // namespace detail

inline ModelFile read_model_file(const nlohmann::json& j) {
  using detail::json;
  static const std::vector<std::string> known = {"name", "base", "rank", "fiber_coords", "parameters", "antisymmetrize",
                                                 "structure_functions", "anchor", "lagrangians", "sections",
                                                 "one_forms", "functions_on_M"};
  if (!j.is_object()) throw SchemaError("$", "model must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) throw SchemaError(it.key(), "unknown field");

  ModelFile f;
  f.name = detail::as_string(detail::require(j, "name", "$"), "name");
  const json& base = detail::require(j, "base", "$");
  int dim = detail::as_int(detail::require(base, "dim", "base"), "base.dim");
  f.base_coords = detail::as_strings(detail::require(base, "coords", "base"), "base.coords");
  if (dim < 0 || static_cast<std::size_t>(dim) != f.base_coords.size())
    throw SchemaError("base.coords", "expected " + std::to_string(dim) + " names");
  int rank = detail::as_int(detail::require(j, "rank", "$"), "rank");
  f.fiber_coords = detail::as_strings(detail::require(j, "fiber_coords", "$"), "fiber_coords");
  if (rank < 1 || static_cast<std::size_t>(rank) != f.fiber_coords.size())
    throw SchemaError("fiber_coords", "expected " + std::to_string(rank) + " names");

  if (j.contains("parameters")) {
    const json& ps = j.at("parameters");
    if (!ps.is_object()) throw SchemaError("parameters", "expected an object");
    for (auto it = ps.begin(); it != ps.end(); ++it) {
      if (!it.value().is_number()) throw SchemaError("parameters." + it.key(), "expected a number");
      f.parameters[it.key()] = it.value().get<double>();
    }
  }
  if (j.contains("antisymmetrize")) {
    if (!j.at("antisymmetrize").is_boolean()) throw SchemaError("antisymmetrize", "expected a boolean");
    f.antisymmetrize = j.at("antisymmetrize").get<bool>();
  }
  if (j.contains("structure_functions")) {
    const json& sf = j.at("structure_functions");
    if (!sf.is_array()) throw SchemaError("structure_functions", "expected an array");
    for (std::size_t k = 0; k < sf.size(); ++k) {
      std::string path = "structure_functions[" + std::to_string(k) + "]";
      StructureEntry e;
      e.alpha = detail::as_int(detail::require(sf[k], "alpha", path), path + ".alpha");
      e.beta = detail::as_int(detail::require(sf[k], "beta", path), path + ".beta");
      e.gamma = detail::as_int(detail::require(sf[k], "gamma", path), path + ".gamma");
      e.expr = detail::as_string(detail::require(sf[k], "expr", path), path + ".expr");
      for (auto [idx, field] : {std::pair{e.alpha, "alpha"}, std::pair{e.beta, "beta"}, std::pair{e.gamma, "gamma"}})
        if (idx < 1 || idx > rank) throw SchemaError(path + "." + field, "index out of range 1.." + std::to_string(rank));
      f.structure_functions.push_back(e);
    }
  }
  if (j.contains("anchor")) {
    const json& an = j.at("anchor");
    if (!an.is_array() || an.size() != static_cast<std::size_t>(rank))
      throw SchemaError("anchor", "expected " + std::to_string(rank) + " rows");
    for (std::size_t a = 0; a < an.size(); ++a) {
      std::string path = "anchor[" + std::to_string(a) + "]";
      auto row = detail::as_strings(an[a], path);
      if (row.size() != static_cast<std::size_t>(dim)) throw SchemaError(path, "expected " + std::to_string(dim) + " entries");
      f.anchor.push_back(std::move(row));
    }
  } else if (dim > 0) {
    throw SchemaError("$", "missing field 'anchor'");
  } else {
    f.anchor.assign(static_cast<std::size_t>(rank), {});
  }
  detail::for_each_named(j, "lagrangians", [&](const std::string& n, const json& v, const std::string& path) {
    f.lagrangians[n] = detail::as_string(v, path);
  });
  detail::for_each_named(j, "functions_on_M", [&](const std::string& n, const json& v, const std::string& path) {
    f.functions_on_M[n] = detail::as_string(v, path);
  });
  for (auto [key, target] : {std::pair{"sections", &f.sections}, std::pair{"one_forms", &f.one_forms}}) {
    detail::for_each_named(j, key, [&, target = target](const std::string& n, const json& v, const std::string& path) {
      auto comps = detail::as_strings(v, path);
      if (comps.size() != static_cast<std::size_t>(rank)) throw SchemaError(path, "expected " + std::to_string(rank) + " components");
      (*target)[n] = std::move(comps);
    });
  }
  return f;
}

inline nlohmann::json to_json(const ModelFile& f) {
  nlohmann::json j;
  j["name"] = f.name;
  j["base"] = {{"dim", f.base_coords.size()}, {"coords", f.base_coords}};
  j["rank"] = f.fiber_coords.size();
  j["fiber_coords"] = f.fiber_coords;
  j["parameters"] = nlohmann::json::object();
  for (const auto& [k, v] : f.parameters) j["parameters"][k] = v;
  j["antisymmetrize"] = f.antisymmetrize;
  j["structure_functions"] = nlohmann::json::array();
  for (const auto& e : f.structure_functions)
    j["structure_functions"].push_back({{"alpha", e.alpha}, {"beta", e.beta}, {"gamma", e.gamma}, {"expr", e.expr}});
  j["anchor"] = f.anchor;
  j["lagrangians"] = f.lagrangians;
  j["sections"] = f.sections;
  j["one_forms"] = f.one_forms;
  j["functions_on_M"] = f.functions_on_M;
  return j;
}

struct LoadOptions {
  Parameters overrides;  // must name declared parameters
  bool force = false;    // keep models that fail validation
  SampleDomain domain{};
  double threshold = kValidationThreshold;
};

struct Model {
  ModelFile file;
  std::shared_ptr<const LieAlgebroid> algebroid;
  std::map<std::string, Expr> lagrangians;
  std::map<std::string, Expr> functions;
  std::map<std::string, Section> sections;
  std::map<std::string, OneFormOnM> one_forms;
  ValidationReport validation;
  bool validated = false;

  Expr parse(std::string_view text) const { return algebroid->parse(text, file.parameters); }

  /// A declared Lagrangian, or an expression in the model's coordinates.
  Expr lagrangian(const std::string& name_or_expr) const {
    if (auto it = lagrangians.find(name_or_expr); it != lagrangians.end()) return it->second;
    return parse(name_or_expr);
  }

  Expr function(const std::string& name_or_expr) const {
    if (auto it = functions.find(name_or_expr); it != functions.end()) return it->second;
    Expr e = parse(name_or_expr);
    if (!algebroid->is_base_only(e)) throw Error("'" + name_or_expr + "' is not a function on the base");
    return e;
  }

  /// A declared section, or comma-separated component expressions.
  Section section(const std::string& name_or_list) const {
    if (auto it = sections.find(name_or_list); it != sections.end()) return it->second;
    return Section{components_of(name_or_list, "section")};
  }

  OneFormOnM one_form(const std::string& name_or_list) const {
    if (auto it = one_forms.find(name_or_list); it != one_forms.end()) return it->second;
    return OneFormOnM{components_of(name_or_list, "one-form")};
  }

  LagrangianSystem system(const std::string& name_or_expr) const {
    return LagrangianSystem(algebroid, lagrangian(name_or_expr));
  }

  // Source texts, for rebuilding expressions with parameters left symbolic.
  std::string lagrangian_text(const std::string& name_or_expr) const {
    auto it = file.lagrangians.find(name_or_expr);
    return it != file.lagrangians.end() ? it->second : name_or_expr;
  }
  std::string function_text(const std::string& name_or_expr) const {
    auto it = file.functions_on_M.find(name_or_expr);
    return it != file.functions_on_M.end() ? it->second : name_or_expr;
  }
  std::vector<std::string> section_text(const std::string& name_or_list) const {
    if (auto it = file.sections.find(name_or_list); it != file.sections.end()) return it->second;
    std::vector<std::string> v;
    std::stringstream ss(name_or_list);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(item);
    return v;
  }

  /// Coordinates x, y followed by one variable per parameter.
  Symbols symbolic_parameters() const {
    Symbols s = algebroid->symbols();
    for (const auto& [k, v] : file.parameters) s.declare(k);
    return s;
  }

 private:
  std::vector<Expr> components_of(const std::string& list, const char* what) const {
    std::vector<Expr> v;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      Expr e = parse(item);
      if (!algebroid->is_base_only(e)) throw Error(std::string(what) + " component '" + item + "' depends on fiber coordinates");
      v.push_back(e);
    }
    if (v.size() != static_cast<std::size_t>(algebroid->rank()))
      throw Error("'" + list + "' is neither a declared " + what + " nor a list of " + std::to_string(algebroid->rank()) +
                  " components");
    return v;
  }
};

inline Model build_model(ModelFile f, const LoadOptions& opt = {}) {
  for (const auto& [k, v] : opt.overrides) {
    auto it = f.parameters.find(k);
    if (it == f.parameters.end()) throw SchemaError("parameters." + k, "unknown parameter");
    it->second = v;
  }
  const int m = static_cast<int>(f.base_coords.size()), p = static_cast<int>(f.fiber_coords.size());
  Symbols symbols;
  try {
    for (const auto& n : f.base_coords) symbols.declare(n);
    for (const auto& n : f.fiber_coords) symbols.declare(n);
  } catch (const Error& e) {
    throw SchemaError("fiber_coords", e.what());
  }
  for (const auto& [k, v] : f.parameters)
    if (symbols.index_of(k) >= 0) throw SchemaError("parameters." + k, "shadows a coordinate");

  auto parse_at = [&](const std::string& text, const std::string& path, bool base_only) {
    Expr e;
    try {
      e = lagroid::parse(text, symbols, f.parameters);
    } catch (const ParseError& err) {
      throw SchemaError(path, err.what());
    }
    if (base_only) {
      auto s = free_slots(e);
      if (!s.empty() && *s.rbegin() >= m) throw SchemaError(path, "must depend on base coordinates only");
    }
    return e;
  };

  std::vector<Expr> C(static_cast<std::size_t>(p * p * p));
  std::vector<bool> set(C.size(), false);
  std::vector<Expr> rho(static_cast<std::size_t>(p * m));
  auto cidx = [p](int a, int b, int g) { return static_cast<std::size_t>((a * p + b) * p + g); };
  for (std::size_t k = 0; k < f.structure_functions.size(); ++k) {
    const auto& e = f.structure_functions[k];
    std::string path = "structure_functions[" + std::to_string(k) + "]";
    Expr value = parse_at(e.expr, path + ".expr", true);
    int a = e.alpha - 1, b = e.beta - 1, g = e.gamma - 1;
    if (!f.antisymmetrize) {
      if (set[cidx(a, b, g)]) throw SchemaError(path, "duplicate entry");
      C[cidx(a, b, g)] = value;
      set[cidx(a, b, g)] = true;
      continue;
    }
    if (a == b) {
      const Expr one[] = {value};
      if (max_abs_sampled(one, opt.domain, m) > opt.domain.atol)
        throw SchemaError(path, "antisymmetry: C with alpha == beta must vanish");
      continue;
    }
    if (set[cidx(a, b, g)]) {
      // the mirrored entry already fixed this slot; values must agree
      if (!equal_sampled(C[cidx(a, b, g)], value, opt.domain).passed)
        throw SchemaError(path, "antisymmetry: inconsistent with the entry for (" + std::to_string(e.beta) + "," +
                                    std::to_string(e.alpha) + "," + std::to_string(e.gamma) + ")");
      continue;
    }
    C[cidx(a, b, g)] = value;
    C[cidx(b, a, g)] = -value;
    set[cidx(a, b, g)] = set[cidx(b, a, g)] = true;
  }
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < m; ++i)
      rho[static_cast<std::size_t>(a * m + i)] =
          parse_at(f.anchor[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)],
                   "anchor[" + std::to_string(a) + "][" + std::to_string(i) + "]", true);

  Model model;
  model.algebroid = std::make_shared<const LieAlgebroid>(f.base_coords, f.fiber_coords, std::move(C), std::move(rho));
  for (const auto& [n, text] : f.lagrangians) model.lagrangians[n] = parse_at(text, "lagrangians." + n, false);
  for (const auto& [n, text] : f.functions_on_M) model.functions[n] = parse_at(text, "functions_on_M." + n, true);
  for (const auto& [n, comps] : f.sections) {
    Section s;
    for (std::size_t k = 0; k < comps.size(); ++k)
      s.components.push_back(parse_at(comps[k], "sections." + n + "[" + std::to_string(k) + "]", true));
    model.sections[n] = std::move(s);
  }
  for (const auto& [n, comps] : f.one_forms) {
    OneFormOnM w;
    for (std::size_t k = 0; k < comps.size(); ++k)
      w.components.push_back(parse_at(comps[k], "one_forms." + n + "[" + std::to_string(k) + "]", true));
    model.one_forms[n] = std::move(w);
  }

  model.validation = validate(*model.algebroid, opt.domain, opt.threshold);
  model.validated = model.validation.passed();
  model.file = std::move(f);
  if (!model.validated && !opt.force) throw ValidationFailed(model.validation);
  return model;
}

inline ModelFile parse_model_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", e.what());
  }
  return read_model_file(j);
}

/// Resolves a catalog name first, then a file path.
inline ModelFile find_model_file(std::string_view name_or_path) {
  if (auto text = catalog_model(name_or_path)) return parse_model_text(*text);
  std::ifstream in{std::string(name_or_path)};
  if (!in) throw Error("unknown model '" + std::string(name_or_path) + "' (not in the catalog and no such file)");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str());
}

inline Model load_model(std::string_view name_or_path, const LoadOptions& opt = {}) {
  return build_model(find_model_file(name_or_path), opt);
}

/// Canonical file for a built model: expressions printed after parameter
/// substitution, structure functions listed sparsely.
inline ModelFile print_model(const Model& model) {
  const auto& A = *model.algebroid;
  const int p = A.rank(), m = A.base_dim();
  ModelFile f;
  f.name = model.file.name;
  f.base_coords = model.file.base_coords;
  f.fiber_coords = model.file.fiber_coords;
  f.parameters = model.file.parameters;
  f.antisymmetrize = model.file.antisymmetrize;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int g = 0; g < p; ++g) {
        if (f.antisymmetrize && a >= b) continue;
        const Expr& c = A.structure(a, b, g);
        if (c.is_constant(0.0)) continue;
        f.structure_functions.push_back({a + 1, b + 1, g + 1, to_string(c)});
      }
  f.anchor.resize(static_cast<std::size_t>(p));
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < m; ++i) f.anchor[static_cast<std::size_t>(a)].push_back(to_string(A.anchor(a, i)));
  for (const auto& [n, e] : model.lagrangians) f.lagrangians[n] = to_string(e);
  for (const auto& [n, e] : model.functions) f.functions_on_M[n] = to_string(e);
  for (const auto& [n, s] : model.sections)
    for (const auto& c : s.components) f.sections[n].push_back(to_string(c));
  for (const auto& [n, w] : model.one_forms)
    for (const auto& c : w.components) f.one_forms[n].push_back(to_string(c));
  return f;
}

}  // namespace lagroid

#pragma once

// JSON forms of LambdaSpec, HeisModule and check results. Generators are one-based in
// JSON; all values are exact residues.
//
//   LambdaSpec: {"p", "dim", "level", "lambda0": [..], "lambda": [[i, n, value], ..]}
//   HeisModule: {"p", "dim_h", "level", "gram": [diag], "mode_window", "basis_size",
//                "actions": [{"gen", "deg", "matrix": [[..], ..]}, ..], "central": LambdaSpec}

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "heisvoa/heismod.hpp"
#include "heisvoa/quotient.hpp"
#include "heisvoa/report.hpp"

namespace heisvoa {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::int64_t get_int(const Json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw std::invalid_argument(std::string("field \"") + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

inline Fp residue(const Json& v, std::uint32_t p, const std::string& what) {
  if (!v.is_number_integer()) throw std::invalid_argument(what + " must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < 0 || x >= static_cast<std::int64_t>(p)) throw std::invalid_argument(what + " must be a residue in [0, p)");
  return Fp(static_cast<std::uint32_t>(x));
}

}  // namespace detail

inline Json to_json(const LambdaSpec& l) {
  Json j;
  j["p"] = l.p();
  j["dim"] = l.dim();
  j["level"] = l.level();
  Json l0 = Json::array();
  for (auto v : l.lambda0()) l0.push_back(v.value);
  j["lambda0"] = l0;
  Json vals = Json::array();
  for (const auto& [key, v] : l.values()) vals.push_back(Json::array({key.first + 1, key.second, v.value}));
  j["lambda"] = vals;
  return j;
}

inline LambdaSpec lambda_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("lambda spec must be a JSON object");
  const auto p = detail::get_int(j, "p");
  if (p < 2 || p >= (1ll << 31) || !is_prime(static_cast<std::uint64_t>(p))) throw std::invalid_argument("p must be a prime");
  const auto dim = detail::get_int(j, "dim");
  if (dim < 1 || dim > 64) throw std::invalid_argument("dim must be between 1 and 64");
  LambdaSpec l(static_cast<std::uint32_t>(p), static_cast<int>(dim), detail::get_int(j, "level"));
  if (j.contains("lambda0")) {
    const auto& a = j.at("lambda0");
    if (!a.is_array() || a.size() != static_cast<std::size_t>(dim)) throw std::invalid_argument("lambda0 must list dim values");
    std::vector<Fp> l0;
    for (const auto& v : a) l0.push_back(detail::residue(v, l.p(), "lambda0 entry"));
    l.set_lambda0(std::move(l0));
  }
  if (j.contains("lambda")) {
    const auto& a = j.at("lambda");
    if (!a.is_array()) throw std::invalid_argument("lambda must be an array of [i, n, value]");
    for (const auto& e : a) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw std::invalid_argument("lambda entries must be [i, n, value]");
      const auto i = e[0].get<std::int64_t>(), n = e[1].get<std::int64_t>();
      if (i < 1 || i > dim) throw std::invalid_argument("lambda generator index out of range");
      if (n < 1) throw std::invalid_argument("lambda depth must be >= 1");
      l.set(static_cast<int>(i - 1), n, detail::residue(e[2], l.p(), "lambda value"));
    }
  }
  return l;
}

inline Json to_json(const FpMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c).value);
    rows.push_back(row);
  }
  return rows;
}

inline Json to_json(const HeisModule& W) {
  Json j;
  j["p"] = W.p();
  j["dim_h"] = W.dim_h();
  j["level"] = W.level().value;
  Json g = Json::array();
  for (auto v : W.gram()) g.push_back(v.value);
  j["gram"] = g;
  j["mode_window"] = W.mode_window();
  j["basis_size"] = W.dim();
  Json acts = Json::array();
  for (const auto& [m, a] : W.actions()) acts.push_back(Json{{"gen", m.gen + 1}, {"deg", m.deg}, {"matrix", to_json(a)}});
  j["actions"] = acts;
  j["central"] = to_json(W.central());
  return j;
}

inline HeisModule module_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("module must be a JSON object");
  const auto p = detail::get_int(j, "p");
  if (p < 2 || p >= (1ll << 31) || !is_prime(static_cast<std::uint64_t>(p))) throw std::invalid_argument("p must be a prime");
  const auto P = static_cast<std::uint32_t>(p);
  const auto dim_h = detail::get_int(j, "dim_h");
  if (dim_h < 1 || dim_h > 64) throw std::invalid_argument("dim_h must be between 1 and 64");
  const auto level = detail::get_int(j, "level");
  if (level < 0 || level >= p) throw std::invalid_argument("level must be a residue in [0, p)");
  if (!j.contains("gram") || !j.at("gram").is_array() || j.at("gram").size() != static_cast<std::size_t>(dim_h))
    throw std::invalid_argument("gram must list dim_h diagonal entries");
  std::vector<Fp> gram;
  for (const auto& v : j.at("gram")) gram.push_back(detail::residue(v, P, "gram entry"));
  const auto window = detail::get_int(j, "mode_window");
  const auto size = detail::get_int(j, "basis_size");
  if (size < 0 || size > 4096) throw std::invalid_argument("basis_size must be between 0 and 4096");
  LambdaSpec central(P, static_cast<int>(dim_h), level);
  if (j.contains("central")) central = lambda_from_json(j.at("central"));
  if (central.p() != P || central.dim() != dim_h) throw std::invalid_argument("central character does not match p, dim_h");
  HeisModule W(P, static_cast<int>(dim_h), level, gram, window, static_cast<std::size_t>(size), central);
  if (!j.contains("actions") || !j.at("actions").is_array()) throw std::invalid_argument("missing actions array");
  for (const auto& a : j.at("actions")) {
    const auto gen = detail::get_int(a, "gen");
    const auto deg = detail::get_int(a, "deg");
    if (gen < 1 || gen > dim_h) throw std::invalid_argument("action generator out of range");
    const auto& rows = a.at("matrix");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(size))
      throw std::invalid_argument("action matrix must have basis_size rows");
    FpMatrix m(static_cast<std::size_t>(size), static_cast<std::size_t>(size));
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!rows[r].is_array() || rows[r].size() != m.cols()) throw std::invalid_argument("action matrix must be square");
      for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = detail::residue(rows[r][c], P, "matrix entry");
    }
    W.set_action(Mode{static_cast<int>(gen - 1), deg}, std::move(m));
  }
  return W;
}

inline Json to_json(const CheckResult& r) {
  Json j;
  j["id"] = r.id;
  j["status"] = to_string(r.status);
  j["cases"] = r.cases;
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.counterexample.empty()) {
    Json c = Json::object();
    for (const auto& [k, v] : r.counterexample) c[k] = v;
    j["counterexample"] = c;
  }
  if (!r.details.empty()) {
    Json c = Json::object();
    for (const auto& [k, v] : r.details) c[k] = v;
    j["details"] = c;
  }
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace heisvoa

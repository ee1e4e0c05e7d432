#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "heisvoa/field.hpp"
#include "heisvoa/fock.hpp"
#include "heisvoa/linalg.hpp"

namespace heisvoa {

enum class Status { pass, fail, skipped };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
  }
  return "?";
}

/// Outcome of one checker. A failing result carries the inputs and both sides of the
/// first violated identity as (name, text) pairs.
struct CheckResult {
  CheckResult() = default;
  explicit CheckResult(std::string name, Status s = Status::pass) : id(std::move(name)), status(s) {}

  std::string id;
  Status status = Status::pass;
  std::uint64_t cases = 0;
  std::string note;
  std::vector<std::pair<std::string, std::string>> counterexample;
  // Informational output of a passing check (e.g. an instability witness).
  std::vector<std::pair<std::string, std::string>> details;

  bool passed() const { return status != Status::fail; }

  void fail(std::string why, std::vector<std::pair<std::string, std::string>> payload) {
    status = Status::fail;
    note = std::move(why);
    counterexample = std::move(payload);
  }
};

inline std::string to_text(const FockVector& v) { return v.str(); }
inline std::string to_text(const FockMonomial& m) { return m.str(); }
inline std::string to_text(Fp a) { return std::to_string(a.value); }
inline std::string to_text(std::int64_t n) { return std::to_string(n); }

inline std::string to_text(const FpVector& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].value;
  os << ']';
  return os.str();
}

}  // namespace heisvoa

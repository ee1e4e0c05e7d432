#pragma once

// Text form of vectors in V(l,0).
//
//   vector   := term (('+' | '-') term)*
//   term     := integer | [integer '*'] monomial
//   monomial := '1' | factor (whitespace factor)*
//   factor   := 'u' <gen> '(' '-' <depth> ')' ['^' <exp>]
//
// Generators are one-based. A bare integer is a multiple of the vacuum. FockVector::str()
// prints in this grammar, so printed vectors parse back to themselves.

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heisvoa/fock.hpp"

namespace heisvoa {

class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t pos, const std::string& what)
      : std::invalid_argument("parse error at position " + std::to_string(pos) + ": " + what), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, const PrimeField& F, int dim) : s_(text), F_(F), dim_(dim) {}

  FockVector parse() {
    FockVector out;
    skip_ws();
    if (at_end()) throw ParseError(pos_, "empty expression");
    bool negative = false;
    if (peek() == '-' || peek() == '+') {
      negative = peek() == '-';
      ++pos_;
      skip_ws();
    }
    for (;;) {
      auto [mono, c] = term();
      out.add_term(F_, mono, negative ? F_.neg(c) : c);
      skip_ws();
      if (at_end()) break;
      if (peek() != '+' && peek() != '-') throw ParseError(pos_, "expected '+' or '-' between terms");
      negative = peek() == '-';
      ++pos_;
      skip_ws();
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) throw ParseError(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::uint64_t integer() {
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      if (v > (UINT64_MAX - 9) / 10) throw ParseError(start, "integer too large");
      v = v * 10 + static_cast<std::uint64_t>(peek() - '0');
      ++pos_;
    }
    if (pos_ == start) throw ParseError(pos_, "expected an integer");
    return v;
  }

  std::pair<FockMonomial, Fp> term() {
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      const std::uint64_t n = integer();
      const Fp c = F_(static_cast<std::int64_t>(n % F_.p()));
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        return {monomial(), c};
      }
      return {FockMonomial{}, c};
    }
    return {monomial(), F_.one()};
  }

  FockMonomial monomial() {
    if (peek() == '1') {
      ++pos_;
      return FockMonomial{};
    }
    std::vector<Factor> factors;
    factors.push_back(factor());
    for (;;) {
      const std::size_t save = pos_;
      skip_ws();
      if (peek() != 'u') {
        pos_ = save;
        break;
      }
      factors.push_back(factor());
    }
    return FockMonomial(std::move(factors));
  }

  Factor factor() {
    const std::size_t start = pos_;
    expect('u');
    const std::uint64_t gen = integer();
    if (gen < 1 || gen > static_cast<std::uint64_t>(dim_))
      throw ParseError(start + 1, "generator index must be between 1 and " + std::to_string(dim_));
    expect('(');
    expect('-');
    const std::size_t dpos = pos_;
    const std::uint64_t depth = integer();
    if (depth < 1 || depth > 1000000) throw ParseError(dpos, "depth must be between 1 and 1000000");
    expect(')');
    std::uint64_t e = 1;
    if (peek() == '^') {
      ++pos_;
      const std::size_t epos = pos_;
      e = integer();
      if (e < 1 || e > 100000) throw ParseError(epos, "exponent must be between 1 and 100000");
    }
    return Factor{static_cast<std::int64_t>(depth), static_cast<int>(gen - 1), static_cast<std::uint32_t>(e)};
  }

  std::string_view s_;
  const PrimeField& F_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FockVector parse_vector(std::string_view text, const PrimeField& F, int dim) {
  return detail::ExprParser(text, F, dim).parse();
}

}  // namespace heisvoa

#pragma once

#include <string>
#include <vector>
#include <stdexcept>

namespace ratpat {

// Simple types in spine form: params -> base.  A base type has no params.
struct SimpleType {
  std::string base;
  std::vector<SimpleType> params;

  bool is_base() const { return params.empty(); }
  std::size_t arity() const { return params.size(); }

  // Type after consuming the first n arguments.
  SimpleType result_after(std::size_t n) const {
    if (n > params.size()) throw std::logic_error("result_after: arity underflow");
    SimpleType t;
    t.base = base;
    t.params.assign(params.begin() + static_cast<std::ptrdiff_t>(n), params.end());
    return t;
  }

  friend bool operator==(const SimpleType&, const SimpleType&) = default;
};

inline SimpleType base_type(std::string name) { return SimpleType{std::move(name), {}}; }

inline SimpleType arrow_type(std::vector<SimpleType> params, std::string base) {
  return SimpleType{std::move(base), std::move(params)};
}

inline std::string show_type(const SimpleType& t) {
  std::string s;
  for (const auto& p : t.params) {
    if (p.is_base())
      s += p.base + " -> ";
    else
      s += "(" + show_type(p) + ") -> ";
  }
  s += t.base;
  return s;
}

enum class Mode { CON, REC };

inline const char* show_mode(Mode m) { return m == Mode::CON ? "con" : "rec"; }

// Error carrying a source position when one is known.
struct InputError : std::runtime_error {
  int line = 0, col = 0;
  InputError(const std::string& msg, int line_ = 0, int col_ = 0)
      : std::runtime_error(line_ > 0 ? msg + " (line " + std::to_string(line_) + ", column " +
                                           std::to_string(col_) + ")"
                                     : msg),
        line(line_), col(col_) {}
};

/// Violation of an internal invariant: an engine bug, not a user error.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace ratpat

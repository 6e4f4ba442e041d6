#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ratpat/term.hpp"

namespace ratpat {

// Typed, normalized concrete terms: a lambda prefix over a head applied to
// arguments.  Unlike the flattened representation, arguments may be deep.
struct CTerm {
  Binders binders;
  enum HeadKind { Const, Var, Meta, Rec } kind = Const;
  std::string head;
  std::vector<CTerm> args;
  friend bool operator==(const CTerm&, const CTerm&) = default;
};

// Concrete unification context: ordered definitions plus query equations,
// together with the symbol tables produced by type inference.
struct ConcreteContext {
  std::vector<std::pair<std::string, CTerm>> defs;  // body carries the lambda prefix
  std::vector<std::pair<CTerm, CTerm>> eqs;
  std::map<std::string, SimpleType> const_types;
  std::map<std::string, SimpleType> def_types;
  std::map<std::string, SimpleType> meta_types;
};

namespace detail {
inline void fv_into(const CTerm& t, std::set<std::string> bound, std::vector<std::string>& out,
                    std::set<std::string>& seen) {
  for (const auto& b : t.binders) bound.insert(b.name);
  if (t.kind == CTerm::Var) fv_var(t.head, bound, out, seen);
  for (const auto& a : t.args) fv_into(a, bound, out, seen);
}
}  // namespace detail

inline std::vector<std::string> free_vars(const CTerm& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  detail::fv_into(t, {}, out, seen);
  return out;
}

namespace detail {
inline void show(const CTerm& t, std::string& out, bool parens) {
  bool wrap = parens && (!t.binders.empty() || !t.args.empty());
  if (wrap) out += "(";
  show_binders(t.binders, out);
  out += t.head;
  for (const auto& a : t.args) {
    out += " ";
    show(a, out, true);
  }
  if (wrap) out += ")";
}
}  // namespace detail

inline std::string show_cterm(const CTerm& t) {
  std::string out;
  detail::show(t, out, false);
  return out;
}

// Capture-avoiding simultaneous renaming of free variables.
inline CTerm rename(const CTerm& t, const Renaming& m) {
  auto [bs, inner] = detail::push_binders(t.binders, m);
  CTerm out = t;
  out.binders = std::move(bs);
  if (out.kind == CTerm::Var) out.head = detail::rename_var(out.head, inner);
  for (auto& a : out.args) a = rename(a, inner);
  return out;
}

}  // namespace ratpat

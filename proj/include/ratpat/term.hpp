#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ratpat/types.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Flattened (shallow) terms.
//
// Contractive terms:  \xs. h N1 .. Nn   (h a constructor or bound variable)
//                  |  \xs. H^con ys     (pattern args)
// Recursive terms:    \xs. r ys  |  \xs. H^rec ys
//
// Arguments to recursion constants and metavariables are bare variable names
// (patterns); everything else is eta-long.
// ---------------------------------------------------------------------------

struct Binder {
  std::string name;
  SimpleType type;
  friend bool operator==(const Binder&, const Binder&) = default;
};

using Binders = std::vector<Binder>;

inline std::vector<std::string> binder_names(const Binders& bs) {
  std::vector<std::string> out;
  out.reserve(bs.size());
  for (const auto& b : bs) out.push_back(b.name);
  return out;
}

struct RecTerm {
  Binders binders;
  bool meta_head = false;  // true: recursive metavariable; false: recursion constant
  std::string head;
  std::vector<std::string> args;
  friend bool operator==(const RecTerm&, const RecTerm&) = default;
};

enum class ConHead { Const, Var, Meta };

struct ConTerm {
  Binders binders;
  ConHead kind = ConHead::Const;
  std::string head;
  std::vector<RecTerm> args;       // when kind is Const or Var
  std::vector<std::string> margs;  // when kind is Meta
  friend bool operator==(const ConTerm&, const ConTerm&) = default;
};

using Term = std::variant<ConTerm, RecTerm>;

inline bool is_con(const Term& t) { return std::holds_alternative<ConTerm>(t); }
inline const ConTerm& as_con(const Term& t) { return std::get<ConTerm>(t); }
inline const RecTerm& as_rec(const Term& t) { return std::get<RecTerm>(t); }

// An equation is an unordered pair of two contractive or two recursive terms.
struct Equation {
  Term lhs, rhs;
};

struct MetaInfo {
  Mode mode = Mode::REC;
  SimpleType type;
  std::size_t width = 0;
};

struct RecConstInfo {
  SimpleType type;
  std::size_t width = 0;
};

// Unification context: equations + closed recursive definitions + contra.
// Carries the symbol tables (metavariable/recursion-constant/variable types)
// the engine needs.
struct UnifContext {
  std::vector<Equation> eqs;
  std::map<std::string, ConTerm> defs;  // def body binders are the parameter list
  std::map<std::string, RecConstInfo> rec_info;
  std::map<std::string, MetaInfo> meta_info;
  std::map<std::string, SimpleType> var_types;
  bool contra = false;
};

// Substitution: every equation has a metavariable left-hand side with a
// pattern that covers the free variables of the (binder-free) value.
struct SubstEq {
  std::string meta;
  Mode mode = Mode::REC;
  Binders pattern;
  Term value;
};

struct Substitution {
  std::vector<SubstEq> eqs;
  std::map<std::string, ConTerm> defs;
  std::map<std::string, RecConstInfo> rec_info;
  std::map<std::string, MetaInfo> meta_info;

  const SubstEq* lookup(const std::string& meta) const {
    for (const auto& e : eqs)
      if (e.meta == meta) return &e;
    return nullptr;
  }
  std::set<std::string> domain() const {
    std::set<std::string> d;
    for (const auto& e : eqs) d.insert(e.meta);
    return d;
  }
};

// ---------------------------------------------------------------------------
// Fresh names.  Generated identifiers start with '#', which the surface
// syntax rejects, so they can never collide with user names.
// ---------------------------------------------------------------------------

class NameSupply {
 public:
  std::string fresh_rec() { return "#r" + std::to_string(++n_); }
  std::string fresh_var() { return "#v" + std::to_string(++n_); }
  std::string fresh_meta() { return "#G" + std::to_string(++n_); }

 private:
  unsigned long n_ = 0;
};

inline bool is_generated_name(const std::string& s) { return !s.empty() && s[0] == '#'; }

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

namespace detail {
inline void fv_into(const RecTerm& n, std::set<std::string>& bound, std::vector<std::string>& out,
                    std::set<std::string>& seen);

inline void fv_var(const std::string& v, const std::set<std::string>& bound,
                   std::vector<std::string>& out, std::set<std::string>& seen) {
  if (!bound.count(v) && !seen.count(v)) {
    seen.insert(v);
    out.push_back(v);
  }
}

inline void fv_into(const ConTerm& u, std::set<std::string> bound, std::vector<std::string>& out,
                    std::set<std::string>& seen) {
  for (const auto& b : u.binders) bound.insert(b.name);
  if (u.kind == ConHead::Var) fv_var(u.head, bound, out, seen);
  if (u.kind == ConHead::Meta)
    for (const auto& v : u.margs) fv_var(v, bound, out, seen);
  else
    for (const auto& n : u.args) fv_into(n, bound, out, seen);
}

inline void fv_into(const RecTerm& n, std::set<std::string>& bound, std::vector<std::string>& out,
                    std::set<std::string>& seen) {
  std::set<std::string> b = bound;
  for (const auto& bd : n.binders) b.insert(bd.name);
  for (const auto& v : n.args) fv_var(v, b, out, seen);
}
}  // namespace detail

// Free variables in order of first occurrence.
inline std::vector<std::string> free_vars(const ConTerm& u) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  detail::fv_into(u, {}, out, seen);
  return out;
}

inline std::vector<std::string> free_vars(const RecTerm& n) {
  std::vector<std::string> out;
  std::set<std::string> seen, bound;
  detail::fv_into(n, bound, out, seen);
  return out;
}

inline std::vector<std::string> free_vars(const Term& t) {
  return is_con(t) ? free_vars(as_con(t)) : free_vars(as_rec(t));
}

// ---------------------------------------------------------------------------
// Simultaneous variable renaming [to/from]M, capture-avoiding.
// ---------------------------------------------------------------------------

using Renaming = std::map<std::string, std::string>;

inline Renaming make_renaming(const std::vector<std::string>& from,
                              const std::vector<std::string>& to) {
  if (from.size() != to.size()) throw InternalError("rename: arity mismatch");
  Renaming m;
  for (std::size_t i = 0; i < from.size(); ++i) m[from[i]] = to[i];
  return m;
}

namespace detail {
inline std::string avoid_name(const std::string& base, const std::set<std::string>& taken) {
  std::string s = base;
  while (taken.count(s)) s += "'";
  return s;
}

// Drops entries shadowed by the binders and freshens any binder that would
// capture a renaming target.  Returns the adjusted binders and inner renaming.
inline std::pair<Binders, Renaming> push_binders(const Binders& bs, const Renaming& m) {
  std::set<std::string> shadowed;
  for (const auto& b : bs) shadowed.insert(b.name);
  Renaming inner;
  std::set<std::string> taken;
  for (const auto& b : bs) taken.insert(b.name);
  std::set<std::string> targets;
  for (const auto& [f, t] : m)
    if (!shadowed.count(f)) {
      inner[f] = t;
      targets.insert(t);
      taken.insert(t);
      taken.insert(f);
    }
  Binders out;
  out.reserve(bs.size());
  for (const auto& b : bs) {
    if (targets.count(b.name)) {
      std::string fresh = avoid_name(b.name, taken);
      taken.insert(fresh);
      inner[b.name] = fresh;
      out.push_back(Binder{fresh, b.type});
    } else {
      out.push_back(b);
    }
  }
  return {out, inner};
}

inline std::string rename_var(const std::string& v, const Renaming& m) {
  auto it = m.find(v);
  return it == m.end() ? v : it->second;
}
}  // namespace detail

inline RecTerm rename(const RecTerm& n, const Renaming& m) {
  auto [bs, inner] = detail::push_binders(n.binders, m);
  RecTerm out = n;
  out.binders = std::move(bs);
  for (auto& v : out.args) v = detail::rename_var(v, inner);
  return out;
}

inline ConTerm rename(const ConTerm& u, const Renaming& m) {
  auto [bs, inner] = detail::push_binders(u.binders, m);
  ConTerm out = u;
  out.binders = std::move(bs);
  if (out.kind == ConHead::Var) out.head = detail::rename_var(out.head, inner);
  if (out.kind == ConHead::Meta)
    for (auto& v : out.margs) v = detail::rename_var(v, inner);
  else
    for (auto& n : out.args) n = rename(n, inner);
  return out;
}

inline Term rename(const Term& t, const Renaming& m) {
  if (is_con(t)) return rename(as_con(t), m);
  return rename(as_rec(t), m);
}

template <class T>
T rename(const T& t, const std::vector<std::string>& from, const std::vector<std::string>& to) {
  return rename(t, make_renaming(from, to));
}

// ---------------------------------------------------------------------------
// Canonical (alpha-invariant) term keys.  Binder names are replaced by
// positional placeholders; free variables keep their names.
// ---------------------------------------------------------------------------

namespace detail {
inline void encode_var(const std::string& v, const std::map<std::string, int>& env,
                       std::string& out) {
  auto it = env.find(v);
  if (it != env.end())
    out += "$" + std::to_string(it->second);
  else
    out += v;
}

inline void encode(const RecTerm& n, std::map<std::string, int> env, int depth, std::string& out);

inline void encode(const ConTerm& u, std::map<std::string, int> env, int depth, std::string& out) {
  out += "U";
  for (const auto& b : u.binders) {
    env[b.name] = depth++;
    out += "\\";
  }
  switch (u.kind) {
    case ConHead::Const: out += "c:" + u.head; break;
    case ConHead::Var:
      out += "v:";
      encode_var(u.head, env, out);
      break;
    case ConHead::Meta: out += "m:" + u.head; break;
  }
  out += "(";
  if (u.kind == ConHead::Meta) {
    for (const auto& v : u.margs) {
      encode_var(v, env, out);
      out += ",";
    }
  } else {
    for (const auto& n : u.args) {
      encode(n, env, depth, out);
      out += ",";
    }
  }
  out += ")";
}

inline void encode(const RecTerm& n, std::map<std::string, int> env, int depth, std::string& out) {
  out += "N";
  for (const auto& b : n.binders) {
    env[b.name] = depth++;
    out += "\\";
  }
  out += (n.meta_head ? "m:" : "r:") + n.head + "(";
  for (const auto& v : n.args) {
    encode_var(v, env, out);
    out += ",";
  }
  out += ")";
}
}  // namespace detail

inline std::string term_key(const Term& t) {
  std::string out;
  if (is_con(t))
    detail::encode(as_con(t), {}, 0, out);
  else
    detail::encode(as_rec(t), {}, 0, out);
  return out;
}

inline bool alpha_equal(const Term& a, const Term& b) { return term_key(a) == term_key(b); }

// Canonical unordered equation key.
inline std::pair<std::string, std::string> equation_key(const Term& a, const Term& b) {
  std::string ka = term_key(a), kb = term_key(b);
  if (kb < ka) std::swap(ka, kb);
  return {ka, kb};
}

// ---------------------------------------------------------------------------
// Printing (surface syntax, used for traces and diagnostics)
// ---------------------------------------------------------------------------

namespace detail {
inline void show(const RecTerm& n, std::string& out, bool parens);

inline void show_binders(const Binders& bs, std::string& out) {
  for (const auto& b : bs) out += "[" + b.name + "] ";
}

inline void show(const ConTerm& u, std::string& out, bool parens) {
  bool has_args = u.kind == ConHead::Meta ? !u.margs.empty() : !u.args.empty();
  bool wrap = parens && (!u.binders.empty() || has_args);
  if (wrap) out += "(";
  show_binders(u.binders, out);
  out += u.head;
  if (u.kind == ConHead::Meta) {
    for (const auto& v : u.margs) out += " " + v;
  } else {
    for (const auto& n : u.args) {
      out += " ";
      show(n, out, true);
    }
  }
  if (wrap) out += ")";
}

inline void show(const RecTerm& n, std::string& out, bool parens) {
  bool wrap = parens && (!n.binders.empty() || !n.args.empty());
  if (wrap) out += "(";
  show_binders(n.binders, out);
  out += n.head;
  for (const auto& v : n.args) out += " " + v;
  if (wrap) out += ")";
}
}  // namespace detail

inline std::string show_term(const Term& t) {
  std::string out;
  if (is_con(t))
    detail::show(as_con(t), out, false);
  else
    detail::show(as_rec(t), out, false);
  return out;
}

inline std::string show_equation(const Equation& e) {
  return show_term(e.lhs) + " = " + show_term(e.rhs);
}

// Metavariables occurring anywhere in a context (equations and definitions).
namespace detail {
inline void metas_into(const RecTerm& n, std::set<std::string>& out) {
  if (n.meta_head) out.insert(n.head);
}
inline void metas_into(const ConTerm& u, std::set<std::string>& out) {
  if (u.kind == ConHead::Meta) out.insert(u.head);
  for (const auto& n : u.args) metas_into(n, out);
}
inline void metas_into(const Term& t, std::set<std::string>& out) {
  if (is_con(t))
    metas_into(as_con(t), out);
  else
    metas_into(as_rec(t), out);
}
}  // namespace detail

inline std::set<std::string> unification_vars(const UnifContext& ctx) {
  std::set<std::string> out;
  for (const auto& e : ctx.eqs) {
    detail::metas_into(e.lhs, out);
    detail::metas_into(e.rhs, out);
  }
  for (const auto& [r, body] : ctx.defs) detail::metas_into(body, out);
  return out;
}

// Recursion constants mentioned by a term.
namespace detail {
inline void recs_into(const RecTerm& n, std::set<std::string>& out) {
  if (!n.meta_head) out.insert(n.head);
}
inline void recs_into(const ConTerm& u, std::set<std::string>& out) {
  for (const auto& n : u.args) recs_into(n, out);
}
inline void recs_into(const Term& t, std::set<std::string>& out) {
  if (is_con(t))
    recs_into(as_con(t), out);
  else
    recs_into(as_rec(t), out);
}
}  // namespace detail

inline std::set<std::string> rec_consts(const Term& t) {
  std::set<std::string> out;
  detail::recs_into(t, out);
  return out;
}

}  // namespace ratpat

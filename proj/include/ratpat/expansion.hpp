#pragma once

#include "ratpat/concrete.hpp"
#include "ratpat/subst.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Depth-k definitional expansion.  The result is a finite tree over
// constructor/variable nodes, metavariable-application leaves, and a bottom
// marker at the depth frontier.  Expansion depends only on the definitions
// of a context, never on its equations.
// ---------------------------------------------------------------------------

struct BTerm {
  enum Kind { Bot, Node, MetaLeaf } kind = Bot;
  Binders binders;
  bool head_is_var = false;  // for Node
  std::string head;
  std::vector<BTerm> args;         // Node
  std::vector<std::string> margs;  // MetaLeaf
};

namespace detail {
inline void encode(const BTerm& b, std::map<std::string, int> env, int depth, std::string& out) {
  for (const auto& bd : b.binders) {
    env[bd.name] = depth++;
    out += "\\";
  }
  switch (b.kind) {
    case BTerm::Bot: out += "_|_"; return;
    case BTerm::MetaLeaf:
      out += "m:" + b.head + "(";
      for (const auto& v : b.margs) {
        encode_var(v, env, out);
        out += ",";
      }
      out += ")";
      return;
    case BTerm::Node:
      if (b.head_is_var) {
        out += "v:";
        encode_var(b.head, env, out);
      } else {
        out += "c:" + b.head;
      }
      out += "(";
      for (const auto& a : b.args) {
        encode(a, env, depth, out);
        out += ",";
      }
      out += ")";
      return;
  }
}

inline void show(const BTerm& b, std::string& out, bool parens) {
  bool wrap = parens && (b.kind != BTerm::Bot) && (!b.binders.empty() || !b.args.empty() ||
                                                   !b.margs.empty());
  if (wrap) out += "(";
  show_binders(b.binders, out);
  switch (b.kind) {
    case BTerm::Bot: out += "_|_"; break;
    case BTerm::MetaLeaf:
      out += b.head;
      for (const auto& v : b.margs) out += " " + v;
      break;
    case BTerm::Node:
      out += b.head;
      for (const auto& a : b.args) {
        out += " ";
        show(a, out, true);
      }
      break;
  }
  if (wrap) out += ")";
}
}  // namespace detail

inline std::string bterm_key(const BTerm& b) {
  std::string out;
  detail::encode(b, {}, 0, out);
  return out;
}

inline std::string show_bterm(const BTerm& b) {
  std::string out;
  detail::show(b, out, false);
  return out;
}

inline bool bterm_equal(const BTerm& a, const BTerm& b) { return bterm_key(a) == bterm_key(b); }

// Replaces everything below depth k by bottom (binders are free; a
// constructor/variable node consumes one depth unit).
inline BTerm truncate_bterm(const BTerm& b, int k) {
  if (k <= 0) return BTerm{};
  BTerm out = b;
  if (out.kind == BTerm::Node)
    for (auto& a : out.args) a = truncate_bterm(a, k - 1);
  return out;
}

// ---------------------------------------------------------------------------
// Expansion of flattened terms
// ---------------------------------------------------------------------------

// Unfolds one recursion-constant application: \xs. r ys with r = \zs. U
// becomes \xs. [ys/zs]U.  Contractiveness guarantees the result's head is a
// constructor, variable, or metavariable.
inline ConTerm unfold(const std::map<std::string, ConTerm>& defs, const RecTerm& n) {
  auto it = defs.find(n.head);
  if (it == defs.end()) throw InternalError("undefined recursion constant " + n.head);
  const ConTerm& body = it->second;
  if (body.binders.size() != n.args.size())
    throw InternalError("arity mismatch unfolding " + n.head);
  ConTerm inner = body;
  Binders params = inner.binders;
  inner.binders.clear();
  inner = rename(inner, make_renaming(binder_names(params), n.args));
  inner.binders.insert(inner.binders.begin(), n.binders.begin(), n.binders.end());
  return inner;
}

inline BTerm expand(const std::map<std::string, ConTerm>& defs, const Term& t, int k) {
  if (k <= 0) return BTerm{};
  if (!is_con(t)) {
    const RecTerm& n = as_rec(t);
    if (n.meta_head) {
      BTerm b;
      b.kind = BTerm::MetaLeaf;
      b.binders = n.binders;
      b.head = n.head;
      b.margs = n.args;
      return b;
    }
    return expand(defs, unfold(defs, n), k);
  }
  const ConTerm& u = as_con(t);
  if (u.kind == ConHead::Meta) {
    BTerm b;
    b.kind = BTerm::MetaLeaf;
    b.binders = u.binders;
    b.head = u.head;
    b.margs = u.margs;
    return b;
  }
  BTerm b;
  b.kind = BTerm::Node;
  b.binders = u.binders;
  b.head_is_var = u.kind == ConHead::Var;
  b.head = u.head;
  for (const auto& a : u.args) b.args.push_back(expand(defs, a, k - 1));
  return b;
}

inline BTerm expand(const UnifContext& ctx, const Term& t, int k) {
  return expand(ctx.defs, t, k);
}

// ---------------------------------------------------------------------------
// Expansion of concrete (pre-flattening) terms, for checking that
// preprocessing preserves expansions.
// ---------------------------------------------------------------------------

inline BTerm expand_concrete(const ConcreteContext& cc, const CTerm& t, int k) {
  if (k <= 0) return BTerm{};
  switch (t.kind) {
    case CTerm::Meta: {
      BTerm b;
      b.kind = BTerm::MetaLeaf;
      b.binders = t.binders;
      b.head = t.head;
      for (const auto& a : t.args) b.margs.push_back(a.head);
      return b;
    }
    case CTerm::Rec: {
      const CTerm* body = nullptr;
      for (const auto& [n, bd] : cc.defs)
        if (n == t.head) body = &bd;
      if (!body) throw InternalError("undefined recursion constant " + t.head);
      if (body->binders.size() != t.args.size())
        throw InternalError("arity mismatch unfolding " + t.head);
      CTerm inner = *body;
      Binders params = inner.binders;
      inner.binders.clear();
      std::vector<std::string> args;
      for (const auto& a : t.args) args.push_back(a.head);
      inner = rename(inner, make_renaming(binder_names(params), args));
      inner.binders.insert(inner.binders.begin(), t.binders.begin(), t.binders.end());
      return expand_concrete(cc, inner, k);
    }
    case CTerm::Const:
    case CTerm::Var: {
      BTerm b;
      b.kind = BTerm::Node;
      b.binders = t.binders;
      b.head_is_var = t.kind == CTerm::Var;
      b.head = t.head;
      for (const auto& a : t.args) b.args.push_back(expand_concrete(cc, a, k - 1));
      return b;
    }
  }
  throw InternalError("expand_concrete: bad node");
}

// ---------------------------------------------------------------------------
// Decidable equality of rational terms: compare coinductively, unfolding
// definitions on demand and assuming equality of already-visited pairs of
// recursion-constant applications (canonicalized so that "equal modulo
// variable renaming" becomes key equality).
// ---------------------------------------------------------------------------

class RationalEq {
 public:
  explicit RationalEq(const std::map<std::string, ConTerm>& defs) : defs_(defs) {}

  bool equal(const Term& a, const Term& b) {
    if (++steps_ > step_budget_) throw InternalError("equal_rational: step budget exceeded");
    Binders ba = is_con(a) ? as_con(a).binders : as_rec(a).binders;
    Binders bb = is_con(b) ? as_con(b).binders : as_rec(b).binders;
    if (ba.size() != bb.size()) return false;
    std::vector<std::string> common;
    for (std::size_t i = 0; i < ba.size(); ++i)
      common.push_back("@" + std::to_string(depth_++));
    Term a2 = strip_rename(a, common);
    Term b2 = strip_rename(b, common);

    if (!is_con(a2) && !is_con(b2)) {
      const RecTerm& na = as_rec(a2);
      const RecTerm& nb = as_rec(b2);
      if (na.meta_head != nb.meta_head) return false;
      if (na.meta_head) return na.head == nb.head && na.args == nb.args;
      std::string key = pair_key(na, nb);
      if (memo_.count(key)) return true;
      memo_.insert(key);
      return equal(unfold(defs_, na), unfold(defs_, nb));
    }
    // Unfold a lone recursive side (different sorts can meet only through
    // callers comparing across representations).
    if (!is_con(a2)) {
      const RecTerm& na = as_rec(a2);
      if (na.meta_head) return false;
      return equal(unfold(defs_, na), b2);
    }
    if (!is_con(b2)) {
      const RecTerm& nb = as_rec(b2);
      if (nb.meta_head) return false;
      return equal(a2, unfold(defs_, nb));
    }

    const ConTerm& ua = as_con(a2);
    const ConTerm& ub = as_con(b2);
    if (ua.kind == ConHead::Meta || ub.kind == ConHead::Meta)
      return ua.kind == ub.kind && ua.head == ub.head && ua.margs == ub.margs;
    if (ua.kind != ub.kind || ua.head != ub.head || ua.args.size() != ub.args.size())
      return false;
    for (std::size_t i = 0; i < ua.args.size(); ++i)
      if (!equal(ua.args[i], ub.args[i])) return false;
    return true;
  }

 private:
  static Term strip_rename(const Term& t, const std::vector<std::string>& to) {
    auto go = [&](auto term) -> Term {
      Binders params = term.binders;
      term.binders.clear();
      term = rename(term, make_renaming(binder_names(params), to));
      return term;
    };
    if (is_con(t)) return go(as_con(t));
    return go(as_rec(t));
  }

  // Joint canonicalization: both argument lists share one first-occurrence
  // numbering, so renaming-equivalent pairs produce identical keys.
  static std::string pair_key(const RecTerm& a, const RecTerm& b) {
    std::map<std::string, int> idx;
    auto enc = [&](const RecTerm& n) {
      std::string s = n.head + "(";
      for (const auto& v : n.args) {
        auto [it, fresh] = idx.emplace(v, static_cast<int>(idx.size()));
        s += std::to_string(it->second) + ",";
      }
      return s + ")";
    };
    std::string lhs = enc(a);
    return lhs + "|" + enc(b);
  }

  const std::map<std::string, ConTerm>& defs_;
  std::set<std::string> memo_;
  int depth_ = 0;
  long steps_ = 0;
  const long step_budget_ = 2000000;
};

inline bool equal_rational(const std::map<std::string, ConTerm>& defs, const Term& a,
                           const Term& b) {
  return RationalEq(defs).equal(a, b);
}

inline bool equal_rational(const UnifContext& ctx, const Term& a, const Term& b) {
  return equal_rational(ctx.defs, a, b);
}

inline bool equation_holds(const UnifContext& ctx, const Equation& e) {
  return equal_rational(ctx.defs, e.lhs, e.rhs);
}

// ---------------------------------------------------------------------------
// Substitution equality: same domains, and for each metavariable the
// eta-long values agree under the joined definition sets.
// ---------------------------------------------------------------------------

namespace detail {
// Joins d2 into d1, renaming colliding names of d2 with primes.  Returns the
// renaming applied to d2.
inline Renaming join_defs_primed(std::map<std::string, ConTerm>& d1,
                                 const std::map<std::string, ConTerm>& d2) {
  Renaming rn;
  for (const auto& [r, b] : d2)
    if (d1.count(r)) {
      std::string fresh = r + "'";
      while (d1.count(fresh) || d2.count(fresh)) fresh += "'";
      rn[r] = fresh;
    }
  for (const auto& [r, b] : d2) {
    auto it = rn.find(r);
    d1[it == rn.end() ? r : it->second] = rename_rec_consts(b, rn);
  }
  return rn;
}

inline Term wrap_pattern(const SubstEq& e) {
  if (is_con(e.value)) {
    ConTerm u = as_con(e.value);
    u.binders.insert(u.binders.begin(), e.pattern.begin(), e.pattern.end());
    return u;
  }
  RecTerm n = as_rec(e.value);
  n.binders.insert(n.binders.begin(), e.pattern.begin(), e.pattern.end());
  return n;
}
}  // namespace detail

inline bool subst_equal(const Substitution& g1, const Substitution& g2) {
  if (g1.domain() != g2.domain()) return false;
  std::map<std::string, ConTerm> defs = g1.defs;
  Renaming rn = detail::join_defs_primed(defs, g2.defs);
  RationalEq req(defs);
  for (const auto& e1 : g1.eqs) {
    const SubstEq* e2 = g2.lookup(e1.meta);
    if (!e2 || e1.mode != e2->mode || e1.pattern.size() != e2->pattern.size()) return false;
    Term v1 = detail::wrap_pattern(e1);
    Term v2 = rename_rec_consts(detail::wrap_pattern(*e2), rn);
    if (!req.equal(v1, v2)) return false;
  }
  return true;
}

}  // namespace ratpat

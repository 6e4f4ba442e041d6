#pragma once

#include "ratpat/term.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Recursion-constant renaming (used when joining contexts whose definition
// names collide).
// ---------------------------------------------------------------------------

inline RecTerm rename_rec_consts(const RecTerm& n, const Renaming& m) {
  RecTerm out = n;
  if (!out.meta_head) {
    auto it = m.find(out.head);
    if (it != m.end()) out.head = it->second;
  }
  return out;
}

inline ConTerm rename_rec_consts(const ConTerm& u, const Renaming& m) {
  ConTerm out = u;
  for (auto& n : out.args) n = rename_rec_consts(n, m);
  return out;
}

inline Term rename_rec_consts(const Term& t, const Renaming& m) {
  if (is_con(t)) return rename_rec_consts(as_con(t), m);
  return rename_rec_consts(as_rec(t), m);
}

// Merges the definitions of `extra` into `base`, renaming recursion constants
// of `extra` that collide with `base`.  Equations and symbol tables of
// `extra` are carried over under the same renaming.  Returns the renaming.
inline Renaming join_contexts(UnifContext& base, const UnifContext& extra, NameSupply& names) {
  Renaming rn;
  for (const auto& [r, body] : extra.defs)
    if (base.defs.count(r)) rn[r] = names.fresh_rec();
  auto fix = [&](const std::string& r) {
    auto it = rn.find(r);
    return it == rn.end() ? r : it->second;
  };
  for (const auto& [r, body] : extra.defs) base.defs[fix(r)] = rename_rec_consts(body, rn);
  for (const auto& [r, info] : extra.rec_info) {
    if (!base.rec_info.count(fix(r))) base.rec_info[fix(r)] = info;
  }
  for (const auto& [h, info] : extra.meta_info) base.meta_info.emplace(h, info);
  for (const auto& [v, ty] : extra.var_types) base.var_types.emplace(v, ty);
  for (const auto& e : extra.eqs)
    base.eqs.push_back(Equation{rename_rec_consts(e.lhs, rn), rename_rec_consts(e.rhs, rn)});
  base.contra = base.contra || extra.contra;
  return rn;
}

// ---------------------------------------------------------------------------
// Applying a substitution to terms.  A metavariable application H ys under
// binders xs is replaced by the instantiated value [ys/zs]V where H zs = V
// is the equation for H; everything else is mapped structurally.
// ---------------------------------------------------------------------------

inline RecTerm apply_subst(const RecTerm& n, const Substitution& g) {
  if (!n.meta_head) return n;
  const SubstEq* e = g.lookup(n.head);
  if (!e) return n;
  RecTerm v = rename(as_rec(e->value), binder_names(e->pattern), n.args);
  RecTerm out;
  out.binders = n.binders;
  out.binders.insert(out.binders.end(), v.binders.begin(), v.binders.end());
  out.meta_head = v.meta_head;
  out.head = v.head;
  out.args = v.args;
  return out;
}

inline ConTerm apply_subst(const ConTerm& u, const Substitution& g) {
  if (u.kind == ConHead::Meta) {
    const SubstEq* e = g.lookup(u.head);
    if (!e) return u;
    ConTerm v = rename(as_con(e->value), binder_names(e->pattern), u.margs);
    ConTerm out;
    out.binders = u.binders;
    out.binders.insert(out.binders.end(), v.binders.begin(), v.binders.end());
    out.kind = v.kind;
    out.head = v.head;
    out.args = v.args;
    out.margs = v.margs;
    return out;
  }
  ConTerm out = u;
  for (auto& n : out.args) n = apply_subst(n, g);
  return out;
}

inline Term apply_subst(const Term& t, const Substitution& g) {
  if (is_con(t)) return apply_subst(as_con(t), g);
  return apply_subst(as_rec(t), g);
}

inline UnifContext as_context(const Substitution& g) {
  UnifContext c;
  c.defs = g.defs;
  c.rec_info = g.rec_info;
  c.meta_info = g.meta_info;
  return c;
}

// Delta[Gamma]: join the definitions of Gamma with (suitably renamed) Delta
// and map the substitution over Delta's equations and definition bodies.
inline UnifContext apply_subst(const UnifContext& delta, const Substitution& g,
                               NameSupply& names) {
  UnifContext out = as_context(g);
  Renaming rn = join_contexts(out, delta, names);
  (void)rn;
  for (auto& e : out.eqs) {
    e.lhs = apply_subst(e.lhs, g);
    e.rhs = apply_subst(e.rhs, g);
  }
  for (auto& [r, body] : out.defs) body = apply_subst(body, g);
  return out;
}

// ---------------------------------------------------------------------------
// Composition and restriction
// ---------------------------------------------------------------------------

// compose(g1, g2): acts as g1 followed by g2 on g1's domain, and as g2
// elsewhere.
inline Substitution compose(const Substitution& g1, const Substitution& g2, NameSupply& names) {
  Substitution out;
  out.defs = g2.defs;
  out.rec_info = g2.rec_info;
  out.meta_info = g2.meta_info;
  // Join g1's definitions, renaming collisions, and carry the renaming into
  // g1's values.
  Renaming rn;
  for (const auto& [r, body] : g1.defs)
    if (out.defs.count(r)) rn[r] = names.fresh_rec();
  auto fix = [&](const std::string& r) {
    auto it = rn.find(r);
    return it == rn.end() ? r : it->second;
  };
  for (const auto& [r, body] : g1.defs)
    out.defs[fix(r)] = apply_subst(rename_rec_consts(body, rn), g2);
  for (const auto& [r, info] : g1.rec_info)
    if (!out.rec_info.count(fix(r))) out.rec_info[fix(r)] = info;
  for (const auto& [h, info] : g1.meta_info) out.meta_info.emplace(h, info);

  std::set<std::string> dom1 = g1.domain();
  for (const auto& e : g1.eqs) {
    SubstEq ne = e;
    ne.value = apply_subst(rename_rec_consts(e.value, rn), g2);
    out.eqs.push_back(std::move(ne));
  }
  for (const auto& e : g2.eqs)
    if (!dom1.count(e.meta)) out.eqs.push_back(e);
  return out;
}

inline Substitution restrict_domain(const Substitution& g, const std::set<std::string>& keep) {
  Substitution out = g;
  out.eqs.clear();
  for (const auto& e : g.eqs)
    if (keep.count(e.meta)) out.eqs.push_back(e);
  return out;
}

// Metavariables free in the values of a substitution (i.e. not instantiated
// by it).
inline std::set<std::string> value_metas(const Substitution& g) {
  std::set<std::string> out;
  for (const auto& e : g.eqs) detail::metas_into(e.value, out);
  for (const auto& [r, body] : g.defs) detail::metas_into(body, out);
  return out;
}

// Checks the substitution shape: unique metavariable left-hand sides,
// distinct pattern variables, values of the same sort with free variables
// inside the pattern, closed definitions, no contradiction marker.
inline void check_substitution(const Substitution& g) {
  std::set<std::string> lhs;
  for (const auto& e : g.eqs) {
    if (!lhs.insert(e.meta).second)
      throw InternalError("substitution: duplicate equation for " + e.meta);
    std::set<std::string> pat;
    for (const auto& b : e.pattern)
      if (!pat.insert(b.name).second)
        throw InternalError("substitution: repeated pattern variable " + b.name);
    bool sort_ok = (e.mode == Mode::CON) == is_con(e.value);
    if (!sort_ok) throw InternalError("substitution: sort mismatch for " + e.meta);
    for (const auto& v : free_vars(e.value))
      if (!pat.count(v))
        throw InternalError("substitution: value of " + e.meta + " has escaped variable " + v);
  }
  for (const auto& [r, body] : g.defs)
    if (!free_vars(body).empty()) throw InternalError("substitution: open definition " + r);
}

// ---------------------------------------------------------------------------
// Eta-long helpers
// ---------------------------------------------------------------------------

// \ws. H (ys ++ ws) where ws covers the parameters of `ty`.
inline RecTerm eta_long_meta(const std::string& meta, const std::vector<std::string>& ys,
                             const SimpleType& ty, std::size_t applied, NameSupply& names) {
  RecTerm out;
  out.meta_head = true;
  out.head = meta;
  out.args = ys;
  for (std::size_t i = applied; i < ty.params.size(); ++i) {
    std::string w = names.fresh_var();
    out.binders.push_back(Binder{w, ty.params[i]});
    out.args.push_back(w);
  }
  return out;
}

}  // namespace ratpat

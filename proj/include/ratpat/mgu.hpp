#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ratpat/expansion.hpp"
#include "ratpat/saturate.hpp"
#include "ratpat/subst.hpp"
#include "ratpat/term.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Extracting a most general unifier from a saturated, contradiction-free
// context.
//
//  1. Resolved metavariables take the witnessing partner as their value.
//  2. Unresolved metavariables are grouped into classes by the equations
//     that relate their applications; the class representative keeps an
//     identity assignment and every other member points toward it.
//  3. Chains through intermediate metavariables are collapsed by iterating
//     the non-representative part of the assignment to a fixpoint.
// ---------------------------------------------------------------------------

namespace detail {

// Binder list for a metavariable application: names from the application,
// types from the metavariable's own type.
inline Binders app_pattern(const std::vector<std::string>& args, const SimpleType& ty) {
  if (args.size() > ty.params.size())
    throw InternalError("metavariable applied beyond its arity");
  Binders p;
  for (std::size_t i = 0; i < args.size(); ++i) p.push_back(Binder{args[i], ty.params[i]});
  return p;
}

inline Term meta_app(const std::string& h, Mode mode, const std::vector<std::string>& args) {
  if (mode == Mode::REC) {
    RecTerm n;
    n.meta_head = true;
    n.head = h;
    n.args = args;
    return n;
  }
  ConTerm u;
  u.kind = ConHead::Meta;
  u.head = h;
  u.margs = args;
  return u;
}

// Prefix-free application nodes of `h`, in insertion order.
inline std::optional<std::vector<std::string>> app_args(const Term& t, const std::string& h) {
  if (is_con(t)) {
    const ConTerm& u = as_con(t);
    if (u.binders.empty() && u.kind == ConHead::Meta && u.head == h) return u.margs;
    return std::nullopt;
  }
  const RecTerm& n = as_rec(t);
  if (n.binders.empty() && n.meta_head && n.head == h) return n.args;
  return std::nullopt;
}

}  // namespace detail

// Most general unifier of a saturated context.  The definitions of the
// context are carried over unchanged; every metavariable occurring in the
// context receives an assignment.
inline Substitution unif(const UnifContext& ctx, NameSupply& names) {
  if (ctx.contra) throw InternalError("unif: context is contradictory");

  Substitution out;
  out.defs = ctx.defs;
  out.rec_info = ctx.rec_info;
  out.meta_info = ctx.meta_info;

  ClosureIndex idx = make_closure(ctx);
  std::set<std::string> metas = unification_vars(ctx);

  // Step 1: resolved metavariables.
  std::set<std::string> unresolved;
  for (const std::string& h : metas) {
    auto wit = find_resolution(idx, ctx, h);
    if (!wit) {
      unresolved.insert(h);
      continue;
    }
    const MetaInfo& info = ctx.meta_info.at(h);
    const Term& app = idx.term(wit->meta_node);
    std::vector<std::string> ys = is_con(app) ? as_con(app).margs : as_rec(app).args;
    out.eqs.push_back(
        SubstEq{h, info.mode, detail::app_pattern(ys, info.type), idx.term(wit->partner_node)});
  }

  // Step 2: classes of unresolved metavariables.  Two metavariables belong
  // to one class when some pair of their applications has been equated.
  std::map<std::string, std::string> parent;  // union-find over names
  for (const std::string& h : unresolved) parent[h] = h;
  auto root = [&](std::string x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  // User-written names beat generated ones as class representatives; ties go
  // to the lexicographically smaller name.  Keeps the result independent of
  // the order in which fresh names were minted.
  auto better = [](const std::string& a, const std::string& b) {
    if (is_generated_name(a) != is_generated_name(b)) return !is_generated_name(a);
    return a < b;
  };
  std::map<std::string, std::vector<std::pair<std::string, int>>> links;  // h -> (mate, node)
  for (const std::string& h : unresolved) {
    for (int n : idx.meta_nodes(h)) {
      for (int m : idx.members(n)) {
        if (m == n) continue;
        for (const std::string& g : unresolved) {
          if (g == h) continue;
          if (detail::app_args(idx.term(m), g)) {
            links[h].push_back({g, m});
            std::string a = root(h), b = root(g);
            if (a != b) {
              if (better(b, a)) std::swap(a, b);
              parent[b] = a;
            }
          }
        }
      }
    }
  }

  std::map<std::string, std::vector<std::string>> classes;
  for (const std::string& h : unresolved) classes[root(h)].push_back(h);

  for (auto& [rep, mem] : classes) {
    std::sort(mem.begin(), mem.end());
    const MetaInfo& rinfo = ctx.meta_info.at(rep);
    // Identity assignment for the representative.
    std::vector<std::string> rvars;
    if (!idx.meta_nodes(rep).empty()) {
      const Term& app = idx.term(idx.meta_nodes(rep).front());
      rvars = is_con(app) ? as_con(app).margs : as_rec(app).args;
    } else {
      for (std::size_t i = 0; i < rinfo.type.params.size(); ++i)
        rvars.push_back("x" + std::to_string(i + 1));
    }
    out.eqs.push_back(SubstEq{rep, rinfo.mode, detail::app_pattern(rvars, rinfo.type),
                              detail::meta_app(rep, rinfo.mode, rvars)});

    // Orient the remaining members toward the representative along the link
    // graph, so every assignment chain reaches it.
    std::map<std::string, std::string> toward;  // member -> next hop
    std::deque<std::string> bfs{rep};
    std::set<std::string> seen{rep};
    while (!bfs.empty()) {
      std::string cur = bfs.front();
      bfs.pop_front();
      for (const auto& [mate, node] : links[cur]) {
        (void)node;
        if (seen.insert(mate).second) {
          toward[mate] = cur;
          bfs.push_back(mate);
        }
      }
    }
    for (const std::string& h : mem) {
      if (h == rep) continue;
      auto it = toward.find(h);
      if (it == toward.end())
        throw InternalError("unif: no equation connects " + h + " to its class");
      const std::string& next = it->second;
      // Find an application of `h` whose class also holds an application of
      // `next`; that pair supplies pattern and value.
      bool done = false;
      for (int n : idx.meta_nodes(h)) {
        for (int m : idx.members(n)) {
          if (m == n) continue;
          auto zs = detail::app_args(idx.term(m), next);
          if (!zs) continue;
          const MetaInfo& info = ctx.meta_info.at(h);
          const Term& app = idx.term(n);
          std::vector<std::string> ys = is_con(app) ? as_con(app).margs : as_rec(app).args;
          out.eqs.push_back(SubstEq{h, info.mode, detail::app_pattern(ys, info.type),
                                    detail::meta_app(next, ctx.meta_info.at(next).mode, *zs)});
          done = true;
          break;
        }
        if (done) break;
      }
      if (!done) throw InternalError("unif: no equation connects " + h + " to " + next);
    }
  }

  // Step 3: collapse chains.  Everything except the identity assignments of
  // the class representatives is substituted away from values and
  // definition bodies.
  std::set<std::string> reps;
  for (const auto& [rep, mem] : classes) reps.insert(rep);
  Substitution repl;
  repl.meta_info = out.meta_info;
  for (const auto& e : out.eqs)
    if (!reps.count(e.meta)) repl.eqs.push_back(e);

  std::set<std::string> dom = repl.domain();
  for (int guard = 0;; ++guard) {
    if (guard > 10000) throw InternalError("unif: assignment chains do not terminate");
    bool pending = false;
    for (const std::string& h : value_metas(out))
      if (dom.count(h)) pending = true;
    if (!pending) break;
    for (auto& e : out.eqs) e.value = apply_subst(e.value, repl);
    for (auto& [r, body] : out.defs) body = apply_subst(body, repl);
  }
  (void)names;

  check_substitution(out);
  return out;
}

// Drops definitions (and their arity records) not reachable from the values
// of the substitution, and trims the metavariable table to the names still
// mentioned.
inline Substitution gc_defs(const Substitution& g) {
  std::set<std::string> live;
  std::deque<std::string> work;
  auto add = [&](const std::set<std::string>& rs) {
    for (const auto& r : rs)
      if (live.insert(r).second) work.push_back(r);
  };
  for (const auto& e : g.eqs) add(rec_consts(e.value));
  while (!work.empty()) {
    std::string r = work.front();
    work.pop_front();
    auto it = g.defs.find(r);
    if (it != g.defs.end()) add(rec_consts(Term(it->second)));
  }

  Substitution out;
  out.eqs = g.eqs;
  for (const auto& [r, body] : g.defs)
    if (live.count(r)) out.defs.emplace(r, body);
  for (const auto& [r, info] : g.rec_info)
    if (live.count(r)) out.rec_info.emplace(r, info);
  std::set<std::string> keep = g.domain();
  for (const auto& h : value_metas(g)) keep.insert(h);
  for (const auto& [h, info] : g.meta_info)
    if (keep.count(h)) out.meta_info.emplace(h, info);
  return out;
}

// Given an extracted unifier `gmgu` and a candidate unifier `g2`, produces
// the mediating substitution `gp` with  g2 = gp after gmgu  on the domain of
// g2, or reports that g2 is not an instance of gmgu.
inline Substitution mediate(const Substitution& gmgu, const Substitution& g2,
                            NameSupply& names) {
  Substitution gp;
  gp.defs = g2.defs;
  gp.rec_info = g2.rec_info;
  gp.meta_info = g2.meta_info;
  std::set<std::string> needed = value_metas(gmgu);
  for (const auto& e : g2.eqs)
    if (needed.count(e.meta)) gp.eqs.push_back(e);

  Substitution lhs = restrict_domain(compose(gmgu, gp, names), g2.domain());
  if (!subst_equal(lhs, g2))
    throw InputError("candidate substitution is not an instance of the unifier");
  return gp;
}

}  // namespace ratpat

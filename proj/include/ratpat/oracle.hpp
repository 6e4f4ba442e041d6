#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ratpat/concrete.hpp"
#include "ratpat/expansion.hpp"
#include "ratpat/flatten.hpp"
#include "ratpat/subst.hpp"
#include "ratpat/term.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Independent checking utilities: bounded verification of a unifier,
// a classical first-order unifier with occurs check, and a deterministic
// problem generator.
// ---------------------------------------------------------------------------

struct VerifyReport {
  bool ok = true;
  // First depth at which the corresponding equation fails, -1 when it holds
  // at every depth up to the bound.
  std::vector<int> failure_depth;
};

// Applies the substitution to the context and compares both sides of every
// equation by definitional expansion at each depth up to `k`.
inline VerifyReport verify_unifier(const UnifContext& delta, const Substitution& g, int k,
                                   NameSupply& names) {
  UnifContext inst = apply_subst(delta, g, names);
  VerifyReport rep;
  for (const auto& e : inst.eqs) {
    int bad = -1;
    for (int d = 1; d <= k; ++d) {
      if (!bterm_equal(expand(inst, e.lhs, d), expand(inst, e.rhs, d))) {
        bad = d;
        break;
      }
    }
    rep.failure_depth.push_back(bad);
    if (bad != -1) rep.ok = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Classical first-order unification (Robinson) with occurs check, over
// concrete terms without binders or definitions.  Metavariables must be
// nullary.
// ---------------------------------------------------------------------------

struct RobinsonResult {
  enum class Status { Unifier, OccursFail, Clash } status = Status::Unifier;
  std::map<std::string, CTerm> assign;  // fully resolved values
};

namespace detail {

class Robinson {
 public:
  // Clash is decisive only once every equation has been processed: an occurs
  // failure still binds (rationally), because a clash hiding behind it means
  // the problem has no unifier even over infinite trees.
  RobinsonResult::Status solve(const std::vector<std::pair<CTerm, CTerm>>& eqs) {
    for (const auto& [l, r] : eqs)
      if (unify(l, r) == RobinsonResult::Status::Clash) return RobinsonResult::Status::Clash;
    return occurs_failed_ ? RobinsonResult::Status::OccursFail : RobinsonResult::Status::Unifier;
  }

  std::map<std::string, CTerm> resolved() {
    std::map<std::string, CTerm> out;
    for (const auto& [h, v] : bind_) out[h] = deep(v);
    return out;
  }

 private:
  const CTerm& walk(const CTerm& t) const {
    const CTerm* cur = &t;
    while (cur->kind == CTerm::Meta) {
      auto it = bind_.find(cur->head);
      if (it == bind_.end()) break;
      cur = &it->second;
    }
    return *cur;
  }

  bool occurs(const std::string& h, const CTerm& t) const {
    std::set<const CTerm*> visited;
    return occurs(h, t, visited);
  }

  bool occurs(const std::string& h, const CTerm& t, std::set<const CTerm*>& visited) const {
    const CTerm& w = walk(t);
    if (!visited.insert(&w).second) return false;  // cycle through other metas
    if (w.kind == CTerm::Meta && w.head == h) return true;
    for (const auto& a : w.args)
      if (occurs(h, a, visited)) return true;
    return false;
  }

  RobinsonResult::Status unify(const CTerm& a0, const CTerm& b0) {
    const CTerm& a = walk(a0);
    const CTerm& b = walk(b0);
    // bindings may be cyclic after an occurs failure; identical or
    // already-visited node pairs cannot produce a new clash
    if (&a == &b || !seen_.insert({&a, &b}).second) return RobinsonResult::Status::Unifier;
    if (!a.binders.empty() || !b.binders.empty() || a.kind == CTerm::Rec ||
        b.kind == CTerm::Rec)
      throw InternalError("first-order unifier: binders and definitions not supported");
    if (a.kind == CTerm::Meta && b.kind == CTerm::Meta && a.head == b.head)
      return RobinsonResult::Status::Unifier;
    if (a.kind == CTerm::Meta) {
      if (occurs(a.head, b)) occurs_failed_ = true;
      bind_.emplace(a.head, b);
      return RobinsonResult::Status::Unifier;
    }
    if (b.kind == CTerm::Meta) return unify(b, a);
    if (a.kind != b.kind || a.head != b.head || a.args.size() != b.args.size())
      return RobinsonResult::Status::Clash;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      auto s = unify(a.args[i], b.args[i]);
      if (s != RobinsonResult::Status::Unifier) return s;
    }
    return RobinsonResult::Status::Unifier;
  }

  CTerm deep(const CTerm& t) const {
    CTerm w = walk(t);
    for (auto& a : w.args) a = deep(a);
    return w;
  }

  std::map<std::string, CTerm> bind_;
  std::set<std::pair<const CTerm*, const CTerm*>> seen_;
  bool occurs_failed_ = false;
};

}  // namespace detail

inline RobinsonResult robinson_acyclic(const ConcreteContext& cc) {
  if (!cc.defs.empty())
    throw InternalError("first-order unifier: definitions not supported");
  detail::Robinson rob;
  RobinsonResult out;
  out.status = rob.solve(cc.eqs);
  if (out.status == RobinsonResult::Status::Unifier) out.assign = rob.resolved();
  return out;
}

// Converts a first-order unifier into the flattened substitution format by
// flattening each assigned value (auxiliary definitions are introduced for
// the nested constructor structure).
inline Substitution robinson_to_subst(const ConcreteContext& cc, const RobinsonResult& r,
                                      NameSupply& names) {
  if (r.status != RobinsonResult::Status::Unifier)
    throw InternalError("no unifier to convert");
  ConcreteContext synth;
  synth.const_types = cc.const_types;
  synth.meta_types = cc.meta_types;
  std::vector<std::string> order;
  for (const auto& [h, v] : r.assign) {
    order.push_back(h);
    synth.eqs.push_back({v, v});
  }
  UnifContext flat = flatten(synth, names);

  Substitution out;
  out.defs = flat.defs;
  out.rec_info = flat.rec_info;
  out.meta_info = flat.meta_info;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::string& h = order[i];
    out.meta_info[h] = MetaInfo{Mode::REC, cc.meta_types.at(h), 0};
    out.eqs.push_back(SubstEq{h, Mode::REC, {}, flat.eqs[i].lhs});
  }
  return out;
}

// Bounded check of a first-order unifier directly on the concrete problem.
inline bool robinson_verify(const ConcreteContext& cc, const RobinsonResult& r, int k) {
  auto subst = [&](const CTerm& t, auto&& self) -> CTerm {
    if (t.kind == CTerm::Meta) {
      auto it = r.assign.find(t.head);
      if (it != r.assign.end()) return it->second;
      return t;
    }
    CTerm out = t;
    for (auto& a : out.args) a = self(a, self);
    return out;
  };
  for (const auto& [l, r0] : cc.eqs) {
    CTerm li = subst(l, subst);
    CTerm ri = subst(r0, subst);
    for (int d = 1; d <= k; ++d)
      if (!bterm_equal(expand_concrete(cc, li, d), expand_concrete(cc, ri, d))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Deterministic random problems (surface syntax text).
// ---------------------------------------------------------------------------

struct GenConfig {
  bool ho = false;         // allow binders and applied metavariables
  bool allow_defs = true;  // allow (possibly cyclic) definitions
  int n_metas = 2;
  int max_eqs = 2;
  int depth = 3;
};

namespace detail {

class ProblemGen {
 public:
  ProblemGen(const GenConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {}

  std::string run() { return cfg_.ho ? ho_problem() : fo_problem(); }

 private:
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin() { return pick(2) == 0; }

  std::string fo_problem() {
    std::string out = "i : type.\na : i.\nb : i.\nf : i -> i.\ng : i -> i -> i.\n";
    std::vector<std::string> defs;
    if (cfg_.allow_defs && coin()) {
      std::size_t nd = 1 + pick(2);
      for (std::size_t i = 0; i < nd; ++i) defs.push_back("d" + std::to_string(i + 1));
      for (std::size_t i = 0; i < nd; ++i)
        out += defs[i] + " : i = " + fo_con_headed(defs, cfg_.depth) + ".\n";
    }
    out += "?- ";
    std::size_t ne = 1 + pick(static_cast<std::size_t>(cfg_.max_eqs));
    for (std::size_t i = 0; i < ne; ++i) {
      if (i) out += "?- ";
      out += fo_term(defs, cfg_.depth) + " = " + fo_term(defs, cfg_.depth) + ".\n";
    }
    return out;
  }

  // Closed constructor-headed body; references to definitions give cycles.
  std::string fo_con_headed(const std::vector<std::string>& defs, int d) {
    switch (pick(3)) {
      case 0: return coin() ? "a" : "b";
      case 1: return "(f " + fo_atom(defs, d - 1) + ")";
      default: return "(g " + fo_atom(defs, d - 1) + " " + fo_atom(defs, d - 1) + ")";
    }
  }

  std::string fo_atom(const std::vector<std::string>& defs, int d) {
    if (!defs.empty() && pick(3) == 0) return defs[pick(defs.size())];
    if (d <= 0) return coin() ? "a" : "b";
    return fo_con_headed(defs, d);
  }

  std::string fo_term(const std::vector<std::string>& defs, int d) {
    if (d <= 0 || pick(10) < 3) {
      switch (pick(defs.empty() ? 3 : 4)) {
        case 0: return coin() ? "a" : "b";
        case 1: return "H" + std::to_string(1 + pick(static_cast<std::size_t>(cfg_.n_metas)));
        case 2: return coin() ? "b" : "a";
        default: return defs[pick(defs.size())];
      }
    }
    if (coin()) return "(f " + fo_term(defs, d - 1) + ")";
    return "(g " + fo_term(defs, d - 1) + " " + fo_term(defs, d - 1) + ")";
  }

  std::string ho_problem() {
    std::string out = "o : type.\na : o.\nf : o -> o.\ng : o -> o -> o.\nk : (o -> o) -> o.\n";
    widths_.clear();
    for (int i = 0; i < cfg_.n_metas; ++i) widths_.push_back(pick(3));
    out += "?- ";
    std::size_t ne = 1 + pick(static_cast<std::size_t>(cfg_.max_eqs));
    for (std::size_t i = 0; i < ne; ++i) {
      if (i) out += "?- ";
      std::vector<std::string> scope;
      out += ho_term(scope, cfg_.depth) + " = " + ho_term(scope, cfg_.depth) + ".\n";
    }
    return out;
  }

  std::string ho_term(std::vector<std::string>& scope, int d) {
    if (d <= 0 || pick(10) < 3) return ho_atom(scope);
    switch (pick(3)) {
      case 0: return "(f " + ho_term(scope, d - 1) + ")";
      case 1: return "(g " + ho_term(scope, d - 1) + " " + ho_term(scope, d - 1) + ")";
      default: {
        std::string x = "x" + std::to_string(++var_);
        scope.push_back(x);
        std::string body = ho_term(scope, d - 1);
        scope.pop_back();
        return "(k ([" + x + "] " + body + "))";
      }
    }
  }

  std::string ho_atom(std::vector<std::string>& scope) {
    // Try a metavariable application over distinct in-scope variables.
    std::size_t m = pick(widths_.size());
    if (pick(2) == 0 && widths_[m] <= scope.size()) {
      std::string out = "H" + std::to_string(m + 1);
      // Deterministic sample without replacement.
      std::vector<std::string> pool = scope;
      std::string app;
      for (std::size_t i = 0; i < widths_[m]; ++i) {
        std::size_t j = pick(pool.size());
        app += " " + pool[j];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
      }
      if (widths_[m] == 0) return out;
      return "(" + out + app + ")";
    }
    if (!scope.empty() && coin()) return scope[pick(scope.size())];
    return "a";
  }

  GenConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> widths_;
  unsigned var_ = 0;
};

}  // namespace detail

// Deterministic problem text for a seed: same seed, same text.
inline std::string gen_problem(const GenConfig& cfg, std::uint64_t seed) {
  return detail::ProblemGen(cfg, seed).run();
}

}  // namespace ratpat

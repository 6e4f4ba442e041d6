#pragma once

#include <deque>
#include <optional>

#include "ratpat/expansion.hpp"
#include "ratpat/flatten.hpp"
#include "ratpat/subst.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Saturation: close a flattened context under the unification rules until
// fixpoint (or contradiction).  Symmetry is implicit in unordered equations;
// transitivity is realized by a union-find over alpha-canonical term keys,
// where "the equation M = M' is present" means M and M' sit in one class.
// ---------------------------------------------------------------------------

enum class RuleId {
  U_INST,
  N_INST,
  SIMP_F1,
  SIMP_F2,
  SIMP_F3,
  SIMP,
  PROJ_F,
  IMIT,
  PROJ,
  PRUNE,
  FF_D,
  FF_S,
  REC_EXP,
  U_AGREE,
  N_AGREE,
};

// fo=true renames the shared rules to their first-order spellings.
inline std::string show_rule(RuleId r, bool fo = false) {
  switch (r) {
    case RuleId::U_INST: return "U-INST";
    case RuleId::N_INST: return "N-INST";
    case RuleId::SIMP_F1: return fo ? "SIMP-F" : "SIMP-F1";
    case RuleId::SIMP_F2: return fo ? "SIMP-F" : "SIMP-F2";
    case RuleId::SIMP_F3: return fo ? "SIMP-F" : "SIMP-F3";
    case RuleId::SIMP: return "SIMP";
    case RuleId::PROJ_F: return "PROJ-F";
    case RuleId::IMIT: return "IMIT";
    case RuleId::PROJ: return "PROJ";
    case RuleId::PRUNE: return "PRUNE";
    case RuleId::FF_D: return "FF-D";
    case RuleId::FF_S: return "FF-S";
    case RuleId::REC_EXP: return fo ? "R-EXP" : "REC-EXP";
    case RuleId::U_AGREE: return "U-AGREE";
    case RuleId::N_AGREE: return "N-AGREE";
  }
  return "?";
}

// See measure_of below; kept here so trace steps can carry their measure.
struct Measure {
  std::vector<std::size_t> a, b, c;
  friend bool operator==(const Measure&, const Measure&) = default;
};

struct TraceStep {
  int step = 0;
  RuleId rule;
  std::string premise;
  std::vector<Equation> produced_eqs;
  std::vector<std::pair<std::string, ConTerm>> produced_defs;
  bool contra = false;
  Measure measure;  // of the context right after this step
  // True when a symbol-creating rule fired although its head was already
  // resolved (flex-flex) or pruned (PRUNE) under the equation closure.  Such
  // firings add only narrower symbols and are subsumption-guarded, but they
  // do not shrink the termination measure.
  bool redundant = false;
};

struct SatConfig {
  bool ho = true;
  bool early_stop = true;
  bool reverse = false;  // LIFO worklist; perturbs the schedule
  long max_steps = 100000;
};

struct SatResult {
  UnifContext ctx;
  std::vector<TraceStep> trace;
  long steps = 0;
};

// ---------------------------------------------------------------------------
// Union-find over alpha-classes of terms
// ---------------------------------------------------------------------------

class ClosureIndex {
 public:
  int node_of(const Term& t) {
    std::string key = term_key(t);
    auto it = key2node_.find(key);
    if (it != key2node_.end()) return it->second;
    int id = static_cast<int>(terms_.size());
    terms_.push_back(t);
    parent_.push_back(id);
    members_[id] = {id};
    key2node_.emplace(std::move(key), id);
    index_app(t, id);
    return id;
  }

  std::optional<int> lookup(const Term& t) const {
    auto it = key2node_.find(term_key(t));
    if (it == key2node_.end()) return std::nullopt;
    return it->second;
  }

  int find(int i) const {
    while (parent_[i] != i) i = parent_[i];
    return i;
  }

  // Returns false when already in one class.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (members_[a].size() < members_[b].size()) std::swap(a, b);
    auto& ma = members_[a];
    auto& mb = members_[b];
    parent_[b] = a;
    ma.insert(ma.end(), mb.begin(), mb.end());
    members_.erase(b);
    return true;
  }

  const std::vector<int>& members(int i) const { return members_.at(find(i)); }
  const Term& term(int i) const { return terms_[static_cast<std::size_t>(i)]; }
  bool same(int a, int b) const { return find(a) == find(b); }
  const std::map<int, std::vector<int>>& classes() const { return members_; }

  const std::vector<int>& meta_nodes(const std::string& h) const {
    static const std::vector<int> none;
    auto it = meta_nodes_.find(h);
    return it == meta_nodes_.end() ? none : it->second;
  }
  const std::vector<int>& rec_nodes(const std::string& r) const {
    static const std::vector<int> none;
    auto it = rec_nodes_.find(r);
    return it == rec_nodes_.end() ? none : it->second;
  }

 private:
  // Tracks prefix-free metavariable and rec-const applications, the shapes
  // the status predicates quantify over.
  void index_app(const Term& t, int id) {
    if (is_con(t)) {
      const ConTerm& u = as_con(t);
      if (u.binders.empty() && u.kind == ConHead::Meta) meta_nodes_[u.head].push_back(id);
      return;
    }
    const RecTerm& n = as_rec(t);
    if (!n.binders.empty()) return;
    (n.meta_head ? meta_nodes_ : rec_nodes_)[n.head].push_back(id);
  }

  std::vector<Term> terms_;
  std::vector<int> parent_;
  std::map<int, std::vector<int>> members_;
  std::map<std::string, int> key2node_;
  std::map<std::string, std::vector<int>> meta_nodes_;
  std::map<std::string, std::vector<int>> rec_nodes_;
};

inline ClosureIndex make_closure(const UnifContext& ctx) {
  ClosureIndex idx;
  for (const auto& e : ctx.eqs) idx.unite(idx.node_of(e.lhs), idx.node_of(e.rhs));
  return idx;
}

// ---------------------------------------------------------------------------
// Status predicates
// ---------------------------------------------------------------------------

namespace detail {
inline std::set<std::string> to_set(const std::vector<std::string>& v) {
  return std::set<std::string>(v.begin(), v.end());
}
inline bool proper_subset(const std::set<std::string>& a, const std::set<std::string>& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}
inline bool subset(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}
}  // namespace detail

struct ResolutionWitness {
  int meta_node = -1;     // the H ys application
  int partner_node = -1;  // the resolving right-hand side
};

// H is resolved by an equation H ys = M where M is headed by a
// constructor/variable (resp. rec-const) with FV(M) inside ys, or by a
// same-mode metavariable applied to a strictly smaller pattern.
inline std::optional<ResolutionWitness> find_resolution(const ClosureIndex& idx,
                                                        const UnifContext& ctx,
                                                        const std::string& h) {
  Mode mode = ctx.meta_info.at(h).mode;
  for (int n : idx.meta_nodes(h)) {
    const Term& app = idx.term(n);
    std::set<std::string> ys =
        detail::to_set(is_con(app) ? as_con(app).margs : as_rec(app).args);
    for (int m : idx.members(n)) {
      if (m == n) continue;
      const Term& t = idx.term(m);
      if (mode == Mode::CON) {
        const ConTerm& u = as_con(t);
        if (u.kind == ConHead::Meta) {
          if (u.head != h && detail::proper_subset(detail::to_set(u.margs), ys))
            return ResolutionWitness{n, m};
        } else if (detail::subset(detail::to_set(free_vars(u)), ys)) {
          return ResolutionWitness{n, m};
        }
      } else {
        const RecTerm& r = as_rec(t);
        if (r.meta_head) {
          if (r.head != h && detail::proper_subset(detail::to_set(r.args), ys))
            return ResolutionWitness{n, m};
        } else if (detail::subset(detail::to_set(r.args), ys)) {
          return ResolutionWitness{n, m};
        }
      }
    }
  }
  return std::nullopt;
}

inline bool is_resolved(const ClosureIndex& idx, const UnifContext& ctx, const std::string& h) {
  return find_resolution(idx, ctx, h).has_value();
}

// r is pruned when some equation r xs = s ys has ys a proper subset of xs.
inline bool is_pruned(const ClosureIndex& idx, const std::string& r) {
  for (int n : idx.rec_nodes(r)) {
    std::set<std::string> xs = detail::to_set(as_rec(idx.term(n)).args);
    for (int m : idx.members(n)) {
      if (m == n) continue;
      const Term& t = idx.term(m);
      if (is_con(t)) continue;
      const RecTerm& s = as_rec(t);
      if (!s.meta_head && detail::proper_subset(detail::to_set(s.args), xs)) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Termination measure <A, B, C>: multisets (stored sorted descending) of the
// widths of unpruned rec-consts, unresolved CON metavariables, and unresolved
// REC metavariables.  The Dershowitz-Manna multiset order over naturals is
// the lexicographic order on the descending representations.
// ---------------------------------------------------------------------------

inline Measure measure_of(const UnifContext& ctx) {
  ClosureIndex idx = make_closure(ctx);
  Measure m;
  for (const auto& [r, info] : ctx.rec_info)
    if (!is_pruned(idx, r)) m.a.push_back(info.width);
  for (const auto& [h, info] : ctx.meta_info) {
    if (is_resolved(idx, ctx, h)) continue;
    (info.mode == Mode::CON ? m.b : m.c).push_back(info.width);
  }
  auto desc = [](std::vector<std::size_t>& v) { std::sort(v.rbegin(), v.rend()); };
  desc(m.a);
  desc(m.b);
  desc(m.c);
  return m;
}

namespace detail {
// strict multiset order (descending-sorted representation)
inline int mcmp(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] != y[i]) return x[i] < y[i] ? -1 : 1;
  }
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return 0;
}
}  // namespace detail

inline bool measure_lt(const Measure& x, const Measure& y) {
  if (int c = detail::mcmp(x.a, y.a)) return c < 0;
  if (int c = detail::mcmp(x.b, y.b)) return c < 0;
  return detail::mcmp(x.c, y.c) < 0;
}

inline bool measure_le(const Measure& x, const Measure& y) { return x == y || measure_lt(x, y); }

// True for the rules required to strictly decrease the measure.
inline bool creates_symbols(RuleId r) {
  switch (r) {
    case RuleId::IMIT:
    case RuleId::PROJ:
    case RuleId::PRUNE:
    case RuleId::FF_D:
    case RuleId::FF_S: return true;
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// The engine
// ---------------------------------------------------------------------------

class Saturator {
 public:
  Saturator(UnifContext init, NameSupply& names, SatConfig cfg)
      : ctx_(std::move(init)), names_(names), cfg_(cfg) {
    initial_eqs_ = ctx_.eqs;
    ctx_.eqs.clear();
  }

  SatResult run() {
    for (const auto& e : initial_eqs_) add_equation(e.lhs, e.rhs);
    while (!work_.empty()) {
      if (ctx_.contra && cfg_.early_stop) break;
      std::pair<int, int> p;
      if (cfg_.reverse) {
        p = work_.back();
        work_.pop_back();
      } else {
        p = work_.front();
        work_.pop_front();
      }
      if (++steps_ > cfg_.max_steps)
        throw InternalError("saturation step budget exceeded");
      process_pair(p.first, p.second);
    }
    return SatResult{std::move(ctx_), std::move(trace_), steps_};
  }

 private:
  struct AgreeEntry {
    std::vector<std::string> pat;
    Term partner;
  };

  static const Binders& binders_of(const Term& t) {
    return is_con(t) ? as_con(t).binders : as_rec(t).binders;
  }

  static Term strip_rename(const Term& t, const std::vector<std::string>& to) {
    auto go = [&](auto term) -> Term {
      Binders params = term.binders;
      term.binders.clear();
      return rename(term, make_renaming(binder_names(params), to));
    };
    return is_con(t) ? go(as_con(t)) : go(as_rec(t));
  }

  static Term meta_app(Mode mode, const std::string& h, const std::vector<std::string>& args) {
    if (mode == Mode::CON) {
      ConTerm u;
      u.kind = ConHead::Meta;
      u.head = h;
      u.margs = args;
      return u;
    }
    RecTerm n;
    n.meta_head = true;
    n.head = h;
    n.args = args;
    return n;
  }

  static Term rec_app(const std::string& r, const std::vector<std::string>& args) {
    RecTerm n;
    n.head = r;
    n.args = args;
    return n;
  }

  SimpleType pattern_var_type(const SimpleType& holder, const std::vector<std::string>& pat,
                              const std::string& v) const {
    for (std::size_t i = 0; i < pat.size(); ++i)
      if (pat[i] == v) return holder.params[i];
    throw InternalError("pattern variable " + v + " not found");
  }

  std::string term_base(const RecTerm& n) const {
    if (n.meta_head) return ctx_.meta_info.at(n.head).type.base;
    return ctx_.rec_info.at(n.head).type.base;
  }

  // --- recording -----------------------------------------------------------

  bool add_equation(const Term& l, const Term& r) {
    int a = index_.node_of(l);
    int b = index_.node_of(r);
    std::vector<int> ma, mb;
    if (index_.find(a) != index_.find(b)) {
      ma = index_.members(a);
      mb = index_.members(b);
    }
    if (!index_.unite(a, b)) return false;
    ctx_.eqs.push_back(Equation{l, r});
    for (int x : ma)
      for (int y : mb) work_.push_back({x, y});
    return true;
  }

  void record(RuleId rule, const std::string& premise, std::vector<Equation> eqs,
              std::vector<std::pair<std::string, ConTerm>> defs = {}, bool contra = false,
              bool redundant = false) {
    TraceStep s;
    s.step = static_cast<int>(trace_.size()) + 1;
    s.rule = rule;
    s.premise = premise;
    s.produced_eqs = std::move(eqs);
    s.produced_defs = std::move(defs);
    s.contra = contra;
    s.measure = measure_of(ctx_);
    s.redundant = redundant;
    trace_.push_back(std::move(s));
  }

  void fire(RuleId rule, const std::string& premise, const std::vector<Equation>& eqs,
            const std::vector<std::pair<std::string, ConTerm>>& defs = {},
            bool redundant = false) {
    for (const auto& [name, body] : defs) {
      ctx_.defs[name] = body;
      // rec_info is registered by the caller
    }
    bool changed = !defs.empty();
    for (const auto& e : eqs) changed = add_equation(e.lhs, e.rhs) || changed;
    if (changed) record(rule, premise, eqs, defs, false, redundant);
  }

  void fire_contra(RuleId rule, const std::string& premise) {
    if (ctx_.contra) return;
    ctx_.contra = true;
    record(rule, premise, {}, {}, true);
  }

  // --- rule dispatch ---------------------------------------------------------

  void process_pair(int i, int j) {
    const Term A = index_.term(i);
    const Term B = index_.term(j);
    if (is_con(A) != is_con(B)) throw InternalError("equation mixes sorts");
    const Binders& ba = binders_of(A);
    const Binders& bb = binders_of(B);
    if (ba.size() != bb.size()) throw InternalError("binder prefix length mismatch");
    std::string premise = show_term(A) + " = " + show_term(B);

    if (!ba.empty()) {
      if (!cfg_.ho) throw InternalError("first-order mode given a higher-order equation");
      inst(A, B, premise);
      return;
    }

    if (is_con(A)) {
      const ConTerm& ua = as_con(A);
      const ConTerm& ub = as_con(B);
      bool ma = ua.kind == ConHead::Meta;
      bool mb = ub.kind == ConHead::Meta;
      if (!ma && !mb) {
        simp(ua, ub, premise);
      } else if (ma && mb) {
        if (cfg_.ho) flex_flex(A, B, premise);
      } else if (cfg_.ho) {
        const ConTerm& flex = ma ? ua : ub;
        const ConTerm& rigid = ma ? ub : ua;
        flex_rigid(flex, rigid, premise);
      }
      if (cfg_.ho) {
        if (ma) agree(A, B, premise);
        if (mb) agree(B, A, premise);
      }
      return;
    }

    const RecTerm& na = as_rec(A);
    const RecTerm& nb = as_rec(B);
    if (!na.meta_head && !nb.meta_head) {
      rec_exp(na, nb, premise);
    } else if (na.meta_head && nb.meta_head) {
      if (cfg_.ho) flex_flex(A, B, premise);
    } else if (cfg_.ho) {
      const RecTerm& flex = na.meta_head ? na : nb;
      const RecTerm& rec = na.meta_head ? nb : na;
      prune(flex, rec, premise);
    }
    if (cfg_.ho) {
      if (na.meta_head) agree(A, B, premise);
      if (nb.meta_head) agree(B, A, premise);
    }
  }

  // --- U-INST / N-INST -------------------------------------------------------

  void inst(const Term& A, const Term& B, const std::string& premise) {
    const Binders& ba = binders_of(A);
    std::vector<std::string> fresh;
    for (const auto& b : ba) {
      std::string v = names_.fresh_var();
      ctx_.var_types[v] = b.type;
      fresh.push_back(v);
    }
    Term A2 = strip_rename(A, fresh);
    Term B2 = strip_rename(B, fresh);
    if (inst_subsumed(A2, B2, detail::to_set(fresh))) return;
    fire(is_con(A) ? RuleId::U_INST : RuleId::N_INST, premise, {Equation{A2, B2}});
  }

  // Does some equation instantiate the conclusion, with the fresh variables
  // mapped injectively to arbitrary variables?
  bool inst_subsumed(const Term& a, const Term& b, const std::set<std::string>& holes) {
    for (const auto& [root, mem] : index_.classes()) {
      for (int u : mem)
        for (int v : mem) {
          if (u == v) continue;
          std::map<std::string, std::string> sigma;
          std::set<std::string> used;
          if (match_holes(a, index_.term(u), holes, {}, {}, sigma, used) &&
              match_holes(b, index_.term(v), holes, {}, {}, sigma, used))
            return true;
        }
    }
    return false;
  }

  // Structural match of `pat` against `subj`: hole variables bind injectively
  // to subject variables free at their position; everything else is exact up
  // to alpha.
  static bool match_var(const std::string& x, const std::string& y,
                        const std::set<std::string>& holes, const Renaming& env,
                        const std::set<std::string>& sbound,
                        std::map<std::string, std::string>& sigma, std::set<std::string>& used) {
    if (auto it = env.find(x); it != env.end()) return it->second == y;
    if (holes.count(x)) {
      if (sbound.count(y)) return false;
      if (auto it = sigma.find(x); it != sigma.end()) return it->second == y;
      if (used.count(y)) return false;
      sigma[x] = y;
      used.insert(y);
      return true;
    }
    return x == y && !sbound.count(y);
  }

  static bool match_holes(const Term& pat, const Term& subj, const std::set<std::string>& holes,
                          Renaming env, std::set<std::string> sbound,
                          std::map<std::string, std::string>& sigma,
                          std::set<std::string>& used) {
    if (is_con(pat) != is_con(subj)) return false;
    const Binders& pb = binders_of(pat);
    const Binders& sb = binders_of(subj);
    if (pb.size() != sb.size()) return false;
    for (std::size_t i = 0; i < pb.size(); ++i) {
      env[pb[i].name] = sb[i].name;
      sbound.insert(sb[i].name);
    }
    if (is_con(pat)) {
      const ConTerm& p = as_con(pat);
      const ConTerm& s = as_con(subj);
      if (p.kind != s.kind) return false;
      if (p.kind == ConHead::Var) {
        if (!match_var(p.head, s.head, holes, env, sbound, sigma, used)) return false;
      } else if (p.head != s.head) {
        return false;
      }
      if (p.kind == ConHead::Meta) {
        if (p.margs.size() != s.margs.size()) return false;
        for (std::size_t i = 0; i < p.margs.size(); ++i)
          if (!match_var(p.margs[i], s.margs[i], holes, env, sbound, sigma, used)) return false;
        return true;
      }
      if (p.args.size() != s.args.size()) return false;
      for (std::size_t i = 0; i < p.args.size(); ++i)
        if (!match_holes(p.args[i], s.args[i], holes, env, sbound, sigma, used)) return false;
      return true;
    }
    const RecTerm& p = as_rec(pat);
    const RecTerm& s = as_rec(subj);
    if (p.meta_head != s.meta_head || p.head != s.head || p.args.size() != s.args.size())
      return false;
    for (std::size_t i = 0; i < p.args.size(); ++i)
      if (!match_var(p.args[i], s.args[i], holes, env, sbound, sigma, used)) return false;
    return true;
  }

  // --- SIMP family ---------------------------------------------------------

  void simp(const ConTerm& a, const ConTerm& b, const std::string& premise) {
    bool va = a.kind == ConHead::Var;
    bool vb = b.kind == ConHead::Var;
    if (va != vb) {
      fire_contra(RuleId::SIMP_F1, premise);
      return;
    }
    if (a.head != b.head) {
      fire_contra(va ? RuleId::SIMP_F2 : RuleId::SIMP_F3, premise);
      return;
    }
    if (a.args.size() != b.args.size()) throw InternalError("SIMP: arity mismatch");
    std::vector<Equation> eqs;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      eqs.push_back(Equation{a.args[i], b.args[i]});
    if (!eqs.empty()) fire(RuleId::SIMP, premise, eqs);
  }

  // --- PROJ-F / IMIT / PROJ --------------------------------------------------

  void flex_rigid(const ConTerm& flex, const ConTerm& rigid, const std::string& premise) {
    const std::vector<std::string>& ys = flex.margs;
    if (rigid.kind == ConHead::Var &&
        std::find(ys.begin(), ys.end(), rigid.head) == ys.end()) {
      fire_contra(RuleId::PROJ_F, premise);
      return;
    }
    if (is_resolved(index_, ctx_, flex.head)) return;
    if (imitation_subsumed(flex, rigid)) return;

    const SimpleType& hty = ctx_.meta_info.at(flex.head).type;
    ConTerm rhs;
    rhs.kind = rigid.kind;
    rhs.head = rigid.head;
    for (const auto& n : rigid.args) {
      RecTerm arg;
      arg.meta_head = true;
      arg.head = names_.fresh_meta();
      arg.args = ys;
      SimpleType gty;
      for (const auto& y : ys) gty.params.push_back(pattern_var_type(hty, ys, y));
      for (const auto& b : n.binders) {
        std::string w = names_.fresh_var();
        ctx_.var_types[w] = b.type;
        arg.binders.push_back(Binder{w, b.type});
        arg.args.push_back(w);
        gty.params.push_back(b.type);
      }
      gty.base = term_base(n);
      ctx_.meta_info[arg.head] = MetaInfo{Mode::REC, gty, arg.args.size()};
      rhs.args.push_back(std::move(arg));
    }
    fire(rigid.kind == ConHead::Var ? RuleId::PROJ : RuleId::IMIT, premise,
         {Equation{flex, rhs}});
  }

  // An equation H ys = h (\ws1. G1 ys ws1) ... already present?
  bool imitation_subsumed(const ConTerm& flex, const ConTerm& rigid) {
    auto n0 = index_.lookup(flex);
    if (!n0) return false;
    for (int m : index_.members(*n0)) {
      const Term& t = index_.term(m);
      if (is_con(t)) {
        const ConTerm& u = as_con(t);
        if (u.kind != rigid.kind || u.head != rigid.head || !u.binders.empty()) continue;
        bool ok = true;
        for (const auto& a : u.args) {
          if (!a.meta_head || a.args.size() != flex.margs.size() + a.binders.size()) {
            ok = false;
            break;
          }
          for (std::size_t i = 0; i < flex.margs.size() && ok; ++i)
            ok = a.args[i] == flex.margs[i];
          for (std::size_t i = 0; i < a.binders.size() && ok; ++i)
            ok = a.args[flex.margs.size() + i] == a.binders[i].name;
          if (!ok) break;
        }
        if (ok) return true;
      }
    }
    return false;
  }

  // --- PRUNE ----------------------------------------------------------------

  // Resolvedness against the derived equations only.  The closure index also
  // realizes transitivity, under which a freshly created metavariable can be
  // "resolved" before any resolution equation has actually been derived; the
  // pruning guard must not see those implicit resolutions or pruning is
  // permanently blocked whenever the component already contains a rec-const.
  bool resolved_in_derived(const std::string& h) const {
    auto res = [&](const Term& app, const Term& other) {
      if (is_con(app)) {
        const ConTerm& u = as_con(app);
        if (u.kind != ConHead::Meta || u.head != h || !u.binders.empty()) return false;
        std::set<std::string> ys = detail::to_set(u.margs);
        if (is_con(other)) {
          const ConTerm& v = as_con(other);
          if (!v.binders.empty()) return false;
          if (v.kind != ConHead::Meta)
            return detail::subset(detail::to_set(free_vars(other)), ys);
          return detail::proper_subset(detail::to_set(v.margs), ys);
        }
        return false;
      }
      const RecTerm& n = as_rec(app);
      if (!n.meta_head || n.head != h || !n.binders.empty()) return false;
      std::set<std::string> ys = detail::to_set(n.args);
      if (is_con(other)) return false;
      const RecTerm& m = as_rec(other);
      if (!m.binders.empty()) return false;
      if (!m.meta_head) return detail::subset(detail::to_set(m.args), ys);
      return m.head != h && detail::proper_subset(detail::to_set(m.args), ys);
    };
    for (const auto& e : ctx_.eqs)
      if (res(e.lhs, e.rhs) || res(e.rhs, e.lhs)) return true;
    return false;
  }

  void prune(const RecTerm& flex, const RecTerm& rec, const std::string& premise) {
    std::set<std::string> ys = detail::to_set(flex.args);
    std::set<std::string> xs = detail::to_set(rec.args);
    if (detail::subset(xs, ys)) return;
    if (resolved_in_derived(flex.head)) return;
    std::vector<std::string> ws;  // xs ∩ ys, in xs order
    for (const auto& x : rec.args)
      if (ys.count(x)) ws.push_back(x);
    if (prune_subsumed(flex, rec, ws)) return;

    const SimpleType& rty = ctx_.rec_info.at(rec.head).type;
    SimpleType tty;
    tty.base = rty.base;
    Binders wbs;
    for (const auto& w : ws) {
      SimpleType wt = pattern_var_type(rty, rec.args, w);
      tty.params.push_back(wt);
      wbs.push_back(Binder{w, std::move(wt)});
    }
    std::string t = names_.fresh_rec();
    std::string g = names_.fresh_meta();
    ctx_.rec_info[t] = RecConstInfo{tty, ws.size()};
    ctx_.meta_info[g] = MetaInfo{Mode::CON, tty, ws.size()};
    ConTerm body;
    body.binders = wbs;
    body.kind = ConHead::Meta;
    body.head = g;
    body.margs = ws;
    bool redundant = is_pruned(index_, rec.head);
    fire(RuleId::PRUNE, premise,
         {Equation{flex, rec_app(t, ws)}, Equation{rec, rec_app(t, ws)}}, {{t, body}},
         redundant);
  }

  bool prune_subsumed(const RecTerm& flex, const RecTerm& rec,
                      const std::vector<std::string>& ws) {
    auto nf = index_.lookup(flex);
    auto nr = index_.lookup(rec);
    if (!nf || !nr) return false;
    for (const auto& [t0, body] : ctx_.defs) {
      if (body.kind != ConHead::Meta || body.binders.size() != ws.size()) continue;
      if (body.margs != binder_names(body.binders)) continue;
      auto napp = index_.lookup(rec_app(t0, ws));
      if (!napp) continue;
      if (index_.same(*napp, *nf) && index_.same(*napp, *nr)) return true;
    }
    return false;
  }

  // --- FF-D / FF-S ------------------------------------------------------------

  void flex_flex(const Term& A, const Term& B, const std::string& premise) {
    auto head_of = [](const Term& t) {
      return is_con(t) ? as_con(t).head : as_rec(t).head;
    };
    auto args_of = [](const Term& t) {
      return is_con(t) ? as_con(t).margs : as_rec(t).args;
    };
    std::string g = head_of(A), h = head_of(B);
    std::vector<std::string> xs = args_of(A), ys = args_of(B);
    Mode mode = ctx_.meta_info.at(g).mode;
    std::vector<std::string> zs;
    RuleId rule;
    if (g == h) {
      if (xs == ys) return;
      // No resolvedness guard here: the same-metavariable rule must fire even
      // when g already has a resolution, or argument-agreement information
      // (which later enables pruning) is never propagated.
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] == ys[i]) zs.push_back(xs[i]);
      rule = RuleId::FF_S;
    } else {
      std::set<std::string> sx = detail::to_set(xs), sy = detail::to_set(ys);
      if (detail::subset(sx, sy) || detail::subset(sy, sx)) return;
      if (is_resolved(index_, ctx_, g) && is_resolved(index_, ctx_, h)) return;
      for (const auto& x : xs)
        if (sy.count(x)) zs.push_back(x);
      rule = RuleId::FF_D;
    }
    if (ff_subsumed(A, B, mode, zs)) return;

    const SimpleType& gty = ctx_.meta_info.at(g).type;
    SimpleType fty;
    fty.base = gty.base;
    for (const auto& z : zs) fty.params.push_back(pattern_var_type(gty, xs, z));
    std::string f = names_.fresh_meta();
    ctx_.meta_info[f] = MetaInfo{mode, fty, zs.size()};
    Term fapp = meta_app(mode, f, zs);
    bool redundant = rule == RuleId::FF_S && is_resolved(index_, ctx_, g);
    fire(rule, premise, {Equation{A, fapp}, Equation{B, fapp}}, {}, redundant);
  }

  // A common F zs already equated to both sides?
  bool ff_subsumed(const Term& A, const Term& B, Mode mode, const std::vector<std::string>& zs) {
    auto na = index_.lookup(A);
    auto nb = index_.lookup(B);
    if (!na || !nb) return false;
    auto candidates = [&](int n) {
      std::set<std::string> out;
      for (int m : index_.members(n)) {
        const Term& t = index_.term(m);
        if (is_con(t)) {
          const ConTerm& u = as_con(t);
          if (u.kind == ConHead::Meta && u.binders.empty() && u.margs == zs) out.insert(u.head);
        } else {
          const RecTerm& r = as_rec(t);
          if (r.meta_head && r.binders.empty() && r.args == zs) out.insert(r.head);
        }
      }
      return out;
    };
    std::set<std::string> ca = candidates(*na);
    if (ca.empty()) return false;
    std::set<std::string> cb = candidates(*nb);
    for (const auto& f : ca)
      if (cb.count(f) && ctx_.meta_info.at(f).mode == mode) return true;
    return false;
  }

  // --- REC-EXP ---------------------------------------------------------------

  void rec_exp(const RecTerm& a, const RecTerm& b, const std::string& premise) {
    fire(RuleId::REC_EXP, premise, {Equation{unfold(ctx_.defs, a), unfold(ctx_.defs, b)}});
  }

  // --- U-AGREE / N-AGREE -------------------------------------------------------

  void agree(const Term& metaApp, const Term& partner, const std::string& premise) {
    bool con = is_con(metaApp);
    std::string h = con ? as_con(metaApp).head : as_rec(metaApp).head;
    std::vector<std::string> pat = con ? as_con(metaApp).margs : as_rec(metaApp).args;
    RuleId rule = con ? RuleId::U_AGREE : RuleId::N_AGREE;

    bool new_ok = detail::subset(detail::to_set(free_vars(partner)), detail::to_set(pat));
    auto& entries = agree_[h];
    if (new_ok) {
      std::vector<AgreeEntry> olds = entries;
      for (const auto& e : olds) {
        if (!detail::subset(detail::to_set(free_vars(e.partner)), detail::to_set(e.pat)))
          continue;
        std::string prem2 = premise + " ; " + show_term(meta_app(con ? Mode::CON : Mode::REC, h,
                                                                 e.pat)) +
                            " = " + show_term(e.partner);
        fire(rule, prem2, {Equation{partner, rename(e.partner, make_renaming(e.pat, pat))}});
        fire(rule, prem2, {Equation{e.partner, rename(partner, make_renaming(pat, e.pat))}});
      }
    }
    agree_[h].push_back(AgreeEntry{std::move(pat), partner});
  }

  UnifContext ctx_;
  NameSupply& names_;
  SatConfig cfg_;
  std::vector<Equation> initial_eqs_;
  ClosureIndex index_;
  std::deque<std::pair<int, int>> work_;
  std::map<std::string, std::vector<AgreeEntry>> agree_;
  std::vector<TraceStep> trace_;
  long steps_ = 0;
};

inline SatResult saturate(const UnifContext& ctx, NameSupply& names, SatConfig cfg = {}) {
  return Saturator(ctx, names, cfg).run();
}

}  // namespace ratpat

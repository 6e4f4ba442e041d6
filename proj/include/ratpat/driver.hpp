#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratpat/elab.hpp"
#include "ratpat/mgu.hpp"
#include "ratpat/oracle.hpp"
#include "ratpat/saturate.hpp"
#include "ratpat/surface.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// End-to-end driver: parse, type, flatten, saturate, extract, render.
// ---------------------------------------------------------------------------

enum class ModeOpt { Auto, FirstOrder, HigherOrder };

struct RunConfig {
  ModeOpt mode = ModeOpt::Auto;
  bool trace = false;
  bool json = false;
  int check_depth = 0;  // 0 disables the expansion check
  long max_steps = 100000;
};

struct RunResult {
  int code = 0;  // 0 unifier, 1 no unifier, 2 input error, 3 internal error
  std::string out;
  std::string err;
};

namespace detail {

inline bool cterm_first_order(const CTerm& t) {
  if (!t.binders.empty()) return false;
  for (const auto& a : t.args)
    if (!cterm_first_order(a)) return false;
  return true;
}

// A problem is first-order when nothing binds a variable and every
// metavariable and definition is of base type.
inline bool first_order(const ConcreteContext& cc) {
  for (const auto& [d, body] : cc.defs)
    if (!cterm_first_order(body)) return false;
  for (const auto& [l, r] : cc.eqs)
    if (!cterm_first_order(l) || !cterm_first_order(r)) return false;
  for (const auto& [m, ty] : cc.meta_types)
    if (!ty.is_base()) return false;
  for (const auto& [d, ty] : cc.def_types)
    if (!ty.is_base()) return false;
  return true;
}

// --- display renaming -------------------------------------------------------

// Rewrites every occurrence of a name (heads, binders, argument variables)
// through the map.  Generated names are globally unique, so the blanket
// textual replacement cannot capture.
inline std::string fix_name(const std::string& s, const std::map<std::string, std::string>& m) {
  auto it = m.find(s);
  return it == m.end() ? s : it->second;
}

inline void fix_binders(Binders& bs, const std::map<std::string, std::string>& m) {
  for (auto& b : bs) b.name = fix_name(b.name, m);
}

inline void fix_term(Term& t, const std::map<std::string, std::string>& m);

inline void fix_rec(RecTerm& n, const std::map<std::string, std::string>& m) {
  fix_binders(n.binders, m);
  n.head = fix_name(n.head, m);
  for (auto& a : n.args) a = fix_name(a, m);
}

inline void fix_con(ConTerm& u, const std::map<std::string, std::string>& m) {
  fix_binders(u.binders, m);
  u.head = fix_name(u.head, m);
  for (auto& n : u.args) fix_rec(n, m);
  for (auto& a : u.margs) a = fix_name(a, m);
}

inline void fix_term(Term& t, const std::map<std::string, std::string>& m) {
  if (is_con(t))
    fix_con(std::get<ConTerm>(t), m);
  else
    fix_rec(std::get<RecTerm>(t), m);
}

inline void collect_names(const Term& t, std::set<std::string>& out) {
  if (is_con(t)) {
    const ConTerm& u = as_con(t);
    for (const auto& b : u.binders) out.insert(b.name);
    out.insert(u.head);
    for (const auto& n : u.args) collect_names(Term(n), out);
    for (const auto& a : u.margs) out.insert(a);
  } else {
    const RecTerm& n = as_rec(t);
    for (const auto& b : n.binders) out.insert(b.name);
    out.insert(n.head);
    for (const auto& a : n.args) out.insert(a);
  }
}

}  // namespace detail

// Replaces generated names ("#r..", "#G..", "#v..") by fresh readable ones
// ("r1", "G1", "v1", ...) that avoid every name already visible, so the
// rendered text re-parses.
inline Substitution display_rename(const Substitution& g, const std::set<std::string>& avoid) {
  std::set<std::string> names;
  std::set<std::string> taken = avoid;
  for (const auto& e : g.eqs) {
    names.insert(e.meta);
    for (const auto& b : e.pattern) names.insert(b.name);
    detail::collect_names(e.value, names);
  }
  for (const auto& [r, body] : g.defs) {
    names.insert(r);
    detail::collect_names(Term(body), names);
  }
  for (const auto& n : names)
    if (!is_generated_name(n)) taken.insert(n);

  std::map<std::string, std::string> m;
  std::map<char, unsigned> counter;  // per prefix: 'r', 'G', 'v'
  for (const auto& n : names) {
    if (!is_generated_name(n)) continue;
    char kind = n.size() > 1 ? n[1] : 'v';
    if (kind != 'r' && kind != 'G' && kind != 'v') kind = 'v';
    std::string fresh;
    do {
      fresh = std::string(1, kind) + std::to_string(++counter[kind]);
    } while (taken.count(fresh));
    taken.insert(fresh);
    m[n] = fresh;
  }

  Substitution out;
  for (const auto& e : g.eqs) {
    SubstEq ne = e;
    ne.meta = detail::fix_name(ne.meta, m);
    detail::fix_binders(ne.pattern, m);
    detail::fix_term(ne.value, m);
    out.eqs.push_back(std::move(ne));
  }
  for (const auto& [r, body] : g.defs) {
    ConTerm b = body;
    detail::fix_con(b, m);
    out.defs.emplace(detail::fix_name(r, m), std::move(b));
  }
  for (const auto& [r, info] : g.rec_info) out.rec_info.emplace(detail::fix_name(r, m), info);
  for (const auto& [h, info] : g.meta_info) out.meta_info.emplace(detail::fix_name(h, m), info);
  return out;
}

namespace detail {

inline Term meta_pattern_app(const SubstEq& e) {
  if (e.mode == Mode::REC) {
    RecTerm n;
    n.binders = e.pattern;
    n.meta_head = true;
    n.head = e.meta;
    n.args = binder_names(e.pattern);
    return n;
  }
  ConTerm u;
  u.binders = e.pattern;
  u.kind = ConHead::Meta;
  u.head = e.meta;
  u.margs = binder_names(e.pattern);
  return u;
}

}  // namespace detail

// Renders a substitution as a self-contained problem file: declarations,
// the definitions it needs, and one query equation per assignment.
inline std::string render_substitution(const Substitution& g, const Signature& sig) {
  std::string out;
  for (const auto& [n, kind] : sig.base_types) out += n + " : " + kind + ".\n";
  for (const auto& [n, ty] : sig.consts)
    if (!is_metavar_name(n)) out += n + " : " + show_ptype(ty) + ".\n";
  for (const auto& [r, body] : g.defs) {
    SimpleType ty = g.rec_info.at(r).type;
    out += r + " : " + show_type(ty) + " = " + show_term(Term(body)) + ".\n";
  }
  // Declaring the assigned metavariables pins their types even when a value
  // (say a bare generated metavariable) constrains nothing by itself.
  for (const auto& e : g.eqs) {
    auto it = g.meta_info.find(e.meta);
    if (it != g.meta_info.end()) out += e.meta + " : " + show_type(it->second.type) + ".\n";
  }
  for (const auto& e : g.eqs) {
    // annotate the pattern binders so the text re-parses even when a value
    // discards arguments whose types nothing else pins down
    std::string lhs;
    for (const auto& b : e.pattern) lhs += "[" + b.name + " : " + show_type(b.type) + "] ";
    lhs += e.meta;
    for (const auto& b : e.pattern) lhs += " " + b.name;
    out += "?- " + lhs + " = " + show_term(detail::wrap_pattern(e)) + ".\n";
  }
  return out;
}

// Reads a rendered substitution back in.  Every query equation must have a
// lambda-prefixed metavariable application on its left-hand side.
inline Substitution parse_substitution(const std::string& text, NameSupply& names) {
  ConcreteContext cc = elaborate(parse_problem(text), names, /*def_metas=*/true);
  UnifContext flat = flatten(cc, names);
  Substitution out;
  out.defs = flat.defs;
  out.rec_info = flat.rec_info;
  out.meta_info = flat.meta_info;
  for (const auto& e : flat.eqs) {
    Binders pat;
    std::string meta;
    Mode mode;
    if (is_con(e.lhs) && as_con(e.lhs).kind == ConHead::Meta &&
        as_con(e.lhs).margs == binder_names(as_con(e.lhs).binders)) {
      pat = as_con(e.lhs).binders;
      meta = as_con(e.lhs).head;
      mode = Mode::CON;
    } else if (!is_con(e.lhs) && as_rec(e.lhs).meta_head &&
               as_rec(e.lhs).args == binder_names(as_rec(e.lhs).binders)) {
      pat = as_rec(e.lhs).binders;
      meta = as_rec(e.lhs).head;
      mode = Mode::REC;
    } else {
      throw InputError("substitution equation must assign to a metavariable pattern");
    }
    Term value = e.rhs;
    Binders vb = is_con(value) ? as_con(value).binders : as_rec(value).binders;
    if (vb.size() != pat.size())
      throw InputError("substitution value must bind the assignment pattern");
    value = rename(value, make_renaming(binder_names(vb), binder_names(pat)));
    if (is_con(value))
      std::get<ConTerm>(value).binders.clear();
    else
      std::get<RecTerm>(value).binders.clear();
    out.eqs.push_back(SubstEq{meta, mode, pat, value});
  }
  check_substitution(out);
  return out;
}

namespace detail {

inline std::string trace_line(const TraceStep& s, bool fo) {
  std::string line = std::to_string(s.step) + ". " + show_rule(s.rule, fo) + " on " + s.premise;
  if (s.contra) return line + " ==> contradiction";
  std::string extra;
  for (const auto& e : s.produced_eqs) {
    if (!extra.empty()) extra += ", ";
    extra += show_equation(e);
  }
  for (const auto& [r, body] : s.produced_defs) {
    if (!extra.empty()) extra += ", ";
    extra += r + " := " + show_term(Term(body));
  }
  if (!extra.empty()) line += " ==> " + extra;
  return line;
}

inline nlohmann::json subst_json(const Substitution& g) {
  nlohmann::json assigns = nlohmann::json::array();
  for (const auto& e : g.eqs) {
    nlohmann::json pat = nlohmann::json::array();
    for (const auto& b : e.pattern) pat.push_back(b.name);
    assigns.push_back({{"metavar", e.meta},
                       {"mode", show_mode(e.mode)},
                       {"pattern", pat},
                       {"value", show_term(e.value)}});
  }
  nlohmann::json defs = nlohmann::json::array();
  for (const auto& [r, body] : g.defs) {
    nlohmann::json bs = nlohmann::json::array();
    for (const auto& b : body.binders) bs.push_back(b.name);
    ConTerm inner = body;
    inner.binders.clear();
    defs.push_back({{"name", r}, {"binders", bs}, {"body", show_term(Term(inner))}});
  }
  return {{"assignments", assigns}, {"defs", defs}};
}

}  // namespace detail

inline RunResult run(const std::string& text, const RunConfig& cfg) {
  RunResult res;
  try {
    NameSupply names;
    Problem p = parse_problem(text);
    ConcreteContext cc = elaborate(p, names);

    bool fo = detail::first_order(cc);
    if (cfg.mode == ModeOpt::FirstOrder && !fo)
      throw InputError("problem uses binders or applied metavariables; not first-order");
    if (cfg.mode == ModeOpt::HigherOrder) fo = false;

    UnifContext flat = flatten(cc, names);
    SatConfig sc;
    sc.ho = !fo;
    sc.max_steps = cfg.max_steps;
    SatResult sat = saturate(flat, names, sc);

    std::vector<std::string> trace_lines;
    if (cfg.trace)
      for (const auto& s : sat.trace) trace_lines.push_back(detail::trace_line(s, fo));

    if (sat.ctx.contra) {
      if (cfg.json) {
        nlohmann::json j = {{"result", "no-unifier"}};
        if (cfg.trace) j["trace"] = trace_lines;
        res.out = j.dump(2) + "\n";
      } else {
        for (const auto& l : trace_lines) res.out += "% " + l + "\n";
        res.out += "% no unifier\n";
      }
      res.code = 1;
      return res;
    }

    Substitution full = unif(sat.ctx, names);

    if (cfg.check_depth > 0) {
      VerifyReport rep = verify_unifier(flat, full, cfg.check_depth, names);
      if (!rep.ok) throw InternalError("extracted unifier fails the expansion check");
    }

    // Presentation: only the metavariables written by the user, with the
    // definitions they reach, under readable names.
    std::set<std::string> user;
    for (const auto& [m, ty] : cc.meta_types) user.insert(m);
    Substitution shown = gc_defs(restrict_domain(full, user));
    std::set<std::string> avoid;
    for (const auto& [n, k] : p.sig.base_types) avoid.insert(n);
    for (const auto& [n, t] : p.sig.consts) avoid.insert(n);
    for (const auto& d : p.defs) avoid.insert(d.name);
    shown = display_rename(shown, avoid);

    if (cfg.json) {
      nlohmann::json j = detail::subst_json(shown);
      j["result"] = "unifier";
      if (cfg.trace) j["trace"] = trace_lines;
      res.out = j.dump(2) + "\n";
    } else {
      for (const auto& l : trace_lines) res.out += "% " + l + "\n";
      res.out += render_substitution(shown, p.sig);
      if (cfg.check_depth > 0)
        res.out += "% verified to depth " + std::to_string(cfg.check_depth) + "\n";
    }
    res.code = 0;
  } catch (const InputError& e) {
    res.code = 2;
    res.err = std::string("error: ") + e.what() + "\n";
  } catch (const InternalError& e) {
    res.code = 3;
    res.err = std::string("internal error: ") + e.what() + "\n";
  }
  return res;
}

}  // namespace ratpat

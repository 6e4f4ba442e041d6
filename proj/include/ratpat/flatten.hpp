#pragma once

#include "ratpat/concrete.hpp"
#include "ratpat/subst.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Flattening: rewrite a concrete context into shallow form, where every
// definition body is exactly one constructor/variable level deep and every
// equation side is a recursive term.
// ---------------------------------------------------------------------------

namespace detail {

// Collapses repeated arguments of recursion-constant applications by
// introducing definitions for the merged instances, e.g. r x x becomes t x
// with t defined as the body of r with its two parameters identified.
class Patternizer {
 public:
  explicit Patternizer(ConcreteContext& cc, NameSupply& names) : cc_(cc), names_(names) {}

  void run() {
    for (std::size_t i = 0; i < cc_.defs.size(); ++i) fix(cc_.defs[i].second);
    for (auto& [l, r] : cc_.eqs) {
      fix(l);
      fix(r);
    }
  }

 private:
  void fix(CTerm& t) {
    if (t.kind == CTerm::Rec) {
      std::vector<int> part;
      std::map<std::string, int> group_of;
      bool repeats = false;
      for (const auto& a : t.args) {
        auto [it, fresh] = group_of.emplace(a.head, static_cast<int>(group_of.size()));
        repeats = repeats || !fresh;
        part.push_back(it->second);
      }
      if (repeats) {
        t.head = collapse(t.head, part);
        std::vector<CTerm> dedup;
        std::set<std::string> seen;
        for (const auto& a : t.args)
          if (seen.insert(a.head).second) dedup.push_back(a);
        t.args = std::move(dedup);
      }
      return;
    }
    for (auto& a : t.args) fix(a);
  }

  std::string collapse(const std::string& r, const std::vector<int>& part) {
    std::string key = r;
    for (int g : part) key += "." + std::to_string(g);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::string t = names_.fresh_rec();
    memo_[key] = t;

    const CTerm* rbody = nullptr;
    for (const auto& [n, b] : cc_.defs)
      if (n == r) rbody = &b;
    if (!rbody || rbody->binders.size() != part.size())
      throw InternalError("patternize: bad recursion constant " + r);

    int groups = 1 + *std::max_element(part.begin(), part.end());
    Binders reps(static_cast<std::size_t>(groups));
    std::vector<bool> have(static_cast<std::size_t>(groups), false);
    Renaming rn;
    for (std::size_t i = 0; i < part.size(); ++i) {
      auto g = static_cast<std::size_t>(part[i]);
      if (!have[g]) {
        have[g] = true;
        reps[g] = rbody->binders[i];
      } else {
        rn[rbody->binders[i].name] = reps[g].name;
      }
    }
    CTerm inner = *rbody;
    inner.binders.clear();
    inner = rename(inner, rn);
    inner.binders = reps;

    SimpleType rty = cc_.def_types.at(r);
    SimpleType tty;
    tty.base = rty.base;
    for (const auto& b : reps) tty.params.push_back(b.type);
    cc_.def_types[t] = std::move(tty);
    cc_.defs.emplace_back(t, std::move(inner));
    fix(cc_.defs.back().second);
    return t;
  }

  ConcreteContext& cc_;
  NameSupply& names_;
  std::map<std::string, std::string> memo_;
};

}  // namespace detail

inline ConcreteContext patternize_rec_args(const ConcreteContext& cc, NameSupply& names) {
  ConcreteContext out = cc;
  detail::Patternizer(out, names).run();
  return out;
}

class Flattener {
 public:
  Flattener(const ConcreteContext& cc, NameSupply& names) : cc_(cc), names_(names) {}

  UnifContext run() {
    for (const auto& [m, ty] : cc_.meta_types)
      out_.meta_info[m] = MetaInfo{Mode::REC, ty, ty.arity()};
    for (const auto& [r, ty] : cc_.def_types) out_.rec_info[r] = RecConstInfo{ty, ty.arity()};

    for (const auto& [name, body] : cc_.defs) {
      if (body.kind != CTerm::Const && body.kind != CTerm::Var)
        throw InputError("definition body of " + name +
                         " must start with a constructor or variable");
      std::map<std::string, SimpleType> env;
      out_.defs[name] = flatten_con(body, env);
    }
    for (const auto& [l, r] : cc_.eqs) {
      std::map<std::string, SimpleType> env;
      out_.eqs.push_back(Equation{flatten_rec(l, env), flatten_rec(r, env)});
    }
    return std::move(out_);
  }

  // The body keeps its own lambda prefix; each argument becomes shallow.
  ConTerm flatten_con(const CTerm& t, std::map<std::string, SimpleType> env) {
    ConTerm u;
    u.binders = t.binders;
    for (const auto& b : t.binders) env[b.name] = b.type;
    u.kind = t.kind == CTerm::Var ? ConHead::Var : ConHead::Const;
    u.head = t.head;
    for (const auto& a : t.args) u.args.push_back(flatten_rec(a, env));
    return u;
  }

  // Constructor/variable-headed terms get a fresh definition abstracted over
  // their free variables; metavariable and rec-const heads pass through.
  RecTerm flatten_rec(const CTerm& t, std::map<std::string, SimpleType> env) {
    RecTerm n;
    n.binders = t.binders;
    for (const auto& b : t.binders) env[b.name] = b.type;
    if (t.kind == CTerm::Meta || t.kind == CTerm::Rec) {
      n.meta_head = t.kind == CTerm::Meta;
      n.head = t.head;
      for (const auto& a : t.args) n.args.push_back(a.head);
      return n;
    }
    std::string r = names_.fresh_rec();
    CTerm inner = t;
    inner.binders.clear();
    std::vector<std::string> zs = free_vars(inner);

    SimpleType rty;
    rty.base = result_base(inner, env);
    Binders zbs;
    for (const auto& z : zs) {
      auto it = env.find(z);
      if (it == env.end()) throw InternalError("flatten: unknown variable " + z);
      rty.params.push_back(it->second);
      zbs.push_back(Binder{z, it->second});
    }

    ConTerm body = flatten_con(inner, env);
    body.binders = std::move(zbs);
    out_.defs[r] = std::move(body);
    out_.rec_info[r] = RecConstInfo{std::move(rty), zs.size()};

    n.meta_head = false;
    n.head = r;
    n.args = std::move(zs);
    return n;
  }

 private:
  std::string result_base(const CTerm& t, const std::map<std::string, SimpleType>& env) const {
    if (t.kind == CTerm::Var) {
      auto it = env.find(t.head);
      if (it == env.end()) throw InternalError("flatten: unknown variable head " + t.head);
      return it->second.base;
    }
    return cc_.const_types.at(t.head).base;
  }

  const ConcreteContext& cc_;
  NameSupply& names_;
  UnifContext out_;
};

inline UnifContext flatten(const ConcreteContext& cc, NameSupply& names) {
  ConcreteContext clean = patternize_rec_args(cc, names);
  return Flattener(clean, names).run();
}

// ---------------------------------------------------------------------------
// Well-formedness of flattened contexts (used by tests and as an engine
// debug check).
// ---------------------------------------------------------------------------

namespace detail {
inline bool distinct_vars(const std::vector<std::string>& vs) {
  std::set<std::string> s(vs.begin(), vs.end());
  return s.size() == vs.size();
}
}  // namespace detail

inline bool is_flat(const UnifContext& ctx, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  for (const auto& [r, body] : ctx.defs) {
    if (!free_vars(body).empty()) return fail("definition " + r + " is not closed");
    if (body.kind == ConHead::Meta) {
      if (!detail::distinct_vars(body.margs)) return fail("repeated pattern variable in " + r);
    } else {
      for (const auto& a : body.args)
        if (!detail::distinct_vars(a.args)) return fail("repeated pattern variable in " + r);
    }
    if (!ctx.rec_info.count(r)) return fail("definition " + r + " missing from rec_info");
  }
  for (const auto& e : ctx.eqs) {
    if (is_con(e.lhs) != is_con(e.rhs)) return fail("equation mixes sorts: " + show_equation(e));
    auto check_term = [&](const Term& t) {
      if (is_con(t)) {
        const ConTerm& u = as_con(t);
        if (u.kind == ConHead::Meta) return detail::distinct_vars(u.margs);
        for (const auto& a : u.args)
          if (!detail::distinct_vars(a.args)) return false;
        return true;
      }
      return detail::distinct_vars(as_rec(t).args);
    };
    if (!check_term(e.lhs) || !check_term(e.rhs))
      return fail("non-pattern argument list in: " + show_equation(e));
  }
  return true;
}

}  // namespace ratpat

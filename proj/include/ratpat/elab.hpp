#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ratpat/concrete.hpp"
#include "ratpat/surface.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Elaboration: first-order type inference over simple types followed by
// beta-normalization and eta-expansion into spine-form concrete terms.
//
// Metavariable types are inferred.  A type variable left unconstrained is
// defaulted to the unique declared base type when there is exactly one,
// otherwise reported as ambiguous.
// ---------------------------------------------------------------------------

namespace detail {

class TyStore {
 public:
  int fresh() {
    nodes_.push_back(Node{Node::Var, "", -1, -1, -1});
    return static_cast<int>(nodes_.size()) - 1;
  }
  int base(const std::string& name) {
    nodes_.push_back(Node{Node::Base, name, -1, -1, -1});
    return static_cast<int>(nodes_.size()) - 1;
  }
  int arrow(int dom, int cod) {
    nodes_.push_back(Node{Node::Arrow, "", dom, cod, -1});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int find(int i) const {
    while (nodes_[i].kind == Node::Var && nodes_[i].link >= 0) i = nodes_[i].link;
    return i;
  }

  void unify(int a, int b, int line, int col) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    Node& na = nodes_[a];
    Node& nb = nodes_[b];
    if (na.kind == Node::Var) {
      if (occurs(a, b)) throw InputError("type clash: circular type constraint", line, col);
      na.link = b;
      return;
    }
    if (nb.kind == Node::Var) {
      unify(b, a, line, col);
      return;
    }
    if (na.kind == Node::Base && nb.kind == Node::Base) {
      if (na.name != nb.name)
        throw InputError("type clash: " + na.name + " vs " + nb.name, line, col);
      return;
    }
    if (na.kind == Node::Arrow && nb.kind == Node::Arrow) {
      unify(na.dom, nb.dom, line, col);
      unify(na.cod, nb.cod, line, col);
      return;
    }
    throw InputError("type clash: function type vs base type", line, col);
  }

  // Resolves a node to a spine-form simple type; unconstrained variables
  // default to `dflt` if nonempty.
  SimpleType resolve(int i, const std::string& dflt) const {
    i = find(i);
    const Node& n = nodes_[i];
    switch (n.kind) {
      case Node::Var:
        if (dflt.empty())
          throw InputError("ambiguous type: unconstrained type variable "
                           "(add a declaration to pin it down)");
        return base_type(dflt);
      case Node::Base: return base_type(n.name);
      case Node::Arrow: {
        SimpleType d = resolve(n.dom, dflt);
        SimpleType c = resolve(n.cod, dflt);
        c.params.insert(c.params.begin(), std::move(d));
        return c;
      }
    }
    throw InternalError("TyStore::resolve: bad node");
  }

 private:
  struct Node {
    enum Kind { Var, Base, Arrow } kind;
    std::string name;
    int dom, cod;
    int link;
  };

  bool occurs(int v, int t) const {
    t = find(t);
    if (t == v) return true;
    const Node& n = nodes_[t];
    if (n.kind == Node::Arrow) return occurs(v, n.dom) || occurs(v, n.cod);
    return false;
  }

  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Beta-normalization of parsed terms
// ---------------------------------------------------------------------------

inline void pterm_fv(const PTerm& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t.kind) {
    case PTerm::Id:
      if (!bound.count(t.name)) out.insert(t.name);
      break;
    case PTerm::App:
      pterm_fv(*t.fn, bound, out);
      pterm_fv(*t.arg, bound, out);
      break;
    case PTerm::Lam: {
      bool had = bound.count(t.name);
      bound.insert(t.name);
      pterm_fv(*t.body, bound, out);
      if (!had) bound.erase(t.name);
      break;
    }
  }
}

inline std::set<std::string> pterm_fv(const PTerm& t) {
  std::set<std::string> bound, out;
  pterm_fv(t, bound, out);
  return out;
}

inline PTermPtr pt_subst(const PTermPtr& t, const std::string& x, const PTermPtr& v,
                         NameSupply& names) {
  switch (t->kind) {
    case PTerm::Id: return t->name == x ? v : t;
    case PTerm::App: return pt_app(pt_subst(t->fn, x, v, names), pt_subst(t->arg, x, v, names));
    case PTerm::Lam: {
      if (t->name == x) return t;
      if (pterm_fv(*v).count(t->name)) {
        std::string fresh = names.fresh_var();
        PTermPtr body = pt_subst(t->body, t->name, pt_id(fresh), names);
        return pt_lam(fresh, pt_subst(body, x, v, names), t->line, t->col, t->ann);
      }
      return pt_lam(t->name, pt_subst(t->body, x, v, names), t->line, t->col, t->ann);
    }
  }
  throw InternalError("pt_subst: bad node");
}

inline PTermPtr beta_normalize(const PTermPtr& t, NameSupply& names) {
  switch (t->kind) {
    case PTerm::Id: return t;
    case PTerm::Lam:
      return pt_lam(t->name, beta_normalize(t->body, names), t->line, t->col, t->ann);
    case PTerm::App: {
      PTermPtr f = beta_normalize(t->fn, names);
      PTermPtr a = beta_normalize(t->arg, names);
      if (f->kind == PTerm::Lam) return beta_normalize(pt_subst(f->body, f->name, a, names), names);
      return pt_app(std::move(f), std::move(a));
    }
  }
  throw InternalError("beta_normalize: bad node");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elaborator
// ---------------------------------------------------------------------------

class Elaborator {
 public:
  // `def_metas` admits metavariables inside definition bodies, which the
  // rendered form of a substitution needs when it is read back in.
  explicit Elaborator(NameSupply& names, bool def_metas = false)
      : names_(names), def_metas_(def_metas) {}

  ConcreteContext run(const Problem& p) {
    sig_ = &p.sig;
    // Exactly one declared base type lets unconstrained type variables
    // default to it.
    if (p.sig.base_types.size() == 1) default_base_ = p.sig.base_types.begin()->first;

    // A declaration whose name is capitalised declares a metavariable's
    // type up front; everything else is an ordinary constant.
    for (const auto& [c, ty] : p.sig.consts) {
      if (is_metavar_name(c))
        meta_ty_[c] = convert(ty, p.sig);
      else
        const_ty_[c] = convert(ty, p.sig);
    }
    for (const auto& d : p.defs) {
      if (def_ty_.count(d.name)) throw InputError("duplicate definition of " + d.name, d.line, 1);
      def_ty_[d.name] = convert(d.type, p.sig);
    }

    std::vector<int> def_nodes;
    for (const auto& d : p.defs) {
      int n = def_ty_[d.name];
      check(d.body, n, {}, def_metas_);
      def_nodes.push_back(n);
    }
    std::vector<int> eq_nodes;
    for (const auto& [l, r] : p.eqs) {
      int n = store_.fresh();
      check(l, n, {}, true);
      check(r, n, {}, true);
      eq_nodes.push_back(n);
    }

    ConcreteContext out;
    for (const auto& [c, n] : const_ty_) out.const_types[c] = store_.resolve(n, default_base_);
    for (const auto& [d, n] : def_ty_) out.def_types[d] = store_.resolve(n, default_base_);
    for (const auto& [m, n] : meta_ty_) out.meta_types[m] = store_.resolve(n, default_base_);
    tables_ = &out;

    for (std::size_t i = 0; i < p.defs.size(); ++i) {
      const auto& d = p.defs[i];
      CTerm body = readback(detail::beta_normalize(d.body, names_),
                            store_.resolve(def_nodes[i], default_base_), {});
      out.defs.emplace_back(d.name, std::move(body));
    }
    for (std::size_t i = 0; i < p.eqs.size(); ++i) {
      SimpleType ty = store_.resolve(eq_nodes[i], default_base_);
      CTerm l = readback(detail::beta_normalize(p.eqs[i].first, names_), ty, {});
      CTerm r = readback(detail::beta_normalize(p.eqs[i].second, names_), ty, {});
      out.eqs.emplace_back(std::move(l), std::move(r));
    }
    return out;
  }

 private:
  int convert(const PType& t, const Signature& sig) {
    if (t.is_arrow()) return store_.arrow(convert(*t.dom, sig), convert(*t.cod, sig));
    if (!sig.base_types.count(t.name)) throw InputError("unknown type name '" + t.name + "'");
    return store_.base(t.name);
  }

  // Constraint generation with eager unification.
  void check(const PTermPtr& t, int expected, std::map<std::string, int> env, bool in_query) {
    switch (t->kind) {
      case PTerm::Lam: {
        int dom = store_.fresh();
        int cod = store_.fresh();
        if (t->ann) store_.unify(dom, convert(*t->ann, *sig_), t->line, t->col);
        store_.unify(expected, store_.arrow(dom, cod), t->line, t->col);
        env[t->name] = dom;
        check(t->body, cod, std::move(env), in_query);
        return;
      }
      case PTerm::App: {
        int dom = store_.fresh();
        check(t->fn, store_.arrow(dom, expected), env, in_query);
        check(t->arg, dom, std::move(env), in_query);
        return;
      }
      case PTerm::Id: {
        store_.unify(expected, ident_node(t, env, in_query), t->line, t->col);
        return;
      }
    }
  }

  int ident_node(const PTermPtr& t, const std::map<std::string, int>& env, bool in_query) {
    if (auto it = env.find(t->name); it != env.end()) return it->second;
    if (auto it = const_ty_.find(t->name); it != const_ty_.end()) return it->second;
    if (auto it = def_ty_.find(t->name); it != def_ty_.end()) return it->second;
    if (in_query && is_metavar_name(t->name)) {
      auto [it, fresh] = meta_ty_.emplace(t->name, 0);
      if (fresh) it->second = store_.fresh();
      return it->second;
    }
    throw InputError("unknown identifier '" + t->name + "'", t->line, t->col);
  }

  // Reads a beta-normal term back as an eta-long spine, except under
  // metavariable/rec-const heads, whose arguments must be variables.
  CTerm readback(PTermPtr t, const SimpleType& ty, std::map<std::string, SimpleType> env) {
    CTerm out;
    std::size_t i = 0;
    while (t->kind == PTerm::Lam && i < ty.params.size()) {
      out.binders.push_back(Binder{t->name, ty.params[i]});
      env[t->name] = ty.params[i];
      t = t->body;
      ++i;
    }
    if (t->kind == PTerm::Lam) throw InternalError("readback: overapplied lambda prefix");
    std::vector<std::string> extra;
    for (; i < ty.params.size(); ++i) {
      std::string w = names_.fresh_var();
      out.binders.push_back(Binder{w, ty.params[i]});
      env[w] = ty.params[i];
      extra.push_back(w);
    }
    // spine decomposition
    std::vector<PTermPtr> args;
    while (t->kind == PTerm::App) {
      args.push_back(t->arg);
      t = t->fn;
    }
    std::reverse(args.begin(), args.end());
    if (t->kind != PTerm::Id) throw InternalError("readback: non-identifier head");
    const std::string& h = t->name;
    SimpleType hty;
    if (auto it = env.find(h); it != env.end()) {
      out.kind = CTerm::Var;
      hty = it->second;
    } else if (tables_->const_types.count(h)) {
      out.kind = CTerm::Const;
      hty = tables_->const_types.at(h);
    } else if (tables_->def_types.count(h)) {
      out.kind = CTerm::Rec;
      hty = tables_->def_types.at(h);
    } else if (tables_->meta_types.count(h)) {
      out.kind = CTerm::Meta;
      hty = tables_->meta_types.at(h);
    } else {
      throw InternalError("readback: unbound head " + h);
    }
    out.head = h;
    if (args.size() + extra.size() != hty.params.size())
      throw InternalError("readback: head arity mismatch at " + h);

    if (out.kind == CTerm::Meta || out.kind == CTerm::Rec) {
      std::set<std::string> seen;
      for (std::size_t k = 0; k < args.size(); ++k) {
        std::string v = as_pattern_var(args[k], env);
        if (v.empty()) {
          if (out.kind == CTerm::Meta)
            throw InputError("non-pattern argument to metavariable " + h);
          throw InputError("non-variable argument to recursion constant " + h);
        }
        if (out.kind == CTerm::Meta && !seen.insert(v).second)
          throw InputError("non-pattern argument to metavariable " + h +
                           ": repeated variable " + v);
        CTerm a;
        a.kind = CTerm::Var;
        a.head = v;
        out.args.push_back(std::move(a));
      }
      for (const auto& w : extra) {
        if (out.kind == CTerm::Meta && !seen.insert(w).second)
          throw InternalError("readback: repeated eta variable");
        CTerm a;
        a.kind = CTerm::Var;
        a.head = w;
        out.args.push_back(std::move(a));
      }
      return out;
    }

    for (std::size_t k = 0; k < args.size(); ++k)
      out.args.push_back(readback(args[k], hty.params[k], env));
    for (std::size_t k = 0; k < extra.size(); ++k)
      out.args.push_back(readback(pt_id(extra[k]), hty.params[args.size() + k], env));
    return out;
  }

  // Recognizes \w1..wk. y w1..wk (eta-contractible to the variable y).
  std::string as_pattern_var(const PTermPtr& t, const std::map<std::string, SimpleType>& env) {
    std::vector<std::string> ws;
    PTermPtr cur = t;
    while (cur->kind == PTerm::Lam) {
      ws.push_back(cur->name);
      cur = cur->body;
    }
    std::vector<PTermPtr> args;
    while (cur->kind == PTerm::App) {
      args.push_back(cur->arg);
      cur = cur->fn;
    }
    std::reverse(args.begin(), args.end());
    if (cur->kind != PTerm::Id) return "";
    if (!env.count(cur->name)) return "";  // not a bound variable
    if (args.size() != ws.size()) return "";
    for (std::size_t i = 0; i < ws.size(); ++i)
      if (args[i]->kind != PTerm::Id || args[i]->name != ws[i]) return "";
    for (const auto& w : ws)
      if (cur->name == w) return "";
    return cur->name;
  }

  NameSupply& names_;
  bool def_metas_ = false;
  const Signature* sig_ = nullptr;
  detail::TyStore store_;
  std::string default_base_;
  std::map<std::string, int> const_ty_, def_ty_, meta_ty_;
  const ConcreteContext* tables_ = nullptr;
};

inline ConcreteContext elaborate(const Problem& p, NameSupply& names, bool def_metas = false) {
  return Elaborator(names, def_metas).run(p);
}

}  // namespace ratpat

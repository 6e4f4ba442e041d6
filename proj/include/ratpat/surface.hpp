#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ratpat/types.hpp"

namespace ratpat {

// ---------------------------------------------------------------------------
// Concrete syntax (Twelf-style):
//
//   conat : cotype.
//   cosucc : conat -> conat.
//   omega : conat = cosucc omega.
//   ?- omega = cosucc (cosucc H).
//
// '%' starts a line comment.  '[x] body' is a lambda, application is
// juxtaposition (left-assoc), '->' is right-assoc.  Capitalized free
// identifiers in queries are metavariables.
// ---------------------------------------------------------------------------

// Parsed type expressions (before kind checking).
struct PType {
  std::string name;            // set when atom
  std::shared_ptr<PType> dom;  // set when arrow
  std::shared_ptr<PType> cod;
  bool is_arrow() const { return dom != nullptr; }
};

// Parsed terms.
struct PTerm;
using PTermPtr = std::shared_ptr<PTerm>;

struct PTerm {
  enum Kind { Lam, App, Id } kind;
  std::string name;  // Lam: bound variable; Id: identifier
  PTermPtr fn, arg;  // App
  PTermPtr body;     // Lam
  std::shared_ptr<PType> ann;  // Lam: optional '[x : ty]' annotation
  int line = 0, col = 0;
};

inline PTermPtr pt_id(std::string n, int line = 0, int col = 0) {
  auto p = std::make_shared<PTerm>();
  p->kind = PTerm::Id;
  p->name = std::move(n);
  p->line = line;
  p->col = col;
  return p;
}
inline PTermPtr pt_app(PTermPtr f, PTermPtr a) {
  auto p = std::make_shared<PTerm>();
  p->kind = PTerm::App;
  p->line = f->line;
  p->col = f->col;
  p->fn = std::move(f);
  p->arg = std::move(a);
  return p;
}
inline PTermPtr pt_lam(std::string v, PTermPtr b, int line = 0, int col = 0,
                       std::shared_ptr<PType> ann = nullptr) {
  auto p = std::make_shared<PTerm>();
  p->kind = PTerm::Lam;
  p->name = std::move(v);
  p->body = std::move(b);
  p->ann = std::move(ann);
  p->line = line;
  p->col = col;
  return p;
}

struct Signature {
  std::map<std::string, std::string> base_types;  // name -> "type" | "cotype"
  std::map<std::string, PType> consts;            // constructor -> declared type
};

struct PDef {
  std::string name;
  PType type;
  PTermPtr body;
  int line = 0;
};

struct Problem {
  Signature sig;
  std::vector<PDef> defs;                           // in declaration order
  std::vector<std::pair<PTermPtr, PTermPtr>> eqs;   // query equations
};

inline bool is_metavar_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
  enum Kind { Ident, Colon, Dot, Equals, Arrow, LBrack, RBrack, LParen, RParen, Query, End } kind;
  std::string text;
  int line, col;
};

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-';
}

inline std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto emit = [&](Token::Kind k, std::string s, int l, int c) {
    out.push_back(Token{k, std::move(s), l, c});
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    int l = line, cl = col;
    if (c == '?' && i + 1 < text.size() && text[i + 1] == '-') {
      emit(Token::Query, "?-", l, cl);
      i += 2;
      col += 2;
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      emit(Token::Arrow, "->", l, cl);
      i += 2;
      col += 2;
      continue;
    }
    switch (c) {
      case ':': emit(Token::Colon, ":", l, cl); ++i; ++col; continue;
      case '.': emit(Token::Dot, ".", l, cl); ++i; ++col; continue;
      case '=': emit(Token::Equals, "=", l, cl); ++i; ++col; continue;
      case '[': emit(Token::LBrack, "[", l, cl); ++i; ++col; continue;
      case ']': emit(Token::RBrack, "]", l, cl); ++i; ++col; continue;
      case '(': emit(Token::LParen, "(", l, cl); ++i; ++col; continue;
      case ')': emit(Token::RParen, ")", l, cl); ++i; ++col; continue;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (i < text.size() && ident_char(text[i])) {
        // '-' only joins an identifier when not starting an arrow
        if (text[i] == '-' && i + 1 < text.size() && text[i + 1] == '>') break;
        s += text[i++];
        ++col;
      }
      emit(Token::Ident, std::move(s), l, cl);
      continue;
    }
    throw InputError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back(Token{Token::End, "", line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Problem parse() {
    Problem p;
    bool in_query = false;
    while (peek().kind != Token::End) {
      if (peek().kind == Token::Query) {
        next();
        in_query = true;
        continue;
      }
      if (in_query) {
        PTermPtr lhs = parse_term();
        expect(Token::Equals, "'='");
        PTermPtr rhs = parse_term();
        expect(Token::Dot, "'.'");
        p.eqs.emplace_back(std::move(lhs), std::move(rhs));
      } else {
        parse_decl(p);
      }
    }
    return p;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  Token expect(Token::Kind k, const char* what) {
    if (peek().kind != k)
      throw InputError(std::string("expected ") + what + ", found '" + peek().text + "'",
                       peek().line, peek().col);
    return next();
  }

  void parse_decl(Problem& p) {
    Token id = expect(Token::Ident, "identifier");
    expect(Token::Colon, "':'");
    PType ty = parse_type();
    if (peek().kind == Token::Equals) {
      next();
      PTermPtr body = parse_term();
      expect(Token::Dot, "'.'");
      check_fresh(p, id);
      p.defs.push_back(PDef{id.text, std::move(ty), std::move(body), id.line});
      return;
    }
    expect(Token::Dot, "'.'");
    check_fresh(p, id);
    if (!ty.is_arrow() && (ty.name == "type" || ty.name == "cotype")) {
      p.sig.base_types[id.text] = ty.name;
    } else {
      p.sig.consts[id.text] = std::move(ty);
    }
  }

  void check_fresh(const Problem& p, const Token& id) {
    bool dup = p.sig.base_types.count(id.text) || p.sig.consts.count(id.text);
    for (const auto& d : p.defs) dup = dup || d.name == id.text;
    if (dup) throw InputError("duplicate declaration of '" + id.text + "'", id.line, id.col);
  }

  PType parse_type() {
    PType lhs = parse_type_atom();
    if (peek().kind == Token::Arrow) {
      next();
      PType rhs = parse_type();
      PType arr;
      arr.dom = std::make_shared<PType>(std::move(lhs));
      arr.cod = std::make_shared<PType>(std::move(rhs));
      return arr;
    }
    return lhs;
  }

  PType parse_type_atom() {
    if (peek().kind == Token::LParen) {
      next();
      PType t = parse_type();
      expect(Token::RParen, "')'");
      return t;
    }
    Token id = expect(Token::Ident, "type name");
    PType t;
    t.name = id.text;
    return t;
  }

  PTermPtr parse_term() {
    if (peek().kind == Token::LBrack) {
      Token lb = next();
      Token v = expect(Token::Ident, "bound variable");
      std::shared_ptr<PType> ann;
      if (peek().kind == Token::Colon) {
        next();
        ann = std::make_shared<PType>(parse_type());
      }
      expect(Token::RBrack, "']'");
      return pt_lam(v.text, parse_term(), lb.line, lb.col, std::move(ann));
    }
    PTermPtr t = parse_atom();
    while (peek().kind == Token::Ident || peek().kind == Token::LParen ||
           peek().kind == Token::LBrack) {
      t = pt_app(std::move(t), parse_atom());
    }
    return t;
  }

  PTermPtr parse_atom() {
    const Token& tk = peek();
    switch (tk.kind) {
      case Token::Ident: {
        Token id = next();
        return pt_id(id.text, id.line, id.col);
      }
      case Token::LParen: {
        next();
        PTermPtr t = parse_term();
        expect(Token::RParen, "')'");
        return t;
      }
      case Token::LBrack: {
        // a lambda in argument position must be parenthesized in Twelf,
        // but accepting it bare is harmless and unambiguous here
        Token lb = next();
        Token v = expect(Token::Ident, "bound variable");
        expect(Token::RBrack, "']'");
        return pt_lam(v.text, parse_term(), lb.line, lb.col);
      }
      default:
        throw InputError("expected a term, found '" + tk.text + "'", tk.line, tk.col);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Problem parse_problem(const std::string& text) {
  return detail::Parser(detail::lex(text)).parse();
}

// ---------------------------------------------------------------------------
// Printing (round-trip partner of the parser)
// ---------------------------------------------------------------------------

inline std::string show_ptype(const PType& t) {
  if (!t.is_arrow()) return t.name;
  std::string dom = show_ptype(*t.dom);
  if (t.dom->is_arrow()) dom = "(" + dom + ")";
  return dom + " -> " + show_ptype(*t.cod);
}

namespace detail {
inline void show_pterm(const PTerm& t, std::string& out, bool arg_pos) {
  switch (t.kind) {
    case PTerm::Id: out += t.name; break;
    case PTerm::Lam:
      if (arg_pos) out += "(";
      out += "[" + t.name + "] ";
      show_pterm(*t.body, out, false);
      if (arg_pos) out += ")";
      break;
    case PTerm::App:
      if (arg_pos) out += "(";
      show_pterm(*t.fn, out, t.fn->kind == PTerm::Lam);
      out += " ";
      show_pterm(*t.arg, out, t.arg->kind != PTerm::Id);
      if (arg_pos) out += ")";
      break;
  }
}
}  // namespace detail

inline std::string show_pterm(const PTerm& t) {
  std::string out;
  detail::show_pterm(t, out, false);
  return out;
}

inline std::string show_problem(const Problem& p) {
  std::string out;
  for (const auto& [n, k] : p.sig.base_types) out += n + " : " + k + ".\n";
  for (const auto& [n, t] : p.sig.consts) out += n + " : " + show_ptype(t) + ".\n";
  for (const auto& d : p.defs)
    out += d.name + " : " + show_ptype(d.type) + " = " + show_pterm(*d.body) + ".\n";
  for (const auto& [l, r] : p.eqs) out += "?- " + show_pterm(*l) + " = " + show_pterm(*r) + ".\n";
  return out;
}

}  // namespace ratpat

#include "rw/syntax.hpp"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace rw {

ParseError::ParseError(std::string k, int l, int c, const std::string& msg)
    : std::runtime_error(k + " at " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
      kind(std::move(k)),
      line(l),
      col(c) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

const std::vector<std::string>& symbols() {
  static const std::vector<std::string> s = {":=", "=>", "->", "::", "++", "&&", "||", "==", "<=", ">=", ">>",
                                             "<<", "<",  ">",  "+",  "-",  "*",  "/",  "^",  "(",  ")",  "[",
                                             "]",  "{",  "}",  ";",  ",",  ":",  ".",  "\\", "%",  "'",  "="};
  return s;
}

// Multi-byte spellings accepted as aliases.
const std::vector<std::pair<std::string, std::string>>& unicode_symbols() {
  static const std::vector<std::pair<std::string, std::string>> s = {
      {"\xCE\xBB", "\\"},       // λ
      {"\xE2\x86\x92", "->"},   // →
      {"\xE2\x87\x92", "=>"},   // ⇒
      {"\xC2\xB7", "*"},        // ·
      {"\xE2\x89\xAB", ">>"},   // ≫
      {"\xE2\x89\xA4", "<="},   // ≤
      {"\xE2\x88\x80", "forall"},  // ∀
  };
  return s;
}

}  // namespace

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  bool glued = false;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      glued = false;
      continue;
    }
    if (src.compare(i, 2, "--") == 0) {
      while (i < src.size() && src[i] != '\n') adv(1);
      glued = false;
      continue;
    }
    if (src.compare(i, 2, "(*") == 0) {
      int sl = line, sc = col;
      adv(2);
      while (i < src.size() && src.compare(i, 2, "*)") != 0) adv(1);
      if (i >= src.size()) throw ParseError("SyntaxError", sl, sc, "unterminated comment");
      adv(2);
      glued = false;
      continue;
    }
    Token t{Tok::Sym, "", line, col, glued};
    glued = true;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Num;
      for (size_t k = i; k < j; ++k)
        if (src[k] != '_') t.text += src[k];
      adv(j - i);
      out.push_back(t);
      continue;
    }
    if (ident_start(c) || (c == '\'' && i + 1 < src.size() && ident_start(src[i + 1]))) {
      size_t j = i + (c == '\'' ? 1 : 0);
      while (j < src.size() && ident_char(src[j])) ++j;
      // Qualified names such as Z.add or List.map.
      while (std::isupper(static_cast<unsigned char>(src[i + (c == '\'' ? 1 : 0)])) && j + 1 < src.size() &&
             src[j] == '.' && ident_start(src[j + 1])) {
        ++j;
        while (j < src.size() && ident_char(src[j])) ++j;
      }
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      adv(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const auto& [u, s] : unicode_symbols()) {
      if (src.compare(i, u.size(), u) == 0) {
        t.kind = s == "forall" ? Tok::Ident : Tok::Sym;
        t.text = s;
        adv(u.size());
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (const auto& s : symbols()) {
      if (src.compare(i, s.size(), s) == 0) {
        t.text = s;
        adv(s.size());
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError("SyntaxError", line, col, std::string("unexpected character '") + c + "'");
  }
  out.push_back(Token{Tok::End, "", line, col, false});
  return out;
}

namespace {

struct OpInfo {
  int level;
  enum Assoc { Left, Right, None } assoc;
};

const std::unordered_map<std::string, OpInfo>& binops() {
  static const std::unordered_map<std::string, OpInfo> m = {
      {"||", {10, OpInfo::Right}}, {"&&", {20, OpInfo::Right}}, {"==", {30, OpInfo::None}},
      {"<", {30, OpInfo::None}},   {"<=", {30, OpInfo::None}},  {">", {30, OpInfo::None}},
      {">=", {30, OpInfo::None}},  {"::", {40, OpInfo::Right}}, {"++", {40, OpInfo::Right}},
      {">>", {45, OpInfo::Left}},  {"<<", {45, OpInfo::Left}},  {"+", {50, OpInfo::Left}},
      {"-", {50, OpInfo::Left}},   {"*", {60, OpInfo::Left}},   {"/", {60, OpInfo::Left}},
      {"mod", {60, OpInfo::Left}}, {"^", {70, OpInfo::Right}},
  };
  return m;
}

const std::unordered_set<std::string>& keywords() {
  static const std::unordered_set<std::string> k = {"let",  "dlet", "in",      "fun",   "if",   "then",
                                                    "else", "forall", "rule",  "again", "mod",  "const",
                                                    "eagerly", "options", "extra", "eval_rect"};
  return k;
}

SNodeP mk(SNode::K k, const Token& at) {
  auto n = std::make_shared<SNode>();
  n->k = k;
  n->line = at.line;
  n->col = at.col;
  return n;
}

SNodeP mk_app2(const SNodeP& f, const SNodeP& x) {
  auto n = std::make_shared<SNode>();
  n->k = SNode::App;
  n->line = f->line;
  n->col = f->col;
  n->kids = {f, x};
  return n;
}

}  // namespace

SurfaceParser::SurfaceParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

const Token& SurfaceParser::peek(size_t k) const {
  size_t p = pos_ + k;
  return p < toks_.size() ? toks_[p] : toks_.back();
}

const Token& SurfaceParser::next() {
  const Token& t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool SurfaceParser::at(const std::string& sym) const {
  const Token& t = peek();
  return (t.kind == Tok::Sym || t.kind == Tok::Ident) && t.text == sym;
}

bool SurfaceParser::accept(const std::string& sym) {
  if (!at(sym)) return false;
  next();
  return true;
}

void SurfaceParser::expect(const std::string& sym) {
  if (!accept(sym)) fail("expected '" + sym + "'");
}

bool SurfaceParser::at_end() const { return peek().kind == Tok::End; }

void SurfaceParser::fail(const std::string& msg) const {
  const Token& t = peek();
  std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  throw ParseError("SyntaxError", t.line, t.col, msg + ", found " + found);
}

TypeSynP SurfaceParser::type() {
  auto atom_type = [this]() -> TypeSynP {
    if (accept("(")) {
      TypeSynP t = type();
      expect(")");
      return t;
    }
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("expected a type");
    next();
    auto r = std::make_shared<TypeSyn>();
    r->k = TypeSyn::Name;
    r->name = t.text;
    return r;
  };
  auto app_type = [&]() -> TypeSynP {
    if (at("list") || at("option")) {
      bool is_list = peek().text == "list";
      next();
      auto r = std::make_shared<TypeSyn>();
      r->k = is_list ? TypeSyn::List : TypeSyn::Option;
      if (at("list") || at("option")) {
        // list (list Z) written without parentheses is not accepted; keep it simple.
        fail("parenthesize nested container types");
      }
      r->a = atom_type();
      return r;
    }
    return atom_type();
  };
  TypeSynP left = app_type();
  while (accept("*")) {
    auto r = std::make_shared<TypeSyn>();
    r->k = TypeSyn::Prod;
    r->a = left;
    r->b = app_type();
    left = r;
  }
  if (accept("->")) {
    auto r = std::make_shared<TypeSyn>();
    r->k = TypeSyn::Arrow;
    r->a = left;
    r->b = type();
    return r;
  }
  return left;
}

SNodeP SurfaceParser::expr() {
  if (at("\\") || at("fun")) return lambda();
  if (at("let") || at("dlet")) return let_expr();
  if (at("if")) return if_expr();
  return binop(0);
}

SNodeP SurfaceParser::binop(int min_level) {
  SNodeP left = unary();
  while (true) {
    const Token& t = peek();
    if (t.kind != Tok::Sym && !(t.kind == Tok::Ident && t.text == "mod")) break;
    auto it = binops().find(t.text);
    if (it == binops().end() || it->second.level < min_level) break;
    OpInfo info = it->second;
    Token op = next();
    int rhs_level = info.assoc == OpInfo::Right ? info.level : info.level + 1;
    SNodeP right;
    if (at("\\") || at("fun") || at("let") || at("dlet") || at("if"))
      right = expr();
    else
      right = binop(rhs_level);
    auto opn = mk(SNode::Op, op);
    opn->name = op.text;
    left = mk_app2(mk_app2(opn, left), right);
    if (info.assoc == OpInfo::None) {
      auto nt = binops().find(peek().text);
      if (nt != binops().end() && nt->second.level == info.level && peek().kind == Tok::Sym)
        fail("comparison operators do not associate");
    }
  }
  return left;
}

SNodeP SurfaceParser::unary() {
  if (at("-")) {
    Token m = next();
    if (peek().kind == Tok::Num && peek().glued) {
      SNodeP lit = atom();
      lit->num = -lit->num;
      lit->line = m.line;
      lit->col = m.col;
      // A negative literal may still head an application only syntactically; reject that.
      return lit;
    }
    SNodeP arg = binop(75);
    auto f = mk(SNode::Name, m);
    f->name = "opp";
    return mk_app2(f, arg);
  }
  if (at("\\") || at("fun") || at("let") || at("dlet") || at("if")) return expr();
  return application();
}

bool SurfaceParser::atom_start() const {
  const Token& t = peek();
  switch (t.kind) {
    case Tok::Num: return true;
    case Tok::Ident: {
      if (t.text == "eagerly") return true;
      if (keywords().count(t.text)) return false;
      for (const auto& s : stops)
        if (s == t.text) return false;
      return true;
    }
    case Tok::Sym: return t.text == "(" || t.text == "[" || t.text == "'";
    default: return false;
  }
}

SNodeP SurfaceParser::application() {
  if (!atom_start()) fail("expected an expression");
  SNodeP f = atom();
  while (atom_start()) f = mk_app2(f, atom());
  return f;
}

SNodeP SurfaceParser::atom() {
  const Token& t = peek();
  if (t.kind == Tok::Num) {
    Token tok = next();
    auto n = mk(SNode::Num, tok);
    n->num = Int(tok.text);
    if (at("%") && peek().glued) {
      next();
      const Token& s = next();
      if (s.text == "N" || s.text == "nat") n->suffix = 'N';
      else if (s.text == "Z") n->suffix = 'Z';
      else throw ParseError("SyntaxError", s.line, s.col, "unknown literal scope %" + s.text);
    }
    return n;
  }
  if (t.kind == Tok::Ident) {
    Token tok = next();
    if (tok.text == "true" || tok.text == "false") {
      auto n = mk(SNode::Bool, tok);
      n->bval = tok.text == "true";
      return n;
    }
    if (tok.text == "eagerly") {
      const Token& h = peek();
      if (h.kind != Tok::Ident || keywords().count(h.text)) fail("expected an eliminator after 'eagerly'");
      Token ht = next();
      auto n = mk(SNode::Eager, tok);
      n->name = ht.text;
      return n;
    }
    if (tok.text == "clip_" && at("{") && peek().glued) {
      next();
      auto n = mk(SNode::Clip, tok);
      n->kids.push_back(expr());
      expect(",");
      n->kids.push_back(expr());
      expect("}");
      return n;
    }
    auto n = mk(SNode::Name, tok);
    if (tok.text[0] == '\'') {
      n->quoted = true;
      n->name = tok.text.substr(1);
    } else {
      n->name = tok.text;
    }
    return n;
  }
  if (at("'")) {
    next();
    if (!at("(")) fail("expected '(' after quote");
    return atom();
  }
  if (at("[")) {
    Token tok = next();
    auto n = mk(SNode::List, tok);
    if (accept("]")) return n;
    n->kids.push_back(expr());
    while (accept(";")) n->kids.push_back(expr());
    expect("]");
    return n;
  }
  if (at("(")) {
    Token tok = next();
    if (accept(")")) return mk(SNode::Unit, tok);
    // Operator sections: (+), (::), (mod), ...
    const Token& o = peek();
    if ((o.kind == Tok::Sym || o.text == "mod") && binops().count(o.text) && peek(1).kind == Tok::Sym &&
        peek(1).text == ")") {
      Token ot = next();
      next();
      auto n = mk(SNode::Op, ot);
      n->name = ot.text;
      return n;
    }
    SNodeP e = expr();
    if (accept(":")) {
      auto n = mk(SNode::Ascribe, tok);
      n->kids.push_back(e);
      n->type = type();
      expect(")");
      return n;
    }
    while (accept(",")) {
      auto p = mk(SNode::Pair, tok);
      p->kids = {e, expr()};
      e = p;
    }
    expect(")");
    return e;
  }
  fail("expected an expression");
}

SBinder SurfaceParser::pattern_binder() {
  // Called after the opening parenthesis of '( ... ) has been consumed.
  auto item = [this]() -> SBinder {
    if (accept("(")) return pattern_binder();
    SBinder b;
    const Token& t = peek();
    b.line = t.line;
    b.col = t.col;
    if (t.kind != Tok::Ident || keywords().count(t.text)) fail("expected a binder name");
    b.name = next().text;
    return b;
  };
  SBinder acc = item();
  while (accept(",")) {
    SBinder p;
    p.line = acc.line;
    p.col = acc.col;
    p.left = std::make_shared<SBinder>(acc);
    p.right = std::make_shared<SBinder>(item());
    acc = p;
  }
  expect(")");
  return acc;
}

SBinder SurfaceParser::binder() {
  const Token& t = peek();
  SBinder b;
  b.line = t.line;
  b.col = t.col;
  if (at("'")) {
    next();
    expect("(");
    return pattern_binder();
  }
  if (t.kind != Tok::Ident || keywords().count(t.text)) fail("expected a binder");
  b.name = next().text;
  return b;
}

void SurfaceParser::lambda_binders(std::vector<SBinder>& out) {
  while (true) {
    if (at(".") || at(",") || at("=>")) {
      next();
      return;
    }
    if (at(":") && !out.empty()) {
      // fun x y : T => e annotates the trailing untyped binders.
      next();
      TypeSynP t = type();
      for (size_t i = out.size(); i-- > 0 && !out[i].type && !out[i].left;) out[i].type = t;
      continue;
    }
    if (at("(")) {
      next();
      std::vector<SBinder> group;
      while (peek().kind == Tok::Ident && !keywords().count(peek().text)) {
        SBinder b;
        b.line = peek().line;
        b.col = peek().col;
        b.name = next().text;
        group.push_back(b);
      }
      if (group.empty()) fail("expected a binder name");
      if (accept(":")) {
        TypeSynP t = type();
        for (auto& b : group) b.type = t;
      }
      expect(")");
      for (auto& b : group) out.push_back(b);
      continue;
    }
    if (at("'") || (peek().kind == Tok::Ident && !keywords().count(peek().text))) {
      out.push_back(binder());
      continue;
    }
    fail("expected a binder or '.'");
  }
}

SNodeP SurfaceParser::lambda() {
  Token tok = next();
  auto n = mk(SNode::Lam, tok);
  lambda_binders(n->binders);
  if (n->binders.empty()) fail("lambda needs at least one binder");
  n->kids.push_back(expr());
  return n;
}

SNodeP SurfaceParser::let_expr() {
  Token tok = next();
  auto n = mk(SNode::Let, tok);
  n->binders.push_back(binder());
  if (accept(":")) n->type = type();
  expect(":=");
  n->kids.push_back(expr());
  expect("in");
  n->kids.push_back(expr());
  return n;
}

SNodeP SurfaceParser::if_expr() {
  Token tok = next();
  SNodeP c = expr();
  expect("then");
  SNodeP a = expr();
  expect("else");
  SNodeP b = expr();
  auto f = mk(SNode::Name, tok);
  f->name = "bool_rect";
  return mk_app2(mk_app2(mk_app2(f, a), b), c);
}

}  // namespace rw

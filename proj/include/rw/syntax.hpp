#pragma once

#include "rw/expr.hpp"
#include "rw/ident.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rw {

struct ParseError : std::runtime_error {
  std::string kind;  // SyntaxError, UnknownIdent, TypeMismatch, UnboundVar, ...
  int line = 0, col = 0;
  ParseError(std::string kind, int line, int col, const std::string& msg);
};

// ---- tokens -----------------------------------------------------------------

enum class Tok { Ident, Num, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line = 1, col = 1;
  bool glued = false;  // no whitespace before this token
};

std::vector<Token> lex(const std::string& text);

// ---- surface syntax ---------------------------------------------------------

struct TypeSyn {
  enum K { Name, List, Option, Prod, Arrow } k = Name;
  std::string name;
  std::shared_ptr<TypeSyn> a, b;
};
using TypeSynP = std::shared_ptr<TypeSyn>;

struct SNode;
using SNodeP = std::shared_ptr<SNode>;

// Binder pattern: a name (possibly "_") or a pair of patterns.
struct SBinder {
  std::string name;
  TypeSynP type;
  std::shared_ptr<SBinder> left, right;  // pair pattern when set
  int line = 0, col = 0;
};

struct SNode {
  enum K { Name, Num, Bool, Unit, Op, App, Lam, Let, Ascribe, Eager, Clip, Pair, List } k;
  std::string name;   // Name / Op / Eager (ident name)
  bool quoted = false;  // 'x marker
  Int num;
  char suffix = 0;    // 'N' or 'Z' for numeric literals with %N / %Z
  bool bval = false;
  std::vector<SNodeP> kids;  // App: fn, arg; Let: bound, body; Lam: body; Pair: a, b; List: elems
                             // Clip: lo, hi, (arg); Ascribe: expr
  std::vector<SBinder> binders;  // Lam binders, Let binder (one)
  TypeSynP type;                 // Ascribe target, Let annotation
  int line = 0, col = 0;
};

class SurfaceParser {
 public:
  explicit SurfaceParser(std::vector<Token> toks);
  SNodeP expr();
  TypeSynP type();
  SBinder binder();  // name, _, 'name, (x y : T) expands in lambda parsing

  const Token& peek(size_t k = 0) const;
  const Token& next();
  bool at(const std::string& sym) const;  // symbol or identifier text
  bool accept(const std::string& sym);
  void expect(const std::string& sym);
  bool at_end() const;
  [[noreturn]] void fail(const std::string& msg) const;
  size_t pos() const { return pos_; }

  // Stop tokens: an expression ends before any of these identifiers.
  std::vector<std::string> stops;

 private:
  SNodeP binop(int min_level);
  SNodeP unary();
  SNodeP application();
  SNodeP atom();
  bool atom_start() const;
  SNodeP lambda();
  SNodeP let_expr();
  SNodeP if_expr();
  void lambda_binders(std::vector<SBinder>& out);
  SBinder pattern_binder();

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// ---- elaboration ------------------------------------------------------------

struct PatternVarDecl {
  std::string name;
  TypeSynP type;  // may be null
  bool is_const = false;
  BinderId id;
};

// Elaborates surface terms into typed Exprs with unification-based inference.
// In rule mode unknown names are errors and unresolved types generalize to
// type variables; in term mode unknown names become free variables and
// unresolved types default to Z.
class Elaborator {
 public:
  Elaborator(const Registry& reg, bool rule_mode);
  ~Elaborator();

  void declare_pattern_vars(std::vector<PatternVarDecl>* vars);
  // Returns an index usable with result(); all terms of one rule share types.
  int add(const SNodeP& node);
  void unify_terms(int i, int j, const SNodeP& where);
  void require_type(int i, Type t, const SNodeP& where);
  void finish();
  ExprP result(int i) const;
  Type pattern_var_type(size_t k) const;
  int num_type_vars() const;
  // Names of pattern variables referenced with the ' marker.
  const std::vector<std::string>& quoted_names() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Type elaborate_type(const TypeSynP& t);  // closed types only

ExprP parse_term(const std::string& text, const Registry& reg);
Type parse_type(const std::string& text);

// ---- printing ---------------------------------------------------------------

struct PrintOptions {
  // Adds %N suffixes, ascriptions on ambiguous constants and free variables so
  // that the output reparses to an alpha-equal term.
  bool annotate = false;
  bool ascribe_free = true;  // with annotate: ascribe free variables too
};

std::string print(const ExprP& e, PrintOptions opts = {});

}  // namespace rw

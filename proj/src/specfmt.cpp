#include "hps/specfmt.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

namespace hps::specfmt {

ParseError::ParseError(int line, int column, std::string expected, std::string found)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": expected " + expected + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

namespace {

enum class Tok {
  Int, Ident, LParen, RParen, Comma, Assign, Plus, Minus, Star, Slash, Caret,
  Eq, Lt, Le, Gt, Ge, End
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    const int l0 = line;
    const int c0 = col;
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), l0, c0});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l0, c0});
      advance(j - i);
      continue;
    }
    auto two = [&](char next) { return i + 1 < src.size() && src[i + 1] == next; };
    Tok kind;
    std::size_t len = 1;
    switch (ch) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '=':
        if (two('=')) {
          kind = Tok::Eq;
          len = 2;
        } else {
          kind = Tok::Assign;
        }
        break;
      case '<':
        kind = two('=') ? Tok::Le : Tok::Lt;
        len = two('=') ? 2 : 1;
        break;
      case '>':
        kind = two('=') ? Tok::Ge : Tok::Gt;
        len = two('=') ? 2 : 1;
        break;
      default: {
        std::string found(1, ch);
        if (static_cast<unsigned char>(ch) >= 0x80 || !std::isprint(static_cast<unsigned char>(ch))) {
          std::ostringstream os;
          os << "byte 0x" << std::hex << (static_cast<unsigned>(static_cast<unsigned char>(ch)));
          found = os.str();
        }
        throw ParseError(l0, c0, "a token", "'" + found + "'");
      }
    }
    out.push_back({kind, std::string(src.substr(i, len)), l0, c0});
    advance(len);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {"family", "let", "if", "then", "else", "floor", "sqrt2"};
  return words;
}

constexpr int kMaxNesting = 200;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SpecAst parse_spec() {
    SpecAst ast;
    expect_word("family");
    ast.family = expect_ident("family name").text;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && t.text == "let") {
        parse_let(ast);
      } else if (t.kind == Tok::Ident && (t.text == "n" || t.text == "c" || t.text == "eta")) {
        parse_rule(ast);
      } else {
        fail("'let' or a rule head n(k), c(k), eta(k,l)");
      }
    }
    resolve_calls(ast);
    return ast;
  }

  ExprPtr parse_constant() {
    ExprPtr e = parse_expr();
    if (!at(Tok::End)) fail("end of input");
    if (!calls_.empty())
      throw ParseError(calls_[0].line, calls_[0].column, "a constant expression",
                       "call to '" + calls_[0].name + "'");
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;
  int depth_ = 0;
  struct PendingCall {
    std::string name;
    std::size_t arity;
    int line;
    int column;
    std::string owner;  // let name, or empty for rules
  };
  std::vector<PendingCall> calls_;
  std::string owner_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw ParseError(t.line, t.column, expected, describe(t));
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail(what);
    return take();
  }
  void expect_word(const char* w) {
    if (!at_word(w)) fail(std::string("'") + w + "'");
    take();
  }
  Token expect_ident(const std::string& what) {
    if (!at(Tok::Ident) || reserved().count(peek().text)) fail(what);
    return take();
  }

  void parse_let(SpecAst& ast) {
    take();  // let
    Token name = expect_ident("let name");
    if (name.text == "n" || name.text == "c" || name.text == "eta" || name.text == "prodc")
      throw ParseError(name.line, name.column, "a fresh let name", describe(name));
    for (const LetDef& d : ast.lets)
      if (d.name == name.text)
        throw ParseError(name.line, name.column, "a fresh let name (duplicate definition)", describe(name));
    LetDef def;
    def.name = name.text;
    expect(Tok::LParen, "'('");
    def.params.push_back(expect_ident("parameter name").text);
    while (at(Tok::Comma)) {
      take();
      Token p = expect_ident("parameter name");
      for (const auto& q : def.params)
        if (q == p.text) throw ParseError(p.line, p.column, "distinct parameter names", describe(p));
      def.params.push_back(p.text);
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Assign, "'='");
    scope_ = def.params;
    owner_ = def.name;
    def.body = parse_expr();
    ast.lets.push_back(std::move(def));
  }

  void parse_rule(SpecAst& ast) {
    Token head = take();
    std::optional<Rule>* slot = head.text == "n" ? &ast.n : head.text == "c" ? &ast.c : &ast.eta;
    if (slot->has_value())
      throw ParseError(head.line, head.column, "at most one " + head.text + " rule", "duplicate rule " + describe(head));
    expect(Tok::LParen, "'('");
    if (!at_word("k")) fail("'k'");
    take();
    scope_ = {"k"};
    if (head.text == "eta") {
      expect(Tok::Comma, "','");
      if (!at_word("l")) fail("'l'");
      take();
      scope_.push_back("l");
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Assign, "'='");
    owner_.clear();
    Rule r;
    r.line = head.line;
    r.column = head.column;
    r.body = parse_expr();
    *slot = std::move(r);
  }

  static ExprPtr make(Expr::Kind kind, const Token& at, std::vector<ExprPtr> args = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->line = at.line;
    e->column = at.column;
    e->args = std::move(args);
    return e;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxNesting) p.fail("shallower nesting (limit " + std::to_string(kMaxNesting) + ")");
    }
    ~DepthGuard() { --p.depth_; }
  };

  ExprPtr parse_expr() {
    DepthGuard guard(*this);
    if (at_word("if")) {
      Token t = take();
      ExprPtr lhs = parse_arith();
      CmpOp op;
      switch (peek().kind) {
        case Tok::Eq: op = CmpOp::Eq; break;
        case Tok::Lt: op = CmpOp::Lt; break;
        case Tok::Le: op = CmpOp::Le; break;
        case Tok::Gt: op = CmpOp::Gt; break;
        case Tok::Ge: op = CmpOp::Ge; break;
        default: fail("a comparison operator (==, <, <=, >, >=)");
      }
      take();
      ExprPtr rhs = parse_arith();
      expect_word("then");
      ExprPtr yes = parse_expr();
      expect_word("else");
      ExprPtr no = parse_expr();
      auto e = std::make_shared<Expr>(*make(Expr::Kind::If, t, {lhs, rhs, yes, no}));
      e->cmp = op;
      return e;
    }
    return parse_arith();
  }

  ExprPtr parse_arith() {
    ExprPtr lhs = parse_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Token op = take();
      ExprPtr rhs = parse_term();
      lhs = make(op.kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub, op, {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (at(Tok::Star) || at(Tok::Slash)) {
      Token op = take();
      ExprPtr rhs = parse_factor();
      lhs = make(op.kind == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div, op, {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    DepthGuard guard(*this);
    if (at(Tok::Minus)) {
      Token t = take();
      return make(Expr::Kind::Neg, t, {parse_factor()});
    }
    ExprPtr base = parse_atom();
    if (at(Tok::Caret)) {
      Token t = take();
      ExprPtr exponent;
      if (at(Tok::Minus)) {
        Token m = take();
        exponent = make(Expr::Kind::Neg, m, {parse_atom()});
      } else {
        exponent = parse_atom();
      }
      return make(Expr::Kind::Pow, t, {base, exponent});
    }
    return base;
  }

  ExprPtr parse_atom() {
    DepthGuard guard(*this);
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      Token lit = take();
      auto e = std::make_shared<Expr>(*make(Expr::Kind::Int, lit));
      e->value = mpz_class(lit.text, 10);
      return e;
    }
    if (t.kind == Tok::LParen) {
      take();
      ExprPtr inner = parse_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "sqrt2") return make(Expr::Kind::Sqrt2, take());
      if (t.text == "floor") {
        Token f = take();
        expect(Tok::LParen, "'(' after floor");
        ExprPtr inner = parse_expr();
        if (inner->kind != Expr::Kind::Div) {
          const Token& here = peek();
          throw ParseError(here.line, here.column, "a quotient 'a / b' inside floor", describe(here));
        }
        expect(Tok::RParen, "')'");
        return make(Expr::Kind::Floor, f, {inner->args[0], inner->args[1]});
      }
      if (reserved().count(t.text)) fail("an expression");
      Token id = take();
      if (at(Tok::LParen)) {
        take();
        std::vector<ExprPtr> args;
        args.push_back(parse_expr());
        while (at(Tok::Comma)) {
          take();
          args.push_back(parse_expr());
        }
        expect(Tok::RParen, "')'");
        calls_.push_back({id.text, args.size(), id.line, id.column, owner_});
        auto e = std::make_shared<Expr>(*make(Expr::Kind::Call, id, std::move(args)));
        e->name = id.text;
        return e;
      }
      for (const auto& v : scope_) {
        if (v == id.text) {
          auto e = std::make_shared<Expr>(*make(Expr::Kind::Var, id));
          e->name = id.text;
          return e;
        }
      }
      throw ParseError(id.line, id.column, "a bound variable", "unbound identifier " + describe(id));
    }
    fail("an expression");
  }

  void resolve_calls(const SpecAst& ast) {
    std::map<std::string, const LetDef*> lets;
    for (const LetDef& d : ast.lets) lets[d.name] = &d;
    std::map<std::string, std::set<std::string>> graph;
    for (const PendingCall& call : calls_) {
      if (call.name == "prodc") {
        if (call.arity != 1)
          throw ParseError(call.line, call.column, "prodc with one argument", "'" + call.name + "' with " +
                                                                                     std::to_string(call.arity) + " arguments");
        continue;
      }
      auto it = lets.find(call.name);
      if (it == lets.end())
        throw ParseError(call.line, call.column, "a declared function or prodc", "unknown function '" + call.name + "'");
      if (it->second->params.size() != call.arity)
        throw ParseError(call.line, call.column,
                         std::to_string(it->second->params.size()) + " arguments to " + call.name,
                         std::to_string(call.arity) + " arguments");
      if (!call.owner.empty()) graph[call.owner].insert(call.name);
    }
    // Reject recursion among let definitions.
    std::map<std::string, int> color;
    std::function<bool(const std::string&)> cyclic = [&](const std::string& v) {
      color[v] = 1;
      for (const auto& w : graph[v]) {
        if (color[w] == 1) return true;
        if (color[w] == 0 && cyclic(w)) return true;
      }
      color[v] = 2;
      return false;
    };
    for (const PendingCall& call : calls_) {
      if (call.owner.empty() || call.name == "prodc") continue;
      color.clear();
      if (cyclic(call.owner))
        throw ParseError(call.line, call.column, "non-recursive definitions", "recursive call to '" + call.name + "'");
    }
  }
};

}  // namespace

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Expr::Kind::Int:
      if (a.value != b.value) return false;
      break;
    case Expr::Kind::Var:
    case Expr::Kind::Call:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::If:
      if (a.cmp != b.cmp) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i])) return false;
  return true;
}

bool equal(const SpecAst& a, const SpecAst& b) {
  if (a.family != b.family || a.lets.size() != b.lets.size()) return false;
  for (std::size_t i = 0; i < a.lets.size(); ++i) {
    const LetDef& x = a.lets[i];
    const LetDef& y = b.lets[i];
    if (x.name != y.name || x.params != y.params || !equal(*x.body, *y.body)) return false;
  }
  auto same_rule = [](const std::optional<Rule>& x, const std::optional<Rule>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || equal(*x->body, *y->body);
  };
  return same_rule(a.n, b.n) && same_rule(a.c, b.c) && same_rule(a.eta, b.eta);
}

SpecAst parse(std::string_view source) {
  Parser p(lex(source));
  return p.parse_spec();
}

SpecAst parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open spec file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::If: return 0;
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
  }
}

void print(std::ostream& os, const Expr& e);

void print_wrapped(std::ostream& os, const Expr& e, bool wrap) {
  if (wrap) os << '(';
  print(os, e);
  if (wrap) os << ')';
}

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "==";
}

void print(std::ostream& os, const Expr& e) {
  const int p = precedence(e);
  switch (e.kind) {
    case Expr::Kind::Int: os << e.value.get_str(); return;
    case Expr::Kind::Sqrt2: os << "sqrt2"; return;
    case Expr::Kind::Var: os << e.name; return;
    case Expr::Kind::Call:
      os << e.name << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print(os, *e.args[i]);
      }
      os << ')';
      return;
    case Expr::Kind::Floor:
      os << "floor(";
      print_wrapped(os, *e.args[0], precedence(*e.args[0]) < 2);
      os << " / ";
      print_wrapped(os, *e.args[1], precedence(*e.args[1]) <= 2);
      os << ')';
      return;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      const char* op = e.kind == Expr::Kind::Add ? " + " : e.kind == Expr::Kind::Sub ? " - " : e.kind == Expr::Kind::Mul ? "*" : "/";
      print_wrapped(os, *e.args[0], precedence(*e.args[0]) < p);
      os << op;
      print_wrapped(os, *e.args[1], precedence(*e.args[1]) <= p);
      return;
    }
    case Expr::Kind::Neg:
      os << '-';
      print_wrapped(os, *e.args[0], precedence(*e.args[0]) < 3);
      return;
    case Expr::Kind::Pow: {
      print_wrapped(os, *e.args[0], precedence(*e.args[0]) < 5);
      os << '^';
      const Expr& x = *e.args[1];
      if (x.kind == Expr::Kind::Neg) {
        os << '-';
        print_wrapped(os, *x.args[0], precedence(*x.args[0]) < 5);
      } else {
        print_wrapped(os, x, precedence(x) < 5);
      }
      return;
    }
    case Expr::Kind::If:
      os << "if ";
      print_wrapped(os, *e.args[0], false);
      os << ' ' << cmp_text(e.cmp) << ' ';
      print_wrapped(os, *e.args[1], false);
      os << " then ";
      print_wrapped(os, *e.args[2], e.args[2]->kind == Expr::Kind::If);
      os << " else ";
      print(os, *e.args[3]);
      return;
  }
}

}  // namespace

std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::string pretty_print(const SpecAst& ast) {
  std::ostringstream os;
  os << "family " << ast.family << '\n';
  for (const LetDef& d : ast.lets) {
    os << "let " << d.name << '(';
    for (std::size_t i = 0; i < d.params.size(); ++i) os << (i ? ", " : "") << d.params[i];
    os << ") = " << pretty_print(*d.body) << '\n';
  }
  if (ast.n) os << "n(k) = " << pretty_print(*ast.n->body) << '\n';
  if (ast.c) os << "c(k) = " << pretty_print(*ast.c->body) << '\n';
  if (ast.eta) os << "eta(k,l) = " << pretty_print(*ast.eta->body) << '\n';
  return os.str();
}

namespace {

constexpr long kMaxExponent = 1 << 14;
constexpr long kMaxProductIndex = 1 << 16;

/// Interprets the rules of one AST. Shared by the generators of the ConstructionSpec it builds.
class Evaluator {
 public:
  explicit Evaluator(SpecAst ast) : ast_(std::move(ast)) {
    for (const LetDef& d : ast_.lets) lets_[d.name] = &d;
  }

  QSqrt2 rule(const Rule& r, int k, std::int64_t l) const {
    Env env;
    env.emplace_back("k", QSqrt2(k));
    if (l >= 0) env.emplace_back("l", QSqrt2(mpz_class(std::to_string(l), 10)));
    return eval(*r.body, env, k, l);
  }

  const SpecAst& ast() const { return ast_; }

  QSqrt2 constant(const Expr& e) const { return eval(e, Env{}, 0, -1); }

 private:
  using Env = std::vector<std::pair<std::string, QSqrt2>>;

  SpecAst ast_;
  std::map<std::string, const LetDef*> lets_;
  mutable std::recursive_mutex mu_;
  mutable std::vector<QSqrt2> products_{QSqrt2(1)};
  mutable bool in_product_ = false;

  [[noreturn]] static void error(const Expr& e, const std::string& what, int k, std::int64_t l) {
    std::ostringstream os;
    os << what << " (line " << e.line << ", column " << e.column << ", k=" << k;
    if (l >= 0) os << ", l=" << l;
    os << ')';
    throw EvalError(os.str(), k, l);
  }

  static long small_integer(const Expr& e, const QSqrt2& v, long limit, int k, std::int64_t l) {
    if (!v.is_integer()) error(e, "expected an integer, got " + v.to_string(), k, l);
    const mpz_class& z = v.rat().get_num();
    if (abs(z) > limit) error(e, "integer " + z.get_str() + " out of supported range", k, l);
    return z.get_si();
  }

  QSqrt2 product(const Expr& e, long j, int k, std::int64_t l) const {
    if (j < 0) error(e, "prodc of a negative index", k, l);
    std::unique_lock<std::recursive_mutex> lock(mu_);
    if (static_cast<std::size_t>(j) < products_.size()) return products_[static_cast<std::size_t>(j)];
    if (in_product_) error(e, "prodc used inside the c rule", k, l);
    if (!ast_.c) error(e, "prodc needs a c rule", k, l);
    in_product_ = true;
    try {
      while (products_.size() <= static_cast<std::size_t>(j)) {
        const int i = static_cast<int>(products_.size());
        QSqrt2 ci = rule(*ast_.c, i, -1);
        products_.push_back(products_.back() * ci);
      }
    } catch (...) {
      in_product_ = false;
      throw;
    }
    in_product_ = false;
    return products_[static_cast<std::size_t>(j)];
  }

  QSqrt2 eval(const Expr& e, const Env& env, int k, std::int64_t l) const {
    switch (e.kind) {
      case Expr::Kind::Int: return QSqrt2(e.value);
      case Expr::Kind::Sqrt2: return QSqrt2::sqrt2();
      case Expr::Kind::Var:
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first == e.name) return it->second;
        error(e, "unbound variable " + e.name, k, l);
      case Expr::Kind::Add: return eval(*e.args[0], env, k, l) + eval(*e.args[1], env, k, l);
      case Expr::Kind::Sub: return eval(*e.args[0], env, k, l) - eval(*e.args[1], env, k, l);
      case Expr::Kind::Mul: return eval(*e.args[0], env, k, l) * eval(*e.args[1], env, k, l);
      case Expr::Kind::Div: {
        QSqrt2 den = eval(*e.args[1], env, k, l);
        if (den.is_zero()) error(e, "division by zero", k, l);
        return eval(*e.args[0], env, k, l) / den;
      }
      case Expr::Kind::Neg: return -eval(*e.args[0], env, k, l);
      case Expr::Kind::Pow: {
        QSqrt2 base = eval(*e.args[0], env, k, l);
        long x = small_integer(*e.args[1], eval(*e.args[1], env, k, l), kMaxExponent, k, l);
        if (x < 0 && base.is_zero()) error(e, "negative power of zero", k, l);
        return base.pow(x);
      }
      case Expr::Kind::Floor: {
        QSqrt2 den = eval(*e.args[1], env, k, l);
        if (den.is_zero()) error(e, "division by zero in floor", k, l);
        return QSqrt2((eval(*e.args[0], env, k, l) / den).floor());
      }
      case Expr::Kind::If: {
        QSqrt2 a = eval(*e.args[0], env, k, l);
        QSqrt2 b = eval(*e.args[1], env, k, l);
        bool holds = false;
        switch (e.cmp) {
          case CmpOp::Eq: holds = a == b; break;
          case CmpOp::Lt: holds = a < b; break;
          case CmpOp::Le: holds = a <= b; break;
          case CmpOp::Gt: holds = a > b; break;
          case CmpOp::Ge: holds = a >= b; break;
        }
        return eval(*e.args[holds ? 2 : 3], env, k, l);
      }
      case Expr::Kind::Call: {
        if (e.name == "prodc") {
          long j = small_integer(*e.args[0], eval(*e.args[0], env, k, l), kMaxProductIndex, k, l);
          return product(e, j, k, l);
        }
        auto it = lets_.find(e.name);
        if (it == lets_.end()) error(e, "unknown function " + e.name, k, l);
        const LetDef& d = *it->second;
        Env inner;
        for (std::size_t i = 0; i < d.params.size(); ++i)
          inner.emplace_back(d.params[i], eval(*e.args[i], env, k, l));
        return eval(*d.body, inner, k, l);
      }
    }
    error(e, "malformed expression", k, l);
  }
};

}  // namespace

ConstructionSpec eval_spec(const SpecAst& ast, int max_depth) {
  if (!ast.n) throw EvalError("missing rule n(k)", 0);
  if (!ast.c) throw EvalError("missing rule c(k)", 0);
  if (!ast.eta) throw EvalError("missing rule eta(k,l)", 0);
  auto ev = std::make_shared<const Evaluator>(ast);
  auto n = [ev](int k) -> std::int64_t {
    QSqrt2 v = ev->rule(*ev->ast().n, k, -1);
    if (!v.is_integer()) throw EvalError("type error: n(" + std::to_string(k) + ") = " + v.to_string() + " is not an integer", k);
    if (!v.rat().get_num().fits_slong_p() || v.rat() > ConstructionSpec::kMaxChildren)
      throw EvalError("n(" + std::to_string(k) + ") too large", k);
    return v.rat().get_num().get_si();
  };
  auto c = [ev](int k) { return ev->rule(*ev->ast().c, k, -1); };
  auto eta = [ev](int k, std::int64_t l, const QSqrt2&, const QSqrt2&) { return ev->rule(*ev->ast().eta, k, l); };
  ConstructionSpec spec(ast.family, max_depth, n, c, eta);
  for (int k = 1; k <= max_depth; ++k) {
    const Level& lv = spec.level(k);
    if (lv.n < 2) throw EvalError("n(" + std::to_string(k) + ") = " + std::to_string(lv.n) + " is below 2", k);
    if (lv.c.sign() <= 0 || lv.c >= QSqrt2(1))
      throw EvalError("c out of range: c(" + std::to_string(k) + ") = " + lv.c.to_string() + " not in (0,1)", k);
    for (std::int64_t l = 0; l <= lv.n; ++l)
      if (lv.eta[static_cast<std::size_t>(l)].sign() < 0)
        throw EvalError("negative gap: eta(" + std::to_string(k) + "," + std::to_string(l) + ") = " +
                            lv.eta[static_cast<std::size_t>(l)].to_string(),
                        k, l);
  }
  return spec;
}

QSqrt2 eval_constant(std::string_view text) {
  Parser parser(lex(text));
  ExprPtr e = parser.parse_constant();
  return Evaluator(SpecAst{}).constant(*e);
}

}  // namespace hps::specfmt

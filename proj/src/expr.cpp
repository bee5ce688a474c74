#include "mink/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mink/errors.hpp"
#include "mink/hyperdual.hpp"

namespace mink {

double Jet::laplacian() const {
  double tr = 0.0;
  for (int i = 0; i < dim(); ++i) tr += hess(i, i);
  return tr;
}

double Jet::gradient_norm_sq() const {
  double s = 0.0;
  for (double g : gradient) s += g * g;
  return s;
}

double Jet::gradient_norm() const { return std::sqrt(gradient_norm_sq()); }

namespace {

// ---------------------------------------------------------------- parser

struct Token {
  enum Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Type type;
  std::size_t pos;
  double number = 0.0;
  std::string ident;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    current_.pos = pos_;
    if (pos_ >= text_.size()) {
      current_.type = Token::End;
      return;
    }
    const char c = text_[pos_];
    switch (c) {
      case '+': current_.type = Token::Plus; ++pos_; return;
      case '-': current_.type = Token::Minus; ++pos_; return;
      case '*': current_.type = Token::Star; ++pos_; return;
      case '/': current_.type = Token::Slash; ++pos_; return;
      case '^': current_.type = Token::Caret; ++pos_; return;
      case '(': current_.type = Token::LParen; ++pos_; return;
      case ')': current_.type = Token::RParen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lexNumber();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      current_.type = Token::Ident;
      current_.ident.assign(text_.substr(start, pos_ - start));
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  void lexNumber() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to a following identifier, not this number
      }
    }
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, out);
    if (ec != std::errc() || ptr != text_.data() + pos_)
      throw ParseError("malformed number", start);
    current_.type = Token::Number;
    current_.number = out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_;
};

class Parser {
 public:
  Parser(std::string_view text, int arity, std::vector<Expression::Node>& nodes)
      : lexer_(text), arity_(arity), nodes_(nodes) {}

  int parseAll() {
    int root = parseExpr();
    const Token& t = lexer_.peek();
    if (t.type != Token::End) throw ParseError("unexpected trailing input", t.pos);
    return root;
  }

 private:
  int add(Expression::Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parseExpr() {
    int lhs = parseTerm();
    for (;;) {
      const Token& t = lexer_.peek();
      if (t.type == Token::Plus || t.type == Token::Minus) {
        bool plus = t.type == Token::Plus;
        lexer_.take();
        int rhs = parseTerm();
        lhs = add({plus ? Expression::Kind::Add : Expression::Kind::Sub, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parseTerm() {
    int lhs = parseUnary();
    for (;;) {
      const Token& t = lexer_.peek();
      if (t.type == Token::Star || t.type == Token::Slash) {
        bool mul = t.type == Token::Star;
        lexer_.take();
        int rhs = parseUnary();
        lhs = add({mul ? Expression::Kind::Mul : Expression::Kind::Div, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parseUnary() {
    const Token& t = lexer_.peek();
    if (t.type == Token::Minus) {
      lexer_.take();
      int a = parseUnary();
      return add({Expression::Kind::Neg, 0.0, -1, a, -1});
    }
    if (t.type == Token::Plus) {
      lexer_.take();
      return parseUnary();
    }
    return parsePower();
  }

  int parsePower() {
    int base = parseAtom();
    if (lexer_.peek().type == Token::Caret) {
      std::size_t caretPos = lexer_.peek().pos;
      lexer_.take();
      int expo = parseUnary();
      return add({Expression::Kind::Pow, foldConstant(expo, caretPos), -1, base, -1});
    }
    return base;
  }

  // Exponents are restricted to constant (rational) values: the subtree
  // must contain no variables and is folded at parse time.
  double foldConstant(int node, std::size_t pos) {
    const Expression::Node& n = nodes_[static_cast<std::size_t>(node)];
    switch (n.kind) {
      case Expression::Kind::Constant: return n.constant;
      case Expression::Kind::Variable:
        throw ParseError("exponent must be a constant, found variable", pos);
      case Expression::Kind::Neg: return -foldConstant(n.a, pos);
      case Expression::Kind::Add: return foldConstant(n.a, pos) + foldConstant(n.b, pos);
      case Expression::Kind::Sub: return foldConstant(n.a, pos) - foldConstant(n.b, pos);
      case Expression::Kind::Mul: return foldConstant(n.a, pos) * foldConstant(n.b, pos);
      case Expression::Kind::Div: {
        double d = foldConstant(n.b, pos);
        if (d == 0.0) throw ParseError("division by zero in constant exponent", pos);
        return foldConstant(n.a, pos) / d;
      }
      case Expression::Kind::Pow: return std::pow(foldConstant(n.a, pos), n.constant);
      default:
        throw ParseError("exponent must be a rational constant expression", pos);
    }
  }

  int parseAtom() {
    Token t = lexer_.take();
    switch (t.type) {
      case Token::Number:
        return add({Expression::Kind::Constant, t.number, -1, -1, -1});
      case Token::LParen: {
        int inner = parseExpr();
        Token close = lexer_.take();
        if (close.type != Token::RParen) throw ParseError("expected ')'", close.pos);
        return inner;
      }
      case Token::Ident:
        return parseIdent(t);
      default:
        throw ParseError("expected a number, variable, function or '('", t.pos);
    }
  }

  int parseIdent(const Token& t) {
    static const struct { const char* name; Expression::Kind kind; } kFuncs[] = {
        {"sqrt", Expression::Kind::Sqrt}, {"exp", Expression::Kind::Exp},
        {"log", Expression::Kind::Log},   {"sin", Expression::Kind::Sin},
        {"cos", Expression::Kind::Cos},   {"sinh", Expression::Kind::Sinh},
        {"cosh", Expression::Kind::Cosh}, {"asinh", Expression::Kind::Asinh},
    };
    for (const auto& f : kFuncs) {
      if (t.ident == f.name) {
        Token open = lexer_.take();
        if (open.type != Token::LParen)
          throw ParseError("expected '(' after function '" + t.ident + "'", open.pos);
        int arg = parseExpr();
        Token close = lexer_.take();
        if (close.type != Token::RParen) throw ParseError("expected ')'", close.pos);
        return add({f.kind, 0.0, -1, arg, -1});
      }
    }
    // variables u1..un
    if (t.ident.size() >= 2 && t.ident[0] == 'u') {
      int index = 0;
      auto [ptr, ec] = std::from_chars(t.ident.data() + 1, t.ident.data() + t.ident.size(), index);
      if (ec == std::errc() && ptr == t.ident.data() + t.ident.size()) {
        if (index < 1 || index > arity_)
          throw ParseError("variable " + t.ident + " out of range for arity " +
                               std::to_string(arity_),
                           t.pos);
        return add({Expression::Kind::Variable, 0.0, index - 1, -1, -1});
      }
    }
    throw ParseError("unknown identifier '" + t.ident + "'", t.pos);
  }

  Lexer lexer_;
  int arity_;
  std::vector<Expression::Node>& nodes_;
};

// ------------------------------------------------------------ evaluation

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool is_integer(double q) { return std::rint(q) == q && std::isfinite(q); }

[[noreturn]] void domain_error(const Expression& e, int node, const std::string& what) {
  std::string subterm = e.render_subterm(node);
  throw EvalDomainError(what + " in subterm " + subterm, subterm);
}

// Domain guards differ between the plain-value path and the derivative
// path: sqrt(0) has a finite value but singular derivatives.
struct ValueTag {};
struct JetTag {};

template <class S, class Tag>
S eval_node(const Expression& e, int idx, std::span<const S> vars) {
  using Kind = Expression::Kind;
  const Expression::Node& n = e.nodes()[static_cast<std::size_t>(idx)];
  constexpr bool needs_derivatives = std::is_same_v<Tag, JetTag>;
  auto value_of = [](const S& s) {
    if constexpr (std::is_same_v<S, double>) return s; else return s.v;
  };
  switch (n.kind) {
    case Kind::Constant: return S(n.constant);
    case Kind::Variable: return vars[static_cast<std::size_t>(n.var)];
    case Kind::Add: return eval_node<S, Tag>(e, n.a, vars) + eval_node<S, Tag>(e, n.b, vars);
    case Kind::Sub: return eval_node<S, Tag>(e, n.a, vars) - eval_node<S, Tag>(e, n.b, vars);
    case Kind::Mul: return eval_node<S, Tag>(e, n.a, vars) * eval_node<S, Tag>(e, n.b, vars);
    case Kind::Neg: return -eval_node<S, Tag>(e, n.a, vars);
    case Kind::Div: {
      S a = eval_node<S, Tag>(e, n.a, vars);
      S b = eval_node<S, Tag>(e, n.b, vars);
      if (value_of(b) == 0.0) domain_error(e, idx, "division by zero");
      return a / b;
    }
    case Kind::Pow: {
      S a = eval_node<S, Tag>(e, n.a, vars);
      const double q = n.constant;
      if (q == 0.0) return S(1.0);
      if (q == 1.0) return a;
      const double av = value_of(a);
      if (av < 0.0 && !is_integer(q))
        domain_error(e, idx, "negative base with non-integer exponent");
      if (av == 0.0) {
        if (q < 0.0) domain_error(e, idx, "zero base with negative exponent");
        if (needs_derivatives && !is_integer(q))
          domain_error(e, idx, "derivative of power singular at zero base");
      }
      using mink::pow;
      using std::pow;
      return pow(a, q);
    }
    case Kind::Sqrt: {
      S a = eval_node<S, Tag>(e, n.a, vars);
      const double av = value_of(a);
      if (av < 0.0) domain_error(e, idx, "sqrt of a negative value");
      if (needs_derivatives && av == 0.0)
        domain_error(e, idx, "derivative of sqrt singular at zero");
      using mink::sqrt;
      using std::sqrt;
      return sqrt(a);
    }
    case Kind::Log: {
      S a = eval_node<S, Tag>(e, n.a, vars);
      if (value_of(a) <= 0.0) domain_error(e, idx, "log of a nonpositive value");
      using mink::log;
      using std::log;
      return log(a);
    }
    case Kind::Exp: {
      using mink::exp; using std::exp;
      return exp(eval_node<S, Tag>(e, n.a, vars));
    }
    case Kind::Sin: {
      using mink::sin; using std::sin;
      return sin(eval_node<S, Tag>(e, n.a, vars));
    }
    case Kind::Cos: {
      using mink::cos; using std::cos;
      return cos(eval_node<S, Tag>(e, n.a, vars));
    }
    case Kind::Sinh: {
      using mink::sinh; using std::sinh;
      return sinh(eval_node<S, Tag>(e, n.a, vars));
    }
    case Kind::Cosh: {
      using mink::cosh; using std::cosh;
      return cosh(eval_node<S, Tag>(e, n.a, vars));
    }
    case Kind::Asinh: {
      using mink::asinh; using std::asinh;
      return asinh(eval_node<S, Tag>(e, n.a, vars));
    }
  }
  throw std::logic_error("corrupt expression node");
}

void render_node(const Expression& e, int idx, std::string& out) {
  using Kind = Expression::Kind;
  const Expression::Node& n = e.nodes()[static_cast<std::size_t>(idx)];
  auto binary = [&](const char* op) {
    out += '(';
    render_node(e, n.a, out);
    out += op;
    render_node(e, n.b, out);
    out += ')';
  };
  auto func = [&](const char* name) {
    out += name;
    out += '(';
    render_node(e, n.a, out);
    out += ')';
  };
  switch (n.kind) {
    case Kind::Constant: out += format_double(n.constant); return;
    case Kind::Variable: out += 'u' + std::to_string(n.var + 1); return;
    case Kind::Add: binary(" + "); return;
    case Kind::Sub: binary(" - "); return;
    case Kind::Mul: binary("*"); return;
    case Kind::Div: binary("/"); return;
    case Kind::Neg:
      out += "(-";
      render_node(e, n.a, out);
      out += ')';
      return;
    case Kind::Pow:
      out += '(';
      render_node(e, n.a, out);
      out += "^(";
      out += format_double(n.constant);
      out += "))";
      return;
    case Kind::Sqrt: func("sqrt"); return;
    case Kind::Exp: func("exp"); return;
    case Kind::Log: func("log"); return;
    case Kind::Sin: func("sin"); return;
    case Kind::Cos: func("cos"); return;
    case Kind::Sinh: func("sinh"); return;
    case Kind::Cosh: func("cosh"); return;
    case Kind::Asinh: func("asinh"); return;
  }
}

}  // namespace

Expression parse(std::string_view text, int arity) {
  if (arity < 1) throw std::invalid_argument("expression arity must be >= 1");
  Expression e;
  e.arity_ = arity;
  Parser p(text, arity, e.nodes_);
  e.root_ = p.parseAll();
  return e;
}

std::string Expression::render() const { return render_subterm(root_); }

std::string Expression::render_subterm(int node) const {
  std::string out;
  render_node(*this, node, out);
  return out;
}

double Expression::value(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != arity_)
    throw std::invalid_argument("point dimension does not match expression arity");
  return eval_node<double, ValueTag>(*this, root_, point);
}

Jet Expression::jet(std::span<const double> point) const {
  const int n = arity_;
  if (static_cast<int>(point.size()) != n)
    throw std::invalid_argument("point dimension does not match expression arity");
  Jet out;
  out.gradient.assign(static_cast<std::size_t>(n), 0.0);
  out.hessian.assign(static_cast<std::size_t>(n) * n, 0.0);

  std::vector<HyperDual> vars(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        vars[static_cast<std::size_t>(k)] =
            HyperDual(point[static_cast<std::size_t>(k)], k == i ? 1.0 : 0.0, k == j ? 1.0 : 0.0, 0.0);
      HyperDual r = eval_node<HyperDual, JetTag>(*this, root_, std::span<const HyperDual>(vars));
      if (i == 0 && j == 0) out.value = r.v;
      if (i == j) out.gradient[static_cast<std::size_t>(i)] = r.d1;
      out.hessian[static_cast<std::size_t>(i) * n + j] = r.d12;
      out.hessian[static_cast<std::size_t>(j) * n + i] = r.d12;
    }
  }
  return out;
}

Jet evaluate_jet(const Expression& expr, std::span<const double> point) { return expr.jet(point); }

}  // namespace mink

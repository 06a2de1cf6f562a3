#include "acml/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace acml {

namespace detail {

enum class Kind { Number, Coord, Add, Sub, Mul, Div, Neg, Pow, Call };
enum class Func { Sin, Cos, Exp, Sqrt };

struct ExprNode {
  Kind kind;
  double number = 0.0;
  int coord = 0;  // 0-based
  Func func = Func::Sin;
  int exponent = 0;
  std::shared_ptr<const ExprNode> a, b;
  int offset = 0;  // source byte offset
  int length = 0;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

// shortest decimal rendering that round-trips the double
std::string format_number(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

struct Token {
  enum class Type { Number, Coord, Func, Plus, Minus, Star, Slash, Caret,
                    LParen, RParen, End };
  Type type;
  int offset;
  int length;
  double number = 0.0;
  int coord = 0;
  Func func = Func::Sin;
};

class Lexer {
 public:
  Lexer(std::string_view src, int dim) : src_(src), dim_(dim) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    tok_.offset = static_cast<int>(pos_);
    tok_.length = 1;
    if (pos_ >= src_.size()) {
      tok_.type = Token::Type::End;
      return;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': tok_.type = Token::Type::Plus; ++pos_; return;
      case '-': tok_.type = Token::Type::Minus; ++pos_; return;
      case '*': tok_.type = Token::Type::Star; ++pos_; return;
      case '/': tok_.type = Token::Type::Slash; ++pos_; return;
      case '^': tok_.type = Token::Type::Caret; ++pos_; return;
      case '(': tok_.type = Token::Type::LParen; ++pos_; return;
      case ')': tok_.type = Token::Type::RParen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      lex_ident();
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'",
                     tok_.offset, {"number", "coordinate", "function", "'('"});
  }

  void lex_number() {
    size_t end = pos_;
    while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      size_t mark = end + 1;
      if (mark < src_.size() && (src_[mark] == '+' || src_[mark] == '-')) ++mark;
      if (mark < src_.size() && std::isdigit(static_cast<unsigned char>(src_[mark]))) {
        ++mark;
        while (mark < src_.size() && std::isdigit(static_cast<unsigned char>(src_[mark]))) ++mark;
        end = mark;
      }
    }
    const std::string text(src_.substr(pos_, end - pos_));
    tok_.type = Token::Type::Number;
    tok_.number = std::strtod(text.c_str(), nullptr);
    tok_.length = static_cast<int>(end - pos_);
    pos_ = end;
  }

  void lex_ident() {
    size_t end = pos_;
    while (end < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[end])))) ++end;
    const std::string_view text = src_.substr(pos_, end - pos_);
    tok_.length = static_cast<int>(end - pos_);
    if (text.size() >= 2 && text[0] == 'x' &&
        text.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      const long idx = std::strtol(std::string(text.substr(1)).c_str(), nullptr, 10);
      if (idx < 1 || idx > dim_)
        throw ParseError("coordinate index " + std::to_string(idx) +
                             " out of range for dimension " + std::to_string(dim_),
                         tok_.offset, {"coordinate within dimension"});
      tok_.type = Token::Type::Coord;
      tok_.coord = static_cast<int>(idx - 1);
      pos_ = end;
      return;
    }
    if (text == "sin") tok_.func = Func::Sin;
    else if (text == "cos") tok_.func = Func::Cos;
    else if (text == "exp") tok_.func = Func::Exp;
    else if (text == "sqrt") tok_.func = Func::Sqrt;
    else
      throw ParseError("unknown symbol '" + std::string(text) + "'", tok_.offset,
                       {"coordinate", "sin", "cos", "exp", "sqrt"});
    tok_.type = Token::Type::Func;
    pos_ = end;
  }

  std::string_view src_;
  int dim_;
  size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view src, int dim) : lex_(src, dim) {}

  NodePtr run() {
    NodePtr e = expr();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::End)
      throw ParseError("unexpected trailing input", t.offset,
                       {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    return e;
  }

 private:
  static std::shared_ptr<ExprNode> make(Kind k, int offset, int length) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->offset = offset;
    n->length = length;
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      const Token& t = lex_.peek();
      if (t.type != Token::Type::Plus && t.type != Token::Type::Minus) return lhs;
      lex_.take();
      NodePtr rhs = term();
      auto n = make(t.type == Token::Type::Plus ? Kind::Add : Kind::Sub,
                    lhs->offset, rhs->offset + rhs->length - lhs->offset);
      n->a = lhs;
      n->b = rhs;
      lhs = n;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (true) {
      const Token& t = lex_.peek();
      if (t.type != Token::Type::Star && t.type != Token::Type::Slash) return lhs;
      lex_.take();
      NodePtr rhs = factor();
      auto n = make(t.type == Token::Type::Star ? Kind::Mul : Kind::Div,
                    lhs->offset, rhs->offset + rhs->length - lhs->offset);
      n->a = lhs;
      n->b = rhs;
      lhs = n;
    }
  }

  NodePtr factor() {
    NodePtr base = atom();
    if (lex_.peek().type != Token::Type::Caret) return base;
    lex_.take();
    bool negated = false;
    Token t = lex_.peek();
    if (t.type == Token::Type::Minus) {
      lex_.take();
      negated = true;
      t = lex_.peek();
    }
    if (t.type != Token::Type::Number || t.number != std::floor(t.number))
      throw ParseError("expected integer exponent", t.offset, {"integer"});
    if (std::fabs(t.number) > 64)
      throw ParseError("exponent magnitude exceeds 64", t.offset, {"small integer"});
    lex_.take();
    auto n = make(Kind::Pow, base->offset, t.offset + t.length - base->offset);
    n->a = base;
    n->exponent = static_cast<int>(t.number) * (negated ? -1 : 1);
    return n;
  }

  NodePtr atom() {
    const Token t = lex_.peek();
    switch (t.type) {
      case Token::Type::Number: {
        lex_.take();
        auto n = make(Kind::Number, t.offset, t.length);
        n->number = t.number;
        return n;
      }
      case Token::Type::Coord: {
        lex_.take();
        auto n = make(Kind::Coord, t.offset, t.length);
        n->coord = t.coord;
        return n;
      }
      case Token::Type::Minus: {
        lex_.take();
        NodePtr inner = atom();
        auto n = make(Kind::Neg, t.offset, inner->offset + inner->length - t.offset);
        n->a = inner;
        return n;
      }
      case Token::Type::LParen: {
        lex_.take();
        NodePtr inner = expr();
        expect_rparen();
        // grouping parentheses are not kept in the tree
        return inner;
      }
      case Token::Type::Func: {
        lex_.take();
        const Token& lp = lex_.peek();
        if (lp.type != Token::Type::LParen)
          throw ParseError("expected '(' after function name", lp.offset, {"'('"});
        lex_.take();
        NodePtr arg = expr();
        const int close = expect_rparen();
        auto n = make(Kind::Call, t.offset, close + 1 - t.offset);
        n->func = t.func;
        n->a = arg;
        return n;
      }
      default:
        throw ParseError("expected an operand", t.offset,
                         {"number", "coordinate", "function", "'('", "'-'"});
    }
  }

  int expect_rparen() {
    const Token& t = lex_.peek();
    if (t.type != Token::Type::RParen)
      throw ParseError("expected ')'", t.offset, {"')'"});
    return lex_.take().offset;
  }

  Lexer lex_;
};

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

bool is_atom(const ExprNode& n) {
  return n.kind == Kind::Number || n.kind == Kind::Coord || n.kind == Kind::Call;
}

void print_node(const ExprNode& n, std::string& out) {
  auto child = [&out](const ExprNode& c, bool parens) {
    if (parens) out += '(';
    print_node(c, out);
    if (parens) out += ')';
  };
  switch (n.kind) {
    case Kind::Number:
      out += format_number(n.number);
      return;
    case Kind::Coord:
      out += 'x';
      out += std::to_string(n.coord + 1);
      return;
    case Kind::Add:
      child(*n.a, false);
      out += '+';
      child(*n.b, precedence(n.b->kind) <= 1);
      return;
    case Kind::Sub:
      child(*n.a, false);
      out += '-';
      child(*n.b, precedence(n.b->kind) <= 1);
      return;
    case Kind::Mul:
      child(*n.a, precedence(n.a->kind) < 2);
      out += '*';
      child(*n.b, precedence(n.b->kind) <= 2);
      return;
    case Kind::Div:
      child(*n.a, precedence(n.a->kind) < 2);
      out += '/';
      child(*n.b, precedence(n.b->kind) <= 2);
      return;
    case Kind::Neg:
      out += '-';
      child(*n.a, !is_atom(*n.a));
      return;
    case Kind::Pow:
      child(*n.a, !is_atom(*n.a));
      out += '^';
      out += std::to_string(n.exponent);
      return;
    case Kind::Call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.a, out);
      out += ')';
      return;
  }
}

void sexpr_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number: out += format_number(n.number); return;
    case Kind::Coord: out += 'x'; out += std::to_string(n.coord + 1); return;
    case Kind::Neg:
      out += "(- ";
      sexpr_node(*n.a, out);
      out += ')';
      return;
    case Kind::Pow:
      out += "(^ ";
      sexpr_node(*n.a, out);
      out += ' ';
      out += std::to_string(n.exponent);
      out += ')';
      return;
    case Kind::Call:
      out += '(';
      out += func_name(n.func);
      out += ' ';
      sexpr_node(*n.a, out);
      out += ')';
      return;
    default: {
      const char* op = n.kind == Kind::Add   ? "+"
                       : n.kind == Kind::Sub ? "-"
                       : n.kind == Kind::Mul ? "*"
                                             : "/";
      out += '(';
      out += op;
      out += ' ';
      sexpr_node(*n.a, out);
      out += ' ';
      sexpr_node(*n.b, out);
      out += ')';
      return;
    }
  }
}

std::string node_text(const ExprNode& n) {
  std::string s;
  print_node(n, s);
  return s;
}

double eval_node(const ExprNode& n, const Point& p) {
  switch (n.kind) {
    case Kind::Number: return n.number;
    case Kind::Coord: return p[n.coord];
    case Kind::Add: return eval_node(*n.a, p) + eval_node(*n.b, p);
    case Kind::Sub: return eval_node(*n.a, p) - eval_node(*n.b, p);
    case Kind::Mul: return eval_node(*n.a, p) * eval_node(*n.b, p);
    case Kind::Div: {
      const double d = eval_node(*n.b, p);
      if (d == 0.0)
        throw EvalError("division by zero in '" + node_text(n) + "'", n.offset,
                        node_text(n));
      return eval_node(*n.a, p) / d;
    }
    case Kind::Neg: return -eval_node(*n.a, p);
    case Kind::Pow: {
      const double base = eval_node(*n.a, p);
      if (n.exponent < 0 && base == 0.0)
        throw EvalError("division by zero in '" + node_text(n) + "'", n.offset,
                        node_text(n));
      return std::pow(base, n.exponent);
    }
    case Kind::Call: {
      const double v = eval_node(*n.a, p);
      switch (n.func) {
        case Func::Sin: return std::sin(v);
        case Func::Cos: return std::cos(v);
        case Func::Exp: return std::exp(v);
        case Func::Sqrt:
          if (v < 0.0)
            throw EvalError("sqrt of negative value in '" + node_text(n) + "'",
                            n.offset, node_text(n));
          return std::sqrt(v);
      }
    }
  }
  return 0.0;
}

Jet jet_node(const ExprNode& n, const Point& p,
             const std::shared_ptr<const JetSpace>& sp) {
  switch (n.kind) {
    case Kind::Number: return Jet::constant(sp, n.number);
    case Kind::Coord: return Jet::coordinate(sp, n.coord, p[n.coord]);
    case Kind::Add: return jet_node(*n.a, p, sp) + jet_node(*n.b, p, sp);
    case Kind::Sub: return jet_node(*n.a, p, sp) - jet_node(*n.b, p, sp);
    case Kind::Mul: return jet_node(*n.a, p, sp) * jet_node(*n.b, p, sp);
    case Kind::Div:
      try {
        return jet_node(*n.a, p, sp) / jet_node(*n.b, p, sp);
      } catch (const EvalDomainError& e) {
        throw EvalError(std::string(e.what()) + " in '" + node_text(n) + "'",
                        n.offset, node_text(n));
      }
    case Kind::Neg: return -jet_node(*n.a, p, sp);
    case Kind::Pow:
      try {
        return Jet::pow_int(jet_node(*n.a, p, sp), n.exponent);
      } catch (const EvalDomainError& e) {
        throw EvalError(std::string(e.what()) + " in '" + node_text(n) + "'",
                        n.offset, node_text(n));
      }
    case Kind::Call: {
      Jet v = jet_node(*n.a, p, sp);
      try {
        switch (n.func) {
          case Func::Sin: return Jet::sin(v);
          case Func::Cos: return Jet::cos(v);
          case Func::Exp: return Jet::exp(v);
          case Func::Sqrt: return Jet::sqrt(v);
        }
      } catch (const EvalDomainError& e) {
        throw EvalError(std::string(e.what()) + " in '" + node_text(n) + "'",
                        n.offset, node_text(n));
      }
    }
  }
  return Jet();
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Number: return a.number == b.number;
    case Kind::Coord: return a.coord == b.coord;
    case Kind::Neg: return equal_nodes(*a.a, *b.a);
    case Kind::Pow: return a.exponent == b.exponent && equal_nodes(*a.a, *b.a);
    case Kind::Call: return a.func == b.func && equal_nodes(*a.a, *b.a);
    default: return equal_nodes(*a.a, *b.a) && equal_nodes(*a.b, *b.b);
  }
}

}  // namespace
}  // namespace detail

Expr Expr::parse(std::string_view source, int dim) {
  if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError("empty expression", 0,
                     {"number", "coordinate", "function", "'('", "'-'"});
  if (dim < 1) throw std::invalid_argument("Expr::parse: dimension must be >= 1");
  detail::Parser parser(source, dim);
  Expr e;
  e.root_ = parser.run();
  e.dim_ = dim;
  return e;
}

std::string Expr::print() const {
  std::string out;
  detail::print_node(*root_, out);
  return out;
}

std::string Expr::sexpr() const {
  std::string out;
  detail::sexpr_node(*root_, out);
  return out;
}

double Expr::value(const Point& p) const {
  if (p.size() != static_cast<size_t>(dim_))
    throw std::invalid_argument("Expr::value: point dimension mismatch");
  return detail::eval_node(*root_, p);
}

Jet Expr::jet(const Point& p, int order) const {
  if (p.size() != static_cast<size_t>(dim_))
    throw std::invalid_argument("Expr::jet: point dimension mismatch");
  return detail::jet_node(*root_, p, JetSpace::get(dim_, order));
}

std::optional<double> Expr::as_constant() const {
  const detail::ExprNode* n = root_.get();
  double sign = 1.0;
  while (n->kind == detail::Kind::Neg) {
    sign = -sign;
    n = n->a.get();
  }
  if (n->kind == detail::Kind::Number) return sign * n->number;
  return std::nullopt;
}

std::optional<int> Expr::as_coordinate() const {
  if (root_->kind == detail::Kind::Coord) return root_->coord;
  return std::nullopt;
}

bool Expr::structurally_equal(const Expr& other) const {
  return detail::equal_nodes(*root_, *other.root_);
}

double fd_partial(const Expr& e, const Point& p, int coord, double h) {
  if (h <= 0.0) throw std::invalid_argument("fd_partial: step must be positive");
  Point hi = p, lo = p;
  hi[coord] += h;
  lo[coord] -= h;
  return (e.value(hi) - e.value(lo)) / (2.0 * h);
}

}  // namespace acml

#include "stenfuse/phi_expr.hpp"

#include <cctype>
#include <cstdlib>

namespace stenfuse {

// Recursive-descent parser with standard precedence:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          (right-associative)
//   atom   := number | name | name '(' args ')' | q '(' int ',' int ')'
//           | '(' expr ')'
class ExprParser {
 public:
  ExprParser(const std::string& text, PhiExpr& out) : text_(text), out_(out) {}

  void run() {
    out_.text_ = text_;
    out_.root_ = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected trailing input");
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw config_error("phi expression: " + msg + " at position " + std::to_string(pos_ + 1) +
                       " in \"" + text_ + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int add(PhiExpr::Node n) {
    out_.nodes_.push_back(std::move(n));
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (eat('+')) {
        PhiExpr::Node n{PhiExpr::Op::add};
        n.lhs = lhs;
        n.rhs = parse_term();
        lhs = add(n);
      } else if (eat('-')) {
        PhiExpr::Node n{PhiExpr::Op::sub};
        n.lhs = lhs;
        n.rhs = parse_term();
        lhs = add(n);
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (eat('*')) {
        PhiExpr::Node n{PhiExpr::Op::mul};
        n.lhs = lhs;
        n.rhs = parse_unary();
        lhs = add(n);
      } else if (eat('/')) {
        PhiExpr::Node n{PhiExpr::Op::div};
        n.lhs = lhs;
        n.rhs = parse_unary();
        lhs = add(n);
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (eat('-')) {
      PhiExpr::Node n{PhiExpr::Op::neg};
      n.lhs = parse_unary();
      return add(n);
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_atom();
    if (eat('^')) {
      PhiExpr::Node n{PhiExpr::Op::pow};
      n.lhs = base;
      n.rhs = parse_unary();
      return add(n);
    }
    return base;
  }

  int parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected an operand");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const int e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    PhiExpr::Node n{PhiExpr::Op::number};
    n.number = v;
    return add(n);
  }

  int parse_name() {
    std::string name;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      name.push_back(text_[pos_++]);

    if (name == "q") {
      if (!eat('(')) fail("q requires (row, field)");
      const int row = parse_int();
      if (!eat(',')) fail("q requires two arguments");
      const int field = parse_int();
      if (!eat(')')) fail("expected ')'");
      PhiExpr::Node n{PhiExpr::Op::qref};
      n.ref = QRef{row, field};
      return add(n);
    }

    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      PhiExpr::Op op;
      int arity = 1;
      if (name == "exp") op = PhiExpr::Op::call_exp;
      else if (name == "log") op = PhiExpr::Op::call_log;
      else if (name == "sqrt") op = PhiExpr::Op::call_sqrt;
      else if (name == "abs") op = PhiExpr::Op::call_abs;
      else if (name == "min") { op = PhiExpr::Op::call_min; arity = 2; }
      else if (name == "max") { op = PhiExpr::Op::call_max; arity = 2; }
      else fail("unknown function '" + name + "'");
      PhiExpr::Node n{op};
      n.lhs = parse_expr();
      if (arity == 2) {
        if (!eat(',')) fail(name + " requires two arguments");
        n.rhs = parse_expr();
      }
      if (!eat(')')) fail("expected ')'");
      return add(n);
    }

    PhiExpr::Node n{PhiExpr::Op::param};
    n.param_name = name;
    return add(n);
  }

  int parse_int() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected an integer");
    return std::atoi(text_.substr(start, pos_ - start).c_str());
  }

  const std::string& text_;
  PhiExpr& out_;
  std::size_t pos_ = 0;
};

PhiExpr PhiExpr::parse(const std::string& text) {
  PhiExpr e;
  ExprParser(text, e).run();
  return e;
}

void PhiExpr::bind(const std::map<std::string, double>& params, int n_rows, int n_fields) {
  refs_.clear();
  param_values_.clear();
  flops_ = 0;
  for (Node& n : nodes_) {
    switch (n.op) {
      case Op::param: {
        const auto it = params.find(n.param_name);
        if (it == params.end())
          throw config_error("phi expression: unknown parameter '" + n.param_name + "' in \"" +
                             text_ + "\"");
        n.param_slot = static_cast<int>(param_values_.size());
        param_values_.push_back(it->second);
        break;
      }
      case Op::qref:
        if (n.ref.row < 0 || n.ref.row >= n_rows || n.ref.field < 0 || n.ref.field >= n_fields)
          throw config_error("phi expression: q(" + std::to_string(n.ref.row) + "," +
                             std::to_string(n.ref.field) + ") out of range in \"" + text_ + "\"");
        refs_.push_back(n.ref);
        break;
      case Op::number: break;
      default: flops_ += 1; break;
    }
  }
  bound_ = true;
}

ExpressionPhi::ExpressionPhi(std::vector<PhiExpr> exprs,
                             const std::map<std::string, double>& params, int n_rows,
                             int n_fields)
    : exprs_(std::move(exprs)) {
  if (exprs_.empty()) throw config_error("ExpressionPhi: no output expressions");
  for (auto& e : exprs_) e.bind(params, n_rows, n_fields);
}

void ExpressionPhi::eval(const double* q, int, int nf, Coord, double* out) const {
  for (std::size_t j = 0; j < exprs_.size(); ++j) out[j] = exprs_[j].eval<double>(q, nf);
}

void ExpressionPhi::eval(const float* q, int, int nf, Coord, float* out) const {
  for (std::size_t j = 0; j < exprs_.size(); ++j) out[j] = exprs_[j].eval<float>(q, nf);
}

std::vector<QRef> ExpressionPhi::used_entries(int output) const {
  return exprs_[static_cast<std::size_t>(output)].refs();
}

double ExpressionPhi::flops_per_point() const {
  double f = 0;
  for (const auto& e : exprs_) f += e.flops();
  return f;
}

}  // namespace stenfuse

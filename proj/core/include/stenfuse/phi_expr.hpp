#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "stenfuse/phi.hpp"

namespace stenfuse {

// Arithmetic expressions over Q entries and named parameters, used for
// user-defined output stages in problem-spec files. Grammar: reals,
// parameter names, q(row, field), + - * / unary minus, ^ (power,
// right-associative), calls exp/log/sqrt/abs/min/max, parentheses.
class PhiExpr {
 public:
  enum class Op {
    number,
    param,
    qref,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    call_exp,
    call_log,
    call_sqrt,
    call_abs,
    call_min,
    call_max,
  };

  struct Node {
    Op op;
    double number = 0;
    int param_slot = -1;
    std::string param_name;
    QRef ref{};
    int lhs = -1, rhs = -1;  // indices into the node pool
  };

  // Throws config_error with a 1-based character position on bad syntax.
  static PhiExpr parse(const std::string& text);

  // Resolves parameter names and validates q() references. Throws on
  // unknown parameters or out-of-range references.
  void bind(const std::map<std::string, double>& params, int n_rows, int n_fields);

  template <typename T>
  T eval(const T* q, int nf) const {
    return eval_node<T>(root_, q, nf);
  }

  const std::vector<QRef>& refs() const { return refs_; }
  double flops() const { return flops_; }
  const std::string& text() const { return text_; }
  bool bound() const { return bound_; }

 private:
  template <typename T>
  T eval_node(int idx, const T* q, int nf) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
      case Op::number: return static_cast<T>(n.number);
      case Op::param: return static_cast<T>(param_values_[static_cast<std::size_t>(n.param_slot)]);
      case Op::qref: return q[n.ref.row * nf + n.ref.field];
      case Op::add: return eval_node<T>(n.lhs, q, nf) + eval_node<T>(n.rhs, q, nf);
      case Op::sub: return eval_node<T>(n.lhs, q, nf) - eval_node<T>(n.rhs, q, nf);
      case Op::mul: return eval_node<T>(n.lhs, q, nf) * eval_node<T>(n.rhs, q, nf);
      case Op::div: return eval_node<T>(n.lhs, q, nf) / eval_node<T>(n.rhs, q, nf);
      case Op::pow: return std::pow(eval_node<T>(n.lhs, q, nf), eval_node<T>(n.rhs, q, nf));
      case Op::neg: return -eval_node<T>(n.lhs, q, nf);
      case Op::call_exp: return std::exp(eval_node<T>(n.lhs, q, nf));
      case Op::call_log: return std::log(eval_node<T>(n.lhs, q, nf));
      case Op::call_sqrt: return std::sqrt(eval_node<T>(n.lhs, q, nf));
      case Op::call_abs: return std::abs(eval_node<T>(n.lhs, q, nf));
      case Op::call_min:
        return std::min(eval_node<T>(n.lhs, q, nf), eval_node<T>(n.rhs, q, nf));
      case Op::call_max:
        return std::max(eval_node<T>(n.lhs, q, nf), eval_node<T>(n.rhs, q, nf));
    }
    return T(0);
  }

  friend class ExprParser;
  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<QRef> refs_;
  std::vector<double> param_values_;
  double flops_ = 0;
  std::string text_;
  bool bound_ = false;
};

// phi stage backed by one parsed expression per output field.
class ExpressionPhi final : public PointPhi {
 public:
  ExpressionPhi(std::vector<PhiExpr> exprs, const std::map<std::string, double>& params,
                int n_rows, int n_fields);

  int n_outputs() const override { return static_cast<int>(exprs_.size()); }
  void eval(const double* q, int ns, int nf, Coord c, double* out) const override;
  void eval(const float* q, int ns, int nf, Coord c, float* out) const override;
  std::vector<QRef> used_entries(int output) const override;
  double flops_per_point() const override;
  std::string name() const override { return "expression"; }

  const std::vector<PhiExpr>& exprs() const { return exprs_; }

 private:
  std::vector<PhiExpr> exprs_;
};

}  // namespace stenfuse

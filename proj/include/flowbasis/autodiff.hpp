#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace flowbasis {

class Var;

// Append-only record of scalar operations for reverse-mode differentiation.
// Each node stores at most two operands and the local partials with respect
// to them. Operands always precede the node, so a single backward pass in
// reverse insertion order propagates adjoints.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // New independent variable (leaf).
  Var variable(double value);

  std::size_t size() const noexcept { return nodes_.size(); }
  void clear() noexcept { nodes_.clear(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }

  // d(output)/d(node) for every node on the tape. Throws NumericError naming
  // the first node whose adjoint becomes non-finite.
  std::vector<double> adjoints(const Var& output) const;

  // Internal: records a node, returning its index.
  std::int32_t push(std::int32_t lhs, double d_lhs, std::int32_t rhs, double d_rhs) {
    nodes_.push_back({lhs, rhs, d_lhs, d_rhs});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

 private:
  struct Node {
    std::int32_t lhs;
    std::int32_t rhs;
    double d_lhs;
    double d_rhs;
  };
  std::vector<Node> nodes_;
};

// A scalar that is either a constant (no tape) or a node on a tape.
// Arithmetic between constants never touches a tape, so templated numeric
// code instantiated with Var evaluates plain values when fed only constants.
class Var {
 public:
  Var() = default;
  Var(double constant) : value_(constant) {}  // NOLINT(google-explicit-constructor)

  double value() const noexcept { return value_; }
  bool is_constant() const noexcept { return index_ < 0; }
  std::int32_t index() const noexcept { return index_; }
  Tape* tape() const noexcept { return tape_; }

  // Node with one operand and local derivative `d`.
  static Var unary(const Var& x, double value, double d) {
    if (x.is_constant()) return Var(value);
    return Var(x.tape_, x.tape_->push(x.index_, d, -1, 0.0), value);
  }
  // Node with two operands.
  static Var binary(const Var& a, double da, const Var& b, double db, double value) {
    if (a.is_constant()) return unary(b, value, db);
    if (b.is_constant()) return unary(a, value, da);
    return Var(a.tape_, a.tape_->push(a.index_, da, b.index_, db), value);
  }

  Var& operator+=(const Var& o) { return *this = *this + o; }
  Var& operator-=(const Var& o) { return *this = *this - o; }
  Var& operator*=(const Var& o) { return *this = *this * o; }
  Var& operator/=(const Var& o) { return *this = *this / o; }

  friend Var operator+(const Var& a, const Var& b) {
    return binary(a, 1.0, b, 1.0, a.value_ + b.value_);
  }
  friend Var operator-(const Var& a, const Var& b) {
    return binary(a, 1.0, b, -1.0, a.value_ - b.value_);
  }
  friend Var operator*(const Var& a, const Var& b) {
    return binary(a, b.value_, b, a.value_, a.value_ * b.value_);
  }
  friend Var operator/(const Var& a, const Var& b) {
    const double inv = 1.0 / b.value_;
    const double q = a.value_ * inv;
    return binary(a, inv, b, -q * inv, q);
  }
  friend Var operator-(const Var& a) { return unary(a, -a.value_, -1.0); }

 private:
  friend class Tape;
  Var(Tape* tape, std::int32_t index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::int32_t index_ = -1;
  double value_ = 0.0;
};

Var exp(const Var& x);
Var log(const Var& x);
Var sqrt(const Var& x);
Var tanh(const Var& x);
Var atanh(const Var& x);
Var sigmoid(const Var& x);

// Logistic function 1 / (1 + exp(-x)) for plain floating-point types.
template <class T>
T sigmoid(T x) {
  using std::exp;
  return T(1) / (T(1) + exp(-x));
}

inline double value_of(double x) { return x; }
inline double value_of(long double x) { return static_cast<double>(x); }
inline double value_of(const Var& x) { return x.value(); }

}  // namespace flowbasis

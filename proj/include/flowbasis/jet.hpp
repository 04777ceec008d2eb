#pragma once

namespace flowbasis {

// Second-order Taylor jet of a scalar function of one input:
// value, first and second derivative with respect to that input.
template <class T>
struct Jet2 {
  T value{};
  T d1{};
  T d2{};

  // The jet of the input variable itself at x.
  static Jet2 variable(T x) { return {x, T(1.0), T(0.0)}; }
  static Jet2 constant(T c) { return {c, T(0.0), T(0.0)}; }
};

template <class T>
Jet2<T> operator+(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
}

template <class T>
Jet2<T> operator-(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2};
}

template <class T>
Jet2<T> operator*(const Jet2<T>& a, const Jet2<T>& b) {
  return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
          a.d2 * b.value + T(2.0) * a.d1 * b.d1 + a.value * b.d2};
}

template <class T>
Jet2<T> scale(const T& c, const Jet2<T>& a) {
  return {c * a.value, c * a.d1, c * a.d2};
}

template <class T>
Jet2<T> shift(const Jet2<T>& a, const T& c) {
  return {a.value + c, a.d1, a.d2};
}

// f(u) given f, f', f'' evaluated at u.value.
template <class T>
Jet2<T> compose(const Jet2<T>& u, const T& f, const T& fp, const T& fpp) {
  return {f, fp * u.d1, fpp * u.d1 * u.d1 + fp * u.d2};
}

template <class T>
Jet2<T> reciprocal(const Jet2<T>& u) {
  const T inv = T(1.0) / u.value;
  const T inv2 = inv * inv;
  return compose(u, inv, -inv2, T(2.0) * inv2 * inv);
}

template <class T>
Jet2<T> tanh(const Jet2<T>& u) {
  using std::tanh;
  const T t = tanh(u.value);
  const T sech2 = T(1.0) - t * t;
  return compose(u, t, sech2, T(-2.0) * t * sech2);
}

template <class T>
Jet2<T> atanh(const Jet2<T>& u) {
  using std::atanh;
  const T inv = T(1.0) / (T(1.0) - u.value * u.value);
  return compose(u, atanh(u.value), inv, T(2.0) * u.value * inv * inv);
}

}  // namespace flowbasis

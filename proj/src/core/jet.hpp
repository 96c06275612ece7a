#pragma once

#include <span>
#include <vector>

#include "core/dual.hpp"
#include "core/linalg.hpp"

namespace kropina {

/// Metric components h_ij(x) and their partials dh[k](i,j) = ∂h_ij/∂x^k.
template <class T>
struct MetricJet {
  Matrix<T> h;
  std::vector<Matrix<T>> dh;
};

/// Vector field components W^i(x) and partials dw(i,j) = ∂W^i/∂x^j.
template <class T>
struct FieldJet {
  std::vector<T> w;
  Matrix<T> dw;
};

/// Scalar function value and gradient.
template <class T>
struct ScalarJet {
  T value{};
  std::vector<T> grad;
};

/// Kropina data a_ij(x), b_i(x) with partials da[k](i,j) = ∂a_ij/∂x^k and
/// db(i,k) = ∂b_i/∂x^k.
template <class T>
struct KropinaJet {
  Matrix<T> a;
  std::vector<Matrix<T>> da;
  std::vector<T> b;
  Matrix<T> db;
};

/// Type-erased source of jets, evaluable at every scalar type the geometry
/// pipeline differentiates through.
template <template <class> class Jet>
class JetSource {
 public:
  virtual ~JetSource() = default;
  virtual Jet<double> jet(std::span<const double> x) const = 0;
  virtual Jet<D1> jet(std::span<const D1> x) const = 0;
  virtual Jet<D2> jet(std::span<const D2> x) const = 0;
  virtual Jet<D3> jet(std::span<const D3> x) const = 0;
};

/// Implements the JetSource overloads of `Base` by forwarding to
/// `Derived::compute<T>(x)`.
template <class Derived, class Base, template <class> class Jet>
class JetImpl : public Base {
 public:
  Jet<double> jet(std::span<const double> x) const override { return self().template compute<double>(x); }
  Jet<D1> jet(std::span<const D1> x) const override { return self().template compute<D1>(x); }
  Jet<D2> jet(std::span<const D2> x) const override { return self().template compute<D2>(x); }
  Jet<D3> jet(std::span<const D3> x) const override { return self().template compute<D3>(x); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

template <class T>
std::vector<T> lift(std::span<const double> x) {
  return std::vector<T>(x.begin(), x.end());
}

}  // namespace kropina

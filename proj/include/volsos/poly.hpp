#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace volsos {

enum class Basis { Monomial, ChebyshevTensor };

std::string to_string(Basis basis);
Basis basis_from_string(const std::string& name);

// Exponent vector alpha of x^alpha (or of T_alpha in the tensor Chebyshev basis).
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}
  MultiIndex(std::initializer_list<int> e) : exponents(e) {}

  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(n, 0)); }

  int dimension() const { return static_cast<int>(exponents.size()); }
  int total_degree() const;
  int operator[](int k) const { return exponents[k]; }

  MultiIndex operator+(const MultiIndex& other) const;
  auto operator<=>(const MultiIndex&) const = default;
};

std::size_t binomial(int n, int k);

// Number of multi-indices in n variables with total degree <= d, i.e. C(n+d, d).
std::size_t graded_size(int n, int d);

// Position of alpha in graded lexicographic order (x1 > x2 > ... within a degree).
std::size_t graded_rank(const MultiIndex& alpha);

// All multi-indices of total degree <= d in graded lexicographic order.
// Shared immutable instances are cached per (n, d).
class GradedBasis {
 public:
  GradedBasis(int n, int d);

  int dimension() const { return n_; }
  int degree() const { return d_; }
  std::size_t size() const { return elements_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<MultiIndex>& elements() const { return elements_; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

 private:
  int n_;
  int d_;
  std::vector<MultiIndex> elements_;
};

std::shared_ptr<const GradedBasis> graded_basis(int n, int d);

// Dense polynomial over a graded basis. coeffs()[graded_rank(alpha)] is the
// coefficient of x^alpha (Monomial) or prod_k T_{alpha_k}(x_k) (ChebyshevTensor).
class Polynomial {
 public:
  struct Term {
    MultiIndex index;
    double coefficient;
  };

  static constexpr double kCleanupThreshold = 1e-14;

  explicit Polynomial(int dimension, Basis basis = Basis::Monomial);
  Polynomial(int dimension, Basis basis, std::vector<double> dense_coeffs);

  static Polynomial constant(int dimension, double value, Basis basis = Basis::Monomial);
  static Polynomial from_terms(int dimension, Basis basis, const std::vector<Term>& terms);
  // The single basis element x^alpha / T_alpha.
  static Polynomial basis_element(const MultiIndex& alpha, Basis basis);
  // 1 - sum_k x_k^2 in the requested basis.
  static Polynomial unit_ball(int dimension, Basis basis = Basis::Monomial);

  int dimension() const { return n_; }
  Basis basis() const { return basis_; }
  // Max total degree over nonzero coefficients; -1 for the zero polynomial.
  int degree() const { return degree_; }
  bool is_zero() const { return degree_ < 0; }

  // Dense coefficients over graded_basis(n, degree()).
  std::span<const double> coeffs() const { return coeffs_; }
  double coeff(const MultiIndex& alpha) const;
  std::vector<Term> terms() const;

  double evaluate(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return evaluate(x); }

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double scalar) const;
  friend Polynomial operator*(double s, const Polynomial& p) { return p * s; }

  // Coefficients padded with zeros to graded_size(n, d); d must be >= degree().
  std::vector<double> dense_coeffs(int d) const;

  // Largest absolute coefficient.
  double max_abs_coeff() const;

  std::string to_string() const;

 private:
  void normalize();

  int n_;
  Basis basis_;
  int degree_ = -1;
  std::vector<double> coeffs_;
};

Polynomial multiply(const Polynomial& p, const Polynomial& q);
Polynomial to_basis(const Polynomial& p, Basis target);

// Max |p_alpha - q_alpha| over the union of supports (bases must agree).
double max_coeff_difference(const Polynomial& p, const Polynomial& q);

// Expansion of basis_element(a) * basis_element(b) in the same basis.
std::vector<Polynomial::Term> basis_product(const MultiIndex& a, const MultiIndex& b, Basis basis);

// T_0(t) .. T_k(t).
std::vector<double> chebyshev_values(double t, int k);

}  // namespace volsos

#include "volsos/poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "volsos/errors.hpp"

namespace volsos {

std::string to_string(Basis basis) {
  return basis == Basis::Monomial ? "monomial" : "chebyshev";
}

Basis basis_from_string(const std::string& name) {
  if (name == "monomial") return Basis::Monomial;
  if (name == "chebyshev") return Basis::ChebyshevTensor;
  throw Error("unknown basis '" + name + "' (expected monomial or chebyshev)");
}

int MultiIndex::total_degree() const {
  int s = 0;
  for (int e : exponents) s += e;
  return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.dimension() != dimension()) throw DimensionMismatch("multi-index dimension mismatch");
  MultiIndex r = *this;
  for (int k = 0; k < dimension(); ++k) r.exponents[k] += other.exponents[k];
  return r;
}

std::size_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

std::size_t graded_size(int n, int d) { return d < 0 ? 0 : binomial(n + d, d); }

std::size_t graded_rank(const MultiIndex& alpha) {
  const int n = alpha.dimension();
  int remaining = alpha.total_degree();
  std::size_t rank = graded_size(n, remaining - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const int parts = n - i - 1;
    for (int v = remaining; v > alpha[i]; --v) rank += binomial(remaining - v + parts - 1, parts - 1);
    remaining -= alpha[i];
  }
  return rank;
}

namespace {

void enumerate_degree(int n, int k, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  const int pos = static_cast<int>(prefix.size());
  if (pos == n - 1) {
    prefix.push_back(k);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int v = k; v >= 0; --v) {
    prefix.push_back(v);
    enumerate_degree(n, k - v, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

GradedBasis::GradedBasis(int n, int d) : n_(n), d_(d) {
  if (n < 1) throw Error("graded basis needs n >= 1");
  if (d < 0) throw Error("graded basis needs d >= 0");
  elements_.reserve(graded_size(n, d));
  std::vector<int> prefix;
  for (int k = 0; k <= d; ++k) enumerate_degree(n, k, prefix, elements_);
}

std::shared_ptr<const GradedBasis> graded_basis(int n, int d) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const GradedBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, d}];
  if (!slot) slot = std::make_shared<const GradedBasis>(n, d);
  return slot;
}

std::vector<double> chebyshev_values(double t, int k) {
  std::vector<double> v(static_cast<std::size_t>(std::max(k, 0)) + 1);
  v[0] = 1.0;
  if (k >= 1) v[1] = t;
  for (int j = 2; j <= k; ++j) v[j] = 2.0 * t * v[j - 1] - v[j - 2];
  return v;
}

Polynomial::Polynomial(int dimension, Basis basis) : n_(dimension), basis_(basis) {
  if (dimension < 1) throw DimensionMismatch("polynomial dimension must be >= 1");
}

Polynomial::Polynomial(int dimension, Basis basis, std::vector<double> dense_coeffs)
    : n_(dimension), basis_(basis), coeffs_(std::move(dense_coeffs)) {
  if (dimension < 1) throw DimensionMismatch("polynomial dimension must be >= 1");
  // Pad up to a full graded block so that degree bookkeeping stays simple.
  int d = 0;
  while (graded_size(n_, d) < coeffs_.size()) ++d;
  coeffs_.resize(graded_size(n_, d), 0.0);
  normalize();
}

Polynomial Polynomial::constant(int dimension, double value, Basis basis) {
  return Polynomial(dimension, basis, std::vector<double>{value});
}

Polynomial Polynomial::from_terms(int dimension, Basis basis, const std::vector<Term>& terms) {
  int d = 0;
  for (const auto& t : terms) {
    if (t.index.dimension() != dimension) throw DimensionMismatch("term dimension does not match polynomial");
    for (int e : t.index.exponents)
      if (e < 0) throw Error("negative exponent");
    d = std::max(d, t.index.total_degree());
  }
  std::vector<double> c(graded_size(dimension, d), 0.0);
  for (const auto& t : terms) c[graded_rank(t.index)] += t.coefficient;
  return Polynomial(dimension, basis, std::move(c));
}

Polynomial Polynomial::basis_element(const MultiIndex& alpha, Basis basis) {
  return from_terms(alpha.dimension(), basis, {{alpha, 1.0}});
}

Polynomial Polynomial::unit_ball(int dimension, Basis basis) {
  std::vector<Term> terms{{MultiIndex::zero(dimension), 1.0}};
  for (int k = 0; k < dimension; ++k) {
    MultiIndex a = MultiIndex::zero(dimension);
    a.exponents[k] = 2;
    terms.push_back({a, -1.0});
  }
  return to_basis(from_terms(dimension, Basis::Monomial, terms), basis);
}

void Polynomial::normalize() {
  for (double& c : coeffs_)
    if (std::abs(c) < kCleanupThreshold) c = 0.0;
  auto last = std::find_if(coeffs_.rbegin(), coeffs_.rend(), [](double c) { return c != 0.0; });
  if (last == coeffs_.rend()) {
    coeffs_.clear();
    degree_ = -1;
    return;
  }
  const std::size_t last_pos = static_cast<std::size_t>(coeffs_.rend() - last) - 1;
  degree_ = 0;
  while (graded_size(n_, degree_) <= last_pos) ++degree_;
  coeffs_.resize(graded_size(n_, degree_));
}

double Polynomial::coeff(const MultiIndex& alpha) const {
  if (alpha.dimension() != n_) throw DimensionMismatch("multi-index dimension mismatch");
  const std::size_t r = graded_rank(alpha);
  return r < coeffs_.size() ? coeffs_[r] : 0.0;
}

std::vector<Polynomial::Term> Polynomial::terms() const {
  std::vector<Term> out;
  if (is_zero()) return out;
  const auto basis = graded_basis(n_, degree_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0.0) out.push_back({(*basis)[i], coeffs_[i]});
  return out;
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_)
    throw DimensionMismatch("point has dimension " + std::to_string(x.size()) + ", polynomial has " +
                            std::to_string(n_));
  if (is_zero()) return 0.0;
  // Per-coordinate tables of x_k^j or T_j(x_k).
  std::vector<std::vector<double>> table(n_);
  for (int k = 0; k < n_; ++k) {
    if (basis_ == Basis::Monomial) {
      table[k].resize(degree_ + 1);
      table[k][0] = 1.0;
      for (int j = 1; j <= degree_; ++j) table[k][j] = table[k][j - 1] * x[k];
    } else {
      table[k] = chebyshev_values(x[k], degree_);
    }
  }
  const auto basis = graded_basis(n_, degree_);
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0.0) continue;
    double term = coeffs_[i];
    const auto& alpha = (*basis)[i];
    for (int k = 0; k < n_; ++k) term *= table[k][alpha[k]];
    sum += term;
  }
  return sum;
}

std::vector<double> Polynomial::dense_coeffs(int d) const {
  if (d < degree_) throw Error("dense_coeffs: requested degree below polynomial degree");
  std::vector<double> c(graded_size(n_, d), 0.0);
  std::copy(coeffs_.begin(), coeffs_.end(), c.begin());
  return c;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

namespace {

void require_compatible(const Polynomial& p, const Polynomial& q) {
  if (p.dimension() != q.dimension()) throw DimensionMismatch("polynomial dimension mismatch");
  if (p.basis() != q.basis()) throw BasisMismatch("polynomial basis mismatch; convert with to_basis first");
}

}  // namespace

Polynomial Polynomial::operator+(const Polynomial& other) const {
  require_compatible(*this, other);
  std::vector<double> c(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) c[i] += other.coeffs_[i];
  return Polynomial(n_, basis_, std::move(c));
}

Polynomial Polynomial::operator-() const { return *this * -1.0; }

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + (-other); }

Polynomial Polynomial::operator*(double scalar) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= scalar;
  return Polynomial(n_, basis_, std::move(c));
}

Polynomial Polynomial::operator*(const Polynomial& other) const { return multiply(*this, other); }

std::string Polynomial::to_string() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& t : terms()) {
    if (!first) os << " + ";
    first = false;
    os << t.coefficient;
    os << (basis_ == Basis::Monomial ? "*x^(" : "*T(");
    for (int k = 0; k < n_; ++k) os << (k ? "," : "") << t.index[k];
    os << ")";
  }
  if (first) os << "0";
  return os.str();
}

std::vector<Polynomial::Term> basis_product(const MultiIndex& a, const MultiIndex& b, Basis basis) {
  if (basis == Basis::Monomial) return {{a + b, 1.0}};
  // T_i T_j = (T_{i+j} + T_{|i-j|}) / 2 per coordinate, expanded over the tensor product.
  const int n = a.dimension();
  std::vector<Polynomial::Term> out{{MultiIndex::zero(n), 1.0}};
  for (int k = 0; k < n; ++k) {
    const int s = a[k] + b[k];
    const int d = std::abs(a[k] - b[k]);
    std::vector<Polynomial::Term> next;
    next.reserve(out.size() * 2);
    for (auto& t : out) {
      if (s == d) {
        // one of the factors is T_0
        t.index.exponents[k] = s;
        next.push_back(t);
      } else {
        auto hi = t;
        hi.index.exponents[k] = s;
        hi.coefficient *= 0.5;
        auto lo = t;
        lo.index.exponents[k] = d;
        lo.coefficient *= 0.5;
        next.push_back(std::move(hi));
        next.push_back(std::move(lo));
      }
    }
    out = std::move(next);
  }
  return out;
}

Polynomial multiply(const Polynomial& p, const Polynomial& q) {
  require_compatible(p, q);
  const int n = p.dimension();
  if (p.is_zero() || q.is_zero()) return Polynomial(n, p.basis());
  const auto tp = p.terms();
  const auto tq = q.terms();
  std::vector<double> c(graded_size(n, p.degree() + q.degree()), 0.0);
  for (const auto& a : tp)
    for (const auto& b : tq)
      for (const auto& t : basis_product(a.index, b.index, p.basis()))
        c[graded_rank(t.index)] += a.coefficient * b.coefficient * t.coefficient;
  return Polynomial(n, p.basis(), std::move(c));
}

namespace {

using Wide = boost::multiprecision::cpp_bin_float_100;

// Univariate change-of-basis tables in extended precision. T_k has integer
// monomial coefficients up to 2^(k-1); the extra mantissa keeps the
// cancellation in the conversion sums below double rounding.
struct ConversionTables {
  std::vector<std::vector<Wide>> cheb_to_mono;  // [k][j]: coefficient of x^j in T_k
  std::vector<std::vector<Wide>> mono_to_cheb;  // [k][j]: coefficient of T_j in x^k

  void extend(int degree) {
    while (static_cast<int>(cheb_to_mono.size()) <= degree) {
      const int k = static_cast<int>(cheb_to_mono.size());
      std::vector<Wide> t(k + 1, Wide(0));
      std::vector<Wide> m(k + 1, Wide(0));
      if (k == 0) {
        t[0] = 1;
        m[0] = 1;
      } else if (k == 1) {
        t[1] = 1;
        m[1] = 1;
      } else {
        // T_k = 2x T_{k-1} - T_{k-2}
        for (int j = 0; j < k; ++j) t[j + 1] += 2 * cheb_to_mono[k - 1][j];
        for (int j = 0; j + 1 < k; ++j) t[j] -= cheb_to_mono[k - 2][j];
        // x * T_j = (T_{j+1} + T_{|j-1|}) / 2
        const auto& prev = mono_to_cheb[k - 1];
        for (int j = 0; j < k; ++j) {
          if (prev[j] == 0) continue;
          if (j == 0) {
            m[1] += prev[j];
          } else {
            m[j + 1] += prev[j] / 2;
            m[j - 1] += prev[j] / 2;
          }
        }
      }
      cheb_to_mono.push_back(std::move(t));
      mono_to_cheb.push_back(std::move(m));
    }
  }
};

void expand_term(const std::vector<std::vector<Wide>>& table, const MultiIndex& alpha, int k, const Wide& weight,
                 std::vector<int>& target, std::vector<Wide>& acc) {
  if (k == alpha.dimension()) {
    acc[graded_rank(MultiIndex(target))] += weight;
    return;
  }
  const auto& row = table[alpha[k]];
  for (int j = 0; j <= alpha[k]; ++j) {
    if (row[j] == 0) continue;
    target[k] = j;
    expand_term(table, alpha, k + 1, weight * row[j], target, acc);
  }
}

}  // namespace

Polynomial to_basis(const Polynomial& p, Basis target) {
  if (p.basis() == target || p.is_zero()) return Polynomial(p.dimension(), target, std::vector<double>(p.coeffs().begin(), p.coeffs().end()));
  static std::mutex mutex;
  static ConversionTables tables;
  std::lock_guard lock(mutex);
  tables.extend(p.degree());
  const auto& table = target == Basis::Monomial ? tables.cheb_to_mono : tables.mono_to_cheb;
  std::vector<Wide> acc(graded_size(p.dimension(), p.degree()), Wide(0));
  std::vector<int> scratch(p.dimension(), 0);
  for (const auto& t : p.terms()) expand_term(table, t.index, 0, Wide(t.coefficient), scratch, acc);
  std::vector<double> c(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) c[i] = static_cast<double>(acc[i]);
  return Polynomial(p.dimension(), target, std::move(c));
}

double max_coeff_difference(const Polynomial& p, const Polynomial& q) {
  require_compatible(p, q);
  const auto a = p.coeffs();
  const auto b = q.coeffs();
  double m = 0.0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    m = std::max(m, std::abs(x - y));
  }
  return m;
}

}  // namespace volsos

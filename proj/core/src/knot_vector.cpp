#include "splc/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "splc/errors.hpp"

namespace splc {

namespace {

std::string describe(const std::vector<double>& knots, int degree) {
  std::ostringstream os;
  os << "degree " << degree << ", " << knots.size() << " knots";
  return os.str();
}

}  // namespace

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0) throw ArgumentError("knot vector: negative degree");
  const auto m = static_cast<int>(knots_.size());
  if (m < 2 * (degree_ + 1))
    throw ArgumentError("knot vector: need at least 2(degree+1) knots, got " +
                        describe(knots_, degree_));
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw ArgumentError("knot vector: knots must be non-decreasing");
  for (double v : knots_)
    if (!std::isfinite(v)) throw ArgumentError("knot vector: non-finite knot");

  // Open form: both end knots repeated exactly degree+1 times.
  if (knots_.front() == knots_.back())
    throw ArgumentError("knot vector: empty parametric domain");
  if (knots_[degree_] != knots_.front() || knots_[degree_ + 1] == knots_.front())
    throw ArgumentError("knot vector: first knot must repeat exactly degree+1 times");
  if (knots_[m - degree_ - 1] != knots_.back() || knots_[m - degree_ - 2] == knots_.back())
    throw ArgumentError("knot vector: last knot must repeat exactly degree+1 times");

  // Interior multiplicity cap.
  int run = 1;
  for (int i = degree_ + 2; i < m - degree_ - 1; ++i) {
    run = (knots_[i] == knots_[i - 1]) ? run + 1 : 1;
    if (run > degree_)
      throw ArgumentError("knot vector: interior knot multiplicity exceeds degree");
  }
}

int KnotVector::span_count() const noexcept {
  int count = 0;
  const int n = basis_count();
  for (int i = degree_; i < n; ++i)
    if (knots_[i + 1] > knots_[i]) ++count;
  return count;
}

int KnotVector::find_span(double u) const {
  const int n = basis_count();
  if (!(u >= domain_min() && u <= domain_max())) {
    std::ostringstream os;
    os << "parameter " << u << " outside [" << domain_min() << ", " << domain_max() << "]";
    throw DomainError(os.str());
  }
  if (u >= knots_[n]) return n - 1;  // right-endpoint convention
  int lo = degree_, hi = n, mid = (lo + hi) / 2;
  while (u < knots_[mid] || u >= knots_[mid + 1]) {
    if (u < knots_[mid])
      hi = mid;
    else
      lo = mid;
    mid = (lo + hi) / 2;
  }
  return mid;
}

KnotVector::BasisSpan KnotVector::basis_values(double u) const {
  const int span = find_span(u);
  const int p = degree_;
  Eigen::VectorXd values(p + 1);
  values(0) = 1.0;
  std::vector<double> left(p + 1), right(p + 1);
  for (int j = 1; j <= p; ++j) {
    left[j] = u - knots_[span + 1 - j];
    right[j] = knots_[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = values(r) / (right[r + 1] + left[j - r]);
      values(r) = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    values(j) = saved;
  }
  return {span - p, std::move(values)};
}

KnotVector::BasisDerivatives KnotVector::basis_derivatives(double u, int order) const {
  const int p = degree_;
  if (order < 0 || order > p)
    throw ArgumentError("basis derivatives: order must lie in [0, degree]");
  const int span = find_span(u);

  // Banded triangular tables of the degree recursion (knot differences kept
  // alongside the values so the derivative sweep can reuse them).
  Eigen::MatrixXd ndu(p + 1, p + 1);
  ndu(0, 0) = 1.0;
  std::vector<double> left(p + 1), right(p + 1);
  for (int j = 1; j <= p; ++j) {
    left[j] = u - knots_[span + 1 - j];
    right[j] = knots_[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double tmp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu(j, j) = saved;
  }

  Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(order + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= order; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }

  double factor = p;
  for (int k = 1; k <= order; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
    factor *= (p - k);
  }
  return {span - p, std::move(ders)};
}

std::vector<double> KnotVector::greville_abscissae() const {
  const int n = basis_count();
  std::vector<double> points(n);
  if (degree_ == 0) {
    // Degenerate piecewise-constant case: span midpoints.
    for (int i = 0; i < n; ++i) points[i] = 0.5 * (knots_[i] + knots_[i + 1]);
    return points;
  }
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 1; j <= degree_; ++j) sum += knots_[i + j];
    points[i] = sum / degree_;
  }
  return points;
}

int KnotVector::multiplicity(double u) const noexcept {
  return static_cast<int>(std::count(knots_.begin(), knots_.end(), u));
}

KnotVector KnotVector::with_inserted(double u) const {
  if (!(u > domain_min() && u < domain_max()))
    throw ArgumentError("knot insertion: value must be strictly interior");
  if (multiplicity(u) >= degree_)
    throw ArgumentError("knot insertion: multiplicity would exceed degree");
  std::vector<double> knots = knots_;
  knots.insert(std::upper_bound(knots.begin(), knots.end(), u), u);
  return KnotVector(std::move(knots), degree_);
}

KnotVector KnotVector::refined_uniform(int levels) const {
  if (levels < 0) throw ArgumentError("refinement: negative level count");
  KnotVector result = *this;
  for (int l = 0; l < levels; ++l) {
    std::vector<double> midpoints;
    const auto& k = result.knots_;
    for (std::size_t i = 0; i + 1 < k.size(); ++i)
      if (k[i + 1] > k[i]) midpoints.push_back(0.5 * (k[i] + k[i + 1]));
    for (double m : midpoints) result = result.with_inserted(m);
  }
  return result;
}

bool KnotVector::nested_in(const KnotVector& fine) const noexcept {
  if (degree_ != fine.degree_) return false;
  return std::includes(fine.knots_.begin(), fine.knots_.end(), knots_.begin(), knots_.end());
}

KnotVector uniform_open_knots(int degree, int spans) {
  if (spans < 1) throw ArgumentError("uniform knots: need at least one span");
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(2 * (degree + 1) + spans - 1));
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (int i = 1; i < spans; ++i) knots.push_back(static_cast<double>(i) / spans);
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
  return KnotVector(std::move(knots), degree);
}

}  // namespace splc

#include "splc/spline_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "splc/errors.hpp"

namespace splc {

namespace {

// Pulls the next token, skipping blank lines and '#' comments.
bool next_token(std::istream& is, std::string& token) {
  while (is >> token) {
    if (token.front() == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    return true;
  }
  return false;
}

std::string expect_token(std::istream& is) {
  std::string token;
  if (!next_token(is, token)) throw FormatError("spline text: unexpected end of input");
  return token;
}

void expect_keyword(std::istream& is, const std::string& keyword) {
  const std::string token = expect_token(is);
  if (token != keyword)
    throw FormatError("spline text: expected '" + keyword + "', got '" + token + "'");
}

long expect_integer(std::istream& is) {
  const std::string token = expect_token(is);
  try {
    std::size_t pos = 0;
    const long v = std::stol(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError("spline text: expected integer, got '" + token + "'");
  }
}

double expect_real(std::istream& is) {
  const std::string token = expect_token(is);
  try {
    std::size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError("spline text: expected real, got '" + token + "'");
  }
}

}  // namespace

void write_spline_text(std::ostream& os, const SplineField& field) {
  const auto& basis = field.basis();
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "spline\n";
  os << "parametric_dim " << basis.dim() << "\n";
  os << "physical_dim " << field.physical_dim() << "\n";
  os << "degree";
  for (int k = 0; k < basis.dim(); ++k) os << ' ' << basis.direction(k).degree();
  os << "\n";
  for (int k = 0; k < basis.dim(); ++k) {
    const auto& knots = basis.direction(k).knots();
    os << "knots " << knots.size();
    for (double v : knots) os << ' ' << v;
    os << "\n";
  }
  os << "coefficients " << field.coefficients().rows() << "\n";
  for (Eigen::Index r = 0; r < field.coefficients().rows(); ++r) {
    for (Eigen::Index c = 0; c < field.coefficients().cols(); ++c) {
      if (c) os << ' ';
      os << field.coefficients()(r, c);
    }
    os << "\n";
  }
  if (field.rational()) {
    os << "weights " << field.weights().size();
    for (Eigen::Index i = 0; i < field.weights().size(); ++i) os << ' ' << field.weights()(i);
    os << "\n";
  }
}

SplineField read_spline_text(std::istream& is) {
  expect_keyword(is, "spline");
  expect_keyword(is, "parametric_dim");
  const long dhat = expect_integer(is);
  if (dhat < 1 || dhat > 2) throw FormatError("spline text: parametric_dim must be 1 or 2");
  expect_keyword(is, "physical_dim");
  const long d = expect_integer(is);
  if (d < 1 || d > 3) throw FormatError("spline text: physical_dim must lie in {1,2,3}");

  expect_keyword(is, "degree");
  std::vector<int> degrees(static_cast<std::size_t>(dhat));
  for (auto& p : degrees) p = static_cast<int>(expect_integer(is));

  std::vector<KnotVector> directions;
  for (long k = 0; k < dhat; ++k) {
    expect_keyword(is, "knots");
    const long count = expect_integer(is);
    if (count < 2) throw FormatError("spline text: knot count too small");
    std::vector<double> knots(static_cast<std::size_t>(count));
    for (auto& v : knots) v = expect_real(is);
    try {
      directions.emplace_back(std::move(knots), degrees[static_cast<std::size_t>(k)]);
    } catch (const ArgumentError& e) {
      throw FormatError(std::string("spline text: invalid knot vector: ") + e.what());
    }
  }
  TensorBasis basis(std::move(directions));

  expect_keyword(is, "coefficients");
  const long rows = expect_integer(is);
  if (rows != basis.total_count())
    throw FormatError("spline text: coefficient count does not match basis");
  Eigen::MatrixXd coeffs(rows, d);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < d; ++c) coeffs(r, c) = expect_real(is);

  std::string token;
  if (next_token(is, token)) {
    if (token != "weights") throw FormatError("spline text: unexpected token '" + token + "'");
    const long count = expect_integer(is);
    if (count != rows) throw FormatError("spline text: weight count does not match basis");
    Eigen::VectorXd weights(count);
    for (long i = 0; i < count; ++i) weights(i) = expect_real(is);
    return SplineField(std::move(basis), std::move(coeffs), std::move(weights));
  }
  return SplineField(std::move(basis), std::move(coeffs));
}

void write_spline_file(const std::string& path, const SplineField& field) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  write_spline_text(os, field);
}

SplineField read_spline_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return read_spline_text(is);
}

}  // namespace splc
